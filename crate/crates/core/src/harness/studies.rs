//! Moment verification, convergence sweeps and modulus tables.

use rayon::prelude::*;

use super::catalog::FunctionCatalogEntry;
use super::{linspace, within, ExperimentRow, QRule, SuiteConfig};
use crate::error::Result;
use crate::function::TargetFunction;
use crate::moduli::{
    ditzian_totik_domain, modulus_ditzian_totik_1, modulus_ditzian_totik_2, modulus_omega,
    modulus_omega2, modulus_weighted, ModulusQuery, StepWeight,
};
use crate::moments::{moment_report, MomentKind, MomentReport, DEFAULT_MOMENT_TOL};
use crate::operators::{kantorovich_stancu_apply, OperatorSpec, StancuParams};
use crate::qcore::QInterval;

/// Parameter grid for moment verification.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentGrid {
    pub n_list: Vec<u32>,
    pub q_list: Vec<f64>,
    pub stancu_list: Vec<StancuParams>,
    pub x_list: Vec<f64>,
}

impl MomentGrid {
    /// `n in {5,10,20,50}`, `q in {0.5,0.8,0.9,0.99}`,
    /// `(alpha, beta) in {(0,0),(0,1),(1,2)}`, `x in {0,0.1,0.5,1,2}`.
    pub fn standard() -> Self {
        let pair = |a, b| StancuParams::new(a, b).expect("valid pair");
        Self {
            n_list: vec![5, 10, 20, 50],
            q_list: vec![0.5, 0.8, 0.9, 0.99],
            stancu_list: vec![pair(0.0, 0.0), pair(0.0, 1.0), pair(1.0, 2.0)],
            x_list: vec![0.0, 0.1, 0.5, 1.0, 2.0],
        }
    }

    /// Every `(spec, x)` pair of the grid, in a fixed order.
    pub fn points(&self, cfg: &SuiteConfig) -> Result<Vec<(OperatorSpec, f64)>> {
        let mut out = Vec::new();
        for &n in &self.n_list {
            for &q in &self.q_list {
                for &stancu in &self.stancu_list {
                    let spec = SuiteConfig { stancu, ..*cfg }.spec_for(n, q)?;
                    out.extend(self.x_list.iter().map(|&x| (spec, x)));
                }
            }
        }
        Ok(out)
    }
}

/// Raw-moment reports for `m = 0, 1, 2` at every grid point.
pub fn run_moment_verification(grid: &MomentGrid, cfg: &SuiteConfig) -> Result<Vec<MomentReport>> {
    let points = grid.points(cfg)?;
    let nested: Vec<Vec<MomentReport>> = points
        .par_iter()
        .map(|(spec, x)| {
            (0..=2)
                .map(|m| moment_report(MomentKind::Raw, m, spec, *x, DEFAULT_MOMENT_TOL))
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(nested.into_iter().flatten().collect())
}

/// One row per report: relative gap to the derived closed form against the tolerance.
///
/// Reports whose stated closed form disagrees with the series carry an
/// `[erratum]` suffix in the metric name.
pub fn moment_rows(reports: &[MomentReport]) -> Vec<ExperimentRow> {
    reports
        .iter()
        .map(|r| {
            let prefix = match r.kind {
                MomentKind::Raw => "raw",
                MomentKind::Central => "central",
            };
            let suffix = if r.is_erratum() { "[erratum]" } else { "" };
            ExperimentRow::with_spec("moments", &r.spec, r.x, r.x).metric(
                format!("{prefix}_e{}{suffix}", r.order),
                r.rel_diff,
                r.tolerance,
                r.passed(),
                0,
            )
        })
        .collect()
}

fn sup_error(
    f: &TargetFunction,
    spec: &OperatorSpec,
    xs: &[f64],
    weight: impl Fn(f64) -> f64 + Sync,
) -> Result<f64> {
    let errors: Vec<f64> = xs
        .par_iter()
        .map(|&x| Ok((kantorovich_stancu_apply(f, spec, x)? - f.eval(x)).abs() / weight(x)))
        .collect::<Result<_>>()?;
    Ok(errors.into_iter().fold(0.0, f64::max))
}

/// Rows for a sequence of errors: each compared with its predecessor.
fn monotone_rows(
    experiment: &str,
    metric: &str,
    specs: &[OperatorSpec],
    errors: &[f64],
    (x_lo, x_hi): (f64, f64),
    density: usize,
) -> Vec<ExperimentRow> {
    specs
        .iter()
        .zip(errors)
        .enumerate()
        .map(|(i, (spec, &err))| {
            let previous = if i == 0 { err } else { errors[i - 1] };
            let slack = 10.0 * spec.k_tail_tol();
            let passed = within(err, previous) || err <= slack;
            ExperimentRow::with_spec(experiment, spec, x_lo, x_hi)
                .metric(metric, err, previous, passed, density)
        })
        .collect()
}

/// Sup-grid error `||L f - f||` on `[0, b]` for each order in `n_seq`.
///
/// Each row compares the error with the previous order's error.
pub fn run_convergence_study(
    f: &TargetFunction,
    n_seq: &[u32],
    rule: QRule,
    b: f64,
    cfg: &SuiteConfig,
) -> Result<Vec<ExperimentRow>> {
    let xs = linspace(0.0, b, cfg.sweep_points);
    let specs: Vec<OperatorSpec> = n_seq
        .iter()
        .map(|&n| cfg.spec_for(n, rule.q_for(n)))
        .collect::<Result<_>>()?;
    let errors: Vec<f64> = specs
        .iter()
        .map(|spec| sup_error(f, spec, &xs, |_| 1.0))
        .collect::<Result<_>>()?;
    Ok(monotone_rows(
        "convergence",
        &format!("sup_error:{}", f.name()),
        &specs,
        &errors,
        (0.0, b),
        cfg.sweep_points,
    ))
}

/// Weighted errors on `[0, x_max]` for each order in `n_seq`:
/// `||L e_r - e_r||_rho` for `r = 0, 1, 2` with `rho = 1 + x^2`, and
/// `sup |L f - f| / (1 + x^2)^{1 + a}` for the given `f` and exponent `a > 0`.
pub fn run_weighted_convergence(
    f: &TargetFunction,
    n_seq: &[u32],
    rule: QRule,
    exponent: f64,
    cfg: &SuiteConfig,
) -> Result<Vec<ExperimentRow>> {
    let xs = linspace(0.0, cfg.x_max, cfg.sweep_points);
    let specs: Vec<OperatorSpec> = n_seq
        .iter()
        .map(|&n| cfg.spec_for(n, rule.q_for(n)))
        .collect::<Result<_>>()?;
    let range = (0.0, cfg.x_max);
    let mut rows = Vec::new();
    for r in 0..=2 {
        let e = TargetFunction::monomial(r);
        let errors: Vec<f64> = specs
            .iter()
            .map(|spec| sup_error(&e, spec, &xs, |x| 1.0 + x * x))
            .collect::<Result<_>>()?;
        rows.extend(monotone_rows(
            "weighted_convergence",
            &format!("rho_norm:e{r}"),
            &specs,
            &errors,
            range,
            cfg.sweep_points,
        ));
    }
    let errors: Vec<f64> = specs
        .iter()
        .map(|spec| sup_error(f, spec, &xs, |x| (1.0 + x * x).powf(1.0 + exponent)))
        .collect::<Result<_>>()?;
    rows.extend(monotone_rows(
        "weighted_convergence",
        &format!("weighted_error:{}[a={exponent}]", f.name()),
        &specs,
        &errors,
        range,
        cfg.sweep_points,
    ));
    Ok(rows)
}

/// Which modulus a table row reports.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModulusKind {
    Omega,
    Omega2,
    Weighted {
        gamma: f64,
    },
    /// First-order Ditzian-Totik modulus with unit step weight.
    DitzianTotik1,
    /// Second-order Ditzian-Totik modulus with step weight `sqrt(x(1+x))`.
    DitzianTotik2,
}

impl ModulusKind {
    pub fn label(&self) -> String {
        match self {
            ModulusKind::Omega => "omega".into(),
            ModulusKind::Omega2 => "omega2".into(),
            ModulusKind::Weighted { gamma } => format!("weighted[gamma={gamma}]"),
            ModulusKind::DitzianTotik1 => "dt1".into(),
            ModulusKind::DitzianTotik2 => "dt2".into(),
        }
    }

    fn domain(&self, x_max: f64) -> Result<QInterval> {
        match self {
            ModulusKind::DitzianTotik1 | ModulusKind::DitzianTotik2 => Ok(ditzian_totik_domain()),
            _ => QInterval::new(0.0, x_max),
        }
    }

    fn evaluate(&self, qry: &ModulusQuery, x_max: f64) -> Result<f64> {
        Ok(match *self {
            ModulusKind::Omega => modulus_omega(qry),
            ModulusKind::Omega2 => modulus_omega2(qry),
            ModulusKind::Weighted { gamma } => {
                modulus_weighted(qry.f(), qry.delta(), gamma, x_max, qry.grid())?
            }
            ModulusKind::DitzianTotik1 => modulus_ditzian_totik_1(qry, StepWeight::Unit),
            ModulusKind::DitzianTotik2 => modulus_ditzian_totik_2(qry, StepWeight::SqrtXOnePlusX),
        })
    }
}

/// A modulus at the configured grid against the same modulus on a grid twice
/// as dense (passes when they agree within 1%), plus a comparison with the
/// closed form where the catalog has one.
pub fn run_modulus_table(
    entry: &FunctionCatalogEntry,
    kind: ModulusKind,
    delta: f64,
    cfg: &SuiteConfig,
) -> Result<Vec<ExperimentRow>> {
    let domain = kind.domain(cfg.x_max)?;
    let qry = ModulusQuery::new(entry.f.clone(), delta, domain)?.with_grid(cfg.grid);
    let dense = qry.clone().with_grid(cfg.grid.densified(2));
    let coarse_value = kind.evaluate(&qry, cfg.x_max)?;
    let dense_value = kind.evaluate(&dense, cfg.x_max)?;
    let template = ExperimentRow {
        experiment_id: "moduli".into(),
        n: 0,
        q: 0.0,
        alpha: 0.0,
        beta: 0.0,
        x_lo: domain.lower(),
        x_hi: domain.upper(),
        metric_name: String::new(),
        lhs: 0.0,
        rhs: 0.0,
        passed: false,
        grid_density: 0,
    };
    let label = kind.label();
    let agree = |a: f64, b: f64| (a - b).abs() <= 0.01 * b.abs().max(a.abs()) + super::ABS_SLACK;
    let mut rows = vec![template.clone().metric(
        format!("{label}:{}[delta={delta}]", entry.name),
        coarse_value,
        dense_value,
        agree(coarse_value, dense_value),
        cfg.grid.points,
    )];
    let analytic = match kind {
        ModulusKind::Omega => entry.omega,
        ModulusKind::Omega2 => entry.omega2,
        _ => None,
    };
    if let Some(closed) = analytic {
        let exact = closed(delta, domain.upper());
        rows.push(template.metric(
            format!("{label}_closed_form:{}[delta={delta}]", entry.name),
            dense_value,
            exact,
            agree(dense_value, exact),
            cfg.grid.densified(2).points,
        ));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::catalog::{catalog, lookup};

    fn small_cfg() -> SuiteConfig {
        SuiteConfig {
            sweep_points: 11,
            grid: crate::moduli::Grid::new(201, 16).unwrap(),
            ..SuiteConfig::default()
        }
    }

    #[test]
    fn moment_rows_count_three_per_point() {
        let grid = MomentGrid {
            n_list: vec![5],
            q_list: vec![0.5, 0.9],
            stancu_list: vec![StancuParams::IDENTITY],
            x_list: vec![0.0, 1.0],
        };
        let reports = run_moment_verification(&grid, &SuiteConfig::default()).unwrap();
        let rows = moment_rows(&reports);
        assert_eq!(rows.len(), 4 * 3);
        assert!(rows.iter().all(|r| r.passed));
        assert!(rows
            .iter()
            .filter(|r| r.metric_name.starts_with("raw_e0"))
            .all(|r| r.lhs <= 1e-12));
        assert!(rows.iter().any(|r| r.metric_name == "raw_e2[erratum]"));
    }

    #[test]
    fn constant_function_error_stays_at_tolerance() {
        let cfg = small_cfg();
        let rows = run_convergence_study(
            &TargetFunction::monomial(0),
            &[8, 16],
            QRule::Drifting,
            1.0,
            &cfg,
        )
        .unwrap();
        assert!(rows
            .iter()
            .all(|r| r.lhs <= 10.0 * cfg.tail_tol && r.passed));
    }

    #[test]
    fn fixed_q_first_moment_error_tends_to_bias() {
        let cfg = SuiteConfig {
            stancu: StancuParams::IDENTITY,
            ..small_cfg()
        };
        let rows = run_convergence_study(
            &TargetFunction::monomial(1),
            &[50, 200, 800],
            QRule::Fixed(0.9),
            1.0,
            &cfg,
        )
        .unwrap();
        // L(e1) - x = q/([2][n+1]) -> q(1 - q)/(1 + q) as n grows.
        let limit = 0.9 * 0.1 / 1.9;
        let last = rows.last().unwrap().lhs;
        assert!((last - limit).abs() < 1e-6, "{last} vs {limit}");
        assert!(rows.iter().all(|r| r.passed));
    }

    #[test]
    fn modulus_table_matches_closed_forms() {
        let entries = catalog(10.0).unwrap();
        let cfg = SuiteConfig {
            x_max: 2.0,
            ..SuiteConfig::default()
        };
        let rows = run_modulus_table(
            lookup(&entries, "e2").unwrap(),
            ModulusKind::Omega,
            0.1,
            &cfg,
        )
        .unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| r.passed), "{rows:?}");
        let rows = run_modulus_table(
            lookup(&entries, "e1").unwrap(),
            ModulusKind::Omega2,
            0.1,
            &cfg,
        )
        .unwrap();
        assert!(rows.iter().all(|r| r.passed && r.lhs < 1e-14));
    }
}
