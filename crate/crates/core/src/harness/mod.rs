//! Experiment runners that turn the operator estimates into numerical checks,
//! plus the CSV format shared by every experiment.

pub mod bounds;
pub mod catalog;
pub mod studies;

use std::cmp::Ordering;
use std::io::Write;
use std::path::Path;

use crate::error::Result;
use crate::moduli::Grid;
use crate::operators::{Construction, OperatorSpec, StancuParams, DEFAULT_K_TAIL_TOL};
use crate::qcore::{QContext, DEFAULT_SERIES_TOL};

pub use bounds::{
    run_bound_suite, run_finite_interval_bound, run_global_bound, run_lipschitz_bound,
    run_local_bound_check, run_weighted_modulus_bound, BoundSuite,
};
pub use catalog::{catalog, FunctionCatalogEntry};
pub use studies::{
    moment_rows, run_convergence_study, run_modulus_table, run_moment_verification,
    run_weighted_convergence, ModulusKind, MomentGrid,
};

/// Header of every experiment CSV.
pub const CSV_HEADER: &str =
    "experiment_id,n,q,alpha,beta,x_lo,x_hi,metric_name,lhs,rhs,passed,grid_density";

/// Relative slack on `lhs <= rhs` comparisons.
pub const REL_SLACK: f64 = 1e-9;
/// Absolute slack on `lhs <= rhs` comparisons, for quantities that vanish exactly.
pub const ABS_SLACK: f64 = 1e-12;

/// Candidate values of an unspecified absolute constant.
pub const C_CANDIDATES: [f64; 4] = [1.0, 2.0, 4.0, 8.0];

/// One record of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRow {
    pub experiment_id: String,
    pub n: u32,
    pub q: f64,
    pub alpha: f64,
    pub beta: f64,
    pub x_lo: f64,
    pub x_hi: f64,
    pub metric_name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub passed: bool,
    pub grid_density: usize,
}

impl ExperimentRow {
    fn with_spec(experiment_id: &str, spec: &OperatorSpec, x_lo: f64, x_hi: f64) -> Self {
        Self {
            experiment_id: experiment_id.to_owned(),
            n: spec.n(),
            q: spec.q(),
            alpha: spec.stancu().alpha(),
            beta: spec.stancu().beta(),
            x_lo,
            x_hi,
            metric_name: String::new(),
            lhs: 0.0,
            rhs: 0.0,
            passed: false,
            grid_density: 0,
        }
    }

    fn metric(
        mut self,
        name: impl Into<String>,
        lhs: f64,
        rhs: f64,
        passed: bool,
        density: usize,
    ) -> Self {
        self.metric_name = name.into();
        self.lhs = lhs;
        self.rhs = rhs;
        self.passed = passed;
        self.grid_density = density;
        self
    }
}

/// `lhs <= rhs` up to [`REL_SLACK`] and [`ABS_SLACK`].
pub fn within(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs * (1.0 + REL_SLACK) + ABS_SLACK
}

/// Smallest candidate `C` with `lhs_i <= C a_i + b_i` for every `i`.
pub fn empirical_constant(lhs: &[f64], a: &[f64], b: &[f64]) -> Option<f64> {
    C_CANDIDATES.into_iter().find(|&c| {
        lhs.iter()
            .zip(a)
            .zip(b)
            .all(|((&l, &a), &b)| within(l, c * a + b))
    })
}

/// Schedule of `q` along a sequence of operator orders.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QRule {
    Fixed(f64),
    /// `q_n = 1 - 1/n`.
    Drifting,
}

impl QRule {
    pub fn q_for(&self, n: u32) -> f64 {
        match *self {
            QRule::Fixed(q) => q,
            QRule::Drifting => 1.0 - 1.0 / f64::from(n),
        }
    }
}

/// Operator and grid settings shared by all experiments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    pub n: u32,
    pub q: f64,
    pub stancu: StancuParams,
    pub tail_tol: f64,
    pub series_tol: f64,
    pub construction: Construction,
    /// Modulus grid.
    pub grid: Grid,
    /// Upper end of `x` sweeps on `[0, inf)`.
    pub x_max: f64,
    /// Points per `x` grid in pointwise bound checks.
    pub x_points: usize,
    /// Points per `x` grid in sup-norm sweeps.
    pub sweep_points: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            n: 20,
            q: 0.9,
            stancu: StancuParams::new(1.0, 2.0).expect("valid defaults"),
            tail_tol: DEFAULT_K_TAIL_TOL,
            series_tol: DEFAULT_SERIES_TOL,
            construction: Construction::Normalized,
            grid: Grid::default(),
            x_max: 10.0,
            x_points: 21,
            sweep_points: 101,
        }
    }
}

impl SuiteConfig {
    /// The operator at the configured `n` and `q`.
    pub fn spec(&self) -> Result<OperatorSpec> {
        self.spec_for(self.n, self.q)
    }

    /// The operator at order `n` and parameter `q`, other settings unchanged.
    pub fn spec_for(&self, n: u32, q: f64) -> Result<OperatorSpec> {
        let ctx = QContext::new(q)?.with_series_tol(self.series_tol)?;
        OperatorSpec::new(n, ctx)?
            .with_stancu(self.stancu)
            .with_k_tail_tol(self.tail_tol)
            .map(|s| s.with_construction(self.construction))
    }
}

/// `points` equispaced values in `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..points)
            .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
            .collect(),
    }
}

fn row_order(a: &ExperimentRow, b: &ExperimentRow) -> Ordering {
    a.experiment_id
        .cmp(&b.experiment_id)
        .then(a.n.cmp(&b.n))
        .then(a.q.total_cmp(&b.q))
        .then(a.x_lo.total_cmp(&b.x_lo))
        .then(a.x_hi.total_cmp(&b.x_hi))
        .then(a.alpha.total_cmp(&b.alpha))
        .then(a.beta.total_cmp(&b.beta))
        .then(a.metric_name.cmp(&b.metric_name))
        .then(a.grid_density.cmp(&b.grid_density))
}

/// Sorts rows into the canonical `(experiment, n, q, x, ...)` order.
pub fn sort_rows(rows: &mut [ExperimentRow]) {
    rows.sort_by(row_order);
}

fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes rows as CSV in canonical order.
pub fn write_csv<W: Write>(rows: &[ExperimentRow], out: W) -> std::io::Result<()> {
    let mut sorted = rows.to_vec();
    sort_rows(&mut sorted);
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    writer.write_record(CSV_HEADER.split(','))?;
    for r in &sorted {
        writer.write_record([
            r.experiment_id.clone(),
            r.n.to_string(),
            fmt_float(r.q),
            fmt_float(r.alpha),
            fmt_float(r.beta),
            fmt_float(r.x_lo),
            fmt_float(r.x_hi),
            r.metric_name.clone(),
            fmt_float(r.lhs),
            fmt_float(r.rhs),
            r.passed.to_string(),
            r.grid_density.to_string(),
        ])?;
    }
    writer.flush()
}

/// Writes rows to `path` as CSV in canonical order.
pub fn emit_csv(rows: &[ExperimentRow], path: &Path) -> std::io::Result<()> {
    let file = std::fs::File::create(path).map_err(|e| with_path(e, path))?;
    write_csv(rows, std::io::BufWriter::new(file)).map_err(|e| with_path(e, path))
}

fn with_path(e: std::io::Error, path: &Path) -> std::io::Error {
    std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))
}

/// Parses a CSV written by [`write_csv`].
pub fn read_csv<R: std::io::Read>(input: R) -> std::result::Result<Vec<ExperimentRow>, csv::Error> {
    let mut reader = csv::Reader::from_reader(input);
    let mut rows = Vec::new();
    for record in reader.records() {
        let r = record?;
        let float = |i: usize| r[i].parse::<f64>().unwrap_or(f64::NAN);
        rows.push(ExperimentRow {
            experiment_id: r[0].to_owned(),
            n: r[1].parse().unwrap_or(0),
            q: float(2),
            alpha: float(3),
            beta: float(4),
            x_lo: float(5),
            x_hi: float(6),
            metric_name: r[7].to_owned(),
            lhs: float(8),
            rhs: float(9),
            passed: &r[10] == "true",
            grid_density: r[11].parse().unwrap_or(0),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(id: &str, n: u32, x: f64) -> ExperimentRow {
        ExperimentRow {
            experiment_id: id.into(),
            n,
            q: 0.9,
            alpha: 0.0,
            beta: 0.0,
            x_lo: x,
            x_hi: x,
            metric_name: "m".into(),
            lhs: 0.1,
            rhs: 1.0 / 3.0,
            passed: true,
            grid_density: 2001,
        }
    }

    #[test]
    fn empty_rows_give_header_only() {
        let mut buf = Vec::new();
        write_csv(&[], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn one_row_round_trips() {
        let r = row("x", 5, 0.25);
        let mut buf = Vec::new();
        write_csv(std::slice::from_ref(&r), &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(text.contains("3.3333333333333331e-1"));
        assert_eq!(read_csv(buf.as_slice()).unwrap(), vec![r]);
    }

    #[test]
    fn rows_are_sorted_canonically() {
        let rows = vec![
            row("b", 1, 0.0),
            row("a", 9, 0.5),
            row("a", 9, 0.1),
            row("a", 2, 1.0),
        ];
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let parsed = read_csv(buf.as_slice()).unwrap();
        let keys: Vec<(String, u32, f64)> = parsed
            .iter()
            .map(|r| (r.experiment_id.clone(), r.n, r.x_lo))
            .collect();
        assert_eq!(
            keys,
            vec![
                ("a".into(), 2, 1.0),
                ("a".into(), 9, 0.1),
                ("a".into(), 9, 0.5),
                ("b".into(), 1, 0.0)
            ]
        );
    }

    #[test]
    fn emit_csv_reports_path_on_failure() {
        let err = emit_csv(&[], Path::new("/nonexistent-dir/out.csv")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/out.csv"));
    }

    #[test]
    fn empirical_constant_picks_smallest() {
        assert_eq!(
            empirical_constant(&[1.0, 3.0], &[1.0, 1.0], &[0.0, 0.0]),
            Some(4.0)
        );
        assert_eq!(empirical_constant(&[0.5], &[0.0], &[0.5]), Some(1.0));
        assert_eq!(empirical_constant(&[10.0], &[1.0], &[0.0]), None);
    }

    #[test]
    fn q_rules() {
        assert_eq!(QRule::Fixed(0.3).q_for(10), 0.3);
        assert_eq!(QRule::Drifting.q_for(8), 0.875);
    }

    #[test]
    fn linspace_endpoints() {
        assert_eq!(linspace(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
        assert_eq!(linspace(2.0, 3.0, 1), vec![2.0]);
    }
}
