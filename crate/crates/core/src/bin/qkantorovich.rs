use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use qkantorovich::harness::bounds::{run_bound_suite, BoundSuite};
use qkantorovich::harness::catalog::{catalog, lookup};
use qkantorovich::harness::{
    emit_csv, moment_rows, run_convergence_study, run_modulus_table, run_moment_verification,
    run_weighted_convergence, write_csv, ExperimentRow, ModulusKind, MomentGrid, QRule,
    SuiteConfig,
};
use qkantorovich::moduli::Grid;
use qkantorovich::operators::{Construction, StancuParams};
use qkantorovich::Error;

#[derive(Parser)]
#[command(version, about = "Kantorovich-Stancu q-Beta operator experiments")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Tolerance on the neglected tail of the k-sum.
    #[arg(long, global = true, default_value_t = 1e-13)]
    tail_tol: f64,
    /// Tolerance on the tail of q-Jackson series.
    #[arg(long, global = true, default_value_t = 1e-14)]
    series_tol: f64,
    /// Points per modulus grid.
    #[arg(long, global = true, default_value_t = 2001)]
    grid: usize,
    /// Upper end of sweeps over [0, inf).
    #[arg(long, global = true, default_value_t = 10.0)]
    x_max: f64,
    /// Reserved; every computation is deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = ConstructionArg::Normalized)]
    construction: ConstructionArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConstructionArg {
    Normalized,
    AsPrinted,
}

#[derive(Subcommand)]
enum Command {
    /// Compare closed-form raw moments with the operator's series values.
    Moments {
        #[arg(long, value_delimiter = ',', default_value = "5,10,20,50")]
        n_list: Vec<u32>,
        #[arg(long, value_delimiter = ',', default_value = "0.5,0.8,0.9,0.99")]
        q_list: Vec<f64>,
        /// Stancu alpha; with --beta replaces the default pairs (0,0), (0,1), (1,2).
        #[arg(long, requires = "beta")]
        alpha: Option<f64>,
        #[arg(long, requires = "alpha")]
        beta: Option<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0,0.1,0.5,1,2")]
        x_list: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sup-norm error along a sequence of doubling orders.
    Converge {
        #[arg(long, default_value = "e2")]
        f: String,
        #[arg(long, default_value_t = 8)]
        n_start: u32,
        #[arg(long, default_value_t = 128)]
        n_end: u32,
        #[arg(long, value_enum, default_value_t = QRuleArg::Drifting)]
        q_rule: QRuleArg,
        /// q for the fixed rule.
        #[arg(long, default_value_t = 0.9)]
        q: f64,
        /// Right end of the interval [0, b] (plain study).
        #[arg(long, default_value_t = 1.0)]
        b: f64,
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        #[arg(long, default_value_t = 0.0)]
        beta: f64,
        #[arg(long, value_enum, default_value_t = StudyArg::Plain)]
        study: StudyArg,
        /// Extra exponent of the (1+x^2)^(1+a) weight (weighted study).
        #[arg(long, default_value_t = 0.5)]
        exponent: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check error estimates against the operator's actual error.
    Bounds {
        #[arg(long, value_enum)]
        suite: SuiteArg,
        #[arg(long, default_value_t = 20)]
        n: u32,
        #[arg(long, default_value_t = 0.9)]
        q: f64,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 2.0)]
        beta: f64,
        /// Points per x grid.
        #[arg(long, default_value_t = 21)]
        x_points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate a modulus of smoothness at two grid densities.
    Moduli {
        #[arg(long, default_value = "e2")]
        f: String,
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        /// Weight exponent for the weighted modulus.
        #[arg(long, default_value_t = 0.0)]
        gamma: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum QRuleArg {
    Fixed,
    Drifting,
}

#[derive(Clone, Copy, ValueEnum)]
enum StudyArg {
    /// ||Lf - f|| on [0, b].
    Plain,
    /// Weighted norms on [0, x_max].
    Weighted,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Local,
    Finite,
    Weighted,
    Lipschitz,
    Global,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Omega,
    Omega2,
    Weighted,
    Dt1,
    Dt2,
}

/// Failure to run at all, as opposed to a failed check.
enum Failure {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast_ref::<Error>() {
            Some(Error::Domain { .. }) => Failure::Usage(e),
            _ => Failure::Runtime(e),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        anyhow::Error::from(e).into()
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn base_config(common: &Common) -> Result<SuiteConfig, Failure> {
    let grid = Grid::new(common.grid, SuiteConfig::default().grid.h_subdivisions)?;
    Ok(SuiteConfig {
        tail_tol: common.tail_tol,
        series_tol: common.series_tol,
        grid,
        x_max: common.x_max,
        construction: match common.construction {
            ConstructionArg::Normalized => Construction::Normalized,
            ConstructionArg::AsPrinted => Construction::AsPrinted,
        },
        ..SuiteConfig::default()
    })
}

fn doubling(start: u32, end: u32) -> Result<Vec<u32>, Failure> {
    if start == 0 || end < start {
        return Err(Failure::Usage(anyhow::anyhow!(
            "need 1 <= n-start <= n-end"
        )));
    }
    let mut out = Vec::new();
    let mut n = start;
    while n <= end {
        out.push(n);
        n = n.saturating_mul(2);
    }
    Ok(out)
}

fn run(cli: Cli) -> Result<bool, Failure> {
    let base = base_config(&cli.common)?;
    let entries = catalog(base.x_max)?;
    let function = |name: &str| -> Result<_, Failure> {
        lookup(&entries, name).ok_or_else(|| {
            let known: Vec<&str> = entries.iter().map(|e| e.name).collect();
            Failure::Usage(anyhow::anyhow!(
                "unknown function {name:?}; known: {}",
                known.join(", ")
            ))
        })
    };

    let (rows, out) = match cli.command {
        Command::Moments {
            n_list,
            q_list,
            alpha,
            beta,
            x_list,
            out,
        } => {
            let mut grid = MomentGrid {
                n_list,
                q_list,
                x_list,
                ..MomentGrid::standard()
            };
            if let (Some(a), Some(b)) = (alpha, beta) {
                grid.stancu_list = vec![StancuParams::new(a, b)?];
            }
            let reports = run_moment_verification(&grid, &base)?;
            let errata = reports.iter().filter(|r| r.is_erratum()).count();
            if errata > 0 {
                eprintln!("{errata} stated closed-form values disagree with the series (metric suffix [erratum])");
            }
            (moment_rows(&reports), out)
        }
        Command::Converge {
            f,
            n_start,
            n_end,
            q_rule,
            q,
            b,
            alpha,
            beta,
            study,
            exponent,
            out,
        } => {
            let cfg = SuiteConfig {
                stancu: StancuParams::new(alpha, beta)?,
                ..base
            };
            let rule = match q_rule {
                QRuleArg::Fixed => QRule::Fixed(q),
                QRuleArg::Drifting => QRule::Drifting,
            };
            let n_seq = doubling(n_start, n_end)?;
            let entry = function(&f)?;
            let rows = match study {
                StudyArg::Plain => run_convergence_study(&entry.f, &n_seq, rule, b, &cfg)?,
                StudyArg::Weighted => {
                    run_weighted_convergence(&entry.f, &n_seq, rule, exponent, &cfg)?
                }
            };
            (rows, out)
        }
        Command::Bounds {
            suite,
            n,
            q,
            alpha,
            beta,
            x_points,
            out,
        } => {
            if x_points < 2 {
                return Err(Failure::Usage(anyhow::anyhow!("--x-points must be >= 2")));
            }
            let cfg = SuiteConfig {
                n,
                q,
                stancu: StancuParams::new(alpha, beta)?,
                x_points,
                ..base
            };
            let suite = match suite {
                SuiteArg::Local => BoundSuite::Local,
                SuiteArg::Finite => BoundSuite::Finite,
                SuiteArg::Weighted => BoundSuite::Weighted,
                SuiteArg::Lipschitz => BoundSuite::Lipschitz,
                SuiteArg::Global => BoundSuite::Global,
            };
            (run_bound_suite(suite, &cfg)?, out)
        }
        Command::Moduli {
            f,
            kind,
            delta,
            gamma,
            out,
        } => {
            let kind = match kind {
                KindArg::Omega => ModulusKind::Omega,
                KindArg::Omega2 => ModulusKind::Omega2,
                KindArg::Weighted => ModulusKind::Weighted { gamma },
                KindArg::Dt1 => ModulusKind::DitzianTotik1,
                KindArg::Dt2 => ModulusKind::DitzianTotik2,
            };
            (run_modulus_table(function(&f)?, kind, delta, &base)?, out)
        }
    };

    write_rows(&rows, out.as_ref()).map_err(Failure::Runtime)?;
    let failed: Vec<&ExperimentRow> = rows.iter().filter(|r| !r.passed).collect();
    eprintln!("{} rows, {} failed", rows.len(), failed.len());
    for r in failed.iter().take(20) {
        eprintln!(
            "  FAIL {} n={} q={} x=[{}, {}] {}: lhs={:e} rhs={:e}",
            r.experiment_id, r.n, r.q, r.x_lo, r.x_hi, r.metric_name, r.lhs, r.rhs
        );
    }
    Ok(failed.is_empty())
}

fn write_rows(rows: &[ExperimentRow], out: Option<&PathBuf>) -> anyhow::Result<()> {
    match out {
        Some(path) => emit_csv(rows, path).with_context(|| "writing CSV")?,
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write_csv(rows, &mut lock)?;
            lock.flush()?;
        }
    }
    if rows.is_empty() {
        bail!("experiment produced no rows");
    }
    Ok(())
}
