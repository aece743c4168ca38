//! Grid estimators for moduli of smoothness.
//!
//! Every modulus here is a maximum over a finite grid of points `x` and steps
//! `h`, so it is a lower bound of the true supremum that increases towards it
//! as the grids refine. Callers that put a modulus on the larger side of an
//! inequality should re-evaluate at a denser grid before trusting a verdict.

use rayon::prelude::*;

use crate::error::{domain, Result};
use crate::function::TargetFunction;
use crate::qcore::QInterval;

pub const DEFAULT_GRID_POINTS: usize = 2001;
pub const DEFAULT_H_SUBDIVISIONS: usize = 64;

/// Upper end of the default domain `[0, 1 + a]`, `a = 1`, for Ditzian-Totik moduli.
pub const DITZIAN_TOTIK_DOMAIN_UPPER: f64 = 2.0;

/// Resolution of a modulus scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid {
    pub points: usize,
    pub h_subdivisions: usize,
}

impl Grid {
    pub fn new(points: usize, h_subdivisions: usize) -> Result<Self> {
        if points < 3 || h_subdivisions == 0 {
            return Err(domain(
                "Grid::new",
                format!("need points >= 3 and h_subdivisions >= 1, got {points}, {h_subdivisions}"),
            ));
        }
        Ok(Self {
            points,
            h_subdivisions,
        })
    }

    /// The same grid with `factor` times as many points and steps.
    pub fn densified(&self, factor: usize) -> Self {
        let factor = factor.max(1);
        Self {
            points: (self.points - 1) * factor + 1,
            h_subdivisions: self.h_subdivisions * factor,
        }
    }
}

impl Default for Grid {
    fn default() -> Self {
        Self {
            points: DEFAULT_GRID_POINTS,
            h_subdivisions: DEFAULT_H_SUBDIVISIONS,
        }
    }
}

/// A function, a step bound `delta` and the domain and grid to scan.
#[derive(Debug, Clone)]
pub struct ModulusQuery {
    f: TargetFunction,
    delta: f64,
    domain: QInterval,
    grid: Grid,
}

impl ModulusQuery {
    pub fn new(f: TargetFunction, delta: f64, domain: QInterval) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(domain_error("delta must be positive", delta));
        }
        if domain.width() <= 0.0 {
            return Err(domain_error(
                "domain must have positive width",
                domain.width(),
            ));
        }
        Ok(Self {
            f,
            delta,
            domain,
            grid: Grid::default(),
        })
    }

    pub fn with_grid(mut self, grid: Grid) -> Self {
        self.grid = grid;
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(domain_error("delta must be positive", delta));
        }
        self.delta = delta;
        Ok(self)
    }

    pub fn f(&self) -> &TargetFunction {
        &self.f
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn domain(&self) -> QInterval {
        self.domain
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }
}

fn domain_error(reason: &str, value: f64) -> crate::Error {
    domain("ModulusQuery::new", format!("{reason}, got {value}"))
}

/// Step weight of a Ditzian-Totik modulus.
#[derive(Debug, Clone, Copy)]
pub enum StepWeight {
    /// `1`; the Ditzian-Totik moduli reduce to the ordinary ones.
    Unit,
    /// `sqrt(x (1 + x))`.
    SqrtXOnePlusX,
    /// `sqrt(x (1 - x))`, zero outside `[0, 1]`.
    SqrtXOneMinusX,
    /// Any nonnegative weight.
    Custom(fn(f64) -> f64),
}

impl StepWeight {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            StepWeight::Unit => 1.0,
            StepWeight::SqrtXOnePlusX => (x * (1.0 + x)).max(0.0).sqrt(),
            StepWeight::SqrtXOneMinusX => (x * (1.0 - x)).max(0.0).sqrt(),
            StepWeight::Custom(w) => w(x),
        }
    }
}

/// Maximum of `term(x, h)` over `points` equispaced `x` in `[lo, hi]` and the
/// steps `h_max * j / h_subdivisions`, `j = 1..=h_subdivisions`.
fn grid_max<T>(lo: f64, hi: f64, grid: Grid, h_max: f64, term: T) -> f64
where
    T: Fn(f64, f64) -> Option<f64> + Sync,
{
    let last = (grid.points - 1) as f64;
    (0..grid.points)
        .into_par_iter()
        .map(|i| {
            let x = lo + (hi - lo) * i as f64 / last;
            (1..=grid.h_subdivisions)
                .filter_map(|j| term(x, h_max * j as f64 / grid.h_subdivisions as f64))
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

/// Modulus of continuity `sup |f(x+h) - f(x)|` over `0 < h <= delta`, `x, x+h` in the domain.
///
/// ```
/// use qkantorovich::function::TargetFunction;
/// use qkantorovich::moduli::{modulus_omega, ModulusQuery};
/// use qkantorovich::qcore::QInterval;
///
/// let qry = ModulusQuery::new(TargetFunction::monomial(1), 0.1, QInterval::new(0.0, 1.0)?)?;
/// assert!((modulus_omega(&qry) - 0.1).abs() < 1e-12);
/// # Ok::<(), qkantorovich::Error>(())
/// ```
pub fn modulus_omega(qry: &ModulusQuery) -> f64 {
    let (a, b) = (qry.domain.lower(), qry.domain.upper());
    let f = &qry.f;
    grid_max(a, b, qry.grid, qry.delta, |x, h| {
        (x + h <= b).then(|| (f.eval(x + h) - f.eval(x)).abs())
    })
}

/// Second-order modulus `sup |f(x+2h) - 2f(x+h) + f(x)|` over `0 < h <= delta`.
pub fn modulus_omega2(qry: &ModulusQuery) -> f64 {
    let (a, b) = (qry.domain.lower(), qry.domain.upper());
    let f = &qry.f;
    grid_max(a, b, qry.grid, qry.delta, |x, h| {
        (x + 2.0 * h <= b).then(|| (f.eval(x + 2.0 * h) - 2.0 * f.eval(x + h) + f.eval(x)).abs())
    })
}

/// Weighted modulus `sup |f(x+h) - f(x)| / (1 + (x+h)^{2+gamma})` over
/// `x in [0, x_max]`, `0 < h <= delta`.
pub fn modulus_weighted(
    f: &TargetFunction,
    delta: f64,
    gamma: f64,
    x_max: f64,
    grid: Grid,
) -> Result<f64> {
    const OP: &str = "modulus_weighted";
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(domain(OP, format!("delta = {delta} must be positive")));
    }
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(domain(OP, format!("gamma = {gamma} must be >= 0")));
    }
    if !(x_max > 0.0 && x_max.is_finite()) {
        return Err(domain(OP, format!("x_max = {x_max} must be positive")));
    }
    Ok(grid_max(0.0, x_max, grid, delta, |x, h| {
        let y = x + h;
        Some((f.eval(y) - f.eval(x)).abs() / (1.0 + y.powf(2.0 + gamma)))
    }))
}

/// First-order Ditzian-Totik modulus `sup |f(x + h psi(x)) - f(x)|` over
/// `0 < h <= sqrt(delta)` with `x + h psi(x)` in the domain.
pub fn modulus_ditzian_totik_1(qry: &ModulusQuery, psi: StepWeight) -> f64 {
    let (a, b) = (qry.domain.lower(), qry.domain.upper());
    let f = &qry.f;
    grid_max(a, b, qry.grid, qry.delta.sqrt(), |x, h| {
        let y = x + h * psi.eval(x);
        (y <= b).then(|| (f.eval(y) - f.eval(x)).abs())
    })
}

/// Second-order Ditzian-Totik modulus
/// `sup |f(x + h phi(x)) - 2f(x) + f(x - h phi(x))|` over `0 < h <= sqrt(delta)`
/// with both `x +- h phi(x)` in the domain.
pub fn modulus_ditzian_totik_2(qry: &ModulusQuery, phi: StepWeight) -> f64 {
    let (a, b) = (qry.domain.lower(), qry.domain.upper());
    let f = &qry.f;
    grid_max(a, b, qry.grid, qry.delta.sqrt(), |x, h| {
        let step = h * phi.eval(x);
        (x - step >= a && x + step <= b)
            .then(|| (f.eval(x + step) - 2.0 * f.eval(x) + f.eval(x - step)).abs())
    })
}

/// The interval `[0, 1 + a]` with `a = 1`.
pub fn ditzian_totik_domain() -> QInterval {
    QInterval::new(0.0, DITZIAN_TOTIK_DOMAIN_UPPER).expect("static interval is valid")
}
