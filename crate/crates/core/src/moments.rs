//! Raw and central moments of the Kantorovich-Stancu operator, in three forms:
//!
//! * the stated closed forms ([`kantorovich_moment_closed`],
//!   [`stancu_moment_closed`], [`central_moment_closed`]), transcribed as
//!   commonly quoted for these operators;
//! * closed forms derived for [`Construction::Normalized`](crate::operators::Construction)
//!   ([`kantorovich_moment_derived`], [`stancu_moment_derived`],
//!   [`central_moment_derived`]);
//! * the numeric series value from [`crate::operators`].
//!
//! The two closed forms agree for `m <= 1`. For `m = 2` the stated `x^2`
//! coefficient `q^{n-2}[n+2]_q/[n+1]_q` differs from the derived
//! `1 + 1/(q[n+1]_q)`; [`MomentReport`] keeps both and flags the mismatch
//! instead of reconciling it.

use crate::error::{domain, Result};
use crate::function::TargetFunction;
use crate::operators::{kantorovich_stancu_apply, OperatorSpec};
use crate::qcore::q_integer;

/// Tolerance used by [`moment_report`] when none is given.
pub const DEFAULT_MOMENT_TOL: f64 = 1e-9;

/// Bracket values shared by all moment formulas.
#[derive(Debug, Clone, Copy)]
struct Brackets {
    q: f64,
    n: f64,
    n1: f64,
    n2: f64,
    two: f64,
    three: f64,
    alpha: f64,
    beta: f64,
    qn1: f64,
    qn2: f64,
}

impl Brackets {
    fn of(spec: &OperatorSpec) -> Self {
        let ctx = spec.ctx();
        let n = spec.n();
        let q = ctx.q();
        Self {
            q,
            n: q_integer(n, ctx),
            n1: q_integer(n + 1, ctx),
            n2: q_integer(n + 2, ctx),
            two: q_integer(2, ctx),
            three: q_integer(3, ctx),
            alpha: spec.stancu().alpha(),
            beta: spec.stancu().beta(),
            qn1: ctx.pow(n as i32 - 1),
            qn2: ctx.pow(n as i32 - 2),
        }
    }

    /// `[n]_q / ([n]_q + beta)`
    fn scale(&self) -> f64 {
        self.n / (self.n + self.beta)
    }

    /// `q[n]_q + alpha [2]_q [n+1]_q) / ([2]_q ([n]_q + beta) [n+1]_q)`
    fn first_constant(&self) -> f64 {
        (self.q * self.n + self.alpha * self.two * self.n1)
            / (self.two * (self.n + self.beta) * self.n1)
    }
}

fn check_order(op: &'static str, m: u32, max: u32) -> Result<()> {
    if m > max {
        return Err(domain(op, format!("moment order {m} exceeds {max}")));
    }
    Ok(())
}

fn check_x(op: &'static str, x: f64) -> Result<()> {
    if x >= 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(domain(op, format!("x = {x} must be finite and >= 0")))
    }
}

/// Stated closed form of `V*_n(e_m; q; x)`, `m <= 2`.
///
/// ```
/// use qkantorovich::moments::kantorovich_moment_closed;
/// use qkantorovich::operators::OperatorSpec;
/// use qkantorovich::qcore::{q_integer, QContext};
///
/// let ctx = QContext::new(0.8)?;
/// let spec = OperatorSpec::new(10, ctx)?;
/// let c = kantorovich_moment_closed(1, &spec, 0.0)?;
/// assert!((c - 0.8 / (q_integer(2, &ctx) * q_integer(11, &ctx))).abs() < 1e-15);
/// # Ok::<(), qkantorovich::Error>(())
/// ```
pub fn kantorovich_moment_closed(m: u32, spec: &OperatorSpec, x: f64) -> Result<f64> {
    const OP: &str = "kantorovich_moment_closed";
    check_order(OP, m, 2)?;
    check_x(OP, x)?;
    let b = Brackets::of(spec);
    Ok(match m {
        0 => 1.0,
        1 => x + b.q / (b.two * b.n1),
        _ => {
            let (c2, c1, c0) = stated_second_coefficients(&b);
            (c2 * x + c1) * x + c0
        }
    })
}

/// `x^2`, `x` and constant coefficients of the stated `V*_n(e_2)`.
fn stated_second_coefficients(b: &Brackets) -> (f64, f64, f64) {
    (
        b.qn2 * b.n2 / b.n1,
        b.qn1 / b.n1 + (2.0 * b.q + 1.0) / (b.n1 * b.three),
        b.q / (b.n1 * b.n1 * b.three),
    )
}

/// Stated closed form of `L^{(alpha, beta)}_n(e_m; q; x)`, `m <= 2`.
pub fn stancu_moment_closed(m: u32, spec: &OperatorSpec, x: f64) -> Result<f64> {
    const OP: &str = "stancu_moment_closed";
    check_order(OP, m, 2)?;
    check_x(OP, x)?;
    let b = Brackets::of(spec);
    let d2 = (b.n + b.beta).powi(2);
    Ok(match m {
        0 => 1.0,
        1 => b.scale() * x + b.first_constant(),
        _ => {
            let (c2, c1, c0) = stated_second_coefficients(&b);
            let s2 = b.n * b.n / d2;
            let x2 = s2 * c2;
            let x1 = s2 * c1 + 2.0 * b.n * b.alpha / d2;
            let x0 =
                s2 * c0 + 2.0 * b.q * b.n * b.alpha / (b.two * b.n1 * d2) + b.alpha * b.alpha / d2;
            (x2 * x + x1) * x + x0
        }
    })
}

/// Stated closed form of the central moment `L((t - x)^m; q; x)`, `m <= 2`.
pub fn central_moment_closed(m: u32, spec: &OperatorSpec, x: f64) -> Result<f64> {
    const OP: &str = "central_moment_closed";
    check_order(OP, m, 2)?;
    check_x(OP, x)?;
    let b = Brackets::of(spec);
    let d2 = (b.n + b.beta).powi(2);
    Ok(match m {
        0 => 1.0,
        1 => (b.scale() - 1.0) * x + b.first_constant(),
        _ => {
            let (c2, c1, c0) = stated_second_coefficients(&b);
            let s2 = b.n * b.n / d2;
            let x2 = s2 * c2 + 1.0 - 2.0 * b.scale();
            let x1 = s2 * c1 + 2.0 * b.n * b.alpha / d2 - 2.0 * b.first_constant();
            let x0 =
                s2 * c0 + 2.0 * b.q * b.n * b.alpha / (b.two * b.n1 * d2) + b.alpha * b.alpha / d2;
            (x2 * x + x1) * x + x0
        }
    })
}

/// `V*_n(e_m; q; x)` for the normalized construction, `m <= 2`.
///
/// `V*_n(e_2) = (1 + 1/(q[n+1])) x^2 + x/[n+1] + (2+q) q x/([3][n+1]) + q^2/([3][n+1]^2)`.
pub fn kantorovich_moment_derived(m: u32, spec: &OperatorSpec, x: f64) -> Result<f64> {
    const OP: &str = "kantorovich_moment_derived";
    check_order(OP, m, 2)?;
    check_x(OP, x)?;
    let b = Brackets::of(spec);
    Ok(kantorovich_derived(m, &b, x))
}

fn kantorovich_derived(m: u32, b: &Brackets, x: f64) -> f64 {
    match m {
        0 => 1.0,
        1 => x + b.q / (b.two * b.n1),
        _ => {
            let x2 = 1.0 + 1.0 / (b.q * b.n1);
            let x1 = (1.0 + (2.0 + b.q) * b.q / b.three) / b.n1;
            let x0 = b.q * b.q / (b.three * b.n1 * b.n1);
            (x2 * x + x1) * x + x0
        }
    }
}

/// Variance of the Kantorovich cell measure at `x`, written without cancellation.
fn kantorovich_variance(b: &Brackets, x: f64) -> f64 {
    let x2 = 1.0 / (b.q * b.n1);
    let x1 = (1.0 + (2.0 + b.q) * b.q / b.three - 2.0 * b.q / b.two) / b.n1;
    let x0 = b.q * b.q / (b.n1 * b.n1) * (1.0 / b.three - 1.0 / (b.two * b.two));
    (x2 * x + x1) * x + x0
}

/// `L^{(alpha, beta)}_n(e_m; q; x)` for the normalized construction, `m <= 2`.
///
/// The operator is the expectation of `shift(T)^m` under the Kantorovich
/// measure, so the moments follow from those of `V*_n` by expanding the shift.
pub fn stancu_moment_derived(m: u32, spec: &OperatorSpec, x: f64) -> Result<f64> {
    const OP: &str = "stancu_moment_derived";
    check_order(OP, m, 2)?;
    check_x(OP, x)?;
    let b = Brackets::of(spec);
    let d = b.n + b.beta;
    Ok(match m {
        0 => 1.0,
        1 => (b.n * kantorovich_derived(1, &b, x) + b.alpha) / d,
        _ => {
            let v1 = kantorovich_derived(1, &b, x);
            let v2 = kantorovich_derived(2, &b, x);
            (b.n * b.n * v2 + 2.0 * b.alpha * b.n * v1 + b.alpha * b.alpha) / (d * d)
        }
    })
}

/// Central moment `L((t - x)^m; q; x)` for the normalized construction, `m <= 2`.
///
/// The second moment is `scale^2 * Var + (eta - x)^2`, which stays accurate
/// where `M_2 - 2x M_1 + x^2` would cancel.
pub fn central_moment_derived(m: u32, spec: &OperatorSpec, x: f64) -> Result<f64> {
    const OP: &str = "central_moment_derived";
    check_order(OP, m, 2)?;
    check_x(OP, x)?;
    let b = Brackets::of(spec);
    let bias = -b.beta / (b.n + b.beta) * x + b.first_constant();
    Ok(match m {
        0 => 1.0,
        1 => bias,
        _ => b.scale().powi(2) * kantorovich_variance(&b, x) + bias * bias,
    })
}

/// Upper bound `[n+1]_q/([n]_q + beta)^2 * (phi^2(x) + q/([3]_q [n+1]_q))`
/// quoted for the second central moment when `0 <= alpha <= beta`.
///
/// The bound does not hold everywhere: at `x = 0` with `alpha > 0` the squared
/// bias `(alpha/([n]_q + beta))^2` alone exceeds it.
pub fn second_moment_bound(spec: &OperatorSpec, x: f64) -> Result<f64> {
    check_x("second_moment_bound", x)?;
    let b = Brackets::of(spec);
    let phi_sq = x * (1.0 + x);
    Ok(b.n1 / (b.n + b.beta).powi(2) * (phi_sq + b.q / (b.three * b.n1)))
}

/// Auxiliary quantities used by the error estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxQuantities {
    /// First-moment image `eta(x, q) = L(e_1; q; x)`.
    pub eta: f64,
    /// `phi^2(x) = x(1 + x)`.
    pub phi_sq: f64,
    /// `delta_n^2(x) = phi^2(x) + q/([3]_q [n+1]_q)`.
    pub delta_n_sq: f64,
    /// [`second_moment_bound`] at `x`.
    pub second_moment_bound: f64,
}

pub fn aux_quantities(spec: &OperatorSpec, x: f64) -> Result<AuxQuantities> {
    check_x("aux_quantities", x)?;
    let b = Brackets::of(spec);
    let phi_sq = x * (1.0 + x);
    Ok(AuxQuantities {
        eta: b.scale() * x + b.first_constant(),
        phi_sq,
        delta_n_sq: phi_sq + b.q / (b.three * b.n1),
        second_moment_bound: second_moment_bound(spec, x)?,
    })
}

/// Series value of `L(e_m; q; x)` from the operator itself.
pub fn numeric_moment(m: u32, spec: &OperatorSpec, x: f64) -> Result<f64> {
    kantorovich_stancu_apply(&TargetFunction::monomial(m as usize), spec, x)
}

/// Series value of `L((t - x)^m; q; x)` from the operator itself.
pub fn numeric_central_moment(m: u32, spec: &OperatorSpec, x: f64) -> Result<f64> {
    let mut coeffs = vec![0.0; m as usize + 1];
    // Binomial expansion of (t - x)^m.
    let mut c = 1.0;
    for (j, slot) in coeffs.iter_mut().enumerate().rev() {
        *slot = c;
        let jf = j as f64;
        c *= -x * jf / (f64::from(m) - jf + 1.0);
    }
    let f = TargetFunction::polynomial(&format!("(t-{x})^{m}"), &coeffs);
    kantorovich_stancu_apply(&f, spec, x)
}

/// Whether a report concerns a raw moment `L(e_m)` or a central moment `L((t-x)^m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentKind {
    Raw,
    Central,
}

/// Stated closed form, derived closed form and series value of one moment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentReport {
    pub spec: OperatorSpec,
    pub x: f64,
    pub kind: MomentKind,
    pub order: u32,
    /// Stated closed form.
    pub closed_form: f64,
    /// Closed form derived for the normalized construction.
    pub derived: f64,
    /// Series value from the operator.
    pub numeric: f64,
    /// `|derived - numeric|`.
    pub abs_diff: f64,
    /// `abs_diff / max(1, |numeric|)`.
    pub rel_diff: f64,
    /// `|closed_form - numeric| / max(1, |numeric|)`.
    pub closed_form_rel_diff: f64,
    pub tolerance: f64,
}

impl MomentReport {
    /// The series value matches the derived closed form within tolerance.
    pub fn passed(&self) -> bool {
        self.rel_diff <= self.tolerance
    }

    /// The stated closed form disagrees with the series value.
    pub fn is_erratum(&self) -> bool {
        self.closed_form_rel_diff > self.tolerance
    }
}

/// Compares closed forms against the series value of one moment.
///
/// ```
/// use qkantorovich::moments::{moment_report, MomentKind};
/// use qkantorovich::operators::{OperatorSpec, StancuParams};
/// use qkantorovich::qcore::QContext;
///
/// let spec = OperatorSpec::new(10, QContext::new(0.9)?)?
///     .with_stancu(StancuParams::new(1.0, 2.0)?);
/// let first = moment_report(MomentKind::Raw, 1, &spec, 0.5, 1e-9)?;
/// assert!(first.passed() && !first.is_erratum());
/// let second = moment_report(MomentKind::Raw, 2, &spec, 0.5, 1e-9)?;
/// assert!(second.passed() && second.is_erratum());
/// # Ok::<(), qkantorovich::Error>(())
/// ```
pub fn moment_report(
    kind: MomentKind,
    order: u32,
    spec: &OperatorSpec,
    x: f64,
    tolerance: f64,
) -> Result<MomentReport> {
    let (closed_form, derived, numeric) = match kind {
        MomentKind::Raw => (
            stancu_moment_closed(order, spec, x)?,
            stancu_moment_derived(order, spec, x)?,
            numeric_moment(order, spec, x)?,
        ),
        MomentKind::Central => (
            central_moment_closed(order, spec, x)?,
            central_moment_derived(order, spec, x)?,
            numeric_central_moment(order, spec, x)?,
        ),
    };
    let scale = numeric.abs().max(1.0);
    let abs_diff = (derived - numeric).abs();
    Ok(MomentReport {
        spec: *spec,
        x,
        kind,
        order,
        closed_form,
        derived,
        numeric,
        abs_diff,
        rel_diff: abs_diff / scale,
        closed_form_rel_diff: (closed_form - numeric).abs() / scale,
        tolerance,
    })
}
