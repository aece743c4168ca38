//! The discrete q-Beta operator `V_n`, its Kantorovich modification `V*_n`
//! and the Kantorovich-Stancu operator `L^{(alpha, beta)}_n`.
//!
//! All three are infinite sums over the basis weights
//!
//! ```text
//! p_{n,k}(q; x) = q^{k(k-1)/2} / B_q(k+1, n) * x^k / (1+x)_q^{n+k+1}
//! ```
//!
//! evaluated by a forward recurrence in log space. The sum over `k` stops once
//! a geometric majorant of the neglected terms, weighted by the growth
//! envelope of `f`, drops below `k_tail_tol`.
//!
//! # Cells
//!
//! With the discrete nodes `xi_k = [k]_q / ([n+1]_q q^{k-1})` the default
//! [`Construction::Normalized`] operator averages `f` over the cells
//! `[q xi_k, q xi_{k+1}]`, which tile `[0, inf)`:
//!
//! ```text
//! V*_n(f; x) = [n+1]_q/[n]_q * sum_k p_{n,k}(q; x) q^{k-1} int_{q xi_k}^{q xi_{k+1}} f(t) d_q t
//! ```
//!
//! This form reproduces `V*_n(1) = 1` and `V*_n(t) = x + q/([2]_q [n+1]_q)`.
//! The literal cell weights `q^{-(2k-1)}` over `[[k]_q/[n+1]_q, [k+1]_q/[n+1]_q]`
//! are kept as [`Construction::AsPrinted`]; that operator is not normalized
//! (`V*_n(1; x) = q + (1 - q^{n+1}) x`) and is only useful for comparison.

use crate::error::{domain, Result};
use crate::function::TargetFunction;
use crate::qcore::{
    log_q_beta_int, log_q_pochhammer, q_integer, q_jackson_integral, q_number, CompensatedSum,
    QContext,
};

/// Default absolute tolerance on the neglected weighted tail of the `k`-sum.
pub const DEFAULT_K_TAIL_TOL: f64 = 1e-13;
/// Default cap on the number of `k` terms.
pub const DEFAULT_K_MAX: usize = 200_000;

/// Relative slack when checking that the observed term ratios are non-increasing.
const RATIO_SLACK: f64 = 1e-12;

/// Stancu shift parameters, `0 <= alpha <= beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StancuParams {
    alpha: f64,
    beta: f64,
}

impl StancuParams {
    /// The identity shift `alpha = beta = 0`.
    pub const IDENTITY: StancuParams = StancuParams {
        alpha: 0.0,
        beta: 0.0,
    };

    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha >= 0.0 && beta >= alpha && beta.is_finite()) {
            return Err(domain(
                "StancuParams::new",
                format!("need 0 <= alpha <= beta, got alpha = {alpha}, beta = {beta}"),
            ));
        }
        Ok(Self { alpha, beta })
    }

    #[inline]
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    #[inline]
    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn is_identity(&self) -> bool {
        self.alpha == 0.0 && self.beta == 0.0
    }
}

impl Default for StancuParams {
    fn default() -> Self {
        Self::IDENTITY
    }
}

/// Which cell layout and weights the Kantorovich-type operators use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Construction {
    /// Cells `[q xi_k, q xi_{k+1}]`, weights `q^{k-1}`, prefactor `[n+1]_q/[n]_q`.
    #[default]
    Normalized,
    /// Cells `[[k]_q, [k+1]_q]/[n+1]_q`, weights `q^{-(2k-1)}`, prefactor
    /// `[n+beta+1]_q/[n+beta]_q` (real-argument brackets).
    AsPrinted,
}

/// Everything that identifies one operator `L^{(alpha, beta)}_{n,q}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorSpec {
    n: u32,
    ctx: QContext,
    stancu: StancuParams,
    k_tail_tol: f64,
    k_max: usize,
    construction: Construction,
}

impl OperatorSpec {
    pub fn new(n: u32, ctx: QContext) -> Result<Self> {
        if n == 0 {
            return Err(domain("OperatorSpec::new", "operator order n must be >= 1"));
        }
        Ok(Self {
            n,
            ctx,
            stancu: StancuParams::IDENTITY,
            k_tail_tol: DEFAULT_K_TAIL_TOL,
            k_max: DEFAULT_K_MAX,
            construction: Construction::Normalized,
        })
    }

    pub fn with_stancu(mut self, stancu: StancuParams) -> Self {
        self.stancu = stancu;
        self
    }

    pub fn with_k_tail_tol(mut self, tol: f64) -> Result<Self> {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(domain(
                "OperatorSpec::with_k_tail_tol",
                "tolerance must be positive",
            ));
        }
        self.k_tail_tol = tol;
        Ok(self)
    }

    pub fn with_k_max(mut self, k_max: usize) -> Result<Self> {
        if k_max == 0 {
            return Err(domain("OperatorSpec::with_k_max", "k_max must be >= 1"));
        }
        self.k_max = k_max;
        Ok(self)
    }

    pub fn with_construction(mut self, construction: Construction) -> Self {
        self.construction = construction;
        self
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn ctx(&self) -> &QContext {
        &self.ctx
    }

    #[inline]
    pub fn q(&self) -> f64 {
        self.ctx.q()
    }

    #[inline]
    pub fn stancu(&self) -> StancuParams {
        self.stancu
    }

    #[inline]
    pub fn k_tail_tol(&self) -> f64 {
        self.k_tail_tol
    }

    #[inline]
    pub fn k_max(&self) -> usize {
        self.k_max
    }

    #[inline]
    pub fn construction(&self) -> Construction {
        self.construction
    }

    /// `[m]_q` in this operator's context.
    #[inline]
    pub fn bracket(&self, m: u32) -> f64 {
        q_integer(m, &self.ctx)
    }
}

/// Log of the basis weight `p_{n,k}(q; x)`; `-inf` when `x = 0` and `k >= 1`.
pub fn log_basis_weight(n: u32, k: u32, x: f64, ctx: &QContext) -> Result<f64> {
    check_point("basis_weight", x)?;
    if n == 0 {
        return Err(domain("basis_weight", "n must be >= 1"));
    }
    if x == 0.0 {
        return Ok(if k == 0 {
            q_integer(n, ctx).ln()
        } else {
            f64::NEG_INFINITY
        });
    }
    let kf = f64::from(k);
    let q_power = 0.5 * kf * (kf - 1.0) * ctx.q().ln();
    Ok(
        q_power - log_q_beta_int(k + 1, n, ctx)? + kf * x.ln()
            - log_q_pochhammer(x, n + k + 1, ctx),
    )
}

/// The basis weight `p_{n,k}(q; x)`, evaluated in log space.
///
/// ```
/// use qkantorovich::operators::basis_weight;
/// use qkantorovich::qcore::{q_integer, QContext};
///
/// let ctx = QContext::new(0.9)?;
/// // At x = 0 only k = 0 survives, with weight 1/B_q(1, n) = [n]_q.
/// assert!((basis_weight(5, 0, 0.0, &ctx)? - q_integer(5, &ctx)).abs() < 1e-14);
/// assert_eq!(basis_weight(5, 3, 0.0, &ctx)?, 0.0);
/// # Ok::<(), qkantorovich::Error>(())
/// ```
pub fn basis_weight(n: u32, k: u32, x: f64, ctx: &QContext) -> Result<f64> {
    Ok(log_basis_weight(n, k, x, ctx)?.exp())
}

/// `p_{n,k+1} / p_{n,k} = q^k [n+k+1]_q x / ([k+1]_q (1 + q^{n+k+1} x))`.
pub fn basis_weight_ratio(n: u32, k: u32, x: f64, ctx: &QContext) -> Result<f64> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(domain("basis_weight_ratio", format!("x = {x} must be > 0")));
    }
    Ok(log_ratio(n, k, x, ctx).exp())
}

fn log_ratio(n: u32, k: u32, x: f64, ctx: &QContext) -> f64 {
    let ln_q = ctx.q().ln();
    f64::from(k) * ln_q + q_integer(n + k + 1, ctx).ln() + x.ln()
        - q_integer(k + 1, ctx).ln()
        - (ctx.pow((n + k + 1) as i32) * x).ln_1p()
}

/// The discrete node `[k]_q / ([n+1]_q q^{k-1})`.
pub fn discrete_node(n: u32, k: u32, ctx: &QContext) -> f64 {
    q_integer(k, ctx) / (q_integer(n + 1, ctx) * ctx.pow(k as i32 - 1))
}

/// The Stancu shift `([n]_q t + alpha) / ([n]_q + beta)`.
pub fn stancu_shift(t: f64, n: u32, stancu: StancuParams, ctx: &QContext) -> f64 {
    let nq = q_integer(n, ctx);
    (nq * t + stancu.alpha) / (nq + stancu.beta)
}

/// The discrete q-Beta operator `V_n(f; q; x)`.
///
/// ```
/// use qkantorovich::function::TargetFunction;
/// use qkantorovich::operators::{discrete_beta_apply, OperatorSpec};
/// use qkantorovich::qcore::QContext;
///
/// let spec = OperatorSpec::new(5, QContext::new(0.9)?)?;
/// let v = discrete_beta_apply(&TargetFunction::monomial(1), &spec, 0.5)?;
/// assert!((v - 0.5).abs() < 1e-12);
/// # Ok::<(), qkantorovich::Error>(())
/// ```
pub fn discrete_beta_apply(f: &TargetFunction, spec: &OperatorSpec, x: f64) -> Result<f64> {
    const OP: &str = "discrete_beta_apply";
    spec.ctx.require_deformed(OP)?;
    check_point(OP, x)?;
    let ctx = spec.ctx;
    let n = spec.n;
    let log_nq = -spec.bracket(n).ln();
    sum_over_k(
        spec,
        x,
        OP,
        |_| log_nq,
        |k| {
            let node = discrete_node(n, k, &ctx);
            let value = f.eval(node);
            f.check_growth(node, value)?;
            Ok((value, f.growth().envelope(node)))
        },
    )
}

/// The Kantorovich-type operator `V*_n(f; q; x)`.
pub fn kantorovich_apply(f: &TargetFunction, spec: &OperatorSpec, x: f64) -> Result<f64> {
    kantorovich_family(f, spec, x, None, "kantorovich_apply")
}

/// The Kantorovich-Stancu operator `L^{(alpha, beta)}_n(f; q; x)`.
///
/// ```
/// use qkantorovich::function::TargetFunction;
/// use qkantorovich::operators::{kantorovich_stancu_apply, OperatorSpec, StancuParams};
/// use qkantorovich::qcore::{q_integer, QContext};
///
/// let ctx = QContext::new(0.9)?;
/// let spec = OperatorSpec::new(10, ctx)?.with_stancu(StancuParams::new(1.0, 2.0)?);
/// let x = 0.5;
/// let l1 = kantorovich_stancu_apply(&TargetFunction::monomial(1), &spec, x)?;
///
/// let (n, n1, two) = (q_integer(10, &ctx), q_integer(11, &ctx), q_integer(2, &ctx));
/// let expected = n * x / (n + 2.0) + (0.9 * n + 1.0 * two * n1) / (two * (n + 2.0) * n1);
/// assert!((l1 - expected).abs() < 1e-12);
/// # Ok::<(), qkantorovich::Error>(())
/// ```
pub fn kantorovich_stancu_apply(f: &TargetFunction, spec: &OperatorSpec, x: f64) -> Result<f64> {
    kantorovich_family(f, spec, x, Some(spec.stancu), "kantorovich_stancu_apply")
}

fn kantorovich_family(
    f: &TargetFunction,
    spec: &OperatorSpec,
    x: f64,
    stancu: Option<StancuParams>,
    op: &'static str,
) -> Result<f64> {
    spec.ctx.require_deformed(op)?;
    check_point(op, x)?;
    let ctx = spec.ctx;
    let n = spec.n;
    let nq = spec.bracket(n);
    let n1q = spec.bracket(n + 1);

    // Affine map applied to the integration variable before f.
    let (scale, offset) = match stancu {
        Some(s) => (nq / (nq + s.beta), s.alpha / (nq + s.beta)),
        None => (1.0, 0.0),
    };
    let shift = move |t: f64| scale * t + offset;

    let beta = stancu.map_or(0.0, |s| s.beta);
    let cells = CellLayout::new(spec.construction, n, nq, n1q, beta, &ctx);
    let log_mass = |k: u32| cells.log_base_mass + cells.log_extra(k);

    match f.coefficients() {
        Some(coeffs) => {
            let shifted = compose_affine(coeffs, scale, offset);
            sum_over_k(spec, x, op, log_mass, |k| {
                let (a, b) = cells.cell(k);
                let avg = polynomial_cell_average(&shifted, a, b, &ctx);
                let end = shift(b);
                Ok((avg, f.growth().envelope(end)))
            })
        }
        None => {
            let g = |t: f64| f.eval(shift(t));
            // Cells are contiguous, so the lower Jackson integral of cell k is
            // the upper one of cell k - 1.
            let mut carried: Option<(f64, f64)> = None;
            sum_over_k(spec, x, op, log_mass, |k| {
                let (a, b) = cells.cell(k);
                let lower = match carried {
                    Some((end, value)) if end == a => value,
                    _ => q_jackson_integral(g, a, &ctx)?,
                };
                let upper = q_jackson_integral(g, b, &ctx)?;
                carried = Some((b, upper));
                let end = shift(b);
                f.check_growth(end, f.eval(end))?;
                Ok(((upper - lower) / (b - a), f.growth().envelope(end)))
            })
        }
    }
}

/// Cell endpoints and the `k`-independent part of each cell's mass.
///
/// The contribution of cell `k` is `mass_k * average_k(f)`, where
/// `mass_k = exp(log_base_mass + log p_{n,k} + extra_k)`.
struct CellLayout {
    construction: Construction,
    n1q: f64,
    q: f64,
    ctx: QContext,
    log_base_mass: f64,
}

impl CellLayout {
    fn new(
        construction: Construction,
        n: u32,
        nq: f64,
        n1q: f64,
        beta: f64,
        ctx: &QContext,
    ) -> Self {
        let log_base_mass = match construction {
            // [n+1]/[n] * q^{k-1} * |cell| with |cell| = 1/([n+1] q^{k-1}).
            Construction::Normalized => -nq.ln(),
            // P * q^{1-2k} * |cell| with |cell| = q^k/[n+1]; the q^{1-k} part is per-k.
            Construction::AsPrinted => {
                let nb = f64::from(n) + beta;
                let prefactor = q_number(nb + 1.0, ctx) / q_number(nb, ctx);
                prefactor.ln() - n1q.ln()
            }
        };
        Self {
            construction,
            n1q,
            q: ctx.q(),
            ctx: *ctx,
            log_base_mass,
        }
    }

    fn cell(&self, k: u32) -> (f64, f64) {
        match self.construction {
            Construction::Normalized => {
                // [q xi_k, q xi_{k+1}] = [[k] q^{2-k}, [k+1] q^{1-k}] / [n+1]
                let scale = self.ctx.pow(1 - k as i32) / self.n1q;
                (
                    q_integer(k, &self.ctx) * self.q * scale,
                    q_integer(k + 1, &self.ctx) * scale,
                )
            }
            Construction::AsPrinted => (
                q_integer(k, &self.ctx) / self.n1q,
                q_integer(k + 1, &self.ctx) / self.n1q,
            ),
        }
    }

    fn log_extra(&self, k: u32) -> f64 {
        match self.construction {
            Construction::Normalized => 0.0,
            Construction::AsPrinted => (1.0 - f64::from(k)) * self.q.ln(),
        }
    }
}

/// Drives the `k`-sum. `cell(k)` returns the cell value of `f` and the growth
/// envelope at the cell's right end; the mass of term `k` is
/// `exp(log_factor(k) + log p_{n,k})`.
fn sum_over_k<M, F>(
    spec: &OperatorSpec,
    x: f64,
    op: &'static str,
    log_factor: M,
    mut cell: F,
) -> Result<f64>
where
    M: Fn(u32) -> f64,
    F: FnMut(u32) -> Result<(f64, f64)>,
{
    let ctx = &spec.ctx;
    let n = spec.n;
    let mut log_p = log_basis_weight(n, 0, x, ctx)?;
    let mut total = CompensatedSum::default();
    let mut prev_log_u = f64::NAN;
    let mut prev_ratio = f64::INFINITY;
    let mut tail = f64::INFINITY;

    for k in 0..spec.k_max {
        let k32 = k as u32;
        let log_mass = log_factor(k32) + log_p;
        let (value, envelope) = cell(k32)?;
        let mass = log_mass.exp();
        total.add(mass * value);

        if x == 0.0 {
            // p_{n,k}(0) = 0 for k >= 1.
            return Ok(total.value());
        }

        let log_u = log_mass + envelope.ln();
        if envelope == 0.0 || log_u == f64::NEG_INFINITY {
            return Ok(total.value());
        }
        if k > 0 {
            let ratio = (log_u - prev_log_u).exp();
            if ratio < 1.0 && ratio <= prev_ratio * (1.0 + RATIO_SLACK) {
                tail = log_u.exp() * ratio / (1.0 - ratio);
                if tail < spec.k_tail_tol {
                    return Ok(total.value());
                }
            }
            prev_ratio = ratio;
        }
        prev_log_u = log_u;
        log_p += log_ratio(n, k32, x, ctx);
    }
    Err(crate::Error::Truncation {
        op,
        terms: spec.k_max,
        tail,
    })
}

/// Coefficients of `p(scale * t + offset)` given those of `p(u)`.
fn compose_affine(coeffs: &[f64], scale: f64, offset: f64) -> Vec<f64> {
    let mut out = vec![0.0; coeffs.len()];
    // Horner in polynomial arithmetic: acc <- acc * (scale t + offset) + c_i.
    for &c in coeffs.iter().rev() {
        let mut next = vec![0.0; out.len()];
        for (j, &a) in out.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            next[j] += a * offset;
            if j + 1 < next.len() {
                next[j + 1] += a * scale;
            }
        }
        next[0] += c;
        out = next;
    }
    out
}

/// Exact `(1/(b - a)) int_a^b p(t) d_q t` for a polynomial `p`.
///
/// Uses `(b^{j+1} - a^{j+1})/(b - a) = sum_l a^l b^{j-l}` to avoid cancellation.
fn polynomial_cell_average(coeffs: &[f64], a: f64, b: f64, ctx: &QContext) -> f64 {
    let mut acc = 0.0;
    for (j, &c) in coeffs.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let mut h = 0.0;
        let mut a_pow = 1.0;
        for l in 0..=j {
            h += a_pow * b.powi((j - l) as i32);
            a_pow *= a;
        }
        acc += c * h / q_integer(j as u32 + 1, ctx);
    }
    acc
}

fn check_point(op: &'static str, x: f64) -> Result<()> {
    if x >= 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(domain(op, format!("x = {x} must be finite and >= 0")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::Growth;
    use crate::qcore::{q_beta_int, q_pochhammer};
    use approx::assert_relative_eq;

    fn spec(n: u32, q: f64) -> OperatorSpec {
        OperatorSpec::new(n, QContext::new(q).unwrap()).unwrap()
    }

    /// Linear-space evaluation of p_{n,k}, independent of the log-space path.
    fn basis_direct(n: u32, k: u32, x: f64, ctx: &QContext) -> f64 {
        let q = ctx.q();
        q.powf(f64::from(k * k.saturating_sub(1)) / 2.0) / q_beta_int(k + 1, n, ctx).unwrap()
            * x.powi(k as i32)
            / q_pochhammer(x, n + k + 1, ctx).unwrap()
    }

    #[test]
    fn stancu_params_enforce_ordering() {
        assert!(StancuParams::new(1.0, 2.0).is_ok());
        assert!(StancuParams::new(2.0, 1.0).is_err());
        assert!(StancuParams::new(-0.5, 1.0).is_err());
        assert!(StancuParams::new(0.0, 0.0).unwrap().is_identity());
    }

    #[test]
    fn operator_spec_rejects_bad_parameters() {
        let ctx = QContext::new(0.5).unwrap();
        assert!(OperatorSpec::new(0, ctx).is_err());
        assert!(OperatorSpec::new(3, ctx)
            .unwrap()
            .with_k_tail_tol(0.0)
            .is_err());
        assert!(OperatorSpec::new(3, ctx).unwrap().with_k_max(0).is_err());
    }

    #[test]
    fn basis_weight_examples() {
        let ctx = QContext::new(0.9).unwrap();
        assert_eq!(basis_weight(5, 2, 0.0, &ctx).unwrap(), 0.0);
        assert_relative_eq!(
            basis_weight(5, 0, 0.0, &ctx).unwrap(),
            q_integer(5, &ctx),
            max_relative = 1e-14
        );
        let direct = basis_direct(5, 3, 0.5, &ctx);
        assert_relative_eq!(
            basis_weight(5, 3, 0.5, &ctx).unwrap(),
            direct,
            max_relative = 1e-12
        );
        assert!(basis_weight(5, 3, -0.5, &ctx).is_err());
    }

    #[test]
    fn basis_ratio_matches_quotients() {
        let ctx = QContext::new(0.5).unwrap();
        for x in [0.3, 1.0, 4.0] {
            let expected = q_integer(3, &ctx) * x / (q_integer(1, &ctx) * (1.0 + 0.125 * x));
            assert_relative_eq!(
                basis_weight_ratio(2, 0, x, &ctx).unwrap(),
                expected,
                max_relative = 1e-12
            );
            let quotient =
                basis_weight(2, 1, x, &ctx).unwrap() / basis_weight(2, 0, x, &ctx).unwrap();
            assert_relative_eq!(
                basis_weight_ratio(2, 0, x, &ctx).unwrap(),
                quotient,
                max_relative = 1e-12
            );
        }
        let quotient = basis_direct(1, 2, 1.0, &ctx) / basis_direct(1, 1, 1.0, &ctx);
        assert_relative_eq!(
            basis_weight_ratio(1, 1, 1.0, &ctx).unwrap(),
            quotient,
            max_relative = 1e-12
        );
        assert!(basis_weight_ratio(1, 1, 0.0, &ctx).is_err());
    }

    #[test]
    fn basis_ratios_eventually_decrease_below_one() {
        for (q, x) in [(0.5, 2.0), (0.9, 1.0), (0.99, 0.5)] {
            let ctx = QContext::new(q).unwrap();
            let ratios: Vec<f64> = (0..200)
                .map(|k| basis_weight_ratio(10, k, x, &ctx).unwrap())
                .collect();
            let first_below = ratios
                .iter()
                .position(|&r| r < 1.0)
                .expect("ratio never below 1");
            for w in ratios[first_below..].windows(2) {
                assert!(w[1] < w[0] && w[1] < 1.0, "q = {q}: {w:?}");
            }
        }
    }

    #[test]
    fn stancu_shift_examples() {
        let ctx = QContext::new(0.5).unwrap();
        assert_eq!(stancu_shift(0.7, 4, StancuParams::IDENTITY, &ctx), 0.7);
        let s = StancuParams::new(1.0, 2.0).unwrap();
        assert_relative_eq!(
            stancu_shift(0.0, 3, s, &ctx),
            1.0 / (q_integer(3, &ctx) + 2.0)
        );
        let s = StancuParams::new(1.0, 1.0).unwrap();
        assert_relative_eq!(stancu_shift(1.0, 3, s, &ctx), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn discrete_operator_reproduces_known_moments() {
        let sp = spec(5, 0.9);
        let n1 = sp.bracket(6);
        for x in [0.0, 0.5, 2.0] {
            let v0 = discrete_beta_apply(&TargetFunction::monomial(0), &sp, x).unwrap();
            let v1 = discrete_beta_apply(&TargetFunction::monomial(1), &sp, x).unwrap();
            let v2 = discrete_beta_apply(&TargetFunction::monomial(2), &sp, x).unwrap();
            assert!((v0 - 1.0).abs() <= 1e-12);
            assert!((v1 - x).abs() <= 1e-12);
            let expected = (1.0 / (0.9 * n1) + 1.0) * x * x + x / n1;
            assert!(
                (v2 - expected).abs() <= 1e-12 * expected.max(1.0),
                "x = {x}"
            );
        }
    }

    #[test]
    fn discrete_operator_at_zero_is_point_evaluation() {
        let sp = spec(7, 0.8);
        let f = TargetFunction::new("cos", Growth::Bounded { bound: 1.0 }, f64::cos);
        assert_relative_eq!(
            discrete_beta_apply(&f, &sp, 0.0).unwrap(),
            1.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn kantorovich_first_moments() {
        for (n, q) in [(5, 0.9), (10, 0.8), (20, 0.5)] {
            let sp = spec(n, q);
            let n1 = sp.bracket(n + 1);
            for x in [0.0, 0.3, 1.7] {
                let v0 = kantorovich_apply(&TargetFunction::monomial(0), &sp, x).unwrap();
                let v1 = kantorovich_apply(&TargetFunction::monomial(1), &sp, x).unwrap();
                assert!((v0 - 1.0).abs() <= 1e-12);
                assert_relative_eq!(v1, x + q / ((1.0 + q) * n1), max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn general_path_matches_exact_polynomial_path() {
        let sp = spec(10, 0.8).with_stancu(StancuParams::new(0.5, 1.0).unwrap());
        let exact = TargetFunction::polynomial("p", &[0.5, -1.0, 2.0]);
        let generic = TargetFunction::new("p-generic", exact.growth(), |t| 0.5 - t + 2.0 * t * t);
        for x in [0.0, 0.4, 1.5] {
            let a = kantorovich_stancu_apply(&exact, &sp, x).unwrap();
            let b = kantorovich_stancu_apply(&generic, &sp, x).unwrap();
            assert_relative_eq!(a, b, max_relative = 1e-11);
        }
    }

    #[test]
    fn as_printed_operator_is_not_normalized() {
        // Closed form derived from sum_k p_{n,k} q^{-k} / [n]_q = 1 + x (1 - q^{n+1}) / q.
        for (n, q) in [(5, 0.9), (10, 0.8), (5, 0.5)] {
            let sp = spec(n, q).with_construction(Construction::AsPrinted);
            for x in [0.0, 0.5, 1.0] {
                let v0 = kantorovich_apply(&TargetFunction::monomial(0), &sp, x).unwrap();
                let expected = q + (1.0 - q.powi(n as i32 + 1)) * x;
                assert_relative_eq!(v0, expected, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn growth_violation_surfaces() {
        let sp = spec(5, 0.9);
        let lying = TargetFunction::new("lying", Growth::Bounded { bound: 1.0 }, |t| 1.0 + t);
        let err = kantorovich_stancu_apply(&lying, &sp, 1.0).unwrap_err();
        assert!(matches!(err, crate::Error::Growth { .. }));
        let err = discrete_beta_apply(&lying, &sp, 1.0).unwrap_err();
        assert!(matches!(err, crate::Error::Growth { .. }));
    }

    #[test]
    fn k_max_truncation_is_reported() {
        let sp = spec(10, 0.99).with_k_max(5).unwrap();
        let err = kantorovich_apply(&TargetFunction::monomial(1), &sp, 2.0).unwrap_err();
        assert!(matches!(err, crate::Error::Truncation { .. }));
    }

    #[test]
    fn classical_q_is_rejected() {
        let sp = spec(5, 1.0);
        assert!(matches!(
            kantorovich_apply(&TargetFunction::monomial(1), &sp, 0.5),
            Err(crate::Error::Domain { .. })
        ));
    }

    #[test]
    fn compose_affine_expands_binomially() {
        // (2t + 3)^2 = 4t^2 + 12t + 9
        assert_eq!(
            compose_affine(&[0.0, 0.0, 1.0], 2.0, 3.0),
            vec![9.0, 12.0, 4.0]
        );
        assert_eq!(compose_affine(&[1.0, 1.0], 1.0, 0.0), vec![1.0, 1.0]);
    }
}
