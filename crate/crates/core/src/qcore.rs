//! q-arithmetic in `f64`: q-integers, q-factorials, q-Pochhammer symbols,
//! q-Gamma/q-Beta at integer arguments, and Jackson q-integration.
//!
//! Every routine threads a [`QContext`], which carries the deformation
//! parameter together with the truncation policy used by the infinite
//! sums and products. Factorial-like quantities have log-space companions;
//! the linear-space versions report [`Error::Range`] instead of returning
//! `inf`.
//!
//! ```
//! use qkantorovich::qcore::{q_integer, q_jackson_integral, QContext};
//!
//! let ctx = QContext::new(0.5)?;
//! assert_eq!(q_integer(0, &ctx), 0.0);
//! assert!((q_integer(3, &ctx) - 1.75).abs() < 1e-15);
//!
//! // The Jackson integral reproduces a^{m+1}/[m+1]_q for monomials.
//! let i = q_jackson_integral(|t| t, 1.0, &ctx)?;
//! assert!((i - 1.0 / 1.5).abs() < 1e-13);
//! # Ok::<(), qkantorovich::Error>(())
//! ```

use crate::error::{domain, Error, Result};

/// Default absolute tail tolerance for infinite q-sums and q-products.
pub const DEFAULT_SERIES_TOL: f64 = 1e-14;
/// Default cap on the number of terms of any q-series.
pub const DEFAULT_MAX_TERMS: usize = 1_000_000;
/// Default magnitude at which an improper q-integral is declared divergent.
pub const DEFAULT_DIVERGENCE_CAP: f64 = 1e15;

/// Number of trailing nodes whose `|f|` bounds the tail of a Jackson sum.
const TAIL_WINDOW: usize = 5;
/// Minimum number of Jackson terms summed before the tail test may stop.
const MIN_TERMS: usize = 10;

/// The deformation parameter `q` together with series truncation settings.
///
/// Immutable once built; cheap to copy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QContext {
    q: f64,
    ln_q: f64,
    series_tol: f64,
    max_terms: usize,
    divergence_cap: f64,
}

impl QContext {
    /// Builds a context for `0 < q <= 1` with the default truncation policy.
    pub fn new(q: f64) -> Result<Self> {
        if !(q > 0.0 && q <= 1.0) {
            return Err(domain("QContext::new", format!("q = {q} is not in (0, 1]")));
        }
        Ok(Self {
            q,
            ln_q: q.ln(),
            series_tol: DEFAULT_SERIES_TOL,
            max_terms: DEFAULT_MAX_TERMS,
            divergence_cap: DEFAULT_DIVERGENCE_CAP,
        })
    }

    pub fn with_series_tol(mut self, series_tol: f64) -> Result<Self> {
        if !(series_tol > 0.0 && series_tol.is_finite()) {
            return Err(domain(
                "QContext::with_series_tol",
                format!("series_tol = {series_tol} must be positive"),
            ));
        }
        self.series_tol = series_tol;
        Ok(self)
    }

    pub fn with_max_terms(mut self, max_terms: usize) -> Result<Self> {
        if max_terms == 0 {
            return Err(domain("QContext::with_max_terms", "max_terms must be >= 1"));
        }
        self.max_terms = max_terms;
        Ok(self)
    }

    pub fn with_divergence_cap(mut self, cap: f64) -> Result<Self> {
        if cap.is_nan() || cap <= 0.0 {
            return Err(domain(
                "QContext::with_divergence_cap",
                "cap must be positive",
            ));
        }
        self.divergence_cap = cap;
        Ok(self)
    }

    #[inline]
    pub fn q(&self) -> f64 {
        self.q
    }

    #[inline]
    pub fn series_tol(&self) -> f64 {
        self.series_tol
    }

    #[inline]
    pub fn max_terms(&self) -> usize {
        self.max_terms
    }

    #[inline]
    pub fn divergence_cap(&self) -> f64 {
        self.divergence_cap
    }

    /// `true` at the classical limit `q = 1`.
    #[inline]
    pub fn is_classical(&self) -> bool {
        self.q == 1.0
    }

    /// `q^k` for a (possibly negative) integer exponent.
    #[inline]
    pub fn pow(&self, k: i32) -> f64 {
        self.q.powi(k)
    }

    /// `q^r` for a real exponent.
    #[inline]
    pub fn powf(&self, r: f64) -> f64 {
        (r * self.ln_q).exp()
    }

    pub(crate) fn require_deformed(&self, op: &'static str) -> Result<()> {
        if self.is_classical() {
            Err(domain(op, "requires q < 1"))
        } else {
            Ok(())
        }
    }
}

/// A closed interval `[lower, upper]` with `0 <= lower <= upper`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QInterval {
    lower: f64,
    upper: f64,
}

impl QInterval {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower >= 0.0 && upper >= lower && upper.is_finite()) {
            return Err(domain(
                "QInterval::new",
                format!("[{lower}, {upper}] is not a valid interval in [0, inf)"),
            ));
        }
        Ok(Self { lower, upper })
    }

    #[inline]
    pub fn lower(&self) -> f64 {
        self.lower
    }

    #[inline]
    pub fn upper(&self) -> f64 {
        self.upper
    }

    #[inline]
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

/// The q-integer `[n]_q = (1 - q^n)/(1 - q)`, equal to `n` at `q = 1`.
pub fn q_integer(n: u32, ctx: &QContext) -> f64 {
    q_number(f64::from(n), ctx)
}

/// The real-argument extension `[r]_q = (1 - q^r)/(1 - q)`.
///
/// Agrees with [`q_integer`] at whole numbers; used for brackets such as
/// `[n + beta]_q` with a non-integer shift.
pub fn q_number(r: f64, ctx: &QContext) -> f64 {
    if ctx.is_classical() {
        r
    } else {
        // expm1 keeps full relative accuracy when q^r is close to 1.
        -(r * ctx.ln_q).exp_m1() / (1.0 - ctx.q)
    }
}

/// The q-factorial `[n]_q! = [n]_q [n-1]_q ... [1]_q`, with `[0]_q! = 1`.
pub fn q_factorial(n: u32, ctx: &QContext) -> Result<f64> {
    let value = (1..=n).fold(1.0, |acc, i| acc * q_integer(i, ctx));
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Range { op: "q_factorial" })
    }
}

/// Natural logarithm of `[n]_q!`, finite for every `n`.
pub fn log_q_factorial(n: u32, ctx: &QContext) -> f64 {
    (1..=n).map(|i| q_integer(i, ctx).ln()).sum()
}

/// The finite q-Pochhammer symbol `(1 + x)_q^n = (1 + x)(1 + qx)...(1 + q^{n-1}x)`.
pub fn q_pochhammer(x: f64, n: u32, ctx: &QContext) -> Result<f64> {
    check_nonnegative("q_pochhammer", x)?;
    let value = log_q_pochhammer(x, n, ctx).exp();
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Range { op: "q_pochhammer" })
    }
}

/// Natural logarithm of `(1 + x)_q^n` for `x >= 0`.
pub fn log_q_pochhammer(x: f64, n: u32, ctx: &QContext) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let mut scaled = x;
    let mut acc = 0.0;
    for _ in 0..n {
        acc += scaled.ln_1p();
        scaled *= ctx.q;
    }
    acc
}

/// The real-order q-Pochhammer symbol `(1 + x)_q^a = (1 + x)_q^inf / (1 + q^a x)_q^inf`.
///
/// Each infinite product is cut once its factors differ from 1 by less than
/// `series_tol`. Requires `q < 1`.
pub fn q_pochhammer_real(x: f64, a: f64, ctx: &QContext) -> Result<f64> {
    const OP: &str = "q_pochhammer_real";
    ctx.require_deformed(OP)?;
    check_nonnegative(OP, x)?;
    if !a.is_finite() {
        return Err(domain(OP, format!("order a = {a} is not finite")));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    let numerator = log_infinite_pochhammer(x, ctx, OP)?;
    let denominator = log_infinite_pochhammer(x * ctx.powf(a), ctx, OP)?;
    let value = (numerator - denominator).exp();
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Range { op: OP })
    }
}

fn log_infinite_pochhammer(x: f64, ctx: &QContext, op: &'static str) -> Result<f64> {
    let mut scaled = x;
    let mut acc = 0.0;
    for _ in 0..ctx.max_terms {
        if scaled < ctx.series_tol {
            return Ok(acc);
        }
        acc += scaled.ln_1p();
        scaled *= ctx.q;
    }
    Err(Error::Truncation {
        op,
        terms: ctx.max_terms,
        tail: scaled,
    })
}

/// `Gamma_q(n) = [n-1]_q!` for a positive integer `n`.
pub fn q_gamma_int(n: u32, ctx: &QContext) -> Result<f64> {
    if n == 0 {
        return Err(domain("q_gamma_int", "n must be >= 1"));
    }
    q_factorial(n - 1, ctx)
}

/// Natural logarithm of `Gamma_q(n)`, `n >= 1`.
pub fn log_q_gamma_int(n: u32, ctx: &QContext) -> Result<f64> {
    if n == 0 {
        return Err(domain("log_q_gamma_int", "n must be >= 1"));
    }
    Ok(log_q_factorial(n - 1, ctx))
}

/// `B_q(m, n) = Gamma_q(m) Gamma_q(n) / Gamma_q(m + n)` at positive integers.
///
/// Evaluated through [`log_q_beta_int`]; the arguments are put in canonical
/// order first so the result is exactly symmetric.
pub fn q_beta_int(m: u32, n: u32, ctx: &QContext) -> Result<f64> {
    Ok(log_q_beta_int(m, n, ctx)?.exp())
}

pub fn log_q_beta_int(m: u32, n: u32, ctx: &QContext) -> Result<f64> {
    if m == 0 || n == 0 {
        return Err(domain("q_beta_int", "arguments must be >= 1"));
    }
    let (lo, hi) = if m <= n { (m, n) } else { (n, m) };
    Ok(log_q_factorial(lo - 1, ctx) + log_q_factorial(hi - 1, ctx)
        - log_q_factorial(lo + hi - 1, ctx))
}

/// Exact Jackson integral of `t^m` over `iv`: `(b^{m+1} - a^{m+1}) / [m+1]_q`.
pub fn monomial_q_integral(m: u32, iv: QInterval, ctx: &QContext) -> f64 {
    let e = m as i32 + 1;
    (iv.upper.powi(e) - iv.lower.powi(e)) / q_integer(m + 1, ctx)
}

/// The Jackson integral `int_0^a f(t) d_q t = (1 - q) a sum_j f(a q^j) q^j`.
///
/// Summation stops once at least ten terms are in and the remaining
/// geometric mass `a q^{j+1}` times the largest `|f|` over the last five
/// nodes is below `series_tol`.
pub fn q_jackson_integral<F>(f: F, a: f64, ctx: &QContext) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    const OP: &str = "q_jackson_integral";
    ctx.require_deformed(OP)?;
    check_nonnegative(OP, a)?;
    if a == 0.0 {
        return Ok(0.0);
    }
    let q = ctx.q;
    let mut window = [0.0_f64; TAIL_WINDOW];
    let mut sum = CompensatedSum::default();
    let mut weight = 1.0; // q^j
    let mut tail = f64::INFINITY;
    for j in 0..ctx.max_terms {
        let value = f(a * weight);
        sum.add(value * weight);
        window[j % TAIL_WINDOW] = value.abs();
        weight *= q;
        if j + 1 >= MIN_TERMS {
            let local = window.iter().copied().fold(0.0, f64::max);
            tail = a * weight * local;
            if tail < ctx.series_tol {
                return Ok((1.0 - q) * a * sum.value());
            }
        }
    }
    Err(Error::Truncation {
        op: OP,
        terms: ctx.max_terms,
        tail,
    })
}

/// `int_a^b f d_q t`, defined as the difference of the two Jackson integrals from 0.
pub fn q_integral_on_interval<F>(f: F, iv: QInterval, ctx: &QContext) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let upper = q_jackson_integral(&f, iv.upper, ctx)?;
    let lower = q_jackson_integral(&f, iv.lower, ctx)?;
    Ok(upper - lower)
}

/// The improper q-integral `int_0^{inf/A} f d_q t = (1 - q) sum_{j in Z} f(q^j/A) q^j/A`.
///
/// The two one-sided sums are truncated independently; the outward sum
/// (nodes growing without bound) reports [`Error::Divergence`] as soon as
/// its partial sum passes the context's divergence cap.
pub fn q_improper_integral<F>(f: F, scale: f64, ctx: &QContext) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    const OP: &str = "q_improper_integral";
    ctx.require_deformed(OP)?;
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(domain(OP, format!("A = {scale} must be positive")));
    }
    let q = ctx.q;
    let base = 1.0 / scale;

    // Inward half, j = 0, 1, 2, ...: nodes shrink to 0; same tail rule as the Jackson sum.
    let inward = q_jackson_integral(&f, base, ctx)? / (1.0 - q);

    // Outward half, j = -1, -2, ...: nodes grow; stop once the last few terms are negligible.
    let mut sum = CompensatedSum::default();
    let mut window = [f64::INFINITY; TAIL_WINDOW];
    let mut node = base / q;
    for j in 0..ctx.max_terms {
        let term = f(node) * node;
        sum.add(term);
        window[j % TAIL_WINDOW] = term.abs();
        let partial = sum.value();
        if !partial.is_finite() || partial.abs() > ctx.divergence_cap {
            return Err(Error::Divergence {
                op: OP,
                partial,
                cap: ctx.divergence_cap,
            });
        }
        if j + 1 >= MIN_TERMS {
            let local = window.iter().copied().fold(0.0, f64::max);
            if local < ctx.series_tol {
                return Ok((1.0 - q) * (inward + partial));
            }
        }
        node /= q;
    }
    Err(Error::Truncation {
        op: OP,
        terms: ctx.max_terms,
        tail: window.iter().copied().fold(0.0, f64::max),
    })
}

fn check_nonnegative(op: &'static str, x: f64) -> Result<()> {
    if x >= 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(domain(op, format!("argument {x} must be finite and >= 0")))
    }
}

/// Neumaier summation.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    #[inline]
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub(crate) fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ctx(q: f64) -> QContext {
        QContext::new(q).unwrap()
    }

    #[test]
    fn context_rejects_bad_parameters() {
        assert!(QContext::new(0.0).is_err());
        assert!(QContext::new(1.5).is_err());
        assert!(QContext::new(f64::NAN).is_err());
        assert!(ctx(0.5).with_series_tol(0.0).is_err());
        assert!(ctx(0.5).with_max_terms(0).is_err());
        assert!(QContext::new(1.0).is_ok());
    }

    #[test]
    fn q_integer_examples() {
        assert_eq!(q_integer(4, &ctx(1.0)), 4.0);
        assert_eq!(q_integer(0, &ctx(0.3)), 0.0);
        assert_relative_eq!(q_integer(3, &ctx(0.5)), 1.75, max_relative = 1e-15);
        assert_relative_eq!(q_number(3.0, &ctx(0.5)), q_integer(3, &ctx(0.5)));
    }

    #[test]
    fn q_integer_classical_limit() {
        let eps = 1e-6;
        let c = ctx(1.0 - eps);
        for n in [1u32, 5, 20, 100] {
            let err = (q_integer(n, &c) - f64::from(n)).abs();
            assert!(err <= f64::from(n * n) * eps, "n = {n}: {err}");
        }
    }

    #[test]
    fn q_factorial_examples() {
        assert_eq!(q_factorial(0, &ctx(0.7)).unwrap(), 1.0);
        assert_relative_eq!(
            q_factorial(3, &ctx(0.5)).unwrap(),
            2.625,
            max_relative = 1e-15
        );
        let c = ctx(0.9);
        let direct: f64 = (1..=5).map(|i| q_integer(i, &c)).product();
        assert_relative_eq!(q_factorial(5, &c).unwrap(), direct, max_relative = 1e-15);
    }

    #[test]
    fn q_factorial_overflow_is_a_range_error() {
        let c = ctx(1.0);
        assert_eq!(
            q_factorial(200, &c),
            Err(Error::Range { op: "q_factorial" })
        );
        assert!(log_q_factorial(200, &c).is_finite());
    }

    #[test]
    fn log_q_factorial_matches_linear() {
        assert_eq!(log_q_factorial(0, &ctx(0.4)), 0.0);
        assert_relative_eq!(
            log_q_factorial(3, &ctx(0.5)),
            2.625f64.ln(),
            max_relative = 1e-14
        );
        let c = ctx(0.99);
        for n in [1u32, 10, 60, 150] {
            let lin = q_factorial(n, &c).unwrap();
            assert_relative_eq!(log_q_factorial(n, &c).exp(), lin, max_relative = 1e-12);
        }
        let direct: f64 = (1..=200).map(|i| q_integer(i, &c).ln()).sum();
        assert_relative_eq!(log_q_factorial(200, &c), direct, max_relative = 1e-15);
    }

    #[test]
    fn q_pochhammer_examples() {
        assert_eq!(q_pochhammer(2.0, 0, &ctx(0.5)).unwrap(), 1.0);
        assert_relative_eq!(
            q_pochhammer(1.0, 2, &ctx(0.5)).unwrap(),
            3.0,
            max_relative = 1e-15
        );
        let c = ctx(0.9);
        let direct: f64 = (0..4).map(|i| 1.0 + 0.9f64.powi(i) * 0.5).product();
        assert_relative_eq!(
            q_pochhammer(0.5, 4, &c).unwrap(),
            direct,
            max_relative = 1e-14
        );
        assert!(q_pochhammer(-1.0, 2, &c).is_err());
    }

    #[test]
    fn q_pochhammer_real_matches_integer_orders() {
        assert_eq!(q_pochhammer_real(0.0, 3.7, &ctx(0.5)).unwrap(), 1.0);
        assert_relative_eq!(
            q_pochhammer_real(1.0, 2.0, &ctx(0.5)).unwrap(),
            3.0,
            max_relative = 1e-10
        );
        for q in [0.3, 0.8, 0.95] {
            let c = ctx(q);
            for n in 0..8 {
                let int = q_pochhammer(1.3, n, &c).unwrap();
                let real = q_pochhammer_real(1.3, f64::from(n), &c).unwrap();
                assert_relative_eq!(real, int, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn q_pochhammer_real_fractional_order_is_tolerance_stable() {
        let loose = ctx(0.8).with_series_tol(1e-14).unwrap();
        let tight = ctx(0.8).with_series_tol(1e-16).unwrap();
        let a = q_pochhammer_real(0.5, 2.5, &loose).unwrap();
        let b = q_pochhammer_real(0.5, 2.5, &tight).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-12);
        // Between the neighbouring integer orders.
        let lo = q_pochhammer(0.5, 2, &loose).unwrap();
        let hi = q_pochhammer(0.5, 3, &loose).unwrap();
        assert!(lo < a && a < hi);
    }

    #[test]
    fn q_pochhammer_real_rejects_classical_q() {
        assert!(matches!(
            q_pochhammer_real(1.0, 2.0, &ctx(1.0)),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn q_gamma_and_beta_examples() {
        let c = ctx(0.5);
        assert_eq!(q_gamma_int(1, &c).unwrap(), 1.0);
        assert_eq!(q_gamma_int(2, &c).unwrap(), 1.0);
        assert_relative_eq!(q_gamma_int(4, &c).unwrap(), 2.625, max_relative = 1e-15);
        assert!(q_gamma_int(0, &c).is_err());

        assert_relative_eq!(q_beta_int(1, 1, &c).unwrap(), 1.0, max_relative = 1e-15);
        assert_relative_eq!(
            q_beta_int(2, 1, &c).unwrap(),
            1.0 / 1.5,
            max_relative = 1e-14
        );
        let c = ctx(0.9);
        for n0 in [1u32, 4, 17, 90] {
            let b = q_beta_int(1, n0, &c).unwrap();
            assert_relative_eq!(b, 1.0 / q_integer(n0, &c), max_relative = 1e-12);
        }
    }

    #[test]
    fn q_beta_linear_path_agrees_with_log_path() {
        let c = ctx(0.7);
        for (m, n) in [(2u32, 3u32), (5, 4), (7, 7)] {
            let lin = q_gamma_int(m, &c).unwrap() * q_gamma_int(n, &c).unwrap()
                / q_gamma_int(m + n, &c).unwrap();
            assert_relative_eq!(q_beta_int(m, n, &c).unwrap(), lin, max_relative = 1e-13);
        }
    }

    #[test]
    fn jackson_integral_examples() {
        assert_relative_eq!(
            q_jackson_integral(|_| 1.0, 0.7, &ctx(0.5)).unwrap(),
            0.7,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            q_jackson_integral(|t| t, 1.0, &ctx(0.5)).unwrap(),
            2.0 / 3.0,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            q_jackson_integral(|t| t * t, 1.0, &ctx(0.5)).unwrap(),
            1.0 / 1.75,
            max_relative = 1e-13
        );
        assert_eq!(q_jackson_integral(|t| t, 0.0, &ctx(0.5)).unwrap(), 0.0);
    }

    #[test]
    fn jackson_integral_errors() {
        assert!(matches!(
            q_jackson_integral(|t| t, 1.0, &ctx(1.0)),
            Err(Error::Domain { .. })
        ));
        assert!(matches!(
            q_jackson_integral(|t| t, -1.0, &ctx(0.5)),
            Err(Error::Domain { .. })
        ));
        let capped = ctx(0.99).with_max_terms(20).unwrap();
        assert!(matches!(
            q_jackson_integral(|_| 1.0, 1.0, &capped),
            Err(Error::Truncation { .. })
        ));
    }

    #[test]
    fn interval_integral_examples() {
        let c = ctx(0.9);
        let iv = QInterval::new(0.3, 1.2).unwrap();
        assert_relative_eq!(
            q_integral_on_interval(|_| 1.0, iv, &c).unwrap(),
            0.9,
            max_relative = 1e-12
        );
        let iv = QInterval::new(0.0, 1.0).unwrap();
        assert_relative_eq!(
            q_integral_on_interval(|t| t, iv, &ctx(0.5)).unwrap(),
            2.0 / 3.0,
            max_relative = 1e-13
        );

        // Kantorovich-type cell for n = 5, k = 1.
        let n1 = q_integer(6, &c);
        let iv = QInterval::new(q_integer(1, &c) / n1, q_integer(2, &c) / n1).unwrap();
        let series = q_integral_on_interval(|t| t, iv, &c).unwrap();
        let exact = (iv.upper().powi(2) - iv.lower().powi(2)) / q_integer(2, &c);
        assert_relative_eq!(series, exact, max_relative = 1e-12);
        assert_relative_eq!(monomial_q_integral(1, iv, &c), exact, max_relative = 1e-15);
    }

    #[test]
    fn interval_rejects_inverted_bounds() {
        assert!(QInterval::new(1.0, 0.5).is_err());
        assert!(QInterval::new(-0.1, 0.5).is_err());
    }

    #[test]
    fn improper_integral_examples() {
        let c = ctx(0.8);
        assert_eq!(q_improper_integral(|_| 0.0, 2.0, &c).unwrap(), 0.0);
        assert!(matches!(
            q_improper_integral(|_| 1.0, 1.0, &c),
            Err(Error::Divergence { .. })
        ));

        let f = |t: f64| t * (-t).exp();
        let loose = q_improper_integral(f, 1.5, &c.with_series_tol(1e-12).unwrap()).unwrap();
        let tight = q_improper_integral(f, 1.5, &c.with_series_tol(5e-13).unwrap()).unwrap();
        assert!((loose - tight).abs() <= 1e-8, "{loose} vs {tight}");
        // Two-sided sum evaluated independently at 30 digits.
        assert!((loose - 0.896_284_023_544_909_9).abs() < 1e-10, "{loose}");
    }
}
