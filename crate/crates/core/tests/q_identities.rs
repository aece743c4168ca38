use approx::assert_relative_eq;
use proptest::prelude::*;

use qkantorovich::qcore::{
    log_q_beta_int, log_q_factorial, q_integer, q_integral_on_interval, q_jackson_integral,
    q_pochhammer, QContext, QInterval,
};

fn q_strategy() -> impl Strategy<Value = f64> {
    0.05_f64..0.995
}

proptest! {
    #[test]
    fn q_integer_recurrence(q in q_strategy(), n in 0_u32..200) {
        // [n+1] = 1 + q [n]
        let ctx = QContext::new(q).unwrap();
        let lhs = q_integer(n + 1, &ctx);
        let rhs = 1.0 + q * q_integer(n, &ctx);
        prop_assert!((lhs - rhs).abs() <= 1e-13 * lhs.max(1.0));
    }

    #[test]
    fn q_integer_addition(q in q_strategy(), m in 0_u32..100, n in 0_u32..100) {
        // [m+n] = [m] + q^m [n]
        let ctx = QContext::new(q).unwrap();
        let lhs = q_integer(m + n, &ctx);
        let rhs = q_integer(m, &ctx) + q.powi(m as i32) * q_integer(n, &ctx);
        prop_assert!((lhs - rhs).abs() <= 1e-13 * lhs.max(1.0));
    }

    #[test]
    fn log_factorial_steps(q in q_strategy(), n in 1_u32..300) {
        let ctx = QContext::new(q).unwrap();
        let step = log_q_factorial(n, &ctx) - log_q_factorial(n - 1, &ctx);
        prop_assert!((step - q_integer(n, &ctx).ln()).abs() <= 1e-11);
    }

    #[test]
    fn beta_is_symmetric(q in q_strategy(), m in 1_u32..60, n in 1_u32..60) {
        let ctx = QContext::new(q).unwrap();
        let a = log_q_beta_int(m, n, &ctx).unwrap();
        let b = log_q_beta_int(n, m, &ctx).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn pochhammer_splits(q in q_strategy(), x in 0.0_f64..5.0, m in 0_u32..20, n in 0_u32..20) {
        // (1+x)_q^{m+n} = (1+x)_q^m (1+q^m x)_q^n
        let ctx = QContext::new(q).unwrap();
        let whole = q_pochhammer(x, m + n, &ctx).unwrap();
        let split = q_pochhammer(x, m, &ctx).unwrap() * q_pochhammer(q.powi(m as i32) * x, n, &ctx).unwrap();
        prop_assert!((whole - split).abs() <= 1e-12 * whole);
    }

    #[test]
    fn jackson_integral_is_linear(q in 0.3_f64..0.95, a in 0.1_f64..3.0, c in -2.0_f64..2.0) {
        let ctx = QContext::new(q).unwrap();
        let f = |t: f64| (t + 1.0).ln();
        let g = |t: f64| t.sin();
        let combined = q_jackson_integral(|t| f(t) + c * g(t), a, &ctx).unwrap();
        let separate = q_jackson_integral(f, a, &ctx).unwrap() + c * q_jackson_integral(g, a, &ctx).unwrap();
        prop_assert!((combined - separate).abs() <= 1e-12);
    }

    #[test]
    fn jackson_integral_is_additive_over_intervals(q in 0.3_f64..0.95, a in 0.0_f64..1.0, w1 in 0.1_f64..1.0, w2 in 0.1_f64..1.0) {
        let ctx = QContext::new(q).unwrap();
        let f = |t: f64| t.exp();
        let b = a + w1;
        let c = b + w2;
        let left = q_integral_on_interval(f, QInterval::new(a, b).unwrap(), &ctx).unwrap();
        let right = q_integral_on_interval(f, QInterval::new(b, c).unwrap(), &ctx).unwrap();
        let whole = q_integral_on_interval(f, QInterval::new(a, c).unwrap(), &ctx).unwrap();
        prop_assert!((left + right - whole).abs() <= 1e-12 * whole.abs().max(1.0));
    }
}

#[test]
fn q_integer_near_one_keeps_precision() {
    // [n]_q -> n as q -> 1; the naive quotient loses about half the digits here.
    let ctx = QContext::new(1.0 - 1e-9).unwrap();
    assert_relative_eq!(
        q_integer(10, &ctx),
        10.0 - 45.0 * 1e-9,
        max_relative = 1e-14
    );
}
