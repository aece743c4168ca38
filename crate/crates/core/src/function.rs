//! Target functions: an evaluable map on `[0, inf)` plus the growth class the
//! operators and weighted moduli rely on.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Relative slack allowed when checking a value against its envelope.
const ENVELOPE_SLACK: f64 = 1e-12;

/// Declared growth class of a [`TargetFunction`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Growth {
    /// `|f(x)| <= bound` everywhere.
    Bounded { bound: f64 },
    /// `|f(x)| <= constant * (1 + x^{2 + gamma})`.
    WeightDominated { constant: f64, gamma: f64 },
}

impl Growth {
    /// Value of the envelope at `t`.
    pub fn envelope(&self, t: f64) -> f64 {
        match *self {
            Growth::Bounded { bound } => bound,
            Growth::WeightDominated { constant, gamma } => constant * (1.0 + t.powf(2.0 + gamma)),
        }
    }

    /// Constant `M_f` with `|f| <= M_f (1 + x^{2 + gamma})` for the given `gamma`.
    ///
    /// Bounded functions fit every weight with `M_f = bound`. A weight-dominated
    /// function declared with a larger exponent than `gamma` has no such constant.
    pub fn weight_constant(&self, gamma: f64) -> Option<f64> {
        match *self {
            Growth::Bounded { bound } => Some(bound),
            Growth::WeightDominated { constant, gamma: g } if g <= gamma => Some(constant),
            Growth::WeightDominated { .. } => None,
        }
    }

    pub fn is_bounded(&self) -> bool {
        matches!(self, Growth::Bounded { .. })
    }
}

/// A real function on `[0, inf)` with its declared growth envelope.
///
/// Polynomials keep their coefficients so the operators can integrate them
/// exactly instead of through a truncated Jackson series.
#[derive(Clone)]
pub struct TargetFunction {
    name: Arc<str>,
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    growth: Growth,
    nondecreasing: bool,
    coefficients: Option<Arc<[f64]>>,
}

impl TargetFunction {
    pub fn new<F>(name: &str, growth: Growth, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            eval: Arc::new(f),
            growth,
            nondecreasing: false,
            coefficients: None,
        }
    }

    /// The polynomial `c_0 + c_1 t + ... + c_d t^d`.
    pub fn polynomial(name: &str, coefficients: &[f64]) -> Self {
        let degree = coefficients.len().saturating_sub(1);
        let constant: f64 = coefficients.iter().map(|c| c.abs()).sum();
        let growth = Growth::WeightDominated {
            constant,
            gamma: degree.saturating_sub(2) as f64,
        };
        let coeffs: Arc<[f64]> = coefficients.into();
        let eval_coeffs = Arc::clone(&coeffs);
        Self {
            name: name.into(),
            eval: Arc::new(move |t| horner(&eval_coeffs, t)),
            growth,
            nondecreasing: false,
            coefficients: Some(coeffs),
        }
    }

    /// The test function `e_m(t) = t^m`.
    pub fn monomial(m: usize) -> Self {
        let mut coeffs = vec![0.0; m + 1];
        coeffs[m] = 1.0;
        let mut f = Self::polynomial(&format!("e{m}"), &coeffs);
        f.nondecreasing = true;
        f
    }

    /// Marks the function as nondecreasing on `[0, inf)`.
    pub fn with_nondecreasing(mut self, flag: bool) -> Self {
        self.nondecreasing = flag;
        self
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.into();
        self
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        (self.eval)(t)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn growth(&self) -> Growth {
        self.growth
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.nondecreasing
    }

    /// Polynomial coefficients in increasing degree, if the function is a polynomial.
    pub fn coefficients(&self) -> Option<&[f64]> {
        self.coefficients.as_deref()
    }

    /// Checks a value of `f` at `t` against the declared envelope.
    pub fn check_growth(&self, t: f64, value: f64) -> Result<()> {
        let envelope = self.growth.envelope(t);
        if value.abs() <= envelope * (1.0 + ENVELOPE_SLACK) {
            Ok(())
        } else {
            Err(Error::Growth {
                name: self.name.to_string(),
                t,
                value: value.abs(),
                envelope,
            })
        }
    }

    /// Evaluates at `samples` equispaced points of `[0, x_max]` and checks the envelope.
    pub fn verify_growth(&self, x_max: f64, samples: usize) -> Result<()> {
        let samples = samples.max(2);
        for i in 0..samples {
            let t = x_max * i as f64 / (samples - 1) as f64;
            self.check_growth(t, self.eval(t))?;
        }
        Ok(())
    }
}

impl fmt::Debug for TargetFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TargetFunction")
            .field("name", &self.name)
            .field("growth", &self.growth)
            .field("nondecreasing", &self.nondecreasing)
            .field("coefficients", &self.coefficients)
            .finish()
    }
}

fn horner(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
}
