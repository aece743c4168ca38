//! Test functions shared by the experiments, with growth, smoothness and
//! closed-form moduli where known.

use crate::error::Result;
use crate::function::{Growth, TargetFunction};

/// Samples used to verify declared growth when the catalog is built.
pub const GROWTH_SAMPLES: usize = 10_000;

/// Holder data `|f(s) - f(t)| <= constant * |s - t|^exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Holder {
    pub exponent: f64,
    pub constant: f64,
}

/// A closed-form modulus as a function of `(delta, b)` on `[0, b]`.
pub type AnalyticModulus = fn(f64, f64) -> f64;

#[derive(Debug, Clone)]
pub struct FunctionCatalogEntry {
    pub name: &'static str,
    pub f: TargetFunction,
    /// Holder class on `[0, inf)`, for the Lipschitz-class estimate.
    pub holder: Option<Holder>,
    /// `omega(f, delta)` on `[0, b]`.
    pub omega: Option<AnalyticModulus>,
    /// `omega_2(f, delta)` on `[0, b]`, valid when `2 delta <= b`.
    pub omega2: Option<AnalyticModulus>,
}

impl FunctionCatalogEntry {
    fn new(name: &'static str, f: TargetFunction) -> Self {
        Self {
            name,
            f: f.with_name(name),
            holder: None,
            omega: None,
            omega2: None,
        }
    }

    fn holder(mut self, exponent: f64, constant: f64) -> Self {
        self.holder = Some(Holder { exponent, constant });
        self
    }

    fn moduli(mut self, omega: AnalyticModulus, omega2: AnalyticModulus) -> Self {
        self.omega = Some(omega);
        self.omega2 = Some(omega2);
        self
    }
}

/// The standard catalog, with growth verified on [`GROWTH_SAMPLES`] points of `[0, x_max]`.
///
/// ```
/// use qkantorovich::harness::catalog::{catalog, lookup};
///
/// let entries = catalog(10.0)?;
/// assert_eq!(entries.len(), 8);
/// assert!(lookup(&entries, "abs_half").is_some());
/// # Ok::<(), qkantorovich::Error>(())
/// ```
pub fn catalog(x_max: f64) -> Result<Vec<FunctionCatalogEntry>> {
    let entries = vec![
        FunctionCatalogEntry::new("e0", TargetFunction::monomial(0))
            .holder(1.0, 0.0)
            .moduli(|_, _| 0.0, |_, _| 0.0),
        FunctionCatalogEntry::new("e1", TargetFunction::monomial(1))
            .holder(1.0, 1.0)
            .moduli(|d, _| d, |_, _| 0.0),
        FunctionCatalogEntry::new("e2", TargetFunction::monomial(2))
            .moduli(|d, b| 2.0 * b * d - d * d, |d, _| 2.0 * d * d),
        FunctionCatalogEntry::new(
            "ratio",
            TargetFunction::new("ratio", Growth::Bounded { bound: 1.0 }, |t| t / (1.0 + t))
                .with_nondecreasing(true),
        )
        .holder(1.0, 1.0)
        .moduli(
            |d, _| d / (1.0 + d),
            |d, _| {
                // Second difference is largest at x = 0: f(2d) - 2f(d).
                (2.0 * d / (1.0 + 2.0 * d) - 2.0 * d / (1.0 + d)).abs()
            },
        ),
        FunctionCatalogEntry::new(
            "abs_half",
            TargetFunction::new(
                "abs_half",
                Growth::WeightDominated {
                    constant: 1.0,
                    gamma: 0.0,
                },
                |t| (t - 0.5).abs(),
            ),
        )
        .holder(1.0, 1.0),
        FunctionCatalogEntry::new(
            "sqrt_clipped",
            TargetFunction::new("sqrt_clipped", Growth::Bounded { bound: 1.0 }, |t| {
                t.min(1.0).sqrt()
            })
            .with_nondecreasing(true),
        )
        .holder(0.5, 1.0),
        FunctionCatalogEntry::new(
            "logistic",
            TargetFunction::new("logistic", Growth::Bounded { bound: 1.0 }, |t| {
                1.0 / (1.0 + (-4.0 * (t - 1.0)).exp())
            })
            .with_nondecreasing(true),
        )
        .holder(1.0, 1.0),
        FunctionCatalogEntry::new(
            "square_ratio",
            TargetFunction::new(
                "square_ratio",
                Growth::WeightDominated {
                    constant: 1.0,
                    gamma: 0.0,
                },
                |t| t * t / (1.0 + t),
            )
            .with_nondecreasing(true),
        ),
    ];
    for entry in &entries {
        entry.f.verify_growth(x_max, GROWTH_SAMPLES)?;
    }
    Ok(entries)
}

pub fn lookup<'a>(
    entries: &'a [FunctionCatalogEntry],
    name: &str,
) -> Option<&'a FunctionCatalogEntry> {
    entries.iter().find(|e| e.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_contains_required_functions() {
        let entries = catalog(10.0).unwrap();
        for name in [
            "e0",
            "e1",
            "e2",
            "ratio",
            "abs_half",
            "sqrt_clipped",
            "logistic",
            "square_ratio",
        ] {
            let e = lookup(&entries, name).unwrap();
            assert_eq!(e.f.name(), name);
        }
    }

    #[test]
    fn holder_constants_hold_on_samples() {
        let entries = catalog(10.0).unwrap();
        for e in entries.iter().filter(|e| e.holder.is_some()) {
            let h = e.holder.unwrap();
            for i in 0..400 {
                let s = i as f64 * 0.01;
                for d in [1e-4, 0.01, 0.3, 1.0] {
                    let lhs = (e.f.eval(s + d) - e.f.eval(s)).abs();
                    assert!(
                        lhs <= h.constant * d.powf(h.exponent) + 1e-12,
                        "{} at {s}, {d}",
                        e.name
                    );
                }
            }
        }
    }

    #[test]
    fn nondecreasing_flags_hold_on_samples() {
        for e in catalog(10.0)
            .unwrap()
            .iter()
            .filter(|e| e.f.is_nondecreasing())
        {
            let mut prev = e.f.eval(0.0);
            for i in 1..2000 {
                let v = e.f.eval(i as f64 * 0.005);
                assert!(v >= prev, "{}", e.name);
                prev = v;
            }
        }
    }
}
