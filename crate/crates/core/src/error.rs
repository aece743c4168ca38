use thiserror::Error;

/// Failures raised by the q-calculus primitives, the operators and the moduli.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error in {op}: {reason}")]
    Domain { op: &'static str, reason: String },

    /// A series or product did not reach its tolerance within the term cap.
    #[error("{op} did not converge within {terms} terms (last tail bound {tail:e})")]
    Truncation {
        op: &'static str,
        terms: usize,
        tail: f64,
    },

    /// A linear-space result is not representable as an `f64`.
    #[error("{op} overflowed the f64 range; use the log-space variant")]
    Range { op: &'static str },

    /// Partial sums of an improper q-integral grew past the configured cap.
    #[error("{op} diverges: partial sum {partial:e} exceeds cap {cap:e}")]
    Divergence {
        op: &'static str,
        partial: f64,
        cap: f64,
    },

    /// A target function exceeded its declared growth envelope.
    #[error(
        "growth violation for `{name}` at t = {t}: |f(t)| = {value:e} > envelope {envelope:e}"
    )]
    Growth {
        name: String,
        t: f64,
        value: f64,
        envelope: f64,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(op: &'static str, reason: impl Into<String>) -> Error {
    Error::Domain {
        op,
        reason: reason.into(),
    }
}
