//! Kantorovich-Stancu variants of the discrete q-Beta operators.
//!
//! The crate is layered:
//!
//! * [`qcore`]: q-integers, q-factorials, q-Beta and Jackson q-integrals;
//! * [`function`]: target functions with a declared growth class;
//! * [`operators`]: the discrete, Kantorovich and Kantorovich-Stancu operators;
//! * [`moments`]: closed-form and series moments;
//! * [`moduli`]: grid estimators for moduli of smoothness;
//! * [`harness`]: experiment runners and their CSV output, driven by the
//!   `qkantorovich` binary.
//!
//! ```
//! use qkantorovich::function::TargetFunction;
//! use qkantorovich::operators::{kantorovich_stancu_apply, OperatorSpec, StancuParams};
//! use qkantorovich::qcore::QContext;
//!
//! let spec = OperatorSpec::new(50, QContext::new(0.99)?)?
//!     .with_stancu(StancuParams::new(0.0, 1.0)?);
//! let f = TargetFunction::monomial(2);
//! let err = (kantorovich_stancu_apply(&f, &spec, 0.5)? - 0.25).abs();
//! assert!(err < 0.05);
//! # Ok::<(), qkantorovich::Error>(())
//! ```

pub mod error;
pub mod function;
pub mod harness;
pub mod moduli;
pub mod moments;
pub mod operators;
pub mod qcore;

pub use error::{Error, Result};

// The guide's code blocks run as doc-tests, one module per chapter.
#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/q-calculus.md")]
    mod q_calculus {}
    #[doc = include_str!("../../../book/src/operators.md")]
    mod operators {}
    #[doc = include_str!("../../../book/src/moments.md")]
    mod moments {}
    #[doc = include_str!("../../../book/src/moduli.md")]
    mod moduli {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
