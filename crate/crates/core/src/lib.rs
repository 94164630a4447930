//! Exact statistics for the κ-μ shadowed fading model with integer fading
//! parameters.
//!
//! With integer μ and m the κ-μ shadowed SNR is a finite mixture of Gamma
//! (squared Nakagami) distributions. This crate builds that mixture and uses
//! it to evaluate densities, distribution functions, MGFs, moments and ergodic
//! capacity in elementary functions, to draw exact samples, and to fit the
//! model to measured power samples. Independent series and quadrature
//! evaluators in [`oracle`] serve as ground truth for all of it.
//!
//! ```
//! use fadekit::model::{build_mixture, ShadowedParams};
//!
//! let params = ShadowedParams::new(1.0, 1.0, 1, 2).unwrap();
//! let model = build_mixture(&params).unwrap();
//! assert_eq!(model.components().len(), 2);
//! assert!((model.weight_sum() - 1.0).abs() < 1e-12);
//! let p = model.cdf(1.0).unwrap();
//! assert!(p > 0.0 && p < 1.0);
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod fitting;
pub mod metrics;
pub mod model;
pub mod numerics;
pub mod oracle;
pub mod sampling;
pub mod special;

pub use error::{Error, Result};
pub use model::{build_mixture, GammaComponent, MixtureModel, Regime, ShadowedParams};
