//! Heavy-tailed horseshoe shrinkage priors for the sparse normal-means problem.
//!
//! The crate is organised by subsystem:
//!
//! * [`special`]: special functions, adaptive quadrature and gamma variates.
//! * [`densities`]: closed-form prior densities of the local scale `γ`, the
//!   shrinkage profile `τ = γ/(1+γ)` and the decision parameter `p`.
//! * [`mcmc`]: Gibbs/slice posterior sampler for all five prior families.
//! * [`marginals`]: prior marginals of `φ` and `y`, with the risk bounds
//!   built on them.
//! * [`sim`]: the sparse-signal benchmark harness.
//! * [`cli`]: command-line front end used by the `hths` binary.

// Range checks are written as `!(x > 0.0)` on purpose so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod densities;
pub mod error;
pub mod marginals;
pub mod mcmc;
pub mod sim;
pub mod special;
pub mod stats;

pub use densities::PriorFamily;
pub use error::{Error, Result};
