//! Posterior sampling for the normal-means model
//!
//! ```text
//! y_i | μ, σ², φ_i ~ N(μ + φ_i, σ²)
//! φ_i | γ_i, σ², Z ~ N(0, σ² / (γ_i Z))
//! γ_i              ~ local-scale prior of the chosen family
//! ```
//!
//! with `μ | σ² ~ N(m₀, k σ²)`, `σ² ~ InvGamma(a, b)` and `Z ~ Gamma(a_Z, b_Z)`.
//! Local scales are held on the log scale throughout: the log-Cauchy
//! families put visible posterior mass beyond `γ = 10^{±300}`.

mod chain;
mod kernels;
mod prior;
mod slice;
mod state;
mod store;

pub use chain::{
    rao_blackwell_shrinkage, run_chain, ChainConfig, ChainOutput, ParameterSummary, PosteriorSummary, ShrinkageEstimate,
};
pub use kernels::{gibbs_sweep, SweepCounters, SweepOptions};
pub use prior::{sample_prior_state, simulate_data};
pub use slice::slice_sample;
pub use state::{FixedGlobals, GlobalPriors, ModelState};
pub use store::{DrawStore, StoreHeader, STORE_MAGIC};
