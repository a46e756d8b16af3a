//! Prior marginals of the effects `φ`, marginal likelihoods, predictive
//! scores and risk bounds, all with `μ = 0`, `σ² = 1`, `Z = 1`.
//!
//! Every integral over the local scale is taken in `u = ln γ`, where the
//! log-Cauchy densities are flat enough for adaptive quadrature to see their
//! tails.

mod figures;
mod phi;
mod predictive;
mod risk;

pub use figures::{log_spaced_counts, symmetric_log_grid, write_figure_csv, FigureRow};
pub use phi::{omega_integral, omega_integral_constant, phi_marginal, phi_marginal_by_log_scale, PhiMarginal};
pub use predictive::{log_marginal_likelihood, log_predictive_score, marginal_likelihood, predictive_score};
pub use risk::{kl_risk_bound, prior_interval_probability, theorem2_bound, RiskBoundCurve};

use crate::densities::{log_density_log_scale, PriorFamily};
use crate::error::Result;

/// Log density of `u = ln γ` as an infallible closure, after checking once
/// that the family has a closed form.
pub(crate) fn log_scale_density(family: PriorFamily) -> Result<impl Fn(f64) -> f64 + Copy> {
    log_density_log_scale(family, 0.0)?;
    Ok(move |u: f64| log_density_log_scale(family, u).unwrap_or(f64::NEG_INFINITY))
}
