use rand::Rng;

use super::state::{FixedGlobals, GlobalPriors, ModelState};
use crate::densities::{log_gamma_quantile, sample_gamma_hierarchy, uniform_interior, PriorFamily};
use crate::error::Result;
use crate::special::{log_gamma_variate, log_gamma_variate_log_shape, standard_normal};

/// Draw a complete parameter configuration from the joint prior, with the
/// pinned globals held at their values.
///
/// The heaviest families put real prior mass on scales that `f64` cannot
/// hold (under HTHS_λ roughly one draw in seven has `ln γ < -1400`, so `φ`
/// overflows). Such draws are returned as they are; call
/// [`ModelState::check`] to screen them.
pub fn sample_prior_state<R: Rng + ?Sized>(
    n: usize,
    family: PriorFamily,
    priors: &GlobalPriors,
    fixed: &FixedGlobals,
    rng: &mut R,
) -> Result<ModelState> {
    priors.validate()?;
    fixed.validate()?;
    let mut state = ModelState::empty(family, n);
    state.sigma2 = match fixed.sigma2 {
        Some(v) => v,
        None => (priors.sigma2_rate.ln() - log_gamma_variate(priors.sigma2_shape, rng)).exp(),
    };
    state.mu = match fixed.mu {
        Some(v) => v,
        None => priors.mu_mean + (priors.mu_scale_multiplier * state.sigma2).sqrt() * standard_normal(rng),
    };
    state.z = match fixed.z {
        Some(v) => v,
        None => (log_gamma_variate(priors.z_shape, rng) - priors.z_rate.ln()).exp(),
    };

    for i in 0..n {
        match family {
            PriorFamily::Hs | PriorFamily::Hths => {
                let draw = sample_gamma_hierarchy(family, rng)?;
                state.log_gamma[i] = draw.log_gamma;
                state.log_omega[i] = draw.log_omega;
                if family == PriorFamily::Hths {
                    state.logit_p[i] = draw.p.ln() - (-draw.p).ln_1p();
                }
            }
            PriorFamily::HsPlus => {
                state.log_kappa[i] = log_gamma_variate(0.5, rng);
                state.log_nu[i] = log_gamma_variate(0.5, rng) - state.log_kappa[i];
                state.log_omega[i] = log_gamma_variate(0.5, rng) - state.log_nu[i];
                state.log_gamma[i] = log_gamma_variate(0.5, rng) - state.log_omega[i];
            }
            PriorFamily::HthsPlus => {
                state.log_gamma[i] = log_gamma_quantile(family, uniform_interior(rng))?;
            }
            PriorFamily::HthsLambda => {
                let xi = log_gamma_variate(1.0, rng).exp();
                let lambda = (log_gamma_variate(1.0, rng) - xi.ln()).exp();
                // p = U^{1/λ} ~ Beta(λ, 1); p itself can underflow, so both
                // Gamma shapes are passed as logarithms
                let ln_p = uniform_interior(rng).ln() / lambda;
                let ln_one_minus_p = (-ln_p.exp_m1()).ln();
                state.xi[i] = xi;
                state.lambda[i] = lambda;
                state.logit_p[i] = ln_p - ln_one_minus_p;
                state.log_omega[i] = log_gamma_variate_log_shape(ln_one_minus_p, rng);
                state.log_gamma[i] = log_gamma_variate_log_shape(ln_p, rng) - state.log_omega[i];
            }
        }
        let log_scale = 0.5 * (state.sigma2.ln() - state.log_gamma[i] - state.z.ln());
        state.set_phi_from_parts(i, log_scale, standard_normal(rng));
    }
    Ok(state)
}

/// Draw `y_i ~ N(μ + φ_i, σ²)` given a parameter configuration.
pub fn simulate_data<R: Rng + ?Sized>(state: &ModelState, rng: &mut R) -> Vec<f64> {
    let sigma = state.sigma2.sqrt();
    state.phi.iter().map(|phi| state.mu + phi + sigma * standard_normal(rng)).collect()
}
