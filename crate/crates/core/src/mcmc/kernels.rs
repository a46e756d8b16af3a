use std::f64::consts::{LN_2, PI};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::slice::slice_sample;
use super::state::{FixedGlobals, GlobalPriors, ModelState};
use crate::densities::{ln_sin_pi_at_logit, PriorFamily};
use crate::error::{Error, Result};
use crate::special::{log_add_exp, log_gamma_variate, softplus, standard_normal};

/// Tuning and structural switches for [`gibbs_sweep`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub fixed: FixedGlobals,
    /// Initial bracket width for the slice updates (log or logit scale).
    pub slice_width: f64,
    /// Maximum number of bracket expansions per slice update.
    pub max_slice_steps: usize,
    /// When false the data are ignored and the sweep targets the prior.
    pub use_likelihood: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self { fixed: FixedGlobals::default(), slice_width: 2.0, max_slice_steps: 64, use_likelihood: true }
    }
}

/// Running totals kept across sweeps of one chain.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepCounters {
    pub sweeps: u64,
    pub slice_updates: u64,
    pub slice_evaluations: u64,
}

/// One systematic-scan Gibbs sweep: `φ_i` and the local hierarchy of each
/// observation in turn, then `μ`, `σ²` and `Z` unless pinned.
///
/// Conjugate blocks draw from exact Gamma or normal conditionals. The
/// decision parameter `p_i` (on the logit scale) and the HTHS+ local scale
/// `ln γ_i` are updated by slice sampling. The state is checked after the
/// sweep and a runaway parameter is reported as [`Error::Diverged`].
pub fn gibbs_sweep<R: Rng + ?Sized>(
    state: &mut ModelState,
    data: &[f64],
    priors: &GlobalPriors,
    options: &SweepOptions,
    counters: &mut SweepCounters,
    rng: &mut R,
) -> Result<()> {
    if data.len() != state.len() {
        return Err(Error::InvalidConfig(format!(
            "state holds {} observations but {} were supplied",
            state.len(),
            data.len()
        )));
    }
    let iteration = counters.sweeps as usize;
    for (i, &y) in data.iter().enumerate() {
        update_phi(state, i, y, options.use_likelihood, rng);
        update_locals(state, i, options, counters, rng).map_err(|e| match e {
            Error::Diverged { value, parameter, .. } => {
                Error::Diverged { iteration, parameter: format!("{parameter}[{i}]"), value }
            }
            other => other,
        })?;
    }
    update_globals(state, data, priors, options, rng);
    counters.sweeps += 1;
    state.check(iteration)
}

/// `φ_i | · ~ N((y_i-μ)/(1+γ_i Z), σ²/(1+γ_i Z))`, or the prior
/// `N(0, σ²/(γ_i Z))` when the likelihood is switched off.
fn update_phi<R: Rng + ?Sized>(state: &mut ModelState, i: usize, y: f64, use_likelihood: bool, rng: &mut R) {
    let ln_sigma2 = state.sigma2.ln();
    let noise = standard_normal(rng);
    if use_likelihood {
        let l = state.log_one_plus_gamma_z(i);
        let shrink = (-0.5 * l).exp();
        let centre = (y - state.mu) / state.sigma2.sqrt() * shrink;
        state.set_phi_from_parts(i, 0.5 * (ln_sigma2 - l), noise + centre);
    } else {
        let log_scale = 0.5 * (ln_sigma2 - state.log_gamma[i] - state.z.ln());
        state.set_phi_from_parts(i, log_scale, noise);
    }
}

fn update_locals<R: Rng + ?Sized>(
    state: &mut ModelState,
    i: usize,
    options: &SweepOptions,
    counters: &mut SweepCounters,
    rng: &mut R,
) -> Result<()> {
    // ln c with c = Z φ² / (2σ²), the rate contribution of φ_i to γ_i
    let ln_c = state.z.ln() + 2.0 * state.log_abs_phi[i] - state.sigma2.ln() - LN_2;
    let mut slice = |x0: f64, target: &dyn Fn(f64) -> f64, name: &str, rng: &mut R| -> Result<f64> {
        let draw =
            slice_sample(x0, target, options.slice_width, options.max_slice_steps, rng).map_err(|e| match e {
                Error::Diverged { value, .. } => Error::Diverged { iteration: 0, parameter: name.into(), value },
                other => other,
            })?;
        counters.slice_updates += 1;
        counters.slice_evaluations += draw.evaluations as u64;
        Ok(draw.value)
    };

    match state.family {
        PriorFamily::Hs => {
            state.log_gamma[i] = log_gamma_variate(1.0, rng) - log_add_exp(state.log_omega[i], ln_c);
            state.log_omega[i] = log_gamma_variate(1.0, rng) - softplus(state.log_gamma[i]);
        }
        PriorFamily::HsPlus => {
            state.log_gamma[i] = log_gamma_variate(1.0, rng) - log_add_exp(state.log_omega[i], ln_c);
            state.log_omega[i] = log_gamma_variate(1.0, rng) - log_add_exp(state.log_gamma[i], state.log_nu[i]);
            state.log_nu[i] = log_gamma_variate(1.0, rng) - log_add_exp(state.log_omega[i], state.log_kappa[i]);
            state.log_kappa[i] = log_gamma_variate(1.0, rng) - softplus(state.log_nu[i]);
        }
        PriorFamily::Hths | PriorFamily::HthsLambda => {
            let p = crate::special::sigmoid(state.logit_p[i]);
            state.log_gamma[i] = log_gamma_variate(p + 0.5, rng) - log_add_exp(state.log_omega[i], ln_c);
            state.log_omega[i] = log_gamma_variate(1.0, rng) - softplus(state.log_gamma[i]);

            let log_gamma = state.log_gamma[i];
            let lambda = state.lambda.get(i).copied().unwrap_or(1.0);
            let target = move |q: f64| log_decision_conditional(q, log_gamma, lambda);
            state.logit_p[i] = slice(state.logit_p[i], &target, "logit_p", rng)?;

            if state.family == PriorFamily::HthsLambda {
                let neg_ln_p = softplus(-state.logit_p[i]);
                state.lambda[i] = (log_gamma_variate(2.0, rng) - (state.xi[i] + neg_ln_p).ln()).exp();
                state.xi[i] = (log_gamma_variate(2.0, rng) - state.lambda[i].ln_1p()).exp();
            }
        }
        PriorFamily::HthsPlus => {
            let target = move |u: f64| log_hthsplus_conditional(u, ln_c);
            state.log_gamma[i] = slice(state.log_gamma[i], &target, "log_gamma", rng)?;
        }
    }
    Ok(())
}

/// Log conditional of `q = logit p` given `γ` and `λ`:
/// `sin(πp) γ^p p^{λ-1}` times the Jacobian `p(1-p)`.
pub(crate) fn log_decision_conditional(q: f64, log_gamma: f64, lambda: f64) -> f64 {
    let ln_p = -softplus(-q);
    let ln_one_minus_p = -softplus(q);
    ln_sin_pi_at_logit(q) + ln_p.exp() * log_gamma + lambda * ln_p + ln_one_minus_p
}

/// Log conditional of `u = ln γ` under HTHS+ given `ln c`, `c = Zφ²/(2σ²)`:
/// `2/(u²+4π²) · e^{u/2} · exp(-c e^u)`.
pub(crate) fn log_hthsplus_conditional(u: f64, ln_c: f64) -> f64 {
    -2.0 * u.hypot(2.0 * PI).ln() + 0.5 * u - (u + ln_c).exp()
}

fn update_globals<R: Rng + ?Sized>(
    state: &mut ModelState,
    data: &[f64],
    priors: &GlobalPriors,
    options: &SweepOptions,
    rng: &mut R,
) {
    let n = data.len() as f64;
    let fixed = &options.fixed;
    let inv_k = 1.0 / priors.mu_scale_multiplier;

    if fixed.mu.is_none() {
        let (mean, var) = if options.use_likelihood {
            let precision = n + inv_k;
            let total: f64 = data.iter().zip(&state.phi).map(|(y, phi)| y - phi).sum();
            ((total + priors.mu_mean * inv_k) / precision, state.sigma2 / precision)
        } else {
            (priors.mu_mean, state.sigma2 * priors.mu_scale_multiplier)
        };
        state.mu = mean + var.sqrt() * standard_normal(rng);
    }

    if fixed.sigma2.is_none() {
        let ln_z = state.z.ln();
        let mut shape = priors.sigma2_shape + 0.5 * n;
        let mut quad: f64 =
            (0..state.len()).map(|i| (state.log_gamma[i] + ln_z + 2.0 * state.log_abs_phi[i]).exp()).sum();
        if options.use_likelihood {
            shape += 0.5 * n;
            quad += data.iter().zip(&state.phi).map(|(y, phi)| (y - state.mu - phi).powi(2)).sum::<f64>();
        }
        if fixed.mu.is_none() {
            shape += 0.5;
            quad += (state.mu - priors.mu_mean).powi(2) * inv_k;
        }
        let rate = priors.sigma2_rate + 0.5 * quad;
        state.sigma2 = (rate.ln() - log_gamma_variate(shape, rng)).exp();
    }

    if fixed.z.is_none() {
        let ln_sigma2 = state.sigma2.ln();
        let quad: f64 =
            (0..state.len()).map(|i| (state.log_gamma[i] + 2.0 * state.log_abs_phi[i] - ln_sigma2).exp()).sum();
        let shape = priors.z_shape + 0.5 * n;
        let rate = priors.z_rate + 0.5 * quad;
        state.z = (log_gamma_variate(shape, rng) - rate.ln()).exp();
    }
}
