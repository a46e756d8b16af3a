//! Helpers shared by the integration test binaries.
#![allow(dead_code)]

use hths::mcmc::{
    gibbs_sweep, sample_prior_state, simulate_data, GlobalPriors, ModelState, SweepCounters, SweepOptions,
};
use hths::stats::{ks_two_sample, KsResult};
use hths::PriorFamily;
use rand::Rng;

/// Proper, moderately informative global priors for simulation-based
/// checks, so prior draws of `μ`, `σ²` and `Z` stay in a sane range.
pub fn simulation_priors() -> GlobalPriors {
    GlobalPriors {
        mu_mean: 0.0,
        mu_scale_multiplier: 1.0,
        sigma2_shape: 3.0,
        sigma2_rate: 2.0,
        z_shape: 2.0,
        z_rate: 2.0,
    }
}

/// Largest effect magnitude kept in simulation checks. The heavy-tailed
/// priors draw `|φ|` far beyond this, where `y - φ` loses all precision in
/// `f64` and the μ and σ² updates become meaningless.
pub const EFFECT_LIMIT: f64 = 1e6;

pub fn in_range(state: &ModelState) -> bool {
    state.check(0).is_ok() && state.phi().iter().all(|phi| phi.abs() <= EFFECT_LIMIT)
}

fn prior_draw<R: Rng>(
    n: usize,
    family: PriorFamily,
    priors: &GlobalPriors,
    options: &SweepOptions,
    rng: &mut R,
) -> ModelState {
    loop {
        let s = sample_prior_state(n, family, priors, &options.fixed, rng).unwrap();
        if in_range(&s) {
            return s;
        }
    }
}

/// The margins compared by the simulation checks, read off observation 0.
#[derive(Default)]
pub struct Margins {
    pub log_gamma: Vec<f64>,
    pub tau: Vec<f64>,
    pub phi: Vec<f64>,
    pub p: Vec<f64>,
    pub mu: Vec<f64>,
    pub sigma2: Vec<f64>,
    pub z: Vec<f64>,
}

impl Margins {
    fn push(&mut self, s: &ModelState) {
        self.log_gamma.push(s.log_gamma()[0]);
        self.tau.push(s.tau(0));
        self.phi.push(s.phi()[0]);
        if let Some(p) = s.p(0) {
            self.p.push(p);
        }
        self.mu.push(s.mu());
        self.sigma2.push(s.sigma2());
        self.z.push(s.z());
    }
}

/// Draws from the joint prior, restricted to representable states.
pub fn marginal_conditional<R: Rng>(
    draws: usize,
    n: usize,
    family: PriorFamily,
    priors: &GlobalPriors,
    options: &SweepOptions,
    rng: &mut R,
) -> Margins {
    let mut m = Margins::default();
    for _ in 0..draws {
        m.push(&prior_draw(n, family, priors, options, rng));
    }
    m
}

/// Independent successive-conditional runs: start each from a prior draw,
/// then alternate `steps` Gibbs sweeps with fresh data draws and keep the
/// final state. With the likelihood switched off no data are drawn.
/// A run that leaves the representable range is discarded and restarted.
pub fn successive_conditional<R: Rng>(
    draws: usize,
    steps: usize,
    n: usize,
    family: PriorFamily,
    priors: &GlobalPriors,
    options: &SweepOptions,
    rng: &mut R,
) -> (Margins, usize) {
    let mut m = Margins::default();
    let mut restarts = 0;
    let mut counters = SweepCounters::default();
    'outer: while m.tau.len() < draws {
        let mut state = prior_draw(n, family, priors, options, rng);
        let mut data = if options.use_likelihood { simulate_data(&state, rng) } else { vec![0.0; n] };
        for _ in 0..steps {
            if gibbs_sweep(&mut state, &data, priors, options, &mut counters, rng).is_err() || !in_range(&state) {
                restarts += 1;
                continue 'outer;
            }
            if options.use_likelihood {
                data = simulate_data(&state, rng);
            }
        }
        m.push(&state);
    }
    (m, restarts)
}

pub fn compare(a: &[f64], b: &[f64]) -> Option<KsResult> {
    (!a.is_empty() && !b.is_empty()).then(|| ks_two_sample(a, b))
}
