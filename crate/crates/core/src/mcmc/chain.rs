use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::kernels::{gibbs_sweep, SweepCounters, SweepOptions};
use super::state::{FixedGlobals, GlobalPriors, ModelState};
use super::store::{DrawStore, StoreHeader};
use crate::densities::PriorFamily;
use crate::error::{Error, Result};
use crate::special::sigmoid;
use crate::stats::{effective_sample_size, mean, quantile_sorted, variance};

/// Length and seeding of one chain.
///
/// `iterations` counts every sweep including burn-in. Sweep `t` (1-based)
/// is retained when `t > burn_in` and `t - burn_in` is a multiple of
/// `thinning`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainConfig {
    pub iterations: usize,
    pub burn_in: usize,
    pub thinning: usize,
    pub seed: u64,
    pub slice_width: f64,
    pub fixed_globals: FixedGlobals,
    /// Keep `ln γ_i`, `p_i` and `λ_i` draws as well as `φ_i` and the globals.
    pub keep_locals: bool,
}

impl Default for ChainConfig {
    /// 5,000 burn-in sweeps followed by 10,000 draws kept at thinning 5.
    fn default() -> Self {
        Self::with_retained(5_000, 10_000, 5, 0)
    }
}

impl ChainConfig {
    /// Configuration that keeps exactly `retained` draws.
    pub fn with_retained(burn_in: usize, retained: usize, thinning: usize, seed: u64) -> Self {
        Self {
            iterations: burn_in + retained * thinning,
            burn_in,
            thinning,
            seed,
            slice_width: 2.0,
            fixed_globals: FixedGlobals::default(),
            keep_locals: true,
        }
    }

    pub fn retained(&self) -> usize {
        (self.iterations.saturating_sub(self.burn_in)) / self.thinning.max(1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.thinning == 0 {
            return Err(Error::InvalidConfig("thinning must be at least 1".into()));
        }
        if self.iterations <= self.burn_in {
            return Err(Error::InvalidConfig(format!(
                "iterations ({}) must exceed burn-in ({})",
                self.iterations, self.burn_in
            )));
        }
        if self.retained() == 0 {
            return Err(Error::InvalidConfig("configuration retains no draws".into()));
        }
        if !(self.slice_width > 0.0 && self.slice_width.is_finite()) {
            return Err(Error::InvalidConfig(format!("slice width must be positive, got {}", self.slice_width)));
        }
        self.fixed_globals.validate()
    }
}

/// Marginal posterior summary of one stored parameter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParameterSummary {
    pub name: String,
    pub mean: f64,
    /// Lower median of the retained draws.
    pub median: f64,
    pub q025: f64,
    pub q975: f64,
    /// Effective sample size, reported for `φ_i` and the free globals.
    pub ess: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PosteriorSummary {
    pub family: PriorFamily,
    pub n: usize,
    pub retained: usize,
    pub parameters: Vec<ParameterSummary>,
    pub counters: SweepCounters,
}

impl PosteriorSummary {
    pub fn get(&self, name: &str) -> Option<&ParameterSummary> {
        self.parameters.iter().find(|p| p.name == name)
    }

    /// Posterior medians of `φ_1, …, φ_n`.
    pub fn phi_medians(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(&format!("phi[{i}]")).map_or(f64::NAN, |p| p.median)).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChainOutput {
    pub summary: PosteriorSummary,
    pub store: DrawStore,
}

fn parameter_names(family: PriorFamily, n: usize, keep_locals: bool) -> Vec<String> {
    let mut names = vec!["mu".to_string(), "sigma2".to_string(), "z".to_string()];
    names.extend((0..n).map(|i| format!("phi[{i}]")));
    if keep_locals {
        names.extend((0..n).map(|i| format!("log_gamma[{i}]")));
        if family.has_decision_parameter() {
            names.extend((0..n).map(|i| format!("p[{i}]")));
        }
        if family == PriorFamily::HthsLambda {
            names.extend((0..n).map(|i| format!("lambda[{i}]")));
        }
    }
    names
}

fn record(state: &ModelState, keep_locals: bool, columns: &mut [Vec<f64>]) {
    let mut cols = columns.iter_mut();
    let mut push = |v: f64| cols.next().expect("column layout matches names").push(v);
    push(state.mu);
    push(state.sigma2);
    push(state.z);
    state.phi.iter().for_each(|&v| push(v));
    if keep_locals {
        state.log_gamma.iter().for_each(|&v| push(v));
        state.logit_p.iter().for_each(|&q| push(sigmoid(q)));
        state.lambda.iter().for_each(|&v| push(v));
    }
}

/// Run one seeded chain from the default starting point and summarize it.
///
/// A diverged sweep aborts the chain with [`Error::Diverged`] carrying the
/// sweep index.
pub fn run_chain(
    data: &[f64],
    family: PriorFamily,
    priors: &GlobalPriors,
    config: &ChainConfig,
) -> Result<ChainOutput> {
    priors.validate()?;
    config.validate()?;
    let mut state = ModelState::initial(data, family, &config.fixed_globals)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let options = SweepOptions { fixed: config.fixed_globals, slice_width: config.slice_width, ..Default::default() };
    let mut counters = SweepCounters::default();

    let names = parameter_names(family, data.len(), config.keep_locals);
    let retained = config.retained();
    let mut columns: Vec<Vec<f64>> = names.iter().map(|_| Vec::with_capacity(retained)).collect();
    for t in 1..=config.burn_in + retained * config.thinning {
        gibbs_sweep(&mut state, data, priors, &options, &mut counters, &mut rng)?;
        if t > config.burn_in && (t - config.burn_in).is_multiple_of(config.thinning) {
            record(&state, config.keep_locals, &mut columns);
        }
    }

    let header = StoreHeader {
        family,
        n: data.len(),
        draws: retained,
        parameters: names,
        seed: config.seed,
        config: *config,
        priors: *priors,
    };
    let store = DrawStore::new(header, columns)?;
    let summary = summarize(&store, counters);
    Ok(ChainOutput { summary, store })
}

fn summarize(store: &DrawStore, counters: SweepCounters) -> PosteriorSummary {
    let fixed = store.header().config.fixed_globals;
    let parameters = store
        .columns()
        .map(|(name, draws)| {
            let mut sorted = draws.to_vec();
            sorted.sort_by(f64::total_cmp);
            let pinned = matches!(
                (name, fixed.mu, fixed.sigma2, fixed.z),
                ("mu", Some(_), _, _) | ("sigma2", _, Some(_), _) | ("z", _, _, Some(_))
            );
            let wants_ess = !pinned && (name.starts_with("phi[") || matches!(name, "mu" | "sigma2" | "z"));
            ParameterSummary {
                name: name.to_string(),
                mean: mean(draws),
                median: quantile_sorted(&sorted, 0.5),
                q025: quantile_sorted(&sorted, 0.025),
                q975: quantile_sorted(&sorted, 0.975),
                ess: wants_ess.then(|| effective_sample_size(draws)),
            }
        })
        .collect();
    PosteriorSummary {
        family: store.header().family,
        n: store.header().n,
        retained: store.draws(),
        parameters,
        counters,
    }
}

/// Monte Carlo estimates behind the identity `E[φ_i | y] = (1 - E[τ_i | y]) y_i`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShrinkageEstimate {
    /// Average of `τ_i` over the retained draws.
    pub mean_tau: f64,
    pub tau_mc_se: f64,
    /// `(1 - mean_tau) y_i`.
    pub rao_blackwell_mean: f64,
    /// Average of the `φ_i` draws.
    pub direct_mean: f64,
    pub direct_mc_se: f64,
}

fn mc_standard_error(draws: &[f64]) -> f64 {
    if draws.len() < 2 {
        return f64::NAN;
    }
    (variance(draws) / effective_sample_size(draws)).sqrt()
}

/// Shrinkage weights `E[τ_i | y]` from a chain run with `μ = 0`, `σ² = 1`,
/// `Z = 1` pinned.
///
/// Refuses draws produced with free or differently pinned globals, where
/// the identity no longer holds, and draws stored without local scales.
pub fn rao_blackwell_shrinkage(store: &DrawStore, data: &[f64]) -> Result<Vec<ShrinkageEstimate>> {
    let header = store.header();
    if !header.config.fixed_globals.is_standard() {
        return Err(Error::InvalidConfig(format!(
            "shrinkage identity needs mu=0, sigma2=1, z=1 pinned; chain used '{}'",
            header.config.fixed_globals
        )));
    }
    if data.len() != header.n {
        return Err(Error::InvalidConfig(format!("store holds {} observations, data has {}", header.n, data.len())));
    }
    data.iter()
        .enumerate()
        .map(|(i, &y)| {
            let log_gamma = store
                .log_gamma(i)
                .ok_or_else(|| Error::InvalidConfig("draw store was written without local scales".into()))?;
            let phi = store.phi(i).ok_or_else(|| Error::Format(format!("missing phi[{i}] column")))?;
            let taus: Vec<f64> = log_gamma.iter().map(|&u| sigmoid(u)).collect();
            let mean_tau = mean(&taus);
            Ok(ShrinkageEstimate {
                mean_tau,
                tau_mc_se: mc_standard_error(&taus),
                rao_blackwell_mean: (1.0 - mean_tau) * y,
                direct_mean: mean(phi),
                direct_mc_se: mc_standard_error(phi),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pinned(burn_in: usize, retained: usize, seed: u64) -> ChainConfig {
        ChainConfig {
            fixed_globals: FixedGlobals::standard(),
            ..ChainConfig::with_retained(burn_in, retained, 2, seed)
        }
    }

    #[test]
    fn config_arithmetic_and_validation() {
        let c = ChainConfig::default();
        assert_eq!((c.iterations, c.retained()), (55_000, 10_000));
        c.validate().unwrap();
        assert!(ChainConfig { thinning: 0, ..c }.validate().is_err());
        assert!(ChainConfig { iterations: 5_000, ..c }.validate().is_err());
        assert!(ChainConfig { iterations: 5_003, ..c }.validate().is_err());
        assert!(ChainConfig { slice_width: -1.0, ..c }.validate().is_err());
    }

    #[test]
    fn identical_configs_give_identical_draws() {
        let data = [0.3, -2.0, 5.0];
        for family in PriorFamily::ALL {
            let config = ChainConfig::with_retained(50, 100, 3, 77);
            let a = run_chain(&data, family, &GlobalPriors::default(), &config).unwrap();
            let b = run_chain(&data, family, &GlobalPriors::default(), &config).unwrap();
            assert_eq!(a, b, "{family}");
            let c = run_chain(&data, family, &GlobalPriors::default(), &ChainConfig { seed: 78, ..config }).unwrap();
            assert_ne!(a.store, c.store);
        }
    }

    #[test]
    fn summary_invariants() {
        let data = [0.1, 4.0, -0.5, 0.0];
        let out = run_chain(
            &data,
            PriorFamily::HthsLambda,
            &GlobalPriors::default(),
            &ChainConfig::with_retained(200, 500, 2, 1),
        )
        .unwrap();
        assert_eq!(out.summary.retained, 500);
        assert_eq!(out.store.parameters().len(), 3 + 4 * 4);
        for p in &out.summary.parameters {
            assert!(p.q025 <= p.median && p.median <= p.q975, "{}", p.name);
            if let Some(ess) = p.ess {
                assert!(ess > 0.0 && ess <= 500.0, "{} {ess}", p.name);
            }
        }
        assert!(out.summary.get("phi[1]").unwrap().ess.is_some());
        assert!(out.summary.get("log_gamma[1]").unwrap().ess.is_none());
        assert_eq!(out.summary.phi_medians().len(), 4);
        assert!(out.summary.counters.slice_updates > 0);
        assert_eq!(out.summary.counters.sweeps, 1_200);
    }

    #[test]
    fn null_observation_is_shrunk() {
        let out = run_chain(&[0.0], PriorFamily::Hths, &GlobalPriors::default(), &pinned(1_000, 20_000, 5)).unwrap();
        let mut abs: Vec<f64> = out.store.phi(0).unwrap().iter().map(|v| v.abs()).collect();
        abs.sort_by(f64::total_cmp);
        // median |φ| is 0.6745 when φ | y ~ N(0, 1)
        assert!(quantile_sorted(&abs, 0.5) < 0.6745);
        let rb = rao_blackwell_shrinkage(&out.store, &[0.0]).unwrap();
        assert!(rb[0].mean_tau > 0.5, "{rb:?}");
        assert_eq!(rb[0].rao_blackwell_mean, 0.0);
    }

    #[test]
    fn large_signal_escapes_shrinkage() {
        let out = run_chain(&[20.0], PriorFamily::Hths, &GlobalPriors::default(), &pinned(1_000, 10_000, 6)).unwrap();
        let median = out.summary.get("phi[0]").unwrap().median;
        assert!(median > 18.0 && median < 20.0, "{median}");
    }

    #[test]
    fn shrinkage_needs_standard_pins() {
        let data = [1.0];
        let free =
            run_chain(&data, PriorFamily::Hs, &GlobalPriors::default(), &ChainConfig::with_retained(10, 10, 1, 0))
                .unwrap();
        assert!(rao_blackwell_shrinkage(&free.store, &data).is_err());
        let slim = ChainConfig { keep_locals: false, ..pinned(10, 10, 0) };
        let slim = run_chain(&data, PriorFamily::Hs, &GlobalPriors::default(), &slim).unwrap();
        assert!(rao_blackwell_shrinkage(&slim.store, &data).is_err());
        let ok = run_chain(&data, PriorFamily::Hs, &GlobalPriors::default(), &pinned(10, 10, 0)).unwrap();
        assert!(rao_blackwell_shrinkage(&ok.store, &[1.0, 2.0]).is_err());
        assert!(rao_blackwell_shrinkage(&ok.store, &data).is_ok());
    }
}
