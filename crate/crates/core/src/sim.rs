//! Simulation study on sparse normal means. Data come from a
//! spike-and-uniform mixture; every prior family is fitted by MCMC and
//! compared with the maximum-likelihood and oracle estimators.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::densities::PriorFamily;
use crate::error::{Error, Result};
use crate::mcmc::{run_chain, ChainConfig, GlobalPriors};
use crate::special::standard_normal;
use crate::stats::{mean, variance};

/// One cell of the study together with its chain settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationDesign {
    pub n: usize,
    /// Probability that an effect is non-zero.
    pub eta: f64,
    pub mu_true: f64,
    pub replicates: usize,
    pub seed: u64,
    /// Chain settings shared by every model; the seed field is replaced by a
    /// per-replicate, per-model derived seed.
    pub chain: ChainConfig,
    pub priors: GlobalPriors,
    pub families: Vec<PriorFamily>,
}

impl SimulationDesign {
    /// Quick configuration: 5 replicates, 1,000 burn-in sweeps, 2,000 draws
    /// kept at thinning 2.
    pub fn desk_scale(eta: f64, seed: u64) -> Self {
        Self {
            n: 400,
            eta,
            mu_true: 0.0,
            replicates: 5,
            seed,
            chain: ChainConfig { keep_locals: false, ..ChainConfig::with_retained(1_000, 2_000, 2, 0) },
            priors: GlobalPriors::default(),
            families: PriorFamily::ALL.to_vec(),
        }
    }

    /// Full configuration: 20 replicates with the default chain length.
    pub fn paper_scale(eta: f64, seed: u64) -> Self {
        Self {
            replicates: 20,
            chain: ChainConfig { keep_locals: false, ..ChainConfig::default() },
            ..Self::desk_scale(eta, seed)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return Err(Error::InvalidConfig(format!("eta must lie in (0, 1), got {}", self.eta)));
        }
        if self.n == 0 || self.replicates == 0 {
            return Err(Error::InvalidConfig("n and replicates must be at least 1".into()));
        }
        if !self.mu_true.is_finite() {
            return Err(Error::InvalidConfig("mu_true must be finite".into()));
        }
        self.priors.validate()?;
        self.chain.validate()
    }
}

/// Mixes `(master, replicate, stream)` into an independent 64-bit seed.
pub fn derive_seed(master: u64, replicate: u64, stream: u64) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    mix(mix(mix(master) ^ replicate) ^ stream.wrapping_mul(0xD6E8_FEB8_6659_FD93))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulatedData {
    pub y: Vec<f64>,
    pub phi_true: Vec<f64>,
}

/// Draw `φ_i` from `η/2 U(4, 6) + η/2 U(-6, -4) + (1-η) δ₀` and
/// `y_i = μ_T + φ_i + N(0, 1)`.
pub fn generate_data<R: Rng + ?Sized>(design: &SimulationDesign, rng: &mut R) -> Result<SimulatedData> {
    design.validate()?;
    let mut y = Vec::with_capacity(design.n);
    let mut phi_true = Vec::with_capacity(design.n);
    for _ in 0..design.n {
        let branch: f64 = rng.random();
        let magnitude = 4.0 + 2.0 * rng.random::<f64>();
        let phi = if branch < 0.5 * design.eta {
            magnitude
        } else if branch < design.eta {
            -magnitude
        } else {
            0.0
        };
        phi_true.push(phi);
        y.push(design.mu_true + phi + standard_normal(rng));
    }
    Ok(SimulatedData { y, phi_true })
}

/// Oracle estimator: `y_i - μ_T` where `φ_i ≠ 0`, exactly 0 elsewhere.
pub fn oracle_estimate(y: &[f64], phi_true: &[f64], mu_true: f64) -> Result<Vec<f64>> {
    if y.len() != phi_true.len() {
        return Err(Error::InvalidConfig(format!("{} observations but {} effects", y.len(), phi_true.len())));
    }
    Ok(y.iter().zip(phi_true).map(|(&y, &phi)| if phi != 0.0 { y - mu_true } else { 0.0 }).collect())
}

/// `Σ |a_i - b_i|`.
pub fn total_absolute_error(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Estimator compared in the study.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Model {
    /// `φ̂_i = y_i - ȳ`.
    Mle,
    Bayes(PriorFamily),
}

impl Model {
    pub fn label(self) -> &'static str {
        match self {
            Model::Mle => "M.L.E.",
            Model::Bayes(f) => f.label(),
        }
    }
}

/// Metrics of one model on one replicate data set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplicateRow {
    pub replicate: usize,
    pub model: Model,
    pub seed: u64,
    /// `Σ |φ̂_i - φ_i|`; NaN when the chain diverged.
    pub mae: f64,
    /// `Σ |φ̂_i - φ̂_i^{oracle}|`; NaN when the chain diverged.
    pub oracle_distance: f64,
    /// `Σ |φ̂_i^{oracle} - φ_i|` for the replicate's data.
    pub oracle_error: f64,
    pub nonzero: usize,
    pub diverged: Option<String>,
}

/// Replicate averages with Monte Carlo standard errors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub model: Model,
    pub mae: f64,
    pub mae_se: f64,
    pub oracle_distance: f64,
    pub oracle_distance_se: f64,
    pub replicates: usize,
    pub diverged: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub design: SimulationDesign,
    pub summaries: Vec<ModelSummary>,
    pub rows: Vec<ReplicateRow>,
}

impl SimulationReport {
    pub fn summary(&self, model: Model) -> Option<&ModelSummary> {
        self.summaries.iter().find(|s| s.model == model)
    }
}

fn mean_and_se(values: &[f64]) -> (f64, f64) {
    match values.len() {
        0 => (f64::NAN, f64::NAN),
        1 => (values[0], f64::NAN),
        k => (mean(values), (variance(values) / k as f64).sqrt()),
    }
}

fn run_replicate(design: &SimulationDesign, replicate: usize) -> Result<Vec<ReplicateRow>> {
    let data_seed = derive_seed(design.seed, replicate as u64, 0);
    let mut rng = ChaCha8Rng::seed_from_u64(data_seed);
    let data = generate_data(design, &mut rng)?;
    let oracle = oracle_estimate(&data.y, &data.phi_true, design.mu_true)?;
    let oracle_error = total_absolute_error(&oracle, &data.phi_true);
    let nonzero = data.phi_true.iter().filter(|&&p| p != 0.0).count();
    let row = |model, seed, estimate: std::result::Result<Vec<f64>, String>| {
        let (mae, oracle_distance, diverged) = match estimate {
            Ok(est) => (total_absolute_error(&est, &data.phi_true), total_absolute_error(&est, &oracle), None),
            Err(msg) => (f64::NAN, f64::NAN, Some(msg)),
        };
        ReplicateRow { replicate, model, seed, mae, oracle_distance, oracle_error, nonzero, diverged }
    };

    let y_bar = mean(&data.y);
    let mut rows = vec![row(Model::Mle, data_seed, Ok(data.y.iter().map(|y| y - y_bar).collect()))];
    for (k, &family) in design.families.iter().enumerate() {
        let seed = derive_seed(design.seed, replicate as u64, 1 + k as u64);
        let config = ChainConfig { seed, ..design.chain };
        let estimate = match run_chain(&data.y, family, &design.priors, &config) {
            Ok(out) => Ok(out.summary.phi_medians()),
            Err(e @ Error::Diverged { .. }) => Err(e.to_string()),
            Err(e) => return Err(e),
        };
        rows.push(row(Model::Bayes(family), seed, estimate));
    }
    Ok(rows)
}

/// Run every replicate (in parallel) and aggregate in replicate order.
///
/// A diverged chain is kept as a flagged row and left out of its model's
/// averages; any other failure aborts the study.
pub fn evaluate_models(design: &SimulationDesign) -> Result<SimulationReport> {
    design.validate()?;
    let per_replicate =
        (0..design.replicates).into_par_iter().map(|r| run_replicate(design, r)).collect::<Result<Vec<_>>>()?;
    let rows: Vec<ReplicateRow> = per_replicate.into_iter().flatten().collect();

    let models = std::iter::once(Model::Mle).chain(design.families.iter().map(|&f| Model::Bayes(f)));
    let summaries = models
        .map(|model| {
            let ok: Vec<&ReplicateRow> = rows.iter().filter(|r| r.model == model && r.diverged.is_none()).collect();
            let maes: Vec<f64> = ok.iter().map(|r| r.mae).collect();
            let oras: Vec<f64> = ok.iter().map(|r| r.oracle_distance).collect();
            let (mae, mae_se) = mean_and_se(&maes);
            let (oracle_distance, oracle_distance_se) = mean_and_se(&oras);
            ModelSummary {
                model,
                mae,
                mae_se,
                oracle_distance,
                oracle_distance_se,
                replicates: ok.len(),
                diverged: rows.iter().filter(|r| r.model == model && r.diverged.is_some()).count(),
            }
        })
        .collect();
    Ok(SimulationReport { design: design.clone(), summaries, rows })
}

/// Aligned text table with one `M.A.E. / Ora.` column pair per report.
pub fn render_table(reports: &[SimulationReport]) -> String {
    let mut out = String::new();
    let _ = write!(out, "{:<12}", "");
    for r in reports {
        let _ = write!(out, " | {:^17}", format!("eta={}", r.design.eta));
    }
    out.push('\n');
    let _ = write!(out, "{:<12}", "");
    for _ in reports {
        let _ = write!(out, " | {:>8} {:>8}", "M.A.E.", "Ora.");
    }
    out.push('\n');
    let Some(first) = reports.first() else { return out };
    for s in &first.summaries {
        let _ = write!(out, "{:<12}", s.model.label());
        for r in reports {
            match r.summary(s.model) {
                Some(c) => {
                    let _ = write!(out, " | {:>8.1} {:>8.1}", c.mae, c.oracle_distance);
                }
                None => {
                    let _ = write!(out, " | {:>8} {:>8}", "-", "-");
                }
            }
        }
        let flagged: usize = reports.iter().filter_map(|r| r.summary(s.model)).map(|c| c.diverged).sum();
        if flagged > 0 {
            let _ = write!(out, "  ({flagged} diverged)");
        }
        out.push('\n');
    }
    out
}
