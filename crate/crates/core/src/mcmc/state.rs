use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::densities::PriorFamily;
use crate::error::{Error, Result};
use crate::special::{sigmoid, softplus};
use crate::stats::lower_median;

/// Priors on the global parameters `μ`, `σ²` and `Z`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlobalPriors {
    pub mu_mean: f64,
    /// Prior variance of `μ` is this multiple of `σ²`.
    pub mu_scale_multiplier: f64,
    pub sigma2_shape: f64,
    pub sigma2_rate: f64,
    pub z_shape: f64,
    pub z_rate: f64,
}

impl Default for GlobalPriors {
    fn default() -> Self {
        Self {
            mu_mean: 0.0,
            mu_scale_multiplier: 100.0,
            sigma2_shape: 0.001,
            sigma2_rate: 0.001,
            z_shape: 0.5,
            z_rate: 0.5,
        }
    }
}

impl GlobalPriors {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("mu_scale_multiplier", self.mu_scale_multiplier),
            ("sigma2_shape", self.sigma2_shape),
            ("sigma2_rate", self.sigma2_rate),
            ("z_shape", self.z_shape),
            ("z_rate", self.z_rate),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        if !self.mu_mean.is_finite() {
            return Err(Error::InvalidConfig("mu_mean must be finite".into()));
        }
        Ok(())
    }
}

/// Global parameters held constant during sampling.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FixedGlobals {
    pub mu: Option<f64>,
    pub sigma2: Option<f64>,
    pub z: Option<f64>,
}

impl FixedGlobals {
    pub fn all(mu: f64, sigma2: f64, z: f64) -> Self {
        Self { mu: Some(mu), sigma2: Some(sigma2), z: Some(z) }
    }

    /// `μ = 0, σ² = 1, Z = 1`.
    pub fn standard() -> Self {
        Self::all(0.0, 1.0, 1.0)
    }

    pub fn is_standard(&self) -> bool {
        *self == Self::standard()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_none() && self.sigma2.is_none() && self.z.is_none()
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(mu) = self.mu {
            if !mu.is_finite() {
                return Err(Error::InvalidConfig(format!("fixed mu must be finite, got {mu}")));
            }
        }
        for (name, v) in [("sigma2", self.sigma2), ("z", self.z)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::InvalidConfig(format!("fixed {name} must be positive, got {v}")));
                }
            }
        }
        Ok(())
    }
}

impl FromStr for FixedGlobals {
    type Err = Error;

    /// Parses `mu=0,sigma2=1,z=1` (any subset, any order).
    fn from_str(s: &str) -> Result<Self> {
        let mut fixed = FixedGlobals::default();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) =
                part.split_once('=').ok_or_else(|| Error::InvalidConfig(format!("expected key=value in '{part}'")))?;
            let value: f64 =
                value.trim().parse().map_err(|_| Error::InvalidConfig(format!("invalid number in '{part}'")))?;
            match key.trim() {
                "mu" => fixed.mu = Some(value),
                "sigma2" => fixed.sigma2 = Some(value),
                "z" => fixed.z = Some(value),
                other => return Err(Error::InvalidConfig(format!("unknown global '{other}'"))),
            }
        }
        fixed.validate()?;
        Ok(fixed)
    }
}

impl fmt::Display for FixedGlobals {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if let Some(v) = self.mu {
            parts.push(format!("mu={v:?}"));
        }
        if let Some(v) = self.sigma2 {
            parts.push(format!("sigma2={v:?}"));
        }
        if let Some(v) = self.z {
            parts.push(format!("z={v:?}"));
        }
        f.write_str(&parts.join(","))
    }
}

/// One full configuration of the model parameters.
///
/// Local scales are stored as logarithms. `φ_i` is kept both as a value and
/// as `ln|φ_i|`, because the conditionals of the scales only need
/// `γ_i φ_i²`, which stays O(1) even when `φ_i` itself underflows.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelState {
    pub(crate) family: PriorFamily,
    pub(crate) mu: f64,
    pub(crate) sigma2: f64,
    pub(crate) z: f64,
    pub(crate) phi: Vec<f64>,
    pub(crate) log_abs_phi: Vec<f64>,
    pub(crate) log_gamma: Vec<f64>,
    /// HS, HS+, HTHS, HTHS_λ.
    pub(crate) log_omega: Vec<f64>,
    /// logit of the decision parameter (HTHS, HTHS_λ).
    pub(crate) logit_p: Vec<f64>,
    /// HTHS_λ.
    pub(crate) lambda: Vec<f64>,
    pub(crate) xi: Vec<f64>,
    /// HS+ upper Gamma layers.
    pub(crate) log_nu: Vec<f64>,
    pub(crate) log_kappa: Vec<f64>,
}

impl ModelState {
    pub(crate) fn empty(family: PriorFamily, n: usize) -> Self {
        let per_obs = |on: bool, v: f64| if on { vec![v; n] } else { Vec::new() };
        Self {
            family,
            mu: 0.0,
            sigma2: 1.0,
            z: 1.0,
            phi: vec![0.0; n],
            log_abs_phi: vec![f64::NEG_INFINITY; n],
            log_gamma: vec![0.0; n],
            log_omega: per_obs(family != PriorFamily::HthsPlus, 0.0),
            logit_p: per_obs(family.has_decision_parameter(), 0.0),
            lambda: per_obs(family == PriorFamily::HthsLambda, 1.0),
            xi: per_obs(family == PriorFamily::HthsLambda, 1.0),
            log_nu: per_obs(family == PriorFamily::HsPlus, 0.0),
            log_kappa: per_obs(family == PriorFamily::HsPlus, 0.0),
        }
    }

    /// Starting point for a chain: `μ` at the sample median, `σ²` at the
    /// squared normal-consistent MAD (1 when the MAD vanishes), `Z = 1`,
    /// `φ = 0`, `γ = ω = 1`, `p = 1/2`, `λ = ξ = 1`; pinned globals override.
    pub fn initial(data: &[f64], family: PriorFamily, fixed: &FixedGlobals) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::InvalidConfig("need at least one observation".into()));
        }
        if let Some(bad) = data.iter().find(|y| !y.is_finite()) {
            return Err(Error::InvalidConfig(format!("observation {bad} is not finite")));
        }
        let mut state = Self::empty(family, data.len());
        let median = lower_median(data);
        let deviations: Vec<f64> = data.iter().map(|y| (y - median).abs()).collect();
        let mad = 1.4826 * lower_median(&deviations);
        state.mu = fixed.mu.unwrap_or(median);
        state.sigma2 = fixed.sigma2.unwrap_or(if mad > 0.0 { mad * mad } else { 1.0 });
        state.z = fixed.z.unwrap_or(1.0);
        Ok(state)
    }

    pub fn family(&self) -> PriorFamily {
        self.family
    }

    pub fn len(&self) -> usize {
        self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi.is_empty()
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn log_gamma(&self) -> &[f64] {
        &self.log_gamma
    }

    pub fn gamma(&self, i: usize) -> f64 {
        self.log_gamma[i].exp()
    }

    /// `τ_i = γ_i/(1+γ_i)`.
    pub fn tau(&self, i: usize) -> f64 {
        sigmoid(self.log_gamma[i])
    }

    pub fn log_omega(&self) -> &[f64] {
        &self.log_omega
    }

    /// Decision parameter `p_i`, for the families that carry one.
    pub fn p(&self, i: usize) -> Option<f64> {
        self.logit_p.get(i).map(|&q| sigmoid(q))
    }

    pub fn logit_p(&self) -> &[f64] {
        &self.logit_p
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    /// HS+ auxiliary layers `(ln ν, ln κ)`.
    pub fn hsplus_aux(&self) -> (&[f64], &[f64]) {
        (&self.log_nu, &self.log_kappa)
    }

    pub(crate) fn set_phi_from_parts(&mut self, i: usize, log_scale: f64, standardized: f64) {
        self.phi[i] = log_scale.exp() * standardized;
        self.log_abs_phi[i] = log_scale + standardized.abs().ln();
    }

    /// `ln(1 + γ_i Z)`.
    pub(crate) fn log_one_plus_gamma_z(&self, i: usize) -> f64 {
        softplus(self.log_gamma[i] + self.z.ln())
    }

    /// Overflow guard: materialized global scales must stay in
    /// `[1e-300, 1e300]`; log-held local scales must stay finite.
    pub fn check(&self, iteration: usize) -> Result<()> {
        let diverged = |parameter: String, value: f64| Error::Diverged { iteration, parameter, value };
        for (name, v) in [("sigma2", self.sigma2), ("z", self.z)] {
            if !(1e-300..=1e300).contains(&v) {
                return Err(diverged(name.into(), v));
            }
        }
        if !self.mu.is_finite() {
            return Err(diverged("mu".into(), self.mu));
        }
        let n = self.len();
        let groups: [(&str, &[f64]); 9] = [
            ("phi", &self.phi),
            ("log_abs_phi", &self.log_abs_phi),
            ("log_gamma", &self.log_gamma),
            ("log_omega", &self.log_omega),
            ("logit_p", &self.logit_p),
            ("lambda", &self.lambda),
            ("xi", &self.xi),
            ("log_nu", &self.log_nu),
            ("log_kappa", &self.log_kappa),
        ];
        for (name, values) in groups {
            debug_assert!(values.is_empty() || values.len() == n, "{name} has wrong length");
            for (i, &v) in values.iter().enumerate() {
                let ok = match name {
                    // ln|φ| = -∞ only before the first φ update
                    "log_abs_phi" => !v.is_nan() && v != f64::INFINITY,
                    "lambda" | "xi" => v > 0.0 && v.is_finite(),
                    _ => v.is_finite(),
                };
                if !ok {
                    return Err(diverged(format!("{name}[{i}]"), v));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_globals_parse_and_display() {
        let f: FixedGlobals = "mu=0,sigma2=1,z=1".parse().unwrap();
        assert!(f.is_standard());
        assert_eq!(f.to_string(), "mu=0.0,sigma2=1.0,z=1.0");
        let partial: FixedGlobals = " z = 2.5 ".parse().unwrap();
        assert_eq!(partial, FixedGlobals { mu: None, sigma2: None, z: Some(2.5) });
        assert!("sigma2=0".parse::<FixedGlobals>().is_err());
        assert!("tau=1".parse::<FixedGlobals>().is_err());
        assert!("mu".parse::<FixedGlobals>().is_err());
    }

    #[test]
    fn default_priors_are_valid() {
        GlobalPriors::default().validate().unwrap();
        let bad = GlobalPriors { z_rate: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn initial_state_uses_robust_moments() {
        let data = [1.0, 2.0, 3.0, 4.0, 100.0];
        let s = ModelState::initial(&data, PriorFamily::Hths, &FixedGlobals::default()).unwrap();
        assert_eq!(s.mu(), 3.0);
        let mad = 1.4826 * 1.0;
        assert!((s.sigma2() - mad * mad).abs() < 1e-12);
        assert_eq!(s.z(), 1.0);
        assert_eq!(s.p(0), Some(0.5));
        assert_eq!(s.gamma(4), 1.0);
        assert!(s.lambda().is_empty());

        let single = ModelState::initial(&[3.0], PriorFamily::Hs, &FixedGlobals::default()).unwrap();
        assert_eq!(single.sigma2(), 1.0);
        assert_eq!(single.p(0), None);

        let pinned = ModelState::initial(&data, PriorFamily::HthsLambda, &FixedGlobals::standard()).unwrap();
        assert_eq!((pinned.mu(), pinned.sigma2(), pinned.z()), (0.0, 1.0, 1.0));
        assert_eq!(pinned.lambda().len(), 5);
    }

    #[test]
    fn initial_state_rejects_bad_data() {
        assert!(ModelState::initial(&[], PriorFamily::Hs, &FixedGlobals::default()).is_err());
        assert!(ModelState::initial(&[f64::NAN], PriorFamily::Hs, &FixedGlobals::default()).is_err());
    }

    #[test]
    fn guard_flags_runaway_scales() {
        let mut s = ModelState::initial(&[0.0, 1.0], PriorFamily::Hs, &FixedGlobals::default()).unwrap();
        s.check(0).unwrap();
        s.sigma2 = 1e301;
        assert!(matches!(s.check(7), Err(Error::Diverged { iteration: 7, .. })));
        s.sigma2 = 1.0;
        s.log_gamma[1] = f64::INFINITY;
        match s.check(3) {
            Err(Error::Diverged { parameter, .. }) => assert_eq!(parameter, "log_gamma[1]"),
            other => panic!("{other:?}"),
        }
    }
}
