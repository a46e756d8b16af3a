//! Closed-form prior densities for the local scale `γ`, the shrinkage
//! profile `τ = γ/(1+γ)` and the decision parameter `p`.
//!
//! Every family is evaluated through the density of `u = ln γ`, which is
//! symmetric in `u` for all four closed-form families:
//!
//! | family | density of `u = ln γ`            |
//! |--------|----------------------------------|
//! | HS     | `1 / (2π cosh(u/2))`             |
//! | HS+    | `u / (2π² sinh(u/2))`            |
//! | HTHS   | `1 / (u² + π²)`                  |
//! | HTHS+  | `2 / (u² + 4π²)`                 |

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::special::{self, integrate, log_gamma_variate, uniform_open, QuadratureSpec, UnitPoint};

/// The five local-scale prior families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PriorFamily {
    #[serde(rename = "HS")]
    Hs,
    #[serde(rename = "HS+")]
    HsPlus,
    #[serde(rename = "HTHS")]
    Hths,
    #[serde(rename = "HTHS+")]
    HthsPlus,
    #[serde(rename = "HTHS_lambda")]
    HthsLambda,
}

impl PriorFamily {
    pub const ALL: [PriorFamily; 5] =
        [PriorFamily::Hs, PriorFamily::HsPlus, PriorFamily::Hths, PriorFamily::HthsPlus, PriorFamily::HthsLambda];

    /// Families whose `γ` marginal has a closed form.
    pub const CLOSED_FORM: [PriorFamily; 4] =
        [PriorFamily::Hs, PriorFamily::HsPlus, PriorFamily::Hths, PriorFamily::HthsPlus];

    pub fn label(self) -> &'static str {
        match self {
            PriorFamily::Hs => "HS",
            PriorFamily::HsPlus => "HS+",
            PriorFamily::Hths => "HTHS",
            PriorFamily::HthsPlus => "HTHS+",
            PriorFamily::HthsLambda => "HTHS_lambda",
        }
    }

    pub fn has_closed_form(self) -> bool {
        self != PriorFamily::HthsLambda
    }

    /// Whether the sampler carries a decision parameter `p_i`.
    pub fn has_decision_parameter(self) -> bool {
        matches!(self, PriorFamily::Hths | PriorFamily::HthsLambda)
    }

    pub(crate) fn unsupported(self, operation: &'static str) -> Error {
        Error::UnsupportedFamily { operation, family: self.label() }
    }
}

impl fmt::Display for PriorFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for PriorFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s.trim().to_ascii_lowercase().chars().filter(|c| !matches!(c, '_' | '-' | ' ')).collect();
        match key.as_str() {
            "hs" => Ok(PriorFamily::Hs),
            "hs+" | "hsplus" => Ok(PriorFamily::HsPlus),
            "hths" => Ok(PriorFamily::Hths),
            "hths+" | "hthsplus" => Ok(PriorFamily::HthsPlus),
            "hthslambda" | "hthsλ" | "hthsl" => Ok(PriorFamily::HthsLambda),
            _ => Err(Error::InvalidConfig(format!(
                "unknown prior family '{s}' (expected hs, hs+, hths, hths+ or hths-lambda)"
            ))),
        }
    }
}

/// A local scale together with its shrinkage profile.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalScale {
    pub gamma: f64,
    pub tau: f64,
}

impl LocalScale {
    pub fn from_gamma(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(domain("local scale gamma must be positive and finite", gamma));
        }
        Ok(Self { gamma, tau: gamma / (1.0 + gamma) })
    }

    pub fn from_tau(tau: f64) -> Result<Self> {
        if !(tau > 0.0 && tau < 1.0) {
            return Err(domain("shrinkage profile tau must lie in (0, 1)", tau));
        }
        Ok(Self { gamma: tau / (1.0 - tau), tau })
    }
}

/// `ln u/(2 sinh(u/2))`, even in `u`.
fn ln_u_over_two_sinh_half(u: f64) -> f64 {
    let a = u.abs();
    if a < 1e-3 {
        let a2 = a * a;
        -a2 / 24.0 + a2 * a2 / 2880.0
    } else {
        a.ln() - 0.5 * a - (-(-a).exp_m1()).ln()
    }
}

/// Log density of `u = ln γ` under a closed-form family.
pub fn log_density_log_scale(family: PriorFamily, u: f64) -> Result<f64> {
    if u.is_nan() {
        return Err(domain("log scale must not be NaN", u));
    }
    let a = u.abs();
    Ok(match family {
        PriorFamily::Hs => -0.5 * a - (-a).exp().ln_1p() - PI.ln(),
        PriorFamily::HsPlus => ln_u_over_two_sinh_half(u) - 2.0 * PI.ln(),
        PriorFamily::Hths => -(u * u + PI * PI).ln(),
        PriorFamily::HthsPlus => std::f64::consts::LN_2 - (u * u + 4.0 * PI * PI).ln(),
        PriorFamily::HthsLambda => return Err(family.unsupported("closed-form gamma density")),
    })
}

/// Log of the marginal prior density of `γ`.
pub fn log_density_gamma(family: PriorFamily, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(domain("gamma must be positive", gamma));
    }
    if family == PriorFamily::HsPlus && (gamma - 1.0).abs() < 1e-3 {
        // log γ/(γ-1) has a removable singularity at γ = 1
        let x = gamma - 1.0;
        let ratio = 1.0 - x / 2.0 + x * x / 3.0 - x * x * x / 4.0;
        return Ok(-0.5 * gamma.ln() + ratio.ln() - 2.0 * PI.ln());
    }
    let u = gamma.ln();
    Ok(log_density_log_scale(family, u)? - u)
}

/// Marginal prior density of the local scale `γ`.
pub fn density_gamma(family: PriorFamily, gamma: f64) -> Result<f64> {
    log_density_gamma(family, gamma).map(f64::exp)
}

/// Log density of `τ` expressed through `s = logit τ`, so that `τ` arbitrarily
/// close to either endpoint stays representable.
pub fn log_density_tau_at_logit(family: PriorFamily, s: f64) -> Result<f64> {
    if !s.is_finite() {
        return Err(domain("logit of tau must be finite", s));
    }
    let ln_tau = -special::softplus(-s);
    let ln_one_minus = -special::softplus(s);
    Ok(log_density_log_scale(family, s)? - ln_tau - ln_one_minus)
}

/// Prior density of the shrinkage profile `τ ∈ (0, 1)`.
pub fn density_tau(family: PriorFamily, tau: f64) -> Result<f64> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(domain("tau must lie strictly inside (0, 1)", tau));
    }
    let s = tau.ln() - (-tau).ln_1p();
    Ok((log_density_log_scale(family, s)? - tau.ln() - (-tau).ln_1p()).exp())
}

fn log_cauchy_scale(family: PriorFamily) -> Result<f64> {
    match family {
        PriorFamily::Hths => Ok(PI),
        PriorFamily::HthsPlus => Ok(2.0 * PI),
        other => Err(other.unsupported("inverse-CDF sampling of gamma")),
    }
}

/// Inverse CDF of `ln γ` for the log-Cauchy families: `c · tan(π(u - 1/2))`.
pub fn log_gamma_quantile(family: PriorFamily, u: f64) -> Result<f64> {
    let scale = log_cauchy_scale(family)?;
    if !(u > 0.0 && u < 1.0) {
        return Err(domain("probability must lie in (0, 1)", u));
    }
    Ok(scale * (PI * (u - 0.5)).tan())
}

/// Exact draw of `γ` for HTHS / HTHS+ from a uniform `u`:
/// `γ = exp(c · tan(π(u - 1/2)))` with `c = π` or `2π`.
pub fn sample_gamma_marginal(family: PriorFamily, u: f64) -> Result<f64> {
    log_gamma_quantile(family, u).map(f64::exp)
}

/// One joint draw from a generative local-scale hierarchy, kept in log space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HierarchyDraw {
    pub log_gamma: f64,
    pub log_omega: f64,
    pub p: f64,
}

impl HierarchyDraw {
    pub fn gamma(&self) -> f64 {
        self.log_gamma.exp()
    }

    pub fn omega(&self) -> f64 {
        self.log_omega.exp()
    }

    pub fn tau(&self) -> f64 {
        special::sigmoid(self.log_gamma)
    }
}

/// Uniform draw strictly inside `(0, 1)`.
pub(crate) fn uniform_interior<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u = uniform_open(rng);
        if u < 1.0 {
            return u;
        }
    }
}

/// Draw `(γ, ω, p)` from the Gamma hierarchy of HS, HS+ or HTHS.
///
/// * HS: `ω ~ Gamma(1/2, 1)`, `γ | ω ~ Gamma(1/2, ω)`; `p ≡ 1/2`.
/// * HS+: `κ ~ Gamma(1/2, 1)`, `ν | κ ~ Gamma(1/2, κ)`, `ω | ν ~ Gamma(1/2, ν)`,
///   `γ | ω ~ Gamma(1/2, ω)`; `p ≡ 1/2`.
/// * HTHS: `p ~ U(0, 1)`, `ω | p ~ Gamma(1-p, 1)`, `γ | p, ω ~ Gamma(p, ω)`.
pub fn sample_gamma_hierarchy<R: Rng + ?Sized>(family: PriorFamily, rng: &mut R) -> Result<HierarchyDraw> {
    match family {
        PriorFamily::Hs => {
            let log_omega = log_gamma_variate(0.5, rng);
            let log_gamma = log_gamma_variate(0.5, rng) - log_omega;
            Ok(HierarchyDraw { log_gamma, log_omega, p: 0.5 })
        }
        PriorFamily::HsPlus => {
            let log_kappa = log_gamma_variate(0.5, rng);
            let log_nu = log_gamma_variate(0.5, rng) - log_kappa;
            let log_omega = log_gamma_variate(0.5, rng) - log_nu;
            let log_gamma = log_gamma_variate(0.5, rng) - log_omega;
            Ok(HierarchyDraw { log_gamma, log_omega, p: 0.5 })
        }
        PriorFamily::Hths => {
            let p = uniform_interior(rng);
            let log_omega = log_gamma_variate(1.0 - p, rng);
            let log_gamma = log_gamma_variate(p, rng) - log_omega;
            Ok(HierarchyDraw { log_gamma, log_omega, p })
        }
        other => Err(other.unsupported("hierarchy sampling")),
    }
}

/// Which prior on the decision parameter `p` to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DecisionPrior {
    /// `p ≡ 1/2` (horseshoe).
    HsFixed,
    /// `p ~ Uniform(0, 1)` (HTHS).
    HthsUniform,
    /// `p | λ ~ Beta(λ, 1)`, `λ | ξ ~ Gamma(1, ξ)`, `ξ ~ Gamma(1, 1)`.
    HthsLambda,
}

impl DecisionPrior {
    pub fn for_family(family: PriorFamily) -> Self {
        match family {
            PriorFamily::Hs | PriorFamily::HsPlus => DecisionPrior::HsFixed,
            PriorFamily::Hths | PriorFamily::HthsPlus => DecisionPrior::HthsUniform,
            PriorFamily::HthsLambda => DecisionPrior::HthsLambda,
        }
    }
}

/// Value of the `p` prior at a point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum DecisionDensity {
    /// The prior is a point mass; it has no density on `(0, 1)`.
    PointMass {
        at: f64,
    },
    Density(f64),
}

impl DecisionDensity {
    pub fn value(&self) -> Option<f64> {
        match self {
            DecisionDensity::Density(v) => Some(*v),
            DecisionDensity::PointMass { .. } => None,
        }
    }
}

/// Prior density of the decision parameter `p`.
///
/// The HTHS_λ marginal `π(p) = ∫₀^∞ λ p^{λ-1} (1+λ)^{-2} dλ` is served from an
/// interpolation table built on first use; points outside the table fall back
/// to direct quadrature.
pub fn density_p(prior: DecisionPrior, p: f64) -> Result<DecisionDensity> {
    if !(p > 0.0 && p < 1.0) {
        return Err(domain("p must lie strictly inside (0, 1)", p));
    }
    Ok(match prior {
        DecisionPrior::HsFixed => DecisionDensity::PointMass { at: 0.5 },
        DecisionPrior::HthsUniform => DecisionDensity::Density(1.0),
        DecisionPrior::HthsLambda => DecisionDensity::Density(lambda_table()?.eval(p)?),
    })
}

/// `ln π(p)` for HTHS_λ by direct quadrature over `t = ln λ`.
pub fn log_density_p_lambda_exact(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(domain("p must lie strictly inside (0, 1)", p));
    }
    let (value, _) = lambda_marginal_terms((-p.ln()).ln(), 1.0 - p, false)?;
    Ok(value)
}

/// `ln π(p)` for HTHS_λ at `p = 1/(1+e^{-s})`, usable where `p` itself
/// underflows.
pub fn log_density_p_lambda_at_logit(s: f64) -> Result<f64> {
    if !s.is_finite() {
        return Err(domain("logit of p must be finite", s));
    }
    let (value, _) = lambda_marginal_terms(ln_neg_ln_p(s), special::sigmoid(-s), false)?;
    Ok(value)
}

/// `ln(-ln p)` at `p = 1/(1+e^{-s})`, accurate where `-ln p ≈ e^{-s}`
/// underflows.
fn ln_neg_ln_p(s: f64) -> f64 {
    if s > 30.0 {
        -s
    } else {
        special::softplus(-s).ln()
    }
}

// Returns (ln π(p), d ln π / d logit p); the slope only when requested.
// The argument is ln(-ln p), so p may lie arbitrarily close to 1.
//
// With I(p) = ∫ λ p^λ (1+λ)^{-2} dλ we have π(p) = I(p)/p, and with
// J(p) = ∫ λ² p^λ (1+λ)^{-2} dλ the slope is (1-p)(J/I - 1).
fn lambda_marginal_terms(ln_q: f64, one_minus_p: f64, with_slope: bool) -> Result<(f64, f64)> {
    // I-integrand in t = ln λ (one factor λ is the Jacobian); p^λ = e^{-λq}
    let log_base = |t: f64| 2.0 * t - 2.0 * special::softplus(t) - (t + ln_q).exp();
    let knee = -ln_q;
    let spec = QuadratureSpec::whole_line()
        .with_breakpoints([0.0, knee, knee + 2.0])
        .relative_tolerance(1e-12)
        .absolute_tolerance(1e-300);
    let i = integrate(|t| log_base(t).exp(), &spec)?;
    let ln_value = i.ln() + ln_q.exp();
    if !with_slope {
        return Ok((ln_value, 0.0));
    }
    let j = integrate(|t| (log_base(t) + t).exp(), &spec)?;
    Ok((ln_value, one_minus_p * (j / i - 1.0)))
}

const TABLE_POINTS: usize = 2048;
const TABLE_LOGIT_RANGE: f64 = 25.0;

/// Monotone cubic Hermite table of `ln π(p)` against `s = logit p`.
struct LambdaTable {
    s: Vec<f64>,
    value: Vec<f64>,
    slope: Vec<f64>,
}

static LAMBDA_TABLE: OnceLock<std::result::Result<LambdaTable, String>> = OnceLock::new();

fn lambda_table() -> Result<&'static LambdaTable> {
    LAMBDA_TABLE
        .get_or_init(|| LambdaTable::build().map_err(|e| e.to_string()))
        .as_ref()
        .map_err(|e| Error::InvalidConfig(format!("failed to build p-density table: {e}")))
}

impl LambdaTable {
    fn build() -> Result<Self> {
        let step = 2.0 * TABLE_LOGIT_RANGE / (TABLE_POINTS - 1) as f64;
        let mut s = Vec::with_capacity(TABLE_POINTS);
        let mut value = Vec::with_capacity(TABLE_POINTS);
        let mut slope = Vec::with_capacity(TABLE_POINTS);
        for k in 0..TABLE_POINTS {
            let sk = -TABLE_LOGIT_RANGE + step * k as f64;
            let (v, d) = lambda_marginal_terms(ln_neg_ln_p(sk), special::sigmoid(-sk), true)?;
            s.push(sk);
            value.push(v);
            slope.push(d);
        }
        // Fritsch–Carlson limiter keeps each cell monotone where the data are.
        for k in 0..TABLE_POINTS - 1 {
            let delta = (value[k + 1] - value[k]) / step;
            if delta == 0.0 {
                slope[k] = 0.0;
                slope[k + 1] = 0.0;
                continue;
            }
            let a = slope[k] / delta;
            let b = slope[k + 1] / delta;
            if a < 0.0 {
                slope[k] = 0.0;
            }
            if b < 0.0 {
                slope[k + 1] = 0.0;
            }
            let r = a * a + b * b;
            if r > 9.0 {
                let t = 3.0 / r.sqrt();
                slope[k] = t * a * delta;
                slope[k + 1] = t * b * delta;
            }
        }
        Ok(Self { s, value, slope })
    }

    fn eval(&self, p: f64) -> Result<f64> {
        let sp = p.ln() - (-p).ln_1p();
        if !self.covers(sp) {
            return log_density_p_lambda_exact(p).map(f64::exp);
        }
        Ok(self.ln_at_logit(sp).exp())
    }

    fn covers(&self, sp: f64) -> bool {
        sp > self.s[0] && sp < self.s[TABLE_POINTS - 1]
    }

    /// Interpolated `ln π(p)` at `sp = logit p`, which must lie in the table.
    fn ln_at_logit(&self, sp: f64) -> f64 {
        let step = self.s[1] - self.s[0];
        let k = (((sp - self.s[0]) / step) as usize).min(TABLE_POINTS - 2);
        let t = (sp - self.s[k]) / step;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.value[k] + h10 * step * self.slope[k] + h01 * self.value[k + 1] + h11 * step * self.slope[k + 1]
    }
}

/// `ln sin(πp)` evaluated from `s = logit p`, accurate near both ends.
pub(crate) fn ln_sin_pi_at_logit(s: f64) -> f64 {
    // sin(πp) = sin(π min(p, 1-p)) and ln min(p, 1-p) = -softplus(|s|)
    let ln_m = -special::softplus(s.abs());
    let m = ln_m.exp();
    if m < 1e-8 {
        PI.ln() + ln_m
    } else {
        (PI * m).sin().ln()
    }
}

/// `ln π(p)` at `s = logit p` for the priors with a density.
fn log_density_p_at_logit(prior: DecisionPrior, s: f64) -> Result<f64> {
    match prior {
        DecisionPrior::HsFixed => Err(domain("p is fixed at 1/2 under the horseshoe", s)),
        DecisionPrior::HthsUniform => Ok(0.0),
        DecisionPrior::HthsLambda => {
            let table = lambda_table()?;
            if table.covers(s) {
                Ok(table.ln_at_logit(s))
            } else {
                log_density_p_lambda_at_logit(s)
            }
        }
    }
}

/// Log density of `u = ln γ` obtained by mixing over the decision parameter.
///
/// Integrating `ω` out of the Gamma hierarchy gives
/// `π(u | p) = sin(πp)/π · e^{pu}/(1+e^u)`, which is mixed over `π(p)` by
/// quadrature. This covers HTHS_λ, which has no closed form; for the
/// horseshoe and the uniform prior it reproduces the HS and HTHS densities.
pub fn log_density_log_scale_mixture(prior: DecisionPrior, u: f64) -> Result<f64> {
    if u.is_nan() {
        return Err(domain("log scale must not be NaN", u));
    }
    if u.is_infinite() {
        return Ok(f64::NEG_INFINITY);
    }
    if prior == DecisionPrior::HsFixed {
        return Ok(-special::softplus(u) - PI.ln() + 0.5 * u);
    }
    // ln(e^{max(u,0)} / (π (1 + e^u))) without cancelling large terms
    let base = -special::softplus(-u.abs()) - PI.ln();
    // For large |u| the integrand in s = logit p is a narrow bump near
    // s ≈ sign(u)·ln|u|; its log height there is subtracted so the bump stays
    // representable, and p·u is formed from the complement of p when u > 0.
    let ln_integrand = |pt: UnitPoint| -> Result<f64> {
        let exponent = if u > 0.0 { -pt.complement * u } else { pt.value * u };
        Ok(ln_sin_pi_at_logit(pt.logit) + exponent + log_density_p_at_logit(prior, pt.logit)?)
    };
    let peak = if u.abs() > 1.0 { u.signum() * u.abs().ln() } else { 0.0 };
    let at_peak = UnitPoint::from_logit(peak);
    let shift = ln_integrand(at_peak)? + at_peak.ln_value + at_peak.ln_complement;
    let mut failure = None;
    let spec = QuadratureSpec::whole_line()
        .with_breakpoints([-50.0, -10.0, -2.0, 0.0, 2.0, 10.0, 40.0, peak - 3.0, peak, peak + 3.0])
        // the p density switches from its table to direct quadrature here
        .with_breakpoints([-TABLE_LOGIT_RANGE, TABLE_LOGIT_RANGE])
        // the p table itself is accurate to about 1e-6 relative
        .relative_tolerance(1e-8)
        .absolute_tolerance(1e-300);
    let value = special::integrate_logit(
        |pt| match ln_integrand(pt) {
            Ok(v) => v - shift,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NEG_INFINITY
            }
        },
        &spec,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    if !(value > 0.0) {
        return Err(Error::Underflow { what: "mixture density of the log scale" });
    }
    // the exponent above is p·u - max(u, 0), restored through `base`
    Ok(base + shift + value.ln())
}
