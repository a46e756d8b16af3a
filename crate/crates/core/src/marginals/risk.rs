use serde::{Deserialize, Serialize};

use super::log_scale_density;
use crate::densities::PriorFamily;
use crate::error::{domain, Error, Result};
use crate::special::{incomplete_gamma, integrate, QuadratureSpec};

const SQRT_PI: f64 = 1.772_453_850_905_516;

/// `P(|Z| < x)` for standard normal `Z`.
fn normal_inner(x: f64) -> Result<f64> {
    Ok(incomplete_gamma(0.5, 0.5 * x * x)?.lower / SQRT_PI)
}

/// `P(|Z| > x)` for standard normal `Z`, accurate deep in the tail.
fn normal_outer(x: f64) -> Result<f64> {
    Ok(incomplete_gamma(0.5, 0.5 * x * x)?.upper / SQRT_PI)
}

/// `P(a < Z < b)` without cancellation on either side of the origin.
fn normal_interval(a: f64, b: f64) -> Result<f64> {
    if a >= 0.0 {
        Ok(0.5 * (normal_outer(a)? - normal_outer(b)?).max(0.0))
    } else if b <= 0.0 {
        normal_interval(-b, -a)
    } else {
        Ok(0.5 * (normal_inner(-a)? + normal_inner(b)?))
    }
}

/// Prior probability `P(lo < φ < hi)` under a closed-form family, as
/// `∫ P(lo √γ < Z < hi √γ) h(u) du` over `u = ln γ`.
pub fn prior_interval_probability(family: PriorFamily, lo: f64, hi: f64) -> Result<f64> {
    if !(lo < hi) || lo.is_nan() || hi.is_nan() {
        return Err(domain("interval must satisfy lo < hi", hi));
    }
    let log_h = log_scale_density(family)?;
    let mut breaks = vec![0.0];
    for end in [lo, hi] {
        if end != 0.0 && end.is_finite() {
            let knee = -2.0 * end.abs().ln();
            breaks.extend([knee - 4.0, knee, knee + 4.0]);
        }
    }
    let spec =
        QuadratureSpec::whole_line().with_breakpoints(breaks).relative_tolerance(1e-12).absolute_tolerance(1e-300);
    let mut failure = None;
    let value = integrate(
        |u| {
            let s = (0.5 * u).exp();
            let scale = |x: f64| if x.is_infinite() { x } else { x * s };
            match normal_interval(scale(lo), scale(hi)) {
                Ok(p) if p > 0.0 => (log_h(u) + p.ln()).exp(),
                Ok(_) => 0.0,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        },
        &spec,
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(value),
    }
}

/// Upper bound on the average Bayes predictive risk at `φ₀` after `n`
/// unit-variance observations: `ε - ln π(A_ε) / n` with `ε = 1/n` and
/// `A_ε = {φ : (φ - φ₀)²/2 < ε}`, the KL ball of half-width `√(2ε)`.
pub fn kl_risk_bound(family: PriorFamily, phi0: f64, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(domain("sample size must be at least 1", 0.0));
    }
    if !phi0.is_finite() {
        return Err(domain("centre must be finite", phi0));
    }
    let eps = 1.0 / n as f64;
    let half_width = (2.0 * eps).sqrt();
    let (lo, hi) = (phi0 - half_width, phi0 + half_width);
    if !(lo < phi0 && phi0 < hi) {
        return Err(Error::Underflow { what: "KL neighbourhood width at this centre" });
    }
    let mass = prior_interval_probability(family, lo, hi)?;
    if !(mass > 0.0) {
        return Err(Error::Underflow { what: "prior mass of the KL neighbourhood" });
    }
    Ok(eps - mass.ln() / n as f64)
}

/// Risk bounds over a grid of sample sizes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RiskBoundCurve {
    pub family: PriorFamily,
    pub phi0: f64,
    pub n: Vec<u64>,
    pub bound: Vec<f64>,
}

impl RiskBoundCurve {
    pub fn compute(family: PriorFamily, phi0: f64, n: &[u64]) -> Result<Self> {
        let bound = n.iter().map(|&k| kl_risk_bound(family, phi0, k)).collect::<Result<Vec<_>>>()?;
        Ok(Self { family, phi0, n: n.to_vec(), bound })
    }
}

/// The two-term incomplete-gamma expression that brackets the heavy-tailed
/// marginals for a given `a ∈ (0, 1/2)`:
///
/// `a 2^{a-1} / (√π |φ|^{1+2a}) · γ(1/2 + a, φ²/2)
///  + a 2^{-a-1} / (√π |φ|^{1-2a}) · Γ(1/2 - a, φ²/2)`
///
/// with the lower and upper incomplete gamma functions.
pub fn theorem2_bound(a: f64, phi: f64) -> Result<f64> {
    if !(a > 0.0 && a < 0.5) {
        return Err(domain("a must lie in (0, 1/2)", a));
    }
    if phi == 0.0 || !phi.is_finite() {
        return Err(domain("phi must be finite and non-zero", phi));
    }
    let abs = phi.abs();
    let x = 0.5 * phi * phi;
    let lower = incomplete_gamma(0.5 + a, x)?.lower;
    let upper = incomplete_gamma(0.5 - a, x)?.upper;
    let first = a * 2f64.powf(a - 1.0) / (SQRT_PI * abs.powf(1.0 + 2.0 * a)) * lower;
    let second = a * 2f64.powf(-a - 1.0) / (SQRT_PI * abs.powf(1.0 - 2.0 * a)) * upper;
    Ok(first + second)
}
