use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::log_scale_density;
use crate::densities::PriorFamily;
use crate::error::{domain, Error, Result};
use crate::special::{integrate, QuadratureSpec};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;

/// Beyond this `w = ln(γ φ²)` the Gaussian factor `exp(-e^w/2)` is below
/// `1e-230` and the integrand is dropped.
const W_UPPER: f64 = 7.0;

fn check_phi(phi: f64) -> Result<f64> {
    if phi.is_nan() || phi.is_infinite() {
        return Err(domain("phi must be finite", phi));
    }
    if phi == 0.0 {
        return Err(Error::Asymptote { at: 0.0 });
    }
    Ok(phi.abs())
}

/// Prior marginal density of `φ`, `π(φ) = ∫ N(φ | 0, 1/γ) π(γ) dγ`.
///
/// With `w = ln γ + 2 ln|φ|` the integral becomes
/// `|φ| π(φ) = ∫ f(w) h(w - 2 ln|φ|) dw`, where `f` is the density of
/// `ln χ²₁` and `h` the density of `ln γ`. The kernel `f` does not depend on
/// `φ`, so the same quadrature works for any representable `φ ≠ 0`.
/// All four closed-form densities diverge at the origin, which is reported as
/// [`Error::Asymptote`].
pub fn phi_marginal(family: PriorFamily, phi: f64) -> Result<f64> {
    let a = check_phi(phi)?;
    let log_h = log_scale_density(family)?;
    let shift = 2.0 * a.ln();
    let spec = QuadratureSpec::new(f64::NEG_INFINITY, W_UPPER)
        .with_breakpoints([-30.0, -8.0, -2.0, 0.0, 2.0, shift - 8.0, shift, shift + 8.0])
        .relative_tolerance(1e-12)
        .absolute_tolerance(1e-300);
    let scaled = integrate(|w| (0.5 * w - 0.5 * w.exp() - LN_SQRT_2PI + log_h(w - shift)).exp(), &spec)?;
    Ok(scaled / a)
}

/// The same marginal computed directly over `u = ln γ ∈ [-700, 700]`.
///
/// Independent of [`phi_marginal`] apart from the prior density; the two
/// agree to quadrature accuracy for `10^{-150} < |φ| < 10^{150}`.
pub fn phi_marginal_by_log_scale(family: PriorFamily, phi: f64) -> Result<f64> {
    let a = check_phi(phi)?;
    let log_h = log_scale_density(family)?;
    let ln_phi2 = 2.0 * a.ln();
    let c = -ln_phi2;
    let spec = QuadratureSpec::new(-700.0, 700.0)
        .with_breakpoints([0.0, c - 8.0, c, c + 4.0])
        .relative_tolerance(1e-12)
        .absolute_tolerance(1e-300);
    integrate(|u| (0.5 * u - 0.5 * (u + ln_phi2).exp() - LN_SQRT_2PI + log_h(u)).exp(), &spec)
}

/// Tail integrals with the intermediate scale `ω` kept, after `γ` has been
/// integrated out. With `a = φ²/2`:
///
/// * HS: `∫ e^{-ω}/(ω + a) dω`
/// * HS+: `∫ (ln ω - ln a)/(ω - a) e^{-ω} dω`
/// * HTHS: `∫ (a + ω + 1) / ([ln(a + ω)]² + π²) (a + ω)^{-3/2} e^{-ω} dω`
///
/// Their large-`|φ|` rates are `1/φ²`, `ln|φ|/φ²` and `1/(|φ| ln²|φ|)`.
pub fn omega_integral(family: PriorFamily, phi: f64) -> Result<f64> {
    let a = 0.5 * check_phi(phi)?.powi(2);
    if !(a > 0.0 && a.is_finite()) {
        return Err(domain("phi²/2 must be a positive finite number", a));
    }
    let spec = QuadratureSpec::new(0.0, f64::INFINITY)
        .with_breakpoints([a, 1.0])
        .relative_tolerance(1e-12)
        .absolute_tolerance(1e-300);
    match family {
        PriorFamily::Hs => integrate(|w| (-w).exp() / (w + a), &spec),
        PriorFamily::HsPlus => integrate(
            |w| {
                let x = (w - a) / a;
                // ln(w/a)/(w-a) = ln(1+x)/(a x), removable at x = 0
                let ratio = if x == 0.0 { 1.0 / a } else { x.ln_1p() / (a * x) };
                ratio * (-w).exp()
            },
            &spec,
        ),
        PriorFamily::Hths => integrate(
            |w| {
                let s = a + w;
                let l = s.ln();
                (s + 1.0) / ((l * l + PI * PI) * s * s.sqrt()) * (-w).exp()
            },
            &spec,
        ),
        other => Err(other.unsupported("omega tail integral")),
    }
}

/// Constant `c` with `π(φ) = c · omega_integral(φ)` where the relation is
/// exact: `(2π³)^{-1/2}` for HS and `(2π⁵)^{-1/2}` for HS+. The HTHS form
/// drops a bounded factor `Γ(p + 1/2)` and is only proportional up to it.
pub fn omega_integral_constant(family: PriorFamily) -> Option<f64> {
    match family {
        PriorFamily::Hs => Some((2.0 * PI.powi(3)).sqrt().recip()),
        PriorFamily::HsPlus => Some((2.0 * PI.powi(5)).sqrt().recip()),
        _ => None,
    }
}

/// `π(φ)` on a grid, kept as log densities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiMarginal {
    pub family: PriorFamily,
    pub phi: Vec<f64>,
    pub log_density: Vec<f64>,
}

impl PhiMarginal {
    /// Evaluate on a sorted grid that excludes 0. Points are computed in
    /// parallel; the output order follows the grid.
    pub fn on_grid(family: PriorFamily, grid: &[f64]) -> Result<Self> {
        if grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidConfig("phi grid must be strictly increasing".into()));
        }
        let log_density =
            grid.par_iter().map(|&phi| phi_marginal(family, phi).map(f64::ln)).collect::<Result<Vec<_>>>()?;
        Ok(Self { family, phi: grid.to_vec(), log_density })
    }

    pub fn density(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.phi.iter().zip(&self.log_density).map(|(&x, &l)| (x, l.exp()))
    }
}
