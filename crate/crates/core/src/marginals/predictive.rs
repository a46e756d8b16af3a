use super::log_scale_density;
use crate::densities::PriorFamily;
use crate::error::{domain, Error, Result};
use crate::special::{integrate, softplus, QuadratureSpec};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;

/// Marginal likelihood `m(y) = ∫ N(y | 0, 1 + 1/γ) π(γ) dγ` with unit noise
/// and `Z = 1`, integrated over `u = ln γ` on the whole line.
pub fn marginal_likelihood(family: PriorFamily, y: f64) -> Result<f64> {
    log_marginal(family, y).map(f64::exp)
}

pub fn log_marginal_likelihood(family: PriorFamily, y: f64) -> Result<f64> {
    let ln_m = log_marginal(family, y)?;
    if ln_m > f64::NEG_INFINITY {
        Ok(ln_m)
    } else {
        Err(Error::Underflow { what: "marginal likelihood" })
    }
}

/// `ln m(y)`. The integrand is scaled by its value near the peak at
/// `u ≈ -2 ln|y|` so the quadrature sees O(1) values for any finite `y`, and
/// `y²` only ever appears as `2 ln|y|`.
fn log_marginal(family: PriorFamily, y: f64) -> Result<f64> {
    if !y.is_finite() {
        return Err(domain("observation must be finite", y));
    }
    let log_h = log_scale_density(family)?;
    let ln_y2 = 2.0 * y.abs().ln();
    let ln_integrand = |u: f64| {
        // variance 1 + e^{-u}
        let ln_v = softplus(-u);
        log_h(u) - LN_SQRT_2PI - 0.5 * ln_v - 0.5 * (ln_y2 - ln_v).exp()
    };
    let mut breaks = vec![-10.0, 0.0, 10.0];
    let mut shift = ln_integrand(0.0);
    if y != 0.0 {
        let knee = -ln_y2;
        breaks.extend([knee - 6.0, knee, knee + 6.0]);
        shift = shift.max(ln_integrand(knee));
    }
    let spec =
        QuadratureSpec::whole_line().with_breakpoints(breaks).relative_tolerance(1e-13).absolute_tolerance(1e-300);
    let scaled = integrate(|u| (ln_integrand(u) - shift).exp(), &spec)?;
    Ok(shift + scaled.ln())
}

/// `d/dy ln m(y)` by central differences with step `max(1e-4, 1e-6 |y|)`,
/// Richardson-extrapolated once.
pub fn predictive_score(family: PriorFamily, y: f64) -> Result<f64> {
    if !y.is_finite() {
        return Err(domain("observation must be finite", y));
    }
    let h = 1e-4_f64.max(1e-6 * y.abs());
    if y + 0.5 * h == y || y - 0.5 * h == y {
        return Err(Error::Underflow { what: "finite-difference step" });
    }
    let lm = |x: f64| log_marginal_likelihood(family, x);
    let central = |step: f64| -> Result<f64> { Ok((lm(y + step)? - lm(y - step)?) / (2.0 * step)) };
    let coarse = central(h)?;
    let fine = central(0.5 * h)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// [`predictive_score`] over a grid of observations.
pub fn log_predictive_score(family: PriorFamily, grid: &[f64]) -> Result<Vec<f64>> {
    grid.iter().map(|&y| predictive_score(family, y)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn horseshoe_marginal_matches_double_integral() {
        // oracle: m(y) = ∫∫ N(y | φ, 1) N(φ | 0, 1/γ) π(γ) dφ dγ, here with
        // γ = τ/(1-τ) and the τ ~ Beta(1/2, 1/2) representation of HS
        for y in [0.0, 1.0, 4.0] {
            let oracle = integrate(
                |t: f64| {
                    // τ = sin²(t), t ∈ (0, π/2): dτ/(π√(τ(1-τ))) = (2/π) dt
                    let tau = t.sin().powi(2);
                    let var = 1.0 / (1.0 - tau);
                    (2.0 / PI) * (-0.5 * y * y / var).exp() / (2.0 * PI * var).sqrt()
                },
                &QuadratureSpec::new(0.0, PI / 2.0).relative_tolerance(1e-13),
            )
            .unwrap();
            assert!(rel(marginal_likelihood(PriorFamily::Hs, y).unwrap(), oracle) < 1e-9, "{y}");
        }
    }

    #[test]
    fn even_in_observation() {
        for family in PriorFamily::CLOSED_FORM {
            assert_eq!(marginal_likelihood(family, 5.0).unwrap(), marginal_likelihood(family, -5.0).unwrap());
            let s = predictive_score(family, 2.5).unwrap();
            assert!((s + predictive_score(family, -2.5).unwrap()).abs() < 1e-8);
            assert!(s < 0.0);
        }
        assert_eq!(predictive_score(PriorFamily::Hths, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn score_matches_analytic_derivative_for_horseshoe() {
        // d/dy m(y) = -y ∫ N(y | 0, v)/v π(v) dv, same τ representation as above
        let y: f64 = 3.0;
        let moment = |k: i32| {
            integrate(
                |t: f64| {
                    let tau = t.sin().powi(2);
                    let var = 1.0 / (1.0 - tau);
                    (2.0 / PI) * (-0.5 * y * y / var).exp() / (2.0 * PI * var).sqrt() / var.powi(k)
                },
                &QuadratureSpec::new(0.0, PI / 2.0).relative_tolerance(1e-13),
            )
            .unwrap()
        };
        let expected = -y * moment(1) / moment(0);
        assert!((predictive_score(PriorFamily::Hs, y).unwrap() - expected).abs() < 1e-7);
    }

    #[test]
    fn large_observations_stay_finite() {
        for family in PriorFamily::CLOSED_FORM {
            assert!(log_marginal_likelihood(family, 1e6).unwrap().is_finite());
        }
        assert!(marginal_likelihood(PriorFamily::Hths, f64::INFINITY).is_err());
        // far out only u ≈ -2 ln|y| contributes, where 1 + e^{-u} = e^{-u} to
        // working precision; with w = u + 2 ln|y| this leaves
        // m(y) = ∫ h(w - 2 ln|y|) k(w) dw / |y| with k the density of ln χ²₁,
        // and for HS the closed form m(y) ≈ 2 / (π √(2π) y²)
        for y in [1e50, -1e300_f64] {
            let t = 2.0 * y.abs().ln();
            let k = |w: f64| (0.5 * w - 0.5 * w.exp()).exp() / (2.0 * PI).sqrt();
            let mass = integrate(
                |w| k(w) / ((w - t).powi(2) + PI * PI),
                &QuadratureSpec::whole_line().with_breakpoints([-5.0, 0.0, 3.0]),
            )
            .unwrap();
            let hths = mass.ln() - y.abs().ln();
            let hs = (2.0 / (PI * (2.0 * PI).sqrt())).ln() - 2.0 * y.abs().ln();
            assert!((log_marginal_likelihood(PriorFamily::Hths, y).unwrap() - hths).abs() < 1e-9, "{y}");
            assert!((log_marginal_likelihood(PriorFamily::Hs, y).unwrap() - hs).abs() < 1e-8, "{y}");
            assert!(predictive_score(PriorFamily::Hths, y).unwrap().is_finite());
        }
        assert!(marginal_likelihood(PriorFamily::HthsLambda, 1.0).is_err());
    }
}
