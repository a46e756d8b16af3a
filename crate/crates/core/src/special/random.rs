//! Gamma and normal variate generation in the rate parameterization.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{domain, Result};

#[inline]
pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// Uniform draw on the half-open interval `(0, 1]`.
#[inline]
pub fn uniform_open<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}

/// `ln U` for `U` uniform on `(0, 1]`.
#[inline]
pub fn log_uniform<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    uniform_open(rng).ln()
}

/// Log of a unit-rate Gamma(`shape`) variate, without range checks.
///
/// Marsaglia–Tsang squeeze for `shape ≥ 1`; smaller shapes draw at
/// `shape + 1` and multiply by `U^{1/shape}`, which is done in log space so
/// tiny shapes do not underflow.
pub fn log_gamma_variate<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> f64 {
    debug_assert!(shape > 0.0);
    if shape < 1.0 {
        return log_gamma_variate(shape + 1.0, rng) + log_uniform(rng) / shape;
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let x = standard_normal(rng);
        let v = 1.0 + c * x;
        if v <= 0.0 {
            continue;
        }
        let v3 = v * v * v;
        let u = uniform_open(rng);
        let x2 = x * x;
        if u < 1.0 - 0.0331 * x2 * x2 {
            return d.ln() + v3.ln();
        }
        if u.ln() < 0.5 * x2 + d * (1.0 - v3 + v3.ln()) {
            return d.ln() + v3.ln();
        }
    }
}

/// Log of a unit-rate Gamma variate whose shape is given as `ln_shape`, for
/// shapes that may lie below the range of `f64`.
///
/// For tiny shapes `ln X ≈ ln U / shape`, which is formed as
/// `ln U · e^{-ln_shape}` and may come out as `-∞` when the true value is
/// beyond `f64`.
pub fn log_gamma_variate_log_shape<R: Rng + ?Sized>(ln_shape: f64, rng: &mut R) -> f64 {
    debug_assert!(!ln_shape.is_nan() && ln_shape < f64::INFINITY);
    if ln_shape > -30.0 {
        return log_gamma_variate(ln_shape.exp(), rng);
    }
    // U < 1 keeps ln U < 0, so the product is never 0 · ∞
    let u = loop {
        let u = uniform_open(rng);
        if u < 1.0 {
            break u;
        }
    };
    log_gamma_variate(1.0 + ln_shape.exp(), rng) + u.ln() * (-ln_shape).exp()
}

/// `ln X` for `X ~ Gamma(shape, rate)` (mean `shape/rate`).
pub fn sample_log_gamma<R: Rng + ?Sized>(shape: f64, rate: f64, rng: &mut R) -> Result<f64> {
    check(shape, rate)?;
    Ok(log_gamma_variate(shape, rng) - rate.ln())
}

/// `X ~ Gamma(shape, rate)` with density `rate^shape x^{shape-1} e^{-rate x} / Γ(shape)`.
pub fn sample_gamma<R: Rng + ?Sized>(shape: f64, rate: f64, rng: &mut R) -> Result<f64> {
    sample_log_gamma(shape, rate, rng).map(f64::exp)
}

fn check(shape: f64, rate: f64) -> Result<()> {
    if !(shape > 0.0) || !shape.is_finite() {
        return Err(domain("gamma shape must be positive and finite", shape));
    }
    if !(rate > 0.0) || !rate.is_finite() {
        return Err(domain("gamma rate must be positive and finite", rate));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::regularized_lower_gamma;
    use crate::stats::ks_one_sample;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn mean_of(shape: f64, rate: f64, n: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| sample_gamma(shape, rate, &mut rng).unwrap()).sum::<f64>() / n as f64
    }

    #[test]
    fn exponential_mean() {
        assert!((mean_of(1.0, 2.0, 1_000_000, 1) - 0.5).abs() < 0.002);
    }

    #[test]
    fn half_shape_mean() {
        assert!((mean_of(0.5, 1.0, 1_000_000, 2) - 0.5).abs() < 0.003);
    }

    #[test]
    fn tiny_shape_mass_near_zero_matches_cdf() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 200_000;
        let below =
            (0..n).filter(|_| sample_log_gamma(0.1, 1.0, &mut rng).unwrap() < (1e-6f64).ln()).count() as f64 / n as f64;
        let expected = regularized_lower_gamma(0.1, 1e-6).unwrap();
        let se = (expected * (1.0 - expected) / n as f64).sqrt();
        assert!(below > 0.0);
        assert!((below - expected).abs() < 4.0 * se, "{below} vs {expected}");
    }

    #[test]
    fn ks_against_incomplete_gamma_cdf() {
        for (k, &shape) in [0.1, 0.5, 1.0, 3.0].iter().enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(10 + k as u64);
            let draws: Vec<f64> = (0..100_000).map(|_| sample_gamma(shape, 1.0, &mut rng).unwrap()).collect();
            let ks = ks_one_sample(&draws, |x| regularized_lower_gamma(shape, x).unwrap());
            assert!(ks.p_value > 0.01, "shape {shape}: D = {}, p = {}", ks.statistic, ks.p_value);
        }
    }

    #[test]
    fn log_shape_variate_matches_direct_and_survives_underflow() {
        // ln X / (1/shape) ~ ln U + O(shape) as the shape vanishes, so
        // shape · ln X is close to Exp(1) with a minus sign
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let scaled: Vec<f64> =
            (0..50_000).map(|_| 1e-40 * log_gamma_variate_log_shape((1e-40f64).ln(), &mut rng)).collect();
        let ks = ks_one_sample(&scaled, |x| if x >= 0.0 { 1.0 } else { x.exp() });
        assert!(ks.p_value > 0.01, "{ks:?}");
        let draws: Vec<f64> = (0..50_000).map(|_| log_gamma_variate_log_shape((0.3f64).ln(), &mut rng).exp()).collect();
        let ks = ks_one_sample(&draws, |x| regularized_lower_gamma(0.3, x).unwrap());
        assert!(ks.p_value > 0.01, "{ks:?}");
        for ln_shape in [-800.0, -1e5, f64::NEG_INFINITY] {
            let v = log_gamma_variate_log_shape(ln_shape, &mut rng);
            assert!(v < -1e300 && !v.is_nan(), "{ln_shape}: {v}");
        }
    }

    #[test]
    fn rejects_nonpositive_parameters() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(sample_gamma(0.0, 1.0, &mut rng).is_err());
        assert!(sample_gamma(1.0, 0.0, &mut rng).is_err());
        assert!(sample_gamma(-2.0, 1.0, &mut rng).is_err());
    }
}
