//! Special functions and numerical kernels shared by the rest of the crate.

mod gamma;
mod quadrature;
mod random;

pub use gamma::{gamma, incomplete_gamma, ln_gamma, regularized_lower_gamma, IncompleteGammaPair};
pub use quadrature::{integrate, integrate_logit, Estimate, QuadratureSpec, UnitPoint};
pub use random::{
    log_gamma_variate, log_gamma_variate_log_shape, log_uniform, sample_gamma, sample_log_gamma, standard_normal,
    uniform_open,
};

/// `ln(1 + e^x)` without overflow.
#[inline]
pub fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// `ln(e^a + e^b)`.
#[inline]
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Logistic function `1/(1+e^{-x})`.
#[inline]
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}
