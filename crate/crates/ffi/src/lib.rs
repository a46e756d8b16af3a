//! C interface to the `hths` library.
//!
//! Every function returns an [`HthsStatus`]; results come back through out
//! pointers. After a non-zero status, `hths_last_error()` describes the
//! failure on the calling thread. Posterior runs live behind an opaque
//! `HthsChain` handle that the caller releases with `hths_chain_free`.
//!
//! The header `include/hths.h` is generated by the build script.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hths::densities::{density_gamma, density_tau};
use hths::marginals::{kl_risk_bound, log_marginal_likelihood, phi_marginal, predictive_score};
use hths::mcmc::{run_chain, ChainConfig, ChainOutput, FixedGlobals, GlobalPriors};
use hths::{Error, PriorFamily};

/// Outcome of a call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HthsStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// An argument was out of range or malformed.
    InvalidArgument = 2,
    /// The operation is not available for the requested family.
    Unsupported = 3,
    /// A numeric failure such as a diverged chain or an underflow.
    NumericFailure = 4,
    /// Reading or writing a file failed.
    Io = 5,
    /// An internal panic was caught at the boundary.
    Internal = 6,
}

pub const HTHS_FAMILY_HS: u32 = 0;
pub const HTHS_FAMILY_HS_PLUS: u32 = 1;
pub const HTHS_FAMILY_HTHS: u32 = 2;
pub const HTHS_FAMILY_HTHS_PLUS: u32 = 3;
pub const HTHS_FAMILY_HTHS_LAMBDA: u32 = 4;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: HthsStatus, message: impl Into<String>) -> HthsStatus {
    set_last_error(message.into());
    status
}

fn status_of(e: &Error) -> HthsStatus {
    match e {
        Error::UnsupportedFamily { .. } => HthsStatus::Unsupported,
        Error::Io(_) => HthsStatus::Io,
        e if e.is_numeric() => HthsStatus::NumericFailure,
        _ => HthsStatus::InvalidArgument,
    }
}

/// Run `body`, translating errors and panics into a status.
fn guard(body: impl FnOnce() -> Result<(), HthsStatus>) -> HthsStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => HthsStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => fail(HthsStatus::Internal, "internal panic"),
    }
}

fn lift<T>(r: hths::Result<T>) -> Result<T, HthsStatus> {
    r.map_err(|e| fail(status_of(&e), e.to_string()))
}

fn family(code: u32) -> Result<PriorFamily, HthsStatus> {
    PriorFamily::ALL
        .get(code as usize)
        .copied()
        .ok_or_else(|| fail(HthsStatus::InvalidArgument, format!("unknown family code {code}")))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), HthsStatus> {
    if out.is_null() {
        return Err(fail(HthsStatus::NullPointer, "output pointer is null"));
    }
    out.write(value);
    Ok(())
}

/// Message for the most recent failure on this thread, or null if the last
/// call succeeded. The pointer stays valid until the next call.
#[no_mangle]
pub extern "C" fn hths_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hths_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Prior density of the local scale `γ`.
///
/// # Safety
/// `out` must be null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn hths_density_gamma(family_code: u32, gamma: f64, out: *mut f64) -> HthsStatus {
    guard(|| {
        let v = lift(density_gamma(family(family_code)?, gamma))?;
        write_out(out, v)
    })
}

/// Prior density of the shrinkage profile `τ = γ / (1 + γ)`.
///
/// # Safety
/// `out` must be null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn hths_density_tau(family_code: u32, tau: f64, out: *mut f64) -> HthsStatus {
    guard(|| {
        let v = lift(density_tau(family(family_code)?, tau))?;
        write_out(out, v)
    })
}

/// Marginal prior density of an effect `φ` with unit noise and `Z = 1`.
///
/// # Safety
/// `out` must be null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn hths_phi_marginal(family_code: u32, phi: f64, out: *mut f64) -> HthsStatus {
    guard(|| {
        let v = lift(phi_marginal(family(family_code)?, phi))?;
        write_out(out, v)
    })
}

/// Log marginal likelihood `ln m(y)`.
///
/// # Safety
/// `out` must be null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn hths_log_marginal_likelihood(family_code: u32, y: f64, out: *mut f64) -> HthsStatus {
    guard(|| {
        let v = lift(log_marginal_likelihood(family(family_code)?, y))?;
        write_out(out, v)
    })
}

/// Score `d/dy ln m(y)`.
///
/// # Safety
/// `out` must be null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn hths_predictive_score(family_code: u32, y: f64, out: *mut f64) -> HthsStatus {
    guard(|| {
        let v = lift(predictive_score(family(family_code)?, y))?;
        write_out(out, v)
    })
}

/// Kullback-Leibler risk bound at `phi0` after `n` observations.
///
/// # Safety
/// `out` must be null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn hths_kl_risk_bound(family_code: u32, phi0: f64, n: u64, out: *mut f64) -> HthsStatus {
    guard(|| {
        let v = lift(kl_risk_bound(family(family_code)?, phi0, n))?;
        write_out(out, v)
    })
}

/// Settings for `hths_chain_run`. Start from `hths_chain_options_default`.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct HthsChainOptions {
    pub burn_in: usize,
    pub retained: usize,
    pub thinning: usize,
    pub seed: u64,
    pub slice_width: f64,
    /// Keep `ln γ`, `p` and `λ` draws as well as `φ` and the globals.
    pub keep_locals: bool,
    pub pin_mu: bool,
    pub mu: f64,
    pub pin_sigma2: bool,
    pub sigma2: f64,
    pub pin_z: bool,
    pub z: f64,
}

impl Default for HthsChainOptions {
    fn default() -> Self {
        let c = ChainConfig::default();
        Self {
            burn_in: c.burn_in,
            retained: c.retained(),
            thinning: c.thinning,
            seed: c.seed,
            slice_width: c.slice_width,
            keep_locals: c.keep_locals,
            pin_mu: false,
            mu: 0.0,
            pin_sigma2: false,
            sigma2: 1.0,
            pin_z: false,
            z: 1.0,
        }
    }
}

impl HthsChainOptions {
    fn to_config(self) -> Result<ChainConfig, HthsStatus> {
        let fixed = FixedGlobals {
            mu: self.pin_mu.then_some(self.mu),
            sigma2: self.pin_sigma2.then_some(self.sigma2),
            z: self.pin_z.then_some(self.z),
        };
        lift(fixed.validate())?;
        let config = ChainConfig {
            slice_width: self.slice_width,
            fixed_globals: fixed,
            keep_locals: self.keep_locals,
            ..ChainConfig::with_retained(self.burn_in, self.retained, self.thinning, self.seed)
        };
        lift(config.validate())?;
        Ok(config)
    }
}

/// Fill `out` with the library's default chain settings.
///
/// # Safety
/// `out` must be null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn hths_chain_options_default(out: *mut HthsChainOptions) -> HthsStatus {
    guard(|| write_out(out, HthsChainOptions::default()))
}

/// Result of a posterior run. Opaque to C callers.
pub struct HthsChain {
    output: ChainOutput,
    names: Vec<CString>,
}

/// Run the Gibbs sampler on `n` observations with the default global
/// priors. On success `*out` owns a new handle.
///
/// # Safety
/// `data` must point to `n` readable doubles; `options` must be null or
/// point to a valid struct (null means defaults); `out` must be valid for
/// one write.
#[no_mangle]
pub unsafe extern "C" fn hths_chain_run(
    data: *const f64,
    n: usize,
    family_code: u32,
    options: *const HthsChainOptions,
    out: *mut *mut HthsChain,
) -> HthsStatus {
    guard(|| {
        if data.is_null() || out.is_null() {
            return Err(fail(HthsStatus::NullPointer, "data and out must not be null"));
        }
        if n == 0 {
            return Err(fail(HthsStatus::InvalidArgument, "at least one observation is required"));
        }
        let data = std::slice::from_raw_parts(data, n);
        let options = if options.is_null() { HthsChainOptions::default() } else { *options };
        let config = options.to_config()?;
        let output = lift(run_chain(data, family(family_code)?, &GlobalPriors::default(), &config))?;
        let names = output
            .store
            .parameters()
            .iter()
            .map(|s| CString::new(s.as_str()).expect("parameter names hold no NUL"))
            .collect();
        out.write(Box::into_raw(Box::new(HthsChain { output, names })));
        Ok(())
    })
}

/// Release a handle from `hths_chain_run`. Null is ignored.
///
/// # Safety
/// `chain` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hths_chain_free(chain: *mut HthsChain) {
    if !chain.is_null() {
        drop(Box::from_raw(chain));
    }
}

unsafe fn chain_ref<'a>(chain: *const HthsChain) -> Result<&'a HthsChain, HthsStatus> {
    chain.as_ref().ok_or_else(|| fail(HthsStatus::NullPointer, "chain handle is null"))
}

/// Number of retained draws per parameter.
///
/// # Safety
/// `chain` must be a live handle; `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn hths_chain_draws(chain: *const HthsChain, out: *mut usize) -> HthsStatus {
    guard(|| write_out(out, chain_ref(chain)?.output.store.draws()))
}

/// Number of stored parameters.
///
/// # Safety
/// `chain` must be a live handle; `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn hths_chain_parameter_count(chain: *const HthsChain, out: *mut usize) -> HthsStatus {
    guard(|| write_out(out, chain_ref(chain)?.names.len()))
}

/// Name of parameter `index` such as `"phi[3]"`; the string is owned by
/// the handle.
///
/// # Safety
/// `chain` must be a live handle; `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn hths_chain_parameter_name(
    chain: *const HthsChain,
    index: usize,
    out: *mut *const c_char,
) -> HthsStatus {
    guard(|| {
        let c = chain_ref(chain)?;
        let name = c
            .names
            .get(index)
            .ok_or_else(|| fail(HthsStatus::InvalidArgument, format!("parameter index {index} out of range")))?;
        write_out(out, name.as_ptr())
    })
}

/// Copy the draws of the named parameter into `buffer`, which must hold at
/// least `hths_chain_draws` values.
///
/// # Safety
/// `chain` must be a live handle, `name` a NUL-terminated string and
/// `buffer` valid for `capacity` writes.
#[no_mangle]
pub unsafe extern "C" fn hths_chain_column(
    chain: *const HthsChain,
    name: *const c_char,
    buffer: *mut f64,
    capacity: usize,
) -> HthsStatus {
    guard(|| {
        let c = chain_ref(chain)?;
        if name.is_null() || buffer.is_null() {
            return Err(fail(HthsStatus::NullPointer, "name and buffer must not be null"));
        }
        let name = CStr::from_ptr(name).to_str().map_err(|_| fail(HthsStatus::InvalidArgument, "name is not UTF-8"))?;
        let column = c
            .output
            .store
            .column(name)
            .ok_or_else(|| fail(HthsStatus::InvalidArgument, format!("no parameter named '{name}'")))?;
        if capacity < column.len() {
            return Err(fail(
                HthsStatus::InvalidArgument,
                format!("buffer holds {capacity} values but {} are needed", column.len()),
            ));
        }
        ptr::copy_nonoverlapping(column.as_ptr(), buffer, column.len());
        Ok(())
    })
}

/// Posterior median of `φ_index`.
///
/// # Safety
/// `chain` must be a live handle; `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn hths_chain_phi_median(chain: *const HthsChain, index: usize, out: *mut f64) -> HthsStatus {
    guard(|| {
        let c = chain_ref(chain)?;
        let medians = c.output.summary.phi_medians();
        let v = *medians
            .get(index)
            .ok_or_else(|| fail(HthsStatus::InvalidArgument, format!("effect index {index} out of range")))?;
        write_out(out, v)
    })
}

/// Write the draws to `path` in the library's binary draw-store format.
///
/// # Safety
/// `chain` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn hths_chain_write(chain: *const HthsChain, path: *const c_char) -> HthsStatus {
    guard(|| {
        let c = chain_ref(chain)?;
        if path.is_null() {
            return Err(fail(HthsStatus::NullPointer, "path is null"));
        }
        let path = CStr::from_ptr(path).to_str().map_err(|_| fail(HthsStatus::InvalidArgument, "path is not UTF-8"))?;
        lift(c.output.store.save(path))
    })
}
