use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use hths_ffi::*;

fn last_error() -> String {
    let p = hths_last_error();
    assert!(!p.is_null(), "expected an error message");
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn scalar_densities_and_errors() {
    let mut v = f64::NAN;
    unsafe {
        assert_eq!(hths_density_gamma(HTHS_FAMILY_HTHS, 1.0, &mut v), HthsStatus::Ok);
        assert!((v - 1.0 / std::f64::consts::PI.powi(2)).abs() < 1e-15);
        assert!(hths_last_error().is_null());

        assert_eq!(hths_density_tau(HTHS_FAMILY_HS, 0.5, &mut v), HthsStatus::Ok);
        assert!((v - 2.0 / std::f64::consts::PI).abs() < 1e-15);

        assert_eq!(hths_density_gamma(HTHS_FAMILY_HTHS_LAMBDA, 1.0, &mut v), HthsStatus::Unsupported);
        assert!(last_error().contains("HTHS_lambda"));

        assert_eq!(hths_density_gamma(HTHS_FAMILY_HS, -1.0, &mut v), HthsStatus::InvalidArgument);
        assert_eq!(hths_density_gamma(17, 1.0, &mut v), HthsStatus::InvalidArgument);
        assert_eq!(hths_density_gamma(HTHS_FAMILY_HS, 1.0, ptr::null_mut()), HthsStatus::NullPointer);

        assert_eq!(hths_phi_marginal(HTHS_FAMILY_HTHS_PLUS, 0.05, &mut v), HthsStatus::Ok);
        assert!((v - 0.6391148087725664).abs() < 1e-8);

        assert_eq!(hths_kl_risk_bound(HTHS_FAMILY_HS, 0.0, 1000, &mut v), HthsStatus::Ok);
        assert!((v - 0.003357577010890032).abs() < 1e-10);
        assert_eq!(hths_kl_risk_bound(HTHS_FAMILY_HS, 0.0, 0, &mut v), HthsStatus::InvalidArgument);

        let mut score = f64::NAN;
        assert_eq!(hths_log_marginal_likelihood(HTHS_FAMILY_HS, 2.0, &mut v), HthsStatus::Ok);
        assert_eq!(hths_predictive_score(HTHS_FAMILY_HS, 0.0, &mut score), HthsStatus::Ok);
        assert!(v.is_finite() && score.abs() < 1e-6);
    }
    let version = unsafe { CStr::from_ptr(hths_version()) };
    assert_eq!(version.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn chain_handle_lifecycle() {
    let data = [0.1, -0.3, 4.0, 0.0, 7.5];
    let mut options = HthsChainOptions {
        burn_in: 0,
        retained: 0,
        thinning: 0,
        seed: 0,
        slice_width: 0.0,
        keep_locals: false,
        pin_mu: false,
        mu: 0.0,
        pin_sigma2: false,
        sigma2: 0.0,
        pin_z: false,
        z: 0.0,
    };
    unsafe {
        assert_eq!(hths_chain_options_default(&mut options), HthsStatus::Ok);
        options.burn_in = 200;
        options.retained = 300;
        options.thinning = 1;
        options.seed = 11;
        options.pin_mu = true;
        options.mu = 0.0;

        let mut chain: *mut HthsChain = ptr::null_mut();
        assert_eq!(hths_chain_run(data.as_ptr(), data.len(), HTHS_FAMILY_HTHS, &options, &mut chain), HthsStatus::Ok);
        assert!(!chain.is_null());

        let mut draws = 0usize;
        let mut count = 0usize;
        assert_eq!(hths_chain_draws(chain, &mut draws), HthsStatus::Ok);
        assert_eq!(hths_chain_parameter_count(chain, &mut count), HthsStatus::Ok);
        assert_eq!(draws, 300);
        let mut name = ptr::null();
        assert_eq!(hths_chain_parameter_name(chain, 3, &mut name), HthsStatus::Ok);
        assert_eq!(CStr::from_ptr(name).to_str().unwrap(), "phi[0]");
        assert_eq!(hths_chain_parameter_name(chain, count, &mut name), HthsStatus::InvalidArgument);

        let mut mu = vec![f64::NAN; draws];
        let key = CString::new("mu").unwrap();
        assert_eq!(hths_chain_column(chain, key.as_ptr(), mu.as_mut_ptr(), mu.len()), HthsStatus::Ok);
        assert!(mu.iter().all(|&m| m == 0.0));
        assert_eq!(hths_chain_column(chain, key.as_ptr(), mu.as_mut_ptr(), 10), HthsStatus::InvalidArgument);
        let missing = CString::new("nope").unwrap();
        assert_eq!(hths_chain_column(chain, missing.as_ptr(), mu.as_mut_ptr(), mu.len()), HthsStatus::InvalidArgument);

        let mut median = f64::NAN;
        assert_eq!(hths_chain_phi_median(chain, 4, &mut median), HthsStatus::Ok);
        assert!(median > 4.0 && median < 9.0, "{median}");

        let dir = tempfile::tempdir().unwrap();
        let path = CString::new(dir.path().join("draws.bin").to_str().unwrap()).unwrap();
        assert_eq!(hths_chain_write(chain, path.as_ptr()), HthsStatus::Ok);
        let store = hths::mcmc::DrawStore::load(dir.path().join("draws.bin")).unwrap();
        assert_eq!(store.draws(), 300);
        let bad = CString::new(dir.path().join("missing/draws.bin").to_str().unwrap()).unwrap();
        assert_eq!(hths_chain_write(chain, bad.as_ptr()), HthsStatus::Io);

        hths_chain_free(chain);
        hths_chain_free(ptr::null_mut());

        options.thinning = 0;
        let mut other: *mut HthsChain = ptr::null_mut();
        assert_eq!(
            hths_chain_run(data.as_ptr(), data.len(), HTHS_FAMILY_HS, &options, &mut other),
            HthsStatus::InvalidArgument
        );
        assert!(other.is_null());
        assert_eq!(hths_chain_run(ptr::null(), 3, HTHS_FAMILY_HS, ptr::null(), &mut other), HthsStatus::NullPointer);
        assert_eq!(hths_chain_draws(ptr::null(), &mut draws), HthsStatus::NullPointer);
    }
}

/// Compile a small C program against the generated header and the static
/// library, if a C compiler is on the path.
#[test]
fn header_compiles_and_links_from_c() {
    let crate_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = crate_dir.join("include/hths.h");
    let text = std::fs::read_to_string(&header).expect("build script writes the header");
    for symbol in ["hths_density_gamma", "hths_chain_run", "hths_chain_free", "typedef struct HthsChain HthsChain"] {
        assert!(text.contains(symbol), "header lacks {symbol}");
    }

    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|p| p.parent()).unwrap();
    let lib = profile_dir.join("libhths_ffi.a");
    if Command::new("cc").arg("--version").output().is_err() || !lib.exists() {
        eprintln!("skipping C link check: no cc or no {}", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    std::fs::write(
        &src,
        r#"
#include <stdio.h>
#include "hths.h"
int main(void) {
    double v = 0.0;
    if (hths_density_gamma(HTHS_FAMILY_HTHS, 1.0, &v) != HTHS_STATUS_OK) return 1;
    double y[3] = {0.0, 1.0, 5.0};
    HthsChainOptions o;
    hths_chain_options_default(&o);
    o.burn_in = 20; o.retained = 20; o.thinning = 1;
    HthsChain *c = NULL;
    if (hths_chain_run(y, 3, HTHS_FAMILY_HS, &o, &c) != HTHS_STATUS_OK) return 2;
    size_t n = 0;
    hths_chain_draws(c, &n);
    hths_chain_free(c);
    if (hths_density_gamma(99, 1.0, &v) != HTHS_STATUS_INVALID_ARGUMENT || hths_last_error() == NULL) return 3;
    printf("%.7f %zu\n", v, n);
    return 0;
}
"#,
    )
    .unwrap();
    let bin = dir.path().join("smoke");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "C program exited with {:?}", out.status);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "0.1013212 20");
}
