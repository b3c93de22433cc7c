//! C ABI for the Sagnac SPDC coherence-model simulator.
//!
//! Configs are opaque handles created and destroyed by this library; every
//! function returns a status code and writes results through out pointers.
//! Angles are radians, rates are in intensity-product units (I0^2).

use sagnac::analyzers::AnalyzerSettings;
use sagnac::bellstats::{analytic_rate_fn, chsh_s, ChshAngles};
use sagnac::coincidence::{coincidence_rate_analytic, coincidence_rate_mc, CoincidenceMode};
use sagnac::ensemble::{run_ensemble, RunSpec};
use sagnac::pairmodel::{build_output_fields, SourceConfig};
use std::ffi::CStr;
use std::os::raw::c_char;

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SagnacStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    Degenerate = 4,
}

/// Coincidence evaluation mode.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SagnacMode {
    PostSelected = 0,
    Classical = 1,
}

/// Which detector a singles query refers to.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SagnacDetector {
    Signal = 0,
    Idler = 1,
}

/// Opaque source-configuration handle.
pub struct SagnacConfig {
    inner: SourceConfig,
}

fn mode_of(mode: SagnacMode) -> CoincidenceMode {
    match mode {
        SagnacMode::PostSelected => CoincidenceMode::post_selected(),
        SagnacMode::Classical => CoincidenceMode::classical(),
    }
}

/// Create a config with default parameters. Never fails; free with
/// `sagnac_config_free`.
#[no_mangle]
pub extern "C" fn sagnac_config_default() -> *mut SagnacConfig {
    Box::into_raw(Box::new(SagnacConfig {
        inner: SourceConfig::default(),
    }))
}

/// Parse a config from a JSON document; missing keys take defaults.
///
/// # Safety
/// `json` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sagnac_config_from_json(
    json: *const c_char,
    out: *mut *mut SagnacConfig,
) -> SagnacStatus {
    if json.is_null() || out.is_null() {
        return SagnacStatus::NullPointer;
    }
    let Ok(text) = CStr::from_ptr(json).to_str() else {
        return SagnacStatus::ParseError;
    };
    match SourceConfig::from_json(text) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(SagnacConfig { inner }));
            SagnacStatus::Ok
        }
        Err(sagnac::Error::ConfigParse(_)) => SagnacStatus::ParseError,
        Err(_) => SagnacStatus::InvalidArgument,
    }
}

/// Destroy a config handle. Passing NULL is a no-op.
///
/// # Safety
/// `config` must be a pointer previously returned by this library and not
/// yet freed.
#[no_mangle]
pub unsafe extern "C" fn sagnac_config_free(config: *mut SagnacConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Closed-form post-selected coincidence rate `(I0^2/4) sin^2(theta - xi)`.
///
/// # Safety
/// `config` and `out_rate` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn sagnac_rate_analytic(
    config: *const SagnacConfig,
    xi_rad: f64,
    theta_rad: f64,
    out_rate: *mut f64,
) -> SagnacStatus {
    if config.is_null() || out_rate.is_null() {
        return SagnacStatus::NullPointer;
    }
    let settings = AnalyzerSettings::new(xi_rad, theta_rad);
    *out_rate = coincidence_rate_analytic(&settings, (*config).inner.i0());
    SagnacStatus::Ok
}

/// Monte Carlo coincidence rate with standard error; deterministic for a
/// fixed seed.
///
/// # Safety
/// `config`, `out_rate` and `out_stderr` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn sagnac_rate_mc(
    config: *const SagnacConfig,
    xi_rad: f64,
    theta_rad: f64,
    mode: SagnacMode,
    trials: u64,
    seed: u64,
    out_rate: *mut f64,
    out_stderr: *mut f64,
) -> SagnacStatus {
    if config.is_null() || out_rate.is_null() || out_stderr.is_null() {
        return SagnacStatus::NullPointer;
    }
    if trials == 0 {
        return SagnacStatus::InvalidArgument;
    }
    let settings = AnalyzerSettings::new(xi_rad, theta_rad);
    match coincidence_rate_mc(&settings, &(*config).inner, &mode_of(mode), trials, seed) {
        Ok(point) => {
            *out_rate = point.rate;
            *out_stderr = point.stat_error;
            SagnacStatus::Ok
        }
        Err(_) => SagnacStatus::InvalidArgument,
    }
}

/// Monte Carlo singles intensity at one detector.
///
/// # Safety
/// `config`, `out_mean` and `out_stderr` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn sagnac_singles_mc(
    config: *const SagnacConfig,
    detector: SagnacDetector,
    angle_rad: f64,
    trials: u64,
    seed: u64,
    out_mean: *mut f64,
    out_stderr: *mut f64,
) -> SagnacStatus {
    if config.is_null() || out_mean.is_null() || out_stderr.is_null() {
        return SagnacStatus::NullPointer;
    }
    if trials == 0 {
        return SagnacStatus::InvalidArgument;
    }
    let source = (*config).inner;
    let settings = AnalyzerSettings::new(angle_rad, angle_rad);
    let spec = RunSpec::new(trials, seed);
    let result = run_ensemble(&spec, &source, |sample| {
        let (a, b) = build_output_fields(&source, sample);
        let field = match detector {
            SagnacDetector::Signal => sagnac::analyzers::project_signal(&a, &settings),
            SagnacDetector::Idler => sagnac::analyzers::project_idler(&b, &settings),
        };
        sagnac::analyzers::singles_intensity(&field.expect("port matches detector"))
    });
    match result {
        Ok(acc) => {
            *out_mean = acc.mean;
            *out_stderr = acc.std_error();
            SagnacStatus::Ok
        }
        Err(_) => SagnacStatus::InvalidArgument,
    }
}

/// CHSH S from analytic post-selected rates at the given angles (radians).
///
/// # Safety
/// `config` and `out_s` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn sagnac_chsh_analytic(
    config: *const SagnacConfig,
    a_rad: f64,
    a_prime_rad: f64,
    b_rad: f64,
    b_prime_rad: f64,
    out_s: *mut f64,
) -> SagnacStatus {
    if config.is_null() || out_s.is_null() {
        return SagnacStatus::NullPointer;
    }
    let angles = ChshAngles {
        a: a_rad,
        a_prime: a_prime_rad,
        b: b_rad,
        b_prime: b_prime_rad,
    };
    match chsh_s(&angles, &analytic_rate_fn((*config).inner.i0())) {
        Ok(result) => {
            *out_s = result.s_value;
            SagnacStatus::Ok
        }
        Err(sagnac::Error::DegenerateCorrelation) => SagnacStatus::Degenerate,
        Err(_) => SagnacStatus::InvalidArgument,
    }
}

/// CHSH S from Monte Carlo rates.
///
/// # Safety
/// `config`, `out_s` and `out_stderr` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn sagnac_chsh_mc(
    config: *const SagnacConfig,
    a_rad: f64,
    a_prime_rad: f64,
    b_rad: f64,
    b_prime_rad: f64,
    mode: SagnacMode,
    trials: u64,
    seed: u64,
    out_s: *mut f64,
    out_stderr: *mut f64,
) -> SagnacStatus {
    if config.is_null() || out_s.is_null() || out_stderr.is_null() {
        return SagnacStatus::NullPointer;
    }
    if trials == 0 {
        return SagnacStatus::InvalidArgument;
    }
    let source = (*config).inner;
    let coincidence_mode = mode_of(mode);
    let angles = ChshAngles {
        a: a_rad,
        a_prime: a_prime_rad,
        b: b_rad,
        b_prime: b_prime_rad,
    };
    let rate_fn = |xi: f64, theta: f64| {
        let settings = AnalyzerSettings::new(xi, theta);
        let pair_seed = sagnac::ensemble::derive_seed(
            seed,
            xi.to_bits().wrapping_add(theta.to_bits().rotate_left(17)),
        );
        coincidence_rate_mc(&settings, &source, &coincidence_mode, trials, pair_seed)
            .expect("trials >= 1")
    };
    match chsh_s(&angles, &rate_fn) {
        Ok(result) => {
            *out_s = result.s_value;
            *out_stderr = result.stat_error;
            SagnacStatus::Ok
        }
        Err(sagnac::Error::DegenerateCorrelation) => SagnacStatus::Degenerate,
        Err(_) => SagnacStatus::InvalidArgument,
    }
}
