//! Coincidence correlation: pair-selective amplitude products
//! (post-selection), the non-post-selected classical intensity product,
//! and the detector-offset decoherence study.

use crate::analyzers::{
    project_idler, project_signal, singles_intensity, AnalyzerSettings, Detector, ProjectedField,
};
use crate::ensemble::{run_ensemble, Accumulator, RunSpec};
use crate::pairmodel::{build_output_fields, DetuningSign, PathIndex, SourceConfig};
use num_complex::Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DetectionMode {
    /// Keep only same-pair term products; the quantum, coincidence-gated
    /// correlation.
    PostSelected,
    /// Full per-sample intensity product, cross-pair terms included.
    Classical,
}

/// Which time label the idler detection uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TimeModel {
    /// Each path's time label is shared by signal and idler; detuning
    /// phases cancel identically in the pair-selected product.
    PathTime,
    /// The idler is detected `tau` later than the signal; pair-selected
    /// cross terms pick up `exp(i (dj - dk) tau)`.
    DetectorTime,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoincidenceMode {
    pub mode: DetectionMode,
    pub tau: f64,
    pub time_model: TimeModel,
}

impl Default for CoincidenceMode {
    fn default() -> Self {
        Self {
            mode: DetectionMode::PostSelected,
            tau: 0.0,
            time_model: TimeModel::PathTime,
        }
    }
}

impl CoincidenceMode {
    pub fn post_selected() -> Self {
        Self::default()
    }

    pub fn classical() -> Self {
        Self {
            mode: DetectionMode::Classical,
            ..Self::default()
        }
    }

    pub fn detector_offset(tau: f64) -> Self {
        Self {
            mode: DetectionMode::PostSelected,
            tau,
            time_model: TimeModel::DetectorTime,
        }
    }
}

/// One evaluated (xi, theta) point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatePoint {
    pub xi: f64,
    pub theta: f64,
    pub rate: f64,
    /// Standard error of the mean; 0 for analytic values.
    pub stat_error: f64,
}

fn check_inputs(es: &ProjectedField, ei: &ProjectedField) -> crate::Result<()> {
    debug_assert_eq!(es.detector, Detector::Signal);
    debug_assert_eq!(ei.detector, Detector::Idler);
    if es.sample != ei.sample {
        return Err(crate::Error::SampleMismatch);
    }
    Ok(())
}

/// Idler terms with the detector-time offset applied.
fn idler_terms(ei: &ProjectedField, mode: &CoincidenceMode) -> [(crate::pairmodel::BasisTag, Complex64); 2] {
    match mode.time_model {
        TimeModel::PathTime => ei.terms,
        TimeModel::DetectorTime => ei.terms.map(|(tag, amp)| {
            let detuning = match tag.path {
                PathIndex::One => ei.sample.detuning_j,
                PathIndex::Two => ei.sample.detuning_k,
            };
            let sign = match tag.detuning_sign {
                DetuningSign::Plus => 1.0,
                DetuningSign::Minus => -1.0,
            };
            (tag, amp * Complex64::from_polar(1.0, sign * detuning * mode.tau))
        }),
    }
}

// Same-pair term products without the common phase rotation.
fn pair_selected_sum(es: &ProjectedField, ei: &ProjectedField, mode: &CoincidenceMode) -> Complex64 {
    let idler = idler_terms(ei, mode);
    let mut amplitude = Complex64::new(0.0, 0.0);
    for (tag_s, amp_s) in &es.terms {
        for (tag_i, amp_i) in &idler {
            if tag_s.path == tag_i.path {
                amplitude += amp_s * amp_i;
            }
        }
    }
    amplitude
}

/// The complex pair-selected product amplitude: same-pair term products
/// only, cross-pair products discarded.
pub fn pair_selected_amplitude(
    es: &ProjectedField,
    ei: &ProjectedField,
    mode: &CoincidenceMode,
) -> crate::Result<Complex64> {
    check_inputs(es, ei)?;
    let rotation = Complex64::from_polar(1.0, es.phase + ei.phase);
    Ok(pair_selected_sum(es, ei, mode) * rotation)
}

/// Per-sample coincidence observable: squared pair-selected amplitude in
/// post-selected mode, full intensity product in classical mode.
pub fn coincidence_value(
    es: &ProjectedField,
    ei: &ProjectedField,
    mode: &CoincidenceMode,
) -> crate::Result<f64> {
    match mode.mode {
        DetectionMode::PostSelected => {
            check_inputs(es, ei)?;
            // The common phase is a unit rotation; skipping it keeps the
            // value bit-identical across phase settings.
            Ok(pair_selected_sum(es, ei, mode).norm_sqr())
        }
        DetectionMode::Classical => {
            check_inputs(es, ei)?;
            let idler = ProjectedField {
                terms: idler_terms(ei, mode),
                ..*ei
            };
            Ok(singles_intensity(es) * singles_intensity(&idler))
        }
    }
}

/// Closed-form post-selected rate `(i0^2/4) sin^2(theta - xi)`.
pub fn coincidence_rate_analytic(settings: &AnalyzerSettings, i0: f64) -> f64 {
    let s = (settings.theta - settings.xi).sin();
    0.25 * i0 * i0 * s * s
}

/// Fully dephased (tau -> infinity) post-selected rate
/// `(i0^2/4)(sin^2 xi cos^2 theta + cos^2 xi sin^2 theta)`.
pub fn dephased_rate_limit(settings: &AnalyzerSettings, i0: f64) -> f64 {
    let (sx, cx) = settings.xi.sin_cos();
    let (st, ct) = settings.theta.sin_cos();
    0.25 * i0 * i0 * (sx * sx * ct * ct + cx * cx * st * st)
}

fn per_trial(
    settings: &AnalyzerSettings,
    config: &SourceConfig,
    mode: &CoincidenceMode,
    sample: &crate::pairmodel::PairSample,
) -> f64 {
    let (field_a, field_b) = build_output_fields(config, sample);
    let es = project_signal(&field_a, settings).expect("port A field");
    let ei = project_idler(&field_b, settings).expect("port B field");
    coincidence_value(&es, &ei, mode).expect("same sample by construction")
}

fn rate_point(settings: &AnalyzerSettings, acc: &Accumulator) -> RatePoint {
    RatePoint {
        xi: settings.xi,
        theta: settings.theta,
        rate: acc.mean,
        stat_error: acc.std_error(),
    }
}

/// Monte Carlo coincidence rate with standard error; deterministic for a
/// fixed seed.
pub fn coincidence_rate_mc(
    settings: &AnalyzerSettings,
    config: &SourceConfig,
    mode: &CoincidenceMode,
    n_trials: u64,
    seed: u64,
) -> crate::Result<RatePoint> {
    let spec = RunSpec::new(n_trials, seed);
    let acc = run_ensemble(&spec, config, |sample| {
        per_trial(settings, config, mode, sample)
    })?;
    Ok(rate_point(settings, &acc))
}

/// Post-selected rate as a function of the detector time offset.
///
/// All grid points reuse the same sample stream (common random numbers),
/// so contrast ratios between offsets are not washed out by independent
/// sampling noise.
pub fn decoherence_scan(
    settings: &AnalyzerSettings,
    config: &SourceConfig,
    tau_grid: &[f64],
    n_trials: u64,
    seed: u64,
) -> crate::Result<Vec<RatePoint>> {
    tau_grid
        .iter()
        .map(|&tau| {
            let mode = CoincidenceMode::detector_offset(tau);
            coincidence_rate_mc(settings, config, &mode, n_trials, seed)
        })
        .collect()
}
