//! Photon-pair state of the Sagnac source: amplitudes, detunings, phases,
//! and construction of the two PBS output fields.
//!
//! Each pair sample carries one detuning per propagation direction; the
//! signal and idler of a pair are oppositely detuned by convention, so only
//! one value is stored per pair. The center frequency never enters any
//! observable and is not stored. The pair-internal quarter-turn phase
//! between the path-1 and path-2 terms is what turns the singles cross term
//! into `sin(delta_jk)`; it cancels in the pair-selected coincidence
//! product.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, TAU};

/// Shape of the detuning distribution. The scale parameter is always the
/// standard deviation, so `uniform` draws from a half-width of sigma*sqrt(3).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumKind {
    Gaussian,
    Uniform,
}

/// How the time labels of a sample are drawn.
///
/// `UniformDelta` (the default) picks the times so that `delta_jk` is
/// exactly uniform on `[0, 2pi)`, which is the ensemble the singles and
/// classical-limit averages assume. `Physical` draws both time labels
/// independently on `[0, time_scale_s)`; use it together with
/// `TimeModel::DetectorTime` for the detector-offset decoherence study.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingMode {
    UniformDelta,
    Physical,
}

/// Source parameters. `phase_phi` and `global_phase` are kept separate so
/// that phase immunity can be tested; internally they only ever appear as
/// their sum.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct SourceConfig {
    pub amplitude_e0: f64,
    #[serde(rename = "phase_phi_rad")]
    pub phase_phi: f64,
    #[serde(rename = "global_phase_rad")]
    pub global_phase: f64,
    #[serde(rename = "bandwidth_sigma_rad_s")]
    pub bandwidth_sigma: f64,
    pub spectrum: SpectrumKind,
    pub sampling: SamplingMode,
    #[serde(rename = "time_scale_s")]
    pub time_scale: f64,
}

impl Default for SourceConfig {
    fn default() -> Self {
        Self {
            amplitude_e0: 1.0,
            phase_phi: 0.0,
            global_phase: 0.0,
            bandwidth_sigma: 1.0,
            spectrum: SpectrumKind::Gaussian,
            sampling: SamplingMode::UniformDelta,
            time_scale: 1.0,
        }
    }
}

impl SourceConfig {
    /// Parse from a JSON document; missing keys take the defaults.
    pub fn from_json(text: &str) -> crate::Result<Self> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> crate::Result<()> {
        if self.amplitude_e0 <= 0.0 || !self.amplitude_e0.is_finite() {
            return Err(crate::Error::InvalidConfig(format!(
                "amplitude_e0 must be > 0, got {}",
                self.amplitude_e0
            )));
        }
        if self.bandwidth_sigma < 0.0 || !self.bandwidth_sigma.is_finite() {
            return Err(crate::Error::InvalidConfig(format!(
                "bandwidth_sigma must be >= 0, got {}",
                self.bandwidth_sigma
            )));
        }
        if self.time_scale <= 0.0 || !self.time_scale.is_finite() {
            return Err(crate::Error::InvalidConfig(format!(
                "time_scale must be > 0, got {}",
                self.time_scale
            )));
        }
        Ok(())
    }

    /// Mean single-port intensity `I0 = E0^2`.
    pub fn i0(&self) -> f64 {
        self.amplitude_e0 * self.amplitude_e0
    }

    /// The combined traveling-wave phase (pump phase plus global phase).
    pub fn folded_phase(&self) -> f64 {
        self.phase_phi + self.global_phase
    }
}

/// One Monte Carlo draw: detunings for the backward (j) and forward (k)
/// pairs and the two path time labels.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairSample {
    /// Backward-pair detuning, rad/s. Signal carries `+`, idler `-`.
    pub detuning_j: f64,
    /// Forward-pair detuning, rad/s.
    pub detuning_k: f64,
    /// Path-1 time label, seconds.
    pub time_1: f64,
    /// Path-2 time label, seconds.
    pub time_2: f64,
}

impl PairSample {
    /// The detuning-time phase `delta_jk = detuning_j*t1 - detuning_k*t2`
    /// that randomizes single-detector fringes across the pair ensemble.
    pub fn delta_jk(&self) -> f64 {
        self.detuning_j * self.time_1 - self.detuning_k * self.time_2
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Port {
    A,
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathIndex {
    One,
    Two,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Polarization {
    H,
    V,
}

/// Sign of the detuning carried by a term (the superscript on the basis
/// labels): signal terms carry `Plus`, idler terms `Minus`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DetuningSign {
    Plus,
    Minus,
}

/// Origin label of a field term. The tag survives polarizer projection so
/// that coincidence post-selection can pair terms of the same origin.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BasisTag {
    pub path: PathIndex,
    pub polarization: Polarization,
    pub detuning_sign: DetuningSign,
}

/// A PBS output field: two basis-tagged complex terms plus the sample the
/// phases were evaluated at.
///
/// The common traveling-wave rotation `e^{i phase}` is kept out of the
/// stored term amplitudes so that every intensity observable is
/// bit-identical under phase changes; `literal_terms` applies it.
#[derive(Clone, Copy, Debug)]
pub struct OutputField {
    pub port: Port,
    pub terms: [(BasisTag, Complex64); 2],
    /// Common phase `phi'` carried by both terms.
    pub phase: f64,
    pub sample: PairSample,
}

impl OutputField {
    /// Term amplitudes with the common `e^{i phase}` rotation applied.
    pub fn literal_terms(&self) -> [(BasisTag, Complex64); 2] {
        let rotation = Complex64::from_polar(1.0, self.phase);
        self.terms.map(|(tag, amp)| (tag, amp * rotation))
    }

    /// Total intensity `sum |amp|^2` over the two terms.
    pub fn total_intensity(&self) -> f64 {
        self.terms.iter().map(|(_, a)| a.norm_sqr()).sum()
    }
}

/// Build the two PBS output fields for one pair sample.
///
/// Port A carries the path-1 signal (V) and the path-2 signal (H, basis
/// swapped by the HWP); port B carries the matching idlers. The path-2
/// terms carry an extra quarter-turn (`+i` at port A, `-i` folded into the
/// port-B prefactor), the fixed signal-idler phase of the source. It
/// cancels in the pair-selected coincidence product and puts the singles
/// cross term on `sin(delta_jk)`.
pub fn build_output_fields(config: &SourceConfig, sample: &PairSample) -> (OutputField, OutputField) {
    let prefactor = Complex64::new(config.amplitude_e0 * FRAC_1_SQRT_2, 0.0);
    let phase = config.folded_phase();
    let i = Complex64::i();
    let phase_j = sample.detuning_j * sample.time_1;
    let phase_k = sample.detuning_k * sample.time_2;

    let tag = |path, polarization, detuning_sign| BasisTag {
        path,
        polarization,
        detuning_sign,
    };

    let port_a = OutputField {
        port: Port::A,
        phase,
        terms: [
            (
                tag(PathIndex::One, Polarization::V, DetuningSign::Plus),
                -prefactor * Complex64::from_polar(1.0, phase_j),
            ),
            (
                tag(PathIndex::Two, Polarization::H, DetuningSign::Plus),
                i * prefactor * Complex64::from_polar(1.0, phase_k),
            ),
        ],
        sample: *sample,
    };
    // Overall i times the path-2 quarter-turn conjugate leaves that term real.
    let port_b = OutputField {
        port: Port::B,
        phase,
        terms: [
            (
                tag(PathIndex::One, Polarization::H, DetuningSign::Minus),
                i * prefactor * Complex64::from_polar(1.0, -phase_j),
            ),
            (
                tag(PathIndex::Two, Polarization::V, DetuningSign::Minus),
                prefactor * Complex64::from_polar(1.0, -phase_k),
            ),
        ],
        sample: *sample,
    };
    (port_a, port_b)
}

/// Draw one pair sample from the configured spectrum and sampling mode.
pub fn sample_pair<R: Rng + ?Sized>(config: &SourceConfig, rng: &mut R) -> PairSample {
    let detuning_j = draw_detuning(config, rng);
    let detuning_k = draw_detuning(config, rng);
    let (time_1, time_2) = match config.sampling {
        SamplingMode::UniformDelta => {
            // Pick times so delta_jk lands exactly on a uniform draw.
            let target = rng.random_range(0.0..TAU);
            if detuning_j != 0.0 {
                let time_2 = rng.random_range(0.0..config.time_scale);
                ((target + detuning_k * time_2) / detuning_j, time_2)
            } else if detuning_k != 0.0 {
                let time_1 = rng.random_range(0.0..config.time_scale);
                (time_1, -target / detuning_k)
            } else {
                // Degenerate spectrum: delta_jk is identically zero.
                (
                    rng.random_range(0.0..config.time_scale),
                    rng.random_range(0.0..config.time_scale),
                )
            }
        }
        SamplingMode::Physical => (
            rng.random_range(0.0..config.time_scale),
            rng.random_range(0.0..config.time_scale),
        ),
    };
    PairSample {
        detuning_j,
        detuning_k,
        time_1,
        time_2,
    }
}

fn draw_detuning<R: Rng + ?Sized>(config: &SourceConfig, rng: &mut R) -> f64 {
    let sigma = config.bandwidth_sigma;
    if sigma == 0.0 {
        return 0.0;
    }
    match config.spectrum {
        SpectrumKind::Gaussian => {
            let z: f64 = StandardNormal.sample(rng);
            sigma * z
        }
        // Half-width sigma*sqrt(3) gives standard deviation sigma.
        SpectrumKind::Uniform => rng.random_range(-1.0..1.0) * sigma * 3f64.sqrt(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn zero_sample() -> PairSample {
        PairSample {
            detuning_j: 0.0,
            detuning_k: 0.0,
            time_1: 0.0,
            time_2: 0.0,
        }
    }

    #[test]
    fn zero_detuning_zero_phase_amplitudes() {
        let config = SourceConfig::default();
        let (a, b) = build_output_fields(&config, &zero_sample());
        let s = FRAC_1_SQRT_2;
        // Path-1 terms match the raw output-field expression; path-2 terms
        // carry the fixed quarter-turn pair phase.
        assert_abs_diff_eq!(a.terms[0].1.re, -s, epsilon = 1e-15);
        assert_abs_diff_eq!(a.terms[0].1.im, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(a.terms[1].1.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(a.terms[1].1.im, s, epsilon = 1e-15);
        assert_abs_diff_eq!(b.terms[0].1.im, s, epsilon = 1e-15);
        assert_abs_diff_eq!(b.terms[1].1.re, s, epsilon = 1e-15);
        // Magnitudes are 1/sqrt(2) across the board.
        for field in [&a, &b] {
            for (_, amp) in &field.terms {
                assert_abs_diff_eq!(amp.norm(), s, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn port_intensity_conservation() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let config = SourceConfig {
            amplitude_e0: 1.7,
            phase_phi: 0.9,
            global_phase: -2.2,
            bandwidth_sigma: 3.0e9,
            ..SourceConfig::default()
        };
        for _ in 0..200 {
            let sample = sample_pair(&config, &mut rng);
            let (a, b) = build_output_fields(&config, &sample);
            let i0 = config.i0();
            assert_abs_diff_eq!(a.total_intensity(), i0, epsilon = 1e-12 * i0);
            assert_abs_diff_eq!(b.total_intensity(), i0, epsilon = 1e-12 * i0);
        }
    }

    #[test]
    fn phase_immunity_of_term_magnitudes() {
        let sample = PairSample {
            detuning_j: 2.0,
            detuning_k: -3.5,
            time_1: 0.4,
            time_2: 1.1,
        };
        let base = SourceConfig::default();
        let shifted = SourceConfig {
            phase_phi: 1.3,
            global_phase: -0.7,
            ..base
        };
        let (a0, b0) = build_output_fields(&base, &sample);
        let (a1, b1) = build_output_fields(&shifted, &sample);
        for (f0, f1) in [(&a0, &a1), (&b0, &b1)] {
            for ((_, amp0), (_, amp1)) in f0.terms.iter().zip(f1.terms.iter()) {
                assert_abs_diff_eq!(amp0.norm(), amp1.norm(), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn detuning_symmetry_between_ports() {
        // The detuning part of the port-A signal phase is the negation of
        // the matching port-B idler phase for the same pair index.
        let sample = PairSample {
            detuning_j: 5.0,
            detuning_k: 2.0,
            time_1: 0.3,
            time_2: 0.8,
        };
        let config = SourceConfig::default();
        let (a, b) = build_output_fields(&config, &sample);
        let (a_ref, b_ref) = build_output_fields(&config, &zero_sample());
        for path in 0..2 {
            let da = (a.terms[path].1 / a_ref.terms[path].1).arg();
            let db = (b.terms[path].1 / b_ref.terms[path].1).arg();
            assert_abs_diff_eq!(da, -db, epsilon = 1e-12);
        }
    }

    #[test]
    fn delta_jk_examples() {
        let s = |dj, dk, t1, t2| PairSample {
            detuning_j: dj,
            detuning_k: dk,
            time_1: t1,
            time_2: t2,
        };
        assert_eq!(s(0.0, 0.0, 1.0, 1.0).delta_jk(), 0.0);
        assert_abs_diff_eq!(
            s(1.0, 1.0, std::f64::consts::PI, std::f64::consts::PI).delta_jk(),
            0.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(s(2.0, 3.0, 1.0, 1.0).delta_jk(), -1.0, epsilon = 1e-15);
    }

    #[test]
    fn degenerate_spectrum_draws_zero_detunings() {
        let config = SourceConfig {
            bandwidth_sigma: 0.0,
            ..SourceConfig::default()
        };
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        for _ in 0..100 {
            let sample = sample_pair(&config, &mut rng);
            assert_eq!(sample.detuning_j, 0.0);
            assert_eq!(sample.detuning_k, 0.0);
            assert_eq!(sample.delta_jk(), 0.0);
        }
    }

    #[test]
    fn fixed_seed_reproduces_sequence() {
        let config = SourceConfig::default();
        let draw = || {
            let mut rng = ChaCha12Rng::seed_from_u64(123);
            (0..1000)
                .map(|_| sample_pair(&config, &mut rng))
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(), draw());
    }

    #[test]
    fn gaussian_sample_mean_within_standard_error() {
        let sigma = TAU * 1.0e9;
        let config = SourceConfig {
            bandwidth_sigma: sigma,
            ..SourceConfig::default()
        };
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let n = 100_000;
        let mean = (0..n)
            .map(|_| sample_pair(&config, &mut rng).detuning_j)
            .sum::<f64>()
            / n as f64;
        assert!(mean.abs() < 5.0 * sigma / (n as f64).sqrt());
    }

    #[test]
    fn uniform_delta_mode_covers_the_circle() {
        let config = SourceConfig::default();
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let n = 40_000;
        let mut bins = [0usize; 8];
        for _ in 0..n {
            let d = sample_pair(&config, &mut rng).delta_jk().rem_euclid(TAU);
            bins[(d / TAU * 8.0) as usize % 8] += 1;
        }
        let expected = n as f64 / 8.0;
        for count in bins {
            assert!((count as f64 - expected).abs() < 6.0 * expected.sqrt());
        }
    }

    #[test]
    fn config_json_roundtrip_and_defaults() {
        let config = SourceConfig::from_json("{}").unwrap();
        assert_eq!(config.amplitude_e0, 1.0);
        assert_eq!(config.spectrum, SpectrumKind::Gaussian);

        let config = SourceConfig::from_json(
            r#"{"amplitude_e0": 2.0, "phase_phi_rad": 0.5, "bandwidth_sigma_rad_s": 6.0e9, "spectrum": "uniform"}"#,
        )
        .unwrap();
        assert_eq!(config.amplitude_e0, 2.0);
        assert_eq!(config.spectrum, SpectrumKind::Uniform);
        assert_eq!(config.global_phase, 0.0);
    }

    #[test]
    fn config_rejects_nonpositive_amplitude() {
        assert!(SourceConfig::from_json(r#"{"amplitude_e0": 0.0}"#).is_err());
        assert!(SourceConfig::from_json(r#"{"bandwidth_sigma_rad_s": -1.0}"#).is_err());
    }
}
