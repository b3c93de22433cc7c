//! Local polarizers at the two output ports and the per-sample singles
//! intensities they produce.
//!
//! Angles are measured from H, so a polarizer at 0 transmits H fully.
//! Projection is amplitude scaling per term (cos for H components, sin for
//! V); the origin tags are preserved for coincidence pair selection.

use crate::pairmodel::{OutputField, PairSample, Polarization, Port};
use num_complex::Complex64;
use std::f64::consts::PI;

/// The two local polarizer angles, radians.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalyzerSettings {
    /// Signal-port polarizer rotation.
    pub xi: f64,
    /// Idler-port polarizer rotation.
    pub theta: f64,
}

impl AnalyzerSettings {
    pub fn new(xi: f64, theta: f64) -> Self {
        Self { xi, theta }
    }

    /// Angles reduced mod pi; a polarizer at `a` and `a + pi` is the same
    /// device. Used for reporting only, raw angles feed the trig.
    pub fn canonical(&self) -> Self {
        Self {
            xi: self.xi.rem_euclid(PI),
            theta: self.theta.rem_euclid(PI),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Detector {
    /// D_s, behind the signal-port polarizer.
    Signal,
    /// D_i, behind the idler-port polarizer.
    Idler,
}

/// A polarizer-projected field: two origin-tagged terms along the common
/// transmitted axis, plus the sample the phases belong to.
#[derive(Clone, Copy, Debug)]
pub struct ProjectedField {
    pub detector: Detector,
    pub terms: [(crate::pairmodel::BasisTag, Complex64); 2],
    /// Common phase inherited from the output field; intensities never
    /// depend on it.
    pub phase: f64,
    pub sample: PairSample,
}

impl ProjectedField {
    /// Sum of per-term `|amp|^2`; bounded by `E0^2 / 2` since a polarizer
    /// never amplifies.
    pub fn term_intensity_sum(&self) -> f64 {
        self.terms.iter().map(|(_, a)| a.norm_sqr()).sum()
    }
}

fn project(field: &OutputField, angle: f64, expected: Port, detector: Detector) -> crate::Result<ProjectedField> {
    if field.port != expected {
        return Err(crate::Error::PortMismatch {
            expected,
            got: field.port,
        });
    }
    let terms = field.terms.map(|(tag, amp)| {
        let factor = match tag.polarization {
            Polarization::H => angle.cos(),
            Polarization::V => angle.sin(),
        };
        (tag, amp * factor)
    });
    Ok(ProjectedField {
        detector,
        terms,
        phase: field.phase,
        sample: field.sample,
    })
}

/// Apply the signal polarizer (angle xi) to the port-A field.
pub fn project_signal(field: &OutputField, settings: &AnalyzerSettings) -> crate::Result<ProjectedField> {
    project(field, settings.xi, Port::A, Detector::Signal)
}

/// Apply the idler polarizer (angle theta) to the port-B field.
pub fn project_idler(field: &OutputField, settings: &AnalyzerSettings) -> crate::Result<ProjectedField> {
    project(field, settings.theta, Port::B, Detector::Idler)
}

/// Per-sample intensity at the detector: `|sum of terms|^2`.
pub fn singles_intensity(field: &ProjectedField) -> f64 {
    (field.terms[0].1 + field.terms[1].1).norm_sqr()
}

/// Closed-form signal singles intensity `(I0/2)(1 - sin 2xi sin delta_jk)`.
pub fn signal_intensity_law(xi: f64, delta_jk: f64, i0: f64) -> f64 {
    0.5 * i0 * (1.0 - (2.0 * xi).sin() * delta_jk.sin())
}

/// Closed-form idler singles intensity `(I0/2)(1 + sin 2theta sin delta_jk)`.
pub fn idler_intensity_law(theta: f64, delta_jk: f64, i0: f64) -> f64 {
    0.5 * i0 * (1.0 + (2.0 * theta).sin() * delta_jk.sin())
}
