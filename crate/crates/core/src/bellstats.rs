//! Polarization correlation functions E(xi, theta) built from coincidence
//! rates, and the CHSH Bell parameter S.

use crate::analyzers::AnalyzerSettings;
use crate::coincidence::{coincidence_rate_analytic, RatePoint};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI};

/// The four analyzer angles of a CHSH measurement, radians.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChshAngles {
    pub a: f64,
    pub a_prime: f64,
    pub b: f64,
    pub b_prime: f64,
}

impl ChshAngles {
    /// The canonical set (0, pi/4, pi/8, 3pi/8); maximal S for the
    /// sin^2 rate law.
    pub fn canonical() -> Self {
        Self {
            a: 0.0,
            a_prime: FRAC_PI_4,
            b: FRAC_PI_8,
            b_prime: 3.0 * FRAC_PI_8,
        }
    }
}

/// A correlation value with its propagated statistical error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EValue {
    pub e: f64,
    pub stat_error: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChshResult {
    /// E(a,b), E(a,b'), E(a',b), E(a',b').
    pub e_values: [EValue; 4],
    pub s_value: f64,
    pub stat_error: f64,
}

/// The four-rate normalized correlation estimator:
/// `E = [R(xi,theta) + R(xi+90,theta+90) - R(xi+90,theta) - R(xi,theta+90)] / sum`.
///
/// For the analytic post-selected law this equals `-cos 2(theta - xi)`.
pub fn correlation_e<F>(settings: &AnalyzerSettings, rate_fn: &F) -> crate::Result<EValue>
where
    F: Fn(f64, f64) -> RatePoint + ?Sized,
{
    let (xi, theta) = (settings.xi, settings.theta);
    let r_par = rate_fn(xi, theta);
    let r_both = rate_fn(xi + FRAC_PI_2, theta + FRAC_PI_2);
    let r_xi = rate_fn(xi + FRAC_PI_2, theta);
    let r_theta = rate_fn(xi, theta + FRAC_PI_2);
    let total = r_par.rate + r_both.rate + r_xi.rate + r_theta.rate;
    if total == 0.0 {
        return Err(crate::Error::DegenerateCorrelation);
    }
    let e = (r_par.rate + r_both.rate - r_xi.rate - r_theta.rate) / total;
    // First-order propagation: dE/dR is (1 -+ E)/total depending on the sign
    // the rate enters the numerator with.
    let plus = (1.0 - e) / total;
    let minus = (1.0 + e) / total;
    let variance = plus * plus * (r_par.stat_error.powi(2) + r_both.stat_error.powi(2))
        + minus * minus * (r_xi.stat_error.powi(2) + r_theta.stat_error.powi(2));
    Ok(EValue {
        e,
        stat_error: variance.sqrt(),
    })
}

/// CHSH combination `S = |E(a,b) - E(a,b')| + |E(a',b) + E(a',b')|`.
pub fn chsh_s<F>(angles: &ChshAngles, rate_fn: &F) -> crate::Result<ChshResult>
where
    F: Fn(f64, f64) -> RatePoint + ?Sized,
{
    let e_ab = correlation_e(&AnalyzerSettings::new(angles.a, angles.b), rate_fn)?;
    let e_abp = correlation_e(&AnalyzerSettings::new(angles.a, angles.b_prime), rate_fn)?;
    let e_apb = correlation_e(&AnalyzerSettings::new(angles.a_prime, angles.b), rate_fn)?;
    let e_apbp = correlation_e(&AnalyzerSettings::new(angles.a_prime, angles.b_prime), rate_fn)?;
    let s_value = (e_ab.e - e_abp.e).abs() + (e_apb.e + e_apbp.e).abs();
    let stat_error = (e_ab.stat_error.powi(2)
        + e_abp.stat_error.powi(2)
        + e_apb.stat_error.powi(2)
        + e_apbp.stat_error.powi(2))
    .sqrt();
    Ok(ChshResult {
        e_values: [e_ab, e_abp, e_apb, e_apbp],
        s_value,
        stat_error,
    })
}

/// E as a function of the angle difference theta - xi over [0, pi).
pub fn bell_scan<F>(rate_fn: &F, grid_steps: usize) -> crate::Result<Vec<(f64, EValue)>>
where
    F: Fn(f64, f64) -> RatePoint + ?Sized,
{
    assert!(grid_steps >= 2, "bell_scan needs at least 2 grid points");
    (0..grid_steps)
        .map(|k| {
            let delta = k as f64 * PI / grid_steps as f64;
            let e = correlation_e(&AnalyzerSettings::new(0.0, delta), rate_fn)?;
            Ok((delta, e))
        })
        .collect()
}

/// Analytic post-selected rate function for a given I0.
pub fn analytic_rate_fn(i0: f64) -> impl Fn(f64, f64) -> RatePoint {
    move |xi, theta| RatePoint {
        xi,
        theta,
        rate: coincidence_rate_analytic(&AnalyzerSettings::new(xi, theta), i0),
        stat_error: 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    /// Closed-form oracle for the classical-limit rate law
    /// `(i0^2/4)(1 - 1/2 sin 2xi sin 2theta)`, fixed by quadrature of the
    /// intensity product (see the coincidence tests).
    fn classical_rate_fn(i0: f64) -> impl Fn(f64, f64) -> RatePoint {
        move |xi, theta| RatePoint {
            xi,
            theta,
            rate: 0.25 * i0 * i0 * (1.0 - 0.5 * (2.0 * xi).sin() * (2.0 * theta).sin()),
            stat_error: 0.0,
        }
    }

    #[test]
    fn e_trivial_points() {
        let rate = analytic_rate_fn(1.0);
        let e = |xi, theta| correlation_e(&AnalyzerSettings::new(xi, theta), &rate).unwrap().e;
        assert_abs_diff_eq!(e(0.3, 0.3), -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e(0.2, 0.2 + FRAC_PI_4), 0.0, epsilon = 1e-12);
        // Oracle: plugging the sin^2 law into the estimator at
        // theta - xi = pi/2 gives +1.
        assert_abs_diff_eq!(e(0.1, 0.1 + FRAC_PI_2), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn e_matches_negative_cos_2delta() {
        let rate = analytic_rate_fn(1.3);
        let mut rng = ChaCha12Rng::seed_from_u64(15);
        for _ in 0..1000 {
            let xi = rng.random_range(-PI..PI);
            let theta = rng.random_range(-PI..PI);
            let e = correlation_e(&AnalyzerSettings::new(xi, theta), &rate).unwrap();
            assert_abs_diff_eq!(e.e, -(2.0 * (theta - xi)).cos(), epsilon = 1e-10);
        }
    }

    #[test]
    fn degenerate_rates_are_an_error() {
        let zero = |xi: f64, theta: f64| RatePoint {
            xi,
            theta,
            rate: 0.0,
            stat_error: 0.0,
        };
        assert!(matches!(
            correlation_e(&AnalyzerSettings::new(0.1, 0.2), &zero),
            Err(crate::Error::DegenerateCorrelation)
        ));
    }

    #[test]
    fn canonical_angles_reach_tsirelson() {
        let result = chsh_s(&ChshAngles::canonical(), &analytic_rate_fn(1.0)).unwrap();
        assert_abs_diff_eq!(result.s_value, 2.0 * 2f64.sqrt(), epsilon = 1e-9);
        for ev in result.e_values {
            assert!(ev.e.abs() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn equal_angles_stay_within_two() {
        let angles = ChshAngles {
            a: 0.4,
            a_prime: 0.4,
            b: 0.4,
            b_prime: 0.4,
        };
        let result = chsh_s(&angles, &analytic_rate_fn(1.0)).unwrap();
        assert!(result.s_value <= 2.0 + 1e-12);
    }

    #[test]
    fn classical_law_never_violates_bell() {
        let rate = classical_rate_fn(1.0);
        let mut rng = ChaCha12Rng::seed_from_u64(21);
        let mut max_s: f64 = 0.0;
        for _ in 0..10_000 {
            let angles = ChshAngles {
                a: rng.random_range(0.0..PI),
                a_prime: rng.random_range(0.0..PI),
                b: rng.random_range(0.0..PI),
                b_prime: rng.random_range(0.0..PI),
            };
            let result = chsh_s(&angles, &rate).unwrap();
            max_s = max_s.max(result.s_value);
        }
        assert!(max_s <= 2.0 + 1e-9);
    }

    #[test]
    fn tsirelson_bound_over_random_angles() {
        let rate = analytic_rate_fn(1.0);
        let mut rng = ChaCha12Rng::seed_from_u64(22);
        let bound = 2.0 * 2f64.sqrt();
        for _ in 0..10_000 {
            let angles = ChshAngles {
                a: rng.random_range(0.0..PI),
                a_prime: rng.random_range(0.0..PI),
                b: rng.random_range(0.0..PI),
                b_prime: rng.random_range(0.0..PI),
            };
            let result = chsh_s(&angles, &rate).unwrap();
            assert!(result.s_value <= bound + 1e-9);
        }
    }

    #[test]
    fn e_is_translation_invariant() {
        let rate = analytic_rate_fn(1.0);
        let mut rng = ChaCha12Rng::seed_from_u64(23);
        for _ in 0..1000 {
            let xi = rng.random_range(0.0..PI);
            let theta = rng.random_range(0.0..PI);
            let offset = rng.random_range(-PI..PI);
            let base = correlation_e(&AnalyzerSettings::new(xi, theta), &rate).unwrap().e;
            let shifted = correlation_e(&AnalyzerSettings::new(xi + offset, theta + offset), &rate)
                .unwrap()
                .e;
            assert!((base - shifted).abs() < 1e-10);
        }
    }

    #[test]
    fn bell_scan_matches_closed_form() {
        let scan = bell_scan(&analytic_rate_fn(1.0), 180).unwrap();
        assert_abs_diff_eq!(scan[0].1.e, -1.0, epsilon = 1e-12);
        let mut worst: f64 = 0.0;
        for (delta, e) in &scan {
            worst = worst.max((e.e + (2.0 * delta).cos()).abs());
        }
        assert!(worst < 1e-9);
    }
}
