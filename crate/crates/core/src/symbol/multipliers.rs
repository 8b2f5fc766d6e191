//! Exact Fourier multipliers of the reduced mode equation
//! v'' + r² v' + r² v = 0, v(0) = û0, v'(0) = û1, and of the diffusion-wave
//! profile.

use num_complex::Complex64;

use super::roots::{dispersion_roots, Frequency, Regime, CONFLUENCE_ETA};
use crate::error::{Error, Result};

/// Below this argument sin(x)/x is evaluated by its Taylor series.
pub const SINC_THRESHOLD: f64 = 1e-4;

/// sin(x)/x with the removable singularity at 0 filled in.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < SINC_THRESHOLD {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// Solution operator of one Fourier mode: û(t) = m1·û1 + m0·û0 and
/// û_t(t) = dm1·û1 + dm0·û0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeMultipliers {
    pub m1: f64,
    pub m0: f64,
    pub dm1: f64,
    pub dm0: f64,
}

impl ModeMultipliers {
    pub fn apply(&self, u0_hat: Complex64, u1_hat: Complex64) -> (Complex64, Complex64) {
        (
            self.m1 * u1_hat + self.m0 * u0_hat,
            self.dm1 * u1_hat + self.dm0 * u0_hat,
        )
    }
}

/// The four multipliers as complex numbers, straight from the two-exponential
/// representation in terms of σ1, σ2. Only used as an independent check of
/// [`mode_multipliers`]; it is undefined where the roots coincide.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialMultipliers {
    pub m1: Complex64,
    pub m0: Complex64,
    pub dm1: Complex64,
    pub dm0: Complex64,
}

/// Evaluates (e^{σ1 t} − e^{σ2 t})/(σ1 − σ2) and companions literally.
pub fn exponential_multipliers(t: f64, r: Frequency) -> Result<ExponentialMultipliers> {
    let d = dispersion_roots(r, CONFLUENCE_ETA);
    let (s1, s2) = (d.sigma1, d.sigma2);
    let gap = s1 - s2;
    if gap.norm() == 0.0 {
        return Err(Error::invalid(
            "exponential form needs distinct roots (r not in {0, 2})",
        ));
    }
    let e1 = (s1 * t).exp();
    let e2 = (s2 * t).exp();
    Ok(ExponentialMultipliers {
        m1: (e1 - e2) / gap,
        m0: (s1 * e2 - s2 * e1) / gap,
        dm1: (s1 * e1 - s2 * e2) / gap,
        dm0: (s1 * s2 * (e2 - e1)) / gap,
    })
}

/// Exact mode multipliers at time `t` and radial frequency `r`.
///
/// The oscillatory regime uses e^{−r²t/2}-damped trigonometric forms, the
/// overdamped regime real exponentials built around the slow root, and the
/// band |r − 2| ≤ η the power series in q = r²(r² − 4)t²/4, which is exact
/// and free of the 0/0 at the double root.
pub fn mode_multipliers(t: f64, r: Frequency) -> ModeMultipliers {
    mode_multipliers_with(t, r, CONFLUENCE_ETA)
}

pub fn mode_multipliers_with(t: f64, r: Frequency, eta: f64) -> ModeMultipliers {
    let r = r.value();
    if r == 0.0 {
        return ModeMultipliers {
            m1: t,
            m0: 1.0,
            dm1: 1.0,
            dm0: 0.0,
        };
    }
    match Regime::classify(r, eta) {
        Regime::Confluent => confluent(t, r).unwrap_or_else(|| {
            if r < 2.0 {
                oscillatory(t, r)
            } else {
                overdamped(t, r)
            }
        }),
        Regime::Oscillatory => oscillatory(t, r),
        Regime::Overdamped => overdamped(t, r),
    }
}

fn oscillatory(t: f64, r: f64) -> ModeMultipliers {
    let decay = 0.5 * r * r;
    let omega = 0.5 * r * ((2.0 - r) * (2.0 + r)).sqrt();
    let phase = omega * t;
    let damp = (-decay * t).exp();
    let sin_over = t * sinc(phase);
    let c = phase.cos();
    let m1 = damp * sin_over;
    ModeMultipliers {
        m1,
        m0: damp * (c + decay * sin_over),
        dm1: damp * (c - decay * sin_over),
        dm0: -r * r * m1,
    }
}

fn overdamped(t: f64, r: f64) -> ModeMultipliers {
    let d = dispersion_roots(Frequency::of(r), 0.0);
    let (s1, s2) = (d.sigma1.re, d.sigma2.re);
    let gap = s1 - s2;
    let e1 = (s1 * t).exp();
    let m1 = e1 * (-(-gap * t).exp_m1()) / gap;
    ModeMultipliers {
        m1,
        m0: e1 - s1 * m1,
        dm1: s1 * m1 + (s2 * t).exp(),
        dm0: -r * r * m1,
    }
}

// Beyond this |q| the closed forms are well conditioned and the series is
// no longer cheap.
const SERIES_LIMIT: f64 = 400.0;

fn confluent(t: f64, r: f64) -> Option<ModeMultipliers> {
    let half_rt = 0.5 * r * t;
    let q = half_rt * half_rt * (r - 2.0) * (r + 2.0);
    if q.abs() > SERIES_LIMIT {
        return None;
    }
    // sinh(√q)/√q and cosh(√q) as entire series in q.
    let mut shape = 0.0;
    let mut cosh = 0.0;
    let mut term_c = 1.0;
    let mut term_s = 1.0;
    for k in 0..400 {
        shape += term_s;
        cosh += term_c;
        let kf = k as f64;
        term_c *= q / ((2.0 * kf + 1.0) * (2.0 * kf + 2.0));
        term_s *= q / ((2.0 * kf + 2.0) * (2.0 * kf + 3.0));
        if term_c.abs() <= 1e-17 * cosh.abs() && term_s.abs() <= 1e-17 * shape.abs() {
            break;
        }
    }
    let decay = 0.5 * r * r;
    let damp = (-decay * t).exp();
    let sin_over = t * shape;
    let m1 = damp * sin_over;
    Some(ModeMultipliers {
        m1,
        m0: damp * (cosh + decay * sin_over),
        dm1: damp * (cosh - decay * sin_over),
        dm0: -r * r * m1,
    })
}

/// The profile symbols e^{−tr²/2} sin(tr)/r and e^{−tr²/2} cos(tr).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileMultipliers {
    pub p_sin: f64,
    pub p_cos: f64,
}

impl ProfileMultipliers {
    pub fn combine(&self, p0: f64, p1: f64) -> f64 {
        p1 * self.p_sin + p0 * self.p_cos
    }
}

pub fn profile_multipliers(t: f64, r: Frequency) -> ProfileMultipliers {
    let r = r.value();
    let damp = (-0.5 * t * r * r).exp();
    let x = t * r;
    ProfileMultipliers {
        p_sin: damp * t * sinc(x),
        p_cos: damp * x.cos(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::{E, PI};

    fn mm(t: f64, r: f64) -> ModeMultipliers {
        mode_multipliers(t, Frequency::of(r))
    }

    #[test]
    fn zero_frequency_is_double_integrator() {
        for &t in &[0.0, 1.5, 1e3] {
            let m = mm(t, 0.0);
            assert_eq!((m.m1, m.m0, m.dm1, m.dm0), (t, 1.0, 1.0, 0.0));
        }
    }

    #[test]
    fn initial_conditions() {
        for &r in &[1.5, 0.01, 2.0, 2.00005, 3.0, 50.0] {
            let m = mm(0.0, r);
            assert_eq!(m.m1, 0.0);
            assert_relative_eq!(m.m0, 1.0, max_relative = 1e-15);
            assert_relative_eq!(m.dm1, 1.0, max_relative = 1e-15);
            assert_eq!(m.dm0, 0.0);
        }
    }

    #[test]
    fn double_root_values() {
        let m = mm(1.0, 2.0);
        assert_relative_eq!(m.m1, E.powi(-2), max_relative = 1e-15);
        assert_relative_eq!(m.m0, 3.0 * E.powi(-2), max_relative = 1e-15);
        assert_relative_eq!(m.m1, 0.135_335_283_236_612_7, max_relative = 1e-15);
        assert_relative_eq!(m.m0, 0.406_005_849_709_838, max_relative = 1e-15);
        // (1 − 2t)e^{−2t} is the derivative of te^{−2t}.
        assert_relative_eq!(m.dm1, -E.powi(-2), max_relative = 1e-15);
    }

    #[test]
    fn confluent_continuity() {
        let h = 1e-6;
        for &t in &[0.1, 0.25, 0.4] {
            let c = mm(t, 2.0);
            for r in [2.0 - h, 2.0 + h] {
                let m = mm(t, r);
                assert_relative_eq!(m.m1, c.m1, max_relative = 1e-6);
                assert_relative_eq!(m.m0, c.m0, max_relative = 1e-6);
            }
        }
        // Longer times: the multipliers move by O(t·h) relative, nothing more.
        for &t in &[1.0, 10.0, 100.0] {
            let c = mm(t, 2.0);
            for r in [2.0 - h, 2.0 + h, 2.0 - 2e-4, 2.0 + 2e-4] {
                let m = mm(t, r);
                let tol = (r - 2.0).abs() * (1.0 + 2.0 * t + t * t);
                assert!((m.m1 - c.m1).abs() <= tol * c.m1.abs(), "t={t} r={r}");
                assert!((m.m0 - c.m0).abs() <= tol * c.m0.abs(), "t={t} r={r}");
            }
        }
    }

    #[test]
    fn band_edges_agree_with_closed_forms() {
        // Just inside and outside the band the series and closed forms meet.
        for &t in &[0.5, 3.0, 40.0, 200.0] {
            for &r in &[2.0 - 1e-4, 2.0 + 1e-4] {
                let series = confluent(t, r).unwrap();
                let closed = if r < 2.0 {
                    oscillatory(t, r)
                } else {
                    overdamped(t, r)
                };
                let scale = (-0.5 * r * r * t).exp() * (1.0 + t);
                assert!(
                    (series.m1 - closed.m1).abs() <= 1e-12 * scale,
                    "t={t} r={r}"
                );
                assert!(
                    (series.m0 - closed.m0).abs() <= 1e-12 * scale,
                    "t={t} r={r}"
                );
                assert!(
                    (series.dm1 - closed.dm1).abs() <= 1e-12 * scale,
                    "t={t} r={r}"
                );
            }
        }
    }

    #[test]
    fn profile_examples() {
        let p = profile_multipliers(5.0, Frequency::of(0.0));
        assert_eq!(p.p_sin, 5.0);
        assert_eq!(p.p_cos, 1.0);

        let p = profile_multipliers(PI, Frequency::of(1.0));
        assert!(p.p_sin.abs() < 1e-15);

        // Independently: e^{-1/2} = 0.60653065971263342, sin 1 = 0.8414709848078965,
        // cos 1 = 0.54030230586813977.
        let p = profile_multipliers(1.0, Frequency::of(1.0));
        assert_relative_eq!(
            p.p_sin,
            0.606_530_659_712_633_4 * 0.841_470_984_807_896_5,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            p.p_cos,
            0.606_530_659_712_633_4 * 0.540_302_305_868_139_8,
            max_relative = 1e-15
        );
    }

    #[test]
    fn sinc_branch_is_seamless() {
        let below = SINC_THRESHOLD * (1.0 - 1e-12);
        let above = SINC_THRESHOLD * (1.0 + 1e-12);
        assert_relative_eq!(sinc(below), sinc(above), max_relative = 1e-15);
        assert_eq!(sinc(0.0), 1.0);
    }

    #[test]
    fn exponential_form_rejects_coincident_roots() {
        assert!(exponential_multipliers(1.0, Frequency::of(0.0)).is_err());
        assert!(exponential_multipliers(1.0, Frequency::of(2.0)).is_err());
    }

    proptest! {
        #[test]
        fn trig_matches_exponential(t in 0.0f64..200.0, r in 1e-6f64..1.9999) {
            let m = mm(t, r);
            let e = exponential_multipliers(t, Frequency::of(r)).unwrap();
            let decay = 0.5 * r * r;
            let omega = 0.5 * r * ((2.0 - r) * (2.0 + r)).sqrt();
            let env = (-decay * t).exp();
            let s_env = env * t.min(1.0 / omega);
            prop_assert!((m.m1 - e.m1.re).abs() <= 1e-12 * (m.m1.abs() + s_env));
            prop_assert!((m.m0 - e.m0.re).abs() <= 1e-12 * (m.m0.abs() + env * (1.0 + decay * t.min(1.0 / omega))));
            prop_assert!((m.dm1 - e.dm1.re).abs() <= 1e-12 * (m.dm1.abs() + env * (1.0 + decay * t.min(1.0 / omega))));
            prop_assert!((m.dm0 - e.dm0.re).abs() <= 1e-12 * (m.dm0.abs() + r * r * s_env));
        }

        #[test]
        fn exponential_form_is_real(t in 0.0f64..50.0, r in prop_oneof![1e-3f64..1.999, 2.001f64..30.0]) {
            let e = exponential_multipliers(t, Frequency::of(r)).unwrap();
            for z in [e.m1, e.m0, e.dm1, e.dm0] {
                prop_assert!(z.im.abs() <= 1e-13 * z.norm().max(f64::MIN_POSITIVE));
            }
        }

        #[test]
        fn velocity_of_m0(t in 0.0f64..100.0, r in 0.0f64..20.0) {
            let m = mm(t, r);
            prop_assert!((m.dm0 + r * r * m.m1).abs() <= 1e-12 * (m.dm0.abs().max(f64::MIN_POSITIVE)));
        }

        #[test]
        fn multiplier_bounds(t in 0.0f64..500.0, r in 0.0f64..50.0) {
            let m = mm(t, r);
            prop_assert!(m.m1.abs() <= t * (1.0 + 1e-14) + 1e-300);
            prop_assert!(m.m0.abs() <= 1.0 + 1e-14);
        }

        #[test]
        fn mode_ode_residual(t in 0.5f64..60.0, r in 0.05f64..6.0) {
            // ẍ + r²ẋ + r²x = 0, with ẍ from a central difference of the velocity.
            let h = 1e-4;
            let m = mm(t, r);
            let p = mm(t + h, r);
            let q = mm(t - h, r);
            let r2 = r * r;
            for (x, dx, ddx) in [
                (m.m1, m.dm1, (p.dm1 - q.dm1) / (2.0 * h)),
                (m.m0, m.dm0, (p.dm0 - q.dm0) / (2.0 * h)),
            ] {
                let scale = ddx.abs() + r2 * dx.abs() + r2 * x.abs();
                prop_assert!((ddx + r2 * dx + r2 * x).abs() <= 1e-6 * scale.max(1e-300));
            }
        }

        #[test]
        fn profile_envelopes(t in 0.0f64..1e4, r in 0.0f64..5.0) {
            let p = profile_multipliers(t, Frequency::of(r));
            let env = (-0.5 * t * r * r).exp();
            prop_assert!(p.p_cos.abs() <= env * (1.0 + 1e-15));
            prop_assert!(p.p_sin.abs() <= t * env * (1.0 + 1e-15));
        }
    }
}
