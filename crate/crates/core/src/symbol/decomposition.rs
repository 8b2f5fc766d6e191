//! Low-frequency splitting of the exact solution into the diffusion-wave
//! profile plus explicit remainder terms K1, K2, K3.

use num_complex::Complex64;

use super::multipliers::{exponential_multipliers, mode_multipliers, profile_multipliers, sinc};
use super::roots::Frequency;
use crate::data::OscillatoryParts;
use crate::error::{Error, Result};

/// Everything known about the data at one frequency ξ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencySample {
    pub u0_hat: Complex64,
    pub u1_hat: Complex64,
    pub p0: f64,
    pub p1: f64,
    pub osc0: OscillatoryParts,
    pub osc1: OscillatoryParts,
}

/// The three explicit remainder terms at one (t, ξ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KTerms {
    pub k1: Complex64,
    pub k2: Complex64,
    pub k3: Complex64,
}

struct TrigPieces {
    damp: f64,
    phase: f64,
    sqrt4: f64,
}

fn trig_pieces(t: f64, r: f64) -> TrigPieces {
    let sqrt4 = ((2.0 - r) * (2.0 + r)).sqrt();
    TrigPieces {
        damp: (-0.5 * t * r * r).exp(),
        phase: 0.5 * t * r * sqrt4,
        sqrt4,
    }
}

fn check_low(r: f64) -> Result<()> {
    if !(0.0..2.0).contains(&r) {
        return Err(Error::invalid(format!(
            "low-frequency decomposition needs 0 <= |xi| < 2, got {r}"
        )));
    }
    Ok(())
}

/// K1 = P0 r e^{−tr²/2} sin(tr√(4−r²)/2)/√(4−r²), K2 = (A1 − iB1)·m1,
/// K3 = (A0 − iB0)·m0, with m1, m0 taken from the two-exponential form.
pub fn k_terms_explicit(
    t: f64,
    r: Frequency,
    p0: f64,
    osc0: OscillatoryParts,
    osc1: OscillatoryParts,
) -> Result<KTerms> {
    let r = r.value();
    check_low(r)?;
    let tp = trig_pieces(t, r);
    let k1 = p0 * r * tp.damp * tp.phase.sin() / tp.sqrt4;
    let (m1, m0) = if r == 0.0 {
        (Complex64::new(t, 0.0), Complex64::new(1.0, 0.0))
    } else {
        let e = exponential_multipliers(t, Frequency::of(r))?;
        (e.m1, e.m0)
    };
    Ok(KTerms {
        k1: Complex64::new(k1, 0.0),
        k2: osc1.as_complex() * m1,
        k3: osc0.as_complex() * m0,
    })
}

/// û(t,ξ) minus the right-hand side of the low-frequency identity
///
/// û = 2P1 e^{−tr²/2} sin(φ)/(r√(4−r²)) + P0 e^{−tr²/2} cos(φ) + K1 + K2 + K3,
/// φ = tr√(4−r²)/2.
///
/// Mathematically zero; the left side comes from [`mode_multipliers`] and the
/// right side from the explicit trigonometric and exponential forms.
pub fn decomposition_residual(t: f64, r: Frequency, s: &FrequencySample) -> Result<Complex64> {
    let rv = r.value();
    check_low(rv)?;
    let m = mode_multipliers(t, r);
    let (u, _) = m.apply(s.u0_hat, s.u1_hat);

    let tp = trig_pieces(t, rv);
    // 2 sin(φ)/(r√(4−r²)) = t·sinc(φ) since φ = t·r√(4−r²)/2.
    let sin_part = s.p1 * tp.damp * t * sinc(tp.phase);
    let cos_part = s.p0 * tp.damp * tp.phase.cos();
    let k = k_terms_explicit(t, r, s.p0, s.osc0, s.osc1)?;
    Ok(u - (sin_part + cos_part + k.k1 + k.k2 + k.k3))
}

/// |û(t,ξ) − (P1 p_sin + P0 p_cos)|², the integrand of the low-frequency error.
pub fn low_freq_error_integrand(
    t: f64,
    r: Frequency,
    u0_hat: Complex64,
    u1_hat: Complex64,
    p0: f64,
    p1: f64,
) -> f64 {
    let m = mode_multipliers(t, r);
    let (u, _) = m.apply(u0_hat, u1_hat);
    let p = profile_multipliers(t, r);
    (u - p.combine(p0, p1)).norm_sqr()
}

/// Mode energy |û_t|² + r²|û|².
pub fn hf_energy(t: f64, r: Frequency, u0_hat: Complex64, u1_hat: Complex64) -> f64 {
    let m = mode_multipliers(t, r);
    let (u, ut) = m.apply(u0_hat, u1_hat);
    let rv = r.value();
    ut.norm_sqr() + rv * rv * u.norm_sqr()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::dispersion_roots;
    use proptest::prelude::*;

    fn parts(a: f64, b: f64) -> OscillatoryParts {
        OscillatoryParts { a, b }
    }

    fn sample(u0: Complex64, u1: Complex64, p0: f64, p1: f64) -> FrequencySample {
        FrequencySample {
            u0_hat: u0,
            u1_hat: u1,
            p0,
            p1,
            osc0: OscillatoryParts::from_spectrum(u0, p0),
            osc1: OscillatoryParts::from_spectrum(u1, p1),
        }
    }

    #[test]
    fn k_terms_vanish_without_data() {
        let k = k_terms_explicit(
            3.0,
            Frequency::of(0.4),
            0.0,
            parts(0.0, 0.0),
            parts(0.0, 0.0),
        )
        .unwrap();
        assert_eq!(k.k1, Complex64::new(0.0, 0.0));
        assert_eq!(k.k2.norm(), 0.0);
        assert_eq!(k.k3.norm(), 0.0);
    }

    #[test]
    fn k_terms_at_time_zero() {
        let k = k_terms_explicit(
            0.0,
            Frequency::of(0.3),
            1.7,
            parts(0.2, -0.1),
            parts(0.5, 0.4),
        )
        .unwrap();
        assert_eq!(k.k1.re, 0.0);
        assert!((k.k3 - Complex64::new(0.2, 0.1)).norm() < 1e-15);
        assert!(k.k2.norm() < 1e-15);
    }

    #[test]
    fn radial_data_give_real_terms() {
        let k = k_terms_explicit(
            12.0,
            Frequency::of(0.2),
            1.0,
            parts(-0.03, 0.0),
            parts(-0.01, 0.0),
        )
        .unwrap();
        assert!(k.k2.im.abs() <= 1e-15 * k.k2.norm());
        assert!(k.k3.im.abs() <= 1e-15 * k.k3.norm());
    }

    #[test]
    fn rejects_high_frequency() {
        let z = parts(0.0, 0.0);
        assert!(k_terms_explicit(1.0, Frequency::of(2.0), 1.0, z, z).is_err());
        let s = sample(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), 1.0, 0.0);
        assert!(decomposition_residual(1.0, Frequency::of(2.5), &s).is_err());
    }

    #[test]
    fn constant_spectra_residual() {
        let s = sample(
            Complex64::new(1.3, 0.0),
            Complex64::new(-0.7, 0.0),
            1.3,
            -0.7,
        );
        for &t in &[0.0, 1.0, 50.0, 1e3] {
            for &r in &[1e-6, 0.1, 0.5, 1.2] {
                let res = decomposition_residual(t, Frequency::of(r), &s).unwrap();
                assert!(res.norm() <= 1e-12 * 4.0, "t={t} r={r}: {res}");
            }
        }
    }

    #[test]
    fn integrand_at_origin_and_time_zero() {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        assert_eq!(
            low_freq_error_integrand(10.0, Frequency::of(0.0), one, zero, 1.0, 0.0),
            0.0
        );
        let u0 = Complex64::new(0.8, -0.3);
        let v = low_freq_error_integrand(0.0, Frequency::of(0.4), u0, zero, 1.0, 0.0);
        assert!((v - (u0 - 1.0).norm_sqr()).abs() < 1e-15);
    }

    #[test]
    fn energy_examples() {
        let u0 = Complex64::new(0.3, 0.1);
        let u1 = Complex64::new(-0.2, 0.5);
        let r = 1.7;
        let e0 = hf_energy(0.0, Frequency::of(r), u0, u1);
        assert!((e0 - (u1.norm_sqr() + r * r * u0.norm_sqr())).abs() < 1e-15);
        for &t in &[0.0, 3.0, 100.0] {
            let e = hf_energy(t, Frequency::of(0.0), u0, Complex64::new(1.0, 0.0));
            assert_eq!(e, 1.0);
        }
    }

    #[test]
    fn energy_decay_rate_overdamped() {
        // Log-linear fit of the energy on [0, 10] recovers 2|σ1(3)|.
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let pts: Vec<(f64, f64)> = (0..=200)
            .map(|i| {
                let t = 10.0 * i as f64 / 200.0;
                (t, hf_energy(t, Frequency::of(3.0), zero, one).ln())
            })
            .collect();
        let n = pts.len() as f64;
        let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
        let rate = -sxy / sxx;
        let expected = 2.0 * dispersion_roots(Frequency::of(3.0), 1e-4).sigma1.re.abs();
        assert!((expected - 2.291_796_067_500_631).abs() < 1e-12);
        assert!((rate - expected).abs() <= 0.05 * expected, "rate {rate}");
    }

    proptest! {
        #[test]
        fn identity_holds(
            t in 0.0f64..500.0,
            r in 1e-5f64..1.99,
            u0r in -2.0f64..2.0, u0i in -2.0f64..2.0,
            u1r in -2.0f64..2.0, u1i in -2.0f64..2.0,
            p0 in -2.0f64..2.0, p1 in -2.0f64..2.0,
        ) {
            let s = sample(Complex64::new(u0r, u0i), Complex64::new(u1r, u1i), p0, p1);
            let res = decomposition_residual(t, Frequency::of(r), &s).unwrap();
            let scale = s.u0_hat.norm() + s.u1_hat.norm() + p0.abs() + p1.abs();
            prop_assert!(res.norm() <= 1e-10 * scale);
        }
    }
}
