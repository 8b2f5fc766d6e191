use num_complex::Complex64;

/// Half-width of the band around r = 2 treated as the double-root regime.
pub const CONFLUENCE_ETA: f64 = 1e-4;

/// Radial frequency r = |ξ| ≥ 0.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Frequency(f64);

impl Frequency {
    /// Radial frequency from a scalar; the sign is discarded since only |ξ| enters.
    pub fn of(r: f64) -> Self {
        debug_assert!(r.is_finite(), "frequency must be finite");
        Frequency(r.abs())
    }

    /// Euclidean norm of a frequency vector.
    pub fn of_vector(xi: &[f64]) -> Self {
        Frequency(xi.iter().map(|x| x * x).sum::<f64>().sqrt())
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<f64> for Frequency {
    fn from(r: f64) -> Self {
        Frequency::of(r)
    }
}

/// Which closed form governs λ² + r²λ + r² = 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Complex-conjugate roots, r < 2 − η.
    Oscillatory,
    /// Near-double root, |r − 2| ≤ η.
    Confluent,
    /// Distinct real roots, r > 2 + η.
    Overdamped,
}

impl Regime {
    pub fn classify(r: f64, eta: f64) -> Self {
        if (r - 2.0).abs() <= eta {
            Regime::Confluent
        } else if r < 2.0 {
            Regime::Oscillatory
        } else {
            Regime::Overdamped
        }
    }
}

/// Roots σ1, σ2 of λ² + r²λ + r² = 0.
///
/// σ1 is the root with the larger real part (the slow one in the overdamped
/// regime) and carries the positive imaginary part when the roots are complex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionRoots {
    pub r: f64,
    pub sigma1: Complex64,
    pub sigma2: Complex64,
    pub regime: Regime,
}

/// Evaluates the dispersion roots at radial frequency `r`.
///
/// Below r = 2 the roots are (−r² ± i r√(4−r²))/2 with 4 − r² formed as
/// (2−r)(2+r). Above r = 2 the slow root is −2r/(r + √(r²−4)), which avoids
/// the cancellation in (−r² + r√(r²−4))/2 at large r.
pub fn dispersion_roots(r: Frequency, eta: f64) -> DispersionRoots {
    let r = r.value();
    let regime = Regime::classify(r, eta);
    let (sigma1, sigma2) = if r <= 2.0 {
        let re = -0.5 * r * r;
        let im = 0.5 * r * ((2.0 - r) * (2.0 + r)).sqrt();
        (Complex64::new(re, im), Complex64::new(re, -im))
    } else {
        let d = ((r - 2.0) * (r + 2.0)).sqrt();
        let slow = -2.0 * r / (r + d);
        let fast = -0.5 * r * (r + d);
        (Complex64::new(slow, 0.0), Complex64::new(fast, 0.0))
    };
    DispersionRoots {
        r,
        sigma1,
        sigma2,
        regime,
    }
}

impl DispersionRoots {
    /// |σ1 − σ2| = r√|4 − r²|.
    pub fn gap(&self) -> f64 {
        self.r * ((2.0 - self.r) * (2.0 + self.r)).abs().sqrt()
    }
}
