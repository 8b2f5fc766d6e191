//! Radial reduction of integrals over balls and all of R^n.
//!
//! For a radial integrand, ∫_{a ≤ |ξ| ≤ b} f(|ξ|) dξ = ω_{n−1} ∫_a^b r^{n−1} f(r) dr,
//! where ω_{n−1} is the surface measure of the unit sphere in R^n.

use std::f64::consts::PI;

use super::adaptive::{integrate, AdaptiveOptions, Estimate};
use crate::error::{Error, Result};

/// Γ(m/2) for a positive integer m, via Γ(1) = 1, Γ(1/2) = √π and Γ(x+1) = xΓ(x).
pub fn gamma_half(m: u32) -> f64 {
    assert!(m >= 1, "gamma_half needs m >= 1");
    let (mut x, mut g) = if m % 2 == 0 {
        (1.0, 1.0)
    } else {
        (0.5, PI.sqrt())
    };
    let target = m as f64 / 2.0;
    if target > 30.0 {
        return libm::lgamma(target);
    }
    while x < target {
        g *= x;
        x += 1.0;
    }
    g
}

/// ln Γ(m/2), for arguments where Γ itself would overflow.
pub fn ln_gamma_half(m: u32) -> f64 {
    assert!(m >= 1, "ln_gamma_half needs m >= 1");
    let (mut x, mut g) = if m % 2 == 0 {
        (1.0f64, 0.0f64)
    } else {
        (0.5, 0.5 * PI.ln())
    };
    let target = m as f64 / 2.0;
    if target > 30.0 {
        return libm::lgamma(target);
    }
    while x < target {
        g += x.ln();
        x += 1.0;
    }
    g
}

/// Surface measure ω_{n−1} = 2π^{n/2}/Γ(n/2) of the unit sphere in R^n.
pub fn sphere_area(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::UnsupportedDimension(0));
    }
    Ok(2.0 * PI.powf(n as f64 / 2.0) / gamma_half(n as u32))
}

/// Certificate that `|f(r)| ≤ scale · r^degree · exp(−rate · r²)` for all r ≥ 0.
///
/// Used to truncate semi-infinite radial integrals with a rigorous tail bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailBound {
    pub scale: f64,
    pub degree: f64,
    pub rate: f64,
}

impl TailBound {
    pub fn gaussian(scale: f64, rate: f64) -> Self {
        TailBound {
            scale,
            degree: 0.0,
            rate,
        }
    }

    /// Upper bound on ω_{n−1} ∫_R^∞ r^{n−1} |f(r)| dr.
    pub fn tail_beyond(&self, n: usize, radius: f64) -> f64 {
        if self.scale == 0.0 {
            return 0.0;
        }
        let omega = sphere_area(n).unwrap_or(2.0);
        // ∫_R^∞ r^m e^{−γr²} dr = Γ(s, γR²) / (2 γ^s) with s = (m+1)/2.
        let m = n as f64 - 1.0 + self.degree;
        let s = 0.5 * (m + 1.0);
        let x = self.rate * radius * radius;
        // Γ(s, x) ≤ x^{s−1} e^{−x} / (1 − (s−1)/x) once x > s − 1 (and without the
        // correction for s ≤ 1).
        let corr = if s > 1.0 {
            let d = 1.0 - (s - 1.0) / x;
            if d <= 0.0 {
                return f64::INFINITY;
            }
            d
        } else {
            1.0
        };
        let ln_upper = (s - 1.0) * x.ln() - x - corr.ln();
        let ln_tail = ln_upper - s * self.rate.ln() - 2f64.ln();
        omega * self.scale * ln_tail.exp()
    }
}

/// Upper limit of a radial integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Upper {
    Finite(f64),
    /// Integrate to infinity, truncating where the certified tail is negligible.
    Infinite(TailBound),
}

/// Description of ω_{n−1} ∫_a^b r^{n−1} f(r) dr.
pub struct RadialIntegralSpec<F> {
    pub dimension: usize,
    pub integrand: F,
    pub lower: f64,
    pub upper: Upper,
    pub tol: f64,
    /// Absolute tolerance on the full integral (including ω_{n−1}).
    pub abs_tol: f64,
    pub panels: usize,
}

impl<F: Fn(f64) -> f64> RadialIntegralSpec<F> {
    pub fn new(dimension: usize, integrand: F, lower: f64, upper: Upper) -> Self {
        RadialIntegralSpec {
            dimension,
            integrand,
            lower,
            upper,
            tol: 1e-10,
            abs_tol: 0.0,
            panels: 1,
        }
    }

    pub fn abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol.max(0.0);
        self
    }

    pub fn tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn panels(mut self, panels: usize) -> Self {
        self.panels = panels.max(1);
        self
    }
}

/// Evaluates a [`RadialIntegralSpec`]. The error estimate includes the
/// certified truncation tail for semi-infinite intervals.
pub fn radial_integral<F: Fn(f64) -> f64>(spec: &RadialIntegralSpec<F>) -> Result<Estimate> {
    let n = spec.dimension;
    let omega = sphere_area(n)?;
    if !(spec.tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    if !(spec.lower >= 0.0) {
        return Err(Error::invalid("lower radius must be nonnegative"));
    }
    let f = &spec.integrand;
    let nm1 = (n - 1) as i32;
    let weighted = |r: f64| {
        let v = f(r);
        if nm1 == 0 {
            v
        } else if v == 0.0 {
            0.0
        } else {
            r.powi(nm1) * v
        }
    };
    let opts = AdaptiveOptions::default()
        .with_rel_tol(spec.tol)
        .with_abs_tol(spec.abs_tol / omega)
        .with_panels(spec.panels);

    match spec.upper {
        Upper::Finite(b) => {
            if !(b > spec.lower) {
                if b == spec.lower {
                    return Ok(Estimate {
                        value: 0.0,
                        error: 0.0,
                        subdivisions: 0,
                    });
                }
                return Err(Error::invalid("upper radius must exceed lower radius"));
            }
            let est = integrate(weighted, spec.lower, b, &opts)?;
            Ok(Estimate {
                value: omega * est.value,
                error: omega * est.error,
                subdivisions: est.subdivisions,
            })
        }
        Upper::Infinite(tail) => {
            if !(tail.rate > 0.0) {
                return Err(Error::invalid(
                    "semi-infinite integral needs a positive Gaussian rate",
                ));
            }
            let s = 0.5 * (n as f64 + tail.degree);
            let ln_term = (1.0 + s.max(0.0)).ln() + tail.scale.max(1.0).ln();
            let mut radius = 1.5 * ((1.0 / spec.tol).ln().max(1.0) + s.max(0.0) * ln_term).sqrt()
                / tail.rate.sqrt();
            radius = radius.max(spec.lower + 1.0 / tail.rate.sqrt());
            let mut est = integrate(&weighted, spec.lower, radius, &opts)?;
            let mut value = omega * est.value;
            let mut error = omega * est.error;
            let mut subdivisions = est.subdivisions;
            for _ in 0..64 {
                let bound = tail.tail_beyond(n, radius);
                if bound <= spec.tol * value.abs()
                    || bound <= spec.abs_tol
                    || bound <= f64::MIN_POSITIVE
                {
                    return Ok(Estimate {
                        value,
                        error: error + bound,
                        subdivisions,
                    });
                }
                let next = radius * 1.25;
                est = integrate(&weighted, radius, next, &opts)?;
                value += omega * est.value;
                error += omega * est.error;
                subdivisions += est.subdivisions;
                radius = next;
            }
            Err(Error::NonConvergence {
                estimate: value,
                error: error + tail.tail_beyond(n, radius),
                subdivisions,
            })
        }
    }
}

/// ∫_{|ξ| ≤ upper} |ξ|^{2k} e^{−t|ξ|²} dξ over R^n (`upper = None` for all of R^n).
///
/// The full-space value uses Γ((n+2k)/2)/Γ(n/2) · t^{−k} (π/t)^{n/2}; bounded
/// balls go through [`radial_integral`].
pub fn gaussian_moment(k: u32, t: f64, n: usize, upper: Option<f64>) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::invalid(format!(
            "gaussian_moment needs t > 0, got {t}"
        )));
    }
    if n == 0 {
        return Err(Error::UnsupportedDimension(0));
    }
    match upper {
        None => Ok(gaussian_moment_full(k, t, n)),
        Some(b) => {
            if !(b >= 0.0) {
                return Err(Error::invalid("ball radius must be nonnegative"));
            }
            if b == 0.0 {
                return Ok(0.0);
            }
            let two_k = 2 * k as i32;
            let spec = RadialIntegralSpec::new(
                n,
                move |r: f64| r.powi(two_k) * (-t * r * r).exp(),
                0.0,
                Upper::Finite(b),
            )
            .tol(1e-12)
            .panels(((b * t.sqrt()) / 2.0).ceil().clamp(1.0, 256.0) as usize);
            Ok(radial_integral(&spec)?.value)
        }
    }
}

fn gaussian_moment_full(k: u32, t: f64, n: usize) -> f64 {
    let ratio = (ln_gamma_half(n as u32 + 2 * k) - ln_gamma_half(n as u32)).exp();
    ratio * t.powi(-(k as i32)) * (PI / t).powf(n as f64 / 2.0)
}
