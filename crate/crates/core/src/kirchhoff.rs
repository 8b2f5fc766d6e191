//! Physical-space diffusion-wave profiles for n = 2, 3: the free-wave
//! propagator (spherical means for n = 3, weighted disk means for n = 2)
//! applied to the Gaussian kernel G(t, ·).

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

/// G(t, x) = (2πt)^{−n/2} e^{−|x|²/(2t)}, the inverse transform of e^{−t|ξ|²/2}.
pub fn gaussian_kernel_eval(t: f64, x: &[f64]) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::invalid(format!(
            "Gaussian kernel needs t > 0, got {t}"
        )));
    }
    Ok(kernel(t, x))
}

fn kernel(t: f64, x: &[f64]) -> f64 {
    let r2: f64 = x.iter().map(|v| v * v).sum();
    (2.0 * PI * t).powf(-(x.len() as f64) / 2.0) * (-0.5 * r2 / t).exp()
}

/// Coefficients of the propagator formulas, by multi-index order |α|.
///
/// W(t)h = a₀ t ∮ h(x + tz) dμ(z) and
/// ∂_t W(t)h = b₀ ∮ h(x + tz) dμ(z) + b₁ t ∮ z·∇h(x + tz) dμ(z),
/// with dμ surface measure on S² for n = 3 and (1 − |z|²)^{−1/2} dz on the
/// unit disk for n = 2.
#[derive(Debug, Clone, PartialEq)]
pub struct KirchhoffCoefficients {
    pub dimension: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    /// Largest plane-wave eigencheck defect seen when validating.
    pub eigencheck_defect: f64,
}

/// Returns the coefficients after confirming W and ∂_t W act on cos(k·x) as
/// sin(t|k|)/|k| and cos(t|k|) for |k| ∈ {0.5, 1, 2}.
pub fn kirchhoff_coefficients(n: usize) -> Result<KirchhoffCoefficients> {
    let c = match n {
        3 => 1.0 / (4.0 * PI),
        2 => 1.0 / (2.0 * PI),
        _ => return Err(Error::UnsupportedDimension(n)),
    };
    let mut coeffs = KirchhoffCoefficients {
        dimension: n,
        a: vec![c],
        b: vec![c, c],
        eigencheck_defect: 0.0,
    };
    let op = Propagator::with_coefficients(n, 64, 128, coeffs.clone())?;
    let defect = op.plane_wave_defect(1.3)?;
    if defect > 1e-6 {
        return Err(Error::invalid(format!(
            "propagator coefficients fail the plane-wave check for n = {n}: defect {defect:e}"
        )));
    }
    coeffs.eigencheck_defect = defect;
    Ok(coeffs)
}

/// Quadrature nodes z and weights for ∮ f dμ.
#[derive(Debug, Clone)]
struct MeasureRule {
    nodes: Vec<[f64; 3]>,
    weights: Vec<f64>,
}

impl MeasureRule {
    /// Gauss–Legendre in cos ϑ times trapezoid in azimuth.
    fn sphere(n_polar: usize, n_azimuth: usize) -> Self {
        let gl = GaussLegendre::new(n_polar);
        let mut nodes = Vec::with_capacity(n_polar * n_azimuth);
        let mut weights = Vec::with_capacity(n_polar * n_azimuth);
        let dphi = 2.0 * PI / n_azimuth as f64;
        for (mu, w) in gl.mapped(-1.0, 1.0) {
            let s = (1.0 - mu * mu).max(0.0).sqrt();
            for j in 0..n_azimuth {
                let phi = j as f64 * dphi;
                nodes.push([s * phi.cos(), s * phi.sin(), mu]);
                weights.push(w * dphi);
            }
        }
        MeasureRule { nodes, weights }
    }

    /// Unit disk with weight (1 − ρ²)^{−1/2}; ρ = sin ψ turns it into
    /// sin ψ dψ dφ on [0, π/2] × [0, 2π).
    fn disk(n_radial: usize, n_azimuth: usize) -> Self {
        let gl = GaussLegendre::new(n_radial);
        let mut nodes = Vec::with_capacity(n_radial * n_azimuth);
        let mut weights = Vec::with_capacity(n_radial * n_azimuth);
        let dphi = 2.0 * PI / n_azimuth as f64;
        for (psi, w) in gl.mapped(0.0, 0.5 * PI) {
            let rho = psi.sin();
            for j in 0..n_azimuth {
                let phi = j as f64 * dphi;
                nodes.push([rho * phi.cos(), rho * phi.sin(), 0.0]);
                weights.push(w * rho * dphi);
            }
        }
        MeasureRule { nodes, weights }
    }
}

/// The propagator pair W(t), ∂_t W(t) discretized by a fixed product rule.
#[derive(Debug, Clone)]
pub struct Propagator {
    dimension: usize,
    rule: MeasureRule,
    coeffs: KirchhoffCoefficients,
}

impl Propagator {
    /// `n_polar` nodes in the polar (n = 3) or radial (n = 2) direction and
    /// `n_azimuth` in azimuth.
    pub fn new(n: usize, n_polar: usize, n_azimuth: usize) -> Result<Self> {
        let coeffs = kirchhoff_coefficients(n)?;
        Self::with_coefficients(n, n_polar, n_azimuth, coeffs)
    }

    /// Rule resolving G(t, ·) on the unit sphere scaled by t: about eight
    /// nodes per angular width t^{−1/2}.
    pub fn for_time(n: usize, t: f64) -> Result<Self> {
        let polar = (8.0 * PI * t.max(1.0).sqrt()).ceil().clamp(32.0, 512.0) as usize;
        // A multiple of 4 keeps the rule invariant under x ↔ y.
        let azimuth = 4 * polar.div_ceil(2);
        Self::new(n, polar, azimuth)
    }

    fn with_coefficients(
        n: usize,
        n_polar: usize,
        n_azimuth: usize,
        coeffs: KirchhoffCoefficients,
    ) -> Result<Self> {
        if n_polar == 0 || n_azimuth == 0 {
            return Err(Error::invalid(
                "quadrature rule needs at least one node per direction",
            ));
        }
        let rule = match n {
            3 => MeasureRule::sphere(n_polar, n_azimuth),
            2 => MeasureRule::disk(n_polar, n_azimuth),
            _ => return Err(Error::UnsupportedDimension(n)),
        };
        Ok(Propagator {
            dimension: n,
            rule,
            coeffs,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn coefficients(&self) -> &KirchhoffCoefficients {
        &self.coeffs
    }

    /// (W(t)h(x), ∂_t W(t)h(x)) given h and its gradient at a point.
    pub fn apply<H>(&self, t: f64, x: &[f64], h: H) -> (f64, f64)
    where
        H: Fn(&[f64]) -> (f64, [f64; 3]),
    {
        let n = self.dimension;
        let (mut mean, mut flux) = (0.0, 0.0);
        let mut y = [0.0; 3];
        for (z, &w) in self.rule.nodes.iter().zip(&self.rule.weights) {
            for i in 0..n {
                y[i] = x[i] + t * z[i];
            }
            let (v, g) = h(&y[..n]);
            mean += w * v;
            flux += w * (0..n).map(|i| z[i] * g[i]).sum::<f64>();
        }
        let c = &self.coeffs;
        (c.a[0] * t * mean, c.b[0] * mean + c.b[1] * t * flux)
    }

    /// P1 W(t)G(t,·) + P0 ∂_s W(s)G(t,·)|_{s=t} at x.
    pub fn profile(&self, t: f64, x: &[f64], p0: f64, p1: f64) -> Result<f64> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::invalid(format!("profile needs t > 0, got {t}")));
        }
        if x.len() != self.dimension {
            return Err(Error::invalid(
                "point dimension differs from propagator dimension",
            ));
        }
        if p0 == 0.0 && p1 == 0.0 {
            return Ok(0.0);
        }
        let (w, dw) = self.apply(t, x, |y| {
            let g = kernel(t, y);
            let mut grad = [0.0; 3];
            for (gi, yi) in grad.iter_mut().zip(y) {
                *gi = -yi / t * g;
            }
            (g, grad)
        });
        Ok(p1 * w + p0 * dw)
    }

    /// Largest defect of the plane-wave eigen-relations over |k| ∈ {0.5, 1, 2}.
    pub fn plane_wave_defect(&self, t: f64) -> Result<f64> {
        let n = self.dimension;
        let dir: &[f64] = if n == 3 {
            &[0.48, 0.6, 0.64]
        } else {
            &[0.6, 0.8]
        };
        let x: &[f64] = if n == 3 {
            &[0.3, -0.7, 0.2]
        } else {
            &[0.3, -0.7]
        };
        let mut worst = 0.0f64;
        for &km in &[0.5, 1.0, 2.0] {
            let k: Vec<f64> = dir.iter().map(|d| d * km).collect();
            let (w, dw) = self.apply(t, x, |y| {
                let ph: f64 = k.iter().zip(y).map(|(a, b)| a * b).sum();
                let mut g = [0.0; 3];
                for (gi, ki) in g.iter_mut().zip(&k) {
                    *gi = -ki * ph.sin();
                }
                (ph.cos(), g)
            });
            let hx = k.iter().zip(x).map(|(a, b)| a * b).sum::<f64>().cos();
            worst = worst
                .max((w - hx * (t * km).sin() / km).abs())
                .max((dw - hx * (t * km).cos()).abs());
        }
        Ok(worst)
    }
}

/// Profile at x ∈ R³ from spherical means, with a rule sized for t.
pub fn profile_n3(t: f64, x: &[f64], p0: f64, p1: f64) -> Result<f64> {
    Propagator::for_time(3, t)?.profile(t, x, p0, p1)
}

/// Profile at x ∈ R² from weighted disk means, with a rule sized for t.
pub fn profile_n2(t: f64, x: &[f64], p0: f64, p1: f64) -> Result<f64> {
    Propagator::for_time(2, t)?.profile(t, x, p0, p1)
}
