use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{
    gamma_half, integrate, ln_gamma_half, radial_integral, sphere_area, AdaptiveOptions,
    RadialIntegralSpec, Upper,
};

/// Initial data sampled on the uniform periodic grid x_j = −L/2 + j·L/N.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSamples {
    pub box_len: f64,
    pub points: usize,
    pub values: Vec<f64>,
}

/// Built-in initial-data families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// amplitude · exp(−|x − center|²/(2 width²)).
    Gaussian {
        amplitude: f64,
        center: Vec<f64>,
        width: f64,
    },
    /// Gaussian at +offset minus the same Gaussian at −offset; total mass zero.
    Dipole {
        amplitude: f64,
        offset: Vec<f64>,
        width: f64,
    },
    /// amplitude · (1 − |x|²/radius²)^power on the ball |x| < radius.
    Bump {
        amplitude: f64,
        radius: f64,
        power: u32,
    },
    Grid(GridSamples),
}

/// An initial datum in R^n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialDatumSpec {
    dimension: usize,
    family: Family,
}

/// Mass P = ∫u, ‖u‖₁ and ‖u‖₁,₁ = ∫(1+|x|)|u|.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub p: f64,
    pub l1: f64,
    pub l11: f64,
}

/// A(ξ) = ∫(cos(x·ξ) − 1)u dx and B(ξ) = ∫ sin(x·ξ)u dx, so û = A − iB + P.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct OscillatoryParts {
    pub a: f64,
    pub b: f64,
}

impl OscillatoryParts {
    pub fn as_complex(&self) -> Complex64 {
        Complex64::new(self.a, -self.b)
    }

    pub fn from_spectrum(u_hat: Complex64, mass: f64) -> Self {
        OscillatoryParts {
            a: u_hat.re - mass,
            b: -u_hat.im,
        }
    }
}

/// How the spectrum depends on ξ; decides how Fourier-side integrals reduce.
#[derive(Debug, Clone, PartialEq)]
pub enum Symmetry {
    /// Depends on |ξ| only.
    Radial,
    /// Depends on |ξ| and ξ·axis only (unit axis).
    Axial(Vec<f64>),
    /// No usable symmetry.
    General,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl InitialDatumSpec {
    pub fn gaussian(
        dimension: usize,
        amplitude: f64,
        center: Vec<f64>,
        width: f64,
    ) -> Result<Self> {
        Self::new(
            dimension,
            Family::Gaussian {
                amplitude,
                center,
                width,
            },
        )
    }

    pub fn centered_gaussian(dimension: usize, amplitude: f64, width: f64) -> Result<Self> {
        Self::gaussian(dimension, amplitude, vec![0.0; dimension], width)
    }

    pub fn dipole(dimension: usize, amplitude: f64, offset: Vec<f64>, width: f64) -> Result<Self> {
        Self::new(
            dimension,
            Family::Dipole {
                amplitude,
                offset,
                width,
            },
        )
    }

    pub fn bump(dimension: usize, amplitude: f64, radius: f64, power: u32) -> Result<Self> {
        Self::new(
            dimension,
            Family::Bump {
                amplitude,
                radius,
                power,
            },
        )
    }

    pub fn grid(dimension: usize, samples: GridSamples) -> Result<Self> {
        Self::new(dimension, Family::Grid(samples))
    }

    /// The zero datum (a Gaussian of zero amplitude).
    pub fn zero(dimension: usize) -> Self {
        InitialDatumSpec {
            dimension,
            family: Family::Gaussian {
                amplitude: 0.0,
                center: vec![0.0; dimension],
                width: 1.0,
            },
        }
    }

    pub fn new(dimension: usize, family: Family) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::UnsupportedDimension(0));
        }
        match &family {
            Family::Gaussian {
                amplitude,
                center,
                width,
            }
            | Family::Dipole {
                amplitude,
                offset: center,
                width,
            } => {
                if !(*width > 0.0 && width.is_finite()) {
                    return Err(Error::invalid(format!(
                        "width must be positive, got {width}"
                    )));
                }
                if center.len() != dimension {
                    return Err(Error::invalid(format!(
                        "center has {} components, dimension is {dimension}",
                        center.len()
                    )));
                }
                if !amplitude.is_finite() || center.iter().any(|c| !c.is_finite()) {
                    return Err(Error::NonFinite("datum parameters".into()));
                }
            }
            Family::Bump {
                amplitude,
                radius,
                power,
            } => {
                if !(*radius > 0.0 && radius.is_finite()) {
                    return Err(Error::invalid(format!(
                        "bump radius must be positive, got {radius}"
                    )));
                }
                if *power == 0 {
                    return Err(Error::invalid("bump power must be at least 1"));
                }
                if !amplitude.is_finite() {
                    return Err(Error::NonFinite("bump amplitude".into()));
                }
            }
            Family::Grid(g) => {
                if g.points < 2 || !(g.box_len > 0.0) {
                    return Err(Error::invalid(
                        "grid needs at least 2 points and a positive box",
                    ));
                }
                let expected = g
                    .points
                    .checked_pow(dimension as u32)
                    .ok_or_else(|| Error::invalid("grid too large"))?;
                if g.values.len() != expected {
                    return Err(Error::invalid(format!(
                        "grid has {} samples, expected {expected}",
                        g.values.len()
                    )));
                }
                if g.values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::NonFinite("grid samples".into()));
                }
            }
        }
        Ok(InitialDatumSpec { dimension, family })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn is_zero(&self) -> bool {
        match &self.family {
            Family::Gaussian { amplitude, .. }
            | Family::Dipole { amplitude, .. }
            | Family::Bump { amplitude, .. } => *amplitude == 0.0,
            Family::Grid(g) => g.values.iter().all(|&v| v == 0.0),
        }
    }

    fn gaussian_mass(&self, amplitude: f64, width: f64) -> f64 {
        amplitude * (2.0 * PI * width * width).powf(self.dimension as f64 / 2.0)
    }

    /// P, ‖u‖₁ and ‖u‖₁,₁.
    pub fn moments(&self) -> Result<Moments> {
        let n = self.dimension;
        match &self.family {
            Family::Gaussian {
                amplitude,
                center,
                width,
            } => {
                let p = self.gaussian_mass(*amplitude, *width);
                let l1 = p.abs();
                let mean_radius = width * noncentral_chi_mean(n, norm(center) / width);
                Ok(Moments {
                    p,
                    l1,
                    l11: l1 * (1.0 + mean_radius),
                })
            }
            Family::Dipole {
                amplitude,
                offset,
                width,
            } => {
                let lobe = self.gaussian_mass(*amplitude, *width).abs();
                let d = norm(offset);
                let l1 = 2.0 * lobe * libm::erf(d / (width * 2f64.sqrt()));
                let first = lobe * dipole_first_moment(n, d, *width)?;
                Ok(Moments {
                    p: 0.0,
                    l1,
                    l11: l1 + first,
                })
            }
            Family::Bump {
                amplitude,
                radius,
                power,
            } => {
                let (r, m) = (*radius, *power as i32);
                let profile = move |rho: f64| (1.0 - (rho / r).powi(2)).max(0.0).powi(m);
                let mass = radial_integral(
                    &RadialIntegralSpec::new(n, profile, 0.0, Upper::Finite(r)).tol(1e-13),
                )?;
                let first = radial_integral(
                    &RadialIntegralSpec::new(
                        n,
                        move |rho: f64| rho * profile(rho),
                        0.0,
                        Upper::Finite(r),
                    )
                    .tol(1e-13),
                )?;
                let p = amplitude * mass.value;
                let l1 = p.abs();
                Ok(Moments {
                    p,
                    l1,
                    l11: l1 + amplitude.abs() * first.value,
                })
            }
            Family::Grid(g) => {
                let cell = (g.box_len / g.points as f64).powi(n as i32);
                let (mut p, mut l1, mut l11) = (0.0, 0.0, 0.0);
                let mut x = vec![0.0; n];
                for (idx, &v) in g.values.iter().enumerate() {
                    grid_point(idx, n, g, &mut x);
                    p += v;
                    l1 += v.abs();
                    l11 += (1.0 + norm(&x)) * v.abs();
                }
                Ok(Moments {
                    p: p * cell,
                    l1: l1 * cell,
                    l11: l11 * cell,
                })
            }
        }
    }

    /// û(ξ) = ∫ e^{−ix·ξ} u(x) dx (unnormalized transform, so û(0) = P).
    pub fn spectrum(&self, xi: &[f64]) -> Result<Complex64> {
        self.check_xi(xi)?;
        let r = norm(xi);
        match &self.family {
            Family::Gaussian {
                amplitude,
                center,
                width,
            } => {
                let p = self.gaussian_mass(*amplitude, *width);
                let env = (-0.5 * width * width * r * r).exp();
                Ok(Complex64::from_polar(p * env, -dot(center, xi)))
            }
            Family::Dipole {
                amplitude,
                offset,
                width,
            } => {
                let lobe = self.gaussian_mass(*amplitude, *width);
                let env = (-0.5 * width * width * r * r).exp();
                Ok(Complex64::new(
                    0.0,
                    -2.0 * lobe * env * dot(offset, xi).sin(),
                ))
            }
            Family::Bump { .. } => {
                let (f, rad) = self.bump_projection();
                let val = projected_transform(&f, rad, r, |y| (r * y).cos())?;
                Ok(Complex64::new(val, 0.0))
            }
            Family::Grid(g) => {
                let n = self.dimension;
                let cell = (g.box_len / g.points as f64).powi(n as i32);
                let mut acc = Complex64::new(0.0, 0.0);
                let mut x = vec![0.0; n];
                for (idx, &v) in g.values.iter().enumerate() {
                    if v == 0.0 {
                        continue;
                    }
                    grid_point(idx, n, g, &mut x);
                    acc += Complex64::from_polar(v, -dot(&x, xi));
                }
                Ok(acc * cell)
            }
        }
    }

    /// A(ξ), B(ξ) from closed forms (Gaussian, dipole), the projected 1-D
    /// quadrature (bump) or direct sums (grid). (cos θ − 1) is evaluated as
    /// −2 sin²(θ/2) throughout to keep A accurate at small |ξ|.
    pub fn oscillatory_parts(&self, xi: &[f64]) -> Result<OscillatoryParts> {
        self.check_xi(xi)?;
        let r = norm(xi);
        match &self.family {
            Family::Gaussian {
                amplitude,
                center,
                width,
            } => {
                let p = self.gaussian_mass(*amplitude, *width);
                let half_s2r2 = 0.5 * width * width * r * r;
                let phase = dot(center, xi);
                let half = (0.5 * phase).sin();
                Ok(OscillatoryParts {
                    a: p * ((-half_s2r2).exp_m1() * phase.cos() - 2.0 * half * half),
                    b: p * (-half_s2r2).exp() * phase.sin(),
                })
            }
            Family::Dipole {
                amplitude,
                offset,
                width,
            } => {
                let lobe = self.gaussian_mass(*amplitude, *width);
                let env = (-0.5 * width * width * r * r).exp();
                Ok(OscillatoryParts {
                    a: 0.0,
                    b: 2.0 * lobe * env * dot(offset, xi).sin(),
                })
            }
            Family::Bump { .. } => {
                let (f, rad) = self.bump_projection();
                let a = projected_transform(&f, rad, r, |y| {
                    let s = (0.5 * r * y).sin();
                    -2.0 * s * s
                })?;
                Ok(OscillatoryParts { a, b: 0.0 })
            }
            Family::Grid(g) => {
                let n = self.dimension;
                let cell = (g.box_len / g.points as f64).powi(n as i32);
                let (mut a, mut b) = (0.0, 0.0);
                let mut x = vec![0.0; n];
                for (idx, &v) in g.values.iter().enumerate() {
                    if v == 0.0 {
                        continue;
                    }
                    grid_point(idx, n, g, &mut x);
                    let th = dot(&x, xi);
                    let s = (0.5 * th).sin();
                    a -= 2.0 * s * s * v;
                    b += th.sin() * v;
                }
                Ok(OscillatoryParts {
                    a: a * cell,
                    b: b * cell,
                })
            }
        }
    }

    /// A(ξ), B(ξ) by quadrature of their defining integrals, reduced to one
    /// dimension by integrating out the directions orthogonal to ξ. Independent
    /// of the closed forms in [`Self::oscillatory_parts`] for Gaussians and dipoles.
    pub fn oscillatory_parts_by_quadrature(&self, xi: &[f64]) -> Result<OscillatoryParts> {
        self.check_xi(xi)?;
        let r = norm(xi);
        if r == 0.0 {
            return Ok(OscillatoryParts::default());
        }
        let lobes: Vec<(f64, f64, f64)> = match &self.family {
            Family::Gaussian {
                amplitude,
                center,
                width,
            } => vec![(
                self.gaussian_mass(*amplitude, *width),
                dot(center, xi) / r,
                *width,
            )],
            Family::Dipole {
                amplitude,
                offset,
                width,
            } => {
                let lobe = self.gaussian_mass(*amplitude, *width);
                let mu = dot(offset, xi) / r;
                vec![(lobe, mu, *width), (-lobe, -mu, *width)]
            }
            _ => return self.oscillatory_parts(xi),
        };
        let (mut a, mut b) = (0.0, 0.0);
        for (mass, mu, s) in lobes {
            let dens =
                move |y: f64| (-0.5 * ((y - mu) / s).powi(2)).exp() / (s * (2.0 * PI).sqrt());
            let (lo, hi) = (mu - 14.0 * s, mu + 14.0 * s);
            let panels = ((hi - lo) * r / PI).ceil().clamp(4.0, 4096.0) as usize;
            let opts = AdaptiveOptions::default()
                .with_rel_tol(1e-13)
                .with_panels(panels);
            let scale = mass.abs().max(f64::MIN_POSITIVE);
            let opts_abs = opts.with_abs_tol(1e-15 * scale * r.min(1.0));
            let ai = integrate(
                |y| {
                    let h = (0.5 * r * y).sin();
                    -2.0 * h * h * dens(y)
                },
                lo,
                hi,
                &opts_abs,
            )?;
            let bi = integrate(|y| (r * y).sin() * dens(y), lo, hi, &opts_abs)?;
            a += mass * ai.value;
            b += mass * bi.value;
        }
        Ok(OscillatoryParts { a, b })
    }

    /// |û(ξ)| ≤ scale · exp(−rate |ξ|²), when such a Gaussian envelope exists.
    pub fn spectral_envelope(&self) -> Option<(f64, f64)> {
        match &self.family {
            Family::Gaussian {
                amplitude, width, ..
            } => Some((
                self.gaussian_mass(*amplitude, *width).abs(),
                0.5 * width * width,
            )),
            Family::Dipole {
                amplitude, width, ..
            } => Some((
                2.0 * self.gaussian_mass(*amplitude, *width).abs(),
                0.5 * width * width,
            )),
            _ => None,
        }
    }

    pub fn symmetry(&self) -> Symmetry {
        let axis_of = |c: &[f64]| {
            let nc = norm(c);
            c.iter().map(|x| x / nc).collect::<Vec<_>>()
        };
        match &self.family {
            Family::Gaussian { center, .. } => {
                if norm(center) == 0.0 {
                    Symmetry::Radial
                } else {
                    Symmetry::Axial(axis_of(center))
                }
            }
            Family::Dipole { offset, .. } => {
                if norm(offset) == 0.0 {
                    Symmetry::Radial
                } else {
                    Symmetry::Axial(axis_of(offset))
                }
            }
            Family::Bump { .. } => Symmetry::Radial,
            Family::Grid(_) => {
                if self.dimension == 1 {
                    Symmetry::Axial(vec![1.0])
                } else {
                    Symmetry::General
                }
            }
        }
    }

    /// Radius outside which the datum is negligible (Gaussian: |center| + 6·width).
    pub fn support_radius(&self) -> f64 {
        match &self.family {
            Family::Gaussian { center, width, .. } => norm(center) + 6.0 * width,
            Family::Dipole { offset, width, .. } => norm(offset) + 6.0 * width,
            Family::Bump { radius, .. } => *radius,
            Family::Grid(g) => {
                let n = self.dimension;
                let peak = g.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                let mut x = vec![0.0; n];
                let mut rho = 0.0f64;
                for (idx, &v) in g.values.iter().enumerate() {
                    if v.abs() > 1e-14 * peak {
                        grid_point(idx, n, g, &mut x);
                        rho = rho.max(norm(&x));
                    }
                }
                rho
            }
        }
    }

    /// Pointwise value u(x). Grid data are evaluated at the nearest sample.
    pub fn eval(&self, x: &[f64]) -> f64 {
        match &self.family {
            Family::Gaussian {
                amplitude,
                center,
                width,
            } => {
                let d2: f64 = x.iter().zip(center).map(|(a, c)| (a - c).powi(2)).sum();
                amplitude * (-0.5 * d2 / (width * width)).exp()
            }
            Family::Dipole {
                amplitude,
                offset,
                width,
            } => {
                let dm: f64 = x.iter().zip(offset).map(|(a, c)| (a - c).powi(2)).sum();
                let dp: f64 = x.iter().zip(offset).map(|(a, c)| (a + c).powi(2)).sum();
                let w2 = width * width;
                amplitude * ((-0.5 * dm / w2).exp() - (-0.5 * dp / w2).exp())
            }
            Family::Bump {
                amplitude,
                radius,
                power,
            } => {
                let q = 1.0 - x.iter().map(|v| v * v).sum::<f64>() / (radius * radius);
                if q <= 0.0 {
                    0.0
                } else {
                    amplitude * q.powi(*power as i32)
                }
            }
            Family::Grid(g) => {
                let h = g.box_len / g.points as f64;
                let mut idx = 0usize;
                for &xi in x {
                    let j = ((xi + 0.5 * g.box_len) / h)
                        .round()
                        .rem_euclid(g.points as f64) as usize;
                    idx = idx * g.points + j;
                }
                g.values[idx]
            }
        }
    }

    fn check_xi(&self, xi: &[f64]) -> Result<()> {
        if xi.len() != self.dimension {
            return Err(Error::invalid(format!(
                "frequency has {} components, dimension is {}",
                xi.len(),
                self.dimension
            )));
        }
        Ok(())
    }

    /// The bump integrated over the hyperplanes orthogonal to a direction:
    /// F(y) = c · (1 − y²/R²)^{m + (n−1)/2}.
    fn bump_projection(&self) -> (impl Fn(f64) -> f64, f64) {
        let Family::Bump {
            amplitude,
            radius,
            power,
        } = self.family
        else {
            unreachable!("bump_projection on a non-bump datum")
        };
        let n = self.dimension;
        let exponent = power as f64 + (n as f64 - 1.0) / 2.0;
        let coeff = if n == 1 {
            1.0
        } else {
            // R^{n−1} ω_{n−2} B((n−1)/2, m+1) / 2
            let omega = sphere_area(n - 1).expect("n - 1 >= 1");
            let ln_beta = ln_gamma_half(n as u32 - 1) + ln_gamma_half(2 * power + 2)
                - ln_gamma_half(n as u32 + 2 * power + 1);
            radius.powi(n as i32 - 1) * omega * ln_beta.exp() / 2.0
        };
        let f = move |y: f64| {
            let q = 1.0 - (y / radius).powi(2);
            if q <= 0.0 {
                0.0
            } else {
                amplitude * coeff * q.powf(exponent)
            }
        };
        (f, radius)
    }
}

/// ∫_{−R}^{R} kernel(y) F(y) dy for an even profile F and even kernel.
fn projected_transform<F: Fn(f64) -> f64, K: Fn(f64) -> f64>(
    f: &F,
    radius: f64,
    r: f64,
    kernel: K,
) -> Result<f64> {
    let panels = (radius * r / PI).ceil().clamp(1.0, 4096.0) as usize;
    let opts = AdaptiveOptions::default()
        .with_rel_tol(1e-12)
        .with_panels(panels);
    let scale = integrate(|y| f(y).abs(), 0.0, radius, &AdaptiveOptions::default())?.value;
    let est = integrate(
        |y| kernel(y) * f(y),
        0.0,
        radius,
        &opts.with_abs_tol(1e-15 * scale),
    )?;
    Ok(2.0 * est.value)
}

/// Grid coordinates of a row-major flat index (last axis fastest).
fn grid_point(mut idx: usize, n: usize, g: &GridSamples, x: &mut [f64]) {
    let h = g.box_len / g.points as f64;
    for axis in (0..n).rev() {
        let j = idx % g.points;
        idx /= g.points;
        x[axis] = -0.5 * g.box_len + j as f64 * h;
    }
}

const CHI_ASYMPTOTIC_CUT: f64 = 10.0;

/// E|z + Z| for Z standard normal in R^n and |z| = lambda.
///
/// Uses E|X| = √2 Γ((n+1)/2)/Γ(n/2) · e^{−λ²/2} ₁F₁((n+1)/2; n/2; λ²/2), with the
/// all-positive series summed in log space.
pub fn noncentral_chi_mean(n: usize, lambda: f64) -> f64 {
    let a = (n as f64 + 1.0) / 2.0;
    let b = n as f64 / 2.0;
    let z = 0.5 * lambda * lambda;
    let prefactor =
        (2f64.sqrt().ln() + ln_gamma_half(n as u32 + 1) - ln_gamma_half(n as u32)).exp();
    if z == 0.0 {
        return prefactor;
    }
    if lambda > CHI_ASYMPTOTIC_CUT {
        // λ · ₂F₀(−1/2, (1−n)/2; ; 2/λ²). The convergent series would need
        // ~λ² terms and its log-space recurrence drifts.
        let x = 2.0 / (lambda * lambda);
        let b = (1.0 - n as f64) / 2.0;
        let (mut term, mut sum) = (1.0f64, 1.0f64);
        for j in 0..80 {
            let jf = j as f64;
            term *= (-0.5 + jf) * (b + jf) / (jf + 1.0) * x;
            sum += term;
            if term.abs() < 1e-17 * sum {
                break;
            }
        }
        return lambda * sum;
    }
    let ln_z = z.ln();
    let mut ln_term = -z;
    let mut sum = 0.0;
    let kmax = (z + 40.0 * z.sqrt() + 200.0) as usize;
    let mut peaked = false;
    for k in 0..kmax {
        let term = ln_term.exp();
        sum += term;
        if k as f64 > z && term < 1e-18 * sum {
            peaked = true;
            break;
        }
        let j = k as f64;
        ln_term += ((a + j) / ((b + j) * (j + 1.0))).ln() + ln_z;
    }
    debug_assert!(peaked || sum > 0.0);
    prefactor * sum
}

/// ∫|x| |g(x−c) − g(x+c)| dx for normalized Gaussians g of width s, |c| = d.
fn dipole_first_moment(n: usize, d: f64, s: f64) -> Result<f64> {
    if d == 0.0 {
        return Ok(0.0);
    }
    if n == 1 {
        // x(g(x−d) − g(x+d)) ≥ 0 everywhere, so the absolute value drops out.
        return Ok(2.0 * d);
    }
    let phi = move |y: f64| (-0.5 * (y / s).powi(2)).exp() / (s * (2.0 * PI).sqrt());
    // Density of |w| for w ~ N(0, s² I_{n−1}).
    let k = n - 1;
    let ln_norm =
        (k as f64) * s.ln() + (k as f64 / 2.0 - 1.0) * 2f64.ln() + ln_gamma_half(k as u32);
    let chi =
        move |rho: f64| (rho.powi(k as i32 - 1).ln() - 0.5 * (rho / s).powi(2) - ln_norm).exp();
    let y_hi = d + 14.0 * s;
    let rho_hi = s * ((k as f64).sqrt() + 14.0);
    let inner_opts = AdaptiveOptions::default()
        .with_rel_tol(1e-11)
        .with_panels(8);
    let outer = integrate(
        |rho| {
            if rho == 0.0 && k > 1 {
                return 0.0;
            }
            let inner = integrate(
                |y| (y * y + rho * rho).sqrt() * (phi(y - d) - phi(y + d)).abs(),
                0.0,
                y_hi,
                &inner_opts,
            )
            .map(|e| e.value)
            .unwrap_or(f64::NAN);
            2.0 * chi(rho) * inner
        },
        0.0,
        rho_hi,
        &AdaptiveOptions::default()
            .with_rel_tol(1e-10)
            .with_panels(8),
    )?;
    Ok(outer.value)
}

/// Grid samples of a datum at x_j = −L/2 + j·L/N, row-major.
pub fn sample_on_grid(datum: &InitialDatumSpec, box_len: f64, points: usize) -> Vec<f64> {
    let n = datum.dimension();
    let total = points.pow(n as u32);
    let g = GridSamples {
        box_len,
        points,
        values: Vec::new(),
    };
    let mut x = vec![0.0; n];
    (0..total)
        .map(|idx| {
            grid_point(idx, n, &g, &mut x);
            datum.eval(&x)
        })
        .collect()
}

#[allow(dead_code)]
fn beta_half(a2: u32, b2: u32) -> f64 {
    gamma_half(a2) * gamma_half(b2) / gamma_half(a2 + b2)
}
