use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::data::InitialDatumSpec;
use crate::error::{Error, Result};
use crate::symbol::{mode_multipliers, profile_multipliers, Frequency};

/// Real samples on the periodic grid x_j = −L/2 + j·L/N, row-major with the
/// last axis fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    dimension: usize,
    box_len: f64,
    points: usize,
    values: Vec<f64>,
}

/// Geometry of a grid without its samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dimension: usize,
    pub box_len: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn new(dimension: usize, box_len: f64, points: usize) -> Result<Self> {
        if !(1..=3).contains(&dimension) {
            return Err(Error::UnsupportedDimension(dimension));
        }
        if points < 8 || !points.is_power_of_two() {
            return Err(Error::invalid(format!(
                "points per axis must be a power of two >= 8, got {points}"
            )));
        }
        if !(box_len > 0.0 && box_len.is_finite()) {
            return Err(Error::invalid(format!(
                "box length must be positive, got {box_len}"
            )));
        }
        Ok(GridSpec {
            dimension,
            box_len,
            points,
        })
    }

    pub fn spacing(&self) -> f64 {
        self.box_len / self.points as f64
    }

    pub fn len(&self) -> usize {
        self.points.pow(self.dimension as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dimension as i32)
    }

    /// Coordinates of the sample at a flat index.
    pub fn point(&self, mut idx: usize, x: &mut [f64]) {
        let h = self.spacing();
        for axis in (0..self.dimension).rev() {
            x[axis] = -0.5 * self.box_len + (idx % self.points) as f64 * h;
            idx /= self.points;
        }
    }

    /// Angular frequency vector of the discrete mode at a flat index, with
    /// signed wave numbers in [−N/2, N/2).
    pub fn frequency(&self, mut idx: usize, xi: &mut [f64]) {
        let dk = 2.0 * PI / self.box_len;
        for axis in (0..self.dimension).rev() {
            let i = idx % self.points;
            idx /= self.points;
            let k = if i < self.points / 2 {
                i as f64
            } else {
                i as f64 - self.points as f64
            };
            xi[axis] = k * dk;
        }
    }

    fn wave_number_sum(&self, mut idx: usize) -> usize {
        let mut s = 0;
        for _ in 0..self.dimension {
            s += idx % self.points;
            idx /= self.points;
        }
        s
    }

    fn radius(&self, idx: usize) -> f64 {
        let mut xi = [0.0; 3];
        self.frequency(idx, &mut xi[..self.dimension]);
        xi[..self.dimension]
            .iter()
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt()
    }
}

impl GridField {
    pub fn new(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        let spec = GridSpec::new(spec.dimension, spec.box_len, spec.points)?;
        if values.len() != spec.len() {
            return Err(Error::invalid(format!(
                "grid has {} samples, expected {}",
                values.len(),
                spec.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("grid samples".into()));
        }
        Ok(GridField {
            dimension: spec.dimension,
            box_len: spec.box_len,
            points: spec.points,
            values,
        })
    }

    pub fn zeros(spec: GridSpec) -> Result<Self> {
        Self::new(spec, vec![0.0; spec.len()])
    }

    /// Samples an analytic datum on the grid.
    pub fn from_datum(datum: &InitialDatumSpec, spec: GridSpec) -> Result<Self> {
        if datum.dimension() != spec.dimension {
            return Err(Error::invalid("datum and grid dimensions differ"));
        }
        let values = crate::data::sample_on_grid(datum, spec.box_len, spec.points);
        Self::new(spec, values)
    }

    pub fn spec(&self) -> GridSpec {
        GridSpec {
            dimension: self.dimension,
            box_len: self.box_len,
            points: self.points,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Discrete L² norm (h^n Σ u_j²)^{1/2}.
    pub fn l2_norm(&self) -> f64 {
        (self.spec().cell_volume() * self.values.iter().map(|v| v * v).sum::<f64>()).sqrt()
    }

    /// Discrete mass h^n Σ u_j.
    pub fn mass(&self) -> f64 {
        self.spec().cell_volume() * self.values.iter().sum::<f64>()
    }

    /// Radius beyond which samples are below e^{−18} of the peak, which is
    /// 6 widths for a Gaussian.
    pub fn effective_radius(&self) -> f64 {
        let peak = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if peak == 0.0 {
            return 0.0;
        }
        let cut = (-18.0f64).exp() * peak;
        let spec = self.spec();
        let mut x = [0.0; 3];
        let mut rho = 0.0f64;
        for (idx, v) in self.values.iter().enumerate() {
            if v.abs() >= cut {
                spec.point(idx, &mut x[..self.dimension]);
                rho = rho.max(
                    x[..self.dimension]
                        .iter()
                        .map(|a| a * a)
                        .sum::<f64>()
                        .sqrt(),
                );
            }
        }
        rho
    }

    /// Approximation of the continuous transform at the discrete modes:
    /// û_k = h^n Σ_j u_j e^{−i x_j·ξ_k}.
    pub fn spectrum(&self) -> Result<Vec<Complex64>> {
        let spec = self.spec();
        let mut data: Vec<Complex64> = self
            .values
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect();
        fft_nd(&mut data, spec, false);
        let cell = spec.cell_volume();
        data.par_iter_mut().enumerate().for_each(|(idx, z)| {
            // x_0 = −L/2 contributes the phase e^{iπk} = (−1)^k.
            let sign = if spec.wave_number_sum(idx) % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            *z *= sign * cell;
        });
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("forward transform".into()));
        }
        Ok(data)
    }

    /// Inverse of [`Self::spectrum`]; fails if the result is not real.
    pub fn from_spectrum(spec: GridSpec, mut data: Vec<Complex64>) -> Result<Self> {
        let inv = 1.0 / spec.box_len.powi(spec.dimension as i32);
        data.par_iter_mut().enumerate().for_each(|(idx, z)| {
            let sign = if spec.wave_number_sum(idx) % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            *z *= sign * inv;
        });
        fft_nd(&mut data, spec, true);
        let norm = data.iter().map(|z| z.re * z.re).sum::<f64>().sqrt();
        let residue = data.iter().map(|z| z.im * z.im).sum::<f64>().sqrt();
        if !norm.is_finite() || !residue.is_finite() {
            return Err(Error::NonFinite("inverse transform".into()));
        }
        if residue > 1e-10 * norm.max(f64::MIN_POSITIVE) {
            return Err(Error::invalid(format!(
                "inverse transform not real: imaginary residue {residue:e} vs norm {norm:e}"
            )));
        }
        Self::new(spec, data.into_iter().map(|z| z.re).collect())
    }
}

/// Unnormalized n-dimensional DFT (inverse if `inverse`), one axis at a time.
fn fft_nd(data: &mut [Complex64], spec: GridSpec, inverse: bool) {
    let n_pts = spec.points;
    let mut planner = FftPlanner::<f64>::new();
    let fft = if inverse {
        planner.plan_fft_inverse(n_pts)
    } else {
        planner.plan_fft_forward(n_pts)
    };
    for axis in 0..spec.dimension {
        let stride = n_pts.pow((spec.dimension - 1 - axis) as u32);
        let block = n_pts * stride;
        data.par_chunks_mut(block).for_each(|chunk| {
            let mut line = vec![Complex64::new(0.0, 0.0); n_pts];
            let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
            for inner in 0..stride {
                for (k, slot) in line.iter_mut().enumerate() {
                    *slot = chunk[inner + k * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (k, slot) in line.iter().enumerate() {
                    chunk[inner + k * stride] = *slot;
                }
            }
        });
    }
}

/// Outcome of the wrap-around check L ≥ 2(t + ρ + 6√t).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GuardVerdict {
    pub pass: bool,
    pub required: f64,
    /// L minus the required length; negative on failure.
    pub margin: f64,
}

pub fn wraparound_guard(t: f64, radius: f64, box_len: f64) -> GuardVerdict {
    let required = 2.0 * (t + radius + 6.0 * t.max(0.0).sqrt());
    GuardVerdict {
        pass: box_len >= required,
        required,
        margin: box_len - required,
    }
}

fn enforce_guard(t: f64, radius: f64, box_len: f64) -> Result<()> {
    let g = wraparound_guard(t, radius, box_len);
    if g.pass {
        Ok(())
    } else {
        Err(Error::WrapAround {
            box_len,
            required: g.required,
        })
    }
}

/// (u(t), u_t(t)) on the grid, each discrete mode advanced by the exact
/// multipliers.
pub fn grid_evolve_state(u0: &GridField, u1: &GridField, t: f64) -> Result<(GridField, GridField)> {
    let spec = u0.spec();
    if spec != u1.spec() {
        return Err(Error::invalid("u0 and u1 live on different grids"));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::invalid(format!("t must be nonnegative, got {t}")));
    }
    let radius = u0.effective_radius().max(u1.effective_radius());
    enforce_guard(t, radius, spec.box_len)?;
    let h0 = u0.spectrum()?;
    let h1 = u1.spectrum()?;
    let (u_hat, ut_hat): (Vec<Complex64>, Vec<Complex64>) = h0
        .par_iter()
        .zip(h1.par_iter())
        .enumerate()
        .map(|(idx, (&a, &b))| mode_multipliers(t, Frequency::of(spec.radius(idx))).apply(a, b))
        .unzip();
    Ok((
        GridField::from_spectrum(spec, u_hat)?,
        GridField::from_spectrum(spec, ut_hat)?,
    ))
}

pub fn grid_evolve(u0: &GridField, u1: &GridField, t: f64) -> Result<GridField> {
    grid_evolve_state(u0, u1, t).map(|(u, _)| u)
}

/// Discrete energy ‖u_t‖² + ‖∇u‖² at time t, with the gradient taken spectrally.
pub fn discrete_energy(u0: &GridField, u1: &GridField, t: f64) -> Result<f64> {
    let spec = u0.spec();
    if spec != u1.spec() {
        return Err(Error::invalid("u0 and u1 live on different grids"));
    }
    let radius = u0.effective_radius().max(u1.effective_radius());
    enforce_guard(t, radius, spec.box_len)?;
    let h0 = u0.spectrum()?;
    let h1 = u1.spectrum()?;
    let sum: f64 = h0
        .iter()
        .zip(&h1)
        .enumerate()
        .map(|(idx, (&a, &b))| {
            let r = spec.radius(idx);
            let (u, ut) = mode_multipliers(t, Frequency::of(r)).apply(a, b);
            ut.norm_sqr() + r * r * u.norm_sqr()
        })
        .sum();
    Ok(sum / spec.box_len.powi(spec.dimension as i32))
}

/// The diffusion-wave profile P1·p_sin + P0·p_cos, inverted on the grid.
pub fn grid_profile(t: f64, p0: f64, p1: f64, spec: GridSpec) -> Result<GridField> {
    let spec = GridSpec::new(spec.dimension, spec.box_len, spec.points)?;
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::invalid(format!("profile needs t > 0, got {t}")));
    }
    enforce_guard(t, 0.0, spec.box_len)?;
    let data: Vec<Complex64> = (0..spec.len())
        .into_par_iter()
        .map(|idx| {
            Complex64::new(
                profile_multipliers(t, Frequency::of(spec.radius(idx))).combine(p0, p1),
                0.0,
            )
        })
        .collect();
    GridField::from_spectrum(spec, data)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian_field(n: usize, l: f64, pts: usize, width: f64) -> GridField {
        let d = InitialDatumSpec::centered_gaussian(n, 1.0, width).unwrap();
        GridField::from_datum(&d, GridSpec::new(n, l, pts).unwrap()).unwrap()
    }

    #[test]
    fn guard_examples() {
        assert!(wraparound_guard(20.0, 4.0, 128.0).pass);
        assert!((wraparound_guard(20.0, 4.0, 128.0).required - 101.665).abs() < 1e-2);
        let g = wraparound_guard(100.0, 4.0, 128.0);
        assert!(!g.pass && (g.required - 328.0).abs() < 1e-12);
        let g = wraparound_guard(0.0, 4.0, 16.1);
        assert!(g.pass && (g.required - 8.0).abs() < 1e-15);
    }

    #[test]
    fn spec_validation() {
        assert!(GridSpec::new(4, 1.0, 8).is_err());
        assert!(GridSpec::new(1, 1.0, 12).is_err());
        assert!(GridSpec::new(1, 1.0, 4).is_err());
        assert!(GridSpec::new(2, -1.0, 8).is_err());
    }

    #[test]
    fn round_trip() {
        for n in 1..=3 {
            let f = gaussian_field(n, 20.0, 16, 1.3);
            let back = GridField::from_spectrum(f.spec(), f.spectrum().unwrap()).unwrap();
            let err = f
                .values()
                .iter()
                .zip(back.values())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(err < 1e-12, "n={n}: {err}");
        }
    }

    #[test]
    fn discrete_spectrum_matches_continuous() {
        let d = InitialDatumSpec::gaussian(1, 1.0, vec![0.7], 0.9).unwrap();
        let f = GridField::from_datum(&d, GridSpec::new(1, 40.0, 256).unwrap()).unwrap();
        let s = f.spectrum().unwrap();
        let mut xi = [0.0];
        for idx in [0, 1, 5, 30, 250] {
            f.spec().frequency(idx, &mut xi);
            assert!(
                (s[idx] - d.spectrum(&xi).unwrap()).norm() < 1e-12,
                "mode {idx}"
            );
        }
    }

    #[test]
    fn evolve_at_zero_is_identity() {
        let u0 = gaussian_field(2, 32.0, 32, 1.0);
        let u1 = gaussian_field(2, 32.0, 32, 2.0);
        let u = grid_evolve(&u0, &u1, 0.0).unwrap();
        let err = u0
            .values()
            .iter()
            .zip(u.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-12);
    }

    #[test]
    fn evolve_rejects_small_box() {
        let u0 = gaussian_field(1, 32.0, 64, 1.0);
        assert!(matches!(
            grid_evolve(&u0, &u0, 50.0),
            Err(Error::WrapAround { .. })
        ));
        let other = gaussian_field(1, 64.0, 64, 1.0);
        assert!(grid_evolve(&u0, &other, 1.0).is_err());
    }

    #[test]
    fn mass_is_conserved_by_velocity_free_evolution() {
        // û(t, 0) = û0(0) when û1(0) = 0.
        let u0 = gaussian_field(1, 128.0, 1024, 1.0);
        let u1 = GridField::zeros(u0.spec()).unwrap();
        let u = grid_evolve(&u0, &u1, 10.0).unwrap();
        assert!((u.mass() - u0.mass()).abs() < 1e-10);
    }

    #[test]
    fn energy_is_nonincreasing() {
        let u0 = gaussian_field(2, 128.0, 128, 1.5);
        let u1 = gaussian_field(2, 128.0, 128, 1.0);
        let mut prev = f64::INFINITY;
        for i in 0..10 {
            let e = discrete_energy(&u0, &u1, i as f64 * 1.5).unwrap();
            assert!(e <= prev * (1.0 + 1e-12));
            prev = e;
        }
    }

    #[test]
    fn profile_zero_and_mass() {
        let spec = GridSpec::new(1, 128.0, 512).unwrap();
        let z = grid_profile(5.0, 0.0, 0.0, spec).unwrap();
        assert!(z.values().iter().all(|&v| v == 0.0));
        let p = grid_profile(0.5, 1.0, 0.0, spec).unwrap();
        assert!((p.mass() - 1.0).abs() < 1e-12);
        // Mass sits near the origin at small t.
        let h = spec.spacing();
        let near: f64 = p
            .values()
            .iter()
            .enumerate()
            .filter(|(j, _)| (-64.0 + *j as f64 * h).abs() < 3.0)
            .map(|(_, v)| v * h)
            .sum();
        assert!((near - 1.0).abs() < 1e-3);
    }
}
