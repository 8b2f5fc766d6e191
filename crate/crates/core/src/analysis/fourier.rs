//! Integrals over frequency space of quantities built from a pair of initial
//! data, reduced by the symmetry of the data.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::data::{InitialDatumSpec, Moments, OscillatoryParts, Symmetry};
use crate::error::{Error, Result};
use crate::quadrature::{
    integrate, radial_integral, sphere_area, AdaptiveOptions, Estimate, GaussLegendre,
    RadialIntegralSpec, TailBound, Upper,
};
use crate::symbol::FrequencySample;

/// Initial position and velocity with cached moments.
#[derive(Debug, Clone)]
pub struct DataPair {
    pub u0: InitialDatumSpec,
    pub u1: InitialDatumSpec,
    pub m0: Moments,
    pub m1: Moments,
    /// Common symmetry axis; `None` when both data are radial.
    axis: Option<Vec<f64>>,
    /// Largest phase rate |c| of the data, for sizing angular quadrature.
    phase_rate: f64,
}

fn shift_of(d: &InitialDatumSpec) -> f64 {
    use crate::data::Family;
    match d.family() {
        Family::Gaussian { center, .. } => center.iter().map(|c| c * c).sum::<f64>().sqrt(),
        Family::Dipole { offset, .. } => offset.iter().map(|c| c * c).sum::<f64>().sqrt(),
        _ => d.support_radius(),
    }
}

impl DataPair {
    pub fn new(u0: InitialDatumSpec, u1: InitialDatumSpec) -> Result<Self> {
        let n = u0.dimension();
        if u1.dimension() != n {
            return Err(Error::invalid("u0 and u1 have different dimensions"));
        }
        let axis = common_axis(&u0, &u1, n)?;
        let phase_rate = shift_of(&u0).max(shift_of(&u1));
        Ok(DataPair {
            m0: u0.moments()?,
            m1: u1.moments()?,
            u0,
            u1,
            axis,
            phase_rate,
        })
    }

    pub fn dimension(&self) -> usize {
        self.u0.dimension()
    }

    pub fn is_radial(&self) -> bool {
        self.axis.is_none()
    }

    /// Spectra, masses and oscillatory parts at ξ.
    pub fn sample(&self, xi: &[f64]) -> Result<FrequencySample> {
        Ok(FrequencySample {
            u0_hat: self.u0.spectrum(xi)?,
            u1_hat: self.u1.spectrum(xi)?,
            p0: self.m0.p,
            p1: self.m1.p,
            osc0: self.u0.oscillatory_parts(xi)?,
            osc1: self.u1.oscillatory_parts(xi)?,
        })
    }

    /// Spectra only; cheaper than [`Self::sample`].
    pub fn spectra(&self, xi: &[f64]) -> Result<(Complex64, Complex64)> {
        Ok((self.u0.spectrum(xi)?, self.u1.spectrum(xi)?))
    }

    pub fn oscillatory_parts(&self, xi: &[f64]) -> Result<(OscillatoryParts, OscillatoryParts)> {
        Ok((
            self.u0.oscillatory_parts(xi)?,
            self.u1.oscillatory_parts(xi)?,
        ))
    }

    /// Gaussian envelopes |û_j| ≤ S_j e^{−β_j|ξ|²}, when both exist.
    pub fn spectral_envelopes(&self) -> Option<[(f64, f64); 2]> {
        let env = |d: &InitialDatumSpec| {
            if d.is_zero() {
                Some((0.0, f64::INFINITY))
            } else {
                d.spectral_envelope()
            }
        };
        Some([env(&self.u0)?, env(&self.u1)?])
    }

    /// Mean of g over the sphere |ξ| = r.
    pub fn angular_mean<G: Fn(&[f64]) -> f64>(&self, r: f64, g: &G, tol: f64) -> f64 {
        let n = self.dimension();
        let Some(axis) = &self.axis else {
            let mut xi = vec![0.0; n];
            xi[0] = r;
            return g(&xi);
        };
        if n == 1 {
            return 0.5 * (g(&[r]) + g(&[-r]));
        }
        let perp = perpendicular(axis);
        let weight = sphere_area(n - 1).expect("n >= 2") / sphere_area(n).expect("n >= 2");
        let f = |gamma: f64| {
            let (s, c) = gamma.sin_cos();
            let xi: Vec<f64> = (0..n).map(|i| r * (c * axis[i] + s * perp[i])).collect();
            s.powi(n as i32 - 2) * g(&xi)
        };
        // The integrand is entire in γ with phase at most r|c|; a fixed rule
        // of a few nodes per unit phase is accurate far below `tol`.
        let phase = r * self.phase_rate;
        if let Some(rule) = angular_rule(phase) {
            return weight * rule.mapped(0.0, PI).map(|(x, w)| w * f(x)).sum::<f64>();
        }
        let panels = (phase / PI).ceil().clamp(1.0, 2048.0) as usize + 1;
        let opts = AdaptiveOptions::default()
            .with_rel_tol(tol)
            .with_panels(panels);
        match integrate(f, 0.0, PI, &opts) {
            Ok(e) => weight * e.value,
            Err(Error::NonConvergence { estimate, .. }) => weight * estimate,
            Err(_) => f64::NAN,
        }
    }

    /// ∫ g(ξ) dξ over lower ≤ |ξ| ≤ upper (or to infinity with a tail
    /// certificate for the angular mean of g).
    pub fn shell_integral<G: Fn(&[f64]) -> f64>(
        &self,
        g: &G,
        plan: &ShellPlan,
    ) -> Result<Estimate> {
        let n = self.dimension();
        let inner_tol = (0.1 * plan.tol).max(1e-14);
        let mean = |r: f64| self.angular_mean(r, g, inner_tol);
        let spec = RadialIntegralSpec::new(n, mean, plan.lower, plan.upper)
            .tol(plan.tol)
            .abs_tol(plan.abs_tol)
            .panels(plan.panels);
        radial_integral(&spec)
    }

    /// ∫ g over lower ≤ |ξ| ≤ upper for integrands carrying e^{−t|ξ|²} and
    /// phases of frequency t in |ξ|. The shell where that factor exceeds
    /// e^{−window} is pre-split into panels of about half a period; the rest
    /// is integrated to an absolute tolerance relative to the core.
    pub fn damped_integral<G: Fn(&[f64]) -> f64>(
        &self,
        g: &G,
        t: f64,
        lower: f64,
        upper: Upper,
        tol: f64,
        window: f64,
    ) -> Result<f64> {
        let mut edge = (lower * lower + window / t.max(f64::MIN_POSITIVE)).sqrt();
        let rest = match upper {
            Upper::Finite(b) if edge >= b => {
                edge = b;
                None
            }
            other => Some(other),
        };
        let panels = (t * (edge - lower) / PI).ceil().clamp(1.0, 16384.0) as usize + 1;
        let core = self
            .shell_integral(g, &ShellPlan::finite(lower, edge, tol).panels(panels))?
            .value;
        let Some(upper) = rest else {
            return Ok(core);
        };
        let plan = ShellPlan {
            lower: edge,
            upper,
            tol,
            abs_tol: tol * core.abs(),
            panels: 1,
        };
        Ok(core + self.shell_integral(g, &plan)?.value)
    }
}

/// Gauss–Legendre rule for angular integrands of the given phase, or `None`
/// when the phase calls for adaptive integration.
fn angular_rule(phase: f64) -> Option<&'static GaussLegendre> {
    static RULES: OnceLock<[GaussLegendre; 3]> = OnceLock::new();
    let rules = RULES.get_or_init(|| {
        [
            GaussLegendre::new(32),
            GaussLegendre::new(64),
            GaussLegendre::new(128),
        ]
    });
    match phase {
        p if p <= 6.0 => Some(&rules[0]),
        p if p <= 24.0 => Some(&rules[1]),
        p if p <= 60.0 => Some(&rules[2]),
        _ => None,
    }
}

/// Radial extent and tolerances of a shell integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShellPlan {
    pub lower: f64,
    pub upper: Upper,
    pub tol: f64,
    pub abs_tol: f64,
    pub panels: usize,
}

impl ShellPlan {
    pub fn finite(lower: f64, upper: f64, tol: f64) -> Self {
        ShellPlan {
            lower,
            upper: Upper::Finite(upper),
            tol,
            abs_tol: 0.0,
            panels: 1,
        }
    }

    pub fn infinite(lower: f64, tail: TailBound, tol: f64) -> Self {
        ShellPlan {
            lower,
            upper: Upper::Infinite(tail),
            tol,
            abs_tol: 0.0,
            panels: 1,
        }
    }

    pub fn panels(mut self, panels: usize) -> Self {
        self.panels = panels.max(1);
        self
    }

    pub fn abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }
}

fn common_axis(u0: &InitialDatumSpec, u1: &InitialDatumSpec, n: usize) -> Result<Option<Vec<f64>>> {
    let sym = |d: &InitialDatumSpec| {
        if d.is_zero() {
            Symmetry::Radial
        } else {
            d.symmetry()
        }
    };
    match (sym(u0), sym(u1)) {
        (Symmetry::Radial, Symmetry::Radial) => Ok(None),
        (Symmetry::Radial, Symmetry::Axial(a)) | (Symmetry::Axial(a), Symmetry::Radial) => {
            Ok(Some(a))
        }
        (Symmetry::Axial(a), Symmetry::Axial(b)) => {
            let d: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
            if (d.abs() - 1.0).abs() < 1e-12 {
                Ok(Some(a))
            } else {
                Err(Error::invalid(
                    "u0 and u1 have different symmetry axes; frequency integrals need a common axis",
                ))
            }
        }
        _ => Err(Error::invalid(format!(
            "grid data in {n} dimensions have no symmetry; frequency integrals are unsupported"
        ))),
    }
}

/// A unit vector orthogonal to a unit axis (n ≥ 2).
fn perpendicular(axis: &[f64]) -> Vec<f64> {
    let n = axis.len();
    // Gram–Schmidt on the coordinate vector least aligned with the axis.
    let k = (0..n)
        .min_by(|&i, &j| axis[i].abs().total_cmp(&axis[j].abs()))
        .expect("n >= 1");
    let mut e = vec![0.0; n];
    e[k] = 1.0;
    let d = axis[k];
    for i in 0..n {
        e[i] -= d * axis[i];
    }
    let norm = e.iter().map(|v| v * v).sum::<f64>().sqrt();
    e.iter().map(|v| v / norm).collect()
}
