use num_complex::Complex64;

use crate::error::{Error, Result};

/// (û, û_t) at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeState {
    pub v: Complex64,
    pub vdot: Complex64,
}

/// Largest step the integrator accepts at frequency r.
pub fn max_stable_step(r: f64) -> f64 {
    (1.0 / (r * r)).min(0.1)
}

/// Integrates v'' + r²v' + r²v = 0 with classical RK4 from (v0, v1) to time t.
///
/// The step is shrunk to t/ceil(t/dt) so the last step lands on t.
pub fn mode_ode_evolve(r: f64, v0: Complex64, v1: Complex64, t: f64, dt: f64) -> Result<ModeState> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::invalid(format!("dt must be positive, got {dt}")));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::invalid(format!("t must be nonnegative, got {t}")));
    }
    if !r.is_finite() || !(v0.norm().is_finite() && v1.norm().is_finite()) {
        return Err(Error::NonFinite("mode initial state".into()));
    }
    let r = r.abs();
    if dt > max_stable_step(r) {
        return Err(Error::Unstable { r, dt });
    }
    let steps = (t / dt).ceil() as u64;
    if steps == 0 {
        return Ok(ModeState { v: v0, vdot: v1 });
    }
    let h = t / steps as f64;
    let r2 = r * r;
    let rhs = |v: Complex64, w: Complex64| (w, -r2 * (v + w));

    // Exact solutions obey |v| ≤ |v0| + t|v1| and |v'| ≤ r²t|v0| + 2|v1|.
    let scale = v0.norm() + v1.norm();
    let envelope =
        |time: f64| 4.0 * ((1.0 + r2 * time) * v0.norm() + (2.0 + time) * v1.norm()) + 1e-300;

    let (mut v, mut w) = (v0, v1);
    for k in 0..steps {
        let (k1v, k1w) = rhs(v, w);
        let (k2v, k2w) = rhs(v + 0.5 * h * k1v, w + 0.5 * h * k1w);
        let (k3v, k3w) = rhs(v + 0.5 * h * k2v, w + 0.5 * h * k2w);
        let (k4v, k4w) = rhs(v + h * k3v, w + h * k3w);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        w += h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
        let size = v.norm() + w.norm();
        if !size.is_finite() || (scale > 0.0 && size > envelope((k + 1) as f64 * h)) {
            return Err(Error::Unstable { r, dt: h });
        }
    }
    Ok(ModeState { v, vdot: w })
}
