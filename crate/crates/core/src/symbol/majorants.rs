//! Closed-form upper bounds for ∫_{|ξ|≤δ0} |K_j(t,ξ)|² dξ, j = 1..6.
//!
//! All constants are explicit. With J(2k) = ∫_{|ξ|≤δ0} |ξ|^{2k} e^{−t|ξ|²} dξ:
//!
//! | term | bound | pointwise step |
//! |------|-------|----------------|
//! | b1 | P0²/(4−δ0²) · J(2) | sin² ≤ 1, 4 − r² ≥ 4 − δ0² |
//! | b2 | (L²+M²) ‖u1‖²₁,₁ · 4/(4−δ0²) · J(0) | A² + B² ≤ (L²+M²) r² ‖u1‖²₁,₁ |
//! | b3 | (L²+M²) ‖u0‖²₁,₁ · (J(4)/(4−δ0²) + J(2)) | (α sin + cos)² ≤ 1 + α², α = r/√(4−r²) |
//! | b4 | t²/(4−δ0²) · J(4) | \|√(4−r²) − 2\| ≤ r² |
//! | b5 | t²/4 · J(6) | same |
//! | b6 | 4P1²/(4−δ0²)³ · J(2) | sin²(tr)/r² · r⁴ ≤ r², θ ≤ 1 |
//!
//! b4 and b5 bound K4 and K5 without their P1, P0 prefactors, matching how
//! those terms enter the expansion. K4, K5 and K6 carry mean-value points that
//! cannot be evaluated pointwise, so they exist here only through b4..b6.

use crate::data::MomentConstants;
use crate::error::{Error, Result};
use crate::quadrature::gaussian_moment;

/// Default radius of the low-frequency ball.
pub const DEFAULT_DELTA0: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KTermMajorants {
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub b4: f64,
    pub b5: f64,
    pub b6: f64,
}

impl KTermMajorants {
    pub fn as_array(&self) -> [f64; 6] {
        [self.b1, self.b2, self.b3, self.b4, self.b5, self.b6]
    }
}

/// Data-dependent inputs of the majorants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MajorantInputs {
    pub p0: f64,
    pub p1: f64,
    pub norm11_u0: f64,
    pub norm11_u1: f64,
    pub constants: MomentConstants,
}

pub fn k_majorants(
    t: f64,
    n: usize,
    delta0: f64,
    inputs: &MajorantInputs,
) -> Result<KTermMajorants> {
    if !(delta0 > 0.0 && delta0 < 2.0) {
        return Err(Error::invalid(format!(
            "delta0 must lie in (0, 2), got {delta0}"
        )));
    }
    if !(t > 0.0) {
        return Err(Error::invalid(format!("majorants need t > 0, got {t}")));
    }
    let j = |k: u32| gaussian_moment(k, t, n, Some(delta0));
    let (j0, j2, j4, j6) = (j(0)?, j(1)?, j(2)?, j(3)?);
    let gap = 4.0 - delta0 * delta0;
    let lm = inputs.constants.l * inputs.constants.l + inputs.constants.m * inputs.constants.m;
    Ok(KTermMajorants {
        b1: inputs.p0 * inputs.p0 / gap * j2,
        b2: lm * inputs.norm11_u1.powi(2) * (4.0 / gap) * j0,
        b3: lm * inputs.norm11_u0.powi(2) * (j4 / gap + j2),
        b4: t * t / gap * j4,
        b5: 0.25 * t * t * j6,
        b6: 4.0 * inputs.p1 * inputs.p1 / gap.powi(3) * j2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::lemma22_constants;

    fn inputs(p0: f64, p1: f64) -> MajorantInputs {
        MajorantInputs {
            p0,
            p1,
            norm11_u0: 2.0,
            norm11_u1: 3.0,
            constants: lemma22_constants(),
        }
    }

    #[test]
    fn zero_masses_zero_bounds() {
        let b = k_majorants(10.0, 2, 0.5, &inputs(0.0, 1.0)).unwrap();
        assert_eq!(b.b1, 0.0);
        assert!(b.b6 > 0.0);
        let b = k_majorants(10.0, 2, 0.5, &inputs(1.0, 0.0)).unwrap();
        assert_eq!(b.b6, 0.0);
        assert!(b.b1 > 0.0);
    }

    #[test]
    fn rejects_bad_ball() {
        assert!(k_majorants(1.0, 1, 2.0, &inputs(1.0, 1.0)).is_err());
        assert!(k_majorants(1.0, 1, 0.0, &inputs(1.0, 1.0)).is_err());
        assert!(k_majorants(0.0, 1, 0.5, &inputs(1.0, 1.0)).is_err());
    }

    #[test]
    fn nonnegative_and_eventually_nonincreasing() {
        for n in 1..=3 {
            let mut prev: Option<[f64; 6]> = None;
            for i in 0..30 {
                let t = 100.0 * 1.2f64.powi(i);
                let b = k_majorants(t, n, 0.5, &inputs(1.0, -2.0))
                    .unwrap()
                    .as_array();
                assert!(b.iter().all(|&v| v >= 0.0));
                if let Some(p) = prev {
                    for j in 0..6 {
                        assert!(b[j] <= p[j], "n={n} b{} increased at t={t}", j + 1);
                    }
                }
                prev = Some(b);
            }
        }
    }
}
