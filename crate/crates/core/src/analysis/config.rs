use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::data::InitialDatumSpec;
use crate::error::{Error, Result};
use crate::symbol::DEFAULT_DELTA0;

use super::fit::log_grid;

/// Flat description of one initial datum as it appears in the config file.
#[derive(Debug, Clone, PartialEq)]
pub struct DatumConfig {
    pub family: String,
    pub amplitude: f64,
    pub width: f64,
    /// Center of a Gaussian or offset of a dipole; zeros when absent.
    pub center: Vec<f64>,
    pub radius: f64,
    pub power: u32,
}

impl DatumConfig {
    pub fn zero() -> Self {
        DatumConfig {
            family: "zero".into(),
            amplitude: 1.0,
            width: 1.0,
            center: Vec::new(),
            radius: 1.0,
            power: 2,
        }
    }

    pub fn gaussian(amplitude: f64, width: f64) -> Self {
        DatumConfig {
            family: "gaussian".into(),
            amplitude,
            width,
            ..Self::zero()
        }
    }

    pub fn build(&self, n: usize) -> Result<InitialDatumSpec> {
        let center = if self.center.is_empty() {
            vec![0.0; n]
        } else {
            self.center.clone()
        };
        match self.family.as_str() {
            "zero" => Ok(InitialDatumSpec::zero(n)),
            "gaussian" => InitialDatumSpec::gaussian(n, self.amplitude, center, self.width),
            "dipole" => InitialDatumSpec::dipole(n, self.amplitude, center, self.width),
            "bump" => InitialDatumSpec::bump(n, self.amplitude, self.radius, self.power),
            other => Err(Error::Config(format!(
                "unknown datum family '{other}' (expected gaussian, dipole, bump or zero)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridConfig {
    pub enabled: bool,
    pub box_len: f64,
    pub points: usize,
    /// Time at which grid comparisons are made.
    pub time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dimension: usize,
    pub u0: DatumConfig,
    pub u1: DatumConfig,
    pub delta0: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub t_points: usize,
    pub quad_tol: f64,
    pub grid: GridConfig,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub r_samples: Vec<f64>,
    pub samples: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            dimension: 1,
            u0: DatumConfig::zero(),
            u1: DatumConfig::gaussian(1.0, 1.0),
            delta0: DEFAULT_DELTA0,
            t_min: 1e2,
            t_max: 1e4,
            t_points: 25,
            quad_tol: 1e-10,
            grid: GridConfig {
                enabled: false,
                box_len: 128.0,
                points: 4096,
                time: 20.0,
            },
            output_dir: PathBuf::from("out"),
            seed: 0,
            r_samples: vec![0.6, 0.8, 1.0, 2.0, 3.0, 5.0, 10.0],
            samples: 10_000,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    dimension: Option<usize>,
    u0_family: Option<String>,
    u0_amplitude: Option<f64>,
    u0_width: Option<f64>,
    u0_center: Option<Vec<f64>>,
    u0_radius: Option<f64>,
    u0_power: Option<u32>,
    u1_family: Option<String>,
    u1_amplitude: Option<f64>,
    u1_width: Option<f64>,
    u1_center: Option<Vec<f64>>,
    u1_radius: Option<f64>,
    u1_power: Option<u32>,
    delta0: Option<f64>,
    t_min: Option<f64>,
    t_max: Option<f64>,
    t_points: Option<usize>,
    quad_tol: Option<f64>,
    grid_enabled: Option<bool>,
    grid_l: Option<f64>,
    grid_n: Option<usize>,
    grid_t: Option<f64>,
    output_dir: Option<PathBuf>,
    seed: Option<u64>,
    r_samples: Option<Vec<f64>>,
    samples: Option<usize>,
}

fn merge_datum(
    base: DatumConfig,
    family: Option<String>,
    amplitude: Option<f64>,
    width: Option<f64>,
    center: Option<Vec<f64>>,
    radius: Option<f64>,
    power: Option<u32>,
) -> DatumConfig {
    DatumConfig {
        family: family.unwrap_or(base.family),
        amplitude: amplitude.unwrap_or(base.amplitude),
        width: width.unwrap_or(base.width),
        center: center.unwrap_or(base.center),
        radius: radius.unwrap_or(base.radius),
        power: power.unwrap_or(base.power),
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let d = ExperimentConfig::default();
        let cfg = ExperimentConfig {
            dimension: raw.dimension.unwrap_or(d.dimension),
            u0: merge_datum(
                d.u0,
                raw.u0_family,
                raw.u0_amplitude,
                raw.u0_width,
                raw.u0_center,
                raw.u0_radius,
                raw.u0_power,
            ),
            u1: merge_datum(
                d.u1,
                raw.u1_family,
                raw.u1_amplitude,
                raw.u1_width,
                raw.u1_center,
                raw.u1_radius,
                raw.u1_power,
            ),
            delta0: raw.delta0.unwrap_or(d.delta0),
            t_min: raw.t_min.unwrap_or(d.t_min),
            t_max: raw.t_max.unwrap_or(d.t_max),
            t_points: raw.t_points.unwrap_or(d.t_points),
            quad_tol: raw.quad_tol.unwrap_or(d.quad_tol),
            grid: GridConfig {
                enabled: raw.grid_enabled.unwrap_or(d.grid.enabled),
                box_len: raw.grid_l.unwrap_or(d.grid.box_len),
                points: raw.grid_n.unwrap_or(d.grid.points),
                time: raw.grid_t.unwrap_or(d.grid.time),
            },
            output_dir: raw.output_dir.unwrap_or(d.output_dir),
            seed: raw.seed.unwrap_or(d.seed),
            r_samples: raw.r_samples.unwrap_or(d.r_samples),
            samples: raw.samples.unwrap_or(d.samples),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(1..=3).contains(&self.dimension) {
            return bad(format!(
                "dimension must be 1, 2 or 3, got {}",
                self.dimension
            ));
        }
        if !(self.t_min > 0.0 && self.t_min.is_finite()) {
            return bad(format!("t_min must be positive, got {}", self.t_min));
        }
        if !(self.t_max > self.t_min && self.t_max.is_finite()) {
            return bad(format!("t_max must exceed t_min, got {}", self.t_max));
        }
        if self.t_points < 2 {
            return bad("t_points must be at least 2".into());
        }
        if !(self.delta0 > 0.0 && self.delta0 < 2.0) {
            return bad(format!("delta0 must lie in (0, 2), got {}", self.delta0));
        }
        if !(self.quad_tol > 0.0 && self.quad_tol < 1e-2) {
            return bad(format!(
                "quad_tol must lie in (0, 1e-2), got {}",
                self.quad_tol
            ));
        }
        if self
            .r_samples
            .iter()
            .any(|&r| !(r > self.delta0 && r.is_finite()))
        {
            return bad(format!("r_samples must exceed delta0 = {}", self.delta0));
        }
        if self.grid.enabled && !(self.grid.time > 0.0) {
            return bad("grid_t must be positive".into());
        }
        let n = self.dimension;
        for (name, d) in [("u0", &self.u0), ("u1", &self.u1)] {
            d.build(n)
                .map_err(|e| Error::Config(format!("{name}: {e}")))?;
        }
        Ok(())
    }

    pub fn data(&self) -> Result<(InitialDatumSpec, InitialDatumSpec)> {
        Ok((
            self.u0.build(self.dimension)?,
            self.u1.build(self.dimension)?,
        ))
    }

    pub fn t_grid(&self) -> Vec<f64> {
        log_grid(self.t_min, self.t_max, self.t_points)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_from_empty_file() {
        let c = ExperimentConfig::from_toml_str("").unwrap();
        assert_eq!(c, ExperimentConfig::default());
        let g = c.t_grid();
        assert_eq!(g.len(), 25);
        assert_eq!((g[0], g[24]), (1e2, 1e4));
    }

    #[test]
    fn parses_keys() {
        let c = ExperimentConfig::from_toml_str(
            "dimension = 2\nu0_family = \"dipole\"\nu0_center = [1.0, 0.0]\nu1_family = \"zero\"\n\
             delta0 = 0.4\nt_points = 9\ngrid_enabled = true\ngrid_n = 256\nseed = 7\n",
        )
        .unwrap();
        assert_eq!(c.dimension, 2);
        assert_eq!(c.u0.family, "dipole");
        assert!(c.data().unwrap().1.is_zero());
        assert_eq!(
            (c.delta0, c.t_points, c.grid.points, c.seed),
            (0.4, 9, 256, 7)
        );
        assert!(c.grid.enabled);
    }

    #[test]
    fn rejects_bad_configs() {
        for text in [
            "t_min = 0.0",
            "t_min = 10.0\nt_max = 5.0",
            "delta0 = 2.0",
            "dimension = 4",
            "unknown_key = 1",
            "u1_family = \"square\"",
            "u1_width = -1.0",
            "r_samples = [0.1]",
            "dimension = [",
        ] {
            assert!(
                matches!(ExperimentConfig::from_toml_str(text), Err(Error::Config(_))),
                "accepted: {text}"
            );
        }
    }
}
