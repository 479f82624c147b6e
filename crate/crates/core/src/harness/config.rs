//! JSON experiment configuration with every physical default embedded.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::material::{make_null_tensor_from, CoefTensor, DensityField};
use crate::solver::{
    make_cauchy_data, BoundaryMode, MaterialParams, Profile, RunConfig, DEFAULT_SENTINEL,
};
use crate::vectorfields::CommutatorParams;

pub const CONFIG_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub half_width: f64,
    pub points: usize,
    pub ghost_layers: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            half_width: 8.0,
            points: 65,
            ghost_layers: 2,
        }
    }
}

impl GridConfig {
    pub fn build(&self) -> Result<Grid> {
        Grid::new(self.half_width, self.points, self.ghost_layers)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataConfig {
    pub profile: Profile,
    pub amplitude: f64,
    pub radius: f64,
}

impl Default for DataConfig {
    fn default() -> Self {
        DataConfig {
            profile: Profile::Bump,
            amplitude: 0.01,
            radius: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DensityConfig {
    /// Peak of `ρ̃`; zero gives constant density.
    pub delta: f64,
    pub radius: f64,
}

impl Default for DensityConfig {
    fn default() -> Self {
        DensityConfig {
            delta: 0.05,
            radius: 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TensorKind {
    Zero,
    /// Random entries, symmetrized.
    #[default]
    Generic,
    /// The generic tensor projected onto the null-form kernel.
    Null,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TensorConfig {
    pub kind: TensorKind,
    /// Frobenius norm after construction.
    pub scale: f64,
    /// Falls back to the experiment seed.
    pub seed: Option<u64>,
}

impl Default for TensorConfig {
    fn default() -> Self {
        TensorConfig {
            kind: TensorKind::Generic,
            scale: 1.0,
            seed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSettings {
    pub cfl: f64,
    pub horizon: f64,
    pub report_stride: usize,
    /// Energy order `k`.
    pub k: usize,
    pub growth_limit: f64,
    pub sentinel: f64,
    pub boundary: BoundaryMode,
}

impl Default for RunSettings {
    fn default() -> Self {
        RunSettings {
            cfl: 0.5,
            horizon: 2.5,
            report_stride: 6,
            k: 3,
            growth_limit: 1e3,
            sentinel: DEFAULT_SENTINEL,
            boundary: BoundaryMode::Isolated,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CommutatorSettings {
    pub half_width: f64,
    /// Candidate resolutions; `levels` takes the first few.
    pub resolutions: Vec<usize>,
    pub levels: usize,
    pub dt_over_h: f64,
    pub t0: f64,
    pub margin: usize,
    pub min_order: f64,
    /// Residual treated as already converged.
    pub floor: f64,
    /// Bound on residuals for the space-time quadratic field.
    pub exact_tolerance: f64,
    /// Box half-width for the quadratic-field check; round-off grows with `|x|`.
    pub exact_half_width: f64,
}

impl Default for CommutatorSettings {
    fn default() -> Self {
        CommutatorSettings {
            half_width: 6.0,
            resolutions: vec![25, 49, 97, 193],
            levels: 3,
            dt_over_h: 0.25,
            t0: 0.5,
            margin: 4,
            min_order: 1.8,
            floor: 1e-9,
            exact_tolerance: 1e-12,
            exact_half_width: 3.0,
        }
    }
}

impl CommutatorSettings {
    pub fn params(&self, c1: f64, c2: f64) -> Result<CommutatorParams> {
        if self.levels < 2 || self.levels > self.resolutions.len() {
            return Err(Error::Config(format!(
                "levels must lie in 2..={}, got {}",
                self.resolutions.len(),
                self.levels
            )));
        }
        Ok(CommutatorParams {
            c1,
            c2,
            half_width: self.half_width,
            resolutions: self.resolutions[..self.levels].to_vec(),
            dt_over_h: self.dt_over_h,
            t0: self.t0,
            margin: self.margin,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConvergenceSettings {
    /// Manufactured-solution resolutions; `levels` takes the first few.
    pub resolutions: Vec<usize>,
    pub levels: usize,
    pub half_width: f64,
    pub horizon: f64,
    pub order: f64,
    pub order_tolerance: f64,
    pub points_per_wavelength: usize,
    pub phase_tolerance: f64,
    /// Bound on the relative drift of `E_1`.
    pub drift_tolerance: f64,
    pub stability_points: usize,
    pub stability_duration: f64,
    /// Step multiple of the `cfl = 1` bound that must stay stable.
    pub stable_multiple: f64,
    /// Step multiple that must abort.
    pub unstable_multiple: f64,
}

impl Default for ConvergenceSettings {
    fn default() -> Self {
        ConvergenceSettings {
            resolutions: vec![33, 65, 129],
            levels: 3,
            half_width: 3.0,
            horizon: 1.0,
            order: 2.0,
            order_tolerance: 0.2,
            points_per_wavelength: 20,
            phase_tolerance: 0.01,
            drift_tolerance: 1e-3,
            stability_points: 17,
            stability_duration: 5.0,
            stable_multiple: 0.5,
            unstable_multiple: 2.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProxySettings {
    /// Slope allowance on top of `ε_fit + δ_fit`.
    pub gate: f64,
    /// Band for `Ê_k / E_k`.
    pub hat_band: [f64; 2],
    /// Largest allowed change of a lemma ratio between two resolutions.
    pub ratio_change: f64,
    /// Points per axis of the comparison run.
    pub refinement_points: usize,
    /// Report stride of the comparison run.
    pub refinement_stride: usize,
    /// Bound on the `E_{k-2}` max/initial ratio.
    pub bound: f64,
}

impl Default for ProxySettings {
    fn default() -> Self {
        ProxySettings {
            gate: 0.1,
            hat_band: [0.8, 1.2],
            ratio_change: 2.0,
            refinement_points: 49,
            refinement_stride: 4,
            bound: 4.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ControlSettings {
    pub large_amplitude: f64,
    /// Step as a multiple of the `cfl = 1` bound.
    pub cfl_multiple: f64,
    pub broken_points: usize,
    pub broken_duration: f64,
}

impl Default for ControlSettings {
    fn default() -> Self {
        ControlSettings {
            large_amplitude: 0.5,
            cfl_multiple: 2.5,
            broken_points: 33,
            broken_duration: 5.0,
        }
    }
}

/// A full experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    /// Registered experiment name, used by the generic `run` entry point.
    pub kind: Option<String>,
    pub seed: u64,
    pub grid: GridConfig,
    pub material: MaterialParams,
    pub data: DataConfig,
    pub density: DensityConfig,
    pub tensor: TensorConfig,
    pub run: RunSettings,
    pub commutators: CommutatorSettings,
    pub convergence: ConvergenceSettings,
    pub proxy: ProxySettings,
    pub controls: ControlSettings,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            schema_version: CONFIG_SCHEMA_VERSION,
            kind: None,
            seed: 7,
            grid: GridConfig::default(),
            material: MaterialParams::default(),
            data: DataConfig::default(),
            density: DensityConfig::default(),
            tensor: TensorConfig::default(),
            run: RunSettings::default(),
            commutators: CommutatorSettings::default(),
            convergence: ConvergenceSettings::default(),
            proxy: ProxySettings::default(),
            controls: ControlSettings::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(s).map_err(|e| Error::Config(format!("bad config: {e}")))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Cheap structural checks; physics checks happen when objects are built.
    pub fn check(&self) -> Result<()> {
        if self.schema_version != CONFIG_SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema_version {} (expected {CONFIG_SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        self.material.validate().map_err(config)?;
        self.grid.build().map_err(config)?;
        if !(self.density.delta.abs() < 0.5) {
            return Err(Error::Config(format!(
                "density amplitude must satisfy |delta| < 1/2, got {}",
                self.density.delta
            )));
        }
        if !(self.tensor.scale.is_finite() && self.tensor.scale >= 0.0) {
            return Err(Error::Config(format!("tensor scale must be >= 0, got {}", self.tensor.scale)));
        }
        if !(1..=3).contains(&self.run.k) {
            return Err(Error::Config(format!("k must lie in 1..=3, got {}", self.run.k)));
        }
        let [lo, hi] = self.proxy.hat_band;
        if !(lo > 0.0 && lo <= 1.0 && hi >= 1.0) {
            return Err(Error::Config(format!("hat band must bracket 1, got [{lo}, {hi}]")));
        }
        Ok(())
    }

    pub fn tensor_seed(&self) -> u64 {
        self.tensor.seed.unwrap_or(self.seed)
    }

    /// The tensor of the given kind at the configured Frobenius norm.
    pub fn build_tensor(&self, kind: TensorKind) -> Result<CoefTensor> {
        let seed = self.tensor_seed();
        let generic = CoefTensor::random(seed).symmetrize();
        let raw = match kind {
            TensorKind::Zero => return Ok(CoefTensor::zeros()),
            TensorKind::Generic => generic,
            TensorKind::Null => make_null_tensor_from(&generic, seed)?,
        };
        let norm = raw.frobenius_norm();
        Ok(if norm == 0.0 {
            raw
        } else {
            raw.scaled(self.tensor.scale / norm)
        })
    }

    pub fn build_density(&self, grid: Grid) -> Result<DensityField> {
        if self.density.delta == 0.0 {
            Ok(DensityField::uniform(grid))
        } else {
            DensityField::new(grid, self.density.delta, self.density.radius).map_err(config)
        }
    }

    /// A run on the configured grid with the given tensor.
    pub fn build_run(&self, tensor: CoefTensor) -> Result<RunConfig> {
        self.build_run_on(self.grid.build()?, tensor)
    }

    pub fn build_run_on(&self, grid: Grid, tensor: CoefTensor) -> Result<RunConfig> {
        let d = &self.data;
        let data = make_cauchy_data(d.profile, d.amplitude, d.radius, grid, &self.material, self.run.k)
            .map_err(config)?;
        let mut cfg = RunConfig::new(data, self.material, self.run.horizon);
        cfg.tensor = tensor;
        cfg.density = self.build_density(grid)?;
        cfg.cfl = self.run.cfl;
        cfg.report_stride = self.run.report_stride;
        cfg.k_report = self.run.k;
        cfg.growth_limit = self.run.growth_limit;
        cfg.sentinel = self.run.sentinel;
        cfg.boundary = self.run.boundary;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn config(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let cfg = ExperimentConfig::default();
        let back = ExperimentConfig::from_json(&cfg.to_json().unwrap()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(ExperimentConfig::from_json("{}").unwrap(), cfg);
    }

    #[test]
    fn partial_override_keeps_defaults() {
        let cfg = ExperimentConfig::from_json(r#"{"grid": {"points": 33}, "data": {"amplitude": 0.02}}"#).unwrap();
        assert_eq!(cfg.grid.points, 33);
        assert_eq!(cfg.grid.half_width, 8.0);
        assert_eq!(cfg.data.amplitude, 0.02);
        assert_eq!(cfg.data.radius, 2.0);
    }

    #[test]
    fn rejections() {
        for bad in [
            r#"{"schema_version": 2}"#,
            r#"{"density": {"delta": 0.6}}"#,
            r#"{"material": {"c1": 1.0, "c2": 1.0}}"#,
            r#"{"grid": {"points": 64}}"#,
            r#"{"run": {"k": 4}}"#,
            r#"{"unknown": 1}"#,
            "not json",
        ] {
            assert!(matches!(ExperimentConfig::from_json(bad), Err(Error::Config(_))), "{bad}");
        }
    }

    #[test]
    fn tensors_share_the_norm() {
        let cfg = ExperimentConfig {
            tensor: TensorConfig {
                scale: 2.5,
                ..TensorConfig::default()
            },
            ..ExperimentConfig::default()
        };
        let g = cfg.build_tensor(TensorKind::Generic).unwrap();
        let n = cfg.build_tensor(TensorKind::Null).unwrap();
        assert!((g.frobenius_norm() - 2.5).abs() < 1e-12);
        assert!((n.frobenius_norm() - 2.5).abs() < 1e-12);
        assert!(cfg.build_tensor(TensorKind::Zero).unwrap().is_zero());
    }

    #[test]
    fn run_config_inherits_settings() {
        let cfg = ExperimentConfig::from_json(r#"{"grid": {"points": 33}, "run": {"k": 2, "report_stride": 3, "horizon": 2.0}}"#)
            .unwrap();
        let run = cfg.build_run(CoefTensor::zeros()).unwrap();
        assert_eq!(run.k_report, 2);
        assert_eq!(run.report_stride, 3);
        assert!(!run.density.is_uniform());
        let far = ExperimentConfig::from_json(r#"{"run": {"horizon": 10.0}}"#).unwrap();
        assert!(far.build_run(CoefTensor::zeros()).is_err());
    }
}
