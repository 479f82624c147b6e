//! Negative controls: configurations the detectors must flag.

use super::proxies::{attempt, slope_gate};
use super::{Criterion, Experiment, ExperimentConfig, Outcome};
use crate::error::Result;
use crate::grid::{Grid, Norms};
use crate::solver::{cfl_dt, BoundaryMode};

/// The growth proxy with large data; passes when the slope gate fails or the run aborts.
pub struct LargeAmplitude;

impl Experiment for LargeAmplitude {
    fn name(&self) -> &'static str {
        "control-large-amplitude"
    }

    fn description(&self) -> &'static str {
        "growth proxy at large amplitude; the slope gate or the instability detector must fire"
    }

    fn run(&self, cfg: &ExperimentConfig) -> Result<Outcome> {
        let mut out = Outcome::new(self.name(), cfg.seed);
        let mut big = cfg.clone();
        big.data.amplitude = cfg.controls.large_amplitude;
        let tensor = big.build_tensor(big.tensor.kind)?;
        let run_cfg = big.build_run(tensor)?;
        let fired = match attempt(&run_cfg)? {
            Ok(o) => {
                let gate = slope_gate(&big, &run_cfg, &o.reports)?;
                out.metric("slope", gate.slope);
                out.metric("slope_limit", gate.limit);
                gate.slope > gate.limit
            }
            Err(diagnostic) => {
                out.note(diagnostic);
                true
            }
        };
        out.push(Criterion::flag("detector fired", fired, true));
        Ok(out)
    }
}

/// A step well past the stability limit; passes when the run aborts.
pub struct BrokenCfl;

impl Experiment for BrokenCfl {
    fn name(&self) -> &'static str {
        "control-broken-cfl"
    }

    fn description(&self) -> &'static str {
        "runs with an oversized time step; the instability detector must abort the run"
    }

    fn run(&self, cfg: &ExperimentConfig) -> Result<Outcome> {
        let mut out = Outcome::new(self.name(), cfg.seed);
        let grid = Grid::new(cfg.grid.half_width, cfg.controls.broken_points, cfg.grid.ghost_layers)?;
        let mut walls = cfg.clone();
        walls.run.boundary = BoundaryMode::Walls;
        walls.run.horizon = cfg.controls.broken_duration;
        walls.run.report_stride = 0;
        let tensor = walls.build_tensor(walls.tensor.kind)?;
        let mut run_cfg = walls.build_run_on(grid, tensor)?;
        let dt = cfg.controls.cfl_multiple * cfl_dt(&grid, &cfg.material, &run_cfg.density, 1.0);
        run_cfg.dt_override = Some(dt);
        out.metric("dt", dt);
        let aborted = match attempt(&run_cfg)? {
            Ok(o) => {
                out.metric("sup_growth", o.sup_max / run_cfg.data.u0.sup_norm().max(f64::MIN_POSITIVE));
                false
            }
            Err(diagnostic) => {
                out.note(diagnostic);
                true
            }
        };
        out.push(Criterion::flag("run aborted", aborted, true));
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn broken_step_aborts() {
        let cfg = ExperimentConfig::from_json(r#"{"controls": {"broken_points": 17}}"#).unwrap();
        let o = BrokenCfl.run(&cfg).unwrap();
        assert!(o.passed(), "{:#?}", o);
    }

    #[test]
    fn a_legal_step_does_not_fire() {
        let cfg = ExperimentConfig::from_json(r#"{"controls": {"broken_points": 17, "cfl_multiple": 0.5}}"#).unwrap();
        assert!(!BrokenCfl.run(&cfg).unwrap().passed());
    }
}
