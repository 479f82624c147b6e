//! The time loop: backward start-up levels, leapfrog to the horizon, streamed
//! energy reports on a sliding window and the run-time detectors.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::{cfl_dt, CauchyData, MaterialParams, Stepper};
use crate::analysis::{energy_report, EnergyReport, ReportContext};
use crate::error::{Error, Result};
use crate::grid::kernels::max_interior;
use crate::grid::{Grid, Norms, VectorField3};
use crate::material::{CoefTensor, DensityField};
use crate::vectorfields::Trajectory;

/// Layers next to the boundary watched by the contact sentinel.
pub const SENTINEL_LAYERS: usize = 2;

/// Default sentinel threshold relative to the initial sup norm.
///
/// Second-order stencils leave a small numerical tail ahead of the physical front,
/// of relative size up to about 7e-4 next to the boundary at the no-contact horizon,
/// so the threshold sits above that level.
pub const DEFAULT_SENTINEL: f64 = 2e-3;

/// Outer boundary treatment of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryMode {
    /// Zero ghosts with the no-contact horizon enforced and the sentinel armed.
    #[default]
    Isolated,
    /// Zero ghosts act as rigid walls; no horizon limit and no sentinel.
    Walls,
}

/// Everything a run needs.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: MaterialParams,
    pub tensor: CoefTensor,
    pub density: DensityField,
    pub data: CauchyData,
    pub cfl: f64,
    pub horizon: f64,
    /// Steps between reports; 0 disables reports.
    pub report_stride: usize,
    pub k_report: usize,
    /// Fixed time step in place of the CFL step.
    pub dt_override: Option<f64>,
    /// Abort once `sup|u|` exceeds this multiple of its initial value.
    pub growth_limit: f64,
    /// Sentinel threshold relative to the initial `sup|u|`.
    pub sentinel: f64,
    pub boundary: BoundaryMode,
    /// Record the half-step leapfrog energy after every step.
    pub track_energy: bool,
}

impl RunConfig {
    /// Constant density, `B = 0`, reports every 10 steps at `k = 3`.
    pub fn new(data: CauchyData, params: MaterialParams, horizon: f64) -> Self {
        let grid = *data.grid();
        RunConfig {
            params,
            tensor: CoefTensor::zeros(),
            density: DensityField::uniform(grid),
            data,
            cfl: 0.5,
            horizon,
            report_stride: 10,
            k_report: 3,
            dt_override: None,
            growth_limit: 1e3,
            sentinel: DEFAULT_SENTINEL,
            boundary: BoundaryMode::Isolated,
            track_energy: false,
        }
    }

    pub fn grid(&self) -> &Grid {
        self.data.grid()
    }

    /// Largest horizon keeping every wave two cells away from the boundary.
    pub fn max_horizon(&self) -> f64 {
        let g = self.grid();
        let reach = self.data.support_radius.max(if self.density.is_uniform() {
            0.0
        } else {
            self.density.support_radius()
        });
        // a light region (ρ < 1) speeds waves up
        let speed = self.params.c1 / self.density.min_rho().min(1.0).sqrt();
        (g.half_width() - reach - 2.0 * g.spacing()) / speed
    }

    pub fn dt_bound(&self) -> f64 {
        cfl_dt(self.grid(), &self.params, &self.density, self.cfl)
    }

    /// `(dt, steps)`: the CFL step shrunk to land on `T`, or the override as given.
    pub fn schedule(&self) -> (f64, usize) {
        match self.dt_override {
            Some(dt) => (dt, (self.horizon / dt).ceil() as usize),
            None => {
                let n = (self.horizon / self.dt_bound()).ceil().max(1.0) as usize;
                (self.horizon / n as f64, n)
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        let grid = self.grid();
        if self.density.grid() != grid || self.data.u1.grid() != grid {
            return Err(Error::GridMismatch);
        }
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return Err(Error::Config(format!("cfl must lie in (0, 1), got {}", self.cfl)));
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(Error::Config(format!("horizon must be positive, got {}", self.horizon)));
        }
        if let Some(dt) = self.dt_override {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(Error::Config(format!("time step override must be positive, got {dt}")));
            }
        }
        if self.report_stride > 0 && !(1..=3).contains(&self.k_report) {
            return Err(Error::Config(format!("k_report must be 1, 2 or 3, got {}", self.k_report)));
        }
        if !(self.growth_limit > 1.0) {
            return Err(Error::Config(format!("growth limit must exceed 1, got {}", self.growth_limit)));
        }
        if !(self.sentinel >= 0.0) {
            return Err(Error::Config(format!("sentinel threshold must be nonnegative, got {}", self.sentinel)));
        }
        if self.boundary == BoundaryMode::Isolated {
            let limit = self.max_horizon();
            if self.horizon > limit {
                return Err(Error::Config(format!(
                    "horizon {} exceeds the no-contact bound {limit:.6}",
                    self.horizon
                )));
            }
        }
        Ok(())
    }
}

/// Result of a completed run.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub reports: Vec<EnergyReport>,
    pub dt: f64,
    pub steps: usize,
    pub t_final: f64,
    /// `(u(T - dt), u(T))`.
    pub last: [VectorField3; 2],
    /// The window of `2 k_report + 1` levels ending at `T`, when reports are on.
    pub final_window: Option<Trajectory>,
    /// Largest `sup|u|` seen over the run.
    pub sup_max: f64,
    /// Largest value next to the boundary relative to the initial `sup|u|`.
    pub boundary_max: f64,
    /// `(t_{n+1/2}, energy)` per step when tracking is on.
    pub leapfrog_energy: Vec<(f64, f64)>,
}

/// `max |u|` over nodes within `SENTINEL_LAYERS` of the boundary.
pub fn boundary_sup(u: &VectorField3) -> f64 {
    let grid = *u.grid();
    let comps = [u.component_slice(0), u.component_slice(1), u.component_slice(2)];
    max_interior(&grid, |p, i, j, k| {
        if grid.depth(i, j, k) < SENTINEL_LAYERS {
            comps.iter().fold(0.0_f64, |a, c| a.max(c[p].abs()))
        } else {
            0.0
        }
    })
}

/// Outcome of a long linear run between rigid walls.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityScan {
    pub dt: f64,
    /// `dt` over the `cfl = 1` step.
    pub cfl_multiple: f64,
    pub duration: f64,
    pub steps: usize,
    /// Largest `sup|u| / sup|u0|` reached before the end or the abort.
    pub growth: f64,
    /// Time of the instability abort, if any.
    pub aborted_at: Option<f64>,
}

impl StabilityScan {
    pub fn is_stable(&self) -> bool {
        self.aborted_at.is_none()
    }
}

/// Linear bump between zero walls for `duration` at `dt = cfl_multiple` times the
/// `cfl = 1` step; aborts when `sup|u|` grows a thousandfold.
pub fn stability_scan(grid: Grid, params: &MaterialParams, cfl_multiple: f64, duration: f64) -> Result<StabilityScan> {
    let radius = 0.25 * grid.half_width();
    let data = super::make_cauchy_data(super::Profile::Bump, 1.0, radius, grid, params, 0)?;
    let mut cfg = RunConfig::new(data, *params, duration);
    cfg.boundary = BoundaryMode::Walls;
    cfg.report_stride = 0;
    let dt = cfl_multiple * cfl_dt(&grid, params, &cfg.density, 1.0);
    cfg.dt_override = Some(dt);
    let steps = cfg.schedule().1;
    let sup0 = cfg.data.u0.sup_norm();
    let (growth, aborted_at) = match run(&cfg) {
        Ok(out) => (out.sup_max / sup0, None),
        Err(Error::Instability { t, .. }) => (cfg.growth_limit, Some(t)),
        Err(e) => return Err(e),
    };
    Ok(StabilityScan {
        dt,
        cfl_multiple,
        duration,
        steps,
        growth,
        aborted_at,
    })
}

/// Runs without observing reports as they arrive.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome> {
    run_with(cfg, &mut |_| {})
}

/// Runs and hands each report to `observer` as soon as it is computed.
pub fn run_with(cfg: &RunConfig, observer: &mut dyn FnMut(&EnergyReport)) -> Result<RunOutcome> {
    cfg.validate()?;
    let grid = *cfg.grid();
    let stepper = Stepper::new(grid, &cfg.params, &cfg.tensor, &cfg.density)?;
    let (dt, steps) = cfg.schedule();
    let reporting = cfg.report_stride > 0;
    let m = if reporting { cfg.k_report } else { 0 };
    let ctx = ReportContext {
        params: &cfg.params,
        form: stepper.form(),
        density: (!cfg.density.is_uniform()).then_some(&cfg.density),
    };

    let u0 = &cfg.data.u0;
    let sup0 = u0.sup_norm().max(cfg.data.u1.sup_norm() * dt);
    let mut sup_max = u0.sup_norm();
    let mut boundary_max = 0.0_f64;
    let watch = cfg.boundary == BoundaryMode::Isolated;
    let mut check = |u: &VectorField3, t: f64| -> Result<()> {
        let s = u.sup_norm();
        sup_max = sup_max.max(s);
        if s > cfg.growth_limit * sup0 {
            return Err(Error::Instability {
                t,
                reason: format!("sup|u| = {s:e} exceeds {} times its initial value", cfg.growth_limit),
            });
        }
        if watch && sup0 > 0.0 {
            let b = boundary_sup(u) / sup0;
            boundary_max = boundary_max.max(b);
            if b > cfg.sentinel {
                return Err(Error::BoundaryContact { t, value: b * sup0 });
            }
        }
        Ok(())
    };

    // levels -m..=0, oldest first
    let mut ring: VecDeque<VectorField3> = VecDeque::with_capacity(2 * m + 2);
    if m > 0 {
        let mut back = vec![u0.clone(), stepper.first_step(u0, &cfg.data.u1, 0.0, -dt)?];
        for q in 1..m {
            let t = -(q as f64) * dt;
            let next = stepper.step(&back[q - 1], &back[q], t, -dt)?;
            back.push(next);
        }
        ring.extend(back.into_iter().rev());
    } else {
        ring.push_back(u0.clone());
    }

    let mut reports = Vec::new();
    let mut energy = Vec::new();
    let emit = |ring: &VecDeque<VectorField3>, n_center: usize, reports: &mut Vec<EnergyReport>,
                observer: &mut dyn FnMut(&EnergyReport)|
     -> Result<()> {
        let levels: Vec<VectorField3> = ring.iter().cloned().collect();
        let traj = Trajectory::new(dt, n_center as f64 * dt, levels)?;
        let r = energy_report(cfg.k_report, &traj, ctx)?;
        observer(&r);
        reports.push(r);
        Ok(())
    };

    for n in 1..=steps {
        let t = (n - 1) as f64 * dt;
        let next = if ring.len() >= 2 {
            let len = ring.len();
            stepper.step(&ring[len - 2], &ring[len - 1], t, dt)?
        } else {
            stepper.first_step(&ring[0], &cfg.data.u1, 0.0, dt)?
        };
        check(&next, n as f64 * dt)?;
        if cfg.track_energy {
            let e = stepper.leapfrog_energy(&ring[ring.len() - 1], &next, dt);
            energy.push(((n as f64 - 0.5) * dt, e));
        }
        ring.push_back(next);
        while ring.len() > (2 * m + 1).max(2) {
            ring.pop_front();
        }
        if reporting && n >= m {
            let center = n - m;
            if center % cfg.report_stride == 0 {
                emit(&ring, center, &mut reports, observer)?;
            }
        }
    }

    let final_window = if reporting && ring.len() == 2 * m + 1 {
        let levels: Vec<VectorField3> = ring.iter().cloned().collect();
        Some(Trajectory::new(dt, (steps - m) as f64 * dt, levels)?)
    } else {
        None
    };
    let len = ring.len();
    let last = if len >= 2 {
        [ring[len - 2].clone(), ring[len - 1].clone()]
    } else {
        [u0.clone(), ring[len - 1].clone()]
    };
    Ok(RunOutcome {
        reports,
        dt,
        steps,
        t_final: steps as f64 * dt,
        last,
        final_window,
        sup_max,
        boundary_max,
        leapfrog_energy: energy,
    })
}
