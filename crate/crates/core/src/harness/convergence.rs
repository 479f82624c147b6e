//! Refinement studies: commutator and Leibniz identities, manufactured packets,
//! phase speeds, discrete energy conservation, the sentinel and the step limit.

use super::{ComparisonTable, Criterion, Experiment, ExperimentConfig, Outcome};
use crate::error::Result;
use crate::grid::Grid;
use crate::material::CoefTensor;
use crate::solver::{
    measure_phase_speed, run, run_manufactured, stability_scan, PlaneWave, WaveKind,
};
use crate::vectorfields::{
    verify_commutators, verify_leibniz_n, BumpOscillation, CommutatorParams, QuadraticField,
    ResidualReport,
};

/// Isotropic coefficients for the Leibniz study; the rotation rule for `N`
/// needs an isotropic tensor.
fn isotropic_tensor() -> CoefTensor {
    let c: [f64; 15] = std::array::from_fn(|i| 0.1 * (i as f64 + 1.0).sin());
    CoefTensor::isotropic(&c).symmetrize()
}

fn density_bump(x: [f64; 3]) -> f64 {
    0.05 * (-0.5 * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2])).exp()
}

fn density_affine(x: [f64; 3]) -> f64 {
    0.1 + 0.02 * x[0] - 0.01 * x[2]
}

/// Lowest observed order over rows not already at the floor, with a table per row.
fn record_refinement(out: &mut Outcome, prefix: &str, rep: &ResidualReport, params: &CommutatorParams, floor: f64) -> f64 {
    let mut worst = f64::INFINITY;
    for row in &rep.rows {
        out.tables
            .push(ComparisonTable::refinement(format!("{prefix} {}", row.name), &params.resolutions, &row.residuals));
        if row.max_residual() <= floor {
            out.note(format!("{prefix} {} is exact to {:.1e} at every level", row.name, row.max_residual()));
        } else {
            worst = worst.min(row.min_order());
        }
    }
    worst
}

/// Commutator and Leibniz identities under joint `(h, dt)` refinement.
pub struct VerifyCommutators;

impl Experiment for VerifyCommutators {
    fn name(&self) -> &'static str {
        "verify-commutators"
    }

    fn description(&self) -> &'static str {
        "refinement study of the commutator and Leibniz identities plus exactness on quadratic fields"
    }

    fn run(&self, cfg: &ExperimentConfig) -> Result<Outcome> {
        let mut out = Outcome::new(self.name(), cfg.seed);
        let s = &cfg.commutators;
        let params = s.params(cfg.material.c1, cfg.material.c2)?;
        let u = BumpOscillation::new([0.2, -0.1, 0.3], 2.5, [1.0, -0.5, 0.25]);
        let v = BumpOscillation::new([-0.1, 0.2, 0.0], 2.7, [0.3, 1.0, -0.4]).with_phase(0.3);
        let b = isotropic_tensor();

        let rep = verify_commutators(&u, &params)?;
        let order = record_refinement(&mut out, "commutator", &rep, &params, s.floor);
        out.push(Criterion::at_least("commutator observed order", order, s.min_order));
        let rep = verify_leibniz_n(&b, &u, &v, &density_bump, &params)?;
        let order = record_refinement(&mut out, "leibniz", &rep, &params, s.floor);
        out.push(Criterion::at_least("leibniz observed order", order, s.min_order));

        let exact = CommutatorParams {
            half_width: s.exact_half_width,
            resolutions: params.resolutions[..2].to_vec(),
            ..params.clone()
        };
        let worst = |rep: &ResidualReport| rep.rows.iter().map(|r| r.max_residual()).fold(0.0, f64::max);
        let q = worst(&verify_commutators(&QuadraticField, &exact)?);
        out.push(Criterion::at_most("commutator residual on quadratic fields", q, s.exact_tolerance));
        let q = worst(&verify_leibniz_n(&b, &QuadraticField, &QuadraticField, &density_affine, &exact)?);
        out.push(Criterion::at_most("leibniz residual on quadratic fields", q, s.exact_tolerance));
        Ok(out)
    }
}

/// Solver verification.
pub struct Convergence;

impl Experiment for Convergence {
    fn name(&self) -> &'static str {
        "convergence"
    }

    fn description(&self) -> &'static str {
        "manufactured packets, phase speeds, energy conservation, sentinel and step-limit checks"
    }

    fn run(&self, cfg: &ExperimentConfig) -> Result<Outcome> {
        let mut out = Outcome::new(self.name(), cfg.seed);
        let s = &cfg.convergence;
        let p = &cfg.material;
        let levels = s.levels.clamp(2, s.resolutions.len());
        let resolutions = &s.resolutions[..levels];

        for kind in [WaveKind::Shear, WaveKind::Pressure] {
            let wave = PlaneWave::standard(kind, p)?;
            let mut errors = Vec::new();
            for &n in resolutions {
                let r = run_manufactured(&wave, p, Grid::new(s.half_width, n, 2)?, s.horizon, cfg.run.cfl)?;
                log::info!("{} packet n = {n}: L2 error {:.4e}", kind.label(), r.error_l2);
                errors.push(r.error_l2);
            }
            let table = ComparisonTable::refinement(format!("{} packet L2 error", kind.label()), resolutions, &errors);
            let orders = table.column("observed_order").unwrap_or_default();
            for (i, o) in orders.iter().enumerate().skip(1) {
                out.push(Criterion::within(
                    format!("{} order {}->{}", kind.label(), resolutions[i - 1], resolutions[i]),
                    *o,
                    s.order - s.order_tolerance,
                    s.order + s.order_tolerance,
                ));
            }
            out.tables.push(table);

            let ps = measure_phase_speed(kind, p, s.points_per_wavelength, cfg.run.cfl)?;
            out.metric(format!("{}_phase_speed", kind.label()), ps.measured);
            out.push(Criterion::at_most(
                format!("{} phase speed error at {} points per wavelength", kind.label(), s.points_per_wavelength),
                ps.relative_error(),
                s.phase_tolerance,
            ));
        }

        // the linear default run conserves the half-step energy and keeps clear of the walls
        let mut run_cfg = cfg.build_run(CoefTensor::zeros())?;
        run_cfg.report_stride = 0;
        run_cfg.track_energy = true;
        match super::observed(run(&run_cfg))? {
            Ok(o) => {
                let e0 = o.leapfrog_energy.first().map_or(0.0, |e| e.1);
                let drift = o
                    .leapfrog_energy
                    .iter()
                    .map(|e| (e.1 - e0).abs())
                    .fold(0.0, f64::max)
                    / e0.max(f64::MIN_POSITIVE);
                out.push(Criterion::at_most("linear E1 drift", drift, s.drift_tolerance));
                out.push(Criterion::at_most("sentinel peak", o.boundary_max, run_cfg.sentinel));
            }
            Err(diagnostic) => {
                out.note(diagnostic);
                out.push(Criterion::at_most("linear E1 drift", f64::NAN, s.drift_tolerance));
                out.push(Criterion::at_most("sentinel peak", f64::NAN, run_cfg.sentinel));
            }
        }

        let grid = Grid::new(cfg.grid.half_width, s.stability_points, 2)?;
        let stable = stability_scan(grid, p, s.stable_multiple, s.stability_duration)?;
        let unstable = stability_scan(grid, p, s.unstable_multiple, s.stability_duration)?;
        out.metric("stable_growth", stable.growth);
        out.push(Criterion::flag(
            format!("{}x step stays stable", s.stable_multiple),
            stable.is_stable(),
            true,
        ));
        out.push(Criterion::flag(
            format!("{}x step aborts", s.unstable_multiple),
            !unstable.is_stable(),
            true,
        ));
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coarse_commutator_study() {
        let cfg = ExperimentConfig::from_json(
            r#"{"commutators": {"levels": 2}}"#,
        )
        .unwrap();
        let o = VerifyCommutators.run(&cfg).unwrap();
        assert!(o.passed(), "{:#?}", o.criteria);
        assert!(o.tables.len() > 20);
    }

    #[test]
    fn coarse_convergence_study() {
        let cfg = ExperimentConfig::from_json(
            r#"{"grid": {"points": 33}, "run": {"horizon": 2.0}, "convergence": {"resolutions": [17, 33], "half_width": 1.5,
                "horizon": 0.15, "order_tolerance": 0.5, "phase_tolerance": 0.1, "points_per_wavelength": 10}}"#,
        )
        .unwrap();
        let o = Convergence.run(&cfg).unwrap();
        assert!(o.passed(), "{:#?}", o.criteria);
        assert_eq!(o.criterion("linear E1 drift").map(|c| c.value < 1e-10), Some(true));
    }
}
