//! A single configured run with streamed energy reports.

use super::proxies::{attempt, push_hat_band};
use super::{Criterion, Experiment, ExperimentConfig, Outcome};
use crate::analysis::{boundedness_check, growth_exponent_fit};
use crate::error::Result;
use crate::solver::Checkpoint;

pub struct Simulate;

impl Experiment for Simulate {
    fn name(&self) -> &'static str {
        "simulate"
    }

    fn description(&self) -> &'static str {
        "runs the configured system to the horizon and records energy reports"
    }

    fn run(&self, cfg: &ExperimentConfig) -> Result<Outcome> {
        let mut out = Outcome::new(self.name(), cfg.seed);
        let tensor = cfg.build_tensor(cfg.tensor.kind)?;
        let run_cfg = cfg.build_run(tensor.clone())?;
        out.tensor = Some(tensor);
        out.metric("eps_measured", run_cfg.data.eps_measured);
        out.metric("m_measured", run_cfg.data.m_measured);
        out.metric("max_horizon", run_cfg.max_horizon());
        match attempt(&run_cfg)? {
            Ok(o) => {
                out.push(Criterion::flag("run completed", true, true));
                out.metric("dt", o.dt);
                out.metric("steps", o.steps as f64);
                out.metric("sup_max", o.sup_max);
                out.metric("boundary_max", o.boundary_max);
                let k = run_cfg.k_report;
                let series: Vec<(f64, f64)> = o.reports.iter().filter_map(|r| r.e(k).map(|e| (r.t, e))).collect();
                if let Ok(slope) = growth_exponent_fit(&series) {
                    out.metric("slope", slope);
                }
                out.metric("boundedness_ratio", boundedness_check(&series));
                if !o.reports.is_empty() {
                    push_hat_band(&mut out, "E", &o.reports, cfg.proxy.hat_band);
                }
                out.final_state = Some(Checkpoint {
                    t: o.t_final,
                    dt: o.dt,
                    levels: o.last.to_vec(),
                });
                out.add_reports("report", o.reports);
            }
            Err(diagnostic) => {
                log::warn!("{diagnostic}");
                out.note(diagnostic);
                out.push(Criterion::flag("run completed", false, true));
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_writes_every_artifact() {
        let cfg = ExperimentConfig::from_json(r#"{"grid": {"points": 21}, "run": {"horizon": 1.0, "k": 1, "report_stride": 2}}"#)
            .unwrap();
        let o = Simulate.run(&cfg).unwrap();
        assert!(o.passed(), "{:#?}", o.criteria);
        let dir = tempfile::tempdir().unwrap();
        o.write_artifacts(dir.path()).unwrap();
        for f in ["summary.json", "report.csv", "tensor.json", "final.ckpt"] {
            assert!(dir.path().join(f).exists(), "{f}");
        }
        let again = Simulate.run(&cfg).unwrap();
        let dir2 = tempfile::tempdir().unwrap();
        again.write_artifacts(dir2.path()).unwrap();
        for f in ["summary.json", "report.csv", "final.ckpt"] {
            assert_eq!(std::fs::read(dir.path().join(f)).unwrap(), std::fs::read(dir2.path().join(f)).unwrap());
        }
    }

    #[test]
    fn blow_up_is_a_failed_criterion() {
        let cfg = ExperimentConfig::from_json(
            r#"{"grid": {"points": 21}, "data": {"amplitude": 1.0}, "tensor": {"scale": 1000.0},
                "run": {"horizon": 1.0, "k": 1, "report_stride": 0}}"#,
        )
        .unwrap();
        let o = Simulate.run(&cfg).unwrap();
        assert!(!o.passed());
        assert_eq!(o.notes.len(), 1);
    }
}
