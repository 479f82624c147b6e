//! Observables standing in for the growth bound and the null-form boundedness
//! statement.

use std::collections::BTreeMap;

use super::{observed, Criterion, Experiment, ExperimentConfig, Outcome, TensorKind};
use crate::analysis::{boundedness_check, growth_exponent_fit, EnergyReport};
use crate::error::Result;
use crate::grid::Grid;
use crate::solver::{run, RunConfig, RunOutcome};

/// Largest value of each lemma ratio along a run.
pub(crate) fn lemma_maxima(reports: &[EnergyReport]) -> BTreeMap<&'static str, f64> {
    let mut out = BTreeMap::new();
    for r in reports {
        let values = [
            ("r41", r.ratios.r41),
            ("r42", r.ratios.r42),
            ("r43", r.ratios.r43),
            ("r44", r.ratios.r44),
            ("x2", r.x2_deficit),
            ("dt2", r.dt2_deficit),
        ];
        for (name, v) in values {
            if let Some(v) = v {
                let e = out.entry(name).or_insert(0.0_f64);
                *e = e.max(v);
            }
        }
    }
    out
}

/// `(min, max)` of `Ê_k / E_k` over the reports.
pub(crate) fn hat_range(reports: &[EnergyReport]) -> (f64, f64) {
    reports.iter().map(|r| r.hat_equivalence()).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    })
}

pub(crate) fn push_hat_band(out: &mut Outcome, label: &str, reports: &[EnergyReport], band: [f64; 2]) {
    let (lo, hi) = if reports.is_empty() { (f64::NAN, f64::NAN) } else { hat_range(reports) };
    out.push(Criterion::within(format!("{label} hat ratio min"), lo, band[0], band[1]));
    out.push(Criterion::within(format!("{label} hat ratio max"), hi, band[0], band[1]));
}

/// `E_k` growth slope against the allowance `ε_fit + δ_fit + gate`.
pub(crate) struct SlopeGate {
    pub slope: f64,
    pub limit: f64,
}

pub(crate) fn slope_gate(cfg: &ExperimentConfig, run_cfg: &RunConfig, reports: &[EnergyReport]) -> Result<SlopeGate> {
    let k = run_cfg.k_report;
    let series: Vec<(f64, f64)> = reports.iter().filter_map(|r| r.e(k).map(|e| (r.t, e))).collect();
    let slope = growth_exponent_fit(&series)?;
    let eps_fit = run_cfg.data.eps_measured;
    let delta_fit = run_cfg.density.sup();
    Ok(SlopeGate {
        slope,
        limit: eps_fit + delta_fit + cfg.proxy.gate,
    })
}

/// Runs a configuration, turning an instability or boundary contact into a diagnostic.
pub(crate) fn attempt(run_cfg: &RunConfig) -> Result<std::result::Result<RunOutcome, String>> {
    observed(run(run_cfg))
}

/// Growth slope of `E_k`, modified-energy equivalence and refinement stability
/// of the lemma ratios for the nonlinear inhomogeneous configuration.
pub struct Theorem1Proxy;

impl Experiment for Theorem1Proxy {
    fn name(&self) -> &'static str {
        "theorem1-proxy"
    }

    fn description(&self) -> &'static str {
        "fits the growth exponent of E_k and compares lemma ratios across two resolutions"
    }

    fn run(&self, cfg: &ExperimentConfig) -> Result<Outcome> {
        let mut out = Outcome::new(self.name(), cfg.seed);
        let tensor = cfg.build_tensor(cfg.tensor.kind)?;
        let main = cfg.build_run(tensor.clone())?;
        let coarse_grid = Grid::new(cfg.grid.half_width, cfg.proxy.refinement_points, cfg.grid.ghost_layers)?;
        let mut coarse = cfg.build_run_on(coarse_grid, tensor.clone())?;
        coarse.report_stride = cfg.proxy.refinement_stride;
        out.tensor = Some(tensor);
        out.metric("eps_fit", main.data.eps_measured);
        out.metric("delta_fit", main.density.sup());

        let fine_run = match attempt(&main)? {
            Ok(o) => o,
            Err(diagnostic) => {
                out.note(diagnostic);
                out.push(Criterion::flag("run completed", false, true));
                return Ok(out);
            }
        };
        let gate = slope_gate(cfg, &main, &fine_run.reports)?;
        out.metric("slope", gate.slope);
        out.push(Criterion::at_most(format!("E{} growth slope", main.k_report), gate.slope, gate.limit));
        push_hat_band(&mut out, "E", &fine_run.reports, cfg.proxy.hat_band);

        let fine = lemma_maxima(&fine_run.reports);
        match attempt(&coarse)? {
            Ok(o) => {
                let c = lemma_maxima(&o.reports);
                if let Ok(g) = slope_gate(cfg, &coarse, &o.reports) {
                    out.metric("slope_coarse", g.slope);
                }
                for (name, &f) in &fine {
                    let change = match c.get(name) {
                        Some(&v) if v == f => 1.0,
                        Some(&v) => v.max(f) / v.min(f),
                        None => f64::INFINITY,
                    };
                    out.metric(format!("{name}_max"), f);
                    out.metric(format!("{name}_max_coarse"), c.get(name).copied().unwrap_or(f64::NAN));
                    out.push(Criterion::at_most(format!("{name} ratio change"), change, cfg.proxy.ratio_change));
                }
                out.add_reports("report_coarse", o.reports);
            }
            Err(diagnostic) => {
                out.note(diagnostic);
                out.push(Criterion::flag("coarse run completed", false, true));
            }
        }
        out.add_reports("report", fine_run.reports);
        Ok(out)
    }
}

/// Matched null and generic tensors of equal norm on the same data and density.
pub struct Theorem2Proxy;

impl Experiment for Theorem2Proxy {
    fn name(&self) -> &'static str {
        "theorem2-proxy"
    }

    fn description(&self) -> &'static str {
        "compares the E_{k-2} max/initial ratio of a null tensor with a generic one"
    }

    fn run(&self, cfg: &ExperimentConfig) -> Result<Outcome> {
        let mut out = Outcome::new(self.name(), cfg.seed);
        let order = cfg.run.k.saturating_sub(2).max(1);
        out.metric("energy_order", order as f64);
        let mut ratios = Vec::new();
        for (label, kind) in [("generic", TensorKind::Generic), ("null", TensorKind::Null)] {
            let tensor = cfg.build_tensor(kind)?;
            out.metric(format!("{label}_norm"), tensor.frobenius_norm());
            let mut run_cfg = cfg.build_run(tensor.clone())?;
            run_cfg.k_report = order;
            match attempt(&run_cfg)? {
                Ok(o) => {
                    let series: Vec<(f64, f64)> =
                        o.reports.iter().filter_map(|r| r.e(order).map(|e| (r.t, e))).collect();
                    let ratio = boundedness_check(&series);
                    out.metric(format!("{label}_ratio"), ratio);
                    push_hat_band(&mut out, label, &o.reports, cfg.proxy.hat_band);
                    ratios.push(ratio);
                    out.add_reports(&format!("report_{label}"), o.reports);
                }
                Err(diagnostic) => {
                    out.note(format!("{label}: {diagnostic}"));
                    ratios.push(f64::NAN);
                }
            }
            if kind == TensorKind::Null {
                out.tensor = Some(tensor);
            }
        }
        let (generic, null) = (ratios[0], ratios[1]);
        out.push(Criterion::at_most("null ratio minus generic ratio", null - generic, 0.0));
        out.push(Criterion::at_most("null ratio", null, cfg.proxy.bound));
        Ok(out)
    }
}
