//! Growth-law fits on energy time series.

use super::bracket;
use crate::error::{Error, Result};

/// Least-squares slope of `log E` against `log <t>` over the second half of the series.
///
/// An identically zero series has slope 0.
pub fn growth_exponent_fit(series: &[(f64, f64)]) -> Result<f64> {
    if series.len() < 8 {
        return Err(Error::TooFewSamples(series.len()));
    }
    if series.iter().all(|&(_, e)| e == 0.0) {
        return Ok(0.0);
    }
    let tail = &series[series.len() / 2..];
    if let Some(&(t, e)) = tail.iter().find(|&&(_, e)| !(e > 0.0 && e.is_finite())) {
        return Err(Error::InvalidParams(format!(
            "growth fit needs positive finite energies, got {e} at t = {t}"
        )));
    }
    let pts: Vec<(f64, f64)> = tail.iter().map(|&(t, e)| (bracket(t).ln(), e.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParams("growth fit needs distinct times".into()));
    }
    Ok(sxy / sxx)
}

/// `max_t E(t) / E(t_1)` where `t_1` is the second sample; 1 for a zero series.
pub fn boundedness_check(series: &[(f64, f64)]) -> f64 {
    let start = usize::from(series.len() > 1);
    let Some(&(_, reference)) = series.get(start) else {
        return 1.0;
    };
    let max = series[start..].iter().map(|p| p.1).fold(0.0_f64, f64::max);
    if max == 0.0 {
        1.0
    } else if reference == 0.0 {
        f64::INFINITY
    } else {
        max / reference
    }
}
