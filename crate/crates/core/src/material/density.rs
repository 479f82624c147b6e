//! The perturbed density `ρ = 1 + ρ̃` with a smooth compactly supported `ρ̃`.

use crate::error::{Error, Result};
use crate::grid::{Axis, Grid, Norms, ScalarField};
use crate::jet::{bump, lambda_words, Jet, LambdaLetter};

/// `ρ̃(x) = δ exp(1 - 1 / (1 - (r / R)^2))` for `r < R`, zero outside.
///
/// Amplitudes are restricted to `|δ| < 1/2`, so `ρ >= 1/2` everywhere.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityField {
    delta: f64,
    support_radius: f64,
    rho_tilde: ScalarField,
}

fn bump_value(r2: f64, radius: f64) -> f64 {
    let s = r2 / (radius * radius);
    if s >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - s)).exp()
    }
}

impl DensityField {
    pub fn new(grid: Grid, delta: f64, support_radius: f64) -> Result<Self> {
        if !(delta.is_finite() && delta.abs() < 0.5) {
            return Err(Error::InvalidParams(format!(
                "density amplitude must satisfy |delta| < 1/2, got {delta}"
            )));
        }
        if !(support_radius.is_finite() && support_radius > 0.0) {
            return Err(Error::InvalidParams(format!(
                "density support radius must be positive, got {support_radius}"
            )));
        }
        let rho_tilde = ScalarField::from_fn(grid, |x| {
            delta * bump_value(x[0] * x[0] + x[1] * x[1] + x[2] * x[2], support_radius)
        });
        Ok(DensityField {
            delta,
            support_radius,
            rho_tilde,
        })
    }

    /// Constant density `ρ ≡ 1`.
    pub fn uniform(grid: Grid) -> Self {
        DensityField {
            delta: 0.0,
            support_radius: 0.0,
            rho_tilde: ScalarField::zeros(grid),
        }
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    pub fn rho_tilde(&self) -> &ScalarField {
        &self.rho_tilde
    }

    pub fn grid(&self) -> &Grid {
        self.rho_tilde.grid()
    }

    pub fn is_uniform(&self) -> bool {
        self.delta == 0.0
    }

    /// `min ρ` over the grid (at most 1).
    pub fn min_rho(&self) -> f64 {
        1.0 + self
            .rho_tilde
            .as_slice()
            .iter()
            .fold(0.0_f64, |a, &b| a.min(b))
    }

    /// `sup |ρ̃|`.
    pub fn sup(&self) -> f64 {
        self.rho_tilde.sup_norm()
    }

    /// Taylor jet of `ρ̃` at `x` to total degree `order`.
    pub fn jet(&self, x: [f64; 3], order: usize) -> Jet {
        if self.is_uniform() {
            return Jet::constant(order, x, 0.0);
        }
        bump(order, x, self.support_radius).scale(self.delta)
    }

    /// Trapezoid sums `sum_p w_p f_q(x_p)^2` over support nodes for every word `q`,
    /// with `f_q` built from the jet at each node.
    fn word_sums<F>(&self, order: usize, words: usize, f: F) -> Vec<f64>
    where
        F: Fn([f64; 3], &Jet, &mut [f64]),
    {
        let grid = *self.grid();
        let mut sums = vec![0.0; words];
        if self.is_uniform() {
            return sums;
        }
        let h3 = grid.spacing().powi(3);
        let mut vals = vec![0.0; words];
        let r2max = self.support_radius * self.support_radius;
        for i in grid.interior() {
            for j in grid.interior() {
                for k in grid.interior() {
                    let x = grid.position(i, j, k);
                    if x.iter().map(|v| v * v).sum::<f64>() >= r2max {
                        continue;
                    }
                    let w = h3
                        * grid.trapezoid_weight(i)
                        * grid.trapezoid_weight(j)
                        * grid.trapezoid_weight(k);
                    let jet = self.jet(x, order);
                    f(x, &jet, &mut vals);
                    for (s, v) in sums.iter_mut().zip(&vals) {
                        *s += w * v * v;
                    }
                }
            }
        }
        sums
    }
}

/// `max_{|α| <= k_max} || <r> Λ^α ρ̃ ||_{L2}`, with `Λ^α ρ̃` from the analytic closure.
pub fn density_assumption_check(rho: &DensityField, k_max: usize) -> f64 {
    let words = lambda_words(k_max);
    let sums = rho.word_sums(k_max, words.len(), |x, jet, out| {
        let weight = (1.0 + x.iter().map(|v| v * v).sum::<f64>()).sqrt();
        for (o, w) in out.iter_mut().zip(&words) {
            *o = weight * jet.apply_lambda_word(w).value();
        }
    });
    sums.into_iter().map(f64::sqrt).fold(0.0, f64::max)
}

/// `sum_{|α| <= k-1} (||Λ^α ρ̃|| + ||∇Λ^α ρ̃||)`, the first slot of the `H^k_Λ` norm.
pub fn density_h_lambda_norm(rho: &DensityField, k: usize) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let words = lambda_words(k - 1);
    let n = words.len();
    let sums = rho.word_sums(k, 4 * n, |_, jet, out| {
        for (q, w) in words.iter().enumerate() {
            let lw = jet.apply_lambda_word(w);
            out[4 * q] = lw.value();
            for a in 0..3 {
                out[4 * q + 1 + a] = lw
                    .apply_lambda(LambdaLetter::Partial(Axis::ALL[a]))
                    .value();
            }
        }
    });
    sums.chunks(4)
        .map(|c| c[0].sqrt() + (c[1] + c[2] + c[3]).sqrt())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid::new(3.0, 25, 2).unwrap()
    }

    #[test]
    fn rejects_large_amplitude() {
        assert!(DensityField::new(grid(), 0.5, 2.0).is_err());
        assert!(DensityField::new(grid(), -0.7, 2.0).is_err());
        assert!(DensityField::new(grid(), 0.1, 0.0).is_err());
        let d = DensityField::new(grid(), 0.49, 2.0).unwrap();
        assert!(d.min_rho() >= 0.5);
    }

    #[test]
    fn vanishes_outside_support() {
        let d = DensityField::new(grid(), 0.2, 2.0).unwrap();
        let g = *d.grid();
        for i in g.interior() {
            let x = g.position(i, g.center_index(), g.center_index());
            if x[0].abs() >= 2.0 {
                assert_eq!(d.rho_tilde().at(i, g.center_index(), g.center_index()), 0.0);
            }
        }
        let c = g.center_index();
        assert!((d.rho_tilde().at(c, c, c) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn zero_density_checks_vanish() {
        let d = DensityField::uniform(grid());
        assert_eq!(density_assumption_check(&d, 2), 0.0);
        assert_eq!(density_h_lambda_norm(&d, 3), 0.0);
    }

    #[test]
    fn rotations_annihilate_radial_density() {
        let d = DensityField::new(grid(), 0.1, 2.0).unwrap();
        let words: Vec<Vec<LambdaLetter>> = (0..3)
            .map(|a| vec![LambdaLetter::Rotation(crate::grid::Axis::ALL[a])])
            .collect();
        let sums = d.word_sums(2, 3, |_, jet, out| {
            for (o, w) in out.iter_mut().zip(&words) {
                *o = jet.apply_lambda_word(w).value();
            }
        });
        for s in sums {
            assert!(s.sqrt() < 1e-12);
        }
    }

    #[test]
    fn checks_scale_linearly_with_amplitude() {
        let a = DensityField::new(grid(), 0.05, 2.0).unwrap();
        let b = DensityField::new(grid(), 0.2, 2.0).unwrap();
        let ra = density_assumption_check(&a, 2);
        let rb = density_assumption_check(&b, 2);
        assert!(ra > 0.0);
        assert!((rb / ra - 4.0).abs() < 1e-12);
        let ha = density_h_lambda_norm(&a, 2);
        let hb = density_h_lambda_norm(&b, 2);
        assert!((hb / ha - 4.0).abs() < 1e-12);
    }

    #[test]
    fn zeroth_word_matches_grid_quadrature() {
        let d = DensityField::new(grid(), 0.3, 2.0).unwrap();
        let direct = d.rho_tilde().l2_norm();
        let from_jets = d.word_sums(0, 1, |_, jet, out| out[0] = jet.value())[0].sqrt();
        assert!((direct - from_jets).abs() < 1e-13);
    }
}
