//! Projections, light-cone weights, the energy functionals `E_k`, `X_k`, `Ẽ_k`,
//! `Ê_k`, and numerical checks of the weighted Sobolev inequalities and growth laws.

mod energy;
mod fits;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::kernels::fill_interior;
use crate::grid::{Grid, ScalarField, VectorField3};
use crate::solver::MaterialParams;

pub use energy::{
    energy_e, energy_e_hat, energy_e_tilde, energy_report, energy_x, lemma_dt2_check,
    lemma_x2_check, sobolev_ratio_report, write_reports_csv, EnergyReport, ReportContext,
    SobolevRatios, CSV_COLUMNS,
};
pub use fits::{boundedness_check, growth_exponent_fit};

/// `P_1` (radial, paired with `c1`) or `P_2` (transverse, paired with `c2`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProjectionKind {
    Radial,
    Transverse,
}

impl ProjectionKind {
    pub const ALL: [ProjectionKind; 2] = [ProjectionKind::Radial, ProjectionKind::Transverse];

    /// The label `a` in `P_a`.
    pub fn label(self) -> usize {
        match self {
            ProjectionKind::Radial => 1,
            ProjectionKind::Transverse => 2,
        }
    }

    pub fn speed(self, params: &MaterialParams) -> f64 {
        match self {
            ProjectionKind::Radial => params.c1,
            ProjectionKind::Transverse => params.c2,
        }
    }
}

/// Unit radial direction at a node, zero for `r < h/2`.
#[inline]
pub(crate) fn unit_radial(x: [f64; 3], h: f64) -> [f64; 3] {
    let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    if r < 0.5 * h {
        [0.0; 3]
    } else {
        [x[0] / r, x[1] / r, x[2] / r]
    }
}

/// `P_1 u = (x/r)(x/r · u)`, `P_2 u = u - P_1 u`; at `r < h/2`, `P_1 u = 0`.
pub fn project(kind: ProjectionKind, u: &VectorField3) -> VectorField3 {
    let grid = *u.grid();
    let h = grid.spacing();
    let src = [u.component_slice(0), u.component_slice(1), u.component_slice(2)];
    let mut out = VectorField3::zeros(grid);
    for c in 0..3 {
        fill_interior(&grid, out.component_slice_mut(c), |p, i, j, k| {
            let e = unit_radial(grid.position(i, j, k), h);
            let radial = e[0] * src[0][p] + e[1] * src[1][p] + e[2] * src[2][p];
            match kind {
                ProjectionKind::Radial => e[c] * radial,
                ProjectionKind::Transverse => src[c][p] - e[c] * radial,
            }
        });
    }
    out
}

/// `<x> = (1 + x^2)^{1/2}`.
#[inline]
pub fn bracket(x: f64) -> f64 {
    x.hypot(1.0)
}

/// `<c_a t - r>` at every node.
pub fn weight_field(kind: ProjectionKind, t: f64, grid: &Grid, params: &MaterialParams) -> ScalarField {
    let c = kind.speed(params);
    ScalarField::from_fn(*grid, |x| {
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        bracket(c * t - r)
    })
}

/// Size parameters of the almost-global existence statement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoremTargets {
    /// Bound on the `H^k_Λ` norm of the data.
    pub m: f64,
    /// Bound on the `H^{k-2}_Λ` norm of the data.
    pub eps: f64,
    /// Density size.
    pub delta: f64,
    pub k: usize,
}

impl TheoremTargets {
    pub fn new(m: f64, eps: f64, delta: f64, k: usize) -> Result<Self> {
        if !(eps >= 0.0 && eps <= m) {
            return Err(Error::InvalidParams(format!("need 0 <= eps <= M, got {eps}, {m}")));
        }
        if !(delta.abs() < 0.5) {
            return Err(Error::InvalidParams(format!("need |delta| < 1/2, got {delta}")));
        }
        Ok(TheoremTargets { m, eps, delta, k })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Norms;
    use proptest::prelude::*;

    fn grid() -> Grid {
        Grid::new(2.0, 17, 2).unwrap()
    }

    #[test]
    fn radial_and_swirl_fields() {
        let g = grid();
        let radial = VectorField3::from_fn(g, |x| {
            let s = (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])).exp();
            x.map(|v| v * s)
        });
        let p2 = project(ProjectionKind::Transverse, &radial);
        assert!(p2.sup_norm() < 1e-15);
        let p1 = project(ProjectionKind::Radial, &radial);
        assert!((&p1 - &radial).sup_norm() < 1e-15);
        let swirl = VectorField3::from_fn(g, |x| [-x[1], x[0], 0.0]);
        assert!(project(ProjectionKind::Radial, &swirl).sup_norm() < 1e-15);
    }

    #[test]
    fn origin_convention() {
        let g = grid();
        let u = VectorField3::from_fn(g, |_| [1.0, 2.0, 3.0]);
        let c = g.center_index();
        assert_eq!(project(ProjectionKind::Radial, &u).at(c, c, c), [0.0; 3]);
        assert_eq!(project(ProjectionKind::Transverse, &u).at(c, c, c), [1.0, 2.0, 3.0]);
    }

    #[test]
    fn weight_spot_values() {
        let g = grid();
        let p = MaterialParams::default();
        let c = g.center_index();
        assert_eq!(weight_field(ProjectionKind::Radial, 0.0, &g, &p).at(c, c, c), 1.0);
        assert_eq!(
            weight_field(ProjectionKind::Transverse, 2.0, &g, &p).at(c, c, c),
            5.0_f64.sqrt()
        );
        // node on the slow light cone r = c2 t
        let t = g.coord(c + 4);
        let w = weight_field(ProjectionKind::Transverse, t, &g, &p);
        assert_eq!(w.at(c + 4, c, c), 1.0);
        assert!(w.as_slice().iter().all(|&v| v >= 1.0 || v == 0.0));
    }

    #[test]
    fn targets_validation() {
        assert!(TheoremTargets::new(1.0, 0.1, 0.05, 3).is_ok());
        assert!(TheoremTargets::new(0.1, 1.0, 0.05, 3).is_err());
        assert!(TheoremTargets::new(1.0, 0.1, 0.5, 3).is_err());
    }

    proptest! {
        #[test]
        fn projection_algebra(seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let g = Grid::new(1.0, 9, 2).unwrap();
            let vals: Vec<[f64; 3]> = (0..g.storage_len())
                .map(|_| [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)])
                .collect();
            let m = g.padded();
            let u = VectorField3::from_fn(g, |x| {
                let idx = |v: f64| ((v / g.spacing()).round() as isize + g.center_index() as isize) as usize;
                vals[(idx(x[0]) * m + idx(x[1])) * m + idx(x[2])]
            });
            let p1 = project(ProjectionKind::Radial, &u);
            let p2 = project(ProjectionKind::Transverse, &u);
            prop_assert!((&(&p1 + &p2) - &u).sup_norm() < 1e-14);
            prop_assert!((&project(ProjectionKind::Radial, &p1) - &p1).sup_norm() < 1e-14);
            prop_assert!((&project(ProjectionKind::Transverse, &p2) - &p2).sup_norm() < 1e-14);
            prop_assert!(project(ProjectionKind::Radial, &p2).sup_norm() < 1e-14);
        }
    }
}
