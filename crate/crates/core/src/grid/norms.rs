//! Quadratures over interior nodes.
//!
//! L2 norms use tensor-product trapezoid weights (`h^3` in the bulk, halved on
//! each boundary face), so constants integrate exactly and smooth integrands to
//! `O(h^2)`. Compactly supported integrands never see the boundary weights.

use super::kernels::{max_interior, sum_interior};
use super::{Grid, ScalarField, VectorField3};

/// Norms shared by scalar and vector fields.
pub trait Norms: Sync {
    fn grid_ref(&self) -> &Grid;
    /// Squared pointwise magnitude at flat index `p`.
    fn magnitude_sq(&self, p: usize) -> f64;

    fn l2_norm_sq(&self) -> f64 {
        weighted_sum(self.grid_ref(), |p| self.magnitude_sq(p))
    }

    fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    /// `|| w f ||_{L2}` with the weight applied pointwise before quadrature.
    fn weighted_l2(&self, w: &ScalarField) -> f64 {
        assert_eq!(self.grid_ref(), w.grid(), "grid mismatch");
        let ws = w.as_slice();
        weighted_sum(self.grid_ref(), |p| ws[p] * ws[p] * self.magnitude_sq(p)).sqrt()
    }

    fn sup_norm(&self) -> f64 {
        max_interior(self.grid_ref(), |p, _, _, _| self.magnitude_sq(p)).sqrt()
    }
}

impl Norms for ScalarField {
    fn grid_ref(&self) -> &Grid {
        self.grid()
    }

    #[inline]
    fn magnitude_sq(&self, p: usize) -> f64 {
        let v = self.as_slice()[p];
        v * v
    }
}

impl Norms for VectorField3 {
    fn grid_ref(&self) -> &Grid {
        self.grid()
    }

    #[inline]
    fn magnitude_sq(&self, p: usize) -> f64 {
        let a = self.component_slice(0)[p];
        let b = self.component_slice(1)[p];
        let c = self.component_slice(2)[p];
        a * a + b * b + c * c
    }
}

/// Trapezoid quadrature of a pointwise integrand given by flat index.
pub(crate) fn weighted_sum<F>(grid: &Grid, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let h = grid.spacing();
    let vol = h * h * h;
    vol * sum_interior(grid, |p, i, j, k| {
        grid.trapezoid_weight(i) * grid.trapezoid_weight(j) * grid.trapezoid_weight(k) * f(p)
    })
}

pub fn l2_norm<F: Norms>(f: &F) -> f64 {
    f.l2_norm()
}

pub fn sup_norm<F: Norms>(f: &F) -> f64 {
    f.sup_norm()
}

pub fn weighted_l2<F: Norms>(f: &F, w: &ScalarField) -> f64 {
    f.weighted_l2(w)
}
