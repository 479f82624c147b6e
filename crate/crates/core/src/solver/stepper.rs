//! Explicit leapfrog for `ρ ∂_t^2 u = Au + N(u, u)`.

use std::fmt;
use std::sync::Arc;

use super::MaterialParams;
use crate::error::{Error, Result};
use crate::grid::kernels::sum_interior;
use crate::grid::{apply_elastic, Grid, VectorField3};
use crate::material::{CoefTensor, DensityField, NonlinearForm};

/// An exact solution `u(t, x)` used to drive boundary layers.
pub type ExactFn = Arc<dyn Fn(f64, [f64; 3]) -> [f64; 3] + Send + Sync>;

/// Treatment of the outermost layers.
#[derive(Clone, Default)]
pub enum Boundary {
    /// Zero ghosts; the solution must stay away from the boundary.
    #[default]
    Zero,
    /// Ghosts and the two outermost interior layers are overwritten with an exact
    /// solution after every step, so updated nodes only see consistent stencils.
    Driven(ExactFn),
}

impl fmt::Debug for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Boundary::Zero => write!(f, "Zero"),
            Boundary::Driven(_) => write!(f, "Driven"),
        }
    }
}

/// Depth of the layers overwritten by [`Boundary::Driven`].
pub const DRIVEN_LAYERS: usize = 2;

/// `dt = cfl h sqrt(min ρ) / (c1 sqrt 3)`.
pub fn cfl_dt(grid: &Grid, params: &MaterialParams, rho: &DensityField, cfl: f64) -> f64 {
    cfl * grid.spacing() * rho.min_rho().sqrt() / (params.c1 * 3.0_f64.sqrt())
}

/// Right-hand side `(Au + N(u, u)) / ρ` and the leapfrog update built on it.
#[derive(Debug, Clone)]
pub struct Stepper {
    grid: Grid,
    c1sq: f64,
    c2sq: f64,
    form: Option<NonlinearForm>,
    inv_rho: Option<Vec<f64>>,
    boundary: Boundary,
}

impl Stepper {
    pub fn new(grid: Grid, params: &MaterialParams, tensor: &CoefTensor, rho: &DensityField) -> Result<Self> {
        params.validate()?;
        if rho.grid() != &grid {
            return Err(Error::GridMismatch);
        }
        let form = (!tensor.is_zero()).then(|| NonlinearForm::new(tensor));
        let inv_rho = (!rho.is_uniform())
            .then(|| rho.rho_tilde().as_slice().iter().map(|r| 1.0 / (1.0 + r)).collect());
        Ok(Stepper {
            grid,
            c1sq: params.c1 * params.c1,
            c2sq: params.c2 * params.c2,
            form,
            inv_rho,
            boundary: Boundary::Zero,
        })
    }

    /// Constant density, `B = 0`.
    pub fn linear(grid: Grid, params: &MaterialParams) -> Result<Self> {
        Stepper::new(grid, params, &CoefTensor::zeros(), &DensityField::uniform(grid))
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn form(&self) -> Option<&NonlinearForm> {
        self.form.as_ref()
    }

    pub fn boundary(&self) -> &Boundary {
        &self.boundary
    }

    /// `(Au + N(u, u)) / ρ`.
    pub fn acceleration(&self, u: &VectorField3) -> VectorField3 {
        let mut a = apply_elastic(u, self.c1sq, self.c2sq);
        if let Some(form) = &self.form {
            a.axpy(1.0, &form.apply(u, u));
        }
        if let Some(inv) = &self.inv_rho {
            for c in 0..3 {
                let s = a.component_slice_mut(c);
                for (v, w) in s.iter_mut().zip(inv) {
                    *v *= w;
                }
            }
        }
        a
    }

    /// `next = 2 curr - prev + dt^2 (A curr + N(curr, curr)) / ρ`, landing at `t + dt`.
    pub fn step(&self, prev: &VectorField3, curr: &VectorField3, t: f64, dt: f64) -> Result<VectorField3> {
        let mut next = self.acceleration(curr);
        let dt2 = dt * dt;
        for c in 0..3 {
            let (p, q) = (prev.component_slice(c), curr.component_slice(c));
            // ghosts of all three arrays are zero, so the update keeps them zero
            for ((o, &a), &b) in next.component_slice_mut(c).iter_mut().zip(q).zip(p) {
                *o = 2.0 * a - b + dt2 * *o;
            }
        }
        self.finish(next, t + dt)
    }

    /// Taylor start `u0 + dt u1 + dt^2/2 (A u0 + N(u0, u0)) / ρ`; a negative `dt` steps backward.
    pub fn first_step(&self, u0: &VectorField3, u1: &VectorField3, t0: f64, dt: f64) -> Result<VectorField3> {
        let mut next = self.acceleration(u0);
        let half = 0.5 * dt * dt;
        for c in 0..3 {
            let (a, b) = (u0.component_slice(c), u1.component_slice(c));
            for ((o, &x), &v) in next.component_slice_mut(c).iter_mut().zip(a).zip(b) {
                *o = x + dt * v + half * *o;
            }
        }
        self.finish(next, t0 + dt)
    }

    /// `h³ Σ (½ ρ |(newer - older)/dt|² - ½ newer · A older)` over interior nodes.
    ///
    /// For `B = 0` the leapfrog conserves this half-step energy exactly: with zero
    /// ghosts the discrete `A` is symmetric for the plain nodal sum.
    pub fn leapfrog_energy(&self, older: &VectorField3, newer: &VectorField3, dt: f64) -> f64 {
        let a = apply_elastic(older, self.c1sq, self.c2sq);
        let inv = 1.0 / dt;
        let rho = |p: usize| self.inv_rho.as_ref().map_or(1.0, |v| 1.0 / v[p]);
        let h = self.grid.spacing();
        h * h * h * sum_interior(&self.grid, |p, _, _, _| {
            (0..3)
                .map(|c| {
                    let (o, n) = (older.component_slice(c)[p], newer.component_slice(c)[p]);
                    let v = (n - o) * inv;
                    0.5 * rho(p) * v * v - 0.5 * n * a.component_slice(c)[p]
                })
                .sum()
        })
    }

    fn finish(&self, mut next: VectorField3, t: f64) -> Result<VectorField3> {
        if let Boundary::Driven(exact) = &self.boundary {
            drive(&mut next, exact.as_ref(), t);
        }
        if !next.is_finite() {
            return Err(Error::Instability {
                t,
                reason: "non-finite values in the solution".into(),
            });
        }
        Ok(next)
    }
}

/// Writes `exact(t, ·)` into the ghosts and the outer driven layers.
pub(crate) fn drive(u: &mut VectorField3, exact: &(dyn Fn(f64, [f64; 3]) -> [f64; 3] + Send + Sync), t: f64) {
    let grid = *u.grid();
    let g = grid.ghost_layers();
    let last = g + grid.points_per_axis() - 1;
    let m = grid.padded();
    let depth = |i: usize| -> isize {
        let i = i as isize;
        (i - g as isize).min(last as isize - i)
    };
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                let d = depth(i).min(depth(j)).min(depth(k));
                if d >= DRIVEN_LAYERS as isize {
                    continue;
                }
                let v = exact(t, grid.position(i, j, k));
                let p = grid.flat_index(i, j, k);
                for (c, val) in v.into_iter().enumerate() {
                    u.component_slice_mut(c)[p] = val;
                }
            }
        }
    }
}

/// One leapfrog step; see [`Stepper::step`].
pub fn step(stepper: &Stepper, prev: &VectorField3, curr: &VectorField3, t: f64, dt: f64) -> Result<VectorField3> {
    stepper.step(prev, curr, t, dt)
}

/// The Taylor start from `t = 0`; see [`Stepper::first_step`].
pub fn first_step(stepper: &Stepper, u0: &VectorField3, u1: &VectorField3, dt: f64) -> Result<VectorField3> {
    stepper.first_step(u0, u1, 0.0, dt)
}
