//! Windows of equally spaced time levels and the action of generators on them.

use super::spatial::rotation_axes;
use super::{GammaWord, Generator, RotationMatrices};
use crate::error::{Error, Result};
use crate::grid::kernels::{fill_interior, stride};
use crate::grid::{partial, Grid, VectorField3};

/// `2m + 1` time levels `t_c + q dt`, `q = -m..=m`, on a common grid.
#[derive(Debug, Clone)]
pub struct Trajectory {
    grid: Grid,
    dt: f64,
    t_center: f64,
    levels: Vec<VectorField3>,
}

impl Trajectory {
    pub fn new(dt: f64, t_center: f64, levels: Vec<VectorField3>) -> Result<Self> {
        if levels.is_empty() || levels.len() % 2 == 0 {
            return Err(Error::InvalidParams(format!(
                "a trajectory window needs an odd number of levels, got {}",
                levels.len()
            )));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidParams(format!("time step must be positive, got {dt}")));
        }
        let grid = *levels[0].grid();
        if levels.iter().any(|l| *l.grid() != grid) {
            return Err(Error::GridMismatch);
        }
        Ok(Trajectory {
            grid,
            dt,
            t_center,
            levels,
        })
    }

    /// Samples `f(t, x)` on levels `t_c - m dt ..= t_c + m dt`.
    pub fn from_fn<F>(grid: Grid, dt: f64, t_center: f64, radius: usize, f: F) -> Result<Self>
    where
        F: Fn(f64, [f64; 3]) -> [f64; 3] + Sync,
    {
        let m = radius as isize;
        let levels = (-m..=m)
            .map(|q| {
                let t = t_center + q as f64 * dt;
                VectorField3::from_fn(grid, |x| f(t, x))
            })
            .collect();
        Trajectory::new(dt, t_center, levels)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn t_center(&self) -> f64 {
        self.t_center
    }

    /// Half-width `m` of the window.
    pub fn radius(&self) -> usize {
        self.levels.len() / 2
    }

    pub fn time(&self, offset: isize) -> f64 {
        self.t_center + offset as f64 * self.dt
    }

    /// Level at offset `q` from the centre; panics outside the window.
    pub fn level(&self, offset: isize) -> &VectorField3 {
        let idx = self.radius() as isize + offset;
        assert!(
            idx >= 0 && (idx as usize) < self.levels.len(),
            "offset {offset} outside window of radius {}",
            self.radius()
        );
        &self.levels[idx as usize]
    }

    pub fn center(&self) -> &VectorField3 {
        self.level(0)
    }

    pub fn levels(&self) -> &[VectorField3] {
        &self.levels
    }

    fn require(&self, needed: usize) -> Result<()> {
        if needed > self.radius() {
            return Err(Error::WindowTooShort {
                needed,
                available: self.radius(),
            });
        }
        Ok(())
    }

    /// The centred sub-window of radius `r`.
    pub fn narrowed(&self, r: usize) -> Result<Trajectory> {
        self.require(r)?;
        let m = self.radius();
        Ok(Trajectory {
            grid: self.grid,
            dt: self.dt,
            t_center: self.t_center,
            levels: self.levels[m - r..=m + r].to_vec(),
        })
    }

    /// Builds a window of radius `r` whose level `q` is `f(self, q)`.
    pub fn build<F>(&self, r: usize, f: F) -> Result<Trajectory>
    where
        F: Fn(&Trajectory, isize) -> Result<VectorField3>,
    {
        let r = r as isize;
        let levels = (-r..=r).map(|q| f(self, q)).collect::<Result<Vec<_>>>()?;
        Trajectory::new(self.dt, self.t_center, levels)
    }

    /// Centred first difference in time at offset `q`.
    pub fn time_derivative(&self, q: isize) -> Result<VectorField3> {
        self.require(q.unsigned_abs() + 1)?;
        let mut d = self.level(q + 1) - self.level(q - 1);
        d = d.scaled(0.5 / self.dt);
        Ok(d)
    }

    /// Compact second difference in time at offset `q`.
    pub fn second_time_derivative(&self, q: isize) -> Result<VectorField3> {
        self.require(q.unsigned_abs() + 1)?;
        let mut d = self.level(q + 1) + self.level(q - 1);
        d.axpy(-2.0, self.level(q));
        Ok(d.scaled(1.0 / (self.dt * self.dt)))
    }
}

/// `Γ_g u` at window offset `q`.
pub fn apply_generator(g: Generator, traj: &Trajectory, q: isize) -> Result<VectorField3> {
    let need = q.unsigned_abs() + usize::from(g.is_temporal());
    traj.require(need)?;
    let grid = traj.grid;
    let u = traj.level(q);
    Ok(match g {
        Generator::D(a) => partial(u, a),
        Generator::Dt => {
            let (prev, next) = (traj.level(q - 1), traj.level(q + 1));
            let inv = 0.5 / traj.dt;
            let mut out = VectorField3::zeros(grid);
            for c in 0..3 {
                let (a, b) = (prev.component_slice(c), next.component_slice(c));
                fill_interior(&grid, out.component_slice_mut(c), |p, _, _, _| (b[p] - a[p]) * inv);
            }
            out
        }
        Generator::Rot(l) => {
            let (a, b) = rotation_axes(l);
            let (sa, sb) = (stride(&grid, a), stride(&grid, b));
            let inv = 0.5 / grid.spacing();
            let m = RotationMatrices::get(l);
            let src = [u.component_slice(0), u.component_slice(1), u.component_slice(2)];
            let mut out = VectorField3::zeros(grid);
            for c in 0..3 {
                let f = src[c];
                let row = m[c];
                fill_interior(&grid, out.component_slice_mut(c), |p, i, j, k| {
                    let x = [grid.coord(i), grid.coord(j), grid.coord(k)];
                    let omega = (x[a] * (f[p + sb] - f[p - sb]) - x[b] * (f[p + sa] - f[p - sa])) * inv;
                    omega + row[0] * src[0][p] + row[1] * src[1][p] + row[2] * src[2][p]
                });
            }
            out
        }
        Generator::Scale => {
            let (prev, next) = (traj.level(q - 1), traj.level(q + 1));
            let s = [stride(&grid, 0), stride(&grid, 1), stride(&grid, 2)];
            let inv = 0.5 / grid.spacing();
            let tw = traj.time(q) * 0.5 / traj.dt;
            let mut out = VectorField3::zeros(grid);
            for c in 0..3 {
                let (f, a, b) = (u.component_slice(c), prev.component_slice(c), next.component_slice(c));
                fill_interior(&grid, out.component_slice_mut(c), |p, i, j, k| {
                    let x = [grid.coord(i), grid.coord(j), grid.coord(k)];
                    let radial = (x[0] * (f[p + s[0]] - f[p - s[0]])
                        + x[1] * (f[p + s[1]] - f[p - s[1]])
                        + x[2] * (f[p + s[2]] - f[p - s[2]]))
                        * inv;
                    radial - f[p] + tw * (b[p] - a[p])
                });
            }
            out
        }
    })
}

/// `Γ_g u` on every level of a window of radius `r`.
pub(crate) fn apply_generator_window(g: Generator, traj: &Trajectory, r: usize) -> Result<Trajectory> {
    traj.require(r + usize::from(g.is_temporal()))?;
    traj.build(r, |t, q| apply_generator(g, t, q))
}

/// `Γ^α u` on a window of radius `r`, letters applied rightmost first.
pub fn apply_word_window(w: &GammaWord, traj: &Trajectory, r: usize) -> Result<Trajectory> {
    traj.require(r + w.temporal_count())?;
    let letters = w.letters();
    let mut current = traj.narrowed(r + w.temporal_count())?;
    let mut remaining = w.temporal_count();
    for &g in letters.iter().rev() {
        if g.is_temporal() {
            remaining -= 1;
        }
        current = apply_generator_window(g, &current, r + remaining)?;
    }
    Ok(current)
}

/// `Γ^α u` at the centre of the window.
pub fn apply_word(w: &GammaWord, traj: &Trajectory) -> Result<VectorField3> {
    Ok(apply_word_window(w, traj, 0)?.center().clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Axis, Norms};

    fn grid() -> Grid {
        Grid::new(2.0, 9, 2).unwrap()
    }

    fn inner_max(f: &VectorField3, margin: usize) -> f64 {
        let g = f.grid();
        let mut m = 0.0_f64;
        for i in g.interior() {
            for j in g.interior() {
                for k in g.interior() {
                    if g.depth(i, j, k) >= margin {
                        for v in f.at(i, j, k) {
                            m = m.max(v.abs());
                        }
                    }
                }
            }
        }
        m
    }

    #[test]
    fn identity_field_is_killed_by_rotations_and_scaling() {
        let tr = Trajectory::from_fn(grid(), 0.1, 0.5, 1, |_, x| x).unwrap();
        for l in Axis::ALL {
            let r = apply_generator(Generator::Rot(l), &tr, 0).unwrap();
            assert_eq!(inner_max(&r, 1), 0.0);
        }
        let s = apply_generator(Generator::Scale, &tr, 0).unwrap();
        assert_eq!(inner_max(&s, 1), 0.0);
    }

    #[test]
    fn time_derivative_is_exact_on_quadratics() {
        let c = [1.0, -2.0, 0.5];
        let tr = Trajectory::from_fn(grid(), 0.1, 0.7, 1, |t, _| c.map(|v| t * t * v)).unwrap();
        let d = apply_generator(Generator::Dt, &tr, 0).unwrap();
        let g = tr.grid();
        let cidx = g.center_index();
        for (a, b) in d.at(cidx, cidx, cidx).iter().zip(c) {
            assert!((a - 1.4 * b).abs() < 1e-13);
        }
    }

    #[test]
    fn word_order_and_exactness() {
        let tr = Trajectory::from_fn(grid(), 0.1, 0.0, 0, |_, x| [x[0] * x[1], 0.0, 0.0]).unwrap();
        let w = GammaWord::new(vec![Generator::D(Axis::X1), Generator::D(Axis::X2)]);
        let out = apply_word(&w, &tr).unwrap();
        let c = grid().center_index();
        assert!((out.at(c, c, c)[0] - 1.0).abs() < 1e-14);
        assert_eq!(apply_word(&GammaWord::empty(), &tr).unwrap(), *tr.center());
    }

    #[test]
    fn window_too_short_is_reported() {
        let tr = Trajectory::from_fn(grid(), 0.1, 0.0, 1, |_, x| x).unwrap();
        let w = GammaWord::new(vec![Generator::Dt, Generator::Scale]);
        assert!(matches!(
            apply_word(&w, &tr),
            Err(Error::WindowTooShort { needed: 2, available: 1 })
        ));
    }

    #[test]
    fn composition_is_associative() {
        let g = Grid::new(3.0, 17, 2).unwrap();
        let tr = Trajectory::from_fn(g, 0.05, 0.3, 3, |t, x| {
            let b = (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])).exp() * t.cos();
            [b, x[1] * b, 0.2 * b]
        })
        .unwrap();
        let w1 = GammaWord::new(vec![Generator::Scale, Generator::Rot(Axis::X2)]);
        let w2 = GammaWord::new(vec![Generator::Dt]);
        let inner = apply_word_window(&w2, &tr, 2).unwrap();
        let lhs = apply_word(&w1, &inner).unwrap();
        let rhs = apply_word(&w1.compose(&w2), &tr).unwrap();
        assert_eq!((&lhs - &rhs).sup_norm(), 0.0);
    }
}
