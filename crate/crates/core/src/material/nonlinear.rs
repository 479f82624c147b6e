//! The quadratic nonlinearity `N^i(u, v) = B^{ijk}_{lmn} d_l(d_m u^j d_n v^k)`
//! and the trilinear form `Ñ(u, v, w) = B^{ijk}_{lmn} d_l u^i d_m v^j d_n w^k`.
//!
//! `N` is evaluated in conservative form: the nine fluxes
//! `F^i_l = B^{ijk}_{lmn} d_m u^j d_n v^k` are formed at every node first and
//! the outer derivative is a centered difference of those fluxes.

use super::tensor::{flat, CoefTensor};
use crate::grid::kernels::{fill_interior, fill_interior_multi, jacobian, stride};
use crate::grid::{ScalarField, VectorField3};

/// A coefficient tensor laid out for node-wise contraction.
///
/// `coef[81 * (3i + l) + 9 * (3j + m) + (3k + n)] = B^{ijk}_{lmn}`.
#[derive(Debug, Clone)]
pub struct NonlinearForm {
    tensor: CoefTensor,
    coef: Vec<f64>,
}

impl NonlinearForm {
    pub fn new(tensor: &CoefTensor) -> Self {
        let mut coef = vec![0.0; 729];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        for m in 0..3 {
                            for n in 0..3 {
                                coef[81 * (3 * i + l) + 9 * (3 * j + m) + 3 * k + n] =
                                    tensor.entries()[flat(i, j, k, l, m, n)];
                            }
                        }
                    }
                }
            }
        }
        NonlinearForm {
            tensor: tensor.clone(),
            coef,
        }
    }

    pub fn tensor(&self) -> &CoefTensor {
        &self.tensor
    }

    pub fn is_zero(&self) -> bool {
        self.tensor.is_zero()
    }

    /// `N(u, v)`; returns zeros without touching the fields when `B = 0`.
    pub fn apply(&self, u: &VectorField3, v: &VectorField3) -> VectorField3 {
        assert_eq!(u.grid(), v.grid(), "grid mismatch");
        let grid = *u.grid();
        let mut out = VectorField3::zeros(grid);
        if self.is_zero() {
            return out;
        }
        let gu = jacobian(u);
        let gv_own;
        let gv = if std::ptr::eq(u, v) {
            &gu
        } else {
            gv_own = jacobian(v);
            &gv_own
        };
        let coef = &self.coef;
        let mut flux = vec![0.0; 9 * grid.storage_len()];
        fill_interior_multi::<9, _>(&grid, &mut flux, |p, f| {
            let mut prod = [0.0; 81];
            for a in 0..9 {
                let x = gu[a][p];
                for b in 0..9 {
                    prod[9 * a + b] = x * gv[b][p];
                }
            }
            for (il, slot) in f.iter_mut().enumerate() {
                let row = &coef[81 * il..81 * (il + 1)];
                *slot = row.iter().zip(&prod).map(|(c, q)| c * q).sum();
            }
        });
        let inv = 0.5 / grid.spacing();
        let s = [stride(&grid, 0), stride(&grid, 1), stride(&grid, 2)];
        for i in 0..3 {
            fill_interior(&grid, out.component_slice_mut(i), |p, _, _, _| {
                let mut acc = 0.0;
                for (l, &sl) in s.iter().enumerate() {
                    let c = 3 * i + l;
                    acc += flux[9 * (p + sl) + c] - flux[9 * (p - sl) + c];
                }
                acc * inv
            });
        }
        out
    }

    /// Pointwise `Ñ(u, v, w)`.
    pub fn apply_tilde(&self, u: &VectorField3, v: &VectorField3, w: &VectorField3) -> ScalarField {
        assert!(u.grid() == v.grid() && v.grid() == w.grid(), "grid mismatch");
        let grid = *u.grid();
        let mut out = ScalarField::zeros(grid);
        if self.is_zero() {
            return out;
        }
        let (gu, gv, gw) = (jacobian(u), jacobian(v), jacobian(w));
        let coef = &self.coef;
        fill_interior(&grid, out.as_slice_mut(), |p, _, _, _| {
            let mut acc = 0.0;
            for a in 0..9 {
                let x = gu[a][p];
                if x == 0.0 {
                    continue;
                }
                let mut inner = 0.0;
                for b in 0..9 {
                    let y = gv[b][p];
                    let row = &coef[81 * a + 9 * b..81 * a + 9 * b + 9];
                    inner += y * (0..9).map(|c| row[c] * gw[c][p]).sum::<f64>();
                }
                acc += x * inner;
            }
            acc
        });
        out
    }

    /// Node-wise quadratic form of `Ñ(·, ·, w)` packed over `a <= b`, 45 values per node:
    /// `Ñ(v, v, w) = sum_{a <= b} dv_a dv_b Q[packed(a, b)]`.
    pub(crate) fn packed_contraction(&self, w: &VectorField3) -> Vec<f64> {
        let grid = *w.grid();
        let gw = jacobian(w);
        let coef = &self.coef;
        let mut out = vec![0.0; PACKED * grid.storage_len()];
        fill_interior_multi::<PACKED, _>(&grid, &mut out, |p, q| {
            let g: [f64; 9] = std::array::from_fn(|n| gw[n][p]);
            let c = |a: usize, b: usize| -> f64 {
                let row = &coef[81 * a + 9 * b..81 * a + 9 * b + 9];
                row.iter().zip(&g).map(|(x, y)| x * y).sum()
            };
            let mut n = 0;
            for a in 0..9 {
                q[n] = c(a, a);
                n += 1;
                for b in a + 1..9 {
                    q[n] = c(a, b) + c(b, a);
                    n += 1;
                }
            }
        });
        out
    }
}

/// Entries of a packed symmetric 9x9 form.
pub(crate) const PACKED: usize = 45;

/// `sum_{a <= b} d_a d_b q[packed(a, b)]` in the order of [`NonlinearForm::packed_contraction`].
#[inline]
pub(crate) fn packed_quadratic(q: &[f64], d: &[f64; 9]) -> f64 {
    let mut n = 0;
    let mut acc = 0.0;
    for a in 0..9 {
        let mut inner = 0.0;
        for b in a..9 {
            inner += q[n] * d[b];
            n += 1;
        }
        acc += d[a] * inner;
    }
    acc
}

/// `N(u, v)` for tensor `B`.
pub fn apply_n(b: &CoefTensor, u: &VectorField3, v: &VectorField3) -> VectorField3 {
    NonlinearForm::new(b).apply(u, v)
}

/// Pointwise `Ñ(u, v, w)` for tensor `B`.
pub fn apply_n_tilde(
    b: &CoefTensor,
    u: &VectorField3,
    v: &VectorField3,
    w: &VectorField3,
) -> ScalarField {
    NonlinearForm::new(b).apply_tilde(u, v, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Grid, Norms};
    use proptest::prelude::*;

    fn gauss(x: [f64; 3], c: [f64; 3]) -> f64 {
        (-0.5 * (0..3).map(|a| (x[a] - c[a]).powi(2)).sum::<f64>()).exp()
    }

    fn fields(g: Grid) -> (VectorField3, VectorField3) {
        let u = VectorField3::from_fn(g, |x| {
            let b = gauss(x, [0.2, -0.1, 0.3]);
            [b, 0.5 * x[0] * b, -x[2] * b]
        });
        let v = VectorField3::from_fn(g, |x| {
            let b = gauss(x, [-0.3, 0.2, 0.0]);
            [x[1] * b, b, 0.3 * b]
        });
        (u, v)
    }

    fn sym(seed: u64) -> CoefTensor {
        CoefTensor::random(seed).symmetrize()
    }

    /// Product-rule form with nested centered differences, written independently.
    fn expanded(b: &CoefTensor, u: &VectorField3, v: &VectorField3) -> VectorField3 {
        use crate::grid::{partial, Axis};
        let d = |f: &VectorField3, a: usize| partial(f, Axis::from_index(a).unwrap());
        let du: Vec<VectorField3> = (0..3).map(|a| d(u, a)).collect();
        let dv: Vec<VectorField3> = (0..3).map(|a| d(v, a)).collect();
        let ddu: Vec<Vec<VectorField3>> =
            (0..3).map(|l| (0..3).map(|m| d(&du[m], l)).collect()).collect();
        let ddv: Vec<Vec<VectorField3>> =
            (0..3).map(|l| (0..3).map(|n| d(&dv[n], l)).collect()).collect();
        let g = *u.grid();
        let mut out = VectorField3::zeros(g);
        for i in 0..3 {
            let comp = out.component_slice_mut(i);
            for p in 0..g.storage_len() {
                let mut acc = 0.0;
                for j in 0..3 {
                    for k in 0..3 {
                        for l in 0..3 {
                            for m in 0..3 {
                                for n in 0..3 {
                                    let t1 = ddu[l][m].component_slice(j)[p]
                                        * dv[n].component_slice(k)[p];
                                    let t2 = du[m].component_slice(j)[p]
                                        * ddv[l][n].component_slice(k)[p];
                                    acc += b.get(i, j, k, l, m, n) * (t1 + t2);
                                }
                            }
                        }
                    }
                }
                comp[p] = acc;
            }
        }
        out
    }

    #[test]
    fn vanishes_on_zero_inputs_and_zero_tensor() {
        let g = Grid::new(3.0, 17, 2).unwrap();
        let (u, v) = fields(g);
        let z = VectorField3::zeros(g);
        let b = sym(1);
        assert_eq!(apply_n(&b, &u, &z).sup_norm(), 0.0);
        assert_eq!(apply_n(&b, &z, &v).sup_norm(), 0.0);
        assert_eq!(apply_n(&CoefTensor::zeros(), &u, &v).sup_norm(), 0.0);
        assert_eq!(apply_n_tilde(&b, &u, &v, &z).sup_norm(), 0.0);
    }

    #[test]
    fn affine_fields_give_zero_away_from_boundary() {
        let g = Grid::new(2.0, 13, 2).unwrap();
        let u = VectorField3::from_fn(g, |x| [x[0] + 2.0 * x[1], -x[2], 0.5 * x[0]]);
        let v = VectorField3::from_fn(g, |x| [x[2], x[0] - x[1], 3.0]);
        let n = apply_n(&sym(2), &u, &v);
        let m = g.padded();
        let inner = (g.ghost_layers() + 2)..(m - g.ghost_layers() - 2);
        for i in inner.clone() {
            for j in inner.clone() {
                for k in inner.clone() {
                    for c in n.at(i, j, k) {
                        assert!(c.abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn conservative_matches_product_rule_to_second_order() {
        let b = sym(3);
        let err = |n: usize| {
            let g = Grid::new(6.0, n, 2).unwrap();
            let (u, v) = fields(g);
            (&apply_n(&b, &u, &v) - &expanded(&b, &u, &v)).l2_norm()
        };
        let ns = [41usize, 61, 81];
        let e: Vec<f64> = ns.iter().map(|&n| err(n)).collect();
        let h = |n: usize| 12.0 / (n - 1) as f64;
        let o1 = (e[0] / e[1]).ln() / (h(ns[0]) / h(ns[1])).ln();
        let o2 = (e[1] / e[2]).ln() / (h(ns[1]) / h(ns[2])).ln();
        assert!(o1 > 1.7 && o2 > 1.8 && o2 > o1, "orders {o1} {o2}");
    }

    #[test]
    fn identity_field_collapses_trilinear_form() {
        let g = Grid::new(1.0, 9, 2).unwrap();
        let id = VectorField3::from_fn(g, |x| x);
        let b = sym(4);
        let mut trace = 0.0;
        for l in 0..3 {
            for m in 0..3 {
                for n in 0..3 {
                    trace += b.get(l, m, n, l, m, n);
                }
            }
        }
        let t = apply_n_tilde(&b, &id, &id, &id);
        let c = g.center_index();
        assert!((t.at(c, c, c) - trace).abs() < 1e-12);
    }

    #[test]
    fn trilinear_matches_naive_loop() {
        let g = Grid::new(3.0, 17, 2).unwrap();
        let (u, v) = fields(g);
        let w = VectorField3::from_fn(g, |x| [x[0] * x[1], (x[2]).sin(), 1.0 + x[0]]);
        let b = CoefTensor::random(5);
        let t = apply_n_tilde(&b, &u, &v, &w);
        let grads = |f: &VectorField3| -> Vec<VectorField3> {
            Axis::ALL.iter().map(|&a| crate::grid::partial(f, a)).collect()
        };
        use crate::grid::Axis;
        let (du, dv, dw) = (grads(&u), grads(&v), grads(&w));
        let nodes = [(5, 7, 9), (10, 10, 10), (3, 12, 6), (8, 4, 11), (12, 12, 3), (6, 6, 6), (9, 3, 14), (14, 9, 8), (4, 4, 4), (11, 13, 7)];
        for &(a, bb, c) in &nodes {
            let mut s = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    for k in 0..3 {
                        for l in 0..3 {
                            for m in 0..3 {
                                for n in 0..3 {
                                    s += b.get(i, j, k, l, m, n)
                                        * du[l].at(a, bb, c)[i]
                                        * dv[m].at(a, bb, c)[j]
                                        * dw[n].at(a, bb, c)[k];
                                }
                            }
                        }
                    }
                }
            }
            assert!((t.at(a, bb, c) - s).abs() < 1e-12 * (1.0 + s.abs()));
        }
    }

    #[test]
    fn packed_contraction_reproduces_trilinear_form() {
        let g = Grid::new(3.0, 13, 2).unwrap();
        let (u, v) = fields(g);
        // no symmetry assumed
        let form = NonlinearForm::new(&CoefTensor::random(6));
        let q = form.packed_contraction(&u);
        let gv = jacobian(&v);
        let direct = form.apply_tilde(&v, &v, &u);
        for p in [g.flat_index(6, 6, 6), g.flat_index(4, 8, 7)] {
            let d: [f64; 9] = std::array::from_fn(|n| gv[n][p]);
            let s = packed_quadratic(&q[PACKED * p..PACKED * (p + 1)], &d);
            assert!((s - direct.as_slice()[p]).abs() < 1e-13 * (1.0 + s.abs()));
        }
    }

    #[test]
    fn energy_flux_integral_two_ways() {
        // int u_t . N(u, u) with the conservative and the product-rule form
        let b = sym(8);
        let diff = |n: usize| {
            let g = Grid::new(6.0, n, 2).unwrap();
            let (u, ut) = fields(g);
            let a = ut.dot(&apply_n(&b, &u, &u));
            let e = ut.dot(&expanded(&b, &u, &u));
            let h3 = g.spacing().powi(3);
            let ia: f64 = a.as_slice().iter().sum::<f64>() * h3;
            let ie: f64 = e.as_slice().iter().sum::<f64>() * h3;
            (ia - ie).abs()
        };
        let (d1, d2) = (diff(31), diff(61));
        assert!(d1 / d2 > 3.0, "{d1} {d2}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(8))]
        #[test]
        fn polarization_identity(seed in 0u64..500, s in -2.0f64..2.0) {
            let g = Grid::new(3.0, 11, 2).unwrap();
            let (u, v0) = fields(g);
            let v = v0.scaled(s);
            let form = NonlinearForm::new(&CoefTensor::random(seed));
            let uv = &u + &v;
            let lhs = &(&form.apply(&uv, &uv) - &form.apply(&u, &u)) - &form.apply(&v, &v);
            let rhs = &form.apply(&u, &v) + &form.apply(&v, &u);
            let scale = 1.0 + rhs.sup_norm();
            prop_assert!((&lhs - &rhs).sup_norm() <= 1e-12 * scale);
        }
    }
}
