//! Slab-parallel loops over interior nodes.
//!
//! Work is split by the first storage axis. Reductions produce one partial per
//! slab and combine the partials sequentially in slab order, so results are
//! bit-identical for any number of worker threads.

use rayon::prelude::*;

use super::Grid;

/// Writes `f(flat, i, j, k)` into every interior node of `out`; ghosts are left untouched.
pub(crate) fn fill_interior<F>(grid: &Grid, out: &mut [f64], f: F)
where
    F: Fn(usize, usize, usize, usize) -> f64 + Sync,
{
    let m = grid.padded();
    let plane = m * m;
    let range = grid.interior();
    out.par_chunks_mut(plane).enumerate().for_each(|(i, slab)| {
        if !range.contains(&i) {
            return;
        }
        for j in range.clone() {
            let row = j * m;
            for k in range.clone() {
                slab[row + k] = f(i * plane + row + k, i, j, k);
            }
        }
    });
}

/// Deterministic sum of `f(flat, i, j, k)` over interior nodes.
pub(crate) fn sum_interior<F>(grid: &Grid, f: F) -> f64
where
    F: Fn(usize, usize, usize, usize) -> f64 + Sync,
{
    let m = grid.padded();
    let range = grid.interior();
    let partials: Vec<f64> = range
        .clone()
        .into_par_iter()
        .map(|i| {
            let mut acc = 0.0;
            for j in range.clone() {
                let row = (i * m + j) * m;
                for k in range.clone() {
                    acc += f(row + k, i, j, k);
                }
            }
            acc
        })
        .collect();
    partials.iter().sum()
}

/// Deterministic sums of `N` integrands evaluated together at each interior node.
pub(crate) fn sum_interior_n<const N: usize, F>(grid: &Grid, f: F) -> [f64; N]
where
    F: Fn(usize, usize, usize, usize) -> [f64; N] + Sync,
{
    let m = grid.padded();
    let range = grid.interior();
    let partials: Vec<[f64; N]> = range
        .clone()
        .into_par_iter()
        .map(|i| {
            let mut acc = [0.0; N];
            for j in range.clone() {
                let row = (i * m + j) * m;
                for k in range.clone() {
                    let v = f(row + k, i, j, k);
                    for (a, b) in acc.iter_mut().zip(v) {
                        *a += b;
                    }
                }
            }
            acc
        })
        .collect();
    partials.iter().fold([0.0; N], |mut acc, v| {
        for (a, b) in acc.iter_mut().zip(v) {
            *a += b;
        }
        acc
    })
}

/// Maximum of `f(flat, i, j, k)` over interior nodes (0 for an all-zero field).
pub(crate) fn max_interior<F>(grid: &Grid, f: F) -> f64
where
    F: Fn(usize, usize, usize, usize) -> f64 + Sync,
{
    let m = grid.padded();
    let range = grid.interior();
    let partials: Vec<f64> = range
        .clone()
        .into_par_iter()
        .map(|i| {
            let mut acc = 0.0_f64;
            for j in range.clone() {
                let row = (i * m + j) * m;
                for k in range.clone() {
                    let v = f(row + k, i, j, k);
                    // NaN must win so that it can be detected downstream
                    if v > acc || v.is_nan() {
                        acc = v;
                    }
                }
            }
            acc
        })
        .collect();
    partials
        .into_iter()
        .fold(0.0, |a, b| if b > a || b.is_nan() { b } else { a })
}

/// Stride of storage axis `axis` in a flat padded array.
#[inline]
pub(crate) fn stride(grid: &Grid, axis: usize) -> usize {
    let m = grid.padded();
    match axis {
        0 => m * m,
        1 => m,
        _ => 1,
    }
}

/// Centered first difference along `axis`.
pub(crate) fn d1(grid: &Grid, src: &[f64], axis: usize, out: &mut [f64]) {
    let s = stride(grid, axis);
    let inv = 0.5 / grid.spacing();
    fill_interior(grid, out, |p, _, _, _| (src[p + s] - src[p - s]) * inv);
}

/// Compact three-point second difference along `axis`.
pub(crate) fn d2(grid: &Grid, src: &[f64], axis: usize, out: &mut [f64]) {
    let s = stride(grid, axis);
    let inv = 1.0 / (grid.spacing() * grid.spacing());
    fill_interior(grid, out, |p, _, _, _| {
        (src[p + s] - 2.0 * src[p] + src[p - s]) * inv
    });
}

/// Like [`fill_interior`] for `C` interleaved outputs per node (`out[C * flat + c]`).
pub(crate) fn fill_interior_multi<const C: usize, F>(grid: &Grid, out: &mut [f64], f: F)
where
    F: Fn(usize, &mut [f64; C]) + Sync,
{
    let m = grid.padded();
    let plane = m * m;
    let range = grid.interior();
    out.par_chunks_mut(C * plane).enumerate().for_each(|(i, slab)| {
        if !range.contains(&i) {
            return;
        }
        let mut buf = [0.0; C];
        for j in range.clone() {
            let row = j * m;
            for k in range.clone() {
                f(i * plane + row + k, &mut buf);
                slab[C * (row + k)..C * (row + k + 1)].copy_from_slice(&buf);
            }
        }
    });
}

/// The nine centered first differences `d[3 * c + a] = d_a f_c` of a vector field.
pub(crate) fn jacobian(field: &super::VectorField3) -> [Vec<f64>; 9] {
    let grid = field.grid();
    std::array::from_fn(|n| {
        let mut out = vec![0.0; grid.storage_len()];
        d1(grid, field.component_slice(n / 3), n % 3, &mut out);
        out
    })
}
