//! One depth-first sweep over the `Γ` words of a trajectory window produces every
//! energy functional and inequality ratio at the window centre.
//!
//! With words of length `<= K` the sweep yields `E_j`, `Ẽ_j`, `Ê_j` for
//! `j <= K + 1` and `X_j` for `j <= K + 2`. A report of order `k` uses `K = k - 1`.

use std::io::Write;

use serde::Serialize;

use super::{bracket, unit_radial};
use crate::error::{Error, Result};
use crate::grid::kernels::{max_interior, stride, sum_interior_n};
use crate::grid::{apply_elastic, Grid, Norms, VectorField3};
use crate::material::nonlinear::{packed_quadratic, PACKED};
use crate::material::{CoefTensor, DensityField, NonlinearForm};
use crate::solver::MaterialParams;
use crate::vectorfields::{Generator, Trajectory};

/// Column names of the CSV serialization of [`EnergyReport`].
pub const CSV_COLUMNS: [&str; 14] = [
    "t", "E1", "E2", "E3", "X2", "X3", "Etilde3", "Ehat3", "ratio_41", "ratio_42", "ratio_43",
    "ratio_44", "x2_deficit", "dt2_deficit",
];

/// Material data entering the modified energies.
#[derive(Debug, Clone, Copy)]
pub struct ReportContext<'a> {
    pub params: &'a MaterialParams,
    pub form: Option<&'a NonlinearForm>,
    pub density: Option<&'a DensityField>,
}

impl<'a> ReportContext<'a> {
    pub fn linear(params: &'a MaterialParams) -> Self {
        ReportContext {
            params,
            form: None,
            density: None,
        }
    }
}

/// Maxima over nodes and admissible words of LHS / RHS in the pointwise inequalities.
///
/// `r41`: `<r>^{1/2}|Γ^α u|` against `E_k^{1/2}`, `|α| <= k - 2`.
/// `r42`: `<r>|∂Γ^α u|` against `E_k^{1/2}`, `|α| <= k - 3`.
/// `r43`: `<r><c_a t - r>^{1/2}|P_a ∂Γ^α u|` against `E_k^{1/2} + X_k`, `|α| <= k - 3`.
/// `r44`: `<r><c_a t - r>|P_a ∂∇Γ^α u|` against `X_{k+1}`, `|α| <= k - 3`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct SobolevRatios {
    pub r41: Option<f64>,
    pub r42: Option<f64>,
    pub r43: Option<f64>,
    pub r44: Option<f64>,
}

impl SobolevRatios {
    pub fn values(&self) -> [Option<f64>; 4] {
        [self.r41, self.r42, self.r43, self.r44]
    }
}

/// All functionals at one time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyReport {
    pub t: f64,
    pub k: usize,
    /// `E_1, ..., E_k`.
    pub energy: Vec<f64>,
    /// `X_2, ..., X_{k+1}`.
    pub weighted: Vec<f64>,
    /// `Ẽ_1, ..., Ẽ_k`.
    pub energy_tilde: Vec<f64>,
    /// `Ê_1, ..., Ê_k`.
    pub energy_hat: Vec<f64>,
    pub ratios: SobolevRatios,
    /// `X_2 / (E_2^{1/2} + t ||Lu||)`.
    pub x2_deficit: Option<f64>,
    /// `sum_{|α| <= k-2} ||<c_a t - r> P_a ∂_t^2 Γ^α u|| / E_k^{1/2}`.
    pub dt2_deficit: Option<f64>,
    /// `||∇u||_∞`.
    pub grad_sup: f64,
    /// `||u||_∞`.
    pub sup: f64,
}

impl EnergyReport {
    pub fn e(&self, j: usize) -> Option<f64> {
        j.checked_sub(1).and_then(|i| self.energy.get(i)).copied()
    }

    pub fn x(&self, j: usize) -> Option<f64> {
        j.checked_sub(2).and_then(|i| self.weighted.get(i)).copied()
    }

    pub fn e_tilde(&self, j: usize) -> Option<f64> {
        j.checked_sub(1).and_then(|i| self.energy_tilde.get(i)).copied()
    }

    pub fn e_hat(&self, j: usize) -> Option<f64> {
        j.checked_sub(1).and_then(|i| self.energy_hat.get(i)).copied()
    }

    /// `Ê_k / E_k` at the report order, 1 for a zero state.
    pub fn hat_equivalence(&self) -> f64 {
        match (self.e_hat(self.k), self.e(self.k)) {
            (Some(h), Some(e)) if e > 0.0 => h / e,
            _ => 1.0,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.energy
            .iter()
            .chain(&self.weighted)
            .chain(&self.energy_tilde)
            .chain(&self.energy_hat)
            .all(|v| v.is_finite())
    }

    fn csv_row(&self) -> CsvRow {
        CsvRow {
            t: self.t,
            e1: self.e(1),
            e2: self.e(2),
            e3: self.e(3),
            x2: self.x(2),
            x3: self.x(3),
            etilde3: self.e_tilde(3),
            ehat3: self.e_hat(3),
            ratio_41: self.ratios.r41,
            ratio_42: self.ratios.r42,
            ratio_43: self.ratios.r43,
            ratio_44: self.ratios.r44,
            x2_deficit: self.x2_deficit,
            dt2_deficit: self.dt2_deficit,
        }
    }
}

#[derive(Serialize)]
struct CsvRow {
    t: f64,
    #[serde(rename = "E1")]
    e1: Option<f64>,
    #[serde(rename = "E2")]
    e2: Option<f64>,
    #[serde(rename = "E3")]
    e3: Option<f64>,
    #[serde(rename = "X2")]
    x2: Option<f64>,
    #[serde(rename = "X3")]
    x3: Option<f64>,
    #[serde(rename = "Etilde3")]
    etilde3: Option<f64>,
    #[serde(rename = "Ehat3")]
    ehat3: Option<f64>,
    ratio_41: Option<f64>,
    ratio_42: Option<f64>,
    ratio_43: Option<f64>,
    ratio_44: Option<f64>,
    x2_deficit: Option<f64>,
    dt2_deficit: Option<f64>,
}

/// Writes reports as CSV; unavailable values are left empty.
pub fn write_reports_csv<W: Write>(reports: &[EnergyReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if reports.is_empty() {
        w.write_record(CSV_COLUMNS)?;
    }
    for r in reports {
        w.serialize(r.csv_row())?;
    }
    w.flush()?;
    Ok(())
}

/// `num / den` with `0 / 0 = 0`.
fn ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Which pieces of the sweep to evaluate.
#[derive(Clone, Copy)]
struct Needs {
    weighted: bool,
    pointwise: bool,
}

/// Node-wise data shared by every word.
struct Geometry {
    /// Trapezoid weight times `h^3`.
    quad: Vec<f64>,
    /// `x / r`, zero near the origin.
    unit: [Vec<f64>; 3],
    /// `<r>`.
    bracket_r: Vec<f64>,
    /// `<c_a t - r>` for `a = 1, 2`.
    cone: [Vec<f64>; 2],
}

impl Geometry {
    fn new(grid: &Grid, t: f64, params: &MaterialParams) -> Self {
        let n = grid.storage_len();
        let h = grid.spacing();
        let vol = h * h * h;
        let mut g = Geometry {
            quad: vec![0.0; n],
            unit: [vec![0.0; n], vec![0.0; n], vec![0.0; n]],
            bracket_r: vec![0.0; n],
            cone: [vec![0.0; n], vec![0.0; n]],
        };
        let m = grid.padded();
        for i in grid.interior() {
            for j in grid.interior() {
                for k in grid.interior() {
                    let p = (i * m + j) * m + k;
                    let x = grid.position(i, j, k);
                    let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
                    g.quad[p] = vol
                        * grid.trapezoid_weight(i)
                        * grid.trapezoid_weight(j)
                        * grid.trapezoid_weight(k);
                    let e = unit_radial(x, h);
                    for c in 0..3 {
                        g.unit[c][p] = e[c];
                    }
                    g.bracket_r[p] = bracket(r);
                    g.cone[0][p] = bracket(params.c1 * t - r);
                    g.cone[1][p] = bracket(params.c2 * t - r);
                }
            }
        }
        g
    }

    /// `(|P_1 v|^2, |P_2 v|^2)` at node `p`.
    #[inline]
    fn split(&self, v: [f64; 3], p: usize) -> (f64, f64) {
        let radial = self.unit[0][p] * v[0] + self.unit[1][p] * v[1] + self.unit[2][p] * v[2];
        let total = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        let r2 = radial * radial;
        (r2, (total - r2).max(0.0))
    }

    #[inline]
    fn at_origin(&self, p: usize) -> bool {
        self.unit.iter().all(|e| e[p] == 0.0)
    }
}

/// Running totals of the sweep, indexed by word length.
struct Totals {
    energy: Vec<f64>,
    tilde: Vec<f64>,
    hat: Vec<f64>,
    weighted: Vec<f64>,
    dtt: f64,
    sup41: f64,
    sup42: f64,
    sup43: f64,
    sup44: f64,
    x2_residual: f64,
    grad_sup: f64,
    sup: f64,
}

struct Sweep<'a> {
    grid: Grid,
    depth: usize,
    needs: Needs,
    ctx: ReportContext<'a>,
    geo: Geometry,
    /// `Ñ(·, ·, u)` coefficients at every node.
    contraction: Option<Vec<f64>>,
    totals: Totals,
    t: f64,
}

impl<'a> Sweep<'a> {
    fn visit(&mut self, win: &Trajectory, len: usize) -> Result<()> {
        self.contribute(win, len)?;
        if len == self.depth {
            return Ok(());
        }
        let r = self.depth - len;
        for g in Generator::ALL {
            let child = crate::vectorfields::apply_generator_window(g, win, r)?;
            self.visit(&child, len + 1)?;
        }
        Ok(())
    }

    fn contribute(&mut self, win: &Trajectory, len: usize) -> Result<()> {
        let grid = self.grid;
        let params = *self.ctx.params;
        let (c1sq, c2sq) = (params.c1 * params.c1, params.c2 * params.c2);
        let k = self.depth + 1;
        let st = Stencil::new(win);
        let geo = &self.geo;
        let rho = self.ctx.density.filter(|d| !d.is_uniform()).map(|d| d.rho_tilde().as_slice());
        let contraction = self.contraction.as_deref();
        let weighted = self.needs.weighted;
        let with_dtt = weighted && len + 2 <= k;

        let sums = sum_interior_n::<23, _>(&grid, |p, _, _, _| {
            let mut out = [0.0; 23];
            let q = geo.quad[p];
            let vt = norm_sq(st.dt(p));
            let dv = st.jac(p);
            let grad: f64 = dv.iter().map(|d| d * d).sum();
            let div = dv[0] + dv[4] + dv[8];
            out[0] = q * 0.5 * (vt + c2sq * grad + (c1sq - c2sq) * div * div);
            if let Some(c) = contraction {
                out[1] = q * packed_quadratic(&c[PACKED * p..PACKED * (p + 1)], &dv);
            }
            if let Some(r) = rho {
                out[2] = q * r[p] * vt;
            }
            if weighted {
                let (w1, w2) = (geo.cone[0][p], geo.cone[1][p]);
                let (w1, w2) = (q * w1 * w1, q * w2 * w2);
                for (n, v) in st.second(p).iter().enumerate() {
                    let (a, b) = geo.split(*v, p);
                    out[3 + 2 * n] = w1 * a;
                    out[4 + 2 * n] = w2 * b;
                }
                if with_dtt {
                    let (a, b) = geo.split(st.dtt(p), p);
                    out[21] = w1 * a;
                    out[22] = w2 * b;
                }
            }
            out
        });
        let (e, cubic, kinetic) = (sums[0], sums[1], sums[2]);
        for j in len..self.totals.energy.len() {
            self.totals.energy[j] += e;
            self.totals.tilde[j] += e + cubic;
            self.totals.hat[j] += e + cubic + kinetic;
        }

        if len == 0 {
            let g2 = max_interior(&grid, |p, _, _, _| st.jac(p).iter().map(|d| d * d).sum());
            self.totals.grad_sup = g2.sqrt();
            self.totals.sup = win.center().sup_norm();
        }
        // r41 admits |α| <= k - 2, r42 and r43 admit |α| <= k - 3
        if self.needs.pointwise && len + 2 <= k {
            let s = max_interior(&grid, |p, _, _, _| {
                geo.bracket_r[p].sqrt() * norm_sq(st.value(p)).sqrt()
            });
            self.totals.sup41 = self.totals.sup41.max(s);
        }
        let first_order_sups = self.needs.pointwise && len + 3 <= k;
        if first_order_sups {
            let [s42, s43] = max_pair(&grid, |p| {
                let dt = st.dt(p);
                let dv = st.jac(p);
                let mut full = 0.0;
                let (mut p1, mut p2) = (0.0, 0.0);
                for beta in 0..4 {
                    let v = if beta == 0 {
                        dt
                    } else {
                        let l = beta - 1;
                        [dv[l], dv[3 + l], dv[6 + l]]
                    };
                    full += norm_sq(v);
                    let (a, b) = geo.split(v, p);
                    p1 += a;
                    p2 += b;
                }
                let br = geo.bracket_r[p];
                let proj = if geo.at_origin(p) {
                    0.0
                } else {
                    (geo.cone[0][p].sqrt() * p1.sqrt()).max(geo.cone[1][p].sqrt() * p2.sqrt())
                };
                [br * full.sqrt(), br * proj]
            });
            self.totals.sup42 = self.totals.sup42.max(s42);
            self.totals.sup43 = self.totals.sup43.max(s43);
        }

        if !weighted {
            return Ok(());
        }
        let x_sum: f64 = (0..9)
            .map(|n| SECOND_MULT[n] * (sums[3 + 2 * n].sqrt() + sums[4 + 2 * n].sqrt()))
            .sum();
        for j in len..self.totals.weighted.len() {
            self.totals.weighted[j] += x_sum;
        }
        if first_order_sups {
            let s = max_interior(&grid, |p, _, _, _| {
                if geo.at_origin(p) {
                    return 0.0;
                }
                let (mut s1, mut s2) = (0.0, 0.0);
                for (n, v) in st.second(p).iter().enumerate() {
                    let (a, b) = geo.split(*v, p);
                    s1 += SECOND_MULT[n] * a;
                    s2 += SECOND_MULT[n] * b;
                }
                let a = geo.cone[0][p] * s1.sqrt();
                let b = geo.cone[1][p] * s2.sqrt();
                geo.bracket_r[p] * a.max(b)
            });
            self.totals.sup44 = self.totals.sup44.max(s);
        }
        if with_dtt {
            self.totals.dtt += sums[21].sqrt() + sums[22].sqrt();
            if len == 0 {
                let mut lu = win.second_time_derivative(0)?;
                lu.axpy(-1.0, &apply_elastic(win.center(), c1sq, c2sq));
                self.totals.x2_residual = self.t * lu.l2_norm();
            }
        }
        Ok(())
    }
}

/// Multiplicity of each second derivative in `sum_{β, l}`; mixed spatial pairs occur twice.
const SECOND_MULT: [f64; 9] = [1.0, 1.0, 1.0, 1.0, 2.0, 1.0, 2.0, 2.0, 1.0];

#[inline]
fn norm_sq(v: [f64; 3]) -> f64 {
    v[0] * v[0] + v[1] * v[1] + v[2] * v[2]
}

/// Centered differences evaluated on the fly from the three central levels of a window.
///
/// Second derivatives compose two centered differences, so they reach two nodes out.
struct Stencil<'w> {
    prev: [&'w [f64]; 3],
    cur: [&'w [f64]; 3],
    next: [&'w [f64]; 3],
    s: [usize; 3],
    inv_h: f64,
    inv_2dt: f64,
    inv_dt2: f64,
}

impl<'w> Stencil<'w> {
    fn new(win: &'w Trajectory) -> Self {
        let grid = win.grid();
        let sl = |f: &'w VectorField3| [f.component_slice(0), f.component_slice(1), f.component_slice(2)];
        Stencil {
            prev: sl(win.level(-1)),
            cur: sl(win.level(0)),
            next: sl(win.level(1)),
            s: [stride(grid, 0), stride(grid, 1), stride(grid, 2)],
            inv_h: 0.5 / grid.spacing(),
            inv_2dt: 0.5 / win.dt(),
            inv_dt2: 1.0 / (win.dt() * win.dt()),
        }
    }

    #[inline]
    fn value(&self, p: usize) -> [f64; 3] {
        [self.cur[0][p], self.cur[1][p], self.cur[2][p]]
    }

    #[inline]
    fn dt(&self, p: usize) -> [f64; 3] {
        std::array::from_fn(|c| (self.next[c][p] - self.prev[c][p]) * self.inv_2dt)
    }

    #[inline]
    fn dtt(&self, p: usize) -> [f64; 3] {
        std::array::from_fn(|c| (self.next[c][p] - 2.0 * self.cur[c][p] + self.prev[c][p]) * self.inv_dt2)
    }

    /// `d[3c + a] = ∂_a u_c`.
    #[inline]
    fn jac(&self, p: usize) -> [f64; 9] {
        std::array::from_fn(|n| {
            let (f, s) = (self.cur[n / 3], self.s[n % 3]);
            (f[p + s] - f[p - s]) * self.inv_h
        })
    }

    /// `∂_t ∂_l` for `l = 1..3`, then `∂_m ∂_l` for `m <= l`.
    #[inline]
    fn second(&self, p: usize) -> [[f64; 3]; 9] {
        let mut out = [[0.0; 3]; 9];
        let mixed = self.inv_2dt * self.inv_h;
        let h2 = self.inv_h * self.inv_h;
        for l in 0..3 {
            let s = self.s[l];
            for c in 0..3 {
                let (a, b) = (self.prev[c], self.next[c]);
                out[l][c] = (b[p + s] - a[p + s] - b[p - s] + a[p - s]) * mixed;
            }
        }
        let mut n = 3;
        for l in 0..3 {
            for m in 0..=l {
                let (sl, sm) = (self.s[l], self.s[m]);
                for c in 0..3 {
                    let f = self.cur[c];
                    out[n][c] = (f[p + sm + sl] - f[p + sm - sl] - f[p - sm + sl] + f[p - sm - sl]) * h2;
                }
                n += 1;
            }
        }
        out
    }
}

fn max_pair<F>(grid: &Grid, f: F) -> [f64; 2]
where
    F: Fn(usize) -> [f64; 2] + Sync,
{
    // two passes keep the deterministic max kernel
    let a = max_interior(grid, |p, _, _, _| f(p)[0]);
    let b = max_interior(grid, |p, _, _, _| f(p)[1]);
    [a, b]
}

fn run_sweep(k: usize, traj: &Trajectory, ctx: ReportContext<'_>, needs: Needs) -> Result<EnergyReport> {
    if k == 0 {
        return Err(Error::UnsupportedOrder {
            k,
            reason: "order must be at least 1",
        });
    }
    if k - 1 > crate::vectorfields::DEFAULT_MAX_WORD_LEN {
        return Err(Error::UnsupportedOrder {
            k,
            reason: "word length exceeds the configured maximum",
        });
    }
    ctx.params.validate()?;
    let grid = *traj.grid();
    if let Some(d) = ctx.density {
        if d.grid() != &grid {
            return Err(Error::GridMismatch);
        }
    }
    let depth = k - 1;
    let root = traj.narrowed(depth + 1)?;
    let t = traj.t_center();
    let contraction = ctx
        .form
        .filter(|f| !f.is_zero())
        .map(|f| f.packed_contraction(root.center()));
    let mut sweep = Sweep {
        grid,
        depth,
        needs,
        ctx,
        geo: Geometry::new(&grid, t, ctx.params),
        contraction,
        totals: Totals {
            energy: vec![0.0; k],
            tilde: vec![0.0; k],
            hat: vec![0.0; k],
            weighted: vec![0.0; if needs.weighted { k } else { 0 }],
            dtt: 0.0,
            sup41: 0.0,
            sup42: 0.0,
            sup43: 0.0,
            sup44: 0.0,
            x2_residual: 0.0,
            grad_sup: 0.0,
            sup: 0.0,
        },
        t,
    };
    sweep.visit(&root, 0)?;
    let tot = sweep.totals;
    let ek = tot.energy[k - 1];
    let root_e = ek.sqrt();
    let xk = tot.weighted.get(k.wrapping_sub(2)).copied();
    let ratios = if needs.pointwise {
        SobolevRatios {
            r41: (k >= 2).then(|| ratio(tot.sup41, root_e)),
            r42: (k >= 3).then(|| ratio(tot.sup42, root_e)),
            r43: (k >= 3).then(|| ratio(tot.sup43, root_e + xk.unwrap_or(0.0))),
            r44: (k >= 3 && needs.weighted).then(|| ratio(tot.sup44, tot.weighted[k - 1])),
        }
    } else {
        SobolevRatios::default()
    };
    let (x2_deficit, dt2_deficit) = if needs.weighted && k >= 2 {
        (
            Some(ratio(tot.weighted[0], tot.energy[1].sqrt() + tot.x2_residual)),
            Some(ratio(tot.dtt, root_e)),
        )
    } else {
        (None, None)
    };
    Ok(EnergyReport {
        t,
        k,
        energy: tot.energy,
        weighted: tot.weighted,
        energy_tilde: tot.tilde,
        energy_hat: tot.hat,
        ratios,
        x2_deficit,
        dt2_deficit,
        grad_sup: tot.grad_sup,
        sup: tot.sup,
    })
}

/// Every functional of order `k` at the window centre; needs a window radius of `k`.
pub fn energy_report(k: usize, traj: &Trajectory, ctx: ReportContext<'_>) -> Result<EnergyReport> {
    run_sweep(
        k,
        traj,
        ctx,
        Needs {
            weighted: true,
            pointwise: true,
        },
    )
}

const ENERGY_ONLY: Needs = Needs {
    weighted: false,
    pointwise: false,
};

/// `E_k` at the window centre.
pub fn energy_e(k: usize, traj: &Trajectory, params: &MaterialParams) -> Result<f64> {
    let r = run_sweep(k, traj, ReportContext::linear(params), ENERGY_ONLY)?;
    Ok(r.energy[k - 1])
}

/// `Ẽ_k` at the window centre.
pub fn energy_e_tilde(k: usize, traj: &Trajectory, b: &CoefTensor, params: &MaterialParams) -> Result<f64> {
    let form = NonlinearForm::new(b);
    let ctx = ReportContext {
        params,
        form: Some(&form),
        density: None,
    };
    Ok(run_sweep(k, traj, ctx, ENERGY_ONLY)?.energy_tilde[k - 1])
}

/// `Ê_k` at the window centre.
pub fn energy_e_hat(
    k: usize,
    traj: &Trajectory,
    b: &CoefTensor,
    rho: &DensityField,
    params: &MaterialParams,
) -> Result<f64> {
    let form = NonlinearForm::new(b);
    let ctx = ReportContext {
        params,
        form: Some(&form),
        density: Some(rho),
    };
    Ok(run_sweep(k, traj, ctx, ENERGY_ONLY)?.energy_hat[k - 1])
}

/// `X_k` at the window centre, `k >= 2`.
pub fn energy_x(k: usize, traj: &Trajectory, params: &MaterialParams) -> Result<f64> {
    if k < 2 {
        return Err(Error::UnsupportedOrder {
            k,
            reason: "the weighted energy needs k >= 2",
        });
    }
    let needs = Needs {
        weighted: true,
        pointwise: false,
    };
    let r = run_sweep(k - 1, traj, ReportContext::linear(params), needs)?;
    Ok(r.weighted[k - 2])
}

/// The pointwise inequality ratios at order `k >= 2`.
pub fn sobolev_ratio_report(k: usize, traj: &Trajectory, params: &MaterialParams) -> Result<SobolevRatios> {
    if k < 2 {
        return Err(Error::UnsupportedOrder {
            k,
            reason: "no word is admissible below k = 2",
        });
    }
    Ok(energy_report(k, traj, ReportContext::linear(params))?.ratios)
}

/// `X_2 / (E_2^{1/2} + t ||Lu||)` with `Lu = ∂_t^2 u - Au`.
pub fn lemma_x2_check(traj: &Trajectory, params: &MaterialParams) -> Result<f64> {
    let needs = Needs {
        weighted: true,
        pointwise: false,
    };
    let r = run_sweep(2, traj, ReportContext::linear(params), needs)?;
    Ok(r.x2_deficit.unwrap_or(0.0))
}

/// Weighted `∂_t^2` sum over `|α| <= k - 2` divided by `E_k^{1/2}`.
pub fn lemma_dt2_check(k: usize, traj: &Trajectory, params: &MaterialParams) -> Result<f64> {
    if k < 2 {
        return Err(Error::UnsupportedOrder {
            k,
            reason: "the second-derivative lemma needs k >= 2",
        });
    }
    let needs = Needs {
        weighted: true,
        pointwise: false,
    };
    let r = run_sweep(k, traj, ReportContext::linear(params), needs)?;
    Ok(r.dt2_deficit.unwrap_or(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{project, weight_field, ProjectionKind};
    use crate::grid::{divergence, partial, Axis};
    use crate::material::apply_n_tilde;
    use crate::vectorfields::{apply_word_window, enumerate_words};

    fn params() -> MaterialParams {
        MaterialParams::default()
    }

    fn wave(amp: f64) -> impl Fn(f64, [f64; 3]) -> [f64; 3] + Sync {
        move |t, x| {
            let y = [x[0] - 0.2, x[1] + 0.1, x[2]];
            let s = (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]) / (2.0 * (1.0 + t));
            let g = amp * (1.0 - s).max(0.0).powi(6);
            [g * (1.0 + t), g * x[0], -0.5 * g * t]
        }
    }

    fn traj(amp: f64, t: f64) -> Trajectory {
        let g = Grid::new(3.0, 17, 2).unwrap();
        Trajectory::from_fn(g, 0.05, t, 3, wave(amp)).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    /// Term-by-term evaluation through the public field operations.
    fn brute_energy(k: usize, tr: &Trajectory, p: &MaterialParams) -> f64 {
        enumerate_words(k)
            .unwrap()
            .iter()
            .map(|w| {
                let win = apply_word_window(w, tr, 1).unwrap();
                let u = win.center();
                let grad: f64 = Axis::ALL.iter().map(|&a| partial(u, a).l2_norm_sq()).sum();
                0.5 * (win.time_derivative(0).unwrap().l2_norm_sq()
                    + p.c2 * p.c2 * grad
                    + (p.c1 * p.c1 - p.c2 * p.c2) * divergence(u).l2_norm_sq())
            })
            .sum()
    }

    fn brute_weighted(k: usize, tr: &Trajectory, p: &MaterialParams) -> f64 {
        let g = *tr.grid();
        let t = tr.t_center();
        let mut total = 0.0;
        for w in enumerate_words(k - 1).unwrap() {
            let win = apply_word_window(&w, tr, 1).unwrap();
            let dt = win.time_derivative(0).unwrap();
            for beta in 0..4 {
                for l in Axis::ALL {
                    let v = if beta == 0 {
                        partial(&dt, l)
                    } else {
                        partial(&partial(win.center(), l), Axis::from_index(beta - 1).unwrap())
                    };
                    for kind in ProjectionKind::ALL {
                        total += project(kind, &v).weighted_l2(&weight_field(kind, t, &g, p));
                    }
                }
            }
        }
        total
    }

    #[test]
    fn zero_state() {
        let tr = traj(0.0, 0.4);
        let r = energy_report(3, &tr, ReportContext::linear(&params())).unwrap();
        assert!(r.energy.iter().chain(&r.weighted).all(|&v| v == 0.0));
        assert_eq!(r.ratios.values(), [Some(0.0); 4]);
        assert_eq!(r.x2_deficit, Some(0.0));
        assert_eq!(r.dt2_deficit, Some(0.0));
        assert_eq!(r.hat_equivalence(), 1.0);
    }

    #[test]
    fn energies_match_term_by_term_sums() {
        let p = params();
        let tr = traj(1.0, 0.4);
        let r = energy_report(3, &tr, ReportContext::linear(&p)).unwrap();
        for k in 1..=3 {
            assert!(rel(r.e(k).unwrap(), brute_energy(k, &tr, &p)) < 1e-12, "E{k}");
        }
        for k in 2..=4 {
            assert!(rel(r.x(k).unwrap(), brute_weighted(k, &tr, &p)) < 1e-12, "X{k}");
        }
        assert!(r.e(1).unwrap() <= r.e(2).unwrap() && r.e(2).unwrap() <= r.e(3).unwrap());
        assert_eq!(r.energy, r.energy_tilde);
        assert_eq!(r.energy, r.energy_hat);
        assert_eq!(energy_e(2, &tr, &p).unwrap(), r.e(2).unwrap());
        assert_eq!(energy_x(3, &tr, &p).unwrap(), r.x(3).unwrap());
    }

    #[test]
    fn weights_at_time_zero_reduce_to_bracket_r() {
        let p = params();
        let tr = traj(1.0, 0.0);
        let g = *tr.grid();
        let br = crate::grid::ScalarField::from_fn(g, |x| bracket((x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()));
        let win = tr.narrowed(1).unwrap();
        let dt = win.time_derivative(0).unwrap();
        let mut total = 0.0;
        for beta in 0..4 {
            for l in Axis::ALL {
                let v = if beta == 0 {
                    partial(&dt, l)
                } else {
                    partial(&partial(win.center(), l), Axis::from_index(beta - 1).unwrap())
                };
                for kind in ProjectionKind::ALL {
                    total += project(kind, &v).weighted_l2(&br);
                }
            }
        }
        assert!(rel(energy_x(2, &tr, &p).unwrap(), total) < 1e-12);
    }

    #[test]
    fn modified_energies_match_direct_integrals() {
        let p = params();
        let tr = traj(0.3, 0.4);
        let g = *tr.grid();
        let b = CoefTensor::random(5).symmetrize();
        let rho = DensityField::new(g, 0.2, 2.5).unwrap();
        let u = tr.center();
        let mut cubic = 0.0;
        let mut kinetic = 0.0;
        for w in enumerate_words(2).unwrap() {
            let win = apply_word_window(&w, &tr, 1).unwrap();
            let n = apply_n_tilde(&b, win.center(), win.center(), u);
            cubic += crate::grid::norms::weighted_sum(&g, |q| n.as_slice()[q]);
            let dt = win.time_derivative(0).unwrap();
            let r = rho.rho_tilde().as_slice();
            kinetic += crate::grid::norms::weighted_sum(&g, |q| r[q] * dt.magnitude_sq(q));
        }
        let e2 = energy_e(2, &tr, &p).unwrap();
        let tilde = energy_e_tilde(2, &tr, &b, &p).unwrap();
        let hat = energy_e_hat(2, &tr, &b, &rho, &p).unwrap();
        assert!(rel(tilde - e2, cubic) < 1e-10);
        assert!(rel(hat - tilde, kinetic) < 1e-10);
        assert!((hat - tilde).abs() <= 2.0 * rho.sup() * e2);
        let zero = CoefTensor::zeros();
        assert_eq!(energy_e_tilde(2, &tr, &zero, &p).unwrap(), e2);
        let flat = DensityField::uniform(g);
        assert_eq!(energy_e_hat(2, &tr, &zero, &flat, &p).unwrap(), e2);
    }

    #[test]
    fn homogeneity_and_scale_invariant_ratios() {
        let p = params();
        let (a, b) = (traj(1.0, 0.4), traj(2.5, 0.4));
        let ra = energy_report(3, &a, ReportContext::linear(&p)).unwrap();
        let rb = energy_report(3, &b, ReportContext::linear(&p)).unwrap();
        for k in 1..=3 {
            assert!(rel(rb.e(k).unwrap(), 6.25 * ra.e(k).unwrap()) < 1e-13);
        }
        for (x, y) in ra.ratios.values().iter().zip(rb.ratios.values()) {
            assert!(rel(x.unwrap(), y.unwrap()) < 1e-12);
        }
        assert!(rel(ra.x2_deficit.unwrap(), rb.x2_deficit.unwrap()) < 1e-12);
        assert!(rel(ra.dt2_deficit.unwrap(), rb.dt2_deficit.unwrap()) < 1e-12);
        assert_eq!(
            lemma_dt2_check(3, &a, &p).unwrap(),
            ra.dt2_deficit.unwrap()
        );
        assert_eq!(sobolev_ratio_report(3, &a, &p).unwrap(), ra.ratios);
    }

    #[test]
    fn pointwise_ratio_matches_direct_maximum() {
        let p = params();
        let tr = traj(1.0, 0.4);
        let g = *tr.grid();
        let r = energy_report(2, &tr, ReportContext::linear(&p)).unwrap();
        let u = tr.center();
        let mut m = 0.0_f64;
        for i in g.interior() {
            for j in g.interior() {
                for k in g.interior() {
                    let x = g.position(i, j, k);
                    let v = u.at(i, j, k);
                    let mag = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                    m = m.max(bracket((x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()).sqrt() * mag);
                }
            }
        }
        assert!(rel(r.ratios.r41.unwrap(), m / r.e(2).unwrap().sqrt()) < 1e-12);
        assert_eq!(r.ratios.r42, None);
        assert_eq!(r.ratios.r44, None);
    }

    #[test]
    fn order_limits_and_window_checks() {
        let p = params();
        let tr = traj(1.0, 0.4);
        assert!(energy_report(4, &tr, ReportContext::linear(&p)).is_err());
        assert!(energy_report(0, &tr, ReportContext::linear(&p)).is_err());
        assert!(energy_x(1, &tr, &p).is_err());
        let short = tr.narrowed(2).unwrap();
        assert!(matches!(
            energy_report(3, &short, ReportContext::linear(&p)),
            Err(Error::WindowTooShort { .. })
        ));
    }

    #[test]
    fn csv_layout() {
        let p = params();
        let r = energy_report(2, &traj(1.0, 0.4), ReportContext::linear(&p)).unwrap();
        let mut buf = Vec::new();
        write_reports_csv(&[r], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_COLUMNS.join(","));
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row.len(), 14);
        assert_eq!(row[3], "");
        assert!(!row[1].is_empty() && !row[4].is_empty());
    }

    #[test]
    fn lemma_x2_on_zero_is_zero() {
        let p = params();
        assert_eq!(lemma_x2_check(&traj(0.0, 0.4), &p).unwrap(), 0.0);
        assert!(lemma_x2_check(&traj(1.0, 0.4), &p).unwrap() > 0.0);
    }
}
