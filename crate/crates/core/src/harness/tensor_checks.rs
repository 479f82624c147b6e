//! Tensor algebra and projection algebra checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ComparisonTable, Criterion, Experiment, ExperimentConfig, Outcome, TensorKind};
use crate::analysis::{project, weight_field, ProjectionKind};
use crate::error::Result;
use crate::grid::{partial, Axis, Grid, Norms, ScalarField, VectorField3};
use crate::material::{CoefTensor, NonlinearForm, SpherePairSampler, CONSTRUCTION_DIRECTIONS, CONSTRUCTION_PAIRS};

/// `B^{ijk}_{lmn} a_i b_j c_k d_l e_m f_n` as six plain loops.
pub fn naive_contract(b: &CoefTensor, v: [&[f64; 3]; 6]) -> f64 {
    let mut acc = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                for l in 0..3 {
                    for m in 0..3 {
                        for n in 0..3 {
                            acc += b.get(i, j, k, l, m, n) * v[0][i] * v[1][j] * v[2][k] * v[3][l] * v[4][m] * v[5][n];
                        }
                    }
                }
            }
        }
    }
    acc
}

fn unit(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 0.1 && n <= 1.0 {
            return v.map(|x| x / n);
        }
    }
}

fn gaussian_field(grid: Grid, rng: &mut ChaCha8Rng) -> VectorField3 {
    let c: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-0.3..0.3));
    let a: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
    VectorField3::from_fn(grid, |x| {
        let d2: f64 = (0..3).map(|q| (x[q] - c[q]).powi(2)).sum();
        let g = (-d2).exp();
        [a[0] * g, a[1] * g * (1.0 + x[0]), a[2] * g * x[1]]
    })
}

/// Worst relative gap of `N` and `Ñ` against flux sums written as six loops.
fn field_contraction_gap(b: &CoefTensor, rng: &mut ChaCha8Rng) -> Result<f64> {
    let grid = Grid::new(2.0, 13, 2)?;
    let (u, v, w) = (gaussian_field(grid, rng), gaussian_field(grid, rng), gaussian_field(grid, rng));
    let grads = |f: &VectorField3| -> Vec<VectorField3> {
        Axis::ALL.iter().map(|&a| partial(f, a)).collect()
    };
    let (du, dv, dw) = (grads(&u), grads(&v), grads(&w));
    // d[m] holds ∂_m f, so component j of d[m] is ∂_m f^j
    let at = |d: &[VectorField3], j: usize, m: usize, p: usize| d[m].component_slice(j)[p];
    let len = grid.storage_len();
    let mut naive_n = [vec![0.0; len], vec![0.0; len], vec![0.0; len]];
    let mut naive_t = vec![0.0; len];
    for i in 0..3 {
        let mut div = vec![0.0; len];
        for l in 0..3 {
            let mut flux = ScalarField::zeros(grid);
            let f = flux.as_slice_mut();
            for (p, fp) in f.iter_mut().enumerate() {
                for j in 0..3 {
                    for k in 0..3 {
                        for m in 0..3 {
                            for n in 0..3 {
                                let c = b.get(i, j, k, l, m, n);
                                *fp += c * at(&du, j, m, p) * at(&dv, k, n, p);
                                naive_t[p] += c * at(&du, i, l, p) * at(&dv, j, m, p) * at(&dw, k, n, p);
                            }
                        }
                    }
                }
            }
            let d = partial(&flux, Axis::from_index(l).expect("axis"));
            for (acc, x) in div.iter_mut().zip(d.as_slice()) {
                *acc += x;
            }
        }
        naive_n[i] = div;
    }
    let form = NonlinearForm::new(b);
    let fast_n = form.apply(&u, &v);
    let fast_t = form.apply_tilde(&u, &v, &w);
    let mut scale_n: f64 = 0.0;
    let mut gap_n: f64 = 0.0;
    for (c, naive) in naive_n.iter().enumerate() {
        for (x, y) in fast_n.component_slice(c).iter().zip(naive) {
            scale_n = scale_n.max(y.abs());
            gap_n = gap_n.max((x - y).abs());
        }
    }
    let scale_t = naive_t.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let gap_t = fast_t
        .as_slice()
        .iter()
        .zip(&naive_t)
        .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()));
    Ok((gap_n / scale_n.max(f64::MIN_POSITIVE)).max(gap_t / scale_t.max(f64::MIN_POSITIVE)))
}

/// Symmetry, null deficits on a fresh dense sampler and contraction oracles.
pub struct CheckTensor;

impl Experiment for CheckTensor {
    fn name(&self) -> &'static str {
        "check-tensor"
    }

    fn description(&self) -> &'static str {
        "builds the configured tensor and checks symmetry, null deficits and contractions"
    }

    fn run(&self, cfg: &ExperimentConfig) -> Result<Outcome> {
        let mut out = Outcome::new(self.name(), cfg.seed);
        let b = cfg.build_tensor(cfg.tensor.kind)?;
        let seed = cfg.tensor_seed();
        let raw = CoefTensor::random(seed);
        out.push(Criterion::at_most("symmetrized deficit", raw.symmetrize().symmetry_deficit(), 0.0));
        out.push(Criterion::at_most("tensor symmetry deficit", b.symmetry_deficit(), 0.0));

        let fresh = SpherePairSampler::random(
            seed.wrapping_mul(6_364_136_223_846_793_005).wrapping_add(1),
            10 * CONSTRUCTION_DIRECTIONS,
            10 * CONSTRUCTION_PAIRS,
        );
        let radial = b.radial_null_deficit(&fresh);
        let transverse = b.transverse_null_deficit(&fresh);
        out.metric("radial_null_deficit", radial);
        out.metric("transverse_null_deficit", transverse);
        out.metric("frobenius_norm", b.frobenius_norm());
        if cfg.tensor.kind == TensorKind::Null {
            out.push(Criterion::at_most("radial null deficit", radial, 1e-10));
            out.push(Criterion::at_most("transverse null deficit", transverse, 1e-10));
        }

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut gap: f64 = 0.0;
        for _ in 0..200 {
            let v: [[f64; 3]; 6] = std::array::from_fn(|_| unit(&mut rng));
            let refs = [&v[0], &v[1], &v[2], &v[3], &v[4], &v[5]];
            gap = gap.max((b.contract(refs) - naive_contract(&b, refs)).abs());
            let w = [&v[0]; 6];
            gap = gap.max((b.radial_form(&v[0]) - naive_contract(&b, w)).abs());
            let t = [&v[1], &v[1], &v[1], &v[0], &v[0], &v[0]];
            gap = gap.max((b.transverse_form(&v[1], &v[0]) - naive_contract(&b, t)).abs());
        }
        let scale = b.frobenius_norm().max(f64::MIN_POSITIVE);
        out.push(Criterion::at_most("contraction gap", gap / scale, 1e-13));
        let fields = field_contraction_gap(&b, &mut rng)?;
        out.push(Criterion::at_most("field contraction gap", fields, 1e-13));
        out.tensor = Some(b);
        Ok(out)
    }
}

/// `P_1 + P_2 = I`, idempotence, orthogonality and weight spot values.
pub struct CheckProjections;

impl Experiment for CheckProjections {
    fn name(&self) -> &'static str {
        "check-projections"
    }

    fn description(&self) -> &'static str {
        "checks the radial and transverse projections and the light-cone weights"
    }

    fn run(&self, cfg: &ExperimentConfig) -> Result<Outcome> {
        let mut out = Outcome::new(self.name(), cfg.seed);
        let grid = cfg.grid.build()?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let u = gaussian_field(grid, &mut rng);
        let scale = u.sup_norm();
        let p1 = project(ProjectionKind::Radial, &u);
        let p2 = project(ProjectionKind::Transverse, &u);
        let rel = |f: VectorField3| f.sup_norm() / scale;
        out.push(Criterion::at_most("P1 + P2 - I", rel(&(&p1 + &p2) - &u), 1e-14));
        out.push(Criterion::at_most("P1 P1 - P1", rel(&project(ProjectionKind::Radial, &p1) - &p1), 1e-14));
        out.push(Criterion::at_most(
            "P2 P2 - P2",
            rel(&project(ProjectionKind::Transverse, &p2) - &p2),
            1e-14,
        ));
        out.push(Criterion::at_most("P1 P2", rel(project(ProjectionKind::Radial, &p2)), 1e-14));

        // <c t - r> at the origin and on the cone, against closed forms
        let mut table = ComparisonTable::new("weight spot values", &["label", "t", "computed", "exact"]);
        let h = grid.spacing();
        let c0 = grid.center_index();
        let mut gap: f64 = 0.0;
        for kind in ProjectionKind::ALL {
            let c = kind.speed(&cfg.material);
            let steps = ((grid.half_width() / 2.0) / h).floor() as usize;
            let t = (steps as f64 * h) / c;
            let w = weight_field(kind, t, &grid, &cfg.material);
            let spots = [
                (w.at(c0, c0, c0), (c * t).hypot(1.0)),
                (w.at(c0 + steps, c0, c0), 1.0),
                (w.at(c0, c0, c0 + steps / 2), (c * t - grid.coord(c0 + steps / 2)).hypot(1.0)),
            ];
            for (computed, exact) in spots {
                gap = gap.max((computed - exact).abs() / exact);
                table.push(vec![kind.label() as f64, t, computed, exact]);
            }
        }
        out.push(Criterion::at_most("weight spot gap", gap, 1e-14));
        out.tables.push(table);
        Ok(out)
    }
}
