//! Construction of coefficient tensors satisfying both null conditions.
//!
//! Both null forms are linear in `B`. Evaluating them on a fixed sampling of
//! directions and orthogonal pairs gives a constraint matrix whose row space
//! is spanned by symmetric tensors; projecting a symmetric tensor onto the
//! orthogonal complement of that row space therefore keeps it symmetric and
//! annihilates both forms on the samples. Because each form is a polynomial of
//! bounded degree, a sampling that spans the row space enforces the condition
//! everywhere, which the verification pass confirms on a fresh, denser set.

use std::sync::OnceLock;

use nalgebra::DMatrix;

use super::sampler::SpherePairSampler;
use super::tensor::{flat, CoefTensor, TENSOR_LEN};
use crate::error::{Error, Result};

/// Directions used to assemble the constraints.
pub const CONSTRUCTION_DIRECTIONS: usize = 200;
/// Orthogonal pairs used to assemble the constraints.
pub const CONSTRUCTION_PAIRS: usize = 400;
/// Accepted null-form deficit on the verification sampler.
pub const NULL_TOLERANCE: f64 = 1e-10;

fn outer6(v: [&[f64; 3]; 6]) -> Vec<f64> {
    let mut row = vec![0.0; TENSOR_LEN];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                for l in 0..3 {
                    for m in 0..3 {
                        for n in 0..3 {
                            row[flat(i, j, k, l, m, n)] =
                                v[0][i] * v[1][j] * v[2][k] * v[3][l] * v[4][m] * v[5][n];
                        }
                    }
                }
            }
        }
    }
    row
}

/// Rows evaluating the radial and transverse forms at every sample.
pub fn constraint_matrix(sampler: &SpherePairSampler) -> DMatrix<f64> {
    let rows: Vec<Vec<f64>> = sampler
        .directions()
        .iter()
        .map(|w| outer6([w; 6]))
        .chain(
            sampler
                .pairs()
                .iter()
                .map(|(e, w)| outer6([e, e, e, w, w, w])),
        )
        .collect();
    DMatrix::from_fn(rows.len(), TENSOR_LEN, |r, c| rows[r][c])
}

/// Orthonormal basis of the constraint row space (one vector per retained singular value).
#[derive(Debug, Clone)]
pub struct ConstraintBasis {
    vectors: Vec<Vec<f64>>,
}

impl ConstraintBasis {
    pub fn new(sampler: &SpherePairSampler) -> Self {
        let c = constraint_matrix(sampler);
        let svd = c.svd(false, true);
        let v_t = svd.v_t.expect("right singular vectors requested");
        let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
        let vectors = svd
            .singular_values
            .iter()
            .enumerate()
            .filter(|(_, &s)| s > 1e-10 * smax)
            .map(|(r, _)| v_t.row(r).iter().copied().collect())
            .collect();
        ConstraintBasis { vectors }
    }

    /// Basis for the default construction sampler, computed once.
    pub fn default_construction() -> &'static ConstraintBasis {
        static BASIS: OnceLock<ConstraintBasis> = OnceLock::new();
        BASIS.get_or_init(|| {
            ConstraintBasis::new(&SpherePairSampler::fibonacci(
                CONSTRUCTION_DIRECTIONS,
                CONSTRUCTION_PAIRS,
            ))
        })
    }

    pub fn rank(&self) -> usize {
        self.vectors.len()
    }

    /// Orthogonal projection onto the complement of the constraint rows.
    pub fn project(&self, b: &CoefTensor) -> CoefTensor {
        let mut x = b.entries().to_vec();
        // two sweeps of modified Gram-Schmidt style removal
        for _ in 0..2 {
            for v in &self.vectors {
                let d: f64 = v.iter().zip(&x).map(|(a, b)| a * b).sum();
                for (xi, vi) in x.iter_mut().zip(v) {
                    *xi -= d * vi;
                }
            }
        }
        CoefTensor::from_entries(x).expect("projection keeps 729 finite entries")
    }
}

/// Sampler used to verify constructed tensors: independent of the construction
/// samples and ten times denser.
pub fn verification_sampler(seed: u64) -> SpherePairSampler {
    SpherePairSampler::random(
        seed ^ 0x9e37_79b9_7f4a_7c15,
        10 * CONSTRUCTION_DIRECTIONS,
        10 * CONSTRUCTION_PAIRS,
    )
}

/// Projects `b` (symmetrized first) onto the null-form kernel and verifies it.
pub fn make_null_tensor_from(b: &CoefTensor, verify_seed: u64) -> Result<CoefTensor> {
    let basis = ConstraintBasis::default_construction();
    let projected = basis.project(&b.symmetrize()).symmetrize();
    let check = verification_sampler(verify_seed);
    let radial = projected.radial_null_deficit(&check);
    let transverse = projected.transverse_null_deficit(&check);
    if radial > NULL_TOLERANCE || transverse > NULL_TOLERANCE {
        return Err(Error::NullVerification { radial, transverse });
    }
    Ok(projected)
}

/// A random symmetric tensor satisfying both null conditions.
pub fn make_null_tensor(seed: u64) -> Result<CoefTensor> {
    make_null_tensor_from(&CoefTensor::random(seed), seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_tensor_passes_fresh_sampler() {
        let b = make_null_tensor(7).unwrap();
        assert_eq!(b.symmetry_deficit(), 0.0);
        let fresh = SpherePairSampler::random(12345, 2000, 4000);
        assert!(b.radial_null_deficit(&fresh) <= 1e-10);
        assert!(b.transverse_null_deficit(&fresh) <= 1e-10);
        assert!(b.frobenius_norm() > 1.0, "projection should not annihilate a generic tensor");
    }

    #[test]
    fn construction_is_deterministic() {
        assert_eq!(make_null_tensor(3).unwrap(), make_null_tensor(3).unwrap());
    }

    #[test]
    fn zero_tensor_is_null() {
        let z = make_null_tensor_from(&CoefTensor::zeros(), 1).unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn generic_symmetric_tensor_is_not_null() {
        let b = CoefTensor::random(7).symmetrize();
        let s = SpherePairSampler::fibonacci(50, 50);
        assert!(b.radial_null_deficit(&s) > 1e-3);
        assert!(b.transverse_null_deficit(&s) > 1e-3);
    }

    #[test]
    fn constraint_rank_is_sampling_independent() {
        let a = ConstraintBasis::default_construction().rank();
        let b = ConstraintBasis::new(&SpherePairSampler::random(99, 300, 500)).rank();
        assert_eq!(a, b);
        assert!(a < TENSOR_LEN);
    }

    #[test]
    fn isotropic_null_tensor_stays_isotropic() {
        let mut c = [0.0; 15];
        for (n, v) in c.iter_mut().enumerate() {
            *v = 1.0 + (n as f64).cos();
        }
        let iso = CoefTensor::isotropic(&c).symmetrize();
        let b = make_null_tensor_from(&iso, 5).unwrap();
        // rotation about x1 by 0.4 rad leaves every contraction unchanged
        let t = 0.4_f64;
        let rot = |v: [f64; 3]| [v[0], t.cos() * v[1] - t.sin() * v[2], t.sin() * v[1] + t.cos() * v[2]];
        let vs = [
            [0.3, -0.4, 0.5],
            [1.0, 0.2, -0.1],
            [0.0, 0.7, 0.7],
            [-0.6, 0.1, 0.9],
            [0.25, 0.25, -0.5],
            [0.8, -0.3, 0.05],
        ];
        let rv = vs.map(rot);
        let a = b.contract([&vs[0], &vs[1], &vs[2], &vs[3], &vs[4], &vs[5]]);
        let r = b.contract([&rv[0], &rv[1], &rv[2], &rv[3], &rv[4], &rv[5]]);
        assert!((a - r).abs() < 1e-12 * (1.0 + a.abs()));
    }
}
