use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::sampler::SpherePairSampler;
use crate::error::{Error, Result};

/// Number of coefficients `B^{ijk}_{lmn}`.
pub const TENSOR_LEN: usize = 729;

/// Version tag written into tensor JSON files.
pub const TENSOR_SCHEMA_VERSION: u32 = 1;

/// Flat index of `(i, j, k, l, m, n)`, each in `0..3`, in lexicographic order.
#[inline]
pub fn flat(i: usize, j: usize, k: usize, l: usize, m: usize, n: usize) -> usize {
    ((((i * 3 + j) * 3 + k) * 3 + l) * 3 + m) * 3 + n
}

#[inline]
fn unflat(mut p: usize) -> [usize; 6] {
    let mut idx = [0; 6];
    for slot in idx.iter_mut().rev() {
        *slot = p % 3;
        p /= 3;
    }
    idx
}

/// The six ways of relabelling the index pairs `(i,l)`, `(j,m)`, `(k,n)`.
const PAIR_PERMUTATIONS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [1, 0, 2],
    [0, 2, 1],
    [2, 1, 0],
    [1, 2, 0],
    [2, 0, 1],
];

fn permute_pairs(idx: [usize; 6], perm: [usize; 3]) -> [usize; 6] {
    let pairs = [(idx[0], idx[3]), (idx[1], idx[4]), (idx[2], idx[5])];
    let (a, b, c) = (pairs[perm[0]], pairs[perm[1]], pairs[perm[2]]);
    [a.0, b.0, c.0, a.1, b.1, c.1]
}

/// Coefficients of the quadratic nonlinearity
/// `N^i(u, v) = B^{ijk}_{lmn} d_l (d_m u^j d_n v^k)`.
///
/// Indices are 0-based in code; entry `(i, j, k, l, m, n)` is `B^{ijk}_{lmn}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefTensor {
    entries: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct TensorFile {
    schema_version: u32,
    entries: Vec<f64>,
}

impl CoefTensor {
    pub fn zeros() -> Self {
        CoefTensor {
            entries: vec![0.0; TENSOR_LEN],
        }
    }

    pub fn from_entries(entries: Vec<f64>) -> Result<Self> {
        if entries.len() != TENSOR_LEN {
            return Err(Error::InvalidParams(format!(
                "coefficient tensor needs {TENSOR_LEN} entries, got {}",
                entries.len()
            )));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("non-finite tensor entry".into()));
        }
        Ok(CoefTensor { entries })
    }

    /// Entries uniform in `[-1, 1)` drawn from a seeded stream (not symmetrized).
    pub fn random(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        CoefTensor {
            entries: (0..TENSOR_LEN).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        }
    }

    /// A single unit entry at `(i, j, k, l, m, n)`.
    pub fn unit(idx: [usize; 6]) -> Self {
        let mut t = CoefTensor::zeros();
        t.entries[flat(idx[0], idx[1], idx[2], idx[3], idx[4], idx[5])] = 1.0;
        t
    }

    /// Rotation-invariant tensor `sum_p c_p delta delta delta` over the 15 pairings of six slots.
    pub fn isotropic(coeffs: &[f64; 15]) -> Self {
        let pairings = six_slot_pairings();
        let mut t = CoefTensor::zeros();
        for (p, e) in t.entries.iter_mut().enumerate() {
            let idx = unflat(p);
            *e = pairings
                .iter()
                .zip(coeffs)
                .filter(|(pr, _)| pr.iter().all(|&(a, b)| idx[a] == idx[b]))
                .map(|(_, c)| c)
                .sum();
        }
        t
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize, m: usize, n: usize) -> f64 {
        self.entries[flat(i, j, k, l, m, n)]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&v| v == 0.0)
    }

    pub fn scaled(&self, a: f64) -> Self {
        CoefTensor {
            entries: self.entries.iter().map(|v| v * a).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Average over all relabellings of the index pairs `(i,l)`, `(j,m)`, `(k,n)`.
    ///
    /// The two exchange relations generate the full permutation group of the
    /// three pairs, so the average runs over six elements. The result satisfies
    /// both relations bit-exactly.
    pub fn symmetrize(&self) -> Self {
        let mut out = vec![0.0; TENSOR_LEN];
        for (p, slot) in out.iter_mut().enumerate() {
            let idx = unflat(p);
            // summing in sorted order gives every orbit member the same bits
            let mut members = PAIR_PERMUTATIONS.map(|perm| {
                let q = permute_pairs(idx, perm);
                flat(q[0], q[1], q[2], q[3], q[4], q[5])
            });
            members.sort_unstable();
            *slot = members.iter().map(|&q| self.entries[q]).sum::<f64>() / 6.0;
        }
        CoefTensor { entries: out }
    }

    /// Largest violation of `B^{ijk}_{lmn} = B^{jik}_{mln} = B^{ikj}_{lnm}`.
    pub fn symmetry_deficit(&self) -> f64 {
        let mut worst = 0.0_f64;
        for (p, &v) in self.entries.iter().enumerate() {
            let [i, j, k, l, m, n] = unflat(p);
            worst = worst
                .max((v - self.get(j, i, k, m, l, n)).abs())
                .max((v - self.get(i, k, j, l, n, m)).abs());
        }
        worst
    }

    /// `B^{ijk}_{lmn} a_i b_j c_k d_l e_m f_n`.
    pub fn contract(&self, v: [&[f64; 3]; 6]) -> f64 {
        let mut acc = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let w_ij = v[0][i] * v[1][j];
                for k in 0..3 {
                    let w_ijk = w_ij * v[2][k];
                    for l in 0..3 {
                        for m in 0..3 {
                            let w_lm = v[3][l] * v[4][m];
                            let base = flat(i, j, k, l, m, 0);
                            acc += w_ijk
                                * w_lm
                                * (self.entries[base] * v[5][0]
                                    + self.entries[base + 1] * v[5][1]
                                    + self.entries[base + 2] * v[5][2]);
                        }
                    }
                }
            }
        }
        acc
    }

    /// `B omega^6`.
    pub fn radial_form(&self, omega: &[f64; 3]) -> f64 {
        self.contract([omega; 6])
    }

    /// `B eta_i eta_j eta_k omega_l omega_m omega_n`.
    pub fn transverse_form(&self, eta: &[f64; 3], omega: &[f64; 3]) -> f64 {
        self.contract([eta, eta, eta, omega, omega, omega])
    }

    /// Max over sampled directions of `|B omega^6|`.
    pub fn radial_null_deficit(&self, sampler: &SpherePairSampler) -> f64 {
        sampler
            .directions()
            .iter()
            .map(|w| self.radial_form(w).abs())
            .fold(0.0, f64::max)
    }

    /// Max over sampled orthogonal pairs of `|B eta^3 omega^3|`.
    pub fn transverse_null_deficit(&self, sampler: &SpherePairSampler) -> f64 {
        sampler
            .pairs()
            .iter()
            .map(|(e, w)| self.transverse_form(e, w).abs())
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&TensorFile {
            schema_version: TENSOR_SCHEMA_VERSION,
            entries: self.entries.clone(),
        })?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: TensorFile = serde_json::from_str(s)?;
        if file.schema_version != TENSOR_SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported tensor schema version {}",
                file.schema_version
            )));
        }
        CoefTensor::from_entries(file.entries)
    }
}

/// The 15 perfect matchings of six index slots.
fn six_slot_pairings() -> Vec<[(usize, usize); 3]> {
    let mut out = Vec::with_capacity(15);
    for b in 1..6 {
        let rest: Vec<usize> = (1..6).filter(|&x| x != b).collect();
        for c in 1..4 {
            let d: Vec<usize> = rest[1..].iter().copied().filter(|&x| x != rest[c]).collect();
            out.push([(0, b), (rest[0], rest[c]), (d[0], d[1])]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Orbit of an index under pair relabelling, enumerated by brute force.
    fn orbit(idx: [usize; 6]) -> Vec<[usize; 6]> {
        let mut seen = vec![idx];
        loop {
            let mut grew = false;
            for s in seen.clone() {
                let [i, j, k, l, m, n] = s;
                for t in [[j, i, k, m, l, n], [i, k, j, l, n, m]] {
                    if !seen.contains(&t) {
                        seen.push(t);
                        grew = true;
                    }
                }
            }
            if !grew {
                return seen;
            }
        }
    }

    #[test]
    fn pairings_are_distinct_matchings() {
        let p = six_slot_pairings();
        assert_eq!(p.len(), 15);
        for m in &p {
            let mut slots: Vec<usize> = m.iter().flat_map(|&(a, b)| [a, b]).collect();
            slots.sort();
            assert_eq!(slots, vec![0, 1, 2, 3, 4, 5]);
        }
        for a in 0..15 {
            for b in a + 1..15 {
                assert_ne!(p[a], p[b]);
            }
        }
    }

    #[test]
    fn symmetric_tensor_is_fixed_point() {
        let b = CoefTensor::random(3).symmetrize();
        assert_eq!(b.symmetry_deficit(), 0.0);
        let bb = b.symmetrize();
        let diff = b
            .entries()
            .iter()
            .zip(bb.entries())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        assert!(diff < 1e-15);
    }

    #[test]
    fn unit_entry_spreads_over_its_orbit() {
        for idx in [[0, 0, 0, 1, 1, 1], [0, 1, 2, 0, 0, 0], [0, 0, 1, 2, 2, 0]] {
            let orb = orbit(idx);
            let s = CoefTensor::unit(idx).symmetrize();
            for p in 0..TENSOR_LEN {
                let q = unflat(p);
                let expected = if orb.contains(&q) {
                    1.0 / orb.len() as f64
                } else {
                    0.0
                };
                assert!((s.entries()[p] - expected).abs() < 1e-15, "{q:?}");
            }
        }
    }

    #[test]
    fn unit_entry_deficits() {
        // B^{111}_{222}: all three pairs equal (1,2), so the entry is its own orbit
        assert_eq!(CoefTensor::unit([0, 0, 0, 1, 1, 1]).symmetry_deficit(), 0.0);
        // B^{123}_{111}: three distinct pairs, the relations map it to empty slots
        assert_eq!(CoefTensor::unit([0, 1, 2, 0, 0, 0]).symmetry_deficit(), 1.0);
    }

    #[test]
    fn deficit_matches_enumeration() {
        let b = CoefTensor::random(11);
        let mut worst = 0.0_f64;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        for m in 0..3 {
                            for n in 0..3 {
                                let v = b.get(i, j, k, l, m, n);
                                worst = worst.max((v - b.get(j, i, k, m, l, n)).abs());
                                worst = worst.max((v - b.get(i, k, j, l, n, m)).abs());
                            }
                        }
                    }
                }
            }
        }
        assert_eq!(b.symmetry_deficit(), worst);
    }

    #[test]
    fn contraction_matches_naive_loop() {
        let b = CoefTensor::random(5);
        let vs = [
            [0.3, -0.4, 0.5],
            [1.0, 0.2, -0.1],
            [0.0, 0.7, 0.7],
            [-0.6, 0.1, 0.9],
            [0.25, 0.25, -0.5],
            [0.8, -0.3, 0.05],
        ];
        let mut naive = 0.0;
        for p in 0..TENSOR_LEN {
            let q = unflat(p);
            naive += b.entries()[p]
                * vs[0][q[0]]
                * vs[1][q[1]]
                * vs[2][q[2]]
                * vs[3][q[3]]
                * vs[4][q[4]]
                * vs[5][q[5]];
        }
        let fast = b.contract([&vs[0], &vs[1], &vs[2], &vs[3], &vs[4], &vs[5]]);
        assert!((naive - fast).abs() < 1e-13);
    }

    #[test]
    fn all_ones_index_has_radial_value_one() {
        let b = CoefTensor::unit([0; 6]).symmetrize();
        let s = SpherePairSampler::from_lists(vec![[1.0, 0.0, 0.0]], vec![]);
        assert!(b.radial_null_deficit(&s) >= 1.0);
    }

    #[test]
    fn transverse_value_of_unit_orbit() {
        let b = CoefTensor::unit([0, 0, 0, 1, 1, 1]).symmetrize();
        let s = SpherePairSampler::from_lists(vec![], vec![([1.0, 0.0, 0.0], [0.0, 1.0, 0.0])]);
        assert!((b.transverse_null_deficit(&s) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_tensor_has_no_deficits() {
        let s = SpherePairSampler::fibonacci(50, 50);
        let z = CoefTensor::zeros();
        assert_eq!(z.radial_null_deficit(&s), 0.0);
        assert_eq!(z.transverse_null_deficit(&s), 0.0);
        assert_eq!(z.symmetry_deficit(), 0.0);
    }

    #[test]
    fn isotropic_tensor_is_rotation_invariant() {
        let mut c = [0.0; 15];
        for (n, v) in c.iter_mut().enumerate() {
            *v = (n as f64 * 0.37).sin();
        }
        let b = CoefTensor::isotropic(&c);
        // rotation by angle t about the x3 axis
        let t = 0.7_f64;
        let r = [[t.cos(), -t.sin(), 0.0], [t.sin(), t.cos(), 0.0], [0.0, 0.0, 1.0]];
        let vs = [
            [0.3, -0.4, 0.5],
            [1.0, 0.2, -0.1],
            [0.0, 0.7, 0.7],
            [-0.6, 0.1, 0.9],
            [0.25, 0.25, -0.5],
            [0.8, -0.3, 0.05],
        ];
        let rot = |v: &[f64; 3]| {
            let mut o = [0.0; 3];
            for a in 0..3 {
                o[a] = (0..3).map(|c| r[a][c] * v[c]).sum();
            }
            o
        };
        let rv: Vec<[f64; 3]> = vs.iter().map(rot).collect();
        let a = b.contract([&vs[0], &vs[1], &vs[2], &vs[3], &vs[4], &vs[5]]);
        let bb = b.contract([&rv[0], &rv[1], &rv[2], &rv[3], &rv[4], &rv[5]]);
        assert!((a - bb).abs() < 1e-13);
    }

    #[test]
    fn json_round_trip_and_schema() {
        let b = CoefTensor::random(9);
        let back = CoefTensor::from_json(&b.to_json().unwrap()).unwrap();
        assert_eq!(b, back);
        let bad = r#"{"schema_version": 7, "entries": []}"#;
        assert!(CoefTensor::from_json(bad).is_err());
        let short = r#"{"schema_version": 1, "entries": [1.0]}"#;
        assert!(CoefTensor::from_json(short).is_err());
    }

    proptest! {
        #[test]
        fn deficits_are_homogeneous(seed in 0u64..1000, c in -5.0f64..5.0) {
            let s = SpherePairSampler::fibonacci(40, 40);
            let b = CoefTensor::random(seed).symmetrize();
            let cb = b.scaled(c);
            let r = b.radial_null_deficit(&s);
            let t = b.transverse_null_deficit(&s);
            prop_assert!((cb.radial_null_deficit(&s) - c.abs() * r).abs() <= 1e-12 * (1.0 + r));
            prop_assert!((cb.transverse_null_deficit(&s) - c.abs() * t).abs() <= 1e-12 * (1.0 + t));
        }

        #[test]
        fn symmetrize_is_idempotent(seed in 0u64..1000) {
            let s = CoefTensor::random(seed).symmetrize();
            prop_assert_eq!(s.symmetry_deficit(), 0.0);
            let ss = s.symmetrize();
            for (a, b) in s.entries().iter().zip(ss.entries()) {
                prop_assert!((a - b).abs() <= 1e-15);
            }
        }
    }
}
