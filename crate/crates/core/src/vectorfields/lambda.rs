//! The time-independent family `Λ = {∇, Ω̃, r d_r - 1}` on vector fields and the
//! `H^k_Λ` norm of a data pair.

use super::spatial::{rotation, scaling_spatial};
use super::DEFAULT_MAX_WORD_LEN;
use crate::error::{Error, Result};
use crate::grid::{partial, Axis, Norms, VectorField3};
use crate::jet::LambdaLetter;

/// One letter of `Λ` on a vector field; rotations include the matrix part.
pub fn apply_lambda(letter: LambdaLetter, f: &VectorField3) -> VectorField3 {
    match letter {
        LambdaLetter::Partial(a) => partial(f, a),
        LambdaLetter::Rotation(l) => rotation(f, l),
        LambdaLetter::Scaling => scaling_spatial(f),
    }
}

/// A `Λ` word, rightmost letter first.
pub fn apply_lambda_word(word: &[LambdaLetter], f: &VectorField3) -> VectorField3 {
    word.iter()
        .rev()
        .fold(f.clone(), |acc, &l| apply_lambda(l, &acc))
}

fn gradient_norm(f: &VectorField3) -> f64 {
    Axis::ALL
        .iter()
        .map(|&a| partial(f, a).l2_norm_sq())
        .sum::<f64>()
        .sqrt()
}

fn accumulate(f: &VectorField3, g: &VectorField3, depth_left: usize, acc: &mut f64) {
    *acc += f.l2_norm() + gradient_norm(f) + g.l2_norm();
    if depth_left == 0 {
        return;
    }
    for letter in LambdaLetter::ALL {
        accumulate(
            &apply_lambda(letter, f),
            &apply_lambda(letter, g),
            depth_left - 1,
            acc,
        );
    }
}

/// `sum_{|α| <= k-1} (||Λ^α f|| + ||∇Λ^α f|| + ||Λ^α g||)`; zero for `k = 0`.
pub fn h_lambda_norm(f: &VectorField3, g: &VectorField3, k: usize) -> Result<f64> {
    if f.grid() != g.grid() {
        return Err(Error::GridMismatch);
    }
    if k == 0 {
        return Ok(0.0);
    }
    if k - 1 > DEFAULT_MAX_WORD_LEN {
        return Err(Error::UnsupportedOrder {
            k,
            reason: "word length exceeds the configured maximum",
        });
    }
    let mut acc = 0.0;
    accumulate(f, g, k - 1, &mut acc);
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::jet::lambda_words;

    fn bump_pair(g: Grid) -> (VectorField3, VectorField3) {
        let b = |x: [f64; 3]| {
            let s = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / 6.25;
            (1.0 - s).max(0.0).powi(8)
        };
        let f = VectorField3::from_fn(g, |x| {
            let v = b(x);
            [v, 0.5 * v, -0.25 * v]
        });
        let h = VectorField3::from_fn(g, |x| [x[1] * b(x), 0.0, 0.0]);
        (f, h)
    }

    #[test]
    fn zero_pair_and_homogeneity() {
        let g = Grid::new(3.0, 17, 2).unwrap();
        let z = VectorField3::zeros(g);
        assert_eq!(h_lambda_norm(&z, &z, 3).unwrap(), 0.0);
        let (f, h) = bump_pair(g);
        let a = h_lambda_norm(&f, &h, 2).unwrap();
        let b = h_lambda_norm(&f.scaled(2.5), &h.scaled(2.5), 2).unwrap();
        assert!((b - 2.5 * a).abs() < 1e-12 * b);
        assert!(h_lambda_norm(&f, &h, 4).is_err());
    }

    #[test]
    fn dfs_sum_matches_explicit_word_list() {
        let g = Grid::new(3.0, 13, 2).unwrap();
        let (f, h) = bump_pair(g);
        let explicit: f64 = lambda_words(2)
            .iter()
            .map(|w| {
                let lf = apply_lambda_word(w, &f);
                lf.l2_norm() + gradient_norm(&lf) + apply_lambda_word(w, &h).l2_norm()
            })
            .sum();
        let dfs = h_lambda_norm(&f, &h, 3).unwrap();
        assert!((explicit - dfs).abs() < 1e-10 * dfs);
    }

    #[test]
    fn standard_bump_matches_refined_reference() {
        let value = |n: usize| {
            let g = Grid::new(3.0, n, 2).unwrap();
            let (f, h) = bump_pair(g);
            h_lambda_norm(&f, &h, 3).unwrap()
        };
        // second-order convergence, then the extrapolated limit as reference
        let (c, m, f) = (value(25), value(49), value(97));
        let order = ((m - c) / (f - m)).log2();
        assert!((order - 2.0).abs() < 0.3, "order {order}");
        let reference = f + (f - m) / 3.0;
        assert!(((f - reference) / reference).abs() < 0.01, "{f} {reference}");
    }
}
