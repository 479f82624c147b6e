//! Truncated multivariate Taylor polynomials ("jets") in three variables.
//!
//! A [`Jet`] holds the Taylor coefficients of a smooth function around a base
//! point `x0` up to total degree `order`. Arithmetic, composition with `exp` and
//! reciprocals, differentiation and multiplication by coordinates are exact on
//! the retained coefficients, which makes jets an analytic closure for the
//! rotation, scaling and gradient generators: applying `m` first-order
//! operators to a jet of order `K` yields a jet that is exact up to degree
//! `K - m`, and its constant term is the exact derivative value at `x0`.

use std::ops::{Add, Mul, Sub};

use crate::grid::Axis;

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    order: usize,
    valid: usize,
    x0: [f64; 3],
    coeffs: Vec<f64>,
}

impl Jet {
    #[inline]
    fn idx(order: usize, e: [usize; 3]) -> usize {
        let m = order + 1;
        (e[0] * m + e[1]) * m + e[2]
    }

    fn monomials(order: usize) -> impl Iterator<Item = [usize; 3]> {
        (0..=order).flat_map(move |a| {
            (0..=order - a).flat_map(move |b| (0..=order - a - b).map(move |c| [a, b, c]))
        })
    }

    pub fn constant(order: usize, x0: [f64; 3], value: f64) -> Self {
        let m = order + 1;
        let mut coeffs = vec![0.0; m * m * m];
        coeffs[0] = value;
        Jet {
            order,
            valid: order,
            x0,
            coeffs,
        }
    }

    /// The coordinate function `x_axis` expanded at `x0`.
    pub fn coordinate(order: usize, x0: [f64; 3], axis: Axis) -> Self {
        let mut j = Jet::constant(order, x0, x0[axis.index()]);
        if order >= 1 {
            let mut e = [0; 3];
            e[axis.index()] = 1;
            j.coeffs[Self::idx(order, e)] = 1.0;
        }
        j
    }

    /// Function value at the base point.
    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// Highest degree whose coefficients are still exact.
    pub fn valid_order(&self) -> usize {
        self.valid
    }

    pub fn base_point(&self) -> [f64; 3] {
        self.x0
    }

    pub fn coefficient(&self, e: [usize; 3]) -> f64 {
        if e.iter().sum::<usize>() > self.order {
            0.0
        } else {
            self.coeffs[Self::idx(self.order, e)]
        }
    }

    fn zeros_like(&self) -> Self {
        Jet {
            order: self.order,
            valid: self.valid,
            x0: self.x0,
            coeffs: vec![0.0; self.coeffs.len()],
        }
    }

    pub fn scale(&self, a: f64) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|c| *c *= a);
        out
    }

    pub fn add_constant(&self, a: f64) -> Self {
        let mut out = self.clone();
        out.coeffs[0] += a;
        out
    }

    /// Partial derivative along `axis`; loses one degree of validity.
    pub fn derivative(&self, axis: Axis) -> Self {
        let a = axis.index();
        let mut out = self.zeros_like();
        for e in Self::monomials(self.order) {
            let mut up = e;
            up[a] += 1;
            if up.iter().sum::<usize>() <= self.order {
                out.coeffs[Self::idx(self.order, e)] =
                    (up[a] as f64) * self.coeffs[Self::idx(self.order, up)];
            }
        }
        out.valid = self.valid.saturating_sub(1);
        out
    }

    /// Product with the coordinate function `x_axis`.
    pub fn mul_coordinate(&self, axis: Axis) -> Self {
        let a = axis.index();
        let mut out = self.scale(self.x0[a]);
        for e in Self::monomials(self.order) {
            if e[a] == 0 {
                continue;
            }
            let mut down = e;
            down[a] -= 1;
            out.coeffs[Self::idx(self.order, e)] += self.coeffs[Self::idx(self.order, down)];
        }
        out
    }

    /// `exp(self)` by the truncated series of the non-constant part.
    pub fn exp(&self) -> Self {
        let c0 = self.coeffs[0];
        let q = self.add_constant(-c0);
        let mut term = Jet::constant(self.order, self.x0, 1.0);
        let mut acc = term.clone();
        for n in 1..=self.order {
            term = (&term * &q).scale(1.0 / n as f64);
            acc = &acc + &term;
        }
        let mut out = acc.scale(c0.exp());
        out.valid = self.valid;
        out
    }

    /// `1 / self`; the constant term must be nonzero.
    pub fn recip(&self) -> Self {
        let c0 = self.coeffs[0];
        assert!(c0 != 0.0, "reciprocal of a jet vanishing at its base point");
        let q = self.add_constant(-c0).scale(-1.0 / c0);
        let mut term = Jet::constant(self.order, self.x0, 1.0);
        let mut acc = term.clone();
        for _ in 1..=self.order {
            term = &term * &q;
            acc = &acc + &term;
        }
        let mut out = acc.scale(1.0 / c0);
        out.valid = self.valid;
        out
    }

    /// `(x ^ grad)_l` acting on a scalar.
    pub fn rotation(&self, l: Axis) -> Self {
        let (a, b) = match l {
            Axis::X1 => (Axis::X2, Axis::X3),
            Axis::X2 => (Axis::X3, Axis::X1),
            Axis::X3 => (Axis::X1, Axis::X2),
        };
        &self.derivative(b).mul_coordinate(a) - &self.derivative(a).mul_coordinate(b)
    }

    /// `x . grad f`.
    pub fn radial_derivative(&self) -> Self {
        let mut acc = self.derivative(Axis::X1).mul_coordinate(Axis::X1);
        for ax in [Axis::X2, Axis::X3] {
            acc = &acc + &self.derivative(ax).mul_coordinate(ax);
        }
        acc
    }
}

/// A letter of the time-independent family `Λ = {∇, Ω, r d_r - 1}` acting on scalars.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LambdaLetter {
    Partial(Axis),
    Rotation(Axis),
    Scaling,
}

impl LambdaLetter {
    pub const ALL: [LambdaLetter; 7] = [
        LambdaLetter::Partial(Axis::X1),
        LambdaLetter::Partial(Axis::X2),
        LambdaLetter::Partial(Axis::X3),
        LambdaLetter::Rotation(Axis::X1),
        LambdaLetter::Rotation(Axis::X2),
        LambdaLetter::Rotation(Axis::X3),
        LambdaLetter::Scaling,
    ];
}

/// All words over [`LambdaLetter::ALL`] of length `<= max_len`, shortest first.
pub fn lambda_words(max_len: usize) -> Vec<Vec<LambdaLetter>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|w: &Vec<LambdaLetter>| {
                LambdaLetter::ALL.iter().map(move |&l| {
                    let mut v = w.clone();
                    v.push(l);
                    v
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

impl Jet {
    pub fn apply_lambda(&self, letter: LambdaLetter) -> Jet {
        match letter {
            LambdaLetter::Partial(a) => self.derivative(a),
            LambdaLetter::Rotation(a) => self.rotation(a),
            LambdaLetter::Scaling => &self.radial_derivative() - self,
        }
    }

    /// Applies a word, rightmost letter first.
    pub fn apply_lambda_word(&self, word: &[LambdaLetter]) -> Jet {
        word.iter()
            .rev()
            .fold(self.clone(), |acc, &l| acc.apply_lambda(l))
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        assert_eq!(self.order, rhs.order);
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
        out.valid = self.valid.min(rhs.valid);
        out
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        assert_eq!(self.order, rhs.order);
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
        out.valid = self.valid.min(rhs.valid);
        out
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        assert_eq!(self.order, rhs.order);
        let k = self.order;
        let mut out = self.zeros_like();
        for e1 in Jet::monomials(k) {
            let a = self.coeffs[Jet::idx(k, e1)];
            if a == 0.0 {
                continue;
            }
            let rest = k - e1.iter().sum::<usize>();
            for e2 in Jet::monomials(rest) {
                let b = rhs.coeffs[Jet::idx(k, e2)];
                let e = [e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2]];
                out.coeffs[Jet::idx(k, e)] += a * b;
            }
        }
        out.valid = self.valid.min(rhs.valid);
        out
    }
}

/// Jet of `|x|^2` at `x0`.
pub fn radius_squared(order: usize, x0: [f64; 3]) -> Jet {
    let mut acc = Jet::constant(order, x0, 0.0);
    for ax in Axis::ALL {
        let c = Jet::coordinate(order, x0, ax);
        acc = &acc + &(&c * &c);
    }
    acc
}

/// Jet of the C-infinity bump `exp(1 - 1 / (1 - |x|^2 / R^2))` (zero for `|x| >= R`).
pub fn bump(order: usize, x0: [f64; 3], radius: f64) -> Jet {
    let r2 = x0.iter().map(|v| v * v).sum::<f64>();
    if r2 >= radius * radius {
        return Jet::constant(order, x0, 0.0);
    }
    let s = radius_squared(order, x0).scale(-1.0 / (radius * radius)).add_constant(1.0);
    s.recip().scale(-1.0).add_constant(1.0).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_derivative(f: impl Fn([f64; 3]) -> f64, x: [f64; 3], axis: usize) -> f64 {
        let h = 1e-5;
        let mut p = x;
        let mut m = x;
        p[axis] += h;
        m[axis] -= h;
        (f(p) - f(m)) / (2.0 * h)
    }

    #[test]
    fn polynomial_product_is_exact() {
        let x0 = [0.3, -0.2, 0.7];
        let x = Jet::coordinate(4, x0, Axis::X1);
        let y = Jet::coordinate(4, x0, Axis::X2);
        let p = &(&x * &x) * &y;
        assert!((p.value() - 0.09 * -0.2).abs() < 1e-15);
        // d/dx (x^2 y) = 2 x y
        assert!((p.derivative(Axis::X1).value() - 2.0 * 0.3 * -0.2).abs() < 1e-15);
        // d^2/dx dy = 2x
        let dxy = p.derivative(Axis::X1).derivative(Axis::X2);
        assert!((dxy.value() - 0.6).abs() < 1e-15);
    }

    #[test]
    fn exp_and_recip_match_finite_differences() {
        let x0 = [0.4, 0.1, -0.3];
        let f = |x: [f64; 3]| (1.0 / (2.0 + x[0] * x[1] - x[2])).exp();
        let jx = Jet::coordinate(5, x0, Axis::X1);
        let jy = Jet::coordinate(5, x0, Axis::X2);
        let jz = Jet::coordinate(5, x0, Axis::X3);
        let jf = (&(&jx * &jy) - &jz).add_constant(2.0).recip().exp();
        assert!((jf.value() - f(x0)).abs() < 1e-14);
        for a in 0..3 {
            let d = jf.derivative(Axis::from_index(a).unwrap()).value();
            assert!((d - fd_derivative(f, x0, a)).abs() < 1e-8);
        }
    }

    #[test]
    fn rotation_kills_radial_functions() {
        let j = bump(6, [0.5, -0.3, 0.2], 2.0);
        for l in Axis::ALL {
            let r = j.rotation(l);
            for e in Jet::monomials(r.valid_order()) {
                assert!(r.coefficient(e).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn radial_derivative_of_r_squared() {
        // x . grad |x|^2 = 2 |x|^2
        let x0 = [0.2, 1.1, -0.4];
        let r2 = radius_squared(3, x0);
        let d = r2.radial_derivative();
        assert!((d.value() - 2.0 * r2.value()).abs() < 1e-14);
    }

    #[test]
    fn lambda_word_counts_and_scaling() {
        assert_eq!(lambda_words(0).len(), 1);
        assert_eq!(lambda_words(2).len(), 1 + 7 + 49);
        // (r d_r - 1) |x|^2 = |x|^2
        let x0 = [0.3, 0.4, -1.2];
        let r2 = radius_squared(3, x0);
        let s = r2.apply_lambda(LambdaLetter::Scaling);
        assert!((s.value() - r2.value()).abs() < 1e-14);
        // d_1 then d_1 of |x|^2 gives 2
        let w = [LambdaLetter::Partial(Axis::X1), LambdaLetter::Partial(Axis::X1)];
        assert!((r2.apply_lambda_word(&w).value() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn bump_value_and_support() {
        let j = bump(3, [0.0; 3], 2.0);
        assert!((j.value() - 1.0).abs() < 1e-15);
        assert_eq!(bump(3, [2.5, 0.0, 0.0], 2.0).value(), 0.0);
    }
}
