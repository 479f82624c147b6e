use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Unit directions and orthogonal direction pairs used to test the null forms.
#[derive(Debug, Clone, PartialEq)]
pub struct SpherePairSampler {
    directions: Vec<[f64; 3]>,
    pairs: Vec<([f64; 3], [f64; 3])>,
}

fn normalize(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Unit vector orthogonal to `omega` at angle `theta` in a fixed tangent frame.
fn tangent(omega: &[f64; 3], theta: f64) -> [f64; 3] {
    // least aligned coordinate axis seeds the frame
    let a = omega
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.abs().total_cmp(&y.1.abs()))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let mut seed = [0.0; 3];
    seed[a] = 1.0;
    let e1 = normalize(cross(omega, &seed));
    let e2 = cross(omega, &e1);
    let mut eta = [
        theta.cos() * e1[0] + theta.sin() * e2[0],
        theta.cos() * e1[1] + theta.sin() * e2[1],
        theta.cos() * e1[2] + theta.sin() * e2[2],
    ];
    // one projection step pushes |eta . omega| to rounding level
    let d = dot(&eta, omega);
    for c in 0..3 {
        eta[c] -= d * omega[c];
    }
    normalize(eta)
}

fn fibonacci_point(i: usize, count: usize) -> [f64; 3] {
    let golden = std::f64::consts::PI * (3.0 - 5.0_f64.sqrt());
    let z = 1.0 - (2.0 * i as f64 + 1.0) / count as f64;
    let rho = (1.0 - z * z).max(0.0).sqrt();
    let phi = golden * i as f64;
    normalize([rho * phi.cos(), rho * phi.sin(), z])
}

impl SpherePairSampler {
    pub fn from_lists(directions: Vec<[f64; 3]>, pairs: Vec<([f64; 3], [f64; 3])>) -> Self {
        SpherePairSampler { directions, pairs }
    }

    /// Deterministic Fibonacci-sphere directions; pair directions use a second
    /// Fibonacci set with tangent angles advancing by the golden angle.
    pub fn fibonacci(n_directions: usize, n_pairs: usize) -> Self {
        let directions = (0..n_directions)
            .map(|i| fibonacci_point(i, n_directions))
            .collect();
        let golden = std::f64::consts::PI * (3.0 - 5.0_f64.sqrt());
        let pairs = (0..n_pairs)
            .map(|i| {
                let w = fibonacci_point(i, n_pairs);
                (tangent(&w, golden * (i as f64) * 1.7 + 0.3), w)
            })
            .collect();
        SpherePairSampler { directions, pairs }
    }

    /// Uniformly random directions and pairs from a seeded stream.
    pub fn random(seed: u64, n_directions: usize, n_pairs: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let draw = |rng: &mut ChaCha8Rng| loop {
            let v = [
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            ];
            let n2 = dot(&v, &v);
            if n2 > 1e-4 && n2 <= 1.0 {
                return normalize(v);
            }
        };
        let directions = (0..n_directions).map(|_| draw(&mut rng)).collect();
        let pairs = (0..n_pairs)
            .map(|_| {
                let w = draw(&mut rng);
                let theta = rng.gen_range(0.0..std::f64::consts::TAU);
                (tangent(&w, theta), w)
            })
            .collect();
        SpherePairSampler { directions, pairs }
    }

    pub fn directions(&self) -> &[[f64; 3]] {
        &self.directions
    }

    /// Pairs `(eta, omega)` with `eta . omega = 0`.
    pub fn pairs(&self) -> &[([f64; 3], [f64; 3])] {
        &self.pairs
    }
}
