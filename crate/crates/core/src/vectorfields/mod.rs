//! The generators `Γ = (∂_t, ∂_1, ∂_2, ∂_3, Ω̃_1, Ω̃_2, Ω̃_3, S̃)`, words over
//! them, and their action on discrete space-time windows.
//!
//! `Ω̃_l = Ω_l I + U_l` with `Ω = x ∧ ∇` acting componentwise, and
//! `S̃ = t ∂_t + x·∇ - 1`. A word `Γ^α` applies its letters rightmost first.

mod commutators;
mod lambda;
mod spatial;
mod trajectory;

use std::fmt;

use crate::error::{Error, Result};
use crate::grid::Axis;

pub use commutators::{
    verify_commutators, verify_leibniz_n, AnalyticField, BumpOscillation, CommutatorParams,
    IdentityResidual, QuadraticField, ResidualReport,
};
pub use lambda::{apply_lambda, apply_lambda_word, h_lambda_norm};
pub use spatial::{radial_derivative, rotation};
pub use trajectory::{apply_generator, apply_word, apply_word_window, Trajectory};
pub(crate) use trajectory::apply_generator_window;

/// Longest word accepted by [`enumerate_words`] unless a larger cap is requested.
pub const DEFAULT_MAX_WORD_LEN: usize = 2;

/// One of the eight generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    Dt,
    D(Axis),
    Rot(Axis),
    Scale,
}

impl Generator {
    /// The generators in index order `Γ_0, ..., Γ_7`.
    pub const ALL: [Generator; 8] = [
        Generator::Dt,
        Generator::D(Axis::X1),
        Generator::D(Axis::X2),
        Generator::D(Axis::X3),
        Generator::Rot(Axis::X1),
        Generator::Rot(Axis::X2),
        Generator::Rot(Axis::X3),
        Generator::Scale,
    ];

    pub fn index(self) -> usize {
        match self {
            Generator::Dt => 0,
            Generator::D(a) => 1 + a.index(),
            Generator::Rot(a) => 4 + a.index(),
            Generator::Scale => 7,
        }
    }

    /// Whether the generator needs neighbouring time levels.
    pub fn is_temporal(self) -> bool {
        matches!(self, Generator::Dt | Generator::Scale)
    }

    pub fn name(self) -> &'static str {
        match self {
            Generator::Dt => "dt",
            Generator::D(Axis::X1) => "d1",
            Generator::D(Axis::X2) => "d2",
            Generator::D(Axis::X3) => "d3",
            Generator::Rot(Axis::X1) => "O1",
            Generator::Rot(Axis::X2) => "O2",
            Generator::Rot(Axis::X3) => "O3",
            Generator::Scale => "S",
        }
    }
}

/// The antisymmetric matrices `U_1, U_2, U_3` in `Ω̃_l = Ω_l I + U_l`.
pub struct RotationMatrices;

impl RotationMatrices {
    pub const U: [[[f64; 3]; 3]; 3] = [
        [[0.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, -1.0, 0.0]],
        [[0.0, 0.0, -1.0], [0.0, 0.0, 0.0], [1.0, 0.0, 0.0]],
        [[0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.0, 0.0]],
    ];

    pub fn get(l: Axis) -> &'static [[f64; 3]; 3] {
        &Self::U[l.index()]
    }
}

/// A word `Γ^α`; `letters[0]` is applied last.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GammaWord {
    letters: Vec<Generator>,
}

impl GammaWord {
    pub fn new(letters: Vec<Generator>) -> Self {
        GammaWord { letters }
    }

    pub fn empty() -> Self {
        GammaWord::default()
    }

    pub fn letters(&self) -> &[Generator] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Number of letters that consume a time level on each side.
    pub fn temporal_count(&self) -> usize {
        self.letters.iter().filter(|g| g.is_temporal()).count()
    }

    /// The word `self · other` (apply `other` first).
    pub fn compose(&self, other: &GammaWord) -> GammaWord {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        GammaWord { letters }
    }
}

impl fmt::Display for GammaWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "e");
        }
        let names: Vec<&str> = self.letters.iter().map(|g| g.name()).collect();
        write!(f, "{}", names.join("."))
    }
}

/// All words of length `<= k - 1`, shortest first, lexicographic by generator index
/// within a length.
pub fn enumerate_words(k: usize) -> Result<Vec<GammaWord>> {
    enumerate_words_capped(k, DEFAULT_MAX_WORD_LEN)
}

/// [`enumerate_words`] with an explicit cap on the word length.
pub fn enumerate_words_capped(k: usize, max_len: usize) -> Result<Vec<GammaWord>> {
    if k == 0 {
        return Err(Error::UnsupportedOrder {
            k,
            reason: "order must be at least 1",
        });
    }
    if k - 1 > max_len {
        return Err(Error::UnsupportedOrder {
            k,
            reason: "word length exceeds the configured maximum",
        });
    }
    let mut out = vec![GammaWord::empty()];
    let mut layer = vec![GammaWord::empty()];
    for _ in 0..k - 1 {
        layer = layer
            .iter()
            .flat_map(|w| {
                Generator::ALL.iter().map(move |&g| {
                    let mut letters = w.letters.clone();
                    letters.push(g);
                    GammaWord { letters }
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    Ok(out)
}
