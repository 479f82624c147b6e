//! Compactly supported Cauchy data.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::MaterialParams;
use crate::error::{Error, Result};
use crate::grid::{Grid, Norms, VectorField3};
use crate::vectorfields::h_lambda_norm;

/// Shape of the initial data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    /// A mixed swirl and dilation at rest.
    #[default]
    Bump,
    /// A transverse packet moving along `x1` at `c2`.
    ShearPacket,
    /// A longitudinal packet moving along `x1` at `c1`.
    PressurePacket,
}

impl Profile {
    pub const ALL: [Profile; 3] = [Profile::Bump, Profile::ShearPacket, Profile::PressurePacket];

    pub fn label(self) -> &'static str {
        match self {
            Profile::Bump => "bump",
            Profile::ShearPacket => "shear_packet",
            Profile::PressurePacket => "pressure_packet",
        }
    }
}

/// `(u(0), ∂_t u(0))` with measured norms.
#[derive(Debug, Clone)]
pub struct CauchyData {
    pub u0: VectorField3,
    pub u1: VectorField3,
    pub support_radius: f64,
    /// `||(u0, u1)||` in `H_Λ^{k-2}`.
    pub eps_measured: f64,
    /// `||(u0, u1)||` in `H_Λ^{min(k, 3)}`.
    pub m_measured: f64,
}

impl CauchyData {
    pub fn grid(&self) -> &Grid {
        self.u0.grid()
    }

    pub fn is_zero(&self) -> bool {
        self.u0.sup_norm() == 0.0 && self.u1.sup_norm() == 0.0
    }
}

/// Exponent of the polynomial bump.
pub const BUMP_POWER: i32 = 4;

/// `(1 - r^2/R^2)^p` inside the ball, zero outside.
pub fn envelope(x: [f64; 3], radius: f64) -> f64 {
    let s = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / (radius * radius);
    if s >= 1.0 {
        0.0
    } else {
        (1.0 - s).powi(BUMP_POWER)
    }
}

/// Evaluates the profile on `grid` without measuring norms.
pub fn profile_fields(
    profile: Profile,
    amplitude: f64,
    radius: f64,
    grid: Grid,
    params: &MaterialParams,
) -> (VectorField3, VectorField3) {
    let wave = 2.0 * PI / radius;
    match profile {
        Profile::Bump => {
            let u0 = VectorField3::from_fn(grid, |x| {
                let b = amplitude * envelope(x, radius);
                let y = [x[0] / radius, x[1] / radius, x[2] / radius];
                [b * (y[0] - 0.5 * y[1]), b * (y[1] + 0.5 * y[0]), b * y[2]]
            });
            (u0, VectorField3::zeros(grid))
        }
        Profile::ShearPacket | Profile::PressurePacket => {
            let (axis, speed) = if profile == Profile::ShearPacket {
                (1, params.c2)
            } else {
                (0, params.c1)
            };
            let packet = |x: [f64; 3], f: fn(f64) -> f64, scale: f64| {
                let mut v = [0.0; 3];
                v[axis] = scale * envelope(x, radius) * f(wave * x[0]);
                v
            };
            let u0 = VectorField3::from_fn(grid, |x| packet(x, f64::cos, amplitude));
            let u1 = VectorField3::from_fn(grid, |x| packet(x, f64::sin, amplitude * speed * wave));
            (u0, u1)
        }
    }
}

/// Builds the data and measures `eps` at order `k - 2` and `M` at order `min(k, 3)`.
pub fn make_cauchy_data(
    profile: Profile,
    amplitude: f64,
    radius: f64,
    grid: Grid,
    params: &MaterialParams,
    k: usize,
) -> Result<CauchyData> {
    if !(radius > 0.0 && amplitude.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "need R0 > 0 and finite amplitude, got R0 = {radius}, a = {amplitude}"
        )));
    }
    if radius + 2.0 * grid.spacing() >= grid.half_width() {
        return Err(Error::InvalidParams(format!(
            "support radius {radius} leaves no margin in a box of half-width {}",
            grid.half_width()
        )));
    }
    let (u0, u1) = profile_fields(profile, amplitude, radius, grid, params);
    let eps_measured = h_lambda_norm(&u0, &u1, k.saturating_sub(2))?;
    let m_measured = h_lambda_norm(&u0, &u1, k.min(3))?;
    Ok(CauchyData {
        u0,
        u1,
        support_radius: radius,
        eps_measured,
        m_measured,
    })
}
