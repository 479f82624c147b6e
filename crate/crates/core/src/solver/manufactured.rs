//! Plane shear and pressure packets of the constant-density linear system.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{cfl_dt, Boundary, MaterialParams, Stepper};
use crate::error::{Error, Result};
use crate::grid::{Grid, Norms, VectorField3};
use crate::material::DensityField;

/// Polarization class of a plane packet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaveKind {
    /// `d ⊥ n`, speed `c2`.
    Shear,
    /// `d ∥ n`, speed `c1`.
    Pressure,
}

impl WaveKind {
    pub const ALL: [WaveKind; 2] = [WaveKind::Shear, WaveKind::Pressure];

    pub fn speed(self, params: &MaterialParams) -> f64 {
        match self {
            WaveKind::Shear => params.c2,
            WaveKind::Pressure => params.c1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            WaveKind::Shear => "shear",
            WaveKind::Pressure => "pressure",
        }
    }
}

/// `u(t, x) = d φ(x·n - s0 - c t)` with `φ(s) = (1 - (s/w)^2)^6 cos(κ s)` on `|s| < w`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWave {
    pub kind: WaveKind,
    pub normal: [f64; 3],
    pub polarization: [f64; 3],
    pub speed: f64,
    pub width: f64,
    pub offset: f64,
    /// Carrier wavenumber `κ`; zero for a plain pulse.
    pub wavenumber: f64,
}

fn unit(v: [f64; 3]) -> Option<[f64; 3]> {
    let n = v[0].hypot(v[1]).hypot(v[2]);
    (n > 0.0 && n.is_finite()).then(|| [v[0] / n, v[1] / n, v[2] / n])
}

impl PlaneWave {
    /// Normalizes `n` and `d`; shear needs `d ⊥ n`, pressure needs `d ∥ n`.
    pub fn new(
        kind: WaveKind,
        params: &MaterialParams,
        normal: [f64; 3],
        polarization: [f64; 3],
        width: f64,
        offset: f64,
    ) -> Result<Self> {
        params.validate()?;
        let (n, d) = match (unit(normal), unit(polarization)) {
            (Some(n), Some(d)) => (n, d),
            _ => return Err(Error::InvalidParams("normal and polarization must be nonzero".into())),
        };
        if !(width > 0.0 && offset.is_finite()) {
            return Err(Error::InvalidParams(format!("packet width {width} must be positive")));
        }
        let dot = n[0] * d[0] + n[1] * d[1] + n[2] * d[2];
        let ok = match kind {
            WaveKind::Shear => dot.abs() < 1e-12,
            WaveKind::Pressure => (dot.abs() - 1.0).abs() < 1e-12,
        };
        if !ok {
            return Err(Error::InvalidParams(format!(
                "{} packet with n·d = {dot} has the wrong polarization",
                kind.label()
            )));
        }
        Ok(PlaneWave {
            kind,
            normal: n,
            polarization: d,
            speed: kind.speed(params),
            width,
            offset,
            wavenumber: 0.0,
        })
    }

    /// Modulates the pulse by `cos(2π s / λ)`.
    pub fn with_carrier(mut self, wavelength: f64) -> Result<Self> {
        if !(wavelength > 0.0 && wavelength.is_finite()) {
            return Err(Error::InvalidParams(format!("carrier wavelength {wavelength} must be positive")));
        }
        self.wavenumber = 2.0 * std::f64::consts::PI / wavelength;
        Ok(self)
    }

    /// Normal `(1, 2, 2)/3`, width 2, centred at `x·n = -1` at `t = 0`.
    pub fn standard(kind: WaveKind, params: &MaterialParams) -> Result<Self> {
        let d = match kind {
            WaveKind::Shear => [2.0, -2.0, 1.0],
            WaveKind::Pressure => [1.0, 2.0, 2.0],
        };
        PlaneWave::new(kind, params, [1.0, 2.0, 2.0], d, 2.0, -1.0)
    }

    /// Profile and its first two derivatives.
    pub fn profile(&self, s: f64) -> [f64; 3] {
        let y = s / self.width;
        if y.abs() >= 1.0 {
            return [0.0; 3];
        }
        let w2 = self.width * self.width;
        let q = 1.0 - y * y;
        let e = [
            q.powi(6),
            -12.0 * y * q.powi(5) / self.width,
            (-12.0 * q.powi(5) + 120.0 * y * y * q.powi(4)) / w2,
        ];
        if self.wavenumber == 0.0 {
            return e;
        }
        let k = self.wavenumber;
        let (sn, cs) = (k * s).sin_cos();
        [
            e[0] * cs,
            e[1] * cs - k * e[0] * sn,
            e[2] * cs - 2.0 * k * e[1] * sn - k * k * e[0] * cs,
        ]
    }

    fn phase(&self, t: f64, x: [f64; 3]) -> f64 {
        let n = self.normal;
        x[0] * n[0] + x[1] * n[1] + x[2] * n[2] - self.offset - self.speed * t
    }

    fn along(&self, a: f64) -> [f64; 3] {
        self.polarization.map(|d| a * d)
    }

    pub fn displacement(&self, t: f64, x: [f64; 3]) -> [f64; 3] {
        self.along(self.profile(self.phase(t, x))[0])
    }

    pub fn velocity(&self, t: f64, x: [f64; 3]) -> [f64; 3] {
        self.along(-self.speed * self.profile(self.phase(t, x))[1])
    }

    pub fn acceleration(&self, t: f64, x: [f64; 3]) -> [f64; 3] {
        self.along(self.speed * self.speed * self.profile(self.phase(t, x))[2])
    }

    pub fn displacement_field(&self, grid: Grid, t: f64) -> VectorField3 {
        VectorField3::from_fn(grid, |x| self.displacement(t, x))
    }

    pub fn velocity_field(&self, grid: Grid, t: f64) -> VectorField3 {
        VectorField3::from_fn(grid, |x| self.velocity(t, x))
    }

    pub fn acceleration_field(&self, grid: Grid, t: f64) -> VectorField3 {
        VectorField3::from_fn(grid, |x| self.acceleration(t, x))
    }
}

/// Outcome of a manufactured-solution run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManufacturedRun {
    pub steps: usize,
    pub dt: f64,
    pub error_l2: f64,
    pub exact_l2: f64,
}

/// Integrates the constant-density linear system from the packet's data with
/// driven boundary layers and returns the final field.
pub fn integrate_manufactured(
    wave: &PlaneWave,
    params: &MaterialParams,
    grid: Grid,
    horizon: f64,
    cfl: f64,
) -> Result<(VectorField3, usize, f64)> {
    if !(horizon > 0.0 && cfl > 0.0 && cfl < 1.0) {
        return Err(Error::Config(format!("need T > 0 and 0 < cfl < 1, got {horizon}, {cfl}")));
    }
    let w = *wave;
    let exact = Arc::new(move |t, x| w.displacement(t, x));
    let stepper = Stepper::linear(grid, params)?.with_boundary(Boundary::Driven(exact));
    let bound = cfl_dt(&grid, params, &DensityField::uniform(grid), cfl);
    let steps = (horizon / bound).ceil() as usize;
    let dt = horizon / steps as f64;
    let u0 = wave.displacement_field(grid, 0.0);
    let u1 = wave.velocity_field(grid, 0.0);
    let mut prev = u0.clone();
    let mut curr = stepper.first_step(&u0, &u1, 0.0, dt)?;
    for n in 1..steps {
        let next = stepper.step(&prev, &curr, n as f64 * dt, dt)?;
        prev = std::mem::replace(&mut curr, next);
    }
    Ok((curr, steps, dt))
}

/// L² error against the exact packet at `T`.
pub fn run_manufactured(
    wave: &PlaneWave,
    params: &MaterialParams,
    grid: Grid,
    horizon: f64,
    cfl: f64,
) -> Result<ManufacturedRun> {
    let (u, steps, dt) = integrate_manufactured(wave, params, grid, horizon, cfl)?;
    let exact = wave.displacement_field(grid, horizon);
    Ok(ManufacturedRun {
        steps,
        dt,
        error_l2: (&u - &exact).l2_norm(),
        exact_l2: exact.l2_norm(),
    })
}

/// Phase speed of a carrier packet moving along `x1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSpeed {
    pub kind: WaveKind,
    pub points_per_wavelength: f64,
    pub measured: f64,
    pub exact: f64,
}

impl PhaseSpeed {
    pub fn relative_error(&self) -> f64 {
        (self.measured - self.exact).abs() / self.exact
    }
}

/// Runs a unit-wavelength carrier under a wide envelope through a box of
/// half-width one wavelength with driven layers, then fits the analytic translate
/// to the computed profile on the `x1` axis by least squares.
pub fn measure_phase_speed(
    kind: WaveKind,
    params: &MaterialParams,
    points_per_wavelength: usize,
    cfl: f64,
) -> Result<PhaseSpeed> {
    if points_per_wavelength < 4 || points_per_wavelength % 2 == 1 {
        return Err(Error::Config(format!(
            "points per wavelength must be even and at least 4, got {points_per_wavelength}"
        )));
    }
    let lambda = 1.0;
    let d = match kind {
        WaveKind::Shear => [0.0, 1.0, 0.0],
        WaveKind::Pressure => [1.0, 0.0, 0.0],
    };
    // the packet travels two wavelengths across the box centre
    let horizon = 2.0 * lambda / kind.speed(params);
    let offset = -lambda;
    let wave = PlaneWave::new(kind, params, [1.0, 0.0, 0.0], d, 16.0 * lambda, offset)?.with_carrier(lambda)?;
    let grid = Grid::new(lambda, 2 * points_per_wavelength + 1, 2)?;
    let (u, _, _) = integrate_manufactured(&wave, params, grid, horizon, cfl)?;
    let c = grid.center_index();
    let comp = if kind == WaveKind::Shear { 1 } else { 0 };
    let line: Vec<(f64, f64)> = grid
        .interior()
        .map(|i| (grid.coord(i), u.at(i, c, c)[comp]))
        .collect();
    let misfit = |s: f64| -> f64 {
        line.iter()
            .map(|&(x, v)| (v - wave.profile(x - s)[0]).powi(2))
            .sum()
    };
    // the carrier makes the misfit periodic, so stay within half a wavelength of the exact shift
    let guess = offset + wave.speed * horizon;
    let h = grid.spacing();
    let (mut best, mut best_val) = (guess, misfit(guess));
    let mut s = guess - 0.5 * lambda;
    while s <= guess + 0.5 * lambda {
        let v = misfit(s);
        if v < best_val {
            best = s;
            best_val = v;
        }
        s += 0.1 * h;
    }
    let shift = golden_min(misfit, best - 0.1 * h, best + 0.1 * h, 1e-13);
    Ok(PhaseSpeed {
        kind,
        points_per_wavelength: lambda / h,
        measured: (shift - offset) / horizon,
        exact: wave.speed,
    })
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let r = 0.5 * (5.0_f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}
