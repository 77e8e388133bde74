//! Natural-unit parameter set and spatial grid shared by every module.
//!
//! Lengths are measured in lattice steps, energies in recoil energies,
//! time in `hbar / E_R`. In these units the Bloch frequency equals the
//! tilt force, `omega_B = F`, and the reduced mass is `m = pi^2 / 2`.

use crate::bessel;
use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Reduced mass in natural units.
pub const REDUCED_MASS: f64 = PI * PI / 2.0;

/// Physical configuration of the (possibly modulated) tilted lattice.
///
/// Immutable after construction; `delta` is stored but construction pins it
/// to `omega - f`, so there is no ambiguity between setting the drive
/// frequency and setting the detuning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeParams {
    v0: f64,
    f: f64,
    f0: f64,
    omega: f64,
    delta: f64,
}

/// Non-fatal validity findings attached to a parameter set.
#[derive(Debug, Clone, PartialEq)]
pub enum ValidityWarning {
    /// The drive is too strong to count as a smooth modulation: `f0/omega`
    /// reaches the first root of J1 (~3.83) where the effective coupling
    /// changes sign and the single-band picture is unreliable.
    NotSmoothModulation { f0_over_omega: f64 },
}

impl LatticeParams {
    /// Validated constructor. `delta` is derived as `omega - f`.
    pub fn new(v0: f64, f: f64, f0: f64, omega: f64) -> Result<Self> {
        if !(v0 > 0.0 && v0.is_finite()) {
            return Err(Error::Config(format!("lattice depth v0 must be positive, got {v0}")));
        }
        if !(f > 0.0 && f.is_finite()) {
            return Err(Error::Config(format!("tilt force f must be positive, got {f}")));
        }
        if !(f0 >= 0.0 && f0.is_finite()) {
            return Err(Error::Config(format!("drive amplitude f0 must be >= 0, got {f0}")));
        }
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::Config(format!("drive frequency omega must be positive, got {omega}")));
        }
        Ok(Self { v0, f, f0, omega, delta: omega - f })
    }

    /// Reference parameter set (`v0 = 4.5`, `f = 0.5`), undriven, with the
    /// drive tuned to exact resonance so that `delta = 0`.
    pub fn reference() -> Self {
        Self::new(4.5, 0.5, 0.0, 0.5).expect("reference preset is valid")
    }

    /// Copy with a different drive `(f0, omega)`.
    pub fn with_drive(&self, f0: f64, omega: f64) -> Result<Self> {
        Self::new(self.v0, self.f, f0, omega)
    }

    pub fn v0(&self) -> f64 { self.v0 }
    pub fn f(&self) -> f64 { self.f }
    pub fn f0(&self) -> f64 { self.f0 }
    pub fn omega(&self) -> f64 { self.omega }
    pub fn delta(&self) -> f64 { self.delta }

    /// Bloch frequency; equals the tilt force in natural units.
    pub fn omega_b(&self) -> f64 { self.f }

    /// Reduced mass; fixed by the unit system.
    pub fn reduced_mass(&self) -> f64 { REDUCED_MASS }

    /// Full time-dependent potential `V0 cos(2 pi x) + F x - F0 x sin(omega t)`.
    ///
    /// With `f0 = 0` this reduces to the static tilted lattice.
    pub fn potential(&self, x: f64, t: f64) -> f64 {
        self.v0 * (2.0 * PI * x).cos() + self.f * x - self.f0 * x * (self.omega * t).sin()
    }

    /// Static part of the potential, `V0 cos(2 pi x) + F x`.
    pub fn static_potential(&self, x: f64) -> f64 {
        self.v0 * (2.0 * PI * x).cos() + self.f * x
    }

    /// Validity findings for this parameter set (empty when all clear).
    pub fn warnings(&self) -> Vec<ValidityWarning> {
        let mut w = Vec::new();
        let ratio = self.f0 / self.omega;
        if ratio >= bessel::J1_FIRST_ROOT {
            w.push(ValidityWarning::NotSmoothModulation { f0_over_omega: ratio });
        }
        w
    }
}

/// Free-function form of the potential evaluation.
pub fn potential_eval(params: &LatticeParams, x: f64, t: f64) -> f64 {
    params.potential(x, t)
}

/// Uniform spatial grid. The stored points are the interior unknowns of a
/// hard-wall box whose walls sit one spacing outside `[x_min, x_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n_points: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if x_min >= x_max || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::Config(format!("grid bounds must satisfy x_min < x_max, got [{x_min}, {x_max}]")));
        }
        if n_points < 2 {
            return Err(Error::Config(format!("grid needs at least 2 points, got {n_points}")));
        }
        Ok(Self { x_min, x_max, n_points })
    }

    /// Default box for the reference parameters: `[-24, 24]` with 4096 points.
    pub fn default_box() -> Self {
        Self::new(-24.0, 24.0, 4096).expect("default box is valid")
    }

    pub fn x_min(&self) -> f64 { self.x_min }
    pub fn x_max(&self) -> f64 { self.x_max }
    pub fn n_points(&self) -> usize { self.n_points }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        self.x_min + self.spacing() * i as f64
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(|i| self.point(i))
    }

    /// Checks the bulk-state requirement: at least `margin` lattice periods
    /// between the outermost analyzed well and each box edge.
    pub fn contains_bulk_window(&self, n_lo: i64, n_hi: i64, margin: f64) -> bool {
        let lo_center = n_lo as f64 + 0.5;
        let hi_center = n_hi as f64 + 0.5;
        lo_center - self.x_min >= margin && self.x_max - hi_center >= margin
    }
}
