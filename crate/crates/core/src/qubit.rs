//! Spin-1/2 states, Pauli observables along arbitrary directions, projective
//! measurement with collapse, and unitary precession between measurements.

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// 2x2 complex matrix; everything in this module lives in this space.
pub type CMat2 = Matrix2<Complex64>;

pub const TOL: f64 = 1e-12;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity() -> CMat2 {
    CMat2::identity()
}

pub fn pauli_x() -> CMat2 {
    CMat2::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0))
}

pub fn pauli_y() -> CMat2 {
    CMat2::new(c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0))
}

pub fn pauli_z() -> CMat2 {
    CMat2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0))
}

/// A unit 3-vector: a spin measurement direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    /// Normalizes the input to unit length. Rejects near-zero vectors rather
    /// than dividing by a denormal norm.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if norm < 1e-9 {
            return Err(Error::ZeroVector { norm });
        }
        Ok(Self {
            x: x / norm,
            y: y / norm,
            z: z / norm,
        })
    }

    pub fn x_axis() -> Self {
        Self { x: 1.0, y: 0.0, z: 0.0 }
    }

    pub fn y_axis() -> Self {
        Self { x: 0.0, y: 1.0, z: 0.0 }
    }

    pub fn z_axis() -> Self {
        Self { x: 0.0, y: 0.0, z: 1.0 }
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    /// sigma . n
    pub fn pauli_matrix(&self) -> CMat2 {
        pauli_x() * c(self.x, 0.0) + pauli_y() * c(self.y, 0.0) + pauli_z() * c(self.z, 0.0)
    }
}

/// Alias matching the operation vocabulary; `BlochVector::new` does the work.
pub fn make_direction(x: f64, y: f64, z: f64) -> Result<BlochVector> {
    BlochVector::new(x, y, z)
}

/// A measurement outcome, exactly +1 or -1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    #[serde(rename = "+1")]
    Plus,
    #[serde(rename = "-1")]
    Minus,
}

impl Outcome {
    pub const BOTH: [Outcome; 2] = [Outcome::Plus, Outcome::Minus];

    pub fn value(self) -> i8 {
        match self {
            Outcome::Plus => 1,
            Outcome::Minus => -1,
        }
    }

    pub fn sign(self) -> f64 {
        f64::from(self.value())
    }

    pub fn from_sign(s: i8) -> Self {
        if s >= 0 {
            Outcome::Plus
        } else {
            Outcome::Minus
        }
    }
}

/// The spin component along a direction: sigma . n, eigenvalues exactly +-1.
#[derive(Debug, Clone)]
pub struct SpinObservable {
    pub matrix: CMat2,
    pub direction: BlochVector,
}

impl SpinObservable {
    pub fn along(n: BlochVector) -> Self {
        Self {
            matrix: n.pauli_matrix(),
            direction: n,
        }
    }
}

pub fn observable(n: BlochVector) -> SpinObservable {
    SpinObservable::along(n)
}

/// Rank-1 projector onto the outcome-`s` eigenspace of sigma . n:
/// (I + s sigma.n) / 2.
pub fn projector(n: &BlochVector, s: Outcome) -> CMat2 {
    (identity() + n.pauli_matrix() * c(s.sign(), 0.0)) * c(0.5, 0.0)
}

/// Axis and angular rate of the (optional) spin precession between
/// measurements. Rate zero is free evolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinRotation {
    pub axis: BlochVector,
    pub angular_rate: f64,
}

impl SpinRotation {
    pub fn identity() -> Self {
        Self {
            axis: BlochVector::z_axis(),
            angular_rate: 0.0,
        }
    }

    /// U = exp(-i (rate*dt/2) sigma.axis) = cos(th/2) I - i sin(th/2) sigma.axis
    pub fn unitary(&self, dt: f64) -> CMat2 {
        let half = 0.5 * self.angular_rate * dt;
        identity() * c(half.cos(), 0.0) + self.axis.pauli_matrix() * c(0.0, -half.sin())
    }
}

/// A spin-1/2 state as a 2x2 density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitState {
    rho: CMat2,
}

impl QubitState {
    /// Validates Hermiticity, unit trace, and positivity before accepting.
    pub fn from_matrix(rho: CMat2) -> Result<Self> {
        let herm_err = (rho - rho.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm_err > TOL {
            return Err(Error::InvalidParameter(format!(
                "density matrix not Hermitian (max deviation {herm_err:.3e})"
            )));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > TOL || tr.im.abs() > TOL {
            return Err(Error::InvalidParameter(format!(
                "density matrix trace {tr} is not 1"
            )));
        }
        let state = Self { rho };
        let (lo, hi) = state.eigenvalues();
        if lo < -TOL || hi > 1.0 + TOL {
            return Err(Error::InvalidParameter(format!(
                "density matrix eigenvalues ({lo}, {hi}) outside [0, 1]"
            )));
        }
        Ok(state)
    }

    pub fn maximally_mixed() -> Self {
        Self {
            rho: identity() * c(0.5, 0.0),
        }
    }

    /// Pure state polarized along `n`: (I + sigma.n)/2.
    pub fn pure_along(n: &BlochVector) -> Self {
        Self {
            rho: projector(n, Outcome::Plus),
        }
    }

    pub fn matrix(&self) -> &CMat2 {
        &self.rho
    }

    /// Closed-form Hermitian 2x2 eigenvalues, ascending.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let tr = self.rho.trace().re;
        let det = (self.rho[(0, 0)] * self.rho[(1, 1)] - self.rho[(0, 1)] * self.rho[(1, 0)]).re;
        let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
        (0.5 * (tr - disc), 0.5 * (tr + disc))
    }

    /// Born rule: tr(P rho), clamped to [0, 1].
    pub fn born_probability(&self, n: &BlochVector, s: Outcome) -> f64 {
        let p = (projector(n, s) * self.rho).trace().re;
        p.clamp(0.0, 1.0)
    }

    /// Post-measurement state P rho P / tr(P rho P).
    pub fn collapse(&self, n: &BlochVector, s: Outcome) -> Result<Self> {
        let probability = self.born_probability(n, s);
        if probability < TOL {
            return Err(Error::ImpossibleOutcome { probability });
        }
        let p = projector(n, s);
        let num = p * self.rho * p;
        Ok(Self {
            rho: num * c(1.0 / num.trace().re, 0.0),
        })
    }

    /// rho -> U rho U^dagger under the given precession for time dt.
    pub fn evolve(&self, rotation: &SpinRotation, dt: f64) -> Self {
        let u = rotation.unitary(dt);
        Self {
            rho: u * self.rho * u.adjoint(),
        }
    }
}
