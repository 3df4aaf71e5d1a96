//! Search over direction triples maximizing the quantum Bell functional.
//!
//! Rotation invariance of |a.b - a.c| + b.c lets the search fix a canonical
//! frame: a on the z-axis and b in the xz-plane, leaving three free angles
//! (polar angle of b, polar and azimuthal angles of c). The local search is
//! cyclic coordinate descent with step halving from pi/8 down to the
//! requested tolerance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};
use crate::inequality::quantum_functional;
use crate::qubit::BlochVector;

/// The three measurement directions under optimization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectionTriple {
    pub a: BlochVector,
    pub b: BlochVector,
    pub c: BlochVector,
}

impl DirectionTriple {
    /// The reference violating configuration: b.c = 0 and a along b - c,
    /// where the functional reaches sqrt(2).
    pub fn sqrt2_instance() -> Self {
        let b = BlochVector::z_axis();
        let c = BlochVector::x_axis();
        let a = BlochVector::new(FRAC_1_SQRT_2 * (b.x - c.x), 0.0, FRAC_1_SQRT_2 * (b.z - c.z))
            .expect("b - c is nonzero");
        Self { a, b, c }
    }

    pub fn functional(&self) -> f64 {
        quantum_functional(&self.a, &self.b, &self.c)
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub best: DirectionTriple,
    pub value: f64,
    pub restarts_used: u32,
    pub converged: bool,
}

/// Canonical-frame angles: [polar of b, polar of c, azimuth of c].
pub type ReducedAngles = [f64; 3];

/// Reconstructs the canonical-frame triple from reduced angles.
pub fn triple_from_angles(angles: ReducedAngles) -> DirectionTriple {
    let [beta, theta_c, phi_c] = angles;
    let a = BlochVector::z_axis();
    let b = BlochVector {
        x: beta.sin(),
        y: 0.0,
        z: beta.cos(),
    };
    let c = BlochVector {
        x: theta_c.sin() * phi_c.cos(),
        y: theta_c.sin() * phi_c.sin(),
        z: theta_c.cos(),
    };
    DirectionTriple { a, b, c }
}

/// Rotates an arbitrary triple into the canonical frame and returns its
/// reduced angles. The functional is invariant under this reduction.
pub fn angles_from_triple(triple: &DirectionTriple) -> ReducedAngles {
    let a = triple.a;
    // e1: component of b orthogonal to a, or an arbitrary perpendicular when
    // b is (anti)parallel to a
    let b_dot_a = triple.b.dot(&a);
    let residual = (
        triple.b.x - b_dot_a * a.x,
        triple.b.y - b_dot_a * a.y,
        triple.b.z - b_dot_a * a.z,
    );
    let e1 = BlochVector::new(residual.0, residual.1, residual.2)
        .or_else(|_| {
            // any vector not parallel to a works as a seed
            let seed = if a.x.abs() < 0.9 {
                BlochVector::x_axis()
            } else {
                BlochVector::y_axis()
            };
            let d = seed.dot(&a);
            BlochVector::new(seed.x - d * a.x, seed.y - d * a.y, seed.z - d * a.z)
        })
        .expect("perpendicular seed is non-degenerate");
    let e2 = BlochVector {
        x: a.y * e1.z - a.z * e1.y,
        y: a.z * e1.x - a.x * e1.z,
        z: a.x * e1.y - a.y * e1.x,
    };

    let beta = triple.b.dot(&e1).atan2(triple.b.dot(&a));
    let theta_c = triple.c.dot(&a).clamp(-1.0, 1.0).acos();
    let phi_c = triple.c.dot(&e2).atan2(triple.c.dot(&e1));
    [beta, theta_c, phi_c]
}

/// The functional in reduced coordinates:
/// |cos(beta) - cos(theta)| + (sin(beta) sin(theta) cos(phi) + cos(beta) cos(theta)).
pub fn reduced_functional(angles: ReducedAngles) -> f64 {
    let [beta, theta_c, phi_c] = angles;
    let ab = beta.cos();
    let ac = theta_c.cos();
    let bc = beta.sin() * theta_c.sin() * phi_c.cos() + beta.cos() * theta_c.cos();
    (ab - ac).abs() + bc
}

const INITIAL_STEP: f64 = PI / 8.0;

/// Cyclic coordinate descent from `start`, halving the step each time a full
/// cycle yields no improvement, stopping once the step falls below `tol`.
fn descend(start: ReducedAngles, tol: f64) -> (ReducedAngles, f64) {
    let mut angles = start;
    let mut value = reduced_functional(angles);
    let mut step = INITIAL_STEP;
    while step >= tol {
        let mut improved = false;
        for coord in 0..3 {
            for delta in [step, -step] {
                let mut candidate = angles;
                candidate[coord] += delta;
                let candidate_value = reduced_functional(candidate);
                if candidate_value > value {
                    angles = candidate;
                    value = candidate_value;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (angles, value)
}

/// Multi-start search. Per-restart starting points come from independent
/// substreams of the master seed (stream = restart index), so restarts may be
/// evaluated in any order or concurrently with identical results.
pub fn optimize_directions(restarts: u32, tol: f64, seed: u64) -> Result<OptimizationResult> {
    if restarts < 1 {
        return Err(Error::InvalidParameter("restarts must be >= 1".into()));
    }
    if tol <= 0.0 || tol.is_nan() {
        return Err(Error::InvalidParameter("tol must be > 0".into()));
    }

    let base = ChaCha8Rng::seed_from_u64(seed);
    let mut best_angles = [0.0; 3];
    let mut best_value = f64::NEG_INFINITY;
    for restart in 0..restarts {
        let mut rng = base.clone();
        rng.set_stream(u64::from(restart));
        let start = [
            rng.gen::<f64>() * PI,
            rng.gen::<f64>() * PI,
            rng.gen::<f64>() * 2.0 * PI,
        ];
        let (angles, value) = descend(start, tol);
        if value > best_value {
            best_value = value;
            best_angles = angles;
        }
    }

    let best = triple_from_angles(best_angles);
    Ok(OptimizationResult {
        best,
        // report the functional of the returned triple, not the bookkept value
        value: best.functional(),
        restarts_used: restarts,
        converged: true,
    })
}

/// Warm-started local refinement of one triple; the result value never falls
/// below the starting value.
pub fn refine_triple(triple: &DirectionTriple, tol: f64) -> Result<OptimizationResult> {
    if tol <= 0.0 || tol.is_nan() {
        return Err(Error::InvalidParameter("tol must be > 0".into()));
    }
    let (angles, _) = descend(angles_from_triple(triple), tol);
    let best = triple_from_angles(angles);
    Ok(OptimizationResult {
        best,
        value: best.functional(),
        restarts_used: 1,
        converged: true,
    })
}

/// One sweep sample: correlation u = b.c, the functional value at the
/// maximizing coplanar triple for that u, and the triple realizing it.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SweepPoint {
    pub u: f64,
    pub functional: f64,
    #[serde(skip)]
    pub triple: DirectionTriple,
}

/// Tabulates g(u) = sqrt(2 - 2u) + u on a uniform grid over u in [-1, 1],
/// realized at each grid point by an explicit coplanar triple with b.c = u
/// and a along b - c.
pub fn sweep_functional(grid_points: u32) -> Result<Vec<SweepPoint>> {
    if grid_points < 2 {
        return Err(Error::InvalidParameter("grid_points must be >= 2".into()));
    }
    let n = grid_points as usize;
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let u = -1.0 + 2.0 * i as f64 / (n - 1) as f64;
        let b = BlochVector::z_axis();
        let c = BlochVector {
            x: (1.0 - u * u).max(0.0).sqrt(),
            y: 0.0,
            z: u,
        };
        // a maximizes a.(b - c); at b = c the difference term vanishes and
        // any a gives the same value
        let a = BlochVector::new(b.x - c.x, b.y - c.y, b.z - c.z).unwrap_or(b);
        let triple = DirectionTriple { a, b, c };
        let functional = triple.functional();
        debug_assert!(
            (functional - ((2.0 - 2.0 * u).max(0.0).sqrt() + u)).abs() < 1e-12,
            "explicit triple disagrees with the analytic curve at u = {u}"
        );
        rows.push(SweepPoint { u, functional, triple });
    }
    Ok(rows)
}
