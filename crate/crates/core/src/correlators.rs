//! Two-time correlators for sequential projective spin measurements, exact by
//! enumeration of the four outcome branches, plus the closed-form quantum
//! correlation set.

use serde::{Deserialize, Serialize};

use crate::qubit::{BlochVector, Outcome, QubitState, SpinRotation, TOL};

/// The triple (P(a,b), P(a,c), P(b,c)). Standard errors are zero for exact
/// values and positive for sampled estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSet {
    pub p_ab: f64,
    pub p_ac: f64,
    pub p_bc: f64,
    pub se_ab: f64,
    pub se_ac: f64,
    pub se_bc: f64,
}

impl CorrelationSet {
    pub fn exact(p_ab: f64, p_ac: f64, p_bc: f64) -> Self {
        Self {
            p_ab,
            p_ac,
            p_bc,
            se_ab: 0.0,
            se_ac: 0.0,
            se_bc: 0.0,
        }
    }

    pub fn estimated(p: [f64; 3], se: [f64; 3]) -> Self {
        Self {
            p_ab: p[0],
            p_ac: p[1],
            p_bc: p[2],
            se_ab: se[0],
            se_ac: se[1],
            se_bc: se[2],
        }
    }

    pub fn is_exact(&self) -> bool {
        self.se_ab == 0.0 && self.se_ac == 0.0 && self.se_bc == 0.0
    }
}

/// Exact expectation of the product of two consecutive measurement outcomes:
/// the first along `first` on `state`, then precession for `dt`, then the
/// second along `second`. Sums s1*s2*p(s1)*p(s2|s1) over the four branches;
/// zero-probability branches contribute nothing.
///
/// With zero angular rate this equals `first . second` for every valid
/// initial state.
pub fn sequential_correlator(
    state: &QubitState,
    first: &BlochVector,
    second: &BlochVector,
    rotation: &SpinRotation,
    dt: f64,
) -> f64 {
    let mut acc = 0.0;
    for s1 in Outcome::BOTH {
        let p1 = state.born_probability(first, s1);
        if p1 < TOL {
            continue;
        }
        let evolved = state
            .collapse(first, s1)
            .expect("branch probability checked above")
            .evolve(rotation, dt);
        for s2 in Outcome::BOTH {
            let p2 = evolved.born_probability(second, s2);
            acc += s1.sign() * s2.sign() * p1 * p2;
        }
    }
    acc
}

/// Same correlator parametrized by absolute measurement times: the state is
/// precessed from time zero to `t_first` before the first measurement. The
/// result depends only on `t_second - t_first`.
pub fn sequential_correlator_at(
    state: &QubitState,
    first: &BlochVector,
    second: &BlochVector,
    rotation: &SpinRotation,
    t_first: f64,
    t_second: f64,
) -> f64 {
    let prepared = state.evolve(rotation, t_first);
    sequential_correlator(&prepared, first, second, rotation, t_second - t_first)
}

/// The quantum-mechanical correlation set for three directions: the closed
/// form (a.b, a.c, b.c). Equivalence with branch enumeration is enforced by
/// cross-module tests.
pub fn quantum_correlation_set(a: &BlochVector, b: &BlochVector, c: &BlochVector) -> CorrelationSet {
    CorrelationSet::exact(a.dot(b), a.dot(c), b.dot(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubit::make_direction;
    use approx::assert_abs_diff_eq;

    const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn repeated_direction_gives_one() {
        let z = BlochVector::z_axis();
        let mixed = QubitState::maximally_mixed();
        let p = sequential_correlator(&mixed, &z, &z, &SpinRotation::identity(), 1.0);
        assert_abs_diff_eq!(p, 1.0, epsilon = TOL);
    }

    #[test]
    fn orthogonal_directions_give_zero() {
        let mixed = QubitState::maximally_mixed();
        let p = sequential_correlator(
            &mixed,
            &BlochVector::z_axis(),
            &BlochVector::x_axis(),
            &SpinRotation::identity(),
            1.0,
        );
        assert_abs_diff_eq!(p, 0.0, epsilon = TOL);
    }

    #[test]
    fn diagonal_direction_gives_sqrt_half() {
        let diag = make_direction(1.0, 0.0, 1.0).unwrap();
        let mixed = QubitState::maximally_mixed();
        let p = sequential_correlator(
            &mixed,
            &BlochVector::z_axis(),
            &diag,
            &SpinRotation::identity(),
            1.0,
        );
        assert_abs_diff_eq!(p, SQRT_HALF, epsilon = TOL);

        // state independence: pure spin-up initial state, same value
        let up = QubitState::pure_along(&BlochVector::z_axis());
        let p_up = sequential_correlator(
            &up,
            &BlochVector::z_axis(),
            &diag,
            &SpinRotation::identity(),
            1.0,
        );
        assert_abs_diff_eq!(p_up, SQRT_HALF, epsilon = TOL);
    }

    #[test]
    fn quantum_correlation_set_is_dot_products() {
        let z = BlochVector::z_axis();
        let set = quantum_correlation_set(&z, &z, &z);
        assert_eq!((set.p_ab, set.p_ac, set.p_bc), (1.0, 1.0, 1.0));
        assert!(set.is_exact());

        let b = BlochVector::z_axis();
        let c = BlochVector::x_axis();
        let a = make_direction(b.x - c.x, b.y - c.y, b.z - c.z).unwrap();
        let set = quantum_correlation_set(&a, &b, &c);
        assert_abs_diff_eq!(set.p_ab, SQRT_HALF, epsilon = TOL);
        assert_abs_diff_eq!(set.p_ac, -SQRT_HALF, epsilon = TOL);
        assert_abs_diff_eq!(set.p_bc, 0.0, epsilon = TOL);

        let set = quantum_correlation_set(&BlochVector::x_axis(), &BlochVector::y_axis(), &z);
        assert_eq!((set.p_ab, set.p_ac, set.p_bc), (0.0, 0.0, 0.0));
    }
}
