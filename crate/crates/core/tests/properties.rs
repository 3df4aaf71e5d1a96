//! Seeded property checks spanning modules: state independence of the
//! sequential correlator, collapse and evolution invariants, convexity of the
//! strategy simplex, rotation invariance of the functional, and estimator
//! statistics.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempo_bell_core::qubit::{identity, TOL};
use tempo_bell_core::*;

fn random_direction<R: Rng>(rng: &mut R) -> BlochVector {
    loop {
        let v = [
            rng.gen::<f64>() * 2.0 - 1.0,
            rng.gen::<f64>() * 2.0 - 1.0,
            rng.gen::<f64>() * 2.0 - 1.0,
        ];
        if let Ok(n) = BlochVector::new(v[0], v[1], v[2]) {
            return n;
        }
    }
}

/// Random valid density matrix: (I + r sigma.n)/2 with |r| <= 1.
fn random_state<R: Rng>(rng: &mut R) -> QubitState {
    let n = random_direction(rng);
    let r = rng.gen::<f64>();
    let rho = (identity() + n.pauli_matrix() * num_complex::Complex64::new(r, 0.0))
        * num_complex::Complex64::new(0.5, 0.0);
    QubitState::from_matrix(rho).expect("constructed state is valid")
}

fn random_rotation<R: Rng>(rng: &mut R) -> SpinRotation {
    SpinRotation {
        axis: random_direction(rng),
        angular_rate: rng.gen::<f64>() * 4.0 - 2.0,
    }
}

#[test]
fn observable_squares_to_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100 {
        let n = random_direction(&mut rng);
        let m = observable(n).matrix;
        let err = (m * m - identity()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(err < TOL);
    }
}

#[test]
fn born_probabilities_sum_to_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..100 {
        let state = random_state(&mut rng);
        let n = random_direction(&mut rng);
        let total = state.born_probability(&n, Outcome::Plus)
            + state.born_probability(&n, Outcome::Minus);
        assert!((total - 1.0).abs() < TOL);
    }
}

#[test]
fn collapse_is_idempotent() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut checked = 0;
    while checked < 100 {
        let state = random_state(&mut rng);
        let n = random_direction(&mut rng);
        let s = if rng.gen::<bool>() { Outcome::Plus } else { Outcome::Minus };
        let Ok(collapsed) = state.collapse(&n, s) else {
            continue;
        };
        assert!((collapsed.born_probability(&n, s) - 1.0).abs() < TOL);
        checked += 1;
    }
}

#[test]
fn evolution_preserves_state_invariants() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100 {
        let state = random_state(&mut rng);
        let rotation = random_rotation(&mut rng);
        let dt = rng.gen::<f64>() * 10.0;
        let evolved = state.evolve(&rotation, dt);
        // re-validates Hermiticity, trace, and positivity
        QubitState::from_matrix(*evolved.matrix()).expect("evolution left the state space");
        let (before_lo, before_hi) = state.eigenvalues();
        let (after_lo, after_hi) = evolved.eigenvalues();
        assert!((before_lo - after_lo).abs() < TOL && (before_hi - after_hi).abs() < TOL);
    }
}

#[test]
fn sequential_correlator_is_state_independent() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let states: Vec<QubitState> = (0..100).map(|_| random_state(&mut rng)).collect();
    let pairs: Vec<(BlochVector, BlochVector)> = (0..100)
        .map(|_| (random_direction(&mut rng), random_direction(&mut rng)))
        .collect();
    let frozen = SpinRotation::identity();
    for (first, second) in &pairs {
        let dot = first.dot(second);
        for state in &states {
            let p = sequential_correlator(state, first, second, &frozen, 1.0);
            assert!((p - dot).abs() < TOL, "correlator {p} vs dot product {dot}");
        }
    }
}

#[test]
fn sequential_correlator_is_symmetric_and_bounded() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let frozen = SpinRotation::identity();
    for _ in 0..100 {
        let state = random_state(&mut rng);
        let u = random_direction(&mut rng);
        let v = random_direction(&mut rng);
        let uv = sequential_correlator(&state, &u, &v, &frozen, 1.0);
        let vu = sequential_correlator(&state, &v, &u, &frozen, 1.0);
        assert!((uv - vu).abs() < TOL);
        assert!(uv.abs() <= 1.0 + TOL);
    }
}

#[test]
fn correlator_depends_only_on_time_difference() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let state = random_state(&mut rng);
        let first = random_direction(&mut rng);
        let second = random_direction(&mut rng);
        let rotation = random_rotation(&mut rng);
        let t1 = rng.gen::<f64>() * 5.0;
        let t2 = t1 + rng.gen::<f64>() * 5.0;
        let shift = rng.gen::<f64>() * 10.0 - 5.0;
        let unshifted = sequential_correlator_at(&state, &first, &second, &rotation, t1, t2);
        let shifted =
            sequential_correlator_at(&state, &first, &second, &rotation, t1 + shift, t2 + shift);
        assert!((unshifted - shifted).abs() < TOL);
    }
}

#[test]
fn closed_form_matches_branch_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let frozen = SpinRotation::identity();
    let mixed = QubitState::maximally_mixed();
    for _ in 0..100 {
        let a = random_direction(&mut rng);
        let b = random_direction(&mut rng);
        let c = random_direction(&mut rng);
        let set = quantum_correlation_set(&a, &b, &c);
        assert!((set.p_ab - sequential_correlator(&mixed, &a, &b, &frozen, 1.0)).abs() < TOL);
        assert!((set.p_ac - sequential_correlator(&mixed, &a, &c, &frozen, 2.0)).abs() < TOL);
        assert!((set.p_bc - sequential_correlator(&mixed, &b, &c, &frozen, 1.0)).abs() < TOL);
    }
}

#[test]
fn quantum_functional_is_rotation_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..100 {
        let (a, b, c) = (
            random_direction(&mut rng),
            random_direction(&mut rng),
            random_direction(&mut rng),
        );
        let rotation = random_rotation(&mut rng);
        let angle = rng.gen::<f64>() * std::f64::consts::TAU;
        // rotate a Bloch vector by conjugating its pure state
        let rotate = |v: &BlochVector| {
            let rotated = QubitState::pure_along(v).evolve(&rotation, angle / rotation.angular_rate.abs().max(1e-3));
            // read the Bloch components back from the density matrix
            let m = rotated.matrix();
            BlochVector::new(
                2.0 * m[(1, 0)].re,
                2.0 * m[(1, 0)].im,
                m[(0, 0)].re - m[(1, 1)].re,
            )
            .expect("rotation preserves unit length")
        };
        let before = quantum_functional(&a, &b, &c);
        let after = quantum_functional(&rotate(&a), &rotate(&b), &rotate(&c));
        assert!((before - after).abs() < TOL, "{before} vs {after}");
    }
}

#[test]
fn functional_definitional_consistency() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..100 {
        let (a, b, c) = (
            random_direction(&mut rng),
            random_direction(&mut rng),
            random_direction(&mut rng),
        );
        let direct = quantum_functional(&a, &b, &c);
        let via_set = bell_functional(&quantum_correlation_set(&a, &b, &c));
        assert!((direct - via_set).abs() < 1e-15);
    }
}

#[test]
fn deterministic_models_never_violate() {
    // all 8 extreme points
    for index in 0..8 {
        let set = mixture_correlations(&StrategyMixture::point_mass(index));
        let report = check_inequality(&set);
        assert!(!report.violated);
        assert!(report.margin <= TOL);
    }
    // 1000 random mixtures
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let mixture = StrategyMixture::random(&mut rng);
        let report = check_inequality(&mixture_correlations(&mixture));
        assert!(!report.violated);
        assert!(report.margin <= TOL);
        assert!(verify_derivation_chain(&mixture).all_pass());
    }
}

#[test]
fn estimator_is_consistent_across_seeds() {
    let directions = DirectionTriple::sqrt2_instance();
    let exact = quantum_correlation_set(&directions.a, &directions.b, &directions.c);
    let mut misses = 0u32;
    let repetitions = 100;
    for seed in 0..repetitions {
        let config = ExperimentConfig {
            directions,
            times: [0.0, 1.0, 2.0],
            initial_state: QubitState::maximally_mixed(),
            rotation: SpinRotation::identity(),
            trials: 10_000,
            seed,
        };
        let est = estimate_correlations(&config).unwrap();
        let within = |p: f64, se: f64, truth: f64| (p - truth).abs() <= 4.0 * se;
        let ok = within(est.correlations.p_ab, est.correlations.se_ab, exact.p_ab)
            && within(est.correlations.p_ac, est.correlations.se_ac, exact.p_ac)
            && within(est.correlations.p_bc, est.correlations.se_bc, exact.p_bc);
        if !ok {
            misses += 1;
        }
    }
    assert!(misses <= 1, "{misses} of {repetitions} repetitions outside 4 se");
}

#[test]
fn standard_error_scales_as_inverse_sqrt() {
    let make = |trials| ExperimentConfig {
        directions: DirectionTriple::sqrt2_instance(),
        times: [0.0, 1.0, 2.0],
        initial_state: QubitState::maximally_mixed(),
        rotation: SpinRotation::identity(),
        trials,
        seed: 13,
    };
    let small = estimate_correlations(&make(40_000)).unwrap();
    let large = estimate_correlations(&make(160_000)).unwrap();
    for (se_small, se_large) in [
        (small.correlations.se_ab, large.correlations.se_ab),
        (small.correlations.se_ac, large.correlations.se_ac),
        (small.correlations.se_bc, large.correlations.se_bc),
    ] {
        let ratio = se_small / se_large;
        assert!((ratio - 2.0).abs() < 0.2, "se ratio {ratio} not ~2");
    }
}

#[test]
fn pair_selection_is_uniform() {
    let trials = 90_000u64;
    let config = ExperimentConfig {
        directions: DirectionTriple::sqrt2_instance(),
        times: [0.0, 1.0, 2.0],
        initial_state: QubitState::maximally_mixed(),
        rotation: SpinRotation::identity(),
        trials,
        seed: 21,
    };
    let est = estimate_correlations(&config).unwrap();
    let expected = trials as f64 / 3.0;
    let spread = 4.0 * (trials as f64 * (1.0 / 3.0) * (2.0 / 3.0)).sqrt();
    for count in [est.counts.ab, est.counts.ac, est.counts.bc] {
        assert!(
            (count as f64 - expected).abs() <= spread,
            "pair count {count} outside {expected} +- {spread}"
        );
    }
}

#[test]
fn lhv_experiment_converges_to_mixture_correlations() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mixture = StrategyMixture::random(&mut rng);
    let exact = mixture_correlations(&mixture);
    let est = run_lhv_experiment(&mixture, 200_000, 23).unwrap();
    let within = |p: f64, se: f64, truth: f64| (p - truth).abs() <= 4.0 * se.max(1e-9);
    assert!(within(est.correlations.p_ab, est.correlations.se_ab, exact.p_ab));
    assert!(within(est.correlations.p_ac, est.correlations.se_ac, exact.p_ac));
    assert!(within(est.correlations.p_bc, est.correlations.se_bc, exact.p_bc));
    assert!(!check_inequality(&est.correlations).violated);
}

proptest! {
    #[test]
    fn mixture_correlators_are_convex_combinations(raw in prop::array::uniform8(0.0f64..1.0)) {
        let total: f64 = raw.iter().sum();
        prop_assume!(total > 1e-6);
        let weights: [f64; 8] = std::array::from_fn(|i| raw[i] / total);
        // renormalize the rounding residue onto the first weight
        let mut weights = weights;
        weights[0] += 1.0 - weights.iter().sum::<f64>();
        let mixture = StrategyMixture::new(weights).unwrap();
        let set = mixture_correlations(&mixture);

        let (mut p_ab, mut p_ac, mut p_bc) = (0.0, 0.0, 0.0);
        for (index, w) in weights.iter().enumerate() {
            let extreme = mixture_correlations(&StrategyMixture::point_mass(index));
            p_ab += w * extreme.p_ab;
            p_ac += w * extreme.p_ac;
            p_bc += w * extreme.p_bc;
        }
        prop_assert!((set.p_ab - p_ab).abs() < TOL);
        prop_assert!((set.p_ac - p_ac).abs() < TOL);
        prop_assert!((set.p_bc - p_bc).abs() < TOL);
    }

    #[test]
    fn functional_invariant_under_simultaneous_sign_flip(
        p_ab in -1.0f64..1.0,
        p_ac in -1.0f64..1.0,
        p_bc in -1.0f64..1.0,
    ) {
        let original = bell_functional(&CorrelationSet::exact(p_ab, p_ac, p_bc));
        let flipped = bell_functional(&CorrelationSet::exact(-p_ab, -p_ac, p_bc));
        prop_assert!((original - flipped).abs() < TOL);
    }
}
