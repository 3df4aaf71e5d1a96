//! Deterministic hidden-variable models: the eight outcome strategies, finite
//! mixtures over them, their correlation sets, the derivation-chain check, and
//! the brute-force classical bound.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::correlators::CorrelationSet;
use crate::error::{Error, Result};
use crate::qubit::{Outcome, TOL};

/// The fixed time/direction binding: context 1 measures along A at t1,
/// context 2 along B at t2, context 3 along C at t3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DirectionLabel {
    A,
    B,
    C,
}

/// A (time, direction) pair at which an outcome is defined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementContext {
    pub time_index: u8,
    pub label: DirectionLabel,
}

impl MeasurementContext {
    /// The three contexts in time order, with the hard-coded bijection
    /// (1, A), (2, B), (3, C).
    pub const ALL: [MeasurementContext; 3] = [
        MeasurementContext { time_index: 1, label: DirectionLabel::A },
        MeasurementContext { time_index: 2, label: DirectionLabel::B },
        MeasurementContext { time_index: 3, label: DirectionLabel::C },
    ];
}

/// One lambda equivalence class: a complete +-1 assignment to the three
/// measurement contexts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeterministicStrategy {
    pub s1: Outcome,
    pub s2: Outcome,
    pub s3: Outcome,
}

impl DeterministicStrategy {
    pub fn new(s1: i8, s2: i8, s3: i8) -> Self {
        Self {
            s1: Outcome::from_sign(s1),
            s2: Outcome::from_sign(s2),
            s3: Outcome::from_sign(s3),
        }
    }

    pub fn outcome(&self, context: MeasurementContext) -> Outcome {
        match context.time_index {
            1 => self.s1,
            2 => self.s2,
            _ => self.s3,
        }
    }

    /// Integer sign products (s1*s2, s1*s3, s2*s3).
    pub fn products(&self) -> (i64, i64, i64) {
        let (s1, s2, s3) = (
            i64::from(self.s1.value()),
            i64::from(self.s2.value()),
            i64::from(self.s3.value()),
        );
        (s1 * s2, s1 * s3, s2 * s3)
    }
}

pub const STRATEGY_COUNT: usize = 8;

/// All 2^3 strategies, s1 major and s3 minor: index 0 is (+1,+1,+1), index 7
/// is (-1,-1,-1).
pub fn enumerate_strategies() -> [DeterministicStrategy; STRATEGY_COUNT] {
    let sign = |bit: usize| if bit == 0 { 1 } else { -1 };
    std::array::from_fn(|i| {
        DeterministicStrategy::new(sign(i >> 2 & 1), sign(i >> 1 & 1), sign(i & 1))
    })
}

/// A probability distribution over the eight deterministic strategies; the
/// discretized density over hidden initial conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyMixture {
    weights: [f64; STRATEGY_COUNT],
}

impl StrategyMixture {
    pub fn new(weights: [f64; STRATEGY_COUNT]) -> Result<Self> {
        if let Some(w) = weights.iter().find(|w| **w < 0.0 || !w.is_finite()) {
            return Err(Error::InvalidMixture(format!("weight {w} is not a probability")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > TOL {
            return Err(Error::InvalidMixture(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { weights })
    }

    /// All mass on the strategy at `index` in enumeration order.
    pub fn point_mass(index: usize) -> Self {
        let mut weights = [0.0; STRATEGY_COUNT];
        weights[index] = 1.0;
        Self { weights }
    }

    pub fn uniform() -> Self {
        Self {
            weights: [1.0 / STRATEGY_COUNT as f64; STRATEGY_COUNT],
        }
    }

    /// A random point of the 8-simplex (normalized uniform draws).
    pub fn random<R: Rng>(rng: &mut R) -> Self {
        let mut weights: [f64; STRATEGY_COUNT] = std::array::from_fn(|_| rng.gen::<f64>());
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        Self { weights }
    }

    pub fn weights(&self) -> &[f64; STRATEGY_COUNT] {
        &self.weights
    }
}

/// The three expectation values of a mixture: weighted sign products over the
/// strategy simplex. Exact, so standard errors are zero.
pub fn mixture_correlations(mixture: &StrategyMixture) -> CorrelationSet {
    let strategies = enumerate_strategies();
    let (mut p_ab, mut p_ac, mut p_bc) = (0.0, 0.0, 0.0);
    for (w, strategy) in mixture.weights.iter().zip(strategies.iter()) {
        let (ab, ac, bc) = strategy.products();
        p_ab += w * ab as f64;
        p_ac += w * ac as f64;
        p_bc += w * bc as f64;
    }
    CorrelationSet::exact(p_ab, p_ac, p_bc)
}

/// Numerical check of the derivation chain from the correlator difference to
/// the temporal Bell inequality, evaluated on one mixture.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DerivationReport {
    /// |(P(a,b)-P(a,c)) - sum_l w(l) s1 s2 (1 - s2 s3)|, should be ~0.
    pub identity_error: f64,
    pub identity_ok: bool,
    /// sum_l w(l)(1 - s2 s3) - |P(a,b)-P(a,c)|, should be >= 0.
    pub absolute_value_margin: f64,
    pub absolute_value_ok: bool,
    /// (1 - P(b,c)) - |P(a,b)-P(a,c)|, should be >= 0.
    pub bell_margin: f64,
    pub bell_ok: bool,
}

impl DerivationReport {
    pub fn all_pass(&self) -> bool {
        self.identity_ok && self.absolute_value_ok && self.bell_ok
    }
}

pub fn verify_derivation_chain(mixture: &StrategyMixture) -> DerivationReport {
    let correlations = mixture_correlations(mixture);
    let difference = correlations.p_ab - correlations.p_ac;

    let strategies = enumerate_strategies();
    let mut factored = 0.0; // sum_l w(l) s1 s2 (1 - s2 s3)
    let mut slack = 0.0; // sum_l w(l) (1 - s2 s3)
    for (w, strategy) in mixture.weights.iter().zip(strategies.iter()) {
        let (ab, _, bc) = strategy.products();
        factored += w * (ab * (1 - bc)) as f64;
        slack += w * (1 - bc) as f64;
    }

    let identity_error = (difference - factored).abs();
    let absolute_value_margin = slack - difference.abs();
    let bell_margin = (1.0 - correlations.p_bc) - difference.abs();

    DerivationReport {
        identity_error,
        identity_ok: identity_error <= TOL,
        absolute_value_margin,
        absolute_value_ok: absolute_value_margin >= -TOL,
        bell_margin,
        bell_ok: bell_margin >= -TOL,
    }
}

/// Max over the eight strategies of |s1 s2 - s1 s3| + s2 s3, in integer
/// arithmetic. This is the classical bound of the inequality; it equals 1.
pub fn classical_max_functional() -> i64 {
    enumerate_strategies()
        .iter()
        .map(|strategy| {
            let (ab, ac, bc) = strategy.products();
            (ab - ac).abs() + bc
        })
        .max()
        .expect("strategy list is non-empty")
}

/// Draws one strategy according to the mixture weights.
pub fn sample_strategy<R: Rng>(mixture: &StrategyMixture, rng: &mut R) -> DeterministicStrategy {
    let strategies = enumerate_strategies();
    let u: f64 = rng.gen();
    let mut cumulative = 0.0;
    for (w, strategy) in mixture.weights.iter().zip(strategies.iter()) {
        cumulative += w;
        if u < cumulative {
            return *strategy;
        }
    }
    // rounding tail
    strategies[STRATEGY_COUNT - 1]
}
