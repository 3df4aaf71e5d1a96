//! Simulated realization of the sequential-measurement experiment: repeated
//! preparation, uniform selection of one of the three context pairs, two
//! projective measurements in time order, and frequency estimates of the
//! three correlators with standard errors.
//!
//! Reproducibility contract: trial `t` draws from substream `t` of the master
//! seed (ChaCha stream index), and per-pair accumulators are integer sums, so
//! estimates are bit-identical for any shard count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::correlators::CorrelationSet;
use crate::error::{Error, Result};
use crate::lhv::{sample_strategy, DeterministicStrategy, MeasurementContext, StrategyMixture};
use crate::optimizer::DirectionTriple;
use crate::qubit::{BlochVector, Outcome, QubitState, SpinRotation};

/// Which two of the three measurement contexts a trial exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairLabel {
    Ab,
    Ac,
    Bc,
}

impl PairLabel {
    pub const ALL: [PairLabel; 3] = [PairLabel::Ab, PairLabel::Ac, PairLabel::Bc];

    /// Context indices (0-based into `MeasurementContext::ALL`), time-ordered.
    fn context_indices(self) -> (usize, usize) {
        match self {
            PairLabel::Ab => (0, 1),
            PairLabel::Ac => (0, 2),
            PairLabel::Bc => (1, 2),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PairLabel::Ab => "ab",
            PairLabel::Ac => "ac",
            PairLabel::Bc => "bc",
        }
    }
}

/// Full configuration of one simulated experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub directions: DirectionTriple,
    /// The three standing measurement times, strictly increasing.
    pub times: [f64; 3],
    #[serde(skip, default = "QubitState::maximally_mixed")]
    pub initial_state: QubitState,
    pub rotation: SpinRotation,
    pub trials: u64,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.times[0] < self.times[1] && self.times[1] < self.times[2]) {
            return Err(Error::InvalidParameter(format!(
                "times {:?} must be strictly increasing",
                self.times
            )));
        }
        if self.trials < 1 {
            return Err(Error::InvalidParameter("trials must be >= 1".into()));
        }
        Ok(())
    }

    fn direction(&self, context: MeasurementContext) -> &BlochVector {
        match context.time_index {
            1 => &self.directions.a,
            2 => &self.directions.b,
            _ => &self.directions.c,
        }
    }
}

/// One trial: the selected pair and the two outcomes in time order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub pair: PairLabel,
    pub first_outcome: Outcome,
    pub second_outcome: Outcome,
    pub product: i8,
}

/// Trials received per pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairCounts {
    pub ab: u64,
    pub ac: u64,
    pub bc: u64,
}

/// Sample means with dichotomic-variable standard errors
/// se = sqrt((1 - p^2) / n).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EstimatedCorrelations {
    pub correlations: CorrelationSet,
    pub counts: PairCounts,
}

/// Independent generator for one trial: substream `trial` of the master seed.
fn trial_rng(base: &ChaCha8Rng, trial: u64) -> ChaCha8Rng {
    let mut rng = base.clone();
    rng.set_stream(trial);
    rng
}

fn pick_pair<R: Rng>(rng: &mut R) -> PairLabel {
    PairLabel::ALL[rng.gen_range(0..3)]
}

fn sample_outcome<R: Rng>(state: &QubitState, n: &BlochVector, rng: &mut R) -> Outcome {
    let p_plus = state.born_probability(n, Outcome::Plus);
    if rng.gen::<f64>() < p_plus {
        Outcome::Plus
    } else {
        Outcome::Minus
    }
}

/// Runs one trial of the quantum experiment: uniform pair selection, Born
/// sampling and collapse at the earlier context, precession over the
/// inter-measurement interval, then the second measurement.
pub fn run_trial<R: Rng>(config: &ExperimentConfig, rng: &mut R) -> TrialRecord {
    let pair = pick_pair(rng);
    run_trial_for_pair(config, pair, rng)
}

fn run_trial_for_pair<R: Rng>(
    config: &ExperimentConfig,
    pair: PairLabel,
    rng: &mut R,
) -> TrialRecord {
    let (i, j) = pair.context_indices();
    let (first_ctx, second_ctx) = (MeasurementContext::ALL[i], MeasurementContext::ALL[j]);
    let first_dir = config.direction(first_ctx);
    let second_dir = config.direction(second_ctx);
    let dt = config.times[j] - config.times[i];

    let first_outcome = sample_outcome(&config.initial_state, first_dir, rng);
    let evolved = config
        .initial_state
        .collapse(first_dir, first_outcome)
        .expect("sampled outcome has positive probability")
        .evolve(&config.rotation, dt);
    let second_outcome = sample_outcome(&evolved, second_dir, rng);

    TrialRecord {
        pair,
        first_outcome,
        second_outcome,
        product: first_outcome.value() * second_outcome.value(),
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct PairAccumulator {
    count: u64,
    product_sum: i64,
}

impl PairAccumulator {
    fn record(&mut self, product: i8) {
        self.count += 1;
        self.product_sum += i64::from(product);
    }

    fn merge(&mut self, other: &PairAccumulator) {
        self.count += other.count;
        self.product_sum += other.product_sum;
    }
}

fn finish(accumulators: [PairAccumulator; 3]) -> Result<EstimatedCorrelations> {
    let mut p = [0.0; 3];
    let mut se = [0.0; 3];
    for (k, acc) in accumulators.iter().enumerate() {
        if acc.count == 0 {
            return Err(Error::InsufficientTrials {
                pair: PairLabel::ALL[k].name(),
            });
        }
        let mean = acc.product_sum as f64 / acc.count as f64;
        p[k] = mean;
        se[k] = ((1.0 - mean * mean).max(0.0) / acc.count as f64).sqrt();
    }
    Ok(EstimatedCorrelations {
        correlations: CorrelationSet::estimated(p, se),
        counts: PairCounts {
            ab: accumulators[0].count,
            ac: accumulators[1].count,
            bc: accumulators[2].count,
        },
    })
}

fn shard_ranges(trials: u64, shards: u32) -> impl Iterator<Item = (u64, u64)> {
    let shards = u64::from(shards.max(1)).min(trials.max(1));
    let chunk = trials / shards;
    let remainder = trials % shards;
    (0..shards).map(move |s| {
        let start = s * chunk + s.min(remainder);
        let len = chunk + u64::from(s < remainder);
        (start, start + len)
    })
}

fn accumulate<F>(trials: u64, shards: u32, mut run: F) -> [PairAccumulator; 3]
where
    F: FnMut(u64) -> (PairLabel, i8),
{
    let mut totals = [PairAccumulator::default(); 3];
    for (start, end) in shard_ranges(trials, shards) {
        let mut local = [PairAccumulator::default(); 3];
        for t in start..end {
            let (pair, product) = run(t);
            let k = PairLabel::ALL.iter().position(|p| *p == pair).unwrap();
            local[k].record(product);
        }
        for (total, part) in totals.iter_mut().zip(local.iter()) {
            total.merge(part);
        }
    }
    totals
}

/// Runs `config.trials` independent quantum trials and returns per-pair sample
/// means, standard errors, and counts.
pub fn estimate_correlations(config: &ExperimentConfig) -> Result<EstimatedCorrelations> {
    estimate_correlations_sharded(config, 1)
}

/// Sharded version; the result is bit-identical for every shard count.
pub fn estimate_correlations_sharded(
    config: &ExperimentConfig,
    shards: u32,
) -> Result<EstimatedCorrelations> {
    config.validate()?;
    let base = ChaCha8Rng::seed_from_u64(config.seed);
    let totals = accumulate(config.trials, shards, |t| {
        let mut rng = trial_rng(&base, t);
        let record = run_trial(config, &mut rng);
        (record.pair, record.product)
    });
    finish(totals)
}

/// Same protocol with outcomes drawn from sampled deterministic strategies
/// instead of quantum measurement.
pub fn run_lhv_experiment(
    mixture: &StrategyMixture,
    trials: u64,
    seed: u64,
) -> Result<EstimatedCorrelations> {
    run_lhv_experiment_sharded(mixture, trials, seed, 1)
}

pub fn run_lhv_experiment_sharded(
    mixture: &StrategyMixture,
    trials: u64,
    seed: u64,
    shards: u32,
) -> Result<EstimatedCorrelations> {
    if trials < 1 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    let base = ChaCha8Rng::seed_from_u64(seed);
    let totals = accumulate(trials, shards, |t| {
        let mut rng = trial_rng(&base, t);
        let pair = pick_pair(&mut rng);
        let strategy: DeterministicStrategy = sample_strategy(mixture, &mut rng);
        let (i, j) = pair.context_indices();
        let first = strategy.outcome(MeasurementContext::ALL[i]);
        let second = strategy.outcome(MeasurementContext::ALL[j]);
        (pair, first.value() * second.value())
    });
    finish(totals)
}
