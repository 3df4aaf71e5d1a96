//! Temporal Bell inequality toolkit for a single spin-1/2 particle.
//!
//! Computes exact and sampled two-time spin correlators for sequential
//! projective measurements, enumerates deterministic hidden-variable models
//! to establish the classical bound |P(a,b) - P(a,c)| + P(b,c) <= 1, and
//! demonstrates and maximizes the quantum violation of that bound.

pub mod correlators;
pub mod error;
pub mod inequality;
pub mod lhv;
pub mod montecarlo;
pub mod optimizer;
pub mod qubit;

pub use correlators::{
    quantum_correlation_set, sequential_correlator, sequential_correlator_at, CorrelationSet,
};
pub use error::{Error, Result};
pub use inequality::{
    bell_functional, check_inequality, check_inequality_with, quantum_functional, ViolationReport,
    CLASSICAL_BOUND, DEFAULT_SIGMA_THRESHOLD,
};
pub use lhv::{
    classical_max_functional, enumerate_strategies, mixture_correlations, sample_strategy,
    verify_derivation_chain, DerivationReport, DeterministicStrategy, DirectionLabel,
    MeasurementContext, StrategyMixture,
};
pub use montecarlo::{
    estimate_correlations, estimate_correlations_sharded, run_lhv_experiment,
    run_lhv_experiment_sharded, run_trial, EstimatedCorrelations, ExperimentConfig, PairCounts,
    PairLabel, TrialRecord,
};
pub use optimizer::{
    optimize_directions, refine_triple, sweep_functional, DirectionTriple, OptimizationResult,
    SweepPoint,
};
pub use qubit::{
    make_direction, observable, projector, BlochVector, Outcome, QubitState, SpinObservable,
    SpinRotation,
};
