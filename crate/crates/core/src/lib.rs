//! Directed-information learning for event-driven device traffic.
//!
//! Fleets of machine-type devices that observe the same physical events
//! produce correlated bursts of uplink scheduling requests. This crate
//! learns those correlations from per-event binary transmission histories
//! and turns them into trigger-time predictions: once one device starts
//! transmitting, which other devices are likely to request uplink
//! resources, at which future slots, and with what confidence.
//!
//! The causal strength measure is directed information (DI) between
//! two-slot windows of the source and target histories, swept over every
//! slot and forward lag. Window DI is bounded by 2 bits, so confidences
//! normalize cleanly to `[0, 1]`.
//!
//! Pipeline: [`datagen`] produces seeded synthetic datasets, [`prob`]
//! estimates multivariate Bernoulli tables from event samples, [`di`]
//! evaluates entropies and the DI kernels, and [`predictor`] runs the
//! full scan, keeps the causality sets, and serves predictions.

pub mod datagen;
pub mod di;
pub mod error;
pub mod predictor;
pub mod prob;
pub mod types;

pub use datagen::{
    four_device_scenario, generate, Coupling, DeviceProfile, GeneratorConfig, GENERATOR_NAME,
};
pub use di::{
    di_matrix, entropy, entropy_eval_count, entropy_evaluations, full_di_oracle, pairwise_di,
    pairwise_di_from_joint, reset_entropy_evaluations, DiMatrix, PairwiseDi, WindowEntropies,
    DI_MAX_BITS,
};
pub use error::{Error, Result};
pub use predictor::{
    evaluate, load_model, predict, save_model, train, train_with, CausalEntry, CausalitySet,
    DeviceMetrics, EvaluationReport, GeneratorStamp, ModelMetadata, Prediction, PredictorModel,
    TrainConfig, TrainOutput, DEFAULT_MIN_EVENTS, DEFAULT_THRESHOLD_BITS,
};
pub use prob::{
    estimate_joint, estimate_joint_smoothed, marginalize, JointDistribution, VariableSelector,
    MAX_JOINT_ARITY,
};
pub use types::{ActivityTrace, DeviceId, EventDataset, ValidationReport, Violation};
