//! End-to-end learning and serving: scan every ordered device pair,
//! keep the window-DI entries above threshold as per-device causality
//! sets, and answer trigger-time queries from them.
//!
//! A causality set entry `(target, k, i, di)` reads: activity of the
//! source in the window starting at slot `k` carries `di` bits about the
//! target's window starting at slot `k + i`. At prediction time the
//! entries at the trigger slot become ranked claims "target will
//! transmit at `trigger_slot + i`", with confidence `di` and normalized
//! confidence `di / 2` (the window DI maximum is 2 bits).

use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::AtomicU64;

use serde::{Deserialize, Serialize};

use crate::di::{di_matrix_counted, DiMatrix, DI_MAX_BITS};
use crate::error::{Error, Result};
use crate::types::{DeviceId, EventDataset};

/// Default causality threshold ε in bits. Finite-sample DI estimates of
/// independent devices are almost never exactly zero; this floor is
/// calibrated so that independent uniform devices at 10,000 events fall
/// below it in at least 95% of seeds.
pub const DEFAULT_THRESHOLD_BITS: f64 = 0.05;

/// Default minimum number of training events.
pub const DEFAULT_MIN_EVENTS: usize = 50;

/// Current model schema version.
pub const MODEL_VERSION: u32 = 1;

/// One retained causality entry: source slot `k`, forward lag `i`, and
/// the DI in bits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CausalEntry {
    #[serde(rename = "target")]
    pub target_id: DeviceId,
    #[serde(rename = "k")]
    pub slot: usize,
    #[serde(rename = "i")]
    pub lag: usize,
    pub di_bits: f64,
}

/// Entries above threshold for one source device, sorted by descending
/// DI; ties break by smaller lag, then target id, then slot.
#[derive(Debug, Clone, PartialEq)]
pub struct CausalitySet {
    source_id: DeviceId,
    entries: Vec<CausalEntry>,
}

impl CausalitySet {
    /// Filters candidates to `di_bits > threshold_bits` and sorts them
    /// into the canonical order.
    pub fn new(
        source_id: impl Into<DeviceId>,
        candidates: Vec<CausalEntry>,
        threshold_bits: f64,
    ) -> Self {
        let mut entries: Vec<CausalEntry> = candidates
            .into_iter()
            .filter(|e| e.di_bits > threshold_bits)
            .collect();
        entries.sort_by(|a, b| {
            b.di_bits
                .total_cmp(&a.di_bits)
                .then(a.lag.cmp(&b.lag))
                .then(a.target_id.cmp(&b.target_id))
                .then(a.slot.cmp(&b.slot))
        });
        CausalitySet {
            source_id: source_id.into(),
            entries,
        }
    }

    pub fn source_id(&self) -> &DeviceId {
        &self.source_id
    }

    pub fn entries(&self) -> &[CausalEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn into_entries(self) -> Vec<CausalEntry> {
        self.entries
    }
}

/// Provenance stamp for synthetic training data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorStamp {
    pub name: String,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelMetadata {
    pub training_events: usize,
    pub dataset_hash: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorStamp>,
}

/// Trained model: one causality set per device, plus the threshold and
/// dimensions it was built with. Immutable after training.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictorModel {
    version: u32,
    slots_per_event: usize,
    threshold_bits: f64,
    causality_sets: BTreeMap<DeviceId, Vec<CausalEntry>>,
    metadata: ModelMetadata,
}

impl PredictorModel {
    pub fn slots_per_event(&self) -> usize {
        self.slots_per_event
    }

    pub fn threshold_bits(&self) -> f64 {
        self.threshold_bits
    }

    pub fn devices(&self) -> impl Iterator<Item = &DeviceId> {
        self.causality_sets.keys()
    }

    pub fn causality_set(&self, device: &DeviceId) -> Option<&[CausalEntry]> {
        self.causality_sets.get(device).map(Vec::as_slice)
    }

    pub fn metadata(&self) -> &ModelMetadata {
        &self.metadata
    }
}

/// Training options; the defaults mirror the library constants.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub threshold_bits: f64,
    pub min_events: usize,
    /// Add-α smoothing applied to every window estimate; 0 keeps the
    /// plain frequency estimates.
    pub smoothing_alpha: f64,
    pub generator: Option<GeneratorStamp>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            threshold_bits: DEFAULT_THRESHOLD_BITS,
            min_events: DEFAULT_MIN_EVENTS,
            smoothing_alpha: 0.0,
            generator: None,
        }
    }
}

/// Model plus the full DI matrices it was distilled from.
#[derive(Debug, Clone)]
pub struct TrainOutput {
    pub model: PredictorModel,
    pub matrices: Vec<DiMatrix>,
}

/// Trains with the default options at the given threshold.
pub fn train(dataset: &EventDataset, threshold_bits: f64) -> Result<PredictorModel> {
    let config = TrainConfig {
        threshold_bits,
        ..TrainConfig::default()
    };
    Ok(train_with(dataset, &config)?.model)
}

/// Runs the full scan: one DI matrix per ordered device pair (M(M-1)
/// matrices), distilled into causality sets of entries above threshold.
pub fn train_with(dataset: &EventDataset, config: &TrainConfig) -> Result<TrainOutput> {
    let report = dataset.validate();
    if !report.is_empty() {
        return Err(Error::InvalidDataset(report));
    }
    if dataset.num_events() < config.min_events {
        return Err(Error::InsufficientEvents {
            have: dataset.num_events(),
            need: config.min_events,
        });
    }
    if dataset.slots_per_event() < 2 {
        return Err(Error::InvalidConfig(
            "training needs at least 2 slots per event".into(),
        ));
    }
    // NaN must fail this check too.
    if config.threshold_bits.is_nan() || config.threshold_bits < 0.0 {
        return Err(Error::InvalidConfig(format!(
            "threshold must be non-negative, got {}",
            config.threshold_bits
        )));
    }

    let counter = AtomicU64::new(0);
    let ids: Vec<DeviceId> = dataset.device_ids().cloned().collect();
    let mut matrices = Vec::with_capacity(ids.len() * ids.len().saturating_sub(1));
    let mut candidates: BTreeMap<DeviceId, Vec<CausalEntry>> = BTreeMap::new();
    for source in &ids {
        candidates.entry(source.clone()).or_default();
        for target in &ids {
            if source == target {
                continue;
            }
            let matrix =
                di_matrix_counted(dataset, source, target, config.smoothing_alpha, &counter)?;
            let bucket = candidates.entry(source.clone()).or_default();
            for (slot, lag, di_bits) in matrix.iter() {
                bucket.push(CausalEntry {
                    target_id: target.clone(),
                    slot,
                    lag,
                    di_bits,
                });
            }
            matrices.push(matrix);
        }
    }

    let causality_sets = candidates
        .into_iter()
        .map(|(source, raw)| {
            let set = CausalitySet::new(source.clone(), raw, config.threshold_bits);
            (source, set.into_entries())
        })
        .collect();

    let model = PredictorModel {
        version: MODEL_VERSION,
        slots_per_event: dataset.slots_per_event(),
        threshold_bits: config.threshold_bits,
        causality_sets,
        metadata: ModelMetadata {
            training_events: dataset.num_events(),
            dataset_hash: dataset.content_hash(),
            generator: config.generator.clone(),
        },
    };
    Ok(TrainOutput { model, matrices })
}

/// A ranked claim that `target_id` will transmit at `predicted_slot`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub target_id: DeviceId,
    /// Absolute slot index within the ongoing event; never exceeds the
    /// event length.
    pub predicted_slot: usize,
    /// DI behind the claim, in bits.
    pub confidence: f64,
    /// `confidence / 2`, in `[0, 1]`.
    pub normalized_confidence: f64,
}

/// Answers a trigger observed at `trigger_slot`: emits one claim per
/// causality entry at that slot (or, if the slot has no entries, at the
/// nearest smaller slot that has some), sorted by descending confidence.
/// Claims that would land past the event end are dropped.
pub fn predict(
    model: &PredictorModel,
    trigger: &DeviceId,
    trigger_slot: usize,
) -> Result<Vec<Prediction>> {
    let entries = model
        .causality_set(trigger)
        .ok_or_else(|| Error::UnknownDevice(trigger.clone()))?;
    if trigger_slot == 0 || trigger_slot > model.slots_per_event() {
        return Err(Error::SlotOutOfRange {
            slot: trigger_slot,
            max: model.slots_per_event(),
        });
    }
    let Some(effective_slot) = entries
        .iter()
        .map(|e| e.slot)
        .filter(|&s| s <= trigger_slot)
        .max()
    else {
        return Ok(Vec::new());
    };
    // Entries are stored in ranked order already; filtering keeps it.
    let predictions = entries
        .iter()
        .filter(|e| e.slot == effective_slot)
        .filter_map(|e| {
            let predicted_slot = trigger_slot + e.lag;
            (predicted_slot <= model.slots_per_event()).then(|| Prediction {
                target_id: e.target_id.clone(),
                predicted_slot,
                confidence: e.di_bits,
                normalized_confidence: e.di_bits / DI_MAX_BITS,
            })
        })
        .collect();
    Ok(predictions)
}

/// Per-device outcome of an evaluation run.
///
/// `recall` is the device-level hit rate: of the events in which the
/// device was predicted to transmit, the fraction in which it actually
/// did. `precision` is the slot-level accuracy of the issued claims (one
/// claim per target and event, the highest-confidence one): the fraction
/// that named a slot the device really transmitted in. With no claims
/// precision is undefined and reported as 1.0 with the flag cleared.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceMetrics {
    pub events_predicted: usize,
    pub events_transmitted: usize,
    pub events_hit: usize,
    pub slot_claims: usize,
    pub slot_hits: usize,
    pub precision: f64,
    pub precision_defined: bool,
    pub recall: f64,
    pub f1: f64,
    /// Fraction of the device's transmission events that were predicted.
    pub coverage: f64,
}

/// Evaluation against held-out events: per-event the earliest
/// transmitting device acts as trigger, the model predicts, and claims
/// are scored against the realized bits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub events_evaluated: usize,
    /// Events skipped because no device transmitted.
    pub events_skipped: usize,
    pub confidence_floor_bits: f64,
    pub per_device: BTreeMap<DeviceId, DeviceMetrics>,
    /// Mean normalized confidence over slot-correct claims.
    pub mean_confidence_true_positive: f64,
    /// Mean normalized confidence over slot-incorrect claims.
    pub mean_confidence_false_positive: f64,
}

struct Tally {
    events_predicted: usize,
    events_transmitted: usize,
    events_hit: usize,
    slot_claims: usize,
    slot_hits: usize,
}

/// Scores the model on a holdout dataset, keeping only claims with
/// confidence (in bits) at or above `confidence_floor_bits`.
pub fn evaluate(
    model: &PredictorModel,
    holdout: &EventDataset,
    confidence_floor_bits: f64,
) -> Result<EvaluationReport> {
    if holdout.slots_per_event() != model.slots_per_event() {
        return Err(Error::SchemaMismatch(format!(
            "holdout has {} slots per event, model expects {}",
            holdout.slots_per_event(),
            model.slots_per_event()
        )));
    }
    let holdout_ids: BTreeSet<&DeviceId> = holdout.device_ids().collect();
    let model_ids: BTreeSet<&DeviceId> = model.devices().collect();
    if holdout_ids != model_ids {
        return Err(Error::SchemaMismatch(
            "holdout and model device sets differ".into(),
        ));
    }
    let report = holdout.validate();
    if !report.is_empty() {
        return Err(Error::InvalidDataset(report));
    }

    let slots = holdout.slots_per_event();
    let mut tallies: BTreeMap<DeviceId, Tally> = holdout
        .device_ids()
        .map(|id| {
            (
                id.clone(),
                Tally {
                    events_predicted: 0,
                    events_transmitted: 0,
                    events_hit: 0,
                    slot_claims: 0,
                    slot_hits: 0,
                },
            )
        })
        .collect();
    let mut tp_conf_sum = 0.0;
    let mut tp_count = 0usize;
    let mut fp_conf_sum = 0.0;
    let mut fp_count = 0usize;
    let mut evaluated = 0usize;
    let mut skipped = 0usize;

    for event in 0..holdout.num_events() {
        // Earliest transmitting device; slot ties break by device id.
        let trigger = holdout
            .devices()
            .iter()
            .filter_map(|trace| {
                (1..=slots)
                    .find(|&s| trace.bit(event, s) != 0)
                    .map(|s| (s, trace.device_id().clone()))
            })
            .min();
        let Some((trigger_slot, trigger_id)) = trigger else {
            skipped += 1;
            continue;
        };
        evaluated += 1;

        // One claim per target: the highest-confidence one above floor.
        let mut top_claims: BTreeMap<DeviceId, &Prediction> = BTreeMap::new();
        let predictions = predict(model, &trigger_id, trigger_slot)?;
        for prediction in &predictions {
            if prediction.confidence < confidence_floor_bits {
                continue;
            }
            top_claims
                .entry(prediction.target_id.clone())
                .or_insert(prediction);
        }

        for trace in holdout.devices() {
            let device = trace.device_id();
            if device == &trigger_id {
                continue;
            }
            let transmitted = (1..=slots).any(|s| trace.bit(event, s) != 0);
            let tally = tallies.get_mut(device).expect("device tallied");
            if transmitted {
                tally.events_transmitted += 1;
            }
            if let Some(claim) = top_claims.get(device) {
                tally.events_predicted += 1;
                if transmitted {
                    tally.events_hit += 1;
                }
                tally.slot_claims += 1;
                if trace.bit(event, claim.predicted_slot) != 0 {
                    tally.slot_hits += 1;
                    tp_conf_sum += claim.normalized_confidence;
                    tp_count += 1;
                } else {
                    fp_conf_sum += claim.normalized_confidence;
                    fp_count += 1;
                }
            }
        }
    }

    let per_device = tallies
        .into_iter()
        .map(|(device, t)| {
            let precision_defined = t.slot_claims > 0;
            let precision = if precision_defined {
                t.slot_hits as f64 / t.slot_claims as f64
            } else {
                1.0
            };
            let recall = if t.events_predicted > 0 {
                t.events_hit as f64 / t.events_predicted as f64
            } else {
                0.0
            };
            let f1 = if precision + recall > 0.0 {
                2.0 * precision * recall / (precision + recall)
            } else {
                0.0
            };
            let coverage = if t.events_transmitted > 0 {
                t.events_hit as f64 / t.events_transmitted as f64
            } else {
                0.0
            };
            (
                device,
                DeviceMetrics {
                    events_predicted: t.events_predicted,
                    events_transmitted: t.events_transmitted,
                    events_hit: t.events_hit,
                    slot_claims: t.slot_claims,
                    slot_hits: t.slot_hits,
                    precision,
                    precision_defined,
                    recall,
                    f1,
                    coverage,
                },
            )
        })
        .collect();

    Ok(EvaluationReport {
        events_evaluated: evaluated,
        events_skipped: skipped,
        confidence_floor_bits,
        per_device,
        mean_confidence_true_positive: if tp_count > 0 {
            tp_conf_sum / tp_count as f64
        } else {
            0.0
        },
        mean_confidence_false_positive: if fp_count > 0 {
            fp_conf_sum / fp_count as f64
        } else {
            0.0
        },
    })
}

/// Serializes a model to its versioned JSON form (pretty-printed, keys
/// in stable order, trailing newline). Byte-identical for equal models.
pub fn save_model(model: &PredictorModel) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(model).expect("model serializes");
    bytes.push(b'\n');
    bytes
}

/// Parses a serialized model, rejecting unknown schema versions.
pub fn load_model(bytes: &[u8]) -> Result<PredictorModel> {
    let model: PredictorModel =
        serde_json::from_slice(bytes).map_err(|e| Error::MalformedModel(e.to_string()))?;
    if model.version != MODEL_VERSION {
        return Err(Error::ModelVersion(model.version));
    }
    Ok(model)
}
