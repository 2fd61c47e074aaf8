//! Empirical multivariate Bernoulli estimation.
//!
//! Each event is one i.i.d. sample of a binary random vector, one
//! coordinate per selected (device, slot) pair. The joint table stores
//! `2^n` outcome probabilities indexed by bitmask, where bit `j` carries
//! the value of variable `j` in selector order. Estimates are plug-in
//! frequencies (`count / E`) by default; optional add-α smoothing is
//! available but off by default so that deterministic relationships hit
//! the exact entropy endpoints.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{DeviceId, EventDataset};

/// Hard cap on joint arity: the DI kernels need at most 4 variables and
/// the full-sequence oracle at most 6, which keeps tables at 64 entries.
pub const MAX_JOINT_ARITY: usize = 6;

/// Names one binary coordinate of the event vector: the given device's
/// indicator at a 1-based slot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableSelector {
    pub device_id: DeviceId,
    pub slot: usize,
}

impl VariableSelector {
    pub fn new(device_id: impl Into<DeviceId>, slot: usize) -> Self {
        VariableSelector {
            device_id: device_id.into(),
            slot,
        }
    }
}

/// Probability table over `n <= 6` binary variables, indexed by outcome
/// bitmask (bit `j` = value of variable `j`).
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    arity: usize,
    probs: Vec<f64>,
    support_count: usize,
}

impl JointDistribution {
    /// Validates and stores a table. The length must be a power of two
    /// in `2..=64`, entries must lie in `[0, 1]` and sum to 1 within
    /// 1e-12. Entries within 1e-12 of the boundary are snapped onto it.
    pub fn new(probs: Vec<f64>, support_count: usize) -> Result<Self> {
        let len = probs.len();
        let arity = match len {
            2 => 1,
            4 => 2,
            8 => 3,
            16 => 4,
            32 => 5,
            64 => 6,
            _ => {
                return Err(Error::InvalidDistribution(format!(
                    "table length {len} is not 2^n for n in 1..=6"
                )))
            }
        };
        let mut probs = probs;
        for p in &mut probs {
            if *p < 0.0 {
                if *p < -1e-12 {
                    return Err(Error::InvalidDistribution(format!(
                        "negative probability {p}"
                    )));
                }
                *p = 0.0;
            } else if *p > 1.0 {
                if *p > 1.0 + 1e-12 {
                    return Err(Error::InvalidDistribution(format!(
                        "probability {p} exceeds 1"
                    )));
                }
                *p = 1.0;
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {sum}, expected 1"
            )));
        }
        Ok(JointDistribution {
            arity,
            probs,
            support_count,
        })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn num_outcomes(&self) -> usize {
        self.probs.len()
    }

    /// Probability of the outcome encoded by `mask`.
    pub fn prob(&self, mask: usize) -> f64 {
        self.probs[mask]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Number of samples behind the estimate (0 for analytic tables).
    pub fn support_count(&self) -> usize {
        self.support_count
    }
}

/// Extracts the sub-mask of `mask` at the given bit positions; bit `j`
/// of the result is bit `positions[j]` of the input.
pub(crate) fn project_mask(mask: usize, positions: &[usize]) -> usize {
    positions
        .iter()
        .enumerate()
        .fold(0, |acc, (j, &pos)| acc | (((mask >> pos) & 1) << j))
}

/// Plug-in maximum-likelihood estimate of the joint distribution of the
/// selected coordinates, one sample per event.
pub fn estimate_joint(
    dataset: &EventDataset,
    selectors: &[VariableSelector],
) -> Result<JointDistribution> {
    estimate_joint_smoothed(dataset, selectors, 0.0)
}

/// Like [`estimate_joint`] but adds `alpha` pseudo-counts to each of the
/// `2^n` outcomes before normalizing. `alpha = 0` reproduces the plain
/// frequency estimate.
pub fn estimate_joint_smoothed(
    dataset: &EventDataset,
    selectors: &[VariableSelector],
    alpha: f64,
) -> Result<JointDistribution> {
    if selectors.is_empty() {
        return Err(Error::EmptySelectors);
    }
    if selectors.len() > MAX_JOINT_ARITY {
        return Err(Error::TooManyVariables(selectors.len()));
    }
    // NaN must fail this check too.
    if alpha.is_nan() || alpha < 0.0 {
        return Err(Error::NegativeSmoothing(alpha));
    }
    let num_events = dataset.num_events();
    if num_events == 0 {
        return Err(Error::NoEvents);
    }
    let mut columns = Vec::with_capacity(selectors.len());
    for sel in selectors {
        let trace = dataset
            .trace(&sel.device_id)
            .ok_or_else(|| Error::UnknownDevice(sel.device_id.clone()))?;
        if sel.slot == 0 || sel.slot > dataset.slots_per_event() {
            return Err(Error::SlotOutOfRange {
                slot: sel.slot,
                max: dataset.slots_per_event(),
            });
        }
        columns.push((trace, sel.slot));
    }

    let outcomes = 1usize << selectors.len();
    let mut counts = vec![0u64; outcomes];
    for event in 0..num_events {
        let mut mask = 0usize;
        for (j, (trace, slot)) in columns.iter().enumerate() {
            // Any non-zero entry counts as a request.
            if trace.bit(event, *slot) != 0 {
                mask |= 1 << j;
            }
        }
        counts[mask] += 1;
    }

    let denom = num_events as f64 + alpha * outcomes as f64;
    let probs = counts.iter().map(|&c| (c as f64 + alpha) / denom).collect();
    JointDistribution::new(probs, num_events)
}

/// Sums out every variable not listed in `keep`. Variable `j` of the
/// result corresponds to input position `keep[j]`, so the caller controls
/// the output order.
pub fn marginalize(dist: &JointDistribution, keep: &[usize]) -> Result<JointDistribution> {
    if keep.is_empty() {
        return Err(Error::InvalidSubset("keep set is empty".into()));
    }
    for (j, &pos) in keep.iter().enumerate() {
        if pos >= dist.arity() {
            return Err(Error::InvalidSubset(format!(
                "position {pos} out of range for arity {}",
                dist.arity()
            )));
        }
        if keep[..j].contains(&pos) {
            return Err(Error::InvalidSubset(format!("duplicate position {pos}")));
        }
    }
    let mut probs = vec![0.0; 1 << keep.len()];
    for mask in 0..dist.num_outcomes() {
        probs[project_mask(mask, keep)] += dist.prob(mask);
    }
    JointDistribution::new(probs, dist.support_count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::ActivityTrace;

    fn dataset(rows: &[(&str, &[&[u8]])]) -> EventDataset {
        let traces: Vec<ActivityTrace> = rows
            .iter()
            .map(|(id, rs)| ActivityTrace::new(*id, rs.iter().map(|r| r.to_vec()).collect()))
            .collect();
        let slots = traces[0].slots_per_event();
        let events = traces[0].num_events();
        EventDataset::new(traces, slots, events)
    }

    #[test]
    fn four_distinct_events_give_uniform_table() {
        let ds = dataset(&[
            ("x", &[&[0], &[0], &[1], &[1]]),
            ("y", &[&[0], &[1], &[0], &[1]]),
        ]);
        let sel = [VariableSelector::new("x", 1), VariableSelector::new("y", 1)];
        let joint = estimate_joint(&ds, &sel).unwrap();
        assert_eq!(joint.probs(), &[0.25, 0.25, 0.25, 0.25]);
        assert_eq!(joint.support_count(), 4);
    }

    #[test]
    fn all_zero_dataset_concentrates_on_zero_mask() {
        let ds = dataset(&[("x", &[&[0, 0], &[0, 0], &[0, 0]])]);
        let joint = estimate_joint(&ds, &[VariableSelector::new("x", 2)]).unwrap();
        assert_eq!(joint.probs(), &[1.0, 0.0]);
    }

    #[test]
    fn selector_errors_are_reported() {
        let ds = dataset(&[("x", &[&[0, 1]])]);
        assert!(matches!(
            estimate_joint(&ds, &[]),
            Err(Error::EmptySelectors)
        ));
        let too_many: Vec<_> = (0..7).map(|_| VariableSelector::new("x", 1)).collect();
        assert!(matches!(
            estimate_joint(&ds, &too_many),
            Err(Error::TooManyVariables(7))
        ));
        assert!(matches!(
            estimate_joint(&ds, &[VariableSelector::new("nope", 1)]),
            Err(Error::UnknownDevice(_))
        ));
        assert!(matches!(
            estimate_joint(&ds, &[VariableSelector::new("x", 3)]),
            Err(Error::SlotOutOfRange { slot: 3, max: 2 })
        ));
        let empty = EventDataset::new(vec![ActivityTrace::new("x", vec![])], 2, 0);
        assert!(matches!(
            estimate_joint(&empty, &[VariableSelector::new("x", 1)]),
            Err(Error::NoEvents)
        ));
    }

    #[test]
    fn estimated_marginal_matches_an_independent_count() {
        let ds =
            crate::datagen::generate(&crate::datagen::four_device_scenario(10_000, 77)).unwrap();
        let joint = estimate_joint(&ds, &[VariableSelector::new("X", 1)]).unwrap();
        // Oracle: count the slot-1 requests directly.
        let trace = ds.trace(&"X".into()).unwrap();
        let ones = (0..ds.num_events())
            .filter(|&e| trace.bit(e, 1) == 1)
            .count();
        let expected = ones as f64 / ds.num_events() as f64;
        assert!((joint.prob(1) - expected).abs() <= 1e-15);
        assert!(
            (joint.prob(1) - 0.5).abs() <= 0.02,
            "marginal {}",
            joint.prob(1)
        );
    }

    #[test]
    fn marginalize_uniform_pair_to_single_variable() {
        let joint = JointDistribution::new(vec![0.25; 4], 0).unwrap();
        let m = marginalize(&joint, &[0]).unwrap();
        assert_eq!(m.probs(), &[0.5, 0.5]);
    }

    #[test]
    fn marginalize_point_mass_keeps_the_mass() {
        let joint = JointDistribution::new(vec![0.0, 0.0, 0.0, 1.0], 0).unwrap();
        let m = marginalize(&joint, &[1]).unwrap();
        assert_eq!(m.probs(), &[0.0, 1.0]);
    }

    #[test]
    fn marginalization_matches_direct_estimation() {
        // Two estimation paths over the same events must agree exactly.
        let ds = dataset(&[
            ("x", &[&[1, 0], &[0, 1], &[1, 1], &[0, 0], &[1, 0]]),
            ("y", &[&[0, 1], &[1, 1], &[0, 0], &[1, 0], &[1, 1]]),
        ]);
        let four = [
            VariableSelector::new("x", 1),
            VariableSelector::new("x", 2),
            VariableSelector::new("y", 1),
            VariableSelector::new("y", 2),
        ];
        let joint = estimate_joint(&ds, &four).unwrap();
        let via_marginal = marginalize(&joint, &[0, 2]).unwrap();
        let direct = estimate_joint(&ds, &[four[0].clone(), four[2].clone()]).unwrap();
        for mask in 0..4 {
            assert!((via_marginal.prob(mask) - direct.prob(mask)).abs() <= 1e-12);
        }
    }

    #[test]
    fn marginalize_rejects_bad_subsets() {
        let joint = JointDistribution::new(vec![0.25; 4], 0).unwrap();
        assert!(matches!(
            marginalize(&joint, &[]),
            Err(Error::InvalidSubset(_))
        ));
        assert!(matches!(
            marginalize(&joint, &[2]),
            Err(Error::InvalidSubset(_))
        ));
        assert!(matches!(
            marginalize(&joint, &[0, 0]),
            Err(Error::InvalidSubset(_))
        ));
    }

    #[test]
    fn smoothing_spreads_mass_and_still_normalizes() {
        let ds = dataset(&[("x", &[&[0], &[0]])]);
        let sel = [VariableSelector::new("x", 1)];
        let plain = estimate_joint(&ds, &sel).unwrap();
        assert_eq!(plain.probs(), &[1.0, 0.0]);
        let smoothed = estimate_joint_smoothed(&ds, &sel, 1.0).unwrap();
        assert!((smoothed.prob(0) - 0.75).abs() <= 1e-15);
        assert!((smoothed.prob(1) - 0.25).abs() <= 1e-15);
        assert!(matches!(
            estimate_joint_smoothed(&ds, &sel, -0.5),
            Err(Error::NegativeSmoothing(_))
        ));
    }

    #[test]
    fn estimates_are_rationals_over_event_count() {
        let ds = dataset(&[
            (
                "x",
                &[
                    &[1, 0],
                    &[0, 1],
                    &[1, 1],
                    &[0, 0],
                    &[1, 0],
                    &[0, 1],
                    &[1, 1],
                ],
            ),
            (
                "y",
                &[
                    &[0, 1],
                    &[1, 1],
                    &[0, 0],
                    &[1, 0],
                    &[1, 1],
                    &[0, 1],
                    &[1, 0],
                ],
            ),
        ]);
        let sel = [VariableSelector::new("x", 1), VariableSelector::new("y", 2)];
        let joint = estimate_joint(&ds, &sel).unwrap();
        let e = ds.num_events() as f64;
        for mask in 0..joint.num_outcomes() {
            let scaled = joint.prob(mask) * e;
            assert!((scaled - scaled.round()).abs() <= 1e-9);
        }
    }

    #[test]
    fn table_validation_catches_bad_inputs() {
        assert!(matches!(
            JointDistribution::new(vec![0.5, 0.5, 0.5], 0),
            Err(Error::InvalidDistribution(_))
        ));
        assert!(matches!(
            JointDistribution::new(vec![0.9, 0.2], 0),
            Err(Error::InvalidDistribution(_))
        ));
        assert!(matches!(
            JointDistribution::new(vec![-0.1, 1.1], 0),
            Err(Error::InvalidDistribution(_))
        ));
        // Boundary noise within 1e-12 is snapped, not rejected.
        let d = JointDistribution::new(vec![1.0 + 5e-13, -5e-13], 0).unwrap();
        assert_eq!(d.probs(), &[1.0, 0.0]);
    }
}
