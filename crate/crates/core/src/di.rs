//! Entropy and directed-information kernels.
//!
//! Directed information from a source sequence to a target sequence is
//! the entropy of the target minus its entropy causally conditioned on
//! the source: it measures how much the source's past and present reduce
//! uncertainty about the target's next symbol, summed along the sequence.
//! Unlike mutual information it is asymmetric, which is what lets it
//! orient the flow of an event through a device fleet.
//!
//! Computing full-sequence DI needs every joint distribution along the
//! way, which is exponential in the sequence length. The production
//! kernel here therefore works on two-slot windows: for source window
//! (X1, X2) and target window (Y1, Y2),
//!
//! ```text
//! DI = I(X1; Y1) + I(X1 X2; Y2 | Y1)
//!    = H(X1) - H(X1 Y1) + H(X1 X2 Y1) + H(Y1 Y2) - H(X1 X2 Y1 Y2)
//! ```
//!
//! five joint entropies, all derived from one estimated 4-variable table.
//! The value lies in `[0, 2]` bits: the maximum is attained when the
//! target window is a deterministic copy of a uniformly distributed
//! source window, and independence gives exactly 0. [`full_di_oracle`]
//! evaluates the full-sequence sum by explicit outcome enumeration for
//! short sequences and serves as the independent cross-check of the
//! closed form.
//!
//! [`di_matrix`] sweeps the window kernel over every slot `k` and forward
//! lag `i`, pairing (X_k, X_{k+1}) with (Y_{k+i}, Y_{k+i+1}). That is
//! L(L-1)/2 window pairs and five entropy evaluations each; the counter
//! behind [`entropy_evaluations`] audits exactly that number.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};
use crate::prob::{
    estimate_joint_smoothed, marginalize, project_mask, JointDistribution, VariableSelector,
};
use crate::types::{ActivityTrace, DeviceId, EventDataset};

/// Upper bound of the window DI in bits.
pub const DI_MAX_BITS: f64 = 2.0;

/// Slack allowed around the provable range before a value is rejected.
const DI_RANGE_TOLERANCE: f64 = 1e-9;

static ENTROPY_EVALS: AtomicU64 = AtomicU64::new(0);

/// Cumulative number of entropy evaluations performed by the window-DI
/// kernel in this process (five per window pair). Zero until the first
/// scan runs.
pub fn entropy_evaluations() -> u64 {
    ENTROPY_EVALS.load(Ordering::SeqCst)
}

/// Resets the cumulative entropy-evaluation counter.
pub fn reset_entropy_evaluations() {
    ENTROPY_EVALS.store(0, Ordering::SeqCst);
}

/// Shannon entropy of a joint distribution in bits, with `0·log 0 = 0`.
/// The result lies in `[0, arity]`.
pub fn entropy(dist: &JointDistribution) -> f64 {
    dist.probs()
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum()
}

fn counted_entropy(dist: &JointDistribution, counter: &AtomicU64) -> f64 {
    counter.fetch_add(1, Ordering::Relaxed);
    entropy(dist)
}

/// The five joint entropies of one window pair, in bits. `x1`/`x2` are
/// the source window slots and `y1`/`y2` the target window slots.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowEntropies {
    pub h_x1: f64,
    pub h_x1y1: f64,
    pub h_x1x2y1: f64,
    pub h_y1y2: f64,
    pub h_x1x2y1y2: f64,
}

/// Window DI together with its entropy decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairwiseDi {
    /// DI in bits, clamped into `[0, 2]`.
    pub di_bits: f64,
    /// The value before clamping; finite-sample estimates can dip a hair
    /// below zero and this keeps the evidence.
    pub raw_di_bits: f64,
    pub entropies: WindowEntropies,
}

/// Evaluates the window closed form on a 4-variable joint distribution
/// whose variables are ordered (X1, X2, Y1, Y2).
pub fn pairwise_di_from_joint(joint: &JointDistribution) -> Result<PairwiseDi> {
    pairwise_di_counted(joint, &ENTROPY_EVALS)
}

fn pairwise_di_counted(joint: &JointDistribution, counter: &AtomicU64) -> Result<PairwiseDi> {
    if joint.arity() != 4 {
        return Err(Error::ArityMismatch {
            expected: 4,
            actual: joint.arity(),
        });
    }
    let entropies = WindowEntropies {
        h_x1: counted_entropy(&marginalize(joint, &[0])?, counter),
        h_x1y1: counted_entropy(&marginalize(joint, &[0, 2])?, counter),
        h_x1x2y1: counted_entropy(&marginalize(joint, &[0, 1, 2])?, counter),
        h_y1y2: counted_entropy(&marginalize(joint, &[2, 3])?, counter),
        h_x1x2y1y2: counted_entropy(joint, counter),
    };
    let raw = entropies.h_x1 - entropies.h_x1y1 + entropies.h_x1x2y1 + entropies.h_y1y2
        - entropies.h_x1x2y1y2;
    if !(-DI_RANGE_TOLERANCE..=DI_MAX_BITS + DI_RANGE_TOLERANCE).contains(&raw) {
        return Err(Error::DiOutOfRange(raw));
    }
    Ok(PairwiseDi {
        di_bits: raw.clamp(0.0, DI_MAX_BITS),
        raw_di_bits: raw,
        entropies,
    })
}

fn window_selectors(
    source: &DeviceId,
    target: &DeviceId,
    slot: usize,
    lag: usize,
) -> [VariableSelector; 4] {
    [
        VariableSelector::new(source.clone(), slot),
        VariableSelector::new(source.clone(), slot + 1),
        VariableSelector::new(target.clone(), slot + lag),
        VariableSelector::new(target.clone(), slot + lag + 1),
    ]
}

fn check_window_bounds(dataset: &EventDataset, slot: usize, lag: usize) -> Result<()> {
    let slots = dataset.slots_per_event();
    if slot == 0 || slot + 1 > slots {
        return Err(Error::SlotOutOfRange {
            slot,
            max: slots.saturating_sub(1),
        });
    }
    if slot + lag + 1 > slots {
        return Err(Error::LagOutOfRange {
            slot,
            lag,
            max: slots - slot - 1,
        });
    }
    Ok(())
}

/// Window DI from `source` to `target` at slot `k = slot` and forward lag
/// `i = lag`: source window (X_k, X_{k+1}) against target window
/// (Y_{k+i}, Y_{k+i+1}). Lag 0 is the aligned case.
pub fn pairwise_di(
    dataset: &EventDataset,
    source: &DeviceId,
    target: &DeviceId,
    slot: usize,
    lag: usize,
) -> Result<PairwiseDi> {
    if source == target {
        return Err(Error::SourceEqualsTarget);
    }
    check_window_bounds(dataset, slot, lag)?;
    let joint =
        estimate_joint_smoothed(dataset, &window_selectors(source, target, slot, lag), 0.0)?;
    pairwise_di_counted(&joint, &ENTROPY_EVALS)
}

/// Exact full-sequence DI for a joint distribution over
/// (X_1..X_N, Y_1..Y_N) with `N <= 3`, in bits.
///
/// Computes `sum_i I(X^i; Y_i | Y^{i-1})` by enumerating all `2^(2N)`
/// outcomes and folding them into the marginals each conditional mutual
/// information needs. This route never touches the five-entropy closed
/// form, so the two can check each other.
pub fn full_di_oracle(joint: &JointDistribution) -> Result<f64> {
    let arity = joint.arity();
    if !arity.is_multiple_of(2) {
        return Err(Error::OracleArity(arity));
    }
    let n = arity / 2;
    let outcomes = joint.num_outcomes();

    // Positions 0..n hold X_1..X_N, positions n..2n hold Y_1..Y_N.
    let mut total = 0.0;
    for i in 1..=n {
        // Keys: a = (X^i, Y^i), b = (X^i, Y^{i-1}), c = Y^i, d = Y^{i-1}.
        let xs: Vec<usize> = (0..i).collect();
        let ys: Vec<usize> = (n..n + i).collect();
        let ys_prev: Vec<usize> = (n..n + i - 1).collect();
        let a_pos: Vec<usize> = xs.iter().chain(ys.iter()).copied().collect();
        let b_pos: Vec<usize> = xs.iter().chain(ys_prev.iter()).copied().collect();

        let mut p_a = vec![0.0; 1 << a_pos.len()];
        let mut p_b = vec![0.0; 1 << b_pos.len()];
        let mut p_c = vec![0.0; 1 << ys.len()];
        let mut p_d = vec![0.0; 1 << ys_prev.len()];
        for mask in 0..outcomes {
            let p = joint.prob(mask);
            p_a[project_mask(mask, &a_pos)] += p;
            p_b[project_mask(mask, &b_pos)] += p;
            p_c[project_mask(mask, &ys)] += p;
            p_d[project_mask(mask, &ys_prev)] += p;
        }

        // I(X^i; Y_i | Y^{i-1}) = sum p(a) log2[ p(a) p(d) / (p(b) p(c)) ]
        let mut term = 0.0;
        for mask in 0..outcomes {
            let pa = p_a[project_mask(mask, &a_pos)];
            if pa <= 0.0 {
                continue;
            }
            let pb = p_b[project_mask(mask, &b_pos)];
            let pc = p_c[project_mask(mask, &ys)];
            let pd = p_d[project_mask(mask, &ys_prev)];
            // Every outcome of the full table contributes p(mask); the
            // grouped sum over each distinct (x^i, y^i) weights it by pa.
            term += joint.prob(mask) * ((pa * pd) / (pb * pc)).log2();
        }
        total += term;
    }
    Ok(total)
}

/// DI values per ordered device pair, indexed by (slot `k`, lag `i`).
/// Keys satisfy `1 <= k <= L-1` and `0 <= i <= L-k-1`; values are clamped
/// into `[0, 2]` and anything further than 1e-9 outside that range is
/// rejected at insertion.
#[derive(Debug, Clone, PartialEq)]
pub struct DiMatrix {
    source_id: DeviceId,
    target_id: DeviceId,
    slots_per_event: usize,
    values: BTreeMap<(usize, usize), f64>,
}

impl DiMatrix {
    pub fn new(
        source_id: impl Into<DeviceId>,
        target_id: impl Into<DeviceId>,
        slots_per_event: usize,
    ) -> Self {
        DiMatrix {
            source_id: source_id.into(),
            target_id: target_id.into(),
            slots_per_event,
            values: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, slot: usize, lag: usize, di_bits: f64) -> Result<()> {
        if slot == 0 || slot > self.slots_per_event.saturating_sub(1) {
            return Err(Error::SlotOutOfRange {
                slot,
                max: self.slots_per_event.saturating_sub(1),
            });
        }
        if lag > self.slots_per_event - slot - 1 {
            return Err(Error::LagOutOfRange {
                slot,
                lag,
                max: self.slots_per_event - slot - 1,
            });
        }
        if !(-DI_RANGE_TOLERANCE..=DI_MAX_BITS + DI_RANGE_TOLERANCE).contains(&di_bits) {
            return Err(Error::DiOutOfRange(di_bits));
        }
        self.values
            .insert((slot, lag), di_bits.clamp(0.0, DI_MAX_BITS));
        Ok(())
    }

    pub fn get(&self, slot: usize, lag: usize) -> Option<f64> {
        self.values.get(&(slot, lag)).copied()
    }

    /// Entries in (slot, lag) order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.values.iter().map(|(&(k, i), &v)| (k, i, v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Strongest entry; lowest (slot, lag) wins ties deterministically.
    pub fn max_entry(&self) -> Option<(usize, usize, f64)> {
        self.iter()
            .fold(None, |best: Option<(usize, usize, f64)>, cur| match best {
                Some(b) if b.2 >= cur.2 => Some(b),
                _ => Some(cur),
            })
    }

    pub fn sum_bits(&self) -> f64 {
        self.values.values().sum()
    }

    pub fn source_id(&self) -> &DeviceId {
        &self.source_id
    }

    pub fn target_id(&self) -> &DeviceId {
        &self.target_id
    }

    pub fn slots_per_event(&self) -> usize {
        self.slots_per_event
    }
}

/// Full lag scan from `source` to `target`: evaluates the window DI for
/// every slot `k in 1..=L-1` and lag `i in 0..=L-k-1`.
pub fn di_matrix(dataset: &EventDataset, source: &DeviceId, target: &DeviceId) -> Result<DiMatrix> {
    di_matrix_counted(dataset, source, target, 0.0, &ENTROPY_EVALS)
}

pub(crate) fn di_matrix_counted(
    dataset: &EventDataset,
    source: &DeviceId,
    target: &DeviceId,
    alpha: f64,
    counter: &AtomicU64,
) -> Result<DiMatrix> {
    if source == target {
        return Err(Error::SourceEqualsTarget);
    }
    let slots = dataset.slots_per_event();
    if slots < 2 {
        return Err(Error::InvalidConfig(format!(
            "lag scan needs at least 2 slots per event, dataset has {slots}"
        )));
    }
    let mut matrix = DiMatrix::new(source.clone(), target.clone(), slots);
    for slot in 1..slots {
        for lag in 0..slots - slot {
            let joint = estimate_joint_smoothed(
                dataset,
                &window_selectors(source, target, slot, lag),
                alpha,
            )?;
            let di = pairwise_di_counted(&joint, counter)?;
            matrix.insert(slot, lag, di.di_bits)?;
        }
    }
    Ok(matrix)
}

/// Measures how many entropy evaluations one full lag scan performs at
/// the given event length, using an isolated counter. The scan covers
/// L(L-1)/2 window pairs with five entropies each, so the result is
/// 5·L(L-1)/2. A looser accounting that charges every lag a full sweep
/// of slots arrives at 5·L(L-1)² for the same scan; both stay
/// polynomial, and this counter reports what actually runs.
pub fn entropy_eval_count(slots_per_event: usize) -> Result<u64> {
    if slots_per_event < 2 {
        return Err(Error::InvalidConfig(
            "event length must be at least 2".into(),
        ));
    }
    let traces = vec![
        ActivityTrace::new("probe-src", vec![vec![0; slots_per_event]]),
        ActivityTrace::new("probe-tgt", vec![vec![0; slots_per_event]]),
    ];
    let dataset = EventDataset::new(traces, slots_per_event, 1);
    let counter = AtomicU64::new(0);
    di_matrix_counted(
        &dataset,
        &"probe-src".into(),
        &"probe-tgt".into(),
        0.0,
        &counter,
    )?;
    Ok(counter.into_inner())
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

    /// Exact copy: P(x1,x2,y1,y2) = 1/4 when (y1,y2) = (x1,x2).
    fn copy_table() -> JointDistribution {
        let mut probs = vec![0.0; 16];
        for x in 0..4usize {
            let mask = x | (x << 2);
            probs[mask] = 0.25;
        }
        JointDistribution::new(probs, 0).unwrap()
    }

    /// Product of four independent Bernoullis.
    fn product_table(ps: [f64; 4]) -> JointDistribution {
        let mut probs = vec![0.0; 16];
        for (mask, slot) in probs.iter_mut().enumerate() {
            let mut p = 1.0;
            for (j, &pj) in ps.iter().enumerate() {
                p *= if (mask >> j) & 1 == 1 { pj } else { 1.0 - pj };
            }
            *slot = p;
        }
        JointDistribution::new(probs, 0).unwrap()
    }

    #[test]
    fn entropy_of_uniform_four_outcomes_is_two_bits() {
        let d = JointDistribution::new(vec![0.25; 4], 0).unwrap();
        assert!((entropy(&d) - 2.0).abs() <= 1e-12);
    }

    #[test]
    fn entropy_of_point_mass_is_zero() {
        let d = JointDistribution::new(vec![0.0, 0.0, 1.0, 0.0], 0).unwrap();
        assert_eq!(entropy(&d), 0.0);
    }

    #[test]
    fn entropy_of_quarter_bernoulli_matches_hand_value() {
        // -0.25 log2 0.25 - 0.75 log2 0.75
        let d = JointDistribution::new(vec![0.75, 0.25], 0).unwrap();
        assert!((entropy(&d) - 0.811_278_124_459_132_8).abs() <= 1e-12);
    }

    #[test]
    fn deterministic_copy_of_uniform_window_hits_two_bits() {
        let di = pairwise_di_from_joint(&copy_table()).unwrap();
        assert!((di.di_bits - 2.0).abs() <= 1e-12);
        assert!((di.entropies.h_y1y2 - 2.0).abs() <= 1e-12);
    }

    #[test]
    fn independent_windows_carry_no_information() {
        let di = pairwise_di_from_joint(&product_table([0.5, 0.5, 0.5, 0.5])).unwrap();
        assert!(di.raw_di_bits.abs() <= 1e-12);
        assert_eq!(di.di_bits, di.di_bits.clamp(0.0, 2.0));

        let skewed = pairwise_di_from_joint(&product_table([0.3, 0.6, 0.2, 0.7])).unwrap();
        assert!(skewed.raw_di_bits.abs() <= 1e-12);
        assert!(skewed.di_bits >= 0.0);
    }

    #[test]
    fn closed_form_identity_holds_within_result() {
        let di = pairwise_di_from_joint(&product_table([0.3, 0.6, 0.2, 0.7])).unwrap();
        let e = &di.entropies;
        let recombined = e.h_x1 - e.h_x1y1 + e.h_x1x2y1 + e.h_y1y2 - e.h_x1x2y1y2;
        assert!((recombined - di.raw_di_bits).abs() <= 1e-12);
    }

    #[test]
    fn pairwise_di_rejects_wrong_arity() {
        let d = JointDistribution::new(vec![0.25; 4], 0).unwrap();
        assert!(matches!(
            pairwise_di_from_joint(&d),
            Err(Error::ArityMismatch {
                expected: 4,
                actual: 2
            })
        ));
    }

    #[test]
    fn oracle_is_zero_for_product_distributions() {
        for n in [1usize, 2, 3] {
            let outcomes = 1usize << (2 * n);
            let probs = vec![1.0 / outcomes as f64; outcomes];
            let joint = JointDistribution::new(probs, 0).unwrap();
            let di = full_di_oracle(&joint).unwrap();
            assert!(di.abs() <= 1e-12, "n={n} gave {di}");
        }
    }

    #[test]
    fn oracle_matches_endpoint_for_copied_windows() {
        let di = full_di_oracle(&copy_table()).unwrap();
        assert!((di - 2.0).abs() <= 1e-12);
    }

    #[test]
    fn oracle_rejects_odd_or_oversized_arity() {
        let odd = JointDistribution::new(vec![0.125; 8], 0).unwrap();
        assert!(matches!(full_di_oracle(&odd), Err(Error::OracleArity(3))));
    }

    #[test]
    fn oracle_agrees_with_closed_form_on_random_tables() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(11);
        for _ in 0..100 {
            // Dirichlet(1,...,1) via normalized exponentials.
            let mut weights: Vec<f64> =
                (0..16).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
            let sum: f64 = weights.iter().sum();
            for w in &mut weights {
                *w /= sum;
            }
            let joint = JointDistribution::new(weights, 0).unwrap();
            let closed = pairwise_di_from_joint(&joint).unwrap();
            let oracle = full_di_oracle(&joint).unwrap();
            assert!(
                (closed.raw_di_bits - oracle).abs() <= 1e-10,
                "closed {} vs oracle {}",
                closed.raw_di_bits,
                oracle
            );
        }
    }

    #[test]
    fn deterministic_target_gives_exactly_the_target_entropy() {
        // Causally deterministic target: y1 = x1 and y2 = x1 xor x2, so
        // each target slot is fixed by the source slots up to that point.
        let ds = dataset(&[
            ("x", &[&[0, 0], &[0, 1], &[1, 0], &[1, 1], &[1, 0], &[0, 1]]),
            ("y", &[&[0, 0], &[0, 1], &[1, 1], &[1, 0], &[1, 1], &[0, 1]]),
        ]);
        let di = pairwise_di(&ds, &"x".into(), &"y".into(), 1, 0).unwrap();
        let y_joint = crate::prob::estimate_joint(
            &ds,
            &[VariableSelector::new("y", 1), VariableSelector::new("y", 2)],
        )
        .unwrap();
        assert!((di.di_bits - entropy(&y_joint)).abs() <= 1e-12);
    }

    #[test]
    fn relabeling_the_target_does_not_change_di() {
        let ds = dataset(&[
            ("x", &[&[1, 0], &[0, 1], &[1, 1], &[0, 0], &[1, 0], &[1, 1]]),
            ("y", &[&[0, 1], &[1, 1], &[0, 0], &[1, 0], &[0, 1], &[1, 0]]),
        ]);
        let flipped_rows: Vec<Vec<u8>> = ds
            .trace(&"y".into())
            .unwrap()
            .rows()
            .iter()
            .map(|r| r.iter().map(|&b| 1 - b).collect())
            .collect();
        let flipped = dataset(&[
            ("x", &[&[1, 0], &[0, 1], &[1, 1], &[0, 0], &[1, 0], &[1, 1]]),
            (
                "y",
                &flipped_rows
                    .iter()
                    .map(|r| r.as_slice())
                    .collect::<Vec<_>>(),
            ),
        ]);
        let a = pairwise_di(&ds, &"x".into(), &"y".into(), 1, 0).unwrap();
        let b = pairwise_di(&flipped, &"x".into(), &"y".into(), 1, 0).unwrap();
        assert!((a.di_bits - b.di_bits).abs() <= 1e-12);
    }

    #[test]
    fn pairwise_di_checks_bounds_and_devices() {
        let ds = dataset(&[("x", &[&[0, 0, 0]]), ("y", &[&[0, 0, 0]])]);
        assert!(matches!(
            pairwise_di(&ds, &"x".into(), &"x".into(), 1, 0),
            Err(Error::SourceEqualsTarget)
        ));
        assert!(matches!(
            pairwise_di(&ds, &"x".into(), &"y".into(), 0, 0),
            Err(Error::SlotOutOfRange { .. })
        ));
        assert!(matches!(
            pairwise_di(&ds, &"x".into(), &"y".into(), 3, 0),
            Err(Error::SlotOutOfRange { .. })
        ));
        assert!(matches!(
            pairwise_di(&ds, &"x".into(), &"y".into(), 1, 2),
            Err(Error::LagOutOfRange { .. })
        ));
        assert!(matches!(
            pairwise_di(&ds, &"x".into(), &"z".into(), 1, 0),
            Err(Error::UnknownDevice(_))
        ));
    }

    #[test]
    fn matrix_scan_covers_the_triangular_grid() {
        let ds = dataset(&[("x", &[&[0, 0, 0, 0, 0]]), ("y", &[&[0, 0, 0, 0, 0]])]);
        let m = di_matrix(&ds, &"x".into(), &"y".into()).unwrap();
        let l = 5;
        assert_eq!(m.len(), l * (l - 1) / 2);
        for (_, _, v) in m.iter() {
            assert_eq!(v, 0.0);
        }
        assert_eq!(m.sum_bits(), 0.0);
    }

    #[test]
    fn matrix_insert_enforces_range_and_clamps_noise() {
        let mut m = DiMatrix::new("a", "b", 4);
        m.insert(1, 0, -5e-10).unwrap();
        assert_eq!(m.get(1, 0), Some(0.0));
        m.insert(1, 2, 2.0 + 5e-10).unwrap();
        assert_eq!(m.get(1, 2), Some(2.0));
        assert!(matches!(m.insert(1, 1, -1e-6), Err(Error::DiOutOfRange(_))));
        assert!(matches!(m.insert(2, 0, 2.1), Err(Error::DiOutOfRange(_))));
        assert!(matches!(
            m.insert(0, 0, 0.5),
            Err(Error::SlotOutOfRange { .. })
        ));
        assert!(matches!(
            m.insert(4, 0, 0.5),
            Err(Error::SlotOutOfRange { .. })
        ));
        assert!(matches!(
            m.insert(2, 2, 0.5),
            Err(Error::LagOutOfRange { .. })
        ));
    }

    #[test]
    fn eval_count_matches_five_per_window_pair() {
        assert_eq!(entropy_eval_count(2).unwrap(), 5);
        assert_eq!(entropy_eval_count(5).unwrap(), 50);
        assert_eq!(entropy_eval_count(12).unwrap(), 330);
        assert!(entropy_eval_count(1).is_err());
    }
}
