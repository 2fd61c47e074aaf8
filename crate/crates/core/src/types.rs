//! Domain model for event-aligned binary transmission histories.
//!
//! Every device's history is a matrix of scheduling-request indicators:
//! one row per observed event, one column per slot within the event.
//! Slot indices are 1-based throughout the crate; event indices are
//! 0-based. All types are immutable after construction, so shared reads
//! from any number of threads are safe.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Opaque device identifier.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DeviceId(String);

impl DeviceId {
    pub fn new(id: impl Into<String>) -> Self {
        DeviceId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for DeviceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for DeviceId {
    fn from(s: &str) -> Self {
        DeviceId(s.to_owned())
    }
}

impl From<String> for DeviceId {
    fn from(s: String) -> Self {
        DeviceId(s)
    }
}

/// One device's binary event history: `num_events` rows of
/// `slots_per_event` scheduling-request indicators (1 = request sent in
/// that slot of that event, 0 = silent).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActivityTrace {
    device_id: DeviceId,
    rows: Vec<Vec<u8>>,
}

impl ActivityTrace {
    /// Builds a trace without checking entries; [`EventDataset::validate`]
    /// reports non-binary values and ragged rows.
    pub fn new(device_id: impl Into<DeviceId>, rows: Vec<Vec<u8>>) -> Self {
        ActivityTrace {
            device_id: device_id.into(),
            rows,
        }
    }

    pub fn device_id(&self) -> &DeviceId {
        &self.device_id
    }

    pub fn num_events(&self) -> usize {
        self.rows.len()
    }

    /// Slot count of the first row (0 for an empty trace).
    pub fn slots_per_event(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    /// Raw entry at 0-based `event` and 1-based `slot`.
    pub fn bit(&self, event: usize, slot: usize) -> u8 {
        self.rows[event][slot - 1]
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    /// Right-pads every row with zeros up to `slots`. Rows already that
    /// long are left untouched; the original prefix is always preserved.
    pub fn padded_to(mut self, slots: usize) -> Self {
        for row in &mut self.rows {
            if row.len() < slots {
                row.resize(slots, 0);
            }
        }
        self
    }
}

/// Aligned collection of [`ActivityTrace`]s: event index `e` refers to the
/// same physical event in every trace (alignment by event trigger), and
/// all traces share the declared dimensions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventDataset {
    traces: Vec<ActivityTrace>,
    slots_per_event: usize,
    num_events: usize,
}

impl EventDataset {
    /// Assembles a dataset with the declared dimensions. No checking is
    /// performed here; call [`EventDataset::validate`] to obtain a report.
    pub fn new(traces: Vec<ActivityTrace>, slots_per_event: usize, num_events: usize) -> Self {
        EventDataset {
            traces,
            slots_per_event,
            num_events,
        }
    }

    /// Builds a dataset from possibly ragged traces by fixing the slot
    /// count to the longest observed row and right-padding shorter rows
    /// with zeros (a missing slot means no request was sent). All traces
    /// must agree on the number of events.
    pub fn aligned(traces: Vec<ActivityTrace>) -> Result<Self> {
        let Some(first) = traces.first() else {
            return Err(Error::Misaligned("no traces given".into()));
        };
        let num_events = first.num_events();
        for trace in &traces {
            if trace.num_events() != num_events {
                return Err(Error::Misaligned(format!(
                    "device `{}` has {} events, expected {}",
                    trace.device_id(),
                    trace.num_events(),
                    num_events
                )));
            }
        }
        let slots = traces
            .iter()
            .flat_map(|t| t.rows.iter())
            .map(Vec::len)
            .max()
            .unwrap_or(0);
        let traces = traces.into_iter().map(|t| t.padded_to(slots)).collect();
        Ok(EventDataset::new(traces, slots, num_events))
    }

    pub fn devices(&self) -> &[ActivityTrace] {
        &self.traces
    }

    pub fn device_ids(&self) -> impl Iterator<Item = &DeviceId> {
        self.traces.iter().map(ActivityTrace::device_id)
    }

    pub fn trace(&self, id: &DeviceId) -> Option<&ActivityTrace> {
        self.traces.iter().find(|t| t.device_id() == id)
    }

    pub fn slots_per_event(&self) -> usize {
        self.slots_per_event
    }

    pub fn num_events(&self) -> usize {
        self.num_events
    }

    /// Checks every invariant and returns the full list of violations.
    /// An empty report means the dataset is consistent.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        for (idx, trace) in self.traces.iter().enumerate() {
            if self.traces[..idx]
                .iter()
                .any(|t| t.device_id() == trace.device_id())
            {
                violations.push(Violation::DuplicateDeviceId {
                    device: trace.device_id().clone(),
                });
            }
            if trace.num_events() != self.num_events {
                violations.push(Violation::EventCountMismatch {
                    device: trace.device_id().clone(),
                    expected: self.num_events,
                    actual: trace.num_events(),
                });
            }
            for (event, row) in trace.rows.iter().enumerate() {
                if row.len() != self.slots_per_event {
                    violations.push(Violation::SlotCountMismatch {
                        device: trace.device_id().clone(),
                        event,
                        expected: self.slots_per_event,
                        actual: row.len(),
                    });
                }
                for (col, &value) in row.iter().enumerate() {
                    if value > 1 {
                        violations.push(Violation::NonBinaryEntry {
                            device: trace.device_id().clone(),
                            event,
                            slot: col + 1,
                            value,
                        });
                    }
                }
            }
        }
        ValidationReport { violations }
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// FNV-1a hash of the dataset layout and contents, used to stamp
    /// trained models with the data they came from.
    pub fn content_hash(&self) -> String {
        let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |byte: u8| {
            hash ^= u64::from(byte);
            hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
        };
        for byte in (self.slots_per_event as u64)
            .to_le_bytes()
            .into_iter()
            .chain((self.num_events as u64).to_le_bytes())
        {
            eat(byte);
        }
        for trace in &self.traces {
            for byte in trace.device_id().as_str().bytes() {
                eat(byte);
            }
            eat(0xff);
            for row in &trace.rows {
                for &bit in row {
                    eat(bit);
                }
                eat(0xfe);
            }
        }
        format!("fnv1a64:{hash:016x}")
    }
}

/// A single consistency violation found by [`EventDataset::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DuplicateDeviceId {
        device: DeviceId,
    },
    EventCountMismatch {
        device: DeviceId,
        expected: usize,
        actual: usize,
    },
    SlotCountMismatch {
        device: DeviceId,
        event: usize,
        expected: usize,
        actual: usize,
    },
    NonBinaryEntry {
        device: DeviceId,
        event: usize,
        slot: usize,
        value: u8,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateDeviceId { device } => {
                write!(f, "duplicate device id `{device}`")
            }
            Violation::EventCountMismatch {
                device,
                expected,
                actual,
            } => write!(
                f,
                "event count mismatch for `{device}`: expected {expected}, got {actual}"
            ),
            Violation::SlotCountMismatch {
                device,
                event,
                expected,
                actual,
            } => write!(
                f,
                "slot count mismatch for `{device}` event {event}: expected {expected}, got {actual}"
            ),
            Violation::NonBinaryEntry {
                device,
                event,
                slot,
                value,
            } => write!(
                f,
                "non-binary entry {value} at (`{device}`, event {event}, slot {slot})"
            ),
        }
    }
}

/// Outcome of [`EventDataset::validate`]: empty means valid.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }

    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.violations.len()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("no violations");
        }
        let shown = self.violations.iter().take(3);
        let mut first = true;
        for v in shown {
            if !first {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
            first = false;
        }
        if self.violations.len() > 3 {
            write!(f, "; and {} more", self.violations.len() - 3)?;
        }
        Ok(())
    }
}
