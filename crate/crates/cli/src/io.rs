//! File formats: the events CSV, the generator metadata sidecar, model
//! files, and the optional DI heatmap images.
//!
//! Events CSV: header `event_id,device_id,slot_1,...,slot_L`, bits as
//! `0`/`1`, UTF-8 with LF line endings, rows sorted by (event_id,
//! device_id). Event ids are 0-based and consecutive; every event must
//! carry a row for every device.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use ditraffic_core::{
    ActivityTrace, DiMatrix, EventDataset, GeneratorConfig, GeneratorStamp, PredictorModel,
    GENERATOR_NAME,
};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub fn write_events_csv(path: &Path, dataset: &EventDataset) -> Result<(), CliError> {
    let mut writer = csv::Writer::from_path(path)
        .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))?;
    let slots = dataset.slots_per_event();
    let mut header = vec!["event_id".to_string(), "device_id".to_string()];
    header.extend((1..=slots).map(|s| format!("slot_{s}")));
    writer
        .write_record(&header)
        .map_err(|e| CliError::Data(e.to_string()))?;

    let mut traces: Vec<&ActivityTrace> = dataset.devices().iter().collect();
    traces.sort_by(|a, b| a.device_id().cmp(b.device_id()));
    for event in 0..dataset.num_events() {
        for trace in &traces {
            let mut record = vec![event.to_string(), trace.device_id().to_string()];
            record.extend((1..=slots).map(|s| trace.bit(event, s).to_string()));
            writer
                .write_record(&record)
                .map_err(|e| CliError::Data(e.to_string()))?;
        }
    }
    writer.flush().map_err(|e| CliError::Data(e.to_string()))?;
    Ok(())
}

pub fn read_events_csv(path: &Path) -> Result<EventDataset, CliError> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
    let header = reader
        .headers()
        .map_err(|e| CliError::Data(e.to_string()))?
        .clone();
    if header.len() < 3 || &header[0] != "event_id" || &header[1] != "device_id" {
        return Err(CliError::Data(format!(
            "{}: expected header event_id,device_id,slot_1,...",
            path.display()
        )));
    }
    let slots = header.len() - 2;
    for (idx, name) in header.iter().skip(2).enumerate() {
        if name != format!("slot_{}", idx + 1) {
            return Err(CliError::Data(format!(
                "{}: unexpected column `{name}`, want slot_{}",
                path.display(),
                idx + 1
            )));
        }
    }

    let mut grid: BTreeMap<u64, BTreeMap<String, Vec<u8>>> = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Data(e.to_string()))?;
        let line = record
            .position()
            .map(|p| p.line().to_string())
            .unwrap_or_else(|| "?".into());
        if record.len() != header.len() {
            return Err(CliError::Data(format!(
                "{} line {line}: {} fields, expected {}",
                path.display(),
                record.len(),
                header.len()
            )));
        }
        let event_id: u64 = record[0].parse().map_err(|_| {
            CliError::Data(format!(
                "{} line {line}: bad event_id `{}`",
                path.display(),
                &record[0]
            ))
        })?;
        let device = record[1].to_string();
        let mut bits = Vec::with_capacity(slots);
        for value in record.iter().skip(2) {
            match value {
                "0" => bits.push(0u8),
                "1" => bits.push(1u8),
                other => {
                    return Err(CliError::Data(format!(
                        "{} line {line}: non-binary entry `{other}`",
                        path.display()
                    )))
                }
            }
        }
        if grid
            .entry(event_id)
            .or_default()
            .insert(device.clone(), bits)
            .is_some()
        {
            return Err(CliError::Data(format!(
                "{} line {line}: duplicate row for event {event_id}, device `{device}`",
                path.display()
            )));
        }
    }

    if grid.is_empty() {
        return Err(CliError::Data(format!("{}: no data rows", path.display())));
    }
    let num_events = grid.len();
    let devices: BTreeSet<String> = grid.values().flat_map(|m| m.keys().cloned()).collect();
    for (expected, (&event_id, row)) in grid.iter().enumerate() {
        if event_id != expected as u64 {
            return Err(CliError::Data(format!(
                "{}: event ids must be 0-based and consecutive, missing {expected}",
                path.display()
            )));
        }
        if row.len() != devices.len() {
            let missing = devices
                .iter()
                .find(|d| !row.contains_key(*d))
                .cloned()
                .unwrap_or_default();
            return Err(CliError::Data(format!(
                "{}: event {event_id} has no row for device `{missing}`",
                path.display()
            )));
        }
    }

    let traces = devices
        .iter()
        .map(|device| {
            let rows = grid
                .values()
                .map(|row| row[device].clone())
                .collect::<Vec<_>>();
            ActivityTrace::new(device.clone(), rows)
        })
        .collect();
    Ok(EventDataset::new(traces, slots, num_events))
}

/// Sidecar written next to a generated events.csv.
#[derive(Debug, Serialize, Deserialize)]
pub struct DatasetMetadata {
    pub generator: String,
    pub seed: u64,
    pub slots_per_event: usize,
    pub num_events: usize,
    pub profiles: serde_json::Value,
}

pub fn write_metadata(path: &Path, config: &GeneratorConfig) -> Result<(), CliError> {
    let metadata = DatasetMetadata {
        generator: GENERATOR_NAME.to_string(),
        seed: config.seed,
        slots_per_event: config.slots_per_event,
        num_events: config.num_events,
        profiles: serde_json::to_value(&config.profiles)
            .map_err(|e| CliError::Internal(e.to_string()))?,
    };
    write_json(path, &metadata)
}

/// Best-effort read of a sibling metadata.json to stamp trained models
/// with their generator provenance.
pub fn sibling_generator_stamp(data_path: &Path) -> Option<GeneratorStamp> {
    let sidecar = data_path.parent()?.join("metadata.json");
    let bytes = fs::read(sidecar).ok()?;
    let metadata: DatasetMetadata = serde_json::from_slice(&bytes).ok()?;
    Some(GeneratorStamp {
        name: metadata.generator,
        seed: metadata.seed,
    })
}

pub fn read_profiles(path: &Path) -> Result<GeneratorConfig, CliError> {
    let bytes = fs::read(path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_slice(&bytes).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

pub fn read_model(path: &Path) -> Result<PredictorModel, CliError> {
    let bytes = fs::read(path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
    ditraffic_core::load_model(&bytes)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text =
        serde_json::to_string_pretty(value).map_err(|e| CliError::Internal(e.to_string()))?;
    text.push('\n');
    fs::write(path, text)
        .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes)
        .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))
}

fn sanitize(id: &str) -> String {
    id.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

pub fn matrix_csv_path(dir: &Path, matrix: &DiMatrix) -> PathBuf {
    dir.join(format!(
        "di_{}_to_{}.csv",
        sanitize(matrix.source_id().as_str()),
        sanitize(matrix.target_id().as_str())
    ))
}

pub fn write_matrix_csv(path: &Path, matrix: &DiMatrix) -> Result<(), CliError> {
    let mut out = String::from("k,i,di_bits\n");
    for (slot, lag, di) in matrix.iter() {
        let _ = writeln!(out, "{slot},{lag},{di}");
    }
    write_bytes(path, out.as_bytes())
}

/// Plain-text PGM heatmap: one column per slot k, one row per lag i
/// (lag 0 on top), grey level proportional to di/2. Cells outside the
/// triangular scan stay black.
pub fn write_heatmap_pgm(path: &Path, matrix: &DiMatrix) -> Result<(), CliError> {
    let slots = matrix.slots_per_event();
    let width = slots - 1;
    let height = slots - 1;
    let mut out = format!("P2\n{width} {height}\n255\n");
    for lag in 0..height {
        let mut row = Vec::with_capacity(width);
        for k in 1..=width {
            let level = matrix
                .get(k, lag)
                .map(|di| (di / 2.0 * 255.0).round() as u8)
                .unwrap_or(0);
            row.push(level.to_string());
        }
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    write_bytes(path, out.as_bytes())
}
