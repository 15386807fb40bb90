//! Per-run outcome records and their JSONL serialization.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::SpinConfig;

/// Outcome of one anneal. Serialized as one JSON object per line, keys in
/// declaration order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunRecord {
    /// Instance identifier (file stem under the experiment's instance dir).
    pub instance: String,
    /// Method label from the experiment spec.
    pub method: String,
    /// Gauge index within the experiment.
    pub gauge: u32,
    /// Run index within the gauge.
    pub run: u32,
    /// The RNG seed this run was started with.
    pub seed: u64,
    /// Readout configuration, hex bit vector in vertex-id order (ungauged).
    pub config_hex: String,
    /// Classical Ising energy of the readout configuration on the ideal
    /// instance, dimensionless.
    pub energy: f64,
    /// energy - E0 for the instance's exact ground energy E0. Annealers
    /// return NaN here; the harness fills it in once E0 is known, and only
    /// finite gaps serialize.
    pub gap: f64,
}

impl RunRecord {
    pub fn config(&self, n_spins: usize) -> Result<SpinConfig> {
        SpinConfig::from_hex(&self.config_hex, n_spins)
    }
}

/// All runs of one method on one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSet {
    pub instance: String,
    pub method: String,
    pub records: Vec<RunRecord>,
}

impl RunSet {
    pub fn new(instance: impl Into<String>, method: impl Into<String>) -> Self {
        RunSet { instance: instance.into(), method: method.into(), records: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// Group records into run sets keyed by (method, instance), keys ascending,
/// record order preserved within each set.
pub fn group_runsets(records: Vec<RunRecord>) -> Vec<RunSet> {
    let mut by_key: BTreeMap<(String, String), Vec<RunRecord>> = BTreeMap::new();
    for rec in records {
        by_key.entry((rec.method.clone(), rec.instance.clone())).or_default().push(rec);
    }
    by_key
        .into_iter()
        .map(|((method, instance), records)| RunSet { instance, method, records })
        .collect()
}

pub fn write_jsonl(path: &Path, records: &[RunRecord]) -> Result<()> {
    let mut text = String::new();
    for rec in records {
        if !rec.gap.is_finite() || !rec.energy.is_finite() {
            return Err(Error::Experiment(format!(
                "record for {}/{} gauge {} run {} has non-finite energy or gap",
                rec.method, rec.instance, rec.gauge, rec.run
            )));
        }
        text.push_str(&serde_json::to_string(rec)?);
        text.push('\n');
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_jsonl(path: &Path) -> Result<Vec<RunRecord>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut records = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: RunRecord = serde_json::from_str(line)
            .map_err(|e| Error::parse(path, format!("line {}: {e}", lineno + 1)))?;
        records.push(rec);
    }
    Ok(records)
}
