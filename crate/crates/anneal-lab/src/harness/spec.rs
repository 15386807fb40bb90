//! Experiment spec files: JSON descriptions of instance source, method
//! blocks, gauge/run counts, schedule, and output layout.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::sqa::{ReadoutPolicy, UpdatePolicy};
use crate::sssv::SweepOrder;

/// "MxNxL" -> (M, N, L).
pub fn parse_topology(text: &str) -> Result<(usize, usize, usize)> {
    let parts: Vec<&str> = text.split('x').collect();
    if parts.len() != 3 {
        return Err(Error::Params(format!(
            "topology must be MxNxL (e.g. 2x2x4), got {text:?}"
        )));
    }
    let mut dims = [0usize; 3];
    for (slot, part) in dims.iter_mut().zip(&parts) {
        *slot = part
            .parse()
            .map_err(|_| Error::Params(format!("bad topology dimension {part:?}")))?;
        if *slot == 0 {
            return Err(Error::Params("topology dimensions must be >= 1".into()));
        }
    }
    Ok((dims[0], dims[1], dims[2]))
}

/// Where instances come from: an existing directory of instance files, or a
/// generation recipe (count + seed). The topology is required either way.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSource {
    pub topology: String,
    #[serde(default)]
    pub broken: Option<PathBuf>,
    #[serde(default)]
    pub dir: Option<PathBuf>,
    #[serde(default)]
    pub count: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodKind {
    Sssv,
    Sqa,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReadoutSpec {
    RandomSlice,
    BestSlice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpdateSpec {
    SiteLocal,
    SiteLocalPlusCluster,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderSpec {
    Sequential,
    RandomPermutation,
}

/// One method block: the (T, n, sigma) triple the runs are labeled with,
/// plus method-specific extras.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodSpec {
    pub label: String,
    pub kind: MethodKind,
    pub temperature_mk: f64,
    pub sweeps: usize,
    #[serde(default)]
    pub sigma: f64,
    #[serde(default)]
    pub chi: f64,
    #[serde(default)]
    pub trotter_slices: Option<usize>,
    #[serde(default)]
    pub per_qubit_schedule: bool,
    #[serde(default)]
    pub readout: Option<ReadoutSpec>,
    #[serde(default)]
    pub update: Option<UpdateSpec>,
    #[serde(default)]
    pub order: Option<OrderSpec>,
}

impl MethodSpec {
    pub fn readout_policy(&self) -> ReadoutPolicy {
        match self.readout {
            Some(ReadoutSpec::BestSlice) => ReadoutPolicy::BestSlice,
            _ => ReadoutPolicy::RandomSlice,
        }
    }

    pub fn update_policy(&self) -> UpdatePolicy {
        match self.update {
            Some(UpdateSpec::SiteLocal) => UpdatePolicy::SiteLocal,
            _ => UpdatePolicy::SiteLocalPlusCluster,
        }
    }

    pub fn sweep_order(&self) -> SweepOrder {
        match self.order {
            Some(OrderSpec::RandomPermutation) => SweepOrder::RandomPermutation,
            _ => SweepOrder::Sequential,
        }
    }
}

fn default_gauges() -> usize {
    16
}

fn default_runs() -> usize {
    1000
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub instances: InstanceSource,
    pub methods: Vec<MethodSpec>,
    #[serde(default = "default_gauges")]
    pub gauges: usize,
    #[serde(default = "default_runs")]
    pub runs: usize,
    pub master_seed: u64,
    pub schedule: PathBuf,
    pub output_dir: PathBuf,
    /// Ground-set enumeration cap for the exact pass.
    #[serde(default)]
    pub enum_cap: Option<usize>,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        parse_topology(&self.instances.topology)?;
        match (&self.instances.dir, self.instances.count, self.instances.seed) {
            (Some(_), None, None) => {}
            (None, Some(count), Some(_)) => {
                if count == 0 {
                    return Err(Error::Params("instance count must be >= 1".into()));
                }
            }
            _ => {
                return Err(Error::Params(
                    "instances need either dir, or count + seed".into(),
                ))
            }
        }
        if self.methods.is_empty() {
            return Err(Error::Params("at least one method block required".into()));
        }
        let mut labels: Vec<&str> = self.methods.iter().map(|m| m.label.as_str()).collect();
        labels.sort_unstable();
        labels.dedup();
        if labels.len() != self.methods.len() {
            return Err(Error::Params("method labels must be unique".into()));
        }
        for m in &self.methods {
            // Labels name results files.
            if m.label.is_empty()
                || !m
                    .label
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || "._-".contains(c))
            {
                return Err(Error::Params(format!(
                    "method label {:?} must be non-empty [A-Za-z0-9._-]",
                    m.label
                )));
            }
            if !(m.temperature_mk > 0.0) {
                return Err(Error::Params(format!(
                    "method {:?}: temperature must be > 0 mK",
                    m.label
                )));
            }
            if m.sweeps == 0 {
                return Err(Error::Params(format!(
                    "method {:?}: sweeps must be >= 1",
                    m.label
                )));
            }
            if !(m.sigma >= 0.0) || !m.chi.is_finite() {
                return Err(Error::Params(format!(
                    "method {:?}: bad sigma or chi",
                    m.label
                )));
            }
            if m.kind == MethodKind::Sssv
                && (m.trotter_slices.is_some() || m.readout.is_some() || m.update.is_some())
            {
                return Err(Error::Params(format!(
                    "method {:?}: slices/readout/update apply only to sqa",
                    m.label
                )));
            }
            if m.kind == MethodKind::Sqa && m.order.is_some() {
                return Err(Error::Params(format!(
                    "method {:?}: sweep order applies only to sssv",
                    m.label
                )));
            }
        }
        if self.gauges == 0 || self.runs == 0 {
            return Err(Error::Params("gauges and runs must be >= 1".into()));
        }
        Ok(())
    }
}

/// Load and validate a spec file. Relative paths inside the spec are
/// resolved against the spec file's directory.
pub fn load_spec(path: &Path) -> Result<ExperimentSpec> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut spec: ExperimentSpec = serde_json::from_str(&text)
        .map_err(|e| Error::parse(path, e.to_string()))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let anchor = |p: &mut PathBuf| {
        if p.is_relative() {
            *p = base.join(&p);
        }
    };
    anchor(&mut spec.schedule);
    anchor(&mut spec.output_dir);
    if let Some(dir) = &mut spec.instances.dir {
        anchor(dir);
    }
    if let Some(mask) = &mut spec.instances.broken {
        anchor(mask);
    }
    spec.validate()?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn topology_parsing() {
        assert_eq!(parse_topology("2x2x4").unwrap(), (2, 2, 4));
        assert_eq!(parse_topology("1x12x4").unwrap(), (1, 12, 4));
        assert!(parse_topology("2x2").is_err());
        assert!(parse_topology("2x0x4").is_err());
        assert!(parse_topology("axbxc").is_err());
    }

    fn minimal_json() -> serde_json::Value {
        serde_json::json!({
            "instances": {"topology": "2x2x4", "count": 3, "seed": 7},
            "methods": [
                {"label": "sssv", "kind": "sssv", "temperature_mk": 10.56,
                 "sweeps": 1000, "sigma": 0.05},
                {"label": "sqa", "kind": "sqa", "temperature_mk": 2.54,
                 "sweeps": 500, "trotter_slices": 16}
            ],
            "master_seed": 1,
            "schedule": "sched.csv",
            "output_dir": "out"
        })
    }

    fn spec_from(v: serde_json::Value) -> Result<ExperimentSpec> {
        let spec: ExperimentSpec = serde_json::from_value(v)
            .map_err(|e| Error::parse(Path::new("spec.json"), e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    #[test]
    fn minimal_spec_parses_with_defaults() {
        let spec = spec_from(minimal_json()).unwrap();
        assert_eq!(spec.gauges, 16);
        assert_eq!(spec.runs, 1000);
        assert_eq!(spec.methods[1].readout_policy(), ReadoutPolicy::RandomSlice);
        assert_eq!(spec.methods[0].sweep_order(), SweepOrder::Sequential);
        assert_eq!(spec.methods[0].chi, 0.0);
    }

    #[test]
    fn unknown_keys_rejected() {
        let mut v = minimal_json();
        v["surprise"] = serde_json::json!(1);
        assert!(spec_from(v).is_err());
        let mut v = minimal_json();
        v["methods"][0]["beta"] = serde_json::json!(2.0);
        assert!(spec_from(v).is_err());
    }

    #[test]
    fn duplicate_labels_rejected() {
        let mut v = minimal_json();
        v["methods"][1]["label"] = serde_json::json!("sssv");
        assert!(spec_from(v).is_err());
    }

    #[test]
    fn sqa_extras_rejected_on_sssv() {
        let mut v = minimal_json();
        v["methods"][0]["trotter_slices"] = serde_json::json!(8);
        assert!(spec_from(v).is_err());
    }

    #[test]
    fn instance_source_needs_dir_or_recipe() {
        let mut v = minimal_json();
        v["instances"] = serde_json::json!({"topology": "2x2x4"});
        assert!(spec_from(v).is_err());
        let mut v = minimal_json();
        v["instances"] =
            serde_json::json!({"topology": "2x2x4", "dir": "d", "count": 3, "seed": 1});
        assert!(spec_from(v).is_err());
    }

    #[test]
    fn load_resolves_relative_paths() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("exp.json");
        std::fs::write(&path, minimal_json().to_string()).unwrap();
        let spec = load_spec(&path).unwrap();
        assert!(spec.schedule.starts_with(dir.path()));
        assert!(spec.output_dir.starts_with(dir.path()));
    }
}
