//! Experiment execution: materialize instances and exact summaries, then run
//! every (method, instance, gauge, run) work item on a worker pool and
//! persist the records in canonical order. Output bytes are a pure function
//! of the spec, the schedule file, and the instance files.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::sync::Arc;

use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rayon::prelude::*;

use crate::chimera::{load_broken_mask, ChimeraTopology};
use crate::error::{Error, Result};
use crate::exact::{
    brute_force_solve, chimera_dp_solve, energy_gap, write_ground_summary, GroundSummary,
    DEFAULT_ENUM_CAP,
};
use crate::instance::{
    gauge_config, random_instance, read_instance, write_instance, Gauge, IsingInstance,
};
use crate::records::{write_jsonl, RunRecord};
use crate::schedule::{load_schedule, AnnealSchedule};
use crate::sqa::{sqa_anneal, SqaParams};
use crate::sssv::{sssv_anneal, SssvParams};

use super::seed::SeedMixer;
use super::spec::{parse_topology, ExperimentSpec, MethodKind, MethodSpec};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FailureNote {
    pub method: String,
    pub instance: String,
    pub gauge: u32,
    pub error: String,
}

#[derive(Debug)]
pub struct ExperimentOutcome {
    pub output_dir: PathBuf,
    pub instance_ids: Vec<String>,
    /// Method label -> results file, in spec order.
    pub results: Vec<(String, PathBuf)>,
    pub failures: Vec<FailureNote>,
    pub schedule_warnings: Vec<String>,
}

/// Worker pool honoring the ANNEAL_LAB_WORKERS override.
pub(crate) fn worker_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(text) = std::env::var("ANNEAL_LAB_WORKERS") {
        let n: usize = text
            .parse()
            .ok()
            .filter(|&n| n >= 1)
            .ok_or_else(|| Error::Experiment(format!("bad ANNEAL_LAB_WORKERS {text:?}")))?;
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| Error::Experiment(format!("worker pool: {e}")))
}

/// The generation recipe behind both `gen` and count-mode specs: instance
/// `idx` depends only on (seed, idx), so extending a set keeps its prefix.
pub(crate) fn generate_instances(
    topology: &Arc<ChimeraTopology>,
    count: usize,
    gen_seed: u64,
) -> Vec<(String, IsingInstance)> {
    (0..count)
        .map(|idx| {
            let seed = SeedMixer::new(gen_seed).str("instance").u64(idx as u64).finish();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (format!("instance_{idx:04}"), random_instance(topology, &mut rng))
        })
        .collect()
}

fn load_instances(
    spec: &ExperimentSpec,
    topology: &Arc<ChimeraTopology>,
) -> Result<Vec<(String, IsingInstance)>> {
    let source = &spec.instances;
    let mut out = Vec::new();
    if let Some(dir) = &source.dir {
        let mut paths: Vec<PathBuf> = fs::read_dir(dir)
            .map_err(|e| Error::io(dir, e))?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|ext| ext == "txt"))
            .collect();
        paths.sort();
        if paths.is_empty() {
            return Err(Error::Experiment(format!(
                "no instance files (*.txt) in {}",
                dir.display()
            )));
        }
        for path in paths {
            let id = path
                .file_stem()
                .and_then(|s| s.to_str())
                .ok_or_else(|| Error::Experiment(format!("bad file name {path:?}")))?
                .to_string();
            out.push((id, read_instance(&path, Arc::clone(topology))?));
        }
    } else {
        out = generate_instances(topology, source.count.unwrap(), source.seed.unwrap());
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out)
}

fn solve_instance(instance: &IsingInstance, enum_cap: usize) -> Result<GroundSummary> {
    match chimera_dp_solve(instance, enum_cap) {
        Ok(s) => Ok(s),
        Err(Error::Exact(msg)) if msg.contains("width") => brute_force_solve(instance),
        Err(e) => Err(e),
    }
}

struct WorkItem<'a> {
    method: &'a MethodSpec,
    instance_id: &'a str,
    base: &'a IsingInstance,
    summary: &'a GroundSummary,
    gauge_index: usize,
}

fn run_item(
    item: &WorkItem,
    schedule: &AnnealSchedule,
    master: u64,
    runs: usize,
) -> Result<Vec<RunRecord>> {
    let m = item.method;
    let base = item.base;
    let n = base.n_spins();
    let g = item.gauge_index as u64;

    let gauge_seed = SeedMixer::new(master)
        .str("gauge")
        .str(item.instance_id)
        .u64(g)
        .finish();
    let gauge = Gauge::random(n, &mut ChaCha8Rng::seed_from_u64(gauge_seed));
    let mut programmed = base.apply_gauge(&gauge)?;
    if m.sigma > 0.0 {
        let noise_seed = SeedMixer::new(master)
            .str("noise")
            .str(&m.label)
            .str(item.instance_id)
            .u64(g)
            .finish();
        let mut rng = ChaCha8Rng::seed_from_u64(noise_seed);
        programmed = programmed.perturb(m.sigma, &mut rng)?;
    }
    if m.chi != 0.0 {
        programmed = programmed.apply_crosstalk(m.chi);
    }

    let mut records = Vec::with_capacity(runs);
    for run in 0..runs {
        let run_seed = SeedMixer::new(master)
            .str(&m.label)
            .str(item.instance_id)
            .u64(g)
            .u64(run as u64)
            .finish();
        let mut rec = match m.kind {
            MethodKind::Sssv => {
                let params = SssvParams {
                    temperature_mk: m.temperature_mk,
                    sweeps: m.sweeps,
                    seed: run_seed,
                    order: m.sweep_order(),
                    per_qubit_schedule: m.per_qubit_schedule,
                };
                sssv_anneal(&programmed, schedule, &params)?
            }
            MethodKind::Sqa => {
                let params = SqaParams {
                    temperature_mk: m.temperature_mk,
                    sweeps: m.sweeps,
                    trotter_slices: m.trotter_slices.unwrap_or(64),
                    seed: run_seed,
                    readout: m.readout_policy(),
                    updates: m.update_policy(),
                    per_qubit_schedule: m.per_qubit_schedule,
                };
                sqa_anneal(&programmed, schedule, &params)?
            }
        };
        // Back to the ungauged frame; energy and gap are stated against the
        // base instance, whatever noise or crosstalk was programmed.
        let config = gauge_config(&rec.config(n)?, &gauge)?;
        let energy = base.ising_energy(&config)?;
        rec.instance = item.instance_id.to_string();
        rec.method = m.label.clone();
        rec.gauge = item.gauge_index as u32;
        rec.run = run as u32;
        rec.config_hex = config.to_hex();
        rec.energy = energy;
        rec.gap = energy_gap(base, &config, item.summary.e0)?;
        records.push(rec);
    }
    Ok(records)
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutcome> {
    spec.validate()?;
    let schedule = load_schedule(&spec.schedule)?;
    let (m, n, l) = parse_topology(&spec.instances.topology)?;
    let broken = match &spec.instances.broken {
        Some(path) => load_broken_mask(path)?,
        None => Default::default(),
    };
    let topology = Arc::new(ChimeraTopology::build(m, n, l, &broken)?);
    let instances = load_instances(spec, &topology)?;
    let enum_cap = spec.enum_cap.unwrap_or(DEFAULT_ENUM_CAP);

    let inst_dir = spec.output_dir.join("instances");
    let results_dir = spec.output_dir.join("results");
    fs::create_dir_all(&inst_dir).map_err(|e| Error::io(&inst_dir, e))?;
    fs::create_dir_all(&results_dir).map_err(|e| Error::io(&results_dir, e))?;

    let pool = worker_pool()?;

    // Exact pass; summaries are required before any run so gaps can be
    // filled in.
    let summaries: Vec<GroundSummary> = pool.install(|| {
        instances
            .par_iter()
            .map(|(_, inst)| solve_instance(inst, enum_cap))
            .collect::<Result<Vec<_>>>()
    })?;

    for ((id, inst), summary) in instances.iter().zip(&summaries) {
        write_instance(&inst_dir.join(format!("{id}.txt")), inst)?;
        write_ground_summary(&inst_dir.join(format!("{id}.gs")), summary)?;
    }

    let mut items = Vec::new();
    for method in &spec.methods {
        for ((id, inst), summary) in instances.iter().zip(&summaries) {
            for gauge_index in 0..spec.gauges {
                items.push(WorkItem {
                    method,
                    instance_id: id,
                    base: inst,
                    summary,
                    gauge_index,
                });
            }
        }
    }

    let outcomes: Vec<std::result::Result<Vec<RunRecord>, FailureNote>> =
        pool.install(|| {
            items
                .par_iter()
                .map(|item| {
                    run_item(item, &schedule, spec.master_seed, spec.runs).map_err(|e| {
                        FailureNote {
                            method: item.method.label.clone(),
                            instance: item.instance_id.to_string(),
                            gauge: item.gauge_index as u32,
                            error: e.to_string(),
                        }
                    })
                })
                .collect()
        });

    let mut failures = Vec::new();
    let mut by_method: BTreeMap<&str, Vec<RunRecord>> = BTreeMap::new();
    for (item, outcome) in items.iter().zip(outcomes) {
        match outcome {
            Ok(records) => by_method
                .entry(&item.method.label)
                .or_default()
                .extend(records),
            Err(note) => failures.push(note),
        }
    }

    let mut results = Vec::new();
    for method in &spec.methods {
        let records = by_method.remove(method.label.as_str()).unwrap_or_default();
        let path = results_dir.join(format!("{}.jsonl", method.label));
        write_jsonl(&path, &records)?;
        results.push((method.label.clone(), path));
    }

    let instance_ids: Vec<String> = instances.iter().map(|(id, _)| id.clone()).collect();
    let manifest = serde_json::json!({
        "topology": spec.instances.topology,
        "gauges": spec.gauges,
        "runs": spec.runs,
        "instances": instance_ids,
        "methods": spec.methods.iter().map(|m| m.label.clone()).collect::<Vec<_>>(),
        "failures": failures
            .iter()
            .map(|f| {
                serde_json::json!({
                    "method": f.method,
                    "instance": f.instance,
                    "gauge": f.gauge,
                    "error": f.error,
                })
            })
            .collect::<Vec<_>>(),
    });
    let manifest_path = spec.output_dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).map_err(Error::Json)? + "\n";
    fs::write(&manifest_path, text).map_err(|e| Error::io(&manifest_path, e))?;

    Ok(ExperimentOutcome {
        output_dir: spec.output_dir.clone(),
        instance_ids,
        results,
        failures,
        schedule_warnings: schedule.warnings().to_vec(),
    })
}
