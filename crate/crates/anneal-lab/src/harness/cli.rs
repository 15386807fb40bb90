//! Command line front end. Exit codes: 0 success, 1 usage or run error,
//! 2 partial experiment failure (results and manifest were still written).

use std::collections::{BTreeMap, BTreeSet};
use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, Subcommand};

use crate::chimera::{load_broken_mask, ChimeraTopology};
use crate::error::{Error, Result};
use crate::exact::{
    brute_force_solve, chimera_dp_solve_with_budget, read_ground_summary,
    write_ground_summary, GroundSummary, DEFAULT_ENUM_CAP, DEFAULT_WIDTH_BUDGET,
};
use crate::instance::{read_instance, write_instance};
use crate::records::{group_runsets, read_jsonl, RunSet};
use crate::schedule::load_schedule;
use crate::stats::fmt_g12;

use super::compare::{
    compare_runsets, split_by_gauge_half, write_compare_report, CompareOptions,
};
use super::experiment::{generate_instances, run_experiment};
use super::spec::{load_spec, parse_topology};

#[derive(Parser)]
#[command(name = "anneal-lab", version, about = "Annealer laboratory on Chimera graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate random ±1-coupling instances into a directory
    Gen {
        /// Topology as MxNxL, e.g. 2x2x4
        #[arg(long)]
        topology: String,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        seed: u64,
        /// Output directory for instance_NNNN.txt files
        #[arg(long)]
        out: PathBuf,
        /// Broken-vertex mask file, one id per line
        #[arg(long)]
        broken: Option<PathBuf>,
    },
    /// Solve every instance file in a directory and write .gs summaries
    Solve {
        /// Directory of instance .txt files
        dir: PathBuf,
        #[arg(long)]
        topology: String,
        #[arg(long)]
        broken: Option<PathBuf>,
        /// Ground-set enumeration cap
        #[arg(long, default_value_t = DEFAULT_ENUM_CAP)]
        enum_cap: usize,
        /// Frontier width budget in bits before falling back to brute force
        #[arg(long, default_value_t = DEFAULT_WIDTH_BUDGET)]
        width_budget: usize,
    },
    /// Run a full experiment from a JSON spec
    Anneal {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Compare two results files (or one against itself split by gauge half)
    Compare {
        /// First results .jsonl file
        #[arg(long, requires = "y", conflicts_with = "self_split")]
        x: Option<PathBuf>,
        /// Second results .jsonl file
        #[arg(long, requires = "x")]
        y: Option<PathBuf>,
        /// One results file, split into first/last gauge halves
        #[arg(long)]
        self_split: Option<PathBuf>,
        /// Directory holding the instances' .gs ground summaries
        #[arg(long)]
        instances: PathBuf,
        #[arg(long)]
        topology: String,
        #[arg(long)]
        broken: Option<PathBuf>,
        /// Report output directory
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1000)]
        bootstraps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Blank the subspace columns above this ground-state degeneracy
        #[arg(long, default_value_t = 100)]
        degeneracy_cap: u64,
    },
    /// Validate a schedule file and print its endpoints and warnings
    ScheduleCheck {
        path: PathBuf,
    },
}

pub fn cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn build_topology(topology: &str, broken: &Option<PathBuf>) -> Result<Arc<ChimeraTopology>> {
    let (m, n, l) = parse_topology(topology)?;
    let mask = match broken {
        Some(path) => load_broken_mask(path)?,
        None => Default::default(),
    };
    Ok(Arc::new(ChimeraTopology::build(m, n, l, &mask)?))
}

fn instance_files(dir: &PathBuf) -> Result<Vec<PathBuf>> {
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
    Ok(paths)
}

fn load_summaries(
    dir: &PathBuf,
    ids: &BTreeSet<String>,
    n_spins: usize,
) -> Result<BTreeMap<String, GroundSummary>> {
    ids.iter()
        .map(|id| {
            let path = dir.join(format!("{id}.gs"));
            Ok((id.clone(), read_ground_summary(&path, n_spins)?))
        })
        .collect()
}

fn load_side(path: &PathBuf) -> Result<Vec<RunSet>> {
    Ok(group_runsets(read_jsonl(path)?))
}

fn run(command: Command) -> Result<i32> {
    match command {
        Command::Gen { topology, count, seed, out, broken } => {
            let topo = build_topology(&topology, &broken)?;
            fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
            for (id, inst) in generate_instances(&topo, count, seed) {
                write_instance(&out.join(format!("{id}.txt")), &inst)?;
            }
            println!("wrote {count} instances on {topology} to {}", out.display());
            Ok(0)
        }
        Command::Solve { dir, topology, broken, enum_cap, width_budget } => {
            let topo = build_topology(&topology, &broken)?;
            for path in instance_files(&dir)? {
                let inst = read_instance(&path, Arc::clone(&topo))?;
                let summary = match chimera_dp_solve_with_budget(&inst, enum_cap, width_budget)
                {
                    Ok(s) => Ok(s),
                    Err(Error::Exact(msg)) if msg.contains("width") => brute_force_solve(&inst),
                    Err(e) => Err(e),
                }?;
                write_ground_summary(&path.with_extension("gs"), &summary)?;
                let id = path.file_stem().unwrap_or_default().to_string_lossy();
                let mark = if summary.truncated { " (set truncated)" } else { "" };
                println!(
                    "{id}: E0 {}  degeneracy {}{mark}",
                    fmt_g12(summary.e0),
                    summary.degeneracy
                );
            }
            Ok(0)
        }
        Command::Anneal { spec } => {
            let spec = load_spec(&spec)?;
            let outcome = run_experiment(&spec)?;
            for w in &outcome.schedule_warnings {
                eprintln!("warning: {w}");
            }
            for (label, path) in &outcome.results {
                println!("{label}: {}", path.display());
            }
            if outcome.failures.is_empty() {
                Ok(0)
            } else {
                eprintln!(
                    "{} work items failed; details in {}",
                    outcome.failures.len(),
                    outcome.output_dir.join("manifest.json").display()
                );
                Ok(2)
            }
        }
        Command::Compare {
            x,
            y,
            self_split,
            instances,
            topology,
            broken,
            out,
            bootstraps,
            seed,
            degeneracy_cap,
        } => {
            let (xs, ys) = match (&x, &y, &self_split) {
                (Some(x), Some(y), None) => (load_side(x)?, load_side(y)?),
                (None, None, Some(path)) => split_by_gauge_half(&read_jsonl(path)?)?,
                _ => {
                    return Err(Error::Experiment(
                        "pass either --x and --y, or --self-split".into(),
                    ))
                }
            };
            let topo = build_topology(&topology, &broken)?;
            let ids: BTreeSet<String> =
                xs.iter().chain(&ys).map(|s| s.instance.clone()).collect();
            let summaries = load_summaries(&instances, &ids, topo.n_working())?;
            let opts = CompareOptions { bootstraps, seed, degeneracy_cap, ..Default::default() };
            let report = compare_runsets(&xs, &ys, &summaries, &opts)?;
            write_compare_report(&out, &report)?;
            println!(
                "{} vs {}: {} instances, reports in {}",
                report.label_x,
                report.label_y,
                report.rows.len(),
                out.display()
            );
            if let Some(p) = report.pearson_success {
                println!("success-probability Pearson {}", fmt_g12(p));
            }
            Ok(0)
        }
        Command::ScheduleCheck { path } => {
            let schedule = load_schedule(&path)?;
            let (a0, b0) = schedule.evaluate(0.0, None)?;
            let (a1, b1) = schedule.evaluate(1.0, None)?;
            println!("rows {}", schedule.rows().len());
            println!("s=0: A {}  B {}", fmt_g12(a0), fmt_g12(b0));
            println!("s=1: A {}  B {}", fmt_g12(a1), fmt_g12(b1));
            println!("per-qubit columns {}", schedule.per_qubit_ids().count());
            println!("t_a {} us", fmt_g12(schedule.t_a_us));
            for w in schedule.warnings() {
                println!("warning: {w}");
            }
            Ok(0)
        }
    }
}
