//! Method-vs-method reports: per-instance bootstrap TV distances, success
//! probabilities, ground-subspace columns, the distance histogram, and the
//! success-probability correlation.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::GroundSummary;
use crate::records::{RunRecord, RunSet};
use crate::stats::{
    bootstrap_distance, fmt_g12, ground_fraction, ground_overlap,
    ground_subspace_distance, histogram, pearson, success_probability, Histogram,
    DEFAULT_BIN_WIDTH,
};

use super::seed::SeedMixer;

#[derive(Debug, Clone)]
pub struct CompareOptions {
    pub bootstraps: usize,
    /// Subspace columns are filled only for instances with degeneracy up to
    /// this cap.
    pub degeneracy_cap: u64,
    pub bin_width: f64,
    pub seed: u64,
}

impl Default for CompareOptions {
    fn default() -> Self {
        CompareOptions {
            bootstraps: 1000,
            degeneracy_cap: 100,
            bin_width: DEFAULT_BIN_WIDTH,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CompareRow {
    pub instance: String,
    pub tv_mean: f64,
    pub tv_std: f64,
    pub success_x: f64,
    pub success_y: f64,
    pub degeneracy: u64,
    pub overlap: Option<f64>,
    pub fraction_x: Option<f64>,
    pub fraction_y: Option<f64>,
    pub subspace_distance: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct CompareReport {
    pub label_x: String,
    pub label_y: String,
    pub rows: Vec<CompareRow>,
    pub histogram: Histogram,
    pub pearson_success: Option<f64>,
}

fn by_instance(sets: &[RunSet]) -> Result<(String, BTreeMap<&str, &RunSet>)> {
    if sets.is_empty() {
        return Err(Error::Stats("no run sets".into()));
    }
    let label = sets[0].method.clone();
    let mut map = BTreeMap::new();
    for set in sets {
        if set.method != label {
            return Err(Error::Stats(format!(
                "mixed methods {label:?} and {:?} in one side of a comparison",
                set.method
            )));
        }
        if map.insert(set.instance.as_str(), set).is_some() {
            return Err(Error::Stats(format!("duplicate run set for {:?}", set.instance)));
        }
    }
    Ok((label, map))
}

pub fn compare_runsets(
    xs: &[RunSet],
    ys: &[RunSet],
    summaries: &BTreeMap<String, GroundSummary>,
    opts: &CompareOptions,
) -> Result<CompareReport> {
    let (label_x, mx) = by_instance(xs)?;
    let (label_y, my) = by_instance(ys)?;
    let only_x: Vec<_> = mx.keys().filter(|k| !my.contains_key(**k)).collect();
    let only_y: Vec<_> = my.keys().filter(|k| !mx.contains_key(**k)).collect();
    if !only_x.is_empty() || !only_y.is_empty() {
        return Err(Error::Stats(format!(
            "instance sets differ: {only_x:?} only in {label_x:?}, {only_y:?} only in {label_y:?}"
        )));
    }

    let pairs: Vec<(&str, &RunSet, &RunSet)> =
        mx.iter().map(|(&id, &x)| (id, x, my[id])).collect();
    let rows: Vec<CompareRow> = pairs
        .par_iter()
        .map(|&(id, x, y)| -> Result<CompareRow> {
            let ground = summaries
                .get(id)
                .ok_or_else(|| Error::Stats(format!("no ground summary for {id:?}")))?;
            let seed = SeedMixer::new(opts.seed).str("bootstrap").str(id).finish();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (tv_mean, tv_std) = bootstrap_distance(x, y, opts.bootstraps, &mut rng)?;
            let success_x = success_probability(x, ground)?;
            let success_y = success_probability(y, ground)?;
            let in_scope = !ground.truncated && ground.degeneracy <= opts.degeneracy_cap;
            let overlap = in_scope.then(|| ground_overlap(x, y, ground)).transpose()?;
            let fraction_x = in_scope.then(|| ground_fraction(x, ground)).transpose()?;
            let fraction_y = in_scope.then(|| ground_fraction(y, ground)).transpose()?;
            let subspace_distance = (in_scope && success_x > 0.0 && success_y > 0.0)
                .then(|| ground_subspace_distance(x, y, ground))
                .transpose()?;
            Ok(CompareRow {
                instance: id.to_string(),
                tv_mean,
                tv_std,
                success_x,
                success_y,
                degeneracy: ground.degeneracy,
                overlap,
                fraction_x,
                fraction_y,
                subspace_distance,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let tv_means: Vec<f64> = rows.iter().map(|r| r.tv_mean).collect();
    let hist = histogram(&tv_means, opts.bin_width)?;
    let sx: Vec<f64> = rows.iter().map(|r| r.success_x).collect();
    let sy: Vec<f64> = rows.iter().map(|r| r.success_y).collect();
    let pearson_success = pearson(&sx, &sy).ok();

    Ok(CompareReport {
        label_x,
        label_y,
        rows,
        histogram: hist,
        pearson_success,
    })
}

/// Split one method's records into two half-gauge pseudo-methods: gauges
/// [0, G/2) and [G/2, G). G must be even.
pub fn split_by_gauge_half(records: &[RunRecord]) -> Result<(Vec<RunSet>, Vec<RunSet>)> {
    if records.is_empty() {
        return Err(Error::Stats("no records to split".into()));
    }
    let g = records.iter().map(|r| r.gauge).max().unwrap() + 1;
    if g % 2 != 0 {
        return Err(Error::Stats(format!("need an even gauge count, got {g}")));
    }
    let half = g / 2;
    let mut first: BTreeMap<String, RunSet> = BTreeMap::new();
    let mut last: BTreeMap<String, RunSet> = BTreeMap::new();
    for r in records {
        let (bucket, suffix) = if r.gauge < half {
            (&mut first, "first")
        } else {
            (&mut last, "last")
        };
        let set = bucket.entry(r.instance.clone()).or_insert_with(|| {
            RunSet::new(r.instance.clone(), format!("{}.{suffix}", r.method))
        });
        let mut r = r.clone();
        r.method = set.method.clone();
        set.records.push(r);
    }
    Ok((
        first.into_values().collect(),
        last.into_values().collect(),
    ))
}

fn opt_cell(v: Option<f64>) -> String {
    v.map(fmt_g12).unwrap_or_default()
}

/// distances.csv, histogram.csv, and summary.csv under `dir`.
pub fn write_compare_report(dir: &Path, report: &CompareReport) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut out = String::from(
        "instance,tv_mean,tv_std,success_x,success_y,degeneracy,overlap,fraction_x,fraction_y,subspace_distance\n",
    );
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.instance,
            fmt_g12(r.tv_mean),
            fmt_g12(r.tv_std),
            fmt_g12(r.success_x),
            fmt_g12(r.success_y),
            r.degeneracy,
            opt_cell(r.overlap),
            opt_cell(r.fraction_x),
            opt_cell(r.fraction_y),
            opt_cell(r.subspace_distance),
        );
    }
    let path = dir.join("distances.csv");
    fs::write(&path, out).map_err(|e| Error::io(&path, e))?;

    crate::stats::write_histogram_csv(&dir.join("histogram.csv"), &report.histogram)?;

    let mut out = String::from("label_x,label_y,instances,pearson_success\n");
    let _ = writeln!(
        out,
        "{},{},{},{}",
        report.label_x,
        report.label_y,
        report.rows.len(),
        report.pearson_success.map(fmt_g12).unwrap_or_default(),
    );
    let path = dir.join("summary.csv");
    fs::write(&path, out).map_err(|e| Error::io(&path, e))?;
    Ok(())
}
