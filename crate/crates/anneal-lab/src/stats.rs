//! Comparison measures between run sets: gap distributions, total variation
//! distance with bootstrap error bars, success probability, ground-set
//! overlap and fraction, ground-subspace distance, Pearson correlation, and
//! histogram/scatter emission.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::Rng;

use crate::error::{Error, Result};
use crate::exact::GroundSummary;
use crate::records::RunSet;

/// Fig-style bin width, ~1/sqrt(runs per gauge) at R = 1000.
pub const DEFAULT_BIN_WIDTH: f64 = 1.0 / 30.0;

/// How the empirical gap distribution weighs outcomes. Runs weigh each
/// annealing run equally; Levels spread mass uniformly over the distinct
/// observed energy levels. Runs is the default everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GapWeighting {
    #[default]
    Runs,
    Levels,
}

/// Discrete distribution over observed energy gaps.
#[derive(Debug, Clone, PartialEq)]
pub struct GapDistribution {
    support: Vec<f64>,
    mass: Vec<f64>,
}

impl GapDistribution {
    pub fn new(support: Vec<f64>, mass: Vec<f64>) -> Result<Self> {
        if support.len() != mass.len() {
            return Err(Error::Stats(format!(
                "{} support points but {} masses",
                support.len(),
                mass.len()
            )));
        }
        if support.is_empty() {
            return Err(Error::Stats("empty distribution".into()));
        }
        if support.iter().any(|x| !x.is_finite()) || support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Stats("support must be finite and strictly increasing".into()));
        }
        if mass.iter().any(|m| !(*m >= 0.0)) {
            return Err(Error::Stats("masses must be nonnegative".into()));
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Stats(format!("masses sum to {total}, not 1")));
        }
        Ok(GapDistribution { support, mass })
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn mass_at(&self, x: f64) -> f64 {
        match self.support.binary_search_by(|s| s.total_cmp(&x)) {
            Ok(i) => self.mass[i],
            Err(_) => 0.0,
        }
    }
}

fn checked_gaps(runset: &RunSet) -> Result<Vec<f64>> {
    if runset.records.is_empty() {
        return Err(Error::Stats(format!("run set {:?} is empty", runset.instance)));
    }
    for r in &runset.records {
        if !r.gap.is_finite() || r.gap < 0.0 {
            return Err(Error::Stats(format!(
                "run {}/{}/{}/{} has gap {}; fill gaps from an exact summary first",
                r.instance, r.method, r.gauge, r.run, r.gap
            )));
        }
    }
    Ok(runset.records.iter().map(|r| r.gap).collect())
}

fn distribution_from_gaps(gaps: &[f64], weighting: GapWeighting) -> GapDistribution {
    let mut sorted = gaps.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut support = Vec::new();
    let mut counts: Vec<usize> = Vec::new();
    for &g in &sorted {
        if support.last() == Some(&g) {
            *counts.last_mut().unwrap() += 1;
        } else {
            support.push(g);
            counts.push(1);
        }
    }
    let mass = match weighting {
        GapWeighting::Runs => {
            let n = gaps.len() as f64;
            counts.iter().map(|&c| c as f64 / n).collect()
        }
        GapWeighting::Levels => vec![1.0 / support.len() as f64; support.len()],
    };
    GapDistribution { support, mass }
}

pub fn gap_distribution(runset: &RunSet) -> Result<GapDistribution> {
    gap_distribution_with(runset, GapWeighting::Runs)
}

pub fn gap_distribution_with(
    runset: &RunSet,
    weighting: GapWeighting,
) -> Result<GapDistribution> {
    Ok(distribution_from_gaps(&checked_gaps(runset)?, weighting))
}

/// Half the L1 distance over the union of supports.
pub fn tv_distance(p: &GapDistribution, q: &GapDistribution) -> Result<f64> {
    for (label, d) in [("first", p), ("second", q)] {
        let total: f64 = d.mass.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Stats(format!(
                "{label} distribution sums to {total}, not 1"
            )));
        }
    }
    let mut sum = 0.0;
    let (mut i, mut j) = (0, 0);
    while i < p.support.len() || j < q.support.len() {
        let take_p = j >= q.support.len()
            || (i < p.support.len() && p.support[i] <= q.support[j]);
        let take_q = i >= p.support.len()
            || (j < q.support.len() && q.support[j] <= p.support[i]);
        let pm = if take_p { p.mass[i] } else { 0.0 };
        let qm = if take_q { q.mass[j] } else { 0.0 };
        sum += (pm - qm).abs();
        if take_p {
            i += 1;
        }
        if take_q {
            j += 1;
        }
    }
    Ok(sum / 2.0)
}

/// Records mapped onto the merged support of both run sets, so a bootstrap
/// resample is a counting pass instead of a sort.
struct IndexedGaps {
    level_of: Vec<usize>,
    n_levels: usize,
}

fn index_gaps(gaps: &[f64], merged: &[f64]) -> IndexedGaps {
    let level_of = gaps
        .iter()
        .map(|g| merged.binary_search_by(|s| s.total_cmp(g)).unwrap())
        .collect();
    IndexedGaps { level_of, n_levels: merged.len() }
}

/// Paired bootstrap of the TV distance: resample each run set with
/// replacement to its own size b times, pair the n-th resamples, and return
/// the mean and sample standard deviation of the b distances.
pub fn bootstrap_distance<R: Rng>(
    x: &RunSet,
    y: &RunSet,
    b: usize,
    rng: &mut R,
) -> Result<(f64, f64)> {
    if b == 0 {
        return Err(Error::Stats("bootstrap count must be >= 1".into()));
    }
    let gx = checked_gaps(x)?;
    let gy = checked_gaps(y)?;
    let mut merged = [gx.as_slice(), gy.as_slice()].concat();
    merged.sort_by(f64::total_cmp);
    merged.dedup();
    let ix = index_gaps(&gx, &merged);
    let iy = index_gaps(&gy, &merged);

    let mut cx = vec![0u32; merged.len()];
    let mut cy = vec![0u32; merged.len()];
    let mut values = Vec::with_capacity(b);
    for _ in 0..b {
        cx.fill(0);
        cy.fill(0);
        for _ in 0..ix.level_of.len() {
            cx[ix.level_of[rng.random_range(0..ix.level_of.len())]] += 1;
        }
        for _ in 0..iy.level_of.len() {
            cy[iy.level_of[rng.random_range(0..iy.level_of.len())]] += 1;
        }
        let (nx, ny) = (ix.level_of.len() as f64, iy.level_of.len() as f64);
        let mut sum = 0.0;
        for k in 0..ix.n_levels {
            sum += (cx[k] as f64 / nx - cy[k] as f64 / ny).abs();
        }
        values.push(sum / 2.0);
    }
    let mean = values.iter().sum::<f64>() / b as f64;
    let std = if b > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (b - 1) as f64).sqrt()
    } else {
        0.0
    };
    Ok((mean, std))
}

/// Fraction of runs that landed in the ground subspace (gap exactly 0).
/// The summary anchors a consistency check: energy - gap must reproduce E0.
pub fn success_probability(runset: &RunSet, ground: &GroundSummary) -> Result<f64> {
    let gaps = checked_gaps(runset)?;
    let tol = 1e-6 * (1.0 + ground.e0.abs());
    for (r, &g) in runset.records.iter().zip(&gaps) {
        if (r.energy - g - ground.e0).abs() > tol {
            return Err(Error::Stats(format!(
                "run {}/{}/{}/{}: energy {} minus gap {} does not match E0 {}",
                r.instance, r.method, r.gauge, r.run, r.energy, g, ground.e0
            )));
        }
    }
    Ok(gaps.iter().filter(|&&g| g == 0.0).count() as f64 / gaps.len() as f64)
}

fn observed_ground_set(runset: &RunSet, ground: &GroundSummary) -> Result<BTreeSet<String>> {
    if ground.truncated {
        return Err(Error::Stats(
            "ground set is truncated; raise the enumeration cap".into(),
        ));
    }
    let known: BTreeSet<String> = ground.ground_set.iter().map(|c| c.to_hex()).collect();
    Ok(runset
        .records
        .iter()
        .filter(|r| known.contains(&r.config_hex))
        .map(|r| r.config_hex.clone())
        .collect())
}

/// |G_X intersect G_Y| / D over distinct observed ground configs.
pub fn ground_overlap(x: &RunSet, y: &RunSet, ground: &GroundSummary) -> Result<f64> {
    let gx = observed_ground_set(x, ground)?;
    let gy = observed_ground_set(y, ground)?;
    let both = gx.intersection(&gy).count();
    Ok(both as f64 / ground.degeneracy as f64)
}

/// |G_X| / D: the share of the ground subspace this method visited.
pub fn ground_fraction(runset: &RunSet, ground: &GroundSummary) -> Result<f64> {
    let g = observed_ground_set(runset, ground)?;
    Ok(g.len() as f64 / ground.degeneracy as f64)
}

fn conditional_ground_masses(
    runset: &RunSet,
    known: &BTreeSet<String>,
) -> Result<Vec<(String, f64)>> {
    let mut counts: Vec<(String, f64)> = Vec::new();
    let mut hits = 0usize;
    for r in &runset.records {
        if known.contains(&r.config_hex) {
            hits += 1;
            match counts.iter_mut().find(|(h, _)| *h == r.config_hex) {
                Some((_, c)) => *c += 1.0,
                None => counts.push((r.config_hex.clone(), 1.0)),
            }
        }
    }
    if hits == 0 {
        return Err(Error::Stats(format!(
            "method {:?} never reached the ground subspace; distance undefined",
            runset.method
        )));
    }
    for (_, c) in &mut counts {
        *c /= hits as f64;
    }
    Ok(counts)
}

/// Trace-norm distance between the two ground-state-conditional
/// distributions; both are diagonal here, so it is half the L1 distance of
/// p_M(g)/p0_M over the union of observed ground configs.
pub fn ground_subspace_distance(
    x: &RunSet,
    y: &RunSet,
    ground: &GroundSummary,
) -> Result<f64> {
    if ground.truncated {
        return Err(Error::Stats(
            "ground set is truncated; raise the enumeration cap".into(),
        ));
    }
    let known: BTreeSet<String> = ground.ground_set.iter().map(|c| c.to_hex()).collect();
    let px = conditional_ground_masses(x, &known)?;
    let py = conditional_ground_masses(y, &known)?;
    let mut keys: BTreeSet<&String> = px.iter().map(|(h, _)| h).collect();
    keys.extend(py.iter().map(|(h, _)| h));
    let lookup = |set: &[(String, f64)], key: &String| {
        set.iter().find(|(h, _)| h == key).map_or(0.0, |(_, m)| *m)
    };
    let sum: f64 = keys.iter().map(|k| (lookup(&px, k) - lookup(&py, k)).abs()).sum();
    Ok(sum / 2.0)
}

/// Sample Pearson correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::Stats(format!(
            "need two equal-length vectors of >= 2 points, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
        sxy += (a - mx) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Stats("zero variance".into()));
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// Counts over [0,1] in fixed-width bins; the final bin is closed at 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub bin_width: f64,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn bin_lo(&self, k: usize) -> f64 {
        k as f64 * self.bin_width
    }

    pub fn bin_hi(&self, k: usize) -> f64 {
        if k + 1 == self.counts.len() {
            1.0
        } else {
            (k + 1) as f64 * self.bin_width
        }
    }

    /// Index of the most-populated bin; earliest wins ties.
    pub fn modal_bin(&self) -> usize {
        let mut best = 0;
        for (k, &c) in self.counts.iter().enumerate() {
            if c > self.counts[best] {
                best = k;
            }
        }
        best
    }
}

pub fn histogram(values: &[f64], bin_width: f64) -> Result<Histogram> {
    if !(bin_width > 0.0 && bin_width <= 1.0) {
        return Err(Error::Stats(format!("bad bin width {bin_width}")));
    }
    let mut n_bins = (1.0 / bin_width + 1e-9).floor() as usize;
    if (n_bins as f64) * bin_width < 1.0 - 1e-12 {
        n_bins += 1;
    }
    let mut counts = vec![0u64; n_bins];
    for &v in values {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::Stats(format!("value {v} outside [0,1]")));
        }
        let k = ((v / bin_width).floor() as usize).min(n_bins - 1);
        counts[k] += 1;
    }
    Ok(Histogram { bin_width, counts })
}

/// One scatter point per instance: success probability and the modal
/// excited-state gap (0 when every run ended in the ground subspace).
#[derive(Debug, Clone, PartialEq)]
pub struct JointRow {
    pub instance: String,
    pub success: f64,
    pub modal_excited_gap: f64,
}

pub fn joint_energy_success(
    pairs: &[(&RunSet, &GroundSummary)],
) -> Result<Vec<JointRow>> {
    let mut rows = Vec::with_capacity(pairs.len());
    for (runset, ground) in pairs {
        let success = success_probability(runset, ground)?;
        let dist = gap_distribution(runset)?;
        let mut modal = 0.0;
        let mut best_mass = 0.0;
        for (&g, &m) in dist.support().iter().zip(dist.mass()) {
            if g > 0.0 && m > best_mass {
                modal = g;
                best_mass = m;
            }
        }
        rows.push(JointRow {
            instance: runset.instance.clone(),
            success,
            modal_excited_gap: modal,
        });
    }
    Ok(rows)
}

/// Render with 12 significant digits, plain decimal where reasonable.
pub fn fmt_g12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..=15).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.11e}")
    }
}

pub fn write_histogram_csv(path: &Path, hist: &Histogram) -> Result<()> {
    let mut out = String::from("bin_lo,bin_hi,count\n");
    for (k, &c) in hist.counts.iter().enumerate() {
        let _ = writeln!(out, "{},{},{c}", fmt_g12(hist.bin_lo(k)), fmt_g12(hist.bin_hi(k)));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn write_joint_csv(path: &Path, rows: &[JointRow]) -> Result<()> {
    let mut out = String::from("instance,success,modal_excited_gap\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{}",
            r.instance,
            fmt_g12(r.success),
            fmt_g12(r.modal_excited_gap)
        );
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::records::RunRecord;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn record(gap: f64, config_hex: &str) -> RunRecord {
        RunRecord {
            instance: "i0".into(),
            method: "m".into(),
            gauge: 0,
            run: 0,
            seed: 0,
            config_hex: config_hex.into(),
            energy: -10.0 + gap,
            gap,
        }
    }

    fn runset(gaps: &[f64]) -> RunSet {
        RunSet {
            instance: "i0".into(),
            method: "m".into(),
            records: gaps.iter().map(|&g| record(g, "00")).collect(),
        }
    }

    #[test]
    fn gap_distribution_counts_runs() {
        let mut gaps = vec![0.0; 600];
        gaps.extend(vec![2.0; 400]);
        let d = gap_distribution(&runset(&gaps)).unwrap();
        assert_eq!(d.support(), &[0.0, 2.0]);
        assert_eq!(d.mass(), &[0.6, 0.4]);
        assert_eq!(d.mass_at(2.0), 0.4);
        assert_eq!(d.mass_at(1.0), 0.0);
    }

    #[test]
    fn gap_distribution_all_ground() {
        let d = gap_distribution(&runset(&[0.0; 50])).unwrap();
        assert_eq!(d.support(), &[0.0]);
        assert_eq!(d.mass(), &[1.0]);
    }

    #[test]
    fn gap_distribution_level_weighting() {
        let d =
            gap_distribution_with(&runset(&[0.0, 0.0, 0.0, 2.0]), GapWeighting::Levels)
                .unwrap();
        assert_eq!(d.mass(), &[0.5, 0.5]);
    }

    #[test]
    fn gap_distribution_permutation_invariant() {
        let a = gap_distribution(&runset(&[0.0, 2.0, 4.0, 2.0, 0.0])).unwrap();
        let b = gap_distribution(&runset(&[4.0, 0.0, 0.0, 2.0, 2.0])).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn gap_distribution_rejects_empty_and_nan() {
        assert!(gap_distribution(&runset(&[])).is_err());
        assert!(gap_distribution(&runset(&[f64::NAN])).is_err());
    }

    fn dist(pairs: &[(f64, f64)]) -> GapDistribution {
        GapDistribution::new(
            pairs.iter().map(|p| p.0).collect(),
            pairs.iter().map(|p| p.1).collect(),
        )
        .unwrap()
    }

    #[test]
    fn tv_distance_examples() {
        let p = dist(&[(0.0, 0.5), (2.0, 0.5)]);
        let q = dist(&[(0.0, 0.75), (2.0, 0.25)]);
        assert_eq!(tv_distance(&p, &p).unwrap(), 0.0);
        assert_eq!(tv_distance(&p, &q).unwrap(), 0.25);
        let a = dist(&[(0.0, 1.0)]);
        let b = dist(&[(2.0, 1.0)]);
        assert_eq!(tv_distance(&a, &b).unwrap(), 1.0);
    }

    #[test]
    fn tv_distance_is_a_metric() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let draw = |rng: &mut ChaCha8Rng| {
                let raw: Vec<f64> = (0..4).map(|_| rng.random_range(0.01..1.0)).collect();
                let total: f64 = raw.iter().sum();
                dist(&[
                    (0.0, raw[0] / total),
                    (2.0, raw[1] / total),
                    (4.0, raw[2] / total),
                    (6.0, raw[3] / total),
                ])
            };
            let (p, q, r) = (draw(&mut rng), draw(&mut rng), draw(&mut rng));
            let pq = tv_distance(&p, &q).unwrap();
            let qp = tv_distance(&q, &p).unwrap();
            assert_eq!(pq, qp);
            let pr = tv_distance(&p, &r).unwrap();
            let rq = tv_distance(&r, &q).unwrap();
            assert!(pq <= pr + rq + 1e-12);
            assert!((0.0..=1.0).contains(&pq));
        }
    }

    #[test]
    fn tv_distance_rejects_unnormalized() {
        let p = dist(&[(0.0, 1.0)]);
        let bad = GapDistribution { support: vec![0.0], mass: vec![0.9] };
        assert!(tv_distance(&p, &bad).is_err());
    }

    #[test]
    fn bootstrap_disjoint_supports() {
        let x = runset(&[0.0; 40]);
        let y = runset(&[2.0; 40]);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (mean, std) = bootstrap_distance(&x, &y, 100, &mut rng).unwrap();
        assert_eq!(mean, 1.0);
        assert_eq!(std, 0.0);
    }

    #[test]
    fn bootstrap_single_draw_is_deterministic() {
        let x = runset(&[0.0, 2.0, 2.0, 4.0]);
        let y = runset(&[0.0, 0.0, 2.0, 4.0]);
        let a = bootstrap_distance(&x, &y, 1, &mut ChaCha8Rng::seed_from_u64(10)).unwrap();
        let b = bootstrap_distance(&x, &y, 1, &mut ChaCha8Rng::seed_from_u64(10)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.1, 0.0);
    }

    #[test]
    fn bootstrap_self_distance_scales_as_inverse_sqrt_runs() {
        let make = |r: usize| {
            let gaps: Vec<f64> =
                (0..r).map(|i| if i % 2 == 0 { 0.0 } else { 2.0 }).collect();
            runset(&gaps)
        };
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (small, _) = bootstrap_distance(&make(400), &make(400), 200, &mut rng).unwrap();
        let (large, _) = bootstrap_distance(&make(1600), &make(1600), 200, &mut rng).unwrap();
        assert!(small <= 4.0 / (400.0f64).sqrt(), "small = {small}");
        let ratio = small / large;
        assert!((1.4..=2.6).contains(&ratio), "ratio = {ratio}");
    }

    fn ground(hexes: &[&str], e0: f64) -> GroundSummary {
        use crate::instance::SpinConfig;
        let mut set: Vec<SpinConfig> =
            hexes.iter().map(|h| SpinConfig::from_hex(h, 4).unwrap()).collect();
        set.sort_by(|a, b| a.spins().cmp(b.spins()));
        GroundSummary {
            e0,
            degeneracy: set.len() as u64,
            ground_set: set,
            truncated: false,
        }
    }

    fn runs_of(configs: &[(&str, f64)]) -> RunSet {
        RunSet {
            instance: "i0".into(),
            method: "m".into(),
            records: configs.iter().map(|&(h, g)| record(g, h)).collect(),
        }
    }

    #[test]
    fn success_probability_counts_zero_gaps() {
        let g = ground(&["00"], -10.0);
        let mut gaps = vec![0.0; 106];
        gaps.extend(vec![2.0; 894]);
        let rs = runset(&gaps);
        assert_eq!(success_probability(&rs, &g).unwrap(), 0.106);
        assert_eq!(success_probability(&runset(&[0.0; 5]), &g).unwrap(), 1.0);
        assert_eq!(success_probability(&runset(&[2.0; 5]), &g).unwrap(), 0.0);
    }

    #[test]
    fn success_probability_checks_energy_consistency() {
        let g = ground(&["00"], -20.0);
        assert!(success_probability(&runset(&[0.0]), &g).is_err());
    }

    #[test]
    fn success_matches_gap_mass_at_zero() {
        let gaps = [vec![0.0; 13], vec![2.0; 7]].concat();
        let rs = runset(&gaps);
        let g = ground(&["00"], -10.0);
        let s = success_probability(&rs, &g).unwrap();
        let d = gap_distribution(&rs).unwrap();
        assert_eq!(s, d.mass_at(0.0));
    }

    #[test]
    fn ground_overlap_and_fraction() {
        // Ground set {g1..g4}; X saw {g1,g2}, Y saw {g2,g3}.
        let g = ground(&["00", "01", "02", "03"], -10.0);
        let x = runs_of(&[("00", 0.0), ("01", 0.0), ("01", 0.0), ("0f", 2.0)]);
        let y = runs_of(&[("01", 0.0), ("02", 0.0)]);
        assert_eq!(ground_overlap(&x, &y, &g).unwrap(), 0.25);
        assert_eq!(ground_fraction(&x, &g).unwrap(), 0.5);
        assert_eq!(ground_fraction(&runs_of(&[("0f", 2.0)]), &g).unwrap(), 0.0);
        let z = runs_of(&[("03", 0.0)]);
        assert_eq!(ground_overlap(&x, &z, &g).unwrap(), 0.0);
    }

    #[test]
    fn truncated_summary_is_rejected() {
        let mut g = ground(&["00", "01"], -10.0);
        g.truncated = true;
        g.degeneracy = 5;
        let x = runs_of(&[("00", 0.0)]);
        assert!(ground_overlap(&x, &x, &g).is_err());
        assert!(ground_fraction(&x, &g).is_err());
        assert!(ground_subspace_distance(&x, &x, &g).is_err());
    }

    #[test]
    fn subspace_distance_examples() {
        let g = ground(&["00", "01", "02"], -10.0);
        // X uniform on {g1,g2}, Y all mass on g1.
        let x = runs_of(&[("00", 0.0), ("01", 0.0), ("0f", 2.0)]);
        let y = runs_of(&[("00", 0.0), ("00", 0.0)]);
        assert_eq!(ground_subspace_distance(&x, &y, &g).unwrap(), 0.5);
        assert_eq!(ground_subspace_distance(&x, &x, &g).unwrap(), 0.0);
        // Disjoint observed ground sets.
        let z = runs_of(&[("02", 0.0)]);
        assert_eq!(ground_subspace_distance(&x, &z, &g).unwrap(), 1.0);
        // A method that never succeeds has no conditional distribution.
        let never = runs_of(&[("0f", 2.0)]);
        assert!(ground_subspace_distance(&x, &never, &g).is_err());
    }

    #[test]
    fn subspace_distance_is_tv_of_conditionals() {
        let g = ground(&["00", "01", "02"], -10.0);
        let x = runs_of(&[("00", 0.0), ("00", 0.0), ("01", 0.0), ("0f", 2.0)]);
        let y = runs_of(&[("01", 0.0), ("02", 0.0), ("02", 0.0)]);
        let dgs = ground_subspace_distance(&x, &y, &g).unwrap();
        // Index the three ground configs 0,1,2 and rebuild both conditionals
        // as gap-style distributions.
        let px = dist(&[(0.0, 2.0 / 3.0), (1.0, 1.0 / 3.0)]);
        let py = dist(&[(1.0, 1.0 / 3.0), (2.0, 2.0 / 3.0)]);
        assert!((dgs - tv_distance(&px, &py).unwrap()).abs() <= 1e-15);
    }

    #[test]
    fn pearson_examples() {
        let x = [1.0, 2.0, 3.0];
        assert_eq!(pearson(&x, &[2.0, 4.0, 6.0]).unwrap(), 1.0);
        assert_eq!(pearson(&x, &[-1.0, -2.0, -3.0]).unwrap(), -1.0);
        assert!(pearson(&x, &[1.0, 1.0, 1.0]).is_err());
        assert!(pearson(&x, &[1.0, 2.0]).is_err());
        let r = pearson(&[1.0, 2.0, 4.0, 3.0], &[1.0, 3.0, 2.0, 4.0]).unwrap();
        assert!((-1.0..=1.0).contains(&r));
    }

    #[test]
    fn histogram_binning() {
        let h = histogram(&[0.0, 1.0, 1.0 / 30.0, 0.99], DEFAULT_BIN_WIDTH).unwrap();
        assert_eq!(h.counts.len(), 30);
        assert_eq!(h.counts[0], 1);
        assert_eq!(h.counts[1], 1);
        assert_eq!(h.counts[29], 2);
        assert_eq!(h.counts.iter().sum::<u64>(), 4);
        assert_eq!(h.bin_lo(1), 1.0 / 30.0);
        assert_eq!(h.bin_hi(29), 1.0);
        assert!(histogram(&[1.1], DEFAULT_BIN_WIDTH).is_err());
        assert!(histogram(&[-0.1], DEFAULT_BIN_WIDTH).is_err());
    }

    #[test]
    fn histogram_modal_bin_prefers_earliest() {
        let h = Histogram { bin_width: 0.5, counts: vec![3, 3] };
        assert_eq!(h.modal_bin(), 0);
    }

    #[test]
    fn joint_table_examples() {
        let g = ground(&["00"], -10.0);
        let all_ground = runs_of(&[("00", 0.0), ("00", 0.0)]);
        let never = runs_of(&[("0f", 2.0), ("0f", 2.0), ("07", 4.0)]);
        let rows =
            joint_energy_success(&[(&all_ground, &g), (&never, &g)]).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!((rows[0].success, rows[0].modal_excited_gap), (1.0, 0.0));
        assert_eq!((rows[1].success, rows[1].modal_excited_gap), (0.0, 2.0));
    }

    #[test]
    fn twelve_digit_formatting() {
        assert_eq!(fmt_g12(0.0), "0");
        assert_eq!(fmt_g12(1.0 / 30.0), "0.0333333333333");
        assert_eq!(fmt_g12(0.106), "0.106000000000");
        assert_eq!(fmt_g12(-80.0), "-80.0000000000");
        assert_eq!(fmt_g12(1.0), "1.00000000000");
        assert!(fmt_g12(1.23e-7).contains('e'));
        let round_trip: f64 = fmt_g12(0.123456789012345).parse().unwrap();
        assert!((round_trip - 0.123456789012345).abs() < 1e-12);
    }

    #[test]
    fn histogram_csv_layout() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("h.csv");
        let h = histogram(&[0.0, 0.5, 1.0], DEFAULT_BIN_WIDTH).unwrap();
        write_histogram_csv(&path, &h).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("bin_lo,bin_hi,count"));
        assert_eq!(lines.next(), Some("0,0.0333333333333,1"));
        assert_eq!(text.lines().count(), 31);
        assert!(text.lines().last().unwrap().ends_with(",1"));
    }
}
