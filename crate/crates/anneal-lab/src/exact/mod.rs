//! Exact ground energy, degeneracy, and ground-set enumeration: the oracle
//! behind every success, overlap, and fraction measure.

mod dp;

pub use dp::{chimera_dp_solve, chimera_dp_solve_with_budget, DEFAULT_WIDTH_BUDGET};

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::instance::{CouplingView, IsingInstance, SpinConfig};

pub const DEFAULT_MAX_SPINS: usize = 26;
pub const DEFAULT_ENUM_CAP: usize = 256;

/// Exact ground-state data for one instance. The ground set may be truncated
/// at a cap; the degeneracy never is.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundSummary {
    pub e0: f64,
    pub degeneracy: u64,
    /// Lexicographically sorted by spin vector (-1 before +1).
    pub ground_set: Vec<SpinConfig>,
    pub truncated: bool,
}

impl GroundSummary {
    pub fn contains(&self, config: &SpinConfig) -> bool {
        self.ground_set.binary_search_by(|c| c.spins().cmp(config.spins())).is_ok()
    }
}

/// Energy accumulated in rank order: for each site its fields plus couplings
/// to higher-ranked neighbors. One fixed summation order shared by the brute
/// solver's candidate re-evaluation.
pub(crate) fn energy_from_view(view: &CouplingView, spins: &[i8]) -> f64 {
    let mut e = 0.0;
    for i in 0..spins.len() {
        for &(j, jv) in &view.neighbors[i] {
            if j > i {
                e += jv * f64::from(spins[i] * spins[j]);
            }
        }
        e += view.fields[i] * f64::from(spins[i]);
    }
    e
}

pub(crate) fn sort_configs(set: &mut [SpinConfig]) {
    set.sort_by(|a, b| a.spins().cmp(b.spins()));
}

/// Float-equality slack for near-degenerate sums: zero for all-integer
/// instances (sums are exact), otherwise a small relative band.
pub(crate) fn tie_tolerance(view: &CouplingView, scale: f64) -> f64 {
    if view.integral {
        0.0
    } else {
        1e-9 * (1.0 + scale.abs())
    }
}

/// Exhaustive enumeration over all 2^n configurations via a Gray-code walk.
pub fn brute_force_solve(instance: &IsingInstance) -> Result<GroundSummary> {
    brute_force_solve_with_cap(instance, DEFAULT_MAX_SPINS)
}

pub fn brute_force_solve_with_cap(
    instance: &IsingInstance,
    max_spins: usize,
) -> Result<GroundSummary> {
    let n = instance.n_spins();
    if n > max_spins {
        return Err(Error::Exact(format!(
            "{n} spins exceeds the brute-force cap of {max_spins}; use chimera_dp_solve"
        )));
    }
    let view = instance.coupling_view();
    let mut spins = vec![-1i8; n];
    let mut energy = energy_from_view(&view, &spins);
    let mut min_seen = energy;
    // Masks whose (drift-prone) running energy sits within tolerance of the
    // running minimum; exact energies are recomputed at the end.
    let mut candidates: Vec<u64> = vec![0];
    const CANDIDATE_CAP: usize = 1 << 21;
    for step in 1u64..1u64 << n {
        let flip = step.trailing_zeros() as usize;
        // Flipping spin r changes the energy by -2 s_r l_r.
        energy -= 2.0 * f64::from(spins[flip]) * view.local_field(flip, &spins);
        spins[flip] = -spins[flip];
        let mask = step ^ (step >> 1);
        let tol = tie_tolerance(&view, min_seen);
        if energy <= min_seen + tol {
            if energy < min_seen {
                min_seen = energy;
            }
            candidates.push(mask);
            if candidates.len() > CANDIDATE_CAP {
                let keep_below = min_seen + tie_tolerance(&view, min_seen);
                let view_ref = &view;
                candidates.retain(|&m| {
                    let s = mask_to_spins(m, n);
                    energy_from_view(view_ref, &s) <= keep_below
                });
                if candidates.len() > CANDIDATE_CAP {
                    return Err(Error::Exact(
                        "ground set too large for brute-force enumeration".into(),
                    ));
                }
            }
        }
    }
    let mut best = f64::INFINITY;
    let mut exact: Vec<(u64, f64)> = Vec::with_capacity(candidates.len());
    for &mask in &candidates {
        let s = mask_to_spins(mask, n);
        let e = energy_from_view(&view, &s);
        if e < best {
            best = e;
        }
        exact.push((mask, e));
    }
    let mut ground_set: Vec<SpinConfig> = exact
        .into_iter()
        .filter(|&(_, e)| e == best)
        .map(|(mask, _)| SpinConfig::new(mask_to_spins(mask, n)).unwrap())
        .collect();
    sort_configs(&mut ground_set);
    ground_set.dedup_by(|a, b| a.spins() == b.spins());
    Ok(GroundSummary {
        e0: best,
        degeneracy: ground_set.len() as u64,
        ground_set,
        truncated: false,
    })
}

fn mask_to_spins(mask: u64, n: usize) -> Vec<i8> {
    (0..n).map(|r| if mask >> r & 1 == 1 { 1 } else { -1 }).collect()
}

/// Gap of a configuration against the exact ground energy. Tiny negative
/// values from summation-order differences snap to zero; anything clearly
/// below E0 means E0 was not a true minimum and is an error.
pub fn energy_gap(instance: &IsingInstance, config: &SpinConfig, e0: f64) -> Result<f64> {
    let energy = instance.ising_energy(config)?;
    let gap = energy - e0;
    let tol = 1e-9 * (1.0 + e0.abs());
    if gap < -tol {
        return Err(Error::Exact(format!(
            "config energy {energy} undercuts claimed ground energy {e0}"
        )));
    }
    Ok(gap.max(0.0))
}

/// Write a ground summary: `E0`, `D` and `truncated` header lines, then one
/// hex config per line.
pub fn write_ground_summary(path: &Path, summary: &GroundSummary) -> Result<()> {
    let mut text = format!(
        "E0 {}\nD {}\ntruncated {}\n",
        summary.e0,
        summary.degeneracy,
        u8::from(summary.truncated)
    );
    for config in &summary.ground_set {
        text.push_str(&config.to_hex());
        text.push('\n');
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_ground_summary(path: &Path, n_spins: usize) -> Result<GroundSummary> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines();
    let mut field = |name: &str| -> Result<String> {
        let line = lines
            .next()
            .ok_or_else(|| Error::parse(path, format!("missing {name} line")))?;
        line.strip_prefix(name)
            .and_then(|rest| rest.strip_prefix(' '))
            .map(str::to_string)
            .ok_or_else(|| Error::parse(path, format!("expected `{name} <value>`, got {line:?}")))
    };
    let e0: f64 = field("E0")?
        .parse()
        .map_err(|_| Error::parse(path, "bad E0 value"))?;
    let degeneracy: u64 = field("D")?
        .parse()
        .map_err(|_| Error::parse(path, "bad D value"))?;
    let truncated = match field("truncated")?.as_str() {
        "0" => false,
        "1" => true,
        other => {
            return Err(Error::parse(path, format!("bad truncated flag {other:?}")));
        }
    };
    let mut ground_set = Vec::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        ground_set.push(SpinConfig::from_hex(line.trim(), n_spins)?);
    }
    if !truncated && ground_set.len() as u64 != degeneracy {
        return Err(Error::parse(
            path,
            format!("D = {degeneracy} but {} configs listed without truncation", ground_set.len()),
        ));
    }
    Ok(GroundSummary { e0, degeneracy, ground_set, truncated })
}
