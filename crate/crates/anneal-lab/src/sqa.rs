//! Discrete-time path-integral Monte Carlo annealer for the transverse-field
//! Ising model: M_tau periodic Trotter slices, site-local Metropolis updates,
//! and optional per-site imaginary-time cluster moves.
//!
//! The sampled weight is exp(-S) with
//!   S = sum_m [ (beta/M_tau) B E_Ising(slice m) - sum_i Jperp_i s_{m,i} s_{m+1,i} ],
//! slice M_tau-1 coupling back to slice 0. Flipping one spin costs
//!   dS = 2 s_{m,i} [ Jperp_i (s_{m-1,i} + s_{m+1,i}) - (beta/M_tau) B l_{m,i} ],
//! l being the local Ising field; acceptance is exp(-dS).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::instance::{CouplingView, IsingInstance, SpinConfig};
use crate::records::RunRecord;
use crate::schedule::{
    sweep_fraction, temperature_to_energy, AnnealSchedule, TransverseField,
};

/// Transverse amplitudes are clamped to this floor (GHz) so the slice
/// coupling stays finite as A -> 0 at the end of the schedule.
pub const A_FLOOR_GHZ: f64 = 1e-6;

/// Slice coupling Jperp = -(1/2) ln tanh(A dtau). Decreasing in A dtau and
/// saturates to exactly 0 once tanh rounds to 1.
pub fn transverse_coupling(a_ghz: f64, dtau: f64) -> Result<f64> {
    if !(a_ghz > 0.0) || !(dtau > 0.0) {
        return Err(Error::Params(format!(
            "transverse_coupling needs A > 0 and dtau > 0, got A={a_ghz} dtau={dtau}"
        )));
    }
    Ok((-0.5 * (a_ghz * dtau).tanh().ln()).max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReadoutPolicy {
    #[default]
    RandomSlice,
    BestSlice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UpdatePolicy {
    SiteLocal,
    #[default]
    SiteLocalPlusCluster,
}

#[derive(Debug, Clone)]
pub struct SqaParams {
    pub temperature_mk: f64,
    pub sweeps: usize,
    pub trotter_slices: usize,
    pub seed: u64,
    pub readout: ReadoutPolicy,
    pub updates: UpdatePolicy,
    pub per_qubit_schedule: bool,
}

impl SqaParams {
    pub fn new(temperature_mk: f64, sweeps: usize, seed: u64) -> Self {
        SqaParams {
            temperature_mk,
            sweeps,
            trotter_slices: 64,
            seed,
            readout: ReadoutPolicy::default(),
            updates: UpdatePolicy::default(),
            per_qubit_schedule: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.temperature_mk > 0.0) {
            return Err(Error::Params(format!(
                "temperature must be > 0 mK, got {}",
                self.temperature_mk
            )));
        }
        if self.sweeps == 0 {
            return Err(Error::Params("sweep count must be >= 1".into()));
        }
        if self.trotter_slices < 2 {
            return Err(Error::Params(format!(
                "need at least 2 Trotter slices, got {}",
                self.trotter_slices
            )));
        }
        Ok(())
    }
}

/// Spins on a (slice x site) grid, periodic in the slice direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathIntegralState {
    spins: Vec<i8>,
    n_slices: usize,
    n_sites: usize,
}

impl PathIntegralState {
    pub fn random<R: Rng>(n_slices: usize, n_sites: usize, rng: &mut R) -> Self {
        let spins = (0..n_slices * n_sites)
            .map(|_| if rng.random::<bool>() { 1 } else { -1 })
            .collect();
        PathIntegralState { spins, n_slices, n_sites }
    }

    pub fn from_spins(spins: Vec<i8>, n_slices: usize, n_sites: usize) -> Result<Self> {
        if spins.len() != n_slices * n_sites {
            return Err(Error::Params(format!(
                "{} spins for {n_slices} x {n_sites} state",
                spins.len()
            )));
        }
        if spins.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::Params("state spins must be +1 or -1".into()));
        }
        Ok(PathIntegralState { spins, n_slices, n_sites })
    }

    pub fn n_slices(&self) -> usize {
        self.n_slices
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn get(&self, slice: usize, site: usize) -> i8 {
        self.spins[slice * self.n_sites + site]
    }

    pub fn set(&mut self, slice: usize, site: usize, spin: i8) {
        self.spins[slice * self.n_sites + site] = spin;
    }

    pub fn slice(&self, slice: usize) -> &[i8] {
        &self.spins[slice * self.n_sites..(slice + 1) * self.n_sites]
    }
}

fn jperp_field(a: &TransverseField, n_sites: usize, dtau: f64) -> Result<TransverseField> {
    match a {
        TransverseField::Uniform(v) => {
            Ok(TransverseField::Uniform(transverse_coupling(v.max(A_FLOOR_GHZ), dtau)?))
        }
        TransverseField::PerSite(vs) => {
            if vs.len() != n_sites {
                return Err(Error::Params(format!(
                    "per-site A has {} entries for {n_sites} sites",
                    vs.len()
                )));
            }
            let j = vs
                .iter()
                .map(|v| transverse_coupling(v.max(A_FLOOR_GHZ), dtau))
                .collect::<Result<Vec<f64>>>()?;
            Ok(TransverseField::PerSite(j))
        }
    }
}

/// Action change for flipping the single spin (slice, site). Reference
/// implementation for the tabulated acceptance factors the sweep uses.
#[cfg(test)]
fn flip_cost(
    state: &PathIntegralState,
    view: &CouplingView,
    jperp: &TransverseField,
    dtau_b: f64,
    slice: usize,
    site: usize,
) -> f64 {
    let m_tau = state.n_slices;
    let s = f64::from(state.get(slice, site));
    let prev = f64::from(state.get((slice + m_tau - 1) % m_tau, site));
    let next = f64::from(state.get((slice + 1) % m_tau, site));
    let l = view.local_field(site, state.slice(slice));
    2.0 * s * (jperp.at(site) * (prev + next) - dtau_b * l)
}

/// Total action of a state at fixed A, B, beta. Diagnostic counterpart of the
/// incremental costs used by the sweep.
pub fn path_action(
    state: &PathIntegralState,
    view: &CouplingView,
    a: &TransverseField,
    b: f64,
    beta: f64,
) -> Result<f64> {
    check_sweep_inputs(state, view, beta)?;
    let m_tau = state.n_slices;
    let dtau = beta / m_tau as f64;
    let jperp = jperp_field(a, state.n_sites, dtau)?;
    let mut action = 0.0;
    for m in 0..m_tau {
        let spins = state.slice(m);
        let mut e_slice = 0.0;
        for i in 0..state.n_sites {
            for &(j, jv) in &view.neighbors[i] {
                if j > i {
                    e_slice += jv * f64::from(spins[i] * spins[j]);
                }
            }
            e_slice += view.fields[i] * f64::from(spins[i]);
        }
        action += dtau * b * e_slice;
        let next = (m + 1) % m_tau;
        for i in 0..state.n_sites {
            action -= jperp.at(i) * f64::from(state.get(m, i) * state.get(next, i));
        }
    }
    Ok(action)
}

fn check_sweep_inputs(state: &PathIntegralState, view: &CouplingView, beta: f64) -> Result<()> {
    if state.n_sites != view.n_spins() {
        return Err(Error::Params(format!(
            "state has {} sites, instance has {}",
            state.n_sites,
            view.n_spins()
        )));
    }
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::Params(format!("beta must be > 0, got {beta}")));
    }
    Ok(())
}

/// Acceptance factors exp(-dS) tabulated over integer local fields, for
/// instances whose couplings and fields are all integers and a uniform A.
/// Bit-identical to the direct computation because multiplying by s = +-1 is
/// exact.
struct AcceptTable {
    table: Vec<f64>,
    bound: i64,
}

impl AcceptTable {
    fn build(view: &CouplingView, jperp: f64, dtau_b: f64) -> Option<Self> {
        if !view.integral {
            return None;
        }
        let bound = view
            .neighbors
            .iter()
            .zip(&view.fields)
            .map(|(nbrs, h)| {
                nbrs.iter().map(|(_, j)| j.abs()).sum::<f64>() + h.abs()
            })
            .fold(0.0f64, f64::max) as i64;
        let width = 2 * bound + 1;
        let mut table = vec![0.0; 3 * width as usize];
        for (u_idx, u) in [-2.0f64, 0.0, 2.0].iter().enumerate() {
            for v in -bound..=bound {
                let ds = 2.0 * (jperp * u - dtau_b * v as f64);
                table[u_idx * width as usize + (v + bound) as usize] = (-ds).exp();
            }
        }
        Some(AcceptTable { table, bound })
    }

    #[inline]
    fn accept(&self, u: i64, v: i64) -> f64 {
        let width = (2 * self.bound + 1) as usize;
        self.table[(u / 2 + 1) as usize * width + (v + self.bound) as usize]
    }
}

/// One pass of site-local Metropolis updates over all (slice, site) spins in
/// slice-major order, then (policy permitting) one imaginary-time cluster
/// attempt per site.
pub fn sqa_sweep<R: Rng>(
    state: &mut PathIntegralState,
    view: &CouplingView,
    a: &TransverseField,
    b: f64,
    beta: f64,
    rng: &mut R,
    policy: UpdatePolicy,
) -> Result<()> {
    check_sweep_inputs(state, view, beta)?;
    let m_tau = state.n_slices;
    let dtau = beta / m_tau as f64;
    let dtau_b = dtau * b;
    let jperp = jperp_field(a, state.n_sites, dtau)?;
    let table = match &jperp {
        TransverseField::Uniform(j) => AcceptTable::build(view, *j, dtau_b),
        TransverseField::PerSite(_) => None,
    };
    site_pass(state, view, &jperp, dtau_b, table.as_ref(), rng);
    if policy == UpdatePolicy::SiteLocalPlusCluster {
        cluster_pass(state, view, &jperp, dtau_b, rng);
    }
    Ok(())
}

fn site_pass<R: Rng>(
    state: &mut PathIntegralState,
    view: &CouplingView,
    jperp: &TransverseField,
    dtau_b: f64,
    table: Option<&AcceptTable>,
    rng: &mut R,
) {
    let m_tau = state.n_slices;
    let n = state.n_sites;
    for m in 0..m_tau {
        let prev_base = ((m + m_tau - 1) % m_tau) * n;
        let next_base = ((m + 1) % m_tau) * n;
        let base = m * n;
        for i in 0..n {
            let s = state.spins[base + i];
            let pn = state.spins[prev_base + i] + state.spins[next_base + i];
            let mut l = view.fields[i];
            for &(j, jv) in &view.neighbors[i] {
                l += jv * f64::from(state.spins[base + j]);
            }
            let p = match table {
                Some(t) => {
                    let u = i64::from(s) * i64::from(pn);
                    let v = (f64::from(s) * l) as i64;
                    t.accept(u, v)
                }
                None => {
                    let ds = 2.0
                        * f64::from(s)
                        * (jperp.at(i) * f64::from(pn) - dtau_b * l);
                    (-ds).exp()
                }
            };
            if p >= 1.0 || rng.random::<f64>() < p {
                state.spins[base + i] = -s;
            }
        }
    }
}

/// Wolff-style cluster in imaginary time: one attempt per site, growing a
/// contiguous run of aligned slices across time bonds with probability
/// 1 - exp(-2 Jperp), then a Metropolis test on the Ising terms alone.
fn cluster_pass<R: Rng>(
    state: &mut PathIntegralState,
    view: &CouplingView,
    jperp: &TransverseField,
    dtau_b: f64,
    rng: &mut R,
) {
    let m_tau = state.n_slices;
    let n = state.n_sites;
    for i in 0..n {
        let p_add = 1.0 - (-2.0 * jperp.at(i)).exp();
        let m0 = rng.random_range(0..m_tau);
        let val = state.get(m0, i);
        // Grow to later slices, then earlier ones; members stay contiguous.
        let mut len = 1;
        while len < m_tau {
            let next = (m0 + len) % m_tau;
            if state.get(next, i) != val || rng.random::<f64>() >= p_add {
                break;
            }
            len += 1;
        }
        let mut back = 0;
        while len + back < m_tau {
            let prev = (m0 + m_tau - back - 1) % m_tau;
            if state.get(prev, i) != val || rng.random::<f64>() >= p_add {
                break;
            }
            back += 1;
        }
        let start = (m0 + m_tau - back) % m_tau;
        let total = len + back;
        let mut lsum = 0.0;
        for k in 0..total {
            let m = (start + k) % m_tau;
            lsum += view.local_field(i, state.slice(m));
        }
        let ds = -2.0 * dtau_b * f64::from(val) * lsum;
        if ds <= 0.0 || rng.random::<f64>() < (-ds).exp() {
            for k in 0..total {
                let m = (start + k) % m_tau;
                state.set(m, i, -val);
            }
        }
    }
}

/// Project a path state to one configuration: a uniformly random slice by
/// default, or the slice with the lowest Ising energy (earliest wins ties;
/// biased, for experiments only).
pub fn slice_readout<R: Rng>(
    state: &PathIntegralState,
    policy: ReadoutPolicy,
    view: &CouplingView,
    rng: &mut R,
) -> Result<SpinConfig> {
    if state.n_sites != view.n_spins() {
        return Err(Error::Params(format!(
            "state has {} sites, instance has {}",
            state.n_sites,
            view.n_spins()
        )));
    }
    let m = match policy {
        ReadoutPolicy::RandomSlice => rng.random_range(0..state.n_slices),
        ReadoutPolicy::BestSlice => {
            let mut best = 0;
            let mut best_e = f64::INFINITY;
            for m in 0..state.n_slices {
                let spins = state.slice(m);
                let mut e = 0.0;
                for i in 0..state.n_sites {
                    for &(j, jv) in &view.neighbors[i] {
                        if j > i {
                            e += jv * f64::from(spins[i] * spins[j]);
                        }
                    }
                    e += view.fields[i] * f64::from(spins[i]);
                }
                if e < best_e {
                    best_e = e;
                    best = m;
                }
            }
            best
        }
    };
    SpinConfig::new(state.slice(m).to_vec())
}

/// Full anneal: random initial slices, one sweep per schedule step with A, B
/// and Jperp recomputed each sweep, then slice readout. Energy and gap
/// semantics match `sssv_anneal`.
pub fn sqa_anneal(
    instance: &IsingInstance,
    schedule: &AnnealSchedule,
    params: &SqaParams,
) -> Result<RunRecord> {
    params.validate()?;
    let beta = 1.0 / temperature_to_energy(params.temperature_mk)?;
    let view = instance.coupling_view();
    let n = instance.n_spins();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut state = PathIntegralState::random(params.trotter_slices, n, &mut rng);
    let per_qubit = params.per_qubit_schedule && schedule.has_per_qubit();
    let mut a_buf = vec![0.0; n];
    for sweep in 0..params.sweeps {
        let s = sweep_fraction(sweep, params.sweeps);
        let (a_shared, b) = schedule.evaluate(s, None)?;
        let a = if per_qubit {
            for (rank, &v) in instance.topology().working().iter().enumerate() {
                a_buf[rank] = schedule.evaluate(s, Some(v))?.0;
            }
            TransverseField::PerSite(a_buf.clone())
        } else {
            TransverseField::Uniform(a_shared)
        };
        sqa_sweep(&mut state, &view, &a, b, beta, &mut rng, params.updates)?;
    }
    let config = slice_readout(&state, params.readout, &view, &mut rng)?;
    let energy = instance.ising_energy(&config)?;
    Ok(RunRecord {
        instance: String::new(),
        method: "sqa".into(),
        gauge: 0,
        run: 0,
        seed: params.seed,
        config_hex: config.to_hex(),
        energy,
        gap: f64::NAN,
    })
}
