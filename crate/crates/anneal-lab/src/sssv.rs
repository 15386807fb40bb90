//! Classical rotor annealer: planar rotors with angles in [0, pi], Metropolis
//! angle updates, following the annealing schedule.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::instance::{CouplingView, IsingInstance, SpinConfig};
use crate::records::RunRecord;
use crate::schedule::{
    sweep_fraction, temperature_to_energy, AnnealSchedule, TransverseField,
};

/// Rotor angles, one per working vertex, each in [0, pi].
pub type RotorState = Vec<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SweepOrder {
    #[default]
    Sequential,
    RandomPermutation,
}

#[derive(Debug, Clone)]
pub struct SssvParams {
    pub temperature_mk: f64,
    pub sweeps: usize,
    pub seed: u64,
    pub order: SweepOrder,
    /// Evaluate per-qubit transverse columns when the schedule has them.
    pub per_qubit_schedule: bool,
}

impl SssvParams {
    pub fn new(temperature_mk: f64, sweeps: usize, seed: u64) -> Self {
        SssvParams {
            temperature_mk,
            sweeps,
            seed,
            order: SweepOrder::Sequential,
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
        Ok(())
    }
}

/// Rotor energy -sum_i A_i sin(theta_i) + B (sum_ij J cos cos + sum_i h cos),
/// in GHz.
pub fn sssv_energy(
    instance: &IsingInstance,
    a: &TransverseField,
    b: f64,
    theta: &[f64],
) -> Result<f64> {
    let n = instance.n_spins();
    check_angles(theta, n)?;
    if let TransverseField::PerSite(v) = a {
        if v.len() != n {
            return Err(Error::Params(format!(
                "per-site A has {} entries for {n} rotors",
                v.len()
            )));
        }
    }
    let cos: Vec<f64> = theta.iter().map(|t| t.cos()).collect();
    let mut e = 0.0;
    for (i, t) in theta.iter().enumerate() {
        e -= a.at(i) * t.sin();
    }
    let topo = instance.topology();
    for (&(u, v), &j) in topo.edges().iter().zip(instance.couplings()) {
        let ru = topo.rank_of(u).unwrap();
        let rv = topo.rank_of(v).unwrap();
        e += b * j * cos[ru] * cos[rv];
    }
    for (i, &h) in instance.fields().iter().enumerate() {
        e += b * h * cos[i];
    }
    Ok(e)
}

fn check_angles(theta: &[f64], n: usize) -> Result<()> {
    if theta.len() != n {
        return Err(Error::Params(format!("{} angles for {n} rotors", theta.len())));
    }
    if theta.iter().any(|t| !(0.0..=PI).contains(t)) {
        return Err(Error::Params("angles must lie in [0, pi]".into()));
    }
    Ok(())
}

/// Energy change from moving rotor i to an angle with the given sin/cos,
/// using only terms that involve rotor i.
pub(crate) fn rotor_delta(
    view: &CouplingView,
    a: &TransverseField,
    b: f64,
    cos: &[f64],
    sin_i: f64,
    i: usize,
    new_sin: f64,
    new_cos: f64,
) -> f64 {
    let mut lcos = view.fields[i];
    for &(j, jv) in &view.neighbors[i] {
        lcos += jv * cos[j];
    }
    -a.at(i) * (new_sin - sin_i) + b * (new_cos - cos[i]) * lcos
}

/// One Metropolis sweep: every rotor visited once in the policy's order,
/// proposals uniform on [0, pi], acceptance exp(-beta dE).
pub fn sssv_sweep<R: Rng>(
    theta: &mut RotorState,
    view: &CouplingView,
    a: &TransverseField,
    b: f64,
    beta: f64,
    rng: &mut R,
    order: SweepOrder,
) {
    let n = theta.len();
    let mut cos: Vec<f64> = theta.iter().map(|t| t.cos()).collect();
    let mut sin: Vec<f64> = theta.iter().map(|t| t.sin()).collect();
    let mut update = |i: usize, rng: &mut R, cos: &mut [f64], sin: &mut [f64]| {
        let proposal = rng.random_range(0.0..=PI);
        let (new_sin, new_cos) = proposal.sin_cos();
        let de = rotor_delta(view, a, b, cos, sin[i], i, new_sin, new_cos);
        if de <= 0.0 || rng.random::<f64>() < (-beta * de).exp() {
            theta[i] = proposal;
            cos[i] = new_cos;
            sin[i] = new_sin;
        }
    };
    match order {
        SweepOrder::Sequential => {
            for i in 0..n {
                update(i, rng, &mut cos, &mut sin);
            }
        }
        SweepOrder::RandomPermutation => {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(rng);
            for &i in &perm {
                update(i, rng, &mut cos, &mut sin);
            }
        }
    }
}

/// Project rotors to spins: the sign of cos(theta), i.e. +1 for theta below
/// pi/2, -1 above, and a fair coin exactly at pi/2 (where the initial state
/// sits).
pub fn rotor_readout<R: Rng>(theta: &[f64], rng: &mut R) -> SpinConfig {
    let spins = theta
        .iter()
        .map(|&t| {
            if t < FRAC_PI_2 {
                1
            } else if t > FRAC_PI_2 {
                -1
            } else if rng.random::<bool>() {
                1
            } else {
                -1
            }
        })
        .collect();
    SpinConfig::new(spins).expect("readout spins are +-1")
}

/// Full anneal: rotors start at pi/2, one sweep per schedule step, then
/// readout. The record's energy is the classical Ising energy of the readout
/// on the given instance; its gap is NaN until a harness fills it in.
pub fn sssv_anneal(
    instance: &IsingInstance,
    schedule: &AnnealSchedule,
    params: &SssvParams,
) -> Result<RunRecord> {
    params.validate()?;
    let beta = 1.0 / temperature_to_energy(params.temperature_mk)?;
    let view = instance.coupling_view();
    let n = instance.n_spins();
    let mut theta: RotorState = vec![FRAC_PI_2; n];
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
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
        sssv_sweep(&mut theta, &view, &a, b, beta, &mut rng, params.order);
    }
    let config = rotor_readout(&theta, &mut rng);
    let energy = instance.ising_energy(&config)?;
    Ok(RunRecord {
        instance: String::new(),
        method: "sssv".into(),
        gauge: 0,
        run: 0,
        seed: params.seed,
        config_hex: config.to_hex(),
        energy,
        gap: f64::NAN,
    })
}
