//! Shared oracles for the integration suites: dense transverse-field
//! diagonalization, basis indexing, and small builders.

// Each test binary compiles this module separately and uses a different
// subset of it.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use nalgebra::DMatrix;

use anneal_lab::chimera::ChimeraTopology;
use anneal_lab::instance::{IsingInstance, SpinConfig};

pub fn topology(m: usize, n: usize, l: usize) -> Arc<ChimeraTopology> {
    Arc::new(ChimeraTopology::build(m, n, l, &BTreeSet::new()).unwrap())
}

/// Index in the sigma-z product basis: bit i set when spin i is down.
pub fn basis_index(config: &SpinConfig) -> usize {
    config
        .spins()
        .iter()
        .enumerate()
        .map(|(i, &s)| usize::from(s < 0) << i)
        .sum()
}

pub fn config_of_index(idx: usize, n: usize) -> SpinConfig {
    let spins = (0..n)
        .map(|i| if idx >> i & 1 == 1 { -1 } else { 1 })
        .collect();
    SpinConfig::new(spins).unwrap()
}

/// Diagonal of exp(-beta H)/Z for H = -A sum_i sigma^x_i + B H_Ising, by
/// dense symmetric diagonalization: the distribution slice readout samples
/// in equilibrium, up to Trotter error.
pub fn diagonal_thermal(instance: &IsingInstance, a: f64, b: f64, beta: f64) -> Vec<f64> {
    let n = instance.n_spins();
    let dim = 1usize << n;
    let mut ham = DMatrix::<f64>::zeros(dim, dim);
    for z in 0..dim {
        ham[(z, z)] = b * instance.ising_energy(&config_of_index(z, n)).unwrap();
        for i in 0..n {
            ham[(z, z ^ (1 << i))] = -a;
        }
    }
    let eig = ham.symmetric_eigen();
    let floor = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&l| (-beta * (l - floor)).exp())
        .collect();
    let mut p = vec![0.0; dim];
    for k in 0..dim {
        let w = weights[k];
        for z in 0..dim {
            p[z] += eig.eigenvectors[(z, k)].powi(2) * w;
        }
    }
    let total: f64 = p.iter().sum();
    for v in &mut p {
        *v /= total;
    }
    p
}

pub fn tv_vec(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Two spins, one bond: C(1,1,1) with J = +1 and h = (0.3, -0.2).
pub fn two_spin_instance() -> IsingInstance {
    IsingInstance::new(topology(1, 1, 1), vec![1.0], vec![0.3, -0.2]).unwrap()
}

/// One K_{2,2} cell: J over edges (0,2),(0,3),(1,2),(1,3) and mixed fields.
pub fn four_spin_instance() -> IsingInstance {
    IsingInstance::new(
        topology(1, 1, 2),
        vec![1.0, -1.0, 1.0, 1.0],
        vec![0.2, 0.0, -0.3, 0.1],
    )
    .unwrap()
}
