//! Spin-coherent-state kernel: per-qubit overlaps, Bloch angles, the
//! coherent-state energy whose phi = 0 restriction is the rotor energy, and
//! the Berry-phase integrand. Analytic and test-facing only; nothing here
//! samples (the phase factor on the Boltzmann weight rules that out).

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::instance::IsingInstance;
use crate::schedule::TransverseField;

/// Product state of single-qubit Bloch vectors: theta from the +z axis in
/// [0, pi], azimuth phi in [0, 2*pi).
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentState {
    theta: Vec<f64>,
    phi: Vec<f64>,
}

impl CoherentState {
    pub fn new(theta: Vec<f64>, phi: Vec<f64>) -> Result<Self> {
        if theta.len() != phi.len() {
            return Err(Error::Params(format!(
                "{} polar angles but {} azimuths",
                theta.len(),
                phi.len()
            )));
        }
        if theta.iter().any(|t| !(0.0..=PI).contains(t)) {
            return Err(Error::Params("theta must lie in [0, pi]".into()));
        }
        if phi.iter().any(|p| !(0.0..2.0 * PI).contains(p)) {
            return Err(Error::Params("phi must lie in [0, 2*pi)".into()));
        }
        Ok(CoherentState { theta, phi })
    }

    pub fn random<R: Rng>(n: usize, rng: &mut R) -> Self {
        let theta = (0..n).map(|_| rng.random_range(0.0..=PI)).collect();
        let phi = (0..n).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
        CoherentState { theta, phi }
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }
}

/// Single-qubit overlap <a|b> = cos(ta/2)cos(tb/2)
/// + e^{-i(pa-pb)} sin(ta/2)sin(tb/2).
pub fn pair_overlap(theta_a: f64, phi_a: f64, theta_b: f64, phi_b: f64) -> Complex64 {
    let c = (theta_a / 2.0).cos() * (theta_b / 2.0).cos();
    let s = (theta_a / 2.0).sin() * (theta_b / 2.0).sin();
    Complex64::from_polar(1.0, -(phi_a - phi_b)) * s + c
}

/// Angle between the two Bloch vectors, in [0, pi].
pub fn bloch_angle(theta_a: f64, phi_a: f64, theta_b: f64, phi_b: f64) -> f64 {
    let cos = theta_a.cos() * theta_b.cos()
        + theta_a.sin() * theta_b.sin() * (phi_a - phi_b).cos();
    cos.clamp(-1.0, 1.0).acos()
}

/// Full-state overlap <a|b>: product of the per-qubit overlaps.
pub fn state_overlap(a: &CoherentState, b: &CoherentState) -> Result<Complex64> {
    if a.len() != b.len() {
        return Err(Error::Params(format!(
            "state lengths differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let mut k = Complex64::new(1.0, 0.0);
    for i in 0..a.len() {
        k *= pair_overlap(a.theta[i], a.phi[i], b.theta[i], b.phi[i]);
    }
    Ok(k)
}

/// <Omega|H|Omega> under the schedule-weighted Hamiltonian:
/// -sum_i A_i sin(theta_i) cos(phi_i) + B (sum J cos cos + sum h cos).
/// At phi = 0 this is the rotor energy, term for term.
pub fn coherent_energy(
    state: &CoherentState,
    instance: &IsingInstance,
    a: &TransverseField,
    b: f64,
) -> Result<f64> {
    let n = instance.n_spins();
    if state.len() != n {
        return Err(Error::Params(format!("{} qubits for {n} sites", state.len())));
    }
    if let TransverseField::PerSite(v) = a {
        if v.len() != n {
            return Err(Error::Params(format!(
                "per-site A has {} entries for {n} sites",
                v.len()
            )));
        }
    }
    let cos: Vec<f64> = state.theta.iter().map(|t| t.cos()).collect();
    let mut e = 0.0;
    for (i, t) in state.theta.iter().enumerate() {
        e -= a.at(i) * t.sin() * state.phi[i].cos();
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

/// The Berry-phase term <Omega|d/dtau|Omega> = i sum_j sin^2(theta_j/2)
/// dphi_j/dtau. Purely imaginary by construction; it is the obstruction to
/// Monte Carlo sampling of the coherent-state path integral, and vanishes
/// exactly when the phis are held constant.
///
/// The prefactor follows from expanding the pair overlap at constant theta:
/// K = cos^2(t/2) + e^{-i dphi} sin^2(t/2) = 1 - i dphi sin^2(t/2) + ...,
/// so -ln K / delta converges to i phidot sin^2(t/2) per qubit.
pub fn berry_integrand(state: &CoherentState, dphi_dtau: &[f64]) -> Result<Complex64> {
    if dphi_dtau.len() != state.len() {
        return Err(Error::Params(format!(
            "{} rates for {} qubits",
            dphi_dtau.len(),
            state.len()
        )));
    }
    let mut im = 0.0;
    for (t, dp) in state.theta.iter().zip(dphi_dtau) {
        im += (t / 2.0).sin().powi(2) * dp;
    }
    Ok(Complex64::new(0.0, im))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chimera::ChimeraTopology;
    use crate::instance::{random_instance, IsingInstance};
    use crate::sssv::sssv_energy;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;
    use std::sync::Arc;

    #[test]
    fn identical_states_overlap_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let t = rng.random_range(0.0..=PI);
            let p = rng.random_range(0.0..2.0 * PI);
            let k = pair_overlap(t, p, t, p);
            assert!((k - Complex64::new(1.0, 0.0)).norm() <= 1e-12);
        }
    }

    #[test]
    fn antipodal_states_overlap_to_zero() {
        let k = pair_overlap(0.0, 0.0, PI, 1.3);
        assert!(k.norm() <= 1e-12, "{k}");
    }

    #[test]
    fn overlap_magnitude_is_cos_half_bloch_angle() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut worst = 0.0f64;
        for _ in 0..10_000 {
            let (ta, tb) = (rng.random_range(0.0..=PI), rng.random_range(0.0..=PI));
            let (pa, pb) =
                (rng.random_range(0.0..2.0 * PI), rng.random_range(0.0..2.0 * PI));
            let k = pair_overlap(ta, pa, tb, pb);
            let theta = bloch_angle(ta, pa, tb, pb);
            worst = worst.max((k.norm_sqr() - (theta / 2.0).cos().powi(2)).abs());
        }
        assert!(worst <= 1e-12, "worst = {worst:e}");
    }

    #[test]
    fn bloch_angle_limits() {
        assert_eq!(bloch_angle(0.7, 1.1, 0.7, 1.1), 0.0);
        assert_eq!(bloch_angle(0.0, 0.0, PI, 2.2), PI);
    }

    #[test]
    fn bloch_angle_matches_explicit_vectors() {
        let dot = |t1: f64, p1: f64, t2: f64, p2: f64| {
            let v1 = [t1.sin() * p1.cos(), t1.sin() * p1.sin(), t1.cos()];
            let v2 = [t2.sin() * p2.cos(), t2.sin() * p2.sin(), t2.cos()];
            v1[0] * v2[0] + v1[1] * v2[1] + v1[2] * v2[2]
        };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10_000 {
            let (ta, tb) = (rng.random_range(0.0..=PI), rng.random_range(0.0..=PI));
            let (pa, pb) =
                (rng.random_range(0.0..2.0 * PI), rng.random_range(0.0..2.0 * PI));
            let expect = dot(ta, pa, tb, pb).clamp(-1.0, 1.0).acos();
            assert!((bloch_angle(ta, pa, tb, pb) - expect).abs() <= 1e-12);
        }
    }

    fn cell_2x2() -> Arc<ChimeraTopology> {
        Arc::new(ChimeraTopology::build(2, 2, 2, &BTreeSet::new()).unwrap())
    }

    #[test]
    fn zero_phi_energy_equals_rotor_energy() {
        let topo = cell_2x2();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let inst = random_instance(&topo, &mut rng);
            let n = inst.n_spins();
            let theta: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..=PI)).collect();
            let state = CoherentState::new(theta.clone(), vec![0.0; n]).unwrap();
            let a = TransverseField::Uniform(rng.random_range(0.0..5.0));
            let b = rng.random_range(0.0..5.0);
            let ce = coherent_energy(&state, &inst, &a, b).unwrap();
            let se = sssv_energy(&inst, &a, b, &theta).unwrap();
            assert!((ce - se).abs() <= 1e-12, "{ce} vs {se}");
        }
    }

    #[test]
    fn quarter_phase_kills_transverse_term() {
        let topo = cell_2x2();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let inst = random_instance(&topo, &mut rng);
        let n = inst.n_spins();
        let theta: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..=PI)).collect();
        let state = CoherentState::new(theta.clone(), vec![PI / 2.0; n]).unwrap();
        let with_a =
            coherent_energy(&state, &inst, &TransverseField::Uniform(3.0), 1.5).unwrap();
        let ising_only = sssv_energy(&inst, &TransverseField::Uniform(0.0), 1.5, &theta).unwrap();
        assert!((with_a - ising_only).abs() <= 1e-12);
    }

    #[test]
    fn single_qubit_transverse_energy() {
        let mask: BTreeSet<_> = [1].into_iter().collect();
        let topo = Arc::new(ChimeraTopology::build(1, 1, 1, &mask).unwrap());
        let inst = IsingInstance::new(topo, vec![], vec![0.0]).unwrap();
        let state = CoherentState::new(vec![PI / 2.0], vec![0.0]).unwrap();
        let e = coherent_energy(&state, &inst, &TransverseField::Uniform(2.0), 7.0).unwrap();
        assert_eq!(e, -2.0);
    }

    #[test]
    fn berry_integrand_zero_for_constant_phi() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let state = CoherentState::random(5, &mut rng);
        let v = berry_integrand(&state, &[0.0; 5]).unwrap();
        assert_eq!(v, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn berry_integrand_south_pole_unit_rate() {
        let state = CoherentState::new(vec![PI], vec![1.0]).unwrap();
        let v = berry_integrand(&state, &[1.0]).unwrap();
        assert_eq!(v.re, 0.0);
        assert!((v.im - 1.0).abs() <= 1e-12, "{v}");
    }

    /// -ln<Omega(tau)|Omega(tau - delta)>/delta at two step sizes,
    /// Richardson-combined to cancel the order-delta error.
    fn finite_difference(
        theta: &[f64],
        phi0: &[f64],
        omega: &[f64],
        delta: f64,
    ) -> Complex64 {
        let at = |tau: f64| {
            let phi: Vec<f64> =
                phi0.iter().zip(omega).map(|(p, w)| p + w * tau).collect();
            CoherentState::new(theta.to_vec(), phi).unwrap()
        };
        let est = |d: f64| {
            let k = state_overlap(&at(0.0), &at(-d)).unwrap();
            -k.ln() / d
        };
        est(delta / 2.0) * 2.0 - est(delta)
    }

    #[test]
    fn berry_integrand_matches_discretized_overlap() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let n = 4;
            let theta: Vec<f64> = (0..n).map(|_| rng.random_range(0.3..2.8)).collect();
            let phi0: Vec<f64> = (0..n).map(|_| rng.random_range(1.0..2.0)).collect();
            let omega: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
            let state = CoherentState::new(theta.clone(), phi0.clone()).unwrap();
            let analytic = berry_integrand(&state, &omega).unwrap();
            let fd = finite_difference(&theta, &phi0, &omega, 1e-4);
            assert!((fd - analytic).norm() <= 1e-6, "fd {fd} vs {analytic}");
        }
    }

    #[test]
    fn discretized_overlap_real_part_decays_linearly() {
        let theta = [0.9, 1.7, 2.1];
        let phi0 = [1.0, 1.5, 1.9];
        let omega = [1.3, -0.8, 0.5];
        let at = |tau: f64, d: f64| {
            let phi: Vec<f64> =
                phi0.iter().zip(omega).map(|(p, w)| p + w * (tau - d)).collect();
            CoherentState::new(theta.to_vec(), phi).unwrap()
        };
        let re_at = |d: f64| {
            let k = state_overlap(&at(0.0, 0.0), &at(0.0, d)).unwrap();
            (-k.ln() / d).re.abs()
        };
        let ratio = re_at(1e-3) / re_at(5e-4);
        assert!((ratio - 2.0).abs() < 0.2, "ratio = {ratio}");
    }

    #[test]
    fn state_validation() {
        assert!(CoherentState::new(vec![0.1], vec![0.1, 0.2]).is_err());
        assert!(CoherentState::new(vec![3.5], vec![0.0]).is_err());
        assert!(CoherentState::new(vec![1.0], vec![2.0 * PI]).is_err());
        let state = CoherentState::new(vec![1.0], vec![0.0]).unwrap();
        assert!(berry_integrand(&state, &[1.0, 2.0]).is_err());
    }
}
