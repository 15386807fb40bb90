//! Ising instances (J, h) on a Chimera topology, spin configurations, gauge
//! transforms, calibration noise, and crosstalk.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::chimera::{ChimeraTopology, VertexId};
use crate::error::{Error, Result};

/// One spin per working vertex, in vertex-id order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpinConfig {
    spins: Vec<i8>,
}

impl SpinConfig {
    pub fn new(spins: Vec<i8>) -> Result<Self> {
        if spins.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::Instance("spins must be +1 or -1".into()));
        }
        Ok(SpinConfig { spins })
    }

    pub fn all_plus(n: usize) -> Self {
        SpinConfig { spins: vec![1; n] }
    }

    pub fn len(&self) -> usize {
        self.spins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spins.is_empty()
    }

    pub fn spins(&self) -> &[i8] {
        &self.spins
    }

    /// Hex encoding of the spin bit vector: bit j of byte i covers the spin
    /// with dense rank 8i+j, set bit = +1; padding bits in the last byte are
    /// zero; lowercase digits.
    pub fn to_hex(&self) -> String {
        let n_bytes = self.spins.len().div_ceil(8);
        let mut out = String::with_capacity(2 * n_bytes);
        for i in 0..n_bytes {
            let mut byte = 0u8;
            for j in 0..8 {
                if let Some(&s) = self.spins.get(8 * i + j) {
                    if s > 0 {
                        byte |= 1 << j;
                    }
                }
            }
            out.push_str(&format!("{byte:02x}"));
        }
        out
    }

    /// Inverse of `to_hex` for a known spin count.
    pub fn from_hex(hex: &str, n_spins: usize) -> Result<Self> {
        let n_bytes = n_spins.div_ceil(8);
        if hex.len() != 2 * n_bytes {
            return Err(Error::Instance(format!(
                "config hex {hex:?} has {} digits, expected {} for {n_spins} spins",
                hex.len(),
                2 * n_bytes
            )));
        }
        let mut spins = Vec::with_capacity(n_spins);
        for i in 0..n_bytes {
            let byte = u8::from_str_radix(&hex[2 * i..2 * i + 2], 16)
                .map_err(|_| Error::Instance(format!("bad hex in config {hex:?}")))?;
            for j in 0..8 {
                let idx = 8 * i + j;
                if idx < n_spins {
                    spins.push(if byte >> j & 1 == 1 { 1 } else { -1 });
                } else if byte >> j & 1 == 1 {
                    return Err(Error::Instance(format!(
                        "config hex {hex:?} has nonzero padding bits"
                    )));
                }
            }
        }
        Ok(SpinConfig { spins })
    }
}

/// Per-vertex signs a_i in {-1,+1} defining a gauge transform.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gauge {
    signs: Vec<i8>,
}

impl Gauge {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if signs.iter().any(|&a| a != 1 && a != -1) {
            return Err(Error::Instance("gauge signs must be +1 or -1".into()));
        }
        Ok(Gauge { signs })
    }

    pub fn identity(n: usize) -> Self {
        Gauge { signs: vec![1; n] }
    }

    /// Fair random signs, one per working vertex.
    pub fn random<R: Rng>(n: usize, rng: &mut R) -> Self {
        let signs = (0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
        Gauge { signs }
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }
}

/// Relabel a configuration by a gauge: s'_i = a_i s_i. Involution.
pub fn gauge_config(config: &SpinConfig, gauge: &Gauge) -> Result<SpinConfig> {
    if config.len() != gauge.len() {
        return Err(Error::Instance(format!(
            "config has {} spins but gauge has {}",
            config.len(),
            gauge.len()
        )));
    }
    let spins = config.spins.iter().zip(&gauge.signs).map(|(&s, &a)| s * a).collect();
    Ok(SpinConfig { spins })
}

/// Couplings and fields on a topology. J is stored per edge in topology edge
/// order, h per working vertex in rank order.
#[derive(Debug, Clone)]
pub struct IsingInstance {
    topology: Arc<ChimeraTopology>,
    j: Vec<f64>,
    h: Vec<f64>,
}

impl IsingInstance {
    pub fn new(topology: Arc<ChimeraTopology>, j: Vec<f64>, h: Vec<f64>) -> Result<Self> {
        if j.len() != topology.edges().len() {
            return Err(Error::Instance(format!(
                "{} couplings for {} edges",
                j.len(),
                topology.edges().len()
            )));
        }
        if h.len() != topology.n_working() {
            return Err(Error::Instance(format!(
                "{} fields for {} working vertices",
                h.len(),
                topology.n_working()
            )));
        }
        if j.iter().chain(&h).any(|v| !v.is_finite()) {
            return Err(Error::Instance("couplings and fields must be finite".into()));
        }
        Ok(IsingInstance { topology, j, h })
    }

    pub fn topology(&self) -> &Arc<ChimeraTopology> {
        &self.topology
    }

    pub fn n_spins(&self) -> usize {
        self.topology.n_working()
    }

    /// Couplings in topology edge order.
    pub fn couplings(&self) -> &[f64] {
        &self.j
    }

    /// Fields in working-vertex rank order.
    pub fn fields(&self) -> &[f64] {
        &self.h
    }

    /// H = sum_edges J_ij s_i s_j + sum_i h_i s_i.
    pub fn ising_energy(&self, config: &SpinConfig) -> Result<f64> {
        if config.len() != self.n_spins() {
            return Err(Error::Instance(format!(
                "config has {} spins, instance has {}",
                config.len(),
                self.n_spins()
            )));
        }
        let s = &config.spins;
        let mut e = 0.0;
        for (&(u, v), &j) in self.topology.edges().iter().zip(&self.j) {
            let ru = self.topology.rank_of(u).unwrap();
            let rv = self.topology.rank_of(v).unwrap();
            e += j * f64::from(s[ru] * s[rv]);
        }
        for (&h, &si) in self.h.iter().zip(s) {
            e += h * f64::from(si);
        }
        Ok(e)
    }

    /// Gauge transform: J'_ij = a_i a_j J_ij, h'_i = a_i h_i.
    pub fn apply_gauge(&self, gauge: &Gauge) -> Result<IsingInstance> {
        if gauge.len() != self.n_spins() {
            return Err(Error::Instance(format!(
                "gauge has {} signs, instance has {} spins",
                gauge.len(),
                self.n_spins()
            )));
        }
        let a = gauge.signs();
        let j = self
            .topology
            .edges()
            .iter()
            .zip(&self.j)
            .map(|(&(u, v), &jv)| {
                let ru = self.topology.rank_of(u).unwrap();
                let rv = self.topology.rank_of(v).unwrap();
                f64::from(a[ru] * a[rv]) * jv
            })
            .collect();
        let h = self.h.iter().zip(a).map(|(&hv, &ai)| f64::from(ai) * hv).collect();
        Ok(IsingInstance { topology: Arc::clone(&self.topology), j, h })
    }

    /// Add Gaussian(0, sigma) calibration noise independently to every
    /// coupling (edge order) and then every field (rank order).
    pub fn perturb<R: Rng>(&self, sigma: f64, rng: &mut R) -> Result<IsingInstance> {
        if sigma < 0.0 || !sigma.is_finite() {
            return Err(Error::Instance(format!("sigma must be >= 0, got {sigma}")));
        }
        if sigma == 0.0 {
            return Ok(self.clone());
        }
        let normal = Normal::new(0.0, sigma)
            .map_err(|e| Error::Instance(format!("bad noise width: {e}")))?;
        let j = self.j.iter().map(|&v| v + normal.sample(rng)).collect();
        let h = self.h.iter().map(|&v| v + normal.sample(rng)).collect();
        Ok(IsingInstance { topology: Arc::clone(&self.topology), j, h })
    }

    /// Background-susceptibility crosstalk:
    /// J'_ij = J_ij + chi * sum_k J_ik J_kj over common neighbors k, and
    /// h'_i = h_i + chi * sum_j J_ij h_j. Meant for small |chi|.
    pub fn apply_crosstalk(&self, chi: f64) -> IsingInstance {
        let topo = &self.topology;
        let j_of = |a: VertexId, b: VertexId| -> f64 {
            topo.edge_position(a, b).map_or(0.0, |p| self.j[p])
        };
        let mut j = self.j.clone();
        for (pos, &(u, v)) in topo.edges().iter().enumerate() {
            let mut sum = 0.0;
            // Both adjacency lists are sorted; walk their intersection.
            let (au, av) = (topo.neighbors(u).unwrap(), topo.neighbors(v).unwrap());
            let (mut iu, mut iv) = (0, 0);
            while iu < au.len() && iv < av.len() {
                match au[iu].cmp(&av[iv]) {
                    std::cmp::Ordering::Less => iu += 1,
                    std::cmp::Ordering::Greater => iv += 1,
                    std::cmp::Ordering::Equal => {
                        let k = au[iu];
                        sum += j_of(u, k) * j_of(k, v);
                        iu += 1;
                        iv += 1;
                    }
                }
            }
            j[pos] += chi * sum;
        }
        let mut h = self.h.clone();
        for (rank, &v) in topo.working().iter().enumerate() {
            let mut sum = 0.0;
            for &w in topo.neighbors(v).unwrap() {
                let rw = topo.rank_of(w).unwrap();
                sum += j_of(v, w) * self.h[rw];
            }
            h[rank] += chi * sum;
        }
        IsingInstance { topology: Arc::clone(topo), j, h }
    }

    /// Neighbor-list form used by the samplers and the exact solvers.
    pub fn coupling_view(&self) -> CouplingView {
        let topo = &self.topology;
        let n = self.n_spins();
        let mut neighbors = vec![Vec::new(); n];
        for (&(u, v), &j) in topo.edges().iter().zip(&self.j) {
            let ru = topo.rank_of(u).unwrap();
            let rv = topo.rank_of(v).unwrap();
            neighbors[ru].push((rv, j));
            neighbors[rv].push((ru, j));
        }
        let integral = self.j.iter().chain(&self.h).all(|v| v.fract() == 0.0);
        CouplingView { neighbors, fields: self.h.clone(), integral }
    }
}

/// Fair +-1 couplings on every edge, all fields zero.
pub fn random_instance<R: Rng>(topology: &Arc<ChimeraTopology>, rng: &mut R) -> IsingInstance {
    let j = (0..topology.edges().len())
        .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
        .collect();
    let h = vec![0.0; topology.n_working()];
    IsingInstance { topology: Arc::clone(topology), j, h }
}

/// Per-rank neighbor lists (rank, J) plus fields; `integral` is true when all
/// couplings and fields are integer-valued, enabling tabulated acceptance
/// probabilities in the samplers.
#[derive(Debug, Clone)]
pub struct CouplingView {
    pub neighbors: Vec<Vec<(usize, f64)>>,
    pub fields: Vec<f64>,
    pub integral: bool,
}

impl CouplingView {
    pub fn n_spins(&self) -> usize {
        self.fields.len()
    }

    /// Local field l_i = sum_j J_ij s_j + h_i.
    pub fn local_field(&self, i: usize, spins: &[i8]) -> f64 {
        let mut l = self.fields[i];
        for &(j, jv) in &self.neighbors[i] {
            l += jv * f64::from(spins[j]);
        }
        l
    }

    pub fn max_degree(&self) -> usize {
        self.neighbors.iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// Write an instance as `i j value` coupling lines (i < j) and `i i value`
/// field lines, merged in ascending (i, j) order so output is byte-stable.
pub fn write_instance(path: &Path, instance: &IsingInstance) -> Result<()> {
    let topo = instance.topology();
    let mut lines: Vec<(VertexId, VertexId, f64)> = Vec::new();
    for (rank, &v) in topo.working().iter().enumerate() {
        lines.push((v, v, instance.fields()[rank]));
    }
    for (&(u, v), &j) in topo.edges().iter().zip(instance.couplings()) {
        lines.push((u, v, j));
    }
    lines.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    let mut text = String::new();
    for (i, j, v) in lines {
        text.push_str(&format!("{i} {j} {v}\n"));
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Read an instance written by `write_instance`. Couplings must sit on
/// topology edges; omitted couplings and fields default to zero.
pub fn read_instance(path: &Path, topology: Arc<ChimeraTopology>) -> Result<IsingInstance> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut j = vec![0.0; topology.edges().len()];
    let mut h = vec![0.0; topology.n_working()];
    let mut seen_j = vec![false; j.len()];
    let mut seen_h = vec![false; h.len()];
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.split_once('#') {
            Some((before, _)) => before,
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let bad = |msg: String| Error::parse(path, format!("line {}: {msg}", lineno + 1));
        let mut parts = line.split_whitespace();
        let (a, b, c) = match (parts.next(), parts.next(), parts.next(), parts.next()) {
            (Some(a), Some(b), Some(c), None) => (a, b, c),
            _ => return Err(bad(format!("expected `i j value`, got {line:?}"))),
        };
        let u: VertexId = a.parse().map_err(|_| bad(format!("bad vertex id {a:?}")))?;
        let v: VertexId = b.parse().map_err(|_| bad(format!("bad vertex id {b:?}")))?;
        let value: f64 = c.parse().map_err(|_| bad(format!("bad value {c:?}")))?;
        if !value.is_finite() {
            return Err(bad(format!("value {value} is not finite")));
        }
        if u == v {
            let rank = topology
                .rank_of(u)
                .ok_or_else(|| bad(format!("field on broken or out-of-range vertex {u}")))?;
            if seen_h[rank] {
                return Err(bad(format!("duplicate field for vertex {u}")));
            }
            seen_h[rank] = true;
            h[rank] = value;
        } else {
            if u > v {
                return Err(bad(format!("coupling must have i < j, got {u} {v}")));
            }
            let pos = topology
                .edge_position(u, v)
                .ok_or_else(|| bad(format!("({u}, {v}) is not a topology edge")))?;
            if seen_j[pos] {
                return Err(bad(format!("duplicate coupling for edge ({u}, {v})")));
            }
            seen_j[pos] = true;
            j[pos] = value;
        }
    }
    IsingInstance::new(topology, j, h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    fn cell_topo() -> Arc<ChimeraTopology> {
        Arc::new(ChimeraTopology::build(1, 1, 4, &BTreeSet::new()).unwrap())
    }

    #[test]
    fn hex_roundtrip() {
        let c = SpinConfig::new(vec![1, -1, -1, 1, 1, 1, -1, 1, -1, 1]).unwrap();
        let hex = c.to_hex();
        assert_eq!(hex.len(), 4);
        assert_eq!(SpinConfig::from_hex(&hex, 10).unwrap(), c);
    }

    #[test]
    fn hex_known_values() {
        // Two spins: (+,-) sets only bit 0, (-,+) only bit 1.
        assert_eq!(SpinConfig::new(vec![1, -1]).unwrap().to_hex(), "01");
        assert_eq!(SpinConfig::new(vec![-1, 1]).unwrap().to_hex(), "02");
    }

    #[test]
    fn hex_rejects_padding() {
        assert!(SpinConfig::from_hex("04", 2).is_err());
        assert!(SpinConfig::from_hex("0", 2).is_err());
    }

    #[test]
    fn random_instance_is_deterministic() {
        let topo = cell_topo();
        let a = random_instance(&topo, &mut ChaCha8Rng::seed_from_u64(9));
        let b = random_instance(&topo, &mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a.couplings(), b.couplings());
        assert!(a.couplings().iter().all(|&j| j == 1.0 || j == -1.0));
        assert!(a.fields().iter().all(|&h| h == 0.0));
    }

    #[test]
    fn coupling_mean_over_many_draws() {
        let topo = cell_topo();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut sum = 0.0;
        let mut count = 0usize;
        while count < 100_000 {
            let inst = random_instance(&topo, &mut rng);
            sum += inst.couplings().iter().sum::<f64>();
            count += inst.couplings().len();
        }
        assert!((sum / count as f64).abs() < 0.01);
    }

    #[test]
    fn energy_two_spins() {
        let topo = Arc::new(ChimeraTopology::build(1, 1, 1, &BTreeSet::new()).unwrap());
        let inst = IsingInstance::new(topo, vec![1.0], vec![0.0, 0.0]).unwrap();
        let pp = SpinConfig::new(vec![1, 1]).unwrap();
        let pm = SpinConfig::new(vec![1, -1]).unwrap();
        assert_eq!(inst.ising_energy(&pp).unwrap(), 1.0);
        assert_eq!(inst.ising_energy(&pm).unwrap(), -1.0);
    }

    #[test]
    fn energy_ferromagnetic_cell() {
        let topo = cell_topo();
        let inst = IsingInstance::new(topo, vec![-1.0; 16], vec![0.0; 8]).unwrap();
        let all_plus = SpinConfig::all_plus(8);
        assert_eq!(inst.ising_energy(&all_plus).unwrap(), -16.0);
    }

    #[test]
    fn gauge_covariance_of_energy() {
        let topo = cell_topo();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let inst = random_instance(&topo, &mut rng);
            let inst = inst.perturb(0.3, &mut rng).unwrap();
            let gauge = Gauge::random(8, &mut rng);
            let spins: Vec<i8> =
                (0..8).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
            let config = SpinConfig::new(spins).unwrap();
            let e = inst.ising_energy(&config).unwrap();
            let ge = inst
                .apply_gauge(&gauge)
                .unwrap()
                .ising_energy(&gauge_config(&config, &gauge).unwrap())
                .unwrap();
            assert_eq!(e, ge);
        }
    }

    #[test]
    fn gauge_is_involution() {
        let topo = cell_topo();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let inst = random_instance(&topo, &mut rng);
        let gauge = Gauge::random(8, &mut rng);
        let back = inst.apply_gauge(&gauge).unwrap().apply_gauge(&gauge).unwrap();
        assert_eq!(inst.couplings(), back.couplings());
        assert_eq!(inst.fields(), back.fields());
    }

    #[test]
    fn perturb_noise_width() {
        let topo = Arc::new(ChimeraTopology::build(4, 4, 4, &BTreeSet::new()).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let inst = random_instance(&topo, &mut rng);
        let mut deltas = Vec::new();
        while deltas.len() < 100_000 {
            let noisy = inst.perturb(0.05, &mut rng).unwrap();
            deltas.extend(
                noisy.couplings().iter().zip(inst.couplings()).map(|(a, b)| a - b),
            );
        }
        let n = deltas.len() as f64;
        let mean = deltas.iter().sum::<f64>() / n;
        let var = deltas.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!((var.sqrt() - 0.05).abs() < 0.002, "std {}", var.sqrt());
    }

    #[test]
    fn perturb_rejects_negative_sigma() {
        let topo = cell_topo();
        let inst = random_instance(&topo, &mut ChaCha8Rng::seed_from_u64(0));
        assert!(inst.perturb(-0.1, &mut ChaCha8Rng::seed_from_u64(0)).is_err());
    }

    #[test]
    fn crosstalk_zero_chi_is_identity() {
        let topo = cell_topo();
        let inst = random_instance(&topo, &mut ChaCha8Rng::seed_from_u64(2));
        let out = inst.apply_crosstalk(0.0);
        assert_eq!(inst.couplings(), out.couplings());
        assert_eq!(inst.fields(), out.fields());
    }

    #[test]
    fn crosstalk_no_common_neighbors() {
        // A 2-vertex chain: the lone edge has no common neighbors.
        let topo = Arc::new(ChimeraTopology::build(1, 1, 1, &BTreeSet::new()).unwrap());
        let inst = IsingInstance::new(topo, vec![1.0], vec![0.2, -0.3]).unwrap();
        let out = inst.apply_crosstalk(0.5);
        assert_eq!(out.couplings(), &[1.0]);
        // Fields do shift: h'_0 = h_0 + chi * J_01 h_1.
        assert_eq!(out.fields(), &[0.2 + 0.5 * -0.3, -0.3 + 0.5 * 0.2]);
    }

    #[test]
    fn crosstalk_hand_summed_cell() {
        // K_{4,4}: vertices 0 and 4 are adjacent; their common neighbors are
        // empty (bipartite), so check a same-shore pair path instead: 0 and 1
        // share neighbors {4,5,6,7} but have no edge. The edge (0,4) gains
        // nothing from common neighbors; verify against the formula directly.
        let topo = cell_topo();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let inst = random_instance(&topo, &mut rng);
        let chi = 0.05;
        let out = inst.apply_crosstalk(chi);
        for (pos, &(u, v)) in topo.edges().iter().enumerate() {
            let mut sum = 0.0;
            for &k in topo.neighbors(u).unwrap() {
                if topo.neighbors(v).unwrap().contains(&k) {
                    let ju = inst.couplings()[topo.edge_position(u, k).unwrap()];
                    let jv = inst.couplings()[topo.edge_position(k, v).unwrap()];
                    sum += ju * jv;
                }
            }
            assert_eq!(out.couplings()[pos], inst.couplings()[pos] + chi * sum);
        }
    }

    #[test]
    fn crosstalk_vertical_pair_hand_value() {
        // C(2,1,1): vertices 0-1 intra cell 0, 2-3 intra cell 1, 0-2 vertical.
        // Edge (0,2): no common neighbor in this tiny graph. Build C(2,1,2)
        // instead and hand-check one modified coupling.
        let topo = Arc::new(ChimeraTopology::build(2, 1, 2, &BTreeSet::new()).unwrap());
        let ones = vec![1.0; topo.edges().len()];
        let inst = IsingInstance::new(Arc::clone(&topo), ones, vec![0.0; 8]).unwrap();
        let out = inst.apply_crosstalk(0.1);
        for (pos, &(u, v)) in topo.edges().iter().enumerate() {
            let common = topo
                .neighbors(u)
                .unwrap()
                .iter()
                .filter(|k| topo.neighbors(v).unwrap().contains(k))
                .count();
            assert_eq!(out.couplings()[pos], 1.0 + 0.1 * common as f64);
        }
    }

    #[test]
    fn energy_linear_in_couplings() {
        let topo = cell_topo();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let inst = random_instance(&topo, &mut rng).perturb(0.2, &mut rng).unwrap();
        let alpha = 1.7;
        let scaled = IsingInstance::new(
            Arc::clone(&topo),
            inst.couplings().iter().map(|j| alpha * j).collect(),
            inst.fields().iter().map(|h| alpha * h).collect(),
        )
        .unwrap();
        let spins: Vec<i8> = (0..8).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
        let config = SpinConfig::new(spins).unwrap();
        let e = inst.ising_energy(&config).unwrap();
        let se = scaled.ising_energy(&config).unwrap();
        assert!((se - alpha * e).abs() < 1e-12);
    }

    #[test]
    fn file_roundtrip_is_byte_stable() {
        let dir = tempfile::tempdir().unwrap();
        let topo = cell_topo();
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let inst = random_instance(&topo, &mut rng).perturb(0.05, &mut rng).unwrap();
        let p1 = dir.path().join("a.txt");
        let p2 = dir.path().join("b.txt");
        write_instance(&p1, &inst).unwrap();
        let back = read_instance(&p1, Arc::clone(&topo)).unwrap();
        assert_eq!(inst.couplings(), back.couplings());
        assert_eq!(inst.fields(), back.fields());
        write_instance(&p2, &back).unwrap();
        assert_eq!(fs::read(&p1).unwrap(), fs::read(&p2).unwrap());
    }

    #[test]
    fn read_rejects_non_edges() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.txt");
        fs::write(&path, "0 1 1.0\n").unwrap(); // same shore: not an edge
        assert!(read_instance(&path, cell_topo()).is_err());
    }
}
