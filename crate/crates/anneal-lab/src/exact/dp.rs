//! Frontier dynamic programming over Chimera unit cells.
//!
//! Cells are scanned line by line along the larger grid dimension, so the
//! frontier holds one pending shore per scan-line position plus one pending
//! shore toward the next cell: L * (min(M,N) + 1) spins. Energies and ground
//! counts propagate per cell; the ground set is recovered by a bounded
//! depth-first traceback against suffix tables.

use crate::error::{Error, Result};
use crate::instance::{IsingInstance, SpinConfig};

use super::{energy_from_view, sort_configs, tie_tolerance, GroundSummary};

pub const DEFAULT_WIDTH_BUDGET: usize = 16;

/// Hard ceiling on the frontier width: tables are dense in 2^width.
const MAX_WIDTH: usize = 30;

pub fn chimera_dp_solve(instance: &IsingInstance, enum_cap: usize) -> Result<GroundSummary> {
    chimera_dp_solve_with_budget(instance, enum_cap, DEFAULT_WIDTH_BUDGET)
}

pub fn chimera_dp_solve_with_budget(
    instance: &IsingInstance,
    enum_cap: usize,
    width_budget: usize,
) -> Result<GroundSummary> {
    let solver = Solver::new(instance, width_budget)?;
    solver.solve(enum_cap)
}

#[derive(Debug, Clone, Copy)]
enum Step {
    /// Process cell at scan position (p, q).
    Cell(usize, usize),
    /// Marginalize the masked frontier bits.
    Merge(u64),
}

/// Per-cell energy tables. `s_major`/`s_minor` give the two shore bitmasks
/// for each enumerated configuration of the cell's working spins; the energy
/// of a transition is e_cfg + e_major[up << L | sM] + e_minor[left << L | sm].
struct CellData {
    working: Vec<(bool, usize)>,
    s_major: Vec<u64>,
    s_minor: Vec<u64>,
    e_cfg: Vec<f64>,
    e_major: Vec<f64>,
    e_minor: Vec<f64>,
}

struct Solver<'a> {
    instance: &'a IsingInstance,
    /// Scan-line count (major axis) and per-line cell count (minor axis).
    major: usize,
    minor: usize,
    shore: usize,
    row_major: bool,
    width: usize,
    cross_shift: usize,
    steps: Vec<Step>,
    cells: Vec<CellData>,
}

impl<'a> Solver<'a> {
    fn new(instance: &'a IsingInstance, width_budget: usize) -> Result<Self> {
        let topo = instance.topology();
        let (m, n, l) = (topo.rows(), topo.cols(), topo.shore_size());
        if l > 8 {
            return Err(Error::Exact(format!(
                "shore size {l} exceeds the DP solver's supported maximum of 8"
            )));
        }
        let row_major = n <= m;
        let (major, minor) = if row_major { (m, n) } else { (n, m) };
        let width = l * (minor + 1);
        if width > width_budget.min(MAX_WIDTH) {
            return Err(Error::Exact(format!(
                "frontier width {width} bits exceeds the budget of {} bits",
                width_budget.min(MAX_WIDTH)
            )));
        }
        let cross_shift = minor * l;
        let mut solver = Solver {
            instance,
            major,
            minor,
            shore: l,
            row_major,
            width,
            cross_shift,
            steps: Vec::new(),
            cells: Vec::new(),
        };
        solver.build_cells();
        solver.build_steps();
        Ok(solver)
    }

    fn grid_coords(&self, p: usize, q: usize) -> (usize, usize) {
        if self.row_major {
            (p, q)
        } else {
            (q, p)
        }
    }

    /// Shore whose couplers pend along the scan direction: shore 0 couples
    /// row to row, shore 1 column to column.
    fn major_shore(&self) -> usize {
        usize::from(!self.row_major)
    }

    fn build_cells(&mut self) {
        let topo = self.instance.topology();
        let j = self.instance.couplings();
        let h = self.instance.fields();
        let l = self.shore;
        let major_shore = self.major_shore();
        let minor_shore = 1 - major_shore;
        for p in 0..self.major {
            for q in 0..self.minor {
                let (r, c) = self.grid_coords(p, q);
                let mut working = Vec::new();
                for k in 0..l {
                    if topo.is_working(topo.vertex_id(r, c, major_shore, k)) {
                        working.push((true, k));
                    }
                }
                for k in 0..l {
                    if topo.is_working(topo.vertex_id(r, c, minor_shore, k)) {
                        working.push((false, k));
                    }
                }
                let n_cfg = 1usize << working.len();
                let mut s_major = vec![0u64; n_cfg];
                let mut s_minor = vec![0u64; n_cfg];
                for cfg in 0..n_cfg {
                    for (bit, &(is_major, k)) in working.iter().enumerate() {
                        if cfg >> bit & 1 == 1 {
                            if is_major {
                                s_major[cfg] |= 1 << k;
                            } else {
                                s_minor[cfg] |= 1 << k;
                            }
                        }
                    }
                }

                let edge_j = |a: usize, b: usize| -> Option<f64> {
                    topo.edge_position(a, b).map(|pos| j[pos])
                };
                // Intra-cell couplers plus both shores' fields, as a function
                // of the cell configuration alone.
                let mut e_cfg = vec![0.0; n_cfg];
                let sgn = |bits: u64, k: usize| if bits >> k & 1 == 1 { 1.0 } else { -1.0 };
                for cfg in 0..n_cfg {
                    let mut e = 0.0;
                    for k0 in 0..l {
                        let u = topo.vertex_id(r, c, major_shore, k0);
                        if !topo.is_working(u) {
                            continue;
                        }
                        for k1 in 0..l {
                            let v = topo.vertex_id(r, c, minor_shore, k1);
                            if let Some(jv) = edge_j(u, v) {
                                e += jv * sgn(s_major[cfg], k0) * sgn(s_minor[cfg], k1);
                            }
                        }
                    }
                    for &(is_major, k) in &working {
                        let shore = if is_major { major_shore } else { minor_shore };
                        let rank = topo.rank_of(topo.vertex_id(r, c, shore, k)).unwrap();
                        let bits = if is_major { s_major[cfg] } else { s_minor[cfg] };
                        e += h[rank] * sgn(bits, k);
                    }
                    e_cfg[cfg] = e;
                }

                // Couplers to the previous cell on the same scan line
                // position (major) and to the previous cell on this line
                // (minor), tabulated over (previous bits, own bits).
                let pair_table = |links: &[(usize, f64)]| -> Vec<f64> {
                    let size = 1usize << l;
                    let mut table = vec![0.0; size * size];
                    for prev in 0..size {
                        for own in 0..size {
                            let mut e = 0.0;
                            for &(k, jv) in links {
                                e += jv * sgn(prev as u64, k) * sgn(own as u64, k);
                            }
                            table[prev << l | own] = e;
                        }
                    }
                    table
                };
                let mut major_links = Vec::new();
                if p > 0 {
                    let (pr, pc) = self.grid_coords(p - 1, q);
                    for k in 0..l {
                        let a = topo.vertex_id(pr, pc, major_shore, k);
                        let b = topo.vertex_id(r, c, major_shore, k);
                        if let Some(jv) = edge_j(a, b) {
                            major_links.push((k, jv));
                        }
                    }
                }
                let mut minor_links = Vec::new();
                if q > 0 {
                    let (pr, pc) = self.grid_coords(p, q - 1);
                    for k in 0..l {
                        let a = topo.vertex_id(pr, pc, minor_shore, k);
                        let b = topo.vertex_id(r, c, minor_shore, k);
                        if let Some(jv) = edge_j(a, b) {
                            minor_links.push((k, jv));
                        }
                    }
                }
                self.cells.push(CellData {
                    working,
                    s_major,
                    s_minor,
                    e_cfg,
                    e_major: pair_table(&major_links),
                    e_minor: pair_table(&minor_links),
                });
            }
        }
    }

    fn build_steps(&mut self) {
        let l = self.shore;
        let l_mask = (1u64 << l) - 1;
        let cross_mask = l_mask << self.cross_shift;
        for p in 0..self.major {
            for q in 0..self.minor {
                if q == 0 && p > 0 {
                    self.steps.push(Step::Merge(cross_mask));
                }
                self.steps.push(Step::Cell(p, q));
                if p == self.major - 1 {
                    self.steps.push(Step::Merge(l_mask << (q * l)));
                }
            }
        }
        self.steps.push(Step::Merge(cross_mask));
    }

    fn cell(&self, p: usize, q: usize) -> &CellData {
        &self.cells[p * self.minor + q]
    }

    #[inline]
    fn transition(&self, state: u64, q: usize, data: &CellData, cfg: usize) -> (u64, f64) {
        let l = self.shore;
        let l_mask = (1u64 << l) - 1;
        let up = state >> (q * l) & l_mask;
        let left = state >> self.cross_shift & l_mask;
        let s_major = data.s_major[cfg];
        let s_minor = data.s_minor[cfg];
        let e = data.e_cfg[cfg]
            + data.e_major[(up << l | s_major) as usize]
            + data.e_minor[(left << l | s_minor) as usize];
        let base = state & !(l_mask << (q * l)) & !(l_mask << self.cross_shift);
        (base | s_major << (q * l) | s_minor << self.cross_shift, e)
    }

    fn solve(&self, enum_cap: usize) -> Result<GroundSummary> {
        let size = 1usize << self.width;
        let mut fwd: Vec<(f64, u64)> = vec![(f64::INFINITY, 0); size];
        fwd[0] = (0.0, 1);
        for step in &self.steps {
            let mut next: Vec<(f64, u64)> = vec![(f64::INFINITY, 0); size];
            match *step {
                Step::Merge(mask) => {
                    for (state, &(v, c)) in fwd.iter().enumerate() {
                        if v.is_finite() {
                            combine(&mut next[state & !mask as usize], v, c);
                        }
                    }
                }
                Step::Cell(p, q) => {
                    let data = self.cell(p, q);
                    for state in 0..size as u64 {
                        let (v, c) = fwd[state as usize];
                        if !v.is_finite() {
                            continue;
                        }
                        for cfg in 0..data.e_cfg.len() {
                            let (tgt, e) = self.transition(state, q, data, cfg);
                            combine(&mut next[tgt as usize], v + e, c);
                        }
                    }
                }
            }
            fwd = next;
        }
        let (dp_e0, degeneracy) = fwd[0];
        if !dp_e0.is_finite() || degeneracy == 0 {
            return Err(Error::Exact("dynamic program reached no final state".into()));
        }

        // The forward sum's association differs from the canonical
        // evaluation order, so re-score the enumerated band exactly and keep
        // the true ties. Integral instances sum exactly either way.
        let band = self.enumerate(dp_e0, enum_cap)?;
        let view = self.instance.coupling_view();
        let mut e0 = dp_e0;
        let mut ground_set = band;
        if !ground_set.is_empty() {
            let scores: Vec<f64> =
                ground_set.iter().map(|c| energy_from_view(&view, c.spins())).collect();
            let best = scores.iter().copied().fold(f64::INFINITY, f64::min);
            let mut keep = scores.iter().map(|&s| s == best);
            ground_set.retain(|_| keep.next().unwrap());
            e0 = best;
        }
        if degeneracy <= enum_cap as u64 && ground_set.len() as u64 != degeneracy {
            return Err(Error::Exact(format!(
                "traceback found {} ground configs, expected {degeneracy}",
                ground_set.len()
            )));
        }
        Ok(GroundSummary {
            e0,
            degeneracy,
            truncated: degeneracy > enum_cap as u64,
            ground_set,
        })
    }

    /// Minimum completion cost tables, one per step boundary.
    fn suffix_tables(&self) -> Vec<Vec<f64>> {
        let size = 1usize << self.width;
        let t_total = self.steps.len();
        let mut sfx: Vec<Vec<f64>> = Vec::with_capacity(t_total + 1);
        sfx.resize(t_total + 1, Vec::new());
        let mut last = vec![f64::INFINITY; size];
        last[0] = 0.0;
        sfx[t_total] = last;
        for t in (0..t_total).rev() {
            let mut table = vec![f64::INFINITY; size];
            match self.steps[t] {
                Step::Merge(mask) => {
                    for (state, slot) in table.iter_mut().enumerate() {
                        *slot = sfx[t + 1][state & !mask as usize];
                    }
                }
                Step::Cell(p, q) => {
                    let data = self.cell(p, q);
                    for (state, slot) in table.iter_mut().enumerate() {
                        let mut best = f64::INFINITY;
                        for cfg in 0..data.e_cfg.len() {
                            let (tgt, e) = self.transition(state as u64, q, data, cfg);
                            let v = e + sfx[t + 1][tgt as usize];
                            if v < best {
                                best = v;
                            }
                        }
                        *slot = best;
                    }
                }
            }
            sfx[t] = table;
        }
        sfx
    }

    /// All configs whose full path cost lands within the tie tolerance of
    /// e0, up to enum_cap of them, sorted.
    fn enumerate(&self, e0: f64, enum_cap: usize) -> Result<Vec<SpinConfig>> {
        if enum_cap == 0 {
            return Ok(Vec::new());
        }
        let sfx = self.suffix_tables();
        let view = self.instance.coupling_view();
        let tol = tie_tolerance(&view, e0);
        let topo = self.instance.topology();
        let major_shore = self.major_shore();
        let mut config = vec![0i8; self.instance.n_spins()];
        let mut found: Vec<SpinConfig> = Vec::new();
        let cap = enum_cap;

        // Iterative DFS over steps; each frame remembers the next cell
        // configuration to try.
        struct Frame {
            t: usize,
            state: u64,
            partial: f64,
            next_cfg: usize,
        }
        let mut stack = vec![Frame { t: 0, state: 0, partial: 0.0, next_cfg: 0 }];
        while let Some(frame) = stack.last_mut() {
            if found.len() >= cap {
                break;
            }
            let t = frame.t;
            if t == self.steps.len() {
                found.push(SpinConfig::new(config.clone()).unwrap());
                stack.pop();
                continue;
            }
            match self.steps[t] {
                Step::Merge(mask) => {
                    if frame.next_cfg > 0 {
                        stack.pop();
                        continue;
                    }
                    frame.next_cfg = 1;
                    let state = frame.state & !mask;
                    let partial = frame.partial;
                    stack.push(Frame { t: t + 1, state, partial, next_cfg: 0 });
                }
                Step::Cell(p, q) => {
                    let data = self.cell(p, q);
                    let mut pushed = false;
                    while frame.next_cfg < data.e_cfg.len() {
                        let cfg = frame.next_cfg;
                        frame.next_cfg += 1;
                        let (tgt, e) = self.transition(frame.state, q, data, cfg);
                        let partial = frame.partial + e;
                        if partial + sfx[t + 1][tgt as usize] <= e0 + tol {
                            let (r, c) = self.grid_coords(p, q);
                            for (bit, &(is_major, k)) in data.working.iter().enumerate() {
                                let shore = if is_major { major_shore } else { 1 - major_shore };
                                let rank =
                                    topo.rank_of(topo.vertex_id(r, c, shore, k)).unwrap();
                                config[rank] = if cfg >> bit & 1 == 1 { 1 } else { -1 };
                            }
                            stack.push(Frame { t: t + 1, state: tgt, partial, next_cfg: 0 });
                            pushed = true;
                            break;
                        }
                    }
                    if !pushed {
                        stack.pop();
                    }
                }
            }
        }

        sort_configs(&mut found);
        Ok(found)
    }
}

fn combine(entry: &mut (f64, u64), value: f64, count: u64) {
    if value < entry.0 {
        *entry = (value, count);
    } else if value == entry.0 {
        entry.1 = entry.1.saturating_add(count);
    }
}
