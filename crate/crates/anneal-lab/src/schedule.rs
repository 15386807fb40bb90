//! Annealing schedule A(s), B(s) in GHz (hbar = 1), loaded from CSV and
//! linearly interpolated, with optional per-qubit transverse columns.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::chimera::VertexId;
use crate::error::{Error, Result};

/// Energy per millikelvin: the device anchor is 2.61 GHz at 20 mK.
pub const MILLIKELVIN_TO_GHZ: f64 = 2.61 / 20.0;

/// Convert an operating temperature in mK to an energy in GHz.
/// The inverse temperature is 1/this value, in 1/GHz.
pub fn temperature_to_energy(t_mk: f64) -> Result<f64> {
    if !(t_mk > 0.0) || !t_mk.is_finite() {
        return Err(Error::Schedule(format!("temperature must be > 0 mK, got {t_mk}")));
    }
    Ok(t_mk * MILLIKELVIN_TO_GHZ)
}

/// Map sweep index n of a total to the schedule parameter s in [0,1].
/// Sweeps step uniformly, so n of N lands at n/(N-1); a single sweep runs at
/// the end of the schedule.
pub fn sweep_fraction(n: usize, total: usize) -> f64 {
    if total <= 1 {
        1.0
    } else {
        n as f64 / (total - 1) as f64
    }
}

/// Transverse-field amplitude per site: one shared value or one per rank.
#[derive(Debug, Clone)]
pub enum TransverseField {
    Uniform(f64),
    PerSite(Vec<f64>),
}

impl TransverseField {
    pub fn at(&self, rank: usize) -> f64 {
        match self {
            TransverseField::Uniform(a) => *a,
            TransverseField::PerSite(v) => v[rank],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleRow {
    pub s: f64,
    pub a: f64,
    pub b: f64,
}

/// Piecewise-linear annealing schedule. Rows are strictly increasing in s and
/// cover [0, 1]; optional per-qubit columns give a distinct A for named
/// vertex ids.
#[derive(Debug, Clone)]
pub struct AnnealSchedule {
    rows: Vec<ScheduleRow>,
    per_qubit: BTreeMap<VertexId, Vec<f64>>,
    /// Annealing time in microseconds; provenance only, the samplers step by
    /// sweep count.
    pub t_a_us: f64,
    warnings: Vec<String>,
}

impl AnnealSchedule {
    pub fn from_rows(rows: Vec<ScheduleRow>) -> Result<Self> {
        Self::build(rows, BTreeMap::new())
    }

    fn build(rows: Vec<ScheduleRow>, per_qubit: BTreeMap<VertexId, Vec<f64>>) -> Result<Self> {
        if rows.len() < 2 {
            return Err(Error::Schedule(format!("need at least 2 rows, got {}", rows.len())));
        }
        for (i, row) in rows.iter().enumerate() {
            if !row.s.is_finite() || !row.a.is_finite() || !row.b.is_finite() {
                return Err(Error::Schedule(format!("row {}: non-finite value", i + 1)));
            }
            if row.a < 0.0 || row.b < 0.0 {
                return Err(Error::Schedule(format!(
                    "row {}: A and B must be >= 0, got A={} B={}",
                    i + 1,
                    row.a,
                    row.b
                )));
            }
            if i > 0 && row.s <= rows[i - 1].s {
                return Err(Error::Schedule(format!(
                    "row {}: s must increase strictly ({} after {})",
                    i + 1,
                    row.s,
                    rows[i - 1].s
                )));
            }
        }
        if rows[0].s != 0.0 || rows[rows.len() - 1].s != 1.0 {
            return Err(Error::Schedule(format!(
                "s must cover [0, 1], got [{}, {}]",
                rows[0].s,
                rows[rows.len() - 1].s
            )));
        }
        for (q, col) in &per_qubit {
            if col.len() != rows.len() {
                return Err(Error::Schedule(format!(
                    "per-qubit column A_{q} has {} values for {} rows",
                    col.len(),
                    rows.len()
                )));
            }
            if col.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::Schedule(format!(
                    "per-qubit column A_{q} has negative or non-finite values"
                )));
            }
        }
        let mut warnings = Vec::new();
        if rows.windows(2).any(|w| w[1].a > w[0].a) {
            warnings.push("A(s) is not non-increasing".to_string());
        }
        if rows.windows(2).any(|w| w[1].b < w[0].b) {
            warnings.push("B(s) is not non-decreasing".to_string());
        }
        for (q, col) in &per_qubit {
            if col.windows(2).any(|w| w[1] > w[0]) {
                warnings.push(format!("A_{q}(s) is not non-increasing"));
            }
        }
        Ok(AnnealSchedule { rows, per_qubit, t_a_us: 5.0, warnings })
    }

    pub fn rows(&self) -> &[ScheduleRow] {
        &self.rows
    }

    /// Vertex ids that carry their own transverse column.
    pub fn per_qubit_ids(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.per_qubit.keys().copied()
    }

    pub fn has_per_qubit(&self) -> bool {
        !self.per_qubit.is_empty()
    }

    /// Validation warnings collected at load (shape violations that are
    /// tolerated because measured schedules can wiggle).
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// A and B at parameter s by linear interpolation; exact at the nodes.
    /// With a qubit id whose per-qubit column exists, A comes from that
    /// column; otherwise the shared A column is used.
    pub fn evaluate(&self, s: f64, qubit: Option<VertexId>) -> Result<(f64, f64)> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::Schedule(format!("s must lie in [0, 1], got {s}")));
        }
        let a_col = qubit.and_then(|q| self.per_qubit.get(&q));
        let a_at = |i: usize| a_col.map_or(self.rows[i].a, |col| col[i]);
        // Index of the last row with row.s <= s.
        let i = match self.rows.binary_search_by(|row| row.s.partial_cmp(&s).unwrap()) {
            Ok(i) => return Ok((a_at(i), self.rows[i].b)),
            Err(i) => i - 1,
        };
        let (lo, hi) = (self.rows[i], self.rows[i + 1]);
        let t = (s - lo.s) / (hi.s - lo.s);
        Ok((a_at(i) + t * (a_at(i + 1) - a_at(i)), lo.b + t * (hi.b - lo.b)))
    }
}

/// Parse a schedule CSV: header `s,A,B` with optional `A_<id>` columns,
/// values in GHz.
pub fn load_schedule(path: &Path) -> Result<AnnealSchedule> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_schedule(&text).map_err(|e| match e {
        Error::Schedule(msg) => Error::parse(path, msg),
        other => other,
    })
}

fn parse_schedule(text: &str) -> Result<AnnealSchedule> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Schedule("empty schedule file".into()))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols.len() < 3 || cols[0] != "s" || cols[1] != "A" || cols[2] != "B" {
        return Err(Error::Schedule(format!(
            "header must start with `s,A,B`, got {header:?}"
        )));
    }
    let mut qubit_ids = Vec::new();
    for &col in &cols[3..] {
        let id = col
            .strip_prefix("A_")
            .and_then(|rest| rest.parse::<VertexId>().ok())
            .ok_or_else(|| {
                Error::Schedule(format!("per-qubit column must be named A_<id>, got {col:?}"))
            })?;
        if qubit_ids.contains(&id) {
            return Err(Error::Schedule(format!("duplicate per-qubit column A_{id}")));
        }
        qubit_ids.push(id);
    }

    let mut rows = Vec::new();
    let mut per_qubit: BTreeMap<VertexId, Vec<f64>> =
        qubit_ids.iter().map(|&q| (q, Vec::new())).collect();
    for (lineno, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != cols.len() {
            return Err(Error::Schedule(format!(
                "row {}: {} fields, expected {}",
                lineno + 1,
                fields.len(),
                cols.len()
            )));
        }
        let parse = |f: &str| -> Result<f64> {
            f.parse().map_err(|_| {
                Error::Schedule(format!("row {}: bad number {f:?}", lineno + 1))
            })
        };
        rows.push(ScheduleRow { s: parse(fields[0])?, a: parse(fields[1])?, b: parse(fields[2])? });
        for (&q, &f) in qubit_ids.iter().zip(&fields[3..]) {
            per_qubit.get_mut(&q).unwrap().push(parse(f)?);
        }
    }
    AnnealSchedule::build(rows, per_qubit)
}

/// Write a schedule in the same CSV format `load_schedule` reads.
pub fn write_schedule(path: &Path, schedule: &AnnealSchedule) -> Result<()> {
    let mut text = String::from("s,A,B");
    let ids: Vec<VertexId> = schedule.per_qubit.keys().copied().collect();
    for q in &ids {
        text.push_str(&format!(",A_{q}"));
    }
    text.push('\n');
    for (i, row) in schedule.rows.iter().enumerate() {
        text.push_str(&format!("{},{},{}", row.s, row.a, row.b));
        for q in &ids {
            text.push_str(&format!(",{}", schedule.per_qubit[q][i]));
        }
        text.push('\n');
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// The shipped default: an analytic surrogate with the documented device
/// shape. A(s) = 10 exp(-7 s) and B(s) = 12 s^2 GHz on a 101-point grid, so
/// the transverse field starts well above the operating temperature and is
/// negligible against B at the end.
pub fn default_surrogate() -> AnnealSchedule {
    let rows = (0..=100)
        .map(|k| {
            let s = k as f64 / 100.0;
            ScheduleRow { s, a: 10.0 * (-7.0 * s).exp(), b: 12.0 * s * s }
        })
        .collect();
    AnnealSchedule::from_rows(rows).expect("surrogate schedule is valid")
}
