//! Text formats: trajectory and phase-diagram tables, gridded modes files.

use std::fmt::Write as _;

use crate::classifier::{RegimeLabel, Trapping};
use crate::integrator::Trajectory;
use crate::model::State;
use crate::modeparams::SpatialModes;

use super::CliError;

pub const TRAJECTORY_HEADER: &str = "t,Z_a,Z_b,phi_a,phi_b,H";
pub const PHASE_DIAGRAM_HEADER: &str = "axis1,axis2,zero_stable,pi_stable,label";
pub const MODES_HEADER: &str = "x,chi_a_plus,chi_a_minus,chi_b_plus,chi_b_minus";
const MODES_KEYS: [&str; 7] = ["gbar_a", "gbar_b", "gbar_ab", "delta_e_a", "delta_e_b", "f_a", "f_b"];

/// 17 significant digits, enough to round-trip every `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::with_capacity(traj.len() * 128);
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for ((t, s), h) in traj.times.iter().zip(&traj.states).zip(&traj.energies) {
        let row = [*t, s.z_a, s.z_b, s.phi_a, s.phi_b, *h].map(fmt_f64);
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Columns of a trajectory table.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryTable {
    pub times: Vec<f64>,
    pub states: Vec<State>,
    pub energies: Vec<f64>,
}

pub fn parse_trajectory_csv(text: &str) -> Result<TrajectoryTable, CliError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(|e| CliError::Config(format!("trajectory table: {e}")))?;
    if headers.iter().collect::<Vec<_>>().join(",") != TRAJECTORY_HEADER {
        return Err(CliError::Config(format!(
            "trajectory table header must be `{TRAJECTORY_HEADER}`"
        )));
    }
    let mut table = TrajectoryTable {
        times: Vec::new(),
        states: Vec::new(),
        energies: Vec::new(),
    };
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Config(format!("trajectory row {}: {e}", i + 1)))?;
        let v = parse_row::<6>(&rec, i + 1)?;
        table.times.push(v[0]);
        table.states.push(State::new(v[1], v[2], v[3], v[4]));
        table.energies.push(v[5]);
    }
    Ok(table)
}

fn parse_row<const N: usize>(rec: &csv::StringRecord, line: usize) -> Result<[f64; N], CliError> {
    if rec.len() != N {
        return Err(CliError::Config(format!("row {line}: expected {N} fields, found {}", rec.len())));
    }
    let mut out = [0.0; N];
    for (o, field) in out.iter_mut().zip(rec.iter()) {
        *o = field
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("row {line}: cannot parse `{field}` as a number")))?;
    }
    Ok(out)
}

/// Summary record written next to a simulated trajectory.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Summary {
    /// Common phase class of both species, or `null` if they differ or the
    /// trajectory could not be labelled.
    pub phase_class: Option<crate::classifier::PhaseClass>,
    pub trapping: Option<Trapping>,
    pub label: Option<RegimeLabel>,
    pub classification_error: Option<String>,
    pub samples: usize,
    pub t_end: f64,
    pub energy_drift: Option<f64>,
}

pub struct PhaseDiagramRow {
    pub axis1: f64,
    pub axis2: Option<f64>,
    pub zero_stable: bool,
    pub pi_stable: bool,
    pub label: String,
}

pub fn phase_diagram_csv(rows: &[PhaseDiagramRow]) -> String {
    let mut out = String::with_capacity(rows.len() * 64);
    out.push_str(PHASE_DIAGRAM_HEADER);
    out.push('\n');
    for r in rows {
        let a2 = r.axis2.map(fmt_f64).unwrap_or_default();
        writeln!(out, "{},{},{},{},{}", fmt_f64(r.axis1), a2, r.zero_stable, r.pi_stable, r.label).unwrap();
    }
    out
}

/// Writes a modes file: `key = value` lines, then the comma-separated grid.
pub fn modes_to_text(m: &SpatialModes) -> String {
    let mut out = String::new();
    let scalars = [m.gbar_a, m.gbar_b, m.gbar_ab, m.delta_e_a, m.delta_e_b, m.f_a, m.f_b];
    for (k, v) in MODES_KEYS.iter().zip(scalars) {
        writeln!(out, "{k} = {v:e}").unwrap();
    }
    out.push_str(MODES_HEADER);
    out.push('\n');
    for i in 0..m.x.len() {
        writeln!(
            out,
            "{:e},{:e},{:e},{:e},{:e}",
            m.x[i], m.chi_a_plus[i], m.chi_a_minus[i], m.chi_b_plus[i], m.chi_b_minus[i]
        )
        .unwrap();
    }
    out
}

/// Parses a modes file. Lines starting with `#` and blank lines in the
/// header section are ignored.
pub fn parse_modes(text: &str) -> Result<SpatialModes, CliError> {
    let mut scalars: [Option<f64>; 7] = [None; 7];
    let mut lines = text.lines().enumerate();
    let mut table_start = None;
    for (n, line) in lines.by_ref() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line == MODES_HEADER {
            table_start = Some(n);
            break;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("modes file line {}: expected `key = value`", n + 1)))?;
        let key = key.trim();
        let idx = MODES_KEYS
            .iter()
            .position(|k| *k == key)
            .ok_or_else(|| CliError::Config(format!("modes file line {}: unknown key `{key}`", n + 1)))?;
        let v: f64 = value
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("modes file line {}: bad value for {key}", n + 1)))?;
        if scalars[idx].replace(v).is_some() {
            return Err(CliError::Config(format!("modes file: duplicate key `{key}`")));
        }
    }
    let Some(start) = table_start else {
        return Err(CliError::Config(format!("modes file: missing table header `{MODES_HEADER}`")));
    };
    let missing: Vec<&str> = MODES_KEYS
        .iter()
        .zip(&scalars)
        .filter(|(_, v)| v.is_none())
        .map(|(k, _)| *k)
        .collect();
    if !missing.is_empty() {
        return Err(CliError::Config(format!("modes file: missing {}", missing.join(", "))));
    }
    let s = scalars.map(Option::unwrap);

    let body: String = lines.map(|(_, l)| l).collect::<Vec<_>>().join("\n");
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).from_reader(body.as_bytes());
    let mut m = SpatialModes {
        x: Vec::new(),
        chi_a_plus: Vec::new(),
        chi_a_minus: Vec::new(),
        chi_b_plus: Vec::new(),
        chi_b_minus: Vec::new(),
        gbar_a: s[0],
        gbar_b: s[1],
        gbar_ab: s[2],
        delta_e_a: s[3],
        delta_e_b: s[4],
        f_a: s[5],
        f_b: s[6],
    };
    for (i, rec) in rdr.records().enumerate() {
        let line = start + 2 + i;
        let rec = rec.map_err(|e| CliError::Config(format!("modes file line {line}: {e}")))?;
        let v = parse_row::<5>(&rec, line)?;
        m.x.push(v[0]);
        m.chi_a_plus.push(v[1]);
        m.chi_a_minus.push(v[2]);
        m.chi_b_plus.push(v[3]);
        m.chi_b_minus.push(v[4]);
    }
    Ok(m)
}
