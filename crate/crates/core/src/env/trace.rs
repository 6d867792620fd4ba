//! Episode traces and open-loop impulse schedules as CSV, in physical units.

use std::io::{Read, Write};

use nalgebra::Vector3;

use crate::astro::ScaleSet;
use crate::error::{Error, Result};

pub const TRACE_HEADER: [&str; 16] = [
    "k",
    "t_days",
    "r_x_km",
    "r_y_km",
    "r_z_km",
    "v_x_km_s",
    "v_y_km_s",
    "v_z_km_s",
    "m_kg",
    "dv_cmd_x_km_s",
    "dv_cmd_y_km_s",
    "dv_cmd_z_km_s",
    "dv_real_x_km_s",
    "dv_real_y_km_s",
    "dv_real_z_km_s",
    "reward",
];

/// Header of an open-loop impulse schedule file.
pub const SCHEDULE_HEADER: [&str; 4] = ["k", "dv_x_km_s", "dv_y_km_s", "dv_z_km_s"];

/// One node of an episode, nondimensional.
///
/// Row `k < N` holds the state before the impulse at node `k`; row `N` holds
/// the arrival state and the terminal maneuver. `reward` is the reward
/// collected at node `k` (0 at `k = 0`), so the column sums to the return.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TraceRow {
    pub k: usize,
    pub t: f64,
    pub r: Vector3<f64>,
    pub v: Vector3<f64>,
    pub m: f64,
    pub dv_commanded: Vector3<f64>,
    pub dv_realized: Vector3<f64>,
    pub reward: f64,
}

pub fn write_trace_csv<W: Write>(out: W, rows: &[TraceRow], scales: &ScaleSet) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Parse(e.to_string());
    w.write_record(TRACE_HEADER).map_err(csv_err)?;
    for row in rows {
        let mut rec = vec![row.k.to_string(), scales.time_to_days(row.t).to_string()];
        rec.extend(scales.position_to_km(&row.r).iter().map(f64::to_string));
        rec.extend(scales.velocity_to_km_s(&row.v).iter().map(f64::to_string));
        rec.push(scales.mass_to_kg(row.m).to_string());
        rec.extend(scales.velocity_to_km_s(&row.dv_commanded).iter().map(f64::to_string));
        rec.extend(scales.velocity_to_km_s(&row.dv_realized).iter().map(f64::to_string));
        rec.push(row.reward.to_string());
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Parse(e.to_string()))?;
    Ok(())
}

/// Read an impulse schedule (km/s) into nondimensional per-node impulses.
/// Nodes absent from the file get a zero impulse.
pub fn read_dv_schedule<R: Read>(input: R, segments: usize, scales: &ScaleSet) -> Result<Vec<Vector3<f64>>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = reader
        .headers()
        .map_err(|e| Error::Parse(format!("schedule header: {e}")))?
        .clone();
    if headers.iter().collect::<Vec<_>>() != SCHEDULE_HEADER {
        return Err(Error::Parse(format!(
            "schedule header must be '{}', got '{}'",
            SCHEDULE_HEADER.join(","),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut schedule = vec![Vector3::zeros(); segments];
    let mut seen = vec![false; segments];
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse(format!("schedule row {}: {e}", line + 1)))?;
        let field = |i: usize| -> Result<&str> {
            record
                .get(i)
                .ok_or_else(|| Error::Parse(format!("schedule row {}: missing column {i}", line + 1)))
        };
        let k: usize = field(0)?
            .parse()
            .map_err(|e| Error::Parse(format!("schedule row {}: bad node index: {e}", line + 1)))?;
        if k >= segments {
            return Err(Error::Parse(format!(
                "schedule row {}: node {k} outside [0, {segments})",
                line + 1
            )));
        }
        if seen[k] {
            return Err(Error::Parse(format!("schedule row {}: node {k} repeated", line + 1)));
        }
        seen[k] = true;
        let mut dv = [0.0_f64; 3];
        for (i, slot) in dv.iter_mut().enumerate() {
            *slot = field(i + 1)?
                .parse()
                .map_err(|e| Error::Parse(format!("schedule row {}: {e}", line + 1)))?;
            if !slot.is_finite() {
                return Err(Error::Parse(format!("schedule row {}: non-finite impulse", line + 1)));
            }
        }
        schedule[k] = scales.velocity_to_nd(dv);
    }
    Ok(schedule)
}

/// Write an impulse schedule in the format accepted by [`read_dv_schedule`].
pub fn write_dv_schedule<W: Write>(out: W, schedule: &[Vector3<f64>], scales: &ScaleSet) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Parse(e.to_string());
    w.write_record(SCHEDULE_HEADER).map_err(csv_err)?;
    for (k, dv) in schedule.iter().enumerate() {
        let mut rec = vec![k.to_string()];
        rec.extend(scales.velocity_to_km_s(dv).iter().map(f64::to_string));
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Parse(e.to_string()))?;
    Ok(())
}
