//! CSV and JSON encodings.
//!
//! CSV output is comma separated with LF line endings and `.` decimals.
//! Floats use the shortest representation that round-trips, and missing
//! values are empty fields.
//!
//! Protocol traces, one row per recorded state plus a closing `total` row:
//!
//! ```text
//! protocol,step_label,energy,coherence,work,cost,eta
//! ```
//!
//! `work`, `cost` and `eta` describe the operation that produced the row's
//! state: the preparation gate for the first row, the extraction gate for
//! extraction steps, and nothing for a hold.
//!
//! Sweeps:
//!
//! ```text
//! theta_rad,energy,coherence_nats,e_inc,e_coh,eta_prep,eta_vpi,eta_uc,eta_total
//! ```

use serde::Serialize;

use crate::analysis::{SurfacePoint, SweepRow};
use crate::dynamics::EvolutionResult;
use crate::protocols::ProtocolTrace;
use crate::{Error, Result};

fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w
        .into_inner()
        .map_err(|e| Error::domain(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::domain(format!("csv: {e}")))
}

fn csv_err(e: csv::Error) -> Error {
    Error::domain(format!("csv: {e}"))
}

#[derive(Serialize)]
struct TraceRow<'a> {
    protocol: &'a str,
    step_label: &'a str,
    energy: Option<f64>,
    coherence: Option<f64>,
    work: Option<f64>,
    cost: Option<f64>,
    eta: Option<f64>,
}

pub fn trace_csv(trace: &ProtocolTrace) -> Result<String> {
    let mut w = writer();
    let protocol = trace.protocol.name();
    for (k, step) in trace.steps.iter().enumerate() {
        let (work, cost, eta) = if k == 0 {
            (
                None,
                Some(trace.preparation.cost),
                trace.preparation.efficiency,
            )
        } else if let Some(e) = trace.extractions.iter().find(|e| e.step == k) {
            (Some(e.work), Some(e.cost), e.efficiency)
        } else {
            (None, None, None)
        };
        w.serialize(TraceRow {
            protocol,
            step_label: &step.label,
            energy: Some(step.energy),
            coherence: Some(step.coherence),
            work,
            cost,
            eta,
        })
        .map_err(csv_err)?;
    }
    w.serialize(TraceRow {
        protocol,
        step_label: "total",
        energy: None,
        coherence: None,
        work: Some(trace.total.work),
        cost: Some(trace.total.cost),
        eta: trace.total.efficiency,
    })
    .map_err(csv_err)?;
    finish(w)
}

pub fn trace_json(trace: &ProtocolTrace) -> Result<String> {
    serde_json::to_string_pretty(trace).map_err(|e| Error::domain(format!("json: {e}")))
}

#[derive(Serialize)]
struct SweepCsvRow {
    theta_rad: f64,
    energy: f64,
    coherence_nats: f64,
    e_inc: f64,
    e_coh: f64,
    eta_prep: Option<f64>,
    eta_vpi: Option<f64>,
    eta_uc: Option<f64>,
    eta_total: Option<f64>,
}

impl From<&SweepRow> for SweepCsvRow {
    fn from(r: &SweepRow) -> Self {
        Self {
            theta_rad: r.theta,
            energy: r.energy,
            coherence_nats: r.coherence,
            e_inc: r.e_inc,
            e_coh: r.e_coh,
            eta_prep: r.eta_prep,
            eta_vpi: r.eta_vpi,
            eta_uc: r.eta_uc,
            eta_total: r.eta_total,
        }
    }
}

pub const SWEEP_HEADER: &str =
    "theta_rad,energy,coherence_nats,e_inc,e_coh,eta_prep,eta_vpi,eta_uc,eta_total";

pub fn sweep_csv(rows: &[SweepRow]) -> Result<String> {
    if rows.is_empty() {
        return Ok(format!("{SWEEP_HEADER}\n"));
    }
    let mut w = writer();
    for r in rows {
        w.serialize(SweepCsvRow::from(r)).map_err(csv_err)?;
    }
    finish(w)
}

pub fn sweep_json(rows: &[SweepRow]) -> Result<String> {
    let rows: Vec<SweepCsvRow> = rows.iter().map(SweepCsvRow::from).collect();
    serde_json::to_string_pretty(&rows).map_err(|e| Error::domain(format!("json: {e}")))
}

pub fn surface_csv(points: &[SurfacePoint]) -> Result<String> {
    let mut w = writer();
    w.write_record(["theta_rad", "coherence_nats", "e_coh"])
        .map_err(csv_err)?;
    for p in points {
        w.serialize((p.theta, p.coherence, p.e_coh))
            .map_err(csv_err)?;
    }
    finish(w)
}

/// Trajectory dump: `time_s,p1,re_a,im_a`.
pub fn trajectory_csv(result: &EvolutionResult) -> Result<String> {
    let mut w = writer();
    w.write_record(["time_s", "p1", "re_a", "im_a"])
        .map_err(csv_err)?;
    for (t, p1, re, im) in result.rows() {
        w.serialize((t, p1, re, im)).map_err(csv_err)?;
    }
    finish(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ergotropy::QubitParams;
    use crate::protocols::{fig2_theta, run_dephasing, run_sequential, Mode, ProtocolConfig};

    #[test]
    fn trace_csv_layout() {
        let cfg = ProtocolConfig::new(QubitParams::working_point());
        let t = run_sequential(fig2_theta(), &cfg, &Mode::Ideal).unwrap();
        let csv = trace_csv(&t).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(
            lines[0],
            "protocol,step_label,energy,coherence,work,cost,eta"
        );
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("sequential,prepared,"));
        assert!(lines[4].starts_with("sequential,total,,,"));
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn hold_row_has_no_gate_fields() {
        let cfg = ProtocolConfig::new(QubitParams::working_point());
        let t = run_dephasing(fig2_theta(), 4e-6, &cfg, &Mode::Ideal).unwrap();
        let csv = trace_csv(&t).unwrap();
        assert!(csv.lines().nth(2).unwrap().ends_with(",,,"), "{csv}");
    }

    #[test]
    fn sweep_header_is_fixed() {
        assert_eq!(sweep_csv(&[]).unwrap(), format!("{SWEEP_HEADER}\n"));
        let row = SweepRow {
            theta: 1.0,
            energy: 0.5,
            e_inc: 0.0,
            e_coh: 0.5,
            coherence: 0.1,
            eta_prep: Some(0.9),
            eta_vpi: None,
            eta_uc: Some(0.8),
            eta_total: Some(0.7),
        };
        let csv = sweep_csv(&[row]).unwrap();
        assert_eq!(
            csv,
            format!("{SWEEP_HEADER}\n1.0,0.5,0.1,0.0,0.5,0.9,,0.8,0.7\n")
        );
    }

    #[test]
    fn surface_has_one_header() {
        let pts = [SurfacePoint {
            theta: 2.0,
            coherence: 0.25,
            e_coh: 0.125,
        }];
        assert_eq!(
            surface_csv(&pts).unwrap(),
            "theta_rad,coherence_nats,e_coh\n2.0,0.25,0.125\n"
        );
        assert_eq!(
            surface_csv(&[]).unwrap(),
            "theta_rad,coherence_nats,e_coh\n"
        );
    }

    #[test]
    fn json_round_trips_trace() {
        let cfg = ProtocolConfig::new(QubitParams::working_point());
        let t = run_sequential(2.0, &cfg, &Mode::Ideal).unwrap();
        let back: ProtocolTrace = serde_json::from_str(&trace_json(&t).unwrap()).unwrap();
        assert_eq!(back, t);
    }
}
