//! CSV and newline-delimited JSON output of sweep rows.

use std::io::Write;

use serde::Serialize;

use super::SweepRow;
use crate::error::Result;

pub const CSV_HEADER: [&str; 17] = [
    "protocol",
    "q",
    "env",
    "p",
    "mode",
    "trials_or_weight",
    "seed",
    "f_phys",
    "f_log",
    "f_phys_psm",
    "f_log_psm",
    "se_or_bound",
    "anc_qubits",
    "time_steps",
    "sm_rounds",
    "D_log",
    "D_log_psm",
];

/// One output record; field order matches [`CSV_HEADER`].
#[derive(Debug, Serialize)]
pub struct Record {
    pub protocol: String,
    pub q: u32,
    pub env: String,
    pub p: f64,
    pub mode: &'static str,
    pub trials_or_weight: u64,
    pub seed: u64,
    pub f_phys: Option<f64>,
    pub f_log: Option<f64>,
    pub f_phys_psm: Option<f64>,
    pub f_log_psm: Option<f64>,
    pub se_or_bound: Option<f64>,
    pub anc_qubits: Option<f64>,
    pub time_steps: Option<f64>,
    pub sm_rounds: Option<f64>,
    #[serde(rename = "D_log")]
    pub d_log: Option<f64>,
    #[serde(rename = "D_log_psm")]
    pub d_log_psm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Record {
    pub fn from_row(row: &SweepRow) -> Self {
        let c = &row.config;
        let ok = row.result.as_ref().ok();
        let f = ok.map(|r| r.fidelities);
        Record {
            protocol: c.protocol.name().to_string(),
            q: c.q,
            env: c.env.name().to_string(),
            p: c.p,
            mode: c.mode.label(),
            trials_or_weight: c.mode.trials_or_weight(),
            seed: c.seed,
            f_phys: f.map(|f| f.phys),
            f_log: f.map(|f| f.log),
            f_phys_psm: f.map(|f| f.phys_psm),
            f_log_psm: f.map(|f| f.log_psm),
            se_or_bound: ok.map(|r| r.se_or_bound()),
            anc_qubits: ok.map(|r| r.resources.ancilla_qubits),
            time_steps: ok.map(|r| r.resources.time_steps),
            sm_rounds: ok.map(|r| r.resources.sm_rounds),
            d_log: row.d_log,
            d_log_psm: row.d_log_psm,
            error: row.result.as_ref().err().cloned(),
        }
    }
}

fn cell(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        let r = Record::from_row(row);
        w.write_record([
            r.protocol,
            r.q.to_string(),
            r.env,
            r.p.to_string(),
            r.mode.to_string(),
            r.trials_or_weight.to_string(),
            r.seed.to_string(),
            cell(r.f_phys),
            cell(r.f_log),
            cell(r.f_phys_psm),
            cell(r.f_log_psm),
            cell(r.se_or_bound),
            cell(r.anc_qubits),
            cell(r.time_steps),
            cell(r.sm_rounds),
            cell(r.d_log),
            cell(r.d_log_psm),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(rows: &[SweepRow], mut out: W) -> Result<()> {
    for row in rows {
        serde_json::to_writer(&mut out, &Record::from_row(row))?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
