//! CSV and text outputs, written to a temporary file in the target directory
//! and renamed into place so readers never see a partial file.

use std::io::Write;
use std::path::Path;

use tempfile::NamedTempFile;

use crate::campaign::{LifespanReport, RunStatus};
use crate::error::{Error, Result};
use crate::pde::SimReport;

fn persist(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

pub fn write_text_atomic(path: &Path, text: &str) -> Result<()> {
    persist(path, text.as_bytes())
}

pub fn write_csv_atomic(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    persist(path, &bytes)
}

/// Shortest representation that parses back to the same `f64`.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn header(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|s| s.to_string()).collect()
}

/// Columns: `t, dt, sup_j..., l1_j..., U_j..., M`.
pub fn trace_table(report: &SimReport) -> (Vec<String>, Vec<Vec<String>>) {
    let k = report.traces[0].sup.len();
    let traced = !report.traces[0].weighted.is_empty();
    let mut head = header(&["t", "dt"]);
    head.extend((1..=k).map(|j| format!("sup_{j}")));
    head.extend((1..=k).map(|j| format!("l1_{j}")));
    if traced {
        head.extend((1..=k).map(|j| format!("U_{j}")));
    }
    head.push("M".into());
    let rows = report
        .traces
        .iter()
        .map(|r| {
            let mut row = vec![num(r.t), num(r.dt)];
            row.extend(r.sup.iter().copied().map(num));
            row.extend(r.l1.iter().copied().map(num));
            row.extend(r.weighted.iter().copied().map(num));
            row.push(num(r.m));
            row
        })
        .collect();
    (head, rows)
}

pub fn campaign_table(report: &LifespanReport) -> (Vec<String>, Vec<Vec<String>>) {
    let head = header(&[
        "eps",
        "replicate",
        "status",
        "t_num",
        "t0",
        "r0",
        "lower_shape",
        "dominated",
        "inequality_holds",
        "decay",
        "steps",
        "mesh_nodes",
        "message",
    ]);
    let rows = report
        .runs
        .iter()
        .map(|r| {
            let (status, message) = match &r.status {
                RunStatus::BlowUp => ("blowup", String::new()),
                RunStatus::Global => ("global", String::new()),
                RunStatus::Failed(m) => ("failed", m.clone()),
            };
            vec![
                num(r.eps),
                r.replicate.to_string(),
                status.into(),
                opt(r.t_num),
                opt(r.t0),
                opt(r.r0),
                opt(r.lower_shape),
                r.dominated(crate::campaign::DOMINANCE_SLACK).map(|b| b.to_string()).unwrap_or_default(),
                r.inequality_holds.map(|b| b.to_string()).unwrap_or_default(),
                r.decay
                    .as_ref()
                    .map(|d| d.iter().map(|v| num(*v)).collect::<Vec<_>>().join(";"))
                    .unwrap_or_default(),
                r.steps.to_string(),
                r.mesh_nodes.to_string(),
                message,
            ]
        })
        .collect();
    (head, rows)
}

/// `ln eps, ln T_num, ln T_0` for every blow-up run.
pub fn loglog_table(report: &LifespanReport) -> (Vec<String>, Vec<Vec<String>>) {
    let rows = report
        .runs
        .iter()
        .filter_map(|r| {
            let t = r.t_num?;
            Some(vec![num(r.eps.ln()), num(t.ln()), opt(r.t0.map(f64::ln))])
        })
        .collect();
    (header(&["ln_eps", "ln_t_num", "ln_t0"]), rows)
}

pub fn report_to_toml(report: &LifespanReport) -> Result<String> {
    toml::to_string(report).map_err(|e| Error::Config(e.to_string()))
}

pub fn save_report(path: &Path, report: &LifespanReport) -> Result<()> {
    write_text_atomic(path, &report_to_toml(report)?)
}

pub fn load_report(path: &Path) -> Result<LifespanReport> {
    let text = std::fs::read_to_string(path)?;
    toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}
