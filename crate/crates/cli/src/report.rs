// SPDX-License-Identifier: Apache-2.0
//! Result rows and their json, csv and markdown renderings.

use anyhow::Result;
use clap::ValueEnum;
use serde::Serialize;

use xsfq_core::flow::FlowResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Markdown,
}

/// One circuit. Column order is fixed across formats.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ReportRow {
    pub circuit: String,
    pub status: String,
    pub n_lafa: usize,
    pub n_splitter: usize,
    pub duplication_pct: Option<u32>,
    pub droc_preloaded: usize,
    pub droc_plain: usize,
    pub depth_gates: usize,
    pub depth_with_splitters: usize,
    pub critical_path_ps: f64,
    pub circuit_freq_ghz: Option<f64>,
    pub arch_freq_ghz: Option<f64>,
    pub jj_total: u64,
    pub baseline_tool: Option<String>,
    pub baseline_jj: Option<u64>,
    pub savings: Option<f64>,
    pub savings_with_clock: Option<f64>,
    pub reference_dupl_pct: Option<u32>,
    pub verified: Option<bool>,
}

impl ReportRow {
    pub fn from_flow(r: &FlowResult) -> ReportRow {
        let c = &r.cost;
        ReportRow {
            circuit: r.netlist.name.clone(),
            status: "ok".into(),
            n_lafa: c.n_lafa,
            n_splitter: c.n_splitter,
            duplication_pct: c.duplication_pct,
            droc_preloaded: c.n_droc_preloaded,
            droc_plain: c.n_droc_plain,
            depth_gates: c.depth_gates,
            depth_with_splitters: c.depth_with_splitters,
            critical_path_ps: round(c.critical_path_ps, 3),
            circuit_freq_ghz: c.circuit_freq_ghz.map(|f| round(f, 4)),
            arch_freq_ghz: c.arch_freq_ghz.map(|f| round(f, 4)),
            jj_total: c.jj_total,
            ..Default::default()
        }
    }

    pub fn skipped(circuit: String, reason: impl std::fmt::Display) -> ReportRow {
        ReportRow {
            circuit,
            status: format!("skipped: {reason}"),
            ..Default::default()
        }
    }
}

fn round(x: f64, digits: i32) -> f64 {
    let s = 10f64.powi(digits);
    (x * s).round() / s
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or("-".into(), T::to_string)
}

fn markdown(rows: &[ReportRow]) -> String {
    let mut s = String::from(
        "| Circuit | Baseline #JJ | #LA/FA | Dupl. | Ref. dupl. | #DROC | Depth | Freq. (GHz) | #JJ | JJ savings | Status |\n\
         |---|---:|---:|---:|---:|---:|---:|---:|---:|---:|---|\n",
    );
    for r in rows {
        let baseline = match (&r.baseline_tool, r.baseline_jj) {
            (Some(t), Some(jj)) => format!("{jj} ({t})"),
            (_, jj) => opt(&jj),
        };
        let savings = match (r.savings, r.savings_with_clock) {
            (Some(a), Some(b)) => format!("{a:.1}/{b:.1}x"),
            _ => "-".into(),
        };
        let freq = match (r.circuit_freq_ghz, r.arch_freq_ghz) {
            (Some(c), Some(a)) => format!("{c:.2}/{a:.2}"),
            _ => "-".into(),
        };
        let pct = |p: Option<u32>| p.map_or("-".into(), |p| format!("{p}%"));
        let verified = match r.verified {
            Some(true) => ", verified",
            Some(false) => ", FAILED",
            None => "",
        };
        s += &format!(
            "| {} | {} | {} | {} | {} | {}/{} | {}/{} | {} | {} | {} | {}{} |\n",
            r.circuit,
            baseline,
            r.n_lafa,
            pct(r.duplication_pct),
            pct(r.reference_dupl_pct),
            r.droc_plain,
            r.droc_preloaded,
            r.depth_gates,
            r.depth_with_splitters,
            freq,
            r.jj_total,
            savings,
            r.status,
            verified
        );
    }
    s
}

fn csv(rows: &[ReportRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    if rows.is_empty() {
        w.write_record(CSV_HEADER)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

const CSV_HEADER: [&str; 19] = [
    "circuit",
    "status",
    "n_lafa",
    "n_splitter",
    "duplication_pct",
    "droc_preloaded",
    "droc_plain",
    "depth_gates",
    "depth_with_splitters",
    "critical_path_ps",
    "circuit_freq_ghz",
    "arch_freq_ghz",
    "jj_total",
    "baseline_tool",
    "baseline_jj",
    "savings",
    "savings_with_clock",
    "reference_dupl_pct",
    "verified",
];

pub fn render(rows: &[ReportRow], format: Format) -> Result<String> {
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(rows)? + "\n",
        Format::Csv => csv(rows)?,
        Format::Markdown => markdown(rows),
    })
}
