// SPDX-License-Identifier: Apache-2.0
//! Benchmark sweeps against published baseline JJ counts.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Args;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use xsfq_core::cost::{baseline_comparison, CellLibrary};
use xsfq_core::sim::{random_vectors, verify_against, SimConfig};

use crate::report::{render, Format, ReportRow};
use crate::{design_name, read_input, RunConfig};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Baseline {
    pub name: String,
    /// Tool that produced `baseline_jj`.
    pub tool: Option<String>,
    pub baseline_jj: Option<u64>,
    /// Published counts of the dual-rail flow, for reference.
    pub reported_jj: Option<u64>,
    pub reported_lafa: Option<usize>,
    pub reported_dupl_pct: Option<u32>,
    /// Published DROC counts, plain then preloaded.
    pub reported_droc: Option<[usize; 2]>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaselineTable {
    #[serde(default)]
    pub circuit: Vec<Baseline>,
}

impl BaselineTable {
    pub fn from_toml(text: &str) -> Result<BaselineTable> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<BaselineTable> {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        BaselineTable::from_toml(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn get(&self, name: &str) -> Option<&Baseline> {
        self.circuit.iter().find(|b| b.name == name)
    }
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Benchmark files or directories of .aig, .aag and .blif files.
    pub paths: Vec<PathBuf>,
    #[command(flatten)]
    pub config: RunConfig,
    /// Baseline JJ table in TOML.
    #[arg(long, value_name = "FILE")]
    pub baselines: Option<PathBuf>,
    /// Simulate each netlist for this many random cycles.
    #[arg(long, default_value_t = 0)]
    pub verify_cycles: usize,
    /// Worker threads; all cores by default.
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub rows: Vec<ReportRow>,
    /// Geometric mean of the savings pair over rows with a baseline.
    pub geomean_savings: Option<(f64, f64)>,
    pub geomean_count: usize,
}

const EXTENSIONS: [&str; 3] = ["aig", "aag", "blif"];

/// Benchmark files keyed by circuit name. Missing paths map to `None`.
pub fn collect(paths: &[PathBuf]) -> Result<BTreeMap<String, Option<PathBuf>>> {
    let mut found = BTreeMap::new();
    for path in paths {
        if path.is_dir() {
            for entry in
                fs::read_dir(path).with_context(|| format!("listing {}", path.display()))?
            {
                let p = entry?.path();
                let ext = p.extension().and_then(|e| e.to_str()).unwrap_or("");
                if p.is_file() && EXTENSIONS.contains(&ext) {
                    found.entry(design_name(&p)).or_insert(Some(p));
                }
            }
        } else if path.is_file() {
            found.insert(design_name(path), Some(path.clone()));
        } else {
            found.insert(design_name(path), None);
        }
    }
    Ok(found)
}

fn bench_one(
    name: &str,
    path: &Path,
    args: &BenchArgs,
    lib: &CellLibrary,
    baselines: &BaselineTable,
) -> ReportRow {
    let run = || -> Result<ReportRow> {
        let aig = read_input(path)?;
        let result = args.config.run(name, &aig, lib)?;
        let mut row = ReportRow::from_flow(&result);
        if let Some(b) = baselines.get(name) {
            row.baseline_tool = b.tool.clone();
            row.baseline_jj = b.baseline_jj;
            row.reference_dupl_pct = b.reported_dupl_pct;
            if let Some(jj) = b.baseline_jj {
                let (plain, clocked) = baseline_comparison(row.jj_total, jj)?;
                row.savings = Some(plain);
                row.savings_with_clock = Some(clocked);
            }
        }
        if args.verify_cycles > 0 {
            let vectors = random_vectors(aig.num_inputs, args.verify_cycles, args.config.seed);
            let cfg = SimConfig {
                ptl: args.config.ptl,
                ..SimConfig::default()
            };
            let v = verify_against(
                &result.netlist,
                &xsfq_core::normalize(&aig),
                lib,
                &vectors,
                &cfg,
            )?;
            row.verified = Some(v.passed());
        }
        Ok(row)
    };
    run().unwrap_or_else(|e| ReportRow::skipped(name.to_string(), format!("{e:#}")))
}

pub fn geomean(values: impl Iterator<Item = f64>) -> Option<(f64, usize)> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v.ln(), n + 1));
    (n > 0).then(|| ((sum / n as f64).exp(), n))
}

pub fn run_bench(args: &BenchArgs) -> Result<BenchReport> {
    let lib = args.config.library()?;
    let baselines = match &args.baselines {
        Some(p) => BaselineTable::load(p)?,
        None => BaselineTable::default(),
    };
    let files: Vec<(String, Option<PathBuf>)> = collect(&args.paths)?.into_iter().collect();
    let work = || -> Vec<ReportRow> {
        files
            .par_iter()
            .map(|(name, path)| match path {
                Some(p) => bench_one(name, p, args, &lib, &baselines),
                None => ReportRow::skipped(name.clone(), "missing"),
            })
            .collect()
    };
    let rows = match args.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()?
            .install(work),
        None => work(),
    };
    let plain = geomean(rows.iter().filter_map(|r| r.savings));
    let clocked = geomean(rows.iter().filter_map(|r| r.savings_with_clock));
    let (geomean_savings, geomean_count) = match (plain, clocked) {
        (Some((a, n)), Some((b, _))) => (Some((a, b)), n),
        _ => (None, 0),
    };
    Ok(BenchReport {
        rows,
        geomean_savings,
        geomean_count,
    })
}

pub fn render_bench(report: &BenchReport, format: Format) -> Result<String> {
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(report)? + "\n",
        Format::Csv => render(&report.rows, format)?,
        Format::Markdown => {
            let mut s = render(&report.rows, format)?;
            if let Some((a, b)) = report.geomean_savings {
                s += &format!(
                    "\nGeomean JJ savings over {} circuits: {a:.1}/{b:.1}x\n",
                    report.geomean_count
                );
            }
            s
        }
    })
}

pub fn cmd_bench(args: &BenchArgs, out: &mut dyn std::io::Write) -> Result<i32> {
    let report = run_bench(args)?;
    out.write_all(render_bench(&report, args.config.format)?.as_bytes())?;
    let failed = report.rows.iter().any(|r| r.verified == Some(false));
    Ok(if failed { crate::EXIT_FAIL } else { 0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geomean_of_pairs() {
        let (g, n) = geomean([2.0, 8.0].into_iter()).unwrap();
        assert!((g - 4.0).abs() < 1e-12 && n == 2);
        assert!(geomean(std::iter::empty()).is_none());
    }

    #[test]
    fn baseline_rows() {
        let t = BaselineTable::from_toml("[[circuit]]\nname = \"a\"\nbaseline_jj = 10\n").unwrap();
        assert_eq!(t.get("a").unwrap().baseline_jj, Some(10));
        assert!(t.get("b").is_none());
        assert!(BaselineTable::from_toml("[[circuit]]\nname = \"a\"\nbogus = 1\n").is_err());
    }
}
