// SPDX-License-Identifier: Apache-2.0
//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use xsfq_cli::bench::{render_bench, run_bench, BaselineTable, BenchArgs};
use xsfq_cli::{default_vectors, Format, PolarityArg, RunConfig};
use xsfq_core::cost::{baseline_comparison, frequencies, jj_count, CellLibrary, CostOptions};
use xsfq_core::fixture::{random_aig, synthetic_netlist, SyntheticParams};
use xsfq_core::flow::{synthesize, FlowOptions, FlowResult};
use xsfq_core::io::read_design;
use xsfq_core::mapper::splitter_count_formula;
use xsfq_core::polarity::Strategy;
use xsfq_core::sim::{random_vectors, verify_against, SimConfig};
use xsfq_core::{normalize, Aig};

type Outcome = Result<String, String>;
type Criterion = fn() -> Outcome;

fn bench_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../benchmarks")
}

fn load(rel: &str) -> Aig {
    read_design(&bench_dir().join(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
}

fn flow(name: &str, aig: &Aig, opts: &FlowOptions) -> Result<FlowResult, String> {
    synthesize(name, aig, &CellLibrary::default(), opts).map_err(|e| format!("{name}: {e}"))
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn files(dir: &str) -> Vec<(String, Aig)> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(bench_dir().join(dir))
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            (
                p.file_stem().unwrap().to_string_lossy().into_owned(),
                read_design(&p).unwrap(),
            )
        })
        .collect()
}

/// Exact full-adder cell and JJ counts for four mappings.
fn full_adder_ladder() -> Outcome {
    let lib = CellLibrary::default();
    let cases = [
        (
            "full_adder_nand9.aag",
            Strategy::DualRail,
            18,
            Some(16),
            120,
            264,
        ),
        ("full_adder.aag", Strategy::DualRail, 14, Some(12), 92, 204),
        (
            "full_adder.aag",
            Strategy::AllPositive,
            11,
            Some(7),
            65,
            153,
        ),
        ("full_adder.aag", Strategy::Heuristic, 10, Some(6), 58, 138),
    ];
    let mut notes = Vec::new();
    for (file, strategy, lafa, splitters, jj, jj_ptl) in cases {
        let aig = load(&format!("examples/{file}"));
        let r = flow(
            file,
            &aig,
            &FlowOptions {
                strategy: strategy.clone(),
                ..Default::default()
            },
        )?;
        let got_ptl = jj_count(&r.netlist, &lib, true, false).total;
        let got = (r.cost.n_lafa, r.cost.n_splitter, r.cost.jj_total, got_ptl);
        ensure(got == (lafa, splitters.unwrap(), jj, jj_ptl), || {
            format!(
                "{file} {}: got LA/FA {} splitters {} JJ {}/{}",
                strategy.name(),
                got.0,
                got.1,
                got.2,
                got.3
            )
        })?;
        notes.push(format!("{}={lafa}/{jj}/{jj_ptl}", strategy.name()));
    }
    Ok(notes.join(", "))
}

/// Splitters = N_gate + N_out - N_inp on random graphs and shipped designs.
fn splitter_formula() -> Outcome {
    let mut designs: Vec<(String, Aig)> = (0..500u64)
        .map(|s| {
            let ands = 4 + (s as usize * 37) % 197;
            (
                format!("random{s}"),
                random_aig(s, 2 + s as usize % 7, 0, ands, 1 + s as usize % 7),
            )
        })
        .collect();
    for dir in ["examples", "iscas85", "iscas89", "epfl"] {
        designs.extend(files(dir));
    }
    let checks: Vec<Result<usize, String>> = designs
        .par_iter()
        .map(|(name, aig)| {
            let mut n = 0;
            for strategy in [
                Strategy::AllPositive,
                Strategy::DualRail,
                Strategy::Heuristic,
            ] {
                let r = flow(
                    name,
                    aig,
                    &FlowOptions {
                        strategy,
                        ..Default::default()
                    },
                )?;
                let nl = &r.netlist;
                let c = nl.counts();
                let drocs = c.drocs() as i64;
                let droc_outputs = nl
                    .cells
                    .iter()
                    .filter(|c| matches!(c.kind, xsfq_core::netlist::CellKind::Droc { .. }))
                    .map(|c| c.outputs.iter().flatten().count() as i64)
                    .sum::<i64>();
                let sources = nl.provided_input_rails() + c.const_source;
                let want = splitter_count_formula(c.lafa(), nl.retained_output_rails(), sources)
                    + drocs
                    - droc_outputs;
                ensure(c.splitter as i64 == want, || {
                    format!("{name}: {} splitters, formula {want}", c.splitter)
                })?;
                n += 1;
            }
            Ok(n)
        })
        .collect();
    let n: usize = checks.into_iter().sum::<Result<usize, String>>()?;
    Ok(format!("{n} netlists, zero violations"))
}

/// JJ count of a netlist shaped like the mapped c6288.
fn c6288_jj() -> Outcome {
    let text = std::fs::read_to_string(bench_dir().join("fixtures/c6288_shape.toml")).unwrap();
    let params = SyntheticParams::from_toml(&text).map_err(|e| e.to_string())?;
    let n = synthetic_netlist(&params).map_err(|e| e.to_string())?;
    let c = n.counts();
    let jj = jj_count(&n, &CellLibrary::default(), false, false).total;
    ensure(
        (
            c.lafa(),
            n.retained_output_rails(),
            n.provided_input_rails(),
            jj,
        ) == (3707, 32, 64, 25_853),
        || {
            format!(
                "G={} out={} in={} JJ={jj}",
                c.lafa(),
                n.retained_output_rails(),
                n.provided_input_rails()
            )
        },
    )?;
    Ok(format!("G=3707, {} splitters, JJ={jj}", c.splitter))
}

/// Pulse-level outputs equal the Boolean reference for every strategy.
fn oracle_equivalence() -> Outcome {
    let mut designs = files("iscas85");
    designs.extend(files("epfl"));
    let lib = CellLibrary::default();
    let results: Vec<Result<(), String>> = designs
        .par_iter()
        .flat_map(|(name, aig)| {
            [
                Strategy::AllPositive,
                Strategy::DualRail,
                Strategy::Heuristic,
            ]
            .into_par_iter()
            .map(move |strategy| (name, aig, strategy))
        })
        .map(|(name, aig, strategy)| {
            let r = flow(
                name,
                aig,
                &FlowOptions {
                    strategy: strategy.clone(),
                    ..Default::default()
                },
            )?;
            let vectors = default_vectors(
                aig,
                if aig.num_inputs <= 10 {
                    None
                } else {
                    Some(1000)
                },
                1,
            );
            let v = verify_against(
                &r.netlist,
                &normalize(aig),
                &lib,
                &vectors,
                &SimConfig::default(),
            )
            .map_err(|e| e.to_string())?;
            ensure(v.passed(), || {
                format!(
                    "{name} {}: {} mismatches, {} violations",
                    strategy.name(),
                    v.mismatches.len(),
                    v.result.violation_count
                )
            })
        })
        .collect();
    let n = results.len();
    results.into_iter().collect::<Result<Vec<()>, String>>()?;
    Ok(format!(
        "{n} circuit/strategy pairs, no mismatches or violations"
    ))
}

/// Counter sequence, missing-trigger detection and s27.
fn sequential() -> Outcome {
    let lib = CellLibrary::default();
    let counter = load("examples/counter2.aag");
    let r = flow("counter2", &counter, &FlowOptions::default())?;
    let vectors = vec![Vec::new(); 5];
    let v = verify_against(&r.netlist, &counter, &lib, &vectors, &SimConfig::default())
        .map_err(|e| e.to_string())?;
    let seq: Vec<String> = v
        .result
        .outputs
        .iter()
        .map(|o| {
            o.iter()
                .map(|b| b.map_or('x', |b| if b { '1' } else { '0' }))
                .collect()
        })
        .collect();
    ensure(v.passed() && seq == ["00", "01", "10", "11", "00"], || {
        format!("counter gave {seq:?}")
    })?;
    let cfg = SimConfig {
        trigger: false,
        ..SimConfig::default()
    };
    let t =
        verify_against(&r.netlist, &counter, &lib, &vectors, &cfg).map_err(|e| e.to_string())?;
    ensure(t.result.violation_count >= 1, || {
        "missing trigger went unnoticed".into()
    })?;
    let s27 = load("iscas89/s27.blif");
    let r = flow("s27", &s27, &FlowOptions::default())?;
    let v = verify_against(
        &r.netlist,
        &normalize(&s27),
        &lib,
        &random_vectors(s27.num_inputs, 64, 27),
        &SimConfig::default(),
    )
    .map_err(|e| e.to_string())?;
    ensure(v.passed(), || {
        format!("s27: {} mismatches", v.mismatches.len())
    })?;
    Ok(format!(
        "counter {}, {} violations without trigger, s27 64 cycles",
        seq.join(">"),
        t.result.violation_count
    ))
}

/// Pipelining c6288: depth trend, equivalence and frequencies.
fn pipelining() -> Outcome {
    let aig = load("iscas85/c6288.aig");
    let lib = CellLibrary::default();
    let reference = [90.0, 46.0, 24.0];
    let mut depths = Vec::new();
    let mut freqs = Vec::new();
    for (stages, want) in reference.iter().enumerate() {
        let r = flow(
            "c6288",
            &aig,
            &FlowOptions {
                pipeline: stages,
                ..Default::default()
            },
        )?;
        let d = r.cost.depth_gates;
        ensure((d as f64 - want).abs() <= 0.2 * want, || {
            format!("{stages} stages: depth {d}, reference {want}")
        })?;
        let v = verify_against(
            &r.netlist,
            &normalize(&aig),
            &lib,
            &random_vectors(32, 200, 6288),
            &SimConfig::default(),
        )
        .map_err(|e| e.to_string())?;
        ensure(v.passed(), || format!("{stages} stages: not equivalent"))?;
        let (circuit, arch) = (
            r.cost.circuit_freq_ghz.unwrap(),
            r.cost.arch_freq_ghz.unwrap(),
        );
        ensure(arch == circuit / 2.0, || {
            "architectural frequency is not half".into()
        })?;
        ensure(
            frequencies(r.cost.critical_path_ps, r.cost.clk_overhead_ps).unwrap()
                == (circuit, arch),
            || "frequency mismatch".into(),
        )?;
        depths.push(d);
        freqs.push(circuit);
    }
    ensure(depths.windows(2).all(|w| w[1] < w[0]), || {
        format!("depths {depths:?} do not decrease")
    })?;
    ensure(freqs.windows(2).all(|w| w[1] > w[0]), || {
        format!("frequencies {freqs:?} do not increase")
    })?;
    let f: Vec<String> = freqs.iter().map(|f| format!("{f:.2}")).collect();
    Ok(format!("depth {depths:?}, circuit GHz [{}]", f.join(", ")))
}

/// Savings from the shipped baseline table.
fn savings() -> Outcome {
    let table =
        BaselineTable::load(&bench_dir().join("baselines.toml")).map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    for (name, plain, clocked) in [
        ("c880", &["4.4"][..], &["5.7"][..]),
        ("s27", &["3.3"], &["4.2", "4.3"]),
    ] {
        let b = table.get(name).ok_or(format!("{name} missing"))?;
        let (p, c) = baseline_comparison(b.reported_jj.unwrap(), b.baseline_jj.unwrap())
            .map_err(|e| e.to_string())?;
        let (p, c) = (format!("{p:.1}"), format!("{c:.1}"));
        ensure(
            plain.contains(&p.as_str()) && clocked.contains(&c.as_str()),
            || format!("{name}: {p}/{c}"),
        )?;
        out.push(format!("{name} {p}/{c}x"));
    }
    Ok(out.join(", "))
}

/// Duplication penalty on the EPFL control circuits.
fn duplication() -> Outcome {
    let table =
        BaselineTable::load(&bench_dir().join("baselines.toml")).map_err(|e| e.to_string())?;
    let mut rows = Vec::new();
    let mut dec = None;
    for (name, aig) in files("epfl") {
        let Some(reference) = table.get(&name).and_then(|b| b.reported_dupl_pct) else {
            continue;
        };
        if name == "sin" {
            continue;
        }
        let r = flow(&name, &aig, &FlowOptions::default())?;
        let pct = r.cost.duplication_pct.unwrap();
        if name == "dec" {
            dec = Some(pct);
        }
        rows.push(format!("{name} {pct}% (ref {reference}%)"));
    }
    let dec = dec.ok_or("dec missing")?;
    ensure(dec <= 5, || format!("dec duplication {dec}%"))?;
    Ok(rows.join(", "))
}

fn bench_args(dir: &Path) -> BenchArgs {
    BenchArgs {
        paths: vec![
            dir.join("iscas85"),
            dir.join("iscas89"),
            dir.join("epfl"),
            dir.join("missing.aig"),
        ],
        config: RunConfig {
            polarity: PolarityArg::Heuristic,
            polarity_file: None,
            pipeline: 0,
            retime: false,
            no_retime: false,
            max_moves: 100_000,
            library: None,
            ptl: false,
            include_clock_tree: false,
            balanced_splitters: false,
            format: Format::Markdown,
            seed: 42,
        },
        baselines: Some(dir.join("baselines.toml")),
        verify_cycles: 20,
        jobs: None,
    }
}

/// Two bench runs with the same seed give identical reports.
fn determinism() -> Outcome {
    let args = bench_args(&bench_dir());
    let mut outputs = Vec::new();
    for format in [Format::Markdown, Format::Json, Format::Csv] {
        let a = render_bench(&run_bench(&args).map_err(|e| e.to_string())?, format)
            .map_err(|e| e.to_string())?;
        let b = render_bench(&run_bench(&args).map_err(|e| e.to_string())?, format)
            .map_err(|e| e.to_string())?;
        ensure(a == b, || format!("{format:?} reports differ"))?;
        outputs.push(a);
    }
    Ok(format!("{} bytes of markdown identical", outputs[0].len()))
}

fn main() {
    let _ = CostOptions::default();
    let criteria: [(&str, Criterion); 9] = [
        ("full-adder ladder", full_adder_ladder),
        ("splitter formula", splitter_formula),
        ("c6288 JJ arithmetic", c6288_jj),
        ("oracle equivalence", oracle_equivalence),
        ("sequential correctness", sequential),
        ("retiming and pipelining", pipelining),
        ("savings arithmetic", savings),
        ("duplication reporting", duplication),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name} ({secs:.2}s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name} ({secs:.2}s): {detail}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
