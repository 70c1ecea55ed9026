// SPDX-License-Identifier: Apache-2.0
//! Synthesized netlists simulated at pulse level against Boolean evaluation.

use std::path::PathBuf;

use xsfq_core::cost::CellLibrary;
use xsfq_core::flow::{synthesize, FlowOptions};
use xsfq_core::io::read_design;
use xsfq_core::polarity::Strategy;
use xsfq_core::sequential::RetimeConfig;
use xsfq_core::sim::{random_vectors, verify, SimConfig};
use xsfq_core::Aig;

fn bench(rel: &str) -> Aig {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../benchmarks")
        .join(rel);
    read_design(&path).unwrap()
}

fn check(rel: &str, opts: &FlowOptions, cycles: usize) {
    let aig = bench(rel);
    let lib = CellLibrary::default();
    let r = synthesize(rel, &aig, &lib, opts).unwrap();
    let vectors = random_vectors(aig.num_inputs, cycles, 7);
    let v = verify(&r.netlist, &lib, &vectors, &SimConfig::default()).unwrap();
    assert!(
        v.result.is_clean(),
        "{rel}: {} violations, first {:?}",
        v.result.violation_count,
        v.result.violations.first()
    );
    assert!(
        v.mismatches.is_empty(),
        "{rel}: {} mismatches, first {:?}",
        v.mismatches.len(),
        v.mismatches.first()
    );
}

#[test]
fn combinational_strategies() {
    for strategy in [
        Strategy::AllPositive,
        Strategy::DualRail,
        Strategy::Heuristic,
    ] {
        let opts = FlowOptions {
            strategy,
            ..Default::default()
        };
        for rel in [
            "examples/full_adder.aag",
            "iscas85/c17.aig",
            "iscas85/c880.aig",
            "epfl/ctrl.aig",
        ] {
            check(rel, &opts, 40);
        }
    }
}

#[test]
fn sequential_designs() {
    for rel in ["examples/counter2.aag", "iscas89/s27.blif"] {
        check(rel, &FlowOptions::default(), 64);
        let retimed = FlowOptions {
            retime: Some(RetimeConfig::default()),
            ..Default::default()
        };
        check(rel, &retimed, 64);
    }
}

#[test]
fn pipelined_designs() {
    for stages in 1..=3 {
        let opts = FlowOptions {
            pipeline: stages,
            ..Default::default()
        };
        check("iscas85/c880.aig", &opts, 40);
        let both = FlowOptions {
            pipeline: stages,
            retime: Some(RetimeConfig::default()),
            ..Default::default()
        };
        check("iscas85/c432.aig", &both, 40);
    }
}

#[test]
fn missing_trigger_is_detected() {
    let aig = bench("examples/counter2.aag");
    let lib = CellLibrary::default();
    let opts = FlowOptions {
        retime: Some(RetimeConfig::default()),
        ..Default::default()
    };
    let r = synthesize("counter2", &aig, &lib, &opts).unwrap();
    let vectors = random_vectors(aig.num_inputs, 16, 3);
    let cfg = SimConfig {
        trigger: false,
        ..Default::default()
    };
    let v = verify(&r.netlist, &lib, &vectors, &cfg).unwrap();
    assert!(!v.passed());
}
