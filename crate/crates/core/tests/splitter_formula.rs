// SPDX-License-Identifier: Apache-2.0
//! Splitter count equals N_gate + N_out - N_inp whenever every provided
//! signal is consumed.

mod common;

use proptest::prelude::*;
use xsfq_core::cost::CellLibrary;
use xsfq_core::flow::{synthesize, FlowOptions};
use xsfq_core::mapper::splitter_count_formula;
use xsfq_core::netlist::{CellKind, Netlist, Origin};
use xsfq_core::polarity::Strategy;
use xsfq_core::Aig;

use common::{comb_aig, shipped_benchmarks};

fn strategies() -> [Strategy; 3] {
    [
        Strategy::AllPositive,
        Strategy::DualRail,
        Strategy::Heuristic,
    ]
}

/// `None` when some signal is left unconsumed and the formula does not apply.
fn check(netlist: &Netlist) -> Option<(i64, i64)> {
    let data = |c: &&xsfq_core::netlist::Cell| c.origin != Origin::ClockTree;
    if netlist
        .cells
        .iter()
        .filter(data)
        .any(|c| c.outputs.iter().any(Option::is_none) && c.kind.is_logic())
    {
        return None;
    }
    let c = netlist.counts();
    let sources = netlist.provided_input_rails() + c.const_source;
    let expected = splitter_count_formula(c.lafa(), netlist.retained_output_rails(), sources);
    let drocs = netlist
        .cells
        .iter()
        .filter(|c| matches!(c.kind, CellKind::Droc { .. }))
        .count();
    // each DROC consumes one signal and provides up to two
    let droc_outputs: usize = netlist
        .cells
        .iter()
        .filter(|c| matches!(c.kind, CellKind::Droc { .. }))
        .map(|c| c.outputs.iter().flatten().count())
        .sum();
    Some((
        c.splitter as i64,
        expected + drocs as i64 - droc_outputs as i64,
    ))
}

fn holds(name: &str, aig: &Aig) {
    let lib = CellLibrary::default();
    for strategy in strategies() {
        let opts = FlowOptions {
            strategy: strategy.clone(),
            ..Default::default()
        };
        let r = synthesize(name, aig, &lib, &opts).unwrap();
        let (got, want) = check(&r.netlist).unwrap_or_else(|| panic!("{name}: unconsumed signal"));
        assert_eq!(got, want, "{name} under {}", strategy.name());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn random_graphs(aig in comb_aig()) {
        holds("random", &aig);
    }
}

#[test]
fn shipped_benchmarks_hold() {
    let all = shipped_benchmarks();
    assert!(all.len() >= 20);
    for (name, aig) in &all {
        holds(name, aig);
    }
}
