// SPDX-License-Identifier: Apache-2.0
//! Rail requirement bounds and the quality of the output polarity search.

mod common;

use proptest::prelude::*;
use xsfq_core::graph::DrocAig;
use xsfq_core::normalize;
use xsfq_core::polarity::{
    assign_output_polarities, brute_force_minimum, propagate_requirements, OutputPolarity,
    OutputPolarityAssignment, Strategy,
};
use xsfq_core::sequential::expand_latches;

use common::{comb_aig, seq_aig, shipped_benchmarks};

fn total(d: &DrocAig, s: &Strategy) -> usize {
    propagate_requirements(d, &assign_output_polarities(d, s).unwrap()).total_gates
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn requirement_bounds(aig in seq_aig()) {
        let d = expand_latches(&normalize(&aig));
        for s in [Strategy::AllPositive, Strategy::DualRail, Strategy::Heuristic] {
            let m = propagate_requirements(&d, &assign_output_polarities(&d, &s).unwrap());
            prop_assert!(m.reachable <= m.total_gates && m.total_gates <= 2 * m.reachable);
            prop_assert!(m.duplication_penalty() <= 100);
        }
    }

    #[test]
    fn heuristic_never_loses(aig in comb_aig()) {
        let d = expand_latches(&normalize(&aig));
        let h = total(&d, &Strategy::Heuristic);
        prop_assert!(h <= total(&d, &Strategy::AllPositive));
        prop_assert!(h <= total(&d, &Strategy::DualRail));
        if let Some(b) = brute_force_minimum(&d, 8) {
            prop_assert!(b.best_total <= h);
        }
    }

    /// Asking for more rails at an output never needs fewer gates.
    #[test]
    fn more_rails_cost_more(aig in comb_aig(), which in any::<prop::sample::Index>()) {
        let d = expand_latches(&normalize(&aig));
        let base = assign_output_polarities(&d, &Strategy::Heuristic).unwrap();
        if base.outputs.is_empty() {
            return Ok(());
        }
        let i = which.index(base.outputs.len());
        let mut wider = base.clone();
        wider.outputs[i] = OutputPolarity::Both;
        let a = propagate_requirements(&d, &base);
        let b = propagate_requirements(&d, &wider);
        prop_assert!(a.total_gates <= b.total_gates);
        for (x, y) in a.reqs.iter().zip(&b.reqs) {
            prop_assert!(!x.pos || y.pos);
            prop_assert!(!x.neg || y.neg);
        }
    }
}

/// Gap between the heuristic and the exhaustive optimum on shipped designs
/// with few outputs.
#[test]
fn brute_force_gap_on_benchmarks() {
    let mut compared = 0;
    for (name, aig) in shipped_benchmarks() {
        let d = expand_latches(&normalize(&aig));
        let Some(best) = brute_force_minimum(&d, 12) else {
            continue;
        };
        let h = total(&d, &Strategy::Heuristic);
        assert!(best.best_total <= h, "{name}");
        assert!(
            h as f64 <= 1.05 * best.best_total as f64,
            "{name}: heuristic {h}, optimum {}",
            best.best_total
        );
        compared += 1;
    }
    assert!(compared >= 3);
}

#[test]
fn fixed_assignment_is_used_verbatim() {
    let aig = common::random_aig(3, 4, 0, 30, 3);
    let d = expand_latches(&normalize(&aig));
    let fixed = vec![
        OutputPolarity::Negative,
        OutputPolarity::Both,
        OutputPolarity::Positive,
    ];
    let a = assign_output_polarities(&d, &Strategy::Fixed(fixed.clone())).unwrap();
    assert_eq!(a, OutputPolarityAssignment { outputs: fixed });
}
