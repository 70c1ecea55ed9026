// SPDX-License-Identifier: Apache-2.0
//! Seeded synthetic designs: random graphs and netlists of a given size.
//!
//! Useful when only the shape of a circuit is known: gate count, retained
//! output rails and provided input rails. Every signal is consumed at least
//! once, so the splitter count follows from the sizes alone.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::aig::{Aig, AndNode, Latch, LatchInit, Lit};
use crate::error::{Error, Result};
use crate::mapper::insert_splitters;
use crate::netlist::{CellKind, Driver, NetId, Netlist, Origin, OutputPort, Sink};
use crate::polarity::{OutputPolarity, Rail};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticParams {
    pub name: String,
    pub gates: usize,
    pub output_rails: usize,
    pub input_rails: usize,
    pub seed: u64,
}

impl SyntheticParams {
    pub fn from_toml(text: &str) -> Result<SyntheticParams> {
        toml::from_str(text).map_err(|e| Error::Invalid(e.to_string()))
    }
}

/// Builds a legalized LA/FA netlist of the requested size.
pub fn synthetic_netlist(params: &SyntheticParams) -> Result<Netlist> {
    let SyntheticParams {
        gates,
        output_rails,
        input_rails,
        ..
    } = *params;
    if input_rails < 2 || output_rails == 0 || gates == 0 {
        return Err(Error::Invalid(
            "need at least two input rails, one gate and one output".into(),
        ));
    }
    if input_rails > gates + output_rails {
        return Err(Error::Invalid(
            "too many input rails to consume them all".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut n = Netlist::new(params.name.clone());
    let n_inputs = input_rails.div_ceil(2);
    n.inputs = (0..n_inputs).map(|i| format!("i{i}")).collect();
    let mut signals: Vec<NetId> = (0..input_rails)
        .map(|r| {
            let rail = if r % 2 == 0 { Rail::Pos } else { Rail::Neg };
            n.add_net(
                format!("i{}.{}", r / 2, rail.suffix()),
                Driver::Input { index: r / 2, rail },
            )
        })
        .collect();
    // unconsumed signals, oldest first
    let mut pending: std::collections::VecDeque<NetId> = signals.iter().copied().collect();
    for g in 0..gates {
        let a = pending
            .pop_front()
            .unwrap_or_else(|| *signals.choose(&mut rng).unwrap());
        let b = if pending.len() >= output_rails && !pending.is_empty() {
            pending.pop_front().unwrap()
        } else {
            loop {
                let s = *signals.choose(&mut rng).unwrap();
                if s != a {
                    break s;
                }
            }
        };
        let (kind, rail) = if rng.gen() {
            (CellKind::La, Rail::Pos)
        } else {
            (CellKind::Fa, Rail::Neg)
        };
        let cell = n.add_cell(
            kind,
            vec![a, b],
            Origin::Node {
                var: g as u32,
                rail,
            },
            &format!("g{g}"),
        );
        let out = n.cells[cell].outputs[0].expect("fresh output");
        signals.push(out);
        pending.push_back(out);
    }
    let gate_outputs = &signals[input_rails..];
    for index in 0..output_rails {
        let net = pending
            .pop_front()
            .unwrap_or_else(|| *gate_outputs.choose(&mut rng).unwrap());
        n.connect(
            net,
            Sink::Output {
                index,
                rail: Rail::Pos,
            },
        );
        n.outputs.push(OutputPort {
            name: format!("o{index}"),
            polarity: OutputPolarity::Positive,
        });
    }
    if let Some(&left) = pending.front() {
        return Err(Error::Invalid(format!(
            "signal {} left unconsumed",
            n.nets[left].name
        )));
    }
    let legal = insert_splitters(&n, false);
    legal.check_structure(true)?;
    Ok(legal)
}

/// Random AIG with fanins drawn from earlier signals, biased to recent ones
/// so that depth grows with size.
pub fn random_aig(seed: u64, inputs: usize, latches: usize, ands: usize, outputs: usize) -> Aig {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let first = (inputs + latches + 1) as u32;
    let pick = |rng: &mut ChaCha8Rng, below: u32| {
        let var = if below > 1 && rng.gen_bool(0.7) {
            rng.gen_range(below.saturating_sub(8).max(1)..below)
        } else {
            rng.gen_range(0..below)
        };
        Lit::new(var, rng.gen())
    };
    let mut nodes = Vec::with_capacity(ands);
    for i in 0..ands {
        let below = first + i as u32;
        nodes.push(AndNode {
            fanin0: pick(&mut rng, below),
            fanin1: pick(&mut rng, below),
        });
    }
    let top = first + ands as u32;
    let latches = (0..latches)
        .map(|_| Latch {
            next: pick(&mut rng, top),
            init: if rng.gen() {
                LatchInit::One
            } else {
                LatchInit::Zero
            },
        })
        .collect();
    let outputs = (0..outputs).map(|_| pick(&mut rng, top)).collect();
    Aig {
        num_inputs: inputs,
        latches,
        ands: nodes,
        outputs,
        ..Default::default()
    }
}
