// SPDX-License-Identifier: Apache-2.0
//! Mapping of rail-annotated graphs to LA/FA netlists and fanout
//! legalization with splitters.

use std::collections::HashMap;

use log::{debug, warn};

use crate::aig::{Lit, VarKind};
use crate::error::{Error, Result};
use crate::graph::{DrocAig, DrocKind, Parity};
use crate::netlist::{CellKind, Driver, NetId, Netlist, Origin, OutputPort, Sink};
use crate::polarity::{droc_input_rail, OutputPolarityAssignment, Rail, RailRequirementMap};

/// Splitters needed when every available signal is consumed at least once
/// and every logic cell has two inputs and one output.
pub fn splitter_count_formula(n_gate: usize, n_out: usize, n_inp: usize) -> i64 {
    n_gate as i64 + n_out as i64 - n_inp as i64
}

struct Mapper<'a> {
    design: &'a DrocAig,
    reqs: &'a RailRequirementMap,
    parity: Vec<Parity>,
    netlist: Netlist,
    input_rails: HashMap<(u32, Rail), NetId>,
    consts: HashMap<(bool, Parity), NetId>,
    // (var, rail) -> net for AND nodes and DROCs
    rails: HashMap<(u32, Rail), NetId>,
}

impl Mapper<'_> {
    fn rail_net(&mut self, var: u32, rail: Rail, region: Parity) -> Result<NetId> {
        let aig = &self.design.aig;
        match aig.kind(var) {
            VarKind::Const => {
                // the positive rail of constant false pulses in the relax phase
                let value = rail == Rail::Neg;
                let key = (value, region);
                if let Some(&net) = self.consts.get(&key) {
                    return Ok(net);
                }
                let prefix = format!(
                    "const{}{}",
                    value as u8,
                    if region.is_odd() { ".odd" } else { "" }
                );
                let cell = self.netlist.add_cell(
                    CellKind::ConstSource { value },
                    vec![],
                    Origin::Constant {
                        odd: region.is_odd(),
                    },
                    &prefix,
                );
                let net = self.netlist.cells[cell].outputs[0].expect("fresh output");
                self.consts.insert(key, net);
                Ok(net)
            }
            VarKind::Input(index) => {
                if let Some(&net) = self.input_rails.get(&(var, rail)) {
                    return Ok(net);
                }
                let name = format!("{}.{}", aig.input_name(index), rail.suffix());
                let net = self.netlist.add_net(name, Driver::Input { index, rail });
                self.input_rails.insert((var, rail), net);
                Ok(net)
            }
            VarKind::Latch(_) | VarKind::And(_) => {
                self.rails.get(&(var, rail)).copied().ok_or_else(|| {
                    Error::Invalid(format!(
                        "requirement map misses rail {} of node {var}",
                        rail.suffix()
                    ))
                })
            }
        }
    }

    fn lit_net(&mut self, lit: Lit, rail: Rail, region: Parity) -> Result<NetId> {
        self.rail_net(lit.var(), rail.of_lit(lit), region)
    }
}

/// Maps every required rail to one LA (positive) or FA (negative) cell.
/// Complemented edges select the opposite rail and cost nothing. Fanout is
/// left unlegalized.
pub fn map_design(
    design: &DrocAig,
    reqs: &RailRequirementMap,
    assignment: &OutputPolarityAssignment,
) -> Result<Netlist> {
    let aig = &design.aig;
    if reqs.reqs.len() != aig.num_vars() {
        return Err(Error::Invalid(
            "requirement map does not match the design".into(),
        ));
    }
    let mut netlist = Netlist::new("design");
    netlist.inputs = (0..aig.num_inputs).map(|i| aig.input_name(i)).collect();
    netlist.outputs = assignment
        .outputs
        .iter()
        .enumerate()
        .map(|(i, &polarity)| OutputPort {
            name: aig.output_name(i),
            polarity,
        })
        .collect();
    netlist.latency = design.latency;
    let mut m = Mapper {
        design,
        reqs,
        parity: design.parities(),
        netlist,
        input_rails: HashMap::new(),
        consts: HashMap::new(),
        rails: HashMap::new(),
    };

    // DROCs first, so that AND nodes can consume their outputs
    let mut droc_cells = Vec::with_capacity(design.num_drocs());
    for (i, kind) in design.kinds.iter().enumerate() {
        let init = design.droc_init(i);
        let twisted = droc_input_rail(*kind, init) == Rail::Neg;
        let preloaded = *kind == DrocKind::Trigger;
        let placeholder = m
            .netlist
            .add_net(format!("d{i}.d.unbound"), Driver::Floating);
        let name = aig
            .symbols
            .latches
            .get(i)
            .cloned()
            .flatten()
            .unwrap_or_else(|| format!("d{i}"));
        let cell = m.netlist.add_cell(
            CellKind::Droc { preloaded },
            vec![placeholder],
            Origin::Droc { index: i, twisted },
            &name,
        );
        let [qp, qn] = [0, 1].map(|p| m.netlist.cells[cell].outputs[p].expect("fresh output"));
        let var = aig.latch_lit(i).var();
        let (pos, neg) = if twisted { (qn, qp) } else { (qp, qn) };
        m.rails.insert((var, Rail::Pos), pos);
        m.rails.insert((var, Rail::Neg), neg);
        droc_cells.push((cell, placeholder));
    }

    let base = aig.first_and_var();
    for (i, and) in aig.ands.iter().enumerate() {
        let var = base + i as u32;
        let region = m.parity[var as usize];
        let req = m.reqs.get(var);
        for rail in [Rail::Pos, Rail::Neg] {
            if !req.has(rail) {
                continue;
            }
            let a = m.lit_net(and.fanin0, rail, region)?;
            let b = m.lit_net(and.fanin1, rail, region)?;
            let kind = if rail == Rail::Pos {
                CellKind::La
            } else {
                CellKind::Fa
            };
            let cell = m.netlist.add_cell(
                kind,
                vec![a, b],
                Origin::Node { var, rail },
                &format!("n{var}.{}", rail.suffix()),
            );
            let net = m.netlist.cells[cell].outputs[0].expect("fresh output");
            m.rails.insert((var, rail), net);
        }
    }

    for (i, (cell, placeholder)) in droc_cells.into_iter().enumerate() {
        let next = aig.latches[i].next;
        let kind = design.kinds[i];
        let region = if kind == DrocKind::Trigger {
            Parity::Even
        } else {
            Parity::Odd
        };
        let net = m.lit_net(next, droc_input_rail(kind, design.droc_init(i)), region)?;
        m.netlist.nets[placeholder].sinks.clear();
        m.netlist.cells[cell].inputs[0] = net;
        m.netlist.connect(net, Sink::Cell { cell, port: 0 });
    }
    // the placeholders are now unused and are removed during legalization

    for (index, (&lit, polarity)) in aig.outputs.iter().zip(&assignment.outputs).enumerate() {
        for &rail in polarity.rails() {
            let net = m.lit_net(lit, rail, Parity::Even)?;
            m.netlist.connect(net, Sink::Output { index, rail });
        }
    }
    Ok(m.netlist)
}

/// Replaces every multi-sink net by a chain (or balanced tree) of
/// splitters and removes nets without sinks.
pub fn insert_splitters(netlist: &Netlist, balanced: bool) -> Netlist {
    let mut out = netlist.clone();
    let original_nets = out.nets.len();
    for net in 0..original_nets {
        let sinks = std::mem::take(&mut out.nets[net].sinks);
        if sinks.len() <= 1 {
            out.nets[net].sinks = sinks;
            continue;
        }
        let origin = match out.nets[net].driver {
            Driver::Clock | Driver::Trigger => Origin::ClockTree,
            Driver::Cell { cell, .. } if out.cells[cell].origin == Origin::ClockTree => {
                Origin::ClockTree
            }
            _ => Origin::Fanout,
        };
        let name = out.nets[net].name.clone();
        let mut counter = 0;
        build_tree(&mut out, net, &sinks, balanced, origin, &name, &mut counter);
    }
    remove_dead_nets(&out)
}

/// Distributes `net` to `sinks` using `sinks.len() - 1` splitters.
fn build_tree(
    out: &mut Netlist,
    net: NetId,
    sinks: &[Sink],
    balanced: bool,
    origin: Origin,
    name: &str,
    counter: &mut usize,
) {
    if sinks.len() == 1 {
        attach(out, net, sinks[0]);
        return;
    }
    let prefix = format!("{name}.s{counter}");
    *counter += 1;
    let cell = out.add_cell(CellKind::Splitter, vec![net], origin, &prefix);
    let [left, right] = [0, 1].map(|p| out.cells[cell].outputs[p].expect("fresh output"));
    let (first, rest) = if balanced {
        sinks.split_at(sinks.len() / 2)
    } else {
        sinks.split_at(1)
    };
    build_tree(out, left, first, balanced, origin, name, counter);
    build_tree(out, right, rest, balanced, origin, name, counter);
}

/// Points `sink` at `net`, updating the consuming cell's port.
fn attach(out: &mut Netlist, net: NetId, sink: Sink) {
    if let Sink::Cell { cell, port } = sink {
        out.cells[cell].inputs[port] = net;
    }
    out.nets[net].sinks.push(sink);
}

/// Drops nets that nobody consumes and renumbers the rest.
fn remove_dead_nets(netlist: &Netlist) -> Netlist {
    let mut out = netlist.clone();
    let mut map = vec![usize::MAX; netlist.nets.len()];
    let mut nets = Vec::with_capacity(netlist.nets.len());
    for (id, net) in netlist.nets.iter().enumerate() {
        if net.sinks.is_empty() {
            match net.driver {
                Driver::Cell { cell, .. } if netlist.cells[cell].kind.is_logic() => {
                    warn!("dropping dead rail {}", net.name)
                }
                _ => debug!("dropping unused net {}", net.name),
            }
            continue;
        }
        map[id] = nets.len();
        nets.push(net.clone());
    }
    for cell in &mut out.cells {
        for input in &mut cell.inputs {
            *input = map[*input];
        }
        for output in &mut cell.outputs {
            *output = output.and_then(|n| (map[n] != usize::MAX).then(|| map[n]));
        }
    }
    out.clock = netlist
        .clock
        .and_then(|n| (map[n] != usize::MAX).then(|| map[n]));
    if let Some(t) = &mut out.trigger {
        t.net = map[t.net];
    }
    out.nets = nets;
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aig::{Aig, AndNode};
    use crate::polarity::{assign_output_polarities, propagate_requirements, Strategy};

    fn map(aig: Aig, strategy: Strategy) -> Netlist {
        let d = DrocAig::combinational(aig);
        let a = assign_output_polarities(&d, &strategy).unwrap();
        let r = propagate_requirements(&d, &a);
        insert_splitters(&map_design(&d, &r, &a).unwrap(), false)
    }

    #[test]
    fn formula_examples() {
        assert_eq!(splitter_count_formula(18, 4, 6), 16);
        assert_eq!(splitter_count_formula(10, 2, 6), 6);
        assert_eq!(splitter_count_formula(0, 3, 3), 0);
    }

    #[test]
    fn single_nand_is_one_fa() {
        let aig = Aig {
            num_inputs: 2,
            ands: vec![AndNode {
                fanin0: Lit::new(2, false),
                fanin1: Lit::new(1, false),
            }],
            outputs: vec![Lit::new(3, true)],
            ..Default::default()
        };
        let n = map(aig, Strategy::AllPositive);
        let c = n.counts();
        assert_eq!((c.la, c.fa, c.splitter), (0, 1, 0));
        n.check_structure(true).unwrap();
        // the FA reads the negative input rails
        for &net in &n.cells[0].inputs {
            assert!(matches!(
                n.nets[net].driver,
                Driver::Input {
                    rail: Rail::Neg,
                    ..
                }
            ));
        }
    }

    #[test]
    fn two_sinks_need_one_splitter() {
        let aig = Aig {
            num_inputs: 2,
            ands: vec![AndNode {
                fanin0: Lit::new(2, false),
                fanin1: Lit::new(1, false),
            }],
            outputs: vec![Lit::new(3, false), Lit::new(3, false)],
            ..Default::default()
        };
        let n = map(aig, Strategy::AllPositive);
        assert_eq!(n.counts().splitter, 1);
        n.check_structure(true).unwrap();
    }

    #[test]
    fn balanced_tree_has_same_count() {
        let aig = Aig {
            num_inputs: 1,
            outputs: vec![Lit::new(1, false); 5],
            ..Default::default()
        };
        let chain = map(aig.clone(), Strategy::AllPositive);
        let d = DrocAig::combinational(aig);
        let a = assign_output_polarities(&d, &Strategy::AllPositive).unwrap();
        let r = propagate_requirements(&d, &a);
        let tree = insert_splitters(&map_design(&d, &r, &a).unwrap(), true);
        assert_eq!(chain.counts().splitter, 4);
        assert_eq!(tree.counts().splitter, 4);
        tree.check_structure(true).unwrap();
    }

    #[test]
    fn constant_output_uses_a_source() {
        let aig = Aig {
            num_inputs: 0,
            outputs: vec![Lit::TRUE, Lit::FALSE],
            ..Default::default()
        };
        let n = map(aig, Strategy::AllPositive);
        let values: Vec<bool> = n
            .cells
            .iter()
            .filter_map(|c| match c.kind {
                CellKind::ConstSource { value } => Some(value),
                _ => None,
            })
            .collect();
        assert_eq!(values, vec![true, false]);
    }
}
