// SPDX-License-Identifier: Apache-2.0
//! Storage insertion: DROC pairs for latches, the one-shot trigger, forward
//! retiming and pipeline ranks.

use std::collections::HashMap;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::aig::{simplify_and, Aig, AndNode, Latch, LatchInit, Lit, Symbols, VarKind};
use crate::error::{Error, Result};
use crate::graph::{DelayModel, DrocAig, DrocKind};
use crate::netlist::{CellKind, Driver, Netlist, Origin, Sink, TriggerPlan};

/// Replaces every latch by a trigger DROC followed by a plain DROC.
///
/// The trigger DROC carries the latch's initial value; latch references
/// read the plain DROC. Unknown initial values become 0.
pub fn expand_latches(aig: &Aig) -> DrocAig {
    let n_in = aig.num_inputs;
    let n_latch = aig.latches.len();
    let old_and = aig.first_and_var();
    let new_and = (1 + n_in + 2 * n_latch) as u32;
    let remap = |lit: Lit| -> Lit {
        let var = lit.var();
        let new = match aig.kind(var) {
            VarKind::Const | VarKind::Input(_) => var,
            VarKind::Latch(i) => (1 + n_in + 2 * i + 1) as u32,
            VarKind::And(_) => var - old_and + new_and,
        };
        Lit::new(new, lit.is_complemented())
    };
    let mut latches = Vec::with_capacity(2 * n_latch);
    let mut kinds = Vec::with_capacity(2 * n_latch);
    let mut names = Vec::with_capacity(2 * n_latch);
    for (i, latch) in aig.latches.iter().enumerate() {
        if latch.init == LatchInit::Unknown {
            warn!(
                "latch {} has an unknown initial value; using 0",
                aig.latch_name(i)
            );
        }
        let init = if latch.init.value() {
            LatchInit::One
        } else {
            LatchInit::Zero
        };
        latches.push(Latch {
            next: remap(latch.next),
            init,
        });
        latches.push(Latch {
            next: Lit::new((1 + n_in + 2 * i) as u32, false),
            init: LatchInit::Zero,
        });
        kinds.extend([DrocKind::Trigger, DrocKind::Plain]);
        let name = aig.latch_name(i);
        names.extend([Some(format!("{name}.1")), Some(format!("{name}.2"))]);
    }
    let ands = aig
        .ands
        .iter()
        .map(|a| AndNode {
            fanin0: remap(a.fanin0),
            fanin1: remap(a.fanin1),
        })
        .collect();
    let mut symbols = aig.symbols.clone();
    symbols.latches = names;
    let expanded = Aig {
        num_inputs: n_in,
        latches,
        ands,
        outputs: aig.outputs.iter().map(|&o| remap(o)).collect(),
        symbols,
        comments: aig.comments.clone(),
    };
    DrocAig {
        aig: expanded,
        kinds,
        latency: 0,
    }
}

/// Adds the clock and trigger networks. Preloaded DROCs are clocked through
/// a merger of trigger and clock; the others by the clock alone. Fanout of
/// both networks is legalized later by splitter insertion.
pub fn build_trigger(netlist: &Netlist) -> Netlist {
    let mut out = netlist.clone();
    let drocs: Vec<usize> = out
        .cells
        .iter()
        .enumerate()
        .filter(|(_, c)| matches!(c.kind, CellKind::Droc { .. }) && c.inputs.len() == 1)
        .map(|(i, _)| i)
        .collect();
    if drocs.is_empty() {
        return out;
    }
    let clock = out.add_net("clk", Driver::Clock);
    out.clock = Some(clock);
    let preloaded: Vec<usize> = drocs
        .iter()
        .copied()
        .filter(|&c| out.cells[c].kind == CellKind::Droc { preloaded: true })
        .collect();
    let mut plan = None;
    if !preloaded.is_empty() {
        let trigger = out.add_net("trigger", Driver::Trigger);
        plan = Some(TriggerPlan {
            net: trigger,
            mergers: Vec::new(),
            drocs: preloaded.clone(),
        });
    }
    for &cell in &drocs {
        let clk_net = match (&mut plan, out.cells[cell].kind) {
            (Some(plan), CellKind::Droc { preloaded: true }) => {
                let name = format!("c{cell}.clk");
                let merger = out.add_cell(
                    CellKind::Merger,
                    vec![plan.net, clock],
                    Origin::ClockTree,
                    &name,
                );
                plan.mergers.push(merger);
                out.cells[merger].outputs[0].expect("fresh output")
            }
            _ => clock,
        };
        out.cells[cell].inputs.push(clk_net);
        out.connect(clk_net, Sink::Cell { cell, port: 1 });
    }
    out.trigger = plan;
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetimeConfig {
    pub max_moves: usize,
    pub delay_model: DelayModel,
}

impl Default for RetimeConfig {
    fn default() -> Self {
        RetimeConfig {
            max_moves: 100_000,
            delay_model: DelayModel::Unit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetimeReport {
    pub moves: usize,
    pub budget_exhausted: bool,
    pub stage_delay_before: f64,
    pub stage_delay_after: f64,
    pub drocs_before: usize,
    pub drocs_after: usize,
}

#[derive(Debug, Clone)]
enum WNode {
    Const,
    Input,
    Droc {
        next: Lit,
        kind: DrocKind,
        init: bool,
        name: Option<String>,
    },
    And(Lit, Lit),
}

/// Mutable graph used by the storage rewrites. Node ids double as variable
/// indices; moved nodes are aliased to their replacement.
#[derive(Debug, Clone)]
struct Work {
    nodes: Vec<WNode>,
    alias: Vec<Option<Lit>>,
    outputs: Vec<Lit>,
    num_inputs: usize,
    and_table: HashMap<(Lit, Lit), Lit>,
    droc_table: HashMap<(Lit, DrocKind, bool), Lit>,
    symbols: Symbols,
    comments: Vec<String>,
    latency: usize,
}

impl Work {
    fn from_design(d: &DrocAig) -> Work {
        let aig = &d.aig;
        let mut w = Work {
            nodes: Vec::with_capacity(aig.num_vars()),
            alias: Vec::new(),
            outputs: aig.outputs.clone(),
            num_inputs: aig.num_inputs,
            and_table: HashMap::new(),
            droc_table: HashMap::new(),
            symbols: aig.symbols.clone(),
            comments: aig.comments.clone(),
            latency: d.latency,
        };
        w.nodes.push(WNode::Const);
        w.nodes
            .extend(std::iter::repeat_n(WNode::Input, aig.num_inputs));
        for (i, latch) in aig.latches.iter().enumerate() {
            let name = aig.symbols.latches.get(i).cloned().flatten();
            w.nodes.push(WNode::Droc {
                next: latch.next,
                kind: d.kinds[i],
                init: d.droc_init(i),
                name,
            });
        }
        for (i, and) in aig.ands.iter().enumerate() {
            let lit = aig.and_lit(i);
            let key = if and.fanin0 > and.fanin1 {
                (and.fanin0, and.fanin1)
            } else {
                (and.fanin1, and.fanin0)
            };
            w.and_table.entry(key).or_insert(lit);
            w.nodes.push(WNode::And(and.fanin0, and.fanin1));
        }
        w.alias = vec![None; w.nodes.len()];
        w
    }

    fn resolve(&self, mut lit: Lit) -> Lit {
        while let Some(target) = self.alias[lit.var() as usize] {
            lit = target.xor(lit.is_complemented());
        }
        lit
    }

    fn push(&mut self, node: WNode) -> Lit {
        self.nodes.push(node);
        self.alias.push(None);
        Lit::new(self.nodes.len() as u32 - 1, false)
    }

    fn and(&mut self, a: Lit, b: Lit) -> Lit {
        let (a, b) = (self.resolve(a), self.resolve(b));
        if let Some(lit) = simplify_and(a, b) {
            return lit;
        }
        let key = if a > b { (a, b) } else { (b, a) };
        if let Some(&lit) = self.and_table.get(&key) {
            return lit;
        }
        let lit = self.push(WNode::And(key.0, key.1));
        self.and_table.insert(key, lit);
        lit
    }

    fn droc(&mut self, next: Lit, kind: DrocKind, init: bool) -> Lit {
        let next = self.resolve(next);
        let init = init && kind == DrocKind::Trigger;
        let key = (next, kind, init);
        if let Some(&lit) = self.droc_table.get(&key) {
            return lit;
        }
        let lit = self.push(WNode::Droc {
            next,
            kind,
            init,
            name: None,
        });
        self.droc_table.insert(key, lit);
        lit
    }

    /// Live nodes: everything the outputs depend on.
    fn live(&self) -> Vec<bool> {
        let mut live = vec![false; self.nodes.len()];
        let mut stack: Vec<u32> = self
            .outputs
            .iter()
            .map(|&o| self.resolve(o).var())
            .collect();
        while let Some(v) = stack.pop() {
            if std::mem::replace(&mut live[v as usize], true) {
                continue;
            }
            match &self.nodes[v as usize] {
                WNode::And(a, b) => stack.extend([self.resolve(*a).var(), self.resolve(*b).var()]),
                WNode::Droc { next, .. } => stack.push(self.resolve(*next).var()),
                _ => {}
            }
        }
        live
    }

    fn to_design(&self) -> DrocAig {
        let live = self.live();
        let n_in = self.num_inputs;
        let mut map: Vec<Option<u32>> = vec![None; self.nodes.len()];
        map[0] = Some(0);
        for i in 0..n_in {
            map[1 + i] = Some(1 + i as u32);
        }
        let drocs: Vec<usize> = (0..self.nodes.len())
            .filter(|&v| live[v] && matches!(self.nodes[v], WNode::Droc { .. }))
            .collect();
        for (k, &v) in drocs.iter().enumerate() {
            map[v] = Some((1 + n_in + k) as u32);
        }
        let mut next_var = (1 + n_in + drocs.len()) as u32;
        for v in 0..self.nodes.len() {
            if live[v] && matches!(self.nodes[v], WNode::And(..)) {
                map[v] = Some(next_var);
                next_var += 1;
            }
        }
        let conv = |lit: Lit| {
            let r = self.resolve(lit);
            Lit::new(
                map[r.var() as usize].expect("live node"),
                r.is_complemented(),
            )
        };
        let mut ands = Vec::new();
        for v in 0..self.nodes.len() {
            if let (true, WNode::And(a, b)) = (live[v], &self.nodes[v]) {
                ands.push(AndNode {
                    fanin0: conv(*a),
                    fanin1: conv(*b),
                });
            }
        }
        let mut latches = Vec::new();
        let mut kinds = Vec::new();
        let mut names = Vec::new();
        let mut fresh = 0;
        for &v in &drocs {
            if let WNode::Droc {
                next,
                kind,
                init,
                name,
            } = &self.nodes[v]
            {
                latches.push(Latch {
                    next: conv(*next),
                    init: if *init {
                        LatchInit::One
                    } else {
                        LatchInit::Zero
                    },
                });
                kinds.push(*kind);
                names.push(Some(name.clone().unwrap_or_else(|| {
                    fresh += 1;
                    format!("r{}", fresh - 1)
                })));
            }
        }
        let mut symbols = self.symbols.clone();
        symbols.latches = names;
        let aig = Aig {
            num_inputs: n_in,
            latches,
            ands,
            outputs: self.outputs.iter().map(|&o| conv(o)).collect(),
            symbols,
            comments: self.comments.clone(),
        };
        DrocAig {
            aig,
            kinds,
            latency: self.latency,
        }
    }
}

/// Timing view of a [`Work`] graph.
struct Timing {
    arrival: Vec<f64>,
    departure: Vec<f64>,
    delay: Vec<f64>,
    live: Vec<bool>,
}

fn analyze(w: &Work, model: DelayModel) -> Timing {
    let n = w.nodes.len();
    let live = w.live();
    let mut fanout = vec![0u32; n];
    let mut fanouts: Vec<Vec<u32>> = vec![Vec::new(); n];
    for v in 0..n {
        if !live[v] {
            continue;
        }
        match &w.nodes[v] {
            WNode::And(a, b) => {
                for f in [w.resolve(*a), w.resolve(*b)] {
                    fanout[f.var() as usize] += 1;
                    fanouts[f.var() as usize].push(v as u32);
                }
            }
            WNode::Droc { next, .. } => fanout[w.resolve(*next).var() as usize] += 1,
            _ => {}
        }
    }
    for &o in &w.outputs {
        fanout[w.resolve(o).var() as usize] += 1;
    }
    let delay: Vec<f64> = (0..n)
        .map(|v| {
            let is_and = matches!(w.nodes[v], WNode::And(..));
            match model {
                DelayModel::Unit => f64::from(u8::from(is_and)),
                DelayModel::Library {
                    gate_ps,
                    splitter_ps,
                } => {
                    let split = splitter_ps * f64::from(fanout[v].saturating_sub(1));
                    match w.nodes[v] {
                        WNode::And(..) => gate_ps + split,
                        WNode::Const => 0.0,
                        _ => split,
                    }
                }
            }
        })
        .collect();
    let mut arrival = delay.clone();
    for v in 0..n {
        if let (true, WNode::And(a, b)) = (live[v], &w.nodes[v]) {
            let (a, b) = (w.resolve(*a).var() as usize, w.resolve(*b).var() as usize);
            arrival[v] = delay[v] + arrival[a].max(arrival[b]);
        }
    }
    let mut departure = vec![0.0; n];
    for v in (0..n).rev() {
        if let (true, WNode::And(..)) = (live[v], &w.nodes[v]) {
            let after = fanouts[v]
                .iter()
                .map(|&u| departure[u as usize])
                .fold(0.0, f64::max);
            departure[v] = delay[v] + after;
        }
    }
    Timing {
        arrival,
        departure,
        delay,
        live,
    }
}

const EPS: f64 = 1e-9;

/// Forward moves until no stage is longer than `target`, as far as legal
/// moves allow. Returns the number of moves and whether the budget ran out.
fn feasible_moves(w: &mut Work, target: f64, model: DelayModel, budget: usize) -> (usize, bool) {
    let mut moves = 0;
    loop {
        let t = analyze(w, model);
        let mut candidates = Vec::new();
        for v in 0..w.nodes.len() {
            let WNode::And(a, b) = w.nodes[v] else {
                continue;
            };
            if !t.live[v] || w.alias[v].is_some() {
                continue;
            }
            let (ra, rb) = (w.resolve(a), w.resolve(b));
            let (Some((na, ka)), Some((nb, kb))) = (droc_of(w, ra), droc_of(w, rb)) else {
                continue;
            };
            if ka != kb {
                continue;
            }
            let source = t.delay[ra.var() as usize].max(t.delay[rb.var() as usize]);
            if source + t.departure[v] <= target + EPS {
                continue;
            }
            let before = t.delay[v]
                + t.arrival[w.resolve(na).var() as usize]
                    .max(t.arrival[w.resolve(nb).var() as usize]);
            if before > target + EPS {
                continue;
            }
            candidates.push(v);
        }
        if candidates.is_empty() {
            return (moves, false);
        }
        for v in candidates {
            if moves >= budget {
                return (moves, true);
            }
            move_forward(w, v);
            moves += 1;
        }
    }
}

fn droc_of(w: &Work, lit: Lit) -> Option<(Lit, DrocKind)> {
    match &w.nodes[lit.var() as usize] {
        WNode::Droc { next, kind, .. } => Some((*next, *kind)),
        _ => None,
    }
}

/// Moves the DROCs feeding AND node `v` to its output.
fn move_forward(w: &mut Work, v: usize) {
    let WNode::And(a, b) = w.nodes[v] else {
        unreachable!("move across a non-AND node")
    };
    let (ra, rb) = (w.resolve(a), w.resolve(b));
    let fetch = |lit: Lit| match &w.nodes[lit.var() as usize] {
        WNode::Droc {
            next, kind, init, ..
        } => (
            next.xor(lit.is_complemented()),
            *kind,
            *init ^ lit.is_complemented(),
        ),
        _ => unreachable!("fanin is not a DROC"),
    };
    let (na, kind, ia) = fetch(ra);
    let (nb, _, ib) = fetch(rb);
    let inner = w.and(na, nb);
    let moved = w.droc(inner, kind, ia && ib);
    w.alias[v] = Some(moved);
}

/// Forward retiming that balances the longest stage.
///
/// Candidate stage bounds are tried by bisection; the best result whose
/// longest stage does not exceed the input's is returned.
pub fn retime(design: &DrocAig, config: &RetimeConfig) -> (DrocAig, RetimeReport) {
    let model = config.delay_model;
    let before = design.max_stage_delay(model);
    let mut report = RetimeReport {
        moves: 0,
        budget_exhausted: false,
        stage_delay_before: before,
        stage_delay_after: before,
        drocs_before: design.num_drocs(),
        drocs_after: design.num_drocs(),
    };
    if design.num_drocs() == 0 || design.aig.ands.is_empty() {
        return (design.clone(), report);
    }
    let base = Work::from_design(design);
    let mut best = design.clone();
    let mut best_delay = before;
    let node_delays = design.node_delays(model);
    let mut lo = node_delays.iter().copied().fold(0.0, f64::max);
    let mut hi = before;
    let unit = matches!(model, DelayModel::Unit);
    for _ in 0..24 {
        if hi - lo < if unit { 0.5 } else { 0.05 } {
            break;
        }
        let target = if unit {
            ((lo + hi) / 2.0).floor()
        } else {
            (lo + hi) / 2.0
        };
        let mut w = base.clone();
        let (moves, exhausted) = feasible_moves(&mut w, target, model, config.max_moves);
        let candidate = w.to_design();
        let achieved = candidate.max_stage_delay(model);
        if achieved + EPS < best_delay
            || (achieved <= best_delay + EPS && candidate.num_drocs() < best.num_drocs())
        {
            best_delay = achieved;
            best = candidate;
            report.moves = moves;
            report.budget_exhausted = exhausted;
        }
        if achieved <= target + EPS {
            hi = target;
        } else if unit {
            lo = target + 1.0;
            if lo > hi {
                break;
            }
        } else {
            lo = target;
        }
    }
    report.stage_delay_after = best_delay;
    report.drocs_after = best.num_drocs();
    (best, report)
}

/// Inserts `2 * stages` DROC ranks into a combinational design at cuts of
/// equal accumulated delay. Odd ranks are trigger DROCs preloaded with 1.
/// Outputs lag their inputs by `stages` logical cycles.
pub fn insert_pipeline(design: &DrocAig, stages: usize, model: DelayModel) -> Result<DrocAig> {
    if stages == 0 {
        return Ok(design.clone());
    }
    if design.num_drocs() > 0 {
        return Err(Error::Invalid(
            "pipelining needs a combinational design".into(),
        ));
    }
    let depth = design.aig.depth();
    if stages > depth {
        return Err(Error::Invalid(format!(
            "{stages} pipeline stages exceed the logic depth {depth}"
        )));
    }
    let ranks = 2 * stages;
    let arrival = design.arrivals(model);
    let total = design
        .sinks()
        .map(|l| arrival[l.var() as usize])
        .fold(0.0, f64::max);
    let step = match model {
        DelayModel::Unit => (total / ranks as f64).ceil(),
        DelayModel::Library { .. } => total / ranks as f64,
    };
    let aig = &design.aig;
    let base = aig.first_and_var() as usize;
    let stage_of = |var: usize| -> usize {
        if var < base {
            return 0;
        }
        let s = (arrival[var] / step - 1e-9).ceil() as i64 - 1;
        s.clamp(0, ranks as i64 - 1) as usize
    };

    let mut w = Work::from_design(&DrocAig::combinational(Aig {
        num_inputs: aig.num_inputs,
        symbols: aig.symbols.clone(),
        comments: aig.comments.clone(),
        ..Default::default()
    }));
    w.latency = stages;
    // work literal of every original variable, delayed to each stage
    let mut chains: Vec<Vec<Lit>> = vec![Vec::new(); aig.num_vars()];
    for v in 0..base {
        chains[v].push(Lit::new(v as u32, false));
    }
    let delayed = |w: &mut Work, chains: &mut Vec<Vec<Lit>>, lit: Lit, stage: usize| -> Lit {
        let var = lit.var() as usize;
        if var == 0 {
            return lit;
        }
        let from = stage_of(var);
        let need = stage - from;
        while chains[var].len() <= need {
            let rank = from + chains[var].len();
            let prev = *chains[var].last().expect("chain start");
            let kind = if rank % 2 == 1 {
                DrocKind::Trigger
            } else {
                DrocKind::Plain
            };
            let next = w.droc(prev, kind, true);
            chains[var].push(next);
        }
        chains[var][need].xor(lit.is_complemented())
    };
    for (i, and) in aig.ands.iter().enumerate() {
        let var = base + i;
        let s = stage_of(var);
        let a = delayed(&mut w, &mut chains, and.fanin0, s);
        let b = delayed(&mut w, &mut chains, and.fanin1, s);
        let lit = w.and(a, b);
        chains[var].push(lit);
    }
    w.outputs = aig
        .outputs
        .iter()
        .map(|&o| delayed(&mut w, &mut chains, o, ranks))
        .collect();
    let result = w.to_design();
    result.validate()?;
    Ok(result)
}

/// Longest chain of AND nodes inside any stage.
pub fn max_stage_depth(design: &DrocAig) -> usize {
    design.max_stage_delay(DelayModel::Unit).round() as usize
}
