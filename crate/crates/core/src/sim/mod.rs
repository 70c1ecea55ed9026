// SPDX-License-Identifier: Apache-2.0
//! Event-driven pulse simulation.
//!
//! Times are integer femtoseconds. Tick `t` of the clock happens at
//! `(t + 1) * period`, so the trigger tick `-1` sits at time zero. Even
//! region cycle `k` spans ticks `2k` (excite) and `2k + 1` (relax); odd
//! region cycle `k` spans ticks `2k - 1` and `2k`. Clock distribution is
//! ideal: its cells have no delay and its pulses are delivered before data
//! pulses arriving at the same instant.

mod oracle;
mod vcd;

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use serde::{Deserialize, Serialize};

pub use self::oracle::oracle_simulate;
pub use self::vcd::{pulses_to_json, write_vcd};

use crate::aig::Aig;
use crate::cost::{critical_path, CellLibrary};
use crate::error::{Error, Result};
use crate::graph::Parity;
use crate::io::{parse_aiger, AigerFormat};
use crate::netlist::{CellId, CellKind, Driver, NetId, Netlist, Origin, Sink};
use crate::polarity::Rail;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    /// Clock period in picoseconds; derived from the critical path if unset.
    pub phase_period_ps: Option<f64>,
    /// Deliver the trigger pulse at tick -1.
    pub trigger: bool,
    /// Keep every pulse for waveform export.
    pub record: bool,
    pub ptl: bool,
    /// Violations kept in full; the rest are only counted.
    pub max_violations: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            phase_period_ps: None,
            trigger: true,
            record: false,
            ptl: false,
            max_violations: 256,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pulse {
    pub net: NetId,
    pub time_fs: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// A gate still waits for its second input when the cycle ends.
    NotInit,
    /// A port saw other than one pulse in a cycle.
    PortCount,
    /// The same gate input pulsed twice before the gate reset.
    DoubleArrival,
    /// A DROC received data while already holding a pulse.
    DoubleStore,
    /// An output rail did not pulse exactly once, or its rails disagree.
    Undecodable,
    /// Cell inputs come from different regions.
    RegionConflict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub cycle: usize,
    pub kind: ViolationKind,
    pub cell: Option<CellId>,
    pub output: Option<usize>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub period_fs: u64,
    pub cycles: usize,
    /// Decoded outputs per logical cycle; `None` where decoding failed.
    pub outputs: Vec<Vec<Option<bool>>>,
    pub violations: Vec<Violation>,
    pub violation_count: usize,
    pub pulse_count: u64,
    /// Recorded pulses, empty unless requested.
    pub pulses: Vec<Pulse>,
}

impl SimResult {
    pub fn is_clean(&self) -> bool {
        self.violation_count == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub cycle: usize,
    pub output: usize,
    pub expected: bool,
    pub got: Option<bool>,
}

fn fs(ps: f64) -> u64 {
    (ps * 1000.0).round().max(0.0) as u64
}

/// Period with 25% margin over the slowest stage, including clock-to-output
/// delay when the netlist stores state.
pub fn default_phase_period_ps(netlist: &Netlist, lib: &CellLibrary, ptl: bool) -> Result<f64> {
    let path = critical_path(netlist, lib, ptl)?;
    let storage = netlist
        .cells
        .iter()
        .any(|c| matches!(c.kind, CellKind::Droc { .. }));
    let overhead = if storage { lib.clk_to_q_ps(ptl) } else { 0.0 };
    Ok((1.25 * (path.delay_ps + overhead)).max(1.0))
}

/// Input pulses for a sequence of vectors: a rail pulses in the excite
/// phase when it carries a 1 and in the relax phase otherwise.
pub fn encode_stimulus(
    netlist: &Netlist,
    vectors: &[Vec<bool>],
    period_fs: u64,
) -> Result<Vec<Pulse>> {
    let mut pulses = Vec::new();
    for (k, v) in vectors.iter().enumerate() {
        if v.len() != netlist.inputs.len() {
            return Err(Error::Simulation(format!(
                "vector {k} has {} values, the netlist has {} inputs",
                v.len(),
                netlist.inputs.len()
            )));
        }
        let excite = (2 * k as u64 + 1) * period_fs;
        for (net, n) in netlist.nets.iter().enumerate() {
            if let Driver::Input { index, rail } = n.driver {
                let one = v[index] ^ (rail == Rail::Neg);
                pulses.push(Pulse {
                    net,
                    time_fs: if one { excite } else { excite + period_fs },
                });
            }
        }
    }
    pulses.sort_by_key(|p| (p.time_fs, p.net));
    Ok(pulses)
}

const OUTPUT_TARGET: u64 = 1 << 62;
const DATA_CLASS: u64 = 1 << 63;

/// Events bucketed by time. The bucket being processed is a heap so that
/// zero-delay events land in order within the current instant.
#[derive(Default)]
struct Queue {
    now: u64,
    current: BinaryHeap<Reverse<u64>>,
    later: BTreeMap<u64, Vec<Reverse<u64>>>,
    spare: Vec<Vec<Reverse<u64>>>,
}

impl Queue {
    fn push(&mut self, time: u64, key: u64) {
        if time == self.now && !self.current.is_empty() {
            self.current.push(Reverse(key));
        } else {
            let spare = &mut self.spare;
            self.later
                .entry(time)
                .or_insert_with(|| spare.pop().unwrap_or_default())
                .push(Reverse(key));
        }
    }

    fn peek_time(&self) -> Option<u64> {
        if self.current.is_empty() {
            self.later.keys().next().copied()
        } else {
            Some(self.now)
        }
    }

    fn pop(&mut self) -> Option<(u64, u64)> {
        if self.current.is_empty() {
            let (time, keys) = self.later.pop_first()?;
            self.now = time;
            let mut done = std::mem::replace(&mut self.current, BinaryHeap::from(keys)).into_vec();
            done.clear();
            self.spare.push(done);
        }
        self.current.pop().map(|Reverse(k)| (self.now, k))
    }
}

const NO_NET: u32 = u32::MAX;

struct Engine {
    period: u64,
    queue: Queue,
    /// Sinks of net `n` are `sink_keys[sink_start[n]..sink_start[n + 1]]`,
    /// already tagged with their event class.
    sink_start: Vec<u32>,
    sink_keys: Vec<u64>,
    record: bool,
    pulses: Vec<Pulse>,
    pulse_count: u64,
}

impl Engine {
    fn emit(&mut self, net: NetId, time: u64) {
        self.pulse_count += 1;
        if self.record {
            self.pulses.push(Pulse { net, time_fs: time });
        }
        let (lo, hi) = (
            self.sink_start[net] as usize,
            self.sink_start[net + 1] as usize,
        );
        for &key in &self.sink_keys[lo..hi] {
            self.queue.push(time, key);
        }
    }

    fn emit_port(&mut self, net: u32, time: u64) {
        if net != NO_NET {
            self.emit(net as usize, time);
        }
    }

    fn cycle_of(&self, parity: Parity, time: u64) -> usize {
        let p = self.period;
        match parity {
            Parity::Even => (time.saturating_sub(p) / (2 * p)) as usize,
            Parity::Odd => (time / (2 * p)) as usize,
        }
    }
}

struct Violations {
    kept: Vec<Violation>,
    count: usize,
    limit: usize,
}

impl Violations {
    fn push(&mut self, v: Violation) {
        self.count += 1;
        if self.kept.len() < self.limit {
            self.kept.push(v);
        }
    }
}

/// Region of every cell, derived from the sources feeding it.
fn cell_parities(netlist: &Netlist, violations: &mut Violations) -> Result<Vec<Option<Parity>>> {
    let mut net_parity: Vec<Option<Parity>> = netlist
        .nets
        .iter()
        .map(|n| matches!(n.driver, Driver::Input { .. }).then_some(Parity::Even))
        .collect();
    let mut parity = vec![None; netlist.cells.len()];
    for (id, cell) in netlist.cells.iter().enumerate() {
        let p = match (cell.kind, cell.origin) {
            (CellKind::Droc { preloaded }, _) => {
                Some(if preloaded { Parity::Odd } else { Parity::Even })
            }
            (CellKind::ConstSource { .. }, Origin::Constant { odd }) => {
                Some(if odd { Parity::Odd } else { Parity::Even })
            }
            _ => continue,
        };
        for net in cell.outputs.iter().flatten() {
            net_parity[*net] = p;
        }
        if !matches!(cell.kind, CellKind::Droc { .. }) {
            parity[id] = p;
        }
    }
    for id in netlist.topological_order()? {
        let cell = &netlist.cells[id];
        if cell.origin == Origin::ClockTree || matches!(cell.kind, CellKind::ConstSource { .. }) {
            continue;
        }
        let data_inputs = match cell.kind {
            CellKind::Droc { .. } => &cell.inputs[..1],
            _ => &cell.inputs[..],
        };
        let mut p = None;
        for &net in data_inputs {
            match (p, net_parity[net]) {
                (None, q) => p = q,
                (Some(a), Some(b)) if a != b => violations.push(Violation {
                    cycle: 0,
                    kind: ViolationKind::RegionConflict,
                    cell: Some(id),
                    output: None,
                    detail: format!("{} mixes even and odd inputs", cell.kind),
                }),
                _ => {}
            }
        }
        if let CellKind::Droc { preloaded } = cell.kind {
            let expected = if preloaded { Parity::Even } else { Parity::Odd };
            if p.is_some_and(|p| p != expected) {
                violations.push(Violation {
                    cycle: 0,
                    kind: ViolationKind::RegionConflict,
                    cell: Some(id),
                    output: None,
                    detail: format!("{} reads the wrong region", cell.kind),
                });
            }
            parity[id] = Some(p.unwrap_or(expected));
            continue;
        }
        parity[id] = p;
        for net in cell.outputs.iter().flatten() {
            net_parity[*net] = p;
        }
    }
    Ok(parity)
}

/// Runs `vectors.len()` logical cycles and decodes the outputs.
pub fn simulate(
    netlist: &Netlist,
    lib: &CellLibrary,
    vectors: &[Vec<bool>],
    cfg: &SimConfig,
) -> Result<SimResult> {
    let period_ps = match cfg.phase_period_ps {
        Some(p) if p > 0.0 && p.is_finite() => p,
        Some(p) => return Err(Error::Simulation(format!("invalid phase period {p}"))),
        None => default_phase_period_ps(netlist, lib, cfg.ptl)?,
    };
    let period = fs(period_ps).max(1);
    let n_cycles = vectors.len();
    let stimulus = encode_stimulus(netlist, vectors, period)?;
    let mut violations = Violations {
        kept: Vec::new(),
        count: 0,
        limit: cfg.max_violations,
    };
    let parity = cell_parities(netlist, &mut violations)?;

    let n_cells = netlist.cells.len();
    let clock_cell: Vec<bool> = netlist
        .cells
        .iter()
        .map(|c| c.origin == Origin::ClockTree)
        .collect();
    let clock_net: Vec<bool> = netlist
        .nets
        .iter()
        .map(|n| match n.driver {
            Driver::Clock | Driver::Trigger => true,
            Driver::Cell { cell, .. } => clock_cell[cell],
            _ => false,
        })
        .collect();
    let delay: Vec<(u64, u64)> = netlist
        .cells
        .iter()
        .map(|c| match c.kind {
            _ if c.origin == Origin::ClockTree => (0, 0),
            CellKind::Droc { .. } => {
                let d = lib.variant(cfg.ptl).droc;
                (fs(d.qp_delay_ps), fs(d.qn_delay_ps))
            }
            k => (fs(lib.delay_ps(k, cfg.ptl)), 0),
        })
        .collect();

    let mut sink_start = Vec::with_capacity(netlist.nets.len() + 1);
    let mut sink_keys = Vec::new();
    for (net, n) in netlist.nets.iter().enumerate() {
        sink_start.push(sink_keys.len() as u32);
        let class = if clock_net[net] { 0 } else { DATA_CLASS };
        for sink in &n.sinks {
            let target = match *sink {
                Sink::Cell { cell, port } => ((cell as u64) << 1) | port as u64,
                Sink::Output { index, rail } => {
                    OUTPUT_TARGET | ((index as u64) << 1) | (rail == Rail::Neg) as u64
                }
            };
            sink_keys.push(class | target);
        }
    }
    sink_start.push(sink_keys.len() as u32);
    let kinds: Vec<CellKind> = netlist.cells.iter().map(|c| c.kind).collect();
    let outs: Vec<[u32; 2]> = netlist
        .cells
        .iter()
        .map(|c| {
            let port = |i: usize| {
                c.outputs
                    .get(i)
                    .copied()
                    .flatten()
                    .map_or(NO_NET, |n| n as u32)
            };
            [port(0), port(1)]
        })
        .collect();

    let mut engine = Engine {
        period,
        queue: Queue::default(),
        sink_start,
        sink_keys,
        record: cfg.record,
        pulses: Vec::new(),
        pulse_count: 0,
    };
    let end = (2 * n_cycles as u64 + 1) * period;
    if n_cycles > 0 {
        if let (Some(plan), true) = (&netlist.trigger, cfg.trigger) {
            engine.emit(plan.net, 0);
        }
        if let Some(clock) = netlist.clock {
            for tick in 0..2 * n_cycles as u64 {
                engine.emit(clock, (tick + 1) * period);
            }
        }
        for pulse in &stimulus {
            engine.emit(pulse.net, pulse.time_fs);
        }
        for cell in &netlist.cells {
            let (CellKind::ConstSource { value }, Origin::Constant { odd }, Some(net)) =
                (cell.kind, cell.origin, cell.outputs[0])
            else {
                continue;
            };
            // Odd constants start at the trigger tick.
            let first: i64 = if odd { -1 } else { 0 };
            for tick in first..2 * n_cycles as i64 {
                let excite = (tick.rem_euclid(2) == 1) == odd;
                if excite == value {
                    engine.emit(net, (tick + 1) as u64 * period);
                }
            }
        }
    }

    let mut port_count = vec![0u8; 2 * n_cells];
    let mut state = vec![0u8; n_cells];
    let mut stored: Vec<bool> = netlist
        .cells
        .iter()
        .map(|c| c.kind == CellKind::Droc { preloaded: true })
        .collect();
    let checked: Vec<(CellId, Parity)> = netlist
        .cells
        .iter()
        .enumerate()
        .filter(|(_, c)| matches!(c.kind, CellKind::La | CellKind::Fa | CellKind::Droc { .. }))
        .filter_map(|(id, _)| parity[id].map(|p| (id, p)))
        .collect();
    let n_out = netlist.outputs.len();
    let mut out_count = vec![[0u8; 2]; 2 * n_out];
    let mut outputs = Vec::with_capacity(n_cycles);

    let mut boundary = 1u64;
    let last_boundary = 2 * n_cycles as u64;
    let close = |tick: u64,
                 port_count: &mut [u8],
                 state: &[u8],
                 out_count: &mut [[u8; 2]],
                 outputs: &mut Vec<Vec<Option<bool>>>,
                 violations: &mut Violations| {
        let (region, cycle) = if tick % 2 == 1 {
            (Parity::Odd, ((tick - 1) / 2) as usize)
        } else {
            (Parity::Even, (tick / 2 - 1) as usize)
        };
        for &(id, p) in checked.iter().filter(|(_, p)| *p == region) {
            let _ = p;
            let cell = &netlist.cells[id];
            let ports = if matches!(cell.kind, CellKind::Droc { .. }) {
                1
            } else {
                2
            };
            if ports == 2 && state[id] != 0 {
                violations.push(Violation {
                    cycle,
                    kind: ViolationKind::NotInit,
                    cell: Some(id),
                    output: None,
                    detail: format!("{} left waiting", cell.kind),
                });
            }
            for port in 0..ports {
                let c = port_count[2 * id + port];
                if c != 1 {
                    violations.push(Violation {
                        cycle,
                        kind: ViolationKind::PortCount,
                        cell: Some(id),
                        output: None,
                        detail: format!("{} port {port} saw {c} pulses", cell.kind),
                    });
                }
                port_count[2 * id + port] = 0;
            }
        }
        if region == Parity::Odd {
            return;
        }
        let mut row = Vec::with_capacity(n_out);
        for (index, port) in netlist.outputs.iter().enumerate() {
            let mut value = None;
            let mut ok = true;
            for &rail in port.polarity.rails() {
                let [e, r] = out_count[2 * index + (rail == Rail::Neg) as usize];
                if e + r != 1 {
                    ok = false;
                    continue;
                }
                let v = (e == 1) ^ (rail == Rail::Neg);
                match value {
                    None => value = Some(v),
                    Some(w) if w != v => ok = false,
                    _ => {}
                }
            }
            if !ok {
                violations.push(Violation {
                    cycle,
                    kind: ViolationKind::Undecodable,
                    cell: None,
                    output: Some(index),
                    detail: format!("output {} does not alternate", port.name),
                });
                value = None;
            }
            row.push(value);
            out_count[2 * index] = [0, 0];
            out_count[2 * index + 1] = [0, 0];
        }
        outputs.push(row);
    };

    while let Some(time) = engine.queue.peek_time() {
        while boundary <= last_boundary && time >= (boundary + 1) * period {
            close(
                boundary,
                &mut port_count,
                &state,
                &mut out_count,
                &mut outputs,
                &mut violations,
            );
            boundary += 1;
        }
        if time >= end {
            break;
        }
        let (_, key) = engine.queue.pop().expect("peeked");
        let target = key & !DATA_CLASS;
        if target & OUTPUT_TARGET != 0 {
            let slot = (target & !OUTPUT_TARGET) as usize;
            let excite = (time.saturating_sub(period) / period).is_multiple_of(2);
            let c = &mut out_count[slot][(!excite) as usize];
            *c = c.saturating_add(1);
            continue;
        }
        let id = (target >> 1) as usize;
        let port = (target & 1) as usize;
        let kind = kinds[id];
        let [out0, out1] = outs[id];
        if !(matches!(kind, CellKind::Droc { .. }) && port == 1) {
            let c = &mut port_count[2 * id + port];
            *c = c.saturating_add(1);
        }
        let region = || parity[id].unwrap_or(Parity::Even);
        match kind {
            CellKind::La | CellKind::Fa => {
                let arrived = 1 + port as u8;
                let la = kind == CellKind::La;
                match state[id] {
                    0 => {
                        state[id] = arrived;
                        if !la {
                            engine.emit_port(out0, time + delay[id].0);
                        }
                    }
                    s if s == arrived => {
                        let cycle = engine.cycle_of(region(), time);
                        violations.push(Violation {
                            cycle,
                            kind: ViolationKind::DoubleArrival,
                            cell: Some(id),
                            output: None,
                            detail: format!("{kind} port {port} pulsed twice"),
                        });
                    }
                    _ => {
                        state[id] = 0;
                        if la {
                            engine.emit_port(out0, time + delay[id].0);
                        }
                    }
                }
            }
            CellKind::Splitter => {
                engine.emit_port(out0, time + delay[id].0);
                engine.emit_port(out1, time + delay[id].0);
            }
            CellKind::Merger | CellKind::Jtl => engine.emit_port(out0, time + delay[id].0),
            CellKind::Droc { .. } if port == 0 => {
                if stored[id] {
                    let cycle = engine.cycle_of(region(), time);
                    violations.push(Violation {
                        cycle,
                        kind: ViolationKind::DoubleStore,
                        cell: Some(id),
                        output: None,
                        detail: "DROC written twice".into(),
                    });
                }
                stored[id] = true;
            }
            CellKind::Droc { .. } => {
                let (q, d) = if stored[id] {
                    (out0, delay[id].0)
                } else {
                    (out1, delay[id].1)
                };
                stored[id] = false;
                engine.emit_port(q, time + d);
            }
            CellKind::ConstSource { .. } => {}
        }
    }
    while boundary <= last_boundary {
        close(
            boundary,
            &mut port_count,
            &state,
            &mut out_count,
            &mut outputs,
            &mut violations,
        );
        boundary += 1;
    }

    let mut pulses = engine.pulses;
    pulses.sort_by_key(|p| (p.time_fs, p.net));
    Ok(SimResult {
        period_fs: period,
        cycles: n_cycles,
        outputs,
        violations: violations.kept,
        violation_count: violations.count,
        pulse_count: engine.pulse_count,
        pulses,
    })
}

/// Compares decoded outputs with reference values shifted by `latency`.
pub fn compare_outputs(
    result: &SimResult,
    reference: &[Vec<bool>],
    latency: usize,
) -> Vec<Mismatch> {
    let mut mismatches = Vec::new();
    for (cycle, row) in result.outputs.iter().enumerate().skip(latency) {
        let Some(expected) = reference.get(cycle - latency) else {
            break;
        };
        for (output, (&want, &got)) in expected.iter().zip(row).enumerate() {
            if got != Some(want) {
                mismatches.push(Mismatch {
                    cycle,
                    output,
                    expected: want,
                    got,
                });
            }
        }
    }
    mismatches
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    pub result: SimResult,
    pub reference: Vec<Vec<bool>>,
    pub mismatches: Vec<Mismatch>,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && self.result.is_clean()
    }
}

/// The design a netlist was synthesized from, when it carries one.
pub fn embedded_design(netlist: &Netlist) -> Result<Option<Aig>> {
    netlist
        .design
        .as_deref()
        .map(|text| parse_aiger(text.as_bytes(), AigerFormat::Ascii))
        .transpose()
}

/// Simulates `netlist` and checks it against its embedded source design.
pub fn verify(
    netlist: &Netlist,
    lib: &CellLibrary,
    vectors: &[Vec<bool>],
    cfg: &SimConfig,
) -> Result<Verification> {
    let design = embedded_design(netlist)?
        .ok_or_else(|| Error::Simulation("netlist carries no source design".into()))?;
    verify_against(netlist, &design, lib, vectors, cfg)
}

pub fn verify_against(
    netlist: &Netlist,
    design: &Aig,
    lib: &CellLibrary,
    vectors: &[Vec<bool>],
    cfg: &SimConfig,
) -> Result<Verification> {
    if design.num_inputs != netlist.inputs.len() || design.outputs.len() != netlist.outputs.len() {
        return Err(Error::Simulation(
            "design and netlist interfaces differ".into(),
        ));
    }
    let result = simulate(netlist, lib, vectors, cfg)?;
    let reference = oracle_simulate(design, vectors)?;
    let mismatches = compare_outputs(&result, &reference, netlist.latency);
    Ok(Verification {
        result,
        reference,
        mismatches,
    })
}

/// Reproducible random input vectors.
pub fn random_vectors(n_inputs: usize, cycles: usize, seed: u64) -> Vec<Vec<bool>> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..cycles)
        .map(|_| (0..n_inputs).map(|_| rng.gen()).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::OutputPort;
    use crate::polarity::OutputPolarity;

    /// y = a & b on the positive rail only.
    fn and_gate() -> Netlist {
        let mut n = Netlist::new("and");
        n.inputs = vec!["a".into(), "b".into()];
        let a = n.add_net(
            "a.p",
            Driver::Input {
                index: 0,
                rail: Rail::Pos,
            },
        );
        let b = n.add_net(
            "b.p",
            Driver::Input {
                index: 1,
                rail: Rail::Pos,
            },
        );
        let la = n.add_cell(
            CellKind::La,
            vec![a, b],
            Origin::Node {
                var: 3,
                rail: Rail::Pos,
            },
            "y",
        );
        let y = n.cells[la].outputs[0].unwrap();
        n.connect(
            y,
            Sink::Output {
                index: 0,
                rail: Rail::Pos,
            },
        );
        n.outputs.push(OutputPort {
            name: "y".into(),
            polarity: OutputPolarity::Positive,
        });
        n
    }

    #[test]
    fn stimulus_encoding() {
        let n = and_gate();
        let p = encode_stimulus(&n, &[vec![true, false]], 100).unwrap();
        assert_eq!(
            p,
            vec![
                Pulse {
                    net: 0,
                    time_fs: 100
                },
                Pulse {
                    net: 1,
                    time_fs: 200
                }
            ]
        );
        assert!(encode_stimulus(&n, &[vec![true]], 100).is_err());
    }

    #[test]
    fn and_truth_table() {
        let n = and_gate();
        let vectors: Vec<Vec<bool>> = (0..4).map(|i| vec![i & 1 == 1, i & 2 == 2]).collect();
        let r = simulate(&n, &CellLibrary::default(), &vectors, &SimConfig::default()).unwrap();
        assert!(r.is_clean(), "{:?}", r.violations);
        let got: Vec<Option<bool>> = r.outputs.iter().map(|o| o[0]).collect();
        assert_eq!(got, vec![Some(false), Some(false), Some(false), Some(true)]);
    }

    #[test]
    fn floating_input_is_flagged() {
        let mut n = and_gate();
        n.disconnect_input(0, 1);
        let r = simulate(
            &n,
            &CellLibrary::default(),
            &[vec![true, true]],
            &SimConfig::default(),
        )
        .unwrap();
        assert!(r
            .violations
            .iter()
            .any(|v| v.kind == ViolationKind::PortCount));
        assert!(r
            .violations
            .iter()
            .any(|v| v.kind == ViolationKind::NotInit));
        assert_eq!(r.outputs[0][0], None);
    }

    #[test]
    fn mismatches_respect_latency() {
        let result = SimResult {
            period_fs: 1,
            cycles: 3,
            outputs: vec![vec![None], vec![Some(true)], vec![Some(false)]],
            violations: Vec::new(),
            violation_count: 0,
            pulse_count: 0,
            pulses: Vec::new(),
        };
        assert!(compare_outputs(&result, &[vec![true], vec![false]], 1).is_empty());
        assert_eq!(
            compare_outputs(&result, &[vec![true], vec![true]], 1).len(),
            1
        );
    }
}
