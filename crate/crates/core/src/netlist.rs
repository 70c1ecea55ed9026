// SPDX-License-Identifier: Apache-2.0
//! Cell netlists.
//!
//! Nets carry single pulses. Each net has exactly one driver; after fanout
//! legalization each net also has exactly one sink.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polarity::{OutputPolarity, Rail};

pub const SCHEMA: &str = "xsfq-netlist/1";

pub type CellId = usize;
pub type NetId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CellKind {
    La,
    Fa,
    Splitter,
    Droc { preloaded: bool },
    Merger,
    Jtl,
    ConstSource { value: bool },
}

impl CellKind {
    /// Input and output port counts.
    pub fn arity(self) -> (usize, usize) {
        match self {
            CellKind::La | CellKind::Fa | CellKind::Merger => (2, 1),
            CellKind::Splitter => (1, 2),
            CellKind::Droc { .. } => (2, 2),
            CellKind::Jtl => (1, 1),
            CellKind::ConstSource { .. } => (0, 1),
        }
    }

    pub fn is_logic(self) -> bool {
        matches!(self, CellKind::La | CellKind::Fa)
    }

    pub fn label(self) -> &'static str {
        match self {
            CellKind::La => "LA",
            CellKind::Fa => "FA",
            CellKind::Splitter => "SPLITTER",
            CellKind::Droc { preloaded: true } => "DROC_PRELOADED",
            CellKind::Droc { preloaded: false } => "DROC",
            CellKind::Merger => "MERGER",
            CellKind::Jtl => "JTL",
            CellKind::ConstSource { .. } => "CONST_SOURCE",
        }
    }
}

impl fmt::Display for CellKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// What a cell implements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Origin {
    /// One rail of an AND node.
    Node { var: u32, rail: Rail },
    /// A DROC of the storage graph; `twisted` DROCs store the complement and
    /// drive the positive rail from Qn.
    Droc { index: usize, twisted: bool },
    /// Data fanout.
    Fanout,
    /// Clock or trigger distribution.
    ClockTree,
    /// Constant rail for a region (`odd` selects the odd region).
    Constant { odd: bool },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub kind: CellKind,
    pub inputs: Vec<NetId>,
    /// `None` marks an output whose rail nobody consumes.
    pub outputs: Vec<Option<NetId>>,
    pub origin: Origin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Driver {
    Input {
        index: usize,
        rail: Rail,
    },
    Cell {
        cell: CellId,
        port: usize,
    },
    Clock,
    Trigger,
    /// Left unconnected, for fault injection.
    Floating,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Sink {
    Cell {
        cell: CellId,
        port: usize,
    },
    /// Output `index`; a pulse in the excite phase decodes to 1 on a
    /// positive rail and to 0 on a negative one.
    Output {
        index: usize,
        rail: Rail,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Net {
    pub name: String,
    pub driver: Driver,
    pub sinks: Vec<Sink>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputPort {
    pub name: String,
    pub polarity: OutputPolarity,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriggerPlan {
    pub net: NetId,
    pub mergers: Vec<CellId>,
    /// DROCs clocked by the trigger as well as the clock.
    pub drocs: Vec<CellId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Netlist {
    pub schema: String,
    pub name: String,
    pub cells: Vec<Cell>,
    pub nets: Vec<Net>,
    pub inputs: Vec<String>,
    pub outputs: Vec<OutputPort>,
    pub clock: Option<NetId>,
    pub trigger: Option<TriggerPlan>,
    /// Logical cycles between an input vector and its outputs.
    pub latency: usize,
    /// Source design as ascii AIGER, used as the simulation reference.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub design: Option<String>,
}

/// Cell totals by kind.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellCounts {
    pub la: usize,
    pub fa: usize,
    pub splitter: usize,
    pub clock_splitter: usize,
    pub droc_preloaded: usize,
    pub droc_plain: usize,
    pub merger: usize,
    pub jtl: usize,
    pub const_source: usize,
}

impl CellCounts {
    pub fn lafa(&self) -> usize {
        self.la + self.fa
    }

    pub fn drocs(&self) -> usize {
        self.droc_preloaded + self.droc_plain
    }
}

impl Netlist {
    pub fn new(name: impl Into<String>) -> Netlist {
        Netlist {
            schema: SCHEMA.to_string(),
            name: name.into(),
            cells: Vec::new(),
            nets: Vec::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            clock: None,
            trigger: None,
            latency: 0,
            design: None,
        }
    }

    pub fn add_net(&mut self, name: impl Into<String>, driver: Driver) -> NetId {
        self.nets.push(Net {
            name: name.into(),
            driver,
            sinks: Vec::new(),
        });
        self.nets.len() - 1
    }

    /// Adds a cell, connecting `inputs` as sinks and creating one net per
    /// output named `<prefix>.<port>`.
    pub fn add_cell(
        &mut self,
        kind: CellKind,
        inputs: Vec<NetId>,
        origin: Origin,
        prefix: &str,
    ) -> CellId {
        let id = self.cells.len();
        for (port, &net) in inputs.iter().enumerate() {
            self.nets[net].sinks.push(Sink::Cell { cell: id, port });
        }
        let n_out = kind.arity().1;
        let outputs = (0..n_out)
            .map(|port| {
                let suffix = match (kind, port) {
                    (CellKind::Droc { .. }, 0) => "qp".to_string(),
                    (CellKind::Droc { .. }, _) => "qn".to_string(),
                    (_, _) if n_out == 1 => "o".to_string(),
                    (_, p) => format!("o{p}"),
                };
                Some(self.add_net(
                    format!("{prefix}.{suffix}"),
                    Driver::Cell { cell: id, port },
                ))
            })
            .collect();
        self.cells.push(Cell {
            kind,
            inputs,
            outputs,
            origin,
        });
        id
    }

    pub fn connect(&mut self, net: NetId, sink: Sink) {
        self.nets[net].sinks.push(sink);
    }

    pub fn counts(&self) -> CellCounts {
        let mut c = CellCounts::default();
        for cell in &self.cells {
            match cell.kind {
                CellKind::La => c.la += 1,
                CellKind::Fa => c.fa += 1,
                CellKind::Splitter if cell.origin == Origin::ClockTree => c.clock_splitter += 1,
                CellKind::Splitter => c.splitter += 1,
                CellKind::Droc { preloaded: true } => c.droc_preloaded += 1,
                CellKind::Droc { preloaded: false } => c.droc_plain += 1,
                CellKind::Merger => c.merger += 1,
                CellKind::Jtl => c.jtl += 1,
                CellKind::ConstSource { .. } => c.const_source += 1,
            }
        }
        c
    }

    /// Input rails that drive at least one sink.
    pub fn provided_input_rails(&self) -> usize {
        self.nets
            .iter()
            .filter(|n| matches!(n.driver, Driver::Input { .. }) && !n.sinks.is_empty())
            .count()
    }

    /// Output rails retained at the interface.
    pub fn retained_output_rails(&self) -> usize {
        self.nets
            .iter()
            .flat_map(|n| &n.sinks)
            .filter(|s| matches!(s, Sink::Output { .. }))
            .count()
    }

    /// Checks drivers, arities and, when `legalized`, single sinks.
    pub fn check_structure(&self, legalized: bool) -> Result<()> {
        for (id, cell) in self.cells.iter().enumerate() {
            let (n_in, n_out) = cell.kind.arity();
            let n_in_ok = match cell.kind {
                // the clock port is attached when the trigger plan is built
                CellKind::Droc { .. } => cell.inputs.len() == 1 || cell.inputs.len() == 2,
                _ => cell.inputs.len() == n_in,
            };
            if !n_in_ok || cell.outputs.len() != n_out {
                return Err(Error::Invalid(format!(
                    "cell {id} ({}) has wrong port counts",
                    cell.kind
                )));
            }
            for (port, out) in cell.outputs.iter().enumerate() {
                if let Some(net) = *out {
                    if self.nets[net].driver != (Driver::Cell { cell: id, port }) {
                        return Err(Error::Invalid(format!(
                            "net {} has an inconsistent driver",
                            self.nets[net].name
                        )));
                    }
                }
            }
            for (port, &net) in cell.inputs.iter().enumerate() {
                if !self.nets[net]
                    .sinks
                    .contains(&Sink::Cell { cell: id, port })
                {
                    return Err(Error::Invalid(format!(
                        "cell {id} port {port} is not a sink of its net"
                    )));
                }
            }
        }
        for net in &self.nets {
            if legalized && net.sinks.len() != 1 {
                return Err(Error::Invalid(format!(
                    "net {} has {} sinks",
                    net.name,
                    net.sinks.len()
                )));
            }
        }
        self.topological_order().map(|_| ())
    }

    /// Cells ordered so that every combinational cell follows the cells
    /// driving it. DROC outputs and the clock tree do not constrain order.
    pub fn topological_order(&self) -> Result<Vec<CellId>> {
        let n = self.cells.len();
        let mut indegree = vec![0usize; n];
        let breaks = |c: &Cell| matches!(c.kind, CellKind::Droc { .. });
        for (id, cell) in self.cells.iter().enumerate() {
            for &net in &cell.inputs {
                if let Driver::Cell { cell: d, .. } = self.nets[net].driver {
                    if !breaks(&self.cells[d]) {
                        indegree[id] += 1;
                    }
                }
            }
        }
        let mut order: Vec<CellId> = (0..n).filter(|&c| indegree[c] == 0).collect();
        let mut head = 0;
        while head < order.len() {
            let id = order[head];
            head += 1;
            if breaks(&self.cells[id]) {
                continue;
            }
            for net in self.cells[id].outputs.iter().flatten() {
                for sink in &self.nets[*net].sinks {
                    if let Sink::Cell { cell, .. } = *sink {
                        indegree[cell] -= 1;
                        if indegree[cell] == 0 {
                            order.push(cell);
                        }
                    }
                }
            }
        }
        if order.len() != n {
            let stuck = (0..n).find(|&c| indegree[c] > 0).unwrap_or(0);
            return Err(Error::Cycle(format!(
                "cell {stuck} ({})",
                self.cells[stuck].kind
            )));
        }
        Ok(order)
    }

    /// Human-readable listing, one cell per line.
    pub fn listing(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# {} ({})", self.name, self.schema);
        for (i, name) in self.inputs.iter().enumerate() {
            let _ = writeln!(out, "input {i} {name}");
        }
        for (i, port) in self.outputs.iter().enumerate() {
            let _ = writeln!(out, "output {i} {} {}", port.name, port.polarity);
        }
        if let Some(clock) = self.clock {
            let _ = writeln!(out, "clock {}", self.nets[clock].name);
        }
        if let Some(t) = &self.trigger {
            let _ = writeln!(
                out,
                "trigger {} drocs={} mergers={}",
                self.nets[t.net].name,
                t.drocs.len(),
                t.mergers.len()
            );
        }
        for (id, cell) in self.cells.iter().enumerate() {
            let ins: Vec<&str> = cell
                .inputs
                .iter()
                .map(|&n| self.nets[n].name.as_str())
                .collect();
            let outs: Vec<&str> = cell
                .outputs
                .iter()
                .map(|o| o.map_or("-", |n| self.nets[n].name.as_str()))
                .collect();
            let origin = match cell.origin {
                Origin::Node { var, rail } => format!("node {var} {}", rail.suffix()),
                Origin::Droc { index, twisted } => {
                    format!("droc {index}{}", if twisted { " twisted" } else { "" })
                }
                Origin::Fanout => "fanout".into(),
                Origin::ClockTree => "clock".into(),
                Origin::Constant { odd } => {
                    format!("constant {}", if odd { "odd" } else { "even" })
                }
            };
            let kind = match cell.kind {
                CellKind::ConstSource { value } => format!("CONST_SOURCE({})", value as u8),
                k => k.label().to_string(),
            };
            let _ = writeln!(
                out,
                "c{id} {kind} in={} out={} src={origin}",
                ins.join(","),
                outs.join(",")
            );
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Netlist> {
        let netlist: Netlist = serde_json::from_str(text)?;
        if netlist.schema != SCHEMA {
            return Err(Error::Unsupported(format!(
                "netlist schema `{}`",
                netlist.schema
            )));
        }
        netlist.check_structure(false)?;
        Ok(netlist)
    }

    /// Disconnects input `port` of `cell`, leaving it on a floating net.
    pub fn disconnect_input(&mut self, cell: CellId, port: usize) {
        let old = self.cells[cell].inputs[port];
        self.nets[old]
            .sinks
            .retain(|s| *s != Sink::Cell { cell, port });
        let name = format!("floating.c{cell}.{port}");
        let net = self.add_net(name, Driver::Floating);
        self.nets[net].sinks.push(Sink::Cell { cell, port });
        self.cells[cell].inputs[port] = net;
    }

    /// Multiset of cell kinds with their origin class, for order-independent
    /// comparisons.
    pub fn kind_histogram(&self) -> BTreeMap<String, usize> {
        let mut h = BTreeMap::new();
        for cell in &self.cells {
            let clock = if cell.origin == Origin::ClockTree {
                "/clock"
            } else {
                ""
            };
            *h.entry(format!("{}{clock}", cell.kind)).or_insert(0) += 1;
        }
        h
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn la_pair() -> Netlist {
        let mut n = Netlist::new("t");
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
        let c = n.add_cell(
            CellKind::La,
            vec![a, b],
            Origin::Node {
                var: 3,
                rail: Rail::Pos,
            },
            "n3.p",
        );
        let out = n.cells[c].outputs[0].unwrap();
        n.connect(
            out,
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
    fn structure_and_json_roundtrip() {
        let n = la_pair();
        n.check_structure(true).unwrap();
        let back = Netlist::from_json(&n.to_json().unwrap()).unwrap();
        assert_eq!(back, n);
        assert_eq!(n.counts().lafa(), 1);
        assert_eq!(n.provided_input_rails(), 2);
        assert_eq!(n.retained_output_rails(), 1);
    }

    #[test]
    fn listing_has_one_line_per_cell() {
        let text = la_pair().listing();
        assert!(text.contains("c0 LA in=a.p,b.p out=n3.p.o src=node 3 p"));
    }

    #[test]
    fn disconnect_leaves_floating_net() {
        let mut n = la_pair();
        n.disconnect_input(0, 1);
        let net = n.cells[0].inputs[1];
        assert_eq!(n.nets[net].driver, Driver::Floating);
        assert!(n.nets[1].sinks.is_empty());
        n.check_structure(false).unwrap();
    }

    #[test]
    fn cycles_are_reported() {
        let mut n = Netlist::new("loop");
        let x = n.add_net("x", Driver::Floating);
        let j = n.add_cell(CellKind::Jtl, vec![x], Origin::Fanout, "j");
        let out = n.cells[j].outputs[0].unwrap();
        // feed the JTL from its own output
        n.nets[x].sinks.clear();
        n.cells[j].inputs[0] = out;
        n.connect(out, Sink::Cell { cell: j, port: 0 });
        assert!(matches!(n.topological_order(), Err(Error::Cycle(_))));
    }
}
