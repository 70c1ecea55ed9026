// SPDX-License-Identifier: Apache-2.0
//! Waveform export of recorded pulses.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use super::SimResult;
use crate::error::Result;
use crate::netlist::Netlist;

/// Pulses are drawn as 1 ps high levels.
const PULSE_WIDTH_FS: u64 = 1000;

fn identifier(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Writes every net that pulsed as a one-bit wire, timescale 1 fs.
pub fn write_vcd<W: Write>(netlist: &Netlist, result: &SimResult, out: W) -> Result<()> {
    let mut w = vcd::Writer::new(out);
    w.timescale(1, vcd::TimescaleUnit::FS)?;
    w.add_module(&identifier(&netlist.name))?;
    let mut ids = BTreeMap::new();
    for p in &result.pulses {
        if let std::collections::btree_map::Entry::Vacant(e) = ids.entry(p.net) {
            let id = w.add_wire(1, &identifier(&netlist.nets[p.net].name))?;
            e.insert(id);
        }
    }
    w.upscope()?;
    w.enddefinitions()?;
    w.begin(vcd::SimulationCommand::Dumpvars)?;
    for id in ids.values() {
        w.change_scalar(*id, vcd::Value::V0)?;
    }
    w.end()?;
    let mut changes: BTreeMap<u64, Vec<(vcd::IdCode, vcd::Value)>> = BTreeMap::new();
    for p in &result.pulses {
        let id = ids[&p.net];
        changes
            .entry(p.time_fs)
            .or_default()
            .push((id, vcd::Value::V1));
        changes
            .entry(p.time_fs + PULSE_WIDTH_FS)
            .or_default()
            .push((id, vcd::Value::V0));
    }
    for (time, list) in changes {
        w.timestamp(time)?;
        for (id, v) in list {
            w.change_scalar(id, v)?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct JsonPulse<'a> {
    net: &'a str,
    time_fs: u64,
}

#[derive(Serialize)]
struct JsonTrace<'a> {
    period_fs: u64,
    cycles: usize,
    pulses: Vec<JsonPulse<'a>>,
}

pub fn pulses_to_json(netlist: &Netlist, result: &SimResult) -> Result<String> {
    let trace = JsonTrace {
        period_fs: result.period_fs,
        cycles: result.cycles,
        pulses: result
            .pulses
            .iter()
            .map(|p| JsonPulse {
                net: &netlist.nets[p.net].name,
                time_fs: p.time_fs,
            })
            .collect(),
    };
    Ok(serde_json::to_string_pretty(&trace)?)
}
