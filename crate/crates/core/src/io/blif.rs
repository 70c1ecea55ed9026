// SPDX-License-Identifier: Apache-2.0
//! Reader for a BLIF subset: `.model`, `.inputs`, `.outputs`, `.names`,
//! `.latch` and `.end`.
//!
//! Each cover becomes a balanced tree of AND nodes per cube and a balanced OR
//! tree over the cubes. Definitions may appear in any order.

use std::collections::HashMap;

use log::warn;

use crate::aig::{Aig, Latch, LatchInit, Lit, Strash, Symbols};
use crate::error::{Error, Result};

#[derive(Debug)]
struct Cover {
    inputs: Vec<String>,
    rows: Vec<(Vec<u8>, bool)>,
    line: usize,
}

#[derive(Debug)]
struct LatchDecl {
    input: String,
    output: String,
    init: LatchInit,
    line: usize,
}

pub fn parse_blif(text: &str) -> Result<Aig> {
    let mut inputs: Vec<String> = Vec::new();
    let mut outputs: Vec<(String, usize)> = Vec::new();
    let mut latches: Vec<LatchDecl> = Vec::new();
    let mut covers: HashMap<String, Cover> = HashMap::new();
    let mut current: Option<String> = None;
    let mut clock: Option<String> = None;
    let mut models = 0;

    for (line_no, line) in logical_lines(text) {
        let fields: Vec<&str> = line.split_ascii_whitespace().collect();
        let Some(&first) = fields.first() else {
            continue;
        };
        if !first.starts_with('.') {
            let name = current
                .as_ref()
                .ok_or_else(|| Error::at_line(line_no, "cover row outside a .names table"))?;
            let cover = covers.get_mut(name).expect("current cover exists");
            cover
                .rows
                .push(parse_row(&fields, cover.inputs.len(), line_no)?);
            continue;
        }
        current = None;
        match first {
            ".model" => {
                models += 1;
                if models > 1 {
                    return Err(Error::Unsupported(format!(
                        "line {line_no}: multiple models"
                    )));
                }
            }
            ".inputs" => inputs.extend(fields[1..].iter().map(|s| s.to_string())),
            ".outputs" => outputs.extend(fields[1..].iter().map(|s| (s.to_string(), line_no))),
            ".names" => {
                let Some((out, ins)) = fields[1..].split_last() else {
                    return Err(Error::at_line(line_no, ".names needs an output"));
                };
                let cover = Cover {
                    inputs: ins.iter().map(|s| s.to_string()).collect(),
                    rows: vec![],
                    line: line_no,
                };
                if covers.insert(out.to_string(), cover).is_some() {
                    return Err(Error::at_line(
                        line_no,
                        format!("signal `{out}` defined twice"),
                    ));
                }
                current = Some(out.to_string());
            }
            ".latch" => {
                let decl = parse_latch(&fields, line_no, &mut clock)?;
                latches.push(decl);
            }
            ".end" => break,
            other => {
                return Err(Error::Unsupported(format!(
                    "line {line_no}: directive `{other}`"
                )));
            }
        }
    }

    let num_inputs = inputs.len();
    let mut signals: HashMap<String, Lit> = HashMap::new();
    for (i, name) in inputs.iter().enumerate() {
        if signals
            .insert(name.clone(), Lit::new(1 + i as u32, false))
            .is_some()
        {
            return Err(Error::Invalid(format!("input `{name}` declared twice")));
        }
    }
    for (i, latch) in latches.iter().enumerate() {
        let lit = Lit::new((1 + num_inputs + i) as u32, false);
        if signals.insert(latch.output.clone(), lit).is_some() || covers.contains_key(&latch.output)
        {
            return Err(Error::at_line(
                latch.line,
                format!("signal `{}` defined twice", latch.output),
            ));
        }
        if latch.init == LatchInit::Unknown {
            warn!(
                "latch `{}` has an unknown initial value; using 0",
                latch.output
            );
        }
    }
    for name in &inputs {
        if covers.contains_key(name) {
            return Err(Error::Invalid(format!(
                "input `{name}` is also driven by a cover"
            )));
        }
    }

    let base = (1 + num_inputs + latches.len()) as u32;
    let mut builder = Builder {
        strash: Strash::default(),
        base,
        covers: &covers,
        signals,
    };
    let out_lits = outputs
        .iter()
        .map(|(name, line)| builder.resolve(name, *line))
        .collect::<Result<Vec<_>>>()?;
    let latch_lits = latches
        .iter()
        .map(|l| builder.resolve(&l.input, l.line))
        .collect::<Result<Vec<_>>>()?;

    let symbols = Symbols {
        inputs: inputs.iter().cloned().map(Some).collect(),
        latches: latches.iter().map(|l| Some(l.output.clone())).collect(),
        outputs: outputs.iter().map(|(n, _)| Some(n.clone())).collect(),
    };
    Ok(Aig {
        num_inputs,
        latches: latches
            .iter()
            .zip(latch_lits)
            .map(|(l, next)| Latch { next, init: l.init })
            .collect(),
        ands: builder.strash.nodes,
        outputs: out_lits,
        symbols,
        comments: Vec::new(),
    })
}

/// Joins `\` continuations and strips `#` comments.
fn logical_lines(text: &str) -> Vec<(usize, String)> {
    let mut lines = Vec::new();
    let mut pending: Option<(usize, String)> = None;
    for (i, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        let (body, continued) = match content.trim_end().strip_suffix('\\') {
            Some(body) => (body, true),
            None => (content, false),
        };
        let entry = pending.get_or_insert_with(|| (i + 1, String::new()));
        entry.1.push(' ');
        entry.1.push_str(body);
        if !continued {
            lines.extend(pending.take());
        }
    }
    lines.extend(pending);
    lines
}

fn parse_row(fields: &[&str], width: usize, line_no: usize) -> Result<(Vec<u8>, bool)> {
    let (cube, value) = match (width, fields) {
        (0, [v]) => ("", *v),
        (_, [c, v]) => (*c, *v),
        _ => return Err(Error::at_line(line_no, "malformed cover row")),
    };
    if cube.len() != width || !cube.bytes().all(|b| matches!(b, b'0' | b'1' | b'-')) {
        return Err(Error::at_line(
            line_no,
            format!("cube `{cube}` does not match {width} inputs"),
        ));
    }
    let value = match value {
        "1" => true,
        "0" => false,
        _ => {
            return Err(Error::at_line(
                line_no,
                format!("invalid output value `{value}`"),
            ))
        }
    };
    Ok((cube.as_bytes().to_vec(), value))
}

fn parse_latch(fields: &[&str], line_no: usize, clock: &mut Option<String>) -> Result<LatchDecl> {
    let args = &fields[1..];
    let (input, output, control, init) = match args {
        [i, o] => (i, o, None, None),
        [i, o, init] => (i, o, None, Some(*init)),
        [i, o, _ty, ctrl] => (i, o, Some(*ctrl), None),
        [i, o, _ty, ctrl, init] => (i, o, Some(*ctrl), Some(*init)),
        _ => return Err(Error::at_line(line_no, "malformed .latch")),
    };
    if let Some(ctrl) = control.filter(|c| *c != "NIL") {
        match clock {
            Some(existing) if existing != ctrl => {
                return Err(Error::Unsupported(format!(
                    "line {line_no}: latches on multiple clocks (`{existing}` and `{ctrl}`)"
                )))
            }
            _ => *clock = Some(ctrl.to_string()),
        }
    }
    let init = match init {
        None | Some("0") => LatchInit::Zero,
        Some("1") => LatchInit::One,
        Some("2") | Some("3") => LatchInit::Unknown,
        Some(other) => {
            return Err(Error::at_line(
                line_no,
                format!("invalid latch init `{other}`"),
            ))
        }
    };
    Ok(LatchDecl {
        input: input.to_string(),
        output: output.to_string(),
        init,
        line: line_no,
    })
}

struct Builder<'a> {
    strash: Strash,
    base: u32,
    covers: &'a HashMap<String, Cover>,
    signals: HashMap<String, Lit>,
}

impl Builder<'_> {
    fn resolve(&mut self, name: &str, line: usize) -> Result<Lit> {
        if let Some(&lit) = self.signals.get(name) {
            return Ok(lit);
        }
        // iterative post-order so deep netlists do not overflow the stack
        let mut open: HashMap<String, ()> = HashMap::new();
        let mut stack: Vec<(String, bool)> = vec![(name.to_string(), false)];
        while let Some((sig, expanded)) = stack.pop() {
            if self.signals.contains_key(&sig) {
                continue;
            }
            let cover = self.covers.get(&sig).ok_or_else(|| {
                Error::at_line(line, format!("signal `{sig}` is used but never defined"))
            })?;
            if expanded {
                let fanins: Vec<Lit> = cover.inputs.iter().map(|i| self.signals[i]).collect();
                let lit = self.build_cover(cover, &fanins);
                open.remove(&sig);
                self.signals.insert(sig, lit);
                continue;
            }
            if open.insert(sig.clone(), ()).is_some() {
                return Err(Error::Cycle(format!(
                    "signal `{sig}` (line {})",
                    cover.line
                )));
            }
            stack.push((sig.clone(), true));
            for input in cover.inputs.iter().rev() {
                if self.signals.contains_key(input) {
                    continue;
                }
                if open.contains_key(input) {
                    return Err(Error::Cycle(format!(
                        "signal `{input}` (line {})",
                        cover.line
                    )));
                }
                stack.push((input.clone(), false));
            }
        }
        Ok(self.signals[name])
    }

    fn build_cover(&mut self, cover: &Cover, fanins: &[Lit]) -> Lit {
        let on_set = cover.rows.first().is_none_or(|r| r.1);
        let mut cubes = Vec::with_capacity(cover.rows.len());
        for (cube, _) in &cover.rows {
            let lits: Vec<Lit> = cube
                .iter()
                .zip(fanins)
                .filter_map(|(&c, &lit)| match c {
                    b'1' => Some(lit),
                    b'0' => Some(!lit),
                    _ => None,
                })
                .collect();
            cubes.push(self.balanced_and(&lits));
        }
        // OR as the complement of an AND over complemented cubes
        let negated: Vec<Lit> = cubes.iter().map(|&c| !c).collect();
        let or = !self.balanced_and(&negated);
        // an empty cover is constant 0; an off-set cover is complemented
        if cover.rows.is_empty() {
            Lit::FALSE
        } else if on_set {
            or
        } else {
            !or
        }
    }

    fn balanced_and(&mut self, lits: &[Lit]) -> Lit {
        match lits {
            [] => Lit::TRUE,
            [x] => *x,
            _ => {
                let (lo, hi) = lits.split_at(lits.len() / 2);
                let a = self.balanced_and(lo);
                let b = self.balanced_and(hi);
                self.strash.and(self.base, a, b)
            }
        }
    }
}
