// SPDX-License-Identifier: Apache-2.0
//! And-inverter graphs.
//!
//! Variables follow the AIGER layout: variable 0 is constant false, then the
//! primary inputs, then the latch outputs, then the AND nodes in topological
//! order. A [`Lit`] is `2 * var + complemented`.

use std::collections::HashMap;
use std::fmt;
use std::ops::Not;

use serde::{Deserialize, Serialize};

/// A possibly complemented reference to an AIG variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Lit(u32);

impl Lit {
    pub const FALSE: Lit = Lit(0);
    pub const TRUE: Lit = Lit(1);

    pub fn new(var: u32, complemented: bool) -> Lit {
        Lit(var << 1 | complemented as u32)
    }

    pub fn from_raw(raw: u32) -> Lit {
        Lit(raw)
    }

    pub fn raw(self) -> u32 {
        self.0
    }

    pub fn var(self) -> u32 {
        self.0 >> 1
    }

    pub fn is_complemented(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn is_const(self) -> bool {
        self.var() == 0
    }

    /// Complements the literal when `flip` is set.
    pub fn xor(self, flip: bool) -> Lit {
        Lit(self.0 ^ flip as u32)
    }

    pub fn regular(self) -> Lit {
        Lit(self.0 & !1)
    }
}

impl Not for Lit {
    type Output = Lit;

    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_complemented() {
            write!(f, "!{}", self.var())
        } else {
            write!(f, "{}", self.var())
        }
    }
}

/// A two-input AND node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AndNode {
    pub fanin0: Lit,
    pub fanin1: Lit,
}

impl AndNode {
    pub fn fanins(&self) -> [Lit; 2] {
        [self.fanin0, self.fanin1]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LatchInit {
    Zero,
    One,
    Unknown,
}

impl LatchInit {
    /// Concrete reset value; unknown resets to zero.
    pub fn value(self) -> bool {
        matches!(self, LatchInit::One)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Latch {
    pub next: Lit,
    pub init: LatchInit,
}

/// Optional names for the interface of an [`Aig`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Symbols {
    pub inputs: Vec<Option<String>>,
    pub latches: Vec<Option<String>>,
    pub outputs: Vec<Option<String>>,
}

impl Symbols {
    fn get(names: &[Option<String>], idx: usize) -> Option<&str> {
        names.get(idx).and_then(|n| n.as_deref())
    }

    fn is_empty(&self) -> bool {
        self.inputs
            .iter()
            .chain(&self.latches)
            .chain(&self.outputs)
            .all(Option::is_none)
    }
}

/// What a variable of an [`Aig`] stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Const,
    Input(usize),
    Latch(usize),
    And(usize),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Aig {
    pub num_inputs: usize,
    pub latches: Vec<Latch>,
    pub ands: Vec<AndNode>,
    pub outputs: Vec<Lit>,
    pub symbols: Symbols,
    pub comments: Vec<String>,
}

impl Aig {
    /// Largest variable index (the AIGER `M`).
    pub fn max_var(&self) -> u32 {
        (self.num_inputs + self.latches.len() + self.ands.len()) as u32
    }

    pub fn num_vars(&self) -> usize {
        self.max_var() as usize + 1
    }

    pub fn input_lit(&self, idx: usize) -> Lit {
        Lit::new(1 + idx as u32, false)
    }

    pub fn latch_lit(&self, idx: usize) -> Lit {
        Lit::new((1 + self.num_inputs + idx) as u32, false)
    }

    pub fn and_lit(&self, idx: usize) -> Lit {
        Lit::new(self.first_and_var() + idx as u32, false)
    }

    pub fn first_and_var(&self) -> u32 {
        (1 + self.num_inputs + self.latches.len()) as u32
    }

    pub fn kind(&self, var: u32) -> VarKind {
        let v = var as usize;
        let latch_base = 1 + self.num_inputs;
        let and_base = latch_base + self.latches.len();
        if v == 0 {
            VarKind::Const
        } else if v < latch_base {
            VarKind::Input(v - 1)
        } else if v < and_base {
            VarKind::Latch(v - latch_base)
        } else {
            VarKind::And(v - and_base)
        }
    }

    pub fn and_node(&self, var: u32) -> Option<&AndNode> {
        match self.kind(var) {
            VarKind::And(i) => self.ands.get(i),
            _ => None,
        }
    }

    pub fn is_combinational(&self) -> bool {
        self.latches.is_empty()
    }

    pub fn input_name(&self, idx: usize) -> String {
        Symbols::get(&self.symbols.inputs, idx).map_or_else(|| format!("i{idx}"), str::to_owned)
    }

    pub fn latch_name(&self, idx: usize) -> String {
        Symbols::get(&self.symbols.latches, idx).map_or_else(|| format!("l{idx}"), str::to_owned)
    }

    pub fn output_name(&self, idx: usize) -> String {
        Symbols::get(&self.symbols.outputs, idx).map_or_else(|| format!("o{idx}"), str::to_owned)
    }

    pub fn has_symbols(&self) -> bool {
        !self.symbols.is_empty()
    }

    /// Checks the ordering and range invariants.
    pub fn validate(&self) -> Result<(), String> {
        let max = self.max_var();
        let check = |lit: Lit, what: &str| {
            if lit.var() > max {
                Err(format!(
                    "{what} references variable {} beyond {max}",
                    lit.var()
                ))
            } else {
                Ok(())
            }
        };
        for (i, and) in self.ands.iter().enumerate() {
            let var = self.first_and_var() + i as u32;
            for f in and.fanins() {
                if f.var() >= var {
                    return Err(format!(
                        "AND node {var} uses fanin {f} that does not precede it"
                    ));
                }
            }
        }
        for (i, latch) in self.latches.iter().enumerate() {
            check(latch.next, &format!("latch {i}"))?;
        }
        for (i, out) in self.outputs.iter().enumerate() {
            check(*out, &format!("output {i}"))?;
        }
        Ok(())
    }

    pub fn initial_state(&self) -> Vec<bool> {
        self.latches.iter().map(|l| l.init.value()).collect()
    }

    /// Values of every variable for one combinational evaluation.
    pub fn eval_vars(&self, inputs: &[bool], state: &[bool]) -> Vec<bool> {
        assert_eq!(inputs.len(), self.num_inputs, "input width mismatch");
        assert_eq!(state.len(), self.latches.len(), "state width mismatch");
        let mut values = Vec::with_capacity(self.num_vars());
        values.push(false);
        values.extend_from_slice(inputs);
        values.extend_from_slice(state);
        for and in &self.ands {
            let v = lit_value(&values, and.fanin0) && lit_value(&values, and.fanin1);
            values.push(v);
        }
        values
    }

    /// Evaluates outputs and next state for one clock cycle.
    pub fn step(&self, inputs: &[bool], state: &[bool]) -> (Vec<bool>, Vec<bool>) {
        let values = self.eval_vars(inputs, state);
        let outputs = self
            .outputs
            .iter()
            .map(|&o| lit_value(&values, o))
            .collect();
        let next = self
            .latches
            .iter()
            .map(|l| lit_value(&values, l.next))
            .collect();
        (outputs, next)
    }

    /// Number of AND nodes in the transitive fanin of `lit`, stopping at
    /// inputs and latches.
    pub fn cone_size(&self, lit: Lit) -> usize {
        let mut seen = vec![false; self.num_vars()];
        let mut stack = vec![lit.var()];
        let mut count = 0;
        while let Some(var) = stack.pop() {
            if std::mem::replace(&mut seen[var as usize], true) {
                continue;
            }
            if let Some(and) = self.and_node(var) {
                count += 1;
                stack.extend(and.fanins().map(Lit::var));
            }
        }
        count
    }

    /// Marks AND nodes reachable from outputs and latch next-state functions.
    pub fn reachable_ands(&self) -> Vec<bool> {
        let mut seen = vec![false; self.num_vars()];
        let mut stack: Vec<u32> = self
            .outputs
            .iter()
            .chain(self.latches.iter().map(|l| &l.next))
            .map(|l| l.var())
            .collect();
        while let Some(var) = stack.pop() {
            if std::mem::replace(&mut seen[var as usize], true) {
                continue;
            }
            if let Some(and) = self.and_node(var) {
                stack.extend(and.fanins().map(Lit::var));
            }
        }
        let base = self.first_and_var() as usize;
        seen[base..].to_vec()
    }

    /// Length of the longest input-to-output chain of AND nodes.
    pub fn depth(&self) -> usize {
        let mut level = vec![0usize; self.num_vars()];
        let base = self.first_and_var() as usize;
        for (i, and) in self.ands.iter().enumerate() {
            level[base + i] =
                1 + level[and.fanin0.var() as usize].max(level[and.fanin1.var() as usize]);
        }
        self.outputs
            .iter()
            .chain(self.latches.iter().map(|l| &l.next))
            .map(|l| level[l.var() as usize])
            .max()
            .unwrap_or(0)
    }
}

pub(crate) fn lit_value(values: &[bool], lit: Lit) -> bool {
    values[lit.var() as usize] ^ lit.is_complemented()
}

/// Structural hashing, constant propagation and removal of unreachable
/// nodes. Inputs, latches and outputs keep their positions.
pub fn normalize(aig: &Aig) -> Aig {
    let mut strash = Strash::default();
    let base = aig.first_and_var();
    let mut map: Vec<Lit> = (0..base).map(|v| Lit::new(v, false)).collect();
    for and in &aig.ands {
        let a = map[and.fanin0.var() as usize].xor(and.fanin0.is_complemented());
        let b = map[and.fanin1.var() as usize].xor(and.fanin1.is_complemented());
        map.push(strash.and(base, a, b));
    }
    let remap = |lit: Lit| map[lit.var() as usize].xor(lit.is_complemented());
    let outputs: Vec<Lit> = aig.outputs.iter().map(|&o| remap(o)).collect();
    let latches: Vec<Latch> = aig
        .latches
        .iter()
        .map(|l| Latch {
            next: remap(l.next),
            init: l.init,
        })
        .collect();

    // second pass: keep reachable nodes in creation order
    let temp = Aig {
        num_inputs: aig.num_inputs,
        latches,
        ands: strash.nodes,
        outputs,
        symbols: aig.symbols.clone(),
        comments: aig.comments.clone(),
    };
    compact(&temp)
}

/// Drops unreachable AND nodes and renumbers the rest.
pub fn compact(aig: &Aig) -> Aig {
    let reachable = aig.reachable_ands();
    let base = aig.first_and_var();
    let mut map: Vec<Lit> = (0..base).map(|v| Lit::new(v, false)).collect();
    let mut ands = Vec::new();
    for (i, and) in aig.ands.iter().enumerate() {
        if !reachable[i] {
            map.push(Lit::FALSE);
            continue;
        }
        let a = map[and.fanin0.var() as usize].xor(and.fanin0.is_complemented());
        let b = map[and.fanin1.var() as usize].xor(and.fanin1.is_complemented());
        map.push(Lit::new(base + ands.len() as u32, false));
        ands.push(AndNode {
            fanin0: a,
            fanin1: b,
        });
    }
    let remap = |lit: Lit| map[lit.var() as usize].xor(lit.is_complemented());
    Aig {
        num_inputs: aig.num_inputs,
        latches: aig
            .latches
            .iter()
            .map(|l| Latch {
                next: remap(l.next),
                init: l.init,
            })
            .collect(),
        ands,
        outputs: aig.outputs.iter().map(|&o| remap(o)).collect(),
        symbols: aig.symbols.clone(),
        comments: aig.comments.clone(),
    }
}

/// Hash-consing AND constructor used by normalization and the graph
/// rewrites in the sequential passes.
#[derive(Debug, Default)]
pub(crate) struct Strash {
    pub(crate) nodes: Vec<AndNode>,
    table: HashMap<(Lit, Lit), Lit>,
}

impl Strash {
    /// Returns a literal for `a & b`; new nodes are numbered from `base`.
    pub(crate) fn and(&mut self, base: u32, a: Lit, b: Lit) -> Lit {
        if let Some(lit) = simplify_and(a, b) {
            return lit;
        }
        let key = if a > b { (a, b) } else { (b, a) };
        if let Some(&lit) = self.table.get(&key) {
            return lit;
        }
        let lit = Lit::new(base + self.nodes.len() as u32, false);
        self.nodes.push(AndNode {
            fanin0: key.0,
            fanin1: key.1,
        });
        self.table.insert(key, lit);
        lit
    }
}

pub(crate) fn simplify_and(a: Lit, b: Lit) -> Option<Lit> {
    if a == Lit::FALSE || b == Lit::FALSE || a == !b {
        Some(Lit::FALSE)
    } else if a == Lit::TRUE || a == b {
        Some(b)
    } else if b == Lit::TRUE {
        Some(a)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_input(ands: Vec<AndNode>, outputs: Vec<Lit>) -> Aig {
        Aig {
            num_inputs: 2,
            ands,
            outputs,
            ..Default::default()
        }
    }

    #[test]
    fn and_with_true_is_identity() {
        let x = Lit::new(1, false);
        let aig = two_input(
            vec![AndNode {
                fanin0: x,
                fanin1: Lit::TRUE,
            }],
            vec![Lit::new(3, false)],
        );
        let n = normalize(&aig);
        assert!(n.ands.is_empty());
        assert_eq!(n.outputs, vec![x]);
    }

    #[test]
    fn contradiction_folds_to_false() {
        let x = Lit::new(1, false);
        let aig = two_input(
            vec![AndNode {
                fanin0: x,
                fanin1: !x,
            }],
            vec![Lit::new(3, true)],
        );
        let n = normalize(&aig);
        assert!(n.ands.is_empty());
        assert_eq!(n.outputs, vec![Lit::TRUE]);
    }

    #[test]
    fn duplicates_are_merged() {
        let a = Lit::new(1, false);
        let b = Lit::new(2, false);
        let aig = two_input(
            vec![
                AndNode {
                    fanin0: a,
                    fanin1: b,
                },
                AndNode {
                    fanin0: b,
                    fanin1: a,
                },
                AndNode {
                    fanin0: Lit::new(3, false),
                    fanin1: Lit::new(4, true),
                },
            ],
            vec![Lit::new(3, false), Lit::new(4, false), Lit::new(5, false)],
        );
        let n = normalize(&aig);
        // the third node became AND(x, !x) once both copies were merged
        assert_eq!(n.ands.len(), 1);
        assert_eq!(
            n.outputs,
            vec![Lit::new(3, false), Lit::new(3, false), Lit::FALSE]
        );
    }

    #[test]
    fn unreachable_nodes_are_dropped() {
        let a = Lit::new(1, false);
        let b = Lit::new(2, false);
        let aig = two_input(
            vec![
                AndNode {
                    fanin0: a,
                    fanin1: b,
                },
                AndNode {
                    fanin0: !a,
                    fanin1: b,
                },
            ],
            vec![Lit::new(4, false)],
        );
        let n = normalize(&aig);
        assert_eq!(n.ands.len(), 1);
        assert_eq!(
            n.ands[0],
            AndNode {
                fanin0: b,
                fanin1: !a
            }
        );
        assert_eq!(n.outputs, vec![Lit::new(3, false)]);
    }

    #[test]
    fn step_updates_latches() {
        // toggle flip-flop: next = !q, output = q
        let aig = Aig {
            num_inputs: 0,
            latches: vec![Latch {
                next: Lit::new(1, true),
                init: LatchInit::Zero,
            }],
            outputs: vec![Lit::new(1, false)],
            ..Default::default()
        };
        let mut state = aig.initial_state();
        let mut seen = Vec::new();
        for _ in 0..4 {
            let (out, next) = aig.step(&[], &state);
            seen.push(out[0]);
            state = next;
        }
        assert_eq!(seen, vec![false, true, false, true]);
    }
}
