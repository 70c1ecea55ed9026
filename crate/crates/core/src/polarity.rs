// SPDX-License-Identifier: Apache-2.0
//! Rail requirements and output polarity assignment.
//!
//! Every AND node can produce a positive rail (an LA cell on the positive
//! rails of its fanins) and a negative rail (an FA cell on their negative
//! rails). Requirements flow backward from the retained output rails; a node
//! that ends up needing both rails costs an LA-FA pair.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::aig::Lit;
use crate::error::{Error, Result};
use crate::graph::{DrocAig, DrocKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rail {
    Pos,
    Neg,
}

impl Rail {
    pub fn flip(self) -> Rail {
        match self {
            Rail::Pos => Rail::Neg,
            Rail::Neg => Rail::Pos,
        }
    }

    /// Physical rail of the variable behind `lit` that carries `self` of the
    /// literal's value.
    pub fn of_lit(self, lit: Lit) -> Rail {
        if lit.is_complemented() {
            self.flip()
        } else {
            self
        }
    }

    pub fn suffix(self) -> &'static str {
        match self {
            Rail::Pos => "p",
            Rail::Neg => "n",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputPolarity {
    Positive,
    Negative,
    /// Both rails retained, as in a plain dual-rail mapping.
    Both,
}

impl OutputPolarity {
    pub fn rails(self) -> &'static [Rail] {
        match self {
            OutputPolarity::Positive => &[Rail::Pos],
            OutputPolarity::Negative => &[Rail::Neg],
            OutputPolarity::Both => &[Rail::Pos, Rail::Neg],
        }
    }
}

impl fmt::Display for OutputPolarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputPolarity::Positive => "positive",
            OutputPolarity::Negative => "negative",
            OutputPolarity::Both => "both",
        })
    }
}

impl FromStr for OutputPolarity {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "positive" | "pos" | "p" | "+" | "1" => Ok(OutputPolarity::Positive),
            "negative" | "neg" | "n" | "-" | "0" => Ok(OutputPolarity::Negative),
            "both" => Ok(OutputPolarity::Both),
            other => Err(format!("unknown polarity `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputPolarityAssignment {
    pub outputs: Vec<OutputPolarity>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Strategy {
    AllPositive,
    /// Both rails of every output, which gives the direct dual-rail mapping.
    DualRail,
    Fixed(Vec<OutputPolarity>),
    Heuristic,
}

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::AllPositive => "all_positive",
            Strategy::DualRail => "dual_rail",
            Strategy::Fixed(_) => "fixed",
            Strategy::Heuristic => "heuristic",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RailRequirement {
    pub pos: bool,
    pub neg: bool,
}

impl RailRequirement {
    pub fn has(self, rail: Rail) -> bool {
        match rail {
            Rail::Pos => self.pos,
            Rail::Neg => self.neg,
        }
    }

    fn set(&mut self, rail: Rail) -> bool {
        let flag = match rail {
            Rail::Pos => &mut self.pos,
            Rail::Neg => &mut self.neg,
        };
        !std::mem::replace(flag, true)
    }

    pub fn count(self) -> usize {
        self.pos as usize + self.neg as usize
    }
}

/// Requirements of every variable. Only AND nodes carry flags; inputs and
/// DROC outputs provide both rails for free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RailRequirementMap {
    pub reqs: Vec<RailRequirement>,
    pub duplicated: usize,
    pub total_gates: usize,
    pub reachable: usize,
}

impl RailRequirementMap {
    pub fn get(&self, var: u32) -> RailRequirement {
        self.reqs[var as usize]
    }

    fn from_reqs(reqs: Vec<RailRequirement>) -> RailRequirementMap {
        let mut duplicated = 0;
        let mut total_gates = 0;
        let mut reachable = 0;
        for r in &reqs {
            total_gates += r.count();
            duplicated += (r.count() == 2) as usize;
            reachable += (r.count() > 0) as usize;
        }
        RailRequirementMap {
            reqs,
            duplicated,
            total_gates,
            reachable,
        }
    }

    /// Percentage of reachable AND nodes that need both rails.
    pub fn duplication_penalty(&self) -> u32 {
        if self.reachable == 0 {
            0
        } else {
            (100.0 * self.duplicated as f64 / self.reachable as f64).round() as u32
        }
    }
}

/// Logical rail of its data literal that a DROC consumes. A trigger DROC
/// always emits a pulse on Qp in its first cycle, so an initial value of 0
/// is realized by storing the complement and swapping the output rails.
pub fn droc_input_rail(kind: DrocKind, init: bool) -> Rail {
    match (kind, init) {
        (DrocKind::Trigger, false) => Rail::Neg,
        _ => Rail::Pos,
    }
}

/// Physical rail demands fixed by DROC data inputs.
fn droc_demands(design: &DrocAig) -> impl Iterator<Item = (u32, Rail)> + '_ {
    design.aig.latches.iter().enumerate().map(|(i, latch)| {
        let rail = droc_input_rail(design.kinds[i], design.droc_init(i));
        (latch.next.var(), rail.of_lit(latch.next))
    })
}

fn output_demands<'a>(
    design: &'a DrocAig,
    assignment: &'a OutputPolarityAssignment,
) -> impl Iterator<Item = (u32, Rail)> + 'a {
    design
        .aig
        .outputs
        .iter()
        .zip(&assignment.outputs)
        .flat_map(|(&lit, pol)| pol.rails().iter().map(move |r| (lit.var(), r.of_lit(lit))))
}

/// Backward propagation of rail demands in one reverse-topological pass.
pub fn propagate_requirements(
    design: &DrocAig,
    assignment: &OutputPolarityAssignment,
) -> RailRequirementMap {
    assert_eq!(
        assignment.outputs.len(),
        design.aig.outputs.len(),
        "assignment width mismatch"
    );
    let reqs = propagate(
        design,
        droc_demands(design).chain(output_demands(design, assignment)),
    );
    RailRequirementMap::from_reqs(reqs)
}

fn propagate(design: &DrocAig, demands: impl Iterator<Item = (u32, Rail)>) -> Vec<RailRequirement> {
    let aig = &design.aig;
    let mut reqs = vec![RailRequirement::default(); aig.num_vars()];
    let base = aig.first_and_var();
    for (var, rail) in demands {
        if var >= base {
            reqs[var as usize].set(rail);
        }
    }
    for (i, and) in aig.ands.iter().enumerate().rev() {
        let r = reqs[base as usize + i];
        for rail in [Rail::Pos, Rail::Neg] {
            if r.has(rail) {
                for f in and.fanins() {
                    if f.var() >= base {
                        reqs[f.var() as usize].set(rail.of_lit(f));
                    }
                }
            }
        }
    }
    reqs
}

pub fn assign_output_polarities(
    design: &DrocAig,
    strategy: &Strategy,
) -> Result<OutputPolarityAssignment> {
    let n = design.aig.outputs.len();
    let outputs = match strategy {
        Strategy::AllPositive => vec![OutputPolarity::Positive; n],
        Strategy::DualRail => vec![OutputPolarity::Both; n],
        Strategy::Fixed(list) => {
            if list.len() != n {
                return Err(Error::Polarity(format!(
                    "{} polarities given for {n} outputs",
                    list.len()
                )));
            }
            list.clone()
        }
        Strategy::Heuristic => return Ok(heuristic(design)),
    };
    Ok(OutputPolarityAssignment { outputs })
}

/// Incremental requirement set used by the greedy pass.
struct Incremental<'a> {
    design: &'a DrocAig,
    reqs: Vec<RailRequirement>,
    stamp: Vec<u32>,
    generation: u32,
}

impl<'a> Incremental<'a> {
    fn new(design: &'a DrocAig) -> Self {
        let n = design.aig.num_vars();
        let mut inc = Incremental {
            design,
            reqs: vec![RailRequirement::default(); n],
            stamp: vec![0; 2 * n],
            generation: 0,
        };
        for (var, rail) in droc_demands(design) {
            inc.commit(var, rail);
        }
        inc
    }

    fn slot(var: u32, rail: Rail) -> usize {
        2 * var as usize + (rail == Rail::Neg) as usize
    }

    /// Number of new flags that demanding `rail` of `var` would add.
    fn cost(&mut self, var: u32, rail: Rail) -> usize {
        self.generation += 1;
        let base = self.design.aig.first_and_var();
        let mut count = 0;
        let mut stack = vec![(var, rail)];
        while let Some((v, r)) = stack.pop() {
            if v < base || self.reqs[v as usize].has(r) {
                continue;
            }
            let slot = Self::slot(v, r);
            if self.stamp[slot] == self.generation {
                continue;
            }
            self.stamp[slot] = self.generation;
            count += 1;
            let and = self.design.aig.ands[(v - base) as usize];
            stack.extend(and.fanins().map(|f| (f.var(), r.of_lit(f))));
        }
        count
    }

    fn commit(&mut self, var: u32, rail: Rail) {
        let base = self.design.aig.first_and_var();
        let mut stack = vec![(var, rail)];
        while let Some((v, r)) = stack.pop() {
            if v < base || !self.reqs[v as usize].set(r) {
                continue;
            }
            let and = self.design.aig.ands[(v - base) as usize];
            stack.extend(and.fanins().map(|f| (f.var(), r.of_lit(f))));
        }
    }
}

/// Greedy choice per output in descending cone size, then single flips
/// until no flip lowers the gate count. Ties prefer the positive rail.
fn heuristic(design: &DrocAig) -> OutputPolarityAssignment {
    let aig = &design.aig;
    let n = aig.outputs.len();
    let mut order: Vec<usize> = (0..n).collect();
    let cones: Vec<usize> = aig.outputs.iter().map(|&o| aig.cone_size(o)).collect();
    order.sort_by(|&a, &b| cones[b].cmp(&cones[a]).then(a.cmp(&b)));

    let mut inc = Incremental::new(design);
    let mut outputs = vec![OutputPolarity::Positive; n];
    for &i in &order {
        let lit = aig.outputs[i];
        let pos = inc.cost(lit.var(), Rail::Pos.of_lit(lit));
        let neg = inc.cost(lit.var(), Rail::Neg.of_lit(lit));
        let chosen = if neg < pos {
            OutputPolarity::Negative
        } else {
            OutputPolarity::Positive
        };
        outputs[i] = chosen;
        inc.commit(lit.var(), chosen.rails()[0].of_lit(lit));
    }

    let flippable: Vec<usize> = order.into_iter().filter(|&i| cones[i] > 0).collect();
    let mut assignment = OutputPolarityAssignment { outputs };
    let mut best = total_gates(design, &assignment);
    loop {
        let mut improved = false;
        for &i in &flippable {
            let old = assignment.outputs[i];
            assignment.outputs[i] = match old {
                OutputPolarity::Positive => OutputPolarity::Negative,
                _ => OutputPolarity::Positive,
            };
            let total = total_gates(design, &assignment);
            if total < best {
                best = total;
                improved = true;
            } else {
                assignment.outputs[i] = old;
            }
        }
        if !improved {
            break;
        }
    }
    assignment
}

fn total_gates(design: &DrocAig, assignment: &OutputPolarityAssignment) -> usize {
    propagate(
        design,
        droc_demands(design).chain(output_demands(design, assignment)),
    )
    .iter()
    .map(|r| r.count())
    .sum()
}

/// Result of exhaustively enumerating single-rail output assignments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruteForce {
    pub best_total: usize,
    pub best: OutputPolarityAssignment,
}

/// Exhaustive minimum over all single-rail assignments; `None` when there
/// are more than `max_outputs` outputs.
pub fn brute_force_minimum(design: &DrocAig, max_outputs: usize) -> Option<BruteForce> {
    let n = design.aig.outputs.len();
    if n > max_outputs || n >= 32 {
        return None;
    }
    let mut best: Option<BruteForce> = None;
    for mask in 0u32..(1 << n) {
        let outputs = (0..n)
            .map(|i| {
                if mask >> i & 1 == 1 {
                    OutputPolarity::Negative
                } else {
                    OutputPolarity::Positive
                }
            })
            .collect();
        let assignment = OutputPolarityAssignment { outputs };
        let total = total_gates(design, &assignment);
        if best.as_ref().is_none_or(|b| total < b.best_total) {
            best = Some(BruteForce {
                best_total: total,
                best: assignment,
            });
        }
    }
    best
}

/// Parses `output_name polarity` lines against the design's output names.
pub fn parse_polarity_file(text: &str, design: &DrocAig) -> Result<Vec<OutputPolarity>> {
    let aig = &design.aig;
    let names: Vec<String> = (0..aig.outputs.len()).map(|i| aig.output_name(i)).collect();
    let mut result: Vec<Option<OutputPolarity>> = vec![None; names.len()];
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let (Some(name), Some(pol), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(Error::at_line(n + 1, "expected `output_name polarity`"));
        };
        let pol: OutputPolarity = pol.parse().map_err(|e: String| Error::at_line(n + 1, e))?;
        let idx = names
            .iter()
            .position(|x| x == name)
            .ok_or_else(|| Error::at_line(n + 1, format!("unknown output `{name}`")))?;
        result[idx] = Some(pol);
    }
    let given = result.iter().filter(|p| p.is_some()).count();
    if given != names.len() {
        return Err(Error::Polarity(format!(
            "{given} polarities given for {} outputs",
            names.len()
        )));
    }
    Ok(result.into_iter().map(Option::unwrap).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aig::{Aig, AndNode};

    fn single(out: Lit) -> DrocAig {
        DrocAig::combinational(Aig {
            num_inputs: 2,
            ands: vec![AndNode {
                fanin0: Lit::new(2, false),
                fanin1: Lit::new(1, false),
            }],
            outputs: vec![out],
            ..Default::default()
        })
    }

    fn all_pos(d: &DrocAig) -> OutputPolarityAssignment {
        assign_output_polarities(d, &Strategy::AllPositive).unwrap()
    }

    #[test]
    fn and_needs_positive_rail() {
        let d = single(Lit::new(3, false));
        let m = propagate_requirements(&d, &all_pos(&d));
        assert_eq!(
            m.get(3),
            RailRequirement {
                pos: true,
                neg: false
            }
        );
        assert_eq!(m.total_gates, 1);
    }

    #[test]
    fn nand_needs_negative_rail() {
        let d = single(Lit::new(3, true));
        let m = propagate_requirements(&d, &all_pos(&d));
        assert_eq!(
            m.get(3),
            RailRequirement {
                pos: false,
                neg: true
            }
        );
    }

    #[test]
    fn complementary_outputs_share_one_rail() {
        let mut d = single(Lit::new(3, false));
        d.aig.outputs.push(Lit::new(3, true));
        let p = propagate_requirements(&d, &all_pos(&d));
        assert_eq!((p.total_gates, p.duplication_penalty()), (2, 100));
        let h = assign_output_polarities(&d, &Strategy::Heuristic).unwrap();
        let m = propagate_requirements(&d, &h);
        assert_eq!((m.total_gates, m.duplication_penalty()), (1, 0));
        assert_eq!(brute_force_minimum(&d, 8).unwrap().best_total, 1);
    }

    #[test]
    fn empty_design_has_no_penalty() {
        let d = DrocAig::combinational(Aig::default());
        let m = propagate_requirements(&d, &all_pos(&d));
        assert_eq!(m.duplication_penalty(), 0);
    }

    #[test]
    fn fixed_length_is_checked() {
        let d = single(Lit::new(3, false));
        assert!(assign_output_polarities(&d, &Strategy::Fixed(vec![])).is_err());
    }

    #[test]
    fn init_zero_trigger_droc_reads_negative_rail() {
        assert_eq!(droc_input_rail(DrocKind::Trigger, false), Rail::Neg);
        assert_eq!(droc_input_rail(DrocKind::Trigger, true), Rail::Pos);
        assert_eq!(droc_input_rail(DrocKind::Plain, false), Rail::Pos);
    }
}
