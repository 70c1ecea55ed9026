// SPDX-License-Identifier: Apache-2.0
//! AND graphs whose state elements are individual DROC cells.
//!
//! A DROC delays its input by one clock tick, which is half a logical cycle.
//! Logic therefore lives in two interleaved regions. The even region holds
//! the primary inputs and outputs; its logical cycle `k` spans ticks `2k` and
//! `2k + 1`. The odd region runs half a cycle ahead: its cycle `k` spans ticks
//! `2k - 1` and `2k`. Trigger DROCs read the even region and are clocked once
//! more by the one-shot trigger at tick `-1`, so they emit their initial
//! value in the first odd cycle. Plain DROCs read the odd region.

use serde::{Deserialize, Serialize};

use crate::aig::{lit_value, Aig, LatchInit, Lit, VarKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DrocKind {
    /// Reads the even region; preloaded and clocked by the trigger.
    Trigger,
    /// Reads the odd region; clocked by the normal clock only.
    Plain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }
}

/// An [`Aig`] whose latches are single DROC cells.
///
/// `aig.latches[i]` is DROC `i`; its `init` is meaningful for trigger DROCs
/// only. `latency` is the number of logical cycles between an input vector
/// and the outputs it determines.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DrocAig {
    pub aig: Aig,
    pub kinds: Vec<DrocKind>,
    pub latency: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DelayModel {
    /// Every AND node costs one; fanout is free.
    Unit,
    /// Every AND node costs `gate_ps`, and every extra fanout of a signal
    /// costs one splitter.
    Library { gate_ps: f64, splitter_ps: f64 },
}

impl DrocAig {
    pub fn combinational(aig: Aig) -> DrocAig {
        assert!(aig.latches.is_empty(), "combinational graph expected");
        DrocAig {
            aig,
            kinds: Vec::new(),
            latency: 0,
        }
    }

    pub fn num_drocs(&self) -> usize {
        self.kinds.len()
    }

    pub fn count_kind(&self, kind: DrocKind) -> usize {
        self.kinds.iter().filter(|&&k| k == kind).count()
    }

    pub fn droc_init(&self, idx: usize) -> bool {
        self.aig.latches[idx].init == LatchInit::One
    }

    /// Region of every variable; constants are reported as even.
    pub fn parities(&self) -> Vec<Parity> {
        let aig = &self.aig;
        let mut parity = Vec::with_capacity(aig.num_vars());
        parity.push(Parity::Even);
        parity.extend(std::iter::repeat_n(Parity::Even, aig.num_inputs));
        parity.extend(self.kinds.iter().map(|k| match k {
            DrocKind::Trigger => Parity::Odd,
            DrocKind::Plain => Parity::Even,
        }));
        for and in &aig.ands {
            let p = if and.fanin0.is_const() {
                parity[and.fanin1.var() as usize]
            } else {
                parity[and.fanin0.var() as usize]
            };
            parity.push(p);
        }
        parity
    }

    /// Checks region consistency: AND fanins share a region, trigger DROCs
    /// read the even region, plain DROCs the odd one, outputs are even.
    pub fn validate(&self) -> Result<()> {
        self.aig.validate().map_err(Error::Invalid)?;
        if self.kinds.len() != self.aig.latches.len() {
            return Err(Error::Invalid(
                "DROC kind table does not match the DROC list".into(),
            ));
        }
        let parity = self.parities();
        let region = |lit: Lit| (!lit.is_const()).then(|| parity[lit.var() as usize]);
        for (i, and) in self.aig.ands.iter().enumerate() {
            if let (Some(a), Some(b)) = (region(and.fanin0), region(and.fanin1)) {
                if a != b {
                    let var = self.aig.first_and_var() as usize + i;
                    return Err(Error::Invalid(format!(
                        "AND node {var} mixes even and odd regions"
                    )));
                }
            }
        }
        for (i, (latch, kind)) in self.aig.latches.iter().zip(&self.kinds).enumerate() {
            let want = match kind {
                DrocKind::Trigger => Parity::Even,
                DrocKind::Plain => Parity::Odd,
            };
            if region(latch.next).is_some_and(|p| p != want) {
                return Err(Error::Invalid(format!(
                    "DROC {i} ({kind:?}) reads the wrong region"
                )));
            }
        }
        for (i, out) in self.aig.outputs.iter().enumerate() {
            if region(*out) == Some(Parity::Odd) {
                return Err(Error::Invalid(format!(
                    "output {i} is driven from the odd region"
                )));
            }
        }
        Ok(())
    }

    /// Logical reference simulation: outputs of every even-region cycle.
    pub fn simulate(&self, vectors: &[Vec<bool>]) -> Vec<Vec<bool>> {
        let aig = &self.aig;
        let parity = self.parities();
        let base = aig.first_and_var() as usize;
        let droc_base = 1 + aig.num_inputs;
        let mut values = vec![false; aig.num_vars()];
        let mut stored = vec![false; self.kinds.len()];
        let eval_region = |values: &mut Vec<bool>, region: Parity| {
            for (i, and) in aig.ands.iter().enumerate() {
                if parity[base + i] == region {
                    values[base + i] =
                        lit_value(values, and.fanin0) && lit_value(values, and.fanin1);
                }
            }
        };
        // tick -1: trigger DROCs emit their initial values
        for (i, kind) in self.kinds.iter().enumerate() {
            if *kind == DrocKind::Trigger {
                values[droc_base + i] = self.droc_init(i);
            }
        }
        eval_region(&mut values, Parity::Odd);
        self.capture(&values, &mut stored, DrocKind::Plain);

        let mut outputs = Vec::with_capacity(vectors.len());
        for vector in vectors {
            assert_eq!(vector.len(), aig.num_inputs, "input width mismatch");
            self.release(&mut values, &stored, DrocKind::Plain);
            values[1..=aig.num_inputs].copy_from_slice(vector);
            eval_region(&mut values, Parity::Even);
            outputs.push(aig.outputs.iter().map(|&o| lit_value(&values, o)).collect());
            self.capture(&values, &mut stored, DrocKind::Trigger);

            self.release(&mut values, &stored, DrocKind::Trigger);
            eval_region(&mut values, Parity::Odd);
            self.capture(&values, &mut stored, DrocKind::Plain);
        }
        outputs
    }

    fn capture(&self, values: &[bool], stored: &mut [bool], kind: DrocKind) {
        for (i, k) in self.kinds.iter().enumerate() {
            if *k == kind {
                stored[i] = lit_value(values, self.aig.latches[i].next);
            }
        }
    }

    fn release(&self, values: &mut [bool], stored: &[bool], kind: DrocKind) {
        let base = 1 + self.aig.num_inputs;
        for (i, k) in self.kinds.iter().enumerate() {
            if *k == kind {
                values[base + i] = stored[i];
            }
        }
    }

    /// Number of references to every variable from ANDs, DROCs and outputs.
    pub fn fanout_counts(&self) -> Vec<u32> {
        let mut counts = vec![0u32; self.aig.num_vars()];
        for and in &self.aig.ands {
            counts[and.fanin0.var() as usize] += 1;
            counts[and.fanin1.var() as usize] += 1;
        }
        for lit in self
            .aig
            .latches
            .iter()
            .map(|l| l.next)
            .chain(self.aig.outputs.iter().copied())
        {
            counts[lit.var() as usize] += 1;
        }
        counts
    }

    /// Own delay of every variable under `model`; sources contribute only
    /// their fanout cost.
    pub fn node_delays(&self, model: DelayModel) -> Vec<f64> {
        let fanout = self.fanout_counts();
        (0..self.aig.num_vars())
            .map(|v| {
                let is_and = matches!(self.aig.kind(v as u32), VarKind::And(_));
                match model {
                    DelayModel::Unit => f64::from(u8::from(is_and)),
                    DelayModel::Library {
                        gate_ps,
                        splitter_ps,
                    } => {
                        let split = splitter_ps * f64::from(fanout[v].saturating_sub(1));
                        if is_and {
                            gate_ps + split
                        } else if v == 0 {
                            0.0
                        } else {
                            split
                        }
                    }
                }
            })
            .collect()
    }

    /// Arrival time of every variable, measured from the nearest input or
    /// DROC output.
    pub fn arrivals(&self, model: DelayModel) -> Vec<f64> {
        let delay = self.node_delays(model);
        let base = self.aig.first_and_var() as usize;
        let mut arrival = delay.clone();
        for (i, and) in self.aig.ands.iter().enumerate() {
            let a = arrival[and.fanin0.var() as usize].max(arrival[and.fanin1.var() as usize]);
            arrival[base + i] = delay[base + i] + a;
        }
        arrival
    }

    /// Largest combinational delay between any two storage ranks.
    pub fn max_stage_delay(&self, model: DelayModel) -> f64 {
        let arrival = self.arrivals(model);
        self.sinks()
            .map(|l| arrival[l.var() as usize])
            .fold(0.0, f64::max)
    }

    /// Literals consumed by storage or outputs.
    pub fn sinks(&self) -> impl Iterator<Item = Lit> + '_ {
        self.aig
            .latches
            .iter()
            .map(|l| l.next)
            .chain(self.aig.outputs.iter().copied())
    }

    /// Drops DROCs and AND nodes that no output depends on.
    pub fn prune(&self) -> DrocAig {
        let aig = &self.aig;
        let mut live = vec![false; aig.num_vars()];
        let mut stack: Vec<u32> = aig.outputs.iter().map(|l| l.var()).collect();
        while let Some(var) = stack.pop() {
            if std::mem::replace(&mut live[var as usize], true) {
                continue;
            }
            match aig.kind(var) {
                VarKind::And(i) => stack.extend(aig.ands[i].fanins().map(Lit::var)),
                VarKind::Latch(i) => stack.push(aig.latches[i].next.var()),
                _ => {}
            }
        }
        let keep: Vec<usize> = (0..aig.latches.len())
            .filter(|&i| live[aig.latch_lit(i).var() as usize])
            .collect();
        self.select_drocs(&keep)
    }

    /// Keeps the listed DROCs (in order) and every AND node still reachable.
    fn select_drocs(&self, keep: &[usize]) -> DrocAig {
        let aig = &self.aig;
        let n_in = aig.num_inputs;
        let mut map: Vec<Option<Lit>> = vec![None; aig.num_vars()];
        map[0] = Some(Lit::FALSE);
        for i in 0..n_in {
            map[1 + i] = Some(aig.input_lit(i));
        }
        for (new, &old) in keep.iter().enumerate() {
            map[aig.latch_lit(old).var() as usize] = Some(Lit::new((1 + n_in + new) as u32, false));
        }
        let first = (1 + n_in + keep.len()) as u32;
        let mut ands = Vec::new();
        let old_base = aig.first_and_var() as usize;
        for (i, and) in aig.ands.iter().enumerate() {
            let f = |l: Lit| map[l.var() as usize].map(|m| m.xor(l.is_complemented()));
            if let (Some(a), Some(b)) = (f(and.fanin0), f(and.fanin1)) {
                map[old_base + i] = Some(Lit::new(first + ands.len() as u32, false));
                ands.push(crate::aig::AndNode {
                    fanin0: a,
                    fanin1: b,
                });
            }
        }
        let remap = |l: Lit| {
            map[l.var() as usize]
                .expect("live literal")
                .xor(l.is_complemented())
        };
        let latches = keep
            .iter()
            .map(|&i| crate::aig::Latch {
                next: remap(aig.latches[i].next),
                init: aig.latches[i].init,
            })
            .collect();
        let names = keep
            .iter()
            .map(|&i| aig.symbols.latches.get(i).cloned().flatten())
            .collect();
        let mut out = Aig {
            num_inputs: n_in,
            latches,
            ands,
            outputs: aig.outputs.iter().map(|&o| remap(o)).collect(),
            symbols: aig.symbols.clone(),
            comments: aig.comments.clone(),
        };
        out.symbols.latches = names;
        DrocAig {
            aig: crate::aig::compact(&out),
            kinds: keep.iter().map(|&i| self.kinds[i]).collect(),
            latency: self.latency,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aig::{AndNode, Latch};

    /// Toggle flip-flop as a trigger/plain DROC pair: q' = !q, init 0.
    fn toggle() -> DrocAig {
        let aig = Aig {
            num_inputs: 0,
            latches: vec![
                Latch {
                    next: Lit::new(2, true),
                    init: LatchInit::Zero,
                },
                Latch {
                    next: Lit::new(1, false),
                    init: LatchInit::Zero,
                },
            ],
            outputs: vec![Lit::new(2, false)],
            ..Default::default()
        };
        DrocAig {
            aig,
            kinds: vec![DrocKind::Trigger, DrocKind::Plain],
            latency: 0,
        }
    }

    #[test]
    fn toggle_counts() {
        let d = toggle();
        d.validate().unwrap();
        let outs: Vec<bool> = d
            .simulate(&vec![vec![]; 4])
            .into_iter()
            .map(|o| o[0])
            .collect();
        assert_eq!(outs, vec![false, true, false, true]);
    }

    #[test]
    fn region_mixing_is_rejected() {
        // AND of an input (even) and a trigger DROC output (odd)
        let aig = Aig {
            num_inputs: 1,
            latches: vec![Latch {
                next: Lit::new(1, false),
                init: LatchInit::Zero,
            }],
            ands: vec![AndNode {
                fanin0: Lit::new(2, false),
                fanin1: Lit::new(1, false),
            }],
            outputs: vec![Lit::new(3, false)],
            ..Default::default()
        };
        let d = DrocAig {
            aig,
            kinds: vec![DrocKind::Trigger],
            latency: 0,
        };
        assert!(d.validate().is_err());
    }

    #[test]
    fn prune_drops_dead_drocs() {
        let mut d = toggle();
        d.aig.latches.push(Latch {
            next: Lit::new(1, true),
            init: LatchInit::One,
        });
        d.kinds.push(DrocKind::Plain);
        let p = d.prune();
        assert_eq!(p.num_drocs(), 2);
        assert_eq!(p.simulate(&vec![vec![]; 3]), d.simulate(&vec![vec![]; 3]));
    }

    #[test]
    fn library_delay_counts_fanout() {
        let aig = Aig {
            num_inputs: 2,
            ands: vec![AndNode {
                fanin0: Lit::new(2, false),
                fanin1: Lit::new(1, false),
            }],
            outputs: vec![Lit::new(3, false), Lit::new(3, true)],
            ..Default::default()
        };
        let d = DrocAig::combinational(aig);
        let model = DelayModel::Library {
            gate_ps: 9.5,
            splitter_ps: 5.1,
        };
        assert!((d.max_stage_delay(model) - 14.6).abs() < 1e-9);
        assert_eq!(d.max_stage_delay(DelayModel::Unit), 1.0);
    }
}
