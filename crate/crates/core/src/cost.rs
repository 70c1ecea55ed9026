// SPDX-License-Identifier: Apache-2.0
//! Cell library, JJ accounting, critical paths and clock frequencies.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netlist::{CellCounts, CellKind, Driver, Netlist, Origin};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellCost {
    pub delay_ps: f64,
    pub jj: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DrocCost {
    pub qp_delay_ps: f64,
    pub qn_delay_ps: f64,
    pub jj: u32,
    pub jj_preloaded: u32,
}

/// Costs of one interconnect variant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Variant {
    pub jtl: CellCost,
    pub la: CellCost,
    pub fa: CellCost,
    pub splitter: CellCost,
    pub droc: DrocCost,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellLibrary {
    pub no_ptl: Variant,
    pub ptl: Variant,
    pub merger: CellCost,
    pub const_source_jj: u32,
    /// In PTL mode, splitters keep their JTL-interface cost because their
    /// outputs abut the next cell.
    pub splitter_ptl_abutted: bool,
}

pub const DEFAULT_LIBRARY_TOML: &str = include_str!("../../../benchmarks/library/default.toml");

impl Default for CellLibrary {
    fn default() -> Self {
        CellLibrary {
            no_ptl: Variant {
                jtl: CellCost {
                    delay_ps: 4.6,
                    jj: 2,
                },
                la: CellCost {
                    delay_ps: 7.2,
                    jj: 4,
                },
                fa: CellCost {
                    delay_ps: 9.5,
                    jj: 4,
                },
                splitter: CellCost {
                    delay_ps: 5.1,
                    jj: 3,
                },
                droc: DrocCost {
                    qp_delay_ps: 6.7,
                    qn_delay_ps: 9.5,
                    jj: 13,
                    jj_preloaded: 22,
                },
            },
            ptl: Variant {
                jtl: CellCost {
                    delay_ps: 17.0,
                    jj: 7,
                },
                la: CellCost {
                    delay_ps: 19.9,
                    jj: 12,
                },
                fa: CellCost {
                    delay_ps: 24.7,
                    jj: 12,
                },
                splitter: CellCost {
                    delay_ps: 19.7,
                    jj: 10,
                },
                droc: DrocCost {
                    qp_delay_ps: 18.0,
                    qn_delay_ps: 21.5,
                    jj: 27,
                    jj_preloaded: 36,
                },
            },
            merger: CellCost {
                delay_ps: 7.0,
                jj: 5,
            },
            const_source_jj: 4,
            splitter_ptl_abutted: true,
        }
    }
}

impl CellLibrary {
    pub fn from_toml(text: &str) -> Result<CellLibrary> {
        let lib: CellLibrary = toml::from_str(text).map_err(|e| Error::Library(e.to_string()))?;
        lib.validate()?;
        Ok(lib)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("library serializes")
    }

    pub fn validate(&self) -> Result<()> {
        for (variant, v) in [("no_ptl", &self.no_ptl), ("ptl", &self.ptl)] {
            let cells = [
                ("jtl", v.jtl),
                ("la", v.la),
                ("fa", v.fa),
                ("splitter", v.splitter),
            ];
            for (name, c) in cells {
                check(c.delay_ps > 0.0 && c.jj >= 1, || {
                    format!("{variant}.{name} needs a positive delay and JJ count")
                })?;
            }
            let d = v.droc;
            check(
                d.qp_delay_ps > 0.0 && d.qn_delay_ps > 0.0 && d.jj >= 1 && d.jj_preloaded >= 1,
                || format!("{variant}.droc needs positive delays and JJ counts"),
            )?;
        }
        check(self.merger.delay_ps > 0.0 && self.merger.jj >= 1, || {
            "merger needs a positive delay and JJ count".into()
        })?;
        check(self.const_source_jj >= 1, || {
            "const_source_jj must be at least 1".into()
        })
    }

    pub fn variant(&self, ptl: bool) -> &Variant {
        if ptl {
            &self.ptl
        } else {
            &self.no_ptl
        }
    }

    pub fn jj(&self, kind: CellKind, ptl: bool) -> u32 {
        let v = self.variant(ptl);
        match kind {
            CellKind::La => v.la.jj,
            CellKind::Fa => v.fa.jj,
            CellKind::Splitter if ptl && self.splitter_ptl_abutted => self.no_ptl.splitter.jj,
            CellKind::Splitter => v.splitter.jj,
            CellKind::Droc { preloaded: true } => v.droc.jj_preloaded,
            CellKind::Droc { preloaded: false } => v.droc.jj,
            CellKind::Merger => self.merger.jj,
            CellKind::Jtl => v.jtl.jj,
            CellKind::ConstSource { .. } => self.const_source_jj,
        }
    }

    /// Propagation delay of a combinational cell; DROCs report clock-to-Qn.
    pub fn delay_ps(&self, kind: CellKind, ptl: bool) -> f64 {
        let v = self.variant(ptl);
        match kind {
            CellKind::La => v.la.delay_ps,
            CellKind::Fa => v.fa.delay_ps,
            CellKind::Splitter => v.splitter.delay_ps,
            CellKind::Droc { .. } => v.droc.qn_delay_ps,
            CellKind::Merger => self.merger.delay_ps,
            CellKind::Jtl => v.jtl.delay_ps,
            CellKind::ConstSource { .. } => 0.0,
        }
    }

    /// Slowest clock-to-output delay of a DROC.
    pub fn clk_to_q_ps(&self, ptl: bool) -> f64 {
        let d = self.variant(ptl).droc;
        d.qp_delay_ps.max(d.qn_delay_ps)
    }
}

fn check(ok: bool, message: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Library(message()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JjCount {
    pub total: u64,
    pub by_kind: BTreeMap<String, u64>,
}

/// JJ total. Clock and trigger distribution (mergers and their splitters)
/// is counted only with `include_clock_tree`.
pub fn jj_count(
    netlist: &Netlist,
    lib: &CellLibrary,
    ptl: bool,
    include_clock_tree: bool,
) -> JjCount {
    let mut by_kind = BTreeMap::new();
    let mut total = 0u64;
    for cell in &netlist.cells {
        if cell.origin == Origin::ClockTree && !include_clock_tree {
            continue;
        }
        let jj = u64::from(lib.jj(cell.kind, ptl));
        total += jj;
        *by_kind.entry(cell.kind.label().to_string()).or_insert(0) += jj;
    }
    JjCount { total, by_kind }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathStats {
    pub depth_gates: usize,
    pub depth_with_splitters: usize,
    pub delay_ps: f64,
}

/// Longest combinational paths between storage ranks and the interface.
/// DROC outputs start new paths; their clock-to-output delay belongs to
/// the clock overhead. Clock distribution is ignored.
pub fn critical_path(netlist: &Netlist, lib: &CellLibrary, ptl: bool) -> Result<PathStats> {
    let order = netlist.topological_order()?;
    let mut arrival = vec![(0usize, 0usize, 0.0f64); netlist.nets.len()];
    let mut stats = PathStats {
        depth_gates: 0,
        depth_with_splitters: 0,
        delay_ps: 0.0,
    };
    for id in order {
        let cell = &netlist.cells[id];
        if cell.origin == Origin::ClockTree
            || matches!(
                cell.kind,
                CellKind::Droc { .. } | CellKind::ConstSource { .. }
            )
        {
            continue;
        }
        let mut a = (0usize, 0usize, 0.0f64);
        for &net in &cell.inputs {
            if let Driver::Cell { .. } = netlist.nets[net].driver {
                let b = arrival[net];
                a = (a.0.max(b.0), a.1.max(b.1), a.2.max(b.2));
            }
        }
        let gate = cell.kind.is_logic() as usize;
        let counted =
            matches!(cell.kind, CellKind::La | CellKind::Fa | CellKind::Splitter) as usize;
        let out = (
            a.0 + gate,
            a.1 + counted,
            a.2 + lib.delay_ps(cell.kind, ptl),
        );
        for net in cell.outputs.iter().flatten() {
            arrival[*net] = out;
        }
        stats.depth_gates = stats.depth_gates.max(out.0);
        stats.depth_with_splitters = stats.depth_with_splitters.max(out.1);
        stats.delay_ps = stats.delay_ps.max(out.2);
    }
    Ok(stats)
}

/// Circuit clock and architectural frequency in GHz. One logical cycle
/// takes two clock cycles, so the architectural frequency is half.
pub fn frequencies(critical_delay_ps: f64, clk_overhead_ps: f64) -> Result<(f64, f64)> {
    if critical_delay_ps <= 0.0 || !critical_delay_ps.is_finite() {
        return Err(Error::Invalid(format!(
            "non-positive critical delay {critical_delay_ps}"
        )));
    }
    let circuit = 1000.0 / (critical_delay_ps + clk_overhead_ps);
    Ok((circuit, circuit / 2.0))
}

/// JJ savings against a baseline, plain and with the 30% clock-splitting
/// surcharge applied to the baseline.
pub fn baseline_comparison(jj_ours: u64, jj_baseline: u64) -> Result<(f64, f64)> {
    if jj_ours == 0 {
        return Err(Error::Invalid("own JJ count is zero".into()));
    }
    let plain = jj_baseline as f64 / jj_ours as f64;
    Ok((plain, plain * 1.3))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub jj_total: u64,
    pub jj_by_kind: BTreeMap<String, u64>,
    pub cells: CellCounts,
    pub n_lafa: usize,
    pub n_splitter: usize,
    pub n_droc_preloaded: usize,
    pub n_droc_plain: usize,
    pub duplication_pct: Option<u32>,
    pub depth_gates: usize,
    pub depth_with_splitters: usize,
    pub critical_path_ps: f64,
    pub clk_overhead_ps: f64,
    pub circuit_freq_ghz: Option<f64>,
    pub arch_freq_ghz: Option<f64>,
    pub ptl: bool,
    pub include_clock_tree: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CostOptions {
    pub ptl: bool,
    pub include_clock_tree: bool,
    /// Clock overhead added to the critical path; defaults to the DROC
    /// clock-to-output delay.
    pub clk_overhead_ps: Option<f64>,
}

pub fn cost_report(netlist: &Netlist, lib: &CellLibrary, opts: &CostOptions) -> Result<CostReport> {
    let jj = jj_count(netlist, lib, opts.ptl, opts.include_clock_tree);
    let path = critical_path(netlist, lib, opts.ptl)?;
    let overhead = opts
        .clk_overhead_ps
        .unwrap_or_else(|| lib.clk_to_q_ps(opts.ptl));
    let freq = frequencies(path.delay_ps, overhead).ok();
    let cells = netlist.counts();
    Ok(CostReport {
        jj_total: jj.total,
        jj_by_kind: jj.by_kind,
        n_lafa: cells.lafa(),
        n_splitter: cells.splitter,
        n_droc_preloaded: cells.droc_preloaded,
        n_droc_plain: cells.droc_plain,
        cells,
        duplication_pct: None,
        depth_gates: path.depth_gates,
        depth_with_splitters: path.depth_with_splitters,
        critical_path_ps: path.delay_ps,
        clk_overhead_ps: overhead,
        circuit_freq_ghz: freq.map(|f| f.0),
        arch_freq_ghz: freq.map(|f| f.1),
        ptl: opts.ptl,
        include_clock_tree: opts.include_clock_tree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::{OutputPort, Sink};
    use crate::polarity::{OutputPolarity, Rail};

    #[test]
    fn shipped_library_matches_defaults() {
        assert_eq!(
            CellLibrary::from_toml(DEFAULT_LIBRARY_TOML).unwrap(),
            CellLibrary::default()
        );
        let lib = CellLibrary::default();
        assert_eq!(CellLibrary::from_toml(&lib.to_toml()).unwrap(), lib);
    }

    #[test]
    fn invalid_library_is_rejected() {
        let text = DEFAULT_LIBRARY_TOML.replacen("delay_ps = 7.2", "delay_ps = 0.0", 1);
        assert!(CellLibrary::from_toml(&text).is_err());
    }

    fn la_splitter_fa() -> Netlist {
        let mut n = Netlist::new("chain");
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
            "la",
        );
        let x = n.cells[la].outputs[0].unwrap();
        let s = n.add_cell(CellKind::Splitter, vec![x], Origin::Fanout, "s");
        let (l, r) = (
            n.cells[s].outputs[0].unwrap(),
            n.cells[s].outputs[1].unwrap(),
        );
        let fa = n.add_cell(
            CellKind::Fa,
            vec![l, r],
            Origin::Node {
                var: 4,
                rail: Rail::Neg,
            },
            "fa",
        );
        let y = n.cells[fa].outputs[0].unwrap();
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
    fn chain_path() {
        let p = critical_path(&la_splitter_fa(), &CellLibrary::default(), false).unwrap();
        assert_eq!((p.depth_gates, p.depth_with_splitters), (2, 3));
        assert!((p.delay_ps - 21.8).abs() < 1e-9);
    }

    #[test]
    fn empty_path() {
        let p = critical_path(&Netlist::new("e"), &CellLibrary::default(), false).unwrap();
        assert_eq!(
            (p.depth_gates, p.depth_with_splitters, p.delay_ps),
            (0, 0, 0.0)
        );
    }

    #[test]
    fn ptl_splitters_are_abutted() {
        let n = la_splitter_fa();
        let lib = CellLibrary::default();
        assert_eq!(jj_count(&n, &lib, false, false).total, 11);
        assert_eq!(jj_count(&n, &lib, true, false).total, 27);
        let mut unabutted = lib;
        unabutted.splitter_ptl_abutted = false;
        assert_eq!(jj_count(&n, &unabutted, true, false).total, 34);
    }

    #[test]
    fn frequency_examples() {
        assert_eq!(frequencies(1000.0, 0.0).unwrap(), (1.0, 0.5));
        assert!(frequencies(0.0, 9.5).is_err());
        let (c, a) = frequencies(1110.0, 0.0).unwrap();
        assert!((c - 0.9).abs() < 0.01 && a == c / 2.0);
    }

    #[test]
    fn savings_examples() {
        let (p, c) = baseline_comparison(2942, 12909).unwrap();
        assert_eq!(
            (format!("{p:.1}"), format!("{c:.1}")),
            ("4.4".into(), "5.7".into())
        );
        assert_eq!(baseline_comparison(7, 7).unwrap(), (1.0, 1.3));
        assert!(baseline_comparison(0, 1).is_err());
    }
}
