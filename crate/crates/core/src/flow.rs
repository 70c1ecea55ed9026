// SPDX-License-Identifier: Apache-2.0
//! End-to-end synthesis.

use serde::Serialize;

use crate::aig::{normalize, Aig};
use crate::cost::{cost_report, CellLibrary, CostOptions, CostReport};
use crate::error::Result;
use crate::graph::{DelayModel, DrocAig};
use crate::io::write_ascii;
use crate::mapper::{insert_splitters, map_design};
use crate::netlist::Netlist;
use crate::polarity::{
    assign_output_polarities, propagate_requirements, OutputPolarityAssignment, RailRequirementMap,
    Strategy,
};
use crate::sequential::{
    build_trigger, expand_latches, insert_pipeline, retime, RetimeConfig, RetimeReport,
};

#[derive(Debug, Clone, PartialEq)]
pub struct FlowOptions {
    pub strategy: Strategy,
    /// Pipeline stages for combinational designs; 0 leaves them unpipelined.
    pub pipeline: usize,
    /// Cut model for pipelining; library gate delays when unset.
    pub pipeline_model: Option<DelayModel>,
    pub retime: Option<RetimeConfig>,
    pub balanced_splitters: bool,
    pub cost: CostOptions,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions {
            strategy: Strategy::Heuristic,
            pipeline: 0,
            pipeline_model: None,
            retime: None,
            balanced_splitters: false,
            cost: CostOptions::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct FlowResult {
    pub design: DrocAig,
    pub assignment: OutputPolarityAssignment,
    pub requirements: RailRequirementMap,
    pub retime: Option<RetimeReport>,
    pub netlist: Netlist,
    pub cost: CostReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct FlowSummary<'a> {
    pub name: &'a str,
    pub strategy: &'static str,
    pub inputs: usize,
    pub outputs: usize,
    pub and_nodes: usize,
    pub latency: usize,
    pub retime: Option<&'a RetimeReport>,
    #[serde(flatten)]
    pub cost: &'a CostReport,
}

impl FlowResult {
    pub fn summary<'a>(&'a self, strategy: &Strategy) -> FlowSummary<'a> {
        FlowSummary {
            name: &self.netlist.name,
            strategy: strategy.name(),
            inputs: self.netlist.inputs.len(),
            outputs: self.netlist.outputs.len(),
            and_nodes: self.design.aig.ands.len(),
            latency: self.netlist.latency,
            retime: self.retime.as_ref(),
            cost: &self.cost,
        }
    }
}

/// Gate and splitter delays the pipeliner balances against.
pub fn library_delay_model(lib: &CellLibrary, ptl: bool) -> DelayModel {
    let v = lib.variant(ptl);
    DelayModel::Library {
        gate_ps: v.la.delay_ps.max(v.fa.delay_ps),
        splitter_ps: v.splitter.delay_ps,
    }
}

pub fn synthesize(
    name: &str,
    aig: &Aig,
    lib: &CellLibrary,
    opts: &FlowOptions,
) -> Result<FlowResult> {
    let source = normalize(aig);
    let mut design = expand_latches(&source);
    if opts.pipeline > 0 {
        let model = opts
            .pipeline_model
            .unwrap_or_else(|| library_delay_model(lib, opts.cost.ptl));
        design = insert_pipeline(&design, opts.pipeline, model)?;
    }
    let mut retime_report = None;
    if let Some(config) = &opts.retime {
        let (retimed, report) = retime(&design, config);
        design = retimed;
        retime_report = Some(report);
    }
    design.validate()?;
    let assignment = assign_output_polarities(&design, &opts.strategy)?;
    let requirements = propagate_requirements(&design, &assignment);
    let mapped = map_design(&design, &requirements, &assignment)?;
    let mut netlist = insert_splitters(&build_trigger(&mapped), opts.balanced_splitters);
    netlist.name = name.to_string();
    netlist.latency = design.latency;
    netlist.design = Some(write_ascii(&source));
    netlist.check_structure(true)?;
    let mut cost = cost_report(&netlist, lib, &opts.cost)?;
    cost.duplication_pct = Some(requirements.duplication_penalty());
    Ok(FlowResult {
        design,
        assignment,
        requirements,
        retime: retime_report,
        netlist,
        cost,
    })
}
