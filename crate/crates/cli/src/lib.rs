// SPDX-License-Identifier: Apache-2.0
//! Command-line front end: `synth`, `sim` and `bench`.

pub mod bench;
pub mod report;

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use xsfq_core::cost::{CellLibrary, CostOptions};
use xsfq_core::flow::{synthesize, FlowOptions, FlowResult};
use xsfq_core::io::read_design;
use xsfq_core::netlist::Netlist;
use xsfq_core::polarity::{parse_polarity_file, Strategy};
use xsfq_core::sequential::{expand_latches, RetimeConfig};
use xsfq_core::sim::{self, random_vectors, SimConfig, Verification};
use xsfq_core::Aig;

pub use report::Format;

/// Exit code for a failed verification.
pub const EXIT_FAIL: i32 = 1;
/// Exit code for usage, parse and I/O errors.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "xsfq",
    version,
    about = "Synthesis and pulse simulation for dual-rail alternating SFQ logic"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Map a design to LA/FA cells and report its cost.
    Synth(SynthArgs),
    /// Simulate a mapped netlist against its source design.
    Sim(SimArgs),
    /// Synthesize a set of benchmarks and tabulate the results.
    Bench(bench::BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum PolarityArg {
    Heuristic,
    AllPositive,
    DualRail,
}

/// Options shared by `synth` and `bench`.
#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Output polarity strategy.
    #[arg(long, value_enum, default_value = "heuristic")]
    pub polarity: PolarityArg,
    /// Per-output polarities (`name pos|neg|both` per line); overrides --polarity.
    #[arg(long, value_name = "FILE")]
    pub polarity_file: Option<PathBuf>,
    /// Pipeline stages for combinational designs.
    #[arg(long, default_value_t = 0)]
    pub pipeline: usize,
    /// Balance DROC stages by forward retiming.
    #[arg(long, overrides_with = "no_retime")]
    pub retime: bool,
    #[arg(long, overrides_with = "retime")]
    pub no_retime: bool,
    /// Upper bound on retiming moves.
    #[arg(long, default_value_t = RetimeConfig::default().max_moves)]
    pub max_moves: usize,
    /// Cell library in TOML; the built-in one by default.
    #[arg(long, value_name = "FILE")]
    pub library: Option<PathBuf>,
    /// Cost cells with transmission-line interfaces.
    #[arg(long)]
    pub ptl: bool,
    /// Count clock and trigger distribution cells.
    #[arg(long)]
    pub include_clock_tree: bool,
    /// Build splitter trees balanced instead of as chains.
    #[arg(long)]
    pub balanced_splitters: bool,
    #[arg(long, value_enum, default_value = "markdown")]
    pub format: Format,
    /// Seed for random stimulus.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

impl RunConfig {
    pub fn library(&self) -> Result<CellLibrary> {
        load_library(self.library.as_deref())
    }

    pub fn strategy(&self, aig: &Aig) -> Result<Strategy> {
        if let Some(path) = &self.polarity_file {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let design = expand_latches(&xsfq_core::normalize(aig));
            let fixed = parse_polarity_file(&text, &design)
                .with_context(|| format!("in {}", path.display()))?;
            return Ok(Strategy::Fixed(fixed));
        }
        Ok(match self.polarity {
            PolarityArg::Heuristic => Strategy::Heuristic,
            PolarityArg::AllPositive => Strategy::AllPositive,
            PolarityArg::DualRail => Strategy::DualRail,
        })
    }

    pub fn flow_options(&self, aig: &Aig) -> Result<FlowOptions> {
        if self.pipeline > 0 && !aig.latches.is_empty() {
            bail!("--pipeline needs a combinational design");
        }
        Ok(FlowOptions {
            strategy: self.strategy(aig)?,
            pipeline: self.pipeline,
            pipeline_model: None,
            retime: (self.retime && !self.no_retime).then(|| RetimeConfig {
                max_moves: self.max_moves,
                ..RetimeConfig::default()
            }),
            balanced_splitters: self.balanced_splitters,
            cost: CostOptions {
                ptl: self.ptl,
                include_clock_tree: self.include_clock_tree,
                clk_overhead_ps: None,
            },
        })
    }

    pub fn run(&self, name: &str, aig: &Aig, lib: &CellLibrary) -> Result<FlowResult> {
        let opts = self.flow_options(aig)?;
        Ok(synthesize(name, aig, lib, &opts)?)
    }
}

pub fn load_library(path: Option<&Path>) -> Result<CellLibrary> {
    match path {
        None => Ok(CellLibrary::default()),
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            CellLibrary::from_toml(&text).with_context(|| format!("in {}", p.display()))
        }
    }
}

pub fn design_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "design".into())
}

pub fn read_input(path: &Path) -> Result<Aig> {
    read_design(path).with_context(|| format!("reading {}", path.display()))
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// AIGER (.aag/.aig) or BLIF design.
    pub input: PathBuf,
    #[command(flatten)]
    pub config: RunConfig,
    /// Directory for the netlist, listing and report files.
    #[arg(long, short = 'o', default_value = ".")]
    pub out_dir: PathBuf,
    /// Print the report without writing files.
    #[arg(long)]
    pub no_write: bool,
}

pub fn cmd_synth(args: &SynthArgs, out: &mut dyn std::io::Write) -> Result<i32> {
    let aig = read_input(&args.input)?;
    let lib = args.config.library()?;
    let name = design_name(&args.input);
    let result = args.config.run(&name, &aig, &lib)?;
    let row = report::ReportRow::from_flow(&result);
    if !args.no_write {
        fs::create_dir_all(&args.out_dir)
            .with_context(|| format!("creating {}", args.out_dir.display()))?;
        let base = args.out_dir.join(&name);
        write(
            &base.with_extension("netlist.json"),
            &result.netlist.to_json()?,
        )?;
        write(&base.with_extension("xsfq"), &result.netlist.listing())?;
        let summary = result.summary(&args.config.strategy(&aig)?);
        write(
            &base.with_extension("report.json"),
            &(serde_json::to_string_pretty(&summary)? + "\n"),
        )?;
    }
    out.write_all(report::render(&[row], args.config.format)?.as_bytes())?;
    Ok(0)
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

#[derive(Debug, Args)]
pub struct SimArgs {
    /// Netlist JSON written by `synth`.
    pub netlist: PathBuf,
    /// Input vectors, one line of 0/1 per logical cycle, inputs in order.
    #[arg(long, value_name = "FILE", conflicts_with = "cycles")]
    pub vectors: Option<PathBuf>,
    /// Random cycles; combinational designs with at most 10 inputs are
    /// simulated exhaustively when neither this nor --vectors is given.
    #[arg(long)]
    pub cycles: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Leave out the trigger pulse.
    #[arg(long)]
    pub no_trigger: bool,
    /// Clock period in picoseconds.
    #[arg(long)]
    pub period_ps: Option<f64>,
    #[arg(long)]
    pub ptl: bool,
    #[arg(long, value_name = "FILE")]
    pub library: Option<PathBuf>,
    /// Write the pulse trace as VCD.
    #[arg(long, value_name = "FILE")]
    pub vcd: Option<PathBuf>,
    /// Write the pulse trace as JSON.
    #[arg(long, value_name = "FILE")]
    pub trace_json: Option<PathBuf>,
    /// Cycles listed in the text output.
    #[arg(long, default_value_t = 16)]
    pub show: usize,
    /// Print the verdict as JSON.
    #[arg(long)]
    pub json: bool,
}

/// Stimulus for `aig`: exhaustive when small and combinational.
pub fn default_vectors(aig: &Aig, cycles: Option<usize>, seed: u64) -> Vec<Vec<bool>> {
    match cycles {
        None if aig.latches.is_empty() && aig.num_inputs <= 10 => (0..1usize << aig.num_inputs)
            .map(|v| (0..aig.num_inputs).map(|i| v >> i & 1 == 1).collect())
            .collect(),
        _ => random_vectors(aig.num_inputs, cycles.unwrap_or(1000), seed),
    }
}

pub fn parse_vectors(text: &str, width: usize) -> Result<Vec<Vec<bool>>> {
    let mut vectors = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let v: Vec<bool> = line
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => bail!("line {}: unexpected `{c}`", no + 1),
            })
            .collect::<Result<_>>()?;
        if v.len() != width {
            bail!("line {}: {} values for {width} inputs", no + 1, v.len());
        }
        vectors.push(v);
    }
    Ok(vectors)
}

fn bits(v: &[bool]) -> String {
    v.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn decoded(v: &[Option<bool>]) -> String {
    v.iter()
        .map(|b| b.map_or('x', |b| if b { '1' } else { '0' }))
        .collect()
}

pub fn cmd_sim(args: &SimArgs, out: &mut dyn std::io::Write) -> Result<i32> {
    let text = fs::read_to_string(&args.netlist)
        .with_context(|| format!("reading {}", args.netlist.display()))?;
    let netlist =
        Netlist::from_json(&text).with_context(|| format!("in {}", args.netlist.display()))?;
    let design = sim::embedded_design(&netlist)?.context("netlist carries no source design")?;
    let lib = load_library(args.library.as_deref())?;
    let vectors = match &args.vectors {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            parse_vectors(&text, design.num_inputs)
                .with_context(|| format!("in {}", p.display()))?
        }
        None => default_vectors(&design, args.cycles, args.seed),
    };
    let record = args.vcd.is_some() || args.trace_json.is_some();
    let cfg = SimConfig {
        phase_period_ps: args.period_ps,
        trigger: !args.no_trigger,
        record,
        ptl: args.ptl,
        ..SimConfig::default()
    };
    let v = sim::verify_against(&netlist, &design, &lib, &vectors, &cfg)?;
    if let Some(p) = &args.vcd {
        let file = fs::File::create(p).with_context(|| format!("creating {}", p.display()))?;
        sim::write_vcd(&netlist, &v.result, std::io::BufWriter::new(file))?;
    }
    if let Some(p) = &args.trace_json {
        write(p, &sim::pulses_to_json(&netlist, &v.result)?)?;
    }
    if args.json {
        let mut slim = v.clone();
        slim.result.pulses.clear();
        writeln!(out, "{}", serde_json::to_string_pretty(&slim)?)?;
    } else {
        print_verdict(&netlist, &vectors, &v, args.show, out)?;
    }
    Ok(if v.passed() { 0 } else { EXIT_FAIL })
}

fn print_verdict(
    netlist: &Netlist,
    vectors: &[Vec<bool>],
    v: &Verification,
    show: usize,
    out: &mut dyn std::io::Write,
) -> Result<()> {
    let r = &v.result;
    writeln!(
        out,
        "{}: {} cycles, period {} fs, latency {}",
        netlist.name, r.cycles, r.period_fs, netlist.latency
    )?;
    for (k, row) in r.outputs.iter().enumerate().take(show) {
        let expected = k
            .checked_sub(netlist.latency)
            .and_then(|j| v.reference.get(j))
            .map_or(String::new(), |e| bits(e));
        writeln!(
            out,
            "  cycle {k:>4}  in {}  out {}  expected {}",
            bits(&vectors[k]),
            decoded(row),
            expected
        )?;
    }
    for m in v.mismatches.iter().take(20) {
        writeln!(
            out,
            "mismatch: cycle {} output {} expected {} got {:?}",
            m.cycle,
            netlist.outputs[m.output].name,
            m.expected as u8,
            m.got.map(u8::from)
        )?;
    }
    for viol in r.violations.iter().take(20) {
        let cell = viol.cell.map_or(String::new(), |c| format!(" cell {c}"));
        writeln!(
            out,
            "violation: cycle {} {:?}{cell}: {}",
            viol.cycle, viol.kind, viol.detail
        )?;
    }
    let verdict = if v.passed() { "PASS" } else { "FAIL" };
    writeln!(
        out,
        "{verdict}: {} mismatches, {} violations",
        v.mismatches.len(),
        r.violation_count
    )?;
    Ok(())
}

pub fn run(cli: &Cli, out: &mut dyn std::io::Write) -> Result<i32> {
    match &cli.command {
        Command::Synth(a) => cmd_synth(a, out),
        Command::Sim(a) => cmd_sim(a, out),
        Command::Bench(a) => bench::cmd_bench(a, out),
    }
}
