// SPDX-License-Identifier: Apache-2.0
//! Synthesis and verification for clock-free dual-rail alternating SFQ
//! logic.
//!
//! The flow takes an and-inverter graph, decides which polarity rails every
//! node must produce, maps nodes to LA and FA cells, legalizes fanout with
//! splitters, replaces latches with pairs of complementary destructive
//! readout cells (DROCs), and costs the result. A pulse-level simulator
//! checks the netlist against a plain Boolean evaluation of the graph.

pub mod aig;
pub mod cost;
pub mod error;
pub mod fixture;
pub mod flow;
pub mod graph;
pub mod io;
pub mod mapper;
pub mod netlist;
pub mod polarity;
pub mod sequential;
pub mod sim;

pub use aig::{normalize, Aig, AndNode, Latch, LatchInit, Lit};
pub use error::{Error, Result};
