// SPDX-License-Identifier: Apache-2.0
#![allow(dead_code)]

use std::path::PathBuf;

use proptest::prelude::*;
use xsfq_core::io::read_design;
use xsfq_core::Aig;

pub use xsfq_core::fixture::random_aig;

pub fn comb_aig() -> impl Strategy<Value = Aig> {
    (any::<u64>(), 2..9usize, 4..=200usize, 1..8usize)
        .prop_map(|(s, i, a, o)| random_aig(s, i, 0, a, o))
}

pub fn seq_aig() -> impl Strategy<Value = Aig> {
    (any::<u64>(), 1..5usize, 1..5usize, 4..=60usize, 1..5usize)
        .prop_map(|(s, i, l, a, o)| random_aig(s, i, l, a, o))
}

pub fn benchmarks_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../benchmarks")
}

/// Every shipped benchmark design, sorted by path.
pub fn shipped_benchmarks() -> Vec<(String, Aig)> {
    let mut out = Vec::new();
    for suite in ["examples", "iscas85", "iscas89", "epfl"] {
        let mut paths: Vec<PathBuf> = std::fs::read_dir(benchmarks_dir().join(suite))
            .unwrap()
            .map(|e| e.unwrap().path())
            .collect();
        paths.sort();
        for p in paths {
            out.push((
                format!("{suite}/{}", p.file_name().unwrap().to_string_lossy()),
                read_design(&p).unwrap(),
            ));
        }
    }
    out
}

pub fn random_vectors(inputs: usize, cycles: usize, seed: u64) -> Vec<Vec<bool>> {
    xsfq_core::sim::random_vectors(inputs, cycles, seed)
}
