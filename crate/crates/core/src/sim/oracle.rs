// SPDX-License-Identifier: Apache-2.0
//! Cycle-accurate Boolean reference.

use crate::aig::Aig;
use crate::error::{Error, Result};

/// Output values of `aig` for each input vector, starting from the latch
/// initial values. Unknown initial values are taken as 0.
pub fn oracle_simulate(aig: &Aig, vectors: &[Vec<bool>]) -> Result<Vec<Vec<bool>>> {
    let mut state = aig.initial_state();
    let mut out = Vec::with_capacity(vectors.len());
    for (k, v) in vectors.iter().enumerate() {
        if v.len() != aig.num_inputs {
            return Err(Error::Simulation(format!(
                "vector {k} has {} values, expected {}",
                v.len(),
                aig.num_inputs
            )));
        }
        let (outputs, next) = aig.step(v, &state);
        out.push(outputs);
        state = next;
    }
    Ok(out)
}
