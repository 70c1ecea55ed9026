// SPDX-License-Identifier: Apache-2.0

pub mod aiger;
pub mod blif;

use std::path::Path;

use crate::aig::Aig;
use crate::error::{Error, Result};

pub use aiger::{parse_aiger, read_aiger, write_ascii, write_binary, AigerFormat};
pub use blif::parse_blif;

/// Reads an AIGER or BLIF design; the format comes from the file contents.
pub fn read_design(path: &Path) -> Result<Aig> {
    let bytes = std::fs::read(path)?;
    if aiger::detect_format(&bytes).is_some() {
        return read_aiger(&bytes);
    }
    let text = std::str::from_utf8(&bytes)
        .map_err(|e| Error::at_byte(e.valid_up_to(), "BLIF input is not valid UTF-8"))?;
    parse_blif(text)
}
