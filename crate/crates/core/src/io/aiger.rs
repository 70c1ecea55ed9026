// SPDX-License-Identifier: Apache-2.0
//! AIGER 1.9 reader and writer, ascii (`aag`) and binary (`aig`).
//!
//! Ascii files may number variables freely and list AND gates in any order;
//! they are renumbered into the canonical layout on input. Binary files must
//! follow the binary encoding rules and keep their numbering.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::aig::{Aig, AndNode, Latch, LatchInit, Lit, Symbols};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AigerFormat {
    Ascii,
    Binary,
}

#[derive(Debug, Clone, Copy)]
struct Header {
    max_var: u64,
    inputs: usize,
    latches: usize,
    outputs: usize,
    ands: usize,
}

/// Detects the format from the header magic.
pub fn detect_format(bytes: &[u8]) -> Option<AigerFormat> {
    if bytes.starts_with(b"aag") {
        Some(AigerFormat::Ascii)
    } else if bytes.starts_with(b"aig") {
        Some(AigerFormat::Binary)
    } else {
        None
    }
}

/// Parses an AIGER file, detecting the format from its header.
pub fn read_aiger(bytes: &[u8]) -> Result<Aig> {
    match detect_format(bytes) {
        Some(format) => parse_aiger(bytes, format),
        None => Err(Error::at_line(1, "expected `aag` or `aig` header")),
    }
}

pub fn parse_aiger(bytes: &[u8], format: AigerFormat) -> Result<Aig> {
    let mut reader = LineReader {
        bytes,
        pos: 0,
        line: 0,
    };
    let (line_no, header_line) = reader
        .next_line()
        .ok_or_else(|| Error::at_line(1, "missing header"))?;
    let header = parse_header(header_line, line_no, format)?;
    match format {
        AigerFormat::Ascii => parse_ascii(&mut reader, header),
        AigerFormat::Binary => parse_binary(&mut reader, header),
    }
}

fn parse_header(line: &str, line_no: usize, format: AigerFormat) -> Result<Header> {
    let mut fields = line.split_ascii_whitespace();
    let magic = fields.next().unwrap_or("");
    let expected = match format {
        AigerFormat::Ascii => "aag",
        AigerFormat::Binary => "aig",
    };
    if magic != expected {
        return Err(Error::at_line(
            line_no,
            format!("expected `{expected}` header, found `{magic}`"),
        ));
    }
    let mut nums = Vec::new();
    for field in fields {
        let n: u64 = field
            .parse()
            .map_err(|_| Error::at_line(line_no, format!("invalid header field `{field}`")))?;
        nums.push(n);
    }
    if nums.len() < 5 || nums.len() > 9 {
        return Err(Error::at_line(
            line_no,
            "header needs M I L O A and at most B C J F",
        ));
    }
    if nums[5..].iter().any(|&n| n != 0) {
        return Err(Error::Unsupported(
            "bad-state, constraint, justice and fairness sections".into(),
        ));
    }
    let header = Header {
        max_var: nums[0],
        inputs: nums[1] as usize,
        latches: nums[2] as usize,
        outputs: nums[3] as usize,
        ands: nums[4] as usize,
    };
    let defined = (header.inputs + header.latches + header.ands) as u64;
    match format {
        AigerFormat::Ascii if header.max_var < defined => Err(Error::at_line(
            line_no,
            format!(
                "M = {} is smaller than I + L + A = {defined}",
                header.max_var
            ),
        )),
        AigerFormat::Binary if header.max_var != defined => Err(Error::at_line(
            line_no,
            format!(
                "binary header needs M = I + L + A, got {} and {defined}",
                header.max_var
            ),
        )),
        _ => Ok(header),
    }
}

struct LineReader<'a> {
    bytes: &'a [u8],
    pos: usize,
    line: usize,
}

impl<'a> LineReader<'a> {
    /// Returns the next line with its 1-based number.
    fn next_line(&mut self) -> Option<(usize, &'a str)> {
        if self.pos >= self.bytes.len() {
            return None;
        }
        let rest = &self.bytes[self.pos..];
        let end = rest.iter().position(|&b| b == b'\n').unwrap_or(rest.len());
        self.pos += (end + 1).min(rest.len());
        self.line += 1;
        let text = std::str::from_utf8(&rest[..end]).unwrap_or("\u{fffd}");
        Some((self.line, text.strip_suffix('\r').unwrap_or(text)))
    }

    fn expect_line(&mut self, what: &str) -> Result<(usize, &'a str)> {
        self.next_line().ok_or_else(|| {
            Error::at_line(
                self.line + 1,
                format!("unexpected end of file, expected {what}"),
            )
        })
    }

    fn read_varint(&mut self) -> Result<u64> {
        let start = self.pos;
        let mut value: u64 = 0;
        let mut shift = 0;
        loop {
            let byte = *self
                .bytes
                .get(self.pos)
                .ok_or_else(|| Error::at_byte(self.pos, "unexpected end of binary AND section"))?;
            self.pos += 1;
            if shift > 56 {
                return Err(Error::at_byte(start, "delta encoding too long"));
            }
            value |= u64::from(byte & 0x7f) << shift;
            if byte & 0x80 == 0 {
                return Ok(value);
            }
            shift += 7;
        }
    }
}

fn parse_numbers(line: &str, line_no: usize, what: &str) -> Result<Vec<u64>> {
    line.split_ascii_whitespace()
        .map(|f| {
            f.parse::<u64>()
                .map_err(|_| Error::at_line(line_no, format!("invalid {what} `{f}`")))
        })
        .collect()
}

fn check_lit(lit: u64, max_var: u64, line_no: usize) -> Result<u64> {
    if lit > 2 * max_var + 1 {
        Err(Error::at_line(
            line_no,
            format!("literal {lit} exceeds maximum variable {max_var}"),
        ))
    } else {
        Ok(lit)
    }
}

fn parse_init(fields: &[u64], lit: u64, line_no: usize) -> Result<LatchInit> {
    match fields.get(2) {
        None | Some(0) => Ok(LatchInit::Zero),
        Some(1) => Ok(LatchInit::One),
        Some(&x) if x == lit => Ok(LatchInit::Unknown),
        Some(x) => Err(Error::at_line(
            line_no,
            format!("invalid latch reset value {x}"),
        )),
    }
}

fn parse_ascii(reader: &mut LineReader<'_>, h: Header) -> Result<Aig> {
    // file variable -> canonical literal
    let mut map: HashMap<u64, Lit> = HashMap::new();
    let mut define = |var: u64, lit: Lit, line_no: usize| -> Result<()> {
        if var == 0 {
            return Err(Error::at_line(line_no, "constant cannot be redefined"));
        }
        if map.insert(var, lit).is_some() {
            return Err(Error::at_line(
                line_no,
                format!("variable {var} defined twice"),
            ));
        }
        Ok(())
    };
    let def_lit = |lit: u64, line_no: usize| -> Result<u64> {
        let lit = check_lit(lit, h.max_var, line_no)?;
        if lit & 1 == 1 {
            return Err(Error::at_line(
                line_no,
                format!("defining literal {lit} is complemented"),
            ));
        }
        Ok(lit >> 1)
    };

    for i in 0..h.inputs {
        let (ln, line) = reader.expect_line("input")?;
        let nums = parse_numbers(line, ln, "input literal")?;
        if nums.len() != 1 {
            return Err(Error::at_line(ln, "input line needs exactly one literal"));
        }
        define(def_lit(nums[0], ln)?, Lit::new(1 + i as u32, false), ln)?;
    }
    let mut raw_latches = Vec::with_capacity(h.latches);
    for i in 0..h.latches {
        let (ln, line) = reader.expect_line("latch")?;
        let nums = parse_numbers(line, ln, "latch literal")?;
        if nums.len() < 2 || nums.len() > 3 {
            return Err(Error::at_line(
                ln,
                "latch line needs a literal, next state and optional reset",
            ));
        }
        let var = def_lit(nums[0], ln)?;
        define(var, Lit::new((1 + h.inputs + i) as u32, false), ln)?;
        check_lit(nums[1], h.max_var, ln)?;
        raw_latches.push((nums[1], parse_init(&nums, nums[0], ln)?, ln));
    }
    let mut raw_outputs = Vec::with_capacity(h.outputs);
    for _ in 0..h.outputs {
        let (ln, line) = reader.expect_line("output")?;
        let nums = parse_numbers(line, ln, "output literal")?;
        if nums.len() != 1 {
            return Err(Error::at_line(ln, "output line needs exactly one literal"));
        }
        raw_outputs.push((check_lit(nums[0], h.max_var, ln)?, ln));
    }
    let mut raw_ands = Vec::with_capacity(h.ands);
    let mut and_index: HashMap<u64, usize> = HashMap::new();
    for _ in 0..h.ands {
        let (ln, line) = reader.expect_line("AND gate")?;
        let nums = parse_numbers(line, ln, "AND literal")?;
        if nums.len() != 3 {
            return Err(Error::at_line(ln, "AND line needs three literals"));
        }
        let var = def_lit(nums[0], ln)?;
        if map.contains_key(&var) || and_index.contains_key(&var) || var == 0 {
            return Err(Error::at_line(ln, format!("variable {var} defined twice")));
        }
        let f0 = check_lit(nums[1], h.max_var, ln)?;
        let f1 = check_lit(nums[2], h.max_var, ln)?;
        and_index.insert(var, raw_ands.len());
        raw_ands.push((var, f0, f1, ln));
    }

    // topological order, keeping file order when it already is one
    let base = (1 + h.inputs + h.latches) as u32;
    let mut state = vec![0u8; raw_ands.len()]; // 0 new, 1 open, 2 done
    let mut ands = Vec::with_capacity(raw_ands.len());
    for root in 0..raw_ands.len() {
        if state[root] != 0 {
            continue;
        }
        let mut stack = vec![(root, false)];
        while let Some((idx, expanded)) = stack.pop() {
            let (var, f0, f1, ln) = raw_ands[idx];
            if expanded {
                let resolve = |lit: u64| -> Result<Lit> {
                    lookup(&map, lit)
                        .ok_or_else(|| Error::at_line(ln, format!("literal {lit} is undefined")))
                };
                let node = AndNode {
                    fanin0: resolve(f0)?,
                    fanin1: resolve(f1)?,
                };
                map.insert(var, Lit::new(base + ands.len() as u32, false));
                ands.push(node);
                state[idx] = 2;
                continue;
            }
            if state[idx] == 2 {
                continue;
            }
            state[idx] = 1;
            stack.push((idx, true));
            for f in [f1, f0] {
                if let Some(&child) = and_index.get(&(f >> 1)) {
                    match state[child] {
                        0 => stack.push((child, false)),
                        1 => {
                            return Err(Error::at_line(
                                ln,
                                format!("combinational cycle through variable {var}"),
                            ))
                        }
                        _ => {}
                    }
                }
            }
        }
    }

    let resolve = |lit: u64, ln: usize| -> Result<Lit> {
        lookup(&map, lit).ok_or_else(|| Error::at_line(ln, format!("literal {lit} is undefined")))
    };
    let latches = raw_latches
        .iter()
        .map(|&(next, init, ln)| {
            Ok(Latch {
                next: resolve(next, ln)?,
                init,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let outputs = raw_outputs
        .iter()
        .map(|&(o, ln)| resolve(o, ln))
        .collect::<Result<Vec<_>>>()?;

    let mut aig = Aig {
        num_inputs: h.inputs,
        latches,
        ands,
        outputs,
        ..Default::default()
    };
    parse_symbols(reader, &mut aig)?;
    Ok(aig)
}

fn lookup(map: &HashMap<u64, Lit>, lit: u64) -> Option<Lit> {
    let var = lit >> 1;
    let base = if var == 0 {
        Some(Lit::FALSE)
    } else {
        map.get(&var).copied()
    };
    base.map(|l| l.xor(lit & 1 == 1))
}

fn parse_binary(reader: &mut LineReader<'_>, h: Header) -> Result<Aig> {
    let mut latches = Vec::with_capacity(h.latches);
    for i in 0..h.latches {
        let (ln, line) = reader.expect_line("latch")?;
        let nums = parse_numbers(line, ln, "latch literal")?;
        if nums.is_empty() || nums.len() > 2 {
            return Err(Error::at_line(
                ln,
                "binary latch line needs next state and optional reset",
            ));
        }
        let lit = 2 * (1 + h.inputs + i) as u64;
        let next = check_lit(nums[0], h.max_var, ln)?;
        let mut fields = vec![lit];
        fields.extend(&nums);
        latches.push(Latch {
            next: Lit::from_raw(next as u32),
            init: parse_init(&fields, lit, ln)?,
        });
    }
    let mut outputs = Vec::with_capacity(h.outputs);
    for _ in 0..h.outputs {
        let (ln, line) = reader.expect_line("output")?;
        let nums = parse_numbers(line, ln, "output literal")?;
        if nums.len() != 1 {
            return Err(Error::at_line(ln, "output line needs exactly one literal"));
        }
        outputs.push(Lit::from_raw(check_lit(nums[0], h.max_var, ln)? as u32));
    }
    let mut ands = Vec::with_capacity(h.ands);
    for i in 0..h.ands {
        let at = reader.pos;
        let lhs = 2 * (1 + h.inputs + h.latches + i) as u64;
        let d0 = reader.read_varint()?;
        let d1 = reader.read_varint()?;
        if d0 == 0 || d0 > lhs {
            return Err(Error::at_byte(
                at,
                format!("AND {lhs}: non-monotone first delta {d0}"),
            ));
        }
        let rhs0 = lhs - d0;
        if d1 > rhs0 {
            return Err(Error::at_byte(
                at,
                format!("AND {lhs}: non-monotone second delta {d1}"),
            ));
        }
        let rhs1 = rhs0 - d1;
        ands.push(AndNode {
            fanin0: Lit::from_raw(rhs0 as u32),
            fanin1: Lit::from_raw(rhs1 as u32),
        });
    }
    // the symbol table starts right after the AND bytes
    reader.line = 0;
    let mut aig = Aig {
        num_inputs: h.inputs,
        latches,
        ands,
        outputs,
        ..Default::default()
    };
    parse_symbols(reader, &mut aig)?;
    Ok(aig)
}

fn parse_symbols(reader: &mut LineReader<'_>, aig: &mut Aig) -> Result<()> {
    let mut symbols = Symbols {
        inputs: vec![None; aig.num_inputs],
        latches: vec![None; aig.latches.len()],
        outputs: vec![None; aig.outputs.len()],
    };
    while let Some((ln, line)) = reader.next_line() {
        if line == "c" {
            while let Some((_, comment)) = reader.next_line() {
                aig.comments.push(comment.to_owned());
            }
            break;
        }
        if line.is_empty() {
            continue;
        }
        let (tag, rest) = line.split_once(' ').unwrap_or((line, ""));
        let kind = tag.as_bytes()[0];
        let idx: usize = tag[1..]
            .parse()
            .map_err(|_| Error::at_line(ln, format!("invalid symbol table entry `{line}`")))?;
        let table = match kind {
            b'i' => &mut symbols.inputs,
            b'l' => &mut symbols.latches,
            b'o' => &mut symbols.outputs,
            b'b' | b'c' | b'j' | b'f' => {
                return Err(Error::Unsupported(format!(
                    "symbol `{tag}` for an extended section"
                )))
            }
            _ => {
                return Err(Error::at_line(
                    ln,
                    format!("invalid symbol table entry `{line}`"),
                ))
            }
        };
        let slot = table
            .get_mut(idx)
            .ok_or_else(|| Error::at_line(ln, format!("symbol index {idx} out of range")))?;
        *slot = Some(rest.to_owned());
    }
    aig.symbols = symbols;
    Ok(())
}

/// Serializes in ascii AIGER with canonical numbering.
pub fn write_ascii(aig: &Aig) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "aag {} {} {} {} {}",
        aig.max_var(),
        aig.num_inputs,
        aig.latches.len(),
        aig.outputs.len(),
        aig.ands.len()
    );
    for i in 0..aig.num_inputs {
        let _ = writeln!(out, "{}", aig.input_lit(i).raw());
    }
    for (i, latch) in aig.latches.iter().enumerate() {
        let lit = aig.latch_lit(i).raw();
        let _ = write!(out, "{lit} {}", latch.next.raw());
        write_init(&mut out, latch.init, lit);
        out.push('\n');
    }
    for o in &aig.outputs {
        let _ = writeln!(out, "{}", o.raw());
    }
    for (i, and) in aig.ands.iter().enumerate() {
        let _ = writeln!(
            out,
            "{} {} {}",
            aig.and_lit(i).raw(),
            and.fanin0.raw(),
            and.fanin1.raw()
        );
    }
    write_symbols(&mut out, aig);
    out
}

/// Serializes in binary AIGER. AND fanins are written larger first, as the
/// delta encoding requires.
pub fn write_binary(aig: &Aig) -> Vec<u8> {
    let mut head = String::new();
    let _ = writeln!(
        head,
        "aig {} {} {} {} {}",
        aig.max_var(),
        aig.num_inputs,
        aig.latches.len(),
        aig.outputs.len(),
        aig.ands.len()
    );
    for (i, latch) in aig.latches.iter().enumerate() {
        let _ = write!(head, "{}", latch.next.raw());
        write_init(&mut head, latch.init, aig.latch_lit(i).raw());
        head.push('\n');
    }
    for o in &aig.outputs {
        let _ = writeln!(head, "{}", o.raw());
    }
    let mut out = head.into_bytes();
    for (i, and) in aig.ands.iter().enumerate() {
        let lhs = aig.and_lit(i).raw();
        let (hi, lo) = if and.fanin0 >= and.fanin1 {
            (and.fanin0.raw(), and.fanin1.raw())
        } else {
            (and.fanin1.raw(), and.fanin0.raw())
        };
        push_varint(&mut out, lhs - hi);
        push_varint(&mut out, hi - lo);
    }
    let mut tail = String::new();
    write_symbols(&mut tail, aig);
    out.extend(tail.into_bytes());
    out
}

fn write_init(out: &mut String, init: LatchInit, lit: u32) {
    match init {
        LatchInit::Zero => {}
        LatchInit::One => out.push_str(" 1"),
        LatchInit::Unknown => {
            let _ = write!(out, " {lit}");
        }
    }
}

fn push_varint(out: &mut Vec<u8>, mut x: u32) {
    while x >= 0x80 {
        out.push((x & 0x7f) as u8 | 0x80);
        x >>= 7;
    }
    out.push(x as u8);
}

fn write_symbols(out: &mut String, aig: &Aig) {
    let tables = [
        ('i', &aig.symbols.inputs),
        ('l', &aig.symbols.latches),
        ('o', &aig.symbols.outputs),
    ];
    for (tag, names) in tables {
        for (i, name) in names.iter().enumerate() {
            if let Some(name) = name {
                let _ = writeln!(out, "{tag}{i} {name}");
            }
        }
    }
    if !aig.comments.is_empty() {
        out.push_str("c\n");
        for c in &aig.comments {
            out.push_str(c);
            out.push('\n');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Location;

    #[test]
    fn empty_header() {
        let aig = parse_aiger(b"aag 0 0 0 0 0\n", AigerFormat::Ascii).unwrap();
        assert_eq!(aig.num_inputs, 0);
        assert!(aig.ands.is_empty());
        assert!(aig.outputs.is_empty());
    }

    #[test]
    fn self_and_is_kept_before_normalization() {
        let aig = parse_aiger(b"aag 2 1 0 1 1\n2\n4\n4 2 2\n", AigerFormat::Ascii).unwrap();
        assert_eq!(aig.ands.len(), 1);
        assert_eq!(aig.ands[0].fanin0, aig.ands[0].fanin1);
    }

    #[test]
    fn ascii_renumbers_out_of_order_gates() {
        // gate 6 uses gate 8, which is listed after it
        let text = b"aag 4 2 0 1 2\n2\n4\n6\n6 8 2\n8 2 5\n";
        let aig = parse_aiger(text, AigerFormat::Ascii).unwrap();
        assert_eq!(
            aig.ands[0],
            AndNode {
                fanin0: Lit::from_raw(2),
                fanin1: Lit::from_raw(5)
            }
        );
        assert_eq!(
            aig.ands[1],
            AndNode {
                fanin0: Lit::from_raw(6),
                fanin1: Lit::from_raw(2)
            }
        );
        assert_eq!(aig.outputs, vec![Lit::from_raw(8)]);
    }

    #[test]
    fn literal_out_of_range_reports_line() {
        let err = parse_aiger(b"aag 1 1 0 1 0\n2\n9\n", AigerFormat::Ascii).unwrap_err();
        match err {
            Error::Parse { location, .. } => assert_eq!(location, Location::Line(3)),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn malformed_header() {
        assert!(parse_aiger(b"aag 1 x 0 0 0\n", AigerFormat::Ascii).is_err());
        assert!(parse_aiger(b"aig 0 0 0 0 0\n", AigerFormat::Ascii).is_err());
        assert!(parse_aiger(b"aag 0 1 0 0 0\n2\n", AigerFormat::Ascii).is_err());
        assert!(matches!(
            parse_aiger(b"aag 1 1 0 0 0 1\n2\n", AigerFormat::Ascii),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn binary_non_monotone_reports_byte() {
        // lhs 6, first delta 0 is illegal
        let mut bytes = b"aig 3 2 0 1 1\n6\n".to_vec();
        let offset = bytes.len();
        bytes.extend([0u8, 2]);
        match parse_aiger(&bytes, AigerFormat::Binary).unwrap_err() {
            Error::Parse { location, .. } => assert_eq!(location, Location::Byte(offset)),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn binary_roundtrip_with_latch_and_symbols() {
        let text = b"aag 4 1 1 1 2\n2\n4 9 1\n8\n6 4 2\n8 7 3\ni0 x\nl0 q\no0 y\nc\nhello\n";
        let aig = parse_aiger(text, AigerFormat::Ascii).unwrap();
        let bin = write_binary(&aig);
        let back = parse_aiger(&bin, AigerFormat::Binary).unwrap();
        assert_eq!(back, aig);
        assert_eq!(write_ascii(&back).as_bytes(), &text[..]);
    }

    #[test]
    fn unknown_init_is_the_latch_literal() {
        let aig = parse_aiger(b"aag 1 0 1 0 0\n2 3 2\n", AigerFormat::Ascii).unwrap();
        assert_eq!(aig.latches[0].init, LatchInit::Unknown);
        assert_eq!(write_ascii(&aig), "aag 1 0 1 0 0\n2 3 2\n");
    }
}
