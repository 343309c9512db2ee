//! Text formats.
//!
//! Family files are UTF-8, one subset per line as ascending comma-separated
//! element indices, `-` for the empty set, `#` starting a comment, and a
//! header line `n=<int>` before the first subset.
//!
//! Integer-set literals over `{0..n}` are unions (`∪`, `|` or `U`) of terms:
//! `{a,b,c}` (entries may be ranges `lo..hi`), `[lo..hi]`, `complement{...}` or
//! `complement(expr)`, and the names `evens`, `odds`, `all`, `none`.

use std::fmt::Write as _;

use super::family::{Family, GroundSet, SubsetMask};
use super::intset::IntSet;
use crate::error::{Error, Result};

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

pub fn parse_family(text: &str) -> Result<Family> {
    let mut ground: Option<GroundSet> = None;
    let mut members = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("n=") {
            if ground.is_some() {
                return Err(parse_err(format!("line {}: duplicate header", lineno + 1)));
            }
            let n: usize = rest
                .trim()
                .parse()
                .map_err(|_| parse_err(format!("line {}: bad header {line:?}", lineno + 1)))?;
            ground = Some(GroundSet::new(n)?);
            continue;
        }
        let g = ground.ok_or_else(|| parse_err(format!("line {}: subset before n= header", lineno + 1)))?;
        if line == "-" {
            members.push(SubsetMask::EMPTY);
            continue;
        }
        let mut elements = Vec::new();
        for tok in line.split(',') {
            let x: usize = tok
                .trim()
                .parse()
                .map_err(|_| parse_err(format!("line {}: bad element {tok:?}", lineno + 1)))?;
            if elements.last().is_some_and(|&p| p >= x) {
                return Err(parse_err(format!("line {}: elements must be strictly ascending", lineno + 1)));
            }
            elements.push(x);
        }
        members.push(SubsetMask::from_elements(g, elements)?);
    }
    let ground = ground.ok_or_else(|| parse_err("missing n= header"))?;
    Family::new(ground, members)
}

pub fn write_family(family: &Family) -> String {
    let mut out = String::new();
    writeln!(out, "n={}", family.n()).unwrap();
    for m in family.members() {
        if m.is_empty() {
            out.push_str("-\n");
        } else {
            let els: Vec<String> = m.elements().iter().map(|x| x.to_string()).collect();
            out.push_str(&els.join(","));
            out.push('\n');
        }
    }
    out
}

/// Parses an integer-set literal over `{0..n}`.
pub fn parse_intset(text: &str, n: usize) -> Result<IntSet> {
    let mut p = Parser { s: text, pos: 0, n };
    let set = p.expr()?;
    p.skip_ws();
    if p.pos != p.s.len() {
        return Err(parse_err(format!("unexpected trailing input at {:?}", &p.s[p.pos..])));
    }
    Ok(set)
}

/// Canonical literal: `{a,b,c}`.
pub fn format_intset(set: &IntSet) -> String {
    set.to_string()
}

struct Parser<'a> {
    s: &'a str,
    pos: usize,
    n: usize,
}

impl Parser<'_> {
    fn rest(&self) -> &str {
        &self.s[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.s.len() - trimmed.len();
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(parse_err(format!("expected {tok:?} at {:?}", self.rest())))
        }
    }

    fn expr(&mut self) -> Result<IntSet> {
        let mut acc = self.term()?;
        while self.eat("∪") || self.eat("|") || self.eat("U ") {
            acc = acc.union(&self.term()?)?;
        }
        Ok(acc)
    }

    fn number(&mut self) -> Result<usize> {
        self.skip_ws();
        let digits: String = self.rest().chars().take_while(|c| c.is_ascii_digit()).collect();
        if digits.is_empty() {
            return Err(parse_err(format!("expected a number at {:?}", self.rest())));
        }
        self.pos += digits.len();
        digits.parse().map_err(|_| parse_err(format!("number out of range: {digits}")))
    }

    fn range_into(&mut self, set: &mut IntSet) -> Result<()> {
        let lo = self.number()?;
        let hi = if self.eat("..") { self.number()? } else { lo };
        if lo > hi {
            return Err(parse_err(format!("empty range {lo}..{hi}")));
        }
        for x in lo..=hi {
            set.insert(x)?;
        }
        Ok(())
    }

    fn term(&mut self) -> Result<IntSet> {
        let n = self.n;
        if self.eat("complement") {
            let inner = if self.eat("(") {
                let e = self.expr()?;
                self.expect(")")?;
                e
            } else {
                self.term()?
            };
            return Ok(inner.complement());
        }
        if self.eat("{") {
            let mut set = IntSet::empty(n);
            if self.eat("}") {
                return Ok(set);
            }
            loop {
                self.range_into(&mut set)?;
                if self.eat("}") {
                    return Ok(set);
                }
                self.expect(",")?;
            }
        }
        if self.eat("[") {
            let mut set = IntSet::empty(n);
            self.range_into(&mut set)?;
            self.expect("]")?;
            return Ok(set);
        }
        if self.eat("(") {
            let e = self.expr()?;
            self.expect(")")?;
            return Ok(e);
        }
        for (name, pick) in [
            ("evens", (|x: usize| x.is_multiple_of(2)) as fn(usize) -> bool),
            ("odds", |x| x % 2 == 1),
            ("all", |_| true),
            ("none", |_| false),
        ] {
            if self.eat(name) {
                return IntSet::from_elements(n, (0..=n).filter(|&x| pick(x)));
            }
        }
        Err(parse_err(format!("unrecognised set term at {:?}", self.rest())))
    }
}
