//! Integer expressions for numeric flags: `1000`, `2^64`, `3*2^10+1`, `(2^8-1)^2`.

use anyhow::{bail, Result};
use num_traits::{ToPrimitive, Zero};
use phfkit::BigInt;

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<BigInt> {
        let mut acc = self.term()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if op == b'+' { acc + rhs } else { acc - rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<BigInt> {
        let mut acc = self.power()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc *= self.power()?;
        }
        Ok(acc)
    }

    // right associative: 2^3^2 = 2^9
    fn power(&mut self) -> Result<BigInt> {
        let base = self.atom()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        let exp = self.power()?;
        let Some(e) = exp.to_u32().filter(|e| *e <= 1 << 20) else {
            bail!("exponent {exp} is out of range");
        };
        Ok(num_traits::pow(base, e as usize))
    }

    fn atom(&mut self) -> Result<BigInt> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(b')') {
                    bail!("missing `)`");
                }
                self.pos += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_digit() || c == b'_') {
                    self.pos += 1;
                }
                let digits: String = std::str::from_utf8(&self.src[start..self.pos])?.replace('_', "");
                Ok(digits.parse()?)
            }
            Some(c) => bail!("unexpected `{}`", c as char),
            None => bail!("unexpected end of expression"),
        }
    }
}

pub fn parse_int(text: &str) -> Result<BigInt> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        bail!("empty number");
    }
    let mut p = Parser { src: compact.as_bytes(), pos: 0 };
    let v = p.expr().map_err(|e| anyhow::anyhow!("bad number `{text}`: {e}"))?;
    if p.pos != compact.len() {
        bail!("bad number `{text}`: trailing input at offset {}", p.pos);
    }
    Ok(v)
}

pub fn parse_u64(text: &str) -> Result<u64> {
    let v = parse_int(text)?;
    match v.to_u64() {
        Some(x) => Ok(x),
        None if v < BigInt::zero() => bail!("`{text}` must be nonnegative"),
        None => bail!("`{text}` = {v} does not fit in 64 bits"),
    }
}

/// Comma-separated expressions; surrounding brackets or parentheses are ignored.
pub fn parse_list(text: &str) -> Result<Vec<BigInt>> {
    let inner = text.trim().trim_start_matches(['(', '[', '{']).trim_end_matches([')', ']', '}']);
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    inner.split(',').map(parse_int).collect()
}
