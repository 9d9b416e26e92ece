//! Plain-text tableau snapshots.
//!
//! ```text
//! tableau L=<n> k=<k>
//! <sign> <x words hex> <z words hex>     (2L rows)
//! ```
//! Words are written most significant first, 16 hex digits each.

use std::fmt::Write;

use super::Tableau;
use crate::error::{Error, Result};

impl Tableau {
    pub fn snapshot(&self) -> String {
        let mut s = format!("tableau L={} k={}\n", self.n, self.k);
        for r in 0..2 * self.n {
            s.push(if self.signs[r] { '-' } else { '+' });
            let row = self.row(r);
            for half in [&row[..self.words], &row[self.words..]] {
                s.push(' ');
                for w in half.iter().rev() {
                    write!(s, "{w:016x}").expect("writing to a string");
                }
            }
            s.push('\n');
        }
        s
    }

    pub fn from_snapshot(text: &str) -> Result<Self> {
        let bad = |m: &str| Error::Parse(format!("tableau snapshot: {m}"));
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| bad("empty input"))?;
        let mut fields = header.split_whitespace();
        if fields.next() != Some("tableau") {
            return Err(bad("missing header"));
        }
        let mut field = |key: &str| -> Result<usize> {
            let f = fields.next().ok_or_else(|| bad("short header"))?;
            f.strip_prefix(key).and_then(|v| v.parse().ok()).ok_or_else(|| bad("malformed header"))
        };
        let n = field("L=")?;
        let k = field("k=")?;
        if n == 0 || k > n {
            return Err(bad("invalid sizes"));
        }
        let words = n.div_ceil(64);
        let mut t = Tableau { n, k, words, bits: vec![0; 4 * n * words], signs: vec![false; 2 * n] };
        for r in 0..2 * n {
            let line = lines.next().ok_or_else(|| bad("missing rows"))?;
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 3 || !matches!(parts[0], "+" | "-") {
                return Err(bad("malformed row"));
            }
            t.signs[r] = parts[0] == "-";
            for (h, hex) in parts[1..].iter().enumerate() {
                if hex.len() != 16 * words {
                    return Err(bad("row width"));
                }
                for i in 0..words {
                    let chunk = &hex[16 * (words - 1 - i)..16 * (words - i)];
                    let v = u64::from_str_radix(chunk, 16).map_err(|_| bad("hex digits"))?;
                    t.row_mut(r)[h * words + i] = v;
                }
            }
        }
        if n % 64 != 0 {
            let mask = !((1u64 << (n % 64)) - 1);
            if t.bits.chunks(words).any(|c| c[words - 1] & mask != 0) {
                return Err(bad("bits beyond L"));
            }
        }
        t.check_invariants()?;
        Ok(t)
    }
}
