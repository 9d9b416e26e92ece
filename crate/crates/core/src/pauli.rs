//! Single-site Pauli operators and signed Pauli strings.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    /// Index in the order I, X, Y, Z.
    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(c: u8) -> Pauli {
        Pauli::ALL[(c & 3) as usize]
    }

    /// Symplectic bits `(x, z)`; Y carries both.
    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    /// Row-major 2x2 matrix.
    pub fn matrix(self) -> [Complex64; 4] {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match self {
            Pauli::I => [l, o, o, l],
            Pauli::X => [o, l, l, o],
            Pauli::Y => [o, -i, i, o],
            Pauli::Z => [l, o, o, -l],
        }
    }

    pub fn dense(self) -> crate::linalg::CMatrix {
        crate::linalg::CMatrix::from_vec(2, self.matrix().to_vec()).expect("2x2")
    }

    fn symbol(self) -> char {
        ['I', 'X', 'Y', 'Z'][self as usize]
    }
}

/// A Hermitian Pauli string `±P_0 ⊗ P_1 ⊗ … ⊗ P_{L-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    pub negative: bool,
    pub ops: Vec<Pauli>,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        Self { negative: false, ops: vec![Pauli::I; n] }
    }

    /// `p` on `site`, identity elsewhere.
    pub fn single(n: usize, site: usize, p: Pauli) -> Self {
        let mut s = Self::identity(n);
        s.ops[site] = p;
        s
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.ops.iter().all(|&p| p == Pauli::I)
    }

    pub fn weight(&self) -> usize {
        self.ops.iter().filter(|&&p| p != Pauli::I).count()
    }

    /// Leftmost non-identity site.
    pub fn left_end(&self) -> Option<usize> {
        self.ops.iter().position(|&p| p != Pauli::I)
    }

    /// Rightmost non-identity site.
    pub fn right_end(&self) -> Option<usize> {
        self.ops.iter().rposition(|&p| p != Pauli::I)
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let anti = self
            .ops
            .iter()
            .zip(&other.ops)
            .filter(|(a, b)| **a != Pauli::I && **b != Pauli::I && a != b)
            .count();
        anti % 2 == 0
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", if self.negative { '-' } else { '+' })?;
        for p in &self.ops {
            write!(f, "{}", p.symbol())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Accepts an optional leading sign followed by letters from `IXYZ`
    /// (`_` is read as identity).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (negative, body) = match s.as_bytes().first() {
            Some(b'-') => (true, &s[1..]),
            Some(b'+') => (false, &s[1..]),
            _ => (false, s),
        };
        if body.is_empty() {
            return Err(Error::MalformedPauli(s.to_string()));
        }
        let ops = body
            .chars()
            .map(|c| match c {
                'I' | '_' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                _ => Err(Error::MalformedPauli(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { negative, ops })
    }
}
