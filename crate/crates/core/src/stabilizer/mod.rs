//! Bit-packed stabilizer tableaus for Clifford circuits with measurements.
//!
//! The tableau always holds a full symplectic basis of `2L` rows. Row `i`
//! and row `L + i` form a conjugate pair: for `i < k` they are the
//! destabilizer and stabilizer of generator `i`, and for `i ≥ k` they are a
//! pair of logical operators of the mixed state. Every row commutes with
//! every other row except its partner. Keeping the logical pairs makes each
//! measurement linear in `L` even when `k < L`.

mod dynamics;
mod gf2;
mod snapshot;

use std::sync::OnceLock;

use rand::Rng;

pub use dynamics::{
    delta_s_profile, measurement_only_ising, reference_qubit_run, run_hybrid, spin_glass_order, tmi_quarters,
    HybridParams, IsingParams, IsingResult, MonitoredRunResult,
};

use crate::circuit::{CliffordGate, CliffordTable2, Circuit, Event, Gate, LocalPauli};
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString};

/// Initial tableau states.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    /// Every qubit in `Z = +1`.
    AllUp,
    /// Every qubit in `X = +1`.
    AllPlus,
    /// `k = 0`.
    MaximallyMixed,
    /// Stabilized by `m_i Z_i Z_{i+1}` for the `L − 1` bonds of the open
    /// chain and by `Π X_i`; `m_i = ±1`. This is a cat state of two opposite
    /// spin patterns.
    Glassy(Vec<i8>),
}

/// How a measurement outcome was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureKind {
    /// The observable anticommuted with a stabilizer; `k` unchanged.
    Random,
    /// `±P` was already in the stabilizer group.
    Deterministic,
    /// `P` was independent of a mixed state's group and has been appended.
    Purifying,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PauliMeasurement {
    /// +1 or −1.
    pub outcome: i8,
    pub kind: MeasureKind,
}

impl PauliMeasurement {
    pub fn was_random(&self) -> bool {
        self.kind != MeasureKind::Deterministic
    }
}

/// Stabilizer (or mixed stabilizer) state on `n` qubits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tableau {
    n: usize,
    k: usize,
    words: usize,
    /// `2n` rows of `2·words` words: X bits then Z bits.
    bits: Vec<u64>,
    signs: Vec<bool>,
}

#[inline]
fn parity(x: u32) -> bool {
    x & 1 == 1
}

/// Packed Pauli operator used as a scratch row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct PackedPauli {
    pub(crate) bits: Vec<u64>,
    pub(crate) sign: bool,
}

impl PackedPauli {
    pub(crate) fn from_string(p: &PauliString, words: usize) -> Self {
        let mut bits = vec![0u64; 2 * words];
        for (j, op) in p.ops.iter().enumerate() {
            let (x, z) = op.bits();
            if x {
                bits[j / 64] |= 1 << (j % 64);
            }
            if z {
                bits[words + j / 64] |= 1 << (j % 64);
            }
        }
        Self { bits, sign: p.negative }
    }
}

/// Phase bookkeeping for `a ← a·b` of Y-form Hermitian Paulis; returns the
/// new sign. Both operands must commute.
#[inline]
fn product_sign(a: &[u64], sa: bool, b: &[u64], sb: bool, words: usize) -> bool {
    let (ax, az) = a.split_at(words);
    let (bx, bz) = b.split_at(words);
    let mut c: u32 = 2 * sa as u32 + 2 * sb as u32;
    for w in 0..words {
        let (nx, nz) = (ax[w] ^ bx[w], az[w] ^ bz[w]);
        c = c
            .wrapping_add((ax[w] & az[w]).count_ones())
            .wrapping_add((bx[w] & bz[w]).count_ones())
            .wrapping_add(2 * (az[w] & bx[w]).count_ones())
            .wrapping_sub((nx & nz).count_ones());
    }
    debug_assert!(c.is_multiple_of(2), "product of anticommuting rows");
    c % 4 == 2
}

#[inline]
fn anticommute(a: &[u64], b: &[u64], words: usize) -> bool {
    let (ax, az) = a.split_at(words);
    let (bx, bz) = b.split_at(words);
    let mut acc = 0u32;
    for w in 0..words {
        acc += ((ax[w] & bz[w]) ^ (az[w] & bx[w])).count_ones();
    }
    parity(acc)
}

fn cached(cell: &'static OnceLock<CliffordGate>, f: fn() -> CliffordGate) -> &'static CliffordGate {
    cell.get_or_init(f)
}

fn hadamard_gate() -> &'static CliffordGate {
    static G: OnceLock<CliffordGate> = OnceLock::new();
    cached(&G, || CliffordGate::from_images(vec![LocalPauli::new(0b10, false), LocalPauli::new(0b01, false)]).unwrap())
}

fn phase_gate() -> &'static CliffordGate {
    static G: OnceLock<CliffordGate> = OnceLock::new();
    cached(&G, || CliffordGate::from_images(vec![LocalPauli::new(0b11, false), LocalPauli::new(0b10, false)]).unwrap())
}

fn cnot_gate() -> &'static CliffordGate {
    static G: OnceLock<CliffordGate> = OnceLock::new();
    // X0 -> X0 X1, Z0 -> Z0, X1 -> X1, Z1 -> Z0 Z1
    cached(&G, || {
        CliffordGate::from_images(vec![
            LocalPauli::new(0b0101, false),
            LocalPauli::new(0b0010, false),
            LocalPauli::new(0b0100, false),
            LocalPauli::new(0b1010, false),
        ])
        .unwrap()
    })
}

fn cz_gate() -> &'static CliffordGate {
    static G: OnceLock<CliffordGate> = OnceLock::new();
    cached(&G, || {
        CliffordGate::from_images(vec![
            LocalPauli::new(0b1001, false),
            LocalPauli::new(0b0010, false),
            LocalPauli::new(0b0110, false),
            LocalPauli::new(0b1000, false),
        ])
        .unwrap()
    })
}

impl Tableau {
    pub fn new(n: usize, init: &InitialState) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("tableau needs at least one qubit".into()));
        }
        let words = n.div_ceil(64);
        let mut t = Self { n, k: 0, words, bits: vec![0; 4 * n * words], signs: vec![false; 2 * n] };
        let (lo_x, k) = match init {
            InitialState::AllUp => (true, n),
            InitialState::AllPlus => (false, n),
            InitialState::MaximallyMixed => (true, 0),
            InitialState::Glassy(m) => return Self::glassy(n, m),
        };
        for i in 0..n {
            let (lo_word, hi_word) = if lo_x { (0, words) } else { (words, 0) };
            t.row_mut(i)[lo_word + i / 64] |= 1 << (i % 64);
            t.row_mut(n + i)[hi_word + i / 64] |= 1 << (i % 64);
        }
        t.k = k;
        Ok(t)
    }

    fn glassy(n: usize, m: &[i8]) -> Result<Self> {
        if n < 2 || m.len() != n - 1 || m.iter().any(|&v| v != 1 && v != -1) {
            return Err(Error::InvalidParameter("glassy state needs one ±1 sign per bond".into()));
        }
        let mut gens: Vec<PauliString> = (0..n - 1)
            .map(|i| {
                let mut p = PauliString::identity(n);
                p.ops[i] = Pauli::Z;
                p.ops[i + 1] = Pauli::Z;
                p.negative = m[i] < 0;
                p
            })
            .collect();
        gens.push(PauliString { negative: false, ops: vec![Pauli::X; n] });
        Self::from_stabilizers(n, &gens)
    }

    /// Tableau whose stabilizer group is generated by `gens`, which must be
    /// independent and mutually commuting. Destabilizers and logical pairs
    /// are completed by symplectic Gram-Schmidt.
    pub fn from_stabilizers(n: usize, gens: &[PauliString]) -> Result<Self> {
        if gens.iter().any(|g| g.ops.len() != n) {
            return Err(Error::MalformedPauli(format!("generators must act on {n} qubits")));
        }
        if gens.len() > n {
            return Err(Error::InvalidParameter("more generators than qubits".into()));
        }
        let words = n.div_ceil(64);
        let mut stabs: Vec<PackedPauli> = gens.iter().map(|g| PackedPauli::from_string(g, words)).collect();
        let mut pool: Vec<PackedPauli> = (0..2 * n)
            .map(|c| {
                let mut p = PauliString::identity(n);
                p.ops[c % n] = if c < n { Pauli::X } else { Pauli::Z };
                PackedPauli::from_string(&p, words)
            })
            .collect();
        let mul = |a: &mut PackedPauli, b: &PackedPauli| {
            a.sign = product_sign(&a.bits, a.sign, &b.bits, b.sign, words);
            a.bits.iter_mut().zip(&b.bits).for_each(|(x, y)| *x ^= y);
        };
        // Pauli products of anticommuting rows pick up ±i; the pool rows'
        // signs are irrelevant, so multiply unsigned for those.
        let mul_unsigned = |a: &mut PackedPauli, b: &PackedPauli| {
            a.bits.iter_mut().zip(&b.bits).for_each(|(x, y)| *x ^= y);
        };
        let mut destabs = Vec::with_capacity(stabs.len());
        for i in 0..stabs.len() {
            if stabs[i].bits.iter().all(|&w| w == 0) {
                return Err(Error::InvalidParameter("stabilizer generators are not independent".into()));
            }
            for j in 0..i {
                if anticommute(&stabs[i].bits, &stabs[j].bits, words) {
                    return Err(Error::InvalidParameter("stabilizer generators do not commute".into()));
                }
            }
            let pos = pool
                .iter()
                .position(|p| anticommute(&p.bits, &stabs[i].bits, words))
                .ok_or_else(|| Error::InvalidParameter("stabilizer generators are not independent".into()))?;
            let d = pool.swap_remove(pos);
            let s = stabs[i].clone();
            for v in pool.iter_mut() {
                let with_s = anticommute(&v.bits, &s.bits, words);
                let with_d = anticommute(&v.bits, &d.bits, words);
                if with_s {
                    mul_unsigned(v, &d);
                }
                if with_d {
                    mul_unsigned(v, &s);
                }
            }
            for later in stabs[i + 1..].iter_mut() {
                if anticommute(&later.bits, &d.bits, words) {
                    mul(later, &s);
                }
            }
            destabs.push(d);
        }
        let k = stabs.len();
        let mut logical = Vec::new();
        pool.retain(|p| p.bits.iter().any(|&w| w != 0));
        while let Some(a) = pool.pop() {
            let Some(pos) = pool.iter().position(|p| anticommute(&p.bits, &a.bits, words)) else {
                continue;
            };
            let b = pool.swap_remove(pos);
            for v in pool.iter_mut() {
                let with_a = anticommute(&v.bits, &a.bits, words);
                let with_b = anticommute(&v.bits, &b.bits, words);
                if with_a {
                    mul_unsigned(v, &b);
                }
                if with_b {
                    mul_unsigned(v, &a);
                }
            }
            pool.retain(|p| p.bits.iter().any(|&w| w != 0));
            logical.push((a, b));
        }
        if logical.len() != n - k {
            return Err(Error::NumericalDegeneracy("symplectic completion failed".into()));
        }
        let mut t = Self { n, k, words, bits: vec![0; 4 * n * words], signs: vec![false; 2 * n] };
        let rows = destabs.into_iter().zip(stabs).chain(logical);
        for (i, (lo, hi)) in rows.enumerate() {
            t.row_mut(i).copy_from_slice(&lo.bits);
            t.row_mut(n + i).copy_from_slice(&hi.bits);
            t.signs[i] = false;
            t.signs[n + i] = if i < k { hi.sign } else { false };
        }
        t.check_invariants()?;
        Ok(t)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    /// Number of independent stabilizer generators.
    pub fn rank(&self) -> usize {
        self.k
    }

    pub fn is_pure(&self) -> bool {
        self.k == self.n
    }

    /// `L − k` bits.
    pub fn purification_entropy(&self) -> usize {
        self.n - self.k
    }

    #[inline]
    fn row(&self, r: usize) -> &[u64] {
        let w2 = 2 * self.words;
        &self.bits[r * w2..(r + 1) * w2]
    }

    #[inline]
    fn row_mut(&mut self, r: usize) -> &mut [u64] {
        let w2 = 2 * self.words;
        &mut self.bits[r * w2..(r + 1) * w2]
    }

    #[inline]
    fn get_x(&self, r: usize, q: usize) -> bool {
        self.bits[r * 2 * self.words + q / 64] >> (q % 64) & 1 == 1
    }

    #[inline]
    fn get_z(&self, r: usize, q: usize) -> bool {
        self.bits[r * 2 * self.words + self.words + q / 64] >> (q % 64) & 1 == 1
    }

    fn row_string(&self, r: usize) -> PauliString {
        let ops = (0..self.n).map(|q| Pauli::from_bits(self.get_x(r, q), self.get_z(r, q))).collect();
        PauliString { negative: self.signs[r], ops }
    }

    /// Current stabilizer generators.
    pub fn stabilizers(&self) -> Vec<PauliString> {
        (0..self.k).map(|i| self.row_string(self.n + i)).collect()
    }

    pub fn destabilizers(&self) -> Vec<PauliString> {
        (0..self.k).map(|i| self.row_string(i)).collect()
    }

    /// `row_h ← row_h · row_i`; the rows must commute.
    fn rowmul(&mut self, h: usize, i: usize) {
        let w2 = 2 * self.words;
        let (hs, is) = (h * w2, i * w2);
        let sign = product_sign(&self.bits[hs..hs + w2], self.signs[h], &self.bits[is..is + w2], self.signs[i], self.words);
        self.signs[h] = sign;
        for w in 0..w2 {
            let v = self.bits[is + w];
            self.bits[hs + w] ^= v;
        }
    }

    fn set_row(&mut self, r: usize, p: &PackedPauli) {
        self.row_mut(r).copy_from_slice(&p.bits);
        self.signs[r] = p.sign;
    }

    fn copy_row(&mut self, dst: usize, src: usize) {
        let w2 = 2 * self.words;
        self.bits.copy_within(src * w2..(src + 1) * w2, dst * w2);
        self.signs[dst] = self.signs[src];
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let w2 = 2 * self.words;
        for w in 0..w2 {
            self.bits.swap(a * w2 + w, b * w2 + w);
        }
        self.signs.swap(a, b);
    }

    /// Conjugates every row by a one- or two-qubit Clifford on `sites`.
    pub fn apply_clifford(&mut self, gate: &CliffordGate, sites: &[usize]) -> Result<()> {
        if sites.len() != gate.arity() {
            return Err(Error::DimensionMismatch { expected: gate.arity(), got: sites.len() });
        }
        for (i, &s) in sites.iter().enumerate() {
            if s >= self.n || sites[..i].contains(&s) {
                return Err(Error::InvalidRegion(format!("bad gate site {s}")));
            }
        }
        if let (Some(t), &[a, b]) = (CliffordTable2::from_gate(gate), sites) {
            self.apply_table2(&t, a, b);
            return Ok(());
        }
        let w = self.words;
        let w2 = 2 * w;
        let loc: Vec<(usize, u64)> = sites.iter().map(|&s| (s / 64, 1u64 << (s % 64))).collect();
        for r in 0..2 * self.n {
            let base = r * w2;
            let mut pat = 0u8;
            for (j, &(wd, m)) in loc.iter().enumerate() {
                pat |= ((self.bits[base + wd] & m != 0) as u8) << (2 * j);
                pat |= ((self.bits[base + w + wd] & m != 0) as u8) << (2 * j + 1);
            }
            if pat == 0 {
                continue;
            }
            let img = gate.conjugate(pat);
            for (j, &(wd, m)) in loc.iter().enumerate() {
                let (x, z) = (img.pattern >> (2 * j) & 1 == 1, img.pattern >> (2 * j + 1) & 1 == 1);
                let xw = &mut self.bits[base + wd];
                *xw = if x { *xw | m } else { *xw & !m };
                let zw = &mut self.bits[base + w + wd];
                *zw = if z { *zw | m } else { *zw & !m };
            }
            self.signs[r] ^= img.negative;
        }
        Ok(())
    }

    /// Two-qubit Clifford given by its conjugation table.
    pub fn apply_clifford2(&mut self, table: &CliffordTable2, a: usize, b: usize) -> Result<()> {
        if a >= self.n || b >= self.n || a == b {
            return Err(Error::InvalidRegion(format!("bad gate sites ({a}, {b})")));
        }
        self.apply_table2(table, a, b);
        Ok(())
    }

    fn apply_table2(&mut self, table: &CliffordTable2, a: usize, b: usize) {
        let w = self.words;
        let (wa, sa) = (a / 64, a % 64);
        let (wb, sb) = (b / 64, b % 64);
        let (ma, mb) = (1u64 << sa, 1u64 << sb);
        for (row, sign) in self.bits.chunks_exact_mut(2 * w).zip(self.signs.iter_mut()) {
            let (xs, zs) = row.split_at_mut(w);
            let pat = ((xs[wa] >> sa) & 1) | ((zs[wa] >> sa) & 1) << 1 | ((xs[wb] >> sb) & 1) << 2 | ((zs[wb] >> sb) & 1) << 3;
            if pat == 0 {
                continue;
            }
            let img = table.image(pat as u8);
            let p = img.pattern as u64;
            xs[wa] = (xs[wa] & !ma) | (p & 1) << sa;
            zs[wa] = (zs[wa] & !ma) | (p >> 1 & 1) << sa;
            xs[wb] = (xs[wb] & !mb) | (p >> 2 & 1) << sb;
            zs[wb] = (zs[wb] & !mb) | (p >> 3 & 1) << sb;
            *sign ^= img.negative;
        }
    }

    /// Applies a circuit gate; dense unitaries are accepted when they are
    /// Clifford.
    pub fn apply_gate(&mut self, gate: &Gate, sites: &[usize]) -> Result<()> {
        match gate {
            Gate::Clifford(c) => self.apply_clifford(c, sites),
            Gate::Unitary(u) => {
                if u.q != 2 {
                    return Err(Error::NonClifford);
                }
                let c = CliffordGate::from_unitary(u.matrix())?;
                self.apply_clifford(&c, sites)
            }
        }
    }

    pub fn h(&mut self, q: usize) -> Result<()> {
        self.apply_clifford(hadamard_gate(), &[q])
    }

    pub fn s(&mut self, q: usize) -> Result<()> {
        self.apply_clifford(phase_gate(), &[q])
    }

    pub fn cnot(&mut self, control: usize, target: usize) -> Result<()> {
        self.apply_clifford(cnot_gate(), &[control, target])
    }

    pub fn cz(&mut self, a: usize, b: usize) -> Result<()> {
        self.apply_clifford(cz_gate(), &[a, b])
    }

    fn check_pauli(&self, p: &PauliString) -> Result<()> {
        if p.ops.len() != self.n {
            return Err(Error::MalformedPauli(format!("expected {} sites, got {}", self.n, p.ops.len())));
        }
        if p.is_identity() {
            return Err(Error::MalformedPauli("cannot measure the identity".into()));
        }
        Ok(())
    }

    /// Measures the signed Pauli `p` with Born-rule outcome.
    pub fn measure_pauli<R: Rng + ?Sized>(&mut self, p: &PauliString, rng: &mut R) -> Result<PauliMeasurement> {
        self.check_pauli(p)?;
        let packed = PackedPauli::from_string(p, self.words);
        let w = self.words;
        Ok(self.measure_with(|t, r| anticommute(t.row(r), &packed.bits, w), &packed, true, rng))
    }

    /// Single-qubit `Z` measurement.
    pub fn measure_z<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) -> Result<PauliMeasurement> {
        let packed = self.z_operator(q)?;
        Ok(self.measure_with(|t, r| t.get_x(r, q), &packed, true, rng))
    }

    /// `Z` measurement that skips computing deterministic outcomes, which
    /// never affect entropies. The reported outcome is then `+1`.
    pub fn collapse_z<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) -> Result<PauliMeasurement> {
        let packed = self.z_operator(q)?;
        Ok(self.measure_with(|t, r| t.get_x(r, q), &packed, false, rng))
    }

    fn z_operator(&self, q: usize) -> Result<PackedPauli> {
        if q >= self.n {
            return Err(Error::InvalidRegion(format!("qubit {q} out of range for L = {}", self.n)));
        }
        let mut bits = vec![0u64; 2 * self.words];
        bits[self.words + q / 64] |= 1 << (q % 64);
        Ok(PackedPauli { bits, sign: false })
    }

    fn measure_with<R: Rng + ?Sized>(
        &mut self,
        anti: impl Fn(&Self, usize) -> bool,
        p: &PackedPauli,
        want_sign: bool,
        rng: &mut R,
    ) -> PauliMeasurement {
        let n = self.n;
        if let Some(i0) = (0..self.k).find(|&i| anti(self, n + i)) {
            let pivot = n + i0;
            for r in 0..2 * n {
                if r != pivot && r != i0 && anti(self, r) {
                    self.rowmul(r, pivot);
                }
            }
            self.copy_row(i0, pivot);
            let plus: bool = rng.random();
            self.set_row(pivot, &PackedPauli { bits: p.bits.clone(), sign: p.sign ^ !plus });
            return PauliMeasurement { outcome: if plus { 1 } else { -1 }, kind: MeasureKind::Random };
        }
        let logical = (self.k..n).flat_map(|j| [j, n + j]).find(|&r| anti(self, r));
        if let Some(r1) = logical {
            let j = r1 % n;
            let r2 = if r1 < n { r1 + n } else { r1 - n };
            for r in 0..2 * n {
                if r != r1 && r != r2 && anti(self, r) {
                    self.rowmul(r, r1);
                }
            }
            let k = self.k;
            // Move pair j to slot k, keeping track of where r1 lands.
            self.swap_rows(j, k);
            self.swap_rows(n + j, n + k);
            let r1_new = if r1 < n { k } else { n + k };
            self.copy_row(k, r1_new);
            let plus: bool = rng.random();
            self.set_row(n + k, &PackedPauli { bits: p.bits.clone(), sign: p.sign ^ !plus });
            self.k += 1;
            return PauliMeasurement { outcome: if plus { 1 } else { -1 }, kind: MeasureKind::Purifying };
        }
        if !want_sign {
            return PauliMeasurement { outcome: 1, kind: MeasureKind::Deterministic };
        }
        let sign = self.group_sign(|t, i| anti(t, i));
        PauliMeasurement { outcome: if sign == p.sign { 1 } else { -1 }, kind: MeasureKind::Deterministic }
    }

    /// Sign of the product of stabilizers whose destabilizers anticommute
    /// with the measured operator.
    fn group_sign(&self, anti: impl Fn(&Self, usize) -> bool) -> bool {
        let w2 = 2 * self.words;
        let mut acc = vec![0u64; w2];
        let mut sign = false;
        for i in 0..self.k {
            if anti(self, i) {
                let r = self.row(self.n + i);
                sign = product_sign(&acc, sign, r, self.signs[self.n + i], self.words);
                acc.iter_mut().zip(r).for_each(|(a, b)| *a ^= b);
            }
        }
        sign
    }

    /// `⟨P⟩`: ±1 if `±P` is in the stabilizer group, otherwise 0.
    pub fn expectation(&self, p: &PauliString) -> Result<i8> {
        if p.ops.len() != self.n {
            return Err(Error::MalformedPauli(format!("expected {} sites, got {}", self.n, p.ops.len())));
        }
        if p.is_identity() {
            return Ok(if p.negative { -1 } else { 1 });
        }
        let packed = PackedPauli::from_string(p, self.words);
        let w = self.words;
        let anti = |t: &Self, r: usize| anticommute(t.row(r), &packed.bits, w);
        let n = self.n;
        if (0..self.k).any(|i| anti(self, n + i)) || (self.k..n).any(|j| anti(self, j) || anti(self, n + j)) {
            return Ok(0);
        }
        Ok(if self.group_sign(anti) == packed.sign { 1 } else { -1 })
    }

    /// Von Neumann (equivalently any Rényi) entropy of `region`, in bits:
    /// `S_A = |A| − k + rank(G restricted to Ā)`.
    pub fn entropy(&self, region: &[usize]) -> Result<usize> {
        let mut inside = vec![false; self.n];
        for &s in region {
            if s >= self.n {
                return Err(Error::InvalidRegion(format!("site {s} out of range for L = {}", self.n)));
            }
            if inside[s] {
                return Err(Error::InvalidRegion(format!("site {s} repeated")));
            }
            inside[s] = true;
        }
        let comp: Vec<usize> = (0..self.n).filter(|&s| !inside[s]).collect();
        let a = region.len();
        if self.is_pure() && a < comp.len() {
            // S_A = S_Ā; restricting to the smaller side is cheaper.
            return Ok(self.restricted_rank(region) - a);
        }
        Ok(a + self.restricted_rank(&comp) - self.k)
    }

    /// GF(2) rank of the stabilizer generators restricted to `cols`.
    fn restricted_rank(&self, cols: &[usize]) -> usize {
        if cols.is_empty() || self.k == 0 {
            return 0;
        }
        let nbits = 2 * cols.len();
        let words = nbits.div_ceil(64);
        let mut m = vec![0u64; self.k * words];
        for i in 0..self.k {
            let r = self.n + i;
            let row = &mut m[i * words..(i + 1) * words];
            for (c, &q) in cols.iter().enumerate() {
                if self.get_x(r, q) {
                    row[(2 * c) / 64] |= 1 << ((2 * c) % 64);
                }
                if self.get_z(r, q) {
                    row[(2 * c + 1) / 64] |= 1 << ((2 * c + 1) % 64);
                }
            }
        }
        gf2::rank(&mut m, self.k, words)
    }

    /// Sites grouped by equal X-columns of the stabilizer generators. For a
    /// pure state `Z_i Z_j` has expectation ±1 exactly when `i` and `j` share
    /// a group, and 0 otherwise.
    pub fn zz_groups(&self) -> Result<Vec<Vec<usize>>> {
        if !self.is_pure() {
            return Err(Error::InvalidParameter("Z-correlation groups need a pure state".into()));
        }
        let kw = self.k.div_ceil(64);
        let mut cols: Vec<(Vec<u64>, usize)> = (0..self.n)
            .map(|q| {
                let mut c = vec![0u64; kw];
                for i in 0..self.k {
                    if self.get_x(self.n + i, q) {
                        c[i / 64] |= 1 << (i % 64);
                    }
                }
                (c, q)
            })
            .collect();
        cols.sort();
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for (i, (c, q)) in cols.iter().enumerate() {
            if i > 0 && cols[i - 1].0 == *c {
                groups.last_mut().expect("nonempty").push(*q);
            } else {
                groups.push(vec![*q]);
            }
        }
        Ok(groups)
    }

    /// Runs a Clifford circuit with Born-rule measurements.
    pub fn run_circuit<R: Rng + ?Sized>(&mut self, circuit: &Circuit, rng: &mut R) -> Result<Vec<(usize, usize, PauliMeasurement)>> {
        if circuit.n_sites != self.n || circuit.q != 2 {
            return Err(Error::DimensionMismatch { expected: self.n, got: circuit.n_sites });
        }
        let mut out = Vec::new();
        for (li, layer) in circuit.layers.iter().enumerate() {
            for e in &layer.events {
                match e {
                    Event::Gate { sites, gate } => self.apply_gate(gate, sites)?,
                    Event::Measure { site, basis } => {
                        let p = PauliString::single(self.n, *site, *basis);
                        out.push((li, *site, self.measure_pauli(&p, rng)?));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Checks the symplectic pairing of all rows and the sign of every
    /// generator's Hermiticity. Quadratic in `L`.
    pub fn check_invariants(&self) -> Result<()> {
        let n = self.n;
        for a in 0..2 * n {
            for b in a + 1..2 * n {
                let expect = b == a + n;
                if anticommute(self.row(a), self.row(b), self.words) != expect {
                    return Err(Error::NumericalDegeneracy(format!("rows {a} and {b} violate the symplectic pairing")));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_sign_of_x_and_z() {
        // (Z)(X) = iY is not Hermitian, but XZ·ZX-type commuting products:
        // (X⊗X)(Z⊗Z) = (XZ)⊗(XZ) = (−iY)⊗(−iY) = −Y⊗Y.
        let xx = PackedPauli::from_string(&"XX".parse().unwrap(), 1);
        let zz = PackedPauli::from_string(&"ZZ".parse().unwrap(), 1);
        assert!(product_sign(&xx.bits, false, &zz.bits, false, 1));
    }
}
