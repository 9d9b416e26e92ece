//! One- and two-qubit Clifford gates in tableau form.
//!
//! A gate is stored as the signed images of the generators
//! `X₀, Z₀, X₁, Z₁` under conjugation `P ↦ C P C†`. Local Pauli patterns use
//! bit `2j` for the X component and bit `2j+1` for the Z component of qubit
//! `j`, with `(1,1)` meaning the Hermitian `Y`.

use std::sync::OnceLock;

use rand::Rng;

use super::gates::UNITARY_TOL;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};
use crate::pauli::Pauli;

/// A signed Hermitian Pauli on at most two qubits.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LocalPauli {
    pub pattern: u8,
    pub negative: bool,
}

impl LocalPauli {
    pub fn new(pattern: u8, negative: bool) -> Self {
        Self { pattern, negative }
    }

    pub fn on(&self, qubit: usize) -> Pauli {
        Pauli::from_bits(self.pattern >> (2 * qubit) & 1 == 1, self.pattern >> (2 * qubit + 1) & 1 == 1)
    }

    fn to_xz(self, arity: usize) -> XzPauli {
        let (x, z) = split(self.pattern, arity);
        XzPauli { x, z, phase: 2 * self.negative as u8 + (x & z).count_ones() as u8 }
    }

    /// Dense matrix, qubit 0 most significant.
    pub fn dense(&self, arity: usize) -> CMatrix {
        let mut m = CMatrix::identity(1);
        for j in 0..arity {
            let p = self.on(j).matrix();
            let pj = CMatrix::from_vec(2, p.to_vec()).expect("2x2");
            m = m.kron(&pj);
        }
        if self.negative {
            m = m.scale(C64::new(-1.0, 0.0));
        }
        m
    }
}

fn split(pattern: u8, arity: usize) -> (u8, u8) {
    let (mut x, mut z) = (0u8, 0u8);
    for j in 0..arity {
        x |= (pattern >> (2 * j) & 1) << j;
        z |= (pattern >> (2 * j + 1) & 1) << j;
    }
    (x, z)
}

fn join(x: u8, z: u8, arity: usize) -> u8 {
    (0..arity).fold(0, |acc, j| acc | (x >> j & 1) << (2 * j) | (z >> j & 1) << (2 * j + 1))
}

/// `i^phase · X^x Z^z` with all X factors to the left.
#[derive(Debug, Clone, Copy)]
struct XzPauli {
    x: u8,
    z: u8,
    phase: u8,
}

impl XzPauli {
    fn identity() -> Self {
        Self { x: 0, z: 0, phase: 0 }
    }

    fn mul(self, o: XzPauli) -> XzPauli {
        let flip = 2 * (self.z & o.x).count_ones() as u8;
        XzPauli { x: self.x ^ o.x, z: self.z ^ o.z, phase: (self.phase + o.phase + flip) & 3 }
    }

    fn to_local(self, arity: usize) -> LocalPauli {
        let rel = (self.phase + 4 - ((self.x & self.z).count_ones() as u8 & 3)) & 3;
        debug_assert!(rel.is_multiple_of(2), "product of Hermitian images must be Hermitian");
        LocalPauli { pattern: join(self.x, self.z, arity), negative: rel == 2 }
    }
}

/// Clifford gate on one or two qubits.
#[derive(Debug)]
pub struct CliffordGate {
    arity: usize,
    images: Vec<LocalPauli>,
    table: Vec<LocalPauli>,
    dense: OnceLock<CMatrix>,
}

impl Clone for CliffordGate {
    fn clone(&self) -> Self {
        Self { arity: self.arity, images: self.images.clone(), table: self.table.clone(), dense: self.dense.clone() }
    }
}

impl PartialEq for CliffordGate {
    fn eq(&self, other: &Self) -> bool {
        self.arity == other.arity && self.images == other.images
    }
}

impl CliffordGate {
    /// Builds the gate from generator images `[X₀, Z₀, (X₁, Z₁)]`.
    ///
    /// Rejects image sets that do not preserve the commutation relations.
    pub fn from_images(images: Vec<LocalPauli>) -> Result<Self> {
        let arity = match images.len() {
            2 => 1,
            4 => 2,
            _ => return Err(Error::NonClifford),
        };
        for a in 0..images.len() {
            for b in 0..images.len() {
                let want = a / 2 == b / 2 && a != b;
                if symplectic_product(images[a].pattern, images[b].pattern, arity) != want {
                    return Err(Error::NonClifford);
                }
            }
        }
        let xz: Vec<XzPauli> = images.iter().map(|p| p.to_xz(arity)).collect();
        let table = (0..1u8 << (2 * arity))
            .map(|pat| {
                let (x, z) = split(pat, arity);
                let mut acc = XzPauli { x: 0, z: 0, phase: (x & z).count_ones() as u8 & 3 };
                for j in 0..arity {
                    if x >> j & 1 == 1 {
                        acc = acc.mul(xz[2 * j]);
                    }
                }
                for j in 0..arity {
                    if z >> j & 1 == 1 {
                        acc = acc.mul(xz[2 * j + 1]);
                    }
                }
                if pat == 0 {
                    acc = XzPauli::identity();
                }
                acc.to_local(arity)
            })
            .collect();
        Ok(Self { arity, images, table, dense: OnceLock::new() })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn images(&self) -> &[LocalPauli] {
        &self.images
    }

    /// Image of an unsigned local pattern.
    #[inline]
    pub fn conjugate(&self, pattern: u8) -> LocalPauli {
        self.table[pattern as usize]
    }

    /// `other ∘ self`: apply `self` first.
    pub fn then(&self, other: &CliffordGate) -> CliffordGate {
        assert_eq!(self.arity, other.arity);
        let images = self
            .images
            .iter()
            .map(|p| {
                let q = other.conjugate(p.pattern);
                LocalPauli::new(q.pattern, q.negative ^ p.negative)
            })
            .collect();
        CliffordGate::from_images(images).expect("composition of Cliffords")
    }

    /// Injective key of the gate modulo global phase.
    pub fn canonical_key(&self) -> u32 {
        self.images.iter().fold(0u32, |acc, p| acc << 5 | (p.pattern as u32) << 1 | p.negative as u32)
    }

    pub fn identity(arity: usize) -> Self {
        let images = (0..2 * arity).map(|k| LocalPauli::new(1 << k, false)).collect();
        Self::from_images(images).expect("identity")
    }

    /// Recovers the tableau of a dense Clifford unitary.
    pub fn from_unitary(u: &CMatrix) -> Result<Self> {
        let arity = match u.dim() {
            2 => 1,
            4 => 2,
            d => return Err(Error::DimensionMismatch { expected: 4, got: d }),
        };
        let dev = u.unitarity_deviation();
        if dev > UNITARY_TOL {
            return Err(Error::NonUnitary { deviation: dev });
        }
        let dim = u.dim() as f64;
        let udag = u.adjoint();
        let candidates: Vec<(u8, CMatrix)> =
            (0..1u8 << (2 * arity)).map(|p| (p, LocalPauli::new(p, false).dense(arity))).collect();
        let mut images = Vec::with_capacity(2 * arity);
        for k in 0..2 * arity {
            let g = LocalPauli::new(1 << k, false).dense(arity);
            let m = &(u * &g) * &udag;
            let mut found = None;
            for (p, sigma) in &candidates {
                let c = (sigma * &m).trace() / dim;
                if (c.norm() - 1.0).abs() < 1e-8 {
                    if c.im.abs() > 1e-8 {
                        return Err(Error::NonClifford);
                    }
                    found = Some(LocalPauli::new(*p, c.re < 0.0));
                    break;
                }
            }
            images.push(found.ok_or(Error::NonClifford)?);
        }
        Self::from_images(images)
    }

    /// Dense unitary (fixed up to a global phase).
    ///
    /// `U|0…0⟩` is the joint +1 eigenvector of the images of the Z
    /// generators; the other columns follow from `U X_j U† = image(X_j)`.
    pub fn dense(&self) -> &CMatrix {
        self.dense.get_or_init(|| {
            let a = self.arity;
            let dim = 1usize << a;
            let mut proj = CMatrix::identity(dim);
            for j in 0..a {
                let s = self.images[2 * j + 1].dense(a);
                let half = (&CMatrix::identity(dim) + &s).scale(C64::new(0.5, 0.0));
                proj = &proj * &half;
            }
            let best = (0..dim)
                .max_by(|&i, &j| {
                    let ni: f64 = (0..dim).map(|r| proj.get(r, i).norm_sqr()).sum();
                    let nj: f64 = (0..dim).map(|r| proj.get(r, j).norm_sqr()).sum();
                    ni.total_cmp(&nj)
                })
                .expect("nonempty");
            let mut psi0: Vec<C64> = (0..dim).map(|r| proj.get(r, best)).collect();
            let norm = psi0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            psi0.iter_mut().for_each(|z| *z /= norm);
            let xs: Vec<CMatrix> = (0..a).map(|j| self.images[2 * j].dense(a)).collect();
            let mut out = CMatrix::zeros(dim);
            for s in 0..dim {
                let mut v = psi0.clone();
                for (j, xj) in xs.iter().enumerate().rev() {
                    if s >> (a - 1 - j) & 1 == 1 {
                        v = xj.apply(&v);
                    }
                }
                for (r, &z) in v.iter().enumerate() {
                    out.set(r, s, z);
                }
            }
            out
        })
    }

    /// Uniform two-qubit Clifford modulo global phase.
    pub fn sample2<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let index = rng.random_range(0..symplectic_group_order(2));
        let signs: u8 = rng.random_range(0..16);
        Self::from_symplectic_index(index, signs)
    }

    /// The Clifford with symplectic matrix number `index` (of 720) and sign bits.
    pub fn from_symplectic_index(index: u64, signs: u8) -> Self {
        let g = symplectic(index, 2);
        let images = g
            .iter()
            .enumerate()
            .map(|(k, row)| {
                let pattern = row.iter().enumerate().fold(0u8, |acc, (b, &bit)| acc | bit << b);
                LocalPauli::new(pattern, signs >> k & 1 == 1)
            })
            .collect();
        Self::from_images(images).expect("symplectic rows define a Clifford")
    }
}


/// Conjugation table of a two-qubit Clifford: the signed image of every
/// unsigned local pattern. Cheap to copy, for hot loops.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CliffordTable2([LocalPauli; 16]);

fn unsigned_tables() -> &'static [[LocalPauli; 16]] {
    static TABLES: OnceLock<Vec<[LocalPauli; 16]>> = OnceLock::new();
    TABLES.get_or_init(|| {
        (0..symplectic_group_order(2))
            .map(|i| CliffordTable2::from_gate(&CliffordGate::from_symplectic_index(i, 0)).expect("two-qubit").0)
            .collect()
    })
}

impl CliffordTable2 {
    pub fn from_gate(g: &CliffordGate) -> Option<Self> {
        (g.arity == 2).then(|| Self(std::array::from_fn(|p| g.table[p])))
    }

    /// Same distribution and random draws as [`CliffordGate::sample2`].
    pub fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let index = rng.random_range(0..symplectic_group_order(2));
        let signs: u8 = rng.random_range(0..16);
        let base = &unsigned_tables()[index as usize];
        // Flipping a generator's sign flips every product containing it.
        Self(std::array::from_fn(|p| {
            let img = base[p];
            LocalPauli::new(img.pattern, img.negative ^ ((signs & p as u8).count_ones() % 2 == 1))
        }))
    }

    #[inline]
    pub fn image(&self, pattern: u8) -> LocalPauli {
        self.0[pattern as usize & 15]
    }
}

fn symplectic_product(a: u8, b: u8, arity: usize) -> bool {
    let (ax, az) = split(a, arity);
    let (bx, bz) = split(b, arity);
    ((ax & bz).count_ones() + (az & bx).count_ones()) % 2 == 1
}

/// `|Sp(2n, 𝔽₂)|`.
pub fn symplectic_group_order(n: u32) -> u64 {
    (1..=n).map(|j| (4u64.pow(j) - 1) * (1u64 << (2 * j - 1))).product()
}

type BitVec = Vec<u8>;

fn inner(v: &[u8], w: &[u8]) -> u8 {
    v.chunks(2).zip(w.chunks(2)).fold(0, |t, (a, b)| t ^ (a[0] & b[1]) ^ (a[1] & b[0]))
}

fn transvection(k: &[u8], v: &[u8]) -> BitVec {
    let c = inner(k, v);
    v.iter().zip(k).map(|(a, b)| a ^ (c & b)).collect()
}

fn int_to_bits(mut i: u64, n: usize) -> BitVec {
    (0..n)
        .map(|_| {
            let b = (i & 1) as u8;
            i >>= 1;
            b
        })
        .collect()
}

fn xor(a: &[u8], b: &[u8]) -> BitVec {
    a.iter().zip(b).map(|(x, y)| x ^ y).collect()
}

/// Two transvections `h₁, h₂` with `y = Z_{h₁} Z_{h₂} x`.
fn find_transvection(x: &[u8], y: &[u8]) -> [BitVec; 2] {
    let nn = x.len();
    let zero = vec![0u8; nn];
    if x == y {
        return [zero.clone(), zero];
    }
    if inner(x, y) == 1 {
        return [xor(x, y), zero];
    }
    let mut z = vec![0u8; nn];
    for i in 0..nn / 2 {
        let ii = 2 * i;
        if (x[ii] | x[ii + 1]) != 0 && (y[ii] | y[ii + 1]) != 0 {
            z[ii] = x[ii] ^ y[ii];
            z[ii + 1] = x[ii + 1] ^ y[ii + 1];
            if z[ii] | z[ii + 1] == 0 {
                z[ii + 1] = 1;
                if x[ii] != x[ii + 1] {
                    z[ii] = 1;
                }
            }
            return [xor(x, &z), xor(y, &z)];
        }
    }
    for i in 0..nn / 2 {
        let ii = 2 * i;
        if (x[ii] | x[ii + 1]) != 0 && (y[ii] | y[ii + 1]) == 0 {
            if x[ii] == x[ii + 1] {
                z[ii + 1] = 1;
            } else {
                z[ii + 1] = x[ii];
                z[ii] = x[ii + 1];
            }
            break;
        }
    }
    for i in 0..nn / 2 {
        let ii = 2 * i;
        if (x[ii] | x[ii + 1]) == 0 && (y[ii] | y[ii + 1]) != 0 {
            if y[ii] == y[ii + 1] {
                z[ii + 1] = 1;
            } else {
                z[ii + 1] = y[ii];
                z[ii] = y[ii + 1];
            }
            break;
        }
    }
    [xor(x, &z), xor(y, &z)]
}

/// The symplectic matrix with number `i ∈ [0, |Sp(2n)|)` in interleaved
/// `(x₁, z₁, x₂, z₂, …)` ordering; row `k` is the image of basis vector `k`.
///
/// Subgroup-algorithm construction from products of symplectic transvections.
pub fn symplectic(i: u64, n: usize) -> Vec<BitVec> {
    let nn = 2 * n;
    let s = (1u64 << nn) - 1;
    let k = (i % s) + 1;
    let i = i / s;
    let mut f1 = int_to_bits(k, nn);
    let mut e1 = vec![0u8; nn];
    e1[0] = 1;
    let t = find_transvection(&e1, &f1);
    let bits = int_to_bits(i % (1 << (nn - 1)), nn - 1);
    let mut eprime = e1.clone();
    eprime[2..nn].copy_from_slice(&bits[1..(nn - 1)]);
    let h0 = transvection(&t[1], &transvection(&t[0], &eprime));
    if bits[0] == 1 {
        f1.iter_mut().for_each(|b| *b = 0);
    }
    let mut g: Vec<BitVec> = vec![vec![0u8; nn]; nn];
    g[0][0] = 1;
    g[1][1] = 1;
    if n > 1 {
        let sub = symplectic(i >> (nn - 1), n - 1);
        for (r, row) in sub.iter().enumerate() {
            g[r + 2][2..].copy_from_slice(row);
        }
    }
    for row in g.iter_mut() {
        let mut v = transvection(&t[0], row);
        v = transvection(&t[1], &v);
        v = transvection(&h0, &v);
        v = transvection(&f1, &v);
        *row = v;
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::gates::named;
    use std::collections::HashSet;

    #[test]
    fn group_orders() {
        assert_eq!(symplectic_group_order(1), 6);
        assert_eq!(symplectic_group_order(2), 720);
    }

    #[test]
    fn all_symplectic_indices_are_distinct_and_symplectic() {
        let mut seen = HashSet::new();
        for i in 0..720 {
            let g = symplectic(i, 2);
            for a in 0..4 {
                for b in 0..4 {
                    let want = (a / 2 == b / 2 && a != b) as u8;
                    assert_eq!(inner(&g[a], &g[b]), want, "index {i}");
                }
            }
            assert!(seen.insert(g));
        }
    }

    #[test]
    fn cz_maps_x_to_xz() {
        let cz = CliffordGate::from_unitary(&named::cz()).unwrap();
        // X on qubit 0 (pattern 0b0001) -> X0 Z1 (0b1001)
        assert_eq!(cz.conjugate(0b0001), LocalPauli::new(0b1001, false));
        assert_eq!(cz.conjugate(0b0100), LocalPauli::new(0b0110, false));
    }

    #[test]
    fn dense_round_trip() {
        for g in [named::cz(), named::cnot(), named::swap()] {
            let c = CliffordGate::from_unitary(&g).unwrap();
            let back = CliffordGate::from_unitary(c.dense()).unwrap();
            assert_eq!(c, back);
        }
    }
}
