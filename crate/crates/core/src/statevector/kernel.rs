//! In-place application of local matrices to dense vectors.

use crate::linalg::{CMatrix, C64, ZERO};

#[inline]
fn insert_zero(k: usize, pos: usize) -> usize {
    ((k >> pos) << (pos + 1)) | (k & ((1 << pos) - 1))
}

/// Applies `u` to `sites` of a vector over `n` sites of dimension `q`.
/// The caller has validated sites and dimensions.
pub(crate) fn apply_local(amps: &mut [C64], n: usize, q: usize, u: &CMatrix, sites: &[usize]) {
    match (q, sites.len()) {
        (2, 1) => apply_qubit1(amps, n, u, sites[0]),
        (2, 2) => apply_qubit2(amps, n, u, sites[0], sites[1]),
        _ => apply_general(amps, n, q, u, sites),
    }
}

fn apply_qubit1(amps: &mut [C64], n: usize, u: &CMatrix, a: usize) {
    let pa = n - 1 - a;
    let bit = 1usize << pa;
    let m = u.as_slice();
    for k in 0..amps.len() / 2 {
        let i0 = insert_zero(k, pa);
        let i1 = i0 | bit;
        let (v0, v1) = (amps[i0], amps[i1]);
        amps[i0] = m[0] * v0 + m[1] * v1;
        amps[i1] = m[2] * v0 + m[3] * v1;
    }
}

fn apply_qubit2(amps: &mut [C64], n: usize, u: &CMatrix, a: usize, b: usize) {
    let (pa, pb) = (n - 1 - a, n - 1 - b);
    let (ba, bb) = (1usize << pa, 1usize << pb);
    let (lo, hi) = if pa < pb { (pa, pb) } else { (pb, pa) };
    let m = u.as_slice();
    for k in 0..amps.len() / 4 {
        let i00 = insert_zero(insert_zero(k, lo), hi);
        let idx = [i00, i00 | bb, i00 | ba, i00 | ba | bb];
        let v = [amps[idx[0]], amps[idx[1]], amps[idx[2]], amps[idx[3]]];
        for (r, &i) in idx.iter().enumerate() {
            let row = &m[4 * r..4 * r + 4];
            amps[i] = row[0] * v[0] + row[1] * v[1] + row[2] * v[2] + row[3] * v[3];
        }
    }
}

fn apply_general(amps: &mut [C64], n: usize, q: usize, u: &CMatrix, sites: &[usize]) {
    let strides: Vec<usize> = sites.iter().map(|&s| q.pow((n - 1 - s) as u32)).collect();
    let local = u.dim();
    let offsets: Vec<usize> = (0..local)
        .map(|mut l| {
            let mut off = 0;
            for st in strides.iter().rev() {
                off += (l % q) * st;
                l /= q;
            }
            off
        })
        .collect();
    let m = u.as_slice();
    let mut buf = vec![ZERO; local];
    for base in 0..amps.len() {
        if strides.iter().any(|&st| (base / st) % q != 0) {
            continue;
        }
        for (b, off) in buf.iter_mut().zip(&offsets) {
            *b = amps[base + off];
        }
        for (r, off) in offsets.iter().enumerate() {
            amps[base + off] = m[r * local..(r + 1) * local].iter().zip(&buf).map(|(x, y)| x * y).sum();
        }
    }
}
