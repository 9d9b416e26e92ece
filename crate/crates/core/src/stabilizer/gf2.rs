//! Dense GF(2) elimination on packed rows.

/// Rank of a `rows × (64·words)` bit matrix stored row-major. The matrix is
/// destroyed.
pub(crate) fn rank(m: &mut [u64], rows: usize, words: usize) -> usize {
    let mut rank = 0;
    for w in 0..words {
        let mut bits = 0u64;
        for r in rank..rows {
            bits |= m[r * words + w];
        }
        while bits != 0 && rank < rows {
            let b = bits.trailing_zeros();
            bits &= bits - 1;
            let mask = 1u64 << b;
            let Some(p) = (rank..rows).find(|&r| m[r * words + w] & mask != 0) else {
                continue;
            };
            if p != rank {
                for c in w..words {
                    m.swap(p * words + c, rank * words + c);
                }
            }
            for r in rank + 1..rows {
                if m[r * words + w] & mask != 0 {
                    for c in w..words {
                        m[r * words + c] ^= m[rank * words + c];
                    }
                }
            }
            rank += 1;
        }
    }
    rank
}
