//! Explicit order relation with precomputed join and meet tables.

use crate::lattice::{ElementId, LatticeError};
use crate::report::{Axiom, Violation};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct BitMatrix {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    pub(crate) fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        BitMatrix { n, words, bits: vec![0; n * words] }
    }

    pub(crate) fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    pub(crate) fn set(&mut self, i: usize, j: usize) {
        self.bits[i * self.words + j / 64] |= 1 << (j % 64);
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    /// row[i] |= row[k]
    fn or_row_into(&mut self, k: usize, i: usize) {
        let w = self.words;
        for t in 0..w {
            let v = self.bits[k * w + t];
            self.bits[i * w + t] |= v;
        }
    }

    fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::new(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                if self.get(i, j) {
                    t.set(j, i);
                }
            }
        }
        t
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Dense {
    pub(crate) n: usize,
    pub(crate) leq: BitMatrix,
    pub(crate) ortho: Vec<u32>,
    pub(crate) zero: u32,
    pub(crate) one: u32,
    pub(crate) join: Vec<u32>,
    pub(crate) meet: Vec<u32>,
}

impl Dense {
    pub(crate) fn join(&self, a: usize, b: usize) -> usize {
        self.join[a * self.n + b] as usize
    }

    pub(crate) fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a * self.n + b] as usize
    }
}

/// Reflexive-transitive closure of `pairs`, checked for antisymmetry.
pub(crate) fn close_order(n: usize, pairs: &[(ElementId, ElementId)]) -> Result<BitMatrix, LatticeError> {
    let mut m = BitMatrix::new(n);
    for i in 0..n {
        m.set(i, i);
    }
    for &(a, b) in pairs {
        m.set(a.0, b.0);
    }
    for k in 0..n {
        for i in 0..n {
            if i != k && m.get(i, k) {
                m.or_row_into(k, i);
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if m.get(i, j) && m.get(j, i) {
                return Err(LatticeError::NotPartialOrder(
                    Violation::new(Axiom::OrderAntisymmetric, vec![ElementId(i), ElementId(j)])
                        .with_detail("each is below the other"),
                ));
            }
        }
    }
    Ok(m)
}

/// Least element of `candidates` with respect to `up` (row `u` of `up` is the
/// set of elements above `u`), if one exists.
fn least(up: &BitMatrix, candidates: &[u64]) -> Option<usize> {
    for (w, &word) in candidates.iter().enumerate() {
        let mut bits = word;
        while bits != 0 {
            let u = w * 64 + bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let row = up.row(u);
            if candidates.iter().zip(row).all(|(c, r)| c & !r == 0) {
                return Some(u);
            }
        }
    }
    None
}

/// Builds the join and meet tables for a closed order with the given bounds.
pub(crate) fn lattice_tables(
    leq: BitMatrix,
    ortho: Vec<u32>,
    zero: usize,
    one: usize,
) -> Result<Dense, LatticeError> {
    let n = leq.n;
    for x in 0..n {
        if !leq.get(zero, x) || !leq.get(x, one) {
            return Err(LatticeError::NotLattice(
                Violation::new(Axiom::Bounds, vec![ElementId(x)])
                    .with_detail("element not between the designated 0 and 1"),
            ));
        }
    }
    let down = leq.transpose();
    let mut join = vec![0u32; n * n];
    let mut meet = vec![0u32; n * n];
    let mut common = vec![0u64; leq.words];
    for a in 0..n {
        for b in a..n {
            for (t, c) in common.iter_mut().enumerate() {
                *c = leq.row(a)[t] & leq.row(b)[t];
            }
            let j = least(&leq, &common).ok_or_else(|| {
                LatticeError::NotLattice(
                    Violation::new(Axiom::Join, vec![ElementId(a), ElementId(b)])
                        .with_detail("no least upper bound"),
                )
            })?;
            for (t, c) in common.iter_mut().enumerate() {
                *c = down.row(a)[t] & down.row(b)[t];
            }
            let m = least(&down, &common).ok_or_else(|| {
                LatticeError::NotLattice(
                    Violation::new(Axiom::Meet, vec![ElementId(a), ElementId(b)])
                        .with_detail("no greatest lower bound"),
                )
            })?;
            join[a * n + b] = j as u32;
            join[b * n + a] = j as u32;
            meet[a * n + b] = m as u32;
            meet[b * n + a] = m as u32;
        }
    }
    Ok(Dense { n, leq, ortho, zero: zero as u32, one: one as u32, join, meet })
}
