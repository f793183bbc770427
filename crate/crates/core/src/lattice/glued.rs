//! Boolean blocks glued at a shared 0 and 1.
//!
//! Element ids: `0` is the bottom, `n - 1` is the top, and the proper
//! elements of block `i` (atom masks `1 ..= 2^k - 2`) occupy the contiguous
//! range starting at `offset_i`, so that id `offset_i + mask - 1` encodes
//! `mask`. A single block therefore has `id == mask`.

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Glued {
    pub(crate) blocks: Vec<Block>,
    pub(crate) n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Block {
    pub(crate) atoms: u32,
    pub(crate) offset: usize,
}

impl Block {
    pub(crate) fn full(&self) -> u32 {
        if self.atoms == 32 {
            u32::MAX
        } else {
            (1u32 << self.atoms) - 1
        }
    }

    fn proper_count(&self) -> usize {
        (1usize << self.atoms) - 2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Decoded {
    Zero,
    One,
    Proper { block: usize, mask: u32 },
}

impl Glued {
    /// `atoms[i]` is the atom count of block `i`; every count is at least 1
    /// and the caller has already checked the total size.
    pub(crate) fn new(atoms: &[u32]) -> Self {
        let mut offset = 1;
        let mut blocks = Vec::with_capacity(atoms.len());
        for &k in atoms {
            let b = Block { atoms: k, offset };
            offset += b.proper_count();
            blocks.push(b);
        }
        Glued { blocks, n: offset + 1 }
    }

    pub(crate) fn size_for(atoms: &[u32]) -> Option<usize> {
        let mut n: usize = 2;
        for &k in atoms {
            if k == 0 || k >= usize::BITS - 1 {
                return None;
            }
            n = n.checked_add((1usize << k) - 2)?;
        }
        Some(n)
    }

    pub(crate) fn decode(&self, id: usize) -> Decoded {
        if id == 0 {
            return Decoded::Zero;
        }
        if id == self.n - 1 {
            return Decoded::One;
        }
        let block = self.blocks.partition_point(|b| b.offset <= id) - 1;
        let b = &self.blocks[block];
        Decoded::Proper { block, mask: (id - b.offset + 1) as u32 }
    }

    pub(crate) fn encode(&self, block: usize, mask: u32) -> usize {
        let b = &self.blocks[block];
        if mask == 0 {
            0
        } else if mask == b.full() {
            self.n - 1
        } else {
            b.offset + mask as usize - 1
        }
    }

    pub(crate) fn leq(&self, a: usize, b: usize) -> bool {
        match (self.decode(a), self.decode(b)) {
            (Decoded::Zero, _) | (_, Decoded::One) => true,
            (_, Decoded::Zero) | (Decoded::One, _) => false,
            (Decoded::Proper { block: i, mask: x }, Decoded::Proper { block: j, mask: y }) => {
                i == j && x & !y == 0
            }
        }
    }

    pub(crate) fn join(&self, a: usize, b: usize) -> usize {
        match (self.decode(a), self.decode(b)) {
            (Decoded::Zero, _) => b,
            (_, Decoded::Zero) => a,
            (Decoded::One, _) | (_, Decoded::One) => self.n - 1,
            (Decoded::Proper { block: i, mask: x }, Decoded::Proper { block: j, mask: y }) => {
                if i == j {
                    self.encode(i, x | y)
                } else {
                    self.n - 1
                }
            }
        }
    }

    pub(crate) fn meet(&self, a: usize, b: usize) -> usize {
        match (self.decode(a), self.decode(b)) {
            (Decoded::One, _) => b,
            (_, Decoded::One) => a,
            (Decoded::Zero, _) | (_, Decoded::Zero) => 0,
            (Decoded::Proper { block: i, mask: x }, Decoded::Proper { block: j, mask: y }) => {
                if i == j {
                    self.encode(i, x & y)
                } else {
                    0
                }
            }
        }
    }

    pub(crate) fn ortho(&self, a: usize) -> usize {
        match self.decode(a) {
            Decoded::Zero => self.n - 1,
            Decoded::One => 0,
            Decoded::Proper { block, mask } => {
                let b = &self.blocks[block];
                self.encode(block, b.full() & !mask)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout() {
        let g = Glued::new(&[2, 3]);
        assert_eq!(g.n, 2 + 2 + 6);
        assert_eq!(g.decode(1), Decoded::Proper { block: 0, mask: 1 });
        assert_eq!(g.decode(3), Decoded::Proper { block: 1, mask: 1 });
        assert_eq!(g.decode(8), Decoded::Proper { block: 1, mask: 6 });
        assert_eq!(g.encode(1, 7), 9);
        for id in 0..g.n {
            let back = match g.decode(id) {
                Decoded::Zero => 0,
                Decoded::One => g.n - 1,
                Decoded::Proper { block, mask } => g.encode(block, mask),
            };
            assert_eq!(back, id);
        }
    }

    #[test]
    fn single_block_ids_are_masks() {
        let g = Glued::new(&[3]);
        assert_eq!(g.n, 8);
        assert_eq!(g.join(1, 2), 3);
        assert_eq!(g.meet(6, 3), 2);
        assert_eq!(g.ortho(5), 2);
        assert_eq!(g.ortho(7), 0);
    }

    #[test]
    fn two_point_block() {
        let g = Glued::new(&[1]);
        assert_eq!(g.n, 2);
        assert_eq!(g.ortho(0), 1);
        assert!(g.leq(0, 1));
        assert!(!g.leq(1, 0));
    }
}
