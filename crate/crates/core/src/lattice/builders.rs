//! Canonical lattices: Boolean algebras, `MO(m)`, and horizontal sums of
//! Boolean blocks.

use std::collections::HashSet;

use super::{ElementId, FiniteOml, LatticeError, MAX_ELEMENTS};
use crate::lattice::glued::Glued;

/// Largest atom count for a Boolean algebra (`2^16` elements).
pub const MAX_BOOLEAN_ATOMS: u32 = 16;

/// Power-set lattice on `k` atoms. Element ids equal atom masks.
pub fn boolean_algebra(k: u32) -> Result<FiniteOml, LatticeError> {
    if k == 0 || k > MAX_BOOLEAN_ATOMS {
        return Err(LatticeError::SizeLimitExceeded {
            requested: 1usize.checked_shl(k).unwrap_or(usize::MAX),
            limit: MAX_ELEMENTS,
        });
    }
    let n = 1usize << k;
    let labels = (0..n)
        .map(|mask| match mask {
            0 => "0".to_string(),
            m if m == n - 1 => "1".to_string(),
            m => {
                let parts: Vec<String> = (0..k).filter(|b| m >> b & 1 == 1).map(|b| (b + 1).to_string()).collect();
                format!("{{{}}}", parts.join(","))
            }
        })
        .collect();
    Ok(FiniteOml::glued(&[k], labels))
}

/// `MO(m)`: `m` orthogonal pairs `x_i, x_i'` with no order between distinct
/// pairs, glued at 0 and 1.
pub fn mo_lattice(m: usize) -> Result<FiniteOml, LatticeError> {
    let n = m.checked_mul(2).and_then(|x| x.checked_add(2)).unwrap_or(usize::MAX);
    if m == 0 || n > MAX_ELEMENTS {
        return Err(LatticeError::SizeLimitExceeded { requested: n, limit: MAX_ELEMENTS });
    }
    let mut labels = Vec::with_capacity(n);
    labels.push("0".to_string());
    for i in 1..=m {
        labels.push(format!("x{i}"));
        labels.push(format!("x{i}'"));
    }
    labels.push("1".to_string());
    Ok(FiniteOml::glued(&vec![2; m], labels))
}

/// Identification of a Boolean lattice with the power set of its atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BooleanView {
    pub atoms: Vec<ElementId>,
    /// Atom mask of every element, indexed by element id.
    pub masks: Vec<u32>,
    /// Element with a given atom mask.
    pub by_mask: Vec<ElementId>,
}

impl BooleanView {
    /// Recognizes `lattice` as a Boolean algebra: every pair is compatible and
    /// elements correspond one-to-one with sets of atoms.
    pub fn of(lattice: &FiniteOml) -> Option<BooleanView> {
        if let Some([k]) = lattice.block_atoms().as_deref() {
            // single glued block: ids are atom masks
            let n = 1usize << k;
            return Some(BooleanView {
                atoms: (0..*k).map(|b| ElementId(1 << b)).collect(),
                masks: (0..n as u32).collect(),
                by_mask: (0..n).map(ElementId).collect(),
            });
        }
        let atoms = lattice.atoms();
        let k = atoms.len();
        if k as u32 > MAX_BOOLEAN_ATOMS || lattice.len() != 1usize << k {
            return None;
        }
        for a in lattice.elements() {
            for b in lattice.elements() {
                if a < b && !lattice.is_compatible(a, b) {
                    return None;
                }
            }
        }
        let mut masks = vec![0u32; lattice.len()];
        let mut by_mask = vec![None; lattice.len()];
        for x in lattice.elements() {
            let mask = atoms
                .iter()
                .enumerate()
                .filter(|(_, &at)| lattice.leq(at, x))
                .fold(0u32, |m, (i, _)| m | 1 << i);
            if by_mask[mask as usize].replace(x).is_some() {
                return None;
            }
            masks[x.0] = mask;
        }
        let by_mask = by_mask.into_iter().collect::<Option<Vec<_>>>()?;
        Some(BooleanView { atoms, masks, by_mask })
    }
}

/// Glues Boolean blocks at a common 0 and 1.
///
/// Order and orthocomplement are inherited inside each block; a proper
/// element of one block is incomparable with, and never orthogonal to, a
/// proper element of another, and their join is 1 and meet 0. Block labels
/// carry over, prefixed with `B<i>.` when two blocks share a label.
pub fn horizontal_sum(blocks: &[FiniteOml]) -> Result<FiniteOml, LatticeError> {
    if blocks.is_empty() {
        return Err(LatticeError::EmptySum);
    }
    let mut views = Vec::with_capacity(blocks.len());
    for (index, b) in blocks.iter().enumerate() {
        match BooleanView::of(b) {
            Some(v) if v.atoms.len() >= 2 => views.push(v),
            _ => return Err(LatticeError::BlockNotBoolean { index }),
        }
    }
    let atoms: Vec<u32> = views.iter().map(|v| v.atoms.len() as u32).collect();
    let n = Glued::size_for(&atoms).unwrap_or(usize::MAX);
    if n > MAX_ELEMENTS {
        return Err(LatticeError::SizeLimitExceeded { requested: n, limit: MAX_ELEMENTS });
    }
    let glued = Glued::new(&atoms);

    let mut seen = HashSet::new();
    let mut clash = false;
    for (b, v) in blocks.iter().zip(&views) {
        for &x in &v.by_mask[1..v.by_mask.len() - 1] {
            clash |= !seen.insert(b.label(x));
        }
    }
    let first = &blocks[0];
    let zero_label = first.label(first.zero()).to_string();
    let one_label = first.label(first.one()).to_string();
    clash |= seen.contains(zero_label.as_str()) || seen.contains(one_label.as_str());

    let mut labels = vec![String::new(); n];
    labels[0] = zero_label;
    labels[n - 1] = one_label;
    for (i, (b, v)) in blocks.iter().zip(&views).enumerate() {
        for (mask, &x) in v.by_mask.iter().enumerate().skip(1).take(v.by_mask.len() - 2) {
            let id = glued.encode(i, mask as u32);
            labels[id] = if clash {
                format!("B{}.{}", i + 1, b.label(x))
            } else {
                b.label(x).to_string()
            };
        }
    }
    Ok(FiniteOml::glued(&atoms, labels))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boolean_sizes() {
        assert_eq!(boolean_algebra(1).unwrap().len(), 2);
        assert_eq!(boolean_algebra(2).unwrap().len(), 4);
        let b3 = boolean_algebra(3).unwrap();
        assert_eq!(b3.len(), 8);
        assert_eq!(b3.atoms().len(), 3);
        assert_eq!(b3.label(ElementId(5)), "{1,3}");
        assert!(matches!(boolean_algebra(0), Err(LatticeError::SizeLimitExceeded { .. })));
        assert!(matches!(boolean_algebra(17), Err(LatticeError::SizeLimitExceeded { .. })));
    }

    #[test]
    fn largest_boolean_algebra_is_cheap() {
        let b = boolean_algebra(16).unwrap();
        assert_eq!(b.len(), 1 << 16);
        let x = ElementId(0b1010_0000_0000_0001);
        assert_eq!(b.ortho(b.ortho(x)), x);
        assert_eq!(b.join(x, b.ortho(x)), b.one());
    }

    #[test]
    fn absorption_in_boolean_algebra() {
        let b = boolean_algebra(2).unwrap();
        let (p, q) = (ElementId(1), ElementId(2));
        assert_eq!(b.meet(b.join(p, q), p), p);
    }

    #[test]
    fn mo_labels_and_ops() {
        let mo = mo_lattice(2).unwrap();
        assert_eq!(mo.len(), 6);
        let a = mo.element("x1").unwrap();
        let b = mo.element("x2").unwrap();
        assert_eq!(mo.join(a, b), mo.one());
        assert_eq!(mo.ortho(a), mo.element("x1'").unwrap());
        assert_eq!(mo.ortho(mo.ortho(b)), b);
        assert!(matches!(mo_lattice(0), Err(LatticeError::SizeLimitExceeded { .. })));
    }

    #[test]
    fn horizontal_sum_rejects_small_or_non_boolean_blocks() {
        let b1 = boolean_algebra(1).unwrap();
        let b2 = boolean_algebra(2).unwrap();
        assert_eq!(horizontal_sum(&[b2.clone(), b1]), Err(LatticeError::BlockNotBoolean { index: 1 }));
        let mo = mo_lattice(2).unwrap();
        assert_eq!(horizontal_sum(&[mo, b2]), Err(LatticeError::BlockNotBoolean { index: 0 }));
        assert_eq!(horizontal_sum(&[]), Err(LatticeError::EmptySum));
    }

    #[test]
    fn horizontal_sum_prefixes_clashing_labels() {
        let b2 = boolean_algebra(2).unwrap();
        let h = horizontal_sum(&[b2.clone(), b2]).unwrap();
        assert!(h.element("B1.{1}").is_some());
        assert!(h.element("B2.{2}").is_some());
        assert_eq!(h.label(h.zero()), "0");
    }

    #[test]
    fn boolean_view_of_mo_is_none() {
        assert!(BooleanView::of(&mo_lattice(2).unwrap()).is_none());
        let v = BooleanView::of(&boolean_algebra(3).unwrap()).unwrap();
        assert_eq!(v.masks[6], 6);
        assert_eq!(v.by_mask[5], ElementId(5));
    }
}
