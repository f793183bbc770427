//! Oracles and enumerators shared by the integration tests and the
//! acceptance runner. Nothing here calls the library's own decision
//! procedures for the property being checked.

#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::Arc;

use omlcond::classical::{EventSet, FiniteProbabilitySpace};
use omlcond::states::atom_supported_states;
use omlcond::{boolean_algebra, horizontal_sum, mo_lattice, ElementId, FiniteOml, Rational, State};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

/// Compatibility by search: `a ↔ b` iff there are mutually orthogonal
/// `a₁, b₁, c` with `a = a₁ ∨ c` and `b = b₁ ∨ c`.
pub fn brute_compatible(l: &FiniteOml, a: ElementId, b: ElementId) -> bool {
    let below = |x: ElementId| l.elements().filter(move |&y| l.leq(y, x));
    for c in below(a).filter(|&c| l.leq(c, b)) {
        let a1s: Vec<ElementId> = below(a).filter(|&y| l.is_orthogonal(y, c) && l.join(y, c) == a).collect();
        if a1s.is_empty() {
            continue;
        }
        for b1 in below(b).filter(|&y| l.is_orthogonal(y, c) && l.join(y, c) == b) {
            if a1s.iter().any(|&a1| l.is_orthogonal(a1, b1)) {
                return true;
            }
        }
    }
    false
}

/// `f_k(d, c)` straight from the definition: find the subfamilies whose
/// join is `c` by trying all of them. `None` when `c` is no such join or
/// carries zero weight.
pub fn oracle_fk(
    l: &FiniteOml,
    family: &[ElementId],
    supports: &[State],
    k: &[Rational],
    d: ElementId,
    c: ElementId,
) -> Option<Rational> {
    let n = family.len();
    let mut found = None;
    for mask in 1u32..(1 << n) {
        let members: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        if l.join_all(members.iter().map(|&i| family[i])) != c {
            continue;
        }
        assert!(found.is_none(), "two subfamilies join to {c}");
        found = Some(members);
    }
    let members = found?;
    let total: Rational = members.iter().map(|&i| k[i].clone()).sum();
    if total.is_zero() {
        return None;
    }
    let mass: Rational = members.iter().map(|&i| &k[i] * supports[i].value(d)).sum();
    Some(mass / total)
}

/// State axioms checked directly: `m(0) = 0`, `m(1) = 1`, values in
/// `[0,1]`, additivity over every orthogonal pair.
pub fn oracle_is_state(l: &FiniteOml, m: impl Fn(ElementId) -> Rational) -> bool {
    if !m(l.zero()).is_zero() || !m(l.one()).is_one() {
        return false;
    }
    for a in l.elements() {
        if !m(a).is_probability() {
            return false;
        }
        for b in l.elements() {
            if l.is_orthogonal(a, b) && m(l.join(a, b)) != m(a) + m(b) {
                return false;
            }
        }
    }
    true
}

/// The lattices of the property suites, with display names.
pub fn suite_lattices() -> Vec<(String, Arc<FiniteOml>)> {
    let mut out = Vec::new();
    for k in 1..=3 {
        out.push((format!("B{k}"), Arc::new(boolean_algebra(k).unwrap())));
    }
    for m in 1..=4 {
        out.push((format!("MO({m})"), Arc::new(mo_lattice(m).unwrap())));
    }
    for blocks in [&[2u32][..], &[3], &[2, 2], &[2, 2, 2], &[3, 2], &[3, 3], &[3, 2, 2]] {
        let parts: Vec<FiniteOml> = blocks.iter().map(|&k| boolean_algebra(k).unwrap()).collect();
        let sizes: Vec<String> = blocks.iter().map(|k| (1u32 << k).to_string()).collect();
        let l = horizontal_sum(&parts).unwrap();
        assert!(l.len() <= 14);
        out.push((format!("sum[{}]", sizes.join(",")), Arc::new(l)));
    }
    out
}

/// Mutually orthogonal sets of nonzero elements, ascending, of size
/// `1..=max`.
pub fn orthogonal_families(l: &FiniteOml, max: usize) -> Vec<Vec<ElementId>> {
    fn grow(l: &FiniteOml, nonzero: &[ElementId], start: usize, cur: &mut Vec<ElementId>, max: usize, out: &mut Vec<Vec<ElementId>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if cur.len() == max {
            return;
        }
        for i in start..nonzero.len() {
            let x = nonzero[i];
            if cur.iter().all(|&y| l.leq(x, l.ortho(y))) {
                cur.push(x);
                grow(l, nonzero, i + 1, cur, max, out);
                cur.pop();
            }
        }
    }
    let nonzero: Vec<ElementId> = l.elements().filter(|&x| x != l.zero()).collect();
    let mut out = Vec::new();
    grow(l, &nonzero, 0, &mut Vec::new(), max, &mut out);
    out
}

/// Distinct fractions `p/q` with `0 < p ≤ q ≤ max_denom`.
pub fn positive_fractions(max_denom: i64) -> Vec<Rational> {
    let mut v: Vec<Rational> = (1..=max_denom)
        .flat_map(|q| (1..=q).map(move |p| Rational::new(p, q)))
        .collect();
    v.sort();
    v.dedup();
    v
}

/// All length-`n` vectors over `values` summing to 1.
pub fn vectors_summing_to_one(n: usize, values: &[Rational]) -> Vec<Vec<Rational>> {
    fn go(n: usize, values: &[Rational], left: Rational, cur: &mut Vec<Rational>, out: &mut Vec<Vec<Rational>>) {
        if cur.len() == n {
            if left.is_zero() {
                out.push(cur.clone());
            }
            return;
        }
        for v in values {
            if *v <= left {
                cur.push(v.clone());
                go(n, values, &left - v, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(n, values, Rational::one(), &mut Vec::new(), &mut out);
    out
}

/// Positive weight vectors of length `n` with denominators at most
/// `max_denom`.
pub fn weight_vectors(n: usize, max_denom: i64) -> Vec<Vec<Rational>> {
    vectors_summing_to_one(n, &positive_fractions(max_denom))
}

/// Canonical supporting states of a family.
pub fn canonical_supports(l: &Arc<FiniteOml>, family: &[ElementId]) -> Vec<State> {
    atom_supported_states(l, family).unwrap().into_iter().map(|s| s.state).collect()
}

/// Probability spaces on `1..=max_atoms` atoms whose weights have
/// denominators at most `max_denom` (zero weights included). With
/// `sorted`, only non-increasing weight vectors are produced.
pub fn spaces(max_atoms: usize, max_denom: i64, sorted: bool) -> Vec<FiniteProbabilitySpace> {
    let mut values = positive_fractions(max_denom);
    values.insert(0, Rational::zero());
    let mut out = Vec::new();
    for n in 1..=max_atoms {
        for w in vectors_summing_to_one(n, &values) {
            if sorted && w.windows(2).any(|p| p[0] < p[1]) {
                continue;
            }
            out.push(FiniteProbabilitySpace::new(w).unwrap());
        }
    }
    out
}

/// `μ` of every event of an `n`-atom space, indexed by atom mask, summed
/// from the weights.
pub fn event_measures(weights: &[Rational]) -> Vec<Rational> {
    (0u32..1 << weights.len())
        .map(|mask| {
            weights
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, w)| w.clone())
                .sum()
        })
        .collect()
}

/// Both sides of the finite total-probability biconditional, computed from
/// event masks: `(decomposition over all C, f(⋃Bᵢ,B) = Σ f(Bᵢ,B) = 1)`.
pub fn oracle_prop11_sides(mu: &[Rational], family: &[u32], b: u32) -> (bool, bool) {
    let cond = |a: u32, c: u32| &mu[(a & c) as usize] / &mu[c as usize];
    let decomposition = (0..mu.len() as u32).all(|c| {
        let rhs: Rational = family.iter().map(|&bi| cond(c, bi) * cond(bi, b)).sum();
        cond(c, b) == rhs
    });
    let union = family.iter().fold(0, |u, &e| u | e);
    let total: Rational = family.iter().map(|&bi| cond(bi, b)).sum();
    (decomposition, cond(union, b).is_one() && total.is_one())
}

/// Families of at most `max` distinct positive-measure events together with
/// a condition `B`, meeting `μ(B) > 0`, `f(B, Bᵢ) = 1`, `f(Bᵢ, B) > 0`.
pub fn oracle_prop11_instances(mu: &[Rational], max: usize) -> Vec<(Vec<u32>, u32)> {
    let positive: Vec<u32> = (1..mu.len() as u32).filter(|&e| !mu[e as usize].is_zero()).collect();
    let mut out = Vec::new();
    for &b in &positive {
        let cand: Vec<u32> = positive.iter().copied().filter(|&e| mu[(e & b) as usize] == mu[e as usize]).collect();
        let n = cand.len();
        for i in 0..n {
            out.push((vec![cand[i]], b));
            if max < 2 {
                continue;
            }
            for j in i + 1..n {
                out.push((vec![cand[i], cand[j]], b));
                if max < 3 {
                    continue;
                }
                for k in j + 1..n {
                    out.push((vec![cand[i], cand[j], cand[k]], b));
                }
            }
        }
    }
    out
}

pub fn ev(atoms: &[usize]) -> EventSet {
    EventSet::from_atoms(atoms.iter().copied())
}

pub fn r(s: &str) -> Rational {
    s.parse().unwrap()
}
