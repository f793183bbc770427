//! Exact feasibility for `A x = b, x >= 0` by phase-one simplex with Bland's
//! rule.

use crate::rational::Rational;

/// Returns some `x >= 0` with `A x = b`, or `None` when the system is
/// infeasible. Every row of `a` must have the same length.
pub(crate) fn feasible_point(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let width = n + m + 1;
    let rhs = n + m;

    let mut t: Vec<Vec<Rational>> = Vec::with_capacity(m + 1);
    for (i, (row, bi)) in a.iter().zip(b).enumerate() {
        debug_assert_eq!(row.len(), n);
        let flip = bi.is_negative();
        let mut r = vec![Rational::zero(); width];
        for (j, v) in row.iter().enumerate() {
            r[j] = if flip { -v } else { v.clone() };
        }
        r[n + i] = Rational::one();
        r[rhs] = if flip { -bi } else { bi.clone() };
        t.push(r);
    }
    // Objective row: reduced costs of "minimize the sum of artificials".
    let mut z = vec![Rational::zero(); width];
    for r in &t {
        for j in 0..n {
            z[j] = &z[j] - &r[j];
        }
        z[rhs] = &z[rhs] - &r[rhs];
    }
    t.push(z);
    let mut basis: Vec<usize> = (n..n + m).collect();

    while let Some(enter) = (0..n + m).find(|&j| t[m][j].is_negative()) {
        let mut leave: Option<(usize, Rational)> = None;
        for i in 0..m {
            if t[i][enter] > Rational::zero() {
                let ratio = &t[i][rhs] / &t[i][enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        // Phase one is bounded below by zero, so an entering column always
        // has a positive entry.
        let (pivot_row, _) = leave?;
        pivot(&mut t, pivot_row, enter);
        basis[pivot_row] = enter;
    }

    if !t[m][rhs].is_zero() {
        return None;
    }
    let mut x = vec![Rational::zero(); n];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < n {
            x[bv] = t[i][rhs].clone();
        }
    }
    Some(x)
}

fn pivot(t: &mut [Vec<Rational>], row: usize, col: usize) {
    let p = t[row][col].clone();
    if !p.is_one() {
        for v in t[row].iter_mut() {
            *v = &*v / &p;
        }
    }
    let pivot_row = t[row].clone();
    for (i, r) in t.iter_mut().enumerate() {
        if i == row || r[col].is_zero() {
            continue;
        }
        let f = r[col].clone();
        for (v, pv) in r.iter_mut().zip(&pivot_row) {
            if !pv.is_zero() {
                *v = &*v - &(&f * pv);
            }
        }
    }
}
