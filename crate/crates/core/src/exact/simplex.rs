//! Exact two-phase primal simplex over the rationals.
//!
//! Solves `max cᵀx` subject to `Ax = b`, `x ≥ 0` with Bland's pivoting rule,
//! which terminates on every input. When the constraints are infeasible the
//! solver returns a Farkas vector `y` with `yᵀA ≤ 0` componentwise and
//! `yᵀb > 0`, verified exactly before it is handed back.

use num_traits::{One, Signed, Zero};

use super::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rational, x: Vec<Rational> },
    Infeasible { farkas: Vec<Rational> },
    Unbounded,
}

/// Maximizes `cᵀx` over `Ax = b`, `x ≥ 0`. Rows of `a` must share `c`'s length.
pub fn maximize(a: &[Vec<Rational>], b: &[Rational], c: &[Rational]) -> LpOutcome {
    let nrows = a.len();
    let ncols = c.len();
    assert_eq!(b.len(), nrows);
    for row in a {
        assert_eq!(row.len(), ncols);
    }

    // Tableau: original columns, artificial columns, rhs.
    let width = ncols + nrows + 1;
    let rhs = width - 1;
    let mut t: Vec<Vec<Rational>> = Vec::with_capacity(nrows);
    for (i, row) in a.iter().enumerate() {
        let flip = b[i].is_negative();
        let mut r = vec![Rational::zero(); width];
        for (j, v) in row.iter().enumerate() {
            r[j] = if flip { -v.clone() } else { v.clone() };
        }
        r[ncols + i] = Rational::one();
        r[rhs] = if flip { -b[i].clone() } else { b[i].clone() };
        t.push(r);
    }
    let mut basis: Vec<usize> = (ncols..ncols + nrows).collect();

    // Phase 1: maximize minus the sum of artificials. The cost row stores
    // z_j - c_j; start from c = (0,…,0,-1,…,-1) priced out over the basis.
    let mut cost = vec![Rational::zero(); width];
    for j in ncols..ncols + nrows {
        cost[j] = Rational::one();
    }
    for row in &t {
        for j in 0..width {
            let v = &cost[j] - &row[j];
            cost[j] = v;
        }
    }
    run_simplex(&mut t, &mut basis, &mut cost, ncols + nrows, rhs);

    // cost[rhs] now holds -z where z = phase-1 objective = -Σ artificials.
    if !cost[rhs].is_zero() {
        // Infeasible. Read y from the artificial columns: cost[art_i] = y_i + 1.
        let y: Vec<Rational> = (0..nrows)
            .map(|i| {
                let raw = &cost[ncols + i] - Rational::one();
                // Undo the row flip applied for negative rhs entries.
                if b[i].is_negative() {
                    raw
                } else {
                    -raw
                }
            })
            .collect();
        // Exactness check of the certificate.
        for j in 0..ncols {
            let mut dot = Rational::zero();
            for i in 0..nrows {
                dot += &y[i] * &a[i][j];
            }
            assert!(!dot.is_positive(), "farkas certificate violates yᵀA ≤ 0");
        }
        let mut ydotb = Rational::zero();
        for i in 0..nrows {
            ydotb += &y[i] * &b[i];
        }
        assert!(ydotb.is_positive(), "farkas certificate violates yᵀb > 0");
        return LpOutcome::Infeasible { farkas: y };
    }

    // Drive out any artificial still basic at level zero.
    for i in 0..nrows {
        if basis[i] < ncols {
            continue;
        }
        if let Some(j) = (0..ncols).find(|&j| !t[i][j].is_zero()) {
            pivot(&mut t, &mut basis, &mut cost, i, j, rhs);
        }
        // A row with no original coefficients is a redundant constraint; its
        // artificial stays basic at zero and never pivots back in.
    }

    // Phase 2 with the real objective, artificial columns barred.
    let mut cost = vec![Rational::zero(); width];
    for j in 0..ncols {
        cost[j] = -c[j].clone();
    }
    for (i, row) in t.iter().enumerate() {
        if basis[i] < ncols && !c[basis[i]].is_zero() {
            let f = c[basis[i]].clone();
            for j in 0..width {
                let v = &cost[j] + &f * &row[j];
                cost[j] = v;
            }
        }
    }
    if !run_simplex(&mut t, &mut basis, &mut cost, ncols, rhs) {
        return LpOutcome::Unbounded;
    }

    let mut x = vec![Rational::zero(); ncols];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < ncols {
            x[bv] = t[i][rhs].clone();
        }
    }
    LpOutcome::Optimal {
        value: cost[rhs].clone(),
        x,
    }
}

/// Feasibility of `Ax = b`, `x ≥ 0` (zero objective).
pub fn feasible_point(a: &[Vec<Rational>], b: &[Rational]) -> LpOutcome {
    maximize(a, b, &vec![Rational::zero(); a.first().map_or(0, Vec::len)])
}

/// Bland primal iterations; returns false on unboundedness.
fn run_simplex(
    t: &mut [Vec<Rational>],
    basis: &mut [usize],
    cost: &mut [Rational],
    enterable: usize,
    rhs: usize,
) -> bool {
    loop {
        // Bland: lowest index with negative reduced cost enters.
        let Some(enter) = (0..enterable).find(|&j| cost[j].is_negative()) else {
            return true;
        };
        // Leaving: minimal ratio, ties broken by lowest basis variable.
        let mut leave: Option<usize> = None;
        let mut best: Option<Rational> = None;
        for i in 0..t.len() {
            if !t[i][enter].is_positive() {
                continue;
            }
            let ratio = &t[i][rhs] / &t[i][enter];
            let better = match &best {
                None => true,
                Some(b) => ratio < *b || (ratio == *b && basis[i] < basis[leave.unwrap()]),
            };
            if better {
                best = Some(ratio);
                leave = Some(i);
            }
        }
        let Some(leave) = leave else {
            return false;
        };
        pivot(t, basis, cost, leave, enter, rhs);
    }
}

fn pivot(
    t: &mut [Vec<Rational>],
    basis: &mut [usize],
    cost: &mut [Rational],
    row: usize,
    col: usize,
    rhs: usize,
) {
    let inv = t[row][col].clone().recip();
    for j in 0..=rhs {
        let v = &t[row][j] * &inv;
        t[row][j] = v;
    }
    for i in 0..t.len() {
        if i == row || t[i][col].is_zero() {
            continue;
        }
        let f = t[i][col].clone();
        for j in 0..=rhs {
            let v = &t[i][j] - &f * &t[row][j];
            t[i][j] = v;
        }
    }
    if !cost[col].is_zero() {
        let f = cost[col].clone();
        for j in 0..=rhs {
            let v = &cost[j] - &f * &t[row][j];
            cost[j] = v;
        }
    }
    basis[row] = col;
}

#[cfg(test)]
mod tests {
    use super::super::{q, qr};
    use super::*;

    #[test]
    fn feasible_partition() {
        // λ1 = λ2 = 1 solves the two-block partition system.
        let a = vec![vec![q(1), q(0)], vec![q(0), q(1)], vec![q(0), q(1)]];
        let b = vec![q(1), q(1), q(1)];
        match feasible_point(&a, &b) {
            LpOutcome::Optimal { x, .. } => {
                assert_eq!(x, vec![q(1), q(1)]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn infeasible_has_farkas() {
        // x1 = 1 and x1 = 2 cannot both hold.
        let a = vec![vec![q(1)], vec![q(1)]];
        let b = vec![q(1), q(2)];
        match feasible_point(&a, &b) {
            LpOutcome::Infeasible { farkas } => {
                assert_eq!(farkas.len(), 2);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn maximize_simple() {
        // max x + y st x + y + s = 1 → value 1.
        let a = vec![vec![q(1), q(1), q(1)]];
        let b = vec![q(1)];
        let c = vec![q(1), q(1), q(0)];
        match maximize(&a, &b, &c) {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, q(1)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn maximize_fractional() {
        // max t st 2μ + 3t = 1, μ,t ≥ 0 → t = 1/3.
        let a = vec![vec![q(2), q(3)]];
        let b = vec![q(1)];
        let c = vec![q(0), q(1)];
        match maximize(&a, &b, &c) {
            LpOutcome::Optimal { value, x } => {
                assert_eq!(value, qr(1, 3));
                assert_eq!(x[1], qr(1, 3));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unbounded_detected() {
        // max x - y st x - y = 0 … x = y arbitrary, objective 0; bounded.
        // max x st x - y = 0: x = y free upward → unbounded.
        let a = vec![vec![q(1), q(-1)]];
        let b = vec![q(0)];
        let c = vec![q(1), q(0)];
        assert_eq!(maximize(&a, &b, &c), LpOutcome::Unbounded);
    }
}
