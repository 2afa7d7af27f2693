//! Incremental fraction-free elimination over the integers.
//!
//! Only ever fed rows derived from 0-1 matrices of width at most 16 (plus an
//! all-ones augmentation column). Under the one-step Bareiss rule every
//! stored entry is a minor of the original 0-1 system; such minors are below
//! 2^21 even at width 17 (Hadamard bound via the ±1 correspondence), so i64
//! arithmetic cannot overflow and every division is exact. This is the engine
//! behind the enumeration search and the subset-rank scans; the public
//! rational API in `qmatrix` is independent of it.

pub(crate) const MAX_WIDTH: usize = 18;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct IntRow {
    pub width: usize,
    pub a: [i64; MAX_WIDTH],
}

impl IntRow {
    pub fn zero(width: usize) -> Self {
        debug_assert!(width <= MAX_WIDTH);
        Self {
            width,
            a: [0; MAX_WIDTH],
        }
    }

    /// 0-1 row from a bit mask.
    pub fn from_mask(width: usize, mask: u32) -> Self {
        let mut r = Self::zero(width);
        for j in 0..width {
            if mask >> j & 1 == 1 {
                r.a[j] = 1;
            }
        }
        r
    }

    pub fn ones(width: usize) -> Self {
        let mut r = Self::zero(width);
        r.a[..width].fill(1);
        r
    }

    pub fn is_zero(&self) -> bool {
        self.a[..self.width].iter().all(|&x| x == 0)
    }

    pub fn first_nonzero(&self) -> Option<usize> {
        (0..self.width).find(|&j| self.a[j] != 0)
    }

    /// Whether `self` and `other` span the same line. Both must be nonzero.
    pub fn parallel(&self, other: &IntRow) -> bool {
        debug_assert_eq!(self.width, other.width);
        let Some(p) = other.first_nonzero() else {
            return false;
        };
        let (sp, op) = (self.a[p], other.a[p]);
        if sp == 0 {
            return false;
        }
        (0..self.width).all(|j| self.a[j] * op == other.a[j] * sp)
    }

    /// One fraction-free elimination step: cancels `self` at the pivot of
    /// `row`, dividing by the previous pivot of the shared schedule.
    pub fn eliminate_step(&self, row: &IntRow, pivot: usize, prev_pivot: i64) -> IntRow {
        let mut out = *self;
        let d = row.a[pivot];
        let c = self.a[pivot];
        for j in 0..self.width {
            let t = self.a[j] * d - row.a[j] * c;
            debug_assert_eq!(t % prev_pivot, 0, "fraction-free division not exact");
            out.a[j] = t / prev_pivot;
        }
        out
    }
}

/// Row basis in insertion order with fraction-free reduction state.
#[derive(Debug, Clone, Default)]
pub(crate) struct IntBasis {
    rows: Vec<IntRow>,
    pivots: Vec<usize>,
    /// Pivot values; `dens[i]` divides the step-`i+1` cross product exactly.
    dens: Vec<i64>,
}

impl IntBasis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` through the whole basis with the one-step Bareiss rule.
    pub fn reduce(&self, mut v: IntRow) -> IntRow {
        let mut prev = 1i64;
        for (i, row) in self.rows.iter().enumerate() {
            v = v.eliminate_step(row, self.pivots[i], prev);
            prev = self.dens[i];
        }
        v
    }

    /// Pushes an already-reduced nonzero row.
    pub fn push_reduced(&mut self, v: IntRow) {
        let p = v.first_nonzero().expect("cannot push a zero row");
        self.dens.push(v.a[p]);
        self.pivots.push(p);
        self.rows.push(v);
    }

    pub fn pop(&mut self) {
        self.rows.pop();
        self.pivots.pop();
        self.dens.pop();
    }

    /// Reduce-and-insert; returns false when `v` is dependent.
    pub fn insert(&mut self, v: IntRow) -> bool {
        let r = self.reduce(v);
        if r.is_zero() {
            return false;
        }
        self.push_reduced(r);
        true
    }
}

/// Rank over the rationals of 0-1 rows given as bit masks.
pub(crate) fn rank_masks(width: usize, masks: &[u32]) -> usize {
    let mut basis = IntBasis::new();
    for &m in masks {
        basis.insert(IntRow::from_mask(width, m));
        if basis.rank() == width {
            break;
        }
    }
    basis.rank()
}

/// Determinant of a square 0-1 matrix given as bit-mask rows.
pub(crate) fn det_mask_rows(size: usize, rows: &[u32]) -> i64 {
    debug_assert_eq!(rows.len(), size);
    let mut a = [[0i64; 16]; 16];
    for (i, &r) in rows.iter().enumerate() {
        for j in 0..size {
            a[i][j] = (r >> j & 1) as i64;
        }
    }
    det_small(size, &mut a)
}

/// In-place Bareiss determinant for small integer matrices.
pub(crate) fn det_small(size: usize, a: &mut [[i64; 16]; 16]) -> i64 {
    let mut sign = 1i64;
    let mut prev = 1i64;
    for k in 0..size {
        if a[k][k] == 0 {
            let Some(sw) = (k + 1..size).find(|&i| a[i][k] != 0) else {
                return 0;
            };
            a.swap(k, sw);
            sign = -sign;
        }
        for i in k + 1..size {
            for j in k + 1..size {
                let t = a[i][j] * a[k][k] - a[i][k] * a[k][j];
                debug_assert_eq!(t % prev, 0);
                a[i][j] = t / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    sign * a[size - 1][size - 1]
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum IntSolve {
    /// Reduced fractions `(numerator, denominator)` with positive denominators.
    Unique(Vec<(i64, i64)>),
    RankDeficient,
    Inconsistent,
}

/// Exact integer solve of `M λ = 1` for a 0-1 matrix given by column masks.
pub(crate) fn solve_ones_masks(n: usize, cols: &[u32]) -> IntSolve {
    let m = cols.len();
    let mut basis = IntBasis::new();
    let mut pivot_rows: Vec<usize> = Vec::with_capacity(m);
    // Row i of the system as a 0-1 row over the m columns.
    let row_of = |i: usize| {
        let mut mask = 0u32;
        for (j, &c) in cols.iter().enumerate() {
            if c >> i & 1 == 1 {
                mask |= 1 << j;
            }
        }
        mask
    };
    for i in 0..n {
        if basis.insert(IntRow::from_mask(m, row_of(i))) {
            pivot_rows.push(i);
            if basis.rank() == m {
                break;
            }
        }
    }
    if basis.rank() < m {
        return IntSolve::RankDeficient;
    }
    // Cramer on the square subsystem of pivot rows.
    let square: Vec<u32> = pivot_rows.iter().map(|&i| row_of(i)).collect();
    let d = det_mask_rows(m, &square);
    debug_assert_ne!(d, 0);
    let mut lambda = Vec::with_capacity(m);
    for j in 0..m {
        // Replace column j by the all-ones right-hand side.
        let replaced: Vec<u32> = square.iter().map(|&r| r | 1 << j).collect();
        let dj = det_mask_rows(m, &replaced);
        let g = gcd(dj.unsigned_abs(), d.unsigned_abs()) as i64;
        let (mut num, mut den) = (dj / g, d / g);
        if den < 0 {
            num = -num;
            den = -den;
        }
        lambda.push((num, den));
    }
    // Verify the remaining rows exactly; the pivot rows hold by construction.
    for i in 0..n {
        let r = row_of(i);
        let mut num = 0i64;
        let mut den = 1i64;
        for j in 0..m {
            if r >> j & 1 == 1 {
                num = num * lambda[j].1 + lambda[j].0 * den;
                den *= lambda[j].1;
                let g = gcd(num.unsigned_abs(), den.unsigned_abs()).max(1) as i64;
                num /= g;
                den /= g;
            }
        }
        if num != den {
            return IntSolve::Inconsistent;
        }
    }
    IntSolve::Unique(lambda)
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}
