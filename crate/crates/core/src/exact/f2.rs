/// Matrix over the two-element field, rows bit-packed into words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct F2Matrix {
    rows: usize,
    cols: usize,
    /// One word per row; bit `j` of word `i` is entry `(i, j)`.
    words: Vec<u64>,
}

impl F2Matrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        assert!(cols <= 64, "at most 64 columns supported");
        Self {
            rows,
            cols,
            words: vec![0; rows],
        }
    }

    pub fn from_rows(cols: usize, rows: &[u64]) -> Self {
        assert!(cols <= 64);
        for &r in rows {
            debug_assert_eq!(r & !mask(cols), 0, "row has bits beyond the width");
        }
        Self {
            rows: rows.len(),
            cols,
            words: rows.to_vec(),
        }
    }

    /// Column masks over `n` players, transposed into bit-packed rows.
    pub fn from_column_masks(n: usize, masks: &[u32]) -> Self {
        let mut m = Self::new(n, masks.len());
        for (j, &col) in masks.iter().enumerate() {
            for i in 0..n {
                if col >> i & 1 == 1 {
                    m.words[i] |= 1 << j;
                }
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.words[i] >> j & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        if v {
            self.words[i] |= 1 << j;
        } else {
            self.words[i] &= !(1 << j);
        }
    }

    pub fn row_words(&self) -> &[u64] {
        &self.words
    }
}

fn mask(cols: usize) -> u64 {
    if cols == 64 {
        u64::MAX
    } else {
        (1u64 << cols) - 1
    }
}

/// Rank over the two-element field via word-wide XOR elimination.
pub fn rank_f2(m: &F2Matrix) -> usize {
    rank_f2_words(&mut m.words.clone())
}

pub(crate) fn rank_f2_words(rows: &mut [u64]) -> usize {
    let mut rank = 0;
    for bit in 0..64 {
        let Some(pivot) = (rank..rows.len()).find(|&i| rows[i] >> bit & 1 == 1) else {
            continue;
        };
        rows.swap(rank, pivot);
        for i in 0..rows.len() {
            if i != rank && rows[i] >> bit & 1 == 1 {
                rows[i] ^= rows[rank];
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Incremental span over the two-element field, for rejection sampling and
/// independence tests on column masks.
#[derive(Debug, Clone, Default)]
pub struct F2Span {
    /// Echelon basis: element `i` has its lowest set bit unique.
    basis: Vec<u64>,
}

impl F2Span {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Reduces `v` against the basis; returns the residue.
    pub fn reduce(&self, mut v: u64) -> u64 {
        for &b in &self.basis {
            if v & (b & b.wrapping_neg()) != 0 {
                v ^= b;
            }
        }
        v
    }

    pub fn contains(&self, v: u64) -> bool {
        self.reduce(v) == 0
    }

    /// Inserts `v` if independent of the span; reports whether it was added.
    pub fn insert(&mut self, v: u64) -> bool {
        let r = self.reduce(v);
        if r == 0 {
            return false;
        }
        self.basis.push(r);
        // Keep reduced echelon form so `reduce` stays single-pass.
        let low = r & r.wrapping_neg();
        let n = self.basis.len() - 1;
        for i in 0..n {
            if self.basis[i] & low != 0 {
                self.basis[i] ^= r;
            }
        }
        true
    }
}
