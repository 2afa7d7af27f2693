//! Exact counts of minimal balanced collections.
//!
//! `B(n, m)` is computed from the weight-class decomposition: every positive
//! full-rank matrix is assembled from a weight vector λ, a full-rank subset of
//! its unificator rows, and a surjective assignment of those rows to the n
//! players. Dividing the matrix count by m! gives the collection count.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::exact::{binomial, factorial, qr, Rational};
use crate::weights::{count_full_rank_subsets_upto, unificators, LambdaSet, LambdaStore};
use crate::{Error, Result};

/// Number of surjections from an n-element set onto a k-element set:
/// `Σ_{l=0}^{k} (-1)^{k-l} C(k,l) l^n`, zero whenever `n < k`.
pub fn surjections(k: usize, n: usize) -> BigInt {
    let mut acc = BigInt::zero();
    for l in 0..=k {
        let term = binomial(k, l) * BigInt::from(l).pow(n as u32);
        if (k - l).is_multiple_of(2) {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

/// |I^{>0}_{n,m}|: positive full-rank n×m 0-1 matrices, via the triple sum
/// over weight classes, subset-rank counts, and surjections. The λ-sum runs
/// over permutation classes scaled by multiplicity, since both `|U(λ)|` and
/// `C_k(λ)` are invariant under coordinate permutation.
pub fn count_positive_matrices(n: usize, m: usize, lam: &LambdaSet) -> BigInt {
    assert_eq!(lam.m(), m, "weight set size mismatch");
    assert!(n >= m, "more columns than rows");
    lam.classes()
        .par_iter()
        .map(|class| {
            let u = unificators(&class.representative()).expect("class dimension bounded");
            let kmax = n.min(u.len());
            let counts = count_full_rank_subsets_upto(&u, kmax);
            let mut contribution = BigInt::zero();
            for (k, c) in counts.iter().enumerate().take(kmax + 1).skip(m) {
                if !c.is_zero() {
                    contribution += c * surjections(k, n);
                }
            }
            contribution * BigInt::from(class.multiplicity())
        })
        .reduce(BigInt::zero, |a, b| a + b)
}

/// B(n, m): minimal balanced collections of m subsets of an n-player ground
/// set. Exactly m! matrices correspond to each collection, and the division
/// must be exact — a remainder means the counting machinery is broken.
pub fn count_b(n: usize, m: usize, store: &mut LambdaStore) -> Result<BigInt> {
    if m == 0 || m > n {
        return Err(Error::InvalidInput(format!(
            "require 1 ≤ m ≤ n, got m={m}, n={n}"
        )));
    }
    let lam = store.get(m)?;
    let matrices = count_positive_matrices(n, m, &lam);
    let (q, r) = matrices.div_rem(&factorial(m));
    assert!(
        r.is_zero(),
        "matrix count {matrices} for (n={n}, m={m}) is not divisible by {m}!"
    );
    Ok(q)
}

/// Per-size counts and total for one ground-set size.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountTable {
    pub n: usize,
    #[serde(with = "crate::exact::serde_bigint_vec")]
    pub per_m: Vec<BigInt>,
    #[serde(with = "crate::exact::serde_bigint")]
    pub total: BigInt,
}

/// All of B(n, 1..=n) plus the total B_n.
pub fn count_b_total(n: usize, store: &mut LambdaStore) -> Result<CountTable> {
    if n == 0 || n > 7 {
        return Err(Error::SizeLimit(format!(
            "totals supported for 1 ≤ n ≤ 7, got {n}"
        )));
    }
    let per_m = (1..=n)
        .map(|m| count_b(n, m, store))
        .collect::<Result<Vec<_>>>()?;
    let total = per_m.iter().fold(BigInt::zero(), |a, b| a + b);
    Ok(CountTable { n, per_m, total })
}

/// Published closed forms for m ≤ 4, evaluated exactly; the result is always
/// integral (they vanish below the diagonal n < m).
pub fn closed_form(n: usize, m: usize) -> Result<BigInt> {
    if n == 0 || m == 0 || m > 4 {
        return Err(Error::InvalidInput(format!(
            "closed forms cover 1 ≤ m ≤ 4, n ≥ 1; got m={m}, n={n}"
        )));
    }
    let pow = |base: i64| Rational::from_integer(BigInt::from(base).pow(n as u32));
    let value = match m {
        1 => Rational::one(),
        2 => qr(1, 2) * pow(2) - Rational::one(),
        3 => qr(1, 3) * pow(3) - pow(2) + Rational::one(),
        4 => {
            qr(1, 24) * pow(6) + qr(7, 24) * pow(4) - qr(2, 1) * pow(3) + qr(29, 8) * pow(2)
                - qr(8, 3)
        }
        _ => unreachable!(),
    };
    assert!(
        value.is_integer(),
        "closed form for (n={n}, m={m}) is not integral: {value}"
    );
    Ok(value.to_integer())
}

/// The exact contribution of the largest-unificator-set weight classes: a
/// lower bound for B(n, m) that becomes tight as n grows. For odd m ≥ 3 the
/// two uniform classes flanking the middle layer both contribute.
pub fn fixed_m_lower_estimate(n: usize, m: usize) -> Result<BigInt> {
    if m == 0 || m > 7 {
        return Err(Error::SizeLimit(format!(
            "estimate supports m ≤ 7, got {m}"
        )));
    }
    let u_size = usize::try_from(binomial(m, m.div_ceil(2))).expect("small binomial");
    let ways = surjections(u_size, n) * BigInt::from(if m % 2 == 1 && m > 1 { 2 } else { 1 });
    let (q, r) = ways.div_rem(&factorial(m));
    assert!(
        r.is_zero(),
        "estimate for (n={n}, m={m}) not divisible by m!"
    );
    Ok(q)
}

/// Strict two-sided bound on the total count, evaluated exactly with the
/// published constants (0.288 taken literally as 288/1000).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub n: usize,
    #[serde(with = "crate::exact::serde_rational")]
    pub lower: Rational,
    #[serde(with = "crate::exact::serde_rational")]
    pub upper: Rational,
    #[serde(with = "crate::exact::serde_bigint")]
    pub b_n: BigInt,
    pub holds_lower: bool,
    pub holds_upper: bool,
}

impl BoundReport {
    pub fn holds(&self) -> bool {
        self.holds_lower && self.holds_upper
    }
}

/// Checks `0.288/n! · 2^{(n-1)²} < B_n < 120/n! · 2^{n²-n}`.
pub fn theorem1_bounds(n: usize, b_n: &BigInt) -> Result<BoundReport> {
    if n < 3 {
        return Err(Error::InvalidInput(format!(
            "bounds stated for n ≥ 3, got {n}"
        )));
    }
    let nf = Rational::from_integer(factorial(n));
    let lower = qr(288, 1000) * Rational::from_integer(BigInt::one() << ((n - 1) * (n - 1))) / &nf;
    let upper = Rational::from_integer(BigInt::from(120) * (BigInt::one() << (n * n - n))) / &nf;
    let bq = Rational::from_integer(b_n.clone());
    Ok(BoundReport {
        n,
        holds_lower: lower < bq,
        holds_upper: bq < upper,
        lower,
        upper,
        b_n: b_n.clone(),
    })
}

/// Partial product `∏_{k=1}^{terms} (1 - 2^{-k})`, an exact rational that
/// decreases to the constant α ≈ 0.288… in the lower bound.
pub fn alpha_constant(terms: usize) -> Rational {
    let mut acc = Rational::one();
    for k in 1..=terms as u32 {
        acc *= Rational::one() - Rational::new(BigInt::one(), BigInt::one() << k);
    }
    acc
}

/// One numeric inequality check with its exact sides rendered for reporting.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub n: usize,
    pub m: usize,
    pub lhs: String,
    pub rhs: String,
    pub holds: bool,
}

/// Verifies the counting inequalities against exhaustively scanned matrix
/// spaces: the lifted lower bound for |I^{≠0}_{n,n}|, the orbit sandwich
/// between |I^{≠0}| and |I^{>0}| (m ≥ 2), the 2^{nm}/(½(m+1)) upper bound for
/// m < n, and the equal-support symmetry behind it.
pub fn bound_lemma_checks(censuses: &[crate::enumerate::MatrixSpaceCensus]) -> Vec<BoundCheck> {
    let mut out = Vec::new();
    for c in censuses {
        let (n, m) = (c.n, c.m);
        let nonzero = BigInt::from(c.nonzero);
        let positive = BigInt::from(c.positive);
        if n == m {
            let mut product = BigInt::one();
            for k in 1..n {
                product *= (BigInt::one() << n) - (BigInt::one() << k);
            }
            out.push(BoundCheck {
                name: "f2-lift-lower-bound".into(),
                n,
                m,
                lhs: nonzero.to_string(),
                rhs: product.to_string(),
                holds: nonzero >= product,
            });
        }
        if m >= 2 {
            let pow = BigInt::one() << m;
            let low_den = &pow - BigInt::from(m);
            let high_den = &pow - binomial(m, m.div_ceil(2));
            let lower = Rational::new(BigInt::from(2) * &nonzero, low_den);
            let upper = Rational::new(BigInt::from(2) * &nonzero, high_den);
            let posq = Rational::from_integer(positive.clone());
            out.push(BoundCheck {
                name: "orbit-sandwich".into(),
                n,
                m,
                lhs: format!("{lower} <= {positive}"),
                rhs: format!("{positive} <= {upper}"),
                holds: lower <= posq && posq <= upper,
            });
        }
        if m < n {
            let cap = Rational::new(
                BigInt::from(2) * (BigInt::one() << (n * m)),
                BigInt::from(m + 1),
            );
            let nzq = Rational::from_integer(nonzero.clone());
            out.push(BoundCheck {
                name: "nonzero-upper-bound".into(),
                n,
                m,
                lhs: nonzero.to_string(),
                rhs: cap.to_string(),
                holds: nzq < cap,
            });
        }
        if m >= 2 {
            // Supports missing exactly one column index carry equal counts.
            let drop_one: Vec<u64> = (0..m)
                .map(|i| {
                    let s = ((1u32 << m) - 1) & !(1 << i);
                    c.per_support.get(&s).copied().unwrap_or(0)
                })
                .collect();
            out.push(BoundCheck {
                name: "support-symmetry".into(),
                n,
                m,
                lhs: format!("{drop_one:?}"),
                rhs: "all equal".into(),
                holds: drop_one.windows(2).all(|w| w[0] == w[1]),
            });
        }
    }
    out
}
