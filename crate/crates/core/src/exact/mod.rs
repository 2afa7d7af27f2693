//! Exact arithmetic over the rationals and over the two-element field.
//!
//! Every balancedness and rank question downstream is a yes/no question, so
//! there are no tolerances anywhere: rationals are arbitrary-precision
//! fractions in lowest terms, comparisons are exact.

mod f2;
pub(crate) mod introw;
mod qmatrix;
pub mod simplex;

pub use f2::{rank_f2, F2Matrix, F2Span};
pub use qmatrix::{rank_q, signs, solve_ones, QMatrix, SolveOutcome};

use num_bigint::BigInt;
use num_traits::One;

/// Exact fraction, always reduced, denominator positive.
pub type Rational = num_rational::BigRational;

/// Shorthand for small integer-valued rationals.
pub fn q(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `n/d` as a reduced rational.
pub fn qr(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Renders `p/q`, or just `p` when the denominator is one.
pub fn rational_to_string(r: &Rational) -> String {
    r.to_string()
}

/// Parses `"p/q"` or `"p"`.
pub fn rational_from_str(s: &str) -> crate::Result<Rational> {
    s.parse::<Rational>()
        .map_err(|e| crate::Error::InvalidInput(format!("bad rational {s:?}: {e}")))
}

/// Exact factorial.
pub fn factorial(n: usize) -> BigInt {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= k;
    }
    acc
}

/// Exact binomial coefficient, zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Serde adapter: rationals as `"p/q"` strings.
pub mod serde_rational {
    use super::Rational;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        s.parse::<Rational>()
            .map_err(|e| de::Error::custom(format!("bad rational {s:?}: {e}")))
    }
}

/// Serde adapter: vectors of rationals as `"p/q"` string arrays.
pub mod serde_rational_vec {
    use super::Rational;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|r| r.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| {
                s.parse::<Rational>()
                    .map_err(|e| de::Error::custom(format!("bad rational {s:?}: {e}")))
            })
            .collect()
    }
}

/// Serde adapter: big integers as decimal strings.
pub mod serde_bigint {
    use num_bigint::BigInt;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        s.parse::<BigInt>()
            .map_err(|e| de::Error::custom(format!("bad integer {s:?}: {e}")))
    }
}

/// Serde adapter: vectors of big integers as decimal strings.
pub mod serde_bigint_vec {
    use num_bigint::BigInt;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|r| r.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| {
                s.parse::<BigInt>()
                    .map_err(|e| de::Error::custom(format!("bad integer {s:?}: {e}")))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_string_format() {
        assert_eq!(rational_to_string(&qr(1, 2)), "1/2");
        assert_eq!(rational_to_string(&q(7)), "7");
        assert_eq!(rational_to_string(&qr(-3, 6)), "-1/2");
        assert_eq!(rational_from_str("2/4").unwrap(), qr(1, 2));
        assert_eq!(rational_from_str("-5").unwrap(), q(-5));
        assert!(rational_from_str("x").is_err());
    }

    #[test]
    fn binomial_factorial() {
        assert_eq!(binomial(6, 3), BigInt::from(20));
        assert_eq!(binomial(4, 5), BigInt::from(0));
        assert_eq!(binomial(35, 17), "4537567650".parse::<BigInt>().unwrap());
        assert_eq!(factorial(7), BigInt::from(5040));
    }
}
