//! Core nonemptiness for transferable-utility cooperative games.
//!
//! Two independent routes: the balanced-collection criterion (scan every
//! minimal balanced collection and test `Σ λ_S v(S) ≤ v(N)`) and a direct
//! exact feasibility check of the core inequalities, whose Farkas certificate
//! is itself a weakly balanced violating family. The two must always agree.

use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::enumerate::EnumerationResult;
use crate::exact::simplex::{self, LpOutcome};
use crate::exact::{rational_from_str, Rational};
use crate::model::{check_players, Collection};
use crate::weights::WeightVector;
use crate::{Error, Result};

/// TU game: exact worth per coalition mask, `v[0] = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TUGame {
    n: usize,
    v: Vec<Rational>,
}

impl TUGame {
    pub fn new(n: usize, v: Vec<Rational>) -> Result<Self> {
        check_players(n)?;
        if v.len() != 1 << n {
            return Err(Error::InvalidInput(format!(
                "expected {} worths, got {}",
                1 << n,
                v.len()
            )));
        }
        if !v[0].is_zero() {
            return Err(Error::InvalidInput("v(∅) must be zero".into()));
        }
        Ok(Self { n, v })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn worth(&self, mask: u32) -> &Rational {
        &self.v[mask as usize]
    }

    pub fn grand_worth(&self) -> &Rational {
        &self.v[(1usize << self.n) - 1]
    }

    /// Additive game from player values.
    pub fn additive(n: usize, values: &[Rational]) -> Result<Self> {
        check_players(n)?;
        if values.len() != n {
            return Err(Error::InvalidInput("one value per player required".into()));
        }
        let v = (0..1u32 << n)
            .map(|mask| {
                (0..n)
                    .filter(|i| mask >> i & 1 == 1)
                    .fold(Rational::zero(), |a, i| a + &values[i])
            })
            .collect();
        Ok(Self { n, v })
    }

    /// All worths scaled by a positive rational; the core verdict is
    /// invariant under this.
    pub fn scaled(&self, factor: &Rational) -> Self {
        assert!(factor.is_positive());
        Self {
            n: self.n,
            v: self.v.iter().map(|w| w * factor).collect(),
        }
    }

    /// Superadditive cover: lift every worth to the best split over proper
    /// subcoalitions, processed in ascending mask order.
    pub fn superadditive_cover(&self) -> Self {
        let n = self.n;
        let mut v = self.v.clone();
        for mask in 1..(1u32 << n) {
            let mut best = v[mask as usize].clone();
            // Proper nonempty submask pairs (t, mask ∖ t).
            let mut t = (mask - 1) & mask;
            while t != 0 {
                let rest = mask & !t;
                if rest != 0 {
                    let split = &v[t as usize] + &v[rest as usize];
                    if split > best {
                        best = split;
                    }
                }
                t = (t - 1) & mask;
            }
            v[mask as usize] = best;
        }
        Self { n, v }
    }
}

impl Serialize for TUGame {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            n: usize,
            v: Vec<&'a str>,
        }
        let strings: Vec<String> = self.v.iter().map(|r| r.to_string()).collect();
        Repr {
            n: self.n,
            v: strings.iter().map(String::as_str).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TUGame {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            n: usize,
            v: Vec<String>,
        }
        let r = Repr::deserialize(d)?;
        let v =
            r.v.iter()
                .map(|s| rational_from_str(s).map_err(D::Error::custom))
                .collect::<std::result::Result<Vec<_>, _>>()?;
        TUGame::new(r.n, v).map_err(D::Error::custom)
    }
}

/// Outcome of a core-nonemptiness test: either an allocation certifying the
/// core point or a balanced family violating the worth inequality. Exactly
/// one side is present.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoreReport {
    pub nonempty: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub violating: Option<ViolatingFamily>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub allocation: Option<Allocation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolatingFamily {
    pub collection: Collection,
    pub weights: WeightVector,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Allocation {
    #[serde(with = "crate::exact::serde_rational_vec")]
    pub payoffs: Vec<Rational>,
}

impl CoreReport {
    fn check_invariants(&self) {
        debug_assert_eq!(self.nonempty, self.allocation.is_some());
        debug_assert_eq!(!self.nonempty, self.violating.is_some());
    }

    /// Exact re-verification of whichever certificate is present.
    pub fn verify(&self, g: &TUGame) -> bool {
        match (&self.allocation, &self.violating) {
            (Some(a), None) => {
                let x = &a.payoffs;
                if x.len() != g.n() {
                    return false;
                }
                let total: Rational = x.iter().fold(Rational::zero(), |acc, v| acc + v);
                if &total != g.grand_worth() {
                    return false;
                }
                (1..1u32 << g.n()).all(|mask| {
                    let sum = (0..g.n())
                        .filter(|i| mask >> i & 1 == 1)
                        .fold(Rational::zero(), |acc, i| acc + &x[i]);
                    &sum >= g.worth(mask)
                })
            }
            (None, Some(vf)) => {
                if vf.collection.n() != g.n() {
                    return false;
                }
                let lhs = vf
                    .collection
                    .masks()
                    .iter()
                    .zip(vf.weights.coords())
                    .fold(Rational::zero(), |acc, (&mask, w)| acc + w * g.worth(mask));
                &lhs > g.grand_worth()
            }
            _ => false,
        }
    }
}

/// Balanced-collection criterion: the core is nonempty iff every minimal
/// balanced collection satisfies `Σ λ_S v(S) ≤ v(N)`. The first violation in
/// canonical order is returned; otherwise the allocation comes from the
/// direct feasibility route.
pub fn core_nonempty_bondareva(g: &TUGame, mbcs: &EnumerationResult) -> Result<CoreReport> {
    if mbcs.n() != g.n() {
        return Err(Error::PlayerMismatch {
            expected: g.n(),
            got: mbcs.n(),
        });
    }
    core_nonempty_bondareva_iter(g, mbcs.items().iter().cloned())
}

/// Streaming variant over any source of minimal balanced collections (for
/// example a stored enumeration file).
pub fn core_nonempty_bondareva_iter(
    g: &TUGame,
    collections: impl IntoIterator<Item = (Collection, WeightVector)>,
) -> Result<CoreReport> {
    let grand = g.grand_worth();
    for (c, w) in collections {
        if c.n() != g.n() {
            return Err(Error::PlayerMismatch {
                expected: g.n(),
                got: c.n(),
            });
        }
        let value = c
            .masks()
            .iter()
            .zip(w.coords())
            .fold(Rational::zero(), |acc, (&mask, coeff)| {
                acc + coeff * g.worth(mask)
            });
        if &value > grand {
            let report = CoreReport {
                nonempty: false,
                violating: Some(ViolatingFamily {
                    collection: c,
                    weights: w,
                }),
                allocation: None,
            };
            report.check_invariants();
            debug_assert!(report.verify(g));
            return Ok(report);
        }
    }
    let lp = core_nonempty_lp(g)?;
    assert!(
        lp.nonempty,
        "balanced-collection scan passed but the core LP is infeasible"
    );
    Ok(lp)
}

/// Direct route: exact feasibility of `x(N) = v(N)`, `x(S) ≥ v(S)`. The
/// allocation is the witness when feasible; the scaled Farkas dual is a
/// weakly balanced violating family when not.
pub fn core_nonempty_lp(g: &TUGame) -> Result<CoreReport> {
    let n = g.n();
    if n > 8 {
        return Err(Error::SizeLimit(format!(
            "core feasibility LP supported for n ≤ 8, got {n}"
        )));
    }
    let full = (1u32 << n) - 1;
    let masks: Vec<u32> = (1..=full).collect();
    // Columns: x⁺ (n), x⁻ (n), one slack per proper coalition.
    let slack_of: std::collections::HashMap<u32, usize> = masks
        .iter()
        .filter(|&&s| s != full)
        .enumerate()
        .map(|(idx, &s)| (s, 2 * n + idx))
        .collect();
    let ncols = 2 * n + slack_of.len();
    let mut a = Vec::with_capacity(masks.len());
    let mut b = Vec::with_capacity(masks.len());
    for &s in &masks {
        let mut row = vec![Rational::zero(); ncols];
        for i in 0..n {
            if s >> i & 1 == 1 {
                row[i] = Rational::one();
                row[n + i] = -Rational::one();
            }
        }
        if let Some(&j) = slack_of.get(&s) {
            row[j] = -Rational::one();
        }
        a.push(row);
        b.push(g.worth(s).clone());
    }
    match simplex::feasible_point(&a, &b) {
        LpOutcome::Optimal { x, .. } => {
            let payoffs: Vec<Rational> = (0..n).map(|i| &x[i] - &x[n + i]).collect();
            let report = CoreReport {
                nonempty: true,
                violating: None,
                allocation: Some(Allocation { payoffs }),
            };
            report.check_invariants();
            assert!(report.verify(g), "allocation failed exact re-verification");
            Ok(report)
        }
        LpOutcome::Infeasible { farkas } => {
            // Row duals: y_S ≥ 0 on proper coalitions, Σ_{S∋i} y_S = -y_N =: t
            // for every player; scaling by t yields weakly balanced weights μ
            // with Σ μ_S v(S) > v(N).
            let t = -&farkas[masks.len() - 1];
            assert!(t.is_positive(), "farkas dual must make t positive");
            let mut sets = Vec::new();
            let mut coords = Vec::new();
            for (idx, &s) in masks.iter().enumerate() {
                if s == full {
                    continue;
                }
                let mu = &farkas[idx] / &t;
                assert!(
                    !mu.is_negative(),
                    "proper coalition dual must be nonnegative"
                );
                if mu.is_positive() {
                    sets.push(s);
                    coords.push(mu);
                }
            }
            let collection = Collection::new(n, sets)?;
            let weights = WeightVector::new(coords);
            // The scaled dual is weakly balanced: the weighted characteristic
            // vectors sum to all ones exactly.
            debug_assert!(collection
                .matrix()
                .to_qmatrix()
                .mul_vec(weights.coords())
                .iter()
                .all(|v| v.is_one()));
            let report = CoreReport {
                nonempty: false,
                violating: Some(ViolatingFamily {
                    collection,
                    weights,
                }),
                allocation: None,
            };
            report.check_invariants();
            assert!(
                report.verify(g),
                "violating family failed exact re-verification"
            );
            Ok(report)
        }
        LpOutcome::Unbounded => unreachable!("feasibility problems are never unbounded"),
    }
}

/// Uniform random worths with small denominators; `v(∅) = 0`.
pub fn random_game<R: Rng + ?Sized>(n: usize, rng: &mut R) -> TUGame {
    let mut v = vec![Rational::zero(); 1 << n];
    for entry in v.iter_mut().skip(1) {
        let num = rng.random_range(-4i64..=8);
        let den = rng.random_range(1i64..=4);
        *entry = crate::exact::qr(num, den);
    }
    TUGame { n, v }
}

/// The three-player majority family: pairs worth one, singletons zero, grand
/// coalition worth as given. The core is empty exactly when the grand worth
/// is below 3/2.
pub fn majority_game(grand: Rational) -> TUGame {
    let mut v = vec![Rational::zero(); 8];
    for mask in [0b011u32, 0b101, 0b110] {
        v[mask as usize] = Rational::one();
    }
    v[7] = grand;
    TUGame { n: 3, v }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::{enumerate_minimal, EnumerationMode};
    use crate::exact::{q, qr};
    use rand::SeedableRng;

    fn mbcs3() -> EnumerationResult {
        enumerate_minimal(3, EnumerationMode::Search).unwrap()
    }

    #[test]
    fn additive_game_has_core() {
        let g = TUGame::additive(3, &[q(1), q(1), q(1)]).unwrap();
        let r = core_nonempty_bondareva(&g, &mbcs3()).unwrap();
        assert!(r.nonempty);
        assert!(r.verify(&g));
        let lp = core_nonempty_lp(&g).unwrap();
        assert!(lp.nonempty);
    }

    #[test]
    fn majority_game_empty_core() {
        let g = majority_game(q(1));
        let r = core_nonempty_bondareva(&g, &mbcs3()).unwrap();
        assert!(!r.nonempty);
        let vf = r.violating.unwrap();
        // The violating family is the three pairs with weights 1/2.
        assert_eq!(vf.collection.masks(), &[0b011, 0b101, 0b110]);
        assert_eq!(vf.weights.coords(), &[qr(1, 2), qr(1, 2), qr(1, 2)]);
        let lp = core_nonempty_lp(&g).unwrap();
        assert!(!lp.nonempty);
        assert!(lp.verify(&g));
    }

    #[test]
    fn majority_boundary_has_core() {
        let g = majority_game(qr(3, 2));
        let r = core_nonempty_bondareva(&g, &mbcs3()).unwrap();
        assert!(r.nonempty);
        let x = r.allocation.unwrap().payoffs;
        let total: Rational = x.iter().fold(Rational::zero(), |a, v| a + v);
        assert_eq!(total, qr(3, 2));
    }

    #[test]
    fn zero_game_feasible() {
        let g = TUGame::new(3, vec![q(0); 8]).unwrap();
        let r = core_nonempty_lp(&g).unwrap();
        assert!(r.nonempty);
    }

    #[test]
    fn routes_agree_on_random_games() {
        let mbcs = mbcs3();
        let mbcs4 = enumerate_minimal(4, EnumerationMode::Search).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..60 {
            for (n, mb) in [(3usize, &mbcs), (4, &mbcs4)] {
                let g = random_game(n, &mut rng);
                let a = core_nonempty_bondareva(&g, mb).unwrap();
                let b = core_nonempty_lp(&g).unwrap();
                assert_eq!(a.nonempty, b.nonempty);
                assert!(a.verify(&g) && b.verify(&g));
                // Superadditive variant exercises the feasible path more.
                let g2 = g.superadditive_cover();
                let a2 = core_nonempty_bondareva(&g2, mb).unwrap();
                let b2 = core_nonempty_lp(&g2).unwrap();
                assert_eq!(a2.nonempty, b2.nonempty);
            }
        }
    }

    #[test]
    fn scale_covariance() {
        let mbcs = mbcs3();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..40 {
            let g = random_game(3, &mut rng);
            let verdict = core_nonempty_bondareva(&g, &mbcs).unwrap().nonempty;
            for factor in [qr(1, 3), q(2), qr(7, 5)] {
                let scaled = g.scaled(&factor);
                assert_eq!(
                    core_nonempty_bondareva(&scaled, &mbcs).unwrap().nonempty,
                    verdict
                );
            }
        }
    }

    #[test]
    fn game_json_round_trip() {
        let g = majority_game(qr(3, 2));
        let json = serde_json::to_string(&g).unwrap();
        assert_eq!(json, r#"{"n":3,"v":["0","0","0","1","0","1","1","3/2"]}"#);
        let back: TUGame = serde_json::from_str(&json).unwrap();
        assert_eq!(back, g);
        // Nonzero empty-set worth is rejected.
        let bad = r#"{"n":2,"v":["1","0","0","0"]}"#;
        assert!(serde_json::from_str::<TUGame>(bad).is_err());
    }

    #[test]
    fn player_mismatch_detected() {
        let g = TUGame::new(4, vec![q(0); 16]).unwrap();
        assert!(matches!(
            core_nonempty_bondareva(&g, &mbcs3()),
            Err(Error::PlayerMismatch { .. })
        ));
    }
}
