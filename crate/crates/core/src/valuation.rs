//! Closed-form p-adic valuation laws for Fibonacci and Lucas numbers.
//!
//! For a prime `p` everything hinges on two constants: the rank of
//! apparition `z(p)` and `v_p(F_{z(p)})`. Both are computed once per prime and
//! memoized; the laws then evaluate `v_p(F_n)` and `v_p(L_n)` for indices far
//! too large to materialize.

use std::collections::HashMap;
use std::fmt;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::bigmath::{fib_mod, v_int};
use crate::error::{Error, Result};
use crate::primes::is_prime;

/// Largest `v_p(F_{z(p)})` we are prepared to find. No prime with a value
/// above 1 is known, so hitting this cap means something is wrong.
pub const RANK_VALUATION_CAP: u32 = 64;

/// Which case of a valuation law produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LawBranch {
    /// `p = 2`, `3 ∤ n`.
    FibTwoNotMultipleOf3,
    /// `p = 2`, `n ≡ 3 (mod 6)`.
    FibTwoOddMultipleOf3,
    /// `p = 2`, `n ≡ 0 (mod 6)`.
    FibTwoMultipleOf6,
    /// `p = 5`.
    FibFive,
    /// Odd `p ≠ 5` with `z(p) | n`.
    FibRankDivides,
    /// Odd `p ≠ 5` with `z(p) ∤ n`.
    FibRankNotDividing,
    LucasTwoNotMultipleOf3,
    LucasTwoOddMultipleOf3,
    LucasTwoMultipleOf6,
    /// Odd `p ≠ 5`, `z(p)` even and `n ≡ z(p)/2 (mod z(p))`.
    LucasHalfRank,
    LucasOtherwise,
}

impl LawBranch {
    pub fn label(self) -> &'static str {
        match self {
            LawBranch::FibTwoNotMultipleOf3 | LawBranch::LucasTwoNotMultipleOf3 => "n≡1,2 mod 3",
            LawBranch::FibTwoOddMultipleOf3 | LawBranch::LucasTwoOddMultipleOf3 => "n≡3 mod 6",
            LawBranch::FibTwoMultipleOf6 | LawBranch::LucasTwoMultipleOf6 => "n≡0 mod 6",
            LawBranch::FibFive => "v_5(n)",
            LawBranch::FibRankDivides => "z(p) ∣ n",
            LawBranch::FibRankNotDividing => "z(p) ∤ n",
            LawBranch::LucasHalfRank => "z(p) even, n≡z(p)/2 mod z(p)",
            LawBranch::LucasOtherwise => "otherwise",
        }
    }
}

impl fmt::Display for LawBranch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValuationLawResult {
    pub p: u64,
    pub n: BigUint,
    pub order: u64,
    pub branch: LawBranch,
}

/// The per-prime constants the valuation laws need.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeLaw {
    pub p: u64,
    /// `z(p)`.
    pub rank: u64,
    /// `v_p(F_{z(p)})`.
    pub vp_at_rank: u64,
}

fn cache() -> &'static RwLock<HashMap<u64, PrimeLaw>> {
    static CACHE: OnceLock<RwLock<HashMap<u64, PrimeLaw>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn residue(n: &BigUint, m: u64) -> u64 {
    (n % m).to_u64().expect("residue below a u64 modulus")
}

// First k >= 1 with p | F_k, scanning at most `bound` terms.
fn scan_rank(p: u64, bound: u64) -> Option<u64> {
    let p128 = u128::from(p);
    let (mut x, mut y) = (1 % p128, 1 % p128);
    let mut k = 1u64;
    while x != 0 {
        if k >= bound {
            return None;
        }
        (x, y) = (y, (x + y) % p128);
        k += 1;
    }
    Some(k)
}

// v_p(F_rank) from residues of F_rank modulo p^2, p^3, ...
fn valuation_at_rank(p: u64, rank: u64) -> Result<u64> {
    let base = BigUint::from(p);
    let index = BigUint::from(rank);
    let mut modulus = &base * &base;
    for e in 2..=RANK_VALUATION_CAP + 1 {
        if !fib_mod(&index, &modulus).is_zero() {
            return Ok(u64::from(e - 1));
        }
        modulus *= &base;
    }
    Err(Error::internal(format!(
        "v_{p}(F_{rank}) exceeds the cap of {RANK_VALUATION_CAP}"
    )))
}

impl PrimeLaw {
    /// Constants for `p`, scanning for `z(p)` within the classical `6p` bound.
    pub fn for_prime(p: u64) -> Result<Self> {
        Self::with_rank_bound(p, p.saturating_mul(6))
    }

    /// Like [`PrimeLaw::for_prime`], for callers that already know
    /// `z(p) <= bound`. Lets large primes be handled without a `6p` scan.
    pub fn with_rank_bound(p: u64, bound: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if let Some(law) = cache().read().expect("prime law cache poisoned").get(&p) {
            return Ok(*law);
        }
        let bound = bound.min(p.saturating_mul(6));
        let rank = scan_rank(p, bound).ok_or_else(|| {
            Error::internal(format!("no zero residue of F_k mod {p} for k <= {bound}"))
        })?;
        let law = PrimeLaw { p, rank, vp_at_rank: valuation_at_rank(p, rank)? };
        cache().write().expect("prime law cache poisoned").insert(p, law);
        Ok(law)
    }

    /// `v_p(F_n)` for `n >= 1`.
    pub fn fib_order(&self, n: &BigUint) -> ValuationLawResult {
        debug_assert!(!n.is_zero());
        let p = self.p;
        let vp_n = || v_int(p, n).expect("index is positive");
        let (order, branch) = match p {
            2 => match residue(n, 6) {
                0 => (vp_n() + 2, LawBranch::FibTwoMultipleOf6),
                3 => (1, LawBranch::FibTwoOddMultipleOf3),
                _ => (0, LawBranch::FibTwoNotMultipleOf3),
            },
            5 => (vp_n(), LawBranch::FibFive),
            _ if residue(n, self.rank) == 0 => (vp_n() + self.vp_at_rank, LawBranch::FibRankDivides),
            _ => (0, LawBranch::FibRankNotDividing),
        };
        ValuationLawResult { p, n: n.clone(), order, branch }
    }

    /// `v_p(L_n)` for `n >= 1`; there is no law for `p = 5`.
    pub fn lucas_order(&self, n: &BigUint) -> Result<ValuationLawResult> {
        debug_assert!(!n.is_zero());
        let p = self.p;
        let (order, branch) = match p {
            5 => return Err(Error::invalid("no Lucas valuation law for p = 5")),
            2 => match residue(n, 6) {
                0 => (1, LawBranch::LucasTwoMultipleOf6),
                3 => (2, LawBranch::LucasTwoOddMultipleOf3),
                _ => (0, LawBranch::LucasTwoNotMultipleOf3),
            },
            _ if self.rank % 2 == 0 && residue(n, self.rank) == self.rank / 2 => (
                v_int(p, n).expect("index is positive") + self.vp_at_rank,
                LawBranch::LucasHalfRank,
            ),
            _ => (0, LawBranch::LucasOtherwise),
        };
        Ok(ValuationLawResult { p, n: n.clone(), order, branch })
    }
}

fn require_positive(n: &BigUint) -> Result<()> {
    if n.is_zero() {
        return Err(Error::invalid("sequence index must be at least 1"));
    }
    Ok(())
}

/// `v_p(F_n)` by the closed-form law.
pub fn vp_fib(p: u64, n: &BigUint) -> Result<ValuationLawResult> {
    require_positive(n)?;
    Ok(PrimeLaw::for_prime(p)?.fib_order(n))
}

/// `v_p(L_n)` by the closed-form law, `p ≠ 5`.
pub fn vp_lucas(p: u64, n: &BigUint) -> Result<ValuationLawResult> {
    require_positive(n)?;
    if p == 5 {
        return Err(Error::invalid("no Lucas valuation law for p = 5"));
    }
    PrimeLaw::for_prime(p)?.lucas_order(n)
}

/// `z(p)` for a prime `p`.
pub fn rank_of_apparition_prime(p: u64) -> Result<u64> {
    Ok(PrimeLaw::for_prime(p)?.rank)
}

/// `v_p(F_{z(p)})` for a prime `p ∉ {2, 5}`.
pub fn vp_fib_at_rank(p: u64) -> Result<u64> {
    if p == 2 || p == 5 {
        return Err(Error::invalid(format!("the law for p = {p} is explicit")));
    }
    Ok(PrimeLaw::for_prime(p)?.vp_at_rank)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigmath::{fib, lucas};

    fn idx(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn fib_law_examples() {
        let r = vp_fib(2, &idx(6)).unwrap();
        assert_eq!((r.order, r.branch), (3, LawBranch::FibTwoMultipleOf6));
        assert_eq!(r.branch.label(), "n≡0 mod 6");
        assert_eq!(vp_fib(5, &idx(25)).unwrap().order, 2);
        assert_eq!(vp_fib(7, &idx(8)).unwrap().order, 1);
        let r = vp_fib(3, &idx(7)).unwrap();
        assert_eq!((r.order, r.branch), (0, LawBranch::FibRankNotDividing));
    }

    #[test]
    fn lucas_law_examples() {
        let r = vp_lucas(2, &idx(3)).unwrap();
        assert_eq!((r.order, r.branch.label()), (2, "n≡3 mod 6"));
        assert_eq!(vp_lucas(3, &idx(2)).unwrap().order, 1);
        assert_eq!(vp_lucas(7, &idx(4)).unwrap().order, 1);
        let r = vp_lucas(11, &idx(1)).unwrap();
        assert_eq!((r.order, r.branch), (0, LawBranch::LucasOtherwise));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(vp_fib(4, &idx(6)), Err(Error::NotPrime(4)));
        assert_eq!(vp_lucas(9, &idx(6)), Err(Error::NotPrime(9)));
        assert!(matches!(vp_lucas(5, &idx(6)), Err(Error::InvalidArgument(_))));
        assert!(vp_fib(3, &idx(0)).is_err());
        assert!(vp_fib_at_rank(2).is_err());
        assert!(vp_fib_at_rank(5).is_err());
        assert_eq!(rank_of_apparition_prime(1), Err(Error::NotPrime(1)));
    }

    #[test]
    fn rank_values() {
        assert_eq!(rank_of_apparition_prime(2), Ok(3));
        assert_eq!(rank_of_apparition_prime(5), Ok(5));
        assert_eq!(rank_of_apparition_prime(7), Ok(8));
        assert_eq!(rank_of_apparition_prime(13), Ok(7));
        assert_eq!(vp_fib_at_rank(3), Ok(1));
        assert_eq!(vp_fib_at_rank(7), Ok(1));
        assert_eq!(vp_fib_at_rank(13), Ok(1));
    }

    #[test]
    fn law_handles_indices_beyond_u64() {
        let n = BigUint::from(2u32).pow(100) * 3u32 * 7u32;
        assert_eq!(vp_fib(2, &n).unwrap().order, 102);
        assert_eq!(vp_fib(7, &n).unwrap().order, 2);
        assert_eq!(vp_fib(11, &n).unwrap().order, 0);
    }

    #[test]
    fn cached_and_fresh_agree() {
        let a = PrimeLaw::for_prime(89).unwrap();
        let b = PrimeLaw::with_rank_bound(89, 1000).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.rank, 11);
    }

    #[test]
    fn small_sweep_against_factoring() {
        for p in [2u64, 3, 5, 7, 11, 13, 17] {
            for n in 1..=300u64 {
                let direct = v_int(p, &fib(n)).unwrap();
                assert_eq!(vp_fib(p, &idx(n)).unwrap().order, direct, "F_{n}, p = {p}");
                if p != 5 {
                    let direct = v_int(p, &lucas(n)).unwrap();
                    assert_eq!(vp_lucas(p, &idx(n)).unwrap().order, direct, "L_{n}, p = {p}");
                }
            }
        }
    }
}
