//! Divisibility and gcd identities for Fibonacci and Lucas numbers, and the
//! brute-force order of appearance `z(m)`.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::bigmath::{fib, lucas, BigNat};
use crate::error::{Error, Result};

/// Which case of the Lucas gcd identities applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GcdCase {
    /// The gcd is `L_d`.
    LucasOfGcd,
    /// `3 | d`, the gcd is 2.
    Two,
    /// `3 ∤ d`, the gcd is 1.
    One,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GcdCaseResult {
    pub value: BigNat,
    pub case: GcdCase,
    pub case_label: &'static str,
    /// `d = (m, n)`.
    pub d: u64,
}

fn require_at_least(name: &str, v: &BigUint, min: u32) -> Result<()> {
    if *v < BigUint::from(min) {
        return Err(Error::invalid(format!("{name} must be at least {min}, got {v}")));
    }
    Ok(())
}

/// `F_n | F_m`, decided on the indices alone (`n >= 3`, `m >= 1`).
pub fn fib_divides(n: &BigUint, m: &BigUint) -> Result<bool> {
    require_at_least("n", n, 3)?;
    require_at_least("m", m, 1)?;
    Ok(m.is_multiple_of(n))
}

/// `(F_m, F_n) = F_{(m,n)}`.
pub fn gcd_fib(m: u64, n: u64) -> Result<BigNat> {
    if m == 0 || n == 0 {
        return Err(Error::invalid("indices must be at least 1"));
    }
    Ok(fib(m.gcd(&n)))
}

/// `L_n | F_m` iff `2n | m` (`n >= 2`).
pub fn lucas_divides_fib(n: &BigUint, m: &BigUint) -> Result<bool> {
    require_at_least("n", n, 2)?;
    require_at_least("m", m, 1)?;
    Ok(m.is_multiple_of(&(n << 1usize)))
}

fn small_case(d: u64) -> (GcdCase, BigNat, &'static str) {
    if d % 3 == 0 {
        (GcdCase::Two, BigNat::from(2u32), "3∣d, gives 2")
    } else {
        (GcdCase::One, BigNat::one(), "3∤d, gives 1")
    }
}

/// `(L_m, L_n)`.
pub fn gcd_lucas_lucas(m: u64, n: u64) -> Result<GcdCaseResult> {
    if m == 0 || n == 0 {
        return Err(Error::invalid("indices must be at least 1"));
    }
    let d = m.gcd(&n);
    let (case, value, case_label) = if (m / d) % 2 == 1 && (n / d) % 2 == 1 {
        (GcdCase::LucasOfGcd, lucas(d), "both quotients odd")
    } else {
        small_case(d)
    };
    Ok(GcdCaseResult { value, case, case_label, d })
}

/// `(F_m, L_n)`.
pub fn gcd_fib_lucas(m: u64, n: u64) -> Result<GcdCaseResult> {
    if m == 0 || n == 0 {
        return Err(Error::invalid("indices must be at least 1"));
    }
    let d = m.gcd(&n);
    let (case, value, case_label) = if (m / d) % 2 == 0 && (n / d) % 2 == 1 {
        (GcdCase::LucasOfGcd, lucas(d), "m/d even, n/d odd")
    } else {
        small_case(d)
    };
    Ok(GcdCaseResult { value, case, case_label, d })
}

/// Why a scan stopped without finding `z(m)`.
enum ScanStop {
    Bound,
    Budget,
}

// Pair (F_k mod m, F_{k+1} mod m) held in fixed-width limbs so each step is
// an in-place add and conditional subtract with no allocation.
struct LimbScanner {
    modulus: Vec<u64>,
    x: Vec<u64>,
    y: Vec<u64>,
}

impl LimbScanner {
    fn new(m: &BigUint) -> Self {
        let modulus = m.to_u64_digits();
        let mut one = vec![0u64; modulus.len()];
        one[0] = 1;
        LimbScanner { x: one.clone(), y: one, modulus }
    }

    fn x_is_zero(&self) -> bool {
        self.x.iter().all(|&l| l == 0)
    }

    fn step(&mut self) {
        let mut carry = false;
        for (a, &b) in self.x.iter_mut().zip(&self.y) {
            let (s1, c1) = a.overflowing_add(b);
            let (s2, c2) = s1.overflowing_add(u64::from(carry));
            *a = s2;
            carry = c1 || c2;
        }
        if carry || !less_than(&self.x, &self.modulus) {
            let mut borrow = false;
            for (a, &b) in self.x.iter_mut().zip(&self.modulus) {
                let (d1, b1) = a.overflowing_sub(b);
                let (d2, b2) = d1.overflowing_sub(u64::from(borrow));
                *a = d2;
                borrow = b1 || b2;
            }
        }
        std::mem::swap(&mut self.x, &mut self.y);
    }
}

fn less_than(a: &[u64], b: &[u64]) -> bool {
    for (x, y) in a.iter().rev().zip(b.iter().rev()) {
        if x != y {
            return x < y;
        }
    }
    false
}

// Smallest k in 1..=limit with m | F_k.
fn scan(m: &BigUint, limit: u64) -> Option<u64> {
    if m.is_one() {
        return Some(1);
    }
    if let Some(small) = m.to_u64().filter(|&v| v < 1 << 63) {
        let (mut x, mut y) = (1u64, 1u64);
        let mut k = 1u64;
        while x != 0 {
            if k >= limit {
                return None;
            }
            let mut s = x + y;
            if s >= small {
                s -= small;
            }
            (x, y) = (y, s);
            k += 1;
        }
        return Some(k);
    }
    let mut scanner = LimbScanner::new(m);
    let mut k = 1u64;
    while !scanner.x_is_zero() {
        if k >= limit {
            return None;
        }
        scanner.step();
        k += 1;
    }
    Some(k)
}

fn six_m_bound(m: &BigUint) -> u64 {
    (m * 6u32).to_u64().unwrap_or(u64::MAX)
}

fn scan_with_budget(m: &BigUint, budget: Option<u64>) -> std::result::Result<u64, ScanStop> {
    let bound = six_m_bound(m);
    match budget {
        Some(b) if b < bound => scan(m, b).ok_or(ScanStop::Budget),
        _ => scan(m, bound).ok_or(ScanStop::Bound),
    }
}

/// `z(m)`, the smallest `k >= 1` with `m | F_k`, by scanning residues of the
/// Fibonacci sequence modulo `m`. Fails loudly past the `6m` bound.
pub fn z_oracle(m: &BigUint) -> Result<u64> {
    z_oracle_budgeted(m, None)
}

/// [`z_oracle`] that gives up after `budget` steps.
pub fn z_oracle_budgeted(m: &BigUint, budget: Option<u64>) -> Result<u64> {
    if m.is_zero() {
        return Err(Error::invalid("m must be at least 1"));
    }
    scan_with_budget(m, budget).map_err(|stop| match stop {
        ScanStop::Budget => Error::BudgetExceeded {
            estimated: m * 6u32,
            budget: budget.unwrap_or(u64::MAX),
        },
        ScanStop::Bound => {
            Error::internal(format!("no multiple of {m} among F_1..F_{}", six_m_bound(m)))
        }
    })
}
