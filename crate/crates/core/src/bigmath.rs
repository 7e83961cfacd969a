//! Exact big-integer primitives: Fibonacci and Lucas evaluation, gcd/lcm and
//! integer p-adic valuation.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision non-negative integer.
pub type BigNat = BigUint;

/// Position in the Fibonacci/Lucas sequence when it is only used as a number
/// (never to materialize a sequence value).
pub type SequenceIndex = BigUint;

/// `(F_n, F_{n+1})` by fast doubling.
///
/// Walks the bits of `n` from the top, keeping `(F_k, F_{k+1})` and using
/// `F_{2k} = F_k (2 F_{k+1} - F_k)` and `F_{2k+1} = F_k^2 + F_{k+1}^2`.
pub fn fib_pair(n: u64) -> (BigNat, BigNat) {
    let mut a = BigNat::zero();
    let mut b = BigNat::one();
    if n == 0 {
        return (a, b);
    }
    for bit in (0..64 - n.leading_zeros()).rev() {
        let twice_b: BigNat = &b << 1usize;
        let c = &a * (twice_b - &a);
        let d = &a * &a + &b * &b;
        if (n >> bit) & 1 == 1 {
            b = &c + &d;
            a = d;
        } else {
            a = c;
            b = d;
        }
    }
    (a, b)
}

/// `F_n`, with `F_0 = 0`.
pub fn fib(n: u64) -> BigNat {
    fib_pair(n).0
}

/// `L_n`, with `L_0 = 2`.
pub fn lucas(n: u64) -> BigNat {
    // L_n = F_{n-1} + F_{n+1} = 2 F_{n+1} - F_n
    let (f, g) = fib_pair(n);
    (g << 1usize) - f
}

/// `(F_n mod m, F_{n+1} mod m)` for an arbitrarily large index.
pub fn fib_pair_mod(n: &BigUint, m: &BigUint) -> (BigNat, BigNat) {
    assert!(!m.is_zero(), "modulus must be positive");
    let mut a = BigNat::zero();
    let mut b = BigNat::one() % m;
    for bit in (0..n.bits()).rev() {
        let twice_b = (&b << 1usize) % m;
        let diff = (twice_b + m - &a) % m;
        let c = (&a * diff) % m;
        let d = (&a * &a + &b * &b) % m;
        if n.bit(bit) {
            b = (&c + &d) % m;
            a = d;
        } else {
            a = c;
            b = d;
        }
    }
    (a, b)
}

/// `F_n mod m`.
pub fn fib_mod(n: &BigUint, m: &BigUint) -> BigNat {
    fib_pair_mod(n, m).0
}

/// Greatest common divisor; `gcd(0, 0) = 0`.
pub fn gcd(a: &BigNat, b: &BigNat) -> BigNat {
    a.gcd(b)
}

/// Least common multiple; `lcm(a, 0) = lcm(0, a) = 0`.
pub fn lcm(a: &BigNat, b: &BigNat) -> BigNat {
    if a.is_zero() || b.is_zero() {
        return BigNat::zero();
    }
    a / a.gcd(b) * b
}

/// Largest `e` with `p^e | n`.
pub fn v_int(p: u64, n: &BigNat) -> Result<u64> {
    if p < 2 {
        return Err(Error::invalid(format!("valuation base must be at least 2, got {p}")));
    }
    if n.is_zero() {
        return Err(Error::ZeroValuation);
    }
    // Small values avoid big-integer division entirely.
    if let Some(mut small) = n.to_u128() {
        let p = u128::from(p);
        let mut e = 0;
        while small % p == 0 {
            small /= p;
            e += 1;
        }
        return Ok(e);
    }
    let p = BigNat::from(p);
    let mut rest = n.clone();
    let mut e = 0;
    loop {
        let (q, r) = rest.div_rem(&p);
        if !r.is_zero() {
            return Ok(e);
        }
        rest = q;
        e += 1;
    }
}

/// `v_p(n)` for a machine-sized `n >= 1`.
pub fn v_small(p: u64, mut n: u128) -> u64 {
    debug_assert!(p >= 2 && n != 0);
    let p = u128::from(p);
    let mut e = 0;
    while n % p == 0 {
        n /= p;
        e += 1;
    }
    e
}
