//! Least common multiples of runs `n, n+1, ..., n+k` of consecutive integers
//! and of the matching runs of Fibonacci and Lucas numbers.

use num_integer::Integer;
use num_traits::One;

use crate::bigmath::{fib, lcm, BigNat};
use crate::error::{Error, Result};
use crate::Family;

/// The run `n, n+1, ..., n+k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RunSpec {
    pub n: u64,
    pub k: u32,
}

impl RunSpec {
    pub fn new(n: u64, k: u32) -> Self {
        RunSpec { n, k }
    }

    fn indices(self) -> impl Iterator<Item = u64> {
        (0..=u64::from(self.k)).map(move |i| self.n + i)
    }

    fn check_start(self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::invalid("run must start at n >= 1"));
        }
        self.n
            .checked_add(u64::from(self.k))
            .ok_or_else(|| Error::invalid("run end overflows u64"))?;
        Ok(())
    }

    fn check_closed(self) -> Result<()> {
        self.check_start()?;
        if !(1..=6).contains(&self.k) {
            return Err(Error::NoClosedForm(self.k));
        }
        Ok(())
    }
}

/// `product = lcm * cofactor`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LcmDecomposition {
    pub product: BigNat,
    pub lcm: BigNat,
    pub cofactor: BigNat,
}

pub fn int_run_product(spec: RunSpec) -> BigNat {
    spec.indices().map(BigNat::from).product()
}

pub fn seq_run_product(spec: RunSpec, family: Family) -> BigNat {
    spec.indices().map(|i| family.term(i)).product()
}

/// Pairwise lcm fold over an arbitrary sequence of values.
pub fn lcm_fold<I: IntoIterator<Item = BigNat>>(values: I) -> BigNat {
    values.into_iter().fold(BigNat::one(), |acc, v| lcm(&acc, &v))
}

/// `g_k(n) = n(n+1)...(n+k) / [n, ..., n+k]` through the gcd recursion
/// `g_k(n) = (k!, (n+k) g_{k-1}(n))` with `g_0 = g_1 = 1`.
pub fn g_rec(spec: RunSpec) -> BigNat {
    let mut g = BigNat::one();
    let mut factorial = BigNat::one();
    for k in 2..=u64::from(spec.k) {
        factorial *= k;
        g = factorial.gcd(&(BigNat::from(spec.n + k) * &g));
    }
    g
}

/// `[n, ..., n+k]` for any `k`, as the run product over `g_rec`.
pub fn lcm_run(spec: RunSpec) -> BigNat {
    int_run_product(spec) / g_rec(spec)
}

fn small_gcd(m: u128, x: u128) -> u128 {
    m.gcd(&x)
}

/// Closed-form `g_k(n)` for `1 <= k <= 6`.
pub fn g_closed(spec: RunSpec) -> Result<u128> {
    spec.check_closed()?;
    let n = u128::from(spec.n);
    let pair = n * (n + 1);
    Ok(match spec.k {
        1 => 1,
        2 => small_gcd(2, n),
        3 => 2 * small_gcd(3, n),
        4 => 2 * small_gcd(4, n) * small_gcd(3, pair),
        5 => 6 * small_gcd(5, n) * small_gcd(4, pair),
        6 => {
            let inner = small_gcd(2, pair / 2);
            12 * small_gcd(3, n) * small_gcd(5, pair) * small_gcd(4, (n + 2) * inner % 4)
        }
        _ => unreachable!(),
    })
}

/// `[n, ..., n+k]` from the closed forms, `1 <= k <= 6`.
pub fn lcm_run_closed(spec: RunSpec) -> Result<BigNat> {
    let g = g_closed(spec)?;
    Ok(int_run_product(spec) / BigNat::from(g))
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// Closed-form `P_k / [F_n, ..., F_{n+k}]`, `1 <= k <= 6`.
fn fib_cofactor_closed(spec: RunSpec) -> Result<BigNat> {
    spec.check_closed()?;
    let n = spec.n;
    let f = |i: u64| fib(i);
    Ok(match spec.k {
        1 | 2 => BigNat::one(),
        3 => f(gcd_u64(n, 3)),
        4 => {
            let base = f(gcd_u64(n, 4));
            if n % 3 == 1 {
                base
            } else {
                base * 2u32
            }
        }
        5 => {
            let base = f(gcd_u64(n, 5));
            if matches!(n % 4, 1 | 2) {
                base * 2u32
            } else {
                base * 6u32
            }
        }
        6 => {
            let five = if n % 5 == 0 || n % 5 == 4 { 5 } else { 1 };
            let base = f(five) * f(gcd_u64(n, 6));
            if n % 4 == 1 {
                base * 2u32
            } else {
                base * 6u32
            }
        }
        _ => unreachable!(),
    })
}

/// Closed-form `P_k / [L_n, ..., L_{n+k}]`, `1 <= k <= 6`.
fn lucas_cofactor_closed(spec: RunSpec) -> Result<BigNat> {
    spec.check_closed()?;
    let n = spec.n;
    Ok(match spec.k {
        1 | 2 => BigNat::one(),
        3 => fib(gcd_u64(n, 3)),
        4 => {
            // (n-2, 4) taken on |n-2|, with (0, 4) = 4
            let base = fib(gcd_u64(n.abs_diff(2), 4));
            if n % 3 == 1 {
                base
            } else {
                base * 2u32
            }
        }
        5 => BigNat::from(if matches!(n % 4, 1 | 2) { 6u32 } else { 2 }),
        6 => {
            let v2 = v_two_lucas(n);
            let base = BigNat::from(2u32) << v2 as usize;
            if n % 4 == 3 {
                base
            } else {
                base * 3u32
            }
        }
        _ => unreachable!(),
    })
}

// v_2(L_n)
fn v_two_lucas(n: u64) -> u64 {
    match n % 6 {
        0 => 1,
        3 => 2,
        _ => 0,
    }
}

/// `[F_n, ..., F_{n+k}]` from the closed forms, `1 <= k <= 6`.
pub fn lcm_fib_run(spec: RunSpec) -> Result<BigNat> {
    let cofactor = fib_cofactor_closed(spec)?;
    Ok(exact_div(seq_run_product(spec, Family::Fibonacci), &cofactor))
}

/// `[L_n, ..., L_{n+k}]` from the closed forms, `1 <= k <= 6`.
pub fn lcm_lucas_run(spec: RunSpec) -> Result<BigNat> {
    let cofactor = lucas_cofactor_closed(spec)?;
    Ok(exact_div(seq_run_product(spec, Family::Lucas), &cofactor))
}

fn exact_div(num: BigNat, den: &BigNat) -> BigNat {
    let (q, r) = num.div_rem(den);
    debug_assert!(r == BigNat::from(0u32), "closed-form cofactor does not divide the product");
    q
}

/// `f_k(n)`: run product over run lcm. Closed forms for `k <= 6`, direct
/// lcm folding beyond.
pub fn cofactor_f(spec: RunSpec, family: Family) -> Result<BigNat> {
    spec.check_start()?;
    match spec.k {
        0 => Err(Error::invalid("cofactor needs k >= 1")),
        1..=6 => match family {
            Family::Fibonacci => fib_cofactor_closed(spec),
            Family::Lucas => lucas_cofactor_closed(spec),
        },
        _ => {
            let terms: Vec<BigNat> = spec.indices().map(|i| family.term(i)).collect();
            let product: BigNat = terms.iter().product();
            Ok(product / lcm_fold(terms))
        }
    }
}

/// Integer run split into its lcm and `g_k(n)`.
pub fn decompose_ints(spec: RunSpec) -> Result<LcmDecomposition> {
    spec.check_start()?;
    let product = int_run_product(spec);
    let cofactor = g_rec(spec);
    let lcm = &product / &cofactor;
    Ok(LcmDecomposition { product, lcm, cofactor })
}

/// Fibonacci or Lucas run split into its lcm and `f_k(n)`.
pub fn decompose_run(spec: RunSpec, family: Family) -> Result<LcmDecomposition> {
    let cofactor = cofactor_f(spec, family)?;
    let product = seq_run_product(spec, family);
    let lcm = exact_div(product.clone(), &cofactor);
    Ok(LcmDecomposition { product, lcm, cofactor })
}

// Used by the general product algorithm, which also needs the degenerate
// single-term run.
pub(crate) fn cofactor_any(spec: RunSpec, family: Family) -> Result<BigNat> {
    if spec.k == 0 {
        Ok(BigNat::one())
    } else {
        cofactor_f(spec, family)
    }
}
