//! `z` of products of consecutive Fibonacci or Lucas numbers.
//!
//! With `a = [n, ..., n+k]` (doubled for Lucas) every member of the run
//! divides `F_a`, so `z(b) = a j` and the only obstruction to `j = 1` comes
//! from primes dividing the cofactor `f_k(n) = b / [members]`. Each such
//! prime divides two members of the run and therefore some `F_d` (or `L_d`)
//! with `d <= k`, which keeps the candidate primes small enough to factor.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::bigmath::{v_int, BigNat};
use crate::error::{Error, Result};
use crate::fibstruct::z_oracle_budgeted;
use crate::lcmkit::{cofactor_any, cofactor_f, int_run_product, lcm_run, seq_run_product, RunSpec};
use crate::primes::prime_factors;
use crate::tables::{theorem_table, Base, ResidueTable, FIB_K4_PLAIN};
use crate::valuation::PrimeLaw;
use crate::Family;

/// Default cap on modular additions the oracle route may spend.
pub const DEFAULT_ORACLE_BUDGET: u64 = 100_000_000;

/// Steps allowed per unit of `v_p(b)` when searching exponents; the search
/// ends long before this on valid input.
const EXPONENT_SEARCH_SLACK: u64 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProductSpec {
    pub family: Family,
    pub n: u64,
    pub k: u32,
}

impl ProductSpec {
    pub fn new(family: Family, n: u64, k: u32) -> Self {
        ProductSpec { family, n, k }
    }

    pub fn fib(n: u64, k: u32) -> Self {
        Self::new(Family::Fibonacci, n, k)
    }

    pub fn lucas(n: u64, k: u32) -> Self {
        Self::new(Family::Lucas, n, k)
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::invalid("n must be at least 1"));
        }
        if self.k == 0 {
            return Err(Error::invalid("k must be at least 1"));
        }
        if self.n.checked_add(u64::from(self.k)).is_none() {
            return Err(Error::invalid("n + k overflows u64"));
        }
        Ok(())
    }

    fn run(&self) -> RunSpec {
        RunSpec::new(self.n, self.k)
    }

    /// `b`, the product itself.
    pub fn product(&self) -> BigNat {
        seq_run_product(self.run(), self.family)
    }

    /// `a`: the run lcm, doubled for Lucas products.
    pub fn base_a(&self) -> BigNat {
        base_a(self.family, self.run())
    }
}

impl fmt::Display for ProductSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(n={}, k={})", self.family, self.n, self.k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    ClosedForm,
    General,
    Oracle,
}

impl Route {
    pub fn name(self) -> &'static str {
        match self {
            Route::ClosedForm => "closed_form",
            Route::General => "general",
            Route::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `z = base_a * multiplier_j * extra_c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZResult {
    pub z: BigNat,
    pub base_a: BigNat,
    pub multiplier_j: BigNat,
    pub extra_c: u64,
    pub route: Route,
    /// Residue class that selected the table row; closed-form route only.
    pub residue_case: Option<String>,
    /// Label of the table row, e.g. `6ac`; closed-form route only.
    pub row_label: Option<String>,
}

impl ZResult {
    fn plain(z: BigNat, base_a: BigNat, multiplier_j: BigNat, route: Route) -> Self {
        ZResult { z, base_a, multiplier_j, extra_c: 1, route, residue_case: None, row_label: None }
    }
}

fn base_a(family: Family, run: RunSpec) -> BigNat {
    let a = lcm_run(run);
    match family {
        Family::Fibonacci => a,
        Family::Lucas => a << 1usize,
    }
}

/// `z` read off a residue table.
pub fn z_from_table(table: &ResidueTable, n: u64) -> Result<ZResult> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    let run = RunSpec::new(n, table.k);
    let hit = table.lookup(n)?;
    let residue_case = Some(hit.case_label(n));
    let row_label = Some(hit.row.label.to_string());
    match table.base {
        Base::Product => {
            let z = hit.row.apply(&int_run_product(run), n)?;
            Ok(ZResult {
                base_a: z.clone(),
                z,
                multiplier_j: BigNat::one(),
                extra_c: 1,
                route: Route::ClosedForm,
                residue_case,
                row_label,
            })
        }
        Base::Lcm | Base::DoubleLcm => {
            let a = base_a(table.family, run);
            let j = BigNat::from(hit.row.multiplier(n)?);
            let c = table.extra.value(n);
            Ok(ZResult {
                z: &a * &j * c,
                base_a: a,
                multiplier_j: j,
                extra_c: c,
                route: Route::ClosedForm,
                residue_case,
                row_label,
            })
        }
    }
}

/// `z(b)` from the residue tables, `k ∈ {4, 5, 6}`.
pub fn z_product_closed(spec: ProductSpec) -> Result<ZResult> {
    spec.validate()?;
    z_from_table(theorem_table(spec.family, spec.k)?, spec.n)
}

/// `z(F_n ... F_{n+4})` as the run product over a residue-dependent
/// denominator.
pub fn corollary_plain_form(n: u64) -> Result<BigNat> {
    Ok(z_from_table(&FIB_K4_PLAIN, n)?.z)
}

/// One prime obstruction: `v_p(F_z)` must reach `v_p(b)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeConstraint {
    pub law: PrimeLaw,
    pub vp_product: u64,
}

impl PrimeConstraint {
    pub fn p(&self) -> u64 {
        self.law.p
    }

    pub fn satisfied_at(&self, index: &BigUint) -> bool {
        self.law.fib_order(index).order >= self.vp_product
    }
}

// Indices before this one hold the value 1 and drop out of the product.
fn first_nontrivial(family: Family) -> u64 {
    match family {
        Family::Fibonacci => 3,
        Family::Lucas => 2,
    }
}

// The run with its leading unit terms removed, or None when b = 1.
fn reduced_run(spec: ProductSpec) -> Option<RunSpec> {
    let end = spec.n + u64::from(spec.k);
    let start = spec.n.max(first_nontrivial(spec.family));
    (start <= end).then(|| RunSpec::new(start, (end - start) as u32))
}

fn candidate_primes(family: Family, k: u32) -> Result<Vec<u64>> {
    let mut primes = vec![2];
    for d in 1..=u64::from(k) {
        let term = family.term(d);
        let value = term.to_u64().ok_or_else(|| {
            Error::Unsupported(format!(
                "{}_{d} exceeds 64 bits; the general route supports runs up to k = 90",
                family
            ))
        })?;
        primes.extend(prime_factors(value));
    }
    primes.sort_unstable();
    primes.dedup();
    Ok(primes)
}

fn constraints_for_run(family: Family, run: RunSpec) -> Result<Vec<PrimeConstraint>> {
    let mut rest = cofactor_any(run, family)?;
    if rest.is_one() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    // A prime of the cofactor divides F_d or L_d for some d <= k, so its rank
    // is at most 2k.
    let rank_bound = 2 * u64::from(run.k) + 6;
    for p in candidate_primes(family, run.k)? {
        let pb = BigUint::from(p);
        if !rest.is_multiple_of(&pb) {
            continue;
        }
        while rest.is_multiple_of(&pb) {
            rest /= &pb;
        }
        let law = PrimeLaw::with_rank_bound(p, rank_bound)?;
        let mut vp_product = 0;
        for i in 0..=u64::from(run.k) {
            let index = BigUint::from(run.n + i);
            vp_product += match family {
                Family::Fibonacci => law.fib_order(&index).order,
                Family::Lucas => law.lucas_order(&index)?.order,
            };
        }
        out.push(PrimeConstraint { law, vp_product });
    }
    if !rest.is_one() {
        return Err(Error::internal(format!(
            "cofactor of {family}(n={}, k={}) has a prime factor outside the candidates",
            run.n, run.k
        )));
    }
    Ok(out)
}

/// The prime obstructions the general route has to clear, for the run
/// after dropping leading unit terms. Empty when `j = 1` is forced.
pub fn prime_constraints(spec: ProductSpec) -> Result<Vec<PrimeConstraint>> {
    spec.validate()?;
    match reduced_run(spec) {
        Some(run) => constraints_for_run(spec.family, run),
        None => Ok(Vec::new()),
    }
}

/// `z(b)` by valuation matching: `z = a j` with `j` the smallest positive
/// integer for which `v_p(F_{aj}) >= v_p(b)` at every prime `p | f_k(n)`.
///
/// Leading terms equal to 1 (`F_1`, `F_2`, `L_1`) are dropped first, so the
/// reported `a` is the lcm over the remaining run.
pub fn z_product_general(spec: ProductSpec) -> Result<ZResult> {
    spec.validate()?;
    let Some(run) = reduced_run(spec) else {
        return Ok(ZResult::plain(BigNat::one(), BigNat::one(), BigNat::one(), Route::General));
    };
    let a = base_a(spec.family, run);
    let constraints = constraints_for_run(spec.family, run)?;

    let mut j = BigNat::one();
    for c in &constraints {
        let p = c.p();
        let mut index = a.clone();
        let mut step = BigNat::one();
        let mut e = 0u64;
        while !c.satisfied_at(&index) {
            e += 1;
            if e > c.vp_product + EXPONENT_SEARCH_SLACK {
                return Err(Error::internal(format!(
                    "no exponent of {p} lifts v_{p}(F_aj) to {} for {spec}",
                    c.vp_product
                )));
            }
            index *= p;
            step *= p;
        }
        j *= step;
    }

    let z = &a * &j;
    // The exponents were found one prime at a time; re-check all of them on
    // the final index with the full laws.
    if let Some(c) = constraints.iter().find(|c| !c.satisfied_at(&z)) {
        return Err(Error::internal(format!(
            "prime {} unsatisfied at z = {z} for {spec}",
            c.p()
        )));
    }
    Ok(ZResult::plain(z, a, j, Route::General))
}

/// Upper bound on `z(b)`: `a f_k(n)`. Used to decide whether the oracle is
/// affordable before scanning.
pub fn oracle_cost_estimate(spec: ProductSpec) -> Result<BigNat> {
    spec.validate()?;
    Ok(spec.base_a() * cofactor_f(spec.run(), spec.family)?)
}

/// `z(b)` by scanning Fibonacci residues modulo `b`, spending at most
/// `budget` steps.
///
/// Refused without scanning when `a`, a lower bound on `z`, already exceeds
/// the budget. The error carries the upper bound `a f_k(n)` as the estimate.
pub fn z_product_oracle(spec: ProductSpec, budget: u64) -> Result<ZResult> {
    let estimated = oracle_cost_estimate(spec)?;
    let a = spec.base_a();
    let over = || Error::BudgetExceeded { estimated: estimated.clone(), budget };
    if a > BigNat::from(budget) && reduced_run(spec).map(|r| r.n) == Some(spec.n) {
        return Err(over());
    }
    let b = spec.product();
    let z = match z_oracle_budgeted(&b, Some(budget)) {
        Ok(z) => BigNat::from(z),
        Err(Error::BudgetExceeded { .. }) => return Err(over()),
        Err(e) => return Err(e),
    };
    let (base, j) = if z.is_multiple_of(&a) {
        let j = &z / &a;
        (a, j)
    } else {
        // Possible only when leading unit terms make a too large.
        (z.clone(), BigNat::one())
    };
    Ok(ZResult::plain(z, base, j, Route::Oracle))
}

/// Oracle budget from `FIBRANK_ORACLE_BUDGET`, falling back to the default.
pub fn oracle_budget_from_env() -> Result<u64> {
    match std::env::var("FIBRANK_ORACLE_BUDGET") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::invalid(format!("FIBRANK_ORACLE_BUDGET={v:?} is not a step count"))),
        Err(_) => Ok(DEFAULT_ORACLE_BUDGET),
    }
}

/// Is `v_p(F_z) >= v_p(b)` for every prime obstruction, and does removing
/// any single prime from `z / a` break one of them? Returns `(divides,
/// minimal)`.
pub fn witness_check(spec: ProductSpec, result: &ZResult) -> Result<(bool, bool)> {
    let constraints = prime_constraints(spec)?;
    let holds = |z: &BigNat| constraints.iter().all(|c| c.satisfied_at(z));
    let divides = holds(&result.z);
    let j = &result.z / &result.base_a;
    let mut minimal = true;
    for c in &constraints {
        let p = BigNat::from(c.p());
        if j.is_multiple_of(&p) && holds(&(&result.z / &p)) {
            minimal = false;
        }
    }
    // Primes of j outside the constraint set would also make it non-minimal.
    let mut rest = j;
    for c in &constraints {
        let p = BigNat::from(c.p());
        while rest.is_multiple_of(&p) {
            rest /= &p;
        }
    }
    if !rest.is_one() {
        minimal = false;
    }
    Ok((divides, minimal))
}

/// `v_p(b)` computed directly from the product, for small products.
pub fn vp_product_direct(spec: ProductSpec, p: u64) -> Result<u64> {
    v_int(p, &spec.product())
}
