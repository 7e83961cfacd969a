//! Residue tables for `z` of products of consecutive Fibonacci and Lucas
//! numbers, stored as data.
//!
//! A table maps the class of `n` modulo 12, 24, 36 or 72 to a multiplier of
//! a base value (`a`, `2a` or the plain run product). Multipliers are
//! rationals of the form
//!
//! ```text
//! numerator / (denominator * (m_1, (n+s_11)(n+s_12)...) * (m_2, ...) ...)
//! ```
//!
//! so that gcd-style rows like `72a/((8,n)(9,n+1))` and constant rows like
//! `3a` share one evaluator. The CLI prints these same structures.

use num_bigint::BigUint;
use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::Family;

/// `(modulus, (n + shifts[0]) (n + shifts[1]) ...)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GcdTerm {
    pub modulus: u64,
    pub shifts: &'static [i64],
}

impl GcdTerm {
    pub fn eval(&self, n: u64) -> u64 {
        let m = i128::from(self.modulus);
        let r = i128::from(n % self.modulus);
        let prod = self
            .shifts
            .iter()
            .fold(1i128, |acc, &s| acc * (r + i128::from(s)).rem_euclid(m) % m);
        // (m, 0) = m
        self.modulus.gcd(&(prod as u64))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Condition {
    Residues { modulus: u64, residues: &'static [u64] },
    Otherwise,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Row {
    pub label: &'static str,
    pub numerator: u64,
    pub denominator: u64,
    pub gcd_terms: &'static [GcdTerm],
    pub conditions: &'static [Condition],
}

impl Row {
    fn full_denominator(&self, n: u64) -> u64 {
        self.gcd_terms.iter().fold(self.denominator, |acc, t| acc * t.eval(n))
    }

    /// The multiplier at `n`, for rows that scale `a` by a whole number.
    pub fn multiplier(&self, n: u64) -> Result<u64> {
        let den = self.full_denominator(n);
        if self.numerator % den != 0 {
            return Err(Error::internal(format!(
                "row {} does not reduce to an integer at n = {n}",
                self.label
            )));
        }
        Ok(self.numerator / den)
    }

    /// `base * numerator / denominator`, which must be exact.
    pub fn apply(&self, base: &BigUint, n: u64) -> Result<BigUint> {
        let (q, r) = (base * self.numerator).div_rem(&BigUint::from(self.full_denominator(n)));
        if r != BigUint::default() {
            return Err(Error::internal(format!(
                "row {} does not divide its base at n = {n}",
                self.label
            )));
        }
        Ok(q)
    }
}

/// What the row multiplier scales.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Base {
    /// `a = [n, ..., n+k]`.
    Lcm,
    /// `a = 2 [n, ..., n+k]`.
    DoubleLcm,
    /// `n (n+1) ... (n+k)`; multipliers are reciprocals.
    Product,
}

/// The extra factor `c` some tables carry next to `a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtraFactor {
    None,
    /// `c = (5, n)`.
    FiveN,
    /// `c = (5, n(n+1))`.
    FiveNN1,
}

impl ExtraFactor {
    pub fn value(self, n: u64) -> u64 {
        match self {
            ExtraFactor::None => 1,
            ExtraFactor::FiveN if n % 5 == 0 => 5,
            ExtraFactor::FiveNN1 if n % 5 == 0 || n % 5 == 4 => 5,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ResidueTable {
    pub name: &'static str,
    pub family: Family,
    pub k: u32,
    pub base: Base,
    pub extra: ExtraFactor,
    pub rows: &'static [Row],
}

/// The row that fired and the congruence that selected it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RowMatch {
    pub index: usize,
    pub row: &'static Row,
    pub condition: Condition,
}

impl RowMatch {
    /// `n≡r (mod m)` for the matching congruence, or `otherwise`.
    pub fn case_label(&self, n: u64) -> String {
        match self.condition {
            Condition::Residues { modulus, .. } => format!("n≡{} (mod {modulus})", n % modulus),
            Condition::Otherwise => "otherwise".to_string(),
        }
    }
}

impl ResidueTable {
    /// Least common multiple of the congruence moduli in the table.
    pub fn period(&self) -> u64 {
        let mut period = 1u64;
        for row in self.rows {
            for c in row.conditions {
                if let Condition::Residues { modulus, .. } = c {
                    period = period.lcm(modulus);
                }
            }
        }
        period
    }

    /// Every row whose explicit congruences contain `n`.
    pub fn explicit_matches(&self, n: u64) -> Vec<RowMatch> {
        let mut out = Vec::new();
        for (index, row) in self.rows.iter().enumerate() {
            for &condition in row.conditions {
                if let Condition::Residues { modulus, residues } = condition {
                    if residues.contains(&(n % modulus)) {
                        out.push(RowMatch { index, row, condition });
                    }
                }
            }
        }
        out
    }

    /// The row for `n`. Explicit congruences win over an `otherwise` row.
    pub fn lookup(&self, n: u64) -> Result<RowMatch> {
        let explicit = self.explicit_matches(n);
        match explicit.as_slice() {
            [m] => return Ok(*m),
            [] => {}
            _ => {
                return Err(Error::internal(format!(
                    "{}: n = {n} matches {} congruences",
                    self.name,
                    explicit.len()
                )))
            }
        }
        self.rows
            .iter()
            .enumerate()
            .find(|(_, r)| r.conditions.contains(&Condition::Otherwise))
            .map(|(index, row)| RowMatch { index, row, condition: Condition::Otherwise })
            .ok_or_else(|| Error::internal(format!("{}: no row for n = {n}", self.name)))
    }
}

const fn res(modulus: u64, residues: &'static [u64]) -> Condition {
    Condition::Residues { modulus, residues }
}

const fn term(modulus: u64, shifts: &'static [i64]) -> GcdTerm {
    GcdTerm { modulus, shifts }
}

const fn times(label: &'static str, numerator: u64, conditions: &'static [Condition]) -> Row {
    Row { label, numerator, denominator: 1, gcd_terms: &[], conditions }
}

const fn ratio(
    label: &'static str,
    numerator: u64,
    gcd_terms: &'static [GcdTerm],
    conditions: &'static [Condition],
) -> Row {
    Row { label, numerator, denominator: 1, gcd_terms, conditions }
}

const fn over(label: &'static str, denominator: u64, conditions: &'static [Condition]) -> Row {
    Row { label, numerator: 1, denominator, gcd_terms: &[], conditions }
}

/// `z(F_n ... F_{n+4})`, residue form.
pub static FIB_K4: ResidueTable = ResidueTable {
    name: "fib-k4",
    family: Family::Fibonacci,
    k: 4,
    base: Base::Lcm,
    extra: ExtraFactor::None,
    rows: &[
        times("a", 1, &[res(12, &[1, 2, 3, 4, 5, 6, 7, 10]), res(72, &[8, 60])]),
        times("2a", 2, &[res(12, &[9, 11]), res(72, &[24, 44])]),
        times("3a", 3, &[res(72, &[12, 32, 36, 56])]),
        times("6a", 6, &[res(72, &[0, 20, 48, 68])]),
    ],
};

/// `z(F_n ... F_{n+4})`, gcd form.
pub static FIB_K4_GCD: ResidueTable = ResidueTable {
    name: "fib-k4-gcd",
    family: Family::Fibonacci,
    k: 4,
    base: Base::Lcm,
    extra: ExtraFactor::None,
    rows: &[
        times("a", 1, &[res(3, &[1]), res(12, &[2, 3, 5, 6])]),
        times("2a", 2, &[res(12, &[9, 11])]),
        ratio("72a/((8,n)(9,n+1))", 72, &[term(8, &[0]), term(9, &[1])], &[res(12, &[8])]),
        ratio("72a/((8,n+4)(9,n+3))", 72, &[term(8, &[4]), term(9, &[3])], &[res(12, &[0])]),
    ],
};

/// `z(F_n ... F_{n+4})` as the plain product over a small denominator.
pub static FIB_K4_PLAIN: ResidueTable = ResidueTable {
    name: "fib-k4-plain",
    family: Family::Fibonacci,
    k: 4,
    base: Base::Product,
    extra: ExtraFactor::None,
    rows: &[
        over("n(n+1)(n+2)(n+3)(n+4)/2", 2, &[res(12, &[1, 7])]),
        over("n(n+1)(n+2)(n+3)(n+4)/3", 3, &[res(12, &[9, 11])]),
        over("n(n+1)(n+2)(n+3)(n+4)/4", 4, &[res(12, &[10]), res(72, &[0, 20, 48, 68])]),
        over("n(n+1)(n+2)(n+3)(n+4)/6", 6, &[res(12, &[3, 5])]),
        over("n(n+1)(n+2)(n+3)(n+4)/8", 8, &[res(12, &[4]), res(72, &[12, 32, 36, 56])]),
        over("n(n+1)(n+2)(n+3)(n+4)/12", 12, &[res(12, &[2, 6]), res(72, &[24, 44])]),
        over("n(n+1)(n+2)(n+3)(n+4)/24", 24, &[res(72, &[8, 60])]),
    ],
};

/// `z(F_n ... F_{n+5})`, residue form, `c = (5, n)`.
pub static FIB_K5: ResidueTable = ResidueTable {
    name: "fib-k5",
    family: Family::Fibonacci,
    k: 5,
    base: Base::Lcm,
    extra: ExtraFactor::FiveN,
    rows: &[
        times("ac", 1, &[res(12, &[1, 2, 3, 4, 5, 6]), res(72, &[7, 8, 59, 60])]),
        times("2ac", 2, &[res(12, &[9, 10]), res(72, &[23, 24, 43, 44])]),
        times("3ac", 3, &[res(72, &[11, 12, 31, 32, 35, 36, 55, 56])]),
        times("6ac", 6, &[res(72, &[0, 19, 20, 47, 48, 67, 68, 71])]),
    ],
};

/// `z(F_n ... F_{n+5})`, gcd form, `c = (5, n)`.
pub static FIB_K5_GCD: ResidueTable = ResidueTable {
    name: "fib-k5-gcd",
    family: Family::Fibonacci,
    k: 5,
    base: Base::Lcm,
    extra: ExtraFactor::FiveN,
    rows: &[
        times("ac", 1, &[res(12, &[1, 2, 3, 4, 5, 6])]),
        times("2ac", 2, &[res(12, &[9, 10])]),
        ratio("72ac/((8,n+1)(9,n+2))", 72, &[term(8, &[1]), term(9, &[2])], &[res(12, &[7])]),
        ratio("72ac/((8,n)(9,n+1))", 72, &[term(8, &[0]), term(9, &[1])], &[res(12, &[8])]),
        ratio("72ac/((8,n+4)(9,n+3))", 72, &[term(8, &[4]), term(9, &[3])], &[res(12, &[0])]),
        ratio("72ac/((8,n+5)(9,n+4))", 72, &[term(8, &[5]), term(9, &[4])], &[res(12, &[11])]),
    ],
};

/// `z(F_n ... F_{n+6})`, `c = (5, n(n+1))`.
pub static FIB_K6: ResidueTable = ResidueTable {
    name: "fib-k6",
    family: Family::Fibonacci,
    k: 6,
    base: Base::Lcm,
    extra: ExtraFactor::FiveNN1,
    rows: &[
        times("ac", 1, &[res(12, &[1, 2, 3, 4, 5])]),
        ratio(
            "(64)(27)ac/((64,n+2)(27,n(n+3)))",
            64 * 27,
            &[term(64, &[2]), term(27, &[0, 3])],
            &[res(24, &[6])],
        ),
        // Here v_2(a) = v_2(n+6) and v_2(b) = v_2(n+6) + 6, so j needs 2^4.
        // A factor of 8 in this row leaves F_z one power of 2 short.
        ratio("(16)(27)ac/(27,n(n+3))", 16 * 27, &[term(27, &[0, 3])], &[res(24, &[18])]),
        ratio("72ac/((8,n-7)(9,n-7))", 72, &[term(8, &[-7]), term(9, &[-7])], &[res(12, &[7])]),
        ratio("72ac/((8,n-8)(9,n-8))", 72, &[term(8, &[-8]), term(9, &[-8])], &[res(12, &[8])]),
        times("4ac", 4, &[res(12, &[9])]),
        ratio("72ac/((8,n+6)(9,n+5))", 72, &[term(8, &[6]), term(9, &[5])], &[res(12, &[10])]),
        ratio("72ac/((8,n+5)(9,n+4))", 72, &[term(8, &[5]), term(9, &[4])], &[res(12, &[11])]),
        ratio(
            "(64)(27)ac/((64,n+4)(27,(n+3)(n+6)))",
            64 * 27,
            &[term(64, &[4]), term(27, &[3, 6])],
            &[res(12, &[0])],
        ),
    ],
};

pub static LUCAS_K4: ResidueTable = ResidueTable {
    name: "lucas-k4",
    family: Family::Lucas,
    k: 4,
    base: Base::DoubleLcm,
    extra: ExtraFactor::None,
    rows: &[
        times("3a", 3, &[res(36, &[2, 14, 18, 30])]),
        times("a", 1, &[Condition::Otherwise]),
    ],
};

pub static LUCAS_K5: ResidueTable = ResidueTable {
    name: "lucas-k5",
    family: Family::Lucas,
    k: 5,
    base: Base::DoubleLcm,
    extra: ExtraFactor::None,
    rows: &[
        times("3a", 3, &[res(36, &[1, 2, 13, 14, 17, 18, 29, 30])]),
        times("a", 1, &[Condition::Otherwise]),
    ],
};

pub static LUCAS_K6: ResidueTable = ResidueTable {
    name: "lucas-k6",
    family: Family::Lucas,
    k: 6,
    base: Base::DoubleLcm,
    extra: ExtraFactor::None,
    rows: &[
        times("3a", 3, &[res(36, &[1, 2, 12, 13, 14, 16, 17, 18, 28, 29])]),
        times("a", 1, &[Condition::Otherwise]),
    ],
};

/// The residue-form table used by the closed-form route.
pub fn theorem_table(family: Family, k: u32) -> Result<&'static ResidueTable> {
    match (family, k) {
        (Family::Fibonacci, 4) => Ok(&FIB_K4),
        (Family::Fibonacci, 5) => Ok(&FIB_K5),
        (Family::Fibonacci, 6) => Ok(&FIB_K6),
        (Family::Lucas, 4) => Ok(&LUCAS_K4),
        (Family::Lucas, 5) => Ok(&LUCAS_K5),
        (Family::Lucas, 6) => Ok(&LUCAS_K6),
        _ => Err(Error::NoClosedForm(k)),
    }
}

/// Alternative forms of the same result (gcd form, plain-product form).
pub fn corollary_tables(family: Family, k: u32) -> &'static [&'static ResidueTable] {
    static FIB4: [&ResidueTable; 2] = [&FIB_K4_GCD, &FIB_K4_PLAIN];
    static FIB5: [&ResidueTable; 1] = [&FIB_K5_GCD];
    match (family, k) {
        (Family::Fibonacci, 4) => &FIB4,
        (Family::Fibonacci, 5) => &FIB5,
        _ => &[],
    }
}

pub fn all_tables() -> [&'static ResidueTable; 9] {
    [
        &FIB_K4,
        &FIB_K4_GCD,
        &FIB_K4_PLAIN,
        &FIB_K5,
        &FIB_K5_GCD,
        &FIB_K6,
        &LUCAS_K4,
        &LUCAS_K5,
        &LUCAS_K6,
    ]
}
