//! Order of appearance `z(m)` of integers in the Fibonacci sequence, with
//! dedicated machinery for products of consecutive Fibonacci and Lucas
//! numbers `F_n F_{n+1} ... F_{n+k}` and `L_n L_{n+1} ... L_{n+k}`.
//!
//! Three independent routes compute `z` of such products:
//!
//! * [`orderprod::z_product_closed`] reads residue tables for `k = 4, 5, 6`,
//! * [`orderprod::z_product_general`] matches p-adic valuations for any `k`,
//! * [`orderprod::z_product_oracle`] scans Fibonacci residues modulo the product.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub mod bigmath;
pub mod cli;
pub mod error;
pub mod fibstruct;
pub mod lcmkit;
pub mod orderprod;
pub mod primes;
pub mod tables;
pub mod valuation;

pub use bigmath::{fib, lucas, BigNat, SequenceIndex};
pub use error::{Error, Result};
pub use orderprod::{ProductSpec, Route, ZResult};

/// Which sequence a run or product is drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Fibonacci,
    Lucas,
}

impl Family {
    /// `F_i` or `L_i`.
    pub fn term(self, i: u64) -> BigNat {
        match self {
            Family::Fibonacci => fib(i),
            Family::Lucas => lucas(i),
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            Family::Fibonacci => "fib",
            Family::Lucas => "lucas",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fib" | "fibonacci" => Ok(Family::Fibonacci),
            "lucas" => Ok(Family::Lucas),
            _ => Err(Error::InvalidArgument(format!("unknown family {s:?}"))),
        }
    }
}
