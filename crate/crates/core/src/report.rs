//! Serialization helpers and the machine-readable report envelope shared
//! by the CLI subcommands. Field order is fixed by struct declaration
//! order so identical runs produce byte-identical JSON.

use serde::{Deserialize, Serialize};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Report<I, R> {
    pub tool_version: String,
    pub subcommand: String,
    pub inputs: I,
    pub results: R,
    pub warnings: Vec<String>,
}

impl<I, R> Report<I, R> {
    pub fn new(subcommand: &str, inputs: I, results: R, warnings: Vec<String>) -> Self {
        Report {
            tool_version: TOOL_VERSION.to_string(),
            subcommand: subcommand.to_string(),
            inputs,
            results,
            warnings,
        }
    }
}

/// Serialize BigInt as a decimal string.
pub mod bigint_string {
    use num::bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Serialize Rational in the canonical "n" / "n/d" text form.
pub mod rational_string {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::coeffs::{parse_rational, render_rational, Rational};

    pub fn serialize<S: Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&render_rational(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).ok_or_else(|| serde::de::Error::custom("bad rational"))
    }
}

/// Digit-list rendering of a p-adic value with its stated precision.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PAdicJson {
    pub prime: u64,
    /// None encodes the exact zero.
    pub valuation: Option<i64>,
    /// Base-p digits of the unit, least significant first.
    pub digits: Vec<u64>,
    pub rel_precision: u32,
    /// The value is known modulo p^abs_precision (None = exact).
    pub abs_precision: Option<i64>,
}

impl PAdicJson {
    pub fn from_padic(x: &crate::coeffs::PAdic) -> Self {
        PAdicJson {
            prime: x.prime(),
            valuation: x.valuation(),
            digits: x.digits(),
            rel_precision: x.rel_prec(),
            abs_precision: x.abs_prec(),
        }
    }
}
