//! Coefficient tower: exact rationals, capped-precision p-adic numbers,
//! and truncated power series over either.

pub mod padic;
pub mod rational;
pub mod series;

pub use padic::{PAdic, TailBound};
pub use rational::{parse_rational, render_rational, Rational};
pub use series::{Coeff, PowerSeries};
