//! One-form algebra on P¹ minus a finite set: expression parsing, partial
//! fractions, reduction to the residue basis modulo exact forms, and the
//! superdiagonal gauge reduction for strictly upper-triangular connections.

pub mod gauge;
pub mod parse;
pub mod partial;
pub mod poly;
pub mod ratfunc;

pub use gauge::{gauge_reduce, ConnMatrix, GaugeResult};
pub use parse::parse_ratfunc;
pub use partial::{
    is_basis_valued, partial_fractions, reduce_form, OneForm, PartialFractions, PlaceSet,
    ReducedForm,
};
pub use poly::Poly;
pub use ratfunc::RatFunc;
