pub mod cli;
pub mod coeffs;
pub mod connection;
pub mod derham;
pub mod lcs_dims;
pub mod ncseries;
pub mod report;
pub mod selmer;
pub mod error;

pub use error::{Error, Result};
