pub mod error;
pub mod padic;
pub mod series;

pub use error::{Error, Result};
pub use padic::PadicScalar;
pub use series::{SeriesConstants, TruncatedLaurent};
pub mod operators;
pub mod linalg;
pub mod rankone;
pub mod herr;
pub mod cyclotomic;
pub mod torsion;
pub mod induction;
pub mod parse;
pub mod config;
pub mod suite;
pub mod cli;
