pub mod cauchy;
pub mod error;
pub mod fast;
pub mod graph;
pub mod linalg;
pub mod nfst;
pub mod prune;
pub mod spectral;
pub mod trig;

pub use error::{Error, Result};
