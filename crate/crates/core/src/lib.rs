pub mod circle;
pub mod cli;
pub mod descent;
pub mod error;
pub mod experiments;
pub mod fem;
pub mod gradient;
pub mod io;
pub mod mesh;
pub mod optimizer;
pub mod quadrature;
pub mod radial;
pub mod sparse;

pub use error::{Error, Result};
