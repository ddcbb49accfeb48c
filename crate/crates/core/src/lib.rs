pub mod error;
pub mod gf2;
pub mod homology;
pub mod lattice;
pub mod mc;
pub mod models;
pub mod toric;
pub mod exact;
pub mod duality;
pub mod analysis;
pub mod io;
pub mod pipeline;

pub use error::{Error, Result};
