pub mod analysis;
pub mod construct;
pub mod enumerate;
pub mod error;
pub mod exactreal;
pub mod intmat;
pub mod norms;
pub mod rng;

pub use error::{Error, Result};
