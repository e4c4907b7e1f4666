pub mod error;
pub mod harness;
pub mod oracle;
pub mod sphere;
pub mod surface;
pub mod variational;

pub use error::{Error, Result};
