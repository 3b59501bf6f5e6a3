pub mod credal;
pub mod error;
pub mod gsd;
pub mod lp;
pub mod order;
pub mod preference;
pub mod stats;

pub use error::{Error, Result};
