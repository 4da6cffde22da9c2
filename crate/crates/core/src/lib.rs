pub mod error;
pub mod euclid;
pub mod fpmod;
pub mod functors;
pub mod invariants;
pub mod matnf;
pub mod scenario;
pub mod stabilab;
pub mod suite;

pub use error::{Error, Result};
