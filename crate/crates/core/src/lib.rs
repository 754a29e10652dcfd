pub mod assembler;
pub mod error;
pub mod fixtures;
pub mod iet;
pub mod kgroups;
pub mod nil2;
pub mod sc;
pub mod snf;
pub mod sqm;
pub mod suites;
pub mod twist;

pub use error::{Error, Result};
