#![no_std]
extern crate alloc;

pub mod arith;
pub mod bounds;
pub mod chabauty;
pub mod error;
pub mod expectation;
pub mod model;
pub mod padic;
pub mod projred;
pub mod series;
pub mod weierstrass;
pub mod zpoly;

pub use error::{Error, Result};
pub use padic::Padic;
