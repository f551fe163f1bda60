#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod constants;
pub mod error;
pub mod hybrid;
pub mod media;
pub mod numerics;
pub mod pe;
pub mod signal;
pub mod synthesis;
pub mod tdpe;
pub mod terrain;

pub use error::{Error, Result};
