pub mod arith;
pub mod bootstrap;
pub mod cocycle;
pub mod eichler;
pub mod eisenstein;
pub mod error;
pub mod g2es;
pub mod modforms;
pub mod par;
pub mod serde_util;
pub mod symd;

pub use error::{Error, Result};
