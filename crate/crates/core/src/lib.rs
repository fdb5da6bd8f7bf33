//! Watermark sensitivity probing for neural representations.
//!
//! The crate stamps random text watermarks onto images ([`stamper`]), reads
//! activation dumps produced by any inference engine ([`activation`]), scores
//! every representation by how well it separates watermarked from clean
//! images ([`probe`]), and retrains linear heads with the most sensitive
//! embedding coordinates masked out ([`head`]).

pub mod activation;
pub mod error;
pub mod head;
pub mod probe;
mod scenario;
pub mod stamper;
pub mod synthetic;

pub use error::{Error, Result};
pub use scenario::Scenario;
