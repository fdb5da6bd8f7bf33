//! Activation matrices, the ACTD interchange format and channel pooling.

mod align;
pub mod dump;
mod matrix;
mod pool;

pub use align::{align_pairs, PairedView};
pub use dump::{read_dump, write_dump, DumpHeader, DumpManifest, Split};
pub use matrix::{ActivationMatrix, GroupLabel, RepKind, RepresentationId};
pub use pool::{pool_channels, SpatialActivationBlock};
