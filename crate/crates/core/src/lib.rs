//! Rate-distortion and quantization of heavy-tailed sources measured by the
//! *strength* of a random variable: the scale `s` at which the reference
//! stable law's cross-entropy with `X/s` equals its own entropy.

mod cheb;
pub mod design;
pub mod error;
pub mod optim;
pub mod quad;
pub mod quantizer;
pub mod rd;
pub mod roots;
pub mod stable;
pub mod strength;
pub mod uniform;

pub use error::{Error, Result};
pub use quantizer::Quantizer;
pub use stable::{ReferenceLaw, SampleBatch, StableParams};
pub use strength::{SourceSpec, StrengthSolution};
