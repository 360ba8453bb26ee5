//! Spectra of circulant Cayley graphs on odd cyclic groups, the limiting
//! eigenvalue densities, and the lattice counts that connect them.

pub mod arith;
pub mod cosine;
pub mod density;
pub mod error;
pub mod group;
pub mod ihara;
pub mod interval;
pub mod jacobi;
pub mod lattice;
pub mod spectra;
pub mod stats;
mod walk;

pub use error::{Error, Result};
pub use group::{make_tuple, CayleySpec, GeneratorTuple, OddModulus, SliceClass, SliceId};
pub use interval::Interval;
