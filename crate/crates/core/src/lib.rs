pub mod equilibrium;
pub mod error;
pub mod krieger;
pub mod matrix;
pub mod spectral;
pub mod subshift;
pub mod tracespace;

pub use error::{Error, Result};
pub use matrix::{NonnegativeMatrix, SupportDigraph, ZeroOneMatrix};
pub use subshift::{SubshiftKind, SubshiftSpec, Word};
