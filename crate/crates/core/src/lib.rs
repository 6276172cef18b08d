//! Classical spinning-particle phase space: spinor representation matrices,
//! the canonical bracket over the enlarged phase space, free and minimally
//! coupled dynamics, and radiation diagnostics.

pub mod dynamics;
pub mod em_coupling;
pub mod error;
pub mod jet;
pub mod linalg;
pub mod metric;
pub mod phase_space;
pub mod radiation;
pub mod repspace;

pub use error::{Error, Result};
