//! Staggered DG / mixed finite elements for coupled Brinkman–Darcy flow and
//! upwind transport on triangulations subdivided at cell centers.

pub mod assembly;
pub mod coeff;
pub mod error;
pub mod flow;
pub mod harness;
pub mod mesh;
pub mod polybasis;
pub mod sparse;
pub mod spaces;
pub mod transport;

pub use error::{Error, Result};

// The book's code listings run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/meshes.md")]
    mod meshes {}
    #[doc = include_str!("../../../book/src/spaces.md")]
    mod spaces {}
    #[doc = include_str!("../../../book/src/flow.md")]
    mod flow {}
    #[doc = include_str!("../../../book/src/transport.md")]
    mod transport {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
