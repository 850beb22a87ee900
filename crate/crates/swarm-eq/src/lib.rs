//! Radially symmetric equilibria of a two-species aggregation model with
//! logarithmic repulsion and quadratic attraction, their variational and
//! linear stability, and a particle simulator to probe both.

pub mod boundary_integrals;
pub mod disk;
pub mod equilibria;
pub mod error;
pub mod linear_stability;
pub mod model_core;
pub mod particle_sim;
pub mod quad;
pub mod variational;
pub mod weak_cross;

pub use error::{Error, Result};

/// Guide chapters, compiled as doc-tests so the snippets stay current.
#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/phase-plane.md")]
    pub mod phase_plane {}
    #[doc = include_str!("../../../book/src/equilibria.md")]
    pub mod equilibria {}
    #[doc = include_str!("../../../book/src/variational.md")]
    pub mod variational {}
    #[doc = include_str!("../../../book/src/stability.md")]
    pub mod stability {}
    #[doc = include_str!("../../../book/src/boundary.md")]
    pub mod boundary {}
    #[doc = include_str!("../../../book/src/particles.md")]
    pub mod particles {}
    #[doc = include_str!("../../../book/src/weak-cross.md")]
    pub mod weak_cross {}
}
