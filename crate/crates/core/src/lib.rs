//! Symmetry-factorized Selberg zeta functions of Schottky surfaces.
//!
//! The pipeline runs surface → IFS scheme → prime classes of G-closed words
//! → cycle expansion per irreducible representation → zeros in the complex
//! plane → envelopes and gaps.

pub mod config;
pub mod cycle;
pub mod error;
pub mod exec;
pub mod geometry;
pub mod moebius;
pub mod resonance;
pub mod spectral;
pub mod symbolic;
pub mod symmetry;

pub use error::{GeometryError, GroupError, MoebiusError, SpectralError, SymbolicError, ZetaError};
pub use exec::Execution;
pub use geometry::{IfsScheme, SurfaceSpec};
pub use moebius::{Disk, Matrix2, ScaledMatrix};
pub use symbolic::{GClosedPair, GroupChoice, PrimeClassDatum, ReducedWord};
pub use symmetry::{CharacterTable, Group, GroupElement, Irrep};
