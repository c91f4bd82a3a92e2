//! Exact computation with even integral lattices and finite quadratic modules.
//!
//! The pipeline: a symmetric even integral matrix `K` presents a lattice; its
//! discriminant group `Λ*/KΛ` carries a quadratic form valued in Q/Z, giving a
//! finite quadratic module. Modules decompose into indecomposable blocks, every
//! module is realized back by an even lattice, and the module determines the
//! genus-one modular data (S, T, central charge) of the associated abelian
//! topological theory.
//!
//! All structural decisions (equality, isomorphism, nondegeneracy) are made in
//! exact integer/rational arithmetic; floating point appears only when phases
//! are materialized at output boundaries.

pub mod blocks;
pub mod classify;
pub mod discriminant;
pub mod error;
pub mod exact;
pub mod fqm;
pub mod guards;
pub mod intmat;
pub mod io;
pub mod lattice;
pub mod modular;
pub mod realize;

mod dense;

pub use blocks::BlockDescriptor;
pub use discriminant::DiscriminantResult;
pub use error::{Error, Result};
pub use exact::{FracMod1, Phase};
pub use fqm::{FiniteQuadraticModule, GroupElement};
pub use guards::Guards;
pub use lattice::{GramMatrix, SnfResult};
pub use modular::ModularData;
