//! Computational group theory for iterated wreath products.
//!
//! The crate builds the towers `L_{n+1} = L_n ⋉ L^{D^n}` of a permutation
//! group `L` acting on a finite set `D`, decides whether the inverse limit is
//! topologically finitely generated, and produces certificates for positive
//! finite generation backed by exact arithmetic.

pub mod cache;
pub mod catalog;
pub mod config;
pub mod error;
pub mod genprob;
pub mod par;
pub mod io;
pub mod lattice;
pub mod permcore;
pub mod semidirect;
pub mod tower;
pub mod certify;
pub mod selftest;

pub use config::{Caps, RunConfig};
pub use error::{Error, Result};
pub use par::Execution;
pub use permcore::{GroupDescription, Homomorphism, PermGroup, Permutation, StabilizerChain};
