//! Finite, checkable versions of the combinatorial objects behind the Borel
//! chromatic number of the digraphs `A_d` on Baire space.

pub mod adversary;
pub mod digraph;
pub mod error;
pub mod hom;
pub mod level;
pub mod point;
pub mod seq;

pub use error::*;
