//! Exact computation on Baire space.
//!
//! The crate implements the computable core of intuitionistic descriptive set
//! theory: a bijective codec for finite sequences of naturals, the
//! Kleene-Brouwer order, finitely-described points and coded continuous
//! functionals with fuel-bounded evaluation, eventually-periodic stump
//! notations with their order and arithmetic, regular (finite-state) located
//! closed subsets of Baire space with Cantor-Bendixson machinery and a fan
//! realizer, and an executable catalog of continuous reductions with witness
//! transport.
//!
//! Everything is exact integer computation. Wherever a classical definition
//! quantifies over an unbounded search, the search bound ("fuel") is an
//! explicit parameter and running out of fuel is an outcome distinct from
//! refutation.

pub mod check;
pub mod cli;
pub mod error;
pub mod kernel;
pub mod reductions;
pub mod seqcode;
pub mod stream;
pub mod stump;
pub mod suite;
pub mod trees;

pub use error::{Error, Result};
