//! Core engine for discovering computationally efficient matrix-expression
//! identities.
//!
//! The engine searches a typed grammar of matrix operations for expressions
//! that are analytically identical to a target polynomial but cheaper to
//! evaluate. Equality is decided by randomized fingerprinting over Z_p,
//! linear combinations of candidate trees are matched against the target by
//! incremental Gaussian elimination mod p, and the search over grammar rules
//! is driven by pluggable strategies (uniform random, n-gram subtree counts,
//! or a recursive network rule predictor).
//!
//! The crate is `no_std` + `alloc`; IO, file formats and the CLI live in the
//! companion `mathident` crate.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(any(test, feature = "std-tests"))]
extern crate std;

pub mod clock;
pub mod context;
pub mod dataset;
pub mod descriptor;
pub mod enumerate;
pub mod expr;
pub mod families;
pub mod grammar;
pub mod linsolve;
pub mod matrix;
pub mod modp;
pub mod neural;
pub mod ngram;
pub mod parse;
pub mod search;
pub mod shape;

pub use clock::Clock;
pub use context::EvalContext;
pub use descriptor::Descriptor;
pub use expr::{Expr, Rule};
pub use grammar::GrammarConfig;
pub use linsolve::{Basis, SolutionCertificate};
pub use shape::{Dim, Shape};
