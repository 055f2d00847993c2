//! Session-typed message-passing processes with intersection and union types.
//!
//! The crate covers the whole pipeline: parsing signatures ([`parser`]),
//! validating them ([`sigcheck`]), deciding multiset subtyping ([`subtype`]),
//! algorithmic type checking ([`typecheck`]) and executing configurations
//! under a seeded scheduler with a fidelity monitor ([`runtime`]).

pub mod ast;
pub mod parser;
pub mod print;
pub mod runtime;
pub mod sigcheck;
pub mod subtype;
pub mod typecheck;

pub use ast::{Branches, Channel, Ident, ProcDef, Process, SessionType, Signature};
pub use subtype::TypeMultiset;
