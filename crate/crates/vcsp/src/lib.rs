//! Exact, desk-scale tooling for valued constraint satisfaction problems.
//!
//! A valued constraint language is a set of cost functions over a finite
//! domain, with values in the rationals extended by infinity.  This crate
//! builds the algebra around such languages with exact arithmetic end to end:
//!
//! * [`rational`]: rationals extended with an absorbing infinity;
//! * [`lp`]: a rational simplex solver returning solutions or refutation
//!   certificates;
//! * [`lang`]: domains, operations, cost functions, languages, and their
//!   on-disk format;
//! * [`instance`]: instances, exhaustive solving, and expressibility;
//! * [`wrelclo`]: the closure operations on cost functions (scaling, shifts,
//!   sums, minimisation);
//! * [`poly`]: polymorphism enumeration and clone operations;
//! * [`weighting`]: weightings, multimorphisms, and the improvement check;
//! * [`posclone`]: positively weighted operations and cyclic weighting
//!   searches;
//! * [`indicator`]: indicator instances separating positive operations;
//! * [`cores`]: cores, rigid cores, and the rigid-core instance reduction;
//! * [`variety`]: power, quotient, and subalgebra transforms;
//! * [`classify`]: tractability classification with machine-checkable
//!   evidence.
//!
//! Everything is deterministic: identical inputs produce identical outputs,
//! byte for byte, so results can be diffed and re-verified.

pub mod budget;
pub mod classify;
pub mod cores;
pub mod error;
pub mod indicator;
pub mod instance;
pub mod lang;
pub mod lp;
pub mod poly;
pub mod posclone;
pub mod rational;
pub mod variety;
pub mod weighting;
pub mod wrelclo;

pub use budget::Budget;
pub use error::Error;
pub use rational::ExtendedRational;
