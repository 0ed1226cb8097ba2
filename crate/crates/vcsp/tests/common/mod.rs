// Shared test support: independent oracles and corpus generation.  These
// deliberately avoid the library's solver code paths so that agreement
// between the two is meaningful.
#![allow(dead_code)]

pub mod corpus;
pub mod dd;
pub mod mm;
pub mod sat;
