//! Compiles and runs every code block in the guide as documentation tests,
//! one module per chapter, so the book cannot drift from the library.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/costs.md")]
pub mod costs {}

#[doc = include_str!("../../../book/src/languages.md")]
pub mod languages {}

#[doc = include_str!("../../../book/src/instances.md")]
pub mod instances {}

#[doc = include_str!("../../../book/src/expressibility.md")]
pub mod expressibility {}

#[doc = include_str!("../../../book/src/linear-programs.md")]
pub mod linear_programs {}

#[doc = include_str!("../../../book/src/polymorphisms.md")]
pub mod polymorphisms {}

#[doc = include_str!("../../../book/src/weightings.md")]
pub mod weightings {}

#[doc = include_str!("../../../book/src/positive-clone.md")]
pub mod positive_clone {}

#[doc = include_str!("../../../book/src/indicator.md")]
pub mod indicator {}

#[doc = include_str!("../../../book/src/cores.md")]
pub mod cores {}

#[doc = include_str!("../../../book/src/transforms.md")]
pub mod transforms {}

#[doc = include_str!("../../../book/src/classification.md")]
pub mod classification {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
