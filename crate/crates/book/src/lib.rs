//! The guide in `book/`, compiled so that its listings run as doctests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/mapping.md")]
pub mod mapping {}

#[doc = include_str!("../../../book/src/snail.md")]
pub mod snail {}

#[doc = include_str!("../../../book/src/transpiling.md")]
pub mod transpiling {}

#[doc = include_str!("../../../book/src/simulation.md")]
pub mod simulation {}

#[doc = include_str!("../../../book/src/open-systems.md")]
pub mod open_systems {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
