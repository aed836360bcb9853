//! The book under `book/` is the narrative guide to the `tma` crate. mdbook
//! cannot run Rust snippets as tests by itself, so each chapter is included
//! here as a doc comment and `cargo test --doc -p guide` executes every code
//! block. This keeps the book and the library in sync: an API change that
//! breaks a snippet breaks the build.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/signal-model.md")]
pub mod signal_model {}

#[doc = include_str!("../../../book/src/pulse-spectra.md")]
pub mod pulse_spectra {}

#[doc = include_str!("../../../book/src/ssb-design.md")]
pub mod ssb_design {}

#[doc = include_str!("../../../book/src/metrics.md")]
pub mod metrics {}

#[doc = include_str!("../../../book/src/receiver-simulation.md")]
pub mod receiver_simulation {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
