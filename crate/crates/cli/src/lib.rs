//! Benchmark front end for the `pgreedy` library.
//!
//! Exposes the experiment driver as a library so integration tests can run
//! the same code paths as the `pgreedy` binary: configuration
//! ([`config`]), single-run execution with artifact output ([`runner`]),
//! TOML suite batching ([`suite`]), reference constants ([`reference`]),
//! and SVG rendering ([`plot`]).

pub mod config;
pub mod plot;
pub mod reference;
pub mod runner;
pub mod suite;
