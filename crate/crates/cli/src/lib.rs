//! Benchmark harness around the `hubbard-vqe` engine.
//!
//! The library half of the CLI: benchmark records and their CSV/JSON codecs,
//! sweep orchestration with content-addressed caching, observable
//! post-processing (fidelity, per-site energy error, spin correlations),
//! power-law fits, and the report tables. The `hvqe` binary is a thin
//! argument-parsing shell over these functions.

pub mod fit;
pub mod observables;
pub mod records;
pub mod report;
pub mod sweep;
