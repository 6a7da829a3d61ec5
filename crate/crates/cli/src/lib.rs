//! Instance I/O, generators, solver dispatch, and benchmark reporting
//! behind the `minemax` binary.

pub mod bench;
pub mod generate;
pub mod report;
pub mod schema;
