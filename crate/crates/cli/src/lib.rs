//! Library half of the `hermlocal` binary: configuration, input parsing,
//! verification suites and table rendering.

pub mod config;
pub mod input;
pub mod suites;
pub mod tables;
