//! Command line front end for `peano-core`: file formats, seeded property
//! suites, end-to-end scenarios and the verb dispatcher.

pub mod cli;
pub mod config;
pub mod demo;
pub mod io;
pub mod pipeline;
pub mod sample;
pub mod suites;
