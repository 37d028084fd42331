//! Configuration parsing, result persistence and plotting for the capl
//! solver. The `capl` binary drives these; the acceptance suite reuses them
//! as a library.

pub mod calfile;
pub mod config;
pub mod csvio;
pub mod dump;
pub mod svg;
