//! Mesh files, built-in domains, settings, parallel evaluation and the
//! command implementations behind the `oscquad` binary.

pub mod commands;
pub mod domains;
pub mod meshio;
pub mod parallel;
pub mod selftest;
pub mod settings;
pub mod sweep;
