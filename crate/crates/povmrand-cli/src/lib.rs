//! Library surface of the POVM randomness CLI: file formats, deterministic
//! report rendering, and the subcommand implementations. The binary in
//! `main.rs` is a thin argument-parsing shell over this.

pub mod commands;
pub mod io;
pub mod report;
