//! Std companion to the core detection library: parallel Monte-Carlo
//! drivers, file formats (CSV outputs, TOML experiment configs, JSON
//! manifests, cached samples), and the `chandet` binary's command surface.

pub mod cli;
pub mod experiment;
pub mod io;
pub mod par;
pub mod priorspec;
pub mod zcache;
