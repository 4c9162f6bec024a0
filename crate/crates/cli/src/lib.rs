//! Command-line front end: expression parser, session configuration,
//! report documents and the command workflows.

pub mod commands;
pub mod config;
pub mod parse;
pub mod printed;
pub mod report;
