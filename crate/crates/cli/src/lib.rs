//! Command-line driver for orbiclust: workspace files, scripted mutation,
//! quotients, enumeration and the JSON session server.

pub mod commands;
pub mod error;
pub mod fixtures;
pub mod server;
pub mod session;
pub mod workspace;
