//! Library side of the command line tool: file formats, the element
//! expression parser, and the subcommand implementations.

pub mod commands;
pub mod expr;
pub mod formats;
