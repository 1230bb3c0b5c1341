//! Library surface of the command-line tool: the instance file format
//! and report rendering, importable by integration tests.

pub mod instance;
pub mod report;
