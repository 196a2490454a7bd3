//! Command line, file formats and multi-threaded runners for `treepark-core`.

pub mod cli;
pub mod io;
pub mod parallel;
pub mod validate;
