//! Library surface of the `feqn` command-line verifier: problem-spec
//! parsing, command dispatch, and report rendering.

pub mod report;
pub mod run;
pub mod spec;
