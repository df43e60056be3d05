//! Library surface of the batch front-end: job-spec parsing and check
//! execution, shared by the `wcoball` binary and its tests.

pub mod checks;
pub mod jobspec;
