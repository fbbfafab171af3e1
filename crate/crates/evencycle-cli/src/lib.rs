//! Document format, reports and command implementations behind the
//! `evencycle` binary.

pub mod commands;
pub mod doc;
pub mod report;
