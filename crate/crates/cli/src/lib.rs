//! Corpus runner and report writers for apimine.

pub mod analyze;
pub mod apps;
pub mod report;
pub mod run;
