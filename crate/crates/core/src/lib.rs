//! Static mining of web API URLs and JSON request schemas from Java sources.
//!
//! The pipeline is: [`source`] parses a pragmatic Java subset into a per-file
//! model, [`reconstruct`] resolves string values through declarations and
//! concatenations, [`extract`] runs per-library call-site strategies, and
//! [`model`] holds the canonical URL / schema types with their renderers and
//! corpus statistics. [`smells`] implements the client-side security checks.

pub mod extract;
pub mod model;
pub mod reconstruct;
pub mod smells;
pub mod source;
