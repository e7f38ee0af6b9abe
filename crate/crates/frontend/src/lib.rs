//! File formats, the golden corpus and the end-to-end pipelines behind
//! the `indukt` command-line checker.

pub mod corpus;
pub mod files;
pub mod pipeline;
