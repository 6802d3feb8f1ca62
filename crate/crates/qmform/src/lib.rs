//! JSON documents, run manifests, parallel extraction and the `qmform`
//! command line, on top of `qmform-core`.

pub mod cli;
pub mod formats;
pub mod manifest;
pub mod parallel;
