//! Instance generators, experiments and file formats around `drsub-core`.

pub mod experiment;
pub mod generate;
pub mod schema;
