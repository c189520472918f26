//! Geotechnical data platform core: four-layer test records, controlled
//! vocabularies, interpretation engines, file ingestion and storage.

pub mod engines;
pub mod ingest;
pub mod model;
pub mod registry;
pub mod store;
pub mod units;

pub use model::*;
pub use registry::{ConceptEntry, ConceptKind, Registry, RegistryError};
