//! File ingestion: AGS-subset documents, delimiter-separated tables driven by
//! a mapping profile, and opaque attachments.
//!
//! Parsers are pure. Everything that leaves this module is in model units.

pub mod ags;
pub mod attachment;
pub mod map;
pub mod profile;
pub mod table;

use thiserror::Error;

use crate::registry::{ConceptKind, Registry};
use crate::units::{self, Conversion};

pub use ags::{parse_ags, render_ags, AgsDocument, AgsGroup};
pub use attachment::register_attachment;
pub use map::{map_ags, AgsImport, MappedPoint};
pub use profile::{bundled_profile, parse_profile, ColumnMap, MappingProfile, ProfileLayer, Role, BUNDLED_PROFILES};
pub use table::ingest_table;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum IngestError {
    #[error("empty input")]
    EmptyInput,
    #[error("input is not valid UTF-8")]
    NotUtf8,
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("group {0} lacks its LOCA_ID key column")]
    MissingKeyColumn(String),
    #[error("{group} row references unknown LOCA_ID `{key}`")]
    OrphanRow { group: String, key: String },
    #[error("unknown unit `{0}`")]
    UnitUnknown(String),
    #[error("column {column}: unit `{unit}` does not convert to {expected}")]
    UnitMismatch { column: String, unit: String, expected: String },
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("line {line}, column {column}: not a number")]
    NumberFormat { line: usize, column: String },
    #[error("{group} row {row}, {heading}: `{value}` is not a number")]
    AgsValue { group: String, row: usize, heading: String, value: String },
    #[error("unknown concept `{0}`")]
    UnknownConcept(String),
    #[error("profile line {line}: {reason}")]
    ProfileSyntax { line: usize, reason: String },
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("unknown profile `{0}`")]
    UnknownProfile(String),
    #[error("empty file")]
    EmptyFile,
}

impl IngestError {
    pub fn code(&self) -> &'static str {
        match self {
            IngestError::EmptyInput => "EmptyInput",
            IngestError::NotUtf8 => "NotUtf8",
            IngestError::Syntax { .. } => "SyntaxError",
            IngestError::MissingKeyColumn(_) => "MissingKeyColumn",
            IngestError::OrphanRow { .. } => "OrphanRow",
            IngestError::UnitUnknown(_) => "UnitUnknown",
            IngestError::UnitMismatch { .. } => "UnitMismatch",
            IngestError::MissingColumn(_) => "MissingColumn",
            IngestError::NumberFormat { .. } => "NumberFormat",
            IngestError::AgsValue { .. } => "NumberFormat",
            IngestError::UnknownConcept(_) => "UnknownConcept",
            IngestError::ProfileSyntax { .. } => "ProfileSyntax",
            IngestError::InvalidProfile(_) => "InvalidProfile",
            IngestError::UnknownProfile(_) => "UnknownProfile",
            IngestError::EmptyFile => "EmptyFile",
        }
    }
}

/// Resolves a source unit label (`kPa`, `%`, `m`, ...) to the conversion into
/// `property`'s model unit. An empty label means the model unit itself.
pub(crate) fn source_conversion(
    reg: &Registry,
    property: &str,
    unit_label: &str,
    column: &str,
) -> Result<&'static Conversion, IngestError> {
    let model = units::model_unit(property).ok_or_else(|| IngestError::UnknownConcept(property.to_string()))?;
    let unit_id = if unit_label.trim().is_empty() {
        model.to_string()
    } else {
        reg.resolve(ConceptKind::Unit, unit_label)
            .map_err(|_| IngestError::UnitUnknown(unit_label.to_string()))?
            .concept
            .id
            .clone()
    };
    let conv = units::conversion_from(&unit_id).ok_or_else(|| IngestError::UnitUnknown(unit_label.to_string()))?;
    if conv.to != model {
        return Err(IngestError::UnitMismatch {
            column: column.to_string(),
            unit: unit_label.to_string(),
            expected: model.to_string(),
        });
    }
    Ok(conv)
}

/// Plain decimal number with `.` as separator.
pub(crate) fn parse_number(text: &str) -> Option<f64> {
    let t = text.trim();
    if t.is_empty() || t.contains(',') {
        return None;
    }
    t.parse::<f64>().ok().filter(|v| v.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn source_units() {
        let reg = Registry::seed();
        assert_eq!(source_conversion(&reg, "sleeve-friction", "kPa", "fs").unwrap().apply(5000.0), 5.0);
        assert_eq!(source_conversion(&reg, "depth", "", "d").unwrap().from, "m");
        assert_eq!(source_conversion(&reg, "friction-ratio", "%", "rf").unwrap().from, "percent");
        assert_eq!(
            source_conversion(&reg, "depth", "furlong", "d"),
            Err(IngestError::UnitUnknown("furlong".into()))
        );
        assert!(matches!(
            source_conversion(&reg, "depth", "kPa", "d"),
            Err(IngestError::UnitMismatch { .. })
        ));
    }

    #[test]
    fn numbers() {
        assert_eq!(parse_number(" 15.00 "), Some(15.0));
        assert_eq!(parse_number("-1e3"), Some(-1000.0));
        assert_eq!(parse_number("1,5"), None);
        assert_eq!(parse_number("abc"), None);
        assert_eq!(parse_number("NaN"), None);
        assert_eq!(parse_number(""), None);
    }
}
