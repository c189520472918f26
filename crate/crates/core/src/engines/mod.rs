//! Interpretation pipelines turning (context, raw) layers into intermediate
//! and interpreted layers.
//!
//! Every engine is a pure function. [`derive_layers`] picks the engine from a
//! record's procedure and is the single route used to (re)compute stored
//! derived layers.

pub mod cpt;
pub mod drilling;
pub mod fit;
pub mod pressuremeter;
pub mod spt;

use thiserror::Error;

use crate::model::{Layer, TestRecord};

pub use cpt::{interpret_cpt, CptInput, CptResult, CptSample};
pub use drilling::{resample_drilling_log, ChannelSummary, DrillingChannel, DrillingLogInput, DrillingLogResult};
pub use pressuremeter::{
    interpret_pressuremeter, interpret_pressuremeter_with, CalibrationPoint, PressureStep, PressuremeterConfig,
    PressuremeterInput, PressuremeterResult,
};
pub use spt::{interpret_spt, SptInput, SptResult};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum EngineError {
    #[error("at least 5 pressure steps required, got {0}")]
    NotEnoughSteps(usize),
    #[error("no contiguous pseudo-elastic run of at least two steps")]
    NoElasticPhase,
    #[error("pseudo-elastic volumes do not increase (V1 = {v1}, V2 = {v2})")]
    NonPositiveModulus { v1: f64, v2: f64 },
    #[error("limit pressure extrapolation needs at least 3 usable points beyond the creep pressure, got {0}")]
    ExtrapolationUnstable(usize),
    #[error("interpreted pressures out of order: {0}")]
    OrderingViolated(String),
    #[error("empty profile")]
    EmptyProfile,
    #[error("depth does not increase at sample {0}")]
    NonMonotoneDepth(usize),
    #[error("channel `{0}` needs at least two points")]
    EmptyChannel(String),
    #[error("resampling step must be > 0")]
    NonPositiveStep,
    #[error("SPT without refusal needs three increments, got {0}")]
    IncompleteIncrements(usize),
    #[error("no engine for procedure `{0}`")]
    UnsupportedProcedure(String),
    #[error("missing input `{0}`")]
    MissingInput(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl EngineError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            EngineError::NotEnoughSteps(_) => "NotEnoughSteps",
            EngineError::NoElasticPhase => "NoElasticPhase",
            EngineError::NonPositiveModulus { .. } => "NonPositiveModulus",
            EngineError::ExtrapolationUnstable(_) => "ExtrapolationUnstable",
            EngineError::OrderingViolated(_) => "OrderingViolated",
            EngineError::EmptyProfile => "EmptyProfile",
            EngineError::NonMonotoneDepth(_) => "NonMonotoneDepth",
            EngineError::EmptyChannel(_) => "EmptyChannel",
            EngineError::NonPositiveStep => "NonPositiveStep",
            EngineError::IncompleteIncrements(_) => "IncompleteIncrements",
            EngineError::UnsupportedProcedure(_) => "UnsupportedProcedure",
            EngineError::MissingInput(_) => "MissingInput",
            EngineError::InvalidInput(_) => "InvalidInput",
        }
    }
}

/// Computes (intermediate, interpreted) for a record from its context and raw
/// layers.
pub fn derive_layers(record: &TestRecord) -> Result<(Layer, Layer), EngineError> {
    match record.procedure.as_str() {
        "menard-pressuremeter" => {
            let input = PressuremeterInput::from_layers(&record.context, &record.raw)?;
            Ok(interpret_pressuremeter(&input)?.to_layers())
        }
        "cpt" | "cptu" => {
            let input = CptInput::from_layers(&record.context, &record.raw)?;
            Ok(interpret_cpt(&input)?.to_layers())
        }
        "spt" => {
            let input = SptInput::from_layers(&record.context, &record.raw)?;
            Ok(interpret_spt(&input)?.to_layers())
        }
        "drilling-log" => {
            let (input, step) = DrillingLogInput::from_layers(&record.context, &record.raw)?;
            Ok(resample_drilling_log(&input, step)?.to_layers())
        }
        other => Err(EngineError::UnsupportedProcedure(other.to_string())),
    }
}

pub(crate) fn require_number(layer: &Layer, property: &str) -> Result<f64, EngineError> {
    layer
        .number(property)
        .ok_or_else(|| EngineError::MissingInput(property.to_string()))
}
