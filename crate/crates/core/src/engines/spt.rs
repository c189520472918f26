//! Standard penetration test blow count.

use serde::{Deserialize, Serialize};

use super::{require_number, EngineError};
use crate::model::{Layer, NamedValue};

/// Blows per 15 cm increment at which driving stops.
pub const DEFAULT_REFUSAL_THRESHOLD: u32 = 50;

const INCREMENT_IDS: [&str; 3] = ["spt-increment-1", "spt-increment-2", "spt-increment-3"];

fn default_threshold() -> u32 {
    DEFAULT_REFUSAL_THRESHOLD
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SptInput {
    pub depth: f64,
    /// Blows for each 15 cm increment actually driven, at most three.
    pub increments: Vec<u32>,
    #[serde(default = "default_threshold")]
    pub refusal_threshold: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SptResult {
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    pub refusal: bool,
}

pub fn interpret_spt(input: &SptInput) -> Result<SptResult, EngineError> {
    if input.increments.is_empty() || input.increments.len() > 3 {
        return Err(EngineError::InvalidInput(format!(
            "expected 1 to 3 increments, got {}",
            input.increments.len()
        )));
    }
    if !input.depth.is_finite() || input.depth < 0.0 {
        return Err(EngineError::InvalidInput("depth must be a non-negative number".into()));
    }
    let refusal = input.increments.iter().any(|&n| n >= input.refusal_threshold);
    if refusal {
        return Ok(SptResult { n: None, refusal });
    }
    match input.increments[..] {
        [_, n2, n3] => Ok(SptResult {
            n: Some(n2 + n3),
            refusal,
        }),
        _ => Err(EngineError::IncompleteIncrements(input.increments.len())),
    }
}

impl SptInput {
    pub fn to_layers(&self) -> (Layer, Layer) {
        let mut context = Layer::default();
        context.values.push(NamedValue::number("depth", self.depth, "m"));
        context.values.push(NamedValue::number("spt-refusal-threshold", self.refusal_threshold as f64, "blows"));
        let mut raw = Layer::default();
        for (id, &n) in INCREMENT_IDS.iter().zip(&self.increments) {
            raw.values.push(NamedValue::number(id, n as f64, "blows"));
        }
        (context, raw)
    }

    pub fn from_layers(context: &Layer, raw: &Layer) -> Result<Self, EngineError> {
        let mut increments = Vec::new();
        for id in INCREMENT_IDS {
            let Some(n) = raw.number(id) else { break };
            if !(n >= 0.0 && n.fract() == 0.0 && n <= u32::MAX as f64) {
                return Err(EngineError::InvalidInput(format!("{id} = {n} is not a blow count")));
            }
            increments.push(n as u32);
        }
        let threshold = context.number("spt-refusal-threshold").unwrap_or(DEFAULT_REFUSAL_THRESHOLD as f64);
        Ok(SptInput {
            depth: require_number(context, "depth")?,
            increments,
            refusal_threshold: threshold as u32,
        })
    }
}

impl SptResult {
    pub fn to_layers(&self) -> (Layer, Layer) {
        let mut interpreted = Layer::default();
        if let Some(n) = self.n {
            interpreted.values.push(NamedValue::number("spt-blow-count", n as f64, "blows"));
        }
        let refusal = if self.refusal { "true" } else { "false" };
        interpreted.values.push(NamedValue::text("spt-refusal", refusal, "dimensionless"));
        (Layer::default(), interpreted)
    }
}
