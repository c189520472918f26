//! Cone penetration test: friction ratio and pore-pressure corrected cone
//! resistance.

use serde::{Deserialize, Serialize};

use super::EngineError;
use crate::model::{Axis, Layer, NamedSeries, NamedValue};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CptSample {
    pub depth: f64,
    /// MPa
    pub qc: f64,
    /// MPa
    pub fs: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u2: Option<f64>,
}

fn default_area_ratio() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CptInput {
    pub profile: Vec<CptSample>,
    #[serde(default = "default_area_ratio")]
    pub cone_area_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CptResult {
    /// (depth, Rf %) where qc > 0.
    pub friction_ratio: Vec<(f64, f64)>,
    /// (depth, qt MPa) where u2 was measured.
    pub corrected_cone_resistance: Vec<(f64, f64)>,
}

pub fn interpret_cpt(input: &CptInput) -> Result<CptResult, EngineError> {
    if input.profile.is_empty() {
        return Err(EngineError::EmptyProfile);
    }
    if let Some(i) = input.profile.windows(2).position(|w| !(w[1].depth > w[0].depth)) {
        return Err(EngineError::NonMonotoneDepth(i + 1));
    }
    if !input.cone_area_ratio.is_finite() {
        return Err(EngineError::InvalidInput("cone area ratio is not finite".into()));
    }
    for (i, s) in input.profile.iter().enumerate() {
        if ![s.depth, s.qc, s.fs, s.u2.unwrap_or(0.0)].iter().all(|v| v.is_finite()) {
            return Err(EngineError::InvalidInput(format!("non-finite value at sample {i}")));
        }
        if s.qc < 0.0 {
            return Err(EngineError::InvalidInput(format!("negative cone resistance at sample {i}")));
        }
    }

    let friction_ratio = input
        .profile
        .iter()
        .filter(|s| s.qc > 0.0)
        .map(|s| (s.depth, 100.0 * s.fs / s.qc))
        .collect();
    let corrected_cone_resistance = input
        .profile
        .iter()
        .filter_map(|s| s.u2.map(|u2| (s.depth, s.qc + (1.0 - input.cone_area_ratio) * u2)))
        .collect();
    Ok(CptResult {
        friction_ratio,
        corrected_cone_resistance,
    })
}

impl CptInput {
    pub fn to_layers(&self) -> (Layer, Layer) {
        let mut context = Layer::default();
        context.values.push(NamedValue::number("cone-area-ratio", self.cone_area_ratio, "dimensionless"));
        let mut raw = Layer::default();
        let column = |f: fn(&CptSample) -> f64| self.profile.iter().map(|s| (s.depth, f(s))).collect();
        raw.series.push(NamedSeries::new("cone-resistance", Axis::Depth, "m", "mpa", column(|s| s.qc)));
        raw.series.push(NamedSeries::new("sleeve-friction", Axis::Depth, "m", "mpa", column(|s| s.fs)));
        let u2: Vec<_> = self.profile.iter().filter_map(|s| s.u2.map(|u| (s.depth, u))).collect();
        if !u2.is_empty() {
            raw.series.push(NamedSeries::new("pore-pressure", Axis::Depth, "m", "mpa", u2));
        }
        (context, raw)
    }

    pub fn from_layers(context: &Layer, raw: &Layer) -> Result<Self, EngineError> {
        let qc = raw
            .series("cone-resistance")
            .ok_or_else(|| EngineError::MissingInput("cone-resistance".into()))?;
        let fs = raw
            .series("sleeve-friction")
            .ok_or_else(|| EngineError::MissingInput("sleeve-friction".into()))?;
        if qc.points.len() != fs.points.len() || qc.points.iter().zip(&fs.points).any(|(a, b)| a.0 != b.0) {
            return Err(EngineError::InvalidInput("qc and fs are not sampled at the same depths".into()));
        }
        let u2 = raw.series("pore-pressure");
        let profile = qc
            .points
            .iter()
            .zip(&fs.points)
            .map(|(&(depth, qc), &(_, fs))| CptSample {
                depth,
                qc,
                fs,
                u2: u2.and_then(|s| s.points.iter().find(|p| p.0 == depth).map(|p| p.1)),
            })
            .collect();
        Ok(CptInput {
            profile,
            cone_area_ratio: context.number("cone-area-ratio").unwrap_or(1.0),
        })
    }
}

impl CptResult {
    pub fn to_layers(&self) -> (Layer, Layer) {
        let mut intermediate = Layer::default();
        if !self.friction_ratio.is_empty() {
            intermediate.series.push(NamedSeries::new(
                "friction-ratio",
                Axis::Depth,
                "m",
                "percent",
                self.friction_ratio.clone(),
            ));
        }
        if !self.corrected_cone_resistance.is_empty() {
            intermediate.series.push(NamedSeries::new(
                "corrected-cone-resistance",
                Axis::Depth,
                "m",
                "mpa",
                self.corrected_cone_resistance.clone(),
            ));
        }
        (intermediate, Layer::default())
    }
}
