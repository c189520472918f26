//! Instantaneous drilling parameters resampled on a uniform depth grid.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{require_number, EngineError};
use crate::model::{Axis, Layer, NamedSeries, NamedValue};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrillingChannel {
    pub unit: String,
    /// (depth m, value)
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrillingLogInput {
    /// Keyed by observed-property id (penetration-rate, torque, thrust, ...).
    pub channels: BTreeMap<String, DrillingChannel>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelSummary {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrillingLogResult {
    pub step: f64,
    pub channels: BTreeMap<String, DrillingChannel>,
    pub summaries: BTreeMap<String, ChannelSummary>,
}

/// Depths first, first + step, ... strictly below last, then last.
pub fn depth_grid(first: f64, last: f64, step: f64) -> Vec<f64> {
    let mut grid = Vec::new();
    let mut k = 0u64;
    loop {
        let d = first + k as f64 * step;
        if d >= last - 1e-9 * step {
            break;
        }
        grid.push(d);
        k += 1;
    }
    grid.push(last);
    grid
}

fn interpolate_at(points: &[(f64, f64)], depth: f64) -> f64 {
    let hi = points.partition_point(|p| p.0 < depth);
    if hi == 0 {
        return points[0].1;
    }
    if hi == points.len() {
        return points[points.len() - 1].1;
    }
    let (x0, y0) = points[hi - 1];
    let (x1, y1) = points[hi];
    if depth == x1 {
        return y1;
    }
    y0 + (y1 - y0) * (depth - x0) / (x1 - x0)
}

pub fn resample_drilling_log(input: &DrillingLogInput, step: f64) -> Result<DrillingLogResult, EngineError> {
    if !(step.is_finite() && step > 0.0) {
        return Err(EngineError::NonPositiveStep);
    }
    if input.channels.is_empty() {
        return Err(EngineError::EmptyProfile);
    }
    let mut channels = BTreeMap::new();
    let mut summaries = BTreeMap::new();
    for (name, channel) in &input.channels {
        let pts = &channel.points;
        if pts.len() < 2 {
            return Err(EngineError::EmptyChannel(name.clone()));
        }
        if pts.iter().any(|(d, v)| !d.is_finite() || !v.is_finite()) {
            return Err(EngineError::InvalidInput(format!("channel `{name}` holds a non-finite number")));
        }
        if let Some(i) = pts.windows(2).position(|w| !(w[1].0 > w[0].0)) {
            return Err(EngineError::NonMonotoneDepth(i + 1));
        }
        let resampled: Vec<(f64, f64)> = depth_grid(pts[0].0, pts[pts.len() - 1].0, step)
            .into_iter()
            .map(|d| (d, interpolate_at(pts, d)))
            .collect();
        let values = resampled.iter().map(|p| p.1);
        let min = values.clone().fold(f64::INFINITY, f64::min);
        let max = values.clone().fold(f64::NEG_INFINITY, f64::max);
        let mean = (values.sum::<f64>() / resampled.len() as f64).clamp(min, max);
        summaries.insert(name.clone(), ChannelSummary { min, max, mean });
        channels.insert(
            name.clone(),
            DrillingChannel {
                unit: channel.unit.clone(),
                points: resampled,
            },
        );
    }
    Ok(DrillingLogResult {
        step,
        channels,
        summaries,
    })
}

impl DrillingLogInput {
    pub fn to_layers(&self, step: f64) -> (Layer, Layer) {
        let mut context = Layer::default();
        context.values.push(NamedValue::number("resampling-step", step, "m"));
        let mut raw = Layer::default();
        for (name, ch) in &self.channels {
            raw.series.push(NamedSeries::new(name, Axis::Depth, "m", &ch.unit, ch.points.clone()));
        }
        (context, raw)
    }

    /// Every depth-indexed raw series is a channel.
    pub fn from_layers(context: &Layer, raw: &Layer) -> Result<(Self, f64), EngineError> {
        let step = require_number(context, "resampling-step")?;
        let channels = raw
            .series
            .iter()
            .filter(|s| s.axis == Axis::Depth)
            .map(|s| {
                (
                    s.property.clone(),
                    DrillingChannel {
                        unit: s.y_unit.clone(),
                        points: s.points.clone(),
                    },
                )
            })
            .collect();
        Ok((DrillingLogInput { channels }, step))
    }
}

impl DrillingLogResult {
    /// Resampled channels go to the intermediate layer; summaries are
    /// interpreted values keyed by channel, told apart by group tag.
    pub fn to_layers(&self) -> (Layer, Layer) {
        let mut intermediate = Layer::default();
        let mut interpreted = Layer::default();
        for (name, ch) in &self.channels {
            intermediate.series.push(NamedSeries::new(name, Axis::Depth, "m", &ch.unit, ch.points.clone()));
            let s = &self.summaries[name];
            for (tag, v) in [("min", s.min), ("max", s.max), ("mean", s.mean)] {
                interpreted.values.push(NamedValue::number(name, v, &ch.unit).in_group(tag));
            }
        }
        (intermediate, interpreted)
    }
}
