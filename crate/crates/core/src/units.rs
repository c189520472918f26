//! Model units and the closed source-unit conversion table.
//!
//! Each property is stored in exactly one unit. Ingestion converts source
//! units through [`CONVERSIONS`]; anything outside the table is refused.

/// A conversion `value * multiply / divide` from a source unit to a model
/// unit. Scale factors are integers so that decimal inputs round once.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conversion {
    pub from: &'static str,
    pub to: &'static str,
    pub multiply: f64,
    pub divide: f64,
}

impl Conversion {
    pub fn apply(&self, value: f64) -> f64 {
        if self.divide != 1.0 {
            value / self.divide
        } else {
            value * self.multiply
        }
    }

    /// Inverse, used when exporting to a source unit.
    pub fn invert(&self, value: f64) -> f64 {
        if self.divide != 1.0 {
            value * self.divide
        } else {
            value / self.multiply
        }
    }
}

const fn conv(from: &'static str, to: &'static str, multiply: f64, divide: f64) -> Conversion {
    Conversion {
        from,
        to,
        multiply,
        divide,
    }
}

pub const CONVERSIONS: &[Conversion] = &[
    conv("kpa", "mpa", 1.0, 1000.0),
    conv("pa", "mpa", 1.0, 1_000_000.0),
    conv("mpa", "mpa", 1.0, 1.0),
    conv("mm", "m", 1.0, 1000.0),
    conv("cm", "m", 1.0, 100.0),
    conv("m", "m", 1.0, 1.0),
    conv("percent", "percent", 1.0, 1.0),
    conv("cm3", "cm3", 1.0, 1.0),
    conv("l", "cm3", 1000.0, 1.0),
    // units that only ever appear as model units
    conv("s", "s", 1.0, 1.0),
    conv("blows", "blows", 1.0, 1.0),
    conv("dimensionless", "dimensionless", 1.0, 1.0),
    conv("cm3-per-mpa", "cm3-per-mpa", 1.0, 1.0),
    conv("degree", "degree", 1.0, 1.0),
    conv("kn", "kn", 1.0, 1.0),
    conv("kn-m", "kn-m", 1.0, 1.0),
    conv("m-per-h", "m-per-h", 1.0, 1.0),
];

pub fn conversion_from(unit_id: &str) -> Option<&'static Conversion> {
    CONVERSIONS.iter().find(|c| c.from == unit_id)
}

const MODEL_UNITS: &[(&str, &str)] = &[
    ("depth", "m"),
    ("pressure", "mpa"),
    ("time", "s"),
    ("shear-strength", "mpa"),
    ("cohesion", "mpa"),
    ("friction-angle", "degree"),
    ("undrained-shear-strength", "mpa"),
    ("water-content", "percent"),
    ("piezometric-level", "m"),
    ("hydraulic-head-pressure", "mpa"),
    ("probe-rest-volume", "cm3"),
    ("system-compliance", "cm3-per-mpa"),
    ("membrane-calibration-volume", "cm3"),
    ("rest-earth-pressure", "mpa"),
    ("injected-volume-30s", "cm3"),
    ("injected-volume-60s", "cm3"),
    ("corrected-volume", "cm3"),
    ("creep-volume", "cm3"),
    ("pseudo-elastic-start-pressure", "mpa"),
    ("pseudo-elastic-end-pressure", "mpa"),
    ("pressuremeter-modulus", "mpa"),
    ("creep-pressure", "mpa"),
    ("limit-pressure", "mpa"),
    ("net-creep-pressure", "mpa"),
    ("net-limit-pressure", "mpa"),
    ("cone-resistance", "mpa"),
    ("sleeve-friction", "mpa"),
    ("friction-ratio", "percent"),
    ("pore-pressure", "mpa"),
    ("corrected-cone-resistance", "mpa"),
    ("cone-area-ratio", "dimensionless"),
    ("spt-increment-1", "blows"),
    ("spt-increment-2", "blows"),
    ("spt-increment-3", "blows"),
    ("spt-refusal-threshold", "blows"),
    ("spt-blow-count", "blows"),
    ("spt-refusal", "dimensionless"),
    ("penetration-rate", "m-per-h"),
    ("torque", "kn-m"),
    ("thrust", "kn"),
    ("resampling-step", "m"),
];

/// The unit a property is stored in, when the model fixes one.
pub fn model_unit(property: &str) -> Option<&'static str> {
    MODEL_UNITS.iter().find(|(p, _)| *p == property).map(|(_, u)| *u)
}
