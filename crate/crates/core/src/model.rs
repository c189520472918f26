//! Survey points, four-layer test records and the canonical document format.
//!
//! Every stored quantity is in its model unit: pressures in MPa, volumes in
//! cm³, depths in m, time in s, coordinates in decimal degrees.

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::registry::{ConceptKind, Registry};
use crate::units;

/// Boreholes strictly deeper than this must be declared before drilling.
pub const DECLARATION_DEPTH_THRESHOLD_M: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GeoPoint {
    pub lon: f64,
    pub lat: f64,
    /// Metres above an unspecified datum.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground_elevation: Option<f64>,
}

impl GeoPoint {
    pub fn new(lon: f64, lat: f64) -> Self {
        GeoPoint {
            lon,
            lat,
            ground_elevation: None,
        }
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if !(self.lon.is_finite() && (-180.0..=180.0).contains(&self.lon)) {
            out.push(Violation::new("location.lon", "lon-range", format!("longitude {} outside [-180, 180]", self.lon)));
        }
        if !(self.lat.is_finite() && (-90.0..=90.0).contains(&self.lat)) {
            out.push(Violation::new("location.lat", "lat-range", format!("latitude {} outside [-90, 90]", self.lat)));
        }
        if let Some(z) = self.ground_elevation {
            if !z.is_finite() {
                out.push(Violation::new("location.groundElevation", "finite", "ground elevation is not a finite number"));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Purpose {
    Geotechnical,
    Geological,
    Hydrogeological,
    Geothermal,
    WaterPumping,
    Other,
}

impl Purpose {
    pub const ALL: [Purpose; 6] = [
        Purpose::Geotechnical,
        Purpose::Geological,
        Purpose::Hydrogeological,
        Purpose::Geothermal,
        Purpose::WaterPumping,
        Purpose::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Purpose::Geotechnical => "geotechnical",
            Purpose::Geological => "geological",
            Purpose::Hydrogeological => "hydrogeological",
            Purpose::Geothermal => "geothermal",
            Purpose::WaterPumping => "water-pumping",
            Purpose::Other => "other",
        }
    }
}

impl std::str::FromStr for Purpose {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Purpose::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| format!("unknown purpose `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeclarationStatus {
    Declared,
    Exempt,
}

impl DeclarationStatus {
    /// Status a planned depth requires.
    pub fn for_depth(planned_depth: f64) -> DeclarationStatus {
        if planned_depth > DECLARATION_DEPTH_THRESHOLD_M {
            DeclarationStatus::Declared
        } else {
            DeclarationStatus::Exempt
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LithologyInterval {
    pub top_depth: f64,
    pub bottom_depth: f64,
    pub lithology_code: String,
    pub description: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stratigraphy_code: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttachmentKind {
    ReportPdf,
    Scan,
    Photo,
    Other,
}

impl std::str::FromStr for AttachmentKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "report-pdf" | "pdf" => Ok(AttachmentKind::ReportPdf),
            "scan" => Ok(AttachmentKind::Scan),
            "photo" => Ok(AttachmentKind::Photo),
            "other" => Ok(AttachmentKind::Other),
            _ => Err(format!("unknown attachment kind `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Attachment {
    pub filename: String,
    pub media_type: String,
    pub byte_size: u64,
    pub sha256: String,
    pub kind: AttachmentKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Number(f64),
    Text(String),
}

impl Value {
    pub fn as_number(&self) -> Option<f64> {
        match self {
            Value::Number(n) => Some(*n),
            Value::Text(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct NamedValue {
    pub property: String,
    pub value: Value,
    pub unit: String,
    /// Shared by linked quantities, e.g. cohesion and friction angle.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
}

impl NamedValue {
    pub fn number(property: &str, value: f64, unit: &str) -> Self {
        NamedValue {
            property: property.into(),
            value: Value::Number(value),
            unit: unit.into(),
            group: None,
        }
    }

    pub fn text(property: &str, value: &str, unit: &str) -> Self {
        NamedValue {
            property: property.into(),
            value: Value::Text(value.into()),
            unit: unit.into(),
            group: None,
        }
    }

    pub fn in_group(mut self, group: &str) -> Self {
        self.group = Some(group.into());
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Depth,
    Pressure,
    Time,
}

impl Axis {
    /// Registry id of the abscissa property.
    pub fn concept_id(self) -> &'static str {
        match self {
            Axis::Depth => "depth",
            Axis::Pressure => "pressure",
            Axis::Time => "time",
        }
    }

    /// Depth and time abscissae must strictly increase; pressure may repeat.
    pub fn accepts(self, prev: f64, next: f64) -> bool {
        match self {
            Axis::Depth | Axis::Time => next > prev,
            Axis::Pressure => next >= prev,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct NamedSeries {
    pub property: String,
    pub axis: Axis,
    pub x_unit: String,
    pub y_unit: String,
    pub points: Vec<(f64, f64)>,
}

impl NamedSeries {
    pub fn new(property: &str, axis: Axis, x_unit: &str, y_unit: &str, points: Vec<(f64, f64)>) -> Self {
        NamedSeries {
            property: property.into(),
            axis,
            x_unit: x_unit.into(),
            y_unit: y_unit.into(),
            points,
        }
    }
}

/// One of the four data classes of a test.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    #[serde(default)]
    pub values: Vec<NamedValue>,
    #[serde(default)]
    pub series: Vec<NamedSeries>,
}

impl Layer {
    pub fn is_empty(&self) -> bool {
        self.values.is_empty() && self.series.is_empty()
    }

    pub fn value(&self, property: &str) -> Option<&NamedValue> {
        self.values.iter().find(|v| v.property == property)
    }

    pub fn number(&self, property: &str) -> Option<f64> {
        self.value(property).and_then(|v| v.value.as_number())
    }

    pub fn series(&self, property: &str) -> Option<&NamedSeries> {
        self.series.iter().find(|s| s.property == property)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LayerKind {
    Context,
    Raw,
    Intermediate,
    Interpreted,
}

impl LayerKind {
    pub const ALL: [LayerKind; 4] = [
        LayerKind::Context,
        LayerKind::Raw,
        LayerKind::Intermediate,
        LayerKind::Interpreted,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LayerKind::Context => "context",
            LayerKind::Raw => "raw",
            LayerKind::Intermediate => "intermediate",
            LayerKind::Interpreted => "interpreted",
        }
    }
}

impl std::str::FromStr for LayerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LayerKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown layer `{s}`"))
    }
}

/// Layers an engine may (re)compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivedLayer {
    Intermediate,
    Interpreted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttachMode {
    Replace,
    RejectIfPresent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Provenance {
    pub submitter: String,
    pub source_file: String,
    pub ingested_at: DateTime<Utc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TestRecord {
    pub id: String,
    pub survey_point_id: String,
    pub procedure: String,
    pub top_depth: f64,
    pub bottom_depth: f64,
    #[serde(default)]
    pub context: Layer,
    #[serde(default)]
    pub raw: Layer,
    #[serde(default)]
    pub intermediate: Layer,
    #[serde(default)]
    pub interpreted: Layer,
    pub provenance: Provenance,
}

impl TestRecord {
    pub fn layer(&self, kind: LayerKind) -> &Layer {
        match kind {
            LayerKind::Context => &self.context,
            LayerKind::Raw => &self.raw,
            LayerKind::Intermediate => &self.intermediate,
            LayerKind::Interpreted => &self.interpreted,
        }
    }

    /// Digest of (procedure, depth range, raw layer), used to spot resubmissions.
    pub fn fingerprint(&self) -> String {
        let doc = serde_json::json!({
            "procedure": self.procedure,
            "topDepth": self.top_depth,
            "bottomDepth": self.bottom_depth,
            "raw": self.raw,
        });
        let bytes = serde_json::to_vec(&doc).expect("json value serializes");
        hex::encode(Sha256::digest(&bytes))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SurveyPoint {
    pub id: String,
    pub name: String,
    pub location: GeoPoint,
    pub planned_depth: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drilled_depth: Option<f64>,
    pub purpose: Purpose,
    pub declaration_status: DeclarationStatus,
    #[serde(default)]
    pub lithology: Vec<LithologyInterval>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geological_unit: Option<String>,
    #[serde(default)]
    pub attachments: Vec<Attachment>,
    #[serde(default)]
    pub tests: Vec<TestRecord>,
}

impl SurveyPoint {
    /// Deepest extent the point may describe.
    pub fn max_depth(&self) -> f64 {
        self.planned_depth.max(self.drilled_depth.unwrap_or(0.0))
    }

    pub fn test(&self, id: &str) -> Option<&TestRecord> {
        self.tests.iter().find(|t| t.id == id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub field: String,
    pub rule: String,
    pub message: String,
}

impl Violation {
    pub fn new(field: impl Into<String>, rule: &str, message: impl Into<String>) -> Self {
        Violation {
            field: field.into(),
            rule: rule.into(),
            message: message.into(),
        }
    }
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {} ({})", self.field, self.rule, self.message)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("{0} layer already present")]
    LayerConflict(&'static str),
    #[error("unknown concept `{0}`")]
    UnknownConcept(String),
    #[error("invalid layer: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidLayer(Vec<Violation>),
}

/// Checks every survey point invariant that does not need the registry.
/// Returns violations in a fixed order: location, depths, declaration,
/// lithology, attachments.
pub fn validate_survey_point(sp: &SurveyPoint) -> Vec<Violation> {
    let mut out = sp.location.violations();

    if !(sp.planned_depth.is_finite() && sp.planned_depth > 0.0) {
        out.push(Violation::new("plannedDepth", "planned-depth-positive", format!("planned depth {} must be > 0", sp.planned_depth)));
    }
    if let Some(d) = sp.drilled_depth {
        if !(d.is_finite() && d >= 0.0) {
            out.push(Violation::new("drilledDepth", "drilled-depth-nonnegative", format!("drilled depth {d} must be >= 0")));
        }
    }
    if sp.planned_depth > DECLARATION_DEPTH_THRESHOLD_M && sp.declaration_status == DeclarationStatus::Exempt {
        out.push(Violation::new(
            "declarationStatus",
            "declaration-required",
            format!("planned depth {} m exceeds {DECLARATION_DEPTH_THRESHOLD_M} m", sp.planned_depth),
        ));
    }

    let max_depth = sp.max_depth();
    for (i, iv) in sp.lithology.iter().enumerate() {
        let field = format!("lithology[{i}]");
        if !(iv.top_depth.is_finite() && iv.bottom_depth.is_finite() && 0.0 <= iv.top_depth && iv.top_depth < iv.bottom_depth) {
            out.push(Violation::new(&field, "lithology-interval", format!("need 0 <= top < bottom, got [{}, {})", iv.top_depth, iv.bottom_depth)));
        } else if iv.bottom_depth > max_depth {
            out.push(Violation::new(&field, "lithology-depth-range", format!("bottom {} below borehole depth {max_depth}", iv.bottom_depth)));
        }
        if i > 0 {
            let prev = &sp.lithology[i - 1];
            if iv.top_depth < prev.top_depth {
                out.push(Violation::new(&field, "lithology-order", "intervals must be sorted by top depth"));
            } else if iv.top_depth < prev.bottom_depth {
                out.push(Violation::new(&field, "lithology-overlap", format!("[{}, {}) overlaps [{}, {})", iv.top_depth, iv.bottom_depth, prev.top_depth, prev.bottom_depth)));
            }
        }
    }

    for (i, a) in sp.attachments.iter().enumerate() {
        if a.sha256.len() != 64 || !a.sha256.bytes().all(|b| b.is_ascii_hexdigit() && !b.is_ascii_uppercase()) {
            out.push(Violation::new(format!("attachments[{i}].sha256"), "attachment-digest", "not a lowercase hex sha256 digest"));
        }
    }

    for (i, t) in sp.tests.iter().enumerate() {
        if !sp.id.is_empty() && t.survey_point_id != sp.id {
            out.push(Violation::new(format!("tests[{i}].surveyPointId"), "test-owner", format!("test belongs to `{}`", t.survey_point_id)));
        }
    }
    out
}

fn check_model_unit(property: &str, unit: &str, field: String, out: &mut Vec<Violation>) {
    if let Some(expected) = units::model_unit(property) {
        if expected != unit {
            out.push(Violation::new(field, "model-unit", format!("`{property}` is stored in `{expected}`, got `{unit}`")));
        }
    }
}

fn check_concept(reg: &Registry, kind: ConceptKind, id: &str, field: String, out: &mut Vec<Violation>) {
    if reg.get_kind(kind, id).is_none() {
        out.push(Violation::new(field, "unknown-concept", format!("`{id}` is not a registered {kind}")));
    }
}

/// Checks that every property and unit id of a layer resolves, that numbers
/// are in their model unit and that series abscissae are ordered according
/// to their axis.
pub fn validate_layer(layer: &Layer, prefix: &str, reg: &Registry) -> Vec<Violation> {
    let mut out = Vec::new();
    for (i, v) in layer.values.iter().enumerate() {
        let at = format!("{prefix}.values[{i}]");
        check_concept(reg, ConceptKind::ObservedProperty, &v.property, format!("{at}.property"), &mut out);
        check_concept(reg, ConceptKind::Unit, &v.unit, format!("{at}.unit"), &mut out);
        check_model_unit(&v.property, &v.unit, format!("{at}.unit"), &mut out);
        if let Value::Number(n) = v.value {
            if !n.is_finite() {
                out.push(Violation::new(format!("{at}.value"), "finite", "value is not a finite number"));
            }
        }
    }
    for (i, s) in layer.series.iter().enumerate() {
        let at = format!("{prefix}.series[{i}]");
        check_concept(reg, ConceptKind::ObservedProperty, &s.property, format!("{at}.property"), &mut out);
        check_concept(reg, ConceptKind::Unit, &s.x_unit, format!("{at}.xUnit"), &mut out);
        check_concept(reg, ConceptKind::Unit, &s.y_unit, format!("{at}.yUnit"), &mut out);
        check_model_unit(s.axis.concept_id(), &s.x_unit, format!("{at}.xUnit"), &mut out);
        check_model_unit(&s.property, &s.y_unit, format!("{at}.yUnit"), &mut out);
        if s.points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            out.push(Violation::new(format!("{at}.points"), "finite", "series holds a non-finite number"));
        } else if let Some(k) = s.points.windows(2).position(|w| !s.axis.accepts(w[0].0, w[1].0)) {
            out.push(Violation::new(
                format!("{at}.points[{}]", k + 1),
                "series-order",
                format!("{} abscissa must increase", s.axis.concept_id()),
            ));
        }
    }
    out
}

pub fn validate_test_record(rec: &TestRecord, reg: &Registry) -> Vec<Violation> {
    let mut out = Vec::new();
    check_concept(reg, ConceptKind::Procedure, &rec.procedure, "procedure".into(), &mut out);
    if !(rec.top_depth.is_finite() && rec.bottom_depth.is_finite() && 0.0 <= rec.top_depth && rec.top_depth <= rec.bottom_depth) {
        out.push(Violation::new("topDepth", "test-depth-range", format!("need 0 <= top <= bottom, got [{}, {}]", rec.top_depth, rec.bottom_depth)));
    }
    for kind in LayerKind::ALL {
        out.extend(validate_layer(rec.layer(kind), kind.as_str(), reg));
    }
    out
}

/// Sets a derived layer, leaving context and raw layers untouched.
pub fn attach_layer(
    record: &TestRecord,
    which: DerivedLayer,
    payload: Layer,
    mode: AttachMode,
    reg: &Registry,
) -> Result<TestRecord, ModelError> {
    let name = match which {
        DerivedLayer::Intermediate => "intermediate",
        DerivedLayer::Interpreted => "interpreted",
    };
    let violations = validate_layer(&payload, name, reg);
    if let Some(v) = violations.iter().find(|v| v.rule == "unknown-concept") {
        let id = v.message.split('`').nth(1).unwrap_or_default();
        return Err(ModelError::UnknownConcept(id.to_string()));
    }
    if !violations.is_empty() {
        return Err(ModelError::InvalidLayer(violations));
    }
    let mut out = record.clone();
    let target = match which {
        DerivedLayer::Intermediate => &mut out.intermediate,
        DerivedLayer::Interpreted => &mut out.interpreted,
    };
    if mode == AttachMode::RejectIfPresent && !target.is_empty() {
        return Err(ModelError::LayerConflict(name));
    }
    *target = payload;
    Ok(out)
}

/// UTF-8 JSON with sorted object keys and shortest round-trip numbers.
pub fn canonical_serialize(sp: &SurveyPoint) -> Vec<u8> {
    canonical_json(sp)
}

pub fn canonical_json<T: Serialize>(value: &T) -> Vec<u8> {
    // serde_json::Value objects are BTreeMaps, so keys come out sorted.
    let tree = serde_json::to_value(value).expect("model types serialize");
    serde_json::to_vec(&tree).expect("json value serializes")
}

pub fn parse_canonical(bytes: &[u8]) -> Result<SurveyPoint, serde_json::Error> {
    serde_json::from_slice(bytes)
}
