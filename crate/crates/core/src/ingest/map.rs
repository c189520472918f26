//! Built-in mapping from AGS groups to survey points.
//!
//! | group | heading                       | becomes                              |
//! |-------|-------------------------------|--------------------------------------|
//! | LOCA  | LOCA_ID                       | point name (platform id issued later)|
//! |       | LOCA_LON, LOCA_LAT            | location, decimal degrees            |
//! |       | LOCA_FDEP                     | planned and drilled depth            |
//! |       | LOCA_GL                       | ground elevation                     |
//! |       | LOCA_PURP                     | purpose                              |
//! | GEOL  | GEOL_TOP, GEOL_BASE           | lithology interval                   |
//! |       | GEOL_LEG, GEOL_DESC, GEOL_GEOL| code, description, stratigraphy      |
//! | ISPT  | ISPT_TOP, ISPT_INC1..3        | one spt record per row (150 mm incs) |
//! | SCPT  | SCPT_DPTH, SCPT_RES, SCPT_FRES, SCPT_PWP2 | one cpt record per point |
//!
//! Child groups join on LOCA_ID. Other groups are reported as warnings.

use std::collections::BTreeMap;

use serde::Serialize;

use super::ags::{AgsDocument, AgsGroup};
use super::{parse_number, source_conversion, IngestError};
use crate::engines::{derive_layers, CptInput, CptSample, SptInput, spt::DEFAULT_REFUSAL_THRESHOLD};
use crate::model::{
    validate_survey_point, validate_test_record, DeclarationStatus, GeoPoint, Layer, LithologyInterval, Provenance,
    Purpose, SurveyPoint, TestRecord, Violation,
};
use crate::registry::Registry;

/// SPT test drive below the seating drive: three 150 mm increments.
const SPT_TEST_LENGTH_M: f64 = 0.45;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MappedPoint {
    pub point: SurveyPoint,
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgsImport {
    pub points: Vec<MappedPoint>,
    pub warnings: Vec<String>,
}

struct Reader<'a> {
    group: &'a AgsGroup,
    reg: &'a Registry,
}

impl<'a> Reader<'a> {
    fn text(&self, row: usize, heading: &str) -> Option<&'a str> {
        let col = self.group.column(heading)?;
        let t = self.group.rows[row][col].trim();
        (!t.is_empty()).then_some(t)
    }

    /// Numeric cell converted into `property`'s model unit.
    fn number(&self, row: usize, heading: &str, property: &str) -> Result<Option<f64>, IngestError> {
        let Some(col) = self.group.column(heading) else {
            return Ok(None);
        };
        let Some(text) = self.text(row, heading) else {
            return Ok(None);
        };
        let conv = source_conversion(self.reg, property, self.group.unit(col), heading)?;
        let v = parse_number(text).ok_or_else(|| IngestError::AgsValue {
            group: self.group.name.clone(),
            row: row + 1,
            heading: heading.to_string(),
            value: text.to_string(),
        })?;
        Ok(Some(conv.apply(v)))
    }

    fn key(&self, row: usize) -> &'a str {
        let col = self.group.column("LOCA_ID").expect("checked");
        self.group.rows[row][col].trim()
    }
}

fn reader<'a>(doc: &'a AgsDocument, name: &str, reg: &'a Registry) -> Result<Option<Reader<'a>>, IngestError> {
    match doc.group(name) {
        None => Ok(None),
        Some(g) if g.column("LOCA_ID").is_none() => Err(IngestError::MissingKeyColumn(name.to_string())),
        Some(g) => Ok(Some(Reader { group: g, reg })),
    }
}

fn new_record(procedure: &str, top: f64, bottom: f64, context: Layer, raw: Layer, provenance: &Provenance) -> TestRecord {
    TestRecord {
        id: String::new(),
        survey_point_id: String::new(),
        procedure: procedure.to_string(),
        top_depth: top,
        bottom_depth: bottom,
        context,
        raw,
        intermediate: Layer::default(),
        interpreted: Layer::default(),
        provenance: provenance.clone(),
    }
}

pub fn map_ags(doc: &AgsDocument, reg: &Registry, provenance: &Provenance) -> Result<AgsImport, IngestError> {
    let mut warnings = Vec::new();
    let loca = reader(doc, "LOCA", reg)?.ok_or_else(|| IngestError::MissingKeyColumn("LOCA".into()))?;

    let mut points: Vec<SurveyPoint> = Vec::new();
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    for row in 0..loca.group.rows.len() {
        let key = loca.key(row);
        if key.is_empty() {
            return Err(IngestError::MissingKeyColumn("LOCA".into()));
        }
        if index.contains_key(key) {
            warnings.push(format!("LOCA_ID {key} repeated; later row ignored"));
            continue;
        }
        let mut location = match (parse_degrees(&loca, row, "LOCA_LON")?, parse_degrees(&loca, row, "LOCA_LAT")?) {
            (Some(lon), Some(lat)) => GeoPoint::new(lon, lat),
            _ => {
                warnings.push(format!("LOCA_ID {key}: no LOCA_LON/LOCA_LAT, located at (0, 0)"));
                GeoPoint::new(0.0, 0.0)
            }
        };
        location.ground_elevation = loca.number(row, "LOCA_GL", "depth")?;
        let final_depth = loca.number(row, "LOCA_FDEP", "depth")?;
        let purpose = match loca.text(row, "LOCA_PURP") {
            None => Purpose::Geotechnical,
            Some(p) => p.to_ascii_lowercase().parse().unwrap_or_else(|_| {
                warnings.push(format!("LOCA_ID {key}: purpose `{p}` not recognised, using geotechnical"));
                Purpose::Geotechnical
            }),
        };
        index.insert(key.to_string(), points.len());
        points.push(SurveyPoint {
            id: String::new(),
            name: key.to_string(),
            location,
            planned_depth: final_depth.unwrap_or(0.0),
            drilled_depth: final_depth,
            purpose,
            declaration_status: DeclarationStatus::Exempt,
            lithology: vec![],
            geological_unit: None,
            attachments: vec![],
            tests: vec![],
        });
    }

    let owner = |r: &Reader, row: usize| -> Result<usize, IngestError> {
        let key = r.key(row);
        index.get(key).copied().ok_or_else(|| IngestError::OrphanRow {
            group: r.group.name.clone(),
            key: key.to_string(),
        })
    };

    if let Some(geol) = reader(doc, "GEOL", reg)? {
        for row in 0..geol.group.rows.len() {
            let i = owner(&geol, row)?;
            points[i].lithology.push(LithologyInterval {
                top_depth: geol.number(row, "GEOL_TOP", "depth")?.unwrap_or(f64::NAN),
                bottom_depth: geol.number(row, "GEOL_BASE", "depth")?.unwrap_or(f64::NAN),
                lithology_code: geol.text(row, "GEOL_LEG").unwrap_or_default().to_string(),
                description: geol.text(row, "GEOL_DESC").unwrap_or_default().to_string(),
                stratigraphy_code: geol.text(row, "GEOL_GEOL").map(str::to_string),
            });
        }
        for p in &mut points {
            if !p.lithology.is_sorted_by(|a, b| a.top_depth.total_cmp(&b.top_depth).is_le()) {
                p.lithology.sort_by(|a, b| a.top_depth.total_cmp(&b.top_depth));
                warnings.push(format!("LOCA_ID {}: GEOL rows reordered by depth", p.name));
            }
        }
    }

    if let Some(ispt) = reader(doc, "ISPT", reg)? {
        for row in 0..ispt.group.rows.len() {
            let i = owner(&ispt, row)?;
            let top = ispt.number(row, "ISPT_TOP", "depth")?.unwrap_or(f64::NAN);
            let mut increments = Vec::new();
            for (heading, property) in [("ISPT_INC1", "spt-increment-1"), ("ISPT_INC2", "spt-increment-2"), ("ISPT_INC3", "spt-increment-3")] {
                match ispt.number(row, heading, property)? {
                    Some(n) if n >= 0.0 && n.fract() == 0.0 => increments.push(n as u32),
                    Some(n) => {
                        return Err(IngestError::AgsValue {
                            group: "ISPT".into(),
                            row: row + 1,
                            heading: heading.into(),
                            value: n.to_string(),
                        })
                    }
                    None => break,
                }
            }
            let input = SptInput {
                depth: top,
                increments,
                refusal_threshold: DEFAULT_REFUSAL_THRESHOLD,
            };
            let (context, raw) = input.to_layers();
            let record = new_record("spt", top, top + SPT_TEST_LENGTH_M, context, raw, provenance);
            points[i].tests.push(record);
        }
    }

    if let Some(scpt) = reader(doc, "SCPT", reg)? {
        let mut profiles: BTreeMap<usize, Vec<CptSample>> = BTreeMap::new();
        for row in 0..scpt.group.rows.len() {
            let i = owner(&scpt, row)?;
            let sample = CptSample {
                depth: scpt.number(row, "SCPT_DPTH", "depth")?.unwrap_or(f64::NAN),
                qc: scpt.number(row, "SCPT_RES", "cone-resistance")?.unwrap_or(f64::NAN),
                fs: scpt.number(row, "SCPT_FRES", "sleeve-friction")?.unwrap_or(f64::NAN),
                u2: scpt.number(row, "SCPT_PWP2", "pore-pressure")?,
            };
            profiles.entry(i).or_default().push(sample);
        }
        for (i, profile) in profiles {
            let top = profile.first().map_or(0.0, |s| s.depth);
            let bottom = profile.last().map_or(0.0, |s| s.depth);
            let (context, raw) = CptInput {
                profile,
                cone_area_ratio: 1.0,
            }
            .to_layers();
            points[i].tests.push(new_record("cpt", top, bottom, context, raw, provenance));
        }
    }

    for g in &doc.groups {
        if !matches!(g.name.as_str(), "LOCA" | "GEOL" | "ISPT" | "SCPT") {
            warnings.push(format!("group {} not mapped", g.name));
        }
    }

    let mut out = Vec::with_capacity(points.len());
    for mut p in points {
        if p.drilled_depth.is_none() {
            let deepest = p
                .tests
                .iter()
                .map(|t| t.bottom_depth)
                .chain(p.lithology.iter().map(|l| l.bottom_depth))
                .filter(|d| d.is_finite())
                .fold(0.0, f64::max);
            p.planned_depth = deepest;
        }
        p.declaration_status = DeclarationStatus::for_depth(p.planned_depth);
        for t in &mut p.tests {
            match derive_layers(t) {
                Ok((intermediate, interpreted)) => {
                    t.intermediate = intermediate;
                    t.interpreted = interpreted;
                }
                Err(e) => warnings.push(format!("LOCA_ID {}: {} at {} m not interpreted: {e}", p.name, t.procedure, t.top_depth)),
            }
        }
        let mut violations = validate_survey_point(&p);
        for (k, t) in p.tests.iter().enumerate() {
            violations.extend(validate_test_record(t, reg).into_iter().map(|mut v| {
                v.field = format!("tests[{k}].{}", v.field);
                v
            }));
        }
        out.push(MappedPoint { point: p, violations });
    }
    Ok(AgsImport { points: out, warnings })
}

fn parse_degrees(r: &Reader, row: usize, heading: &str) -> Result<Option<f64>, IngestError> {
    let Some(text) = r.text(row, heading) else {
        return Ok(None);
    };
    parse_number(text).map(Some).ok_or_else(|| IngestError::AgsValue {
        group: r.group.name.clone(),
        row: row + 1,
        heading: heading.to_string(),
        value: text.to_string(),
    })
}
