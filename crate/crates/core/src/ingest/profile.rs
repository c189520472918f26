//! Mapping profiles: which table column feeds which concept, in which unit
//! and layer.
//!
//! ```text
//! # comment
//! [profile]
//! name = cpt
//! delimiter = ,
//! procedure = cpt
//! depth-column = depth_m
//!
//! [column]
//! column = depth_m
//! target = depth
//! unit = m
//! layer = raw
//! role = series-x
//! series-group = qc
//! ```
//!
//! `lon-column`, `lat-column` and `depth-column` are optional. `delimiter`
//! is one character, or the word `tab`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::IngestError;
use crate::model::Axis;
use crate::registry::{ConceptKind, Registry};
use crate::units;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileLayer {
    Contextual,
    Raw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    Value,
    SeriesX,
    SeriesY,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ColumnMap {
    pub column: String,
    pub target: String,
    pub unit: String,
    pub layer: ProfileLayer,
    pub role: Role,
    pub series_group: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MappingProfile {
    pub name: String,
    pub delimiter: char,
    pub procedure: String,
    pub lon_column: Option<String>,
    pub lat_column: Option<String>,
    pub depth_column: Option<String>,
    pub column_maps: Vec<ColumnMap>,
}

pub const BUNDLED_PROFILES: &[(&str, &str)] = &[("cpt", include_str!("../../data/profiles/cpt.profile"))];

pub fn bundled_profile(name: &str, reg: &Registry) -> Result<MappingProfile, IngestError> {
    let (_, text) = BUNDLED_PROFILES
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| IngestError::UnknownProfile(name.to_string()))?;
    parse_profile(text, reg)
}

fn syntax(line: usize, reason: impl Into<String>) -> IngestError {
    IngestError::ProfileSyntax {
        line,
        reason: reason.into(),
    }
}

enum Section {
    None,
    Profile,
    Column(usize),
}

pub fn parse_profile(text: &str, reg: &Registry) -> Result<MappingProfile, IngestError> {
    let mut head: BTreeMap<String, String> = BTreeMap::new();
    let mut blocks: Vec<(usize, BTreeMap<String, String>)> = Vec::new();
    let mut section = Section::None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r');
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        match trimmed {
            "[profile]" => {
                if !head.is_empty() || matches!(section, Section::Profile) {
                    return Err(syntax(line_no, "second [profile] section"));
                }
                section = Section::Profile;
                continue;
            }
            "[column]" => {
                blocks.push((line_no, BTreeMap::new()));
                section = Section::Column(blocks.len() - 1);
                continue;
            }
            s if s.starts_with('[') => return Err(syntax(line_no, format!("unknown section {s}"))),
            _ => {}
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| syntax(line_no, "expected `key = value`"))?;
        let key = key.trim().to_string();
        // keep a literal space or comma delimiter intact
        let value = value.strip_prefix(' ').unwrap_or(value);
        let value = if key == "delimiter" { value.to_string() } else { value.trim().to_string() };
        let map = match section {
            Section::None => return Err(syntax(line_no, "key outside any section")),
            Section::Profile => &mut head,
            Section::Column(i) => &mut blocks[i].1,
        };
        if map.insert(key.clone(), value).is_some() {
            return Err(syntax(line_no, format!("key `{key}` repeated")));
        }
    }

    const HEAD_KEYS: &[&str] = &["name", "delimiter", "procedure", "lon-column", "lat-column", "depth-column"];
    const COLUMN_KEYS: &[&str] = &["column", "target", "unit", "layer", "role", "series-group"];
    if let Some(k) = head.keys().find(|k| !HEAD_KEYS.contains(&k.as_str())) {
        return Err(IngestError::InvalidProfile(format!("unknown profile key `{k}`")));
    }
    let require = |v: Option<String>, what: &str| v.ok_or_else(|| IngestError::InvalidProfile(format!("missing `{what}`")));

    let name = require(head.remove("name"), "name")?;
    let delimiter = match require(head.remove("delimiter"), "delimiter")?.as_str() {
        "tab" => '\t',
        d if d.chars().count() == 1 => d.chars().next().unwrap(),
        d => return Err(IngestError::InvalidProfile(format!("delimiter `{d}` is not one character"))),
    };
    let procedure_term = require(head.remove("procedure"), "procedure")?;
    let procedure = reg
        .resolve(ConceptKind::Procedure, &procedure_term)
        .map_err(|_| IngestError::UnknownConcept(procedure_term.clone()))?
        .concept
        .id
        .clone();

    let mut column_maps = Vec::new();
    for (line, mut block) in blocks {
        if let Some(k) = block.keys().find(|k| !COLUMN_KEYS.contains(&k.as_str())) {
            return Err(IngestError::InvalidProfile(format!("[column] at line {line}: unknown key `{k}`")));
        }
        let column = require(block.remove("column"), "column")?;
        let target_term = require(block.remove("target"), "target")?;
        let unit_term = require(block.remove("unit"), "unit")?;
        let target = reg
            .resolve(ConceptKind::ObservedProperty, &target_term)
            .map_err(|_| IngestError::UnknownConcept(target_term.clone()))?
            .concept
            .id
            .clone();
        let unit = reg
            .resolve(ConceptKind::Unit, &unit_term)
            .map_err(|_| IngestError::UnknownConcept(unit_term.clone()))?
            .concept
            .id
            .clone();
        let layer = match block.remove("layer").as_deref().unwrap_or("raw") {
            "contextual" | "context" => ProfileLayer::Contextual,
            "raw" => ProfileLayer::Raw,
            other => return Err(IngestError::InvalidProfile(format!("column `{column}`: layer `{other}`"))),
        };
        let role = match block.remove("role").as_deref().unwrap_or("value") {
            "value" => Role::Value,
            "series-x" => Role::SeriesX,
            "series-y" => Role::SeriesY,
            other => return Err(IngestError::InvalidProfile(format!("column `{column}`: role `{other}`"))),
        };
        column_maps.push(ColumnMap {
            column,
            target,
            unit,
            layer,
            role,
            series_group: block.remove("series-group"),
        });
    }

    let profile = MappingProfile {
        name,
        delimiter,
        procedure,
        lon_column: head.remove("lon-column"),
        lat_column: head.remove("lat-column"),
        depth_column: head.remove("depth-column"),
        column_maps,
    };
    profile.check()?;
    Ok(profile)
}

impl MappingProfile {
    /// Unit convertibility and series pairing.
    fn check(&self) -> Result<(), IngestError> {
        let bad = |m: String| Err(IngestError::InvalidProfile(m));
        if self.column_maps.is_empty() {
            return bad("no [column] blocks".into());
        }
        for c in &self.column_maps {
            let Some(model) = units::model_unit(&c.target) else {
                return bad(format!("column `{}`: `{}` has no model unit", c.column, c.target));
            };
            if units::conversion_from(&c.unit).is_none_or(|conv| conv.to != model) {
                return bad(format!("column `{}`: unit `{}` does not convert to {model}", c.column, c.unit));
            }
            match (c.role, &c.series_group) {
                (Role::Value, Some(_)) => return bad(format!("column `{}`: value columns take no series-group", c.column)),
                (Role::SeriesX | Role::SeriesY, None) => return bad(format!("column `{}`: series columns need a series-group", c.column)),
                _ => {}
            }
            if c.role == Role::SeriesX && self.axis_of(c).is_none() {
                return bad(format!("column `{}`: series-x target must be depth, pressure or time", c.column));
            }
        }
        for group in self.series_groups() {
            let members: Vec<&ColumnMap> = self
                .column_maps
                .iter()
                .filter(|c| c.series_group.as_deref() == Some(group))
                .collect();
            let xs = members.iter().filter(|c| c.role == Role::SeriesX).count();
            let ys = members.iter().filter(|c| c.role == Role::SeriesY).count();
            if xs != 1 || ys != 1 {
                return bad(format!("series-group `{group}` needs one series-x and one series-y, has {xs} and {ys}"));
            }
            if members[0].layer != members[1].layer {
                return bad(format!("series-group `{group}` spans two layers"));
            }
        }
        Ok(())
    }

    pub fn axis_of(&self, c: &ColumnMap) -> Option<Axis> {
        [Axis::Depth, Axis::Pressure, Axis::Time]
            .into_iter()
            .find(|a| a.concept_id() == c.target)
    }

    /// Group tags in first-appearance order.
    pub fn series_groups(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for g in self.column_maps.iter().filter_map(|c| c.series_group.as_deref()) {
            if !out.contains(&g) {
                out.push(g);
            }
        }
        out
    }

    /// Every column the table must carry.
    pub fn required_columns(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        let extra = [&self.lon_column, &self.lat_column, &self.depth_column];
        for c in self.column_maps.iter().map(|c| c.column.as_str()).chain(extra.iter().filter_map(|c| c.as_deref())) {
            if !out.contains(&c) {
                out.push(c);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_cpt() {
        let reg = Registry::seed();
        let p = bundled_profile("cpt", &reg).unwrap();
        assert_eq!(p.delimiter, ',');
        assert_eq!(p.procedure, "cpt");
        assert_eq!(p.series_groups(), vec!["qc", "fs"]);
        assert_eq!(p.required_columns(), vec!["depth_m", "qc_MPa", "fs_MPa"]);
        assert!(matches!(bundled_profile("nope", &reg), Err(IngestError::UnknownProfile(_))));
    }

    fn profile(columns: &str) -> String {
        format!("[profile]\nname = t\ndelimiter = ;\nprocedure = cpt\n{columns}")
    }

    #[test]
    fn rejects() {
        let reg = Registry::seed();
        let unpaired = profile("[column]\ncolumn = d\ntarget = depth\nunit = m\nrole = series-x\nseries-group = g\n");
        assert!(matches!(parse_profile(&unpaired, &reg), Err(IngestError::InvalidProfile(m)) if m.contains("series-group `g`")));
        let unknown = profile("[column]\ncolumn = q\ntarget = bogus\nunit = m\n");
        assert_eq!(parse_profile(&unknown, &reg), Err(IngestError::UnknownConcept("bogus".into())));
        let mismatch = profile("[column]\ncolumn = q\ntarget = cone-resistance\nunit = m\n");
        assert!(matches!(parse_profile(&mismatch, &reg), Err(IngestError::InvalidProfile(_))));
        assert!(matches!(parse_profile("name = x\n", &reg), Err(IngestError::ProfileSyntax { line: 1, .. })));
        assert!(matches!(parse_profile("[profile]\nname\n", &reg), Err(IngestError::ProfileSyntax { line: 2, .. })));
    }

    #[test]
    fn tab_and_synonyms() {
        let reg = Registry::seed();
        let text = "[profile]\nname = t\ndelimiter = tab\nprocedure = static penetrometer test\n\n[column]\ncolumn = qc\ntarget = qc\nunit = kPa\n";
        let p = parse_profile(text, &reg).unwrap();
        assert_eq!(p.delimiter, '\t');
        assert_eq!(p.procedure, "cpt");
        assert_eq!(p.column_maps[0].target, "cone-resistance");
        assert_eq!(p.column_maps[0].unit, "kpa");
        assert_eq!(p.column_maps[0].role, Role::Value);
        assert_eq!(p.column_maps[0].layer, ProfileLayer::Raw);
    }
}
