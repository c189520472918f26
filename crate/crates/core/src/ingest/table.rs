//! Delimiter-separated tables read through a [`MappingProfile`].

use super::profile::{ColumnMap, MappingProfile, ProfileLayer, Role};
use super::{parse_number, IngestError};
use crate::engines::derive_layers;
use crate::model::{DeclarationStatus, GeoPoint, Layer, NamedSeries, NamedValue, Provenance, Purpose, SurveyPoint, TestRecord};
use crate::registry::Registry;
use crate::units;

struct Table {
    headers: Vec<String>,
    /// (line number, cells)
    rows: Vec<(usize, Vec<String>)>,
}

impl Table {
    fn read(bytes: &[u8], delimiter: char) -> Result<Table, IngestError> {
        if !delimiter.is_ascii() {
            return Err(IngestError::InvalidProfile(format!("delimiter `{delimiter}` is not ASCII")));
        }
        if bytes.iter().all(u8::is_ascii_whitespace) {
            return Err(IngestError::EmptyInput);
        }
        let mut reader = csv::ReaderBuilder::new()
            .delimiter(delimiter as u8)
            .has_headers(true)
            .from_reader(bytes);
        let csv_err = |e: csv::Error| match e.kind() {
            csv::ErrorKind::Utf8 { .. } => IngestError::NotUtf8,
            _ => IngestError::Syntax {
                line: e.position().map(|p| p.line() as usize).unwrap_or(0),
                reason: e.to_string(),
            },
        };
        let headers = reader.headers().map_err(csv_err)?.iter().map(|h| h.trim().to_string()).collect();
        let mut rows = Vec::new();
        for rec in reader.records() {
            let rec = rec.map_err(csv_err)?;
            let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
            if rec.iter().all(|c| c.trim().is_empty()) {
                continue;
            }
            rows.push((line, rec.iter().map(str::to_string).collect()));
        }
        Ok(Table { headers, rows })
    }

    fn index(&self, column: &str) -> Result<usize, IngestError> {
        self.headers
            .iter()
            .position(|h| h == column)
            .ok_or_else(|| IngestError::MissingColumn(column.to_string()))
    }
}

/// Cell at (row, column) in model units; `None` when blank.
fn cell(table: &Table, row: usize, col: usize, column: &str, unit: &str) -> Result<Option<f64>, IngestError> {
    let (line, cells) = &table.rows[row];
    let text = cells[col].trim();
    if text.is_empty() {
        return Ok(None);
    }
    let v = parse_number(text).ok_or_else(|| IngestError::NumberFormat {
        line: *line,
        column: column.to_string(),
    })?;
    let conv = units::conversion_from(unit).ok_or_else(|| IngestError::UnitUnknown(unit.to_string()))?;
    Ok(Some(conv.apply(v)))
}

/// One survey point holding one test record for the whole table. The point id
/// is left empty for the store to issue.
pub fn ingest_table(
    bytes: &[u8],
    profile: &MappingProfile,
    reg: &Registry,
    provenance: Provenance,
) -> Result<SurveyPoint, IngestError> {
    let table = Table::read(bytes, profile.delimiter)?;
    for c in profile.required_columns() {
        table.index(c)?;
    }
    for c in &profile.column_maps {
        if reg.get(&c.target).is_none() {
            return Err(IngestError::UnknownConcept(c.target.clone()));
        }
    }

    let mut context = Layer::default();
    let mut raw = Layer::default();
    let layer_of = |c: &ColumnMap| c.layer;

    for c in profile.column_maps.iter().filter(|c| c.role == Role::Value) {
        let col = table.index(&c.column)?;
        let mut value = None;
        for row in 0..table.rows.len() {
            if let Some(v) = cell(&table, row, col, &c.column, &c.unit)? {
                value = Some(v);
                break;
            }
        }
        if let Some(v) = value {
            let unit = units::model_unit(&c.target).expect("checked by profile");
            let nv = NamedValue::number(&c.target, v, unit);
            match layer_of(c) {
                ProfileLayer::Contextual => context.values.push(nv),
                ProfileLayer::Raw => raw.values.push(nv),
            }
        }
    }

    for group in profile.series_groups() {
        let member = |role| {
            profile
                .column_maps
                .iter()
                .find(|c| c.series_group.as_deref() == Some(group) && c.role == role)
                .expect("pairing checked by profile")
        };
        let (x, y) = (member(Role::SeriesX), member(Role::SeriesY));
        let (xi, yi) = (table.index(&x.column)?, table.index(&y.column)?);
        let mut points = Vec::new();
        for row in 0..table.rows.len() {
            let xv = cell(&table, row, xi, &x.column, &x.unit)?;
            let yv = cell(&table, row, yi, &y.column, &y.unit)?;
            if let (Some(xv), Some(yv)) = (xv, yv) {
                points.push((xv, yv));
            }
        }
        let axis = profile.axis_of(x).expect("checked by profile");
        let series = NamedSeries::new(
            &y.target,
            axis,
            units::model_unit(&x.target).expect("checked by profile"),
            units::model_unit(&y.target).expect("checked by profile"),
            points,
        );
        match layer_of(y) {
            ProfileLayer::Contextual => context.series.push(series),
            ProfileLayer::Raw => raw.series.push(series),
        }
    }

    let (mut top, mut bottom) = (0.0, 0.0);
    if let Some(dc) = &profile.depth_column {
        let col = table.index(dc)?;
        let unit = profile
            .column_maps
            .iter()
            .find(|c| &c.column == dc && c.target == "depth")
            .map_or("m", |c| c.unit.as_str());
        let mut depths = Vec::new();
        for row in 0..table.rows.len() {
            depths.extend(cell(&table, row, col, dc, unit)?);
        }
        if !depths.is_empty() {
            top = depths.iter().copied().fold(f64::INFINITY, f64::min);
            bottom = depths.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        }
    }

    let mut location = GeoPoint::new(0.0, 0.0);
    if let (Some(lon), Some(lat)) = (&profile.lon_column, &profile.lat_column) {
        let (lo, la) = (table.index(lon)?, table.index(lat)?);
        if !table.rows.is_empty() {
            location.lon = cell(&table, 0, lo, lon, "degree")?.ok_or_else(|| IngestError::MissingColumn(lon.clone()))?;
            location.lat = cell(&table, 0, la, lat, "degree")?.ok_or_else(|| IngestError::MissingColumn(lat.clone()))?;
        }
    }

    let mut record = TestRecord {
        id: String::new(),
        survey_point_id: String::new(),
        procedure: profile.procedure.clone(),
        top_depth: top,
        bottom_depth: bottom,
        context,
        raw,
        intermediate: Layer::default(),
        interpreted: Layer::default(),
        provenance: provenance.clone(),
    };
    if let Ok((intermediate, interpreted)) = derive_layers(&record) {
        record.intermediate = intermediate;
        record.interpreted = interpreted;
    }

    Ok(SurveyPoint {
        id: String::new(),
        name: provenance.source_file.clone(),
        location,
        planned_depth: bottom,
        drilled_depth: Some(bottom),
        purpose: Purpose::Geotechnical,
        declaration_status: DeclarationStatus::for_depth(bottom),
        lithology: vec![],
        geological_unit: None,
        attachments: vec![],
        tests: vec![record],
    })
}
