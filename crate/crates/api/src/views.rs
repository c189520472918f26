//! SensorThings-shaped projections of stored points. Pure functions, shared
//! with the command line so both surfaces print the same objects.

use chrono::DateTime;
use geotk_core::registry::{ConceptKind, Registry};
use geotk_core::{Axis, LayerKind, SurveyPoint, TestRecord, Value};
use serde_json::{json, Map, Value as Json};

pub const ROOT: &str = "/v1.0";

pub fn thing(p: &SurveyPoint) -> Json {
    let id = &p.id;
    let mut properties = json!({
        "purpose": p.purpose.as_str(),
        "plannedDepth": p.planned_depth,
        "geologicalUnit": p.geological_unit,
        "declarationStatus": p.declaration_status,
        "procedures": procedures(p),
    });
    if let Some(d) = p.drilled_depth {
        properties["drilledDepth"] = json!(d);
    }
    json!({
        "@iot.id": id,
        "@iot.selfLink": format!("{ROOT}/Things({id})"),
        "name": p.name,
        "description": description(p),
        "properties": properties,
        "Locations@iot.navigationLink": format!("{ROOT}/Things({id})/Locations"),
        "Datastreams@iot.navigationLink": format!("{ROOT}/Things({id})/Datastreams"),
    })
}

fn procedures(p: &SurveyPoint) -> Vec<&str> {
    let mut out: Vec<&str> = p.tests.iter().map(|t| t.procedure.as_str()).collect();
    out.sort_unstable();
    out.dedup();
    out
}

fn description(p: &SurveyPoint) -> String {
    format!(
        "{} survey point, planned depth {} m, {} test(s)",
        p.purpose.as_str(),
        p.planned_depth,
        p.tests.len()
    )
}

pub fn location(p: &SurveyPoint) -> Json {
    let mut coordinates = vec![json!(p.location.lon), json!(p.location.lat)];
    if let Some(z) = p.location.ground_elevation {
        coordinates.push(json!(z));
    }
    json!({
        "@iot.id": p.id,
        "name": p.name,
        "encodingType": "application/geo+json",
        "location": {"type": "Point", "coordinates": coordinates},
    })
}

/// Where a datastream's observations come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Series(usize),
    /// Interpreted numeric values sharing one property.
    ValueSet(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatastreamRef<'a> {
    pub id: String,
    pub test: &'a TestRecord,
    pub layer: LayerKind,
    pub source: Source,
    pub property: String,
    pub unit: String,
}

/// Interpreted properties with at least one numeric value, first-seen order.
fn value_sets(t: &TestRecord) -> Vec<&str> {
    let mut out: Vec<&str> = Vec::new();
    for v in &t.interpreted.values {
        if v.value.as_number().is_some() && !out.contains(&v.property.as_str()) {
            out.push(&v.property);
        }
    }
    out
}

/// Every series of every layer, then every interpreted value set.
/// Ids are `<testId>.<layer>.<k>` with k counting within that layer.
pub fn datastreams(p: &SurveyPoint) -> Vec<DatastreamRef<'_>> {
    let mut out = Vec::new();
    for t in &p.tests {
        for layer in LayerKind::ALL {
            let l = t.layer(layer);
            let mut k = 0;
            for (i, s) in l.series.iter().enumerate() {
                out.push(DatastreamRef {
                    id: format!("{}.{}.{k}", t.id, layer.as_str()),
                    test: t,
                    layer,
                    source: Source::Series(i),
                    property: s.property.clone(),
                    unit: s.y_unit.clone(),
                });
                k += 1;
            }
            if layer == LayerKind::Interpreted {
                for (i, prop) in value_sets(t).into_iter().enumerate() {
                    let unit = t.interpreted.value(prop).map(|v| v.unit.clone()).unwrap_or_default();
                    out.push(DatastreamRef {
                        id: format!("{}.{}.{k}", t.id, layer.as_str()),
                        test: t,
                        layer,
                        source: Source::ValueSet(i),
                        property: prop.to_string(),
                        unit,
                    });
                    k += 1;
                }
            }
        }
    }
    out
}

/// Point id owning a datastream id.
pub fn point_of_datastream(ds_id: &str) -> Option<&str> {
    let mut parts = ds_id.rsplitn(3, '.');
    let (_k, _layer, test) = (parts.next()?, parts.next()?, parts.next()?);
    test.rsplit_once('.').map(|(p, _)| p)
}

pub fn datastream(ds: &DatastreamRef, reg: &Registry) -> Json {
    let name = reg
        .get(&ds.property)
        .map(|c| c.pref_label.clone())
        .unwrap_or_else(|| ds.property.clone());
    let axis = match ds.source {
        Source::Series(i) => ds.test.layer(ds.layer).series[i].axis.concept_id(),
        Source::ValueSet(_) => "depth",
    };
    json!({
        "@iot.id": ds.id,
        "@iot.selfLink": format!("{ROOT}/Datastreams({})", ds.id),
        "name": format!("{name} ({}, {})", ds.test.procedure, ds.layer.as_str()),
        "observedPropertyId": ds.property,
        "unitId": ds.unit,
        "procedureId": ds.test.procedure,
        "layer": ds.layer.as_str(),
        "testId": ds.test.id,
        "xAxis": axis,
        "Observations@iot.navigationLink": format!("{ROOT}/Datastreams({})/Observations", ds.id),
    })
}

fn place_x(obs: &mut Map<String, Json>, axis: Axis, x: f64) {
    obs.insert("parameters".into(), json!({ axis.concept_id(): x }));
    match axis {
        Axis::Depth => {
            obs.insert("phenomenonDepth".into(), json!(x));
        }
        // seconds since the Unix epoch
        Axis::Time => {
            let t = DateTime::from_timestamp_millis((x * 1000.0).round() as i64)
                .map(|t| t.to_rfc3339_opts(chrono::SecondsFormat::Millis, true));
            obs.insert("phenomenonTime".into(), json!(t));
        }
        Axis::Pressure => {}
    }
}

/// All observations of a datastream, in x order.
pub fn observations(ds: &DatastreamRef) -> Vec<Json> {
    let mut out = Vec::new();
    match ds.source {
        Source::Series(i) => {
            let s = &ds.test.layer(ds.layer).series[i];
            for (n, &(x, y)) in s.points.iter().enumerate() {
                let mut obs = Map::new();
                obs.insert("@iot.id".into(), json!(format!("{}.{n}", ds.id)));
                obs.insert("result".into(), json!(y));
                place_x(&mut obs, s.axis, x);
                out.push(Json::Object(obs));
            }
        }
        Source::ValueSet(_) => {
            let values = ds.test.interpreted.values.iter().filter(|v| v.property == ds.property);
            for (n, v) in values.enumerate() {
                let Value::Number(y) = v.value else { continue };
                let mut obs = Map::new();
                obs.insert("@iot.id".into(), json!(format!("{}.{n}", ds.id)));
                obs.insert("result".into(), json!(y));
                obs.insert("phenomenonDepth".into(), json!(ds.test.top_depth));
                let mut params = Map::new();
                params.insert("depth".into(), json!(ds.test.top_depth));
                if let Some(g) = &v.group {
                    params.insert("group".into(), json!(g));
                }
                obs.insert("parameters".into(), Json::Object(params));
                out.push(Json::Object(obs));
            }
        }
    }
    out
}

pub fn observed_properties(reg: &Registry) -> Vec<Json> {
    reg.of_kind(ConceptKind::ObservedProperty)
        .filter(|c| !c.deprecated)
        .map(|c| {
            json!({
                "@iot.id": c.id,
                "name": c.pref_label,
                "definition": c.definition,
                "synonyms": c.synonyms,
                "broader": c.broader,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn datastream_owner() {
        assert_eq!(point_of_datastream("GT-00000001-96.T001.raw.0"), Some("GT-00000001-96"));
        assert_eq!(point_of_datastream("nonsense"), None);
    }
}
