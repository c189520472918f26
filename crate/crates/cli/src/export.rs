//! Export renderers. Output depends only on the points given, so identical
//! store states give identical files.
//!
//! CSV layouts, one file per procedure:
//!
//! | file                       | columns                                                   |
//! |----------------------------|-----------------------------------------------------------|
//! | `cpt.csv`, `cptu.csv`      | point_id, depth_m, qc_MPa, fs_MPa, Rf_pct                 |
//! | `spt.csv`                  | point_id, test_id, top_m, bottom_m, n1, n2, n3, N, refusal |
//! | `menard-pressuremeter.csv` | point_id, test_id, depth_m, EM_MPa, pf_MPa, pl_MPa, pf_net_MPa, pl_net_MPa |
//! | `drilling-log.csv`         | point_id, test_id, channel, depth_m, value, unit          |

use std::collections::BTreeMap;
use std::fmt::Write as _;

use geotk_core::{canonical_serialize, Layer, SurveyPoint, TestRecord, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    CanonicalJson,
    Csv,
    LogText,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "canonical-json" => Ok(Format::CanonicalJson),
            "csv" => Ok(Format::Csv),
            "log-text" => Ok(Format::LogText),
            other => Err(format!("UnsupportedFormat: `{other}` (expected canonical-json, csv or log-text)")),
        }
    }
}

/// (file name, contents)
pub fn render(points: &[&SurveyPoint], format: Format) -> Vec<(String, String)> {
    match format {
        Format::CanonicalJson => points
            .iter()
            .map(|p| {
                let mut doc = String::from_utf8(canonical_serialize(p)).expect("json is utf-8");
                doc.push('\n');
                (format!("{}.json", p.id), doc)
            })
            .collect(),
        Format::LogText => points.iter().map(|p| (format!("{}.txt", p.id), log_text(p))).collect(),
        Format::Csv => csv_files(points).into_iter().collect(),
    }
}

fn num(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv_files(points: &[&SurveyPoint]) -> BTreeMap<String, String> {
    let mut files: BTreeMap<String, String> = BTreeMap::new();
    for p in points {
        for t in &p.tests {
            let (header, rows) = match t.procedure.as_str() {
                "cpt" | "cptu" => ("point_id,depth_m,qc_MPa,fs_MPa,Rf_pct", cpt_rows(p, t)),
                "spt" => ("point_id,test_id,top_m,bottom_m,n1,n2,n3,N,refusal", spt_rows(p, t)),
                "menard-pressuremeter" => (
                    "point_id,test_id,depth_m,EM_MPa,pf_MPa,pl_MPa,pf_net_MPa,pl_net_MPa",
                    pmt_rows(p, t),
                ),
                "drilling-log" => ("point_id,test_id,channel,depth_m,value,unit", drilling_rows(p, t)),
                _ => continue,
            };
            let file = files
                .entry(format!("{}.csv", t.procedure))
                .or_insert_with(|| format!("{header}\n"));
            for r in rows {
                file.push_str(&r);
                file.push('\n');
            }
        }
    }
    files
}

fn at_depth(layer: &Layer, property: &str, depth: f64) -> Option<f64> {
    layer.series(property)?.points.iter().find(|pt| pt.0 == depth).map(|pt| pt.1)
}

fn cpt_rows(p: &SurveyPoint, t: &TestRecord) -> Vec<String> {
    let Some(qc) = t.raw.series("cone-resistance") else {
        return vec![];
    };
    qc.points
        .iter()
        .map(|&(d, q)| {
            format!(
                "{},{},{},{},{}",
                p.id,
                d,
                q,
                num(at_depth(&t.raw, "sleeve-friction", d)),
                num(at_depth(&t.intermediate, "friction-ratio", d))
            )
        })
        .collect()
}

fn spt_rows(p: &SurveyPoint, t: &TestRecord) -> Vec<String> {
    let n = |id: &str| num(t.raw.number(id));
    let refusal = match t.interpreted.value("spt-refusal").map(|v| &v.value) {
        Some(Value::Text(s)) => s.clone(),
        _ => String::new(),
    };
    vec![format!(
        "{},{},{},{},{},{},{},{},{}",
        p.id,
        t.id,
        t.top_depth,
        t.bottom_depth,
        n("spt-increment-1"),
        n("spt-increment-2"),
        n("spt-increment-3"),
        num(t.interpreted.number("spt-blow-count")),
        refusal
    )]
}

fn pmt_rows(p: &SurveyPoint, t: &TestRecord) -> Vec<String> {
    let v = |id: &str| num(t.interpreted.number(id));
    vec![format!(
        "{},{},{},{},{},{},{},{}",
        p.id,
        t.id,
        num(t.context.number("depth").or(Some(t.top_depth))),
        v("pressuremeter-modulus"),
        v("creep-pressure"),
        v("limit-pressure"),
        v("net-creep-pressure"),
        v("net-limit-pressure")
    )]
}

fn drilling_rows(p: &SurveyPoint, t: &TestRecord) -> Vec<String> {
    let source = if t.intermediate.series.is_empty() { &t.raw } else { &t.intermediate };
    source
        .series
        .iter()
        .flat_map(|s| s.points.iter().map(move |&(d, v)| format!("{},{},{},{d},{v},{}", p.id, t.id, s.property, s.y_unit)))
        .collect()
}

/// Depth-ordered lithology then one summary line per test.
pub fn log_text(p: &SurveyPoint) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "Survey point {} ({})", p.id, p.name);
    let _ = writeln!(s, "Location: lon {}, lat {}", p.location.lon, p.location.lat);
    let _ = writeln!(
        s,
        "Planned depth: {} m; drilled depth: {}; purpose: {}; status: {}",
        p.planned_depth,
        p.drilled_depth.map_or("-".to_string(), |d| format!("{d} m")),
        p.purpose.as_str(),
        match p.declaration_status {
            geotk_core::DeclarationStatus::Declared => "declared",
            geotk_core::DeclarationStatus::Exempt => "exempt",
        }
    );
    if let Some(u) = &p.geological_unit {
        let _ = writeln!(s, "Geological unit: {u}");
    }
    let mut lith: Vec<_> = p.lithology.iter().collect();
    lith.sort_by(|a, b| a.top_depth.total_cmp(&b.top_depth));
    let _ = writeln!(s, "Lithology:");
    if lith.is_empty() {
        let _ = writeln!(s, "  (none)");
    }
    for l in lith {
        let _ = writeln!(
            s,
            "  {:>7.2} - {:>7.2} m  {:<6} {}{}",
            l.top_depth,
            l.bottom_depth,
            l.lithology_code,
            l.description,
            l.stratigraphy_code.as_deref().map(|c| format!(" [{c}]")).unwrap_or_default()
        );
    }
    let mut tests: Vec<_> = p.tests.iter().collect();
    tests.sort_by(|a, b| a.top_depth.total_cmp(&b.top_depth).then_with(|| a.id.cmp(&b.id)));
    let _ = writeln!(s, "Tests:");
    if tests.is_empty() {
        let _ = writeln!(s, "  (none)");
    }
    for t in tests {
        let _ = writeln!(s, "  {:>7.2} - {:>7.2} m  {} {}: {}", t.top_depth, t.bottom_depth, t.id, t.procedure, summary(t));
    }
    s
}

fn summary(t: &TestRecord) -> String {
    let i = &t.interpreted;
    match t.procedure.as_str() {
        "spt" => match (i.number("spt-blow-count"), i.value("spt-refusal")) {
            (Some(n), _) => format!("N = {n}"),
            (None, Some(_)) => "refusal".into(),
            _ => "not interpreted".into(),
        },
        "menard-pressuremeter" => match (i.number("pressuremeter-modulus"), i.number("creep-pressure"), i.number("limit-pressure")) {
            (Some(e), Some(pf), Some(pl)) => format!("EM = {e:.3} MPa, pf = {pf:.3} MPa, pl = {pl:.3} MPa"),
            _ => "not interpreted".into(),
        },
        "cpt" | "cptu" => {
            let n = t.raw.series("cone-resistance").map_or(0, |s| s.points.len());
            match t.intermediate.series("friction-ratio") {
                Some(rf) if !rf.points.is_empty() => {
                    let mean = rf.points.iter().map(|p| p.1).sum::<f64>() / rf.points.len() as f64;
                    format!("{n} samples, mean Rf {mean:.2} %")
                }
                _ => format!("{n} samples"),
            }
        }
        _ => format!("{} raw series, {} interpreted values", t.raw.series.len(), i.values.len()),
    }
}
