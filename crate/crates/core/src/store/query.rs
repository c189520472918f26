use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::model::SurveyPoint;
use crate::registry::Registry;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Bbox {
    pub min_lon: f64,
    pub min_lat: f64,
    pub max_lon: f64,
    pub max_lat: f64,
}

impl Bbox {
    pub fn new(min_lon: f64, min_lat: f64, max_lon: f64, max_lat: f64) -> Result<Bbox, String> {
        let b = Bbox {
            min_lon,
            min_lat,
            max_lon,
            max_lat,
        };
        if ![min_lon, min_lat, max_lon, max_lat].iter().all(|v| v.is_finite()) {
            return Err("bbox values must be finite numbers".into());
        }
        if min_lon > max_lon || min_lat > max_lat {
            return Err(format!("bbox min exceeds max: {min_lon},{min_lat},{max_lon},{max_lat}"));
        }
        Ok(b)
    }

    /// Inclusive on every edge.
    pub fn contains(&self, lon: f64, lat: f64) -> bool {
        self.min_lon <= lon && lon <= self.max_lon && self.min_lat <= lat && lat <= self.max_lat
    }
}

/// `minLon,minLat,maxLon,maxLat`
impl FromStr for Bbox {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').collect();
        let [a, b, c, d] = parts[..] else {
            return Err(format!("bbox `{s}` needs four comma-separated numbers"));
        };
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("bbox `{s}`: `{t}` is not a number"));
        Bbox::new(num(a)?, num(b)?, num(c)?, num(d)?)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Query {
    pub bbox: Option<Bbox>,
    pub procedure: Option<String>,
    pub geological_unit: Option<String>,
}

impl Query {
    pub fn matches(&self, p: &SurveyPoint, reg: &Registry) -> bool {
        if let Some(b) = &self.bbox {
            if !b.contains(p.location.lon, p.location.lat) {
                return false;
            }
        }
        if let Some(proc_id) = &self.procedure {
            if !p.tests.iter().any(|t| reg.is_same_or_narrower(&t.procedure, proc_id)) {
                return false;
            }
        }
        if let Some(unit) = &self.geological_unit {
            let on_point = p.geological_unit.as_deref() == Some(unit.as_str());
            let in_log = p.lithology.iter().any(|l| l.stratigraphy_code.as_deref() == Some(unit.as_str()));
            if !on_point && !in_log {
                return false;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inclusive_edges() {
        let b: Bbox = "2.0,48.0,3.0,49.0".parse().unwrap();
        assert!(b.contains(2.35, 48.85));
        assert!(b.contains(3.0, 48.5));
        assert!(b.contains(2.0, 48.0));
        assert!(!b.contains(3.0000001, 48.5));
    }

    #[test]
    fn bad_boxes() {
        assert!("3,48,2,49".parse::<Bbox>().is_err());
        assert!("2,48,3".parse::<Bbox>().is_err());
        assert!("2,48,x,49".parse::<Bbox>().is_err());
        assert!("2,48,inf,49".parse::<Bbox>().is_err());
        assert!(Bbox::new(1.0, 1.0, 1.0, 1.0).is_ok());
    }
}
