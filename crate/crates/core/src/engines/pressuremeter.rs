//! Ménard pressuremeter interpretation.
//!
//! Pipeline: raw pressure steps (gauge pressure, V30, V60) are corrected for
//! the hydraulic head, the membrane resistance and the system compliance; the
//! creep curve V60 − V30 locates the pseudo-elastic phase [p1, p2] and the
//! creep pressure pf; the limit pressure pl is read where the injected volume
//! reaches Vs + 2·V1 (doubling of the cavity volume), extrapolated on
//! p = A + B/(Vs + V) when the test stops short of it.

use serde::{Deserialize, Serialize};

use super::fit::{interpolate_clamped, least_squares};
use super::{require_number, EngineError};
use crate::model::{Axis, Layer, NamedSeries, NamedValue};

/// 2(1 + ν) with ν = 0.33.
pub const MENARD_MODULUS_COEFFICIENT: f64 = 2.66;
/// Fraction of the interior creep spread tolerated inside the elastic phase.
pub const ELASTIC_CREEP_TOLERANCE: f64 = 0.15;
/// Absolute creep tolerance floor, cm³.
pub const ELASTIC_CREEP_FLOOR_CM3: f64 = 2.0;
pub const MIN_PRESSURE_STEPS: usize = 5;
/// Points beyond pf needed to extrapolate pl.
pub const MIN_EXTRAPOLATION_POINTS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PressuremeterConfig {
    pub modulus_coefficient: f64,
    pub creep_tolerance: f64,
    pub creep_floor: f64,
}

impl Default for PressuremeterConfig {
    fn default() -> Self {
        PressuremeterConfig {
            modulus_coefficient: MENARD_MODULUS_COEFFICIENT,
            creep_tolerance: ELASTIC_CREEP_TOLERANCE,
            creep_floor: ELASTIC_CREEP_FLOOR_CM3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PressureStep {
    /// MPa
    pub gauge_pressure: f64,
    /// cm³
    pub v30: f64,
    /// cm³
    pub v60: f64,
}

/// One point of the membrane calibration curve p_c(V).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CalibrationPoint {
    pub volume: f64,
    pub pressure: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PressuremeterInput {
    pub depth: f64,
    pub hydraulic_head_pressure: f64,
    pub probe_rest_volume: f64,
    #[serde(default)]
    pub membrane_calibration: Vec<CalibrationPoint>,
    #[serde(default)]
    pub system_compliance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rest_earth_pressure: Option<f64>,
    pub steps: Vec<PressureStep>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CurvePoint {
    pub pressure: f64,
    pub volume: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CreepPoint {
    pub pressure: f64,
    pub creep: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PressuremeterIntermediate {
    pub corrected_curve: Vec<CurvePoint>,
    pub creep_curve: Vec<CreepPoint>,
    pub p1: f64,
    pub p2: f64,
    /// Corrected volumes at p1 and p2.
    pub v1: f64,
    pub v2: f64,
    /// Step indices bounding the pseudo-elastic phase.
    pub elastic_start_step: usize,
    pub elastic_end_step: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LimitPressureMethod {
    Interpolated,
    Extrapolated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PressuremeterInterpreted {
    pub pressuremeter_modulus: f64,
    pub creep_pressure: f64,
    pub limit_pressure: f64,
    pub limit_pressure_method: LimitPressureMethod,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub net_creep_pressure: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub net_limit_pressure: Option<f64>,
    pub net_values_available: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PressuremeterResult {
    pub intermediate: PressuremeterIntermediate,
    pub interpreted: PressuremeterInterpreted,
}

pub fn interpret_pressuremeter(input: &PressuremeterInput) -> Result<PressuremeterResult, EngineError> {
    interpret_pressuremeter_with(input, &PressuremeterConfig::default())
}

pub fn interpret_pressuremeter_with(
    input: &PressuremeterInput,
    config: &PressuremeterConfig,
) -> Result<PressuremeterResult, EngineError> {
    check_input(input)?;
    let vs = input.probe_rest_volume;
    let calibration: Vec<(f64, f64)> = input.membrane_calibration.iter().map(|c| (c.volume, c.pressure)).collect();

    let corrected: Vec<CurvePoint> = input
        .steps
        .iter()
        .map(|s| {
            let pressure = s.gauge_pressure + input.hydraulic_head_pressure - interpolate_clamped(&calibration, s.v60);
            CurvePoint {
                pressure,
                volume: s.v60 - input.system_compliance * pressure,
            }
        })
        .collect();
    if let Some(i) = corrected.windows(2).position(|w| w[1].pressure < w[0].pressure) {
        return Err(EngineError::InvalidInput(format!(
            "corrected pressure decreases at step {}",
            i + 1
        )));
    }
    let creep: Vec<CreepPoint> = input
        .steps
        .iter()
        .zip(&corrected)
        .map(|(s, c)| CreepPoint {
            pressure: c.pressure,
            creep: s.v60 - s.v30,
        })
        .collect();

    let (start, end) = elastic_run(&creep, config)?;
    let (p1, v1) = (corrected[start].pressure, corrected[start].volume);
    let (p2, v2) = (corrected[end].pressure, corrected[end].volume);
    if p2 <= p1 {
        return Err(EngineError::NoElasticPhase);
    }
    if v2 <= v1 {
        return Err(EngineError::NonPositiveModulus { v1, v2 });
    }
    let modulus = config.modulus_coefficient * (vs + (v1 + v2) / 2.0) * (p2 - p1) / (v2 - v1);

    let last_p = corrected[corrected.len() - 1].pressure;
    let pf = creep_pressure(&creep)?.clamp(p2, last_p);
    let (pl, method) = limit_pressure(&corrected, vs, v1, pf)?;

    if !(p1 < p2 && p2 <= pf && pf <= pl) {
        return Err(EngineError::OrderingViolated(format!(
            "p1 = {p1}, p2 = {p2}, pf = {pf}, pl = {pl}"
        )));
    }
    if !(modulus.is_finite() && modulus > 0.0) {
        return Err(EngineError::NonPositiveModulus { v1, v2 });
    }

    let p0 = input.rest_earth_pressure;
    Ok(PressuremeterResult {
        intermediate: PressuremeterIntermediate {
            corrected_curve: corrected,
            creep_curve: creep,
            p1,
            p2,
            v1,
            v2,
            elastic_start_step: start,
            elastic_end_step: end,
        },
        interpreted: PressuremeterInterpreted {
            pressuremeter_modulus: modulus,
            creep_pressure: pf,
            limit_pressure: pl,
            limit_pressure_method: method,
            net_creep_pressure: p0.map(|p0| pf - p0),
            net_limit_pressure: p0.map(|p0| pl - p0),
            net_values_available: p0.is_some(),
        },
    })
}

fn check_input(input: &PressuremeterInput) -> Result<(), EngineError> {
    if input.steps.len() < MIN_PRESSURE_STEPS {
        return Err(EngineError::NotEnoughSteps(input.steps.len()));
    }
    let scalars = [
        input.depth,
        input.hydraulic_head_pressure,
        input.probe_rest_volume,
        input.system_compliance,
        input.rest_earth_pressure.unwrap_or(0.0),
    ];
    let steps = input.steps.iter().flat_map(|s| [s.gauge_pressure, s.v30, s.v60]);
    let calib = input.membrane_calibration.iter().flat_map(|c| [c.volume, c.pressure]);
    if !scalars.into_iter().chain(steps).chain(calib).all(f64::is_finite) {
        return Err(EngineError::InvalidInput("non-finite number".into()));
    }
    if input.probe_rest_volume <= 0.0 {
        return Err(EngineError::InvalidInput("probe rest volume must be > 0".into()));
    }
    for (i, w) in input.steps.windows(2).enumerate() {
        if w[1].gauge_pressure <= w[0].gauge_pressure {
            return Err(EngineError::InvalidInput(format!(
                "gauge pressure must strictly increase (step {})",
                i + 1
            )));
        }
    }
    if let Some(i) = input.steps.iter().position(|s| s.v60 < s.v30) {
        return Err(EngineError::InvalidInput(format!("V60 < V30 at step {i}")));
    }
    for w in input.membrane_calibration.windows(2) {
        if w[1].volume <= w[0].volume || w[1].pressure < w[0].pressure {
            return Err(EngineError::InvalidInput(
                "membrane calibration must have increasing volume and non-decreasing pressure".into(),
            ));
        }
    }
    Ok(())
}

/// Longest contiguous run of steps whose creep stays within tolerance of the
/// smallest interior creep; ties go to the run with the smallest mean creep,
/// then to the earliest.
fn elastic_run(creep: &[CreepPoint], config: &PressuremeterConfig) -> Result<(usize, usize), EngineError> {
    let interior = &creep[1..creep.len() - 1];
    let dmin = interior.iter().map(|c| c.creep).fold(f64::INFINITY, f64::min);
    let dmax = interior.iter().map(|c| c.creep).fold(f64::NEG_INFINITY, f64::max);
    let limit = dmin + (config.creep_tolerance * (dmax - dmin)).max(config.creep_floor);

    let mut best: Option<(usize, usize, f64)> = None;
    let mut i = 0;
    while i < creep.len() {
        if creep[i].creep > limit {
            i += 1;
            continue;
        }
        let start = i;
        while i + 1 < creep.len() && creep[i + 1].creep <= limit {
            i += 1;
        }
        let end = i;
        i += 1;
        if end == start {
            continue;
        }
        let mean = creep[start..=end].iter().map(|c| c.creep).sum::<f64>() / (end - start + 1) as f64;
        let better = match best {
            None => true,
            Some((s, e, m)) => {
                let (len, best_len) = (end - start, e - s);
                len > best_len || (len == best_len && mean < m)
            }
        };
        if better {
            best = Some((start, end, mean));
        }
    }
    best.map(|(s, e, _)| (s, e)).ok_or(EngineError::NoElasticPhase)
}

/// Two least-squares lines on the creep curve; the breakpoint (last step of
/// the left segment) is the interior step minimising the total squared
/// residual. Returns the abscissa of their intersection, or the breakpoint
/// pressure when the lines are parallel.
fn creep_pressure(creep: &[CreepPoint]) -> Result<f64, EngineError> {
    let pts: Vec<(f64, f64)> = creep.iter().map(|c| (c.pressure, c.creep)).collect();
    let mut best: Option<(f64, f64)> = None;
    for k in 1..pts.len() - 2 {
        let (Some((left, ssr_l)), Some((right, ssr_r))) = (least_squares(&pts[..=k]), least_squares(&pts[k + 1..]))
        else {
            continue;
        };
        let total = ssr_l + ssr_r;
        if best.is_none_or(|(b, _)| total < b) {
            let x = left.intersect(&right).unwrap_or(pts[k].0);
            best = Some((total, x));
        }
    }
    best.map(|(_, x)| x)
        .ok_or_else(|| EngineError::InvalidInput("creep curve has no usable two-segment fit".into()))
}

fn limit_pressure(
    corrected: &[CurvePoint],
    vs: f64,
    v1: f64,
    pf: f64,
) -> Result<(f64, LimitPressureMethod), EngineError> {
    let target = vs + 2.0 * v1;
    if let Some(i) = corrected.iter().position(|c| c.volume >= target) {
        if i == 0 {
            return Ok((corrected[0].pressure, LimitPressureMethod::Interpolated));
        }
        let (a, b) = (corrected[i - 1], corrected[i]);
        let p = a.pressure + (b.pressure - a.pressure) * (target - a.volume) / (b.volume - a.volume);
        return Ok((p, LimitPressureMethod::Interpolated));
    }

    let beyond: Vec<(f64, f64)> = corrected
        .iter()
        .filter(|c| c.pressure >= pf)
        .map(|c| (1.0 / (vs + c.volume), c.pressure))
        .collect();
    if beyond.len() < MIN_EXTRAPOLATION_POINTS {
        return Err(EngineError::ExtrapolationUnstable(beyond.len()));
    }
    match least_squares(&beyond) {
        // pressure must rise with volume, i.e. fall with 1/(Vs + V)
        Some((line, _)) if line.slope < 0.0 => {
            Ok((line.at(1.0 / (vs + target)), LimitPressureMethod::Extrapolated))
        }
        _ => Err(EngineError::ExtrapolationUnstable(beyond.len())),
    }
}

impl PressuremeterInput {
    /// Splits the input into context and raw layers.
    pub fn to_layers(&self) -> (Layer, Layer) {
        let mut context = Layer::default();
        context.values.push(NamedValue::number("depth", self.depth, "m"));
        context.values.push(NamedValue::number("hydraulic-head-pressure", self.hydraulic_head_pressure, "mpa"));
        context.values.push(NamedValue::number("probe-rest-volume", self.probe_rest_volume, "cm3"));
        context.values.push(NamedValue::number("system-compliance", self.system_compliance, "cm3-per-mpa"));
        if let Some(p0) = self.rest_earth_pressure {
            context.values.push(NamedValue::number("rest-earth-pressure", p0, "mpa"));
        }
        if !self.membrane_calibration.is_empty() {
            context.series.push(NamedSeries::new(
                "membrane-calibration-volume",
                Axis::Pressure,
                "mpa",
                "cm3",
                self.membrane_calibration.iter().map(|c| (c.pressure, c.volume)).collect(),
            ));
        }

        let mut raw = Layer::default();
        let v30 = self.steps.iter().map(|s| (s.gauge_pressure, s.v30)).collect();
        let v60 = self.steps.iter().map(|s| (s.gauge_pressure, s.v60)).collect();
        raw.series.push(NamedSeries::new("injected-volume-30s", Axis::Pressure, "mpa", "cm3", v30));
        raw.series.push(NamedSeries::new("injected-volume-60s", Axis::Pressure, "mpa", "cm3", v60));
        (context, raw)
    }

    pub fn from_layers(context: &Layer, raw: &Layer) -> Result<Self, EngineError> {
        let missing = |p: &str| EngineError::MissingInput(p.to_string());
        let v30 = raw.series("injected-volume-30s").ok_or_else(|| missing("injected-volume-30s"))?;
        let v60 = raw.series("injected-volume-60s").ok_or_else(|| missing("injected-volume-60s"))?;
        if v30.points.len() != v60.points.len() || v30.points.iter().zip(&v60.points).any(|(a, b)| a.0 != b.0) {
            return Err(EngineError::InvalidInput("V30 and V60 series are not on the same pressure steps".into()));
        }
        let steps = v30
            .points
            .iter()
            .zip(&v60.points)
            .map(|(a, b)| PressureStep {
                gauge_pressure: a.0,
                v30: a.1,
                v60: b.1,
            })
            .collect();
        let membrane_calibration = context
            .series("membrane-calibration-volume")
            .map(|s| {
                s.points
                    .iter()
                    .map(|&(pressure, volume)| CalibrationPoint { volume, pressure })
                    .collect()
            })
            .unwrap_or_default();
        Ok(PressuremeterInput {
            depth: require_number(context, "depth")?,
            hydraulic_head_pressure: require_number(context, "hydraulic-head-pressure")?,
            probe_rest_volume: require_number(context, "probe-rest-volume")?,
            membrane_calibration,
            system_compliance: context.number("system-compliance").unwrap_or(0.0),
            rest_earth_pressure: context.number("rest-earth-pressure"),
            steps,
        })
    }
}

impl PressuremeterResult {
    /// (intermediate, interpreted) layers.
    pub fn to_layers(&self) -> (Layer, Layer) {
        let im = &self.intermediate;
        let mut intermediate = Layer::default();
        intermediate.values.push(NamedValue::number("pseudo-elastic-start-pressure", im.p1, "mpa"));
        intermediate.values.push(NamedValue::number("pseudo-elastic-end-pressure", im.p2, "mpa"));
        intermediate.series.push(NamedSeries::new(
            "corrected-volume",
            Axis::Pressure,
            "mpa",
            "cm3",
            im.corrected_curve.iter().map(|c| (c.pressure, c.volume)).collect(),
        ));
        intermediate.series.push(NamedSeries::new(
            "creep-volume",
            Axis::Pressure,
            "mpa",
            "cm3",
            im.creep_curve.iter().map(|c| (c.pressure, c.creep)).collect(),
        ));

        let it = &self.interpreted;
        let mut interpreted = Layer::default();
        interpreted.values.push(NamedValue::number("pressuremeter-modulus", it.pressuremeter_modulus, "mpa"));
        interpreted.values.push(NamedValue::number("creep-pressure", it.creep_pressure, "mpa"));
        interpreted.values.push(NamedValue::number("limit-pressure", it.limit_pressure, "mpa"));
        if let Some(v) = it.net_creep_pressure {
            interpreted.values.push(NamedValue::number("net-creep-pressure", v, "mpa"));
        }
        if let Some(v) = it.net_limit_pressure {
            interpreted.values.push(NamedValue::number("net-limit-pressure", v, "mpa"));
        }
        (intermediate, interpreted)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step(p: f64, v60: f64, creep: f64) -> PressureStep {
        PressureStep {
            gauge_pressure: p,
            v30: v60 - creep,
            v60,
        }
    }

    /// Five elastic steps 0.5..1.5 MPa over 200..300 cm³ without creep, then
    /// three steps whose creep rises on Δ = 20·p − 32 (zero at 1.6 MPa) and
    /// whose volumes sit on p = 4 − 2000/(535 + V).
    fn ideal() -> PressuremeterInput {
        let mut steps: Vec<_> = (0..5).map(|i| step(0.5 + 0.25 * i as f64, 200.0 + 25.0 * i as f64, 0.0)).collect();
        for p in [1.75, 2.0, 2.25] {
            let v = 2000.0 / (4.0 - p) - 535.0;
            steps.push(step(p, v, 20.0 * p - 32.0));
        }
        PressuremeterInput {
            depth: 6.0,
            hydraulic_head_pressure: 0.0,
            probe_rest_volume: 535.0,
            membrane_calibration: vec![],
            system_compliance: 0.0,
            rest_earth_pressure: None,
            steps,
        }
    }

    #[test]
    fn ideal_test_modulus_matches_hand_value() {
        let r = interpret_pressuremeter(&ideal()).unwrap();
        assert_eq!(r.intermediate.p1, 0.5);
        assert_eq!(r.intermediate.p2, 1.5);
        // 2.66 * (535 + (200 + 300) / 2) * (1.5 - 0.5) / (300 - 200)
        assert!((r.interpreted.pressuremeter_modulus - 20.881).abs() < 1e-12);
        assert!((r.interpreted.creep_pressure - 1.6).abs() < 1e-12);
    }

    #[test]
    fn unreached_doubling_extrapolates_on_inverse_volume() {
        let r = interpret_pressuremeter(&ideal()).unwrap();
        assert_eq!(r.interpreted.limit_pressure_method, LimitPressureMethod::Extrapolated);
        // V_l = 535 + 2 * 200 = 935; p = 4 - 2000 / (535 + 935)
        let analytic = 4.0 - 2000.0 / 1470.0;
        assert!((r.interpreted.limit_pressure - analytic).abs() <= 1e-9 * analytic);
    }

    #[test]
    fn reached_doubling_interpolates() {
        let mut input = ideal();
        input.steps.push(step(2.5, 1035.0, 18.0));
        let r = interpret_pressuremeter(&input).unwrap();
        assert_eq!(r.interpreted.limit_pressure_method, LimitPressureMethod::Interpolated);
        let prev_v = 2000.0 / (4.0 - 2.25) - 535.0;
        let expected = 2.25 + 0.25 * (935.0 - prev_v) / (1035.0 - prev_v);
        assert!((r.interpreted.limit_pressure - expected).abs() < 1e-12);
    }

    #[test]
    fn net_values_follow_rest_pressure() {
        let mut input = ideal();
        assert!(!interpret_pressuremeter(&input).unwrap().interpreted.net_values_available);
        input.rest_earth_pressure = Some(0.1);
        let r = interpret_pressuremeter(&input).unwrap().interpreted;
        assert!(r.net_values_available);
        assert!((r.net_creep_pressure.unwrap() - (r.creep_pressure - 0.1)).abs() < 1e-15);
        assert!((r.net_limit_pressure.unwrap() - (r.limit_pressure - 0.1)).abs() < 1e-15);
    }

    #[test]
    fn four_steps_is_not_enough() {
        let mut input = ideal();
        input.steps.truncate(4);
        assert_eq!(interpret_pressuremeter(&input), Err(EngineError::NotEnoughSteps(4)));
    }

    #[test]
    fn creep_everywhere_has_no_elastic_phase() {
        let mut input = ideal();
        for (i, s) in input.steps.iter_mut().enumerate() {
            s.v30 = s.v60 - if i % 2 == 0 { 0.0 } else { 40.0 };
        }
        assert_eq!(interpret_pressuremeter(&input), Err(EngineError::NoElasticPhase));
    }

    #[test]
    fn flat_elastic_volume_has_no_modulus() {
        let mut input = ideal();
        for s in &mut input.steps[..5] {
            s.v60 = 200.0;
            s.v30 = 200.0;
        }
        assert!(matches!(
            interpret_pressuremeter(&input),
            Err(EngineError::NonPositiveModulus { .. })
        ));
    }

    #[test]
    fn too_few_points_beyond_pf() {
        let mut input = ideal();
        input.steps.truncate(7);
        // two steps beyond pf = 1.6
        assert_eq!(interpret_pressuremeter(&input), Err(EngineError::ExtrapolationUnstable(2)));
    }

    #[test]
    fn invalid_steps_are_rejected() {
        let mut input = ideal();
        input.steps[2].gauge_pressure = input.steps[1].gauge_pressure;
        assert!(matches!(interpret_pressuremeter(&input), Err(EngineError::InvalidInput(_))));
        let mut input = ideal();
        input.steps[2].v30 = input.steps[2].v60 + 1.0;
        assert!(matches!(interpret_pressuremeter(&input), Err(EngineError::InvalidInput(_))));
    }

    #[test]
    fn zero_corrections_keep_raw_curve() {
        let input = ideal();
        let r = interpret_pressuremeter(&input).unwrap();
        for (s, c) in input.steps.iter().zip(&r.intermediate.corrected_curve) {
            assert_eq!(s.gauge_pressure, c.pressure);
            assert_eq!(s.v60, c.volume);
        }
    }

    #[test]
    fn membrane_and_compliance_corrections() {
        let mut input = ideal();
        input.membrane_calibration = vec![
            CalibrationPoint { volume: 0.0, pressure: 0.0 },
            CalibrationPoint { volume: 1000.0, pressure: 0.1 },
        ];
        input.system_compliance = 2.0;
        input.hydraulic_head_pressure = 0.05;
        let r = interpret_pressuremeter(&input).unwrap();
        let s = input.steps[2];
        let p = s.gauge_pressure + 0.05 - 0.1 * s.v60 / 1000.0;
        let c = r.intermediate.corrected_curve[2];
        assert!((c.pressure - p).abs() < 1e-15);
        assert!((c.volume - (s.v60 - 2.0 * p)).abs() < 1e-12);
    }

    #[test]
    fn layers_round_trip_through_record_shape() {
        let mut input = ideal();
        input.rest_earth_pressure = Some(0.12);
        input.membrane_calibration = vec![
            CalibrationPoint { volume: 0.0, pressure: 0.0 },
            CalibrationPoint { volume: 700.0, pressure: 0.05 },
        ];
        let (ctx, raw) = input.to_layers();
        assert_eq!(PressuremeterInput::from_layers(&ctx, &raw).unwrap(), input);
    }

    #[test]
    fn results_are_bit_identical_across_calls() {
        let a = interpret_pressuremeter(&ideal()).unwrap();
        let b = interpret_pressuremeter(&ideal()).unwrap();
        assert_eq!(serde_json::to_vec(&a).unwrap(), serde_json::to_vec(&b).unwrap());
    }
}
