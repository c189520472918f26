//! HTTP surface of a geotk store: a SensorThings-flavoured read model under
//! `/v1.0`, plain REST writes, and a stateless pressuremeter preview.
//!
//! Read endpoints never mutate the store. Unknown query parameters are
//! rejected with 400.

pub mod views;

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Path, RawQuery, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use chrono::Utc;
use geotk_core::engines::{interpret_pressuremeter, EngineError, PressuremeterInput};
use geotk_core::ingest::{self, IngestError, MappingProfile};
use geotk_core::store::{Bbox, Query, Store, StoreError};
use geotk_core::{canonical_json, AttachmentKind, GeoPoint, Provenance, Purpose, Violation};
use serde_json::{json, Value as Json};

pub const DEFAULT_TOP: usize = 100;
pub const MAX_TOP: usize = 1000;
const MAX_BODY_BYTES: usize = 64 * 1024 * 1024;

#[derive(Clone)]
pub struct AppState {
    pub store: Arc<Store>,
    /// Table profiles by name, in addition to the bundled ones.
    pub profiles: Arc<BTreeMap<String, MappingProfile>>,
}

impl AppState {
    pub fn new(store: Arc<Store>) -> AppState {
        AppState {
            store,
            profiles: Arc::new(BTreeMap::new()),
        }
    }
}

#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: String,
    pub message: String,
    pub violations: Option<Vec<Violation>>,
}

impl ApiError {
    fn new(status: StatusCode, code: &str, message: impl Into<String>) -> ApiError {
        ApiError {
            status,
            code: code.to_string(),
            message: message.into(),
            violations: None,
        }
    }

    fn bad_request(code: &str, message: impl Into<String>) -> ApiError {
        ApiError::new(StatusCode::BAD_REQUEST, code, message)
    }

    fn not_found(what: impl Into<String>) -> ApiError {
        ApiError::new(StatusCode::NOT_FOUND, "NotFound", what)
    }

    fn validation(violations: Vec<Violation>) -> ApiError {
        let message = violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ");
        ApiError {
            violations: Some(violations),
            ..ApiError::bad_request("ValidationFailed", message)
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = json!({"code": self.code, "message": self.message});
        if let Some(v) = self.violations {
            body["violations"] = json!(v);
        }
        json_response(self.status, &body)
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        let status = match &e {
            StoreError::NotFound(_) => StatusCode::NOT_FOUND,
            StoreError::ValidationFailed(v) => return ApiError::validation(v.clone()),
            StoreError::BadBbox(_) | StoreError::UnknownConcept(_) => StatusCode::BAD_REQUEST,
            StoreError::AlreadyExists(_) | StoreError::LayerConflict(_) => StatusCode::CONFLICT,
            StoreError::ReadOnly | StoreError::Locked(_) => StatusCode::SERVICE_UNAVAILABLE,
            StoreError::StorageFailure(_) | StoreError::CorruptJournal { .. } => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError::new(status, e.code(), e.to_string())
    }
}

impl From<IngestError> for ApiError {
    fn from(e: IngestError) -> Self {
        ApiError::bad_request(e.code(), e.to_string())
    }
}

impl From<EngineError> for ApiError {
    fn from(e: EngineError) -> Self {
        ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.code(), e.to_string())
    }
}

type ApiResult = Result<Response, ApiError>;

/// Sorted keys, so equal values give equal bytes.
fn json_response(status: StatusCode, body: &Json) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], canonical_json(body)).into_response()
}

fn ok(body: Json) -> ApiResult {
    Ok(json_response(StatusCode::OK, &body))
}

/// Query parameters, each at most once, all from `allowed`.
fn params(raw: Option<String>, allowed: &[&str]) -> Result<BTreeMap<String, String>, ApiError> {
    let mut out = BTreeMap::new();
    for (k, v) in form_urlencoded::parse(raw.unwrap_or_default().as_bytes()) {
        if !allowed.contains(&k.as_ref()) {
            return Err(ApiError::bad_request("UnknownParameter", format!("unknown query parameter `{k}`")));
        }
        if out.insert(k.to_string(), v.to_string()).is_some() {
            return Err(ApiError::bad_request("RepeatedParameter", format!("query parameter `{k}` repeated")));
        }
    }
    Ok(out)
}

struct Paging {
    top: usize,
    skip: usize,
}

fn paging(p: &BTreeMap<String, String>) -> Result<Paging, ApiError> {
    let num = |key: &str, default: usize| -> Result<usize, ApiError> {
        match p.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse::<usize>()
                .map_err(|_| ApiError::bad_request("BadPaging", format!("{key} must be a non-negative integer, got `{v}`"))),
        }
    };
    let top = num("top", DEFAULT_TOP)?;
    if !(1..=MAX_TOP).contains(&top) {
        return Err(ApiError::bad_request("BadPaging", format!("top must be in [1, {MAX_TOP}], got {top}")));
    }
    Ok(Paging { top, skip: num("skip", 0)? })
}

/// One page of `items` with `@iot.count` and, when more remain, `@iot.nextLink`.
fn page(items: Vec<Json>, pg: &Paging, path: &str, mut keep: BTreeMap<String, String>) -> Json {
    let count = items.len();
    let value: Vec<Json> = items.into_iter().skip(pg.skip).take(pg.top).collect();
    let mut body = json!({"@iot.count": count, "value": value});
    if pg.skip.saturating_add(pg.top) < count {
        keep.insert("top".into(), pg.top.to_string());
        keep.insert("skip".into(), (pg.skip + pg.top).to_string());
        let qs = form_urlencoded::Serializer::new(String::new()).extend_pairs(keep.iter()).finish();
        body["@iot.nextLink"] = json!(format!("{path}?{qs}"));
    }
    body
}

/// Filters of `/Things`, shared with the command line.
pub fn things_query(bbox: Option<&str>, procedure: Option<&str>, geological_unit: Option<&str>) -> Result<Query, ApiError> {
    let bbox = bbox
        .map(|b| b.parse::<Bbox>().map_err(|m| ApiError::bad_request("BadBbox", m)))
        .transpose()?;
    Ok(Query {
        bbox,
        procedure: procedure.map(str::to_string),
        geological_unit: geological_unit.map(str::to_string),
    })
}

/// `Things(<id>)` → `<id>`
fn entity_key<'a>(segment: &'a str, set: &str) -> Option<&'a str> {
    segment.strip_prefix(set)?.strip_prefix('(')?.strip_suffix(')')
}

async fn service_root() -> ApiResult {
    let sets = ["Things", "Locations", "Datastreams", "ObservedProperties"];
    ok(json!({"value": sets.iter().map(|s| json!({"name": s, "url": format!("{}/{s}", views::ROOT)})).collect::<Vec<_>>()}))
}

async fn sensorthings(State(st): State<AppState>, Path(path): Path<String>, RawQuery(raw): RawQuery) -> ApiResult {
    let segments: Vec<&str> = path.trim_end_matches('/').split('/').collect();
    let store = &st.store;
    match segments[..] {
        ["Things"] => {
            let p = params(raw, &["bbox", "procedure", "geologicalUnit", "top", "skip"])?;
            let pg = paging(&p)?;
            let q = things_query(p.get("bbox").map(String::as_str), p.get("procedure").map(String::as_str), p.get("geologicalUnit").map(String::as_str))?;
            let items = store.query(&q)?.iter().map(|pt| views::thing(pt)).collect();
            let keep = p.into_iter().filter(|(k, _)| k != "top" && k != "skip").collect();
            ok(page(items, &pg, &format!("{}/Things", views::ROOT), keep))
        }
        ["ObservedProperties"] => {
            params(raw, &[])?;
            let items = views::observed_properties(store.registry());
            ok(json!({"@iot.count": items.len(), "value": items}))
        }
        [thing] if entity_key(thing, "Things").is_some() => {
            params(raw, &[])?;
            let p = store.get_point(entity_key(thing, "Things").unwrap())?;
            ok(views::thing(&p))
        }
        [thing, "Locations"] if entity_key(thing, "Things").is_some() => {
            params(raw, &[])?;
            let p = store.get_point(entity_key(thing, "Things").unwrap())?;
            ok(json!({"@iot.count": 1, "value": [views::location(&p)]}))
        }
        [thing, "Datastreams"] if entity_key(thing, "Things").is_some() => {
            params(raw, &[])?;
            let p = store.get_point(entity_key(thing, "Things").unwrap())?;
            let items: Vec<Json> = views::datastreams(&p).iter().map(|d| views::datastream(d, store.registry())).collect();
            ok(json!({"@iot.count": items.len(), "value": items}))
        }
        [ds] if entity_key(ds, "Datastreams").is_some() => {
            params(raw, &[])?;
            let id = entity_key(ds, "Datastreams").unwrap();
            with_datastream(store, id, |d| views::datastream(d, store.registry()))
        }
        [ds, "Observations"] if entity_key(ds, "Datastreams").is_some() => {
            let p = params(raw, &["top", "skip"])?;
            let pg = paging(&p)?;
            let id = entity_key(ds, "Datastreams").unwrap();
            let path = format!("{}/Datastreams({id})/Observations", views::ROOT);
            with_datastream(store, id, |d| page(views::observations(d), &pg, &path, BTreeMap::new()))
        }
        _ => Err(ApiError::not_found(format!("no resource at {}/{path}", views::ROOT))),
    }
}

fn with_datastream(store: &Store, id: &str, f: impl FnOnce(&views::DatastreamRef) -> Json) -> ApiResult {
    let missing = || ApiError::not_found(format!("Datastream {id}"));
    let point_id = views::point_of_datastream(id).ok_or_else(missing)?;
    let p = store.get_point(point_id).map_err(|_| missing())?;
    let all = views::datastreams(&p);
    let d = all.iter().find(|d| d.id == id).ok_or_else(missing)?;
    ok(f(d))
}

fn content_type(headers: &HeaderMap) -> String {
    headers
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .map(|v| v.split(';').next().unwrap_or("").trim().to_ascii_lowercase())
        .unwrap_or_default()
}

fn require_json(headers: &HeaderMap) -> Result<(), ApiError> {
    if content_type(headers) != "application/json" {
        return Err(ApiError::new(StatusCode::UNSUPPORTED_MEDIA_TYPE, "UnsupportedMediaType", "expected application/json"));
    }
    Ok(())
}

/// File uploads: raw bytes, as text or octet stream.
fn require_file(headers: &HeaderMap) -> Result<(), ApiError> {
    let ct = content_type(headers);
    if ct.starts_with("text/") || ct == "application/octet-stream" || ct.is_empty() || ct.starts_with("application/pdf") || ct.starts_with("image/") {
        Ok(())
    } else {
        Err(ApiError::new(StatusCode::UNSUPPORTED_MEDIA_TYPE, "UnsupportedMediaType", format!("cannot upload `{ct}` as a file body")))
    }
}

fn parse_json(body: &[u8]) -> Result<Json, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request("BadRequest", format!("invalid JSON: {e}")))
}

fn provenance(filename: Option<&String>, fallback: &str) -> Provenance {
    Provenance {
        submitter: "api".into(),
        source_file: filename.cloned().unwrap_or_else(|| fallback.to_string()),
        ingested_at: Utc::now(),
    }
}

async fn declare(State(st): State<AppState>, RawQuery(raw): RawQuery, headers: HeaderMap, body: Bytes) -> ApiResult {
    params(raw, &[])?;
    require_json(&headers)?;
    let v = parse_json(&body)?;
    let mut violations = Vec::new();
    let mut number = |key: &str| match v.get(key).and_then(Json::as_f64) {
        Some(x) => x,
        None => {
            violations.push(Violation::new(key, "required-number", format!("`{key}` must be a number")));
            f64::NAN
        }
    };
    let (lon, lat, depth) = (number("lon"), number("lat"), number("plannedDepth"));
    let purpose = match v.get("purpose").and_then(Json::as_str).map(str::parse::<Purpose>) {
        Some(Ok(p)) => Some(p),
        _ => {
            let allowed: Vec<&str> = Purpose::ALL.iter().map(|p| p.as_str()).collect();
            violations.push(Violation::new("purpose", "purpose-enum", format!("purpose must be one of {}", allowed.join(", "))));
            None
        }
    };
    let location = GeoPoint::new(lon, lat);
    violations.extend(location.violations().into_iter().filter(|x| !x.message.contains("NaN")));
    if depth.is_finite() && depth <= 0.0 {
        violations.push(Violation::new("plannedDepth", "planned-depth-positive", format!("planned depth {depth} must be > 0")));
    }
    if !violations.is_empty() {
        return Err(ApiError::validation(violations));
    }
    let id = st.store.declare(location, depth, purpose.unwrap(), "api")?;
    ok(json!({"id": id.to_string()}))
}

async fn ingest_ags(State(st): State<AppState>, RawQuery(raw): RawQuery, headers: HeaderMap, body: Bytes) -> ApiResult {
    let p = params(raw, &["filename"])?;
    require_file(&headers)?;
    let doc = ingest::parse_ags(&body)?;
    let prov = provenance(p.get("filename"), "upload.ags");
    let mapped = ingest::map_ags(&doc, st.store.registry(), &prov)?;
    let violations: Vec<Violation> = mapped
        .points
        .iter()
        .flat_map(|m| {
            m.violations.iter().map(move |v| Violation {
                field: format!("{}.{}", m.point.name, v.field),
                ..v.clone()
            })
        })
        .collect();
    if !violations.is_empty() {
        return Err(ApiError::validation(violations));
    }
    let mut ids = Vec::new();
    for m in mapped.points {
        ids.push(st.store.import_point(m.point, "api")?.to_string());
    }
    ok(json!({"pointIds": ids, "warnings": mapped.warnings}))
}

async fn ingest_table(State(st): State<AppState>, RawQuery(raw): RawQuery, headers: HeaderMap, body: Bytes) -> ApiResult {
    let p = params(raw, &["profile", "point", "filename"])?;
    require_file(&headers)?;
    let name = p
        .get("profile")
        .ok_or_else(|| ApiError::bad_request("MissingParameter", "query parameter `profile` is required"))?;
    let profile = match st.profiles.get(name) {
        Some(pr) => pr.clone(),
        None => ingest::bundled_profile(name, st.store.registry())?,
    };
    let prov = provenance(p.get("filename"), "upload.csv");
    let point = ingest::ingest_table(&body, &profile, st.store.registry(), prov)?;
    match p.get("point") {
        Some(target) => {
            st.store.put_tests(target, point.tests, "api")?;
            ok(json!({"pointId": target}))
        }
        None => ok(json!({"pointId": st.store.import_point(point, "api")?.to_string()})),
    }
}

async fn post_attachment(State(st): State<AppState>, RawQuery(raw): RawQuery, headers: HeaderMap, body: Bytes) -> ApiResult {
    let p = params(raw, &["filename", "kind", "point"])?;
    require_file(&headers)?;
    let filename = p.get("filename").cloned().unwrap_or_else(|| "attachment".into());
    let kind: AttachmentKind = match p.get("kind") {
        None => AttachmentKind::Other,
        Some(k) => k.parse().map_err(|_| ApiError::bad_request("BadParameter", format!("unknown attachment kind `{k}`")))?,
    };
    let att = ingest::register_attachment(&body, &filename, kind)?;
    let sha = st.store.put_attachment_as(&body, "api")?;
    if let Some(point) = p.get("point") {
        st.store.attach_file(point, att, "api")?;
    }
    ok(json!({"sha256": sha}))
}

async fn get_attachment(State(st): State<AppState>, Path(sha): Path<String>, RawQuery(raw): RawQuery) -> ApiResult {
    params(raw, &[])?;
    let bytes = st.store.get_attachment(&sha)?;
    Ok((StatusCode::OK, [(header::CONTENT_TYPE, "application/octet-stream")], bytes).into_response())
}

async fn interpret(RawQuery(raw): RawQuery, headers: HeaderMap, body: Bytes) -> ApiResult {
    params(raw, &[])?;
    require_json(&headers)?;
    let input: PressuremeterInput =
        serde_json::from_slice(&body).map_err(|e| ApiError::bad_request("BadRequest", format!("invalid PressuremeterInput: {e}")))?;
    let result = interpret_pressuremeter(&input)?;
    ok(serde_json::to_value(result).expect("result serializes"))
}

async fn fallback() -> ApiError {
    ApiError::not_found("no such endpoint")
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/v1.0", get(service_root))
        .route("/v1.0/{*path}", get(sensorthings))
        .route("/declare", post(declare))
        .route("/ingest/ags", post(ingest_ags))
        .route("/ingest/table", post(ingest_table))
        .route("/attachments", post(post_attachment))
        .route("/attachments/{sha}", get(get_attachment))
        .route("/interpret/pressuremeter", post(interpret))
        .fallback(fallback)
        .layer(DefaultBodyLimit::max(MAX_BODY_BYTES))
        .with_state(state)
}

pub async fn serve(state: AppState, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(state)).await
}
