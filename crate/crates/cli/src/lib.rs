//! `geotk` command line: declare, ingest, interpret, query, export, serve.
//!
//! Exit codes: 0 success, 1 validation or runtime failure (violations on
//! stderr, one per line), 2 usage error. `--json` switches stdout to
//! machine-readable output.

pub mod export;

use std::ffi::{OsStr, OsString};
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use chrono::Utc;
use clap::{Args, Parser, Subcommand};
use geotk_api::{things_query, views, AppState};
use geotk_core::engines::{derive_layers, EngineError, PressuremeterInput};
use geotk_core::ingest::{self, IngestError, MappingProfile};
use geotk_core::store::{Access, PlatformId, Store, StoreError};
use geotk_core::{
    parse_canonical, AttachmentKind, ConceptKind, GeoPoint, Layer, Provenance, Purpose, Registry, SurveyPoint,
    TestRecord, Violation,
};
use serde_json::{json, Value as Json};

use export::Format;

pub const DATA_DIR_ENV: &str = "GEOTK_DATA_DIR";
const ACTOR: &str = "cli";
const INTERPRET_ACTOR: &str = "cli:interpret";

#[derive(Parser, Debug)]
#[command(name = "geotk", version, about = "Geotechnical survey data store")]
struct Cli {
    /// Store directory [env: GEOTK_DATA_DIR]
    #[arg(long, global = true, value_name = "DIR")]
    data_dir: Option<PathBuf>,
    /// Registry file replacing the built-in seed vocabulary (same text format)
    #[arg(long, global = true, value_name = "FILE")]
    registry_file: Option<PathBuf>,
    /// Machine-readable output on stdout
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Declare a planned survey point and print its id
    Declare {
        #[arg(long, allow_negative_numbers = true)]
        lon: f64,
        #[arg(long, allow_negative_numbers = true)]
        lat: f64,
        /// Planned depth, m
        #[arg(long, allow_negative_numbers = true)]
        depth: f64,
        #[arg(long)]
        purpose: String,
    },
    /// Load survey data: ags, table, json, pressuremeter, attachment
    #[command(subcommand)]
    Ingest(Ingest),
    /// Run the engines on stored tests and attach the derived layers
    Interpret {
        #[arg(required_unless_present = "point", conflicts_with = "point")]
        test_id: Option<String>,
        /// Every test of this point
        #[arg(long)]
        point: Option<String>,
    },
    /// List survey points matching the filters
    Query {
        #[command(flatten)]
        filter: Filter,
    },
    /// Write points as canonical-json, csv or log-text
    Export {
        #[arg(long)]
        format: String,
        /// Points to export (repeatable); default is every point matching the filters
        #[arg(long)]
        point: Vec<String>,
        #[command(flatten)]
        filter: Filter,
        /// Output directory; stdout when absent
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
    /// Serve the HTTP API
    Serve {
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long, default_value_t = 8080)]
        port: u16,
    },
    /// Inspect the controlled vocabulary
    #[command(subcommand)]
    Registry(RegistryCmd),
}

#[derive(Subcommand, Debug)]
enum Ingest {
    /// Import every LOCA of an AGS file as a new point
    Ags { file: PathBuf },
    /// Import a delimited table through a mapping profile
    Table {
        file: PathBuf,
        /// Bundled profile name or path to a profile file
        #[arg(long)]
        profile: String,
        /// Append the tests to this point instead of creating one
        #[arg(long)]
        point: Option<String>,
        /// With --point: drop tests whose procedure, depth range and raw layer are already stored
        #[arg(long)]
        skip_duplicate: bool,
    },
    /// Re-ingest canonical-json exports (files or directories)
    Json {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Add a pressuremeter test (PressuremeterInput JSON) to a point
    Pressuremeter {
        file: PathBuf,
        #[arg(long)]
        point: String,
    },
    /// Store a file in the blob store, optionally attaching it to a point
    Attachment {
        file: PathBuf,
        #[arg(long, default_value = "other")]
        kind: String,
        #[arg(long)]
        point: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
enum RegistryCmd {
    /// List registry concepts
    List {
        #[arg(long)]
        kind: Option<String>,
    },
}

#[derive(Args, Debug, Default)]
struct Filter {
    /// min_lon,min_lat,max_lon,max_lat (inclusive)
    #[arg(long, allow_hyphen_values = true)]
    bbox: Option<String>,
    /// Procedure id or synonym; narrower procedures match too
    #[arg(long)]
    procedure: Option<String>,
    #[arg(long)]
    geological_unit: Option<String>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Validation(Vec<Violation>),
    Runtime { code: String, message: String },
}

impl Failure {
    fn runtime(code: &str, message: impl Into<String>) -> Failure {
        Failure::Runtime {
            code: code.to_string(),
            message: message.into(),
        }
    }

    fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            _ => 1,
        }
    }
}

impl From<StoreError> for Failure {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::ValidationFailed(v) => Failure::Validation(v),
            StoreError::BadBbox(m) => Failure::Usage(format!("BadBbox: {m}")),
            other => Failure::runtime(other.code(), other.to_string()),
        }
    }
}

impl From<IngestError> for Failure {
    fn from(e: IngestError) -> Self {
        match e {
            IngestError::UnknownProfile(_) | IngestError::InvalidProfile(_) | IngestError::ProfileSyntax { .. } => {
                Failure::Usage(format!("{}: {e}", e.code()))
            }
            other => Failure::runtime(other.code(), other.to_string()),
        }
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        Failure::runtime(e.code(), e.to_string())
    }
}

type Outcome = Result<(), Failure>;

struct Ctx<'a> {
    data_dir: Option<PathBuf>,
    registry: Arc<Registry>,
    json: bool,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn open(&self, access: Access) -> Result<Store, Failure> {
        let dir = self.data_dir.clone().ok_or_else(|| {
            Failure::Usage(format!("no data directory: pass --data-dir or set {DATA_DIR_ENV}"))
        })?;
        Ok(Store::open(dir, self.registry.clone(), access)?)
    }

    fn print(&mut self, line: impl AsRef<str>) {
        let _ = writeln!(self.out, "{}", line.as_ref());
    }

    fn print_json(&mut self, v: &Json) {
        let _ = writeln!(self.out, "{}", serde_json::to_string_pretty(v).expect("json value serializes"));
    }

    fn warn(&mut self, line: impl AsRef<str>) {
        let _ = writeln!(self.err, "warning: {}", line.as_ref());
    }
}

/// Runs with the process environment as `GEOTK_DATA_DIR` source.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(argv, std::env::var_os(DATA_DIR_ENV).as_deref(), out, err)
}

/// As [`run`], with the data-dir fallback passed explicitly.
pub fn run_with<I, T>(argv: I, env_data_dir: Option<&OsStr>, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 { write!(out, "{rendered}") } else { write!(err, "{rendered}") };
            return code;
        }
    };
    let registry = match &cli.registry_file {
        None => Registry::seed(),
        Some(path) => match read_file(path).and_then(|b| {
            Registry::load(&b).map_err(|e| Failure::Usage(format!("registry file {}: {e}", path.display())))
        }) {
            Ok(r) => r,
            Err(f) => return report(f, err),
        },
    };
    let mut ctx = Ctx {
        data_dir: cli.data_dir.or_else(|| env_data_dir.filter(|d| !d.is_empty()).map(PathBuf::from)),
        registry: Arc::new(registry),
        json: cli.json,
        out,
        err,
    };
    match dispatch(cli.command, &mut ctx) {
        Ok(()) => 0,
        Err(f) => report(f, ctx.err),
    }
}

fn report(f: Failure, err: &mut dyn Write) -> i32 {
    match &f {
        Failure::Usage(m) => {
            let _ = writeln!(err, "error: {m}");
        }
        Failure::Validation(vs) => {
            for v in vs {
                let _ = writeln!(err, "{v}");
            }
        }
        Failure::Runtime { code, message } => {
            let _ = writeln!(err, "error: {code}: {message}");
        }
    }
    f.exit_code()
}

fn read_file(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn file_name(path: &Path) -> String {
    path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
}

fn provenance(path: &Path) -> Provenance {
    Provenance {
        submitter: ACTOR.into(),
        source_file: file_name(path),
        ingested_at: Utc::now(),
    }
}

fn dispatch(cmd: Command, ctx: &mut Ctx) -> Outcome {
    match cmd {
        Command::Declare { lon, lat, depth, purpose } => declare(ctx, lon, lat, depth, &purpose),
        Command::Ingest(i) => match i {
            Ingest::Ags { file } => ingest_ags(ctx, &file),
            Ingest::Table {
                file,
                profile,
                point,
                skip_duplicate,
            } => ingest_table(ctx, &file, &profile, point.as_deref(), skip_duplicate),
            Ingest::Json { files } => ingest_json(ctx, &files),
            Ingest::Pressuremeter { file, point } => ingest_pressuremeter(ctx, &file, &point),
            Ingest::Attachment { file, kind, point } => ingest_attachment(ctx, &file, &kind, point.as_deref()),
        },
        Command::Interpret { test_id, point } => interpret(ctx, test_id.as_deref(), point.as_deref()),
        Command::Query { filter } => query(ctx, &filter),
        Command::Export { format, point, filter, out } => export(ctx, &format, &point, &filter, out.as_deref()),
        Command::Serve { host, port } => serve(ctx, &host, port),
        Command::Registry(RegistryCmd::List { kind }) => registry_list(ctx, kind.as_deref()),
    }
}

fn declare(ctx: &mut Ctx, lon: f64, lat: f64, depth: f64, purpose: &str) -> Outcome {
    let purpose: Purpose = purpose.parse().map_err(|_| {
        let allowed: Vec<&str> = Purpose::ALL.iter().map(|p| p.as_str()).collect();
        Failure::Validation(vec![Violation::new(
            "purpose",
            "purpose-enum",
            format!("`{purpose}` is not one of {}", allowed.join(", ")),
        )])
    })?;
    let store = ctx.open(Access::Writer)?;
    let id = store.declare(GeoPoint::new(lon, lat), depth, purpose, ACTOR)?;
    if ctx.json {
        let p = store.get_point(&id.to_string())?;
        ctx.print_json(&json!({"id": id.to_string(), "declarationStatus": p.declaration_status}));
    } else {
        ctx.print(id.to_string());
    }
    Ok(())
}

fn ingest_ags(ctx: &mut Ctx, file: &Path) -> Outcome {
    let bytes = read_file(file)?;
    let doc = ingest::parse_ags(&bytes)?;
    let mapped = ingest::map_ags(&doc, &ctx.registry, &provenance(file))?;
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
        return Err(Failure::Validation(violations));
    }
    let store = ctx.open(Access::Writer)?;
    let mut ids = Vec::new();
    for m in mapped.points {
        ids.push(store.import_point(m.point, ACTOR)?.to_string());
    }
    for w in &mapped.warnings {
        ctx.warn(w);
    }
    if ctx.json {
        ctx.print_json(&json!({"pointIds": ids, "warnings": mapped.warnings}));
    } else {
        for id in ids {
            ctx.print(id);
        }
    }
    Ok(())
}

/// A bundled name, or a path when it names an existing file.
fn load_profile(spec: &str, reg: &Registry) -> Result<MappingProfile, Failure> {
    let path = Path::new(spec);
    if path.is_file() {
        let bytes = read_file(path)?;
        let text = String::from_utf8(bytes).map_err(|_| Failure::Usage(format!("profile {spec} is not UTF-8")))?;
        return Ok(ingest::parse_profile(&text, reg)?);
    }
    if spec.contains(std::path::MAIN_SEPARATOR) || spec.ends_with(".profile") {
        return Err(Failure::Usage(format!("profile file {spec} does not exist")));
    }
    Ok(ingest::bundled_profile(spec, reg)?)
}

fn ingest_table(ctx: &mut Ctx, file: &Path, profile: &str, point: Option<&str>, skip_duplicate: bool) -> Outcome {
    let bytes = read_file(file)?;
    let profile = load_profile(profile, &ctx.registry)?;
    let parsed = ingest::ingest_table(&bytes, &profile, &ctx.registry, provenance(file))?;
    let store = ctx.open(Access::Writer)?;
    match point {
        Some(target) => {
            let (stored, skipped) = store.put_tests_with(target, parsed.tests, ACTOR, skip_duplicate)?;
            if ctx.json {
                ctx.print_json(&json!({"pointId": target, "stored": stored, "skipped": skipped}));
            } else {
                ctx.print(format!("{target}: stored {stored} test(s), skipped {skipped} duplicate(s)"));
            }
        }
        None => {
            if skip_duplicate {
                ctx.warn("--skip-duplicate has no effect without --point");
            }
            let id = store.import_point(parsed, ACTOR)?.to_string();
            if ctx.json {
                ctx.print_json(&json!({"pointId": id}));
            } else {
                ctx.print(id);
            }
        }
    }
    Ok(())
}

/// Directories expand to their `*.json` files in name order.
fn expand_json_inputs(inputs: &[PathBuf]) -> Result<Vec<PathBuf>, Failure> {
    let mut files = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = std::fs::read_dir(p)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", p.display())))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension() == Some(OsStr::new("json")))
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(p.clone());
        }
    }
    Ok(files)
}

fn ingest_json(ctx: &mut Ctx, inputs: &[PathBuf]) -> Outcome {
    let files = expand_json_inputs(inputs)?;
    let mut points = Vec::new();
    for f in &files {
        let bytes = read_file(f)?;
        let p: SurveyPoint = parse_canonical(&bytes)
            .map_err(|e| Failure::runtime("SyntaxError", format!("{}: {e}", f.display())))?;
        points.push(p);
    }
    let store = ctx.open(Access::Writer)?;
    let mut ids = Vec::new();
    for p in points {
        // exported ids are kept; anything else gets a fresh one
        let id = if p.id.parse::<PlatformId>().is_ok() {
            store.restore_point(p, ACTOR)?
        } else {
            store.import_point(p, ACTOR)?
        };
        ids.push(id.to_string());
    }
    if ctx.json {
        ctx.print_json(&json!({"pointIds": ids}));
    } else {
        for id in ids {
            ctx.print(id);
        }
    }
    Ok(())
}

fn ingest_pressuremeter(ctx: &mut Ctx, file: &Path, point: &str) -> Outcome {
    let bytes = read_file(file)?;
    let input: PressuremeterInput = serde_json::from_slice(&bytes)
        .map_err(|e| Failure::runtime("SyntaxError", format!("{}: {e}", file.display())))?;
    let (context, raw) = input.to_layers();
    let rec = TestRecord {
        id: String::new(),
        survey_point_id: point.to_string(),
        procedure: "menard-pressuremeter".into(),
        top_depth: input.depth,
        bottom_depth: input.depth,
        context,
        raw,
        intermediate: Layer::default(),
        interpreted: Layer::default(),
        provenance: provenance(file),
    };
    let store = ctx.open(Access::Writer)?;
    store.put_tests(point, vec![rec], ACTOR)?;
    let test_id = store.get_point(point)?.tests.last().map(|t| t.id.clone()).unwrap_or_default();
    if ctx.json {
        ctx.print_json(&json!({"testId": test_id}));
    } else {
        ctx.print(test_id);
    }
    Ok(())
}

fn ingest_attachment(ctx: &mut Ctx, file: &Path, kind: &str, point: Option<&str>) -> Outcome {
    let kind: AttachmentKind = kind
        .parse()
        .map_err(|_| Failure::Usage(format!("unknown attachment kind `{kind}`")))?;
    let bytes = read_file(file)?;
    let att = ingest::register_attachment(&bytes, &file_name(file), kind)?;
    let store = ctx.open(Access::Writer)?;
    let sha = store.put_attachment_as(&bytes, ACTOR)?;
    if let Some(p) = point {
        store.attach_file(p, att, ACTOR)?;
    }
    if ctx.json {
        ctx.print_json(&json!({"sha256": sha}));
    } else {
        ctx.print(sha);
    }
    Ok(())
}

fn interpret(ctx: &mut Ctx, test_id: Option<&str>, point: Option<&str>) -> Outcome {
    let store = ctx.open(Access::Writer)?;
    let tests: Vec<TestRecord> = match (test_id, point) {
        (Some(t), _) => {
            let pid = t.rsplit_once('.').map_or(t, |(p, _)| p);
            let p = store.get_point(pid).map_err(|_| Failure::from(StoreError::NotFound(t.to_string())))?;
            vec![p.test(t).cloned().ok_or_else(|| StoreError::NotFound(t.to_string()))?]
        }
        (None, Some(p)) => store.get_point(p)?.tests.clone(),
        (None, None) => unreachable!("clap requires one of them"),
    };
    let mut report = Vec::new();
    let mut failed = None;
    for t in &tests {
        match derive_layers(t) {
            Ok((intermediate, interpreted)) => {
                let rec = store.attach_layers(&t.id, intermediate, interpreted, INTERPRET_ACTOR)?;
                report.push(json!({"testId": rec.id, "interpreted": rec.interpreted}));
                if !ctx.json {
                    let values: Vec<String> = rec
                        .interpreted
                        .values
                        .iter()
                        .map(|v| match v.value.as_number() {
                            Some(x) => format!("{}={x} {}", v.property, v.unit),
                            None => format!("{}={:?}", v.property, v.value),
                        })
                        .collect();
                    let series: Vec<&str> = rec.intermediate.series.iter().map(|s| s.property.as_str()).collect();
                    let summary = if values.is_empty() { format!("intermediate {}", series.join(", ")) } else { values.join(", ") };
                    ctx.print(format!("{}: {summary}", rec.id));
                }
            }
            Err(e) => {
                report.push(json!({"testId": t.id, "error": {"code": e.code(), "message": e.to_string()}}));
                let _ = writeln!(ctx.err, "{}: {}: {e}", t.id, e.code());
                failed.get_or_insert(e);
            }
        }
    }
    if ctx.json {
        ctx.print_json(&Json::Array(report));
    }
    match failed {
        // a single failing test reports its own error code
        Some(e) if tests.len() == 1 => Err(Failure::runtime(e.code(), e.to_string())),
        Some(_) => Err(Failure::runtime("InterpretationFailed", "some tests could not be interpreted")),
        None => Ok(()),
    }
}

fn matching(store: &Store, filter: &Filter) -> Result<Vec<Arc<SurveyPoint>>, Failure> {
    let q = things_query(filter.bbox.as_deref(), filter.procedure.as_deref(), filter.geological_unit.as_deref())
        .map_err(|e| Failure::Usage(format!("{}: {}", e.code, e.message)))?;
    Ok(store.query(&q)?)
}

fn query(ctx: &mut Ctx, filter: &Filter) -> Outcome {
    let store = ctx.open(Access::Reader)?;
    let points = matching(&store, filter)?;
    if ctx.json {
        let things: Vec<Json> = points.iter().map(|p| views::thing(p)).collect();
        ctx.print_json(&Json::Array(things));
    } else {
        for p in points {
            let mut procs: Vec<&str> = p.tests.iter().map(|t| t.procedure.as_str()).collect();
            procs.sort_unstable();
            procs.dedup();
            ctx.print(format!(
                "{}\t{}\t{}\t{}\t{}",
                p.id,
                p.location.lon,
                p.location.lat,
                p.purpose.as_str(),
                procs.join(",")
            ));
        }
    }
    Ok(())
}

fn export(ctx: &mut Ctx, format: &str, ids: &[String], filter: &Filter, out: Option<&Path>) -> Outcome {
    let format: Format = format.parse().map_err(Failure::Usage)?;
    let filtered = filter.bbox.is_some() || filter.procedure.is_some() || filter.geological_unit.is_some();
    if !ids.is_empty() && filtered {
        return Err(Failure::Usage("--point cannot be combined with query filters".into()));
    }
    let store = ctx.open(Access::Reader)?;
    let points = if ids.is_empty() {
        matching(&store, filter)?
    } else {
        ids.iter().map(|id| store.get_point(id)).collect::<Result<Vec<_>, _>>()?
    };
    let refs: Vec<&SurveyPoint> = points.iter().map(|p| p.as_ref()).collect();
    let files = export::render(&refs, format);
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| Failure::runtime("StorageFailure", format!("{}: {e}", dir.display())))?;
            let mut written = Vec::new();
            for (name, body) in &files {
                let path = dir.join(name);
                std::fs::write(&path, body)
                    .map_err(|e| Failure::runtime("StorageFailure", format!("{}: {e}", path.display())))?;
                written.push(path.display().to_string());
            }
            if ctx.json {
                ctx.print_json(&json!({"files": written}));
            } else {
                for w in written {
                    ctx.print(w);
                }
            }
        }
        None if files.len() == 1 => {
            let _ = ctx.out.write_all(files[0].1.as_bytes());
        }
        None => {
            for (name, body) in &files {
                let _ = writeln!(ctx.out, "==> {name} <==");
                let _ = ctx.out.write_all(body.as_bytes());
            }
        }
    }
    Ok(())
}

fn serve(ctx: &mut Ctx, host: &str, port: u16) -> Outcome {
    let addr: SocketAddr = format!("{host}:{port}")
        .parse()
        .or_else(|_| format!("[{host}]:{port}").parse())
        .map_err(|_| Failure::Usage(format!("cannot bind to host `{host}`")))?;
    let store = Arc::new(ctx.open(Access::Writer)?);
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| Failure::runtime("StorageFailure", e.to_string()))?;
    let _ = writeln!(ctx.err, "listening on http://{addr}{}", views::ROOT);
    runtime
        .block_on(geotk_api::serve(AppState::new(store), addr))
        .map_err(|e| Failure::runtime("ServeFailed", e.to_string()))
}

fn registry_list(ctx: &mut Ctx, kind: Option<&str>) -> Outcome {
    let kind = kind.map(str::parse::<ConceptKind>).transpose().map_err(Failure::Usage)?;
    let concepts: Vec<_> = ctx
        .registry
        .concepts()
        .iter()
        .filter(|c| kind.is_none_or(|k| c.kind == k))
        .cloned()
        .collect();
    if ctx.json {
        let v = serde_json::to_value(&concepts).expect("concepts serialize");
        ctx.print_json(&v);
    } else {
        for c in concepts {
            let mut line = format!("{}\t{}\t{}", c.id, c.kind.as_str(), c.pref_label);
            if c.deprecated {
                line.push_str(&format!("\tdeprecated -> {}", c.replaced_by.as_deref().unwrap_or("-")));
            }
            ctx.print(line);
        }
    }
    Ok(())
}
