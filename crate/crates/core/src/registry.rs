//! Controlled vocabularies: observed properties, procedures and units.
//!
//! A [`Registry`] is loaded once from a line-oriented text file and is
//! immutable afterwards. Labels are matched after case folding and
//! whitespace normalisation; there is no fuzzy matching.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The snapshot bundled with the crate.
pub const SEED_REGISTRY: &str = include_str!("../data/registry.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConceptKind {
    ObservedProperty,
    Procedure,
    Unit,
}

impl ConceptKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ConceptKind::ObservedProperty => "observed-property",
            ConceptKind::Procedure => "procedure",
            ConceptKind::Unit => "unit",
        }
    }
}

impl fmt::Display for ConceptKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ConceptKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "observed-property" => Ok(ConceptKind::ObservedProperty),
            "procedure" => Ok(ConceptKind::Procedure),
            "unit" => Ok(ConceptKind::Unit),
            other => Err(format!("unknown concept kind `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuantityKind {
    Pressure,
    Volume,
    Length,
    Dimensionless,
    Time,
    Force,
}

impl FromStr for QuantityKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "pressure" => Ok(QuantityKind::Pressure),
            "volume" => Ok(QuantityKind::Volume),
            "length" => Ok(QuantityKind::Length),
            "dimensionless" => Ok(QuantityKind::Dimensionless),
            "time" => Ok(QuantityKind::Time),
            "force" => Ok(QuantityKind::Force),
            other => Err(format!("unknown quantity kind `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ConceptEntry {
    pub id: String,
    pub kind: ConceptKind,
    pub pref_label: String,
    pub definition: String,
    pub synonyms: Vec<String>,
    pub broader: Option<String>,
    pub equivalents: Vec<String>,
    pub deprecated: bool,
    pub replaced_by: Option<String>,
    pub quantity_kind: Option<QuantityKind>,
}

/// Outcome of a successful [`Registry::resolve`].
#[derive(Debug, Clone, Copy)]
pub struct Resolved<'a> {
    pub concept: &'a ConceptEntry,
    /// The matched term was deprecated and the lookup followed `replaced-by`.
    pub redirected: bool,
}

#[derive(Debug, Error, PartialEq)]
pub enum RegistryError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("registry integrity: {0}")]
    Integrity(String),
    #[error("no {kind} matches `{term}`")]
    NotFound { kind: ConceptKind, term: String },
    #[error("`{term}` is ambiguous among {candidates:?}")]
    Ambiguous { term: String, candidates: Vec<String> },
}

/// Case-folds and collapses internal whitespace.
pub fn normalize_label(label: &str) -> String {
    label
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
}

#[derive(Debug, Clone)]
pub struct Registry {
    concepts: Vec<ConceptEntry>,
    by_id: HashMap<String, usize>,
    labels: HashMap<(ConceptKind, String), Vec<usize>>,
    children: HashMap<String, Vec<String>>,
}

impl Registry {
    /// Loads the bundled snapshot.
    pub fn seed() -> Registry {
        Registry::load(SEED_REGISTRY.as_bytes()).expect("bundled registry is valid")
    }

    pub fn load(bytes: &[u8]) -> Result<Registry, RegistryError> {
        let text = std::str::from_utf8(bytes).map_err(|e| RegistryError::Parse {
            line: line_of_offset(bytes, e.valid_up_to()),
            reason: "invalid UTF-8".into(),
        })?;
        let concepts = parse_records(text)?;
        Registry::from_concepts(concepts)
    }

    fn from_concepts(concepts: Vec<ConceptEntry>) -> Result<Registry, RegistryError> {
        let mut by_id = HashMap::new();
        for (idx, c) in concepts.iter().enumerate() {
            if by_id.insert(c.id.clone(), idx).is_some() {
                return Err(RegistryError::Integrity(format!("duplicate id `{}`", c.id)));
            }
        }

        let mut labels: HashMap<(ConceptKind, String), Vec<usize>> = HashMap::new();
        for (idx, c) in concepts.iter().enumerate() {
            let mut own = HashSet::new();
            for term in std::iter::once(&c.pref_label).chain(c.synonyms.iter()) {
                let key = normalize_label(term);
                if key.is_empty() || !own.insert(key.clone()) {
                    continue;
                }
                let slot = labels.entry((c.kind, key.clone())).or_default();
                if let Some(&other) = slot.first() {
                    return Err(RegistryError::Integrity(format!(
                        "duplicate synonym `{}` shared by `{}` and `{}`",
                        key, concepts[other].id, c.id
                    )));
                }
                slot.push(idx);
            }
        }

        for c in &concepts {
            if let Some(parent) = &c.broader {
                match by_id.get(parent) {
                    None => {
                        return Err(RegistryError::Integrity(format!(
                            "dangling broader `{parent}` on `{}`",
                            c.id
                        )))
                    }
                    Some(&p) if concepts[p].kind != c.kind => {
                        return Err(RegistryError::Integrity(format!(
                            "broader `{parent}` of `{}` has a different kind",
                            c.id
                        )))
                    }
                    _ => {}
                }
            }
            for eq in &c.equivalents {
                if !by_id.contains_key(eq) {
                    return Err(RegistryError::Integrity(format!(
                        "dangling equivalent `{eq}` on `{}`",
                        c.id
                    )));
                }
            }
            match (&c.replaced_by, c.deprecated) {
                (Some(target), _) => match by_id.get(target) {
                    None => {
                        return Err(RegistryError::Integrity(format!(
                            "dangling replacedBy `{target}` on `{}`",
                            c.id
                        )))
                    }
                    Some(&t) if concepts[t].deprecated => {
                        return Err(RegistryError::Integrity(format!(
                            "replacedBy `{target}` of `{}` is itself deprecated",
                            c.id
                        )))
                    }
                    Some(&t) if concepts[t].kind != c.kind => {
                        return Err(RegistryError::Integrity(format!(
                            "replacedBy `{target}` of `{}` has a different kind",
                            c.id
                        )))
                    }
                    _ => {}
                },
                (None, true) => {
                    return Err(RegistryError::Integrity(format!(
                        "deprecated `{}` has no replacedBy",
                        c.id
                    )))
                }
                (None, false) => {}
            }
        }

        // Walk each broader chain; a chain longer than the registry loops.
        for c in &concepts {
            let mut seen = HashSet::new();
            let mut cursor = Some(c.id.as_str());
            while let Some(id) = cursor {
                if !seen.insert(id) {
                    return Err(RegistryError::Integrity(format!(
                        "hierarchy cycle through `{}`",
                        c.id
                    )));
                }
                cursor = concepts[by_id[id]].broader.as_deref();
            }
        }

        let mut children: HashMap<String, Vec<String>> = HashMap::new();
        for c in &concepts {
            if let Some(parent) = &c.broader {
                children.entry(parent.clone()).or_default().push(c.id.clone());
            }
        }

        Ok(Registry {
            concepts,
            by_id,
            labels,
            children,
        })
    }

    pub fn concepts(&self) -> &[ConceptEntry] {
        &self.concepts
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&ConceptEntry> {
        self.by_id.get(id).map(|&i| &self.concepts[i])
    }

    /// Exact id lookup restricted to one kind.
    pub fn get_kind(&self, kind: ConceptKind, id: &str) -> Option<&ConceptEntry> {
        self.get(id).filter(|c| c.kind == kind)
    }

    /// Matches by id, then preferred label, then synonyms. Deprecated hits are
    /// redirected to their replacement.
    pub fn resolve(&self, kind: ConceptKind, term: &str) -> Result<Resolved<'_>, RegistryError> {
        let hit = match self.get_kind(kind, term.trim()) {
            Some(c) => c,
            None => {
                let key = normalize_label(term);
                match self.labels.get(&(kind, key)).map(Vec::as_slice) {
                    Some([only]) => &self.concepts[*only],
                    Some(many) if many.len() > 1 => {
                        return Err(RegistryError::Ambiguous {
                            term: term.to_string(),
                            candidates: many.iter().map(|&i| self.concepts[i].id.clone()).collect(),
                        })
                    }
                    _ => {
                        return Err(RegistryError::NotFound {
                            kind,
                            term: term.to_string(),
                        })
                    }
                }
            }
        };
        if hit.deprecated {
            let target = hit
                .replaced_by
                .as_deref()
                .and_then(|id| self.get(id))
                .expect("replacement checked at load");
            Ok(Resolved {
                concept: target,
                redirected: true,
            })
        } else {
            Ok(Resolved {
                concept: hit,
                redirected: false,
            })
        }
    }

    /// All descendants of `id`, depth-first in file order.
    pub fn narrower(&self, id: &str) -> Result<Vec<String>, RegistryError> {
        let concept = self.get(id).ok_or_else(|| RegistryError::NotFound {
            kind: ConceptKind::ObservedProperty,
            term: id.to_string(),
        })?;
        let mut out = Vec::new();
        let mut stack: Vec<&str> = self
            .children
            .get(&concept.id)
            .map(|v| v.iter().rev().map(String::as_str).collect())
            .unwrap_or_default();
        while let Some(next) = stack.pop() {
            out.push(next.to_string());
            if let Some(kids) = self.children.get(next) {
                stack.extend(kids.iter().rev().map(String::as_str));
            }
        }
        Ok(out)
    }

    /// Ancestors of `id`, nearest first.
    pub fn broader_chain(&self, id: &str) -> Vec<String> {
        let mut out = Vec::new();
        let mut cursor = self.get(id).and_then(|c| c.broader.clone());
        while let Some(p) = cursor {
            cursor = self.get(&p).and_then(|c| c.broader.clone());
            out.push(p);
        }
        out
    }

    /// `candidate` equals `ancestor` or sits somewhere below it.
    pub fn is_same_or_narrower(&self, candidate: &str, ancestor: &str) -> bool {
        candidate == ancestor || self.broader_chain(candidate).iter().any(|p| p == ancestor)
    }

    pub fn of_kind(&self, kind: ConceptKind) -> impl Iterator<Item = &ConceptEntry> {
        self.concepts.iter().filter(move |c| c.kind == kind)
    }
}

fn line_of_offset(bytes: &[u8], offset: usize) -> usize {
    bytes[..offset].iter().filter(|&&b| b == b'\n').count() + 1
}

#[derive(Default)]
struct Draft {
    start_line: usize,
    fields: BTreeMap<&'static str, String>,
    synonyms: Vec<String>,
    equivalents: Vec<String>,
}

fn parse_records(text: &str) -> Result<Vec<ConceptEntry>, RegistryError> {
    let mut out = Vec::new();
    let mut draft: Option<Draft> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            if let Some(d) = draft.take() {
                out.push(finish(d)?);
            }
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once(':').ok_or_else(|| RegistryError::Parse {
            line: line_no,
            reason: format!("expected `field: value`, got `{line}`"),
        })?;
        let key = key.trim();
        let value = value.trim().to_string();
        let d = draft.get_or_insert_with(|| Draft {
            start_line: line_no,
            ..Draft::default()
        });
        let single: &'static str = match key {
            "synonym" => {
                d.synonyms.push(value);
                continue;
            }
            "equivalent" => {
                d.equivalents.push(value);
                continue;
            }
            "id" => "id",
            "kind" => "kind",
            "label" => "label",
            "definition" => "definition",
            "broader" => "broader",
            "deprecated" => "deprecated",
            "replaced-by" => "replaced-by",
            "quantity-kind" => "quantity-kind",
            other => {
                return Err(RegistryError::Parse {
                    line: line_no,
                    reason: format!("unknown field `{other}`"),
                })
            }
        };
        if d.fields.insert(single, value).is_some() {
            return Err(RegistryError::Parse {
                line: line_no,
                reason: format!("field `{single}` repeated"),
            });
        }
    }
    if let Some(d) = draft.take() {
        out.push(finish(d)?);
    }
    Ok(out)
}

fn finish(mut d: Draft) -> Result<ConceptEntry, RegistryError> {
    let line = d.start_line;
    let err = |reason: String| RegistryError::Parse { line, reason };
    let mut take = |k: &str| d.fields.remove(k);

    let id = take("id").ok_or_else(|| err("record without `id`".into()))?;
    if id.is_empty()
        || !id
            .chars()
            .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '-')
    {
        return Err(err(format!("id `{id}` is not a lowercase hyphenated token")));
    }
    let kind = take("kind")
        .ok_or_else(|| err(format!("`{id}` has no `kind`")))?
        .parse::<ConceptKind>()
        .map_err(err)?;
    let pref_label = take("label").ok_or_else(|| err(format!("`{id}` has no `label`")))?;
    let definition = take("definition").unwrap_or_default();
    let broader = take("broader");
    let deprecated = match take("deprecated").as_deref() {
        None | Some("false") => false,
        Some("true") => true,
        Some(other) => return Err(err(format!("deprecated must be true/false, got `{other}`"))),
    };
    let replaced_by = take("replaced-by");
    let quantity_kind = take("quantity-kind")
        .map(|q| q.parse::<QuantityKind>())
        .transpose()
        .map_err(err)?;

    Ok(ConceptEntry {
        id,
        kind,
        pref_label,
        definition,
        synonyms: d.synonyms,
        broader,
        equivalents: d.equivalents,
        deprecated,
        replaced_by,
        quantity_kind,
    })
}
