//! `journal.log`: one tab-separated line per committed mutation,
//!
//! ```text
//! <RFC3339 timestamp>\t<actor>\t<op>\t<id>\t<sha256-of-doc>
//! ```
//!
//! The digest names the document version under `history/`, so any prefix of
//! the journal determines a store state.

use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, SecondsFormat, Utc};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Declare,
    Import,
    Restore,
    PutTests,
    AttachLayers,
    Attach,
    PutBlob,
    Tombstone,
}

impl Op {
    pub fn as_str(self) -> &'static str {
        match self {
            Op::Declare => "declare",
            Op::Import => "import",
            Op::Restore => "restore",
            Op::PutTests => "put-tests",
            Op::AttachLayers => "attach-layers",
            Op::Attach => "attach",
            Op::PutBlob => "put-blob",
            Op::Tombstone => "tombstone",
        }
    }
}

impl FromStr for Op {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "declare" => Op::Declare,
            "import" => Op::Import,
            "restore" => Op::Restore,
            "put-tests" => Op::PutTests,
            "attach-layers" => Op::AttachLayers,
            "attach" => Op::Attach,
            "put-blob" => Op::PutBlob,
            "tombstone" => Op::Tombstone,
            other => return Err(format!("unknown op `{other}`")),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JournalEntry {
    pub at: DateTime<Utc>,
    pub actor: String,
    pub op: Op,
    /// Point id, or the blob digest for `put-blob`.
    pub id: String,
    pub sha256: String,
}

/// Tabs and line breaks would break the line format.
pub fn clean_actor(actor: &str) -> String {
    let a: String = actor.chars().map(|c| if c.is_control() { ' ' } else { c }).collect();
    if a.trim().is_empty() {
        "anonymous".into()
    } else {
        a
    }
}

impl fmt::Display for JournalEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}\t{}\t{}\t{}\t{}",
            self.at.to_rfc3339_opts(SecondsFormat::Millis, true),
            self.actor,
            self.op.as_str(),
            self.id,
            self.sha256
        )
    }
}

impl FromStr for JournalEntry {
    type Err = String;

    fn from_str(line: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = line.split('\t').collect();
        let [at, actor, op, id, sha] = parts[..] else {
            return Err(format!("expected 5 fields, got {}", parts.len()));
        };
        let at = DateTime::parse_from_rfc3339(at).map_err(|e| e.to_string())?.with_timezone(&Utc);
        if sha.len() != 64 || !sha.bytes().all(|b| b.is_ascii_hexdigit()) {
            return Err(format!("`{sha}` is not a sha256 digest"));
        }
        Ok(JournalEntry {
            at,
            actor: actor.to_string(),
            op: op.parse()?,
            id: id.to_string(),
            sha256: sha.to_string(),
        })
    }
}
