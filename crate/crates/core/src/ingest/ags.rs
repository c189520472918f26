//! A strict, line-oriented subset of the AGS4 exchange format.
//!
//! Every line is a list of double-quoted fields separated by commas, with
//! embedded quotes doubled. The first field is a marker:
//!
//! ```text
//! "GROUP","LOCA"
//! "HEADING","LOCA_ID","LOCA_FDEP"
//! "UNIT","","m"
//! "TYPE","ID","2DP"
//! "DATA","BH001","15.00"
//! ```
//!
//! `UNIT` and `TYPE` are optional and precede the first `DATA` row. Blank
//! lines separate groups and are otherwise ignored.

use std::collections::HashSet;

use super::IngestError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgsGroup {
    pub name: String,
    pub headings: Vec<String>,
    pub units: Option<Vec<String>>,
    pub types: Option<Vec<String>>,
    pub rows: Vec<Vec<String>>,
}

impl AgsGroup {
    pub fn column(&self, heading: &str) -> Option<usize> {
        self.headings.iter().position(|h| h == heading)
    }

    pub fn unit(&self, column: usize) -> &str {
        self.units.as_ref().map(|u| u[column].as_str()).unwrap_or("")
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AgsDocument {
    pub groups: Vec<AgsGroup>,
}

impl AgsDocument {
    pub fn group(&self, name: &str) -> Option<&AgsGroup> {
        self.groups.iter().find(|g| g.name == name)
    }
}

pub fn is_group_name(name: &str) -> bool {
    name.len() == 4 && name.bytes().all(|b| b.is_ascii_uppercase() || b.is_ascii_digit())
}

fn syntax(line: usize, reason: impl Into<String>) -> IngestError {
    IngestError::Syntax {
        line,
        reason: reason.into(),
    }
}

/// Splits one line into its unquoted fields.
fn split_fields(line: &str, line_no: usize) -> Result<Vec<String>, IngestError> {
    let mut fields = Vec::new();
    let mut chars = line.chars().peekable();
    loop {
        if chars.next() != Some('"') {
            return Err(syntax(line_no, "expected a double-quoted field"));
        }
        let mut field = String::new();
        loop {
            match chars.next() {
                None => return Err(syntax(line_no, "unbalanced quotes")),
                Some('"') if chars.peek() == Some(&'"') => {
                    chars.next();
                    field.push('"');
                }
                Some('"') => break,
                Some(c) => field.push(c),
            }
        }
        fields.push(field);
        match chars.next() {
            None => return Ok(fields),
            Some(',') => {}
            Some(c) => return Err(syntax(line_no, format!("unexpected `{c}` after closing quote"))),
        }
    }
}

pub fn parse_ags(bytes: &[u8]) -> Result<AgsDocument, IngestError> {
    let text = std::str::from_utf8(bytes).map_err(|_| IngestError::NotUtf8)?;
    let mut doc = AgsDocument::default();
    let mut names = HashSet::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = split_fields(line, line_no)?;
        let marker = fields.remove(0);
        match marker.as_str() {
            "GROUP" => {
                if let Some(prev) = doc.groups.last() {
                    if prev.headings.is_empty() {
                        return Err(syntax(line_no, format!("group {} has no HEADING row", prev.name)));
                    }
                }
                let [name] = fields.as_slice() else {
                    return Err(syntax(line_no, "GROUP row takes exactly one field"));
                };
                if !is_group_name(name) {
                    return Err(syntax(line_no, format!("`{name}` is not a 4-character group name")));
                }
                if !names.insert(name.clone()) {
                    return Err(syntax(line_no, format!("group {name} repeated")));
                }
                doc.groups.push(AgsGroup {
                    name: name.clone(),
                    headings: vec![],
                    units: None,
                    types: None,
                    rows: vec![],
                });
            }
            "HEADING" => {
                let group = doc
                    .groups
                    .last_mut()
                    .ok_or_else(|| syntax(line_no, "HEADING before any GROUP"))?;
                if !group.headings.is_empty() {
                    return Err(syntax(line_no, "second HEADING row in group"));
                }
                if fields.is_empty() || fields.iter().any(String::is_empty) {
                    return Err(syntax(line_no, "HEADING needs non-empty field names"));
                }
                let mut seen = HashSet::new();
                if let Some(dup) = fields.iter().find(|f| !seen.insert(f.as_str())) {
                    return Err(syntax(line_no, format!("heading {dup} repeated")));
                }
                group.headings = fields;
            }
            "UNIT" | "TYPE" | "DATA" => {
                let group = doc
                    .groups
                    .last_mut()
                    .ok_or_else(|| syntax(line_no, format!("{marker} before any GROUP")))?;
                if group.headings.is_empty() {
                    return Err(syntax(line_no, format!("{marker} before HEADING")));
                }
                if fields.len() != group.headings.len() {
                    return Err(syntax(
                        line_no,
                        format!(
                            "arity: {} fields under {} headings",
                            fields.len(),
                            group.headings.len()
                        ),
                    ));
                }
                if marker == "DATA" {
                    group.rows.push(fields);
                    continue;
                }
                if !group.rows.is_empty() {
                    return Err(syntax(line_no, format!("{marker} after DATA")));
                }
                let slot = if marker == "UNIT" { &mut group.units } else { &mut group.types };
                if slot.is_some() {
                    return Err(syntax(line_no, format!("second {marker} row in group")));
                }
                *slot = Some(fields);
            }
            other => return Err(syntax(line_no, format!("unknown row marker `{other}`"))),
        }
    }
    match doc.groups.last() {
        None => Err(IngestError::EmptyInput),
        Some(g) if g.headings.is_empty() => Err(syntax(text.lines().count(), format!("group {} has no HEADING row", g.name))),
        Some(_) => Ok(doc),
    }
}

fn push_line(out: &mut String, marker: &str, fields: &[String]) {
    out.push('"');
    out.push_str(marker);
    out.push('"');
    for f in fields {
        out.push_str(",\"");
        out.push_str(&f.replace('"', "\"\""));
        out.push('"');
    }
    out.push('\n');
}

/// Writes groups in order, separated by a blank line.
pub fn render_ags(doc: &AgsDocument) -> String {
    let mut out = String::new();
    for (i, g) in doc.groups.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        push_line(&mut out, "GROUP", std::slice::from_ref(&g.name));
        push_line(&mut out, "HEADING", &g.headings);
        if let Some(u) = &g.units {
            push_line(&mut out, "UNIT", u);
        }
        if let Some(t) = &g.types {
            push_line(&mut out, "TYPE", t);
        }
        for row in &g.rows {
            push_line(&mut out, "DATA", row);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    pub const MINIMAL: &str = "\"GROUP\",\"LOCA\"\n\"HEADING\",\"LOCA_ID\",\"LOCA_FDEP\"\n\"UNIT\",\"\",\"m\"\n\"DATA\",\"BH001\",\"15.00\"\n";

    #[test]
    fn minimal_group() {
        let doc = parse_ags(MINIMAL.as_bytes()).unwrap();
        assert_eq!(
            doc,
            AgsDocument {
                groups: vec![AgsGroup {
                    name: "LOCA".into(),
                    headings: vec!["LOCA_ID".into(), "LOCA_FDEP".into()],
                    units: Some(vec!["".into(), "m".into()]),
                    types: None,
                    rows: vec![vec!["BH001".into(), "15.00".into()]],
                }]
            }
        );
        assert_eq!(render_ags(&doc), MINIMAL);
    }

    #[test]
    fn crlf_and_blank_lines() {
        let text = MINIMAL.replace('\n', "\r\n") + "\r\n\r\n";
        assert_eq!(parse_ags(text.as_bytes()).unwrap(), parse_ags(MINIMAL.as_bytes()).unwrap());
    }

    #[test]
    fn empty_input() {
        assert_eq!(parse_ags(b""), Err(IngestError::EmptyInput));
        assert_eq!(parse_ags(b"\n  \n"), Err(IngestError::EmptyInput));
    }

    #[test]
    fn arity_mismatch() {
        let text = MINIMAL.replace("\"DATA\",\"BH001\",\"15.00\"", "\"DATA\",\"BH001\",\"15.00\",\"x\"");
        match parse_ags(text.as_bytes()) {
            Err(IngestError::Syntax { line: 4, reason }) => assert!(reason.starts_with("arity")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn quoting_errors() {
        assert!(matches!(
            parse_ags(b"\"GROUP\",\"LOCA\n"),
            Err(IngestError::Syntax { line: 1, ref reason }) if reason == "unbalanced quotes"
        ));
        assert!(matches!(parse_ags(b"GROUP,LOCA\n"), Err(IngestError::Syntax { line: 1, .. })));
        assert!(matches!(parse_ags(b"\"GROUP\"x,\"LOCA\"\n"), Err(IngestError::Syntax { line: 1, .. })));
    }

    #[test]
    fn unknown_marker() {
        let text = format!("{MINIMAL}\"NOTE\",\"x\",\"y\"\n");
        assert!(matches!(
            parse_ags(text.as_bytes()),
            Err(IngestError::Syntax { line: 5, ref reason }) if reason.contains("unknown row marker")
        ));
    }

    #[test]
    fn embedded_quotes_and_commas() {
        let text = "\"GROUP\",\"GEOL\"\n\"HEADING\",\"GEOL_DESC\"\n\"DATA\",\"soft \"\"grey\"\", sandy CLAY\"\n";
        let doc = parse_ags(text.as_bytes()).unwrap();
        assert_eq!(doc.groups[0].rows[0][0], "soft \"grey\", sandy CLAY");
        assert_eq!(render_ags(&doc), text);
    }

    #[test]
    fn structure_errors() {
        assert!(parse_ags(b"\"HEADING\",\"A\"\n").is_err());
        assert!(parse_ags(b"\"GROUP\",\"loca\"\n\"HEADING\",\"A\"\n").is_err());
        assert!(parse_ags(b"\"GROUP\",\"LOCA\"\n").is_err());
        assert!(parse_ags(b"\"GROUP\",\"LOCA\"\n\"HEADING\",\"A\"\n\"DATA\",\"1\"\n\"UNIT\",\"m\"\n").is_err());
        let twice = format!("{MINIMAL}\n{MINIMAL}");
        assert!(parse_ags(twice.as_bytes()).is_err());
    }
}
