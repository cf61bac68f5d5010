//! Line-level tokenization of GEDCOM text.

use super::GedcomError;

/// One physical GEDCOM line: `level [@xref@] TAG [value]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawLine {
    pub level: u32,
    pub xref_id: Option<String>,
    pub tag: String,
    pub value: Option<String>,
    /// 1-based line number in the source text.
    pub line_no: usize,
}

impl RawLine {
    /// Parses a single non-blank line.
    pub fn parse(line: &str, line_no: usize) -> Result<RawLine, GedcomError> {
        let line = line.trim_start_matches('\u{feff}').trim_end_matches(['\r', '\n']);
        let trimmed = line.trim_start();
        let (level_str, rest) = split_token(trimmed);
        let level: u32 = level_str.parse().map_err(|_| GedcomError::Structural {
            line: line_no,
            message: format!("expected a level number, found {level_str:?}"),
        })?;
        let (mut token, mut rest) = split_token(rest);
        let mut xref_id = None;
        if token.len() >= 2 && token.starts_with('@') && token.ends_with('@') {
            xref_id = Some(token.to_string());
            (token, rest) = split_token(rest);
        }
        if token.is_empty() {
            return Err(GedcomError::Structural {
                line: line_no,
                message: "missing tag".to_string(),
            });
        }
        if !token
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        {
            return Err(GedcomError::Structural {
                line: line_no,
                message: format!("malformed tag {token:?}"),
            });
        }
        let value = if rest.is_empty() {
            None
        } else {
            Some(rest.to_string())
        };
        Ok(RawLine {
            level,
            xref_id,
            tag: token.to_ascii_uppercase(),
            value,
            line_no,
        })
    }
}

/// Splits off the first space-delimited token; the remainder keeps its inner spacing
/// but loses exactly one delimiter.
fn split_token(s: &str) -> (&str, &str) {
    let s = s.trim_start_matches([' ', '\t']);
    match s.find([' ', '\t']) {
        Some(i) => (&s[..i], &s[i + 1..]),
        None => (s, ""),
    }
}

/// Tokenizes all lines and checks the nesting rules: the first line is level 0,
/// level never jumps by more than one, and level-0 lines open a record (xref or HEAD/TRLR).
pub fn tokenize(text: &str) -> Result<Vec<RawLine>, GedcomError> {
    let mut out = Vec::new();
    let mut prev_level: Option<u32> = None;
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().trim_start_matches('\u{feff}').is_empty() {
            continue;
        }
        let raw = RawLine::parse(line, line_no)?;
        match prev_level {
            None if raw.level != 0 => {
                return Err(GedcomError::Structural {
                    line: line_no,
                    message: format!("first line must have level 0, found {}", raw.level),
                })
            }
            Some(prev) if raw.level > prev + 1 => {
                return Err(GedcomError::Structural {
                    line: line_no,
                    message: format!("level jumps from {prev} to {}", raw.level),
                })
            }
            _ => {}
        }
        if raw.level == 0 && raw.xref_id.is_none() && raw.tag != "HEAD" && raw.tag != "TRLR" {
            return Err(GedcomError::Structural {
                line: line_no,
                message: format!("record header {:?} has no xref id", raw.tag),
            });
        }
        prev_level = Some(raw.level);
        out.push(raw);
    }
    Ok(out)
}
