use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::tokenize::{tokenize_with, TokenizerOptions};
use crate::error::{display_name, Error, Result};
use crate::tokens::TokenSequence;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RelationType {
    Implicit,
    Explicit,
    Other(String),
}

impl RelationType {
    pub fn as_str(&self) -> &str {
        match self {
            RelationType::Implicit => "Implicit",
            RelationType::Explicit => "Explicit",
            RelationType::Other(s) => s,
        }
    }
}

impl From<&str> for RelationType {
    fn from(s: &str) -> Self {
        match s {
            "Implicit" => RelationType::Implicit,
            "Explicit" => RelationType::Explicit,
            other => RelationType::Other(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Dev,
    Test,
    Blind,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Dev => "dev",
            Split::Test => "test",
            Split::Blind => "blind",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Split {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(Split::Train),
            "dev" => Ok(Split::Dev),
            "test" => Ok(Split::Test),
            "blind" => Ok(Split::Blind),
            other => Err(Error::invalid(format!("unknown split `{other}`"))),
        }
    }
}

/// Truncates a sense path to its first two levels, e.g.
/// `Contingency.Cause.Reason` → `Contingency.Cause`.
pub fn second_level(sense: &str) -> String {
    sense.split('.').take(2).collect::<Vec<_>>().join(".")
}

/// One argument pair with its gold senses.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationInstance {
    pub id: String,
    pub doc_id: String,
    pub arg1: String,
    pub arg2: String,
    pub arg1_tokens: TokenSequence,
    pub arg2_tokens: TokenSequence,
    pub senses: Vec<String>,
    pub relation_type: RelationType,
    pub split: Option<Split>,
}

/// Wire form of one JSONL line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationRecord {
    pub id: String,
    pub doc_id: String,
    pub arg1: String,
    pub arg2: String,
    pub senses: Vec<String>,
    #[serde(rename = "type")]
    pub relation_type: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<String>,
}

impl RelationInstance {
    /// Builds an instance, reducing senses to second level and dropping repeats.
    pub fn from_record(record: RelationRecord, tokenizer: TokenizerOptions) -> Result<Self> {
        let mut senses: Vec<String> = Vec::with_capacity(record.senses.len());
        for s in &record.senses {
            let s = second_level(s.trim());
            if s.is_empty() {
                return Err(Error::invalid("empty sense label"));
            }
            if !senses.contains(&s) {
                senses.push(s);
            }
        }
        if senses.is_empty() || senses.len() > 2 {
            return Err(Error::invalid(format!(
                "expected 1 or 2 distinct senses, found {}",
                senses.len()
            )));
        }
        let split = record.split.as_deref().map(Split::from_str).transpose()?;
        let arg1_tokens = tokenize_with(&record.arg1, tokenizer)
            .map_err(|_| Error::invalid("arg1 is empty"))?;
        let arg2_tokens = tokenize_with(&record.arg2, tokenizer)
            .map_err(|_| Error::invalid("arg2 is empty"))?;
        Ok(Self {
            relation_type: RelationType::from(record.relation_type.as_str()),
            id: record.id,
            doc_id: record.doc_id,
            arg1: record.arg1,
            arg2: record.arg2,
            arg1_tokens,
            arg2_tokens,
            senses,
            split,
        })
    }

    pub fn to_record(&self) -> RelationRecord {
        RelationRecord {
            id: self.id.clone(),
            doc_id: self.doc_id.clone(),
            arg1: self.arg1.clone(),
            arg2: self.arg2.clone(),
            senses: self.senses.clone(),
            relation_type: self.relation_type.as_str().to_string(),
            split: self.split.map(|s| s.as_str().to_string()),
        }
    }

    pub fn has_sense(&self, label: &str) -> bool {
        self.senses.iter().any(|s| s == label)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LoadOptions {
    pub implicit_only: bool,
    pub tokenizer: TokenizerOptions,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self {
            implicit_only: true,
            tokenizer: TokenizerOptions::default(),
        }
    }
}

impl LoadOptions {
    pub fn all_types() -> Self {
        Self {
            implicit_only: false,
            ..Self::default()
        }
    }
}

pub fn load_relations(path: impl AsRef<Path>, options: LoadOptions) -> Result<Vec<RelationInstance>> {
    let path = path.as_ref();
    read_relations(BufReader::new(File::open(path)?), &display_name(path), options)
}

/// Strict JSONL parse preserving input order. Blank lines are rejected.
pub fn read_relations<R: BufRead>(reader: R, source: &str, options: LoadOptions) -> Result<Vec<RelationInstance>> {
    let mut out = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line_no = n + 1;
        let line = line?;
        let record: RelationRecord = serde_json::from_str(&line)
            .map_err(|e| Error::format(source, line_no, e.to_string()))?;
        let instance = RelationInstance::from_record(record, options.tokenizer)
            .map_err(|e| Error::format(source, line_no, e.to_string()))?;
        if options.implicit_only && instance.relation_type != RelationType::Implicit {
            continue;
        }
        out.push(instance);
    }
    Ok(out)
}

pub fn write_relations<W: Write>(w: &mut W, instances: &[RelationInstance]) -> Result<()> {
    for inst in instances {
        serde_json::to_writer(&mut *w, &inst.to_record())?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn save_relations(path: impl AsRef<Path>, instances: &[RelationInstance]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_relations(&mut w, instances)?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const LINE: &str = r#"{"id":"r1","doc_id":"wsj_2100","arg1":"The brokerage firms learned a lesson the last time around.","arg2":"This time, the firms were ready.","senses":["Contingency.Cause"],"type":"Implicit"}"#;

    fn parse(text: &str) -> Result<Vec<RelationInstance>> {
        read_relations(text.as_bytes(), "mem", LoadOptions::default())
    }

    #[test]
    fn one_sense() {
        let v = parse(LINE).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].senses, vec!["Contingency.Cause"]);
        assert_eq!(v[0].arg2_tokens.len(), 8);
    }

    #[test]
    fn two_senses() {
        let line = LINE.replace(
            r#"["Contingency.Cause"]"#,
            r#"["Comparison.Contrast","Expansion.Conjunction"]"#,
        );
        assert_eq!(parse(&line).unwrap()[0].senses.len(), 2);
    }

    #[test]
    fn missing_arg2_reports_line() {
        let bad = r#"{"id":"r2","doc_id":"wsj_2100","arg1":"x","senses":["A.B"],"type":"Implicit"}"#;
        let text = format!("{LINE}\n{bad}\n");
        assert!(matches!(parse(&text), Err(Error::Format { line: 2, .. })));
    }

    #[test]
    fn sense_count_limits() {
        let none = LINE.replace(r#"["Contingency.Cause"]"#, "[]");
        assert!(matches!(parse(&none), Err(Error::Format { line: 1, .. })));
        let three = LINE.replace(r#"["Contingency.Cause"]"#, r#"["A.B","C.D","E.F"]"#);
        assert!(parse(&three).is_err());
    }

    #[test]
    fn senses_reduced_and_deduplicated() {
        let line = LINE.replace(
            r#"["Contingency.Cause"]"#,
            r#"["Contingency.Cause.Reason","Contingency.Cause.Result"]"#,
        );
        assert_eq!(parse(&line).unwrap()[0].senses, vec!["Contingency.Cause"]);
    }

    #[test]
    fn explicit_filtered_when_requested() {
        let line = LINE.replace("Implicit", "Explicit");
        assert!(parse(&line).unwrap().is_empty());
        let kept = read_relations(line.as_bytes(), "mem", LoadOptions::all_types()).unwrap();
        assert_eq!(kept[0].relation_type, RelationType::Explicit);
    }

    #[test]
    fn round_trip_is_byte_exact() {
        let with_split = LINE.replace(r#""type":"Implicit"}"#, r#""type":"Implicit","split":"blind"}"#);
        for line in [LINE.to_string(), with_split] {
            let v = parse(&line).unwrap();
            let mut out = Vec::new();
            write_relations(&mut out, &v).unwrap();
            assert_eq!(String::from_utf8(out).unwrap(), format!("{line}\n"));
        }
    }
}
