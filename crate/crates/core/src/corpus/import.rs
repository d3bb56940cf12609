//! Importers from PDTB pipe files and CoNLL shared-task relation JSON into the
//! normalized instance model.

use std::fs::{self, File};
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde_json::Value;

use crate::corpus::instance::second_level;
use crate::corpus::{load_relations, LoadOptions, RelationInstance, RelationRecord, Split, TokenizerOptions};
use crate::error::{display_name, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceFormat {
    PdtbPipes,
    ConllJson,
    Normalized,
}

impl FromStr for SourceFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pdtb-pipes" => Ok(SourceFormat::PdtbPipes),
            "conll-json" => Ok(SourceFormat::ConllJson),
            "normalized" => Ok(SourceFormat::Normalized),
            other => Err(Error::invalid(format!("unknown source format `{other}`"))),
        }
    }
}

/// Reads `path` in `format`. All relation types are kept; `split`, when given, is stamped on
/// every instance.
pub fn import(format: SourceFormat, path: &Path, split: Option<Split>) -> Result<Vec<RelationInstance>> {
    let mut instances = match format {
        SourceFormat::PdtbPipes => import_pdtb_pipes(path)?,
        SourceFormat::ConllJson => import_conll_json(path)?,
        SourceFormat::Normalized => load_relations(path, LoadOptions::all_types())?,
    };
    if let Some(s) = split {
        instances.iter_mut().for_each(|i| i.split = Some(s));
    }
    Ok(instances)
}

/// Distinct second-level senses in order of appearance, at most two.
fn collect_senses<'a>(raw: impl IntoIterator<Item = &'a str>) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for s in raw {
        let s = s.trim();
        if s.is_empty() {
            continue;
        }
        let s = second_level(s);
        if !out.contains(&s) {
            out.push(s);
        }
    }
    if out.len() > 2 {
        log::warn!("keeping the first two of {} senses: {:?}", out.len(), out);
        out.truncate(2);
    }
    out
}

const PDTB_COLUMNS: usize = 48;
const COL_TYPE: usize = 0;
const COL_SECTION: usize = 1;
const COL_FILE: usize = 2;
const COL_SEMCLASSES: [usize; 4] = [11, 12, 13, 14];
const COL_ARG1_TEXT: usize = 24;
const COL_ARG2_TEXT: usize = 34;

fn pipe_files(path: &Path) -> Result<Vec<PathBuf>> {
    if path.is_file() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut out = Vec::new();
    let mut stack = vec![path.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir)? {
            let p = entry?.path();
            if p.is_dir() {
                stack.push(p);
            } else if p.extension().is_some_and(|e| e == "pipe") {
                out.push(p);
            }
        }
    }
    out.sort();
    Ok(out)
}

/// PDTB 2.0 pipe files: 48 `|`-separated columns per relation. A directory is searched
/// recursively for `*.pipe`. Ids are `<doc_id>:<line>`.
pub fn import_pdtb_pipes(path: &Path) -> Result<Vec<RelationInstance>> {
    let mut out = Vec::new();
    for file in pipe_files(path)? {
        let source = display_name(&file);
        for (n, line) in BufReader::new(File::open(&file)?).lines().enumerate() {
            let line_no = n + 1;
            let line = line?;
            let line = line.strip_suffix('\r').unwrap_or(&line);
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split('|').collect();
            if cols.len() != PDTB_COLUMNS {
                return Err(Error::format(
                    &source,
                    line_no,
                    format!("expected {PDTB_COLUMNS} columns, found {}", cols.len()),
                ));
            }
            let section: u32 = cols[COL_SECTION]
                .trim()
                .parse()
                .map_err(|_| Error::format(&source, line_no, "bad section number"))?;
            let file_no: u32 = cols[COL_FILE]
                .trim()
                .parse()
                .map_err(|_| Error::format(&source, line_no, "bad file number"))?;
            let doc_id = format!("wsj_{section:02}{file_no:02}");
            let rel_type = cols[COL_TYPE].trim();
            let mut senses = collect_senses(COL_SEMCLASSES.iter().map(|&c| cols[c]));
            if senses.is_empty() {
                // EntRel and NoRel carry no semantic class.
                senses.push(rel_type.to_string());
            }
            let record = RelationRecord {
                id: format!("{doc_id}:{line_no}"),
                doc_id,
                arg1: cols[COL_ARG1_TEXT].to_string(),
                arg2: cols[COL_ARG2_TEXT].to_string(),
                senses,
                relation_type: rel_type.to_string(),
                split: None,
            };
            out.push(
                RelationInstance::from_record(record, TokenizerOptions::default())
                    .map_err(|e| Error::format(&source, line_no, e.to_string()))?,
            );
        }
    }
    Ok(out)
}

fn field<'a>(v: &'a Value, path: &[&str], source: &str, line_no: usize) -> Result<&'a Value> {
    let mut cur = v;
    for key in path {
        cur = cur
            .get(key)
            .ok_or_else(|| Error::format(source, line_no, format!("missing field `{}`", path.join("."))))?;
    }
    Ok(cur)
}

fn string_field(v: &Value, path: &[&str], source: &str, line_no: usize) -> Result<String> {
    field(v, path, source, line_no)?
        .as_str()
        .map(String::from)
        .ok_or_else(|| Error::format(source, line_no, format!("`{}` must be a string", path.join("."))))
}

/// CoNLL shared-task `relations.json` (one object per line), reading `ID`, `DocID`,
/// `Arg1.RawText`, `Arg2.RawText`, `Sense` and `Type`.
pub fn import_conll_json(path: &Path) -> Result<Vec<RelationInstance>> {
    let source = display_name(path);
    let mut out = Vec::new();
    for (n, line) in BufReader::new(File::open(path)?).lines().enumerate() {
        let line_no = n + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let v: Value = serde_json::from_str(&line).map_err(|e| Error::format(&source, line_no, e.to_string()))?;
        let id = match v.get("ID") {
            Some(Value::String(s)) => s.clone(),
            Some(Value::Number(n)) => n.to_string(),
            _ => format!("{}:{line_no}", string_field(&v, &["DocID"], &source, line_no)?),
        };
        let senses = field(&v, &["Sense"], &source, line_no)?
            .as_array()
            .ok_or_else(|| Error::format(&source, line_no, "`Sense` must be an array"))?
            .iter()
            .map(|s| s.as_str().ok_or_else(|| Error::format(&source, line_no, "senses must be strings")))
            .collect::<Result<Vec<&str>>>()?;
        let record = RelationRecord {
            id,
            doc_id: string_field(&v, &["DocID"], &source, line_no)?,
            arg1: string_field(&v, &["Arg1", "RawText"], &source, line_no)?,
            arg2: string_field(&v, &["Arg2", "RawText"], &source, line_no)?,
            senses: collect_senses(senses),
            relation_type: string_field(&v, &["Type"], &source, line_no)?,
            split: None,
        };
        out.push(
            RelationInstance::from_record(record, TokenizerOptions::default())
                .map_err(|e| Error::format(&source, line_no, e.to_string()))?,
        );
    }
    Ok(out)
}
