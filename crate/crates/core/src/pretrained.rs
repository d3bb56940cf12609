//! Precomputed sentence vectors and native Sent2Vec-style composition.
//!
//! Vector file: a `<count> <dimension>` header line, then exactly `count` lines
//! `<id> <f1> … <fdim>`. N-gram table: a `<unigrams> <bigrams> <dimension>` header, the
//! unigram lines, then the bigram lines, where a bigram id is `left_right`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use indexmap::IndexMap;

use crate::corpus::RelationInstance;
use crate::encoder::{Provenance, SentenceRepresentation};
use crate::error::{display_name, Error, Result};
use crate::kernel::Scalar;
use crate::tokens::TokenSequence;

/// Sentence-vector id for one argument of a relation.
pub fn argument_id(relation_id: &str, slot: ArgSlot) -> String {
    match slot {
        ArgSlot::Arg1 => format!("{relation_id}#arg1"),
        ArgSlot::Arg2 => format!("{relation_id}#arg2"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArgSlot {
    Arg1,
    Arg2,
}

fn parse_header(line: &str, fields: usize, source: &str) -> Result<Vec<usize>> {
    let parts: Vec<&str> = line.split(' ').collect();
    if parts.len() != fields {
        return Err(Error::format(
            source,
            1,
            format!("header must hold {fields} space-separated integers, got `{line}`"),
        ));
    }
    parts
        .iter()
        .map(|p| {
            p.parse::<usize>()
                .map_err(|_| Error::format(source, 1, format!("`{p}` is not a non-negative integer")))
        })
        .collect()
}

fn parse_entry<T: Scalar>(line: &str, dimension: usize, source: &str, line_no: usize) -> Result<(String, Vec<T>)> {
    let mut fields = line.split(' ');
    let id = fields.next().unwrap_or_default();
    if id.is_empty() {
        return Err(Error::format(source, line_no, "missing id"));
    }
    let values = fields
        .map(|f| {
            f.parse::<f64>()
                .map(T::from_real)
                .map_err(|_| Error::format(source, line_no, format!("`{f}` is not a number")))
        })
        .collect::<Result<Vec<T>>>()?;
    if values.len() != dimension {
        return Err(Error::format(
            source,
            line_no,
            format!("expected {dimension} values, found {}", values.len()),
        ));
    }
    Ok((id.to_string(), values))
}

fn write_entry<T: Scalar, W: Write>(w: &mut W, id: &str, values: &[T]) -> Result<()> {
    write!(w, "{id}")?;
    for v in values {
        write!(w, " {v}")?;
    }
    writeln!(w)?;
    Ok(())
}

fn read_body<T: Scalar>(
    lines: &mut impl Iterator<Item = std::io::Result<String>>,
    count: usize,
    dimension: usize,
    source: &str,
    first_line: usize,
    into: &mut IndexMap<String, Vec<T>>,
) -> Result<()> {
    for k in 0..count {
        let line_no = first_line + k;
        let line = lines
            .next()
            .ok_or_else(|| Error::format(source, line_no, format!("expected {count} entries, file ended early")))??;
        let (id, values) = parse_entry(&line, dimension, source, line_no)?;
        if into.contains_key(&id) {
            return Err(Error::format(source, line_no, format!("duplicate id `{id}`")));
        }
        into.insert(id, values);
    }
    Ok(())
}

fn expect_end(lines: &mut impl Iterator<Item = std::io::Result<String>>, source: &str, line_no: usize) -> Result<()> {
    match lines.next() {
        None => Ok(()),
        Some(line) => {
            let line = line?;
            Err(Error::format(source, line_no, format!("unexpected line beyond header count: `{line}`")))
        }
    }
}

/// Immutable id → vector map loaded from an exported file.
#[derive(Debug, Clone, PartialEq)]
pub struct SentenceVectorStore<T> {
    dimension: usize,
    entries: IndexMap<String, Vec<T>>,
    source_name: String,
}

impl<T: Scalar> SentenceVectorStore<T> {
    pub fn new(dimension: usize, source_name: impl Into<String>) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::invalid("vector dimension must be positive"));
        }
        Ok(Self {
            dimension,
            entries: IndexMap::new(),
            source_name: source_name.into(),
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn source_name(&self) -> &str {
        &self.source_name
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn insert(&mut self, id: impl Into<String>, vector: Vec<T>) -> Result<()> {
        let id = id.into();
        if id.is_empty() || id.chars().any(char::is_whitespace) {
            return Err(Error::invalid(format!("vector id `{id}` must be non-empty without whitespace")));
        }
        if vector.len() != self.dimension {
            return Err(Error::shape("sentence vector", &[self.dimension], &[vector.len()]));
        }
        if self.entries.contains_key(&id) {
            return Err(Error::invalid(format!("duplicate vector id `{id}`")));
        }
        self.entries.insert(id, vector);
        Ok(())
    }

    /// The stored vector. A missing id is an error, never a default.
    pub fn lookup(&self, id: &str) -> Result<&[T]> {
        self.entries
            .get(id)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::MissingId(id.to_string()))
    }

    pub fn load_vector_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        Self::read(BufReader::new(File::open(path)?), &display_name(path), name)
    }

    pub fn read<R: BufRead>(reader: R, source: &str, source_name: impl Into<String>) -> Result<Self> {
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::format(source, 1, "missing header"))??;
        let h = parse_header(&header, 2, source)?;
        let (count, dimension) = (h[0], h[1]);
        if dimension == 0 {
            return Err(Error::format(source, 1, "dimension must be positive"));
        }
        let mut store = Self::new(dimension, source_name)?;
        read_body(&mut lines, count, dimension, source, 2, &mut store.entries)?;
        expect_end(&mut lines, source, count + 2)?;
        Ok(store)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn write<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "{} {}", self.entries.len(), self.dimension)?;
        for (id, v) in &self.entries {
            write_entry(w, id, v)?;
        }
        Ok(())
    }
}

/// Unigram and bigram embeddings for Sent2Vec-style composition.
#[derive(Debug, Clone, PartialEq)]
pub struct NgramTable<T> {
    dimension: usize,
    unigrams: IndexMap<String, Vec<T>>,
    bigrams: IndexMap<String, Vec<T>>,
}

fn bigram_key(left: &str, right: &str) -> String {
    format!("{left}_{right}")
}

impl<T: Scalar> NgramTable<T> {
    pub fn new(dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::invalid("n-gram dimension must be positive"));
        }
        Ok(Self {
            dimension,
            unigrams: IndexMap::new(),
            bigrams: IndexMap::new(),
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn unigram_count(&self) -> usize {
        self.unigrams.len()
    }

    pub fn bigram_count(&self) -> usize {
        self.bigrams.len()
    }

    pub fn insert_unigram(&mut self, token: impl Into<String>, v: Vec<T>) -> Result<()> {
        if v.len() != self.dimension {
            return Err(Error::shape("unigram vector", &[self.dimension], &[v.len()]));
        }
        self.unigrams.insert(token.into(), v);
        Ok(())
    }

    pub fn insert_bigram(&mut self, left: &str, right: &str, v: Vec<T>) -> Result<()> {
        if v.len() != self.dimension {
            return Err(Error::shape("bigram vector", &[self.dimension], &[v.len()]));
        }
        self.bigrams.insert(bigram_key(left, right), v);
        Ok(())
    }

    pub fn unigram(&self, token: &str) -> Option<&[T]> {
        self.unigrams.get(token).map(Vec::as_slice)
    }

    pub fn bigram(&self, left: &str, right: &str) -> Option<&[T]> {
        self.bigrams.get(&bigram_key(left, right)).map(Vec::as_slice)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::read(BufReader::new(File::open(path)?), &display_name(path))
    }

    pub fn read<R: BufRead>(reader: R, source: &str) -> Result<Self> {
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::format(source, 1, "missing header"))??;
        let h = parse_header(&header, 3, source)?;
        let (n_uni, n_bi, dimension) = (h[0], h[1], h[2]);
        if dimension == 0 {
            return Err(Error::format(source, 1, "dimension must be positive"));
        }
        let mut table = Self::new(dimension)?;
        read_body(&mut lines, n_uni, dimension, source, 2, &mut table.unigrams)?;
        read_body(&mut lines, n_bi, dimension, source, 2 + n_uni, &mut table.bigrams)?;
        expect_end(&mut lines, source, 2 + n_uni + n_bi)?;
        Ok(table)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        writeln!(w, "{} {} {}", self.unigrams.len(), self.bigrams.len(), self.dimension)?;
        for (id, v) in self.unigrams.iter().chain(&self.bigrams) {
            write_entry(&mut w, id, v)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Mean of the unigram vectors of the tokens and the bigram vectors of adjacent pairs
/// found in `table`. Absent n-grams neither contribute nor count.
pub fn sent2vec_compose<T: Scalar>(seq: &TokenSequence, table: &NgramTable<T>) -> Result<SentenceRepresentation<T>> {
    if seq.is_empty() {
        return Err(Error::invalid("cannot compose an empty token sequence"));
    }
    let mut sum = vec![T::zero(); table.dimension()];
    let mut count = 0usize;
    let unigrams = seq.iter().filter_map(|t| table.unigram(t));
    let bigrams = seq.windows(2).filter_map(|w| table.bigram(&w[0], &w[1]));
    for v in unigrams.chain(bigrams) {
        for (s, &x) in sum.iter_mut().zip(v) {
            *s = *s + x;
        }
        count += 1;
    }
    if count == 0 {
        return Err(Error::EmptyComposition);
    }
    let n = T::from_real(count as f64);
    Ok(SentenceRepresentation {
        values: sum.into_iter().map(|s| s / n).collect(),
        provenance: Provenance::Pretrained,
    })
}

/// Store holding `sent2vec_compose` of both arguments of every instance, keyed by [`argument_id`].
pub fn compose_store<T: Scalar>(
    instances: &[RelationInstance],
    table: &NgramTable<T>,
    source_name: impl Into<String>,
) -> Result<SentenceVectorStore<T>> {
    let mut store = SentenceVectorStore::new(table.dimension(), source_name)?;
    for inst in instances {
        for (slot, seq) in [(ArgSlot::Arg1, &inst.arg1_tokens), (ArgSlot::Arg2, &inst.arg2_tokens)] {
            let id = argument_id(&inst.id, slot);
            let rep = sent2vec_compose(seq, table).map_err(|e| match e {
                Error::EmptyComposition => Error::invalid(format!("{id}: no n-gram of the argument is in the table")),
                other => other,
            })?;
            store.insert(id, rep.values)?;
        }
    }
    Ok(store)
}
