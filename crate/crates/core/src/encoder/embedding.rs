//! Frozen word-embedding table and the GloVe text format.
//!
//! GloVe files hold one token per line: `token v1 v2 … vd`, single-space separated.
//! The dimension is taken from the first line and enforced on every other line.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{display_name, Error, Result};
use crate::kernel::Scalar;
use crate::tokens::TokenSequence;

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable<T> {
    dimension: usize,
    tokens: Vec<String>,
    index: HashMap<String, usize>,
    data: Vec<T>,
    oov: Vec<T>,
}

impl<T: Scalar> EmbeddingTable<T> {
    /// Empty table whose out-of-vocabulary vector is all zeros.
    pub fn new(dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::invalid("embedding dimension must be positive"));
        }
        Ok(Self {
            dimension,
            tokens: Vec::new(),
            index: HashMap::new(),
            data: Vec::new(),
            oov: vec![T::zero(); dimension],
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Tokens in insertion order.
    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn oov_vector(&self) -> &[T] {
        &self.oov
    }

    pub fn set_oov_vector(&mut self, v: Vec<T>) -> Result<()> {
        if v.len() != self.dimension {
            return Err(Error::shape("oov vector", &[self.dimension], &[v.len()]));
        }
        self.oov = v;
        Ok(())
    }

    /// Adds or replaces the vector for `token`.
    pub fn insert(&mut self, token: impl Into<String>, vector: &[T]) -> Result<()> {
        if vector.len() != self.dimension {
            return Err(Error::shape("embedding vector", &[self.dimension], &[vector.len()]));
        }
        let token = token.into();
        match self.index.get(&token) {
            Some(&i) => {
                self.data[i * self.dimension..(i + 1) * self.dimension].copy_from_slice(vector)
            }
            None => {
                self.index.insert(token.clone(), self.tokens.len());
                self.tokens.push(token);
                self.data.extend_from_slice(vector);
            }
        }
        Ok(())
    }

    pub fn get(&self, token: &str) -> Option<&[T]> {
        self.index
            .get(token)
            .map(|&i| &self.data[i * self.dimension..(i + 1) * self.dimension])
    }

    /// The stored vector, or the OOV vector when absent.
    pub fn lookup(&self, token: &str) -> &[T] {
        self.get(token).unwrap_or(&self.oov)
    }

    /// One vector per token, in order.
    pub fn embed_tokens(&self, seq: &TokenSequence) -> Result<Vec<Vec<T>>> {
        if seq.is_empty() {
            return Err(Error::invalid("cannot embed an empty token sequence"));
        }
        Ok(seq.iter().map(|t| self.lookup(t).to_vec()).collect())
    }

    pub fn load_glove(path: impl AsRef<Path>) -> Result<Self> {
        Self::load_glove_filtered(path, None)
    }

    /// Loads a GloVe file keeping only tokens in `vocab` when given. Every line is still
    /// checked against the dimension. Repeated tokens keep their first vector.
    pub fn load_glove_filtered(path: impl AsRef<Path>, vocab: Option<&HashSet<String>>) -> Result<Self> {
        let path = path.as_ref();
        let reader = BufReader::new(File::open(path)?);
        Self::read_glove(reader, &display_name(path), vocab)
    }

    pub fn read_glove<R: BufRead>(reader: R, source: &str, vocab: Option<&HashSet<String>>) -> Result<Self> {
        let mut table: Option<Self> = None;
        let mut buf = Vec::new();
        for (n, line) in reader.lines().enumerate() {
            let line_no = n + 1;
            let line = line?;
            let line = line.strip_suffix('\r').unwrap_or(&line);
            let mut fields = line.split(' ');
            let token = fields.next().unwrap_or_default();
            if token.is_empty() {
                return Err(Error::format(source, line_no, "missing token"));
            }
            let keep = vocab.is_none_or(|v| v.contains(token));
            buf.clear();
            let mut count = 0;
            for field in fields {
                count += 1;
                if keep {
                    let v: f64 = field.parse().map_err(|_| {
                        Error::format(source, line_no, format!("`{field}` is not a number"))
                    })?;
                    buf.push(T::from_real(v));
                }
            }
            let table = match table.as_mut() {
                Some(t) => t,
                None => {
                    if count == 0 {
                        return Err(Error::format(source, line_no, "no vector components"));
                    }
                    table.insert(Self::new(count)?)
                }
            };
            if count != table.dimension {
                return Err(Error::format(
                    source,
                    line_no,
                    format!("expected {} components, found {count}", table.dimension),
                ));
            }
            if keep && !table.index.contains_key(token) {
                table.insert(token, &buf)?;
            }
        }
        table.ok_or_else(|| Error::format(source, 0, "empty embedding file"))
    }

    pub fn save_glove(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        for token in &self.tokens {
            write!(w, "{token}")?;
            for v in self.lookup(token) {
                write!(w, " {v}")?;
            }
            writeln!(w)?;
        }
        w.flush()?;
        Ok(())
    }
}
