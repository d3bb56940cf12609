//! Word-pair Brown-cluster features hashed into a fixed-width binary vector.
//!
//! Cluster files use the usual `<bitstring>\t<token>\t<frequency>` layout, one token per
//! line; the frequency column is optional and ignored.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use indexmap::IndexMap;

use crate::error::{display_name, Error, Result};
use crate::tokens::TokenSequence;

/// Default hashed feature width, 2^15.
pub const DEFAULT_WORD_PAIR_DIM: usize = 1 << 15;

/// Cluster id given to tokens missing from the map.
pub const UNKNOWN_CLUSTER: &str = "UNK";

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// 64-bit FNV-1a over the UTF-8 bytes of `key`.
pub fn hash64(key: &str) -> u64 {
    key.bytes()
        .fold(FNV_OFFSET, |h, b| (h ^ u64::from(b)).wrapping_mul(FNV_PRIME))
}

fn valid_cluster_id(id: &str) -> bool {
    id == UNKNOWN_CLUSTER || (!id.is_empty() && id.bytes().all(|b| b == b'0' || b == b'1'))
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BrownClusterMap {
    entries: IndexMap<String, String>,
}

impl BrownClusterMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn insert(&mut self, token: impl Into<String>, cluster: impl Into<String>) -> Result<()> {
        let cluster = cluster.into();
        if !valid_cluster_id(&cluster) {
            return Err(Error::invalid(format!("`{cluster}` is not a bit-string cluster id")));
        }
        self.entries.insert(token.into(), cluster);
        Ok(())
    }

    /// Cluster of `token`, or `"UNK"`.
    pub fn cluster(&self, token: &str) -> &str {
        self.entries.get(token).map_or(UNKNOWN_CLUSTER, String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(t, c)| (t.as_str(), c.as_str()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::read(BufReader::new(File::open(path)?), &display_name(path))
    }

    pub fn read<R: BufRead>(reader: R, source: &str) -> Result<Self> {
        let mut map = Self::new();
        for (n, line) in reader.lines().enumerate() {
            let line_no = n + 1;
            let line = line?;
            let line = line.strip_suffix('\r').unwrap_or(&line);
            let fields: Vec<&str> = line.split('\t').collect();
            if !(2..=3).contains(&fields.len()) {
                return Err(Error::format(
                    source,
                    line_no,
                    format!("expected `<bitstring>\\t<token>[\\t<frequency>]`, got {} fields", fields.len()),
                ));
            }
            let (cluster, token) = (fields[0], fields[1]);
            if !valid_cluster_id(cluster) {
                return Err(Error::format(source, line_no, format!("`{cluster}` is not a bit string")));
            }
            if token.is_empty() {
                return Err(Error::format(source, line_no, "empty token"));
            }
            if map.entries.contains_key(token) {
                return Err(Error::format(source, line_no, format!("token `{token}` listed twice")));
            }
            map.entries.insert(token.to_string(), cluster.to_string());
        }
        Ok(map)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        for (token, cluster) in &self.entries {
            writeln!(w, "{cluster}\t{token}")?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Binary sparse vector: the set of active indices below `dimension`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseFeatureVector {
    dimension: usize,
    active: BTreeSet<usize>,
}

impl SparseFeatureVector {
    pub fn new(dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::invalid("feature dimension must be positive"));
        }
        Ok(Self {
            dimension,
            active: BTreeSet::new(),
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn activate(&mut self, index: usize) -> Result<()> {
        if index >= self.dimension {
            return Err(Error::invalid(format!("index {index} outside dimension {}", self.dimension)));
        }
        self.active.insert(index);
        Ok(())
    }

    /// Active indices in increasing order.
    pub fn active_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.active.iter().copied()
    }

    pub fn nnz(&self) -> usize {
        self.active.len()
    }

    /// Writes ones at the active indices of `out`, which must have length `dimension`.
    pub fn fill_dense<T: num_traits::Float>(&self, out: &mut [T]) {
        assert_eq!(out.len(), self.dimension);
        out.iter_mut().for_each(|v| *v = T::zero());
        for &i in &self.active {
            out[i] = T::one();
        }
    }
}

/// Activates `hash64(c(t1) + "|" + c(t2)) mod dimension` for every `t1 ∈ arg1`, `t2 ∈ arg2`.
pub fn word_pair_features(
    arg1: &TokenSequence,
    arg2: &TokenSequence,
    clusters: &BrownClusterMap,
    dimension: usize,
) -> Result<SparseFeatureVector> {
    let mut out = SparseFeatureVector::new(dimension)?;
    let left: BTreeSet<&str> = arg1.iter().map(|t| clusters.cluster(t)).collect();
    let right: BTreeSet<&str> = arg2.iter().map(|t| clusters.cluster(t)).collect();
    let mut key = String::new();
    for c1 in &left {
        for c2 in &right {
            key.clear();
            key.push_str(c1);
            key.push('|');
            key.push_str(c2);
            out.active.insert((hash64(&key) % dimension as u64) as usize);
        }
    }
    Ok(out)
}
