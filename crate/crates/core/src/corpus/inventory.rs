use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::corpus::RelationInstance;
use crate::error::{Error, Result};

/// Ordered sense labels with dense indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct SenseInventory {
    labels: Vec<String>,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl SenseInventory {
    pub fn new(labels: Vec<String>) -> Result<Self> {
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::invalid(format!("duplicate sense label `{l}`")));
            }
        }
        if labels.is_empty() {
            return Err(Error::invalid("sense inventory is empty"));
        }
        Ok(Self { labels, index })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }
}

impl TryFrom<Vec<String>> for SenseInventory {
    type Error = Error;

    fn try_from(labels: Vec<String>) -> Result<Self> {
        Self::new(labels)
    }
}

impl From<SenseInventory> for Vec<String> {
    fn from(inv: SenseInventory) -> Self {
        inv.labels
    }
}

/// Distinct labels of `instances`, sorted lexicographically.
pub fn build_inventory(instances: &[RelationInstance]) -> Result<SenseInventory> {
    if instances.is_empty() {
        return Err(Error::invalid("cannot build a sense inventory from no instances"));
    }
    let labels: BTreeSet<&str> = instances
        .iter()
        .flat_map(|i| i.senses.iter().map(String::as_str))
        .collect();
    SenseInventory::new(labels.into_iter().map(String::from).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{RelationRecord, TokenizerOptions};

    fn inst(sense: &str) -> RelationInstance {
        RelationInstance::from_record(
            RelationRecord {
                id: "x".into(),
                doc_id: "wsj_0200".into(),
                arg1: "a".into(),
                arg2: "b".into(),
                senses: vec![sense.into()],
                relation_type: "Implicit".into(),
                split: None,
            },
            TokenizerOptions::default(),
        )
        .unwrap()
    }

    #[test]
    fn sorted_and_dense() {
        let inv = build_inventory(&[inst("B"), inst("A"), inst("B")]).unwrap();
        assert_eq!(inv.labels(), &["A", "B"]);
        assert_eq!(inv.index_of("A"), Some(0));
        assert_eq!(inv.index_of("B"), Some(1));
        assert_eq!(inv.index_of("C"), None);
    }

    #[test]
    fn empty_input() {
        assert!(matches!(build_inventory(&[]), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn serde_round_trip() {
        let inv = SenseInventory::new(vec!["X.Y".into(), "A.B".into()]).unwrap();
        let json = serde_json::to_string(&inv).unwrap();
        assert_eq!(json, r#"["X.Y","A.B"]"#);
        let back: SenseInventory = serde_json::from_str(&json).unwrap();
        assert_eq!(back, inv);
        assert_eq!(back.index_of("A.B"), Some(1));
        assert!(serde_json::from_str::<SenseInventory>(r#"["A","A"]"#).is_err());
    }
}
