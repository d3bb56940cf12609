//! Section-based splits and the multi-label training expansion.

use std::collections::HashSet;

use crate::corpus::{RelationInstance, SenseInventory, Split};
use crate::error::{Error, Result};

/// Train/dev/test (plus blind) partition, disjoint by instance id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CorpusSplit {
    pub train: Vec<RelationInstance>,
    pub dev: Vec<RelationInstance>,
    pub test: Vec<RelationInstance>,
    pub blind: Vec<RelationInstance>,
    /// Instances dropped because their section belongs to no split.
    pub excluded: usize,
}

impl CorpusSplit {
    pub fn get(&self, split: Split) -> &[RelationInstance] {
        match split {
            Split::Train => &self.train,
            Split::Dev => &self.dev,
            Split::Test => &self.test,
            Split::Blind => &self.blind,
        }
    }

    fn push(&mut self, split: Split, inst: RelationInstance) {
        match split {
            Split::Train => self.train.push(inst),
            Split::Dev => self.dev.push(inst),
            Split::Test => self.test.push(inst),
            Split::Blind => self.blind.push(inst),
        }
    }
}

/// Two-digit WSJ section of a `wsj_SSNN` document id.
pub fn wsj_section(doc_id: &str) -> Result<u32> {
    let digits = doc_id
        .strip_prefix("wsj_")
        .filter(|d| d.len() == 4 && d.bytes().all(|b| b.is_ascii_digit()))
        .ok_or_else(|| Error::IdFormat(doc_id.to_string()))?;
    Ok(digits[..2].parse().expect("ascii digits"))
}

/// Sections 02–20 train, 00–01 dev, 21–22 test; anything else is excluded.
pub fn section_split(section: u32) -> Option<Split> {
    match section {
        0..=1 => Some(Split::Dev),
        2..=20 => Some(Split::Train),
        21..=22 => Some(Split::Test),
        _ => None,
    }
}

/// Partitions instances by WSJ section. An explicit `split` field takes precedence; ids that
/// are not `wsj_SSNN` must carry one.
pub fn split_by_sections(instances: Vec<RelationInstance>) -> Result<CorpusSplit> {
    let mut out = CorpusSplit::default();
    let mut seen = HashSet::new();
    for inst in instances {
        if !seen.insert(inst.id.clone()) {
            return Err(Error::invalid(format!("instance id `{}` appears twice", inst.id)));
        }
        let split = match inst.split {
            Some(s) => Some(s),
            None => section_split(wsj_section(&inst.doc_id)?),
        };
        match split {
            Some(s) => out.push(s, inst),
            None => out.excluded += 1,
        }
    }
    if out.excluded > 0 {
        log::warn!("{} instances fall outside the train/dev/test sections", out.excluded);
    }
    Ok(out)
}

/// One (instance, gold sense) training example.
#[derive(Debug, Clone, Copy)]
pub struct TrainingPair<'a> {
    pub instance: &'a RelationInstance,
    pub gold: usize,
}

/// An instance with `k` senses becomes `k` pairs with the same input, in order.
pub fn expand_multilabel<'a>(
    instances: &'a [RelationInstance],
    inventory: &SenseInventory,
) -> Result<Vec<TrainingPair<'a>>> {
    let mut pairs = Vec::with_capacity(instances.len());
    for inst in instances {
        for sense in &inst.senses {
            let gold = inventory
                .index_of(sense)
                .ok_or_else(|| Error::UnknownSense(sense.clone()))?;
            pairs.push(TrainingPair { instance: inst, gold });
        }
    }
    Ok(pairs)
}
