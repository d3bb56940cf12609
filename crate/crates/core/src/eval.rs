//! Either-sense accuracy, the majority-class baseline and error-overlap analysis.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::classifier::{FeatureSources, RelationModel};
use crate::corpus::{RelationInstance, SenseInventory, TrainingPair};
use crate::error::{display_name, Error, Result};
use crate::kernel::Scalar;

/// Anything that assigns one sense index per instance.
pub trait SensePredictor {
    fn inventory(&self) -> &SenseInventory;

    fn predict_index(&self, instance: &RelationInstance) -> Result<usize>;
}

/// A model together with the resources its input blocks read.
pub struct BoundModel<'a, T> {
    model: &'a RelationModel<T>,
    sources: FeatureSources<'a, T>,
}

impl<'a, T: Scalar> BoundModel<'a, T> {
    pub fn new(model: &'a RelationModel<T>, sources: FeatureSources<'a, T>) -> Self {
        Self { model, sources }
    }
}

impl<T: Scalar> SensePredictor for BoundModel<'_, T> {
    fn inventory(&self) -> &SenseInventory {
        self.model.senses()
    }

    fn predict_index(&self, instance: &RelationInstance) -> Result<usize> {
        self.model.predict_index(instance, &self.sources)
    }
}

/// Constant classifier predicting the most frequent training sense.
#[derive(Debug, Clone, PartialEq)]
pub struct MajorityClassifier {
    inventory: SenseInventory,
    index: usize,
}

impl MajorityClassifier {
    pub fn sense(&self) -> &str {
        self.inventory.label(self.index)
    }

    pub fn index(&self) -> usize {
        self.index
    }
}

impl SensePredictor for MajorityClassifier {
    fn inventory(&self) -> &SenseInventory {
        &self.inventory
    }

    fn predict_index(&self, _: &RelationInstance) -> Result<usize> {
        Ok(self.index)
    }
}

/// Sense with the highest training-pair count; ties go to the lowest index.
pub fn most_common_class(train: &[TrainingPair<'_>], inventory: &SenseInventory) -> Result<MajorityClassifier> {
    if train.is_empty() {
        return Err(Error::invalid("most_common_class needs training pairs"));
    }
    let mut counts = vec![0usize; inventory.len()];
    for p in train {
        *counts
            .get_mut(p.gold)
            .ok_or_else(|| Error::invalid(format!("gold index {} outside inventory", p.gold)))? += 1;
    }
    let mut index = 0;
    for (i, &c) in counts.iter().enumerate() {
        if c > counts[index] {
            index = i;
        }
    }
    Ok(MajorityClassifier {
        inventory: inventory.clone(),
        index,
    })
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SenseCounts {
    /// Instances listing this sense among their gold senses.
    pub gold: usize,
    pub predicted: usize,
    /// Correct predictions of this sense.
    pub correct: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub id: String,
    pub gold: Vec<String>,
    pub predicted: String,
    pub correct: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub accuracy: f64,
    pub total: usize,
    pub correct: usize,
    pub per_sense: BTreeMap<String, SenseCounts>,
    /// Gold senses missing from the predictor's inventory.
    pub never_predictable: Vec<String>,
    #[serde(skip)]
    pub records: Vec<InstanceRecord>,
}

/// A prediction is correct when it is any of the instance's gold senses.
pub fn evaluate<P: SensePredictor + ?Sized>(predictor: &P, instances: &[RelationInstance]) -> Result<EvalReport> {
    if instances.is_empty() {
        return Err(Error::invalid("cannot evaluate on an empty set"));
    }
    let inventory = predictor.inventory();
    let mut per_sense: BTreeMap<String, SenseCounts> = BTreeMap::new();
    let mut never = BTreeSet::new();
    let mut records = Vec::with_capacity(instances.len());
    let mut correct_total = 0;
    for inst in instances {
        let predicted = inventory.label(predictor.predict_index(inst)?).to_string();
        let correct = inst.has_sense(&predicted);
        for g in &inst.senses {
            per_sense.entry(g.clone()).or_default().gold += 1;
            if inventory.index_of(g).is_none() {
                never.insert(g.clone());
            }
        }
        let entry = per_sense.entry(predicted.clone()).or_default();
        entry.predicted += 1;
        if correct {
            entry.correct += 1;
            correct_total += 1;
        }
        records.push(InstanceRecord {
            id: inst.id.clone(),
            gold: inst.senses.clone(),
            predicted,
            correct,
        });
    }
    Ok(EvalReport {
        accuracy: correct_total as f64 / instances.len() as f64,
        total: instances.len(),
        correct: correct_total,
        per_sense,
        never_predictable: never.into_iter().collect(),
        records,
    })
}

impl EvalReport {
    /// Rebuilds the summary from per-instance records.
    pub fn from_records(records: Vec<InstanceRecord>) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::invalid("report has no records"));
        }
        let mut per_sense: BTreeMap<String, SenseCounts> = BTreeMap::new();
        let mut correct = 0;
        for r in &records {
            for g in &r.gold {
                per_sense.entry(g.clone()).or_default().gold += 1;
            }
            let e = per_sense.entry(r.predicted.clone()).or_default();
            e.predicted += 1;
            if r.correct {
                e.correct += 1;
                correct += 1;
            }
        }
        Ok(Self {
            accuracy: correct as f64 / records.len() as f64,
            total: records.len(),
            correct,
            per_sense,
            never_predictable: Vec::new(),
            records,
        })
    }

    pub fn error_ids(&self) -> BTreeSet<&str> {
        self.records.iter().filter(|r| !r.correct).map(|r| r.id.as_str()).collect()
    }

    pub fn write_summary_json<W: Write>(&self, w: &mut W) -> Result<()> {
        serde_json::to_writer_pretty(&mut *w, self)?;
        writeln!(w)?;
        Ok(())
    }

    /// `id\tgold\tpredicted\tcorrect`; multiple gold senses are joined with `|`.
    pub fn write_tsv<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "id\tgold\tpredicted\tcorrect")?;
        for r in &self.records {
            writeln!(w, "{}\t{}\t{}\t{}", r.id, r.gold.join("|"), r.predicted, r.correct)?;
        }
        Ok(())
    }

    /// Writes `<stem>.json` and `<stem>.tsv` into `dir`.
    pub fn save(&self, dir: impl AsRef<Path>, stem: &str) -> Result<()> {
        let dir = dir.as_ref();
        let mut json = Vec::new();
        self.write_summary_json(&mut json)?;
        std::fs::write(dir.join(format!("{stem}.json")), json)?;
        let mut tsv = Vec::new();
        self.write_tsv(&mut tsv)?;
        std::fs::write(dir.join(format!("{stem}.tsv")), tsv)?;
        Ok(())
    }

    pub fn read_tsv<R: BufRead>(reader: R, source: &str) -> Result<Self> {
        let mut lines = reader.lines();
        match lines.next() {
            Some(Ok(h)) if h == "id\tgold\tpredicted\tcorrect" => {}
            _ => return Err(Error::format(source, 1, "expected the `id\\tgold\\tpredicted\\tcorrect` header")),
        }
        let mut records = Vec::new();
        for (n, line) in lines.enumerate() {
            let line_no = n + 2;
            let line = line?;
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() != 4 {
                return Err(Error::format(source, line_no, "expected 4 tab-separated fields"));
            }
            let correct = match f[3] {
                "true" => true,
                "false" => false,
                other => return Err(Error::format(source, line_no, format!("bad flag `{other}`"))),
            };
            records.push(InstanceRecord {
                id: f[0].to_string(),
                gold: f[1].split('|').map(String::from).collect(),
                predicted: f[2].to_string(),
                correct,
            });
        }
        Self::from_records(records)
    }

    pub fn load_tsv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::read_tsv(BufReader::new(File::open(path)?), &display_name(path))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapStats {
    pub errors_a: usize,
    pub errors_b: usize,
    pub intersection: usize,
    pub union: usize,
    /// `intersection / union`, defined as 1 when both error sets are empty.
    pub jaccard: f64,
    pub shared_error_ids: Vec<String>,
}

/// Compares the error sets of two reports over the same instances.
pub fn error_overlap(a: &EvalReport, b: &EvalReport) -> Result<OverlapStats> {
    let ids_a: HashSet<&str> = a.records.iter().map(|r| r.id.as_str()).collect();
    let ids_b: HashSet<&str> = b.records.iter().map(|r| r.id.as_str()).collect();
    if ids_a != ids_b || ids_a.len() != a.records.len() || ids_b.len() != b.records.len() {
        return Err(Error::invalid("reports cover different instance sets"));
    }
    let ea = a.error_ids();
    let eb = b.error_ids();
    let shared: Vec<String> = ea.intersection(&eb).map(|s| s.to_string()).collect();
    let union = ea.union(&eb).count();
    let jaccard = if union == 0 { 1.0 } else { shared.len() as f64 / union as f64 };
    Ok(OverlapStats {
        errors_a: ea.len(),
        errors_b: eb.len(),
        intersection: shared.len(),
        union,
        jaccard,
        shared_error_ids: shared,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{RelationRecord, TokenizerOptions};

    fn inst(id: &str, senses: &[&str]) -> RelationInstance {
        RelationInstance::from_record(
            RelationRecord {
                id: id.into(),
                doc_id: "wsj_2100".into(),
                arg1: "a".into(),
                arg2: "b".into(),
                senses: senses.iter().map(|s| s.to_string()).collect(),
                relation_type: "Implicit".into(),
                split: None,
            },
            TokenizerOptions::default(),
        )
        .unwrap()
    }

    struct Fixed(SenseInventory, Vec<usize>);

    impl SensePredictor for Fixed {
        fn inventory(&self) -> &SenseInventory {
            &self.0
        }
        fn predict_index(&self, i: &RelationInstance) -> Result<usize> {
            Ok(self.1[i.id.parse::<usize>().unwrap()])
        }
    }

    fn inv() -> SenseInventory {
        SenseInventory::new(vec!["A".into(), "B".into()]).unwrap()
    }

    #[test]
    fn either_sense_counts() {
        let p = Fixed(inv(), vec![0, 1]);
        let r = evaluate(&p, &[inst("0", &["A", "B"]), inst("1", &["A"])]).unwrap();
        assert!(r.records[0].correct);
        assert!(!r.records[1].correct);
        assert_eq!(r.accuracy, 0.5);
    }

    #[test]
    fn three_of_four() {
        let p = Fixed(inv(), vec![0, 0, 0, 1]);
        let data: Vec<_> = (0..4).map(|i| inst(&i.to_string(), &["A"])).collect();
        assert_eq!(evaluate(&p, &data).unwrap().accuracy, 0.75);
    }

    #[test]
    fn empty_test_set() {
        assert!(evaluate(&Fixed(inv(), vec![]), &[]).is_err());
    }

    #[test]
    fn never_predictable_flagged() {
        let p = Fixed(inv(), vec![0]);
        let r = evaluate(&p, &[inst("0", &["C"])]).unwrap();
        assert_eq!(r.never_predictable, vec!["C"]);
        assert_eq!(r.accuracy, 0.0);
    }

    #[test]
    fn majority_class() {
        let data = [inst("0", &["A"]), inst("1", &["A"]), inst("2", &["B"])];
        let pairs = crate::corpus::expand_multilabel(&data, &inv()).unwrap();
        let m = most_common_class(&pairs, &inv()).unwrap();
        assert_eq!(m.sense(), "A");
        let tie = crate::corpus::expand_multilabel(&data[1..], &inv()).unwrap();
        assert_eq!(most_common_class(&tie, &inv()).unwrap().sense(), "A");
        assert!(most_common_class(&[], &inv()).is_err());
    }

    fn report(errors: &[&str], all: &[&str]) -> EvalReport {
        EvalReport::from_records(
            all.iter()
                .map(|id| InstanceRecord {
                    id: id.to_string(),
                    gold: vec!["A".into()],
                    predicted: if errors.contains(id) { "B".into() } else { "A".into() },
                    correct: !errors.contains(id),
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn overlap_cases() {
        let all = ["1", "2", "3", "4"];
        let o = error_overlap(&report(&["1", "2"], &all), &report(&["2", "3"], &all)).unwrap();
        assert!((o.jaccard - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(o.shared_error_ids, vec!["2"]);
        let a = report(&["1"], &all);
        assert_eq!(error_overlap(&a, &a).unwrap().jaccard, 1.0);
        let none = report(&[], &all);
        assert_eq!(error_overlap(&none, &none).unwrap().jaccard, 1.0);
        assert_eq!(error_overlap(&report(&["1"], &all), &report(&["2"], &all)).unwrap().jaccard, 0.0);
    }

    #[test]
    fn overlap_requires_same_instances() {
        let a = report(&[], &["1", "2"]);
        let b = report(&[], &["1", "3"]);
        assert!(error_overlap(&a, &b).is_err());
    }

    #[test]
    fn tsv_round_trip() {
        let p = Fixed(inv(), vec![1, 0]);
        let r = evaluate(&p, &[inst("0", &["A", "B"]), inst("1", &["B"])]).unwrap();
        let mut buf = Vec::new();
        r.write_tsv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap(),
            "id\tgold\tpredicted\tcorrect\n0\tA|B\tB\ttrue\n1\tB\tA\tfalse\n"
        );
        let back = EvalReport::read_tsv(buf.as_slice(), "mem").unwrap();
        assert_eq!(back.records, r.records);
        assert_eq!(back.accuracy, r.accuracy);
    }
}
