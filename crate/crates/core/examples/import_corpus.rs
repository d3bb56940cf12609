//! Imports a CoNLL-style relations file, splits it by WSJ section and expands
//! double-sense training instances.

use discrel::corpus::{build_inventory, expand_multilabel, import, split_by_sections, SourceFormat};

const RELATIONS: &str = r#"{"ID": 1, "DocID": "wsj_0201", "Arg1": {"RawText": "The brokerage firms learned a lesson the last time around"}, "Arg2": {"RawText": "This time, the firms were ready"}, "Sense": ["Contingency.Cause.Result"], "Type": "Implicit"}
{"ID": 2, "DocID": "wsj_0305", "Arg1": {"RawText": "Prices rose"}, "Arg2": {"RawText": "volume fell"}, "Sense": ["Comparison.Contrast", "Expansion.Conjunction"], "Type": "Implicit"}
{"ID": 3, "DocID": "wsj_0012", "Arg1": {"RawText": "Sales slowed"}, "Arg2": {"RawText": "the company cut jobs"}, "Sense": ["Contingency.Cause.Reason"], "Type": "Implicit"}
{"ID": 4, "DocID": "wsj_2104", "Arg1": {"RawText": "Analysts were surprised"}, "Arg2": {"RawText": "earnings beat forecasts"}, "Sense": ["Contingency.Cause"], "Type": "Implicit"}
{"ID": 5, "DocID": "wsj_2301", "Arg1": {"RawText": "Trading halted"}, "Arg2": {"RawText": "because of the outage"}, "Sense": ["Contingency.Cause"], "Type": "Explicit"}
"#;

fn main() -> discrel::Result<()> {
    let dir = tempfile::tempdir()?;
    let path = dir.path().join("relations.json");
    std::fs::write(&path, RELATIONS)?;

    let instances = import(SourceFormat::ConllJson, &path, None)?;
    for i in &instances {
        println!("{:<12} {:<10} {:?} {}", i.id, i.relation_type.as_str(), i.senses, i.arg2_tokens);
    }
    let split = split_by_sections(instances)?;
    println!(
        "train {} dev {} test {} excluded {}",
        split.train.len(),
        split.dev.len(),
        split.test.len(),
        split.excluded
    );
    let inventory = build_inventory(&split.train)?;
    let pairs = expand_multilabel(&split.train, &inventory)?;
    println!("{} training instances expand to {} pairs", split.train.len(), pairs.len());
    Ok(())
}
