//! Relation corpora: the normalized JSONL format, tokenization, sense inventories,
//! section splits and importers.

mod import;
mod instance;
mod inventory;
mod split;
mod tokenize;

pub use import::{import, import_conll_json, import_pdtb_pipes, SourceFormat};
pub use instance::{
    load_relations, read_relations, save_relations, second_level, write_relations, LoadOptions, RelationInstance,
    RelationRecord, RelationType, Split,
};
pub use inventory::{build_inventory, SenseInventory};
pub use split::{expand_multilabel, section_split, split_by_sections, wsj_section, CorpusSplit, TrainingPair};
pub use tokenize::{tokenize, tokenize_with, TokenizerOptions};
