//! Composes sentence vectors from unigram and bigram tables and reads a vector store.

use std::io::Cursor;

use discrel::pretrained::{sent2vec_compose, NgramTable, SentenceVectorStore};
use discrel::TokenSequence;

fn main() -> discrel::Result<()> {
    let table = NgramTable::<f64>::read(Cursor::new("2 1 2\na 1 0\nb 0 1\na_b 1 1\n"), "inline")?;
    let seq: TokenSequence = ["a", "b", "zzz"].into_iter().collect();
    let rep = sent2vec_compose(&seq, &table)?;
    println!("compose({seq}) = {:?}", rep.values);

    let store = SentenceVectorStore::<f64>::read(
        Cursor::new("2 3\nwsj_0201:0#arg1 1 0 0\nwsj_0201:0#arg2 0 1 0\n"),
        "inline",
        "infersent",
    )?;
    println!("{} vectors of dimension {} from {}", store.len(), store.dimension(), store.source_name());
    println!("arg2 -> {:?}", store.lookup("wsj_0201:0#arg2")?);
    match store.lookup("wsj_0201:1#arg1") {
        Err(e) => println!("absent id: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
