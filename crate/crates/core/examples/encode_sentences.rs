//! Loads GloVe-format vectors and encodes a sentence with each pooling mode.

use std::io::Cursor;

use discrel::corpus::tokenize;
use discrel::encoder::{BiLstmEncoder, EmbeddingTable, LstmParams, Pooling};
use discrel::Rng;

const VECTORS: &str = "the 0.1 0.2 0.0\nfirms -0.3 0.5 0.1\nwere 0.0 -0.2 0.4\nready 0.6 0.1 -0.5\n";

fn main() -> discrel::Result<()> {
    let glove = EmbeddingTable::<f32>::read_glove(Cursor::new(VECTORS), "inline", None)?;
    let seq = tokenize("This time, the firms were ready.")?;
    println!("tokens: {seq}");
    let params = LstmParams::xavier(glove.dimension(), 4, 2, 1.0, &mut Rng::new(5))?;
    for pooling in [Pooling::Concat, Pooling::Max, Pooling::Mean] {
        let encoder = BiLstmEncoder::new(params.clone(), pooling);
        let rep = encoder.encode(&seq, &glove)?;
        let shown: Vec<String> = rep.values.iter().map(|x| format!("{x:+.3}")).collect();
        println!("{pooling:?} ({} dims): {}", rep.values.len(), shown.join(" "));
    }
    Ok(())
}
