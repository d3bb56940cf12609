//! Hashes Brown-cluster pairs across the two arguments into a sparse feature vector.

use std::io::Cursor;

use discrel::corpus::tokenize;
use discrel::features::{word_pair_features, BrownClusterMap};

const CLUSTERS: &str = "0010\tfirms\t120\n0011\tbrokerage\t40\n110\tready\t55\n1110\tlesson\t9\n";

fn main() -> discrel::Result<()> {
    let clusters = BrownClusterMap::read(Cursor::new(CLUSTERS), "inline")?;
    let arg1 = tokenize("The brokerage firms learned a lesson")?;
    let arg2 = tokenize("the firms were ready")?;
    for t in arg1.iter().chain(arg2.iter()) {
        println!("{t:>10} -> {}", clusters.cluster(t));
    }
    let features = word_pair_features(&arg1, &arg2, &clusters, 1 << 15)?;
    let active: Vec<usize> = features.active_indices().collect();
    println!("{} active of {}: {active:?}", features.nnz(), features.dimension());
    Ok(())
}
