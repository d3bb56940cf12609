//! Scores a model and the most-common-class baseline with the either-sense rule, then
//! measures how much their errors overlap.

use discrel::classifier::{FeatureSources, InputPlan, ModelSpec, RelationModel};
use discrel::corpus::{build_inventory, expand_multilabel};
use discrel::eval::{error_overlap, evaluate, most_common_class, BoundModel};
use discrel::synthetic::{SyntheticCorpus, SyntheticSpec};
use discrel::train::{train, TrainConfig};
use discrel::Rng;

fn main() -> discrel::Result<()> {
    let corpus = SyntheticCorpus::generate(SyntheticSpec { double_sense: 6, ..SyntheticSpec::default() })?;
    let store = corpus.fake_encoder_store()?;
    let sources = FeatureSources { vectors: Some(&store), ..Default::default() };
    let inventory = build_inventory(&corpus.train)?;
    let pairs = expand_multilabel(&corpus.train, &inventory)?;
    println!("{} instances -> {} training pairs", corpus.train.len(), pairs.len());

    let plan = InputPlan { bilstm: None, pretrained: Some(store.dimension()), word_pairs: None };
    let spec = ModelSpec::new(plan, None, 4, Some(32), inventory.clone())?;
    let model = RelationModel::<f32>::new(spec, &mut Rng::new(1))?;
    let config = TrainConfig { max_epochs: 150, seed: 1, ..TrainConfig::default() };
    let (model, _) = train(model, &pairs, &corpus.dev, &sources, &config)?;

    let mlp = evaluate(&BoundModel::new(&model, sources), &corpus.test)?;
    let majority = most_common_class(&pairs, &inventory)?;
    let baseline = evaluate(&majority, &corpus.test)?;
    println!("model    accuracy {:.3}", mlp.accuracy);
    println!("baseline accuracy {:.3} (always {})", baseline.accuracy, majority.sense());

    let overlap = error_overlap(&mlp, &baseline)?;
    println!(
        "shared errors {} of {} (jaccard {:.3})",
        overlap.intersection, overlap.union, overlap.jaccard
    );
    let mut tsv = Vec::new();
    mlp.write_tsv(&mut tsv)?;
    print!("{}", String::from_utf8_lossy(&tsv).lines().take(4).collect::<Vec<_>>().join("\n"));
    println!();
    Ok(())
}
