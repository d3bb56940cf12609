//! Trains the three input plans on the synthetic corpus and round-trips the checkpoints.

use discrel::classifier::{load_checkpoint, save_checkpoint, BilstmBlock, FeatureSources, InputPlan, ModelSpec, RelationModel};
use discrel::corpus::{build_inventory, expand_multilabel};
use discrel::encoder::Pooling;
use discrel::eval::{evaluate, BoundModel};
use discrel::synthetic::{SyntheticCorpus, SyntheticSpec};
use discrel::train::{train, TrainConfig};
use discrel::Rng;

fn main() -> discrel::Result<()> {
    let corpus = SyntheticCorpus::generate(SyntheticSpec::default())?;
    let glove = corpus.glove()?;
    let store = corpus.fake_encoder_store()?;
    let sources = FeatureSources { embeddings: Some(&glove), vectors: Some(&store), clusters: None };
    let inventory = build_inventory(&corpus.train)?;
    let pairs = expand_multilabel(&corpus.train, &inventory)?;
    let bilstm = Some(BilstmBlock { pooling: Pooling::Concat, hidden_dim: 8 });
    let dir = tempfile::tempdir()?;

    for (name, plan) in [
        ("bilstm", InputPlan { bilstm, pretrained: None, word_pairs: None }),
        ("pretrained", InputPlan { bilstm: None, pretrained: Some(store.dimension()), word_pairs: None }),
        ("combined", InputPlan { bilstm, pretrained: Some(store.dimension()), word_pairs: None }),
    ] {
        let spec = ModelSpec::new(plan, Some(glove.dimension()), plan.kind().default_head_layers(), Some(32), inventory.clone())?;
        let model = RelationModel::<f32>::new(spec, &mut Rng::new(3))?;
        let config = TrainConfig { max_epochs: 40, patience: 40, seed: 3, ..TrainConfig::default() };
        let (model, history) = train(model, &pairs, &corpus.dev, &sources, &config)?;
        let train_acc = evaluate(&BoundModel::new(&model, sources), &corpus.train)?.accuracy;

        let path = dir.path().join(format!("{name}.ckpt"));
        save_checkpoint(&model, &path)?;
        let restored: RelationModel<f32> = load_checkpoint(&path)?;
        assert_eq!(restored, model);
        println!(
            "{name:<10} best epoch {:?} dev {:.3} train {train_acc:.3} checkpoint {} bytes",
            history.best_epoch,
            history.best_dev_accuracy().unwrap_or(0.0),
            std::fs::metadata(&path)?.len()
        );
    }
    Ok(())
}
