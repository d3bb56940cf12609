//! Compares backpropagated gradients of a Bi-LSTM relation model against central
//! finite differences in f64.

use discrel::classifier::{BilstmBlock, FeatureSources, InputPlan, ModelSpec, Objective, RelationModel};
use discrel::corpus::{RelationInstance, RelationRecord, SenseInventory, TokenizerOptions};
use discrel::encoder::{EmbeddingTable, Pooling};
use discrel::kernel::{finite_difference_check, softmax_nll, Parameterized};
use discrel::Rng;

fn main() -> discrel::Result<()> {
    let mut rng = Rng::new(11);
    let mut glove = EmbeddingTable::<f64>::new(4)?;
    for word in ["markets", "fell", "sharply", "investors", "sold"] {
        let v: Vec<f64> = (0..4).map(|_| rng.uniform(-1.0, 1.0)).collect();
        glove.insert(word, &v)?;
    }
    let instance = RelationInstance::from_record(
        RelationRecord {
            id: "wsj_0201:0".into(),
            doc_id: "wsj_0201".into(),
            arg1: "markets fell sharply".into(),
            arg2: "investors sold".into(),
            senses: vec!["Contingency.Cause".into()],
            relation_type: "Implicit".into(),
            split: None,
        },
        TokenizerOptions::default(),
    )?;
    let senses = SenseInventory::new(vec!["Contingency.Cause".into(), "Expansion.Conjunction".into()])?;
    let plan = InputPlan {
        bilstm: Some(BilstmBlock { pooling: Pooling::Concat, hidden_dim: 3 }),
        pretrained: None,
        word_pairs: None,
    };
    let mut spec = ModelSpec::new(plan, Some(4), 3, Some(5), senses)?;
    spec.dropout = 0.0;
    let mut model = RelationModel::<f64>::new(spec, &mut rng)?;
    let sources = FeatureSources { embeddings: Some(&glove), ..Default::default() };

    model.clear_grads();
    model.accumulate_gradient(&instance, 0, &sources, Objective::Nll, &mut rng)?;
    let analytic = model.flat_grads();
    let params = model.flat_values();

    let mut probe = model.clone();
    let error = finite_difference_check(
        |theta| {
            probe.assign_flat(theta);
            let logits = probe.forward(&instance, &sources, false, &mut Rng::new(0))?;
            Ok(softmax_nll(&logits, 0)?.0)
        },
        &params,
        &analytic,
        1e-5,
    )?;
    println!("{} parameters, max relative error {error:.3e}", params.len());
    assert!(error < 1e-4);
    Ok(())
}
