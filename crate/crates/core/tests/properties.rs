use std::collections::HashMap;

use proptest::prelude::*;

use discrel::classifier::{argmax, BilstmBlock, FeatureSources, InputPlan, ModelSpec, RelationModel};
use discrel::corpus::{
    build_inventory, expand_multilabel, read_relations, split_by_sections, write_relations, LoadOptions,
    RelationInstance, RelationRecord, SenseInventory, Split, TokenizerOptions,
};
use discrel::encoder::{EmbeddingTable, Pooling};
use discrel::eval::{evaluate, most_common_class, SensePredictor};
use discrel::features::{word_pair_features, BrownClusterMap};
use discrel::kernel::{dropout, softmax, softmax_nll};
use discrel::pretrained::{argument_id, sent2vec_compose, ArgSlot, NgramTable, SentenceVectorStore};
use discrel::{Rng, TokenSequence};

const WORDS: [&str; 8] = ["alpha", "beta", "gamma", "delta", "eps", "zeta", "eta", "theta"];

fn record(id: String, doc: &str, arg1: String, arg2: String, senses: Vec<String>) -> RelationRecord {
    RelationRecord {
        id,
        doc_id: doc.into(),
        arg1,
        arg2,
        senses,
        relation_type: "Implicit".into(),
        split: None,
    }
}

fn sentence() -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(WORDS.to_vec()), 1..6).prop_map(|w| w.join(" "))
}

/// Instances with one or two distinct senses drawn from `S.0`..`S.{k-1}`.
fn corpus(k: usize) -> impl Strategy<Value = Vec<RelationInstance>> {
    prop::collection::vec((sentence(), sentence(), 0..k, prop::option::of(1..k)), 1..25).prop_map(move |rows| {
        rows.into_iter()
            .enumerate()
            .map(|(i, (a1, a2, first, second))| {
                let mut senses = vec![format!("S.{first}")];
                if let Some(off) = second {
                    senses.push(format!("S.{}", (first + off) % k));
                }
                RelationInstance::from_record(
                    record(format!("wsj_2100:{i}"), "wsj_2100", a1, a2, senses),
                    TokenizerOptions::default(),
                )
                .unwrap()
            })
            .collect()
    })
}

struct ByFirstToken(SenseInventory);

impl SensePredictor for ByFirstToken {
    fn inventory(&self) -> &SenseInventory {
        &self.0
    }

    fn predict_index(&self, inst: &RelationInstance) -> discrel::Result<usize> {
        Ok(inst.arg1_tokens[0].len() % self.0.len())
    }
}

proptest! {
    #[test]
    fn softmax_is_a_distribution(logits in prop::collection::vec(-50.0f64..50.0, 1..10), gold in 0usize..10) {
        let p = softmax(&logits);
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(p.iter().all(|&x| (0.0..=1.0).contains(&x)));
        let gold = gold % logits.len();
        let (loss, grad) = softmax_nll(&logits, gold).unwrap();
        prop_assert!(loss >= 0.0 && loss.is_finite());
        prop_assert!(grad.iter().sum::<f64>().abs() < 1e-12);
    }

    #[test]
    fn argmax_survives_monotone_maps(raw in prop::collection::vec(-1000i32..1000, 1..12)) {
        let logits: Vec<f64> = raw.iter().map(|&r| r as f64 / 64.0).collect();
        let scaled: Vec<f64> = logits.iter().map(|x| 2.0 * x - 7.0).collect();
        let cubed: Vec<f64> = logits.iter().map(|x| x * x * x).collect();
        prop_assert_eq!(argmax(&logits), argmax(&scaled));
        prop_assert_eq!(argmax(&logits), argmax(&cubed));
    }

    #[test]
    fn accuracy_ignores_order(data in corpus(4), seed in any::<u64>()) {
        let inv = SenseInventory::new((0..4).map(|i| format!("S.{i}")).collect()).unwrap();
        let p = ByFirstToken(inv);
        let a = evaluate(&p, &data).unwrap();
        let mut shuffled = data.clone();
        Rng::new(seed).shuffle(&mut shuffled);
        let b = evaluate(&p, &shuffled).unwrap();
        prop_assert_eq!(a.accuracy, b.accuracy);
        prop_assert_eq!(a.per_sense, b.per_sense);
        prop_assert_eq!(a.correct, (a.accuracy * a.total as f64).round() as usize);
    }

    #[test]
    fn single_sense_credit_is_exact_match(data in corpus(3)) {
        let single: Vec<RelationInstance> = data.into_iter().filter(|i| i.senses.len() == 1).collect();
        prop_assume!(!single.is_empty());
        let inv = SenseInventory::new((0..3).map(|i| format!("S.{i}")).collect()).unwrap();
        let p = ByFirstToken(inv);
        let report = evaluate(&p, &single).unwrap();
        let exact = single
            .iter()
            .filter(|i| p.inventory().label(p.predict_index(i).unwrap()) == i.senses[0])
            .count();
        prop_assert_eq!(report.correct, exact);
    }

    #[test]
    fn expansion_adds_one_pair_per_second_sense(data in corpus(5)) {
        let inv = build_inventory(&data).unwrap();
        let k = data.iter().filter(|i| i.senses.len() == 2).count();
        prop_assert_eq!(expand_multilabel(&data, &inv).unwrap().len(), data.len() + k);
    }

    #[test]
    fn majority_accuracy_is_majority_frequency(data in corpus(3)) {
        let single: Vec<RelationInstance> = data.into_iter().filter(|i| i.senses.len() == 1).collect();
        prop_assume!(!single.is_empty());
        let inv = build_inventory(&single).unwrap();
        let pairs = expand_multilabel(&single, &inv).unwrap();
        let m = most_common_class(&pairs, &inv).unwrap();
        let mut counts: HashMap<&str, usize> = HashMap::new();
        for i in &single {
            *counts.entry(i.senses[0].as_str()).or_default() += 1;
        }
        let top = *counts.values().max().unwrap();
        let acc = evaluate(&m, &single).unwrap().accuracy;
        prop_assert_eq!(acc, top as f64 / single.len() as f64);
        prop_assert_eq!(counts[m.sense()], top);
    }

    #[test]
    fn sections_map_to_splits(doc in 0u32..2500) {
        let doc_id = format!("wsj_{doc:04}");
        let inst = RelationInstance::from_record(
            record(format!("{doc_id}:1"), &doc_id, "a".into(), "b".into(), vec!["S.0".into()]),
            TokenizerOptions::default(),
        ).unwrap();
        let split = split_by_sections(vec![inst]).unwrap();
        let expected = match doc / 100 {
            0..=1 => Some(Split::Dev),
            2..=20 => Some(Split::Train),
            21..=22 => Some(Split::Test),
            _ => None,
        };
        match expected {
            Some(s) => prop_assert_eq!(split.get(s).len(), 1),
            None => prop_assert_eq!(split.excluded, 1),
        }
    }

    #[test]
    fn composition_stays_in_the_hull(
        vectors in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 3), WORDS.len()),
        tokens in prop::collection::vec(0usize..WORDS.len(), 1..8),
    ) {
        let mut table = NgramTable::new(3).unwrap();
        for (w, v) in WORDS.iter().zip(&vectors) {
            table.insert_unigram(*w, v.clone()).unwrap();
        }
        let seq: TokenSequence = tokens.iter().map(|&t| WORDS[t]).collect();
        let rep = sent2vec_compose(&seq, &table).unwrap();
        for d in 0..3 {
            let lo = tokens.iter().map(|&t| vectors[t][d]).fold(f64::INFINITY, f64::min);
            let hi = tokens.iter().map(|&t| vectors[t][d]).fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(rep.values[d] >= lo - 1e-12 && rep.values[d] <= hi + 1e-12);
        }
        // Without bigrams, order does not matter.
        let mut reversed = tokens.clone();
        reversed.reverse();
        let rev: TokenSequence = reversed.iter().map(|&t| WORDS[t]).collect();
        let other = sent2vec_compose(&rev, &table).unwrap();
        for (a, b) in rep.values.iter().zip(&other.values) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn word_pairs_stay_in_range(a1 in sentence(), a2 in sentence(), dim in 1usize..5000) {
        let mut clusters = BrownClusterMap::new();
        for (i, w) in WORDS.iter().enumerate().take(5) {
            clusters.insert(*w, format!("{:b}", i + 1)).unwrap();
        }
        let s1: TokenSequence = a1.split(' ').collect();
        let s2: TokenSequence = a2.split(' ').collect();
        let f = word_pair_features(&s1, &s2, &clusters, dim).unwrap();
        let distinct = |s: &TokenSequence| s.iter().map(|t| clusters.cluster(t)).collect::<std::collections::BTreeSet<_>>().len();
        prop_assert!(f.active_indices().all(|i| i < dim));
        prop_assert!(f.nnz() >= 1 && f.nnz() <= distinct(&s1) * distinct(&s2));
    }

    #[test]
    fn dropout_keeps_or_rescales(x in prop::collection::vec(-3.0f64..3.0, 1..50), rate in 0.0f64..0.9, seed in any::<u64>()) {
        let mut rng = Rng::new(seed);
        let (same, _) = dropout(&x, rate, &mut rng, false).unwrap();
        prop_assert_eq!(&same, &x);
        let (y, _) = dropout(&x, rate, &mut rng, true).unwrap();
        for (a, b) in x.iter().zip(&y) {
            prop_assert!(*b == 0.0 || (b - a / (1.0 - rate)).abs() < 1e-12);
        }
    }

    #[test]
    fn vector_store_round_trip(rows in prop::collection::vec(prop::collection::vec(any::<f32>().prop_filter("finite", |x| x.is_finite()), 4), 1..20)) {
        let mut store = SentenceVectorStore::<f32>::new(4, "mem").unwrap();
        for (i, v) in rows.iter().enumerate() {
            store.insert(argument_id(&format!("wsj_0100:{i}"), ArgSlot::Arg2), v.clone()).unwrap();
        }
        let mut buf = Vec::new();
        store.write(&mut buf).unwrap();
        let back = SentenceVectorStore::<f32>::read(buf.as_slice(), "mem", "mem").unwrap();
        prop_assert_eq!(back, store);
    }

    #[test]
    fn jsonl_round_trip(args in prop::collection::vec(("[ -~]{0,20}[a-z]", "\\PC{1,12}"), 1..10)) {
        let instances: Vec<RelationInstance> = args
            .into_iter()
            .enumerate()
            .filter_map(|(i, (a1, a2))| {
                RelationInstance::from_record(
                    record(format!("wsj_0500:{i}"), "wsj_0500", a1, a2, vec!["Temporal.Synchrony".into()]),
                    TokenizerOptions::default(),
                ).ok()
            })
            .collect();
        let mut buf = Vec::new();
        write_relations(&mut buf, &instances).unwrap();
        let back = read_relations(buf.as_slice(), "mem", LoadOptions::all_types()).unwrap();
        prop_assert_eq!(back, instances);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn input_width_matches_plan(
        data in corpus(3),
        hidden in 1usize..5,
        use_lstm in any::<bool>(),
        use_vectors in any::<bool>(),
        pairs in prop::option::of(1usize..64),
        pooling in prop::sample::select(vec![Pooling::Concat, Pooling::Max, Pooling::Mean]),
    ) {
        prop_assume!(use_lstm || use_vectors || pairs.is_some());
        let mut rng = Rng::new(hidden as u64);
        let mut glove = EmbeddingTable::<f64>::new(3).unwrap();
        let mut clusters = BrownClusterMap::new();
        for (i, w) in WORDS.iter().enumerate() {
            glove.insert(*w, &[rng.unit(), rng.unit(), rng.unit()]).unwrap();
            clusters.insert(*w, format!("{:b}", i % 3)).unwrap();
        }
        let mut store = SentenceVectorStore::<f64>::new(2, "v").unwrap();
        for inst in &data {
            for slot in [ArgSlot::Arg1, ArgSlot::Arg2] {
                store.insert(argument_id(&inst.id, slot), vec![rng.unit(), rng.unit()]).unwrap();
            }
        }
        let plan = InputPlan {
            bilstm: use_lstm.then_some(BilstmBlock { pooling, hidden_dim: hidden }),
            pretrained: use_vectors.then_some(2),
            word_pairs: pairs,
        };
        let inv = build_inventory(&data).unwrap();
        let spec = ModelSpec::new(plan, Some(3), plan.kind().default_head_layers(), Some(4), inv.clone()).unwrap();
        let model = RelationModel::<f64>::new(spec, &mut rng).unwrap();
        let sources = FeatureSources { embeddings: Some(&glove), vectors: Some(&store), clusters: Some(&clusters) };
        for inst in &data {
            prop_assert_eq!(model.build_input(inst, &sources).unwrap().len(), plan.input_dimension());
            let a = model.forward(inst, &sources, false, &mut Rng::new(1)).unwrap();
            let b = model.forward(inst, &sources, false, &mut Rng::new(2)).unwrap();
            prop_assert_eq!(a.len(), inv.len());
            prop_assert!(a.iter().all(|x| x.is_finite()));
            prop_assert_eq!(a, b);
        }
    }
}
