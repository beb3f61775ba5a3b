mod common;

use derivekit::dataset::DerivationSequence;
use derivekit::generator::audit;
use derivekit::{builtin_action_set, generate, GenConfig, Rendering, StateType};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn walks_replay_and_pass_the_audit(len in 3usize..30, branch in 0usize..4, seed in any::<u64>()) {
        let actions = builtin_action_set();
        let cfg = GenConfig::new(common::seeds(), len, [0.0, 0.1, 0.3, 1.0][branch], seed);
        let seq = generate(&cfg, &actions).unwrap();
        prop_assert_eq!(seq.len(), len);
        prop_assert_eq!(audit(&seq, &actions), vec![]);
        let states = seq.states().unwrap();
        for w in states[1..=len].windows(2) {
            prop_assert_ne!(&w[0], &w[1]);
        }
        prop_assert_eq!(seq.categorize()[0], StateType::Integrative);
    }

    #[test]
    fn tsv_and_csv_round_trip(len in 3usize..20, seed in any::<u64>(), csv in any::<bool>()) {
        let seq = generate(&GenConfig::new(common::seeds(), len, 0.2, seed), &builtin_action_set()).unwrap();
        let delimiter = if csv { b',' } else { b'\t' };
        let text = seq.to_text(delimiter);
        let back = DerivationSequence::read(text.as_bytes(), delimiter).unwrap();
        prop_assert_eq!(&back, &seq);
        prop_assert_eq!(back.to_text(delimiter), text);
    }
}

#[test]
fn save_and_load_are_byte_stable() {
    let seq = generate(&GenConfig::new(common::seeds(), 12, 0.3, 5), &builtin_action_set()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    for name in ["walk.tsv", "walk.csv"] {
        let path = dir.path().join(name);
        seq.save(&path).unwrap();
        let first = std::fs::read(&path).unwrap();
        let loaded = DerivationSequence::load(&path).unwrap();
        loaded.save(&path).unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), first);
        assert_eq!(loaded.state_strings(Rendering::Text).unwrap().len(), 14);
    }
}

#[test]
fn smallest_walk_is_one_reconstructable_unit() {
    use derivekit::search::{reconstruct, DerivationUnit};
    use derivekit::{KnowledgeBase, SearchConfig};
    let actions = builtin_action_set();
    for seed in 0..20 {
        let seq = generate(&GenConfig::new(common::seeds(), 3, 0.0, seed), &actions).unwrap();
        let states = seq.states().unwrap();
        // the unit hiding the middle record
        let kb = KnowledgeBase::build(&common::seeds(), &states[1..2], &states[1], &states[3]);
        let unit = DerivationUnit::new(states[1].clone(), states[3].clone());
        let r = reconstruct::<f64>(&unit, &actions, &kb, &SearchConfig::default()).unwrap();
        assert_eq!(r.path.distance, 0.0, "seed {seed}");
    }
}
