mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::entropy_oracle;
use slotentropy::entropy::{
    apply_inclusion, collect, downsample, entropy, entropy_of_counts, max_entropy, AlphaKey, SlotSample, Stage,
};
use slotentropy::extract::ConstructionKind;
use slotentropy::synth::{generate_synthetic_corpus, PerKind, SynthSpec};

#[test]
fn analytic_values() {
    let singletons = vec![1u64; 100];
    assert!((entropy_of_counts(singletons).unwrap() - 6.643856).abs() < 1e-6);
    assert_eq!(entropy_of_counts([100u64]).unwrap(), 0.0);
    assert_eq!(entropy_of_counts([2u64, 1, 1]).unwrap(), 1.5);
    assert!((max_entropy(100).unwrap() - 6.643856189774724).abs() < 1e-15);
}

#[test]
fn matches_compensated_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..1000 {
        let k = rng.random_range(1..=300);
        let counts: Vec<u64> = (0..k).map(|_| rng.random_range(1..=50)).collect();
        let h = entropy_of_counts(counts.iter().copied()).unwrap();
        let o = entropy_oracle(&counts);
        assert!((h - o).abs() <= 1e-12, "{h} vs {o} for {counts:?}");
    }
}

fn sample_from(counts: &[u64]) -> SlotSample {
    let mut s = SlotSample::new("p", ConstructionKind::Passive);
    for (i, &c) in counts.iter().enumerate() {
        for _ in 0..c {
            s.add(format!("a{i}"));
        }
    }
    s
}

proptest! {
    #[test]
    fn bounded_by_support(counts in prop::collection::vec(1u64..40, 1..60)) {
        let s = sample_from(&counts);
        let h = entropy(&s).unwrap();
        prop_assert!(h >= 0.0);
        prop_assert!(h <= (counts.len() as f64).log2() + 1e-12);
        prop_assert!(h <= max_entropy(s.total()).unwrap() + 1e-12);
    }

    #[test]
    fn invariant_under_relabelling(counts in prop::collection::vec(1u64..40, 1..60), seed in any::<u64>()) {
        let mut shuffled = counts.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in (1..shuffled.len()).rev() {
            shuffled.swap(i, rng.random_range(0..=i));
        }
        let a = entropy_of_counts(counts.iter().copied()).unwrap();
        let b = entropy_of_counts(shuffled.iter().copied()).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn downsample_draws_a_submultiset(counts in prop::collection::vec(1u64..30, 1..40), n in 1u64..200, seed in any::<u64>()) {
        let s = sample_from(&counts);
        match downsample(&s, n, seed) {
            Ok(d) => {
                prop_assert_eq!(d.total(), n);
                for (k, c) in &d.alphas {
                    prop_assert!(*c <= s.alphas[k]);
                }
                prop_assert_eq!(downsample(&s, n, seed).unwrap(), d);
            }
            Err(_) => prop_assert!(s.total() < n),
        }
    }
}

#[test]
fn downsample_all_returns_input() {
    let s = sample_from(&[40, 30, 20, 10]);
    assert_eq!(downsample(&s, 100, 5).unwrap().alphas, s.alphas);
}

#[test]
fn downsample_frozen_for_seed_42() {
    let s = sample_from(&[50, 40, 30, 20, 10, 5, 3, 2, 1, 1]);
    let d = downsample(&s, 20, 42).unwrap();
    let got: Vec<(String, u64)> = d.alphas.into_iter().collect();
    let want: Vec<(String, u64)> = FROZEN_42.iter().map(|(k, c)| (k.to_string(), *c)).collect();
    assert_eq!(got, want);
}

const FROZEN_42: [(&str, u64); 7] = [
    ("a0", 6),
    ("a1", 4),
    ("a2", 4),
    ("a3", 3),
    ("a4", 1),
    ("a5", 1),
    ("a6", 1),
];

#[test]
fn inclusion_boundaries() {
    let kinds = ConstructionKind::ALL;
    let mut raw = BTreeMap::new();
    let mut parsed = BTreeMap::new();
    for (p, totals) in [("kept", [100u64, 100, 100, 100]), ("cut", [120, 150, 99, 300])] {
        for (k, &t) in kinds.iter().zip(&totals) {
            raw.insert((p.to_string(), *k), 250u64);
            let mut s = SlotSample::new(p, *k);
            for i in 0..t {
                s.add(format!("a{}", i % 7));
            }
            parsed.insert((p.to_string(), *k), s);
        }
    }
    let r = apply_inclusion(&raw, &parsed, 200, 100);
    assert_eq!(r.included.iter().collect::<Vec<_>>(), vec!["kept"]);
    assert_eq!(r.excluded_at(Stage::Parsed), vec!["cut"]);
    assert!(r.excluded_at(Stage::Raw).is_empty());
}

/// A Zipf(2) cell against a uniform cell over the same vocabulary.
#[test]
fn zipf_cell_has_lower_entropy_than_uniform() {
    let mut lower = 0;
    for seed in 0..100u64 {
        let spec = SynthSpec {
            seed,
            n_participles: 1,
            valid_per_cell: 200,
            zipf: PerKind {
                hyphenated: 2.0,
                nvn: 2.0,
                passive: 0.0,
                reduced_relative: 0.0,
            },
            vocab: PerKind {
                hyphenated: 1000,
                nvn: 1000,
                passive: 1000,
                reduced_relative: 1000,
            },
            zipf_jitter: 0.0,
            ..Default::default()
        };
        let corpus = generate_synthetic_corpus(&spec).unwrap();
        let cells = collect(&corpus.truth, AlphaKey::Lemma);
        let h = |k: ConstructionKind| {
            let s = &cells[&("stain".to_string(), k)];
            entropy(&downsample(s, 100, seed ^ 0xabc).unwrap()).unwrap()
        };
        if h(ConstructionKind::Hyphenated) < h(ConstructionKind::Passive) {
            lower += 1;
        }
    }
    assert!(lower >= 99, "{lower}/100");
}
