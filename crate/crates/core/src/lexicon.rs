//! Corpus-wide lexical facts gathered in a first pass: attested participle
//! surface forms, lemmas seen with nominal tags, and hyphenated-compound
//! frequencies used for participle discovery.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use crate::conllu::{NominalTags, Sentence};
use crate::extract::split_hyphenated;

#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    /// lemma → lowercased forms tagged `VVN`.
    participle_forms: BTreeMap<String, BTreeSet<String>>,
    participle_counts: BTreeMap<String, u64>,
    nominal_lemmas: HashSet<String>,
    /// lowercased final segment of hyphenated tokens → count.
    hyphen_suffixes: HashMap<String, u64>,
}

impl Lexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn observe(&mut self, s: &Sentence, nominal: &NominalTags) {
        for t in &s.tokens {
            if t.xpos == "VVN" {
                self.participle_forms
                    .entry(t.lemma.clone())
                    .or_default()
                    .insert(t.form.to_lowercase());
                *self.participle_counts.entry(t.lemma.clone()).or_default() += 1;
            }
            if nominal.is_nominal(&t.xpos) {
                self.nominal_lemmas.insert(t.lemma.to_lowercase());
            }
            if let Some((_, suffix)) = split_hyphenated(&t.form) {
                *self.hyphen_suffixes.entry(suffix.to_lowercase()).or_default() += 1;
            }
        }
    }

    pub fn participle_forms(&self, lemma: &str) -> Vec<String> {
        self.participle_forms
            .get(lemma)
            .map(|f| f.iter().cloned().collect())
            .unwrap_or_default()
    }

    pub fn participle_lemmas(&self) -> impl Iterator<Item = &str> {
        self.participle_forms.keys().map(String::as_str)
    }

    pub fn participle_count(&self, lemma: &str) -> u64 {
        self.participle_counts.get(lemma).copied().unwrap_or(0)
    }

    pub fn nominal_lemmas(&self) -> &HashSet<String> {
        &self.nominal_lemmas
    }

    /// Hyphenated tokens ending in any attested form of `lemma`.
    pub fn hyphen_frequency(&self, lemma: &str) -> u64 {
        self.participle_forms
            .get(lemma)
            .map(|forms| {
                forms
                    .iter()
                    .map(|f| self.hyphen_suffixes.get(f).copied().unwrap_or(0))
                    .sum()
            })
            .unwrap_or(0)
    }

    /// Up to `k` participle lemmas ranked by hyphenated frequency (descending,
    /// ties by lemma). Lemmas never seen in a hyphenated compound are skipped.
    pub fn discover_candidates(&self, k: usize) -> Vec<String> {
        let mut ranked: Vec<(u64, &str)> = self
            .participle_lemmas()
            .map(|l| (self.hyphen_frequency(l), l))
            .filter(|(f, _)| *f > 0)
            .collect();
        ranked.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(b.1)));
        ranked.into_iter().take(k).map(|(_, l)| l.to_string()).collect()
    }
}
