//! Penn Treebank to corpus tag-set mapping.
//!
//! Queries are written against the corpus tag names (`VVN` for lexical past
//! participles, `VB*` for forms of *be*, `VH*` for *have*, `NP*` for proper
//! nouns). Penn tags do not distinguish lexical verbs from *be*/*have*, so the
//! lemma decides.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TagMap {
    /// Tags are already in the corpus tag set.
    #[default]
    Identity,
    /// Input uses Penn tags; rewrite verb and proper-noun tags.
    Penn,
}

impl TagMap {
    pub fn map(self, xpos: &str, lemma: &str) -> String {
        match self {
            TagMap::Identity => xpos.to_string(),
            TagMap::Penn => penn_to_corpus(xpos, lemma),
        }
    }
}

fn penn_to_corpus(xpos: &str, lemma: &str) -> String {
    let lower = lemma.to_lowercase();
    match xpos {
        "VB" | "VBD" | "VBG" | "VBN" | "VBP" | "VBZ" => {
            let suffix = &xpos[2..];
            let stem = match lower.as_str() {
                "be" => "VB",
                "have" => "VH",
                _ => "VV",
            };
            format!("{stem}{suffix}")
        }
        "NNP" => "NP".to_string(),
        "NNPS" => "NPS".to_string(),
        other => other.to_string(),
    }
}
