//! Pipeline configuration: a flat TOML key set. Relative paths resolve
//! against the directory holding the config file.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::conllu::DEFAULT_POSSESSIVE_TAGS;
use crate::entropy::AlphaKey;
use crate::extract::DeprelSets;
use crate::tags::TagMap;

pub const SEED_ENV: &str = "SLOTENTROPY_SEED";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid config {path}: {msg}")]
    Parse { path: PathBuf, msg: String },
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// Which participles to analyse.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum ParticipleSelection {
    /// Top candidates by hyphenated-compound frequency.
    #[default]
    Auto,
    List(Vec<String>),
}

impl fmt::Display for ParticipleSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParticipleSelection::Auto => f.write_str("auto"),
            ParticipleSelection::List(l) => f.write_str(&l.join(",")),
        }
    }
}

impl std::str::FromStr for ParticipleSelection {
    type Err = String;

    /// `auto` or a comma-separated lemma list.
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("auto") {
            return Ok(ParticipleSelection::Auto);
        }
        let list: Vec<String> = s
            .split(',')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(String::from)
            .collect();
        if list.is_empty() {
            return Err("empty participle list".into());
        }
        Ok(ParticipleSelection::List(list))
    }
}

impl Serialize for ParticipleSelection {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ParticipleSelection::Auto => s.serialize_str("auto"),
            ParticipleSelection::List(l) => l.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for ParticipleSelection {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Word(String),
            List(Vec<String>),
        }
        match Raw::deserialize(d)? {
            Raw::Word(w) if w == "auto" => Ok(ParticipleSelection::Auto),
            Raw::Word(w) => Err(serde::de::Error::custom(format!(
                "participles must be \"auto\" or a list, got \"{w}\""
            ))),
            Raw::List(l) => Ok(ParticipleSelection::List(l)),
        }
    }
}

fn default_possessive() -> Vec<String> {
    DEFAULT_POSSESSIVE_TAGS.iter().map(|s| s.to_string()).collect()
}

fn default_relativizers() -> Vec<String> {
    vec!["which".into(), "that".into()]
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub corpus_paths: Vec<PathBuf>,
    #[serde(default)]
    pub participles: ParticipleSelection,
    /// Candidate cap for automatic discovery.
    #[serde(default = "PipelineConfig::default_candidates")]
    pub auto_candidates: usize,
    #[serde(default = "PipelineConfig::default_sample_n")]
    pub sample_n: u64,
    #[serde(default = "PipelineConfig::default_min_raw")]
    pub min_raw: u64,
    #[serde(default = "PipelineConfig::default_min_parsed")]
    pub min_parsed: u64,
    /// Query hits kept per cell, first in corpus order.
    #[serde(default = "PipelineConfig::default_raw_cap")]
    pub raw_cap: u64,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub alpha_key: AlphaKey,
    #[serde(default)]
    pub tagset: TagMap,
    #[serde(default = "PipelineConfig::yes")]
    pub dedup: bool,
    #[serde(default = "PipelineConfig::default_compound_deprels")]
    pub compound_deprels: BTreeSet<String>,
    #[serde(default = "PipelineConfig::default_adjectival_deprels")]
    pub adjectival_deprels: BTreeSet<String>,
    #[serde(default = "PipelineConfig::default_phrasal_deprels")]
    pub phrasal_deprels: BTreeSet<String>,
    #[serde(default = "default_possessive")]
    pub possessive_tags: Vec<String>,
    #[serde(default = "default_relativizers")]
    pub relativizers: Vec<String>,
    #[serde(default)]
    pub rr_allow_adverb: bool,
    /// Require hyphenated α to be attested with a nominal tag in the corpus.
    #[serde(default)]
    pub hyphen_noun_lexicon: bool,
    #[serde(default = "PipelineConfig::default_n_perm")]
    pub n_perm: u64,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub jobs: Option<usize>,
}

impl PipelineConfig {
    fn default_candidates() -> usize {
        65
    }
    fn default_sample_n() -> u64 {
        100
    }
    fn default_min_raw() -> u64 {
        200
    }
    fn default_min_parsed() -> u64 {
        100
    }
    fn default_raw_cap() -> u64 {
        5000
    }
    fn default_n_perm() -> u64 {
        10_000
    }
    fn yes() -> bool {
        true
    }
    fn default_compound_deprels() -> BTreeSet<String> {
        DeprelSets::default().compound_modifier
    }
    fn default_adjectival_deprels() -> BTreeSet<String> {
        DeprelSets::default().adjectival
    }
    fn default_phrasal_deprels() -> BTreeSet<String> {
        DeprelSets::default().phrasal_alpha
    }

    /// Defaults for everything but the corpus list.
    pub fn new(corpus_paths: Vec<PathBuf>) -> Self {
        PipelineConfig {
            corpus_paths,
            participles: ParticipleSelection::Auto,
            auto_candidates: Self::default_candidates(),
            sample_n: Self::default_sample_n(),
            min_raw: Self::default_min_raw(),
            min_parsed: Self::default_min_parsed(),
            raw_cap: Self::default_raw_cap(),
            seed: None,
            alpha_key: AlphaKey::default(),
            tagset: TagMap::default(),
            dedup: true,
            compound_deprels: Self::default_compound_deprels(),
            adjectival_deprels: Self::default_adjectival_deprels(),
            phrasal_deprels: Self::default_phrasal_deprels(),
            possessive_tags: default_possessive(),
            relativizers: default_relativizers(),
            rr_allow_adverb: false,
            hyphen_noun_lexicon: false,
            n_perm: Self::default_n_perm(),
            output_dir: default_output(),
            jobs: None,
        }
    }

    pub fn from_toml_str(text: &str, base_dir: &Path) -> Result<Self, String> {
        let mut cfg: PipelineConfig = toml::from_str(text).map_err(|e| e.to_string())?;
        cfg.resolve_paths(base_dir);
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml_str(&text, base).map_err(|msg| ConfigError::Parse {
            path: path.to_path_buf(),
            msg,
        })
    }

    fn resolve_paths(&mut self, base: &Path) {
        for p in &mut self.corpus_paths {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        if self.output_dir.is_relative() {
            self.output_dir = base.join(&self.output_dir);
        }
    }

    /// `SLOTENTROPY_SEED`, when set, replaces the configured seed.
    pub fn apply_env(&mut self) -> Result<(), ConfigError> {
        if let Ok(v) = std::env::var(SEED_ENV) {
            let seed = v
                .trim()
                .parse()
                .map_err(|_| ConfigError::Invalid(format!("{SEED_ENV}='{v}' is not an unsigned integer")))?;
            self.seed = Some(seed);
        }
        Ok(())
    }

    pub fn deprel_sets(&self) -> DeprelSets {
        DeprelSets {
            compound_modifier: self.compound_deprels.clone(),
            adjectival: self.adjectival_deprels.clone(),
            phrasal_alpha: self.phrasal_deprels.clone(),
        }
    }

    /// The seed after validation.
    pub fn seed(&self) -> u64 {
        self.seed.expect("validated config has a seed")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if self.corpus_paths.is_empty() {
            return bad("corpus_paths is empty".into());
        }
        if self.seed.is_none() {
            return bad(format!("no seed: set `seed`, --seed or {SEED_ENV}"));
        }
        if self.sample_n < 2 {
            return bad(format!("sample_n must be >= 2, got {}", self.sample_n));
        }
        if self.min_parsed < self.sample_n {
            return bad(format!(
                "min_parsed ({}) must be >= sample_n ({})",
                self.min_parsed, self.sample_n
            ));
        }
        if self.raw_cap < self.min_raw {
            return bad(format!(
                "raw_cap ({}) is below min_raw ({})",
                self.raw_cap, self.min_raw
            ));
        }
        if self.auto_candidates == 0 {
            return bad("auto_candidates must be positive".into());
        }
        if let ParticipleSelection::List(l) = &self.participles {
            if l.is_empty() {
                return bad("participle list is empty".into());
            }
            if let Some(p) = l.iter().find(|p| p.trim().is_empty()) {
                return bad(format!("blank participle '{p}'"));
            }
        }
        if self.n_perm == 0 {
            return bad("n_perm must be positive".into());
        }
        if self.jobs == Some(0) {
            return bad("jobs must be positive".into());
        }
        for (name, set) in [
            ("compound_deprels", &self.compound_deprels),
            ("adjectival_deprels", &self.adjectival_deprels),
            ("phrasal_deprels", &self.phrasal_deprels),
        ] {
            if set.is_empty() {
                return bad(format!("{name} is empty"));
            }
        }
        Ok(())
    }
}
