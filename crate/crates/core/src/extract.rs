//! Construction extractors: query spans in, validated slot matches out.
//!
//! Each extractor runs the surface query for one participle lemma, applies the
//! surface filters (relativizer, following noun, noun lexicon) and then checks
//! the dependency relations that make the span an instance of the intended
//! construction. Every span gets an [`Outcome`], so callers can account for
//! what was rejected and why.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::conllu::{NominalTags, Sentence};
use crate::cql::{compile_str, CompiledQuery, MatchSpan};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstructionKind {
    Hyphenated,
    Nvn,
    Passive,
    ReducedRelative,
}

impl ConstructionKind {
    /// Baseline first.
    pub const ALL: [ConstructionKind; 4] = [
        ConstructionKind::Hyphenated,
        ConstructionKind::Nvn,
        ConstructionKind::Passive,
        ConstructionKind::ReducedRelative,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ConstructionKind::Hyphenated => "hyphenated",
            ConstructionKind::Nvn => "nvn",
            ConstructionKind::Passive => "passive",
            ConstructionKind::ReducedRelative => "reduced_relative",
        }
    }

    pub fn is_compound(self) -> bool {
        matches!(self, ConstructionKind::Hyphenated | ConstructionKind::Nvn)
    }

    pub fn is_phrasal(self) -> bool {
        !self.is_compound()
    }
}

impl fmt::Display for ConstructionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ConstructionKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ConstructionKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown construction '{s}'"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConstructionMatch {
    pub kind: ConstructionKind,
    pub participle_lemma: String,
    pub alpha_form: String,
    pub alpha_lemma: String,
    pub head_noun_lemma: Option<String>,
    pub preposition: Option<String>,
    pub sentence_id: String,
    pub participle_index: usize,
    /// Absent for hyphenated compounds, where α is part of a token.
    pub alpha_index: Option<usize>,
}

/// Dependency labels accepted for each relation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeprelSets {
    /// α → participle in compounds.
    pub compound_modifier: BTreeSet<String>,
    /// participle → head noun in compounds.
    pub adjectival: BTreeSet<String>,
    /// α → participle (or α → preposition) in phrases.
    pub phrasal_alpha: BTreeSet<String>,
}

fn label_set(labels: &[&str]) -> BTreeSet<String> {
    labels.iter().map(|s| s.to_string()).collect()
}

impl Default for DeprelSets {
    fn default() -> Self {
        DeprelSets {
            compound_modifier: label_set(&["compound", "nmod:npmod", "obl:npmod", "dep"]),
            adjectival: label_set(&["amod", "acl"]),
            phrasal_alpha: label_set(&["obl", "nmod", "obl:agent", "pobj"]),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExtractConfig {
    pub deprels: DeprelSets,
    pub nominal: NominalTags,
    /// Lemmas left of the BE verb that mark a relative-clause passive.
    pub relativizers: Vec<String>,
    /// Allow an optional adverb between participle and head noun in reduced relatives.
    pub rr_allow_adverb: bool,
    /// When set, hyphenated α must be a lemma attested with a nominal tag.
    pub hyphen_noun_lexicon: Option<Arc<HashSet<String>>>,
}

impl Default for ExtractConfig {
    fn default() -> Self {
        ExtractConfig {
            deprels: DeprelSets::default(),
            nominal: NominalTags::default(),
            relativizers: vec!["which".into(), "that".into()],
            rr_allow_adverb: false,
            hyphen_noun_lexicon: None,
        }
    }
}

/// Token roles of a candidate span (1-based indices).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Roles {
    pub participle: usize,
    pub alpha: Option<usize>,
    pub preposition: Option<usize>,
    pub head_noun: Option<usize>,
}

/// Checks the head/deprel paths `kind` requires.
///
/// Phrasal: α heads an NP inside a PP dependent on the participle, either with
/// the preposition as α's case child (α → participle) or with the preposition
/// heading α (α → preposition → participle). Compound: α modifies the
/// participle, which modifies the head noun. Hyphenated: only the following
/// head noun is required, since α is not a token of its own.
pub fn dependency_validate(roles: &Roles, s: &Sentence, kind: ConstructionKind, deprels: &DeprelSets) -> bool {
    let Some(part) = s.token(roles.participle) else {
        return false;
    };
    match kind {
        ConstructionKind::Passive | ConstructionKind::ReducedRelative => {
            let (Some(a), Some(p)) = (
                roles.alpha.and_then(|i| s.token(i)),
                roles.preposition.and_then(|i| s.token(i)),
            ) else {
                return false;
            };
            if !deprels.phrasal_alpha.contains(&a.deprel) {
                return false;
            }
            let case_child = a.head == part.index && p.head == a.index;
            let prep_head = a.head == p.index && p.head == part.index;
            case_child || prep_head
        }
        ConstructionKind::Nvn => {
            let (Some(a), Some(h)) = (
                roles.alpha.and_then(|i| s.token(i)),
                roles.head_noun.and_then(|i| s.token(i)),
            ) else {
                return false;
            };
            a.head == part.index
                && deprels.compound_modifier.contains(&a.deprel)
                && part.head == h.index
                && deprels.adjectival.contains(&part.deprel)
        }
        ConstructionKind::Hyphenated => roles.head_noun.and_then(|i| s.token(i)).is_some(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterReason {
    RelativeClause,
    NoFollowingNoun,
    NotInNounLexicon,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Accepted(ConstructionMatch),
    RejectedByFilter(FilterReason),
    RejectedByDependency,
}

/// One query span and what became of it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanOutcome {
    pub kind: ConstructionKind,
    pub span: MatchSpan,
    pub outcome: Outcome,
}

impl SpanOutcome {
    pub fn accepted(&self) -> Option<&ConstructionMatch> {
        match &self.outcome {
            Outcome::Accepted(m) => Some(m),
            _ => None,
        }
    }
}

fn quote_literal(s: &str) -> String {
    regex::escape(s).replace('"', "\\\"")
}

/// Surface queries for one participle lemma, compiled once.
#[derive(Debug, Clone)]
pub struct Extractor {
    lemma: String,
    config: Arc<ExtractConfig>,
    passive: CompiledQuery,
    reduced_relative: CompiledQuery,
    nvn: CompiledQuery,
    hyphenated: Option<CompiledQuery>,
}

impl Extractor {
    /// `surface_forms` are the participle's attested `VVN` forms; without any,
    /// the hyphenated query cannot be built and finds nothing.
    pub fn new<I, S>(lemma: &str, surface_forms: I, config: Arc<ExtractConfig>) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let l = quote_literal(lemma);
        let non_poss: String = std::iter::once(r#"tag="N.*""#.to_string())
            .chain(
                config
                    .nominal
                    .possessive()
                    .iter()
                    .filter(|t| t.starts_with('N'))
                    .map(|t| format!("tag!=\"{}\"", quote_literal(t))),
            )
            .collect::<Vec<_>>()
            .join(" & ");
        let passive = format!(r#"[tag="VB.*"] [tag="RB"]? [tag="VVN" & lemma="{l}"] [tag="IN"] within <s/>"#);
        let rr_adverb = if config.rr_allow_adverb { r#"[tag="RB"]? "# } else { "" };
        let reduced_relative = format!(r#"[{non_poss}] {rr_adverb}[tag="VVN" & lemma="{l}"] [tag="IN"] within <s/>"#);
        let nvn = format!(r#"[{non_poss}] [tag="VVN" & lemma="{l}"] [tag="N.*"] within <s/>"#);

        let mut forms: Vec<String> = surface_forms
            .into_iter()
            .map(|f| f.as_ref().to_lowercase())
            .filter(|f| !f.is_empty() && !f.contains('-'))
            .collect();
        forms.sort();
        forms.dedup();
        let hyphenated = (!forms.is_empty()).then(|| {
            let alts: Vec<String> = forms.iter().map(|f| quote_literal(f)).collect();
            let q = format!(r#"[word=".+-(?i:{})"] within <s/>"#, alts.join("|"));
            compile_str(&q).expect("generated hyphenated query")
        });

        let compile = |q: &str| compile_str(q).expect("generated query");
        Extractor {
            lemma: lemma.to_string(),
            passive: compile(&passive),
            reduced_relative: compile(&reduced_relative),
            nvn: compile(&nvn),
            hyphenated,
            config,
        }
    }

    pub fn lemma(&self) -> &str {
        &self.lemma
    }

    pub fn query(&self, kind: ConstructionKind) -> Option<&CompiledQuery> {
        match kind {
            ConstructionKind::Passive => Some(&self.passive),
            ConstructionKind::ReducedRelative => Some(&self.reduced_relative),
            ConstructionKind::Nvn => Some(&self.nvn),
            ConstructionKind::Hyphenated => self.hyphenated.as_ref(),
        }
    }

    /// All spans of `kind` in `s`, each with its outcome, in span order.
    pub fn outcomes(&self, s: &Sentence, kind: ConstructionKind) -> Vec<SpanOutcome> {
        let Some(q) = self.query(kind) else {
            return Vec::new();
        };
        q.scan(s)
            .into_iter()
            .map(|span| {
                let outcome = match kind {
                    ConstructionKind::Passive => self.judge_passive(s, &span),
                    ConstructionKind::ReducedRelative => self.judge_reduced_relative(s, &span),
                    ConstructionKind::Nvn => self.judge_nvn(s, &span),
                    ConstructionKind::Hyphenated => self.judge_hyphenated(s, &span),
                };
                SpanOutcome { kind, span, outcome }
            })
            .collect()
    }

    pub fn extract(&self, s: &Sentence, kind: ConstructionKind) -> Vec<ConstructionMatch> {
        self.outcomes(s, kind)
            .into_iter()
            .filter_map(|o| match o.outcome {
                Outcome::Accepted(m) => Some(m),
                _ => None,
            })
            .collect()
    }

    /// First nominal right of the preposition whose attachment validates.
    fn phrasal_alpha(
        &self,
        s: &Sentence,
        kind: ConstructionKind,
        participle: usize,
        preposition: usize,
    ) -> Option<usize> {
        (preposition + 1..=s.len()).find(|&i| {
            let t = s.token(i).expect("in range");
            self.config.nominal.is_nominal(&t.xpos)
                && dependency_validate(
                    &Roles {
                        participle,
                        alpha: Some(i),
                        preposition: Some(preposition),
                        head_noun: None,
                    },
                    s,
                    kind,
                    &self.config.deprels,
                )
        })
    }

    fn phrasal_match(
        &self,
        s: &Sentence,
        kind: ConstructionKind,
        participle: usize,
        preposition: usize,
        head_noun: Option<usize>,
    ) -> Outcome {
        let Some(alpha) = self.phrasal_alpha(s, kind, participle, preposition) else {
            return Outcome::RejectedByDependency;
        };
        let a = s.token(alpha).expect("in range");
        Outcome::Accepted(ConstructionMatch {
            kind,
            participle_lemma: self.lemma.clone(),
            alpha_form: a.form.clone(),
            alpha_lemma: a.lemma.clone(),
            head_noun_lemma: head_noun.and_then(|i| s.token(i)).map(|t| t.lemma.clone()),
            preposition: s.token(preposition).map(|t| t.form.clone()),
            sentence_id: s.id.clone(),
            participle_index: participle,
            alpha_index: Some(alpha),
        })
    }

    fn judge_passive(&self, s: &Sentence, span: &MatchSpan) -> Outcome {
        let be = span.token_for(0).expect("required pattern");
        let participle = span.token_for(2).expect("required pattern");
        let preposition = span.token_for(3).expect("required pattern");
        let left = be.checked_sub(1).and_then(|i| s.token(i));
        if let Some(t) = left {
            let lemma = t.lemma.to_lowercase();
            if self.config.relativizers.contains(&lemma) {
                return Outcome::RejectedByFilter(FilterReason::RelativeClause);
            }
        }
        let head_noun = left
            .filter(|t| self.config.nominal.is_nominal(&t.xpos))
            .map(|t| t.index);
        self.phrasal_match(s, ConstructionKind::Passive, participle, preposition, head_noun)
    }

    fn judge_reduced_relative(&self, s: &Sentence, span: &MatchSpan) -> Outcome {
        let last = span.bindings.len() - 1;
        let head = span.bindings[0].token;
        let participle = span.bindings[last - 1].token;
        let preposition = span.bindings[last].token;
        self.phrasal_match(
            s,
            ConstructionKind::ReducedRelative,
            participle,
            preposition,
            Some(head),
        )
    }

    fn judge_nvn(&self, s: &Sentence, span: &MatchSpan) -> Outcome {
        let roles = Roles {
            alpha: span.token_for(0),
            participle: span.token_for(1).expect("required pattern"),
            preposition: None,
            head_noun: span.token_for(2),
        };
        if !dependency_validate(&roles, s, ConstructionKind::Nvn, &self.config.deprels) {
            return Outcome::RejectedByDependency;
        }
        let a = s.token(roles.alpha.expect("required")).expect("in range");
        Outcome::Accepted(ConstructionMatch {
            kind: ConstructionKind::Nvn,
            participle_lemma: self.lemma.clone(),
            alpha_form: a.form.clone(),
            alpha_lemma: a.lemma.clone(),
            head_noun_lemma: roles.head_noun.and_then(|i| s.token(i)).map(|t| t.lemma.clone()),
            preposition: None,
            sentence_id: s.id.clone(),
            participle_index: roles.participle,
            alpha_index: roles.alpha,
        })
    }

    fn judge_hyphenated(&self, s: &Sentence, span: &MatchSpan) -> Outcome {
        let idx = span.token_for(0).expect("required pattern");
        let token = s.token(idx).expect("in range");
        let next = s.token(idx + 1);
        if !next.is_some_and(|t| self.config.nominal.is_nominal(&t.xpos)) {
            return Outcome::RejectedByFilter(FilterReason::NoFollowingNoun);
        }
        let Some((alpha, _participle_form)) = split_hyphenated(&token.form) else {
            return Outcome::RejectedByDependency;
        };
        let alpha_lemma = alpha.to_lowercase();
        if let Some(lexicon) = &self.config.hyphen_noun_lexicon {
            if !lexicon.contains(&alpha_lemma) {
                return Outcome::RejectedByFilter(FilterReason::NotInNounLexicon);
            }
        }
        let roles = Roles {
            participle: idx,
            alpha: None,
            preposition: None,
            head_noun: Some(idx + 1),
        };
        if !dependency_validate(&roles, s, ConstructionKind::Hyphenated, &self.config.deprels) {
            return Outcome::RejectedByDependency;
        }
        Outcome::Accepted(ConstructionMatch {
            kind: ConstructionKind::Hyphenated,
            participle_lemma: self.lemma.clone(),
            alpha_form: alpha.to_string(),
            alpha_lemma,
            head_noun_lemma: next.map(|t| t.lemma.clone()),
            preposition: None,
            sentence_id: s.id.clone(),
            participle_index: idx,
            alpha_index: None,
        })
    }
}

/// Splits a hyphenated compound at its last hyphen into (α, participle part).
pub fn split_hyphenated(form: &str) -> Option<(&str, &str)> {
    let (alpha, rest) = form.rsplit_once('-')?;
    (!alpha.is_empty() && !rest.is_empty()).then_some((alpha, rest))
}

fn attested_forms(s: &Sentence, lemma: &str) -> Vec<String> {
    s.tokens
        .iter()
        .filter(|t| t.xpos == "VVN" && t.lemma == lemma)
        .map(|t| t.form.clone())
        .collect()
}

pub fn extract_passive(s: &Sentence, participle: &str) -> Vec<ConstructionMatch> {
    Extractor::new(participle, Vec::<String>::new(), Arc::default()).extract(s, ConstructionKind::Passive)
}

pub fn extract_reduced_relative(s: &Sentence, participle: &str) -> Vec<ConstructionMatch> {
    Extractor::new(participle, Vec::<String>::new(), Arc::default()).extract(s, ConstructionKind::ReducedRelative)
}

pub fn extract_nvn(s: &Sentence, participle: &str) -> Vec<ConstructionMatch> {
    Extractor::new(participle, Vec::<String>::new(), Arc::default()).extract(s, ConstructionKind::Nvn)
}

/// Hyphenated compounds of `participle` given its attested surface forms.
///
/// If `surface_forms` is empty, forms tagged `VVN` within `s` itself are used.
pub fn extract_hyphenated(s: &Sentence, participle: &str, surface_forms: &[String]) -> Vec<ConstructionMatch> {
    let forms = if surface_forms.is_empty() {
        attested_forms(s, participle)
    } else {
        surface_forms.to_vec()
    };
    Extractor::new(participle, forms, Arc::default()).extract(s, ConstructionKind::Hyphenated)
}

/// Column order of the match table.
pub const MATCH_COLUMNS: [&str; 9] = [
    "kind",
    "participle_lemma",
    "alpha_form",
    "alpha_lemma",
    "head_noun_lemma",
    "preposition",
    "sentence_id",
    "participle_index",
    "alpha_index",
];

fn or_marker(v: Option<&str>) -> &str {
    v.unwrap_or("_")
}

impl ConstructionMatch {
    pub fn to_tsv_row(&self) -> String {
        let alpha_index = self.alpha_index.map(|i| i.to_string());
        [
            self.kind.as_str(),
            &self.participle_lemma,
            &self.alpha_form,
            &self.alpha_lemma,
            or_marker(self.head_noun_lemma.as_deref()),
            or_marker(self.preposition.as_deref()),
            &self.sentence_id,
            &self.participle_index.to_string(),
            or_marker(alpha_index.as_deref()),
        ]
        .join("\t")
    }

    pub fn from_tsv_row(line: &str) -> Result<Self, String> {
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != MATCH_COLUMNS.len() {
            return Err(format!(
                "expected {} columns, found {}",
                MATCH_COLUMNS.len(),
                cols.len()
            ));
        }
        let opt = |s: &str| (s != "_").then(|| s.to_string());
        let index = |s: &str| s.parse::<usize>().map_err(|_| format!("bad token index '{s}'"));
        Ok(ConstructionMatch {
            kind: cols[0].parse()?,
            participle_lemma: cols[1].to_string(),
            alpha_form: cols[2].to_string(),
            alpha_lemma: cols[3].to_string(),
            head_noun_lemma: opt(cols[4]),
            preposition: opt(cols[5]),
            sentence_id: cols[6].to_string(),
            participle_index: index(cols[7])?,
            alpha_index: if cols[8] == "_" { None } else { Some(index(cols[8])?) },
        })
    }
}

pub fn write_matches_tsv<W: Write>(mut w: W, matches: &[ConstructionMatch]) -> std::io::Result<()> {
    writeln!(w, "{}", MATCH_COLUMNS.join("\t"))?;
    for m in matches {
        writeln!(w, "{}", m.to_tsv_row())?;
    }
    Ok(())
}

/// Reads a match table written by [`write_matches_tsv`].
pub fn read_matches_tsv<R: BufRead>(r: R) -> Result<Vec<ConstructionMatch>, String> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line.map_err(|e| e.to_string())?;
        if i == 0 {
            if line != MATCH_COLUMNS.join("\t") {
                return Err("missing or unexpected header row".into());
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        out.push(ConstructionMatch::from_tsv_row(&line).map_err(|e| format!("row {}: {e}", i + 1))?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conllu::Token;

    /// (form, lemma, xpos, head, deprel)
    fn parse(spec: &[(&str, &str, &str, usize, &str)]) -> Sentence {
        let tokens = spec
            .iter()
            .enumerate()
            .map(|(i, (form, lemma, xpos, head, deprel))| Token {
                index: i + 1,
                form: form.to_string(),
                lemma: lemma.to_string(),
                upos: "_".into(),
                xpos: xpos.to_string(),
                head: *head,
                deprel: deprel.to_string(),
            })
            .collect();
        Sentence::new("t1", tokens).unwrap()
    }

    fn pillow_passive() -> Sentence {
        parse(&[
            ("The", "the", "DT", 2, "det"),
            ("pillow", "pillow", "NN", 4, "nsubj:pass"),
            ("was", "be", "VBD", 4, "aux:pass"),
            ("stained", "stain", "VVN", 0, "root"),
            ("with", "with", "IN", 6, "case"),
            ("tears", "tear", "NNS", 4, "obl"),
            (".", ".", "SENT", 4, "punct"),
        ])
    }

    #[test]
    fn passive_pillow() {
        let m = extract_passive(&pillow_passive(), "stain");
        assert_eq!(m.len(), 1);
        let m = &m[0];
        assert_eq!(m.kind, ConstructionKind::Passive);
        assert_eq!(m.participle_lemma, "stain");
        assert_eq!(m.alpha_lemma, "tear");
        assert_eq!(m.alpha_form, "tears");
        assert_eq!(m.head_noun_lemma.as_deref(), Some("pillow"));
        assert_eq!(m.preposition.as_deref(), Some("with"));
        assert_eq!((m.participle_index, m.alpha_index), (4, Some(6)));
    }

    #[test]
    fn passive_relative_clause_filtered() {
        let s = parse(&[
            ("the", "the", "DT", 2, "det"),
            ("pillow", "pillow", "NN", 0, "root"),
            ("which", "which", "WDT", 5, "nsubj:pass"),
            ("was", "be", "VBD", 5, "aux:pass"),
            ("stained", "stain", "VVN", 2, "acl:relcl"),
            ("with", "with", "IN", 7, "case"),
            ("tears", "tear", "NNS", 5, "obl"),
        ]);
        assert!(extract_passive(&s, "stain").is_empty());
        let ex = Extractor::new("stain", ["stained"], Arc::default());
        let o = ex.outcomes(&s, ConstructionKind::Passive);
        assert_eq!(o.len(), 1);
        assert_eq!(o[0].outcome, Outcome::RejectedByFilter(FilterReason::RelativeClause));
    }

    #[test]
    fn passive_without_object_rejected_by_dependency() {
        let s = parse(&[
            ("It", "it", "PP", 3, "nsubj:pass"),
            ("was", "be", "VBD", 3, "aux:pass"),
            ("stained", "stain", "VVN", 0, "root"),
            ("with", "with", "IN", 3, "obl"),
            (".", ".", "SENT", 3, "punct"),
        ]);
        let ex = Extractor::new("stain", ["stained"], Arc::default());
        let o = ex.outcomes(&s, ConstructionKind::Passive);
        assert_eq!(o.len(), 1);
        assert_eq!(o[0].outcome, Outcome::RejectedByDependency);
    }

    #[test]
    fn passive_prep_headed_attachment() {
        let s = parse(&[
            ("The", "the", "DT", 2, "det"),
            ("house", "house", "NN", 4, "nsubjpass"),
            ("was", "be", "VBD", 4, "auxpass"),
            ("designed", "design", "VVN", 0, "ROOT"),
            ("by", "by", "IN", 4, "agent"),
            ("Wright", "Wright", "NP", 5, "pobj"),
        ]);
        let m = extract_passive(&s, "design");
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].alpha_lemma, "Wright");
    }

    #[test]
    fn passive_skips_non_attached_nominals() {
        // "stained with coffee drops": coffee is a compound of drops
        let s = parse(&[
            ("It", "it", "PP", 3, "nsubj:pass"),
            ("was", "be", "VBD", 3, "aux:pass"),
            ("stained", "stain", "VVN", 0, "root"),
            ("with", "with", "IN", 6, "case"),
            ("coffee", "coffee", "NN", 6, "compound"),
            ("drops", "drop", "NNS", 3, "obl"),
        ]);
        let m = extract_passive(&s, "stain");
        assert_eq!(m[0].alpha_lemma, "drop");
        assert_eq!(m[0].head_noun_lemma, None);
    }

    #[test]
    fn reduced_relative_pillow_and_research() {
        let s = parse(&[
            ("pillow", "pillow", "NN", 0, "root"),
            ("stained", "stain", "VVN", 1, "acl"),
            ("with", "with", "IN", 4, "case"),
            ("tears", "tear", "NNS", 2, "obl"),
        ]);
        let m = extract_reduced_relative(&s, "stain");
        assert_eq!(m.len(), 1);
        assert_eq!(
            (
                m[0].alpha_lemma.as_str(),
                m[0].head_noun_lemma.as_deref(),
                m[0].preposition.as_deref()
            ),
            ("tear", Some("pillow"), Some("with"))
        );

        let s = parse(&[
            ("research", "research", "NN", 0, "root"),
            ("conducted", "conduct", "VVN", 1, "acl"),
            ("by", "by", "IN", 4, "case"),
            ("students", "student", "NNS", 2, "obl:agent"),
        ]);
        let m = extract_reduced_relative(&s, "conduct");
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].alpha_lemma, "student");
        assert_eq!(m[0].head_noun_lemma.as_deref(), Some("research"));
        assert_eq!(m[0].preposition.as_deref(), Some("by"));
    }

    #[test]
    fn reduced_relative_possessive_excluded() {
        let s = parse(&[
            ("John's", "John", "NPZ", 0, "root"),
            ("stained", "stain", "VVN", 1, "acl"),
            ("with", "with", "IN", 4, "case"),
            ("ink", "ink", "NN", 2, "obl"),
        ]);
        assert!(extract_reduced_relative(&s, "stain").is_empty());
    }

    #[test]
    fn nvn_accepts_modifier_chain() {
        let s = parse(&[
            ("the", "the", "DT", 4, "det"),
            ("tear", "tear", "NN", 3, "compound"),
            ("stained", "stain", "VVN", 4, "amod"),
            ("pillow", "pillow", "NN", 0, "root"),
        ]);
        let m = extract_nvn(&s, "stain");
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].alpha_lemma, "tear");
        assert_eq!(m[0].head_noun_lemma.as_deref(), Some("pillow"));
        assert_eq!(m[0].preposition, None);
    }

    #[test]
    fn nvn_rejects_reason_and_ditransitive() {
        // one reason stained glass became popular
        let s = parse(&[
            ("one", "one", "CD", 2, "nummod"),
            ("reason", "reason", "NN", 0, "root"),
            ("stained", "stain", "VVN", 4, "amod"),
            ("glass", "glass", "NN", 5, "nsubj"),
            ("became", "become", "VVD", 2, "acl:relcl"),
            ("popular", "popular", "JJ", 5, "xcomp"),
        ]);
        assert!(extract_nvn(&s, "stain").is_empty());
        // I taught adults stained glass techniques
        let s = parse(&[
            ("I", "I", "PP", 2, "nsubj"),
            ("taught", "teach", "VVD", 0, "root"),
            ("adults", "adult", "NNS", 2, "iobj"),
            ("stained", "stain", "VVN", 5, "amod"),
            ("glass", "glass", "NN", 6, "compound"),
            ("techniques", "technique", "NNS", 2, "obj"),
        ]);
        assert!(extract_nvn(&s, "stain").is_empty());
    }

    #[test]
    fn nvn_subject_relation_fails_validation() {
        let s = parse(&[
            ("tear", "tear", "NN", 2, "nsubj"),
            ("stained", "stain", "VVN", 3, "amod"),
            ("pillow", "pillow", "NN", 0, "root"),
        ]);
        let roles = Roles {
            participle: 2,
            alpha: Some(1),
            preposition: None,
            head_noun: Some(3),
        };
        assert!(!dependency_validate(
            &roles,
            &s,
            ConstructionKind::Nvn,
            &DeprelSets::default()
        ));
    }

    #[test]
    fn nvn_root_participle_has_no_head_noun() {
        let s = parse(&[
            ("tear", "tear", "NN", 2, "compound"),
            ("stained", "stain", "VVN", 0, "root"),
        ]);
        let roles = Roles {
            participle: 2,
            alpha: Some(1),
            preposition: None,
            head_noun: None,
        };
        assert!(!dependency_validate(
            &roles,
            &s,
            ConstructionKind::Nvn,
            &DeprelSets::default()
        ));
    }

    #[test]
    fn hyphenated_cases() {
        let forms = vec!["stained".to_string()];
        let s = parse(&[
            ("a", "a", "DT", 3, "det"),
            ("tear-stained", "tear-stained", "JJ", 3, "amod"),
            ("pillow", "pillow", "NN", 0, "root"),
        ]);
        let m = extract_hyphenated(&s, "stain", &forms);
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].alpha_form, "tear");
        assert_eq!(m[0].alpha_lemma, "tear");
        assert_eq!(m[0].head_noun_lemma.as_deref(), Some("pillow"));
        assert_eq!(m[0].alpha_index, None);

        let s = parse(&[
            ("it", "it", "PP", 2, "nsubj"),
            ("tear-stained", "tear-stained", "JJ", 0, "root"),
            ("remains", "remain", "VVZ", 2, "dep"),
        ]);
        assert!(extract_hyphenated(&s, "stain", &forms).is_empty());

        let s = parse(&[
            ("State-of-the-art-DESIGNED", "x", "JJ", 2, "amod"),
            ("homes", "home", "NNS", 0, "root"),
        ]);
        let m = extract_hyphenated(&s, "design", &["designed".to_string()]);
        assert_eq!(m[0].alpha_form, "State-of-the-art");
        assert_eq!(m[0].alpha_lemma, "state-of-the-art");
    }

    #[test]
    fn hyphenated_uses_irregular_forms() {
        let s = parse(&[
            ("women-led", "women-led", "JJ", 2, "amod"),
            ("firms", "firm", "NNS", 0, "root"),
        ]);
        assert!(extract_hyphenated(&s, "lead", &["leaded".to_string()]).is_empty());
        let m = extract_hyphenated(&s, "lead", &["led".to_string()]);
        assert_eq!(m[0].alpha_lemma, "women");
    }

    #[test]
    fn hyphen_lexicon_filter() {
        let mut lex = HashSet::new();
        lex.insert("blood".to_string());
        let cfg = Arc::new(ExtractConfig {
            hyphen_noun_lexicon: Some(Arc::new(lex)),
            ..Default::default()
        });
        let ex = Extractor::new("stain", ["stained"], cfg);
        let s = parse(&[
            ("half-stained", "x", "JJ", 3, "amod"),
            ("blood-stained", "x", "JJ", 3, "amod"),
            ("shirt", "shirt", "NN", 0, "root"),
        ]);
        let o = ex.outcomes(&s, ConstructionKind::Hyphenated);
        assert_eq!(o.len(), 2);
        assert_eq!(o[0].outcome, Outcome::RejectedByFilter(FilterReason::NoFollowingNoun));
        assert_eq!(o[1].accepted().unwrap().alpha_lemma, "blood");

        let s = parse(&[
            ("half-stained", "x", "JJ", 2, "amod"),
            ("shirt", "shirt", "NN", 0, "root"),
        ]);
        let o = ex.outcomes(&s, ConstructionKind::Hyphenated);
        assert_eq!(o[0].outcome, Outcome::RejectedByFilter(FilterReason::NotInNounLexicon));
    }

    #[test]
    fn rr_optional_adverb_flag() {
        let s = parse(&[
            ("pillow", "pillow", "NN", 0, "root"),
            ("heavily", "heavily", "RB", 3, "advmod"),
            ("stained", "stain", "VVN", 1, "acl"),
            ("with", "with", "IN", 5, "case"),
            ("ink", "ink", "NN", 3, "obl"),
        ]);
        let off = Extractor::new("stain", ["stained"], Arc::default());
        assert!(off.extract(&s, ConstructionKind::ReducedRelative).is_empty());
        let on = Extractor::new(
            "stain",
            ["stained"],
            Arc::new(ExtractConfig {
                rr_allow_adverb: true,
                ..Default::default()
            }),
        );
        let m = on.extract(&s, ConstructionKind::ReducedRelative);
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].participle_index, 3);
        assert_eq!(m[0].alpha_lemma, "ink");
    }

    #[test]
    fn tsv_row_round_trip_with_absent_fields() {
        let s = parse(&[
            ("tear-stained", "x", "JJ", 2, "amod"),
            ("pillow", "pillow", "NN", 0, "root"),
        ]);
        let m = extract_hyphenated(&s, "stain", &["stained".to_string()]).remove(0);
        let row = m.to_tsv_row();
        assert_eq!(row, "hyphenated\tstain\ttear\ttear\tpillow\t_\tt1\t1\t_");
        assert_eq!(ConstructionMatch::from_tsv_row(&row).unwrap(), m);
    }

    #[test]
    fn split_rejoins() {
        for form in ["tear-stained", "a-b-c-made", "x-led"] {
            let (a, p) = split_hyphenated(form).unwrap();
            assert_eq!(format!("{a}-{p}"), form);
        }
        assert_eq!(split_hyphenated("-stained"), None);
        assert_eq!(split_hyphenated("stained"), None);
    }
}
