//! Seeded synthetic treebank generator.
//!
//! Plants every construction with known α distributions, plus query hits the
//! extractors must reject (relative-clause passives, NVN spans whose first
//! noun is not a modifier, hyphenated compounds not followed by a noun,
//! phrases without a nominal object). The planted matches are returned as
//! ground truth in the match-table format.

use std::collections::BTreeSet;
use std::io::Write;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::conllu::{Sentence, Token};
use crate::extract::{write_matches_tsv, ConstructionKind, ConstructionMatch};

/// Participle lemmas and their past-participle forms.
pub const PARTICIPLES: [(&str, &str); 72] = [
    ("stain", "stained"),
    ("make", "made"),
    ("lead", "led"),
    ("base", "based"),
    ("design", "designed"),
    ("negotiate", "negotiated"),
    ("build", "built"),
    ("write", "written"),
    ("drive", "driven"),
    ("prescribe", "prescribed"),
    ("destroy", "destroyed"),
    ("conduct", "conducted"),
    ("sculpt", "sculpted"),
    ("bind", "bound"),
    ("sort", "sorted"),
    ("fund", "funded"),
    ("own", "owned"),
    ("produce", "produced"),
    ("grow", "grown"),
    ("cook", "cooked"),
    ("paint", "painted"),
    ("print", "printed"),
    ("power", "powered"),
    ("sponsor", "sponsored"),
    ("inspire", "inspired"),
    ("infuse", "infused"),
    ("fill", "filled"),
    ("soak", "soaked"),
    ("cover", "covered"),
    ("craft", "crafted"),
    ("control", "controlled"),
    ("focus", "focused"),
    ("center", "centered"),
    ("generate", "generated"),
    ("operate", "operated"),
    ("approve", "approved"),
    ("test", "tested"),
    ("certify", "certified"),
    ("induce", "induced"),
    ("relate", "related"),
    ("orient", "oriented"),
    ("sweeten", "sweetened"),
    ("cure", "cured"),
    ("feed", "fed"),
    ("freeze", "frozen"),
    ("dry", "dried"),
    ("smoke", "smoked"),
    ("carve", "carved"),
    ("weave", "woven"),
    ("forge", "forged"),
    ("stitch", "stitched"),
    ("blow", "blown"),
    ("bake", "baked"),
    ("shake", "shaken"),
    ("sew", "sewn"),
    ("spin", "spun"),
    ("plant", "planted"),
    ("brew", "brewed"),
    ("stuff", "stuffed"),
    ("coat", "coated"),
    ("dye", "dyed"),
    ("glaze", "glazed"),
    ("pack", "packed"),
    ("load", "loaded"),
    ("drench", "drenched"),
    ("scar", "scarred"),
    ("burn", "burnt"),
    ("pollute", "polluted"),
    ("wash", "washed"),
    ("mold", "molded"),
    ("verify", "verified"),
    ("reinforce", "reinforced"),
];

const PREPOSITIONS: [&str; 4] = ["with", "by", "in", "from"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerKind<T> {
    pub hyphenated: T,
    pub nvn: T,
    pub passive: T,
    pub reduced_relative: T,
}

impl<T: Copy> PerKind<T> {
    pub fn get(&self, kind: ConstructionKind) -> T {
        match kind {
            ConstructionKind::Hyphenated => self.hyphenated,
            ConstructionKind::Nvn => self.nvn,
            ConstructionKind::Passive => self.passive,
            ConstructionKind::ReducedRelative => self.reduced_relative,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellOverride {
    pub participle: String,
    pub kind: ConstructionKind,
    pub valid: u64,
    pub noise: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSpec {
    pub seed: u64,
    pub n_participles: usize,
    /// Planted valid matches per cell.
    pub valid_per_cell: u64,
    /// Planted query hits that extraction must reject, per cell.
    pub noise_per_cell: u64,
    /// Participles given one cell with too few valid matches.
    pub n_deficient: usize,
    pub deficient_valid_min: u64,
    pub deficient_valid_max: u64,
    /// Zipf exponent of the α distribution; 0 is uniform.
    pub zipf: PerKind<f64>,
    /// Number of α types available to a cell.
    pub vocab: PerKind<usize>,
    /// Per-participle uniform jitter added to compound exponents.
    pub zipf_jitter: f64,
    /// Share of phrasal sentences using preposition-headed attachment.
    pub prep_headed_fraction: f64,
    /// Share of passives with an adverb before the participle.
    pub adverb_fraction: f64,
    pub sample_n: u64,
    pub overrides: Vec<CellOverride>,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            seed: 1,
            n_participles: 1,
            valid_per_cell: 200,
            noise_per_cell: 0,
            n_deficient: 0,
            deficient_valid_min: 40,
            deficient_valid_max: 95,
            zipf: PerKind {
                hyphenated: 1.2,
                nvn: 1.5,
                passive: 0.0,
                reduced_relative: 0.0,
            },
            vocab: PerKind {
                hyphenated: 60,
                nvn: 60,
                passive: 1500,
                reduced_relative: 1500,
            },
            zipf_jitter: 0.3,
            prep_headed_fraction: 0.3,
            adverb_fraction: 0.2,
            sample_n: 100,
            overrides: Vec::new(),
        }
    }
}

const BUNDLED: &str = include_str!("../data/synth_bundled.toml");

impl SynthSpec {
    /// The bundled demonstration corpus: 65 candidate participles of which
    /// 29 fall short in one construction.
    pub fn bundled() -> Self {
        toml::from_str(BUNDLED).expect("bundled synth spec parses")
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.n_participles == 0 || self.n_participles > PARTICIPLES.len() {
            return Err(format!("n_participles must be in 1..={}", PARTICIPLES.len()));
        }
        if self.n_deficient > self.n_participles {
            return Err("n_deficient exceeds n_participles".into());
        }
        if self.valid_per_cell < self.sample_n {
            return Err(format!(
                "valid_per_cell {} is below sample_n {}",
                self.valid_per_cell, self.sample_n
            ));
        }
        if self.deficient_valid_min > self.deficient_valid_max || self.deficient_valid_max >= self.sample_n {
            return Err("deficient range must lie below sample_n".into());
        }
        for k in ConstructionKind::ALL {
            if self.vocab.get(k) == 0 {
                return Err(format!("vocab for {k} must be positive"));
            }
            if self.zipf.get(k) < 0.0 {
                return Err(format!("zipf exponent for {k} must be >= 0"));
            }
        }
        for o in &self.overrides {
            if !PARTICIPLES[..self.n_participles]
                .iter()
                .any(|(l, _)| *l == o.participle)
            {
                return Err(format!("override for unknown participle '{}'", o.participle));
            }
        }
        Ok(())
    }
}

/// Pronounceable pseudo-nouns, distinct for distinct indices.
fn noun(i: usize) -> String {
    const C: [&str; 15] = [
        "b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "sh",
    ];
    const V: [&str; 5] = ["a", "e", "i", "o", "u"];
    let mut out = String::new();
    let mut x = i;
    for _ in 0..3 {
        let syl = x % 75;
        x /= 75;
        out.push_str(C[syl / 5]);
        out.push_str(V[syl % 5]);
    }
    if x > 0 {
        out.push_str(&noun(x - 1));
    }
    out
}

/// Inverse-CDF sampler over ranks 1..=n with weight k^-s.
struct Zipf {
    cdf: Vec<f64>,
}

impl Zipf {
    fn new(n: usize, s: f64) -> Self {
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = (1..=n)
            .map(|k| {
                acc += (k as f64).powf(-s);
                acc
            })
            .collect();
        for c in &mut cdf {
            *c /= acc;
        }
        Zipf { cdf }
    }

    fn sample(&self, rng: &mut impl Rng) -> usize {
        let u: f64 = rng.random();
        self.cdf.partition_point(|&c| c < u).min(self.cdf.len() - 1)
    }
}

struct Builder {
    tokens: Vec<Token>,
}

impl Builder {
    fn new() -> Self {
        Builder { tokens: Vec::new() }
    }

    fn next_index(&self) -> usize {
        self.tokens.len() + 1
    }

    fn push(&mut self, form: &str, lemma: &str, upos: &str, xpos: &str, head: usize, deprel: &str) -> usize {
        let index = self.next_index();
        self.tokens.push(Token {
            index,
            form: form.into(),
            lemma: lemma.into(),
            upos: upos.into(),
            xpos: xpos.into(),
            head,
            deprel: deprel.into(),
        });
        index
    }

    /// Trailing "in <n> ." making each sentence unique.
    fn tail(&mut self, attach: usize, unique: u64) {
        let i = self.next_index();
        let num = unique.to_string();
        self.push("in", "in", "ADP", "IN", i + 1, "case");
        self.push(&num, &num, "NUM", "CD", attach, "obl");
        self.push(".", ".", "PUNCT", "SENT", attach, "punct");
    }
}

struct Planted {
    tokens: Vec<Token>,
    truth: Option<ConstructionMatch>,
}

struct Alpha {
    lemma: String,
    form: String,
    xpos: &'static str,
}

struct Ctx<'a> {
    lemma: &'a str,
    form: &'a str,
    head_noun: String,
    unique: u64,
}

fn phrasal_sentence(
    kind: ConstructionKind,
    c: &Ctx,
    alpha: &Alpha,
    prep: &str,
    prep_headed: bool,
    adverb: bool,
) -> Planted {
    let mut b = Builder::new();
    let participle;
    if kind == ConstructionKind::Passive {
        // The H was (very) P prep the A in N .
        let n_before = if adverb { 4 } else { 3 };
        participle = n_before + 1;
        b.push("The", "the", "DET", "DT", 2, "det");
        b.push(&c.head_noun, &c.head_noun, "NOUN", "NN", participle, "nsubj:pass");
        b.push("was", "be", "AUX", "VBD", participle, "aux:pass");
        if adverb {
            b.push("very", "very", "ADV", "RB", participle, "advmod");
        }
        b.push(c.form, c.lemma, "VERB", "VVN", 0, "root");
    } else {
        // A H P prep the A appeared in N .
        participle = 3;
        b.push("A", "a", "DET", "DT", 2, "det");
        b.push(&c.head_noun, &c.head_noun, "NOUN", "NN", 7, "nsubj");
        b.push(c.form, c.lemma, "VERB", "VVN", 2, "acl");
    }
    let prep_idx = b.next_index();
    let alpha_idx = prep_idx + 2;
    let alpha_rel = if prep == "by" { "obl:agent" } else { "obl" };
    if prep_headed {
        let prep_rel = if prep == "by" { "agent" } else { "prep" };
        b.push(prep, prep, "ADP", "IN", participle, prep_rel);
        b.push("the", "the", "DET", "DT", alpha_idx, "det");
        b.push(&alpha.form, &alpha.lemma, "NOUN", alpha.xpos, prep_idx, "pobj");
    } else {
        b.push(prep, prep, "ADP", "IN", alpha_idx, "case");
        b.push("the", "the", "DET", "DT", alpha_idx, "det");
        b.push(&alpha.form, &alpha.lemma, "NOUN", alpha.xpos, participle, alpha_rel);
    }
    let root = if kind == ConstructionKind::Passive {
        participle
    } else {
        b.push("appeared", "appear", "VERB", "VVD", 0, "root")
    };
    b.tail(root, c.unique);
    Planted {
        tokens: b.tokens,
        truth: Some(ConstructionMatch {
            kind,
            participle_lemma: c.lemma.to_string(),
            alpha_form: alpha.form.clone(),
            alpha_lemma: alpha.lemma.clone(),
            head_noun_lemma: Some(c.head_noun.clone()),
            preposition: Some(prep.to_string()),
            sentence_id: String::new(),
            participle_index: participle,
            alpha_index: Some(alpha_idx),
        }),
    }
}

fn nvn_sentence(c: &Ctx, alpha: &Alpha) -> Planted {
    // The A P H sat there in N .
    let mut b = Builder::new();
    b.push("The", "the", "DET", "DT", 4, "det");
    b.push(&alpha.form, &alpha.lemma, "NOUN", "NN", 3, "compound");
    b.push(c.form, c.lemma, "VERB", "VVN", 4, "amod");
    b.push(&c.head_noun, &c.head_noun, "NOUN", "NN", 5, "nsubj");
    b.push("sat", "sit", "VERB", "VVD", 0, "root");
    b.push("there", "there", "ADV", "RB", 5, "advmod");
    b.tail(5, c.unique);
    Planted {
        tokens: b.tokens,
        truth: Some(ConstructionMatch {
            kind: ConstructionKind::Nvn,
            participle_lemma: c.lemma.to_string(),
            alpha_form: alpha.form.clone(),
            alpha_lemma: alpha.lemma.clone(),
            head_noun_lemma: Some(c.head_noun.clone()),
            preposition: None,
            sentence_id: String::new(),
            participle_index: 3,
            alpha_index: Some(2),
        }),
    }
}

fn hyphenated_sentence(c: &Ctx, alpha: &Alpha) -> Planted {
    // The A-P H sat there in N .
    let mut b = Builder::new();
    let compound = format!("{}-{}", alpha.form, c.form);
    b.push("The", "the", "DET", "DT", 3, "det");
    b.push(&compound, &compound.to_lowercase(), "ADJ", "JJ", 3, "amod");
    b.push(&c.head_noun, &c.head_noun, "NOUN", "NN", 4, "nsubj");
    b.push("sat", "sit", "VERB", "VVD", 0, "root");
    b.push("there", "there", "ADV", "RB", 4, "advmod");
    b.tail(4, c.unique);
    Planted {
        tokens: b.tokens,
        truth: Some(ConstructionMatch {
            kind: ConstructionKind::Hyphenated,
            participle_lemma: c.lemma.to_string(),
            alpha_form: alpha.form.clone(),
            alpha_lemma: alpha.form.to_lowercase(),
            head_noun_lemma: Some(c.head_noun.clone()),
            preposition: None,
            sentence_id: String::new(),
            participle_index: 2,
            alpha_index: None,
        }),
    }
}

/// A query hit that extraction must reject.
fn noise_sentence(kind: ConstructionKind, variant: usize, c: &Ctx, alpha: &Alpha, prep: &str) -> Planted {
    let mut b = Builder::new();
    match kind {
        ConstructionKind::Passive if variant % 3 < 2 => {
            // The H which/that was P prep the A in N .
            let rel = if variant.is_multiple_of(3) { "which" } else { "that" };
            b.push("The", "the", "DET", "DT", 2, "det");
            b.push(&c.head_noun, &c.head_noun, "NOUN", "NN", 0, "root");
            b.push(rel, rel, "PRON", "WDT", 5, "nsubj:pass");
            b.push("was", "be", "AUX", "VBD", 5, "aux:pass");
            b.push(c.form, c.lemma, "VERB", "VVN", 2, "acl:relcl");
            b.push(prep, prep, "ADP", "IN", 8, "case");
            b.push("the", "the", "DET", "DT", 8, "det");
            b.push(&alpha.form, &alpha.lemma, "NOUN", alpha.xpos, 5, "obl");
            b.tail(5, c.unique);
        }
        ConstructionKind::Passive => {
            // The H was P in N .
            b.push("The", "the", "DET", "DT", 2, "det");
            b.push(&c.head_noun, &c.head_noun, "NOUN", "NN", 4, "nsubj:pass");
            b.push("was", "be", "AUX", "VBD", 4, "aux:pass");
            b.push(c.form, c.lemma, "VERB", "VVN", 0, "root");
            b.tail(4, c.unique);
        }
        ConstructionKind::ReducedRelative => {
            // A H P in N appeared .
            let num = c.unique.to_string();
            b.push("A", "a", "DET", "DT", 2, "det");
            b.push(&c.head_noun, &c.head_noun, "NOUN", "NN", 6, "nsubj");
            b.push(c.form, c.lemma, "VERB", "VVN", 2, "acl");
            b.push("in", "in", "ADP", "IN", 5, "case");
            b.push(&num, &num, "NUM", "CD", 3, "obl");
            b.push("appeared", "appear", "VERB", "VVD", 0, "root");
            b.push(".", ".", "PUNCT", "SENT", 6, "punct");
        }
        ConstructionKind::Nvn if variant.is_multiple_of(2) => {
            // I taught As P H techniques in N .
            let plural = format!("{}s", alpha.lemma);
            b.push("I", "I", "PRON", "PP", 2, "nsubj");
            b.push("taught", "teach", "VERB", "VVD", 0, "root");
            b.push(&plural, &alpha.lemma, "NOUN", "NNS", 2, "iobj");
            b.push(c.form, c.lemma, "VERB", "VVN", 5, "amod");
            b.push(&c.head_noun, &c.head_noun, "NOUN", "NN", 6, "compound");
            b.push("techniques", "technique", "NOUN", "NNS", 2, "obj");
            b.tail(2, c.unique);
        }
        ConstructionKind::Nvn => {
            // One A P H became popular in N .
            b.push("One", "one", "NUM", "CD", 2, "nummod");
            b.push(&alpha.form, &alpha.lemma, "NOUN", "NN", 0, "root");
            b.push(c.form, c.lemma, "VERB", "VVN", 4, "amod");
            b.push(&c.head_noun, &c.head_noun, "NOUN", "NN", 5, "nsubj");
            b.push("became", "become", "VERB", "VVD", 2, "acl:relcl");
            b.push("popular", "popular", "ADJ", "JJ", 5, "xcomp");
            b.tail(5, c.unique);
        }
        ConstructionKind::Hyphenated => {
            // It was A-P in N .
            let compound = format!("{}-{}", alpha.form, c.form);
            b.push("It", "it", "PRON", "PP", 3, "nsubj");
            b.push("was", "be", "AUX", "VBD", 3, "cop");
            b.push(&compound, &compound.to_lowercase(), "ADJ", "JJ", 0, "root");
            b.tail(3, c.unique);
        }
    }
    Planted {
        tokens: b.tokens,
        truth: None,
    }
}

#[derive(Debug, Clone)]
pub struct SynthCorpus {
    pub sentences: Vec<Sentence>,
    /// Planted matches in corpus order.
    pub truth: Vec<ConstructionMatch>,
    /// Participles planted with a short cell.
    pub deficient: BTreeSet<String>,
}

impl SynthCorpus {
    pub fn write_conllu<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for s in &self.sentences {
            w.write_all(s.to_conllu().as_bytes())?;
        }
        Ok(())
    }

    pub fn write_truth<W: Write>(&self, w: W) -> std::io::Result<()> {
        write_matches_tsv(w, &self.truth)
    }

    pub fn to_conllu_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_conllu(&mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("utf-8")
    }
}

pub fn generate_synthetic_corpus(spec: &SynthSpec) -> Result<SynthCorpus, String> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let participles = &PARTICIPLES[..spec.n_participles];

    // overridden participles are left alone and count toward the deficient
    // total when an override is short
    let overridden = |lemma: &str| spec.overrides.iter().any(|o| o.participle == lemma);
    let short_overrides: BTreeSet<&str> = spec
        .overrides
        .iter()
        .filter(|o| o.valid < spec.sample_n)
        .map(|o| o.participle.as_str())
        .collect();
    let mut order: Vec<usize> = (0..participles.len())
        .filter(|&i| !overridden(participles[i].0))
        .collect();
    order.shuffle(&mut rng);
    let n_random = spec.n_deficient.saturating_sub(short_overrides.len()).min(order.len());
    let deficient_idx: BTreeSet<usize> = order[..n_random].iter().copied().collect();

    let mut planted: Vec<Planted> = Vec::new();
    let mut unique: u64 = 1000;
    let mut deficient = BTreeSet::new();
    for (pi, &(lemma, form)) in participles.iter().enumerate() {
        let short_kind = deficient_idx
            .contains(&pi)
            .then(|| ConstructionKind::ALL[rng.random_range(0..4)]);
        if short_kind.is_some() || short_overrides.contains(lemma) {
            deficient.insert(lemma.to_string());
        }
        let jitter = spec.zipf_jitter * (2.0 * rng.random::<f64>() - 1.0);
        let phrasal_offset = rng.random_range(0..20_000usize);
        for kind in ConstructionKind::ALL {
            let mut valid = spec.valid_per_cell;
            let mut noise = spec.noise_per_cell;
            if short_kind == Some(kind) {
                valid = rng.random_range(spec.deficient_valid_min..=spec.deficient_valid_max);
                noise = spec.valid_per_cell + spec.noise_per_cell - valid;
            }
            if let Some(o) = spec.overrides.iter().find(|o| o.participle == lemma && o.kind == kind) {
                valid = o.valid;
                noise = o.noise;
            }
            let exponent = if kind.is_compound() {
                (spec.zipf.get(kind) + jitter).max(0.0)
            } else {
                spec.zipf.get(kind)
            };
            let zipf = Zipf::new(spec.vocab.get(kind), exponent);
            // both phrasal cells share one α distribution per participle
            let offset = match kind {
                ConstructionKind::Hyphenated => 100_000 + pi * 1_000,
                ConstructionKind::Nvn => 200_000 + pi * 1_000,
                _ => phrasal_offset,
            };
            for i in 0..valid + noise {
                let rank = zipf.sample(&mut rng);
                let lemma_a = noun(offset + rank);
                let plural = kind.is_phrasal() && rng.random::<bool>();
                let alpha = Alpha {
                    form: if plural { format!("{lemma_a}s") } else { lemma_a.clone() },
                    lemma: lemma_a,
                    xpos: if plural { "NNS" } else { "NN" },
                };
                let ctx = Ctx {
                    lemma,
                    form,
                    head_noun: noun(300_000 + rng.random_range(0..5_000usize)),
                    unique,
                };
                unique += 1;
                let prep = PREPOSITIONS[rng.random_range(0..PREPOSITIONS.len())];
                let p = if i < valid {
                    match kind {
                        ConstructionKind::Hyphenated => hyphenated_sentence(&ctx, &alpha),
                        ConstructionKind::Nvn => nvn_sentence(&ctx, &alpha),
                        _ => {
                            let prep_headed = rng.random::<f64>() < spec.prep_headed_fraction;
                            let adverb =
                                kind == ConstructionKind::Passive && rng.random::<f64>() < spec.adverb_fraction;
                            phrasal_sentence(kind, &ctx, &alpha, prep, prep_headed, adverb)
                        }
                    }
                } else {
                    noise_sentence(kind, (i - valid) as usize, &ctx, &alpha, prep)
                };
                planted.push(p);
            }
        }
    }
    planted.shuffle(&mut rng);

    let mut sentences = Vec::with_capacity(planted.len());
    let mut truth = Vec::new();
    for (i, p) in planted.into_iter().enumerate() {
        let id = format!("synth-{:06}", i + 1);
        if let Some(mut m) = p.truth {
            m.sentence_id = id.clone();
            truth.push(m);
        }
        let s = Sentence::new(id, p.tokens).map_err(|e| format!("generator bug: {e}"))?;
        sentences.push(s);
    }
    Ok(SynthCorpus {
        sentences,
        truth,
        deficient,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn nouns_are_distinct_and_plain() {
        let words: HashSet<String> = (0..20_000).map(noun).collect();
        assert_eq!(words.len(), 20_000);
        assert!(words.iter().all(|w| w.chars().all(|c| c.is_ascii_lowercase())));
        assert_ne!(noun(421_874), noun(421_875));
    }

    #[test]
    fn zipf_zero_is_uniform_support() {
        let z = Zipf::new(4, 0.0);
        assert!((z.cdf[1] - 0.5).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!((0..1000).all(|_| z.sample(&mut rng) < 4));
    }

    #[test]
    fn participle_table_is_unique() {
        let lemmas: HashSet<_> = PARTICIPLES.iter().map(|p| p.0).collect();
        let forms: HashSet<_> = PARTICIPLES.iter().map(|p| p.1).collect();
        assert_eq!(lemmas.len(), PARTICIPLES.len());
        assert_eq!(forms.len(), PARTICIPLES.len());
    }

    #[test]
    fn byte_identical_for_seed() {
        let spec = SynthSpec {
            noise_per_cell: 10,
            valid_per_cell: 100,
            n_participles: 2,
            ..Default::default()
        };
        let a = generate_synthetic_corpus(&spec).unwrap().to_conllu_string();
        let b = generate_synthetic_corpus(&spec).unwrap().to_conllu_string();
        assert_eq!(a, b);
        let c = generate_synthetic_corpus(&SynthSpec { seed: 2, ..spec })
            .unwrap()
            .to_conllu_string();
        assert_ne!(a, c);
    }

    #[test]
    fn counts_follow_spec() {
        let spec = SynthSpec {
            n_participles: 3,
            valid_per_cell: 120,
            noise_per_cell: 7,
            n_deficient: 1,
            ..Default::default()
        };
        let corpus = generate_synthetic_corpus(&spec).unwrap();
        assert_eq!(corpus.sentences.len(), 3 * 4 * 127);
        assert_eq!(corpus.deficient.len(), 1);
        assert!(corpus.truth.len() < 3 * 4 * 120);
    }

    #[test]
    fn invalid_specs() {
        assert!(SynthSpec {
            n_participles: 0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(SynthSpec {
            valid_per_cell: 50,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(SynthSpec {
            n_participles: 500,
            ..Default::default()
        }
        .validate()
        .is_err());
    }

    #[test]
    fn bundled_spec_loads() {
        let s = SynthSpec::bundled();
        assert_eq!(s.n_participles, 65);
        assert_eq!(s.n_deficient, 29);
        s.validate().unwrap();
    }
}
