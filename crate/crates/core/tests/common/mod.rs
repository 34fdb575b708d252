//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use regex::Regex;

use slotentropy::conllu::{ConlluReader, NominalTags};
use slotentropy::conllu::{Sentence, Token};
use slotentropy::cql::{Attribute, Operator, QueryAst};
use slotentropy::extract::{read_matches_tsv, ConstructionKind, ConstructionMatch, ExtractConfig, Extractor, Outcome};
use slotentropy::lexicon::Lexicon;
use slotentropy::stats::LongRow;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub type Assignment = (usize, Vec<(usize, usize)>);

/// Every (start, [(pattern, token)]) satisfying `ast`, by trying each subset
/// of optional patterns at each start.
pub fn brute_force_matches(ast: &QueryAst, s: &Sentence) -> BTreeSet<Assignment> {
    let tests: Vec<Vec<(Attribute, bool, Regex)>> = ast
        .sequence
        .iter()
        .map(|p| {
            p.tests
                .iter()
                .map(|t| {
                    let re = Regex::new(&format!("^(?:{})$", t.pattern)).expect("valid regex");
                    (t.attribute, t.operator == Operator::NotMatches, re)
                })
                .collect()
        })
        .collect();
    let field = |a: Attribute, t: &Token| -> String {
        match a {
            Attribute::Tag => t.xpos.clone(),
            Attribute::Lemma => t.lemma.clone(),
            Attribute::Word => t.form.clone(),
        }
    };
    let ok = |pi: usize, t: &Token| tests[pi].iter().all(|(a, neg, re)| re.is_match(&field(*a, t)) != *neg);
    let optional: Vec<usize> = (0..ast.sequence.len()).filter(|&i| ast.sequence[i].optional).collect();
    let mut out = BTreeSet::new();
    for start in 1..=s.len() {
        for mask in 0u32..(1 << optional.len()) {
            let used: Vec<usize> = (0..ast.sequence.len())
                .filter(|i| match optional.iter().position(|o| o == i) {
                    Some(bit) => mask & (1 << bit) != 0,
                    None => true,
                })
                .collect();
            if used.is_empty() || start + used.len() - 1 > s.len() {
                continue;
            }
            let fits = used
                .iter()
                .enumerate()
                .all(|(k, &pi)| ok(pi, s.token(start + k).expect("in range")));
            if fits {
                out.insert((start, used.iter().enumerate().map(|(k, &pi)| (pi, start + k)).collect()));
            }
        }
    }
    out
}

/// Flat sentence of (form, lemma, tag) with every token on the root.
pub fn flat_sentence(id: &str, spec: &[(String, String, String)]) -> Sentence {
    let tokens = spec
        .iter()
        .enumerate()
        .map(|(i, (f, l, t))| Token {
            index: i + 1,
            form: f.clone(),
            lemma: l.clone(),
            upos: "X".into(),
            xpos: t.clone(),
            head: if i == 0 { 0 } else { 1 },
            deprel: if i == 0 { "root".into() } else { "dep".into() },
        })
        .collect();
    Sentence::new(id, tokens).expect("valid flat tree")
}

/// ML log-likelihood of the random-intercept model from the dense marginal
/// covariance V = σe² I + σu² Z Zᵀ.
pub fn dense_loglik(rows: &[LongRow], levels: &[ConstructionKind], beta: &[f64], sigma_u2: f64, sigma_e2: f64) -> f64 {
    let n = rows.len();
    let x = DMatrix::from_fn(n, beta.len(), |i, j| {
        if j == 0 {
            1.0
        } else {
            (rows[i].construction == levels[j]) as u8 as f64
        }
    });
    let y = DVector::from_iterator(n, rows.iter().map(|r| r.entropy_bits));
    let v = DMatrix::from_fn(n, n, |i, j| {
        let mut c = 0.0;
        if rows[i].participle == rows[j].participle {
            c += sigma_u2;
        }
        if i == j {
            c += sigma_e2;
        }
        c
    });
    let r = y - x * DVector::from_column_slice(beta);
    let chol = v.cholesky().expect("covariance is positive definite");
    let log_det: f64 = 2.0 * chol.l().diagonal().iter().map(|d| d.ln()).sum::<f64>();
    let quad = r.dot(&chol.solve(&r));
    -0.5 * (n as f64 * (2.0 * std::f64::consts::PI).ln() + log_det + quad)
}

/// Balanced groups × four constructions with Gaussian intercepts and noise.
pub fn simulate_rows(rng: &mut impl Rng, n_groups: usize, beta: [f64; 4], sigma_u: f64, sigma_e: f64) -> Vec<LongRow> {
    let u = Normal::new(0.0, sigma_u).unwrap();
    let e = Normal::new(0.0, sigma_e).unwrap();
    let mut rows = Vec::new();
    for g in 0..n_groups {
        let ug = u.sample(rng);
        let name = format!("p{g:02}");
        for (j, kind) in ConstructionKind::ALL.into_iter().enumerate() {
            let mean = beta[0] + if j == 0 { 0.0 } else { beta[j] };
            rows.push(LongRow::new(&name, kind, mean + ug + e.sample(rng)));
        }
    }
    rows
}

/// Neumaier-compensated sum.
pub fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Entropy as log2 N − (1/N) Σ c log2 c, compensated.
pub fn entropy_oracle(counts: &[u64]) -> f64 {
    let n: u64 = counts.iter().sum();
    let nf = n as f64;
    let s = neumaier_sum(counts.iter().filter(|&&c| c > 0).map(|&c| c as f64 * (c as f64).log2()));
    nf.log2() - s / nf
}

/// Composite Simpson rule on [a, b] with `m` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, m: usize) -> f64 {
    assert!(m.is_multiple_of(2));
    let h = (b - a) / m as f64;
    let inner = neumaier_sum((1..m).map(|i| {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        w * f(a + h * i as f64)
    }));
    h / 3.0 * (f(a) + f(b) + inner)
}

/// Upper tail of χ²(1) by quadrature. With t = u² the density becomes
/// 2·φ(u), which is smooth at the origin.
pub fn chi2_sf_df1_quadrature(x: f64) -> f64 {
    let c = 2.0 / (2.0 * std::f64::consts::PI).sqrt();
    1.0 - simpson(|u| c * (-0.5 * u * u).exp(), 0.0, x.sqrt(), 200_000)
}

/// Upper tail of χ²(3) by quadrature of the density on [0, x].
pub fn chi2_sf_df3_quadrature(x: f64) -> f64 {
    // Γ(3/2) = √π / 2
    let norm = 2f64.powf(1.5) * std::f64::consts::PI.sqrt() / 2.0;
    1.0 - simpson(|t| t.sqrt() * (-0.5 * t).exp() / norm, 0.0, x, 200_000)
}

/// Writes the bundled synthetic corpus under `dir` and returns its path with
/// the planted matches.
pub fn write_bundled(dir: &std::path::Path) -> (PathBuf, Vec<slotentropy::extract::ConstructionMatch>) {
    let corpus = slotentropy::synth::generate_synthetic_corpus(&slotentropy::synth::SynthSpec::bundled())
        .expect("bundled spec is valid");
    let path = dir.join("corpus.conllu");
    let mut w = std::io::BufWriter::new(std::fs::File::create(&path).expect("create corpus"));
    corpus.write_conllu(&mut w).expect("write corpus");
    std::io::Write::flush(&mut w).expect("flush corpus");
    (path, corpus.truth)
}

pub fn pipeline_config(corpus: &std::path::Path, out: &std::path::Path, seed: u64) -> slotentropy::PipelineConfig {
    let mut cfg = slotentropy::PipelineConfig::new(vec![corpus.to_path_buf()]);
    cfg.seed = Some(seed);
    cfg.output_dir = out.to_path_buf();
    cfg
}

pub const FIXTURE_PARTICIPLES: [&str; 6] = ["stain", "make", "lead", "write", "base", "drive"];

pub fn load_fixture() -> Vec<Sentence> {
    let f = File::open(fixture("handparsed.conllu")).unwrap();
    ConlluReader::new(BufReader::new(f)).map(|s| s.unwrap()).collect()
}

pub fn extractors(sentences: &[Sentence], config: ExtractConfig) -> Vec<Extractor> {
    let mut lex = Lexicon::new();
    for s in sentences {
        lex.observe(s, &NominalTags::default());
    }
    let config = Arc::new(config);
    FIXTURE_PARTICIPLES
        .iter()
        .map(|p| Extractor::new(p, lex.participle_forms(p), config.clone()))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Fate {
    Filter(String),
    Dependency,
}

pub fn run(
    sentences: &[Sentence],
    ex: &[Extractor],
) -> (Vec<ConstructionMatch>, BTreeSet<(String, ConstructionKind, Fate)>) {
    let mut accepted = Vec::new();
    let mut rejected = BTreeSet::new();
    for s in sentences {
        for e in ex {
            for kind in ConstructionKind::ALL {
                for o in e.outcomes(s, kind) {
                    match o.outcome {
                        Outcome::Accepted(m) => accepted.push(m),
                        Outcome::RejectedByFilter(r) => {
                            rejected.insert((s.id.clone(), kind, Fate::Filter(format!("{r:?}"))));
                        }
                        Outcome::RejectedByDependency => {
                            rejected.insert((s.id.clone(), kind, Fate::Dependency));
                        }
                    }
                }
            }
        }
    }
    (accepted, rejected)
}

pub fn expected() -> Vec<ConstructionMatch> {
    let f = File::open(fixture("expected.tsv")).unwrap();
    read_matches_tsv(BufReader::new(f)).unwrap()
}
