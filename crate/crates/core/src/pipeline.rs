//! End-to-end orchestration: ingest → query → extract → inclusion →
//! downsample → entropy → stats, with artifacts written to the output
//! directory. Each stage can also run on its own from the previous stage's
//! files.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::config::{ConfigError, ParticipleSelection, PipelineConfig};
use crate::conllu::{ConlluError, ConlluReader, Deduplicator, NominalTags, Sentence};
use crate::entropy::{
    apply_inclusion, cell_seed, collect, downsample, entropy, read_entropy_csv, write_entropy_csv, CellKey, Deficit,
    EntropyRecord, Stage,
};
use crate::extract::{
    read_matches_tsv, split_hyphenated, write_matches_tsv, ConstructionKind, ConstructionMatch, ExtractConfig,
    Extractor, Outcome,
};
use crate::figures::{emit_fig1_data, emit_fig2_data, fig1_svg, fig2_svg};
use crate::lexicon::Lexicon;
use crate::stats::{
    fit_lmm, fit_lmm_levels, lrt, permutation_test, LmmError, LmmFit, LongRow, LrtResult, PermutationResult,
};

pub const MATCHES_FILE: &str = "matches.tsv";
pub const ENTROPY_FILE: &str = "entropy.csv";
pub const STATS_FILE: &str = "stats.json";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const FIG1_FILE: &str = "fig1.csv";
pub const FIG2_FILE: &str = "fig2.csv";
pub const PREPOSITIONS_FILE: &str = "prepositions.csv";
pub const FIG1_SVG: &str = "fig1.svg";
pub const FIG2_SVG: &str = "fig2.svg";

const CHUNK: usize = 2048;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Input(String),
    #[error("empty analysis set: {0}")]
    EmptyAnalysisSet(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl PipelineError {
    /// 1 input/config, 2 empty analysis set, 3 internal invariant.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) | PipelineError::Io { .. } | PipelineError::Input(_) => 1,
            PipelineError::EmptyAnalysisSet(_) => 2,
            PipelineError::Invariant(_) => 3,
        }
    }
}

impl From<LmmError> for PipelineError {
    fn from(e: LmmError) -> Self {
        match e {
            LmmError::TooFewGroups(n) => {
                PipelineError::EmptyAnalysisSet(format!("{n} participle(s) survive; the model needs at least 2"))
            }
            other => PipelineError::Invariant(format!("model fit: {other}")),
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), PipelineError> {
    std::fs::write(path, bytes).map_err(io_err(path))
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FileIngest {
    pub path: PathBuf,
    pub sentences: u64,
    pub format_errors: u64,
    pub validation_errors: u64,
    pub duplicates_dropped: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IngestStats {
    pub files: Vec<FileIngest>,
    /// Sentences passed downstream after error skipping and deduplication.
    pub sentences_kept: u64,
}

/// Streams every corpus file once, skipping malformed blocks with a warning
/// and dropping exact duplicates when enabled.
pub fn stream_corpus(
    cfg: &PipelineConfig,
    mut visit: impl FnMut(Sentence) -> Result<(), PipelineError>,
) -> Result<IngestStats, PipelineError> {
    let mut stats = IngestStats::default();
    let mut dedup = Deduplicator::new();
    for path in &cfg.corpus_paths {
        let file = File::open(path).map_err(io_err(path))?;
        let mut fs = FileIngest {
            path: path.clone(),
            ..Default::default()
        };
        for item in ConlluReader::with_tag_map(BufReader::new(file), cfg.tagset) {
            match item {
                Ok(s) => {
                    fs.sentences += 1;
                    if cfg.dedup && !dedup.admit(&s) {
                        fs.duplicates_dropped += 1;
                        continue;
                    }
                    stats.sentences_kept += 1;
                    visit(s)?;
                }
                Err(ConlluError::Io(source)) => {
                    return Err(PipelineError::Io {
                        path: path.clone(),
                        source,
                    })
                }
                Err(e) => {
                    log::warn!("{}: {e}", path.display());
                    match e {
                        ConlluError::Format { .. } => fs.format_errors += 1,
                        _ => fs.validation_errors += 1,
                    }
                }
            }
        }
        stats.files.push(fs);
    }
    Ok(stats)
}

/// Query hits and their fate for one (participle, construction) cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellCounts {
    pub participle: String,
    pub construction: ConstructionKind,
    /// All query hits in the corpus.
    pub raw_hits: u64,
    /// Hits kept under the raw cap; the raw count used for inclusion.
    pub pulled: u64,
    pub valid: u64,
    pub rejected_by_filter: u64,
    pub rejected_by_dependency: u64,
}

impl CellCounts {
    fn balanced(&self) -> bool {
        self.pulled == self.valid + self.rejected_by_filter + self.rejected_by_dependency
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    pub mode: String,
    pub candidates: Vec<String>,
}

/// Explicit lists pass through (deduplicated, in order); `auto` ranks
/// attested participle lemmas by hyphenated-compound frequency.
pub fn select_participles(cfg: &PipelineConfig, lexicon: &Lexicon) -> Vec<String> {
    match &cfg.participles {
        ParticipleSelection::List(l) => {
            let mut seen = BTreeSet::new();
            l.iter().filter(|p| seen.insert(p.as_str())).cloned().collect()
        }
        ParticipleSelection::Auto => lexicon.discover_candidates(cfg.auto_candidates),
    }
}

pub struct Extraction {
    pub matches: Vec<ConstructionMatch>,
    pub cells: Vec<CellCounts>,
    pub ingest: IngestStats,
    pub selection: SelectionReport,
}

struct CandidateIndex {
    by_lemma: HashMap<String, usize>,
    by_suffix: HashMap<String, Vec<usize>>,
}

impl CandidateIndex {
    fn new(extractors: &[Extractor], lexicon: &Lexicon) -> Self {
        let mut by_lemma = HashMap::new();
        let mut by_suffix: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, e) in extractors.iter().enumerate() {
            by_lemma.insert(e.lemma().to_string(), i);
            for f in lexicon.participle_forms(e.lemma()) {
                by_suffix.entry(f).or_default().push(i);
            }
        }
        CandidateIndex { by_lemma, by_suffix }
    }

    fn candidates(&self, s: &Sentence) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for t in &s.tokens {
            if t.xpos == "VVN" {
                if let Some(&i) = self.by_lemma.get(&t.lemma) {
                    out.insert(i);
                }
            }
            if let Some((_, suffix)) = split_hyphenated(&t.form) {
                if let Some(ids) = self.by_suffix.get(&suffix.to_lowercase()) {
                    out.extend(ids);
                }
            }
        }
        out
    }
}

type Hit = (usize, ConstructionKind, Outcome);

fn sentence_hits(s: &Sentence, index: &CandidateIndex, extractors: &[Extractor]) -> Vec<Hit> {
    let mut hits = Vec::new();
    for i in index.candidates(s) {
        for kind in ConstructionKind::ALL {
            for o in extractors[i].outcomes(s, kind) {
                hits.push((i, kind, o.outcome));
            }
        }
    }
    hits
}

/// First pass builds the lexicon and picks participles; the second runs the
/// four queries per candidate sentence in parallel chunks, merging in corpus
/// order so the raw cap and match order are scheduling-independent.
pub fn run_extraction(cfg: &PipelineConfig) -> Result<Extraction, PipelineError> {
    let nominal = NominalTags::new(cfg.possessive_tags.iter().cloned());
    let mut lexicon = Lexicon::new();
    let ingest = stream_corpus(cfg, |s| {
        lexicon.observe(&s, &nominal);
        Ok(())
    })?;
    let participles = select_participles(cfg, &lexicon);
    log::info!(
        "{} sentences kept; {} participle(s) selected",
        ingest.sentences_kept,
        participles.len()
    );

    let xcfg = Arc::new(ExtractConfig {
        deprels: cfg.deprel_sets(),
        nominal,
        relativizers: cfg.relativizers.clone(),
        rr_allow_adverb: cfg.rr_allow_adverb,
        hyphen_noun_lexicon: cfg
            .hyphen_noun_lexicon
            .then(|| Arc::new(lexicon.nominal_lemmas().clone())),
    });
    let extractors: Vec<Extractor> = participles
        .iter()
        .map(|p| Extractor::new(p, lexicon.participle_forms(p), xcfg.clone()))
        .collect();
    let index = CandidateIndex::new(&extractors, &lexicon);

    let mut cells: Vec<[CellCounts; 4]> = participles
        .iter()
        .map(|p| {
            ConstructionKind::ALL.map(|k| CellCounts {
                participle: p.clone(),
                construction: k,
                raw_hits: 0,
                pulled: 0,
                valid: 0,
                rejected_by_filter: 0,
                rejected_by_dependency: 0,
            })
        })
        .collect();
    let mut matches = Vec::new();
    let kind_slot = |k: ConstructionKind| ConstructionKind::ALL.iter().position(|&x| x == k).expect("kind");
    let mut merge = |chunk: &mut Vec<Sentence>| {
        let hits: Vec<Vec<Hit>> = chunk
            .par_iter()
            .map(|s| sentence_hits(s, &index, &extractors))
            .collect();
        for (i, kind, outcome) in hits.into_iter().flatten() {
            let c = &mut cells[i][kind_slot(kind)];
            c.raw_hits += 1;
            if c.pulled >= cfg.raw_cap {
                continue;
            }
            c.pulled += 1;
            match outcome {
                Outcome::Accepted(m) => {
                    c.valid += 1;
                    matches.push(m);
                }
                Outcome::RejectedByFilter(_) => c.rejected_by_filter += 1,
                Outcome::RejectedByDependency => c.rejected_by_dependency += 1,
            }
        }
        chunk.clear();
    };
    let mut chunk = Vec::with_capacity(CHUNK);
    let second = stream_corpus(cfg, |s| {
        chunk.push(s);
        if chunk.len() == CHUNK {
            merge(&mut chunk);
        }
        Ok(())
    })?;
    merge(&mut chunk);
    if second != ingest {
        return Err(PipelineError::Invariant("corpus changed between passes".into()));
    }

    let cells: Vec<CellCounts> = cells.into_iter().flatten().collect();
    if let Some(c) = cells.iter().find(|c| !c.balanced()) {
        return Err(PipelineError::Invariant(format!(
            "accounting for {}/{}: pulled {} != {} valid + {} filtered + {} dependency",
            c.participle, c.construction, c.pulled, c.valid, c.rejected_by_filter, c.rejected_by_dependency
        )));
    }
    let selection = SelectionReport {
        mode: match cfg.participles {
            ParticipleSelection::Auto => "auto".into(),
            ParticipleSelection::List(_) => "list".into(),
        },
        candidates: participles,
    };
    Ok(Extraction {
        matches,
        cells,
        ingest,
        selection,
    })
}

/// Participles excluded at each stage; one participle may appear under both.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Exclusions {
    pub insufficient_raw_tokens: Vec<String>,
    pub insufficient_parsed_tokens: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct InclusionSummary {
    pub min_raw: u64,
    pub min_parsed: u64,
    pub included: Vec<String>,
    pub excluded: Exclusions,
    pub deficits: BTreeMap<String, Vec<Deficit>>,
}

/// Config echo, seed and counts at every stage. No timestamps, so equal
/// inputs give equal bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub seed: u64,
    pub config: PipelineConfig,
    pub ingest: IngestStats,
    pub participles: SelectionReport,
    pub cells: Vec<CellCounts>,
    pub totals: BTreeMap<ConstructionKind, CellTotals>,
    pub inclusion: Option<InclusionSummary>,
    pub sample_n: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellTotals {
    pub raw_hits: u64,
    pub pulled: u64,
    pub valid: u64,
    pub rejected_by_filter: u64,
    pub rejected_by_dependency: u64,
}

impl Manifest {
    fn new(cfg: &PipelineConfig, x: &Extraction) -> Self {
        let mut totals: BTreeMap<ConstructionKind, CellTotals> = BTreeMap::new();
        for c in &x.cells {
            let t = totals.entry(c.construction).or_default();
            t.raw_hits += c.raw_hits;
            t.pulled += c.pulled;
            t.valid += c.valid;
            t.rejected_by_filter += c.rejected_by_filter;
            t.rejected_by_dependency += c.rejected_by_dependency;
        }
        Manifest {
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: cfg.seed(),
            config: cfg.clone(),
            ingest: x.ingest.clone(),
            participles: x.selection.clone(),
            cells: x.cells.clone(),
            totals,
            inclusion: None,
            sample_n: None,
        }
    }

    pub fn read(dir: &Path) -> Result<Self, PipelineError> {
        let path = dir.join(MANIFEST_FILE);
        let text = std::fs::read_to_string(&path).map_err(io_err(&path))?;
        serde_json::from_str(&text).map_err(|e| PipelineError::Input(format!("{}: {e}", path.display())))
    }

    pub fn write(&self, dir: &Path) -> Result<(), PipelineError> {
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        write_file(&dir.join(MANIFEST_FILE), text.as_bytes())
    }
}

pub const PREPOSITIONS_HEADER: &str = "participle,construction,preposition,count";

/// Validated phrasal matches per (participle, construction, lowercased
/// preposition).
pub fn preposition_table(matches: &[ConstructionMatch]) -> String {
    let mut counts: BTreeMap<(&str, ConstructionKind, String), u64> = BTreeMap::new();
    for m in matches {
        if let Some(p) = &m.preposition {
            *counts
                .entry((&m.participle_lemma, m.kind, p.to_lowercase()))
                .or_default() += 1;
        }
    }
    let mut out = format!("{PREPOSITIONS_HEADER}\n");
    for ((participle, kind, prep), n) in counts {
        out.push_str(&format!("{participle},{kind},{prep},{n}\n"));
    }
    out
}

fn ensure_dir(dir: &Path) -> Result<(), PipelineError> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))
}

/// Writes `matches.tsv`, `prepositions.csv` and a manifest with extraction
/// counts.
pub fn extract_stage(cfg: &PipelineConfig) -> Result<(Extraction, Manifest), PipelineError> {
    let x = run_extraction(cfg)?;
    let dir = &cfg.output_dir;
    ensure_dir(dir)?;
    let path = dir.join(MATCHES_FILE);
    let file = File::create(&path).map_err(io_err(&path))?;
    let mut w = BufWriter::new(file);
    write_matches_tsv(&mut w, &x.matches).map_err(io_err(&path))?;
    w.flush().map_err(io_err(&path))?;
    write_file(&dir.join(PREPOSITIONS_FILE), preposition_table(&x.matches).as_bytes())?;
    let manifest = Manifest::new(cfg, &x);
    manifest.write(dir)?;
    Ok((x, manifest))
}

pub fn read_matches(dir: &Path) -> Result<Vec<ConstructionMatch>, PipelineError> {
    let path = dir.join(MATCHES_FILE);
    let file = File::open(&path).map_err(io_err(&path))?;
    read_matches_tsv(BufReader::new(file)).map_err(|e| PipelineError::Input(format!("{}: {e}", path.display())))
}

pub fn read_records(dir: &Path) -> Result<Vec<EntropyRecord>, PipelineError> {
    let path = dir.join(ENTROPY_FILE);
    let file = File::open(&path).map_err(io_err(&path))?;
    read_entropy_csv(BufReader::new(file)).map_err(|e| PipelineError::Input(format!("{}: {e}", path.display())))
}

/// Inclusion, seeded downsampling and entropy. The inclusion outcome is
/// recorded in `manifest` before an empty analysis set is reported.
pub fn entropy_stage(
    cfg: &PipelineConfig,
    matches: &[ConstructionMatch],
    manifest: &mut Manifest,
) -> Result<Vec<EntropyRecord>, PipelineError> {
    let mut raw: BTreeMap<CellKey, u64> = BTreeMap::new();
    for c in &manifest.cells {
        raw.insert((c.participle.clone(), c.construction), c.pulled);
    }
    let parsed = collect(matches, cfg.alpha_key);
    for (key, sample) in &parsed {
        if !raw.contains_key(key) {
            return Err(PipelineError::Input(format!(
                "matches for {}/{} have no extraction counts",
                key.0, key.1
            )));
        }
        let valid = manifest
            .cells
            .iter()
            .find(|c| c.participle == key.0 && c.construction == key.1)
            .map_or(0, |c| c.valid);
        if sample.total() != valid {
            return Err(PipelineError::Input(format!(
                "{}/{}: {} matches but the manifest records {valid} valid",
                key.0,
                key.1,
                sample.total()
            )));
        }
    }
    let report = apply_inclusion(&raw, &parsed, cfg.min_raw, cfg.min_parsed);
    let owned = |v: Vec<&str>| v.into_iter().map(String::from).collect::<Vec<_>>();
    manifest.inclusion = Some(InclusionSummary {
        min_raw: cfg.min_raw,
        min_parsed: cfg.min_parsed,
        included: report.included.iter().cloned().collect(),
        excluded: Exclusions {
            insufficient_raw_tokens: owned(report.excluded_at(Stage::Raw)),
            insufficient_parsed_tokens: owned(report.excluded_at(Stage::Parsed)),
        },
        deficits: report.excluded.clone(),
    });
    manifest.sample_n = Some(cfg.sample_n);
    manifest.write(&cfg.output_dir)?;
    if report.included.is_empty() {
        return Err(PipelineError::EmptyAnalysisSet(format!(
            "none of {} participle(s) reach {} raw and {} parsed tokens in every construction",
            manifest.participles.candidates.len(),
            cfg.min_raw,
            cfg.min_parsed
        )));
    }

    let mut records = Vec::new();
    for p in &report.included {
        for kind in ConstructionKind::ALL {
            let sample = &parsed[&(p.clone(), kind)];
            let drawn = downsample(sample, cfg.sample_n, cell_seed(cfg.seed(), p, kind))
                .map_err(|e| PipelineError::Invariant(format!("{p}/{kind}: {e}")))?;
            let h = entropy(&drawn).map_err(|e| PipelineError::Invariant(format!("{p}/{kind}: {e}")))?;
            records.push(EntropyRecord {
                participle: p.clone(),
                kind,
                n: cfg.sample_n,
                entropy_bits: h,
            });
        }
    }
    let path = cfg.output_dir.join(ENTROPY_FILE);
    let mut buf = Vec::new();
    write_entropy_csv(&mut buf, &records).map_err(io_err(&path))?;
    write_file(&path, &buf)?;
    Ok(records)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelSummary {
    pub beta: BTreeMap<String, f64>,
    pub se: BTreeMap<String, f64>,
    pub t: BTreeMap<String, f64>,
    /// Normal-approximation two-sided p for each t.
    pub p: BTreeMap<String, f64>,
    pub sigma_u2: f64,
    pub sigma_e2: f64,
    pub loglik: f64,
    pub n_obs: usize,
    pub n_groups: usize,
}

impl From<&LmmFit> for ModelSummary {
    fn from(f: &LmmFit) -> Self {
        let by_term = |v: &[f64]| f.terms.iter().cloned().zip(v.iter().copied()).collect();
        ModelSummary {
            beta: by_term(&f.beta),
            se: by_term(&f.se),
            t: by_term(&f.t),
            p: by_term(&f.p_values()),
            sigma_u2: f.sigma_u2,
            sigma_e2: f.sigma_e2,
            loglik: f.loglik,
            n_obs: f.n_obs,
            n_groups: f.n_groups,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsReport {
    /// Construction model, hyphenated baseline.
    pub model: ModelSummary,
    pub null_model: ModelSummary,
    pub lrt_construction: LrtResult,
    /// Passive vs. reduced relative only, passive baseline.
    pub phrasal_model: ModelSummary,
    pub lrt_phrasal_only: LrtResult,
    pub permutation: BTreeMap<String, PermutationResult>,
}

pub const PERMUTATION_CONTRASTS: [(ConstructionKind, ConstructionKind); 4] = [
    (ConstructionKind::Passive, ConstructionKind::Hyphenated),
    (ConstructionKind::ReducedRelative, ConstructionKind::Hyphenated),
    (ConstructionKind::Nvn, ConstructionKind::Hyphenated),
    (ConstructionKind::Passive, ConstructionKind::ReducedRelative),
];

/// Seed for a named sub-stream of the master seed.
pub fn derived_seed(master: u64, label: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update(label.as_bytes());
    u64::from_le_bytes(h.finalize()[..8].try_into().expect("8 bytes"))
}

pub fn stats_stage(records: &[EntropyRecord], n_perm: u64, seed: u64) -> Result<StatsReport, PipelineError> {
    let rows: Vec<LongRow> = records
        .iter()
        .map(|r| LongRow::new(&r.participle, r.kind, r.entropy_bits))
        .collect();
    let full = fit_lmm(&rows, true)?;
    let null = fit_lmm(&rows, false)?;
    let lrt_construction = lrt(&full, &null, (ConstructionKind::ALL.len() - 1) as u32)?;

    let phrasal_levels = [ConstructionKind::Passive, ConstructionKind::ReducedRelative];
    let phrasal_rows: Vec<LongRow> = rows
        .iter()
        .filter(|r| phrasal_levels.contains(&r.construction))
        .cloned()
        .collect();
    let ph_full = fit_lmm_levels(&phrasal_rows, &phrasal_levels, true)?;
    let ph_null = fit_lmm_levels(&phrasal_rows, &phrasal_levels, false)?;
    let lrt_phrasal_only = lrt(&ph_full, &ph_null, 1)?;

    let mut permutation = BTreeMap::new();
    for (a, b) in PERMUTATION_CONTRASTS {
        let name = format!("{a}_vs_{b}");
        let res = permutation_test(&rows, (a, b), n_perm, derived_seed(seed, &name))?;
        permutation.insert(name, res);
    }
    Ok(StatsReport {
        model: (&full).into(),
        null_model: (&null).into(),
        lrt_construction,
        phrasal_model: (&ph_full).into(),
        lrt_phrasal_only,
        permutation,
    })
}

pub fn write_stats(dir: &Path, report: &StatsReport) -> Result<(), PipelineError> {
    let mut text = serde_json::to_string_pretty(report).expect("stats serialize");
    text.push('\n');
    write_file(&dir.join(STATS_FILE), text.as_bytes())
}

pub fn report_stage(dir: &Path, records: &[EntropyRecord]) -> Result<(), PipelineError> {
    let fig = |e: crate::figures::FigureError| PipelineError::Invariant(format!("figure data: {e}"));
    write_file(&dir.join(FIG1_FILE), emit_fig1_data(records).map_err(fig)?.as_bytes())?;
    write_file(&dir.join(FIG2_FILE), emit_fig2_data(records).map_err(fig)?.as_bytes())?;
    write_file(&dir.join(FIG1_SVG), fig1_svg(records).map_err(fig)?.as_bytes())?;
    write_file(&dir.join(FIG2_SVG), fig2_svg(records).map_err(fig)?.as_bytes())?;
    Ok(())
}

pub struct RunReport {
    pub manifest: Manifest,
    pub records: Vec<EntropyRecord>,
    pub stats: StatsReport,
}

/// Runs `f` on a pool capped at `jobs` workers, or the global pool.
pub fn with_jobs<T: Send>(
    jobs: Option<usize>,
    f: impl FnOnce() -> Result<T, PipelineError> + Send,
) -> Result<T, PipelineError> {
    match jobs {
        None => f(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| PipelineError::Invariant(format!("thread pool: {e}")))?
            .install(f),
    }
}

/// All stages; writes matches.tsv, entropy.csv, stats.json, fig1/fig2 (CSV
/// and SVG) and manifest.json under the output directory.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<RunReport, PipelineError> {
    cfg.validate()?;
    with_jobs(cfg.jobs, || {
        let (x, mut manifest) = extract_stage(cfg)?;
        let records = entropy_stage(cfg, &x.matches, &mut manifest)?;
        let stats = stats_stage(&records, cfg.n_perm, cfg.seed())?;
        write_stats(&cfg.output_dir, &stats)?;
        report_stage(&cfg.output_dir, &records)?;
        Ok(RunReport {
            manifest,
            records,
            stats,
        })
    })
}
