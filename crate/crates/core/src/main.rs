use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use slotentropy::config::{ParticipleSelection, PipelineConfig};
use slotentropy::cql::parse_query;
use slotentropy::entropy::AlphaKey;
use slotentropy::pipeline::{
    entropy_stage, extract_stage, read_matches, read_records, report_stage, stats_stage, with_jobs, write_stats,
    Manifest, PipelineError, StatsReport,
};
use slotentropy::stats::format_p;
use slotentropy::synth::{generate_synthetic_corpus, SynthSpec};

#[derive(Parser)]
#[command(
    name = "slotentropy",
    version,
    about = "Slot entropy of participial compounds vs. phrasal paraphrases"
)]
struct Cli {
    /// More log output (repeatable).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Every stage, config to figures.
    Run(StageArgs),
    /// Query and validate matches; writes matches.tsv and manifest.json.
    Extract(StageArgs),
    /// Inclusion, downsampling and entropy; writes entropy.csv.
    Entropy(StageArgs),
    /// Mixed model, likelihood-ratio and permutation tests; writes stats.json.
    Stats(StageArgs),
    /// Figure tables and charts from entropy.csv.
    Report(StageArgs),
    /// Generate a synthetic corpus with planted matches.
    Synth(SynthArgs),
    /// Query-language utilities.
    Cql {
        #[command(subcommand)]
        command: CqlCommand,
    },
}

#[derive(Subcommand)]
enum CqlCommand {
    /// Parse a query and print its canonical form.
    Check { query: String },
}

#[derive(Args)]
struct StageArgs {
    /// Pipeline config (TOML).
    #[arg(short, long)]
    config: PathBuf,
    /// Master seed; overrides SLOTENTROPY_SEED and the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Tokens sampled per cell before computing entropy.
    #[arg(long)]
    sample_n: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker thread cap.
    #[arg(long)]
    jobs: Option<usize>,
    /// Permit an adverb between noun and participle in reduced relatives.
    #[arg(long)]
    rr_allow_adverb: bool,
    /// Require hyphenated α to be attested with a nominal tag.
    #[arg(long)]
    hyphen_noun_lexicon: bool,
    /// Key α by `lemma` or `form`.
    #[arg(long, value_parser = parse_alpha_key)]
    alpha_key: Option<AlphaKey>,
    /// `auto` or a comma-separated lemma list.
    #[arg(long)]
    participles: Option<ParticipleSelection>,
    /// Corpus file; repeat to replace the configured list.
    #[arg(long)]
    corpus: Vec<PathBuf>,
}

fn parse_alpha_key(s: &str) -> Result<AlphaKey, String> {
    match s {
        "lemma" => Ok(AlphaKey::Lemma),
        "form" => Ok(AlphaKey::Form),
        _ => Err(format!("expected `lemma` or `form`, got `{s}`")),
    }
}

#[derive(Args)]
struct SynthArgs {
    /// Generator spec (TOML), or `bundled`.
    #[arg(long)]
    spec: String,
    /// Output directory for corpus.conllu, truth.tsv and pipeline.toml.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
}

impl StageArgs {
    fn load(&self) -> Result<PipelineConfig, PipelineError> {
        let mut cfg = PipelineConfig::load(&self.config)?;
        cfg.apply_env()?;
        if let Some(s) = self.seed {
            cfg.seed = Some(s);
        }
        if let Some(n) = self.sample_n {
            cfg.sample_n = n;
        }
        if let Some(o) = &self.out {
            cfg.output_dir = o.clone();
        }
        if self.jobs.is_some() {
            cfg.jobs = self.jobs;
        }
        cfg.rr_allow_adverb |= self.rr_allow_adverb;
        cfg.hyphen_noun_lexicon |= self.hyphen_noun_lexicon;
        if let Some(k) = self.alpha_key {
            cfg.alpha_key = k;
        }
        if let Some(p) = &self.participles {
            cfg.participles = p.clone();
        }
        if !self.corpus.is_empty() {
            cfg.corpus_paths = self.corpus.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn print_inclusion(m: &Manifest) {
    let Some(inc) = &m.inclusion else { return };
    println!(
        "participles: {} candidate(s), {} included",
        m.participles.candidates.len(),
        inc.included.len()
    );
    if !inc.excluded.insufficient_raw_tokens.is_empty() {
        println!(
            "excluded, insufficient raw tokens: {}",
            inc.excluded.insufficient_raw_tokens.join(", ")
        );
    }
    if !inc.excluded.insufficient_parsed_tokens.is_empty() {
        println!(
            "excluded, insufficient parsed tokens: {}",
            inc.excluded.insufficient_parsed_tokens.join(", ")
        );
    }
}

fn print_stats(s: &StatsReport) {
    println!("{:<18} {:>9} {:>8} {:>8}  p", "term", "beta", "se", "t");
    for term in s.model.beta.keys() {
        println!(
            "{:<18} {:>9.4} {:>8.4} {:>8.2}  {}",
            term,
            s.model.beta[term],
            s.model.se[term],
            s.model.t[term],
            format_p(s.model.p[term])
        );
    }
    println!(
        "sigma_u2 = {:.5}, sigma_e2 = {:.5}, loglik = {:.4}",
        s.model.sigma_u2, s.model.sigma_e2, s.model.loglik
    );
    let l = &s.lrt_construction;
    println!("construction: chi2({}) = {:.2}, p {}", l.df, l.chi2, format_p(l.p));
    let l = &s.lrt_phrasal_only;
    println!(
        "passive vs reduced relative: chi2({}) = {:.4}, p {}",
        l.df,
        l.chi2,
        format_p(l.p)
    );
    for (name, r) in &s.permutation {
        println!("permutation {name}: mean diff {:.4}, p {}", r.statistic, format_p(r.p));
    }
}

fn stage(cmd: Command) -> Result<(), PipelineError> {
    match cmd {
        Command::Run(a) => {
            let cfg = a.load()?;
            let r = slotentropy::run_pipeline(&cfg)?;
            print_inclusion(&r.manifest);
            print_stats(&r.stats);
            println!("outputs in {}", cfg.output_dir.display());
        }
        Command::Extract(a) => {
            let cfg = a.load()?;
            let (x, _) = with_jobs(cfg.jobs, || extract_stage(&cfg))?;
            println!(
                "{} sentence(s), {} participle(s), {} valid match(es)",
                x.ingest.sentences_kept,
                x.selection.candidates.len(),
                x.matches.len()
            );
        }
        Command::Entropy(a) => {
            let cfg = a.load()?;
            let matches = read_matches(&cfg.output_dir)?;
            let mut manifest = Manifest::read(&cfg.output_dir)?;
            let res = entropy_stage(&cfg, &matches, &mut manifest);
            print_inclusion(&manifest);
            let records = res?;
            println!("{} entropy record(s)", records.len());
        }
        Command::Stats(a) => {
            let cfg = a.load()?;
            let records = read_records(&cfg.output_dir)?;
            let s = with_jobs(cfg.jobs, || stats_stage(&records, cfg.n_perm, cfg.seed()))?;
            write_stats(&cfg.output_dir, &s)?;
            print_stats(&s);
        }
        Command::Report(a) => {
            let cfg = a.load()?;
            let records = read_records(&cfg.output_dir)?;
            report_stage(&cfg.output_dir, &records)?;
        }
        Command::Synth(a) => synth(&a)?,
        Command::Cql { command } => match command {
            CqlCommand::Check { query } => match parse_query(&query) {
                Ok(ast) => {
                    println!("{}", ast.render());
                    println!("{} token pattern(s)", ast.sequence.len());
                }
                Err(e) => {
                    let caret: String = " ".repeat(e.offset);
                    return Err(PipelineError::Input(format!("{query}\n{caret}^\n{e}")));
                }
            },
        },
    }
    Ok(())
}

fn synth(a: &SynthArgs) -> Result<(), PipelineError> {
    let mut spec = if a.spec == "bundled" {
        SynthSpec::bundled()
    } else {
        let path = Path::new(&a.spec);
        let text = std::fs::read_to_string(path).map_err(|source| PipelineError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        toml::from_str(&text).map_err(|e| PipelineError::Input(format!("{}: {e}", path.display())))?
    };
    if let Some(s) = a.seed {
        spec.seed = s;
    }
    let corpus = generate_synthetic_corpus(&spec).map_err(PipelineError::Input)?;
    let io = |p: &Path| {
        let p = p.to_path_buf();
        move |source| PipelineError::Io { path: p, source }
    };
    std::fs::create_dir_all(&a.out).map_err(io(&a.out))?;
    let corpus_path = a.out.join("corpus.conllu");
    let mut w = std::io::BufWriter::new(std::fs::File::create(&corpus_path).map_err(io(&corpus_path))?);
    corpus.write_conllu(&mut w).map_err(io(&corpus_path))?;
    std::io::Write::flush(&mut w).map_err(io(&corpus_path))?;
    let truth_path = a.out.join("truth.tsv");
    let f = std::fs::File::create(&truth_path).map_err(io(&truth_path))?;
    corpus
        .write_truth(std::io::BufWriter::new(f))
        .map_err(io(&truth_path))?;
    let cfg_path = a.out.join("pipeline.toml");
    let cfg = format!(
        "corpus_paths = [\"corpus.conllu\"]\nseed = {}\nsample_n = {}\noutput_dir = \"results\"\n",
        spec.seed, spec.sample_n
    );
    std::fs::write(&cfg_path, cfg).map_err(io(&cfg_path))?;
    println!(
        "{} sentence(s), {} planted match(es) in {}",
        corpus.sentences.len(),
        corpus.truth.len(),
        a.out.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match stage(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
