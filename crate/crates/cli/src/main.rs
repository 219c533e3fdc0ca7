use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use disclosure_audit::corpus::{load_posts, write_accounts, write_corpus, write_posts, LoadOptions, Platform};
use disclosure_audit::ingest::{adapt_file, load_registry, registry_accounts};
use disclosure_audit::langid::{write_language_labels, LanguageIdentifier, TrigramDetector};
use disclosure_audit::report::{emit_report, run_audit, AuditConfig, ReportFormat};
use disclosure_audit::rules::lexicon::{load_lexicon, Lexicon};
use disclosure_audit::synth::{generate_corpus, load_spec, write_ground_truth};

/// Audit advertising disclosures in influencer post corpora.
#[derive(Parser)]
#[command(name = "audit", version)]
struct Cli {
    /// Worker threads; 1 runs serially. Output does not depend on this.
    #[arg(long, global = true, env = "AUDIT_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full audit and write the report directory.
    Run(RunArgs),
    /// Generate a synthetic corpus with ground truth.
    Synth(SynthArgs),
    /// Detect post languages and write a label file.
    LangidLabel(LangidArgs),
    /// Check a lexicon file and print a summary.
    ValidateLexicon(LexiconArgs),
    /// Convert a platform export into the posts format.
    Ingest(IngestArgs),
    /// Turn a registry file into an accounts file.
    ///
    /// Non-influencer handles are kept and flagged so their posts are
    /// dropped at load.
    Registry(RegistryArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Posts file (JSON lines).
    #[arg(long)]
    corpus: PathBuf,
    /// Accounts file (JSON lines).
    #[arg(long)]
    accounts: PathBuf,
    /// Lexicon TOML; the built-in lexicon when omitted.
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// CSV of `post_id,language` labels that replace detection.
    #[arg(long)]
    language_labels: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// csv, json or all.
    #[arg(long, default_value = "csv")]
    format: ReportFormat,
    /// Skip invalid post lines instead of failing.
    #[arg(long)]
    skip_invalid: bool,
}

#[derive(Args)]
struct SynthArgs {
    /// Synth spec TOML.
    #[arg(long)]
    spec: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Overrides the spec seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Lexicon to plant terms from; the built-in lexicon when omitted.
    #[arg(long)]
    lexicon: Option<PathBuf>,
}

#[derive(Args)]
struct LangidArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// Label file to write.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    skip_invalid: bool,
}

#[derive(Args)]
struct LexiconArgs {
    #[arg(long)]
    lexicon: PathBuf,
}

#[derive(Args)]
struct IngestArgs {
    #[arg(long)]
    platform: Platform,
    #[arg(long)]
    input: PathBuf,
    /// Posts file to write.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RegistryArgs {
    #[arg(long)]
    input: PathBuf,
    /// Accounts file to write.
    #[arg(long)]
    out: PathBuf,
}

fn lexicon_or_default(path: Option<&Path>) -> Result<Lexicon> {
    match path {
        Some(p) => load_lexicon(p).with_context(|| format!("lexicon {}", p.display())),
        None => Ok(Lexicon::default_lexicon()),
    }
}

fn run(args: RunArgs) -> Result<()> {
    let config = AuditConfig {
        corpus: args.corpus,
        accounts: args.accounts,
        lexicon: args.lexicon,
        language_labels: args.language_labels,
        load: LoadOptions {
            skip_invalid: args.skip_invalid,
        },
    };
    let bundle = run_audit(&config, TrigramDetector::bundled())?;
    let written = emit_report(&bundle, &args.out, args.format)?;
    log::info!("wrote {} files under {}", written.len(), args.out.display());
    match bundle.overall_disclosure_rate {
        Some(rate) => println!("{} analyzable posts, {rate:.2}% disclosed", bundle.meta.analyzable_posts),
        None => println!("no analyzable posts"),
    }
    Ok(())
}

fn synth(args: SynthArgs) -> Result<()> {
    let mut spec = load_spec(&args.spec)?;
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    let lexicon = lexicon_or_default(args.lexicon.as_deref())?;
    let (corpus, truth) = generate_corpus(&spec, &lexicon)?;
    std::fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    write_corpus(&corpus, &args.out.join("posts.jsonl"), &args.out.join("accounts.jsonl"))?;
    write_ground_truth(&args.out.join("ground_truth.jsonl"), &truth)?;
    write_language_labels(&args.out.join("language_labels.csv"), truth.language_labels())?;
    println!("{} posts from {} accounts", corpus.len(), corpus.accounts().count());
    Ok(())
}

fn langid_label(args: LangidArgs) -> Result<()> {
    let (posts, skipped) = load_posts(
        &args.corpus,
        LoadOptions {
            skip_invalid: args.skip_invalid,
        },
    )?;
    if skipped > 0 {
        log::warn!("skipped {skipped} invalid lines");
    }
    let detector = TrigramDetector::bundled();
    let rows: Vec<_> = posts.par_iter().map(|p| (p.id.clone(), detector.detect(&p.text))).collect();
    write_language_labels(&args.out, rows)?;
    println!("labelled {} posts ({})", posts.len(), detector.version());
    Ok(())
}

fn validate_lexicon(args: LexiconArgs) -> Result<()> {
    let lex = load_lexicon(&args.lexicon).with_context(|| format!("lexicon {}", args.lexicon.display()))?;
    println!("version {}", lex.version);
    for lang in disclosure_audit::corpus::Language::ANALYZED {
        println!(
            "{}: {} green, {} yellow",
            lang.code(),
            lex.green(lang).len(),
            lex.yellow(lang).len()
        );
    }
    for rule in &lex.am_rules {
        println!("am_rule {}: {} term sets", rule.name, rule.term_sets.len());
    }
    Ok(())
}

fn ingest(args: IngestArgs) -> Result<()> {
    let (posts, report) = adapt_file(args.platform, &args.input)?;
    write_posts(&args.out, &posts)?;
    println!("{} of {} records converted", report.posts_out, report.records_in);
    for (reason, n) in &report.skip_reasons {
        println!("  skipped {n}: {reason}");
    }
    Ok(())
}

fn registry(args: RegistryArgs) -> Result<()> {
    let entries = load_registry(&args.input)?;
    let accounts = registry_accounts(&entries);
    write_accounts(&args.out, &accounts)?;
    let influencers = accounts.iter().filter(|a| a.is_influencer).count();
    println!(
        "{} accounts ({influencers} influencer) from {} registry entries",
        accounts.len(),
        entries.len()
    );
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            bail!("--threads must be at least 1");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    match cli.command {
        Command::Run(a) => run(a),
        Command::Synth(a) => synth(a),
        Command::LangidLabel(a) => langid_label(a),
        Command::ValidateLexicon(a) => validate_lexicon(a),
        Command::Ingest(a) => ingest(a),
        Command::Registry(a) => registry(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("AUDIT_LOG_LEVEL", "warn")).init();
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("audit: error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
