//! Command-line interface.
//!
//! Four subcommands cover the workflow: `extract` runs the pipeline over
//! a crawl or a saved corpus and writes a spec; `train` and `cv` manage
//! the URL classifier; `diff` compares a generated spec with an existing
//! one. Exit codes are part of the contract: 0 success, 1 usage or input
//! errors, 2 when extraction classifies no API URLs, 3 when a diff finds
//! mismatches.

use std::io::Write as _;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{ArgGroup, Parser, Subcommand};

use docforge::classifier::{self, LinearModel};
use docforge::corpus::{self, CrawlConfig};
use docforge::{diff, pipeline, specio, Error};

/// The model shipped with the binary, trained on the bundled labeled
/// corpus. `--model` overrides it.
const DEFAULT_MODEL: &str = include_str!("../data/default-model.json");

#[derive(Parser)]
#[command(
    name = "docforge",
    version,
    about = "Extract web API specifications from HTML documentation"
)]
struct Cli {
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract a specification from documentation pages.
    #[command(group(
        ArgGroup::new("input").required(true).args(["seed", "input_dir"])
    ))]
    Extract {
        /// Seed URL to crawl.
        #[arg(long)]
        seed: Option<String>,
        /// Directory of saved .html pages to load instead of crawling.
        #[arg(long)]
        input_dir: Option<PathBuf>,
        /// Where to write the specification JSON.
        #[arg(long)]
        out: PathBuf,
        /// Classifier model file (defaults to the built-in model).
        #[arg(long)]
        model: Option<PathBuf>,
        /// Probe candidate URLs over HTTP for richer features.
        #[arg(long)]
        probe: bool,
        /// Crawl page budget.
        #[arg(long, default_value_t = 200)]
        max_pages: usize,
        /// Crawl link depth budget.
        #[arg(long, default_value_t = 3)]
        max_depth: usize,
        /// Cache crawled bodies here and reuse them on later runs.
        #[arg(long)]
        cache_dir: Option<PathBuf>,
    },
    /// Train the URL classifier on a labeled corpus.
    Train {
        /// Directory of saved .html pages.
        #[arg(long)]
        corpus: PathBuf,
        /// CSV with page,url,label rows.
        #[arg(long)]
        labels: PathBuf,
        /// Where to write the model JSON.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = classifier::DEFAULT_EPOCHS)]
        epochs: usize,
        #[arg(long, default_value_t = classifier::DEFAULT_REG)]
        reg: f64,
        #[arg(long, default_value_t = classifier::DEFAULT_SEED)]
        seed: u64,
    },
    /// Cross-validate the classifier on a labeled corpus.
    Cv {
        /// Directory of saved .html pages.
        #[arg(long)]
        corpus: PathBuf,
        /// CSV with page,url,label rows.
        #[arg(long)]
        labels: PathBuf,
        #[arg(long, default_value_t = 10)]
        folds: usize,
        #[arg(long, default_value_t = classifier::DEFAULT_SEED)]
        seed: u64,
    },
    /// Compare a generated specification against an existing one.
    Diff {
        /// The freshly extracted specification.
        #[arg(long)]
        generated: PathBuf,
        /// The reference specification to compare against.
        #[arg(long)]
        existing: PathBuf,
        /// Write the full JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };

    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .init();

    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::NoApiUrls => 2,
                _ => 1,
            }
        }
    }
}

fn dispatch(command: Command) -> Result<i32, Error> {
    match command {
        Command::Extract {
            seed,
            input_dir,
            out,
            model,
            probe,
            max_pages,
            max_depth,
            cache_dir,
        } => {
            let model = match model {
                Some(path) => LinearModel::load(&path)?,
                None => LinearModel::from_json(DEFAULT_MODEL)?,
            };
            let (pages, source) = match (&seed, &input_dir) {
                (Some(seed), None) => {
                    let mut config = CrawlConfig::new(seed);
                    config.max_pages = max_pages;
                    config.max_depth = max_depth;
                    let pages = corpus::crawl_with_cache(&config, cache_dir.as_deref())?;
                    (pages, seed.clone())
                }
                (None, Some(dir)) => {
                    let source = dir
                        .file_name()
                        .map(|n| n.to_string_lossy().into_owned())
                        .unwrap_or_else(|| dir.to_string_lossy().into_owned());
                    (corpus::load_dir(dir)?, source)
                }
                // clap's ArgGroup makes the remaining combinations
                // unrepresentable.
                _ => unreachable!("clap enforces exactly one input source"),
            };
            let extraction = pipeline::extract_spec(&pages, &model, probe, &source)?;
            specio::save(&extraction.spec, &out)?;
            let mut err = std::io::stderr().lock();
            let _ = writeln!(err, "pages:      {}", extraction.pages);
            let _ = writeln!(err, "candidates: {}", extraction.candidates);
            let _ = writeln!(err, "api urls:   {}", extraction.api_urls);
            let _ = writeln!(err, "base url:   {}", extraction.spec.base);
            let _ = writeln!(err, "templates:  {}", extraction.templates);
            let _ = writeln!(err, "endpoints:  {}", extraction.spec.endpoints.len());
            let _ = writeln!(err, "wrote {}", out.display());
            Ok(0)
        }
        Command::Train {
            corpus: corpus_dir,
            labels,
            out,
            epochs,
            reg,
            seed,
        } => {
            let pages = corpus::load_dir(&corpus_dir)?;
            let examples = classifier::load_labeled_examples(&pages, &labels)?;
            let positives = examples.iter().filter(|e| e.label).count();
            let model = classifier::train(&examples, epochs, reg, seed)?;
            model.save(&out)?;
            eprintln!(
                "trained on {} examples ({} positive) over {} epochs; wrote {}",
                examples.len(),
                positives,
                epochs,
                out.display()
            );
            Ok(0)
        }
        Command::Cv {
            corpus: corpus_dir,
            labels,
            folds,
            seed,
        } => {
            let pages = corpus::load_dir(&corpus_dir)?;
            let examples = classifier::load_labeled_examples(&pages, &labels)?;
            let (accuracy, f1) = classifier::cross_validate(&examples, folds, seed)?;
            println!("accuracy {accuracy:.3}");
            println!("f1 {f1:.3}");
            Ok(0)
        }
        Command::Diff {
            generated,
            existing,
            out,
        } => {
            let generated = specio::load(&generated)?;
            let existing = specio::load(&existing)?;
            let report = diff::diff_specs(&generated, &existing);
            if let Some(out) = out {
                std::fs::write(&out, diff::render_report(&report))?;
            }
            print!("{}", diff::summary(&report));
            Ok(if report.has_mismatch() { 3 } else { 0 })
        }
    }
}
