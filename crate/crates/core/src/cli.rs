//! The `sylseg` command line.
//!
//! Settings resolve in order: command-line flag, then the `--config` file
//! (flat `key=value` lines, `#` comments), then the built-in default.

use std::collections::HashMap;
use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::eval::{self, DEFAULT_C_GRID};
use crate::features::FeatureConfig;
use crate::model::{train_model, LinearModel};
use crate::report::{self, Table};
use crate::resources::{Lexicon, NameLists};
use crate::segmenter::{Segmenter, StreamOptions};
use crate::stats::{word_length_distribution, DerivedStats};
use crate::svm::{Loss, SolverParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "sylseg", version = crate::VERSION, about = "Linear-SVM word segmentation")]
struct Cli {
    /// Flat key=value file supplying defaults for any flag below.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for every random choice (default 42).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: available cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Train a model on an underscore-segmented corpus.
    Train {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        features: Option<String>,
        /// Where to write the model.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Segment raw lines from stdin (or --input) to stdout (or --output).
    Segment {
        #[arg(long)]
        model: Option<PathBuf>,
        /// Replace the lexicon stored in the model.
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Fail on the first malformed line instead of echoing it.
        #[arg(long)]
        strict: bool,
        #[arg(long)]
        batch_size: Option<usize>,
    },
    /// Score a predicted segmentation against a gold one.
    Evaluate {
        #[arg(long)]
        gold: Option<PathBuf>,
        #[arg(long)]
        pred: Option<PathBuf>,
        /// Also break scores down by word length. Lexicon and suffixes come
        /// from --model if given, otherwise from --lexicon and the gold file.
        #[arg(long)]
        by_length: bool,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// k-fold cross-validation of one configuration.
    Cv {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        features: Option<String>,
        #[arg(long)]
        k: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Grid search over C for one configuration.
    Grid {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        features: Option<String>,
        #[arg(long)]
        k: Option<usize>,
        /// Comma-separated C values.
        #[arg(long)]
        c_grid: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Grid search for each of the eight configurations containing base.
    Ablate {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        c_grid: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Corpus statistics: word lengths, separable syllables, suffixes.
    /// Tab-separated unless --format says otherwise.
    Stats {
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args, Debug)]
struct DataArgs {
    /// Underscore-segmented training corpus.
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Family-name syllables, one per line.
    #[arg(long)]
    family: Option<PathBuf>,
    /// Middle-name syllables, one per line.
    #[arg(long)]
    middle: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SolverArgs {
    #[arg(long)]
    c: Option<f64>,
    /// hinge or squared_hinge.
    #[arg(long)]
    loss: Option<String>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
}

#[derive(Args, Debug)]
struct OutputArgs {
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Tsv,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        <Format as ValueEnum>::from_str(s, true)
    }
}

/// Values read from the `--config` file.
#[derive(Debug, Default)]
struct Config {
    values: HashMap<String, String>,
}

impl Config {
    fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Config::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| Error::resource(path, e))?;
        Config::parse(&text)
    }

    fn parse(text: &str) -> Result<Self> {
        let mut values = HashMap::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidConfig(format!("config line {}: expected key=value", k + 1))
            })?;
            values.insert(key.trim().replace('-', "_"), value.trim().to_string());
        }
        Ok(Config { values })
    }

    /// Flag if given, else config value, else `default`.
    fn get<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T> {
        Ok(self.opt(flag, key)?.unwrap_or(default))
    }

    fn opt<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::InvalidConfig(format!("config key {key}: bad value {v:?}"))),
        }
    }

    fn required<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<T> {
        self.opt(flag, key)?
            .ok_or_else(|| Error::InvalidConfig(format!("missing --{}", key.replace('_', "-"))))
    }

    fn flag(&self, flag: bool, key: &str) -> Result<bool> {
        Ok(flag || self.opt(None, key)?.unwrap_or(false))
    }
}

/// Settings shared by every subcommand once flags and config are merged.
struct Session {
    config: Config,
    seed: u64,
    workers: usize,
}

impl Session {
    fn features(&self, flag: Option<String>) -> Result<FeatureConfig> {
        let features: FeatureConfig = self.get(flag, "features", "all".to_string())?.parse()?;
        features.validate()?;
        Ok(features)
    }

    fn solver(&self, args: SolverArgs) -> Result<SolverParams> {
        let d = SolverParams::default();
        let loss: Loss = self.get(args.loss, "loss", d.loss.to_string())?.parse()?;
        Ok(SolverParams {
            c: self.get(args.c, "c", d.c)?,
            tol: self.get(args.tol, "tol", d.tol)?,
            max_iter: self.get(args.max_iter, "max_iter", d.max_iter)?,
            seed: self.seed,
            loss,
        })
    }

    fn data(&self, args: DataArgs) -> Result<(Corpus, Lexicon, NameLists)> {
        let corpus_path: PathBuf = self.config.required(args.corpus, "corpus")?;
        let corpus = Corpus::read_segmented(&corpus_path)?;
        let lexicon = self.lexicon(args.lexicon)?.unwrap_or_default();
        let family: Option<PathBuf> = self.config.opt(args.family, "family")?;
        let middle: Option<PathBuf> = self.config.opt(args.middle, "middle")?;
        let names = NameLists::load(family.as_deref(), middle.as_deref())?;
        Ok((corpus, lexicon, names))
    }

    fn lexicon(&self, flag: Option<PathBuf>) -> Result<Option<Lexicon>> {
        self.config
            .opt(flag, "lexicon")?
            .map(|p: PathBuf| Lexicon::load(p))
            .transpose()
    }

    fn k(&self, flag: Option<usize>) -> Result<usize> {
        self.get(flag, "k", 5)
    }

    fn c_grid(&self, flag: Option<String>) -> Result<Vec<f64>> {
        match self.config.opt(flag, "c_grid")? {
            None => Ok(DEFAULT_C_GRID.to_vec()),
            Some(list) => parse_c_grid(&list),
        }
    }

    fn format(&self, args: OutputArgs) -> Result<Format> {
        self.format_or(args, Format::Text)
    }

    fn format_or(&self, args: OutputArgs, default: Format) -> Result<Format> {
        self.get(args.format, "format", default)
    }

    fn get<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T> {
        self.config.get(flag, key, default)
    }
}

fn parse_c_grid(list: &str) -> Result<Vec<f64>> {
    list.split(',')
        .map(|c| {
            c.trim()
                .parse::<f64>()
                .ok()
                .filter(|c| c.is_finite() && *c > 0.0)
                .ok_or_else(|| Error::InvalidConfig(format!("bad C value {c:?}")))
        })
        .collect()
}

fn print_table(table: &Table, format: Format) -> Result<()> {
    let text = match format {
        Format::Text => table.to_text(),
        Format::Csv => table.to_csv(),
        Format::Tsv => table.to_tsv(),
    };
    let mut out = io::stdout().lock();
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("sylseg: {e}");
            match e {
                Error::InvalidConfig(_) => EXIT_USAGE,
                _ => EXIT_DATA,
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    let config = Config::load(cli.config.as_deref())?;
    let default_workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let seed = config.get(cli.seed, "seed", 42)?;
    let workers = config.get(cli.workers, "workers", default_workers)?.max(1);
    // Only the first call in a process can size the global pool.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build_global();
    let session = Session {
        config,
        seed,
        workers,
    };

    match cli.command {
        Command::Train {
            data,
            solver,
            features,
            out,
        } => {
            let features = session.features(features)?;
            let params = session.solver(solver)?;
            let out: PathBuf = session.config.required(out, "out")?;
            let (corpus, lexicon, names) = session.data(data)?;
            let model = train_model(&corpus, &lexicon, &names, features, &params)?;
            model.save(&out)?;
            log::info!("wrote {} weights to {}", model.weights.len(), out.display());
            Ok(())
        }
        Command::Segment {
            model,
            lexicon,
            input,
            output,
            strict,
            batch_size,
        } => {
            let model_path: PathBuf = session.config.required(model, "model")?;
            let model = LinearModel::load(&model_path)?;
            let lexicon = session.lexicon(lexicon)?;
            let segmenter = match &lexicon {
                Some(lex) => Segmenter::with_lexicon(&model, lex),
                None => Segmenter::new(&model),
            };
            let opts = StreamOptions {
                workers: session.workers,
                strict: session.config.flag(strict, "strict")?,
                batch_size: session.get(batch_size, "batch_size", 1024)?,
            };
            let input: Option<PathBuf> = session.config.opt(input, "input")?;
            let output: Option<PathBuf> = session.config.opt(output, "output")?;
            let reader: Box<dyn io::BufRead> = match input {
                Some(p) => Box::new(BufReader::new(
                    File::open(&p).map_err(|e| Error::resource(&p, e))?,
                )),
                None => Box::new(io::stdin().lock()),
            };
            let writer: Box<dyn Write> = match output {
                Some(p) => Box::new(BufWriter::new(
                    File::create(&p).map_err(|e| Error::resource(&p, e))?,
                )),
                None => Box::new(BufWriter::new(io::stdout().lock())),
            };
            let report = segmenter.segment_stream(reader, writer, &opts)?;
            if !report.malformed.is_empty() {
                log::warn!(
                    "{} of {} lines echoed unsegmented",
                    report.malformed.len(),
                    report.lines
                );
            }
            Ok(())
        }
        Command::Evaluate {
            gold,
            pred,
            by_length,
            model,
            lexicon,
            output,
        } => {
            let format = session.format(output)?;
            let gold = Corpus::read_segmented(session.config.required::<PathBuf>(gold, "gold")?)?;
            let pred = Corpus::read_segmented(session.config.required::<PathBuf>(pred, "pred")?)?;
            let metrics = eval::score(&gold, &pred)?;
            print_table(&report::metrics_table(&metrics), format)?;
            if by_length {
                let (lexicon, stats) = match session.config.opt::<PathBuf>(model, "model")? {
                    Some(path) => {
                        let m = LinearModel::load(path)?;
                        (m.lexicon, m.stats)
                    }
                    None => {
                        let lex = session.lexicon(lexicon)?.unwrap_or_default();
                        let stats = DerivedStats::compute(&gold, &lex)?;
                        (lex, stats)
                    }
                };
                let buckets = eval::score_by_length(&gold, &pred, &lexicon, &stats)?;
                if format != Format::Csv {
                    println!();
                }
                print_table(&report::bucket_table(&buckets), format)?;
            }
            Ok(())
        }
        Command::Cv {
            data,
            solver,
            features,
            k,
            output,
        } => {
            let format = session.format(output)?;
            let features = session.features(features)?;
            let params = session.solver(solver)?;
            let k = session.k(k)?;
            let (corpus, lexicon, names) = session.data(data)?;
            let report = eval::cross_validate(
                &corpus,
                &lexicon,
                &names,
                features,
                &params,
                k,
                session.seed,
            )?;
            print_table(&report::cv_table(&report), format)?;
            if report.mean_f1().is_none() {
                return Err(Error::NotEnoughData("every fold failed".into()));
            }
            Ok(())
        }
        Command::Grid {
            data,
            solver,
            features,
            k,
            c_grid,
            output,
        } => {
            let format = session.format(output)?;
            let features = session.features(features)?;
            let params = session.solver(solver)?;
            let k = session.k(k)?;
            let grid = session.c_grid(c_grid)?;
            let (corpus, lexicon, names) = session.data(data)?;
            let report = eval::grid_search(
                &corpus,
                &lexicon,
                &names,
                features,
                &grid,
                &params,
                k,
                session.seed,
            )?;
            print_table(&report::grid_table(&report), format)?;
            if format == Format::Text {
                println!(
                    "best C = {} (mean F1 {})",
                    report.best_c,
                    report::pct(report.best_f1)
                );
            }
            Ok(())
        }
        Command::Ablate {
            data,
            solver,
            k,
            c_grid,
            output,
        } => {
            let format = session.format(output)?;
            let params = session.solver(solver)?;
            let k = session.k(k)?;
            let grid = session.c_grid(c_grid)?;
            let (corpus, lexicon, names) = session.data(data)?;
            let rows = eval::ablation(&corpus, &lexicon, &names, &grid, &params, k, session.seed)?;
            print_table(&report::ablation_table(&rows), format)
        }
        Command::Stats {
            corpus,
            lexicon,
            output,
        } => {
            let format = session.format_or(output, Format::Tsv)?;
            let corpus =
                Corpus::read_segmented(session.config.required::<PathBuf>(corpus, "corpus")?)?;
            let lexicon = session.lexicon(lexicon)?.unwrap_or_default();
            let dist = word_length_distribution(&corpus)?;
            let stats = DerivedStats::compute(&corpus, &lexicon)?;
            print_table(&report::length_table(&dist), format)?;
            let mut separable = Table::new(["separable", "standalone", "word_initial"]);
            for s in &stats.separable {
                let (a, b) = stats.sep_counts[s];
                separable.push([s.clone(), a.to_string(), b.to_string()]);
            }
            let mut suffixes = Table::new(["suffix", "count"]);
            for s in &stats.suffixes {
                suffixes.push([s.clone(), stats.suffix_counts[s].to_string()]);
            }
            for table in [separable, suffixes] {
                if format != Format::Csv {
                    println!();
                }
                print_table(&table, format)?;
            }
            Ok(())
        }
    }
}
