//! `colorlit` command-line front end.
//!
//! Thin adapters over the library: each subcommand loads inputs, calls into
//! `colorlit_core`, and writes outputs. Exit codes: 0 success, 1 usage
//! error, 2 data error, 3 I/O error.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use colorlit_core::corpus::{self, WorkRecord};
use colorlit_core::error::ErrorKind;
use colorlit_core::norms::{self, ColumnMap, Hyper, NormKind};
use colorlit_core::report::{self, AnalyzeConfig, AnalyzeInputs};
use colorlit_core::{conllu, extract, lexicon, EmbeddingTable, NormModel, SubwordModel};

const MIRROR_ENV: &str = "COLORLIT_MIRROR";

#[derive(Parser)]
#[command(name = "colorlit", version, about = "Color-term analytics for literary corpora")]
struct Cli {
    /// Seed for dataset splitting and model training.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Suppress progress output.
    #[arg(long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ColumnFlags {
    /// Header name of the word column in the norms file.
    #[arg(long, default_value = "word")]
    word_col: String,
    /// Header name of the imageability mean column.
    #[arg(long, default_value = "imag")]
    imag_col: String,
    /// Header name of the concreteness mean column.
    #[arg(long, default_value = "cnc")]
    cnc_col: String,
    /// Header name of the valence mean column.
    #[arg(long, default_value = "val")]
    val_col: String,
}

impl ColumnFlags {
    fn to_map(&self) -> ColumnMap {
        ColumnMap {
            word: self.word_col.clone(),
            imag: self.imag_col.clone(),
            cnc: self.cnc_col.clone(),
            val: self.val_col.clone(),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Fetch catalog texts from a Gutenberg mirror and strip boilerplate.
    Fetch {
        #[arg(long)]
        catalog: PathBuf,
        /// Directory for cleaned `<work_id>.txt` files.
        #[arg(long)]
        out: PathBuf,
        /// Mirror base URL (falls back to $COLORLIT_MIRROR, then gutenberg.org).
        #[arg(long)]
        mirror: Option<String>,
    },
    /// Extract color-noun dependency pairs from CoNLL-U parses.
    Extract {
        #[arg(long)]
        catalog: PathBuf,
        /// Directory holding `<work_id>.conllu` files.
        #[arg(long)]
        conllu_dir: PathBuf,
        /// Lexicon override file (JSON color -> synonyms).
        #[arg(long)]
        lexicon: Option<PathBuf>,
        /// Output hits file (one JSON record per line).
        #[arg(long)]
        out: PathBuf,
    },
    /// Inspect the active color lexicon.
    Lexicon {
        /// Print the full lexicon as JSON.
        #[arg(long)]
        dump: bool,
        /// Lexicon override file to inspect instead of the default.
        #[arg(long)]
        lexicon: Option<PathBuf>,
    },
    /// Train the three Glasgow Norm regressors.
    TrainNorms {
        /// Ratings file (CSV with header).
        #[arg(long)]
        norms: PathBuf,
        /// Word vector file (text format, `count dim` header).
        #[arg(long)]
        vec: PathBuf,
        /// Subword bucket export for out-of-vocabulary composition.
        #[arg(long)]
        subwords: Option<PathBuf>,
        /// PCA target dimension fed to the MLPs.
        #[arg(long, default_value_t = 100)]
        dim: usize,
        /// Normalize with observed per-dimension min/max instead of scale bounds.
        #[arg(long)]
        observed_bounds: bool,
        /// Directory for the three model files.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        columns: ColumnFlags,
    },
    /// Report held-out Pearson r for trained models.
    EvalNorms {
        /// Directory holding imag.json / cnc.json / val.json.
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        norms: PathBuf,
        #[arg(long)]
        vec: PathBuf,
        #[arg(long)]
        subwords: Option<PathBuf>,
        #[command(flatten)]
        columns: ColumnFlags,
    },
    /// Assemble the full report bundle from extracted hits.
    Analyze {
        #[arg(long)]
        hits: PathBuf,
        #[arg(long)]
        catalog: PathBuf,
        /// Directory holding imag.json / cnc.json / val.json.
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        norms: PathBuf,
        /// Parse directory, used to fill per-work token counts for the
        /// frequency tables.
        #[arg(long)]
        conllu_dir: Option<PathBuf>,
        /// Word vectors for scoring out-of-vocabulary nouns.
        #[arg(long)]
        vec: Option<PathBuf>,
        #[arg(long)]
        subwords: Option<PathBuf>,
        /// Nouns listed per color and era.
        #[arg(long, default_value_t = 5)]
        era_top_k: usize,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        columns: ColumnFlags,
    },
    /// Project two authors' color-linked nouns into a shared 2-d space.
    CompareAuthors {
        #[arg(long)]
        hits: PathBuf,
        #[arg(long)]
        catalog: PathBuf,
        #[arg(long)]
        vec: PathBuf,
        /// Exactly two catalog author names, comma separated.
        #[arg(long)]
        authors: String,
        #[arg(long)]
        color: String,
        /// Directory for projections.csv.
        #[arg(long)]
        out: PathBuf,
    },
}

enum CliError {
    Usage(String),
    Core(colorlit_core::Error),
}

impl From<colorlit_core::Error> for CliError {
    fn from(e: colorlit_core::Error) -> Self {
        CliError::Core(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind as ClapKind;
            let code = match e.kind() {
                ClapKind::DisplayHelp | ClapKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Core(e)) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            match e.kind() {
                ErrorKind::Data => ExitCode::from(2),
                ErrorKind::Io => ExitCode::from(3),
            }
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let quiet = cli.quiet;
    let seed = cli.seed;
    match cli.command {
        Command::Fetch { catalog, out, mirror } => cmd_fetch(&catalog, &out, mirror, quiet),
        Command::Extract {
            catalog,
            conllu_dir,
            lexicon,
            out,
        } => cmd_extract(&catalog, &conllu_dir, lexicon.as_deref(), &out, quiet),
        Command::Lexicon { dump, lexicon } => cmd_lexicon(dump, lexicon.as_deref()),
        Command::TrainNorms {
            norms,
            vec,
            subwords,
            dim,
            observed_bounds,
            out,
            columns,
        } => cmd_train_norms(
            &norms,
            &vec,
            subwords.as_deref(),
            dim,
            observed_bounds,
            &out,
            &columns.to_map(),
            seed,
            quiet,
        ),
        Command::EvalNorms {
            model,
            norms,
            vec,
            subwords,
            columns,
        } => cmd_eval_norms(&model, &norms, &vec, subwords.as_deref(), &columns.to_map()),
        Command::Analyze {
            hits,
            catalog,
            model,
            norms,
            conllu_dir,
            vec,
            subwords,
            era_top_k,
            out,
            columns,
        } => cmd_analyze(AnalyzeArgs {
            hits,
            catalog,
            model,
            norms,
            conllu_dir,
            vec,
            subwords,
            era_top_k,
            out,
            columns: columns.to_map(),
            seed,
            quiet,
        }),
        Command::CompareAuthors {
            hits,
            catalog,
            vec,
            authors,
            color,
            out,
        } => cmd_compare_authors(&hits, &catalog, &vec, &authors, &color, &out, quiet),
    }
}

fn load_active_lexicon(path: Option<&Path>) -> Result<lexicon::ColorLexicon, CliError> {
    Ok(match path {
        Some(p) => lexicon::load_lexicon(p)?,
        None => lexicon::default_lexicon(),
    })
}

fn conllu_path(dir: &Path, work: &WorkRecord) -> PathBuf {
    dir.join(format!("{}.conllu", work.work_id))
}

fn cmd_fetch(
    catalog_path: &Path,
    out: &Path,
    mirror: Option<String>,
    quiet: bool,
) -> Result<(), CliError> {
    let catalog = corpus::load_catalog(catalog_path)?;
    let mirror = mirror
        .or_else(|| std::env::var(MIRROR_ENV).ok())
        .unwrap_or_else(|| corpus::DEFAULT_MIRROR.to_string());
    std::fs::create_dir_all(out).map_err(|e| colorlit_core::Error::io(out, e))?;

    for work in &catalog {
        let raw = corpus::fetch_text(work.gutenberg_id, &mirror)?;
        let cleaned = corpus::clean_gutenberg_text(&raw)?;
        let path = out.join(format!("{}.txt", work.work_id));
        std::fs::write(&path, &cleaned.text).map_err(|e| colorlit_core::Error::io(&path, e))?;
        if !quiet {
            let marker_note = if cleaned.markers_found {
                ""
            } else {
                " (no boilerplate markers found)"
            };
            println!(
                "fetched {} (gutenberg id {}){marker_note}",
                work.work_id, work.gutenberg_id
            );
        }
    }
    Ok(())
}

fn cmd_extract(
    catalog_path: &Path,
    conllu_dir: &Path,
    lexicon_path: Option<&Path>,
    out: &Path,
    quiet: bool,
) -> Result<(), CliError> {
    let mut catalog = corpus::load_catalog(catalog_path)?;
    let lex = load_active_lexicon(lexicon_path)?;
    catalog.sort_by(|a, b| a.work_id.cmp(&b.work_id));

    let mut hits = Vec::new();
    for work in &catalog {
        let path = conllu_path(conllu_dir, work);
        let sentences = conllu::parse_conllu(&path)?;
        hits.extend(extract::extract_hits(&work.work_id, &sentences, &lex));
    }
    extract::write_hits(&hits, out)?;

    if !quiet {
        println!("{} hits from {} works", hits.len(), catalog.len());
        for (color, count) in extract::count_color_occurrences(&hits, &lex) {
            println!("{color}\t{count}");
        }
    }
    Ok(())
}

fn cmd_lexicon(dump: bool, lexicon_path: Option<&Path>) -> Result<(), CliError> {
    let lex = load_active_lexicon(lexicon_path)?;
    if dump {
        println!("{}", lex.to_json_pretty());
    } else {
        println!("{} colors, {} lemmas", lex.color_count(), lex.lemma_count());
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_train_norms(
    norms_path: &Path,
    vec_path: &Path,
    subwords_path: Option<&Path>,
    dim: usize,
    observed_bounds: bool,
    out: &Path,
    columns: &ColumnMap,
    seed: u64,
    quiet: bool,
) -> Result<(), CliError> {
    let mut dataset = norms::load_glasgow::<f64>(norms_path, columns)?;
    if observed_bounds {
        dataset = dataset.with_observed_bounds();
    }
    let table: EmbeddingTable = colorlit_core::embed::load_vec(vec_path)?;
    let subwords: Option<SubwordModel> = subwords_path
        .map(colorlit_core::embed::load_subwords)
        .transpose()?;

    let hyper = Hyper {
        input_dim: dim,
        ..Hyper::default()
    };
    std::fs::create_dir_all(out).map_err(|e| colorlit_core::Error::io(out, e))?;

    for kind in NormKind::ALL {
        let outcome = norms::train(&dataset, &table, subwords.as_ref(), kind, &hyper, seed)?;
        let path = out.join(norms::model_file_name(kind));
        norms::save_model(&outcome.model, &path)?;
        if !quiet {
            let dev = outcome
                .checkpoints
                .last()
                .map(|c| format!("dev r={:.4} (epoch {})", c.dev_pearson, c.epoch))
                .unwrap_or_else(|| "no usable dev set".to_string());
            println!(
                "{kind}: {} epochs, {dev}, dropped {}/{}/{} train/dev/test words, wrote {}",
                outcome.epochs_run,
                outcome.dropped[0],
                outcome.dropped[1],
                outcome.dropped[2],
                path.display()
            );
        }
    }
    Ok(())
}

fn load_models(dir: &Path) -> Result<Vec<NormModel>, CliError> {
    NormKind::ALL
        .iter()
        .map(|&kind| Ok(norms::load_model(&dir.join(norms::model_file_name(kind)))?))
        .collect()
}

fn cmd_eval_norms(
    model_dir: &Path,
    norms_path: &Path,
    vec_path: &Path,
    subwords_path: Option<&Path>,
    columns: &ColumnMap,
) -> Result<(), CliError> {
    let dataset = norms::load_glasgow::<f64>(norms_path, columns)?;
    let table: EmbeddingTable = colorlit_core::embed::load_vec(vec_path)?;
    let subwords: Option<SubwordModel> = subwords_path
        .map(colorlit_core::embed::load_subwords)
        .transpose()?;

    for model in load_models(model_dir)? {
        let split = norms::split_811(&dataset.sorted_words(), model.train_seed)?;
        let eval = norms::evaluate(&model, &dataset, &table, subwords.as_ref(), &split.test)?;
        println!(
            "{}\tr={}\tn={}",
            eval.kind,
            report::format_significant(eval.pearson_r, 6),
            eval.n_test
        );
    }
    Ok(())
}

struct AnalyzeArgs {
    hits: PathBuf,
    catalog: PathBuf,
    model: PathBuf,
    norms: PathBuf,
    conllu_dir: Option<PathBuf>,
    vec: Option<PathBuf>,
    subwords: Option<PathBuf>,
    era_top_k: usize,
    out: PathBuf,
    columns: ColumnMap,
    seed: u64,
    quiet: bool,
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<(), CliError> {
    let mut catalog = corpus::load_catalog(&args.catalog)?;
    let hits = extract::read_hits(&args.hits)?;
    let models = load_models(&args.model)?;
    let dataset = norms::load_glasgow::<f64>(&args.norms, &args.columns)?;
    let table: Option<EmbeddingTable> = args
        .vec
        .as_deref()
        .map(colorlit_core::embed::load_vec)
        .transpose()?;
    let subwords: Option<SubwordModel> = args
        .subwords
        .as_deref()
        .map(colorlit_core::embed::load_subwords)
        .transpose()?;

    if let Some(dir) = &args.conllu_dir {
        for work in &mut catalog {
            let sentences = conllu::parse_conllu(&conllu_path(dir, work))?;
            work.token_count = conllu::word_token_count(&sentences);
        }
    }

    let mut digests = BTreeMap::new();
    digests.insert("hits".to_string(), report::file_digest(&args.hits)?);
    digests.insert("catalog".to_string(), report::file_digest(&args.catalog)?);
    digests.insert("norms".to_string(), report::file_digest(&args.norms)?);
    for kind in NormKind::ALL {
        let name = norms::model_file_name(kind);
        digests.insert(
            format!("model.{}", kind.label().to_lowercase()),
            report::file_digest(&args.model.join(name))?,
        );
    }

    let inputs = AnalyzeInputs {
        catalog: &catalog,
        hits: &hits,
        models: &models,
        dataset: &dataset,
        table: table.as_ref(),
        subwords: subwords.as_ref(),
    };
    let cfg = AnalyzeConfig {
        seed: args.seed,
        era_top_k: args.era_top_k,
        author_pair: None,
        author_color: None,
        input_digests: digests,
    };
    let bundle = report::run_analyze(&inputs, &cfg)?;
    let files = report::write_reports(&bundle, &args.out)?;
    if !args.quiet {
        println!("wrote {} report files to {}", files.len(), args.out.display());
    }
    Ok(())
}

fn cmd_compare_authors(
    hits_path: &Path,
    catalog_path: &Path,
    vec_path: &Path,
    authors: &str,
    color: &str,
    out: &Path,
    quiet: bool,
) -> Result<(), CliError> {
    let parts: Vec<&str> = authors.split(',').map(str::trim).collect();
    let [a, b] = parts.as_slice() else {
        return Err(CliError::Usage(format!(
            "--authors expects exactly two comma-separated names, got {authors:?}"
        )));
    };
    if a.is_empty() || b.is_empty() {
        return Err(CliError::Usage("author names must be non-empty".into()));
    }

    let catalog = corpus::load_catalog(catalog_path)?;
    let hits = extract::read_hits(hits_path)?;
    let table: EmbeddingTable = colorlit_core::embed::load_vec(vec_path)?;

    let points = colorlit_core::stats::author_projection(&hits, &catalog, &table, (a, b), color)?;
    let rows: Vec<report::ProjectionRow> = points
        .into_iter()
        .map(|p| report::ProjectionRow {
            color: color.to_string(),
            author: p.author,
            lemma: p.lemma,
            x: p.x,
            y: p.y,
        })
        .collect();
    let mut sorted = rows;
    sorted.sort_by(|x, y| (&x.color, &x.author, &x.lemma).cmp(&(&y.color, &y.author, &y.lemma)));
    let path = report::write_projections(&sorted, out)?;
    if !quiet {
        println!("wrote {} ({} points)", path.display(), sorted.len());
    }
    Ok(())
}
