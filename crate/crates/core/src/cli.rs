//! `causeffect` command line: preprocess, audit, train, predict, ensemble,
//! score and tagset subcommands.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::bio::{Alignment, Bracketing, TagSequence};
use crate::corpus::{read_corpus, Mode};
use crate::document::{analyze_corpus, audit_alignment, Document};
use crate::ensemble::{
    post_process, run_pipeline, write_answers_file, EnsembleConfig, DEFAULT_MERGE_THRESHOLD,
};
use crate::error::{Error, Result};
use crate::fsio;
use crate::predictions::import_predictions;
use crate::preprocessed::{self, Block};
use crate::scorer::score_report;
use crate::tagger::{train, FeatureConfig, TaggerModel, TrainConfig, TrainingExample, DEFAULT_WINDOW};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "causeffect",
    version,
    about = "Cause/effect span extraction with BIO tagging"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tokenize, POS-tag and BIO-encode a corpus into the token/POS/BIO text format.
    Preprocess(PreprocessArgs),
    /// Report how many gold spans fall on token boundaries.
    Audit(AuditArgs),
    /// Train the baseline tagger on a preprocessed file.
    Train(TrainArgs),
    /// Label a preprocessed file with a trained model.
    Predict(PredictArgs),
    /// Fuse member prediction files by mode voting and extract one pair per instance.
    Ensemble(EnsembleArgs),
    /// Score fused predictions against a gold corpus.
    Score(ScoreArgs),
    /// Write the POS tagset sidecar (`id<TAB>name`).
    Tagset(TagsetArgs),
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    /// Corpus file (`Index; Text; Cause; Effect`).
    #[arg(long)]
    pub corpus: PathBuf,
    /// Field delimiter of the corpus file.
    #[arg(long, default_value = ";")]
    pub delimiter: char,
}

#[derive(Debug, Args)]
pub struct PreprocessArgs {
    #[command(flatten)]
    pub input: CorpusArgs,
    #[arg(long, default_value = "training")]
    pub mode: String,
    #[arg(long)]
    pub out: PathBuf,
    /// Widen spans that split a token to the token boundaries.
    #[arg(long)]
    pub loose_align: bool,
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[command(flatten)]
    pub input: CorpusArgs,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Preprocessed training file.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 20)]
    pub epochs: usize,
    #[arg(long, default_value_t = DEFAULT_WINDOW)]
    pub window: usize,
    #[arg(long, default_value_t = 256)]
    pub max_seq_len: usize,
    #[arg(long, default_value = "start_end")]
    pub bracketing: String,
    /// Drop the POS one-hot features (ablation).
    #[arg(long)]
    pub no_pos: bool,
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Preprocessed file whose tokens are labeled; its BIO column is ignored.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Args)]
pub struct EnsembleArgs {
    #[command(flatten)]
    pub input: CorpusArgs,
    /// Comma-separated `name=path` member prediction files, in voting order.
    /// A bare path is named after its file stem.
    #[arg(long, value_delimiter = ',', required = true)]
    pub members: Vec<String>,
    /// Member whose label wins tied votes; defaults to the first member.
    #[arg(long)]
    pub priority_model: Option<String>,
    #[arg(long, default_value_t = DEFAULT_MERGE_THRESHOLD)]
    pub merge_threshold: usize,
    /// Fused tag file.
    #[arg(long)]
    pub out: PathBuf,
    /// Answer rows `Index;Text;Cause;Effect`.
    #[arg(long)]
    pub answers: PathBuf,
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[command(flatten)]
    pub input: CorpusArgs,
    /// Fused or single-model prediction file.
    #[arg(long)]
    pub predictions: PathBuf,
    #[arg(long, default_value_t = DEFAULT_MERGE_THRESHOLD)]
    pub merge_threshold: usize,
    /// Report prefix; writes `<out>.txt` and `<out>.kv`.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub loose_align: bool,
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Args)]
pub struct TagsetArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub force: bool,
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_data_error() {
                EXIT_DATA
            } else {
                EXIT_USAGE
            }
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Preprocess(a) => cmd_preprocess(&a, out, err),
        Command::Audit(a) => cmd_audit(&a, out),
        Command::Train(a) => cmd_train(&a, out, err),
        Command::Predict(a) => cmd_predict(&a, out),
        Command::Ensemble(a) => cmd_ensemble(&a, out, err),
        Command::Score(a) => cmd_score(&a, out),
        Command::Tagset(a) => {
            fsio::write_atomic(&a.out, a.force, |w| crate::pos::write_tagset(w))?;
            Ok(())
        }
    }
}

fn delimiter(c: char) -> Result<u8> {
    u8::try_from(c)
        .ok()
        .filter(u8::is_ascii)
        .ok_or_else(|| Error::InvalidArgument(format!("delimiter {c:?} must be a single ASCII character")))
}

fn check_output(path: &Path, force: bool) -> Result<()> {
    if path.exists() && !force {
        return Err(Error::OutputExists(path.to_path_buf()));
    }
    Ok(())
}

fn say(out: &mut dyn Write, msg: std::fmt::Arguments<'_>) {
    let _ = out.write_fmt(msg);
    let _ = out.write_all(b"\n");
}

pub fn cmd_preprocess(a: &PreprocessArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let mode: Mode = a.mode.parse()?;
    let delim = delimiter(a.input.delimiter)?;
    check_output(&a.out, a.force)?;
    let alignment = if a.loose_align {
        Alignment::Loose
    } else {
        Alignment::Strict
    };

    let corpus = read_corpus(&a.input.corpus, mode, delim)?;
    for w in &corpus.warnings {
        say(err, format_args!("warning: {w}"));
    }
    let docs = analyze_corpus(&corpus);
    let mut blocks = Vec::with_capacity(docs.len());
    let mut failures: Vec<Error> = Vec::new();
    for doc in &docs {
        match doc.gold_tags(alignment) {
            Ok(tags) => blocks.push(doc.block(&tags)?),
            Err(e) => failures.push(e),
        }
    }
    say(out, format_args!("instances: {}", docs.len()));
    say(out, format_args!("alignment failures: {}", failures.len()));
    if let Some(first) = failures.first() {
        for f in &failures {
            say(err, format_args!("  {f}"));
        }
        return Err(match first {
            Error::Alignment { instance, .. } => Error::alignment(
                instance,
                format!("{} instance(s) failed to align; nothing written", failures.len()),
            ),
            _ => Error::alignment("", "alignment failures"),
        });
    }
    preprocessed::write_file(&a.out, &blocks, a.force)
}

pub fn cmd_audit(a: &AuditArgs, out: &mut dyn Write) -> Result<()> {
    let corpus = read_corpus(&a.input.corpus, Mode::Training, delimiter(a.input.delimiter)?)?;
    let report = audit_alignment(&analyze_corpus(&corpus));
    say(out, format_args!("instances: {}", report.total));
    say(out, format_args!("aligned: {}", report.aligned));
    say(out, format_args!("alignment_rate: {}", report.rate()));
    for (id, why) in &report.failures {
        say(out, format_args!("unaligned {id}: {why}"));
    }
    Ok(())
}

pub fn cmd_train(a: &TrainArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    if a.epochs == 0 {
        return Err(Error::InvalidArgument("--epochs must be at least 1".into()));
    }
    if a.max_seq_len == 0 {
        return Err(Error::InvalidArgument("--max-seq-len must be at least 1".into()));
    }
    let bracketing: Bracketing = a.bracketing.parse()?;
    check_output(&a.model, a.force)?;
    let config = TrainConfig {
        epochs: a.epochs,
        seed: a.seed,
        features: FeatureConfig {
            window: a.window,
            use_pos: !a.no_pos,
        },
        ..TrainConfig::default()
    };
    say(
        err,
        format_args!(
            "train: seed={} epochs={} window={} max_seq_len={} bracketing={} pos={} lr={} l2={} batch={}",
            config.seed,
            config.epochs,
            a.window,
            a.max_seq_len,
            a.bracketing,
            !a.no_pos,
            config.learning_rate,
            config.l2,
            config.batch_size
        ),
    );

    let blocks = preprocessed::read_file(&a.input)?;
    let mut truncated = 0usize;
    let data = blocks
        .into_iter()
        .map(|b| {
            let labels = b.tags().labels;
            let ex = TrainingExample::with_loss_ids(b.rows, labels, a.max_seq_len, bracketing)
                .map_err(|e| e.in_instance(&b.id))?;
            truncated += usize::from(ex.mask.iter().any(|m| !m));
            Ok(ex)
        })
        .collect::<Result<Vec<_>>>()?;
    if truncated > 0 {
        say(
            err,
            format_args!(
                "warning: {truncated} instance(s) truncated to --max-seq-len {}",
                a.max_seq_len
            ),
        );
    }
    let model = train(&data, &config)?;
    model.save(&a.model, a.force)?;
    say(
        out,
        format_args!("trainable positions: {}", model.metadata.trainable_positions),
    );
    say(
        out,
        format_args!("held-in accuracy: {:.6}", model.metadata.train_accuracy),
    );
    Ok(())
}

pub fn cmd_predict(a: &PredictArgs, out: &mut dyn Write) -> Result<()> {
    check_output(&a.out, a.force)?;
    let model = TaggerModel::load(&a.model)?;
    let blocks = preprocessed::read_file(&a.input)?;
    let predicted = blocks
        .iter()
        .map(|b| b.relabeled(&model.predict(&b.id, &b.rows)))
        .collect::<Result<Vec<Block>>>()?;
    preprocessed::write_file(&a.out, &predicted, a.force)?;
    say(out, format_args!("predicted instances: {}", predicted.len()));
    Ok(())
}

fn member_spec(spec: &str) -> (String, PathBuf) {
    match spec.split_once('=') {
        Some((name, path)) => (name.to_string(), PathBuf::from(path)),
        None => {
            let path = PathBuf::from(spec);
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| spec.to_string());
            (name, path)
        }
    }
}

pub fn cmd_ensemble(a: &EnsembleArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let delim = delimiter(a.input.delimiter)?;
    let members: Vec<(String, PathBuf)> = a.members.iter().map(|m| member_spec(m)).collect();
    let names: Vec<String> = members.iter().map(|(n, _)| n.clone()).collect();
    let priority = a.priority_model.clone().unwrap_or_else(|| names[0].clone());
    let config = EnsembleConfig::new(names, &priority, a.merge_threshold)?;
    check_output(&a.out, a.force)?;
    check_output(&a.answers, a.force)?;
    say(
        err,
        format_args!(
            "ensemble: members={} priority={} merge_threshold={}",
            config.members().join(","),
            config.priority_model(),
            config.merge_threshold
        ),
    );

    let corpus = read_corpus(&a.input.corpus, Mode::Test, delim)?;
    let docs = analyze_corpus(&corpus);
    let sets = members
        .iter()
        .map(|(name, path)| import_predictions(path, name, &docs))
        .collect::<Result<Vec<_>>>()?;
    let results = run_pipeline(&sets, &docs, &config)?;

    let by_id: BTreeMap<&str, &Document> = docs.iter().map(|d| (d.id(), d)).collect();
    let blocks = results
        .iter()
        .map(|(id, r)| by_id[id.as_str()].block(&r.tags))
        .collect::<Result<Vec<_>>>()?;
    preprocessed::write_file(&a.out, &blocks, a.force)?;
    write_answers_file(&a.answers, &docs, &results, a.force)?;
    let extracted = results.values().filter(|r| r.pair.is_some()).count();
    say(out, format_args!("instances: {}", results.len()));
    say(out, format_args!("extracted pairs: {extracted}"));
    Ok(())
}

pub fn cmd_score(a: &ScoreArgs, out: &mut dyn Write) -> Result<()> {
    let delim = delimiter(a.input.delimiter)?;
    let txt = a.out.with_extension("txt");
    let kv = a.out.with_extension("kv");
    check_output(&txt, a.force)?;
    check_output(&kv, a.force)?;
    let alignment = if a.loose_align {
        Alignment::Loose
    } else {
        Alignment::Strict
    };

    let corpus = read_corpus(&a.input.corpus, Mode::Training, delim)?;
    let docs = analyze_corpus(&corpus);
    let preds = import_predictions(&a.predictions, "predictions", &docs)?;

    let mut gold_tags = Vec::with_capacity(docs.len());
    let mut pred_tags: Vec<TagSequence> = Vec::with_capacity(docs.len());
    let mut gold_pairs = BTreeMap::new();
    let mut pred_pairs = BTreeMap::new();
    for doc in &docs {
        gold_tags.push(doc.gold_tags(alignment)?);
        let tags = preds.get(doc.id()).expect("import checks coverage");
        pred_tags.push(tags.clone());
        let inst = &doc.instance;
        let (c, e) = (
            inst.cause.as_ref().expect("training mode"),
            inst.effect.as_ref().expect("training mode"),
        );
        gold_pairs.insert(doc.id().to_string(), (c.surface.clone(), e.surface.clone()));
        pred_pairs.insert(
            doc.id().to_string(),
            post_process(doc, tags, a.merge_threshold)?.pair,
        );
    }
    let report = score_report(&gold_tags, &pred_tags, &gold_pairs, &pred_pairs)?;
    let (text, kvs) = (report.to_text(), report.to_key_values());
    fsio::write_atomic(&txt, a.force, |w| w.write_all(text.as_bytes()))?;
    fsio::write_atomic(&kv, a.force, |w| w.write_all(kvs.as_bytes()))?;
    let _ = out.write_all(text.as_bytes());
    Ok(())
}
