//! The five commands. Each validates its preconditions, does its work in
//! memory, then takes the output-directory lock and writes artifacts plus
//! the manifest entry for its stage.

use std::fmt::Write as _;
use std::fs::OpenOptions;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use ids_core::dataset::synthetic::synthetic_records;
use ids_core::dataset::{
    categorize, parse_nslkdd, prepare, stratified_subsample, AttackTaxonomy, ClassWeights, EncodedDataset,
    FeatureSchema, FittedEncoder, RawRecord, Task,
};
use ids_core::metrics::{class_report, confusion, roc_auc, ClassReport};
use ids_core::nn::{load_checkpoint, save_checkpoint, train, Architecture, ConvLstmModel, HyperParams, LabeledSet};
use ids_core::ssa::{tune, TuneData};
use serde::{Deserialize, Serialize};

use crate::config::{HyperSource, RunConfig, Weighting};
use crate::error::{CliError, Result};
use crate::manifest::{describe, RunManifest, MANIFEST_FILE};
use crate::plot;
use crate::store::{read_encoded, write_encoded};

pub const STAGES: [&str; 4] = ["preprocess", "tune", "train", "evaluate"];
const LOCK_FILE: &str = ".ids.lock";

pub mod paths {
    pub const ENCODER: &str = "encoded/encoder.json";
    pub const TRAIN: &str = "encoded/train.enc";
    pub const VAL: &str = "encoded/val.enc";
    pub const TEST: &str = "encoded/test.enc";
    pub const EXTERNAL: &str = "encoded/external_test.enc";
    pub const SPLIT: &str = "encoded/split.json";
    pub const WEIGHTS: &str = "encoded/class_weights.csv";
    pub const TUNE_TRACE: &str = "tune/trace.csv";
    pub const TUNE_EVALS: &str = "tune/evaluations.csv";
    pub const TUNE_BEST: &str = "tune/hyperparams.json";
    pub const CHECKPOINT: &str = "train/model.ckpt";
    pub const TRAIN_REPORT: &str = "train/report.csv";
    pub const TRAIN_HYPER: &str = "train/hyperparams.json";
    pub const TRAIN_CURVES: &str = "train/curves.svg";
}

/// Held while a command writes into the run directory.
struct DirLock(PathBuf);

impl DirLock {
    fn acquire(out: &Path) -> Result<Self> {
        std::fs::create_dir_all(out).map_err(CliError::io(out))?;
        let path = out.join(LOCK_FILE);
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut f) => {
                let _ = writeln!(f, "{}", std::process::id());
                Ok(Self(path))
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => Err(CliError::Locked(out.to_path_buf())),
            Err(e) => Err(CliError::Io { path, source: e }),
        }
    }
}

impl Drop for DirLock {
    fn drop(&mut self) {
        let _ = std::fs::remove_file(&self.0);
    }
}

fn write_file(out: &Path, rel: &str, contents: impl AsRef<[u8]>) -> Result<PathBuf> {
    let path = out.join(rel);
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(CliError::io(parent))?;
    }
    std::fs::write(&path, contents).map_err(CliError::io(&path))?;
    Ok(PathBuf::from(rel))
}

fn require(out: &Path, rels: &[&str], hint: &str) -> Result<()> {
    for rel in rels {
        if !out.join(rel).is_file() {
            return Err(CliError::Precondition(format!("{} is missing; run `{hint}` first", out.join(rel).display())));
        }
    }
    Ok(())
}

/// Loads the manifest of an existing run and checks that the data-defining
/// part of the config still matches what preprocess used.
fn existing_manifest(cfg: &RunConfig) -> Result<RunManifest> {
    require(&cfg.out, &[MANIFEST_FILE], "ids preprocess")?;
    let m = RunManifest::load(&cfg.out)?;
    let same = m.config.task == cfg.task
        && m.config.seed == cfg.seed
        && m.config.data == cfg.data
        && m.config.split == cfg.split;
    if !same {
        return Err(CliError::Precondition(
            "task, seed, data or split changed since preprocess; rerun `ids preprocess`".into(),
        ));
    }
    Ok(m)
}

/// Store a stage, dropping every later stage since its inputs changed.
fn commit(mut m: RunManifest, cfg: &RunConfig, stage: &str, files: &[PathBuf], started: Instant) -> Result<()> {
    let artifacts = describe(&cfg.out, files)?;
    let pos = STAGES.iter().position(|s| *s == stage).expect("known stage");
    for later in &STAGES[pos + 1..] {
        m.stages.remove(*later);
        m.timings.remove(*later);
    }
    m.config = cfg.clone();
    m.record(stage, artifacts, started.elapsed().as_secs_f64());
    m.save(&cfg.out)
}

fn taxonomy(cfg: &RunConfig) -> Result<AttackTaxonomy> {
    Ok(match &cfg.data.taxonomy {
        Some(p) => AttackTaxonomy::load(p)?,
        None => AttackTaxonomy::bundled(),
    })
}

/// Source records after the optional stratified subsample, with their row
/// positions in the source.
pub fn load_records(cfg: &RunConfig, taxonomy: &AttackTaxonomy) -> Result<(Vec<RawRecord>, Vec<usize>)> {
    let seeds = cfg.seeds();
    let records = match (&cfg.data.train, cfg.data.synthetic_scale) {
        (Some(path), _) => parse_nslkdd(path, &FeatureSchema::nsl_kdd())?,
        (None, Some(scale)) => synthetic_records(scale, seeds.synthetic),
        (None, None) => unreachable!("validated config"),
    };
    if cfg.data.subsample >= 1.0 {
        let rows = (0..records.len()).collect();
        return Ok((records, rows));
    }
    let labels: Vec<usize> = categorize(&records, taxonomy)?.iter().map(|c| c.index()).collect();
    let keep = stratified_subsample(&labels, 5, cfg.data.subsample, seeds.subsample);
    Ok((keep.iter().map(|&i| records[i].clone()).collect(), keep))
}

fn class_weights(cfg: &RunConfig, train: &EncodedDataset) -> Result<ClassWeights> {
    let k = cfg.task.n_classes();
    Ok(match cfg.model.class_weighting {
        Weighting::None => ClassWeights::uniform(k),
        Weighting::Balanced => {
            let mut counts = vec![0usize; k];
            for &l in train.labels(cfg.task) {
                counts[l] += 1;
            }
            ClassWeights::balanced(&counts)?
        }
    })
}

#[derive(Debug, Serialize, Deserialize)]
struct SplitRows {
    /// Row positions in the source data (0-based).
    train: Vec<usize>,
    val: Vec<usize>,
    test: Vec<usize>,
}

pub fn cmd_preprocess(cfg: &RunConfig) -> Result<()> {
    let started = Instant::now();
    let tax = taxonomy(cfg)?;
    let (records, source_rows) = load_records(cfg, &tax)?;
    let p = prepare(&records, &FeatureSchema::nsl_kdd(), &tax, &cfg.split_spec()?)?;
    let external = match &cfg.data.test {
        Some(path) => Some(p.encoder.transform(&parse_nslkdd(path, &FeatureSchema::nsl_kdd())?, &tax)?),
        None => None,
    };
    let (train, val, test) = (p.train(), p.val(), p.test());
    let weights = class_weights(cfg, &train)?;

    let _lock = DirLock::acquire(&cfg.out)?;
    let out = &cfg.out;
    let mut files = vec![write_file(out, paths::ENCODER, p.encoder.to_json())?];
    for (rel, data) in [(paths::TRAIN, &train), (paths::VAL, &val), (paths::TEST, &test)] {
        write_file(out, rel, [])?;
        write_encoded(&out.join(rel), data)?;
        files.push(rel.into());
    }
    if let Some(ext) = &external {
        write_file(out, paths::EXTERNAL, [])?;
        write_encoded(&out.join(paths::EXTERNAL), ext)?;
        files.push(paths::EXTERNAL.into());
    }
    let pick = |idx: &[usize]| idx.iter().map(|&i| source_rows[i]).collect::<Vec<_>>();
    let rows = SplitRows {
        train: pick(&p.split.train),
        val: pick(&p.split.val),
        test: pick(&p.split.test),
    };
    files.push(write_file(out, paths::SPLIT, serde_json::to_string(&rows).expect("serialise"))?);
    let mut table = String::from("class,train_count,weight\n");
    let mut counts = vec![0usize; cfg.task.n_classes()];
    for &l in train.labels(cfg.task) {
        counts[l] += 1;
    }
    for (c, name) in cfg.class_names().iter().enumerate() {
        let _ = writeln!(table, "{name},{},{}", counts[c], weights.get(c));
    }
    files.push(write_file(out, paths::WEIGHTS, table)?);

    commit(RunManifest::new(cfg), cfg, "preprocess", &files, started)?;
    println!(
        "preprocess: {} rows ({} train / {} val / {} test), {} encoded columns{}",
        records.len(),
        train.len(),
        val.len(),
        test.len(),
        p.encoder.n_columns(),
        external.map_or(String::new(), |e| format!(", {} external test rows", e.len()))
    );
    Ok(())
}

fn load_split(out: &Path, rel: &str) -> Result<EncodedDataset> {
    read_encoded(&out.join(rel))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TunedHyperParams {
    pub hyperparams: HyperParams,
    pub validation_weighted_f1: f64,
}

pub fn cmd_tune(cfg: &RunConfig) -> Result<()> {
    let started = Instant::now();
    require(&cfg.out, &[paths::TRAIN, paths::VAL], "ids preprocess")?;
    let manifest = existing_manifest(cfg)?;
    let full_train = load_split(&cfg.out, paths::TRAIN)?;
    let val = load_split(&cfg.out, paths::VAL)?;
    let weights = class_weights(cfg, &full_train)?;
    let train = if cfg.tune.max_train_rows > 0 && full_train.len() > cfg.tune.max_train_rows {
        let frac = cfg.tune.max_train_rows as f64 / full_train.len() as f64;
        full_train.select(&stratified_subsample(full_train.labels(cfg.task), cfg.task.n_classes(), frac, cfg.seeds().tune))
    } else {
        full_train
    };
    let names = cfg.class_names();
    let data = TuneData {
        train: LabeledSet::new(&train.features, train.labels(cfg.task)),
        val: LabeledSet::new(&val.features, val.labels(cfg.task)),
        class_names: &names,
        weights: &weights,
    };

    let _lock = DirLock::acquire(&cfg.out)?;
    let trace_rel = write_file(&cfg.out, paths::TUNE_TRACE, "iteration,best_fitness,evaluations\n")?;
    let trace_path = cfg.out.join(&trace_rel);
    let mut trace = OpenOptions::new().append(true).open(&trace_path).map_err(CliError::io(&trace_path))?;
    let result = tune(
        &data,
        &cfg.model.hyperparams(),
        &cfg.tune.space,
        &cfg.tune.ssa(cfg.seeds().tune),
        cfg.tune.budget(),
        |r| {
            let _ = writeln!(trace, "{},{},{}", r.iteration, r.best_fitness, r.evaluations);
            let _ = trace.flush();
            eprintln!("tune: iteration {} best weighted-F1 {:.4} ({} evaluations)", r.iteration, r.best_fitness, r.evaluations);
        },
    );
    let outcome = match result {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(trace, "# FAILED: {}", e.to_string().replace('\n', " "));
            drop(trace);
            commit(manifest, cfg, "tune", &[trace_rel], started)?;
            return Err(e.into());
        }
    };
    drop(trace);
    let mut evals = String::from("iteration,index,conv_filters,lstm_units,learning_rate,fitness\n");
    for e in &outcome.search.evaluations {
        let hp = cfg.tune.space.decode(&e.coords, &cfg.model.hyperparams());
        let _ = writeln!(evals, "{},{},{},{},{},{}", e.iteration, e.index, hp.conv_filters, hp.lstm_units, hp.learning_rate, e.fitness);
    }
    let best = TunedHyperParams {
        hyperparams: outcome.best,
        validation_weighted_f1: outcome.best_fitness,
    };
    let files = vec![
        trace_rel,
        write_file(&cfg.out, paths::TUNE_EVALS, evals)?,
        write_file(&cfg.out, paths::TUNE_BEST, serde_json::to_string_pretty(&best).expect("serialise"))?,
    ];
    commit(manifest, cfg, "tune", &files, started)?;
    println!(
        "tune: conv_filters={} lstm_units={} learning_rate={:.3e} (validation weighted-F1 {:.4})",
        best.hyperparams.conv_filters, best.hyperparams.lstm_units, best.hyperparams.learning_rate, best.validation_weighted_f1
    );
    Ok(())
}

fn training_hyperparams(cfg: &RunConfig) -> Result<HyperParams> {
    match cfg.model.hyperparams {
        HyperSource::Fixed => Ok(cfg.model.hyperparams()),
        HyperSource::Tune => {
            require(&cfg.out, &[paths::TUNE_BEST], "ids tune")?;
            let path = cfg.out.join(paths::TUNE_BEST);
            let text = std::fs::read_to_string(&path).map_err(CliError::io(&path))?;
            let tuned: TunedHyperParams =
                serde_json::from_str(&text).map_err(|e| CliError::Artifact { path, reason: e.to_string() })?;
            // Epoch and batch budget always come from the config.
            Ok(HyperParams {
                batch_size: cfg.model.batch_size,
                max_epochs: cfg.model.max_epochs,
                ..tuned.hyperparams
            })
        }
    }
}

pub fn cmd_train(cfg: &RunConfig) -> Result<()> {
    let started = Instant::now();
    require(&cfg.out, &[paths::TRAIN, paths::VAL], "ids preprocess")?;
    let manifest = existing_manifest(cfg)?;
    let hp = training_hyperparams(cfg)?;
    let train_set = load_split(&cfg.out, paths::TRAIN)?;
    let val = load_split(&cfg.out, paths::VAL)?;
    let weights = class_weights(cfg, &train_set)?;
    let seeds = cfg.seeds();
    let arch = Architecture::from_hyper(&hp, train_set.features.n_cols, cfg.class_names(), train_set.features.column_hash);
    let model = ConvLstmModel::init(arch, seeds.init)?;
    let (model, report) = train(
        model,
        LabeledSet::new(&train_set.features, train_set.labels(cfg.task)),
        LabeledSet::new(&val.features, val.labels(cfg.task)),
        &hp,
        &weights,
        seeds.train,
    )?;

    let _lock = DirLock::acquire(&cfg.out)?;
    let ckpt = write_file(&cfg.out, paths::CHECKPOINT, [])?;
    save_checkpoint(&model, &cfg.out.join(&ckpt))?;
    let files = vec![
        ckpt,
        write_file(&cfg.out, paths::TRAIN_REPORT, report.to_csv())?,
        write_file(&cfg.out, paths::TRAIN_HYPER, serde_json::to_string_pretty(&hp).expect("serialise"))?,
        write_file(&cfg.out, paths::TRAIN_CURVES, plot::curves_svg(&report, "Training and validation loss"))?,
    ];
    commit(manifest, cfg, "train", &files, started)?;
    let best = report.best();
    println!(
        "train: {} epochs ({:?}), best epoch {} val_loss {:.5} val_acc {:.4}",
        report.epochs.len(),
        report.stop_reason,
        report.best_epoch,
        best.val_loss,
        best.val_acc
    );
    Ok(())
}

/// Headline numbers of one evaluated split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalSummary {
    pub task: Task,
    pub split: String,
    pub rows: usize,
    pub accuracy: f64,
    pub macro_f1: f64,
    pub weighted_f1: f64,
    /// Binary task only; positive score is the Attack probability.
    pub auc: Option<f64>,
}

pub struct Evaluation {
    pub summary: EvalSummary,
    pub report: ClassReport,
}

/// Scores a model on one encoded split and writes its artifacts under `dir`.
fn evaluate_split(
    cfg: &RunConfig,
    model: &ConvLstmModel,
    data: &EncodedDataset,
    split: &str,
    dir: &str,
) -> Result<(Evaluation, Vec<PathBuf>)> {
    let names = cfg.class_names();
    let probs = model.predict_proba(&data.features)?;
    let pred: Vec<usize> = probs.iter().map(|p| ids_core::nn::argmax(p)).collect();
    let truth = data.labels(cfg.task);
    let cm = confusion(truth, &pred, &names)?;
    let report = class_report(&cm)?;
    let title = match cfg.task {
        Task::Binary => "Binary confusion matrix",
        Task::FiveClass => "Five-class confusion matrix",
    };
    let mut files = vec![
        write_file(&cfg.out, &format!("{dir}/report.json"), report.to_json())?,
        write_file(&cfg.out, &format!("{dir}/confusion.csv"), cm.to_csv())?,
        write_file(&cfg.out, &format!("{dir}/confusion.svg"), plot::confusion_svg(&cm, title))?,
    ];
    let auc = if cfg.task == Task::Binary {
        let scores: Vec<f64> = probs.iter().map(|p| p[1]).collect();
        let positive: Vec<bool> = truth.iter().map(|&t| t == 1).collect();
        match roc_auc(&scores, &positive) {
            Ok(roc) => {
                files.push(write_file(&cfg.out, &format!("{dir}/roc.csv"), roc.to_csv())?);
                files.push(write_file(&cfg.out, &format!("{dir}/roc.svg"), plot::roc_svg(&roc, "ROC curve, Attack vs Normal"))?);
                Some(roc.auc)
            }
            // Single-class split: ROC undefined; report without it.
            Err(ids_core::metrics::MetricsError::SingleClass) => None,
            Err(e) => return Err(e.into()),
        }
    } else {
        None
    };
    let summary = EvalSummary {
        task: cfg.task,
        split: split.to_string(),
        rows: data.len(),
        accuracy: report.accuracy,
        macro_f1: report.macro_f1,
        weighted_f1: report.weighted_f1,
        auc,
    };
    files.push(write_file(&cfg.out, &format!("{dir}/summary.json"), serde_json::to_string_pretty(&summary).expect("serialise"))?);
    Ok((Evaluation { summary, report }, files))
}

pub fn print_summary(s: &EvalSummary, report: &ClassReport) {
    let auc = s.auc.map_or(String::new(), |a| format!(" auc={a:.4}"));
    println!(
        "evaluate[{}]: rows={} accuracy={:.4} macro_f1={:.4} weighted_f1={:.4}{auc}",
        s.split, s.rows, s.accuracy, s.macro_f1, s.weighted_f1
    );
    for c in &report.classes {
        println!(
            "  {:<8} precision={:.4} recall={:.4} f1={:.4} support={}",
            c.name, c.precision, c.recall, c.f1, c.support
        );
    }
}

pub fn cmd_evaluate(cfg: &RunConfig) -> Result<Vec<Evaluation>> {
    let started = Instant::now();
    require(&cfg.out, &[paths::CHECKPOINT, paths::TEST], "ids train")?;
    let manifest = existing_manifest(cfg)?;
    let model = load_checkpoint(&cfg.out.join(paths::CHECKPOINT))?;
    if model.arch.class_names != cfg.class_names() {
        return Err(CliError::Precondition(format!(
            "checkpoint classes {:?} do not match task {:?}",
            model.arch.class_names,
            cfg.task
        )));
    }
    let test = load_split(&cfg.out, paths::TEST)?;
    let external = match cfg.data.test {
        Some(_) => {
            require(&cfg.out, &[paths::EXTERNAL], "ids preprocess")?;
            Some(load_split(&cfg.out, paths::EXTERNAL)?)
        }
        None => None,
    };

    let _lock = DirLock::acquire(&cfg.out)?;
    let (main, mut files) = evaluate_split(cfg, &model, &test, "test", "eval")?;
    let mut results = vec![main];
    if let Some(ext) = &external {
        let (e, f) = evaluate_split(cfg, &model, ext, "external_test", "eval/external")?;
        results.push(e);
        files.extend(f);
    }
    commit(manifest, cfg, "evaluate", &files, started)?;
    for r in &results {
        print_summary(&r.summary, &r.report);
    }
    Ok(results)
}

/// Re-hashes every artifact in the manifest and prints timings and
/// headline metrics. Fails listing every missing or altered file.
pub fn cmd_report(run_dir: &Path) -> Result<()> {
    if !run_dir.join(MANIFEST_FILE).is_file() {
        return Err(CliError::Precondition(format!("no {MANIFEST_FILE} in {}", run_dir.display())));
    }
    let m = RunManifest::load(run_dir)?;
    let problems = m.verify(run_dir);
    println!("run {} (tool {}), task {:?}, seed {}", run_dir.display(), m.tool_version, m.config.task, m.config.seed);
    for stage in STAGES {
        if let (Some(a), Some(t)) = (m.stages.get(stage), m.timings.get(stage)) {
            println!("  {stage:<10} {t:>9.2} s  {} artifacts", a.len());
        }
    }
    for rel in ["eval/summary.json", "eval/external/summary.json"] {
        let listed = m.stages.values().flatten().any(|a| a.path == rel);
        if !listed {
            continue;
        }
        if let Ok(text) = std::fs::read_to_string(run_dir.join(rel)) {
            if let Ok(s) = serde_json::from_str::<EvalSummary>(&text) {
                let auc = s.auc.map_or(String::new(), |a| format!(" auc={a:.4}"));
                println!("  {}: accuracy={:.4} weighted_f1={:.4}{auc}", s.split, s.accuracy, s.weighted_f1);
            }
        }
    }
    if problems.is_empty() {
        println!("all artifacts verified");
        Ok(())
    } else {
        Err(CliError::Verification(problems))
    }
}

/// Encoder document written by preprocess.
pub fn load_encoder(out: &Path) -> Result<FittedEncoder> {
    let path = out.join(paths::ENCODER);
    let text = std::fs::read_to_string(&path).map_err(CliError::io(&path))?;
    Ok(FittedEncoder::from_json(&text)?)
}
