use std::fs::File;
use std::io::{BufWriter, Write};
use std::ops::Range;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use super::{ExperimentConfig, HarnessError, ModelKind};
use crate::audio_io::{read_wav, resample, scan_dataset, write_manifest, write_wav, AudioClip, ClipRecord, Emotion};
use crate::augment::{self, augmented_file_name};
use crate::dataset::{split_indices, FeatureTable, Standardizer};
use crate::dsp::{FeatureExtractor, FeatureMode};
use crate::matrix::Matrix;
use crate::nn::{build_model, cnn_preset, lstm_preset, train, Model, Samples, Tensor, TrainReport};
use crate::viz;

pub const COMPARISON_HEADER: &str = "feature_mode,model,test_accuracy,epochs,seconds_per_epoch";

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io { path: path.to_path_buf(), source }
}

fn create(path: &Path) -> Result<BufWriter<File>, HarnessError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    File::create(path).map(BufWriter::new).map_err(io_err(path))
}

/// Creates `path` and hands the writer to `body`; IO errors name the file.
fn write_file<F>(path: &Path, body: F) -> Result<(), HarnessError>
where
    F: FnOnce(&mut BufWriter<File>) -> Result<(), HarnessError>,
{
    let mut w = create(path)?;
    body(&mut w)?;
    w.flush().map_err(io_err(path))
}

fn write_text(path: &Path, text: &str) -> Result<(), HarnessError> {
    write_file(path, |w| w.write_all(text.as_bytes()).map_err(io_err(path)))
}

/// Completion state of a command's output directory, rewritten after every
/// stage so an interrupted or failed run still says how far it got.
struct RunManifest {
    path: PathBuf,
    command: &'static str,
    stages: Vec<String>,
}

impl RunManifest {
    fn start(dir: &Path, command: &'static str) -> Result<Self, HarnessError> {
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
        let m = Self { path: dir.join("MANIFEST"), command, stages: Vec::new() };
        m.write("running")?;
        Ok(m)
    }

    fn write(&self, status: &str) -> Result<(), HarnessError> {
        let mut text = format!("command {}\n", self.command);
        for s in &self.stages {
            text.push_str(&format!("done {s}\n"));
        }
        text.push_str(&format!("status {status}\n"));
        write_text(&self.path, &text)
    }

    fn done(&mut self, stage: &str) -> Result<(), HarnessError> {
        self.stages.push(stage.to_string());
        self.write("running")
    }

    fn finish<T>(&self, res: Result<T, HarnessError>) -> Result<T, HarnessError> {
        let status = match &res {
            Ok(_) => "complete".to_string(),
            Err(e) => format!("failed: {}", e.to_string().replace('\n', " ")),
        };
        self.write(&status)?;
        res
    }
}

/// Records from every configured root, corpora in fixed order.
pub fn scan_corpora(cfg: &ExperimentConfig) -> Result<Vec<ClipRecord>, HarnessError> {
    let mut all = Vec::new();
    for (corpus, root) in cfg.roots() {
        let report = scan_dataset(root, corpus)?;
        for s in &report.skipped {
            log::warn!("skipped {}: {}", s.path.display(), s.reason);
        }
        log::info!("{corpus}: {} clips, {} skipped", report.records.len(), report.skipped.len());
        all.extend(report.records);
    }
    Ok(all)
}

/// Reads a file and converts it to the pipeline rate. The length is fixed
/// only after augmentation.
pub fn load_clip(path: &Path, cfg: &ExperimentConfig) -> Result<AudioClip, HarnessError> {
    Ok(resample(&read_wav(path)?, cfg.sample_rate_hz)?)
}

fn render(source: &AudioClip, record: &ClipRecord, cfg: &ExperimentConfig) -> Result<AudioClip, HarnessError> {
    Ok(augment::apply(source, &record.provenance)?.fix_length(cfg.clip_seconds))
}

/// Which originals train and test, and the records derived from them:
/// augmented train originals first, then the untouched test originals.
#[derive(Debug, Clone)]
pub struct SplitPlan {
    pub train_idx: Vec<usize>,
    pub test_idx: Vec<usize>,
    pub hash: String,
    pub records: Vec<ClipRecord>,
    pub n_train: usize,
}

/// SHA-256 over the original count and the test indices in split order.
pub fn split_hash(n: usize, test_idx: &[usize]) -> String {
    let text: Vec<String> = test_idx.iter().map(|i| i.to_string()).collect();
    hex::encode(Sha256::digest(format!("n={n};test={}", text.join(",")).as_bytes()))
}

/// Splits the originals, then augments the training originals only, so no
/// variant of a test clip can reach training.
pub fn plan_split(originals: &[ClipRecord], cfg: &ExperimentConfig) -> Result<SplitPlan, HarnessError> {
    let (train_idx, test_idx) = split_indices(originals.len(), &cfg.split_spec())?;
    let train: Vec<ClipRecord> = train_idx.iter().map(|&i| originals[i].clone()).collect();
    let mut records = augment::expand(&train, &cfg.augment_plan());
    let n_train = records.len();
    records.extend(test_idx.iter().map(|&i| originals[i].clone()));
    let hash = split_hash(originals.len(), &test_idx);
    Ok(SplitPlan { train_idx, test_idx, hash, records, n_train })
}

/// Feature rows in record order, plus per-row MFCC frame matrices when asked.
#[derive(Debug, Clone)]
pub struct Features {
    pub table: FeatureTable,
    pub frames: Option<Vec<Matrix>>,
}

/// Consecutive runs of records that share a source file.
fn source_groups(records: &[ClipRecord]) -> Vec<Range<usize>> {
    let mut groups: Vec<Range<usize>> = Vec::new();
    for (i, r) in records.iter().enumerate() {
        match groups.last_mut() {
            Some(g) if records[g.start].path == r.path => g.end = i + 1,
            _ => groups.push(i..i + 1),
        }
    }
    groups
}

/// Renders and featurises every record. Each source file is read once;
/// files are processed in parallel and results kept in record order.
pub fn extract_records(
    records: &[ClipRecord],
    mode: FeatureMode,
    with_frames: bool,
    cfg: &ExperimentConfig,
) -> Result<Features, HarnessError> {
    let fx = FeatureExtractor::new(cfg.feature_config(), cfg.sample_rate_hz)?;
    let per_group = source_groups(records)
        .into_par_iter()
        .map(|g| {
            let source = load_clip(&records[g.start].path, cfg)?;
            records[g]
                .iter()
                .map(|r| {
                    let clip = render(&source, r, cfg)?;
                    let fv = fx.extract(&clip, mode)?;
                    Ok((fv, with_frames.then(|| fx.mfcc_frames(&clip))))
                })
                .collect::<Result<Vec<_>, HarnessError>>()
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;
    let mut schema = Vec::new();
    let mut x = Matrix::zeros(0, 0);
    let mut frames = with_frames.then(Vec::new);
    for (fv, fr) in per_group.into_iter().flatten() {
        if schema.is_empty() {
            schema = fv.schema.clone();
            x = Matrix::zeros(0, schema.len());
        }
        x.push_row(&fv.values);
        if let (Some(all), Some(m)) = (frames.as_mut(), fr) {
            all.push(m);
        }
    }
    let table = FeatureTable::new(
        x,
        records.iter().map(|r| r.emotion).collect(),
        schema,
        records.iter().map(|r| r.provenance).collect(),
        records.iter().map(|r| r.path.display().to_string()).collect(),
    )?;
    Ok(Features { table, frames })
}

/// Column names of `mode` inside a combined-mode schema.
pub fn project_mode(combined_schema: &[String], mode: FeatureMode) -> Vec<String> {
    let is_wavelet = |s: &String| s.starts_with("dwt_");
    let is_time = |s: &String| s == "zcr" || s == "rms";
    match mode {
        FeatureMode::Combined => combined_schema.to_vec(),
        FeatureMode::Mfcc => combined_schema.iter().filter(|s| !is_wavelet(s)).cloned().collect(),
        FeatureMode::Wavelet => {
            let mut cols: Vec<String> = combined_schema.iter().filter(|s| is_wavelet(s)).cloned().collect();
            cols.extend(combined_schema.iter().filter(|s| is_time(s)).cloned());
            cols
        }
    }
}

/// A trained model with the scalers its inputs went through.
pub struct CellOutcome {
    pub report: TrainReport,
    pub model: Model,
    pub standardizer: Standardizer,
    pub frame_standardizer: Option<Standardizer>,
}

fn frame_samples(
    frames: &[Matrix],
    labels: &[Emotion],
    scaler: &Standardizer,
) -> Result<Samples, HarnessError> {
    let inputs = frames
        .iter()
        .map(|m| Ok(Tensor::new(vec![m.rows(), m.cols()], scaler.apply(m)?.into_vec())?))
        .collect::<Result<Vec<_>, HarnessError>>()?;
    Ok(Samples { inputs, labels: labels.to_vec() })
}

/// Standardises on the training rows, builds the preset and trains.
///
/// The CNN reads each feature vector as a `[D, 1]` sequence. The LSTM reads
/// the MFCC frame sequence `[T, n_mfcc]` in mfcc mode (frames standardised
/// per coefficient over all training frames) and the `[D, 1]` vector
/// otherwise.
pub fn train_cell(
    cfg: &ExperimentConfig,
    kind: ModelKind,
    mode: FeatureMode,
    train_rows: &FeatureTable,
    test_rows: &FeatureTable,
    frames: Option<(&[Matrix], &[Matrix])>,
) -> Result<CellOutcome, HarnessError> {
    let standardizer = Standardizer::fit(&train_rows.x, &train_rows.schema)?;
    let xtr = standardizer.apply(&train_rows.x)?;
    let xte = standardizer.apply(&test_rows.x)?;
    let mut frame_standardizer = None;
    let (train_set, test_set, shape) = match (kind, mode) {
        (ModelKind::Lstm, FeatureMode::Mfcc) => {
            let (ftr, fte) = frames.ok_or_else(|| HarnessError::Config("mfcc LSTM needs frame features".into()))?;
            let cols = ftr.first().map_or(0, |m| m.cols());
            let mut stacked = Matrix::zeros(0, cols);
            for m in ftr {
                m.iter_rows().for_each(|r| stacked.push_row(r));
            }
            let names: Vec<String> = (0..cols).map(|c| format!("mfcc_frame_{c:02}")).collect();
            let scaler = Standardizer::fit(&stacked, &names)?;
            let tr = frame_samples(ftr, &train_rows.y, &scaler)?;
            let te = frame_samples(fte, &test_rows.y, &scaler)?;
            let shape = tr.inputs.first().map_or(vec![0, cols], |t| t.shape().to_vec());
            frame_standardizer = Some(scaler);
            (tr, te, shape)
        }
        _ => (
            Samples::from_rows(&xtr, &train_rows.y),
            Samples::from_rows(&xte, &test_rows.y),
            vec![train_rows.dim(), 1],
        ),
    };
    let spec = match kind {
        ModelKind::Cnn => cnn_preset(shape[0]),
        ModelKind::Lstm => lstm_preset(),
    };
    for note in &spec.notes {
        log::info!("{kind}/{mode}: {note}");
    }
    let mut model = build_model(&spec, &shape, cfg.init_seed)?;
    log::info!("{kind}/{mode}: {} parameters, {} train / {} test", model.n_params(), train_set.len(), test_set.len());
    let report = train(&mut model, &train_set, &test_set, &cfg.train_config())?;
    Ok(CellOutcome { report, model, standardizer, frame_standardizer })
}

fn write_recall_csv(path: &Path, report: &TrainReport) -> Result<(), HarnessError> {
    write_file(path, |w| {
        let mut text = String::from("emotion,recall\n");
        for (e, r) in Emotion::ALL.iter().zip(report.confusion.recall()) {
            text.push_str(&format!("{e},{}\n", r.map_or(String::new(), |v| v.to_string())));
        }
        w.write_all(text.as_bytes()).map_err(io_err(path))
    })
}

fn write_cell(dir: &Path, cell: &CellOutcome) -> Result<(), HarnessError> {
    let json = |p: &Path, s: &Standardizer| -> Result<(), HarnessError> { write_text(p, &s.to_json()?) };
    json(&dir.join("standardizer.json"), &cell.standardizer)?;
    if let Some(s) = &cell.frame_standardizer {
        json(&dir.join("frame_standardizer.json"), s)?;
    }
    let report = &cell.report;
    let p = dir.join("train_report.csv");
    write_file(&p, |w| report.write_curves_csv(w).map_err(io_err(&p)))?;
    let p = dir.join("epoch_timing.csv");
    write_file(&p, |w| report.write_timing_csv(w).map_err(io_err(&p)))?;
    let p = dir.join("confusion.csv");
    write_file(&p, |w| report.confusion.write_csv(w).map_err(io_err(&p)))?;
    write_recall_csv(&dir.join("recall.csv"), report)?;
    let p = dir.join("model.ckpt");
    write_file(&p, |w| Ok(cell.model.save(w)?))?;
    let notes: String = report.notes.iter().map(|n| format!("{n}\n")).collect();
    write_text(&dir.join("model_notes.txt"), &notes)
}

fn write_table(path: &Path, table: &FeatureTable) -> Result<(), HarnessError> {
    write_file(path, |w| Ok(table.write_csv(w)?))
}

/// Resolved config and seeds: together with the data they replay a run.
fn write_provenance(out: &Path, cfg: &ExperimentConfig) -> Result<(), HarnessError> {
    write_text(&out.join("config.toml"), &cfg.to_toml())?;
    write_text(
        &out.join("seeds.csv"),
        &format!(
            "stream,seed\naugment,{}\ninit,{}\nshuffle,{}\ndropout,{}\n",
            cfg.augment_seed, cfg.init_seed, cfg.shuffle_seed, cfg.dropout_seed
        ),
    )
}

fn write_scan(out: &Path, originals: &[ClipRecord]) -> Result<(), HarnessError> {
    write_file(&out.join("manifest.csv"), |w| Ok(write_manifest(w, originals)?))?;
    let p = out.join("histogram.csv");
    write_file(&p, |w| viz::write_histogram_csv(&viz::class_histogram(originals), w).map_err(io_err(&p)))
}

fn write_split(out: &Path, plan: &SplitPlan, n: usize) -> Result<(), HarnessError> {
    let mut role = vec!["train"; n];
    plan.test_idx.iter().for_each(|&i| role[i] = "test");
    let body: String = role.iter().enumerate().map(|(i, r)| format!("{i},{r}\n")).collect();
    write_text(&out.join("split.csv"), &format!("index,role\n{body}"))?;
    write_text(&out.join("split_hash.txt"), &format!("{}\n", plan.hash))?;
    write_file(&out.join("augmented_manifest.csv"), |w| Ok(write_manifest(w, &plan.records)?))
}

fn print_histogram(originals: &[ClipRecord]) {
    let counts = viz::class_histogram(originals);
    println!("{} clips", originals.len());
    for (e, n) in Emotion::ALL.iter().zip(counts) {
        println!("  {:<9} {n}", e.name());
    }
}

/// `manifest.csv` and `histogram.csv` for every configured root.
pub fn cmd_scan(cfg: &ExperimentConfig, out: &Path) -> Result<Vec<ClipRecord>, HarnessError> {
    let originals = scan_corpora(cfg)?;
    write_scan(out, &originals)?;
    print_histogram(&originals);
    Ok(originals)
}

/// Split plus augmentation plan. With `dump`, every augmented clip is
/// rendered at the pipeline rate and length and written there as WAV.
pub fn cmd_augment(cfg: &ExperimentConfig, out: &Path, dump: Option<&Path>) -> Result<SplitPlan, HarnessError> {
    let originals = scan_corpora(cfg)?;
    write_scan(out, &originals)?;
    let plan = plan_split(&originals, cfg)?;
    write_split(out, &plan, originals.len())?;
    if let Some(dir) = dump {
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
        let records = &plan.records[..plan.n_train];
        source_groups(records).into_par_iter().try_for_each(|g| {
            let source = load_clip(&records[g.start].path, cfg)?;
            for r in records[g].iter().filter(|r| !r.provenance.is_original()) {
                write_wav(dir.join(augmented_file_name(r)), &render(&source, r, cfg)?)?;
            }
            Ok::<_, HarnessError>(())
        })?;
    }
    println!(
        "{} originals: {} train ({} rows after augmentation), {} test",
        originals.len(),
        plan.train_idx.len(),
        plan.n_train,
        plan.test_idx.len()
    );
    Ok(plan)
}

/// `features.csv` for every record in the configured mode, plus the
/// train/test partitions of it.
pub fn cmd_extract(cfg: &ExperimentConfig, out: &Path) -> Result<FeatureTable, HarnessError> {
    let plan = cmd_augment(cfg, out, None)?;
    let feats = extract_records(&plan.records, cfg.feature_mode, false, cfg)?;
    write_table(&out.join("features.csv"), &feats.table)?;
    let n = feats.table.len();
    write_table(&out.join("train.csv"), &feats.table.select_rows(&(0..plan.n_train).collect::<Vec<_>>()))?;
    write_table(&out.join("test.csv"), &feats.table.select_rows(&(plan.n_train..n).collect::<Vec<_>>()))?;
    println!("{} rows x {} features", n, feats.table.dim());
    Ok(feats.table)
}

fn needs_frames(kind: ModelKind, mode: FeatureMode) -> bool {
    kind == ModelKind::Lstm && mode == FeatureMode::Mfcc
}

fn split_frames(frames: &Option<Vec<Matrix>>, n_train: usize) -> Option<(&[Matrix], &[Matrix])> {
    frames.as_ref().map(|f| f.split_at(n_train))
}

/// Full pipeline for the configured mode and model. Everything needed to
/// replay the run lands in `out`, with `MANIFEST` tracking completion.
pub fn cmd_run(cfg: &ExperimentConfig, out: &Path) -> Result<TrainReport, HarnessError> {
    let mut manifest = RunManifest::start(out, "run")?;
    let res = (|| {
        write_provenance(out, cfg)?;
        let originals = scan_corpora(cfg)?;
        write_scan(out, &originals)?;
        manifest.done("scan")?;
        let plan = plan_split(&originals, cfg)?;
        write_split(out, &plan, originals.len())?;
        manifest.done("split")?;
        let feats = extract_records(&plan.records, cfg.feature_mode, needs_frames(cfg.model, cfg.feature_mode), cfg)?;
        let n = feats.table.len();
        let train_rows = feats.table.select_rows(&(0..plan.n_train).collect::<Vec<_>>());
        let test_rows = feats.table.select_rows(&(plan.n_train..n).collect::<Vec<_>>());
        write_table(&out.join("features.csv"), &feats.table)?;
        write_table(&out.join("train.csv"), &train_rows)?;
        write_table(&out.join("test.csv"), &test_rows)?;
        manifest.done("extract")?;
        let cell = train_cell(
            cfg,
            cfg.model,
            cfg.feature_mode,
            &train_rows,
            &test_rows,
            split_frames(&feats.frames, plan.n_train),
        )?;
        write_cell(out, &cell)?;
        manifest.done("train")?;
        println!(
            "{} on {}: test accuracy {:.4} after {} epochs ({:.2} s/epoch)",
            cfg.model,
            cfg.feature_mode,
            cell.report.test_accuracy,
            cell.report.epochs.len(),
            cell.report.mean_epoch_seconds()
        );
        Ok(cell.report)
    })();
    manifest.finish(res)
}

/// One line of `comparison.csv`; `result` is `None` for a failed cell.
#[derive(Debug, Clone)]
pub struct CompareRow {
    pub mode: FeatureMode,
    pub model: ModelKind,
    pub result: Option<TrainReport>,
    pub split_hash: String,
}

/// Every `compare_modes x compare_models` cell on one shared split. Features
/// are extracted once in combined mode and projected per cell. A failing
/// cell is reported and the grid carries on.
pub fn cmd_compare(cfg: &ExperimentConfig, out: &Path) -> Result<Vec<CompareRow>, HarnessError> {
    let mut manifest = RunManifest::start(out, "compare")?;
    let res = (|| {
        write_provenance(out, cfg)?;
        let originals = scan_corpora(cfg)?;
        write_scan(out, &originals)?;
        manifest.done("scan")?;
        let plan = plan_split(&originals, cfg)?;
        write_split(out, &plan, originals.len())?;
        manifest.done("split")?;
        let with_frames = cfg.compare_models.iter().any(|&k| cfg.compare_modes.iter().any(|&m| needs_frames(k, m)));
        let feats = extract_records(&plan.records, FeatureMode::Combined, with_frames, cfg)?;
        let n = feats.table.len();
        let train_all = feats.table.select_rows(&(0..plan.n_train).collect::<Vec<_>>());
        let test_all = feats.table.select_rows(&(plan.n_train..n).collect::<Vec<_>>());
        write_table(&out.join("features.csv"), &feats.table)?;
        manifest.done("extract")?;

        let mut rows = Vec::new();
        for &mode in &cfg.compare_modes {
            let cols = project_mode(&feats.table.schema, mode);
            for &kind in &cfg.compare_models {
                let cell_dir = out.join("cells").join(format!("{mode}_{kind}"));
                let run = || -> Result<TrainReport, HarnessError> {
                    let tr = train_all.select_columns(&cols)?;
                    let te = test_all.select_columns(&cols)?;
                    let cell = train_cell(cfg, kind, mode, &tr, &te, split_frames(&feats.frames, plan.n_train))?;
                    write_cell(&cell_dir, &cell)?;
                    write_text(&cell_dir.join("split_hash.txt"), &format!("{}\n", plan.hash))?;
                    Ok(cell.report)
                };
                let result = match run() {
                    Ok(r) => Some(r),
                    Err(e) => {
                        log::error!("cell {mode}/{kind} failed: {e}");
                        None
                    }
                };
                rows.push(CompareRow { mode, model: kind, result, split_hash: plan.hash.clone() });
                manifest.done(&format!("cell {mode}_{kind}"))?;
            }
        }
        write_comparison(out, &rows)?;
        print_comparison(&rows);
        let failed = rows.iter().filter(|r| r.result.is_none()).count();
        if failed > 0 {
            return Err(HarnessError::CellsFailed { failed, total: rows.len() });
        }
        Ok(rows)
    })();
    manifest.finish(res)
}

fn write_comparison(out: &Path, rows: &[CompareRow]) -> Result<(), HarnessError> {
    let mut table = format!("{COMPARISON_HEADER}\n");
    let mut recall = format!(
        "feature_mode,model,{}\n",
        Emotion::ALL.iter().map(|e| e.name()).collect::<Vec<_>>().join(",")
    );
    for r in rows {
        match &r.result {
            Some(rep) => {
                table.push_str(&format!(
                    "{},{},{},{},{:.6}\n",
                    r.mode,
                    r.model,
                    rep.test_accuracy,
                    rep.epochs.len(),
                    rep.mean_epoch_seconds()
                ));
                let cells: Vec<String> =
                    rep.confusion.recall().iter().map(|v| v.map_or(String::new(), |v| v.to_string())).collect();
                recall.push_str(&format!("{},{},{}\n", r.mode, r.model, cells.join(",")));
            }
            None => {
                table.push_str(&format!("{},{},failed,,\n", r.mode, r.model));
                recall.push_str(&format!("{},{}{}\n", r.mode, r.model, ",".repeat(Emotion::COUNT)));
            }
        }
    }
    write_text(&out.join("comparison.csv"), &table)?;
    write_text(&out.join("recall.csv"), &recall)
}

fn print_comparison(rows: &[CompareRow]) {
    let fmt = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.3}"));
    println!("{:<9} {:<5} {:>8} {:>8} {:>8} {:>8}", "features", "model", "accuracy", "s/epoch", "surprise", "angry");
    for r in rows {
        match &r.result {
            Some(rep) => {
                let recall = rep.confusion.recall();
                println!(
                    "{:<9} {:<5} {:>8.3} {:>8.2} {:>8} {:>8}",
                    r.mode.name(),
                    r.model.name(),
                    rep.test_accuracy,
                    rep.mean_epoch_seconds(),
                    fmt(recall[Emotion::Surprise.index()]),
                    fmt(recall[Emotion::Angry.index()])
                );
            }
            None => println!("{:<9} {:<5} {:>8}", r.mode.name(), r.model.name(), "failed"),
        }
    }
}

/// Picks a clip for plotting: the first scanned record (corpus order, then
/// sorted path) matching every given criterion.
#[derive(Debug, Clone, Default)]
pub struct ClipSelector {
    pub emotion: Option<Emotion>,
    /// Matches when the record path ends with this path.
    pub path: Option<PathBuf>,
}

impl ClipSelector {
    fn matches(&self, r: &ClipRecord) -> bool {
        self.emotion.is_none_or(|e| r.emotion == e) && self.path.as_ref().is_none_or(|p| r.path.ends_with(p))
    }

    fn describe(&self) -> String {
        let mut parts = Vec::new();
        if let Some(e) = self.emotion {
            parts.push(format!("emotion={e}"));
        }
        if let Some(p) = &self.path {
            parts.push(format!("path={}", p.display()));
        }
        if parts.is_empty() {
            "any clip".into()
        } else {
            parts.join(" ")
        }
    }
}

/// `waveplot.csv`, `spectrogram.pgm` and `spectrogram.csv` for the selected
/// clip at the pipeline rate and length. Returns the chosen record.
pub fn cmd_viz(
    cfg: &ExperimentConfig,
    out: &Path,
    selector: &ClipSelector,
    max_points: Option<usize>,
) -> Result<ClipRecord, HarnessError> {
    let originals = scan_corpora(cfg)?;
    let record = originals
        .into_iter()
        .find(|r| selector.matches(r))
        .ok_or_else(|| HarnessError::ClipNotFound(selector.describe()))?;
    let clip = load_clip(&record.path, cfg)?.fix_length(cfg.clip_seconds);
    let stem = format!("{}", record.emotion);
    write_file(&out.join(format!("{stem}_waveplot.csv")), |w| Ok(viz::waveplot_export(&clip, max_points, w)?))?;
    let stft = cfg.feature_config().stft;
    let pgm_path = out.join(format!("{stem}_spectrogram.pgm"));
    let csv_path = out.join(format!("{stem}_spectrogram.csv"));
    let mut pgm = create(&pgm_path)?;
    let mut csv = create(&csv_path)?;
    viz::spectrogram_export(&clip, &stft, &mut pgm, &mut csv)?;
    pgm.flush().map_err(io_err(&pgm_path))?;
    csv.flush().map_err(io_err(&csv_path))?;
    println!("{} ({})", record.path.display(), record.emotion);
    Ok(record)
}
