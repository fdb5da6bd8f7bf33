use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use watermark_probe::activation::dump::{self, read_dump_with_manifest};
use watermark_probe::activation::{ActivationMatrix, GroupLabel};
use watermark_probe::head::{
    alpha_sweep, read_output_scores, read_sweep_table, LabeledEmbeddingSet, SweepData,
    SweepOptions,
};
use watermark_probe::probe::report::{
    read_scores_csv, scores_file_name, write_json, write_scores_csv, write_summary_csv, PlotData,
};
use watermark_probe::probe::{rank_by_diff, score_all, summarize, ModelScores, RepScore};
use watermark_probe::stamper::charset::{default_charset, load_charset};
use watermark_probe::stamper::{build_probe_set, load_baseline_dir, GlyphFont, WatermarkSpec};
use watermark_probe::Error;

use crate::config::{AuditConfig, DumpPair};
use crate::error::CliError;

fn create_output_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::from(Error::Io { path: dir.to_path_buf(), source: e }))
}

pub fn stamp(config: &AuditConfig) -> Result<Vec<PathBuf>, CliError> {
    let stamp = config.stamp()?;
    let baseline = load_baseline_dir(&stamp.baseline_dir)?;
    create_output_dir(&config.output_dir)?;
    let mut written = Vec::new();
    for sc in &stamp.scenarios {
        let ctx = |e: Error| CliError::from(e).in_scenario(Some(sc.scenario));
        let font = GlyphFont::load(&sc.font).map_err(ctx)?;
        let charset = match &sc.charset {
            Some(path) => load_charset(path).map_err(ctx)?,
            None => default_charset(sc.scenario),
        };
        let spec = WatermarkSpec::new(
            sc.scenario,
            charset,
            sc.string_length,
            sc.font_size,
            sc.color,
            sc.seed.unwrap_or(config.seed),
            font,
        )
        .map_err(ctx)?;
        let set = build_probe_set(&baseline, &spec).map_err(ctx)?;
        let dir = set.write(&config.output_dir).map_err(ctx)?;
        println!("{}: {} pairs -> {}", sc.scenario, set.pairs.len(), dir.display());
        written.push(dir);
    }
    Ok(written)
}

#[derive(Serialize)]
struct ValidateLine<'a> {
    path: &'a Path,
    pass: bool,
    #[serde(flatten)]
    validation: &'a dump::Validation,
}

/// Checks each dump; returns the first failure after reporting every file.
pub fn validate(paths: &[PathBuf], json: bool) -> Result<(), CliError> {
    let mut first_failure = None;
    for path in paths {
        let v = dump::validate(path);
        if json {
            let line = ValidateLine { path, pass: v.passed(), validation: &v };
            println!("{}", serde_json::to_string(&line).expect("validation serializes"));
        } else {
            match &v.header {
                Some(h) => println!(
                    "{}: magic=ACTD version={} dtype={} rows={} cols={} bytes={}",
                    path.display(),
                    h.version,
                    h.dtype,
                    h.n_rows,
                    h.n_cols,
                    v.file_len
                ),
                None => println!("{}: bytes={}", path.display(), v.file_len),
            }
            match &v.error {
                None => println!("{}: PASS", path.display()),
                Some(e) => println!("{}: FAIL {e}", path.display()),
            }
        }
        if !v.passed() && first_failure.is_none() {
            first_failure = Some(v);
        }
    }
    match first_failure {
        None => Ok(()),
        Some(v) => Err(revalidate_error(&v.path)),
    }
}

fn revalidate_error(path: &Path) -> CliError {
    match read_dump_with_manifest(path) {
        Err(e) => e.into(),
        Ok(_) => CliError::config(format!("{} failed validation", path.display())),
    }
}

fn load_probe_dump(path: &Path, expected: GroupLabel, pair: &DumpPair) -> Result<ActivationMatrix, CliError> {
    let ctx = |e: Error| CliError::from(e).in_scenario(Some(pair.scenario));
    let (matrix, _) = read_dump_with_manifest(path).map_err(ctx)?;
    if let Some(group) = matrix.group {
        if group != expected {
            return Err(ctx(Error::Manifest {
                path: dump::manifest_path(path),
                reason: format!("dump is labelled {group:?}, configured as {expected:?}"),
            }));
        }
    }
    if let Some(s) = matrix.scenario {
        if s != pair.scenario {
            return Err(ctx(Error::Manifest {
                path: dump::manifest_path(path),
                reason: format!("dump is for scenario {s}, configured as {}", pair.scenario),
            }));
        }
    }
    Ok(matrix)
}

fn load_class_names(config: &AuditConfig) -> Result<Option<Vec<String>>, CliError> {
    let Some(path) = config.score.as_ref().and_then(|s| s.class_names.as_ref()) else {
        return Ok(None);
    };
    let text = fs::read_to_string(path).map_err(|e| CliError::from(Error::Io { path: path.clone(), source: e }))?;
    Ok(Some(text.lines().map(|l| l.trim().to_string()).collect()))
}

fn write_summaries(config: &AuditConfig, inputs: &[ModelScores]) -> Result<(), CliError> {
    let names = load_class_names(config)?;
    for summary in summarize(inputs, config.threshold, config.top_k, names.as_deref())? {
        let path = config.output_dir.join(format!("summary_{}.csv", summary.scenario));
        write_summary_csv(&path, &summary)?;
    }
    Ok(())
}

pub fn score(config: &AuditConfig) -> Result<(), CliError> {
    let score = config.score()?;
    // load everything before writing anything, so a bad dump leaves no partial output
    let mut loaded = Vec::with_capacity(score.dumps.len());
    for pair in &score.dumps {
        let clean = load_probe_dump(&pair.clean, GroupLabel::Clean, pair)?;
        let stamped = load_probe_dump(&pair.stamped, GroupLabel::Stamped, pair)?;
        loaded.push((pair, clean, stamped));
    }
    create_output_dir(&config.output_dir)?;
    let mut inputs = Vec::with_capacity(loaded.len());
    for (pair, clean, stamped) in &loaded {
        let scores = score_all(clean, stamped).map_err(|e| CliError::from(e).in_scenario(Some(pair.scenario)))?;
        let path = config.output_dir.join(scores_file_name(&pair.model, pair.scenario));
        write_scores_csv(&path, &scores)?;
        let sensitive = scores.iter().filter(|s| s.diff > config.threshold).count();
        println!(
            "{} {}: {} representations, {} with diff > {} -> {}",
            pair.model,
            pair.scenario,
            scores.len(),
            sensitive,
            config.threshold,
            path.display()
        );
        inputs.push(ModelScores {
            model: pair.model.clone(),
            scenario: pair.scenario,
            scores,
        });
    }
    write_summaries(config, &inputs)
}

fn read_score_files(config: &AuditConfig) -> Result<Vec<ModelScores>, CliError> {
    let score = config.score()?;
    score
        .dumps
        .iter()
        .map(|pair| {
            let path = config.output_dir.join(scores_file_name(&pair.model, pair.scenario));
            let scores = read_scores_csv(&path).map_err(|e| CliError::from(e).in_scenario(Some(pair.scenario)))?;
            Ok(ModelScores {
                model: pair.model.clone(),
                scenario: pair.scenario,
                scores,
            })
        })
        .collect()
}

#[derive(Serialize)]
struct RankRow<'a> {
    rank: usize,
    rep: usize,
    layer: &'a str,
    kind: &'a str,
    auc: f64,
    diff: f64,
}

pub fn rank(config: &AuditConfig) -> Result<(), CliError> {
    for entry in read_score_files(config)? {
        let path = config
            .output_dir
            .join(format!("rank_{}_{}.csv", entry.model, entry.scenario));
        write_ranking(&path, &entry.scores)?;
        println!("{} {}: ranking -> {}", entry.model, entry.scenario, path.display());
    }
    Ok(())
}

fn write_ranking(path: &Path, scores: &[RepScore]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    for (rank, &i) in rank_by_diff(scores).iter().enumerate() {
        let s = &scores[i];
        w.serialize(RankRow {
            rank: rank + 1,
            rep: s.rep.index,
            layer: &s.rep.layer_name,
            kind: s.rep.kind.as_str(),
            auc: s.auc,
            diff: s.diff,
        })
        .map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| csv_error(path, e))
}

fn csv_error(path: &Path, e: impl ToString) -> CliError {
    Error::Csv {
        path: path.to_path_buf(),
        reason: e.to_string(),
    }
    .into()
}

pub fn sweep(config: &AuditConfig) -> Result<(), CliError> {
    let sweep = config.sweep()?;
    let train = LabeledEmbeddingSet::read(&sweep.train)?;
    let eval = LabeledEmbeddingSet::read(&sweep.eval)?;
    let (probe_clean, _) = read_dump_with_manifest(&sweep.probe_clean)?;
    let (probe_stamped, _) = read_dump_with_manifest(&sweep.probe_stamped)?;
    let scores = match &sweep.scores {
        Some(path) => read_scores_csv(path)?,
        None => score_all(&probe_clean, &probe_stamped)?,
    };
    let options = SweepOptions {
        train: config.training(),
        parallel: sweep.parallel,
    };
    let data = SweepData {
        train: &train,
        eval: &eval,
        probe_clean: &probe_clean,
        probe_stamped: &probe_stamped,
    };
    let report = alpha_sweep(data, &scores, &sweep.alphas, &options)?;
    create_output_dir(&config.output_dir)?;
    report.write(&config.output_dir)?;
    for r in &report.records {
        println!(
            "alpha={} masked={} eval_accuracy={:.4} max_output_diff={:.4}",
            r.alpha, r.n_masked, r.eval_accuracy, r.max_output_diff
        );
    }
    Ok(())
}

#[derive(Serialize)]
struct SweepPlot {
    alpha: Vec<f64>,
    n_masked: Vec<usize>,
    eval_accuracy: Vec<f64>,
    max_output_diff: Vec<f64>,
    /// Per alpha, the AUC of every output class.
    output_auc: Vec<Vec<f64>>,
}

pub fn report(config: &AuditConfig) -> Result<Vec<PathBuf>, CliError> {
    let mut written = Vec::new();
    if config.score.is_some() {
        let inputs = read_score_files(config)?;
        let names = load_class_names(config)?;
        for summary in summarize(&inputs, config.threshold, config.top_k, names.as_deref())? {
            let path = config.output_dir.join(format!("plotdata_{}.json", summary.scenario));
            write_json(&path, &PlotData::new(&summary, config.top_k))?;
            written.push(path);
        }
    }
    if config.output_dir.join("sweep.csv").is_file() {
        let rows = read_sweep_table(&config.output_dir)?;
        let output_auc = rows
            .iter()
            .map(|r| {
                read_output_scores(&config.output_dir, r.alpha)
                    .map(|rows| rows.into_iter().map(|o| o.auc).collect())
            })
            .collect::<Result<Vec<Vec<f64>>, _>>()?;
        let plot = SweepPlot {
            alpha: rows.iter().map(|r| r.alpha).collect(),
            n_masked: rows.iter().map(|r| r.n_masked).collect(),
            eval_accuracy: rows.iter().map(|r| r.eval_accuracy).collect(),
            max_output_diff: rows.iter().map(|r| r.max_output_diff).collect(),
            output_auc,
        };
        let path = config.output_dir.join("plotdata_sweep.json");
        write_json(&path, &plot)?;
        written.push(path);
    }
    if written.is_empty() {
        return Err(CliError::config(
            "nothing to report: configure `score` or run `sweep` first",
        ));
    }
    for p in &written {
        println!("{}", p.display());
    }
    Ok(written)
}

