use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use gcnet_core::experiment::{
    run_experiment, write_replicates_csv, write_table_csv, write_timings_csv, ExperimentConfig, ExperimentReport,
};
use gcnet_core::metrics::prediction_score;
use gcnet_core::path::{solve_path, write_path_csv};
use gcnet_core::simdata::{gen_dataset, SimConfig};
use gcnet_core::tuner::write_tune_csv;
use gcnet_core::{fmt_float, net, Dataset, Error, Model, PathResult};
use serde_json::{json, Value};

use crate::config::{load, TrainConfig};
use crate::CliError;

/// What a command reports: one line for stdout plus any warnings.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Summary {
    pub message: String,
    pub warnings: Vec<String>,
}

impl Summary {
    fn new(message: String) -> Self {
        Self {
            message,
            warnings: Vec::new(),
        }
    }
}

/// `prefix` with `suffix` appended to its final component.
pub fn output_path(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s: OsString = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

pub fn truth_path(out_csv: &Path) -> PathBuf {
    out_csv.with_extension("truth.json")
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::Data(format!("cannot open {}: {e}", path.display())))
}

fn write_json(path: &Path, value: &Value) -> Result<(), CliError> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::Data(e.to_string()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn one_based(idx: &[usize]) -> Vec<usize> {
    idx.iter().map(|j| j + 1).collect()
}

pub fn simulate(config: &Path, out_csv: &Path, overrides: &[(String, String)]) -> Result<Summary, CliError> {
    let cfg: SimConfig = load(config, overrides)?;
    let (data, truth) = gen_dataset(&cfg)?;
    let mut w = create(out_csv)?;
    data.write_csv(&mut w)?;
    w.flush()?;
    let censored = match &data.outcome {
        gcnet_core::Outcome::Survival { event, .. } => Some(event.iter().filter(|e| !**e).count()),
        _ => None,
    };
    let sidecar = json!({
        "config": cfg,
        "support": one_based(&truth.support),
        "censored": censored,
        "f_values": truth.f_values,
        "latent_time": truth.latent_time,
    });
    let side = truth_path(out_csv);
    write_json(&side, &sidecar)?;
    Ok(Summary::new(format!("wrote {} and {}", out_csv.display(), side.display())))
}

fn load_train(dataset: &Path, config: &Path, overrides: &[(String, String)]) -> Result<(TrainConfig, Dataset), CliError> {
    let cfg: TrainConfig = load(config, overrides)?;
    let data = Dataset::read_csv(open(dataset)?, cfg.model)?;
    Ok((cfg, data))
}

fn write_path_outputs(path: &PathResult, prefix: &Path) -> Result<(PathBuf, PathBuf), CliError> {
    let csv_path = output_path(prefix, "_path.csv");
    let mut w = create(&csv_path)?;
    write_path_csv(path, &mut w)?;
    w.flush()?;

    let entries = path
        .entries
        .iter()
        .map(|e| {
            let model = Model::from_full(&path.config, &e.params)?;
            Ok(json!({
                "lambda": e.lambda,
                "selected": one_based(&e.selected),
                "epochs_run": e.epochs_run,
                "model": model.to_json_value()?,
            }))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let warnings: Vec<String> = path.warnings.iter().map(ToString::to_string).collect();
    let models_path = output_path(prefix, "_models.json");
    write_json(&models_path, &json!({ "entries": entries, "warnings": warnings }))?;
    Ok((csv_path, models_path))
}

pub fn path(dataset: &Path, config: &Path, prefix: &Path, overrides: &[(String, String)]) -> Result<Summary, CliError> {
    let (cfg, data) = load_train(dataset, config, overrides)?;
    let net = cfg.network(data.d());
    match solve_path(&data, &net, &cfg.fit(), &cfg.path(), cfg.seed) {
        Ok(result) => {
            let (a, b) = write_path_outputs(&result, prefix)?;
            Ok(Summary {
                message: format!("wrote {} and {}", a.display(), b.display()),
                warnings: result.warnings.iter().map(ToString::to_string).collect(),
            })
        }
        Err(Error::PathFailed { lambda, source, partial }) => {
            let (a, b) = write_path_outputs(&partial, prefix)?;
            Err(CliError::Partial(format!(
                "path stopped at lambda = {lambda}: {source}; {} completed entries written to {} and {}",
                partial.entries.len(),
                a.display(),
                b.display()
            )))
        }
        Err(e) => Err(e.into()),
    }
}

pub fn tune(dataset: &Path, config: &Path, prefix: &Path, overrides: &[(String, String)]) -> Result<Summary, CliError> {
    let (cfg, data) = load_train(dataset, config, overrides)?;
    let net_cfg = cfg.network(data.d());
    let tune_cfg = cfg.tune()?;
    let result = gcnet_core::tuner::tune(&data, &net_cfg, &cfg.fit(), &tune_cfg)?;

    let table_path = output_path(prefix, "_tune.csv");
    let mut w = create(&table_path)?;
    write_tune_csv(&result.table, &mut w)?;
    w.flush()?;

    let model = Model::from_full(&net_cfg, &result.best.params)?;
    let model_path = output_path(prefix, "_best.json");
    let mut w = create(&model_path)?;
    model.to_json(&mut w)?;
    w.flush()?;

    let valid = data.subset(&result.valid_idx);
    let valid_score = net::forward_batch(&net_cfg, &result.best.params, &valid.x)
        .and_then(|pred| prediction_score(&pred, &valid.outcome))
        .ok();
    let summary = json!({
        "lambda": result.best.lambda,
        "alpha": result.best.alpha,
        "validation_loss": result.best.validation_loss,
        "validation_score": valid_score.map(|s| s.0),
        "score_kind": valid_score.map(|s| s.1),
        "model_size": result.best.selected.len(),
        "selected": one_based(&result.best.selected),
        "train_rows": result.train_idx.len(),
        "validation_rows": result.valid_idx.len(),
        "refit": tune_cfg.refit,
    });
    let summary_path = output_path(prefix, "_best_summary.json");
    write_json(&summary_path, &summary)?;
    Ok(Summary::new(format!(
        "best lambda={} alpha={} selected={:?}; wrote {}, {}, {}",
        fmt_float(result.best.lambda),
        fmt_float(result.best.alpha),
        one_based(&result.best.selected),
        table_path.display(),
        model_path.display(),
        summary_path.display()
    )))
}

pub fn experiment(
    config: &Path,
    out_dir: Option<&Path>,
    overrides: &[(String, String)],
) -> Result<ExperimentReport, CliError> {
    let mut cfg: ExperimentConfig = load(config, overrides)?;
    let dir = match out_dir {
        Some(d) => d.to_path_buf(),
        None => cfg
            .output_dir
            .as_ref()
            .map(PathBuf::from)
            .ok_or_else(|| CliError::Config("no output directory given".into()))?,
    };
    cfg.output_dir = Some(dir.to_string_lossy().into_owned());
    let report = run_experiment(&cfg)?;
    fs::create_dir_all(&dir)?;

    let report_json = serde_json::to_value(&report).map_err(|e| CliError::Data(e.to_string()))?;
    write_json(&dir.join("report.json"), &report_json)?;
    let mut w = create(&dir.join("replicates.csv"))?;
    write_replicates_csv(&report.replicates, &mut w)?;
    w.flush()?;
    let mut w = create(&dir.join("table.csv"))?;
    write_table_csv(&report.aggregate, &mut w)?;
    w.flush()?;
    let mut w = create(&dir.join("timings.csv"))?;
    write_timings_csv(&report.replicates, &mut w)?;
    w.flush()?;

    if report.failed() {
        return Err(CliError::Partial(format!(
            "{} of {} replicates failed; partial report written to {}",
            report.aggregate.replicates_failed,
            report.replicates.len(),
            dir.display()
        )));
    }
    Ok(report)
}

/// One-line description of an experiment report and its failed replicates.
pub fn experiment_summary(report: &ExperimentReport, dir: &Path) -> Summary {
    let agg = &report.aggregate;
    Summary {
        message: format!(
            "{}: {} ok, {} failed; MS {:.2} ({:.2}), FPR {:.2}%, FNR {:.2}%, median score {:.4}; wrote {}",
            agg.method,
            agg.replicates_ok,
            agg.replicates_failed,
            agg.ms_mean,
            agg.ms_sd,
            agg.fpr_mean,
            agg.fnr_mean,
            agg.score_median,
            dir.display()
        ),
        warnings: report
            .replicates
            .iter()
            .filter(|r| !r.ok)
            .map(|r| format!("replicate {} failed: {}", r.replicate, r.error.as_deref().unwrap_or("")))
            .collect(),
    }
}

pub fn predict(model: &Path, dataset: &Path, out_csv: &Path) -> Result<Summary, CliError> {
    let model = Model::from_json(open(model)?)?;
    let x = Dataset::read_covariates_csv(open(dataset)?)?;
    let scores = model.predict(&x)?;
    let mut w = create(out_csv)?;
    writeln!(w, "score")?;
    for s in &scores {
        writeln!(w, "{}", fmt_float(*s))?;
    }
    w.flush()?;
    Ok(Summary::new(format!("wrote {} scores to {}", scores.len(), out_csv.display())))
}
