//! Result files: elimination traces, transfer reports, ROC curves, and the
//! combined plotting CSV.
//!
//! JSON reports carry a top-level `"generated_at"` timestamp unless the
//! caller passes `None`; everything else is a pure function of the result,
//! so reruns with the same seed are byte-identical.

use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};
use threadcred_core::learn::{RocCurve, RocPoint};
use threadcred_core::select::{CvConfig, Dataset, EliminationTrace, FeatureSetScore, TransferResult};

use crate::error::{read_to_string, write_string, IoError, IoResult};
use crate::matrix::format_value;

fn to_json_text(mut value: Value, generated_at: Option<&str>) -> String {
    if let (Some(ts), Value::Object(map)) = (generated_at, &mut value) {
        map.insert("generated_at".into(), Value::String(ts.into()));
    }
    let mut s = serde_json::to_string_pretty(&value).expect("report serializes");
    s.push('\n');
    s
}

fn names(ds: &Dataset, ids: &[usize]) -> Vec<String> {
    ids.iter().map(|&c| ds.columns()[c].clone()).collect()
}

/// Elimination trace with feature ids rendered as column names.
pub fn trace_json(trace: &EliminationTrace, ds: &Dataset) -> Value {
    let iterations: Vec<Value> = trace
        .iterations
        .iter()
        .map(|step| {
            let mut held = Map::new();
            for (&c, &auc) in step.active.iter().zip(&step.held_out_auc) {
                held.insert(ds.columns()[c].clone(), auc.into());
            }
            serde_json::json!({
                "active": names(ds, &step.active),
                "held_out_auc": held,
                "removed": ds.columns()[step.removed],
                "best_auc": step.best_auc,
            })
        })
        .collect();
    serde_json::json!({
        "dataset": ds.name(),
        "config": trace.config,
        "iterations": iterations,
        "chosen_subset": names(ds, &trace.chosen_subset),
    })
}

pub fn write_trace(path: &Path, trace: &EliminationTrace, ds: &Dataset, generated_at: Option<&str>) -> IoResult<()> {
    write_string(path, &to_json_text(trace_json(trace, ds), generated_at))
}

/// One row per elimination: the number of features left afterwards and the
/// best held-out AUC that removal achieved.
pub fn rfe_curve_csv(trace: &EliminationTrace, ds: &Dataset) -> String {
    let mut out = String::from("iteration,features_remaining,best_auc,removed\n");
    for (i, step) in trace.iterations.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            i + 1,
            step.active.len() - 1,
            format_value(step.best_auc),
            ds.columns()[step.removed]
        ));
    }
    out
}

/// Reads a feature list: a JSON array of names, or any JSON object with a
/// `"chosen_subset"` or `"features"` array (such as an elimination trace).
pub fn read_feature_list(path: &Path) -> IoResult<Vec<String>> {
    let value: Value =
        serde_json::from_str(&read_to_string(path)?).map_err(|e| IoError::format(path, e.to_string()))?;
    let list = match &value {
        Value::Array(_) => Some(&value),
        Value::Object(m) => m.get("chosen_subset").or_else(|| m.get("features")),
        _ => None,
    };
    let names: Option<Vec<String>> = list
        .and_then(Value::as_array)
        .map(|a| a.iter().map(|v| v.as_str().map(String::from)).collect())
        .unwrap_or(None);
    match names {
        Some(n) if !n.is_empty() => Ok(n),
        _ => Err(IoError::format(path, "expected a non-empty list of feature names")),
    }
}

#[derive(Serialize)]
struct CrossvalReport<'a> {
    dataset: &'a str,
    features: &'a [String],
    config: &'a CvConfig,
    #[serde(flatten)]
    score: &'a FeatureSetScore,
}

pub fn write_crossval(
    path: &Path,
    ds: &Dataset,
    features: &[String],
    config: &CvConfig,
    score: &FeatureSetScore,
    generated_at: Option<&str>,
) -> IoResult<()> {
    let report = CrossvalReport {
        dataset: ds.name(),
        features,
        config,
        score,
    };
    let value = serde_json::to_value(report).expect("report serializes");
    write_string(path, &to_json_text(value, generated_at))
}

pub fn write_transfer(path: &Path, result: &TransferResult, generated_at: Option<&str>) -> IoResult<()> {
    let value = serde_json::to_value(result).expect("transfer result serializes");
    write_string(path, &to_json_text(value, generated_at))
}

pub fn read_transfer(path: &Path) -> IoResult<TransferResult> {
    let text = read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| IoError::format(path, e.to_string()))
}

/// `fpr,tpr,threshold` rows and a trailing `# auc=<value>` line. The first
/// point's threshold is `inf`.
pub fn roc_csv(roc: &RocCurve) -> String {
    let mut out = String::from("fpr,tpr,threshold\n");
    for p in &roc.points {
        out.push_str(&format!(
            "{},{},{}\n",
            format_value(p.fpr),
            format_value(p.tpr),
            format_value(p.threshold)
        ));
    }
    out.push_str(&format!("# auc={}\n", format_value(roc.auc)));
    out
}

pub fn write_roc(path: &Path, roc: &RocCurve) -> IoResult<()> {
    write_string(path, &roc_csv(roc))
}

pub fn read_roc(path: &Path) -> IoResult<RocCurve> {
    let text = read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, "fpr,tpr,threshold")) => {}
        _ => return Err(IoError::format(path, "expected header fpr,tpr,threshold")),
    }
    let mut points = Vec::new();
    let mut auc = None;
    for (i, line) in lines {
        let n = i + 1;
        if let Some(v) = line.strip_prefix("# auc=") {
            auc = Some(
                v.trim()
                    .parse::<f64>()
                    .map_err(|e| IoError::line(path, n, e.to_string()))?,
            );
            continue;
        }
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields = line
            .split(',')
            .map(|f| f.trim().parse::<f64>())
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|e| IoError::line(path, n, e.to_string()))?;
        let [fpr, tpr, threshold] = fields[..] else {
            return Err(IoError::line(path, n, "expected 3 fields"));
        };
        points.push(RocPoint { fpr, tpr, threshold });
    }
    let auc = auc.ok_or_else(|| IoError::format(path, "missing \"# auc=\" line"))?;
    Ok(RocCurve { points, auc })
}

/// Concatenates named curves into `model,fpr,tpr` rows.
pub fn combined_csv(curves: &[(String, RocCurve)]) -> String {
    let mut out = String::from("model,fpr,tpr\n");
    for (name, roc) in curves {
        for p in &roc.points {
            out.push_str(&format!(
                "{},{},{}\n",
                csv_field(name),
                format_value(p.fpr),
                format_value(p.tpr)
            ));
        }
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Transfer result files as read back for plotting: the model name is the
/// source dataset name.
pub fn curve_from_file(path: &Path) -> IoResult<(String, RocCurve)> {
    if path.extension().is_some_and(|e| e == "csv") {
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        return Ok((name, read_roc(path)?));
    }
    let r = read_transfer(path)?;
    Ok((r.source, r.roc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use threadcred_core::select::{random_baseline, rfe, Dataset};
    use threadcred_core::synth::informative_plus_noise;
    use threadcred_core::Sequential;

    fn dataset() -> Dataset {
        let (rows, labels) = informative_plus_noise(60, 2, 2, 2.0, 5);
        Dataset::synthetic("toy", &rows, labels).unwrap()
    }

    #[test]
    fn trace_json_uses_names_in_active_order() {
        let ds = dataset();
        let cfg = CvConfig {
            repeats: 1,
            folds: 3,
            trees: 5,
            seed: 1,
        };
        let trace = rfe(&ds, &cfg, &Sequential).unwrap();
        let v = trace_json(&trace, &ds);
        let first = &v["iterations"][0];
        assert_eq!(first["active"], serde_json::json!(["f0", "f1", "f2", "f3"]));
        let keys: Vec<&String> = first["held_out_auc"].as_object().unwrap().keys().collect();
        assert_eq!(keys, ["f0", "f1", "f2", "f3"]);
        assert_eq!(v["iterations"].as_array().unwrap().len(), 3);
        assert_eq!(v["config"]["trees"], 5);
        let csv = rfe_curve_csv(&trace, &ds);
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.lines().nth(1).unwrap().starts_with("1,3,"));
    }

    #[test]
    fn transfer_and_roc_round_trip() {
        let ds = dataset();
        let r = random_baseline(&ds, 3, 2).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.json");
        write_transfer(&p, &r, Some("2026-01-01T00:00:00Z")).unwrap();
        assert!(read_to_string(&p).unwrap().contains("\"threshold\": \"inf\""));
        assert_eq!(read_transfer(&p).unwrap(), r);
        let c = dir.path().join("random.csv");
        write_roc(&c, &r.roc).unwrap();
        assert_eq!(read_roc(&c).unwrap(), r.roc);
        assert_eq!(curve_from_file(&c).unwrap().0, "random");
        assert_eq!(curve_from_file(&p).unwrap(), ("random".to_string(), r.roc.clone()));
        let combined = combined_csv(&[("a,b".into(), r.roc.clone())]);
        assert!(combined.lines().nth(1).unwrap().starts_with("\"a,b\",0.0,0.0"));
    }

    #[test]
    fn feature_lists() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.json");
        std::fs::write(&p, r#"["a","b"]"#).unwrap();
        assert_eq!(read_feature_list(&p).unwrap(), ["a", "b"]);
        std::fs::write(&p, r#"{"chosen_subset":["c"],"iterations":[]}"#).unwrap();
        assert_eq!(read_feature_list(&p).unwrap(), ["c"]);
        std::fs::write(&p, r#"[1]"#).unwrap();
        assert!(read_feature_list(&p).is_err());
    }
}
