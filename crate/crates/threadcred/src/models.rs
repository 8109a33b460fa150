//! Forest model dumps.
//!
//! `{"format":"threadcred-forest","version":1,"features":[names],"model":{...}}`
//! where `model` is the serialized [`ForestModel`] and `features` names its
//! input columns in order.

use std::path::Path;

use serde::{Deserialize, Serialize};
use threadcred_core::learn::{ForestModel, FOREST_MODEL_VERSION};

use crate::error::{read_to_string, write_string, IoError, IoResult};

pub const FOREST_FORMAT: &str = "threadcred-forest";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestDump {
    pub format: String,
    pub version: u32,
    pub features: Vec<String>,
    pub model: ForestModel,
}

impl ForestDump {
    pub fn new(features: Vec<String>, model: ForestModel) -> Self {
        ForestDump {
            format: FOREST_FORMAT.into(),
            version: FOREST_MODEL_VERSION,
            features,
            model,
        }
    }
}

pub fn write_forest(path: &Path, dump: &ForestDump) -> IoResult<()> {
    let mut s = serde_json::to_string(dump).expect("forest serializes");
    s.push('\n');
    write_string(path, &s)
}

pub fn read_forest(path: &Path) -> IoResult<ForestDump> {
    let dump: ForestDump =
        serde_json::from_str(&read_to_string(path)?).map_err(|e| IoError::format(path, e.to_string()))?;
    if dump.format != FOREST_FORMAT || dump.version != FOREST_MODEL_VERSION {
        return Err(IoError::format(
            path,
            format!(
                "expected {FOREST_FORMAT} v{FOREST_MODEL_VERSION}, got {} v{}",
                dump.format, dump.version
            ),
        ));
    }
    if dump.features.len() != dump.model.width() {
        return Err(IoError::format(
            path,
            format!(
                "{} feature names for a width-{} model",
                dump.features.len(),
                dump.model.width()
            ),
        ));
    }
    dump.model.validate()?;
    Ok(dump)
}

#[cfg(test)]
mod tests {
    use super::*;
    use threadcred_core::learn::{train_forest, ForestConfig, TrainingMatrix};
    use threadcred_core::synth::gaussian_clusters;

    #[test]
    fn dump_round_trips_predictions_bitwise() {
        let (rows, labels) = gaussian_clusters(60, 3, 2.0, 1);
        let m = TrainingMatrix::from_rows(3, &rows, &labels).unwrap();
        let cfg = ForestConfig {
            n_trees: 5,
            ..ForestConfig::with_seed(3)
        };
        let model = train_forest(&m, &cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.json");
        write_forest(
            &p,
            &ForestDump::new(vec!["a".into(), "b".into(), "c".into()], model.clone()),
        )
        .unwrap();
        let back = read_forest(&p).unwrap();
        assert_eq!(back.model, model);
        for row in &rows {
            assert_eq!(
                back.model.predict_proba(row).unwrap().to_bits(),
                model.predict_proba(row).unwrap().to_bits()
            );
        }
        std::fs::write(
            &p,
            std::fs::read_to_string(&p).unwrap().replace("\"c\"]", "\"c\",\"d\"]"),
        )
        .unwrap();
        assert!(read_forest(&p).unwrap_err().to_string().contains("feature names"));
    }
}
