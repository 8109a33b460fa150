//! Stance corpus, model, and flag files.
//!
//! Corpus: JSONL `{"text":str,"label":"disagree"|"other","source":str}`.
//!
//! Model: one JSON object
//! `{"format":"threadcred-stance","version":1,"hash_bits":int,"bias":float,"seed":int,"weights":[[index,value],...]}`
//! listing only nonzero weights in ascending index order. Floats are written
//! in shortest round-trip form, so a dumped model reloads bit for bit.
//!
//! Flags: JSONL `{"id":str,"disagree":bool}`, one per reply.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use threadcred_core::stance::{StanceExample, StanceLabel, StanceModel};

use crate::error::{read_to_string, write_string, IoError, IoResult};

pub const MODEL_FORMAT: &str = "threadcred-stance";
pub const MODEL_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct WireExample {
    text: String,
    label: String,
    #[serde(default)]
    source: String,
}

fn jsonl_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty())
}

pub fn parse_corpus(text: &str, path: &Path) -> IoResult<Vec<StanceExample>> {
    jsonl_lines(text)
        .map(|(n, line)| {
            let w: WireExample = serde_json::from_str(line).map_err(|e| IoError::line(path, n, e.to_string()))?;
            let label: StanceLabel = w
                .label
                .parse()
                .map_err(|e: threadcred_core::Error| IoError::line(path, n, e.to_string()))?;
            StanceExample::new(w.text, label, w.source).map_err(|e| IoError::line(path, n, e.to_string()))
        })
        .collect()
}

pub fn read_corpus(path: &Path) -> IoResult<Vec<StanceExample>> {
    parse_corpus(&read_to_string(path)?, path)
}

pub fn corpus_to_jsonl(corpus: &[StanceExample]) -> String {
    let mut out = String::new();
    for ex in corpus {
        let w = WireExample {
            text: ex.text().to_string(),
            label: ex.label().as_str().to_string(),
            source: ex.source().to_string(),
        };
        out.push_str(&serde_json::to_string(&w).expect("example serializes"));
        out.push('\n');
    }
    out
}

#[derive(Serialize, Deserialize)]
struct WireModel {
    format: String,
    version: u32,
    hash_bits: u32,
    bias: f64,
    seed: u64,
    weights: Vec<(u32, f64)>,
}

pub fn model_to_json(model: &StanceModel) -> String {
    let wire = WireModel {
        format: MODEL_FORMAT.into(),
        version: MODEL_VERSION,
        hash_bits: model.hash_bits(),
        bias: model.bias(),
        seed: model.training_seed(),
        weights: model
            .weights()
            .iter()
            .enumerate()
            .filter(|(_, w)| **w != 0.0)
            .map(|(i, &w)| (i as u32, w))
            .collect(),
    };
    let mut s = serde_json::to_string(&wire).expect("model serializes");
    s.push('\n');
    s
}

pub fn model_from_json(text: &str, path: &Path) -> IoResult<StanceModel> {
    let wire: WireModel = serde_json::from_str(text).map_err(|e| IoError::format(path, e.to_string()))?;
    if wire.format != MODEL_FORMAT || wire.version != MODEL_VERSION {
        return Err(IoError::format(
            path,
            format!(
                "expected {MODEL_FORMAT} v{MODEL_VERSION}, got {} v{}",
                wire.format, wire.version
            ),
        ));
    }
    if !(1..=30).contains(&wire.hash_bits) {
        return Err(threadcred_core::Error::InvalidHashBits(wire.hash_bits).into());
    }
    let mut weights = vec![0.0; 1usize << wire.hash_bits];
    for (i, w) in wire.weights {
        let slot = weights
            .get_mut(i as usize)
            .ok_or_else(|| IoError::format(path, format!("weight index {i} out of range")))?;
        *slot = w;
    }
    Ok(StanceModel::from_parts(wire.hash_bits, weights, wire.bias, wire.seed)?)
}

pub fn write_model(path: &Path, model: &StanceModel) -> IoResult<()> {
    write_string(path, &model_to_json(model))
}

pub fn read_model(path: &Path) -> IoResult<StanceModel> {
    model_from_json(&read_to_string(path)?, path)
}

#[derive(Serialize, Deserialize)]
struct WireFlag {
    id: String,
    disagree: bool,
}

pub fn parse_flags(text: &str, path: &Path) -> IoResult<BTreeMap<String, bool>> {
    let mut out = BTreeMap::new();
    for (n, line) in jsonl_lines(text) {
        let f: WireFlag = serde_json::from_str(line).map_err(|e| IoError::line(path, n, e.to_string()))?;
        if out.insert(f.id.clone(), f.disagree).is_some() {
            return Err(IoError::line(path, n, format!("duplicate flag for {}", f.id)));
        }
    }
    Ok(out)
}

pub fn read_flags(path: &Path) -> IoResult<BTreeMap<String, bool>> {
    parse_flags(&read_to_string(path)?, path)
}

pub fn flags_to_jsonl(flags: &BTreeMap<String, bool>) -> String {
    let mut out = String::new();
    for (id, &disagree) in flags {
        let f = WireFlag {
            id: id.clone(),
            disagree,
        };
        out.push_str(&serde_json::to_string(&f).expect("flag serializes"));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use threadcred_core::stance::{train_stance, StanceConfig};
    use threadcred_core::synth::stance_corpus;

    #[test]
    fn corpus_round_trip() {
        let corpus = stance_corpus(5, 1);
        let text = corpus_to_jsonl(&corpus);
        assert_eq!(parse_corpus(&text, Path::new("c")).unwrap(), corpus);
    }

    #[test]
    fn corpus_errors_name_the_line() {
        let text = "{\"text\":\"ok\",\"label\":\"other\"}\n\n{\"text\":\"x\",\"label\":\"maybe\"}\n";
        let e = parse_corpus(text, Path::new("c")).unwrap_err().to_string();
        assert!(e.starts_with("c:3:"), "{e}");
        let e = parse_corpus("{\"text\":\"  \",\"label\":\"other\"}", Path::new("c")).unwrap_err();
        assert!(e.to_string().contains("empty"));
    }

    #[test]
    fn model_round_trips_bitwise() {
        let cfg = StanceConfig {
            hash_bits: 12,
            seed: 4,
            ..StanceConfig::default()
        };
        let (model, _) = train_stance(&stance_corpus(20, 2), &cfg).unwrap();
        let json = model_to_json(&model);
        let back = model_from_json(&json, Path::new("m")).unwrap();
        assert_eq!(back.bias().to_bits(), model.bias().to_bits());
        assert!(back
            .weights()
            .iter()
            .zip(model.weights())
            .all(|(a, b)| a.to_bits() == b.to_bits()));
        assert_eq!(model_to_json(&back), json);
    }

    #[test]
    fn model_rejects_bad_layout() {
        let p = Path::new("m");
        let bad_format = r#"{"format":"other","version":1,"hash_bits":2,"bias":0.0,"seed":0,"weights":[]}"#;
        assert!(model_from_json(bad_format, p).is_err());
        let bad_index =
            r#"{"format":"threadcred-stance","version":1,"hash_bits":2,"bias":0.0,"seed":0,"weights":[[4,1.0]]}"#;
        assert!(model_from_json(bad_index, p)
            .unwrap_err()
            .to_string()
            .contains("out of range"));
        let ok = r#"{"format":"threadcred-stance","version":1,"hash_bits":2,"bias":0.5,"seed":3,"weights":[[1,-2.0]]}"#;
        let m = model_from_json(ok, p).unwrap();
        assert_eq!(m.weights(), &[0.0, -2.0, 0.0, 0.0]);
    }

    #[test]
    fn flags_round_trip_and_reject_duplicates() {
        let mut flags = BTreeMap::new();
        flags.insert("a".to_string(), true);
        flags.insert("b".to_string(), false);
        assert_eq!(parse_flags(&flags_to_jsonl(&flags), Path::new("f")).unwrap(), flags);
        let dup = "{\"id\":\"a\",\"disagree\":true}\n{\"id\":\"a\",\"disagree\":false}\n";
        assert!(parse_flags(dup, Path::new("f")).is_err());
    }
}
