//! Rating files: JSON-lines `{"event_id":str,"ratings":[int,...]}`.

use std::path::Path;

use serde::Deserialize;
use threadcred_core::align::RatingVector;

use crate::error::{read_to_string, IoError, IoResult};

#[derive(Deserialize)]
struct WireRatings {
    event_id: String,
    ratings: Vec<i64>,
}

pub fn parse_ratings(text: &str, path: &Path) -> IoResult<Vec<RatingVector>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let w: WireRatings = serde_json::from_str(line).map_err(|e| IoError::line(path, i + 1, e.to_string()))?;
        out.push(RatingVector::new(w.event_id, w.ratings).map_err(|e| IoError::line(path, i + 1, e.to_string()))?);
    }
    Ok(out)
}

pub fn read_ratings(path: &Path) -> IoResult<Vec<RatingVector>> {
    parse_ratings(&read_to_string(path)?, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_validates() {
        let p = Path::new("r.jsonl");
        let r = parse_ratings("{\"event_id\":\"e1\",\"ratings\":[2,2,1]}\n\n", p).unwrap();
        assert_eq!(r[0].event_id(), "e1");
        assert!((r[0].mean() - 5.0 / 3.0).abs() < 1e-15);
        let err = parse_ratings(
            "{\"event_id\":\"e\",\"ratings\":[]}\n{\"event_id\":\"e\",\"ratings\":[3]}",
            p,
        );
        assert!(err.unwrap_err().to_string().starts_with("r.jsonl:1:"));
        let err = parse_ratings(
            "{\"event_id\":\"e\",\"ratings\":[1]}\n{\"event_id\":\"e\",\"ratings\":[3]}",
            p,
        );
        assert!(err.unwrap_err().to_string().contains(":2:"));
    }
}
