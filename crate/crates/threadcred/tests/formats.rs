use std::path::{Path, PathBuf};

use threadcred::cli::{featurize_manifest, LayeredFlags};
use threadcred::core::features::{extract, feature_names, Feature, NoFlags};
use threadcred::core::ingest::{DatasetManifest, ManifestEntry, SourceKind};
use threadcred::core::Label;
use threadcred::matrix::{read_matrix, write_matrix, MatrixFile};
use threadcred::tweets::{read_thread, ParseMode};
use threadcred::{lexicon, manifest, stance_io};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn reference() -> Vec<(String, f64)> {
    std::fs::read_to_string(fixture("thread5.reference.tsv"))
        .unwrap()
        .lines()
        .map(|l| {
            let (k, v) = l.split_once('\t').unwrap();
            (k.to_string(), v.parse().unwrap())
        })
        .collect()
}

/// Counts, ratios, flags, and the plain structural values must match bit for
/// bit; means, sentiment, density, and slopes within 1e-9.
fn exact(name: &str) -> bool {
    ["freq_", "ratio_", "count_", "root_is_"]
        .iter()
        .any(|p| name.starts_with(p))
        || matches!(
            name,
            "tweet_count" | "tree_depth" | "lifetime_minutes" | "avg_tweet_length"
        )
}

#[test]
fn fixture_thread_matches_reference_sheet() {
    let (tree, skipped) = read_thread(&fixture("thread5.jsonl"), ParseMode::Strict).unwrap();
    assert!(skipped.is_empty());
    let flags = stance_io::read_flags(&fixture("thread5_flags.jsonl")).unwrap();
    let lex = lexicon::read_lexicon(&fixture("lexicon_small.tsv")).unwrap();
    let v = extract(&tree, &flags, &lex);
    let reference = reference();
    assert_eq!(reference.len(), 45);
    let names: Vec<&str> = feature_names().collect();
    for (i, (name, want)) in reference.iter().enumerate() {
        assert_eq!(names[i], name, "registry order");
        let got = v.get(Feature::from_name(name).unwrap());
        if exact(name) {
            assert_eq!(got.to_bits(), want.to_bits(), "{name}: got {got}, want {want}");
        } else {
            assert!((got - want).abs() <= 1e-9, "{name}: got {got}, want {want}");
        }
    }
}

#[test]
fn featurize_pipeline_writes_labeled_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let manifest_path = dir.path().join("m.json");
    let m = DatasetManifest {
        name: "fx".into(),
        source_kind: SourceKind::PhemeLike,
        threads: vec![ManifestEntry {
            path: fixture("thread5.jsonl").to_string_lossy().into_owned(),
            label: Label::Inaccurate,
        }],
    };
    manifest::write_manifest(&manifest_path, &m).unwrap();
    let loaded = manifest::load_manifest(&manifest_path).unwrap();
    let flags = stance_io::read_flags(&fixture("thread5_flags.jsonl")).unwrap();
    let layered = LayeredFlags {
        flags: Some(&flags),
        model: None,
    };
    let lex = lexicon::read_lexicon(&fixture("lexicon_small.tsv")).unwrap();
    let (vectors, skipped) = featurize_manifest(
        &loaded,
        &layered,
        &lex,
        ParseMode::Strict,
        &threadcred::core::Sequential,
    )
    .unwrap();
    assert!(skipped.is_empty());
    assert_eq!(vectors[0].label, Label::Inaccurate);
    assert_eq!(vectors[0].get(Feature::RatioDisagreement), 0.5);

    let out = dir.path().join("x.csv");
    write_matrix(&out, &MatrixFile::from_features(&vectors)).unwrap();
    let back = read_matrix(&out).unwrap();
    assert_eq!(back.columns.len(), 45);
    assert_eq!(back.labels, [Label::Inaccurate]);
    assert!(back.rows[0]
        .iter()
        .zip(&vectors[0].values)
        .all(|(a, b)| a.to_bits() == b.to_bits()));

    let (no_flag_vectors, _) = featurize_manifest(
        &loaded,
        &NoFlags,
        &lex,
        ParseMode::Strict,
        &threadcred::core::Sequential,
    )
    .unwrap();
    assert_eq!(no_flag_vectors[0].get(Feature::RatioDisagreement), 0.0);
}

#[test]
fn bundled_data_loads() {
    let lex = lexicon::bundled_lexicon();
    assert!(lex.len() > 100);
    let corpus = stance_io::parse_corpus(threadcred::cli::BUNDLED_STANCE_CORPUS, Path::new("bundled")).unwrap();
    assert_eq!(corpus.len(), 400);
}
