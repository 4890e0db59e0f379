use std::path::{Path, PathBuf};

use spr_core::corpus::{load_corpus_keep_blank, parse_matrix, CorpusFormat};
use spr_core::extract::{extract_matrix, ResourcePaths, Resources};
use spr_core::features::FeatureId;

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/golden")
}

fn golden_resources() -> Resources {
    let dir = golden_dir();
    let run: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.join("run.json")).unwrap()).unwrap();
    let paths: ResourcePaths = serde_json::from_value(run["resources"].clone()).unwrap();
    Resources::load(&paths.relative_to(&dir)).unwrap()
}

#[test]
fn mini_corpus_matches_hand_computed_features() {
    let dir = golden_dir();
    let res = golden_resources();
    let corpus = load_corpus_keep_blank(&dir.join("corpus.jsonl"), CorpusFormat::Jsonl).unwrap();
    let (rows, rejects) = extract_matrix::<f64>(&corpus, &res).unwrap();
    assert!(rejects.is_empty());
    let expected = parse_matrix::<f64>(&std::fs::read_to_string(dir.join("expected.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 6);
    for (got, want) in rows.iter().zip(&expected) {
        assert_eq!(got.id, want.id);
        assert_eq!(got.label, want.label);
        for id in FeatureId::ALL {
            let (g, w) = (got.features[id], want.features[id]);
            assert!((g - w).abs() <= 1e-12, "{} {}: got {g}, expected {w}", got.id, id.abbr());
        }
    }
}

#[test]
fn exact_fractions_for_selected_cells() {
    let res = golden_resources();
    let f = res
        .extract_text::<f64>(
            "g4",
            "If the report is unconfirmed, wait. The 3rd estimate was 20 percent. Surely the greatest risk is over.",
        )
        .unwrap();
    assert_eq!(f[FeatureId::ETag], 5.0 / 8.0);
    assert_eq!(f[FeatureId::LD], 15.0 / 18.0);
    assert_eq!(f[FeatureId::AdjOrd], 1.0 / 3.0);
    let f = res.extract_text::<f64>("g2", "The council said the road is safe. Maybe it will open tomorrow?").unwrap();
    assert_eq!(f[FeatureId::LD], 11.0 / 12.0);
}
