//! Synthetic corpora and feature matrices with known ground truth.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{ClassLabel, MatrixRowOf, RawRecord};
use crate::error::LearnError;
use crate::features::{FeatureId, FeatureVectorOf};
use crate::lexicon::LexiconId;
use crate::rng;
use crate::scoring::{spr, WeightVectorOf};

/// Content words that appear in no demo lexicon and repeat no character
/// three times.
pub const DEFAULT_FILLER: [&str; 36] = [
    "city",
    "report",
    "people",
    "government",
    "police",
    "town",
    "market",
    "school",
    "water",
    "bridge",
    "road",
    "hospital",
    "station",
    "village",
    "company",
    "council",
    "family",
    "doctor",
    "river",
    "building",
    "car",
    "phone",
    "message",
    "video",
    "picture",
    "street",
    "center",
    "area",
    "worker",
    "crowd",
    "announce",
    "visit",
    "open",
    "close",
    "build",
    "move",
];

fn row_id(i: usize) -> String {
    format!("d{i:05}")
}

/// Alternates FR and TR so both classes have `n / 2` rows (FR gets the odd one).
fn label_for(i: usize) -> ClassLabel {
    if i.is_multiple_of(2) {
        ClassLabel::FR
    } else {
        ClassLabel::TR
    }
}

fn std_normal(r: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = 1.0 - r.gen::<f64>();
    let u2: f64 = r.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Uniform on `[0, 1]`, or a fair coin for the boolean features.
fn uniform_row(r: &mut ChaCha8Rng) -> Vec<f64> {
    FeatureId::ALL
        .iter()
        .map(|id| if id.is_boolean() { f64::from(u8::from(r.gen::<bool>())) } else { r.gen::<f64>() })
        .collect()
}

fn to_row(i: usize, values: &[f64], label: ClassLabel) -> MatrixRowOf<f64> {
    MatrixRowOf { id: row_id(i), features: FeatureVectorOf::from_slice(values).expect("41 values"), label: Some(label) }
}

/// Every feature is uniform noise except `informative`, whose class means
/// differ by `separation` under Gaussian noise of width `spread`.
pub fn planted_signal_matrix(
    n: usize,
    informative: FeatureId,
    separation: f64,
    spread: f64,
    seed: u64,
) -> Vec<MatrixRowOf<f64>> {
    let mut r = rng::stream(seed, "synth-planted", 0);
    (0..n)
        .map(|i| {
            let label = label_for(i);
            let mut v = uniform_row(&mut r);
            let centre = if label == ClassLabel::FR { 0.5 + separation / 2.0 } else { 0.5 - separation / 2.0 };
            v[informative.index()] = (centre + spread * std_normal(&mut r)).clamp(0.0, 1.0);
            to_row(i, &v, label)
        })
        .collect()
}

/// Linearly separable rows: `Fr` lies in `[0.6, 1]` for FR and `[0, 0.4]`
/// for TR; the other 40 columns are noise.
pub fn separable_matrix(n: usize, seed: u64) -> Vec<MatrixRowOf<f64>> {
    let mut r = rng::stream(seed, "synth-separable", 0);
    (0..n)
        .map(|i| {
            let label = label_for(i);
            let mut v = uniform_row(&mut r);
            let u = r.gen::<f64>() * 0.4;
            v[FeatureId::Fr.index()] = if label == ClassLabel::FR { 0.6 + u } else { u };
            to_row(i, &v, label)
        })
        .collect()
}

/// Same rows with labels permuted at random.
pub fn shuffle_labels(rows: &[MatrixRowOf<f64>], seed: u64) -> Vec<MatrixRowOf<f64>> {
    let mut labels: Vec<_> = rows.iter().map(|r| r.label).collect();
    labels.shuffle(&mut rng::stream(seed, "synth-shuffle", 0));
    rows.iter().zip(labels).map(|(r, label)| MatrixRowOf { label, ..r.clone() }).collect()
}

/// Rows labeled by the score model itself: FR when the true SPR exceeds the
/// sample median, then a `label_noise` fraction of labels flipped.
pub fn spr_model_matrix(
    n: usize,
    weights: &WeightVectorOf<f64>,
    label_noise: f64,
    seed: u64,
) -> Result<Vec<MatrixRowOf<f64>>, LearnError> {
    if !(0.0..=0.5).contains(&label_noise) {
        return Err(LearnError::Config(format!("label noise must be in [0, 0.5], got {label_noise}")));
    }
    let mut r = rng::stream(seed, "synth-spr", 0);
    let rows: Vec<Vec<f64>> = (0..n).map(|_| uniform_row(&mut r)).collect();
    let scores: Vec<f64> =
        rows.iter().map(|v| spr(&FeatureVectorOf::from_slice(v).expect("41 values"), weights).spr).collect();
    let mut sorted = scores.clone();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let median = sorted[n / 2];
    let mut flip = rng::stream(seed, "synth-spr-noise", 0);
    Ok(rows
        .iter()
        .zip(&scores)
        .enumerate()
        .map(|(i, (v, s))| {
            let mut label = if *s >= median { ClassLabel::FR } else { ClassLabel::TR };
            if flip.gen::<f64>() < label_noise {
                label = if label == ClassLabel::FR { ClassLabel::TR } else { ClassLabel::FR };
            }
            to_row(i, v, label)
        })
        .collect())
}

/// Per-class probability that a sentence receives a word from a list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassDensity {
    /// Used for every list not named in `lists`.
    pub default: f64,
    pub lists: BTreeMap<String, f64>,
}

impl Default for ClassDensity {
    fn default() -> Self {
        Self { default: 0.0, lists: BTreeMap::new() }
    }
}

impl ClassDensity {
    pub fn uniform(p: f64) -> Self {
        Self { default: p, lists: BTreeMap::new() }
    }

    fn resolve(&self) -> Result<BTreeMap<LexiconId, f64>, String> {
        let mut out: BTreeMap<LexiconId, f64> = LexiconId::ALL.iter().map(|&id| (id, self.default)).collect();
        for (name, p) in &self.lists {
            let id: LexiconId = name.parse().map_err(|_| format!("unknown lexicon {name:?}"))?;
            out.insert(id, *p);
        }
        if let Some((id, p)) = out.iter().find(|(_, p)| !(0.0..=1.0).contains(*p)) {
            return Err(format!("density for {id} must be in [0, 1], got {p}"));
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub n_per_class: usize,
    /// Inclusive range of sentences per document.
    pub sentences: (usize, usize),
    /// Inclusive range of filler words per sentence.
    pub filler_words: (usize, usize),
    #[serde(rename = "FR")]
    pub fr: ClassDensity,
    #[serde(rename = "TR")]
    pub tr: ClassDensity,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_per_class: 100,
            sentences: (3, 6),
            filler_words: (5, 9),
            fr: ClassDensity::uniform(0.3),
            tr: ClassDensity::uniform(0.1),
        }
    }
}

/// Ground truth of one generated document.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DocTruth {
    pub id: String,
    pub label: ClassLabel,
    pub sentences: usize,
    /// Words inserted per list, keyed by list name.
    pub planted: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthTruth {
    pub seed: u64,
    pub config: SynthConfig,
    pub documents: Vec<DocTruth>,
}

fn pick<'a>(r: &mut ChaCha8Rng, words: &[&'a str]) -> &'a str {
    words[r.gen_range(0..words.len())]
}

/// Generates a labeled text corpus. Each sentence is filler words plus, for
/// every list, one entry with the class's density for that list. Entries
/// of the negation-prefix list are glued onto a filler word.
pub fn generate_corpus(
    cfg: &SynthConfig,
    lists: &[(LexiconId, Vec<&str>)],
    filler: &[&str],
    seed: u64,
) -> Result<(Vec<RawRecord>, SynthTruth), String> {
    let (s_lo, s_hi) = cfg.sentences;
    let (w_lo, w_hi) = cfg.filler_words;
    if s_lo == 0 || s_lo > s_hi || w_lo == 0 || w_lo > w_hi {
        return Err("sentence and filler ranges must be non-empty with min >= 1".into());
    }
    if filler.len() < 2 {
        return Err("need at least two filler words".into());
    }
    let densities = [cfg.fr.resolve()?, cfg.tr.resolve()?];
    let lists: Vec<(LexiconId, Vec<&str>)> = lists.iter().filter(|(_, w)| !w.is_empty()).cloned().collect();
    let mut records = Vec::with_capacity(2 * cfg.n_per_class);
    let mut docs = Vec::with_capacity(2 * cfg.n_per_class);
    for i in 0..2 * cfg.n_per_class {
        let label = label_for(i);
        let density = &densities[label.code()];
        let mut r = rng::stream(seed, "synth-doc", i as u64);
        let n_sent = r.gen_range(s_lo..=s_hi);
        let mut planted: BTreeMap<String, usize> = BTreeMap::new();
        let mut sentences = Vec::with_capacity(n_sent);
        for _ in 0..n_sent {
            let mut words: Vec<String> = Vec::new();
            for _ in 0..r.gen_range(w_lo..=w_hi) {
                let mut w = pick(&mut r, filler);
                while words.last().is_some_and(|l| l == w) {
                    w = pick(&mut r, filler);
                }
                words.push(w.to_string());
            }
            for (id, entries) in &lists {
                if r.gen::<f64>() >= density[id] {
                    continue;
                }
                let entry = pick(&mut r, entries);
                let word = if *id == LexiconId::NegationPrefix {
                    format!("{entry}{}", pick(&mut r, filler))
                } else {
                    entry.to_string()
                };
                // neighbours stay distinct so no consecutive-word hit is planted by accident
                let free: Vec<usize> = (0..=words.len())
                    .filter(|&p| (p == 0 || words[p - 1] != word) && words.get(p) != Some(&word))
                    .collect();
                let Some(&at) = free.get(r.gen_range(0..free.len().max(1))) else { continue };
                words.insert(at, word);
                *planted.entry(id.file_stem().to_string()).or_default() += 1;
            }
            sentences.push(format!("{}.", words.join(" ")));
        }
        let id = row_id(i);
        records.push(RawRecord {
            id: id.clone(),
            text: sentences.join(" "),
            label: Some(label),
            source: Some("synth".into()),
        });
        docs.push(DocTruth { id, label, sentences: n_sent, planted });
    }
    Ok((records, SynthTruth { seed, config: cfg.clone(), documents: docs }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extract::demo_lexicon_entries;

    #[test]
    fn planted_matrix_shape() {
        let rows = planted_signal_matrix(200, FeatureId::Fr, 0.3, 0.2, 1);
        assert_eq!(rows.len(), 200);
        let fr = rows.iter().filter(|r| r.label == Some(ClassLabel::FR)).count();
        assert_eq!(fr, 100);
        assert!(rows.iter().all(|r| r.features.is_valid()));
        let mean = |c| {
            let v: Vec<f64> = rows.iter().filter(|r| r.label == Some(c)).map(|r| r.features[FeatureId::Fr]).collect();
            v.iter().sum::<f64>() / v.len() as f64
        };
        assert!(mean(ClassLabel::FR) > mean(ClassLabel::TR) + 0.2);
    }

    #[test]
    fn separable_has_margin() {
        for r in separable_matrix(100, 2) {
            let v = r.features[FeatureId::Fr];
            assert!(if r.label == Some(ClassLabel::FR) { v >= 0.6 } else { v <= 0.4 });
        }
    }

    #[test]
    fn spr_model_labels_follow_score() {
        let w = WeightVectorOf::uniform();
        let clean = spr_model_matrix(400, &w, 0.0, 3).unwrap();
        let mean_spr = |c| {
            let v: Vec<f64> = clean.iter().filter(|r| r.label == Some(c)).map(|r| spr(&r.features, &w).spr).collect();
            v.iter().sum::<f64>() / v.len() as f64
        };
        assert!(mean_spr(ClassLabel::FR) > mean_spr(ClassLabel::TR));
        let noisy = spr_model_matrix(400, &w, 0.1, 3).unwrap();
        let flipped = clean.iter().zip(&noisy).filter(|(a, b)| a.label != b.label).count();
        assert!((20..=60).contains(&flipped), "{flipped}");
        assert!(spr_model_matrix(10, &w, 0.9, 1).is_err());
    }

    #[test]
    fn corpus_is_seeded_and_counts_plants() {
        let lists = demo_lexicon_entries();
        let cfg = SynthConfig { n_per_class: 20, ..Default::default() };
        let (a, ta) = generate_corpus(&cfg, &lists, &DEFAULT_FILLER, 5).unwrap();
        let (b, _) = generate_corpus(&cfg, &lists, &DEFAULT_FILLER, 5).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 40);
        let total = |l| ta.documents.iter().filter(|d| d.label == l).flat_map(|d| d.planted.values()).sum::<usize>();
        assert!(total(ClassLabel::FR) > total(ClassLabel::TR));
    }

    #[test]
    fn zero_density_plants_nothing() {
        let cfg = SynthConfig {
            n_per_class: 5,
            fr: ClassDensity::uniform(0.0),
            tr: ClassDensity::uniform(0.0),
            ..Default::default()
        };
        let (_, truth) = generate_corpus(&cfg, &demo_lexicon_entries(), &DEFAULT_FILLER, 1).unwrap();
        assert!(truth.documents.iter().all(|d| d.planted.is_empty()));
    }

    #[test]
    fn bad_density_rejected() {
        let mut cfg = SynthConfig::default();
        cfg.fr.lists.insert("nope".into(), 0.5);
        assert!(generate_corpus(&cfg, &demo_lexicon_entries(), &DEFAULT_FILLER, 1).is_err());
        let mut cfg = SynthConfig::default();
        cfg.tr.default = 1.5;
        assert!(generate_corpus(&cfg, &demo_lexicon_entries(), &DEFAULT_FILLER, 1).is_err());
    }
}
