//! Labeled corpora, feature matrices and weight files.
//!
//! Every numeric value written by this module goes through [`format_value`],
//! which rounds to 12 significant digits and prints plain decimal text.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::CorpusError;
use crate::features::{FeatureId, FeatureVectorOf, FEATURE_COUNT};
use crate::scalar::Scalar;
use crate::scoring::WeightVectorOf;

/// Document class. The integer codes are stable: FR = 0, TR = 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ClassLabel {
    FR,
    TR,
}

impl ClassLabel {
    pub const BOTH: [ClassLabel; 2] = [ClassLabel::FR, ClassLabel::TR];

    pub const fn code(self) -> usize {
        match self {
            ClassLabel::FR => 0,
            ClassLabel::TR => 1,
        }
    }

    pub fn from_code(code: usize) -> Option<Self> {
        match code {
            0 => Some(ClassLabel::FR),
            1 => Some(ClassLabel::TR),
            _ => None,
        }
    }

    pub const fn as_str(self) -> &'static str {
        match self {
            ClassLabel::FR => "FR",
            ClassLabel::TR => "TR",
        }
    }

    pub const fn other(self) -> Self {
        match self {
            ClassLabel::FR => ClassLabel::TR,
            ClassLabel::TR => ClassLabel::FR,
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClassLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "FR" => Ok(ClassLabel::FR),
            "TR" => Ok(ClassLabel::TR),
            other => Err(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawRecord {
    pub id: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<ClassLabel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    Jsonl,
    Csv,
}

impl CorpusFormat {
    /// Picks the format from a file extension; anything but `.csv` is JSONL.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => CorpusFormat::Csv,
            _ => CorpusFormat::Jsonl,
        }
    }
}

impl FromStr for CorpusFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "jsonl" => Ok(CorpusFormat::Jsonl),
            "csv" => Ok(CorpusFormat::Csv),
            other => Err(format!("unknown corpus format {other:?}")),
        }
    }
}

/// Ordered, validated collection of records.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    records: Vec<RawRecord>,
    label_counts: BTreeMap<ClassLabel, usize>,
}

impl Corpus {
    /// Validates records in order. Line numbers in errors are 1-based positions.
    pub fn from_records(records: Vec<RawRecord>) -> Result<Self, CorpusError> {
        let lines: Vec<usize> = (1..=records.len()).collect();
        Self::validated(records, &lines, false)
    }

    /// Like [`Corpus::from_records`] but admits blank texts, leaving them to
    /// be rejected per document during extraction.
    pub fn from_records_keep_blank(records: Vec<RawRecord>) -> Result<Self, CorpusError> {
        let lines: Vec<usize> = (1..=records.len()).collect();
        Self::validated(records, &lines, true)
    }

    fn validated(records: Vec<RawRecord>, lines: &[usize], keep_blank: bool) -> Result<Self, CorpusError> {
        if records.is_empty() {
            return Err(CorpusError::EmptyCorpus);
        }
        let mut seen = HashSet::new();
        let mut label_counts = BTreeMap::new();
        for (rec, &line) in records.iter().zip(lines) {
            if rec.id.trim().is_empty() {
                return Err(CorpusError::EmptyField { line, field: "id" });
            }
            if !keep_blank && rec.text.trim().is_empty() {
                return Err(CorpusError::EmptyField { line, field: "text" });
            }
            if !seen.insert(rec.id.as_str()) {
                return Err(CorpusError::DuplicateId { line, id: rec.id.clone() });
            }
            if let Some(label) = rec.label {
                *label_counts.entry(label).or_insert(0) += 1;
            }
        }
        Ok(Self { records, label_counts })
    }

    pub fn records(&self) -> &[RawRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn label_count(&self, label: ClassLabel) -> usize {
        self.label_counts.get(&label).copied().unwrap_or(0)
    }

    pub fn label_counts(&self) -> &BTreeMap<ClassLabel, usize> {
        &self.label_counts
    }

    pub fn into_records(self) -> Vec<RawRecord> {
        self.records
    }
}

/// Wire shape of a corpus line; the label is kept as a string so that an
/// unknown value can be reported with its line number.
#[derive(Deserialize)]
struct WireRecord {
    id: String,
    text: String,
    #[serde(default)]
    label: Option<String>,
    #[serde(default)]
    source: Option<String>,
}

fn parse_label(label: Option<String>, line: usize) -> Result<Option<ClassLabel>, CorpusError> {
    match label.as_deref().map(str::trim) {
        None | Some("") => Ok(None),
        Some(s) => s.parse().map(Some).map_err(|label| CorpusError::UnknownLabel { line, label }),
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CorpusError + '_ {
    move |source| CorpusError::Io { path: path.to_path_buf(), source }
}

pub fn load_corpus(path: &Path, format: CorpusFormat) -> Result<Corpus, CorpusError> {
    load(path, format, false)
}

/// Loads a corpus whose blank texts are kept rather than rejected.
pub fn load_corpus_keep_blank(path: &Path, format: CorpusFormat) -> Result<Corpus, CorpusError> {
    load(path, format, true)
}

fn load(path: &Path, format: CorpusFormat, keep_blank: bool) -> Result<Corpus, CorpusError> {
    let file = fs::File::open(path).map_err(io_err(path))?;
    let mut records = Vec::new();
    let mut lines = Vec::new();
    match format {
        CorpusFormat::Jsonl => {
            for (i, line) in BufReader::new(file).lines().enumerate() {
                let line_no = i + 1;
                let line = line.map_err(io_err(path))?;
                if line.trim().is_empty() {
                    continue;
                }
                let wire: WireRecord = serde_json::from_str(&line)
                    .map_err(|e| CorpusError::Parse { line: line_no, message: e.to_string() })?;
                records.push(RawRecord {
                    label: parse_label(wire.label, line_no)?,
                    id: wire.id,
                    text: wire.text,
                    source: wire.source,
                });
                lines.push(line_no);
            }
        }
        CorpusFormat::Csv => {
            let mut reader = csv::Reader::from_reader(file);
            for (i, row) in reader.deserialize::<WireRecord>().enumerate() {
                // header is line 1
                let fallback = i + 2;
                let wire = row.map_err(|e| CorpusError::Parse {
                    line: e.position().map(|p| p.line() as usize).unwrap_or(fallback),
                    message: e.to_string(),
                })?;
                records.push(RawRecord {
                    label: parse_label(wire.label, fallback)?,
                    id: wire.id,
                    text: wire.text,
                    source: wire.source.filter(|s| !s.is_empty()),
                });
                lines.push(fallback);
            }
        }
    }
    Corpus::validated(records, &lines, keep_blank)
}

/// Serializes a corpus as JSONL, one record per line.
pub fn corpus_to_jsonl(records: &[RawRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("record serializes"));
        out.push('\n');
    }
    out
}

/// Rounds to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Decimal text with at most 12 significant digits and no exponent.
pub fn format_value(x: f64) -> String {
    let r = round_sig(x);
    if r == 0.0 {
        // normalizes -0
        "0".to_string()
    } else {
        format!("{r}")
    }
}

/// Writes `bytes` to a sibling temporary file and renames it over `path`,
/// so readers never observe a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CorpusError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp: PathBuf = dir.join(format!(".{name}.tmp-{}", std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map_err(io_err(path))
}

/// One row of a feature matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixRowOf<T> {
    pub id: String,
    pub features: FeatureVectorOf<T>,
    pub label: Option<ClassLabel>,
}

pub fn matrix_header() -> String {
    let mut header = String::from("id,label");
    for f in FeatureId::ALL {
        header.push(',');
        header.push_str(f.abbr());
    }
    header
}

/// Renders rows as CSV: `id,label,<41 feature abbreviations>`.
pub fn matrix_to_csv<T: Scalar>(rows: &[MatrixRowOf<T>]) -> String {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(matrix_header().split(',')).expect("in-memory write");
    for row in rows {
        let mut rec = Vec::with_capacity(FEATURE_COUNT + 2);
        rec.push(row.id.clone());
        rec.push(row.label.map(|l| l.as_str().to_string()).unwrap_or_default());
        rec.extend(row.features.as_slice().iter().map(|v| format_value(v.as_f64())));
        w.write_record(&rec).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8 csv")
}

pub fn save_matrix<T: Scalar>(rows: &[MatrixRowOf<T>], path: &Path) -> Result<(), CorpusError> {
    write_atomic(path, matrix_to_csv(rows).as_bytes())
}

pub fn parse_matrix<T: Scalar>(text: &str) -> Result<Vec<MatrixRowOf<T>>, CorpusError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| CorpusError::Parse { line: 1, message: e.to_string() })?.clone();
    let expected = matrix_header();
    let found: Vec<&str> = header.iter().collect();
    if found.join(",") != expected {
        return Err(CorpusError::Parse { line: 1, message: format!("matrix header must be `{expected}`") });
    }
    let mut rows = Vec::new();
    let mut seen = HashSet::new();
    for (i, rec) in reader.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| CorpusError::Parse { line, message: e.to_string() })?;
        if rec.len() != FEATURE_COUNT + 2 {
            return Err(CorpusError::Dimension {
                row: line,
                expected: FEATURE_COUNT,
                found: rec.len().saturating_sub(2),
            });
        }
        let id = rec[0].to_string();
        if id.is_empty() {
            return Err(CorpusError::EmptyField { line, field: "id" });
        }
        if !seen.insert(id.clone()) {
            return Err(CorpusError::DuplicateId { line, id });
        }
        let label = parse_label(Some(rec[1].to_string()), line)?;
        let mut values = Vec::with_capacity(FEATURE_COUNT);
        for (j, field) in rec.iter().skip(2).enumerate() {
            let v: f64 = field.trim().parse().map_err(|_| CorpusError::Parse {
                line,
                message: format!("column {}: not a number: {field:?}", FeatureId::ALL[j]),
            })?;
            values.push(T::of(v));
        }
        let features = FeatureVectorOf::from_slice(&values).expect("length checked above");
        rows.push(MatrixRowOf { id, features, label });
    }
    Ok(rows)
}

pub fn load_matrix<T: Scalar>(path: &Path) -> Result<Vec<MatrixRowOf<T>>, CorpusError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    parse_matrix(&text)
}

/// Weight file body: a JSON object from feature abbreviation to weight,
/// keys in canonical order.
pub fn weights_to_json<T: Scalar>(weights: &WeightVectorOf<T>) -> String {
    let mut map = serde_json::Map::new();
    for (id, w) in weights.iter() {
        let v = serde_json::Number::from_f64(round_sig(w.as_f64())).expect("finite weight");
        map.insert(id.abbr().to_string(), serde_json::Value::Number(v));
    }
    let mut s = serde_json::to_string_pretty(&serde_json::Value::Object(map)).expect("serializes");
    s.push('\n');
    s
}

pub fn parse_weights<T: Scalar>(text: &str) -> Result<WeightVectorOf<T>, CorpusError> {
    let map: BTreeMap<String, f64> = serde_json::from_str(text).map_err(|e| CorpusError::Weights(e.to_string()))?;
    let mut values = Vec::with_capacity(FEATURE_COUNT);
    for id in FeatureId::ALL {
        let w = *map.get(id.abbr()).ok_or_else(|| CorpusError::Weights(format!("missing key {}", id.abbr())))?;
        if !(0.0..=1.0).contains(&w) {
            return Err(CorpusError::Weights(format!("weight for {} out of [0,1]: {w}", id.abbr())));
        }
        values.push(T::of(w));
    }
    if let Some(extra) = map.keys().find(|k| k.parse::<FeatureId>().is_err()) {
        return Err(CorpusError::Weights(format!("unknown key {extra}")));
    }
    Ok(WeightVectorOf::from_slice(&values).expect("validated above"))
}

pub fn save_weights<T: Scalar>(weights: &WeightVectorOf<T>, path: &Path) -> Result<(), CorpusError> {
    write_atomic(path, weights_to_json(weights).as_bytes())
}

pub fn load_weights<T: Scalar>(path: &Path) -> Result<WeightVectorOf<T>, CorpusError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    parse_weights(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn write(dir: &tempfile::TempDir, name: &str, body: &str) -> PathBuf {
        let p = dir.path().join(name);
        fs::write(&p, body).unwrap();
        p
    }

    #[test]
    fn loads_labeled_jsonl() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            &dir,
            "c.jsonl",
            "{\"id\":\"a\",\"text\":\"x\",\"label\":\"FR\"}\n{\"id\":\"b\",\"text\":\"y\",\"label\":\"TR\",\"source\":\"tg\"}\n",
        );
        let c = load_corpus(&p, CorpusFormat::Jsonl).unwrap();
        assert_eq!(c.label_count(ClassLabel::FR), 1);
        assert_eq!(c.label_count(ClassLabel::TR), 1);
        assert_eq!(c.records()[1].source.as_deref(), Some("tg"));
        assert_eq!(c.records()[0].id, "a");
    }

    #[test]
    fn unknown_label_names_line() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            &dir,
            "c.jsonl",
            "{\"id\":\"a\",\"text\":\"x\",\"label\":\"FR\"}\n{\"id\":\"b\",\"text\":\"y\",\"label\":\"MAYBE\"}\n",
        );
        match load_corpus(&p, CorpusFormat::Jsonl) {
            Err(CorpusError::UnknownLabel { line, label }) => {
                assert_eq!(line, 2);
                assert_eq!(label, "MAYBE");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_ids_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "c.jsonl", "{\"id\":\"a1\",\"text\":\"x\"}\n{\"id\":\"a1\",\"text\":\"y\"}\n");
        assert!(matches!(load_corpus(&p, CorpusFormat::Jsonl), Err(CorpusError::DuplicateId { line: 2, .. })));
    }

    #[test]
    fn malformed_and_empty_inputs() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "c.jsonl", "{\"id\":\"a\",\"text\":\"x\"}\n{not json\n");
        assert!(matches!(load_corpus(&p, CorpusFormat::Jsonl), Err(CorpusError::Parse { line: 2, .. })));
        let p = write(&dir, "e.jsonl", "\n");
        assert!(matches!(load_corpus(&p, CorpusFormat::Jsonl), Err(CorpusError::EmptyCorpus)));
        let p = write(&dir, "t.jsonl", "{\"id\":\"a\",\"text\":\"  \"}\n");
        assert!(matches!(load_corpus(&p, CorpusFormat::Jsonl), Err(CorpusError::EmptyField { field: "text", .. })));
    }

    #[test]
    fn loads_csv_corpus() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "c.csv", "id,text,label,source\na,\"hello, world\",FR,\nb,bye,,web\n");
        let c = load_corpus(&p, CorpusFormat::Csv).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.records()[0].text, "hello, world");
        assert_eq!(c.records()[1].label, None);
        assert_eq!(c.label_count(ClassLabel::FR), 1);
    }

    #[test]
    fn jsonl_round_trip() {
        let records = vec![
            RawRecord { id: "1".into(), text: "a \"b\"".into(), label: Some(ClassLabel::TR), source: None },
            RawRecord { id: "2".into(), text: "c\nd".into(), label: None, source: Some("s".into()) },
        ];
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "c.jsonl", &corpus_to_jsonl(&records));
        assert_eq!(load_corpus(&p, CorpusFormat::Jsonl).unwrap().into_records(), records);
    }

    #[test]
    fn empty_matrix_is_header_only() {
        let csv = matrix_to_csv::<f64>(&[]);
        assert_eq!(csv, format!("{}\n", matrix_header()));
        assert!(parse_matrix::<f64>(&csv).unwrap().is_empty());
    }

    #[test]
    fn zero_row_writes_zeros() {
        let rows = vec![MatrixRowOf { id: "d".into(), features: FeatureVectorOf::<f64>::zeros(), label: None }];
        let csv = matrix_to_csv(&rows);
        let line = csv.lines().nth(1).unwrap();
        assert_eq!(line, format!("d,{}", ",0".repeat(41)));
    }

    #[test]
    fn three_row_matrix_round_trips() {
        let rows: Vec<MatrixRowOf<f64>> = (0..3)
            .map(|i| {
                let vals: Vec<f64> = (0..41).map(|j| ((i * 41 + j) as f64 / 7.0).fract()).collect();
                MatrixRowOf {
                    id: format!("r{i}"),
                    features: FeatureVectorOf::from_slice(&vals).unwrap(),
                    label: ClassLabel::from_code(i % 2),
                }
            })
            .collect();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.csv");
        save_matrix(&rows, &p).unwrap();
        let back: Vec<MatrixRowOf<f64>> = load_matrix(&p).unwrap();
        for (a, b) in rows.iter().zip(&back) {
            assert_eq!(a.id, b.id);
            assert_eq!(a.label, b.label);
            for (x, y) in a.features.as_slice().iter().zip(b.features.as_slice()) {
                assert_eq!(round_sig(*x), *y);
                assert!((x - y).abs() <= 1e-12);
            }
        }
        // second pass is exact
        let p2 = dir.path().join("m2.csv");
        save_matrix(&back, &p2).unwrap();
        assert_eq!(fs::read(&p).unwrap(), fs::read(&p2).unwrap());
    }

    #[test]
    fn matrix_rejects_bad_header_and_width() {
        assert!(parse_matrix::<f64>("id,label,Fr\n").is_err());
        let mut csv = matrix_to_csv::<f64>(&[]);
        csv.push_str("a,FR,1,2\n");
        assert!(matches!(parse_matrix::<f64>(&csv), Err(CorpusError::Dimension { .. })));
    }

    #[test]
    fn formats_twelve_significant_digits() {
        assert_eq!(format_value(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_value(0.75), "0.75");
        assert_eq!(format_value(-0.0), "0");
        assert_eq!(format_value(2.0 / 3.0), "0.666666666667");
        assert_eq!(format_value(1e-7), "0.0000001");
    }

    #[test]
    fn weights_require_every_key() {
        let w = WeightVectorOf::<f64>::uniform();
        let json = weights_to_json(&w);
        assert_eq!(parse_weights::<f64>(&json).unwrap(), w);
        let truncated = json.replacen("\"ETag\": 1.0,", "", 1);
        assert!(parse_weights::<f64>(&truncated).is_err());
        let out_of_range = json.replacen("\"ETag\": 1.0", "\"ETag\": 1.5", 1);
        assert!(parse_weights::<f64>(&out_of_range).is_err());
    }

    proptest! {
        #[test]
        fn matrix_text_is_a_fixed_point(values in proptest::collection::vec(0.0f64..=1.0, 41)) {
            let rows = vec![MatrixRowOf {
                id: "x".to_string(),
                features: FeatureVectorOf::from_slice(&values).unwrap(),
                label: Some(ClassLabel::FR),
            }];
            let text = matrix_to_csv(&rows);
            let back = parse_matrix::<f64>(&text).unwrap();
            prop_assert_eq!(matrix_to_csv(&back), text);
            for (x, y) in values.iter().zip(back[0].features.as_slice()) {
                prop_assert!((x - y).abs() <= 1e-12);
            }
        }
    }
}
