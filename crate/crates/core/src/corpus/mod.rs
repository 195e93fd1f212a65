//! Line-delimited label records: reading, writing, merging, and the
//! distribution statistics over a labelled corpus.

mod stats;

pub use stats::{compute_stats, length_label_correlation, CorpusStats};

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::MetricsError;
use crate::taxonomy::Label;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: duplicate sample id {id:?}")]
    DuplicateId { id: String, line: usize },
    #[error("line {line}: ground-truth sample {id:?} has no labels")]
    EmptyGroundTruth { id: String, line: usize },
    #[error("sample ids differ: only in first {only_left:?}, only in second {only_right:?}")]
    IdMismatch { only_left: Vec<String>, only_right: Vec<String> },
    #[error("no description text for sample {0:?}")]
    MissingText(String),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

/// One sample's unordered label set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelRecord {
    #[serde(rename = "id")]
    pub sample_id: String,
    pub labels: BTreeSet<Label>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
}

impl LabelRecord {
    pub fn new<I: IntoIterator<Item = Label>>(sample_id: impl Into<String>, labels: I) -> Self {
        LabelRecord { sample_id: sample_id.into(), labels: labels.into_iter().collect(), source: None, text: None }
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.source = Some(source.into());
        self
    }
}

/// Whether empty label sets are legal in the file being read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordKind {
    /// Every record needs at least one label.
    GroundTruth,
    /// Empty label sets allowed (a model may predict nothing).
    Prediction,
}

#[derive(Deserialize)]
struct RawRecord {
    id: String,
    labels: Vec<String>,
    #[serde(default)]
    source: Option<String>,
    #[serde(default)]
    text: Option<String>,
}

/// Reads one JSON object per line. Blank lines are skipped; input order is kept.
pub fn read_records<R: BufRead>(reader: R, kind: RecordKind) -> Result<Vec<LabelRecord>, CorpusError> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| CorpusError::Malformed { line: line_no, message: e.to_string() })?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawRecord = serde_json::from_str(&line)
            .map_err(|e| CorpusError::Malformed { line: line_no, message: e.to_string() })?;
        if raw.id.trim().is_empty() {
            return Err(CorpusError::Malformed { line: line_no, message: "empty sample id".into() });
        }
        let labels = raw
            .labels
            .iter()
            .map(|s| {
                Label::new(s).map_err(|_| CorpusError::Malformed {
                    line: line_no,
                    message: format!("blank label in sample {:?}", raw.id),
                })
            })
            .collect::<Result<BTreeSet<_>, _>>()?;
        if kind == RecordKind::GroundTruth && labels.is_empty() {
            return Err(CorpusError::EmptyGroundTruth { id: raw.id, line: line_no });
        }
        if !seen.insert(raw.id.clone()) {
            return Err(CorpusError::DuplicateId { id: raw.id, line: line_no });
        }
        out.push(LabelRecord { sample_id: raw.id, labels, source: raw.source, text: raw.text });
    }
    Ok(out)
}

pub fn read_records_str(text: &str, kind: RecordKind) -> Result<Vec<LabelRecord>, CorpusError> {
    read_records(text.as_bytes(), kind)
}

pub fn read_records_path(path: &Path, kind: RecordKind) -> Result<Vec<LabelRecord>, CorpusError> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    read_records(BufReader::new(file), kind)
}

pub fn write_records<W: Write>(mut writer: W, records: &[LabelRecord]) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut writer, r)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

pub fn records_to_string(records: &[LabelRecord]) -> String {
    let mut buf = Vec::new();
    write_records(&mut buf, records).expect("writing to memory");
    String::from_utf8(buf).expect("json is utf-8")
}

/// A free-text description attached to a sample.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TextRecord {
    pub id: String,
    pub text: String,
}

/// Reads `{"id":..., "text":...}` lines; other fields are ignored, so a
/// record file carrying `text` can be read directly.
pub fn read_texts<R: BufRead>(reader: R) -> Result<Vec<TextRecord>, CorpusError> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| CorpusError::Malformed { line: line_no, message: e.to_string() })?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: TextRecord = serde_json::from_str(&line)
            .map_err(|e| CorpusError::Malformed { line: line_no, message: e.to_string() })?;
        if !seen.insert(rec.id.clone()) {
            return Err(CorpusError::DuplicateId { id: rec.id, line: line_no });
        }
        out.push(rec);
    }
    Ok(out)
}

pub fn read_texts_path(path: &Path) -> Result<Vec<TextRecord>, CorpusError> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    read_texts(BufReader::new(file))
}

pub(crate) fn io_err(path: &Path, source: std::io::Error) -> CorpusError {
    CorpusError::Io { path: path.display().to_string(), source }
}

/// Checks that two id collections are the same set.
pub fn check_same_ids<'a, A, B>(left: A, right: B) -> Result<(), CorpusError>
where
    A: IntoIterator<Item = &'a str>,
    B: IntoIterator<Item = &'a str>,
{
    let l: BTreeSet<&str> = left.into_iter().collect();
    let r: BTreeSet<&str> = right.into_iter().collect();
    if l == r {
        return Ok(());
    }
    Err(CorpusError::IdMismatch {
        only_left: l.difference(&r).map(|s| s.to_string()).collect(),
        only_right: r.difference(&l).map(|s| s.to_string()).collect(),
    })
}

/// Per-sample union of two label streams over the same samples (e.g. labels
/// extracted from the English and the Chinese description). Output follows
/// the order of `a` and is tagged `merged`.
pub fn merge_label_sets(a: &[LabelRecord], b: &[LabelRecord]) -> Result<Vec<LabelRecord>, CorpusError> {
    check_same_ids(a.iter().map(|r| r.sample_id.as_str()), b.iter().map(|r| r.sample_id.as_str()))?;
    let by_id: BTreeMap<&str, &LabelRecord> = b.iter().map(|r| (r.sample_id.as_str(), r)).collect();
    Ok(a.iter()
        .map(|ra| {
            let rb = by_id[ra.sample_id.as_str()];
            LabelRecord {
                sample_id: ra.sample_id.clone(),
                labels: ra.labels.union(&rb.labels).cloned().collect(),
                source: Some("merged".into()),
                text: ra.text.clone().or_else(|| rb.text.clone()),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(s: &str) -> Label {
        Label::new(s).unwrap()
    }

    #[test]
    fn normalizes_and_dedupes() {
        let recs = read_records_str(r#"{"id":"s1","labels":["Happy ","happy"]}"#, RecordKind::GroundTruth).unwrap();
        assert_eq!(recs[0].labels, [l("happy")].into_iter().collect());
    }

    #[test]
    fn duplicate_id_named() {
        let src = "{\"id\":\"s1\",\"labels\":[\"a\"]}\n{\"id\":\"s1\",\"labels\":[\"b\"]}\n";
        let err = read_records_str(src, RecordKind::Prediction).unwrap_err();
        assert!(matches!(err, CorpusError::DuplicateId { ref id, line: 2 } if id == "s1"));
        assert!(err.to_string().contains("s1"));
    }

    #[test]
    fn empty_gt_rejected_but_empty_pred_allowed() {
        let src = r#"{"id":"s1","labels":[]}"#;
        assert!(matches!(
            read_records_str(src, RecordKind::GroundTruth),
            Err(CorpusError::EmptyGroundTruth { .. })
        ));
        assert!(read_records_str(src, RecordKind::Prediction).unwrap()[0].labels.is_empty());
    }

    #[test]
    fn malformed_line_carries_number() {
        let src = "{\"id\":\"s1\",\"labels\":[\"a\"]}\n\nnot json\n";
        assert!(matches!(
            read_records_str(src, RecordKind::Prediction),
            Err(CorpusError::Malformed { line: 3, .. })
        ));
        assert!(matches!(
            read_records_str(r#"{"id":"s1","labels":["  "]}"#, RecordKind::Prediction),
            Err(CorpusError::Malformed { line: 1, .. })
        ));
        assert!(read_records_str(r#"{"id":"","labels":["a"]}"#, RecordKind::Prediction).is_err());
    }

    #[test]
    fn write_read_write_is_stable() {
        let src = "{\"id\":\"b\",\"labels\":[\"Sad\",\"angry\"],\"source\":\"gt\"}\n{\"id\":\"a\",\"labels\":[\"happy\"],\"text\":\"He smiles.\"}\n";
        let recs = read_records_str(src, RecordKind::GroundTruth).unwrap();
        let first = records_to_string(&recs);
        assert_eq!(
            first,
            "{\"id\":\"b\",\"labels\":[\"angry\",\"sad\"],\"source\":\"gt\"}\n{\"id\":\"a\",\"labels\":[\"happy\"],\"text\":\"He smiles.\"}\n"
        );
        let again = read_records_str(&first, RecordKind::GroundTruth).unwrap();
        assert_eq!(again, recs);
        assert_eq!(records_to_string(&again), first);
    }

    #[test]
    fn merge_union_and_idempotence() {
        let a = vec![LabelRecord::new("s1", [l("happy")])];
        let b = vec![LabelRecord::new("s1", [l("happy"), l("nervous")])];
        let m = merge_label_sets(&a, &b).unwrap();
        assert_eq!(m[0].labels, [l("happy"), l("nervous")].into_iter().collect());
        assert_eq!(m[0].source.as_deref(), Some("merged"));
        let same = merge_label_sets(&b, &b).unwrap();
        assert_eq!(same[0].labels, b[0].labels);
    }

    #[test]
    fn merge_id_mismatch() {
        let a = vec![LabelRecord::new("s1", [l("happy")])];
        let b = vec![LabelRecord::new("s2", [l("happy")])];
        let err = merge_label_sets(&a, &b).unwrap_err();
        assert!(matches!(err, CorpusError::IdMismatch { ref only_left, ref only_right }
            if only_left == &["s1"] && only_right == &["s2"]));
    }

    #[test]
    fn texts_reader() {
        let t = read_texts("{\"id\":\"s1\",\"text\":\"a b\",\"labels\":[]}\n".as_bytes()).unwrap();
        assert_eq!(t[0].text, "a b");
    }
}
