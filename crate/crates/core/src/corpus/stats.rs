use std::collections::BTreeMap;

use serde::Serialize;

use super::{CorpusError, LabelRecord, TextRecord};
use crate::metrics::{pearson, tokenize};
use crate::taxonomy::Label;

/// Histograms behind the label-number, emotion-frequency and
/// description-length distributions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorpusStats {
    pub records: usize,
    /// labels per sample -> number of samples
    pub label_count_histogram: BTreeMap<usize, usize>,
    pub emotion_frequency: BTreeMap<Label, usize>,
    /// whitespace tokens inside label strings -> occurrences
    pub token_frequency: BTreeMap<String, usize>,
    pub texts: usize,
    pub length_bucket_width: usize,
    /// bucket lower bound (tokens) -> number of descriptions
    pub text_length_histogram: BTreeMap<usize, usize>,
}

pub fn compute_stats(records: &[LabelRecord], texts: &[TextRecord], bucket_width: usize) -> CorpusStats {
    let width = bucket_width.max(1);
    let mut label_count_histogram = BTreeMap::new();
    let mut emotion_frequency = BTreeMap::new();
    let mut token_frequency = BTreeMap::new();
    for r in records {
        *label_count_histogram.entry(r.labels.len()).or_insert(0) += 1;
        for label in &r.labels {
            *emotion_frequency.entry(label.clone()).or_insert(0) += 1;
            for tok in label.as_str().split(' ') {
                *token_frequency.entry(tok.to_string()).or_insert(0) += 1;
            }
        }
    }
    let mut text_length_histogram = BTreeMap::new();
    for t in texts {
        let len = tokenize(&t.text).len();
        *text_length_histogram.entry(len / width * width).or_insert(0) += 1;
    }
    CorpusStats {
        records: records.len(),
        label_count_histogram,
        emotion_frequency,
        token_frequency,
        texts: texts.len(),
        length_bucket_width: width,
        text_length_histogram,
    }
}

impl CorpusStats {
    /// Emotion frequencies, most frequent first, ties alphabetical.
    pub fn ranked_emotions(&self) -> Vec<(&Label, usize)> {
        let mut v: Vec<_> = self.emotion_frequency.iter().map(|(l, c)| (l, *c)).collect();
        v.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        v
    }

    /// Delimited tables `(name, csv)` ready for plotting tools.
    pub fn tables(&self) -> Vec<(&'static str, String)> {
        fn table<I, K, V>(header: [&str; 2], rows: I) -> String
        where
            I: IntoIterator<Item = (K, V)>,
            K: ToString,
            V: ToString,
        {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(header).expect("in-memory csv");
            for (k, v) in rows {
                w.write_record([k.to_string(), v.to_string()]).expect("in-memory csv");
            }
            String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
        }
        vec![
            ("label_count", table(["labels", "samples"], self.label_count_histogram.iter())),
            ("emotion_frequency", table(["label", "count"], self.ranked_emotions())),
            ("token_frequency", table(["token", "count"], self.token_frequency.iter())),
            ("text_length", table(["length_bucket", "descriptions"], self.text_length_histogram.iter())),
        ]
    }
}

/// Pearson correlation between description length (tokens) and the number
/// of labels, over samples matched by id.
pub fn length_label_correlation(records: &[LabelRecord], texts: &[TextRecord]) -> Result<f64, CorpusError> {
    let by_id: BTreeMap<&str, &str> = texts.iter().map(|t| (t.id.as_str(), t.text.as_str())).collect();
    let mut lengths = Vec::with_capacity(records.len());
    let mut counts = Vec::with_capacity(records.len());
    for r in records {
        let text = by_id
            .get(r.sample_id.as_str())
            .copied()
            .or(r.text.as_deref())
            .ok_or_else(|| CorpusError::MissingText(r.sample_id.clone()))?;
        lengths.push(tokenize(text).len() as f64);
        counts.push(r.labels.len() as f64);
    }
    Ok(pearson(&lengths, &counts)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::MetricsError;

    fn rec(id: &str, labels: &[&str]) -> LabelRecord {
        LabelRecord::new(id, labels.iter().map(|s| Label::new(s).unwrap()))
    }

    fn text(id: &str, t: &str) -> TextRecord {
        TextRecord { id: id.into(), text: t.into() }
    }

    #[test]
    fn label_count_histogram() {
        let recs = [rec("a", &["happy"]), rec("b", &["happy", "sad"]), rec("c", &["x", "y"])];
        let s = compute_stats(&recs, &[], 10);
        assert_eq!(s.label_count_histogram, BTreeMap::from([(1, 1), (2, 2)]));
        assert!(s.text_length_histogram.is_empty());
        assert_eq!(s.label_count_histogram.values().sum::<usize>(), s.records);
    }

    #[test]
    fn emotion_frequency_and_tokens() {
        let recs = [rec("a", &["happy"]), rec("b", &["happy", "sad"]), rec("c", &["slightly sad"])];
        let s = compute_stats(&recs, &[], 10);
        assert_eq!(s.emotion_frequency[&Label::new("happy").unwrap()], 2);
        assert_eq!(s.emotion_frequency[&Label::new("sad").unwrap()], 1);
        assert_eq!(s.token_frequency["sad"], 2);
        assert_eq!(s.ranked_emotions()[0].0.as_str(), "happy");
        let total: usize = recs.iter().map(|r| r.labels.len()).sum();
        assert_eq!(s.emotion_frequency.values().sum::<usize>(), total);
    }

    #[test]
    fn text_lengths_bucketed() {
        let s = compute_stats(&[], &[text("a", "one two three"), text("b", &"w ".repeat(12))], 10);
        assert_eq!(s.text_length_histogram, BTreeMap::from([(0, 1), (10, 1)]));
        let tables = s.tables();
        assert_eq!(tables[3].1, "length_bucket,descriptions\n0,1\n10,1\n");
    }

    #[test]
    fn correlation_cases() {
        let recs = [rec("a", &["x"]), rec("b", &["x", "y"]), rec("c", &["x", "y", "z"])];
        let texts = [text("a", "w"), text("b", "w w"), text("c", "w w w")];
        assert!((length_label_correlation(&recs, &texts).unwrap() - 1.0).abs() < 1e-12);

        let flat = [rec("a", &["x"]), rec("b", &["y"]), rec("c", &["z"])];
        assert!(matches!(
            length_label_correlation(&flat, &texts),
            Err(CorpusError::Metrics(MetricsError::ConstantVector))
        ));
        assert!(matches!(
            length_label_correlation(&recs, &texts[..2]),
            Err(CorpusError::MissingText(ref id)) if id == "c"
        ));
    }
}
