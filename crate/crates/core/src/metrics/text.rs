//! Matching-based text similarity: BLEU and ROUGE-L.
//!
//! Tokenization: lowercase, split on whitespace, strip every
//! non-alphanumeric character, drop empty tokens. BLEU uses raw clipped
//! precisions without smoothing, so any order with no match scores zero.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use super::MetricsError;
use crate::corpus::{check_same_ids, TextRecord};
use crate::fixed::six;
use crate::par::Execution;

pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|w| w.chars().filter(|c| c.is_alphanumeric()).flat_map(char::to_lowercase).collect::<String>())
        .filter(|t| !t.is_empty())
        .collect()
}

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], usize> {
    let mut counts = HashMap::new();
    for gram in tokens.windows(n) {
        *counts.entry(gram).or_insert(0) += 1;
    }
    counts
}

fn non_empty(text: &str, which: &'static str) -> Result<Vec<String>, MetricsError> {
    let toks = tokenize(text);
    if toks.is_empty() {
        return Err(MetricsError::EmptyTokens(which));
    }
    Ok(toks)
}

/// BLEU up to `max_order` (1..=4) with uniform weights and brevity penalty.
pub fn bleu_n(reference: &str, hypothesis: &str, max_order: usize) -> Result<f64, MetricsError> {
    if !(1..=4).contains(&max_order) {
        return Err(MetricsError::BadOrder(max_order));
    }
    let reference = non_empty(reference, "reference")?;
    let hypothesis = non_empty(hypothesis, "hypothesis")?;
    let mut log_sum = 0.0;
    for n in 1..=max_order {
        if hypothesis.len() < n {
            return Ok(0.0);
        }
        let ref_counts = ngram_counts(&reference, n);
        let clipped: usize = ngram_counts(&hypothesis, n)
            .into_iter()
            .map(|(g, c)| c.min(ref_counts.get(g).copied().unwrap_or(0)))
            .sum();
        if clipped == 0 {
            return Ok(0.0);
        }
        log_sum += (clipped as f64 / (hypothesis.len() - n + 1) as f64).ln();
    }
    let (c, r) = (hypothesis.len() as f64, reference.len() as f64);
    let brevity = if c > r { 1.0 } else { (1.0 - r / c).exp() };
    Ok(brevity * (log_sum / max_order as f64).exp())
}

fn lcs_len(a: &[String], b: &[String]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y { prev[j] + 1 } else { cur[j].max(prev[j + 1]) };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// ROUGE-L F1 over the longest common token subsequence.
pub fn rouge_l(reference: &str, hypothesis: &str) -> Result<f64, MetricsError> {
    let reference = non_empty(reference, "reference")?;
    let hypothesis = non_empty(hypothesis, "hypothesis")?;
    let lcs = lcs_len(&reference, &hypothesis) as f64;
    if lcs == 0.0 {
        return Ok(0.0);
    }
    let p = lcs / hypothesis.len() as f64;
    let r = lcs / reference.len() as f64;
    Ok(2.0 * p * r / (p + r))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TextScores {
    pub id: String,
    #[serde(serialize_with = "six")]
    pub bleu_1: f64,
    #[serde(serialize_with = "six")]
    pub bleu_4: f64,
    #[serde(serialize_with = "six")]
    pub rouge_l: f64,
}

impl TextScores {
    pub fn score(id: impl Into<String>, reference: &str, hypothesis: &str) -> Result<Self, MetricsError> {
        Ok(TextScores {
            id: id.into(),
            bleu_1: bleu_n(reference, hypothesis, 1)?,
            bleu_4: bleu_n(reference, hypothesis, 4)?,
            rouge_l: rouge_l(reference, hypothesis)?,
        })
    }
}

/// Scores every hypothesis description against the reference with the same
/// id; rows are sorted by id.
pub fn score_text_corpus(
    references: &[TextRecord],
    hypotheses: &[TextRecord],
    exec: Execution,
) -> Result<Vec<TextScores>, MetricsError> {
    check_same_ids(references.iter().map(|t| t.id.as_str()), hypotheses.iter().map(|t| t.id.as_str()))
        .map_err(|e| MetricsError::Corpus(e.to_string()))?;
    let refs: BTreeMap<&str, &str> = references.iter().map(|t| (t.id.as_str(), t.text.as_str())).collect();
    let hyps: BTreeMap<&str, &str> = hypotheses.iter().map(|t| (t.id.as_str(), t.text.as_str())).collect();
    let pairs: Vec<(&str, &str, &str)> = refs.iter().map(|(id, r)| (*id, *r, hyps[id])).collect();
    exec.try_map(&pairs, |(id, r, h)| TextScores::score(*id, r, h))
}
