use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::sets::set_prf;
use super::MetricsError;
use crate::corpus::{check_same_ids, LabelRecord};
use crate::fixed::{fmt6, six};
use crate::grouping::{Grouper, GroupingStrategy};
use crate::par::Execution;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleEval {
    pub sample_id: String,
    #[serde(serialize_with = "six")]
    pub precision: f64,
    #[serde(serialize_with = "six")]
    pub recall: f64,
    #[serde(serialize_with = "six")]
    pub f: f64,
    pub gt_groups: usize,
    pub pred_groups: usize,
    pub oov_gt: usize,
    pub oov_pred: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AggregateMode {
    Macro,
}

/// Macro-averaged scores of one prediction run under one strategy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusReport {
    pub strategy: GroupingStrategy,
    pub taxonomy_version: String,
    pub aggregate_mode: AggregateMode,
    pub n_samples: usize,
    #[serde(serialize_with = "six")]
    pub mean_precision: f64,
    #[serde(serialize_with = "six")]
    pub mean_recall: f64,
    #[serde(serialize_with = "six")]
    pub mean_f: f64,
    /// Spread across repeated runs; zero for a single run.
    #[serde(serialize_with = "six")]
    pub std_f: f64,
    pub oov_gt_total: usize,
    pub oov_pred_total: usize,
    pub per_sample: Vec<SampleEval>,
}

/// Scores `pred` against `gt` sample by sample under `strategy`.
///
/// Both streams must cover the same sample ids. Per-sample rows are sorted by
/// sample id regardless of input order or execution policy.
pub fn evaluate_corpus(
    gt: &[LabelRecord],
    pred: &[LabelRecord],
    grouper: &Grouper<'_>,
    strategy: &GroupingStrategy,
    exec: Execution,
) -> Result<CorpusReport, MetricsError> {
    grouper.check(strategy)?;
    let gt_by_id = index_unique(gt)?;
    let pred_by_id = index_unique(pred)?;
    check_same_ids(gt_by_id.keys().copied(), pred_by_id.keys().copied()).map_err(|e| match e {
        crate::corpus::CorpusError::IdMismatch { only_left, only_right } => {
            MetricsError::IdMismatch { only_gt: only_left, only_pred: only_right }
        }
        other => MetricsError::Corpus(other.to_string()),
    })?;
    if gt_by_id.is_empty() {
        return Err(MetricsError::EmptyCorpus);
    }
    let pairs: Vec<(&LabelRecord, &LabelRecord)> =
        gt_by_id.iter().map(|(id, g)| (*g, pred_by_id[id])).collect();

    let per_sample = exec.try_map(&pairs, |(g, p)| {
        let gt_set = grouper.group_set(strategy, &g.labels)?;
        let pred_set = grouper.group_set(strategy, &p.labels)?;
        let prf = set_prf(&gt_set.groups, &pred_set.groups)
            .map_err(|_| MetricsError::EmptyGroundTruthSample(g.sample_id.clone()))?;
        Ok::<_, MetricsError>(SampleEval {
            sample_id: g.sample_id.clone(),
            precision: prf.precision,
            recall: prf.recall,
            f: prf.f,
            gt_groups: gt_set.groups.len(),
            pred_groups: pred_set.groups.len(),
            oov_gt: gt_set.oov_count,
            oov_pred: pred_set.oov_count,
        })
    })?;

    let n = per_sample.len() as f64;
    let mean = |f: fn(&SampleEval) -> f64| per_sample.iter().map(f).sum::<f64>() / n;
    Ok(CorpusReport {
        strategy: strategy.clone(),
        taxonomy_version: grouper.bundle().version().to_string(),
        aggregate_mode: AggregateMode::Macro,
        n_samples: per_sample.len(),
        mean_precision: mean(|s| s.precision),
        mean_recall: mean(|s| s.recall),
        mean_f: mean(|s| s.f),
        std_f: 0.0,
        oov_gt_total: per_sample.iter().map(|s| s.oov_gt).sum(),
        oov_pred_total: per_sample.iter().map(|s| s.oov_pred).sum(),
        per_sample,
    })
}

fn index_unique(records: &[LabelRecord]) -> Result<BTreeMap<&str, &LabelRecord>, MetricsError> {
    let mut map = BTreeMap::new();
    for r in records {
        if map.insert(r.sample_id.as_str(), r).is_some() {
            return Err(MetricsError::DuplicateId(r.sample_id.clone()));
        }
    }
    Ok(map)
}

impl CorpusReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, MetricsError> {
        serde_json::from_str(text).map_err(|e| MetricsError::ReportFormat(e.to_string()))
    }

    /// Flat per-sample table.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "strategy", "sample_id", "precision", "recall", "f", "gt_groups", "pred_groups", "oov_gt", "oov_pred",
        ])
        .expect("in-memory csv");
        let strategy = self.strategy.to_string();
        for s in &self.per_sample {
            w.write_record([
                strategy.clone(),
                s.sample_id.clone(),
                fmt6(s.precision),
                fmt6(s.recall),
                fmt6(s.f),
                s.gt_groups.to_string(),
                s.pred_groups.to_string(),
                s.oov_gt.to_string(),
                s.oov_pred.to_string(),
            ])
            .expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}

/// Mean and population standard deviation over repeated prediction runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunAggregate {
    pub strategy: GroupingStrategy,
    pub runs: usize,
    pub n_samples: usize,
    #[serde(serialize_with = "six")]
    pub mean_precision: f64,
    #[serde(serialize_with = "six")]
    pub std_precision: f64,
    #[serde(serialize_with = "six")]
    pub mean_recall: f64,
    #[serde(serialize_with = "six")]
    pub std_recall: f64,
    #[serde(serialize_with = "six")]
    pub mean_f: f64,
    #[serde(serialize_with = "six")]
    pub std_f: f64,
}

pub fn aggregate_runs(reports: &[CorpusReport]) -> Result<RunAggregate, MetricsError> {
    let first = reports.first().ok_or(MetricsError::EmptyCorpus)?;
    if reports.iter().any(|r| r.strategy != first.strategy) {
        return Err(MetricsError::MixedStrategies);
    }
    let stats = |f: fn(&CorpusReport) -> f64| {
        let n = reports.len() as f64;
        let mean = reports.iter().map(f).sum::<f64>() / n;
        let var = reports.iter().map(|r| (f(r) - mean).powi(2)).sum::<f64>() / n;
        (mean, var.sqrt())
    };
    let (mean_precision, std_precision) = stats(|r| r.mean_precision);
    let (mean_recall, std_recall) = stats(|r| r.mean_recall);
    let (mean_f, std_f) = stats(|r| r.mean_f);
    Ok(RunAggregate {
        strategy: first.strategy.clone(),
        runs: reports.len(),
        n_samples: first.n_samples,
        mean_precision,
        std_precision,
        mean_recall,
        std_recall,
        mean_f,
        std_f,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::taxonomy::{build_bundle, Label, TaxonomyBundle};

    fn rec(id: &str, labels: &[&str]) -> LabelRecord {
        LabelRecord::new(id, labels.iter().map(|s| Label::new(s).unwrap()))
    }

    fn bundle() -> TaxonomyBundle {
        build_bundle("t", &["w1\t1\tjoy\t\nw1\t1\tanger\t\nw1\t1\tfear\t\n"], "joy\tjoyful\n", "").unwrap()
    }

    #[test]
    fn identity_corpus_scores_one() {
        let b = bundle();
        let g = Grouper::new(&b);
        let gt = vec![rec("a", &["joy", "anger"]), rec("b", &["fear"])];
        let r = evaluate_corpus(&gt, &gt, &g, &GroupingStrategy::M2, Execution::Sequential).unwrap();
        assert_eq!(r.mean_f, 1.0);
        assert_eq!(r.std_f, 0.0);
    }

    #[test]
    fn macro_mean_of_two_samples() {
        let b = bundle();
        let g = Grouper::new(&b);
        let gt = vec![rec("a", &["joy"]), rec("b", &["fear"])];
        let pred = vec![rec("b", &["anger"]), rec("a", &["joyful"])];
        let r = evaluate_corpus(&gt, &pred, &g, &GroupingStrategy::M2, Execution::Parallel).unwrap();
        assert_eq!(r.per_sample.iter().map(|s| s.f).collect::<Vec<_>>(), vec![1.0, 0.0]);
        assert_eq!(r.mean_f, 0.5);
        assert_eq!(r.per_sample[0].sample_id, "a");
    }

    #[test]
    fn single_correct_label_against_multi_label_gt() {
        let b = bundle();
        let g = Grouper::new(&b);
        let gt = vec![rec("a", &["joy", "anger"]), rec("b", &["joy", "anger", "fear"])];
        let pred = vec![rec("a", &["joy"]), rec("b", &["fear"])];
        let r = evaluate_corpus(&gt, &pred, &g, &GroupingStrategy::M2, Execution::Sequential).unwrap();
        assert_eq!(r.mean_precision, 1.0);
        assert_eq!(r.mean_recall, (0.5 + 1.0 / 3.0) / 2.0);
    }

    #[test]
    fn id_errors() {
        let b = bundle();
        let g = Grouper::new(&b);
        let gt = vec![rec("a", &["joy"]), rec("b", &["joy"])];
        let pred = vec![rec("a", &["joy"]), rec("c", &["joy"])];
        let err = evaluate_corpus(&gt, &pred, &g, &GroupingStrategy::M1, Execution::Sequential).unwrap_err();
        assert!(matches!(err, MetricsError::IdMismatch { ref only_gt, ref only_pred }
            if only_gt == &["b"] && only_pred == &["c"]));
        let dup = vec![rec("a", &["joy"]), rec("a", &["joy"])];
        assert!(matches!(
            evaluate_corpus(&dup, &dup, &g, &GroupingStrategy::M1, Execution::Sequential),
            Err(MetricsError::DuplicateId(_))
        ));
        let empty_gt = vec![rec("a", &[])];
        assert!(matches!(
            evaluate_corpus(&empty_gt, &empty_gt, &g, &GroupingStrategy::M1, Execution::Sequential),
            Err(MetricsError::EmptyGroundTruthSample(_))
        ));
    }

    #[test]
    fn report_round_trip_and_csv() {
        let b = bundle();
        let g = Grouper::new(&b);
        let gt = vec![rec("a", &["joy", "anger", "fear"])];
        let pred = vec![rec("a", &["joy", "zzz"])];
        let r = evaluate_corpus(&gt, &pred, &g, &GroupingStrategy::M2, Execution::Sequential).unwrap();
        assert_eq!(r.oov_pred_total, 1);
        let text = r.to_json();
        assert!(text.contains("\"mean_recall\": 0.333333"), "{text}");
        let back = CorpusReport::from_json(&text).unwrap();
        assert_eq!(back.to_json(), text);
        assert!(r.to_csv().starts_with("strategy,sample_id,precision"));
        assert!(r.to_csv().contains("M2,a,0.500000,0.333333,0.400000,3,2,0,1"));
    }

    #[test]
    fn aggregate_population_std() {
        let b = bundle();
        let g = Grouper::new(&b);
        let gt = vec![rec("a", &["joy"])];
        let r1 = evaluate_corpus(&gt, &[rec("a", &["joy"])], &g, &GroupingStrategy::M1, Execution::Sequential).unwrap();
        let r2 = evaluate_corpus(&gt, &[rec("a", &["fear"])], &g, &GroupingStrategy::M1, Execution::Sequential).unwrap();
        let agg = aggregate_runs(&[r1.clone(), r2]).unwrap();
        assert_eq!((agg.mean_f, agg.std_f), (0.5, 0.5));
        let single = aggregate_runs(&[r1]).unwrap();
        assert_eq!(single.std_f, 0.0);
    }
}
