use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::sets::jaccard;
use super::MetricsError;
use crate::corpus::LabelRecord;
use crate::fixed::six_matrix;
use crate::grouping::{GroupedSet, Grouper, GroupingStrategy};
use crate::par::Execution;

/// One annotator's label sets.
#[derive(Debug, Clone)]
pub struct Annotation {
    pub annotator: String,
    pub records: Vec<LabelRecord>,
}

/// Pairwise mean per-sample Jaccard similarity between annotators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementMatrix {
    pub annotators: Vec<String>,
    #[serde(serialize_with = "six_matrix")]
    pub values: Vec<Vec<f64>>,
}

impl AgreementMatrix {
    pub fn get(&self, m: usize, n: usize) -> f64 {
        self.values[m][n]
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec![String::new()];
        header.extend(self.annotators.iter().cloned());
        w.write_record(&header).expect("in-memory csv");
        for (name, row) in self.annotators.iter().zip(&self.values) {
            let mut rec = vec![name.clone()];
            rec.extend(row.iter().map(|x| crate::fixed::fmt6(*x)));
            w.write_record(&rec).expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}

pub fn agreement_matrix(
    annotations: &[Annotation],
    grouper: &Grouper<'_>,
    strategy: &GroupingStrategy,
    exec: Execution,
) -> Result<AgreementMatrix, MetricsError> {
    grouper.check(strategy)?;
    let first = annotations.first().ok_or(MetricsError::EmptyCorpus)?;
    let ids: Vec<&str> = {
        let mut v: Vec<&str> = first.records.iter().map(|r| r.sample_id.as_str()).collect();
        v.sort_unstable();
        v
    };
    if ids.is_empty() {
        return Err(MetricsError::EmptyCorpus);
    }

    let grouped: Vec<BTreeMap<&str, GroupedSet>> = annotations
        .iter()
        .map(|a| {
            let mut map = BTreeMap::new();
            for r in &a.records {
                if r.labels.is_empty() {
                    return Err(MetricsError::EmptyAnnotation {
                        annotator: a.annotator.clone(),
                        sample: r.sample_id.clone(),
                    });
                }
                let set = grouper.group_set(strategy, &r.labels)?;
                if map.insert(r.sample_id.as_str(), set).is_some() {
                    return Err(MetricsError::DuplicateId(r.sample_id.clone()));
                }
            }
            if map.keys().copied().ne(ids.iter().copied()) {
                return Err(MetricsError::AnnotatorMismatch {
                    annotator: a.annotator.clone(),
                    reference: first.annotator.clone(),
                });
            }
            Ok(map)
        })
        .collect::<Result<_, _>>()?;

    let k = annotations.len();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|m| (m + 1..k).map(move |n| (m, n))).collect();
    let scores = exec.try_map(&pairs, |&(m, n)| {
        let mut total = 0.0;
        for id in &ids {
            total += jaccard(&grouped[m][id].groups, &grouped[n][id].groups)?;
        }
        Ok::<_, MetricsError>(total / ids.len() as f64)
    })?;

    let mut values = vec![vec![0.0; k]; k];
    for (m, row) in values.iter_mut().enumerate() {
        row[m] = 1.0;
    }
    for (&(m, n), s) in pairs.iter().zip(scores) {
        values[m][n] = s;
        values[n][m] = s;
    }
    Ok(AgreementMatrix { annotators: annotations.iter().map(|a| a.annotator.clone()).collect(), values })
}
