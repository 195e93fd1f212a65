//! Numeric evaluation: set-based precision/recall/F over group IDs, Jaccard
//! agreement, Pearson correlation, M-avg, the random baseline, and
//! matching-based text metrics.

mod agreement;
mod baseline;
mod correlation;
mod evaluate;
mod sets;
mod text;

pub use agreement::{agreement_matrix, AgreementMatrix, Annotation};
pub use baseline::{basic_emotions, random_baseline, BASIC_EMOTIONS};
pub use correlation::{m_avg, pearson, ColumnCorrelation, ScoreTable};
pub use evaluate::{aggregate_runs, evaluate_corpus, AggregateMode, CorpusReport, RunAggregate, SampleEval};
pub use sets::{harmonic, jaccard, set_prf, Prf};
pub use text::{bleu_n, rouge_l, score_text_corpus, tokenize, TextScores};

use thiserror::Error;

use crate::grouping::GroupingError;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("ground-truth set is empty")]
    EmptyGroundTruth,
    #[error("ground truth for sample {0:?} is empty")]
    EmptyGroundTruthSample(String),
    #[error("both sets are empty")]
    BothEmpty,
    #[error("sample ids differ: only in ground truth {only_gt:?}, only in predictions {only_pred:?}")]
    IdMismatch { only_gt: Vec<String>, only_pred: Vec<String> },
    #[error("duplicate sample id {0:?}")]
    DuplicateId(String),
    #[error("no samples to evaluate")]
    EmptyCorpus,
    #[error("annotator {annotator:?} covers different samples than {reference:?}")]
    AnnotatorMismatch { annotator: String, reference: String },
    #[error("annotator {annotator:?} left sample {sample:?} empty")]
    EmptyAnnotation { annotator: String, sample: String },
    #[error("vectors differ in length: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("need at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("correlation undefined for a constant vector")]
    ConstantVector,
    #[error("M-avg: {0}")]
    MAvgKeys(String),
    #[error("reports mix different strategies")]
    MixedStrategies,
    #[error("label space is empty")]
    EmptyLabelSpace,
    #[error("BLEU order must be between 1 and 4, got {0}")]
    BadOrder(usize),
    #[error("{0} has no tokens")]
    EmptyTokens(&'static str),
    #[error("report: {0}")]
    ReportFormat(String),
    #[error("table: {0}")]
    TableFormat(String),
    #[error("{0}")]
    Corpus(String),
    #[error(transparent)]
    Grouping(#[from] GroupingError),
}
