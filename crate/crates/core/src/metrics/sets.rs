use std::collections::BTreeSet;

use super::MetricsError;

/// Set-based precision, recall and F score for one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f: f64,
}

/// Harmonic mean with the 0/0 -> 0 convention.
pub fn harmonic(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

/// Scores a predicted group set against a non-empty ground-truth group set.
/// An empty prediction scores zero everywhere.
pub fn set_prf<T: Ord>(gt: &BTreeSet<T>, pred: &BTreeSet<T>) -> Result<Prf, MetricsError> {
    if gt.is_empty() {
        return Err(MetricsError::EmptyGroundTruth);
    }
    let hits = gt.intersection(pred).count() as f64;
    let precision = if pred.is_empty() { 0.0 } else { hits / pred.len() as f64 };
    let recall = hits / gt.len() as f64;
    Ok(Prf { precision, recall, f: harmonic(precision, recall) })
}

/// |a ∩ b| / |a ∪ b|.
pub fn jaccard<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> Result<f64, MetricsError> {
    if a.is_empty() && b.is_empty() {
        return Err(MetricsError::BothEmpty);
    }
    let inter = a.intersection(b).count();
    let union = a.len() + b.len() - inter;
    Ok(inter as f64 / union as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(xs: &[u8]) -> BTreeSet<u8> {
        xs.iter().copied().collect()
    }

    #[test]
    fn prf_examples() {
        // intersection {2,3}: 2 of 3 predicted, 2 of 3 true
        let p = set_prf(&s(&[1, 2, 3]), &s(&[2, 3, 4])).unwrap();
        assert_eq!((p.precision, p.recall, p.f), (2.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0));
        let p = set_prf(&s(&[1]), &s(&[1])).unwrap();
        assert_eq!((p.precision, p.recall, p.f), (1.0, 1.0, 1.0));
        let p = set_prf(&s(&[1, 2]), &s(&[])).unwrap();
        assert_eq!((p.precision, p.recall, p.f), (0.0, 0.0, 0.0));
        assert!(matches!(set_prf(&s(&[]), &s(&[1])), Err(MetricsError::EmptyGroundTruth)));
    }

    #[test]
    fn jaccard_examples() {
        assert_eq!(jaccard(&s(&[1, 2]), &s(&[2, 3])).unwrap(), 1.0 / 3.0);
        assert_eq!(jaccard(&s(&[1, 2]), &s(&[1, 2])).unwrap(), 1.0);
        assert_eq!(jaccard(&s(&[1]), &s(&[2])).unwrap(), 0.0);
        assert_eq!(jaccard(&s(&[]), &s(&[2])).unwrap(), 0.0);
        assert!(matches!(jaccard(&s(&[]), &s(&[])), Err(MetricsError::BothEmpty)));
    }
}
