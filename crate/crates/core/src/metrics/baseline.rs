use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::MetricsError;
use crate::corpus::LabelRecord;
use crate::taxonomy::Label;

/// The six basic emotion labels used by the random baseline by default.
pub const BASIC_EMOTIONS: [&str; 6] = ["happy", "angry", "worried", "sad", "surprise", "neutral"];

pub fn basic_emotions() -> Vec<Label> {
    BASIC_EMOTIONS.iter().map(|s| Label::new(s).expect("non-empty")).collect()
}

/// One uniformly drawn label per sample, reproducible from `seed`.
pub fn random_baseline(label_space: &[Label], seed: u64, sample_ids: &[String]) -> Result<Vec<LabelRecord>, MetricsError> {
    if label_space.is_empty() {
        return Err(MetricsError::EmptyLabelSpace);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(sample_ids
        .iter()
        .map(|id| {
            let pick = rng.random_range(0..label_space.len());
            LabelRecord::new(id.clone(), [label_space[pick].clone()]).with_source("random")
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("s{i:05}")).collect()
    }

    #[test]
    fn deterministic_per_seed() {
        let space = basic_emotions();
        let a = random_baseline(&space, 7, &ids(50)).unwrap();
        let b = random_baseline(&space, 7, &ids(50)).unwrap();
        assert_eq!(a, b);
        let c = random_baseline(&space, 8, &ids(50)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn degenerate_and_empty_spaces() {
        let one = vec![Label::new("calm").unwrap()];
        let out = random_baseline(&one, 1, &ids(20)).unwrap();
        assert!(out.iter().all(|r| r.labels.len() == 1 && r.labels.contains(&one[0])));
        assert!(matches!(random_baseline(&[], 1, &ids(3)), Err(MetricsError::EmptyLabelSpace)));
    }

    #[test]
    fn frequencies_pass_chi_square() {
        let space = basic_emotions();
        let n = 60_000;
        let out = random_baseline(&space, 2024, &ids(n)).unwrap();
        let mut counts = vec![0usize; space.len()];
        for r in &out {
            let l = r.labels.iter().next().unwrap();
            counts[space.iter().position(|s| s == l).unwrap()] += 1;
        }
        let expected = n as f64 / space.len() as f64;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        // chi-square, 5 degrees of freedom, 0.999 quantile = 20.515
        assert!(chi2 < 20.515, "chi2 = {chi2}, counts = {counts:?}");
    }
}
