use crate::error::{Error, Result};
use crate::synth::Label;

fn check(scores: &[f64], labels: &[Label]) -> Result<(u64, u64)> {
    if scores.len() != labels.len() {
        return Err(Error::ShapeMismatch(format!("{} scores for {} labels", scores.len(), labels.len())));
    }
    if let Some(&bad) = scores.iter().find(|s| !s.is_finite()) {
        return Err(Error::InvalidScore(bad));
    }
    let pos = labels.iter().filter(|&&l| l == Label::Fake).count() as u64;
    let neg = labels.len() as u64 - pos;
    Ok((pos, neg))
}

fn order_by_score(scores: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    idx
}

/// Area under the ROC curve with `Fake` as the positive class.
///
/// Computed as the Mann-Whitney statistic from tie-averaged ranks. Ranks are
/// kept doubled so that all arithmetic before the final division is exact
/// integer arithmetic.
pub fn auc(scores: &[f64], labels: &[Label]) -> Result<f64> {
    let (pos, neg) = check(scores, labels)?;
    if pos == 0 || neg == 0 {
        return Err(Error::SingleClass("frame"));
    }
    let order = order_by_score(scores);
    // sum over positives of twice their (1-based, tie-averaged) rank
    let mut rank_sum2: u128 = 0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        // ranks i+1 ..= j share the average (i + 1 + j) / 2
        let doubled = (i + 1 + j) as u128;
        let fakes = order[i..j].iter().filter(|&&k| labels[k] == Label::Fake).count() as u128;
        rank_sum2 += fakes * doubled;
        i = j;
    }
    let (p, n) = (pos as u128, neg as u128);
    let u2 = rank_sum2 - p * (p + 1);
    Ok(u2 as f64 / (2 * p * n) as f64)
}

/// ROC curve vertices as `(fpr, tpr)` pairs, from `(0, 0)` to `(1, 1)`,
/// sweeping the threshold from the highest score down. Tied scores produce a
/// single diagonal step.
pub fn roc_points(scores: &[f64], labels: &[Label]) -> Result<Vec<(f64, f64)>> {
    let (pos, neg) = check(scores, labels)?;
    if pos == 0 || neg == 0 {
        return Err(Error::SingleClass("frame"));
    }
    let mut order = order_by_score(scores);
    order.reverse();
    let mut points = vec![(0.0, 0.0)];
    let (mut tp, mut fp) = (0u64, 0u64);
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            match labels[order[j]] {
                Label::Fake => tp += 1,
                Label::Real => fp += 1,
            }
            j += 1;
        }
        points.push((fp as f64 / neg as f64, tp as f64 / pos as f64));
        i = j;
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn labels(bits: &[u8]) -> Vec<Label> {
        bits.iter().map(|&b| if b == 1 { Label::Fake } else { Label::Real }).collect()
    }

    #[test]
    fn simple_cases() {
        assert_eq!(auc(&[0.9, 0.1], &labels(&[1, 0])).unwrap(), 1.0);
        assert_eq!(auc(&[0.9, 0.1], &labels(&[0, 1])).unwrap(), 0.0);
        assert_eq!(auc(&[0.5; 6], &labels(&[1, 0, 1, 0, 0, 1])).unwrap(), 0.5);
        // pairs: (0.8 vs 0.3) win, (0.8 vs 0.8) tie, (0.4 vs 0.3) win, (0.4 vs 0.8) loss
        assert_eq!(auc(&[0.8, 0.4, 0.3, 0.8], &labels(&[1, 1, 0, 0])).unwrap(), 0.625);
    }

    #[test]
    fn errors() {
        assert_eq!(auc(&[0.1, 0.2], &labels(&[1, 1])), Err(Error::SingleClass("frame")));
        assert!(matches!(auc(&[0.1], &labels(&[1, 0])), Err(Error::ShapeMismatch(_))));
        assert!(matches!(auc(&[f64::NAN, 0.2], &labels(&[1, 0])), Err(Error::InvalidScore(_))));
    }

    #[test]
    fn roc_trapezoid_area_matches_auc() {
        let s = [0.1, 0.4, 0.35, 0.8, 0.4, 0.9, 0.2];
        let l = labels(&[0, 0, 1, 1, 1, 1, 0]);
        let pts = roc_points(&s, &l).unwrap();
        assert_eq!(pts.first(), Some(&(0.0, 0.0)));
        assert_eq!(pts.last(), Some(&(1.0, 1.0)));
        let area: f64 = pts.windows(2).map(|w| (w[1].0 - w[0].0) * (w[1].1 + w[0].1) / 2.0).sum();
        assert!((area - auc(&s, &l).unwrap()).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn complement_and_monotone_invariance(
            data in prop::collection::vec((0u8..20, 0u8..2), 2..80)
        ) {
            let s: Vec<f64> = data.iter().map(|d| d.0 as f64 / 20.0).collect();
            let bits: Vec<u8> = data.iter().map(|d| d.1).collect();
            prop_assume!(bits.contains(&0) && bits.contains(&1));
            let l = labels(&bits);
            let flipped: Vec<Label> = l.iter().map(|&x| if x == Label::Fake { Label::Real } else { Label::Fake }).collect();
            let a = auc(&s, &l).unwrap();
            prop_assert!((a + auc(&s, &flipped).unwrap() - 1.0).abs() <= 1e-12);
            let warped: Vec<f64> = s.iter().map(|x| (3.0 * x).exp() - 7.0).collect();
            prop_assert_eq!(a, auc(&warped, &l).unwrap());
        }
    }
}
