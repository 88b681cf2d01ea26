use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::MetricsError;

/// `counts[i][j]` = rows of true class `i` predicted as class `j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub class_names: Vec<String>,
    pub counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn n_classes(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.n_classes()).map(|i| self.counts[i][i]).sum()
    }

    /// Rows of true class `c`.
    pub fn support(&self, c: usize) -> u64 {
        self.counts[c].iter().sum()
    }

    /// Rows predicted as class `c`.
    pub fn predicted(&self, c: usize) -> u64 {
        self.counts.iter().map(|row| row[c]).sum()
    }

    /// Header row of predicted class names, then one row per true class.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("true\\pred");
        for name in &self.class_names {
            let _ = write!(out, ",{name}");
        }
        out.push('\n');
        for (name, row) in self.class_names.iter().zip(&self.counts) {
            out.push_str(name);
            for v in row {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Option<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: Vec<String> = lines.next()?.split(',').skip(1).map(str::to_string).collect();
        let mut counts = Vec::new();
        for line in lines {
            let row: Option<Vec<u64>> = line.split(',').skip(1).map(|v| v.trim().parse().ok()).collect();
            let row = row?;
            if row.len() != header.len() {
                return None;
            }
            counts.push(row);
        }
        (counts.len() == header.len()).then_some(Self {
            class_names: header,
            counts,
        })
    }
}

pub fn confusion(truth: &[usize], pred: &[usize], class_names: &[String]) -> Result<ConfusionMatrix, MetricsError> {
    if truth.len() != pred.len() {
        return Err(MetricsError::LengthMismatch {
            truth: truth.len(),
            pred: pred.len(),
        });
    }
    let k = class_names.len();
    let mut counts = vec![vec![0u64; k]; k];
    for (&t, &p) in truth.iter().zip(pred) {
        if let Some(&index) = [t, p].iter().find(|&&i| i >= k) {
            return Err(MetricsError::IndexOutOfRange { index, n_classes: k });
        }
        counts[t][p] += 1;
    }
    Ok(ConfusionMatrix {
        class_names: class_names.to_vec(),
        counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn names(k: usize) -> Vec<String> {
        (0..k).map(|i| format!("c{i}")).collect()
    }

    #[test]
    fn perfect_prediction_is_diagonal() {
        let cm = confusion(&[0, 1, 1], &[0, 1, 1], &names(2)).unwrap();
        assert_eq!(cm.counts, [[1, 0], [0, 2]]);
    }

    #[test]
    fn total_confusion() {
        let cm = confusion(&[0, 0], &[1, 1], &names(2)).unwrap();
        assert_eq!(cm.counts, [[0, 2], [0, 0]]);
    }

    #[test]
    fn errors() {
        assert_eq!(
            confusion(&[0, 1], &[0], &names(2)),
            Err(MetricsError::LengthMismatch { truth: 2, pred: 1 })
        );
        assert_eq!(
            confusion(&[0, 3], &[0, 1], &names(2)),
            Err(MetricsError::IndexOutOfRange { index: 3, n_classes: 2 })
        );
    }

    #[test]
    fn row_sums_match_independent_tally() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let truth: Vec<usize> = (0..1000).map(|_| rng.random_range(0..5)).collect();
        let pred: Vec<usize> = (0..1000).map(|_| rng.random_range(0..5)).collect();
        let cm = confusion(&truth, &pred, &names(5)).unwrap();
        assert_eq!(cm.total(), 1000);
        for c in 0..5 {
            let tally = truth.iter().filter(|&&t| t == c).count() as u64;
            assert_eq!(cm.support(c), tally);
            let ptally = pred.iter().filter(|&&p| p == c).count() as u64;
            assert_eq!(cm.predicted(c), ptally);
        }
    }

    #[test]
    fn csv_round_trip() {
        let cm = confusion(&[0, 1, 2, 2], &[0, 2, 2, 1], &names(3)).unwrap();
        assert_eq!(ConfusionMatrix::from_csv(&cm.to_csv()).unwrap(), cm);
    }
}
