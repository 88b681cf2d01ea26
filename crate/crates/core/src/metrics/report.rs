use serde::{Deserialize, Serialize};

use super::{ConfusionMatrix, MetricsError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub name: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
}

/// Per-class precision/recall/F1 plus accuracy and macro / weighted
/// averages. Undefined ratios (zero denominators) are reported as 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    pub classes: Vec<ClassMetrics>,
    pub accuracy: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub weighted_precision: f64,
    pub weighted_recall: f64,
    pub weighted_f1: f64,
    pub total: u64,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn class_report(cm: &ConfusionMatrix) -> Result<ClassReport, MetricsError> {
    let total = cm.total();
    if cm.n_classes() == 0 || total == 0 {
        return Err(MetricsError::EmptyMatrix);
    }
    let classes: Vec<ClassMetrics> = (0..cm.n_classes())
        .map(|c| {
            let tp = cm.counts[c][c];
            let precision = ratio(tp, cm.predicted(c));
            let recall = ratio(tp, cm.support(c));
            let f1 = if precision + recall == 0.0 {
                0.0
            } else {
                2.0 * precision * recall / (precision + recall)
            };
            ClassMetrics {
                name: cm.class_names[c].clone(),
                precision,
                recall,
                f1,
                support: cm.support(c),
            }
        })
        .collect();
    let k = classes.len() as f64;
    let n = total as f64;
    let mean = |f: fn(&ClassMetrics) -> f64| classes.iter().map(f).sum::<f64>() / k;
    let weighted = |f: fn(&ClassMetrics) -> f64| classes.iter().map(|c| f(c) * c.support as f64 / n).sum::<f64>();
    Ok(ClassReport {
        accuracy: ratio(cm.trace(), total),
        macro_precision: mean(|c| c.precision),
        macro_recall: mean(|c| c.recall),
        macro_f1: mean(|c| c.f1),
        weighted_precision: weighted(|c| c.precision),
        weighted_recall: weighted(|c| c.recall),
        weighted_f1: weighted(|c| c.f1),
        total,
        classes,
    })
}

impl ClassReport {
    pub fn class(&self, name: &str) -> Option<&ClassMetrics> {
        self.classes.iter().find(|c| c.name == name)
    }

    /// Key-value document laid out like a conventional classification report.
    pub fn to_json(&self) -> String {
        use serde_json::{json, Map, Value};
        let mut doc = Map::new();
        for c in &self.classes {
            doc.insert(
                c.name.clone(),
                json!({"precision": c.precision, "recall": c.recall, "f1-score": c.f1, "support": c.support}),
            );
        }
        doc.insert("accuracy".into(), json!(self.accuracy));
        doc.insert(
            "macro avg".into(),
            json!({"precision": self.macro_precision, "recall": self.macro_recall, "f1-score": self.macro_f1, "support": self.total}),
        );
        doc.insert(
            "weighted avg".into(),
            json!({"precision": self.weighted_precision, "recall": self.weighted_recall, "f1-score": self.weighted_f1, "support": self.total}),
        );
        serde_json::to_string_pretty(&Value::Object(doc)).expect("report serialises")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::confusion;

    fn cm(counts: Vec<Vec<u64>>) -> ConfusionMatrix {
        ConfusionMatrix {
            class_names: (0..counts.len()).map(|i| format!("c{i}")).collect(),
            counts,
        }
    }

    #[test]
    fn diagonal_matrix_is_perfect() {
        let r = class_report(&cm(vec![vec![3, 0, 0], vec![0, 4, 0], vec![0, 0, 1]])).unwrap();
        assert_eq!(r.accuracy, 1.0);
        for c in &r.classes {
            assert_eq!((c.precision, c.recall, c.f1), (1.0, 1.0, 1.0));
        }
    }

    #[test]
    fn never_predicted_class_gets_zero() {
        let r = class_report(&cm(vec![vec![5, 0], vec![3, 0]])).unwrap();
        assert_eq!((r.classes[1].precision, r.classes[1].recall, r.classes[1].f1), (0.0, 0.0, 0.0));
    }

    #[test]
    fn two_by_two_arithmetic() {
        let r = class_report(&cm(vec![vec![50, 10], vec![5, 35]])).unwrap();
        assert!((r.classes[1].precision - 35.0 / 45.0).abs() < 1e-12);
        assert!((r.classes[1].recall - 0.875).abs() < 1e-12);
        assert!((r.accuracy - 0.85).abs() < 1e-12);
        let wf1: f64 = r.classes.iter().map(|c| c.f1 * c.support as f64 / 100.0).sum();
        assert!((r.weighted_f1 - wf1).abs() < 1e-15);
    }

    #[test]
    fn empty_matrix_rejected() {
        assert_eq!(class_report(&cm(vec![vec![0, 0], vec![0, 0]])), Err(MetricsError::EmptyMatrix));
    }

    #[test]
    fn weighted_recall_equals_accuracy() {
        let truth = [0, 0, 1, 2, 2, 2, 1, 0, 2];
        let pred = [0, 1, 1, 2, 0, 2, 1, 0, 1];
        let names: Vec<String> = (0..3).map(|i| i.to_string()).collect();
        let r = class_report(&confusion(&truth, &pred, &names).unwrap()).unwrap();
        assert!((r.weighted_recall - r.accuracy).abs() < 1e-15);
    }

    #[test]
    fn json_layout() {
        let r = class_report(&cm(vec![vec![1, 1], vec![0, 2]])).unwrap();
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["c1"]["support"], 2);
        assert_eq!(v["accuracy"], 0.75);
        assert!(v["weighted avg"]["f1-score"].is_number());
    }
}
