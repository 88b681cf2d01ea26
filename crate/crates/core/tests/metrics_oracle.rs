mod support {
    pub mod auc_oracle;
}

use ids_core::metrics::{class_report, confusion, roc_auc};
use proptest::prelude::*;
use support::auc_oracle::*;

#[test]
fn sweep_auc_matches_pairwise_oracle() {
    let dev = max_auc_deviation(100, 500);
    assert!(dev <= 1e-9, "max deviation {dev}");
}

#[test]
fn oracle_sanity() {
    assert_eq!(pairwise_auc(&[0.9, 0.1], &[true, false]), 1.0);
    assert_eq!(pairwise_auc(&[0.5, 0.5], &[true, false]), 0.5);
}

fn names(k: usize) -> Vec<String> {
    (0..k).map(|i| format!("class{i}")).collect()
}

proptest! {
    #[test]
    fn joint_permutation_leaves_metrics_unchanged(
        rows in proptest::collection::vec((0usize..4, 0usize..4, 0u8..20), 4..120),
        rot in 0usize..1000,
    ) {
        let truth: Vec<usize> = rows.iter().map(|r| r.0).collect();
        let pred: Vec<usize> = rows.iter().map(|r| r.1).collect();
        let n = rows.len();
        let perm: Vec<usize> = (0..n).map(|i| (i * 7 + rot) % n).collect();
        prop_assume!({
            let mut p = perm.clone();
            p.sort();
            p.dedup();
            p.len() == n
        });
        let t2: Vec<usize> = perm.iter().map(|&i| truth[i]).collect();
        let p2: Vec<usize> = perm.iter().map(|&i| pred[i]).collect();
        let a = class_report(&confusion(&truth, &pred, &names(4)).unwrap()).unwrap();
        let b = class_report(&confusion(&t2, &p2, &names(4)).unwrap()).unwrap();
        prop_assert_eq!(a, b);

        let scores: Vec<f64> = rows.iter().map(|r| r.2 as f64).collect();
        let labels: Vec<bool> = truth.iter().map(|&t| t > 1).collect();
        prop_assume!(labels.iter().any(|&l| l) && labels.iter().any(|&l| !l));
        let s2: Vec<f64> = perm.iter().map(|&i| scores[i]).collect();
        let l2: Vec<bool> = perm.iter().map(|&i| labels[i]).collect();
        let auc_a = roc_auc(&scores, &labels).unwrap().auc;
        let auc_b = roc_auc(&s2, &l2).unwrap().auc;
        prop_assert!((auc_a - auc_b).abs() < 1e-12);
        prop_assert!((auc_a - pairwise_auc(&scores, &labels)).abs() < 1e-12);
    }

    #[test]
    fn report_invariants(rows in proptest::collection::vec((0usize..5, 0usize..5), 1..200)) {
        let truth: Vec<usize> = rows.iter().map(|r| r.0).collect();
        let pred: Vec<usize> = rows.iter().map(|r| r.1).collect();
        let cm = confusion(&truth, &pred, &names(5)).unwrap();
        prop_assert_eq!(cm.total() as usize, rows.len());
        let r = class_report(&cm).unwrap();
        // micro-averaged recall: correct / total
        let micro = truth.iter().zip(&pred).filter(|(t, p)| t == p).count() as f64 / rows.len() as f64;
        prop_assert!((r.accuracy - micro).abs() < 1e-15);
        let wf1: f64 = r.classes.iter().map(|c| c.support as f64 / rows.len() as f64 * c.f1).sum();
        prop_assert!((r.weighted_f1 - wf1).abs() < 1e-12);
        for c in &r.classes {
            for v in [c.precision, c.recall, c.f1] {
                prop_assert!((0.0..=1.0).contains(&v));
            }
        }
    }
}
