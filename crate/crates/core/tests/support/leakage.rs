// Leak-free preprocessing check shared with the acceptance suite.
#![allow(dead_code)]

use ids_core::dataset::{prepare, AttackTaxonomy, FeatureSchema, RawRecord, SplitSpec};

/// Push every continuous value far outside the training range and swap
/// every categorical value for a level that never occurs in training.
pub fn perturb(record: &RawRecord) -> RawRecord {
    let mut r = record.clone();
    for v in r.continuous.iter_mut() {
        *v = *v * 7.0 + 1e6;
    }
    for (i, v) in r.categorical.iter_mut().enumerate() {
        *v = format!("unseen_{i}_{v}");
    }
    r
}

/// Encoder documents fitted before and after perturbing every val/test row.
pub fn encoder_documents(records: &[RawRecord], spec: &SplitSpec) -> (String, String) {
    let schema = FeatureSchema::nsl_kdd();
    let taxonomy = AttackTaxonomy::bundled();
    let before = prepare(records, &schema, &taxonomy, spec).unwrap();
    let mut perturbed = records.to_vec();
    for &i in before.split.val.iter().chain(&before.split.test) {
        perturbed[i] = perturb(&records[i]);
    }
    let after = prepare(&perturbed, &schema, &taxonomy, spec).unwrap();
    assert_eq!(before.split, after.split, "split must depend on labels only");
    (before.encoder.to_json(), after.encoder.to_json())
}
