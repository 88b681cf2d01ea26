use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::DatasetError;

/// Train/validation/test fractions plus the shuffling seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train: f64,
    pub val: f64,
    pub test: f64,
    pub seed: u64,
}

impl SplitSpec {
    pub fn new(train: f64, val: f64, test: f64, seed: u64) -> Result<Self, DatasetError> {
        let spec = Self { train, val, test, seed };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), DatasetError> {
        let f = self.fractions();
        if f.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(DatasetError::InvalidSplit(format!("every fraction must be > 0, got {f:?}")));
        }
        let sum: f64 = f.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(DatasetError::InvalidSplit(format!("fractions sum to {sum}, expected 1")));
        }
        Ok(())
    }

    pub fn fractions(&self) -> [f64; 3] {
        [self.train, self.val, self.test]
    }
}

/// Row indices of each partition, each list sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

/// Largest-remainder apportionment of `count` items over `fractions`.
/// Remainder ties go to the lower part index.
pub fn apportion<const N: usize>(count: usize, fractions: [f64; N]) -> [usize; N] {
    let quotas = fractions.map(|f| f * count as f64);
    let mut sizes = quotas.map(|q| q.floor() as usize);
    let assigned: usize = sizes.iter().sum();
    let mut order: Vec<usize> = (0..N).collect();
    order.sort_by(|&a, &b| {
        let ra = quotas[a] - quotas[a].floor();
        let rb = quotas[b] - quotas[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &k in order.iter().take(count.saturating_sub(assigned)) {
        sizes[k] += 1;
    }
    sizes
}

/// Per-category sizes for a three-way split. Each part gets at least one row;
/// if rounding leaves a part empty, a row is moved from the part with the
/// largest surplus over its quota.
pub fn allocate_three_way(count: usize, fractions: [f64; 3]) -> Option<[usize; 3]> {
    if count < 3 {
        return None;
    }
    let mut sizes = apportion(count, fractions);
    while let Some(empty) = sizes.iter().position(|&s| s == 0) {
        let donor = (0..3)
            .filter(|&k| sizes[k] > 1)
            .max_by(|&a, &b| {
                let sa = sizes[a] as f64 - fractions[a] * count as f64;
                let sb = sizes[b] as f64 - fractions[b] * count as f64;
                sa.total_cmp(&sb).then(b.cmp(&a))
            })?;
        sizes[donor] -= 1;
        sizes[empty] += 1;
    }
    Some(sizes)
}

/// Splits rows so each category keeps the requested proportions.
///
/// `labels[i]` is the stratum of row `i`, in `0..n_strata`. Strata with no
/// rows are skipped; strata with 1 or 2 rows cannot be split and are an error.
pub fn stratified_split(
    labels: &[usize],
    n_strata: usize,
    spec: &SplitSpec,
    stratum_name: impl Fn(usize) -> String,
) -> Result<SplitIndices, DatasetError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut out = SplitIndices {
        train: Vec::new(),
        val: Vec::new(),
        test: Vec::new(),
    };
    for stratum in 0..n_strata {
        let mut rows: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == stratum).collect();
        if rows.is_empty() {
            continue;
        }
        let [a, b, _] = allocate_three_way(rows.len(), spec.fractions()).ok_or_else(|| {
            DatasetError::CategoryTooSmall {
                category: stratum_name(stratum),
                count: rows.len(),
            }
        })?;
        rows.shuffle(&mut rng);
        out.train.extend_from_slice(&rows[..a]);
        out.val.extend_from_slice(&rows[a..a + b]);
        out.test.extend_from_slice(&rows[a + b..]);
    }
    out.train.sort_unstable();
    out.val.sort_unstable();
    out.test.sort_unstable();
    Ok(out)
}

/// Draws `fraction` of each stratum (largest-remainder rounding); sorted indices.
pub fn stratified_subsample(labels: &[usize], n_strata: usize, fraction: f64, seed: u64) -> Vec<usize> {
    assert!(fraction > 0.0 && fraction <= 1.0, "subsample fraction must be in (0, 1]");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut keep = Vec::new();
    for stratum in 0..n_strata {
        let mut rows: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == stratum).collect();
        let [take, _] = apportion(rows.len(), [fraction, 1.0 - fraction]);
        rows.shuffle(&mut rng);
        keep.extend_from_slice(&rows[..take]);
    }
    keep.sort_unstable();
    keep
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn name(i: usize) -> String {
        format!("class{i}")
    }

    #[test]
    fn single_class_exact_split() {
        let labels = vec![0; 100];
        for seed in [0, 1, 99] {
            let spec = SplitSpec::new(0.7, 0.15, 0.15, seed).unwrap();
            let s = stratified_split(&labels, 1, &spec, name).unwrap();
            assert_eq!((s.train.len(), s.val.len(), s.test.len()), (70, 15, 15));
        }
    }

    #[test]
    fn minority_class_lands_in_test() {
        let labels: Vec<usize> = (0..100).map(|i| usize::from(i >= 90)).collect();
        let spec = SplitSpec::new(0.8, 0.1, 0.1, 5).unwrap();
        let s = stratified_split(&labels, 2, &spec, name).unwrap();
        assert_eq!(s.test.iter().filter(|&&i| labels[i] == 1).count(), 1);
        assert_eq!(s.val.iter().filter(|&&i| labels[i] == 1).count(), 1);
    }

    #[test]
    fn same_seed_same_split() {
        let labels: Vec<usize> = (0..500).map(|i| i % 3).collect();
        let spec = SplitSpec::new(0.6, 0.2, 0.2, 42).unwrap();
        let a = stratified_split(&labels, 3, &spec, name).unwrap();
        let b = stratified_split(&labels, 3, &spec, name).unwrap();
        assert_eq!(a, b);
        let other = SplitSpec { seed: 43, ..spec };
        assert_ne!(a, stratified_split(&labels, 3, &other, name).unwrap());
    }

    #[test]
    fn tiny_category_reported() {
        let labels = vec![0, 0, 0, 0, 1, 1];
        let spec = SplitSpec::new(0.7, 0.15, 0.15, 0).unwrap();
        match stratified_split(&labels, 2, &spec, name) {
            Err(DatasetError::CategoryTooSmall { category, count }) => {
                assert_eq!((category.as_str(), count), ("class1", 2));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn three_rows_fill_every_split() {
        assert_eq!(allocate_three_way(3, [0.7, 0.15, 0.15]), Some([1, 1, 1]));
        assert_eq!(allocate_three_way(5, [0.7, 0.15, 0.15]), Some([3, 1, 1]));
    }

    #[test]
    fn invalid_fractions_rejected() {
        assert!(SplitSpec::new(0.7, 0.3, 0.0, 0).is_err());
        assert!(SplitSpec::new(0.7, 0.2, 0.2, 0).is_err());
    }

    #[test]
    fn subsample_keeps_proportions() {
        let labels: Vec<usize> = (0..1000).map(|i| usize::from(i % 10 == 0)).collect();
        let keep = stratified_subsample(&labels, 2, 0.1, 3);
        assert_eq!(keep.len(), 100);
        assert_eq!(keep.iter().filter(|&&i| labels[i] == 1).count(), 10);
    }

    // Independent oracle: brute-force the apportionment that minimises the
    // maximum deviation from quota, with the lexicographic tie-break.
    fn brute_apportion(count: usize, f: [f64; 3]) -> [usize; 3] {
        let mut best = [0; 3];
        let mut best_key = (f64::INFINITY, f64::INFINITY);
        for a in 0..=count {
            for b in 0..=count - a {
                let c = count - a - b;
                let dev: Vec<f64> = [a, b, c].iter().zip(f).map(|(&s, fr)| (s as f64 - fr * count as f64).abs()).collect();
                let key = (dev.iter().cloned().fold(0.0, f64::max), dev.iter().sum());
                if key.0 < best_key.0 - 1e-12 || ((key.0 - best_key.0).abs() <= 1e-12 && key.1 < best_key.1 - 1e-12) {
                    best_key = key;
                    best = [a, b, c];
                }
            }
        }
        best
    }

    #[test]
    fn apportion_matches_min_deviation_oracle() {
        for count in 1..60 {
            for f in [[0.7, 0.15, 0.15], [0.8, 0.1, 0.1], [0.5, 0.3, 0.2]] {
                let got = apportion(count, f);
                let want = brute_apportion(count, f);
                let dev = |s: [usize; 3]| -> f64 {
                    s.iter().zip(f).map(|(&x, fr)| (x as f64 - fr * count as f64).abs()).fold(0.0, f64::max)
                };
                assert!((dev(got) - dev(want)).abs() < 1e-9, "count {count} f {f:?}: {got:?} vs {want:?}");
                assert_eq!(got.iter().sum::<usize>(), count);
            }
        }
    }

    proptest! {
        #[test]
        fn split_is_a_stratified_partition(
            counts in proptest::collection::vec(7usize..200, 1..5),
            seed in any::<u64>(),
        ) {
            let labels: Vec<usize> = counts.iter().enumerate().flat_map(|(c, &n)| std::iter::repeat_n(c, n)).collect();
            let spec = SplitSpec::new(0.7, 0.15, 0.15, seed).unwrap();
            let s = stratified_split(&labels, counts.len(), &spec, name).unwrap();
            let mut all: Vec<usize> = s.train.iter().chain(&s.val).chain(&s.test).copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..labels.len()).collect::<Vec<_>>());
            for (c, &n) in counts.iter().enumerate() {
                for (part, frac) in [(&s.train, 0.7), (&s.val, 0.15), (&s.test, 0.15)] {
                    let k = part.iter().filter(|&&i| labels[i] == c).count();
                    prop_assert!((k as f64 / n as f64 - frac).abs() <= 1.0 / n as f64 + 1e-12);
                }
            }
        }
    }
}
