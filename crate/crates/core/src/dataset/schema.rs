//! Column layout of an NSL-KDD connection record.

/// How a raw column is parsed and validated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureKind {
    /// Any finite number (durations, byte counts, counters, flags).
    Continuous,
    /// A finite number that must lie in `[0, 1]`.
    Rate,
    /// A non-empty symbolic value, one-hot encoded downstream.
    Categorical,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureDef {
    pub name: &'static str,
    pub kind: FeatureKind,
}

/// Ordered feature definitions. The order is the on-disk column order and
/// also the order of the encoded continuous block and one-hot blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureSchema {
    features: Vec<FeatureDef>,
}

const NSL_KDD_COLUMNS: [(&str, FeatureKind); 41] = {
    use FeatureKind::*;
    [
        ("duration", Continuous),
        ("protocol_type", Categorical),
        ("service", Categorical),
        ("flag", Categorical),
        ("src_bytes", Continuous),
        ("dst_bytes", Continuous),
        ("land", Continuous),
        ("wrong_fragment", Continuous),
        ("urgent", Continuous),
        ("hot", Continuous),
        ("num_failed_logins", Continuous),
        ("logged_in", Continuous),
        ("num_compromised", Continuous),
        ("root_shell", Continuous),
        ("su_attempted", Continuous),
        ("num_root", Continuous),
        ("num_file_creations", Continuous),
        ("num_shells", Continuous),
        ("num_access_files", Continuous),
        ("num_outbound_cmds", Continuous),
        ("is_host_login", Continuous),
        ("is_guest_login", Continuous),
        ("count", Continuous),
        ("srv_count", Continuous),
        ("serror_rate", Rate),
        ("srv_serror_rate", Rate),
        ("rerror_rate", Rate),
        ("srv_rerror_rate", Rate),
        ("same_srv_rate", Rate),
        ("diff_srv_rate", Rate),
        ("srv_diff_host_rate", Rate),
        ("dst_host_count", Continuous),
        ("dst_host_srv_count", Continuous),
        ("dst_host_same_srv_rate", Rate),
        ("dst_host_diff_srv_rate", Rate),
        ("dst_host_same_src_port_rate", Rate),
        ("dst_host_srv_diff_host_rate", Rate),
        ("dst_host_serror_rate", Rate),
        ("dst_host_srv_serror_rate", Rate),
        ("dst_host_rerror_rate", Rate),
        ("dst_host_srv_rerror_rate", Rate),
    ]
};

impl FeatureSchema {
    /// The published 41-column NSL-KDD layout.
    pub fn nsl_kdd() -> Self {
        Self {
            features: NSL_KDD_COLUMNS
                .iter()
                .map(|&(name, kind)| FeatureDef { name, kind })
                .collect(),
        }
    }

    pub fn features(&self) -> &[FeatureDef] {
        &self.features
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn continuous(&self) -> impl Iterator<Item = &FeatureDef> {
        self.features
            .iter()
            .filter(|f| f.kind != FeatureKind::Categorical)
    }

    pub fn categorical(&self) -> impl Iterator<Item = &FeatureDef> {
        self.features
            .iter()
            .filter(|f| f.kind == FeatureKind::Categorical)
    }

    pub fn n_continuous(&self) -> usize {
        self.continuous().count()
    }

    pub fn n_categorical(&self) -> usize {
        self.categorical().count()
    }
}

impl Default for FeatureSchema {
    fn default() -> Self {
        Self::nsl_kdd()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nsl_kdd_has_38_numeric_and_3_categorical() {
        let schema = FeatureSchema::nsl_kdd();
        assert_eq!(schema.len(), 41);
        assert_eq!(schema.n_continuous(), 38);
        let cats: Vec<_> = schema.categorical().map(|f| f.name).collect();
        assert_eq!(cats, ["protocol_type", "service", "flag"]);
    }
}
