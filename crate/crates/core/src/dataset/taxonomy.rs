use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::DatasetError;

/// Five-class label. Discriminants are the class indices used throughout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category {
    Normal = 0,
    DoS = 1,
    Probe = 2,
    R2L = 3,
    U2R = 4,
}

impl Category {
    pub const ALL: [Category; 5] = [
        Category::Normal,
        Category::DoS,
        Category::Probe,
        Category::R2L,
        Category::U2R,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Category::Normal => "Normal",
            Category::DoS => "DoS",
            Category::Probe => "Probe",
            Category::R2L => "R2L",
            Category::U2R => "U2R",
        }
    }

    pub fn binary(self) -> BinaryLabel {
        match self {
            Category::Normal => BinaryLabel::Normal,
            _ => BinaryLabel::Attack,
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Category {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Category::ALL
            .iter()
            .copied()
            .find(|c| c.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown category `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BinaryLabel {
    Normal = 0,
    Attack = 1,
}

impl BinaryLabel {
    pub const NAMES: [&'static str; 2] = ["Normal", "Attack"];

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Attack name to category table, loaded from a two-column text file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttackTaxonomy {
    table: BTreeMap<String, Category>,
}

/// The taxonomy file shipped with this crate.
pub const BUNDLED_TAXONOMY: &str = include_str!("../../data/attack_taxonomy.csv");

impl AttackTaxonomy {
    pub fn bundled() -> Self {
        Self::parse(BUNDLED_TAXONOMY).expect("bundled taxonomy is well-formed")
    }

    pub fn load(path: &Path) -> Result<Self, DatasetError> {
        let text = std::fs::read_to_string(path).map_err(|source| DatasetError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Lines are `attack_name,category`; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self, DatasetError> {
        let mut table = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |reason: String| DatasetError::Taxonomy { line: i + 1, reason };
            let (name, cat) = line
                .split_once(',')
                .ok_or_else(|| bad("expected `attack_name,category`".into()))?;
            let cat: Category = cat.parse().map_err(bad)?;
            let name = name.trim().to_ascii_lowercase();
            if name.is_empty() {
                return Err(bad("empty attack name".into()));
            }
            if let Some(prev) = table.insert(name.clone(), cat) {
                if prev != cat {
                    return Err(bad(format!("`{name}` mapped to both {prev} and {cat}")));
                }
            }
        }
        if table.is_empty() {
            return Err(DatasetError::Taxonomy {
                line: 0,
                reason: "no entries".into(),
            });
        }
        Ok(Self { table })
    }

    /// Unknown names are an error, never silently Normal.
    pub fn category(&self, attack_name: &str) -> Result<Category, DatasetError> {
        let key = attack_name.trim().trim_end_matches('.').to_ascii_lowercase();
        self.table
            .get(&key)
            .copied()
            .ok_or_else(|| DatasetError::UnknownAttackName(attack_name.to_string()))
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_table_maps_known_names() {
        let tax = AttackTaxonomy::bundled();
        assert_eq!(tax.category("normal").unwrap(), Category::Normal);
        assert_eq!(tax.category("neptune").unwrap(), Category::DoS);
        assert_eq!(tax.category("buffer_overflow").unwrap(), Category::U2R);
        assert_eq!(tax.category("warezclient").unwrap(), Category::R2L);
        assert_eq!(tax.category("satan").unwrap(), Category::Probe);
    }

    #[test]
    fn unknown_name_is_an_error() {
        let tax = AttackTaxonomy::bundled();
        assert!(matches!(
            tax.category("definitely_not_an_attack"),
            Err(DatasetError::UnknownAttackName(_))
        ));
    }

    #[test]
    fn conflicting_entries_rejected() {
        let err = AttackTaxonomy::parse("a,DoS\na,Probe\n").unwrap_err();
        assert!(matches!(err, DatasetError::Taxonomy { line: 2, .. }));
    }

    #[test]
    fn binary_label_follows_category() {
        for c in Category::ALL {
            assert_eq!(c.binary() == BinaryLabel::Normal, c == Category::Normal);
        }
    }
}
