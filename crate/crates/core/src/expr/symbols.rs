use std::collections::btree_set;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

/// Set of non-numeric symbol names.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SymbolSet(BTreeSet<String>);

impl SymbolSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: String) -> bool {
        self.0.insert(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.contains(name)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> btree_set::Iter<'_, String> {
        self.0.iter()
    }

    pub fn extend(&mut self, other: &SymbolSet) {
        self.0.extend(other.0.iter().cloned());
    }

    pub fn union(&self, other: &SymbolSet) -> SymbolSet {
        SymbolSet(self.0.union(&other.0).cloned().collect())
    }

    pub fn difference(&self, other: &SymbolSet) -> SymbolSet {
        SymbolSet(self.0.difference(&other.0).cloned().collect())
    }

    pub fn symmetric_difference(&self, other: &SymbolSet) -> SymbolSet {
        SymbolSet(self.0.symmetric_difference(&other.0).cloned().collect())
    }
}

impl FromIterator<String> for SymbolSet {
    fn from_iter<I: IntoIterator<Item = String>>(iter: I) -> Self {
        SymbolSet(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a SymbolSet {
    type Item = &'a String;
    type IntoIter = btree_set::Iter<'a, String>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}
