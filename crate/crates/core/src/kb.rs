//! The knowledge base `K = L ∪ R` that supplies NSAs to the search.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::action::Nsa;
use crate::expr::SymbolSet;
use crate::state::{ActionCategory, EquationState, StateParseError, StateType};

#[derive(Debug, Error)]
pub enum KbError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}:{line}: {source}")]
    Parse { path: String, line: usize, source: StateParseError },
}

/// Immutable once built.
#[derive(Debug, Clone, Default)]
pub struct KnowledgeBase {
    requisite: Vec<EquationState>,
    history: Vec<EquationState>,
    symbol_pool: SymbolSet,
    equation_pool: Vec<EquationState>,
}

fn usable(s: &EquationState) -> bool {
    s.state_type != StateType::Dummy
        && !s.lhs.contains_placeholder()
        && !s.rhs.contains_placeholder()
}

impl KnowledgeBase {
    /// `R` is the requisite equations followed by the history, with repeats
    /// (up to the LHS index) and dummy states dropped. `L` holds the symbols
    /// of `R` plus the symmetric difference of the endpoint symbol sets.
    pub fn build(
        requisite: &[EquationState],
        history: &[EquationState],
        s_prev: &EquationState,
        s_next: &EquationState,
    ) -> KnowledgeBase {
        let mut seen = HashSet::new();
        let mut equation_pool = Vec::new();
        for s in requisite.iter().chain(history).filter(|s| usable(s)) {
            if seen.insert(s.strip_index().text()) {
                equation_pool.push(s.clone());
            }
        }
        let mut symbol_pool = s_prev.symbols().symmetric_difference(&s_next.symbols());
        for s in &equation_pool {
            symbol_pool.extend(&s.symbols());
        }
        KnowledgeBase {
            requisite: requisite.to_vec(),
            history: history.to_vec(),
            symbol_pool,
            equation_pool,
        }
    }

    pub fn requisite(&self) -> &[EquationState] {
        &self.requisite
    }

    pub fn history(&self) -> &[EquationState] {
        &self.history
    }

    /// `L`.
    pub fn symbol_pool(&self) -> &SymbolSet {
        &self.symbol_pool
    }

    /// `R`.
    pub fn equation_pool(&self) -> &[EquationState] {
        &self.equation_pool
    }

    /// `|K| = |L| + |R|`.
    pub fn size(&self) -> usize {
        self.symbol_pool.len() + self.equation_pool.len()
    }

    /// Candidate NSAs for one category, sorted by text.
    pub fn nsa_candidates(&self, category: ActionCategory) -> Vec<Nsa> {
        let mut out: Vec<Nsa> = match category {
            ActionCategory::SelfState => vec![Nsa::None],
            ActionCategory::SymbolState => {
                self.symbol_pool.iter().map(|s| Nsa::Symbol(s.clone())).collect()
            }
            ActionCategory::EquationState => {
                self.equation_pool.iter().map(|e| Nsa::Equation(e.clone())).collect()
            }
        };
        out.sort_by_cached_key(Nsa::text);
        out
    }
}

/// Parses a KB file: one `LHS = RHS` per line; blank lines and lines
/// starting with `#` are skipped.
pub fn parse_kb(text: &str, origin: &str) -> Result<Vec<EquationState>, KbError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let s = EquationState::parse(line).map_err(|source| KbError::Parse {
            path: origin.to_string(),
            line: i + 1,
            source,
        })?;
        out.push(s);
    }
    Ok(out)
}

pub fn load_kb(path: &Path) -> Result<Vec<EquationState>, KbError> {
    let origin = path.display().to_string();
    let text = fs::read_to_string(path)
        .map_err(|source| KbError::Io { path: origin.clone(), source })?;
    parse_kb(&text, &origin)
}
