//! Equation states: `(LHS, RHS)` tuples with an LHS index.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{self, Expr, ExprKind, ParseError, SymbolSet};

/// Role of a state in a derivation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateType {
    Integrative,
    Consequent,
    Terminal,
    Dummy,
}

impl StateType {
    pub const RECORDED: [StateType; 3] =
        [StateType::Integrative, StateType::Consequent, StateType::Terminal];

    pub fn as_str(self) -> &'static str {
        match self {
            StateType::Integrative => "integrative",
            StateType::Consequent => "consequent",
            StateType::Terminal => "terminal",
            StateType::Dummy => "dummy",
        }
    }
}

impl fmt::Display for StateType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StateType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "integrative" => Ok(StateType::Integrative),
            "consequent" => Ok(StateType::Consequent),
            "terminal" => Ok(StateType::Terminal),
            "dummy" => Ok(StateType::Dummy),
            other => Err(format!("unknown state type {other:?}")),
        }
    }
}

/// Action category, determined by the kind of non-state argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ActionCategory {
    #[serde(rename = "self-state")]
    SelfState,
    #[serde(rename = "symbol-state")]
    SymbolState,
    #[serde(rename = "equation-state")]
    EquationState,
}

impl ActionCategory {
    pub const ALL: [ActionCategory; 3] =
        [ActionCategory::SelfState, ActionCategory::SymbolState, ActionCategory::EquationState];

    pub fn as_str(self) -> &'static str {
        match self {
            ActionCategory::SelfState => "self-state",
            ActionCategory::SymbolState => "symbol-state",
            ActionCategory::EquationState => "equation-state",
        }
    }
}

impl fmt::Display for ActionCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ActionCategory {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm: String = s
            .trim()
            .to_ascii_lowercase()
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect();
        match norm.as_str() {
            "selfstate" | "self" => Ok(ActionCategory::SelfState),
            "symbolstate" | "symbol" => Ok(ActionCategory::SymbolState),
            "equationstate" | "equation" => Ok(ActionCategory::EquationState),
            _ => Err(format!("unknown action type {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StateParseError {
    #[error("expected \"LHS = RHS\"")]
    MissingEquals,
    #[error("left-hand side: {0}")]
    Lhs(ParseError),
    #[error("right-hand side: {0}")]
    Rhs(ParseError),
}

/// One equational state.
///
/// Equality, hashing and rendering consider `lhs`, `rhs` and `lhs_index`;
/// `state_type` is an annotation.
#[derive(Clone)]
pub struct EquationState {
    pub lhs: Expr,
    pub rhs: Expr,
    pub lhs_index: u32,
    pub state_type: StateType,
}

impl EquationState {
    pub fn new(lhs: Expr, rhs: Expr) -> Self {
        EquationState { lhs, rhs, lhs_index: 0, state_type: StateType::Consequent }
    }

    pub fn with_index(mut self, index: u32) -> Self {
        self.lhs_index = index;
        self
    }

    pub fn with_type(mut self, state_type: StateType) -> Self {
        self.state_type = state_type;
        self
    }

    /// The neutral starting state `(x, ?)`.
    pub fn dummy_head() -> Self {
        EquationState::new(Expr::symbol("x"), Expr::placeholder()).with_type(StateType::Dummy)
    }

    /// Parses `"LHS = RHS"`, where the LHS may carry an index suffix `^(k)`.
    pub fn parse(text: &str) -> Result<Self, StateParseError> {
        let (lhs, rhs) = text.split_once('=').ok_or(StateParseError::MissingEquals)?;
        let mut lhs = lhs.trim();
        let mut index = 0;
        if let Some(stripped) = lhs.strip_suffix(')') {
            if let Some(at) = stripped.rfind("^(") {
                if let Ok(k) = stripped[at + 2..].parse::<u32>() {
                    index = k;
                    lhs = stripped[..at].trim_end();
                }
            }
        }
        let lhs = expr::parse(lhs).map_err(StateParseError::Lhs)?;
        let rhs = expr::parse(rhs).map_err(StateParseError::Rhs)?;
        Ok(EquationState::new(lhs, rhs).with_index(index))
    }

    fn lhs_is_atomic(&self) -> bool {
        matches!(self.lhs.kind(), ExprKind::Symbol(_) | ExprKind::Func(..) | ExprKind::Placeholder)
    }

    pub fn lhs_text(&self) -> String {
        if self.lhs_index == 0 {
            self.lhs.text().to_string()
        } else if self.lhs_is_atomic() {
            format!("{}^({})", self.lhs.text(), self.lhs_index)
        } else {
            format!("({})^({})", self.lhs.text(), self.lhs_index)
        }
    }

    /// Canonical text rendering, `"LHS = RHS"`.
    pub fn text(&self) -> String {
        format!("{} = {}", self.lhs_text(), self.rhs.text())
    }

    pub fn latex(&self) -> String {
        let lhs = self.lhs.latex();
        let lhs = match (self.lhs_index, self.lhs_is_atomic()) {
            (0, _) => lhs,
            (k, true) => format!("{lhs}^{{({k})}}"),
            (k, false) => format!("\\left({lhs}\\right)^{{({k})}}"),
        };
        format!("{lhs} = {}", self.rhs.latex())
    }

    pub fn tree(&self) -> String {
        let lhs = match self.lhs_index {
            0 => self.lhs.tree(),
            k => format!("Indexed({}, {k})", self.lhs.tree()),
        };
        format!("Eq({lhs}, {})", self.rhs.tree())
    }

    pub fn render(&self, form: Rendering) -> String {
        match form {
            Rendering::Text => self.text(),
            Rendering::Latex => self.latex(),
        }
    }

    /// Same state with the index dropped.
    pub fn strip_index(&self) -> Self {
        self.clone().with_index(0)
    }

    /// Equal up to the LHS index.
    pub fn same_equation(&self, other: &Self) -> bool {
        self.lhs == other.lhs && self.rhs == other.rhs
    }

    pub fn symbols(&self) -> SymbolSet {
        let mut s = self.lhs.symbols();
        s.extend(&self.rhs.symbols());
        s
    }

    /// Distinct subtrees of both sides.
    pub fn subexpressions(&self) -> Vec<Expr> {
        let mut all = self.lhs.subexpressions();
        all.extend(self.rhs.subexpressions());
        all.sort();
        all.dedup();
        all
    }
}

impl PartialEq for EquationState {
    fn eq(&self, other: &Self) -> bool {
        self.lhs_index == other.lhs_index && self.lhs == other.lhs && self.rhs == other.rhs
    }
}

impl Eq for EquationState {}

impl std::hash::Hash for EquationState {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.lhs.hash(state);
        self.rhs.hash(state);
        self.lhs_index.hash(state);
    }
}

impl fmt::Display for EquationState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text())
    }
}

impl fmt::Debug for EquationState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EquationState({} [{}])", self.text(), self.state_type)
    }
}

impl Serialize for EquationState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.text())
    }
}

impl<'de> Deserialize<'de> for EquationState {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        EquationState::parse(&text).map_err(serde::de::Error::custom)
    }
}

/// Which string form of a state feeds the similarity measure.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rendering {
    #[default]
    Text,
    Latex,
}

impl FromStr for Rendering {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(Rendering::Text),
            "latex" => Ok(Rendering::Latex),
            other => Err(format!("unknown rendering {other:?}")),
        }
    }
}
