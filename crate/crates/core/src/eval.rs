//! Evaluation over every derivation unit of a sequence.
//!
//! A reconstruction succeeds when `M(s_hat, s_i) <= eta * eps_low`, where
//! `eps_low = M(s_N, s_{N-1})` compares the closing dummy state with the last
//! recorded one.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::action::{is_consider_kb_name, Action};
use crate::dataset::{DatasetError, DerivationSequence};
use crate::kb::KnowledgeBase;
use crate::scalar::Real;
use crate::search::{reconstruct, DerivationUnit, SearchConfig, SearchError};
use crate::state::{ActionCategory, EquationState, StateType};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error("eta must be finite and non-negative, got {0}")]
    Eta(f64),
}

/// `M(s_N, s_{N-1})` on the configured rendering.
pub fn epsilon_low<F: Real>(
    seq: &DerivationSequence,
    cfg: &SearchConfig,
) -> Result<F, DatasetError> {
    let strings = seq.state_strings(cfg.rendering)?;
    let n = strings.len();
    Ok(cfg.measure.between(&strings[n - 1], &strings[n - 2]))
}

/// Why a reconstruction failed, checked in declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureKind {
    /// `s_next` is integrative, so any first hop can reach it.
    TerminalState,
    /// `s_next` repeats an equation already available in the KB.
    RepeatingEquation,
    /// A zero-distance path exists but runs through another middle state.
    MultiplePathways,
    /// No path reaches `s_next`.
    Unreachable,
}

impl FailureKind {
    pub const ALL: [FailureKind; 4] = [
        FailureKind::TerminalState,
        FailureKind::RepeatingEquation,
        FailureKind::MultiplePathways,
        FailureKind::Unreachable,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FailureKind::TerminalState => "terminal-state",
            FailureKind::RepeatingEquation => "repeating-equation",
            FailureKind::MultiplePathways => "multiple-pathways",
            FailureKind::Unreachable => "unreachable",
        }
    }
}

impl fmt::Display for FailureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Result of one unit, independent of `eta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    /// Position of `s_i` in the padded sequence (1-based record number).
    pub index: usize,
    pub state_type: StateType,
    pub action_type: Option<ActionCategory>,
    /// Action recorded for `s_i`.
    pub true_action: String,
    pub truth: String,
    pub s_hat: String,
    /// `M(s_hat, s_i)`.
    pub distance: f64,
    /// `M(c_end, s_next)` of the chosen path.
    pub end_distance: f64,
    pub heuristic: f64,
    pub first_action: String,
    pub first_nsa: String,
    pub second_action: String,
    pub second_nsa: String,
    pub early_stop: bool,
    pub next_integrative: bool,
    pub next_repeats: bool,
}

impl Outcome {
    pub fn success(&self, epsilon: f64) -> bool {
        self.distance <= epsilon
    }

    pub fn failure(&self, epsilon: f64) -> Option<FailureKind> {
        if self.success(epsilon) {
            None
        } else if self.state_type == StateType::Terminal || self.next_integrative {
            Some(FailureKind::TerminalState)
        } else if self.next_repeats {
            Some(FailureKind::RepeatingEquation)
        } else if self.end_distance == 0.0 {
            Some(FailureKind::MultiplePathways)
        } else {
            Some(FailureKind::Unreachable)
        }
    }
}

/// All unit outcomes of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub measure: String,
    pub epsilon_low: f64,
    pub outcomes: Vec<Outcome>,
}

/// Reconstructs every `s_i`, `i = 1 ..= records`, with the history before
/// `s_i` and the `requisite` equations as knowledge base.
pub fn evaluate<F: Real>(
    seq: &DerivationSequence,
    actions: &[Action],
    requisite: &[EquationState],
    cfg: &SearchConfig,
) -> Result<Evaluation, EvalError> {
    let states = seq.states()?;
    let eps = epsilon_low::<F>(seq, cfg)?;
    let roles = seq.categorize();
    let n = seq.len();
    let outcomes: Result<Vec<Outcome>, SearchError> = (1..=n)
        .into_par_iter()
        .map(|i| {
            let (s_prev, truth, s_next) = (&states[i - 1], &states[i], &states[i + 1]);
            let history = &states[1..i];
            let kb = KnowledgeBase::build(requisite, history, s_prev, s_next);
            let unit = DerivationUnit {
                s_prev: s_prev.clone(),
                s_next: s_next.clone(),
                hidden_truth: Some(truth.clone()),
            };
            let r = reconstruct::<F>(&unit, actions, &kb, cfg)?;
            let distance: F = cfg.measure.between(
                &r.s_hat.render(cfg.rendering),
                &truth.render(cfg.rendering),
            );
            let record = &seq.records[i - 1];
            let next_integrative =
                seq.records.get(i).is_some_and(|r| is_consider_kb_name(&r.action));
            let next_repeats = kb.equation_pool().iter().any(|e| e.same_equation(s_next));
            Ok(Outcome {
                index: i,
                state_type: record.state_type().unwrap_or(roles[i - 1]),
                action_type: record.action_type(),
                true_action: record.action.clone(),
                truth: truth.text(),
                s_hat: r.s_hat.text(),
                distance: distance.to_f64().unwrap(),
                end_distance: r.path.distance.to_f64().unwrap(),
                heuristic: r.path.heuristic.to_f64().unwrap(),
                first_action: r.path.first.action.to_string(),
                first_nsa: r.path.first.nsa.text(),
                second_action: r.path.second.action.to_string(),
                second_nsa: r.path.second.nsa.text(),
                early_stop: r.early_stop,
                next_integrative,
                next_repeats,
            })
        })
        .collect();
    Ok(Evaluation {
        measure: cfg.measure.name().to_string(),
        epsilon_low: eps.to_f64().unwrap(),
        outcomes: outcomes?,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub count: usize,
    pub successes: usize,
}

impl Cell {
    pub fn accuracy(&self) -> Option<f64> {
        (self.count > 0).then(|| self.successes as f64 / self.count as f64)
    }

    fn add(&mut self, success: bool) {
        self.count += 1;
        self.successes += usize::from(success);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitResult {
    pub index: usize,
    pub state_type: StateType,
    pub action_type: Option<ActionCategory>,
    pub success: bool,
    pub distance: f64,
    pub s_hat: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub failure: Option<FailureKind>,
}

/// Aggregate accuracy at one `eta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub measure: String,
    pub eta: f64,
    pub epsilon_low: f64,
    pub epsilon: f64,
    pub total: usize,
    pub successes: usize,
    pub accuracy: Option<f64>,
    /// state type -> action type -> counts.
    pub cells: BTreeMap<String, BTreeMap<String, Cell>>,
    pub failures: BTreeMap<String, usize>,
    pub units: Vec<UnitResult>,
}

const UNKNOWN_ACTION_TYPE: &str = "unknown";

impl Evaluation {
    pub fn report(&self, eta: f64) -> Result<EvalReport, EvalError> {
        if !(eta.is_finite() && eta >= 0.0) {
            return Err(EvalError::Eta(eta));
        }
        let epsilon = eta * self.epsilon_low;
        let mut cells: BTreeMap<String, BTreeMap<String, Cell>> = BTreeMap::new();
        let mut failures = BTreeMap::new();
        let mut units = Vec::with_capacity(self.outcomes.len());
        let mut successes = 0;
        for o in &self.outcomes {
            let success = o.success(epsilon);
            successes += usize::from(success);
            let action_type = o.action_type.map_or(UNKNOWN_ACTION_TYPE, ActionCategory::as_str);
            cells
                .entry(o.state_type.as_str().to_string())
                .or_default()
                .entry(action_type.to_string())
                .or_default()
                .add(success);
            let failure = o.failure(epsilon);
            if let Some(f) = failure {
                *failures.entry(f.as_str().to_string()).or_insert(0) += 1;
            }
            units.push(UnitResult {
                index: o.index,
                state_type: o.state_type,
                action_type: o.action_type,
                success,
                distance: o.distance,
                s_hat: o.s_hat.clone(),
                failure,
            });
        }
        let total = self.outcomes.len();
        Ok(EvalReport {
            measure: self.measure.clone(),
            eta,
            epsilon_low: self.epsilon_low,
            epsilon,
            total,
            successes,
            accuracy: (total > 0).then(|| successes as f64 / total as f64),
            cells,
            failures,
            units,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Table,
    Json,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "table" => Ok(ReportFormat::Table),
            "json" => Ok(ReportFormat::Json),
            other => Err(format!("unknown report format {other:?}")),
        }
    }
}

fn fmt_accuracy(a: Option<f64>) -> String {
    a.map_or_else(|| "-".to_string(), |a| format!("{a:.3}"))
}

impl EvalReport {
    pub fn cell(&self, state_type: &str, action_type: &str) -> Cell {
        self.cells
            .get(state_type)
            .and_then(|m| m.get(action_type))
            .copied()
            .unwrap_or_default()
    }

    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Json => serde_json::to_string(self).expect("report serializes"),
            ReportFormat::Table => self.table(),
        }
    }

    fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# measure={} eta={} eps_low={} eps={} accuracy={} ({}/{})",
            self.measure,
            self.eta,
            self.epsilon_low,
            self.epsilon,
            fmt_accuracy(self.accuracy),
            self.successes,
            self.total
        );
        let columns: Vec<&str> = ActionCategory::ALL.iter().map(|c| c.as_str()).collect();
        let _ = write!(out, "{:<12}", "state");
        for c in &columns {
            let _ = write!(out, " {c:>14}");
        }
        let _ = writeln!(out, " {:>14}", "all");
        for st in StateType::RECORDED {
            let Some(row) = self.cells.get(st.as_str()) else { continue };
            let _ = write!(out, "{:<12}", st.as_str());
            let mut all = Cell::default();
            for c in &columns {
                let cell = row.get(*c).copied().unwrap_or_default();
                all.count += cell.count;
                all.successes += cell.successes;
                let _ = write!(out, " {:>14}", fmt_accuracy(cell.accuracy()));
            }
            if let Some(cell) = row.get(UNKNOWN_ACTION_TYPE) {
                all.count += cell.count;
                all.successes += cell.successes;
            }
            let _ = writeln!(out, " {:>14}", fmt_accuracy(all.accuracy()));
        }
        for (kind, n) in &self.failures {
            let _ = writeln!(out, "# failures {kind}: {n}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn outcome(index: usize, distance: f64, state_type: StateType) -> Outcome {
        Outcome {
            index,
            state_type,
            action_type: Some(ActionCategory::SelfState),
            true_action: "expand_rhs".into(),
            truth: "y = a".into(),
            s_hat: "y = b".into(),
            distance,
            end_distance: 0.0,
            heuristic: 0.0,
            first_action: "expand_rhs".into(),
            first_nsa: String::new(),
            second_action: "expand_rhs".into(),
            second_nsa: String::new(),
            early_stop: true,
            next_integrative: state_type == StateType::Terminal,
            next_repeats: false,
        }
    }

    fn evaluation() -> Evaluation {
        Evaluation {
            measure: "levenshtein".into(),
            epsilon_low: 2.0,
            outcomes: vec![
                outcome(1, 0.0, StateType::Consequent),
                outcome(2, 1.0, StateType::Consequent),
                outcome(3, 0.0, StateType::Consequent),
                outcome(4, 3.0, StateType::Terminal),
            ],
        }
    }

    #[test]
    fn accuracy_ratio() {
        let r = evaluation().report(0.0).unwrap();
        assert_eq!(r.accuracy, Some(0.5));
        assert_eq!(r.failures["multiple-pathways"], 1);
        assert_eq!(r.failures["terminal-state"], 1);
        let r1 = evaluation().report(1.0).unwrap();
        assert_eq!(r1.accuracy, Some(0.75));
        assert!(evaluation().report(-1.0).is_err());
    }

    #[test]
    fn table_formatting() {
        let mut e = evaluation();
        e.outcomes = (0..10).map(|i| outcome(i + 1, if i < 7 { 0.0 } else { 5.0 }, StateType::Consequent)).collect();
        let table = e.report(0.0).unwrap().render(ReportFormat::Table);
        assert!(table.contains("0.700"), "{table}");
        assert!(table.contains(" -"), "{table}");

        let empty = Evaluation { measure: "jaro".into(), epsilon_low: 0.0, outcomes: vec![] };
        let table = empty.report(0.0).unwrap().render(ReportFormat::Table);
        assert_eq!(table.lines().count(), 2, "{table}");
    }

    #[test]
    fn json_round_trip() {
        let r = evaluation().report(1.0).unwrap();
        let json = r.render(ReportFormat::Json);
        let back: EvalReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }
}
