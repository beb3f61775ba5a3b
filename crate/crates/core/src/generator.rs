//! Synthetic derivations by random walks over the action set, and a replay
//! audit for recorded sequences.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::action::{find_action, Action, Nsa, CONSIDER_KB, REMOVE_INDEX};
use crate::dataset::{DerivationRecord, DerivationSequence};
use crate::expr::SymbolSet;
use crate::state::{ActionCategory, EquationState, StateType};

pub const MIN_LENGTH: usize = 3;
pub const DEFAULT_MAX_STATE_CHARS: usize = 160;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub seeds: Vec<EquationState>,
    /// Number of recorded states.
    pub length: usize,
    /// Probability of `consider_kb_equation` at each step after the first.
    pub branch_p: f64,
    pub rng_seed: u64,
    /// States with longer text renderings are never chosen.
    pub max_state_chars: usize,
}

impl GenConfig {
    pub fn new(seeds: Vec<EquationState>, length: usize, branch_p: f64, rng_seed: u64) -> Self {
        GenConfig { seeds, length, branch_p, rng_seed, max_state_chars: DEFAULT_MAX_STATE_CHARS }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("at least one seed equation is required")]
    NoSeeds,
    #[error("the action set must contain {0}")]
    MissingAction(&'static str),
    #[error("walk length {0} is below the minimum of {MIN_LENGTH}")]
    TooShort(usize),
    #[error("branch probability {0} outside [0, 1]")]
    BranchP(f64),
    #[error("walk stalled at step {step}: no action changes {state}")]
    Stalled { step: usize, state: String },
}

struct Step {
    state: EquationState,
    action: &'static str,
    category: ActionCategory,
    nsa: Nsa,
}

fn equation_pool(seeds: &[EquationState], before: &[Step]) -> Vec<EquationState> {
    let mut seen = HashSet::new();
    seeds
        .iter()
        .chain(before.iter().map(|s| &s.state))
        .filter(|s| seen.insert(s.strip_index().text()))
        .cloned()
        .collect()
}

/// Walks `cfg.length` steps from the dummy head. The first step and every
/// branch step apply `consider_kb_equation`; the others pick uniformly among
/// the (action, NSA) pairs that change the current state. NSAs come from the
/// seeds and the states before the current one, so every unit of the result
/// can be reconstructed from its own history.
pub fn generate(cfg: &GenConfig, actions: &[Action]) -> Result<DerivationSequence, GenError> {
    if cfg.seeds.is_empty() {
        return Err(GenError::NoSeeds);
    }
    if cfg.length < MIN_LENGTH {
        return Err(GenError::TooShort(cfg.length));
    }
    if !(0.0..=1.0).contains(&cfg.branch_p) {
        return Err(GenError::BranchP(cfg.branch_p));
    }
    let consider = find_action(actions, CONSIDER_KB).ok_or(GenError::MissingAction(CONSIDER_KB))?;
    let mut sorted = actions.to_vec();
    sorted.sort_by_key(|a| a.name());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let fits = |s: &EquationState| s.text().chars().count() <= cfg.max_state_chars;

    let mut steps: Vec<Step> = Vec::with_capacity(cfg.length);
    let seed = cfg.seeds.choose(&mut rng).expect("non-empty").clone();
    let nsa = Nsa::Equation(seed);
    steps.push(Step {
        state: consider.apply_unchecked(&EquationState::dummy_head(), &nsa),
        action: consider.name(),
        category: consider.category(),
        nsa,
    });

    while steps.len() < cfg.length {
        let (before, current) = steps.split_at(steps.len() - 1);
        let current = &current[0].state;
        let pool = equation_pool(&cfg.seeds, before);
        let branch = |rng: &mut ChaCha8Rng| -> Option<Step> {
            let options: Vec<(Nsa, EquationState)> = pool
                .iter()
                .map(|e| {
                    let nsa = Nsa::Equation(e.clone());
                    let out = consider.apply_unchecked(current, &nsa);
                    (nsa, out)
                })
                .filter(|(_, out)| out != current && fits(out))
                .collect();
            let (nsa, state) = options.choose(rng)?.clone();
            Some(Step { state, action: consider.name(), category: consider.category(), nsa })
        };
        let next = if rng.gen_bool(cfg.branch_p) {
            branch(&mut rng)
        } else {
            let mut symbols = SymbolSet::new();
            for e in &pool {
                symbols.extend(&e.symbols());
            }
            let mut options = Vec::new();
            for a in sorted.iter().filter(|a| !a.is_consider_kb()) {
                let nsas: Vec<Nsa> = match a.category() {
                    ActionCategory::SelfState => vec![Nsa::None],
                    ActionCategory::SymbolState => {
                        symbols.iter().map(|s| Nsa::Symbol(s.clone())).collect()
                    }
                    ActionCategory::EquationState => {
                        pool.iter().map(|e| Nsa::Equation(e.clone())).collect()
                    }
                };
                for nsa in nsas {
                    let out = a.apply_unchecked(current, &nsa);
                    if out != *current && fits(&out) {
                        options.push((a, nsa, out));
                    }
                }
            }
            match options.choose(&mut rng) {
                Some((a, nsa, state)) => Some(Step {
                    state: state.clone(),
                    action: a.name(),
                    category: a.category(),
                    nsa: nsa.clone(),
                }),
                None if cfg.branch_p > 0.0 => branch(&mut rng),
                None => None,
            }
        };
        match next {
            Some(step) => steps.push(step),
            None => {
                return Err(GenError::Stalled { step: steps.len() + 1, state: current.text() })
            }
        }
    }

    let records = steps
        .iter()
        .map(|s| {
            DerivationRecord::from_state(
                &s.state,
                s.action,
                &s.nsa.text(),
                StateType::Consequent,
                s.category,
            )
        })
        .collect();
    let mut seq = DerivationSequence::new(records);
    seq.annotate();
    Ok(seq)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditIssue {
    /// 1-based record number.
    pub record: usize,
    pub message: String,
}

/// Replays every recorded (action, NSA) from the previous state and checks
/// the result, the category column, the role column and LHS renaming
/// (not required of `remove_index` and `consider_kb_equation`).
pub fn audit(seq: &DerivationSequence, actions: &[Action]) -> Vec<AuditIssue> {
    let mut issues = Vec::new();
    let roles = seq.categorize();
    let mut prev = EquationState::dummy_head();
    for (i, r) in seq.records.iter().enumerate() {
        let record = i + 1;
        let mut issue = |message: String| issues.push(AuditIssue { record, message });
        let state = match r.state() {
            Ok(s) => s,
            Err(e) => {
                issue(format!("state does not parse: {e}"));
                continue;
            }
        };
        if r.state_type() != Some(roles[i]) {
            issue(format!("state type {:?}, expected {}", r.state_type, roles[i]));
        }
        match (find_action(actions, &r.action), Nsa::parse(&r.nsa)) {
            (None, _) => issue(format!("unknown action {:?}", r.action)),
            (_, Err(e)) => issue(format!("NSA does not parse: {e}")),
            (Some(a), Ok(nsa)) => {
                if r.action_type() != Some(a.category()) {
                    issue(format!("action type {:?}, expected {}", r.action_type, a.category()));
                }
                match a.apply(&prev, &nsa) {
                    Err(e) => issue(e.to_string()),
                    Ok(out) if out != state => {
                        issue(format!("replay gives {}, recorded {}", out.text(), state.text()))
                    }
                    Ok(_) => {}
                }
                let renamed = state.lhs_text() != prev.lhs_text();
                let exempt = a.name() == REMOVE_INDEX || a.is_consider_kb();
                if !exempt && state.rhs != prev.rhs && !renamed {
                    issue(format!("RHS changed but LHS {} kept", state.lhs_text()));
                }
            }
        }
        prev = state;
    }
    issues
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::builtin_action_set;

    fn seeds() -> Vec<EquationState> {
        ["H = hbar*omega*(a'@a + 1/2)", "p = hbar*k", "E = p**2/(2*m)"]
            .iter()
            .map(|t| EquationState::parse(t).unwrap())
            .collect()
    }

    #[test]
    fn deterministic_and_replayable() {
        let actions = builtin_action_set();
        let cfg = GenConfig::new(seeds(), 25, 0.2, 7);
        let a = generate(&cfg, &actions).unwrap();
        let b = generate(&cfg, &actions).unwrap();
        assert_eq!(a.to_text(b'\t'), b.to_text(b'\t'));
        assert_eq!(a.len(), 25);
        assert_eq!(audit(&a, &actions), vec![]);
    }

    #[test]
    fn no_branching_means_one_integrative_state() {
        let actions = builtin_action_set();
        let seq = generate(&GenConfig::new(seeds(), 12, 0.0, 3), &actions).unwrap();
        let roles = seq.categorize();
        assert_eq!(roles[0], StateType::Integrative);
        assert!(roles[1..].iter().all(|r| *r != StateType::Integrative));
    }

    #[test]
    fn config_errors() {
        let actions = builtin_action_set();
        assert_eq!(generate(&GenConfig::new(vec![], 5, 0.1, 0), &actions), Err(GenError::NoSeeds));
        assert_eq!(generate(&GenConfig::new(seeds(), 2, 0.1, 0), &actions), Err(GenError::TooShort(2)));
        assert!(generate(&GenConfig::new(seeds(), 5, 1.5, 0), &actions).is_err());
    }
}
