//! Reconstruction of a hidden middle state from its neighbours.
//!
//! Every first hop `a: (s_prev, k) -> c_mid` is scored with the heuristic
//! `H(c_mid, s_next)`. Middle states are expanded in ascending `H`; the first
//! second hop that lands exactly on `s_next` ends the search. Otherwise the
//! path with the smallest end distance wins, ties broken by `H`, then action
//! name and NSA text of each hop.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::action::{Action, Nsa, Shape};
use crate::expr::{self, SymbolSet};
use crate::kb::KnowledgeBase;
use crate::scalar::{Modular, Real};
use crate::similarity::{levenshtein_bounded, Measure};
use crate::state::{ActionCategory, EquationState, Rendering};

pub const DEFAULT_WEIGHT: u32 = 10;
pub const DEFAULT_THRESHOLD: usize = 100;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("the action set is empty")]
    NoActions,
    #[error("at least one intermediate state is required")]
    NoHops,
}

/// Weights `n1, n2, n3` and the small/large subexpression cut-off in
/// characters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeuristicParams {
    pub n1: u32,
    pub n2: u32,
    pub n3: u32,
    pub threshold: usize,
}

impl Default for HeuristicParams {
    fn default() -> Self {
        HeuristicParams {
            n1: DEFAULT_WEIGHT,
            n2: DEFAULT_WEIGHT,
            n3: DEFAULT_WEIGHT,
            threshold: DEFAULT_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Components<F> {
    /// Symbols of `s_next` missing from the candidate.
    pub x: usize,
    /// Closest pair of small subexpressions.
    pub y: F,
    /// Closest pair of large subexpressions.
    pub z: F,
}

impl<F: Real> Components<F> {
    /// `(n1 x)^2 + (n2 y)^2 + (n3 z)^2`.
    pub fn value(&self, p: &HeuristicParams) -> F {
        let w = |n: u32| F::from_u32(n).unwrap();
        let a = w(p.n1) * F::from_count(self.x);
        let b = w(p.n2) * self.y;
        let c = w(p.n3) * self.z;
        a * a + b * b + c * c
    }
}

fn split_subexpressions(s: &EquationState, threshold: usize) -> (Vec<String>, Vec<String>) {
    let (mut small, mut large) = (Vec::new(), Vec::new());
    for e in s.subexpressions() {
        let text = e.text().to_string();
        if text.chars().count() <= threshold {
            small.push(text);
        } else {
            large.push(text);
        }
    }
    (small, large)
}

struct Pool {
    set: HashSet<String>,
    chars: Vec<Vec<char>>,
}

impl Pool {
    fn new(texts: Vec<String>) -> Pool {
        let mut chars: Vec<Vec<char>> = texts.iter().map(|t| t.chars().collect()).collect();
        chars.sort_by_key(Vec::len);
        Pool { set: texts.into_iter().collect(), chars }
    }

    /// Smallest Levenshtein distance between any string of `other` and any
    /// string of the pool.
    fn closest(&self, other: &[String]) -> Option<usize> {
        if self.chars.is_empty() || other.is_empty() {
            return None;
        }
        if other.iter().any(|t| self.set.contains(t)) {
            return Some(0);
        }
        let mut best = usize::MAX;
        for t in other {
            let a: Vec<char> = t.chars().collect();
            for b in &self.chars {
                if best == 0 {
                    return Some(0);
                }
                if a.len().abs_diff(b.len()) >= best {
                    continue;
                }
                if let Some(d) = levenshtein_bounded(&a, b, best - 1) {
                    best = d;
                }
            }
        }
        Some(best)
    }
}

/// Precomputed data about `s_next`.
pub struct Target {
    state: EquationState,
    text: Vec<char>,
    rendered: String,
    rendered_chars: Vec<char>,
    form: Rendering,
    symbols: SymbolSet,
    threshold: usize,
    small: Pool,
    large: Pool,
}

impl Target {
    pub fn new(state: &EquationState, threshold: usize, form: Rendering) -> Target {
        let (small, large) = split_subexpressions(state, threshold);
        let rendered = state.render(form);
        Target {
            state: state.clone(),
            text: state.text().chars().collect(),
            rendered_chars: rendered.chars().collect(),
            rendered,
            form,
            symbols: state.symbols(),
            threshold,
            small: Pool::new(small),
            large: Pool::new(large),
        }
    }

    pub fn state(&self) -> &EquationState {
        &self.state
    }

    /// Exact match in the measure's rendering.
    fn is_hit(&self, s: &EquationState) -> bool {
        match self.form {
            Rendering::Text => *s == self.state,
            Rendering::Latex => s.latex() == self.rendered,
        }
    }

    fn distance<F: Real>(&self, m: &Measure, s: &EquationState, bound: Option<F>) -> Option<F> {
        if self.is_hit(s) {
            return Some(F::zero());
        }
        let chars: Vec<char> = s.render(self.form).chars().collect();
        if let Some(b) = bound {
            if m.length_bound::<F>(chars.len(), self.rendered_chars.len()) > b {
                return None;
            }
        }
        m.between_bounded(&chars, &self.rendered_chars, bound)
    }

    pub fn components<F: Real>(&self, c: &EquationState) -> Components<F> {
        let x = self.symbols.difference(&c.symbols()).len();
        let (small, large) = split_subexpressions(c, self.threshold);
        let whole = || {
            let text: Vec<char> = c.text().chars().collect();
            levenshtein_bounded(&text, &self.text, usize::MAX).unwrap()
        };
        let mut fallback = None;
        let mut component = |pool: &Pool, subs: &[String]| {
            let d = pool.closest(subs).unwrap_or_else(|| *fallback.get_or_insert_with(whole));
            F::from_count(d)
        };
        let y = component(&self.small, &small);
        let z = component(&self.large, &large);
        Components { x, y, z }
    }
}

/// `(x, y, z)` for a candidate against `s_next`.
pub fn heuristic_components<F: Real>(
    c: &EquationState,
    s_next: &EquationState,
    threshold: usize,
) -> Components<F> {
    Target::new(s_next, threshold, Rendering::Text).components(c)
}

pub fn heuristic<F: Real>(c: &EquationState, s_next: &EquationState, p: &HeuristicParams) -> F {
    heuristic_components::<F>(c, s_next, p.threshold).value(p)
}

/// `{s_prev, s_i, s_next}` with `s_i` hidden.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivationUnit {
    pub s_prev: EquationState,
    pub s_next: EquationState,
    pub hidden_truth: Option<EquationState>,
}

impl DerivationUnit {
    pub fn new(s_prev: EquationState, s_next: EquationState) -> Self {
        DerivationUnit { s_prev, s_next, hidden_truth: None }
    }

    /// Both ends render identically.
    pub fn is_degenerate(&self) -> bool {
        self.s_prev == self.s_next
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Step {
    pub action: &'static str,
    pub category: ActionCategory,
    pub nsa: Nsa,
}

impl Step {
    fn new(a: &Action, nsa: &Nsa) -> Step {
        Step { action: a.name(), category: a.category(), nsa: nsa.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidatePath<F> {
    pub first: Step,
    pub c_mid: EquationState,
    /// Further intermediate states when searching more than one hop deep.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub via: Vec<(Step, EquationState)>,
    pub second: Step,
    pub c_end: EquationState,
    pub heuristic: F,
    pub distance: F,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Reconstruction<F> {
    pub s_hat: EquationState,
    pub path: CandidatePath<F>,
    /// First-hop (action, NSA) pairs tried.
    pub first_hops: usize,
    /// Distinct middle states after merging identical outputs.
    pub distinct_mids: usize,
    /// Second-hop (action, NSA) pairs per middle state.
    pub second_hops: usize,
    pub early_stop: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub measure: Measure,
    pub params: HeuristicParams,
    /// Rendering compared by the measure. The heuristic always uses text.
    pub rendering: Rendering,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            measure: Measure::DamerauLevenshtein,
            params: HeuristicParams::default(),
            rendering: Rendering::Text,
        }
    }
}

/// One first hop.
#[derive(Debug, Clone)]
pub struct Candidate {
    pub action: Action,
    pub nsa: Nsa,
    pub state: EquationState,
}

/// Every (action, NSA) pair with a matching NSA, ordered by action name and
/// NSA text.
pub fn action_pairs(actions: &[Action], kb: &KnowledgeBase) -> Vec<(Action, Nsa)> {
    let mut sorted = actions.to_vec();
    sorted.sort_by_key(|a| a.name());
    let by_category: HashMap<ActionCategory, Vec<Nsa>> =
        ActionCategory::ALL.iter().map(|&c| (c, kb.nsa_candidates(c))).collect();
    sorted
        .iter()
        .flat_map(|a| by_category[&a.category()].iter().map(move |n| (*a, n.clone())))
        .collect()
}

/// Applies every pair to `s_prev`. Outputs equal to `s_prev` are kept once.
pub fn generate_candidates(
    s_prev: &EquationState,
    actions: &[Action],
    kb: &KnowledgeBase,
) -> Vec<Candidate> {
    let mut noop_seen = false;
    let mut out = Vec::new();
    for (action, nsa) in action_pairs(actions, kb) {
        let state = action.apply_unchecked(s_prev, &nsa);
        if state == *s_prev {
            if noop_seen {
                continue;
            }
            noop_seen = true;
        }
        out.push(Candidate { action, nsa, state });
    }
    out
}

/// Whether applying `a` to `mid` could give `target`, judged from the LHS
/// and index alone.
fn may_reach(a: &Action, mid: &EquationState, target: &EquationState) -> bool {
    if mid == target {
        return true;
    }
    match a.shape() {
        Shape::Rhs => mid.lhs == target.lhs && target.lhs_index == mid.lhs_index + 1,
        Shape::Both => target.lhs_index == mid.lhs_index + 1,
        Shape::Replace if a.is_consider_kb() => true,
        Shape::Replace => target.lhs_index == 0 && mid.same_equation(target),
    }
}

struct Mid<F> {
    candidate: Candidate,
    heuristic: F,
}

fn symbol_value(name: &str) -> Option<Modular> {
    Some(Modular::of_name(name))
}

fn fingerprint(e: &crate::expr::Expr) -> Option<Modular> {
    expr::eval(e, &symbol_value)
}

struct Plan<'a, F> {
    target: Target,
    target_value: Option<Modular>,
    /// Fingerprint of each second-hop NSA: a symbol's value or an
    /// equation's RHS.
    nsa_values: Vec<Option<Modular>>,
    mids: Vec<Mid<F>>,
    second: Vec<(Action, Nsa)>,
    /// Outputs of `consider_kb_equation` second hops, which ignore their input.
    fixed: HashMap<usize, EquationState>,
    first_hops: usize,
    cfg: &'a SearchConfig,
}

impl<'a, F: Real> Plan<'a, F> {
    fn new(
        unit: &DerivationUnit,
        actions: &[Action],
        kb: &KnowledgeBase,
        cfg: &'a SearchConfig,
    ) -> Result<Self, SearchError> {
        if actions.is_empty() {
            return Err(SearchError::NoActions);
        }
        let target = Target::new(&unit.s_next, cfg.params.threshold, cfg.rendering);
        let first_hops = action_pairs(actions, kb).len();
        let mut seen = HashSet::new();
        let distinct: Vec<Candidate> = generate_candidates(&unit.s_prev, actions, kb)
            .into_iter()
            .filter(|c| seen.insert(c.state.clone()))
            .collect();
        let heuristics: Vec<F> = distinct
            .par_iter()
            .map(|c| target.components::<F>(&c.state).value(&cfg.params))
            .collect();
        let mut mids: Vec<Mid<F>> = distinct
            .into_iter()
            .zip(heuristics)
            .map(|(candidate, heuristic)| Mid { candidate, heuristic })
            .collect();
        // candidates arrive in (action, NSA) order, so a stable sort on H
        // leaves ties in that order
        mids.sort_by(|a, b| a.heuristic.partial_cmp(&b.heuristic).unwrap_or(Ordering::Equal));
        let second = action_pairs(actions, kb);
        let any = EquationState::dummy_head();
        let fixed = second
            .iter()
            .enumerate()
            .filter(|(_, (a, _))| a.is_consider_kb())
            .map(|(j, (a, n))| (j, a.apply_unchecked(&any, n)))
            .collect();
        let nsa_values = second
            .iter()
            .map(|(_, n)| match n {
                Nsa::None => None,
                Nsa::Symbol(name) => Some(Modular::of_name(name)),
                Nsa::Equation(e) => fingerprint(&e.rhs),
            })
            .collect();
        let target_value = fingerprint(&unit.s_next.rhs);
        Ok(Plan { target, target_value, nsa_values, mids, second, fixed, first_hops, cfg })
    }

    fn output(&self, mid: &EquationState, j: usize) -> EquationState {
        match self.fixed.get(&j) {
            Some(s) => s.clone(),
            None => {
                let (a, n) = &self.second[j];
                a.apply_unchecked(mid, n)
            }
        }
    }

    /// Index of the first second hop from `mid` that lands on the target.
    fn first_hit(&self, mid: &EquationState) -> Option<usize> {
        let filter = self.target.form == Rendering::Text;
        let numeric = filter && *mid != self.target.state;
        let (lhs, rhs) =
            if numeric { (fingerprint(&mid.lhs), fingerprint(&mid.rhs)) } else { (None, None) };
        self.second.iter().enumerate().position(|(j, (a, n))| {
            if let Some(s) = self.fixed.get(&j) {
                return self.target.is_hit(s);
            }
            if filter && !may_reach(a, mid, &self.target.state) {
                return false;
            }
            if let (true, Some(want)) = (numeric, self.target_value) {
                let rule = a.rhs_value();
                let value = if rule.needs_input() {
                    rule.predict_from(mid, n, &symbol_value)
                } else {
                    rule.predict(lhs.as_ref(), rhs.as_ref(), self.nsa_values[j].as_ref())
                };
                if value.is_some_and(|v| v != want) {
                    return false;
                }
            }
            self.target.is_hit(&a.apply_unchecked(mid, n))
        })
    }

    /// Smallest `(distance, index)` over the second hops from `mid`,
    /// skipping outputs known to be farther than `global`.
    fn best_end(&self, mid: &EquationState, global: &AtomicU64) -> Option<(F, usize)> {
        let mut memo: HashMap<EquationState, Option<F>> = HashMap::new();
        let mut best: Option<(F, usize)> = None;
        for j in 0..self.second.len() {
            let shared = F::from_f64(f64::from_bits(global.load(AtomicOrdering::Relaxed)));
            let bound = match best {
                Some((d, _)) => d.min(shared.unwrap_or(d)),
                None => shared.unwrap_or(F::infinity()),
            };
            let out = self.output(mid, j);
            let d = match memo.get(&out) {
                Some(d) => *d,
                None => {
                    let bound = (bound < F::infinity()).then_some(bound);
                    let d = self.target.distance(&self.cfg.measure, &out, bound);
                    memo.insert(out, d);
                    d
                }
            };
            if let Some(d) = d {
                if best.is_none_or(|(b, _)| d < b) {
                    best = Some((d, j));
                    lower_shared(global, d);
                }
            }
        }
        best
    }

    fn path(&self, i: usize, j: usize, distance: F) -> CandidatePath<F> {
        let mid = &self.mids[i];
        let (a, n) = &self.second[j];
        CandidatePath {
            first: Step::new(&mid.candidate.action, &mid.candidate.nsa),
            c_mid: mid.candidate.state.clone(),
            via: Vec::new(),
            second: Step::new(a, n),
            c_end: self.output(&mid.candidate.state, j),
            heuristic: mid.heuristic,
            distance,
        }
    }

    fn finish(&self, i: usize, j: usize, distance: F, early_stop: bool) -> Reconstruction<F> {
        let path = self.path(i, j, distance);
        Reconstruction {
            s_hat: path.c_mid.clone(),
            path,
            first_hops: self.first_hops,
            distinct_mids: self.mids.len(),
            second_hops: self.second.len(),
            early_stop,
        }
    }
}

fn lower_shared<F: Real>(global: &AtomicU64, d: F) {
    let d = d.to_f64().unwrap_or(f64::INFINITY);
    let mut current = global.load(AtomicOrdering::Relaxed);
    while d < f64::from_bits(current) {
        match global.compare_exchange_weak(
            current,
            d.to_bits(),
            AtomicOrdering::Relaxed,
            AtomicOrdering::Relaxed,
        ) {
            Ok(_) => break,
            Err(now) => current = now,
        }
    }
}

/// Solves one unit. The result does not depend on the number of worker
/// threads.
pub fn reconstruct<F: Real>(
    unit: &DerivationUnit,
    actions: &[Action],
    kb: &KnowledgeBase,
    cfg: &SearchConfig,
) -> Result<Reconstruction<F>, SearchError> {
    let plan = Plan::<F>::new(unit, actions, kb, cfg)?;
    if plan.second.is_empty() || plan.mids.is_empty() {
        return Err(SearchError::NoActions);
    }
    let hit = plan
        .mids
        .par_iter()
        .enumerate()
        .find_map_first(|(i, m)| plan.first_hit(&m.candidate.state).map(|j| (i, j)));
    if let Some((i, j)) = hit {
        return Ok(plan.finish(i, j, F::zero(), true));
    }
    let global = AtomicU64::new(f64::INFINITY.to_bits());
    let ends: Vec<Option<(F, usize)>> =
        plan.mids.par_iter().map(|m| plan.best_end(&m.candidate.state, &global)).collect();
    let mut best: Option<(F, usize, usize)> = None;
    for (i, end) in ends.into_iter().enumerate() {
        if let Some((d, j)) = end {
            if best.is_none_or(|(b, _, _)| d < b) {
                best = Some((d, i, j));
            }
        }
    }
    let (d, i, j) = best.expect("every middle state has a second hop");
    Ok(plan.finish(i, j, d, false))
}

/// Distinct middle states from which some second hop lands exactly on
/// `s_next`, in search order.
pub fn reaching_mids(
    unit: &DerivationUnit,
    actions: &[Action],
    kb: &KnowledgeBase,
    cfg: &SearchConfig,
) -> Result<Vec<EquationState>, SearchError> {
    let plan = Plan::<f64>::new(unit, actions, kb, cfg)?;
    let fixed_hit = plan.fixed.values().any(|s| plan.target.is_hit(s));
    let reach: Vec<bool> = plan
        .mids
        .par_iter()
        .map(|m| fixed_hit || plan.first_hit(&m.candidate.state).is_some())
        .collect();
    Ok(plan
        .mids
        .iter()
        .zip(reach)
        .filter(|(_, r)| *r)
        .map(|(m, _)| m.candidate.state.clone())
        .collect())
}

/// Searches with `hops` intermediate states by exhaustive depth-first
/// enumeration. `hops = 1` is [`reconstruct`]. The cost grows as
/// `(|A| |K|)^(hops + 1)`.
pub fn reconstruct_hops<F: Real>(
    unit: &DerivationUnit,
    actions: &[Action],
    kb: &KnowledgeBase,
    cfg: &SearchConfig,
    hops: usize,
) -> Result<Reconstruction<F>, SearchError> {
    match hops {
        0 => return Err(SearchError::NoHops),
        1 => return reconstruct(unit, actions, kb, cfg),
        _ => {}
    }
    let plan = Plan::<F>::new(unit, actions, kb, cfg)?;
    let pairs = &plan.second;

    struct Best<F> {
        distance: F,
        mid: usize,
        trail: Vec<(usize, EquationState)>,
    }

    fn walk<F: Real>(
        plan: &Plan<'_, F>,
        state: &EquationState,
        depth: usize,
        trail: &mut Vec<(usize, EquationState)>,
        mid: usize,
        best: &mut Option<Best<F>>,
    ) -> bool {
        for j in 0..plan.second.len() {
            let (a, n) = &plan.second[j];
            let out = a.apply_unchecked(state, n);
            trail.push((j, out.clone()));
            if depth == 0 {
                let bound = best.as_ref().map(|b| b.distance);
                if let Some(d) = plan.target.distance(&plan.cfg.measure, &out, bound) {
                    if best.as_ref().is_none_or(|b| d < b.distance) {
                        *best = Some(Best { distance: d, mid, trail: trail.clone() });
                        if d == F::zero() {
                            return true;
                        }
                    }
                }
            } else if walk(plan, &out, depth - 1, trail, mid, best) {
                return true;
            }
            trail.pop();
        }
        false
    }

    let mut best: Option<Best<F>> = None;
    let mut early_stop = false;
    for (i, m) in plan.mids.iter().enumerate() {
        let mut trail = Vec::new();
        if walk(&plan, &m.candidate.state, hops - 1, &mut trail, i, &mut best) {
            early_stop = true;
            break;
        }
    }
    let best = best.expect("non-empty pair set");
    let m = &plan.mids[best.mid];
    let mut trail = best.trail;
    let (last_j, c_end) = trail.pop().expect("at least one further step");
    let via = trail.into_iter().map(|(j, s)| (Step::new(&pairs[j].0, &pairs[j].1), s)).collect();
    let path = CandidatePath {
        first: Step::new(&m.candidate.action, &m.candidate.nsa),
        c_mid: m.candidate.state.clone(),
        via,
        second: Step::new(&pairs[last_j].0, &pairs[last_j].1),
        c_end,
        heuristic: m.heuristic,
        distance: best.distance,
    };
    Ok(Reconstruction {
        s_hat: path.c_mid.clone(),
        path,
        first_hops: plan.first_hops,
        distinct_mids: plan.mids.len(),
        second_hops: pairs.len(),
        early_stop,
    })
}
