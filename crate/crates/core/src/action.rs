//! Typed actions `(state, NSA) -> state`.
//!
//! An action whose input it cannot handle returns that input unchanged. Any
//! action that rewrites a side increments the LHS index of the result;
//! `remove_index` and `consider_kb_equation` produce their state verbatim.

use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::expr::{self, Expr};
use crate::scalar::Field;
use crate::state::{ActionCategory, EquationState, StateType};

pub const CONSIDER_KB: &str = "consider_kb_equation";
pub const REMOVE_INDEX: &str = "remove_index";
const SUM: &str = "Sum";

/// The secondary argument of an action.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Nsa {
    None,
    Symbol(String),
    Equation(EquationState),
}

impl Nsa {
    pub fn category(&self) -> ActionCategory {
        match self {
            Nsa::None => ActionCategory::SelfState,
            Nsa::Symbol(_) => ActionCategory::SymbolState,
            Nsa::Equation(_) => ActionCategory::EquationState,
        }
    }

    /// Text form: empty for `None`, the name for a symbol, `"L = R"` for an
    /// equation.
    pub fn text(&self) -> String {
        match self {
            Nsa::None => String::new(),
            Nsa::Symbol(s) => s.clone(),
            Nsa::Equation(e) => e.text(),
        }
    }

    /// Inverse of [`Nsa::text`]. Equations are recognised by `=`.
    pub fn parse(text: &str) -> Result<Nsa, crate::state::StateParseError> {
        let t = text.trim();
        if t.is_empty() || t.eq_ignore_ascii_case("none") {
            return Ok(Nsa::None);
        }
        if t.contains('=') {
            return EquationState::parse(t).map(Nsa::Equation);
        }
        match expr::parse(t) {
            Ok(e) if e.as_symbol().is_some() => Ok(Nsa::Symbol(t.to_string())),
            Ok(_) => Err(crate::state::StateParseError::MissingEquals),
            Err(e) => Err(crate::state::StateParseError::Rhs(e)),
        }
    }
}

impl fmt::Display for Nsa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text())
    }
}

impl Serialize for Nsa {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.text())
    }
}

/// What a transform produces before index bookkeeping.
#[derive(Debug, Clone)]
pub enum Transition {
    /// New RHS; LHS kept.
    Rhs(Expr),
    /// New LHS and RHS.
    Both(Expr, Expr),
    /// A complete state, used as is.
    Replace(EquationState),
}

type Transform = fn(&EquationState, &Nsa) -> Option<Transition>;

/// Which [`Transition`] variant an action's transform can produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Rhs,
    Both,
    Replace,
}

/// Value of the output RHS in terms of the input, whenever the action
/// applies and changes the state. Used for numeric fingerprinting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RhsValue {
    Same,
    Half,
    /// The input's LHS.
    Lhs,
    TimesNsa,
    OverNsa,
    PlusNsa,
    MinusNsa,
    /// `f(RHS, NSA)` for the named function.
    Wrap(&'static str),
    /// The RHS with one side of the NSA equation replaced by the other.
    Substitute,
    /// The RHS with non-commutative operands subscripted by the NSA symbol.
    Subscript,
    Unknown,
}

impl RhsValue {
    /// Predicted output RHS value from the values of the input sides and
    /// of the NSA (a symbol's value or an equation's RHS value).
    pub fn predict<T: Field>(self, lhs: Option<&T>, rhs: Option<&T>, nsa: Option<&T>) -> Option<T> {
        let rhs = rhs.cloned();
        let nsa = nsa.cloned();
        match self {
            RhsValue::Same => rhs,
            RhsValue::Half => Some(rhs? * T::from_rational(&rational_half())?),
            RhsValue::Lhs => lhs.cloned(),
            RhsValue::TimesNsa => Some(rhs? * nsa?),
            RhsValue::OverNsa => Some(rhs? * nsa?.powi(-1)?),
            RhsValue::PlusNsa => Some(rhs? + nsa?),
            RhsValue::MinusNsa => Some(rhs? - nsa?),
            RhsValue::Wrap(f) => T::apply(f, &[rhs?, nsa?]),
            RhsValue::Substitute | RhsValue::Subscript | RhsValue::Unknown => None,
        }
    }

    /// True for the rules that [`RhsValue::predict_from`] handles.
    pub fn needs_input(self) -> bool {
        matches!(self, RhsValue::Substitute | RhsValue::Subscript)
    }

    /// Predicted output RHS value computed from the input state itself,
    /// with symbol values from `env`.
    pub fn predict_from<T: Field>(
        self,
        s: &EquationState,
        nsa: &Nsa,
        env: &dyn Fn(&str) -> Option<T>,
    ) -> Option<T> {
        match (self, nsa) {
            (RhsValue::Substitute, Nsa::Equation(e)) => {
                let forward = expr::eval_substituted(&s.rhs, &e.lhs, &e.rhs, env)?;
                if forward.1 {
                    return Some(forward.0);
                }
                Some(expr::eval_substituted(&s.rhs, &e.rhs, &e.lhs, env)?.0)
            }
            (RhsValue::Subscript, Nsa::Symbol(k)) => expr::eval_subscripted(&s.rhs, k, env),
            _ => None,
        }
    }
}

fn rational_half() -> num_rational::BigRational {
    num_rational::BigRational::new(1.into(), 2.into())
}

#[derive(Clone, Copy)]
pub struct Action {
    name: &'static str,
    category: ActionCategory,
    summary: &'static str,
    shape: Shape,
    value: RhsValue,
    transform: Transform,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ActionError {
    #[error("action {action} takes a {expected} argument, got {got}")]
    CategoryMismatch { action: &'static str, expected: ActionCategory, got: ActionCategory },
}

impl Action {
    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn category(&self) -> ActionCategory {
        self.category
    }

    pub fn summary(&self) -> &'static str {
        self.summary
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn rhs_value(&self) -> RhsValue {
        self.value
    }

    pub fn is_consider_kb(&self) -> bool {
        self.name == CONSIDER_KB
    }

    /// Applies the action. Inapplicable inputs come back unchanged.
    pub fn apply(&self, s: &EquationState, nsa: &Nsa) -> Result<EquationState, ActionError> {
        if nsa.category() != self.category {
            return Err(ActionError::CategoryMismatch {
                action: self.name,
                expected: self.category,
                got: nsa.category(),
            });
        }
        Ok(self.apply_unchecked(s, nsa))
    }

    /// [`Action::apply`] without the category check; a mismatched NSA makes
    /// the action inapplicable.
    pub fn apply_unchecked(&self, s: &EquationState, nsa: &Nsa) -> EquationState {
        match (self.transform)(s, nsa) {
            None => s.clone(),
            Some(Transition::Rhs(rhs)) => {
                if rhs == s.rhs {
                    return s.clone();
                }
                EquationState::new(s.lhs.clone(), rhs).with_index(s.lhs_index + 1)
            }
            Some(Transition::Both(lhs, rhs)) => {
                if lhs == s.lhs && rhs == s.rhs {
                    return s.clone();
                }
                EquationState::new(lhs, rhs).with_index(s.lhs_index + 1)
            }
            Some(Transition::Replace(out)) => {
                if out == *s && out.state_type == s.state_type {
                    return s.clone();
                }
                out
            }
        }
    }
}

impl fmt::Debug for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Action({}, {})", self.name, self.category)
    }
}

impl PartialEq for Action {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
    }
}

impl Eq for Action {}

impl Serialize for Action {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name)
    }
}

/// Lower-cased alphanumerics only, for matching names written in prose.
pub fn normalize_name(name: &str) -> String {
    name.chars().filter(|c| c.is_alphanumeric()).flat_map(char::to_lowercase).collect()
}

/// True for the action that starts a new branch, under any spelling
/// (`consider_kb_equation`, "consider knowledge base equation").
pub fn is_consider_kb_name(name: &str) -> bool {
    matches!(normalize_name(name).as_str(), "considerkbequation" | "considerknowledgebaseequation")
}

fn open_rhs(s: &EquationState) -> Option<&Expr> {
    (!s.rhs.contains_placeholder()).then_some(&s.rhs)
}

fn symbol(nsa: &Nsa) -> Option<Expr> {
    match nsa {
        Nsa::Symbol(name) => Some(Expr::symbol(name.clone())),
        _ => None,
    }
}

fn equation(nsa: &Nsa) -> Option<&EquationState> {
    match nsa {
        Nsa::Equation(e) if !e.lhs.contains_placeholder() && !e.rhs.contains_placeholder() => {
            Some(e)
        }
        _ => None,
    }
}

fn expand_rhs(s: &EquationState, _: &Nsa) -> Option<Transition> {
    Some(Transition::Rhs(expr::expand(open_rhs(s)?)))
}

fn factor_rhs_common_term(s: &EquationState, _: &Nsa) -> Option<Transition> {
    expr::factor_common_terms(open_rhs(s)?).map(Transition::Rhs)
}

fn simplify_rationals(s: &EquationState, _: &Nsa) -> Option<Transition> {
    expr::together(open_rhs(s)?).map(Transition::Rhs)
}

fn divide_rhs_by_2(s: &EquationState, _: &Nsa) -> Option<Transition> {
    Some(Transition::Rhs(open_rhs(s)?.div(&Expr::integer(2))))
}

fn remove_index(s: &EquationState, _: &Nsa) -> Option<Transition> {
    (s.lhs_index != 0)
        .then(|| Transition::Replace(s.strip_index().with_type(StateType::Consequent)))
}

fn swap_sides(s: &EquationState, _: &Nsa) -> Option<Transition> {
    let rhs = open_rhs(s)?;
    (*rhs != s.lhs).then(|| Transition::Both(rhs.clone(), s.lhs.clone()))
}

fn divide_rhs_by_symbol(s: &EquationState, n: &Nsa) -> Option<Transition> {
    Some(Transition::Rhs(open_rhs(s)?.div(&symbol(n)?)))
}

fn multiply_rhs_by_symbol(s: &EquationState, n: &Nsa) -> Option<Transition> {
    Some(Transition::Rhs(Expr::mul(vec![open_rhs(s)?.clone(), symbol(n)?])))
}

fn add_symbol_to_both_sides(s: &EquationState, n: &Nsa) -> Option<Transition> {
    let k = symbol(n)?;
    let rhs = Expr::add(vec![open_rhs(s)?.clone(), k.clone()]);
    Some(Transition::Both(Expr::add(vec![s.lhs.clone(), k]), rhs))
}

fn subtract_symbol_from_both_sides(s: &EquationState, n: &Nsa) -> Option<Transition> {
    let k = symbol(n)?;
    let rhs = open_rhs(s)?.sub(&k);
    Some(Transition::Both(s.lhs.sub(&k), rhs))
}

fn substitute_index_symbol(s: &EquationState, n: &Nsa) -> Option<Transition> {
    let Nsa::Symbol(k) = n else { return None };
    Some(Transition::Rhs(expr::subscript_operands(open_rhs(s)?, k)))
}

fn sum_over_symbol(s: &EquationState, n: &Nsa) -> Option<Transition> {
    let Nsa::Symbol(k) = n else { return None };
    let rhs = open_rhs(s)?;
    if !rhs.symbols().contains(k) {
        return None;
    }
    Some(Transition::Rhs(Expr::func(SUM, vec![rhs.clone(), Expr::symbol(k.clone())])))
}

fn consider_kb_equation(_: &EquationState, n: &Nsa) -> Option<Transition> {
    let e = equation(n)?;
    Some(Transition::Replace(e.strip_index().with_type(StateType::Integrative)))
}

fn substitute_equation(s: &EquationState, n: &Nsa) -> Option<Transition> {
    let e = equation(n)?;
    let rhs = open_rhs(s)?;
    if rhs.contains(&e.lhs) {
        Some(Transition::Rhs(expr::substitute(rhs, &e.lhs, &e.rhs)))
    } else if rhs.contains(&e.rhs) {
        Some(Transition::Rhs(expr::substitute(rhs, &e.rhs, &e.lhs)))
    } else {
        None
    }
}

fn add_equation_rhs(s: &EquationState, n: &Nsa) -> Option<Transition> {
    let e = equation(n)?;
    Some(Transition::Rhs(Expr::add(vec![open_rhs(s)?.clone(), e.rhs.clone()])))
}

fn subtract_equation_rhs(s: &EquationState, n: &Nsa) -> Option<Transition> {
    let e = equation(n)?;
    Some(Transition::Rhs(open_rhs(s)?.sub(&e.rhs)))
}

fn multiply_rhs_by_equation_rhs(s: &EquationState, n: &Nsa) -> Option<Transition> {
    let e = equation(n)?;
    Some(Transition::Rhs(Expr::mul(vec![open_rhs(s)?.clone(), e.rhs.clone()])))
}

fn divide_rhs_by_equation_rhs(s: &EquationState, n: &Nsa) -> Option<Transition> {
    let e = equation(n)?;
    if e.rhs.is_zero() || e.rhs.is_noncommutative() {
        return None;
    }
    Some(Transition::Rhs(open_rhs(s)?.div(&e.rhs)))
}

macro_rules! action {
    ($f:ident, $cat:ident, $shape:ident, $value:expr, $summary:literal) => {
        Action {
            name: stringify!($f),
            category: ActionCategory::$cat,
            summary: $summary,
            shape: Shape::$shape,
            value: $value,
            transform: $f,
        }
    };
}

const BUILTIN: [Action; 18] = [
    action!(expand_rhs, SelfState, Rhs, RhsValue::Same, "distribute products over sums in the RHS"),
    action!(factor_rhs_common_term, SelfState, Rhs, RhsValue::Same, "pull factors shared by every RHS term out front"),
    action!(simplify_rationals, SelfState, Rhs, RhsValue::Same, "combine RHS terms over a common denominator"),
    action!(divide_rhs_by_2, SelfState, Rhs, RhsValue::Half, "halve the RHS"),
    action!(remove_index, SelfState, Replace, RhsValue::Same, "drop the LHS index"),
    action!(swap_sides, SelfState, Both, RhsValue::Lhs, "exchange LHS and RHS"),
    action!(divide_rhs_by_symbol, SymbolState, Rhs, RhsValue::OverNsa, "RHS / k"),
    action!(multiply_rhs_by_symbol, SymbolState, Rhs, RhsValue::TimesNsa, "RHS * k"),
    action!(add_symbol_to_both_sides, SymbolState, Both, RhsValue::PlusNsa, "LHS + k = RHS + k"),
    action!(subtract_symbol_from_both_sides, SymbolState, Both, RhsValue::MinusNsa, "LHS - k = RHS - k"),
    action!(substitute_index_symbol, SymbolState, Rhs, RhsValue::Subscript, "subscript non-commutative operands with k"),
    action!(sum_over_symbol, SymbolState, Rhs, RhsValue::Wrap(SUM), "wrap the RHS in Sum(RHS, k)"),
    action!(consider_kb_equation, EquationState, Replace, RhsValue::Unknown, "start a new branch from a KB equation"),
    action!(substitute_equation, EquationState, Rhs, RhsValue::Substitute, "replace the equation's LHS by its RHS (or back)"),
    action!(add_equation_rhs, EquationState, Rhs, RhsValue::PlusNsa, "RHS + RHS_k"),
    action!(subtract_equation_rhs, EquationState, Rhs, RhsValue::MinusNsa, "RHS - RHS_k"),
    action!(multiply_rhs_by_equation_rhs, EquationState, Rhs, RhsValue::TimesNsa, "RHS * RHS_k"),
    action!(divide_rhs_by_equation_rhs, EquationState, Rhs, RhsValue::OverNsa, "RHS / RHS_k"),
];

/// The canonical action set, sorted by name.
pub fn builtin_action_set() -> Vec<Action> {
    let mut v = BUILTIN.to_vec();
    v.sort_by_key(|a| a.name);
    v
}

pub fn find_action(actions: &[Action], name: &str) -> Option<Action> {
    let norm = normalize_name(name);
    if is_consider_kb_name(name) {
        return actions.iter().find(|a| a.is_consider_kb()).copied();
    }
    actions.iter().find(|a| normalize_name(a.name) == norm).copied()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(t: &str) -> EquationState {
        EquationState::parse(t).unwrap()
    }

    fn by_name(name: &str) -> Action {
        find_action(&builtin_action_set(), name).unwrap()
    }

    #[test]
    fn halving_increments_index() {
        let out = by_name("divide_rhs_by_2").apply(&st("H = hbar*omega_0"), &Nsa::None).unwrap();
        assert_eq!(out.text(), "H^(1) = hbar*omega_0/2");
    }

    #[test]
    fn mismatched_nsa_rejected() {
        let err = by_name("expand_rhs").apply(&st("E = a"), &Nsa::Symbol("a".into()));
        assert!(matches!(err, Err(ActionError::CategoryMismatch { .. })));
    }

    #[test]
    fn expansion_and_substitution() {
        let out = by_name("expand_rhs").apply(&st("E^(4) = a*(b + c)"), &Nsa::None).unwrap();
        assert_eq!(out.text(), "E^(5) = a*b + a*c");

        let sub = by_name("substitute_equation");
        let out = sub.apply(&st("E = p**2/(2*m)"), &Nsa::Equation(st("p = hbar*k"))).unwrap();
        assert_eq!(out.text(), "E^(1) = k**2*hbar**2/(2*m)");
        let back = sub.apply(&st("E = x + hbar*k"), &Nsa::Equation(st("p = hbar*k"))).unwrap();
        assert_eq!(back.text(), "E^(1) = p + x");
    }

    #[test]
    fn consider_kb_ignores_current_state() {
        let a = by_name("consider knowledge base equation");
        let eq = st("H^(7) = hbar*omega_0*(a'@a + 1/2)");
        let out = a.apply(&EquationState::dummy_head(), &Nsa::Equation(eq.clone())).unwrap();
        assert_eq!(out.text(), "H = hbar*omega_0*(1/2 + a'@a)");
        assert_eq!(out.state_type, StateType::Integrative);
        assert_eq!(a.apply(&st("y = 3"), &Nsa::Equation(eq)).unwrap(), out);
    }

    #[test]
    fn remove_index_is_idempotent() {
        let a = by_name("remove_index");
        let once = a.apply(&st("H^(3) = x"), &Nsa::None).unwrap();
        assert_eq!(once.text(), "H = x");
        assert_eq!(a.apply(&once, &Nsa::None).unwrap(), once);
    }

    #[test]
    fn inapplicable_inputs_return_input() {
        let s = st("H^(2) = a + b");
        for a in builtin_action_set() {
            let nsa = match a.category() {
                ActionCategory::SelfState => Nsa::None,
                ActionCategory::SymbolState => Nsa::Symbol("z".into()),
                ActionCategory::EquationState => Nsa::Equation(st("q = 0")),
            };
            let head = EquationState::dummy_head();
            if !a.is_consider_kb() {
                assert_eq!(a.apply(&head, &nsa).unwrap().text(), "x = ?", "{}", a.name());
            }
        }
        assert_eq!(by_name("sum_over_symbol").apply(&s, &Nsa::Symbol("z".into())).unwrap(), s);
        let zero = Nsa::Equation(st("q = 0"));
        assert_eq!(by_name("divide_rhs_by_equation_rhs").apply(&s, &zero).unwrap(), s);
        assert_eq!(by_name("substitute_equation").apply(&s, &zero).unwrap(), s);
    }

    #[test]
    fn names_unique_and_categories_covered() {
        let set = builtin_action_set();
        let mut names: Vec<_> = set.iter().map(|a| a.name()).collect();
        names.dedup();
        assert_eq!(names.len(), set.len());
        for c in ActionCategory::ALL {
            assert!(set.iter().any(|a| a.category() == c));
        }
    }

    #[test]
    fn nsa_text_round_trip() {
        for t in ["", "omega_0", "H^(2) = a + b"] {
            assert_eq!(Nsa::parse(t).unwrap().text(), t);
        }
    }
}
