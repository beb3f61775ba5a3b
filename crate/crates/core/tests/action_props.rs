mod common;

use common::{raw, Raw, NAMES};
use derivekit::action::{RhsValue, REMOVE_INDEX};
use derivekit::expr::{self, Expr};
use derivekit::scalar::Modular;
use derivekit::{builtin_action_set, ActionCategory, EquationState, Nsa, Rational};
use proptest::prelude::*;

const LHS_NAMES: [&str; 3] = ["E", "H", "p"];

fn any_state() -> impl Strategy<Value = EquationState> {
    prop_oneof![
        8 => (proptest::sample::select(LHS_NAMES.to_vec()), raw(), 0u32..3).prop_map(|(l, r, i)| {
            EquationState::new(Expr::symbol(l), r.build()).with_index(i)
        }),
        1 => Just(EquationState::dummy_head()),
    ]
}

fn nsas() -> impl Strategy<Value = (String, EquationState)> {
    (proptest::sample::select(NAMES.to_vec()), proptest::sample::select(LHS_NAMES.to_vec()), raw())
        .prop_map(|(k, l, r)| (k.to_string(), EquationState::new(Expr::symbol(l), r.build())))
}

fn nsa_for(category: ActionCategory, symbol: &str, eq: &EquationState) -> Nsa {
    match category {
        ActionCategory::SelfState => Nsa::None,
        ActionCategory::SymbolState => Nsa::Symbol(symbol.to_string()),
        ActionCategory::EquationState => Nsa::Equation(eq.clone()),
    }
}

fn hashed(name: &str) -> Option<Modular> {
    Some(Modular::of_name(name))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(600))]

    #[test]
    fn total_deterministic_and_indexed(s in any_state(), (k, eq) in nsas()) {
        for a in builtin_action_set() {
            let nsa = nsa_for(a.category(), &k, &eq);
            let out = a.apply(&s, &nsa).unwrap();
            let again = a.apply(&s, &nsa).unwrap();
            prop_assert_eq!(out.text(), again.text());
            let reparsed = EquationState::parse(&out.text()).unwrap();
            prop_assert_eq!(reparsed.text(), out.text());
            if out.rhs != s.rhs && a.name() != REMOVE_INDEX && !a.is_consider_kb() {
                prop_assert_ne!(out.lhs_text(), s.lhs_text(), "{} on {}", a.name(), s);
            }
        }
    }

    // the numeric filter of the search relies on these predictions
    #[test]
    fn predicted_rhs_values_hold(s in any_state(), (k, eq) in nsas()) {
        for a in builtin_action_set() {
            let nsa = nsa_for(a.category(), &k, &eq);
            let out = a.apply(&s, &nsa).unwrap();
            if out == s {
                continue;
            }
            let rule = a.rhs_value();
            let predicted = if rule.needs_input() {
                rule.predict_from(&s, &nsa, &hashed)
            } else {
                let nsa_value = match &nsa {
                    Nsa::None => None,
                    Nsa::Symbol(name) => hashed(name),
                    Nsa::Equation(e) => expr::eval(&e.rhs, &hashed),
                };
                let lhs = expr::eval(&s.lhs, &hashed);
                let rhs = expr::eval(&s.rhs, &hashed);
                rule.predict(lhs.as_ref(), rhs.as_ref(), nsa_value.as_ref())
            };
            if let (Some(p), Some(v)) = (predicted, expr::eval(&out.rhs, &hashed)) {
                prop_assert_eq!(p, v, "{} on {} with {}", a.name(), s, nsa.text());
            }
        }
    }

    #[test]
    fn symbol_arithmetic_is_sound(r in raw(), k in proptest::sample::select(NAMES.to_vec()), values in proptest::array::uniform8(1i64..=9)) {
        let env = common::integer_env(&values);
        let Some(rhs_value) = r.eval(&env) else { return Ok(()) };
        let s = EquationState::new(Expr::symbol("E"), r.build());
        let env = |n: &str| Some(if n == "E" { rhs_value.clone() } else { env(n) });
        let kv = env(k).unwrap();
        let nsa = Nsa::Symbol(k.to_string());
        let actions = builtin_action_set();
        let find = |name: &str| *actions.iter().find(|a| a.name() == name).unwrap();

        // both sides move together: LHS - RHS is unchanged
        for name in ["add_symbol_to_both_sides", "subtract_symbol_from_both_sides"] {
            let out = find(name).apply(&s, &nsa).unwrap();
            let l = expr::eval(&out.lhs, &env);
            let rr = expr::eval(&out.rhs, &env);
            if let (Some(l), Some(rr)) = (l, rr) {
                prop_assert_eq!(l - rr, Rational::from_integer(0.into()), "{} -> {}", s, out);
            }
        }
        // RHS-only steps define the renamed LHS as the scaled old one
        for (name, factor) in [
            ("multiply_rhs_by_symbol", kv.clone()),
            ("divide_rhs_by_symbol", Rational::from_integer(1.into()) / kv.clone()),
        ] {
            let out = find(name).apply(&s, &nsa).unwrap();
            if out == s {
                continue;
            }
            prop_assert_eq!(out.lhs_index, 1);
            if let Some(v) = expr::eval(&out.rhs, &env) {
                prop_assert_eq!(v, rhs_value.clone() * factor, "{} -> {}", s, out);
            }
        }
    }
}

// one documented inapplicable input per action: the neutral starting state,
// with the dummy equation as the equation argument
#[test]
fn every_action_has_a_no_op_input() {
    let head = EquationState::dummy_head();
    for a in builtin_action_set() {
        let nsa = nsa_for(a.category(), "k", &head);
        let out = a.apply(&head, &nsa).unwrap();
        assert_eq!(out, head, "{}", a.name());
        assert_eq!(out.state_type, head.state_type, "{}", a.name());
    }
}

#[test]
fn rules_with_predictions() {
    let predicted = builtin_action_set()
        .iter()
        .filter(|a| a.rhs_value() != RhsValue::Unknown)
        .count();
    assert_eq!(predicted, builtin_action_set().len() - 1);
    let r = Raw::Add(vec![Raw::Sym("a"), Raw::Int(1)]);
    assert_eq!(r.build().text(), "1 + a");
}
