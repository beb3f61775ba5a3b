//! Structural rewrites used by the action set, and numeric evaluation.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{negative_exponent, split_coefficient, Expr, ExprKind};
use crate::scalar::{as_small_integer, Field};

/// Upper bound on the number of terms a single distribution may produce.
const MAX_EXPANDED_TERMS: usize = 256;
const MAX_EXPANDED_POWER: i64 = 6;

fn rebuild(e: &Expr, children: Vec<Expr>) -> Expr {
    match e.kind() {
        ExprKind::Symbol(_) | ExprKind::Number(_) | ExprKind::Placeholder => e.clone(),
        ExprKind::Add(_) => Expr::add(children),
        ExprKind::Mul(_) => Expr::mul(children),
        ExprKind::NcMul(_) => Expr::nc_mul(children),
        ExprKind::Pow(..) => {
            let mut it = children.into_iter();
            let b = it.next().unwrap();
            let x = it.next().unwrap();
            Expr::pow(b, x)
        }
        ExprKind::Func(name, _) => Expr::func(name.clone(), children),
    }
}

/// Replaces every occurrence of the subtree `target` with `replacement`.
pub fn substitute(e: &Expr, target: &Expr, replacement: &Expr) -> Expr {
    if e == target {
        return replacement.clone();
    }
    if e.size() <= target.size() {
        return e.clone();
    }
    let children = e.children();
    let mapped: Vec<Expr> = children.iter().map(|c| substitute(c, target, replacement)).collect();
    if mapped.iter().zip(&children).all(|(a, b)| a == b) {
        return e.clone();
    }
    rebuild(e, mapped)
}

/// Distributes products over sums and expands small natural powers of sums.
/// Non-commutative products keep factor order.
pub fn expand(e: &Expr) -> Expr {
    match e.kind() {
        ExprKind::Symbol(_) | ExprKind::Number(_) | ExprKind::Placeholder => e.clone(),
        ExprKind::Add(c) => Expr::add(c.iter().map(expand).collect()),
        ExprKind::Mul(c) => distribute(c.iter().map(expand).collect(), Expr::mul),
        ExprKind::NcMul(c) => distribute(c.iter().map(expand).collect(), Expr::nc_mul),
        ExprKind::Pow(b, x) => {
            let b = expand(b);
            let n = x.as_number().and_then(as_small_integer);
            match (b.kind(), n) {
                (ExprKind::Add(_), Some(n)) if (2..=MAX_EXPANDED_POWER).contains(&n) => {
                    let copies = vec![b.clone(); n as usize];
                    if b.is_noncommutative() {
                        distribute(copies, Expr::nc_mul)
                    } else {
                        distribute(copies, Expr::mul)
                    }
                }
                _ => Expr::pow(b, expand(x)),
            }
        }
        ExprKind::Func(name, args) => Expr::func(name.clone(), args.iter().map(expand).collect()),
    }
}

fn distribute(factors: Vec<Expr>, combine: fn(Vec<Expr>) -> Expr) -> Expr {
    let lists: Vec<Vec<Expr>> = factors
        .iter()
        .map(|f| match f.kind() {
            ExprKind::Add(terms) => terms.clone(),
            _ => vec![f.clone()],
        })
        .collect();
    let count = lists.iter().try_fold(1usize, |acc, l| acc.checked_mul(l.len()));
    match count {
        Some(1) => return combine(factors),
        Some(n) if n <= MAX_EXPANDED_TERMS => {}
        _ => return combine(factors),
    }
    let mut combos: Vec<Vec<Expr>> = vec![Vec::new()];
    for list in &lists {
        let mut next = Vec::with_capacity(combos.len() * list.len());
        for prefix in &combos {
            for item in list {
                let mut c = prefix.clone();
                c.push(item.clone());
                next.push(c);
            }
        }
        combos = next;
    }
    Expr::add(combos.into_iter().map(combine).collect())
}

/// `(coefficient, base -> natural exponent)` view of a term.
fn natural_factors(t: &Expr) -> (BigRational, BTreeMap<String, (Expr, i64)>) {
    let (coeff, rest) = split_coefficient(t);
    let factors = match rest.kind() {
        ExprKind::Mul(c) => c.clone(),
        ExprKind::Number(_) => Vec::new(),
        _ => vec![rest.clone()],
    };
    let mut map = BTreeMap::new();
    for f in factors {
        let (base, n) = match f.kind() {
            ExprKind::Pow(b, x) => match x.as_number().and_then(as_small_integer) {
                Some(n) if n > 0 => (b.clone(), n),
                _ => continue,
            },
            _ => (f.clone(), 1),
        };
        map.insert(base.text().to_string(), (base, n));
    }
    (coeff, map)
}

/// Pulls the factors shared by every term of a sum out in front:
/// `a*b + a*c -> a*(b + c)`. `None` if `e` is not a sum or nothing is shared.
pub fn factor_common_terms(e: &Expr) -> Option<Expr> {
    let ExprKind::Add(terms) = e.kind() else {
        return None;
    };
    let views: Vec<_> = terms.iter().map(natural_factors).collect();

    let mut gcd: Option<BigInt> = Some(BigInt::zero());
    for (coeff, _) in &views {
        gcd = match (gcd, coeff.is_integer()) {
            (Some(g), true) => Some(g.gcd(coeff.numer())),
            _ => None,
        };
    }
    let gcd = gcd.filter(|g| *g > BigInt::one());

    let (_, first) = &views[0];
    let mut common = Vec::new();
    for (key, (base, n)) in first {
        let mut min = *n;
        let shared = views[1..].iter().all(|(_, m)| match m.get(key) {
            Some((_, k)) => {
                min = min.min(*k);
                true
            }
            None => false,
        });
        if shared {
            common.push(Expr::pow(base.clone(), Expr::integer(min)));
        }
    }
    if common.is_empty() && gcd.is_none() {
        return None;
    }
    if let Some(g) = gcd {
        common.push(Expr::number(BigRational::from_integer(g)));
    }
    let common = Expr::mul(common);
    let inv = common.recip();
    let inner = Expr::add(terms.iter().map(|t| Expr::mul(vec![t.clone(), inv.clone()])).collect());
    let out = Expr::mul(vec![common, inner]);
    (out != *e).then_some(out)
}

/// Denominator of a term: the coefficient's denominator times every factor
/// with a negative exponent, inverted.
fn denominator(t: &Expr) -> Expr {
    let (coeff, rest) = split_coefficient(t);
    let factors = match rest.kind() {
        ExprKind::Mul(c) => c.clone(),
        _ => vec![rest],
    };
    let mut den = vec![Expr::number(BigRational::from_integer(coeff.denom().clone()))];
    for f in factors {
        if let ExprKind::Pow(b, x) = f.kind() {
            if negative_exponent(x) {
                den.push(Expr::pow(b.clone(), x.neg()));
            }
        }
    }
    Expr::mul(den)
}

/// Combines the terms of a sum that share a denominator:
/// `a/c + b/c -> (a + b)/c`. `None` if no two terms share one.
pub fn together(e: &Expr) -> Option<Expr> {
    let ExprKind::Add(terms) = e.kind() else {
        return None;
    };
    let mut groups: BTreeMap<String, (Expr, Vec<Expr>)> = BTreeMap::new();
    let mut untouched = Vec::new();
    for t in terms {
        let d = denominator(t);
        if d.as_number().is_some_and(One::is_one) {
            untouched.push(t.clone());
            continue;
        }
        groups
            .entry(d.text().to_string())
            .or_insert_with(|| (d, Vec::new()))
            .1
            .push(t.clone());
    }
    if groups.values().all(|(_, g)| g.len() < 2) {
        return None;
    }
    let mut out = untouched;
    for (_, (d, group)) in groups {
        if group.len() < 2 {
            out.extend(group);
            continue;
        }
        let numerators = group.iter().map(|t| Expr::mul(vec![t.clone(), d.clone()])).collect();
        out.push(Expr::mul(vec![Expr::add(numerators), d.recip()]));
    }
    let combined = Expr::add(out);
    (combined != *e).then_some(combined)
}

fn subscripted(name: &str, index: &str) -> Option<String> {
    let daggers = name.chars().rev().take_while(|&c| c == '\'').count();
    let base = &name[..name.len() - daggers];
    if base.contains('_') {
        return None;
    }
    Some(format!("{base}_{index}{}", &name[name.len() - daggers..]))
}

/// Attaches `_index` to every unsubscripted symbol that is an operand of a
/// non-commutative product: `a'@a -> a_q'@a_q`.
pub fn subscript_operands(e: &Expr, index: &str) -> Expr {
    fn go(e: &Expr, index: &str, inside: bool) -> Expr {
        match e.kind() {
            ExprKind::Symbol(s) if inside => match subscripted(s, index) {
                Some(name) => Expr::symbol(name),
                None => e.clone(),
            },
            ExprKind::Symbol(_) | ExprKind::Number(_) | ExprKind::Placeholder => e.clone(),
            _ if !e.is_noncommutative() => e.clone(),
            ExprKind::NcMul(c) => Expr::nc_mul(c.iter().map(|x| go(x, index, true)).collect()),
            _ => rebuild(e, e.children().iter().map(|x| go(x, index, inside)).collect()),
        }
    }
    go(e, index, false)
}

/// Evaluates `e` with symbol values from `env`. Non-commutative products are
/// evaluated as ordinary products and functions through [`Field::apply`].
/// `None` for placeholders, non-integer exponents, unbound symbols, division
/// by zero and functions the field does not interpret.
pub fn eval<T: Field>(e: &Expr, env: &dyn Fn(&str) -> Option<T>) -> Option<T> {
    match e.kind() {
        ExprKind::Symbol(s) => env(s),
        ExprKind::Number(q) => T::from_rational(q),
        ExprKind::Placeholder => None,
        ExprKind::Func(name, args) => {
            let values: Option<Vec<T>> = args.iter().map(|a| eval(a, env)).collect();
            T::apply(name, &values?)
        }
        ExprKind::Add(c) => c.iter().try_fold(T::zero(), |acc, x| Some(acc + eval(x, env)?)),
        ExprKind::Mul(c) | ExprKind::NcMul(c) => {
            c.iter().try_fold(T::one(), |acc, x| Some(acc * eval(x, env)?))
        }
        ExprKind::Pow(b, x) => {
            let n = x.as_number().filter(|q| q.is_integer())?;
            let n = as_small_integer(n)?;
            if n.is_negative() && n.abs() > 64 {
                return None;
            }
            eval(b, env)?.powi(n)
        }
    }
}

/// Value of [`substitute`]`(e, target, replacement)` without building it,
/// and whether `target` occurs in `e`.
pub fn eval_substituted<T: Field>(
    e: &Expr,
    target: &Expr,
    replacement: &Expr,
    env: &dyn Fn(&str) -> Option<T>,
) -> Option<(T, bool)> {
    let mut found = false;
    let mut hook = |x: &Expr, _: bool| {
        if x.size() < target.size() {
            Some(None)
        } else if x == target {
            found = true;
            Some(Some(eval(replacement, env)))
        } else if x.size() == target.size() {
            Some(None)
        } else {
            None
        }
    };
    let value = eval_hooked(e, env, &mut hook, false)?;
    Some((value, found))
}

/// Value of [`subscript_operands`]`(e, index)` without building it.
pub fn eval_subscripted<T: Field>(
    e: &Expr,
    index: &str,
    env: &dyn Fn(&str) -> Option<T>,
) -> Option<T> {
    let mut hook = |x: &Expr, inside: bool| match x.kind() {
        ExprKind::Symbol(s) if inside => subscripted(s, index).map(|name| Some(env(&name))),
        _ if !x.is_noncommutative() => Some(None),
        _ => None,
    };
    eval_hooked(e, env, &mut hook, false)
}

type Hook<'a, T> = dyn FnMut(&Expr, bool) -> Option<Option<Option<T>>> + 'a;

// `hook(x, inside)` is `Some(Some(v))` to use `v` as the value of `x`,
// `Some(None)` to evaluate `x` plainly and `None` to descend.
fn eval_hooked<T: Field>(
    e: &Expr,
    env: &dyn Fn(&str) -> Option<T>,
    hook: &mut Hook<'_, T>,
    inside: bool,
) -> Option<T> {
    match hook(e, inside) {
        Some(Some(v)) => return v,
        Some(None) => return eval(e, env),
        None => {}
    }
    match e.kind() {
        ExprKind::Symbol(_) | ExprKind::Number(_) | ExprKind::Placeholder => eval(e, env),
        ExprKind::Func(name, args) => {
            let values: Option<Vec<T>> =
                args.iter().map(|a| eval_hooked(a, env, hook, inside)).collect();
            T::apply(name, &values?)
        }
        ExprKind::Add(c) => c
            .iter()
            .try_fold(T::zero(), |acc, x| Some(acc + eval_hooked(x, env, hook, inside)?)),
        ExprKind::Mul(c) => c
            .iter()
            .try_fold(T::one(), |acc, x| Some(acc * eval_hooked(x, env, hook, inside)?)),
        ExprKind::NcMul(c) => c
            .iter()
            .try_fold(T::one(), |acc, x| Some(acc * eval_hooked(x, env, hook, true)?)),
        ExprKind::Pow(b, x) => {
            // a replaced exponent has no integer value to raise to
            if !matches!(hook(x, inside), Some(None)) {
                return None;
            }
            let n = x.as_number().filter(|q| q.is_integer())?;
            let n = as_small_integer(n)?;
            if n.is_negative() && n.abs() > 64 {
                return None;
            }
            eval_hooked(b, env, hook, inside)?.powi(n)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    #[test]
    fn expand_distributes() {
        assert_eq!(expand(&p("a*(b + c)")).text(), "a*b + a*c");
        assert_eq!(expand(&p("(a + b)**2")).text(), "a**2 + b**2 + 2*a*b");
        assert_eq!(expand(&p("a@(b + c)")).text(), "a@b + a@c");
        assert_eq!(expand(&p("(b + c)@a")).text(), "b@a + c@a");
    }

    #[test]
    fn factor_and_together() {
        assert_eq!(factor_common_terms(&p("a*b + a*c")).unwrap().text(), "a*(b + c)");
        assert_eq!(factor_common_terms(&p("2*x + 4*y")).unwrap().text(), "2*(x + 2*y)");
        assert!(factor_common_terms(&p("a + b")).is_none());
        assert!(factor_common_terms(&p("a*b")).is_none());
        assert_eq!(together(&p("a/2 + b/2")).unwrap().text(), "(a + b)/2");
        assert!(together(&p("a/2 + b/3")).is_none());
    }

    #[test]
    fn substitution() {
        let e = p("p**2/(2*m)");
        let out = substitute(&e, &p("p"), &p("hbar*k"));
        assert_eq!(out.text(), "k**2*hbar**2/(2*m)");
        assert_eq!(substitute(&e, &p("q"), &p("x")), e);
    }

    #[test]
    fn subscripts_only_operator_operands() {
        let e = p("hbar*omega*(a'@a + 1/2)");
        assert_eq!(subscript_operands(&e, "q").text(), "hbar*omega*(1/2 + a_q'@a_q)");
        assert_eq!(subscript_operands(&p("x + y"), "q"), p("x + y"));
    }

    #[test]
    fn exact_evaluation() {
        let env = |s: &str| match s {
            "x" => Some(BigRational::from_integer(3.into())),
            "y" => Some(BigRational::from_integer(2.into())),
            _ => None,
        };
        let v = eval(&p("x/y + y**2"), &env).unwrap();
        assert_eq!(v, BigRational::new(11.into(), 2.into()));
        assert!(eval(&p("x/(y - 2)"), &env).is_none());
        assert!(eval(&p("z"), &env).is_none());
        let fenv = |s: &str| if s == "x" { Some(0.5f64) } else { None };
        assert_eq!(eval(&p("4*x**2"), &fenv), Some(1.0));
    }
}
