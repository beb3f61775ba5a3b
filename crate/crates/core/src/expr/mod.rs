//! Immutable symbolic expression trees.
//!
//! Every [`Expr`] is built through canonicalizing constructors, so two trees
//! are structurally identical exactly when their text renderings agree. The
//! text rendering is computed once per node and cached; equality, ordering
//! and hashing all go through it.
//!
//! Canonical form:
//! - sums and commutative products are flattened, numeric literals folded,
//!   like terms (sums) and like bases (products) collected;
//! - commutative children are ordered by rendering length, then
//!   lexicographically;
//! - non-commutative products (`@`) keep child order; at most one
//!   non-commutative factor survives in a commutative product, further ones
//!   are merged into it in their original order;
//! - integer powers of numbers, products and powers are evaluated or
//!   distributed; powers of sums are left alone.

mod latex;
mod ops;
mod parse;
mod symbols;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::scalar::{as_small_integer, is_natural, is_one, rational};

pub use ops::{
    eval, eval_subscripted, eval_substituted, expand, factor_common_terms, subscript_operands,
    substitute, together,
};
pub use parse::{parse, ParseError};
pub use symbols::SymbolSet;

/// The node kinds of an expression tree.
#[derive(Debug, Clone)]
pub enum ExprKind {
    Symbol(String),
    Number(BigRational),
    /// The `?` leaf of the neutral starting state.
    Placeholder,
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    /// Non-commutative product; child order is significant.
    NcMul(Vec<Expr>),
    Pow(Expr, Expr),
    Func(String, Vec<Expr>),
}

struct Node {
    kind: ExprKind,
    text: String,
    size: usize,
    nc: bool,
    placeholder: bool,
}

/// A canonical, immutable expression. Cloning is cheap.
#[derive(Clone)]
pub struct Expr(Arc<Node>);

impl Expr {
    pub fn kind(&self) -> &ExprKind {
        &self.0.kind
    }

    /// Canonical text rendering.
    pub fn text(&self) -> &str {
        &self.0.text
    }

    /// Node count.
    pub fn size(&self) -> usize {
        self.0.size
    }

    /// True if the tree contains a non-commutative product.
    pub fn is_noncommutative(&self) -> bool {
        self.0.nc
    }

    pub fn contains_placeholder(&self) -> bool {
        self.0.placeholder
    }

    pub fn symbol(name: impl Into<String>) -> Expr {
        Expr::raw(ExprKind::Symbol(name.into()))
    }

    pub fn placeholder() -> Expr {
        Expr::raw(ExprKind::Placeholder)
    }

    pub fn number(q: BigRational) -> Expr {
        Expr::raw(ExprKind::Number(q))
    }

    pub fn integer(n: i64) -> Expr {
        Expr::number(rational(n))
    }

    pub fn zero() -> Expr {
        Expr::integer(0)
    }

    pub fn one() -> Expr {
        Expr::integer(1)
    }

    pub fn func(name: impl Into<String>, args: Vec<Expr>) -> Expr {
        Expr::raw(ExprKind::Func(name.into(), args))
    }

    pub fn as_number(&self) -> Option<&BigRational> {
        match self.kind() {
            ExprKind::Number(q) => Some(q),
            _ => None,
        }
    }

    pub fn as_symbol(&self) -> Option<&str> {
        match self.kind() {
            ExprKind::Symbol(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_number().is_some_and(Zero::is_zero)
    }

    /// Direct children in canonical order.
    pub fn children(&self) -> Vec<Expr> {
        match self.kind() {
            ExprKind::Symbol(_) | ExprKind::Number(_) | ExprKind::Placeholder => Vec::new(),
            ExprKind::Add(c) | ExprKind::Mul(c) | ExprKind::NcMul(c) | ExprKind::Func(_, c) => {
                c.clone()
            }
            ExprKind::Pow(b, e) => vec![b.clone(), e.clone()],
        }
    }

    /// Canonical sum.
    pub fn add(terms: Vec<Expr>) -> Expr {
        let mut flat = Vec::with_capacity(terms.len());
        for t in terms {
            match t.kind() {
                ExprKind::Add(children) => flat.extend(children.iter().cloned()),
                _ => flat.push(t),
            }
        }

        let mut constant = rational(0);
        // keyed by the rendering of the non-numeric part
        let mut groups: BTreeMap<String, (Expr, BigRational)> = BTreeMap::new();
        for t in flat {
            if let ExprKind::Number(q) = t.kind() {
                constant += q;
                continue;
            }
            let (coeff, rest) = split_coefficient(&t);
            groups
                .entry(rest.text().to_string())
                .and_modify(|(_, c)| *c += &coeff)
                .or_insert((rest, coeff));
        }

        let mut out: Vec<Expr> = groups
            .into_values()
            .filter(|(_, c)| !c.is_zero())
            .map(|(rest, c)| scale(c, rest))
            .collect();
        if !constant.is_zero() {
            out.push(Expr::number(constant));
        }
        match out.len() {
            0 => Expr::zero(),
            1 => out.pop().unwrap(),
            _ => {
                out.sort();
                Expr::raw(ExprKind::Add(out))
            }
        }
    }

    /// Canonical commutative product. Non-commutative factors keep their
    /// relative order.
    pub fn mul(factors: Vec<Expr>) -> Expr {
        let mut coeff = rational(1);
        let mut commuting = Vec::new();
        let mut noncommuting = Vec::new();
        let mut pending: Vec<Expr> = factors;
        pending.reverse();
        while let Some(f) = pending.pop() {
            match f.kind() {
                ExprKind::Number(q) => coeff *= q,
                ExprKind::Mul(children) => {
                    for c in children.iter().rev() {
                        pending.push(c.clone());
                    }
                }
                _ if f.is_noncommutative() => noncommuting.push(f),
                _ => commuting.push(f),
            }
        }
        if coeff.is_zero() {
            return Expr::zero();
        }

        if noncommuting.len() > 1 {
            let merged = Expr::nc_mul(noncommuting);
            noncommuting = Vec::new();
            match merged.kind() {
                ExprKind::Number(q) => coeff *= q,
                ExprKind::Mul(children) => {
                    for c in children {
                        match c.kind() {
                            ExprKind::Number(q) => coeff *= q,
                            _ if c.is_noncommutative() => noncommuting.push(c.clone()),
                            _ => commuting.push(c.clone()),
                        }
                    }
                }
                _ if merged.is_noncommutative() => noncommuting.push(merged),
                _ => commuting.push(merged),
            }
        }
        commuting.extend(noncommuting);

        let mut bases: BTreeMap<String, (Expr, Vec<Expr>)> = BTreeMap::new();
        for f in commuting {
            let (base, exp) = match f.kind() {
                ExprKind::Pow(b, e) => (b.clone(), e.clone()),
                _ => (f.clone(), Expr::one()),
            };
            bases
                .entry(base.text().to_string())
                .or_insert_with(|| (base, Vec::new()))
                .1
                .push(exp);
        }

        let mut out = Vec::new();
        let mut renormalize = false;
        for (_, (base, exps)) in bases {
            let exp = if exps.len() == 1 {
                exps.into_iter().next().unwrap()
            } else {
                Expr::add(exps)
            };
            let f = Expr::pow(base, exp);
            match f.kind() {
                ExprKind::Number(q) => coeff *= q,
                ExprKind::Mul(_) => {
                    renormalize = true;
                    out.push(f);
                }
                _ => out.push(f),
            }
        }
        if renormalize {
            out.push(Expr::number(coeff));
            return Expr::mul(out);
        }
        if coeff.is_zero() {
            return Expr::zero();
        }
        if out.is_empty() {
            return Expr::number(coeff);
        }
        if is_one(&coeff) && out.len() == 1 {
            return out.pop().unwrap();
        }
        out.sort();
        if !is_one(&coeff) {
            out.insert(0, Expr::number(coeff));
        }
        Expr::raw(ExprKind::Mul(out))
    }

    /// Canonical non-commutative product. Numeric factors are pulled out
    /// into a surrounding commutative product; adjacent equal bases are
    /// combined into powers.
    pub fn nc_mul(children: Vec<Expr>) -> Expr {
        let mut coeff = rational(1);
        let mut flat: Vec<Expr> = Vec::new();
        let mut pending = children;
        pending.reverse();
        while let Some(c) = pending.pop() {
            match c.kind() {
                ExprKind::Number(q) => coeff *= q,
                ExprKind::NcMul(inner) => {
                    for i in inner.iter().rev() {
                        pending.push(i.clone());
                    }
                }
                ExprKind::Mul(_) => {
                    let (q, rest) = split_coefficient(&c);
                    coeff *= q;
                    match rest.kind() {
                        ExprKind::Number(_) => {}
                        ExprKind::NcMul(inner) => pending.extend(inner.iter().rev().cloned()),
                        _ => flat.push(rest),
                    }
                }
                _ => flat.push(c),
            }
        }
        if coeff.is_zero() {
            return Expr::zero();
        }

        let mut merged: Vec<(Expr, Expr)> = Vec::new();
        for c in flat {
            let (base, exp) = match c.kind() {
                ExprKind::Pow(b, e) => (b.clone(), e.clone()),
                _ => (c.clone(), Expr::one()),
            };
            match merged.last_mut() {
                Some((b, e)) if *b == base => *e = Expr::add(vec![e.clone(), exp]),
                _ => merged.push((base, exp)),
            }
        }
        let mut out = Vec::new();
        for (b, e) in merged {
            let f = Expr::pow(b, e);
            match f.kind() {
                ExprKind::Number(q) => coeff *= q,
                _ => out.push(f),
            }
        }

        let body = match out.len() {
            0 => return Expr::number(coeff),
            1 => out.pop().unwrap(),
            _ => Expr::raw(ExprKind::NcMul(out)),
        };
        if is_one(&coeff) {
            body
        } else {
            Expr::mul(vec![Expr::number(coeff), body])
        }
    }

    /// Canonical power.
    pub fn pow(base: Expr, exp: Expr) -> Expr {
        if let Some(e) = exp.as_number() {
            if e.is_zero() {
                return Expr::one();
            }
            if is_one(e) {
                return base;
            }
        }
        if base.as_number().is_some_and(One::is_one) {
            return Expr::one();
        }
        let int_exp = exp.as_number().and_then(as_small_integer);
        if let Some(n) = int_exp {
            match base.kind() {
                ExprKind::Number(b) if b.is_zero() && n < -1 => {
                    return Expr::raw(ExprKind::Pow(base, Expr::integer(-1)));
                }
                ExprKind::Number(b) => {
                    if !(b.is_zero() && n < 0) && n.abs() <= 64 {
                        let v: BigRational = num_traits::Pow::pow(b, n as i32);
                        return Expr::number(v);
                    }
                }
                ExprKind::Pow(b, e) => {
                    return Expr::pow(b.clone(), Expr::mul(vec![e.clone(), exp]));
                }
                ExprKind::Mul(children) => {
                    let factors = children.iter().map(|c| Expr::pow(c.clone(), exp.clone()));
                    return Expr::mul(factors.collect());
                }
                _ => {}
            }
        }
        Expr::raw(ExprKind::Pow(base, exp))
    }

    pub fn neg(&self) -> Expr {
        Expr::mul(vec![Expr::integer(-1), self.clone()])
    }

    pub fn sub(&self, other: &Expr) -> Expr {
        Expr::add(vec![self.clone(), other.neg()])
    }

    pub fn recip(&self) -> Expr {
        Expr::pow(self.clone(), Expr::integer(-1))
    }

    pub fn div(&self, other: &Expr) -> Expr {
        Expr::mul(vec![self.clone(), other.recip()])
    }

    /// Every distinct subtree, including `self` and all leaves.
    pub fn subexpressions(&self) -> Vec<Expr> {
        let mut seen = std::collections::BTreeSet::new();
        let mut stack = vec![self.clone()];
        while let Some(e) = stack.pop() {
            stack.extend(e.children());
            seen.insert(e);
        }
        seen.into_iter().collect()
    }

    /// All symbol names, excluding numeric literals and the placeholder.
    pub fn symbols(&self) -> SymbolSet {
        let mut out = SymbolSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut SymbolSet) {
        match self.kind() {
            ExprKind::Symbol(s) => {
                out.insert(s.clone());
            }
            _ => {
                for c in self.children() {
                    c.collect_symbols(out);
                }
            }
        }
    }

    /// True if `needle` occurs as a subtree.
    pub fn contains(&self, needle: &Expr) -> bool {
        if self == needle {
            return true;
        }
        if self.size() <= needle.size() {
            return false;
        }
        self.children().iter().any(|c| c.contains(needle))
    }

    pub fn latex(&self) -> String {
        latex::render(self)
    }

    /// Nested constructor form, e.g. `Add(Symbol('a'), Integer(2))`.
    pub fn tree(&self) -> String {
        match self.kind() {
            ExprKind::Symbol(s) => format!("Symbol('{s}')"),
            ExprKind::Number(q) if q.is_integer() => format!("Integer({})", q.numer()),
            ExprKind::Number(q) => format!("Rational({}, {})", q.numer(), q.denom()),
            ExprKind::Placeholder => "Placeholder()".to_string(),
            ExprKind::Add(c) => format!("Add({})", tree_list(c)),
            ExprKind::Mul(c) => format!("Mul({})", tree_list(c)),
            ExprKind::NcMul(c) => format!("NcMul({})", tree_list(c)),
            ExprKind::Pow(b, e) => format!("Pow({}, {})", b.tree(), e.tree()),
            ExprKind::Func(name, args) => format!("Function('{name}', {})", tree_list(args)),
        }
    }

    fn raw(kind: ExprKind) -> Expr {
        let (size, nc, placeholder) = match &kind {
            ExprKind::Symbol(_) | ExprKind::Number(_) => (1, false, false),
            ExprKind::Placeholder => (1, false, true),
            ExprKind::Add(c) | ExprKind::Mul(c) | ExprKind::Func(_, c) => fold_flags(c.iter()),
            ExprKind::NcMul(c) => {
                let (s, _, p) = fold_flags(c.iter());
                (s, true, p)
            }
            ExprKind::Pow(b, e) => fold_flags([b, e].into_iter()),
        };
        let text = render_text(&kind);
        Expr(Arc::new(Node { kind, text, size, nc, placeholder }))
    }
}

fn fold_flags<'a>(children: impl Iterator<Item = &'a Expr>) -> (usize, bool, bool) {
    let mut size = 1;
    let mut nc = false;
    let mut placeholder = false;
    for c in children {
        size += c.size();
        nc |= c.is_noncommutative();
        placeholder |= c.contains_placeholder();
    }
    (size, nc, placeholder)
}

fn tree_list(c: &[Expr]) -> String {
    c.iter().map(Expr::tree).collect::<Vec<_>>().join(", ")
}

/// Splits `t` into a numeric coefficient and the remaining factor.
fn split_coefficient(t: &Expr) -> (BigRational, Expr) {
    if let ExprKind::Mul(children) = t.kind() {
        if let ExprKind::Number(q) = children[0].kind() {
            let rest = &children[1..];
            let rest = if rest.len() == 1 {
                rest[0].clone()
            } else {
                Expr::raw(ExprKind::Mul(rest.to_vec()))
            };
            return (q.clone(), rest);
        }
    }
    (rational(1), t.clone())
}

/// `coeff * rest` for a `rest` that already is a canonical, coefficient-free
/// term.
fn scale(coeff: BigRational, rest: Expr) -> Expr {
    if is_one(&coeff) {
        return rest;
    }
    let mut children = vec![Expr::number(coeff)];
    match rest.kind() {
        ExprKind::Mul(c) => children.extend(c.iter().cloned()),
        _ => children.push(rest),
    }
    Expr::raw(ExprKind::Mul(children))
}

/// Whether a power's exponent renders as a denominator.
fn negative_exponent(e: &Expr) -> bool {
    match e.kind() {
        ExprKind::Number(q) => q.is_negative(),
        ExprKind::Mul(c) => c[0].as_number().is_some_and(Signed::is_negative),
        _ => false,
    }
}

fn is_atom(e: &Expr) -> bool {
    match e.kind() {
        ExprKind::Symbol(_) | ExprKind::Placeholder | ExprKind::Func(..) => true,
        ExprKind::Number(q) => is_natural(q),
        _ => false,
    }
}

fn wrap(s: &str) -> String {
    format!("({s})")
}

/// Rendering of `base**exp` for an exponent that is not negative.
fn power_text(base: &Expr, exp: &Expr) -> String {
    let b = if is_atom(base) { base.text().to_string() } else { wrap(base.text()) };
    if exp.as_number().is_some_and(One::is_one) {
        return b;
    }
    let e = if is_atom(exp) { exp.text().to_string() } else { wrap(exp.text()) };
    format!("{b}**{e}")
}

/// Text of a factor in a `*`-separated numerator or denominator.
fn factor_text(f: &Expr) -> String {
    match f.kind() {
        ExprKind::Add(_) => wrap(f.text()),
        _ => f.text().to_string(),
    }
}

fn by_canonical_order(a: &String, b: &String) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

fn render_text(kind: &ExprKind) -> String {
    match kind {
        ExprKind::Symbol(s) => s.clone(),
        ExprKind::Placeholder => "?".to_string(),
        ExprKind::Number(q) => {
            if q.is_integer() {
                q.numer().to_string()
            } else {
                format!("{}/{}", q.numer(), q.denom())
            }
        }
        ExprKind::Add(terms) => {
            let mut out = String::new();
            for (i, t) in terms.iter().enumerate() {
                let s = t.text();
                if i == 0 {
                    out.push_str(s);
                } else if let Some(rest) = s.strip_prefix('-') {
                    out.push_str(" - ");
                    out.push_str(rest);
                } else {
                    out.push_str(" + ");
                    out.push_str(s);
                }
            }
            out
        }
        ExprKind::Mul(factors) => {
            let (coeff, rest) = match factors[0].kind() {
                ExprKind::Number(q) => (q.clone(), &factors[1..]),
                _ => (rational(1), &factors[..]),
            };
            let mut num = Vec::new();
            let mut den = Vec::new();
            for f in rest {
                match f.kind() {
                    ExprKind::Pow(b, e) if negative_exponent(e) && !b.is_zero() => {
                        den.push(power_text_or_factor(b, &e.neg()));
                    }
                    _ => num.push(factor_text(f)),
                }
            }
            num.sort_by(by_canonical_order);
            den.sort_by(by_canonical_order);
            let p = coeff.numer().abs();
            if !p.is_one() {
                num.insert(0, p.to_string());
            }
            if !coeff.denom().is_one() {
                den.insert(0, coeff.denom().to_string());
            }
            let sign = if coeff.is_negative() { "-" } else { "" };
            let numerator = if num.is_empty() { "1".to_string() } else { num.join("*") };
            match den.len() {
                0 => format!("{sign}{numerator}"),
                1 => format!("{sign}{numerator}/{}", den[0]),
                _ => format!("{sign}{numerator}/({})", den.join("*")),
            }
        }
        ExprKind::NcMul(children) => children
            .iter()
            .map(|c| {
                let needs_parens = match c.kind() {
                    ExprKind::Add(_) | ExprKind::Mul(_) => true,
                    ExprKind::Number(q) => !is_natural(q),
                    ExprKind::Pow(_, e) => negative_exponent(e),
                    _ => false,
                };
                if needs_parens {
                    wrap(c.text())
                } else {
                    c.text().to_string()
                }
            })
            .collect::<Vec<_>>()
            .join("@"),
        ExprKind::Pow(b, e) => {
            // 1/0 stays a power so that no zero lands in a denominator
            if negative_exponent(e) && !b.is_zero() {
                format!("1/{}", power_text_or_factor(b, &e.neg()))
            } else {
                power_text(b, e)
            }
        }
        ExprKind::Func(name, args) => format!(
            "{name}({})",
            args.iter().map(Expr::text).collect::<Vec<_>>().join(", ")
        ),
    }
}

/// Denominator text of `base**exp` (exp positive).
fn power_text_or_factor(base: &Expr, exp: &Expr) -> String {
    if exp.as_number().is_some_and(One::is_one) {
        match base.kind() {
            ExprKind::Add(_) | ExprKind::Mul(_) => wrap(base.text()),
            ExprKind::Number(q) if !is_natural(q) => wrap(base.text()),
            ExprKind::Pow(_, e) if negative_exponent(e) => wrap(base.text()),
            _ => base.text().to_string(),
        }
    } else {
        power_text(base, exp)
    }
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.text == other.0.text
    }
}

impl Eq for Expr {}

impl Hash for Expr {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.text.hash(state);
    }
}

impl Ord for Expr {
    /// Canonical order: rendering length, then lexicographic.
    fn cmp(&self, other: &Self) -> Ordering {
        self.text()
            .len()
            .cmp(&other.text().len())
            .then_with(|| self.text().cmp(other.text()))
    }
}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.text())
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({})", self.text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    #[test]
    fn sums_are_ordered_by_length_then_lexicographically() {
        let e = Expr::add(vec![Expr::symbol("b"), Expr::symbol("a")]);
        assert_eq!(e.text(), "a + b");
        assert_eq!(p("x*y + z").text(), "z + x*y");
    }

    #[test]
    fn like_terms_and_bases_collect() {
        assert_eq!(p("x + x").text(), "2*x");
        assert_eq!(p("x*x").text(), "x**2");
        assert_eq!(p("x - x").text(), "0");
        assert_eq!(p("a*b/a").text(), "b");
        assert_eq!(p("2*3 + 1").text(), "7");
    }

    #[test]
    fn division_renders_as_denominator() {
        let e = p("h*w/2");
        assert_eq!(e.text(), "h*w/2");
        match e.kind() {
            ExprKind::Mul(c) => {
                assert_eq!(c[0].as_number().unwrap(), &BigRational::new(1.into(), 2.into()));
                assert_eq!(c.len(), 3);
            }
            other => panic!("expected product, got {other:?}"),
        }
        assert_eq!(p("p**2/(2*m)").text(), "p**2/(2*m)");
        assert_eq!(p("1/x").text(), "1/x");
        assert_eq!(p("-a/b").text(), "-a/b");
    }

    #[test]
    fn integer_powers_distribute_over_products() {
        assert_eq!(p("(hbar*k)**2").text(), "k**2*hbar**2");
        assert_eq!(p("(x**2)**3").text(), "x**6");
        assert_eq!(p("2**3").text(), "8");
        assert_eq!(p("2**(1/2)").text(), "2**(1/2)");
    }

    #[test]
    fn noncommutative_order_is_kept() {
        let ab = p("a@b");
        let ba = p("b@a");
        assert_ne!(ab, ba);
        assert_eq!(p("2*b@a").text(), "2*b@a");
        // two operator factors in a commutative product stay in order
        let e = Expr::mul(vec![p("c@d"), p("a@b")]);
        assert_eq!(e.text(), "c@d@a@b");
        assert_eq!(p("a@a").text(), "a**2");
    }

    #[test]
    fn subexpressions_of_small_trees() {
        let texts = |e: &Expr| e.subexpressions().iter().map(|s| s.text().to_string()).collect::<Vec<_>>();
        assert_eq!(texts(&p("x")), vec!["x"]);
        assert_eq!(texts(&p("x + x*y")), vec!["x", "y", "x*y", "x + x*y"]);
        assert_eq!(texts(&p("a**2")), vec!["2", "a", "a**2"]);
    }

    #[test]
    fn symbols_exclude_numbers_and_placeholder() {
        let names = |s: &str| p(s).symbols().iter().cloned().collect::<Vec<_>>();
        assert_eq!(names("2*x + y"), vec!["x", "y"]);
        assert!(p("?").symbols().is_empty());
        assert_eq!(
            names("hbar*omega_0*(a'@a + b'@b)"),
            vec!["a", "a'", "b", "b'", "hbar", "omega_0"]
        );
    }

    #[test]
    fn tree_form() {
        assert_eq!(p("x/2").tree(), "Mul(Rational(1, 2), Symbol('x'))");
        assert_eq!(p("f(x)").tree(), "Function('f', Symbol('x'))");
    }
}
