//! LaTeX emission.
//!
//! | text form          | LaTeX                        |
//! |--------------------|------------------------------|
//! | `hbar`, `omega`    | `\hbar`, `\omega`            |
//! | `omega_0`          | `\omega_{0}`                 |
//! | `a'`               | `a^{\dagger}`                |
//! | `x**2`             | `x^{2}`                      |
//! | `a/b`              | `\frac{a}{b}`                |
//! | `a@b`              | `a b`                        |
//! | `Sum(e, q)`        | `\sum_{q} e`                 |
//! | `f(x)`             | `\operatorname{f}\left(x\right)` |
//!
//! Terms and factors appear in the same order as in the text form.

use num_traits::{One, Signed};

use super::{is_atom, negative_exponent, Expr, ExprKind};

const GREEK: &[&str] = &[
    "alpha", "beta", "gamma", "delta", "epsilon", "varepsilon", "zeta", "eta", "theta",
    "vartheta", "iota", "kappa", "lambda", "mu", "nu", "xi", "pi", "rho", "sigma", "tau",
    "upsilon", "phi", "varphi", "chi", "psi", "omega", "Gamma", "Delta", "Theta", "Lambda",
    "Xi", "Pi", "Sigma", "Upsilon", "Phi", "Psi", "Omega", "hbar", "ell", "partial", "nabla",
];

const NAMED_FUNCTIONS: &[&str] = &["sin", "cos", "tan", "exp", "log", "ln", "sinh", "cosh", "tanh"];

fn symbol_core(name: &str) -> String {
    match name.split_once('_') {
        Some((base, sub)) => format!("{}_{{{}}}", symbol_core(base), symbol_core(sub)),
        None if GREEK.contains(&name) => format!("\\{name}"),
        None => name.to_string(),
    }
}

pub(super) fn symbol(name: &str) -> String {
    let daggers = name.chars().rev().take_while(|&c| c == '\'').count();
    let core = symbol_core(&name[..name.len() - daggers]);
    if daggers == 0 {
        core
    } else {
        format!("{core}^{{{}}}", vec!["\\dagger"; daggers].join(" "))
    }
}

fn parens(s: &str) -> String {
    format!("\\left({s}\\right)")
}

fn factor(e: &Expr) -> String {
    match e.kind() {
        ExprKind::Add(_) => parens(&render(e)),
        _ => render(e),
    }
}

fn power(base: &Expr, exp: &Expr) -> String {
    let b = match base.kind() {
        ExprKind::Symbol(s) if !s.ends_with('\'') && !s.contains('_') => render(base),
        ExprKind::Symbol(_) => format!("{{{}}}", render(base)),
        _ if is_atom(base) => render(base),
        _ => parens(&render(base)),
    };
    if exp.as_number().is_some_and(One::is_one) {
        return b;
    }
    format!("{b}^{{{}}}", render(exp))
}

pub(super) fn render(e: &Expr) -> String {
    match e.kind() {
        ExprKind::Symbol(s) => symbol(s),
        ExprKind::Placeholder => "?".to_string(),
        ExprKind::Number(q) => {
            if q.is_integer() {
                q.numer().to_string()
            } else {
                let sign = if q.is_negative() { "-" } else { "" };
                format!("{sign}\\frac{{{}}}{{{}}}", q.numer().abs(), q.denom())
            }
        }
        ExprKind::Add(terms) => {
            let mut out = String::new();
            for (i, t) in terms.iter().enumerate() {
                let s = render(t);
                if i == 0 {
                    out.push_str(&s);
                } else if let Some(rest) = s.strip_prefix('-') {
                    out.push_str(" - ");
                    out.push_str(rest);
                } else {
                    out.push_str(" + ");
                    out.push_str(&s);
                }
            }
            out
        }
        ExprKind::Mul(factors) => {
            let (coeff, rest) = match factors[0].as_number() {
                Some(q) => (Some(q.clone()), &factors[1..]),
                None => (None, &factors[..]),
            };
            let mut num = Vec::new();
            let mut den = Vec::new();
            for f in rest {
                match f.kind() {
                    ExprKind::Pow(b, x) if negative_exponent(x) => den.push(power(b, &x.neg())),
                    _ => num.push(factor(f)),
                }
            }
            let mut sign = "";
            if let Some(q) = coeff {
                if q.is_negative() {
                    sign = "-";
                }
                let p = q.numer().abs();
                if !p.is_one() {
                    num.insert(0, p.to_string());
                }
                if !q.denom().is_one() {
                    den.insert(0, q.denom().to_string());
                }
            }
            let numerator = if num.is_empty() { "1".to_string() } else { num.join(" ") };
            if den.is_empty() {
                format!("{sign}{numerator}")
            } else {
                format!("{sign}\\frac{{{numerator}}}{{{}}}", den.join(" "))
            }
        }
        ExprKind::NcMul(children) => children
            .iter()
            .map(|c| match c.kind() {
                ExprKind::Add(_) | ExprKind::Mul(_) => parens(&render(c)),
                _ => render(c),
            })
            .collect::<Vec<_>>()
            .join(" "),
        ExprKind::Pow(b, x) => {
            if negative_exponent(x) {
                format!("\\frac{{1}}{{{}}}", power(b, &x.neg()))
            } else {
                power(b, x)
            }
        }
        ExprKind::Func(name, args) if name == "Sum" && args.len() == 2 => {
            format!("\\sum_{{{}}} {}", render(&args[1]), factor(&args[0]))
        }
        ExprKind::Func(name, args) => {
            let head = if NAMED_FUNCTIONS.contains(&name.as_str()) {
                format!("\\{name}")
            } else {
                format!("\\operatorname{{{name}}}")
            };
            let args = args.iter().map(render).collect::<Vec<_>>().join(", ");
            format!("{head}{}", parens(&args))
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::expr::parse;

    fn latex(s: &str) -> String {
        parse(s).unwrap().latex()
    }

    #[test]
    fn emission_table() {
        assert_eq!(latex("hbar**2"), "\\hbar^{2}");
        assert_eq!(latex("omega_0"), "\\omega_{0}");
        assert_eq!(latex("a'"), "a^{\\dagger}");
        assert_eq!(latex("a_q'**2"), "{a_{q}^{\\dagger}}^{2}");
        assert_eq!(latex("hbar*omega_0/2"), "\\frac{\\hbar \\omega_{0}}{2}");
        assert_eq!(latex("Sum(a_q'@a_q, q)"), "\\sum_{q} a_{q}^{\\dagger} a_{q}");
        assert_eq!(latex("a - b"), "a - b");
        assert_eq!(latex("sin(x)"), "\\sin\\left(x\\right)");
        assert_eq!(latex("1/x"), "\\frac{1}{x}");
        assert_eq!(latex("-1/2"), "-\\frac{1}{2}");
    }
}
