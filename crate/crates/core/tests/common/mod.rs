#![allow(dead_code)]

use std::collections::{HashMap, HashSet, VecDeque};

use derivekit::expr::Expr;
use derivekit::kb::parse_kb;
use derivekit::scalar::Field;
use derivekit::{EquationState, Rational};
use num_bigint::BigInt;
use proptest::prelude::*;

pub fn seeds() -> Vec<EquationState> {
    parse_kb(include_str!("../data/seeds.kb"), "seeds.kb").unwrap()
}

pub fn state(text: &str) -> EquationState {
    EquationState::parse(text).unwrap()
}

// ---- string metric oracles ------------------------------------------------

fn chars(s: &str) -> Vec<char> {
    s.chars().collect()
}

/// Top-down recursion over prefix lengths.
pub fn levenshtein(a: &str, b: &str) -> usize {
    fn go(a: &[char], b: &[char], memo: &mut HashMap<(usize, usize), usize>) -> usize {
        let key = (a.len(), b.len());
        if let Some(&d) = memo.get(&key) {
            return d;
        }
        let d = match (a.split_last(), b.split_last()) {
            (None, _) => b.len(),
            (_, None) => a.len(),
            (Some((x, ra)), Some((y, rb))) => (go(ra, b, memo) + 1)
                .min(go(a, rb, memo) + 1)
                .min(go(ra, rb, memo) + usize::from(x != y)),
        };
        memo.insert(key, d);
        d
    }
    go(&chars(a), &chars(b), &mut HashMap::new())
}

/// Restricted transpositions: a swapped pair is never edited again.
pub fn osa(a: &str, b: &str) -> usize {
    fn go(a: &[char], b: &[char], memo: &mut HashMap<(usize, usize), usize>) -> usize {
        let key = (a.len(), b.len());
        if let Some(&d) = memo.get(&key) {
            return d;
        }
        let (n, m) = key;
        let d = if n == 0 {
            m
        } else if m == 0 {
            n
        } else {
            let mut d = (go(&a[..n - 1], b, memo) + 1)
                .min(go(a, &b[..m - 1], memo) + 1)
                .min(go(&a[..n - 1], &b[..m - 1], memo) + usize::from(a[n - 1] != b[m - 1]));
            if n > 1 && m > 1 && a[n - 1] == b[m - 2] && a[n - 2] == b[m - 1] {
                d = d.min(go(&a[..n - 2], &b[..m - 2], memo) + 1);
            }
            d
        };
        memo.insert(key, d);
        d
    }
    go(&chars(a), &chars(b), &mut HashMap::new())
}

/// Unrestricted Damerau-Levenshtein: the transposition case ranges over
/// every earlier pair `(k, l)` with `a[k] = b[j]` and `a[i] = b[l]`, paying
/// for the characters deleted and inserted in between.
pub fn damerau(a: &str, b: &str) -> usize {
    let (a, b) = (chars(a), chars(b));
    let (n, m) = (a.len(), b.len());
    let mut d = vec![vec![0usize; m + 1]; n + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for j in 0..=m {
        d[0][j] = j;
    }
    for i in 1..=n {
        for j in 1..=m {
            let mut best = (d[i - 1][j] + 1)
                .min(d[i][j - 1] + 1)
                .min(d[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1]));
            for k in 1..i {
                for l in 1..j {
                    if a[k - 1] == b[j - 1] && a[i - 1] == b[l - 1] {
                        best = best.min(d[k - 1][l - 1] + (i - k - 1) + 1 + (j - l - 1));
                    }
                }
            }
            d[i][j] = best;
        }
    }
    d[n][m]
}

/// Shortest edit path by breadth-first search over insert, delete,
/// substitute and adjacent swap, with intermediate strings capped at
/// `max_len` characters.
pub fn edit_graph_distance(a: &str, b: &str, alphabet: &[char], max_len: usize) -> usize {
    let start: Vec<char> = chars(a);
    let goal: Vec<char> = chars(b);
    let mut seen = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([(start, 0usize)]);
    while let Some((s, d)) = queue.pop_front() {
        if s == goal {
            return d;
        }
        let mut next = Vec::new();
        for i in 0..s.len() {
            let mut t = s.clone();
            t.remove(i);
            next.push(t);
            for &c in alphabet {
                let mut t = s.clone();
                t[i] = c;
                next.push(t);
            }
            if i + 1 < s.len() {
                let mut t = s.clone();
                t.swap(i, i + 1);
                next.push(t);
            }
        }
        if s.len() < max_len {
            for i in 0..=s.len() {
                for &c in alphabet {
                    let mut t = s.clone();
                    t.insert(i, c);
                    next.push(t);
                }
            }
        }
        for t in next {
            if seen.insert(t.clone()) {
                queue.push_back((t, d + 1));
            }
        }
    }
    unreachable!("every string is reachable")
}

/// Position-wise mismatches with the shorter string padded by a sentinel.
pub fn hamming(a: &str, b: &str) -> usize {
    let (a, b) = (chars(a), chars(b));
    (0..a.len().max(b.len())).filter(|&i| a.get(i) != b.get(i)).count()
}

/// `(m, t)` straight from the definition: characters match when equal and
/// no further apart than the window, each character of `b` matching at most
/// once, scanning `a` left to right; `t` counts matched characters that
/// disagree when both matched subsequences are read in order.
pub fn jaro_counts(a: &str, b: &str) -> (usize, usize) {
    let (a, b) = (chars(a), chars(b));
    let window = (a.len().max(b.len()) / 2).saturating_sub(1);
    let mut partner: Vec<Option<usize>> = vec![None; a.len()];
    let mut taken: HashSet<usize> = HashSet::new();
    for i in 0..a.len() {
        partner[i] = (0..b.len())
            .filter(|&j| i.abs_diff(j) <= window)
            .find(|&j| a[i] == b[j] && !taken.contains(&j));
        if let Some(j) = partner[i] {
            taken.insert(j);
        }
    }
    let from_a: Vec<char> = (0..a.len()).filter(|&i| partner[i].is_some()).map(|i| a[i]).collect();
    let mut js: Vec<usize> = taken.into_iter().collect();
    js.sort_unstable();
    let from_b: Vec<char> = js.iter().map(|&j| b[j]).collect();
    let t = from_a.iter().zip(&from_b).filter(|(x, y)| x != y).count();
    (from_a.len(), t)
}

pub fn jaro(a: &str, b: &str) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    let (m, t) = jaro_counts(a, b);
    if m == 0 {
        return 0.0;
    }
    let (la, lb) = (a.chars().count() as f64, b.chars().count() as f64);
    let m = m as f64;
    (m / la + m / lb + (m - t as f64 / 2.0) / m) / 3.0
}

pub fn jaro_winkler(a: &str, b: &str, p: f64) -> f64 {
    let sim = jaro(a, b);
    let l = a.chars().zip(b.chars()).take(4).take_while(|(x, y)| x == y).count();
    sim + l as f64 * p * (1.0 - sim)
}

pub fn short_string(alphabet: &'static str, max: usize) -> impl Strategy<Value = String> {
    proptest::collection::vec(proptest::sample::select(chars(alphabet)), 0..=max)
        .prop_map(|v| v.into_iter().collect())
}

// ---- raw expression trees -------------------------------------------------

/// An expression tree that has not been canonicalized, evaluated by
/// direct recursion.
#[derive(Debug, Clone)]
pub enum Raw {
    Sym(&'static str),
    Int(i64),
    Frac(i64, i64),
    Add(Vec<Raw>),
    Mul(Vec<Raw>),
    Nc(Vec<Raw>),
    Sub(Box<Raw>, Box<Raw>),
    Div(Box<Raw>, Box<Raw>),
    Pow(Box<Raw>, i64),
    Neg(Box<Raw>),
    Func(&'static str, Vec<Raw>),
}

pub const NAMES: [&str; 8] = ["a", "b", "k", "m", "x", "omega_0", "a'", "hbar"];

pub fn raw() -> impl Strategy<Value = Raw> {
    let leaf = prop_oneof![
        4 => proptest::sample::select(NAMES.to_vec()).prop_map(Raw::Sym),
        1 => (-3i64..=5).prop_map(Raw::Int),
        1 => ((-3i64..=3), (2i64..=4)).prop_map(|(p, q)| Raw::Frac(p, q)),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            proptest::collection::vec(inner.clone(), 2..=3).prop_map(Raw::Add),
            proptest::collection::vec(inner.clone(), 2..=3).prop_map(Raw::Mul),
            proptest::collection::vec(inner.clone(), 2..=3).prop_map(Raw::Nc),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Raw::Sub(a.into(), b.into())),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Raw::Div(a.into(), b.into())),
            (inner.clone(), -2i64..=3).prop_map(|(a, n)| Raw::Pow(a.into(), n)),
            inner.clone().prop_map(|a| Raw::Neg(a.into())),
            proptest::collection::vec(inner, 1..=2).prop_map(|v| Raw::Func("f", v)),
        ]
    })
}

impl Raw {
    pub fn build(&self) -> Expr {
        let all = |v: &[Raw]| v.iter().map(Raw::build).collect::<Vec<_>>();
        match self {
            Raw::Sym(s) => Expr::symbol(*s),
            Raw::Int(n) => Expr::integer(*n),
            Raw::Frac(p, q) => Expr::number(Rational::new(BigInt::from(*p), BigInt::from(*q))),
            Raw::Add(v) => Expr::add(all(v)),
            Raw::Mul(v) => Expr::mul(all(v)),
            Raw::Nc(v) => Expr::nc_mul(all(v)),
            Raw::Sub(a, b) => a.build().sub(&b.build()),
            Raw::Div(a, b) => a.build().div(&b.build()),
            Raw::Pow(a, n) => Expr::pow(a.build(), Expr::integer(*n)),
            Raw::Neg(a) => a.build().neg(),
            Raw::Func(f, v) => Expr::func(*f, all(v)),
        }
    }

    /// Direct evaluation; `None` on division by zero or an uninterpreted
    /// function.
    pub fn eval<T: Field>(&self, env: &dyn Fn(&str) -> T) -> Option<T> {
        Some(match self {
            Raw::Sym(s) => env(s),
            Raw::Int(n) => T::from_rational(&Rational::from_integer((*n).into()))?,
            Raw::Frac(p, q) => T::from_rational(&Rational::new((*p).into(), (*q).into()))?,
            Raw::Add(v) => {
                let mut acc = T::zero();
                for x in v {
                    acc = acc + x.eval(env)?;
                }
                acc
            }
            Raw::Mul(v) | Raw::Nc(v) => {
                let mut acc = T::one();
                for x in v {
                    acc = acc * x.eval(env)?;
                }
                acc
            }
            Raw::Sub(a, b) => a.eval(env)? - b.eval(env)?,
            Raw::Div(a, b) => {
                let d = b.eval(env)?;
                if d == T::zero() {
                    return None;
                }
                a.eval(env)? / d
            }
            Raw::Pow(a, n) => a.eval(env)?.powi(*n)?,
            Raw::Neg(a) => -a.eval(env)?,
            Raw::Func(f, v) => {
                let args: Option<Vec<T>> = v.iter().map(|x| x.eval(env)).collect();
                T::apply(f, &args?)?
            }
        })
    }
}

/// Small positive integer values for the test symbols.
pub fn integer_env(values: &[i64; NAMES.len()]) -> impl Fn(&str) -> Rational + '_ {
    move |name: &str| {
        let i = NAMES.iter().position(|n| *n == name).unwrap_or(0);
        Rational::from_integer(values[i].into())
    }
}
