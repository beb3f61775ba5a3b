//! String similarity measures on rendered states.
//!
//! All functions operate on Unicode scalar values, not bytes. The three edit
//! distances return counts; the Jaro family returns similarities in `[0, 1]`
//! and [`Measure::distance`] turns them into `1 - sim`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;
use crate::state::{EquationState, Rendering};

pub const DEFAULT_JW_SCALING: f64 = 0.1;
pub const DEFAULT_JW_PREFIX_CAP: usize = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimilarityError {
    #[error("Jaro-Winkler scaling factor {0} outside [0, 0.25]")]
    Scaling(f64),
    #[error("unknown measure {0:?}")]
    UnknownMeasure(String),
}

fn chars(s: &str) -> Vec<char> {
    s.chars().collect()
}

/// Minimum number of single-character insertions, deletions and
/// substitutions.
pub fn levenshtein(a: &str, b: &str) -> usize {
    levenshtein_chars(&chars(a), &chars(b))
}

pub(crate) fn levenshtein_chars(a: &[char], b: &[char]) -> usize {
    levenshtein_bounded(a, b, usize::MAX).expect("unbounded")
}

/// Levenshtein distance, or `None` as soon as it must exceed `bound`.
pub(crate) fn levenshtein_bounded(a: &[char], b: &[char], bound: usize) -> Option<usize> {
    if a.len().abs_diff(b.len()) > bound {
        return None;
    }
    if a.is_empty() {
        return Some(b.len());
    }
    if b.is_empty() {
        return Some(a.len());
    }
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, ca) in a.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        let mut row_min = row[0];
        for (j, cb) in b.iter().enumerate() {
            let above = row[j + 1];
            let cost = usize::from(ca != cb);
            let v = (diag + cost).min(above + 1).min(row[j] + 1);
            row[j + 1] = v;
            row_min = row_min.min(v);
            diag = above;
        }
        if row_min > bound {
            return None;
        }
    }
    Some(row[b.len()]).filter(|&d| d <= bound)
}

/// Unrestricted Damerau-Levenshtein distance: adjacent transpositions count
/// as one edit and substrings may be edited more than once.
pub fn damerau_levenshtein(a: &str, b: &str) -> usize {
    damerau_levenshtein_chars(&chars(a), &chars(b))
}

pub(crate) fn damerau_levenshtein_chars(a: &[char], b: &[char]) -> usize {
    damerau_bounded(a, b, usize::MAX).expect("unbounded")
}

/// Unrestricted Damerau-Levenshtein, or `None` once every cell of a row
/// exceeds `bound` (row minima never decrease).
pub(crate) fn damerau_bounded(a: &[char], b: &[char], bound: usize) -> Option<usize> {
    let (n, m) = (a.len(), b.len());
    if n.abs_diff(m) > bound {
        return None;
    }
    if n == 0 {
        return Some(m);
    }
    if m == 0 {
        return Some(n);
    }
    let max = n + m;
    let width = m + 2;
    // (n + 2) x (m + 2) table with a sentinel border
    let mut d = vec![0usize; (n + 2) * width];
    d[0] = max;
    for i in 0..=n {
        d[(i + 1) * width] = max;
        d[(i + 1) * width + 1] = i;
    }
    for j in 0..=m {
        d[j + 1] = max;
        d[width + j + 1] = j;
    }
    let mut last_row: HashMap<char, usize> = HashMap::new();
    for i in 1..=n {
        let mut last_col = 0;
        let mut row_min = i;
        for j in 1..=m {
            let k = last_row.get(&b[j - 1]).copied().unwrap_or(0);
            let l = last_col;
            let cost = if a[i - 1] == b[j - 1] {
                last_col = j;
                0
            } else {
                1
            };
            let sub = d[i * width + j] + cost;
            let ins = d[(i + 1) * width + j] + 1;
            let del = d[i * width + j + 1] + 1;
            let trans = d[k * width + l] + (i - k - 1) + 1 + (j - l - 1);
            let v = sub.min(ins).min(del).min(trans);
            d[(i + 1) * width + j + 1] = v;
            row_min = row_min.min(v);
        }
        if row_min > bound {
            return None;
        }
        last_row.insert(a[i - 1], i);
    }
    Some(d[(n + 1) * width + m + 1]).filter(|&v| v <= bound)
}

/// Optimal string alignment distance (restricted Damerau-Levenshtein): no
/// substring is edited after being transposed.
pub fn osa_distance(a: &str, b: &str) -> usize {
    osa_chars(&chars(a), &chars(b))
}

fn osa_chars(a: &[char], b: &[char]) -> usize {
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
            let cost = usize::from(a[i - 1] != b[j - 1]);
            let mut v = (d[i - 1][j] + 1).min(d[i][j - 1] + 1).min(d[i - 1][j - 1] + cost);
            if i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1] {
                v = v.min(d[i - 2][j - 2] + 1);
            }
            d[i][j] = v;
        }
    }
    d[n][m]
}

/// Substitutions over the common length plus the length difference.
pub fn hamming(a: &str, b: &str) -> usize {
    hamming_iter(a.chars(), b.chars())
}

fn hamming_iter<I: Iterator<Item = char>>(mut ia: I, mut ib: I) -> usize {
    let mut count = 0;
    loop {
        match (ia.next(), ib.next()) {
            (Some(x), Some(y)) => count += usize::from(x != y),
            (Some(_), None) => return count + 1 + ia.count(),
            (None, Some(_)) => return count + 1 + ib.count(),
            (None, None) => return count,
        }
    }
}

/// Matching characters and half-transpositions of the Jaro measure.
pub(crate) fn jaro_counts(a: &[char], b: &[char]) -> (usize, usize) {
    let window = (a.len().max(b.len()) / 2).saturating_sub(1);
    let mut b_used = vec![false; b.len()];
    let mut a_matched = Vec::new();
    for (i, ca) in a.iter().enumerate() {
        let lo = i.saturating_sub(window);
        let hi = (i + window + 1).min(b.len());
        for j in lo..hi {
            if !b_used[j] && b[j] == *ca {
                b_used[j] = true;
                a_matched.push(*ca);
                break;
            }
        }
    }
    let b_matched = b.iter().zip(&b_used).filter(|(_, used)| **used).map(|(c, _)| c);
    let transpositions = a_matched.iter().zip(b_matched).filter(|(x, y)| x != y).count();
    (a_matched.len(), transpositions)
}

/// Jaro similarity. Two empty strings are identical (similarity 1).
pub fn jaro<F: Real>(a: &str, b: &str) -> F {
    jaro_chars(&chars(a), &chars(b))
}

fn jaro_chars<F: Real>(a: &[char], b: &[char]) -> F {
    if a.is_empty() && b.is_empty() {
        return F::one();
    }
    let (m, transpositions) = jaro_counts(a, b);
    if m == 0 {
        return F::zero();
    }
    let m_f = F::from_count(m);
    let t = F::from_count(transpositions) / F::from_count(2);
    let three = F::from_count(3);
    (m_f / F::from_count(a.len()) + m_f / F::from_count(b.len()) + (m_f - t) / m_f) / three
}

/// Length of the common prefix, capped.
pub fn common_prefix(a: &str, b: &str, cap: usize) -> usize {
    a.chars().zip(b.chars()).take(cap).take_while(|(x, y)| x == y).count()
}

/// Jaro-Winkler similarity `sim_J + l * p * (1 - sim_J)`.
pub fn jaro_winkler<F: Real>(a: &str, b: &str, p: F, cap: usize) -> Result<F, SimilarityError> {
    let limit = F::from_f64(0.25).unwrap();
    if !(p >= F::zero() && p <= limit) {
        return Err(SimilarityError::Scaling(p.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(jaro_winkler_chars(&chars(a), &chars(b), p, cap))
}

fn jaro_winkler_chars<F: Real>(a: &[char], b: &[char], p: F, cap: usize) -> F {
    let sim = jaro_chars::<F>(a, b);
    let prefix = a.iter().zip(b).take(cap).take_while(|(x, y)| x == y).count();
    sim + F::from_count(prefix) * p * (F::one() - sim)
}

/// A similarity measure `M: S x S -> R>=0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Measure {
    Levenshtein,
    DamerauLevenshtein,
    /// Restricted Damerau-Levenshtein.
    Osa,
    Hamming,
    Jaro,
    JaroWinkler { p: f64, cap: usize },
}

impl Measure {
    pub const ALL_DEFAULT: [Measure; 5] = [
        Measure::Levenshtein,
        Measure::DamerauLevenshtein,
        Measure::Hamming,
        Measure::Jaro,
        Measure::JaroWinkler { p: DEFAULT_JW_SCALING, cap: DEFAULT_JW_PREFIX_CAP },
    ];

    pub fn jaro_winkler(p: f64) -> Result<Measure, SimilarityError> {
        if !(0.0..=0.25).contains(&p) {
            return Err(SimilarityError::Scaling(p));
        }
        Ok(Measure::JaroWinkler { p, cap: DEFAULT_JW_PREFIX_CAP })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Measure::Levenshtein => "levenshtein",
            Measure::DamerauLevenshtein => "damerau",
            Measure::Osa => "osa",
            Measure::Hamming => "hamming",
            Measure::Jaro => "jaro",
            Measure::JaroWinkler { .. } => "jaro-winkler",
        }
    }

    /// Distance between two strings; 0 iff they are identical.
    pub fn between<F: Real>(&self, a: &str, b: &str) -> F {
        self.between_chars(&chars(a), &chars(b))
    }

    pub fn between_chars<F: Real>(&self, a: &[char], b: &[char]) -> F {
        self.between_bounded(a, b, None).expect("unbounded")
    }

    /// Like [`Measure::between_chars`], but may give up with `None` once the
    /// distance is known to exceed `bound`.
    pub fn between_bounded<F: Real>(&self, a: &[char], b: &[char], bound: Option<F>) -> Option<F> {
        if bound.is_some_and(|x| x < F::zero()) {
            return None;
        }
        let int_bound = bound.map_or(usize::MAX, |x| x.floor().to_usize().unwrap_or(usize::MAX));
        match *self {
            Measure::Levenshtein => levenshtein_bounded(a, b, int_bound).map(F::from_count),
            Measure::DamerauLevenshtein => damerau_bounded(a, b, int_bound).map(F::from_count),
            Measure::Osa => Some(F::from_count(osa_chars(a, b))),
            Measure::Hamming => {
                Some(F::from_count(hamming_iter(a.iter().copied(), b.iter().copied())))
            }
            Measure::Jaro => Some(F::one() - jaro_chars::<F>(a, b)),
            Measure::JaroWinkler { p, cap } => {
                // p is validated at construction; clamp in case of direct literals
                let p = F::from_f64(p.clamp(0.0, 0.25)).unwrap();
                Some(F::one() - jaro_winkler_chars(a, b, p, cap))
            }
        }
    }

    /// Lower bound from the lengths alone.
    pub fn length_bound<F: Real>(&self, a: usize, b: usize) -> F {
        match self {
            Measure::Jaro | Measure::JaroWinkler { .. } => F::zero(),
            _ => F::from_count(a.abs_diff(b)),
        }
    }

    /// Distance between the renderings of two states.
    pub fn distance<F: Real>(&self, s: &EquationState, t: &EquationState, form: Rendering) -> F {
        if form == Rendering::Text && s == t {
            return F::zero();
        }
        self.between(&s.render(form), &t.render(form))
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = SimilarityError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "levenshtein" | "lev" => Ok(Measure::Levenshtein),
            "damerau" | "damerau-levenshtein" | "dl" => Ok(Measure::DamerauLevenshtein),
            "osa" => Ok(Measure::Osa),
            "hamming" => Ok(Measure::Hamming),
            "jaro" => Ok(Measure::Jaro),
            "jaro-winkler" | "jw" => {
                Ok(Measure::JaroWinkler { p: DEFAULT_JW_SCALING, cap: DEFAULT_JW_PREFIX_CAP })
            }
            _ => Err(SimilarityError::UnknownMeasure(s.to_string())),
        }
    }
}
