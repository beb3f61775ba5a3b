//! Derivation datasets: 10-column records, dummy end states, state roles.
//!
//! On disk a dataset is UTF-8 delimited text with a header row
//!
//! ```text
//! latex_len  latex_str  text_len  text_str  tree_len  tree_str  action  nsa  state_type  action_type
//! ```
//!
//! Fields containing the delimiter, quotes or line breaks are double-quoted
//! with `""` for a literal quote. `.tsv` files use tabs, `.csv` files commas.
//! Optional two-field rows before the header, `#tail_text` and
//! `#tail_latex`, give the closing dummy state; without them the closing
//! state is the last record with its LHS index dropped.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::action::is_consider_kb_name;
use crate::state::{ActionCategory, EquationState, Rendering, StateParseError, StateType};

pub const COLUMNS: [&str; 10] = [
    "latex_len",
    "latex_str",
    "text_len",
    "text_str",
    "tree_len",
    "tree_str",
    "action",
    "nsa",
    "state_type",
    "action_type",
];

const TAIL_TEXT: &str = "#tail_text";
const TAIL_LATEX: &str = "#tail_latex";

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Format { line: u64, message: String },
    #[error("line {line}: {column} is {declared} but the string has {actual} characters")]
    LengthMismatch { line: u64, column: &'static str, declared: usize, actual: usize },
    #[error("record {record}: {source}")]
    State { record: usize, source: StateParseError },
    #[error("dataset has no records")]
    Empty,
}

fn char_len(s: &str) -> usize {
    s.chars().count()
}

/// One dataset row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivationRecord {
    pub latex_len: usize,
    pub latex_str: String,
    pub text_len: usize,
    pub text_str: String,
    pub tree_len: usize,
    pub tree_str: String,
    pub action: String,
    pub nsa: String,
    pub state_type: String,
    pub action_type: String,
}

impl DerivationRecord {
    pub fn from_state(
        s: &EquationState,
        action: &str,
        nsa: &str,
        state_type: StateType,
        category: ActionCategory,
    ) -> Self {
        let (latex_str, text_str, tree_str) = (s.latex(), s.text(), s.tree());
        DerivationRecord {
            latex_len: char_len(&latex_str),
            latex_str,
            text_len: char_len(&text_str),
            text_str,
            tree_len: char_len(&tree_str),
            tree_str,
            action: action.to_string(),
            nsa: nsa.to_string(),
            state_type: state_type.as_str().to_string(),
            action_type: category.as_str().to_string(),
        }
    }

    pub fn string(&self, form: Rendering) -> &str {
        match form {
            Rendering::Text => &self.text_str,
            Rendering::Latex => &self.latex_str,
        }
    }

    pub fn state_type(&self) -> Option<StateType> {
        self.state_type.parse().ok()
    }

    pub fn action_type(&self) -> Option<ActionCategory> {
        self.action_type.parse().ok()
    }

    /// Parses the text column; the stored state type is attached when valid.
    pub fn state(&self) -> Result<EquationState, StateParseError> {
        let s = EquationState::parse(&self.text_str)?;
        Ok(match self.state_type() {
            Some(t) => s.with_type(t),
            None => s,
        })
    }

    fn check_lengths(&self, line: u64) -> Result<(), DatasetError> {
        for (column, declared, s) in [
            ("latex_len", self.latex_len, &self.latex_str),
            ("text_len", self.text_len, &self.text_str),
            ("tree_len", self.tree_len, &self.tree_str),
        ] {
            let actual = char_len(s);
            if actual != declared {
                return Err(DatasetError::LengthMismatch { line, column, declared, actual });
            }
        }
        Ok(())
    }
}

/// Records in derivation order plus the optional closing dummy state.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DerivationSequence {
    pub records: Vec<DerivationRecord>,
    pub tail_text: Option<String>,
    pub tail_latex: Option<String>,
}

fn delimiter_for(path: &Path) -> u8 {
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("csv") => b',',
        _ => b'\t',
    }
}

fn format_error(line: u64, message: impl Into<String>) -> DatasetError {
    DatasetError::Format { line, message: message.into() }
}

fn csv_error(e: csv::Error) -> DatasetError {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => DatasetError::Io(io),
        other => format_error(line, format!("{other:?}")),
    }
}

impl DerivationSequence {
    pub fn new(records: Vec<DerivationRecord>) -> Self {
        DerivationSequence { records, tail_text: None, tail_latex: None }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Total state count including both dummies.
    pub fn padded_len(&self) -> usize {
        self.records.len() + 2
    }

    pub fn load(path: &Path) -> Result<Self, DatasetError> {
        Self::read(File::open(path)?, delimiter_for(path))
    }

    pub fn save(&self, path: &Path) -> Result<(), DatasetError> {
        let mut f = File::create(path)?;
        self.write(&mut f, delimiter_for(path))?;
        f.flush()?;
        Ok(())
    }

    pub fn read<R: Read>(input: R, delimiter: u8) -> Result<Self, DatasetError> {
        let mut reader = csv::ReaderBuilder::new()
            .delimiter(delimiter)
            .has_headers(false)
            .flexible(true)
            .from_reader(input);
        let mut seq = DerivationSequence::default();
        let mut header_seen = false;
        let mut row = csv::StringRecord::new();
        while reader.read_record(&mut row).map_err(csv_error)? {
            let line = row.position().map_or(0, |p| p.line());
            if !header_seen {
                match row.get(0) {
                    Some(TAIL_TEXT) | Some(TAIL_LATEX) if row.len() == 2 => {
                        let value = row[1].to_string();
                        if &row[0] == TAIL_TEXT {
                            seq.tail_text = Some(value);
                        } else {
                            seq.tail_latex = Some(value);
                        }
                        continue;
                    }
                    _ => {}
                }
                let names: Vec<&str> = row.iter().map(str::trim).collect();
                if names != COLUMNS {
                    return Err(format_error(line, format!("expected header {COLUMNS:?}")));
                }
                header_seen = true;
                continue;
            }
            if row.len() != COLUMNS.len() {
                let msg = format!("expected {} fields, found {}", COLUMNS.len(), row.len());
                return Err(format_error(line, msg));
            }
            let number = |i: usize| -> Result<usize, DatasetError> {
                row[i]
                    .trim()
                    .parse()
                    .map_err(|_| format_error(line, format!("{} is not a count", COLUMNS[i])))
            };
            let record = DerivationRecord {
                latex_len: number(0)?,
                latex_str: row[1].to_string(),
                text_len: number(2)?,
                text_str: row[3].to_string(),
                tree_len: number(4)?,
                tree_str: row[5].to_string(),
                action: row[6].to_string(),
                nsa: row[7].to_string(),
                state_type: row[8].trim().to_string(),
                action_type: row[9].trim().to_string(),
            };
            record.check_lengths(line)?;
            seq.records.push(record);
        }
        if !header_seen {
            return Err(format_error(0, "missing header row"));
        }
        Ok(seq)
    }

    pub fn write<W: Write>(&self, out: W, delimiter: u8) -> Result<(), DatasetError> {
        let mut w = csv::WriterBuilder::new()
            .delimiter(delimiter)
            .flexible(true)
            .from_writer(out);
        let io = |e: csv::Error| csv_error(e);
        if let Some(t) = &self.tail_text {
            w.write_record([TAIL_TEXT, t]).map_err(io)?;
        }
        if let Some(t) = &self.tail_latex {
            w.write_record([TAIL_LATEX, t]).map_err(io)?;
        }
        w.write_record(COLUMNS).map_err(io)?;
        for r in &self.records {
            w.write_record([
                r.latex_len.to_string().as_str(),
                &r.latex_str,
                &r.text_len.to_string(),
                &r.text_str,
                &r.tree_len.to_string(),
                &r.tree_str,
                &r.action,
                &r.nsa,
                &r.state_type,
                &r.action_type,
            ])
            .map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_text(&self, delimiter: u8) -> String {
        let mut buf = Vec::new();
        self.write(&mut buf, delimiter).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is UTF-8")
    }

    pub fn head(&self) -> EquationState {
        EquationState::dummy_head()
    }

    /// The closing dummy state `s_N` in the requested form.
    pub fn tail_string(&self, form: Rendering) -> Result<String, DatasetError> {
        let given = match form {
            Rendering::Text => &self.tail_text,
            Rendering::Latex => &self.tail_latex,
        };
        if let Some(t) = given {
            return Ok(t.clone());
        }
        let last = self.records.last().ok_or(DatasetError::Empty)?;
        Ok(match last.state() {
            Ok(s) => s.strip_index().render(form),
            Err(_) => last.string(form).to_string(),
        })
    }

    /// `s_N` as a state.
    pub fn tail_state(&self) -> Result<EquationState, DatasetError> {
        let record = self.records.len();
        if let Some(t) = &self.tail_text {
            let s = EquationState::parse(t).map_err(|source| DatasetError::State { record, source })?;
            return Ok(s.with_type(StateType::Dummy));
        }
        let last = self.records.last().ok_or(DatasetError::Empty)?;
        let s = last.state().map_err(|source| DatasetError::State { record, source })?;
        Ok(s.strip_index().with_type(StateType::Dummy))
    }

    /// Every state string `s_0 ..= s_N` in the requested form.
    pub fn state_strings(&self, form: Rendering) -> Result<Vec<String>, DatasetError> {
        let mut out = vec![self.head().render(form)];
        out.extend(self.records.iter().map(|r| r.string(form).to_string()));
        out.push(self.tail_string(form)?);
        Ok(out)
    }

    /// Parses `s_0 ..= s_N`. Fails on the first record the expression
    /// grammar cannot read.
    pub fn states(&self) -> Result<Vec<EquationState>, DatasetError> {
        let mut out = vec![self.head()];
        for (i, r) in self.records.iter().enumerate() {
            out.push(r.state().map_err(|source| DatasetError::State { record: i + 1, source })?);
        }
        out.push(self.tail_state()?);
        Ok(out)
    }

    /// Roles from the action column: states made by `consider_kb_equation`
    /// are integrative, other states directly before one are terminal, the
    /// rest consequent.
    pub fn categorize(&self) -> Vec<StateType> {
        let integrative: Vec<bool> =
            self.records.iter().map(|r| is_consider_kb_name(&r.action)).collect();
        (0..self.records.len())
            .map(|i| {
                if integrative[i] {
                    StateType::Integrative
                } else if integrative.get(i + 1).copied().unwrap_or(false) {
                    StateType::Terminal
                } else {
                    StateType::Consequent
                }
            })
            .collect()
    }

    /// Overwrites the state-type column with [`DerivationSequence::categorize`].
    pub fn annotate(&mut self) {
        let roles = self.categorize();
        for (r, t) in self.records.iter_mut().zip(roles) {
            r.state_type = t.as_str().to_string();
        }
    }

    /// Role of record `i` (0-based): the stored column when valid, otherwise
    /// derived from the actions.
    pub fn state_type_of(&self, i: usize) -> StateType {
        self.records[i].state_type().unwrap_or_else(|| self.categorize()[i])
    }

    pub fn census(&self) -> Census {
        let mut state_types = BTreeMap::new();
        let mut cells: BTreeMap<String, BTreeMap<String, usize>> = BTreeMap::new();
        for r in &self.records {
            *state_types.entry(r.state_type.clone()).or_insert(0) += 1;
            *cells
                .entry(r.state_type.clone())
                .or_default()
                .entry(r.action_type.clone())
                .or_insert(0) += 1;
        }
        let lens = |f: fn(&DerivationRecord) -> usize| {
            LengthStats::of(self.records.iter().map(f))
        };
        Census {
            records: self.records.len(),
            padded_states: self.padded_len(),
            state_types,
            cells,
            text_len: lens(|r| r.text_len),
            latex_len: lens(|r| r.latex_len),
            tree_len: lens(|r| r.tree_len),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthStats {
    pub min: usize,
    pub max: usize,
    pub mean: f64,
}

impl LengthStats {
    pub fn of(values: impl Iterator<Item = usize>) -> Option<LengthStats> {
        let v: Vec<usize> = values.collect();
        let min = *v.iter().min()?;
        let max = *v.iter().max()?;
        let mean = v.iter().sum::<usize>() as f64 / v.len() as f64;
        Some(LengthStats { min, max, mean })
    }
}

/// Counts by role and by (role, action category), and string lengths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Census {
    pub records: usize,
    pub padded_states: usize,
    pub state_types: BTreeMap<String, usize>,
    pub cells: BTreeMap<String, BTreeMap<String, usize>>,
    pub text_len: Option<LengthStats>,
    pub latex_len: Option<LengthStats>,
    pub tree_len: Option<LengthStats>,
}

impl Census {
    pub fn cell(&self, state_type: &str, action_type: &str) -> usize {
        self.cells.get(state_type).and_then(|m| m.get(action_type)).copied().unwrap_or(0)
    }
}
