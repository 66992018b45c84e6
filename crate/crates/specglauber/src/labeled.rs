//! Dense real matrices whose rows and columns are indexed by vertices or
//! oriented edges, with JSON and CSV export.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::graph::OrientedEdge;
use crate::linalg::DMat;

/// Index key for labeled matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Vertex(usize),
    Edge(OrientedEdge),
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Vertex(v) => write!(f, "{v}"),
            Label::Edge(e) => write!(f, "{e}"),
        }
    }
}

impl Serialize for Label {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        Label::parse(&text).ok_or_else(|| serde::de::Error::custom(format!("bad label: {text}")))
    }
}

impl Label {
    pub fn parse(text: &str) -> Option<Label> {
        if let Some((a, b)) = text.split_once("->") {
            let tail = a.trim().parse().ok()?;
            let head = b.trim().parse().ok()?;
            Some(Label::Edge(OrientedEdge::new(tail, head)))
        } else {
            text.trim().parse().ok().map(Label::Vertex)
        }
    }
}

/// Dense real matrix with labeled axes. Lookup by label is a bijection onto
/// positions; storage is row-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabeledMatrix {
    pub row_labels: Vec<Label>,
    pub col_labels: Vec<Label>,
    pub entries: Vec<f64>,
    #[serde(skip)]
    row_index: BTreeMap<Label, usize>,
    #[serde(skip)]
    col_index: BTreeMap<Label, usize>,
}

impl<'de> Deserialize<'de> for LabeledMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            row_labels: Vec<Label>,
            col_labels: Vec<Label>,
            entries: Vec<f64>,
        }
        let raw = Raw::deserialize(d)?;
        if raw.entries.len() != raw.row_labels.len() * raw.col_labels.len() {
            return Err(serde::de::Error::custom(format!(
                "entries length {} does not match {}x{}",
                raw.entries.len(),
                raw.row_labels.len(),
                raw.col_labels.len()
            )));
        }
        let m = LabeledMatrix::try_from_entries(raw.row_labels, raw.col_labels, raw.entries)
            .map_err(serde::de::Error::custom)?;
        Ok(m)
    }
}

impl LabeledMatrix {
    pub fn zeros(row_labels: Vec<Label>, col_labels: Vec<Label>) -> Self {
        let entries = vec![0.0; row_labels.len() * col_labels.len()];
        Self::from_entries(row_labels, col_labels, entries)
    }

    pub fn from_entries(row_labels: Vec<Label>, col_labels: Vec<Label>, entries: Vec<f64>) -> Self {
        Self::try_from_entries(row_labels, col_labels, entries).expect("valid labeled matrix")
    }

    pub fn try_from_entries(
        row_labels: Vec<Label>,
        col_labels: Vec<Label>,
        entries: Vec<f64>,
    ) -> Result<Self, String> {
        if entries.len() != row_labels.len() * col_labels.len() {
            return Err("entries dimension mismatch".to_string());
        }
        let row_index: BTreeMap<Label, usize> = row_labels
            .iter()
            .enumerate()
            .map(|(i, &l)| (l, i))
            .collect();
        let col_index: BTreeMap<Label, usize> = col_labels
            .iter()
            .enumerate()
            .map(|(i, &l)| (l, i))
            .collect();
        if row_index.len() != row_labels.len() || col_index.len() != col_labels.len() {
            return Err("duplicate label".to_string());
        }
        Ok(LabeledMatrix {
            row_labels,
            col_labels,
            entries,
            row_index,
            col_index,
        })
    }

    pub fn rows(&self) -> usize {
        self.row_labels.len()
    }

    pub fn cols(&self) -> usize {
        self.col_labels.len()
    }

    pub fn is_square(&self) -> bool {
        self.row_labels == self.col_labels
    }

    #[inline]
    pub fn get_idx(&self, r: usize, c: usize) -> f64 {
        self.entries[r * self.cols() + c]
    }

    #[inline]
    pub fn set_idx(&mut self, r: usize, c: usize, v: f64) {
        let cols = self.cols();
        self.entries[r * cols + c] = v;
    }

    pub fn row_position(&self, l: Label) -> Option<usize> {
        self.row_index.get(&l).copied()
    }

    pub fn col_position(&self, l: Label) -> Option<usize> {
        self.col_index.get(&l).copied()
    }

    pub fn get(&self, r: Label, c: Label) -> Option<f64> {
        Some(self.get_idx(self.row_position(r)?, self.col_position(c)?))
    }

    pub fn to_dmat(&self) -> DMat {
        DMat {
            rows: self.rows(),
            cols: self.cols(),
            a: self.entries.clone(),
        }
    }

    pub fn from_dmat(row_labels: Vec<Label>, col_labels: Vec<Label>, m: &DMat) -> Self {
        assert_eq!(m.rows, row_labels.len());
        assert_eq!(m.cols, col_labels.len());
        Self::from_entries(row_labels, col_labels, m.a.clone())
    }

    pub fn max_abs_diff(&self, other: &LabeledMatrix) -> f64 {
        assert_eq!(self.row_labels, other.row_labels);
        assert_eq!(self.col_labels, other.col_labels);
        self.entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// CSV with a header row of column labels and one leading label cell per
    /// data row.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("label");
        for c in &self.col_labels {
            out.push(',');
            out.push_str(&c.to_string());
        }
        out.push('\n');
        for (r, rl) in self.row_labels.iter().enumerate() {
            out.push_str(&rl.to_string());
            for c in 0..self.cols() {
                out.push(',');
                out.push_str(&format!("{}", self.get_idx(r, c)));
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("matrix serializes")
    }
}
