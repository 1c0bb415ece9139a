//! Finitely supported real sequences indexed from 1.

use std::collections::BTreeMap;
use std::fmt;

use serde_json::Value;

use crate::error::{Error, Result};

/// A finitely supported real sequence `x = Σ x_j e_j`, `j ≥ 1`.
///
/// Stored sparsely in canonical form: indices strictly increasing, no stored
/// zeros.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RealVector {
    entries: Vec<(usize, f64)>,
}

impl RealVector {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Builds a vector from `(index, value)` pairs in any order.
    ///
    /// Zeros are dropped. Index 0, repeated indices and non-finite values are
    /// rejected.
    pub fn from_entries<I>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, f64)>,
    {
        let mut entries: Vec<(usize, f64)> = entries.into_iter().collect();
        entries.sort_by_key(|&(j, _)| j);
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidArgument(format!("index {} repeated", w[0].0)));
            }
        }
        for &(j, v) in &entries {
            if j == 0 {
                return Err(Error::InvalidArgument("indices start at 1".into()));
            }
            if !v.is_finite() {
                return Err(Error::InvalidArgument(format!("entry {j} is not finite")));
            }
        }
        entries.retain(|&(_, v)| v != 0.0);
        Ok(Self { entries })
    }

    /// Dense constructor: `values[0]` is the coefficient of `e_1`.
    pub fn from_dense(values: &[f64]) -> Self {
        let entries = values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, &v)| {
                assert!(v.is_finite(), "entry {} is not finite", i + 1);
                (i + 1, v)
            })
            .collect();
        Self { entries }
    }

    /// The unit vector `e_j`.
    pub fn basis(j: usize) -> Self {
        assert!(j >= 1, "indices start at 1");
        Self { entries: vec![(j, 1.0)] }
    }

    /// `Σ_{j ∈ indices} e_j`.
    pub fn indicator<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        Self::from_entries(indices.into_iter().map(|j| (j, 1.0)))
            .expect("indicator indices must be distinct and positive")
    }

    /// Internal constructor for data already in canonical form.
    pub(crate) fn from_sorted_unchecked(entries: Vec<(usize, f64)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(entries.iter().all(|&(j, v)| j >= 1 && v != 0.0));
        Self { entries }
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.entries.iter().copied()
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().map(|&(_, v)| v)
    }

    pub fn support(&self) -> Vec<usize> {
        self.entries.iter().map(|&(j, _)| j).collect()
    }

    /// Number of nonzero entries.
    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.last().map(|&(j, _)| j)
    }

    pub fn get(&self, j: usize) -> f64 {
        match self.entries.binary_search_by_key(&j, |&(i, _)| i) {
            Ok(pos) => self.entries[pos].1,
            Err(_) => 0.0,
        }
    }

    /// Dense copy of the first `len` coordinates.
    pub fn to_dense(&self, len: usize) -> Vec<f64> {
        let mut out = vec![0.0; len];
        for &(j, v) in &self.entries {
            if j <= len {
                out[j - 1] = v;
            }
        }
        out
    }

    pub fn l1_norm(&self) -> f64 {
        self.values().map(f64::abs).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.values().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn linf_norm(&self) -> f64 {
        self.values().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `ℓ_p` norm for `1 ≤ p ≤ ∞` (`p = f64::INFINITY` is the sup norm).
    pub fn lp_norm(&self, p: f64) -> f64 {
        lp_of_values(self.values(), p)
    }

    pub fn dot(&self, other: &RealVector) -> f64 {
        let (mut i, mut k) = (0, 0);
        let mut acc = 0.0;
        while i < self.entries.len() && k < other.entries.len() {
            let (a, b) = (self.entries[i], other.entries[k]);
            match a.0.cmp(&b.0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => k += 1,
                std::cmp::Ordering::Equal => {
                    acc += a.1 * b.1;
                    i += 1;
                    k += 1;
                }
            }
        }
        acc
    }

    pub fn scale(&self, lambda: f64) -> Self {
        if lambda == 0.0 {
            return Self::zero();
        }
        self.map(|v| lambda * v)
    }

    /// Applies `f` entrywise on the support; results equal to zero are dropped.
    /// `f(0)` is never evaluated, so `f` must satisfy `f(0) = 0` for the
    /// result to be meaningful.
    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Self {
        Self {
            entries: self
                .entries
                .iter()
                .map(|&(j, v)| (j, f(v)))
                .filter(|&(_, v)| v != 0.0)
                .collect(),
        }
    }

    /// Like [`map`](Self::map) but with access to the index.
    pub fn map_indexed<F: Fn(usize, f64) -> f64>(&self, f: F) -> Self {
        Self {
            entries: self
                .entries
                .iter()
                .map(|&(j, v)| (j, f(j, v)))
                .filter(|&(_, v)| v != 0.0)
                .collect(),
        }
    }

    pub fn abs(&self) -> Self {
        self.map(f64::abs)
    }

    /// Entrywise square `x²`.
    pub fn square(&self) -> Self {
        self.map(|v| v * v)
    }

    pub fn add(&self, other: &RealVector) -> Self {
        self.combine(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &RealVector) -> Self {
        self.combine(other, |a, b| a - b)
    }

    /// Entrywise product `a·x`.
    pub fn mul(&self, other: &RealVector) -> Self {
        let mut entries = Vec::new();
        for &(j, v) in &self.entries {
            let w = other.get(j);
            if w != 0.0 && v * w != 0.0 {
                entries.push((j, v * w));
            }
        }
        Self { entries }
    }

    fn combine<F: Fn(f64, f64) -> f64>(&self, other: &RealVector, f: F) -> Self {
        let mut merged: BTreeMap<usize, (f64, f64)> = BTreeMap::new();
        for &(j, v) in &self.entries {
            merged.entry(j).or_default().0 = v;
        }
        for &(j, v) in &other.entries {
            merged.entry(j).or_default().1 = v;
        }
        Self {
            entries: merged
                .into_iter()
                .map(|(j, (a, b))| (j, f(a, b)))
                .filter(|&(_, v)| v != 0.0)
                .collect(),
        }
    }

    /// Restriction `x|_E` to the indices accepted by `keep`.
    pub fn restrict<F: Fn(usize) -> bool>(&self, keep: F) -> Self {
        Self {
            entries: self.entries.iter().copied().filter(|&(j, _)| keep(j)).collect(),
        }
    }

    /// Restriction to the index interval `[lo, hi]`.
    pub fn restrict_range(&self, lo: usize, hi: usize) -> Self {
        self.restrict(|j| lo <= j && j <= hi)
    }

    /// Relabels indices: `Σ a_n e_n ↦ Σ a_n e_{σ(n)}`.
    pub fn relabel<F: Fn(usize) -> usize>(&self, sigma: F) -> Result<Self> {
        Self::from_entries(self.entries.iter().map(|&(j, v)| (sigma(j), v)))
    }

    /// Parses the vector literal accepted on the command line: either a dense
    /// JSON array (`[1, -2, 3]`, first element is index 1) or a sparse object
    /// (`{"3": 2.0, "7": -1.5}`).
    pub fn parse_literal(text: &str) -> Result<Self> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("vector literal: {e}")))?;
        match value {
            Value::Array(items) => {
                let mut dense = Vec::with_capacity(items.len());
                for (i, item) in items.iter().enumerate() {
                    let v = item
                        .as_f64()
                        .ok_or_else(|| Error::Parse(format!("element {} is not a number", i + 1)))?;
                    if !v.is_finite() {
                        return Err(Error::Parse(format!("element {} is not finite", i + 1)));
                    }
                    dense.push(v);
                }
                Ok(Self::from_dense(&dense))
            }
            Value::Object(map) => {
                let mut entries = Vec::with_capacity(map.len());
                for (key, item) in &map {
                    let j: usize = key
                        .trim()
                        .parse()
                        .map_err(|_| Error::Parse(format!("key {key:?} is not a positive integer")))?;
                    let v = item
                        .as_f64()
                        .ok_or_else(|| Error::Parse(format!("value at {key:?} is not a number")))?;
                    entries.push((j, v));
                }
                Self::from_entries(entries).map_err(|e| Error::Parse(e.to_string()))
            }
            _ => Err(Error::Parse("expected a JSON array or object".into())),
        }
    }

    /// Sparse JSON object form, the inverse of [`parse_literal`](Self::parse_literal).
    pub fn to_literal(&self) -> String {
        let map: serde_json::Map<String, Value> = self
            .entries
            .iter()
            .map(|&(j, v)| (j.to_string(), Value::from(v)))
            .collect();
        Value::Object(map).to_string()
    }
}

impl fmt::Display for RealVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (j, v)) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{j}: {v}")?;
        }
        write!(f, "}}")
    }
}

pub(crate) fn lp_of_values<I: Iterator<Item = f64>>(values: I, p: f64) -> f64 {
    if p.is_infinite() {
        return values.fold(0.0, |m, v| m.max(v.abs()));
    }
    if p == 1.0 {
        return values.map(f64::abs).sum();
    }
    if p == 2.0 {
        return values.map(|v| v * v).sum::<f64>().sqrt();
    }
    // scale by the largest entry so |v|^p neither underflows nor overflows
    let vals: Vec<f64> = values.map(f64::abs).collect();
    let m = vals.iter().fold(0.0f64, |m, &v| m.max(v));
    if m == 0.0 {
        return 0.0;
    }
    m * vals.iter().map(|v| (v / m).powf(p)).sum::<f64>().powf(1.0 / p)
}
