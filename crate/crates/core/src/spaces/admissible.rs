//! Schreier admissible sets and the Schreier norm.

use std::fmt;

use crate::coverage;
use crate::error::{Error, Result};
use crate::vector::RealVector;

/// Largest `n` accepted by [`enumerate_admissible`].
pub const ENUMERATION_LIMIT: usize = 24;

/// A finite set `{n_1 < … < n_k}` of positive integers with `k ≤ n_1`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AdmissibleSet(Vec<usize>);

impl AdmissibleSet {
    pub fn new(mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        indices.dedup();
        if indices.first() == Some(&0) {
            return Err(Error::InvalidArgument("indices start at 1".into()));
        }
        if !is_admissible(&indices) {
            return Err(Error::InvalidArgument(format!("{indices:?} is not admissible")));
        }
        Ok(Self(indices))
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, j: usize) -> bool {
        self.0.binary_search(&j).is_ok()
    }
}

impl fmt::Display for AdmissibleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, j) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{j}")?;
        }
        write!(f, "}}")
    }
}

/// `|A| ≤ min A`. The empty set is admissible. Duplicates are ignored.
pub fn is_admissible(set: &[usize]) -> bool {
    coverage::hit("is_admissible");
    let mut sorted = set.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    match sorted.first() {
        None => true,
        Some(&min) => sorted.len() <= min,
    }
}

/// All nonempty admissible subsets of `{1..n}`, ordered by size and then
/// lexicographically.
pub fn enumerate_admissible(n: usize) -> Result<Vec<AdmissibleSet>> {
    coverage::hit("enumerate_admissible");
    enumerate_admissible_with_limit(n, ENUMERATION_LIMIT)
}

pub fn enumerate_admissible_with_limit(n: usize, limit: usize) -> Result<Vec<AdmissibleSet>> {
    if n > limit {
        return Err(Error::LimitExceeded { what: "enumerate_admissible", size: n, limit });
    }
    let mut out = Vec::new();
    let mut current = Vec::new();
    for size in 1..=n {
        for first in size..=n {
            current.clear();
            current.push(first);
            extend_sets(first + 1, n, size - 1, &mut current, &mut out);
        }
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.0.cmp(&b.0)));
    Ok(out)
}

fn extend_sets(
    from: usize,
    n: usize,
    remaining: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<AdmissibleSet>,
) {
    if remaining == 0 {
        out.push(AdmissibleSet(current.clone()));
        return;
    }
    for j in from..=n {
        if n - j + 1 < remaining {
            break;
        }
        current.push(j);
        extend_sets(j + 1, n, remaining - 1, current, out);
        current.pop();
    }
}

/// Maximizes `Σ_{p ∈ A} weights[p]` over admissible sets `A`, where `indices`
/// (strictly increasing) labels the positions and `weights ≥ 0`.
///
/// Returns the optimum and the chosen positions (ascending). Only starting
/// points on the support need to be tried: an admissible set whose least
/// element is `m` may as well start at the next support index `≥ m`.
pub(crate) fn best_admissible(indices: &[usize], weights: &[f64]) -> (f64, Vec<usize>) {
    debug_assert_eq!(indices.len(), weights.len());
    let s = indices.len();
    let mut order: Vec<usize> = (0..s).collect();
    order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));

    let mut best = (0.0, Vec::new());
    for start in 0..s {
        let cap = indices[start];
        let mut total = 0.0;
        let mut taken = 0;
        for &p in &order {
            if taken == cap {
                break;
            }
            if p >= start {
                total += weights[p];
                taken += 1;
            }
        }
        if total > best.0 {
            let mut chosen = Vec::with_capacity(taken);
            for &p in &order {
                if chosen.len() == cap {
                    break;
                }
                if p >= start {
                    chosen.push(p);
                }
            }
            chosen.sort_unstable();
            best = (total, chosen);
        }
    }
    best
}

/// `‖x‖_S = sup_{A admissible} Σ_{j∈A} |x_j|`.
pub fn schreier_norm(x: &RealVector) -> f64 {
    let (indices, weights): (Vec<usize>, Vec<f64>) = x.iter().map(|(j, v)| (j, v.abs())).unzip();
    best_admissible(&indices, &weights).0
}

/// The admissible set attaining the Schreier norm of `x` (as indices).
pub fn schreier_norming_set(x: &RealVector) -> AdmissibleSet {
    let (indices, weights): (Vec<usize>, Vec<f64>) = x.iter().map(|(j, v)| (j, v.abs())).unzip();
    let (_, positions) = best_admissible(&indices, &weights);
    AdmissibleSet(positions.into_iter().map(|p| indices[p]).collect())
}
