//! The Tsirelson norm on finitely supported vectors.
//!
//! `‖x‖_T` is the least solution of
//! `‖x‖ = max(‖x‖_∞, ½ sup Σ_{i≤k} ‖E_i x‖)`, the supremum running over
//! successive sets `E_1 < … < E_k` with `k ≤ min E_1`.
//!
//! Every restriction that matters is a run of consecutive support positions:
//! pieces can be grown to fill the gaps between them (lattice monotonicity)
//! and the first piece may as well start on the support. A family with at
//! least two pieces only involves strictly shorter runs, so the fixed point
//! is computed bottom-up over run length, exactly, in one pass.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::coverage;
use crate::error::{Error, Result};
use crate::vector::RealVector;

/// Largest support accepted by the exhaustive evaluators.
pub const EXHAUSTIVE_LIMIT: usize = 16;

/// Arithmetic needed by the run-length recursion. Implemented for `f64` and
/// for exact rationals.
pub trait TsirelsonScalar: Clone + PartialOrd {
    fn zero() -> Self;
    fn plus(&self, other: &Self) -> Self;
    fn half(&self) -> Self;
    fn magnitude(&self) -> Self;
}

impl TsirelsonScalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn half(&self) -> Self {
        0.5 * self
    }
    fn magnitude(&self) -> Self {
        self.abs()
    }
}

impl TsirelsonScalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn half(&self) -> Self {
        self / BigRational::from_integer(BigInt::from(2))
    }
    fn magnitude(&self) -> Self {
        self.abs()
    }
}

#[derive(Clone, Debug)]
enum Choice {
    /// The sup norm wins, attained at this position.
    Leaf(usize),
    /// `½ Σ` over the pieces of a partition of `[start..=end]` into `pieces` runs.
    Split { start: usize, pieces: usize },
}

/// Run table: `value(a, b)` is the norm of `x` restricted to positions `a..=b`.
struct RunTable<S> {
    s: usize,
    value: Vec<S>,
    choice: Vec<Choice>,
    /// `cut[(b * s + t) * (s + 1) + c]`: end position of the first piece in the
    /// best split of `[t..=b]` into `c` pieces.
    cut: Vec<usize>,
}

impl<S: TsirelsonScalar> RunTable<S> {
    fn build(indices: &[usize], values: &[S]) -> Self {
        let s = indices.len();
        let mags: Vec<S> = values.iter().map(TsirelsonScalar::magnitude).collect();
        let mut value: Vec<Option<S>> = vec![None; s * s];
        let mut choice = vec![Choice::Leaf(0); s * s];
        let mut cut = vec![usize::MAX; s * s * (s + 1)];

        for b in 0..s {
            // split[t][c]: best sum over partitions of [t..=b] into c runs
            let mut split: Vec<Vec<Option<S>>> = vec![Vec::new(); s];
            // best_tail[t]: best admissible sum for families starting at t,
            // available once value(t, b) is known
            let mut best_tail: Vec<Option<(S, usize)>> = vec![None; s];
            for a in (0..=b).rev() {
                let len = b - a + 1;
                let mut row: Vec<Option<S>> = vec![None; len + 1];
                for c in 2..=len {
                    let mut best: Option<(S, usize)> = None;
                    for u in a..b {
                        if b - u < c - 1 {
                            break;
                        }
                        let first = value[a * s + u].as_ref().expect("shorter run computed");
                        let Some(rest) = split[u + 1].get(c - 1).and_then(Option::as_ref) else {
                            continue;
                        };
                        let total = first.plus(rest);
                        if best.as_ref().is_none_or(|(v, _)| total > *v) {
                            best = Some((total, u));
                        }
                    }
                    if let Some((v, u)) = best {
                        cut[(b * s + a) * (s + 1) + c] = u;
                        row[c] = Some(v);
                    }
                }

                // sup norm of the run
                let mut leaf = a;
                for p in a..=b {
                    if mags[p] > mags[leaf] {
                        leaf = p;
                    }
                }
                let mut best_val = mags[leaf].clone();
                let mut best_choice = Choice::Leaf(leaf);

                // families starting at a need at least two pieces
                let cap = indices[a].min(len);
                let mut family: Option<(S, usize, usize)> = None;
                for (c, entry) in row.iter().enumerate().take(cap + 1).skip(2) {
                    if let Some(v) = entry {
                        if family.as_ref().is_none_or(|(w, _, _)| v > w) {
                            family = Some((v.clone(), a, c));
                        }
                    }
                }
                for (t, tail) in best_tail.iter().enumerate().take(b + 1).skip(a + 1) {
                    if let Some((v, c)) = tail {
                        if family.as_ref().is_none_or(|(w, _, _)| v > w) {
                            family = Some((v.clone(), t, *c));
                        }
                    }
                }
                if let Some((sum, start, pieces)) = family {
                    let candidate = sum.half();
                    if candidate > best_val {
                        best_val = candidate;
                        best_choice = Choice::Split { start, pieces };
                    }
                }
                value[a * s + b] = Some(best_val.clone());
                choice[a * s + b] = best_choice;

                row[1] = Some(best_val);
                let cap = indices[a].min(len);
                let mut tail: Option<(S, usize)> = None;
                for (c, entry) in row.iter().enumerate().take(cap + 1).skip(1) {
                    if let Some(v) = entry {
                        if tail.as_ref().is_none_or(|(w, _)| v > w) {
                            tail = Some((v.clone(), c));
                        }
                    }
                }
                best_tail[a] = tail;
                split[a] = row;
            }
        }

        Self {
            s,
            value: value.into_iter().map(|v| v.unwrap_or_else(S::zero)).collect(),
            choice,
            cut,
        }
    }

    fn norm(&self) -> S {
        if self.s == 0 {
            S::zero()
        } else {
            self.value[self.s - 1].clone()
        }
    }

    /// Pieces `(from, to)` of the best split of `[t..=b]` into `c` runs.
    fn pieces(&self, mut t: usize, b: usize, mut c: usize) -> Vec<(usize, usize)> {
        let s = self.s;
        let mut out = Vec::with_capacity(c);
        while c > 1 {
            let u = self.cut[(b * s + t) * (s + 1) + c];
            out.push((t, u));
            t = u + 1;
            c -= 1;
        }
        out.push((t, b));
        out
    }

    /// Accumulates the norming functional of the run `[a..=b]` with the given
    /// weight into `out`.
    fn witness_into(&self, a: usize, b: usize, weight: f64, out: &mut [f64]) {
        match self.choice[a * self.s + b] {
            Choice::Leaf(p) => out[p] += weight,
            Choice::Split { start, pieces } => {
                for (from, to) in self.pieces(start, b, pieces) {
                    self.witness_into(from, to, 0.5 * weight, out);
                }
            }
        }
    }
}

fn check_limit(len: usize, limit: usize) -> Result<()> {
    if len > limit {
        return Err(Error::LimitExceeded { what: "tsirelson_norm support", size: len, limit });
    }
    Ok(())
}

/// `‖x‖_T`, for supports up to [`EXHAUSTIVE_LIMIT`].
pub fn tsirelson_norm(x: &RealVector) -> Result<f64> {
    coverage::hit("tsirelson_norm");
    tsirelson_norm_with_limit(x, EXHAUSTIVE_LIMIT)
}

pub fn tsirelson_norm_with_limit(x: &RealVector, limit: usize) -> Result<f64> {
    check_limit(x.support_len(), limit)?;
    let (indices, values): (Vec<usize>, Vec<f64>) = x.iter().unzip();
    Ok(RunTable::build(&indices, &values).norm())
}

/// Exact evaluation on rational data. `entries` must have strictly increasing
/// positive indices.
pub fn tsirelson_norm_exact(entries: &[(usize, BigRational)]) -> Result<BigRational> {
    check_limit(entries.len(), EXHAUSTIVE_LIMIT)?;
    if entries.iter().any(|(j, _)| *j == 0) || entries.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(Error::InvalidArgument("indices must be positive and strictly increasing".into()));
    }
    let (indices, values): (Vec<usize>, Vec<BigRational>) = entries.iter().cloned().unzip();
    Ok(RunTable::build(&indices, &values).norm())
}

/// Norm together with a norming functional `f`: `⟨f, x⟩ = ‖x‖_T`,
/// `‖f‖_{T*} ≤ 1`, `supp f ⊆ supp x`. The functional is signed like `x`.
pub fn tsirelson_witness(x: &RealVector) -> Result<(f64, RealVector)> {
    check_limit(x.support_len(), EXHAUSTIVE_LIMIT)?;
    let (indices, values): (Vec<usize>, Vec<f64>) = x.iter().unzip();
    let (norm, weights) = witness_on(&indices, &values);
    let f = indices
        .iter()
        .zip(&weights)
        .zip(&values)
        .filter(|((_, w), _)| **w != 0.0)
        .map(|((&j, &w), &v)| (j, w * v.signum()))
        .collect();
    Ok((norm, RealVector::from_sorted_unchecked(f)))
}

/// Norm of `|values|` on `indices` and the nonnegative norming weights.
pub(crate) fn witness_on(indices: &[usize], values: &[f64]) -> (f64, Vec<f64>) {
    let s = indices.len();
    if s == 0 {
        return (0.0, Vec::new());
    }
    let table = RunTable::build(indices, values);
    let mut weights = vec![0.0; s];
    table.witness_into(0, s - 1, 1.0, &mut weights);
    (table.norm(), weights)
}
