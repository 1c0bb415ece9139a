//! Symmetrized 2-convexified Tsirelson norm.
//!
//! `‖x‖_{T_s²} = sup_π ‖T_π x‖_{T²}` over all permutations `π` of ℕ. Pushing
//! coordinates to the right never decreases a Tsirelson norm, and once all
//! `s` support coordinates sit on indices `≥ s` every successive family is
//! admissible. The supremum is therefore a maximum over the `s!` orderings of
//! the entries placed on `s, s+1, …, 2s−1`.

use crate::coverage;
use crate::error::{Error, Result};
use crate::spaces::tsirelson::witness_on;
use crate::vector::RealVector;

/// Largest support evaluated exactly (`8! = 40320` orderings).
pub const EXACT_LIMIT: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymMode {
    Exact,
    /// Decreasing rearrangement plus a local search over adjacent
    /// transpositions, with at most this many evaluations.
    Heuristic { budget: usize },
}

/// A value returned by [`sym_tsirelson2_norm`]. `exact == false` marks a
/// lower bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymNorm {
    pub value: f64,
    pub exact: bool,
}

/// Indices used for the right-shifted placement of `s` coordinates.
fn shifted_indices(s: usize) -> Vec<usize> {
    (s.max(1)..s.max(1) + s).collect()
}

/// Best ordering of `weights ≥ 0` under the Tsirelson norm with every family
/// admissible. Returns the value and the nonnegative norming functional in
/// the original coordinate order.
pub(crate) fn sym_tsirelson_exact(weights: &[f64]) -> (f64, Vec<f64>) {
    let s = weights.len();
    if s == 0 {
        return (0.0, Vec::new());
    }
    let idx = shifted_indices(s);
    let mut perm: Vec<usize> = (0..s).collect();
    let mut best_val = -1.0;
    let mut best_fn = vec![0.0; s];
    let mut arranged = vec![0.0; s];
    let mut visit = |perm: &[usize]| {
        for (slot, &src) in perm.iter().enumerate() {
            arranged[slot] = weights[src];
        }
        let (v, f) = witness_on(&idx, &arranged);
        if v > best_val {
            best_val = v;
            for (slot, &src) in perm.iter().enumerate() {
                best_fn[src] = f[slot];
            }
        }
    };
    // Heap's algorithm
    let mut c = vec![0usize; s];
    visit(&perm);
    let mut i = 0;
    while i < s {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            visit(&perm);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    (best_val, best_fn)
}

fn sym_tsirelson_heuristic(weights: &[f64], budget: usize) -> f64 {
    let s = weights.len();
    if s == 0 {
        return 0.0;
    }
    let idx = shifted_indices(s);
    let mut arranged = weights.to_vec();
    arranged.sort_by(|a, b| b.total_cmp(a));
    let mut best = witness_on(&idx, &arranged).0;
    let mut evaluations = 1;
    let mut improved = true;
    while improved && evaluations < budget {
        improved = false;
        for k in 0..s.saturating_sub(1) {
            if evaluations >= budget {
                break;
            }
            arranged.swap(k, k + 1);
            let v = witness_on(&idx, &arranged).0;
            evaluations += 1;
            if v > best {
                best = v;
                improved = true;
            } else {
                arranged.swap(k, k + 1);
            }
        }
    }
    best
}

/// `‖x‖_{T_s²} = (max over orderings of ‖x²‖_T)^{1/2}`.
pub fn sym_tsirelson2_norm(x: &RealVector, mode: SymMode) -> Result<SymNorm> {
    coverage::hit("sym_tsirelson2_norm");
    let squares: Vec<f64> = x.values().map(|v| v * v).collect();
    match mode {
        SymMode::Exact => {
            if squares.len() > EXACT_LIMIT {
                return Err(Error::LimitExceeded {
                    what: "sym_tsirelson2_norm (exact)",
                    size: squares.len(),
                    limit: EXACT_LIMIT,
                });
            }
            Ok(SymNorm { value: sym_tsirelson_exact(&squares).0.sqrt(), exact: true })
        }
        SymMode::Heuristic { budget } => {
            if squares.len() > crate::spaces::tsirelson::EXHAUSTIVE_LIMIT {
                return Err(Error::LimitExceeded {
                    what: "sym_tsirelson2_norm (heuristic)",
                    size: squares.len(),
                    limit: crate::spaces::tsirelson::EXHAUSTIVE_LIMIT,
                });
            }
            Ok(SymNorm { value: sym_tsirelson_heuristic(&squares, budget.max(1)).sqrt(), exact: false })
        }
    }
}
