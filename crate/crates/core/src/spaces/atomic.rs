//! Lattice norms of the form `‖x‖ = max_{a ∈ 𝒜} ⟨a, |x|⟩` with nonnegative
//! atoms `a`, described by a linear maximization oracle over `𝒜`.

use crate::error::{Error, Result};
use crate::spaces::admissible::best_admissible;
use crate::spaces::symmetric::{sym_tsirelson_exact, EXACT_LIMIT};
use crate::spaces::tsirelson::{witness_on, EXHAUSTIVE_LIMIT};

// L1 and Linf serve as reference lattices in tests
#[cfg_attr(not(test), allow(dead_code))]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Atomic {
    /// `ℓ_1`: the single atom `𝟙`.
    L1,
    /// `ℓ_∞`: atoms `e_j`.
    Linf,
    /// Indicators of admissible sets.
    Schreier,
    /// Norming functionals of the Tsirelson norm.
    Tsirelson,
    /// Norming functionals of the symmetrized Tsirelson norm.
    SymTsirelson,
}

impl Atomic {
    fn check_size(self, s: usize) -> Result<()> {
        let limit = match self {
            Atomic::Tsirelson => EXHAUSTIVE_LIMIT,
            Atomic::SymTsirelson => EXACT_LIMIT,
            _ => return Ok(()),
        };
        if s > limit {
            return Err(Error::LimitExceeded { what: "atomic oracle support", size: s, limit });
        }
        Ok(())
    }

    /// `max_{a ∈ 𝒜} ⟨a, g⟩` for `g ≥ 0` on the coordinates `indices`, and a
    /// maximizing atom restricted to those coordinates.
    pub(crate) fn best_atom(self, indices: &[usize], g: &[f64]) -> Result<(f64, Vec<f64>)> {
        self.check_size(indices.len())?;
        let s = indices.len();
        Ok(match self {
            Atomic::L1 => (g.iter().sum(), vec![1.0; s]),
            Atomic::Linf => {
                let mut best = 0;
                for p in 1..s {
                    if g[p] > g[best] {
                        best = p;
                    }
                }
                let mut atom = vec![0.0; s];
                if s > 0 {
                    atom[best] = 1.0;
                }
                (if s > 0 { g[best] } else { 0.0 }, atom)
            }
            Atomic::Schreier => {
                let (v, chosen) = best_admissible(indices, g);
                let mut atom = vec![0.0; s];
                for p in chosen {
                    atom[p] = 1.0;
                }
                (v, atom)
            }
            Atomic::Tsirelson => witness_on(indices, g),
            Atomic::SymTsirelson => sym_tsirelson_exact(g),
        })
    }

    /// A few atoms whose sum is positive on every coordinate.
    pub(crate) fn initial_cover(self, indices: &[usize]) -> Vec<Vec<f64>> {
        let s = indices.len();
        match self {
            Atomic::L1 => vec![vec![1.0; s]],
            Atomic::Schreier => {
                // consecutive support runs, each admissible: a run starting at
                // index m holds at most m coordinates
                let mut atoms = Vec::new();
                let mut p = 0;
                while p < s {
                    let take = indices[p].min(s - p);
                    let mut atom = vec![0.0; s];
                    for a in atom.iter_mut().skip(p).take(take) {
                        *a = 1.0;
                    }
                    atoms.push(atom);
                    p += take;
                }
                atoms
            }
            Atomic::Linf | Atomic::Tsirelson | Atomic::SymTsirelson => (0..s)
                .map(|p| {
                    let mut atom = vec![0.0; s];
                    atom[p] = 1.0;
                    atom
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schreier_cover_follows_dyadic_blocks() {
        let indices: Vec<usize> = (1..=15).collect();
        let cover = Atomic::Schreier.initial_cover(&indices);
        let sizes: Vec<usize> = cover.iter().map(|a| a.iter().filter(|&&v| v > 0.0).count()).collect();
        assert_eq!(sizes, vec![1, 2, 4, 8]);
    }

    #[test]
    fn oracles_return_norming_atoms() {
        let indices = [2, 3, 5, 6];
        let g = [0.5, 2.0, 1.0, 0.25];
        for kind in [Atomic::L1, Atomic::Linf, Atomic::Schreier, Atomic::Tsirelson, Atomic::SymTsirelson] {
            let (v, atom) = kind.best_atom(&indices, &g).unwrap();
            let pairing: f64 = atom.iter().zip(&g).map(|(a, b)| a * b).sum();
            assert!((pairing - v).abs() < 1e-12, "{kind:?}");
        }
    }
}
