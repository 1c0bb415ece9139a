//! Column generation over the convex hull `P` of the atoms of an
//! [`Atomic`] lattice.
//!
//! Two separable objectives on `w ∈ P` are supported, both with `c ≥ 0`:
//!
//! * [`Objective::Inverse`]: minimize `Σ c_j / w_j`. With `c = y²` its
//!   minimum is `‖y‖²` in the dual of the 2-convexification.
//! * [`Objective::NegLog`]: minimize `−Σ c_j log w_j`. Its minimizer gives
//!   the Lozanovskii factorization of `y` when `c = y²`.
//!
//! `w` is kept as a convex combination `Σ μ_i a_i` of a working set of atoms.
//! The restricted problem over `μ` is solved by a log-barrier Newton method on
//! the simplex; the linear maximization oracle then either certifies
//! optimality (small Frank–Wolfe gap) or yields a new atom.

use nalgebra::{DMatrix, DVector};

use crate::error::Result;
use crate::spaces::atomic::Atomic;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Objective {
    Inverse,
    NegLog,
}

impl Objective {
    fn value(self, c: &[f64], w: &[f64]) -> f64 {
        match self {
            Objective::Inverse => c.iter().zip(w).map(|(c, w)| c / w).sum(),
            Objective::NegLog => -c.iter().zip(w).map(|(c, w)| c * w.ln()).sum::<f64>(),
        }
    }

    /// `−h'(w)`, which is nonnegative.
    fn neg_grad(self, c: &[f64], w: &[f64]) -> Vec<f64> {
        match self {
            Objective::Inverse => c.iter().zip(w).map(|(c, w)| c / (w * w)).collect(),
            Objective::NegLog => c.iter().zip(w).map(|(c, w)| c / w).collect(),
        }
    }

    fn curvature(self, c: &[f64], w: &[f64]) -> Vec<f64> {
        match self {
            Objective::Inverse => c.iter().zip(w).map(|(c, w)| 2.0 * c / (w * w * w)).collect(),
            Objective::NegLog => c.iter().zip(w).map(|(c, w)| c / (w * w)).collect(),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct EngineOutcome {
    pub atoms: Vec<Vec<f64>>,
    pub mu: Vec<f64>,
    pub w: Vec<f64>,
    /// `⟨w, −h'(w)⟩`.
    pub pairing: f64,
    /// `max_a ⟨a, −h'(w)⟩`.
    pub oracle: f64,
    pub iterations: usize,
}

impl EngineOutcome {
    /// `oracle / pairing − 1 ≥ 0`; zero at the optimum.
    pub fn relative_gap(&self) -> f64 {
        (self.oracle / self.pairing - 1.0).max(0.0)
    }
}

fn combine(atoms: &[Vec<f64>], mu: &[f64], s: usize) -> Vec<f64> {
    let mut w = vec![0.0; s];
    for (a, &m) in atoms.iter().zip(mu) {
        for (wj, aj) in w.iter_mut().zip(a) {
            *wj += m * aj;
        }
    }
    w
}

fn barrier_value(obj: Objective, c: &[f64], atoms: &[Vec<f64>], mu: &[f64], tau: f64) -> f64 {
    if mu.iter().any(|&m| m <= 0.0) {
        return f64::INFINITY;
    }
    let w = combine(atoms, mu, c.len());
    if w.iter().zip(c).any(|(&w, &c)| c > 0.0 && w <= 0.0) {
        return f64::INFINITY;
    }
    obj.value(c, &w) - tau * mu.iter().map(|m| m.ln()).sum::<f64>()
}

/// `(K⁺g, K⁺m)` for symmetric positive semidefinite `K`. Falls back from
/// Cholesky to a pseudo-inverse of the diagonally scaled matrix when atoms are
/// (numerically) dependent on the support.
fn solve_pair(k: &DMatrix<f64>, g: &DVector<f64>, m: &DVector<f64>) -> Option<(DVector<f64>, DVector<f64>)> {
    if let Some(chol) = k.clone().cholesky() {
        return Some((chol.solve(g), chol.solve(m)));
    }
    let r = k.nrows();
    let d = DVector::from_fn(r, |i, _| {
        let kii = k[(i, i)];
        if kii > 0.0 { 1.0 / kii.sqrt() } else { 1.0 }
    });
    let scaled = DMatrix::from_fn(r, r, |i, j| k[(i, j)] * d[i] * d[j]);
    let eig = scaled.symmetric_eigen();
    let top = eig.eigenvalues.amax();
    if !(top > 0.0) {
        return None;
    }
    let apply = |x: &DVector<f64>| -> DVector<f64> {
        let xs = x.component_mul(&d);
        let mut coeffs = eig.eigenvectors.transpose() * xs;
        for (c, &l) in coeffs.iter_mut().zip(eig.eigenvalues.iter()) {
            *c = if l > 1e-14 * top { *c / l } else { 0.0 };
        }
        (&eig.eigenvectors * coeffs).component_mul(&d)
    };
    Some((apply(g), apply(m)))
}

/// Minimizes `h(Σ μ_i a_i)` over the simplex, starting from `mu` (interior).
///
/// Newton steps are taken in relative coordinates `δ_i = d_i / μ_i`, which
/// keeps weights of very different magnitudes equally well resolved.
fn solve_master(obj: Objective, c: &[f64], atoms: &[Vec<f64>], mut mu: Vec<f64>) -> Vec<f64> {
    let r = atoms.len();
    if r == 1 {
        return vec![1.0];
    }
    let s = c.len();
    let w0 = combine(atoms, &mu, s);
    let terms: Vec<f64> = obj.neg_grad(c, &w0).iter().zip(&w0).map(|(g, w)| g * w).collect();
    let scale: f64 = terms.iter().sum::<f64>().max(1e-300);
    // atoms carrying only the smallest terms need weights of that order, so
    // the barrier has to end well below it
    let floor = terms.iter().copied().filter(|&t| t > 0.0).fold(scale, f64::min);
    let mut tau = 1e-2 * scale / r as f64;
    let tau_final = 1e-15 * floor / r as f64;
    loop {
        for _ in 0..100 {
            let w = combine(atoms, &mu, s);
            let g = obj.neg_grad(c, &w);
            let h2 = obj.curvature(c, &w);
            let m = DVector::from_column_slice(&mu);
            let grad = DVector::from_fn(r, |i, _| mu[i] * -atoms[i].iter().zip(&g).map(|(a, g)| a * g).sum::<f64>() - tau);
            let mut k = DMatrix::<f64>::zeros(r, r);
            for j in 0..s {
                if h2[j] == 0.0 {
                    continue;
                }
                for p in 0..r {
                    let ap = atoms[p][j];
                    if ap == 0.0 {
                        continue;
                    }
                    let apj = ap * h2[j];
                    for q in p..r {
                        k[(p, q)] += apj * atoms[q][j];
                    }
                }
            }
            for p in 0..r {
                for q in p..r {
                    k[(p, q)] *= mu[p] * mu[q];
                }
                for q in 0..p {
                    k[(p, q)] = k[(q, p)];
                }
                k[(p, p)] += tau;
            }
            let Some((u, v)) = solve_pair(&k, &grad, &m) else { break };
            let nu = -m.dot(&u) / m.dot(&v);
            let delta = -(&u + &v * nu);
            let decrement = delta.dot(&(&k * &delta));
            let step = delta.amax();
            if !(step > 1e-13) {
                break;
            }
            let mut t: f64 = 1.0;
            for &di in delta.iter() {
                if di < 0.0 {
                    t = t.min(-0.99 / di);
                }
            }
            let mut accepted = false;
            if decrement < 1e-8 * scale {
                // quadratic convergence region: barrier values no longer
                // resolve the decrease, take the step
                mu = (0..r).map(|i| mu[i] * (1.0 + t * delta[i])).collect();
                let total: f64 = mu.iter().sum();
                mu.iter_mut().for_each(|m| *m /= total);
                accepted = true;
            } else {
                let phi0 = barrier_value(obj, c, atoms, &mu, tau);
                for _ in 0..60 {
                    let trial: Vec<f64> = (0..r).map(|i| mu[i] * (1.0 + t * delta[i])).collect();
                    let phi = barrier_value(obj, c, atoms, &trial, tau);
                    if phi <= phi0 - 0.25 * t * decrement {
                        let total: f64 = trial.iter().sum();
                        mu = trial.into_iter().map(|m| m / total).collect();
                        accepted = true;
                        break;
                    }
                    t *= 0.5;
                }
            }
            if !accepted {
                break;
            }
        }
        if tau <= tau_final {
            break;
        }
        tau = (tau * 0.1).max(tau_final);
    }
    mu
}

/// Runs column generation until the relative Frank–Wolfe gap drops below
/// `target`, the oracle stops producing new atoms, or `budget` outer
/// iterations have been spent.
pub(crate) fn run(
    kind: Atomic,
    indices: &[usize],
    c: &[f64],
    obj: Objective,
    target: f64,
    budget: usize,
) -> Result<EngineOutcome> {
    let s = indices.len();
    let mut atoms = kind.initial_cover(indices);
    let mut mu = vec![1.0 / atoms.len() as f64; atoms.len()];
    let mut iterations = 0;
    loop {
        iterations += 1;
        mu = solve_master(obj, c, &atoms, mu);

        // drop atoms the optimum no longer uses (small weight and a reduced
        // cost clearly below the pairing), keeping every coordinate covered
        let peak = mu.iter().cloned().fold(0.0, f64::max);
        let w = combine(&atoms, &mu, s);
        let g = obj.neg_grad(c, &w);
        let pairing: f64 = g.iter().zip(&w).map(|(g, w)| g * w).sum();
        let keep: Vec<bool> = atoms
            .iter()
            .zip(&mu)
            .map(|(a, &m)| m > 1e-12 * peak || a.iter().zip(&g).map(|(a, g)| a * g).sum::<f64>() >= (1.0 - 1e-9) * pairing)
            .collect();
        if keep.iter().any(|k| !k) {
            let covered = (0..s).all(|j| {
                c[j] == 0.0 || atoms.iter().zip(&keep).any(|(a, &k)| k && a[j] > 0.0)
            });
            if covered {
                let mut kept_atoms = Vec::new();
                let mut kept_mu = Vec::new();
                for ((a, m), k) in atoms.into_iter().zip(mu).zip(&keep) {
                    if *k {
                        kept_atoms.push(a);
                        kept_mu.push(m);
                    }
                }
                let total: f64 = kept_mu.iter().sum();
                atoms = kept_atoms;
                mu = kept_mu.into_iter().map(|m| m / total).collect();
            }
        }

        let w = combine(&atoms, &mu, s);
        let g = obj.neg_grad(c, &w);
        let pairing: f64 = g.iter().zip(&w).map(|(g, w)| g * w).sum();
        let (oracle, atom) = kind.best_atom(indices, &g)?;
        let outcome = EngineOutcome { atoms: atoms.clone(), mu: mu.clone(), w, pairing, oracle, iterations };
        if outcome.relative_gap() <= target || iterations >= budget || atoms.contains(&atom) {
            return Ok(outcome);
        }
        // restart the barrier from a point that gives the new atom some weight
        let r = atoms.len() as f64;
        for m in mu.iter_mut() {
            *m *= r / (r + 1.0);
        }
        mu.push(1.0 / (r + 1.0));
        atoms.push(atom);
    }
}
