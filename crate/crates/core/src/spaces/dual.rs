//! Dual norms `‖y‖_* = sup{⟨x, y⟩ : ‖x‖ ≤ 1}` with certified brackets.
//!
//! `ℓ_p`-type spaces use Hölder. Plain atomic lattices (Schreier, Tsirelson)
//! use a cutting-plane LP over the constraints `⟨a, x⟩ ≤ 1`. For a
//! 2-convexified atomic lattice `B²`,
//!
//! `‖y‖²_{(B²)*} = min_{w ∈ conv 𝒜} Σ y_j² / w_j`,
//!
//! which the column-generation engine solves; the minimizer yields both an
//! atomic decomposition of `y` (upper bound) and a unit vector of `B²`
//! (lower bound).

use microlp::{ComparisonOp, OptimizationDirection, Problem};

use crate::coverage;
use crate::error::{Error, Result};
use crate::spaces::atomic::Atomic;
use crate::spaces::engine::{self, Objective};
use crate::spaces::{block_slices, check_dim, conjugate_exponent, norm, SpaceSpec};
use crate::vector::{lp_of_values, RealVector};

pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_BUDGET: usize = 100_000;

/// How the upper bound of a [`DualNorm`] is justified.
#[derive(Clone, Debug, PartialEq)]
pub enum DualCertificate {
    /// Hölder's inequality; the bracket is tight.
    ClosedForm,
    /// The dual of a dual: evaluated as the original norm.
    Bidual,
    /// `y = Σ pieces[i]`, each piece carried by one atom, with
    /// `‖pieces[i]‖_* ≤ costs[i]`.
    Decomposition { pieces: Vec<RealVector>, costs: Vec<f64> },
    /// LP relaxation over this many atom constraints.
    CuttingPlane { constraints: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct DualNorm {
    /// The certified upper bound.
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    /// A vector with `‖x‖ ≤ 1` and `⟨x, y⟩ = lower`, when one is produced.
    pub primal: Option<RealVector>,
    pub certificate: DualCertificate,
    pub iterations: usize,
}

impl DualNorm {
    fn closed(value: f64, primal: Option<RealVector>, certificate: DualCertificate) -> Self {
        Self { value, lower: value, upper: value, primal, certificate, iterations: 0 }
    }

    pub fn relative_gap(&self) -> f64 {
        if self.upper == 0.0 {
            0.0
        } else {
            self.upper / self.lower - 1.0
        }
    }
}

/// Dual norm with the default iteration budget.
pub fn dual_norm(base: &SpaceSpec, y: &RealVector, tol: f64) -> Result<DualNorm> {
    dual_norm_with_budget(base, y, tol, DEFAULT_BUDGET)
}

/// `sup{⟨x, y⟩ : norm(base, x) ≤ 1}` to relative accuracy `tol ≥ 1e−10`.
///
/// Fails with [`Error::NotConverged`] (carrying the best bracket) when the
/// gap is still above `tol` after `budget` outer iterations.
pub fn dual_norm_with_budget(base: &SpaceSpec, y: &RealVector, tol: f64, budget: usize) -> Result<DualNorm> {
    coverage::hit("dual_norm");
    if !(tol >= 1e-10) {
        return Err(Error::InvalidArgument(format!("tol = {tol} is below 1e-10")));
    }
    base.validate()?;
    if y.is_zero() {
        return Ok(DualNorm::closed(0.0, None, DualCertificate::ClosedForm));
    }
    match base.simplified() {
        SpaceSpec::Lp { p, dim } => {
            check_dim(y, dim)?;
            let q = conjugate_exponent(p);
            let primal = RealVector::from_sorted_unchecked(holder_primal(y.entries(), p));
            Ok(DualNorm::closed(y.lp_norm(q), Some(primal), DualCertificate::ClosedForm))
        }
        SpaceSpec::Ell2 => {
            let v = y.l2_norm();
            Ok(DualNorm::closed(v, Some(y.scale(1.0 / v)), DualCertificate::ClosedForm))
        }
        SpaceSpec::L2SumBlocks(blocks) => {
            let parts = block_slices(&blocks, y)?;
            let norms: Vec<f64> = parts
                .iter()
                .zip(&blocks)
                .map(|(part, &(p, _))| lp_of_values(part.iter().map(|e| e.1), conjugate_exponent(p)))
                .collect();
            let v = norms.iter().map(|n| n * n).sum::<f64>().sqrt();
            let mut primal = Vec::new();
            for ((part, &(p, _)), n) in parts.iter().zip(&blocks).zip(&norms) {
                if *n > 0.0 {
                    primal.extend(holder_primal(part, p).into_iter().map(|(j, x)| (j, x * n / v)));
                }
            }
            primal.retain(|e| e.1 != 0.0);
            Ok(DualNorm::closed(v, Some(RealVector::from_sorted_unchecked(primal)), DualCertificate::ClosedForm))
        }
        SpaceSpec::Dual(inner) => Ok(DualNorm::closed(norm(&inner, y)?, None, DualCertificate::Bidual)),
        SpaceSpec::Schreier => cutting_plane(Atomic::Schreier, y, tol, budget),
        SpaceSpec::Tsirelson => cutting_plane(Atomic::Tsirelson, y, tol, budget),
        SpaceSpec::SymTsirelson2 => convexified(Atomic::SymTsirelson, y, tol, budget),
        SpaceSpec::Convexify2(b) => match *b {
            SpaceSpec::Schreier => convexified(Atomic::Schreier, y, tol, budget),
            SpaceSpec::Tsirelson => convexified(Atomic::Tsirelson, y, tol, budget),
            other => Err(Error::Unsupported(format!("dual norm of the 2-convexification of {other}"))),
        },
    }
}

/// A unit vector of `ℓ_p` norming `y` in `ℓ_{p*}`, on the support of `y`.
fn holder_primal(entries: &[(usize, f64)], p: f64) -> Vec<(usize, f64)> {
    if entries.is_empty() {
        return Vec::new();
    }
    if p.is_infinite() {
        return entries.iter().map(|&(j, v)| (j, v.signum())).collect();
    }
    if p == 1.0 {
        let &(j, v) = entries.iter().max_by(|a, b| a.1.abs().total_cmp(&b.1.abs())).expect("nonempty");
        return vec![(j, v.signum())];
    }
    let q = conjugate_exponent(p);
    let n = lp_of_values(entries.iter().map(|e| e.1), q);
    entries.iter().map(|&(j, v)| (j, v.signum() * (v.abs() / n).powf(q - 1.0))).collect()
}

fn convexified(kind: Atomic, y: &RealVector, tol: f64, budget: usize) -> Result<DualNorm> {
    let (indices, values): (Vec<usize>, Vec<f64>) = y.iter().unzip();
    let scale = y.l2_norm();
    let unit: Vec<f64> = values.iter().map(|v| v / scale).collect();
    let c: Vec<f64> = unit.iter().map(|v| v * v).collect();
    let target = (tol * 1e-3).max(1e-13);
    let out = engine::run(kind, &indices, &c, Objective::Inverse, target, budget)?;

    let f: f64 = c.iter().zip(&out.w).map(|(c, w)| c / w).sum();
    let mut pieces = Vec::with_capacity(out.atoms.len());
    let mut costs = Vec::with_capacity(out.atoms.len());
    for (atom, &mu) in out.atoms.iter().zip(&out.mu) {
        let mut piece = Vec::new();
        let mut sq = 0.0;
        for (p, &a) in atom.iter().enumerate() {
            if a > 0.0 {
                let r = values[p] / out.w[p];
                piece.push((indices[p], mu * a * r));
                sq += a * r * r;
            }
        }
        piece.retain(|e| e.1 != 0.0);
        pieces.push(RealVector::from_sorted_unchecked(piece));
        costs.push(mu * sq.sqrt());
    }
    let upper = costs.iter().sum::<f64>().min(scale * f.sqrt());
    let lower = scale * f / out.oracle.sqrt();
    let norm_x = out.oracle.sqrt();
    let primal: Vec<(usize, f64)> =
        indices.iter().zip(&unit).zip(&out.w).map(|((&j, u), w)| (j, u / w / norm_x)).collect();
    let lower = lower.min(upper);
    let result = DualNorm {
        value: upper,
        lower,
        upper,
        primal: Some(RealVector::from_sorted_unchecked(primal)),
        certificate: DualCertificate::Decomposition { pieces, costs },
        iterations: out.iterations,
    };
    if result.relative_gap() > tol {
        return Err(Error::NotConverged { what: "dual_norm", iterations: out.iterations, lower, upper });
    }
    Ok(result)
}

fn cutting_plane(kind: Atomic, y: &RealVector, tol: f64, budget: usize) -> Result<DualNorm> {
    let (indices, values): (Vec<usize>, Vec<f64>) = y.iter().unzip();
    let scale = y.linf_norm();
    let weights: Vec<f64> = values.iter().map(|v| v.abs() / scale).collect();
    let s = indices.len();
    let target = (tol * 1e-3).max(1e-12);

    let mut problem = Problem::new(OptimizationDirection::Maximize);
    let vars: Vec<_> = weights.iter().map(|&g| problem.add_var(g, (0.0, 1.0))).collect();
    let mut constraints = 0;
    for atom in kind.initial_cover(&indices) {
        let expr: Vec<_> = vars.iter().zip(&atom).filter(|(_, &a)| a > 0.0).map(|(&v, &a)| (v, a)).collect();
        problem.add_constraint(expr, ComparisonOp::Le, 1.0);
        constraints += 1;
    }
    let lp_error = |e: microlp::Error| Error::Unsupported(format!("LP solver: {e}"));
    let mut solution = problem.solve().map_err(lp_error)?.into_solution().map_err(|_| Error::NotConverged {
        what: "dual_norm",
        iterations: 0,
        lower: 0.0,
        upper: f64::INFINITY,
    })?;

    let mut iterations = 0;
    loop {
        iterations += 1;
        let x: Vec<f64> = vars.iter().map(|&v| solution.var_value(v).max(0.0)).collect();
        let upper = solution.objective();
        let pairing: f64 = x.iter().zip(&weights).map(|(x, g)| x * g).sum();
        let (nx, atom) = kind.best_atom(&indices, &x)?;
        let shrink = nx.max(1.0);
        let lower = (pairing / shrink).min(upper);
        let gap = if lower > 0.0 { upper / lower - 1.0 } else { f64::INFINITY };
        if gap <= target || iterations >= budget || nx <= 1.0 {
            let (lower, upper) = (lower * scale, upper.max(lower) * scale);
            if gap > tol {
                return Err(Error::NotConverged { what: "dual_norm", iterations, lower, upper });
            }
            let primal: Vec<(usize, f64)> = (0..s)
                .filter(|&p| x[p] > 0.0)
                .map(|p| (indices[p], values[p].signum() * x[p] / shrink))
                .collect();
            return Ok(DualNorm {
                value: upper,
                lower,
                upper,
                primal: Some(RealVector::from_sorted_unchecked(primal)),
                certificate: DualCertificate::CuttingPlane { constraints },
                iterations,
            });
        }
        let expr: Vec<_> = vars.iter().zip(&atom).filter(|(_, &a)| a > 0.0).map(|(&v, &a)| (v, a)).collect();
        solution = solution
            .add_constraint(expr, ComparisonOp::Le, 1.0)
            .map_err(lp_error)?
            .into_solution()
            .map_err(|_| Error::NotConverged { what: "dual_norm", iterations, lower: lower * scale, upper: upper * scale })?;
        constraints += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_three_in_dual_of_s2() {
        let y = RealVector::from_dense(&[1.0, 1.0, 1.0]);
        let d = dual_norm(&SpaceSpec::schreier2(), &y, 1e-9).unwrap();
        let expected = 1.0 + 2f64.sqrt();
        assert!((d.value - expected).abs() < 1e-8 * expected, "{d:?}");
        assert!(d.lower <= d.upper);
        let x = d.primal.unwrap();
        assert!(norm(&SpaceSpec::schreier2(), &x).unwrap() <= 1.0 + 1e-12);
    }

    #[test]
    fn admissible_support_gives_l2() {
        let y = RealVector::from_entries(vec![(3, 0.5), (5, -2.0), (6, 1.0)]).unwrap();
        let d = dual_norm(&SpaceSpec::schreier2(), &y, 1e-9).unwrap();
        assert!((d.value - y.l2_norm()).abs() < 1e-12);
    }

    #[test]
    fn lp_self_duality() {
        let y = RealVector::from_dense(&[0.3, -1.0, 2.0]);
        assert_eq!(dual_norm(&SpaceSpec::Ell2, &y, 1e-6).unwrap().value, y.l2_norm());
        let d = dual_norm(&SpaceSpec::lp(3.0), &y, 1e-6).unwrap();
        assert!((d.value - y.lp_norm(1.5)).abs() < 1e-14);
        let x = d.primal.unwrap();
        assert!((x.lp_norm(3.0) - 1.0).abs() < 1e-12);
        assert!((x.dot(&y) - d.value).abs() < 1e-12);
    }

    #[test]
    fn plain_schreier_dual_brackets() {
        let y = RealVector::from_dense(&[1.0, 0.5, 2.0, 1.0, 0.25]);
        let d = dual_norm(&SpaceSpec::Schreier, &y, 1e-8).unwrap();
        // the dual of Schreier sits between ℓ_∞ and ℓ_1
        assert!(d.value >= y.linf_norm() - 1e-9 && d.value <= y.l1_norm() + 1e-9);
        let x = d.primal.unwrap();
        assert!(schreier_ok(&x));
        assert!((x.dot(&y) - d.lower).abs() < 1e-9);
    }

    fn schreier_ok(x: &RealVector) -> bool {
        crate::spaces::schreier_norm(x) <= 1.0 + 1e-9
    }

    #[test]
    fn bidual_is_the_norm() {
        let y = RealVector::from_dense(&[1.0, 1.0, 1.0]);
        let d = dual_norm(&SpaceSpec::dual(SpaceSpec::Schreier), &y, 1e-6).unwrap();
        assert_eq!(d.value, 2.0);
    }

    #[test]
    fn tolerance_floor() {
        assert!(dual_norm(&SpaceSpec::Ell2, &RealVector::basis(1), 1e-11).is_err());
    }
}
