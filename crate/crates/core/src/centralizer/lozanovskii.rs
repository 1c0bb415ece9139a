//! Lozanovskii factorization `y² = a·b` with `a ∈ X`, `b ∈ X*`.
//!
//! For a unit vector `y` of `ℓ_2` the infimum of `‖a‖_X ‖b‖_{X*}` is 1, so
//! `product − 1` is the certified gap of any factorization.

use crate::coverage;
use crate::error::{Error, Result};
use crate::spaces::atomic::Atomic;
use crate::spaces::engine::{self, Objective};
use crate::spaces::{block_slices, check_dim, conjugate_exponent, SpaceSpec};
use crate::vector::{lp_of_values, RealVector};

const LP_STEPS: usize = 200;

/// `a, b ≥ 0` on `supp y` with `a_j b_j = y_j²`.
#[derive(Clone, Debug, PartialEq)]
pub struct Factorization {
    pub a: RealVector,
    pub b: RealVector,
    /// `‖a‖_X`.
    pub norm_a: f64,
    /// An upper bound for `‖b‖_{X*}`.
    pub norm_b: f64,
    /// `norm_a · norm_b ≥ 1`.
    pub product: f64,
    pub iterations: usize,
}

struct Raw {
    a: Vec<f64>,
    b: Vec<f64>,
    norm_a: f64,
    norm_b: f64,
    iterations: usize,
}

impl Raw {
    fn swap(self) -> Raw {
        Raw { a: self.b, b: self.a, norm_a: self.norm_b, norm_b: self.norm_a, iterations: self.iterations }
    }
}

/// Factorizes `y² = a·b` minimizing `‖a‖_X ‖b‖_{X*}` to within `tol` of 1.
///
/// Requires `‖y‖_2 = 1`. The factors are balanced: `norm_a = norm_b`.
pub fn lozanovskii_factorize(base: &SpaceSpec, y: &RealVector, tol: f64) -> Result<Factorization> {
    coverage::hit("lozanovskii_factorize");
    base.validate()?;
    let n2 = y.l2_norm();
    if (n2 - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!("y must be a unit vector of ℓ_2 (‖y‖_2 = {n2})")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol = {tol} must be positive")));
    }
    let (indices, values): (Vec<usize>, Vec<f64>) = y.iter().unzip();
    let raw = factor(&base.simplified(), &indices, &values, y, tol)?;
    let product = raw.norm_a * raw.norm_b;
    if product - 1.0 > tol {
        return Err(Error::NotConverged {
            what: "lozanovskii_factorize",
            iterations: raw.iterations,
            lower: 1.0,
            upper: product,
        });
    }
    let s = (raw.norm_b / raw.norm_a).sqrt();
    let a = indices.iter().zip(&raw.a).map(|(&j, &v)| (j, v * s)).collect();
    let b = indices.iter().zip(&raw.b).map(|(&j, &v)| (j, v / s)).collect();
    let balanced = product.sqrt();
    Ok(Factorization {
        a: RealVector::from_sorted_unchecked(a),
        b: RealVector::from_sorted_unchecked(b),
        norm_a: balanced,
        norm_b: balanced,
        product,
        iterations: raw.iterations,
    })
}

fn factor(base: &SpaceSpec, indices: &[usize], values: &[f64], y: &RealVector, tol: f64) -> Result<Raw> {
    let sq: Vec<f64> = values.iter().map(|v| v * v).collect();
    let mass: f64 = sq.iter().sum();
    match base {
        SpaceSpec::Ell2 => {
            let a: Vec<f64> = values.iter().map(|v| v.abs()).collect();
            let n = mass.sqrt();
            Ok(Raw { b: a.clone(), a, norm_a: n, norm_b: n, iterations: 0 })
        }
        SpaceSpec::Lp { p, dim } => {
            check_dim(y, *dim)?;
            Ok(factor_lp(*p, values))
        }
        SpaceSpec::L2SumBlocks(blocks) => {
            let parts = block_slices(blocks, y)?;
            let mut a = Vec::with_capacity(values.len());
            let mut b = Vec::with_capacity(values.len());
            let (mut na, mut nb) = (0.0, 0.0);
            let mut iterations = 0;
            for (part, &(p, _)) in parts.iter().zip(blocks) {
                if part.is_empty() {
                    continue;
                }
                let vals: Vec<f64> = part.iter().map(|e| e.1).collect();
                let raw = factor_lp(p, &vals);
                // balance inside the block so the outer ℓ_2 sums match
                let s = (raw.norm_b / raw.norm_a).sqrt();
                a.extend(raw.a.iter().map(|v| v * s));
                b.extend(raw.b.iter().map(|v| v / s));
                let m = raw.norm_a * raw.norm_b;
                na += m;
                nb += m;
                iterations = iterations.max(raw.iterations);
            }
            Ok(Raw { a, b, norm_a: na.sqrt(), norm_b: nb.sqrt(), iterations })
        }
        SpaceSpec::Dual(inner) => Ok(factor(inner, indices, values, y, tol)?.swap()),
        SpaceSpec::Schreier => plain(Atomic::Schreier, indices, &sq, tol),
        SpaceSpec::Tsirelson => plain(Atomic::Tsirelson, indices, &sq, tol),
        SpaceSpec::SymTsirelson2 => convexified(Atomic::SymTsirelson, indices, values, &sq, tol),
        SpaceSpec::Convexify2(inner) => match inner.as_ref() {
            SpaceSpec::Schreier => convexified(Atomic::Schreier, indices, values, &sq, tol),
            SpaceSpec::Tsirelson => convexified(Atomic::Tsirelson, indices, values, &sq, tol),
            other => Err(Error::Unsupported(format!("factorization through the 2-convexification of {other}"))),
        },
    }
}

/// `ℓ_p` with `p` in `[1, ∞]`. The endpoints are explicit; in between,
/// multiplicative updates `a ← a·(π*/π)^η` on the log-coordinates, where `π`
/// and `π*` are the normalized `p`- and `p*`-th powers of `a` and `b = y²/a`.
fn factor_lp(p: f64, values: &[f64]) -> Raw {
    let sq: Vec<f64> = values.iter().map(|v| v * v).collect();
    if p == 1.0 || p.is_infinite() {
        let ones = vec![1.0; values.len()];
        let n_sq = lp_of_values(sq.iter().copied(), 1.0);
        let n_ones = if values.is_empty() { 0.0 } else { 1.0 };
        return if p == 1.0 {
            Raw { a: sq, b: ones, norm_a: n_sq, norm_b: n_ones, iterations: 0 }
        } else {
            Raw { a: ones, b: sq, norm_a: n_ones, norm_b: n_sq, iterations: 0 }
        };
    }
    let q = conjugate_exponent(p);
    let log_y2: Vec<f64> = sq.iter().map(|v| v.ln()).collect();
    let mut u: Vec<f64> = log_y2.iter().map(|l| 0.5 * l).collect();
    let objective = |u: &[f64]| -> (f64, f64, f64) {
        let na = lp_of_values(u.iter().map(|v| v.exp()), p);
        let nb = lp_of_values(u.iter().zip(&log_y2).map(|(u, l)| (l - u).exp()), q);
        ((na * nb).ln(), na, nb)
    };
    let log_normalized = |w: Vec<f64>| -> Vec<f64> {
        let m = w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lse = m + w.iter().map(|v| (v - m).exp()).sum::<f64>().ln();
        w.into_iter().map(|v| v - lse).collect()
    };
    // the infimum of log(‖a‖‖b‖) is log Σ y²
    let floor = sq.iter().sum::<f64>().ln();
    let (mut phi, mut na, mut nb) = objective(&u);
    let mut iterations = 0;
    while iterations < LP_STEPS && phi - floor > 1e-15 {
        iterations += 1;
        let log_pi = log_normalized(u.iter().map(|v| p * v).collect());
        let log_pi_star = log_normalized(u.iter().zip(&log_y2).map(|(u, l)| q * (l - u)).collect());
        let mut eta = 1.0 / (p + q);
        let mut improved = false;
        for _ in 0..40 {
            let trial: Vec<f64> =
                u.iter().zip(log_pi.iter().zip(&log_pi_star)).map(|(u, (lp, ls))| u + eta * (ls - lp)).collect();
            let (t_phi, t_na, t_nb) = objective(&trial);
            if t_phi < phi {
                u = trial;
                (phi, na, nb) = (t_phi, t_na, t_nb);
                improved = true;
                break;
            }
            eta *= 0.5;
        }
        if !improved {
            break;
        }
    }
    let a: Vec<f64> = u.iter().map(|v| v.exp()).collect();
    let b: Vec<f64> = sq.iter().zip(&a).map(|(s, a)| s / a).collect();
    Raw { a, b, norm_a: na, norm_b: nb, iterations }
}

fn engine_target(tol: f64) -> f64 {
    (tol * 1e-3).max(1e-13)
}

/// `X = B` with `B` atomic: `b = w` lies in the unit ball of `B*`, and
/// `‖a‖_B = ‖y²/w‖_B` is read off the oracle.
fn plain(kind: Atomic, indices: &[usize], sq: &[f64], tol: f64) -> Result<Raw> {
    let out = engine::run(kind, indices, sq, Objective::NegLog, engine_target(tol), usize::MAX)?;
    let a: Vec<f64> = sq.iter().zip(&out.w).map(|(s, w)| s / w).collect();
    Ok(Raw { a, b: out.w, norm_a: out.oracle, norm_b: 1.0, iterations: out.iterations })
}

/// `X = B²`: `a = |y|·(κ/w)^{1/2}`, `b = |y|·(w/κ)^{1/2}` with
/// `‖a‖²_{B²} = κ·G` and `‖b‖²_{(B²)*} ≤ Σ b²/w = 1/κ`, where `G` is the
/// oracle value at `w`.
fn convexified(kind: Atomic, indices: &[usize], values: &[f64], sq: &[f64], tol: f64) -> Result<Raw> {
    let out = engine::run(kind, indices, sq, Objective::NegLog, engine_target(tol), usize::MAX)?;
    let kappa = 1.0 / out.oracle.sqrt();
    let a: Vec<f64> = values.iter().zip(&out.w).map(|(v, w)| v.abs() * (kappa / w).sqrt()).collect();
    let b: Vec<f64> = values.iter().zip(&out.w).map(|(v, w)| v.abs() * (w / kappa).sqrt()).collect();
    let n = out.oracle.sqrt().sqrt();
    Ok(Raw { a, b, norm_a: n, norm_b: n, iterations: out.iterations })
}

/// `‖y‖_2 · ŷ · log(b/a)` with `(a, b)` the factorization of `ŷ = y/‖y‖_2`.
pub fn couple_centralizer(base: &SpaceSpec, y: &RealVector, tol: f64) -> Result<RealVector> {
    coverage::hit("couple_centralizer");
    if y.is_zero() {
        return Ok(RealVector::zero());
    }
    let n = y.l2_norm();
    let unit = y.scale(1.0 / n);
    let f = lozanovskii_factorize(base, &unit, tol)?;
    let out = unit
        .iter()
        .zip(f.a.values().zip(f.b.values()))
        .filter(|(_, (a, b))| a != b)
        .map(|((j, v), (a, b))| (j, n * v * (b / a).ln()))
        .filter(|e| e.1 != 0.0)
        .collect();
    Ok(RealVector::from_sorted_unchecked(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(values: &[f64]) -> RealVector {
        let y = RealVector::from_dense(values);
        let n = y.l2_norm();
        y.scale(1.0 / n)
    }

    #[test]
    fn hilbert_factors_are_equal() {
        let y = unit(&[3.0, -4.0]);
        let f = lozanovskii_factorize(&SpaceSpec::Ell2, &y, 1e-9).unwrap();
        assert_eq!(f.a, y.abs());
        assert_eq!(f.b, y.abs());
        assert!(couple_centralizer(&SpaceSpec::Ell2, &y.scale(5.0), 1e-9).unwrap().is_zero());
    }

    #[test]
    fn wide_dynamic_range() {
        let y = unit(&[0.408, 0.0, -8.3e-7, 0.0, 0.0, 0.0, 5.1e-10, 0.0, 0.0, 0.0, 0.0, 8.4e-10, 0.0, -9.7e-8]);
        for base in [SpaceSpec::schreier2(), SpaceSpec::tsirelson2(), SpaceSpec::lp(1.5)] {
            let f = lozanovskii_factorize(&base, &y, 1e-12).unwrap();
            assert!(f.product - 1.0 <= 1e-12, "{base}: {}", f.product);
        }
    }

    #[test]
    fn l1_endpoint() {
        let y = unit(&[1.0, -2.0, 2.0]);
        let f = lozanovskii_factorize(&SpaceSpec::lp(1.0), &y, 1e-9).unwrap();
        assert!((f.product - 1.0).abs() < 1e-15);
        let omega = couple_centralizer(&SpaceSpec::lp(1.0), &y, 1e-9).unwrap();
        for ((_, o), v) in omega.iter().zip(y.values()) {
            assert!((o + 2.0 * v * v.abs().ln()).abs() < 1e-14);
        }
    }

    #[test]
    fn lp_matches_powers() {
        let y = unit(&[0.1, -0.7, 0.3, 0.5]);
        let p = 4.0 / 3.0;
        let f = lozanovskii_factorize(&SpaceSpec::lp(p), &y, 1e-9).unwrap();
        assert!(f.product - 1.0 < 1e-12);
        for ((a, b), v) in f.a.values().zip(f.b.values()).zip(y.values()) {
            assert!((a - v.abs().powf(2.0 / p)).abs() < 1e-12);
            assert!((b - v.abs().powf(2.0 / 4.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn admissible_support_is_flat() {
        let y = unit(&[0.0, 0.0, 1.0, -2.0, 0.5]);
        let omega = couple_centralizer(&SpaceSpec::schreier2(), &y, 1e-9).unwrap();
        assert!(omega.linf_norm() < 1e-9, "{omega}");
    }

    #[test]
    fn atomic_bases_close_the_gap() {
        let y = unit(&[1.0, 0.4, -0.3, 0.8, 0.2, 0.1]);
        for base in [
            SpaceSpec::Schreier,
            SpaceSpec::Tsirelson,
            SpaceSpec::schreier2(),
            SpaceSpec::tsirelson2(),
            SpaceSpec::SymTsirelson2,
            SpaceSpec::dual(SpaceSpec::schreier2()),
            SpaceSpec::L2SumBlocks(vec![(1.0, 2), (1.5, 4)]),
        ] {
            let f = lozanovskii_factorize(&base, &y, 1e-8).unwrap();
            assert!(f.product >= 1.0 - 1e-12 && f.product <= 1.0 + 1e-8, "{base}: {}", f.product);
            for ((a, b), v) in f.a.values().zip(f.b.values()).zip(y.values()) {
                assert!((a * b - v * v).abs() <= 1e-14, "{base}");
            }
        }
    }

    #[test]
    fn requires_unit_vector() {
        let y = RealVector::from_dense(&[1.0, 1.0]);
        assert!(lozanovskii_factorize(&SpaceSpec::Ell2, &y, 1e-6).is_err());
    }
}
