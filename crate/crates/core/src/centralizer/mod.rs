//! Centralizers, the twisted quasi-norm and their defects.

mod lozanovskii;

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::coverage;
use crate::error::{Error, Result};
use crate::spaces::{jspace_params, SpaceSpec};
use crate::vector::RealVector;

pub use lozanovskii::{couple_centralizer, lozanovskii_factorize, Factorization};

/// Default tolerance of couple-derived centralizers.
pub const COUPLE_TOL: f64 = 1e-8;

/// Largest `|J|` for which all sign patterns are enumerated.
pub const SIGN_PATTERN_LIMIT: usize = 14;

#[derive(Clone, Debug, PartialEq)]
pub enum CentralizerSpec {
    /// `y ↦ y·log(|y|/‖y‖_2)`.
    KaltonPeck,
    Scaled { coefficient: f64, base: Box<CentralizerSpec> },
    /// Derived from the couple `(X, X*)` at the midpoint.
    FromCouple { base: SpaceSpec, tol: f64 },
}

impl CentralizerSpec {
    /// `Ω_n = (2/p_n* − 2/p_n)·Ω`, with `Ω` the Kalton–Peck map.
    pub fn scaled_n(n: u32) -> Result<Self> {
        let j = jspace_params(n)?;
        Ok(CentralizerSpec::Scaled {
            coefficient: 2.0 / j.p_star - 2.0 / j.p,
            base: Box::new(CentralizerSpec::KaltonPeck),
        })
    }

    pub fn couple(base: SpaceSpec) -> Self {
        CentralizerSpec::FromCouple { base, tol: COUPLE_TOL }
    }

    /// Whether the map is `c·Ω_KP` for some scalar `c`.
    pub fn is_kalton_peck_multiple(&self) -> bool {
        self.kalton_peck_coefficient().is_some()
    }

    /// The `c` with `Ω = c·Ω_KP`, if there is one.
    pub fn kalton_peck_coefficient(&self) -> Option<f64> {
        match self {
            CentralizerSpec::KaltonPeck => Some(1.0),
            CentralizerSpec::Scaled { coefficient, base } => base.kalton_peck_coefficient().map(|c| c * coefficient),
            CentralizerSpec::FromCouple { .. } => None,
        }
    }

    /// `Ω(y)`.
    pub fn apply(&self, y: &RealVector) -> Result<RealVector> {
        match self {
            CentralizerSpec::KaltonPeck => Ok(kalton_peck(y)),
            CentralizerSpec::Scaled { coefficient, base } => Ok(base.apply(y)?.scale(*coefficient)),
            CentralizerSpec::FromCouple { base, tol } => couple_centralizer(base, y, *tol),
        }
    }
}

impl fmt::Display for CentralizerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CentralizerSpec::KaltonPeck => write!(f, "kp"),
            CentralizerSpec::Scaled { coefficient, base } => write!(f, "scaled[{coefficient}]:{base}"),
            CentralizerSpec::FromCouple { base, tol } if *tol == COUPLE_TOL => write!(f, "couple:{base}"),
            CentralizerSpec::FromCouple { base, tol } => write!(f, "couple[{tol}]:{base}"),
        }
    }
}

impl FromStr for CentralizerSpec {
    type Err = Error;

    /// `kp`, `scaled:<n>`, `scaled[<c>]:<spec>`, `couple:<space>`,
    /// `couple[<tol>]:<space>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("kp") {
            return Ok(CentralizerSpec::KaltonPeck);
        }
        let bracket = |rest: &str| -> Result<(f64, String)> {
            let close = rest.find("]:").ok_or_else(|| Error::Parse(format!("centralizer {s:?}")))?;
            let v: f64 = rest[..close].trim().parse().map_err(|_| Error::Parse(format!("number in {s:?}")))?;
            Ok((v, rest[close + 2..].to_string()))
        };
        if let Some(rest) = s.strip_prefix("scaled:") {
            let n: u32 = rest.trim().parse().map_err(|_| Error::Parse(format!("scaled:<n> expects an integer, got {rest:?}")))?;
            return Self::scaled_n(n);
        }
        if let Some(rest) = s.strip_prefix("scaled[") {
            let (coefficient, inner) = bracket(rest)?;
            return Ok(CentralizerSpec::Scaled { coefficient, base: Box::new(inner.parse()?) });
        }
        if let Some(rest) = s.strip_prefix("couple:") {
            return Ok(CentralizerSpec::couple(rest.parse()?));
        }
        if let Some(rest) = s.strip_prefix("couple[") {
            let (tol, inner) = bracket(rest)?;
            return Ok(CentralizerSpec::FromCouple { base: inner.parse()?, tol });
        }
        Err(Error::Parse(format!("unknown centralizer {s:?} (expected kp, scaled:<n> or couple:<space>)")))
    }
}

/// A point `(x, y)` of the twisted sum.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TwistedVector {
    pub x: RealVector,
    pub y: RealVector,
}

impl TwistedVector {
    pub fn new(x: RealVector, y: RealVector) -> Self {
        Self { x, y }
    }

    /// `v_{2j−1} = (e_j, 0)`, `v_{2j} = (0, e_j)`.
    pub fn basis(i: usize) -> Result<Self> {
        if i == 0 {
            return Err(Error::InvalidArgument("basis indices start at 1".into()));
        }
        let e = RealVector::basis(i.div_ceil(2));
        Ok(if i % 2 == 1 { Self::new(e, RealVector::zero()) } else { Self::new(RealVector::zero(), e) })
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.x.add(&other.x), self.y.add(&other.y))
    }

    pub fn scale(&self, lambda: f64) -> Self {
        Self::new(self.x.scale(lambda), self.y.scale(lambda))
    }
}

/// The homogeneous Kalton–Peck map `y_j·log(|y_j|/‖y‖_2)`.
pub fn kalton_peck(y: &RealVector) -> RealVector {
    coverage::hit("kalton_peck");
    let n = y.l2_norm();
    if n == 0.0 {
        return RealVector::zero();
    }
    y.map(|v| v * (v.abs() / n).ln())
}

/// `Ω_n(y) = (2/p_n* − 2/p_n)·kalton_peck(y)` for `n ≥ 4`.
pub fn scaled_centralizer(n: u32, y: &RealVector) -> Result<RealVector> {
    coverage::hit("scaled_centralizer");
    CentralizerSpec::scaled_n(n)?.apply(y)
}

/// `‖x − Ω(y)‖_2 + ‖y‖_2`.
pub fn twisted_quasinorm(omega: &CentralizerSpec, v: &TwistedVector) -> Result<f64> {
    coverage::hit("twisted_quasinorm");
    if v.y.is_zero() {
        return Ok(v.x.l2_norm());
    }
    Ok(v.x.sub(&omega.apply(&v.y)?).l2_norm() + v.y.l2_norm())
}

/// `‖Ω(a·y) − a·Ω(y)‖_2 / (‖a‖_∞ ‖y‖_2)`.
pub fn centralizer_defect(omega: &CentralizerSpec, a: &RealVector, y: &RealVector) -> Result<f64> {
    coverage::hit("centralizer_defect");
    if y.is_zero() {
        return Err(Error::InvalidArgument("centralizer_defect needs y ≠ 0".into()));
    }
    let am = a.linf_norm();
    if am == 0.0 {
        return Ok(0.0);
    }
    let lhs = omega.apply(&a.mul(y))?;
    let rhs = a.mul(&omega.apply(y)?);
    Ok(lhs.sub(&rhs).l2_norm() / (am * y.l2_norm()))
}

/// Applies `T_σ: e_n ↦ e_{σ(n)}`; `sigma[n−1]` is `σ(n)`.
pub fn permute(sigma: &[usize], y: &RealVector) -> Result<RealVector> {
    if let Some(m) = y.max_index() {
        if m > sigma.len() {
            return Err(Error::InvalidArgument(format!(
                "permutation covers 1..={} but the support reaches {m}",
                sigma.len()
            )));
        }
    }
    let mut seen = std::collections::HashSet::with_capacity(sigma.len());
    for &t in sigma {
        if t == 0 {
            return Err(Error::InvalidArgument("permutation images start at 1".into()));
        }
        if !seen.insert(t) {
            return Err(Error::InvalidArgument(format!("permutation is not injective: {t} repeated")));
        }
    }
    y.relabel(|j| sigma[j - 1])
}

/// `‖T_σ Ω(y) − Ω(T_σ y)‖_2 / ‖y‖_2`.
pub fn symmetry_defect(omega: &CentralizerSpec, sigma: &[usize], y: &RealVector) -> Result<f64> {
    coverage::hit("symmetry_defect");
    if y.is_zero() {
        return Err(Error::InvalidArgument("symmetry_defect needs y ≠ 0".into()));
    }
    let lhs = permute(sigma, &omega.apply(y)?)?;
    let rhs = omega.apply(&permute(sigma, y)?)?;
    Ok(lhs.sub(&rhs).l2_norm() / y.l2_norm())
}

/// Coefficient source for [`euclidean_constant`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Sampler {
    /// Number of Gaussian coefficient vectors.
    pub gaussian: usize,
    pub seed: u64,
}

impl Default for Sampler {
    fn default() -> Self {
        Self { gaussian: 256, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EuclideanConstant {
    /// Largest `max(Q(c)/‖c‖_2, ‖c‖_2/Q(c))` seen.
    pub k: f64,
    /// The maximizing coefficients, indexed like `J`.
    pub argmax: Vec<f64>,
    /// `k` is the true constant, not only a lower bound.
    pub exact: bool,
    pub samples: usize,
}

/// Lower bound for the constant `K` making `(v_{2j})_{j∈J}` `K`-equivalent
/// to the unit vector basis of `ℓ_2^{|J|}`.
///
/// Tries all sign patterns when `|J| ≤ 14`, the all-ones vector, and
/// `sampler.gaussian` Gaussian vectors.
pub fn euclidean_constant(omega: &CentralizerSpec, j: &[usize], sampler: Sampler) -> Result<EuclideanConstant> {
    coverage::hit("euclidean_constant");
    if j.is_empty() {
        return Err(Error::InvalidArgument("euclidean_constant needs a nonempty index set".into()));
    }
    let mut indices = j.to_vec();
    indices.sort_unstable();
    if indices.windows(2).any(|w| w[0] == w[1]) || indices[0] == 0 {
        return Err(Error::InvalidArgument("index set must hold distinct positive integers".into()));
    }
    let m = indices.len();
    let mut best = EuclideanConstant { k: 1.0, argmax: vec![1.0; m], exact: false, samples: 0 };
    let kp = omega.kalton_peck_coefficient();
    let consider = |c: Vec<f64>, best: &mut EuclideanConstant| -> Result<()> {
        best.samples += 1;
        let (q, n) = match kp {
            // Q(c) = |κ|·‖c·log(|c|/‖c‖)‖ + ‖c‖, in one pass over the coefficients
            Some(kappa) => {
                let n = c.iter().map(|v| v * v).sum::<f64>().sqrt();
                if n == 0.0 {
                    return Ok(());
                }
                let spread = c
                    .iter()
                    .filter(|v| **v != 0.0)
                    .map(|v| {
                        let t = v * (v.abs() / n).ln();
                        t * t
                    })
                    .sum::<f64>()
                    .sqrt();
                (kappa.abs() * spread + n, n)
            }
            None => {
                let y = RealVector::from_sorted_unchecked(
                    indices.iter().zip(&c).filter(|e| *e.1 != 0.0).map(|(&i, &v)| (i, v)).collect(),
                );
                let n = y.l2_norm();
                if n == 0.0 {
                    return Ok(());
                }
                (twisted_quasinorm(omega, &TwistedVector::new(RealVector::zero(), y))?, n)
            }
        };
        let ratio = (q / n).max(n / q);
        if ratio > best.k {
            best.k = ratio;
            best.argmax = c;
        }
        Ok(())
    };
    consider(vec![1.0; m], &mut best)?;
    if m <= SIGN_PATTERN_LIMIT {
        // Ω is odd, so the first sign can stay +
        for mask in 1u32..(1 << (m - 1)) {
            let c = (0..m).map(|i| if i > 0 && mask >> (i - 1) & 1 == 1 { -1.0 } else { 1.0 }).collect();
            consider(c, &mut best)?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(sampler.seed);
    for _ in 0..sampler.gaussian {
        let c = (0..m).map(|_| StandardNormal.sample(&mut rng)).collect();
        consider(c, &mut best)?;
    }
    // with Q(c) = ‖c‖(1 + |κ|·‖Ω_KP(ĉ)‖), flat coefficients maximize once
    // |J| ≥ 3; a single vector has Ω = 0
    best.exact = m == 1 || (omega.is_kalton_peck_multiple() && m >= 3);
    Ok(best)
}
