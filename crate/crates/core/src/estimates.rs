//! Rademacher averages, type-2 and cotype-2 ratios, and distance bounds.

use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::ackermann::ExtNat;
use crate::coverage;
use crate::error::{Error, Result};
use crate::spaces::{norm, SpaceSpec, SYM_EXACT_LIMIT, TSIRELSON_LIMIT};
use crate::vector::RealVector;

/// Largest family size averaged exactly.
pub const EXACT_LIMIT: usize = 14;

/// Two-sided 99% normal quantile.
pub const Z99: f64 = 2.575_829_303_548_901;

const CHUNK: usize = 4096;

/// Families up to this size memoize norms per sign pattern in Monte Carlo.
const CACHE_BITS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// All `2ⁿ` sign patterns.
    Exact,
    MonteCarlo { samples: usize, seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MethodKind {
    Exact,
    MonteCarlo,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RademacherEstimate {
    pub mean: f64,
    /// 99% confidence half-width; zero for exact averages.
    pub half_width: f64,
    pub method: MethodKind,
    pub samples: u64,
    pub seed: Option<u64>,
}

/// Neumaier summation.
fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Dense view of a family on the union of the supports.
struct Family {
    indices: Vec<usize>,
    /// `rows[j][p]`: coefficient of vector `j` at `indices[p]`.
    rows: Vec<Vec<f64>>,
}

impl Family {
    fn new(vectors: &[RealVector]) -> Self {
        let mut indices: Vec<usize> = vectors.iter().flat_map(|v| v.support()).collect();
        indices.sort_unstable();
        indices.dedup();
        let rows = vectors
            .iter()
            .map(|v| indices.iter().map(|&j| v.get(j)).collect())
            .collect();
        Self { indices, rows }
    }

    fn signed_sum(&self, sign: impl Fn(usize) -> f64) -> RealVector {
        let mut acc = vec![0.0; self.indices.len()];
        for (j, row) in self.rows.iter().enumerate() {
            let s = sign(j);
            for (a, r) in acc.iter_mut().zip(row) {
                *a += s * r;
            }
        }
        RealVector::from_sorted_unchecked(
            self.indices.iter().zip(acc).filter(|e| e.1 != 0.0).map(|(&j, v)| (j, v)).collect(),
        )
    }
}

/// `𝔼‖Σ ε_j x_j‖` over independent random signs.
pub fn rademacher_average(space: &SpaceSpec, vectors: &[RealVector], method: Method) -> Result<RademacherEstimate> {
    coverage::hit("rademacher_average");
    let n = vectors.len();
    if n == 0 {
        return Err(Error::InvalidArgument("empty vector family".into()));
    }
    let family = Family::new(vectors);
    match method {
        Method::Exact => {
            if n > EXACT_LIMIT {
                return Err(Error::LimitExceeded { what: "rademacher_average (exact)", size: n, limit: EXACT_LIMIT });
            }
            // ‖−z‖ = ‖z‖: fix ε_1 = +1 and average over the rest
            let half = 1u64 << (n - 1);
            let values: Vec<f64> = (0..half)
                .into_par_iter()
                .map(|mask| {
                    let z = family.signed_sum(|j| if j > 0 && (mask >> (j - 1)) & 1 == 1 { -1.0 } else { 1.0 });
                    norm(space, &z)
                })
                .collect::<Result<_>>()?;
            Ok(RademacherEstimate {
                mean: compensated_sum(values) / half as f64,
                half_width: 0.0,
                method: MethodKind::Exact,
                samples: 1u64 << n,
                seed: None,
            })
        }
        Method::MonteCarlo { samples, seed } => {
            if samples < 2 {
                return Err(Error::InvalidArgument("Monte Carlo needs at least two samples".into()));
            }
            // ‖−z‖ = ‖z‖, so a pattern and its negation share one slot
            let cache: Vec<OnceLock<f64>> = if n <= CACHE_BITS {
                (0..1usize << (n - 1)).map(|_| OnceLock::new()).collect()
            } else {
                Vec::new()
            };
            let full = (1u64 << n.min(63)) - 1;
            let chunks = samples.div_ceil(CHUNK);
            let partial: Vec<(f64, f64)> = (0..chunks)
                .into_par_iter()
                .map(|c| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(c as u64);
                    let count = CHUNK.min(samples - c * CHUNK);
                    let mut values = Vec::with_capacity(count);
                    let mut signs = vec![1.0; n];
                    for _ in 0..count {
                        let mut mask = 0u64;
                        for (j, s) in signs.iter_mut().enumerate() {
                            let negative = rng.random::<bool>();
                            *s = if negative { -1.0 } else { 1.0 };
                            if negative && j < 64 {
                                mask |= 1 << j;
                            }
                        }
                        let eval = || norm(space, &family.signed_sum(|j| signs[j]));
                        let value = if cache.is_empty() {
                            eval()?
                        } else {
                            let key = (if mask & 1 == 1 { !mask & full } else { mask } >> 1) as usize;
                            match cache[key].get() {
                                Some(&v) => v,
                                None => {
                                    let v = eval()?;
                                    let _ = cache[key].set(v);
                                    v
                                }
                            }
                        };
                        values.push(value);
                    }
                    let sum = compensated_sum(values.iter().copied());
                    let sq = compensated_sum(values.iter().map(|v| v * v));
                    Ok((sum, sq))
                })
                .collect::<Result<_>>()?;
            let total = samples as f64;
            let mean = compensated_sum(partial.iter().map(|p| p.0)) / total;
            let second = compensated_sum(partial.iter().map(|p| p.1)) / total;
            let var = ((second - mean * mean) * total / (total - 1.0)).max(0.0);
            Ok(RademacherEstimate {
                mean,
                half_width: Z99 * (var / total).sqrt(),
                method: MethodKind::MonteCarlo,
                samples: samples as u64,
                seed: Some(seed),
            })
        }
    }
}

fn square_sum(space: &SpaceSpec, vectors: &[RealVector]) -> Result<f64> {
    let mut acc = 0.0;
    for v in vectors {
        let n = norm(space, v)?;
        if n == 0.0 {
            return Err(Error::InvalidArgument("vectors must be nonzero".into()));
        }
        acc += n * n;
    }
    Ok(acc.sqrt())
}

/// `𝔼‖Σ ε_j x_j‖ / (Σ ‖x_j‖²)^{1/2}`.
pub fn type2_ratio(space: &SpaceSpec, vectors: &[RealVector], method: Method) -> Result<f64> {
    coverage::hit("type2_ratio");
    let denom = square_sum(space, vectors)?;
    Ok(rademacher_average(space, vectors, method)?.mean / denom)
}

/// `(Σ ‖x_j‖²)^{1/2} / 𝔼‖Σ ε_j x_j‖`.
pub fn cotype2_ratio(space: &SpaceSpec, vectors: &[RealVector], method: Method) -> Result<f64> {
    coverage::hit("cotype2_ratio");
    let num = square_sum(space, vectors)?;
    Ok(num / rademacher_average(space, vectors, method)?.mean)
}

/// Number of coordinates usable by candidate families, or `None` if the
/// space is unbounded.
fn ambient_dim(space: &SpaceSpec) -> Option<usize> {
    match space {
        SpaceSpec::Lp { dim, .. } => *dim,
        SpaceSpec::L2SumBlocks(blocks) => Some(blocks.iter().map(|b| b.1).fold(0usize, usize::saturating_add)),
        SpaceSpec::Convexify2(b) | SpaceSpec::Dual(b) => ambient_dim(b),
        _ => None,
    }
}

/// Largest support the norm evaluator accepts.
fn support_cap(space: &SpaceSpec) -> usize {
    match space {
        SpaceSpec::Tsirelson => TSIRELSON_LIMIT,
        SpaceSpec::SymTsirelson2 => SYM_EXACT_LIMIT,
        SpaceSpec::Convexify2(b) => support_cap(b),
        SpaceSpec::Dual(_) => 12,
        _ => 64,
    }
}

/// The `i`-th candidate family of `n` vectors. The first few are fixed;
/// later ones are random with a seed derived from `(seed, i)`.
fn candidate(space: &SpaceSpec, n: usize, i: usize, seed: u64) -> Vec<RealVector> {
    let dim = ambient_dim(space).unwrap_or(usize::MAX);
    let cap = support_cap(space);
    match i {
        // leading unit vectors
        0 => (1..=n.min(dim)).map(RealVector::basis).collect(),
        // unit vectors pushed right
        1 if dim == usize::MAX => (n..2 * n).map(RealVector::basis).collect(),
        // flat disjoint blocks of width 2
        2 if dim >= 2 * n && 2 * n <= cap => {
            (0..n).map(|j| RealVector::indicator([2 * j + 1, 2 * j + 2])).collect()
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let width = n.max(2).min(dim).min(cap);
            match i % 3 {
                // Gaussian vectors on the first coordinates
                0 => (0..n)
                    .map(|_| {
                        let vals: Vec<f64> = (0..width).map(|_| StandardNormal.sample(&mut rng)).collect();
                        RealVector::from_dense(&vals)
                    })
                    .collect(),
                // rescaled unit vectors
                1 => (1..=n.min(dim))
                    .map(|j| RealVector::basis(j).scale(rng.random_range(0.1..1.0)))
                    .collect(),
                // disjoint random blocks
                _ => {
                    let block = (width / n).max(1);
                    (0..n)
                        .map(|j| {
                            let entries = (0..block)
                                .map(|t| (j * block + t + 1, rng.random_range(-1.0..1.0)))
                                .filter(|&(idx, _)| idx <= dim.min(cap.max(n)));
                            RealVector::from_entries(entries).unwrap_or_default()
                        })
                        .collect()
                }
            }
        }
    }
}

/// Best exact type-2 ratio over the first `budget` candidate families of
/// `n` vectors: a lower bound for the type-2 constant on `n` vectors.
///
/// The candidate stream is fixed by `seed`, so the result is nondecreasing
/// in `budget`.
pub fn type2_search(space: &SpaceSpec, n: usize, budget: usize, seed: u64) -> Result<f64> {
    coverage::hit("type2_search");
    if n == 0 || n > EXACT_LIMIT {
        return Err(Error::LimitExceeded { what: "type2_search family size", size: n, limit: EXACT_LIMIT });
    }
    let mut best = 0.0f64;
    for i in 0..budget.max(1) {
        let family: Vec<RealVector> = candidate(space, n, i, seed).into_iter().filter(|v| !v.is_zero()).collect();
        if family.is_empty() {
            continue;
        }
        best = best.max(type2_ratio(space, &family, Method::Exact)?);
    }
    Ok(best)
}

/// `lower ≤ d ≤ upper`, with a note on where the numbers come from.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceBound {
    pub lower: f64,
    pub upper: f64,
    pub provenance: String,
}

/// `d_E ≤ a_2(E)·c_2(E)`.
pub fn kwapien_bound(a2: f64, c2: f64) -> Result<DistanceBound> {
    coverage::hit("kwapien_bound");
    if !(a2 >= 1.0 && c2 >= 1.0) {
        return Err(Error::InvalidArgument(format!("type and cotype constants must be ≥ 1 (got {a2}, {c2})")));
    }
    Ok(DistanceBound { lower: 1.0, upper: a2 * c2, provenance: format!("Kwapień: a2·c2 = {a2}·{c2}") })
}

/// `d(ℓ_p^k, ℓ_2^k) = k^{|1/p − 1/2|}`.
pub fn bm_distance_lp(p: f64, k: u64) -> f64 {
    coverage::hit("bm_distance_lp");
    let inv = if p.is_infinite() { 0.0 } else { 1.0 / p };
    (k as f64).powf((inv - 0.5).abs())
}

/// A nonnegative real that may have overflowed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    Huge,
}

impl ExtReal {
    fn from_f64(v: f64) -> Self {
        if v.is_finite() {
            ExtReal::Finite(v)
        } else {
            ExtReal::Huge
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            ExtReal::Huge => None,
        }
    }
}

/// `4η·5^{2d}`.
pub fn twisted_distance_bound(d_n_x: f64, eta: f64) -> Result<ExtReal> {
    coverage::hit("twisted_distance_bound");
    if !(d_n_x >= 1.0 && eta > 0.0) {
        return Err(Error::InvalidArgument(format!("need d ≥ 1 and η > 0 (got {d_n_x}, {eta})")));
    }
    Ok(ExtReal::from_f64(4.0 * eta * 25f64.powf(d_n_x)))
}

/// `η·D²` with `D = max(d_n(X), d_n(X*))`.
pub fn twisted_distance_chain(d_x: f64, d_x_star: f64, eta: f64) -> ExtReal {
    let d = d_x.max(d_x_star);
    ExtReal::from_f64(eta * d * d)
}

/// `4ρ·A`.
pub fn twisted_type_bound(a_n: f64, rho: f64) -> f64 {
    4.0 * rho * a_n
}

/// `5^{dim E}`.
pub fn norming_dim(dim_e: u64) -> ExtNat {
    coverage::hit("norming_dim");
    ExtNat::Finite(5).pow(dim_e)
}
