//! Norms on finitely supported sequences and their duals.

mod admissible;
pub(crate) mod atomic;
mod dual;
pub(crate) mod engine;
mod symmetric;
mod tsirelson;

use std::fmt;
use std::str::FromStr;

use crate::coverage;
use crate::error::{Error, Result};
use crate::vector::{lp_of_values, RealVector};

pub use admissible::{
    enumerate_admissible, enumerate_admissible_with_limit, is_admissible, schreier_norm, schreier_norming_set,
    AdmissibleSet, ENUMERATION_LIMIT,
};
pub use dual::{dual_norm, dual_norm_with_budget, DualCertificate, DualNorm, DEFAULT_BUDGET, DEFAULT_TOL};
pub use symmetric::{sym_tsirelson2_norm, SymMode, SymNorm, EXACT_LIMIT as SYM_EXACT_LIMIT};
pub use tsirelson::{
    tsirelson_norm, tsirelson_norm_exact, tsirelson_norm_with_limit, tsirelson_witness, TsirelsonScalar,
    EXHAUSTIVE_LIMIT as TSIRELSON_LIMIT,
};

/// Symbolic description of a sequence space.
#[derive(Clone, Debug, PartialEq)]
pub enum SpaceSpec {
    /// `ℓ_p^k` (`dim = None` for `ℓ_p` on all of ℕ). `p = ∞` is the sup norm.
    Lp { p: f64, dim: Option<usize> },
    Ell2,
    Schreier,
    Tsirelson,
    /// `‖x‖ = ‖x²‖_base^{1/2}`.
    Convexify2(Box<SpaceSpec>),
    Dual(Box<SpaceSpec>),
    /// `ℓ_2`-sum of `ℓ_p^k` blocks laid out on consecutive index intervals.
    L2SumBlocks(Vec<(f64, usize)>),
    SymTsirelson2,
}

impl SpaceSpec {
    pub fn lp(p: f64) -> Self {
        SpaceSpec::Lp { p, dim: None }
    }

    pub fn lp_dim(p: f64, k: usize) -> Self {
        SpaceSpec::Lp { p, dim: Some(k) }
    }

    pub fn convexify2(base: SpaceSpec) -> Self {
        SpaceSpec::Convexify2(Box::new(base))
    }

    pub fn dual(base: SpaceSpec) -> Self {
        SpaceSpec::Dual(Box::new(base))
    }

    /// `𝒮²`.
    pub fn schreier2() -> Self {
        Self::convexify2(SpaceSpec::Schreier)
    }

    /// `𝒯²`.
    pub fn tsirelson2() -> Self {
        Self::convexify2(SpaceSpec::Tsirelson)
    }

    /// Blocks `(p_n, k_n)` for `n ∈ from..=to`, see [`jspace_params`].
    pub fn jspace(from: u32, to: u32) -> Result<Self> {
        let mut blocks = Vec::new();
        for n in from..=to {
            let j = jspace_params(n)?;
            let k = usize::try_from(j.k).map_err(|_| Error::InvalidArgument(format!("block size 2^{}", n + 1)))?;
            blocks.push((j.p, k));
        }
        Ok(SpaceSpec::L2SumBlocks(blocks))
    }

    /// Checks parameters: `p ≥ 1`, positive block sizes.
    pub fn validate(&self) -> Result<()> {
        let check_p = |p: f64| {
            if p >= 1.0 {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!("exponent {p} is below 1")))
            }
        };
        match self {
            SpaceSpec::Lp { p, dim } => {
                check_p(*p)?;
                if *dim == Some(0) {
                    return Err(Error::InvalidArgument("dimension must be positive".into()));
                }
                Ok(())
            }
            SpaceSpec::L2SumBlocks(blocks) => {
                if blocks.is_empty() {
                    return Err(Error::InvalidArgument("no blocks".into()));
                }
                for &(p, k) in blocks {
                    check_p(p)?;
                    if k == 0 {
                        return Err(Error::InvalidArgument("block size must be positive".into()));
                    }
                }
                Ok(())
            }
            SpaceSpec::Convexify2(b) | SpaceSpec::Dual(b) => b.validate(),
            _ => Ok(()),
        }
    }

    /// Rewrites 2-convexifications of `ℓ_p` spaces as `ℓ_{2p}`.
    pub(crate) fn simplified(&self) -> SpaceSpec {
        match self {
            SpaceSpec::Convexify2(b) => match b.simplified() {
                SpaceSpec::Lp { p, dim } => SpaceSpec::Lp { p: 2.0 * p, dim },
                SpaceSpec::Ell2 => SpaceSpec::lp(4.0),
                other => SpaceSpec::Convexify2(Box::new(other)),
            },
            SpaceSpec::Dual(b) => SpaceSpec::Dual(Box::new(b.simplified())),
            SpaceSpec::Lp { p, dim: None } if *p == 2.0 => SpaceSpec::Ell2,
            other => other.clone(),
        }
    }
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceSpec::Lp { p, dim: None } if *p == 1.0 => write!(f, "l1"),
            SpaceSpec::Lp { p, dim: None } if p.is_infinite() => write!(f, "linf"),
            SpaceSpec::Lp { p, dim } => {
                write!(f, "lp:{}", fmt_exponent(*p))?;
                if let Some(k) = dim {
                    write!(f, ":{k}")?;
                }
                Ok(())
            }
            SpaceSpec::Ell2 => write!(f, "l2"),
            SpaceSpec::Schreier => write!(f, "schreier"),
            SpaceSpec::Tsirelson => write!(f, "tsirelson"),
            SpaceSpec::Convexify2(b) => match b.as_ref() {
                SpaceSpec::Schreier => write!(f, "s2"),
                SpaceSpec::Tsirelson => write!(f, "t2"),
                other => write!(f, "conv2:{other}"),
            },
            SpaceSpec::Dual(b) => write!(f, "dual:{b}"),
            SpaceSpec::L2SumBlocks(blocks) => {
                write!(f, "blocks:")?;
                for (i, (p, k)) in blocks.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{}x{k}", fmt_exponent(*p))?;
                }
                Ok(())
            }
            SpaceSpec::SymTsirelson2 => write!(f, "ts2"),
        }
    }
}

fn fmt_exponent(p: f64) -> String {
    if p.is_infinite() {
        "inf".into()
    } else {
        format!("{p}")
    }
}

fn parse_exponent(text: &str) -> Result<f64> {
    let t = text.trim();
    if t == "inf" || t == "∞" {
        return Ok(f64::INFINITY);
    }
    let p = if let Some((a, b)) = t.split_once('/') {
        let a: f64 = a.trim().parse().map_err(|_| Error::Parse(format!("exponent {t:?}")))?;
        let b: f64 = b.trim().parse().map_err(|_| Error::Parse(format!("exponent {t:?}")))?;
        a / b
    } else {
        t.parse().map_err(|_| Error::Parse(format!("exponent {t:?}")))?
    };
    if !(p >= 1.0) {
        return Err(Error::Parse(format!("exponent {t:?} must be at least 1")));
    }
    Ok(p)
}

impl FromStr for SpaceSpec {
    type Err = Error;

    /// Names: `l1`, `l2`, `linf`, `lp:<p>[:<k>]`, `schreier`, `tsirelson`,
    /// `s2`, `t2`, `ts2`, `conv2:<name>`, `dual:<name>`,
    /// `blocks:<p>x<k>,...`, `j:<a>..<b>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let lower = s.to_ascii_lowercase();
        if let Some(rest) = lower.strip_prefix("conv2:") {
            return Ok(SpaceSpec::convexify2(rest.parse()?));
        }
        if let Some(rest) = lower.strip_prefix("dual:") {
            return Ok(SpaceSpec::dual(rest.parse()?));
        }
        if let Some(rest) = lower.strip_prefix("lp:") {
            let mut parts = rest.split(':');
            let p = parse_exponent(parts.next().unwrap_or(""))?;
            let dim = match parts.next() {
                None => None,
                Some(k) => Some(k.trim().parse::<usize>().map_err(|_| Error::Parse(format!("dimension {k:?}")))?),
            };
            if parts.next().is_some() {
                return Err(Error::Parse(format!("space name {s:?}")));
            }
            let spec = SpaceSpec::Lp { p, dim };
            spec.validate()?;
            return Ok(spec);
        }
        if let Some(rest) = lower.strip_prefix("blocks:") {
            let mut blocks = Vec::new();
            for item in rest.split(',') {
                let (p, k) = item
                    .split_once('x')
                    .ok_or_else(|| Error::Parse(format!("block {item:?}, expected <p>x<k>")))?;
                let k: usize = k.trim().parse().map_err(|_| Error::Parse(format!("block size {k:?}")))?;
                blocks.push((parse_exponent(p)?, k));
            }
            let spec = SpaceSpec::L2SumBlocks(blocks);
            spec.validate()?;
            return Ok(spec);
        }
        if let Some(rest) = lower.strip_prefix("j:") {
            let (a, b) = rest.split_once("..").unwrap_or((rest, rest));
            let a: u32 = a.trim().parse().map_err(|_| Error::Parse(format!("block range {rest:?}")))?;
            let b: u32 = b.trim().parse().map_err(|_| Error::Parse(format!("block range {rest:?}")))?;
            return SpaceSpec::jspace(a, b);
        }
        match lower.as_str() {
            "l1" => Ok(SpaceSpec::lp(1.0)),
            "l2" | "ell2" => Ok(SpaceSpec::Ell2),
            "linf" => Ok(SpaceSpec::lp(f64::INFINITY)),
            "schreier" | "s" => Ok(SpaceSpec::Schreier),
            "tsirelson" | "t" => Ok(SpaceSpec::Tsirelson),
            "s2" => Ok(SpaceSpec::schreier2()),
            "t2" => Ok(SpaceSpec::tsirelson2()),
            "ts2" | "sym-tsirelson2" => Ok(SpaceSpec::SymTsirelson2),
            _ => Err(Error::Parse(format!("unknown space {s:?}"))),
        }
    }
}

pub(crate) fn check_dim(x: &RealVector, dim: Option<usize>) -> Result<()> {
    if let (Some(k), Some(m)) = (dim, x.max_index()) {
        if m > k {
            return Err(Error::Dimension(format!("index {m} outside ℓ_p^{k}")));
        }
    }
    Ok(())
}

/// `‖x‖` in `space`.
///
/// `SymTsirelson2` is evaluated exactly, so supports above
/// [`SYM_EXACT_LIMIT`] are refused; `Dual` uses [`dual_norm`] at
/// [`DEFAULT_TOL`] and returns its certified upper bound.
pub fn norm(space: &SpaceSpec, x: &RealVector) -> Result<f64> {
    coverage::hit("norm");
    match space {
        SpaceSpec::Lp { p, dim } => {
            check_dim(x, *dim)?;
            Ok(x.lp_norm(*p))
        }
        SpaceSpec::Ell2 => Ok(x.l2_norm()),
        SpaceSpec::Schreier => Ok(schreier_norm(x)),
        SpaceSpec::Tsirelson => tsirelson_norm(x),
        SpaceSpec::Convexify2(base) => convexify2_norm(base, x),
        SpaceSpec::Dual(base) => Ok(dual_norm(base, x, DEFAULT_TOL)?.value),
        SpaceSpec::L2SumBlocks(blocks) => l2sum_blocks_norm(blocks, x),
        SpaceSpec::SymTsirelson2 => Ok(sym_tsirelson2_norm(x, SymMode::Exact)?.value),
    }
}

/// `‖x²‖_base^{1/2}`.
pub fn convexify2_norm(base: &SpaceSpec, x: &RealVector) -> Result<f64> {
    coverage::hit("convexify2_norm");
    Ok(norm(base, &x.square())?.sqrt())
}

/// `(Σ_n ‖x|_{block n}‖_{p_n}²)^{1/2}`.
pub fn l2sum_blocks_norm(blocks: &[(f64, usize)], x: &RealVector) -> Result<f64> {
    coverage::hit("l2sum_blocks_norm");
    let parts = block_slices(blocks, x)?;
    let sq: f64 = parts
        .iter()
        .zip(blocks)
        .map(|(part, &(p, _))| {
            let v = lp_of_values(part.iter().map(|&(_, v)| v), p);
            v * v
        })
        .sum();
    Ok(sq.sqrt())
}

/// Splits the entries of `x` by block. Errors if the support leaves the
/// declared blocks.
pub(crate) fn block_slices(blocks: &[(f64, usize)], x: &RealVector) -> Result<Vec<Vec<(usize, f64)>>> {
    let mut parts = vec![Vec::new(); blocks.len()];
    let mut b = 0;
    let mut end = blocks.first().map_or(0, |&(_, k)| k);
    for (j, v) in x.iter() {
        while b < blocks.len() && j > end {
            b += 1;
            if b < blocks.len() {
                end = end.saturating_add(blocks[b].1);
            }
        }
        if b == blocks.len() {
            return Err(Error::Dimension(format!("index {j} lies beyond the last block (ends at {end})")));
        }
        parts[b].push((j, v));
    }
    Ok(parts)
}

/// The exponents and block size of the `n`-th block of `𝒥`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JParams {
    pub p: f64,
    /// `+∞` when `p = 1`.
    pub p_star: f64,
    pub k: u64,
}

/// `1/p_n = 1/2 + 1/√n`, `1/p_n* = 1/2 − 1/√n`, `k_n = 2^{n+1}`.
///
/// Only `n ≥ 4` is accepted: smaller `n` would give `p_n < 1`.
pub fn jspace_params(n: u32) -> Result<JParams> {
    coverage::hit("jspace_params");
    if n > 62 {
        return Err(Error::InvalidArgument(format!("n = {n}: k_n = 2^(n+1) does not fit in 64 bits")));
    }
    let (p, p_star) = jspace_exponents(u64::from(n))?;
    Ok(JParams { p, p_star, k: 1u64 << (n + 1) })
}

/// `(p_n, p_n*)` alone, for any `n ≥ 4`.
pub fn jspace_exponents(n: u64) -> Result<(f64, f64)> {
    if n < 4 {
        return Err(Error::InvalidArgument(format!(
            "n = {n}: 1/p_n = 1/2 + 1/√n exceeds 1 for n < 4, so p_n would not be a norm exponent"
        )));
    }
    let r = 1.0 / (n as f64).sqrt();
    let p = 1.0 / (0.5 + r);
    let p_star = if n == 4 { f64::INFINITY } else { 1.0 / (0.5 - r) };
    Ok((p, p_star))
}

/// `p/(p−1)`, with `1* = ∞` and `∞* = 1`.
pub fn conjugate_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dispatch_examples() {
        let x = RealVector::from_dense(&[1.0, -2.0, 3.0]);
        assert_eq!(norm(&SpaceSpec::lp(1.0), &x).unwrap(), 6.0);
        assert_eq!(norm(&SpaceSpec::Schreier, &RealVector::from_dense(&[1.0, 1.0, 1.0])).unwrap(), 2.0);
    }

    #[test]
    fn convexified_schreier() {
        let v = convexify2_norm(&SpaceSpec::Schreier, &RealVector::from_dense(&[1.0, 1.0, 1.0])).unwrap();
        assert!((v - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(convexify2_norm(&SpaceSpec::Schreier, &RealVector::basis(9)).unwrap(), 1.0);
    }

    #[test]
    fn block_sums() {
        let one = RealVector::from_dense(&[1.0, 1.0]);
        assert_eq!(l2sum_blocks_norm(&[(1.0, 2)], &one).unwrap(), 2.0);
        let four = RealVector::from_dense(&[1.0; 4]);
        let v = l2sum_blocks_norm(&[(1.0, 2), (2.0, 2)], &four).unwrap();
        assert!((v - 6f64.sqrt()).abs() < 1e-15);
        assert!(matches!(l2sum_blocks_norm(&[(1.0, 2)], &RealVector::basis(3)), Err(Error::Dimension(_))));
        assert!(matches!(norm(&SpaceSpec::lp_dim(2.0, 2), &RealVector::basis(3)), Err(Error::Dimension(_))));
    }

    #[test]
    fn jspace_examples() {
        let j4 = jspace_params(4).unwrap();
        assert_eq!((j4.p, j4.p_star, j4.k), (1.0, f64::INFINITY, 32));
        let j16 = jspace_params(16).unwrap();
        assert!((j16.p - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!((j16.p_star, j16.k), (4.0, 131072));
        for n in 4..40 {
            let j = jspace_params(n).unwrap();
            let gap = 1.0 / j.p - 1.0 / j.p_star;
            assert!((gap - 2.0 / f64::from(n).sqrt()).abs() < 1e-15);
            assert!((1.0 / j.p + 1.0 / j.p_star - 1.0).abs() < 1e-15);
        }
        assert!(jspace_params(3).is_err());
    }

    #[test]
    fn names_round_trip() {
        for name in [
            "l1", "l2", "linf", "lp:3", "lp:1.5:8", "schreier", "tsirelson", "s2", "t2", "ts2", "dual:s2",
            "conv2:linf", "blocks:1x2,2x3", "dual:dual:lp:4",
        ] {
            let spec: SpaceSpec = name.parse().unwrap();
            assert_eq!(spec.to_string().parse::<SpaceSpec>().unwrap(), spec, "{name}");
        }
        assert_eq!("lp:4/3".parse::<SpaceSpec>().unwrap(), SpaceSpec::lp(4.0 / 3.0));
        assert!("lp:0.5".parse::<SpaceSpec>().is_err());
        assert!("hilbert".parse::<SpaceSpec>().is_err());
        let j: SpaceSpec = "j:4..5".parse().unwrap();
        assert_eq!(j, SpaceSpec::L2SumBlocks(vec![(1.0, 32), (jspace_params(5).unwrap().p, 64)]));
    }
}
