//! The hierarchy `g_0(k) = k + 1`, `g_{n+1}(k) = g_n^{(k)}(k)` and its
//! inverse `α`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::coverage;
use crate::error::{Error, Result};

/// Saturating natural number: anything above `u64::MAX` is `Huge`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExtNat {
    Finite(u64),
    Huge,
}

impl ExtNat {
    pub const THRESHOLD: u64 = u64::MAX;

    pub fn is_huge(self) -> bool {
        self == ExtNat::Huge
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            ExtNat::Finite(v) => Some(v),
            ExtNat::Huge => None,
        }
    }

    fn lift(v: Option<u64>) -> Self {
        v.map_or(ExtNat::Huge, ExtNat::Finite)
    }

    pub fn add(self, other: ExtNat) -> ExtNat {
        match (self, other) {
            (ExtNat::Finite(a), ExtNat::Finite(b)) => Self::lift(a.checked_add(b)),
            _ => ExtNat::Huge,
        }
    }

    pub fn mul(self, other: ExtNat) -> ExtNat {
        match (self, other) {
            (ExtNat::Finite(0), _) | (_, ExtNat::Finite(0)) => ExtNat::Finite(0),
            (ExtNat::Finite(a), ExtNat::Finite(b)) => Self::lift(a.checked_mul(b)),
            _ => ExtNat::Huge,
        }
    }

    /// `self^e`, saturating.
    pub fn pow(self, e: u64) -> ExtNat {
        match self {
            _ if e == 0 => ExtNat::Finite(1),
            ExtNat::Finite(b @ (0 | 1)) => ExtNat::Finite(b),
            ExtNat::Finite(b) => match u32::try_from(e) {
                Ok(e) => Self::lift(b.checked_pow(e)),
                Err(_) => ExtNat::Huge,
            },
            ExtNat::Huge => ExtNat::Huge,
        }
    }
}

impl PartialOrd for ExtNat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtNat {
    /// `Huge` exceeds every finite value; two `Huge`s compare equal.
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtNat::Finite(a), ExtNat::Finite(b)) => a.cmp(b),
            (ExtNat::Finite(_), ExtNat::Huge) => Ordering::Less,
            (ExtNat::Huge, ExtNat::Finite(_)) => Ordering::Greater,
            (ExtNat::Huge, ExtNat::Huge) => Ordering::Equal,
        }
    }
}

impl fmt::Display for ExtNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtNat::Finite(v) => write!(f, "{v}"),
            ExtNat::Huge => write!(f, "huge"),
        }
    }
}

/// `g_n(k)`, using `g_1(k) = 2k` and `g_2(k) = k·2^k` and iterating above.
pub fn g(n: u32, k: u64) -> ExtNat {
    coverage::hit("g");
    g_inner(n, k)
}

fn g_inner(n: u32, k: u64) -> ExtNat {
    match n {
        0 => ExtNat::lift(k.checked_add(1)),
        1 => ExtNat::lift(k.checked_mul(2)),
        2 => ExtNat::Finite(k).mul(ExtNat::Finite(2).pow(k)),
        _ if k == 1 => ExtNat::Finite(2),
        _ => {
            let mut v = ExtNat::Finite(k);
            for _ in 0..k {
                match v {
                    ExtNat::Finite(x) => v = g_inner(n - 1, x),
                    // g_{n−1}(m) ≥ m for every level, so Huge stays Huge
                    ExtNat::Huge => break,
                }
            }
            v
        }
    }
}

/// `g_n(k)` by plain iteration from `g_0`, with no closed forms. Gives up
/// with an error after `budget` applications of `g_0`.
pub fn g_iterated(n: u32, k: u64, budget: u64) -> Result<ExtNat> {
    let mut spent = 0u64;
    iterate(n, k, budget, &mut spent)
}

fn iterate(n: u32, k: u64, budget: u64, spent: &mut u64) -> Result<ExtNat> {
    if n == 0 {
        *spent += 1;
        if *spent > budget {
            return Err(Error::LimitExceeded { what: "g_iterated steps", size: *spent as usize, limit: budget as usize });
        }
        return Ok(ExtNat::lift(k.checked_add(1)));
    }
    let mut v = k;
    for _ in 0..k {
        match iterate(n - 1, v, budget, spent)? {
            ExtNat::Finite(x) => v = x,
            ExtNat::Huge => return Ok(ExtNat::Huge),
        }
    }
    Ok(ExtNat::Finite(v))
}

/// `g_n(k)` as an exact integer, or `None` once it needs more than
/// `max_bits` bits.
pub fn g_exact(n: u32, k: &BigUint, max_bits: u64) -> Option<BigUint> {
    let out = match n {
        0 => k + 1u32,
        1 => k * 2u32,
        2 => {
            let e = k.to_u64()?;
            if e.saturating_add(k.bits()) > max_bits {
                return None;
            }
            k << e
        }
        _ => {
            let mut v = k.clone();
            let mut i = BigUint::from(0u32);
            while &i < k {
                v = g_exact(n - 1, &v, max_bits)?;
                i += BigUint::one();
            }
            v
        }
    };
    (out.bits() <= max_bits).then_some(out)
}

/// The `i` with `g_i(2) ≤ n < g_{i+1}(2)`; `0` for `n < 3`.
pub fn alpha(n: u64) -> u32 {
    coverage::hit("alpha");
    let n = ExtNat::Finite(n);
    let mut i = 0;
    while g_inner(i + 1, 2) <= n {
        i += 1;
    }
    i
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlphaShiftReport {
    pub limit: u64,
    pub checked: u64,
    /// `(n, α(nⁿ), α(n))` for the first `n` with `α(nⁿ) > α(n) + 2`.
    pub counterexample: Option<(u64, u32, u32)>,
}

impl AlphaShiftReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// `α` of `nⁿ` when `nⁿ` may exceed `u64`.
fn alpha_of_self_power(n: u64) -> Result<u32> {
    match ExtNat::Finite(n).pow(n) {
        ExtNat::Finite(v) => Ok(alpha(v)),
        ExtNat::Huge => {
            // g_3(2) = 2048 < 2^64 ≤ nⁿ, and nⁿ < 2^(n log₂ n) < 2^(2^64) < g_4(2)
            // as long as n·log₂ n < 2^64
            if (n as f64) * (n as f64).log2() < 1.8e19 {
                Ok(3)
            } else {
                Err(Error::InvalidArgument(format!("n = {n}: nⁿ cannot be placed against g_4(2)")))
            }
        }
    }
}

/// Checks `α(nⁿ) ≤ α(n) + 2` for `3 ≤ n ≤ limit`.
pub fn verify_alpha_shift(limit: u64) -> Result<AlphaShiftReport> {
    coverage::hit("verify_alpha_shift");
    let mut report = AlphaShiftReport { limit, checked: 0, counterexample: None };
    for n in 3..=limit {
        let lhs = alpha_of_self_power(n)?;
        let rhs = alpha(n);
        report.checked += 1;
        if lhs > rhs + 2 {
            report.counterexample = Some((n, lhs, rhs));
            break;
        }
    }
    Ok(report)
}

/// `2^{c·α(n)}`.
pub fn growth_bound(n: u64, c: f64) -> f64 {
    coverage::hit("growth_bound");
    (c * f64::from(alpha(n))).exp2()
}
