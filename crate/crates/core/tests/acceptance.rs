//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::f64::consts::LN_2;
use std::panic;
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use twistlab::ackermann::{alpha, g, g_iterated, verify_alpha_shift, ExtNat};
use twistlab::centralizer::{
    centralizer_defect, couple_centralizer, euclidean_constant, kalton_peck, lozanovskii_factorize,
    scaled_centralizer, symmetry_defect, twisted_quasinorm, CentralizerSpec, Sampler, TwistedVector,
};
use twistlab::estimates::{bm_distance_lp, rademacher_average, Method};
use twistlab::spaces::{
    dual_norm, jspace_params, norm, tsirelson_norm, tsirelson_norm_exact, SpaceSpec, DEFAULT_TOL,
};
use twistlab::RealVector;

type Check = fn() -> Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(t: Instant, limit: Duration) -> Result<Duration, String> {
    let e = t.elapsed();
    ensure(e < limit, || format!("took {e:?}, limit {limit:?}"))?;
    Ok(e)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn coefficient(r: &mut ChaCha8Rng) -> f64 {
    loop {
        let v: f64 = r.random_range(-1.0..=1.0);
        if v != 0.0 {
            return v;
        }
    }
}

fn dense(r: &mut ChaCha8Rng, dim: usize) -> RealVector {
    RealVector::from_dense(&(0..dim).map(|_| coefficient(r)).collect::<Vec<_>>())
}

fn unit(v: RealVector) -> RealVector {
    let n = v.l2_norm();
    v.scale(1.0 / n)
}

fn u_block(n: u32) -> RealVector {
    RealVector::indicator((1usize << (n - 1))..(1usize << n)).scale((0.5 * (1.0 - f64::from(n))).exp2())
}

fn eq8_identity() -> Result<String, String> {
    let t = Instant::now();
    let mut worst = 0.0f64;
    for n in [4u32, 9, 16] {
        let size = 1usize << n;
        let v = scaled_centralizer(n, &RealVector::indicator(1..=size)).map_err(|e| e.to_string())?.l2_norm();
        let expected = 2.0 * f64::from(n).sqrt() * (size as f64).sqrt() * LN_2;
        if n == 4 {
            ensure((v - 11.090355).abs() < 1e-6, || format!("n=4 gives {v}"))?;
            ensure(rel(expected, 16.0 * LN_2) < 1e-15, || "16 log 2 mismatch".into())?;
        }
        worst = worst.max(rel(v, expected));
    }
    ensure(worst <= 1e-9, || format!("relative error {worst:e}"))?;
    let e = within(t, Duration::from_secs(1))?;
    Ok(format!("max relative error {worst:.1e}, {e:?}"))
}

fn claim_c_constant() -> Result<String, String> {
    let t = Instant::now();
    let mut report = Vec::new();
    for n in [4u32, 9, 16] {
        let j: Vec<usize> = (1..=1usize << n).collect();
        let omega = CentralizerSpec::scaled_n(n).map_err(|e| e.to_string())?;
        let k = euclidean_constant(&omega, &j, Sampler::default()).map_err(|e| e.to_string())?;
        let target = 1.0 + 2.0 * f64::from(n).sqrt() * LN_2;
        ensure(rel(k.k, target) <= 1e-9, || format!("n={n}: K={} vs {target}", k.k))?;
        ensure(k.k - 1.0 >= 2.0 * f64::from(n).sqrt() * LN_2 - 1e-9, || format!("n={n}: bound violated"))?;
        ensure(k.argmax.iter().all(|&c| c == k.argmax[0]), || format!("n={n}: maximizer is not flat"))?;
        report.push(format!("K_{n}={:.6}", k.k));
    }
    let e = within(t, Duration::from_secs(1))?;
    Ok(format!("{}, {e:?}", report.join(" ")))
}

fn claim_a_distance() -> Result<String, String> {
    let mut worst = 0.0f64;
    for n in [4u32, 9, 16, 25] {
        let j = jspace_params(n).map_err(|e| e.to_string())?;
        let d = bm_distance_lp(j.p, j.k);
        let r = f64::from(n).sqrt();
        let expected = r.exp2() * (1.0 / r).exp2();
        worst = worst.max((d - expected).abs() / expected);
    }
    ensure(worst <= 1e-12, || format!("relative error {worst:e}"))?;
    Ok(format!("max relative error {worst:.1e}"))
}

fn admissible_support(r: &mut ChaCha8Rng, dim: usize) -> Vec<usize> {
    let start = r.random_range(1..=dim);
    let len = r.random_range(1..=start.min(dim - start + 1));
    let mut rest: Vec<usize> = (start + 1..=dim).collect();
    rest.shuffle(r);
    let mut s: Vec<usize> = std::iter::once(start).chain(rest.into_iter().take(len - 1)).collect();
    s.sort_unstable();
    s
}

fn schreier_isometry() -> Result<String, String> {
    let t = Instant::now();
    let mut r = ChaCha8Rng::seed_from_u64(4);
    let ys: Vec<RealVector> = (0..1000)
        .map(|_| {
            let support = admissible_support(&mut r, 30);
            RealVector::from_entries(support.into_iter().map(|j| (j, coefficient(&mut r)))).expect("valid entries")
        })
        .collect();
    let s2 = SpaceSpec::schreier2();
    let rows: Vec<(f64, f64, f64)> = ys
        .par_iter()
        .map(|y| {
            let l2 = y.l2_norm();
            let primal = norm(&s2, y).map_err(|e| e.to_string())?;
            let d = dual_norm(&s2, y, DEFAULT_TOL).map_err(|e| e.to_string())?;
            Ok(((primal - l2).abs() / l2, (d.value - l2).abs() / l2, d.relative_gap()))
        })
        .collect::<Result<_, String>>()?;
    let max = |f: fn(&(f64, f64, f64)) -> f64| rows.iter().map(f).fold(0.0, f64::max);
    let (p, d, gap) = (max(|r| r.0), max(|r| r.1), max(|r| r.2));
    ensure(p <= 1e-12, || format!("S² vs ℓ2 deviation {p:e}"))?;
    ensure(d <= 1e-6, || format!("dual vs ℓ2 deviation {d:e}"))?;
    ensure(gap <= 1e-6, || format!("duality gap {gap:e}"))?;
    let e = within(t, Duration::from_secs(30))?;
    Ok(format!("primal {p:.1e}, dual {d:.1e}, gap {gap:.1e}, {e:?}"))
}

fn c0_blocks() -> Result<String, String> {
    let s2 = SpaceSpec::schreier2();
    let blocks: Vec<RealVector> = (1..=8).map(u_block).collect();
    let mut worst = 0.0f64;
    for mask in 1u32..256 {
        if mask.count_ones() > 6 {
            continue;
        }
        let sum = (0..8).filter(|b| mask >> b & 1 == 1).fold(RealVector::zero(), |a, b| a.add(&blocks[b]));
        worst = worst.max((norm(&s2, &sum).map_err(|e| e.to_string())? - 1.0).abs());
    }
    ensure(worst <= 1e-12, || format!("‖Σu‖ deviates from 1 by {worst:e}"))?;
    let mut r = ChaCha8Rng::seed_from_u64(5);
    let mut slack = f64::INFINITY;
    for _ in 0..100 {
        let mut idx: Vec<usize> = (0..8).collect();
        idx.shuffle(&mut r);
        let len = r.random_range(1..=6);
        let mut y = RealVector::zero();
        let mut l1 = 0.0;
        for &i in &idx[..len] {
            let lambda = coefficient(&mut r) * 5.0;
            l1 += lambda.abs();
            y = y.add(&blocks[i].scale(lambda));
        }
        let d = dual_norm(&s2, &y, DEFAULT_TOL).map_err(|e| e.to_string())?.value;
        slack = slack.min(d - (l1 - 1e-6));
    }
    ensure(slack >= 0.0, || format!("dual below Σ|λ| − 1e-6 by {:e}", -slack))?;
    Ok(format!("block sums {worst:.1e}, min dual slack {slack:.1e}"))
}

fn kp_spread() -> Result<String, String> {
    let mut worst = 0.0f64;
    let mut r = ChaCha8Rng::seed_from_u64(6);
    let mut ns = vec![1usize, 2, 3, 10, 100, 1000, 10_000];
    ns.extend((0..20).map(|_| r.random_range(1..=10_000)));
    for n in ns {
        let v = kalton_peck(&RealVector::indicator(1..=n)).l2_norm();
        let root = (n as f64).sqrt();
        worst = worst.max(rel(v, root * root.ln()));
    }
    ensure(worst <= 1e-12, || format!("relative error {worst:e}"))?;
    Ok(format!("max relative error {worst:.1e}"))
}

fn couple_consistency() -> Result<String, String> {
    let mut r = ChaCha8Rng::seed_from_u64(7);
    let (mut sup, mut product) = (0.0f64, 0.0f64);
    for p in [4.0 / 3.0, 1.5] {
        let base = SpaceSpec::lp(p);
        let c = 2.0 / (p / (p - 1.0)) - 2.0 / p;
        for _ in 0..100 {
            let dim = r.random_range(1..=16);
            let y = unit(dense(&mut r, dim));
            let omega = couple_centralizer(&base, &y, 1e-10).map_err(|e| e.to_string())?;
            sup = sup.max(omega.sub(&kalton_peck(&y).scale(c)).linf_norm());
            let f = lozanovskii_factorize(&base, &y, 1e-10).map_err(|e| e.to_string())?;
            product = product.max((f.product - 1.0).abs());
        }
    }
    ensure(sup <= 1e-4, || format!("sup-norm deviation {sup:e}"))?;
    ensure(product <= 1e-6, || format!("product off by {product:e}"))?;
    Ok(format!("sup deviation {sup:.1e}, product − 1 ≤ {product:.1e}"))
}

/// `N(S)` for every subset `S` of the support, by exhaustive search over
/// all families of successive subsets of `S`, smaller sets first. Values
/// are integers in units of `1/(2^10·den)`.
fn naive_tsirelson(indices: &[usize], scaled: &[i64]) -> i64 {
    let m = indices.len();
    let mut value = vec![0i64; 1 << m];
    let mut order: Vec<usize> = (1..1usize << m).collect();
    order.sort_by_key(|s| s.count_ones());
    for s in order {
        let members: Vec<usize> = (0..m).filter(|b| s >> b & 1 == 1).collect();
        let leaf = members.iter().map(|&b| scaled[b].abs()).max().unwrap_or(0);
        let mut best = 0i64;
        families(&members, 0, 0, 0, 0, usize::MAX, indices, &value, &mut best);
        assert!(best % 2 == 0, "halving must stay exact");
        value[s] = leaf.max(best / 2);
    }
    value[(1 << m) - 1]
}

#[allow(clippy::too_many_arguments)]
fn families(
    members: &[usize],
    pos: usize,
    piece: usize,
    count: usize,
    acc: i64,
    first: usize,
    indices: &[usize],
    value: &[i64],
    best: &mut i64,
) {
    if pos == members.len() {
        let (count, acc) = if piece != 0 { (count + 1, acc + value[piece]) } else { (count, acc) };
        // at least two pieces, and no more pieces than the first index
        if count >= 2 && count <= first {
            *best = (*best).max(acc);
        }
        return;
    }
    let b = members[pos];
    families(members, pos + 1, piece, count, acc, first, indices, value, best);
    if piece != 0 {
        families(members, pos + 1, piece | 1 << b, count, acc, first, indices, value, best);
        families(members, pos + 1, 1 << b, count + 1, acc + value[piece], first, indices, value, best);
    } else if count == 0 {
        families(members, pos + 1, 1 << b, 0, 0, indices[b], indices, value, best);
    }
}

fn tsirelson_oracle() -> Result<String, String> {
    let mut r = ChaCha8Rng::seed_from_u64(8);
    let cases: Vec<(Vec<usize>, Vec<i64>, i64)> = (0..200)
        .map(|_| {
            let len = r.random_range(1..=10);
            let mut pool: Vec<usize> = (1..=24).collect();
            pool.shuffle(&mut r);
            let mut indices: Vec<usize> = pool.into_iter().take(len).collect();
            indices.sort_unstable();
            let nums = (0..len).map(|_| if r.random::<bool>() { 1i64 } else { -1 } * r.random_range(1..=40)).collect();
            (indices, nums, r.random_range(1..=12))
        })
        .collect();
    let mismatches: Vec<String> = cases
        .par_iter()
        .filter_map(|(indices, nums, den)| {
            let scaled: Vec<i64> = nums.iter().map(|a| a << 10).collect();
            let naive = BigRational::new(BigInt::from(naive_tsirelson(indices, &scaled)), BigInt::from(den << 10));
            let entries: Vec<(usize, BigRational)> = indices
                .iter()
                .zip(nums)
                .map(|(&j, &a)| (j, BigRational::new(BigInt::from(a), BigInt::from(*den))))
                .collect();
            let exact = tsirelson_norm_exact(&entries).ok()?;
            let x = RealVector::from_entries(indices.iter().zip(nums).map(|(&j, &a)| (j, a as f64 / *den as f64))).ok()?;
            let float = tsirelson_norm(&x).ok()?;
            let naive_f = (naive.numer().to_string().parse::<f64>().ok()?) / (naive.denom().to_string().parse::<f64>().ok()?);
            if exact != naive || (float - naive_f).abs() > 1e-14 * naive_f {
                Some(format!("{indices:?} {nums:?}/{den}: memoized {exact}, naive {naive}"))
            } else {
                None
            }
        })
        .collect();
    ensure(mismatches.is_empty(), || mismatches.join("; "))?;
    Ok("200 vectors, exact rational agreement".into())
}

fn rademacher_suite() -> Result<String, String> {
    // (space, max family size, max dimension)
    let variants: [(&str, usize, usize); 12] = [
        ("l1", 12, 12),
        ("l2", 12, 12),
        ("lp:3", 12, 12),
        ("linf", 12, 12),
        ("schreier", 12, 12),
        ("tsirelson", 12, 12),
        ("s2", 12, 12),
        ("t2", 12, 12),
        ("blocks:1x3,3x4,2x5", 12, 12),
        ("dual:lp:3", 12, 12),
        ("dual:schreier", 6, 12),
        ("ts2", 4, 6),
    ];
    let mut r = ChaCha8Rng::seed_from_u64(9);
    let mut worst = 0.0f64;
    for (name, max_n, max_dim) in variants {
        let space: SpaceSpec = name.parse().map_err(|e: twistlab::Error| e.to_string())?;
        for f in 0..50 {
            let n = r.random_range(1..=max_n);
            let dim = r.random_range(1..=max_dim);
            let family: Vec<RealVector> = (0..n).map(|_| dense(&mut r, dim)).collect();
            let exact = rademacher_average(&space, &family, Method::Exact).map_err(|e| e.to_string())?;
            let mc = rademacher_average(&space, &family, Method::MonteCarlo { samples: 100_000, seed: f })
                .map_err(|e| e.to_string())?;
            let dev = (mc.mean - exact.mean).abs();
            // rounding slack for families whose sign patterns all share one norm
            let allowed = 3.0 * mc.half_width + 1e-12 * exact.mean;
            ensure(dev <= allowed, || {
                format!("{name}, family {f}: |{} − {}| > {allowed:e}", mc.mean, exact.mean)
            })?;
            if mc.half_width > 0.0 {
                worst = worst.max(dev / mc.half_width);
            }
        }
    }
    Ok(format!("12 variants × 50 families, worst deviation {worst:.2} half-widths"))
}

fn ackermann_suite() -> Result<String, String> {
    let t = Instant::now();
    for k in 0..=20u64 {
        let i1 = g_iterated(1, k, 1 << 32).map_err(|e| e.to_string())?;
        let i2 = g_iterated(2, k, 1 << 32).map_err(|e| e.to_string())?;
        ensure(i1 == ExtNat::Finite(2 * k) && g(1, k) == i1, || format!("g_1({k})"))?;
        ensure(i2 == ExtNat::Finite(k << k) && g(2, k) == i2, || format!("g_2({k})"))?;
    }
    for i in 0..=3u32 {
        let t = g(i, 2).finite().ok_or("g_i(2) overflowed")?;
        ensure(alpha(t) == i, || format!("α(g_{i}(2)) = {}", alpha(t)))?;
    }
    let report = verify_alpha_shift(1_000_000).map_err(|e| e.to_string())?;
    ensure(report.passed(), || format!("counterexample {:?}", report.counterexample))?;
    let e = within(t, Duration::from_secs(10))?;
    Ok(format!("{} values of n checked, {e:?}", report.checked))
}

fn exact_degenerations() -> Result<String, String> {
    let mut r = ChaCha8Rng::seed_from_u64(10);
    let kp = CentralizerSpec::KaltonPeck;
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let dim = r.random_range(1..=24);
        let y = dense(&mut r, dim);
        let signs = RealVector::from_dense(&(0..dim).map(|_| if r.random::<bool>() { 1.0 } else { -1.0 }).collect::<Vec<_>>());
        worst = worst.max(centralizer_defect(&kp, &signs, &y).map_err(|e| e.to_string())?);
        let mut sigma: Vec<usize> = (1..=dim + 8).collect();
        sigma.shuffle(&mut r);
        worst = worst.max(symmetry_defect(&kp, &sigma, &y).map_err(|e| e.to_string())?);
        let x = dense(&mut r, dim);
        for omega in [kp.clone(), CentralizerSpec::scaled_n(16).unwrap(), CentralizerSpec::couple(SpaceSpec::schreier2())] {
            let q = twisted_quasinorm(&omega, &TwistedVector::new(x.clone(), RealVector::zero())).map_err(|e| e.to_string())?;
            worst = worst.max((q - x.l2_norm()).abs());
        }
    }
    ensure(worst <= 1e-12, || format!("largest defect {worst:e}"))?;
    Ok(format!("largest defect {worst:.1e}"))
}

fn determinism() -> Result<String, String> {
    let bin = env!("CARGO_BIN_EXE_twistlab");
    let run = |threads: &str| {
        Command::new(bin)
            .args(["verify", "all", "--seed", "7"])
            .env("TWISTLAB_THREADS", threads)
            .output()
            .map_err(|e| e.to_string())
    };
    let a = run("1")?;
    let b = run("1")?;
    let c = run("3")?;
    ensure(a.status.success(), || format!("exit status {:?}: {}", a.status.code(), String::from_utf8_lossy(&a.stderr)))?;
    ensure(b.status.success(), || format!("second run exit status {:?}", b.status.code()))?;
    ensure(a.stdout == b.stdout, || "reports differ between runs".into())?;
    ensure(a.stdout == c.stdout, || "reports differ between worker counts".into())?;
    serde_json::from_slice::<serde_json::Value>(&a.stdout).map_err(|e| e.to_string())?;
    Ok(format!("{} bytes, identical across runs and worker counts", a.stdout.len()))
}

fn main() {
    let checks: [(&str, Check); 12] = [
        ("scaled centralizer norm on flat blocks", eq8_identity),
        ("euclidean constant on flat blocks", claim_c_constant),
        ("Banach-Mazur distance of the J blocks", claim_a_distance),
        ("S² and (S²)* agree with ℓ2 on admissible supports", schreier_isometry),
        ("c0 blocks in S² and ℓ1 lower bound in the dual", c0_blocks),
        ("Kalton-Peck spread of flat vectors", kp_spread),
        ("couple centralizer vs scaled Kalton-Peck", couple_consistency),
        ("Tsirelson norm vs naive exhaustive recursion", tsirelson_oracle),
        ("exact Rademacher averages vs Monte Carlo", rademacher_suite),
        ("g hierarchy and inverse Ackermann", ackermann_suite),
        ("exact degenerations of centralizer defects", exact_degenerations),
        ("deterministic verify all", determinism),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (title, check)) in checks.iter().enumerate() {
        let outcome = panic::catch_unwind(check).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
        });
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {title}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {title}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", checks.len() - failed, checks.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
