use std::f64::consts::{E, LN_2};

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{Cell, Job, Params, EXACT_TOL, OPTIMIZER_TOL, SCENARIOS};
use crate::ackermann::{alpha, g, g_exact, g_iterated, growth_bound, verify_alpha_shift, ExtNat};
use crate::centralizer::{
    centralizer_defect, couple_centralizer, euclidean_constant, kalton_peck, lozanovskii_factorize,
    scaled_centralizer, symmetry_defect, twisted_quasinorm, CentralizerSpec, Sampler, TwistedVector,
};
use crate::error::{Error, Result};
use crate::estimates::{
    bm_distance_lp, cotype2_ratio, kwapien_bound, norming_dim, rademacher_average, twisted_distance_bound,
    twisted_distance_chain, twisted_type_bound, type2_search, ExtReal, Method,
};
use crate::spaces::{
    conjugate_exponent, convexify2_norm, dual_norm, enumerate_admissible, is_admissible, jspace_exponents,
    jspace_params, l2sum_blocks_norm, norm, sym_tsirelson2_norm, tsirelson_norm, SpaceSpec, SymMode, DEFAULT_TOL,
};
use crate::vector::RealVector;

pub(super) fn jobs(name: &str, p: &Params) -> Result<Vec<Job>> {
    match name {
        "claimC" => Ok(claim_c(p)),
        "claimA" => Ok(claim_a(p)),
        "schreier_isometry" => Ok(schreier_isometry(p)),
        "c0_blocks" => Ok(c0_blocks(p)),
        "kp_spread" => Ok(kp_spread(p)),
        "centralizer_axioms" => Ok(centralizer_axioms(p)),
        "couple_consistency" => Ok(couple_consistency(p)),
        "ackermann" => Ok(ackermann(p)),
        "growth_pipeline" => Ok(growth_pipeline(p)),
        other => Err(Error::InvalidArgument(format!(
            "unknown scenario '{other}'; registered: {}",
            SCENARIOS.join(", ")
        ))),
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform on `[-1, 1]` without zero.
fn coefficient(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let v: f64 = rng.random_range(-1.0..=1.0);
        if v != 0.0 {
            return v;
        }
    }
}

/// Random admissible support inside `1..=dim`, at most `max_len` long.
fn admissible_support(rng: &mut ChaCha8Rng, dim: usize, max_len: usize) -> Vec<usize> {
    let start = rng.random_range(1..=dim);
    let room = start.min(dim - start + 1).min(max_len);
    let len = rng.random_range(1..=room);
    let mut rest: Vec<usize> = (start + 1..=dim).collect();
    rest.shuffle(rng);
    let mut support: Vec<usize> = std::iter::once(start).chain(rest.into_iter().take(len - 1)).collect();
    support.sort_unstable();
    support
}

fn random_on(rng: &mut ChaCha8Rng, support: &[usize]) -> RealVector {
    RealVector::from_sorted_unchecked(support.iter().map(|&j| (j, coefficient(rng))).collect())
}

fn dense_random(rng: &mut ChaCha8Rng, dim: usize) -> RealVector {
    let values: Vec<f64> = (0..dim).map(|_| coefficient(rng)).collect();
    RealVector::from_dense(&values)
}

fn unit(v: RealVector) -> RealVector {
    let n = v.l2_norm();
    v.scale(1.0 / n)
}

fn small_n(n: u64, max: u64) -> Result<u32> {
    if n > max {
        return Err(Error::LimitExceeded { what: "n", size: n as usize, limit: max as usize });
    }
    Ok(n as u32)
}

fn claim_c(p: &Params) -> Vec<Job> {
    p.n_or(&[4, 9, 16])
        .into_iter()
        .map(|n| {
            Job::new(format!("n={n}"), format!("n={n}"), move |seed| {
                let n32 = small_n(n, 20)?;
                let size = 1usize << n;
                let inputs = format!("n={n}, |B|=2^{n}");
                let y = RealVector::indicator(1..=size);
                let omega_norm = scaled_centralizer(n32, &y)?.l2_norm();
                let root = (n as f64).sqrt();
                let expected = 2.0 * root * (size as f64).sqrt() * LN_2;
                let j: Vec<usize> = (1..=size).collect();
                let k = euclidean_constant(&CentralizerSpec::scaled_n(n32)?, &j, Sampler { gaussian: 16, seed })?;
                let bound = 1.0 + 2.0 * root * LN_2;
                Ok(vec![
                    Cell::eq("omega_norm", inputs.clone(), omega_norm, expected, EXACT_TOL),
                    Cell::le("omega_vs_K", inputs.clone(), omega_norm, (k.k - 1.0) * (size as f64).sqrt(), EXACT_TOL),
                    Cell::eq("K", format!("{inputs}, samples={}", k.samples), k.k, bound, EXACT_TOL),
                    Cell::ge("K_lower_bound", inputs.clone(), k.k - 1.0, 2.0 * root * LN_2, EXACT_TOL),
                    Cell::check("K_exact", inputs, k.exact),
                ])
            })
        })
        .collect()
}

/// Coordinates kept per block in the truncated tail sum.
const TAIL_BLOCK_CAP: usize = 16;
/// Family size used for the type-2 search.
const TAIL_FAMILY: usize = 12;

fn claim_a(p: &Params) -> Vec<Job> {
    let mut jobs = Vec::new();
    for n in p.n_or(&[4, 9, 16, 25]) {
        jobs.push(Job::new(format!("distance n={n}"), format!("n={n}"), move |_| {
            let n32 = small_n(n, 62)?;
            let j = jspace_params(n32)?;
            let inputs = format!("n={n}, p={}, k={}", j.p, j.k);
            let root = (n as f64).sqrt();
            let d = bm_distance_lp(j.p, j.k);
            let (p_tail, _) = jspace_exponents(n * n)?;
            let chain = (j.k as f64).powf(1.0 / p_tail - 0.5);
            Ok(vec![
                Cell::eq("bm_distance", inputs.clone(), d, root.exp2() * (1.0 / root).exp2(), 1e-12),
                Cell::eq("bm_distance_dual", inputs.clone(), bm_distance_lp(j.p_star, j.k), d, 1e-12),
                Cell::eq("tail_exponent_bound", format!("n={n}, m=n^2"), chain, 2.0 * (1.0 / n as f64).exp2(), 1e-12),
                Cell::le("tail_exponent_le_4", format!("n={n}, m=n^2"), chain, 4.0, 0.0),
            ])
        }));
        jobs.push(Job::new(format!("type2 n={n}"), format!("n={n}"), move |seed| {
            let m0 = n * n;
            let blocks: Vec<(f64, usize)> = (m0..m0 + 2)
                .map(|m| Ok((jspace_exponents(m)?.0, TAIL_BLOCK_CAP)))
                .collect::<Result<_>>()?;
            let space = SpaceSpec::L2SumBlocks(blocks.clone());
            let inputs = format!("blocks m={m0},{} truncated to k={TAIL_BLOCK_CAP}, family={TAIL_FAMILY}", m0 + 1);
            let found = type2_search(&space, TAIL_FAMILY, 8, seed)?;
            let basis: Vec<RealVector> = (1..=TAIL_FAMILY).map(RealVector::basis).collect();
            let exact = rademacher_average(&space, &basis, Method::Exact)?;
            let mut r = rng(seed);
            let family: Vec<RealVector> = (0..8).map(|_| dense_random(&mut r, 2 * TAIL_BLOCK_CAP)).collect();
            let family_exact = rademacher_average(&space, &family, Method::Exact)?;
            let mc = rademacher_average(&space, &family, Method::MonteCarlo { samples: 20_000, seed })?;
            let p_first = blocks[0].0;
            let cotype = cotype2_ratio(&space, &basis, Method::Exact)?;
            let direct = l2sum_blocks_norm(&blocks, &basis.iter().fold(RealVector::zero(), |a, b| a.add(b)))?;
            Ok(vec![
                Cell::le("type2_le_4", inputs.clone(), found, 4.0, 0.0),
                Cell::eq("basis_average", inputs.clone(), exact.mean, (TAIL_FAMILY as f64).powf(1.0 / p_first), EXACT_TOL),
                Cell::le(
                    "montecarlo_vs_exact",
                    format!("{inputs}, 8 random vectors, samples=20000, half_width={}", mc.half_width),
                    (mc.mean - family_exact.mean).abs(),
                    3.0 * mc.half_width,
                    1e-12,
                ),
                Cell::eq(
                    "cotype_basis",
                    inputs.clone(),
                    cotype,
                    (TAIL_FAMILY as f64).powf(0.5 - 1.0 / p_first),
                    EXACT_TOL,
                ),
                Cell::eq("blocks_norm_all_ones", inputs, direct, exact.mean, EXACT_TOL),
            ])
        }));
    }
    jobs
}

fn schreier_isometry(p: &Params) -> Vec<Job> {
    let count = p.limit_or(200) as usize;
    let s2 = SpaceSpec::schreier2();
    let mut jobs = Vec::new();
    {
        let s2 = s2.clone();
        jobs.push(Job::new("s2_vs_l2", format!("samples={count}, dim≤30"), move |seed| {
            let mut r = rng(seed);
            let mut primal_dev = 0.0f64;
            let mut ys = Vec::with_capacity(count);
            for _ in 0..count {
                let support = admissible_support(&mut r, 30, 30);
                let y = random_on(&mut r, &support);
                let l2 = y.l2_norm();
                primal_dev = primal_dev.max((norm(&s2, &y)? - l2).abs() / l2);
                ys.push(y);
            }
            let duals: Vec<(f64, f64)> = ys
                .par_iter()
                .map(|y| {
                    let d = dual_norm(&SpaceSpec::schreier2(), y, DEFAULT_TOL)?;
                    Ok(((d.value - y.l2_norm()).abs() / y.l2_norm(), d.relative_gap()))
                })
                .collect::<Result<_>>()?;
            let dual_dev = duals.iter().map(|d| d.0).fold(0.0, f64::max);
            let gap = duals.iter().map(|d| d.1).fold(0.0, f64::max);
            let inputs = format!("samples={count}, dim≤30, admissible supports");
            Ok(vec![
                Cell::le("s2_equals_l2", inputs.clone(), primal_dev, 0.0, 1e-12),
                Cell::le("dual_equals_l2", inputs.clone(), dual_dev, 0.0, DEFAULT_TOL),
                Cell::le("dual_gap", inputs, gap, 0.0, DEFAULT_TOL),
            ])
        }));
    }
    jobs.push(Job::new("half_set", format!("samples={count}"), move |seed| {
        let mut r = rng(seed);
        let mut ok = true;
        let mut worst = f64::INFINITY;
        for _ in 0..count {
            let len = r.random_range(1..=20);
            let mut pool: Vec<usize> = (1..=60).collect();
            pool.shuffle(&mut r);
            let mut b: Vec<usize> = pool.into_iter().take(len).collect();
            b.sort_unstable();
            // the upper half of B: its least element sits at rank ⌊|B|/2⌋+1
            let a = &b[len / 2..];
            ok &= is_admissible(a);
            worst = worst.min(a.len() as f64 / len as f64);
        }
        Ok(vec![
            Cell::check("half_set_admissible", format!("samples={count}, B⊂1..60"), ok),
            Cell::ge("half_set_ratio", format!("samples={count}, B⊂1..60"), worst, 0.5, 0.0),
        ])
    }));
    let couple_count = count.min(40);
    jobs.push(Job::new("quasinorm_additivity", format!("samples={couple_count}"), move |seed| {
        let mut r = rng(seed);
        let omega = CentralizerSpec::couple(SpaceSpec::schreier2());
        let mut dev = 0.0f64;
        for _ in 0..couple_count {
            let support = admissible_support(&mut r, 16, 16);
            let y = random_on(&mut r, &support);
            let x = dense_random(&mut r, 16);
            let q = twisted_quasinorm(&omega, &TwistedVector::new(x.clone(), y.clone()))?;
            let target = x.l2_norm() + y.l2_norm();
            dev = dev.max((q - target).abs() / target);
        }
        Ok(vec![Cell::le(
            "quasinorm_additive",
            format!("samples={couple_count}, couple:conv2:schreier, admissible y"),
            dev,
            0.0,
            OPTIMIZER_TOL,
        )])
    }));
    jobs.push(Job::new("enumeration", "n=12", |_| {
        let sets = enumerate_admissible(12)?;
        let all_admissible = sets.iter().all(|s| is_admissible(s.indices()));
        let brute = (1u32..1 << 12)
            .filter(|mask| {
                let set: Vec<usize> = (0..12).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).collect();
                is_admissible(&set)
            })
            .count();
        Ok(vec![
            Cell::check("enumerated_sets_admissible", "n=12", all_admissible),
            Cell::eq("enumeration_count", "n=12", sets.len() as f64, brute as f64, 0.0),
        ])
    }));
    jobs.push(Job::new("sandwiches", format!("samples={}", count.min(100)), move |seed| {
        let samples = count.min(100);
        let mut r = rng(seed);
        let (mut t_low, mut t_high, mut t2, mut ts2) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for _ in 0..samples {
            let dim = r.random_range(1..=10);
            let x = dense_random(&mut r, dim);
            let t = tsirelson_norm(&x)?;
            t_low = t_low.max(x.linf_norm() / t);
            t_high = t_high.max(t / x.l1_norm());
            t2 = t2.max(convexify2_norm(&SpaceSpec::Tsirelson, &x)? / x.l2_norm());
            let short = x.restrict(|j| j <= 8);
            if !short.is_zero() {
                ts2 = ts2.max(sym_tsirelson2_norm(&short, SymMode::Exact)?.value / short.l2_norm());
            }
        }
        let inputs = format!("samples={samples}, dim≤10");
        Ok(vec![
            Cell::le("linf_le_tsirelson", inputs.clone(), t_low, 1.0, 1e-12),
            Cell::le("tsirelson_le_l1", inputs.clone(), t_high, 1.0, 1e-12),
            Cell::le("t2_le_l2", inputs.clone(), t2, 1.0, 1e-12),
            Cell::le("sym_t2_le_l2", inputs, ts2, 1.0, 1e-12),
        ])
    }));
    jobs
}

/// `u_n = 2^{(1−n)/2} Σ_{2^{n−1} ≤ j < 2^n} e_j`.
fn u_block(n: u32) -> RealVector {
    let c = (0.5 * (1.0 - f64::from(n))).exp2();
    RealVector::indicator((1usize << (n - 1))..(1usize << n)).scale(c)
}

fn c0_blocks(p: &Params) -> Vec<Job> {
    let count = p.limit_or(100) as usize;
    vec![
        Job::new("c0_copy", "N≤6, indices≤8", |_| {
            let blocks: Vec<RealVector> = (1..=8).map(u_block).collect();
            let s2 = SpaceSpec::schreier2();
            let mut dev = 0.0f64;
            let mut checked = 0;
            for mask in 1u32..(1 << 8) {
                if mask.count_ones() > 6 {
                    continue;
                }
                let sum = (0..8)
                    .filter(|b| mask >> b & 1 == 1)
                    .fold(RealVector::zero(), |acc, b| acc.add(&blocks[b as usize]));
                dev = dev.max((norm(&s2, &sum)? - 1.0).abs());
                checked += 1;
            }
            Ok(vec![Cell::le("sum_of_blocks_unit", format!("subsets={checked}, N≤6, indices≤8"), dev, 0.0, 1e-12)])
        }),
        Job::new("l1_dual", format!("samples={count}"), move |seed| {
            let mut r = rng(seed);
            let s2 = SpaceSpec::schreier2();
            let mut slack = f64::INFINITY;
            let mut unit_dev = 0.0f64;
            for n in 1..=8 {
                unit_dev = unit_dev.max((dual_norm(&s2, &u_block(n), DEFAULT_TOL)?.value - 1.0).abs());
            }
            for _ in 0..count {
                let mut idx: Vec<u32> = (1..=8).collect();
                idx.shuffle(&mut r);
                let len = r.random_range(1..=6);
                let mut y = RealVector::zero();
                let mut l1 = 0.0;
                for &n in &idx[..len] {
                    let lambda = coefficient(&mut r);
                    l1 += lambda.abs();
                    y = y.add(&u_block(n).scale(lambda));
                }
                slack = slack.min(dual_norm(&s2, &y, DEFAULT_TOL)?.value - l1);
            }
            Ok(vec![
                Cell::le("block_dual_unit", "n=1..8", unit_dev, 0.0, DEFAULT_TOL),
                Cell::ge("dual_ge_l1", format!("samples={count}, N≤6, indices≤8"), slack, 0.0, DEFAULT_TOL),
            ])
        }),
    ]
}

fn kp_spread(p: &Params) -> Vec<Job> {
    p.n_or(&[100, 10_000])
        .into_iter()
        .map(|n| {
            Job::new(format!("n={n}"), format!("n={n}"), move |_| {
                if n == 0 || n > 10_000_000 {
                    return Err(Error::LimitExceeded { what: "n", size: n as usize, limit: 10_000_000 });
                }
                let y = RealVector::indicator(1..=n as usize);
                let root = (n as f64).sqrt();
                let expected = root * root.ln();
                let q = twisted_quasinorm(&CentralizerSpec::KaltonPeck, &TwistedVector::new(RealVector::zero(), y.clone()))?;
                Ok(vec![
                    Cell::eq("kp_norm", format!("n={n}"), kalton_peck(&y).l2_norm(), expected, 1e-12),
                    Cell::eq("quasinorm", format!("n={n}"), q, expected + root, 1e-12),
                ])
            })
        })
        .collect()
}

fn random_permutation(r: &mut ChaCha8Rng, len: usize) -> Vec<usize> {
    let mut sigma: Vec<usize> = (1..=len).collect();
    sigma.shuffle(r);
    sigma
}

fn centralizer_axioms(p: &Params) -> Vec<Job> {
    let count = p.limit_or(200) as usize;
    let kp = CentralizerSpec::KaltonPeck;
    let scaled = CentralizerSpec::scaled_n(9).expect("n = 9 is valid");
    vec![
        Job::new("exact_degenerations", format!("samples={count}"), {
            let (kp, scaled) = (kp.clone(), scaled.clone());
            move |seed| {
                let mut r = rng(seed);
                let (mut unimodular, mut constant, mut symmetric, mut fiber) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
                for _ in 0..count {
                    let dim = r.random_range(1..=20);
                    let y = dense_random(&mut r, dim);
                    let signs: Vec<f64> = (0..dim).map(|_| if r.random::<bool>() { 1.0 } else { -1.0 }).collect();
                    let signs = RealVector::from_dense(&signs);
                    let lambda = coefficient(&mut r) * 3.0;
                    let flat = RealVector::from_dense(&vec![lambda; dim]);
                    for omega in [&kp, &scaled] {
                        unimodular = unimodular.max(centralizer_defect(omega, &signs, &y)?);
                        constant = constant.max(centralizer_defect(omega, &flat, &y)?);
                    }
                    let sigma = random_permutation(&mut r, dim + 5);
                    symmetric = symmetric.max(symmetry_defect(&kp, &sigma, &y)?);
                    let q = twisted_quasinorm(&kp, &TwistedVector::new(y.clone(), RealVector::zero()))?;
                    fiber = fiber.max((q - y.l2_norm()).abs());
                }
                let inputs = format!("samples={count}, dim≤20, kp and scaled:9");
                Ok(vec![
                    Cell::le("unimodular_defect", inputs.clone(), unimodular, 0.0, 1e-12),
                    Cell::le("constant_multiplier_defect", inputs.clone(), constant, 0.0, 1e-12),
                    Cell::le("kp_symmetry_defect", inputs.clone(), symmetric, 0.0, 1e-12),
                    Cell::le("fiber_isometry", inputs, fiber, 0.0, 1e-12),
                ])
            }
        }),
        Job::new("defect_bounds", format!("samples={count}"), {
            let kp = kp.clone();
            move |seed| {
                let mut r = rng(seed);
                let mut sup = 0.0f64;
                let mut delta = 0.0f64;
                for _ in 0..count {
                    let dim = r.random_range(1..=20);
                    let y = dense_random(&mut r, dim);
                    let a = dense_random(&mut r, dim);
                    sup = sup.max(centralizer_defect(&kp, &a, &y)?);
                    let v = TwistedVector::new(dense_random(&mut r, dim), dense_random(&mut r, dim));
                    let w = TwistedVector::new(dense_random(&mut r, dim), dense_random(&mut r, dim));
                    let qv = twisted_quasinorm(&kp, &v)?;
                    let qw = twisted_quasinorm(&kp, &w)?;
                    delta = delta.max(twisted_quasinorm(&kp, &v.add(&w))? / (qv + qw));
                }
                let half = std::f64::consts::FRAC_1_SQRT_2;
                let example = centralizer_defect(&kp, &RealVector::basis(1), &RealVector::from_dense(&[half, half]))?;
                let basis_q = (1..=6)
                    .map(|i| twisted_quasinorm(&kp, &TwistedVector::basis(i)?))
                    .collect::<Result<Vec<f64>>>()?;
                Ok(vec![
                    Cell::le("kp_defect_sup", format!("samples={count}, dim≤20, bound 2/e"), sup, 2.0 / E, 0.0),
                    Cell::le("kp_quasi_triangle", format!("samples={count}, dim≤20"), delta, 4.0, 0.0),
                    Cell::eq("defect_example", "a=e1, y=(1,1)/√2", example, half * 2f64.sqrt().ln(), 1e-12),
                    Cell::check("twisted_basis_unit", "v_1..v_6", basis_q.iter().all(|&q| q == 1.0)),
                ])
            }
        }),
        Job::new("couple_symmetry", "swap(1,m), couple:conv2:schreier", |seed| {
            let mut r = rng(seed);
            let omega = CentralizerSpec::couple(SpaceSpec::schreier2());
            let mut worst = 0.0f64;
            let samples = 12;
            for _ in 0..samples {
                let m = r.random_range(6..=12);
                let len = r.random_range(2..=m.min(5));
                let mut rest: Vec<usize> = (m + 1..=16).collect();
                rest.shuffle(&mut r);
                let mut support: Vec<usize> = std::iter::once(m).chain(rest.into_iter().take(len - 1)).collect();
                support.sort_unstable();
                let y = random_on(&mut r, &support);
                let mut sigma: Vec<usize> = (1..=16).collect();
                sigma.swap(0, m - 1);
                worst = worst.max(symmetry_defect(&omega, &sigma, &y)?);
            }
            let identity: Vec<usize> = (1..=16).collect();
            let y = dense_random(&mut r, 10);
            let id = symmetry_defect(&omega, &identity, &y)?;
            Ok(vec![
                Cell::ge("couple_swap_defect", format!("samples={samples}, recorded"), worst, 0.0, 0.0),
                Cell::le("identity_defect", "identity permutation", id, 0.0, 1e-12),
            ])
        }),
    ]
}

fn couple_consistency(p: &Params) -> Vec<Job> {
    let count = p.limit_or(100) as usize;
    let mut jobs: Vec<Job> = [4.0 / 3.0, 1.5]
        .into_iter()
        .map(|exp: f64| {
            Job::new(format!("lp p={exp}"), format!("p={exp}"), move |seed| {
                let mut r = rng(seed);
                let base = SpaceSpec::lp(exp);
                let coefficient = 2.0 / conjugate_exponent(exp) - 2.0 / exp;
                let (mut sup, mut product) = (0.0f64, 0.0f64);
                for _ in 0..count {
                    let dim = r.random_range(1..=16);
                    let y = unit(dense_random(&mut r, dim));
                    let omega = couple_centralizer(&base, &y, 1e-10)?;
                    let target = kalton_peck(&y).scale(coefficient);
                    sup = sup.max(omega.sub(&target).linf_norm());
                    product = product.max(lozanovskii_factorize(&base, &y, 1e-10)?.product - 1.0);
                }
                let inputs = format!("p={exp}, samples={count}, dim≤16");
                Ok(vec![
                    Cell::le("matches_scaled_kp", inputs.clone(), sup, 0.0, OPTIMIZER_TOL),
                    Cell::le("lozanovskii_product", inputs, product, 0.0, 1e-6),
                ])
            })
        })
        .collect();
    jobs.push(Job::new("endpoints", "ℓ1, ℓ2 and conv2:schreier", move |seed| {
        let mut r = rng(seed);
        let samples = count.min(20);
        let (mut l1, mut l2, mut adm) = (0.0f64, 0.0f64, 0.0f64);
        for _ in 0..samples {
            let dim = r.random_range(1..=12);
            let y = unit(dense_random(&mut r, dim));
            let target = kalton_peck(&y).scale(-2.0);
            l1 = l1.max(couple_centralizer(&SpaceSpec::lp(1.0), &y, 1e-10)?.sub(&target).linf_norm());
            l2 = l2.max(couple_centralizer(&SpaceSpec::Ell2, &y, 1e-10)?.linf_norm());
            let support = admissible_support(&mut r, 16, 16);
            let z = unit(random_on(&mut r, &support));
            adm = adm.max(couple_centralizer(&SpaceSpec::schreier2(), &z, 1e-8)?.linf_norm());
        }
        let inputs = format!("samples={samples}");
        Ok(vec![
            Cell::le("l1_is_minus_two_kp", inputs.clone(), l1, 0.0, 1e-9),
            Cell::le("l2_vanishes", inputs.clone(), l2, 0.0, 1e-12),
            Cell::le("admissible_vanishes", inputs, adm, 0.0, OPTIMIZER_TOL),
        ])
    }));
    jobs
}

fn ackermann(p: &Params) -> Vec<Job> {
    let limit = p.limit_or(1_000_000);
    vec![
        Job::new("table", "g_i(2), closed forms", |_| {
            let mut cells = vec![
                Cell::eq("g(1,5)", "n=1, k=5", g(1, 5).finite().map_or(f64::NAN, |v| v as f64), 10.0, 0.0),
                Cell::eq("g(2,3)", "n=2, k=3", g(2, 3).finite().map_or(f64::NAN, |v| v as f64), 24.0, 0.0),
                Cell::eq("g(3,2)", "n=3, k=2", g(3, 2).finite().map_or(f64::NAN, |v| v as f64), 2048.0, 0.0),
                Cell::check("g(4,2)_huge", "n=4, k=2", g(4, 2).is_huge()),
                Cell::check(
                    "g(3,2)_exact",
                    "n=3, k=2, 64 bits",
                    g_exact(3, &BigUint::from(2u32), 64) == Some(BigUint::from(2048u32)),
                ),
            ];
            let mut closed = true;
            for k in 0..=20u64 {
                closed &= g_iterated(1, k, 1 << 30)? == ExtNat::Finite(2 * k);
                closed &= g_iterated(2, k, 1 << 30)? == ExtNat::Finite(k << k);
            }
            cells.push(Cell::check("closed_forms_match_iteration", "n=1,2, k≤20", closed));
            let mut increasing = true;
            for n in 0..=3 {
                let mut prev = g(n, 1);
                for k in 2..=20 {
                    let cur = g(n, k);
                    if cur.is_huge() {
                        break;
                    }
                    increasing &= cur > prev;
                    prev = cur;
                }
            }
            cells.push(Cell::check("strictly_increasing", "n≤3, k≤20", increasing));
            for i in 0..=3u32 {
                let t = g(i, 2).finite().expect("finite below g_4(2)");
                cells.push(Cell::eq(format!("alpha(g_{i}(2))"), format!("n={t}"), f64::from(alpha(t)), f64::from(i), 0.0));
            }
            cells.push(Cell::eq("alpha(100)", "n=100", f64::from(alpha(100)), 2.0, 0.0));
            cells.push(Cell::eq("alpha(u64::MAX)", "n=2^64-1", f64::from(alpha(u64::MAX)), 3.0, 0.0));
            Ok(cells)
        }),
        Job::new("alpha_shift", format!("limit={limit}"), move |_| {
            let report = verify_alpha_shift(limit)?;
            let inputs = match report.counterexample {
                Some((n, lhs, rhs)) => format!("limit={limit}, counterexample n={n}: {lhs} > {rhs}+2"),
                None => format!("limit={limit}, checked={}", report.checked),
            };
            Ok(vec![Cell::check("alpha_shift", inputs, report.passed())])
        }),
    ]
}

fn ext_real(v: ExtReal) -> f64 {
    v.finite().unwrap_or(f64::INFINITY)
}

fn growth_pipeline(p: &Params) -> Vec<Job> {
    let (eta, lambda) = (p.eta, p.lambda);
    let ns = p.n_or(&[4, 9, 16]);
    let mut jobs = vec![Job::new("formulas", format!("eta={eta}, lambda={lambda}"), move |_| {
        let tag = format!("eta={eta}, lambda={lambda}");
        let sqrt2 = 2f64.sqrt();
        Ok(vec![
            Cell::eq("twisted_bound(1)", format!("d=1, {tag}"), ext_real(twisted_distance_bound(1.0, eta)?), 100.0 * eta, EXACT_TOL),
            Cell::eq("twisted_bound(2)", format!("d=2, {tag}"), ext_real(twisted_distance_bound(2.0, eta)?), 2500.0 * eta, EXACT_TOL),
            Cell::eq("type_chain", format!("A=1.5, rho=2, {tag}"), twisted_type_bound(1.5, 2.0), 12.0, EXACT_TOL),
            Cell::eq("norming_dim(1)", "dim E=1", norming_dim(1).finite().map_or(f64::NAN, |v| v as f64), 5.0, 0.0),
            Cell::eq("norming_dim(3)", "dim E=3", norming_dim(3).finite().map_or(f64::NAN, |v| v as f64), 125.0, 0.0),
            Cell::check("norming_dim(30)_huge", "dim E=30", norming_dim(30).is_huge()),
            Cell::eq("kwapien(1,1)", "a2=1, c2=1", kwapien_bound(1.0, 1.0)?.upper, 1.0, 0.0),
            Cell::eq("kwapien(√2,√2)", "a2=√2, c2=√2", kwapien_bound(sqrt2, sqrt2)?.upper, 2.0, 1e-15),
            Cell::eq("growth_bound(7,1)", "n=7, c=1", growth_bound(7, 1.0), 2.0, 0.0),
            Cell::eq("growth_bound(2,5)", "n=2, c=5", growth_bound(2, 5.0), 1.0, 0.0),
            Cell::eq("growth_bound(2048,2)", "n=2048, c=2", growth_bound(2048, 2.0), 64.0, 0.0),
        ])
    })];
    for n in ns {
        jobs.push(Job::new(format!("chain n={n}"), format!("n={n}"), move |_| {
            let j = jspace_params(small_n(n, 62)?)?;
            let d = bm_distance_lp(j.p, j.k);
            let d_star = bm_distance_lp(j.p_star, j.k);
            let tag = format!("X=ℓ_{}^{}, eta={eta}, lambda={lambda}", j.p, j.k);
            let chain = ext_real(twisted_distance_chain(d, d_star, eta));
            let bound = ext_real(twisted_distance_bound(d, eta)?);
            Ok(vec![
                Cell::eq("chain_value", tag.clone(), chain, eta * d * d, EXACT_TOL),
                Cell::le("chain_below_formula", tag, chain, bound, 0.0),
            ])
        }));
    }
    jobs
}
