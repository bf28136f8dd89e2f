#![allow(dead_code)]

use abeltrace::algebra::{GermGraph, MultiPoly};
use abeltrace::curves::{transversality_check, CurveFamily, ParamPoint};
use abeltrace::reconstruct::problem_from_polynomial;
use abeltrace::traces::{TraceProblem, Tolerances};
use abeltrace::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const ORDER: u32 = 30;
/// Slope of the base line for the circle problem.
pub const SLOPE: f64 = 0.5;

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn poly(n: usize, terms: &[(&[u32], f64)]) -> MultiPoly {
    MultiPoly::from_real_terms(n, terms).unwrap()
}

pub fn circle() -> MultiPoly {
    poly(2, &[(&[2, 0], 1.0), (&[0, 2], 1.0), (&[0, 0], -1.0)])
}

/// Lines `x1 = a10 + s·x2`, stored as `a10 = x1 − s·x2`.
pub fn line_family(a10: f64, s: f64) -> CurveFamily {
    CurveFamily::new(
        2,
        vec![vec![vec![1, 0], vec![0, 1]]],
        ParamPoint::new(vec![c(a10)], vec![vec![c(1.0), c(-s)]]),
    )
    .unwrap()
}

/// Parameter with constant `a10` and slope `s` in the line family.
pub fn line_param(a10: f64, s: f64) -> ParamPoint {
    ParamPoint::new(vec![c(a10)], vec![vec![c(1.0), c(-s)]])
}

/// Both branches of the unit circle over the line `x1 = 0.6 + 0.5·x2`.
pub fn circle_problem() -> TraceProblem {
    problem_from_polynomial(&circle(), &line_family(0.6, SLOPE), ORDER, Tolerances::default()).unwrap()
}

/// The single germ `x2 = exp(x1) − 1` truncated at order 12, radius 0.2.
pub fn exp_problem() -> TraceProblem {
    let terms: Vec<(Vec<u32>, C64)> = (1..=12u32)
        .map(|k| (vec![k], c(1.0 / (1..=k).map(f64::from).product::<f64>())))
        .collect();
    let series = MultiPoly::from_terms(1, terms).unwrap();
    let germ = GermGraph::new(vec![c(0.0), c(0.0)], 1, series, 12, 0.2).unwrap();
    TraceProblem::new(line_family(0.0, 0.0), vec![germ], Tolerances::default()).unwrap()
}

/// The single germ `{x2 = 5}`.
pub fn constant_problem() -> TraceProblem {
    let germ = GermGraph::new(vec![c(1.0), c(5.0)], 1, MultiPoly::constant(1, c(5.0)), 4, 5.0).unwrap();
    TraceProblem::new(line_family(1.0 - 0.3 * 5.0, 0.3), vec![germ], Tolerances::default()).unwrap()
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    let mag = 0.5 + rng.random::<f64>();
    if rng.random::<bool>() { mag } else { -mag }
}

/// Curves `a10 = a11 x1 + a12 x2 + a13 x1 x2` of bidegree (1,1).
pub fn p1p1_family(a10: f64, slopes: [f64; 3]) -> CurveFamily {
    CurveFamily::new(
        2,
        vec![vec![vec![1, 0], vec![0, 1], vec![1, 1]]],
        ParamPoint::new(vec![c(a10)], vec![slopes.iter().map(|&v| c(v)).collect()]),
    )
    .unwrap()
}

/// Lines `a10 = a11 x1 + a12 x2`.
pub fn p2_family(a10: f64, slopes: [f64; 2]) -> CurveFamily {
    CurveFamily::new(
        2,
        vec![vec![vec![1, 0], vec![0, 1]]],
        ParamPoint::new(vec![c(a10)], vec![slopes.iter().map(|&v| c(v)).collect()]),
    )
    .unwrap()
}

pub fn random_bidegree_11(rng: &mut ChaCha8Rng) -> MultiPoly {
    let exps: [&[u32]; 4] = [&[0, 0], &[1, 0], &[0, 1], &[1, 1]];
    let terms: Vec<(&[u32], f64)> = exps.iter().map(|e| (*e, uniform(rng))).collect();
    poly(2, &terms)
}

pub fn random_conic(rng: &mut ChaCha8Rng) -> MultiPoly {
    let exps: [&[u32]; 6] = [&[0, 0], &[1, 0], &[0, 1], &[2, 0], &[1, 1], &[0, 2]];
    let terms: Vec<(&[u32], f64)> = exps.iter().map(|e| (*e, uniform(rng))).collect();
    poly(2, &terms)
}

pub fn random_p1p1_family(rng: &mut ChaCha8Rng) -> CurveFamily {
    p1p1_family(uniform(rng), [uniform(rng), uniform(rng), uniform(rng)])
}

pub fn random_p2_family(rng: &mut ChaCha8Rng) -> CurveFamily {
    p2_family(uniform(rng), [uniform(rng), uniform(rng)])
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Largest coordinate of a base point of a conditioned random problem.
pub const MAX_POINT: f64 = 3.0;
/// Smallest germ radius of a conditioned random problem.
pub const MIN_RADIUS: f64 = 0.1;
/// Smallest `|det J|` at the base points of a conditioned random problem.
pub const MIN_TRANSVERSALITY: f64 = 0.5;

/// A random problem built by `make_f` and `make_fam`, redrawn until it is
/// well conditioned: intersection points within `MAX_POINT`, germ radii at
/// least `MIN_RADIUS` and transversality at least `MIN_TRANSVERSALITY`.
pub static REJECTED: std::sync::atomic::AtomicUsize = std::sync::atomic::AtomicUsize::new(0);

pub fn random_problem(
    rng: &mut ChaCha8Rng,
    make_f: fn(&mut ChaCha8Rng) -> MultiPoly,
    make_fam: fn(&mut ChaCha8Rng) -> CurveFamily,
) -> (MultiPoly, TraceProblem) {
    for _ in 0..200 {
        let f = make_f(rng);
        let fam = make_fam(rng);
        let Ok(p) = problem_from_polynomial(&f, &fam, ORDER, Tolerances::default()) else {
            continue;
        };
        let tame = p.germs().iter().all(|g| {
            g.radius() >= MIN_RADIUS
                && g.base_point().iter().all(|x| x.norm() <= MAX_POINT)
                && transversality_check(g, p.family(), p.base(), g.base_point()).unwrap() >= MIN_TRANSVERSALITY
        });
        REJECTED.fetch_add(usize::from(!tame), std::sync::atomic::Ordering::Relaxed);
        if tame {
            return (f, p);
        }
    }
    panic!("no well-conditioned random problem in 200 draws");
}

fn complex_coeff(rng: &mut ChaCha8Rng) -> C64 {
    C64::from_polar(0.5 + rng.random::<f64>(), std::f64::consts::TAU * rng.random::<f64>())
}

/// Random polynomial in `n ≤ 2` variables: the constant term plus a random
/// subset of the monomials of total degree `≤ max_degree`, with complex
/// coefficients. Its Newton polytope is full-dimensional.
pub fn random_sparse(rng: &mut ChaCha8Rng, n: usize, max_degree: u32) -> MultiPoly {
    use abeltrace::polytope::newton_polytope;
    loop {
        let mut terms = vec![(vec![0; n], complex_coeff(rng))];
        for e in abeltrace::algebra::monomials_up_to(n, max_degree) {
            if e.iter().any(|&v| v > 0) && rng.random::<f64>() < 0.6 {
                terms.push((e, complex_coeff(rng)));
            }
        }
        let p = MultiPoly::from_terms(n, terms).unwrap();
        if newton_polytope(&p).unwrap().is_full_dimensional() {
            return p;
        }
    }
}

/// A random system in `n ≤ 2` variables with a numerator supported strictly
/// inside the Minkowski sum of the Newton polytopes.
pub fn khovanskii_system(rng: &mut ChaCha8Rng, n: usize) -> (MultiPoly, Vec<MultiPoly>) {
    use abeltrace::polytope::{minkowski_sum, newton_polytope};
    loop {
        let fs: Vec<MultiPoly> = (0..n)
            .map(|_| {
                let d = rng.random_range(1..=3);
                random_sparse(rng, n, d)
            })
            .collect();
        let mut sum = newton_polytope(&fs[0]).unwrap();
        for f in &fs[1..] {
            sum = minkowski_sum(&sum, &newton_polytope(f).unwrap()).unwrap();
        }
        let inner = sum.lattice_points(true).unwrap();
        if inner.is_empty() {
            continue;
        }
        let mut terms: Vec<(Vec<u32>, C64)> = Vec::new();
        for p in &inner {
            if rng.random::<f64>() < 0.7 {
                terms.push((p.iter().map(|&v| v as u32).collect(), complex_coeff(rng)));
            }
        }
        let h = MultiPoly::from_terms(n, terms).unwrap();
        if !h.is_zero() {
            return (h, fs);
        }
    }
}
