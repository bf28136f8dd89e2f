//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

mod common;

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use abeltrace::algebra::{newton_to_elementary, monic_from_elementary, power_sums, LinearForm, MultiPoly};
use abeltrace::curves::ParamPoint;
use abeltrace::polytope::{minkowski_sum, mixed_volume, newton_polytope, LatticePolytope};
use abeltrace::reconstruct::{interpolate, interpolate_with, problem_from_polynomial, ReconstructError};
use abeltrace::residues::{khovanskii_predict, residue_scale, residue_sum, solve_square, trace_derivative_check, SquareSystem};
use abeltrace::traces::*;
use abeltrace::C64;
use common::*;
use rand::Rng;

type Outcome = Result<String, String>;

fn check(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond { Ok(()) } else { Err(what()) }
}

fn within(elapsed: Duration, limit: f64) -> Result<(), String> {
    check(elapsed.as_secs_f64() < limit, || format!("took {:.2}s, limit {limit}s", elapsed.as_secs_f64()))
}

/// Problems of the randomized reconstruction check: ten bidegree-(1,1)
/// curves on the P¹×P¹ family, then ten conics on the P² line family.
fn random_problems() -> Vec<(MultiPoly, TraceProblem)> {
    let mut r = rng(2024);
    let mut out: Vec<_> = (0..10).map(|_| random_problem(&mut r, random_bidegree_11, random_p1p1_family)).collect();
    out.extend((0..10).map(|_| random_problem(&mut r, random_conic, random_p2_family)));
    out
}

fn circle_recovery() -> Outcome {
    let start = Instant::now();
    let prob = circle_problem();
    let rep = coordinate_affineness(&prob).map_err(|e| e.to_string())?;
    check(rep.positive(), || format!("trace test negative, residual {:.2e}", rep.max_residual()))?;
    let (x1, x2) = (MultiPoly::var(2, 0), MultiPoly::var(2, 1));
    let mut worst = 0.0f64;
    for s in [SLOPE - 0.05, SLOPE, SLOPE + 0.05] {
        for t in [-1.0, -0.5, 0.0, 0.5, 1.0] {
            let a10 = 0.6 + 0.05 * t;
            let a = line_param(a10, s);
            let v = prob.evaluate(&[x1.clone(), x2.clone()], &a, Flavor::Trace).map_err(|e| e.to_string())?;
            let k = 1.0 + s * s;
            worst = worst.max((v[0] - c(2.0 * a10 / k)).norm());
            worst = worst.max((v[1] - c(-2.0 * a10 * s / k)).norm());
        }
    }
    check(worst < 1e-8, || format!("trace error {worst:.2e} against closed forms"))?;
    let res = interpolate(&prob, 7).map_err(|e| e.to_string())?;
    let dist = res.q.projective_distance(&circle());
    check(dist < 1e-6, || format!("interpolant off by {dist:.2e}"))?;
    within(start.elapsed(), 5.0)?;
    Ok(format!(
        "fit residual {:.1e}, closed-form error {worst:.1e}, coefficient error {dist:.1e}, {:.2}s",
        rep.max_residual(),
        start.elapsed().as_secs_f64()
    ))
}

fn exponential_negative() -> Outcome {
    let prob = exp_problem();
    let rep = coordinate_affineness(&prob).map_err(|e| e.to_string())?;
    let tol = prob.tolerances().fit;
    check(!rep.positive(), || "trace test positive".into())?;
    check(rep.max_residual() > 100.0 * tol, || format!("residual {:.2e} not above 100×tol", rep.max_residual()))?;
    match interpolate(&prob, 7) {
        Err(e @ ReconstructError::FitResidualExceeded { .. }) if e.stage() == "characteristic_poly" => {}
        other => return Err(format!("interpolate gave {:?}", other.map(|r| r.q))),
    }
    let cli = Command::new(env!("CARGO_BIN_EXE_abeltrace"))
        .args(["trace-test", data("exponential.json").as_str()])
        .output()
        .map_err(|e| e.to_string())?;
    check(cli.status.code() == Some(2), || format!("trace-test exit {:?}", cli.status.code()))?;
    Ok(format!("residual {:.2e} = {:.0}×tol, FitResidualExceeded at characteristic_poly", rep.max_residual(), rep.max_residual() / tol))
}

fn random_reconstruction(problems: &[(MultiPoly, TraceProblem)], build: Duration) -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for (idx, (f, prob)) in problems.iter().enumerate() {
        let res = interpolate(prob, 100 + idx as u64).map_err(|e| format!("trial {idx}: {e}"))?;
        let d = res.q.projective_distance(f);
        check(d < 1e-6, || format!("trial {idx}: coefficient error {d:.2e}"))?;
        worst = worst.max(d);
    }
    let total = start.elapsed() + build;
    within(total, 60.0)?;
    Ok(format!(
        "20/20 recovered, worst coefficient error {worst:.1e}, {:.2}s",
        total.as_secs_f64()
    ))
}

/// Residual below which the decay ratio is roundoff and carries no meaning.
const PDE_NOISE_FLOOR: f64 = 1e-9;

fn pde_identity(problems: &[(MultiPoly, TraceProblem)]) -> Outcome {
    let circle = circle_problem();
    let mut all: Vec<&TraceProblem> = vec![&circle];
    all.extend(problems.iter().map(|(_, p)| p));
    let (mut worst, mut checked, mut ratios) = (0.0f64, 0, 0);
    for (idx, prob) in all.iter().enumerate() {
        for j in 0..prob.germs().len() {
            for i in 0..prob.dim() {
                for k in 0..prob.dim() - 1 {
                    let a = pde_check(prob, j, i, k, 1e-4).map_err(|e| format!("problem {idx}: {e}"))?;
                    let b = pde_check(prob, j, i, k, 5e-5).map_err(|e| format!("problem {idx}: {e}"))?;
                    check(a.residual < 1e-6, || format!("problem {idx} germ {j} x{i}: residual {:.2e}", a.residual))?;
                    if a.residual > PDE_NOISE_FLOOR {
                        let ratio = a.residual / b.residual;
                        check((3.5..=4.5).contains(&ratio), || {
                            format!("problem {idx} germ {j} x{i}: decay ratio {ratio:.3}")
                        })?;
                        ratios += 1;
                    }
                    worst = worst.max(a.residual);
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} checks, worst residual {worst:.1e}, {ratios} decay ratios above the roundoff floor in [3.5, 4.5]"))
}

fn degree_bound(problems: &[(MultiPoly, TraceProblem)]) -> Outcome {
    let prob = circle_problem();
    let x2 = MultiPoly::var(2, 1);
    let mut leads = Vec::new();
    for l in 1..=3u32 {
        let rep = degree_in_param(&prob, &x2.pow(l), 0, prob.tolerances().max_probe_degree, Flavor::Trace)
            .map_err(|e| e.to_string())?;
        check(rep.degree == l, || format!("deg Tr(x2^{l}) = {}", rep.degree))?;
        check(rep.leading > prob.tolerances().fit, || format!("leading coefficient {:.2e}", rep.leading))?;
        leads.push(rep.leading);
    }
    for (idx, (_, p)) in problems.iter().enumerate() {
        for l in 1..=3u32 {
            let ok = trace_degree_bound_check(p, &x2.pow(l), l, 0).map_err(|e| format!("trial {idx}: {e}"))?;
            check(ok, || format!("trial {idx}: deg Tr(x2^{l}) exceeds {l}"))?;
        }
    }
    Ok(format!(
        "circle degrees 1,2,3 with leading coefficients {:.3}, {:.3}, {:.3}; bound holds on 20 trials",
        leads[0], leads[1], leads[2]
    ))
}

fn residues() -> Outcome {
    let mut r = rng(6);
    let mut worst = 0.0f64;
    for trial in 0..20 {
        let n = if trial < 5 { 1 } else { 2 };
        let (h, fs) = khovanskii_system(&mut r, n);
        check(khovanskii_predict(&h, &fs).map_err(|e| e.to_string())?, || "prediction false".into())?;
        let sys = SquareSystem::new(fs).map_err(|e| e.to_string())?;
        let v = residue_sum(&h, &sys, true).map_err(|e| format!("trial {trial}: {e}"))?;
        let scale = residue_scale(&h, &sys, true).map_err(|e| e.to_string())?;
        check(v.norm() < 1e-8, || format!("trial {trial}: |sum| = {:.2e} (scale {scale:.2e})", v.norm()))?;
        worst = worst.max(v.norm());
    }
    let prob = circle_problem();
    let a = prob.base().clone();
    let l1 = trace_derivative_check(&prob, &circle(), 1, 0, 1, &a).map_err(|e| e.to_string())?;
    let l2 = trace_derivative_check(&prob, &circle(), 1, 0, 2, &a).map_err(|e| e.to_string())?;
    check(l1.residual < 1e-5, || format!("l = 1 residual {:.2e}", l1.residual))?;
    check(l2.residual < 1e-5, || format!("l = 2 residual {:.2e}", l2.residual))?;
    check(l2.residue.norm() < 1e-8, || format!("l = 2 value {:.2e}", l2.residue.norm()))?;
    let expected = -2.0 * SLOPE / (1.0 + SLOPE * SLOPE);
    check((l1.residue - c(expected)).norm() < 1e-6, || format!("l = 1 value {} against {expected}", l1.residue))?;
    Ok(format!(
        "worst |residue sum| {worst:.1e} over 20 systems; derivative residuals {:.1e} (l=1), {:.1e} (l=2), l=2 value {:.1e}",
        l1.residual,
        l2.residual,
        l2.residue.norm()
    ))
}

fn root_counts() -> Outcome {
    let mut r = rng(7);
    let mut counts = Vec::new();
    for trial in 0..20 {
        let d1 = r.random_range(1..=3);
        let d2 = r.random_range(1..=3);
        let fs = vec![random_sparse(&mut r, 2, d1), random_sparse(&mut r, 2, d2)];
        let nps: Vec<LatticePolytope> = fs.iter().map(|f| newton_polytope(f).unwrap()).collect();
        let mv = mixed_volume(&nps).map_err(|e| e.to_string())?;
        let zeros = solve_square(&SquareSystem::new(fs).unwrap()).map_err(|e| format!("trial {trial}: {e}"))?;
        check(zeros.len() as u64 == mv, || format!("trial {trial}: {} zeros, mixed volume {mv}", zeros.len()))?;
        counts.push(mv);
    }
    let tri = LatticePolytope::simplex(2, 2).unwrap();
    let square = LatticePolytope::lattice_box(&[1, 1]).unwrap();
    let seg = LatticePolytope::new(2, vec![vec![0, 0], vec![1, 0]]).unwrap();
    let a = mixed_volume(&[tri.clone(), tri]).map_err(|e| e.to_string())?;
    let b = mixed_volume(&[square, seg]).map_err(|e| e.to_string())?;
    check(a == 4 && b == 1, || format!("MV(2Δ,2Δ) = {a}, MV(square, [0,e1]) = {b}"))?;
    Ok(format!("20/20 root counts match (mixed volumes {counts:?}); MV(2Δ,2Δ) = 4, MV(square,[0,e1]) = 1"))
}

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn class_check(name: &str) -> Result<(i32, serde_json::Value), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_abeltrace"))
        .args(["class-check", data(name).as_str()])
        .output()
        .map_err(|e| e.to_string())?;
    let v = serde_json::from_slice(&out.stdout).map_err(|e| format!("{name}: {e}"))?;
    Ok((out.status.code().unwrap_or(-1), v))
}

fn rows(v: &serde_json::Value) -> Vec<(u64, u64)> {
    v["divisors"]
        .as_array()
        .map(|a| a.iter().map(|r| (r["observed"].as_u64().unwrap_or(0), r["predicted"].as_u64().unwrap_or(0))).collect())
        .unwrap_or_default()
}

fn class_certificate() -> Outcome {
    let start = Instant::now();
    let (code, v) = class_check("p1p1.json")?;
    check(code == 0 && rows(&v) == [(1, 1), (1, 1)], || format!("p1p1: exit {code}, rows {:?}", rows(&v)))?;
    let (code, v) = class_check("p1p1_alpha22.json")?;
    check(code == 2 && v["certificate"] == "negative", || format!("alpha (2,2): exit {code}, rows {:?}", rows(&v)))?;
    let wrong = rows(&v);
    let (code, v) = class_check("conic.json")?;
    check(code == 0 && rows(&v) == [(2, 2)], || format!("conic: exit {code}, rows {:?}", rows(&v)))?;
    within(start.elapsed(), 10.0)?;
    Ok(format!(
        "P1xP1 rulings 1/1, 1/1; alpha (2,2) rejected with {wrong:?}; conic 2/2; {:.2}s",
        start.elapsed().as_secs_f64()
    ))
}

fn properties(problems: &[(MultiPoly, TraceProblem)]) -> Outcome {
    let prob = circle_problem();
    let f = poly(2, &[(&[2, 1], 1.0), (&[0, 1], -0.5), (&[1, 0], 0.3)]);
    let g = poly(2, &[(&[0, 3], 1.0), (&[1, 1], -0.7), (&[0, 0], 1.5)]);
    let mut lin = 0.0f64;
    let mut mult = 0.0f64;
    let mut perm = 0.0f64;
    let mut reversed = prob.germs().to_vec();
    reversed.reverse();
    let swapped = TraceProblem::new(prob.family().clone(), reversed, Tolerances::default()).map_err(|e| e.to_string())?;
    for t in [-0.04, 0.0, 0.03] {
        let a = line_param(0.6 + t, SLOPE - t);
        let (alpha, beta) = (c(1.3), C64::new(-0.4, 0.9));
        let combo = &f.scale(alpha) + &g.scale(beta);
        let tr = |h: &MultiPoly| trace(&prob, h, &a).unwrap();
        let nm = |h: &MultiPoly| norm(&prob, h, &a).unwrap();
        lin = lin.max((tr(&combo) - alpha * tr(&f) - beta * tr(&g)).norm());
        let prod = nm(&f) * nm(&g);
        mult = mult.max((nm(&(&f * &g)) - prod).norm() / prod.norm().max(1.0));
        perm = perm.max((tr(&f) - trace(&swapped, &f, &a).unwrap()).norm());
        perm = perm.max((nm(&g) - norm(&swapped, &g, &a).unwrap()).norm());
    }
    check(lin < 1e-10 && mult < 1e-9 && perm < 1e-12, || {
        format!("linearity {lin:.1e}, multiplicativity {mult:.1e}, permutation {perm:.1e}")
    })?;

    // the trace-built polynomial F_u(u(x), P(x)) on the line family
    let raw = |p: &TraceProblem, u: &[C64]| {
        interpolate_with(p, LinearForm::new(u.to_vec()).unwrap(), 1).map(|r| r.raw_q).map_err(|e| e.to_string())
    };
    let q0 = raw(&prob, &[c(0.0), c(1.0)])?;
    let mut u_dev = 0.0f64;
    for u in [[c(1.0), c(0.3)], [C64::new(0.2, 0.7), C64::new(-0.5, 0.1)]] {
        u_dev = u_dev.max(q0.projective_distance(&raw(&prob, &u)?));
    }
    let tilted = problem_from_polynomial(&circle(), &line_family(0.6, SLOPE * 1.05), ORDER, Tolerances::default())
        .map_err(|e| e.to_string())?;
    let mut a_dev = q0.projective_distance(&raw(&tilted, &[c(0.0), c(1.0)])?);
    // curved families: the reduced interpolant, which must divide the trace-built one
    for (f, p) in problems.iter().take(3) {
        let a0 = p.base();
        let bumped = ParamPoint::new(
            a0.constants.clone(),
            vec![a0.coefficients[0].iter().enumerate().map(|(i, v)| v * if i % 2 == 0 { 1.05 } else { 0.95 }).collect()],
        );
        let fam = p.family().with_base(bumped).map_err(|e| e.to_string())?;
        let moved = problem_from_polynomial(f, &fam, ORDER, Tolerances::default()).map_err(|e| e.to_string())?;
        let ra = interpolate(p, 3).map_err(|e| e.to_string())?;
        let rb = interpolate(&moved, 3).map_err(|e| e.to_string())?;
        a_dev = a_dev.max(ra.q.projective_distance(&rb.q));
        a_dev = a_dev.max(ra.cofactor_residual).max(rb.cofactor_residual);
    }
    check(u_dev < 1e-6 && a_dev < 1e-6, || format!("u-dependence {u_dev:.1e}, a'-dependence {a_dev:.1e}"))?;

    let mut r = rng(9);
    let mut newton = 0.0f64;
    for len in 1..=6 {
        let values: Vec<C64> = (0..len).map(|_| C64::new(r.random_range(-2.0..2.0), r.random_range(-2.0..2.0))).collect();
        let monic = monic_from_elementary(&newton_to_elementary(&power_sums(&values, len)));
        for v in &values {
            let at: C64 = monic.iter().rev().fold(c(0.0), |acc, &co| acc * v + co);
            newton = newton.max(at.norm());
        }
    }
    check(newton < 1e-10, || format!("Newton round trip {newton:.1e}"))?;

    let mut mv_ok = true;
    for _ in 0..30 {
        let pt = |r: &mut rand_chacha::ChaCha8Rng| {
            let k = r.random_range(1..5);
            let pts: Vec<Vec<i64>> = (0..k).map(|_| vec![r.random_range(0..4), r.random_range(0..4)]).collect();
            LatticePolytope::from_points(2, &pts).unwrap()
        };
        let (p, p2, q) = (pt(&mut r), pt(&mut r), pt(&mut r));
        let pq = mixed_volume(&[p.clone(), q.clone()]).unwrap();
        mv_ok &= pq == mixed_volume(&[q.clone(), p.clone()]).unwrap();
        let sum = minkowski_sum(&p, &p2).unwrap();
        mv_ok &= mixed_volume(&[sum, q.clone()]).unwrap() == pq + mixed_volume(&[p2, q]).unwrap();
    }
    check(mv_ok, || "mixed volume symmetry or additivity violated".into())?;
    Ok(format!(
        "linearity {lin:.0e}, multiplicativity {mult:.0e}, permutation {perm:.0e}, u {u_dev:.0e}, a' {a_dev:.0e}, Newton {newton:.0e}, MV exact"
    ))
}

fn main() {
    let build = Instant::now();
    let problems = random_problems();
    let build = build.elapsed();
    let rejected = REJECTED.load(std::sync::atomic::Ordering::Relaxed);
    let results: Vec<(&str, Outcome)> = vec![
        ("circle: affine traces and recovery", circle_recovery()),
        ("exponential: negative trace test", exponential_negative()),
        ("randomized reconstruction", random_reconstruction(&problems, build)),
        ("coefficient PDE", pde_identity(&problems)),
        ("degree bound", degree_bound(&problems)),
        ("residue vanishing and derivatives", residues()),
        ("root counts and mixed volumes", root_counts()),
        ("class certificate", class_certificate()),
        ("property suites", properties(&problems)),
    ];
    let mut failed = 0;
    for (name, res) in &results {
        match res {
            Ok(msg) => println!("PASS {name}: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL {name}: {msg}");
            }
        }
    }
    println!("random problems: 20 kept, {rejected} ill-conditioned draws redrawn");
    if failed > 0 {
        println!("{failed} of {} checks failed", results.len());
        std::process::exit(1);
    }
}
