mod common;

use abeltrace::algebra::MultiPoly;
use abeltrace::polytope::{mixed_volume, newton_polytope};
use abeltrace::residues::*;
use common::*;
use rand::Rng;

#[test]
fn khovanskii_vanishing_on_random_systems() {
    let mut r = rng(11);
    for trial in 0..20 {
        let n = if trial < 6 { 1 } else { 2 };
        let (h, fs) = khovanskii_system(&mut r, n);
        assert!(khovanskii_predict(&h, &fs).unwrap());
        let sys = SquareSystem::new(fs).unwrap();
        let value = residue_sum(&h, &sys, true).unwrap();
        let scale = residue_scale(&h, &sys, true).unwrap();
        assert!(value.norm() < 1e-8 * scale, "trial {trial}: {value} against scale {scale}");
    }
}

#[test]
fn boundary_numerator_does_not_vanish() {
    // h = x² on f = x² − 1: Σ x²/(x·2x) = 1
    let f = poly(1, &[(&[2], 1.0), (&[0], -1.0)]);
    let h = poly(1, &[(&[2], 1.0)]);
    assert!(!khovanskii_predict(&h, std::slice::from_ref(&f)).unwrap());
    let v = residue_sum(&h, &SquareSystem::new(vec![f]).unwrap(), true).unwrap();
    assert!((v - c(1.0)).norm() < 1e-12);
}

#[test]
fn residue_sum_scales_with_the_equations() {
    let mut r = rng(12);
    for _ in 0..5 {
        let (h, fs) = khovanskii_system(&mut r, 2);
        let h = &h + &poly(2, &[(&[0, 0], 1.0)]);
        let base = residue_sum(&h, &SquareSystem::new(fs.clone()).unwrap(), false).unwrap();
        let k = abeltrace::C64::new(-1.7, 0.4);
        for which in 0..2 {
            let mut scaled = fs.clone();
            scaled[which] = scaled[which].scale(k);
            let v = residue_sum(&h.scale(k), &SquareSystem::new(scaled).unwrap(), false).unwrap();
            assert!((v - base).norm() <= 1e-9 * base.norm().max(1.0));
        }
    }
}

#[test]
fn solve_count_is_the_mixed_volume() {
    let mut r = rng(13);
    for _ in 0..20 {
        let d1 = r.random_range(1..=3);
        let fs = vec![random_sparse(&mut r, 2, d1), random_sparse(&mut r, 2, 3)];
        let mv = mixed_volume(&fs.iter().map(|f| newton_polytope(f).unwrap()).collect::<Vec<_>>()).unwrap();
        let zeros = solve_square(&SquareSystem::new(fs).unwrap()).unwrap();
        assert_eq!(zeros.len() as u64, mv);
    }
}

#[test]
fn circle_derivatives() {
    let prob = circle_problem();
    let a = prob.base().clone();
    let x2_slope = -2.0 * SLOPE / (1.0 + SLOPE * SLOPE);
    let l0 = trace_derivative_check(&prob, &circle(), 1, 0, 0, &a).unwrap();
    assert!((l0.residue - c(x2_slope * 0.6)).norm() < 1e-9);
    let l1 = trace_derivative_check(&prob, &circle(), 1, 0, 1, &a).unwrap();
    assert!((l1.residue - c(x2_slope)).norm() < 1e-9, "{}", l1.residue);
    assert!(l1.residual < 1e-6);
    let l2 = trace_derivative_check(&prob, &circle(), 1, 0, 2, &a).unwrap();
    assert!(l2.residual < 1e-5);
    assert!(l2.residue.norm() < 1e-8 && l2.finite_difference.norm() < 1e-8);
    let x1 = trace_derivative_check(&prob, &circle(), 0, 0, 1, &a).unwrap();
    assert!((x1.residue - c(2.0 / (1.0 + SLOPE * SLOPE))).norm() < 1e-9);
}

#[test]
fn bidegree_second_derivative_vanishes() {
    let mut r = rng(14);
    for _ in 0..3 {
        let (f, prob) = random_problem(&mut r, random_bidegree_11, random_p1p1_family);
        let a = prob.base().clone();
        for i in 0..2 {
            let chk = trace_derivative_check(&prob, &f, i, 0, 2, &a).unwrap();
            assert!(chk.residue.norm() < 1e-6, "{}", chk.residue);
            assert!(chk.finite_difference.norm() < 1e-6, "{}", chk.finite_difference);
        }
    }
}

#[test]
fn unsupported_orders_are_rejected() {
    let prob = circle_problem();
    let a = prob.base().clone();
    assert!(trace_derivative_check(&prob, &circle(), 1, 0, 3, &a).is_err());
    assert!(trace_derivative_check(&prob, &MultiPoly::zero(3), 1, 0, 1, &a).is_err());
}
