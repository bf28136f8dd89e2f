//! Writes the problem files under `tests/data`.
//!
//! Run with `cargo run --example fixtures` from the crate directory.

use std::path::Path;

use abeltrace::algebra::{GermGraph, MultiPoly};
use abeltrace::curves::{CurveFamily, ParamPoint};
use abeltrace::polytope::LatticePolytope;
use abeltrace::problem::{terms_of, to_text, PolytopeListFile, ProblemFile, ResidueFile};
use abeltrace::reconstruct::{problem_from_polynomial, ClassSpec, DivisorSpec};
use abeltrace::traces::{TraceProblem, Tolerances};
use abeltrace::C64;

const ORDER: u32 = 30;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn poly(n: usize, terms: &[(&[u32], f64)]) -> MultiPoly {
    MultiPoly::from_real_terms(n, terms).unwrap()
}

fn family(supports: Vec<Vec<u32>>, a10: f64, coeffs: &[f64]) -> CurveFamily {
    CurveFamily::new(
        2,
        vec![supports],
        ParamPoint::new(vec![c(a10)], vec![coeffs.iter().map(|&v| c(v)).collect()]),
    )
    .unwrap()
}

fn lines(a10: f64, coeffs: &[f64]) -> CurveFamily {
    family(vec![vec![1, 0], vec![0, 1]], a10, coeffs)
}

fn polytope(vertices: &[[i64; 2]]) -> LatticePolytope {
    LatticePolytope::from_points(2, &vertices.iter().map(|v| v.to_vec()).collect::<Vec<_>>()).unwrap()
}

fn divisor(vertices: &[[i64; 2]], section: MultiPoly) -> DivisorSpec {
    DivisorSpec {
        polytope: polytope(vertices),
        section,
    }
}

fn write(dir: &Path, name: &str, text: String) {
    std::fs::write(dir.join(name), text + "\n").unwrap();
    println!("wrote {name}");
}

fn write_problem(dir: &Path, name: &str, prob: &TraceProblem, spec: Option<&ClassSpec>) {
    write(dir, name, ProblemFile::from_problem(prob, spec, 7).to_json());
}

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data");
    std::fs::create_dir_all(&dir).unwrap();
    let tol = Tolerances::default;
    let x1 = MultiPoly::var(2, 0);
    let x2 = MultiPoly::var(2, 1);

    // unit circle cut by x1 = a10 + a11 x2 near a10 = 0.6, a11 = 0.5
    let circle = poly(2, &[(&[2, 0], 1.0), (&[0, 2], 1.0), (&[0, 0], -1.0)]);
    let prob = problem_from_polynomial(&circle, &lines(0.6, &[1.0, -0.5]), ORDER, tol()).unwrap();
    let spec = ClassSpec::new(polytope(&[[0, 0], [2, 0], [0, 2]]), vec![divisor(&[[0, 0], [1, 0]], x1.clone())], vec![])
        .unwrap();
    write_problem(&dir, "circle.json", &prob, Some(&spec));

    // a second conic on the same line family
    let conic = poly(
        2,
        &[(&[2, 0], 1.0), (&[1, 1], 0.5), (&[0, 2], 2.0), (&[1, 0], -0.3), (&[0, 1], 0.2), (&[0, 0], -1.0)],
    );
    let prob = problem_from_polynomial(&conic, &lines(0.2, &[1.0, -0.7]), ORDER, tol()).unwrap();
    write_problem(&dir, "conic.json", &prob, Some(&spec));

    // x2 = exp(x1) − 1 to order 12
    let series = MultiPoly::from_terms(
        1,
        (1..=12u32).map(|k| (vec![k], c(1.0 / (1..=k).map(f64::from).product::<f64>()))),
    )
    .unwrap();
    let germ = GermGraph::new(vec![c(0.0), c(0.0)], 1, series, 12, 0.2).unwrap();
    let prob = TraceProblem::new(lines(0.0, &[1.0, 0.0]), vec![germ], tol()).unwrap();
    write_problem(&dir, "exponential.json", &prob, None);

    // the horizontal line x2 = 5
    let germ = GermGraph::new(vec![c(1.0), c(5.0)], 1, MultiPoly::constant(1, c(5.0)), 4, 5.0).unwrap();
    let prob = TraceProblem::new(lines(1.0 - 0.3 * 5.0, &[1.0, -0.3]), vec![germ], tol()).unwrap();
    write_problem(&dir, "constant.json", &prob, None);

    // a bidegree (1,1) curve cut by a10 = a11 x1 + a12 x2 + a13 x1 x2
    let f = poly(2, &[(&[1, 1], 1.0), (&[1, 0], 0.4), (&[0, 1], -0.3), (&[0, 0], -1.2)]);
    let fam = family(vec![vec![1, 0], vec![0, 1], vec![1, 1]], 0.9, &[1.0, 0.6, 0.5]);
    let prob = problem_from_polynomial(&f, &fam, ORDER, tol()).unwrap();
    let rulings = vec![divisor(&[[0, 0], [1, 0]], x1.clone()), divisor(&[[0, 0], [0, 1]], x2.clone())];
    let square = ClassSpec::new(polytope(&[[0, 0], [1, 0], [0, 1], [1, 1]]), rulings.clone(), vec![]).unwrap();
    write_problem(&dir, "p1p1.json", &prob, Some(&square));
    let double = ClassSpec::new(polytope(&[[0, 0], [2, 0], [0, 2], [2, 2]]), rulings, vec![]).unwrap();
    write_problem(&dir, "p1p1_alpha22.json", &prob, Some(&double));

    let one = poly(1, &[(&[0], 1.0)]);
    let x = poly(1, &[(&[1], 1.0)]);
    let quadric = poly(1, &[(&[2], 1.0), (&[0], -1.0)]);
    for (name, h, toric) in [("residue_toric.json", &x, true), ("residue_plain.json", &one, false)] {
        let file = ResidueFile {
            dimension: 1,
            numerator: terms_of(h),
            equations: vec![terms_of(&quadric)],
            toric,
            zeros: None,
        };
        write(&dir, name, to_text(&serde_json::to_value(&file).unwrap()));
    }
    // h = x1 x2 inside the sum of two unit squares
    let f1 = poly(2, &[(&[0, 0], 1.0), (&[1, 0], -2.0), (&[0, 1], 0.5), (&[1, 1], 1.5)]);
    let f2 = poly(2, &[(&[0, 0], -0.7), (&[1, 0], 1.1), (&[0, 1], 1.3), (&[1, 1], -0.4)]);
    let file = ResidueFile {
        dimension: 2,
        numerator: terms_of(&poly(2, &[(&[1, 1], 1.0)])),
        equations: vec![terms_of(&f1), terms_of(&f2)],
        toric: true,
        zeros: None,
    };
    write(&dir, "residue_squares.json", to_text(&serde_json::to_value(&file).unwrap()));
    let triangles = PolytopeListFile {
        dimension: 2,
        polytopes: vec![vec![vec![0, 0], vec![2, 0], vec![0, 2]]; 2],
    };
    write(&dir, "two_triangles.json", to_text(&serde_json::to_value(&triangles).unwrap()));
}
