//! The moving curve family `C_a = {a_k0 = P_k(a'_k, x), k = 1..n−1}` and
//! continuation of its intersection points with a germ.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::algebra::{monomial_value, GermGraph, MultiPoly};
use crate::polytope::{LatticePolytope, PolytopeError};

/// Default bound below which `|det J|` counts as tangential contact.
pub const TRANSVERSALITY_THRESHOLD: f64 = 1e-8;
/// Maximum residual of a tracked endpoint.
pub const TRACK_RESIDUAL: f64 = 1e-10;
const MAX_HALVINGS: u32 = 6;
const MAX_NEWTON: usize = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CurveError {
    #[error("invalid curve family: {0}")]
    InvalidFamily(String),
    #[error("parameter shape does not match the family: {0}")]
    ShapeMismatch(String),
    #[error("point is outside the germ's validity polydisc")]
    OutsideGerm,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrackError {
    #[error("Newton correction failed to contract at waypoint {waypoint}")]
    NewtonDivergence { waypoint: usize },
    #[error("path left the germ's validity radius at waypoint {waypoint}")]
    LeftGermDomain { waypoint: usize },
    #[error("Jacobian determinant {det:.3e} below threshold at waypoint {waypoint}")]
    TransversalityLoss { waypoint: usize, det: f64 },
    #[error(transparent)]
    Shape(#[from] CurveError),
}

/// Values of the curve parameters: the constants `a_k0` and, for each `k`,
/// one coefficient per monomial of the support `S_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamPoint {
    pub constants: Vec<C64>,
    pub coefficients: Vec<Vec<C64>>,
}

impl ParamPoint {
    pub fn new(constants: Vec<C64>, coefficients: Vec<Vec<C64>>) -> Self {
        Self {
            constants,
            coefficients,
        }
    }

    /// `self + t (other − self)`.
    pub fn lerp(&self, other: &Self, t: f64) -> Self {
        Self {
            constants: self
                .constants
                .iter()
                .zip(&other.constants)
                .map(|(a, b)| a + (b - a) * t)
                .collect(),
            coefficients: self
                .coefficients
                .iter()
                .zip(&other.coefficients)
                .map(|(ra, rb)| ra.iter().zip(rb).map(|(a, b)| a + (b - a) * t).collect())
                .collect(),
        }
    }

    pub fn with_constant(&self, k: usize, value: C64) -> Self {
        let mut out = self.clone();
        out.constants[k] = value;
        out
    }

    pub fn with_coefficient(&self, k: usize, slot: usize, value: C64) -> Self {
        let mut out = self.clone();
        out.coefficients[k][slot] = value;
        out
    }

    fn is_same(&self, other: &Self) -> bool {
        self == other
    }
}

/// Monomial supports of the curve equations together with a base parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveFamily {
    n: usize,
    supports: Vec<Vec<Vec<u32>>>,
    base: ParamPoint,
}

impl CurveFamily {
    /// Validates that no support holds the constant monomial and every support
    /// holds all the unit vectors `e_i`.
    pub fn new(n: usize, supports: Vec<Vec<Vec<u32>>>, base: ParamPoint) -> Result<Self, CurveError> {
        if n < 2 {
            return Err(CurveError::InvalidFamily(format!("dimension {n} is below 2")));
        }
        if supports.len() != n - 1 {
            return Err(CurveError::InvalidFamily(format!(
                "expected {} supports, found {}",
                n - 1,
                supports.len()
            )));
        }
        for (k, s) in supports.iter().enumerate() {
            for e in s {
                if e.len() != n {
                    return Err(CurveError::InvalidFamily(format!(
                        "support {k}: exponent {e:?} has length {}, expected {n}",
                        e.len()
                    )));
                }
                if e.iter().all(|&v| v == 0) {
                    return Err(CurveError::InvalidFamily(format!(
                        "support {k} contains the constant monomial"
                    )));
                }
            }
            for i in 0..n {
                if !s.iter().any(|e| is_unit(e, i)) {
                    return Err(CurveError::InvalidFamily(format!(
                        "support {k} is missing the monomial x{}",
                        i + 1
                    )));
                }
            }
            let mut sorted = s.clone();
            sorted.sort();
            sorted.dedup();
            if sorted.len() != s.len() {
                return Err(CurveError::InvalidFamily(format!(
                    "support {k} has repeated monomials"
                )));
            }
        }
        let fam = Self {
            n,
            supports,
            base: base.clone(),
        };
        fam.check_params(&base)?;
        Ok(fam)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn supports(&self) -> &[Vec<Vec<u32>>] {
        &self.supports
    }

    pub fn base(&self) -> &ParamPoint {
        &self.base
    }

    /// The same supports with a different base parameter.
    pub fn with_base(&self, base: ParamPoint) -> Result<Self, CurveError> {
        self.check_params(&base)?;
        Ok(Self {
            n: self.n,
            supports: self.supports.clone(),
            base,
        })
    }

    pub fn check_params(&self, a: &ParamPoint) -> Result<(), CurveError> {
        if a.constants.len() != self.n - 1 || a.coefficients.len() != self.n - 1 {
            return Err(CurveError::ShapeMismatch(format!(
                "expected {} equations, parameters describe {}",
                self.n - 1,
                a.constants.len()
            )));
        }
        for (k, (s, c)) in self.supports.iter().zip(&a.coefficients).enumerate() {
            if s.len() != c.len() {
                return Err(CurveError::ShapeMismatch(format!(
                    "equation {k}: support has {} monomials, parameters have {}",
                    s.len(),
                    c.len()
                )));
            }
        }
        Ok(())
    }

    /// Position of the monomial `x_i` in the support `S_k`.
    pub fn unit_slot(&self, k: usize, i: usize) -> usize {
        self.supports[k]
            .iter()
            .position(|e| is_unit(e, i))
            .expect("family invariant: every unit monomial is present")
    }

    /// `P_k(a'_k, x)` as a polynomial in `x`.
    pub fn curve_poly(&self, k: usize, a: &ParamPoint) -> MultiPoly {
        MultiPoly::from_terms(
            self.n,
            self.supports[k]
                .iter()
                .cloned()
                .zip(a.coefficients[k].iter().copied()),
        )
        .expect("support exponents have the family dimension")
    }

    /// `conv(S_k ∪ {0})`, the polytope of the line bundle cut out by equation `k`.
    pub fn bundle_polytope(&self, k: usize) -> Result<LatticePolytope, PolytopeError> {
        let mut pts: Vec<Vec<i64>> = vec![vec![0; self.n]];
        pts.extend(
            self.supports[k]
                .iter()
                .map(|e| e.iter().map(|&v| v as i64).collect()),
        );
        LatticePolytope::from_points(self.n, &pts)
    }

    fn eval_p(&self, k: usize, a: &ParamPoint, x: &[C64]) -> C64 {
        self.supports[k]
            .iter()
            .zip(&a.coefficients[k])
            .map(|(e, c)| c * monomial_value(e, x))
            .sum()
    }

    fn grad_p(&self, k: usize, a: &ParamPoint, x: &[C64]) -> Vec<C64> {
        let mut g = vec![C64::new(0.0, 0.0); self.n];
        for (e, c) in self.supports[k].iter().zip(&a.coefficients[k]) {
            for i in 0..self.n {
                if e[i] == 0 {
                    continue;
                }
                let mut d = e.clone();
                d[i] -= 1;
                g[i] += c * e[i] as f64 * monomial_value(&d, x);
            }
        }
        g
    }

    /// Derivative of the curve residuals along a parameter direction `da`.
    fn residual_param_derivative(&self, da: &ParamPoint, x: &[C64]) -> Vec<C64> {
        (0..self.n - 1)
            .map(|k| da.constants[k] - self.eval_p(k, da, x))
            .collect()
    }
}

fn is_unit(e: &[u32], i: usize) -> bool {
    e.iter()
        .enumerate()
        .all(|(j, &v)| if j == i { v == 1 } else { v == 0 })
}

fn check_point(fam: &CurveFamily, x: &[C64]) -> Result<(), CurveError> {
    if x.len() != fam.n {
        return Err(CurveError::ShapeMismatch(format!(
            "point has {} coordinates, expected {}",
            x.len(),
            fam.n
        )));
    }
    Ok(())
}

/// Component `k` is `a_k0 − P_k(a'_k, x)`.
pub fn curve_residual(fam: &CurveFamily, a: &ParamPoint, x: &[C64]) -> Result<Vec<C64>, CurveError> {
    fam.check_params(a)?;
    check_point(fam, x)?;
    Ok((0..fam.n - 1)
        .map(|k| a.constants[k] - fam.eval_p(k, a, x))
        .collect())
}

/// True iff every point lies on `C_a` up to `tol` (vacuous for no points).
pub fn on_curve_check(fam: &CurveFamily, a: &ParamPoint, points: &[Vec<C64>], tol: f64) -> bool {
    points.iter().all(|p| {
        curve_residual(fam, a, p)
            .map(|r| r.iter().all(|z| z.norm() < tol))
            .unwrap_or(false)
    })
}

/// The square system (germ graph equation, curve equations) at `x`.
fn system(germ: &GermGraph, fam: &CurveFamily, a: &ParamPoint, x: &[C64]) -> (DVector<C64>, DMatrix<C64>) {
    let n = fam.n;
    let mut f = DVector::zeros(n);
    let mut j = DMatrix::zeros(n, n);
    f[0] = germ.equation_residual(x);
    for (i, v) in germ.equation_gradient(x).into_iter().enumerate() {
        j[(0, i)] = v;
    }
    for k in 0..n - 1 {
        f[k + 1] = a.constants[k] - fam.eval_p(k, a, x);
        for (i, v) in fam.grad_p(k, a, x).into_iter().enumerate() {
            j[(k + 1, i)] = -v;
        }
    }
    (f, j)
}

/// `|det J|` of (germ graph equation, curve equations) at `p`.
pub fn transversality_check(
    germ: &GermGraph,
    fam: &CurveFamily,
    a: &ParamPoint,
    p: &[C64],
) -> Result<f64, CurveError> {
    fam.check_params(a)?;
    check_point(fam, p)?;
    if germ.dim() != fam.n {
        return Err(CurveError::ShapeMismatch("germ dimension differs".into()));
    }
    if !germ.contains(p) {
        return Err(CurveError::OutsideGerm);
    }
    Ok(system(germ, fam, a, p).1.determinant().norm())
}

/// Continuation settings for [`track_point`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrackOptions {
    pub steps: usize,
    pub transversality_threshold: f64,
}

impl Default for TrackOptions {
    fn default() -> Self {
        Self {
            steps: 10,
            transversality_threshold: TRANSVERSALITY_THRESHOLD,
        }
    }
}

fn inf_norm(v: &DVector<C64>) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

enum StepFailure {
    Diverged,
    Singular,
}

/// Newton iteration on the square system at fixed parameters.
fn correct(
    germ: &GermGraph,
    fam: &CurveFamily,
    a: &ParamPoint,
    x0: &[C64],
) -> Result<Vec<C64>, StepFailure> {
    let mut x = x0.to_vec();
    let mut last = f64::INFINITY;
    for it in 0..MAX_NEWTON {
        let (f, j) = system(germ, fam, a, &x);
        let Some(dx) = j.lu().solve(&f) else {
            return Err(StepFailure::Singular);
        };
        let step = inf_norm(&dx);
        if !step.is_finite() {
            return Err(StepFailure::Diverged);
        }
        for (xi, d) in x.iter_mut().zip(dx.iter()) {
            *xi -= d;
        }
        let scale = 1.0 + x.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if step <= 1e-14 * scale {
            return Ok(x);
        }
        if it > 0 && step > 0.9 * last && step > 1e-11 * scale {
            return Err(StepFailure::Diverged);
        }
        last = step;
    }
    let (f, _) = system(germ, fam, a, &x);
    if inf_norm(&f) < TRACK_RESIDUAL {
        Ok(x)
    } else {
        Err(StepFailure::Diverged)
    }
}

/// Follows the intersection point of `germ` and `C_a` along the straight
/// parameter segment from `a_start` to `a_target`.
///
/// Each of the `steps` waypoints uses an Euler predictor and a Newton
/// corrector; a failed corrector halves the step, which never falls below
/// the nominal step over 2^6.
pub fn track_point(
    germ: &GermGraph,
    fam: &CurveFamily,
    a_start: &ParamPoint,
    p_start: &[C64],
    a_target: &ParamPoint,
    opts: TrackOptions,
) -> Result<Vec<C64>, TrackError> {
    fam.check_params(a_start)?;
    fam.check_params(a_target)?;
    check_point(fam, p_start)?;
    if germ.dim() != fam.n {
        return Err(CurveError::ShapeMismatch("germ dimension differs".into()).into());
    }
    if a_start.is_same(a_target) {
        return Ok(p_start.to_vec());
    }
    let steps = opts.steps.max(1);
    let nominal = 1.0 / steps as f64;
    let direction = ParamPoint {
        constants: a_start
            .constants
            .iter()
            .zip(&a_target.constants)
            .map(|(s, t)| t - s)
            .collect(),
        coefficients: a_start
            .coefficients
            .iter()
            .zip(&a_target.coefficients)
            .map(|(rs, rt)| rs.iter().zip(rt).map(|(s, t)| t - s).collect())
            .collect(),
    };
    let det0 = system(germ, fam, a_start, p_start).1.determinant().norm();
    if det0 < opts.transversality_threshold {
        return Err(TrackError::TransversalityLoss { waypoint: 0, det: det0 });
    }
    let mut t = 0.0f64;
    let mut x = p_start.to_vec();
    // the step is nominal / 2^level; level never exceeds MAX_HALVINGS
    let mut level = 0u32;
    while t < 1.0 {
        let h = (nominal / f64::from(1u32 << level)).min(1.0 - t);
        let waypoint = ((t + 1e-12) * steps as f64).floor() as usize;
        let a_now = a_start.lerp(a_target, t);
        let (_, j) = system(germ, fam, &a_now, &x);
        // Euler predictor: J dx/dt = −∂F/∂t, where only the curve rows move
        let mut rhs = DVector::zeros(fam.n);
        for (k, v) in fam.residual_param_derivative(&direction, &x).into_iter().enumerate() {
            rhs[k + 1] = -v;
        }
        let predicted: Vec<C64> = match j.lu().solve(&rhs) {
            Some(v) => x.iter().zip(v.iter()).map(|(xi, vi)| xi + vi * h).collect(),
            None => x.clone(),
        };
        let t_next = if 1.0 - (t + h) < 1e-12 { 1.0 } else { t + h };
        let a_next = a_start.lerp(a_target, t_next);
        match correct(germ, fam, &a_next, &predicted) {
            Ok(xn) => {
                if !germ.contains(&xn) {
                    return Err(TrackError::LeftGermDomain { waypoint });
                }
                let det = system(germ, fam, &a_next, &xn).1.determinant().norm();
                if det < opts.transversality_threshold {
                    return Err(TrackError::TransversalityLoss { waypoint, det });
                }
                x = xn;
                t = t_next;
                level = level.saturating_sub(1);
            }
            Err(StepFailure::Diverged) | Err(StepFailure::Singular) => {
                level += 1;
                if level > MAX_HALVINGS {
                    return Err(TrackError::NewtonDivergence { waypoint });
                }
            }
        }
    }
    let (f, _) = system(germ, fam, a_target, &x);
    if inf_norm(&f) >= TRACK_RESIDUAL {
        return Err(TrackError::NewtonDivergence { waypoint: steps });
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    /// `a_10 = c1 x1 + c2 x2`.
    fn line_family(a10: f64, c1: f64, c2: f64) -> CurveFamily {
        CurveFamily::new(
            2,
            vec![vec![vec![1, 0], vec![0, 1]]],
            ParamPoint::new(vec![c(a10)], vec![vec![c(c1), c(c2)]]),
        )
        .unwrap()
    }

    fn parabola_at(x1: f64) -> GermGraph {
        // x2 = x1² written around (x1, x1²)
        let series = MultiPoly::from_real_terms(1, &[(&[0], x1 * x1), (&[1], 2.0 * x1), (&[2], 1.0)]).unwrap();
        GermGraph::new(vec![c(x1), c(x1 * x1)], 1, series, 4, 5.0).unwrap()
    }

    fn circle_upper(x1: f64) -> GermGraph {
        let circle =
            MultiPoly::from_real_terms(2, &[(&[2, 0], 1.0), (&[0, 2], 1.0), (&[0, 0], -1.0)]).unwrap();
        let x2 = (1.0 - x1 * x1).sqrt();
        GermGraph::from_implicit(&circle, &[c(x1), c(x2)], 1, 30, None).unwrap()
    }

    #[test]
    fn residual_examples() {
        let fam = line_family(1.0, 1.0, 0.0);
        let a = fam.base().clone();
        assert_eq!(curve_residual(&fam, &a, &[c(1.0), c(5.0)]).unwrap(), vec![c(0.0)]);
        assert_eq!(curve_residual(&fam, &a, &[c(0.0), c(0.0)]).unwrap(), vec![c(1.0)]);
        let p1p1 = CurveFamily::new(
            2,
            vec![vec![vec![1, 0], vec![0, 1], vec![1, 1]]],
            ParamPoint::new(vec![c(3.0)], vec![vec![c(1.0); 3]]),
        )
        .unwrap();
        assert_eq!(
            curve_residual(&p1p1, p1p1.base(), &[c(1.0), c(1.0)]).unwrap(),
            vec![c(0.0)]
        );
        assert!(curve_residual(&fam, &a, &[c(0.0)]).is_err());
    }

    #[test]
    fn family_invariants() {
        let base = ParamPoint::new(vec![c(0.0)], vec![vec![c(1.0)]]);
        assert!(CurveFamily::new(2, vec![vec![vec![1, 0]]], base.clone()).is_err());
        assert!(CurveFamily::new(2, vec![vec![vec![0, 0]]], base).is_err());
    }

    #[test]
    fn on_curve_examples() {
        let fam = line_family(0.6, 1.0, 0.0);
        let a = fam.base().clone();
        let pts = vec![vec![c(0.6), c(0.8)], vec![c(0.6), c(-0.8)]];
        assert!(on_curve_check(&fam, &a, &pts, 1e-9));
        let moved = vec![vec![c(0.601), c(0.8)]];
        assert!(!on_curve_check(&fam, &a, &moved, 1e-9));
        assert!(on_curve_check(&fam, &a, &[], 1e-9));
    }

    #[test]
    fn transversality_examples() {
        let germ = parabola_at(0.0);
        let vertical = line_family(0.0, 1.0, 0.0);
        let d = transversality_check(&germ, &vertical, vertical.base(), &[c(0.0), c(0.0)]).unwrap();
        assert!((d - 1.0).abs() < 1e-15);
        let horizontal = line_family(0.0, 0.0, 1.0);
        let d = transversality_check(&germ, &horizontal, horizontal.base(), &[c(0.0), c(0.0)]).unwrap();
        assert!(d < 1e-15);
        // x1 = a10 + x2 through (0.6, 0.8) at 45°
        let germ = circle_upper(0.6);
        let diagonal = line_family(-0.2, 1.0, -1.0);
        let d = transversality_check(&germ, &diagonal, diagonal.base(), &[c(0.6), c(0.8)]).unwrap();
        // rows (0.75, 1) and (-1, 1)
        assert!((d - 1.75).abs() < 1e-12 && d > 0.1);
        assert!(matches!(
            transversality_check(&germ, &diagonal, diagonal.base(), &[c(2.0), c(0.8)]),
            Err(CurveError::OutsideGerm)
        ));
    }

    #[test]
    fn zero_length_path() {
        let germ = circle_upper(0.6);
        let fam = line_family(0.6, 1.0, 0.0);
        let p = vec![c(0.6), c(0.8)];
        let out = track_point(&germ, &fam, fam.base(), &p, fam.base(), TrackOptions::default()).unwrap();
        assert_eq!(out, p);
    }

    #[test]
    fn circle_branch_follows_exact_formula() {
        let germ = circle_upper(0.6);
        let fam = line_family(0.6, 1.0, 0.0);
        let target = fam.base().with_constant(0, c(0.5));
        let out = track_point(&germ, &fam, fam.base(), &[c(0.6), c(0.8)], &target, TrackOptions::default()).unwrap();
        assert!((out[0] - c(0.5)).norm() < 1e-12);
        assert!((out[1] - c(0.75f64.sqrt())).norm() < 1e-10);
        let r = curve_residual(&fam, &target, &out).unwrap();
        assert!(r[0].norm() < 1e-10);
        assert!(germ.equation_residual(&out).norm() < 1e-10);
    }

    #[test]
    fn parabola_is_exact() {
        let germ = parabola_at(1.0);
        let fam = line_family(1.0, 1.0, 0.0);
        let target = fam.base().with_constant(0, c(2.0));
        let out = track_point(&germ, &fam, fam.base(), &[c(1.0), c(1.0)], &target, TrackOptions::default()).unwrap();
        assert!((out[0] - c(2.0)).norm() < 1e-12);
        assert!((out[1] - c(4.0)).norm() < 1e-12);
    }

    #[test]
    fn step_count_does_not_change_endpoint() {
        let germ = circle_upper(0.6);
        let fam = line_family(0.6, 1.0, 0.0);
        let target = ParamPoint::new(vec![c(0.45)], vec![vec![c(1.05), c(-0.2)]]);
        let start = [c(0.6), c(0.8)];
        let coarse = track_point(&germ, &fam, fam.base(), &start, &target, TrackOptions { steps: 10, ..Default::default() }).unwrap();
        let fine = track_point(&germ, &fam, fam.base(), &start, &target, TrackOptions { steps: 40, ..Default::default() }).unwrap();
        for (a, b) in coarse.iter().zip(&fine) {
            assert!((a - b).norm() < 1e-8);
        }
    }

    #[test]
    fn leaving_the_germ_is_reported() {
        let germ = circle_upper(0.6);
        let fam = line_family(0.6, 1.0, 0.0);
        let target = fam.base().with_constant(0, c(0.0));
        let err = track_point(&germ, &fam, fam.base(), &[c(0.6), c(0.8)], &target, TrackOptions::default()).unwrap_err();
        assert!(matches!(err, TrackError::LeftGermDomain { .. }), "{err:?}");
    }

    #[test]
    fn tangency_is_reported() {
        // horizontal lines x2 = a10 touch the parabola at its vertex
        let germ = parabola_at(0.0);
        let fam = line_family(0.0, 0.0, 1.0);
        let target = fam.base().with_constant(0, c(0.5));
        let err = track_point(&germ, &fam, fam.base(), &[c(0.0), c(0.0)], &target, TrackOptions::default()).unwrap_err();
        assert!(matches!(err, TrackError::TransversalityLoss { waypoint: 0, .. }));
    }
}
