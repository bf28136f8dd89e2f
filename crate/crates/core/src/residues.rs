//! Global residue sums of square polynomial systems at simple zeros, the
//! Khovanskii vanishing predictor, and residue formulas for derivatives of
//! traces.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::algebra::{univariate_roots, AlgebraError, MultiPoly, Series};
use crate::curves::ParamPoint;
use crate::polytope::{minkowski_sum, mixed_volume, newton_polytope, strict_interior_contains, PolytopeError};
use crate::traces::{trace, TraceError, TraceProblem};

/// Residual bound for zeros returned by [`solve_square`].
pub const ZERO_RESIDUAL: f64 = 1e-10;
const SUPPLIED_RESIDUAL: f64 = 1e-8;
const MIN_JACOBIAN: f64 = 1e-10;
const TORUS_EPS: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum ResidueError {
    #[error("solving is built in for n ≤ 2 only (got n = {0}); supply the zeros")]
    UnsupportedDimension(usize),
    #[error("system is not generic: {0}")]
    GenericityFailure(String),
    #[error("invalid system: {0}")]
    Invalid(String),
    #[error("Jacobian vanishes at zero {index}")]
    ZeroJacobian { index: usize },
    #[error("zero {index} has a vanishing coordinate; the toric form is undefined there")]
    VanishingCoordinate { index: usize },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    Trace(#[from] TraceError),
}

/// `n` polynomials in `n` variables, optionally with their simple zeros.
#[derive(Clone, Debug)]
pub struct SquareSystem {
    equations: Vec<MultiPoly>,
    zeros: Option<Vec<Vec<C64>>>,
}

impl SquareSystem {
    pub fn new(equations: Vec<MultiPoly>) -> Result<Self, ResidueError> {
        let n = equations.len();
        if n == 0 {
            return Err(ResidueError::Invalid("no equations".into()));
        }
        if let Some(e) = equations.iter().find(|e| e.num_vars() != n) {
            return Err(ResidueError::Invalid(format!(
                "equation in {} variables for a system of size {n}",
                e.num_vars()
            )));
        }
        Ok(Self {
            equations,
            zeros: None,
        })
    }

    /// Attaches known zeros; each must be a simple zero to `1e-8`.
    pub fn with_zeros(equations: Vec<MultiPoly>, zeros: Vec<Vec<C64>>) -> Result<Self, ResidueError> {
        let mut sys = Self::new(equations)?;
        for (idx, z) in zeros.iter().enumerate() {
            if z.len() != sys.dim() {
                return Err(ResidueError::Invalid(format!("zero {idx} has the wrong length")));
            }
            let res = sys.residual(z);
            if res > SUPPLIED_RESIDUAL {
                return Err(ResidueError::Invalid(format!(
                    "zero {idx} has residual {res:.3e}"
                )));
            }
            if sys.jacobian_det(z).norm() <= MIN_JACOBIAN {
                return Err(ResidueError::Invalid(format!("zero {idx} is not simple")));
            }
        }
        sys.zeros = Some(zeros);
        Ok(sys)
    }

    pub fn dim(&self) -> usize {
        self.equations.len()
    }

    pub fn equations(&self) -> &[MultiPoly] {
        &self.equations
    }

    pub fn zeros(&self) -> Option<&[Vec<C64>]> {
        self.zeros.as_deref()
    }

    fn residual(&self, x: &[C64]) -> f64 {
        self.equations
            .iter()
            .map(|e| e.eval_unchecked(x).norm())
            .fold(0.0, f64::max)
    }

    fn jacobian(&self, x: &[C64]) -> DMatrix<C64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |r, c| {
            self.equations[r]
                .diff(c)
                .map(|d| d.eval_unchecked(x))
                .unwrap_or_default()
        })
    }

    /// Jacobian determinant at `x`.
    pub fn jacobian_det(&self, x: &[C64]) -> C64 {
        self.jacobian(x).determinant()
    }

    fn newton_polish(&self, x: &[C64]) -> Vec<C64> {
        let mut x = x.to_vec();
        for _ in 0..20 {
            let f = nalgebra::DVector::from_iterator(self.dim(), self.equations.iter().map(|e| e.eval_unchecked(&x)));
            let Some(dx) = self.jacobian(&x).lu().solve(&f) else {
                break;
            };
            let step = dx.iter().map(|z| z.norm()).fold(0.0, f64::max);
            for (xi, d) in x.iter_mut().zip(dx.iter()) {
                *xi -= d;
            }
            if step < 1e-15 * (1.0 + x.iter().map(|z| z.norm()).fold(0.0, f64::max)) {
                break;
            }
        }
        x
    }
}

/// Coefficients in `x2` (lowest first) of `p(x1, x2)` at fixed `x1`.
fn coefficients_in_x2(p: &MultiPoly, x1: C64, deg: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); deg + 1];
    for (e, c) in p.terms() {
        out[e[1] as usize] += c * x1.powu(e[0]);
    }
    out
}

/// Resultant of two univariate polynomials of formal degrees `len − 1`,
/// as the Sylvester determinant.
fn sylvester(a: &[C64], b: &[C64]) -> C64 {
    let (m, k) = (a.len() - 1, b.len() - 1);
    let size = m + k;
    if size == 0 {
        return C64::new(1.0, 0.0);
    }
    let mut s = DMatrix::<C64>::zeros(size, size);
    for r in 0..k {
        for (j, c) in a.iter().rev().enumerate() {
            s[(r, r + j)] = *c;
        }
    }
    for r in 0..m {
        for (j, c) in b.iter().rev().enumerate() {
            s[(k + r, r + j)] = *c;
        }
    }
    s.determinant()
}

fn dedup(points: Vec<Vec<C64>>) -> Vec<Vec<C64>> {
    let mut out: Vec<Vec<C64>> = Vec::new();
    for p in points {
        let scale = 1.0 + p.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let dup = out.iter().any(|q| {
            p.iter().zip(q).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) < 1e-8 * scale
        });
        if !dup {
            out.push(p);
        }
    }
    out
}

fn is_torus(z: &[C64]) -> bool {
    z.iter().all(|c| c.norm() > TORUS_EPS)
}

fn solve_one(f: &MultiPoly) -> Vec<Vec<C64>> {
    let deg = f.degree_in(0).unwrap_or(0) as usize;
    let mut coeffs = vec![C64::new(0.0, 0.0); deg + 1];
    for (e, c) in f.terms() {
        coeffs[e[0] as usize] += c;
    }
    univariate_roots(&coeffs).into_iter().map(|z| vec![z]).collect()
}

fn solve_two(sys: &SquareSystem) -> Result<Vec<Vec<C64>>, ResidueError> {
    let (f1, f2) = (&sys.equations[0], &sys.equations[1]);
    let m1 = f1.degree_in(1).unwrap_or(0) as usize;
    let m2 = f2.degree_in(1).unwrap_or(0) as usize;
    if m1 == 0 && m2 == 0 {
        return Err(ResidueError::GenericityFailure("neither equation involves x2".into()));
    }
    let d1 = f1.degree_in(0).unwrap_or(0) as usize;
    let d2 = f2.degree_in(0).unwrap_or(0) as usize;
    let bound = m2 * d1 + m1 * d2;
    // resultant in x1 from its values at roots of unity
    let samples = bound + 1;
    let omega = |j: usize| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / samples as f64);
    let values: Vec<C64> = (0..samples)
        .map(|j| {
            let x1 = omega(j);
            sylvester(&coefficients_in_x2(f1, x1, m1), &coefficients_in_x2(f2, x1, m2))
        })
        .collect();
    let mut res: Vec<C64> = (0..samples)
        .map(|r| {
            values
                .iter()
                .enumerate()
                .map(|(j, v)| v * omega(j * r % samples).conj())
                .sum::<C64>()
                / samples as f64
        })
        .collect();
    let max = res.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if max < 1e-14 {
        return Err(ResidueError::GenericityFailure("resultant vanishes identically".into()));
    }
    while res.last().is_some_and(|c| c.norm() < 1e-9 * max) {
        res.pop();
    }
    let (fa, fb, ma) = if m1 > 0 && (m1 <= m2 || m2 == 0) {
        (f1, f2, m1)
    } else {
        (f2, f1, m2)
    };
    let mut found = Vec::new();
    for x1 in univariate_roots(&res) {
        for x2 in univariate_roots(&coefficients_in_x2(fa, x1, ma)) {
            let p = [x1, x2];
            let tol = 1e-6 * (1.0 + fb.abs_eval(&p));
            if fb.eval_unchecked(&p).norm() > tol {
                continue;
            }
            found.push(sys.newton_polish(&p));
        }
    }
    Ok(dedup(found))
}

/// Common zeros of a square system.
///
/// Supplied zeros are returned as given. Otherwise `n = 1` uses companion
/// roots and `n = 2` eliminates `x2` by the Sylvester resultant, finds its
/// roots, back-substitutes and polishes by Newton's method. The number of
/// zeros in the torus must equal the mixed volume of the Newton polytopes.
pub fn solve_square(sys: &SquareSystem) -> Result<Vec<Vec<C64>>, ResidueError> {
    if let Some(z) = &sys.zeros {
        return Ok(z.clone());
    }
    let zeros = match sys.dim() {
        1 => solve_one(&sys.equations[0]),
        2 => solve_two(sys)?,
        n => return Err(ResidueError::UnsupportedDimension(n)),
    };
    for (idx, z) in zeros.iter().enumerate() {
        let res = sys.residual(z);
        let scale = sys
            .equations
            .iter()
            .map(|e| e.abs_eval(z))
            .fold(1.0, f64::max);
        if res > ZERO_RESIDUAL * scale {
            return Err(ResidueError::GenericityFailure(format!(
                "zero {idx} polishes only to residual {res:.3e}"
            )));
        }
        if sys.jacobian_det(z).norm() <= MIN_JACOBIAN {
            return Err(ResidueError::GenericityFailure(format!("zero {idx} is not simple")));
        }
    }
    let polys = sys
        .equations
        .iter()
        .map(newton_polytope)
        .collect::<Result<Vec<_>, _>>()?;
    let expected = mixed_volume(&polys)? as usize;
    let torus = zeros.iter().filter(|z| is_torus(z)).count();
    if torus != expected {
        return Err(ResidueError::GenericityFailure(format!(
            "found {torus} torus zeros, the mixed volume is {expected}"
        )));
    }
    Ok(zeros)
}

/// `Σ_ζ h(ζ)/J(ζ)` over the zeros, or `Σ_ζ h(ζ)/(ζ_1⋯ζ_n J(ζ))` in toric form.
pub fn residue_sum(h: &MultiPoly, sys: &SquareSystem, toric_form: bool) -> Result<C64, ResidueError> {
    if h.num_vars() != sys.dim() {
        return Err(ResidueError::Invalid("numerator has the wrong number of variables".into()));
    }
    let zeros = solve_square(sys)?;
    let mut total = C64::new(0.0, 0.0);
    for (index, z) in zeros.iter().enumerate() {
        let j = sys.jacobian_det(z);
        if j.norm() <= MIN_JACOBIAN {
            return Err(ResidueError::ZeroJacobian { index });
        }
        let mut denom = j;
        if toric_form {
            if !is_torus(z) {
                return Err(ResidueError::VanishingCoordinate { index });
            }
            denom *= z.iter().product::<C64>();
        }
        total += h.eval_unchecked(z) / denom;
    }
    Ok(total)
}

/// Sum of the magnitudes of the residue summands, a scale for `residue_sum`.
pub fn residue_scale(h: &MultiPoly, sys: &SquareSystem, toric_form: bool) -> Result<f64, ResidueError> {
    let zeros = solve_square(sys)?;
    Ok(zeros
        .iter()
        .map(|z| {
            let mut d = sys.jacobian_det(z).norm();
            if toric_form {
                d *= z.iter().map(|c| c.norm()).product::<f64>();
            }
            h.abs_eval(z) / d
        })
        .sum())
}

/// True iff `NP(h)` lies in the interior of `NP(f_1) + ⋯ + NP(f_n)`, which
/// forces the toric residue sum to vanish. `false` predicts nothing.
pub fn khovanskii_predict(h: &MultiPoly, fs: &[MultiPoly]) -> Result<bool, ResidueError> {
    if h.is_zero() {
        return Ok(true);
    }
    let mut sum = None;
    for f in fs {
        let np = newton_polytope(f)?;
        sum = Some(match sum {
            None => np,
            Some(s) => minkowski_sum(&s, &np)?,
        });
    }
    let sum = sum.ok_or_else(|| ResidueError::Invalid("no equations".into()))?;
    if !sum.is_full_dimensional() {
        return Err(PolytopeError::NotFullDimensional {
            affine: sum.affine_dim(),
            ambient: sum.ambient_dim(),
        }
        .into());
    }
    Ok(strict_interior_contains(&sum, &newton_polytope(h)?)?)
}

/// Both sides of the residue formula for `∂^l_{a_k0} Tr_V(x_i)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivativeCheck {
    pub residue: C64,
    pub finite_difference: C64,
    pub residual: f64,
}

/// Finite-difference step used by [`trace_derivative_check`].
pub const DERIVATIVE_STEP: f64 = 1e-3;

fn series_det(m: &[Vec<Series>]) -> Series {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let len = m[0][0].len();
    let mut total = Series::zero(len);
    for c in 0..n {
        let minor: Vec<Vec<Series>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(j, _)| *j != c)
                    .map(|(_, s)| s.clone())
                    .collect()
            })
            .collect();
        let term = &m[0][c] * &series_det(&minor);
        total = if c % 2 == 0 { &total + &term } else { &total - &term };
    }
    total
}

/// Local residue at a simple zero `ζ` of `q = (f, a_10 − P_1, …)` of the form
/// `(−1)^l l! x_i·Jac(f, P) dx / (q_1 ⋯ q_{k+1}^{l+1} ⋯ q_n)`.
///
/// Since `q` is locally invertible, the residue is the `t^l` coefficient of
/// `ε·g/det ∂q` along the curve `q(x(t)) = t·e_{k+1}` through `ζ`, where `g`
/// is the numerator. The sign `ε = (−1)^{n−1}` orients the symbol so that
/// `l = 0` gives the trace itself.
fn local_residue(
    q: &[MultiPoly],
    jac_fp: &MultiPoly,
    i: usize,
    k: usize,
    l: usize,
    zero: &[C64],
) -> Result<C64, ResidueError> {
    let n = q.len();
    let len = l + 1;
    let grads: Vec<Vec<MultiPoly>> = q.iter().map(|p| p.gradient()).collect();
    let j0 = DMatrix::from_fn(n, n, |r, c| grads[r][c].eval_unchecked(zero));
    let Some(j0_inv) = j0.try_inverse() else {
        return Err(ResidueError::ZeroJacobian { index: 0 });
    };
    // chord iteration: one more correct order per sweep
    let mut x: Vec<Series> = zero.iter().map(|&z| Series::constant(len, z)).collect();
    for _ in 0..len {
        let mut r: Vec<Series> = q.iter().map(|p| Series::eval_poly(p, &x)).collect();
        r[k + 1] = &r[k + 1] - &Series::variable(len, C64::new(0.0, 0.0));
        for (a, xa) in x.iter_mut().enumerate() {
            let mut corr = Series::zero(len);
            for (b, rb) in r.iter().enumerate() {
                corr = &corr + &rb.scale(j0_inv[(a, b)]);
            }
            *xa = &*xa - &corr;
        }
    }
    let jac_q: Vec<Vec<Series>> = grads
        .iter()
        .map(|row| row.iter().map(|g| Series::eval_poly(g, &x)).collect())
        .collect();
    let det = series_det(&jac_q);
    let inv = det.inv().ok_or(ResidueError::ZeroJacobian { index: 0 })?;
    let g = &x[i] * &Series::eval_poly(jac_fp, &x);
    let ratio = &g * &inv;
    let factorial: f64 = (1..=l).map(|v| v as f64).product();
    let sign = if (l + n - 1).is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(ratio.coeff(l) * (sign * factorial))
}

/// Compares the residue expression for `∂^l_{a_k0} Tr_V(x_i)(a)` with a
/// central finite difference of the sampled trace.
///
/// `f_interp` must vanish on every germ, and the tracked points must be all
/// of `{f_interp = 0} ∩ C_a` near `a`. Orders `l = 0, 1, 2` are supported.
pub fn trace_derivative_check(
    prob: &TraceProblem,
    f_interp: &MultiPoly,
    i: usize,
    k: usize,
    l: usize,
    a: &ParamPoint,
) -> Result<DerivativeCheck, ResidueError> {
    let n = prob.dim();
    if i >= n || k + 1 >= n || l > 2 || f_interp.num_vars() != n {
        return Err(ResidueError::Invalid(format!(
            "unsupported request: coordinate {i}, equation {k}, order {l}"
        )));
    }
    let fam = prob.family();
    let mut q = vec![f_interp.clone()];
    let mut ps = Vec::with_capacity(n - 1);
    for kk in 0..n - 1 {
        let p = fam.curve_poly(kk, a);
        q.push(&MultiPoly::constant(n, a.constants[kk]) - &p);
        ps.push(p);
    }
    // Jacobian determinant of (f, P_1, …, P_{n−1}) as a polynomial
    let rows: Vec<Vec<MultiPoly>> = std::iter::once(f_interp)
        .chain(ps.iter())
        .map(|p| p.gradient())
        .collect();
    let jac_fp = poly_det(&rows);
    let mut residue = C64::new(0.0, 0.0);
    for z in prob.points_at(a)? {
        residue += local_residue(&q, &jac_fp, i, k, l, &z)?;
    }
    let xi = MultiPoly::var(n, i);
    let h = DERIVATIVE_STEP;
    let at = |d: f64| -> Result<C64, ResidueError> {
        let ak = a.with_constant(k, a.constants[k] + d);
        Ok(trace(prob, &xi, &ak)?)
    };
    let finite_difference = match l {
        0 => at(0.0)?,
        1 => (at(h)? - at(-h)?) / (2.0 * h),
        _ => (at(h)? - at(0.0)? * 2.0 + at(-h)?) / (h * h),
    };
    Ok(DerivativeCheck {
        residue,
        finite_difference,
        residual: (residue - finite_difference).norm(),
    })
}

fn poly_det(m: &[Vec<MultiPoly>]) -> MultiPoly {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut total = MultiPoly::zero(m[0][0].num_vars());
    for c in 0..n {
        let minor: Vec<Vec<MultiPoly>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(j, _)| *j != c)
                    .map(|(_, p)| p.clone())
                    .collect()
            })
            .collect();
        let term = &m[0][c] * &poly_det(&minor);
        total = if c % 2 == 0 { &total + &term } else { &total - &term };
    }
    total
}
