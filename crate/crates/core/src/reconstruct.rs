//! Interpolating hypersurface from trace data, and the class certificate
//! comparing degrees of norms with mixed volumes.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::algebra::{
    fit_poly, monomial_value, monomials_up_to, newton_to_elementary, AlgebraError, GermGraph, LinearForm,
    MultiPoly,
};
use crate::curves::{CurveError, CurveFamily};
use crate::polytope::{mixed_volume, newton_polytope, LatticePolytope, PolytopeError};
use crate::residues::{solve_square, ResidueError, SquareSystem};
use crate::traces::{
    default_grid_radius, degree_in_param, sample_grid, tensor_grid, unscale, Flavor, GridInfo, TraceError,
    TraceProblem, Tolerances,
};

/// Minimum `|⟨u, n_j⟩|` for a unit linear form `u` and germ normals `n_j`.
pub const FORM_THRESHOLD: f64 = 1e-3;
/// Validation points drawn on each germ.
pub const VALIDATION_POINTS: usize = 20;
/// Relative size below which coefficients of the normalized interpolant are
/// dropped before reading its Newton polytope.
pub const SUPPORT_TOLERANCE: f64 = 1e-8;
/// Singular-value ratio that marks a vanishing polynomial on the germ samples.
const NULL_RATIO: f64 = 1e-9;
const RANDOM_SECTIONS: usize = 5;

#[derive(Debug, Error)]
pub enum ReconstructError {
    #[error("no admissible linear form in {attempts} attempts (germ {germ} rejected the last candidate)")]
    NoLinearForm { attempts: usize, germ: usize },
    #[error("fit of e_{l} exceeds tolerance (residual {residual:.3e})")]
    FitResidualExceeded { l: usize, residual: f64 },
    #[error("interpolant does not vanish on the germs (residual {residual:.3e})")]
    ValidationFailed { residual: f64 },
    #[error("Bernstein count {bernstein} differs from the number of germs {expected}")]
    DegreeMismatch { bernstein: u64, expected: usize },
    #[error("invalid class specification: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    Residue(#[from] ResidueError),
    #[error(transparent)]
    Curve(#[from] CurveError),
}

impl ReconstructError {
    /// Pipeline stage that raised the error.
    pub fn stage(&self) -> &'static str {
        match self {
            Self::NoLinearForm { .. } => "choose_linear_form",
            Self::FitResidualExceeded { .. } => "characteristic_poly",
            Self::ValidationFailed { .. } | Self::DegreeMismatch { .. } => "interpolate",
            Self::InvalidSpec(_) => "class_spec",
            Self::Trace(_) => "traces",
            Self::Algebra(_) | Self::Polytope(_) | Self::Residue(_) | Self::Curve(_) => "setup",
        }
    }

    /// Whether the error is a mathematical negative rather than a failure to compute.
    pub fn is_negative(&self) -> bool {
        matches!(
            self,
            Self::FitResidualExceeded { .. }
                | Self::ValidationFailed { .. }
                | Self::DegreeMismatch { .. }
                | Self::Trace(TraceError::NoPolynomialFit { .. })
        )
    }
}

fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    let v: Vec<C64> = (0..n)
        .map(|_| C64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// Index of the first germ whose normal is nearly orthogonal to `u`.
pub fn rejecting_germ(prob: &TraceProblem, u: &LinearForm) -> Option<usize> {
    let scale = u.norm();
    prob.germs().iter().position(|g| {
        let d: C64 = g
            .unit_normal()
            .iter()
            .zip(u.coefficients())
            .map(|(a, b)| a * b)
            .sum();
        d.norm() <= FORM_THRESHOLD * scale
    })
}

/// Random unit linear form `u` with `|∂_u|` of every germ equation bounded away
/// from zero at its base point.
pub fn choose_linear_form(prob: &TraceProblem, attempts: usize, seed: u64) -> Result<LinearForm, ReconstructError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last = 0;
    for _ in 0..attempts {
        let Some(u) = LinearForm::new(random_unit(&mut rng, prob.dim())) else {
            continue;
        };
        match rejecting_germ(prob, &u) {
            None => return Ok(u),
            Some(j) => last = j,
        }
    }
    Err(ReconstructError::NoLinearForm { attempts, germ: last })
}

/// Coefficients of `F_u(Y, a) = Π_j (Y − u(p_j(a)))` as polynomials in the
/// constants `a_0`, with the slopes `a'` frozen at `a⁰`.
///
/// Each `e_l` is stored in the scaled variables `t = (a_0 − a⁰_0)/r`.
#[derive(Clone, Debug, PartialEq)]
pub struct CharPoly {
    pub degree: usize,
    /// `e_1, …, e_N` in the scaled variables.
    pub scaled: Vec<MultiPoly>,
    pub residuals: Vec<f64>,
    pub grid: GridInfo,
}

impl CharPoly {
    /// `e_l` in the absolute variables `a_10, …, a_{n−1,0}`.
    pub fn elementary(&self, l: usize) -> Result<MultiPoly, AlgebraError> {
        unscale(&self.scaled[l - 1], &self.grid.center, self.grid.radius)
    }
}

/// Fits the elementary symmetric functions of `u(p_1(a)), …, u(p_N(a))`,
/// obtained from the traces `Tr(u^l)` by Newton's identities, by polynomials
/// of total degree `≤ l` in `a_0`.
pub fn characteristic_poly(prob: &TraceProblem, u: &LinearForm) -> Result<CharPoly, ReconstructError> {
    let n = prob.dim();
    let big_n = prob.germs().len();
    let m = n - 1;
    let radius = default_grid_radius(prob)?;
    let size = prob.tolerances().grid_size.max(big_n + 2);
    let nodes = tensor_grid(m, size);
    let up = u.to_poly();
    let powers: Vec<MultiPoly> = (1..=big_n as u32).map(|l| up.pow(l)).collect();
    let sums = sample_grid(prob, &powers, &nodes, radius, None, Flavor::Trace)?;
    let mut columns = vec![Vec::with_capacity(nodes.len()); big_n];
    for node in 0..nodes.len() {
        let s: Vec<C64> = sums.iter().map(|col| col[node]).collect();
        for (col, e) in columns.iter_mut().zip(newton_to_elementary(&s)) {
            col.push(e);
        }
    }
    let mut scaled = Vec::with_capacity(big_n);
    let mut residuals = Vec::with_capacity(big_n);
    for (idx, col) in columns.iter().enumerate() {
        let l = idx + 1;
        let scale = col.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let scale = if scale > 0.0 { scale } else { 1.0 };
        let samples: Vec<(Vec<f64>, C64)> = nodes
            .iter()
            .cloned()
            .zip(col.iter().map(|v| v / scale))
            .collect();
        let fit = fit_poly(&samples, l as u32)?;
        if fit.residual >= prob.tolerances().fit {
            return Err(ReconstructError::FitResidualExceeded {
                l,
                residual: fit.residual,
            });
        }
        scaled.push(fit.poly.scale(C64::new(scale, 0.0)));
        residuals.push(fit.residual);
    }
    Ok(CharPoly {
        degree: big_n,
        scaled,
        residuals,
        grid: GridInfo {
            center: prob.base().constants.clone(),
            radius,
            size,
            nodes: nodes.len(),
        },
    })
}

/// `F_u(u(x), P_1(a⁰'_1, x), …, P_{n−1}(a⁰'_{n−1}, x))`.
pub fn substitute(prob: &TraceProblem, u: &LinearForm, cp: &CharPoly) -> Result<MultiPoly, ReconstructError> {
    let n = prob.dim();
    let fam = prob.family();
    let a0 = prob.base();
    let inv_r = C64::new(1.0 / cp.grid.radius, 0.0);
    let ts: Vec<MultiPoly> = (0..n - 1)
        .map(|k| (&fam.curve_poly(k, a0) - &MultiPoly::constant(n, cp.grid.center[k])).scale(inv_r))
        .collect();
    let up = u.to_poly();
    let big_n = cp.degree;
    let mut q = up.pow(big_n as u32);
    for l in 1..=big_n {
        let e = cp.scaled[l - 1].compose(&ts, None)?;
        let term = &e * &up.pow((big_n - l) as u32);
        q = if l % 2 == 1 { &q - &term } else { &q + &term };
    }
    Ok(q)
}

/// Outcome of [`interpolate`].
#[derive(Clone, Debug, PartialEq)]
pub struct InterpolationResult {
    /// Normalized minimal-degree polynomial vanishing on the germs.
    pub q: MultiPoly,
    /// Normalized `F_u(u(x), P(a⁰', x))` before removing extraneous factors.
    pub raw_q: MultiPoly,
    /// Relative least-squares error of `raw_q = q·g`.
    pub cofactor_residual: f64,
    pub u: LinearForm,
    pub char_poly: CharPoly,
    /// Largest `|q|` on the validation points.
    pub germ_residual: f64,
    /// Largest `|raw_q|` on the validation points.
    pub raw_germ_residual: f64,
    pub bernstein_degree: u64,
}

/// Deterministic points on each germ at offsets inside half its radius.
pub fn germ_samples(germs: &[GermGraph], per_germ: usize, seed: u64) -> Result<Vec<Vec<C64>>, AlgebraError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(germs.len() * per_germ);
    for g in germs {
        for _ in 0..per_germ {
            let offset: Vec<C64> = (0..g.dim() - 1)
                .map(|_| {
                    let r = 0.5 * g.radius() * rng.random::<f64>();
                    C64::from_polar(r, std::f64::consts::TAU * rng.random::<f64>())
                })
                .collect();
            out.push(g.eval(&offset)?);
        }
    }
    Ok(out)
}

/// Lowest-degree polynomial (up to scale) vanishing on `points`, searching
/// total degrees `1..=max_degree`.
pub fn vanishing_polynomial(points: &[Vec<C64>], max_degree: u32) -> Option<MultiPoly> {
    let n = points.first()?.len();
    for d in 1..=max_degree {
        let monomials = monomials_up_to(n, d);
        if monomials.len() > points.len() {
            return None;
        }
        let mut a = DMatrix::from_fn(points.len(), monomials.len(), |r, c| monomial_value(&monomials[c], &points[r]));
        let norms: Vec<f64> = a.column_iter().map(|c| c.norm()).collect();
        for (mut col, s) in a.column_iter_mut().zip(&norms) {
            col /= C64::new(*s, 0.0);
        }
        let svd = a.svd(false, true);
        let v_t = svd.v_t.as_ref()?;
        let (imin, smin) = svd
            .singular_values
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc });
        let smax = svd.singular_values.max();
        if smin <= NULL_RATIO * smax {
            let terms = monomials
                .into_iter()
                .enumerate()
                .map(|(c, e)| (e, v_t[(imin, c)].conj() / norms[c]));
            return MultiPoly::from_terms(n, terms).ok().map(|p| p.normalized());
        }
    }
    None
}

/// Least-squares cofactor `g` with `q·g ≈ target`; returns the relative error.
pub fn cofactor_residual(q: &MultiPoly, target: &MultiPoly) -> f64 {
    let n = q.num_vars();
    let (Some(dq), Some(dt)) = (q.total_degree(), target.total_degree()) else {
        return if target.is_zero() { 0.0 } else { 1.0 };
    };
    if dt < dq {
        return 1.0;
    }
    let rows = monomials_up_to(n, dt);
    let index = |e: &Vec<u32>| rows.iter().position(|r| r == e);
    let cols = monomials_up_to(n, dt - dq);
    let mut m = DMatrix::<C64>::zeros(rows.len(), cols.len());
    for (c, mono) in cols.iter().enumerate() {
        let prod = q * &MultiPoly::monomial(mono.clone(), C64::new(1.0, 0.0));
        for (e, v) in prod.terms() {
            if let Some(r) = index(e) {
                m[(r, c)] = *v;
            }
        }
    }
    let b = DVector::from_iterator(rows.len(), rows.iter().map(|e| target.coeff(e)));
    let Ok(g) = m.clone().svd(true, true).solve(&b, 1e-12) else {
        return 1.0;
    };
    (&m * g - &b).norm() / b.norm()
}

fn max_abs_on(q: &MultiPoly, points: &[Vec<C64>]) -> f64 {
    points
        .iter()
        .map(|p| q.eval_unchecked(p).norm())
        .fold(0.0, f64::max)
}

/// Recovers the hypersurface through the germs from trace data alone, with
/// a linear form drawn from `seed`.
pub fn interpolate(prob: &TraceProblem, seed: u64) -> Result<InterpolationResult, ReconstructError> {
    let u = choose_linear_form(prob, 64, seed)?;
    interpolate_with(prob, u, seed)
}

/// [`interpolate`] with a given linear form.
///
/// `F_u(u(x), P(a⁰', x))` vanishes on the germs but may carry extra factors
/// depending on `u` and `a'`; the reported `q` is the lowest-degree
/// polynomial vanishing on germ samples, which must divide it.
pub fn interpolate_with(prob: &TraceProblem, u: LinearForm, seed: u64) -> Result<InterpolationResult, ReconstructError> {
    if u.coefficients().len() != prob.dim() {
        return Err(AlgebraError::DimensionMismatch {
            expected: prob.dim(),
            found: u.coefficients().len(),
        }
        .into());
    }
    let cp = characteristic_poly(prob, &u)?;
    let raw = substitute(prob, &u, &cp)?.normalized();
    let validation = germ_samples(prob.germs(), VALIDATION_POINTS, seed ^ 0x5eed)?;
    let raw_germ_residual = max_abs_on(&raw, &validation);
    let max_degree = raw.total_degree().unwrap_or(0);
    let per_germ = (2 * monomials_up_to(prob.dim(), max_degree).len()).div_ceil(prob.germs().len()).max(VALIDATION_POINTS);
    let fit_points = germ_samples(prob.germs(), per_germ, seed)?;
    let q = vanishing_polynomial(&fit_points, max_degree)
        .ok_or(ReconstructError::ValidationFailed { residual: raw_germ_residual })?;
    let germ_residual = max_abs_on(&q, &validation);
    let tol = prob.tolerances().validation;
    if germ_residual >= tol || raw_germ_residual >= tol {
        return Err(ReconstructError::ValidationFailed {
            residual: germ_residual.max(raw_germ_residual),
        });
    }
    // q comes from germ samples; it must divide the trace-built polynomial
    let cofactor = cofactor_residual(&q, &raw);
    if cofactor >= tol {
        return Err(ReconstructError::ValidationFailed { residual: cofactor });
    }
    let bernstein = bernstein_degree(prob.family(), &q)?;
    if bernstein != prob.germs().len() as u64 {
        return Err(ReconstructError::DegreeMismatch {
            bernstein,
            expected: prob.germs().len(),
        });
    }
    Ok(InterpolationResult {
        q,
        raw_q: raw,
        cofactor_residual: cofactor,
        u,
        char_poly: cp,
        germ_residual,
        raw_germ_residual,
        bernstein_degree: bernstein,
    })
}

/// `MV(NP(q), P_{L_1}, …, P_{L_{n−1}})` after dropping negligible coefficients.
pub fn bernstein_degree(fam: &CurveFamily, q: &MultiPoly) -> Result<u64, ReconstructError> {
    let support = q.normalized().pruned(SUPPORT_TOLERANCE);
    let mut polys = vec![newton_polytope(&support)?];
    for k in 0..fam.dim() - 1 {
        polys.push(fam.bundle_polytope(k)?);
    }
    Ok(mixed_volume(&polys)?)
}

/// A divisor `E_j` given by its polytope and a section `f_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct DivisorSpec {
    pub polytope: LatticePolytope,
    pub section: MultiPoly,
}

/// Candidate class `α` and the data needed to test it.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassSpec {
    alpha: LatticePolytope,
    divisors: Vec<DivisorSpec>,
    bundles: Vec<LatticePolytope>,
}

impl ClassSpec {
    /// `bundles` holds `P_{L_2}, …, P_{L_{n−1}}`.
    pub fn new(
        alpha: LatticePolytope,
        divisors: Vec<DivisorSpec>,
        bundles: Vec<LatticePolytope>,
    ) -> Result<Self, ReconstructError> {
        let n = alpha.ambient_dim();
        if divisors.is_empty() {
            return Err(ReconstructError::InvalidSpec("no divisors".into()));
        }
        if bundles.len() + 2 != n {
            return Err(ReconstructError::InvalidSpec(format!(
                "expected {} bundle polytopes, found {}",
                n.saturating_sub(2),
                bundles.len()
            )));
        }
        if bundles.iter().any(|b| b.ambient_dim() != n) {
            return Err(ReconstructError::InvalidSpec("bundle polytope dimension differs".into()));
        }
        for (j, d) in divisors.iter().enumerate() {
            if d.polytope.ambient_dim() != n || d.section.num_vars() != n {
                return Err(ReconstructError::InvalidSpec(format!("divisor {j} has the wrong dimension")));
            }
            if d.section.is_zero() {
                return Err(ReconstructError::InvalidSpec(format!("section of divisor {j} is zero")));
            }
            if !d.polytope.contains_polytope(&newton_polytope(&d.section)?)? {
                return Err(ReconstructError::InvalidSpec(format!(
                    "Newton polytope of section {j} is not inside its divisor polytope"
                )));
            }
        }
        Ok(Self {
            alpha,
            divisors,
            bundles,
        })
    }

    pub fn alpha(&self) -> &LatticePolytope {
        &self.alpha
    }

    pub fn divisors(&self) -> &[DivisorSpec] {
        &self.divisors
    }

    pub fn bundles(&self) -> &[LatticePolytope] {
        &self.bundles
    }
}

/// Observed and predicted `a_10`-degree of the norm of one section.
#[derive(Clone, Debug, PartialEq)]
pub struct DivisorRow {
    pub observed: u32,
    pub predicted: u64,
    /// Random sections tried after the given one fell short.
    pub retries: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassReport {
    pub rows: Vec<DivisorRow>,
}

impl ClassReport {
    pub fn positive(&self) -> bool {
        self.rows.iter().all(|r| r.observed as u64 == r.predicted)
    }
}

fn random_section(polytope: &LatticePolytope, rng: &mut ChaCha8Rng) -> Result<MultiPoly, ReconstructError> {
    let n = polytope.ambient_dim();
    let pts = polytope.lattice_points(false)?;
    let terms = pts.into_iter().filter(|p| p.iter().all(|&v| v >= 0)).map(|p| {
        let e: Vec<u32> = p.iter().map(|&v| v as u32).collect();
        (e, C64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0))
    });
    Ok(MultiPoly::from_terms(n, terms)?)
}

/// Compares `deg_{a_10} N_V(f_j)` with `MV(P_α, P_{E_j}, P_{L_2}, …)` for
/// every divisor. When the observed degree falls short, up to five random
/// sections with support in `P_{E_j}` are tried and the largest degree kept.
pub fn class_certificate(
    prob: &TraceProblem,
    result: &InterpolationResult,
    spec: &ClassSpec,
    seed: u64,
) -> Result<ClassReport, ReconstructError> {
    let n = prob.dim();
    if spec.alpha.ambient_dim() != n || result.q.num_vars() != n {
        return Err(ReconstructError::InvalidSpec(format!(
            "class data has dimension {}, problem has {n}",
            spec.alpha.ambient_dim()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(spec.divisors.len());
    for d in &spec.divisors {
        let mut polys = vec![spec.alpha.clone(), d.polytope.clone()];
        polys.extend(spec.bundles.iter().cloned());
        let predicted = mixed_volume(&polys)?;
        let probe = prob
            .tolerances()
            .max_probe_degree
            .max(predicted as u32 + 2);
        let mut observed = degree_in_param(prob, &d.section, 0, probe, Flavor::Norm)?.degree;
        let mut retries = 0;
        while (observed as u64) < predicted && retries < RANDOM_SECTIONS {
            retries += 1;
            let f = random_section(&d.polytope, &mut rng)?;
            if f.is_zero() {
                continue;
            }
            let deg = degree_in_param(prob, &f, 0, probe, Flavor::Norm)?.degree;
            observed = observed.max(deg);
        }
        rows.push(DivisorRow {
            observed,
            predicted,
            retries,
        });
    }
    Ok(ClassReport { rows })
}

/// Index of the coordinate with the largest `|∂f/∂x_i|` at `p`.
fn best_graph_coordinate(f: &MultiPoly, p: &[C64]) -> usize {
    (0..p.len())
        .map(|i| (i, f.diff(i).map(|d| d.eval_unchecked(p).norm()).unwrap_or(0.0)))
        .fold((0, -1.0), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc })
        .0
}

/// Germs of `{f = 0}` at the given points, each written over the coordinates
/// complementary to the one with the largest partial derivative.
pub fn germs_at_points(f: &MultiPoly, points: &[Vec<C64>], order: u32) -> Result<Vec<GermGraph>, ReconstructError> {
    points
        .iter()
        .map(|p| Ok(GermGraph::from_implicit(f, p, best_graph_coordinate(f, p), order, None)?))
        .collect()
}

/// Germs of the plane curve `{f = 0}` at all its affine intersection points
/// with the base curve of `fam`.
pub fn germs_from_polynomial(f: &MultiPoly, fam: &CurveFamily, order: u32) -> Result<Vec<GermGraph>, ReconstructError> {
    if fam.dim() != 2 || f.num_vars() != 2 {
        return Err(ResidueError::UnsupportedDimension(fam.dim()).into());
    }
    let a0 = fam.base();
    let curve = &MultiPoly::constant(2, a0.constants[0]) - &fam.curve_poly(0, a0);
    let zeros = solve_square(&SquareSystem::new(vec![f.clone(), curve])?)?;
    germs_at_points(f, &zeros, order)
}

/// Trace problem for the curve `{f = 0}` cut by `fam`.
pub fn problem_from_polynomial(
    f: &MultiPoly,
    fam: &CurveFamily,
    order: u32,
    tol: Tolerances,
) -> Result<TraceProblem, ReconstructError> {
    let germs = germs_from_polynomial(f, fam, order)?;
    Ok(TraceProblem::new(fam.clone(), germs, tol)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn vanishing_polynomial_finds_a_line() {
        let pts: Vec<Vec<C64>> = (0..6).map(|i| vec![c(i as f64 * 0.1), c(1.0 - 2.0 * i as f64 * 0.1)]).collect();
        let q = vanishing_polynomial(&pts, 3).unwrap();
        let line = MultiPoly::from_real_terms(2, &[(&[1, 0], 2.0), (&[0, 1], 1.0), (&[0, 0], -1.0)]).unwrap();
        assert!(q.projective_distance(&line) < 1e-10);
    }

    #[test]
    fn cofactor_of_a_product() {
        let a = MultiPoly::from_real_terms(2, &[(&[1, 1], 1.0), (&[0, 0], -1.0)]).unwrap();
        let b = MultiPoly::from_real_terms(2, &[(&[1, 0], 0.3), (&[0, 0], 2.0)]).unwrap();
        assert!(cofactor_residual(&a, &(&a * &b)) < 1e-12);
        assert!(cofactor_residual(&b, &a) > 0.1);
    }

    #[test]
    fn zero_attempts_fail() {
        let fam = CurveFamily::new(
            2,
            vec![vec![vec![1, 0], vec![0, 1]]],
            crate::curves::ParamPoint::new(vec![c(-0.5)], vec![vec![c(1.0), c(-0.3)]]),
        )
        .unwrap();
        let germ = GermGraph::new(vec![c(1.0), c(5.0)], 1, MultiPoly::constant(1, c(5.0)), 4, 5.0).unwrap();
        let prob = TraceProblem::new(fam, vec![germ], Tolerances::default()).unwrap();
        assert!(matches!(
            choose_linear_form(&prob, 0, 1),
            Err(ReconstructError::NoLinearForm { attempts: 0, .. })
        ));
        let e1 = LinearForm::new(vec![c(1.0), c(0.0)]).unwrap();
        assert_eq!(rejecting_germ(&prob, &e1), Some(0));
        let e2 = LinearForm::new(vec![c(0.0), c(1.0)]).unwrap();
        assert_eq!(rejecting_germ(&prob, &e2), None);
    }
}
