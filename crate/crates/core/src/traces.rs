//! Traces and norms of polynomials over the moving intersection points, and
//! the shape tests run on them.

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::algebra::{fit_poly, AlgebraError, GermGraph, MultiPoly};
use crate::curves::{
    on_curve_check, track_point, transversality_check, CurveError, CurveFamily, ParamPoint,
    TrackError, TrackOptions,
};
use crate::polytope::{newton_polytope, PolytopeError};

/// Tolerance profile shared by the trace, reconstruction and class tests.
#[derive(Clone, Debug, PartialEq)]
pub struct Tolerances {
    /// Maximum fit residual on unit-scaled samples.
    pub fit: f64,
    /// Minimum `|det J|` at tracked points.
    pub transversality: f64,
    /// Continuation waypoints per path.
    pub steps: usize,
    /// Grid points per `a_k0` axis.
    pub grid_size: usize,
    /// Grid half-width; `None` probes the tracking radius.
    pub grid_radius: Option<f64>,
    /// Upper bound of the tracking-radius probe.
    pub probe_cap: f64,
    /// Largest degree tried when reading off a degree in one parameter.
    pub max_probe_degree: u32,
    /// Maximum `|Q|` on validation points of the germs.
    pub validation: f64,
}

/// Relative distance below which tracked points of two germs coincide.
const COLLISION: f64 = 1e-6;

fn max_dist(p: &[C64], q: &[C64]) -> f64 {
    p.iter().zip(q).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn norm_inf(p: &[C64]) -> f64 {
    p.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            fit: 1e-7,
            transversality: 1e-8,
            steps: 10,
            grid_size: 5,
            grid_radius: None,
            probe_cap: 1.0,
            max_probe_degree: 4,
            validation: 1e-6,
        }
    }
}

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("invalid trace problem: {0}")]
    Invalid(String),
    #[error("tracking germ {germ} failed: {source}")]
    Track {
        germ: usize,
        #[source]
        source: TrackError,
    },
    #[error("tracked points of germs {0} and {1} collide")]
    Collision(usize, usize),
    #[error("grid node {node} failed: {source}")]
    GridNode {
        node: usize,
        #[source]
        source: Box<TraceError>,
    },
    #[error("no polynomial of degree ≤ {max_degree} fits (best residual {residual:.3e})")]
    NoPolynomialFit { max_degree: u32, residual: f64 },
    #[error("the sampled function vanishes identically")]
    IdenticallyZero,
    #[error("tracking fails at every probed radius")]
    NoTrackingRadius,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
}

/// Sum or product over the intersection points.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flavor {
    Trace,
    Norm,
}

/// Germs `V_1, …, V_N` cut by the family `C_a`, with the base parameter `a⁰`
/// stored in the family.
#[derive(Clone, Debug)]
pub struct TraceProblem {
    fam: CurveFamily,
    germs: Vec<GermGraph>,
    tol: Tolerances,
}

impl TraceProblem {
    /// Checks that every base point lies on `C_{a⁰}`, meets it transversally,
    /// and that the base points are pairwise distinct.
    pub fn new(fam: CurveFamily, germs: Vec<GermGraph>, tol: Tolerances) -> Result<Self, TraceError> {
        if germs.is_empty() {
            return Err(TraceError::Invalid("no germs".into()));
        }
        let a0 = fam.base();
        for (j, g) in germs.iter().enumerate() {
            if g.dim() != fam.dim() {
                return Err(TraceError::Invalid(format!(
                    "germ {j} has dimension {}, family has {}",
                    g.dim(),
                    fam.dim()
                )));
            }
            if !on_curve_check(&fam, a0, &[g.base_point().to_vec()], 1e-8) {
                return Err(TraceError::Invalid(format!(
                    "on_curve: base point of germ {j} is not on the base curve"
                )));
            }
            let det = transversality_check(g, &fam, a0, g.base_point())?;
            if det <= tol.transversality {
                return Err(TraceError::Invalid(format!(
                    "transversality: germ {j} meets the base curve with |det J| = {det:.3e}"
                )));
            }
            for (i, h) in germs[..j].iter().enumerate() {
                if max_dist(g.base_point(), h.base_point()) < 1e-8 {
                    return Err(TraceError::Invalid(format!(
                        "distinct: germs {i} and {j} share a base point"
                    )));
                }
            }
        }
        Ok(Self { fam, germs, tol })
    }

    pub fn family(&self) -> &CurveFamily {
        &self.fam
    }

    pub fn germs(&self) -> &[GermGraph] {
        &self.germs
    }

    pub fn base(&self) -> &ParamPoint {
        self.fam.base()
    }

    pub fn dim(&self) -> usize {
        self.fam.dim()
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    pub fn with_tolerances(&self, tol: Tolerances) -> Self {
        Self {
            fam: self.fam.clone(),
            germs: self.germs.clone(),
            tol,
        }
    }

    fn track_options(&self) -> TrackOptions {
        TrackOptions {
            steps: self.tol.steps,
            transversality_threshold: self.tol.transversality,
        }
    }

    /// `p_j(a)` for every germ, tracked from the base points.
    pub fn points_at(&self, a: &ParamPoint) -> Result<Vec<Vec<C64>>, TraceError> {
        let opts = self.track_options();
        let pts = self
            .germs
            .iter()
            .enumerate()
            .map(|(j, g)| {
                track_point(g, &self.fam, self.base(), g.base_point(), a, opts)
                    .map_err(|source| TraceError::Track { germ: j, source })
            })
            .collect::<Result<Vec<_>, _>>()?;
        // a real path can run through a branch point where two sheets merge;
        // the tracked points then coincide and the trace is wrong
        for j in 1..pts.len() {
            for i in 0..j {
                if max_dist(&pts[i], &pts[j]) < COLLISION * (1.0 + norm_inf(&pts[j])) {
                    return Err(TraceError::Collision(i, j));
                }
            }
        }
        Ok(pts)
    }

    /// Traces or norms of several polynomials from one set of tracked points.
    pub fn evaluate(&self, fs: &[MultiPoly], a: &ParamPoint, flavor: Flavor) -> Result<Vec<C64>, TraceError> {
        for f in fs {
            if f.num_vars() != self.dim() {
                return Err(AlgebraError::DimensionMismatch {
                    expected: self.dim(),
                    found: f.num_vars(),
                }
                .into());
            }
        }
        let pts = self.points_at(a)?;
        Ok(fs.iter().map(|f| combine(f, &pts, flavor)).collect())
    }

    /// Parameter `a⁰` with the constants shifted by `offset`.
    pub fn shifted(&self, offset: &[f64]) -> ParamPoint {
        let mut a = self.base().clone();
        for (c, o) in a.constants.iter_mut().zip(offset) {
            *c += o;
        }
        a
    }
}

fn combine(f: &MultiPoly, pts: &[Vec<C64>], flavor: Flavor) -> C64 {
    let vals = pts.iter().map(|p| f.eval_unchecked(p));
    match flavor {
        Flavor::Trace => vals.sum(),
        Flavor::Norm => vals.product(),
    }
}

/// `Tr_V(f)(a) = Σ_j f(p_j(a))`.
pub fn trace(prob: &TraceProblem, f: &MultiPoly, a: &ParamPoint) -> Result<C64, TraceError> {
    Ok(prob.evaluate(std::slice::from_ref(f), a, Flavor::Trace)?[0])
}

/// `N_V(f)(a) = Π_j f(p_j(a))`.
pub fn norm(prob: &TraceProblem, f: &MultiPoly, a: &ParamPoint) -> Result<C64, TraceError> {
    Ok(prob.evaluate(std::slice::from_ref(f), a, Flavor::Norm)?[0])
}

/// Largest radius `r ≤ cap` (to bisection accuracy) such that every germ can
/// be tracked to each of the given directions scaled by `r`.
pub fn probe_radius(prob: &TraceProblem, directions: &[Vec<f64>], cap: f64) -> Result<f64, TraceError> {
    let ok = |r: f64| {
        directions.iter().all(|d| {
            let off: Vec<f64> = d.iter().map(|v| v * r).collect();
            prob.points_at(&prob.shifted(&off)).is_ok()
        })
    };
    if ok(cap) {
        return Ok(cap);
    }
    let (mut lo, mut hi) = (0.0, cap);
    for _ in 0..14 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if lo == 0.0 {
        return Err(TraceError::NoTrackingRadius);
    }
    Ok(lo)
}

fn corners(m: usize) -> Vec<Vec<f64>> {
    (0..1usize << m)
        .map(|mask| {
            (0..m)
                .map(|k| if mask >> k & 1 == 1 { 1.0 } else { -1.0 })
                .collect()
        })
        .collect()
}

/// Default grid half-width: a quarter of the probed tracking radius over the
/// corners of the `a_0` box.
pub fn default_grid_radius(prob: &TraceProblem) -> Result<f64, TraceError> {
    if let Some(r) = prob.tol.grid_radius {
        return Ok(r);
    }
    Ok(0.25 * probe_radius(prob, &corners(prob.dim() - 1), prob.tol.probe_cap)?)
}

/// Nine tenths of the probed tracking radius along the `a_k0` axis. The
/// nodes lie on the probed segments, and a wide window keeps high-degree
/// terms visible above the fit tolerance.
fn axis_radius(prob: &TraceProblem, k: usize) -> Result<f64, TraceError> {
    if let Some(r) = prob.tol.grid_radius {
        return Ok(r);
    }
    let m = prob.dim() - 1;
    let mut plus = vec![0.0; m];
    plus[k] = 1.0;
    let minus: Vec<f64> = plus.iter().map(|v| -v).collect();
    Ok(0.9 * probe_radius(prob, &[plus, minus], prob.tol.probe_cap)?)
}

fn linspace(size: usize) -> Vec<f64> {
    if size == 1 {
        return vec![0.0];
    }
    (0..size)
        .map(|i| -1.0 + 2.0 * i as f64 / (size - 1) as f64)
        .collect()
}

/// Tensor grid in `m` scaled variables, `size` points per axis on `[−1, 1]`.
pub fn tensor_grid(m: usize, size: usize) -> Vec<Vec<f64>> {
    let axis = linspace(size);
    let mut nodes = vec![Vec::new()];
    for _ in 0..m {
        nodes = nodes
            .into_iter()
            .flat_map(|n| {
                axis.iter().map(move |&t| {
                    let mut v = n.clone();
                    v.push(t);
                    v
                })
            })
            .collect();
    }
    nodes
}

/// Where a grid sits in `a_0` space.
#[derive(Clone, Debug, PartialEq)]
pub struct GridInfo {
    pub center: Vec<C64>,
    pub radius: f64,
    pub size: usize,
    pub nodes: usize,
}

/// Samples `fs` at `a⁰_0 + radius·t` for every node `t` of a tensor grid.
/// Returns one column of values per polynomial.
pub fn sample_grid(
    prob: &TraceProblem,
    fs: &[MultiPoly],
    nodes: &[Vec<f64>],
    radius: f64,
    axes: Option<usize>,
    flavor: Flavor,
) -> Result<Vec<Vec<C64>>, TraceError> {
    let m = prob.dim() - 1;
    let mut cols = vec![Vec::with_capacity(nodes.len()); fs.len()];
    for (idx, t) in nodes.iter().enumerate() {
        let offset: Vec<f64> = match axes {
            Some(k) => {
                let mut o = vec![0.0; m];
                o[k] = radius * t[0];
                o
            }
            None => t.iter().map(|v| v * radius).collect(),
        };
        let vals = prob
            .evaluate(fs, &prob.shifted(&offset), flavor)
            .map_err(|e| TraceError::GridNode {
                node: idx,
                source: Box::new(e),
            })?;
        for (col, v) in cols.iter_mut().zip(vals) {
            col.push(v);
        }
    }
    Ok(cols)
}

/// Outcome of fitting sampled traces by low-degree polynomials in `a_0`.
#[derive(Clone, Debug, PartialEq)]
pub struct FitVerdict {
    pub is_within_degree: bool,
    /// Fitted polynomial in the absolute `a_0` variables.
    pub fit: MultiPoly,
    /// Maximum error on unit-scaled samples.
    pub residual: f64,
    pub grid: GridInfo,
}

/// Result of [`affineness_test`]: one verdict per polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct AffinenessReport {
    pub verdicts: Vec<FitVerdict>,
}

impl AffinenessReport {
    pub fn positive(&self) -> bool {
        self.verdicts.iter().all(|v| v.is_within_degree)
    }

    pub fn max_residual(&self) -> f64 {
        self.verdicts.iter().map(|v| v.residual).fold(0.0, f64::max)
    }
}

fn unit_scale(values: &[C64]) -> f64 {
    let s = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if s > 0.0 {
        s
    } else {
        1.0
    }
}

/// Substitutes `t_k = (a_k − c_k)/r` into a polynomial in `t`.
pub(crate) fn unscale(p: &MultiPoly, center: &[C64], radius: f64) -> Result<MultiPoly, AlgebraError> {
    let m = center.len();
    let subs: Vec<MultiPoly> = (0..m)
        .map(|k| (&MultiPoly::var(m, k) - &MultiPoly::constant(m, center[k])).scale(C64::new(1.0 / radius, 0.0)))
        .collect();
    p.compose(&subs, None)
}

/// Fits each trace `Tr_V(f)` by a polynomial of total degree 1 in the
/// constants `a_0`, on a grid centred at `a⁰_0` with the other parameters
/// frozen.
pub fn affineness_test(
    prob: &TraceProblem,
    fs: &[MultiPoly],
    grid_radius: f64,
    grid_size: usize,
) -> Result<AffinenessReport, TraceError> {
    let m = prob.dim() - 1;
    let nodes = tensor_grid(m, grid_size.max(2));
    let cols = sample_grid(prob, fs, &nodes, grid_radius, None, Flavor::Trace)?;
    let center = prob.base().constants.clone();
    let grid = GridInfo {
        center: center.clone(),
        radius: grid_radius,
        size: grid_size.max(2),
        nodes: nodes.len(),
    };
    let mut verdicts = Vec::with_capacity(fs.len());
    for col in cols {
        let scale = unit_scale(&col);
        let samples: Vec<(Vec<f64>, C64)> = nodes
            .iter()
            .cloned()
            .zip(col.iter().map(|v| v / scale))
            .collect();
        let fit = fit_poly(&samples, 1)?;
        let poly = unscale(&fit.poly.scale(C64::new(scale, 0.0)), &center, grid_radius)?;
        verdicts.push(FitVerdict {
            is_within_degree: fit.residual < prob.tol.fit,
            fit: poly,
            residual: fit.residual,
            grid: grid.clone(),
        });
    }
    Ok(AffinenessReport { verdicts })
}

/// [`affineness_test`] on all coordinates `x_1, …, x_n` with the default grid.
pub fn coordinate_affineness(prob: &TraceProblem) -> Result<AffinenessReport, TraceError> {
    let n = prob.dim();
    let fs: Vec<MultiPoly> = (0..n).map(|i| MultiPoly::var(n, i)).collect();
    let r = default_grid_radius(prob)?;
    affineness_test(prob, &fs, r, prob.tol.grid_size)
}

/// Degree of a sampled function in one constant `a_k0`.
#[derive(Clone, Debug, PartialEq)]
pub struct DegreeReport {
    pub degree: u32,
    /// Leading coefficient after unit scaling, in the scaled variable.
    pub leading: f64,
    pub residual: f64,
    /// Fitted univariate polynomial in `a_k0`.
    pub fit: MultiPoly,
}

/// Least degree `d ≤ max_probe_degree` such that the trace or norm of `f`,
/// as a function of `a_k0` alone, is fitted to tolerance by a polynomial of
/// degree `d`. The reported degree is that of the fit after dropping
/// coefficients under the fit tolerance, so it is attained exactly.
pub fn degree_in_param(
    prob: &TraceProblem,
    f: &MultiPoly,
    k: usize,
    max_probe_degree: u32,
    flavor: Flavor,
) -> Result<DegreeReport, TraceError> {
    if k + 1 >= prob.dim() {
        return Err(TraceError::Invalid(format!("parameter index {k} out of range")));
    }
    let radius = axis_radius(prob, k)?;
    let size = ((max_probe_degree + 3) as usize).max(2 * max_probe_degree as usize + 3);
    let nodes: Vec<Vec<f64>> = linspace(size).into_iter().map(|t| vec![t]).collect();
    let col = sample_grid(prob, std::slice::from_ref(f), &nodes, radius, Some(k), flavor)?
        .remove(0);
    let scale = col.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if scale < 1e-300 {
        return Err(TraceError::IdenticallyZero);
    }
    let samples: Vec<(Vec<f64>, C64)> = nodes
        .iter()
        .cloned()
        .zip(col.iter().map(|v| v / scale))
        .collect();
    let mut best = f64::INFINITY;
    for d in 0..=max_probe_degree {
        let fit = fit_poly(&samples, d)?;
        best = best.min(fit.residual);
        if fit.residual >= prob.tol.fit {
            continue;
        }
        let mut degree = 0;
        let mut leading = 0.0;
        for e in 0..=d {
            let c = fit.poly.coeff(&[e]).norm();
            if c > prob.tol.fit {
                degree = e;
                leading = c;
            }
        }
        let center = [prob.base().constants[k]];
        let poly = unscale(&fit.poly.scale(C64::new(scale, 0.0)), &center, radius)?;
        return Ok(DegreeReport {
            degree,
            leading,
            residual: fit.residual,
            fit: poly,
        });
    }
    Err(TraceError::NoPolynomialFit {
        max_degree: max_probe_degree,
        residual: best,
    })
}

/// Both sides of `∂_{a_ki} x_i = −x_i ∂_{a_k0} x_i` at `a⁰`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PdeCheck {
    pub lhs: C64,
    pub rhs: C64,
    pub residual: f64,
}

/// Central finite differences of the tracked coordinate `x_i` of germ `j`
/// in `a_ki` (the coefficient of the monomial `x_i` in equation `k`) and in
/// `a_k0`.
///
/// The identity follows by differentiating `a_k0 = P_k(a'_k, x(a))`: both
/// derivatives solve the same linear system with right-hand sides `−x_i` and
/// `1` in row `k`.
pub fn pde_check(prob: &TraceProblem, j: usize, i: usize, k: usize, h: f64) -> Result<PdeCheck, TraceError> {
    let n = prob.dim();
    if j >= prob.germs.len() || i >= n || k + 1 >= n {
        return Err(TraceError::Invalid(format!(
            "indices out of range: germ {j}, coordinate {i}, equation {k}"
        )));
    }
    let germ = &prob.germs[j];
    let a0 = prob.base();
    let opts = prob.track_options();
    let at = |a: &ParamPoint| -> Result<C64, TraceError> {
        track_point(germ, &prob.fam, a0, germ.base_point(), a, opts)
            .map(|p| p[i])
            .map_err(|source| TraceError::Track { germ: j, source })
    };
    let slot = prob.fam.unit_slot(k, i);
    let c = a0.coefficients[k][slot];
    let lhs = (at(&a0.with_coefficient(k, slot, c + h))? - at(&a0.with_coefficient(k, slot, c - h))?) / (2.0 * h);
    let c0 = a0.constants[k];
    let d0 = (at(&a0.with_constant(k, c0 + h))? - at(&a0.with_constant(k, c0 - h))?) / (2.0 * h);
    let rhs = -germ.base_point()[i] * d0;
    Ok(PdeCheck {
        lhs,
        rhs,
        residual: (lhs - rhs).norm(),
    })
}

/// True iff `deg_{a_k0} Tr_V(h) ≤ d`; a vanishing trace satisfies any bound.
///
/// The bound is guaranteed when `NP(h) ⊆ d·conv(S_k ∪ {0})`; see
/// [`degree_bound_precondition`]. This check does not enforce it.
pub fn trace_degree_bound_check(prob: &TraceProblem, h: &MultiPoly, d: u32, k: usize) -> Result<bool, TraceError> {
    let probe = prob.tol.max_probe_degree.max(d + 2);
    match degree_in_param(prob, h, k, probe, Flavor::Trace) {
        Ok(rep) => Ok(rep.degree <= d),
        Err(TraceError::IdenticallyZero) => Ok(true),
        Err(TraceError::NoPolynomialFit { .. }) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Whether `NP(h) ⊆ d·conv(S_k ∪ {0})`.
pub fn degree_bound_precondition(fam: &CurveFamily, h: &MultiPoly, d: u32, k: usize) -> Result<bool, TraceError> {
    if h.is_zero() {
        return Ok(true);
    }
    let np = newton_polytope(h)?;
    let bundle = fam.bundle_polytope(k)?.dilate(d as i64);
    Ok(bundle.contains_polytope(&np)?)
}
