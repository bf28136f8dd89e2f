//! Germs of smooth hypersurfaces stored as truncated power-series graphs.

use num_complex::Complex64 as C64;

use super::{AlgebraError, MultiPoly};

/// Largest radius assigned by [`GermGraph::from_implicit`] when the series
/// terminates (polynomial graphs).
pub const MAX_GERM_RADIUS: f64 = 10.0;

/// A germ `x_m = φ(x_rest − base_rest)` around `base_point`.
///
/// `series` is a polynomial in the `n − 1` free coordinates (in increasing
/// index order, skipping `graph_coordinate`), centred at the projection of
/// the base point, and includes the constant term `base_point[m]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GermGraph {
    base_point: Vec<C64>,
    graph_coordinate: usize,
    series: MultiPoly,
    truncation_order: u32,
    radius: f64,
    gradient: Vec<MultiPoly>,
}

impl GermGraph {
    pub fn new(
        base_point: Vec<C64>,
        graph_coordinate: usize,
        series: MultiPoly,
        truncation_order: u32,
        radius: f64,
    ) -> Result<Self, AlgebraError> {
        let n = base_point.len();
        if n < 2 {
            return Err(AlgebraError::InvalidGerm(format!(
                "ambient dimension {n} is below 2"
            )));
        }
        if graph_coordinate >= n {
            return Err(AlgebraError::InvalidGerm(format!(
                "graph coordinate {graph_coordinate} out of range for dimension {n}"
            )));
        }
        if series.num_vars() != n - 1 {
            return Err(AlgebraError::InvalidGerm(format!(
                "series has {} variables, expected {}",
                series.num_vars(),
                n - 1
            )));
        }
        if truncation_order < 2 {
            return Err(AlgebraError::InvalidGerm(format!(
                "truncation order {truncation_order} is below 2"
            )));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(AlgebraError::InvalidGerm(format!("radius {radius} is not positive")));
        }
        let series = series.truncate(truncation_order);
        let at_zero = series.coeff(&vec![0; n - 1]);
        let expected = base_point[graph_coordinate];
        if (at_zero - expected).norm() > 1e-12 * (1.0 + expected.norm()) {
            return Err(AlgebraError::InvalidGerm(format!(
                "series constant {at_zero} does not reproduce base coordinate {expected}"
            )));
        }
        let gradient = series.gradient();
        Ok(Self {
            base_point,
            graph_coordinate,
            series,
            truncation_order,
            radius,
            gradient,
        })
    }

    /// Expands the branch of `{f = 0}` through `base_point` as a graph over the
    /// remaining coordinates, to total degree `order`.
    ///
    /// Uses the chord iteration `z ← z − [g(y, z(y))]_≤order / ∂_m f(p)`, which
    /// gains one order per sweep. With `radius = None` the radius is half the
    /// root-test estimate of the convergence radius, capped at
    /// [`MAX_GERM_RADIUS`].
    pub fn from_implicit(
        f: &MultiPoly,
        base_point: &[C64],
        graph_coordinate: usize,
        order: u32,
        radius: Option<f64>,
    ) -> Result<Self, AlgebraError> {
        let n = f.num_vars();
        if base_point.len() != n {
            return Err(AlgebraError::DimensionMismatch {
                expected: n,
                found: base_point.len(),
            });
        }
        if graph_coordinate >= n || n < 2 {
            return Err(AlgebraError::InvalidGerm(format!(
                "graph coordinate {graph_coordinate} invalid for dimension {n}"
            )));
        }
        let value = f.eval(base_point)?;
        if value.norm() > 1e-9 * (1.0 + f.abs_eval(base_point)) {
            return Err(AlgebraError::InvalidGerm(format!(
                "base point is not on the hypersurface (|f| = {:.3e})",
                value.norm()
            )));
        }
        let slope = f.diff(graph_coordinate)?.eval(base_point)?;
        if slope.norm() < 1e-10 * (1.0 + f.max_abs_coeff()) {
            return Err(AlgebraError::InvalidGerm(format!(
                "∂f/∂x{} vanishes at the base point; choose another graph coordinate",
                graph_coordinate
            )));
        }
        let shifted = f.translate(base_point)?;
        let free = n - 1;
        let mut z = MultiPoly::zero(free);
        let mut subs: Vec<MultiPoly> = Vec::with_capacity(n);
        let mut free_index = 0;
        for i in 0..n {
            if i == graph_coordinate {
                subs.push(MultiPoly::zero(free));
            } else {
                subs.push(MultiPoly::var(free, free_index));
                free_index += 1;
            }
        }
        let inv_slope = C64::new(1.0, 0.0) / slope;
        for _ in 0..=order {
            subs[graph_coordinate] = z.clone();
            let g = shifted.compose(&subs, Some(order))?;
            if g.max_abs_coeff() == 0.0 {
                break;
            }
            z = &z - &g.scale(inv_slope);
        }
        // the base point is exact; drop constant-term roundoff from the sweeps
        let drift = z.coeff(&vec![0; free]);
        let series = &z + &MultiPoly::constant(free, base_point[graph_coordinate] - drift);
        let radius = radius.unwrap_or_else(|| 0.5 * estimate_radius(&z, order));
        Self::new(base_point.to_vec(), graph_coordinate, series, order, radius)
    }

    pub fn dim(&self) -> usize {
        self.base_point.len()
    }

    pub fn base_point(&self) -> &[C64] {
        &self.base_point
    }

    pub fn graph_coordinate(&self) -> usize {
        self.graph_coordinate
    }

    pub fn series(&self) -> &MultiPoly {
        &self.series
    }

    pub fn truncation_order(&self) -> u32 {
        self.truncation_order
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Indices of the coordinates the graph is written over.
    pub fn free_coordinates(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.dim()).filter(move |&i| i != self.graph_coordinate)
    }

    /// Offset of the free coordinates of `x` from the base point.
    pub fn offset_of(&self, x: &[C64]) -> Vec<C64> {
        self.free_coordinates()
            .map(|i| x[i] - self.base_point[i])
            .collect()
    }

    /// Polydisc norm of an offset, compared against the radius.
    pub fn offset_norm(offset: &[C64]) -> f64 {
        offset.iter().map(|o| o.norm()).fold(0.0, f64::max)
    }

    pub fn contains(&self, x: &[C64]) -> bool {
        Self::offset_norm(&self.offset_of(x)) < self.radius
    }

    /// Series value at an offset (no radius check).
    pub fn graph_value(&self, offset: &[C64]) -> C64 {
        self.series.eval_unchecked(offset)
    }

    /// Gradient of the series at an offset, one entry per free coordinate.
    pub fn graph_gradient(&self, offset: &[C64]) -> Vec<C64> {
        self.gradient.iter().map(|g| g.eval_unchecked(offset)).collect()
    }

    /// `x_m − φ(x_rest − base_rest)`; zero exactly on the (truncated) germ.
    pub fn equation_residual(&self, x: &[C64]) -> C64 {
        x[self.graph_coordinate] - self.graph_value(&self.offset_of(x))
    }

    /// Gradient of [`GermGraph::equation_residual`] with respect to `x`.
    pub fn equation_gradient(&self, x: &[C64]) -> Vec<C64> {
        let g = self.graph_gradient(&self.offset_of(x));
        let mut row = vec![C64::new(0.0, 0.0); self.dim()];
        row[self.graph_coordinate] = C64::new(1.0, 0.0);
        for (slot, i) in self.free_coordinates().enumerate() {
            row[i] = -g[slot];
        }
        row
    }

    /// Unit normal of the germ at its base point.
    pub fn unit_normal(&self) -> Vec<C64> {
        let row = self.equation_gradient(&self.base_point);
        let norm = row.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        row.into_iter().map(|z| z / norm).collect()
    }

    /// The point of the germ over `base_rest + offset`.
    pub fn eval(&self, offset: &[C64]) -> Result<Vec<C64>, AlgebraError> {
        if offset.len() != self.dim() - 1 {
            return Err(AlgebraError::DimensionMismatch {
                expected: self.dim() - 1,
                found: offset.len(),
            });
        }
        let r = Self::offset_norm(offset);
        if r >= self.radius {
            return Err(AlgebraError::OutsideRadius {
                offset: r,
                radius: self.radius,
            });
        }
        let mut x = self.base_point.clone();
        for (slot, i) in self.free_coordinates().collect::<Vec<_>>().into_iter().enumerate() {
            x[i] += offset[slot];
        }
        x[self.graph_coordinate] = self.graph_value(offset);
        Ok(x)
    }
}

/// Root-test estimate `min_k (Σ_{|e|=k} |c_e|)^{−1/k}` over the upper half of
/// the degrees present.
fn estimate_radius(z: &MultiPoly, order: u32) -> f64 {
    let mut sums = vec![0.0; order as usize + 1];
    for (e, c) in z.terms() {
        let d = e.iter().sum::<u32>() as usize;
        if d <= order as usize {
            sums[d] += c.norm();
        }
    }
    let lo = (order as usize / 2).max(1);
    let mut r = f64::INFINITY;
    // no roundoff cutoff: tiny high-order coefficients are genuine when the
    // convergence radius exceeds 1, and roundoff only makes the bound smaller
    for (k, &s) in sums.iter().enumerate().skip(lo) {
        if s > 0.0 {
            r = r.min(s.powf(-1.0 / k as f64));
        }
    }
    r.min(2.0 * MAX_GERM_RADIUS)
}
