//! Least-squares polynomial fits over sampled parameter grids.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use super::poly::monomial_value;
use super::{AlgebraError, MultiPoly};

/// Singular-value ratio below which a design matrix is rank deficient.
const RANK_RATIO: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct PolyFit {
    /// Fitted polynomial in the sample coordinates.
    pub poly: MultiPoly,
    /// Maximum absolute fit error over the samples.
    pub residual: f64,
}

/// All exponent vectors in `num_vars` variables of total degree `≤ degree`,
/// graded then lexicographic.
pub fn monomials_up_to(num_vars: usize, degree: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for d in 0..=degree {
        let mut cur = vec![0u32; num_vars];
        push_degree(&mut out, &mut cur, 0, d);
    }
    out
}

fn push_degree(out: &mut Vec<Vec<u32>>, cur: &mut Vec<u32>, slot: usize, left: u32) {
    if slot + 1 == cur.len() {
        cur[slot] = left;
        out.push(cur.clone());
        return;
    }
    if cur.is_empty() {
        if left == 0 {
            out.push(Vec::new());
        }
        return;
    }
    for k in (0..=left).rev() {
        cur[slot] = k;
        push_degree(out, cur, slot + 1, left - k);
    }
    cur[slot] = 0;
}

/// Fits `samples` by a polynomial of total degree `≤ max_total_degree`.
///
/// The design matrix is factored by SVD; a singular-value ratio under
/// `1e-10` is reported as [`AlgebraError::RankDeficient`].
pub fn fit_poly(samples: &[(Vec<f64>, C64)], max_total_degree: u32) -> Result<PolyFit, AlgebraError> {
    let Some((first, _)) = samples.first() else {
        return Err(AlgebraError::InsufficientSamples { samples: 0, monomials: 1 });
    };
    let dim = first.len();
    if let Some((p, _)) = samples.iter().find(|(p, _)| p.len() != dim) {
        return Err(AlgebraError::DimensionMismatch {
            expected: dim,
            found: p.len(),
        });
    }
    let monomials = monomials_up_to(dim, max_total_degree);
    if samples.len() < monomials.len() {
        return Err(AlgebraError::InsufficientSamples {
            samples: samples.len(),
            monomials: monomials.len(),
        });
    }
    let points: Vec<Vec<C64>> = samples
        .iter()
        .map(|(p, _)| p.iter().map(|&t| C64::new(t, 0.0)).collect())
        .collect();
    let design = DMatrix::from_fn(samples.len(), monomials.len(), |r, c| {
        monomial_value(&monomials[c], &points[r])
    });
    let rhs = DVector::from_iterator(samples.len(), samples.iter().map(|(_, v)| *v));
    let svd = design.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smax.is_nan() || smax <= 0.0 || smin / smax < RANK_RATIO {
        return Err(AlgebraError::RankDeficient {
            ratio: if smax > 0.0 { smin / smax } else { 0.0 },
        });
    }
    let coeffs = svd
        .solve(&rhs, 0.0)
        .map_err(|_| AlgebraError::RankDeficient { ratio: smin / smax })?;
    let fitted = &design * &coeffs;
    let residual = fitted
        .iter()
        .zip(rhs.iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let poly = MultiPoly::from_terms(dim, monomials.into_iter().zip(coeffs.iter().copied()))?;
    Ok(PolyFit { poly, residual })
}
