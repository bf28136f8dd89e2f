//! Polynomial arithmetic, germ graphs, Newton identities and least-squares fits.

mod fit;
mod germ;
mod poly;
mod roots;
mod series;
mod symmetric;

use thiserror::Error;

pub use fit::{fit_poly, monomials_up_to, PolyFit};
pub use germ::{GermGraph, MAX_GERM_RADIUS};
pub use poly::{MultiPoly, PRUNE_RELATIVE};
pub use roots::{horner, univariate_roots};
pub use series::Series;
pub use symmetric::{monic_from_elementary, newton_to_elementary, power_sums};

pub(crate) use poly::monomial_value;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("variable index {index} out of range for {num_vars} variables")]
    VariableOutOfRange { index: usize, num_vars: usize },
    #[error("offset {offset:.3e} outside germ radius {radius:.3e}")]
    OutsideRadius { offset: f64, radius: f64 },
    #[error("rank-deficient sample design (singular value ratio {ratio:.3e})")]
    RankDeficient { ratio: f64 },
    #[error("{samples} samples cannot determine {monomials} coefficients")]
    InsufficientSamples { samples: usize, monomials: usize },
    #[error("invalid germ: {0}")]
    InvalidGerm(String),
}

/// A linear form `u = Σ u_i x_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearForm {
    coefficients: Vec<num_complex::Complex64>,
}

impl LinearForm {
    /// Fails with `None` when every coefficient is zero.
    pub fn new(coefficients: Vec<num_complex::Complex64>) -> Option<Self> {
        if coefficients.iter().all(|c| c.norm() == 0.0) {
            return None;
        }
        Some(Self { coefficients })
    }

    pub fn coefficients(&self) -> &[num_complex::Complex64] {
        &self.coefficients
    }

    pub fn eval(&self, x: &[num_complex::Complex64]) -> num_complex::Complex64 {
        self.coefficients.iter().zip(x).map(|(u, v)| u * v).sum()
    }

    pub fn norm(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn to_poly(&self) -> MultiPoly {
        let n = self.coefficients.len();
        MultiPoly::from_terms(
            n,
            self.coefficients.iter().enumerate().map(|(i, c)| {
                let mut e = vec![0; n];
                e[i] = 1;
                (e, *c)
            }),
        )
        .expect("exponent length matches")
    }
}
