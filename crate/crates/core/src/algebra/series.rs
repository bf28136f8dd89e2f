//! Univariate truncated power series `Σ_{r < len} c_r t^r`.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64 as C64;

use super::MultiPoly;

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    coeffs: Vec<C64>,
}

impl Series {
    /// The zero series with `len` stored coefficients (precision `O(t^len)`).
    pub fn zero(len: usize) -> Self {
        Self {
            coeffs: vec![C64::new(0.0, 0.0); len],
        }
    }

    pub fn constant(len: usize, c: C64) -> Self {
        let mut s = Self::zero(len);
        s.coeffs[0] = c;
        s
    }

    /// `c + t` truncated to `len` terms.
    pub fn variable(len: usize, c: C64) -> Self {
        let mut s = Self::constant(len, c);
        if len > 1 {
            s.coeffs[1] = C64::new(1.0, 0.0);
        }
        s
    }

    pub fn from_coeffs(coeffs: Vec<C64>) -> Self {
        assert!(!coeffs.is_empty());
        Self { coeffs }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coeff(&self, r: usize) -> C64 {
        self.coeffs.get(r).copied().unwrap_or_default()
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|v| v * c).collect(),
        }
    }

    /// Multiplicative inverse; the constant term must be nonzero.
    pub fn inv(&self) -> Option<Self> {
        let a0 = self.coeffs[0];
        if a0.norm() == 0.0 {
            return None;
        }
        let n = self.len();
        let mut out = vec![C64::new(0.0, 0.0); n];
        out[0] = C64::new(1.0, 0.0) / a0;
        for r in 1..n {
            let mut acc = C64::new(0.0, 0.0);
            for i in 1..=r {
                acc += self.coeffs[i] * out[r - i];
            }
            out[r] = -acc / a0;
        }
        Some(Self { coeffs: out })
    }

    fn powu(&self, k: u32) -> Self {
        let mut acc = Self::constant(self.len(), C64::new(1.0, 0.0));
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Evaluates a polynomial at a vector of series.
    pub fn eval_poly(p: &MultiPoly, xs: &[Series]) -> Series {
        assert_eq!(p.num_vars(), xs.len());
        let len = xs.first().map(|s| s.len()).unwrap_or(1);
        let mut out = Self::zero(len);
        for (e, c) in p.terms() {
            let mut term = Self::constant(len, *c);
            for (x, &k) in xs.iter().zip(e) {
                if k > 0 {
                    term = &term * &x.powu(k);
                }
            }
            out = &out + &term;
        }
        out
    }
}

impl Add for &Series {
    type Output = Series;
    fn add(self, rhs: &Series) -> Series {
        let n = self.len().min(rhs.len());
        Series {
            coeffs: (0..n).map(|r| self.coeffs[r] + rhs.coeffs[r]).collect(),
        }
    }
}

impl Sub for &Series {
    type Output = Series;
    fn sub(self, rhs: &Series) -> Series {
        let n = self.len().min(rhs.len());
        Series {
            coeffs: (0..n).map(|r| self.coeffs[r] - rhs.coeffs[r]).collect(),
        }
    }
}

impl Mul for &Series {
    type Output = Series;
    fn mul(self, rhs: &Series) -> Series {
        let n = self.len().min(rhs.len());
        let mut out = vec![C64::new(0.0, 0.0); n];
        for (i, a) in self.coeffs.iter().take(n).enumerate() {
            for (j, b) in rhs.coeffs.iter().take(n - i).enumerate() {
                out[i + j] += a * b;
            }
        }
        Series { coeffs: out }
    }
}
