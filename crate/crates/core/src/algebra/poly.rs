//! Sparse multivariate polynomials with complex coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64 as C64;

use super::AlgebraError;

/// Relative magnitude below which coefficients are dropped by [`MultiPoly::normalized`].
pub const PRUNE_RELATIVE: f64 = 1e-12;

/// A sparse polynomial in `num_vars` variables.
///
/// Terms are kept in a sorted map so iteration order, printing and
/// serialization are deterministic. A coefficient that becomes exactly
/// zero is removed; the zero polynomial is the empty map.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiPoly {
    num_vars: usize,
    terms: BTreeMap<Vec<u32>, C64>,
}

impl MultiPoly {
    pub fn zero(num_vars: usize) -> Self {
        Self {
            num_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(num_vars: usize, c: C64) -> Self {
        let mut p = Self::zero(num_vars);
        p.add_term(vec![0; num_vars], c);
        p
    }

    /// The coordinate function `x_i` (0-based).
    pub fn var(num_vars: usize, i: usize) -> Self {
        assert!(i < num_vars, "variable {i} out of range for {num_vars} variables");
        let mut e = vec![0; num_vars];
        e[i] = 1;
        Self::monomial(e, C64::new(1.0, 0.0))
    }

    pub fn monomial(exponent: Vec<u32>, c: C64) -> Self {
        let mut p = Self::zero(exponent.len());
        p.add_term(exponent, c);
        p
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs, summing repeats.
    pub fn from_terms<I>(num_vars: usize, terms: I) -> Result<Self, AlgebraError>
    where
        I: IntoIterator<Item = (Vec<u32>, C64)>,
    {
        let mut p = Self::zero(num_vars);
        for (e, c) in terms {
            if e.len() != num_vars {
                return Err(AlgebraError::DimensionMismatch {
                    expected: num_vars,
                    found: e.len(),
                });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    /// Convenience constructor for real coefficients.
    pub fn from_real_terms(num_vars: usize, terms: &[(&[u32], f64)]) -> Result<Self, AlgebraError> {
        Self::from_terms(
            num_vars,
            terms.iter().map(|(e, c)| (e.to_vec(), C64::new(*c, 0.0))),
        )
    }

    fn add_term(&mut self, exponent: Vec<u32>, c: C64) {
        if c == C64::new(0.0, 0.0) {
            return;
        }
        match self.terms.get_mut(&exponent) {
            Some(v) => {
                *v += c;
                if *v == C64::new(0.0, 0.0) {
                    self.terms.remove(&exponent);
                }
            }
            None => {
                self.terms.insert(exponent, c);
            }
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &C64)> {
        self.terms.iter()
    }

    pub fn exponents(&self) -> impl Iterator<Item = &Vec<u32>> {
        self.terms.keys()
    }

    pub fn coeff(&self, exponent: &[u32]) -> C64 {
        self.terms.get(exponent).copied().unwrap_or_default()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn degree_in(&self, i: usize) -> Option<u32> {
        self.terms.keys().map(|e| e[i]).max()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Sum of coefficient magnitudes weighted by `|x^e|`; a scale for residuals.
    pub fn abs_eval(&self, x: &[C64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| c.norm() * monomial_value(e, x).norm())
            .sum()
    }

    pub fn eval(&self, x: &[C64]) -> Result<C64, AlgebraError> {
        if x.len() != self.num_vars {
            return Err(AlgebraError::DimensionMismatch {
                expected: self.num_vars,
                found: x.len(),
            });
        }
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &[C64]) -> C64 {
        self.terms
            .iter()
            .map(|(e, c)| c * monomial_value(e, x))
            .sum()
    }

    /// Formal partial derivative with respect to `x_i` (0-based).
    pub fn diff(&self, i: usize) -> Result<Self, AlgebraError> {
        if i >= self.num_vars {
            return Err(AlgebraError::VariableOutOfRange {
                index: i,
                num_vars: self.num_vars,
            });
        }
        let mut out = Self::zero(self.num_vars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut d = e.clone();
            d[i] -= 1;
            out.add_term(d, c * e[i] as f64);
        }
        Ok(out)
    }

    pub fn gradient(&self) -> Vec<Self> {
        (0..self.num_vars)
            .map(|i| self.diff(i).expect("index in range"))
            .collect()
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut out = Self::zero(self.num_vars);
        for (e, v) in &self.terms {
            out.add_term(e.clone(), v * c);
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(self.num_vars, C64::new(1.0, 0.0));
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Drops every term of total degree above `order`.
    pub fn truncate(&self, order: u32) -> Self {
        Self {
            num_vars: self.num_vars,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.iter().sum::<u32>() <= order)
                .map(|(e, c)| (e.clone(), *c))
                .collect(),
        }
    }

    /// Product truncated at total degree `order`.
    pub fn mul_truncated(&self, other: &Self, order: u32) -> Self {
        assert_eq!(self.num_vars, other.num_vars);
        let mut out = Self::zero(self.num_vars);
        for (ea, ca) in &self.terms {
            let da: u32 = ea.iter().sum();
            if da > order {
                continue;
            }
            for (eb, cb) in &other.terms {
                if da + eb.iter().sum::<u32>() > order {
                    continue;
                }
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    /// Substitutes `x_i := subs[i]`, optionally truncating every intermediate
    /// product at a total degree.
    pub fn compose(&self, subs: &[MultiPoly], order: Option<u32>) -> Result<Self, AlgebraError> {
        if subs.len() != self.num_vars {
            return Err(AlgebraError::DimensionMismatch {
                expected: self.num_vars,
                found: subs.len(),
            });
        }
        let target = match subs.first() {
            Some(s) => s.num_vars,
            None => {
                return Ok(Self::constant(0, self.coeff(&[])).prune_exact());
            }
        };
        if let Some(bad) = subs.iter().find(|s| s.num_vars != target) {
            return Err(AlgebraError::DimensionMismatch {
                expected: target,
                found: bad.num_vars,
            });
        }
        let mul = |a: &Self, b: &Self| match order {
            Some(o) => a.mul_truncated(b, o),
            None => a * b,
        };
        // powers[i][k] = subs[i]^k
        let mut powers: Vec<Vec<Self>> = Vec::with_capacity(self.num_vars);
        for (i, s) in subs.iter().enumerate() {
            let top = self.degree_in(i).unwrap_or(0);
            let mut pw = vec![Self::constant(target, C64::new(1.0, 0.0))];
            for k in 1..=top as usize {
                let next = mul(&pw[k - 1], s);
                pw.push(next);
            }
            powers.push(pw);
        }
        let mut out = Self::zero(target);
        for (e, c) in &self.terms {
            let mut term = Self::constant(target, *c);
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    term = mul(&term, &powers[i][k as usize]);
                }
            }
            out = &out + &term;
        }
        Ok(out)
    }

    /// `p(shift + w)` as a polynomial in `w`.
    pub fn translate(&self, shift: &[C64]) -> Result<Self, AlgebraError> {
        if shift.len() != self.num_vars {
            return Err(AlgebraError::DimensionMismatch {
                expected: self.num_vars,
                found: shift.len(),
            });
        }
        let subs: Vec<Self> = shift
            .iter()
            .enumerate()
            .map(|(i, s)| &Self::var(self.num_vars, i) + &Self::constant(self.num_vars, *s))
            .collect();
        self.compose(&subs, None)
    }

    /// Removes terms whose magnitude is below `rel` times the largest one.
    pub fn pruned(&self, rel: f64) -> Self {
        let cut = rel * self.max_abs_coeff();
        Self {
            num_vars: self.num_vars,
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| c.norm() > cut)
                .map(|(e, c)| (e.clone(), *c))
                .collect(),
        }
    }

    fn prune_exact(self) -> Self {
        Self {
            num_vars: self.num_vars,
            terms: self
                .terms
                .into_iter()
                .filter(|(_, c)| *c != C64::new(0.0, 0.0))
                .collect(),
        }
    }

    /// Divides by the largest-magnitude coefficient and prunes terms below
    /// [`PRUNE_RELATIVE`]. Ties go to the smallest exponent in map order.
    pub fn normalized(&self) -> Self {
        let Some(lead) = self.leading_by_magnitude() else {
            return self.clone();
        };
        self.scale(C64::new(1.0, 0.0) / lead).pruned(PRUNE_RELATIVE)
    }

    fn leading_by_magnitude(&self) -> Option<C64> {
        let mut best: Option<C64> = None;
        for c in self.terms.values() {
            match best {
                Some(b) if c.norm() <= b.norm() * (1.0 + 1e-9) => {}
                _ => best = Some(*c),
            }
        }
        best
    }

    /// Scale-invariant coefficient distance: `min_λ |λ·self − other| / |other|`
    /// in the Euclidean norm on coefficient vectors.
    pub fn projective_distance(&self, other: &Self) -> f64 {
        let keys: std::collections::BTreeSet<&Vec<u32>> =
            self.terms.keys().chain(other.terms.keys()).collect();
        let a: Vec<C64> = keys.iter().map(|k| self.coeff(k)).collect();
        let b: Vec<C64> = keys.iter().map(|k| other.coeff(k)).collect();
        let aa: f64 = a.iter().map(|z| z.norm_sqr()).sum();
        let bb: f64 = b.iter().map(|z| z.norm_sqr()).sum();
        if aa == 0.0 || bb == 0.0 {
            return if aa == bb { 0.0 } else { 1.0 };
        }
        let ab: C64 = a.iter().zip(&b).map(|(x, y)| x.conj() * y).sum();
        let lambda = ab / aa;
        let err: f64 = a
            .iter()
            .zip(&b)
            .map(|(x, y)| (lambda * x - y).norm_sqr())
            .sum();
        (err / bb).sqrt()
    }
}

pub(crate) fn monomial_value(e: &[u32], x: &[C64]) -> C64 {
    let mut v = C64::new(1.0, 0.0);
    for (xi, &k) in x.iter().zip(e) {
        if k > 0 {
            v *= xi.powu(k);
        }
    }
    v
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.num_vars, rhs.num_vars, "variable count mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), *c);
        }
        out
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.num_vars, rhs.num_vars, "variable count mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.num_vars, rhs.num_vars, "variable count mismatch");
        let mut out = MultiPoly::zero(self.num_vars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({}{:+}i)", c.re, c.im)?;
            for (i, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "*x{}", i + 1)?,
                    _ => write!(f, "*x{}^{}", i + 1, k)?,
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn eval_examples() {
        let p = MultiPoly::from_real_terms(2, &[(&[1, 1], 1.0), (&[0, 0], 1.0)]).unwrap();
        assert_eq!(p.eval(&[c(2.0), c(3.0)]).unwrap(), c(7.0));
        assert_eq!(MultiPoly::zero(2).eval(&[c(5.0), c(-1.0)]).unwrap(), c(0.0));
        let circle =
            MultiPoly::from_real_terms(2, &[(&[2, 0], 1.0), (&[0, 2], 1.0), (&[0, 0], -1.0)])
                .unwrap();
        assert!(circle.eval(&[c(0.6), c(0.8)]).unwrap().norm() < 1e-15);
    }

    #[test]
    fn eval_dimension_mismatch() {
        let p = MultiPoly::var(2, 0);
        assert!(matches!(
            p.eval(&[c(1.0)]),
            Err(AlgebraError::DimensionMismatch { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn diff_examples() {
        let p = MultiPoly::from_real_terms(2, &[(&[2, 1], 1.0)]).unwrap();
        let want = MultiPoly::from_real_terms(2, &[(&[1, 1], 2.0)]).unwrap();
        assert_eq!(p.diff(0).unwrap(), want);
        let q = MultiPoly::from_real_terms(2, &[(&[2, 0], 1.0)]).unwrap();
        assert!(q.diff(1).unwrap().is_zero());
        let circle =
            MultiPoly::from_real_terms(2, &[(&[2, 0], 1.0), (&[0, 2], 1.0), (&[0, 0], -1.0)])
                .unwrap();
        assert_eq!(
            circle.diff(0).unwrap(),
            MultiPoly::from_real_terms(2, &[(&[1, 0], 2.0)]).unwrap()
        );
        assert!(matches!(
            circle.diff(2),
            Err(AlgebraError::VariableOutOfRange { index: 2, num_vars: 2 })
        ));
    }

    #[test]
    fn cancellation_removes_terms() {
        let x = MultiPoly::var(2, 0);
        assert!((&x - &x).is_empty());
        assert!(MultiPoly::from_real_terms(1, &[(&[1], 0.0)]).unwrap().is_zero());
    }

    #[test]
    fn compose_and_translate() {
        // (x+1)^2 at x = w - 1 is w^2
        let x = MultiPoly::var(1, 0);
        let one = MultiPoly::constant(1, c(1.0));
        let p = (&x + &one).pow(2);
        let q = p.translate(&[c(-1.0)]).unwrap();
        assert_eq!(q, MultiPoly::from_real_terms(1, &[(&[2], 1.0)]).unwrap());
        let t = p.compose(std::slice::from_ref(&x), Some(1)).unwrap();
        assert_eq!(t, &x.scale(c(2.0)) + &one);
    }

    #[test]
    fn projective_distance_ignores_scale() {
        let p = MultiPoly::from_real_terms(2, &[(&[2, 0], 1.0), (&[0, 0], -1.0)]).unwrap();
        let q = p.scale(C64::new(0.0, -3.5));
        assert!(p.projective_distance(&q) < 1e-15);
        assert!(p.projective_distance(&MultiPoly::var(2, 1)) > 0.5);
    }

    #[test]
    fn normalized_prunes_noise() {
        let p = MultiPoly::from_real_terms(1, &[(&[0], 2.0), (&[1], 1e-14), (&[2], -4.0)]).unwrap();
        let n = p.normalized();
        assert_eq!(n.len(), 2);
        assert_eq!(n.coeff(&[2]), c(1.0));
        assert_eq!(n.coeff(&[0]), c(-0.5));
    }
}
