//! Roots of univariate complex polynomials: companion-matrix eigenvalues
//! followed by Newton polishing.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

/// Leading coefficients below this fraction of the largest are treated as zero.
const LEADING_CUTOFF: f64 = 1e-13;

/// Evaluates `Σ c_k z^k` and its derivative by Horner's rule.
pub fn horner(coeffs: &[C64], z: C64) -> (C64, C64) {
    let mut v = C64::new(0.0, 0.0);
    let mut d = C64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        d = d * z + v;
        v = v * z + c;
    }
    (v, d)
}

fn trimmed(coeffs: &[C64]) -> &[C64] {
    let max = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut end = coeffs.len();
    while end > 0 && coeffs[end - 1].norm() <= LEADING_CUTOFF * max {
        end -= 1;
    }
    &coeffs[..end]
}

/// All roots of `Σ c_k z^k` (lowest degree first), with multiplicity.
///
/// Returns an empty list for constants and the zero polynomial.
pub fn univariate_roots(coeffs: &[C64]) -> Vec<C64> {
    let c = trimmed(coeffs);
    if c.len() < 2 {
        return Vec::new();
    }
    let deg = c.len() - 1;
    let lead = c[deg];
    let mut roots = if deg == 1 {
        vec![-c[0] / lead]
    } else {
        let companion = DMatrix::from_fn(deg, deg, |r, col| {
            if r == 0 {
                -c[deg - 1 - col] / lead
            } else if r == col + 1 {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        match companion.eigenvalues() {
            Some(ev) => ev.iter().copied().collect(),
            None => Vec::new(),
        }
    };
    for z in roots.iter_mut() {
        *z = polish(c, *z);
    }
    roots
}

fn polish(c: &[C64], mut z: C64) -> C64 {
    for _ in 0..8 {
        let (v, d) = horner(c, z);
        if d.norm() == 0.0 {
            break;
        }
        let step = v / d;
        if !step.re.is_finite() || !step.im.is_finite() {
            break;
        }
        let before = v.norm();
        let cand = z - step;
        if horner(c, cand).0.norm() > before {
            break;
        }
        z = cand;
        if step.norm() <= 1e-16 * (1.0 + z.norm()) {
            break;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn quadratic_roots() {
        let mut r = univariate_roots(&[c(-1.0), c(0.0), c(1.0)]);
        r.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert!((r[0] - c(-1.0)).norm() < 1e-14);
        assert!((r[1] - c(1.0)).norm() < 1e-14);
    }

    #[test]
    fn cubic_roots_of_unity() {
        let r = univariate_roots(&[c(-1.0), c(0.0), c(0.0), c(1.0)]);
        assert_eq!(r.len(), 3);
        for z in r {
            assert!((z.powu(3) - c(1.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn constants_have_no_roots() {
        assert!(univariate_roots(&[c(2.0)]).is_empty());
        assert!(univariate_roots(&[c(2.0), c(0.0)]).is_empty());
    }
}
