//! Newton's identities between power sums and elementary symmetric functions.

use num_complex::Complex64 as C64;

/// Converts power sums `s_1..s_N` of `N` unknown values into their
/// elementary symmetric functions `e_1..e_N`.
///
/// Uses `l·e_l = Σ_{i=1..l} (−1)^{i−1} e_{l−i} s_i` with `e_0 = 1`, so that
/// `Y^N − e_1 Y^{N−1} + … + (−1)^N e_N` has the original values as roots.
pub fn newton_to_elementary(power_sums: &[C64]) -> Vec<C64> {
    let n = power_sums.len();
    let mut e = Vec::with_capacity(n + 1);
    e.push(C64::new(1.0, 0.0));
    for l in 1..=n {
        let mut acc = C64::new(0.0, 0.0);
        for i in 1..=l {
            let term = e[l - i] * power_sums[i - 1];
            if i % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        e.push(acc / l as f64);
    }
    e.remove(0);
    e
}

/// `s_l = Σ_j r_j^l` for `l = 1..count`.
pub fn power_sums(values: &[C64], count: usize) -> Vec<C64> {
    let mut sums = vec![C64::new(0.0, 0.0); count];
    for &v in values {
        let mut p = C64::new(1.0, 0.0);
        for s in sums.iter_mut() {
            p *= v;
            *s += p;
        }
    }
    sums
}

/// Coefficients of the monic polynomial `Y^N − e_1 Y^{N−1} + … + (−1)^N e_N`,
/// lowest degree first.
pub fn monic_from_elementary(e: &[C64]) -> Vec<C64> {
    let n = e.len();
    let mut coeffs = vec![C64::new(0.0, 0.0); n + 1];
    coeffs[n] = C64::new(1.0, 0.0);
    for (l, el) in e.iter().enumerate() {
        let l = l + 1;
        let sign = if l % 2 == 1 { -1.0 } else { 1.0 };
        coeffs[n - l] = el * sign;
    }
    coeffs
}
