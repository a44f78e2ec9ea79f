//! Laguerre polynomials, their Laplace-transform identities, and the
//! orthonormal basis sqrt(2) L_n(2x) e^{-x} of L^2 on the half-line.
//!
//! Only alpha = 0 and alpha = 1 are needed. Everything is evaluated by the
//! three-term recurrence
//!   (n+1) L_{n+1}^a(x) = (2n + 1 + a - x) L_n^a(x) - (n + a) L_{n-1}^a(x);
//! for the basis functions the recurrence is applied to the exponentially
//! weighted values directly, so nothing overflows at large degree.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::{self, Flagged, Status};

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// L_n^alpha(x) by the three-term recurrence. alpha must be 0 or 1.
pub fn laguerre_poly(n: u32, alpha: u32, x: f64) -> f64 {
    assert!(alpha <= 1, "only alpha in {{0, 1}} is supported");
    assert!(x >= 0.0, "Laguerre evaluation requires x >= 0");
    let a = alpha as f64;
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + a - x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + a - x) * cur - (kf + a) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// The orthonormal basis function sqrt(2) L_n(2x) e^{-x} on the half-line.
///
/// The recurrence has n-independent coefficients in x, so it can be run on
/// the weighted values L_k(2x) e^{-x} directly; the raw polynomial would
/// overflow long before n = 200 while the weighted value stays below 1.
pub fn laguerre_basis_fn(n: u32, x: f64) -> f64 {
    assert!(x >= 0.0, "basis functions live on the half-line");
    let w = (-x).exp();
    let mut prev = w;
    if n == 0 {
        return SQRT2 * prev;
    }
    let mut cur = (1.0 - 2.0 * x) * w;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - 2.0 * x) * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    SQRT2 * cur
}

/// Closed form of the Laplace transform of L_n^1:
/// int_0^inf L_n^1(x) e^{-zeta x} dx = 1 - ((zeta - 1)/zeta)^{n+1}.
pub fn laguerre_laplace_l1(n: u32, zeta: Complex64) -> Result<Complex64> {
    if zeta.re <= 0.0 {
        return Err(Error::Domain(format!(
            "Laplace transform of L_n^1 requires Re zeta > 0, got {zeta}"
        )));
    }
    let r = (zeta - 1.0) / zeta;
    Ok(Complex64::new(1.0, 0.0) - r.powu(n + 1))
}

/// Truncation point after which |L_n^1(x) e^{-s x}| integrates to < 1e-14.
fn laplace_cutoff(n: u32, re_zeta: f64) -> f64 {
    // The polynomial has degree n; e^{-s x} kills it once s x dominates
    // (n+1) ln x. A generous linear bound suffices here.
    (40.0 + 12.0 * (n + 1) as f64) / re_zeta.min(1.0)
}

/// The same transform by honest quadrature; the independent check path.
pub fn laguerre_laplace_l1_quadrature(n: u32, zeta: Complex64) -> Result<Flagged<Complex64>> {
    if zeta.re <= 0.0 {
        return Err(Error::Domain(format!(
            "Laplace transform of L_n^1 requires Re zeta > 0, got {zeta}"
        )));
    }
    let xmax = laplace_cutoff(n, zeta.re);
    // The transform magnitude grows like |(zeta-1)/zeta|^{n+1} for small
    // Re zeta; an absolute target far below that is unreachable in floating
    // point, so aim for fixed relative accuracy instead.
    let scale = ((zeta - 1.0) / zeta).norm().max(1.0).powi(n as i32 + 1);
    Ok(quad::integrate(
        |x| (-zeta * x).exp() * laguerre_poly(n, 1, x),
        0.0,
        xmax,
        1e-12 * scale,
    ))
}

/// Residual of the Cayley power identity
/// ((lambda - i)/(lambda + i))^{-n} = 1 - 2 int_0^inf L_{n-1}^1(2x) e^{-x - i lambda x} dx,
/// with the integral computed by quadrature. Small residuals certify that the
/// basis transform reproduces inverse Cayley powers.
pub fn cayley_power_identity_residual(n: u32, lambda: f64) -> Flagged<f64> {
    assert!(n >= 1, "the identity is stated for n >= 1");
    let omega_inv_n = {
        let omega = Complex64::new(lambda, -1.0) / Complex64::new(lambda, 1.0);
        omega.powi(-(n as i32))
    };
    let xmax = laplace_cutoff(n - 1, 1.0) / 2.0;
    let integral = quad::integrate(
        |x| {
            Complex64::new(0.0, -lambda * x).exp() * ((-x).exp() * laguerre_poly(n - 1, 1, 2.0 * x))
        },
        0.0,
        xmax,
        1e-11,
    );
    Flagged {
        value: (omega_inv_n - (Complex64::new(1.0, 0.0) - 2.0 * integral.value)).norm(),
        status: integral.status,
    }
}

/// Inner product int_0^inf f(x) conj(g(x)) dx, with the truncation radius
/// doubled until the increment falls below 1e-12 in absolute value.
pub fn halfline_inner<F, G>(f: F, g: G) -> Flagged<Complex64>
where
    F: Fn(f64) -> Complex64,
    G: Fn(f64) -> Complex64,
{
    let h = |x: f64| f(x) * g(x).conj();
    let mut acc = quad::integrate(&h, 0.0, 16.0, 1e-12);
    let mut radius = 16.0;
    for _ in 0..8 {
        let inc = quad::integrate(&h, radius, 2.0 * radius, 1e-12);
        acc.value += inc.value;
        acc.status = acc.status.merge(inc.status);
        radius *= 2.0;
        if inc.value.norm() < 1e-12 {
            return acc;
        }
    }
    Flagged { value: acc.value, status: Status::Approximate }
}

/// Coefficients g_n = int_0^inf f(x) l_n(x) dx of the orthonormal Laguerre
/// expansion, for n < n_terms.
pub fn laguerre_expand<F: Fn(f64) -> Complex64>(f: F, n_terms: u32) -> Vec<Flagged<Complex64>> {
    (0..n_terms)
        .map(|n| halfline_inner(&f, |x| Complex64::new(laguerre_basis_fn(n, x), 0.0)))
        .collect()
}

/// Gram matrix of the first n basis functions; the orthonormality witness.
pub fn gram_matrix(n: u32) -> Vec<Vec<f64>> {
    let n = n as usize;
    let mut g = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let v = halfline_inner(
                |x| Complex64::new(laguerre_basis_fn(i as u32, x), 0.0),
                |x| Complex64::new(laguerre_basis_fn(j as u32, x), 0.0),
            )
            .value
            .re;
            g[i][j] = v;
            g[j][i] = v;
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Direct expansion of L_n^a from the Rodrigues coefficients
    /// sum_k binom(n+a, n-k) (-x)^k / k!.
    fn laguerre_direct(n: u32, alpha: u32, x: f64) -> f64 {
        let mut sum = 0.0;
        for k in 0..=n {
            let mut binom = 1.0;
            // binom(n + alpha, n - k)
            for j in 0..(n - k) {
                binom *= (n + alpha - j) as f64 / (n - k - j) as f64;
            }
            let mut term = binom;
            for j in 1..=k {
                term *= -x / j as f64;
            }
            sum += term;
        }
        sum
    }

    #[test]
    fn recurrence_matches_direct_expansion() {
        for n in 0..=10 {
            for alpha in 0..=1 {
                for i in 0..=20 {
                    let x = i as f64;
                    let a = laguerre_poly(n, alpha, x);
                    let b = laguerre_direct(n, alpha, x);
                    let scale = a.abs().max(b.abs()).max(1.0);
                    assert!(
                        (a - b).abs() / scale < 1e-10,
                        "n={n} alpha={alpha} x={x}: {a} vs {b}"
                    );
                }
            }
        }
    }

    #[test]
    fn degree_zero_is_one() {
        assert_abs_diff_eq!(laguerre_poly(0, 0, 3.7), 1.0);
        assert_abs_diff_eq!(laguerre_poly(0, 1, 0.0), 1.0);
    }

    #[test]
    fn l1_degree_one() {
        // L_1^1(x) = 2 - x
        assert_abs_diff_eq!(laguerre_poly(1, 1, 0.5), 1.5, epsilon = 1e-14);
    }

    #[test]
    fn weighted_orthogonality_l2_against_x() {
        // int_0^inf L_2^1(x) x * x e^{-x} dx = 0 (orthogonal to degrees < 2).
        let r = quad::integrate(
            |x| Complex64::new(laguerre_poly(2, 1, x) * x * x * (-x).exp(), 0.0),
            0.0,
            200.0,
            1e-12,
        );
        assert_abs_diff_eq!(r.value.re, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn laplace_closed_form_values() {
        let one = Complex64::new(1.0, 0.0);
        for n in [0, 3, 11] {
            let v = laguerre_laplace_l1(n, one).unwrap();
            assert_abs_diff_eq!(v.re, 1.0, epsilon = 1e-14);
            assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-14);
        }
        let v = laguerre_laplace_l1(0, Complex64::new(2.0, 0.0)).unwrap();
        assert_abs_diff_eq!(v.re, 0.5, epsilon = 1e-14);
        let v = laguerre_laplace_l1(3, Complex64::new(1e6, 0.0)).unwrap();
        assert!(v.norm() <= 5e-6);
    }

    #[test]
    fn laplace_domain_error() {
        assert!(laguerre_laplace_l1(2, Complex64::new(-1.0, 3.0)).is_err());
        assert!(laguerre_laplace_l1_quadrature(2, Complex64::new(0.0, 1.0)).is_err());
    }

    #[test]
    fn laplace_closed_form_vs_quadrature() {
        for n in [0, 5, 17, 40] {
            for zeta in [
                Complex64::new(0.3, 0.0),
                Complex64::new(1.0, 2.0),
                Complex64::new(0.5, -5.0),
                Complex64::new(4.0, 1.0),
            ] {
                let cf = laguerre_laplace_l1(n, zeta).unwrap();
                let q = laguerre_laplace_l1_quadrature(n, zeta).unwrap().value;
                let scale = cf.norm().max(1.0);
                assert!(
                    (cf - q).norm() / scale < 1e-8,
                    "n={n} zeta={zeta}: closed {cf} vs quad {q}"
                );
            }
        }
    }

    #[test]
    fn cayley_identity_at_zero() {
        for n in [1, 2, 7] {
            let r = cayley_power_identity_residual(n, 0.0);
            assert!(r.value < 1e-9, "n={n}: residual {}", r.value);
        }
    }

    #[test]
    fn cayley_identity_sweep() {
        for (n, lambda) in [(1, 1.0), (5, 10.0), (12, -3.0), (30, 50.0), (30, -50.0)] {
            let r = cayley_power_identity_residual(n, lambda);
            assert!(r.value <= 1e-6, "n={n} lambda={lambda}: residual {}", r.value);
        }
    }

    #[test]
    fn basis_values() {
        assert_abs_diff_eq!(laguerre_basis_fn(0, 0.0), SQRT2, epsilon = 1e-14);
        assert_abs_diff_eq!(laguerre_basis_fn(1, 0.5), 0.0, epsilon = 1e-14);
        // n=1: sqrt(2)(1-2x)e^{-x}
        assert_abs_diff_eq!(
            laguerre_basis_fn(1, 2.0),
            SQRT2 * (-3.0) * (-2.0_f64).exp(),
            epsilon = 1e-13
        );
    }

    #[test]
    fn basis_norm_one() {
        let r = halfline_inner(
            |x| Complex64::new(laguerre_basis_fn(3, x), 0.0),
            |x| Complex64::new(laguerre_basis_fn(3, x), 0.0),
        );
        assert_abs_diff_eq!(r.value.re, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn recurrence_stays_bounded() {
        // |sqrt(2) L_n(2x) e^{-x}| <= sqrt(2) for every n; the raw polynomial
        // would overflow near n = 200.
        let mut max = 0.0_f64;
        for n in (0..=200).step_by(25) {
            for i in 0..=400 {
                let x = i as f64 * 0.1;
                max = max.max(laguerre_basis_fn(n, x).abs());
            }
        }
        assert!(max <= SQRT2 * (1.0 + 1e-9), "max = {max}");
    }

    #[test]
    fn gram_identity_n60() {
        let g = gram_matrix(61);
        for (i, row) in g.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (v - target).abs() < 1e-8,
                    "Gram[{i}][{j}] = {v}"
                );
            }
        }
    }

    #[test]
    fn expand_basis_function_is_unit_vector() {
        let coeffs = laguerre_expand(|x| Complex64::new(laguerre_basis_fn(2, x), 0.0), 6);
        for (n, c) in coeffs.iter().enumerate() {
            let target = if n == 2 { 1.0 } else { 0.0 };
            assert_abs_diff_eq!(c.value.re, target, epsilon = 1e-8);
            assert_abs_diff_eq!(c.value.im, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn expand_exponential_parseval() {
        // f = e^{-x}: g_0 = sqrt(2)/2, ||f||^2 = 1/2; the Parseval defect is
        // non-negative and decreasing in N.
        let f = |x: f64| Complex64::new((-x).exp(), 0.0);
        let coeffs = laguerre_expand(f, 40);
        assert_abs_diff_eq!(coeffs[0].value.re, SQRT2 / 2.0, epsilon = 1e-10);
        let norm_sq = 0.5;
        let mut prev_defect = norm_sq;
        let mut partial = 0.0;
        for c in &coeffs {
            partial += c.value.norm_sqr();
            let defect = norm_sq - partial;
            assert!(defect >= -1e-10, "Parseval defect went negative: {defect}");
            assert!(defect <= prev_defect + 1e-12);
            prev_defect = defect;
        }
        assert!(prev_defect < 1e-6, "defect after 40 terms: {prev_defect}");
    }

    #[test]
    fn expand_zero_is_zero() {
        let coeffs = laguerre_expand(|_| Complex64::new(0.0, 0.0), 4);
        for c in coeffs {
            assert_abs_diff_eq!(c.value.norm(), 0.0);
        }
    }
}
