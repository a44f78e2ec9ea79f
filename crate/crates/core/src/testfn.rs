//! Test functions on the positive half-line: the smooth bump family used by
//! the closability probes, sampled functions, and finite combinations of the
//! orthonormal Laguerre basis.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::laguerre::laguerre_basis_fn;
use crate::quad::{self, Flagged};

/// Unnormalized bump exp(-1/(x(1-x))) on (0,1), zero outside.
fn bump_raw(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        (-1.0 / (x * (1.0 - x))).exp()
    }
}

/// 1 / int_0^1 exp(-1/(x(1-x))) dx, computed once.
fn bump_normalizer() -> f64 {
    static C: OnceLock<f64> = OnceLock::new();
    *C.get_or_init(|| {
        let mass = quad::integrate(|x| Complex64::new(bump_raw(x), 0.0), 0.0, 1.0, 1e-14);
        1.0 / mass.value.re
    })
}

/// The normalized bump: smooth, supported on (0,1), integral exactly 1.
pub fn psi(x: f64) -> f64 {
    bump_raw(x) * bump_normalizer()
}

/// int_0^1 psi(x)^2 dx, the squared L^2 norm of the normalized bump.
pub fn psi_norm_sq() -> f64 {
    static N: OnceLock<f64> = OnceLock::new();
    *N.get_or_init(|| {
        quad::integrate(|x| Complex64::new(psi(x) * psi(x), 0.0), 0.0, 1.0, 1e-14)
            .value
            .re
    })
}

/// A test function supported in the (closed) positive half-line.
#[derive(Debug, Clone)]
pub enum TestFunction {
    /// n^{-1} psi(x/n) e^{-i lambda0 x}: unit-mass bump spread over (0, n),
    /// modulated so its transform concentrates at lambda0.
    Bump { scale: f64, modulation: f64 },
    /// Piecewise-linear interpolation of complex samples with compact support.
    Samples { x: Vec<f64>, values: Vec<Complex64> },
    /// sum_n coeffs[n] * l_n(x) in the orthonormal Laguerre basis.
    LaguerreCombo { coeffs: Vec<Complex64> },
    /// f(x - t), the right shift of another test function.
    Shifted { inner: Box<TestFunction>, t: f64 },
}

impl TestFunction {
    pub fn bump(scale: f64, modulation: f64) -> TestFunction {
        assert!(scale > 0.0);
        TestFunction::Bump { scale, modulation }
    }

    pub fn shift(self, t: f64) -> TestFunction {
        assert!(t >= 0.0, "shifts move the support to the right only");
        if t == 0.0 {
            self
        } else {
            TestFunction::Shifted { inner: Box::new(self), t }
        }
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        match self {
            TestFunction::Bump { scale, modulation } => {
                let amp = psi(x / scale) / scale;
                if amp == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::from_polar(amp, -modulation * x)
                }
            }
            TestFunction::Samples { x: grid, values } => {
                if grid.is_empty() || x < grid[0] || x > *grid.last().unwrap() {
                    return Complex64::new(0.0, 0.0);
                }
                let i = match grid.binary_search_by(|g| g.partial_cmp(&x).unwrap()) {
                    Ok(i) => return values[i],
                    Err(i) => i,
                };
                let (x0, x1) = (grid[i - 1], grid[i]);
                let s = (x - x0) / (x1 - x0);
                values[i - 1] * (1.0 - s) + values[i] * s
            }
            TestFunction::LaguerreCombo { coeffs } => coeffs
                .iter()
                .enumerate()
                .map(|(n, c)| c * laguerre_basis_fn(n as u32, x.max(0.0)))
                .sum(),
            TestFunction::Shifted { inner, t } => {
                if x < *t {
                    Complex64::new(0.0, 0.0)
                } else {
                    inner.eval(x - t)
                }
            }
        }
    }

    /// Interval outside which the function is zero (or negligible for
    /// Laguerre combinations, whose exponential tail is cut at roundoff).
    pub fn support(&self) -> (f64, f64) {
        match self {
            TestFunction::Bump { scale, .. } => (0.0, *scale),
            TestFunction::Samples { x, .. } => {
                if x.is_empty() {
                    (0.0, 0.0)
                } else {
                    (x[0], *x.last().unwrap())
                }
            }
            TestFunction::LaguerreCombo { coeffs } => {
                // |l_n(x)| <= sqrt(2) e^{-x} poly_n(2x); x = 5n + 80 puts the
                // tail below 1e-16 of the peak for every retained degree.
                (0.0, 5.0 * coeffs.len() as f64 + 80.0)
            }
            TestFunction::Shifted { inner, t } => {
                let (a, b) = inner.support();
                (a + t, b + t)
            }
        }
    }

    /// Interior breakpoints (sample-grid kinks) for quadrature splitting.
    fn breakpoints(&self) -> Vec<f64> {
        match self {
            TestFunction::Samples { x, .. } => x.clone(),
            TestFunction::Shifted { inner, t } => {
                inner.breakpoints().iter().map(|b| b + t).collect()
            }
            _ => vec![],
        }
    }

    /// int f(x) dx over the support.
    pub fn integral(&self) -> Flagged<Complex64> {
        let (a, b) = self.support();
        quad::integrate_split(|x| self.eval(x), a, b, &self.breakpoints(), 1e-12)
    }

    /// int |f(x)|^2 dx.
    pub fn norm_sq(&self) -> Flagged<f64> {
        if let TestFunction::LaguerreCombo { coeffs } = self {
            // Orthonormal basis: Parseval is exact.
            return Flagged::converged(coeffs.iter().map(|c| c.norm_sqr()).sum());
        }
        let (a, b) = self.support();
        let r = quad::integrate_split(
            |x| Complex64::new(self.eval(x).norm_sqr(), 0.0),
            a,
            b,
            &self.breakpoints(),
            1e-12,
        );
        Flagged { value: r.value.re, status: r.status }
    }

    /// The transform (Af)(lambda) = (2 pi)^{-1/2} int e^{i x lambda} f(x) dx.
    pub fn fourier(&self, lambda: f64) -> Flagged<Complex64> {
        let norm = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
        match self {
            TestFunction::Bump { scale, modulation } => {
                // Reduces to Psi(mu) = int_0^1 psi(u) e^{i u mu} du at
                // mu = scale * (lambda - modulation).
                let mu = scale * (lambda - modulation);
                let r = bump_transform(mu);
                Flagged { value: r.value * norm, status: r.status }
            }
            TestFunction::LaguerreCombo { coeffs } => {
                // Closed form: int_0^inf l_n(x) e^{i x lambda} dx
                //   = (sqrt(2)/2) (zeta-1)^n / zeta^{n+1}, zeta = (1 - i lambda)/2.
                let zeta = Complex64::new(0.5, -0.5 * lambda);
                let ratio = (zeta - 1.0) / zeta;
                let mut pow = 1.0 / zeta;
                let mut acc = Complex64::new(0.0, 0.0);
                for c in coeffs {
                    acc += c * pow;
                    pow *= ratio;
                }
                Flagged::converged(acc * (std::f64::consts::SQRT_2 / 2.0) * norm)
            }
            _ => {
                let (a, b) = self.support();
                let r = quad::integrate_split(
                    |x| self.eval(x) * Complex64::from_polar(1.0, x * lambda),
                    a,
                    b,
                    &self.breakpoints(),
                    1e-12,
                );
                Flagged { value: r.value * norm, status: r.status }
            }
        }
    }

    /// Laplace transform int_0^inf e^{-s lambda} f(s) ds (entire in lambda
    /// since the support is compact or exponentially damped).
    pub fn laplace(&self, lambda: f64) -> Flagged<Complex64> {
        let (a, b) = self.support();
        quad::integrate_split(
            |s| self.eval(s) * (-s * lambda).exp(),
            a,
            b,
            &self.breakpoints(),
            1e-12,
        )
    }
}

/// Psi(mu) = int_0^1 psi(u) e^{i u mu} du, the transform of the unit bump.
///
/// The transform of this bump decays like exp(-c sqrt(|mu|)); beyond the
/// cutoff it is far below double precision and the quadrature is skipped.
pub fn bump_transform(mu: f64) -> Flagged<Complex64> {
    if mu.abs() > 4000.0 {
        return Flagged::converged(Complex64::new(0.0, 0.0));
    }
    quad::integrate(
        |u| Complex64::from_polar(psi(u), u * mu),
        0.0,
        1.0,
        1e-13,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn bump_is_normalized() {
        let f = TestFunction::bump(1.0, 0.0);
        let i = f.integral().value;
        assert_abs_diff_eq!(i.re, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(i.im, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn scaled_bump_keeps_unit_mass_and_shrinks_norm() {
        for n in [2.0, 8.0, 64.0] {
            let f = TestFunction::bump(n, 0.0);
            assert_abs_diff_eq!(f.integral().value.re, 1.0, epsilon = 1e-10);
            assert_abs_diff_eq!(f.norm_sq().value, psi_norm_sq() / n, epsilon = 1e-10);
        }
    }

    #[test]
    fn modulated_bump_transform_peaks_at_modulation() {
        let f = TestFunction::bump(4.0, 3.0);
        let at_peak = f.fourier(3.0).value;
        let away = f.fourier(0.0).value;
        let expected = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
        assert_abs_diff_eq!(at_peak.re, expected, epsilon = 1e-10);
        assert_abs_diff_eq!(at_peak.im, 0.0, epsilon = 1e-10);
        assert!(away.norm() < at_peak.norm());
    }

    #[test]
    fn transform_of_bump_matches_direct_quadrature() {
        let f = TestFunction::bump(2.0, 0.0);
        for lambda in [0.0, 1.5, -7.0, 30.0] {
            let fast = f.fourier(lambda).value;
            let direct = quad::integrate(
                |x| f.eval(x) * Complex64::from_polar(1.0, x * lambda),
                0.0,
                2.0,
                1e-13,
            )
            .value
                / (2.0 * std::f64::consts::PI).sqrt();
            assert!((fast - direct).norm() < 1e-11, "lambda={lambda}");
        }
    }

    #[test]
    fn shift_multiplies_transform_by_phase() {
        let f = TestFunction::bump(1.0, 0.0);
        let g = f.clone().shift(2.5);
        for lambda in [0.3, -4.0] {
            let lhs = g.fourier(lambda).value;
            let rhs = f.fourier(lambda).value * Complex64::from_polar(1.0, 2.5 * lambda);
            assert!((lhs - rhs).norm() < 1e-10);
        }
        assert_abs_diff_eq!(g.norm_sq().value, f.norm_sq().value, epsilon = 1e-10);
    }

    #[test]
    fn laguerre_combo_transform_matches_quadrature() {
        let f = TestFunction::LaguerreCombo {
            coeffs: vec![
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, -0.5),
                Complex64::new(0.25, 0.0),
            ],
        };
        for lambda in [0.0, 2.0, -9.0] {
            let fast = f.fourier(lambda).value;
            let (a, b) = f.support();
            let direct = quad::integrate(
                |x| f.eval(x) * Complex64::from_polar(1.0, x * lambda),
                a,
                b,
                1e-13,
            )
            .value
                / (2.0 * std::f64::consts::PI).sqrt();
            assert!((fast - direct).norm() < 1e-9, "lambda={lambda}");
        }
    }

    #[test]
    fn laguerre_combo_norm_is_parseval() {
        let f = TestFunction::LaguerreCombo {
            coeffs: vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)],
        };
        assert_abs_diff_eq!(f.norm_sq().value, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn samples_interpolation_and_integral() {
        // Triangle of height 1 on [1, 3]: integral 1, norm^2 = 2/3.
        let f = TestFunction::Samples {
            x: vec![1.0, 2.0, 3.0],
            values: vec![
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
            ],
        };
        assert_abs_diff_eq!(f.eval(1.5).re, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(f.integral().value.re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(f.norm_sq().value, 2.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn laplace_of_bump_at_zero_is_integral() {
        let f = TestFunction::bump(1.0, 0.0);
        assert_abs_diff_eq!(f.laplace(0.0).value.re, 1.0, epsilon = 1e-10);
        // Monotone decay in lambda for a positive function.
        assert!(f.laplace(1.0).value.re < 1.0);
        assert!(f.laplace(3.0).value.re < f.laplace(1.0).value.re);
    }
}
