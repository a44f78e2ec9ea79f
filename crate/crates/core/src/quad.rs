//! Adaptive quadrature primitives shared by every module.
//!
//! The basic rule is a 15-point Gauss-Legendre panel; adaptivity compares a
//! panel against the sum of its two halves and bisects until the difference
//! falls below the local error budget. All integrands are complex-valued;
//! real integrals go through [`integrate_real`].

use num_complex::Complex64;
use std::sync::OnceLock;

/// Status of a quadrature (or any numerical) result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Converged,
    Approximate,
}

impl Status {
    pub fn merge(self, other: Status) -> Status {
        if self == Status::Converged && other == Status::Converged {
            Status::Converged
        } else {
            Status::Approximate
        }
    }
}

/// A value together with the convergence status of the computation.
#[derive(Debug, Clone, Copy)]
pub struct Flagged<T> {
    pub value: T,
    pub status: Status,
}

impl<T> Flagged<T> {
    pub fn converged(value: T) -> Self {
        Flagged { value, status: Status::Converged }
    }
    pub fn approximate(value: T) -> Self {
        Flagged { value, status: Status::Approximate }
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1], computed once by Newton
/// iteration on the Legendre recurrence.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Chebyshev-like initial guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            // Evaluate P_n and P_n' at x.
            let (mut p0, mut p1) = (1.0_f64, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        // Recompute derivative at the converged node for the weight.
        let (mut p0, mut p1) = (1.0_f64, x);
        for k in 2..=n {
            let kf = k as f64;
            let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
            p0 = p1;
            p1 = p2;
        }
        let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn gl15() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(15))
}

fn panel<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Complex64 {
    let (nodes, weights) = gl15();
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, w) in nodes.iter().zip(weights) {
        acc += f(c + h * x) * *w;
    }
    acc * h
}

/// One interval in the global-adaptive scheme: its two-half Gauss estimate
/// and the error indicator |halves - whole|.
struct Region {
    err: f64,
    a: f64,
    b: f64,
    value: Complex64,
}

impl PartialEq for Region {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Region {}
impl PartialOrd for Region {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Region {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn refine<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, whole: Complex64) -> Region {
    let m = 0.5 * (a + b);
    let halves = panel(f, a, m) + panel(f, m, b);
    Region { err: (halves - whole).norm(), a, b, value: halves }
}

const MAX_REGIONS: usize = 40_000;

/// Adaptive integral of a complex integrand over the finite interval [a, b]
/// to absolute tolerance `tol`. Globally adaptive: the interval with the
/// worst error indicator is bisected until the summed indicator meets the
/// tolerance or the panel budget runs out (then the result is flagged).
pub fn integrate<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, tol: f64) -> Flagged<Complex64> {
    if a == b {
        return Flagged::converged(Complex64::new(0.0, 0.0));
    }
    let tol = tol.max(1e-300);
    let mut heap = std::collections::BinaryHeap::new();
    let mut settled: Vec<Region> = Vec::new();
    let first = refine(&f, a, b, panel(&f, a, b));
    let mut total_err = first.err;
    heap.push(first);
    let mut count = 1usize;
    while total_err > tol && count < MAX_REGIONS {
        let r = match heap.pop() {
            Some(r) => r,
            None => break,
        };
        let m = 0.5 * (r.a + r.b);
        if m <= r.a || m >= r.b {
            // Interval at roundoff width: its error cannot be reduced.
            total_err -= r.err;
            settled.push(r);
            continue;
        }
        total_err -= r.err;
        let left = refine(&f, r.a, m, panel(&f, r.a, m));
        let right = refine(&f, m, r.b, panel(&f, m, r.b));
        total_err += left.err + right.err;
        heap.push(left);
        heap.push(right);
        count += 1;
    }
    let mut value = Complex64::new(0.0, 0.0);
    for r in heap.iter().chain(settled.iter()) {
        value += r.value;
    }
    let status = if total_err <= tol { Status::Converged } else { Status::Approximate };
    Flagged { value, status }
}

/// Adaptive integral split at the given interior breakpoints.
pub fn integrate_split<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: f64,
) -> Flagged<Complex64> {
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|x| *x > a && *x < b).collect();
    pts.push(a);
    pts.push(b);
    pts.sort_by(|p, q| p.partial_cmp(q).unwrap());
    pts.dedup();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut status = Status::Converged;
    let per = tol / (pts.len() - 1) as f64;
    for w in pts.windows(2) {
        let r = integrate(&f, w[0], w[1], per);
        acc += r.value;
        status = status.merge(r.status);
    }
    Flagged { value: acc, status }
}

/// Real-valued convenience wrapper around [`integrate_split`].
pub fn integrate_real<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: f64,
) -> Flagged<f64> {
    let r = integrate_split(|x| Complex64::new(f(x), 0.0), a, b, breaks, tol);
    Flagged { value: r.value.re, status: r.status }
}

/// Integral over the whole real line via the substitution lambda = tan(theta/2),
/// which maps R onto (-pi, pi) with d(lambda) = (1 + lambda^2) dtheta / 2.
///
/// The integrand must be absolutely integrable; `breaks` are breakpoints in
/// the lambda variable (density kinks, spectral concentration points).
pub fn integrate_line<F: Fn(f64) -> Complex64>(
    f: F,
    breaks: &[f64],
    tol: f64,
) -> Flagged<Complex64> {
    let g = |theta: f64| {
        let t = (0.5 * theta).tan();
        if !t.is_finite() {
            return Complex64::new(0.0, 0.0);
        }
        f(t) * (0.5 * (1.0 + t * t))
    };
    let theta_breaks: Vec<f64> = breaks.iter().map(|l| 2.0 * l.atan()).collect();
    integrate_split(g, -std::f64::consts::PI, std::f64::consts::PI, &theta_breaks, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn polynomial_exact() {
        let r = integrate(|x| Complex64::new(x * x * x - 2.0 * x + 1.0, 0.0), -1.0, 3.0, 1e-12);
        // antiderivative x^4/4 - x^2 + x
        assert_abs_diff_eq!(r.value.re, (81.0 / 4.0 - 9.0 + 3.0) - (0.25 - 1.0 - 1.0), epsilon = 1e-12);
        assert_eq!(r.status, Status::Converged);
    }

    #[test]
    fn oscillatory_finite() {
        // int_0^10 cos(50 x) dx = sin(500)/50
        let r = integrate(|x| Complex64::new((50.0 * x).cos(), 0.0), 0.0, 10.0, 1e-12);
        assert_abs_diff_eq!(r.value.re, (500.0_f64).sin() / 50.0, epsilon = 1e-11);
    }

    #[test]
    fn endpoint_singularity() {
        // int_0^1 x^{-1/2} dx = 2
        let r = integrate(|x| Complex64::new(x.sqrt().recip(), 0.0), 0.0, 1.0, 1e-10);
        assert_abs_diff_eq!(r.value.re, 2.0, epsilon = 1e-8);
    }

    #[test]
    fn line_lorentzian() {
        let r = integrate_line(|l| Complex64::new(1.0 / (1.0 + l * l), 0.0), &[0.0], 1e-12);
        assert_abs_diff_eq!(r.value.re, std::f64::consts::PI, epsilon = 1e-12);
    }

    #[test]
    fn line_gaussian() {
        let r = integrate_line(|l| Complex64::new((-l * l).exp(), 0.0), &[0.0, -1.0, 1.0], 1e-12);
        assert_abs_diff_eq!(r.value.re, std::f64::consts::PI.sqrt(), epsilon = 1e-11);
    }
}
