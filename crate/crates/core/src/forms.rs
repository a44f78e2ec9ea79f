//! Quadratic forms: spectral and time-domain evaluation, the finite Toeplitz
//! sections obtained through the Cayley/Laguerre correspondence, and the
//! closability defect probe.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::{self, SpectralMeasure};
use crate::quad::{self, Flagged, Status};
use crate::testfn::TestFunction;

#[cfg(test)]
const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// The quadratic form evaluated spectrally:
/// w[f,f] = int |(Af)(lambda)|^2 dM(lambda),
/// with (Af)(lambda) = (2 pi)^{-1/2} int e^{i x lambda} f(x) dx.
pub fn spectral_form(measure: &SpectralMeasure, f: &TestFunction) -> Result<Flagged<f64>> {
    measure.validate()?;
    let mut status = Status::Converged;
    let mut value = 0.0;
    for a in &measure.atoms {
        let t = f.fourier(a.lambda);
        status = status.merge(t.status);
        value += a.mass * t.value.norm_sqr();
    }
    if measure.density.is_some() {
        let mut breaks = measure.breakpoints();
        // Hint the quadrature at where the transform of f concentrates.
        if let TestFunction::Bump { scale, modulation } = f {
            let w = 4000.0 / scale;
            breaks.extend([*modulation, modulation - w, modulation + w]);
        }
        let inner_status = std::cell::Cell::new(Status::Converged);
        let r = quad::integrate_line(
            |l| {
                let phi = measure.density_eval(l);
                if phi == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                let t = f.fourier(l);
                inner_status.set(inner_status.get().merge(t.status));
                Complex64::new(phi * t.value.norm_sqr(), 0.0)
            },
            &breaks,
            1e-10,
        );
        status = status.merge(r.status).merge(inner_status.get());
        value += r.value.re;
    }
    Ok(Flagged { value, status })
}

/// The same form evaluated in the time domain from a convolution kernel
/// w(u), using the correlation G(u) = int f(y) conj(f(y+u)) dy:
/// w[f,f] = int_0^U 2 Re(w(u) G(u)) du for Hermitian kernels.
///
/// `origin_exponent` declares the strength a of a |u|^{-a} singularity of
/// the kernel at u = 0. Values a < 1 are absolutely integrable. a = 1 is
/// accepted: the principal-value part stays bounded after symmetrization
/// (Hermitian kernels have pure-imaginary residue beta at the pole, and
/// Im G(u) = O(u)), and the distributional completion beta (u - i0)^{-1}
/// contributes the point part i pi beta delta, added here from the residue
/// estimate. Anything stronger is refused.
pub fn time_domain_form<W: Fn(f64) -> Complex64>(
    w: W,
    f: &TestFunction,
    origin_exponent: f64,
) -> Result<Flagged<f64>> {
    if origin_exponent > 1.0 {
        return Err(Error::Refused(format!(
            "kernel singularity |u|^-{origin_exponent} is not locally integrable against the \
             correlation; use the spectral evaluation"
        )));
    }
    let (a, b) = f.support();
    let width = b - a;
    if width <= 0.0 {
        return Ok(Flagged::converged(0.0));
    }
    let corr = |u: f64| {
        quad::integrate(|y| f.eval(y) * f.eval(y + u).conj(), a, b - u, 1e-11).value
    };
    let r = quad::integrate(
        |u| Complex64::new(2.0 * (w(u) * corr(u)).re, 0.0),
        0.0,
        width,
        1e-8,
    );
    let mut value = r.value.re;
    let mut status = r.status;
    if origin_exponent == 1.0 {
        let eps = 1e-7;
        let beta = eps * w(eps);
        let norm_sq = f.norm_sq();
        status = status.merge(norm_sq.status);
        value -= std::f64::consts::PI * beta.im * norm_sq.value;
    }
    Ok(Flagged { value, status })
}

/// t_n = (1/pi) int (1+lambda^2)^{-1} ((lambda-i)/(lambda+i))^{-n} dM.
///
/// The (1+lambda^2)^{-1} weight converges exactly for growth exponents up
/// to 1; beyond that the Toeplitz correspondence breaks down and the call
/// is refused.
pub fn toeplitz_coeff(m: &SpectralMeasure, n: i32) -> Result<Flagged<Complex64>> {
    m.validate()?;
    if m.growth_p() > 1 {
        return Err(Error::OutOfCorrespondenceRange(m.growth_p()));
    }
    let weighted = measure::weight_measure(m, 1)?;
    let c = measure::cayley_coeff(&weighted, n);
    Ok(Flagged { value: c.value / std::f64::consts::PI, status: c.status })
}

/// Finite Toeplitz section built from t_0 .. t_{N-1}; Hermitian by
/// construction (t_{-n} = conj(t_n)).
#[derive(Debug, Clone, Serialize)]
pub struct ToeplitzSection {
    pub dim: usize,
    /// t_0 .. t_{dim-1}.
    pub coeffs: Vec<Complex64>,
    pub status: Status,
}

impl ToeplitzSection {
    pub fn coeff(&self, n: i32) -> Complex64 {
        let t = self.coeffs[n.unsigned_abs() as usize];
        if n < 0 {
            t.conj()
        } else {
            t
        }
    }

    pub fn matrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.dim, self.dim, |r, c| self.coeff(r as i32 - c as i32))
    }

    /// t[g, g] = sum t_{n-m} g_m conj(g_n); real for Hermitian sections.
    pub fn quadratic(&self, g: &[Complex64]) -> f64 {
        assert!(g.len() <= self.dim, "coefficient vector longer than the section");
        let mut acc = Complex64::new(0.0, 0.0);
        for (n, gn) in g.iter().enumerate() {
            for (m, gm) in g.iter().enumerate() {
                acc += self.coeff(n as i32 - m as i32) * gm * gn.conj();
            }
        }
        acc.re
    }
}

pub fn toeplitz_section(m: &SpectralMeasure, n: usize) -> Result<ToeplitzSection> {
    assert!(n >= 1);
    let mut coeffs = Vec::with_capacity(n);
    let mut status = Status::Converged;
    for k in 0..n as i32 {
        let t = toeplitz_coeff(m, k)?;
        status = status.merge(t.status);
        coeffs.push(t.value);
    }
    Ok(ToeplitzSection { dim: n, coeffs, status })
}

/// Sorted eigenvalues of the Hermitian section and their extremes.
pub fn section_spectrum(t: &ToeplitzSection) -> (f64, f64, Vec<f64>) {
    let eig = t.matrix().symmetric_eigen();
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    (vals[0], *vals.last().unwrap(), vals)
}

/// |w[Ug, Ug] - g* T_N g| where Ug is the Laguerre-basis lift of g.
pub fn correspondence_residual(
    m: &SpectralMeasure,
    g: &[Complex64],
    n: usize,
) -> Result<Flagged<f64>> {
    assert!(g.len() <= n, "g must be supported on indices < N");
    let section = toeplitz_section(m, n)?;
    let lifted = TestFunction::LaguerreCombo { coeffs: g.to_vec() };
    let spectral = spectral_form(m, &lifted)?;
    Ok(Flagged {
        value: (spectral.value - section.quadratic(g)).abs(),
        status: spectral.status.merge(section.status),
    })
}

/// One row of the closability probe table.
#[derive(Debug, Clone, Serialize)]
pub struct DefectRow {
    pub scale: u32,
    pub norm_sq: f64,
    pub form: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DefectVerdict {
    DefectDetected,
    NoDefectDetected,
}

#[derive(Debug, Clone, Serialize)]
pub struct DefectProbe {
    pub lambda0: f64,
    pub rows: Vec<DefectRow>,
    pub verdict: DefectVerdict,
    pub status: Status,
}

/// Probe the form with spreading bumps f_n(x) = n^{-1} psi(x/n) e^{-i
/// lambda0 x}: their L^2 norms shrink like 1/n while the spectral mass
/// concentrates at lambda0, so a point mass there keeps w[f_n, f_n] bounded
/// below and the ratio w/||f||^2 grows linearly. Ratio growth by more than
/// a decade across the scale range is ruled a defect.
pub fn defect_probe(
    m: &SpectralMeasure,
    lambda0: f64,
    scales: &[u32],
) -> Result<DefectProbe> {
    assert!(
        scales.len() >= 2 && scales.windows(2).all(|w| w[0] < w[1]),
        "scales must be increasing with at least two entries"
    );
    let mut rows = Vec::with_capacity(scales.len());
    let mut status = Status::Converged;
    for &n in scales {
        let f = TestFunction::bump(n as f64, lambda0);
        let norm_sq = f.norm_sq();
        let form = spectral_form(m, &f)?;
        status = status.merge(norm_sq.status).merge(form.status);
        rows.push(DefectRow {
            scale: n,
            norm_sq: norm_sq.value,
            form: form.value,
            ratio: form.value / norm_sq.value,
        });
    }
    let first = rows.first().unwrap().ratio;
    let last = rows.last().unwrap().ratio;
    let verdict = if last > 10.0 * first {
        DefectVerdict::DefectDetected
    } else {
        DefectVerdict::NoDefectDetected
    };
    Ok(DefectProbe { lambda0, rows, verdict, status })
}

/// |w[S_t f, S_t f] - w[f, f]|: the shift multiplies the transform by a
/// unimodular factor, so the spectral form is invariant.
pub fn shift_invariance_residual(
    m: &SpectralMeasure,
    f: &TestFunction,
    t: f64,
) -> Result<Flagged<f64>> {
    assert!(t >= 0.0);
    let base = spectral_form(m, f)?;
    let shifted = spectral_form(m, &f.clone().shift(t))?;
    Ok(Flagged {
        value: (shifted.value - base.value).abs(),
        status: base.status.merge(shifted.status),
    })
}
