//! The Laplace-side counterpart of the Fourier machinery: completely
//! monotone profiles synthesized from measures supported on the right half
//! line, Hankel quadratic forms evaluated in time and spectrally, and the
//! sufficient closability criterion (profile decay to zero).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::measure::{SpectralMeasure, Support};
use crate::quad::{self, Flagged, Status};
use crate::testfn::TestFunction;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Check that every density component admits the Laplace representation:
/// full-line supports make int e^{-t lambda} dM diverge at lambda -> -inf.
fn check_laplace_domain(measure: &SpectralMeasure) -> Result<()> {
    measure.validate()?;
    for c in measure.components() {
        if matches!(c.support(), Support::Line) {
            return Err(Error::Refused(
                "the measure has density on the whole line; e^{-t lambda} diverges on the \
                 negative tail, so no Laplace profile exists"
                    .into(),
            ));
        }
    }
    Ok(())
}

/// h(t) = (1/2pi) int e^{-t lambda} dM(lambda), for t > 0.
pub fn bernstein_profile(measure: &SpectralMeasure, t: f64) -> Result<Flagged<f64>> {
    check_laplace_domain(measure)?;
    if t <= 0.0 {
        return Err(Error::Domain("the Laplace profile is defined for t > 0".into()));
    }
    let mut value = 0.0;
    let mut status = Status::Converged;
    for c in measure.components() {
        let g = |l: f64| Complex64::new(c.eval(l) * (-t * l).exp(), 0.0);
        match c.support() {
            Support::Interval(a, b) => {
                let r = quad::integrate_split(g, a, b, &c.breakpoints(), 1e-12);
                value += r.value.re;
                status = status.merge(r.status);
            }
            Support::PositiveHalfLine => {
                // Doubling truncation: e^{-t lambda} defeats the polynomial
                // density once t*lambda is large.
                let mut radius = 16.0 / t;
                let r = quad::integrate_split(g, 0.0, radius, &c.breakpoints(), 1e-12);
                let mut acc = r.value.re;
                status = status.merge(r.status);
                for _ in 0..20 {
                    let inc = quad::integrate(&g, radius, 2.0 * radius, 1e-13).value.re;
                    acc += inc;
                    radius *= 2.0;
                    if inc.abs() <= 1e-13 * (1.0 + acc.abs()) {
                        break;
                    }
                }
                value += acc;
            }
            Support::Line => unreachable!("rejected by check_laplace_domain"),
        }
    }
    for a in &measure.atoms {
        value += a.mass * (-t * a.lambda).exp();
    }
    Ok(Flagged { value: value / TWO_PI, status })
}

/// A profile h(t) on t > 0: measure-synthesized or one of the closed forms
/// used as oracles and controls.
#[derive(Debug, Clone)]
pub enum HankelProfile {
    FromMeasure(SpectralMeasure),
    /// t^{-a}.
    PowerLaw { a: f64 },
    /// e^{-rate t}.
    Exponential { rate: f64 },
    Constant(f64),
    /// cos t: the standard non-monotone negative control.
    Cosine,
}

impl HankelProfile {
    pub fn eval(&self, t: f64) -> Result<Flagged<f64>> {
        match self {
            HankelProfile::FromMeasure(m) => bernstein_profile(m, t),
            HankelProfile::PowerLaw { a } => {
                if t <= 0.0 {
                    return Err(Error::Domain("power profile needs t > 0".into()));
                }
                Ok(Flagged::converged(t.powf(-a)))
            }
            HankelProfile::Exponential { rate } => Ok(Flagged::converged((-rate * t).exp())),
            HankelProfile::Constant(c) => Ok(Flagged::converged(*c)),
            HankelProfile::Cosine => Ok(Flagged::converged(t.cos())),
        }
    }

    /// Strength of the t^{-a} singularity at the origin, for integrability
    /// screening in the time-domain form.
    pub fn origin_exponent(&self) -> f64 {
        match self {
            HankelProfile::PowerLaw { a } => *a,
            _ => 0.0,
        }
    }
}

/// h[f,f] = int_0^inf h(t) (conj(f) star f)(t) dt, with
/// (f star g)(t) = int_0^t f(s) g(t-s) ds.
pub fn hankel_form_time(h: &HankelProfile, f: &TestFunction) -> Result<Flagged<f64>> {
    if h.origin_exponent() >= 1.0 {
        return Err(Error::Refused(format!(
            "profile singularity t^-{} is not integrable against the autoconvolution; \
             use the spectral evaluation",
            h.origin_exponent()
        )));
    }
    let (a, b) = f.support();
    if b <= a {
        return Ok(Flagged::converged(0.0));
    }
    let status = std::cell::Cell::new(Status::Converged);
    let conv = |t: f64| {
        let lo = (t - b).max(a);
        let hi = (t - a).min(b);
        if hi <= lo {
            return Complex64::new(0.0, 0.0);
        }
        quad::integrate(|s| f.eval(s).conj() * f.eval(t - s), lo, hi, 1e-11).value
    };
    let r = quad::integrate(
        |t| {
            let hv = h.eval(t).unwrap_or_else(|_| Flagged::approximate(0.0));
            status.set(status.get().merge(hv.status));
            conv(t) * hv.value
        },
        2.0 * a,
        2.0 * b,
        1e-8,
    );
    Ok(Flagged { value: r.value.re, status: r.status.merge(status.get()) })
}

/// Spectral evaluation h[f,f] = (1/2pi) int |int e^{-s lambda} f(s) ds|^2 dM.
pub fn hankel_form_spectral(measure: &SpectralMeasure, f: &TestFunction) -> Result<Flagged<f64>> {
    check_laplace_domain(measure)?;
    let mut value = 0.0;
    let mut status = Status::Converged;
    for a in &measure.atoms {
        let l = f.laplace(a.lambda);
        status = status.merge(l.status);
        value += a.mass * l.value.norm_sqr();
    }
    for c in measure.components() {
        let g = |l: f64| {
            let phi = c.eval(l);
            if phi == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            Complex64::new(phi * f.laplace(l).value.norm_sqr(), 0.0)
        };
        match c.support() {
            Support::Interval(a, b) => {
                let r = quad::integrate_split(g, a, b, &c.breakpoints(), 1e-10);
                value += r.value.re;
                status = status.merge(r.status);
            }
            Support::PositiveHalfLine => {
                // |Lf|^2 decays faster than any power for smooth f vanishing
                // at 0; double the radius until the increment is negligible.
                let mut radius = 32.0;
                let r = quad::integrate_split(g, 0.0, radius, &c.breakpoints(), 1e-10);
                let mut acc = r.value.re;
                status = status.merge(r.status);
                for _ in 0..12 {
                    let inc = quad::integrate(&g, radius, 2.0 * radius, 1e-11).value.re;
                    acc += inc;
                    radius *= 2.0;
                    if inc.abs() <= 1e-11 * (1.0 + acc.abs()) {
                        break;
                    }
                }
                value += acc;
            }
            Support::Line => unreachable!("rejected by check_laplace_domain"),
        }
    }
    Ok(Flagged { value: value / TWO_PI, status })
}

/// Worst signed violation of complete monotonicity: the most negative value
/// of (-1)^k Delta^k h(t) over the grid and orders k <= k_max, with the
/// forward-difference step proportional to t (profiles like t^{-a} vary
/// over decades, so a fixed step would be meaningless at both ends).
pub fn complete_monotonicity_residual(
    h: &HankelProfile,
    k_max: u32,
    t_grid: &[f64],
) -> Result<f64> {
    if k_max > 6 {
        return Err(Error::Domain(
            "finite-difference stencils above order 6 are too ill-conditioned".into(),
        ));
    }
    if t_grid.is_empty() || t_grid[0] <= 0.0 {
        return Err(Error::GridTooCoarse(
            "complete-monotonicity check needs a grid bounded away from 0".into(),
        ));
    }
    let mut worst = f64::INFINITY;
    for &t in t_grid {
        let step = 0.5 * t;
        for k in 0..=k_max {
            // (-1)^k Delta^k h(t) = sum_j (-1)^j binom(k, j) h(t + j step)
            let mut acc = 0.0;
            let mut binom = 1.0;
            for j in 0..=k {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                acc += sign * binom * h.eval(t + j as f64 * step)?.value;
                binom = binom * (k - j) as f64 / (j + 1) as f64;
            }
            worst = worst.min(acc);
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosabilityVerdict {
    /// The measure puts no mass on (-inf, 0] and the profile decays below
    /// tolerance: the sufficient condition holds.
    ClosableSufficientConditionMet,
    CriterionNotMet,
}

/// Decay threshold below which the profile counts as vanishing at infinity.
const DECAY_THRESHOLD: f64 = 1e-2;

/// Sufficient-condition check: M((-inf, 0]) = 0 by measure inspection, and
/// h decreasing to below threshold along the probe grid.
pub fn hankel_closability_flag(
    measure: &SpectralMeasure,
    t_probe: &[f64],
) -> Result<ClosabilityVerdict> {
    check_laplace_domain(measure)?;
    assert!(
        t_probe.len() >= 2 && t_probe.windows(2).all(|w| w[0] < w[1]) && t_probe[0] > 0.0,
        "probe grid must be increasing and positive"
    );
    let mass_left = measure.atoms.iter().any(|a| a.lambda <= 0.0)
        || measure.components().iter().any(|c| match c.support() {
            Support::Interval(a, _) => a < 0.0,
            Support::PositiveHalfLine => false,
            Support::Line => true,
        });
    if mass_left {
        return Ok(ClosabilityVerdict::CriterionNotMet);
    }
    let mut prev = f64::INFINITY;
    for &t in t_probe {
        let v = bernstein_profile(measure, t)?.value;
        if v > prev + 1e-12 {
            return Ok(ClosabilityVerdict::CriterionNotMet);
        }
        prev = v;
    }
    if prev < DECAY_THRESHOLD {
        Ok(ClosabilityVerdict::ClosableSufficientConditionMet)
    } else {
        Ok(ClosabilityVerdict::CriterionNotMet)
    }
}
