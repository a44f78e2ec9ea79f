//! Measures on the line: the data model for spectral measures with
//! polynomial growth, weighting, Cayley pushforward coefficients and the
//! Wiener atom statistic.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::quad::{self, Flagged, Status};
use crate::special::gamma;

pub const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Support of one absolutely continuous component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Support {
    Line,
    PositiveHalfLine,
    Interval(f64, f64),
}

/// One closed-form (or tabulated) piece of the absolutely continuous part.
///
/// The whitelisted family: a constant (Lebesgue multiple), the Lorentzian
/// profile amplitude/(1+lambda^2), the half-line power density
/// 2 pi Gamma(a)^{-1} lambda^{a-1} 1_{lambda>0}, a smooth compactly
/// supported window, and a tabulated grid with linear interpolation.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Density {
    /// Constant density `gamma` on the whole line.
    Lebesgue { gamma: f64 },
    /// amplitude / (1 + lambda^2).
    Lorentzian { amplitude: f64 },
    /// 2 pi Gamma(a)^{-1} lambda^{a-1} on lambda > 0, zero on lambda <= 0.
    Power { a: f64 },
    /// Smooth bump `height * exp(1 - 1/(1-u^2))`, u = (lambda-center)/halfwidth.
    Window { height: f64, center: f64, halfwidth: f64 },
    /// Tabulated values with linear interpolation, zero outside the grid.
    Table { lambda: Vec<f64>, phi: Vec<f64> },
    /// Sum of components.
    Sum { terms: Vec<Density> },
}

impl Density {
    fn flatten_into(&self, out: &mut Vec<Density>) {
        match self {
            Density::Sum { terms } => {
                for t in terms {
                    t.flatten_into(out);
                }
            }
            other => out.push(other.clone()),
        }
    }

    pub fn support(&self) -> Support {
        match self {
            Density::Lebesgue { .. } | Density::Lorentzian { .. } => Support::Line,
            Density::Power { .. } => Support::PositiveHalfLine,
            Density::Window { center, halfwidth, .. } => {
                Support::Interval(center - halfwidth, center + halfwidth)
            }
            Density::Table { lambda, .. } => Support::Interval(
                *lambda.first().unwrap_or(&0.0),
                *lambda.last().unwrap_or(&0.0),
            ),
            Density::Sum { .. } => unreachable!("flattened before use"),
        }
    }

    pub fn eval(&self, l: f64) -> f64 {
        match self {
            Density::Lebesgue { gamma } => *gamma,
            Density::Lorentzian { amplitude } => amplitude / (1.0 + l * l),
            Density::Power { a } => {
                if l > 0.0 {
                    TWO_PI / gamma(*a) * l.powf(a - 1.0)
                } else {
                    0.0
                }
            }
            Density::Window { height, center, halfwidth } => {
                let u = (l - center) / halfwidth;
                if u.abs() < 1.0 {
                    height * (1.0 - 1.0 / (1.0 - u * u)).exp()
                } else {
                    0.0
                }
            }
            Density::Table { lambda, phi } => {
                if lambda.is_empty() || l < lambda[0] || l > *lambda.last().unwrap() {
                    return 0.0;
                }
                let i = match lambda.binary_search_by(|x| x.partial_cmp(&l).unwrap()) {
                    Ok(i) => return phi[i],
                    Err(i) => i,
                };
                let (l0, l1) = (lambda[i - 1], lambda[i]);
                let t = (l - l0) / (l1 - l0);
                phi[i - 1] * (1.0 - t) + phi[i] * t
            }
            Density::Sum { terms } => terms.iter().map(|t| t.eval(l)).sum(),
        }
    }

    /// Taylor jet of the density at `l`, for tail integration by parts.
    /// Only meaningful for components with unbounded support.
    pub fn jet(&self, l: f64, order: usize) -> Jet {
        match self {
            Density::Lebesgue { gamma } => Jet::constant(*gamma, order),
            Density::Lorentzian { amplitude } => {
                let x = Jet::variable(l, order);
                Jet::constant(1.0, order).add(&x.mul(&x)).recip().scale(*amplitude)
            }
            Density::Power { a } => {
                if l > 0.0 {
                    Jet::variable(l, order).powf(a - 1.0).scale(TWO_PI / gamma(*a))
                } else {
                    Jet::constant(0.0, order)
                }
            }
            _ => Jet::constant(0.0, order),
        }
    }

    /// Minimal growth exponent that makes the weighted component finite.
    pub fn min_growth_p(&self) -> u32 {
        match self {
            Density::Lebesgue { .. } => 1,
            Density::Lorentzian { .. } => 0,
            // lambda^{a-1} (1+lambda^2)^{-p} is integrable at infinity iff a < 2p.
            Density::Power { a } => (a / 2.0).floor() as u32 + 1,
            Density::Window { .. } | Density::Table { .. } => 0,
            Density::Sum { terms } => terms.iter().map(|t| t.min_growth_p()).max().unwrap_or(0),
        }
    }

    /// Points where the density is not smooth (integration breakpoints).
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Density::Lebesgue { .. } | Density::Lorentzian { .. } => vec![],
            Density::Power { .. } => vec![0.0],
            Density::Window { center, halfwidth, .. } => {
                vec![center - halfwidth, *center, center + halfwidth]
            }
            Density::Table { lambda, .. } => lambda.clone(),
            Density::Sum { terms } => terms.iter().flat_map(|t| t.breakpoints()).collect(),
        }
    }
}

/// A point mass.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct Atom {
    pub lambda: f64,
    pub mass: f64,
}

/// A (possibly infinite) non-negative-or-real measure on the line with at
/// most polynomial growth: absolutely continuous components plus atoms.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SpectralMeasure {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<Density>,
    #[serde(default)]
    pub atoms: Vec<Atom>,
    /// Declared growth exponent p; inferred from the density when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub growth_p: Option<u32>,
    /// Optional declared lower bound for the density.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_hint: Option<f64>,
}

impl SpectralMeasure {
    pub fn new(density: Option<Density>, atoms: Vec<Atom>) -> Result<SpectralMeasure> {
        let m = SpectralMeasure { density, atoms, growth_p: None, gamma_hint: None };
        m.validate()?;
        Ok(m)
    }

    pub fn lebesgue(gamma: f64) -> SpectralMeasure {
        SpectralMeasure::new(Some(Density::Lebesgue { gamma }), vec![]).unwrap()
    }

    pub fn lorentzian(amplitude: f64) -> SpectralMeasure {
        SpectralMeasure::new(Some(Density::Lorentzian { amplitude }), vec![]).unwrap()
    }

    /// The half-line power measure 2 pi Gamma(a)^{-1} lambda^{a-1} d lambda.
    pub fn power(a: f64) -> SpectralMeasure {
        SpectralMeasure::new(Some(Density::Power { a }), vec![]).unwrap()
    }

    pub fn atom(lambda: f64, mass: f64) -> SpectralMeasure {
        SpectralMeasure::new(None, vec![Atom { lambda, mass }]).unwrap()
    }

    pub fn zero() -> SpectralMeasure {
        SpectralMeasure { density: None, atoms: vec![], growth_p: None, gamma_hint: None }
    }

    /// Add another measure (densities are summed, atoms concatenated).
    pub fn plus(&self, other: &SpectralMeasure) -> SpectralMeasure {
        let density = match (&self.density, &other.density) {
            (None, None) => None,
            (Some(d), None) | (None, Some(d)) => Some(d.clone()),
            (Some(a), Some(b)) => {
                Some(Density::Sum { terms: vec![a.clone(), b.clone()] })
            }
        };
        let mut atoms = self.atoms.clone();
        atoms.extend(other.atoms.iter().copied());
        SpectralMeasure { density, atoms, growth_p: None, gamma_hint: None }
    }

    pub fn validate(&self) -> Result<()> {
        for a in &self.atoms {
            if !a.mass.is_finite() || a.mass == 0.0 || !a.lambda.is_finite() {
                return Err(Error::InvalidMeasure(format!(
                    "atom at {} with mass {} must be finite and nonzero",
                    a.lambda, a.mass
                )));
            }
        }
        for (i, a) in self.atoms.iter().enumerate() {
            for b in &self.atoms[i + 1..] {
                if a.lambda == b.lambda {
                    return Err(Error::InvalidMeasure(format!(
                        "duplicate atom location {}",
                        a.lambda
                    )));
                }
            }
        }
        for c in &self.components() {
            if let Density::Table { lambda, phi } = c {
                if lambda.is_empty() {
                    return Err(Error::InvalidMeasure("tabulated density with empty table".into()));
                }
                if lambda.len() != phi.len() {
                    return Err(Error::InvalidMeasure(
                        "tabulated density: lambda and phi lengths differ".into(),
                    ));
                }
                if !lambda.windows(2).all(|w| w[0] < w[1]) {
                    return Err(Error::InvalidMeasure(
                        "tabulated density: lambda grid must be strictly increasing".into(),
                    ));
                }
            }
            if let Density::Power { a } = c {
                if *a <= 0.0 {
                    return Err(Error::InvalidMeasure("power density requires a > 0".into()));
                }
            }
        }
        if let Some(p) = self.growth_p {
            if p < self.min_growth_p() {
                return Err(Error::InvalidMeasure(format!(
                    "declared growth_p = {} does not certify: the weighted integral diverges (need p >= {})",
                    p,
                    self.min_growth_p()
                )));
            }
        }
        Ok(())
    }

    /// Flattened list of density components.
    pub fn components(&self) -> Vec<Density> {
        let mut out = Vec::new();
        if let Some(d) = &self.density {
            d.flatten_into(&mut out);
        }
        out
    }

    pub fn density_eval(&self, l: f64) -> f64 {
        self.density.as_ref().map_or(0.0, |d| d.eval(l))
    }

    fn min_growth_p(&self) -> u32 {
        self.density.as_ref().map_or(0, |d| d.min_growth_p())
    }

    /// Effective growth exponent: the declared one, or the inferred minimum.
    pub fn growth_p(&self) -> u32 {
        self.growth_p.unwrap_or_else(|| self.min_growth_p())
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> =
            self.density.as_ref().map_or_else(Vec::new, |d| d.breakpoints());
        b.extend(self.atoms.iter().map(|a| a.lambda));
        b
    }

    /// Whether all density components have compact support.
    pub fn has_compact_density(&self) -> bool {
        self.components()
            .iter()
            .all(|c| matches!(c.support(), Support::Interval(_, _)))
    }

    /// Numerical certificate for the declared growth exponent: the truncated
    /// weighted variation integral must form a monotone Cauchy sequence as
    /// the truncation radius doubles.
    pub fn certify_growth(&self, p: u32, rel_tol: f64) -> Result<f64> {
        let w = |l: f64| self.density_eval(l).abs() * (1.0 + l * l).powi(-(p as i32));
        let breaks = self.breakpoints();
        let mut total = quad::integrate_real(w, -16.0, 16.0, &breaks, 1e-10).value;
        let mut radius = 16.0;
        let mut increment = f64::INFINITY;
        for _ in 0..40 {
            let inc = quad::integrate_real(&w, -2.0 * radius, -radius, &breaks, 1e-10).value
                + quad::integrate_real(&w, radius, 2.0 * radius, &breaks, 1e-10).value;
            if inc > increment * 1.0000001 {
                return Err(Error::InvalidMeasure(format!(
                    "growth certification failed at p = {p}: increments do not decrease"
                )));
            }
            increment = inc;
            total += inc;
            radius *= 2.0;
            if inc <= rel_tol * total.max(1e-300) {
                let atom_part: f64 = self
                    .atoms
                    .iter()
                    .map(|a| a.mass.abs() * (1.0 + a.lambda * a.lambda).powi(-(p as i32)))
                    .sum();
                return Ok(total + atom_part);
            }
        }
        Err(Error::InvalidMeasure(format!(
            "growth certification failed: integral does not stabilize at p = {p}"
        )))
    }
}

/// ess-inf of the density over a sampling grid; the semiboundedness witness.
pub fn ess_inf_density(measure: &SpectralMeasure, grid: &[f64]) -> Result<f64> {
    measure.validate()?;
    if grid.is_empty() {
        return Err(Error::InvalidMeasure("ess_inf_density requires a nonempty grid".into()));
    }
    Ok(grid.iter().map(|&l| measure.density_eval(l)).fold(f64::INFINITY, f64::min))
}

/// A measure with certified finite total variation: a spectral measure seen
/// through the weight (1 + lambda^2)^{-p}.
#[derive(Debug, Clone)]
pub struct FiniteMeasure {
    base: SpectralMeasure,
    weight_p: u32,
    total_variation: f64,
}

impl FiniteMeasure {
    pub fn base(&self) -> &SpectralMeasure {
        &self.base
    }

    pub fn weight_p(&self) -> u32 {
        self.weight_p
    }

    /// |m|(R), computed at construction.
    pub fn total_variation(&self) -> f64 {
        self.total_variation
    }

    /// m(R) (signed total mass).
    pub fn total_mass(&self) -> f64 {
        let ac = if self.base.density.is_some() {
            line_weighted_integral(&self.base, self.weight_p, |_| Complex64::new(1.0, 0.0), 1e-12)
                .value
                .re
        } else {
            0.0
        };
        ac + self.atoms().iter().map(|a| a.mass).sum::<f64>()
    }

    /// Weighted density phi(lambda) (1 + lambda^2)^{-p}.
    pub fn density_eval(&self, l: f64) -> f64 {
        self.base.density_eval(l) * (1.0 + l * l).powi(-(self.weight_p as i32))
    }

    /// Atoms with weighted masses.
    pub fn atoms(&self) -> Vec<Atom> {
        self.base
            .atoms
            .iter()
            .map(|a| Atom {
                lambda: a.lambda,
                mass: a.mass * (1.0 + a.lambda * a.lambda).powi(-(self.weight_p as i32)),
            })
            .collect()
    }
}

/// Weight a measure by (1 + lambda^2)^{-p}. Refuses when p is below the
/// declared growth exponent (the result would not be finite).
pub fn weight_measure(measure: &SpectralMeasure, p: u32) -> Result<FiniteMeasure> {
    measure.validate()?;
    if p < measure.growth_p() {
        return Err(Error::NonFiniteWeight { given: p, required: measure.growth_p() });
    }
    let total_variation = measure.certify_growth(p, 1e-9)?;
    Ok(FiniteMeasure { base: measure.clone(), weight_p: p, total_variation })
}

/// The Cayley map lambda -> (lambda - i)/(lambda + i) written as
/// exp(i (theta + pi)) with theta = 2 atan(lambda).
pub fn cayley_point(lambda: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * lambda.atan() + std::f64::consts::PI)
}

/// Integral of f(lambda) against the weighted density of `measure` over the
/// line, computed in the angle variable theta = 2 atan(lambda); the weight
/// (1+lambda^2)^{-p} combines with the Jacobian into (1+lambda^2)^{1-p},
/// which is bounded for every whitelisted component once p >= growth_p.
pub(crate) fn line_weighted_integral<F: Fn(f64) -> Complex64>(
    base: &SpectralMeasure,
    p: u32,
    f: F,
    tol: f64,
) -> Flagged<Complex64> {
    let pw = 1.0 - p as f64;
    let g = |theta: f64| {
        let l = (0.5 * theta).tan();
        if !l.is_finite() {
            return Complex64::new(0.0, 0.0);
        }
        let phi = base.density_eval(l);
        if phi == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        f(theta) * (phi * (1.0 + l * l).powf(pw) * 0.5)
    };
    let mut breaks: Vec<f64> = base.breakpoints().iter().map(|l| 2.0 * l.atan()).collect();
    breaks.push(0.0);
    quad::integrate_split(g, -std::f64::consts::PI, std::f64::consts::PI, &breaks, tol)
}

/// n-th Cayley coefficient of a finite measure:
/// int ((lambda - i)/(lambda + i))^{-n} dm(lambda).
pub fn cayley_coeff(m: &FiniteMeasure, n: i32) -> Flagged<Complex64> {
    let mut value = Complex64::new(0.0, 0.0);
    for a in m.atoms() {
        // omega(lambda)^{-n} = exp(-i n (theta + pi))
        let theta = 2.0 * a.lambda.atan() + std::f64::consts::PI;
        value += Complex64::from_polar(a.mass, -(n as f64) * theta);
    }
    let mut status = Status::Converged;
    if m.base.density.is_some() {
        // omega^{-n} in the angle variable is exp(-i n (theta + pi)).
        let nf = n as f64;
        let sign = Complex64::from_polar(1.0, -nf * std::f64::consts::PI);
        let r = line_weighted_integral(
            &m.base,
            m.weight_p,
            |theta| sign * Complex64::from_polar(1.0, -nf * theta),
            1e-11,
        );
        value += r.value;
        status = r.status;
    }
    Flagged { value, status }
}

/// Circle Fourier coefficients of the Cayley pushforward, indices -n_max..n_max.
#[derive(Debug, Clone)]
pub struct CircleCoefficients {
    pub n_max: i32,
    values: Vec<Complex64>,
    pub status: Status,
}

impl CircleCoefficients {
    pub fn compute(m: &FiniteMeasure, n_max: i32) -> CircleCoefficients {
        assert!(n_max >= 0);
        let mut values = Vec::with_capacity(2 * n_max as usize + 1);
        let mut status = Status::Converged;
        // Real source measure: c_{-n} = conj(c_n).
        let mut upper = Vec::with_capacity(n_max as usize + 1);
        for n in 0..=n_max {
            let c = cayley_coeff(m, n);
            status = status.merge(c.status);
            upper.push(c.value);
        }
        for n in (1..=n_max).rev() {
            values.push(upper[n as usize].conj());
        }
        values.extend(upper);
        CircleCoefficients { n_max, values, status }
    }

    pub fn get(&self, n: i32) -> Complex64 {
        self.values[(n + self.n_max) as usize]
    }
}

/// Wiener mean-square statistic (2N+1)^{-1} sum_{|n| <= N} |c_n|^2.
/// Tends to the sum of squared pushforward atom masses.
pub fn wiener_atom_statistic(m: &FiniteMeasure, n: u32) -> Flagged<f64> {
    assert!(n >= 1, "wiener_atom_statistic requires N >= 1");
    let coeffs = CircleCoefficients::compute(m, n as i32);
    let mut acc = coeffs.get(0).norm_sqr();
    for k in 1..=n as i32 {
        acc += 2.0 * coeffs.get(k).norm_sqr();
    }
    Flagged { value: acc / (2.0 * n as f64 + 1.0), status: coeffs.status }
}

/// Mean of |c_n|^2 over n_min <= |n| <= N. In the Riesz-Brothers pipeline the
/// low-order coefficients carry the absolutely continuous contribution, so the
/// atom detector averages only the constant tail n >= p.
pub fn wiener_tail_statistic(m: &FiniteMeasure, n_min: u32, n: u32) -> Flagged<f64> {
    assert!(n >= n_min && n_min >= 1);
    let coeffs = CircleCoefficients::compute(m, n as i32);
    let mut acc = 0.0;
    for k in n_min as i32..=n as i32 {
        acc += coeffs.get(k).norm_sqr();
    }
    Flagged { value: acc / (n - n_min + 1) as f64, status: coeffs.status }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn ess_inf_constant() {
        let grid: Vec<f64> = (-100..=100).map(|i| i as f64).collect();
        assert_abs_diff_eq!(ess_inf_density(&SpectralMeasure::lebesgue(1.0), &grid).unwrap(), 1.0);
    }

    #[test]
    fn ess_inf_shifted_lorentzian() {
        // phi = 1 + (1+l^2)^{-1} on [-100, 100]: minimum at the edges.
        let m = SpectralMeasure::lebesgue(1.0).plus(&SpectralMeasure::lorentzian(1.0));
        let grid: Vec<f64> = (-1000..=1000).map(|i| i as f64 * 0.1).collect();
        let v = ess_inf_density(&m, &grid).unwrap();
        assert_abs_diff_eq!(v, 1.0 + 1.0 / 10001.0, epsilon = 1e-12);
    }

    #[test]
    fn ess_inf_power_half() {
        let grid: Vec<f64> = (-100..=100).map(|i| i as f64 * 0.5).collect();
        assert_abs_diff_eq!(ess_inf_density(&SpectralMeasure::power(0.5), &grid).unwrap(), 0.0);
    }

    #[test]
    fn empty_grid_rejected() {
        assert!(ess_inf_density(&SpectralMeasure::lebesgue(1.0), &[]).is_err());
    }

    #[test]
    fn empty_table_rejected() {
        let m = SpectralMeasure {
            density: Some(Density::Table { lambda: vec![], phi: vec![] }),
            atoms: vec![],
            growth_p: None,
            gamma_hint: None,
        };
        assert!(m.validate().is_err());
    }

    #[test]
    fn weight_lebesgue_total_mass_pi() {
        let m = weight_measure(&SpectralMeasure::lebesgue(1.0), 1).unwrap();
        assert_abs_diff_eq!(m.total_variation(), PI, epsilon = 1e-8);
        assert_abs_diff_eq!(m.total_mass(), PI, epsilon = 1e-10);
    }

    #[test]
    fn weight_refused_below_growth() {
        assert!(matches!(
            weight_measure(&SpectralMeasure::lebesgue(1.0), 0),
            Err(Error::NonFiniteWeight { .. })
        ));
    }

    #[test]
    fn weight_atoms() {
        let m = weight_measure(&SpectralMeasure::atom(0.0, TWO_PI), 1).unwrap();
        assert_abs_diff_eq!(m.atoms()[0].mass, TWO_PI, epsilon = 1e-14);
        let m = weight_measure(&SpectralMeasure::atom(1.0, 2.0), 2).unwrap();
        assert_abs_diff_eq!(m.atoms()[0].mass, 0.5, epsilon = 1e-14);
    }

    #[test]
    fn cayley_lebesgue() {
        let m = weight_measure(&SpectralMeasure::lebesgue(1.0), 1).unwrap();
        let c0 = cayley_coeff(&m, 0);
        assert_abs_diff_eq!(c0.value.re, PI, epsilon = 1e-9);
        assert_abs_diff_eq!(c0.value.im, 0.0, epsilon = 1e-9);
        for n in 1..=30 {
            let c = cayley_coeff(&m, n).value;
            assert!(c.norm() < 1e-6, "c_{n} = {c}");
        }
    }

    #[test]
    fn cayley_atom_alternates() {
        let m = weight_measure(&SpectralMeasure::atom(0.0, TWO_PI), 1).unwrap();
        let c1 = cayley_coeff(&m, 1).value;
        assert_abs_diff_eq!(c1.re, -TWO_PI, epsilon = 1e-12);
        assert_abs_diff_eq!(c1.im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn cayley_hermitian_symmetry() {
        let base = SpectralMeasure::lorentzian(1.0)
            .plus(&SpectralMeasure::atom(0.7, 1.3))
            .plus(&SpectralMeasure::power(0.5));
        let m = weight_measure(&base, 1).unwrap();
        for n in [1, 2, 5] {
            let cp = cayley_coeff(&m, n).value;
            let cm = cayley_coeff(&m, -n).value;
            assert_abs_diff_eq!(cp.re, cm.re, epsilon = 1e-9);
            assert_abs_diff_eq!(cp.im, -cm.im, epsilon = 1e-9);
        }
    }

    #[test]
    fn cayley_linearity() {
        let m1 = SpectralMeasure::lorentzian(1.0);
        let m2 = SpectralMeasure::atom(0.5, 2.0);
        let w1 = weight_measure(&m1, 1).unwrap();
        let w2 = weight_measure(&m2, 1).unwrap();
        let ws = weight_measure(&m1.plus(&m2), 1).unwrap();
        for n in [0, 1, 3] {
            let lhs = cayley_coeff(&ws, n).value;
            let rhs = cayley_coeff(&w1, n).value + cayley_coeff(&w2, n).value;
            assert!((lhs - rhs).norm() < 1e-9);
        }
    }

    #[test]
    fn wiener_statistic_lebesgue_decays() {
        let m = weight_measure(&SpectralMeasure::lebesgue(1.0), 1).unwrap();
        let s30 = wiener_atom_statistic(&m, 30).value;
        assert!(s30 <= PI * PI / 61.0 + 1e-6, "s30 = {s30}");
        let s10 = wiener_atom_statistic(&m, 10).value;
        assert!(s30 < s10);
    }

    #[test]
    fn wiener_statistic_atom_constant() {
        let m = weight_measure(&SpectralMeasure::atom(0.0, TWO_PI), 1).unwrap();
        for n in [5, 17, 30] {
            assert_abs_diff_eq!(
                wiener_atom_statistic(&m, n).value,
                4.0 * PI * PI,
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn wiener_statistic_zero_measure() {
        let m = weight_measure(&SpectralMeasure::zero(), 1).unwrap();
        assert_abs_diff_eq!(wiener_atom_statistic(&m, 8).value, 0.0);
    }

    #[test]
    fn weight_composition_on_densities() {
        let m = SpectralMeasure::lebesgue(2.0).plus(&SpectralMeasure::lorentzian(0.5));
        let w1 = weight_measure(&m, 1).unwrap();
        let w12 = weight_measure(&m, 3).unwrap();
        for l in [-3.0, -0.5, 0.0, 1.0, 7.0] {
            let once = w1.density_eval(l) * (1.0 + l * l).powi(-2);
            assert_abs_diff_eq!(once, w12.density_eval(l), epsilon = 1e-14);
        }
    }

    #[test]
    fn json_roundtrip() {
        let m = SpectralMeasure {
            density: Some(Density::Sum {
                terms: vec![
                    Density::Lebesgue { gamma: 1.0 },
                    Density::Power { a: 0.5 },
                ],
            }),
            atoms: vec![Atom { lambda: 0.0, mass: TWO_PI }],
            growth_p: Some(1),
            gamma_hint: None,
        };
        let s = serde_json::to_string(&m).unwrap();
        let back: SpectralMeasure = serde_json::from_str(&s).unwrap();
        assert_eq!(m, back);
    }
}
