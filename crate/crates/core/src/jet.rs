//! Truncated Taylor series ("jets") in one variable.
//!
//! Used to obtain high-order derivatives of closed-form densities at the
//! truncation point of a Fourier integral, where the tail is summed by
//! repeated integration by parts. A jet of order K stores the coefficients
//! c_k = f^(k)(x0) / k! of the expansion around the base point.

#[derive(Debug, Clone)]
pub struct Jet(pub Vec<f64>);

impl Jet {
    pub fn order(&self) -> usize {
        self.0.len() - 1
    }

    /// The constant jet of a value.
    pub fn constant(c: f64, order: usize) -> Jet {
        let mut v = vec![0.0; order + 1];
        v[0] = c;
        Jet(v)
    }

    /// The identity jet x at base point x0.
    pub fn variable(x0: f64, order: usize) -> Jet {
        let mut v = vec![0.0; order + 1];
        v[0] = x0;
        if order >= 1 {
            v[1] = 1.0;
        }
        Jet(v)
    }

    pub fn add(&self, rhs: &Jet) -> Jet {
        Jet(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet(self.0.iter().map(|a| a * s).collect())
    }

    pub fn mul(&self, rhs: &Jet) -> Jet {
        let n = self.0.len();
        let mut out = vec![0.0; n];
        for k in 0..n {
            let mut acc = 0.0;
            for j in 0..=k {
                acc += self.0[j] * rhs.0[k - j];
            }
            out[k] = acc;
        }
        Jet(out)
    }

    /// self^p for real exponent p; the leading coefficient must be positive.
    pub fn powf(&self, p: f64) -> Jet {
        let n = self.0.len();
        let a0 = self.0[0];
        assert!(a0 > 0.0, "powf requires a positive leading coefficient");
        let mut out = vec![0.0; n];
        out[0] = a0.powf(p);
        for k in 1..n {
            // c_k = (1 / (k a_0)) sum_{j=1}^{k} ((p+1) j - k) a_j c_{k-j}
            let mut acc = 0.0;
            for j in 1..=k {
                acc += ((p + 1.0) * j as f64 - k as f64) * self.0[j] * out[k - j];
            }
            out[k] = acc / (k as f64 * a0);
        }
        Jet(out)
    }

    pub fn recip(&self) -> Jet {
        let n = self.0.len();
        let a0 = self.0[0];
        let mut out = vec![0.0; n];
        out[0] = 1.0 / a0;
        for k in 1..n {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += self.0[j] * out[k - j];
            }
            out[k] = -acc / a0;
        }
        Jet(out)
    }

    /// cos(w * x) as a jet at the same base point as `x`.
    pub fn cos_of(w: f64, x0: f64, order: usize) -> Jet {
        let mut v = vec![0.0; order + 1];
        let mut fact = 1.0;
        for k in 0..=order {
            if k > 0 {
                fact *= k as f64;
            }
            // d^k/dx^k cos(w x) = w^k cos(w x + k pi/2)
            v[k] = w.powi(k as i32) * (w * x0 + 0.5 * k as f64 * std::f64::consts::PI).cos() / fact;
        }
        Jet(v)
    }

    /// k-th derivative value f^(k)(x0).
    pub fn derivative(&self, k: usize) -> f64 {
        let mut fact = 1.0;
        for j in 2..=k {
            fact *= j as f64;
        }
        self.0[k] * fact
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn lorentzian_derivatives() {
        // f = 1/(1+x^2) at x0 = 2; exact derivatives from the partial
        // fraction form (d^k) = (-1)^k k! Im[(x - i)^{-k-1}] ... checked
        // against small central differences instead for simplicity.
        let x0 = 2.0;
        let order = 4;
        let x = Jet::variable(x0, order);
        let f = Jet::constant(1.0, order).add(&x.mul(&x)).recip();
        let g = |x: f64| 1.0 / (1.0 + x * x);
        let h = 1e-2;
        let d1 = (g(x0 + h) - g(x0 - h)) / (2.0 * h);
        let d2 = (g(x0 + h) - 2.0 * g(x0) + g(x0 - h)) / (h * h);
        assert_abs_diff_eq!(f.derivative(0), g(x0), epsilon = 1e-15);
        assert_abs_diff_eq!(f.derivative(1), d1, epsilon = 1e-4);
        assert_abs_diff_eq!(f.derivative(2), d2, epsilon = 1e-3);
    }

    #[test]
    fn power_jet() {
        // f = x^{-1/2} at x0 = 4: f' = -1/2 x^{-3/2} = -1/16
        let x = Jet::variable(4.0, 3);
        let f = x.powf(-0.5);
        assert_abs_diff_eq!(f.derivative(0), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(f.derivative(1), -1.0 / 16.0, epsilon = 1e-15);
        // f'' = 3/4 x^{-5/2} = 3/128
        assert_abs_diff_eq!(f.derivative(2), 3.0 / 128.0, epsilon = 1e-15);
    }

    #[test]
    fn cos_jet() {
        let j = Jet::cos_of(3.0, 1.0, 3);
        assert_abs_diff_eq!(j.derivative(0), (3.0_f64).cos(), epsilon = 1e-15);
        assert_abs_diff_eq!(j.derivative(1), -3.0 * (3.0_f64).sin(), epsilon = 1e-13);
        assert_abs_diff_eq!(j.derivative(2), -9.0 * (3.0_f64).cos(), epsilon = 1e-13);
    }
}
