//! Truncated Taylor-series ("jet") arithmetic in one formal variable.
//!
//! The kernel residue engine expands every gamma factor of a Mellin-Barnes
//! integrand around a pole location. A pole of order m needs the integrand's
//! Laurent data to order u^{m-1}, so all jets here are short (a handful of
//! coefficients); a plain Vec keeps the code simple.

use crate::gamma::{cos_pi, ln_gamma, polygamma, sin_pi, EULER_GAMMA, ZETA};
use crate::error::Result;

/// c[0] + c[1] u + ... + c[n-1] u^{n-1}. All binary ops require equal length.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Jet {
    pub c: Vec<f64>,
}

impl Jet {
    pub fn constant(v: f64, len: usize) -> Self {
        let mut c = vec![0.0; len];
        c[0] = v;
        Jet { c }
    }

    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn mul(&self, other: &Jet) -> Jet {
        let n = self.len();
        debug_assert_eq!(n, other.len());
        let mut c = vec![0.0; n];
        for i in 0..n {
            if self.c[i] == 0.0 {
                continue;
            }
            for j in 0..n - i {
                c[i + j] += self.c[i] * other.c[j];
            }
        }
        Jet { c }
    }

    /// Multiply by the linear factor (a + b u) in place.
    pub fn mul_linear(&mut self, a: f64, b: f64) {
        let n = self.len();
        for i in (0..n).rev() {
            let lower = if i > 0 { b * self.c[i - 1] } else { 0.0 };
            self.c[i] = a * self.c[i] + lower;
        }
    }

    /// Divide by the linear factor (a + b u) in place; a must be nonzero.
    pub fn div_linear(&mut self, a: f64, b: f64) {
        let n = self.len();
        let inv = 1.0 / a;
        let mut prev = 0.0;
        for i in 0..n {
            let y = (self.c[i] - b * prev) * inv;
            self.c[i] = y;
            prev = y;
        }
    }

    /// Reciprocal jet; constant term must be nonzero.
    pub fn recip(&self) -> Jet {
        let n = self.len();
        let mut c = vec![0.0; n];
        let inv = 1.0 / self.c[0];
        c[0] = inv;
        for k in 1..n {
            let mut s = 0.0;
            for j in 1..=k {
                s += self.c[j] * c[k - j];
            }
            c[k] = -s * inv;
        }
        Jet { c }
    }

    /// exp of a jet: the constant term is exponentiated, higher terms via
    /// the standard y' = x' y recurrence.
    pub fn exp(&self) -> Jet {
        let n = self.len();
        let mut c = vec![0.0; n];
        c[0] = self.c[0].exp();
        for k in 1..n {
            let mut s = 0.0;
            for j in 1..=k {
                s += j as f64 * self.c[j] * c[k - j];
            }
            c[k] = s / k as f64;
        }
        Jet { c }
    }

    pub fn scale(&mut self, v: f64) {
        for x in &mut self.c {
            *x *= v;
        }
    }
}

/// Jet of ln Gamma(x + u) for x > 0: coefficients psi^{(k-1)}(x)/k!.
pub(crate) fn ln_gamma_jet(x: f64, len: usize) -> Result<Jet> {
    debug_assert!(x > 0.0);
    let mut c = vec![0.0; len];
    c[0] = ln_gamma(x);
    let mut kfact = 1.0;
    for k in 1..len {
        kfact *= k as f64;
        c[k] = polygamma(k as u32 - 1, x)? / kfact;
    }
    Ok(Jet { c })
}

/// Jet of Gamma(1 + u): exp of -gamma u + sum_{n>=2} (-1)^n zeta(n)/n u^n.
pub(crate) fn gamma_one_plus_jet(len: usize) -> Jet {
    let mut lg = vec![0.0; len];
    if len > 1 {
        lg[1] = -EULER_GAMMA;
    }
    for n in 2..len {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        lg[n] = sign * ZETA[n - 2] / n as f64;
    }
    Jet { c: lg }.exp()
}

/// Jet of sin(pi (x + u)) around a real center x.
pub(crate) fn sin_pi_jet(x: f64, len: usize) -> Jet {
    // d^k/du^k sin(pi(x+u)) = pi^k sin(pi x + k pi/2)
    let pi = std::f64::consts::PI;
    let (s, c) = (sin_pi(x), cos_pi(x));
    let cycle = [s, c, -s, -c];
    let mut coeffs = vec![0.0; len];
    let mut pk = 1.0;
    let mut kfact = 1.0;
    for (k, out) in coeffs.iter_mut().enumerate() {
        if k > 0 {
            pk *= pi;
            kfact *= k as f64;
        }
        *out = pk * cycle[k % 4] / kfact;
    }
    Jet { c: coeffs }
}

/// Jet of Gamma(x + u) for non-integer real x of either sign.
pub(crate) fn gamma_jet(x: f64, len: usize) -> Result<Jet> {
    if x > 0.0 {
        Ok(ln_gamma_jet(x, len)?.exp())
    } else {
        // Gamma(x+u) = pi / ( sin(pi(x+u)) * Gamma(1-x-u) )
        let sin_j = sin_pi_jet(x, len);
        let mut lg = ln_gamma_jet(1.0 - x, len)?;
        // substitute u -> -u
        for (k, c) in lg.c.iter_mut().enumerate() {
            if k % 2 == 1 {
                *c = -*c;
            }
        }
        let denom = sin_j.mul(&lg.exp());
        let mut out = denom.recip();
        out.scale(std::f64::consts::PI);
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma::gamma;

    fn assert_close(a: f64, b: f64, tol: f64, msg: &str) {
        assert!(
            (a - b).abs() <= tol * (1.0 + b.abs()),
            "{msg}: got {a}, want {b}"
        );
    }

    #[test]
    fn mul_and_linear_ops_match_polynomials() {
        // (1 + 2u + 3u^2)(4 + 5u) truncated to u^2 = 4 + 13u + 22u^2
        let a = Jet { c: vec![1.0, 2.0, 3.0] };
        let mut b = a.clone();
        b.mul_linear(4.0, 5.0);
        assert_eq!(b.c, vec![4.0, 13.0, 22.0]);
        let mut c = b.clone();
        c.div_linear(4.0, 5.0);
        assert_eq!(c.c, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn recip_and_exp_are_inverses() {
        let a = Jet { c: vec![2.0, -0.7, 0.31, 0.05] };
        let prod = a.mul(&a.recip());
        assert_close(prod.c[0], 1.0, 1e-15, "recip c0");
        for k in 1..4 {
            assert!(prod.c[k].abs() < 1e-15);
        }
        // exp of ln-series of (1+u): ln(1+u) = u - u^2/2 + u^3/3
        let ln1p = Jet { c: vec![0.0, 1.0, -0.5, 1.0 / 3.0] };
        let e = ln1p.exp();
        assert_eq!(e.c[0], 1.0);
        assert_close(e.c[1], 1.0, 1e-15, "exp c1");
        assert!(e.c[2].abs() < 1e-15 && e.c[3].abs() < 1e-15);
    }

    #[test]
    fn gamma_jet_matches_finite_differences() {
        // compare jet coefficients of Gamma(x+u) against central differences
        for &x in &[0.8, 2.3, -0.6, -2.4] {
            let j = gamma_jet(x, 3).unwrap();
            let h = 1e-5;
            let gm = gamma(x - h).unwrap();
            let g0 = gamma(x).unwrap();
            let gp = gamma(x + h).unwrap();
            assert_close(j.c[0], g0, 1e-13, "value");
            assert_close(j.c[1], (gp - gm) / (2.0 * h), 1e-8, "first derivative");
            assert_close(j.c[2], (gp - 2.0 * g0 + gm) / (h * h) / 2.0, 2e-5, "second/2!");
        }
    }

    #[test]
    fn gamma_one_plus_jet_leading_terms() {
        let j = gamma_one_plus_jet(4);
        // Gamma(1+u) = 1 - gamma u + (gamma^2/2 + pi^2/12) u^2 + ...
        assert_eq!(j.c[0], 1.0);
        assert_close(j.c[1], -EULER_GAMMA, 1e-15, "c1");
        let c2 = EULER_GAMMA * EULER_GAMMA / 2.0 + std::f64::consts::PI.powi(2) / 12.0;
        assert_close(j.c[2], c2, 1e-15, "c2");
    }

    #[test]
    fn sin_jet_at_quarter() {
        let j = sin_pi_jet(0.25, 3);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let pi = std::f64::consts::PI;
        assert_close(j.c[0], r, 1e-15, "c0");
        assert_close(j.c[1], pi * r, 1e-15, "c1");
        assert_close(j.c[2], -pi * pi * r / 2.0, 1e-15, "c2");
    }
}
