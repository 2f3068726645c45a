use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Dense complex polynomial, coefficients in ascending degree.
///
/// Trailing zero coefficients are trimmed on construction, so the last
/// stored coefficient is nonzero unless the polynomial is identically zero
/// (stored as the single coefficient `0`).
#[derive(Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == Complex64::new(0.0, 0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Complex64::new(0.0, 0.0));
        }
        Polynomial { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    /// The identity polynomial `z`.
    pub fn identity() -> Self {
        Self::new(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)])
    }

    /// `c z^k`
    pub fn monomial(c: Complex64, k: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    /// `lead * prod (z - r_i)`, roots repeated according to multiplicity.
    pub fn from_roots(roots: &[Complex64], lead: Complex64) -> Self {
        let mut coeffs = vec![lead];
        for &r in roots {
            let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
            for (k, &c) in coeffs.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= c * r;
            }
            coeffs = next;
        }
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> Complex64 {
        *self.coeffs.last().unwrap()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == Complex64::new(0.0, 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Largest coefficient modulus.
    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Drops leading coefficients with modulus at most `rel * max|a_k|`.
    pub fn trim_relative(&self, rel: f64) -> Self {
        let cut = rel * self.max_abs_coeff();
        let mut coeffs = self.coeffs.clone();
        while coeffs.len() > 1 && coeffs.last().unwrap().norm() <= cut {
            coeffs.pop();
        }
        Self::new(coeffs)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// `(p(z), p'(z))` in a single Horner pass.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// `sum |a_k| |z|^k`, the natural scale for residuals at `z`.
    pub fn abs_scale(&self, z: Complex64) -> f64 {
        let r = z.norm();
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::constant(Complex64::new(0.0, 0.0));
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    /// `w^d p(1/w)`; requires `d >= degree`.
    pub fn reversed(&self, d: usize) -> Self {
        assert!(d >= self.degree(), "reversal degree below polynomial degree");
        let mut coeffs = vec![Complex64::new(0.0, 0.0); d + 1];
        for (k, &c) in self.coeffs.iter().enumerate() {
            coeffs[d - k] = c;
        }
        Self::new(coeffs)
    }

    /// `self(inner(z))`
    pub fn compose(&self, inner: &Polynomial) -> Self {
        self.coeffs
            .iter()
            .rev()
            .fold(Polynomial::constant(Complex64::new(0.0, 0.0)), |acc, &c| {
                &(&acc * inner) + &Polynomial::constant(c)
            })
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial(")?;
        for (k, c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({}{:+}i)z^{k}", c.re, c.im)?;
        }
        write!(f, ")")
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let zero = Complex64::new(0.0, 0.0);
        Polynomial::new(
            (0..n)
                .map(|k| {
                    self.coeffs.get(k).copied().unwrap_or(zero)
                        + rhs.coeffs.get(k).copied().unwrap_or(zero)
                })
                .collect(),
        )
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = self.coeffs.iter().map(|c| [c.re, c.im]).collect();
        pairs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let pairs: Vec<[f64; 2]> = Vec::deserialize(d)?;
        if pairs.is_empty() {
            return Err(D::Error::custom("polynomial needs at least one coefficient"));
        }
        if pairs.iter().flatten().any(|x| !x.is_finite()) {
            return Err(D::Error::custom("polynomial coefficients must be finite"));
        }
        Ok(Polynomial::new(
            pairs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect(),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn trailing_zeros_are_trimmed() {
        let p = Polynomial::from_real(&[1.0, 2.0, 0.0, 0.0]);
        assert_eq!(p.degree(), 1);
        assert!(Polynomial::from_real(&[0.0, 0.0]).is_zero());
    }

    #[test]
    fn horner_and_derivative() {
        // z^3 - 2z + 2
        let p = Polynomial::from_real(&[2.0, -2.0, 0.0, 1.0]);
        let (v, dv) = p.eval_with_derivative(c(2.0));
        assert_eq!(v, c(6.0));
        assert_eq!(dv, c(10.0));
        assert_eq!(p.derivative().eval(c(2.0)), c(10.0));
    }

    #[test]
    fn reversal_matches_definition() {
        let p = Polynomial::from_real(&[1.0, 2.0, 3.0]);
        let r = p.reversed(3);
        let w = Complex64::new(0.3, -0.7);
        let expected = w.powi(3) * p.eval(w.inv());
        assert!((r.eval(w) - expected).norm() < 1e-12);
    }

    #[test]
    fn compose_squares() {
        // (z^2 - 1) o (z^2 - 1) = z^4 - 2 z^2
        let f = Polynomial::from_real(&[-1.0, 0.0, 1.0]);
        assert_eq!(f.compose(&f), Polynomial::from_real(&[0.0, 0.0, -2.0, 0.0, 1.0]));
    }

    #[test]
    fn json_is_pair_array() {
        let p = Polynomial::from_real(&[2.0, 0.0, 1.0]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, "[[2.0,0.0],[0.0,0.0],[1.0,0.0]]");
        let back: Polynomial = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }
}
