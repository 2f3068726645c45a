use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::roots::{poly_roots_with, Root, RootOptions, RootSet};
use super::{Metric, Point, Polynomial, CHART_SWITCH};
use crate::{Error, Result};

/// Relative size under which a computed leading coefficient is treated as
/// cancelled.
const CANCEL_REL: f64 = 1e-13;

/// A non-constant rational map `P/Q` of the Riemann sphere.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RationalMap {
    num: Polynomial,
    den: Polynomial,
    #[serde(skip)]
    degree: usize,
    #[serde(skip)]
    dnum: Polynomial,
    #[serde(skip)]
    dden: Polynomial,
}

/// Complex derivative (when it exists in the plane) and its metric norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivative {
    pub value: Option<Complex64>,
    pub norm: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMap {
    num: Polynomial,
    den: Polynomial,
}

impl<'de> Deserialize<'de> for RationalMap {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawMap::deserialize(d)?;
        RationalMap::new(raw.num, raw.den).map_err(serde::de::Error::custom)
    }
}

impl RationalMap {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidArgument("denominator is identically zero".into()));
        }
        if !num.is_finite() || !den.is_finite() {
            return Err(Error::InvalidArgument("non-finite coefficient".into()));
        }
        let degree = num.degree().max(den.degree());
        let map = RationalMap {
            dnum: num.derivative(),
            dden: den.derivative(),
            num,
            den,
            degree,
        };
        if degree == 0 || map.wronskian().is_zero() {
            return Err(Error::ConstantMap);
        }
        if map.den.degree() >= 1 {
            let poles = poly_roots_with(&map.den, &RootOptions::default())?;
            for (z, _) in poles.finite() {
                let scale = map.num.abs_scale(z).max(f64::MIN_POSITIVE);
                if map.num.eval(z).norm() <= 1e-9 * scale {
                    return Err(Error::InvalidArgument(format!(
                        "numerator and denominator share the root {z}"
                    )));
                }
            }
        }
        Ok(map)
    }

    pub fn polynomial(p: Polynomial) -> Result<Self> {
        Self::new(p, Polynomial::one())
    }

    /// Polynomial map from real coefficients, ascending degree.
    pub fn from_real_poly(coeffs: &[f64]) -> Result<Self> {
        Self::polynomial(Polynomial::from_real(coeffs))
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == 0
    }

    /// `P'Q - PQ'`, trimmed for cancellation of the top coefficients.
    pub fn wronskian(&self) -> Polynomial {
        (&(&self.dnum * &self.den) - &(&self.num * &self.dden)).trim_relative(CANCEL_REL)
    }

    /// Fast path for finite inputs away from the chart switch.
    pub fn eval_c(&self, z: Complex64) -> Point {
        self.eval(Point::Finite(z))
    }

    pub fn eval(&self, z: Point) -> Point {
        match z {
            Point::Finite(z) if z.norm() <= CHART_SWITCH => {
                let q = self.den.eval(z);
                if q == Complex64::new(0.0, 0.0) {
                    return Point::Infinity;
                }
                Point::from(self.num.eval(z) / q)
            }
            Point::Finite(z) => self.eval_chart(z.inv()),
            Point::Infinity => self.eval_chart(Complex64::new(0.0, 0.0)),
        }
    }

    /// `f(1/w)` via the reversed polynomials.
    fn eval_chart(&self, w: Complex64) -> Point {
        let p = self.num.reversed(self.degree).eval(w);
        let q = self.den.reversed(self.degree).eval(w);
        if q == Complex64::new(0.0, 0.0) {
            Point::Infinity
        } else {
            Point::from(p / q)
        }
    }

    /// Euclidean complex derivative `f'(z)`.
    pub fn derivative_c(&self, z: Complex64) -> Result<Complex64> {
        let (p, dp) = self.num.eval_with_derivative(z);
        let (q, dq) = self.den.eval_with_derivative(z);
        if q == Complex64::new(0.0, 0.0) {
            return Err(Error::PoleDerivative);
        }
        let d = (dp * q - p * dq) / (q * q);
        if d.re.is_finite() && d.im.is_finite() {
            Ok(d)
        } else {
            Err(Error::PoleDerivative)
        }
    }

    /// Derivative at `z` with its norm in the requested metric.
    ///
    /// The spherical norm is computed as
    /// `|A'B - AB'| (1+|s|^2) / (|A|^2 + |B|^2)` where `A/B` is the map in
    /// the source chart `s` (`z` or `1/z`), which stays finite at poles and
    /// at infinity.
    pub fn derivative(&self, z: Point, metric: Metric) -> Result<Derivative> {
        match metric {
            Metric::Euclidean => match z {
                Point::Finite(z) => {
                    let d = self.derivative_c(z)?;
                    Ok(Derivative { value: Some(d), norm: d.norm() })
                }
                Point::Infinity => Err(Error::PoleDerivative),
            },
            Metric::Spherical => {
                let value = z.finite().and_then(|z| self.derivative_c(z).ok());
                let norm = match z {
                    Point::Finite(z) if z.norm() <= CHART_SWITCH => self.spherical_norm_z(z),
                    Point::Finite(z) => self.spherical_norm_w(z.inv()),
                    Point::Infinity => self.spherical_norm_w(Complex64::new(0.0, 0.0)),
                };
                Ok(Derivative { value, norm })
            }
        }
    }

    /// Metric norm of the derivative only.
    pub fn derivative_norm(&self, z: Complex64, metric: Metric) -> Result<f64> {
        match metric {
            Metric::Euclidean => self.derivative_c(z).map(|d| d.norm()),
            Metric::Spherical => Ok(if z.norm() <= CHART_SWITCH {
                self.spherical_norm_z(z)
            } else {
                self.spherical_norm_w(z.inv())
            }),
        }
    }

    /// Spherical derivative norm computed in the `z` chart.
    pub fn spherical_norm_z(&self, z: Complex64) -> f64 {
        let (a, da) = self.num.eval_with_derivative(z);
        let (b, db) = self.den.eval_with_derivative(z);
        chart_norm(a, da, b, db, z)
    }

    /// Spherical derivative norm computed in the `w = 1/z` chart.
    pub fn spherical_norm_w(&self, w: Complex64) -> f64 {
        let (a, da) = self.num.reversed(self.degree).eval_with_derivative(w);
        let (b, db) = self.den.reversed(self.degree).eval_with_derivative(w);
        chart_norm(a, da, b, db, w)
    }

    /// Critical points with multiplicity `local order - 1`, infinity included.
    pub fn critical_points(&self) -> Result<RootSet> {
        let w = self.wronskian();
        let mut set = if w.degree() >= 1 {
            poly_roots_with(&w, &RootOptions::default())?
        } else {
            RootSet { roots: Vec::new(), converged: true }
        };
        let at_infinity = (2 * self.degree - 2).saturating_sub(w.degree());
        if at_infinity > 0 {
            set.roots.push(Root { point: Point::Infinity, multiplicity: at_infinity as u32 });
        }
        set.sort();
        Ok(set)
    }

    /// Finite critical values `f(c)` over finite critical points `c`.
    pub fn finite_critical_values(&self) -> Result<Vec<Complex64>> {
        Ok(self
            .critical_points()?
            .finite()
            .filter_map(|(c, _)| self.eval_c(c).finite())
            .collect())
    }

    /// Solutions of `f(y) = w` with multiplicity; they sum to `deg f`.
    pub fn preimages(&self, w: Point, tol: f64) -> Result<RootSet> {
        let opts = RootOptions { tol, ..RootOptions::default() };
        // equation E(y) = 0 whose degree shortfall counts roots at infinity
        let eq = match w {
            Point::Infinity => self.den.clone(),
            Point::Finite(w) if w.norm() > CHART_SWITCH => {
                (&self.den - &self.num.scale(w.inv())).trim_relative(CANCEL_REL)
            }
            Point::Finite(w) => {
                (&self.num - &self.den.scale(w)).trim_relative(CANCEL_REL)
            }
        };
        let mut set = if eq.degree() >= 1 {
            let s = poly_roots_with(&eq, &opts)?;
            if !s.converged {
                return Err(Error::NonConvergence {
                    iterations: opts.max_iter,
                    residual: f64::NAN,
                });
            }
            s
        } else if eq.is_zero() {
            return Err(Error::ConstantMap);
        } else {
            RootSet { roots: Vec::new(), converged: true }
        };
        let at_infinity = self.degree - eq.degree();
        if at_infinity > 0 {
            set.roots.push(Root { point: Point::Infinity, multiplicity: at_infinity as u32 });
        }
        set.sort();
        Ok(set)
    }

    /// Fixed points `f(z) = z` in the plane, plus infinity when fixed.
    pub fn fixed_points(&self) -> Result<RootSet> {
        let eq = (&self.num - &(&self.den * &Polynomial::identity())).trim_relative(CANCEL_REL);
        let mut set = if eq.degree() >= 1 {
            poly_roots_with(&eq, &RootOptions::default())?
        } else {
            RootSet { roots: Vec::new(), converged: true }
        };
        if self.num.degree() > self.den.degree() || self.eval(Point::Infinity).is_infinite() {
            if let Some(deficit) = (self.degree + 1).checked_sub(eq.degree()) {
                if deficit > 0 {
                    set.roots.push(Root { point: Point::Infinity, multiplicity: deficit as u32 });
                }
            }
        }
        set.sort();
        Ok(set)
    }

    /// Composition `self ∘ inner`.
    pub fn compose(&self, inner: &RationalMap) -> Result<RationalMap> {
        // P(A/B)/Q(A/B) = B^d P(A/B) / (B^d Q(A/B)) with d = deg self
        let d = self.degree;
        let homogenize = |p: &Polynomial| {
            let mut acc = Polynomial::constant(Complex64::new(0.0, 0.0));
            let mut b_pow = vec![Polynomial::one()];
            for _ in 0..d {
                let next = b_pow.last().unwrap() * &inner.den;
                b_pow.push(next);
            }
            let mut a_pow = Polynomial::one();
            for k in 0..=d {
                let c = p.coeffs().get(k).copied().unwrap_or_default();
                if c != Complex64::new(0.0, 0.0) {
                    acc = &acc + &(&(&a_pow * &b_pow[d - k]).scale(c));
                }
                a_pow = &a_pow * &inner.num;
            }
            acc
        };
        RationalMap::new(homogenize(&self.num), homogenize(&self.den))
    }
}

fn chart_norm(a: Complex64, da: Complex64, b: Complex64, db: Complex64, s: Complex64) -> f64 {
    let denom = a.norm_sqr() + b.norm_sqr();
    (da * b - a * db).norm() * (1.0 + s.norm_sqr()) / denom
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn z2_plus(k: f64) -> RationalMap {
        RationalMap::from_real_poly(&[k, 0.0, 1.0]).unwrap()
    }

    #[test]
    fn eval_examples() {
        let f = z2_plus(2.0);
        assert_eq!(f.eval_c(c(1.0, 0.0)), Point::Finite(c(3.0, 0.0)));
        assert_eq!(f.eval(Point::Infinity), Point::Infinity);
        let g = RationalMap::new(Polynomial::from_real(&[1.0, 0.0, 1.0]), Polynomial::from_real(&[-1.0, 1.0])).unwrap();
        assert_eq!(g.eval_c(c(1.0, 0.0)), Point::Infinity);
    }

    #[test]
    fn derivative_examples() {
        let f = z2_plus(0.0);
        let d = f.derivative(Point::from(1.0), Metric::Euclidean).unwrap();
        assert_eq!(d.value, Some(c(2.0, 0.0)));
        assert_eq!(d.norm, 2.0);
        assert_eq!(f.derivative(Point::from(0.0), Metric::Spherical).unwrap().norm, 0.0);
        // |2z| (1+|z|^2)/(1+|z^2|^2) at z = 2 is 4*5/17
        let s = f.derivative(Point::from(2.0), Metric::Spherical).unwrap().norm;
        assert!((s - 20.0 / 17.0).abs() < 1e-15);
    }

    #[test]
    fn euclidean_derivative_at_pole_is_an_error() {
        let g = RationalMap::new(Polynomial::one(), Polynomial::from_real(&[0.0, 0.0, 1.0])).unwrap();
        assert_eq!(g.derivative(Point::from(0.0), Metric::Euclidean), Err(Error::PoleDerivative));
        let s = g.derivative(Point::from(0.0), Metric::Spherical).unwrap();
        assert!(s.norm.is_finite());
    }

    #[test]
    fn critical_points_of_quadratics() {
        for k in [0.0, -2.0] {
            let crit = z2_plus(k).critical_points().unwrap();
            assert_eq!(crit.roots, vec![
                Root { point: Point::Finite(c(0.0, 0.0)), multiplicity: 1 },
                Root { point: Point::Infinity, multiplicity: 1 },
            ]);
        }
    }

    #[test]
    fn critical_points_of_cubic_family_member() {
        // 0.01 (z - 0.3)^3 + 0.3
        let b = c(0.3, 0.0);
        let p = &Polynomial::from_roots(&[b, b, b], c(0.01, 0.0)) + &Polynomial::constant(b);
        let crit = RationalMap::polynomial(p).unwrap().critical_points().unwrap();
        assert_eq!(crit.len(), 2);
        let (z, m) = crit.finite().next().unwrap();
        assert!((z - b).norm() < 1e-9);
        assert_eq!(m, 2, "local order 3");
        assert_eq!(crit.infinite_multiplicity(), 2);
    }

    #[test]
    fn preimage_examples() {
        let sq = z2_plus(0.0);
        let p = sq.preimages(Point::from(4.0), 1e-10).unwrap();
        assert_eq!(p.len(), 2);
        assert!(p.finite().all(|(z, m)| (z.norm() - 2.0).abs() < 1e-12 && z.im.abs() < 1e-12 && m == 1));
        let p0 = sq.preimages(Point::from(0.0), 1e-10).unwrap();
        assert_eq!(p0.roots, vec![Root { point: Point::Finite(c(0.0, 0.0)), multiplicity: 2 }]);
        let q = z2_plus(-2.0).preimages(Point::from(2.0), 1e-10).unwrap();
        let pts: Vec<Complex64> = q.finite().map(|(z, _)| z).collect();
        assert!((pts[0] - c(-2.0, 0.0)).norm() < 1e-12 && (pts[1] - c(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn preimages_of_infinity_and_of_zero_under_inversion() {
        let inv = RationalMap::new(Polynomial::one(), Polynomial::identity()).unwrap();
        let p = inv.preimages(Point::from(0.0), 1e-10).unwrap();
        assert_eq!(p.roots, vec![Root { point: Point::Infinity, multiplicity: 1 }]);
        let sq = z2_plus(0.0);
        let q = sq.preimages(Point::Infinity, 1e-10).unwrap();
        assert_eq!(q.roots, vec![Root { point: Point::Infinity, multiplicity: 2 }]);
    }

    #[test]
    fn common_factor_rejected() {
        let r = RationalMap::new(Polynomial::from_real(&[-1.0, 0.0, 1.0]), Polynomial::from_real(&[-1.0, 1.0]));
        assert!(matches!(r, Err(Error::InvalidArgument(_))));
        assert_eq!(RationalMap::from_real_poly(&[5.0]), Err(Error::ConstantMap));
    }

    #[test]
    fn composition_of_polynomials() {
        let f = z2_plus(-1.0);
        let ff = f.compose(&f).unwrap();
        assert_eq!(ff.num(), &Polynomial::from_real(&[0.0, 0.0, -2.0, 0.0, 1.0]));
        let z = c(0.4, 0.9);
        let direct = f.eval(f.eval_c(z)).finite().unwrap();
        assert!((ff.eval_c(z).finite().unwrap() - direct).norm() < 1e-12);
    }

    #[test]
    fn json_shape() {
        let f = z2_plus(2.0);
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"num":[[2.0,0.0],[0.0,0.0],[1.0,0.0]],"den":[[1.0,0.0]]}"#);
        let back: RationalMap = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn fixed_points_of_square() {
        let fp = z2_plus(0.0).fixed_points().unwrap();
        assert_eq!(fp.total_multiplicity(), 3);
        assert!(fp.infinite_multiplicity() == 1);
    }
}
