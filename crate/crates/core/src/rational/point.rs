use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A point of the Riemann sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Point {
    Finite(Complex64),
    Infinity,
}

impl Point {
    pub fn finite(self) -> Option<Complex64> {
        match self {
            Point::Finite(z) => Some(z),
            Point::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Point::Infinity)
    }

    /// Chordal distance on the unit-diameter sphere, in `[0, 2]`.
    pub fn chordal(self, other: Point) -> f64 {
        chordal_distance(self, other)
    }
}

impl From<Complex64> for Point {
    fn from(z: Complex64) -> Self {
        if z.re.is_finite() && z.im.is_finite() {
            Point::Finite(z)
        } else {
            Point::Infinity
        }
    }
}

impl From<f64> for Point {
    fn from(x: f64) -> Self {
        Point::from(Complex64::new(x, 0.0))
    }
}

/// `2|z - w| / sqrt((1+|z|^2)(1+|w|^2))`, extended to infinity.
pub fn chordal_distance(a: Point, b: Point) -> f64 {
    match (a, b) {
        (Point::Infinity, Point::Infinity) => 0.0,
        (Point::Finite(z), Point::Infinity) | (Point::Infinity, Point::Finite(z)) => {
            2.0 / (1.0 + z.norm_sqr()).sqrt()
        }
        (Point::Finite(z), Point::Finite(w)) => {
            2.0 * (z - w).norm() / ((1.0 + z.norm_sqr()) * (1.0 + w.norm_sqr())).sqrt()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chordal_distance_to_infinity() {
        assert_eq!(chordal_distance(Point::from(0.0), Point::Infinity), 2.0);
        assert_eq!(chordal_distance(Point::Infinity, Point::Infinity), 0.0);
        let d = chordal_distance(Point::from(1.0), Point::from(-1.0));
        assert!((d - 2.0).abs() < 1e-15);
    }

    #[test]
    fn nan_becomes_infinity() {
        assert!(Point::from(Complex64::new(f64::INFINITY, 0.0)).is_infinite());
        assert!(Point::from(Complex64::new(f64::NAN, 0.0)).is_infinite());
    }
}
