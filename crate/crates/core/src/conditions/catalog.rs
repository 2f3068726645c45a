use num_complex::Complex64;
use serde::Serialize;

use super::{family_c0, Region};
use crate::rational::{Polynomial, RationalMap};
use crate::words::MultiMap;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub multimap: MultiMap,
    /// Candidate open set for the open set condition.
    pub region: Option<Region>,
    /// Whether osc1 and osc2 are known to hold for `region`.
    pub osc_expected: Option<bool>,
}

fn poly(c: &[f64]) -> RationalMap {
    RationalMap::from_real_poly(c).expect("catalog maps are valid")
}

fn mm(gens: Vec<RationalMap>, labels: &[&str]) -> MultiMap {
    MultiMap::new(gens)
        .and_then(|m| m.with_labels(labels.iter().map(|s| s.to_string()).collect()))
        .expect("catalog multimaps are valid")
}

/// Named example systems.
pub fn builtin_examples() -> Vec<CatalogEntry> {
    let origin = Complex64::new(0.0, 0.0);
    vec![
        CatalogEntry {
            name: "pm2",
            description: "z^2 + 2 and z^2 - 2; semi-hyperbolic, not hyperbolic",
            multimap: mm(vec![poly(&[2.0, 0.0, 1.0]), poly(&[-2.0, 0.0, 1.0])], &["z^2+2", "z^2-2"]),
            region: Some(Region::disk(origin, 2.0)),
            osc_expected: Some(true),
        },
        CatalogEntry {
            name: "fig2",
            description: "second iterates of z^2 - 1 and z^2/4",
            multimap: mm(vec![poly(&[0.0, 0.0, -2.0, 0.0, 1.0]), poly(&[0.0, 0.0, 0.0, 0.0, 1.0 / 64.0])], &["(z^2-1)^2-1", "(z^2/4)^2/4"]),
            region: None,
            osc_expected: None,
        },
        CatalogEntry {
            name: "cantor3",
            description: "3z and 3z - 2; middle-thirds Cantor set",
            multimap: mm(vec![poly(&[0.0, 3.0]), poly(&[-2.0, 3.0])], &["3z", "3z-2"]),
            region: Some(Region::disk(Complex64::new(0.5, 0.0), 0.5)),
            osc_expected: Some(true),
        },
        CatalogEntry {
            name: "linear3",
            description: "3z, 3z - 1 and 3z - 2; Julia set [0, 1]",
            multimap: mm(vec![poly(&[0.0, 3.0]), poly(&[-1.0, 3.0]), poly(&[-2.0, 3.0])], &["3z", "3z-1", "3z-2"]),
            region: Some(Region::disk(Complex64::new(0.5, 0.0), 0.5)),
            osc_expected: Some(true),
        },
        CatalogEntry {
            name: "dup",
            description: "z^2 twice; identical generators overlap",
            multimap: mm(vec![poly(&[0.0, 0.0, 1.0]), poly(&[0.0, 0.0, 1.0])], &["z^2", "z^2"]),
            region: Some(Region::disk(origin, 1.0)),
            osc_expected: Some(false),
        },
        CatalogEntry {
            name: "cheb2",
            description: "z^2 - 2 twice; Julia set [-2, 2]",
            multimap: mm(vec![poly(&[-2.0, 0.0, 1.0]), poly(&[-2.0, 0.0, 1.0])], &["z^2-2", "z^2-2"]),
            region: None,
            osc_expected: None,
        },
    ]
}

pub fn example(name: &str) -> Result<CatalogEntry> {
    builtin_examples()
        .into_iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::UnknownName(name.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyMember {
    pub multimap: MultiMap,
    /// `int K(f_{λ,2}) \ K(f1)`.
    pub region: Region,
    /// Threshold on `|λ|` when a radius was supplied.
    pub c0: Option<f64>,
}

/// The pair `(f1, λ(z - b)^d + b)` with its candidate open set. When `r` is
/// given, `|λ|` must lie below `family_c0(deg f1, d, r)`.
pub fn family_member(f1: &RationalMap, b: Complex64, d: usize, lambda: Complex64, r: Option<f64>) -> Result<FamilyMember> {
    if !f1.is_polynomial() || f1.degree() < 2 {
        return Err(Error::InvalidArgument("f1 must be a polynomial of degree at least 2".into()));
    }
    if lambda == Complex64::new(0.0, 0.0) || !(lambda.re.is_finite() && lambda.im.is_finite()) {
        return Err(Error::InvalidArgument("lambda must be finite and nonzero".into()));
    }
    if d < 2 {
        return Err(Error::InvalidArgument("d must be at least 2".into()));
    }
    if (f1.degree(), d) == (2, 2) {
        return Err(Error::ForbiddenPair);
    }
    let c0 = r.map(|r| family_c0(f1.degree(), d, r)).transpose()?;
    if let Some(c0) = c0 {
        if lambda.norm() >= c0 {
            return Err(Error::InvalidArgument(format!("|lambda| = {} is not below c0 = {c0}", lambda.norm())));
        }
    }
    let shifted = Polynomial::from_roots(&vec![b; d], lambda);
    let f2 = RationalMap::polynomial(&shifted + &Polynomial::constant(b))?;
    Ok(FamilyMember {
        multimap: MultiMap::new(vec![f1.clone(), f2.clone()])?,
        region: Region::HullDifference { outer: f2, inner: f1.clone() },
        c0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pm2_coefficients() {
        let e = example("pm2").unwrap();
        let g = e.multimap.generators();
        assert_eq!(g[0].num(), &Polynomial::from_real(&[2.0, 0.0, 1.0]));
        assert_eq!(g[1].num(), &Polynomial::from_real(&[-2.0, 0.0, 1.0]));
    }

    #[test]
    fn fig2_generators_are_second_iterates() {
        let e = example("fig2").unwrap();
        let f1 = poly(&[-1.0, 0.0, 1.0]);
        let f2 = poly(&[0.0, 0.0, 0.25]);
        let g = e.multimap.generators();
        for z in [Complex64::new(0.3, -0.7), Complex64::new(1.1, 0.4)] {
            let a = f1.eval_c(f1.eval_c(z).finite().unwrap()).finite().unwrap();
            let b = f2.eval_c(f2.eval_c(z).finite().unwrap()).finite().unwrap();
            assert!((g[0].eval_c(z).finite().unwrap() - a).norm() < 1e-12);
            assert!((g[1].eval_c(z).finite().unwrap() - b).norm() < 1e-12);
        }
    }

    #[test]
    fn names() {
        assert_eq!(example("cantor3").unwrap().multimap.len(), 2);
        assert_eq!(example("nope"), Err(Error::UnknownName("nope".into())));
        let names: Vec<_> = builtin_examples().iter().map(|e| e.name).collect();
        assert!(names.contains(&"pm2") && names.contains(&"fig2") && names.contains(&"dup"));
    }

    #[test]
    fn family_member_construction() {
        // f1 = z^3 - 0.1 z fixes a neighbourhood of 0 in int K(f1)
        let f1 = poly(&[0.0, -0.1, 0.0, 1.0]);
        let lam = Complex64::new(1e-3, 0.0);
        let m = family_member(&f1, Complex64::new(0.0, 0.0), 2, lam, None).unwrap();
        let f2 = &m.multimap.generators()[1];
        assert_eq!(f2.num(), &Polynomial::from_real(&[0.0, 0.0, 1e-3]));
        assert!(m.region.contains(Complex64::new(10.0, 0.0)));
        assert!(!m.region.contains(Complex64::new(0.0, 0.0)));
        assert!(!m.region.contains(Complex64::new(2000.0, 0.0)));
        let b = Complex64::new(0.1, 0.0);
        let m = family_member(&f1, b, 3, lam, None).unwrap();
        assert!((m.multimap.generators()[1].eval_c(b).finite().unwrap() - b).norm() < 1e-15);
        assert_eq!(family_member(&poly(&[0.0, 0.0, 1.0]), b, 2, lam, None), Err(Error::ForbiddenPair));
        assert!(family_member(&f1, b, 2, Complex64::new(1.0, 0.0), Some(0.05)).is_err());
    }
}
