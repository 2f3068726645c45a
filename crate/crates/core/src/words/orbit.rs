use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::MultiMap;
use crate::rational::{Point, DEFAULT_TOL};
use crate::{Error, Result};

/// Random backward orbit of `z0` of the given length (the chaos game).
///
/// Each step picks a generator uniformly, then one of its finite preimages
/// with probability proportional to multiplicity.
pub fn sample_backward_orbit(
    f: &MultiMap,
    z0: Complex64,
    length: usize,
    seed: u64,
) -> Result<Vec<Complex64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    orbit_with_rng(f, z0, length, &mut rng)
}

pub(crate) fn orbit_with_rng(
    f: &MultiMap,
    z0: Complex64,
    length: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Complex64>> {
    if length == 0 {
        return Err(Error::InvalidArgument("orbit length must be at least 1".into()));
    }
    let mut out = Vec::with_capacity(length);
    let mut z = z0;
    while out.len() < length {
        let j = rng.gen_range(0..f.len());
        let roots = f.generators()[j].preimages(Point::Finite(z), DEFAULT_TOL)?;
        let finite: Vec<(Complex64, u32)> = roots.finite().collect();
        let total: u32 = finite.iter().map(|r| r.1).sum();
        if total == 0 {
            continue;
        }
        let mut pick = rng.gen_range(0..total);
        for (y, m) in finite {
            if pick < m {
                z = y;
                break;
            }
            pick -= m;
        }
        out.push(z);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::RationalMap;

    fn linear3() -> MultiMap {
        MultiMap::new(vec![
            RationalMap::from_real_poly(&[0.0, 3.0]).unwrap(),
            RationalMap::from_real_poly(&[-2.0, 3.0]).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn cantor_orbit_stays_in_unit_interval() {
        let orbit = sample_backward_orbit(&linear3(), Complex64::new(0.5, 0.0), 2000, 3).unwrap();
        for z in &orbit[20..] {
            assert!(z.re >= -1e-12 && z.re <= 1.0 + 1e-12);
            assert!(z.im.abs() < 1e-12);
        }
    }

    #[test]
    fn fixed_seed_is_bit_identical() {
        let a = sample_backward_orbit(&linear3(), Complex64::new(0.5, 0.0), 500, 11).unwrap();
        let b = sample_backward_orbit(&linear3(), Complex64::new(0.5, 0.0), 500, 11).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn one_step_from_four_under_squares() {
        let sq = RationalMap::from_real_poly(&[0.0, 0.0, 1.0]).unwrap();
        let f = MultiMap::new(vec![sq.clone(), sq]).unwrap();
        let o = sample_backward_orbit(&f, Complex64::new(4.0, 0.0), 1, 5).unwrap();
        assert_eq!(o.len(), 1);
        assert!((o[0].norm() - 2.0).abs() < 1e-14 && o[0].im.abs() < 1e-14);
    }
}
