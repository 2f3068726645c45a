use crate::{Error, Result};

/// Threshold `c0` on `|λ|` for the family `(f1, λ(z - b)^d + b)`, where
/// `d1 = deg f1` and `B(0, r)` lies in the interior of `K(f1)` after
/// normalizing `f1` to be monic with `b = 0`:
///
/// `c0 = exp(d(d-1)d1 / (d + d1 - d1 d) * (log 2 - log(1/2)/d1 - log(r)/d))`.
pub fn family_c0(d1: usize, d: usize, r: f64) -> Result<f64> {
    if d1 < 2 || d < 2 {
        return Err(Error::InvalidArgument(format!("degrees must be at least 2, got ({d1}, {d})")));
    }
    if (d1, d) == (2, 2) {
        return Err(Error::ForbiddenPair);
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::NonpositiveRadius(r));
    }
    let (d1f, df) = (d1 as f64, d as f64);
    let coef = df * (df - 1.0) * d1f / (df + d1f - d1f * df);
    let inner = 2f64.ln() - 0.5f64.ln() / d1f - r.ln() / df;
    Ok((coef * inner).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_values() {
        let a = family_c0(2, 3, 0.5).unwrap();
        assert!((a / 2f64.powi(-22) - 1.0).abs() < 1e-12);
        let b = family_c0(3, 2, 1.0).unwrap();
        assert!((b / 2f64.powi(-8) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejected_inputs() {
        assert_eq!(family_c0(2, 2, 0.5), Err(Error::ForbiddenPair));
        assert!(matches!(family_c0(2, 3, 0.0), Err(Error::NonpositiveRadius(_))));
        assert!(matches!(family_c0(2, 3, -1.0), Err(Error::NonpositiveRadius(_))));
        assert!(family_c0(1, 3, 0.5).is_err());
    }

    #[test]
    fn derivative_in_r_has_the_closed_form_sign() {
        // d c0 / d r = -c0 * coef / (d r); coef < 0 for every allowed pair
        for (d1, d) in [(2usize, 3usize), (3, 2), (3, 3), (4, 2), (2, 5)] {
            let coef = (d * (d - 1) * d1) as f64 / (d as f64 + d1 as f64 - (d1 * d) as f64);
            assert!(coef < 0.0);
            for k in 1..20 {
                let r = 0.05 * k as f64;
                let h = 1e-6 * r;
                let fd = (family_c0(d1, d, r + h).unwrap() - family_c0(d1, d, r - h).unwrap()) / (2.0 * h);
                let exact = -family_c0(d1, d, r).unwrap() * coef / (d as f64 * r);
                assert!(fd > 0.0);
                assert!((fd / exact - 1.0).abs() < 1e-5);
            }
        }
    }
}
