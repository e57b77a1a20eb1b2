//! Extended-precision complementary error function and Gaussian moments.
//!
//! `erfc` uses the Maclaurin series of erf for |x| ≤ 1 and the Legendre
//! continued fraction of Γ(1/2, x²) for |x| > 1, with reflection
//! erfc(-x) = 2 - erfc(x) on the negative axis.

use rug::float::Constant;
use rug::Float;

use crate::{Error, Result};

/// Extra bits carried internally before rounding to the requested precision.
const GUARD_BITS: u32 = 32;
const MAX_SERIES_TERMS: usize = 100_000;
const MAX_CF_TERMS: usize = 2_000_000;

pub fn sqrt_pi(bits: u32) -> Float {
    Float::with_val(bits, Constant::Pi).sqrt()
}

/// erfc(x) correct to about `bits` bits.
pub fn erfc(x: &Float, bits: u32) -> Result<Float> {
    let work = bits + GUARD_BITS;
    if x.is_nan() {
        return Err(Error::Domain("erfc of NaN".into()));
    }
    if x.is_zero() {
        return Ok(Float::with_val(bits, 1));
    }
    if x.is_sign_negative() {
        let pos = erfc_positive(&Float::with_val(work, -x), work)?;
        return Ok(Float::with_val(bits, 2 - pos));
    }
    let v = erfc_positive(&Float::with_val(work, x), work)?;
    Ok(Float::with_val(bits, v))
}

fn erfc_positive(x: &Float, work: u32) -> Result<Float> {
    if *x <= 1 {
        let erf = erf_series(x, work)?;
        Ok(Float::with_val(work, 1 - erf))
    } else {
        erfc_continued_fraction(x, work)
    }
}

/// erf(x) = 2/√π Σ (-1)^k x^{2k+1} / (k! (2k+1)).
fn erf_series(x: &Float, work: u32) -> Result<Float> {
    let x2 = Float::with_val(work, x.clone().square());
    let mut term = Float::with_val(work, x);
    let mut sum = term.clone();
    for k in 1..MAX_SERIES_TERMS {
        term *= &x2;
        term /= k as u32;
        term = -term;
        let contrib = Float::with_val(work, &term / (2 * k as u32 + 1));
        sum += &contrib;
        if contrib.is_zero() || (contrib.get_exp().unwrap_or(i32::MIN) as i64)
            < sum.get_exp().unwrap_or(0) as i64 - i64::from(work)
        {
            return Ok(sum * 2u32 / sqrt_pi(work));
        }
    }
    Err(Error::PrecisionExhausted { what: "erf series", iterations: MAX_SERIES_TERMS })
}

/// erfc(x) = e^{-x²} x h / √π where h is the continued fraction of
/// e^{z} z^{-1/2} Γ(1/2, z), z = x², evaluated by the modified Lentz method.
fn erfc_continued_fraction(x: &Float, work: u32) -> Result<Float> {
    let z = Float::with_val(work, x.clone().square());
    let eps_exp = -(work as i32);
    let mut b = Float::with_val(work, &z + 0.5f64);
    let mut d = Float::with_val(work, 1 / &b);
    let mut h = d.clone();
    let mut c: Option<Float> = None;
    for i in 1..MAX_CF_TERMS {
        // a_i = -i (i - 1/2)
        let an = -(i as f64) * (i as f64 - 0.5);
        b += 2u32;
        d *= an;
        d += &b;
        let next_c = match c.take() {
            None => b.clone(),
            Some(prev) => Float::with_val(work, an / prev) + &b,
        };
        d.recip_mut();
        let del = Float::with_val(work, &d * &next_c);
        h *= &del;
        c = Some(next_c);
        let dev = del - 1u32;
        if dev.is_zero() || dev.get_exp().unwrap_or(i32::MIN) < eps_exp {
            let pref = Float::with_val(work, -z).exp() * x / sqrt_pi(work);
            return Ok(pref * h);
        }
    }
    Err(Error::PrecisionExhausted { what: "erfc continued fraction", iterations: MAX_CF_TERMS })
}

/// G_j = ∫ t^j e^{-t²} dt over ℝ for j = 0..count-1, via G_j = (j-1)/2 · G_{j-2}.
pub fn gaussian_moments(count: usize, bits: u32) -> Vec<Float> {
    let mut g: Vec<Float> = Vec::with_capacity(count);
    for j in 0..count {
        let v = match j {
            0 => sqrt_pi(bits),
            1 => Float::new(bits),
            _ => Float::with_val(bits, &g[j - 2] * (j as u32 - 1)) / 2u32,
        };
        g.push(v);
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::{rel_err, ulps};

    #[test]
    fn erfc_at_zero_is_one() {
        assert_eq!(erfc(&Float::with_val(64, 0), 256).unwrap(), 1);
    }

    #[test]
    fn erfc_matches_mpfr_across_regions() {
        for &bits in &[128u32, 256, 1024] {
            for &x in &[-7.5, -3.0, -1.0, -0.999, -0.3, 1e-9, 0.5, 0.9999, 1.0, 1.0001, 2.0, 4.5, 9.0, 12.0] {
                let xf = Float::with_val(bits, x);
                let ours = erfc(&xf, bits).unwrap();
                let reference = Float::with_val(bits + 64, &xf).erfc();
                let err = rel_err(&ours, &reference);
                assert!(err < ulps(bits, 4), "x={x} bits={bits} err={}", err.to_f64());
            }
        }
    }

    #[test]
    fn gaussian_moment_values() {
        let g = gaussian_moments(7, 256);
        let sp = sqrt_pi(256);
        assert_eq!(g[0], sp);
        assert!(g[1].is_zero() && g[3].is_zero() && g[5].is_zero());
        assert_eq!(g[2], Float::with_val(256, &sp / 2u32));
        assert!(rel_err(&g[4], &(Float::with_val(256, &sp * 3u32) / 4u32)) < ulps(256, 2));
        assert!(rel_err(&g[6], &(Float::with_val(256, &sp * 15u32) / 8u32)) < ulps(256, 4));
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(64))]
        #[test]
        fn erfc_agrees_with_mpfr(x in -10.0f64..10.0) {
            let xf = Float::with_val(200, x);
            let ours = erfc(&xf, 200).unwrap();
            let reference = Float::with_val(264, &xf).erfc();
            proptest::prop_assert!(rel_err(&ours, &reference) < ulps(200, 4));
        }
    }
}
