//! Moments of the jump-deformed Hermite weight.

use rug::Float;

use crate::special::{erfc, gaussian_moments, sqrt_pi};
use crate::{Result, WeightSpec};

/// Bits carried on top of the target precision. The upward recursion for
/// negative x̃ mixes signs and loses a few digits for large j.
const GUARD_BITS: u32 = 64;

/// μ_j = ∫ t^j w(t) dt and the tails I_j(x̃) = ∫_{x̃}^∞ t^j e^{-t²} dt.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentVector {
    pub spec: WeightSpec,
    pub mu: Vec<Float>,
    pub incomplete: Vec<Float>,
    pub bits: u32,
}

impl MomentVector {
    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }
}

/// I_j(x̃) for j = 0..=jmax.
///
/// I_0 = (√π/2) erfc(x̃), I_1 = e^{-x̃²}/2 and
/// I_j = x̃^{j-1} e^{-x̃²}/2 + (j-1)/2 · I_{j-2}.
pub fn incomplete_integrals(xjump: &Float, jmax: usize, bits: u32) -> Result<Vec<Float>> {
    let work = bits + GUARD_BITS;
    let x = Float::with_val(work, xjump);
    let half_gauss = Float::with_val(work, -x.clone().square()).exp() / 2u32;
    let mut out: Vec<Float> = Vec::with_capacity(jmax + 1);
    out.push(sqrt_pi(work) * erfc(&x, work)? / 2u32);
    if jmax >= 1 {
        out.push(half_gauss.clone());
    }
    // x̃^{j-1} e^{-x̃²}/2, advanced by one factor of x̃ per step
    let mut power_term = half_gauss;
    for j in 2..=jmax {
        power_term *= &x;
        let rec = Float::with_val(work, &out[j - 2] * (j as u32 - 1)) / 2u32;
        out.push(rec + &power_term);
    }
    Ok(out.into_iter().map(|v| Float::with_val(bits, v)).collect())
}

/// μ_j = (1 - β/2) G_j + β I_j(x̃) for j = 0..count-1.
pub fn moments(spec: &WeightSpec, count: usize, bits: u32) -> Result<MomentVector> {
    let count = count.max(1);
    let work = bits + GUARD_BITS;
    let incomplete = incomplete_integrals(spec.xjump(), count - 1, work)?;
    let gauss = gaussian_moments(count, work);
    let beta = Float::with_val(work, spec.beta());
    let base = Float::with_val(work, 1 - Float::with_val(work, &beta / 2u32));
    let mu = gauss
        .iter()
        .zip(&incomplete)
        .map(|(g, i)| {
            let v = Float::with_val(work, &base * g) + Float::with_val(work, &beta * i);
            Float::with_val(bits, v)
        })
        .collect();
    Ok(MomentVector {
        spec: spec.clone(),
        mu,
        incomplete: incomplete.into_iter().map(|v| Float::with_val(bits, v)).collect(),
        bits,
    })
}
