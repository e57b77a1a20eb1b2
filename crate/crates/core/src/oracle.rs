//! Brute-force reference path: monic orthogonal polynomials built from the
//! exact moments by the Stieltjes procedure, in extended precision.
//!
//! Everything here depends only on the moments. P_n(x̃) is evaluated from the
//! stored coefficient vectors by Horner's rule, never through the
//! recurrence coefficients that the fast path produces.

use rug::Float;

use crate::moments::{moments, MomentVector};
use crate::precision::default_oracle_bits;
use crate::table::{hankel_from_norms, CoeffTable, Source};
use crate::{Error, Result, WeightSpec};

/// Largest degree the oracle accepts.
pub const ORACLE_MAX_N: usize = 64;
/// Precision doublings attempted after a positivity breakdown.
pub const ORACLE_RETRIES: usize = 3;

/// Monic P_0 … P_{N+1} with their norms and values at the jump.
#[derive(Debug, Clone)]
pub struct MonicPolySeq {
    pub xjump: Float,
    /// `coeffs[n][k]` is the coefficient of z^k in P_n; `coeffs[n][n] == 1`.
    pub coeffs: Vec<Vec<Float>>,
    /// h_n for n = 0..=N.
    pub h: Vec<Float>,
    pub alpha: Vec<Float>,
    /// β_n for n = 0..=N with β_0 = 0.
    pub beta_n: Vec<Float>,
    /// P_n(x̃) for n = 0..=N+1.
    pub value_at_jump: Vec<Float>,
    pub bits: u32,
}

impl MonicPolySeq {
    pub fn n_max(&self) -> usize {
        self.h.len() - 1
    }

    /// p₁(n), the coefficient of z^{n-1} in P_n, for n = 0..=N+1.
    pub fn p1(&self) -> Vec<Float> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| if n == 0 { Float::new(self.bits) } else { c[n - 1].clone() })
            .collect()
    }
}

/// Σ_i Σ_k p_i q_k μ_{i+k+shift}
fn bilinear(p: &[Float], q: &[Float], mu: &[Float], shift: usize, bits: u32) -> Float {
    bilinear_with_magnitude(p, q, mu, shift, bits).0
}

/// The bilinear form together with Σ |p_i q_k μ_{i+k+shift}|, whose ratio
/// to the result measures the cancellation suffered.
fn bilinear_with_magnitude(
    p: &[Float],
    q: &[Float],
    mu: &[Float],
    shift: usize,
    bits: u32,
) -> (Float, Float) {
    let mut total = Float::new(bits);
    let mut magnitude = Float::new(64);
    for (i, pi) in p.iter().enumerate() {
        if pi.is_zero() {
            continue;
        }
        let mut inner = Float::new(bits);
        let mut inner_mag = Float::new(64);
        for (k, qk) in q.iter().enumerate() {
            let term = Float::with_val(bits, qk * &mu[i + k + shift]);
            inner_mag += Float::with_val(64, term.abs_ref());
            inner += term;
        }
        magnitude += inner_mag * Float::with_val(64, pi.abs_ref());
        total += inner * pi;
    }
    (total, magnitude)
}

/// Bits that must survive the cancellation in h_n for a run to be trusted.
fn retained_bits_floor(bits: u32) -> i64 {
    i64::from((bits / 2).min(64))
}

fn horner(coeffs: &[Float], z: &Float, bits: u32) -> Float {
    let mut acc = Float::new(bits);
    for c in coeffs.iter().rev() {
        acc *= z;
        acc += c;
    }
    acc
}

/// Stieltjes procedure on the moment bilinear form.
///
/// Needs at least 2N+2 moments. A non-positive h_n, or one whose evaluation
/// cancelled all but min(64, bits/2) bits, is reported as
/// [`Error::PositivityBreakdown`]; the caller should retry with more bits.
pub fn orthogonalize(mv: &MomentVector, n_max: usize) -> Result<MonicPolySeq> {
    let need = 2 * n_max + 2;
    if mv.len() < need {
        return Err(Error::InvalidArgument(format!(
            "orthogonalize needs {need} moments, got {}",
            mv.len()
        )));
    }
    let bits = mv.bits;
    let mu = &mv.mu;
    let mut coeffs: Vec<Vec<Float>> = vec![vec![Float::with_val(bits, 1)]];
    let mut h: Vec<Float> = Vec::with_capacity(n_max + 1);
    let mut alpha: Vec<Float> = Vec::with_capacity(n_max + 1);
    let mut beta_n: Vec<Float> = vec![Float::new(bits)];

    for n in 0..=n_max {
        let pn = &coeffs[n];
        let (hn, magnitude) = bilinear_with_magnitude(pn, pn, mu, 0, bits);
        if hn <= 0 {
            return Err(Error::PositivityBreakdown { n, bits });
        }
        let lost = i64::from(magnitude.get_exp().unwrap_or(0)) - i64::from(hn.get_exp().unwrap_or(0));
        if i64::from(bits) - lost < retained_bits_floor(bits) {
            return Err(Error::PositivityBreakdown { n, bits });
        }
        let an = bilinear(pn, pn, mu, 1, bits) / &hn;
        if n > 0 {
            beta_n.push(Float::with_val(bits, &hn / &h[n - 1]));
        }
        // P_{n+1} = (z - α_n) P_n - β_n P_{n-1}
        let mut next = vec![Float::new(bits); n + 2];
        for (k, c) in pn.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= Float::with_val(bits, &an * c);
        }
        if n > 0 {
            for (k, c) in coeffs[n - 1].iter().enumerate() {
                next[k] -= Float::with_val(bits, &beta_n[n] * c);
            }
        }
        next[n + 1] = Float::with_val(bits, 1);
        h.push(hn);
        alpha.push(an);
        coeffs.push(next);
    }

    let xjump = Float::with_val(bits, mv.spec.xjump());
    let value_at_jump = coeffs.iter().map(|c| horner(c, &xjump, bits)).collect();
    Ok(MonicPolySeq { xjump, coeffs, h, alpha, beta_n, value_at_jump, bits })
}

/// R_n = β P_n(x̃)² e^{-x̃²}/h_n for n = 0..=N and
/// r_n = β P_n(x̃) P_{n-1}(x̃) e^{-x̃²}/h_{n-1} for n = 0..=N+1 (r_0 = 0).
pub fn jump_quantities(seq: &MonicPolySeq, spec: &WeightSpec) -> (Vec<Float>, Vec<Float>) {
    let bits = seq.bits;
    let w0 = Float::with_val(bits, -seq.xjump.clone().square()).exp();
    let scale = Float::with_val(bits, spec.beta() * &w0);
    let p = &seq.value_at_jump;
    let big_r = (0..=seq.n_max())
        .map(|n| Float::with_val(bits, p[n].clone().square() * &scale) / &seq.h[n])
        .collect();
    let mut r = vec![Float::new(bits)];
    for n in 1..=seq.n_max() + 1 {
        let v = Float::with_val(bits, &p[n] * &p[n - 1]) * &scale / &seq.h[n - 1];
        r.push(v);
    }
    (big_r, r)
}

/// D_n = ∏_{j<n} h_j for n = 0..=N+1.
pub fn hankel_dets(seq: &MonicPolySeq) -> Vec<Float> {
    hankel_from_norms(&seq.h, seq.bits)
}

/// max_{m<n} |⟨P_m, P_n⟩| / √(h_m h_n), over n ≤ N.
pub fn orthogonality_residual(seq: &MonicPolySeq, mv: &MomentVector) -> Float {
    let bits = seq.bits;
    let mut worst = Float::new(bits);
    for n in 0..=seq.n_max() {
        for m in 0..n {
            let ip = bilinear(&seq.coeffs[m], &seq.coeffs[n], &mv.mu, 0, bits).abs();
            let norm = Float::with_val(bits, &seq.h[m] * &seq.h[n]).sqrt();
            let v = ip / norm;
            if v > worst {
                worst = v;
            }
        }
    }
    worst
}

/// Builds an oracle table, doubling the precision on positivity breakdown.
///
/// `bits = None` selects max(512, 16·N).
pub fn oracle_table(spec: &WeightSpec, n_max: usize, bits: Option<u32>) -> Result<CoeffTable> {
    if n_max > ORACLE_MAX_N {
        return Err(Error::InvalidArgument(format!(
            "oracle limited to N <= {ORACLE_MAX_N}, got {n_max}"
        )));
    }
    let mut bits = bits.unwrap_or_else(|| default_oracle_bits(n_max));
    let mut attempt = 0;
    loop {
        let mv = moments(spec, 2 * n_max + 2, bits)?;
        match orthogonalize(&mv, n_max) {
            Ok(seq) => return Ok(table_from_sequence(&seq, spec)),
            Err(Error::PositivityBreakdown { .. }) if attempt < ORACLE_RETRIES => {
                attempt += 1;
                bits *= 2;
            }
            Err(e) => return Err(e),
        }
    }
}

pub fn table_from_sequence(seq: &MonicPolySeq, spec: &WeightSpec) -> CoeffTable {
    let (big_r, r) = jump_quantities(seq, spec);
    CoeffTable {
        spec: spec.clone(),
        n_max: seq.n_max(),
        alpha: seq.alpha.clone(),
        beta_n: seq.beta_n.clone(),
        r,
        big_r,
        h: Some(seq.h.clone()),
        p1: Some(seq.p1()),
        hankel: Some(hankel_dets(seq)),
        source: Source::Oracle,
        bits: seq.bits,
        warnings: Vec::new(),
    }
}
