//! Large-n behaviour at x̃ = 0: the closed-form asymptotes for α_n and r_n,
//! fitting of the phase B, and the order-1/n² check of the asymptotes
//! against the recurrence.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use rug::float::Constant;
use rug::Float;

use crate::table::CoeffTable;
use crate::{Error, Result};

/// b = ln((1 + β/2)/(1 - β/2)) / 2π, for β/2 in (-1, 1).
pub fn b_const(beta: f64) -> Result<f64> {
    check_beta(beta)?;
    let x = beta / 2.0;
    Ok((x.ln_1p() - (-x).ln_1p()) / TAU)
}

/// [`b_const`] at `bits` of precision.
pub fn b_const_float(beta: &Float, bits: u32) -> Result<Float> {
    check_beta(beta.to_f64())?;
    let half = Float::with_val(bits, beta) / 2u32;
    if half.clone().abs() >= 1 {
        return Err(Error::Domain(format!("beta/2 = {} outside (-1, 1)", half.to_f64())));
    }
    let ratio = Float::with_val(bits, 1 + &half) / Float::with_val(bits, 1 - &half);
    let two_pi = Float::with_val(bits, Constant::Pi) * 2u32;
    Ok(ratio.ln() / two_pi)
}

fn check_beta(beta: f64) -> Result<()> {
    if !beta.is_finite() || beta.abs() >= 2.0 {
        return Err(Error::Domain(format!("beta/2 = {} outside (-1, 1)", beta / 2.0)));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoteParams {
    pub beta: f64,
    pub b: f64,
    /// B, in [0, 2π).
    pub phase: f64,
}

impl AsymptoteParams {
    pub fn new(beta: f64, phase: f64) -> Result<Self> {
        Ok(AsymptoteParams { beta, b: b_const(beta)?, phase: phase.rem_euclid(TAU) })
    }

    /// Parameters of the mirrored weight: b → -b, B → π - B.
    pub fn mirrored(&self) -> Self {
        AsymptoteParams { beta: -self.beta, b: -self.b, phase: (PI - self.phase).rem_euclid(TAU) }
    }
}

/// (α_n, r_n) from the asymptotic expansion at x̃ = 0, with θ = 2b ln n + B:
///
/// α_n ≈ b/√(2n) [1 + (-1)ⁿ sin θ - (1/4n)(1 + (-1)ⁿ(sin θ - 4b cos θ))]
/// r_n ≈ -b(-1)ⁿ cos θ - (b²/2n)(1 + sin² θ)
pub fn asymptote(n: usize, params: &AsymptoteParams, bits: u32) -> Result<(Float, Float)> {
    if n == 0 {
        return Err(Error::InvalidArgument("asymptote needs n >= 1".into()));
    }
    let b = b_const_float(&Float::with_val(bits, params.beta), bits)?;
    Ok(asymptote_with(n, &b, &Float::with_val(bits, params.phase)))
}

fn asymptote_with(n: usize, b: &Float, phase: &Float) -> (Float, Float) {
    let bits = b.prec();
    let nf = Float::with_val(bits, n);
    let theta = Float::with_val(bits, nf.ln_ref()) * b * 2u32 + phase;
    let (sin, cos) = theta.sin_cos(Float::new(bits));
    let sign: i32 = if n.is_multiple_of(2) { 1 } else { -1 };

    let inner = Float::with_val(bits, &sin - Float::with_val(bits, b * &cos) * 4u32) * sign + 1u32;
    let correction = inner / Float::with_val(bits, &nf * 4u32);
    let bracket = Float::with_val(bits, &sin * sign) + 1u32 - correction;
    let scale = Float::with_val(bits, b / Float::with_val(bits, &nf * 2u32).sqrt());
    let alpha = scale * bracket;

    let lead = Float::with_val(bits, b * &cos) * -sign;
    let tail = Float::with_val(bits, sin.square_ref()) + 1u32;
    let tail = tail * Float::with_val(bits, b.square_ref()) / Float::with_val(bits, &nf * 2u32);
    (alpha, lead - tail)
}

/// Least-squares phase over n in [lo, hi].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseFit {
    pub phase: f64,
    /// Amplitude of the linear fit relative to b; 1 for a perfect leading-order match.
    pub amplitude: f64,
    pub rms: f64,
    pub lo: usize,
    pub hi: usize,
}

/// Fits B in r_n ≈ -b(-1)ⁿ cos(2b ln n + B) over n in [lo, hi].
pub fn fit_phase(table: &CoeffTable, lo: usize, hi: usize) -> Result<PhaseFit> {
    if !table.xjump().is_zero() {
        return Err(Error::InvalidArgument("phase fit needs a table at x̃ = 0".into()));
    }
    if lo < 1 || lo >= hi || hi > table.n_max {
        return Err(Error::InvalidArgument(format!("window [{lo}, {hi}] outside 1..={}", table.n_max)));
    }
    let data: Vec<(usize, f64)> = (lo..=hi).map(|n| (n, table.r[n].to_f64())).collect();
    fit_phase_data(table.beta().to_f64(), &data, lo, hi)
}

fn fit_phase_data(beta: f64, data: &[(usize, f64)], lo: usize, hi: usize) -> Result<PhaseFit> {
    let b = b_const(beta)?;
    if b == 0.0 {
        return Err(Error::DegenerateFit("b = 0: r_n carries no phase".into()));
    }
    // r = c·u + s·v with (c, s) = (cos B, sin B)
    let basis = |n: usize| {
        let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
        let phi = 2.0 * b * (n as f64).ln();
        (-b * sign * phi.cos(), b * sign * phi.sin())
    };
    let (mut uu, mut uv, mut vv, mut ur, mut vr) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(n, r) in data {
        let (u, v) = basis(n);
        uu += u * u;
        uv += u * v;
        vv += v * v;
        ur += u * r;
        vr += v * r;
    }
    let det = uu * vv - uv * uv;
    if det.abs() <= f64::EPSILON * uu * vv {
        return Err(Error::DegenerateFit("singular normal equations".into()));
    }
    let c = (ur * vv - vr * uv) / det;
    let s = (vr * uu - ur * uv) / det;
    let mut phase = s.atan2(c);

    // Newton on Σ (r - c(B)u - s(B)v)² with unit amplitude
    for _ in 0..50 {
        let (mut g, mut hss) = (0.0, 0.0);
        for &(n, r) in data {
            let (u, v) = basis(n);
            let model = phase.cos() * u + phase.sin() * v;
            let dm = -phase.sin() * u + phase.cos() * v;
            let d2m = -model;
            g += (model - r) * dm;
            hss += dm * dm + (model - r) * d2m;
        }
        if hss <= 0.0 {
            break;
        }
        let step = g / hss;
        phase -= step;
        if step.abs() < 1e-15 {
            break;
        }
    }
    let rms = (data
        .iter()
        .map(|&(n, r)| {
            let (u, v) = basis(n);
            (r - phase.cos() * u - phase.sin() * v).powi(2)
        })
        .sum::<f64>()
        / data.len() as f64)
        .sqrt();
    Ok(PhaseFit { phase: phase.rem_euclid(TAU), amplitude: c.hypot(s), rms, lo, hi })
}

/// n²-scaled residuals of the recurrence at x̃ = 0 evaluated on the asymptotes:
/// `(r_{n+1} + r_n)/2 + α_n²` and `r_n² - 2(n + r_n) α_n α_{n-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderCheck {
    pub n_min: usize,
    pub first: Vec<f64>,
    pub second: Vec<f64>,
    pub sup_first: f64,
    pub sup_second: f64,
}

/// Runs n = 2..=n_max.
pub fn order_check(params: &AsymptoteParams, n_max: usize, bits: u32) -> Result<OrderCheck> {
    if n_max < 100 {
        return Err(Error::InvalidArgument("order check needs n_max >= 100".into()));
    }
    let b = b_const_float(&Float::with_val(bits, params.beta), bits)?;
    let phase = Float::with_val(bits, params.phase);
    let n_min = 2;
    const CHUNK: usize = 4096;
    let starts: Vec<usize> = (n_min..=n_max).step_by(CHUNK).collect();
    let chunks: Vec<(Vec<f64>, Vec<f64>)> = starts
        .par_iter()
        .map(|&start| {
            let end = (start + CHUNK - 1).min(n_max);
            let mut prev = asymptote_with(start - 1, &b, &phase);
            let mut cur = asymptote_with(start, &b, &phase);
            let mut first = Vec::with_capacity(end - start + 1);
            let mut second = Vec::with_capacity(end - start + 1);
            for n in start..=end {
                let next = asymptote_with(n + 1, &b, &phase);
                let (a_prev, _) = &prev;
                let (a, r) = &cur;
                let (_, r_next) = &next;
                let scale = (n as f64) * (n as f64);
                let e1 = Float::with_val(bits, r_next + r) / 2u32 + Float::with_val(bits, a.square_ref());
                let e2 = Float::with_val(bits, r.square_ref())
                    - Float::with_val(bits, r + n as u32) * a * a_prev * 2u32;
                first.push(e1.to_f64().abs() * scale);
                second.push(e2.to_f64().abs() * scale);
                prev = cur;
                cur = next;
            }
            (first, second)
        })
        .collect();
    let mut first = Vec::with_capacity(n_max);
    let mut second = Vec::with_capacity(n_max);
    for (f, s) in chunks {
        first.extend(f);
        second.extend(s);
    }
    let sup = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    Ok(OrderCheck { n_min, sup_first: sup(&first), sup_second: sup(&second), first, second })
}
