//! Reference computations used only by the test suite.

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

/// |a - b| / |b|, or |a - b| when b = 0.
pub fn rel_err(a: &Float, b: &Float) -> Float {
    let prec = a.prec().max(b.prec());
    let diff = Float::with_val(prec, a - b).abs();
    if b.is_zero() {
        diff
    } else {
        diff / b.clone().abs()
    }
}

/// k · 2^{-bits}
pub fn ulps(bits: u32, k: u32) -> Float {
    Float::with_val(64, k) >> bits
}

pub fn abs_diff(a: &Float, b: &Float) -> Float {
    let prec = a.prec().max(b.prec());
    Float::with_val(prec, a - b).abs()
}

/// Tanh-sinh rule on [-1, 1], refined level by level until two successive
/// estimates agree to the working precision.
pub struct TanhSinh {
    bits: u32,
    max_level: u32,
}

impl TanhSinh {
    pub fn new(bits: u32) -> Self {
        TanhSinh { bits, max_level: 12 }
    }

    pub fn integrate<F: Fn(&Float) -> Float>(&self, f: F, a: &Float, b: &Float) -> Float {
        let p = self.bits;
        let half_pi = Float::with_val(p, Constant::Pi) / 2u32;
        let mid = Float::with_val(p, a + b) / 2u32;
        let rad = Float::with_val(p, b - a) / 2u32;
        // cutoff where the weights drop below 2^{-bits-30}
        let target = f64::from(p + 30) * std::f64::consts::LN_2;
        let u_max = (target / std::f64::consts::PI).asinh() + 0.5;

        let eval = |u: &Float| -> Float {
            let s = Float::with_val(p, &half_pi * Float::with_val(p, u.sinh_ref()));
            let c = Float::with_val(p, u.cosh_ref());
            let t = Float::with_val(p, s.tanh_ref());
            let ch = Float::with_val(p, s.cosh_ref());
            let w = Float::with_val(p, &half_pi * &c) / ch.square();
            let x = Float::with_val(p, &rad * &t) + &mid;
            w * f(&x)
        };

        let mut prev: Option<Float> = None;
        let mut total = eval(&Float::new(p));
        let mut h = Float::with_val(p, 1);
        for level in 0..=self.max_level {
            // new abscissae at this level: odd multiples of h (all multiples at level 0)
            let step = if level == 0 { 1 } else { 2 };
            let start = 1;
            let mut k = start;
            loop {
                let u = Float::with_val(p, &h * k);
                if u.to_f64() > u_max {
                    break;
                }
                total += eval(&u);
                total += eval(&Float::with_val(p, -&u));
                k += step;
            }
            let estimate = Float::with_val(p, &total * &h) * &rad;
            if let Some(prev) = &prev {
                let diff = Float::with_val(p, &estimate - prev).abs();
                let scale = estimate.clone().abs();
                if level >= 3 && diff <= scale * ulps(p, 1 << 8) {
                    return estimate;
                }
            }
            prev = Some(estimate);
            h /= 2u32;
        }
        prev.expect("at least one level")
    }
}

/// ∫_x^∞ t^j e^{-t²} dt by tanh-sinh on unit panels, truncated where the
/// integrand is below 2^{-bits-40} of its maximum on [x, ∞).
pub fn gauss_tail_quadrature(x: &Float, j: usize, bits: u32) -> Float {
    let p = bits;
    let xf = x.to_f64();
    let jf = j as f64;
    let log_f = |t: f64| if t == 0.0 { if j == 0 { 0.0 } else { f64::NEG_INFINITY } } else { jf * t.abs().ln() - t * t };
    let peak = xf.max((jf / 2.0).sqrt());
    let drop = f64::from(bits + 40) * std::f64::consts::LN_2;
    let mut upper = peak + 1.0;
    while log_f(upper) > log_f(peak) - drop {
        upper += 0.5;
    }
    let rule = TanhSinh::new(p);
    let integrand = |t: &Float| {
        let pow = Float::with_val(p, t).pow(j as u32);
        pow * Float::with_val(p, -t.clone().square()).exp()
    };
    let mut lo = Float::with_val(p, x);
    let mut sum = Float::new(p);
    let end = Float::with_val(p, upper);
    while lo < end {
        let hi = Float::with_val(p, &lo + 1u32).min(&end);
        sum += rule.integrate(integrand, &lo, &hi);
        lo = hi;
    }
    sum
}

/// Determinant of a dense matrix by Gaussian elimination with partial pivoting.
pub fn determinant(mut m: Vec<Vec<Float>>, bits: u32) -> Float {
    let n = m.len();
    let mut det = Float::with_val(bits, 1);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| m[a][col].clone().abs().partial_cmp(&m[b][col].clone().abs()).unwrap())
            .unwrap();
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let p = m[col][col].clone();
        if p.is_zero() {
            return Float::new(bits);
        }
        det *= &p;
        for row in col + 1..n {
            let factor = Float::with_val(bits, &m[row][col] / &p);
            for k in col..n {
                let sub = Float::with_val(bits, &factor * &m[col][k]);
                m[row][k] -= sub;
            }
        }
    }
    det
}
