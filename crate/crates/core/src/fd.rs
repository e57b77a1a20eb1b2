//! Central finite differences on uniform grids, composite Simpson
//! quadrature, and convergence-order measurement.

use rug::Float;

use crate::{Error, Result};

/// Derivative order for [`fd_derivative`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    First,
    Second,
    Third,
}

impl Order {
    /// Points dropped at each end of the grid.
    pub fn half_width(self) -> usize {
        match self {
            Order::First | Order::Second => 1,
            Order::Third => 2,
        }
    }
}

/// O(h²) central differences: 3-point stencils for the first and second
/// derivative, 5-point for the third. The output has `values.len() - 2m`
/// entries, entry k sitting at grid index k + m with m = `order.half_width()`.
pub fn fd_derivative(values: &[Float], order: Order, h: &Float) -> Result<Vec<Float>> {
    let m = order.half_width();
    let needed = 2 * m + 1;
    if values.len() < needed {
        return Err(Error::GridTooSmall { needed, have: values.len() });
    }
    let bits = values.iter().map(Float::prec).max().unwrap_or(64).max(h.prec());
    let out = (m..values.len() - m)
        .map(|i| {
            let v = |k: isize| &values[(i as isize + k) as usize];
            match order {
                Order::First => Float::with_val(bits, v(1) - v(-1)) / Float::with_val(bits, h * 2u32),
                Order::Second => {
                    let num = Float::with_val(bits, v(1) + v(-1)) - Float::with_val(bits, v(0) * 2u32);
                    num / Float::with_val(bits, h.square_ref())
                }
                Order::Third => {
                    let outer = Float::with_val(bits, v(2) - v(-2));
                    let inner = Float::with_val(bits, v(1) - v(-1)) * 2u32;
                    let h3 = Float::with_val(bits, h.square_ref()) * h * 2u32;
                    (outer - inner) / h3
                }
            }
        })
        .collect();
    Ok(out)
}

/// Composite Simpson rule over an odd number of equally spaced samples.
pub fn simpson(values: &[Float], h: &Float) -> Result<Float> {
    let len = values.len();
    if len < 3 || len.is_multiple_of(2) {
        return Err(Error::GridTooSmall { needed: if len < 3 { 3 } else { len + 1 }, have: len });
    }
    let bits = values.iter().map(Float::prec).max().unwrap_or(64);
    let mut acc = Float::with_val(bits, &values[0] + &values[len - 1]);
    for (i, v) in values.iter().enumerate().take(len - 1).skip(1) {
        let w = if i % 2 == 1 { 4u32 } else { 2u32 };
        acc += Float::with_val(bits, v * w);
    }
    Ok(acc * h / 3u32)
}

/// Observed orders log(e_i/e_{i+1}) / log(h_i/h_{i+1}) for consecutive
/// (step, error) pairs, plus the least-squares slope of log e against log h.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceOrder {
    pub steps: Vec<f64>,
    pub errors: Vec<f64>,
    pub pairwise: Vec<f64>,
    pub fitted: f64,
}

impl ConvergenceOrder {
    pub fn measure(steps: &[f64], errors: &[f64]) -> Result<Self> {
        if steps.len() != errors.len() || steps.len() < 2 {
            return Err(Error::InvalidArgument("need at least two (step, error) pairs".into()));
        }
        if errors.iter().any(|e| !(*e > 0.0)) {
            return Err(Error::InvalidArgument("errors must be positive".into()));
        }
        let pairwise = steps
            .windows(2)
            .zip(errors.windows(2))
            .map(|(h, e)| (e[0] / e[1]).ln() / (h[0] / h[1]).ln())
            .collect();
        let xs: Vec<f64> = steps.iter().map(|h| h.ln()).collect();
        let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        Ok(ConvergenceOrder {
            steps: steps.to_vec(),
            errors: errors.to_vec(),
            pairwise,
            fitted: sxy / sxx,
        })
    }

    /// Every pairwise order and the fitted slope inside [lo, hi].
    pub fn within(&self, lo: f64, hi: f64) -> bool {
        self.pairwise.iter().chain(std::iter::once(&self.fitted)).all(|p| (lo..=hi).contains(p))
    }
}
