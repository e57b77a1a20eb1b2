//! Dependence on the jump location x̃.
//!
//! Tables are computed on a uniform x̃-grid (by either path) and the
//! differential identities are checked with central finite differences:
//! the Toda equations, Painlevé IV for α_n, the Hankel log-derivatives, the
//! free energy and its sum rule, the Toda molecule equation, and α_n
//! recovered from derivatives of the free energy.

use rayon::prelude::*;
use rug::ops::Pow;
use rug::Float;

use crate::fd::{fd_derivative, simpson, Order};
use crate::oracle::oracle_table;
use crate::recurrence::iterate;
use crate::special::sqrt_pi;
use crate::table::{CoeffTable, Source};
use crate::{Error, Result, WeightSpec};

/// One coefficient table per point of a uniform x̃-grid, sharing β, N and precision.
#[derive(Debug, Clone)]
pub struct XGridTables {
    pub grid: Vec<Float>,
    pub tables: Vec<CoeffTable>,
    pub h: Float,
    pub beta: Float,
    pub n_max: usize,
    pub source: Source,
    pub bits: u32,
}

/// A single table on the chosen path; iteration tables get norms and determinants.
pub fn table_at(spec: &WeightSpec, n_max: usize, source: Source, bits: u32) -> Result<CoeffTable> {
    match source {
        Source::Oracle => oracle_table(spec, n_max, Some(bits)),
        Source::Iteration => iterate(spec, n_max, bits)?.with_norms(),
    }
}

impl XGridTables {
    /// Grid x_k = start + k h for k = 0..count.
    pub fn build(
        beta: &Float,
        start: &Float,
        h: &Float,
        count: usize,
        n_max: usize,
        source: Source,
        bits: u32,
    ) -> Result<Self> {
        if !(*h > 0) {
            return Err(Error::InvalidArgument("grid step must be positive".into()));
        }
        let grid: Vec<Float> =
            (0..count).map(|k| Float::with_val(bits, h * k as u32) + start).collect();
        let template = WeightSpec::from_floats(beta.clone(), start.clone())?;
        let tables = grid
            .par_iter()
            .map(|x| table_at(&template.with_xjump(x.clone()), n_max, source, bits))
            .collect::<Result<Vec<_>>>()?;
        Ok(XGridTables {
            grid,
            tables,
            h: Float::with_val(bits, h),
            beta: beta.clone(),
            n_max,
            source,
            bits,
        })
    }

    /// 2·half + 1 points centred on `center`.
    pub fn centered(
        beta: &Float,
        center: &Float,
        h: &Float,
        half: usize,
        n_max: usize,
        source: Source,
        bits: u32,
    ) -> Result<Self> {
        let start = Float::with_val(bits, center - Float::with_val(bits, h * half as u32));
        Self::build(beta, &start, h, 2 * half + 1, n_max, source, bits)
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn column<F: Fn(&CoeffTable) -> Float>(&self, f: F) -> Vec<Float> {
        self.tables.iter().map(f).collect()
    }

    fn require_n(&self, n: usize, lowest: usize) -> Result<()> {
        if n < lowest || n > self.n_max {
            return Err(Error::InvalidArgument(format!(
                "n = {n} outside {lowest}..={}",
                self.n_max
            )));
        }
        Ok(())
    }

    fn ln_hankel_column(&self, n: usize) -> Result<Vec<Float>> {
        self.tables
            .iter()
            .map(|t| t.ln_hankel(n).ok_or_else(|| missing("Hankel determinants")))
            .collect()
    }
}

fn missing(what: &str) -> Error {
    Error::InvalidArgument(format!("tables carry no {what}"))
}

/// A residual value at (x̃, n).
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualPoint {
    pub x: Float,
    pub n: usize,
    pub value: Float,
}

/// Residuals of one identity, plus points where it was not evaluated.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResidualSet {
    pub name: String,
    pub points: Vec<ResidualPoint>,
    pub masked: Vec<(Float, usize)>,
}

impl ResidualSet {
    pub fn new(name: &str) -> Self {
        ResidualSet { name: name.to_string(), ..Default::default() }
    }

    /// The point of largest |value|.
    pub fn max_abs(&self) -> Option<&ResidualPoint> {
        self.points.iter().max_by(|a, b| {
            a.value.clone().abs().partial_cmp(&b.value.clone().abs()).expect("finite residuals")
        })
    }

    pub fn max_abs_f64(&self) -> f64 {
        self.max_abs().map_or(0.0, |p| p.value.to_f64().abs())
    }

    fn push(&mut self, x: &Float, n: usize, value: Float) {
        self.points.push(ResidualPoint { x: x.clone(), n, value });
    }

    /// Merges several sets under one name.
    pub fn concat(name: &str, sets: impl IntoIterator<Item = ResidualSet>) -> ResidualSet {
        let mut out = ResidualSet::new(name);
        for s in sets {
            out.points.extend(s.points);
            out.masked.extend(s.masked);
        }
        out
    }
}

/// Residuals of the x̃-evolution equations at interior grid points.
#[derive(Debug, Clone)]
pub struct TodaReport {
    /// ∂ ln h_n + 2 α_n
    pub norm: ResidualSet,
    /// ∂r_n / (2(n + r_n)) - (α_{n-1} - α_n), n ≥ 1
    pub first: ResidualSet,
    /// ∂α_n - (r_n - r_{n+1})
    pub second: ResidualSet,
}

pub fn toda_residuals(g: &XGridTables) -> Result<TodaReport> {
    let b = g.bits;
    let m = Order::First.half_width();
    let mut report = TodaReport {
        norm: ResidualSet::new("toda-norm"),
        first: ResidualSet::new("toda-first"),
        second: ResidualSet::new("toda-second"),
    };
    for n in 0..=g.n_max {
        let ln_h: Vec<Float> = g
            .tables
            .iter()
            .map(|t| {
                t.h.as_ref().map(|h| Float::with_val(b, h[n].ln_ref())).ok_or_else(|| missing("norms"))
            })
            .collect::<Result<_>>()?;
        let d_ln_h = fd_derivative(&ln_h, Order::First, &g.h)?;
        let d_alpha = fd_derivative(&g.column(|t| t.alpha[n].clone()), Order::First, &g.h)?;
        let d_r = fd_derivative(&g.column(|t| t.r[n].clone()), Order::First, &g.h)?;
        for (k, t) in g.tables[m..g.len() - m].iter().enumerate() {
            let x = &g.grid[k + m];
            let two_alpha = Float::with_val(b, &t.alpha[n] * 2u32);
            report.norm.push(x, n, Float::with_val(b, &d_ln_h[k] + &two_alpha));
            let shift = Float::with_val(b, &t.r[n] - &t.r[n + 1]);
            report.second.push(x, n, Float::with_val(b, &d_alpha[k] - &shift));
            if n >= 1 {
                let denom = Float::with_val(b, &t.r[n] + n as u32) * 2u32;
                let lhs = Float::with_val(b, &d_r[k] / &denom);
                let rhs = Float::with_val(b, &t.alpha[n - 1] - &t.alpha[n]);
                report.first.push(x, n, lhs - rhs);
            }
        }
    }
    Ok(report)
}

/// r_n reconstructed from α_n alone as α_n(x̃ - α_n) + ∂α_n/2.
#[derive(Debug, Clone, PartialEq)]
pub struct RnEstimate {
    pub x: Float,
    pub estimate: Float,
    pub table: Float,
    pub deviation: Float,
}

pub fn rn_from_alpha(g: &XGridTables, n: usize) -> Result<Vec<RnEstimate>> {
    g.require_n(n, 0)?;
    let b = g.bits;
    let m = Order::First.half_width();
    let d_alpha = fd_derivative(&g.column(|t| t.alpha[n].clone()), Order::First, &g.h)?;
    Ok((m..g.len() - m)
        .map(|i| {
            let t = &g.tables[i];
            let x = &g.grid[i];
            let gap = Float::with_val(b, x - &t.alpha[n]);
            let estimate = Float::with_val(b, &t.alpha[n] * &gap) + Float::with_val(b, &d_alpha[i - m] / 2u32);
            let deviation = Float::with_val(b, &estimate - &t.r[n]);
            RnEstimate { x: x.clone(), estimate, table: t.r[n].clone(), deviation }
        })
        .collect())
}

/// `α'' - (α')²/(2α) - 6α³ + 8x̃α² - 2(x̃² - (2n+1))α` for given α, α', α''.
pub fn painleve_expression(alpha: &Float, d1: &Float, d2: &Float, x: &Float, n: usize) -> Float {
    let b = alpha.prec().max(x.prec());
    let a2 = Float::with_val(b, alpha.square_ref());
    let a3 = Float::with_val(b, &a2 * alpha);
    let kinetic = Float::with_val(b, d1.square_ref()) / Float::with_val(b, alpha * 2u32);
    let quad = Float::with_val(b, x.square_ref()) - (2 * n as u32 + 1);
    Float::with_val(b, d2 - &kinetic) - Float::with_val(b, &a3 * 6u32)
        + Float::with_val(b, x * &a2) * 8u32
        - Float::with_val(b, &quad * alpha) * 2u32
}

/// The same equation after α → α/2 and x̃ → -x̃:
/// `y'' - (y')²/(2y) - (3/2)y³ - 4t y² - 2(t² - (2n+1)) y`.
///
/// For y(t) = 2α(-t) this equals 2·[`painleve_expression`] at x̃ = -t.
pub fn painleve_canonical_expression(y: &Float, d1: &Float, d2: &Float, t: &Float, n: usize) -> Float {
    let b = y.prec().max(t.prec());
    let y2 = Float::with_val(b, y.square_ref());
    let y3 = Float::with_val(b, &y2 * y);
    let kinetic = Float::with_val(b, d1.square_ref()) / Float::with_val(b, y * 2u32);
    let quad = Float::with_val(b, t.square_ref()) - (2 * n as u32 + 1);
    Float::with_val(b, d2 - &kinetic)
        - Float::with_val(b, &y3 * 3u32) / 2u32
        - Float::with_val(b, t * &y2) * 4u32
        - Float::with_val(b, &quad * y) * 2u32
}

/// Default |α_n| below which Painlevé residuals are masked.
pub const PAINLEVE_GUARD: f64 = 1e-10;

/// Painlevé IV residual at interior grid points; points with |α_n| < guard
/// are masked (the (α')²/α term is 0/0 there).
pub fn painleve_residual(g: &XGridTables, n: usize, guard: f64) -> Result<ResidualSet> {
    g.require_n(n, 1)?;
    let m = Order::Second.half_width();
    let alpha = g.column(|t| t.alpha[n].clone());
    let d1 = fd_derivative(&alpha, Order::First, &g.h)?;
    let d2 = fd_derivative(&alpha, Order::Second, &g.h)?;
    let mut set = ResidualSet::new("painleve");
    for i in m..g.len() - m {
        let x = &g.grid[i];
        if Float::with_val(64, alpha[i].abs_ref()) < guard {
            set.masked.push((x.clone(), n));
            continue;
        }
        set.push(x, n, painleve_expression(&alpha[i], &d1[i - m], &d2[i - m], x, n));
    }
    Ok(set)
}

/// Number of Taylor terms kept around x̃ = 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaylorOrder {
    /// α(0) + α'(0) x̃
    Two,
    /// α(0) + α'(0) x̃ + α''(0) x̃²/2
    Three,
}

/// α''(0) from the Painlevé equation at x̃ = 0: (α')²/(2α) + 6α³ - 2(2n+1)α.
pub fn second_derivative_at_origin(alpha: &Float, d1: &Float, n: usize) -> Result<Float> {
    if alpha.is_zero() {
        return Err(Error::Domain("alpha_n(0) = 0".into()));
    }
    let b = alpha.prec();
    let kinetic = Float::with_val(b, d1.square_ref()) / Float::with_val(b, alpha * 2u32);
    let cubic = Float::with_val(b, alpha.square_ref()) * alpha * 6u32;
    let linear = Float::with_val(b, alpha * (2 * n as u32 + 1)) * 2u32;
    Ok(kinetic + cubic - linear)
}

/// Truncated Taylor series of α_n about x̃ = 0.
pub fn taylor_extend(
    alpha_at_origin: &Float,
    alpha_prime_at_origin: &Float,
    n: usize,
    order: TaylorOrder,
    x: &Float,
) -> Result<Float> {
    let second = second_derivative_at_origin(alpha_at_origin, alpha_prime_at_origin, n)?;
    let b = alpha_at_origin.prec();
    let mut value = Float::with_val(b, alpha_prime_at_origin * x) + alpha_at_origin;
    if order == TaylorOrder::Three {
        value += Float::with_val(b, x.square_ref()) * &second / 2u32;
    }
    Ok(value)
}

/// [`taylor_extend`] with α_n(0) from the table and α'_n(0) = r_n(0) - r_{n+1}(0).
pub fn taylor_from_table(table: &CoeffTable, n: usize, order: TaylorOrder, x: &Float) -> Result<Float> {
    if !table.xjump().is_zero() {
        return Err(Error::InvalidArgument("Taylor data must come from x̃ = 0".into()));
    }
    if n > table.n_max {
        return Err(Error::InvalidArgument(format!("n = {n} beyond table N = {}", table.n_max)));
    }
    let d1 = Float::with_val(table.bits, &table.r[n] - &table.r[n + 1]);
    taylor_extend(&table.alpha[n], &d1, n, order, x)
}

/// Residuals of the three Hankel log-derivative relations at one n.
#[derive(Debug, Clone)]
pub struct HankelReport {
    /// -2 Σ_{j<n} α_j - [2x̃ r_n - 2(n + r_n)(α_n + α_{n-1})], at every grid point.
    pub identity: ResidualSet,
    /// ∂ ln D_n + 2 Σ_{j<n} α_j at interior points.
    pub first: ResidualSet,
    /// ∂² ln D_n - 2 r_n at interior points.
    pub second: ResidualSet,
}

/// -2 Σ_{j<n} α_j and 2x̃ r_n - 2(n + r_n)(α_n + α_{n-1}) from one table.
fn hankel_identity_sides(t: &CoeffTable, n: usize) -> (Float, Float) {
    let b = t.bits;
    let partial = t.alpha[..n].iter().fold(Float::new(b), |acc, a| acc + a);
    let lhs = Float::with_val(b, &partial * 2u32);
    let lhs = -lhs;
    let first = Float::with_val(b, t.xjump() * &t.r[n]) * 2u32;
    let pair = Float::with_val(b, &t.alpha[n] + &t.alpha[n - 1]);
    let second = Float::with_val(b, &t.r[n] + n as u32) * pair * 2u32;
    (lhs, first - second)
}

/// The derivative-free identity for every n = 1..=N of one table.
pub fn hankel_identity(table: &CoeffTable) -> ResidualSet {
    let mut set = ResidualSet::new("hankel-identity");
    for n in 1..=table.n_max {
        let (lhs, rhs) = hankel_identity_sides(table, n);
        set.push(table.xjump(), n, lhs - rhs);
    }
    set
}

pub fn hankel_logderivs(g: &XGridTables, n: usize) -> Result<HankelReport> {
    g.require_n(n, 1)?;
    let b = g.bits;
    let mut identity = ResidualSet::new("hankel-identity");
    let mut sums = Vec::with_capacity(g.len());
    for (x, t) in g.grid.iter().zip(&g.tables) {
        let (lhs, rhs) = hankel_identity_sides(t, n);
        identity.push(x, n, Float::with_val(b, &lhs - &rhs));
        sums.push(lhs);
    }
    let ln_d = g.ln_hankel_column(n)?;
    let d1 = fd_derivative(&ln_d, Order::First, &g.h)?;
    let d2 = fd_derivative(&ln_d, Order::Second, &g.h)?;
    let m = 1;
    let mut first = ResidualSet::new("hankel-first");
    let mut second = ResidualSet::new("hankel-second");
    for i in m..g.len() - m {
        let x = &g.grid[i];
        first.push(x, n, Float::with_val(b, &d1[i - m] - &sums[i]));
        let two_r = Float::with_val(b, &g.tables[i].r[n] * 2u32);
        second.push(x, n, Float::with_val(b, &d2[i - m] - &two_r));
    }
    Ok(HankelReport { identity, first, second })
}

/// Free energy F_n = -ln D_n on the grid, its shifted form f_n = F_n - n x̃²,
/// Ψ_n with α_n = (β/2)Ψ_n², and the integral
/// S_n = ∫ ((4n+1-2x²)Ψ² + 3βxΨ⁴ - β²Ψ⁶) dx over the grid.
///
/// Ψ_n is taken non-negative; only even powers enter the integrand.
#[derive(Debug, Clone)]
pub struct FreeEnergyData {
    pub n: usize,
    pub x: Vec<Float>,
    pub big_f: Vec<Float>,
    pub f: Vec<Float>,
    pub psi: Vec<Float>,
    pub sum_rule: Float,
    /// Representation of F_n(x̃) - F_n(x_0) at even grid offsets.
    pub representation: Vec<FreeEnergyPoint>,
}

/// (β/2)∫_{x_0}^{x̃}(…)dx + (β/2)Ψ_nΨ_n' compared with -ln D_n(x̃) + ln D_n(x_0).
#[derive(Debug, Clone, PartialEq)]
pub struct FreeEnergyPoint {
    pub x: Float,
    pub integrated: Float,
    pub direct: Float,
    pub discrepancy: Float,
}

fn free_energy_integrand(x: &Float, psi2: &Float, beta: &Float, n: usize, b: u32) -> Float {
    let lin = Float::with_val(b, 4 * n as u32 + 1) - Float::with_val(b, x.square_ref()) * 2u32;
    let psi4 = Float::with_val(b, psi2.square_ref());
    let psi6 = Float::with_val(b, &psi4 * psi2);
    let t1 = Float::with_val(b, &lin * psi2);
    let t2 = Float::with_val(b, beta * x) * &psi4 * 3u32;
    let t3 = Float::with_val(b, beta.square_ref()) * &psi6;
    t1 + t2 - t3
}

pub fn free_energy(g: &XGridTables, n: usize) -> Result<FreeEnergyData> {
    g.require_n(n, 1)?;
    if g.beta.is_zero() {
        return Err(Error::Domain("free energy representation needs beta != 0".into()));
    }
    let b = g.bits;
    let beta = Float::with_val(b, &g.beta);
    let mut psi = Vec::with_capacity(g.len());
    let mut integrand = Vec::with_capacity(g.len());
    for (x, t) in g.grid.iter().zip(&g.tables) {
        let psi2 = Float::with_val(b, &t.alpha[n] * 2u32) / &beta;
        if psi2 < 0 {
            return Err(Error::Negativity { x: x.to_f64(), n });
        }
        integrand.push(free_energy_integrand(x, &psi2, &beta, n, b));
        psi.push(psi2.sqrt());
    }
    let sum_rule = simpson(&integrand, &g.h)?;

    let big_f: Vec<Float> = match g.ln_hankel_column(n) {
        Ok(ln_d) => ln_d.into_iter().map(|v| -v).collect(),
        Err(_) => Vec::new(),
    };
    let f: Vec<Float> = big_f
        .iter()
        .zip(&g.grid)
        .map(|(fv, x)| Float::with_val(b, fv - Float::with_val(b, x.square_ref()) * n as u32))
        .collect();

    let half_beta = Float::with_val(b, &beta / 2u32);
    let mut representation = Vec::new();
    if !big_f.is_empty() {
        for i in (2..g.len()).step_by(2) {
            let t = &g.tables[i];
            let integral = simpson(&integrand[..=i], &g.h)?;
            // (β/2)ΨΨ' = α'/2 = (r_n - r_{n+1})/2
            let boundary = Float::with_val(b, &t.r[n] - &t.r[n + 1]) / 2u32;
            let integrated = Float::with_val(b, &half_beta * &integral) + boundary;
            let direct = Float::with_val(b, &big_f[i] - &big_f[0]);
            let discrepancy = Float::with_val(b, &integrated - &direct);
            representation.push(FreeEnergyPoint { x: g.grid[i].clone(), integrated, direct, discrepancy });
        }
    }
    Ok(FreeEnergyData { n, x: g.grid.clone(), big_f, f, psi, sum_rule, representation })
}

/// Values of D_n far from the jump compared with the Hermite determinant.
#[derive(Debug, Clone)]
pub struct FreeEnergyLimits {
    pub n: usize,
    pub x_far: Float,
    /// D_n at x̃ = -x_far and +x_far, from the oracle.
    pub d_minus: Float,
    pub d_plus: Float,
    /// π^{n/2} ∏_{j<n} j!/2^j
    pub hermite: Float,
    /// 2^{1-n} times the Hermite value.
    pub shifted: Float,
    pub ratio_minus: Float,
    pub ratio_plus: Float,
    pub shifted_ratio_minus: Float,
    pub shifted_ratio_plus: Float,
    /// (1 + β/2)^n and (1 - β/2)^n: the limits of the weight scale factor.
    pub scale_minus: Float,
    pub scale_plus: Float,
}

/// π^{n/2} ∏_{j<n} j!/2^j
pub fn hermite_hankel(n: usize, bits: u32) -> Float {
    let mut v = sqrt_pi(bits).pow(n as u32);
    let mut fact = Float::with_val(bits, 1);
    for j in 0..n {
        if j > 0 {
            fact *= j as u32;
        }
        v *= &fact;
        v >>= j as u32;
    }
    v
}

pub fn free_energy_limits(beta: &Float, n: usize, x_far: &Float, bits: u32) -> Result<FreeEnergyLimits> {
    let spec_minus = WeightSpec::from_floats(beta.clone(), Float::with_val(bits, -x_far))?;
    let spec_plus = spec_minus.with_xjump(Float::with_val(bits, x_far));
    let d_of = |spec: &WeightSpec| -> Result<Float> {
        let t = oracle_table(spec, n, Some(bits))?;
        Ok(t.hankel.expect("oracle tables carry determinants")[n].clone())
    };
    let d_minus = d_of(&spec_minus)?;
    let d_plus = d_of(&spec_plus)?;
    let hermite = hermite_hankel(n, bits);
    let shifted = Float::with_val(bits, &hermite * 2u32) >> n as u32;
    let half = Float::with_val(bits, beta / 2u32);
    let pow = |base: Float| base.pow(n as u32);
    Ok(FreeEnergyLimits {
        n,
        x_far: x_far.clone(),
        ratio_minus: Float::with_val(bits, &d_minus / &hermite),
        ratio_plus: Float::with_val(bits, &d_plus / &hermite),
        shifted_ratio_minus: Float::with_val(bits, &d_minus / &shifted),
        shifted_ratio_plus: Float::with_val(bits, &d_plus / &shifted),
        scale_minus: pow(Float::with_val(bits, 1 + &half)),
        scale_plus: pow(Float::with_val(bits, 1 - &half)),
        d_minus,
        d_plus,
        hermite,
        shifted,
    })
}

/// ∂² ln D̃_n - 4 D̃_{n+1} D̃_{n-1} / D̃_n² with D̃_k = e^{k x̃²} D_k.
pub fn toda_molecule_residual(g: &XGridTables, n: usize) -> Result<ResidualSet> {
    g.require_n(n, 1)?;
    let b = g.bits;
    // ln D̃_k = ln D_k + k x̃²
    let tilde = |k: usize| -> Result<Vec<Float>> {
        let ln_d = g.ln_hankel_column(k)?;
        Ok(ln_d
            .into_iter()
            .zip(&g.grid)
            .map(|(l, x)| l + Float::with_val(b, x.square_ref()) * k as u32)
            .collect())
    };
    let ln_cur = tilde(n)?;
    let ln_prev = tilde(n - 1)?;
    let ln_next = tilde(n + 1)?;
    let d2 = fd_derivative(&ln_cur, Order::Second, &g.h)?;
    let mut set = ResidualSet::new("toda-molecule");
    for i in 1..g.len() - 1 {
        let log_ratio = Float::with_val(b, &ln_next[i] + &ln_prev[i]) - Float::with_val(b, &ln_cur[i] * 2u32);
        let ratio = log_ratio.exp() * 4u32;
        set.push(&g.grid[i], n, Float::with_val(b, &d2[i - 1] - &ratio));
    }
    Ok(set)
}

/// α_n recovered from F_n = -ln D_n by
/// (F' - x̃F'' + F'''/2)/(4n - 2F'') and, equivalently, with f = F - n x̃²,
/// x̃/2 - (f''' + 2f')/(4f'').
#[derive(Debug, Clone, PartialEq)]
pub struct FreeEnergyAlpha {
    pub x: Float,
    pub from_big_f: Float,
    pub from_small_f: Float,
    pub table: Float,
    pub deviation: Float,
}

pub fn alpha_from_free_energy(g: &XGridTables, n: usize, guard: f64) -> Result<Vec<FreeEnergyAlpha>> {
    g.require_n(n, 1)?;
    let b = g.bits;
    let big_f: Vec<Float> = g.ln_hankel_column(n)?.into_iter().map(|v| -v).collect();
    let small_f: Vec<Float> = big_f
        .iter()
        .zip(&g.grid)
        .map(|(fv, x)| Float::with_val(b, fv - Float::with_val(b, x.square_ref()) * n as u32))
        .collect();
    let derivs = |v: &[Float]| -> Result<[Vec<Float>; 3]> {
        Ok([
            fd_derivative(v, Order::First, &g.h)?,
            fd_derivative(v, Order::Second, &g.h)?,
            fd_derivative(v, Order::Third, &g.h)?,
        ])
    };
    let [f1, f2, f3] = derivs(&big_f)?;
    let [s1, s2, s3] = derivs(&small_f)?;
    let m = Order::Third.half_width();
    let mut out = Vec::new();
    for i in m..g.len() - m {
        let x = &g.grid[i];
        let (d1, d2, d3) = (&f1[i - 1], &f2[i - 1], &f3[i - 2]);
        let den = Float::with_val(b, 4 * n as u32) - Float::with_val(b, d2 * 2u32);
        let small_den = Float::with_val(b, &s2[i - 1] * 4u32);
        if Float::with_val(64, den.abs_ref()) < guard || Float::with_val(64, small_den.abs_ref()) < guard {
            return Err(Error::DenominatorGuard { x: x.to_f64() });
        }
        let num = Float::with_val(b, d1 - Float::with_val(b, x * d2)) + Float::with_val(b, d3 / 2u32);
        let from_big_f = num / &den;
        let small_num = Float::with_val(b, &s3[i - 2] + Float::with_val(b, &s1[i - 1] * 2u32));
        let from_small_f = Float::with_val(b, x / 2u32) - small_num / small_den;
        let table = g.tables[i].alpha[n].clone();
        let deviation = Float::with_val(b, &from_big_f - &table);
        out.push(FreeEnergyAlpha { x: x.clone(), from_big_f, from_small_f, table, deviation });
    }
    Ok(out)
}
