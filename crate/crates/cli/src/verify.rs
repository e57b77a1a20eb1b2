//! Verification suites behind `opjump verify`.

use std::f64::consts::TAU;

use opjump_core::asymptotics::{b_const_float, fit_phase, order_check, AsymptoteParams};
use opjump_core::evolution::{
    free_energy, free_energy_limits, hankel_identity, hankel_logderivs, painleve_residual,
    toda_residuals, ResidualSet, XGridTables, PAINLEVE_GUARD,
};
use opjump_core::fd::ConvergenceOrder;
use opjump_core::oracle::oracle_table;
use opjump_core::precision::default_oracle_bits;
use opjump_core::special::sqrt_pi;
use opjump_core::recurrence::{compatibility_residuals, iterate, universal_residuals, POLE_GUARD};
use opjump_core::{Float, Source, WeightSpec};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::args::Suite;
use crate::error::{CliError, CliResult};
use crate::format::{sci, Decimal};

pub const UNIVERSAL_TOL: f64 = 1e-25;
pub const COMPAT_TOL: f64 = 1e-22;
pub const HANKEL_IDENTITY_TOL: f64 = 1e-20;
pub const ORDER_WINDOW: (f64, f64) = (1.8, 2.2);
pub const PHASE_TOL: f64 = 1e-2;
pub const COMPAT_POINTS: [f64; 5] = [-2.0, -1.0, 1.0, 2.0, 3.0];
/// Grid step for the free-energy quadrature.
pub const QUAD_STEP: f64 = 1e-2;
/// Half-width of the free-energy quadrature range.
pub const QUAD_EDGE: f64 = 8.0;

#[derive(Debug, Clone)]
pub struct Settings {
    pub beta: Decimal,
    pub xjump: Decimal,
    pub n: usize,
    pub bits: u32,
    pub oracle_bits: u32,
    pub fd_step: f64,
    pub fit_max: usize,
    pub check_max: usize,
    pub digits: usize,
}

impl Settings {
    pub fn new(beta: Decimal, xjump: Decimal, n: usize) -> Self {
        Settings {
            beta,
            xjump,
            n,
            bits: 256,
            oracle_bits: default_oracle_bits(n),
            fd_step: 1e-3,
            fit_max: 10_000,
            check_max: 1_000_000,
            digits: 30,
        }
    }

    fn spec(&self, bits: u32) -> CliResult<WeightSpec> {
        Ok(WeightSpec::from_floats(self.beta.to_float(bits), self.xjump.to_float(bits))?)
    }

    fn base_params(&self) -> Map<String, Value> {
        let mut m = Map::new();
        m.insert("beta".into(), json!(self.beta.as_str()));
        m.insert("xjump".into(), json!(self.xjump.as_str()));
        m.insert("n".into(), json!(self.n));
        m
    }

    /// Steps for convergence measurements, finest last.
    fn steps(&self, ratios: &[f64]) -> Vec<f64> {
        ratios.iter().map(|r| r * self.fd_step).collect()
    }

    fn grid(&self, h: f64, n_max: usize) -> CliResult<XGridTables> {
        let b = self.oracle_bits;
        XGridTables::centered(
            &self.beta.to_float(b),
            &self.xjump.to_float(b),
            &Float::with_val(b, h),
            1,
            n_max,
            Source::Oracle,
            b,
        )
        .map_err(CliError::oracle)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub params: Map<String, Value>,
    pub residual_max: f64,
    pub residual_location: Value,
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convergence_order: Option<f64>,
    pub pass: bool,
}

pub fn expand(suites: &[Suite]) -> Vec<Suite> {
    let mut out: Vec<Suite> = if suites.contains(&Suite::All) {
        vec![
            Suite::Universal,
            Suite::Compat,
            Suite::Toda,
            Suite::Painleve,
            Suite::Hankel,
            Suite::Freenergy,
            Suite::Asymptote,
        ]
    } else {
        suites.to_vec()
    };
    out.sort();
    out.dedup();
    out
}

pub fn run_suite(suite: Suite, s: &Settings) -> CliResult<Vec<SuiteReport>> {
    match suite {
        Suite::Universal => universal(s).map(|r| vec![r]),
        Suite::Compat => compat(s).map(|r| vec![r]),
        Suite::Toda => toda(s),
        Suite::Painleve => painleve(s).map(|r| vec![r]),
        Suite::Hankel => hankel(s),
        Suite::Freenergy => freenergy(s).map(|r| vec![r]),
        Suite::Asymptote => asymptote(s).map(|r| vec![r]),
        Suite::All => unreachable!("expanded before dispatch"),
    }
}

fn max_abs(values: &[Float]) -> (f64, usize) {
    values
        .iter()
        .enumerate()
        .map(|(i, v)| (v.to_f64().abs(), i))
        .fold((0.0, 0), |best, cur| if cur.0 > best.0 { cur } else { best })
}

fn set_max(set: &ResidualSet) -> (f64, Value) {
    match set.max_abs() {
        Some(p) => (p.value.to_f64().abs(), json!({ "xjump": p.x.to_f64(), "n": p.n })),
        None => (0.0, Value::Null),
    }
}

pub fn universal(s: &Settings) -> CliResult<SuiteReport> {
    let t = oracle_table(&s.spec(s.oracle_bits)?, s.n, Some(s.oracle_bits)).map_err(CliError::oracle)?;
    let (u1, u2) = universal_residuals(&t);
    let (m1, i1) = max_abs(&u1);
    let (m2, i2) = max_abs(&u2);
    let mut params = s.base_params();
    params.insert("oracle_bits".into(), json!(t.bits));
    params.insert("u1_max".into(), json!(m1));
    params.insert("u2_max".into(), json!(m2));
    let (residual_max, location) =
        if m1 >= m2 { (m1, json!({ "n": i1, "identity": "U1" })) } else { (m2, json!({ "n": i2, "identity": "U2" })) };
    Ok(SuiteReport {
        suite: "universal",
        params,
        residual_max,
        residual_location: location,
        tolerance: Some(UNIVERSAL_TOL),
        convergence_order: None,
        pass: residual_max <= UNIVERSAL_TOL,
    })
}

pub fn compat(s: &Settings) -> CliResult<SuiteReport> {
    let b = s.oracle_bits;
    let t = oracle_table(&s.spec(b)?, s.n + 1, Some(b)).map_err(CliError::oracle)?;
    let mut worst = (0.0, Value::Null);
    let mut skipped = Vec::new();
    for n in 1..=s.n {
        let mut zs = Vec::new();
        for z in COMPAT_POINTS {
            let zf = Float::with_val(b, z);
            let near = |p: &Float| Float::with_val(b, &zf - p).abs() < POLE_GUARD;
            if near(t.xjump()) || near(&t.alpha[n]) {
                skipped.push(json!({ "n": n, "z": z }));
            } else {
                zs.push(zf);
            }
        }
        let (s1, s2) = compatibility_residuals(&t, n, &zs, POLE_GUARD)?;
        for (which, vals) in [("S1", &s1), ("S2", &s2)] {
            let (m, i) = max_abs(vals);
            if m > worst.0 || worst.1.is_null() {
                worst = (m, json!({ "n": n, "z": zs[i].to_f64(), "identity": which }));
            }
        }
    }
    let mut params = s.base_params();
    params.insert("oracle_bits".into(), json!(t.bits));
    params.insert("z".into(), json!(COMPAT_POINTS));
    params.insert("skipped".into(), Value::Array(skipped));
    Ok(SuiteReport {
        suite: "compat",
        params,
        residual_max: worst.0,
        residual_location: worst.1,
        tolerance: Some(COMPAT_TOL),
        convergence_order: None,
        pass: worst.0 <= COMPAT_TOL,
    })
}

/// Convergence report for residual maxima measured at `steps` (finest last).
fn order_report(
    suite: &'static str,
    mut params: Map<String, Value>,
    steps: &[f64],
    finest: (f64, Value),
    errors: &[f64],
    floor: f64,
) -> SuiteReport {
    params.insert("steps".into(), json!(steps));
    params.insert("errors".into(), json!(errors));
    params.insert("order_window".into(), json!([ORDER_WINDOW.0, ORDER_WINDOW.1]));
    let (order, pass) = if errors.iter().all(|e| *e <= floor) {
        params.insert("note".into(), json!("residuals at the precision floor; no order measurable"));
        (None, true)
    } else {
        match ConvergenceOrder::measure(steps, errors) {
            Ok(c) => {
                params.insert("pairwise_orders".into(), json!(c.pairwise));
                let ok = c.within(ORDER_WINDOW.0, ORDER_WINDOW.1);
                (Some(c.fitted), ok)
            }
            Err(e) => {
                params.insert("note".into(), json!(e.to_string()));
                (None, false)
            }
        }
    };
    SuiteReport {
        suite,
        params,
        residual_max: finest.0,
        residual_location: finest.1,
        tolerance: None,
        convergence_order: order,
        pass,
    }
}

fn precision_floor(bits: u32) -> f64 {
    2f64.powi(-(bits as i32) / 2)
}

pub fn toda(s: &Settings) -> CliResult<Vec<SuiteReport>> {
    let steps = s.steps(&[10.0, 5.0, 1.0]);
    let mut errs = [Vec::new(), Vec::new(), Vec::new()];
    let mut finest = Vec::new();
    for &h in &steps {
        let report = toda_residuals(&s.grid(h, s.n)?)?;
        finest.clear();
        for (k, set) in [&report.norm, &report.first, &report.second].into_iter().enumerate() {
            let m = set_max(set);
            errs[k].push(m.0);
            finest.push(m);
        }
    }
    Ok(["norm", "first", "second"]
        .into_iter()
        .enumerate()
        .map(|(k, name)| {
            let mut params = s.base_params();
            params.insert("identity".into(), json!(name));
            params.insert("oracle_bits".into(), json!(s.oracle_bits));
            order_report("toda", params, &steps, finest[k].clone(), &errs[k], precision_floor(s.oracle_bits))
        })
        .collect())
}

/// Evaluation offsets around x̃ for the Painlevé suite.
pub fn painleve_points(center: f64) -> Vec<f64> {
    (-4..=4).map(|k| center + f64::from(k) * 0.25).collect()
}

/// Max Painlevé residual over the evaluation points at one step, plus masked count.
pub fn painleve_max(
    beta: &Float,
    points: &[f64],
    n: usize,
    h: f64,
    bits: u32,
) -> CliResult<((f64, Value), usize)> {
    let mut worst = (0.0, Value::Null);
    let mut masked = 0;
    for &x in points {
        let g = XGridTables::centered(
            beta,
            &Float::with_val(bits, x),
            &Float::with_val(bits, h),
            1,
            n,
            Source::Oracle,
            bits,
        )
        .map_err(CliError::oracle)?;
        let set = painleve_residual(&g, n, PAINLEVE_GUARD)?;
        masked += set.masked.len();
        let m = set_max(&set);
        if m.0 > worst.0 {
            worst = (m.0, json!({ "xjump": x, "n": n }));
        }
    }
    Ok((worst, masked))
}

pub fn painleve(s: &Settings) -> CliResult<SuiteReport> {
    let steps = s.steps(&[4.0, 2.0, 1.0]);
    let points = painleve_points(s.xjump.to_f64());
    let beta = s.beta.to_float(s.oracle_bits);
    let mut errs = Vec::new();
    let mut finest = (0.0, Value::Null);
    let mut masked = 0;
    for &h in &steps {
        let (m, k) = painleve_max(&beta, &points, s.n.max(1), h, s.oracle_bits)?;
        errs.push(m.0);
        finest = m;
        masked = k;
    }
    let mut params = s.base_params();
    params.insert("points".into(), json!(points));
    params.insert("masked".into(), json!(masked));
    params.insert("oracle_bits".into(), json!(s.oracle_bits));
    Ok(order_report("painleve", params, &steps, finest, &errs, precision_floor(s.oracle_bits)))
}

pub fn hankel(s: &Settings) -> CliResult<Vec<SuiteReport>> {
    let t = iterate(&s.spec(s.bits)?, s.n.max(1), s.bits).map_err(CliError::iteration)?;
    let (identity_max, location) = set_max(&hankel_identity(&t));
    let mut params = s.base_params();
    params.insert("bits".into(), json!(s.bits));
    let mut out = vec![SuiteReport {
        suite: "hankel",
        params: {
            let mut p = params.clone();
            p.insert("identity".into(), json!("sum"));
            p
        },
        residual_max: identity_max,
        residual_location: location,
        tolerance: Some(HANKEL_IDENTITY_TOL),
        convergence_order: None,
        pass: identity_max <= HANKEL_IDENTITY_TOL,
    }];

    let steps = s.steps(&[10.0, 5.0, 1.0]);
    let n = s.n.max(1);
    let mut errs = [Vec::new(), Vec::new()];
    let mut finest = Vec::new();
    for &h in &steps {
        let r = hankel_logderivs(&s.grid(h, n)?, n)?;
        finest = vec![set_max(&r.first), set_max(&r.second)];
        errs[0].push(finest[0].0);
        errs[1].push(finest[1].0);
    }
    for (k, name) in ["first-derivative", "second-derivative"].into_iter().enumerate() {
        let mut p = s.base_params();
        p.insert("identity".into(), json!(name));
        p.insert("oracle_bits".into(), json!(s.oracle_bits));
        out.push(order_report("hankel", p, &steps, finest[k].clone(), &errs[k], precision_floor(s.oracle_bits)));
    }
    Ok(out)
}

/// Uniform grid from `a` to `b` with an even number of intervals of size close to `h`.
fn simpson_grid(a: &Float, b: &Float, h: f64) -> (Float, usize) {
    let width = Float::with_val(a.prec(), b - a);
    let mut intervals = (width.to_f64() / h).round().max(2.0) as usize;
    if intervals % 2 == 1 {
        intervals += 1;
    }
    (width / intervals as u32, intervals + 1)
}

/// Free-energy findings: sum rule against its candidates, the F-representation
/// at x̃, and the far-field limits of D_n.
pub fn freenergy(s: &Settings) -> CliResult<SuiteReport> {
    let digits = s.digits.max(25);
    let n = s.n.max(1);
    let bits = s.bits;
    let ob = s.oracle_bits;
    let beta = s.beta.to_float(ob);
    if beta.is_zero() {
        return Err(CliError::Usage("freenergy suite needs beta != 0".into()));
    }
    let fmt = |x: &Float| sci(x, digits);
    let mut params = s.base_params();

    let edge = Float::with_val(bits, QUAD_EDGE);
    let (h, count) = simpson_grid(&Float::with_val(bits, -&edge), &edge, QUAD_STEP);
    let g = XGridTables::build(
        &s.beta.to_float(bits),
        &Float::with_val(bits, -&edge),
        &h,
        count,
        n,
        Source::Iteration,
        bits,
    )
    .map_err(CliError::iteration)?;
    let sum_rule = free_energy(&g, n)?.sum_rule;
    let b = b_const_float(&beta, ob)?;
    let pi = sqrt_pi(ob).square();
    let two_pi_n_b = Float::with_val(ob, &pi * &b) * (2 * n as u32);
    let four_pi_n_b_over_beta = Float::with_val(ob, &two_pi_n_b * 2u32) / &beta;
    params.insert("quadrature".into(), json!({ "from": -QUAD_EDGE, "to": QUAD_EDGE, "step": h.to_f64(), "bits": bits }));
    params.insert("sum_rule".into(), json!(fmt(&sum_rule)));
    params.insert(
        "sum_rule_candidates".into(),
        json!({
            "zero": fmt(&Float::new(ob)),
            "two_pi_n_b": fmt(&two_pi_n_b),
            "four_pi_n_b_over_beta": fmt(&four_pi_n_b_over_beta),
        }),
    );
    let gap = |c: &Float| fmt(&Float::with_val(ob, &sum_rule - c));
    params.insert(
        "sum_rule_minus_candidate".into(),
        json!({
            "zero": fmt(&sum_rule),
            "two_pi_n_b": gap(&two_pi_n_b),
            "four_pi_n_b_over_beta": gap(&four_pi_n_b_over_beta),
        }),
    );

    let x = s.xjump.to_float(ob);
    let mut residual = (0.0, Value::Null);
    if x.to_f64() > -QUAD_EDGE + 2.0 * QUAD_STEP {
        let start = Float::with_val(ob, -QUAD_EDGE);
        let (h, count) = simpson_grid(&start, &x, QUAD_STEP);
        let g = XGridTables::build(
            &beta,
            &start,
            &h,
            count,
            n,
            Source::Oracle,
            ob,
        )
        .map_err(CliError::oracle)?;
        let fe = free_energy(&g, n)?;
        let last = fe.representation.last().expect("at least one even offset");
        params.insert(
            "representation".into(),
            json!({
                "xjump": last.x.to_f64(),
                "integrated": fmt(&last.integrated),
                "minus_ln_d_difference": fmt(&last.direct),
                "discrepancy": fmt(&last.discrepancy),
                "step": h.to_f64(),
            }),
        );
        residual = (last.discrepancy.to_f64().abs(), json!({ "xjump": last.x.to_f64(), "n": n }));
    }

    let l = free_energy_limits(&beta, n, &Float::with_val(ob, QUAD_EDGE), ob).map_err(CliError::oracle)?;
    params.insert(
        "limits".into(),
        json!({
            "x_far": QUAD_EDGE,
            "d_minus": fmt(&l.d_minus),
            "d_plus": fmt(&l.d_plus),
            "hermite": fmt(&l.hermite),
            "ratio_minus": fmt(&l.ratio_minus),
            "ratio_plus": fmt(&l.ratio_plus),
            "shifted_ratio_minus": fmt(&l.shifted_ratio_minus),
            "shifted_ratio_plus": fmt(&l.shifted_ratio_plus),
            "scale_minus": fmt(&l.scale_minus),
            "scale_plus": fmt(&l.scale_plus),
        }),
    );
    params.insert("digits".into(), json!(digits));
    Ok(SuiteReport {
        suite: "freenergy",
        params,
        residual_max: residual.0,
        residual_location: residual.1,
        tolerance: None,
        convergence_order: None,
        pass: true,
    })
}

/// Distance between two phases on the circle.
pub fn phase_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

pub fn asymptote(s: &Settings) -> CliResult<SuiteReport> {
    let bits = s.bits;
    let beta = s.beta.to_float(bits);
    let mut params = Map::new();
    params.insert("beta".into(), json!(s.beta.as_str()));
    params.insert("xjump".into(), json!("0"));
    let b = b_const_float(&beta, bits)?;
    if b.is_zero() {
        params.insert("note".into(), json!("b = 0: asymptotes vanish identically, no phase to fit"));
        return Ok(SuiteReport {
            suite: "asymptote",
            params,
            residual_max: 0.0,
            residual_location: Value::Null,
            tolerance: Some(PHASE_TOL),
            convergence_order: None,
            pass: true,
        });
    }
    if s.fit_max < 100 {
        return Err(CliError::Usage("--fit-max must be at least 100".into()));
    }
    let spec = WeightSpec::from_floats(beta.clone(), Float::new(bits))?;
    let t = iterate(&spec, s.fit_max, bits).map_err(CliError::iteration)?;
    let (lo, mid, hi) = (s.fit_max / 10, 3 * s.fit_max / 10, s.fit_max);
    let first = fit_phase(&t, lo, mid)?;
    let second = fit_phase(&t, mid, hi)?;
    let full = fit_phase(&t, lo, hi)?;
    let drift = phase_distance(first.phase, second.phase);
    let p = AsymptoteParams::new(beta.to_f64(), full.phase)?;
    let oc = order_check(&p, s.check_max, 128)?;
    params.insert("b".into(), json!(p.b));
    params.insert("phase".into(), json!(full.phase));
    params.insert("phase_windows".into(), json!([[lo, mid, first.phase], [mid, hi, second.phase]]));
    params.insert("phase_drift".into(), json!(drift));
    params.insert("fit_amplitude".into(), json!(full.amplitude));
    params.insert("fit_rms".into(), json!(full.rms));
    params.insert("check_max".into(), json!(s.check_max));
    params.insert("sup_n2_first".into(), json!(oc.sup_first));
    params.insert("sup_n2_second".into(), json!(oc.sup_second));
    let (sqrt_alpha, abs_r) = bounded_maxima(&t);
    params.insert("max_sqrt_n_alpha".into(), json!(sqrt_alpha));
    params.insert("max_abs_r".into(), json!(abs_r));
    let finite = oc.sup_first.is_finite() && oc.sup_second.is_finite();
    Ok(SuiteReport {
        suite: "asymptote",
        params,
        residual_max: drift,
        residual_location: json!({ "windows": [[lo, mid], [mid, hi]] }),
        tolerance: Some(PHASE_TOL),
        convergence_order: None,
        pass: finite && drift <= PHASE_TOL,
    })
}

/// max √n |α_n| and max |r_n| over the table.
pub fn bounded_maxima(t: &opjump_core::CoeffTable) -> (f64, f64) {
    let mut a = 0.0f64;
    let mut r = 0.0f64;
    for n in 0..=t.n_max {
        a = a.max((n as f64).sqrt() * t.alpha[n].to_f64().abs());
        r = r.max(t.r[n].to_f64().abs());
    }
    (a, r)
}
