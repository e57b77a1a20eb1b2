use opjump_core::asymptotics::{asymptote, b_const_float, fit_phase, order_check, AsymptoteParams};
use opjump_core::recurrence::iterate;
use opjump_core::{Float, WeightSpec};
use serde::Serialize;

use super::{check_digits, fields, write_csv, write_json};
use crate::args::{AsymptoteArgs, Output};
use crate::error::{CliError, CliResult};
use crate::verify::bounded_maxima;

pub const HEADER: [&str; 7] =
    ["n", "alpha", "alpha_asymptote", "r", "r_asymptote", "alpha_rescaled", "alpha_asymptote_rescaled"];

#[derive(Debug, Serialize)]
pub struct Window {
    pub lo: usize,
    pub hi: usize,
    pub phase: f64,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub beta: String,
    pub b: f64,
    pub phase: f64,
    pub fit: Window,
    pub fit_amplitude: f64,
    pub fit_rms: f64,
    pub windows: Vec<Window>,
    pub check_max: usize,
    pub sup_n2_first: f64,
    pub sup_n2_second: f64,
    pub max_sqrt_n_alpha: f64,
    pub max_abs_r: f64,
}

pub fn run(a: &AsymptoteArgs) -> CliResult<()> {
    let bits = a.bits;
    check_digits(a.output.digits, bits)?;
    if a.fit_min < 1 || 3 * a.fit_min > a.n {
        return Err(CliError::Usage("need 1 <= 3 * --fit-min <= --n".into()));
    }
    let beta = a.beta.to_float(bits);
    let spec = WeightSpec::from_floats(beta.clone(), Float::new(bits))?;
    let t = iterate(&spec, a.n, bits).map_err(CliError::iteration)?;
    let full = fit_phase(&t, a.fit_min, a.n)?;
    let mid = 3 * a.fit_min;
    let windows = [(a.fit_min, mid), (mid, a.n)]
        .into_iter()
        .map(|(lo, hi)| Ok(Window { lo, hi, phase: fit_phase(&t, lo, hi)?.phase }))
        .collect::<CliResult<Vec<_>>>()?;
    let params = AsymptoteParams::new(beta.to_f64(), full.phase)?;
    let oc = order_check(&params, a.check_max, 128)?;
    let (max_sqrt_n_alpha, max_abs_r) = bounded_maxima(&t);
    let report = Report {
        beta: a.beta.to_string(),
        b: params.b,
        phase: full.phase,
        fit: Window { lo: full.lo, hi: full.hi, phase: full.phase },
        fit_amplitude: full.amplitude,
        fit_rms: full.rms,
        windows,
        check_max: a.check_max,
        sup_n2_first: oc.sup_first,
        sup_n2_second: oc.sup_second,
        max_sqrt_n_alpha,
        max_abs_r,
    };
    write_json(a.output.out.as_deref(), &report)?;

    if let Some(path) = &a.csv {
        let b = b_const_float(&beta, bits)?;
        let d = a.output.digits;
        let rows = (1..=t.n_max)
            .map(|n| {
                let (aa, ra) = asymptote(n, &params, bits)?;
                let scale = Float::with_val(bits, n as f64 / 2.0).sqrt() / &b;
                let rescaled = Float::with_val(bits, &t.alpha[n] * &scale);
                let rescaled_a = Float::with_val(bits, &aa * &scale);
                let mut row = vec![n.to_string()];
                row.extend(fields(&[&t.alpha[n], &aa, &t.r[n], &ra, &rescaled, &rescaled_a], d));
                Ok(row)
            })
            .collect::<CliResult<Vec<_>>>()?;
        write_csv(&Output { digits: d, out: Some(path.clone()) }, &HEADER, rows)?;
    }
    Ok(())
}
