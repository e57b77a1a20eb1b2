use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use opjump_core::asymptotics::b_const_float;
use opjump_core::recurrence::iterate;
use opjump_core::{Float, WeightSpec};
use rayon::prelude::*;
use serde_json::json;

use super::{check_digits, write_csv};
use crate::args::{Figure, ScanArgs};
use crate::error::{CliError, CliResult};
use crate::format::sci;

pub const HEADER: [&str; 5] = ["xjump", "n", "alpha", "alpha_rescaled", "r"];

#[derive(Debug, Clone)]
pub struct ScanRow {
    pub xjump: Float,
    pub n: usize,
    /// (α_n, rescaled α_n, r_n); `None` where the iteration broke down.
    pub values: Option<(Float, Option<Float>, Float)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanWarning {
    pub xjump: Float,
    pub message: String,
}

/// x_k = (xmin (steps-1-k) + xmax k) / (steps-1)
pub fn grid(xmin: &Float, xmax: &Float, steps: usize, bits: u32) -> Vec<Float> {
    let last = (steps - 1) as u32;
    (0..steps as u32)
        .map(|k| {
            let left = Float::with_val(bits, xmin * (last - k));
            let right = Float::with_val(bits, xmax * k);
            (left + right) / last
        })
        .collect()
}

/// Iterates once per grid point up to max(ns); rows come out sorted by (x̃, n).
pub fn scan(
    beta: &Float,
    xs: &[Float],
    ns: &[usize],
    fig: Figure,
    bits: u32,
) -> CliResult<(Vec<ScanRow>, Vec<ScanWarning>)> {
    let mut ns = ns.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let n_max = *ns.last().ok_or_else(|| CliError::Usage("--n needs at least one index".into()))?;
    let b = b_const_float(beta, bits)?;
    let template = WeightSpec::from_floats(beta.clone(), Float::new(bits))?;
    let per_point: Vec<(Vec<ScanRow>, Vec<ScanWarning>)> = xs
        .par_iter()
        .map(|x| {
            let spec = template.with_xjump(x.clone());
            match iterate(&spec, n_max.max(1), bits) {
                Ok(t) => {
                    let rows = ns
                        .iter()
                        .map(|&n| {
                            let rescaled = (!b.is_zero()).then(|| {
                                let base = Float::with_val(bits, &t.alpha[n] / &b);
                                match fig {
                                    Figure::Two => base,
                                    Figure::One => base * Float::with_val(bits, n as f64 / 2.0).sqrt(),
                                }
                            });
                            ScanRow { xjump: x.clone(), n, values: Some((t.alpha[n].clone(), rescaled, t.r[n].clone())) }
                        })
                        .collect();
                    let warnings =
                        t.warnings.into_iter().map(|message| ScanWarning { xjump: x.clone(), message }).collect();
                    (rows, warnings)
                }
                Err(e) => {
                    let rows = ns.iter().map(|&n| ScanRow { xjump: x.clone(), n, values: None }).collect();
                    (rows, vec![ScanWarning { xjump: x.clone(), message: e.to_string() }])
                }
            }
        })
        .collect();
    let mut rows = Vec::with_capacity(xs.len() * ns.len());
    let mut warnings = Vec::new();
    for (r, w) in per_point {
        rows.extend(r);
        warnings.extend(w);
    }
    Ok((rows, warnings))
}

pub fn warnings_path(out: &std::path::Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".warnings.jsonl");
    PathBuf::from(s)
}

pub fn run(a: &ScanArgs) -> CliResult<()> {
    let bits = a.bits;
    check_digits(a.output.digits, bits)?;
    if a.steps < 2 {
        return Err(CliError::Usage("--steps must be at least 2".into()));
    }
    let xmin = a.xmin.to_float(bits);
    let xmax = a.xmax.to_float(bits);
    if xmin >= xmax {
        return Err(CliError::Usage("--xmin must be below --xmax".into()));
    }
    let xs = grid(&xmin, &xmax, a.steps, bits);
    let (rows, warnings) = scan(&a.beta.to_float(bits), &xs, &a.n, a.fig, bits)?;
    let d = a.output.digits;
    let lines = rows.iter().map(|row| {
        let mut f = vec![sci(&row.xjump, d), row.n.to_string()];
        match &row.values {
            Some((alpha, rescaled, r)) => {
                f.push(sci(alpha, d));
                f.push(rescaled.as_ref().map(|v| sci(v, d)).unwrap_or_default());
                f.push(sci(r, d));
            }
            None => f.extend([String::new(), String::new(), String::new()]),
        }
        f
    });
    write_csv(&a.output, &HEADER, lines)?;

    let encode = |w: &ScanWarning| json!({ "xjump": sci(&w.xjump, d), "message": w.message }).to_string();
    match &a.output.out {
        Some(out) => {
            let mut f = BufWriter::new(File::create(warnings_path(out))?);
            for w in &warnings {
                writeln!(f, "{}", encode(w))?;
            }
            f.flush()?;
        }
        None => {
            for w in &warnings {
                eprintln!("{}", encode(w));
            }
        }
    }
    Ok(())
}
