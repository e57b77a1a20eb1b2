use opjump_core::asymptotics::b_const_float;
use opjump_core::evolution::{taylor_from_table, TaylorOrder};
use opjump_core::recurrence::iterate;
use opjump_core::Float;

use super::{check_digits, fields, weight_spec, write_csv};
use crate::args::TaylorArgs;
use crate::error::{CliError, CliResult};

pub const HEADER: [&str; 7] =
    ["n", "alpha", "alpha_rescaled", "taylor2", "taylor2_rescaled", "taylor3", "taylor3_rescaled"];

pub fn run(a: &TaylorArgs) -> CliResult<()> {
    let bits = a.bits;
    check_digits(a.output.digits, bits)?;
    let spec = weight_spec(&a.weight, bits)?;
    let b = b_const_float(spec.beta(), bits)?;
    if b.is_zero() {
        return Err(CliError::Usage("taylor needs beta != 0".into()));
    }
    let direct = iterate(&spec, a.n, bits).map_err(CliError::iteration)?;
    let origin = iterate(&spec.with_xjump(Float::new(bits)), a.n + 1, bits).map_err(CliError::iteration)?;
    let x = spec.xjump();
    let d = a.output.digits;
    let rows = (1..=a.n)
        .map(|n| {
            let t2 = taylor_from_table(&origin, n, TaylorOrder::Two, x)?;
            let t3 = taylor_from_table(&origin, n, TaylorOrder::Three, x)?;
            let scale = Float::with_val(bits, n as f64 / 2.0).sqrt() / &b;
            let rs = |v: &Float| Float::with_val(bits, v * &scale);
            let alpha = &direct.alpha[n];
            let mut row = vec![n.to_string()];
            row.extend(fields(&[alpha, &rs(alpha), &t2, &rs(&t2), &t3, &rs(&t3)], d));
            Ok(row)
        })
        .collect::<CliResult<Vec<_>>>()?;
    write_csv(&a.output, &HEADER, rows)
}
