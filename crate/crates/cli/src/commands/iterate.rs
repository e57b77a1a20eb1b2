use opjump_core::recurrence::iterate;

use super::{check_digits, fields, warn_all, weight_spec, write_csv};
use crate::args::IterateArgs;
use crate::error::{CliError, CliResult};

pub const HEADER: [&str; 5] = ["n", "alpha", "beta_n", "r", "R"];

pub fn run(a: &IterateArgs) -> CliResult<()> {
    check_digits(a.output.digits, a.bits)?;
    let spec = weight_spec(&a.weight, a.bits)?;
    let t = iterate(&spec, a.n, a.bits).map_err(CliError::iteration)?;
    warn_all(&t.warnings);
    let d = a.output.digits;
    let rows = (0..=t.n_max).map(|n| {
        let mut row = vec![n.to_string()];
        row.extend(fields(&[&t.alpha[n], &t.beta_n[n], &t.r[n], &t.big_r[n]], d));
        row
    });
    write_csv(&a.output, &HEADER, rows)
}
