use opjump_core::oracle::oracle_table;
use opjump_core::precision::default_oracle_bits;

use super::{check_digits, fields, weight_spec, write_csv};
use crate::args::OracleArgs;
use crate::error::{CliError, CliResult};

pub const HEADER: [&str; 7] = ["n", "alpha", "beta_n", "r", "R", "h", "D"];

pub fn run(a: &OracleArgs) -> CliResult<()> {
    let bits = a.oracle_bits.unwrap_or_else(|| default_oracle_bits(a.n));
    check_digits(a.output.digits, bits)?;
    let spec = weight_spec(&a.weight, bits)?;
    let t = oracle_table(&spec, a.n, Some(bits)).map_err(CliError::oracle)?;
    let h = t.h.as_ref().expect("oracle tables carry norms");
    let dets = t.hankel.as_ref().expect("oracle tables carry determinants");
    let d = a.output.digits;
    let rows = (0..=t.n_max).map(|n| {
        let mut row = vec![n.to_string()];
        row.extend(fields(&[&t.alpha[n], &t.beta_n[n], &t.r[n], &t.big_r[n], &h[n], &dets[n]], d));
        row
    });
    write_csv(&a.output, &HEADER, rows)
}
