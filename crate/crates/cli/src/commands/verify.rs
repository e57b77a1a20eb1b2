use opjump_core::precision::default_oracle_bits;

use super::{check_digits, write_json};
use crate::args::VerifyArgs;
use crate::error::{CliError, CliResult};
use crate::verify::{expand, run_suite, Settings};

pub fn run(a: &VerifyArgs) -> CliResult<()> {
    let oracle_bits = a.oracle_bits.unwrap_or_else(|| default_oracle_bits(a.n + 1));
    check_digits(a.output.digits, a.bits)?;
    if oracle_bits < a.bits {
        return Err(CliError::Usage(format!("--oracle-bits {oracle_bits} below --bits {}", a.bits)));
    }
    if !(a.fd_step > 0.0 && a.fd_step.is_finite()) {
        return Err(CliError::Usage(format!("--fd-step must be positive, got {}", a.fd_step)));
    }
    let settings = Settings {
        beta: a.weight.beta.clone(),
        xjump: a.weight.xjump.clone(),
        n: a.n,
        bits: a.bits,
        oracle_bits,
        fd_step: a.fd_step,
        fit_max: a.fit_max,
        check_max: a.check_max,
        digits: a.output.digits,
    };
    let mut reports = Vec::new();
    for suite in expand(&a.suite) {
        reports.extend(run_suite(suite, &settings)?);
    }
    write_json(a.output.out.as_deref(), &reports)?;
    let failed: Vec<String> = reports
        .iter()
        .filter(|r| !r.pass)
        .map(|r| match r.params.get("identity") {
            Some(id) => format!("{}({})", r.suite, id.as_str().unwrap_or_default()),
            None => r.suite.to_string(),
        })
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verify(failed.join(", ")))
    }
}
