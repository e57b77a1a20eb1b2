pub mod asymptote;
pub mod iterate;
pub mod oracle;
pub mod scan;
pub mod taylor;
pub mod verify;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use opjump_core::{Float, WeightSpec};

use crate::args::{Output, Weight};
use crate::error::{CliError, CliResult};
use crate::format::{max_digits, sci};

pub fn check_digits(digits: usize, bits: u32) -> CliResult<()> {
    let max = max_digits(bits);
    if digits == 0 || digits > max {
        return Err(CliError::Usage(format!("--digits must be in 1..={max} at {bits} bits, got {digits}")));
    }
    Ok(())
}

pub fn weight_spec(w: &Weight, bits: u32) -> CliResult<WeightSpec> {
    Ok(WeightSpec::from_floats(w.beta.to_float(bits), w.xjump.to_float(bits))?)
}

pub fn sink(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Writes a header and rows of pre-formatted fields.
pub fn write_csv(out: &Output, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(sink(out.out.as_deref())?);
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: serde::Serialize>(out: Option<&Path>, value: &T) -> CliResult<()> {
    let mut w = sink(out)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

pub fn fields(values: &[&Float], digits: usize) -> Vec<String> {
    values.iter().map(|v| sci(v, digits)).collect()
}

pub fn warn_all(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}
