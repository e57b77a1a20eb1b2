use crate::{Error, Result};

/// Working precisions and finite-difference step shared across a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecisionConfig {
    /// Significand bits for the iteration path and derived quantities.
    pub bits: u32,
    /// Significand bits for the moment-based oracle.
    pub oracle_bits: u32,
    /// Step used for x̃-derivatives.
    pub fd_step: f64,
}

pub const DEFAULT_BITS: u32 = 256;
pub const DEFAULT_ORACLE_BITS: u32 = 512;
pub const DEFAULT_FD_STEP: f64 = 1e-3;

impl Default for PrecisionConfig {
    fn default() -> Self {
        PrecisionConfig {
            bits: DEFAULT_BITS,
            oracle_bits: DEFAULT_ORACLE_BITS,
            fd_step: DEFAULT_FD_STEP,
        }
    }
}

impl PrecisionConfig {
    pub fn new(bits: u32, oracle_bits: u32, fd_step: f64) -> Result<Self> {
        let cfg = PrecisionConfig { bits, oracle_bits, fd_step };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.bits < 64 {
            return Err(Error::InvalidPrecision(format!("bits = {} < 64", self.bits)));
        }
        if self.oracle_bits < self.bits {
            return Err(Error::InvalidPrecision(format!(
                "oracle_bits = {} < bits = {}",
                self.oracle_bits, self.bits
            )));
        }
        if !(self.fd_step > 0.0 && self.fd_step.is_finite()) {
            return Err(Error::InvalidPrecision(format!("fd_step = {}", self.fd_step)));
        }
        Ok(())
    }

    /// Number of decimal significant digits the working precision supports.
    pub fn decimal_digits(&self) -> usize {
        decimal_digits(self.bits)
    }
}

/// floor((bits - 1) · log10 2): decimal strings of this many digits survive a
/// round trip through a `bits`-bit float unchanged.
pub fn decimal_digits(bits: u32) -> usize {
    (f64::from(bits.saturating_sub(1)) * std::f64::consts::LOG10_2).floor() as usize
}

/// Oracle precision policy: max(512, 16·N).
pub fn default_oracle_bits(n_max: usize) -> u32 {
    DEFAULT_ORACLE_BITS.max(16 * n_max as u32)
}
