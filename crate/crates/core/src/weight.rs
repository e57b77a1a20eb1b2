//! The Hermite weight e^{-x²} multiplied by a single step of height β at x̃.

use rug::Float;

use crate::{Error, Result};

/// Smooth reference weight. Only the Hermite weight e^{-x²} (potential x²) is supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Reference {
    #[default]
    Hermite,
}

/// One discontinuity of a canonical jump function.
#[derive(Debug, Clone, PartialEq)]
pub struct Jump {
    pub delta: Float,
    pub location: Float,
}

/// `baseline + Σ_j delta_j · θ(x - location_j)`.
///
/// The canonical form has baseline 1; the one-jump weight corresponds to a
/// single jump `delta = β` over baseline `1 - β/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpFunction {
    pub baseline: Float,
    pub jumps: Vec<Jump>,
}

impl JumpFunction {
    /// Evaluates the step function, using the right limit at a jump.
    pub fn eval(&self, x: &Float) -> Float {
        let prec = self.baseline.prec();
        let mut value = self.baseline.clone();
        for jump in &self.jumps {
            if *x >= jump.location {
                value += &jump.delta;
            }
        }
        Float::with_val(prec, value)
    }
}

/// Jump height β and location x̃ of `w(x) = e^{-x²}(1 - β/2 + β θ(x - x̃))`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSpec {
    beta: Float,
    xjump: Float,
    reference: Reference,
}

impl WeightSpec {
    /// Builds a spec from exactly representable doubles.
    pub fn new(beta: f64, xjump: f64) -> Result<Self> {
        if !beta.is_finite() || !xjump.is_finite() {
            return Err(Error::InvalidWeight(format!("non-finite beta={beta} or xjump={xjump}")));
        }
        Self::from_floats(Float::with_val(53, beta), Float::with_val(53, xjump))
    }

    pub fn from_floats(beta: Float, xjump: Float) -> Result<Self> {
        if !beta.is_finite() || !xjump.is_finite() {
            return Err(Error::InvalidWeight("non-finite parameter".into()));
        }
        // w > 0 needs both 1 - β/2 > 0 and 1 + β/2 > 0.
        if beta.clone().abs() >= 2 {
            return Err(Error::InvalidWeight(format!(
                "beta/2 = {} outside (-1, 1)",
                beta.to_f64() / 2.0
            )));
        }
        Ok(WeightSpec { beta, xjump, reference: Reference::Hermite })
    }

    /// Accepts the general jump representation when it describes a single jump.
    pub fn from_jump_function(jf: &JumpFunction) -> Result<Self> {
        match jf.jumps.as_slice() {
            [jump] => {
                // baseline 1 - β/2 with delta β means baseline + delta/2 = 1.
                let prec = jf.baseline.prec().max(jump.delta.prec()) + 2;
                let mid = Float::with_val(prec, &jump.delta / 2u32) + &jf.baseline;
                if mid != 1 {
                    return Err(Error::InvalidWeight(
                        "single jump must satisfy baseline + delta/2 = 1".into(),
                    ));
                }
                Self::from_floats(jump.delta.clone(), jump.location.clone())
            }
            [] => Err(Error::InvalidWeight("no jump".into())),
            _ => Err(Error::InvalidWeight("multi-jump weights are not supported".into())),
        }
    }

    pub fn beta(&self) -> &Float {
        &self.beta
    }

    pub fn xjump(&self) -> &Float {
        &self.xjump
    }

    pub fn reference(&self) -> Reference {
        self.reference
    }

    pub fn is_undeformed(&self) -> bool {
        self.beta.is_zero()
    }

    /// Same jump height, different jump location.
    pub fn with_xjump(&self, xjump: Float) -> Self {
        WeightSpec { beta: self.beta.clone(), xjump, reference: self.reference }
    }

    /// Same location, jump height negated.
    pub fn negated(&self) -> Self {
        WeightSpec { beta: -self.beta.clone(), xjump: self.xjump.clone(), reference: self.reference }
    }

    /// The general-form view of this weight.
    pub fn jump_function(&self, bits: u32) -> JumpFunction {
        let half = Float::with_val(bits, &self.beta / 2u32);
        JumpFunction {
            baseline: Float::with_val(bits, 1 - half),
            jumps: vec![Jump {
                delta: Float::with_val(bits, &self.beta),
                location: self.xjump.clone(),
            }],
        }
    }
}

/// `w(x)`; at `x == x̃` the right limit (θ(0) = 1) is used.
pub fn eval_weight(spec: &WeightSpec, x: &Float, bits: u32) -> Float {
    let gauss = Float::with_val(bits, -x.clone().square()).exp();
    gauss * spec.jump_function(bits).eval(x)
}
