use rug::Float;

use crate::moments::moments;
use crate::{Result, WeightSpec};

/// Which computation path produced a table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Source {
    /// Orthogonalization of exact moments.
    Oracle,
    /// Forward iteration of the difference equations.
    Iteration,
}

/// Recurrence data for n = 0..=n_max.
///
/// Index conventions: `alpha`, `beta_n`, `big_r`, `h` run over 0..=n_max
/// (`beta_n[0] = 0`); `r`, `p1` and `hankel` run over 0..=n_max+1, with
/// `r[0] = 0`, `p1[0] = 0` and `hankel[0] = D_0 = 1`.
#[derive(Debug, Clone)]
pub struct CoeffTable {
    pub spec: WeightSpec,
    pub n_max: usize,
    pub alpha: Vec<Float>,
    pub beta_n: Vec<Float>,
    pub r: Vec<Float>,
    pub big_r: Vec<Float>,
    /// Norms h_n; optional for iteration tables (see [`CoeffTable::with_norms`]).
    pub h: Option<Vec<Float>>,
    /// Sub-leading coefficient p₁(n) of P_n.
    pub p1: Option<Vec<Float>>,
    /// Hankel determinants D_n = ∏_{j<n} h_j.
    pub hankel: Option<Vec<Float>>,
    pub source: Source,
    pub bits: u32,
    pub warnings: Vec<String>,
}

impl CoeffTable {
    /// Fills h, p₁ and D from h_0 = μ_0, h_n = β_n h_{n-1} and
    /// p₁(n+1) = p₁(n) - α_n. No-op when already present.
    pub fn with_norms(mut self) -> Result<Self> {
        if self.h.is_some() && self.p1.is_some() && self.hankel.is_some() {
            return Ok(self);
        }
        let bits = self.bits;
        if self.h.is_none() {
            let mu0 = moments(&self.spec, 1, bits)?.mu.swap_remove(0);
            let mut h = Vec::with_capacity(self.n_max + 1);
            h.push(mu0);
            for n in 1..=self.n_max {
                let v = Float::with_val(bits, &h[n - 1] * &self.beta_n[n]);
                h.push(v);
            }
            self.h = Some(h);
        }
        if self.p1.is_none() {
            let mut p1 = Vec::with_capacity(self.n_max + 2);
            p1.push(Float::new(bits));
            for n in 0..=self.n_max {
                let v = Float::with_val(bits, &p1[n] - &self.alpha[n]);
                p1.push(v);
            }
            self.p1 = Some(p1);
        }
        if self.hankel.is_none() {
            self.hankel = Some(hankel_from_norms(self.h.as_ref().expect("norms filled"), bits));
        }
        Ok(self)
    }

    pub fn xjump(&self) -> &Float {
        self.spec.xjump()
    }

    pub fn beta(&self) -> &Float {
        self.spec.beta()
    }

    /// ln D_n, if determinants are present.
    pub fn ln_hankel(&self, n: usize) -> Option<Float> {
        self.hankel.as_ref().map(|d| Float::with_val(self.bits, d[n].ln_ref()))
    }
}

/// D_0 = 1 and D_{n+1} = D_n h_n, for n = 0..=h.len().
pub fn hankel_from_norms(h: &[Float], bits: u32) -> Vec<Float> {
    let mut d = Vec::with_capacity(h.len() + 1);
    d.push(Float::with_val(bits, 1));
    for (n, hn) in h.iter().enumerate() {
        let v = Float::with_val(bits, &d[n] * hn);
        d.push(v);
    }
    d
}
