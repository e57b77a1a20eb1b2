//! The fast path: forward iteration of the coupled difference equations
//!
//! ```text
//! r_{n+1} = 2 α_n (x̃ - α_n) - r_n
//! α_{n+1} = r_{n+1}² / (2 (n+1 + r_{n+1}) α_n)
//! ```
//!
//! from r_0 = 0 and α_0 = μ_1/μ_0, together with the ladder coefficients
//! A_n(z) = R_n/(z - x̃) + 2, B_n(z) = r_n/(z - x̃) and the identity checks
//! built on them.

use rug::Float;

use crate::special::{erfc, sqrt_pi};
use crate::table::{CoeffTable, Source};
use crate::{Error, Result, WeightSpec};

/// α_0 = (β/2) e^{-x̃²} / [(1 - β/2)√π + β ∫_{x̃}^∞ e^{-t²} dt].
pub fn alpha0(spec: &WeightSpec, bits: u32) -> Result<Float> {
    let work = bits + 32;
    let beta = Float::with_val(work, spec.beta());
    let x = Float::with_val(work, spec.xjump());
    let sp = sqrt_pi(work);
    let tail = Float::with_val(work, &sp * erfc(&x, work)?) / 2u32;
    let base = Float::with_val(work, 1 - Float::with_val(work, &beta / 2u32));
    let den = Float::with_val(work, &base * &sp) + Float::with_val(work, &beta * &tail);
    let num = Float::with_val(work, -x.square()).exp() * &beta / 2u32;
    Ok(Float::with_val(bits, num / den))
}

/// Breakdown threshold 2^{-bits/2} on |α_n| and |n + r_n|.
pub fn division_guard(bits: u32) -> Float {
    Float::with_val(64, 1) >> (bits / 2)
}

/// One state (n, α_n, r_n) of the forward iteration.
#[derive(Debug, Clone)]
pub struct Step {
    pub n: usize,
    pub alpha: Float,
    pub r: Float,
}

/// Streaming form of the iteration over states (n, α_n, r_n).
///
/// Storage is O(1), so this is the route for very long runs.
#[derive(Debug, Clone)]
pub struct Iteration {
    xjump: Float,
    bits: u32,
    guard: Float,
    undeformed: bool,
    state: Step,
}

impl Iteration {
    pub fn new(spec: &WeightSpec, bits: u32) -> Result<Self> {
        let a0 = alpha0(spec, bits)?;
        Ok(Iteration {
            xjump: Float::with_val(bits, spec.xjump()),
            bits,
            guard: division_guard(bits),
            undeformed: spec.is_undeformed(),
            state: Step { n: 0, alpha: a0, r: Float::new(bits) },
        })
    }

    pub fn state(&self) -> &Step {
        &self.state
    }

    /// r_{n+1} = 2α_n(x̃ - α_n) - r_n from the current state.
    pub fn next_r(&self) -> Float {
        let b = self.bits;
        let s = &self.state;
        let gap = Float::with_val(b, &self.xjump - &s.alpha);
        Float::with_val(b, &s.alpha * &gap) * 2u32 - &s.r
    }

    /// Moves from (α_n, r_n) to (α_{n+1}, r_{n+1}).
    pub fn advance(&mut self) -> Result<&Step> {
        let b = self.bits;
        let n1 = self.state.n + 1;
        if self.undeformed {
            self.state = Step { n: n1, alpha: Float::new(b), r: Float::new(b) };
            return Ok(&self.state);
        }
        if Float::with_val(b, self.state.alpha.abs_ref()) < self.guard {
            return Err(Error::DivisionBreakdown { n: self.state.n, quantity: "alpha_n" });
        }
        let r1 = self.next_r();
        let n_plus_r = Float::with_val(b, &r1 + n1 as u32);
        if n_plus_r <= 0 {
            return Err(Error::NonPositiveBeta { n: n1 });
        }
        if n_plus_r < self.guard {
            return Err(Error::DivisionBreakdown { n: n1, quantity: "n + r_n" });
        }
        let den = Float::with_val(b, &n_plus_r * &self.state.alpha) * 2u32;
        let a1 = Float::with_val(b, r1.square_ref()) / den;
        self.state = Step { n: n1, alpha: a1, r: r1 };
        Ok(&self.state)
    }
}

/// Iterates up to n_max and fills α_n, β_n = (n + r_n)/2, r_n, R_n = 2α_n.
///
/// r_{N+1} is included. Along the way the relative residual of
/// r_n² = 2(n + r_n) α_n α_{n-1} is tracked; a warning is attached to the
/// table when it exceeds 2^{-bits/2}.
pub fn iterate(spec: &WeightSpec, n_max: usize, bits: u32) -> Result<CoeffTable> {
    if n_max < 1 {
        return Err(Error::InvalidArgument("iterate needs N >= 1".into()));
    }
    let mut it = Iteration::new(spec, bits)?;
    let mut alpha = Vec::with_capacity(n_max + 1);
    let mut r = Vec::with_capacity(n_max + 2);
    alpha.push(it.state().alpha.clone());
    r.push(it.state().r.clone());
    let tol = division_guard(bits);
    let mut worst = Float::new(64);
    let mut worst_n = 0;
    for _ in 0..n_max {
        let s = it.advance()?;
        let n = s.n;
        if !spec.is_undeformed() {
            let lhs = Float::with_val(bits, s.r.square_ref());
            let rhs = Float::with_val(bits, &s.r + n as u32) * &s.alpha * &alpha[n - 1] * 2u32;
            let rel = Float::with_val(64, &lhs - &rhs).abs() / Float::with_val(64, lhs.abs_ref()).max(&rhs.abs());
            if rel.is_finite() && rel > worst {
                worst = rel;
                worst_n = n;
            }
        }
        alpha.push(s.alpha.clone());
        r.push(s.r.clone());
    }
    r.push(it.next_r());

    let beta_n = (0..=n_max)
        .map(|n| Float::with_val(bits, &r[n] + n as u32) / 2u32)
        .collect();
    let big_r = alpha.iter().map(|a| Float::with_val(bits, a * 2u32)).collect();
    let mut warnings = Vec::new();
    if worst > tol {
        warnings.push(format!(
            "precision degradation: relative residual {:.3e} at n = {worst_n}",
            worst.to_f64()
        ));
    }
    Ok(CoeffTable {
        spec: spec.clone(),
        n_max,
        alpha,
        beta_n,
        r,
        big_r,
        h: None,
        p1: None,
        hankel: None,
        source: Source::Iteration,
        bits,
        warnings,
    })
}

/// Residuals of the two universal equalities:
/// `u1[n] = (x̃ - α_n) R_n - r_{n+1} - r_n` for n = 0..=N and
/// `u2[n] = r_n² - β_n R_n R_{n-1}` for n = 0..=N (u2[0] = 0).
///
/// Only informative on oracle tables; iteration tables satisfy both by construction.
pub fn universal_residuals(table: &CoeffTable) -> (Vec<Float>, Vec<Float>) {
    let b = table.bits;
    let x = table.xjump();
    let mut u1 = Vec::with_capacity(table.n_max + 1);
    let mut u2 = Vec::with_capacity(table.n_max + 1);
    for n in 0..=table.n_max {
        let gap = Float::with_val(b, x - &table.alpha[n]);
        let v = Float::with_val(b, &gap * &table.big_r[n]) - &table.r[n + 1] - &table.r[n];
        u1.push(v);
        if n == 0 {
            u2.push(Float::with_val(b, table.r[0].square_ref()));
        } else {
            let prod = Float::with_val(b, &table.beta_n[n] * &table.big_r[n]) * &table.big_r[n - 1];
            u2.push(Float::with_val(b, table.r[n].square_ref()) - prod);
        }
    }
    (u1, u2)
}

/// A_n(z) = a_residue/(z - pole) + a_poly and B_n(z) = b_residue/(z - pole) + b_poly.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderCoeffs {
    pub n: usize,
    pub pole: Float,
    pub a_residue: Float,
    pub a_poly: Float,
    pub b_residue: Float,
    pub b_poly: Float,
}

impl LadderCoeffs {
    pub fn a_at(&self, z: &Float) -> Float {
        let p = self.a_residue.prec();
        let d = Float::with_val(p, z - &self.pole);
        Float::with_val(p, &self.a_residue / &d) + &self.a_poly
    }

    pub fn b_at(&self, z: &Float) -> Float {
        let p = self.b_residue.prec();
        let d = Float::with_val(p, z - &self.pole);
        Float::with_val(p, &self.b_residue / &d) + &self.b_poly
    }
}

pub fn ladder_coeffs(table: &CoeffTable, n: usize) -> Result<LadderCoeffs> {
    if n > table.n_max {
        return Err(Error::InvalidArgument(format!("n = {n} beyond table N = {}", table.n_max)));
    }
    let b = table.bits;
    Ok(LadderCoeffs {
        n,
        pole: Float::with_val(b, table.xjump()),
        a_residue: table.big_r[n].clone(),
        a_poly: Float::with_val(b, 2),
        b_residue: table.r[n].clone(),
        b_poly: Float::new(b),
    })
}

/// Default minimum distance between an evaluation point and x̃ or α_n.
pub const POLE_GUARD: f64 = 1e-6;

/// Residuals of the two compatibility conditions at each z:
/// `s1 = B_{n+1} + B_n - (z - α_n) A_n + 2z` and
/// `s2 = B_{n+1} - B_n - (β_{n+1} A_{n+1} - β_n A_{n-1} - 1)/(z - α_n)`.
pub fn compatibility_residuals(
    table: &CoeffTable,
    n: usize,
    zs: &[Float],
    guard: f64,
) -> Result<(Vec<Float>, Vec<Float>)> {
    if n < 1 || n + 1 > table.n_max {
        return Err(Error::InvalidArgument(format!(
            "compatibility needs 1 <= n <= N-1, got n = {n}, N = {}",
            table.n_max
        )));
    }
    let b = table.bits;
    let a_prev = ladder_coeffs(table, n - 1)?;
    let cur = ladder_coeffs(table, n)?;
    let next = ladder_coeffs(table, n + 1)?;
    let mut s1 = Vec::with_capacity(zs.len());
    let mut s2 = Vec::with_capacity(zs.len());
    for z in zs {
        let to_pole = Float::with_val(b, z - table.xjump());
        let to_alpha = Float::with_val(b, z - &table.alpha[n]);
        for (dist, pole) in [(&to_pole, table.xjump()), (&to_alpha, &table.alpha[n])] {
            if Float::with_val(b, dist.abs_ref()) < guard {
                return Err(Error::PoleProximity { z: z.to_f64(), pole: pole.to_f64() });
            }
        }
        let b_next = next.b_at(z);
        let b_cur = cur.b_at(z);
        let first = Float::with_val(b, &b_next + &b_cur)
            - Float::with_val(b, &to_alpha * cur.a_at(z))
            + Float::with_val(b, z * 2u32);
        let lifted = Float::with_val(b, &table.beta_n[n + 1] * next.a_at(z))
            - Float::with_val(b, &table.beta_n[n] * a_prev.a_at(z))
            - 1u32;
        let second = Float::with_val(b, &b_next - &b_cur) - lifted / &to_alpha;
        s1.push(first);
        s2.push(second);
    }
    Ok((s1, s2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::moments;
    use crate::oracle::oracle_table;
    use crate::testing::{abs_diff, rel_err, ulps};

    fn max_abs(v: &[Float]) -> Float {
        v.iter().fold(Float::new(64), |m, x| m.max(&Float::with_val(64, x.abs_ref())))
    }

    #[test]
    fn alpha0_special_values() {
        assert!(alpha0(&WeightSpec::new(0.0, 1.3).unwrap(), 256).unwrap().is_zero());
        for beta in [-1.5, 0.5, 1.5] {
            let a = alpha0(&WeightSpec::new(beta, 0.0).unwrap(), 256).unwrap();
            let expected = Float::with_val(256, beta / 2.0) / sqrt_pi(256);
            assert!(rel_err(&a, &expected) < ulps(256, 4));
        }
    }

    #[test]
    fn alpha0_is_first_moment_ratio() {
        let spec = WeightSpec::new(1.5, 1.0).unwrap();
        let mv = moments(&spec, 2, 320).unwrap();
        let ratio = Float::with_val(320, &mv.mu[1] / &mv.mu[0]);
        assert!(rel_err(&alpha0(&spec, 256).unwrap(), &ratio) < ulps(256, 8));
    }

    #[test]
    fn undeformed_iteration() {
        let t = iterate(&WeightSpec::new(0.0, 0.0).unwrap(), 100, 256).unwrap();
        for n in 0..=100 {
            assert!(t.alpha[n].is_zero() && t.r[n].is_zero());
            assert_eq!(t.beta_n[n], n as f64 / 2.0);
        }
        assert!(t.r[101].is_zero());
    }

    #[test]
    fn first_step() {
        let spec = WeightSpec::new(1.5, 0.5).unwrap();
        let t = iterate(&spec, 3, 256).unwrap();
        let a0 = &t.alpha[0];
        let expected = Float::with_val(256, 0.5f64 - a0) * a0 * 2u32;
        assert_eq!(t.r[1], expected);
    }

    #[test]
    fn agrees_with_oracle() {
        let spec = WeightSpec::new(1.5, 0.5).unwrap();
        let it = iterate(&spec, 30, 256).unwrap();
        let or = oracle_table(&spec, 30, Some(1024)).unwrap();
        for n in 0..=30 {
            assert!(rel_err(&it.alpha[n], &or.alpha[n]) < 1e-20);
            assert!(rel_err(&it.r[n + 1], &or.r[n + 1]) < 1e-20);
        }
        for n in 1..=30 {
            assert!(rel_err(&it.beta_n[n], &or.beta_n[n]) < 1e-20);
        }
        assert!(it.warnings.is_empty());
    }

    #[test]
    fn universal_residuals_on_undeformed_table() {
        let t = iterate(&WeightSpec::new(0.0, 0.4).unwrap(), 20, 256).unwrap();
        let (u1, u2) = universal_residuals(&t);
        assert!(u1.iter().chain(&u2).all(|v| v.is_zero()));
    }

    #[test]
    fn universal_residuals_on_oracle_table() {
        let spec = WeightSpec::new(1.5, 0.0).unwrap();
        let t = oracle_table(&spec, 30, Some(512)).unwrap();
        let (u1, u2) = universal_residuals(&t);
        assert!(max_abs(&u1) < 1e-25);
        assert!(max_abs(&u2) < 1e-25);
    }

    #[test]
    fn universal_residuals_on_iteration_table_are_rounding() {
        let t = iterate(&WeightSpec::new(-1.2, 0.8).unwrap(), 200, 256).unwrap();
        let (u1, u2) = universal_residuals(&t);
        assert!(max_abs(&u1) < 1e-70);
        assert!(max_abs(&u2) < 1e-70);
    }

    #[test]
    fn ladder_values() {
        let t = iterate(&WeightSpec::new(0.0, 0.4).unwrap(), 5, 256).unwrap();
        let l = ladder_coeffs(&t, 3).unwrap();
        let z = Float::with_val(256, 1.7);
        assert_eq!(l.a_at(&z), 2);
        assert!(l.b_at(&z).is_zero());

        let t = iterate(&WeightSpec::new(1.5, -0.3).unwrap(), 5, 256).unwrap();
        let l = ladder_coeffs(&t, 4).unwrap();
        assert_eq!(l.a_residue, Float::with_val(256, &t.alpha[4] * 2u32));

        let or = oracle_table(&WeightSpec::new(1.5, 0.0).unwrap(), 8, Some(512)).unwrap();
        let l = ladder_coeffs(&or, 5).unwrap();
        let expected = Float::with_val(512, &or.big_r[5] + 2u32);
        assert!(abs_diff(&l.a_at(&Float::with_val(512, 1)), &expected) < ulps(512, 4));
    }

    fn zs(bits: u32) -> Vec<Float> {
        [-2.0, -1.0, 1.0, 2.0, 3.0].iter().map(|&z| Float::with_val(bits, z)).collect()
    }

    #[test]
    fn compatibility_undeformed_is_exact() {
        let t = iterate(&WeightSpec::new(0.0, 0.5).unwrap(), 10, 256).unwrap();
        let (s1, s2) = compatibility_residuals(&t, 4, &zs(256), POLE_GUARD).unwrap();
        assert!(s1.iter().chain(&s2).all(|v| v.is_zero()));
    }

    #[test]
    fn compatibility_on_oracle_table() {
        let t = oracle_table(&WeightSpec::new(1.5, 0.5).unwrap(), 12, Some(512)).unwrap();
        let (s1, s2) = compatibility_residuals(&t, 10, &zs(512), POLE_GUARD).unwrap();
        assert!(max_abs(&s1) < 1e-22);
        assert!(max_abs(&s2) < 1e-22);
    }

    #[test]
    fn compatibility_on_iteration_table() {
        let t = iterate(&WeightSpec::new(0.5, 0.0).unwrap(), 6, 256).unwrap();
        let z = [Float::with_val(256, 2)];
        let (s1, s2) = compatibility_residuals(&t, 3, &z, POLE_GUARD).unwrap();
        assert!(Float::with_val(256, s1[0].abs_ref()) < ulps(256, 10));
        assert!(Float::with_val(256, s2[0].abs_ref()) < ulps(256, 10));
    }

    #[test]
    fn compatibility_rejects_pole() {
        let t = iterate(&WeightSpec::new(1.5, 1.0).unwrap(), 6, 256).unwrap();
        let z = [Float::with_val(256, 1)];
        assert!(matches!(
            compatibility_residuals(&t, 2, &z, POLE_GUARD),
            Err(Error::PoleProximity { .. })
        ));
    }

    #[test]
    fn reflection_symmetry_at_origin() {
        let plus = iterate(&WeightSpec::new(1.5, 0.0).unwrap(), 200, 256).unwrap();
        let minus = iterate(&WeightSpec::new(-1.5, 0.0).unwrap(), 200, 256).unwrap();
        for n in 0..=200 {
            let sum = Float::with_val(256, &plus.alpha[n] + &minus.alpha[n]);
            assert!(sum.abs() < 1e-70);
            if n >= 1 {
                assert!(abs_diff(&plus.r[n], &minus.r[n]) < 1e-70);
            }
        }
    }

    #[test]
    fn long_run_keeps_beta_positive() {
        let mut it = Iteration::new(&WeightSpec::new(1.5, 0.3).unwrap(), 256).unwrap();
        for _ in 0..20_000 {
            let s = it.advance().unwrap();
            assert!(Float::with_val(256, &s.r + s.n as u32) > 0);
        }
    }

    #[test]
    fn tiny_alpha_triggers_division_breakdown() {
        // α_0 ~ e^{-196} is below the 2^{-64} guard at 128 bits
        let spec = WeightSpec::new(1.5, 14.0).unwrap();
        match iterate(&spec, 5, 128) {
            Err(Error::DivisionBreakdown { n, .. }) => assert_eq!(n, 0),
            other => panic!("expected breakdown, got {other:?}"),
        }
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(32))]
        #[test]
        fn off_diagonal_positive(beta in -1.9f64..1.9, x in -2.0f64..2.0) {
            proptest::prop_assume!(beta.abs() > 1e-3);
            let t = iterate(&WeightSpec::new(beta, x).unwrap(), 300, 192).unwrap();
            for n in 1..=300 {
                proptest::prop_assert!(t.beta_n[n] > 0);
            }
        }
    }
}
