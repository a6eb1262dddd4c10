//! Hausdorff-dimension lower bounds and pattern capacity from thickness.
//!
//! The intersection bound applies to `B ∩ C_1 ∩ … ∩ C_k` when every `C_i`
//! has thickness `τ_i` and the feasibility condition
//! `Σ τ_i^{-c} ≤ K₂⁻¹ β^c (1 - β^{d-c})` holds for some `c ∈ (0, d)`.
//! Feasibility is decided on outward-rounded enclosures, so a reported
//! infeasible point is infeasible for the exact inputs.

use serde::Serialize;
use thiserror::Error;

use crate::enclosure::Enclosure;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("exponent c = {c} must lie strictly between 0 and d = {d}")]
    InvalidC { c: f64, d: u32 },
    #[error("no exponent in (0, {d}) satisfies the feasibility condition")]
    NoFeasibleC { d: u32 },
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
}

/// The two dimension-dependent constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Constants {
    pub d: u32,
    /// `2d(24√d)^d ln(16√d) / (1 - 2^{-d})`.
    pub k1: f64,
    /// `((24√d)^d (1 + 2·4^d) / (1 - 2^{-d}))²`.
    pub k2: f64,
}

pub fn constants(d: u32) -> Result<Constants, BoundsError> {
    if d == 0 {
        return Err(BoundsError::OutOfRange("dimension must be at least 1".into()));
    }
    let df = d as f64;
    let s = df.sqrt();
    let a = (24.0 * s).powi(d as i32);
    let q = 1.0 - 2f64.powi(-(d as i32));
    let k1 = 2.0 * df * a * (16.0 * s).ln() / q;
    let k2 = (a * (1.0 + 2.0 * 4f64.powi(d as i32)) / q).powi(2);
    Ok(Constants { d, k1, k2 })
}

fn k2_enclosure(d: u32) -> Enclosure {
    let df = Enclosure::exact(d as f64);
    let a = Enclosure::exact(24.0).mul(df.sqrt()).powf(d as f64);
    let q = Enclosure::exact(1.0).sub(Enclosure::exact(2f64.powi(-(d as i32))));
    let b = Enclosure::exact(1.0).add(Enclosure::exact(2.0 * 4f64.powi(d as i32)));
    a.mul(b).div(q).powf(2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// Intersection of a ball with several thick sets.
    Intersection,
    /// A single thick set inside a ball.
    SingleSet,
    /// Winning sets of the `(α, β, c, ρ)`-game.
    WinningSet,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionBound {
    pub kind: BoundKind,
    pub value: f64,
    pub d: u32,
    pub c: f64,
    pub beta: f64,
    /// Game parameter: `(Σ τ_i^{-c})^{1/c} / β` for thickness inputs.
    pub alpha: f64,
    pub taus: Vec<f64>,
    pub k1: f64,
    pub k2: f64,
    /// Left side of the feasibility condition.
    pub lhs: f64,
    /// Right side of the feasibility condition.
    pub rhs: f64,
    /// `rhs - lhs`.
    pub slack: f64,
    /// Width of the enclosures around `lhs` and `rhs` together.
    pub slack_uncertainty: f64,
    /// Not certifiably infeasible.
    pub feasible: bool,
    /// Certifiably feasible.
    pub certified: bool,
}

fn check_c(c: f64, d: u32) -> Result<(), BoundsError> {
    if c.is_finite() && c > 0.0 && c < d as f64 {
        Ok(())
    } else {
        Err(BoundsError::InvalidC { c, d })
    }
}

fn check_positive(name: &str, x: f64) -> Result<(), BoundsError> {
    if x > 0.0 && !x.is_nan() {
        Ok(())
    } else {
        Err(BoundsError::OutOfRange(format!("{name} must be positive, got {x}")))
    }
}

/// `min{1/4, ratio}`.
pub fn beta_from_ratio(ratio: f64) -> f64 {
    ratio.min(0.25)
}

/// `(1 - β^{d-c}) / K₂`, the budget allowed for `α^c`.
fn rhs_enclosure(beta: f64, c: f64, d: u32) -> Enclosure {
    let one = Enclosure::exact(1.0);
    one.sub(Enclosure::exact(beta).powf(d as f64 - c))
        .div(k2_enclosure(d))
}

/// Dimension bound for `B ∩ C_1 ∩ … ∩ C_k`.
pub fn intersection_bound(taus: &[f64], sup_diam: f64, diam_b: f64, d: u32, c: f64) -> Result<DimensionBound, BoundsError> {
    let k = constants(d)?;
    check_c(c, d)?;
    check_positive("sup of diameters", sup_diam)?;
    check_positive("ball diameter", diam_b)?;
    if taus.is_empty() {
        return Err(BoundsError::OutOfRange("at least one thickness is needed".into()));
    }
    for t in taus {
        check_positive("thickness", *t)?;
    }
    let beta = beta_from_ratio(diam_b / sup_diam);
    Ok(evaluate(BoundKind::Intersection, taus, beta, d, c, k))
}

fn evaluate(kind: BoundKind, taus: &[f64], beta: f64, d: u32, c: f64, k: Constants) -> DimensionBound {
    let sum: f64 = taus.iter().map(|t| t.powf(-c)).sum();
    let sum_enc = taus.iter().fold(Enclosure::exact(0.0), |acc, t| {
        acc.add(Enclosure::exact(*t).powf(-c))
    });
    // Σ τ^{-c} ≤ β^c (1 - β^{d-c}) / K₂
    let lhs = sum_enc;
    let rhs = Enclosure::exact(beta).powf(c).mul(rhs_enclosure(beta, c, d));
    let rhs_mid = beta.powf(c) * (1.0 - beta.powf(d as f64 - c)) / k.k2;
    let alpha = sum.powf(1.0 / c) / beta;
    let value = d as f64 - k.k1 * sum.powf(d as f64 / c) / (beta.powi(d as i32) * beta.ln().abs());
    DimensionBound {
        kind,
        value,
        d,
        c,
        beta,
        alpha,
        taus: taus.to_vec(),
        k1: k.k1,
        k2: k.k2,
        lhs: sum,
        rhs: rhs_mid,
        slack: rhs_mid - sum,
        slack_uncertainty: lhs.width() + rhs.width(),
        feasible: lhs.possibly_le(&rhs),
        certified: lhs.certainly_le(&rhs),
    }
}

/// Dimension bound for `B ∩ C` with a single thick set, `β = min{1/4, diam B / diam C}`.
pub fn single_set_bound(tau: f64, diam_b: f64, diam_c: f64, d: u32, c: f64) -> Result<DimensionBound, BoundsError> {
    let mut b = intersection_bound(&[tau], diam_c, diam_b, d, c)?;
    b.kind = BoundKind::SingleSet;
    Ok(b)
}

/// Dimension bound `d - K₁ α^d / |ln β|` for winning sets of the
/// `(α, β, c, ρ)`-game, feasible when `α^c ≤ (1 - β^{d-c}) / K₂`.
pub fn winning_set_bound(alpha: f64, beta: f64, c: f64, d: u32) -> Result<DimensionBound, BoundsError> {
    let k = constants(d)?;
    check_c(c, d)?;
    check_positive("alpha", alpha)?;
    if !(beta > 0.0 && beta <= 0.25) {
        return Err(BoundsError::OutOfRange(format!("beta must lie in (0, 1/4], got {beta}")));
    }
    let lhs = Enclosure::exact(alpha).powf(c);
    let rhs = rhs_enclosure(beta, c, d);
    let lhs_mid = alpha.powf(c);
    let rhs_mid = (1.0 - beta.powf(d as f64 - c)) / k.k2;
    let value = d as f64 - k.k1 * alpha.powi(d as i32) / beta.ln().abs();
    Ok(DimensionBound {
        kind: BoundKind::WinningSet,
        value,
        d,
        c,
        beta,
        alpha,
        taus: Vec::new(),
        k1: k.k1,
        k2: k.k2,
        lhs: lhs_mid,
        rhs: rhs_mid,
        slack: rhs_mid - lhs_mid,
        slack_uncertainty: lhs.width() + rhs.width(),
        feasible: lhs.possibly_le(&rhs),
        certified: lhs.certainly_le(&rhs),
    })
}

/// The exponent chosen in the single-set argument, `c = d - 1/ln(τβ)`, when
/// it lies in `(0, d)`.
pub fn proof_exponent(tau: f64, beta: f64, d: u32) -> Option<f64> {
    let l = (tau * beta).ln();
    if l <= 0.0 {
        return None;
    }
    let c = d as f64 - 1.0 / l;
    (c > 0.0 && c < d as f64).then_some(c)
}

const C_GRID: usize = 400;
const GOLDEN_TOL: f64 = 1e-12;

/// Feasible exponent with the largest intersection bound. A grid scan over
/// `(0, d)` (plus the single-set proof exponent) is refined by a
/// golden-section search around the best grid point.
pub fn optimize_c(taus: &[f64], sup_diam: f64, diam_b: f64, d: u32) -> Result<DimensionBound, BoundsError> {
    let df = d as f64;
    let eval = |c: f64| intersection_bound(taus, sup_diam, diam_b, d, c);
    let mut candidates: Vec<f64> = (1..=C_GRID).map(|i| df * i as f64 / (C_GRID + 1) as f64).collect();
    if taus.len() == 1 {
        let beta = beta_from_ratio(diam_b / sup_diam);
        if let Some(c) = proof_exponent(taus[0], beta, d) {
            candidates.push(c);
        }
    }
    let mut best: Option<DimensionBound> = None;
    let mut best_i = 0;
    for (i, c) in candidates.iter().enumerate() {
        let b = eval(*c)?;
        if b.feasible && best.as_ref().is_none_or(|x| b.value > x.value) {
            best = Some(b);
            best_i = i;
        }
    }
    let Some(mut best) = best else {
        return Err(BoundsError::NoFeasibleC { d });
    };
    if best_i < C_GRID {
        let step = df / (C_GRID + 1) as f64;
        let centre = candidates[best_i];
        let (mut a, mut b) = ((centre - step).max(step * 1e-3), (centre + step).min(df - step * 1e-3));
        let phi = 0.5 * (5f64.sqrt() - 1.0);
        let score = |bound: &DimensionBound| if bound.feasible { bound.value } else { f64::NEG_INFINITY };
        let mut x1 = b - phi * (b - a);
        let mut x2 = a + phi * (b - a);
        let mut f1 = eval(x1)?;
        let mut f2 = eval(x2)?;
        while b - a > GOLDEN_TOL {
            for f in [&f1, &f2] {
                if f.feasible && f.value > best.value {
                    best = f.clone();
                }
            }
            if score(&f1) >= score(&f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - phi * (b - a);
                f1 = eval(x1)?;
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + phi * (b - a);
                f2 = eval(x2)?;
            }
        }
        for f in [f1, f2] {
            if f.feasible && f.value > best.value {
                best = f;
            }
        }
    }
    Ok(best)
}

/// Bounds at `steps` evenly spaced exponents in `(0, d)`.
pub fn sweep_c(taus: &[f64], sup_diam: f64, diam_b: f64, d: u32, steps: usize) -> Result<Vec<DimensionBound>, BoundsError> {
    (1..=steps)
        .map(|i| intersection_bound(taus, sup_diam, diam_b, d, d as f64 * i as f64 / (steps + 1) as f64))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PatternCapacity {
    /// Guaranteed number of similar copies of any pattern.
    pub count: u64,
    /// The quantity under the floor.
    pub raw: f64,
    pub beta: f64,
    /// `1 < τ < e`: the count formula is used outside its asymptotic range.
    pub pre_asymptotic: bool,
    /// Exponent chosen in the argument, `d - 1/ln(τβ)`.
    pub exponent: Option<f64>,
}

/// `N(τ) = ⌊β^d |ln β| τ^d / (e K₂ ln τ)⌋` with `β = min{1/4, 15 diam B / (16 diam C)}`.
/// Thickness at most one guarantees nothing, so the count is zero there.
pub fn pattern_capacity(tau: f64, diam_b: f64, diam_c: f64, d: u32) -> Result<PatternCapacity, BoundsError> {
    let k = constants(d)?;
    check_positive("ball diameter", diam_b)?;
    check_positive("set diameter", diam_c)?;
    if tau.is_nan() || tau < 0.0 {
        return Err(BoundsError::OutOfRange(format!("thickness must be non-negative, got {tau}")));
    }
    let beta = beta_from_ratio(15.0 * diam_b / (16.0 * diam_c));
    if tau <= 1.0 {
        return Ok(PatternCapacity {
            count: 0,
            raw: 0.0,
            beta,
            pre_asymptotic: true,
            exponent: None,
        });
    }
    let raw = capacity_raw(tau, beta, d, k.k2);
    let count = if raw >= u64::MAX as f64 { u64::MAX } else { raw.floor() as u64 };
    Ok(PatternCapacity {
        count,
        raw,
        beta,
        pre_asymptotic: tau < std::f64::consts::E,
        exponent: proof_exponent(tau, beta, d),
    })
}

fn capacity_raw(tau: f64, beta: f64, d: u32, k2: f64) -> f64 {
    if tau.is_infinite() {
        return f64::INFINITY;
    }
    let di = d as i32;
    beta.powi(di) * beta.ln().abs() * tau.powi(di) / (std::f64::consts::E * k2 * tau.ln())
}

/// Smallest thickness (to relative precision `1e-12`) with at least `n`
/// guaranteed copies, found by bisection on `[e, ∞)`.
pub fn min_tau_for_count(n: u64, diam_b: f64, diam_c: f64, d: u32) -> Result<f64, BoundsError> {
    let k = constants(d)?;
    let beta = beta_from_ratio(15.0 * diam_b / (16.0 * diam_c));
    let target = n as f64;
    let ok = |t: f64| capacity_raw(t, beta, d, k.k2).floor() >= target;
    let mut lo = std::f64::consts::E;
    if ok(lo) {
        return Ok(lo);
    }
    let mut hi = lo * 2.0;
    while !ok(hi) {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(BoundsError::OutOfRange("count is out of reach".into()));
        }
    }
    while (hi - lo) > 1e-12 * hi {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Lower bound `ln 2 / ln(2 + 1/τ)` on the dimension of a compact set on the
/// line with thickness `τ`.
pub fn dim_lower_1d(tau: f64) -> Result<f64, BoundsError> {
    if tau.is_nan() || tau < 0.0 {
        return Err(BoundsError::OutOfRange(format!("thickness must be non-negative, got {tau}")));
    }
    if tau == 0.0 {
        return Ok(0.0);
    }
    Ok(2f64.ln() / (2.0 + 1.0 / tau).ln())
}

/// `d - 1 + dim_lower_1d(τ)` for sets in ℝᵈ with convex gaps.
pub fn convex_gap_dim_bound(tau: f64, d: u32) -> Result<f64, BoundsError> {
    if d == 0 {
        return Err(BoundsError::OutOfRange("dimension must be at least 1".into()));
    }
    Ok(d as f64 - 1.0 + dim_lower_1d(tau)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn constants_in_dimension_one() {
        let k = constants(1).unwrap();
        assert_relative_eq!(k.k1, 96.0 * 16f64.ln(), max_relative = 1e-14);
        assert_eq!(k.k2, 186624.0);
        assert!(k2_enclosure(1).contains(186624.0));
    }

    #[test]
    fn invalid_exponent() {
        for c in [0.0, 1.0, -0.5, f64::NAN] {
            assert!(matches!(
                intersection_bound(&[10.0], 1.0, 1.0, 1, c),
                Err(BoundsError::InvalidC { .. })
            ));
        }
    }

    #[test]
    fn one_d_lower_bound() {
        assert_eq!(dim_lower_1d(0.5).unwrap(), 0.5);
        assert_eq!(dim_lower_1d(f64::INFINITY).unwrap(), 1.0);
        assert_eq!(dim_lower_1d(0.0).unwrap(), 0.0);
        assert_relative_eq!(convex_gap_dim_bound(1.0, 2).unwrap(), 1.0 + 2f64.ln() / 3f64.ln());
    }

    #[test]
    fn capacity_vanishes_for_thin_sets() {
        let p = pattern_capacity(0.9, 1.0, 1.0, 2).unwrap();
        assert_eq!(p.count, 0);
        let p = pattern_capacity(2.0, 1.0, 1.0, 2).unwrap();
        assert!(p.pre_asymptotic);
    }

    #[test]
    fn feasible_implies_positive() {
        let b = winning_set_bound(1e-7, 0.25, 0.9, 1).unwrap();
        assert!(b.feasible);
        assert!(b.value > 0.0);
    }
}
