//! Nested lattice-ball Cantor construction driven by an Alice strategy.
//!
//! `E_n` is the family of closed balls of radius `ρ_n = β^n ρ` centred on
//! `x₀ + (ρ_n/2)ℤ^d`; `D_n ⊂ E_n` keeps the centres on `x₀ + 3ρ_n ℤ^d`, so
//! distinct `D_n` balls are a full radius apart. With `β = 1/q` every
//! containment question reduces to integer arithmetic in units of `ρ_n/2`.
//!
//! A node is a `D_{jN}` ball. Its candidate children are the `D_{(j+1)N}`
//! balls inside the concentric half ball. Each candidate is projected back
//! level by level to the node, the projected balls are played as Bob's
//! moves, and Alice's replies that meet the candidate add `diam^c` to its
//! potential. Candidates whose potential stays below `(γ ρ_{(j+1)N})^c`
//! survive, and the first `M` of them become children.

use std::collections::HashMap;
use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::{constants, winning_set_bound, BoundsError};
use crate::game::{AliceStrategy, GameError, GameParams, GameState, Turn};
use crate::geometry::{Ball, Point};

/// Default cap on lattice candidates examined per expansion.
pub const DEFAULT_NODE_BUDGET: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScaffoldError {
    #[error("invalid scaffold parameters: {0}")]
    InvalidParams(String),
    #[error("infeasible parameters: alpha^c = {lhs} exceeds (1 - beta^(d-c))/K2 = {rhs}")]
    Infeasible { lhs: f64, rhs: f64 },
    #[error("the lattice needs beta = 1/q with an integer q >= 4, got beta = {0}")]
    NonLatticeBeta(f64),
    #[error("no ball of level {level} contains the level-{} ball {index:?}", level + 1)]
    NoContainingBall { level: u32, index: Vec<i64> },
    #[error("projecting child {child:?} back to block {block} reached {reached:?}, expected {parent:?}")]
    ChainMismatch {
        block: u32,
        child: Vec<i64>,
        parent: Vec<i64>,
        reached: Vec<i64>,
    },
    #[error("history has {have} turns but the potential needs {need}")]
    MissingHistory { have: usize, need: usize },
    #[error("node {index:?} of block {block} has {found} surviving children, {needed} needed")]
    SurvivorShortfall {
        block: u32,
        index: Vec<i64>,
        found: usize,
        needed: u64,
    },
    #[error("expansion needs {needed} lattice candidates, budget is {budget}")]
    NodeBudgetExceeded { needed: u128, budget: usize },
    #[error("branching factor is not positive: {0}")]
    NoBranching(f64),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
}

/// `γ` solving `3^d γ^d (1 + 2·4^d) = (1 - 2^{-d}) / (8√d)^d`.
pub fn gamma_for_dimension(d: u32) -> f64 {
    let df = d as f64;
    let di = d as i32;
    let q = 1.0 - 2f64.powi(-di);
    let inner = q / ((8.0 * df.sqrt()).powi(di) * (1.0 + 2.0 * 4f64.powi(di)));
    inner.powf(1.0 / df) / 3.0
}

/// `1/(2^d 4^d √d^d) - 3^d γ^d (1 + 2·4^d)`, the per-node branching factor
/// before the `β^{-Nd}` scaling.
pub fn branching_factor(d: u32, gamma: f64) -> f64 {
    let di = d as i32;
    let df = d as f64;
    1.0 / (2f64.powi(di) * 4f64.powi(di) * df.sqrt().powi(di)) - 3f64.powi(di) * gamma.powi(di) * (1.0 + 2.0 * 4f64.powi(di))
}

/// `β^{-Nd} / (2^d 4^d √d^d)`, the lower bound on `#D_{(j+1)N}(B)`.
pub fn child_count_lower_bound(d: u32, beta: f64, blocks: u32) -> f64 {
    let di = d as i32;
    let df = d as f64;
    (1.0 / beta).powf(blocks as f64 * df) / (2f64.powi(di) * 4f64.powi(di) * df.sqrt().powi(di))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaffoldParams {
    pub d: u32,
    pub alpha: f64,
    pub beta: f64,
    pub c: f64,
    pub rho: f64,
    pub gamma: f64,
    pub x0: Vec<f64>,
    /// `N = ⌊γ^d / α^d⌋`, kept as a float because it is astronomically
    /// large at feasible `α` in most regimes.
    pub blocks: f64,
    /// Build even when `α^c > (1 - β^{d-c}) / K₂`.
    #[serde(default)]
    pub allow_infeasible: bool,
    pub node_budget: usize,
}

impl ScaffoldParams {
    pub fn new(d: u32, alpha: f64, beta: f64, c: f64, rho: f64, gamma: f64) -> Result<Self, ScaffoldError> {
        let bad = |m: String| Err(ScaffoldError::InvalidParams(m));
        if d == 0 {
            return bad("dimension must be at least 1".into());
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return bad(format!("alpha must lie in (0, 1), got {alpha}"));
        }
        if !(beta > 0.0 && beta <= 0.25) {
            return bad(format!("beta must lie in (0, 1/4], got {beta}"));
        }
        if !(c > 0.0 && c < d as f64) {
            return bad(format!("c must lie in (0, {d}), got {c}"));
        }
        if !(rho > 0.0 && rho.is_finite()) {
            return bad(format!("rho must be positive, got {rho}"));
        }
        if !(gamma > 0.0 && gamma < 1.0) {
            return bad(format!("gamma must lie in (0, 1), got {gamma}"));
        }
        Ok(ScaffoldParams {
            d,
            alpha,
            beta,
            c,
            rho,
            gamma,
            x0: vec![0.0; d as usize],
            blocks: (gamma / alpha).powi(d as i32).floor(),
            allow_infeasible: false,
            node_budget: DEFAULT_NODE_BUDGET,
        })
    }

    /// Parameters with `γ = gamma_for_dimension(d)`.
    pub fn with_default_gamma(d: u32, alpha: f64, beta: f64, c: f64, rho: f64) -> Result<Self, ScaffoldError> {
        Self::new(d, alpha, beta, c, rho, gamma_for_dimension(d.max(1)))
    }

    pub fn with_center(mut self, x0: Vec<f64>) -> Result<Self, ScaffoldError> {
        if x0.len() != self.d as usize {
            return Err(ScaffoldError::InvalidParams(format!(
                "centre has {} coordinates, dimension is {}",
                x0.len(),
                self.d
            )));
        }
        self.x0 = x0;
        Ok(self)
    }

    pub fn allowing_infeasible(mut self) -> Self {
        self.allow_infeasible = true;
        self
    }

    /// `(α^c, (1 - β^{d-c}) / K₂, feasible)` with the global `K₂`.
    pub fn feasibility(&self) -> Result<(f64, f64, bool), ScaffoldError> {
        let b = winning_set_bound(self.alpha, self.beta, self.c, self.d)?;
        Ok((b.lhs, b.rhs, b.feasible))
    }

    fn require_feasible(&self) -> Result<(), ScaffoldError> {
        let (lhs, rhs, ok) = self.feasibility()?;
        if ok || self.allow_infeasible {
            Ok(())
        } else {
            Err(ScaffoldError::Infeasible { lhs, rhs })
        }
    }

    pub fn lattice(&self) -> Result<Lattice, ScaffoldError> {
        let q = (1.0 / self.beta).round();
        if q < 4.0 || (1.0 / q - self.beta).abs() > 1e-12 * self.beta {
            return Err(ScaffoldError::NonLatticeBeta(self.beta));
        }
        if !(self.blocks >= 1.0 && self.blocks <= 64.0) {
            return Err(ScaffoldError::InvalidParams(format!(
                "the lattice builder needs 1 <= N <= 64, got N = {}",
                self.blocks
            )));
        }
        Ok(Lattice {
            d: self.d as usize,
            q: q as i64,
            blocks: self.blocks as u32,
            rho: self.rho,
            x0: self.x0.clone(),
        })
    }
}

/// `M = ⌈β^{-Nd} · branching_factor⌉`, with `ln M` available when `M`
/// does not fit an integer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BranchCount {
    pub factor: f64,
    pub log_m: f64,
    pub exact: Option<u64>,
}

pub fn m_value(params: &ScaffoldParams) -> Result<BranchCount, ScaffoldError> {
    let factor = branching_factor(params.d, params.gamma);
    if !(factor > 0.0) {
        return Err(ScaffoldError::NoBranching(factor));
    }
    let log_raw = params.blocks * params.d as f64 * params.beta.ln().abs() + factor.ln();
    if log_raw < 53.0 * std::f64::consts::LN_2 {
        let raw = (1.0 / params.beta).powf(params.blocks * params.d as f64) * factor;
        let m = raw.ceil().max(1.0) as u64;
        Ok(BranchCount {
            factor,
            log_m: (m as f64).ln(),
            exact: Some(m),
        })
    } else {
        Ok(BranchCount {
            factor,
            log_m: log_raw,
            exact: None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClaimCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub holds: bool,
}

impl ClaimCheck {
    fn new(lhs: f64, rhs: f64) -> Self {
        ClaimCheck {
            lhs,
            rhs,
            margin: rhs - lhs,
            holds: lhs <= rhs,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClaimsReport {
    pub blocks: f64,
    /// `max{γ^{-2d}, 2γ^{-d} ln γ^{-d}}`.
    pub k2_internal: f64,
    pub k2_global: f64,
    pub global_dominates: bool,
    /// `α^c ≤ (1 - β^{d-c}) / K₂(γ)`.
    pub hypothesis: ClaimCheck,
    /// `N α^d ≤ γ^d`.
    pub claim_i: ClaimCheck,
    /// `α^c γ^{-c} Σ_k β^{k(d-c)} ≤ γ^d`.
    pub claim_ii: ClaimCheck,
    /// `β^{N(d-c)} ≤ γ^d`.
    pub claim_iii: ClaimCheck,
}

pub fn k2_internal(d: u32, gamma: f64) -> f64 {
    let gd = gamma.powi(-(d as i32));
    (gd * gd).max(2.0 * gd * gd.ln())
}

pub fn check_claims(params: &ScaffoldParams) -> Result<ClaimsReport, ScaffoldError> {
    let d = params.d;
    let df = d as f64;
    let k2i = k2_internal(d, params.gamma);
    let k2g = constants(d)?.k2;
    let tail = 1.0 - params.beta.powf(df - params.c);
    let gd = params.gamma.powi(d as i32);
    let ac = params.alpha.powf(params.c);
    Ok(ClaimsReport {
        blocks: params.blocks,
        k2_internal: k2i,
        k2_global: k2g,
        // Equal for γ = gamma_for_dimension(d), so allow rounding.
        global_dominates: k2i <= k2g * (1.0 + 1e-12),
        hypothesis: ClaimCheck::new(ac, tail / k2i),
        claim_i: ClaimCheck::new(params.blocks * params.alpha.powi(d as i32), gd),
        claim_ii: ClaimCheck::new(ac * params.gamma.powf(-params.c) / tail, gd),
        claim_iii: ClaimCheck::new((params.blocks * (df - params.c) * params.beta.ln()).exp(), gd),
    })
}

/// The scaffold's dimension `ln M / (N |ln β|)` next to the closed-form
/// bound `d - K₁ α^d / |ln β|` and the same bound with `K₁(1 + 2·4^d)`.
/// Deficits are measured from `d` so that the comparison does not cancel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaffoldDimension {
    pub blocks: f64,
    pub log_m: f64,
    pub scaffold_value: f64,
    pub scaffold_deficit: f64,
    pub literal_bound: f64,
    pub literal_deficit: f64,
    pub corrected_bound: f64,
    pub corrected_deficit: f64,
    pub literal_chain_holds: bool,
    pub corrected_chain_holds: bool,
}

pub fn scaffold_dimension(params: &ScaffoldParams) -> Result<ScaffoldDimension, ScaffoldError> {
    params.require_feasible()?;
    if params.blocks < 1.0 {
        return Err(ScaffoldError::InvalidParams(format!(
            "N = 0 since alpha = {} exceeds gamma = {}",
            params.alpha, params.gamma
        )));
    }
    let d = params.d;
    let df = d as f64;
    let m = m_value(params)?;
    let log_beta = params.beta.ln().abs();
    let scale = params.blocks * log_beta;
    let scaffold_deficit = match m.exact {
        Some(_) => df - m.log_m / scale,
        None => -m.factor.ln() / scale,
    };
    let k1 = constants(d)?.k1;
    let literal_deficit = k1 * params.alpha.powi(d as i32) / log_beta;
    let corrected_deficit = literal_deficit * (1.0 + 2.0 * 4f64.powi(d as i32));
    Ok(ScaffoldDimension {
        blocks: params.blocks,
        log_m: m.log_m,
        scaffold_value: df - scaffold_deficit,
        scaffold_deficit,
        literal_bound: df - literal_deficit,
        literal_deficit,
        corrected_bound: df - corrected_deficit,
        corrected_deficit,
        literal_chain_holds: scaffold_deficit <= literal_deficit,
        corrected_chain_holds: scaffold_deficit <= corrected_deficit,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    E,
    D,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeBall {
    pub level: u32,
    pub index: Vec<i64>,
    pub family: Family,
}

impl LatticeBall {
    pub fn e(level: u32, index: Vec<i64>) -> Self {
        LatticeBall {
            level,
            index,
            family: Family::E,
        }
    }

    pub fn d(level: u32, index: Vec<i64>) -> Self {
        LatticeBall {
            level,
            index,
            family: Family::D,
        }
    }

    /// The index of the same ball in `E_n`.
    pub fn e_index(&self) -> Vec<i64> {
        match self.family {
            Family::E => self.index.clone(),
            Family::D => self.index.iter().map(|w| 6 * w).collect(),
        }
    }
}

fn sq_norm_diff(a: &[i64], b: &[i64], scale: i64) -> i128 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let t = x as i128 - scale as i128 * y as i128;
            t * t
        })
        .sum()
}

/// Every integer vector in the given per-axis inclusive ranges, in
/// lexicographic order.
fn lattice_box(ranges: &[(i64, i64)], budget: usize) -> Result<Vec<Vec<i64>>, ScaffoldError> {
    let mut needed: u128 = 1;
    for &(lo, hi) in ranges {
        needed = needed.saturating_mul((hi - lo + 1).max(0) as u128);
    }
    if needed > budget as u128 {
        return Err(ScaffoldError::NodeBudgetExceeded { needed, budget });
    }
    let mut out = vec![Vec::with_capacity(ranges.len())];
    for &(lo, hi) in ranges {
        out = out
            .into_iter()
            .flat_map(|p| {
                (lo..=hi).map(move |v| {
                    let mut p = p.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    Ok(out)
}

/// The lattice with `β = 1/q` and block length `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    pub d: usize,
    pub q: i64,
    pub blocks: u32,
    pub rho: f64,
    pub x0: Vec<f64>,
}

impl Lattice {
    pub fn radius(&self, level: u32) -> f64 {
        self.rho / (self.q as f64).powi(level as i32)
    }

    pub fn center(&self, ball: &LatticeBall) -> Point {
        let unit = self.radius(ball.level) / 2.0;
        ball.e_index()
            .iter()
            .zip(&self.x0)
            .map(|(&z, x)| x + unit * z as f64)
            .collect()
    }

    pub fn to_ball(&self, ball: &LatticeBall) -> Ball {
        Ball::new(self.center(ball), self.radius(ball.level))
    }

    fn q_pow(&self, k: u32) -> i64 {
        self.q.pow(k)
    }

    /// Whether the level-`n+1` E-ball `inner` lies in the level-`n` E-ball
    /// `outer`: `|z' - q z| ≤ 2(q - 1)` in units of `ρ_{n+1}/2`.
    pub fn e_contains(&self, outer: &[i64], inner: &[i64]) -> bool {
        let r = 2 * (self.q - 1);
        sq_norm_diff(inner, outer, self.q) <= (r as i128) * (r as i128)
    }

    /// Whether the level-`(j+1)N` D-ball `child` lies in the half of the
    /// level-`jN` D-ball `parent`: `|6v - 6Q w| ≤ Q - 2` with `Q = q^N`.
    pub fn inside_half(&self, parent: &[i64], child: &[i64]) -> bool {
        let big_q = self.q_pow(self.blocks);
        let six_child: Vec<i64> = child.iter().map(|v| 6 * v).collect();
        let r = (big_q - 2) as i128;
        sq_norm_diff(&six_child, parent, 6 * big_q) <= r * r
    }

    /// Two E-balls of one level are disjoint when their centres are more
    /// than two radii, i.e. four units, apart.
    pub fn disjoint(&self, a: &LatticeBall, b: &LatticeBall) -> bool {
        a.level != b.level || sq_norm_diff(&a.e_index(), &b.e_index(), 1) > 16
    }

    /// `π_n` of a level-`n+1` ball: the containing D-ball when `n` is a
    /// multiple of `N` and one exists, otherwise the containing E-ball with
    /// the nearest centre, ties going to the lexicographically smallest index.
    pub fn project_pi(&self, ball: &LatticeBall) -> Result<LatticeBall, ScaffoldError> {
        if ball.level == 0 {
            return Err(ScaffoldError::InvalidParams("level-0 balls have no projection".into()));
        }
        let n = ball.level - 1;
        let z = ball.e_index();
        let q = self.q;
        let reach = 2 * (q - 1);
        if n % self.blocks == 0 {
            let ranges: Vec<(i64, i64)> = z
                .iter()
                .map(|&zi| ((zi - reach).div_euclid(6 * q), (zi + reach).div_euclid(6 * q) + 1))
                .collect();
            for w in lattice_box(&ranges, usize::MAX)? {
                let six_w: Vec<i64> = w.iter().map(|x| 6 * x).collect();
                if self.e_contains(&six_w, &z) {
                    return Ok(LatticeBall::d(n, w));
                }
            }
        }
        let nearest: Vec<i64> = z
            .iter()
            .map(|&zi| {
                let base = zi.div_euclid(q);
                let rem = zi.rem_euclid(q);
                if 2 * rem > q {
                    base + 1
                } else {
                    base
                }
            })
            .collect();
        if self.e_contains(&nearest, &z) {
            Ok(LatticeBall::e(n, nearest))
        } else {
            Err(ScaffoldError::NoContainingBall { level: n, index: z })
        }
    }

    /// The balls `π_{jN}(B), …, π_{(j+1)N-1}(B), B` for a level-`(j+1)N`
    /// ball `B`, in increasing level.
    pub fn chain_to_block(&self, ball: &LatticeBall, block: u32) -> Result<Vec<LatticeBall>, ScaffoldError> {
        let stop = block * self.blocks;
        let mut chain = vec![ball.clone()];
        let mut cur = ball.clone();
        while cur.level > stop {
            cur = self.project_pi(&cur)?;
            chain.push(cur.clone());
        }
        chain.reverse();
        Ok(chain)
    }

    /// `D_{(j+1)N}(B)` for the node `B = D_{jN}` ball `w`, in lexicographic
    /// order.
    pub fn children(&self, parent: &[i64], budget: usize) -> Result<Vec<Vec<i64>>, ScaffoldError> {
        let big_q = self.q_pow(self.blocks);
        let half = (big_q - 2).div_euclid(6);
        let ranges: Vec<(i64, i64)> = parent.iter().map(|&w| (big_q * w - half, big_q * w + half)).collect();
        Ok(lattice_box(&ranges, budget)?
            .into_iter()
            .filter(|v| self.inside_half(parent, v))
            .collect())
    }

    /// Level-`n` E-ball indices inside the half of the level-`jN` D-ball
    /// `parent`, for `jN < n`.
    pub fn e_balls_in_half(&self, parent: &[i64], block: u32, level: u32, budget: usize) -> Result<Vec<Vec<i64>>, ScaffoldError> {
        let k = level - block * self.blocks;
        let scale = self.q_pow(k);
        let r = scale - 2;
        let ranges: Vec<(i64, i64)> = parent.iter().map(|&w| (6 * scale * w - r, 6 * scale * w + r)).collect();
        Ok(lattice_box(&ranges, budget)?
            .into_iter()
            .filter(|z| sq_norm_diff(z, parent, 6 * scale) <= (r as i128) * (r as i128))
            .collect())
    }
}

/// Outcome of projecting every E-ball inside the half of a D-ball back to
/// the D-ball's level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectionCheck {
    pub checked: usize,
    pub mismatches: Vec<(u32, Vec<i64>)>,
}

/// Check that `π_{jN}` of every `E_n` ball inside `½B` is `B`, for
/// `jN < n ≤ (j+1)N`.
pub fn check_projection_to_parent(lattice: &Lattice, parent: &[i64], block: u32, budget: usize) -> Result<ProjectionCheck, ScaffoldError> {
    let target = LatticeBall::d(block * lattice.blocks, parent.to_vec());
    let mut report = ProjectionCheck {
        checked: 0,
        mismatches: Vec::new(),
    };
    for level in block * lattice.blocks + 1..=(block + 1) * lattice.blocks {
        for z in lattice.e_balls_in_half(parent, block, level, budget)? {
            let ball = LatticeBall::e(level, z.clone());
            let chain = lattice.chain_to_block(&ball, block)?;
            report.checked += 1;
            if chain[0] != target {
                report.mismatches.push((level, z));
            }
        }
    }
    Ok(report)
}

/// `φ(B)`: the sum of `diam^c` over Alice's sets from turns `n < level(B)`
/// that meet `B`.
pub fn potential_phi(lattice: &Lattice, ball: &LatticeBall, history: &[Turn], c: f64) -> Result<f64, ScaffoldError> {
    let need = ball.level as usize;
    if history.len() < need {
        return Err(ScaffoldError::MissingHistory {
            have: history.len(),
            need,
        });
    }
    let geo = lattice.to_ball(ball);
    Ok(history[..need]
        .iter()
        .flat_map(|t| t.alice.iter())
        .filter(|e| e.shape.meets_closed_ball(&geo))
        .map(|e| e.shape.diam().powf(c))
        .fold(0.0, |acc, t| acc + t))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Candidate {
    pub index: Vec<i64>,
    pub phi: f64,
    pub survivor: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaffoldNode {
    /// A `D_{jN}` ball.
    pub ball: LatticeBall,
    pub block: u32,
    pub phi: f64,
    /// Bob's projected moves and Alice's replies on levels `(j-1)N..jN`.
    pub segment: Vec<Turn>,
    /// Every ball of `D_{(j+1)N}(B)` with its potential; empty at leaves.
    pub candidates: Vec<Candidate>,
    pub children: Vec<ScaffoldNode>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scaffold {
    pub params: ScaffoldParams,
    #[serde(skip)]
    pub lattice: Lattice,
    pub m: u64,
    pub depth: u32,
    pub root: ScaffoldNode,
}

pub fn build_scaffold(params: &ScaffoldParams, alice: &AliceStrategy, depth: u32) -> Result<Scaffold, ScaffoldError> {
    if depth == 0 {
        return Err(ScaffoldError::InvalidParams("depth must be at least 1".into()));
    }
    params.require_feasible()?;
    let lattice = params.lattice()?;
    let count = m_value(params)?;
    let m = match count.exact {
        Some(m) if m as u128 <= params.node_budget as u128 => m,
        _ => {
            return Err(ScaffoldError::NodeBudgetExceeded {
                needed: count.exact.map_or(u128::MAX, u128::from),
                budget: params.node_budget,
            })
        }
    };
    let game = GameParams::new(params.alpha, params.beta, params.c, params.rho, params.d as usize)?;
    let mut root = ScaffoldNode {
        ball: LatticeBall::d(0, vec![0; params.d as usize]),
        block: 0,
        phi: 0.0,
        segment: Vec::new(),
        candidates: Vec::new(),
        children: Vec::new(),
    };
    let builder = Builder {
        params,
        lattice: &lattice,
        alice,
        m,
        depth,
    };
    builder.expand(&mut root, GameState::new(game)?)?;
    Ok(Scaffold {
        params: params.clone(),
        lattice,
        m,
        depth,
        root,
    })
}

struct Builder<'a> {
    params: &'a ScaffoldParams,
    lattice: &'a Lattice,
    alice: &'a AliceStrategy,
    m: u64,
    depth: u32,
}

impl Builder<'_> {
    /// `history` holds the turns on levels below the node's.
    fn expand(&self, node: &mut ScaffoldNode, history: GameState) -> Result<(), ScaffoldError> {
        let lat = self.lattice;
        let block = node.block;
        let child_level = (block + 1) * lat.blocks;
        let threshold = (self.params.gamma * lat.radius(child_level)).powf(self.params.c);
        let mut played: HashMap<(u32, Vec<i64>), GameState> = HashMap::new();
        let mut survivors = Vec::new();
        for v in lat.children(&node.ball.index, self.params.node_budget)? {
            let child = LatticeBall::d(child_level, v.clone());
            let chain = lat.chain_to_block(&child, block)?;
            if chain[0] != node.ball {
                return Err(ScaffoldError::ChainMismatch {
                    block,
                    child: v,
                    parent: node.ball.index.clone(),
                    reached: chain[0].index.clone(),
                });
            }
            let mut state = history.clone();
            for b in &chain[..chain.len() - 1] {
                let key = (b.level, b.e_index());
                if let Some(s) = played.get(&key) {
                    state = s.clone();
                    continue;
                }
                state.record_bob_exact(lat.to_ball(b))?;
                let reply = self.alice.respond(&state);
                state.referee_alice(reply)?;
                played.insert(key, state.clone());
            }
            let phi = potential_phi(lat, &child, &state.turns, self.params.c)?;
            let survivor = phi <= threshold;
            node.candidates.push(Candidate {
                index: v,
                phi,
                survivor,
            });
            if survivor {
                survivors.push((child, phi, state));
            }
        }
        if (survivors.len() as u64) < self.m {
            return Err(ScaffoldError::SurvivorShortfall {
                block,
                index: node.ball.index.clone(),
                found: survivors.len(),
                needed: self.m,
            });
        }
        let from = (block * lat.blocks) as usize;
        for (ball, phi, state) in survivors.into_iter().take(self.m as usize) {
            let mut child = ScaffoldNode {
                ball,
                block: block + 1,
                phi,
                segment: state.turns[from..].to_vec(),
                candidates: Vec::new(),
                children: Vec::new(),
            };
            if block + 1 < self.depth {
                self.expand(&mut child, state)?;
            }
            node.children.push(child);
        }
        Ok(())
    }
}

#[derive(Debug, Serialize)]
struct NodeLine<'a> {
    block: u32,
    level: u32,
    index: &'a [i64],
    parent: Option<&'a [i64]>,
    phi: f64,
    survivor: bool,
    chosen: bool,
}

impl Scaffold {
    /// The nodes along `path` (child positions from the root), root first.
    pub fn descend(&self, path: &[usize]) -> Option<Vec<&ScaffoldNode>> {
        let mut nodes = vec![&self.root];
        for &i in path {
            nodes.push(nodes.last()?.children.get(i)?);
        }
        Some(nodes)
    }

    /// Bob's moves and Alice's replies along `path`.
    pub fn history(&self, path: &[usize]) -> Option<Vec<Turn>> {
        Some(self.descend(path)?.iter().flat_map(|n| n.segment.iter().cloned()).collect())
    }

    /// A point of the deepest ball on `path` lying in none of the sets
    /// Alice erased along it. Tries the centre first, then points along the
    /// first axis.
    pub fn select_point(&self, path: &[usize]) -> Option<Point> {
        let nodes = self.descend(path)?;
        let history = self.history(path)?;
        let ball = self.lattice.to_ball(&nodes.last()?.ball);
        let erased: Vec<_> = history.iter().flat_map(|t| t.alice.iter()).collect();
        let probes = std::iter::once(0.0).chain((1..=64).flat_map(|k| {
            let t = k as f64 / 65.0;
            [t, -t]
        }));
        for t in probes {
            let mut p = ball.center.clone();
            p[0] += t * ball.radius;
            if !erased.iter().any(|e| e.shape.contains_open(&p)) {
                return Some(p);
            }
        }
        None
    }

    pub fn node_count(&self) -> usize {
        fn count(n: &ScaffoldNode) -> usize {
            1 + n.children.iter().map(count).sum::<usize>()
        }
        count(&self.root)
    }

    /// One line per node and per rejected or unused candidate.
    pub fn write_jsonl(&self, mut out: impl Write) -> std::io::Result<()> {
        fn walk(n: &ScaffoldNode, parent: Option<&[i64]>, lat_blocks: u32, out: &mut dyn Write) -> std::io::Result<()> {
            let line = NodeLine {
                block: n.block,
                level: n.ball.level,
                index: &n.ball.index,
                parent,
                phi: n.phi,
                survivor: true,
                chosen: true,
            };
            writeln!(out, "{}", serde_json::to_string(&line).map_err(std::io::Error::other)?)?;
            for c in &n.candidates {
                if n.children.iter().any(|k| k.ball.index == c.index) {
                    continue;
                }
                let line = NodeLine {
                    block: n.block + 1,
                    level: (n.block + 1) * lat_blocks,
                    index: &c.index,
                    parent: Some(&n.ball.index),
                    phi: c.phi,
                    survivor: c.survivor,
                    chosen: false,
                };
                writeln!(out, "{}", serde_json::to_string(&line).map_err(std::io::Error::other)?)?;
            }
            for k in &n.children {
                walk(k, Some(&n.ball.index), lat_blocks, out)?;
            }
            Ok(())
        }
        walk(&self.root, None, self.lattice.blocks, &mut out)
    }
}
