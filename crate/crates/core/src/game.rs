//! Referee and strategies for the (α, β, c, ρ)-game.
//!
//! Bob plays nested closed balls `B_m = B[x_m, ρ_m]` with `ρ_0 ≥ ρ` and
//! `ρ_m ≥ β ρ_{m-1}`; after each of Bob's moves Alice erases open sets `A_{i,m}`
//! with `Σ diam(A_{i,m})^c ≤ (α ρ_m)^c` (a single set of diameter at most
//! `α ρ_m` when `c = 0`). Alice wins if the limit point lies in the target set
//! or in an erased set. Matches here stop once the radius drops below a
//! threshold and report where the final centre stands.

use std::io::{BufRead, Write};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::descriptor::SetDescriptor;
use crate::enumerate::{enumerate_gaps, EnumerateError, EnumerateOptions, GapEnumeration};
use crate::geometry::{distance, AxisBox, Ball, Point, Shape};
use crate::spatial::BoxTree;
use crate::thickness::thickness_rd;

/// Relative slack on budget comparisons, absorbing the rounding of `x^c`.
pub const BUDGET_SLACK: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GameError {
    #[error("invalid game parameters: {0}")]
    InvalidParams(String),
    #[error("illegal radius {radius} at turn {turn} (minimum {minimum})")]
    IllegalRadius { turn: usize, radius: f64, minimum: f64 },
    #[error("ball at turn {turn} is not inside the previous ball")]
    NotNested { turn: usize },
    #[error("erasure budget exceeded at turn {turn}: used {used}, allowed {allowed}")]
    BudgetExceeded { turn: usize, used: f64, allowed: f64 },
    #[error("with c = 0 Alice may erase one set, got {0}")]
    MultipleSetsAtCZero(usize),
    #[error("move played out of turn")]
    OutOfTurn,
    #[error("component budgets sum to {sum} > {allowed}")]
    ExponentBudgetExceeded { sum: f64, allowed: f64 },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error(transparent)]
    Enumerate(#[from] EnumerateError),
    #[error("malformed transcript: {0}")]
    Transcript(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameParams {
    pub alpha: f64,
    pub beta: f64,
    pub c: f64,
    pub rho: f64,
    pub d: usize,
}

impl GameParams {
    pub fn new(alpha: f64, beta: f64, c: f64, rho: f64, d: usize) -> Result<Self, GameError> {
        let p = GameParams { alpha, beta, c, rho, d };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), GameError> {
        let bad = |m: &str| Err(GameError::InvalidParams(m.to_string()));
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad("alpha must be positive");
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return bad("beta must lie in (0, 1)");
        }
        if !(self.c >= 0.0 && self.c.is_finite()) {
            return bad("c must be non-negative");
        }
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return bad("rho must be positive");
        }
        if self.d == 0 {
            return bad("dimension must be positive");
        }
        Ok(())
    }

    /// The erasure allowance `(α ρ_m)^c`, or `α ρ_m` itself when `c = 0`.
    pub fn allowance(&self, radius: f64) -> f64 {
        if self.c == 0.0 {
            self.alpha * radius
        } else {
            (self.alpha * radius).powf(self.c)
        }
    }
}

/// Which strategy erased a set, and which gap it was.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Source {
    pub strategy: u32,
    pub gap: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Erased {
    pub shape: Shape,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<Source>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Turn {
    pub bob: Ball,
    pub alice: Vec<Erased>,
    /// `Σ diam^c` of Alice's sets (their largest diameter when `c = 0`).
    pub budget_used: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Status {
    InProgress,
    Finished { outcome: Point },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GameState {
    pub params: GameParams,
    pub turns: Vec<Turn>,
    pub status: Status,
    awaiting_alice: bool,
}

impl GameState {
    pub fn new(params: GameParams) -> Result<Self, GameError> {
        params.validate()?;
        Ok(GameState {
            params,
            turns: Vec::new(),
            status: Status::InProgress,
            awaiting_alice: false,
        })
    }

    pub fn current_ball(&self) -> Option<&Ball> {
        self.turns.last().map(|t| &t.bob)
    }

    pub fn awaiting_alice(&self) -> bool {
        self.awaiting_alice
    }

    /// Every set erased so far.
    pub fn erased(&self) -> impl Iterator<Item = &Erased> {
        self.turns.iter().flat_map(|t| t.alice.iter())
    }

    pub fn referee_bob(&mut self, ball: Ball) -> Result<(), GameError> {
        if self.awaiting_alice || self.status != Status::InProgress {
            return Err(GameError::OutOfTurn);
        }
        if ball.center.len() != self.params.d {
            return Err(GameError::DimensionMismatch(self.params.d, ball.center.len()));
        }
        let turn = self.turns.len();
        match self.current_ball() {
            None => {
                if !(ball.radius >= self.params.rho) {
                    return Err(GameError::IllegalRadius {
                        turn,
                        radius: ball.radius,
                        minimum: self.params.rho,
                    });
                }
            }
            Some(prev) => {
                let minimum = self.params.beta * prev.radius;
                if !(ball.radius >= minimum) {
                    return Err(GameError::IllegalRadius {
                        turn,
                        radius: ball.radius,
                        minimum,
                    });
                }
                if !(distance(&ball.center, &prev.center) <= prev.radius - ball.radius) {
                    return Err(GameError::NotNested { turn });
                }
            }
        }
        self.turns.push(Turn {
            bob: ball,
            alice: Vec::new(),
            budget_used: 0.0,
        });
        self.awaiting_alice = true;
        Ok(())
    }

    /// Record a Bob move whose legality was already established in exact
    /// arithmetic, so that rounding in the centre cannot reject it.
    pub(crate) fn record_bob_exact(&mut self, ball: Ball) -> Result<(), GameError> {
        if self.awaiting_alice || self.status != Status::InProgress {
            return Err(GameError::OutOfTurn);
        }
        if ball.center.len() != self.params.d {
            return Err(GameError::DimensionMismatch(self.params.d, ball.center.len()));
        }
        self.turns.push(Turn {
            bob: ball,
            alice: Vec::new(),
            budget_used: 0.0,
        });
        self.awaiting_alice = true;
        Ok(())
    }

    pub fn referee_alice(&mut self, erased: Vec<Erased>) -> Result<(), GameError> {
        if !self.awaiting_alice {
            return Err(GameError::OutOfTurn);
        }
        let turn = self.turns.len() - 1;
        let radius = self.turns[turn].bob.radius;
        let allowed = self.params.allowance(radius);
        let used = if self.params.c == 0.0 {
            if erased.len() > 1 {
                return Err(GameError::MultipleSetsAtCZero(erased.len()));
            }
            erased.first().map_or(0.0, |e| e.shape.diam())
        } else {
            erased.iter().map(|e| e.shape.diam().powf(self.params.c)).fold(0.0, |acc, t| acc + t)
        };
        if used > allowed * (1.0 + BUDGET_SLACK) {
            return Err(GameError::BudgetExceeded { turn, used, allowed });
        }
        if let Some(e) = erased.iter().find(|e| e.shape.dim() != self.params.d) {
            return Err(GameError::DimensionMismatch(self.params.d, e.shape.dim()));
        }
        self.turns[turn].alice = erased;
        self.turns[turn].budget_used = used;
        self.awaiting_alice = false;
        Ok(())
    }

    pub fn finish(&mut self) {
        if let Some(b) = self.current_ball() {
            self.status = Status::Finished {
                outcome: b.center.clone(),
            };
        }
    }

    /// Re-referee a transcript under (possibly different) parameters.
    pub fn replay(params: GameParams, turns: &[Turn]) -> Result<GameState, GameError> {
        let mut state = GameState::new(params)?;
        for t in turns {
            state.referee_bob(t.bob.clone())?;
            state.referee_alice(t.alice.clone())?;
        }
        Ok(state)
    }

    /// One JSON object per line: the parameters, then one line per turn.
    pub fn write_jsonl(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "{}", serde_json::json!({ "params": self.params }))?;
        for (m, t) in self.turns.iter().enumerate() {
            let line = serde_json::json!({
                "turn": m,
                "bob": t.bob,
                "alice": t.alice,
                "budget_used": t.budget_used,
            });
            writeln!(out, "{line}")?;
        }
        Ok(())
    }

    /// Read a transcript written by [`GameState::write_jsonl`] and replay it.
    pub fn read_jsonl(input: impl BufRead) -> Result<GameState, GameError> {
        let bad = |e: String| GameError::Transcript(e);
        let mut lines = input.lines();
        let first = lines
            .next()
            .ok_or_else(|| bad("empty transcript".into()))?
            .map_err(|e| bad(e.to_string()))?;
        let head: serde_json::Value = serde_json::from_str(&first).map_err(|e| bad(e.to_string()))?;
        let params: GameParams =
            serde_json::from_value(head["params"].clone()).map_err(|e| bad(e.to_string()))?;
        let mut turns = Vec::new();
        for line in lines {
            let line = line.map_err(|e| bad(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let v: serde_json::Value = serde_json::from_str(&line).map_err(|e| bad(e.to_string()))?;
            turns.push(Turn {
                bob: serde_json::from_value(v["bob"].clone()).map_err(|e| bad(e.to_string()))?,
                alice: serde_json::from_value(v["alice"].clone()).map_err(|e| bad(e.to_string()))?,
                budget_used: 0.0,
            });
        }
        GameState::replay(params, &turns)
    }
}

/// The gaps of a set, indexed for ball queries, with each gap's separation
/// from the earlier gaps and the unbounded one.
pub struct GapTable {
    pub enumeration: GapEnumeration,
    pub separations: Vec<f64>,
    pub thickness: f64,
    tree: BoxTree,
}

impl GapTable {
    pub fn new(desc: &SetDescriptor, opts: &EnumerateOptions) -> Result<Self, GameError> {
        Ok(Self::from_enumeration(enumerate_gaps(desc, opts)?))
    }

    pub fn from_enumeration(enumeration: GapEnumeration) -> Self {
        let report = thickness_rd(&enumeration);
        let separations: Vec<f64> = report.ratios.iter().map(|r| r.separation).collect();
        let tree = BoxTree::with_weights(
            enumeration.gaps.iter().map(|g| g.shape.bounding_box()).collect(),
            separations.clone(),
        );
        GapTable {
            thickness: report.value,
            enumeration,
            separations,
            tree,
        }
    }

    pub fn gap(&self, i: usize) -> &Shape {
        &self.enumeration.gaps[i].shape
    }

    pub fn meeting_ball(&self, ball: &Ball) -> Vec<usize> {
        self.tree.meeting_ball(ball, |i| self.gap(i))
    }

    /// The `k` largest gaps meeting the ball that pass `keep`.
    pub fn largest_meeting_ball(&self, ball: &Ball, k: usize, keep: impl Fn(usize) -> bool) -> Vec<usize> {
        self.tree.first_meeting_ball(ball, f64::NEG_INFINITY, k, |i| self.gap(i), keep)
    }

    /// The first gap meeting the ball whose separation exceeds the ball's
    /// diameter.
    pub fn separated_gap_meeting(&self, ball: &Ball) -> Option<usize> {
        self.tree
            .first_meeting_ball(ball, ball.diam(), 1, |i| self.gap(i), |_| true)
            .first()
            .copied()
    }

    pub fn containing(&self, p: &[f64]) -> Vec<usize> {
        self.tree.containing(p, |i| self.gap(i))
    }

    /// Upper bound on the distance from `p` to `C ∪ E`: zero outside every
    /// gap of a complete enumeration, half the truncation bound outside the
    /// listed gaps otherwise, and the distance to the gap's boundary inside one.
    pub fn distance_to_target(&self, p: &[f64]) -> f64 {
        match self.containing(p).first() {
            Some(&i) => distance_to_boundary(self.gap(i), p),
            None if self.enumeration.is_complete() => 0.0,
            None => self.enumeration.tail_bound / 2.0,
        }
    }
}

fn distance_to_boundary(s: &Shape, p: &[f64]) -> f64 {
    match s {
        Shape::Box(b) => (0..p.len())
            .map(|i| (p[i] - b.lower[i]).min(b.upper[i] - p[i]))
            .fold(f64::INFINITY, f64::min)
            .max(0.0),
        Shape::Ball(b) => (b.radius - distance(p, &b.center)).max(0.0),
        Shape::Cells(cells) => cells
            .iter()
            .map(|c| distance_to_boundary(&Shape::Box(c.clone()), p))
            .fold(0.0, f64::max),
    }
}

/// Erase the unique gap that Bob's ball meets while being smaller than the
/// gap's separation from everything earlier, whenever that is legal.
pub struct ThicknessStrategy {
    pub id: u32,
    pub alpha: f64,
    pub table: Arc<GapTable>,
}

impl ThicknessStrategy {
    pub fn new(id: u32, alpha: f64, table: Arc<GapTable>) -> Self {
        ThicknessStrategy { id, alpha, table }
    }

    /// The gap the proof's rule selects for this ball, before legality.
    pub fn trigger(&self, ball: &Ball) -> Option<usize> {
        self.table.separated_gap_meeting(ball)
    }

    fn respond(&self, state: &GameState) -> Vec<Erased> {
        let Some(ball) = state.current_ball() else {
            return Vec::new();
        };
        let Some(n) = self.trigger(ball) else {
            return Vec::new();
        };
        let already = state
            .erased()
            .any(|e| e.source == Some(Source { strategy: self.id, gap: n }));
        let gap = self.table.gap(n);
        if already || gap.diam() > self.alpha * ball.radius * (1.0 + BUDGET_SLACK) {
            return Vec::new();
        }
        vec![Erased {
            shape: gap.clone(),
            source: Some(Source { strategy: self.id, gap: n }),
        }]
    }
}

pub enum AliceStrategy {
    Pass,
    Thickness(ThicknessStrategy),
    /// Components played simultaneously, each within its own `α_j`.
    Union(Vec<AliceStrategy>),
    /// The base strategy transported by `x ↦ factor·x + offset`.
    Conjugate {
        inner: Box<AliceStrategy>,
        factor: f64,
        offset: Vec<f64>,
    },
}

impl AliceStrategy {
    pub fn respond(&self, state: &GameState) -> Vec<Erased> {
        match self {
            AliceStrategy::Pass => Vec::new(),
            AliceStrategy::Thickness(t) => t.respond(state),
            AliceStrategy::Union(parts) => parts.iter().flat_map(|p| p.respond(state)).collect(),
            AliceStrategy::Conjugate { inner, factor, offset } => {
                let pulled = pull_back(state, *factor, offset);
                inner
                    .respond(&pulled)
                    .into_iter()
                    .map(|e| Erased {
                        shape: e.shape.map_similarity(*factor, offset),
                        source: e.source,
                    })
                    .collect()
            }
        }
    }
}

/// The state seen through `f^{-1}` for `f(x) = factor·x + offset`.
fn pull_back(state: &GameState, factor: f64, offset: &[f64]) -> GameState {
    let inv_offset: Vec<f64> = offset.iter().map(|t| -t / factor).collect();
    let inv = 1.0 / factor;
    let turns = state
        .turns
        .iter()
        .map(|t| Turn {
            bob: Ball::new(
                t.bob.center.iter().zip(&inv_offset).map(|(x, t)| inv * x + t).collect(),
                t.bob.radius * inv,
            ),
            alice: t
                .alice
                .iter()
                .map(|e| Erased {
                    shape: e.shape.map_similarity(inv, &inv_offset),
                    source: e.source,
                })
                .collect(),
            budget_used: t.budget_used,
        })
        .collect();
    GameState {
        params: GameParams {
            rho: state.params.rho * inv,
            ..state.params
        },
        turns,
        status: state.status.clone(),
        awaiting_alice: state.awaiting_alice,
    }
}

/// Combine strategies with budgets `α_j` into one for the ambient game,
/// which needs `Σ α_j^c ≤ α^c` and `c > 0`.
pub fn union_strategy(parts: Vec<(AliceStrategy, f64)>, ambient: &GameParams) -> Result<AliceStrategy, GameError> {
    if parts.is_empty() {
        return Ok(AliceStrategy::Pass);
    }
    if ambient.c <= 0.0 {
        return Err(GameError::InvalidParams("a union of strategies needs c > 0".into()));
    }
    let sum: f64 = parts.iter().map(|(_, a)| a.powf(ambient.c)).sum();
    let allowed = ambient.alpha.powf(ambient.c);
    if sum > allowed * (1.0 + BUDGET_SLACK) {
        return Err(GameError::ExponentBudgetExceeded { sum, allowed });
    }
    let mut parts: Vec<AliceStrategy> = parts.into_iter().map(|(s, _)| s).collect();
    if parts.len() == 1 {
        return Ok(parts.pop().expect("one part"));
    }
    Ok(AliceStrategy::Union(parts))
}

pub fn conjugate_strategy(inner: AliceStrategy, factor: f64, offset: Vec<f64>) -> Result<AliceStrategy, GameError> {
    if !(factor > 0.0 && factor.is_finite()) {
        return Err(GameError::InvalidParams("similarity ratio must be positive".into()));
    }
    Ok(AliceStrategy::Conjugate {
        inner: Box::new(inner),
        factor,
        offset,
    })
}

/// Fraction of the allowed displacement the built-in policies use, so that
/// nesting survives rounding.
const NEST_MARGIN: f64 = 1.0 - 1e-9;

pub enum BobPolicy {
    /// Shrink by `β` around a fixed centre.
    ConcentricShrink { target: Point },
    /// Head for one of the largest unerased gaps meeting the current ball.
    GapChaser { table: Arc<GapTable>, start: Point, rng: ChaCha8Rng },
    /// Random legal moves.
    RandomLegal { start: Point, rng: ChaCha8Rng },
}

impl BobPolicy {
    pub fn gap_chaser(table: Arc<GapTable>, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let hull = table.enumeration.hull.bounding_box();
        let start = random_point_in_box(&mut rng, &hull);
        BobPolicy::GapChaser { table, start, rng }
    }

    pub fn random_legal(start: Point, seed: u64) -> Self {
        BobPolicy::RandomLegal {
            start,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn next(&mut self, state: &GameState) -> Ball {
        let p = &state.params;
        let prev = state.current_ball().cloned();
        match self {
            BobPolicy::ConcentricShrink { target } => match prev {
                None => Ball::new(target.clone(), p.rho),
                Some(b) => Ball::new(b.center, p.beta * b.radius),
            },
            BobPolicy::GapChaser { table, start, rng } => {
                let Some(b) = prev else {
                    return Ball::new(start.clone(), p.rho);
                };
                let radius = p.beta * b.radius;
                let erased: Vec<&Shape> = state.erased().map(|e| &e.shape).collect();
                let open = table.largest_meeting_ball(&b, 3, |i| !erased.contains(&table.gap(i)));
                let aim = if open.is_empty() {
                    b.center.clone()
                } else {
                    let g = table.gap(open[rng.gen_range(0..open.len())]);
                    closest_point_in(g, &b.center, rng)
                };
                Ball::new(step_towards(&b, radius, &aim), radius)
            }
            BobPolicy::RandomLegal { start, rng } => {
                let Some(b) = prev else {
                    return Ball::new(start.clone(), p.rho);
                };
                let ratio = rng.gen_range(p.beta..=(1.0 + p.beta) / 2.0);
                let radius = (ratio * b.radius).max(p.beta * b.radius);
                let reach = (b.radius - radius) * NEST_MARGIN;
                let dir = random_in_unit_ball(rng, b.center.len());
                let centre = b.center.iter().zip(&dir).map(|(c, u)| c + reach * u).collect();
                Ball::new(centre, radius)
            }
        }
    }
}

fn random_point_in_box(rng: &mut ChaCha8Rng, b: &AxisBox) -> Point {
    (0..b.dim()).map(|i| rng.gen_range(b.lower[i]..=b.upper[i])).collect()
}

fn random_in_unit_ball(rng: &mut ChaCha8Rng, d: usize) -> Point {
    loop {
        let v: Point = (0..d).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        if v.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
            return v;
        }
    }
}

/// A point of the gap near `from`, jittered towards its interior.
fn closest_point_in(g: &Shape, from: &[f64], rng: &mut ChaCha8Rng) -> Point {
    let centre = g.center();
    let t: f64 = rng.gen_range(0.0..=1.0);
    match g {
        Shape::Box(b) => {
            let clamped: Point = from
                .iter()
                .enumerate()
                .map(|(i, x)| x.clamp(b.lower[i], b.upper[i]))
                .collect();
            clamped.iter().zip(&centre).map(|(a, c)| a + t * (c - a)).collect()
        }
        _ => centre,
    }
}

/// Centre of the largest legal move from `b` towards `aim` with the new radius.
fn step_towards(b: &Ball, radius: f64, aim: &[f64]) -> Point {
    let reach = (b.radius - radius) * NEST_MARGIN;
    let dist = distance(&b.center, aim);
    if dist <= reach {
        return aim.to_vec();
    }
    let s = reach / dist;
    b.center.iter().zip(aim).map(|(c, a)| c + s * (a - c)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    /// The outcome lies in a set Alice erased.
    Erased { turn: usize },
    /// Within `distance` of the target set, with `distance ≤ ρ_final`.
    InS { distance: f64 },
    NotInS { distance: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchResult {
    pub outcome: Point,
    pub final_radius: f64,
    pub verdict: Verdict,
}

/// Play until Bob's radius drops below `stop_radius`, then classify the
/// final centre against the erased sets and the target set `C ∪ E`.
pub fn play_match(params: GameParams, alice: &AliceStrategy, bob: &mut BobPolicy, target: &GapTable, stop_radius: f64) -> Result<(GameState, MatchResult), GameError> {
    if !(stop_radius > 0.0) {
        return Err(GameError::InvalidParams("stop radius must be positive".into()));
    }
    let mut state = GameState::new(params)?;
    loop {
        let ball = bob.next(&state);
        state.referee_bob(ball)?;
        let moves = alice.respond(&state);
        state.referee_alice(moves)?;
        if state.current_ball().expect("just played").radius < stop_radius {
            break;
        }
    }
    state.finish();
    let last = state.current_ball().expect("at least one turn").clone();
    let outcome = last.center.clone();
    let erased_at = state
        .turns
        .iter()
        .position(|t| t.alice.iter().any(|e| e.shape.contains_open(&outcome)));
    let verdict = match erased_at {
        Some(turn) => Verdict::Erased { turn },
        None => {
            let distance = target.distance_to_target(&outcome);
            if distance <= last.radius {
                Verdict::InS { distance }
            } else {
                Verdict::NotInS { distance }
            }
        }
    };
    Ok((
        state,
        MatchResult {
            outcome,
            final_radius: last.radius,
            verdict,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::AxisBox;

    fn params(alpha: f64, c: f64) -> GameParams {
        GameParams::new(alpha, 0.25, c, 1.0, 1).unwrap()
    }

    fn interval(a: f64, b: f64) -> Erased {
        Erased {
            shape: Shape::Box(AxisBox::new(vec![a], vec![b])),
            source: None,
        }
    }

    #[test]
    fn bob_legality() {
        let mut s = GameState::new(params(1.0, 0.0)).unwrap();
        assert!(matches!(
            s.referee_bob(Ball::new(vec![0.0], 0.5)),
            Err(GameError::IllegalRadius { .. })
        ));
        s.referee_bob(Ball::new(vec![0.0], 1.0)).unwrap();
        s.referee_alice(vec![]).unwrap();
        assert_eq!(
            s.clone().referee_bob(Ball::new(vec![1.0], 0.25)),
            Err(GameError::NotNested { turn: 1 })
        );
        s.referee_bob(Ball::new(vec![0.0], 0.25)).unwrap();
    }

    #[test]
    fn alice_budget() {
        let mut s = GameState::new(params(0.5, 0.0)).unwrap();
        s.referee_bob(Ball::new(vec![0.0], 1.0)).unwrap();
        assert_eq!(
            s.clone().referee_alice(vec![interval(0.0, 0.1), interval(0.2, 0.3)]),
            Err(GameError::MultipleSetsAtCZero(2))
        );
        s.referee_alice(vec![interval(0.0, 0.5)]).unwrap();

        let mut s = GameState::new(params(0.5, 1.0)).unwrap();
        s.referee_bob(Ball::new(vec![0.0], 1.0)).unwrap();
        assert!(matches!(
            s.clone().referee_alice(vec![interval(0.0, 0.3), interval(0.4, 0.7)]),
            Err(GameError::BudgetExceeded { .. })
        ));
        s.referee_alice(vec![interval(0.0, 0.25), interval(0.4, 0.65)]).unwrap();
    }

    fn thirds_table() -> Arc<GapTable> {
        Arc::new(GapTable::new(&SetDescriptor::middle_thirds(), &EnumerateOptions::depth(12)).unwrap())
    }

    #[test]
    fn thickness_move_erases_top_gap() {
        let table = thirds_table();
        let beta = 0.25;
        let alpha = 1.0 / (table.thickness * beta);
        let p = GameParams::new(alpha, beta, 0.0, beta / 2.0, 1).unwrap();
        let alice = AliceStrategy::Thickness(ThicknessStrategy::new(0, alpha, table.clone()));
        let mut s = GameState::new(p).unwrap();
        // Separation of the top gap from the unbounded one is 1/3.
        s.referee_bob(Ball::new(vec![0.5], 0.15)).unwrap();
        let mv = alice.respond(&s);
        assert_eq!(mv.len(), 1);
        assert_eq!(mv[0].source.unwrap().gap, 0);
        assert!(mv[0].shape.diam() <= 2.0 * 0.15 / (table.thickness * beta) + 1e-15);

        let mut s = GameState::new(GameParams { rho: 0.2, ..p }).unwrap();
        s.referee_bob(Ball::new(vec![0.5], 0.2)).unwrap();
        assert!(alice.respond(&s).is_empty());

        let mut s = GameState::new(GameParams { rho: 0.01, ..p }).unwrap();
        s.referee_bob(Ball::new(vec![-0.5], 0.01)).unwrap();
        assert!(alice.respond(&s).is_empty());
    }

    #[test]
    fn concentric_shrink_on_the_set() {
        let table = thirds_table();
        let p = GameParams::new(4.0, 0.25, 0.0, 0.125, 1).unwrap();
        let alice = AliceStrategy::Thickness(ThicknessStrategy::new(0, 4.0, table.clone()));
        let mut bob = BobPolicy::ConcentricShrink { target: vec![0.25] };
        let (_, r) = play_match(p, &alice, &mut bob, &table, 1e-6).unwrap();
        assert!(matches!(r.verdict, Verdict::InS { .. }));
    }

    #[test]
    fn passing_loses_to_a_gap() {
        let table = thirds_table();
        let p = GameParams::new(4.0, 0.25, 0.0, 0.125, 1).unwrap();
        let mut bob = BobPolicy::ConcentricShrink { target: vec![0.5] };
        let (_, r) = play_match(p, &AliceStrategy::Pass, &mut bob, &table, 1e-6).unwrap();
        assert!(matches!(r.verdict, Verdict::NotInS { .. }));
    }

    #[test]
    fn union_rules() {
        let p = params(1.0, 1.0);
        assert!(matches!(union_strategy(vec![], &p), Ok(AliceStrategy::Pass)));
        let too_much = union_strategy(vec![(AliceStrategy::Pass, 0.8), (AliceStrategy::Pass, 0.8)], &p);
        assert!(matches!(too_much, Err(GameError::ExponentBudgetExceeded { .. })));
        assert!(union_strategy(vec![(AliceStrategy::Pass, 0.5)], &params(1.0, 0.0)).is_err());
    }

    #[test]
    fn transcript_roundtrip() {
        let table = thirds_table();
        let p = GameParams::new(4.0, 0.25, 0.0, 0.125, 1).unwrap();
        let alice = AliceStrategy::Thickness(ThicknessStrategy::new(0, 4.0, table.clone()));
        let mut bob = BobPolicy::gap_chaser(table.clone(), 7);
        let (state, _) = play_match(p, &alice, &mut bob, &table, 1e-6).unwrap();
        let mut buf = Vec::new();
        state.write_jsonl(&mut buf).unwrap();
        let back = GameState::read_jsonl(&buf[..]).unwrap();
        assert_eq!(back.turns.len(), state.turns.len());
        assert_eq!(back.turns.iter().map(|t| &t.bob).collect::<Vec<_>>(), state.turns.iter().map(|t| &t.bob).collect::<Vec<_>>());
    }
}
