//! Thickness of a gap-represented compact set.
//!
//! Each bounded gap `G_n`, taken in non-increasing diameter order, is scored
//! by `dist(G_n, earlier gaps ∪ E) / diam(G_n)`, where `E` is the unbounded
//! gap. The thickness is the infimum of the scores. On the line this is the
//! classical bridge-over-gap ratio, computed separately by [`thickness_1d`].

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::descriptor::SetDescriptor;
use crate::enumerate::{
    cantor_generation_diam, enumerate_gaps, gaps_near, generation_diam, lex_rank,
    sponge_generation_diam, sponge_cell_box, sponge_gap_box,
    CellGap, EnumerateError, EnumerateOptions, Gap, GapEnumeration,
};
use crate::geometry::{norm, AxisBox, Hull, Point, Shape};
use crate::spatial::ShapeIndex;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ThicknessError {
    #[error(transparent)]
    Enumerate(#[from] EnumerateError),
    #[error("expected a set in dimension {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("gap {0} is not convex; line sections need convex gaps")]
    NonConvexGap(usize),
    #[error("the line meets the hull in at most one point")]
    LineMissesSet,
    #[error("line direction must be a non-zero vector of the set's dimension")]
    BadDirection,
    #[error("branch-and-bound thickness needs a sponge or central Cantor descriptor")]
    NotGenerative,
}

/// What the nearest obstacle of a gap is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Nearest {
    External,
    Gap(usize),
    /// No obstacle inside the search radius (the ratio is at least the bound).
    Beyond,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapRatio {
    pub index: usize,
    pub separation: f64,
    pub diam: f64,
    pub ratio: f64,
    pub nearest: Nearest,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Truncation {
    Exact,
    Truncated {
        depth: u32,
        certified_lower: f64,
        upper: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThicknessReport {
    /// Thickness of the enumerated gaps: exact when complete, otherwise the
    /// upper end of the certified bracket.
    pub value: f64,
    pub argmin: Option<usize>,
    pub ratios: Vec<GapRatio>,
    pub truncation: Truncation,
}

impl ThicknessReport {
    pub fn certified_lower(&self) -> f64 {
        match self.truncation {
            Truncation::Exact => self.value,
            Truncation::Truncated { certified_lower, .. } => certified_lower,
        }
    }

    /// Whether the reported value is the thickness of the full set.
    pub fn is_certified(&self) -> bool {
        match self.truncation {
            Truncation::Exact => true,
            Truncation::Truncated {
                certified_lower,
                upper,
                ..
            } => certified_lower >= upper,
        }
    }
}

fn degenerate_value(hull: &Hull) -> f64 {
    if hull.has_interior() {
        f64::INFINITY
    } else {
        0.0
    }
}

/// Thickness in ℝᵈ of an enumeration, using a bounding-volume hierarchy for
/// the nearest earlier gap.
pub fn thickness_rd(en: &GapEnumeration) -> ThicknessReport {
    let index = ShapeIndex::new(en.gaps.iter().map(|g| &g.shape));
    let mut ratios = Vec::with_capacity(en.gaps.len());
    for (n, gap) in en.gaps.iter().enumerate() {
        let external = en.hull.distance_to_exterior(&gap.shape);
        let (separation, nearest) = match index.nearest_before(&gap.shape, n, external) {
            Some((d, i)) => (d, Nearest::Gap(i)),
            None => (external, Nearest::External),
        };
        ratios.push(GapRatio {
            index: n,
            separation,
            diam: gap.diam,
            ratio: separation / gap.diam,
            nearest,
        });
    }
    finish(en, ratios)
}

/// Lower bound on the scores of gaps that were not enumerated.
fn tail_lower_bound(en: &GapEnumeration, source: Option<&SetDescriptor>) -> f64 {
    let Some(desc) = source else { return 0.0 };
    let (core, _, _) = desc.peel();
    match core {
        SetDescriptor::CentralCantor1D { keep_ratio, .. } => central_cantor_thickness(*keep_ratio),
        SetDescriptor::Sponge { grid, .. } => {
            let depth = en.truncated_at.unwrap_or(0);
            if grid.iter().all(|n| *n == grid[0]) {
                sponge_generation_lower_bound(grid, depth + 1)
            } else {
                // The generation bounds tend to zero when the counts differ.
                0.0
            }
        }
        _ => 0.0,
    }
}

fn finish(en: &GapEnumeration, ratios: Vec<GapRatio>) -> ThicknessReport {
    finish_with_source(en, ratios, None)
}

fn finish_with_source(
    en: &GapEnumeration,
    ratios: Vec<GapRatio>,
    source: Option<&SetDescriptor>,
) -> ThicknessReport {
    let mut value = degenerate_value(&en.hull);
    let mut argmin = None;
    if !ratios.is_empty() {
        value = f64::INFINITY;
        for r in &ratios {
            if r.ratio < value {
                value = r.ratio;
                argmin = Some(r.index);
            }
        }
    }
    let truncation = match en.truncated_at {
        None => Truncation::Exact,
        Some(depth) => {
            let upper = value;
            let lower = upper.min(tail_lower_bound(en, source));
            Truncation::Truncated {
                depth,
                certified_lower: lower,
                upper,
            }
        }
    };
    ThicknessReport {
        value,
        argmin,
        ratios,
        truncation,
    }
}

/// Thickness of a descriptor: enumerate, score, and certify the truncation.
pub fn thickness(desc: &SetDescriptor, opts: &EnumerateOptions) -> Result<ThicknessReport, ThicknessError> {
    let en = enumerate_gaps(desc, opts)?;
    let mut report = thickness_rd(&en);
    if en.truncated_at.is_some() {
        report = finish_with_source(&en, std::mem::take(&mut report.ratios), Some(desc));
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Key(f64);

impl Eq for Key {}
impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Key {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Thickness on the line via bridges: each gap is compared with the two
/// pieces of the component it splits.
pub fn thickness_1d(en: &GapEnumeration) -> Result<ThicknessReport, ThicknessError> {
    if en.dim != 1 {
        return Err(ThicknessError::DimensionMismatch {
            expected: 1,
            found: en.dim,
        });
    }
    let hull = en.hull.bounding_box();
    let (left_end, right_end) = (hull.lower[0], hull.upper[0]);
    let mut placed: BTreeMap<Key, (f64, usize)> = BTreeMap::new();
    let mut ratios = Vec::with_capacity(en.gaps.len());
    for (n, gap) in en.gaps.iter().enumerate() {
        let b = gap.shape.bounding_box();
        let (lo, hi) = (b.lower[0], b.upper[0]);
        let (left, left_owner) = match placed.range(..Key(lo)).next_back() {
            Some((_, &(phi, i))) => (lo - phi, Nearest::Gap(i)),
            None => (lo - left_end, Nearest::External),
        };
        let (right, right_owner) = match placed.range(Key(hi)..).next() {
            Some((k, &(_, i))) => (k.0 - hi, Nearest::Gap(i)),
            None => (right_end - hi, Nearest::External),
        };
        let (bridge, nearest) = if left <= right {
            (left, left_owner)
        } else {
            (right, right_owner)
        };
        placed.insert(Key(lo), (hi, n));
        ratios.push(GapRatio {
            index: n,
            separation: bridge,
            diam: hi - lo,
            ratio: bridge / (hi - lo),
            nearest,
        });
    }
    Ok(finish(en, ratios))
}

/// Thickness of the central Cantor set keeping two pieces of ratio `r`.
pub fn central_cantor_thickness(keep_ratio: f64) -> f64 {
    keep_ratio / (1.0 - 2.0 * keep_ratio)
}

/// Score shared by every generation-`k` gap of a sponge.
pub fn sponge_level_ratio(grid: &[u32], k: u32) -> f64 {
    let sep = grid
        .iter()
        .map(|n| (*n as f64 - 1.0) / (2.0 * (*n as f64).powi(k as i32)))
        .fold(f64::INFINITY, f64::min);
    let diam = grid
        .iter()
        .map(|n| (*n as f64).powi(-2 * k as i32))
        .sum::<f64>()
        .sqrt();
    sep / diam
}

/// Closed-form sponge thickness: `(n-1)/(2√d)` for equal counts, else `0`.
pub fn sponge_thickness_closed_form(grid: &[u32]) -> f64 {
    if grid.iter().all(|n| *n == grid[0]) {
        (grid[0] as f64 - 1.0) / (2.0 * (grid.len() as f64).sqrt())
    } else {
        0.0
    }
}

/// Lower bound shared by all generation-`g` sponge gaps: the distance from
/// the central subcell to the outside of its parent cell, over its diameter.
pub fn sponge_generation_lower_bound(grid: &[u32], g: u32) -> f64 {
    let parent_index = vec![0u64; grid.len()];
    let parent = sponge_cell_box(grid, g - 1, &parent_index);
    let gap = Shape::Box(sponge_gap_box(grid, g, &parent_index));
    Hull::Box(parent).distance_to_exterior(&gap) / gap.diam()
}

fn cantor_generation_lower_bound(interval: [f64; 2], r: f64, g: u32) -> f64 {
    let len = (interval[1] - interval[0]) * r.powi(g as i32 - 1);
    let keep = len * r;
    let gap = Shape::Box(AxisBox::new(vec![interval[0] + keep], vec![interval[0] + len - keep]));
    let parent = Hull::Box(AxisBox::new(vec![interval[0]], vec![interval[0] + len]));
    parent.distance_to_exterior(&gap) / gap.diam()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenerationBound {
    pub generation: u32,
    /// Lower bound on every score of this generation.
    pub lower_bound: f64,
    /// Smallest exact score found among the evaluated gaps.
    pub best: f64,
    pub evaluated: usize,
    /// Whether the minimum over the generation is known exactly (or is
    /// known not to matter for the overall minimum).
    pub settled: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrunedThickness {
    pub depth: u32,
    /// Smallest exact score found: an upper bound on the truncated thickness.
    pub upper: f64,
    /// Certified lower bound on the truncated thickness.
    pub lower: f64,
    pub argmin: Option<(u32, u64)>,
    pub generations: Vec<GenerationBound>,
}

impl PrunedThickness {
    pub fn is_certified(&self) -> bool {
        self.lower >= self.upper * (1.0 - 1e-12)
    }
}

/// Iterate the gaps of one generation in lexicographic cell order.
fn generation_gaps(core: &SetDescriptor, g: u32) -> Box<dyn Iterator<Item = CellGap> + '_> {
    match core {
        SetDescriptor::Sponge { grid, .. } => {
            let d = grid.len();
            let level = g - 1;
            let sides: Vec<u64> = grid.iter().map(|n| (*n as u64).pow(level)).collect();
            let mut idx = vec![0u64; d];
            let mut done = false;
            Box::new(std::iter::from_fn(move || loop {
                if done {
                    return None;
                }
                let current = idx.clone();
                let mut i = d;
                loop {
                    if i == 0 {
                        done = true;
                        break;
                    }
                    i -= 1;
                    idx[i] += 1;
                    if idx[i] < sides[i] {
                        break;
                    }
                    idx[i] = 0;
                }
                if sponge_cell_survives(grid, level, &current) {
                    let gap = sponge_gap_box(grid, g, &current);
                    return Some(CellGap {
                        gap: Gap {
                            diam: sponge_generation_diam(grid, g),
                            shape: Shape::Box(gap),
                            generation: g,
                            rank: lex_rank(grid, level, &current),
                        },
                        parent: sponge_cell_box(grid, level, &current),
                        parent_index: current,
                    });
                }
            }))
        }
        SetDescriptor::CentralCantor1D {
            interval,
            keep_ratio,
            ..
        } => {
            let r = *keep_ratio;
            let interval = *interval;
            let len0 = interval[1] - interval[0];
            let a = interval[0];
            let count = 1u64 << (g - 1);
            Box::new((0..count).map(move |rank| {
                let mut left = a;
                let mut len = len0;
                for bit in (0..g - 1).rev() {
                    let keep = len * r;
                    if rank >> bit & 1 == 1 {
                        left += len - keep;
                    }
                    len = keep;
                }
                let keep = len * r;
                CellGap {
                    gap: Gap {
                        shape: Shape::Box(AxisBox::new(vec![left + keep], vec![left + len - keep])),
                        diam: cantor_generation_diam(interval, r, g),
                        generation: g,
                        rank,
                    },
                    parent: AxisBox::new(vec![left], vec![left + len]),
                    parent_index: vec![rank],
                }
            }))
        }
        _ => Box::new(std::iter::empty()),
    }
}

/// Whether a sponge cell survives to `level` (no ancestor is a central cell).
pub fn sponge_cell_survives(grid: &[u32], level: u32, idx: &[u64]) -> bool {
    let mut idx = idx.to_vec();
    for _ in 0..level {
        let mut central = true;
        for (i, n) in grid.iter().enumerate() {
            let n = *n as u64;
            if idx[i] % n != n / 2 {
                central = false;
            }
            idx[i] /= n;
        }
        if central {
            return false;
        }
    }
    true
}

/// Truncated thickness of a sponge or central Cantor set by branch and bound.
///
/// Each evaluated gap gets its exact score from the gaps near it (found by
/// descending only the construction cells that meet a search window). A
/// generation stops being searched once a gap attains the generation's lower
/// bound, or is skipped outright when that bound cannot beat the current
/// minimum. At most `budget` gaps are evaluated per generation.
pub fn thickness_pruned(desc: &SetDescriptor, depth: u32, budget: usize) -> Result<PrunedThickness, ThicknessError> {
    desc.validate().map_err(EnumerateError::from)?;
    // Thickness is invariant under homotheties, so the wrappers are dropped.
    let (core, _, _) = desc.peel();
    let hull = match core {
        SetDescriptor::Sponge { .. } | SetDescriptor::CentralCantor1D { .. } => core.hull(),
        _ => return Err(ThicknessError::NotGenerative),
    };
    let mut best = f64::INFINITY;
    let mut argmin = None;
    let mut generations = Vec::new();
    for g in 1..=depth {
        let lower_bound = match core {
            SetDescriptor::Sponge { grid, .. } => sponge_generation_lower_bound(grid, g),
            SetDescriptor::CentralCantor1D {
                interval,
                keep_ratio,
                ..
            } => cantor_generation_lower_bound(*interval, *keep_ratio, g),
            _ => unreachable!(),
        };
        let mut gen_best = f64::INFINITY;
        let mut evaluated = 0;
        let mut settled = lower_bound >= best;
        if !settled {
            for cand in generation_gaps(core, g) {
                if evaluated >= budget {
                    break;
                }
                evaluated += 1;
                let gap = &cand.gap;
                let external = hull.distance_to_exterior(&gap.shape);
                let radius = external.min(best * gap.diam);
                let window = gap.shape.bounding_box().expand(radius);
                let mut sep = external;
                let mut exact = external <= radius;
                for other in gaps_near(core, g, &window) {
                    let o = &other.gap;
                    if (o.generation, o.rank) >= (g, gap.rank) {
                        continue;
                    }
                    let d = gap.shape.distance_to(&o.shape);
                    if d <= radius && d < sep {
                        sep = d;
                        exact = true;
                    }
                }
                if !exact {
                    continue;
                }
                let ratio = sep / gap.diam;
                if ratio < gen_best {
                    gen_best = ratio;
                }
                if ratio < best {
                    best = ratio;
                    argmin = Some((g, gap.rank));
                }
                if ratio <= lower_bound * (1.0 + 1e-12) {
                    settled = true;
                    break;
                }
            }
        }
        generations.push(GenerationBound {
            generation: g,
            lower_bound,
            best: gen_best,
            evaluated,
            settled,
        });
    }
    let mut lower = best;
    for gb in &generations {
        if !gb.settled {
            lower = lower.min(gb.lower_bound);
        } else if gb.best.is_finite() {
            lower = lower.min(gb.lower_bound.min(gb.best));
        }
    }
    if depth == 0 {
        lower = degenerate_value(&hull);
        best = lower;
    }
    Ok(PrunedThickness {
        depth,
        upper: best,
        lower,
        argmin,
        generations,
    })
}

/// A line `point + t·direction` in ℝᵈ.
#[derive(Debug, Clone, PartialEq)]
pub struct Line {
    pub point: Point,
    pub direction: Point,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineSection {
    /// One-dimensional enumeration in arc length from `origin`.
    pub enumeration: GapEnumeration,
    pub origin: Point,
    pub unit_direction: Point,
}

/// Closed parameter interval where the line meets a closed box.
fn slab(b: &AxisBox, p: &[f64], u: &[f64], open: bool) -> Option<(f64, f64)> {
    let (mut t0, mut t1) = (f64::NEG_INFINITY, f64::INFINITY);
    for i in 0..p.len() {
        if u[i] == 0.0 {
            let inside = if open {
                b.lower[i] < p[i] && p[i] < b.upper[i]
            } else {
                b.lower[i] <= p[i] && p[i] <= b.upper[i]
            };
            if !inside {
                return None;
            }
        } else {
            let a = (b.lower[i] - p[i]) / u[i];
            let c = (b.upper[i] - p[i]) / u[i];
            t0 = t0.max(a.min(c));
            t1 = t1.min(a.max(c));
        }
    }
    if t0 < t1 || (!open && t0 <= t1) {
        Some((t0, t1))
    } else {
        None
    }
}

fn ball_chord(center: &[f64], radius: f64, p: &[f64], u: &[f64]) -> Option<(f64, f64)> {
    let w: Vec<f64> = p.iter().zip(center).map(|(a, c)| a - c).collect();
    let b: f64 = w.iter().zip(u).map(|(a, b)| a * b).sum();
    let c: f64 = w.iter().map(|a| a * a).sum::<f64>() - radius * radius;
    let disc = b * b - c;
    if disc < 0.0 {
        return None;
    }
    let s = disc.sqrt();
    Some((-b - s, -b + s))
}

/// Intersection of the set with a line, as a one-dimensional enumeration.
pub fn line_section(desc: &SetDescriptor, line: &Line, opts: &EnumerateOptions) -> Result<LineSection, ThicknessError> {
    let en = enumerate_gaps(desc, opts)?;
    if line.point.len() != en.dim || line.direction.len() != en.dim {
        return Err(ThicknessError::BadDirection);
    }
    let len = norm(&line.direction);
    if len == 0.0 || !len.is_finite() {
        return Err(ThicknessError::BadDirection);
    }
    let u: Vec<f64> = line.direction.iter().map(|x| x / len).collect();
    let p = &line.point;
    let (t0, t1) = match &en.hull {
        Hull::Box(b) => slab(b, p, &u, false),
        Hull::Ball(b) => ball_chord(&b.center, b.radius, p, &u),
    }
    .ok_or(ThicknessError::LineMissesSet)?;
    if t1 <= t0 {
        return Err(ThicknessError::LineMissesSet);
    }
    let mut chords: Vec<(f64, f64, usize)> = Vec::new();
    for (i, gap) in en.gaps.iter().enumerate() {
        let chord = match &gap.shape {
            Shape::Box(b) => slab(b, p, &u, true),
            Shape::Ball(b) => ball_chord(&b.center, b.radius, p, &u).filter(|(a, c)| a < c),
            Shape::Cells(_) => return Err(ThicknessError::NonConvexGap(i)),
        };
        if let Some((a, c)) = chord {
            let (a, c) = (a.max(t0), c.min(t1));
            if a < c {
                chords.push((a - t0, c - t0, i));
            }
        }
    }
    chords.sort_by(|x, y| (y.1 - y.0).total_cmp(&(x.1 - x.0)).then(x.2.cmp(&y.2)));
    let gaps = chords
        .into_iter()
        .map(|(a, c, i)| Gap {
            shape: Shape::Box(AxisBox::new(vec![a], vec![c])),
            diam: c - a,
            generation: en.gaps[i].generation,
            rank: en.gaps[i].rank,
        })
        .collect();
    let origin: Point = p.iter().zip(&u).map(|(x, v)| x + t0 * v).collect();
    Ok(LineSection {
        enumeration: GapEnumeration {
            dim: 1,
            hull: Hull::Box(AxisBox::new(vec![0.0], vec![t1 - t0])),
            gaps,
            truncated_at: en.truncated_at,
            tail_bound: en.tail_bound,
        },
        origin,
        unit_direction: u,
    })
}

/// Largest gap diameter of the generative core at generation `g`, exposed
/// for callers that pick depths from a target resolution.
pub fn generation_gap_diam(desc: &SetDescriptor, g: u32) -> f64 {
    let (core, factor, _) = desc.peel();
    generation_diam(core, g) * factor
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::descriptor::Depth;
    use crate::geometry::Ball;
    use approx::assert_relative_eq;

    fn interval_gaps(hull: (f64, f64), gaps: &[(f64, f64)]) -> SetDescriptor {
        SetDescriptor::explicit(
            Hull::Box(AxisBox::new(vec![hull.0], vec![hull.1])),
            gaps.iter()
                .map(|(a, b)| Shape::Box(AxisBox::new(vec![*a], vec![*b])))
                .collect(),
        )
    }

    #[test]
    fn single_gap_interval() {
        let d = interval_gaps((0.0, 1.0), &[(0.4, 0.6)]);
        let r = thickness(&d, &EnumerateOptions::default()).unwrap();
        assert_relative_eq!(r.value, 2.0, epsilon = 1e-12);
        assert_eq!(r.ratios[0].nearest, Nearest::External);
        assert_relative_eq!(r.ratios[0].separation, 0.4, epsilon = 1e-15);
        let en = enumerate_gaps(&d, &EnumerateOptions::default()).unwrap();
        assert_relative_eq!(thickness_1d(&en).unwrap().value, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn degenerate_sets() {
        let point = interval_gaps((0.5, 0.5), &[]);
        assert_eq!(thickness(&point, &EnumerateOptions::default()).unwrap().value, 0.0);
        let solid = interval_gaps((0.0, 1.0), &[]);
        assert_eq!(
            thickness(&solid, &EnumerateOptions::default()).unwrap().value,
            f64::INFINITY
        );
    }

    #[test]
    fn square_with_central_ball_gap() {
        let d = SetDescriptor::explicit(
            Hull::Box(AxisBox::cube(2, 0.0, 1.0)),
            vec![Shape::Ball(Ball::new(vec![0.5, 0.5], 0.1))],
        );
        let r = thickness(&d, &EnumerateOptions::default()).unwrap();
        assert_relative_eq!(r.value, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn carpet_is_certified_after_one_generation() {
        let d = SetDescriptor::sponge(&[3, 3]);
        let r = thickness(&d, &EnumerateOptions::depth(3)).unwrap();
        assert_relative_eq!(r.value, 1.0 / 2f64.sqrt(), epsilon = 1e-12);
        assert!(r.is_certified());
    }

    #[test]
    fn uneven_sponge_is_not_certified() {
        let d = SetDescriptor::sponge(&[3, 5]);
        let r = thickness(&d, &EnumerateOptions::depth(3)).unwrap();
        assert!(!r.is_certified());
        assert_eq!(r.certified_lower(), 0.0);
        assert_relative_eq!(r.value, sponge_level_ratio(&[3, 5], 3), epsilon = 1e-12);
    }

    #[test]
    fn middle_thirds_is_one() {
        let d = SetDescriptor::middle_thirds();
        let en = enumerate_gaps(&d, &EnumerateOptions::depth(8)).unwrap();
        assert_relative_eq!(thickness_rd(&en).value, 1.0, epsilon = 1e-9);
        assert_relative_eq!(thickness_1d(&en).unwrap().value, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn one_d_needs_dimension_one() {
        let d = SetDescriptor::sponge(&[3, 3]);
        let en = enumerate_gaps(&d, &EnumerateOptions::depth(1)).unwrap();
        assert!(matches!(
            thickness_1d(&en),
            Err(ThicknessError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn closed_forms() {
        assert_relative_eq!(sponge_thickness_closed_form(&[3, 3]), 1.0 / 2f64.sqrt());
        assert_relative_eq!(sponge_thickness_closed_form(&[3, 3, 3]), 1.0 / 3f64.sqrt());
        assert_eq!(sponge_thickness_closed_form(&[3, 5]), 0.0);
        assert_relative_eq!(central_cantor_thickness(1.0 / 3.0), 1.0, epsilon = 1e-15);
        assert_relative_eq!(central_cantor_thickness(0.4), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn pruned_matches_materialized() {
        for grid in [vec![3, 5], vec![3, 3], vec![5, 3, 3]] {
            let d = SetDescriptor::sponge(&grid);
            for depth in 1..=3 {
                let full = thickness(&d, &EnumerateOptions::depth(depth)).unwrap();
                let pruned = thickness_pruned(&d, depth, 1000).unwrap();
                assert_relative_eq!(pruned.upper, full.value, max_relative = 1e-12);
                assert!(pruned.is_certified());
            }
        }
    }

    #[test]
    fn line_through_carpet_midline() {
        let d = SetDescriptor::sponge(&[3, 3]);
        let line = Line {
            point: vec![0.0, 0.5],
            direction: vec![1.0, 0.0],
        };
        let s = line_section(&d, &line, &EnumerateOptions::depth(5)).unwrap();
        let want = enumerate_gaps(&SetDescriptor::middle_thirds(), &EnumerateOptions::depth(5)).unwrap();
        assert_eq!(s.enumeration.gaps.len(), want.gaps.len());
        assert_relative_eq!(thickness_1d(&s.enumeration).unwrap().value, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn line_missing_the_hull() {
        let d = SetDescriptor::sponge(&[3, 3]);
        let line = Line {
            point: vec![0.0, 2.0],
            direction: vec![1.0, 0.0],
        };
        assert!(matches!(
            line_section(&d, &line, &EnumerateOptions::depth(2)),
            Err(ThicknessError::LineMissesSet)
        ));
    }

    #[test]
    fn finite_depth_cantor_is_exact() {
        let d = SetDescriptor::middle_thirds().with_depth(Depth::Finite(4));
        let r = thickness(&d, &EnumerateOptions::default()).unwrap();
        assert_eq!(r.truncation, Truncation::Exact);
    }
}
