//! Gap enumeration in non-increasing diameter order.
//!
//! Generative families are enumerated generation by generation on integer
//! cell indices, so the order (generation, lexicographic cell index) is exact
//! and every coordinate is a single division of an integer by a power of the
//! subdivision count.

use thiserror::Error;

use crate::descriptor::{Depth, DescriptorError, SetDescriptor};
use crate::geometry::{AxisBox, Hull, Shape};

pub const DEFAULT_GAP_CAP: usize = 1_000_000;

/// Gap budget used to pick a depth when an unbounded family is enumerated
/// without an explicit depth.
pub const DEFAULT_DEPTH_BUDGET: u128 = 50_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnumerateError {
    #[error(transparent)]
    Descriptor(#[from] DescriptorError),
    #[error("depth {depth} needs {needed} gaps, above the cap of {cap}")]
    DepthOverflow { depth: u32, needed: u128, cap: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gap {
    pub shape: Shape,
    pub diam: f64,
    /// Construction generation, starting at 1; 0 for explicit gaps.
    pub generation: u32,
    /// Position within the generation (lexicographic cell order), or the
    /// input position for explicit gaps.
    pub rank: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapEnumeration {
    pub dim: usize,
    pub hull: Hull,
    pub gaps: Vec<Gap>,
    /// `Some(k)` when the set has more gaps than were enumerated.
    pub truncated_at: Option<u32>,
    /// Supremum of the diameters of the gaps that were not enumerated.
    pub tail_bound: f64,
}

impl GapEnumeration {
    pub fn is_complete(&self) -> bool {
        self.truncated_at.is_none()
    }

    /// Distance from the closure of gap `i` to the unbounded gap.
    pub fn distance_to_external(&self, i: usize) -> f64 {
        self.hull.distance_to_exterior(&self.gaps[i].shape)
    }

    /// Whether `p` lies in the enumerated approximation of the set.
    pub fn contains_point(&self, p: &[f64]) -> bool {
        self.hull.contains_closed(p) && !self.gaps.iter().any(|g| g.shape.contains_open(p))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EnumerateOptions {
    pub depth: Option<u32>,
    pub cap: usize,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        Self {
            depth: None,
            cap: DEFAULT_GAP_CAP,
        }
    }
}

impl EnumerateOptions {
    pub fn depth(depth: u32) -> Self {
        Self {
            depth: Some(depth),
            ..Self::default()
        }
    }
}

/// Number of gaps of generations `1..=depth`.
pub fn gap_count(desc: &SetDescriptor, depth: u32) -> u128 {
    let (core, _, _) = desc.peel();
    match core {
        SetDescriptor::Explicit { gaps, .. } => gaps.len() as u128,
        SetDescriptor::CentralCantor1D { .. } => (1u128 << depth.min(120)) - 1,
        SetDescriptor::Sponge { grid, .. } => {
            let survivors: u128 = grid.iter().map(|n| *n as u128).product::<u128>() - 1;
            let mut total: u128 = 0;
            let mut level: u128 = 1;
            for _ in 0..depth {
                total = total.saturating_add(level);
                level = level.saturating_mul(survivors);
            }
            total
        }
        _ => unreachable!("peel removes wrappers"),
    }
}

/// Depth actually enumerated for `desc` under `opts`, and whether it is
/// complete (the construction stops there).
pub fn effective_depth(desc: &SetDescriptor, opts: &EnumerateOptions) -> Option<(u32, bool)> {
    let stored = desc.depth()?;
    Some(match (stored, opts.depth) {
        (Depth::Finite(k), Some(r)) if r >= k => (k, true),
        (Depth::Finite(_), Some(r)) => (r, false),
        (Depth::Finite(k), None) => (k, true),
        (Depth::Unbounded, Some(r)) => (r, false),
        (Depth::Unbounded, None) => (default_depth(desc), false),
    })
}

/// Largest depth (at most 16) whose gap count stays within the default budget.
pub fn default_depth(desc: &SetDescriptor) -> u32 {
    let mut k = 1;
    while k < 16 && gap_count(desc, k + 1) <= DEFAULT_DEPTH_BUDGET {
        k += 1;
    }
    k
}

/// Diameter of a generation-`g` gap of a generative core descriptor.
pub fn generation_diam(core: &SetDescriptor, g: u32) -> f64 {
    match core {
        SetDescriptor::CentralCantor1D {
            interval,
            keep_ratio,
            ..
        } => cantor_generation_diam(*interval, *keep_ratio, g),
        SetDescriptor::Sponge { grid, .. } => sponge_generation_diam(grid, g),
        _ => 0.0,
    }
}

/// Every gap of one generation gets this diameter, so rounding never breaks
/// the non-increasing order.
pub fn sponge_generation_diam(grid: &[u32], g: u32) -> f64 {
    grid.iter()
        .map(|n| (*n as f64).powi(-(g as i32)).powi(2))
        .sum::<f64>()
        .sqrt()
}

pub fn cantor_generation_diam(interval: [f64; 2], r: f64, g: u32) -> f64 {
    (interval[1] - interval[0]) * r.powi(g as i32 - 1) * (1.0 - 2.0 * r)
}

pub fn enumerate_gaps(desc: &SetDescriptor, opts: &EnumerateOptions) -> Result<GapEnumeration, EnumerateError> {
    desc.validate()?;
    let (core, factor, offset) = desc.peel();
    let mut out = match core {
        SetDescriptor::Explicit { dimension, hull, gaps } => {
            let mut list: Vec<Gap> = gaps
                .iter()
                .enumerate()
                .map(|(i, s)| Gap {
                    diam: s.diam(),
                    shape: s.clone(),
                    generation: 0,
                    rank: i as u64,
                })
                .collect();
            list.sort_by(|a, b| b.diam.total_cmp(&a.diam));
            GapEnumeration {
                dim: *dimension,
                hull: hull.clone(),
                gaps: list,
                truncated_at: None,
                tail_bound: 0.0,
            }
        }
        _ => {
            let (depth, complete) = effective_depth(core, opts).expect("generative");
            let needed = gap_count(core, depth);
            if needed > opts.cap as u128 {
                return Err(EnumerateError::DepthOverflow {
                    depth,
                    needed,
                    cap: opts.cap,
                });
            }
            let gaps = match core {
                SetDescriptor::CentralCantor1D {
                    interval,
                    keep_ratio,
                    ..
                } => cantor_gaps(*interval, *keep_ratio, depth),
                SetDescriptor::Sponge { grid, .. } => sponge_gaps(grid, depth),
                _ => unreachable!(),
            };
            GapEnumeration {
                dim: core.dim(),
                hull: core.hull(),
                gaps,
                truncated_at: if complete { None } else { Some(depth) },
                tail_bound: if complete { 0.0 } else { generation_diam(core, depth + 1) },
            }
        }
    };
    if factor != 1.0 || offset.iter().any(|t| *t != 0.0) {
        out.hull = out.hull.map_similarity(factor, &offset);
        for g in &mut out.gaps {
            g.shape = g.shape.map_similarity(factor, &offset);
            g.diam *= factor;
        }
        out.tail_bound *= factor;
    }
    Ok(out)
}

fn cantor_gaps(interval: [f64; 2], r: f64, depth: u32) -> Vec<Gap> {
    let mut out = Vec::new();
    let mut pieces = vec![(interval[0], interval[1] - interval[0])];
    for g in 1..=depth {
        let diam = cantor_generation_diam(interval, r, g);
        let mut next = Vec::with_capacity(pieces.len() * 2);
        for (rank, (left, len)) in pieces.iter().enumerate() {
            let keep = len * r;
            let lo = left + keep;
            let hi = left + len - keep;
            out.push(Gap {
                shape: Shape::Box(AxisBox::new(vec![lo], vec![hi])),
                diam,
                generation: g,
                rank: rank as u64,
            });
            next.push((*left, keep));
            next.push((hi, keep));
        }
        pieces = next;
    }
    out
}

/// Surviving cells of a sponge at `level`, in lexicographic index order.
pub fn sponge_cells(grid: &[u32], level: u32) -> Vec<Vec<u64>> {
    let d = grid.len();
    let mut cells: Vec<Vec<u64>> = vec![vec![0; d]];
    for _ in 0..level {
        let mut next = Vec::with_capacity(cells.len() * child_count(grid));
        for cell in &cells {
            for_each_child(grid, |digits| {
                next.push(
                    (0..d)
                        .map(|i| cell[i] * grid[i] as u64 + digits[i] as u64)
                        .collect(),
                );
            });
        }
        next.sort_unstable();
        cells = next;
    }
    cells
}

fn child_count(grid: &[u32]) -> usize {
    grid.iter().map(|n| *n as usize).product::<usize>() - 1
}

/// Visit every non-central child digit vector.
fn for_each_child(grid: &[u32], mut f: impl FnMut(&[u32])) {
    let d = grid.len();
    let mut digits = vec![0u32; d];
    loop {
        if !digits.iter().zip(grid).all(|(a, n)| *a == n / 2) {
            f(&digits);
        }
        let mut i = d;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < grid[i] {
                break;
            }
            digits[i] = 0;
        }
    }
}

/// The central subcell of a level-`g-1` cell, as a box.
pub fn sponge_gap_box(grid: &[u32], g: u32, parent: &[u64]) -> AxisBox {
    let mut lo = Vec::with_capacity(grid.len());
    let mut hi = Vec::with_capacity(grid.len());
    for (i, n) in grid.iter().enumerate() {
        let scale = (*n as f64).powi(g as i32);
        let base = parent[i] * *n as u64 + (*n as u64 - 1) / 2;
        lo.push(base as f64 / scale);
        hi.push((base + 1) as f64 / scale);
    }
    AxisBox::new(lo, hi)
}

/// A level-`level` cell of a sponge, as a closed box.
pub fn sponge_cell_box(grid: &[u32], level: u32, idx: &[u64]) -> AxisBox {
    let mut lo = Vec::with_capacity(grid.len());
    let mut hi = Vec::with_capacity(grid.len());
    for (i, n) in grid.iter().enumerate() {
        let scale = (*n as f64).powi(level as i32);
        lo.push(idx[i] as f64 / scale);
        hi.push((idx[i] + 1) as f64 / scale);
    }
    AxisBox::new(lo, hi)
}

fn sponge_gaps(grid: &[u32], depth: u32) -> Vec<Gap> {
    let mut out = Vec::new();
    let mut cells: Vec<Vec<u64>> = vec![vec![0; grid.len()]];
    for g in 1..=depth {
        let diam = sponge_generation_diam(grid, g);
        for parent in &cells {
            let b = sponge_gap_box(grid, g, parent);
            out.push(Gap {
                diam,
                shape: Shape::Box(b),
                generation: g,
                rank: lex_rank(grid, g - 1, parent),
            });
        }
        if g < depth {
            let mut next = Vec::with_capacity(cells.len() * child_count(grid));
            for cell in &cells {
                for_each_child(grid, |digits| {
                    next.push(
                        cell.iter()
                            .zip(grid)
                            .zip(digits)
                            .map(|((c, n), a)| c * *n as u64 + *a as u64)
                            .collect(),
                    );
                });
            }
            next.sort_unstable();
            cells = next;
        }
    }
    out
}

/// A gap together with the construction cell it was cut from.
#[derive(Debug, Clone, PartialEq)]
pub struct CellGap {
    pub gap: Gap,
    pub parent: AxisBox,
    /// Lexicographic index of the parent cell (one entry per axis).
    pub parent_index: Vec<u64>,
}

/// Gaps of generation at most `max_gen` of a generative core descriptor whose
/// closure meets the closed `window`. Only cells meeting the window are
/// visited.
pub fn gaps_near(core: &SetDescriptor, max_gen: u32, window: &AxisBox) -> Vec<CellGap> {
    let mut out = Vec::new();
    match core {
        SetDescriptor::Sponge { grid, .. } => {
            let root = vec![0u64; grid.len()];
            sponge_descend(grid, 0, &root, max_gen, window, &mut out);
        }
        SetDescriptor::CentralCantor1D {
            interval,
            keep_ratio,
            ..
        } => {
            cantor_descend(
                (interval[0], interval[1] - interval[0]),
                *interval,
                *keep_ratio,
                (0, 0),
                max_gen,
                window,
                &mut out,
            );
        }
        _ => {}
    }
    out
}

fn boxes_meet_closed(a: &AxisBox, b: &AxisBox) -> bool {
    (0..a.dim()).all(|i| a.lower[i] <= b.upper[i] && b.lower[i] <= a.upper[i])
}

fn sponge_descend(
    grid: &[u32],
    level: u32,
    idx: &[u64],
    max_gen: u32,
    window: &AxisBox,
    out: &mut Vec<CellGap>,
) {
    let cell = sponge_cell_box(grid, level, idx);
    if level >= max_gen || !boxes_meet_closed(&cell, window) {
        return;
    }
    let gap = sponge_gap_box(grid, level + 1, idx);
    if boxes_meet_closed(&gap, window) {
        out.push(CellGap {
            gap: Gap {
                diam: sponge_generation_diam(grid, level + 1),
                shape: Shape::Box(gap),
                generation: level + 1,
                rank: lex_rank(grid, level, idx),
            },
            parent: cell.clone(),
            parent_index: idx.to_vec(),
        });
    }
    for_each_child_vec(grid, |digits| {
        let child: Vec<u64> = idx
            .iter()
            .zip(grid)
            .zip(digits)
            .map(|((c, n), a)| c * *n as u64 + *a as u64)
            .collect();
        sponge_descend(grid, level + 1, &child, max_gen, window, out);
    });
}

fn for_each_child_vec(grid: &[u32], mut f: impl FnMut(&[u32])) {
    let mut all = Vec::new();
    for_each_child(grid, |d| all.push(d.to_vec()));
    for d in &all {
        f(d);
    }
}

/// Mixed-radix index of a cell (first axis most significant); orders the
/// cells of one level lexicographically.
pub fn lex_rank(grid: &[u32], level: u32, idx: &[u64]) -> u64 {
    let mut r: u64 = 0;
    for (i, n) in grid.iter().enumerate() {
        r = r
            .saturating_mul((*n as u64).saturating_pow(level))
            .saturating_add(idx[i]);
    }
    r
}

fn cantor_descend(
    (left, len): (f64, f64),
    interval: [f64; 2],
    r: f64,
    (level, rank): (u32, u64),
    max_gen: u32,
    window: &AxisBox,
    out: &mut Vec<CellGap>,
) {
    if level >= max_gen || left > window.upper[0] || left + len < window.lower[0] {
        return;
    }
    let keep = len * r;
    let lo = left + keep;
    let hi = left + len - keep;
    if lo <= window.upper[0] && window.lower[0] <= hi {
        out.push(CellGap {
            gap: Gap {
                shape: Shape::Box(AxisBox::new(vec![lo], vec![hi])),
                diam: cantor_generation_diam(interval, r, level + 1),
                generation: level + 1,
                rank,
            },
            parent: AxisBox::new(vec![left], vec![left + len]),
            parent_index: vec![rank],
        });
    }
    cantor_descend((left, keep), interval, r, (level + 1, 2 * rank), max_gen, window, out);
    cantor_descend((hi, keep), interval, r, (level + 1, 2 * rank + 1), max_gen, window, out);
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn middle_thirds_depth_two() {
        let d = SetDescriptor::middle_thirds();
        let e = enumerate_gaps(&d, &EnumerateOptions::depth(2)).unwrap();
        let want = [(1.0 / 3.0, 2.0 / 3.0), (1.0 / 9.0, 2.0 / 9.0), (7.0 / 9.0, 8.0 / 9.0)];
        assert_eq!(e.gaps.len(), 3);
        for (g, (lo, hi)) in e.gaps.iter().zip(want) {
            match &g.shape {
                Shape::Box(b) => {
                    assert_relative_eq!(b.lower[0], lo, epsilon = 1e-15);
                    assert_relative_eq!(b.upper[0], hi, epsilon = 1e-15);
                }
                _ => unreachable!(),
            }
        }
        assert_eq!(e.truncated_at, Some(2));
        assert_relative_eq!(e.tail_bound, 1.0 / 27.0, epsilon = 1e-15);
    }

    #[test]
    fn carpet_first_gap() {
        let d = SetDescriptor::sponge(&[3, 3]);
        let e = enumerate_gaps(&d, &EnumerateOptions::depth(1)).unwrap();
        assert_eq!(e.gaps.len(), 1);
        assert_relative_eq!(e.gaps[0].diam, 2f64.sqrt() / 3.0, epsilon = 1e-15);
        assert_relative_eq!(e.distance_to_external(0), 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn finite_depth_descriptor_is_complete() {
        let d = SetDescriptor::middle_thirds().with_depth(Depth::Finite(3));
        let e = enumerate_gaps(&d, &EnumerateOptions::default()).unwrap();
        assert!(e.is_complete());
        assert_eq!(e.gaps.len(), 7);
        assert_eq!(e.tail_bound, 0.0);
    }

    #[test]
    fn overflow_is_reported() {
        let d = SetDescriptor::sponge(&[3, 5]);
        let err = enumerate_gaps(&d, &EnumerateOptions::depth(8)).unwrap_err();
        assert!(matches!(err, EnumerateError::DepthOverflow { depth: 8, .. }));
    }

    #[test]
    fn counts_match_enumeration() {
        for (grid, depth) in [(vec![3, 3], 4), (vec![3, 5], 3), (vec![3, 3, 3], 3)] {
            let d = SetDescriptor::sponge(&grid);
            let e = enumerate_gaps(&d, &EnumerateOptions::depth(depth)).unwrap();
            assert_eq!(e.gaps.len() as u128, gap_count(&d, depth));
        }
    }

    #[test]
    fn order_is_non_increasing_and_lexicographic() {
        let d = SetDescriptor::sponge(&[3, 5]);
        let e = enumerate_gaps(&d, &EnumerateOptions::depth(3)).unwrap();
        for w in e.gaps.windows(2) {
            assert!(w[0].diam >= w[1].diam);
            if w[0].generation == w[1].generation {
                assert!(w[0].rank < w[1].rank);
            }
        }
    }

    #[test]
    fn homothety_maps_level_one_gap() {
        let d = SetDescriptor::sponge(&[3, 3]).apply_homothety(3.0, &[1.0, 1.0]).unwrap();
        let e = enumerate_gaps(&d, &EnumerateOptions::depth(1)).unwrap();
        let b = e.gaps[0].shape.bounding_box();
        for i in 0..2 {
            assert_relative_eq!(b.lower[i], 2.0, epsilon = 1e-14);
            assert_relative_eq!(b.upper[i], 3.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn window_query_matches_full_enumeration() {
        let d = SetDescriptor::sponge(&[3, 5]);
        let full = enumerate_gaps(&d, &EnumerateOptions::depth(3)).unwrap();
        let window = AxisBox::new(vec![0.1, 0.3], vec![0.45, 0.5]);
        let near = gaps_near(&d, 3, &window);
        let want = full
            .gaps
            .iter()
            .filter(|g| boxes_meet_closed(&g.shape.bounding_box(), &window))
            .count();
        assert_eq!(near.len(), want);
    }

    #[test]
    fn sponge_cells_are_sorted_survivors() {
        let cells = sponge_cells(&[3, 3], 2);
        assert_eq!(cells.len(), 64);
        assert!(cells.windows(2).all(|w| w[0] < w[1]));
        assert!(!cells.contains(&vec![4, 4]));
        assert!(!cells.contains(&vec![1, 1]));
    }
}
