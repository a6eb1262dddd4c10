//! Brute-force oracles: rasterization on a grid, intersection by subdivision,
//! box counting and exhaustive pattern search.
//!
//! A set is rasterized at a level `k` using its construction stage
//! `min(k, stated depth)`: the union of the closed cells or intervals kept by
//! the first `k` steps. Stages are nested closed sets whose intersection is
//! the set itself, so a witness at every level certifies a nonempty limit,
//! and disjoint stages certify disjoint limits.

use serde::Serialize;
use thiserror::Error;

use crate::descriptor::{Depth, DescriptorError, SetDescriptor};
use crate::enumerate::{enumerate_gaps, sponge_cells, EnumerateError, EnumerateOptions};
use crate::geometry::{AxisBox, Hull, Point, Shape};
use crate::spatial::ShapeIndex;

pub const DEFAULT_CELL_BUDGET: u64 = 50_000_000;

/// Relative slack used when comparing grid cells against computed geometry.
const SNAP: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error(transparent)]
    Descriptor(#[from] DescriptorError),
    #[error(transparent)]
    Enumerate(#[from] EnumerateError),
    #[error("{needed} cells exceed the budget of {cap}")]
    BudgetExceeded { needed: u128, cap: u64 },
    #[error("degenerate range: {0}")]
    DegenerateRange(String),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("no witness at level {0} (not a disproof)")]
    EmptyAtThisDepth(u32),
    #[error("operation needs a one-dimensional set")]
    NotOneDimensional,
}

/// Occupied cells of a uniform grid over `region`, with `bases[i]^level`
/// cells along axis `i`. Cells are stored as sorted linear indices, axis 0
/// varying slowest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellGrid {
    pub dim: usize,
    pub region: AxisBox,
    pub bases: Vec<u32>,
    pub level: u32,
    /// Construction stage the cells were classified against.
    pub stage: u32,
    /// Cells whose interior may meet the set (a superset of the truth).
    pub may: Vec<u64>,
    /// Cells entirely inside the stage set.
    pub inside: Vec<u64>,
}

impl CellGrid {
    pub fn cells_per_axis(&self) -> Vec<u64> {
        self.bases.iter().map(|b| (*b as u64).pow(self.level)).collect()
    }

    pub fn cell_side(&self, axis: usize) -> f64 {
        self.region.side(axis) / (self.bases[axis] as f64).powi(self.level as i32)
    }

    pub fn coords(&self, mut idx: u64) -> Vec<u64> {
        let m = self.cells_per_axis();
        let mut c = vec![0; self.dim];
        for i in (0..self.dim).rev() {
            c[i] = idx % m[i];
            idx /= m[i];
        }
        c
    }

    pub fn index(&self, coords: &[u64]) -> u64 {
        let m = self.cells_per_axis();
        coords.iter().zip(&m).fold(0, |acc, (c, n)| acc * n + c)
    }

    pub fn cell_box(&self, idx: u64) -> AxisBox {
        cell_box(&self.region, &self.bases, self.level, &self.coords(idx))
    }

    pub fn is_may(&self, idx: u64) -> bool {
        self.may.binary_search(&idx).is_ok()
    }

    pub fn is_inside(&self, idx: u64) -> bool {
        self.inside.binary_search(&idx).is_ok()
    }

    /// Every cell whose closure contains `p`.
    pub fn locate(&self, p: &[f64]) -> Vec<u64> {
        let m = self.cells_per_axis();
        let mut per_axis: Vec<Vec<u64>> = Vec::with_capacity(self.dim);
        for i in 0..self.dim {
            let side = self.cell_side(i);
            let t = (p[i] - self.region.lower[i]) / side;
            if t < -SNAP || t > m[i] as f64 + SNAP {
                return Vec::new();
            }
            let f = t.floor();
            let mut axis = Vec::new();
            if t - f < SNAP && f >= 1.0 {
                axis.push(f as u64 - 1);
            }
            if (f as u64) < m[i] {
                axis.push(f.max(0.0) as u64);
            }
            if f + 1.0 - t < SNAP && ((f + 1.0) as u64) < m[i] {
                axis.push(f as u64 + 1);
            }
            axis.dedup();
            per_axis.push(axis);
        }
        let mut out = vec![Vec::new()];
        for axis in per_axis {
            out = out
                .into_iter()
                .flat_map(|prefix: Vec<u64>| {
                    axis.iter().map(move |c| {
                        let mut v = prefix.clone();
                        v.push(*c);
                        v
                    })
                })
                .collect();
        }
        out.iter().map(|c| self.index(c)).collect()
    }

    /// Linear indices of the cells sharing at least a corner with `idx`.
    fn neighbours(&self, idx: u64) -> Vec<u64> {
        let m = self.cells_per_axis();
        let c = self.coords(idx);
        let mut out = vec![Vec::new()];
        for i in 0..self.dim {
            let lo = c[i].saturating_sub(1);
            let hi = (c[i] + 1).min(m[i] - 1);
            out = out
                .into_iter()
                .flat_map(|prefix: Vec<u64>| {
                    (lo..=hi).map(move |v| {
                        let mut p = prefix.clone();
                        p.push(v);
                        p
                    })
                })
                .collect();
        }
        out.iter().map(|c| self.index(c)).collect()
    }
}

fn cell_box(region: &AxisBox, bases: &[u32], level: u32, coords: &[u64]) -> AxisBox {
    let mut lo = Vec::with_capacity(coords.len());
    let mut hi = Vec::with_capacity(coords.len());
    for (i, c) in coords.iter().enumerate() {
        let m = (bases[i] as f64).powi(level as i32);
        let side = region.side(i);
        lo.push(region.lower[i] + side * (*c as f64) / m);
        hi.push(region.lower[i] + side * ((*c + 1) as f64) / m);
    }
    AxisBox::new(lo, hi)
}

/// Construction stage used at `level`.
pub fn stage_at(desc: &SetDescriptor, level: u32) -> u32 {
    match desc.depth() {
        Some(Depth::Finite(k)) => k.min(level),
        _ => level,
    }
}

/// The grid a set is most naturally rasterized on: the sponge grid, base
/// `1/r` for a central Cantor set with integral `1/r`, otherwise dyadic.
pub fn natural_grid(desc: &SetDescriptor) -> (AxisBox, Vec<u32>) {
    let region = desc.hull().bounding_box();
    let (core, _, _) = desc.peel();
    let bases = match core {
        SetDescriptor::Sponge { grid, .. } => grid.clone(),
        SetDescriptor::CentralCantor1D { keep_ratio, .. } => {
            let b = (1.0 / keep_ratio).round();
            if b >= 3.0 && ((1.0 / keep_ratio) - b).abs() < 1e-12 {
                vec![b as u32]
            } else {
                vec![2]
            }
        }
        _ => vec![2; desc.dim()],
    };
    (region, bases)
}

fn total_cells(bases: &[u32], level: u32) -> Option<u128> {
    bases
        .iter()
        .try_fold(1u128, |acc, b| acc.checked_mul((*b as u128).checked_pow(level)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Class {
    Out,
    In,
    Partial,
}

trait Classifier {
    fn classify(&self, q: &AxisBox) -> Class;
}

/// Sorted closed intervals of a one-dimensional stage set.
struct Intervals(Vec<[f64; 2]>);

impl Classifier for Intervals {
    fn classify(&self, q: &AxisBox) -> Class {
        let (a, b) = (q.lower[0], q.upper[0]);
        let tol = SNAP * (b - a);
        let start = self.0.partition_point(|iv| iv[1] <= a + tol);
        let mut meets = false;
        for iv in &self.0[start..] {
            if iv[0] >= b - tol {
                break;
            }
            meets = true;
            if iv[0] <= a + tol && iv[1] >= b - tol {
                return Class::In;
            }
        }
        if meets {
            Class::Partial
        } else {
            Class::Out
        }
    }
}

/// A hull minus finitely many open gaps.
struct GapSet<'a> {
    hull: Hull,
    index: ShapeIndex<'a>,
}

fn box_inside_closed_shape(q: &AxisBox, s: &Shape, tol: f64) -> bool {
    match s {
        Shape::Box(b) => (0..q.dim()).all(|i| q.lower[i] >= b.lower[i] - tol && q.upper[i] <= b.upper[i] + tol),
        Shape::Ball(b) => q.corners().iter().all(|c| crate::geometry::distance(c, &b.center) <= b.radius + tol),
        Shape::Cells(cells) => cells.iter().any(|c| box_inside_closed_shape(q, &Shape::Box(c.clone()), tol)),
    }
}

/// Whether the open shape meets the closed box by more than `tol`.
fn open_shape_meets_box(s: &Shape, q: &AxisBox, tol: f64) -> bool {
    match s {
        Shape::Box(b) => (0..q.dim()).all(|i| b.lower[i] < q.upper[i] - tol && q.lower[i] + tol < b.upper[i]),
        Shape::Ball(b) => q.distance_to_point(&b.center) < b.radius - tol,
        Shape::Cells(cells) => cells.iter().any(|c| open_shape_meets_box(&Shape::Box(c.clone()), q, tol)),
    }
}

impl Classifier for GapSet<'_> {
    fn classify(&self, q: &AxisBox) -> Class {
        let tol = SNAP * q.diam();
        let hull = self.hull.as_shape();
        if !open_shape_meets_box(&hull, q, tol) {
            return Class::Out;
        }
        let mut meets_gap = false;
        for i in self.index.candidates_in(q) {
            let g = self.index.shape(i);
            if box_inside_closed_shape(q, g, tol) {
                return Class::Out;
            }
            if open_shape_meets_box(g, q, tol) {
                meets_gap = true;
            }
        }
        if !meets_gap && box_inside_closed_shape(q, &hull, tol) {
            Class::In
        } else {
            Class::Partial
        }
    }
}

fn subdivide(region: &AxisBox, bases: &[u32], level: u32, classifier: &dyn Classifier, budget: u64) -> Result<(Vec<u64>, Vec<u64>), VerifyError> {
    let d = bases.len();
    let m: Vec<u64> = bases.iter().map(|b| (*b as u64).pow(level)).collect();
    let index = |c: &[u64]| c.iter().zip(&m).fold(0u64, |acc, (c, n)| acc * n + c);
    let mut may = Vec::new();
    let mut inside = Vec::new();
    let mut stack: Vec<(u32, Vec<u64>)> = vec![(0, vec![0; d])];
    let over = |n: usize| -> Result<(), VerifyError> {
        if n as u64 > budget {
            Err(VerifyError::BudgetExceeded {
                needed: n as u128,
                cap: budget,
            })
        } else {
            Ok(())
        }
    };
    while let Some((j, c)) = stack.pop() {
        let q = cell_box(region, bases, j, &c);
        let class = classifier.classify(&q);
        if class == Class::Out {
            continue;
        }
        if j == level {
            let idx = index(&c);
            may.push(idx);
            if class == Class::In {
                inside.push(idx);
            }
            over(may.len())?;
            continue;
        }
        if class == Class::In {
            let k = level - j;
            let span: Vec<u64> = bases.iter().map(|b| (*b as u64).pow(k)).collect();
            let count: u64 = span.iter().product();
            over(may.len() + count as usize)?;
            for_each_offset(&span, |off| {
                let full: Vec<u64> = c.iter().zip(&span).zip(off).map(|((c, s), o)| c * s + o).collect();
                let idx = index(&full);
                may.push(idx);
                inside.push(idx);
            });
            continue;
        }
        for_each_offset(&bases.iter().map(|b| *b as u64).collect::<Vec<_>>(), |off| {
            let child: Vec<u64> = c.iter().zip(bases).zip(off).map(|((c, b), o)| c * *b as u64 + o).collect();
            stack.push((j + 1, child));
        });
    }
    may.sort_unstable();
    inside.sort_unstable();
    Ok((may, inside))
}

fn for_each_offset(span: &[u64], mut f: impl FnMut(&[u64])) {
    let mut off = vec![0u64; span.len()];
    loop {
        f(&off);
        let mut i = span.len();
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            off[i] += 1;
            if off[i] < span[i] {
                break;
            }
            off[i] = 0;
        }
    }
}

/// Closed intervals of the stage-`stage` set of a one-dimensional descriptor,
/// sorted and in the descriptor's own coordinates.
pub fn stage_intervals(desc: &SetDescriptor, stage: u32, budget: u64) -> Result<Vec<[f64; 2]>, VerifyError> {
    if desc.dim() != 1 {
        return Err(VerifyError::NotOneDimensional);
    }
    let (core, factor, offset) = desc.peel();
    let map = |x: f64| factor * x + offset[0];
    let mut out: Vec<[f64; 2]> = match core {
        SetDescriptor::Explicit { hull, gaps, .. } => {
            let h = hull.bounding_box();
            let mut cuts: Vec<[f64; 2]> = gaps
                .iter()
                .map(|g| {
                    let b = g.bounding_box();
                    [b.lower[0], b.upper[0]]
                })
                .collect();
            cuts.sort_by(|a, b| a[0].total_cmp(&b[0]));
            let mut out = Vec::new();
            let mut start = h.lower[0];
            for c in cuts {
                if c[0] >= start {
                    out.push([start, c[0]]);
                }
                start = start.max(c[1]);
            }
            out.push([start, h.upper[0]]);
            out
        }
        _ => {
            let count = 1u128 << stage.min(127);
            let per = children_1d(core, [0.0, 1.0]).len() as u128;
            let needed = per.checked_pow(stage).unwrap_or(u128::MAX).max(count.min(1));
            if needed > budget as u128 {
                return Err(VerifyError::BudgetExceeded { needed, cap: budget });
            }
            let mut level = vec![root_interval(core)];
            for _ in 0..stage {
                level = level.iter().flat_map(|iv| children_1d(core, *iv)).collect();
            }
            level
        }
    };
    for iv in out.iter_mut() {
        let (a, b) = (map(iv[0]), map(iv[1]));
        *iv = [a.min(b), a.max(b)];
    }
    out.sort_by(|a, b| a[0].total_cmp(&b[0]));
    Ok(out)
}

fn root_interval(core: &SetDescriptor) -> [f64; 2] {
    match core {
        SetDescriptor::CentralCantor1D { interval, .. } => *interval,
        _ => [0.0, 1.0],
    }
}

/// Kept subintervals of one construction step in one dimension.
fn children_1d(core: &SetDescriptor, iv: [f64; 2]) -> Vec<[f64; 2]> {
    let len = iv[1] - iv[0];
    match core {
        SetDescriptor::CentralCantor1D { keep_ratio, .. } => {
            vec![[iv[0], iv[0] + keep_ratio * len], [iv[1] - keep_ratio * len, iv[1]]]
        }
        SetDescriptor::Sponge { grid, .. } => {
            let n = grid[0] as u64;
            (0..n)
                .filter(|j| *j != n / 2)
                .map(|j| [iv[0] + len * j as f64 / n as f64, iv[0] + len * (j + 1) as f64 / n as f64])
                .collect()
        }
        _ => vec![iv],
    }
}

/// Rasterize at `level` on the set's natural grid.
pub fn rasterize(desc: &SetDescriptor, level: u32, budget: u64) -> Result<CellGrid, VerifyError> {
    let (region, bases) = natural_grid(desc);
    rasterize_on(desc, &region, &bases, level, budget)
}

/// Rasterize onto a given grid.
pub fn rasterize_on(desc: &SetDescriptor, region: &AxisBox, bases: &[u32], level: u32, budget: u64) -> Result<CellGrid, VerifyError> {
    desc.validate()?;
    if region.dim() != desc.dim() || bases.len() != desc.dim() {
        return Err(VerifyError::DimensionMismatch(desc.dim(), region.dim()));
    }
    let stage = stage_at(desc, level);
    let total = total_cells(bases, level).unwrap_or(u128::MAX);
    if total > u64::MAX as u128 {
        return Err(VerifyError::BudgetExceeded {
            needed: total,
            cap: budget,
        });
    }
    let (core, _, _) = desc.peel();
    let (may, inside) = match core {
        SetDescriptor::Sponge { grid, .. } if (region, bases) == (&natural_grid(desc).0, grid.as_slice()) => {
            sponge_raster(grid, stage, level, budget)?
        }
        _ if desc.dim() == 1 && desc.is_generative() => {
            let ivs = Intervals(stage_intervals(desc, stage, budget)?);
            subdivide(region, bases, level, &ivs, budget)?
        }
        _ => {
            let en = enumerate_gaps(
                desc,
                &EnumerateOptions {
                    depth: Some(stage),
                    cap: budget.min(usize::MAX as u64) as usize,
                },
            )?;
            let set = GapSet {
                hull: en.hull.clone(),
                index: ShapeIndex::new(en.gaps.iter().map(|g| &g.shape)),
            };
            subdivide(region, bases, level, &set, budget)?
        }
    };
    Ok(CellGrid {
        dim: desc.dim(),
        region: region.clone(),
        bases: bases.to_vec(),
        level,
        stage,
        may,
        inside,
    })
}

fn sponge_raster(grid: &[u32], stage: u32, level: u32, budget: u64) -> Result<(Vec<u64>, Vec<u64>), VerifyError> {
    let kept = (grid.iter().map(|n| *n as u128).product::<u128>() - 1).pow(stage);
    let spread: u128 = grid.iter().map(|n| *n as u128).product::<u128>().pow(level - stage);
    let needed = kept * spread;
    if needed > budget as u128 {
        return Err(VerifyError::BudgetExceeded { needed, cap: budget });
    }
    let m: Vec<u64> = grid.iter().map(|n| (*n as u64).pow(level)).collect();
    let span: Vec<u64> = grid.iter().map(|n| (*n as u64).pow(level - stage)).collect();
    let mut cells = Vec::with_capacity(needed as usize);
    for c in sponge_cells(grid, stage) {
        for_each_offset(&span, |off| {
            let idx = c
                .iter()
                .zip(&span)
                .zip(off)
                .zip(&m)
                .fold(0u64, |acc, (((c, s), o), n)| acc * n + c * s + o);
            cells.push(idx);
        });
    }
    cells.sort_unstable();
    Ok((cells.clone(), cells))
}

/// Membership of a point in the stage-`stage` set, decided directly from the
/// construction (digit expansions for sponges, nested intervals for central
/// Cantor sets, gap lists for explicit sets). Closed semantics.
pub fn contains_point_at_depth(desc: &SetDescriptor, p: &[f64], stage: u32) -> bool {
    let (core, factor, offset) = desc.peel();
    let q: Vec<f64> = p.iter().zip(&offset).map(|(x, t)| (x - t) / factor).collect();
    match core {
        SetDescriptor::Sponge { grid, .. } => sponge_point(grid, &q, stage),
        SetDescriptor::CentralCantor1D { interval, keep_ratio, .. } => {
            cantor_point(*keep_ratio, *interval, q[0], stage)
        }
        SetDescriptor::Explicit { hull, gaps, .. } => {
            let tol = SNAP * hull.diam();
            hull.distance_to_point(&q) <= tol && !gaps.iter().any(|g| g.contains_open(&q) && !near_boundary(g, &q, tol))
        }
        _ => unreachable!("peel returns a core descriptor"),
    }
}

fn near_boundary(g: &Shape, p: &[f64], tol: f64) -> bool {
    match g {
        Shape::Box(b) => (0..p.len()).any(|i| p[i] - b.lower[i] <= tol || b.upper[i] - p[i] <= tol),
        Shape::Ball(b) => b.radius - crate::geometry::distance(p, &b.center) <= tol,
        Shape::Cells(_) => false,
    }
}

fn sponge_point(grid: &[u32], q: &[f64], stage: u32) -> bool {
    if q.iter().any(|x| *x < -SNAP || *x > 1.0 + SNAP) {
        return false;
    }
    let cands = |x: f64, n: u32| -> Vec<u32> {
        let t = x * n as f64;
        let f = t.floor();
        let mut v = Vec::new();
        if t - f < SNAP && f >= 1.0 {
            v.push(f as u32 - 1);
        }
        if f >= 0.0 && (f as u32) < n {
            v.push(f as u32);
        } else if f >= n as f64 {
            v.push(n - 1);
        }
        v.dedup();
        v
    };
    fn go(grid: &[u32], q: &[f64], left: u32, cands: &dyn Fn(f64, u32) -> Vec<u32>) -> bool {
        if left == 0 {
            return true;
        }
        let per_axis: Vec<Vec<u32>> = q.iter().zip(grid).map(|(x, n)| cands(*x, *n)).collect();
        let mut digits = vec![0usize; q.len()];
        loop {
            let chosen: Vec<u32> = digits.iter().enumerate().map(|(i, k)| per_axis[i][*k]).collect();
            let central = chosen.iter().zip(grid).all(|(a, n)| *a == n / 2);
            if !central {
                let next: Vec<f64> = q
                    .iter()
                    .zip(grid)
                    .zip(&chosen)
                    .map(|((x, n), a)| (x * *n as f64 - *a as f64).clamp(0.0, 1.0))
                    .collect();
                if go(grid, &next, left - 1, cands) {
                    return true;
                }
            }
            let mut i = q.len();
            loop {
                if i == 0 {
                    return false;
                }
                i -= 1;
                digits[i] += 1;
                if digits[i] < per_axis[i].len() {
                    break;
                }
                digits[i] = 0;
            }
        }
    }
    go(grid, q, stage, &cands)
}

fn cantor_point(r: f64, interval: [f64; 2], x: f64, stage: u32) -> bool {
    let len = interval[1] - interval[0];
    let mut t = (x - interval[0]) / len;
    if !(-SNAP..=1.0 + SNAP).contains(&t) {
        return false;
    }
    for _ in 0..stage {
        if t <= r + SNAP {
            t = (t / r).min(1.0);
        } else if t >= 1.0 - r - SNAP {
            t = ((t - (1.0 - r)) / r).max(0.0);
        } else {
            return false;
        }
    }
    true
}

/// Lower and upper bounds on the distance from `x` to a one-dimensional set:
/// the distance to its stage-`stage` set, and to the nearest stage endpoint
/// (endpoints belong to the set).
pub fn distance_to_set_1d(desc: &SetDescriptor, x: f64, stage: u32) -> Result<(f64, f64), VerifyError> {
    if desc.dim() != 1 {
        return Err(VerifyError::NotOneDimensional);
    }
    let (core, factor, offset) = desc.peel();
    let xc = (x - offset[0]) / factor;
    let (lo, hi) = match core {
        SetDescriptor::Explicit { .. } => {
            let ivs = stage_intervals(core, 0, u64::MAX)?;
            nearest(&ivs, xc)
        }
        _ => {
            let stage = stage_at(core, stage);
            let mut best_lo = f64::INFINITY;
            let mut best_hi = f64::INFINITY;
            let mut stack = vec![(root_interval(core), 0u32)];
            while let Some((iv, level)) = stack.pop() {
                let gap = (iv[0] - xc).max(xc - iv[1]).max(0.0);
                if gap > best_hi {
                    continue;
                }
                best_hi = best_hi.min((xc - iv[0]).abs()).min((xc - iv[1]).abs());
                if level == stage {
                    best_lo = best_lo.min(gap);
                    continue;
                }
                for c in children_1d(core, iv) {
                    stack.push((c, level + 1));
                }
            }
            (best_lo, best_hi)
        }
    };
    Ok((lo * factor, hi * factor))
}

fn nearest(ivs: &[[f64; 2]], x: f64) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::INFINITY;
    for iv in ivs {
        lo = lo.min((iv[0] - x).max(x - iv[1]).max(0.0));
        hi = hi.min((x - iv[0]).abs()).min((x - iv[1]).abs());
    }
    (lo, hi)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum IntersectionVerdict {
    /// A closed cell contained in every stage set.
    NonemptyWitness { cell: AxisBox, level: u32 },
    PossiblyEmpty { level: u32 },
    /// The covers at this level are disjoint, so the sets are.
    CertifiedDisjoint { level: u32 },
}

impl IntersectionVerdict {
    pub fn kind(&self) -> &'static str {
        match self {
            IntersectionVerdict::NonemptyWitness { .. } => "nonempty_witness",
            IntersectionVerdict::PossiblyEmpty { .. } => "possibly_empty",
            IntersectionVerdict::CertifiedDisjoint { .. } => "certified_disjoint",
        }
    }
}

/// Intersect the level-`level` stages of several sets.
pub fn brute_intersection(specs: &[SetDescriptor], level: u32, budget: u64) -> Result<IntersectionVerdict, VerifyError> {
    let Some(first) = specs.first() else {
        return Err(VerifyError::DegenerateRange("no sets given".into()));
    };
    let d = first.dim();
    if let Some(s) = specs.iter().find(|s| s.dim() != d) {
        return Err(VerifyError::DimensionMismatch(d, s.dim()));
    }
    if d == 1 {
        let mut acc = stage_intervals(first, stage_at(first, level), budget)?;
        for s in &specs[1..] {
            let other = stage_intervals(s, stage_at(s, level), budget)?;
            acc = intersect_intervals(&acc, &other);
        }
        return Ok(match acc.first() {
            Some(iv) => IntersectionVerdict::NonemptyWitness {
                cell: AxisBox::new(vec![iv[0]], vec![iv[1]]),
                level,
            },
            None => IntersectionVerdict::CertifiedDisjoint { level },
        });
    }
    let grid = natural_grid(first);
    let shared = if specs.iter().all(|s| natural_grid(s) == grid) {
        grid
    } else {
        let region = specs
            .iter()
            .map(|s| s.hull().bounding_box())
            .reduce(|a, b| a.union_hull(&b))
            .expect("nonempty");
        (region, vec![2; d])
    };
    let grids = specs
        .iter()
        .map(|s| rasterize_on(s, &shared.0, &shared.1, level, budget))
        .collect::<Result<Vec<_>, _>>()?;
    let (head, rest) = grids.split_first().expect("nonempty");
    if let Some(idx) = head
        .inside
        .iter()
        .find(|i| rest.iter().all(|g| g.is_inside(**i)))
    {
        return Ok(IntersectionVerdict::NonemptyWitness {
            cell: head.cell_box(*idx),
            level,
        });
    }
    let touching = head.may.iter().any(|i| {
        let nb = head.neighbours(*i);
        rest.iter().all(|g| nb.iter().any(|j| g.is_may(*j)))
    });
    Ok(if touching {
        IntersectionVerdict::PossiblyEmpty { level }
    } else {
        IntersectionVerdict::CertifiedDisjoint { level }
    })
}

fn intersect_intervals(a: &[[f64; 2]], b: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        let lo = a[i][0].max(b[j][0]);
        let hi = a[i][1].min(b[j][1]);
        if lo <= hi {
            out.push([lo, hi]);
        }
        if a[i][1] < b[j][1] {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionEstimate {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
    /// `(cell side, occupied cells)` per level.
    pub scales: Vec<(f64, u64)>,
    pub note: String,
}

/// Least-squares slope of `ln count` against `ln(1/side)` over the given
/// levels, on the set's natural grid.
pub fn box_counting(desc: &SetDescriptor, levels: &[u32], budget: u64) -> Result<DimensionEstimate, VerifyError> {
    let mut levels = levels.to_vec();
    levels.sort_unstable();
    levels.dedup();
    if levels.len() < 4 {
        return Err(VerifyError::DegenerateRange(format!(
            "box counting needs at least 4 distinct levels, got {}",
            levels.len()
        )));
    }
    let mut scales = Vec::with_capacity(levels.len());
    for &k in &levels {
        let g = rasterize(desc, k, budget)?;
        let side = (0..g.dim).map(|i| g.cell_side(i)).fold(0.0, f64::max);
        scales.push((side, g.may.len() as u64));
    }
    let pts: Vec<(f64, f64)> = scales.iter().map(|(s, n)| ((1.0 / s).ln(), (*n as f64).ln())).collect();
    let (slope, intercept, residual) = least_squares(&pts)?;
    let (_, bases) = natural_grid(desc);
    let note = if bases.windows(2).any(|w| w[0] != w[1]) {
        "anisotropic grid: cell side taken as the longest edge".to_string()
    } else {
        format!("base-{} grid, levels {:?}", bases[0], levels)
    };
    Ok(DimensionEstimate {
        slope,
        intercept,
        residual,
        scales,
        note,
    })
}

fn least_squares(pts: &[(f64, f64)]) -> Result<(f64, f64, f64), VerifyError> {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(VerifyError::DegenerateRange("all scales coincide".into()));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    Ok((slope, intercept, (rss / n).sqrt()))
}

/// Translates `x` with `x + λ·a ∈ C` for every `a` in the pattern, certified
/// at the level-`level` stage. Each candidate anchors the first pattern
/// point at the centre of an inside cell; the rest must land in inside cells
/// too, and every returned translate is rechecked point by point.
pub fn pattern_search(desc: &SetDescriptor, pattern: &[Point], lambda: f64, level: u32, budget: u64) -> Result<Vec<Point>, VerifyError> {
    let Some(anchor) = pattern.first() else {
        return Err(VerifyError::DegenerateRange("empty pattern".into()));
    };
    if let Some(a) = pattern.iter().find(|a| a.len() != desc.dim()) {
        return Err(VerifyError::DimensionMismatch(desc.dim(), a.len()));
    }
    let grid = rasterize(desc, level, budget)?;
    let stage = grid.stage;
    let mut out = Vec::new();
    for &idx in &grid.inside {
        let centre = grid.cell_box(idx).center();
        let lands = pattern.iter().skip(1).all(|a| {
            let q: Vec<f64> = centre
                .iter()
                .zip(a)
                .zip(anchor)
                .map(|((c, a), a0)| c + lambda * (a - a0))
                .collect();
            grid.locate(&q).iter().any(|j| grid.is_inside(*j))
        });
        if !lands {
            continue;
        }
        let x: Point = centre.iter().zip(anchor).map(|(c, a0)| c - lambda * a0).collect();
        let verified = pattern.iter().all(|a| {
            let p: Vec<f64> = x.iter().zip(a).map(|(x, a)| x + lambda * a).collect();
            contains_point_at_depth(desc, &p, stage)
        });
        if verified {
            out.push(x);
        }
    }
    if out.is_empty() {
        return Err(VerifyError::EmptyAtThisDepth(level));
    }
    Ok(out)
}
