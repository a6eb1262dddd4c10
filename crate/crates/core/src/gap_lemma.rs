//! Gap-lemma decisions: when do two thick compact sets have to intersect?
//!
//! Two sets whose thickness product exceeds one intersect unless one of them
//! lies inside a gap of the other. This module decides the containment
//! hypothesis exactly for convex gaps, tests linkedness of gaps, and runs the
//! nested-gap refinement that locates a common point.

use serde::Serialize;
use thiserror::Error;

use crate::descriptor::SetDescriptor;
use crate::enumerate::{enumerate_gaps, generation_diam, EnumerateError, EnumerateOptions, GapEnumeration};
use crate::geometry::{Hull, Point, Shape};
use crate::spatial::ShapeIndex;
use crate::thickness::{thickness_rd, ThicknessError, ThicknessReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GapLemmaError {
    #[error(transparent)]
    Thickness(#[from] ThicknessError),
    #[error(transparent)]
    Enumerate(#[from] EnumerateError),
    #[error("linkedness is only decided for boxes, balls and hull exteriors")]
    UnsupportedShapePair,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("containment cannot be decided: {0}")]
    Inconclusive(String),
    #[error("the gaps visited at step {step} are not linked")]
    NotLinkedSets { step: usize },
    #[error("no common point located within {0} iterations")]
    IterationBudgetExceeded(usize),
    #[error("thickness product is not certified above one ({0})")]
    ThicknessHypothesis(f64),
}

/// A complementary component: a bounded gap or the exterior of a hull.
#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    Bounded(Shape),
    Exterior(Hull),
}

impl Region {
    fn check(&self) -> Result<(), GapLemmaError> {
        match self {
            Region::Bounded(Shape::Cells(_)) => Err(GapLemmaError::UnsupportedShapePair),
            _ => Ok(()),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Region::Bounded(s) => s.dim(),
            Region::Exterior(h) => h.dim(),
        }
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        match self {
            Region::Bounded(s) => s.contains_open(p),
            Region::Exterior(h) => !h.contains_closed(p),
        }
    }

    fn centre(&self) -> Point {
        match self {
            Region::Bounded(s) => s.center(),
            Region::Exterior(h) => h.center(),
        }
    }

    fn boundary_samples(&self, toward: &[f64]) -> Vec<Point> {
        match self {
            Region::Bounded(s) => s.boundary_samples(toward),
            Region::Exterior(h) => h.boundary_samples(toward),
        }
    }

    /// How far `p` is from the region (zero inside or on its boundary).
    fn distance_outside(&self, p: &[f64]) -> f64 {
        match self {
            Region::Bounded(s) => s.distance_to_point(p),
            Region::Exterior(h) => h.depth_of_point(p),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkTag {
    Disjoint,
    Linked,
    /// The sets meet but one boundary is swallowed by the other set.
    NotLinked,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Linkedness {
    pub tag: LinkTag,
    pub linked: bool,
    /// A point of `U ∩ V`.
    pub common: Option<Point>,
    /// A point of `∂U \ V`.
    pub u_boundary_outside_v: Option<Point>,
    /// A point of `∂V \ U`.
    pub v_boundary_outside_u: Option<Point>,
}

fn regions_meet(u: &Region, v: &Region) -> bool {
    match (u, v) {
        (Region::Bounded(a), Region::Bounded(b)) => a.open_intersects(b),
        (Region::Exterior(h), Region::Bounded(s)) | (Region::Bounded(s), Region::Exterior(h)) => {
            !h.contains_shape(s)
        }
        (Region::Exterior(_), Region::Exterior(_)) => true,
    }
}

/// Whether `∂U` leaves `V`.
fn boundary_escapes(u: &Region, v: &Region) -> bool {
    match (u, v) {
        (Region::Bounded(a), Region::Bounded(b)) => !a.closure_inside_open(b),
        (Region::Bounded(a), Region::Exterior(h)) => {
            let apart = a.distance_to(&h.as_shape()) > 0.0;
            let swallowed = h.as_shape().closure_inside_open(a);
            !(apart || swallowed)
        }
        (Region::Exterior(h), Region::Bounded(b)) => !h.as_shape().closure_inside_open(b),
        (Region::Exterior(h1), Region::Exterior(h2)) => {
            let apart = h1.as_shape().distance_to(&h2.as_shape()) > 0.0;
            let inside = h2.as_shape().closure_inside_open(&h1.as_shape());
            !(apart || inside)
        }
    }
}

/// A boundary point of `of` outside `avoid`, as far from `avoid` as the
/// candidates allow.
fn boundary_witness(of: &Region, avoid: &Region) -> Option<Point> {
    let consider = |best: &mut Option<(f64, Point)>, p: Point| {
        if avoid.contains(&p) {
            return;
        }
        let score = avoid.distance_outside(&p);
        if best.as_ref().is_none_or(|(s, _)| score > *s) {
            *best = Some((score, p));
        }
    };
    let mut best: Option<(f64, Point)> = None;
    for p in of.boundary_samples(&avoid.centre()) {
        consider(&mut best, p);
    }
    if best.is_none() {
        for p in dense_boundary_samples(of) {
            consider(&mut best, p);
        }
    }
    best.map(|(_, p)| p)
}

fn dense_boundary_samples(r: &Region) -> Vec<Point> {
    let shape = match r {
        Region::Bounded(s) => s.clone(),
        Region::Exterior(h) => h.as_shape(),
    };
    let d = shape.dim();
    let steps = 64usize;
    let mut out = Vec::new();
    match &shape {
        Shape::Box(b) => {
            for axis in 0..d {
                for side in [b.lower[axis], b.upper[axis]] {
                    let free: Vec<usize> = (0..d).filter(|i| *i != axis).collect();
                    let total = (steps + 1).pow(free.len().min(2) as u32);
                    for k in 0..total {
                        let mut p = b.center();
                        p[axis] = side;
                        let mut rem = k;
                        for &i in free.iter().take(2) {
                            let t = (rem % (steps + 1)) as f64 / steps as f64;
                            rem /= steps + 1;
                            p[i] = b.lower[i] + t * b.side(i);
                        }
                        out.push(p);
                    }
                }
            }
        }
        Shape::Ball(b) if d == 2 => {
            for k in 0..steps * 4 {
                let a = std::f64::consts::TAU * k as f64 / (steps * 4) as f64;
                out.push(vec![b.center[0] + b.radius * a.cos(), b.center[1] + b.radius * a.sin()]);
            }
        }
        _ => {}
    }
    out
}

fn common_point(u: &Region, v: &Region) -> Option<Point> {
    let mut candidates: Vec<Point> = Vec::new();
    for r in [u, v] {
        let c = r.centre();
        candidates.push(c.clone());
        let other = if std::ptr::eq(r, u) { v } else { u };
        let oc = other.centre();
        for s in r.boundary_samples(&oc) {
            for t in [1e-9, 1e-6, 1e-3, 0.1, 0.5] {
                candidates.push(s.iter().zip(&c).map(|(a, b)| a + t * (b - a)).collect());
            }
        }
    }
    if let (Region::Exterior(h1), Region::Exterior(h2)) = (u, v) {
        let bb = h1.bounding_box().union_hull(&h2.bounding_box());
        candidates.push(bb.upper.iter().map(|x| x + 1.0).collect());
    }
    candidates.into_iter().find(|p| u.contains(p) && v.contains(p))
}

/// Decide whether two complementary components are linked: they meet, and
/// each boundary leaves the other component.
pub fn linked(u: &Region, v: &Region) -> Result<Linkedness, GapLemmaError> {
    u.check()?;
    v.check()?;
    if u.dim() != v.dim() {
        return Err(GapLemmaError::DimensionMismatch(u.dim(), v.dim()));
    }
    let meet = regions_meet(u, v);
    let u_out = boundary_escapes(u, v);
    let v_out = boundary_escapes(v, u);
    let linked = meet && u_out && v_out;
    let tag = if !meet {
        LinkTag::Disjoint
    } else if linked {
        LinkTag::Linked
    } else {
        LinkTag::NotLinked
    };
    Ok(Linkedness {
        tag,
        linked,
        common: if meet { common_point(u, v) } else { None },
        u_boundary_outside_v: if u_out { boundary_witness(u, v) } else { None },
        v_boundary_outside_u: if v_out { boundary_witness(v, u) } else { None },
    })
}

/// Which gap of the other set contains a set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GapRef {
    External,
    Bounded(usize),
}

/// Enumerate until every gap at least `min_diam` across is present.
fn enumerate_down_to(desc: &SetDescriptor, min_diam: f64, opts: &EnumerateOptions) -> Result<GapEnumeration, GapLemmaError> {
    if !desc.is_generative() {
        return Ok(enumerate_gaps(desc, opts)?);
    }
    let (core, factor, _) = desc.peel();
    let mut depth = opts.depth.unwrap_or(1).max(1);
    while generation_diam(core, depth + 1) * factor >= min_diam && depth < 64 {
        depth += 1;
    }
    let o = EnumerateOptions {
        depth: Some(depth),
        cap: opts.cap,
    };
    enumerate_gaps(desc, &o).map_err(|e| match e {
        EnumerateError::DepthOverflow { .. } => GapLemmaError::Inconclusive(format!(
            "gaps down to diameter {min_diam} exceed the enumeration cap"
        )),
        other => other.into(),
    })
}

/// Whether `a` lies in a single gap of `b` (including the unbounded one).
/// Exact for convex gaps: `a` lies in a bounded convex gap iff its hull does,
/// and `a` avoids the hull of `b` iff the hulls are disjoint or the hull of
/// `b` lies in a gap of `a`.
pub fn containment_in_gap(a: &SetDescriptor, b: &SetDescriptor, opts: &EnumerateOptions) -> Result<Option<GapRef>, GapLemmaError> {
    if a.dim() != b.dim() {
        return Err(GapLemmaError::DimensionMismatch(a.dim(), b.dim()));
    }
    let (ha, hb) = (a.hull(), b.hull());
    if ha.as_shape().distance_to(&hb.as_shape()) > 0.0 {
        return Ok(Some(GapRef::External));
    }
    if contained_in_bounded_gap(&hb, a, opts)?.is_some() {
        return Ok(Some(GapRef::External));
    }
    Ok(contained_in_bounded_gap(&ha, b, opts)?.map(GapRef::Bounded))
}

fn contained_in_bounded_gap(hull: &Hull, set: &SetDescriptor, opts: &EnumerateOptions) -> Result<Option<usize>, GapLemmaError> {
    let en = enumerate_down_to(set, hull.diam(), opts)?;
    let inner = hull.as_shape();
    for (i, g) in en.gaps.iter().enumerate() {
        if g.diam < hull.diam() {
            break;
        }
        if matches!(g.shape, Shape::Cells(_)) {
            return Err(GapLemmaError::Inconclusive(format!("gap {i} is not convex")));
        }
        if inner.closure_inside_open(&g.shape) {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum FailedHypothesis {
    /// Set `which` (1 or 2) lies in a gap of the other one.
    ContainedInGap { which: u8, gap: GapRef },
    ThicknessProductAtMostOne { product: f64 },
    /// The certified bracket of the product straddles one.
    ThicknessUnknown { lower: f64, upper: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum GapLemmaTag {
    IntersectGuaranteed,
    HypothesisFails(FailedHypothesis),
    /// The hypotheses fail, but the hull boundaries share this point.
    TriviallyIntersect { point: Point },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapLemmaVerdict {
    pub tag: GapLemmaTag,
    /// Certified lower bound and upper bound on each thickness.
    pub tau1: (f64, f64),
    pub tau2: (f64, f64),
    /// Product of the certified lower bounds.
    pub tau_product: f64,
    pub detail: String,
}

impl GapLemmaTag {
    /// The verdict kind without its payload, for comparing verdicts of
    /// swapped arguments.
    pub fn kind(&self) -> &'static str {
        match self {
            GapLemmaTag::IntersectGuaranteed => "intersect_guaranteed",
            GapLemmaTag::HypothesisFails(FailedHypothesis::ContainedInGap { .. }) => "containment_in_gap",
            GapLemmaTag::HypothesisFails(FailedHypothesis::ThicknessProductAtMostOne { .. }) => "thickness_product_at_most_one",
            GapLemmaTag::HypothesisFails(FailedHypothesis::ThicknessUnknown { .. }) => "thickness_unknown",
            GapLemmaTag::TriviallyIntersect { .. } => "trivially_intersect",
        }
    }
}

fn thickness_bracket(report: &ThicknessReport) -> (f64, f64) {
    (report.certified_lower(), report.value)
}

fn product(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        a * b
    }
}

/// One-dimensional hulls sharing an endpoint share a point of both sets.
fn hull_contact(a: &Hull, b: &Hull) -> Option<Point> {
    if a.dim() != 1 {
        return None;
    }
    let (x, y) = (a.bounding_box(), b.bounding_box());
    for p in [x.lower[0], x.upper[0]] {
        if p == y.lower[0] || p == y.upper[0] {
            return Some(vec![p]);
        }
    }
    None
}

pub fn gap_lemma_decide(c1: &SetDescriptor, c2: &SetDescriptor, opts: &EnumerateOptions) -> Result<GapLemmaVerdict, GapLemmaError> {
    let r1 = crate::thickness::thickness(c1, opts)?;
    let r2 = crate::thickness::thickness(c2, opts)?;
    let (tau1, tau2) = (thickness_bracket(&r1), thickness_bracket(&r2));
    let fails = |h: FailedHypothesis| -> GapLemmaTag {
        match hull_contact(&c1.hull(), &c2.hull()) {
            Some(point) => GapLemmaTag::TriviallyIntersect { point },
            None => GapLemmaTag::HypothesisFails(h),
        }
    };
    let tag = if let Some(gap) = containment_in_gap(c1, c2, opts)? {
        GapLemmaTag::HypothesisFails(FailedHypothesis::ContainedInGap { which: 1, gap })
    } else if let Some(gap) = containment_in_gap(c2, c1, opts)? {
        GapLemmaTag::HypothesisFails(FailedHypothesis::ContainedInGap { which: 2, gap })
    } else {
        let lower = product(tau1.0, tau2.0);
        let upper = product(tau1.1, tau2.1);
        if lower > 1.0 {
            GapLemmaTag::IntersectGuaranteed
        } else if upper <= 1.0 {
            fails(FailedHypothesis::ThicknessProductAtMostOne { product: upper })
        } else {
            fails(FailedHypothesis::ThicknessUnknown { lower, upper })
        }
    };
    let tau_product = product(tau1.0, tau2.0);
    let detail = match &tag {
        GapLemmaTag::IntersectGuaranteed => format!("certified thickness product {tau_product} > 1 and neither set lies in a gap of the other"),
        GapLemmaTag::HypothesisFails(FailedHypothesis::ContainedInGap { which, gap }) => {
            format!("set {which} lies in gap {gap:?} of the other set")
        }
        GapLemmaTag::HypothesisFails(FailedHypothesis::ThicknessProductAtMostOne { product }) => {
            format!("thickness product {product} does not exceed 1")
        }
        GapLemmaTag::HypothesisFails(FailedHypothesis::ThicknessUnknown { lower, upper }) => {
            format!("thickness product is only known to lie in [{lower}, {upper}]")
        }
        GapLemmaTag::TriviallyIntersect { point } => format!("hull boundaries share the point {point:?}"),
    };
    Ok(GapLemmaVerdict {
        tag,
        tau1,
        tau2,
        tau_product,
        detail,
    })
}

/// Which component of one set a refinement step is standing in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Component {
    External,
    Gap(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefineStep {
    pub iteration: usize,
    pub u: Component,
    pub v: Component,
    /// Point of one set examined at this step.
    pub point: Point,
    /// Which set the point is known to lie in (1 or 2).
    pub lies_in: u8,
    /// At least one of the two gaps is separated from everything earlier by
    /// more than the other gap's diameter.
    pub dichotomy: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefineResult {
    pub point: Point,
    pub iterations: usize,
    /// The point lies in both enumerated approximations (not just near them).
    pub in_both_approximations: bool,
    pub trace: Vec<RefineStep>,
}

struct Side {
    en: GapEnumeration,
    sep: Vec<f64>,
}

impl Side {
    fn region(&self, c: Component) -> Region {
        match c {
            Component::External => Region::Exterior(self.en.hull.clone()),
            Component::Gap(i) => Region::Bounded(self.en.gaps[i].shape.clone()),
        }
    }

    fn diam(&self, c: Component) -> f64 {
        match c {
            Component::External => f64::INFINITY,
            Component::Gap(i) => self.en.gaps[i].diam,
        }
    }

    fn sep(&self, c: Component) -> f64 {
        match c {
            Component::External => f64::INFINITY,
            Component::Gap(i) => self.sep[i],
        }
    }
}

/// Locate a point within `eps` of both sets by walking linked gaps.
///
/// Starting from the two unbounded gaps, the walk repeatedly takes a boundary
/// point of the current gap of one set (which therefore lies in that set) and
/// looks it up among the gaps of the other set. Either it lies in none of
/// them, and is common to both, or it lies in a strictly later gap, which
/// replaces the current one. Gaps shrink along the walk, so once the gap
/// containing the point is smaller than `eps` the point is returned.
pub fn linked_refine(c1: &SetDescriptor, c2: &SetDescriptor, eps: f64, max_iter: usize, opts: &EnumerateOptions) -> Result<RefineResult, GapLemmaError> {
    if c1.dim() != c2.dim() {
        return Err(GapLemmaError::DimensionMismatch(c1.dim(), c2.dim()));
    }
    let e1 = enumerate_down_to(c1, eps, opts)?;
    let e2 = enumerate_down_to(c2, eps, opts)?;
    let r1 = thickness_rd(&e1);
    let r2 = thickness_rd(&e2);
    let lower = product(
        if e1.is_complete() { r1.value } else { crate::thickness::thickness(c1, &depth_of(&e1, opts))?.certified_lower() },
        if e2.is_complete() { r2.value } else { crate::thickness::thickness(c2, &depth_of(&e2, opts))?.certified_lower() },
    );
    if !(lower > 1.0) {
        return Err(GapLemmaError::ThicknessHypothesis(lower));
    }
    let sides = [
        Side {
            sep: r1.ratios.iter().map(|r| r.separation).collect(),
            en: e1,
        },
        Side {
            sep: r2.ratios.iter().map(|r| r.separation).collect(),
            en: e2,
        },
    ];
    let index1 = ShapeIndex::new(sides[0].en.gaps.iter().map(|g| &g.shape));
    let index2 = ShapeIndex::new(sides[1].en.gaps.iter().map(|g| &g.shape));
    let locate = |side: usize, p: &[f64]| -> Option<usize> {
        let idx = if side == 0 { &index1 } else { &index2 };
        idx.containing(p).first().copied()
    };

    let mut u = Component::External;
    let mut v = Component::External;
    let mut trace = Vec::new();
    let check = |u: Component, v: Component, step: usize| -> Result<(), GapLemmaError> {
        if linked(&sides[0].region(u), &sides[1].region(v))?.linked {
            Ok(())
        } else {
            Err(GapLemmaError::NotLinkedSets { step })
        }
    };
    check(u, v, 0)?;
    for iteration in 0..max_iter {
        // Move the side whose gap is not separated enough: when U is far
        // from everything earlier compared with diam V, a boundary point of V
        // outside U can only fall in a later gap of the first set.
        let mut dichotomy = true;
        let move_u = match (u, v) {
            (Component::External, Component::External) => false,
            (Component::External, _) => true,
            (_, Component::External) => false,
            _ => {
                let first = sides[0].sep(u) > sides[1].diam(v);
                let second = sides[1].sep(v) > sides[0].diam(u);
                dichotomy = first || second;
                first
            }
        };
        let (from, to, from_c, to_c) = if move_u { (1, 0, v, u) } else { (0, 1, u, v) };
        let p = boundary_witness(&sides[from].region(from_c), &sides[to].region(to_c))
            .ok_or(GapLemmaError::NotLinkedSets { step: iteration })?;
        trace.push(RefineStep {
            iteration,
            u,
            v,
            point: p.clone(),
            lies_in: from as u8 + 1,
            dichotomy,
        });
        if !sides[to].en.hull.contains_closed(&p) {
            return Err(GapLemmaError::NotLinkedSets { step: iteration });
        }
        match locate(to, &p) {
            None => {
                return Ok(RefineResult {
                    point: p,
                    iterations: iteration + 1,
                    in_both_approximations: true,
                    trace,
                });
            }
            Some(i) => {
                let next = Component::Gap(i);
                if sides[to].diam(next) < eps {
                    return Ok(RefineResult {
                        point: p,
                        iterations: iteration + 1,
                        in_both_approximations: false,
                        trace,
                    });
                }
                if move_u {
                    u = next;
                } else {
                    v = next;
                }
                check(u, v, iteration + 1)?;
            }
        }
    }
    Err(GapLemmaError::IterationBudgetExceeded(max_iter))
}

fn depth_of(en: &GapEnumeration, opts: &EnumerateOptions) -> EnumerateOptions {
    EnumerateOptions {
        depth: en.truncated_at,
        cap: opts.cap,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{AxisBox, Ball};

    fn interval(a: f64, b: f64) -> Region {
        Region::Bounded(Shape::Box(AxisBox::new(vec![a], vec![b])))
    }

    #[test]
    fn overlapping_intervals_are_linked() {
        let l = linked(&interval(0.0, 2.0), &interval(1.0, 3.0)).unwrap();
        assert!(l.linked);
        assert_eq!(l.u_boundary_outside_v, Some(vec![0.0]));
        assert_eq!(l.v_boundary_outside_u, Some(vec![3.0]));
        assert!(l.common.is_some());
    }

    #[test]
    fn nested_intervals_are_not_linked() {
        let l = linked(&interval(0.0, 3.0), &interval(1.0, 2.0)).unwrap();
        assert!(!l.linked);
        assert!(l.v_boundary_outside_u.is_none());
    }

    #[test]
    fn disjoint_balls_are_not_linked() {
        let a = Region::Bounded(Shape::Ball(Ball::new(vec![0.0, 0.0], 1.0)));
        let b = Region::Bounded(Shape::Ball(Ball::new(vec![3.0, 0.0], 1.0)));
        assert!(!linked(&a, &b).unwrap().linked);
        let c = Region::Bounded(Shape::Ball(Ball::new(vec![1.5, 0.0], 1.0)));
        let l = linked(&a, &c).unwrap();
        assert!(l.linked);
        let w = l.u_boundary_outside_v.unwrap();
        assert!(!c.contains(&w));
    }

    #[test]
    fn exterior_and_gap() {
        let hull = Region::Exterior(Hull::Box(AxisBox::new(vec![0.0], vec![1.0])));
        assert!(linked(&hull, &interval(0.5, 1.5)).unwrap().linked);
        assert!(!linked(&hull, &interval(0.2, 0.8)).unwrap().linked);
    }

    #[test]
    fn cells_are_unsupported() {
        let cells = Region::Bounded(Shape::Cells(vec![AxisBox::new(vec![0.0], vec![1.0])]));
        assert_eq!(
            linked(&cells, &interval(0.0, 1.0)),
            Err(GapLemmaError::UnsupportedShapePair)
        );
    }

    #[test]
    fn identical_sets_are_not_contained() {
        let c = SetDescriptor::central_cantor(0.0, 1.0, 0.4);
        assert_eq!(containment_in_gap(&c, &c, &EnumerateOptions::default()).unwrap(), None);
    }

    #[test]
    fn small_set_inside_a_gap() {
        let big = SetDescriptor::central_cantor(0.0, 1.0, 0.4);
        let small = SetDescriptor::central_cantor(0.45, 0.55, 0.4);
        assert_eq!(
            containment_in_gap(&small, &big, &EnumerateOptions::default()).unwrap(),
            Some(GapRef::Bounded(0))
        );
        // The big set avoids the hull of the small one, so it sits in the
        // small set's unbounded gap as well.
        assert_eq!(
            containment_in_gap(&big, &small, &EnumerateOptions::default()).unwrap(),
            Some(GapRef::External)
        );
    }

    #[test]
    fn refine_identical_sets_returns_hull_point() {
        let c = SetDescriptor::central_cantor(0.0, 1.0, 0.4);
        let r = linked_refine(&c, &c, 1e-6, 100, &EnumerateOptions::default()).unwrap();
        assert_eq!(r.iterations, 1);
        assert!(r.point == vec![0.0] || r.point == vec![1.0]);
    }

    fn fifths() -> SetDescriptor {
        SetDescriptor::central_cantor(0.0, 1.0, 0.4)
    }

    #[test]
    fn swallowed_ball_is_not_linked() {
        let small = Region::Bounded(Shape::Ball(Ball::new(vec![0.0, 0.0], 0.1)));
        let big = Region::Bounded(Shape::Ball(Ball::new(vec![0.0, 0.0], 1.0)));
        assert_eq!(linked(&small, &big).unwrap().tag, LinkTag::NotLinked);
        let far = Region::Bounded(Shape::Ball(Ball::new(vec![5.0, 0.0], 1.0)));
        assert_eq!(linked(&small, &far).unwrap().tag, LinkTag::Disjoint);
    }

    #[test]
    fn overlapping_balls_have_antipodal_witnesses() {
        let a = Region::Bounded(Shape::Ball(Ball::new(vec![0.0, 0.0], 1.0)));
        let b = Region::Bounded(Shape::Ball(Ball::new(vec![1.5, 0.0], 1.0)));
        let l = linked(&a, &b).unwrap();
        assert_eq!(l.tag, LinkTag::Linked);
        assert_eq!(l.u_boundary_outside_v, Some(vec![-1.0, 0.0]));
        assert_eq!(l.v_boundary_outside_u, Some(vec![2.5, 0.0]));
    }

    #[test]
    fn offset_fifths_intersect() {
        let a = fifths();
        let b = a.apply_homothety(1.0, &[0.3]).unwrap();
        let opts = EnumerateOptions::default();
        assert_eq!(containment_in_gap(&a, &b, &opts).unwrap(), None);
        let v = gap_lemma_decide(&a, &b, &opts).unwrap();
        assert_eq!(v.tag, GapLemmaTag::IntersectGuaranteed);
        assert!((v.tau_product - 4.0).abs() < 1e-8, "{v:?}");
        assert_eq!(gap_lemma_decide(&b, &a, &opts).unwrap().tag.kind(), v.tag.kind());
    }

    #[test]
    fn middle_thirds_product_is_one() {
        let a = SetDescriptor::middle_thirds();
        let b = a.apply_homothety(1.0, &[0.3]).unwrap();
        let v = gap_lemma_decide(&a, &b, &EnumerateOptions::default()).unwrap();
        assert_eq!(v.tag.kind(), "thickness_product_at_most_one");
    }

    #[test]
    fn translated_into_central_gap() {
        let a = fifths();
        let b = a.apply_homothety(0.1, &[0.45]).unwrap();
        let v = gap_lemma_decide(&a, &b, &EnumerateOptions::default()).unwrap();
        assert_eq!(v.tag.kind(), "containment_in_gap");
    }

    #[test]
    fn refine_offset_fifths() {
        let a = fifths();
        let b = a.apply_homothety(1.0, &[0.3]).unwrap();
        let eps = 1e-6;
        let r = linked_refine(&a, &b, eps, 10_000, &EnumerateOptions::default()).unwrap();
        let x = r.point[0];
        let (_, d1) = crate::verify::distance_to_set_1d(&a, x, 40).unwrap();
        let (_, d2) = crate::verify::distance_to_set_1d(&b, x, 40).unwrap();
        assert!(d1 <= eps && d2 <= eps, "{x} {d1} {d2} {:?}", r.trace);
    }
}
