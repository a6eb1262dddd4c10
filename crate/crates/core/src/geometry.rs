//! Axis-aligned boxes, Euclidean balls and finite unions of boxes in ℝᵈ.
//!
//! Gaps are open sets and hulls are closed sets; every distance here is the
//! distance between closures, which is what the thickness ratios need.

use serde::{Deserialize, Serialize};

/// A point of ℝᵈ.
pub type Point = Vec<f64>;

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// An axis-aligned box `[lower, upper]`, or its interior when used as a gap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisBox {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

/// A Euclidean ball; open as a gap, closed as a hull or a game move.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

/// Shape of a bounded gap (or of a set Alice erases).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Box(AxisBox),
    Ball(Ball),
    /// Interior of a finite union of boxes; not convex in general.
    Cells(Vec<AxisBox>),
}

impl AxisBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        debug_assert_eq!(lower.len(), upper.len());
        Self { lower, upper }
    }

    pub fn cube(dim: usize, lo: f64, hi: f64) -> Self {
        Self::new(vec![lo; dim], vec![hi; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn side(&self, axis: usize) -> f64 {
        self.upper[axis] - self.lower[axis]
    }

    pub fn diam(&self) -> f64 {
        (0..self.dim())
            .map(|i| self.side(i) * self.side(i))
            .sum::<f64>()
            .sqrt()
    }

    pub fn center(&self) -> Point {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(a, b)| 0.5 * (a + b))
            .collect()
    }

    pub fn has_interior(&self) -> bool {
        self.lower.iter().zip(&self.upper).all(|(a, b)| a < b)
    }

    pub fn is_valid(&self) -> bool {
        self.lower.len() == self.upper.len()
            && self
                .lower
                .iter()
                .zip(&self.upper)
                .all(|(a, b)| a.is_finite() && b.is_finite() && a <= b)
    }

    pub fn contains_closed(&self, p: &[f64]) -> bool {
        p.iter()
            .enumerate()
            .all(|(i, x)| self.lower[i] <= *x && *x <= self.upper[i])
    }

    pub fn contains_open(&self, p: &[f64]) -> bool {
        p.iter()
            .enumerate()
            .all(|(i, x)| self.lower[i] < *x && *x < self.upper[i])
    }

    /// Distance from `p` to the closed box.
    pub fn distance_to_point(&self, p: &[f64]) -> f64 {
        let mut s = 0.0;
        for (i, x) in p.iter().enumerate() {
            let e = if *x < self.lower[i] {
                self.lower[i] - x
            } else if *x > self.upper[i] {
                x - self.upper[i]
            } else {
                0.0
            };
            s += e * e;
        }
        s.sqrt()
    }

    /// Largest distance from `p` to a point of the closed box.
    pub fn farthest_from(&self, p: &[f64]) -> f64 {
        let mut s = 0.0;
        for (i, x) in p.iter().enumerate() {
            let e = (x - self.lower[i]).abs().max((self.upper[i] - x).abs());
            s += e * e;
        }
        s.sqrt()
    }

    pub fn distance_to_box(&self, other: &AxisBox) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim() {
            let gap = (other.lower[i] - self.upper[i])
                .max(self.lower[i] - other.upper[i])
                .max(0.0);
            s += gap * gap;
        }
        s.sqrt()
    }

    pub fn corners(&self) -> Vec<Point> {
        let d = self.dim();
        (0..1usize << d)
            .map(|mask| {
                (0..d)
                    .map(|i| {
                        if mask >> i & 1 == 1 {
                            self.upper[i]
                        } else {
                            self.lower[i]
                        }
                    })
                    .collect()
            })
            .collect()
    }

    pub fn union_hull(&self, other: &AxisBox) -> AxisBox {
        AxisBox::new(
            self.lower.iter().zip(&other.lower).map(|(a, b)| a.min(*b)).collect(),
            self.upper.iter().zip(&other.upper).map(|(a, b)| a.max(*b)).collect(),
        )
    }

    pub fn expand(&self, by: f64) -> AxisBox {
        AxisBox::new(
            self.lower.iter().map(|a| a - by).collect(),
            self.upper.iter().map(|a| a + by).collect(),
        )
    }
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64) -> Self {
        Self { center, radius }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn diam(&self) -> f64 {
        2.0 * self.radius
    }

    pub fn bounding_box(&self) -> AxisBox {
        AxisBox::new(
            self.center.iter().map(|c| c - self.radius).collect(),
            self.center.iter().map(|c| c + self.radius).collect(),
        )
    }

    pub fn contains_closed(&self, p: &[f64]) -> bool {
        distance(&self.center, p) <= self.radius
    }

    pub fn contains_open(&self, p: &[f64]) -> bool {
        distance(&self.center, p) < self.radius
    }

    /// `other ⊆ self`, both closed.
    pub fn contains_ball(&self, other: &Ball) -> bool {
        distance(&self.center, &other.center) <= self.radius - other.radius
    }
}

impl Shape {
    pub fn dim(&self) -> usize {
        match self {
            Shape::Box(b) => b.dim(),
            Shape::Ball(b) => b.dim(),
            Shape::Cells(cells) => cells.first().map_or(0, AxisBox::dim),
        }
    }

    pub fn is_convex(&self) -> bool {
        !matches!(self, Shape::Cells(_))
    }

    pub fn diam(&self) -> f64 {
        match self {
            Shape::Box(b) => b.diam(),
            Shape::Ball(b) => b.diam(),
            Shape::Cells(cells) => {
                let mut best: f64 = 0.0;
                for a in cells {
                    for b in cells {
                        let mut s = 0.0;
                        for i in 0..a.dim() {
                            let e = (a.upper[i] - b.lower[i])
                                .abs()
                                .max((b.upper[i] - a.lower[i]).abs());
                            s += e * e;
                        }
                        best = best.max(s.sqrt());
                    }
                }
                best
            }
        }
    }

    pub fn bounding_box(&self) -> AxisBox {
        match self {
            Shape::Box(b) => b.clone(),
            Shape::Ball(b) => b.bounding_box(),
            Shape::Cells(cells) => cells[1..]
                .iter()
                .fold(cells[0].clone(), |acc, c| acc.union_hull(c)),
        }
    }

    /// A point of the closure used as a representative (box or ball centre).
    pub fn center(&self) -> Point {
        match self {
            Shape::Box(b) => b.center(),
            Shape::Ball(b) => b.center.clone(),
            Shape::Cells(cells) => cells[0].center(),
        }
    }

    pub fn contains_open(&self, p: &[f64]) -> bool {
        match self {
            Shape::Box(b) => b.contains_open(p),
            Shape::Ball(b) => b.contains_open(p),
            Shape::Cells(cells) => {
                // A point on a shared face of two cells is interior to the union.
                let closed: Vec<&AxisBox> =
                    cells.iter().filter(|c| c.contains_closed(p)).collect();
                if closed.is_empty() {
                    return false;
                }
                if closed.iter().any(|c| c.contains_open(p)) {
                    return true;
                }
                let eps = closed
                    .iter()
                    .flat_map(|c| (0..c.dim()).map(move |i| c.side(i)))
                    .fold(f64::INFINITY, f64::min)
                    * 1e-9;
                let d = p.len();
                (0..1usize << d).all(|mask| {
                    let q: Vec<f64> = (0..d)
                        .map(|i| if mask >> i & 1 == 1 { p[i] + eps } else { p[i] - eps })
                        .collect();
                    closed.iter().any(|c| c.contains_closed(&q))
                })
            }
        }
    }

    pub fn contains_closed(&self, p: &[f64]) -> bool {
        match self {
            Shape::Box(b) => b.contains_closed(p),
            Shape::Ball(b) => b.contains_closed(p),
            Shape::Cells(cells) => cells.iter().any(|c| c.contains_closed(p)),
        }
    }

    pub fn distance_to_point(&self, p: &[f64]) -> f64 {
        match self {
            Shape::Box(b) => b.distance_to_point(p),
            Shape::Ball(b) => (distance(&b.center, p) - b.radius).max(0.0),
            Shape::Cells(cells) => cells
                .iter()
                .map(|c| c.distance_to_point(p))
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Largest distance from `p` to a point of the closure.
    pub fn farthest_from(&self, p: &[f64]) -> f64 {
        match self {
            Shape::Box(b) => b.farthest_from(p),
            Shape::Ball(b) => distance(&b.center, p) + b.radius,
            Shape::Cells(cells) => cells
                .iter()
                .map(|c| c.farthest_from(p))
                .fold(0.0, f64::max),
        }
    }

    /// Distance between the closures of two shapes.
    pub fn distance_to(&self, other: &Shape) -> f64 {
        match (self, other) {
            (Shape::Box(a), Shape::Box(b)) => a.distance_to_box(b),
            (Shape::Ball(a), Shape::Ball(b)) => {
                (distance(&a.center, &b.center) - a.radius - b.radius).max(0.0)
            }
            (Shape::Box(a), Shape::Ball(b)) | (Shape::Ball(b), Shape::Box(a)) => {
                (a.distance_to_point(&b.center) - b.radius).max(0.0)
            }
            (Shape::Cells(cells), s) | (s, Shape::Cells(cells)) => cells
                .iter()
                .map(|c| Shape::Box(c.clone()).distance_to(s))
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Whether the two open sets meet.
    pub fn open_intersects(&self, other: &Shape) -> bool {
        match (self, other) {
            (Shape::Box(a), Shape::Box(b)) => {
                a.has_interior()
                    && b.has_interior()
                    && (0..a.dim()).all(|i| a.lower[i] < b.upper[i] && b.lower[i] < a.upper[i])
            }
            (Shape::Ball(a), Shape::Ball(b)) => {
                a.radius > 0.0
                    && b.radius > 0.0
                    && distance(&a.center, &b.center) < a.radius + b.radius
            }
            (Shape::Box(a), Shape::Ball(b)) | (Shape::Ball(b), Shape::Box(a)) => {
                a.has_interior() && b.radius > 0.0 && a.distance_to_point(&b.center) < b.radius
            }
            (Shape::Cells(cells), s) | (s, Shape::Cells(cells)) => cells
                .iter()
                .any(|c| Shape::Box(c.clone()).open_intersects(s)),
        }
    }

    /// Whether the closed ball meets this open set.
    pub fn meets_closed_ball(&self, ball: &Ball) -> bool {
        match self {
            Shape::Cells(cells) => cells
                .iter()
                .any(|c| c.has_interior() && c.distance_to_point(&ball.center) < ball.radius),
            Shape::Box(b) => b.has_interior() && b.distance_to_point(&ball.center) < ball.radius,
            Shape::Ball(b) => {
                b.radius > 0.0 && distance(&b.center, &ball.center) < b.radius + ball.radius
            }
        }
    }

    /// Whether the closure of `self` lies inside the open convex set `outer`.
    pub fn closure_inside_open(&self, outer: &Shape) -> bool {
        match outer {
            Shape::Box(o) => {
                let bb = self.bounding_box();
                (0..o.dim()).all(|i| o.lower[i] < bb.lower[i] && bb.upper[i] < o.upper[i])
            }
            Shape::Ball(o) => self.farthest_from(&o.center) < o.radius,
            Shape::Cells(_) => false,
        }
    }

    /// Image under `x ↦ factor·x + offset`.
    pub fn map_similarity(&self, factor: f64, offset: &[f64]) -> Shape {
        match self {
            Shape::Box(b) => Shape::Box(map_box(b, factor, offset)),
            Shape::Ball(b) => Shape::Ball(map_ball(b, factor, offset)),
            Shape::Cells(cells) => {
                Shape::Cells(cells.iter().map(|c| map_box(c, factor, offset)).collect())
            }
        }
    }

    /// Candidate points on the boundary, used to produce witnesses.
    pub fn boundary_samples(&self, toward: &[f64]) -> Vec<Point> {
        match self {
            Shape::Box(b) => box_boundary_samples(b, toward),
            Shape::Ball(b) => ball_boundary_samples(b, toward),
            Shape::Cells(cells) => cells
                .iter()
                .flat_map(|c| box_boundary_samples(c, toward))
                .filter(|p| !self.contains_open(p))
                .collect(),
        }
    }
}

pub fn map_point(p: &[f64], factor: f64, offset: &[f64]) -> Point {
    p.iter().zip(offset).map(|(x, t)| factor * x + t).collect()
}

pub fn map_box(b: &AxisBox, factor: f64, offset: &[f64]) -> AxisBox {
    let lo = map_point(&b.lower, factor, offset);
    let hi = map_point(&b.upper, factor, offset);
    if factor >= 0.0 {
        AxisBox::new(lo, hi)
    } else {
        AxisBox::new(hi, lo)
    }
}

pub fn map_ball(b: &Ball, factor: f64, offset: &[f64]) -> Ball {
    Ball::new(map_point(&b.center, factor, offset), b.radius * factor.abs())
}

fn box_boundary_samples(b: &AxisBox, toward: &[f64]) -> Vec<Point> {
    let mut out = b.corners();
    let c = b.center();
    for i in 0..b.dim() {
        for v in [b.lower[i], b.upper[i]] {
            let mut p = c.clone();
            p[i] = v;
            out.push(p);
        }
    }
    // Nearest boundary point to `toward`, and its projections onto each face.
    let clamped: Point = toward
        .iter()
        .enumerate()
        .map(|(i, x)| x.clamp(b.lower[i], b.upper[i]))
        .collect();
    for i in 0..b.dim() {
        for v in [b.lower[i], b.upper[i]] {
            let mut p = clamped.clone();
            p[i] = v;
            out.push(p);
        }
    }
    out
}

fn ball_boundary_samples(b: &Ball, toward: &[f64]) -> Vec<Point> {
    let mut out = Vec::new();
    for i in 0..b.dim() {
        for s in [-1.0, 1.0] {
            let mut p = b.center.clone();
            p[i] += s * b.radius;
            out.push(p);
        }
    }
    let dir: Vec<f64> = toward.iter().zip(&b.center).map(|(t, c)| t - c).collect();
    let n = norm(&dir);
    if n > 0.0 {
        for s in [-1.0, 1.0] {
            out.push(
                b.center
                    .iter()
                    .zip(&dir)
                    .map(|(c, v)| c + s * b.radius * v / n)
                    .collect(),
            );
        }
    }
    out
}

/// A closed convex hull: the complement of the unbounded gap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hull {
    Box(AxisBox),
    Ball(Ball),
}

impl Hull {
    pub fn dim(&self) -> usize {
        match self {
            Hull::Box(b) => b.dim(),
            Hull::Ball(b) => b.dim(),
        }
    }

    pub fn diam(&self) -> f64 {
        match self {
            Hull::Box(b) => b.diam(),
            Hull::Ball(b) => b.diam(),
        }
    }

    pub fn has_interior(&self) -> bool {
        match self {
            Hull::Box(b) => b.has_interior(),
            Hull::Ball(b) => b.radius > 0.0,
        }
    }

    pub fn as_shape(&self) -> Shape {
        match self {
            Hull::Box(b) => Shape::Box(b.clone()),
            Hull::Ball(b) => Shape::Ball(b.clone()),
        }
    }

    pub fn bounding_box(&self) -> AxisBox {
        match self {
            Hull::Box(b) => b.clone(),
            Hull::Ball(b) => b.bounding_box(),
        }
    }

    pub fn center(&self) -> Point {
        match self {
            Hull::Box(b) => b.center(),
            Hull::Ball(b) => b.center.clone(),
        }
    }

    pub fn contains_closed(&self, p: &[f64]) -> bool {
        match self {
            Hull::Box(b) => b.contains_closed(p),
            Hull::Ball(b) => b.contains_closed(p),
        }
    }

    /// Whether the closure of `s` lies in the (closed) hull.
    pub fn contains_shape(&self, s: &Shape) -> bool {
        match self {
            Hull::Box(h) => {
                let bb = s.bounding_box();
                (0..h.dim()).all(|i| h.lower[i] <= bb.lower[i] && bb.upper[i] <= h.upper[i])
            }
            Hull::Ball(h) => s.farthest_from(&h.center) <= h.radius,
        }
    }

    /// Distance from the closure of `s` to the complement of the hull.
    pub fn distance_to_exterior(&self, s: &Shape) -> f64 {
        match self {
            Hull::Box(h) => {
                let bb = s.bounding_box();
                (0..h.dim())
                    .map(|i| (bb.lower[i] - h.lower[i]).min(h.upper[i] - bb.upper[i]))
                    .fold(f64::INFINITY, f64::min)
                    .max(0.0)
            }
            Hull::Ball(h) => (h.radius - s.farthest_from(&h.center)).max(0.0),
        }
    }

    /// Distance from a point inside the hull to its complement.
    pub fn depth_of_point(&self, p: &[f64]) -> f64 {
        match self {
            Hull::Box(h) => (0..h.dim())
                .map(|i| (p[i] - h.lower[i]).min(h.upper[i] - p[i]))
                .fold(f64::INFINITY, f64::min)
                .max(0.0),
            Hull::Ball(h) => (h.radius - distance(&h.center, p)).max(0.0),
        }
    }

    pub fn distance_to_point(&self, p: &[f64]) -> f64 {
        self.as_shape().distance_to_point(p)
    }

    pub fn map_similarity(&self, factor: f64, offset: &[f64]) -> Hull {
        match self {
            Hull::Box(b) => Hull::Box(map_box(b, factor, offset)),
            Hull::Ball(b) => Hull::Ball(map_ball(b, factor, offset)),
        }
    }

    pub fn boundary_samples(&self, toward: &[f64]) -> Vec<Point> {
        self.as_shape().boundary_samples(toward)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit_square() -> AxisBox {
        AxisBox::cube(2, 0.0, 1.0)
    }

    #[test]
    fn box_to_ball_distance() {
        let a = Shape::Box(unit_square());
        let b = Shape::Ball(Ball::new(vec![2.0, 2.0], 0.5));
        assert_relative_eq!(a.distance_to(&b), 2f64.sqrt() - 0.5, epsilon = 1e-15);
        assert_relative_eq!(b.distance_to(&a), 2f64.sqrt() - 0.5, epsilon = 1e-15);
    }

    #[test]
    fn touching_boxes_are_at_distance_zero_but_do_not_meet() {
        let a = Shape::Box(AxisBox::new(vec![0.0, 0.0], vec![1.0, 1.0]));
        let b = Shape::Box(AxisBox::new(vec![1.0, 0.0], vec![2.0, 1.0]));
        assert_eq!(a.distance_to(&b), 0.0);
        assert!(!a.open_intersects(&b));
    }

    #[test]
    fn distance_to_exterior_of_box_hull() {
        let hull = Hull::Box(AxisBox::new(vec![0.0], vec![1.0]));
        let gap = Shape::Box(AxisBox::new(vec![0.4], vec![0.6]));
        assert_relative_eq!(hull.distance_to_exterior(&gap), 0.4, epsilon = 1e-15);
    }

    #[test]
    fn distance_to_exterior_of_ball_hull() {
        let hull = Hull::Ball(Ball::new(vec![0.0, 0.0], 2.0));
        let gap = Shape::Ball(Ball::new(vec![0.5, 0.0], 0.5));
        assert_relative_eq!(hull.distance_to_exterior(&gap), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn cell_union_interior_includes_shared_faces() {
        let u = Shape::Cells(vec![
            AxisBox::new(vec![0.0, 0.0], vec![1.0, 1.0]),
            AxisBox::new(vec![1.0, 0.0], vec![2.0, 1.0]),
        ]);
        assert!(u.contains_open(&[1.0, 0.5]));
        assert!(!u.contains_open(&[1.0, 1.0]));
        assert_relative_eq!(u.diam(), 5f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn similarity_maps_carpet_gap() {
        let g = Shape::Box(AxisBox::cube(2, 1.0 / 3.0, 2.0 / 3.0));
        match g.map_similarity(3.0, &[1.0, 1.0]) {
            Shape::Box(b) => {
                for i in 0..2 {
                    assert_relative_eq!(b.lower[i], 2.0, epsilon = 1e-15);
                    assert_relative_eq!(b.upper[i], 3.0, epsilon = 1e-15);
                }
            }
            _ => unreachable!(),
        }
    }
}
