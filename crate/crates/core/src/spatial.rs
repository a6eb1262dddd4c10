//! A static bounding-volume hierarchy over shapes, used for nearest-gap and
//! overlap queries. Each node also stores the smallest item index below it,
//! so a query can be restricted to items that come earlier in the order.

use crate::geometry::{AxisBox, Ball, Shape};

const LEAF_SIZE: usize = 8;

struct Node {
    bbox: AxisBox,
    min_index: usize,
    max_weight: f64,
    /// Children, or a range of `order` when a leaf.
    kind: NodeKind,
}

enum NodeKind {
    Leaf(usize, usize),
    Inner(usize, usize),
}

/// The hierarchy itself, over item bounding boxes only. Exact tests are
/// delegated to a shape lookup supplied with each query.
pub struct BoxTree {
    boxes: Vec<AxisBox>,
    weights: Vec<f64>,
    order: Vec<usize>,
    nodes: Vec<Node>,
}

impl BoxTree {
    pub fn new(boxes: Vec<AxisBox>) -> Self {
        let weights = vec![f64::INFINITY; boxes.len()];
        Self::with_weights(boxes, weights)
    }

    /// A tree whose nodes also record the largest item weight below them,
    /// for queries restricted to heavy items.
    pub fn with_weights(boxes: Vec<AxisBox>, weights: Vec<f64>) -> Self {
        assert_eq!(boxes.len(), weights.len());
        let mut order: Vec<usize> = (0..boxes.len()).collect();
        let mut tree = BoxTree {
            boxes,
            weights,
            order: Vec::new(),
            nodes: Vec::new(),
        };
        if !order.is_empty() {
            let n = order.len();
            tree.build(&mut order, 0, n);
        }
        tree.order = order;
        tree
    }

    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    fn build(&mut self, order: &mut [usize], start: usize, end: usize) -> usize {
        let slice = &mut order[start..end];
        let mut bbox = self.boxes[slice[0]].clone();
        let mut min_index = slice[0];
        let mut max_weight = f64::NEG_INFINITY;
        for &i in slice.iter() {
            bbox = bbox.union_hull(&self.boxes[i]);
            min_index = min_index.min(i);
            max_weight = max_weight.max(self.weights[i]);
        }
        let id = self.nodes.len();
        if slice.len() <= LEAF_SIZE {
            self.nodes.push(Node {
                bbox,
                min_index,
                max_weight,
                kind: NodeKind::Leaf(start, end),
            });
            return id;
        }
        let axis = (0..bbox.dim())
            .max_by(|a, b| bbox.side(*a).total_cmp(&bbox.side(*b)))
            .unwrap_or(0);
        let mid = slice.len() / 2;
        let boxes = &self.boxes;
        slice.select_nth_unstable_by(mid, |a, b| {
            (boxes[*a].lower[axis] + boxes[*a].upper[axis])
                .total_cmp(&(boxes[*b].lower[axis] + boxes[*b].upper[axis]))
        });
        self.nodes.push(Node {
            bbox,
            min_index,
            max_weight,
            kind: NodeKind::Leaf(0, 0),
        });
        let left = self.build(order, start, start + mid);
        let right = self.build(order, start + mid, end);
        self.nodes[id].kind = NodeKind::Inner(left, right);
        id
    }

    /// Smallest distance from `query` to an item with index `< before`,
    /// if it is below `bound`. Returns `(distance, item)`.
    pub fn nearest_before<'s>(&self, query: &Shape, before: usize, bound: f64, shape: impl Fn(usize) -> &'s Shape) -> Option<(f64, usize)> {
        if self.nodes.is_empty() || before == 0 {
            return None;
        }
        let qbox = query.bounding_box();
        let mut best = bound;
        let mut hit = None;
        let mut stack = vec![0usize];
        while let Some(id) = stack.pop() {
            let node = &self.nodes[id];
            if node.min_index >= before || node.bbox.distance_to_box(&qbox) >= best {
                continue;
            }
            match node.kind {
                NodeKind::Leaf(s, e) => {
                    for &i in &self.order[s..e] {
                        if i >= before || self.boxes[i].distance_to_box(&qbox) >= best {
                            continue;
                        }
                        let d = query.distance_to(shape(i));
                        if d < best {
                            best = d;
                            hit = Some((d, i));
                        }
                    }
                }
                NodeKind::Inner(l, r) => {
                    let dl = self.nodes[l].bbox.distance_to_box(&qbox);
                    let dr = self.nodes[r].bbox.distance_to_box(&qbox);
                    if dl <= dr {
                        stack.push(r);
                        stack.push(l);
                    } else {
                        stack.push(l);
                        stack.push(r);
                    }
                }
            }
        }
        hit
    }

    /// Items whose bounding box meets the closed box `window`, in index order.
    pub fn candidates_in(&self, window: &AxisBox) -> Vec<usize> {
        let mut out = Vec::new();
        if self.nodes.is_empty() {
            return out;
        }
        let mut stack = vec![0usize];
        while let Some(id) = stack.pop() {
            let node = &self.nodes[id];
            if node.bbox.distance_to_box(window) > 0.0 {
                continue;
            }
            match node.kind {
                NodeKind::Leaf(s, e) => {
                    for &i in &self.order[s..e] {
                        if self.boxes[i].distance_to_box(window) == 0.0 {
                            out.push(i);
                        }
                    }
                }
                NodeKind::Inner(l, r) => {
                    stack.push(l);
                    stack.push(r);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Items whose open set meets the closed ball, in index order.
    pub fn meeting_ball<'s>(&self, ball: &Ball, shape: impl Fn(usize) -> &'s Shape) -> Vec<usize> {
        self.candidates_in(&ball.bounding_box())
            .into_iter()
            .filter(|&i| shape(i).meets_closed_ball(ball))
            .collect()
    }

    /// Items whose open set contains `p`, in index order.
    pub fn containing<'s>(&self, p: &[f64], shape: impl Fn(usize) -> &'s Shape) -> Vec<usize> {
        let window = AxisBox::new(p.to_vec(), p.to_vec());
        self.candidates_in(&window)
            .into_iter()
            .filter(|&i| shape(i).contains_open(p))
            .collect()
    }
}

impl BoxTree {
    /// The `k` smallest indices whose open set meets the closed ball, whose
    /// weight exceeds `min_weight`, and which pass `keep`.
    pub fn first_meeting_ball<'s>(&self, ball: &Ball, min_weight: f64, k: usize, shape: impl Fn(usize) -> &'s Shape, keep: impl Fn(usize) -> bool) -> Vec<usize> {
        use std::cmp::Reverse;
        use std::collections::BinaryHeap;
        let mut out: Vec<usize> = Vec::new();
        if self.nodes.is_empty() || k == 0 {
            return out;
        }
        let window = ball.bounding_box();
        let mut heap = BinaryHeap::new();
        heap.push(Reverse((self.nodes[0].min_index, 0usize)));
        while let Some(Reverse((min_index, id))) = heap.pop() {
            if out.len() == k && min_index > out[k - 1] {
                break;
            }
            let node = &self.nodes[id];
            if node.max_weight <= min_weight || node.bbox.distance_to_box(&window) > 0.0 {
                continue;
            }
            match node.kind {
                NodeKind::Leaf(s, e) => {
                    for &i in &self.order[s..e] {
                        if self.weights[i] <= min_weight
                            || self.boxes[i].distance_to_box(&window) > 0.0
                            || !shape(i).meets_closed_ball(ball)
                            || !keep(i)
                        {
                            continue;
                        }
                        let at = out.partition_point(|j| *j < i);
                        out.insert(at, i);
                        out.truncate(k);
                    }
                }
                NodeKind::Inner(l, r) => {
                    heap.push(Reverse((self.nodes[l].min_index, l)));
                    heap.push(Reverse((self.nodes[r].min_index, r)));
                }
            }
        }
        out
    }
}

/// A [`BoxTree`] over borrowed shapes.
pub struct ShapeIndex<'a> {
    shapes: Vec<&'a Shape>,
    tree: BoxTree,
}

impl<'a> ShapeIndex<'a> {
    pub fn new(shapes: impl IntoIterator<Item = &'a Shape>) -> Self {
        let shapes: Vec<&Shape> = shapes.into_iter().collect();
        let tree = BoxTree::new(shapes.iter().map(|s| s.bounding_box()).collect());
        ShapeIndex { shapes, tree }
    }

    pub fn len(&self) -> usize {
        self.shapes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shapes.is_empty()
    }

    pub fn nearest_before(&self, query: &Shape, before: usize, bound: f64) -> Option<(f64, usize)> {
        self.tree.nearest_before(query, before, bound, |i| self.shapes[i])
    }

    pub fn candidates_in(&self, window: &AxisBox) -> Vec<usize> {
        self.tree.candidates_in(window)
    }

    pub fn meeting_ball(&self, ball: &Ball) -> Vec<usize> {
        self.tree.meeting_ball(ball, |i| self.shapes[i])
    }

    pub fn containing(&self, p: &[f64]) -> Vec<usize> {
        self.tree.containing(p, |i| self.shapes[i])
    }

    pub fn shape(&self, i: usize) -> &Shape {
        self.shapes[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_before_matches_scan() {
        let shapes: Vec<Shape> = (0..200)
            .map(|i| {
                let x = ((i * 37) % 101) as f64 / 101.0;
                let y = ((i * 61) % 103) as f64 / 103.0;
                Shape::Box(AxisBox::new(vec![x, y], vec![x + 0.003, y + 0.002]))
            })
            .collect();
        let index = ShapeIndex::new(shapes.iter());
        for n in 1..shapes.len() {
            let want = (0..n)
                .map(|i| shapes[n].distance_to(&shapes[i]))
                .fold(f64::INFINITY, f64::min);
            let got = index
                .nearest_before(&shapes[n], n, f64::INFINITY)
                .map(|(d, _)| d)
                .unwrap();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn first_meeting_ball_matches_filtered_scan() {
        let shapes: Vec<Shape> = (0..300)
            .map(|i| {
                let x = ((i * 37) % 101) as f64 / 101.0;
                Shape::Box(AxisBox::new(vec![x], vec![x + 0.01]))
            })
            .collect();
        let weights: Vec<f64> = (0..300).map(|i| ((i * 13) % 7) as f64).collect();
        let tree = BoxTree::with_weights(shapes.iter().map(|s| s.bounding_box()).collect(), weights.clone());
        let ball = Ball::new(vec![0.5], 0.2);
        let want: Vec<usize> = (0..300)
            .filter(|&i| weights[i] > 3.0 && shapes[i].meets_closed_ball(&ball) && i % 2 == 0)
            .take(5)
            .collect();
        let got = tree.first_meeting_ball(&ball, 3.0, 5, |i| &shapes[i], |i| i % 2 == 0);
        assert_eq!(got, want);
    }

    #[test]
    fn containing_finds_open_membership() {
        let shapes = [
            Shape::Box(AxisBox::new(vec![0.0], vec![1.0])),
            Shape::Box(AxisBox::new(vec![1.0], vec![2.0])),
        ];
        let index = ShapeIndex::new(shapes.iter());
        assert_eq!(index.containing(&[0.5]), vec![0]);
        assert!(index.containing(&[1.0]).is_empty());
    }
}
