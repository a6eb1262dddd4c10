//! Set descriptors: a compact set given by its convex hull and its gaps.
//!
//! Descriptors are immutable values. They are read from JSON documents that
//! carry `"schema": 1` at the top level and a `"variant"` tag.

use std::fmt;
use std::path::Path;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::geometry::{AxisBox, Ball, Hull, Shape};

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DescriptorError {
    #[error("malformed descriptor: {0}")]
    Malformed(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("empty hull")]
    EmptyHull,
    #[error("invalid sponge grid: {0}")]
    InvalidGrid(String),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
}

/// Construction depth of a generative family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Depth {
    Finite(u32),
    Unbounded,
}

impl Serialize for Depth {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Depth::Finite(k) => s.serialize_u32(*k),
            Depth::Unbounded => s.serialize_str("unbounded"),
        }
    }
}

impl<'de> Deserialize<'de> for Depth {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct DepthVisitor;
        impl Visitor<'_> for DepthVisitor {
            type Value = Depth;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a non-negative integer or \"unbounded\"")
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Depth, E> {
                u32::try_from(v)
                    .map(Depth::Finite)
                    .map_err(|_| E::custom("depth too large"))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Depth, E> {
                u32::try_from(v)
                    .map(Depth::Finite)
                    .map_err(|_| E::custom("depth must be non-negative"))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Depth, E> {
                if v == "unbounded" {
                    Ok(Depth::Unbounded)
                } else {
                    Err(E::custom(format!("unknown depth {v:?}")))
                }
            }
        }
        d.deserialize_any(DepthVisitor)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant")]
pub enum SetDescriptor {
    /// A convex hull with finitely many listed gaps.
    Explicit {
        dimension: usize,
        hull: Hull,
        gaps: Vec<Shape>,
    },
    /// Central Cantor set: each interval keeps two end pieces of relative
    /// length `keep_ratio`.
    CentralCantor1D {
        interval: [f64; 2],
        keep_ratio: f64,
        depth: Depth,
    },
    /// Unit cube split into `grid[0] × … × grid[d-1]` cells with the
    /// central cell removed, recursively.
    Sponge {
        dimension: usize,
        grid: Vec<u32>,
        depth: Depth,
    },
    Translate {
        inner: Box<SetDescriptor>,
        offset: Vec<f64>,
    },
    Scale {
        inner: Box<SetDescriptor>,
        factor: f64,
    },
}

impl SetDescriptor {
    pub fn middle_thirds() -> Self {
        SetDescriptor::CentralCantor1D {
            interval: [0.0, 1.0],
            keep_ratio: 1.0 / 3.0,
            depth: Depth::Unbounded,
        }
    }

    pub fn central_cantor(lo: f64, hi: f64, keep_ratio: f64) -> Self {
        SetDescriptor::CentralCantor1D {
            interval: [lo, hi],
            keep_ratio,
            depth: Depth::Unbounded,
        }
    }

    pub fn sponge(grid: &[u32]) -> Self {
        SetDescriptor::Sponge {
            dimension: grid.len(),
            grid: grid.to_vec(),
            depth: Depth::Unbounded,
        }
    }

    pub fn explicit(hull: Hull, gaps: Vec<Shape>) -> Self {
        SetDescriptor::Explicit {
            dimension: hull.dim(),
            hull,
            gaps,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            SetDescriptor::Explicit { dimension, .. } => *dimension,
            SetDescriptor::CentralCantor1D { .. } => 1,
            SetDescriptor::Sponge { dimension, .. } => *dimension,
            SetDescriptor::Translate { inner, .. } | SetDescriptor::Scale { inner, .. } => {
                inner.dim()
            }
        }
    }

    /// The closed convex hull; its complement is the unbounded gap.
    pub fn hull(&self) -> Hull {
        match self {
            SetDescriptor::Explicit { hull, .. } => hull.clone(),
            SetDescriptor::CentralCantor1D { interval, .. } => {
                Hull::Box(AxisBox::new(vec![interval[0]], vec![interval[1]]))
            }
            SetDescriptor::Sponge { dimension, .. } => Hull::Box(AxisBox::cube(*dimension, 0.0, 1.0)),
            SetDescriptor::Translate { inner, offset } => inner.hull().map_similarity(1.0, offset),
            SetDescriptor::Scale { inner, factor } => {
                inner.hull().map_similarity(*factor, &vec![0.0; inner.dim()])
            }
        }
    }

    /// Depth stored in the descriptor (explicit sets are complete).
    pub fn depth(&self) -> Option<Depth> {
        match self {
            SetDescriptor::Explicit { .. } => None,
            SetDescriptor::CentralCantor1D { depth, .. } | SetDescriptor::Sponge { depth, .. } => {
                Some(*depth)
            }
            SetDescriptor::Translate { inner, .. } | SetDescriptor::Scale { inner, .. } => {
                inner.depth()
            }
        }
    }

    pub fn is_generative(&self) -> bool {
        self.depth().is_some()
    }

    /// Strip translations and scalings, returning the core descriptor and
    /// the similarity `x ↦ factor·x + offset` that maps it onto `self`.
    pub fn peel(&self) -> (&SetDescriptor, f64, Vec<f64>) {
        match self {
            SetDescriptor::Translate { inner, offset } => {
                let (core, f, t) = inner.peel();
                (core, f, t.iter().zip(offset).map(|(a, b)| a + b).collect())
            }
            SetDescriptor::Scale { inner, factor } => {
                let (core, f, t) = inner.peel();
                (core, f * factor, t.iter().map(|a| a * factor).collect())
            }
            core => (core, 1.0, vec![0.0; core.dim()]),
        }
    }

    /// `λ·C + t`. The identity map returns an identical descriptor.
    pub fn apply_homothety(&self, factor: f64, offset: &[f64]) -> Result<SetDescriptor, DescriptorError> {
        if offset.len() != self.dim() {
            return Err(DescriptorError::DimensionMismatch {
                expected: self.dim(),
                found: offset.len(),
            });
        }
        if !(factor.is_finite() && factor > 0.0) {
            return Err(DescriptorError::OutOfRange(format!(
                "homothety factor must be positive and finite, got {factor}"
            )));
        }
        let mut out = self.clone();
        if factor != 1.0 {
            out = SetDescriptor::Scale {
                inner: Box::new(out),
                factor,
            };
        }
        if offset.iter().any(|t| *t != 0.0) {
            out = SetDescriptor::Translate {
                inner: Box::new(out),
                offset: offset.to_vec(),
            };
        }
        Ok(out)
    }

    /// Same family with a different stored depth.
    pub fn with_depth(&self, new_depth: Depth) -> SetDescriptor {
        match self {
            SetDescriptor::CentralCantor1D {
                interval,
                keep_ratio,
                ..
            } => SetDescriptor::CentralCantor1D {
                interval: *interval,
                keep_ratio: *keep_ratio,
                depth: new_depth,
            },
            SetDescriptor::Sponge { dimension, grid, .. } => SetDescriptor::Sponge {
                dimension: *dimension,
                grid: grid.clone(),
                depth: new_depth,
            },
            SetDescriptor::Translate { inner, offset } => SetDescriptor::Translate {
                inner: Box::new(inner.with_depth(new_depth)),
                offset: offset.clone(),
            },
            SetDescriptor::Scale { inner, factor } => SetDescriptor::Scale {
                inner: Box::new(inner.with_depth(new_depth)),
                factor: *factor,
            },
            explicit => explicit.clone(),
        }
    }

    pub fn validate(&self) -> Result<(), DescriptorError> {
        match self {
            SetDescriptor::Explicit {
                dimension,
                hull,
                gaps,
            } => {
                if *dimension == 0 {
                    return Err(DescriptorError::Malformed("dimension must be at least 1".into()));
                }
                check_dim(*dimension, hull.dim())?;
                let hull_ok = match hull {
                    Hull::Box(b) => b.is_valid(),
                    Hull::Ball(b) => b.radius.is_finite() && b.radius >= 0.0 && b.center.iter().all(|c| c.is_finite()),
                };
                if !hull_ok {
                    return Err(DescriptorError::EmptyHull);
                }
                for (i, g) in gaps.iter().enumerate() {
                    check_dim(*dimension, g.dim())?;
                    if !shape_is_open_nonempty(g) {
                        return Err(DescriptorError::Malformed(format!("gap {i} is empty or not finite")));
                    }
                    if !hull.contains_shape(g) {
                        return Err(DescriptorError::Malformed(format!(
                            "closure of gap {i} is not contained in the hull"
                        )));
                    }
                }
                check_pairwise_disjoint(gaps)
            }
            SetDescriptor::CentralCantor1D {
                interval,
                keep_ratio,
                ..
            } => {
                if !(interval[0].is_finite() && interval[1].is_finite()) || interval[0] >= interval[1] {
                    return Err(DescriptorError::EmptyHull);
                }
                if !(*keep_ratio > 0.0 && *keep_ratio < 0.5) {
                    return Err(DescriptorError::OutOfRange(format!(
                        "keep_ratio must lie in (0, 1/2), got {keep_ratio}"
                    )));
                }
                Ok(())
            }
            SetDescriptor::Sponge { dimension, grid, .. } => {
                if *dimension == 0 {
                    return Err(DescriptorError::Malformed("dimension must be at least 1".into()));
                }
                check_dim(*dimension, grid.len())?;
                if let Some(n) = grid.iter().find(|n| **n < 3 || **n % 2 == 0) {
                    return Err(DescriptorError::InvalidGrid(format!(
                        "every subdivision count must be odd and at least 3, got {n}"
                    )));
                }
                Ok(())
            }
            SetDescriptor::Translate { inner, offset } => {
                inner.validate()?;
                check_dim(inner.dim(), offset.len())?;
                if offset.iter().any(|t| !t.is_finite()) {
                    return Err(DescriptorError::OutOfRange("offset must be finite".into()));
                }
                Ok(())
            }
            SetDescriptor::Scale { inner, factor } => {
                inner.validate()?;
                if !(factor.is_finite() && *factor > 0.0) {
                    return Err(DescriptorError::OutOfRange(format!(
                        "scale factor must be positive and finite, got {factor}"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Parse a top-level JSON document.
    pub fn from_json(text: &str) -> Result<SetDescriptor, DescriptorError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| DescriptorError::Malformed(e.to_string()))?;
        match value.get("schema").and_then(serde_json::Value::as_u64) {
            Some(SCHEMA_VERSION) => {}
            Some(v) => {
                return Err(DescriptorError::Malformed(format!(
                    "unsupported schema version {v}"
                )))
            }
            None => return Err(DescriptorError::Malformed("missing \"schema\" field".into())),
        }
        let desc: SetDescriptor =
            serde_json::from_value(value).map_err(|e| DescriptorError::Malformed(e.to_string()))?;
        desc.validate()?;
        Ok(desc)
    }

    pub fn load(path: &Path) -> Result<SetDescriptor, DescriptorError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| DescriptorError::Malformed(format!("{}: {e}", path.display())))?;
        SetDescriptor::from_json(&text)
    }

    /// Serialize as a top-level document with the schema tag.
    pub fn to_json(&self) -> String {
        let mut value = serde_json::to_value(self).expect("descriptor serializes");
        if let serde_json::Value::Object(map) = &mut value {
            map.insert("schema".into(), SCHEMA_VERSION.into());
        }
        serde_json::to_string_pretty(&value).expect("descriptor serializes")
    }
}

fn check_dim(expected: usize, found: usize) -> Result<(), DescriptorError> {
    if expected == found {
        Ok(())
    } else {
        Err(DescriptorError::DimensionMismatch { expected, found })
    }
}

fn shape_is_open_nonempty(s: &Shape) -> bool {
    match s {
        Shape::Box(b) => b.is_valid() && b.has_interior(),
        Shape::Ball(Ball { center, radius }) => {
            radius.is_finite() && *radius > 0.0 && center.iter().all(|c| c.is_finite())
        }
        Shape::Cells(cells) => {
            !cells.is_empty() && cells.iter().all(|c| c.is_valid() && c.has_interior())
        }
    }
}

/// Sweep along the first axis; gaps are open, so touching is allowed.
fn check_pairwise_disjoint(gaps: &[Shape]) -> Result<(), DescriptorError> {
    let boxes: Vec<AxisBox> = gaps.iter().map(Shape::bounding_box).collect();
    let mut order: Vec<usize> = (0..gaps.len()).collect();
    order.sort_by(|a, b| boxes[*a].lower[0].total_cmp(&boxes[*b].lower[0]));
    let mut active: Vec<usize> = Vec::new();
    for &i in &order {
        active.retain(|&j| boxes[j].upper[0] > boxes[i].lower[0]);
        for &j in &active {
            if gaps[i].open_intersects(&gaps[j]) {
                return Err(DescriptorError::Malformed(format!("gaps {j} and {i} overlap")));
            }
        }
        active.push(i);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_with_schema() {
        let d = SetDescriptor::sponge(&[3, 3]);
        let text = d.to_json();
        assert!(text.contains("\"schema\": 1"));
        assert_eq!(SetDescriptor::from_json(&text).unwrap(), d);
    }

    #[test]
    fn missing_schema_is_malformed() {
        let text = r#"{"variant":"Sponge","dimension":2,"grid":[3,3],"depth":"unbounded"}"#;
        assert!(matches!(
            SetDescriptor::from_json(text),
            Err(DescriptorError::Malformed(_))
        ));
    }

    #[test]
    fn even_grid_is_rejected() {
        let text = r#"{"schema":1,"variant":"Sponge","dimension":2,"grid":[4,3],"depth":2}"#;
        assert!(matches!(
            SetDescriptor::from_json(text),
            Err(DescriptorError::InvalidGrid(_))
        ));
    }

    #[test]
    fn keep_ratio_out_of_range() {
        for r in [0.0, 0.5, 0.7] {
            let d = SetDescriptor::central_cantor(0.0, 1.0, r);
            assert!(matches!(d.validate(), Err(DescriptorError::OutOfRange(_))));
        }
    }

    #[test]
    fn gap_outside_hull_is_rejected() {
        let d = SetDescriptor::explicit(
            Hull::Box(AxisBox::cube(1, 0.0, 1.0)),
            vec![Shape::Box(AxisBox::new(vec![0.5], vec![1.5]))],
        );
        assert!(d.validate().is_err());
    }

    #[test]
    fn overlapping_gaps_are_rejected() {
        let d = SetDescriptor::explicit(
            Hull::Box(AxisBox::cube(1, 0.0, 1.0)),
            vec![
                Shape::Box(AxisBox::new(vec![0.2], vec![0.5])),
                Shape::Box(AxisBox::new(vec![0.4], vec![0.6])),
            ],
        );
        assert!(d.validate().is_err());
        let touching = SetDescriptor::explicit(
            Hull::Box(AxisBox::cube(1, 0.0, 1.0)),
            vec![
                Shape::Box(AxisBox::new(vec![0.2], vec![0.4])),
                Shape::Box(AxisBox::new(vec![0.4], vec![0.6])),
            ],
        );
        assert!(touching.validate().is_ok());
    }

    #[test]
    fn identity_homothety_is_identical() {
        let d = SetDescriptor::middle_thirds();
        assert_eq!(d.apply_homothety(1.0, &[0.0]).unwrap(), d);
    }

    #[test]
    fn dimension_mismatch_in_homothety() {
        let d = SetDescriptor::sponge(&[3, 3]);
        assert!(matches!(
            d.apply_homothety(2.0, &[1.0]),
            Err(DescriptorError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn peel_composes_similarities() {
        let d = SetDescriptor::sponge(&[3, 3])
            .apply_homothety(3.0, &[1.0, 1.0])
            .unwrap()
            .apply_homothety(2.0, &[0.5, 0.0])
            .unwrap();
        let (_, f, t) = d.peel();
        assert_eq!(f, 6.0);
        assert_eq!(t, vec![2.5, 2.0]);
    }

    #[test]
    fn depth_accepts_integer_or_unbounded() {
        let a: Depth = serde_json::from_str("7").unwrap();
        let b: Depth = serde_json::from_str("\"unbounded\"").unwrap();
        assert_eq!(a, Depth::Finite(7));
        assert_eq!(b, Depth::Unbounded);
        assert!(serde_json::from_str::<Depth>("-1").is_err());
    }
}
