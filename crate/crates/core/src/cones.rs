//! Separable cones: finite products of one-dimensional cones.
//!
//! A [`SeparableCone`] is an ordered list of segments, each a run of
//! coordinates that are either nonnegative (`ℝ₊`), free (`ℝ`) or fixed at
//! zero (`{0}`). The zero kind only arises as the dual of a free segment, but
//! it is a first-class kind so that every operation stays total.
//!
//! Euclidean projection is componentwise, which is what makes these cones
//! cheap to work with.
//!
//! Text syntax: comma-separated `kind:length` pairs, e.g. `nn:5,free:2,nn:3`.
//! Accepted kinds are `nn`, `free` and `zero`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;

use crate::error::{check_dim, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SegmentKind {
    NonNegative,
    Free,
    Zero,
}

impl SegmentKind {
    pub fn dual(self) -> SegmentKind {
        match self {
            SegmentKind::NonNegative => SegmentKind::NonNegative,
            SegmentKind::Free => SegmentKind::Zero,
            SegmentKind::Zero => SegmentKind::Free,
        }
    }

    #[inline]
    pub fn project(self, v: f64) -> f64 {
        match self {
            SegmentKind::NonNegative => v.max(0.0),
            SegmentKind::Free => v,
            SegmentKind::Zero => 0.0,
        }
    }

    fn tag(self) -> &'static str {
        match self {
            SegmentKind::NonNegative => "nn",
            SegmentKind::Free => "free",
            SegmentKind::Zero => "zero",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Segment {
    pub kind: SegmentKind,
    pub len: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SeparableCone {
    segments: Vec<Segment>,
    dim: usize,
}

impl SeparableCone {
    /// Builds a cone from segments. Every segment must have positive length.
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidArgument("cone has no segments".into()));
        }
        if let Some(s) = segments.iter().find(|s| s.len == 0) {
            return Err(Error::InvalidArgument(format!(
                "segment of kind `{}` has length 0",
                s.kind.tag()
            )));
        }
        let dim = segments.iter().map(|s| s.len).sum();
        Ok(SeparableCone { segments, dim })
    }

    pub fn orthant(n: usize) -> Result<Self> {
        Self::new(vec![Segment {
            kind: SegmentKind::NonNegative,
            len: n,
        }])
    }

    pub fn free(n: usize) -> Result<Self> {
        Self::new(vec![Segment {
            kind: SegmentKind::Free,
            len: n,
        }])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Per-coordinate kinds, in order.
    pub fn kinds(&self) -> impl Iterator<Item = SegmentKind> + '_ {
        self.segments
            .iter()
            .flat_map(|s| std::iter::repeat_n(s.kind, s.len))
    }

    pub fn count(&self, kind: SegmentKind) -> usize {
        self.segments
            .iter()
            .filter(|s| s.kind == kind)
            .map(|s| s.len)
            .sum()
    }

    /// Cartesian product `self × other`, merging adjacent segments of the same kind.
    pub fn product(&self, other: &SeparableCone) -> SeparableCone {
        let mut segments: Vec<Segment> =
            Vec::with_capacity(self.segments.len() + other.segments.len());
        for s in self.segments.iter().chain(other.segments.iter()) {
            match segments.last_mut() {
                Some(last) if last.kind == s.kind => last.len += s.len,
                _ => segments.push(*s),
            }
        }
        SeparableCone {
            dim: self.dim + other.dim,
            segments,
        }
    }

    /// Euclidean projection onto the cone.
    pub fn project(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        check_dim("cone projection", self.dim, x.len())?;
        let mut out = x.clone();
        self.project_in_place(&mut out);
        Ok(out)
    }

    pub(crate) fn project_in_place(&self, x: &mut DVector<f64>) {
        debug_assert_eq!(x.len(), self.dim);
        for (v, kind) in x.iter_mut().zip(self.kinds()) {
            *v = kind.project(*v);
        }
    }

    pub fn dual(&self) -> SeparableCone {
        SeparableCone {
            segments: self
                .segments
                .iter()
                .map(|s| Segment {
                    kind: s.kind.dual(),
                    len: s.len,
                })
                .collect(),
            dim: self.dim,
        }
    }

    /// Componentwise membership test with tolerance `tol·(1 + ‖x‖∞)`.
    pub fn contains(&self, x: &DVector<f64>, tol: f64) -> Result<bool> {
        check_dim("cone membership", self.dim, x.len())?;
        let slack = tol * (1.0 + x.amax());
        Ok(x.iter().zip(self.kinds()).all(|(&v, kind)| match kind {
            SegmentKind::NonNegative => v >= -slack,
            SegmentKind::Free => true,
            SegmentKind::Zero => v.abs() <= slack,
        }))
    }

    /// Tests whether `(x, y)` is a complementary pair: `x ∈ K`, `y ∈ K*` and
    /// `|xᵀy| ≤ tol·(1 + ‖x‖·‖y‖)`.
    pub fn is_complementary(&self, x: &DVector<f64>, y: &DVector<f64>, tol: f64) -> Result<bool> {
        check_dim("complementarity (x)", self.dim, x.len())?;
        check_dim("complementarity (y)", self.dim, y.len())?;
        if tol < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "tolerance {tol} is negative"
            )));
        }
        let gap = x.dot(y).abs();
        Ok(self.contains(x, tol)?
            && self.dual().contains(y, tol)?
            && gap <= tol * (1.0 + x.norm() * y.norm()))
    }

    /// Executable test for `d ∈ N_K(x)`: `‖Π(x + d) − x‖ ≤ tol·(1 + ‖d‖)`.
    ///
    /// Fails with a precondition error if `x` is not in the cone within `tol`.
    pub fn in_normal_cone(&self, x: &DVector<f64>, d: &DVector<f64>, tol: f64) -> Result<bool> {
        check_dim("normal cone (d)", self.dim, d.len())?;
        if !self.contains(x, tol)? {
            return Err(Error::Precondition(
                "normal-cone test at a point outside the cone".into(),
            ));
        }
        let mut moved = x + d;
        self.project_in_place(&mut moved);
        Ok((moved - x).norm() <= tol * (1.0 + d.norm()))
    }
}

impl fmt::Display for SeparableCone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.segments.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}:{}", s.kind.tag(), s.len)?;
        }
        Ok(())
    }
}

impl FromStr for SeparableCone {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: String| Error::InvalidArgument(format!("cone spec `{s}`: {msg}"));
        let mut segments = Vec::new();
        for part in s.split(',') {
            let part = part.trim();
            let (tag, len) = part
                .split_once(':')
                .ok_or_else(|| bad(format!("segment `{part}` is not `kind:length`")))?;
            let kind = match tag.trim() {
                "nn" => SegmentKind::NonNegative,
                "free" => SegmentKind::Free,
                "zero" => SegmentKind::Zero,
                other => return Err(bad(format!("unknown segment kind `{other}`"))),
            };
            let len: usize = len
                .trim()
                .parse()
                .map_err(|_| bad(format!("bad segment length `{len}`")))?;
            segments.push(Segment { kind, len });
        }
        SeparableCone::new(segments)
    }
}
