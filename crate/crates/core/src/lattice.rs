//! Points and boxes of the k-dimensional positive integer lattice.
//!
//! Directions are 1-based (`s` in `1..=k`) so that configs and reports use
//! the same numbering as the usual `(n;s;i)` slice notation. Coordinate 0 is
//! representable but never iterated: it encodes the boundary where every
//! field reads as zero.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of the lattice, serialized as a bare JSON array such as `[3,4]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(coords: Vec<usize>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidIndex("index must have at least one coordinate".into()));
        }
        Ok(Self(coords))
    }

    /// The all-ones index `(1, …, 1)`.
    pub fn ones(k: usize) -> Self {
        Self(vec![1; k.max(1)])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[usize] {
        &self.0
    }

    /// True when some coordinate is zero, i.e. the index lies on the boundary.
    pub fn is_boundary(&self) -> bool {
        self.0.contains(&0)
    }

    /// Coordinatewise partial order.
    pub fn leq(&self, other: &MultiIndex) -> Result<bool> {
        self.check_dim(other)?;
        Ok(self.0.iter().zip(&other.0).all(|(a, b)| a <= b))
    }

    /// The index with coordinate `s` (1-based) replaced by `position`.
    pub fn slice_replace(&self, s: usize, position: usize) -> Result<MultiIndex> {
        let k = self.dim();
        if s == 0 || s > k {
            return Err(Error::DirectionOutOfRange { s, k });
        }
        let mut coords = self.0.clone();
        coords[s - 1] = position;
        Ok(Self(coords))
    }

    fn check_dim(&self, other: &MultiIndex) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(())
    }
}

impl TryFrom<Vec<usize>> for MultiIndex {
    type Error = Error;

    fn try_from(coords: Vec<usize>) -> Result<Self> {
        Self::new(coords)
    }
}

impl From<MultiIndex> for Vec<usize> {
    fn from(idx: MultiIndex) -> Self {
        idx.0
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (n, c) in self.0.iter().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// `base` with coordinate `direction` replaced by `position`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectionSlice {
    pub base: MultiIndex,
    pub direction: usize,
    pub position: usize,
}

impl DirectionSlice {
    pub fn resolve(&self) -> Result<MultiIndex> {
        self.base.slice_replace(self.direction, self.position)
    }
}

/// The box `{ i : (1,…,1) <= i <= upper }`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct LatticeBox {
    upper: MultiIndex,
    strides: Vec<usize>,
}

impl LatticeBox {
    pub fn new(upper: MultiIndex) -> Result<Self> {
        if upper.is_boundary() {
            return Err(Error::InvalidIndex(format!(
                "box corner {upper} must have all coordinates >= 1"
            )));
        }
        let k = upper.dim();
        let mut strides = vec![1; k];
        for d in (0..k.saturating_sub(1)).rev() {
            strides[d] = strides[d + 1] * upper.0[d + 1];
        }
        Ok(Self { upper, strides })
    }

    pub fn from_dims(dims: &[usize]) -> Result<Self> {
        Self::new(MultiIndex::new(dims.to_vec())?)
    }

    pub fn upper(&self) -> &MultiIndex {
        &self.upper
    }

    pub fn dims(&self) -> &[usize] {
        self.upper.coords()
    }

    pub fn dim(&self) -> usize {
        self.upper.dim()
    }

    /// Number of lattice points, `∏ n_i`.
    pub fn len(&self) -> usize {
        self.upper.0.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Row-major strides: the last coordinate varies fastest.
    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    pub fn contains(&self, idx: &MultiIndex) -> bool {
        idx.dim() == self.dim()
            && idx.0.iter().zip(&self.upper.0).all(|(&c, &n)| c >= 1 && c <= n)
    }

    /// Position of `idx` in [`LatticeBox::iter`] order, or `None` when outside.
    pub fn linear_index(&self, idx: &MultiIndex) -> Option<usize> {
        self.linear_of(idx.coords())
    }

    pub(crate) fn linear_of(&self, coords: &[usize]) -> Option<usize> {
        if coords.len() != self.dim() {
            return None;
        }
        let mut pos = 0;
        for ((&c, &n), &st) in coords.iter().zip(&self.upper.0).zip(&self.strides) {
            if c == 0 || c > n {
                return None;
            }
            pos += (c - 1) * st;
        }
        Some(pos)
    }

    /// Inverse of [`LatticeBox::linear_index`].
    pub fn index_at(&self, mut pos: usize) -> MultiIndex {
        let coords = self
            .strides
            .iter()
            .map(|&st| {
                let c = pos / st;
                pos %= st;
                c + 1
            })
            .collect();
        MultiIndex(coords)
    }

    /// Every index of the box once, in lexicographic order.
    pub fn iter(&self) -> BoxIter<'_> {
        BoxIter {
            bx: self,
            next: Some(vec![1; self.dim()]),
        }
    }

    /// The corner line in direction `s`: `upper` with coordinate `s` running `1..=n_s`.
    pub fn direction_line(&self, s: usize) -> Result<Vec<MultiIndex>> {
        let k = self.dim();
        if s == 0 || s > k {
            return Err(Error::DirectionOutOfRange { s, k });
        }
        (1..=self.upper.0[s - 1])
            .map(|i| self.upper.slice_replace(s, i))
            .collect()
    }

    /// Linear positions of the corner line in direction `s`, in order.
    pub fn direction_line_positions(&self, s: usize) -> Result<Vec<usize>> {
        let line = self.direction_line(s)?;
        Ok(line.iter().map(|i| self.linear_index(i).expect("in box")).collect())
    }

    /// Linear positions of every line parallel to direction `s`.
    pub fn parallel_lines(&self, s: usize) -> Result<Vec<Vec<usize>>> {
        let k = self.dim();
        if s == 0 || s > k {
            return Err(Error::DirectionOutOfRange { s, k });
        }
        let n_s = self.upper.0[s - 1];
        let stride = self.strides[s - 1];
        Ok(self
            .iter()
            .filter(|idx| idx.0[s - 1] == 1)
            .map(|start| {
                let p0 = self.linear_index(&start).expect("in box");
                (0..n_s).map(|i| p0 + i * stride).collect()
            })
            .collect())
    }

    /// The same box with coordinate `s` replaced by `n`.
    pub fn with_extent(&self, s: usize, n: usize) -> Result<LatticeBox> {
        LatticeBox::new(self.upper.slice_replace(s, n)?)
    }
}

impl TryFrom<Vec<usize>> for LatticeBox {
    type Error = Error;

    fn try_from(dims: Vec<usize>) -> Result<Self> {
        Self::new(MultiIndex::new(dims)?)
    }
}

impl From<LatticeBox> for Vec<usize> {
    fn from(b: LatticeBox) -> Self {
        b.upper.0
    }
}

impl fmt::Display for LatticeBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dims: Vec<String> = self.dims().iter().map(|d| d.to_string()).collect();
        write!(f, "{}", dims.join("x"))
    }
}

pub struct BoxIter<'a> {
    bx: &'a LatticeBox,
    next: Option<Vec<usize>>,
}

impl Iterator for BoxIter<'_> {
    type Item = MultiIndex;

    fn next(&mut self) -> Option<MultiIndex> {
        let cur = self.next.take()?;
        let mut succ = cur.clone();
        let dims = self.bx.dims();
        let mut d = succ.len();
        loop {
            if d == 0 {
                break;
            }
            d -= 1;
            if succ[d] < dims[d] {
                succ[d] += 1;
                self.next = Some(succ);
                break;
            }
            succ[d] = 1;
        }
        Some(MultiIndex(cur))
    }
}
