//! Points, weighted datasets, center sets and the squared Euclidean distance.
//!
//! Datasets and center sets store coordinates in one flat row-major buffer so
//! the inner loops of the clustering routines stay on contiguous memory.

use crate::error::{ClusterError, Result};

/// A single point in `R^d`. Coordinates are finite and `d >= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(ClusterError::ZeroDimension);
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(ClusterError::NonFinite { index: 0 });
        }
        Ok(Self(coords))
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for Point {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// A point standing in for `weight` raw points. Raw stream points have weight 1.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedPoint {
    pub point: Point,
    pub weight: f64,
}

impl WeightedPoint {
    pub fn new(point: Point, weight: f64) -> Result<Self> {
        if !(weight.is_finite() && weight > 0.0) {
            return Err(ClusterError::InvalidWeight { index: 0, weight });
        }
        Ok(Self { point, weight })
    }

    pub fn unit(point: Point) -> Self {
        Self { point, weight: 1.0 }
    }
}

/// Ordered collection of weighted points sharing one dimension.
///
/// An empty dataset is a valid container (stream buffers start empty), but
/// every clustering operation rejects it.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    dim: usize,
    coords: Vec<f64>,
    weights: Vec<f64>,
}

impl Dataset {
    pub fn empty(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(ClusterError::ZeroDimension);
        }
        Ok(Self {
            dim,
            coords: Vec::new(),
            weights: Vec::new(),
        })
    }

    /// Builds a unit-weight dataset from rows of coordinates.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.first().ok_or(ClusterError::EmptyDataset)?.as_ref().len();
        let mut data = Self::empty(dim)?;
        for row in rows {
            data.push(row.as_ref(), 1.0)?;
        }
        Ok(data)
    }

    pub fn from_weighted_rows<R: AsRef<[f64]>>(rows: &[R], weights: &[f64]) -> Result<Self> {
        if rows.len() != weights.len() {
            return Err(ClusterError::InvalidConfig(format!(
                "{} rows but {} weights",
                rows.len(),
                weights.len()
            )));
        }
        let dim = rows.first().ok_or(ClusterError::EmptyDataset)?.as_ref().len();
        let mut data = Self::empty(dim)?;
        for (row, &w) in rows.iter().zip(weights) {
            data.push(row.as_ref(), w)?;
        }
        Ok(data)
    }

    pub fn from_weighted_points<'a, I>(dim: usize, points: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a WeightedPoint>,
    {
        let mut data = Self::empty(dim)?;
        for wp in points {
            data.push(wp.point.coords(), wp.weight)?;
        }
        Ok(data)
    }

    /// Appends a point, validating dimension, finiteness and weight.
    pub fn push(&mut self, coords: &[f64], weight: f64) -> Result<()> {
        let index = self.len();
        if coords.len() != self.dim {
            return Err(ClusterError::DimensionMismatch {
                expected: self.dim,
                got: coords.len(),
            });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(ClusterError::NonFinite { index });
        }
        if !(weight.is_finite() && weight > 0.0) {
            return Err(ClusterError::InvalidWeight { index, weight });
        }
        self.coords.extend_from_slice(coords);
        self.weights.push(weight);
        Ok(())
    }

    /// Appends every point of `other`.
    pub fn extend_from(&mut self, other: &Dataset) -> Result<()> {
        if other.dim != self.dim {
            return Err(ClusterError::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        self.coords.extend_from_slice(&other.coords);
        self.weights.extend_from_slice(&other.weights);
        Ok(())
    }

    pub fn clear(&mut self) {
        self.coords.clear();
        self.weights.clear();
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = (&[f64], f64)> + '_ {
        self.coords
            .chunks_exact(self.dim)
            .zip(self.weights.iter().copied())
    }

    /// Returns a copy with every weight multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let mut out = self.clone();
        for (i, w) in out.weights.iter_mut().enumerate() {
            *w *= factor;
            if !(w.is_finite() && *w > 0.0) {
                return Err(ClusterError::InvalidWeight { index: i, weight: *w });
            }
        }
        Ok(out)
    }

    pub fn to_weighted_points(&self) -> Vec<WeightedPoint> {
        self.iter()
            .map(|(p, w)| WeightedPoint {
                point: Point(p.to_vec()),
                weight: w,
            })
            .collect()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.coords.chunks_exact(self.dim).map(<[f64]>::to_vec).collect()
    }

    pub(crate) fn ensure_nonempty(&self) -> Result<()> {
        if self.is_empty() {
            Err(ClusterError::EmptyDataset)
        } else {
            Ok(())
        }
    }
}

/// Candidate cluster centers. Holds at least one center once handed to a
/// cost function.
#[derive(Debug, Clone, PartialEq)]
pub struct CenterSet {
    dim: usize,
    coords: Vec<f64>,
}

impl CenterSet {
    pub fn empty(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(ClusterError::ZeroDimension);
        }
        Ok(Self {
            dim,
            coords: Vec::new(),
        })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.first().ok_or(ClusterError::EmptyCenters)?.as_ref().len();
        let mut centers = Self::empty(dim)?;
        for row in rows {
            centers.push(row.as_ref())?;
        }
        Ok(centers)
    }

    pub fn push(&mut self, coords: &[f64]) -> Result<()> {
        if coords.len() != self.dim {
            return Err(ClusterError::DimensionMismatch {
                expected: self.dim,
                got: coords.len(),
            });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(ClusterError::NonFinite { index: self.len() });
        }
        self.coords.extend_from_slice(coords);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn center(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.iter().map(<[f64]>::to_vec).collect()
    }

    pub(crate) fn center_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.coords[i * self.dim..(i + 1) * self.dim]
    }

    /// Largest Euclidean displacement between matching centers.
    pub fn max_displacement(&self, other: &CenterSet) -> f64 {
        self.iter()
            .zip(other.iter())
            .map(|(a, b)| sq_dist(a, b).sqrt())
            .fold(0.0, f64::max)
    }

    /// Checks that this center set can be evaluated against `data`.
    pub(crate) fn ensure_compatible(&self, data: &Dataset) -> Result<()> {
        if self.is_empty() {
            return Err(ClusterError::EmptyCenters);
        }
        if self.dim != data.dim() {
            return Err(ClusterError::DimensionMismatch {
                expected: data.dim(),
                got: self.dim,
            });
        }
        Ok(())
    }
}

/// Squared Euclidean distance `‖a − b‖²`.
pub fn squared_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(ClusterError::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(sq_dist(a, b))
}

#[inline]
pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        let diff = x - y;
        acc += diff * diff;
    }
    if acc == 0.0 && a != b {
        // underflow: distinct points never report a zero distance
        return f64::from_bits(1);
    }
    acc
}

/// Index and squared distance of the nearest center; ties go to the lowest index.
#[inline]
pub(crate) fn nearest(x: &[f64], centers: &CenterSet) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (i, c) in centers.iter().enumerate() {
        let d = sq_dist(x, c);
        if d < best.1 {
            best = (i, d);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn squared_distance_examples() {
        assert_eq!(squared_distance(&[0.0, 0.0], &[0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(squared_distance(&[0.0, 0.0], &[3.0, 4.0]).unwrap(), 25.0);
        assert_eq!(
            squared_distance(&[1.0, 1.0, 1.0], &[2.0, 3.0, 5.0]).unwrap(),
            21.0
        );
    }

    #[test]
    fn squared_distance_rejects_mismatched_dims() {
        let err = squared_distance(&[0.0], &[0.0, 1.0]).unwrap_err();
        assert!(matches!(
            err,
            ClusterError::DimensionMismatch { expected: 1, got: 2 }
        ));
    }

    #[test]
    fn underflowing_difference_stays_positive() {
        let d = squared_distance(&[1e-170], &[0.0]).unwrap();
        assert!(d > 0.0);
    }

    #[test]
    fn dataset_rejects_bad_input() {
        let mut data = Dataset::empty(2).unwrap();
        assert!(data.push(&[1.0], 1.0).is_err());
        assert!(data.push(&[1.0, f64::NAN], 1.0).is_err());
        assert!(data.push(&[1.0, 2.0], 0.0).is_err());
        assert!(data.push(&[1.0, 2.0], -1.0).is_err());
        data.push(&[1.0, 2.0], 2.5).unwrap();
        assert_eq!(data.len(), 1);
        assert_eq!(data.total_weight(), 2.5);
        assert!(Dataset::empty(0).is_err());
    }

    #[test]
    fn nearest_breaks_ties_low() {
        let centers = CenterSet::from_rows(&[[-1.0], [1.0]]).unwrap();
        assert_eq!(nearest(&[0.0], &centers), (0, 1.0));
    }
}
