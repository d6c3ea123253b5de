//! Evaluation points and ordered point sets.

use crate::error::{Error, Result};
use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;

/// A complex evaluation point in a kernel's domain.
///
/// Membership in the unit disk is a property of the kernel, not the point;
/// disk kernels enforce `|p| < 1` when they are evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub re: f64,
    pub im: f64,
}

impl Point {
    pub fn new(re: f64, im: f64) -> Self {
        Point { re, im }
    }

    pub fn real(re: f64) -> Self {
        Point { re, im: 0.0 }
    }

    pub fn from_complex(c: Complex64) -> Self {
        Point { re: c.re, im: c.im }
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    /// Euclidean modulus.
    pub fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im == 0.0 {
            write!(f, "{}", self.re)
        } else if self.im < 0.0 {
            write!(f, "{}{}i", self.re, self.im)
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

/// A nonempty ordered list of points. Matrix indices follow list order.
///
/// Duplicate points are allowed; they make Gram matrices singular but not
/// invalid, so they are surfaced via [`PointSet::duplicate_pairs`] instead of
/// being rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    points: Vec<Point>,
    labels: Option<Vec<String>>,
}

impl PointSet {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyPointSet);
        }
        for p in &points {
            if !p.is_finite() {
                return Err(Error::NonFinitePoint { re: p.re, im: p.im });
            }
        }
        Ok(PointSet {
            points,
            labels: None,
        })
    }

    pub fn with_labels(points: Vec<Point>, labels: Vec<String>) -> Result<Self> {
        if labels.len() != points.len() {
            return Err(Error::LabelCountMismatch {
                points: points.len(),
                labels: labels.len(),
            });
        }
        let mut set = PointSet::new(points)?;
        set.labels = Some(labels);
        Ok(set)
    }

    /// Convenience constructor from real coordinates.
    pub fn from_reals(res: &[f64]) -> Result<Self> {
        PointSet::new(res.iter().map(|&r| Point::real(r)).collect())
    }

    pub fn from_complexes(cs: &[Complex64]) -> Result<Self> {
        PointSet::new(cs.iter().map(|&c| Point::from_complex(c)).collect())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false // nonempty by construction
    }

    pub fn get(&self, i: usize) -> Point {
        self.points[i]
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn iter(&self) -> impl Iterator<Item = Point> + '_ {
        self.points.iter().copied()
    }

    /// First index holding exactly this point, if any.
    pub fn index_of(&self, p: Point) -> Option<usize> {
        self.points.iter().position(|&q| q == p)
    }

    /// Index pairs (i, j) with i < j that hold identical points.
    pub fn duplicate_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.points.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if self.points[i] == self.points[j] {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// The first `n` points (labels sliced alongside). Panics if `n` is 0 or
    /// exceeds the length; callers validate first.
    pub fn prefix(&self, n: usize) -> PointSet {
        assert!(n >= 1 && n <= self.points.len());
        PointSet {
            points: self.points[..n].to_vec(),
            labels: self.labels.as_ref().map(|l| l[..n].to_vec()),
        }
    }

    /// A copy with `p` appended (label dropped for the new point).
    pub fn append(&self, p: Point) -> PointSet {
        let mut points = self.points.clone();
        points.push(p);
        let labels = self.labels.as_ref().map(|l| {
            let mut l = l.clone();
            l.push(String::new());
            l
        });
        PointSet { points, labels }
    }

    /// `n` reproducible points in the open disk of radius `max_radius`,
    /// uniform in area. Same seed, same points.
    pub fn random_in_disk(n: usize, max_radius: f64, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyPointSet);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut points = Vec::with_capacity(n);
        for _ in 0..n {
            let r = max_radius * rng.random_range(0.0..1.0f64).sqrt();
            let theta = rng.random_range(0.0..std::f64::consts::TAU);
            points.push(Point::new(r * theta.cos(), r * theta.sin()));
        }
        PointSet::new(points)
    }
}
