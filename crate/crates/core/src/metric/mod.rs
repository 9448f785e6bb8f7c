//! Finite extended metric spaces: representation, validation, transforms,
//! generators and file formats.

mod generate;
mod io;
mod transform;
mod validate;

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

pub use generate::{Generator, GeneratorKind, Seed};
pub use io::{infer_omega, parse_generator_spec, read_csv, read_json, write_csv, SpaceDescriptor};
pub use validate::{validate, ValidationReport, Violation, ViolationKind, TRIANGLE_SLACK};

/// A distance: a finite nonnegative real or `+∞`.
///
/// `+∞` is a tag, not `f64::INFINITY`; it only ever arises as the distance
/// to the point at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Dist {
    Finite(f64),
    Infinite,
}

impl Dist {
    pub const ZERO: Dist = Dist::Finite(0.0);

    pub fn finite(self) -> Option<f64> {
        match self {
            Dist::Finite(v) => Some(v),
            Dist::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Dist::Infinite)
    }

    /// `∨`: infinity absorbs.
    pub fn max(self, other: Dist) -> Dist {
        match (self, other) {
            (Dist::Finite(a), Dist::Finite(b)) => Dist::Finite(a.max(b)),
            _ => Dist::Infinite,
        }
    }

    pub fn map_finite(self, f: impl FnOnce(f64) -> f64) -> Dist {
        match self {
            Dist::Finite(v) => Dist::Finite(f(v)),
            Dist::Infinite => Dist::Infinite,
        }
    }
}

impl std::ops::Add for Dist {
    type Output = Dist;

    fn add(self, rhs: Dist) -> Dist {
        match (self, rhs) {
            (Dist::Finite(a), Dist::Finite(b)) => Dist::Finite(a + b),
            _ => Dist::Infinite,
        }
    }
}

impl PartialOrd for Dist {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Dist::Finite(a), Dist::Finite(b)) => a.partial_cmp(b),
            (Dist::Finite(_), Dist::Infinite) => Some(Ordering::Less),
            (Dist::Infinite, Dist::Finite(_)) => Some(Ordering::Greater),
            (Dist::Infinite, Dist::Infinite) => Some(Ordering::Equal),
        }
    }
}

impl fmt::Display for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dist::Finite(v) => write!(f, "{v}"),
            Dist::Infinite => f.write_str("inf"),
        }
    }
}

impl From<f64> for Dist {
    fn from(v: f64) -> Self {
        Dist::Finite(v)
    }
}

impl Serialize for Dist {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Dist::Finite(v) => s.serialize_f64(*v),
            Dist::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Dist {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Dist::Finite(v)),
            Raw::Str(s) => parse_dist_token(&s).map_err(serde::de::Error::custom),
        }
    }
}

pub(crate) fn parse_dist_token(token: &str) -> Result<Dist> {
    let t = token.trim();
    match t.to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" | "∞" => Ok(Dist::Infinite),
        _ => t
            .parse::<f64>()
            .map(Dist::Finite)
            .map_err(|_| Error::Parse(format!("bad distance token {t:?}"))),
    }
}

/// A finite point set with an extended distance matrix and at most one
/// point at infinity `ω`.
///
/// Construction only checks the shape; metric axioms are checked by
/// [`validate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "SpaceDescriptor", try_from = "SpaceDescriptor")]
pub struct ExtendedMetricSpace {
    labels: Vec<String>,
    dist: Vec<Dist>,
    omega: Option<usize>,
}

impl ExtendedMetricSpace {
    pub fn new(labels: Vec<String>, rows: Vec<Vec<Dist>>, omega: Option<usize>) -> Result<Self> {
        let n = rows.len();
        if labels.len() != n {
            return Err(Error::LabelCount { labels: labels.len(), n });
        }
        let mut dist = Vec::with_capacity(n * n);
        for (row, r) in rows.into_iter().enumerate() {
            if r.len() != n {
                return Err(Error::Shape { expected: n, row, got: r.len() });
            }
            dist.extend(r);
        }
        if let Some(w) = omega {
            if w >= n {
                return Err(Error::IndexOutOfRange { index: w, n });
            }
        }
        Ok(ExtendedMetricSpace { labels, dist, omega })
    }
}

impl From<ExtendedMetricSpace> for SpaceDescriptor {
    fn from(s: ExtendedMetricSpace) -> Self {
        SpaceDescriptor::from_space(&s)
    }
}

impl TryFrom<SpaceDescriptor> for ExtendedMetricSpace {
    type Error = Error;

    fn try_from(d: SpaceDescriptor) -> Result<Self> {
        d.build()
    }
}

impl ExtendedMetricSpace {
    /// A space without `ω` whose distances are given by `f`, labels `0..n`.
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut dist = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                dist.push(Dist::Finite(if i == j { 0.0 } else { f(i, j) }));
            }
        }
        ExtendedMetricSpace { labels: default_labels(n), dist, omega: None }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let rows = rows
            .iter()
            .map(|r| r.iter().copied().map(Dist::Finite).collect())
            .collect();
        Self::new(default_labels(n), rows, None)
    }

    /// Points of the real line at the given coordinates.
    pub fn from_line_points(xs: &[f64]) -> Self {
        let mut space = Self::from_fn(xs.len(), |i, j| (xs[i] - xs[j]).abs());
        space.labels = xs.iter().map(|x| format!("{x}")).collect();
        space
    }

    /// Points of `R^dim` (row-major coordinates) with the Euclidean metric.
    pub fn from_euclidean(points: &[Vec<f64>]) -> Self {
        Self::from_fn(points.len(), |i, j| {
            points[i]
                .iter()
                .zip(&points[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n() {
            return Err(Error::LabelCount { labels: labels.len(), n: self.n() });
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn omega(&self) -> Option<usize> {
        self.omega
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Dist {
        self.dist[i * self.n() + j]
    }

    pub fn rows(&self) -> Vec<Vec<Dist>> {
        self.dist.chunks(self.n().max(1)).map(|r| r.to_vec()).take(self.n()).collect()
    }

    pub fn check_index(&self, index: usize) -> Result<()> {
        if index < self.n() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index, n: self.n() })
        }
    }

    /// Indices of all points other than `ω`, ascending.
    pub fn finite_indices(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| Some(i) != self.omega).collect()
    }

    /// Distance between two finite points. Infinite entries (only present
    /// in invalid spaces) come back as `f64::INFINITY`.
    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.get(i, j).finite().unwrap_or(f64::INFINITY)
    }

    /// Largest finite distance between non-`ω` points.
    pub fn diameter(&self) -> f64 {
        let idx = self.finite_indices();
        let mut diam = 0.0f64;
        for (a, &i) in idx.iter().enumerate() {
            for &j in &idx[a + 1..] {
                diam = diam.max(self.d(i, j));
            }
        }
        diam
    }

    /// Relabel points: point `k` of the result is point `perm[k]` of `self`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n();
        if perm.len() != n {
            return Err(Error::SizeMismatch(perm.len(), n));
        }
        let mut seen = vec![false; n];
        for &p in perm {
            self.check_index(p)?;
            if std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidParameter(format!("{p} repeated in permutation")));
            }
        }
        let rows = perm
            .iter()
            .map(|&i| perm.iter().map(|&j| self.get(i, j)).collect())
            .collect();
        let labels = perm.iter().map(|&i| self.labels[i].clone()).collect();
        let omega = self.omega.map(|w| perm.iter().position(|&p| p == w).unwrap());
        Self::new(labels, rows, omega)
    }
}

pub(crate) fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}
