//! The hyperbolic cone `Z × (0,∞)` over a metric space `Z` with
//!
//! `ρ((z,h),(z',h')) = 2 log((|zz'| + h∨h') / √(hh'))`,
//!
//! its Gromov products based at `o = (z0, 1)`, the boundary metric at
//! `o`, and Busemann approximations along the vertical ray over `z0`.

use serde::{Deserialize, Serialize};

use crate::metric::{ExtendedMetricSpace, SpaceDescriptor};
use crate::moebius::involute;
use crate::{Error, Result};

/// Number of heights in the default geometric grid, `h_k = D 2^{−k}`, `k = 0..=8`.
pub const DEFAULT_GRID: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConePoint {
    pub base: usize,
    pub height: f64,
}

impl ConePoint {
    pub fn new(base: usize, height: f64) -> Self {
        ConePoint { base, height }
    }
}

fn check_height(h: f64) -> Result<()> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(Error::Height(format!("heights must be positive and finite, got {h}")))
    }
}

/// `2 log(d + h∨h') − log h − log h'`, i.e. the cone metric for a base distance `d`.
fn cone_formula(d: f64, h: f64, k: f64) -> f64 {
    if d == 0.0 && h == k {
        return 0.0;
    }
    2.0 * (d + h.max(k)).ln() - (h.ln() + k.ln())
}

pub fn cone_distance(p: ConePoint, q: ConePoint, z: &ExtendedMetricSpace) -> Result<f64> {
    check_height(p.height)?;
    check_height(q.height)?;
    z.check_index(p.base)?;
    z.check_index(q.base)?;
    if z.omega().is_some_and(|w| w == p.base || w == q.base) {
        return Err(Error::OmegaArgument(z.omega().unwrap()));
    }
    Ok(cone_formula(z.d(p.base, q.base), p.height, q.height))
}

/// A finite sample of the cone. Points are listed height by height, in
/// descending height order, each height covering all base points.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeSpace {
    base: ExtendedMetricSpace,
    points: Vec<ConePoint>,
    z0: usize,
    truncated: bool,
}

/// Cone over `z` at the given heights, based at `o = (z0, 1)` with `z0`
/// the first point. Heights are sorted descending and deduplicated. With
/// `truncate`, every height must be at most `diam(z)`.
pub fn build_cone(z: &ExtendedMetricSpace, heights: &[f64], truncate: bool) -> Result<ConeSpace> {
    build_cone_at(z, heights, truncate, 0)
}

pub fn build_cone_at(z: &ExtendedMetricSpace, heights: &[f64], truncate: bool, z0: usize) -> Result<ConeSpace> {
    if z.omega().is_some() {
        return Err(Error::InvalidParameter("cone base must not have a point at infinity".into()));
    }
    if z.n() == 0 {
        return Err(Error::TooFewPoints { need: 1, have: 0 });
    }
    z.check_index(z0)?;
    if heights.is_empty() {
        return Err(Error::Height("no heights given".into()));
    }
    let mut hs = heights.to_vec();
    for &h in &hs {
        check_height(h)?;
    }
    hs.sort_by(|a, b| b.total_cmp(a));
    hs.dedup();
    if truncate {
        let diam = z.diameter();
        if hs[0] > diam {
            return Err(Error::Height(format!("height {} exceeds the truncation bound {diam}", hs[0])));
        }
    }
    let points = hs.iter().flat_map(|&h| (0..z.n()).map(move |b| ConePoint::new(b, h))).collect();
    Ok(ConeSpace { base: z.clone(), points, z0, truncated: truncate })
}

/// `D 2^{−k}` for `k = 0..count`.
pub fn geometric_heights(diameter: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| diameter * 0.5f64.powi(k as i32)).collect()
}

/// Parse a height grid: `geometric:K` (K heights from the base diameter
/// down) or an explicit comma list such as `1,0.5,0.25`.
pub fn parse_heights(spec: &str, diameter: f64) -> Result<Vec<f64>> {
    let spec = spec.trim();
    if let Some(k) = spec.strip_prefix("geometric") {
        let count = match k.strip_prefix(':') {
            Some(k) => k.trim().parse().map_err(|_| Error::Parse(format!("bad grid size in {spec:?}")))?,
            None if k.is_empty() => DEFAULT_GRID,
            None => return Err(Error::Parse(format!("bad height grid {spec:?}"))),
        };
        if !(diameter > 0.0) {
            return Err(Error::Height("geometric grid needs a positive diameter".into()));
        }
        return Ok(geometric_heights(diameter, count));
    }
    spec.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad height {t:?}"))))
        .collect()
}

impl ConeSpace {
    pub fn base(&self) -> &ExtendedMetricSpace {
        &self.base
    }

    pub fn points(&self) -> &[ConePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn z0(&self) -> usize {
        self.z0
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    /// The base point `o = (z0, 1)`. It need not be one of the sample points.
    pub fn o(&self) -> ConePoint {
        ConePoint::new(self.z0, 1.0)
    }

    /// `|z| = |z z0|`.
    pub fn norm(&self, base: usize) -> f64 {
        self.base.d(base, self.z0)
    }

    pub fn distance(&self, p: ConePoint, q: ConePoint) -> Result<f64> {
        cone_distance(p, q, &self.base)
    }

    /// Distance between sample points `i` and `j`.
    pub fn d(&self, i: usize, j: usize) -> f64 {
        let (p, q) = (self.points[i], self.points[j]);
        cone_formula(self.base.d(p.base, q.base), p.height, q.height)
    }

    /// Materialize the sample as a metric space labelled `label@height`.
    pub fn to_space(&self) -> ExtendedMetricSpace {
        let labels = self
            .points
            .iter()
            .map(|p| format!("{}@{}", self.base.labels()[p.base], p.height))
            .collect();
        ExtendedMetricSpace::from_fn(self.len(), |i, j| self.d(i, j))
            .with_labels(labels)
            .expect("one label per point")
    }

    pub fn export(&self) -> ConeExport {
        ConeExport {
            base_space: SpaceDescriptor::from_space(&self.base),
            points: self.points.iter().map(|p| (p.base, p.height)).collect(),
            o: (self.z0, 1.0),
        }
    }
}

/// JSON form of a cone sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeExport {
    pub base_space: SpaceDescriptor,
    pub points: Vec<(usize, f64)>,
    pub o: (usize, f64),
}

impl ConeExport {
    /// Rebuild the cone; the point list is taken as given.
    pub fn build(&self) -> Result<ConeSpace> {
        let base = self.base_space.build()?;
        base.check_index(self.o.0)?;
        let points = self
            .points
            .iter()
            .map(|&(b, h)| {
                base.check_index(b)?;
                check_height(h)?;
                Ok(ConePoint::new(b, h))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ConeSpace { base, points, z0: self.o.0, truncated: false })
    }
}

/// Closed-form `(p|q)_o = log((|z| + h∨1)(|z'| + h'∨1) / (|zz'| + h∨h'))`.
pub fn cone_gromov_product(p: ConePoint, q: ConePoint, cone: &ConeSpace) -> Result<f64> {
    check_height(p.height)?;
    check_height(q.height)?;
    let z = &cone.base;
    z.check_index(p.base)?;
    z.check_index(q.base)?;
    let a = cone.norm(p.base) + p.height.max(1.0);
    let b = cone.norm(q.base) + q.height.max(1.0);
    let c = z.d(p.base, q.base) + p.height.max(q.height);
    Ok(a.ln() + b.ln() - c.ln())
}

/// `(p|q)_o` as the half-sum `½(|op| + |oq| − |pq|)`.
pub fn cone_gromov_product_half_sum(p: ConePoint, q: ConePoint, cone: &ConeSpace) -> Result<f64> {
    let o = cone.o();
    Ok(0.5 * (cone.distance(o, p)? + cone.distance(o, q)? - cone.distance(p, q)?))
}

/// One empirical approximant of the boundary metric: cone points at height
/// `2^{−k}` over `Z` and `(z0, 2^k)` in place of `ω`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Approximant {
    pub k: u32,
    pub height: f64,
    /// Largest entrywise distance to the closed-form boundary metric.
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryMetric {
    /// `ρ_o` on `Z ∪ {ω}`, with `ω` as the last (ordinary) point.
    pub rho: ExtendedMetricSpace,
    pub z0: usize,
    pub approximants: Vec<Approximant>,
    /// Smallest `C` with `gap_k ≤ C 2^{−k}` for every listed `k`.
    pub fitted_c: f64,
    /// Whether the gaps strictly decrease in `k`.
    pub monotone: bool,
}

impl BoundaryMetric {
    pub fn omega(&self) -> usize {
        self.rho.n() - 1
    }
}

/// Largest `k` in the default approximant schedule `k = 0..=8`.
pub const APPROXIMANT_K: u32 = 8;

pub fn boundary_metric(z: &ExtendedMetricSpace, z0: usize) -> Result<BoundaryMetric> {
    boundary_metric_with(z, z0, APPROXIMANT_K)
}

/// Boundary metric at `o = (z0, 1)`:
/// `ρ_o(z,z') = |zz'| / ((|z|+1)(|z'|+1))`, `ρ_o(ω,z) = 1 / (|z|+1)`,
/// with approximants for `k = 0..=k_max`.
pub fn boundary_metric_with(z: &ExtendedMetricSpace, z0: usize, k_max: u32) -> Result<BoundaryMetric> {
    let cone = build_cone_at(z, &[1.0], false, z0)?;
    let n = z.n();
    let w = n;
    let norm1 = |i: usize| cone.norm(i) + 1.0;
    let exact = |i: usize, j: usize| -> f64 {
        if i == j {
            0.0
        } else if i == w {
            1.0 / norm1(j)
        } else if j == w {
            1.0 / norm1(i)
        } else {
            z.d(i, j) / (norm1(i) * norm1(j))
        }
    };
    let mut labels = z.labels().to_vec();
    labels.push("ω".into());
    let rho = ExtendedMetricSpace::from_fn(n + 1, exact).with_labels(labels)?;

    let mut approximants = Vec::new();
    for k in 0..=k_max {
        let h = 0.5f64.powi(k as i32);
        let tall = ConePoint::new(z0, 2f64.powi(k as i32));
        let at = |i: usize| if i == w { tall } else { ConePoint::new(i, h) };
        let mut gap = 0.0f64;
        for i in 0..=n {
            for j in i..=n {
                let g = cone_gromov_product_half_sum(at(i), at(j), &cone)?;
                gap = gap.max(((-g).exp() - exact(i, j)).abs());
            }
        }
        approximants.push(Approximant { k, height: h, gap });
    }
    let fitted_c = approximants.iter().map(|a| a.gap / a.height).fold(0.0, f64::max);
    let monotone = approximants.windows(2).all(|p| p[1].gap < p[0].gap);
    Ok(BoundaryMetric { rho, z0, approximants, fitted_c, monotone })
}

/// Metric involution of `ρ_o` at `ω`, restricted to `Z`:
/// `ρ_o(z,z') / (ρ_o(ω,z) ρ_o(ω,z'))`, which is `|zz'|` again.
pub fn recovered_involution(z: &ExtendedMetricSpace, z0: usize) -> Result<ExtendedMetricSpace> {
    let b = boundary_metric_with(z, z0, 0)?;
    let inv = involute(&b.rho, b.omega())?;
    inv.space.restrict_omega()?.with_labels(z.labels().to_vec())
}

/// `(z|z')_{ω,o} = −log ρ_o(z,z') + log ρ_o(ω,z) + log ρ_o(ω,z')`.
pub fn relative_boundary_product(b: &BoundaryMetric, i: usize, j: usize) -> f64 {
    let w = b.omega();
    -b.rho.d(i, j).ln() + b.rho.d(w, i).ln() + b.rho.d(w, j).ln()
}

/// One term of a Busemann approximation along `w_i = (z0, i)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BusemannStep {
    pub i: u64,
    /// `|x w_i| − |w_i o|`
    pub value: f64,
    /// `(w_i|o)_x − (w_i|x)_o`
    pub formula: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Busemann {
    pub value: f64,
    pub formula: f64,
    /// `|value − formula|` at `i_max`.
    pub discrepancy: f64,
    /// Change of `value` over the last doubling of `i`.
    pub tail_residual: f64,
    /// Evaluations at `i = 1, 2, 4, …` and `i_max`.
    pub steps: Vec<BusemannStep>,
}

/// Busemann function of `ω` normalized at `o`, approximated at `x` with
/// `w_i = (z0, i)` for dyadic `i` up to `i_max`.
pub fn busemann_approx(x: ConePoint, cone: &ConeSpace, i_max: u64) -> Result<Busemann> {
    if i_max < 2 {
        return Err(Error::InvalidParameter(format!("i_max must be at least 2, got {i_max}")));
    }
    let o = cone.o();
    let d_xo = cone.distance(x, o)?;
    let mut is: Vec<u64> = std::iter::successors(Some(1u64), |i| i.checked_mul(2)).take_while(|&i| i <= i_max).collect();
    if *is.last().unwrap() != i_max {
        is.push(i_max);
    }
    let steps = is
        .into_iter()
        .map(|i| {
            let w = ConePoint::new(cone.z0, i as f64);
            let xw = cone.distance(x, w)?;
            let wo = cone.distance(w, o)?;
            let at_x = 0.5 * (xw + d_xo - wo);
            let at_o = 0.5 * (wo + d_xo - xw);
            Ok(BusemannStep { i, value: xw - wo, formula: at_x - at_o })
        })
        .collect::<Result<Vec<_>>>()?;
    let last = steps[steps.len() - 1];
    let prev = steps[steps.len() - 2];
    Ok(Busemann {
        value: last.value,
        formula: last.formula,
        discrepancy: (last.value - last.formula).abs(),
        tail_residual: (last.value - prev.value).abs(),
        steps,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SequenceClass {
    CauchyShrinking,
    Escaping,
    Divergent,
    Inconclusive,
}

/// Thresholds of [`classify_sequence`], relative to the base diameter `D`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifyThresholds {
    /// Tail base-diameter bound, in units of `D`.
    pub tolerance: f64,
    /// Final `|z| + h` must exceed this many `D`.
    pub growth: f64,
}

impl Default for ClassifyThresholds {
    fn default() -> Self {
        ClassifyThresholds { tolerance: 1e-6, growth: 10.0 }
    }
}

pub fn classify_sequence(points: &[ConePoint], cone: &ConeSpace) -> Result<SequenceClass> {
    classify_sequence_with(points, cone, ClassifyThresholds::default())
}

/// Diagnose a finite prefix of a sequence in the cone; the tail is the last
/// half.
///
/// * `cauchy_shrinking`: tail bases within `tolerance·D` of each other and
///   tail heights non-increasing, ending at most half the head's largest height.
/// * `escaping`: `|z_i| + h_i` non-decreasing on the tail and ending above `growth·D`.
/// * `divergent`: the smallest Gromov product among tail pairs is no larger
///   than the smallest among head pairs.
pub fn classify_sequence_with(
    points: &[ConePoint],
    cone: &ConeSpace,
    t: ClassifyThresholds,
) -> Result<SequenceClass> {
    if points.len() < 8 {
        return Err(Error::TooFewPoints { need: 8, have: points.len() });
    }
    for p in points {
        check_height(p.height)?;
        cone.base.check_index(p.base)?;
    }
    let diam = cone.base.diameter();
    let scale = if diam > 0.0 { diam } else { 1.0 };
    let (head, tail) = points.split_at(points.len() / 2);

    let mut base_diam = 0.0f64;
    for (i, p) in tail.iter().enumerate() {
        for q in &tail[i + 1..] {
            base_diam = base_diam.max(cone.base.d(p.base, q.base));
        }
    }
    let head_max = head.iter().map(|p| p.height).fold(0.0, f64::max);
    let shrinking = tail.windows(2).all(|w| w[1].height <= w[0].height);
    if base_diam <= t.tolerance * diam && shrinking && tail[tail.len() - 1].height <= 0.5 * head_max {
        return Ok(SequenceClass::CauchyShrinking);
    }

    let size = |p: &ConePoint| cone.norm(p.base) + p.height;
    let growing = tail.windows(2).all(|w| size(&w[1]) >= size(&w[0]));
    if growing && size(&tail[tail.len() - 1]) > t.growth * scale {
        return Ok(SequenceClass::Escaping);
    }

    let min_product = |s: &[ConePoint]| -> Result<f64> {
        let mut m = f64::INFINITY;
        for (i, &p) in s.iter().enumerate() {
            for &q in &s[i + 1..] {
                m = m.min(cone_gromov_product(p, q, cone)?);
            }
        }
        Ok(m)
    };
    let (h, tl) = (min_product(head)?, min_product(tail)?);
    if tl <= h + 1e-9 * (1.0 + h.abs()) {
        return Ok(SequenceClass::Divergent);
    }
    Ok(SequenceClass::Inconclusive)
}
