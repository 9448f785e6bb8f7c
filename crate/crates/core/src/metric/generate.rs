use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{default_labels, ExtendedMetricSpace};
use crate::comparison::ModelPoint;
use crate::{Error, Result};

/// A 64-bit seed; [`Seed::split`] derives independent child streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seed(pub u64);

impl Seed {
    pub fn split(self, stream: u64) -> Seed {
        Seed(splitmix64(self.0 ^ splitmix64(stream.wrapping_add(0x9e37_79b9_7f4a_7c15))))
    }

    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn default_box() -> f64 {
    1.0
}
fn default_radius() -> f64 {
    2.0
}
fn default_lo() -> f64 {
    1.0
}
fn default_hi() -> f64 {
    10.0
}
fn default_dim() -> usize {
    2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum GeneratorKind {
    /// Uniform points in `[0, box]^dim`.
    Euclidean {
        #[serde(default = "default_dim")]
        dim: usize,
        n: usize,
        #[serde(default = "default_box", rename = "box")]
        box_size: f64,
    },
    /// Area-uniform points in the geodesic disc of the given radius in the
    /// model plane of curvature `kappa < 0`.
    Hyperboloid {
        kappa: f64,
        n: usize,
        #[serde(default = "default_radius")]
        radius: f64,
    },
    /// Shortest-path metric of a connected weighted graph.
    Graph {
        n: usize,
        edges: Vec<(usize, usize)>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weights: Option<Vec<f64>>,
    },
    /// `{0, 1, ..., n-1}` on the real line.
    Line { n: usize },
    /// Corners of an `a × t` rectangle, ordered around the boundary.
    Strip { a: f64, t: f64 },
    /// Uniform symmetric matrix in `[lo, hi]`, repaired to its shortest-path metric.
    RandomMetric {
        n: usize,
        #[serde(default = "default_lo")]
        lo: f64,
        #[serde(default = "default_hi")]
        hi: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Generator {
    #[serde(flatten)]
    pub kind: GeneratorKind,
    #[serde(default)]
    pub seed: Seed,
}

impl Generator {
    pub fn new(kind: GeneratorKind, seed: u64) -> Self {
        Generator { kind, seed: Seed(seed) }
    }

    pub fn euclidean(dim: usize, n: usize, box_size: f64, seed: u64) -> Self {
        Self::new(GeneratorKind::Euclidean { dim, n, box_size }, seed)
    }

    pub fn hyperboloid(kappa: f64, n: usize, radius: f64, seed: u64) -> Self {
        Self::new(GeneratorKind::Hyperboloid { kappa, n, radius }, seed)
    }

    pub fn line(n: usize) -> Self {
        Self::new(GeneratorKind::Line { n }, 0)
    }

    pub fn strip(a: f64, t: f64) -> Self {
        Self::new(GeneratorKind::Strip { a, t }, 0)
    }

    pub fn random_metric(n: usize, seed: u64) -> Self {
        Self::new(GeneratorKind::RandomMetric { n, lo: 1.0, hi: 10.0 }, seed)
    }

    pub fn graph(n: usize, edges: Vec<(usize, usize)>) -> Self {
        Self::new(GeneratorKind::Graph { n, edges, weights: None }, 0)
    }

    pub fn cycle(n: usize) -> Self {
        Self::graph(n, (0..n).map(|i| (i, (i + 1) % n)).collect())
    }

    pub fn build(&self) -> Result<ExtendedMetricSpace> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        let mut rng = self.seed.split(kind_stream(&self.kind)).rng();
        match &self.kind {
            &GeneratorKind::Euclidean { dim, n, box_size } => {
                check_n(n)?;
                if dim == 0 || !(box_size > 0.0) {
                    return bad(format!("euclidean needs dim >= 1 and box > 0, got dim={dim}, box={box_size}"));
                }
                let pts: Vec<Vec<f64>> = (0..n)
                    .map(|_| (0..dim).map(|_| rng.gen::<f64>() * box_size).collect())
                    .collect();
                Ok(ExtendedMetricSpace::from_euclidean(&pts))
            }
            GeneratorKind::Hyperboloid { kappa, n, radius } => {
                let pts = hyperboloid_points(*kappa, *n, *radius, &mut rng)?;
                Ok(ExtendedMetricSpace::from_fn(*n, |i, j| {
                    ModelPoint::distance_unchecked(&pts[i], &pts[j], *kappa)
                }))
            }
            GeneratorKind::Graph { n, edges, weights } => graph_metric(*n, edges, weights.as_deref()),
            &GeneratorKind::Line { n } => {
                check_n(n)?;
                Ok(ExtendedMetricSpace::from_fn(n, |i, j| (i as f64 - j as f64).abs()))
            }
            &GeneratorKind::Strip { a, t } => {
                if !(a > 0.0) || !(t > 0.0) {
                    return bad(format!("strip needs a > 0 and t > 0, got a={a}, t={t}"));
                }
                let diag = (t * t + a * a).sqrt();
                // Corners 1..4 of the rectangle: 12 and 34 have length t, 14 and 23 have length a.
                let d = [[0.0, t, diag, a], [t, 0.0, a, diag], [diag, a, 0.0, t], [a, diag, t, 0.0]];
                Ok(ExtendedMetricSpace::from_fn(4, |i, j| d[i][j]))
            }
            &GeneratorKind::RandomMetric { n, lo, hi } => {
                check_n(n)?;
                if !(lo > 0.0 && hi >= lo) {
                    return bad(format!("random_metric needs 0 < lo <= hi, got lo={lo}, hi={hi}"));
                }
                let mut d = vec![vec![0.0; n]; n];
                for i in 0..n {
                    for j in i + 1..n {
                        let v = lo + (hi - lo) * rng.gen::<f64>();
                        d[i][j] = v;
                        d[j][i] = v;
                    }
                }
                shortest_paths(&mut d);
                ExtendedMetricSpace::from_rows(&d)
            }
        }
    }
}

fn kind_stream(kind: &GeneratorKind) -> u64 {
    match kind {
        GeneratorKind::Euclidean { .. } => 1,
        GeneratorKind::Hyperboloid { .. } => 2,
        GeneratorKind::Graph { .. } => 3,
        GeneratorKind::Line { .. } => 4,
        GeneratorKind::Strip { .. } => 5,
        GeneratorKind::RandomMetric { .. } => 6,
    }
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need n >= 2 points, got {n}")));
    }
    Ok(())
}

/// Area-uniform sample of the geodesic disc of `radius` about the origin.
pub(crate) fn hyperboloid_points(kappa: f64, n: usize, radius: f64, rng: &mut impl Rng) -> Result<Vec<ModelPoint>> {
    check_n(n)?;
    if !(kappa < 0.0) {
        return Err(Error::InvalidParameter(format!("hyperboloid needs kappa < 0, got {kappa}")));
    }
    if !(radius > 0.0) {
        return Err(Error::InvalidParameter(format!("hyperboloid needs radius > 0, got {radius}")));
    }
    let s = (-kappa).sqrt();
    let span = (s * radius).cosh() - 1.0;
    Ok((0..n)
        .map(|_| {
            let u: f64 = rng.gen();
            let theta = rng.gen::<f64>() * std::f64::consts::TAU;
            let r = (1.0 + u * span).acosh() / s;
            ModelPoint::from_polar(kappa, r, theta)
        })
        .collect())
}

fn shortest_paths(d: &mut [Vec<f64>]) {
    let n = d.len();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
}

fn graph_metric(n: usize, edges: &[(usize, usize)], weights: Option<&[f64]>) -> Result<ExtendedMetricSpace> {
    check_n(n)?;
    if let Some(w) = weights {
        if w.len() != edges.len() {
            return Err(Error::InvalidParameter(format!("{} weights for {} edges", w.len(), edges.len())));
        }
    }
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for (e, &(u, v)) in edges.iter().enumerate() {
        if u >= n || v >= n {
            return Err(Error::IndexOutOfRange { index: u.max(v), n });
        }
        let w = weights.map_or(1.0, |w| w[e]);
        if !(w > 0.0) {
            return Err(Error::InvalidParameter(format!("edge weight must be positive, got {w}")));
        }
        if u != v && w < d[u][v] {
            d[u][v] = w;
            d[v][u] = w;
        }
    }
    shortest_paths(&mut d);
    if d.iter().flatten().any(|v| v.is_infinite()) {
        return Err(Error::InvalidParameter("graph is disconnected".into()));
    }
    ExtendedMetricSpace::from_rows(&d).and_then(|s| s.with_labels(default_labels(n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::validate;

    #[test]
    fn line4_distances() {
        let s = Generator::line(4).build().unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(s.d(i, j), (i as f64 - j as f64).abs());
            }
        }
    }

    #[test]
    fn strip_distances() {
        let s = Generator::strip(1.0, 10.0).build().unwrap();
        assert_eq!(s.d(0, 2), 101f64.sqrt());
        assert_eq!(s.d(1, 3), 101f64.sqrt());
        assert_eq!((s.d(0, 1), s.d(2, 3)), (10.0, 10.0));
        assert_eq!((s.d(0, 3), s.d(1, 2)), (1.0, 1.0));
        for (a, t) in [(0.5, 3.0), (2.0, 7.5), (1.0, 20.0)] {
            let s = Generator::strip(a, t).build().unwrap();
            assert!((s.d(0, 2).powi(2) - (t * t + a * a)).abs() <= 1e-12 * (t * t + a * a));
        }
    }

    #[test]
    fn hyperboloid_distance_matches_inner_product() {
        // Two points at model distance 1 for kappa = -1.
        let p = ModelPoint::from_polar(-1.0, 0.0, 0.0);
        let q = ModelPoint::from_polar(-1.0, 1.0, 0.3);
        assert!((ModelPoint::distance_unchecked(&p, &q, -1.0) - 1.0).abs() < 1e-14);

        // Generated points: compare with acosh(-<p,q>) on the raw coordinates.
        let mut rng = Seed(5).rng();
        let pts = hyperboloid_points(-1.0, 6, 2.0, &mut rng).unwrap();
        for p in &pts {
            for q in &pts {
                let (a, b) = (p.coords, q.coords);
                let inner = -a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
                let oracle = (-inner).max(1.0).acosh();
                assert!((ModelPoint::distance_unchecked(p, q, -1.0) - oracle).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn generators_validate_and_are_deterministic() {
        let gens = [
            Generator::euclidean(3, 12, 2.0, 9),
            Generator::hyperboloid(-1.0, 10, 3.0, 9),
            Generator::hyperboloid(-4.0, 10, 1.0, 2),
            Generator::cycle(7),
            Generator::line(5),
            Generator::strip(1.0, 4.0),
            Generator::random_metric(9, 9),
        ];
        for g in &gens {
            let a = g.build().unwrap();
            assert!(validate(&a).ok, "{g:?}: {:?}", validate(&a).violations);
            assert_eq!(a, g.build().unwrap());
        }
        assert_ne!(
            Generator::euclidean(2, 5, 1.0, 1).build().unwrap(),
            Generator::euclidean(2, 5, 1.0, 2).build().unwrap()
        );
    }

    #[test]
    fn invalid_parameters() {
        assert!(Generator::line(1).build().is_err());
        assert!(Generator::hyperboloid(0.0, 5, 1.0, 0).build().is_err());
        assert!(Generator::hyperboloid(1.0, 5, 1.0, 0).build().is_err());
        assert!(Generator::strip(0.0, 1.0).build().is_err());
        assert!(Generator::graph(3, vec![(0, 1)]).build().is_err());
        assert!(Generator::graph(2, vec![(0, 5)]).build().is_err());
    }

    #[test]
    fn seed_split_streams_differ() {
        let s = Seed(42);
        assert_ne!(s.split(0), s.split(1));
        assert_eq!(s.split(3), Seed(42).split(3));
    }

    #[test]
    fn generator_json_shape() {
        let g: Generator =
            serde_json::from_str(r#"{"kind":"strip","params":{"a":1,"t":10},"seed":3}"#).unwrap();
        assert_eq!(g, Generator::new(GeneratorKind::Strip { a: 1.0, t: 10.0 }, 3));
        let g: Generator = serde_json::from_str(r#"{"kind":"euclidean","params":{"n":4}}"#).unwrap();
        assert_eq!(g, Generator::euclidean(2, 4, 1.0, 0));
    }
}
