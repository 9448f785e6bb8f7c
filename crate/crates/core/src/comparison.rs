//! The model plane `M²_κ` (`κ < 0`) on the hyperboloid, comparison
//! triangles and quadrilaterals, and the asymptotic `CAT(κ)` defect.
//!
//! Placement is closed-form: every comparison point is written in geodesic
//! polar coordinates about `p̄1`, with `p̄3` on the positive `x1` axis.
//! Angles come from the half-angle form of the hyperbolic law of cosines,
//!
//! `sin²(γ/2) = sinh((a−b+c)/2) sinh((a+b−c)/2) / (sinh b sinh c)`,
//!
//! which stays accurate for thin and for tiny triangles.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::metric::{ExtendedMetricSpace, TRIANGLE_SLACK};
use crate::scan::{choose4, scan_max};
use crate::{Error, Result};

/// Relative tolerance of the hyperboloid constraint accepted by [`ModelPoint::distance`].
pub const SHEET_TOL: f64 = 1e-8;

/// A point `(x0, x1, x2)` on the upper sheet `⟨p,p⟩ = 1/κ`, `x0 > 0`,
/// of the Minkowski form `⟨p,q⟩ = −p0 q0 + p1 q1 + p2 q2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelPoint {
    pub coords: [f64; 3],
}

fn minkowski(a: [f64; 3], b: [f64; 3]) -> f64 {
    -a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn check_kappa(kappa: f64) -> Result<f64> {
    if kappa < 0.0 && kappa.is_finite() {
        Ok((-kappa).sqrt())
    } else {
        Err(Error::InvalidParameter(format!("model plane needs kappa < 0, got {kappa}")))
    }
}

impl ModelPoint {
    pub fn origin(kappa: f64) -> Self {
        Self::from_polar(kappa, 0.0, 0.0)
    }

    /// The point at distance `r` from the origin in direction `theta`.
    pub fn from_polar(kappa: f64, r: f64, theta: f64) -> Self {
        let s = (-kappa).sqrt();
        let u = s * r;
        let (sh, ch) = (u.sinh() / s, u.cosh() / s);
        ModelPoint { coords: [ch, sh * theta.cos(), sh * theta.sin()] }
    }

    /// Relative violation of the sheet constraint.
    pub fn sheet_residual(&self, kappa: f64) -> f64 {
        let x = self.coords;
        if !(x[0] > 0.0) {
            return f64::INFINITY;
        }
        (kappa * minkowski(x, x) - 1.0).abs() / (-kappa * x[0] * x[0]).max(1.0)
    }

    /// Mirror image across the geodesic through the origin along `x1`.
    pub fn reflect(&self) -> Self {
        let [a, b, c] = self.coords;
        ModelPoint { coords: [a, b, -c] }
    }

    /// Model-plane distance; both points must be on the sheet.
    pub fn distance(p: &ModelPoint, q: &ModelPoint, kappa: f64) -> Result<f64> {
        check_kappa(kappa)?;
        for pt in [p, q] {
            let r = pt.sheet_residual(kappa);
            if !(r <= SHEET_TOL) {
                return Err(Error::OffSheet(r));
            }
        }
        Ok(Self::distance_unchecked(p, q, kappa))
    }

    pub(crate) fn distance_unchecked(p: &ModelPoint, q: &ModelPoint, kappa: f64) -> f64 {
        let s = (-kappa).sqrt();
        let u = p.coords.map(|v| v * s);
        let v = q.coords.map(|v| v * s);
        let cosh_d = -minkowski(u, v);
        let d = if cosh_d < 2.0 {
            // ⟨u−v, u−v⟩ = 4 sinh²(d/2); avoids acosh's cancellation near 1.
            let w = [u[0] - v[0], u[1] - v[1], u[2] - v[2]];
            2.0 * (minkowski(w, w).max(0.0).sqrt() / 2.0).asinh()
        } else {
            cosh_d.acosh()
        };
        d / s
    }
}

/// `ln sinh(x)` for `x > 0`.
fn ln_sinh(x: f64) -> f64 {
    x + (-(-2.0 * x).exp_m1() / 2.0).ln()
}

/// `(sin(γ/2), cos(γ/2))` for the angle `γ` opposite `a`, from
/// `cos²(γ/2) = sinh((b+c+a)/2) sinh((b+c−a)/2) / (sinh b sinh c)` and the
/// matching `sin²` form. Lengths are already scaled by `√−κ`; `None` when
/// the sides are not a triangle.
fn half_angle(a: f64, b: f64, c: f64) -> Option<(f64, f64)> {
    let sum = a + b + c;
    let slack = TRIANGLE_SLACK * sum;
    if a > b + c + slack || b > a + c + slack || c > a + b + slack || !sum.is_finite() {
        return None;
    }
    if b == 0.0 || c == 0.0 {
        // A vertex coincides with p̄1; the direction is arbitrary.
        return Some((0.0, 1.0));
    }
    // Snap near-degenerate triangles onto a geodesic.
    if b + c - a <= slack {
        return Some((1.0, 0.0));
    }
    if a - (b - c).abs() <= slack {
        return Some((0.0, 1.0));
    }
    let denom = ln_sinh(b) + ln_sinh(c);
    let sin2 = (ln_sinh((a - b + c) / 2.0) + ln_sinh((a + b - c) / 2.0) - denom).exp();
    let cos2 = (ln_sinh(sum / 2.0) + ln_sinh((b + c - a) / 2.0) - denom).exp();
    let norm = (sin2 + cos2).sqrt();
    Some(((sin2.sqrt() / norm).min(1.0), (cos2.sqrt() / norm).min(1.0)))
}

/// Angle at the vertex between sides `b` and `c` of the comparison triangle
/// with sides `(a, b, c)` in `M²_κ`.
pub fn comparison_angle(a: f64, b: f64, c: f64, kappa: f64) -> Result<f64> {
    let s = check_kappa(kappa)?;
    half_angle(s * a, s * b, s * c)
        .map(|(sh, ch)| 2.0 * sh.atan2(ch))
        .ok_or(Error::TriangleInequality(a, b, c))
}

/// Comparison triangle with `|p2p3| = a`, `|p1p3| = b`, `|p1p2| = c`:
/// `p1` at the origin, `p2` on the positive `x1` axis, `p3` on the positive
/// `x2` side.
pub fn embed_triangle(a: f64, b: f64, c: f64, kappa: f64) -> Result<[ModelPoint; 3]> {
    let gamma = comparison_angle(a, b, c, kappa)?;
    Ok([
        ModelPoint::origin(kappa),
        ModelPoint::from_polar(kappa, c, 0.0),
        ModelPoint::from_polar(kappa, b, gamma),
    ])
}

/// The six distances of a labelled quadruple `x1, x2, x3, x4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadDistances {
    pub d12: f64,
    pub d13: f64,
    pub d14: f64,
    pub d23: f64,
    pub d24: f64,
    pub d34: f64,
}

impl QuadDistances {
    pub fn from_space(space: &ExtendedMetricSpace, [x1, x2, x3, x4]: [usize; 4]) -> Self {
        QuadDistances {
            d12: space.d(x1, x2),
            d13: space.d(x1, x3),
            d14: space.d(x1, x4),
            d23: space.d(x2, x3),
            d24: space.d(x2, x4),
            d34: space.d(x3, x4),
        }
    }
}

/// Half-angle sines and cosines at p̄1 of triangles `(1,2,3)` and `(1,3,4)`.
fn quad_half_angles(d: &QuadDistances, s: f64) -> Option<[(f64, f64); 2]> {
    Some([
        half_angle(s * d.d23, s * d.d12, s * d.d13)?,
        half_angle(s * d.d34, s * d.d14, s * d.d13)?,
    ])
}

/// Comparison quadrilateral: triangles `(1,2,3)` and `(1,3,4)` glued along
/// the diagonal `p̄1p̄3` of length `d13`, with `p̄2` and `p̄4` on opposite
/// sides of it. Sides `12, 23, 34, 41` and the diagonal `13` are exact.
pub fn comparison_quadrilateral(d: &QuadDistances, kappa: f64) -> Result<[ModelPoint; 4]> {
    let s = check_kappa(kappa)?;
    let [(sa, ca), (sb, cb)] =
        quad_half_angles(d, s).ok_or(Error::TriangleInequality(d.d12, d.d23, d.d13))?;
    let (alpha, beta) = (2.0 * sa.atan2(ca), 2.0 * sb.atan2(cb));
    Ok([
        ModelPoint::origin(kappa),
        ModelPoint::from_polar(kappa, d.d12, alpha),
        ModelPoint::from_polar(kappa, d.d13, 0.0),
        ModelPoint::from_polar(kappa, d.d14, -beta),
    ])
}

/// `sinh²(|p̄2p̄4|√−κ / 2)` of the comparison quadrilateral, from
/// `sinh²(D/2) = sinh²((r2−r4)/2) + sinh r2 sinh r4 sin²((α+β)/2)`.
fn sinh2_half_diagonal(d: &QuadDistances, s: f64) -> Option<f64> {
    let [(sa, ca), (sb, cb)] = quad_half_angles(d, s)?;
    let (r2, r4) = (s * d.d12, s * d.d14);
    let half = sa * cb + ca * sb;
    Some(((r2 - r4) / 2.0).sinh().powi(2) + r2.sinh() * r4.sinh() * half * half)
}

/// Length of the free diagonal `|p̄2p̄4|` of the comparison quadrilateral.
pub fn comparison_diagonal(d: &QuadDistances, kappa: f64) -> Result<f64> {
    let s = check_kappa(kappa)?;
    let h = sinh2_half_diagonal(d, s).ok_or(Error::TriangleInequality(d.d12, d.d23, d.d13))?;
    Ok(2.0 * h.sqrt().asinh() / s)
}

/// `sn_κ(d24/2) − sn_κ(|p̄2p̄4|/2)` for the canonical comparison
/// quadrilateral, or `None` if a boundary triangle is degenerate beyond
/// tolerance.
pub fn ascat_residual(d: &QuadDistances, kappa: f64) -> Option<f64> {
    let s = (-kappa).sqrt();
    let h = sinh2_half_diagonal(d, s)?;
    Some(((s * d.d24 / 2.0).sinh() - h.sqrt()) / s)
}

/// The six labelled quadrilaterals scanned per 4-subset `a < b < c < d`.
///
/// Each entry glues along one diagonal and tests the other; the label lists
/// the glued pair first, in positions of the sorted subset.
pub const GLUINGS: [(&str, [usize; 4]); 6] = [
    ("13/24", [0, 1, 2, 3]),
    ("24/13", [1, 2, 3, 0]),
    ("12/34", [0, 2, 1, 3]),
    ("34/12", [2, 1, 3, 0]),
    ("14/23", [0, 1, 3, 2]),
    ("23/14", [1, 3, 2, 0]),
];

fn labelled(q: [usize; 4], g: usize) -> [usize; 4] {
    GLUINGS[g].1.map(|p| q[p])
}

/// Canonical-embedding asymptotic `CAT(κ)` certificate.
///
/// `defect` is the largest `sn_κ(d(x2,x4)/2) − sn_κ(|p̄2p̄4|/2)` over all
/// labelled quadruples, with comparison points from
/// [`comparison_quadrilateral`]. Since the definition only asks for *some*
/// comparison configuration, this is an upper bound on its least `δ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AscatCertificate {
    pub kappa: f64,
    pub defect: f64,
    /// Sorted 4-subset attaining the defect.
    pub witness: Option<[usize; 4]>,
    /// Which diagonal was glued, see [`GLUINGS`].
    pub gluing: Option<String>,
    /// The witness as `x1, x2, x3, x4`.
    pub labelled: Option<[usize; 4]>,
    /// Largest deviation of the witness embedding's four sides and glued
    /// diagonal from the data, measured on the hyperboloid.
    pub side_residual: Option<f64>,
    pub non_embeddable: Vec<[usize; 4]>,
    pub scanned: u64,
    pub elapsed_s: f64,
}

pub fn ascat_defect(space: &ExtendedMetricSpace, kappa: f64) -> Result<AscatCertificate> {
    check_kappa(kappa)?;
    let points = space.finite_indices();
    let scan = scan_max(&points, |q| {
        std::array::from_fn::<f64, 6, _>(|g| {
            ascat_residual(&QuadDistances::from_space(space, labelled(q, g)), kappa)
                .unwrap_or(f64::NEG_INFINITY)
        })
    });

    let m = points.len();
    let mut non_embeddable: Vec<[usize; 4]> = (0..m.saturating_sub(3))
        .into_par_iter()
        .flat_map_iter(|ia| {
            let points = &points;
            (ia + 1..m).flat_map(move |ib| {
                (ib + 1..m).flat_map(move |ic| {
                    (ic + 1..m).filter_map(move |id| {
                        let q = [points[ia], points[ib], points[ic], points[id]];
                        (0..6)
                            .any(|g| {
                                ascat_residual(&QuadDistances::from_space(space, labelled(q, g)), kappa).is_none()
                            })
                            .then_some(q)
                    })
                })
            })
        })
        .collect();
    non_embeddable.sort_unstable();

    let mut cert = AscatCertificate {
        kappa,
        defect: f64::NEG_INFINITY,
        witness: None,
        gluing: None,
        labelled: None,
        side_residual: None,
        non_embeddable,
        scanned: choose4(m),
        elapsed_s: scan.elapsed.as_secs_f64(),
    };
    if let Some(best) = scan.best.filter(|b| b.value.is_finite()) {
        let lab = labelled(best.quad, best.choice);
        let d = QuadDistances::from_space(space, lab);
        cert.defect = best.value;
        cert.witness = Some(best.quad);
        cert.gluing = Some(GLUINGS[best.choice].0.to_string());
        cert.labelled = Some(lab);
        cert.side_residual = comparison_quadrilateral(&d, kappa).ok().map(|p| side_residual(&p, &d, kappa));
    }
    Ok(cert)
}

/// Largest error of the four sides and the glued diagonal of an embedding.
pub fn side_residual(p: &[ModelPoint; 4], d: &QuadDistances, kappa: f64) -> f64 {
    let dist = |i: usize, j: usize| ModelPoint::distance_unchecked(&p[i], &p[j], kappa);
    [
        (dist(0, 1), d.d12),
        (dist(1, 2), d.d23),
        (dist(2, 3), d.d34),
        (dist(3, 0), d.d14),
        (dist(0, 2), d.d13),
    ]
    .into_iter()
    .map(|(m, x)| (m - x).abs())
    .fold(0.0, f64::max)
}
