//! Cross-ratio triples, Möbius equivalence, the Ptolemy inequality and
//! metric involution.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::metric::{validate, Dist, ExtendedMetricSpace, ValidationReport};
use crate::scan::{normalized_excess, scan_max, Certificate, Pairing};
use crate::{Error, Result};

/// Componentwise tolerance for [`moebius_equivalent`].
pub const EQUIVALENCE_TOL: f64 = 1e-9;
/// Relative tolerance for [`homothety_ratio`].
pub const HOMOTHETY_TOL: f64 = 1e-9;
/// Slack used by [`in_delta`].
pub const DELTA_SLACK: f64 = 1e-12;

/// Projective triple `(d(x,y)d(z,w) : d(x,z)d(y,w) : d(x,w)d(y,z))`,
/// stored normalized so the largest entry is 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossRatioTriple(pub [f64; 3]);

impl CrossRatioTriple {
    /// Normalize a raw triple; an all-zero triple (only produced by
    /// degenerate matrices) is kept as is.
    pub fn normalized(raw: [f64; 3]) -> Self {
        let m = raw[0].max(raw[1]).max(raw[2]);
        if m > 0.0 {
            CrossRatioTriple(raw.map(|v| v / m))
        } else {
            CrossRatioTriple(raw)
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (0..3).map(|i| (self.0[i] - other.0[i]).abs()).fold(0.0, f64::max)
    }
}

/// Crt entry slot for each pairing: `12|34` is first, `13|24` second, `14|23` third.
fn crt_slot(p: Pairing) -> usize {
    match p {
        Pairing::Adjacent => 0,
        Pairing::Diagonals => 1,
        Pairing::Crossed => 2,
    }
}

/// Position pairs of each crt slot.
const SLOT_PAIRS: [[(usize, usize); 2]; 3] = [[(0, 1), (2, 3)], [(0, 2), (1, 3)], [(0, 3), (1, 2)]];

/// No point occurs three or four times.
pub fn admissible(quad: [usize; 4]) -> bool {
    quad.iter().all(|x| quad.iter().filter(|y| *y == x).count() < 3)
}

/// Unnormalized crt entries with the infinity rules applied.
fn crt_raw(space: &ExtendedMetricSpace, q: [usize; 4]) -> [f64; 3] {
    let omega_pos: Vec<usize> = match space.omega() {
        Some(w) => (0..4).filter(|&p| q[p] == w).collect(),
        None => Vec::new(),
    };
    match omega_pos.as_slice() {
        [] => SLOT_PAIRS.map(|[(a, b), (c, d)]| space.d(q[a], q[b]) * space.d(q[c], q[d])),
        // Each product has exactly one infinite factor; cancel it.
        [p] => SLOT_PAIRS.map(|pairs| {
            let (a, b) = if pairs[0].0 == *p || pairs[0].1 == *p { pairs[1] } else { pairs[0] };
            space.d(q[a], q[b])
        }),
        // The slot pairing the two infinite positions is the zero one.
        [p, r] => SLOT_PAIRS.map(|pairs| {
            let joins = pairs.iter().any(|&(a, b)| (a, b) == (*p, *r) || (a, b) == (*r, *p));
            if joins {
                0.0
            } else {
                1.0
            }
        }),
        _ => unreachable!("admissible quadruples hold omega at most twice"),
    }
}

/// Cross-ratio triple of an admissible quadruple.
pub fn crt(space: &ExtendedMetricSpace, quad: [usize; 4]) -> Result<CrossRatioTriple> {
    for &i in &quad {
        space.check_index(i)?;
    }
    if !admissible(quad) {
        return Err(Error::Inadmissible(quad));
    }
    Ok(CrossRatioTriple::normalized(crt_raw(space, quad)))
}

/// Each entry is at most the sum of the other two (the Ptolemy set `Δ`).
pub fn in_delta(t: &CrossRatioTriple) -> bool {
    let [a, b, c] = t.0;
    let slack = DELTA_SLACK * (a + b + c);
    a <= b + c + slack && b <= a + c + slack && c <= a + b + slack
}

/// Normalized Ptolemy residual of `pairing` on the quadruple: the pairing's
/// product minus the other two, divided by the pairing's product.
pub fn ptolemy_residual(space: &ExtendedMetricSpace, quad: [usize; 4], pairing: Pairing) -> f64 {
    let raw = crt_raw(space, quad);
    let [o1, o2] = pairing.others();
    normalized_excess(raw[crt_slot(pairing)], raw[crt_slot(o1)], raw[crt_slot(o2)])
}

/// Largest normalized Ptolemy residual over all 4-subsets and pairings.
///
/// Quadruples containing `ω` are evaluated through the infinity rules of
/// [`crt`]. Quadruples with a repeated point are not scanned: their crt is
/// a permutation of `(0:1:1)` or `(t:0:t)`, which never violates the
/// inequality strictly. The space is Ptolemy iff the defect is `<= 0`.
pub fn ptolemy_defect(space: &ExtendedMetricSpace) -> Result<Certificate> {
    if space.n() < 4 {
        return Err(Error::TooFewPoints { need: 4, have: space.n() });
    }
    let points: Vec<usize> = (0..space.n()).collect();
    let scan = scan_max(&points, |q| Pairing::ALL.map(|p| ptolemy_residual(space, q, p)));
    Ok(Certificate::from_best(scan.best, scan.scanned, scan.elapsed, 0.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Equivalence {
    pub equivalent: bool,
    pub max_discrepancy: f64,
    /// Admissible quadruple (ascending) attaining the discrepancy.
    pub witness: Option<[usize; 4]>,
}

/// Compare crt of two metrics on the same point set over every admissible
/// quadruple.
///
/// A permutation of a quadruple permutes both triples the same way, so
/// ascending index multisets cover all admissible quadruples.
pub fn moebius_equivalent(a: &ExtendedMetricSpace, b: &ExtendedMetricSpace) -> Result<Equivalence> {
    let n = a.n();
    if b.n() != n {
        return Err(Error::SizeMismatch(n, b.n()));
    }
    let worst = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut local: Option<(f64, [usize; 4])> = None;
            for j in i..n {
                for k in j..n {
                    for l in k..n {
                        let q = [i, j, k, l];
                        if !admissible(q) {
                            continue;
                        }
                        let ta = CrossRatioTriple::normalized(crt_raw(a, q));
                        let tb = CrossRatioTriple::normalized(crt_raw(b, q));
                        let gap = ta.max_abs_diff(&tb);
                        let gap = if gap.is_nan() { f64::INFINITY } else { gap };
                        if local.is_none_or(|(g, _)| gap > g) {
                            local = Some((gap, q));
                        }
                    }
                }
            }
            local
        })
        .reduce(
            || None,
            |x, y| match (x, y) {
                (Some(x), Some(y)) => Some(if y.0 > x.0 || (y.0 == x.0 && y.1 < x.1) { y } else { x }),
                (x, None) => x,
                (None, y) => y,
            },
        );
    let (max_discrepancy, witness) = match worst {
        Some((g, q)) => (g, Some(q)),
        None => (0.0, None),
    };
    Ok(Equivalence { equivalent: max_discrepancy <= EQUIVALENCE_TOL, max_discrepancy, witness })
}

/// Output of [`involute`]: the involuted space and its validation report.
#[derive(Debug, Clone, PartialEq)]
pub struct Involution {
    pub space: ExtendedMetricSpace,
    pub report: ValidationReport,
}

/// Metric involution at `omega_index`:
/// `d_ω(z,z') = d(z,z') / (d(ω,z) d(ω,z'))`, with `ω` sent to infinity.
///
/// If the input already has a point at infinity `v ≠ ω`, the limiting rule
/// `d_ω(v,z) = 1 / d(ω,z)` applies; involution at the existing `v` returns
/// the space unchanged. The result is an extended metric exactly when the
/// input is Ptolemy; the attached report says which.
pub fn involute(space: &ExtendedMetricSpace, omega_index: usize) -> Result<Involution> {
    space.check_index(omega_index)?;
    let old = space.omega();
    if old == Some(omega_index) {
        return Ok(Involution { space: space.clone(), report: validate(space) });
    }
    let n = space.n();
    for z in 0..n {
        if z != omega_index && space.get(omega_index, z) == Dist::ZERO {
            return Err(Error::ZeroDistanceToOmega { omega: omega_index, point: z });
        }
    }
    let rows = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Dist::ZERO
                    } else if i == omega_index || j == omega_index {
                        Dist::Infinite
                    } else if Some(i) == old {
                        Dist::Finite(1.0 / space.d(omega_index, j))
                    } else if Some(j) == old {
                        Dist::Finite(1.0 / space.d(omega_index, i))
                    } else {
                        Dist::Finite(space.d(i, j) / (space.d(omega_index, i) * space.d(omega_index, j)))
                    }
                })
                .collect()
        })
        .collect();
    let out = ExtendedMetricSpace::new(space.labels().to_vec(), rows, Some(omega_index))?;
    let report = validate(&out);
    Ok(Involution { space: out, report })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Homothety {
    /// `d' = λ d` on every finite pair.
    Ratio { lambda: f64 },
    /// The pair whose ratio strays furthest from the median ratio.
    Mismatch { pair: (usize, usize), ratio: f64, reference: f64 },
}

/// Find `λ` with `b = λ a`, for two extended metrics sharing their point at
/// infinity.
pub fn homothety_ratio(a: &ExtendedMetricSpace, b: &ExtendedMetricSpace) -> Result<Homothety> {
    if a.n() != b.n() {
        return Err(Error::SizeMismatch(a.n(), b.n()));
    }
    if a.omega() != b.omega() {
        return Err(Error::OmegaMismatch(a.omega(), b.omega()));
    }
    let idx = a.finite_indices();
    let mut ratios = Vec::new();
    for (s, &i) in idx.iter().enumerate() {
        for &j in &idx[s + 1..] {
            let r = b.d(i, j) / a.d(i, j);
            ratios.push(((i, j), if r.is_finite() && r > 0.0 { r } else { f64::NAN }));
        }
    }
    if ratios.is_empty() {
        return Ok(Homothety::Ratio { lambda: 1.0 });
    }
    let mut sorted: Vec<f64> = ratios.iter().map(|r| r.1).filter(|r| !r.is_nan()).collect();
    sorted.sort_by(f64::total_cmp);
    let Some(&reference) = sorted.get(sorted.len().saturating_sub(1) / 2) else {
        let (pair, ratio) = ratios[0];
        return Ok(Homothety::Mismatch { pair, ratio, reference: f64::NAN });
    };
    let mut worst = (0.0f64, ratios[0]);
    for &(pair, r) in &ratios {
        let dev = if r.is_nan() { f64::INFINITY } else { (r / reference - 1.0).abs() };
        if dev > worst.0 {
            worst = (dev, (pair, r));
        }
    }
    if worst.0 <= HOMOTHETY_TOL {
        Ok(Homothety::Ratio { lambda: reference })
    } else {
        let (pair, ratio) = worst.1;
        Ok(Homothety::Mismatch { pair, ratio, reference })
    }
}
