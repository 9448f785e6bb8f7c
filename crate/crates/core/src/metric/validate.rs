use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Dist, ExtendedMetricSpace};

/// Relative slack for the triangle inequality: `d(i,k)` may exceed
/// `d(i,j) + d(j,k)` by `TRIANGLE_SLACK * (d(i,j) + d(j,k))`.
pub const TRIANGLE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Diagonal,
    Symmetry,
    Positivity,
    OmegaRule,
    Triangle,
}

/// One failed axiom.
///
/// Witness layouts: `Diagonal` is `[i]`; `Symmetry`, `Positivity` and
/// `OmegaRule` are `[i, j]` with `i < j`; `Triangle` is `[i, k, j]` with
/// `i < k`, meaning `d(i,k) > d(i,j) + d(j,k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub witness: Vec<usize>,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    fn from_violations(mut violations: Vec<Violation>) -> Self {
        violations.sort_by(|a, b| a.witness.cmp(&b.witness).then(a.kind.cmp(&b.kind)));
        ValidationReport { ok: violations.is_empty(), violations }
    }

    pub fn count(&self, kind: ViolationKind) -> usize {
        self.violations.iter().filter(|v| v.kind == kind).count()
    }
}

/// Check every metric axiom of an extended metric space.
pub fn validate(space: &ExtendedMetricSpace) -> ValidationReport {
    let n = space.n();
    let omega = space.omega();
    let mut out = Vec::new();

    for i in 0..n {
        if space.get(i, i) != Dist::ZERO {
            let magnitude = match space.get(i, i) {
                Dist::Finite(v) => v.abs(),
                Dist::Infinite => f64::INFINITY,
            };
            out.push(Violation { kind: ViolationKind::Diagonal, witness: vec![i], magnitude });
        }
    }

    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (space.get(i, j), space.get(j, i));
            let asym = match (a, b) {
                (Dist::Finite(x), Dist::Finite(y)) => {
                    let gap = (x - y).abs();
                    (gap > 1e-12 * (x.abs() + y.abs()) || gap.is_nan()).then_some(gap)
                }
                (Dist::Infinite, Dist::Infinite) => None,
                _ => Some(f64::INFINITY),
            };
            if let Some(magnitude) = asym {
                out.push(Violation { kind: ViolationKind::Symmetry, witness: vec![i, j], magnitude });
            }

            let touches_omega = omega == Some(i) || omega == Some(j);
            for d in [a, b] {
                match d {
                    Dist::Finite(v) if touches_omega => {
                        out.push(Violation {
                            kind: ViolationKind::OmegaRule,
                            witness: vec![i, j],
                            magnitude: v,
                        });
                        break;
                    }
                    Dist::Infinite if !touches_omega => {
                        out.push(Violation {
                            kind: ViolationKind::OmegaRule,
                            witness: vec![i, j],
                            magnitude: f64::INFINITY,
                        });
                        break;
                    }
                    Dist::Finite(v) if !(v > 0.0) => {
                        out.push(Violation {
                            kind: ViolationKind::Positivity,
                            witness: vec![i, j],
                            magnitude: v.abs(),
                        });
                        break;
                    }
                    _ => {}
                }
            }
        }
    }

    let idx = space.finite_indices();
    let triangles: Vec<Violation> = idx
        .par_iter()
        .enumerate()
        .flat_map_iter(|(a, &i)| {
            let mut local = Vec::new();
            for &k in &idx[a + 1..] {
                let Dist::Finite(dik) = space.get(i, k) else { continue };
                for &j in &idx {
                    if j == i || j == k {
                        continue;
                    }
                    let (Dist::Finite(dij), Dist::Finite(djk)) = (space.get(i, j), space.get(j, k))
                    else {
                        continue;
                    };
                    let sides = dij + djk;
                    let excess = dik - sides;
                    if excess > TRIANGLE_SLACK * sides {
                        local.push(Violation {
                            kind: ViolationKind::Triangle,
                            witness: vec![i, k, j],
                            magnitude: excess,
                        });
                    }
                }
            }
            local
        })
        .collect();
    out.extend(triangles);

    ValidationReport::from_violations(out)
}
