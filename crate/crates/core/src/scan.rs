//! Exhaustive scans over 4-subsets with a partition-independent reduction.
//!
//! A scan evaluates `K` residuals per 4-subset `a < b < c < d` and keeps the
//! largest one. Ties are broken by the smallest index tuple, then the
//! smallest choice index, so the winner does not depend on how rayon splits
//! the work or on the worker count.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::Error;

/// How a quadruple `(x1, x2, x3, x4)` is split into two pairs.
///
/// The first pair of a label is the one placed on the larger side of the
/// inequality. Declaration order is the witness tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pairing {
    /// `13|24`
    Diagonals,
    /// `12|34`
    Adjacent,
    /// `14|23`
    Crossed,
}

impl Pairing {
    pub const ALL: [Pairing; 3] = [Pairing::Diagonals, Pairing::Adjacent, Pairing::Crossed];

    pub fn label(self) -> &'static str {
        match self {
            Pairing::Diagonals => "13|24",
            Pairing::Adjacent => "12|34",
            Pairing::Crossed => "14|23",
        }
    }

    /// The two index pairs of `q` joined by this pairing.
    pub fn pairs(self, q: [usize; 4]) -> [(usize, usize); 2] {
        let [a, b, c, d] = q;
        match self {
            Pairing::Diagonals => [(a, c), (b, d)],
            Pairing::Adjacent => [(a, b), (c, d)],
            Pairing::Crossed => [(a, d), (b, c)],
        }
    }

    /// The other two pairings, in tie-break order.
    pub fn others(self) -> [Pairing; 2] {
        match self {
            Pairing::Diagonals => [Pairing::Adjacent, Pairing::Crossed],
            Pairing::Adjacent => [Pairing::Diagonals, Pairing::Crossed],
            Pairing::Crossed => [Pairing::Diagonals, Pairing::Adjacent],
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Pairing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Pairing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Pairing::ALL
            .into_iter()
            .find(|p| p.label() == s)
            .ok_or_else(|| Error::Parse(format!("unknown pairing {s:?}")))
    }
}

impl Serialize for Pairing {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

impl<'de> Deserialize<'de> for Pairing {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Result of a defect scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub defect: f64,
    /// Indices into the scanned space, ascending. `None` when nothing was scanned.
    pub witness: Option<[usize; 4]>,
    pub pairing: Option<Pairing>,
    pub scanned: u64,
    pub elapsed_s: f64,
}

impl Certificate {
    pub(crate) fn from_best(best: Option<Best>, scanned: u64, elapsed: Duration, empty: f64) -> Self {
        match best {
            Some(b) => Certificate {
                defect: b.value,
                witness: Some(b.quad),
                pairing: Some(Pairing::ALL[b.choice]),
                scanned,
                elapsed_s: elapsed.as_secs_f64(),
            },
            None => Certificate {
                defect: empty,
                witness: None,
                pairing: None,
                scanned,
                elapsed_s: elapsed.as_secs_f64(),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Best {
    pub value: f64,
    pub quad: [usize; 4],
    pub choice: usize,
}

impl Best {
    /// `Greater` means `self` wins.
    fn rank(&self, other: &Best) -> Ordering {
        self.value
            .total_cmp(&other.value)
            .then_with(|| other.quad.cmp(&self.quad))
            .then_with(|| other.choice.cmp(&self.choice))
    }
}

fn pick(a: Option<Best>, b: Option<Best>) -> Option<Best> {
    match (a, b) {
        (Some(x), Some(y)) => Some(if x.rank(&y) == Ordering::Less { y } else { x }),
        (x, None) => x,
        (None, y) => y,
    }
}

pub(crate) fn choose4(n: usize) -> u64 {
    if n < 4 {
        return 0;
    }
    let n = n as u64;
    n * (n - 1) * (n - 2) * (n - 3) / 24
}

/// Outcome of [`scan_max`]: the winning residual and timing.
pub(crate) struct Scan {
    pub best: Option<Best>,
    pub scanned: u64,
    pub elapsed: Duration,
}

/// Maximize `eval` over all 4-subsets of `points` (which must be ascending).
pub(crate) fn scan_max<const K: usize, F>(points: &[usize], eval: F) -> Scan
where
    F: Fn([usize; 4]) -> [f64; K] + Sync,
{
    let start = Instant::now();
    let m = points.len();
    let best = (0..m.saturating_sub(3))
        .into_par_iter()
        .map(|ia| {
            let mut local: Option<Best> = None;
            for ib in ia + 1..m {
                for ic in ib + 1..m {
                    for id in ic + 1..m {
                        let quad = [points[ia], points[ib], points[ic], points[id]];
                        let vals = eval(quad);
                        for (choice, &value) in vals.iter().enumerate() {
                            local = pick(local, Some(Best { value, quad, choice }));
                        }
                    }
                }
            }
            local
        })
        .reduce(|| None, pick);
    Scan { best, scanned: choose4(m), elapsed: start.elapsed() }
}

/// `(left - a - b) / left`: the normalized excess of one product over the
/// sum of two others. A zero left side cannot exceed anything.
#[inline]
pub(crate) fn normalized_excess(left: f64, a: f64, b: f64) -> f64 {
    if left > 0.0 {
        (left - a - b) / left
    } else if a + b > 0.0 {
        -1.0
    } else {
        0.0
    }
}
