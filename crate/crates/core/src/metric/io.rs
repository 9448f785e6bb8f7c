//! CSV distance matrices, JSON space descriptors and generator spec strings.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use super::{default_labels, parse_dist_token, Dist, ExtendedMetricSpace, Generator};
use crate::{Error, Result};

/// JSON form of a space: an explicit matrix or a generator call.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpaceDescriptor {
    Generated {
        generator: Generator,
    },
    Explicit {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        labels: Option<Vec<String>>,
        matrix: Vec<Vec<Dist>>,
        #[serde(default)]
        omega: Option<usize>,
    },
}

impl SpaceDescriptor {
    pub fn from_space(space: &ExtendedMetricSpace) -> Self {
        SpaceDescriptor::Explicit {
            labels: Some(space.labels().to_vec()),
            matrix: space.rows(),
            omega: space.omega(),
        }
    }

    pub fn build(&self) -> Result<ExtendedMetricSpace> {
        match self {
            SpaceDescriptor::Generated { generator } => generator.build(),
            SpaceDescriptor::Explicit { labels, matrix, omega } => {
                let labels = labels.clone().unwrap_or_else(|| default_labels(matrix.len()));
                ExtendedMetricSpace::new(labels, matrix.clone(), *omega)
            }
        }
    }
}

pub fn read_json(reader: impl Read) -> Result<ExtendedMetricSpace> {
    let desc: SpaceDescriptor = serde_json::from_reader(reader)?;
    desc.build()
}

/// Read a CSV distance matrix. A first line is taken as labels if it does not
/// parse as distances, or if it is one row more than the matrix is wide. A point whose off-diagonal entries are all
/// `inf` becomes the point at infinity.
pub fn read_csv(reader: impl Read) -> Result<ExtendedMetricSpace> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let mut records = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        records.push(rec.iter().map(str::to_owned).collect::<Vec<_>>());
    }
    let mut labels = None;
    if let Some(first) = records.first() {
        let extra_row = records.len() == first.len() + 1;
        if extra_row || first.iter().any(|t| parse_dist_token(t).is_err()) {
            labels = Some(records.remove(0));
        }
    }
    let rows = records
        .iter()
        .map(|r| r.iter().map(|t| parse_dist_token(t)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let n = rows.len();
    let omega = infer_omega(&rows);
    let labels = labels.unwrap_or_else(|| default_labels(n));
    ExtendedMetricSpace::new(labels, rows, omega)
}

/// The unique point whose off-diagonal entries are all infinite, if any.
pub fn infer_omega(rows: &[Vec<Dist>]) -> Option<usize> {
    if rows.len() < 2 {
        return None;
    }
    let mut found = rows.iter().enumerate().filter(|(i, r)| {
        r.iter().enumerate().all(|(j, d)| j == *i || d.is_infinite())
    });
    match (found.next(), found.next()) {
        (Some((i, _)), None) => Some(i),
        _ => None,
    }
}

/// Write the matrix as CSV with a label header line.
pub fn write_csv(space: &ExtendedMetricSpace, writer: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(space.labels())?;
    for row in space.rows() {
        w.write_record(row.iter().map(|d| d.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Parse `kind:key=value,key=value`, e.g. `strip:a=1,t=10` or
/// `euclidean:dim=2,n=20,seed=7`. Graph edges are written
/// `graph:n=4,edges=0-1;1-2;2-3;3-0` with optional `@weight` suffixes.
pub fn parse_generator_spec(spec: &str) -> Result<Generator> {
    let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let kind = kind.trim();
    let mut params = Map::new();
    let mut seed = 0u64;
    for pair in rest.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value in generator spec, got {pair:?}")))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "seed" => {
                seed = value.parse().map_err(|_| Error::Parse(format!("bad seed {value:?}")))?;
            }
            "edges" => {
                let (edges, weights) = parse_edges(value)?;
                params.insert("edges".into(), json!(edges));
                if let Some(w) = weights {
                    params.insert("weights".into(), json!(w));
                }
            }
            _ => {
                params.insert(key.into(), parse_number(value)?);
            }
        }
    }
    if kind == "graph" && !params.contains_key("n") {
        let n = params
            .get("edges")
            .and_then(Value::as_array)
            .map(|es| {
                es.iter()
                    .flat_map(|e| e.as_array().into_iter().flatten())
                    .filter_map(Value::as_u64)
                    .max()
                    .map_or(0, |m| m + 1)
            })
            .unwrap_or(0);
        params.insert("n".into(), json!(n));
    }
    let value = json!({ "kind": kind, "params": params, "seed": seed });
    serde_json::from_value(value).map_err(|e| Error::Parse(format!("generator {spec:?}: {e}")))
}

fn parse_number(value: &str) -> Result<Value> {
    if let Ok(u) = value.parse::<u64>() {
        return Ok(json!(u));
    }
    value
        .parse::<f64>()
        .map(|f| json!(f))
        .map_err(|_| Error::Parse(format!("expected a number, got {value:?}")))
}

type EdgeList = (Vec<(usize, usize)>, Option<Vec<f64>>);

fn parse_edges(value: &str) -> Result<EdgeList> {
    let mut edges = Vec::new();
    let mut weights = Vec::new();
    let bad = || Error::Parse(format!("bad edge list {value:?}"));
    for e in value.split(';').map(str::trim).filter(|e| !e.is_empty()) {
        let (ends, w) = match e.split_once('@') {
            Some((ends, w)) => (ends, Some(w.parse::<f64>().map_err(|_| bad())?)),
            None => (e, None),
        };
        let (u, v) = ends.split_once('-').ok_or_else(bad)?;
        edges.push((u.trim().parse().map_err(|_| bad())?, v.trim().parse().map_err(|_| bad())?));
        weights.push(w);
    }
    let weights = if weights.iter().any(Option::is_some) {
        Some(weights.into_iter().map(|w| w.unwrap_or(1.0)).collect())
    } else {
        None
    };
    Ok((edges, weights))
}
