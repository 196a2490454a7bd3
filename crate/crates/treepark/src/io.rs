//! File formats: tree and arrival dumps, flux summaries, theory reports and
//! sweep tables.
//!
//! Reals are written in the shortest form that parses back to the same
//! `f64`, so every emitted value round-trips bit for bit. Non-finite reals
//! are written as the strings `inf`, `-inf` and `NaN` in both CSV and JSON.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use treepark_core::analytics::{critical_quantities, spine_stats, AnalyticsError};
use treepark_core::tree::Node;
use treepark_core::{Arrivals, BinaryTree, FluxResult, NodeId};

/// Errors reading or writing files.
#[derive(Debug, Error)]
pub enum FormatError {
    /// Underlying IO failure.
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    /// CSV syntax or field error.
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    /// JSON syntax or field error.
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    /// Well-formed file with inconsistent content.
    #[error("invalid content: {0}")]
    Invalid(String),
}

/// Output format selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    /// Comma-separated with a header row.
    Csv,
    /// A JSON array of objects.
    Json,
}

mod real {
    use serde::{Deserialize, Deserializer, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    pub(super) enum Repr {
        Num(f64),
        Text(String),
    }

    pub(super) fn from_repr<E: serde::de::Error>(r: Repr) -> Result<f64, E> {
        match r {
            Repr::Num(x) => Ok(x),
            Repr::Text(s) => s.trim().parse().map_err(|_| E::custom(format!("not a real: {s:?}"))),
        }
    }

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else {
            s.serialize_str(&x.to_string())
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        from_repr(Repr::deserialize(d)?)
    }
}

mod real_opt {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(v) => super::real::serialize(v, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        Option::<super::real::Repr>::deserialize(d)?.map(super::real::from_repr).transpose()
    }
}

// ---------------------------------------------------------------------------
// Trees and arrivals.

#[derive(Serialize, Deserialize)]
struct TreeRow {
    index: usize,
    parent: i64,
    left: i64,
    right: i64,
}

fn link(id: Option<NodeId>) -> i64 {
    id.map_or(-1, |v| v.index() as i64)
}

fn unlink(raw: i64, n: usize) -> Result<Option<NodeId>, FormatError> {
    match raw {
        -1 => Ok(None),
        v if v >= 0 && (v as usize) < n => Ok(Some(NodeId::new(v as usize))),
        v => Err(FormatError::Invalid(format!("link {v} outside 0..{n}"))),
    }
}

/// Writes `index,parent,left,right`, one row per node; missing links are -1.
pub fn write_tree_csv<W: Write>(tree: &BinaryTree, out: W) -> Result<(), FormatError> {
    let mut w = csv::Writer::from_writer(out);
    for (i, node) in tree.nodes().iter().enumerate() {
        w.serialize(TreeRow { index: i, parent: link(node.parent()), left: link(node.left()), right: link(node.right()) })?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a tree written by [`write_tree_csv`] and checks its structure.
pub fn read_tree_csv<R: Read>(input: R) -> Result<BinaryTree, FormatError> {
    let rows: Vec<TreeRow> = csv::Reader::from_reader(input).deserialize().collect::<Result<_, _>>()?;
    let n = rows.len();
    let mut nodes = Vec::with_capacity(n);
    let mut root = None;
    for (i, row) in rows.iter().enumerate() {
        if row.index != i {
            return Err(FormatError::Invalid(format!("row {i} has index {}", row.index)));
        }
        let parent = unlink(row.parent, n)?;
        if parent.is_none() {
            if root.is_some() {
                return Err(FormatError::Invalid("more than one root".into()));
            }
            root = Some(NodeId::new(i));
        }
        nodes.push(Node::new(parent, unlink(row.left, n)?, unlink(row.right, n)?));
    }
    let root = root.ok_or_else(|| FormatError::Invalid("no root".into()))?;
    BinaryTree::from_links(nodes, root).map_err(|e| FormatError::Invalid(e.to_string()))
}

#[derive(Serialize, Deserialize)]
struct ArrivalRow {
    node_index: usize,
    count: u64,
}

/// Writes `node_index,count`, one row per node.
pub fn write_arrivals_csv<W: Write>(arrivals: &Arrivals, out: W) -> Result<(), FormatError> {
    let mut w = csv::Writer::from_writer(out);
    for (i, &count) in arrivals.counts().iter().enumerate() {
        w.serialize(ArrivalRow { node_index: i, count })?;
    }
    w.flush()?;
    Ok(())
}

/// Reads arrivals written by [`write_arrivals_csv`].
pub fn read_arrivals_csv<R: Read>(input: R) -> Result<Arrivals, FormatError> {
    let mut counts = Vec::new();
    for (i, row) in csv::Reader::from_reader(input).deserialize::<ArrivalRow>().enumerate() {
        let row = row?;
        if row.node_index != i {
            return Err(FormatError::Invalid(format!("row {i} has node_index {}", row.node_index)));
        }
        counts.push(row.count);
    }
    Ok(Arrivals::new(counts))
}

/// JSON summary of a parking run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FluxSummary {
    /// Cars reaching the root.
    pub root_visits: u64,
    /// Cars leaving through the root.
    pub flux: u64,
    /// Cars parked.
    pub parked: u64,
    /// Cars that left.
    pub exited: u64,
}

impl From<&FluxResult> for FluxSummary {
    fn from(r: &FluxResult) -> Self {
        FluxSummary { root_visits: r.root_visits, flux: r.flux, parked: r.parked, exited: r.exited }
    }
}

// ---------------------------------------------------------------------------
// Tables.

/// One row of the theory report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct TheoryRow {
    /// Intensity.
    #[serde(with = "real")]
    pub alpha: f64,
    /// `subcritical` or `supercritical`.
    pub regime: String,
    /// Flux criterion.
    #[serde(with = "real")]
    pub phi: f64,
    /// `P(X = 0)`.
    #[serde(with = "real")]
    pub p: f64,
    /// Branch switch point, supercritical only.
    #[serde(with = "real_opt")]
    pub s_p: Option<f64>,
    /// Upper bound on `p`, supercritical only.
    #[serde(with = "real_opt")]
    pub c_alpha: Option<f64>,
    /// `E[X]`.
    #[serde(with = "real")]
    pub mean_X: f64,
    /// `E[Y]`.
    #[serde(with = "real")]
    pub mean_Y: f64,
    /// `P(Y = 0)`.
    #[serde(with = "real")]
    pub p_Y_zero: f64,
    /// `P(X <= 1)`.
    #[serde(with = "real")]
    pub rho: f64,
    /// Limiting probability that all cars park.
    #[serde(with = "real")]
    pub prob_all_park: f64,
}

impl TheoryRow {
    /// Evaluates every closed form at `alpha`.
    pub fn at(alpha: f64) -> Result<Self, AnalyticsError> {
        let q = critical_quantities(alpha)?;
        let s = spine_stats(alpha)?;
        Ok(TheoryRow {
            alpha,
            regime: q.regime.as_str().to_string(),
            phi: q.phi,
            p: q.p,
            s_p: q.s_p,
            c_alpha: q.c_alpha,
            mean_X: q.mean_x,
            mean_Y: s.mean_y,
            p_Y_zero: s.p_y_zero,
            rho: s.rho,
            prob_all_park: s.prob_all_park,
        })
    }
}

/// One row of a simulation table.
///
/// For spine runs `n` holds the walk depth.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    /// Intensity.
    #[serde(with = "real")]
    pub alpha: f64,
    /// Tree size, or walk depth for spine rows.
    pub n: u64,
    /// Completed trials.
    pub trials: u64,
    /// Estimated probability.
    #[serde(with = "real")]
    pub estimate: f64,
    /// Its standard error.
    #[serde(with = "real")]
    pub stderr: f64,
    /// Closed-form limit.
    #[serde(with = "real")]
    pub theory: f64,
    /// `|estimate - theory|`.
    #[serde(with = "real")]
    pub abs_err: f64,
    /// Trials discarded at a cap.
    pub truncated_trials: u64,
}

/// Header of the sweep CSV.
pub const SWEEP_HEADER: &str = "alpha,n,trials,estimate,stderr,theory,abs_err,truncated_trials";

/// Writes rows as CSV with a header, or as a JSON array.
pub fn write_rows<T: Serialize, W: Write>(rows: &[T], format: Format, mut out: W) -> Result<(), FormatError> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, rows)?;
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}

/// Reads rows written by [`write_rows`].
pub fn read_rows<T: for<'de> Deserialize<'de>, R: Read>(input: R, format: Format) -> Result<Vec<T>, FormatError> {
    match format {
        Format::Csv => Ok(csv::Reader::from_reader(input).deserialize().collect::<Result<_, _>>()?),
        Format::Json => Ok(serde_json::from_reader(input)?),
    }
}
