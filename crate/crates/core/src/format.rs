// SPDX-License-Identifier: Apache-2.0

//! TOML instance files.
//!
//! ```toml
//! schema = "mrf/1"
//! id = "additive-0007"
//! order = [1, 0]
//!
//! [[vertex]]
//! labels = ["lo", "hi"]
//! potential = [0.0, -0.25]
//!
//! [[edge]]
//! members = [0, 1]
//! entries = [
//!   { labels = ["lo", "lo"], value = 0.5 },
//!   ...
//! ]
//!
//! [valuation]
//! schema = "val/1"
//! kind = "additive"
//! singletons = [[1.0, 4.0], [2.0, 3.0]]
//! ```
//!
//! Edge entries are keyed by label tuples and must cover the edge's product
//! support exactly once. Subadditive valuations carry `table` instead of
//! `singletons`, indexed as in [`SetValuation::table_index`]. Floats are
//! written in shortest round-trip form, so reading a written file restores
//! every value bit for bit.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mrf::{HyperEdge, Mrf};
use crate::space::advance;
use crate::valuation::{SetValuation, ValuationKind};

pub const MRF_SCHEMA: &str = "mrf/1";
pub const VAL_SCHEMA: &str = "val/1";

/// One stored instance: an MRF plus whatever the consumer needs on top.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub id: Option<String>,
    pub seed: Option<u64>,
    pub mrf: Mrf,
    pub valuation: Option<SetValuation>,
    /// Arrival order for online problems; vertex order when absent.
    pub order: Option<Vec<usize>>,
}

impl Instance {
    pub fn new(mrf: Mrf) -> Self {
        Self { id: None, seed: None, mrf, valuation: None, order: None }
    }

    pub fn order_or_identity(&self) -> Vec<usize> {
        self.order.clone().unwrap_or_else(|| (0..self.mrf.len()).collect())
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(&FileDto::from_instance(self)).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let dto: FileDto = toml::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        dto.into_instance()
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_toml()?).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileDto {
    schema: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    order: Option<Vec<usize>>,
    vertex: Vec<VertexDto>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    edge: Vec<EdgeDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    valuation: Option<ValuationDto>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexDto {
    labels: Vec<String>,
    potential: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeDto {
    members: Vec<usize>,
    entries: Vec<EntryDto>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryDto {
    labels: Vec<String>,
    value: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ValuationDto {
    schema: String,
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    singletons: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    table: Option<Vec<f64>>,
}

impl FileDto {
    fn from_instance(inst: &Instance) -> Self {
        let mrf = &inst.mrf;
        let vertex = mrf
            .supports()
            .iter()
            .zip(mrf.vertex_potentials())
            .map(|(labels, psi)| VertexDto { labels: labels.clone(), potential: psi.clone() })
            .collect();
        let edge = mrf
            .edges()
            .iter()
            .map(|e| {
                let radices: Vec<usize> = e.members().iter().map(|&m| mrf.radices()[m]).collect();
                let mut digits = vec![0usize; radices.len()];
                let mut entries = Vec::with_capacity(e.potential().len());
                for &value in e.potential() {
                    let labels = e.members().iter().zip(&digits).map(|(&m, &d)| mrf.supports()[m][d].clone()).collect();
                    entries.push(EntryDto { labels, value });
                    advance(&mut digits, &radices);
                }
                EdgeDto { members: e.members().to_vec(), entries }
            })
            .collect();
        let valuation = inst.valuation.as_ref().map(|g| match g.table() {
            Some(t) => ValuationDto {
                schema: VAL_SCHEMA.into(),
                kind: g.kind().as_str().into(),
                singletons: None,
                table: Some(t.to_vec()),
            },
            None => ValuationDto {
                schema: VAL_SCHEMA.into(),
                kind: g.kind().as_str().into(),
                singletons: Some(g.singletons().to_vec()),
                table: None,
            },
        });
        Self {
            schema: MRF_SCHEMA.into(),
            id: inst.id.clone(),
            seed: inst.seed,
            order: inst.order.clone(),
            vertex,
            edge,
            valuation,
        }
    }

    fn into_instance(self) -> Result<Instance> {
        if self.schema != MRF_SCHEMA {
            return Err(Error::Format(format!("unsupported schema {:?}, expected {MRF_SCHEMA:?}", self.schema)));
        }
        let (supports, potentials): (Vec<_>, Vec<_>) = self.vertex.into_iter().map(|v| (v.labels, v.potential)).unzip();
        let mut edges = Vec::with_capacity(self.edge.len());
        for (k, e) in self.edge.into_iter().enumerate() {
            if let Some(&m) = e.members.iter().find(|&&m| m >= supports.len()) {
                return Err(Error::Format(format!("edge {k} references vertex {m}")));
            }
            let radices: Vec<usize> = e.members.iter().map(|&m| supports[m].len()).collect();
            let size: usize = radices.iter().product();
            let mut table = vec![None; size];
            for entry in e.entries {
                if entry.labels.len() != e.members.len() {
                    return Err(Error::Format(format!("edge {k}: entry {:?} has the wrong arity", entry.labels)));
                }
                let mut idx = 0;
                for ((&m, label), &r) in e.members.iter().zip(&entry.labels).zip(&radices) {
                    let w = supports[m]
                        .iter()
                        .position(|l| l == label)
                        .ok_or_else(|| Error::Format(format!("edge {k}: vertex {m} has no label {label:?}")))?;
                    idx = idx * r + w;
                }
                if table[idx].replace(entry.value).is_some() {
                    return Err(Error::Format(format!("edge {k}: duplicate entry {:?}", entry.labels)));
                }
            }
            let table: Option<Vec<f64>> = table.into_iter().collect();
            let table = table.ok_or_else(|| Error::Format(format!("edge {k}: missing entries")))?;
            edges.push(HyperEdge::new(e.members, table));
        }
        let mrf = Mrf::new(supports, potentials, edges)?;
        let valuation = self.valuation.map(|v| read_valuation(v, mrf.radices())).transpose()?;
        if let Some(order) = &self.order {
            let mut seen = vec![false; mrf.len()];
            if order.len() != mrf.len()
                || order.iter().any(|&i| i >= mrf.len() || std::mem::replace(&mut seen[i], true))
            {
                return Err(Error::Format("order is not a permutation of the vertices".into()));
            }
        }
        Ok(Instance { id: self.id, seed: self.seed, mrf, valuation, order: self.order })
    }
}

fn read_valuation(v: ValuationDto, radices: &[usize]) -> Result<SetValuation> {
    if v.schema != VAL_SCHEMA {
        return Err(Error::Format(format!("unsupported valuation schema {:?}, expected {VAL_SCHEMA:?}", v.schema)));
    }
    let kind =
        ValuationKind::parse(&v.kind).ok_or_else(|| Error::Format(format!("unknown valuation kind {:?}", v.kind)))?;
    let g = match (kind, v.singletons, v.table) {
        (ValuationKind::SubadditiveTable, singletons, Some(table)) => {
            let g = SetValuation::subadditive_table(radices, table)?;
            if singletons.is_some_and(|s| s != g.singletons()) {
                return Err(Error::Format("singletons disagree with the table".into()));
            }
            g
        }
        (ValuationKind::SubadditiveTable, _, None) => {
            return Err(Error::Format("subadditive valuation needs a table".into()))
        }
        (_, _, Some(_)) => return Err(Error::Format(format!("{} valuation takes no table", v.kind))),
        (_, None, None) => return Err(Error::Format("valuation needs singletons".into())),
        (ValuationKind::Additive, Some(s), None) => SetValuation::additive(s)?,
        (ValuationKind::UnitDemand, Some(s), None) => SetValuation::unit_demand(s)?,
    };
    if g.radices() != radices {
        return Err(Error::Format(format!("valuation radices {:?} differ from supports {radices:?}", g.radices())));
    }
    Ok(g)
}
