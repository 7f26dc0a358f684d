//! Persisted catalogs of equivalence classes.
//!
//! A catalog file is JSONL: a header line
//! `{"format":"upb-catalog","version":1,"p":4,"s":8}` followed by one line per
//! class, `{"key":"...","graph":{...},"multiplicity":3}`, sorted by key. An
//! optional `"provenance"` array lists where the class came from.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::canon::{CanonicalKey, DedupeClass};
use crate::graph::OrthogonalityGraph;
use crate::notation::{graph_from_value, graph_to_value, DecodeError};

pub const FORMAT: &str = "upb-catalog";
pub const VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: bad graph record: {source}")]
    Graph { line: usize, source: DecodeError },
    #[error("unsupported catalog version {found} (expected {VERSION})")]
    VersionMismatch { found: u32 },
    #[error("mixed dimensions: (p={p1}, s={s1}) vs (p={p2}, s={s2})")]
    MixedDimensions {
        p1: usize,
        s1: usize,
        p2: usize,
        s2: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogEntry {
    pub key: CanonicalKey,
    pub graph: OrthogonalityGraph,
    pub multiplicity: usize,
    pub provenance: BTreeSet<String>,
}

impl CatalogEntry {
    pub fn from_class(class: DedupeClass, provenance: impl IntoIterator<Item = String>) -> Self {
        CatalogEntry {
            key: class.key,
            graph: class.representative,
            multiplicity: class.multiplicity,
            provenance: provenance.into_iter().collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Catalog {
    pub p: usize,
    pub s: usize,
    /// Sorted by key, keys distinct.
    pub entries: Vec<CatalogEntry>,
}

#[derive(Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
    p: usize,
    s: usize,
}

#[derive(Serialize, Deserialize)]
struct Line {
    key: String,
    graph: Value,
    multiplicity: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    provenance: Vec<String>,
}

impl Catalog {
    pub fn new(p: usize, s: usize, entries: impl IntoIterator<Item = CatalogEntry>) -> Self {
        let mut map: BTreeMap<CanonicalKey, CatalogEntry> = BTreeMap::new();
        for e in entries {
            insert_merged(&mut map, e);
        }
        Catalog {
            p,
            s,
            entries: map.into_values().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn header_line(&self) -> String {
        serde_json::to_string(&Header {
            format: FORMAT.to_string(),
            version: VERSION,
            p: self.p,
            s: self.s,
        })
        .expect("header serializes")
    }

    pub fn write_to(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "{}", self.header_line())?;
        for e in &self.entries {
            writeln!(w, "{}", entry_line(e))?;
        }
        Ok(())
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("JSON is UTF-8")
    }

    pub fn read_from(r: impl BufRead) -> Result<Self, CatalogError> {
        let mut lines = r.lines().enumerate();
        let header = loop {
            match lines.next() {
                None => {
                    return Err(CatalogError::Malformed {
                        line: 1,
                        message: "missing header".into(),
                    })
                }
                Some((i, l)) => {
                    let l = l?;
                    if l.trim().is_empty() {
                        continue;
                    }
                    let h: Header = serde_json::from_str(&l).map_err(|e| CatalogError::Malformed {
                        line: i + 1,
                        message: format!("bad header: {e}"),
                    })?;
                    if h.format != FORMAT {
                        return Err(CatalogError::Malformed {
                            line: i + 1,
                            message: format!("unknown format {:?}", h.format),
                        });
                    }
                    if h.version != VERSION {
                        return Err(CatalogError::VersionMismatch { found: h.version });
                    }
                    break h;
                }
            }
        };
        let mut entries = Vec::new();
        for (i, l) in lines {
            let l = l?;
            if l.trim().is_empty() {
                continue;
            }
            let line: Line = serde_json::from_str(&l).map_err(|e| CatalogError::Malformed {
                line: i + 1,
                message: e.to_string(),
            })?;
            let graph = graph_from_value(line.graph)
                .map_err(|source| CatalogError::Graph { line: i + 1, source })?;
            if graph.p() != header.p || graph.s() != header.s {
                return Err(CatalogError::MixedDimensions {
                    p1: header.p,
                    s1: header.s,
                    p2: graph.p(),
                    s2: graph.s(),
                });
            }
            entries.push(CatalogEntry {
                key: CanonicalKey::from_string(line.key),
                graph,
                multiplicity: line.multiplicity,
                provenance: line.provenance.into_iter().collect(),
            });
        }
        Ok(Catalog::new(header.p, header.s, entries))
    }

    pub fn from_jsonl(text: &str) -> Result<Self, CatalogError> {
        Self::read_from(text.as_bytes())
    }
}

pub fn entry_line(e: &CatalogEntry) -> String {
    serde_json::to_string(&Line {
        key: e.key.as_str().to_string(),
        graph: graph_to_value(&e.graph),
        multiplicity: e.multiplicity,
        provenance: e.provenance.iter().cloned().collect(),
    })
    .expect("catalog lines serialize")
}

/// Keeps the first representative; multiplicity is the larger of the two so
/// merging a catalog with itself changes nothing.
fn insert_merged(map: &mut BTreeMap<CanonicalKey, CatalogEntry>, e: CatalogEntry) {
    match map.get_mut(&e.key) {
        Some(existing) => {
            existing.multiplicity = existing.multiplicity.max(e.multiplicity);
            existing.provenance.extend(e.provenance);
        }
        None => {
            map.insert(e.key.clone(), e);
        }
    }
}

/// Union of catalogs of the same dimensions, deduplicated by key.
pub fn merge_catalogs(catalogs: impl IntoIterator<Item = Catalog>) -> Result<Catalog, CatalogError> {
    let mut dims: Option<(usize, usize)> = None;
    let mut map = BTreeMap::new();
    for c in catalogs {
        match dims {
            None => dims = Some((c.p, c.s)),
            Some((p, s)) if (p, s) != (c.p, c.s) => {
                return Err(CatalogError::MixedDimensions {
                    p1: p,
                    s1: s,
                    p2: c.p,
                    s2: c.s,
                })
            }
            _ => {}
        }
        for e in c.entries {
            insert_merged(&mut map, e);
        }
    }
    let (p, s) = dims.unwrap_or((0, 0));
    Ok(Catalog {
        p,
        s,
        entries: map.into_values().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::dedupe;
    use crate::fixtures;
    use crate::graph::graph_from_states;
    use crate::notation::parse_basis;

    fn catalog(kets: &[&str]) -> Catalog {
        let graphs: Vec<_> = kets
            .iter()
            .map(|k| graph_from_states(&parse_basis(k).unwrap()))
            .collect();
        let (p, s) = (graphs[0].p(), graphs[0].s());
        let classes = dedupe(graphs).unwrap();
        Catalog::new(p, s, classes.into_iter().map(|c| CatalogEntry::from_class(c, [])))
    }

    #[test]
    fn roundtrip_and_idempotent_merge() {
        let c = catalog(&[fixtures::UPBS[3].ket, fixtures::UPBS[4].ket, fixtures::UPBS[5].ket]);
        assert_eq!(c.len(), 3);
        let text = c.to_jsonl();
        assert!(text.starts_with(r#"{"format":"upb-catalog","version":1,"p":4,"s":8}"#));
        let back = Catalog::from_jsonl(&text).unwrap();
        assert_eq!(back, c);
        let merged = merge_catalogs([c.clone(), c.clone()]).unwrap();
        assert_eq!(merged.to_jsonl(), text);
    }

    #[test]
    fn merge_rejects_mixed_dimensions() {
        let a = catalog(&[fixtures::UPBS[3].ket]);
        let b = catalog(&[fixtures::UPBS[6].ket]);
        assert!(matches!(
            merge_catalogs([a, b]),
            Err(CatalogError::MixedDimensions { .. })
        ));
    }

    #[test]
    fn version_mismatch() {
        let text = "{\"format\":\"upb-catalog\",\"version\":2,\"p\":1,\"s\":2}\n";
        assert!(matches!(
            Catalog::from_jsonl(text),
            Err(CatalogError::VersionMismatch { found: 2 })
        ));
    }
}
