//! Orchestration: profiles become work units, units run in parallel, results
//! are deduplicated into a catalog. Finished units are appended to an optional
//! resume file so an interrupted sweep picks up where it stopped.

use std::collections::{BTreeMap, HashMap};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::place::{search_profile_with, PlacementStats, MAX_STATES};
use super::profiles::{enumerate_profiles_with_counts, ConstraintSet, ProfileConstraints, ProfileCounts};
use crate::canon::{canonical_key, dedupe_keyed, CanonError, CanonicalKey};
use crate::catalog::{Catalog, CatalogEntry};
use crate::graph::{OrthogonalityGraph, SizeProfile};
use crate::notation::{graph_from_value, graph_to_value};

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("search interrupted after {completed} of {total} work units")]
    Interrupted {
        /// File holding the finished units; pass it again to resume.
        resume: Option<PathBuf>,
        completed: usize,
        total: usize,
    },
    #[error("resume file: {0}")]
    Io(#[from] std::io::Error),
    #[error("resume file line {line}: {message}")]
    Resume { line: usize, message: String },
    #[error("resume file was written for (p={found_p}, s={found_s})")]
    ResumeMismatch { found_p: usize, found_s: usize },
    #[error(transparent)]
    Canon(#[from] CanonError),
    #[error("at most {MAX_STATES} states are supported, got {0}")]
    TooManyStates(usize),
}

#[derive(Clone, Debug, Default)]
pub struct SearchOptions {
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
    pub resume: Option<PathBuf>,
    pub cancel: Option<Arc<AtomicBool>>,
    /// Stop (as if cancelled) once this many new units have finished.
    pub unit_limit: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct UnitLog {
    pub unit: String,
    pub profile: String,
    pub raw_graphs: usize,
    pub classes: usize,
    pub resumed: bool,
    pub millis: u128,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stats: Option<PlacementStats>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchReport {
    pub p: usize,
    pub s: usize,
    pub constraints: ConstraintSet,
    pub profiles: ProfileCounts,
    pub profiles_searched: usize,
    pub units_resumed: usize,
    pub raw_graphs: usize,
    pub classes: usize,
    pub enumerate_millis: u128,
    pub search_millis: u128,
    pub dedupe_millis: u128,
    pub units: Vec<UnitLog>,
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub catalog: Catalog,
    pub report: SearchReport,
}

/// Stable identifier of a work unit.
pub fn unit_id(pr: &SizeProfile) -> String {
    let digest = Sha256::digest(pr.label().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Serialize, Deserialize)]
struct ResumeHeader {
    format: String,
    p: usize,
    s: usize,
}

#[derive(Serialize, Deserialize)]
struct ResumeClass {
    key: String,
    graph: Value,
    multiplicity: usize,
}

#[derive(Serialize, Deserialize)]
struct ResumeLine {
    unit: String,
    profile: String,
    raw_graphs: usize,
    classes: Vec<ResumeClass>,
}

const RESUME_FORMAT: &str = "upb-search-units";

struct UnitResult {
    raw_graphs: usize,
    classes: Vec<(CanonicalKey, OrthogonalityGraph, usize)>,
}

fn load_resume(path: &Path, p: usize, s: usize) -> Result<HashMap<String, UnitResult>, SearchError> {
    let mut done = HashMap::new();
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(done),
        Err(e) => return Err(e.into()),
    };
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |message: String| SearchError::Resume { line: lineno, message };
        if i == 0 {
            let h: ResumeHeader = serde_json::from_str(&line).map_err(|e| bad(e.to_string()))?;
            if h.format != RESUME_FORMAT {
                return Err(bad(format!("unknown format {:?}", h.format)));
            }
            if (h.p, h.s) != (p, s) {
                return Err(SearchError::ResumeMismatch { found_p: h.p, found_s: h.s });
            }
            continue;
        }
        // A torn final line from a killed run is skipped; the unit reruns.
        let Ok(r) = serde_json::from_str::<ResumeLine>(&line) else {
            continue;
        };
        let mut classes = Vec::new();
        for c in r.classes {
            let g = graph_from_value(c.graph).map_err(|e| bad(e.to_string()))?;
            classes.push((CanonicalKey::from_string(c.key), g, c.multiplicity));
        }
        done.insert(
            r.unit,
            UnitResult {
                raw_graphs: r.raw_graphs,
                classes,
            },
        );
    }
    Ok(done)
}

fn open_resume(path: &Path, p: usize, s: usize) -> Result<File, SearchError> {
    let fresh = std::fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    if fresh {
        let header = ResumeHeader {
            format: RESUME_FORMAT.into(),
            p,
            s,
        };
        writeln!(f, "{}", serde_json::to_string(&header).expect("header serializes"))?;
    }
    Ok(f)
}

fn resume_line(id: &str, pr: &SizeProfile, r: &UnitResult) -> String {
    let line = ResumeLine {
        unit: id.to_string(),
        profile: pr.label(),
        raw_graphs: r.raw_graphs,
        classes: r
            .classes
            .iter()
            .map(|(k, g, m)| ResumeClass {
                key: k.as_str().to_string(),
                graph: graph_to_value(g),
                multiplicity: *m,
            })
            .collect(),
    };
    serde_json::to_string(&line).expect("unit serializes")
}

fn search_unit(pr: &SizeProfile, cancel: &AtomicBool) -> Result<Option<(UnitResult, PlacementStats)>, SearchError> {
    let res = search_profile_with(pr, Some(cancel));
    if res.cancelled {
        return Ok(None);
    }
    let raw_graphs = res.graphs.len();
    let classes = dedupe_keyed(res.graphs.into_iter().map(|g| Ok((canonical_key(&g)?, g))))?
        .into_iter()
        .map(|c| (c.key, c.representative, c.multiplicity))
        .collect();
    Ok(Some((UnitResult { raw_graphs, classes }, res.stats)))
}

/// Enumerates profiles, searches each, and deduplicates the union.
pub fn full_search(c: &ProfileConstraints, opts: &SearchOptions) -> Result<SearchOutcome, SearchError> {
    if c.s > MAX_STATES {
        return Err(SearchError::TooManyStates(c.s));
    }
    match opts.workers {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .expect("thread pool starts");
            pool.install(|| run(c, opts))
        }
        None => run(c, opts),
    }
}

fn run(c: &ProfileConstraints, opts: &SearchOptions) -> Result<SearchOutcome, SearchError> {
    let (p, s) = (c.p, c.s);
    let t0 = Instant::now();
    let enumeration = enumerate_profiles_with_counts(c);
    let enumerate_millis = t0.elapsed().as_millis();

    let t1 = Instant::now();
    let mut done = match &opts.resume {
        Some(path) => load_resume(path, p, s)?,
        None => HashMap::new(),
    };
    let writer = match &opts.resume {
        Some(path) => Some(Mutex::new(open_resume(path, p, s)?)),
        None => None,
    };
    let units: Vec<(String, &SizeProfile)> = enumeration.profiles.iter().map(|pr| (unit_id(pr), pr)).collect();
    let pending: Vec<(usize, &String, &SizeProfile)> = units
        .iter()
        .enumerate()
        .filter(|(_, (id, _))| !done.contains_key(id))
        .map(|(i, (id, pr))| (i, id, *pr))
        .collect();

    let local_cancel = AtomicBool::new(false);
    let cancel = opts.cancel.as_deref().unwrap_or(&local_cancel);
    let finished = AtomicUsize::new(0);
    let results: Vec<Result<Option<(usize, UnitResult, PlacementStats, u128)>, SearchError>> = pending
        .par_iter()
        .map(|&(i, id, pr)| {
            if cancel.load(Ordering::Relaxed) {
                return Ok(None);
            }
            let start = Instant::now();
            let Some((r, stats)) = search_unit(pr, cancel)? else {
                return Ok(None);
            };
            if let Some(w) = &writer {
                let mut f = w.lock().expect("resume writer lock");
                writeln!(f, "{}", resume_line(id, pr, &r))?;
                f.flush()?;
            }
            let n = finished.fetch_add(1, Ordering::SeqCst) + 1;
            if opts.unit_limit.is_some_and(|limit| n >= limit) {
                cancel.store(true, Ordering::Relaxed);
            }
            Ok(Some((i, r, stats, start.elapsed().as_millis())))
        })
        .collect();

    let mut fresh: BTreeMap<usize, (UnitResult, PlacementStats, u128)> = BTreeMap::new();
    for r in results {
        if let Some((i, u, st, ms)) = r? {
            fresh.insert(i, (u, st, ms));
        }
    }
    let search_millis = t1.elapsed().as_millis();
    let completed = fresh.len() + units.iter().filter(|(id, _)| done.contains_key(id)).count();
    if completed < units.len() {
        return Err(SearchError::Interrupted {
            resume: opts.resume.clone(),
            completed,
            total: units.len(),
        });
    }

    let t2 = Instant::now();
    let mut logs = Vec::with_capacity(units.len());
    let mut per_unit: Vec<UnitResult> = Vec::with_capacity(units.len());
    let mut units_resumed = 0;
    for (i, (id, pr)) in units.iter().enumerate() {
        let (r, stats, millis, resumed) = match fresh.remove(&i) {
            Some((r, st, ms)) => (r, Some(st), ms, false),
            None => {
                units_resumed += 1;
                (done.remove(id).expect("unit finished"), None, 0, true)
            }
        };
        logs.push(UnitLog {
            unit: id.clone(),
            profile: pr.label(),
            raw_graphs: r.raw_graphs,
            classes: r.classes.len(),
            resumed,
            millis,
            stats,
        });
        per_unit.push(r);
    }
    let raw_graphs = per_unit.iter().map(|u| u.raw_graphs).sum();
    let mut merged: BTreeMap<CanonicalKey, CatalogEntry> = BTreeMap::new();
    for u in per_unit {
        for (key, graph, multiplicity) in u.classes {
            merged
                .entry(key.clone())
                .and_modify(|e| e.multiplicity += multiplicity)
                .or_insert_with(|| CatalogEntry {
                    key,
                    graph,
                    multiplicity,
                    provenance: ["search".to_string()].into(),
                });
        }
    }
    let catalog = Catalog {
        p,
        s,
        entries: merged.into_values().collect(),
    };
    let dedupe_millis = t2.elapsed().as_millis();

    let report = SearchReport {
        p,
        s,
        constraints: c.describe(),
        profiles: enumeration.counts,
        profiles_searched: units.len(),
        units_resumed,
        raw_graphs,
        classes: catalog.len(),
        enumerate_millis,
        search_millis,
        dedupe_millis,
        units: logs,
    };
    Ok(SearchOutcome { catalog, report })
}
