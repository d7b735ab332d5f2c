use std::collections::{HashMap, HashSet};
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::write_json;
use crate::datasets::bidirectional_ratio;
use crate::digraph::{DirectedGraph, NodeFeatures};
use crate::error::{Error, Result};

/// Summary written to `stats.json` by [`cmd_ingest`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestStats {
    pub nodes: usize,
    pub edges: usize,
    /// `|E| / (n (n - 1))`.
    pub density: f64,
    pub bidirectional_ratio: f64,
    pub feature_dim: usize,
    pub self_loops_dropped: usize,
    pub duplicates_collapsed: usize,
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::Ingest(format!("{}: {e}", path.display())))
}

fn read_raw_edges(path: &Path) -> Result<Vec<(String, String)>> {
    let mut edges = Vec::new();
    for (i, line) in open(path)?.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = t.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty()).collect();
        match parts.as_slice() {
            [a, b] => edges.push((a.to_string(), b.to_string())),
            _ => {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("expected two node ids, got {t:?}"),
                })
            }
        }
    }
    Ok(edges)
}

/// Dense order of the raw ids: the id map's order when given, otherwise
/// numeric order when every id is an integer, otherwise first appearance.
fn dense_ids(edges: &[(String, String)], id_map: Option<&Path>) -> Result<Vec<String>> {
    if let Some(path) = id_map {
        let mut ids = Vec::new();
        let mut seen = HashSet::new();
        for line in open(path)?.lines() {
            let line = line?;
            let id = line.trim();
            if id.is_empty() {
                continue;
            }
            if !seen.insert(id.to_string()) {
                return Err(Error::Ingest(format!("id {id:?} listed twice in {}", path.display())));
            }
            ids.push(id.to_string());
        }
        return Ok(ids);
    }
    let mut seen = HashSet::new();
    let mut ids: Vec<String> = edges
        .iter()
        .flat_map(|(a, b)| [a, b])
        .filter(|id| seen.insert(id.as_str()))
        .cloned()
        .collect();
    if ids.iter().all(|s| s.parse::<i64>().is_ok()) {
        ids.sort_by_key(|s| s.parse::<i64>().expect("checked"));
    }
    Ok(ids)
}

/// Relabels an edge list with arbitrary ids to `0..n-1` and writes
/// `edges.txt`, `ids.txt` (raw id of each dense id), `features.csv` when
/// features are given (row `i` belongs to dense node `i`) and `stats.json`.
pub fn cmd_ingest(edges: &Path, features: Option<&Path>, id_map: Option<&Path>, out: &Path) -> Result<IngestStats> {
    let raw = read_raw_edges(edges)?;
    let ids = dense_ids(&raw, id_map)?;
    let index: HashMap<&str, usize> = ids.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let lookup = |s: &str| {
        index
            .get(s)
            .copied()
            .ok_or_else(|| Error::Ingest(format!("node {s:?} is missing from the id map")))
    };
    let dense = raw
        .iter()
        .map(|(a, b)| Ok((lookup(a)?, lookup(b)?)))
        .collect::<Result<Vec<_>>>()?;
    let n = ids.len();
    let (graph, report) = DirectedGraph::from_edges(n, dense)?;
    let feats = features.map(|p| NodeFeatures::read_csv(open(p)?)).transpose()?;
    if let Some(f) = &feats {
        if f.num_nodes() != n {
            return Err(Error::Ingest(format!("{} feature rows for {n} nodes", f.num_nodes())));
        }
    }

    fs::create_dir_all(out)?;
    graph.write_edge_list(BufWriter::new(File::create(out.join("edges.txt"))?))?;
    let mut w = BufWriter::new(File::create(out.join("ids.txt"))?);
    for id in &ids {
        writeln!(w, "{id}")?;
    }
    w.flush()?;
    if let Some(f) = &feats {
        f.write_csv(BufWriter::new(File::create(out.join("features.csv"))?))?;
    }
    let m = graph.num_edges();
    let stats = IngestStats {
        nodes: n,
        edges: m,
        density: if n < 2 { 0.0 } else { m as f64 / (n * (n - 1)) as f64 },
        bidirectional_ratio: bidirectional_ratio(&graph),
        feature_dim: feats.as_ref().map_or(0, |f| f.dim()),
        self_loops_dropped: report.self_loops_dropped,
        duplicates_collapsed: report.duplicates_collapsed,
    };
    write_json(&out.join("stats.json"), &stats)?;
    log::info!("ingested {n} nodes, {m} edges into {}", out.display());
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
        let p = dir.join(name);
        fs::write(&p, text).unwrap();
        p
    }

    #[test]
    fn toy_ring_stats() {
        let dir = tempfile::tempdir().unwrap();
        let e = write(dir.path(), "ring.txt", "# ring\nd a\na b\nb c\nc d\n");
        let stats = cmd_ingest(&e, None, None, &dir.path().join("out")).unwrap();
        assert_eq!((stats.nodes, stats.edges, stats.feature_dim), (4, 4, 0));
        assert!((stats.density - 4.0 / 12.0).abs() < 1e-15);
        assert_eq!(stats.bidirectional_ratio, 0.0);
        let edges = fs::read_to_string(dir.path().join("out/edges.txt")).unwrap();
        assert_eq!(edges, "0 1\n1 2\n2 3\n3 0\n");
        assert_eq!(fs::read_to_string(dir.path().join("out/ids.txt")).unwrap(), "d\na\nb\nc\n");
        assert!(!dir.path().join("out/features.csv").exists());
    }

    #[test]
    fn integer_ids_sort_numerically_and_features_align() {
        let dir = tempfile::tempdir().unwrap();
        let e = write(dir.path(), "e.csv", "10,2\n2,10\n7,7\n2 7\n2 7\n");
        let f = write(dir.path(), "f.csv", "0,1\n1,0\n1,1\n");
        let stats = cmd_ingest(&e, Some(&f), None, &dir.path().join("o")).unwrap();
        assert_eq!((stats.nodes, stats.edges), (3, 3));
        assert_eq!((stats.self_loops_dropped, stats.duplicates_collapsed), (1, 1));
        assert!((stats.bidirectional_ratio - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(fs::read_to_string(dir.path().join("o/ids.txt")).unwrap(), "2\n7\n10\n");
        assert_eq!(fs::read_to_string(dir.path().join("o/edges.txt")).unwrap(), "0 1\n0 2\n2 0\n");

        let short = write(dir.path(), "g.csv", "0,1\n");
        assert!(matches!(cmd_ingest(&e, Some(&short), None, &dir.path().join("p")), Err(Error::Ingest(_))));
    }

    #[test]
    fn id_map_fixes_order_and_keeps_isolated_nodes() {
        let dir = tempfile::tempdir().unwrap();
        let e = write(dir.path(), "e.txt", "x y\n");
        let m = write(dir.path(), "ids.txt", "y\nz\nx\n");
        let stats = cmd_ingest(&e, None, Some(&m), &dir.path().join("o")).unwrap();
        assert_eq!(stats.nodes, 3);
        assert_eq!(fs::read_to_string(dir.path().join("o/edges.txt")).unwrap(), "2 0\n");
        let bad = write(dir.path(), "bad.txt", "y\n");
        assert!(matches!(cmd_ingest(&e, None, Some(&bad), &dir.path().join("q")), Err(Error::Ingest(_))));
        let malformed = write(dir.path(), "m.txt", "a b c\n");
        assert!(matches!(cmd_ingest(&malformed, None, None, &dir.path().join("r")), Err(Error::Parse { line: 1, .. })));
    }
}
