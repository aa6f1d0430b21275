use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::{Edge, Graph, GraphError, Result};

/// Magic header of the binary graph cache.
pub const BINARY_MAGIC: &[u8; 8] = b"GPAGRPH1";

const FLAG_DIRECTED: u64 = 1;
const FLAG_WEIGHTED: u64 = 2;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadOptions {
    /// Mark the graph as weighted. SNAP files carry no weights, so every
    /// weight is still 1; the flag selects the wider edge record.
    pub weighted: bool,
    /// Store every line in both directions (undirected datasets).
    pub undirected_duplicate: bool,
    /// Remap sparse ids onto `[0, distinct ids)` in ascending id order.
    /// Off by default: `n = max id + 1` matches published dataset sizes.
    pub compact_ids: bool,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> GraphError + '_ {
    move |source| GraphError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Parses a whitespace-separated `src dst` edge list. Lines starting with
/// `#` and blank lines are skipped; tokens after the second are ignored.
pub fn load_snap_edge_list(path: impl AsRef<Path>, opts: LoadOptions) -> Result<Graph> {
    let path = path.as_ref();
    let file = File::open(path).map_err(io_err(path))?;
    let mut reader = BufReader::with_capacity(1 << 20, file);

    let mut raw: Vec<(u64, u64)> = Vec::new();
    let mut line = String::new();
    let mut lineno = 0usize;
    loop {
        line.clear();
        let read = reader.read_line(&mut line).map_err(io_err(path))?;
        if read == 0 {
            break;
        }
        lineno += 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_ascii_whitespace();
        let mut next_id = |what: &str| -> Result<u64> {
            let tok = tokens.next().ok_or_else(|| GraphError::Parse {
                path: path.to_path_buf(),
                line: lineno,
                message: format!("missing {what} vertex"),
            })?;
            tok.parse::<u64>().map_err(|e| GraphError::Parse {
                path: path.to_path_buf(),
                line: lineno,
                message: format!("bad {what} vertex {tok:?}: {e}"),
            })
        };
        let src = next_id("source")?;
        let dst = next_id("destination")?;
        raw.push((src, dst));
    }
    if raw.is_empty() {
        return Err(GraphError::Empty(path.to_path_buf()));
    }

    let (n, pairs) = if opts.compact_ids {
        compact(&raw)?
    } else {
        let max = raw.iter().map(|&(s, d)| s.max(d)).max().unwrap_or(0);
        if max > u32::MAX as u64 - 1 {
            return Err(GraphError::IdOverflow { id: max });
        }
        let pairs = raw.iter().map(|&(s, d)| (s as u32, d as u32)).collect();
        ((max + 1) as usize, pairs)
    };

    let mut edges = Vec::with_capacity(pairs.len() * if opts.undirected_duplicate { 2 } else { 1 });
    for (s, d) in pairs {
        edges.push(Edge::new(s, d));
        if opts.undirected_duplicate {
            edges.push(Edge::new(d, s));
        }
    }
    Ok(Graph::from_edges(n, edges)
        .with_directed(!opts.undirected_duplicate)
        .with_weighted(opts.weighted))
}

fn compact(raw: &[(u64, u64)]) -> Result<(usize, Vec<(u32, u32)>)> {
    let mut ids: Vec<u64> = raw.iter().flat_map(|&(s, d)| [s, d]).collect();
    ids.sort_unstable();
    ids.dedup();
    if ids.len() > u32::MAX as usize {
        return Err(GraphError::IdOverflow { id: ids.len() as u64 });
    }
    let index: HashMap<u64, u32> = ids.iter().enumerate().map(|(i, &id)| (id, i as u32)).collect();
    let pairs = raw.iter().map(|&(s, d)| (index[&s], index[&d])).collect();
    Ok((ids.len(), pairs))
}

/// Writes the binary cache: magic, little-endian `u64` n, m and flags,
/// then `m` pairs of `u32` (src, dst), then `m` `u32` weights when weighted.
pub fn save_binary(graph: &Graph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    let mut flags = 0;
    if graph.is_directed() {
        flags |= FLAG_DIRECTED;
    }
    if graph.is_weighted() {
        flags |= FLAG_WEIGHTED;
    }
    let write = |w: &mut BufWriter<File>| -> std::io::Result<()> {
        w.write_all(BINARY_MAGIC)?;
        w.write_all(&(graph.n() as u64).to_le_bytes())?;
        w.write_all(&(graph.m() as u64).to_le_bytes())?;
        w.write_all(&flags.to_le_bytes())?;
        for e in graph.edges() {
            w.write_all(&e.src.to_le_bytes())?;
            w.write_all(&e.dst.to_le_bytes())?;
        }
        if graph.is_weighted() {
            for e in graph.edges() {
                w.write_all(&e.weight.to_le_bytes())?;
            }
        }
        w.flush()
    };
    write(&mut w).map_err(io_err(path))
}

pub fn load_binary(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    let bad = |reason: &str| GraphError::BadCache {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    };
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(io_err(path))?;
    if bytes.len() < 32 || &bytes[..8] != BINARY_MAGIC {
        return Err(bad("missing magic header"));
    }
    let word = |at: usize| u64::from_le_bytes(bytes[at..at + 8].try_into().unwrap());
    let (n, m, flags) = (word(8) as usize, word(16) as usize, word(24));
    let weighted = flags & FLAG_WEIGHTED != 0;
    let expected = 32 + m * 8 + if weighted { m * 4 } else { 0 };
    if bytes.len() != expected {
        return Err(bad(&format!("expected {expected} bytes, found {}", bytes.len())));
    }
    let u32_at = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap());
    let mut edges = Vec::with_capacity(m);
    for i in 0..m {
        let at = 32 + i * 8;
        let weight = if weighted { u32_at(32 + m * 8 + i * 4) } else { 1 };
        let e = Edge::weighted(u32_at(at), u32_at(at + 4), weight);
        if e.src as usize >= n || e.dst as usize >= n {
            return Err(bad(&format!("edge {i} references a vertex >= {n}")));
        }
        edges.push(e);
    }
    Ok(Graph::from_edges(n, edges)
        .with_directed(flags & FLAG_DIRECTED != 0)
        .with_weighted(weighted))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_tmp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn three_line_file() {
        let f = write_tmp("0 1\n1 2\n0 2\n");
        let g = load_snap_edge_list(f.path(), LoadOptions::default()).unwrap();
        assert_eq!((g.n(), g.m()), (3, 3));
        assert!(g.edges().iter().all(|e| e.weight == 1));
    }

    #[test]
    fn comments_tabs_and_duplication() {
        let f = write_tmp("# Directed graph\n# FromNodeId\tToNodeId\n0\t4\n\n4\t1\n");
        let g = load_snap_edge_list(
            f.path(),
            LoadOptions {
                undirected_duplicate: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!((g.n(), g.m()), (5, 4));
        assert!(!g.is_directed());
        assert_eq!(g.edges()[1], Edge::new(4, 0));
    }

    #[test]
    fn compaction_maps_gaps() {
        let f = write_tmp("10 30\n30 20\n");
        let opts = LoadOptions {
            compact_ids: true,
            ..Default::default()
        };
        let g = load_snap_edge_list(f.path(), opts).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.edges(), &[Edge::new(0, 2), Edge::new(2, 1)]);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let f = write_tmp("# c\n0 1\n1 x\n");
        match load_snap_edge_list(f.path(), LoadOptions::default()) {
            Err(GraphError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let f = write_tmp("7\n");
        assert!(matches!(
            load_snap_edge_list(f.path(), LoadOptions::default()),
            Err(GraphError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn empty_file_is_an_error() {
        let f = write_tmp("# only comments\n");
        assert!(matches!(
            load_snap_edge_list(f.path(), LoadOptions::default()),
            Err(GraphError::Empty(_))
        ));
    }

    #[test]
    fn binary_cache_round_trip() {
        let g = Graph::from_edges(4, vec![Edge::weighted(0, 3, 7), Edge::new(2, 1)]).with_directed(false);
        let f = tempfile::NamedTempFile::new().unwrap();
        save_binary(&g, f.path()).unwrap();
        let bytes = std::fs::read(f.path()).unwrap();
        assert_eq!(&bytes[..8], BINARY_MAGIC);
        assert_eq!(u64::from_le_bytes(bytes[8..16].try_into().unwrap()), 4);
        assert_eq!(load_binary(f.path()).unwrap(), g);
    }

    #[test]
    fn binary_cache_rejects_truncation() {
        let g = Graph::from_pairs(2, &[(0, 1)]);
        let f = tempfile::NamedTempFile::new().unwrap();
        save_binary(&g, f.path()).unwrap();
        let bytes = std::fs::read(f.path()).unwrap();
        std::fs::write(f.path(), &bytes[..bytes.len() - 1]).unwrap();
        assert!(matches!(load_binary(f.path()), Err(GraphError::BadCache { .. })));
    }
}
