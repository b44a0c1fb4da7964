//! Text artifacts: edge lists (raw string tokens at ingestion, dense
//! ids thereafter), feature matrices, and atomic writes. Formats stay
//! line-oriented and diff-able; `#` starts a comment anywhere a file is
//! read.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use sha2::{Digest, Sha256};

use edge2node_core::{EdgeList, Mat};

use crate::error::CliError;

/// Print a line to stdout; a closed pipe (`edge2node ... | head`) ends
/// the process quietly instead of panicking.
pub fn emit(text: impl std::fmt::Display) {
    let mut out = std::io::stdout();
    if writeln!(out, "{text}").is_err() {
        std::process::exit(0);
    }
}

/// Ingested raw edge file: tokens remapped to dense ids in first-seen
/// order, duplicates collapsed but counted.
#[derive(Debug)]
pub struct LoadedEdges {
    pub num_nodes: usize,
    pub edges: EdgeList,
    /// dense id -> original token
    pub id_map: Vec<String>,
    pub duplicates: usize,
}

/// Read a raw edge list: one edge per line, two whitespace-separated
/// node tokens of any shape. Tokens become dense ids in first-seen
/// order.
pub fn load_edge_list(path: &Path) -> Result<LoadedEdges, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::missing_input(path, &e))?;
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut id_map: Vec<String> = Vec::new();
    let mut intern = |token: &str, ids: &mut HashMap<String, usize>| -> usize {
        *ids.entry(token.to_string()).or_insert_with(|| {
            id_map.push(token.to_string());
            id_map.len() - 1
        })
    };

    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let mut duplicates = 0usize;
    let mut seen: HashMap<(usize, usize), ()> = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let (a, b) = match (tokens.next(), tokens.next(), tokens.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => {
                return Err(CliError::new(
                    "malformed_line",
                    format!("{}:{}: expected two node tokens", path.display(), lineno + 1),
                ))
            }
        };
        if a == b {
            return Err(CliError::new(
                "malformed_line",
                format!("{}:{}: self-loop '{a}'", path.display(), lineno + 1),
            ));
        }
        let u = intern(a, &mut ids);
        let v = intern(b, &mut ids);
        let key = (u.min(v), u.max(v));
        if seen.insert(key, ()).is_some() {
            duplicates += 1;
        } else {
            pairs.push(key);
        }
    }
    if pairs.is_empty() {
        return Err(CliError::new(
            "empty_file",
            format!("{}: no edges found", path.display()),
        ));
    }
    let edges = EdgeList::from_pairs(pairs).expect("self-loops rejected above");
    Ok(LoadedEdges {
        num_nodes: id_map.len(),
        edges,
        id_map,
        duplicates,
    })
}

/// Read an edge list already in dense ids (our own artifacts). Unlike
/// ingestion, ids are taken literally and an empty list is legal.
pub fn read_dense_edges(path: &Path) -> Result<EdgeList, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::missing_input(path, &e))?;
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let parsed = match (tokens.next(), tokens.next(), tokens.next()) {
            (Some(a), Some(b), None) => a
                .parse::<usize>()
                .and_then(|u| b.parse::<usize>().map(|v| (u, v)))
                .ok(),
            _ => None,
        };
        match parsed {
            Some((u, v)) if u != v => pairs.push((u, v)),
            _ => {
                return Err(CliError::new(
                    "malformed_line",
                    format!(
                        "{}:{}: expected two distinct dense node ids",
                        path.display(),
                        lineno + 1
                    ),
                ))
            }
        }
    }
    Ok(EdgeList::from_pairs(pairs).expect("self-loops rejected above"))
}

pub fn write_dense_edges(path: &Path, edges: &EdgeList) -> Result<(), CliError> {
    let mut out = String::new();
    for (u, v) in edges.iter() {
        out.push_str(&format!("{u} {v}\n"));
    }
    atomic_write(path, out.as_bytes())
}

pub fn write_id_map(path: &Path, id_map: &[String]) -> Result<(), CliError> {
    let mut out = String::new();
    for (id, token) in id_map.iter().enumerate() {
        out.push_str(&format!("{token}\t{id}\n"));
    }
    atomic_write(path, out.as_bytes())
}

/// Feature matrix: one row per node in id order, whitespace-separated
/// reals, exactly `num_nodes` rows of one common width.
pub fn load_features(path: &Path, num_nodes: usize) -> Result<Mat<f64>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::missing_input(path, &e))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row: Result<Vec<f64>, _> = line.split_whitespace().map(str::parse::<f64>).collect();
        let row = row.map_err(|e| {
            CliError::new(
                "malformed_line",
                format!("{}:{}: {e}", path.display(), lineno + 1),
            )
        })?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(CliError::new(
                    "feature_mismatch",
                    format!(
                        "{}: row {} has width {}, expected {}",
                        path.display(),
                        rows.len(),
                        row.len(),
                        first.len()
                    ),
                ));
            }
        }
        rows.push(row);
    }
    if rows.len() != num_nodes {
        return Err(CliError::new(
            "feature_mismatch",
            format!(
                "{}: {} feature rows for {} nodes",
                path.display(),
                rows.len(),
                num_nodes
            ),
        ));
    }
    Ok(Mat::from_rows(&rows))
}

pub fn write_features(path: &Path, features: &Mat<f64>) -> Result<(), CliError> {
    let mut out = String::new();
    for r in 0..features.rows() {
        let row: Vec<String> = features.row(r).iter().map(|v| format!("{v}")).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    atomic_write(path, out.as_bytes())
}

/// Write via a temp file in the same directory, then rename, so
/// readers never observe a partial artifact.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    if let Some(dir) = dir {
        fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension(format!(
        "{}tmp-{}",
        path.extension()
            .map(|e| format!("{}.", e.to_string_lossy()))
            .unwrap_or_default(),
        std::process::id()
    ));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn sha256_file(path: &Path) -> Result<String, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::missing_input(path, &e))?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    Ok(format!("{:x}", hasher.finalize()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmpfile(name: &str, contents: &str) -> (tempfile::TempDir, std::path::PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(name);
        fs::write(&path, contents).unwrap();
        (dir, path)
    }

    #[test]
    fn ingestion_remaps_tokens_first_seen() {
        let (_d, path) = tmpfile("g.edges", "a b\nb c\n");
        let loaded = load_edge_list(&path).unwrap();
        assert_eq!(loaded.num_nodes, 3);
        assert_eq!(
            loaded.edges,
            EdgeList::from_pairs([(0, 1), (1, 2)]).unwrap()
        );
        assert_eq!(loaded.id_map, vec!["a", "b", "c"]);
        assert_eq!(loaded.duplicates, 0);
    }

    #[test]
    fn ingestion_counts_duplicates_once() {
        let (_d, path) = tmpfile("g.edges", "a b\na b\nb a\n");
        let loaded = load_edge_list(&path).unwrap();
        assert_eq!(loaded.edges.len(), 1);
        assert_eq!(loaded.duplicates, 2);
    }

    #[test]
    fn comment_only_file_is_empty() {
        let (_d, path) = tmpfile("g.edges", "# comment\n");
        let err = load_edge_list(&path).unwrap_err();
        assert_eq!(err.code, "empty_file");
    }

    #[test]
    fn malformed_line_reports_its_number() {
        let (_d, path) = tmpfile("g.edges", "a b\nc\n");
        let err = load_edge_list(&path).unwrap_err();
        assert_eq!(err.code, "malformed_line");
        assert!(err.message.contains(":2:"), "{}", err.message);
    }

    #[test]
    fn self_loop_line_rejected() {
        let (_d, path) = tmpfile("g.edges", "a a\n");
        let err = load_edge_list(&path).unwrap_err();
        assert_eq!(err.code, "malformed_line");
        assert!(err.message.contains("self-loop"), "{}", err.message);
    }

    #[test]
    fn dense_edges_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.edges");
        let edges = EdgeList::from_pairs([(3, 1), (0, 2), (1, 2)]).unwrap();
        write_dense_edges(&path, &edges).unwrap();
        assert_eq!(read_dense_edges(&path).unwrap(), edges);
        write_dense_edges(&path, &EdgeList::empty()).unwrap();
        assert_eq!(read_dense_edges(&path).unwrap(), EdgeList::empty());
    }

    #[test]
    fn dense_edges_do_not_remap() {
        let (_d, path) = tmpfile("e.edges", "5 7\n");
        let edges = read_dense_edges(&path).unwrap();
        assert_eq!(edges, EdgeList::from_pairs([(5, 7)]).unwrap());
    }

    #[test]
    fn features_round_trip_and_shape_checks() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.features");
        let m = Mat::from_rows(&[vec![1.0, -0.5], vec![0.25, 3.0], vec![0.0, 2.0]]);
        write_features(&path, &m).unwrap();
        assert_eq!(load_features(&path, 3).unwrap(), m);
        assert_eq!(
            load_features(&path, 4).unwrap_err().code,
            "feature_mismatch"
        );
    }

    #[test]
    fn ragged_feature_rows_name_the_row() {
        let (_d, path) = tmpfile("x.features", "1 2\n3\n");
        let err = load_features(&path, 2).unwrap_err();
        assert_eq!(err.code, "feature_mismatch");
        assert!(err.message.contains("row 1"), "{}", err.message);
    }

    #[test]
    fn missing_file_is_its_own_code() {
        let dir = tempfile::tempdir().unwrap();
        let err = load_edge_list(&dir.path().join("absent")).unwrap_err();
        assert_eq!(err.code, "missing_input");
    }

    #[test]
    fn error_json_shape() {
        let err = CliError::new("empty_file", "nothing in here");
        let v: serde_json::Value = serde_json::from_str(&err.to_json()).unwrap();
        assert_eq!(v["error"]["code"], "empty_file");
        assert_eq!(v["error"]["message"], "nothing in here");
    }
}
