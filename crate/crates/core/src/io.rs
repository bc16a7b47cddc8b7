//! Network persistence as two comma-separated tables.
//!
//! `nodes.csv` has columns `node_id,attitude`, one row per node in id order.
//! `ties.csv` has columns `src,dst,kind` with `kind` either `base` or
//! `close`; base rows are written with `src < dst`, close rows keep their
//! direction. Attitudes are written in shortest round-trip form, so an
//! export followed by an import reproduces the network exactly.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use crate::error::NetworkIoError;
use crate::graph::{AttitudeNetwork, NodeId};

pub const NODES_FILE: &str = "nodes.csv";
pub const TIES_FILE: &str = "ties.csv";
const NODES_HEADER: &str = "node_id,attitude";
const TIES_HEADER: &str = "src,dst,kind";

pub fn write_nodes<W: Write>(network: &AttitudeNetwork, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{NODES_HEADER}")?;
    for v in network.nodes() {
        writeln!(out, "{},{}", v, network.attitude(v))?;
    }
    out.flush()
}

pub fn write_ties<W: Write>(network: &AttitudeNetwork, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{TIES_HEADER}")?;
    for &(a, b) in network.base_ties() {
        writeln!(out, "{a},{b},base")?;
    }
    for &(a, b) in network.close_ties() {
        writeln!(out, "{a},{b},close")?;
    }
    out.flush()
}

/// Writes `nodes.csv` and `ties.csv` into `dir`, creating it if needed.
pub fn export_network(network: &AttitudeNetwork, dir: &Path) -> Result<(), NetworkIoError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let nodes = dir.join(NODES_FILE);
    let file = fs::File::create(&nodes).map_err(io_err(&nodes))?;
    write_nodes(network, BufWriter::new(file)).map_err(io_err(&nodes))?;
    let ties = dir.join(TIES_FILE);
    let file = fs::File::create(&ties).map_err(io_err(&ties))?;
    write_ties(network, BufWriter::new(file)).map_err(io_err(&ties))?;
    Ok(())
}

/// Reads a network previously written by [`export_network`].
pub fn import_network(dir: &Path) -> Result<AttitudeNetwork, NetworkIoError> {
    let nodes = dir.join(NODES_FILE);
    let ties = dir.join(TIES_FILE);
    let nf = fs::File::open(&nodes).map_err(io_err(&nodes))?;
    let tf = fs::File::open(&ties).map_err(io_err(&ties))?;
    read_network(nf, &nodes, tf, &ties)
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> NetworkIoError + '_ {
    move |source| NetworkIoError::Io {
        path: path.to_path_buf(),
        source,
    }
}

struct Rows<'a> {
    path: &'a Path,
    lines: Vec<(usize, String)>,
}

impl<'a> Rows<'a> {
    fn read<R: Read>(input: R, path: &'a Path, header: &str) -> Result<Self, NetworkIoError> {
        let mut lines = Vec::new();
        let mut seen_header = false;
        for (i, line) in BufReader::new(input).lines().enumerate() {
            let line = line.map_err(io_err(path))?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            if !seen_header {
                if trimmed != header {
                    return Err(parse_err(
                        path,
                        i + 1,
                        format!("expected header `{header}`"),
                    ));
                }
                seen_header = true;
                continue;
            }
            lines.push((i + 1, trimmed.to_string()));
        }
        if !seen_header {
            return Err(parse_err(path, 1, format!("missing header `{header}`")));
        }
        Ok(Rows { path, lines })
    }
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> NetworkIoError {
    NetworkIoError::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn field<T: std::str::FromStr>(
    path: &Path,
    line: usize,
    name: &str,
    raw: &str,
) -> Result<T, NetworkIoError> {
    raw.trim()
        .parse()
        .map_err(|_| parse_err(path, line, format!("bad {name} `{raw}`")))
}

pub fn read_network<R1: Read, R2: Read>(
    nodes: R1,
    nodes_path: &Path,
    ties: R2,
    ties_path: &Path,
) -> Result<AttitudeNetwork, NetworkIoError> {
    let node_rows = Rows::read(nodes, nodes_path, NODES_HEADER)?;
    let mut net = AttitudeNetwork::with_capacity(node_rows.lines.len());
    for (line, text) in &node_rows.lines {
        let cols: Vec<&str> = text.split(',').collect();
        if cols.len() != 2 {
            return Err(parse_err(nodes_path, *line, "expected 2 columns"));
        }
        let id: usize = field(nodes_path, *line, "node_id", cols[0])?;
        if id != net.node_count() {
            return Err(parse_err(
                nodes_path,
                *line,
                format!(
                    "node ids must be dense and ascending, expected {}",
                    net.node_count()
                ),
            ));
        }
        let attitude: f64 = field(nodes_path, *line, "attitude", cols[1])?;
        net.add_node(attitude)
            .map_err(|source| NetworkIoError::Invariant {
                path: nodes_path.to_path_buf(),
                line: *line,
                source,
            })?;
    }

    let tie_rows = Rows::read(ties, ties_path, TIES_HEADER)?;
    let mut close = Vec::new();
    for (line, text) in &tie_rows.lines {
        let cols: Vec<&str> = text.split(',').collect();
        if cols.len() != 3 {
            return Err(parse_err(ties_path, *line, "expected 3 columns"));
        }
        let a = NodeId(field(ties_path, *line, "src", cols[0])?);
        let b = NodeId(field(ties_path, *line, "dst", cols[1])?);
        match cols[2].trim() {
            "base" => {
                let added = net
                    .add_base_tie(a, b)
                    .map_err(|source| NetworkIoError::Invariant {
                        path: ties_path.to_path_buf(),
                        line: *line,
                        source,
                    })?;
                if !added {
                    return Err(parse_err(
                        ties_path,
                        *line,
                        format!("duplicate base tie {a},{b}"),
                    ));
                }
            }
            "close" => close.push((*line, a, b)),
            other => {
                return Err(parse_err(
                    ties_path,
                    *line,
                    format!("unknown tie kind `{other}` (expected base or close)"),
                ))
            }
        }
    }
    // Close ties go in after every base tie so row order within the file
    // does not matter.
    for (line, a, b) in close {
        let added = net
            .add_close_tie(a, b)
            .map_err(|source| NetworkIoError::Invariant {
                path: tie_rows.path.to_path_buf(),
                line,
                source,
            })?;
        if !added {
            return Err(parse_err(
                ties_path,
                line,
                format!("duplicate close tie {a},{b}"),
            ));
        }
    }
    Ok(net)
}

/// Convenience for in-memory round trips.
pub fn read_network_str(nodes: &str, ties: &str) -> Result<AttitudeNetwork, NetworkIoError> {
    read_network(
        nodes.as_bytes(),
        &PathBuf::from(NODES_FILE),
        ties.as_bytes(),
        &PathBuf::from(TIES_FILE),
    )
}
