//! Text-attributed-graph datasets: on-disk format, loading, validation.
//!
//! A dataset directory holds five files:
//!
//! - `meta.json` — name, directedness, node noun, edge semantics, ordered
//!   label vocabulary, and the two task descriptions.
//! - `nodes.jsonl` — one record per node: id, text, optional label, split.
//! - `edges.csv` — `src,dst` per line, decimal ids, no header. Each edge
//!   appears once; the loader mirrors it into both endpoint lists.
//! - `embeddings.bin` — magic `GICL`, version byte, dtype byte, two
//!   reserved zero bytes, u32 rows, u32 dim, then row-major f32 data, all
//!   little-endian.
//! - `pairs.jsonl` (optional) — labeled node pairs for link prediction.
//!
//! Node ids are dense integers `0..node_count`, and embedding row `i`
//! belongs to node `i`. The loaded graph is immutable and safe to share
//! across threads.

use std::collections::HashSet;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub type NodeId = usize;

const EMBEDDING_MAGIC: &[u8; 4] = b"GICL";
const EMBEDDING_VERSION: u8 = 1;
const EMBEDDING_DTYPE_F32: u8 = 1;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("missing dataset file {0}")]
    MissingFile(PathBuf),
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}:{line}: malformed record: {message}")]
    MalformedRecord {
        file: String,
        line: usize,
        message: String,
    },
    #[error("node id {id} out of range (node count {count})")]
    IdOutOfRange { id: usize, count: usize },
    #[error("duplicate node id {0} in nodes.jsonl")]
    DuplicateNodeId(usize),
    #[error("node ids are not dense: missing id {0}")]
    MissingNodeId(usize),
    #[error("edges.csv:{line}: self-loop on node {id}")]
    SelfLoop { line: usize, id: usize },
    #[error("edges.csv:{line}: duplicate edge {src},{dst}")]
    DuplicateEdge { line: usize, src: usize, dst: usize },
    #[error("node {node}: label {label:?} is not in the label vocabulary")]
    LabelOutsideVocabulary { node: usize, label: String },
    #[error("train-split node {0} has no label")]
    UnlabeledTrainNode(usize),
    #[error("embeddings.bin: bad magic (expected \"GICL\")")]
    BadMagic,
    #[error("embeddings.bin: unsupported version {0}")]
    BadVersion(u8),
    #[error("embeddings.bin: unsupported dtype {0}")]
    BadDtype(u8),
    #[error("embeddings.bin: reserved bytes must be zero")]
    BadReserved,
    #[error("embedding row count {rows} does not match node count {nodes}")]
    EmbeddingRowMismatch { rows: usize, nodes: usize },
    #[error("embedding dim must be > 0")]
    ZeroDim,
    #[error("embedding for node {node} contains a non-finite value")]
    NonFiniteEmbedding { node: usize },
    #[error("embeddings.bin: truncated data (expected {expected} bytes, got {got})")]
    TruncatedEmbeddings { expected: usize, got: usize },
    #[error("pair {index}: {message}")]
    BadPair { index: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Val, Split::Test];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairSplit {
    Train,
    Test,
}

/// A labeled node pair for link prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairExample {
    pub src: NodeId,
    pub dst: NodeId,
    pub connected: bool,
    pub split: PairSplit,
}

/// Dataset-level descriptor, mirrored from `meta.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub name: String,
    pub directed: bool,
    pub node_noun: String,
    pub edge_semantics: String,
    pub labels: Vec<String>,
    pub task_description_nc: String,
    pub task_description_lp: String,
}

/// An immutable text-attributed graph: texts, labels, splits, adjacency,
/// and the node embedding matrix.
///
/// Adjacency is always stored symmetrically; the `directed` flag is kept
/// for provenance only, since prompting treats every graph as undirected.
#[derive(Debug, Clone)]
pub struct TextAttributedGraph {
    meta: DatasetMeta,
    texts: Vec<String>,
    labels: Vec<Option<usize>>,
    splits: Vec<Split>,
    adjacency: Vec<Vec<NodeId>>,
    embeddings: Vec<f32>,
    dim: usize,
    lp_pairs: Vec<PairExample>,
}

impl TextAttributedGraph {
    /// Validate raw parts into a graph. All invariants are enforced here,
    /// so both the loader and in-memory builders share one gate.
    ///
    /// `edges` lists each edge once; both orientations are added to the
    /// adjacency lists. `edge_lines` optionally carries the originating
    /// line number per edge for diagnostics.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        meta: DatasetMeta,
        texts: Vec<String>,
        labels: Vec<Option<String>>,
        splits: Vec<Split>,
        edges: &[(NodeId, NodeId)],
        edge_lines: Option<&[usize]>,
        embeddings: Vec<f32>,
        dim: usize,
        lp_pairs: Vec<PairExample>,
    ) -> Result<Self, DatasetError> {
        let n = texts.len();
        assert_eq!(labels.len(), n);
        assert_eq!(splits.len(), n);

        let label_indices = labels
            .iter()
            .enumerate()
            .map(|(node, label)| match label {
                None => Ok(None),
                Some(l) => meta
                    .labels
                    .iter()
                    .position(|v| v == l)
                    .map(Some)
                    .ok_or_else(|| DatasetError::LabelOutsideVocabulary {
                        node,
                        label: l.clone(),
                    }),
            })
            .collect::<Result<Vec<_>, _>>()?;

        for (node, (split, label)) in splits.iter().zip(&label_indices).enumerate() {
            if *split == Split::Train && label.is_none() {
                return Err(DatasetError::UnlabeledTrainNode(node));
            }
        }

        if dim == 0 {
            return Err(DatasetError::ZeroDim);
        }
        if embeddings.len() != n * dim {
            return Err(DatasetError::EmbeddingRowMismatch {
                rows: embeddings.len() / dim,
                nodes: n,
            });
        }
        for (node, row) in embeddings.chunks(dim).enumerate() {
            if row.iter().any(|v| !v.is_finite()) {
                return Err(DatasetError::NonFiniteEmbedding { node });
            }
        }

        let mut adjacency = vec![Vec::new(); n];
        let mut seen = HashSet::new();
        for (i, &(src, dst)) in edges.iter().enumerate() {
            let line = edge_lines.map_or(i + 1, |lines| lines[i]);
            for id in [src, dst] {
                if id >= n {
                    return Err(DatasetError::IdOutOfRange { id, count: n });
                }
            }
            if src == dst {
                return Err(DatasetError::SelfLoop { line, id: src });
            }
            let key = (src.min(dst), src.max(dst));
            if !seen.insert(key) {
                return Err(DatasetError::DuplicateEdge { line, src, dst });
            }
            adjacency[src].push(dst);
            adjacency[dst].push(src);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }

        for (index, p) in lp_pairs.iter().enumerate() {
            if p.src == p.dst {
                return Err(DatasetError::BadPair {
                    index,
                    message: format!("src and dst are both {}", p.src),
                });
            }
            for id in [p.src, p.dst] {
                if id >= n {
                    return Err(DatasetError::BadPair {
                        index,
                        message: format!("node id {id} out of range (node count {n})"),
                    });
                }
            }
        }

        Ok(Self {
            meta,
            texts,
            labels: label_indices,
            splits,
            adjacency,
            embeddings,
            dim,
            lp_pairs,
        })
    }

    pub fn meta(&self) -> &DatasetMeta {
        &self.meta
    }

    pub fn name(&self) -> &str {
        &self.meta.name
    }

    pub fn node_count(&self) -> usize {
        self.texts.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label_vocabulary(&self) -> &[String] {
        &self.meta.labels
    }

    pub fn node_noun(&self) -> &str {
        &self.meta.node_noun
    }

    pub fn text(&self, id: NodeId) -> &str {
        &self.texts[id]
    }

    /// Label string of a node, if it has one.
    pub fn label(&self, id: NodeId) -> Option<&str> {
        self.labels[id].map(|i| self.meta.labels[i].as_str())
    }

    pub fn label_index(&self, id: NodeId) -> Option<usize> {
        self.labels[id]
    }

    pub fn split(&self, id: NodeId) -> Split {
        self.splits[id]
    }

    pub fn neighbors(&self, id: NodeId) -> &[NodeId] {
        &self.adjacency[id]
    }

    pub fn embedding(&self, id: NodeId) -> &[f32] {
        &self.embeddings[id * self.dim..(id + 1) * self.dim]
    }

    pub fn is_valid_node(&self, id: NodeId) -> bool {
        id < self.texts.len()
    }

    pub fn lp_pairs(&self) -> &[PairExample] {
        &self.lp_pairs
    }

    pub fn has_lp_pairs(&self) -> bool {
        !self.lp_pairs.is_empty()
    }

    /// Indices into `lp_pairs` whose split matches.
    pub fn pair_members(&self, split: PairSplit) -> Vec<usize> {
        self.lp_pairs
            .iter()
            .enumerate()
            .filter(|(_, p)| p.split == split)
            .map(|(i, _)| i)
            .collect()
    }

    /// Content digest over the loaded structure (not the raw file bytes),
    /// so two directories that load to the same graph share a digest.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        let meta = &self.meta;
        for field in [
            meta.name.as_str(),
            meta.node_noun.as_str(),
            meta.edge_semantics.as_str(),
            meta.task_description_nc.as_str(),
            meta.task_description_lp.as_str(),
        ] {
            h.update(field.as_bytes());
            h.update([0]);
        }
        h.update([meta.directed as u8]);
        for label in &meta.labels {
            h.update(label.as_bytes());
            h.update([0]);
        }
        for id in 0..self.node_count() {
            h.update(self.texts[id].as_bytes());
            h.update([0]);
            h.update((self.labels[id].map_or(u64::MAX, |i| i as u64)).to_le_bytes());
            h.update([self.splits[id] as u8]);
            for &nb in &self.adjacency[id] {
                h.update((nb as u64).to_le_bytes());
            }
            h.update([0xFF]);
        }
        h.update((self.dim as u64).to_le_bytes());
        for v in &self.embeddings {
            h.update(v.to_le_bytes());
        }
        for p in &self.lp_pairs {
            h.update((p.src as u64).to_le_bytes());
            h.update((p.dst as u64).to_le_bytes());
            h.update([p.connected as u8, matches!(p.split, PairSplit::Train) as u8]);
        }
        hex::encode(h.finalize())
    }
}

/// Ascending node ids whose split matches.
pub fn split_members(g: &TextAttributedGraph, split: Split) -> Vec<NodeId> {
    (0..g.node_count()).filter(|&id| g.split(id) == split).collect()
}

#[derive(Debug, Deserialize, Serialize)]
struct NodeRecord {
    id: usize,
    text: String,
    label: Option<String>,
    split: Split,
}

#[derive(Debug, Deserialize, Serialize)]
struct PairRecord {
    src: usize,
    dst: usize,
    connected: u8,
    split: PairSplit,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DatasetError + '_ {
    move |source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn open(path: &Path) -> Result<File, DatasetError> {
    if !path.exists() {
        return Err(DatasetError::MissingFile(path.to_path_buf()));
    }
    File::open(path).map_err(io_err(path))
}

/// Load and validate a dataset directory.
///
/// Node records may appear in any order in `nodes.jsonl`; the result is
/// identical as long as ids form the dense range `0..node_count`.
pub fn load_dataset(dir: &Path) -> Result<TextAttributedGraph, DatasetError> {
    let meta_path = dir.join("meta.json");
    let meta_file = open(&meta_path)?;
    let meta: DatasetMeta =
        serde_json::from_reader(BufReader::new(meta_file)).map_err(|e| DatasetError::MalformedRecord {
            file: "meta.json".into(),
            line: e.line(),
            message: e.to_string(),
        })?;

    // nodes.jsonl
    let nodes_path = dir.join("nodes.jsonl");
    let mut records: Vec<(usize, NodeRecord)> = Vec::new();
    for (lineno, line) in BufReader::new(open(&nodes_path)?).lines().enumerate() {
        let line = line.map_err(io_err(&nodes_path))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: NodeRecord = serde_json::from_str(&line).map_err(|e| DatasetError::MalformedRecord {
            file: "nodes.jsonl".into(),
            line: lineno + 1,
            message: e.to_string(),
        })?;
        records.push((lineno + 1, rec));
    }
    let n = records.len();
    let mut texts = vec![None; n];
    let mut labels = vec![None; n];
    let mut splits = vec![None; n];
    for (_line, rec) in records {
        if rec.id >= n {
            return Err(DatasetError::IdOutOfRange { id: rec.id, count: n });
        }
        if texts[rec.id].is_some() {
            return Err(DatasetError::DuplicateNodeId(rec.id));
        }
        texts[rec.id] = Some(rec.text);
        labels[rec.id] = rec.label;
        splits[rec.id] = Some(rec.split);
    }
    let texts: Vec<String> = texts
        .into_iter()
        .enumerate()
        .map(|(id, t)| t.ok_or(DatasetError::MissingNodeId(id)))
        .collect::<Result<_, _>>()?;
    let splits: Vec<Split> = splits.into_iter().map(|s| s.unwrap()).collect();

    // edges.csv
    let edges_path = dir.join("edges.csv");
    let mut edges = Vec::new();
    let mut edge_lines = Vec::new();
    for (lineno, line) in BufReader::new(open(&edges_path)?).lines().enumerate() {
        let line = line.map_err(io_err(&edges_path))?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let malformed = |message: String| DatasetError::MalformedRecord {
            file: "edges.csv".into(),
            line: lineno + 1,
            message,
        };
        let (a, b) = trimmed
            .split_once(',')
            .ok_or_else(|| malformed("expected \"src,dst\"".into()))?;
        let src: usize = a.trim().parse().map_err(|e| malformed(format!("bad src id: {e}")))?;
        let dst: usize = b.trim().parse().map_err(|e| malformed(format!("bad dst id: {e}")))?;
        edges.push((src, dst));
        edge_lines.push(lineno + 1);
    }

    // embeddings.bin
    let emb_path = dir.join("embeddings.bin");
    let mut raw = Vec::new();
    open(&emb_path)?.read_to_end(&mut raw).map_err(io_err(&emb_path))?;
    let (embeddings, dim) = decode_embeddings(&raw)?;

    // pairs.jsonl (optional)
    let pairs_path = dir.join("pairs.jsonl");
    let mut lp_pairs = Vec::new();
    if pairs_path.exists() {
        for (lineno, line) in BufReader::new(open(&pairs_path)?).lines().enumerate() {
            let line = line.map_err(io_err(&pairs_path))?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: PairRecord = serde_json::from_str(&line).map_err(|e| DatasetError::MalformedRecord {
                file: "pairs.jsonl".into(),
                line: lineno + 1,
                message: e.to_string(),
            })?;
            if rec.connected > 1 {
                return Err(DatasetError::MalformedRecord {
                    file: "pairs.jsonl".into(),
                    line: lineno + 1,
                    message: format!("connected must be 0 or 1, got {}", rec.connected),
                });
            }
            lp_pairs.push(PairExample {
                src: rec.src,
                dst: rec.dst,
                connected: rec.connected == 1,
                split: rec.split,
            });
        }
    }

    TextAttributedGraph::from_parts(
        meta,
        texts,
        labels,
        splits,
        &edges,
        Some(&edge_lines),
        embeddings,
        dim,
        lp_pairs,
    )
}

fn decode_embeddings(raw: &[u8]) -> Result<(Vec<f32>, usize), DatasetError> {
    if raw.len() < 16 {
        return Err(DatasetError::TruncatedEmbeddings {
            expected: 16,
            got: raw.len(),
        });
    }
    if &raw[0..4] != EMBEDDING_MAGIC {
        return Err(DatasetError::BadMagic);
    }
    if raw[4] != EMBEDDING_VERSION {
        return Err(DatasetError::BadVersion(raw[4]));
    }
    if raw[5] != EMBEDDING_DTYPE_F32 {
        return Err(DatasetError::BadDtype(raw[5]));
    }
    if raw[6] != 0 || raw[7] != 0 {
        return Err(DatasetError::BadReserved);
    }
    let rows = u32::from_le_bytes(raw[8..12].try_into().unwrap()) as usize;
    let dim = u32::from_le_bytes(raw[12..16].try_into().unwrap()) as usize;
    let expected = 16 + rows * dim * 4;
    if raw.len() != expected {
        return Err(DatasetError::TruncatedEmbeddings {
            expected,
            got: raw.len(),
        });
    }
    let data = raw[16..]
        .chunks_exact(4)
        .map(|b| f32::from_le_bytes(b.try_into().unwrap()))
        .collect();
    Ok((data, dim))
}

/// Write a graph back out as a dataset directory in the on-disk format.
///
/// Undirected edges are emitted once with `src < dst`.
pub fn write_dataset(g: &TextAttributedGraph, dir: &Path) -> Result<(), DatasetError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;

    let meta_path = dir.join("meta.json");
    let meta = serde_json::to_string_pretty(&g.meta).expect("meta serializes");
    fs::write(&meta_path, meta).map_err(io_err(&meta_path))?;

    let nodes_path = dir.join("nodes.jsonl");
    let mut nodes = String::new();
    for id in 0..g.node_count() {
        let rec = NodeRecord {
            id,
            text: g.text(id).to_string(),
            label: g.label(id).map(str::to_string),
            split: g.split(id),
        };
        nodes.push_str(&serde_json::to_string(&rec).expect("node serializes"));
        nodes.push('\n');
    }
    fs::write(&nodes_path, nodes).map_err(io_err(&nodes_path))?;

    let edges_path = dir.join("edges.csv");
    let mut edges = String::new();
    for src in 0..g.node_count() {
        for &dst in g.neighbors(src) {
            if src < dst {
                edges.push_str(&format!("{src},{dst}\n"));
            }
        }
    }
    fs::write(&edges_path, edges).map_err(io_err(&edges_path))?;

    let emb_path = dir.join("embeddings.bin");
    let mut out = Vec::with_capacity(16 + g.embeddings.len() * 4);
    out.extend_from_slice(EMBEDDING_MAGIC);
    out.push(EMBEDDING_VERSION);
    out.push(EMBEDDING_DTYPE_F32);
    out.extend_from_slice(&[0, 0]);
    out.extend_from_slice(&(g.node_count() as u32).to_le_bytes());
    out.extend_from_slice(&(g.dim as u32).to_le_bytes());
    for v in &g.embeddings {
        out.extend_from_slice(&v.to_le_bytes());
    }
    let mut f = File::create(&emb_path).map_err(io_err(&emb_path))?;
    f.write_all(&out).map_err(io_err(&emb_path))?;

    if !g.lp_pairs.is_empty() {
        let pairs_path = dir.join("pairs.jsonl");
        let mut pairs = String::new();
        for p in &g.lp_pairs {
            let rec = PairRecord {
                src: p.src,
                dst: p.dst,
                connected: p.connected as u8,
                split: p.split,
            };
            pairs.push_str(&serde_json::to_string(&rec).expect("pair serializes"));
            pairs.push('\n');
        }
        fs::write(&pairs_path, pairs).map_err(io_err(&pairs_path))?;
    }
    Ok(())
}
