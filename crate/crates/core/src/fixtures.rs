//! Synthetic datasets for tests, demos, and trying out the CLI without
//! real data.
//!
//! Everything here is deterministic: builders derive all content from
//! explicit formulas or a fixed splitmix64 stream, so goldens and digests
//! stay stable.

use crate::dataset::{
    DatasetError, DatasetMeta, NodeId, PairExample, PairSplit, Split, TextAttributedGraph,
};
use crate::seed::SplitMix64;

/// Raw graph pieces, for tests that want to perturb one field before
/// validation.
#[derive(Debug, Clone)]
pub struct GraphParts {
    pub meta: DatasetMeta,
    pub texts: Vec<String>,
    pub labels: Vec<Option<String>>,
    pub splits: Vec<Split>,
    pub edges: Vec<(NodeId, NodeId)>,
    pub embeddings: Vec<f32>,
    pub dim: usize,
    pub lp_pairs: Vec<PairExample>,
}

impl GraphParts {
    pub fn build(self) -> Result<TextAttributedGraph, DatasetError> {
        TextAttributedGraph::from_parts(
            self.meta,
            self.texts,
            self.labels,
            self.splits,
            &self.edges,
            None,
            self.embeddings,
            self.dim,
            self.lp_pairs,
        )
    }
}

fn default_meta(name: &str, labels: &[&str]) -> DatasetMeta {
    DatasetMeta {
        name: name.to_string(),
        directed: false,
        node_noun: "paper".to_string(),
        edge_semantics: "the citation relationships between papers".to_string(),
        labels: labels.iter().map(|s| s.to_string()).collect(),
        task_description_nc: format!(
            "I'm starting a node classification task. Please predict the most appropriate \
             category for the target node (paper). Choose from the following categories:\n{}.",
            labels.join("\n")
        ),
        task_description_lp: "I'm starting a link prediction task. Please predict whether \
             there's a link between the following 2 nodes. In this graph, links between nodes \
             represent the citation relationships between papers. Your answer should be '0' \
             or '1'. '0' means there's no link and '1' means there's a link."
            .to_string(),
    }
}

/// A three-node path `0-1-2` with mutable parts, the smallest useful graph.
pub fn tiny_parts() -> GraphParts {
    GraphParts {
        meta: default_meta("tiny", &["X", "Y"]),
        texts: vec!["node a".into(), "node b".into(), "node c".into()],
        labels: vec![Some("X".into()), Some("Y".into()), Some("X".into())],
        splits: vec![Split::Train, Split::Val, Split::Test],
        edges: vec![(0, 1), (1, 2)],
        embeddings: vec![1.0, 0.0, 0.0, 1.0, 1.0, 1.0],
        dim: 2,
        lp_pairs: Vec::new(),
    }
}

/// Path graph over the given node texts, all nodes labeled "X" and train.
pub fn path_graph(texts: &[&str]) -> TextAttributedGraph {
    let n = texts.len();
    let edges: Vec<_> = (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect();
    graph_from_edges(n, &edges, Some(texts))
}

/// Arbitrary undirected graph with filler texts and embeddings.
pub fn graph_from_edges(
    n: usize,
    edges: &[(NodeId, NodeId)],
    texts: Option<&[&str]>,
) -> TextAttributedGraph {
    let texts: Vec<String> = match texts {
        Some(t) => t.iter().map(|s| s.to_string()).collect(),
        None => (0..n).map(|i| format!("node {i}")).collect(),
    };
    let mut stream = SplitMix64::new(0x617267);
    let dim = 4;
    let embeddings = random_unit_rows(n, dim, &mut stream);
    GraphParts {
        meta: default_meta("synthetic", &["X"]),
        texts,
        labels: vec![Some("X".into()); n],
        splits: vec![Split::Train; n],
        edges: edges.to_vec(),
        embeddings,
        dim,
        lp_pairs: Vec::new(),
    }
    .build()
    .expect("synthetic graph is valid")
}

pub fn triangle() -> TextAttributedGraph {
    graph_from_edges(3, &[(0, 1), (1, 2), (0, 2)], None)
}

pub fn cycle(n: usize) -> TextAttributedGraph {
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    graph_from_edges(n, &edges, None)
}

pub fn complete(n: usize) -> TextAttributedGraph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            edges.push((i, j));
        }
    }
    graph_from_edges(n, &edges, None)
}

/// Star with node 0 at the center and `n - 1` leaves.
pub fn star(n: usize) -> TextAttributedGraph {
    let edges: Vec<_> = (1..n).map(|i| (0, i)).collect();
    graph_from_edges(n, &edges, None)
}

/// Erdos-Renyi style random graph; `p` in [0,1]. Nodes carry labels over a
/// four-class vocabulary, round-robin splits, and random embeddings.
pub fn random_graph(seed: u64, n: usize, p: f64) -> TextAttributedGraph {
    let mut stream = SplitMix64::new(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if unit_float(&mut stream) < p {
                edges.push((i, j));
            }
        }
    }
    let vocab = ["alpha", "beta", "gamma", "delta"];
    let dim = 8;
    let embeddings = random_unit_rows(n, dim, &mut stream);
    GraphParts {
        meta: default_meta("random", &vocab),
        texts: (0..n).map(|i| format!("random node {i}")).collect(),
        labels: (0..n).map(|i| Some(vocab[i % vocab.len()].to_string())).collect(),
        splits: (0..n)
            .map(|i| [Split::Train, Split::Test, Split::Train, Split::Val][i % 4])
            .collect(),
        edges,
        embeddings,
        dim,
        lp_pairs: Vec::new(),
    }
    .build()
    .expect("random graph is valid")
}

/// Hub graph for selection tests: node 0 has twenty 1-hop neighbors
/// (1..=20), each of which chains to one distinct 2-hop node (21..=40).
pub fn hub_fixture() -> TextAttributedGraph {
    let n = 41;
    let mut edges: Vec<(NodeId, NodeId)> = (1..=20).map(|i| (0, i)).collect();
    edges.extend((1..=20).map(|i| (i, i + 20)));
    let vocab = ["red", "green", "blue"];
    let mut stream = SplitMix64::new(0xB0B);
    let dim = 6;
    let embeddings = random_unit_rows(n, dim, &mut stream);
    GraphParts {
        meta: default_meta("hub", &vocab),
        texts: (0..n).map(|i| format!("hub node {i}")).collect(),
        labels: (0..n).map(|i| Some(vocab[i % vocab.len()].to_string())).collect(),
        splits: (0..n)
            .map(|i| if i == 0 {
                Split::Test
            } else if i % 2 == 1 {
                Split::Train
            } else {
                Split::Test
            })
            .collect(),
        edges,
        embeddings,
        dim,
        lp_pairs: Vec::new(),
    }
    .build()
    .expect("hub fixture is valid")
}

/// The 30-node citation-style fixture used across the integration tests:
/// three classes, a ring plus chord edges, 12-dim embeddings that cluster
/// by class, and labeled link-prediction pairs.
pub fn citation_fixture() -> TextAttributedGraph {
    let n = 30;
    let vocab = ["Rule Learning", "Neural Networks", "Theory"];
    let topics = ["rule induction", "neural network", "learning theory"];
    let adjectives = ["adaptive", "scalable", "robust", "sparse"];
    let domains = [
        "citation graphs",
        "sparse matrices",
        "text corpora",
        "protein networks",
        "image retrieval",
    ];

    let texts: Vec<String> = (0..n)
        .map(|i| {
            format!(
                "Paper {i}: {} {} methods for {}",
                adjectives[i % 4],
                topics[i % 3],
                domains[i % 5]
            )
        })
        .collect();
    let labels: Vec<Option<String>> = (0..n).map(|i| Some(vocab[i % 3].to_string())).collect();
    let splits: Vec<Split> = (0..n)
        .map(|i| {
            if i < 12 {
                Split::Train
            } else if i < 18 {
                Split::Val
            } else {
                Split::Test
            }
        })
        .collect();

    let mut edges: Vec<(NodeId, NodeId)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    edges.extend((0..n).step_by(3).map(|i| (i, (i + 7) % n)));

    // Class-clustered embeddings: a one-hot block per class plus small
    // deterministic noise, so similarity ranking favors same-class nodes.
    let dim = 12;
    let mut stream = SplitMix64::new(0xC17A);
    let mut embeddings = vec![0.0f32; n * dim];
    for i in 0..n {
        let class = i % 3;
        embeddings[i * dim + class * 4 + i % 4] = 1.0;
        for k in 0..dim {
            embeddings[i * dim + k] += 0.05 * unit_float(&mut stream) as f32;
        }
    }

    let lp_pairs = vec![
        pair(0, 1, true, PairSplit::Train),
        pair(3, 4, true, PairSplit::Train),
        pair(6, 7, true, PairSplit::Train),
        pair(9, 10, true, PairSplit::Train),
        pair(0, 15, false, PairSplit::Train),
        pair(2, 20, false, PairSplit::Train),
        pair(5, 11, false, PairSplit::Train),
        pair(8, 14, false, PairSplit::Train),
        pair(18, 19, true, PairSplit::Test),
        pair(21, 22, true, PairSplit::Test),
        pair(25, 26, true, PairSplit::Test),
        pair(19, 27, false, PairSplit::Test),
        pair(22, 3, false, PairSplit::Test),
        pair(26, 12, false, PairSplit::Test),
    ];

    GraphParts {
        meta: default_meta("cora-mini", &vocab),
        texts,
        labels,
        splits,
        edges,
        embeddings,
        dim,
        lp_pairs,
    }
    .build()
    .expect("citation fixture is valid")
}

fn pair(src: NodeId, dst: NodeId, connected: bool, split: PairSplit) -> PairExample {
    PairExample {
        src,
        dst,
        connected,
        split,
    }
}

fn unit_float(stream: &mut SplitMix64) -> f64 {
    (stream.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

fn random_unit_rows(n: usize, dim: usize, stream: &mut SplitMix64) -> Vec<f32> {
    (0..n * dim)
        .map(|_| (2.0 * unit_float(stream) - 1.0) as f32)
        .map(|v| if v == 0.0 { 0.1 } else { v })
        .collect()
}
