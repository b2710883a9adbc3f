//! Pure graph and vector computations: exact-distance k-hop frontiers,
//! PageRank over the undirected adjacency, cosine similarity, and the
//! edge-level score rules used by link prediction.
//!
//! All score arithmetic runs in f64 even though embeddings are stored as
//! f32; convergence checks need the headroom.

use std::collections::VecDeque;

use serde::Serialize;
use thiserror::Error;

use crate::dataset::{NodeId, TextAttributedGraph};

#[derive(Debug, Error)]
pub enum AnalyticsError {
    #[error("invalid node id {id} (node count {count})")]
    InvalidNode { id: usize, count: usize },
    #[error("hop must be 1 or 2, got {0}")]
    InvalidHop(u8),
    #[error("damping must lie in (0,1), got {0}")]
    InvalidDamping(f64),
    #[error("max_iterations must be at least 1")]
    ZeroIterations,
}

/// Power-iteration parameters. The damped random-surfer model with
/// uniform dangling-mass redistribution and uniform initialization.
#[derive(Debug, Clone, Copy)]
pub struct PageRankParams {
    pub damping: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for PageRankParams {
    fn default() -> Self {
        Self {
            damping: 0.85,
            tolerance: 1e-8,
            max_iterations: 100,
        }
    }
}

impl PageRankParams {
    pub fn validate(&self) -> Result<(), AnalyticsError> {
        if !(self.damping > 0.0 && self.damping < 1.0) {
            return Err(AnalyticsError::InvalidDamping(self.damping));
        }
        if self.max_iterations == 0 {
            return Err(AnalyticsError::ZeroIterations);
        }
        Ok(())
    }
}

/// Converged (or best-effort) PageRank scores; sums to 1 within 1e-6.
#[derive(Debug, Clone, Serialize)]
pub struct ScoreVector {
    pub converged: bool,
    pub iterations: usize,
    pub scores: Vec<f64>,
}

impl ScoreVector {
    pub fn score(&self, id: NodeId) -> f64 {
        self.scores[id]
    }
}

/// Node ids at shortest-path distance exactly `k` from `anchor`, ascending.
/// The anchor is excluded; for k = 2 the 1-hop nodes are excluded too.
pub fn khop_frontier(
    g: &TextAttributedGraph,
    anchor: NodeId,
    k: u8,
) -> Result<Vec<NodeId>, AnalyticsError> {
    if !g.is_valid_node(anchor) {
        return Err(AnalyticsError::InvalidNode {
            id: anchor,
            count: g.node_count(),
        });
    }
    if !(1..=2).contains(&k) {
        return Err(AnalyticsError::InvalidHop(k));
    }

    let mut dist = vec![u8::MAX; g.node_count()];
    dist[anchor] = 0;
    let mut queue = VecDeque::from([anchor]);
    let mut frontier = Vec::new();
    while let Some(u) = queue.pop_front() {
        if dist[u] == k {
            continue;
        }
        for &v in g.neighbors(u) {
            if dist[v] == u8::MAX {
                dist[v] = dist[u] + 1;
                if dist[v] == k {
                    frontier.push(v);
                } else {
                    queue.push_back(v);
                }
            }
        }
    }
    frontier.sort_unstable();
    Ok(frontier)
}

/// PageRank by power iteration on the undirected adjacency. Dangling
/// (isolated) nodes redistribute their mass uniformly. Non-convergence
/// within `max_iterations` is flagged, not fatal.
pub fn pagerank(g: &TextAttributedGraph, params: &PageRankParams) -> Result<ScoreVector, AnalyticsError> {
    params.validate()?;
    let n = g.node_count();
    if n == 0 {
        return Ok(ScoreVector {
            converged: true,
            iterations: 0,
            scores: Vec::new(),
        });
    }

    let d = params.damping;
    let uniform = 1.0 / n as f64;
    let mut scores = vec![uniform; n];
    let mut next = vec![0.0; n];

    for iteration in 1..=params.max_iterations {
        let dangling_mass: f64 = (0..n)
            .filter(|&i| g.neighbors(i).is_empty())
            .map(|i| scores[i])
            .sum();
        let base = (1.0 - d) * uniform + d * dangling_mass * uniform;
        next.iter_mut().for_each(|v| *v = base);
        for (u, &score) in scores.iter().enumerate() {
            let degree = g.neighbors(u).len();
            if degree == 0 {
                continue;
            }
            let share = d * score / degree as f64;
            for &v in g.neighbors(u) {
                next[v] += share;
            }
        }
        let delta: f64 = scores.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut scores, &mut next);
        if delta <= params.tolerance {
            return Ok(ScoreVector {
                converged: true,
                iterations: iteration,
                scores,
            });
        }
    }
    Ok(ScoreVector {
        converged: false,
        iterations: params.max_iterations,
        scores,
    })
}

/// Cosine similarity with a degenerate-input flag: a zero-norm operand
/// yields similarity 0 rather than NaN.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Similarity {
    pub value: f64,
    pub zero_norm: bool,
}

pub fn cosine(a: &[f64], b: &[f64]) -> Similarity {
    assert_eq!(a.len(), b.len(), "cosine requires equal dimensions");
    cosine_terms(a.iter().zip(b).map(|(&x, &y)| (x, y)))
}

/// Cosine over raw f32 embedding rows, accumulated in f64.
pub fn cosine_f32(a: &[f32], b: &[f32]) -> Similarity {
    assert_eq!(a.len(), b.len(), "cosine requires equal dimensions");
    cosine_terms(a.iter().zip(b).map(|(&x, &y)| (x as f64, y as f64)))
}

fn cosine_terms(pairs: impl Iterator<Item = (f64, f64)>) -> Similarity {
    let (mut dot, mut na, mut nb) = (0.0, 0.0, 0.0);
    for (x, y) in pairs {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return Similarity {
            value: 0.0,
            zero_norm: true,
        };
    }
    Similarity {
        value: dot / (na.sqrt() * nb.sqrt()),
        zero_norm: false,
    }
}

/// The PageRank score of an edge: the mean of its endpoint scores.
pub fn edge_pagerank(scores: &ScoreVector, e: (NodeId, NodeId)) -> Result<f64, AnalyticsError> {
    let n = scores.scores.len();
    for id in [e.0, e.1] {
        if id >= n {
            return Err(AnalyticsError::InvalidNode { id, count: n });
        }
    }
    Ok((scores.scores[e.0] + scores.scores[e.1]) / 2.0)
}

/// The embedding of an edge: the element-wise mean of its endpoint rows.
pub fn edge_embedding(g: &TextAttributedGraph, e: (NodeId, NodeId)) -> Result<Vec<f64>, AnalyticsError> {
    for id in [e.0, e.1] {
        if !g.is_valid_node(id) {
            return Err(AnalyticsError::InvalidNode {
                id,
                count: g.node_count(),
            });
        }
    }
    Ok(g.embedding(e.0)
        .iter()
        .zip(g.embedding(e.1))
        .map(|(&a, &b)| (a as f64 + b as f64) / 2.0)
        .collect())
}

#[cfg(test)]
pub(crate) mod oracles {
    //! Independent reference implementations used only by tests.

    use super::*;

    /// BFS distances from `anchor`; `None` for unreachable nodes.
    pub fn bfs_distances(g: &TextAttributedGraph, anchor: NodeId) -> Vec<Option<usize>> {
        let mut dist = vec![None; g.node_count()];
        dist[anchor] = Some(0);
        let mut queue = VecDeque::from([anchor]);
        while let Some(u) = queue.pop_front() {
            for &v in g.neighbors(u) {
                if dist[v].is_none() {
                    dist[v] = Some(dist[u].unwrap() + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Dense power iteration on the full transition matrix.
    pub fn dense_pagerank(g: &TextAttributedGraph, params: &PageRankParams) -> Vec<f64> {
        let n = g.node_count();
        let mut transition = vec![vec![0.0f64; n]; n];
        for (u, row) in transition.iter_mut().enumerate() {
            let degree = g.neighbors(u).len();
            if degree == 0 {
                row.iter_mut().for_each(|t| *t = 1.0 / n as f64);
            } else {
                for &v in g.neighbors(u) {
                    row[v] = 1.0 / degree as f64;
                }
            }
        }
        let d = params.damping;
        let mut x = vec![1.0 / n as f64; n];
        for _ in 0..params.max_iterations {
            let mut next = vec![(1.0 - d) / n as f64; n];
            for u in 0..n {
                for v in 0..n {
                    next[v] += d * x[u] * transition[u][v];
                }
            }
            let delta: f64 = x.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
            x = next;
            if delta <= params.tolerance {
                break;
            }
        }
        x
    }
}
