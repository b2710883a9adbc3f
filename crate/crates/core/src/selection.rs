//! Neighbor and demonstration selection.
//!
//! Given an anchor, a strategy, and a budget, these functions pick which
//! neighbor texts and which labeled demonstrations a prompt will carry.
//! Every choice is a pure function of `(graph, anchor, seed)`:
//!
//! - Random draws use a partial Fisher-Yates over the ascending-sorted
//!   candidate pool, driven by a per-decision splitmix64 stream.
//! - PageRank ranks by global score, Similarity by cosine against the
//!   anchor embedding (edge embedding for pairs); all ties break toward
//!   the lower node id (lower pair index for pairs).

use std::collections::BTreeSet;

use thiserror::Error;

use crate::analytics::{self, cosine, cosine_f32, khop_frontier, AnalyticsError, ScoreVector};
use crate::code::{DemoScope, Hop, Strategy};
use crate::dataset::{NodeId, PairSplit, Split, TextAttributedGraph};
use crate::seed::{decision_stream, partial_shuffle, Purpose, SplitMix64};

#[derive(Debug, Error)]
pub enum SelectionError {
    #[error(transparent)]
    Analytics(#[from] AnalyticsError),
    #[error("strategy PageRank requires precomputed scores")]
    MissingPageRank,
    #[error("link-prediction demonstrations requested but the dataset has no pairs.jsonl; \
             add train pairs to the dataset directory")]
    MissingPairs,
}

/// Caps on how much selected content a prompt may carry.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct SelectionBudget {
    pub max_neighbors: usize,
    pub max_demos: usize,
}

impl SelectionBudget {
    /// Node classification: up to six neighbors and six demonstrations.
    pub fn nc_default() -> Self {
        Self {
            max_neighbors: 6,
            max_demos: 6,
        }
    }

    /// Link prediction: up to six neighbors, three demonstrations.
    pub fn lp_default() -> Self {
        Self {
            max_neighbors: 6,
            max_demos: 3,
        }
    }
}

/// Identifies the anchor a selection decision is about, for seed
/// derivation.
#[derive(Debug, Clone, Copy)]
pub struct SeedCtx {
    pub global_seed: u64,
    pub anchor_key: u64,
}

impl SeedCtx {
    pub fn node(global_seed: u64, anchor: NodeId) -> Self {
        Self {
            global_seed,
            anchor_key: crate::seed::node_key(anchor),
        }
    }

    pub fn pair(global_seed: u64, src: NodeId, dst: NodeId) -> Self {
        Self {
            global_seed,
            anchor_key: crate::seed::pair_key(src, dst),
        }
    }

    fn stream(&self, purpose: Purpose) -> SplitMix64 {
        decision_stream(self.global_seed, self.anchor_key, purpose)
    }
}

/// A selected neighbor; the label is present only in primed (labeled)
/// mode, and only train-split neighbors enter that pool.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectedNode {
    pub id: NodeId,
    pub label: Option<String>,
}

/// Structure-aware neighbors for one anchor.
#[derive(Debug, Clone)]
pub struct NeighborSelection {
    pub hop: Hop,
    pub labeled: bool,
    pub items: Vec<SelectedNode>,
}

/// Labeled node demonstrations for classification prompts.
#[derive(Debug, Clone)]
pub struct DemonstrationSet {
    pub scope: DemoScope,
    pub items: Vec<SelectedNode>,
    /// Classes whose train pool was empty (class-aware scope only).
    pub skipped_classes: Vec<String>,
}

/// Pair demonstrations for link-prediction prompts.
#[derive(Debug, Clone)]
pub struct EdgeDemoSet {
    pub class_aware: bool,
    /// Indices into the dataset's `lp_pairs`.
    pub items: Vec<usize>,
    pub missing_connected: bool,
    pub missing_disconnected: bool,
}

fn rank_desc<F: Fn(NodeId) -> f64>(pool: &[NodeId], m: usize, score: F) -> Vec<NodeId> {
    let mut scored: Vec<(NodeId, f64)> = pool.iter().map(|&id| (id, score(id))).collect();
    scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    scored.truncate(m);
    scored.into_iter().map(|(id, _)| id).collect()
}

fn pick_nodes(
    pool: &[NodeId],
    m: usize,
    strategy: Strategy,
    g: &TextAttributedGraph,
    anchor_embedding: &[f32],
    pagerank: Option<&ScoreVector>,
    stream: &mut SplitMix64,
) -> Result<Vec<NodeId>, SelectionError> {
    if pool.is_empty() || m == 0 {
        return Ok(Vec::new());
    }
    Ok(match strategy {
        Strategy::Random => partial_shuffle(pool, m, stream),
        Strategy::PageRank => {
            let scores = pagerank.ok_or(SelectionError::MissingPageRank)?;
            rank_desc(pool, m, |id| scores.score(id))
        }
        Strategy::Similarity => {
            rank_desc(pool, m, |id| cosine_f32(anchor_embedding, g.embedding(id)).value)
        }
    })
}

/// Pick up to `budget.max_neighbors` nodes from the anchor's exact-`hop`
/// frontier. With `labeled` set (primed codes) the pool shrinks to
/// train-split members and their gold labels ride along.
#[allow(clippy::too_many_arguments)]
pub fn select_neighbors(
    g: &TextAttributedGraph,
    anchor: NodeId,
    hop: Hop,
    strategy: Strategy,
    budget: &SelectionBudget,
    seeds: &SeedCtx,
    labeled: bool,
    pagerank: Option<&ScoreVector>,
) -> Result<NeighborSelection, SelectionError> {
    let mut pool = khop_frontier(g, anchor, hop.value())?;
    if labeled {
        pool.retain(|&id| g.split(id) == Split::Train);
    }
    let mut stream = seeds.stream(Purpose::Neighbors);
    let chosen = pick_nodes(
        &pool,
        budget.max_neighbors,
        strategy,
        g,
        g.embedding(anchor),
        pagerank,
        &mut stream,
    )?;
    Ok(NeighborSelection {
        hop,
        labeled,
        items: chosen
            .into_iter()
            .map(|id| SelectedNode {
                id,
                label: labeled.then(|| g.label(id).expect("train node is labeled").to_string()),
            })
            .collect(),
    })
}

fn train_pool(g: &TextAttributedGraph, exclusions: &BTreeSet<NodeId>, anchor: NodeId) -> Vec<NodeId> {
    (0..g.node_count())
        .filter(|&id| g.split(id) == Split::Train && id != anchor && !exclusions.contains(&id))
        .collect()
}

/// Up to `budget.max_demos` labeled train nodes, chosen by strategy over
/// the whole training set. Similarity ranks against the anchor embedding.
pub fn select_demos_global(
    g: &TextAttributedGraph,
    strategy: Strategy,
    budget: &SelectionBudget,
    seeds: &SeedCtx,
    exclusions: &BTreeSet<NodeId>,
    anchor: NodeId,
    pagerank: Option<&ScoreVector>,
) -> Result<DemonstrationSet, SelectionError> {
    let pool = train_pool(g, exclusions, anchor);
    let mut stream = seeds.stream(Purpose::Demonstrations);
    let chosen = pick_nodes(
        &pool,
        budget.max_demos,
        strategy,
        g,
        g.embedding(anchor),
        pagerank,
        &mut stream,
    )?;
    Ok(DemonstrationSet {
        scope: DemoScope::Global,
        items: chosen
            .into_iter()
            .map(|id| SelectedNode {
                id,
                label: Some(g.label(id).expect("train node is labeled").to_string()),
            })
            .collect(),
        skipped_classes: Vec::new(),
    })
}

/// One demonstration per class, in label-vocabulary order. Classes whose
/// train pool is empty after exclusions are skipped and recorded.
///
/// The per-class cap is deliberately not bounded by `max_demos`: datasets
/// with more classes than the budget still emit one per class.
pub fn select_demos_class_aware(
    g: &TextAttributedGraph,
    strategy: Strategy,
    seeds: &SeedCtx,
    exclusions: &BTreeSet<NodeId>,
    anchor: NodeId,
    pagerank: Option<&ScoreVector>,
) -> Result<DemonstrationSet, SelectionError> {
    let pool = train_pool(g, exclusions, anchor);
    let mut stream = seeds.stream(Purpose::Demonstrations);
    let mut items = Vec::new();
    let mut skipped = Vec::new();
    for (class_idx, class) in g.label_vocabulary().iter().enumerate() {
        let class_pool: Vec<NodeId> = pool
            .iter()
            .copied()
            .filter(|&id| g.label_index(id) == Some(class_idx))
            .collect();
        if class_pool.is_empty() {
            skipped.push(class.clone());
            continue;
        }
        let chosen = pick_nodes(
            &class_pool,
            1,
            strategy,
            g,
            g.embedding(anchor),
            pagerank,
            &mut stream,
        )?;
        items.push(SelectedNode {
            id: chosen[0],
            label: Some(class.clone()),
        });
    }
    Ok(DemonstrationSet {
        scope: DemoScope::ClassAware,
        items,
        skipped_classes: skipped,
    })
}

/// Pair demonstrations for link prediction, drawn from the train pairs.
///
/// PageRank ranks candidates by the mean endpoint score of the pair;
/// Similarity ranks by cosine between the anchor pair's edge embedding and
/// the candidate's. Class-aware mode returns one connected and one
/// disconnected example (connected first); otherwise up to
/// `budget.max_demos` pairs.
pub fn select_edge_demos(
    g: &TextAttributedGraph,
    strategy: Strategy,
    budget: &SelectionBudget,
    seeds: &SeedCtx,
    class_aware: bool,
    anchor_pair: (NodeId, NodeId),
    pagerank: Option<&ScoreVector>,
) -> Result<EdgeDemoSet, SelectionError> {
    if !g.has_lp_pairs() {
        return Err(SelectionError::MissingPairs);
    }
    let anchor_key = (
        anchor_pair.0.min(anchor_pair.1),
        anchor_pair.0.max(anchor_pair.1),
    );
    let pool: Vec<usize> = g
        .lp_pairs()
        .iter()
        .enumerate()
        .filter(|(_, p)| p.split == PairSplit::Train)
        .filter(|(_, p)| (p.src.min(p.dst), p.src.max(p.dst)) != anchor_key)
        .map(|(i, _)| i)
        .collect();

    let anchor_embedding = analytics::edge_embedding(g, anchor_pair)?;
    let score_of = |i: usize| -> Result<f64, SelectionError> {
        let p = g.lp_pairs()[i];
        Ok(match strategy {
            Strategy::Random => 0.0,
            Strategy::PageRank => {
                let scores = pagerank.ok_or(SelectionError::MissingPageRank)?;
                analytics::edge_pagerank(scores, (p.src, p.dst))?
            }
            Strategy::Similarity => {
                let candidate = analytics::edge_embedding(g, (p.src, p.dst))?;
                cosine(&anchor_embedding, &candidate).value
            }
        })
    };

    let mut stream = seeds.stream(Purpose::Demonstrations);
    let mut pick = |subset: &[usize], m: usize| -> Result<Vec<usize>, SelectionError> {
        if subset.is_empty() || m == 0 {
            return Ok(Vec::new());
        }
        if strategy == Strategy::Random {
            return Ok(partial_shuffle(subset, m, &mut stream));
        }
        let mut scored = Vec::with_capacity(subset.len());
        for &i in subset {
            scored.push((i, score_of(i)?));
        }
        scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
        scored.truncate(m);
        Ok(scored.into_iter().map(|(i, _)| i).collect())
    };

    if class_aware {
        let connected: Vec<usize> = pool
            .iter()
            .copied()
            .filter(|&i| g.lp_pairs()[i].connected)
            .collect();
        let disconnected: Vec<usize> = pool
            .iter()
            .copied()
            .filter(|&i| !g.lp_pairs()[i].connected)
            .collect();
        let mut items = pick(&connected, 1)?;
        items.extend(pick(&disconnected, 1)?);
        Ok(EdgeDemoSet {
            class_aware: true,
            items,
            missing_connected: connected.is_empty(),
            missing_disconnected: disconnected.is_empty(),
        })
    } else {
        let items = pick(&pool, budget.max_demos)?;
        Ok(EdgeDemoSet {
            class_aware: false,
            items,
            missing_connected: false,
            missing_disconnected: false,
        })
    }
}
