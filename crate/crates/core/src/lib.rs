//! Graph in-context learning over text-attributed graphs.
//!
//! This crate builds the 55 prompt variants that combine anchor-node text,
//! task descriptions, structure-aware neighbor information, and labeled
//! demonstrations, then evaluates them against a chat-completion backend
//! (remote HTTP endpoint or deterministic local mock) on node-classification
//! and link-prediction tasks.
//!
//! Pipeline: [`dataset`] loads a text-attributed graph from disk,
//! [`analytics`] supplies k-hop frontiers / PageRank / cosine scores,
//! [`selection`] picks neighbors and demonstrations under a seeded budget,
//! [`prompt`] renders the final bundles, [`gateway`] dispatches them, and
//! [`eval`] orchestrates runs and aggregates accuracy reports.

pub mod analytics;
pub mod code;
pub mod dataset;
pub mod eval;
pub mod fixtures;
pub mod gateway;
pub mod prompt;
pub mod seed;
pub mod selection;
pub mod template;

pub use analytics::{cosine, edge_embedding, edge_pagerank, khop_frontier, pagerank, PageRankParams, ScoreVector};
pub use code::{enumerate_codes, MethodCode, Strategy};
pub use dataset::{load_dataset, split_members, NodeId, Split, TextAttributedGraph};
pub use eval::{accuracy, extract_label, relative_improvement, run, RunPlan, Task, TrialResult};
pub use gateway::{BackendConfig, Gateway, RawResponse};
pub use prompt::{PromptBundle, Renderer};
pub use selection::SelectionBudget;
pub use template::TemplatePack;
