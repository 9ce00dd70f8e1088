//! Directed multimodal interaction graph of User and Tweet nodes.
//!
//! A tweet by `@A` whose text mentions `@B` and `@C` contributes:
//!
//! ```text
//! User(A) --Authored--> Tweet(T)
//! User(A) --Mentions--> User(B), User(C)
//! Tweet(T) --Mentions--> User(B), User(C)
//! ```
//!
//! Repeated `(source, target, kind)` triples aggregate into the edge weight.
//! Nodes and edges live in ordered maps so iteration order, and everything
//! derived from it, is deterministic.

use alloc::collections::BTreeMap;
use alloc::string::String;
use core::fmt;

use crate::text::fold_handle;
use crate::tweet::CleanTweet;

/// Display characters kept in tweet-node labels.
pub const TWEET_LABEL_CHARS: usize = 120;

/// Node type. `Tweet` sorts before `User`, matching the lexicographic order
/// of the `tweet:`/`user:` string ids used in exports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeKind {
    Tweet,
    User,
}

impl NodeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::Tweet => "tweet",
            NodeKind::User => "user",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "tweet" => Some(NodeKind::Tweet),
            "user" => Some(NodeKind::User),
            _ => None,
        }
    }
}

/// Identity of a node: its kind plus a case-folded handle or a tweet id.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeKey {
    pub kind: NodeKind,
    pub id: String,
}

impl NodeKey {
    pub fn user(handle: &str) -> Self {
        NodeKey { kind: NodeKind::User, id: fold_handle(handle) }
    }

    pub fn tweet(tweet_id: &str) -> Self {
        NodeKey { kind: NodeKind::Tweet, id: String::from(tweet_id) }
    }

    /// Parses the `kind:id` form produced by `Display`.
    pub fn parse(s: &str) -> Option<Self> {
        let (kind, id) = s.split_once(':')?;
        Some(NodeKey { kind: NodeKind::parse(kind)?, id: String::from(id) })
    }
}

impl fmt::Display for NodeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.kind.as_str(), self.id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeData {
    /// Original-case handle for users, cleaned (truncated) text for tweets.
    pub label: String,
    /// Only ever set on Tweet nodes.
    pub is_retweet: bool,
    in_degree: usize,
    out_degree: usize,
}

impl NodeData {
    /// Number of distinct incoming edges.
    pub fn in_degree(&self) -> usize {
        self.in_degree
    }

    /// Number of distinct outgoing edges.
    pub fn out_degree(&self) -> usize {
        self.out_degree
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeKind {
    Authored,
    Mentions,
}

impl EdgeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeKind::Authored => "authored",
            EdgeKind::Mentions => "mentions",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "authored" => Some(EdgeKind::Authored),
            "mentions" => Some(EdgeKind::Mentions),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeKey {
    pub source: NodeKey,
    pub target: NodeKey,
    pub kind: EdgeKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeData {
    pub weight: u64,
    /// Earliest `created_at` of the tweets that produced this edge.
    pub first_seen: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("tweet {tweet_id} already authored by another user than {author}")]
    DuplicateTweetId { tweet_id: String, author: String },
    #[error("edge endpoint {0} is not a node")]
    MissingEndpoint(NodeKey),
    #[error("self-loop on {0}")]
    SelfLoop(NodeKey),
    #[error("{kind:?} edge cannot join {source_kind:?} to {target_kind:?}")]
    InvalidEdgeKind { kind: EdgeKind, source_kind: NodeKind, target_kind: NodeKind },
    #[error("edge weight must be at least 1")]
    ZeroWeight,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MultimodalGraph {
    nodes: BTreeMap<NodeKey, NodeData>,
    edges: BTreeMap<EdgeKey, EdgeData>,
}

impl MultimodalGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = (&NodeKey, &NodeData)> {
        self.nodes.iter()
    }

    pub fn edges(&self) -> impl ExactSizeIterator<Item = (&EdgeKey, &EdgeData)> {
        self.edges.iter()
    }

    pub fn node(&self, key: &NodeKey) -> Option<&NodeData> {
        self.nodes.get(key)
    }

    pub fn edge(&self, source: &NodeKey, target: &NodeKey, kind: EdgeKind) -> Option<&EdgeData> {
        self.edges.get(&EdgeKey { source: source.clone(), target: target.clone(), kind })
    }

    pub fn contains_node(&self, key: &NodeKey) -> bool {
        self.nodes.contains_key(key)
    }

    pub fn in_degree(&self, key: &NodeKey) -> Option<usize> {
        self.nodes.get(key).map(|n| n.in_degree)
    }

    pub fn out_degree(&self, key: &NodeKey) -> Option<usize> {
        self.nodes.get(key).map(|n| n.out_degree)
    }

    /// Inserts a node or merges into an existing one.
    ///
    /// Merging keeps the lexicographically smallest label and ORs the retweet
    /// flag, so the outcome does not depend on insertion order.
    pub fn upsert_node(&mut self, key: NodeKey, label: &str, is_retweet: bool) {
        match self.nodes.get_mut(&key) {
            Some(node) => {
                if label < node.label.as_str() {
                    node.label = String::from(label);
                }
                node.is_retweet |= is_retweet;
            }
            None => {
                self.nodes.insert(key, NodeData { label: String::from(label), is_retweet, in_degree: 0, out_degree: 0 });
            }
        }
    }

    /// Adds `weight` to the `(source, target, kind)` edge, creating it if
    /// needed. Both endpoints must already exist.
    pub fn add_edge(&mut self, source: &NodeKey, target: &NodeKey, kind: EdgeKind, weight: u64, first_seen: i64) -> Result<(), GraphError> {
        if weight == 0 {
            return Err(GraphError::ZeroWeight);
        }
        if source == target {
            return Err(GraphError::SelfLoop(source.clone()));
        }
        for end in [source, target] {
            if !self.nodes.contains_key(end) {
                return Err(GraphError::MissingEndpoint(end.clone()));
            }
        }
        let valid = match kind {
            EdgeKind::Authored => source.kind == NodeKind::User && target.kind == NodeKind::Tweet,
            EdgeKind::Mentions => target.kind == NodeKind::User,
        };
        if !valid {
            return Err(GraphError::InvalidEdgeKind { kind, source_kind: source.kind, target_kind: target.kind });
        }
        let key = EdgeKey { source: source.clone(), target: target.clone(), kind };
        match self.edges.get_mut(&key) {
            Some(edge) => {
                edge.weight += weight;
                edge.first_seen = edge.first_seen.min(first_seen);
            }
            None => {
                self.edges.insert(key, EdgeData { weight, first_seen });
                if let Some(n) = self.nodes.get_mut(source) {
                    n.out_degree += 1;
                }
                if let Some(n) = self.nodes.get_mut(target) {
                    n.in_degree += 1;
                }
            }
        }
        Ok(())
    }

    /// Applies the User/Tweet mapping for one cleaned tweet.
    ///
    /// Mentions of the author (in any casing) and repeated mentions within the
    /// tweet are ignored. Re-adding a tweet by the same author increments the
    /// existing weights; a tweet id seen with a different author is rejected
    /// before the graph is touched.
    pub fn add_tweet(&mut self, tweet: &CleanTweet) -> Result<(), GraphError> {
        let author_handle = tweet.author_handle().trim_start_matches('@');
        let author = NodeKey::user(author_handle);
        let node = NodeKey::tweet(tweet.tweet_id());
        if self.nodes.contains_key(&node) && self.edge(&author, &node, EdgeKind::Authored).is_none() {
            return Err(GraphError::DuplicateTweetId { tweet_id: node.id, author: String::from(author_handle) });
        }
        let at = tweet.created_at();
        self.upsert_node(author.clone(), author_handle, false);
        self.upsert_node(node.clone(), &tweet.label(), tweet.is_retweet);
        self.add_edge(&author, &node, EdgeKind::Authored, 1, at)?;

        let mut seen = alloc::vec::Vec::with_capacity(tweet.mentions.len());
        for handle in &tweet.mentions {
            let mentioned = NodeKey::user(handle);
            if mentioned == author || seen.contains(&mentioned) {
                continue;
            }
            self.upsert_node(mentioned.clone(), handle, false);
            self.add_edge(&author, &mentioned, EdgeKind::Mentions, 1, at)?;
            self.add_edge(&node, &mentioned, EdgeKind::Mentions, 1, at)?;
            seen.push(mentioned);
        }
        Ok(())
    }

    /// Folds `other` into `self`: node union, weights summed on matching
    /// edges, earliest `first_seen` kept.
    pub fn merge(&mut self, other: &MultimodalGraph) {
        for (key, node) in &other.nodes {
            self.upsert_node(key.clone(), &node.label, node.is_retweet);
        }
        for (key, edge) in &other.edges {
            // Endpoints were inserted above and `other` only holds valid edges.
            self.add_edge(&key.source, &key.target, key.kind, edge.weight, edge.first_seen)
                .expect("edges of a valid graph stay valid after merge");
        }
    }

    /// The subgraph induced by the nodes for which `keep` returns true.
    pub fn induced(&self, mut keep: impl FnMut(&NodeKey, &NodeData) -> bool) -> MultimodalGraph {
        let mut out = MultimodalGraph::new();
        for (key, node) in &self.nodes {
            if keep(key, node) {
                out.nodes.insert(key.clone(), NodeData { in_degree: 0, out_degree: 0, ..node.clone() });
            }
        }
        for (key, edge) in &self.edges {
            if out.nodes.contains_key(&key.source) && out.nodes.contains_key(&key.target) {
                out.edges.insert(key.clone(), *edge);
                if let Some(n) = out.nodes.get_mut(&key.source) {
                    n.out_degree += 1;
                }
                if let Some(n) = out.nodes.get_mut(&key.target) {
                    n.in_degree += 1;
                }
            }
        }
        out
    }
}

/// Union of two graphs; see [`MultimodalGraph::merge`].
pub fn merge_graphs(a: &MultimodalGraph, b: &MultimodalGraph) -> MultimodalGraph {
    let mut out = a.clone();
    out.merge(b);
    out
}
