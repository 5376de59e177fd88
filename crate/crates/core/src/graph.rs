//! Undirected graphs, source-rooted topologies and BFS utilities.

use std::collections::VecDeque;
use std::fmt::Write as _;

use crate::error::{Error, Result};

pub type NodeId = usize;

/// A structural problem found by [`validate_edges`] or [`validate_graph`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    SelfLoop(NodeId),
    DuplicateEdge(NodeId, NodeId),
    BadId { edge: (NodeId, NodeId), n: usize },
    Asymmetric(NodeId, NodeId),
}

/// Simple undirected graph on nodes `0..n`. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<NodeId>>,
    edge_count: usize,
}

/// Lists every invariant violation of a raw edge list.
pub fn validate_edges(n: usize, edges: &[(NodeId, NodeId)]) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for &(u, v) in edges {
        if u >= n || v >= n {
            out.push(Violation::BadId { edge: (u, v), n });
            continue;
        }
        if u == v {
            out.push(Violation::SelfLoop(u));
            continue;
        }
        if !seen.insert((u.min(v), u.max(v))) {
            out.push(Violation::DuplicateEdge(u.min(v), u.max(v)));
        }
    }
    out
}

/// Lists every invariant violation of an adjacency structure.
pub fn validate_adjacency(adj: &[Vec<NodeId>]) -> Vec<Violation> {
    let n = adj.len();
    let mut out = Vec::new();
    for (u, nbrs) in adj.iter().enumerate() {
        let mut seen = std::collections::HashSet::new();
        for &v in nbrs {
            if v >= n {
                out.push(Violation::BadId { edge: (u, v), n });
                continue;
            }
            if v == u {
                out.push(Violation::SelfLoop(u));
                continue;
            }
            if !seen.insert(v) {
                out.push(Violation::DuplicateEdge(u.min(v), u.max(v)));
            }
            if !adj[v].contains(&u) {
                out.push(Violation::Asymmetric(u, v));
            }
        }
    }
    out
}

/// Checks a built graph. Always empty for graphs made through the public constructors.
pub fn validate_graph(graph: &Graph) -> Vec<Violation> {
    validate_adjacency(&graph.adj)
}

impl Graph {
    pub fn from_edges(n: usize, edges: &[(NodeId, NodeId)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGraph("graph needs at least one node".into()));
        }
        let violations = validate_edges(n, edges);
        if !violations.is_empty() {
            return Err(Error::InvalidGraph(format!("{violations:?}")));
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        Ok(Self { adj, edge_count: edges.len() })
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Sorted neighbor list.
    #[inline]
    pub fn neighbors(&self, u: NodeId) -> &[NodeId] {
        &self.adj[u]
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in ascending order.
    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for (u, nbrs) in self.adj.iter().enumerate() {
            out.extend(nbrs.iter().filter(|&&v| v > u).map(|&v| (u, v)));
        }
        out
    }

    pub fn degree(&self, u: NodeId) -> usize {
        self.adj[u].len()
    }
}

/// BFS distances from `source`; `None` for unreachable nodes.
pub fn bfs_distances(graph: &Graph, source: NodeId) -> Vec<Option<u32>> {
    let mut dist = vec![None; graph.node_count()];
    let mut queue = VecDeque::new();
    dist[source] = Some(0);
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        let d = dist[u].unwrap();
        for &v in graph.neighbors(u) {
            if dist[v].is_none() {
                dist[v] = Some(d + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Layer `i` holds the nodes at distance `i` from `source`, sorted by id.
pub fn bfs_layers(graph: &Graph, source: NodeId) -> Result<Vec<Vec<NodeId>>> {
    if source >= graph.node_count() {
        return Err(Error::InvalidGraph(format!("source {source} out of range")));
    }
    let dist = bfs_distances(graph, source);
    let mut layers: Vec<Vec<NodeId>> = Vec::new();
    for (u, d) in dist.iter().enumerate() {
        let d = d.ok_or(Error::Disconnected(u))? as usize;
        if layers.len() <= d {
            layers.resize(d + 1, Vec::new());
        }
        layers[d].push(u);
    }
    Ok(layers)
}

/// A graph with a designated source, connected from that source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    graph: Graph,
    source: NodeId,
    level: Vec<u32>,
    eccentricity: u32,
}

impl Topology {
    pub fn new(graph: Graph, source: NodeId) -> Result<Self> {
        if source >= graph.node_count() {
            return Err(Error::InvalidGraph(format!("source {source} out of range")));
        }
        let dist = bfs_distances(&graph, source);
        let mut level = Vec::with_capacity(dist.len());
        for (u, d) in dist.into_iter().enumerate() {
            level.push(d.ok_or(Error::Disconnected(u))?);
        }
        let eccentricity = level.iter().copied().max().unwrap_or(0);
        Ok(Self { graph, source, level, eccentricity })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn source(&self) -> NodeId {
        self.source
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    /// BFS distance from the source.
    pub fn level(&self, u: NodeId) -> u32 {
        self.level[u]
    }

    pub fn levels(&self) -> &[u32] {
        &self.level
    }

    pub fn bfs_layers(&self) -> Vec<Vec<NodeId>> {
        let mut layers = vec![Vec::new(); self.eccentricity as usize + 1];
        for (u, &l) in self.level.iter().enumerate() {
            layers[l as usize].push(u);
        }
        layers
    }

    /// Source eccentricity, used wherever a diameter bound is needed.
    pub fn eccentricity(&self) -> u32 {
        self.eccentricity
    }

    /// `log2 n`, floored at 1 so that tiny graphs still get positive phase lengths.
    pub fn log2_n(&self) -> f64 {
        (self.node_count() as f64).log2().max(1.0)
    }

    pub fn is_star(&self) -> bool {
        let n = self.node_count();
        n >= 2 && self.graph.degree(self.source) == n - 1 && self.graph.edge_count() == n - 1
    }

    pub fn is_single_link(&self) -> bool {
        self.node_count() == 2 && self.graph.edge_count() == 1
    }

    /// Serializes to the edge-list text format.
    pub fn to_edge_list(&self) -> String {
        let mut s = String::new();
        writeln!(s, "n {} s {}", self.node_count(), self.source).unwrap();
        for (u, v) in self.graph.edges() {
            writeln!(s, "{u} {v}").unwrap();
        }
        s
    }

    /// Parses the edge-list text format. `#` starts a comment.
    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut header: Option<(usize, NodeId)> = None;
        let mut edges = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let parse = |t: &str| {
                t.parse::<usize>()
                    .map_err(|e| Error::Parse { line: i + 1, msg: format!("{t:?}: {e}") })
            };
            if header.is_none() {
                if toks.len() != 4 || toks[0] != "n" || toks[2] != "s" {
                    return Err(Error::Parse { line: i + 1, msg: "expected `n <count> s <source>`".into() });
                }
                header = Some((parse(toks[1])?, parse(toks[3])?));
                continue;
            }
            if toks.len() != 2 {
                return Err(Error::Parse { line: i + 1, msg: "expected `u v`".into() });
            }
            edges.push((parse(toks[0])?, parse(toks[1])?));
        }
        let (n, s) = header.ok_or(Error::Parse { line: 0, msg: "missing header".into() })?;
        Topology::new(Graph::from_edges(n, &edges)?, s)
    }
}

/// Convenience: layers for a topology, erroring on disconnected input.
pub fn eccentricity(graph: &Graph, source: NodeId) -> Result<u32> {
    Ok(bfs_layers(graph, source)?.len() as u32 - 1)
}
