//! Topology generators.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{bfs_distances, Graph, NodeId, Topology};
use crate::rng::{Coins, Purpose};

const RETRIES: u64 = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum TopologySpec {
    SingleLink,
    /// Source plus `n` leaves.
    Star { n: usize },
    /// `d` edges.
    Path { d: usize },
    Layered { d: usize, width: usize },
    BinaryTree { depth: usize },
    RandomConnected { n: usize, edge_prob: f64, seed: u64 },
    Wct {
        cluster_count: usize,
        cluster_size: usize,
        sender_count: usize,
        link_prob: f64,
        seed: u64,
        /// Density classes; `None` for `ceil(log2 sender_count)`.
        #[serde(default)]
        scales: Option<u32>,
    },
    /// Path of `d` edges with a complete binary tree of depth `gadget_depth`
    /// hung off the source, plus `pad` extra source leaves.
    RankedPath {
        d: usize,
        gadget_depth: usize,
        #[serde(default)]
        pad: usize,
    },
}

impl TopologySpec {
    /// WCT with `ceil(sqrt n)` senders and clusters, sized to about `n` nodes.
    pub fn wct_for(n: usize, seed: u64) -> Self {
        let s = (n as f64).sqrt().ceil() as usize;
        let size = (n.saturating_sub(1 + s) / s).max(1);
        TopologySpec::Wct { cluster_count: s, cluster_size: size, sender_count: s, link_prob: 0.5, seed, scales: None }
    }
}

#[derive(Debug, Clone)]
pub struct Generated {
    pub topology: Topology,
    /// WCT only: member ids per cluster.
    pub clusters: Option<Vec<Vec<NodeId>>>,
}

pub fn generate(spec: &TopologySpec) -> Result<Generated> {
    let topology = match *spec {
        TopologySpec::SingleLink => make_single_link(),
        TopologySpec::Star { n } => make_star(n)?,
        TopologySpec::Path { d } => make_path(d)?,
        TopologySpec::Layered { d, width } => make_layered(d, width)?,
        TopologySpec::BinaryTree { depth } => make_binary_tree(depth)?,
        TopologySpec::RandomConnected { n, edge_prob, seed } => make_random_connected(n, edge_prob, seed)?,
        TopologySpec::Wct { cluster_count, cluster_size, sender_count, link_prob, seed, scales } => {
            let w = make_wct(cluster_count, cluster_size, sender_count, link_prob, seed, scales)?;
            return Ok(Generated { topology: w.topology, clusters: Some(w.clusters) });
        }
        TopologySpec::RankedPath { d, gadget_depth, pad } => make_ranked_path(d, gadget_depth, pad)?,
    };
    Ok(Generated { topology, clusters: None })
}

fn positive(name: &str, v: usize) -> Result<()> {
    if v == 0 {
        return Err(Error::Generation(format!("{name} must be positive")));
    }
    Ok(())
}

fn build(n: usize, edges: &[(NodeId, NodeId)]) -> Result<Topology> {
    Topology::new(Graph::from_edges(n, edges)?, 0)
}

pub fn make_single_link() -> Topology {
    build(2, &[(0, 1)]).expect("single link")
}

pub fn make_star(n: usize) -> Result<Topology> {
    positive("star size", n)?;
    let e: Vec<_> = (1..=n).map(|v| (0, v)).collect();
    build(n + 1, &e)
}

pub fn make_path(d: usize) -> Result<Topology> {
    positive("path length", d)?;
    let e: Vec<_> = (0..d).map(|v| (v, v + 1)).collect();
    build(d + 1, &e)
}

/// Source, then `d` layers of `width` nodes, consecutive layers complete bipartite.
pub fn make_layered(d: usize, width: usize) -> Result<Topology> {
    positive("layer count", d)?;
    positive("layer width", width)?;
    let mut e = Vec::new();
    for v in 1..=width {
        e.push((0, v));
    }
    for l in 1..d {
        let (a, b) = (1 + (l - 1) * width, 1 + l * width);
        for u in a..a + width {
            for v in b..b + width {
                e.push((u, v));
            }
        }
    }
    build(1 + d * width, &e)
}

/// Complete binary tree, heap order, root 0.
pub fn make_binary_tree(depth: usize) -> Result<Topology> {
    positive("tree depth", depth)?;
    if depth > 30 {
        return Err(Error::Generation("tree depth too large".into()));
    }
    let n = (1usize << (depth + 1)) - 1;
    let e: Vec<_> = (1..n).map(|v| ((v - 1) / 2, v)).collect();
    build(n, &e)
}

pub fn make_ranked_path(d: usize, gadget_depth: usize, pad: usize) -> Result<Topology> {
    positive("path length", d)?;
    if gadget_depth > 30 {
        return Err(Error::Generation("gadget depth too large".into()));
    }
    let mut e: Vec<_> = (0..d).map(|v| (v, v + 1)).collect();
    let mut next = d + 1;
    if gadget_depth > 0 {
        let size = (1usize << (gadget_depth + 1)) - 1;
        e.push((0, next));
        for i in 1..size {
            e.push((next + (i - 1) / 2, next + i));
        }
        next += size;
    }
    e.extend((next..next + pad).map(|v| (0, v)));
    build(next + pad, &e)
}

/// Ranked path padded to exactly `n` nodes, or `None` if the path and gadget do not fit.
pub fn ranked_path_spec(n: usize, d: usize, gadget_depth: usize) -> Option<TopologySpec> {
    let used = d + 1 + if gadget_depth > 0 { (1usize << (gadget_depth + 1)) - 1 } else { 0 };
    (used <= n).then(|| TopologySpec::RankedPath { d, gadget_depth, pad: n - used })
}

/// Erdős–Rényi `G(n, edge_prob)` redrawn until connected.
pub fn make_random_connected(n: usize, edge_prob: f64, seed: u64) -> Result<Topology> {
    positive("node count", n)?;
    if !(edge_prob > 0.0 && edge_prob <= 1.0) {
        return Err(Error::Generation(format!("edge_prob must be in (0, 1], got {edge_prob}")));
    }
    let coins = Coins::new(seed);
    for attempt in 0..RETRIES {
        let mut s = coins.derive(attempt).stream(0, Purpose::Topology);
        let mut e = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if s.bernoulli(edge_prob) {
                    e.push((u, v));
                }
            }
        }
        let g = Graph::from_edges(n, &e)?;
        if bfs_distances(&g, 0).iter().all(|d| d.is_some()) {
            return Topology::new(g, 0);
        }
    }
    Err(Error::Generation(format!("no connected G({n}, {edge_prob}) in {RETRIES} draws")))
}

#[derive(Debug, Clone)]
pub struct Wct {
    pub topology: Topology,
    pub senders: Vec<NodeId>,
    pub clusters: Vec<Vec<NodeId>>,
    /// Sender neighborhood of each cluster, sorted.
    pub neighborhoods: Vec<Vec<NodeId>>,
}

/// Source 0 linked to senders `1..=sender_count`; cluster `c` draws one sender
/// neighborhood at density `link_prob / 2^(c mod scales)` and all its members share it.
pub fn make_wct(
    cluster_count: usize,
    cluster_size: usize,
    sender_count: usize,
    link_prob: f64,
    seed: u64,
    scales: Option<u32>,
) -> Result<Wct> {
    positive("cluster count", cluster_count)?;
    positive("cluster size", cluster_size)?;
    positive("sender count", sender_count)?;
    if !(link_prob > 0.0 && link_prob < 1.0) {
        return Err(Error::Generation(format!("link_prob must be in (0, 1), got {link_prob}")));
    }
    let scales = scales.unwrap_or_else(|| ((sender_count as f64).log2().ceil() as u32).max(1));
    if scales == 0 {
        return Err(Error::Generation("scales must be positive".into()));
    }
    let coins = Coins::new(seed);
    let senders: Vec<NodeId> = (1..=sender_count).collect();
    let mut e: Vec<_> = senders.iter().map(|&s| (0, s)).collect();
    let mut clusters = Vec::with_capacity(cluster_count);
    let mut neighborhoods = Vec::with_capacity(cluster_count);
    let mut next = 1 + sender_count;
    for c in 0..cluster_count {
        let q = link_prob / f64::powi(2.0, (c as u32 % scales) as i32);
        let mut s = coins.stream(c as u64, Purpose::Topology);
        let nbrs = (0..1000)
            .map(|_| senders.iter().copied().filter(|_| s.bernoulli(q)).collect::<Vec<_>>())
            .find(|v| !v.is_empty())
            .ok_or_else(|| Error::Generation(format!("cluster {c} drew no sender neighbor")))?;
        let members: Vec<NodeId> = (next..next + cluster_size).collect();
        next += cluster_size;
        for &m in &members {
            for &s in &nbrs {
                e.push((s, m));
            }
        }
        clusters.push(members);
        neighborhoods.push(nbrs);
    }
    let topology = build(next, &e)?;
    Ok(Wct { topology, senders, clusters, neighborhoods })
}

/// Sidecar text, one `cluster_id: node ids` line per cluster.
pub fn cluster_map_text(clusters: &[Vec<NodeId>]) -> String {
    clusters
        .iter()
        .enumerate()
        .map(|(c, m)| {
            let ids: Vec<String> = m.iter().map(|v| v.to_string()).collect();
            format!("{c}: {}\n", ids.join(" "))
        })
        .collect()
}

/// Fraction of clusters with exactly one broadcasting sender neighbor.
pub fn collision_free_fraction(wct: &Wct, broadcasting: &[bool]) -> f64 {
    let hit = wct
        .neighborhoods
        .iter()
        .filter(|nb| nb.iter().filter(|&&s| broadcasting[s]).count() == 1)
        .count();
    hit as f64 / wct.clusters.len() as f64
}

/// Mean collision-free fraction over `rounds` random rounds: each round picks
/// a scale `i` uniformly from `0..=ceil(log2 senders)` and every sender fires
/// with probability `2^-i`.
pub fn mean_collision_free_fraction(wct: &Wct, rounds: u64, seed: u64) -> f64 {
    let n = wct.topology.node_count();
    let top = (wct.senders.len() as f64).log2().ceil() as u64;
    let mut s = Coins::new(seed).stream(0, Purpose::Harness);
    let mut fire = vec![false; n];
    let mut total = 0.0;
    for _ in 0..rounds {
        let i = s.below(top + 1);
        let q = f64::powi(0.5, i as i32);
        for &u in &wct.senders {
            fire[u] = s.bernoulli(q);
        }
        total += collision_free_fraction(wct, &fire);
    }
    total / rounds.max(1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::validate_graph;

    #[test]
    fn shapes() {
        let t = make_star(3).unwrap();
        assert_eq!((t.node_count(), t.graph().edge_count(), t.eccentricity()), (4, 3, 1));
        assert!(make_star(1).unwrap().is_single_link());
        let t = make_single_link();
        assert_eq!(t.bfs_layers(), vec![vec![0], vec![1]]);
        let t = make_path(8).unwrap();
        assert_eq!((t.node_count(), t.eccentricity()), (9, 8));
        let t = make_layered(3, 4).unwrap();
        assert_eq!(t.node_count(), 13);
        assert_eq!(t.graph().edge_count(), 4 + 16 + 16);
        assert_eq!(t.bfs_layers().iter().map(|l| l.len()).collect::<Vec<_>>(), vec![1, 4, 4, 4]);
        let t = make_binary_tree(3).unwrap();
        assert_eq!((t.node_count(), t.eccentricity()), (15, 3));
        let t = make_ranked_path(10, 2, 0).unwrap();
        assert_eq!((t.node_count(), t.eccentricity()), (18, 10));
        let t = generate(&ranked_path_spec(64, 10, 2).unwrap()).unwrap().topology;
        assert_eq!((t.node_count(), t.eccentricity()), (64, 10));
        assert!(ranked_path_spec(17, 10, 2).is_none());
        assert!(make_path(0).is_err());
    }

    #[test]
    fn ranked_path_rank() {
        let t = make_ranked_path(20, 4, 3).unwrap();
        assert_eq!(crate::gbst::build_ranked_bfs(&t).r_max(), 5);
    }

    #[test]
    fn random_connected_is_connected() {
        for seed in 0..100 {
            let t = make_random_connected(64, 0.1, seed).unwrap();
            assert!(validate_graph(t.graph()).is_empty());
        }
        assert!(matches!(make_random_connected(200, 0.001, 1), Err(Error::Generation(_))));
    }

    #[test]
    fn wct_clusters_share_neighborhoods() {
        let w = make_wct(12, 5, 9, 0.5, 3, None).unwrap();
        let g = w.topology.graph();
        for (c, members) in w.clusters.iter().enumerate() {
            for &m in members {
                assert_eq!(g.neighbors(m), w.neighborhoods[c].as_slice());
            }
        }
        assert_eq!(g.neighbors(0), w.senders.as_slice());
        assert_eq!(w.topology.eccentricity(), 2);
        let one = make_wct(6, 1, 4, 0.5, 3, None).unwrap();
        assert_eq!(one.topology.node_count(), 11);
        assert!(cluster_map_text(&w.clusters).starts_with("0: 10 11 12 13 14\n"));
    }

    #[test]
    fn same_seed_same_edges() {
        let spec = TopologySpec::wct_for(300, 11);
        let a = generate(&spec).unwrap().topology.to_edge_list();
        let b = generate(&spec).unwrap().topology.to_edge_list();
        assert_eq!(a, b);
        let r = TopologySpec::RandomConnected { n: 40, edge_prob: 0.2, seed: 2 };
        assert_eq!(generate(&r).unwrap().topology.to_edge_list(), generate(&r).unwrap().topology.to_edge_list());
    }

    #[test]
    fn spec_json() {
        let s: TopologySpec = serde_json::from_str(r#"{"family":"layered","d":3,"width":2}"#).unwrap();
        assert_eq!(s, TopologySpec::Layered { d: 3, width: 2 });
        let s: TopologySpec = serde_json::from_str(r#"{"family":"single_link"}"#).unwrap();
        assert_eq!(s, TopologySpec::SingleLink);
        assert!(serde_json::from_str::<TopologySpec>(r#"{"family":"path","d":3,"x":1}"#).is_err());
        let round = serde_json::to_string(&TopologySpec::wct_for(100, 1)).unwrap();
        assert_eq!(serde_json::from_str::<TopologySpec>(&round).unwrap(), TopologySpec::wct_for(100, 1));
    }

    #[test]
    fn collision_free_fraction_shrinks_with_scales() {
        let w = make_wct(64, 1, 64, 0.5, 5, None).unwrap();
        let f = mean_collision_free_fraction(&w, 500, 1);
        assert!(f > 0.05 && f < 0.5, "{f}");
    }
}
