//! Ranked BFS trees, gathering-broadcasting spanning trees and block plans.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{NodeId, Topology};

/// Default wave multiplier for block plans.
pub const DEFAULT_C: u32 = 8;

/// BFS tree with inductively assigned ranks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankedTree {
    parent: Vec<Option<NodeId>>,
    level: Vec<u32>,
    rank: Vec<u32>,
    r_max: u32,
}

impl RankedTree {
    pub fn node_count(&self) -> usize {
        self.parent.len()
    }

    pub fn parent(&self, u: NodeId) -> Option<NodeId> {
        self.parent[u]
    }

    pub fn level(&self, u: NodeId) -> u32 {
        self.level[u]
    }

    pub fn rank(&self, u: NodeId) -> u32 {
        self.rank[u]
    }

    pub fn ranks(&self) -> &[u32] {
        &self.rank
    }

    pub fn r_max(&self) -> u32 {
        self.r_max
    }

    /// Children of every node, sorted by id.
    pub fn children(&self) -> Vec<Vec<NodeId>> {
        let mut ch = vec![Vec::new(); self.node_count()];
        for (v, p) in self.parent.iter().enumerate() {
            if let Some(p) = p {
                ch[*p].push(v);
            }
        }
        ch
    }
}

fn assign_ranks(parent: &[Option<NodeId>], level: &[u32]) -> Vec<u32> {
    let n = parent.len();
    let mut order: Vec<NodeId> = (0..n).collect();
    order.sort_by_key(|&u| std::cmp::Reverse(level[u]));
    // (max child rank, multiplicity)
    let mut best = vec![(0u32, 0u32); n];
    let mut rank = vec![0u32; n];
    for u in order {
        let (r, cnt) = best[u];
        rank[u] = match cnt {
            0 => 1,
            1 => r,
            _ => r + 1,
        };
        if let Some(p) = parent[u] {
            let b = &mut best[p];
            if rank[u] > b.0 {
                *b = (rank[u], 1);
            } else if rank[u] == b.0 {
                b.1 += 1;
            }
        }
    }
    rank
}

/// Ranked BFS tree; every node's parent is its smallest-id neighbor one level up.
pub fn build_ranked_bfs(topology: &Topology) -> RankedTree {
    let g = topology.graph();
    let level = topology.levels().to_vec();
    let parent: Vec<Option<NodeId>> = (0..g.node_count())
        .map(|v| {
            if v == topology.source() {
                None
            } else {
                g.neighbors(v).iter().copied().find(|&u| level[u] + 1 == level[v])
            }
        })
        .collect();
    let rank = assign_ranks(&parent, &level);
    let r_max = rank.iter().copied().max().unwrap_or(1);
    RankedTree { parent, level, rank, r_max }
}

/// A ranked BFS tree with a designated set of fast edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gbst {
    tree: RankedTree,
    fast_child: Vec<Option<NodeId>>,
}

impl Gbst {
    /// Marks every equal-rank tree edge fast, without enforcing the GBST property.
    pub fn from_ranked_tree(tree: RankedTree) -> Self {
        let mut fast_child = vec![None; tree.node_count()];
        for v in 0..tree.node_count() {
            if let Some(p) = tree.parent[v] {
                if tree.rank[p] == tree.rank[v] && fast_child[p].is_none() {
                    fast_child[p] = Some(v);
                }
            }
        }
        Self { tree, fast_child }
    }

    pub fn tree(&self) -> &RankedTree {
        &self.tree
    }

    pub fn node_count(&self) -> usize {
        self.tree.node_count()
    }

    pub fn r_max(&self) -> u32 {
        self.tree.r_max
    }

    pub fn level(&self, u: NodeId) -> u32 {
        self.tree.level[u]
    }

    pub fn rank(&self, u: NodeId) -> u32 {
        self.tree.rank[u]
    }

    /// A node is fast iff it has a fast child edge.
    pub fn is_fast(&self, u: NodeId) -> bool {
        self.fast_child[u].is_some()
    }

    pub fn fast_child(&self, u: NodeId) -> Option<NodeId> {
        self.fast_child[u]
    }

    /// Fast edges as `(parent, child)`, ordered by parent id.
    pub fn fast_edges(&self) -> Vec<(NodeId, NodeId)> {
        self.fast_child.iter().enumerate().filter_map(|(u, c)| c.map(|c| (u, c))).collect()
    }

    /// One line per node: `id level rank parent fast`.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for u in 0..self.node_count() {
            let parent = self.tree.parent[u].map_or("-".to_string(), |p| p.to_string());
            writeln!(s, "{u} {} {} {parent} {}", self.level(u), self.rank(u), u8::from(self.is_fast(u))).unwrap();
        }
        s
    }
}

/// Builds a GBST by reattaching or demoting conflicting equal-rank children.
///
/// Ranks stay as computed on the initial BFS tree.
pub fn build_gbst(topology: &Topology) -> Gbst {
    let mut tree = build_ranked_bfs(topology);
    let g = topology.graph();
    let n = tree.node_count();

    let mut groups: BTreeMap<(u32, u32), Vec<NodeId>> = BTreeMap::new();
    for v in 0..n {
        if let Some(p) = tree.parent[v] {
            if tree.rank[p] == tree.rank[v] {
                groups.entry((tree.level[v], tree.rank[v])).or_default().push(v);
            }
        }
    }

    let mut fast_child = vec![None; n];
    for ((lvl, r), members) in groups {
        let keeper = members[0];
        let keeper_parent = tree.parent[keeper].unwrap();
        fast_child[keeper_parent] = Some(keeper);
        for &v in &members[1..] {
            let higher = g
                .neighbors(v)
                .iter()
                .copied()
                .find(|&u| tree.level[u] + 1 == lvl && tree.rank[u] > r);
            if let Some(u) = higher {
                tree.parent[v] = Some(u);
            } else if g.has_edge(v, keeper_parent) {
                tree.parent[v] = Some(keeper_parent);
            }
        }
    }
    Gbst { tree, fast_child }
}

/// Pairs of same-level, same-rank fast children whose (fast) parents differ.
pub fn verify_gbst(gbst: &Gbst) -> Vec<(NodeId, NodeId)> {
    let mut groups: BTreeMap<(u32, u32), Vec<(NodeId, NodeId)>> = BTreeMap::new();
    for (p, c) in gbst.fast_edges() {
        groups.entry((gbst.level(c), gbst.rank(c))).or_default().push((c, p));
    }
    let mut out = Vec::new();
    for members in groups.values() {
        for i in 0..members.len() {
            for j in i + 1..members.len() {
                if members[i].1 != members[j].1 {
                    let (a, b) = (members[i].0, members[j].0);
                    out.push((a.min(b), a.max(b)));
                }
            }
        }
    }
    out.sort_unstable();
    out
}

/// A maximal chain of fast edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stretch {
    pub rank: u32,
    pub start_level: u32,
    /// Number of fast edges.
    pub length: u32,
    /// Nodes along the chain, top first; the last one is the receiving end.
    pub nodes: Vec<NodeId>,
}

pub fn fast_stretches(gbst: &Gbst) -> Vec<Stretch> {
    let n = gbst.node_count();
    let mut has_fast_parent = vec![false; n];
    for (_, c) in gbst.fast_edges() {
        has_fast_parent[c] = true;
    }
    let mut tops: Vec<NodeId> = (0..n).filter(|&u| gbst.is_fast(u) && !has_fast_parent[u]).collect();
    tops.sort_by_key(|&u| (gbst.level(u), u));
    tops.into_iter()
        .map(|top| {
            let mut nodes = vec![top];
            let mut cur = top;
            while let Some(c) = gbst.fast_child(cur) {
                nodes.push(c);
                cur = c;
            }
            Stretch {
                rank: gbst.rank(top),
                start_level: gbst.level(top),
                length: nodes.len() as u32 - 1,
                nodes,
            }
        })
        .collect()
}

/// Block assignment of fast nodes for robust fast waves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPlan {
    pub s: u32,
    pub c: u32,
    block: Vec<Option<u32>>,
}

impl BlockPlan {
    /// Block index `floor(level / S)` of a fast node.
    pub fn block(&self, u: NodeId) -> Option<u32> {
        self.block[u]
    }

    pub fn with_c(mut self, c: u32) -> Result<Self> {
        if c < 3 {
            return Err(Error::Parameter(format!("c must be at least 3, got {c}")));
        }
        self.c = c;
        Ok(self)
    }

    /// Fast nodes of one stretch grouped by block, in level order.
    pub fn blocks_of(&self, stretch: &Stretch) -> Vec<Vec<NodeId>> {
        let mut out: Vec<Vec<NodeId>> = Vec::new();
        let mut last = None;
        for &u in &stretch.nodes {
            let Some(b) = self.block[u] else { continue };
            if last != Some(b) {
                out.push(Vec::new());
                last = Some(b);
            }
            out.last_mut().unwrap().push(u);
        }
        out
    }
}

/// `max(1, ceil(log2 log2 n))`.
pub fn default_block_size(n: usize) -> u32 {
    let ll = (n.max(2) as f64).log2().log2();
    (ll.ceil() as u32).max(1)
}

pub fn block_partition(gbst: &Gbst, s: u32) -> Result<BlockPlan> {
    if s < 1 {
        return Err(Error::Parameter("block size S must be at least 1".into()));
    }
    let block = (0..gbst.node_count())
        .map(|u| gbst.is_fast(u).then(|| gbst.level(u) / s))
        .collect();
    Ok(BlockPlan { s, c: DEFAULT_C, block })
}
