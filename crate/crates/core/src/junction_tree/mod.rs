//! Junction trees generalized to a single tree over all cliques: links
//! between cliques of different components carry empty separators.
//!
//! Node indices are stable while a tree is edited; freed indices go to the
//! back of a queue and are reused in the order they were freed.

mod count;
mod randomize;

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::hash::{Hash, Hasher};

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::graph::{maximum_cardinality_search, CliqueDecomposition, Graph};
use crate::vertex_set::{Vertex, VertexSet};

pub use count::{count_by_separators, count_junction_trees, log_mu, mu_log_ratio, spanning_tree_count};
pub use randomize::randomize_junction_tree;

pub type NodeId = usize;
pub type LinkId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Link {
    pub a: NodeId,
    pub b: NodeId,
    pub separator: VertexSet,
}

impl Link {
    pub fn other(&self, n: NodeId) -> NodeId {
        if self.a == n {
            self.b
        } else {
            self.a
        }
    }
}

#[derive(Clone, Debug)]
struct Node {
    clique: VertexSet,
    adj: SmallVec<[(NodeId, LinkId); 4]>,
}

#[derive(Clone)]
pub struct JunctionTree {
    v: usize,
    nodes: Vec<Option<Node>>,
    free: VecDeque<NodeId>,
    live: Vec<NodeId>,
    live_pos: Vec<usize>,
    links: Vec<Link>,
    vertex_index: Vec<SmallVec<[NodeId; 4]>>,
}

/// Representation-independent form of a tree: sorted cliques and links as
/// sorted pairs of positions in that clique list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalTree {
    pub cliques: Vec<VertexSet>,
    pub links: Vec<(usize, usize)>,
}

impl JunctionTree {
    fn empty(v: usize) -> Self {
        Self {
            v,
            nodes: Vec::new(),
            free: VecDeque::new(),
            live: Vec::new(),
            live_pos: Vec::new(),
            links: Vec::new(),
            vertex_index: vec![SmallVec::new(); v],
        }
    }

    /// Builds a junction tree from the maximum cardinality search clique
    /// ordering of `g`; components are chained by empty-separator links.
    pub fn build(g: &Graph) -> Result<Self> {
        let mcs = maximum_cardinality_search(g);
        let d = mcs.decomposition.ok_or(Error::NotDecomposable)?;
        Ok(Self::from_decomposition(g.vertex_count(), &d))
    }

    /// Tree linking each clique of a running-intersection ordering to its
    /// parent.
    pub fn from_decomposition(v: usize, d: &CliqueDecomposition) -> Self {
        let mut j = Self::empty(v);
        for c in &d.cliques {
            j.add_node(c.clone());
        }
        for (i, sep) in d.separators.iter().enumerate() {
            j.add_link(d.parents[i], i + 1, sep.clone());
        }
        j
    }

    /// Assembles a tree from explicit cliques and links (indices into
    /// `cliques`). Separators are computed as clique intersections; the
    /// junction property is not checked, use [`JunctionTree::validate`].
    pub fn from_parts(v: usize, cliques: Vec<VertexSet>, links: &[(usize, usize)]) -> Result<Self> {
        let mut j = Self::empty(v);
        for c in cliques {
            if c.max_vertex().is_some_and(|m| m as usize >= v) {
                return Err(Error::UnknownVertex { vertex: c.max_vertex().unwrap() as usize, count: v });
            }
            j.add_node(c);
        }
        for &(a, b) in links {
            if a >= j.nodes.len() || b >= j.nodes.len() || a == b {
                return Err(Error::InvalidGraph(format!("bad link ({a}, {b})")));
            }
            let sep = j.clique(a).intersection(j.clique(b));
            j.add_link(a, b, sep);
        }
        Ok(j)
    }

    pub fn vertex_count(&self) -> usize {
        self.v
    }

    pub fn clique_count(&self) -> usize {
        self.live.len()
    }

    /// Number of separators, counted with multiplicity (one per link).
    pub fn separator_count(&self) -> usize {
        self.links.len()
    }

    /// Live node indices, in the order used for uniform clique draws.
    pub fn node_ids(&self) -> &[NodeId] {
        &self.live
    }

    pub fn is_live(&self, n: NodeId) -> bool {
        self.nodes.get(n).is_some_and(Option::is_some)
    }

    fn node(&self, n: NodeId) -> &Node {
        self.nodes[n].as_ref().expect("live node")
    }

    pub fn clique(&self, n: NodeId) -> &VertexSet {
        &self.node(n).clique
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn link(&self, id: LinkId) -> &Link {
        &self.links[id]
    }

    /// Neighbours of `n` with the id of the connecting link.
    pub fn neighbors(&self, n: NodeId) -> impl ExactSizeIterator<Item = (NodeId, LinkId)> + '_ {
        self.node(n).adj.iter().copied()
    }

    pub fn degree(&self, n: NodeId) -> usize {
        self.node(n).adj.len()
    }

    pub fn find_link(&self, a: NodeId, b: NodeId) -> Option<LinkId> {
        self.node(a).adj.iter().find(|&&(nb, _)| nb == b).map(|&(_, l)| l)
    }

    /// Nodes whose clique contains `x`, in no particular order.
    pub fn nodes_containing(&self, x: Vertex) -> &[NodeId] {
        &self.vertex_index[x as usize]
    }

    /// Nodes whose clique contains all of `set` (all nodes for the empty set).
    pub fn nodes_containing_set(&self, set: &VertexSet) -> Vec<NodeId> {
        match set.iter().min_by_key(|&x| self.vertex_index[x as usize].len()) {
            None => self.live.clone(),
            Some(z) => self.vertex_index[z as usize].iter().copied().filter(|&n| set.is_subset(self.clique(n))).collect(),
        }
    }

    /// Edge count of the represented graph: for a junction tree every edge is
    /// counted once by the cliques net of the separators.
    pub fn edge_count(&self) -> usize {
        let pairs = |k: usize| k * k.saturating_sub(1) / 2;
        let cliques: usize = self.live.iter().map(|&n| pairs(self.clique(n).len())).sum();
        let seps: usize = self.links.iter().map(|l| pairs(l.separator.len())).sum();
        cliques - seps
    }

    pub(crate) fn add_node(&mut self, clique: VertexSet) -> NodeId {
        let id = match self.free.pop_front() {
            Some(id) => id,
            None => {
                self.nodes.push(None);
                self.live_pos.push(usize::MAX);
                self.nodes.len() - 1
            }
        };
        for x in clique.iter() {
            self.vertex_index[x as usize].push(id);
        }
        self.nodes[id] = Some(Node { clique, adj: SmallVec::new() });
        self.live_pos[id] = self.live.len();
        self.live.push(id);
        id
    }

    /// Removes a node that has no remaining links.
    pub(crate) fn remove_node(&mut self, id: NodeId) {
        let node = self.nodes[id].take().expect("live node");
        assert!(node.adj.is_empty(), "removing a node that still has links");
        for x in node.clique.iter() {
            let list = &mut self.vertex_index[x as usize];
            let p = list.iter().position(|&n| n == id).expect("indexed");
            list.swap_remove(p);
        }
        let p = self.live_pos[id];
        self.live.swap_remove(p);
        if p < self.live.len() {
            self.live_pos[self.live[p]] = p;
        }
        self.live_pos[id] = usize::MAX;
        self.free.push_back(id);
    }

    pub(crate) fn set_clique(&mut self, id: NodeId, clique: VertexSet) {
        let old = std::mem::take(&mut self.nodes[id].as_mut().expect("live node").clique);
        for x in old.difference(&clique).iter() {
            let list = &mut self.vertex_index[x as usize];
            let p = list.iter().position(|&n| n == id).expect("indexed");
            list.swap_remove(p);
        }
        for x in clique.difference(&old).iter() {
            self.vertex_index[x as usize].push(id);
        }
        self.nodes[id].as_mut().unwrap().clique = clique;
    }

    pub(crate) fn add_link(&mut self, a: NodeId, b: NodeId, separator: VertexSet) -> LinkId {
        let id = self.links.len();
        self.links.push(Link { a, b, separator });
        self.nodes[a].as_mut().unwrap().adj.push((b, id));
        self.nodes[b].as_mut().unwrap().adj.push((a, id));
        id
    }

    pub(crate) fn remove_link(&mut self, id: LinkId) {
        let Link { a, b, .. } = self.links[id];
        for n in [a, b] {
            let adj = &mut self.nodes[n].as_mut().unwrap().adj;
            let p = adj.iter().position(|&(_, l)| l == id).expect("link listed at endpoint");
            adj.remove(p);
        }
        let last = self.links.len() - 1;
        if id != last {
            let Link { a, b, .. } = self.links[last];
            for n in [a, b] {
                let adj = &mut self.nodes[n].as_mut().unwrap().adj;
                for entry in adj.iter_mut() {
                    if entry.1 == last {
                        entry.1 = id;
                    }
                }
            }
        }
        self.links.swap_remove(id);
    }

    pub(crate) fn set_separator(&mut self, id: LinkId, separator: VertexSet) {
        self.links[id].separator = separator;
    }

    /// Moves link `id` so that it joins `from`'s former partner to `to`.
    pub(crate) fn relink(&mut self, id: LinkId, from: NodeId, to: NodeId) {
        let other = self.links[id].other(from);
        let adj = &mut self.nodes[from].as_mut().unwrap().adj;
        let p = adj.iter().position(|&(_, l)| l == id).expect("link at node");
        adj.remove(p);
        for entry in self.nodes[other].as_mut().unwrap().adj.iter_mut() {
            if entry.1 == id {
                entry.0 = to;
            }
        }
        self.nodes[to].as_mut().unwrap().adj.push((other, id));
        let link = &mut self.links[id];
        if link.a == from {
            link.a = to;
        } else {
            link.b = to;
        }
    }

    /// Checks every structural invariant directly and reports the first
    /// violation found.
    pub fn check(&self) -> std::result::Result<(), String> {
        let c = self.live.len();
        if c == 0 {
            return Err("no nodes".into());
        }
        if self.links.len() != c - 1 {
            return Err(format!("{} links for {} nodes", self.links.len(), c));
        }
        // Spanning tree: c - 1 links and connected.
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![self.live[0]];
        seen[self.live[0]] = true;
        let mut reached = 1;
        while let Some(n) = stack.pop() {
            for (m, _) in self.neighbors(n) {
                if !self.is_live(m) {
                    return Err(format!("link to dead node {m}"));
                }
                if !seen[m] {
                    seen[m] = true;
                    reached += 1;
                    stack.push(m);
                }
            }
        }
        if reached != c {
            return Err("links do not connect all nodes".into());
        }
        for (id, l) in self.links.iter().enumerate() {
            if !self.node(l.a).adj.contains(&(l.b, id)) || !self.node(l.b).adj.contains(&(l.a, id)) {
                return Err(format!("link {id} missing from adjacency"));
            }
            if l.separator != self.clique(l.a).intersection(self.clique(l.b)) {
                return Err(format!("link {id} separator {:?} is not the clique intersection", l.separator));
            }
        }
        for &n in &self.live {
            let q = self.clique(n);
            if q.is_empty() {
                return Err(format!("node {n} is empty"));
            }
            if q.max_vertex().unwrap() as usize >= self.v {
                return Err(format!("node {n} has an unknown vertex"));
            }
        }
        for (i, &a) in self.live.iter().enumerate() {
            for &b in &self.live[i + 1..] {
                if self.clique(a).is_subset(self.clique(b)) || self.clique(b).is_subset(self.clique(a)) {
                    return Err(format!("nodes {a} and {b} are nested"));
                }
            }
        }
        // Junction property: nodes containing x induce a subtree, i.e. a
        // connected forest with one link fewer than nodes.
        for x in 0..self.v {
            let containing: Vec<NodeId> = self.live.iter().copied().filter(|&n| self.clique(n).contains(x as Vertex)).collect();
            let mut indexed = self.vertex_index[x].to_vec();
            indexed.sort_unstable();
            let mut sorted = containing.clone();
            sorted.sort_unstable();
            if indexed != sorted {
                return Err(format!("vertex index for {x} is stale"));
            }
            if containing.is_empty() {
                return Err(format!("vertex {x} is in no clique"));
            }
            let inner = self.links.iter().filter(|l| l.separator.contains(x as Vertex)).count();
            if inner != containing.len() - 1 {
                return Err(format!("cliques containing vertex {x} are not connected in the tree"));
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> bool {
        self.check().is_ok()
    }

    /// The decomposable graph represented by the tree.
    pub fn graph_of(&self) -> Graph {
        let mut g = Graph::new(self.v).expect("v >= 1");
        for &n in &self.live {
            let c = self.clique(n).as_slice();
            for (k, &a) in c.iter().enumerate() {
                for &b in &c[k + 1..] {
                    g.add_edge(a as usize, b as usize).expect("valid vertices");
                }
            }
        }
        g
    }

    pub fn canonical(&self) -> CanonicalTree {
        let mut order: Vec<NodeId> = self.live.clone();
        order.sort_by(|&a, &b| self.clique(a).cmp(self.clique(b)));
        let mut rank = vec![usize::MAX; self.nodes.len()];
        for (r, &n) in order.iter().enumerate() {
            rank[n] = r;
        }
        let mut links: Vec<(usize, usize)> = self
            .links
            .iter()
            .map(|l| {
                let (x, y) = (rank[l.a], rank[l.b]);
                (x.min(y), x.max(y))
            })
            .collect();
        links.sort_unstable();
        CanonicalTree { cliques: order.iter().map(|&n| self.clique(n).clone()).collect(), links }
    }

    /// Sorted clique list; identifies the represented graph.
    pub fn sorted_cliques(&self) -> Vec<VertexSet> {
        let mut c: Vec<VertexSet> = self.live.iter().map(|&n| self.clique(n).clone()).collect();
        c.sort();
        c
    }

    /// Debug dump: `N<i>: v v v` per node and `L: <i> <j> | s s s` per link.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let mut ids = self.live.clone();
        ids.sort_unstable();
        for n in ids {
            let _ = writeln!(out, "N{n}: {}", self.clique(n));
        }
        for l in &self.links {
            if l.separator.is_empty() {
                let _ = writeln!(out, "L: {} {} |", l.a, l.b);
            } else {
                let _ = writeln!(out, "L: {} {} | {}", l.a, l.b, l.separator);
            }
        }
        out
    }

    /// Parses [`JunctionTree::dump`] output. Node labels in the dump may be
    /// sparse; they are renumbered densely in order of appearance.
    pub fn parse_dump(v: usize, text: &str) -> Result<Self> {
        let mut labels: Vec<usize> = Vec::new();
        let mut cliques = Vec::new();
        let mut links = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: &str| Error::Parse { line: lineno + 1, message: message.to_string() };
            let nums = |s: &str| -> Result<Vec<usize>> {
                s.split_whitespace().map(|t| t.parse::<usize>().map_err(|_| err("bad number"))).collect()
            };
            if let Some(rest) = line.strip_prefix("L:") {
                let (ends, _) = rest.split_once('|').ok_or_else(|| err("missing `|`"))?;
                let ends = nums(ends)?;
                if ends.len() != 2 {
                    return Err(err("a link needs two node labels"));
                }
                let pos = |label: usize| labels.iter().position(|&l| l == label).ok_or_else(|| err("unknown node"));
                links.push((pos(ends[0])?, pos(ends[1])?));
            } else if let Some(rest) = line.strip_prefix('N') {
                let (label, members) = rest.split_once(':').ok_or_else(|| err("missing `:`"))?;
                labels.push(label.trim().parse().map_err(|_| err("bad node label"))?);
                cliques.push(nums(members)?.into_iter().map(|x| x as Vertex).collect());
            } else {
                return Err(err("expected a node or link line"));
            }
        }
        Self::from_parts(v, cliques, &links)
    }
}

impl PartialEq for JunctionTree {
    fn eq(&self, other: &Self) -> bool {
        self.v == other.v && self.canonical() == other.canonical()
    }
}

impl Eq for JunctionTree {}

impl Hash for JunctionTree {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.v.hash(state);
        self.canonical().hash(state);
    }
}

impl std::fmt::Debug for JunctionTree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "JunctionTree(v={})\n{}", self.v, self.dump())
    }
}
