//! Finite simple connected graphs with named vertices.
//!
//! Vertices are stored in lexicographic order of their names, so a vertex
//! index is also its rank in every sorted output. All-pairs distances are
//! computed lazily by breadth-first search and cached for the lifetime of the
//! graph.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::OnceLock;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Marker for "unreachable" inside the distance table.
const UNREACHABLE: u32 = u32::MAX;

/// A set of vertices of one fixed graph, stored as a bitset over vertex
/// indices.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexSet(FixedBitSet);

impl VertexSet {
    pub fn empty(universe: usize) -> Self {
        VertexSet(FixedBitSet::with_capacity(universe))
    }

    pub fn full(universe: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(universe);
        bits.insert_range(..);
        VertexSet(bits)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(universe: usize, indices: I) -> Self {
        let mut set = Self::empty(universe);
        for v in indices {
            set.insert(v);
        }
        set
    }

    /// Number of vertices of the ambient graph.
    pub fn universe(&self) -> usize {
        self.0.len()
    }

    pub fn len(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.contains(v)
    }

    pub fn insert(&mut self, v: usize) {
        self.0.insert(v);
    }

    pub fn remove(&mut self, v: usize) {
        self.0.set(v, false);
    }

    /// Members in increasing index (= lexicographic) order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.ones()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn first(&self) -> Option<usize> {
        self.0.minimum()
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.0.is_disjoint(&other.0)
    }

    pub fn intersects(&self, other: &VertexSet) -> bool {
        !self.is_disjoint(other)
    }

    pub fn intersect_with(&mut self, other: &VertexSet) {
        self.0.intersect_with(&other.0);
    }

    pub fn union_with(&mut self, other: &VertexSet) {
        self.0.union_with(&other.0);
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        let mut out = self.clone();
        out.intersect_with(other);
        out
    }

    pub fn complement(&self) -> VertexSet {
        let mut bits = self.0.clone();
        bits.toggle_range(..);
        VertexSet(bits)
    }

    /// Image of the set under a vertex map given as an index table.
    pub fn map(&self, image: &[usize]) -> VertexSet {
        VertexSet::from_indices(self.universe(), self.iter().map(|v| image[v]))
    }

    /// Names of the members, in lexicographic order.
    pub fn names<'g>(&self, g: &'g Graph) -> Vec<&'g str> {
        self.iter().map(|v| g.name(v)).collect()
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// All-pairs shortest-path lengths, row-major.
#[derive(Clone, Debug)]
pub struct DistanceTable {
    n: usize,
    table: Vec<u32>,
}

impl DistanceTable {
    #[inline]
    pub fn get(&self, u: usize, v: usize) -> usize {
        self.table[u * self.n + v] as usize
    }

    #[inline]
    pub fn row(&self, u: usize) -> &[u32] {
        &self.table[u * self.n..(u + 1) * self.n]
    }
}

/// A finite, simple, connected, undirected graph with string-named vertices.
#[derive(Clone, Serialize, Deserialize)]
#[serde(try_from = "GraphJson", into = "GraphJson")]
pub struct Graph {
    names: Vec<String>,
    index: HashMap<String, usize>,
    adj: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    dist: OnceLock<DistanceTable>,
}

/// Wire form: `{"vertices": [...], "edges": [["u","v"], ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphJson {
    pub vertices: Vec<String>,
    pub edges: Vec<[String; 2]>,
}

impl Graph {
    /// Builds a graph, rejecting duplicates, loops, dangling endpoints and
    /// disconnected input.
    pub fn new<V, E, S>(vertices: V, edges: E) -> Result<Self>
    where
        V: IntoIterator<Item = S>,
        E: IntoIterator<Item = (S, S)>,
        S: Into<String>,
    {
        let mut names: Vec<String> = vertices.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::EmptyGraph);
        }
        names.sort();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateVertex(w[0].clone()));
        }
        let index: HashMap<String, usize> =
            names.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();

        let mut edge_set = BTreeSet::new();
        for (a, b) in edges {
            let (a, b) = (a.into(), b.into());
            let ia = *index.get(&a).ok_or_else(|| Error::UnknownVertex(a.clone()))?;
            let ib = *index.get(&b).ok_or_else(|| Error::UnknownVertex(b.clone()))?;
            if ia == ib {
                return Err(Error::SelfLoop(a));
            }
            let e = (ia.min(ib), ia.max(ib));
            if !edge_set.insert(e) {
                return Err(Error::DuplicateEdge(names[e.0].clone(), names[e.1].clone()));
            }
        }
        let edges: Vec<(usize, usize)> = edge_set.into_iter().collect();
        let mut adj = vec![Vec::new(); names.len()];
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let g = Graph {
            names,
            index,
            adj,
            edges,
            dist: OnceLock::new(),
        };
        let components = g.component_count(|_| false);
        if components != 1 {
            return Err(Error::Disconnected { components });
        }
        Ok(g)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson::from(self.clone())
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Index of the vertex called `name`.
    pub fn vertex(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(name.to_string()))
    }

    pub(crate) fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.len() {
            Ok(())
        } else {
            Err(Error::UnknownVertex(format!("#{v}")))
        }
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Position of edge `{u, v}` in [`Graph::edges`].
    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        self.edges.binary_search(&(u.min(v), u.max(v))).ok()
    }

    pub fn vertex_set(&self) -> VertexSet {
        VertexSet::full(self.len())
    }

    pub fn distances(&self) -> &DistanceTable {
        self.dist.get_or_init(|| {
            let n = self.len();
            let rows: Vec<Vec<u32>> = (0..n).into_par_iter().map(|s| self.bfs(s)).collect();
            DistanceTable {
                n,
                table: rows.concat(),
            }
        })
    }

    pub fn distance(&self, u: usize, v: usize) -> usize {
        self.distances().get(u, v)
    }

    pub fn diameter(&self) -> usize {
        let d = self.distances();
        (0..self.len())
            .map(|u| d.row(u).iter().copied().max().unwrap_or(0) as usize)
            .max()
            .unwrap_or(0)
    }

    /// BFS distances from `source`.
    pub fn bfs(&self, source: usize) -> Vec<u32> {
        let mut dist = vec![UNREACHABLE; self.len()];
        let mut queue = VecDeque::from([source]);
        dist[source] = 0;
        while let Some(u) = queue.pop_front() {
            for &w in &self.adj[u] {
                if dist[w] == UNREACHABLE {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Number of connected components after deleting every edge whose index
    /// (into [`Graph::edges`]) satisfies `removed`.
    pub fn component_count(&self, removed: impl Fn(usize) -> bool) -> usize {
        self.components_without(removed).1
    }

    /// Component label per vertex after deleting the edges selected by
    /// `removed`, plus the component count. Labels are assigned in increasing
    /// vertex order.
    pub fn components_without(&self, removed: impl Fn(usize) -> bool) -> (Vec<usize>, usize) {
        let n = self.len();
        let mut label = vec![usize::MAX; n];
        let mut count = 0;
        for start in 0..n {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = count;
            let mut stack = vec![start];
            while let Some(u) = stack.pop() {
                for &w in &self.adj[u] {
                    if label[w] != usize::MAX {
                        continue;
                    }
                    if removed(self.edge_index(u, w).expect("adjacent")) {
                        continue;
                    }
                    label[w] = count;
                    stack.push(w);
                }
            }
            count += 1;
        }
        (label, count)
    }

    /// Two-colours the graph; `None` if it has an odd cycle.
    pub fn bipartition(&self) -> Option<Vec<bool>> {
        let d = self.bfs(0);
        let colour: Vec<bool> = d.iter().map(|&x| x % 2 == 1).collect();
        self.edges
            .iter()
            .all(|&(u, v)| colour[u] != colour[v])
            .then_some(colour)
    }

    pub fn is_bipartite(&self) -> bool {
        self.bipartition().is_some()
    }

    /// Subgraph induced on `set`, keeping vertex names. Fails if the induced
    /// subgraph is empty or disconnected.
    pub fn induced_subgraph(&self, set: &VertexSet) -> Result<Graph> {
        let vertices: Vec<&str> = set.iter().map(|v| self.name(v)).collect();
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, v)| set.contains(u) && set.contains(v))
            .map(|&(u, v)| (self.name(u), self.name(v)));
        Graph::new(vertices, edges)
    }

    /// Maps indices of `sub` (an induced subgraph with shared names) to
    /// indices of `self`.
    pub fn embed_indices(&self, sub: &Graph) -> Result<Vec<usize>> {
        sub.names.iter().map(|s| self.vertex(s)).collect()
    }
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.edges == other.edges
    }
}

impl Eq for Graph {}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("vertices", &self.names.len())
            .field("edges", &self.edges.len())
            .finish()
    }
}

impl TryFrom<GraphJson> for Graph {
    type Error = Error;

    fn try_from(j: GraphJson) -> Result<Self> {
        Graph::new(j.vertices, j.edges.into_iter().map(|[a, b]| (a, b)))
    }
}

impl From<Graph> for GraphJson {
    fn from(g: Graph) -> Self {
        GraphJson {
            edges: g
                .edges
                .iter()
                .map(|&(u, v)| [g.names[u].clone(), g.names[v].clone()])
                .collect(),
            vertices: g.names,
        }
    }
}
