//! Hyperplanes of median graphs.
//!
//! A hyperplane is a class of edges under the transitive closure of the
//! relation "opposite sides of a 4-cycle". In a median graph, deleting the
//! edges of one class leaves exactly two convex components, its halfspaces.
//! Everything metric about a median graph can be read off from which
//! hyperplanes separate which vertices; this module provides those queries.

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};

/// One edge class together with its two halfspaces.
///
/// `id` is the lexicographically least edge of the class and
/// `halfspaces[0]` is the side containing `id.0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hyperplane {
    pub id: (usize, usize),
    pub edges: Vec<(usize, usize)>,
    pub halfspaces: [VertexSet; 2],
}

impl Hyperplane {
    /// Index (0 or 1) of the halfspace containing `v`.
    pub fn side(&self, v: usize) -> usize {
        if self.halfspaces[0].contains(v) {
            0
        } else {
            1
        }
    }

    pub fn separates(&self, x: usize, y: usize) -> bool {
        self.side(x) != self.side(y)
    }

    /// All four quarter-spaces are nonempty.
    pub fn is_transverse(&self, other: &Hyperplane) -> bool {
        self.halfspaces
            .iter()
            .all(|a| other.halfspaces.iter().all(|b| a.intersects(b)))
    }

    pub fn dimension_sizes(&self) -> [usize; 2] {
        [self.halfspaces[0].len(), self.halfspaces[1].len()]
    }

    pub fn to_json(&self, g: &Graph) -> HyperplaneJson {
        let pair = |(u, v): (usize, usize)| [g.name(u).to_string(), g.name(v).to_string()];
        HyperplaneJson {
            id: pair(self.id),
            edges: self.edges.iter().copied().map(pair).collect(),
            halfspaces: self
                .halfspaces
                .clone()
                .map(|h| h.iter().map(|v| g.name(v).to_string()).collect()),
        }
    }
}

/// Wire form: `{"id": ["u","v"], "edges": [...], "halfspaces": [[...],[...]]}`.
#[derive(Clone, Debug, Serialize)]
pub struct HyperplaneJson {
    pub id: [String; 2],
    pub edges: Vec<[String; 2]>,
    pub halfspaces: [Vec<String>; 2],
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // keep the smaller root so class roots are their least edge
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.parent[hi] = lo;
        }
    }
}

/// Calls `f(a, b, c, d)` for every 4-cycle `a-b-c-d-a` with `b < d`, once per
/// choice of corner `a`.
pub(crate) fn for_each_four_cycle(g: &Graph, mut f: impl FnMut(usize, usize, usize, usize)) {
    for a in 0..g.len() {
        let nb = g.neighbors(a);
        for (i, &b) in nb.iter().enumerate() {
            for &d in &nb[i + 1..] {
                for c in common_neighbors(g, b, d) {
                    if c != a {
                        f(a, b, c, d);
                    }
                }
            }
        }
    }
}

/// Sorted common neighbours of `u` and `v`.
pub(crate) fn common_neighbors(g: &Graph, u: usize, v: usize) -> Vec<usize> {
    let (mut i, mut j) = (0, 0);
    let (a, b) = (g.neighbors(u), g.neighbors(v));
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// The hyperplanes of a graph, sorted by id, with an edge-to-class lookup.
#[derive(Clone, Debug)]
pub struct Hyperplanes {
    list: Vec<Hyperplane>,
    class_of_edge: Vec<usize>,
}

/// Computes the hyperplanes of `g`.
///
/// Fails with [`Error::Halfspace`] if some edge class does not split the
/// graph into exactly two components, which certifies that `g` is not median.
pub fn hyperplanes(g: &Graph) -> Result<Hyperplanes> {
    Hyperplanes::compute(g)
}

impl Hyperplanes {
    pub fn compute(g: &Graph) -> Result<Self> {
        let m = g.edge_count();
        let mut uf = UnionFind::new(m);
        let e = |u, v| g.edge_index(u, v).expect("cycle edge");
        for_each_four_cycle(g, |a, b, c, d| {
            uf.union(e(a, b), e(d, c));
            uf.union(e(a, d), e(b, c));
        });

        let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for edge in 0..m {
            by_root.entry(uf.find(edge)).or_default().push(edge);
        }
        let mut class_of_edge = vec![0; m];
        let mut list = Vec::with_capacity(by_root.len());
        for (k, (_, members)) in by_root.into_iter().enumerate() {
            for &edge in &members {
                class_of_edge[edge] = k;
            }
            let (label, count) = g.components_without(|edge| members.binary_search(&edge).is_ok());
            let edges: Vec<(usize, usize)> = members.iter().map(|&i| g.edges()[i]).collect();
            let id = edges[0];
            if count != 2 {
                return Err(Error::Halfspace {
                    id: (g.name(id.0).to_string(), g.name(id.1).to_string()),
                    components: count,
                });
            }
            let near = label[id.0];
            let side0 = VertexSet::from_indices(g.len(), (0..g.len()).filter(|&v| label[v] == near));
            let side1 = side0.complement();
            list.push(Hyperplane {
                id,
                edges,
                halfspaces: [side0, side1],
            });
        }
        Ok(Hyperplanes {
            list,
            class_of_edge,
        })
    }

    pub fn len(&self) -> usize {
        self.list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.list.is_empty()
    }

    pub fn get(&self, i: usize) -> &Hyperplane {
        &self.list[i]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Hyperplane> {
        self.list.iter()
    }

    pub fn as_slice(&self) -> &[Hyperplane] {
        &self.list
    }

    /// Hyperplane containing edge `{u, v}`.
    pub fn class_of(&self, g: &Graph, u: usize, v: usize) -> Option<usize> {
        g.edge_index(u, v).map(|e| self.class_of_edge[e])
    }

    /// Hyperplanes with `x` and `y` in different halfspaces.
    pub fn separating(&self, x: usize, y: usize) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.list[i].separates(x, y))
            .collect()
    }

    /// Whether the walk crosses every hyperplane at most once.
    pub fn is_geodesic(&self, g: &Graph, path: &[usize]) -> Result<bool> {
        for &v in path {
            g.check_vertex(v)?;
        }
        let mut seen = FixedBitSet::with_capacity(self.len());
        for w in path.windows(2) {
            let class = self.class_of(g, w[0], w[1]).ok_or_else(|| {
                Error::NotAPath(format!("{} and {} are not adjacent", g.name(w[0]), g.name(w[1])))
            })?;
            if seen.put(class) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Intersection of all halfspaces containing `s`.
    pub fn convex_hull(&self, s: &VertexSet) -> Result<VertexSet> {
        if s.is_empty() {
            return Err(Error::InvalidInput("convex hull of the empty set".into()));
        }
        let mut hull = VertexSet::full(s.universe());
        for h in &self.list {
            for half in &h.halfspaces {
                if s.is_subset(half) {
                    hull.intersect_with(half);
                }
            }
        }
        Ok(hull)
    }

    pub fn transverse(&self, i: usize, j: usize) -> bool {
        i != j && self.list[i].is_transverse(&self.list[j])
    }

    /// Adjacency rows of the transversality graph on hyperplanes.
    pub fn transversality(&self) -> Vec<FixedBitSet> {
        let n = self.len();
        let mut rows = vec![FixedBitSet::with_capacity(n); n];
        for i in 0..n {
            for j in i + 1..n {
                if self.transverse(i, j) {
                    rows[i].insert(j);
                    rows[j].insert(i);
                }
            }
        }
        rows
    }

    /// Maximal families of pairwise transverse hyperplanes, each sorted, in
    /// lexicographic order.
    pub fn maximal_transverse_families(&self) -> Vec<Vec<usize>> {
        let adj = self.transversality();
        let n = self.len();
        let mut out = Vec::new();
        let mut p = FixedBitSet::with_capacity(n);
        p.insert_range(..);
        bron_kerbosch(&adj, &mut Vec::new(), p, FixedBitSet::with_capacity(n), &mut out);
        for family in &mut out {
            family.sort_unstable();
        }
        out.sort();
        out
    }

    /// Size of the largest pairwise-transverse family.
    pub fn max_transverse_family(&self) -> usize {
        self.maximal_transverse_families()
            .iter()
            .map(Vec::len)
            .max()
            .unwrap_or(0)
    }

    /// The lexicographically least facing triple, if any: three hyperplanes
    /// with a pairwise-disjoint choice of halfspaces (so none separates the
    /// other two). The side choice is the least valid one.
    pub fn facing_triple(&self) -> Option<FacingTriple> {
        let n = self.len();
        // bit (2*si + sj) of disjoint[i*n+j] ⟺ halfspace si of i misses halfspace sj of j
        let mut disjoint = vec![0u8; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let mut bits = 0u8;
                for si in 0..2 {
                    for sj in 0..2 {
                        if self.list[i].halfspaces[si].is_disjoint(&self.list[j].halfspaces[sj]) {
                            bits |= 1 << (2 * si + sj);
                        }
                    }
                }
                disjoint[i * n + j] = bits;
                disjoint[j * n + i] = (bits & 0b1001) | ((bits & 0b0010) << 1) | ((bits & 0b0100) >> 1);
            }
        }
        let dis = |i: usize, si: usize, j: usize, sj: usize| disjoint[i * n + j] >> (2 * si + sj) & 1 == 1;
        for i in 0..n {
            for j in i + 1..n {
                if disjoint[i * n + j] == 0 {
                    continue;
                }
                for k in j + 1..n {
                    if disjoint[i * n + k] == 0 || disjoint[j * n + k] == 0 {
                        continue;
                    }
                    for choice in 0..8usize {
                        let (si, sj, sk) = (choice >> 2 & 1, choice >> 1 & 1, choice & 1);
                        if dis(i, si, j, sj) && dis(i, si, k, sk) && dis(j, sj, k, sk) {
                            return Some(FacingTriple {
                                hyperplanes: [i, j, k],
                                sides: [si, sj, sk],
                            });
                        }
                    }
                }
            }
        }
        None
    }

    /// Coordinates of every vertex in the Hamming cube indexed by the
    /// hyperplanes: bit `j` is set iff the vertex is on the far side of
    /// hyperplane `j` from `basepoint`.
    pub fn canonical_embedding(&self, g: &Graph, basepoint: usize) -> Result<EmbeddingTable> {
        g.check_vertex(basepoint)?;
        let coordinates = (0..g.len())
            .map(|v| {
                let mut bits = FixedBitSet::with_capacity(self.len());
                for (j, h) in self.list.iter().enumerate() {
                    if h.separates(basepoint, v) {
                        bits.insert(j);
                    }
                }
                bits
            })
            .collect();
        Ok(EmbeddingTable {
            basepoint,
            hyperplanes: self.list.iter().map(|h| h.id).collect(),
            coordinates,
        })
    }

    pub fn to_json(&self, g: &Graph) -> Vec<HyperplaneJson> {
        self.list.iter().map(|h| h.to_json(g)).collect()
    }
}

fn bron_kerbosch(
    adj: &[FixedBitSet],
    r: &mut Vec<usize>,
    mut p: FixedBitSet,
    mut x: FixedBitSet,
    out: &mut Vec<Vec<usize>>,
) {
    if p.is_clear() {
        if x.is_clear() {
            out.push(r.clone());
        }
        return;
    }
    let pivot = p
        .ones()
        .chain(x.ones())
        .max_by_key(|&u| p.intersection(&adj[u]).count())
        .expect("P is nonempty");
    let candidates: Vec<usize> = p.difference(&adj[pivot]).collect();
    for v in candidates {
        r.push(v);
        let mut np = p.clone();
        np.intersect_with(&adj[v]);
        let mut nx = x.clone();
        nx.intersect_with(&adj[v]);
        bron_kerbosch(adj, r, np, nx, out);
        r.pop();
        p.set(v, false);
        x.insert(v);
    }
}

/// Three hyperplanes (indices into [`Hyperplanes`]) and the chosen halfspace
/// of each; the chosen halfspaces are pairwise disjoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FacingTriple {
    pub hyperplanes: [usize; 3],
    pub sides: [usize; 3],
}

/// Isometric embedding into a Hamming cube.
#[derive(Clone, Debug)]
pub struct EmbeddingTable {
    pub basepoint: usize,
    /// Hyperplane ids, one per coordinate.
    pub hyperplanes: Vec<(usize, usize)>,
    pub coordinates: Vec<FixedBitSet>,
}

#[derive(Serialize)]
pub struct EmbeddingJson {
    pub basepoint: String,
    pub hyperplanes: Vec<[String; 2]>,
    pub coordinates: BTreeMap<String, String>,
}

impl EmbeddingTable {
    pub fn hamming(&self, u: usize, v: usize) -> usize {
        self.coordinates[u]
            .symmetric_difference(&self.coordinates[v])
            .count()
    }

    /// Coordinate vector of `v` as a 0/1 string.
    pub fn code(&self, v: usize) -> String {
        (0..self.hyperplanes.len())
            .map(|j| if self.coordinates[v].contains(j) { '1' } else { '0' })
            .collect()
    }

    pub fn to_json(&self, g: &Graph) -> EmbeddingJson {
        EmbeddingJson {
            basepoint: g.name(self.basepoint).to_string(),
            hyperplanes: self
                .hyperplanes
                .iter()
                .map(|&(u, v)| [g.name(u).to_string(), g.name(v).to_string()])
                .collect(),
            coordinates: (0..g.len())
                .map(|v| (g.name(v).to_string(), self.code(v)))
                .collect(),
        }
    }
}

/// Nearest point of `set` to `v`, found by exhaustive minimisation.
///
/// In a median graph the nearest point of a convex set is unique (the gate);
/// a tie is reported as [`Error::NonUniqueProjection`].
pub fn project(g: &Graph, set: &VertexSet, v: usize) -> Result<usize> {
    g.check_vertex(v)?;
    let row = g.distances().row(v);
    let best = set
        .iter()
        .map(|u| row[u])
        .min()
        .ok_or_else(|| Error::InvalidInput("projection onto the empty set".into()))?;
    let nearest: Vec<usize> = set.iter().filter(|&u| row[u] == best).collect();
    match nearest.as_slice() {
        [u] => Ok(*u),
        many => Err(Error::NonUniqueProjection {
            vertex: g.name(v).to_string(),
            candidates: many.iter().map(|&u| g.name(u).to_string()).collect(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, Family};

    fn path(names: &[&str]) -> Graph {
        Graph::new(names.iter().copied(), names.windows(2).map(|w| (w[0], w[1]))).unwrap()
    }

    #[test]
    fn class_counts() {
        let tree = generate(Family::RandomTree, &[12], Some(1)).unwrap();
        let hs = hyperplanes(&tree).unwrap();
        assert_eq!(hs.len(), 11);
        assert!(hs.iter().all(|h| h.edges.len() == 1));

        let q3 = generate(Family::Hypercube, &[3], None).unwrap();
        let hs = hyperplanes(&q3).unwrap();
        assert_eq!(hs.len(), 3);
        assert!(hs.iter().all(|h| h.edges.len() == 4 && h.dimension_sizes() == [4, 4]));

        let grid = generate(Family::Grid, &[3, 3], None).unwrap();
        assert_eq!(hyperplanes(&grid).unwrap().len(), 4);
    }

    #[test]
    fn ids_are_least_edges() {
        let q2 = generate(Family::Hypercube, &[2], None).unwrap();
        let hs = hyperplanes(&q2).unwrap();
        let ids: Vec<_> = hs.iter().map(|h| h.to_json(&q2).id).collect();
        assert_eq!(ids, [["00", "01"], ["00", "10"]]);
        assert!(hs.get(0).halfspaces[0].contains(q2.vertex("00").unwrap()));
    }

    #[test]
    fn non_median_input_is_rejected() {
        let c6 = generate(Family::Cycle, &[6], None).unwrap();
        assert!(matches!(
            hyperplanes(&c6),
            Err(Error::Halfspace { components: 1, .. })
        ));
    }

    #[test]
    fn separating_examples() {
        let q3 = generate(Family::Hypercube, &[3], None).unwrap();
        let hs = hyperplanes(&q3).unwrap();
        let (a, b) = (q3.vertex("000").unwrap(), q3.vertex("111").unwrap());
        assert_eq!(hs.separating(a, b).len(), 3);
        assert!(hs.separating(a, a).is_empty());

        let grid = generate(Family::Grid, &[3, 3], None).unwrap();
        let hs = hyperplanes(&grid).unwrap();
        let (x, y) = (grid.vertex("0_0").unwrap(), grid.vertex("2_1").unwrap());
        assert_eq!(hs.separating(x, y).len(), 3);
        assert_eq!(grid.distance(x, y), 3);
    }

    #[test]
    fn geodesic_examples() {
        let p = path(&["a", "b", "c"]);
        let hs = hyperplanes(&p).unwrap();
        assert!(hs.is_geodesic(&p, &[0, 1]).unwrap());
        assert!(!hs.is_geodesic(&p, &[0, 1, 0]).unwrap());
        assert!(hs.is_geodesic(&p, &[2]).unwrap());
        assert!(matches!(hs.is_geodesic(&p, &[0, 2]), Err(Error::NotAPath(_))));

        let grid = generate(Family::Grid, &[3, 3], None).unwrap();
        let hs = hyperplanes(&grid).unwrap();
        let stair: Vec<usize> = ["0_0", "0_1", "1_1", "1_2", "2_2"]
            .iter()
            .map(|s| grid.vertex(s).unwrap())
            .collect();
        assert!(hs.is_geodesic(&grid, &stair).unwrap());
    }

    #[test]
    fn hull_examples() {
        let q3 = generate(Family::Hypercube, &[3], None).unwrap();
        let hs = hyperplanes(&q3).unwrap();
        let n = q3.len();
        let v = q3.vertex("010").unwrap();
        assert_eq!(hs.convex_hull(&VertexSet::from_indices(n, [v])).unwrap().to_vec(), [v]);
        let w = q3.vertex("011").unwrap();
        assert_eq!(
            hs.convex_hull(&VertexSet::from_indices(n, [v, w])).unwrap().to_vec(),
            [v, w]
        );
        let (a, b) = (q3.vertex("000").unwrap(), q3.vertex("111").unwrap());
        assert_eq!(hs.convex_hull(&VertexSet::from_indices(n, [a, b])).unwrap().len(), 8);
        assert!(hs.convex_hull(&VertexSet::empty(n)).is_err());
    }

    #[test]
    fn facing_triple_examples() {
        let star = generate(Family::Star, &[3], None).unwrap();
        let hs = hyperplanes(&star).unwrap();
        let t = hs.facing_triple().unwrap();
        assert_eq!(t.hyperplanes, [0, 1, 2]);
        // the leaf side of each edge; the leaf is the larger name, so side 1
        assert_eq!(t.sides, [1, 1, 1]);

        let q3 = generate(Family::Hypercube, &[3], None).unwrap();
        assert_eq!(hyperplanes(&q3).unwrap().facing_triple(), None);

        let p4 = path(&["v1", "v2", "v3", "v4"]);
        assert_eq!(hyperplanes(&p4).unwrap().facing_triple(), None);
    }

    #[test]
    fn embedding_examples() {
        let p = path(&["a", "b", "c"]);
        let hs = hyperplanes(&p).unwrap();
        let emb = hs.canonical_embedding(&p, 0).unwrap();
        assert_eq!([emb.code(0), emb.code(1), emb.code(2)], ["00", "10", "11"]);

        let q3 = generate(Family::Hypercube, &[3], None).unwrap();
        let hs = hyperplanes(&q3).unwrap();
        let emb = hs.canonical_embedding(&q3, 0).unwrap();
        // hyperplane ids are 000-001, 000-010, 000-100: columns are reversed bits
        for v in 0..q3.len() {
            let label: String = q3.name(v).chars().rev().collect();
            assert_eq!(emb.code(v), label);
        }
    }

    #[test]
    fn maximal_families() {
        let grid = generate(Family::Grid, &[3, 3], None).unwrap();
        let hs = hyperplanes(&grid).unwrap();
        assert_eq!(hs.maximal_transverse_families().len(), 4);
        assert_eq!(hs.max_transverse_family(), 2);
        let q3 = generate(Family::Hypercube, &[3], None).unwrap();
        assert_eq!(hyperplanes(&q3).unwrap().maximal_transverse_families(), [vec![0, 1, 2]]);
    }

    #[test]
    fn projection_is_unique_onto_halfspaces() {
        let grid = generate(Family::Grid, &[3, 4], None).unwrap();
        let hs = hyperplanes(&grid).unwrap();
        for h in hs.iter() {
            for v in 0..grid.len() {
                let u = project(&grid, &h.halfspaces[0], v).unwrap();
                assert!(h.halfspaces[0].contains(u));
            }
        }
        let c4 = generate(Family::Cycle, &[4], None).unwrap();
        let far = VertexSet::from_indices(4, [1, 3]);
        assert!(matches!(
            project(&c4, &far, 0),
            Err(Error::NonUniqueProjection { .. })
        ));
    }
}
