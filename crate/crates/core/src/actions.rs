//! Finite group actions on median graphs.
//!
//! Groups are given by generating automorphisms and are never enumerated:
//! orbits are generator closures, and the invariant cube comes from the
//! balanced and unbalanced hyperplanes of the hull of a single orbit.

use std::collections::{BTreeMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::cubes::cube_dimension;
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::hyperplanes::Hyperplanes;
use crate::median::convexity_violation;

/// A validated automorphism; `image[v]` is the image of vertex `v`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Automorphism {
    image: Vec<usize>,
}

impl Automorphism {
    pub fn identity(n: usize) -> Self {
        Automorphism {
            image: (0..n).collect(),
        }
    }

    pub fn apply(&self, v: usize) -> usize {
        self.image[v]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.image
    }

    pub fn inverse(&self) -> Automorphism {
        let mut inv = vec![0; self.image.len()];
        for (v, &w) in self.image.iter().enumerate() {
            inv[w] = v;
        }
        Automorphism { image: inv }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn after(&self, other: &Automorphism) -> Automorphism {
        Automorphism {
            image: other.image.iter().map(|&v| self.image[v]).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(v, &w)| v == w)
    }

    pub fn image_of(&self, set: &VertexSet) -> VertexSet {
        set.map(&self.image)
    }

    pub fn to_map(&self, g: &Graph) -> BTreeMap<String, String> {
        self.image
            .iter()
            .enumerate()
            .map(|(v, &w)| (g.name(v).to_string(), g.name(w).to_string()))
            .collect()
    }
}

/// Validates a vertex permutation given by images.
///
/// A bijection that maps every edge to an edge also maps non-edges to
/// non-edges (the edge count is finite and preserved), so only edges are
/// checked.
pub fn check_automorphism(g: &Graph, image: &[usize]) -> Result<Automorphism> {
    let n = g.len();
    if image.len() != n {
        return Err(Error::NotBijective(format!(
            "map has {} entries for {n} vertices",
            image.len()
        )));
    }
    let mut hit = vec![false; n];
    for (v, &w) in image.iter().enumerate() {
        if w >= n {
            return Err(Error::NotBijective(format!(
                "image of `{}` is not a vertex",
                g.name(v)
            )));
        }
        if std::mem::replace(&mut hit[w], true) {
            return Err(Error::NotBijective(format!(
                "`{}` is the image of two vertices",
                g.name(w)
            )));
        }
    }
    for &(u, v) in g.edges() {
        let (gu, gv) = (image[u], image[v]);
        if !g.has_edge(gu, gv) {
            return Err(Error::NotAdjacencyPreserving {
                u: g.name(u).into(),
                v: g.name(v).into(),
                gu: g.name(gu).into(),
                gv: g.name(gv).into(),
                adjacent: true,
            });
        }
    }
    Ok(Automorphism {
        image: image.to_vec(),
    })
}

/// Validates a named vertex map, which must be total.
pub fn check_automorphism_named(
    g: &Graph,
    map: &BTreeMap<String, String>,
) -> Result<Automorphism> {
    let mut image = vec![usize::MAX; g.len()];
    for (from, to) in map {
        image[g.vertex(from)?] = g.vertex(to)?;
    }
    if let Some(v) = image.iter().position(|&w| w == usize::MAX) {
        return Err(Error::NotBijective(format!("`{}` has no image", g.name(v))));
    }
    check_automorphism(g, &image)
}

/// Generators of a finite group acting on one graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionGenerators {
    pub generators: Vec<Automorphism>,
}

/// Wire form: `{"generators": [{"v0": "v3", ...}, ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionJson {
    pub generators: Vec<BTreeMap<String, String>>,
}

impl ActionGenerators {
    pub fn new(generators: Vec<Automorphism>) -> Self {
        ActionGenerators { generators }
    }

    pub fn trivial() -> Self {
        ActionGenerators {
            generators: Vec::new(),
        }
    }

    pub fn from_json(g: &Graph, json: &ActionJson) -> Result<Self> {
        Ok(ActionGenerators {
            generators: json
                .generators
                .iter()
                .map(|m| check_automorphism_named(g, m))
                .collect::<Result<_>>()?,
        })
    }

    pub fn from_json_str(g: &Graph, s: &str) -> Result<Self> {
        let json: ActionJson = serde_json::from_str(s)?;
        Self::from_json(g, &json)
    }

    pub fn to_json(&self, g: &Graph) -> ActionJson {
        ActionJson {
            generators: self.generators.iter().map(|a| a.to_map(g)).collect(),
        }
    }

    /// Whether every generator maps `set` onto itself.
    pub fn stabilises(&self, set: &VertexSet) -> bool {
        self.generators.iter().all(|a| &a.image_of(set) == set)
    }
}

/// Closure of `{v}` under the generators. For permutations of a finite set
/// this is also closed under inverses.
pub fn orbit(g: &Graph, gens: &ActionGenerators, v: usize) -> Result<VertexSet> {
    g.check_vertex(v)?;
    let mut seen = VertexSet::from_indices(g.len(), [v]);
    let mut queue = VecDeque::from([v]);
    while let Some(u) = queue.pop_front() {
        for a in &gens.generators {
            let w = a.apply(u);
            if !seen.contains(w) {
                seen.insert(w);
                queue.push_back(w);
            }
        }
    }
    Ok(seen)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase", tag = "label")]
pub enum Balance {
    Balanced,
    /// `larger` indexes the strictly larger halfspace.
    Unbalanced { larger: usize },
}

/// Balance labels of the hyperplanes of a convex subgraph.
#[derive(Clone, Debug)]
pub struct BalanceTable {
    /// Induced subgraph on the convex set; vertex names are those of `g`.
    pub subgraph: Graph,
    /// Index in `g` of each subgraph vertex.
    pub embedding: Vec<usize>,
    pub hyperplanes: Hyperplanes,
    pub labels: Vec<Balance>,
}

#[derive(Serialize)]
pub struct BalanceEntryJson {
    pub id: [String; 2],
    #[serde(flatten)]
    pub balance: Balance,
    pub sizes: [usize; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub larger_halfspace: Option<Vec<String>>,
}

impl BalanceTable {
    /// Halfspace `s` of hyperplane `i`, in the vertex indices of `g`.
    pub fn halfspace_in_parent(&self, i: usize, s: usize, parent_len: usize) -> VertexSet {
        VertexSet::from_indices(
            parent_len,
            self.hyperplanes.get(i).halfspaces[s]
                .iter()
                .map(|v| self.embedding[v]),
        )
    }

    /// `J+` of each unbalanced hyperplane, in the vertex indices of `g`.
    pub fn larger_halfspaces(&self, parent_len: usize) -> Vec<VertexSet> {
        self.labels
            .iter()
            .enumerate()
            .filter_map(|(i, b)| match b {
                Balance::Unbalanced { larger } => {
                    Some(self.halfspace_in_parent(i, *larger, parent_len))
                }
                Balance::Balanced => None,
            })
            .collect()
    }

    pub fn balanced(&self) -> Vec<usize> {
        (0..self.labels.len())
            .filter(|&i| self.labels[i] == Balance::Balanced)
            .collect()
    }

    pub fn to_json(&self) -> Vec<BalanceEntryJson> {
        let s = &self.subgraph;
        self.hyperplanes
            .iter()
            .zip(&self.labels)
            .map(|(h, &balance)| BalanceEntryJson {
                id: [s.name(h.id.0).to_string(), s.name(h.id.1).to_string()],
                balance,
                sizes: h.dimension_sizes(),
                larger_halfspace: match balance {
                    Balance::Unbalanced { larger } => Some(
                        h.halfspaces[larger]
                            .iter()
                            .map(|v| s.name(v).to_string())
                            .collect(),
                    ),
                    Balance::Balanced => None,
                },
            })
            .collect()
    }
}

/// Labels each hyperplane of the subgraph induced on the convex set `sub`.
pub fn classify_hyperplanes(g: &Graph, sub: &VertexSet) -> Result<BalanceTable> {
    if sub.is_empty() {
        return Err(Error::NotConvex("empty set".into()));
    }
    if let Some((x, y, v)) = convexity_violation(g, sub) {
        return Err(Error::NotConvex(format!(
            "`{}` lies between `{}` and `{}` but outside the set",
            g.name(v),
            g.name(x),
            g.name(y)
        )));
    }
    let subgraph = g.induced_subgraph(sub)?;
    let embedding = g.embed_indices(&subgraph)?;
    let hyperplanes = Hyperplanes::compute(&subgraph)?;
    let labels = hyperplanes
        .iter()
        .map(|h| {
            let [a, b] = h.dimension_sizes();
            match a.cmp(&b) {
                std::cmp::Ordering::Equal => Balance::Balanced,
                std::cmp::Ordering::Greater => Balance::Unbalanced { larger: 0 },
                std::cmp::Ordering::Less => Balance::Unbalanced { larger: 1 },
            }
        })
        .collect();
    Ok(BalanceTable {
        subgraph,
        embedding,
        hyperplanes,
        labels,
    })
}

/// A cube stabilised by the action, with the data it was built from.
#[derive(Clone, Debug)]
pub struct InvariantCube {
    pub cube: VertexSet,
    pub dimension: usize,
    pub seed: usize,
    pub orbit: VertexSet,
    pub hull: VertexSet,
    pub table: BalanceTable,
}

#[derive(Serialize)]
pub struct InvariantCubeJson {
    pub cube: Vec<String>,
    pub dimension: usize,
    pub seed: String,
    pub orbit: Vec<String>,
    pub hull: Vec<String>,
    pub hyperplanes: Vec<BalanceEntryJson>,
}

impl InvariantCube {
    pub fn to_json(&self, g: &Graph) -> InvariantCubeJson {
        let names = |s: &VertexSet| s.iter().map(|v| g.name(v).to_string()).collect();
        InvariantCubeJson {
            cube: names(&self.cube),
            dimension: self.dimension,
            seed: g.name(self.seed).to_string(),
            orbit: names(&self.orbit),
            hull: names(&self.hull),
            hyperplanes: self.table.to_json(),
        }
    }
}

/// A cube of `g` fixed setwise by every generator.
///
/// Takes the orbit of the least vertex, its convex hull, and intersects the
/// larger halfspaces of the unbalanced hyperplanes of the hull. The result is
/// checked to be nonempty, to induce a cube and to be stabilised by each
/// generator; a failure of any of these is reported as an assertion error.
pub fn invariant_cube(g: &Graph, gens: &ActionGenerators) -> Result<InvariantCube> {
    let hs = Hyperplanes::compute(g)?;
    invariant_cube_with(g, &hs, gens)
}

pub fn invariant_cube_with(
    g: &Graph,
    hs: &Hyperplanes,
    gens: &ActionGenerators,
) -> Result<InvariantCube> {
    let seed = 0;
    let orbit = orbit(g, gens, seed)?;
    let hull = hs.convex_hull(&orbit)?;
    let table = classify_hyperplanes(g, &hull)?;
    let mut cube = hull.clone();
    for half in table.larger_halfspaces(g.len()) {
        cube.intersect_with(&half);
    }
    if cube.is_empty() {
        return Err(Error::Assertion(
            "larger halfspaces of the orbit hull have empty intersection".into(),
        ));
    }
    let dimension = cube_dimension(g, &cube.to_vec()).ok_or_else(|| {
        Error::Assertion(format!(
            "intersection {:?} does not induce a cube",
            cube.names(g)
        ))
    })?;
    if dimension != table.balanced().len() {
        return Err(Error::Assertion(format!(
            "cube has dimension {dimension} but the hull has {} balanced hyperplanes",
            table.balanced().len()
        )));
    }
    if let Some(i) = gens.generators.iter().position(|a| a.image_of(&cube) != cube) {
        return Err(Error::Assertion(format!("generator {i} moves the cube")));
    }
    Ok(InvariantCube {
        cube,
        dimension,
        seed,
        orbit,
        hull,
        table,
    })
}

/// One letter of a word in the generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Flip {
    /// Shortest word `w` found with `w(D) ⊆ D^c`, letters applied right to left.
    pub word: Vec<Letter>,
    /// Index of the halfspace `D`.
    pub halfspace: usize,
}

/// Default word-length bound: the diameter (in `g`) of the orbit of the
/// least vertex, and at least 1.
pub fn default_word_bound(g: &Graph, gens: &ActionGenerators) -> Result<usize> {
    let o = orbit(g, gens, 0)?.to_vec();
    let d = g.distances();
    let diam = o
        .iter()
        .flat_map(|&x| o.iter().map(move |&y| d.get(x, y)))
        .max()
        .unwrap_or(0);
    Ok(diam.max(1))
}

/// Searches group elements by word length up to `bound` for one mapping a
/// halfspace `D` of hyperplane `j` into its complement (equality allowed).
///
/// Group elements are deduplicated as permutations, so each is tested once
/// with a shortest word.
pub fn find_flip(
    hs: &Hyperplanes,
    j: usize,
    gens: &ActionGenerators,
    bound: usize,
) -> Result<Option<Flip>> {
    if j >= hs.len() {
        return Err(Error::InvalidInput(format!("no hyperplane with index {j}")));
    }
    let h = hs.get(j);
    let n = h.halfspaces[0].universe();
    let letters: Vec<(Letter, Automorphism)> = gens
        .generators
        .iter()
        .enumerate()
        .flat_map(|(i, a)| {
            let forward = (Letter { generator: i, inverse: false }, a.clone());
            let inv = a.inverse();
            let backward = (Letter { generator: i, inverse: true }, inv);
            let distinct = backward.1 != forward.1;
            std::iter::once(forward).chain(distinct.then_some(backward))
        })
        .collect();
    let mut seen: HashSet<Automorphism> = HashSet::from([Automorphism::identity(n)]);
    let mut frontier = vec![(Automorphism::identity(n), Vec::new())];
    for _ in 0..bound {
        let mut next = Vec::new();
        for (elem, word) in &frontier {
            for (letter, a) in &letters {
                let product = a.after(elem);
                if !seen.insert(product.clone()) {
                    continue;
                }
                let mut w = vec![*letter];
                w.extend_from_slice(word);
                for (s, d) in h.halfspaces.iter().enumerate() {
                    if product.image_of(d).is_disjoint(d) {
                        return Ok(Some(Flip {
                            word: w,
                            halfspace: s,
                        }));
                    }
                }
                next.push((product, w));
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(None)
}

/// Whether some word of length at most `bound` (default:
/// [`default_word_bound`]) flips hyperplane `j`.
pub fn is_flippable(
    g: &Graph,
    hs: &Hyperplanes,
    j: usize,
    gens: &ActionGenerators,
    bound: Option<usize>,
) -> Result<bool> {
    let bound = match bound {
        Some(b) => b,
        None => default_word_bound(g, gens)?,
    };
    Ok(find_flip(hs, j, gens, bound)?.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, Family};

    fn path4() -> Graph {
        Graph::new(
            ["v1", "v2", "v3", "v4"],
            [("v1", "v2"), ("v2", "v3"), ("v3", "v4")],
        )
        .unwrap()
    }

    fn reflection(g: &Graph) -> ActionGenerators {
        ActionGenerators::new(vec![check_automorphism(g, &[3, 2, 1, 0]).unwrap()])
    }

    fn square_rotation() -> (Graph, ActionGenerators) {
        let c4 = generate(Family::Cycle, &[4], None).unwrap();
        let rot = check_automorphism(&c4, &[1, 2, 3, 0]).unwrap();
        (c4, ActionGenerators::new(vec![rot]))
    }

    #[test]
    fn automorphism_checks() {
        let (c4, gens) = square_rotation();
        assert!(check_automorphism(&c4, &[0, 1, 2, 3]).unwrap().is_identity());
        assert_eq!(gens.generators[0].inverse().apply(0), 3);
        assert!(matches!(
            check_automorphism(&c4, &[0, 0, 2, 3]),
            Err(Error::NotBijective(_))
        ));
        assert!(matches!(
            check_automorphism(&c4, &[0, 1, 2]),
            Err(Error::NotBijective(_))
        ));

        // a - b - c - d with leaf e on b: swapping leaves a (depth 1) and d (depth 2)
        let t = Graph::new(
            ["a", "b", "c", "d", "e"],
            [("a", "b"), ("b", "c"), ("c", "d"), ("b", "e")],
        )
        .unwrap();
        match check_automorphism(&t, &[3, 1, 2, 0, 4]) {
            Err(Error::NotAdjacencyPreserving { u, v, adjacent, .. }) => {
                assert_eq!((u.as_str(), v.as_str(), adjacent), ("a", "b", true));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn orbits() {
        let p = path4();
        assert_eq!(orbit(&p, &ActionGenerators::trivial(), 2).unwrap().to_vec(), [2]);
        assert_eq!(orbit(&p, &reflection(&p), 0).unwrap().to_vec(), [0, 3]);
        let (c4, gens) = square_rotation();
        assert_eq!(orbit(&c4, &gens, 1).unwrap().len(), 4);
    }

    #[test]
    fn balance_examples() {
        let p3 = Graph::new(["a", "b", "c"], [("a", "b"), ("b", "c")]).unwrap();
        let t = classify_hyperplanes(&p3, &p3.vertex_set()).unwrap();
        assert_eq!(t.labels[0], Balance::Unbalanced { larger: 1 });
        assert_eq!(
            t.halfspace_in_parent(0, 1, 3).names(&p3),
            ["b", "c"]
        );

        let q3 = generate(Family::Hypercube, &[3], None).unwrap();
        let t = classify_hyperplanes(&q3, &q3.vertex_set()).unwrap();
        assert!(t.labels.iter().all(|&b| b == Balance::Balanced));

        let p = path4();
        let t = classify_hyperplanes(&p, &p.vertex_set()).unwrap();
        assert_eq!(t.balanced(), [1]);

        assert!(matches!(
            classify_hyperplanes(&p3, &VertexSet::from_indices(3, [0, 2])),
            Err(Error::NotConvex(_))
        ));
    }

    #[test]
    fn invariant_cube_examples() {
        let q3 = generate(Family::Hypercube, &[3], None).unwrap();
        let c = invariant_cube(&q3, &ActionGenerators::trivial()).unwrap();
        assert_eq!((c.cube.to_vec(), c.dimension), (vec![0], 0));

        let (c4, gens) = square_rotation();
        let c = invariant_cube(&c4, &gens).unwrap();
        assert_eq!((c.cube.len(), c.dimension), (4, 2));

        let p = path4();
        let c = invariant_cube(&p, &reflection(&p)).unwrap();
        assert_eq!(c.cube.names(&p), ["v2", "v3"]);
        assert_eq!(c.dimension, 1);
    }

    #[test]
    fn invariant_cube_on_hypercube_symmetries() {
        // coordinate swap fixing 000 and 111: cube is the orbit of 000, a vertex
        let q3 = generate(Family::Hypercube, &[3], None).unwrap();
        let swap: Vec<usize> = (0..8)
            .map(|x| {
                let (b0, b1) = (x & 1, (x >> 1) & 1);
                (x & !3) | (b0 << 1) | b1
            })
            .collect();
        let flip: Vec<usize> = (0..8).map(|x| x ^ 4).collect();
        let gens = ActionGenerators::new(vec![
            check_automorphism(&q3, &swap).unwrap(),
            check_automorphism(&q3, &flip).unwrap(),
        ]);
        let c = invariant_cube(&q3, &gens).unwrap();
        assert_eq!(c.dimension, 1);
        assert!(gens.stabilises(&c.cube));
    }

    #[test]
    fn flippability() {
        let p = path4();
        let hs = Hyperplanes::compute(&p).unwrap();
        let outer = hs.class_of(&p, 0, 1).unwrap();
        let middle = hs.class_of(&p, 1, 2).unwrap();
        let trivial = ActionGenerators::trivial();
        for j in 0..hs.len() {
            assert!(!is_flippable(&p, &hs, j, &trivial, None).unwrap());
        }
        let r = reflection(&p);
        assert!(is_flippable(&p, &hs, outer, &r, None).unwrap());
        let flip = find_flip(&hs, middle, &r, 1).unwrap().unwrap();
        assert_eq!(flip.word.len(), 1);
        assert_eq!(default_word_bound(&p, &r).unwrap(), 3);
    }

    #[test]
    fn square_rotation_flips_with_words_of_length_two() {
        let (c4, gens) = square_rotation();
        let hs = Hyperplanes::compute(&c4).unwrap();
        for j in 0..hs.len() {
            assert!(is_flippable(&c4, &hs, j, &gens, Some(2)).unwrap());
        }
        assert!(find_flip(&hs, 0, &gens, 0).unwrap().is_none());
    }

    #[test]
    fn action_json_round_trip() {
        let p = path4();
        let r = reflection(&p);
        let text = serde_json::to_string(&r.to_json(&p)).unwrap();
        assert_eq!(text, r#"{"generators":[{"v1":"v4","v2":"v3","v3":"v2","v4":"v1"}]}"#);
        assert_eq!(ActionGenerators::from_json_str(&p, &text).unwrap(), r);
        assert!(ActionGenerators::from_json_str(&p, r#"{"generators":[{"v1":"v1"}]}"#).is_err());
    }
}
