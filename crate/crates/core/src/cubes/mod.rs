//! Cube completion of a graph.
//!
//! Cells are the induced subgraphs isomorphic to hypercube skeleta. They are
//! built one dimension at a time: a `k`-cube is the union of two disjoint
//! `(k-1)`-cubes joined by a matching, so every `k`-cube is found from its
//! face through the least vertex.

mod link;
mod local;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::hyperplanes::Hyperplanes;

pub use link::{is_flag, vertex_link, FlagCheck, SimplicialLink};
pub use local::{
    verylocal_check, verylocal_check_with, Condition1, Condition2, Condition3, LocalOptions,
    LocalReport, Tristate,
};

/// Default ceiling on the total number of cells.
pub const DEFAULT_CELL_CEILING: usize = 1_000_000;

/// Environment variable overriding the cell ceiling in the CLI.
pub const CELL_CEILING_ENV: &str = "MEDIANFORGE_CELL_CEILING";

/// A cell of the cube completion: `2^dimension` vertices, sorted.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cube {
    pub dimension: usize,
    pub vertices: Vec<usize>,
}

impl Cube {
    pub fn contains(&self, v: usize) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    pub fn names(&self, g: &Graph) -> Vec<String> {
        self.vertices.iter().map(|&v| g.name(v).to_string()).collect()
    }
}

/// Dimension `k` if the subgraph of `g` induced on `vertices` is the
/// one-skeleton of a `k`-cube.
///
/// Labels every vertex by the set of directions separating it from the least
/// vertex, then checks the labels form the full Hamming cube with exactly the
/// Hamming-one pairs as edges.
pub fn cube_dimension(g: &Graph, vertices: &[usize]) -> Option<usize> {
    let mut sorted = vertices.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != vertices.len() {
        return None;
    }
    cube_labels(g, &sorted).map(|labels| labels.len().trailing_zeros() as usize)
}

/// Hamming labels of a sorted vertex set inducing a cube skeleton, aligned
/// with `sorted` and relative to its least vertex.
fn cube_labels(g: &Graph, sorted: &[usize]) -> Option<Vec<usize>> {
    let size = sorted.len();
    if size == 0 || !size.is_power_of_two() {
        return None;
    }
    let k = size.trailing_zeros() as usize;
    if k == 0 {
        return Some(vec![0]);
    }
    let pos = |v: usize| sorted.binary_search(&v).ok();
    let local_adj: Vec<Vec<usize>> = sorted
        .iter()
        .map(|&v| g.neighbors(v).iter().filter_map(|&w| pos(w)).collect())
        .collect();
    if local_adj.iter().any(|nb| nb.len() != k) {
        return None;
    }
    let mut depth = vec![usize::MAX; size];
    let mut label = vec![0usize; size];
    depth[0] = 0;
    let mut queue = std::collections::VecDeque::from([0usize]);
    let mut order = Vec::with_capacity(size);
    while let Some(u) = queue.pop_front() {
        order.push(u);
        for &w in &local_adj[u] {
            if depth[w] == usize::MAX {
                depth[w] = depth[u] + 1;
                queue.push_back(w);
            }
        }
    }
    if order.len() != size {
        return None;
    }
    for (i, &w) in local_adj[0].iter().enumerate() {
        label[w] = 1 << i;
    }
    for &u in &order {
        if depth[u] < 2 {
            continue;
        }
        label[u] = local_adj[u]
            .iter()
            .filter(|&&w| depth[w] + 1 == depth[u])
            .fold(0, |acc, &w| acc | label[w]);
        if label[u].count_ones() as usize != depth[u] {
            return None;
        }
    }
    let mut seen = vec![false; size];
    for &l in &label {
        if l >= size || std::mem::replace(&mut seen[l], true) {
            return None;
        }
    }
    let hamming_one = local_adj.iter().enumerate().all(|(u, nb)| {
        nb.iter().all(|&w| (label[u] ^ label[w]).count_ones() == 1)
    });
    hamming_one.then_some(label)
}

/// The cube completion (or any face-closed family of cubes) over a graph.
#[derive(Clone, Debug)]
pub struct CubeComplex {
    base: Graph,
    cells: Vec<Vec<Cube>>,
}

/// Wire form: `{"f_vector": [...], "cells": {"2": [[...]], ...}}`; cells of
/// dimension 0 and 1 are the vertices and edges of the base graph and are
/// omitted.
#[derive(Serialize)]
pub struct ComplexJson {
    pub f_vector: Vec<usize>,
    pub cells: BTreeMap<String, Vec<Vec<String>>>,
}

/// Cell ceiling from [`CELL_CEILING_ENV`], falling back to
/// [`DEFAULT_CELL_CEILING`].
pub fn cell_ceiling_from_env() -> Result<usize> {
    match std::env::var(CELL_CEILING_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| {
            Error::Usage(format!("{CELL_CEILING_ENV} must be a non-negative integer, got `{v}`"))
        }),
        Err(_) => Ok(DEFAULT_CELL_CEILING),
    }
}

/// Cube completion of `g` with the default cell ceiling.
pub fn enumerate_cubes(g: &Graph) -> Result<CubeComplex> {
    enumerate_cubes_with_ceiling(g, DEFAULT_CELL_CEILING)
}

/// Cube completion of `g`; fails with [`Error::ResourceLimit`] once more than
/// `ceiling` cells have been produced.
pub fn enumerate_cubes_with_ceiling(g: &Graph, ceiling: usize) -> Result<CubeComplex> {
    let over = |count: usize| {
        Error::ResourceLimit(format!(
            "cube completion exceeds {ceiling} cells (reached {count})"
        ))
    };
    let mut total = g.len() + g.edge_count();
    if total > ceiling {
        return Err(over(total));
    }
    let mut cells = vec![
        (0..g.len())
            .map(|v| Cube {
                dimension: 0,
                vertices: vec![v],
            })
            .collect::<Vec<_>>(),
        g.edges()
            .iter()
            .map(|&(u, v)| Cube {
                dimension: 1,
                vertices: vec![u, v],
            })
            .collect(),
    ];
    if g.edge_count() == 0 {
        cells.pop();
    }
    loop {
        let prev = cells.last().expect("at least vertices");
        let k = prev[0].dimension + 1;
        if k == 1 {
            break;
        }
        let mut containing: Vec<Vec<usize>> = vec![Vec::new(); g.len()];
        for (i, c) in prev.iter().enumerate() {
            for &v in &c.vertices {
                containing[v].push(i);
            }
        }
        let mut next: Vec<Cube> = prev
            .par_iter()
            .flat_map_iter(|c| {
                let c0 = c.vertices[0];
                let mut found = Vec::new();
                for &w in g.neighbors(c0) {
                    if c.contains(w) {
                        continue;
                    }
                    for &j in &containing[w] {
                        let other = &prev[j];
                        if other.vertices.iter().any(|&x| c.contains(x)) {
                            continue;
                        }
                        let mut union: Vec<usize> =
                            c.vertices.iter().chain(&other.vertices).copied().collect();
                        union.sort_unstable();
                        if cube_dimension(g, &union) == Some(k) {
                            found.push(Cube {
                                dimension: k,
                                vertices: union,
                            });
                        }
                    }
                }
                found
            })
            .collect();
        next.sort_unstable();
        next.dedup();
        if next.is_empty() {
            break;
        }
        total += next.len();
        if total > ceiling {
            return Err(over(total));
        }
        cells.push(next);
    }
    Ok(CubeComplex {
        base: g.clone(),
        cells,
    })
}

impl CubeComplex {
    pub fn base(&self) -> &Graph {
        &self.base
    }

    /// Highest cell dimension.
    pub fn dimension(&self) -> usize {
        self.cells.len() - 1
    }

    /// Cells of dimension `k` in lexicographic vertex-set order.
    pub fn cells(&self, k: usize) -> &[Cube] {
        self.cells.get(k).map_or(&[], Vec::as_slice)
    }

    pub fn all_cells(&self) -> impl Iterator<Item = &Cube> {
        self.cells.iter().flatten()
    }

    pub fn f_vector(&self) -> Vec<usize> {
        self.cells.iter().map(Vec::len).collect()
    }

    /// Alternating sum of the f-vector.
    pub fn euler_characteristic(&self) -> i64 {
        self.f_vector()
            .iter()
            .enumerate()
            .map(|(k, &f)| if k % 2 == 0 { f as i64 } else { -(f as i64) })
            .sum()
    }

    /// The sub-complex of cells of dimension at most `max_dim`.
    pub fn skeleton(&self, max_dim: usize) -> CubeComplex {
        CubeComplex {
            base: self.base.clone(),
            cells: self.cells.iter().take(max_dim + 1).cloned().collect(),
        }
    }

    pub fn contains_cell(&self, cube: &Cube) -> bool {
        self.cells(cube.dimension).binary_search(cube).is_ok()
    }

    /// Whether every codimension-one face of every cell is itself a cell.
    pub fn is_face_closed(&self) -> bool {
        self.all_cells()
            .filter(|c| c.dimension > 0)
            .all(|c| facets(&self.base, c).iter().all(|f| self.contains_cell(f)))
    }

    /// Cells not contained in a cell of the next dimension.
    pub fn maximal_cells(&self) -> Vec<&Cube> {
        let mut out = Vec::new();
        for k in 0..self.cells.len() {
            let higher = self.cells(k + 1);
            let mut containing: Vec<Vec<usize>> = vec![Vec::new(); self.base.len()];
            for (i, c) in higher.iter().enumerate() {
                containing[c.vertices[0]].push(i);
                for &v in &c.vertices {
                    if v != c.vertices[0] {
                        containing[v].push(i);
                    }
                }
            }
            for c in self.cells(k) {
                let covered = containing[c.vertices[0]].iter().any(|&i| {
                    c.vertices.iter().all(|&v| higher[i].contains(v))
                });
                if !covered {
                    out.push(c);
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> ComplexJson {
        ComplexJson {
            f_vector: self.f_vector(),
            cells: self
                .cells
                .iter()
                .skip(2)
                .map(|list| {
                    let k = list[0].dimension;
                    (k.to_string(), list.iter().map(|c| c.names(&self.base)).collect())
                })
                .collect(),
        }
    }
}

/// The `2k` codimension-one faces of a `k`-cube.
pub fn facets(g: &Graph, cube: &Cube) -> Vec<Cube> {
    let k = cube.dimension;
    if k == 0 {
        return Vec::new();
    }
    let labels = cube_labels(g, &cube.vertices).expect("cells are cube skeleta");
    let mut out = Vec::with_capacity(2 * k);
    for i in 0..k {
        for bit in [0, 1 << i] {
            let vertices: Vec<usize> = cube
                .vertices
                .iter()
                .zip(&labels)
                .filter(|&(_, &l)| l & (1 << i) == bit)
                .map(|(&v, _)| v)
                .collect();
            out.push(Cube {
                dimension: k - 1,
                vertices,
            });
        }
    }
    out
}

/// A maximal cube with the hyperplanes crossing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaximalCube {
    pub cube: Cube,
    pub hyperplanes: Vec<usize>,
}

/// Maximal cubes of the complex, each paired with the set of hyperplanes of
/// the base graph that cross it (sorted indices into `hs`).
pub fn maximal_cubes_with(c: &CubeComplex, hs: &Hyperplanes) -> Vec<MaximalCube> {
    let g = c.base();
    c.maximal_cells()
        .into_iter()
        .map(|cube| {
            let mut crossing: Vec<usize> = Vec::new();
            for (i, &u) in cube.vertices.iter().enumerate() {
                for &v in &cube.vertices[i + 1..] {
                    if let Some(h) = hs.class_of(g, u, v) {
                        crossing.push(h);
                    }
                }
            }
            crossing.sort_unstable();
            crossing.dedup();
            MaximalCube {
                cube: cube.clone(),
                hyperplanes: crossing,
            }
        })
        .collect()
}

/// Maximal cubes paired with their crossing hyperplanes; computes the
/// hyperplanes of the base graph first.
pub fn maximal_cubes(c: &CubeComplex) -> Result<Vec<MaximalCube>> {
    let hs = Hyperplanes::compute(c.base())?;
    Ok(maximal_cubes_with(c, &hs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, Family};

    #[test]
    fn f_vectors() {
        let q3 = generate(Family::Hypercube, &[3], None).unwrap();
        let c = enumerate_cubes(&q3).unwrap();
        assert_eq!(c.f_vector(), [8, 12, 6, 1]);
        assert_eq!(c.euler_characteristic(), 1);
        assert!(c.is_face_closed());

        let tree = generate(Family::RandomTree, &[30], Some(5)).unwrap();
        assert_eq!(enumerate_cubes(&tree).unwrap().f_vector(), [30, 29]);

        let grid = generate(Family::Grid, &[3, 3], None).unwrap();
        assert_eq!(enumerate_cubes(&grid).unwrap().f_vector(), [9, 12, 4]);

        let q5 = generate(Family::Hypercube, &[5], None).unwrap();
        // k-faces of Q5: C(5,k) 2^(5-k)
        assert_eq!(enumerate_cubes(&q5).unwrap().f_vector(), [32, 80, 80, 40, 10, 1]);
    }

    #[test]
    fn chorded_square_is_not_a_cell() {
        let k4 = Graph::new(
            ["a", "b", "c", "d"],
            [("a", "b"), ("b", "c"), ("c", "d"), ("d", "a"), ("a", "c")],
        )
        .unwrap();
        assert_eq!(enumerate_cubes(&k4).unwrap().f_vector(), [4, 5]);
        assert_eq!(cube_dimension(&k4, &[0, 1, 2, 3]), None);
    }

    #[test]
    fn cube_dimension_rejects_k44_minus_nothing() {
        // K_{3,3} plus two vertices: 8 vertices, not 3-regular
        let k33 = generate(Family::CompleteBipartite, &[4, 4], None).unwrap();
        assert_eq!(cube_dimension(&k33, &(0..8).collect::<Vec<_>>()), None);
        let q3 = generate(Family::Hypercube, &[3], None).unwrap();
        assert_eq!(cube_dimension(&q3, &(0..8).collect::<Vec<_>>()), Some(3));
        assert_eq!(cube_dimension(&q3, &[0, 1, 2, 3]), Some(2));
        assert_eq!(cube_dimension(&q3, &[0, 1, 2, 4]), None);
    }

    #[test]
    fn ceiling_is_enforced() {
        let q4 = generate(Family::Hypercube, &[4], None).unwrap();
        assert!(matches!(
            enumerate_cubes_with_ceiling(&q4, 50),
            Err(Error::ResourceLimit(_))
        ));
        assert!(enumerate_cubes_with_ceiling(&q4, 81).is_ok());
    }

    #[test]
    fn maximal_cube_examples() {
        let q3 = generate(Family::Hypercube, &[3], None).unwrap();
        let max = maximal_cubes(&enumerate_cubes(&q3).unwrap()).unwrap();
        assert_eq!(max.len(), 1);
        assert_eq!(max[0].cube.dimension, 3);
        assert_eq!(max[0].hyperplanes, [0, 1, 2]);

        let tree = generate(Family::RandomTree, &[10], Some(2)).unwrap();
        let max = maximal_cubes(&enumerate_cubes(&tree).unwrap()).unwrap();
        assert_eq!(max.len(), 9);
        assert!(max.iter().all(|m| m.cube.dimension == 1 && m.hyperplanes.len() == 1));

        let grid = generate(Family::Grid, &[3, 3], None).unwrap();
        let max = maximal_cubes(&enumerate_cubes(&grid).unwrap()).unwrap();
        assert_eq!(max.len(), 4);
        assert!(max.iter().all(|m| m.cube.dimension == 2));
    }

    #[test]
    fn facets_of_a_square() {
        let q2 = generate(Family::Hypercube, &[2], None).unwrap();
        let c = enumerate_cubes(&q2).unwrap();
        let faces = facets(&q2, &c.cells(2)[0]);
        assert_eq!(faces.len(), 4);
        assert!(faces.iter().all(|f| c.contains_cell(f)));
    }

    #[test]
    fn complex_json_shape() {
        let q3 = generate(Family::Hypercube, &[3], None).unwrap();
        let json = serde_json::to_value(enumerate_cubes(&q3).unwrap().to_json()).unwrap();
        assert_eq!(json["f_vector"], serde_json::json!([8, 12, 6, 1]));
        assert_eq!(json["cells"]["2"].as_array().unwrap().len(), 6);
        assert_eq!(json["cells"]["3"][0].as_array().unwrap().len(), 8);
    }
}
