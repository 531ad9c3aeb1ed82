//! Vertex links and the flag condition.

use std::collections::BTreeSet;

use serde::Serialize;

use super::CubeComplex;
use crate::error::Result;
use crate::graph::Graph;

/// The link of a vertex `v` in a cube complex.
///
/// Link vertices are the neighbours of `v`; a cell of dimension `k >= 1`
/// containing `v` contributes the `(k-1)`-simplex spanned by the neighbours of
/// `v` inside it. Simplices are stored as sorted lists of graph vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialLink {
    pub center: usize,
    pub vertices: Vec<usize>,
    pub simplices: BTreeSet<Vec<usize>>,
}

#[derive(Serialize)]
pub struct LinkJson {
    pub center: String,
    pub vertices: Vec<String>,
    pub simplices: Vec<Vec<String>>,
}

pub fn vertex_link(c: &CubeComplex, v: usize) -> Result<SimplicialLink> {
    let g = c.base();
    g.check_vertex(v)?;
    let mut simplices = BTreeSet::new();
    for cell in c.all_cells().filter(|cell| cell.dimension > 0 && cell.contains(v)) {
        let simplex: Vec<usize> = cell
            .vertices
            .iter()
            .copied()
            .filter(|&w| g.has_edge(v, w))
            .collect();
        debug_assert_eq!(simplex.len(), cell.dimension);
        simplices.insert(simplex);
    }
    Ok(SimplicialLink {
        center: v,
        vertices: g.neighbors(v).to_vec(),
        simplices,
    })
}

impl SimplicialLink {
    pub fn contains(&self, simplex: &[usize]) -> bool {
        self.simplices.contains(simplex)
    }

    /// Largest simplex dimension, or `None` for an empty link.
    pub fn dimension(&self) -> Option<usize> {
        self.simplices.iter().map(|s| s.len() - 1).max()
    }

    pub fn is_downward_closed(&self) -> bool {
        self.simplices.iter().all(|s| {
            s.len() == 1
                || (0..s.len()).all(|i| {
                    let mut face = s.clone();
                    face.remove(i);
                    self.simplices.contains(&face)
                })
        })
    }

    pub fn to_json(&self, g: &Graph) -> LinkJson {
        let names = |s: &[usize]| s.iter().map(|&v| g.name(v).to_string()).collect();
        LinkJson {
            center: g.name(self.center).to_string(),
            vertices: names(&self.vertices),
            simplices: self.simplices.iter().map(|s| names(s)).collect(),
        }
    }
}

/// Outcome of [`is_flag`]. `witness` is a smallest clique of the link's
/// one-skeleton that does not span a simplex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlagCheck {
    pub flag: bool,
    pub witness: Option<Vec<usize>>,
}

/// Checks that every clique of at least three vertices in the link's
/// one-skeleton spans a simplex.
///
/// Cliques are grown one size at a time from the edges, so the first missing
/// simplex found has the least possible size (and is lexicographically least
/// among those).
pub fn is_flag(link: &SimplicialLink) -> FlagCheck {
    let edges: BTreeSet<(usize, usize)> = link
        .simplices
        .iter()
        .filter(|s| s.len() == 2)
        .map(|s| (s[0], s[1]))
        .collect();
    let adjacent = |a: usize, b: usize| edges.contains(&(a.min(b), a.max(b)));
    let mut level: Vec<Vec<usize>> = edges.iter().map(|&(a, b)| vec![a, b]).collect();
    while !level.is_empty() {
        let mut next = Vec::new();
        for clique in &level {
            let last = *clique.last().expect("nonempty clique");
            for &w in link.vertices.iter().filter(|&&w| w > last) {
                if clique.iter().all(|&u| adjacent(u, w)) {
                    let mut bigger = clique.clone();
                    bigger.push(w);
                    next.push(bigger);
                }
            }
        }
        next.sort();
        if let Some(missing) = next.iter().find(|c| !link.contains(c)) {
            return FlagCheck {
                flag: false,
                witness: Some(missing.clone()),
            };
        }
        level = next;
    }
    FlagCheck {
        flag: true,
        witness: None,
    }
}
