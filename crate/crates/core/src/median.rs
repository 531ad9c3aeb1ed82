//! Intervals, medians and the exhaustive medianness oracle.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};

/// Vertices lying on some geodesic from `x` to `y`.
pub fn interval(g: &Graph, x: usize, y: usize) -> Result<VertexSet> {
    g.check_vertex(x)?;
    g.check_vertex(y)?;
    let d = g.distances();
    let dxy = d.get(x, y);
    Ok(VertexSet::from_indices(
        g.len(),
        (0..g.len()).filter(|&v| d.get(x, v) + d.get(v, y) == dxy),
    ))
}

/// All vertices in `I(x,y) ∩ I(y,z) ∩ I(z,x)`.
pub fn median_candidates(g: &Graph, x: usize, y: usize, z: usize) -> Result<Vec<usize>> {
    for v in [x, y, z] {
        g.check_vertex(v)?;
    }
    let d = g.distances();
    let (dxy, dyz, dzx) = (d.get(x, y), d.get(y, z), d.get(z, x));
    Ok((0..g.len())
        .filter(|&m| {
            let (mx, my, mz) = (d.get(m, x), d.get(m, y), d.get(m, z));
            mx + my == dxy && my + mz == dyz && mz + mx == dzx
        })
        .collect())
}

/// The unique median of `x`, `y`, `z`.
pub fn median(g: &Graph, x: usize, y: usize, z: usize) -> Result<usize> {
    let candidates = median_candidates(g, x, y, z)?;
    let names = || (g.name(x).into(), g.name(y).into(), g.name(z).into());
    match candidates.as_slice() {
        [m] => Ok(*m),
        [] => {
            let (a, b, c) = names();
            Err(Error::NoMedian(a, b, c))
        }
        many => {
            let (a, b, c) = names();
            let list = many.iter().map(|&m| g.name(m).to_string()).collect();
            Err(Error::NotUnique(a, b, c, list))
        }
    }
}

/// A triple without a unique median, with every candidate found for it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MedianWitness {
    pub triple: [usize; 3],
    pub candidates: Vec<usize>,
}

/// Outcome of [`medianness_oracle`]. `witness` is present exactly when the
/// graph is not median.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MedianReport {
    pub median: bool,
    pub witness: Option<MedianWitness>,
}

#[derive(Serialize)]
pub struct MedianReportJson {
    pub median: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessJson>,
}

#[derive(Serialize)]
pub struct WitnessJson {
    pub triple: [String; 3],
    pub candidates: Vec<String>,
}

impl MedianReport {
    pub fn to_json(&self, g: &Graph) -> MedianReportJson {
        MedianReportJson {
            median: self.median,
            witness: self.witness.as_ref().map(|w| WitnessJson {
                triple: w.triple.map(|v| g.name(v).to_string()),
                candidates: w.candidates.iter().map(|&v| g.name(v).to_string()).collect(),
            }),
        }
    }
}

/// Intervals `I(x, y)` for one fixed `x` and every `y`, as packed bitsets.
///
/// Built by a DP over the BFS layers from `x`: `I(x,y)` is `{y}` together
/// with the intervals of the neighbours of `y` one step closer to `x`.
struct IntervalRow {
    words: usize,
    bits: Vec<u64>,
}

impl IntervalRow {
    fn build(g: &Graph, x: usize) -> Self {
        let n = g.len();
        let words = n.div_ceil(64);
        let dist = g.distances().row(x);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| dist[v]);
        let mut bits = vec![0u64; n * words];
        let mut acc = vec![0u64; words];
        for &y in &order {
            acc.fill(0);
            acc[y / 64] |= 1 << (y % 64);
            for &p in g.neighbors(y) {
                if dist[p] + 1 == dist[y] {
                    for (a, b) in acc.iter_mut().zip(&bits[p * words..(p + 1) * words]) {
                        *a |= *b;
                    }
                }
            }
            bits[y * words..(y + 1) * words].copy_from_slice(&acc);
        }
        IntervalRow { words, bits }
    }

    #[inline]
    fn get(&self, y: usize) -> &[u64] {
        &self.bits[y * self.words..(y + 1) * self.words]
    }
}

/// Checks every vertex triple for a unique median.
///
/// Exhaustive `O(n^3)` scan over distinct triples with bitset pruning;
/// intended for graphs up to roughly 2000 vertices. The reported witness is
/// the lexicographically least failing triple.
pub fn medianness_oracle(g: &Graph) -> MedianReport {
    let n = g.len();
    let d = g.distances();
    let failing = (0..n).into_par_iter().find_map_first(|x| {
        let row = IntervalRow::build(g, x);
        for y in x + 1..n {
            let ixy = row.get(y);
            for z in y + 1..n {
                let ixz = row.get(z);
                let dyz = d.get(y, z) as u32;
                let (dy, dz) = (d.row(y), d.row(z));
                let mut count = 0;
                'scan: for (w, (a, b)) in ixy.iter().zip(ixz).enumerate() {
                    let mut word = a & b;
                    while word != 0 {
                        let m = w * 64 + word.trailing_zeros() as usize;
                        word &= word - 1;
                        if dy[m] + dz[m] == dyz {
                            count += 1;
                            if count > 1 {
                                break 'scan;
                            }
                        }
                    }
                }
                if count != 1 {
                    return Some([x, y, z]);
                }
            }
        }
        None
    });
    match failing {
        None => MedianReport {
            median: true,
            witness: None,
        },
        Some(triple) => {
            let [x, y, z] = triple;
            let candidates = median_candidates(g, x, y, z).expect("valid vertices");
            MedianReport {
                median: false,
                witness: Some(MedianWitness { triple, candidates }),
            }
        }
    }
}

/// `true` when `set` is closed under taking intervals.
pub fn is_convex(g: &Graph, set: &VertexSet) -> bool {
    convexity_violation(g, set).is_none()
}

/// A pair of members and a vertex on a geodesic between them that lies
/// outside `set`, if any.
pub fn convexity_violation(g: &Graph, set: &VertexSet) -> Option<(usize, usize, usize)> {
    let d = g.distances();
    let members = set.to_vec();
    for (i, &x) in members.iter().enumerate() {
        for &y in &members[i + 1..] {
            let dxy = d.get(x, y);
            if let Some(v) = (0..g.len())
                .find(|&v| !set.contains(v) && d.get(x, v) + d.get(v, y) == dxy)
            {
                return Some((x, y, v));
            }
        }
    }
    None
}
