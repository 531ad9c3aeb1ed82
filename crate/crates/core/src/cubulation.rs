//! Finite wallspaces and their dual median graphs.
//!
//! A vertex of the dual is a consistent orientation: one block chosen per
//! wall such that any two chosen blocks meet. Orientations are written as bit
//! strings, bit `i` being the index (0 or 1) of the block chosen for wall `i`
//! in input order; edges join orientations that differ on a single wall.

use std::collections::{BTreeSet, HashMap};

use fixedbitset::FixedBitSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Abort dualisation above this many consistent orientations.
pub const MAX_ORIENTATIONS: usize = 1 << 18;

/// A finite set of points with a family of walls (bipartitions).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "WallspaceJson", into = "WallspaceJson")]
pub struct Wallspace {
    points: Vec<String>,
    index: HashMap<String, usize>,
    /// `walls[i][s]`: points of block `s` of wall `i`.
    walls: Vec<[FixedBitSet; 2]>,
}

/// Wire form: `{"points": [...], "walls": [[["p1"], ["p2", "p3"]], ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WallspaceJson {
    pub points: Vec<String>,
    pub walls: Vec<[Vec<String>; 2]>,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidWallspace(msg.into())
}

impl Wallspace {
    /// Builds a wallspace from named blocks, rejecting walls that do not
    /// partition the points, empty blocks and repeated walls.
    pub fn new<S: AsRef<str>>(points: &[S], walls: &[[Vec<S>; 2]]) -> Result<Self> {
        let points: Vec<String> = points.iter().map(|p| p.as_ref().to_string()).collect();
        let mut index = HashMap::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            if index.insert(p.clone(), i).is_some() {
                return Err(invalid(format!("duplicate point `{p}`")));
            }
        }
        if walls.is_empty() {
            return Err(invalid("at least one wall is required"));
        }
        let n = points.len();
        let mut seen = BTreeSet::new();
        let mut parsed = Vec::with_capacity(walls.len());
        for (w, wall) in walls.iter().enumerate() {
            let mut blocks = [FixedBitSet::with_capacity(n), FixedBitSet::with_capacity(n)];
            for (s, block) in wall.iter().enumerate() {
                for p in block {
                    let p = p.as_ref();
                    let &i = index
                        .get(p)
                        .ok_or_else(|| invalid(format!("wall {w}: unknown point `{p}`")))?;
                    if blocks[0].contains(i) || blocks[1].contains(i) {
                        return Err(invalid(format!("wall {w}: point `{p}` listed twice")));
                    }
                    blocks[s].insert(i);
                }
                if blocks[s].is_clear() {
                    return Err(invalid(format!("wall {w}: empty block")));
                }
            }
            if blocks[0].count_ones(..) + blocks[1].count_ones(..) != n {
                return Err(invalid(format!("wall {w}: blocks do not cover the points")));
            }
            let key: Vec<usize> = if blocks[0].contains(0) {
                blocks[0].ones().collect()
            } else {
                blocks[1].ones().collect()
            };
            if !seen.insert(key) {
                return Err(invalid(format!("wall {w} repeats an earlier wall")));
            }
            parsed.push(blocks);
        }
        Ok(Wallspace {
            points,
            index,
            walls: parsed,
        })
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> WallspaceJson {
        WallspaceJson::from(self.clone())
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn point(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| invalid(format!("unknown point `{name}`")))
    }

    pub fn wall_count(&self) -> usize {
        self.walls.len()
    }

    /// Block `s` of wall `w`.
    pub fn block(&self, w: usize, s: usize) -> &FixedBitSet {
        &self.walls[w][s]
    }

    /// Index of the block of wall `w` containing point `p`.
    pub fn side(&self, w: usize, p: usize) -> usize {
        usize::from(self.walls[w][1].contains(p))
    }

    /// Number of walls with `p` and `q` on opposite sides.
    pub fn separating_walls(&self, p: usize, q: usize) -> usize {
        (0..self.walls.len())
            .filter(|&w| self.side(w, p) != self.side(w, q))
            .count()
    }
}

impl TryFrom<WallspaceJson> for Wallspace {
    type Error = Error;

    fn try_from(json: WallspaceJson) -> Result<Self> {
        Wallspace::new(&json.points, &json.walls)
    }
}

impl From<Wallspace> for WallspaceJson {
    fn from(ws: Wallspace) -> Self {
        let names = |b: &FixedBitSet| b.ones().map(|i| ws.points[i].clone()).collect();
        WallspaceJson {
            walls: ws
                .walls
                .iter()
                .map(|[a, b]| [names(a), names(b)])
                .collect(),
            points: ws.points.clone(),
        }
    }
}

/// A choice of block per wall; bit `i` set means block 1 of wall `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Orientation(pub FixedBitSet);

impl Orientation {
    pub fn choice(&self, w: usize) -> usize {
        usize::from(self.0.contains(w))
    }

    /// Bit-string name, one character per wall.
    pub fn name(&self) -> String {
        (0..self.0.len())
            .map(|i| if self.0.contains(i) { '1' } else { '0' })
            .collect()
    }

    /// Whether every two chosen blocks intersect.
    pub fn is_consistent(&self, ws: &Wallspace) -> bool {
        let k = ws.wall_count();
        (0..k).all(|i| {
            (i + 1..k).all(|j| {
                !ws.block(i, self.choice(i))
                    .is_disjoint(ws.block(j, self.choice(j)))
            })
        })
    }
}

/// Orients every wall towards `p`.
pub fn principal_orientation(ws: &Wallspace, p: usize) -> Result<Orientation> {
    if p >= ws.points.len() {
        return Err(invalid(format!("unknown point index {p}")));
    }
    let mut bits = FixedBitSet::with_capacity(ws.wall_count());
    for w in 0..ws.wall_count() {
        bits.set(w, ws.side(w, p) == 1);
    }
    Ok(Orientation(bits))
}

/// All consistent orientations in lexicographic bit-string order.
///
/// Depth-first over walls in input order, keeping only choices compatible
/// with every earlier one.
pub fn consistent_orientations(ws: &Wallspace) -> Result<Vec<Orientation>> {
    let k = ws.wall_count();
    // compatible[2i+s] has bit 2j+t set when block s of wall i meets block t of wall j
    let compatible: Vec<FixedBitSet> = (0..2 * k)
        .map(|a| {
            let mut row = FixedBitSet::with_capacity(2 * k);
            for b in 0..2 * k {
                row.set(b, !ws.block(a / 2, a % 2).is_disjoint(ws.block(b / 2, b % 2)));
            }
            row
        })
        .collect();
    let mut out = Vec::new();
    let mut choice = vec![0usize; k];
    // allowed[i]: bits still compatible with the choices for walls before i
    let mut allowed = vec![FixedBitSet::with_capacity(2 * k); k + 1];
    allowed[0].insert_range(..);
    fn search(
        i: usize,
        k: usize,
        compatible: &[FixedBitSet],
        allowed: &mut [FixedBitSet],
        choice: &mut [usize],
        out: &mut Vec<Orientation>,
    ) -> Result<()> {
        if i == k {
            if out.len() == MAX_ORIENTATIONS {
                return Err(Error::ResourceLimit(format!(
                    "more than {MAX_ORIENTATIONS} consistent orientations"
                )));
            }
            let mut bits = FixedBitSet::with_capacity(k);
            for (w, &s) in choice.iter().enumerate() {
                bits.set(w, s == 1);
            }
            out.push(Orientation(bits));
            return Ok(());
        }
        for s in 0..2 {
            if !allowed[i].contains(2 * i + s) {
                continue;
            }
            choice[i] = s;
            let mut next = allowed[i].clone();
            next.intersect_with(&compatible[2 * i + s]);
            allowed[i + 1] = next;
            search(i + 1, k, compatible, allowed, choice, out)?;
        }
        Ok(())
    }
    search(0, k, &compatible, &mut allowed, &mut choice, &mut out)?;
    Ok(out)
}

/// The dual median graph of a wallspace.
#[derive(Clone, Debug)]
pub struct Dual {
    pub graph: Graph,
    /// Orientation of each graph vertex, aligned with vertex indices.
    pub orientations: Vec<Orientation>,
    /// Graph vertex of the principal orientation of each point.
    pub point_vertex: Vec<usize>,
}

#[derive(Serialize)]
pub struct DualJson {
    pub graph: crate::graph::GraphJson,
    pub points: std::collections::BTreeMap<String, String>,
}

impl Dual {
    pub fn to_json(&self, ws: &Wallspace) -> DualJson {
        DualJson {
            graph: self.graph.to_json(),
            points: ws
                .points()
                .iter()
                .zip(&self.point_vertex)
                .map(|(p, &v)| (p.clone(), self.graph.name(v).to_string()))
                .collect(),
        }
    }
}

pub fn dualize(ws: &Wallspace) -> Result<Dual> {
    let orientations = consistent_orientations(ws)?;
    let lookup: HashMap<&FixedBitSet, usize> = orientations
        .iter()
        .enumerate()
        .map(|(i, o)| (&o.0, i))
        .collect();
    let names: Vec<String> = orientations.iter().map(Orientation::name).collect();
    let mut edges = Vec::new();
    for (i, o) in orientations.iter().enumerate() {
        for w in 0..ws.wall_count() {
            let mut flipped = o.0.clone();
            flipped.toggle(w);
            if let Some(&j) = lookup.get(&flipped) {
                if i < j {
                    edges.push((names[i].clone(), names[j].clone()));
                }
            }
        }
    }
    let graph = Graph::new(names.iter().cloned(), edges).map_err(|e| match e {
        Error::Disconnected { components } => Error::Assertion(format!(
            "dual graph has {components} components; expected a connected graph"
        )),
        other => other,
    })?;
    // names are equal-length bit strings, so graph order is enumeration order
    debug_assert!((0..graph.len()).all(|v| graph.name(v) == names[v]));
    let point_vertex = (0..ws.points().len())
        .map(|p| {
            let o = principal_orientation(ws, p)?;
            lookup
                .get(&o.0)
                .copied()
                .ok_or_else(|| Error::Assertion("principal orientation is inconsistent".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Dual {
        graph,
        orientations,
        point_vertex,
    })
}

/// Outcome of [`wall_distance_check`]: every point pair whose dual distance
/// differs from its wall count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WallDistanceReport {
    pub pairs_checked: usize,
    /// `(p, q, graph distance, separating walls)`.
    pub violations: Vec<(usize, usize, usize, usize)>,
}

#[derive(Serialize)]
pub struct WallDistanceJson {
    pub pairs_checked: usize,
    pub violations: Vec<WallDistanceViolation>,
}

#[derive(Serialize)]
pub struct WallDistanceViolation {
    pub points: [String; 2],
    pub distance: usize,
    pub separating_walls: usize,
}

impl WallDistanceReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_json(&self, ws: &Wallspace) -> WallDistanceJson {
        WallDistanceJson {
            pairs_checked: self.pairs_checked,
            violations: self
                .violations
                .iter()
                .map(|&(p, q, distance, separating_walls)| WallDistanceViolation {
                    points: [ws.points[p].clone(), ws.points[q].clone()],
                    distance,
                    separating_walls,
                })
                .collect(),
        }
    }
}

/// Compares, for every pair of points, the dual distance between their
/// principal vertices with the number of walls separating them.
pub fn wall_distance_check(ws: &Wallspace, dual: &Dual) -> WallDistanceReport {
    let n = ws.points().len();
    let mut violations = Vec::new();
    let mut pairs_checked = 0;
    for p in 0..n {
        for q in p..n {
            pairs_checked += 1;
            let d = dual.graph.distance(dual.point_vertex[p], dual.point_vertex[q]);
            let walls = ws.separating_walls(p, q);
            if d != walls {
                violations.push((p, q, d, walls));
            }
        }
    }
    WallDistanceReport {
        pairs_checked,
        violations,
    }
}

/// Random wallspace: `points` points uniform in the unit square and up to
/// `walls` distinct walls cut by random lines through the square.
pub fn random_wallspace(points: usize, walls: usize, seed: u64) -> Result<Wallspace> {
    if points < 2 || walls == 0 {
        return Err(Error::InvalidInput(
            "random wallspace needs at least 2 points and 1 wall".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = (points - 1).to_string().len();
    let names: Vec<String> = (0..points).map(|i| format!("p{i:0w$}")).collect();
    let coords: Vec<(f64, f64)> = (0..points).map(|_| (rng.gen(), rng.gen())).collect();
    let mut seen = BTreeSet::new();
    let mut blocks: Vec<[Vec<String>; 2]> = Vec::new();
    let mut attempts = 0;
    while blocks.len() < walls && attempts < 1000 * walls {
        attempts += 1;
        let angle: f64 = rng.gen_range(0.0..std::f64::consts::PI);
        let (nx, ny) = (angle.cos(), angle.sin());
        let (cx, cy): (f64, f64) = (rng.gen(), rng.gen());
        let side: Vec<bool> = coords
            .iter()
            .map(|&(x, y)| (x - cx) * nx + (y - cy) * ny > 0.0)
            .collect();
        if side.iter().all(|&s| s) || side.iter().all(|&s| !s) {
            continue;
        }
        // normalise so that block 0 holds the first point
        let key: Vec<bool> = side.iter().map(|&s| s != side[0]).collect();
        if !seen.insert(key) {
            continue;
        }
        let pick = |want: bool| -> Vec<String> {
            names
                .iter()
                .zip(&side)
                .filter(|&(_, &s)| s == want)
                .map(|(n, _)| n.clone())
                .collect()
        };
        blocks.push([pick(false), pick(true)]);
    }
    Wallspace::new(&names, &blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperplanes::Hyperplanes;
    use crate::median::medianness_oracle;

    fn ws(points: &[&str], walls: &[[&[&str]; 2]]) -> Wallspace {
        let walls: Vec<[Vec<&str>; 2]> = walls
            .iter()
            .map(|[a, b]| [a.to_vec(), b.to_vec()])
            .collect();
        Wallspace::new(points, &walls).unwrap()
    }

    fn collinear() -> Wallspace {
        ws(&["1", "2", "3"], &[[&["1"], &["2", "3"]], [&["1", "2"], &["3"]]])
    }

    #[test]
    fn principal_orientations() {
        let single = ws(&["a", "b"], &[[&["a"], &["b"]]]);
        assert_eq!(principal_orientation(&single, 0).unwrap().choice(0), 0);

        let w = collinear();
        let o = principal_orientation(&w, w.point("2").unwrap()).unwrap();
        assert_eq!((o.choice(0), o.choice(1)), (1, 0));
        assert!(o.is_consistent(&w));
        assert!(principal_orientation(&w, 3).is_err());
    }

    #[test]
    fn dual_examples() {
        let single = dualize(&ws(&["a", "b"], &[[&["a"], &["b"]]])).unwrap();
        assert_eq!((single.graph.len(), single.graph.edge_count()), (2, 1));

        let transverse = ws(
            &["00", "01", "10", "11"],
            &[[&["00", "01"], &["10", "11"]], [&["00", "10"], &["01", "11"]]],
        );
        let d = dualize(&transverse).unwrap();
        assert_eq!((d.graph.len(), d.graph.edge_count()), (4, 4));

        let d = dualize(&collinear()).unwrap();
        assert_eq!(d.graph.names(), ["00", "10", "11"]);
        assert_eq!(d.graph.edge_count(), 2);
        assert_eq!(d.graph.diameter(), 2);
    }

    #[test]
    fn line_of_four_points() {
        let w = ws(
            &["1", "2", "3", "4"],
            &[
                [&["1"], &["2", "3", "4"]],
                [&["1", "2"], &["3", "4"]],
                [&["1", "2", "3"], &["4"]],
            ],
        );
        let d = dualize(&w).unwrap();
        assert_eq!((d.graph.len(), d.graph.edge_count()), (4, 3));
        assert_eq!(d.graph.distance(d.point_vertex[0], d.point_vertex[3]), 3);
        let report = wall_distance_check(&w, &d);
        assert!(report.ok());
        assert_eq!(report.pairs_checked, 10);
    }

    #[test]
    fn rejects_malformed_walls() {
        let pts = ["a", "b", "c"];
        let bad = |walls: &[[Vec<&str>; 2]]| Wallspace::new(&pts, walls).is_err();
        assert!(bad(&[[vec!["a"], vec!["b"]]]));
        assert!(bad(&[[vec![], vec!["a", "b", "c"]]]));
        assert!(bad(&[[vec!["a", "b"], vec!["b", "c"]]]));
        assert!(bad(&[[vec!["a"], vec!["b", "z"]]]));
        assert!(bad(&[[vec!["a"], vec!["b", "c"]], [vec!["b", "c"], vec!["a"]]]));
        assert!(bad(&[]));
        assert!(Wallspace::new(&["a", "a"], &[[vec!["a"], vec!["a"]]]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let w = collinear();
        let text = serde_json::to_string(&w).unwrap();
        assert_eq!(
            text,
            r#"{"points":["1","2","3"],"walls":[[["1"],["2","3"]],[["1","2"],["3"]]]}"#
        );
        let back = Wallspace::from_json_str(&text).unwrap();
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
        assert!(Wallspace::from_json_str(r#"{"points":["a"],"walls":[],"x":1}"#).is_err());
    }

    #[test]
    fn random_duals_are_median_and_obey_the_distance_law() {
        for seed in 0..15 {
            let w = random_wallspace(8, 7, seed).unwrap();
            let d = dualize(&w).unwrap();
            assert!(d.orientations.iter().all(|o| o.is_consistent(&w)));
            assert!(medianness_oracle(&d.graph).median, "seed {seed}");
            assert!(wall_distance_check(&w, &d).ok(), "seed {seed}");
            let hs = Hyperplanes::compute(&d.graph).unwrap();
            assert_eq!(hs.len(), w.wall_count());
            // each hyperplane flips exactly one wall
            for h in hs.iter() {
                let walls: BTreeSet<usize> = h
                    .edges
                    .iter()
                    .map(|&(u, v)| {
                        let diff = d.orientations[u].0.symmetric_difference(&d.orientations[v].0);
                        diff.collect::<Vec<_>>()[0]
                    })
                    .collect();
                assert_eq!(walls.len(), 1);
            }
        }
    }

    #[test]
    fn random_wallspace_is_deterministic() {
        let a = serde_json::to_string(&random_wallspace(6, 5, 9).unwrap()).unwrap();
        let b = serde_json::to_string(&random_wallspace(6, 5, 9).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn orientation_guard() {
        // one point per pair of blocks from distinct walls makes every
        // orientation consistent: 2^19 of them
        let k = 19;
        let mut points = Vec::new();
        let mut sides: Vec<Vec<usize>> = Vec::new();
        for i in 0..k {
            for j in i + 1..k {
                for (s, t) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                    points.push(format!("x{i:02}_{j:02}_{s}{t}"));
                    let mut side = vec![0; k];
                    side[i] = s;
                    side[j] = t;
                    sides.push(side);
                }
            }
        }
        let walls: Vec<[Vec<String>; 2]> = (0..k)
            .map(|w| {
                let pick = |b: usize| -> Vec<String> {
                    points
                        .iter()
                        .zip(&sides)
                        .filter(|(_, side)| side[w] == b)
                        .map(|(p, _)| p.clone())
                        .collect()
                };
                [pick(0), pick(1)]
            })
            .collect();
        let w = Wallspace::new(&points, &walls).unwrap();
        assert!(matches!(dualize(&w), Err(Error::ResourceLimit(_))));
    }
}
