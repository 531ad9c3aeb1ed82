//! The radius-three criterion for medianness.
//!
//! Conditions two and three are local and decided exactly. Condition one asks
//! that the square completion be simply connected; it is attacked by loop
//! contraction across squares, and failing that by first homology over GF(2)
//! and GF(p). Nonzero homology over a field certifies a nontrivial loop;
//! otherwise the verdict is left unknown.

use std::collections::{BTreeSet, VecDeque};

use serde::Serialize;

use crate::graph::Graph;
use crate::hyperplanes::{common_neighbors, for_each_four_cycle};

const PRIME: u64 = (1 << 31) - 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Tristate {
    Yes,
    No,
    Unknown,
}

#[derive(Clone, Copy, Debug)]
pub struct LocalOptions {
    /// Total rewriting steps allowed across all loops.
    pub contraction_budget: usize,
    /// Rough bound on field operations spent on the homology fallback.
    pub homology_work_limit: u128,
}

impl Default for LocalOptions {
    fn default() -> Self {
        LocalOptions {
            contraction_budget: 1_000_000,
            homology_work_limit: 4_000_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Condition1 {
    pub verdict: Tristate,
    pub method: String,
    /// A closed walk (first vertex repeated at the end) that is not
    /// null-homologous, or the loop that contraction got stuck on.
    pub witness_cycle: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Condition2 {
    pub holds: bool,
    /// `(v, a, b, others)`: edges `va`, `vb` and the far corners of the
    /// 4-cycles they span.
    pub witness: Option<(usize, usize, usize, Vec<usize>)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Condition3 {
    pub holds: bool,
    /// `(v, [a, b, c])`: neighbours pairwise spanning squares with no 3-cube.
    pub witness: Option<(usize, [usize; 3])>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalReport {
    pub condition1: Condition1,
    pub condition2: Condition2,
    pub condition3: Condition3,
}

#[derive(Serialize)]
pub struct LocalReportJson {
    pub all_yes: bool,
    pub condition1: Condition1Json,
    pub condition2: Condition2Json,
    pub condition3: Condition3Json,
}

#[derive(Serialize)]
pub struct Condition1Json {
    pub verdict: Tristate,
    pub method: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_cycle: Option<Vec<String>>,
}

#[derive(Serialize)]
pub struct Condition2Json {
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Condition2Witness>,
}

#[derive(Serialize)]
pub struct Condition2Witness {
    pub vertex: String,
    pub neighbors: [String; 2],
    pub far_corners: Vec<String>,
}

#[derive(Serialize)]
pub struct Condition3Json {
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Condition3Witness>,
}

#[derive(Serialize)]
pub struct Condition3Witness {
    pub vertex: String,
    pub neighbors: [String; 3],
}

impl LocalReport {
    pub fn all_yes(&self) -> bool {
        self.condition1.verdict == Tristate::Yes && self.condition2.holds && self.condition3.holds
    }

    pub fn to_json(&self, g: &Graph) -> LocalReportJson {
        let name = |v: usize| g.name(v).to_string();
        LocalReportJson {
            all_yes: self.all_yes(),
            condition1: Condition1Json {
                verdict: self.condition1.verdict,
                method: self.condition1.method.clone(),
                witness_cycle: self
                    .condition1
                    .witness_cycle
                    .as_ref()
                    .map(|c| c.iter().map(|&v| name(v)).collect()),
            },
            condition2: Condition2Json {
                holds: self.condition2.holds,
                witness: self.condition2.witness.as_ref().map(|(v, a, b, far)| {
                    Condition2Witness {
                        vertex: name(*v),
                        neighbors: [name(*a), name(*b)],
                        far_corners: far.iter().map(|&w| name(w)).collect(),
                    }
                }),
            },
            condition3: Condition3Json {
                holds: self.condition3.holds,
                witness: self.condition3.witness.map(|(v, t)| Condition3Witness {
                    vertex: name(v),
                    neighbors: t.map(name),
                }),
            },
        }
    }
}

pub fn verylocal_check(g: &Graph) -> LocalReport {
    verylocal_check_with(g, LocalOptions::default())
}

pub fn verylocal_check_with(g: &Graph, opts: LocalOptions) -> LocalReport {
    LocalReport {
        condition1: condition1(g, &opts),
        condition2: condition2(g),
        condition3: condition3(g),
    }
}

fn condition2(g: &Graph) -> Condition2 {
    for v in 0..g.len() {
        let nb = g.neighbors(v);
        for (i, &a) in nb.iter().enumerate() {
            for &b in &nb[i + 1..] {
                let far: Vec<usize> = common_neighbors(g, a, b)
                    .into_iter()
                    .filter(|&w| w != v)
                    .collect();
                if far.len() > 1 {
                    return Condition2 {
                        holds: false,
                        witness: Some((v, a, b, far)),
                    };
                }
            }
        }
    }
    Condition2 {
        holds: true,
        witness: None,
    }
}

fn condition3(g: &Graph) -> Condition3 {
    for v in 0..g.len() {
        let nb = g.neighbors(v);
        let k = nb.len();
        if k < 3 {
            continue;
        }
        // far[i][j]: fourth corners of squares through v, nb[i], nb[j]
        let mut far = vec![vec![Vec::new(); k]; k];
        for i in 0..k {
            for j in i + 1..k {
                let corners: Vec<usize> = common_neighbors(g, nb[i], nb[j])
                    .into_iter()
                    .filter(|&w| w != v)
                    .collect();
                far[j][i] = corners.clone();
                far[i][j] = corners;
            }
        }
        for i in 0..k {
            for j in i + 1..k {
                if far[i][j].is_empty() {
                    continue;
                }
                for l in j + 1..k {
                    if far[i][l].is_empty() || far[j][l].is_empty() {
                        continue;
                    }
                    let (a, b, c) = (nb[i], nb[j], nb[l]);
                    if !spans_cube(g, v, [a, b, c], [&far[i][j], &far[j][l], &far[i][l]]) {
                        return Condition3 {
                            holds: false,
                            witness: Some((v, [a, b, c])),
                        };
                    }
                }
            }
        }
    }
    Condition3 {
        holds: true,
        witness: None,
    }
}

/// Whether corners `p` (of `ab`), `q` (of `bc`), `r` (of `ac`) and a common
/// neighbour `w` of all three complete `v, a, b, c` to a 3-cube subgraph.
fn spans_cube(g: &Graph, v: usize, abc: [usize; 3], corners: [&[usize]; 3]) -> bool {
    let [pab, qbc, rac] = corners;
    for &p in pab {
        for &q in qbc {
            for &r in rac {
                let outer = [v, abc[0], abc[1], abc[2], p, q, r];
                let distinct = outer
                    .iter()
                    .enumerate()
                    .all(|(i, x)| !outer[i + 1..].contains(x));
                if !distinct {
                    continue;
                }
                let found = common_neighbors(g, p, q)
                    .into_iter()
                    .any(|w| g.has_edge(w, r) && !outer.contains(&w));
                if found {
                    return true;
                }
            }
        }
    }
    false
}

struct Tree {
    root: usize,
    dist: Vec<u32>,
    parent: Vec<usize>,
}

impl Tree {
    fn new(g: &Graph, root: usize) -> Tree {
        let mut dist = vec![u32::MAX; g.len()];
        let mut parent = vec![usize::MAX; g.len()];
        dist[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &w in g.neighbors(u) {
                if dist[w] == u32::MAX {
                    dist[w] = dist[u] + 1;
                    parent[w] = u;
                    queue.push_back(w);
                }
            }
        }
        Tree { root, dist, parent }
    }

    fn is_tree_edge(&self, u: usize, v: usize) -> bool {
        self.parent[u] == v || self.parent[v] == u
    }

    /// Closed walk root → u → v → root through the tree.
    fn fundamental_loop(&self, u: usize, v: usize) -> Vec<usize> {
        let up = |mut x: usize| {
            let mut path = vec![x];
            while x != self.root {
                x = self.parent[x];
                path.push(x);
            }
            path
        };
        let mut walk = up(u);
        walk.reverse();
        walk.extend(up(v));
        walk
    }
}

enum Contraction {
    Done,
    Stuck,
    OutOfBudget,
}

/// Rewrites a closed walk at the root across squares and backtracks until it
/// is trivial. At each step the farthest vertex `b` on the walk, entered from
/// `a` and left to `c`, is removed if `a == c` or replaced by a common
/// neighbour of `a` and `c` closer to the root.
fn contract(g: &Graph, dist: &[u32], walk: &mut Vec<usize>, budget: &mut usize) -> Contraction {
    while walk.len() > 1 {
        if *budget == 0 {
            return Contraction::OutOfBudget;
        }
        *budget -= 1;
        let i = (1..walk.len() - 1)
            .max_by_key(|&i| (dist[walk[i]], std::cmp::Reverse(i)))
            .expect("closed walk of length > 1 has an interior vertex");
        let (a, b, c) = (walk[i - 1], walk[i], walk[i + 1]);
        if a == c {
            walk.drain(i..i + 2);
            continue;
        }
        let db = dist[b];
        if dist[a] + 1 != db || dist[c] + 1 != db {
            return Contraction::Stuck;
        }
        match common_neighbors(g, a, c)
            .into_iter()
            .find(|&d| dist[d] + 2 == db)
        {
            Some(d) => walk[i] = d,
            None => return Contraction::Stuck,
        }
    }
    Contraction::Done
}

/// Roots tried before contraction gives up. Greedy contraction towards one
/// root can stall on a contractible loop that passes around a missing corner;
/// another root usually sees it from the other side.
const MAX_ROOTS: usize = 64;

/// Contracts every fundamental loop of the BFS tree at `root`; returns the
/// first loop that could not be contracted.
fn contract_all(
    g: &Graph,
    tree: &Tree,
    budget: &mut usize,
) -> std::result::Result<usize, (Vec<usize>, &'static str)> {
    let mut count = 0;
    for &(u, v) in g.edges() {
        if tree.is_tree_edge(u, v) {
            continue;
        }
        let l = tree.fundamental_loop(u, v);
        let mut walk = l.clone();
        match contract(g, &tree.dist, &mut walk, budget) {
            Contraction::Done => count += 1,
            Contraction::Stuck => return Err((l, "stuck")),
            Contraction::OutOfBudget => return Err((l, "out of budget")),
        }
    }
    Ok(count)
}

fn condition1(g: &Graph, opts: &LocalOptions) -> Condition1 {
    let tree = Tree::new(g, 0);
    let mut budget = opts.contraction_budget;
    let mut outcome = contract_all(g, &tree, &mut budget);
    let mut root = 0;
    while let Err((_, "stuck")) = outcome {
        root += 1;
        if root >= g.len().min(MAX_ROOTS) {
            break;
        }
        outcome = match contract_all(g, &Tree::new(g, root), &mut budget) {
            Ok(n) => Ok(n),
            // keep the witness from the first root
            Err((_, why)) => Err((outcome.unwrap_err().0, why)),
        };
    }
    let (stuck_loop, why) = match outcome {
        Ok(count) => {
            return Condition1 {
                verdict: Tristate::Yes,
                method: format!(
                    "loop contraction: all {count} fundamental loops at {} contracted across squares",
                    g.name(root)
                ),
                witness_cycle: None,
            }
        }
        Err(e) => e,
    };
    match homology_witness(g, &tree, opts) {
        HomologyOutcome::Nonzero { field, cycle } => Condition1 {
            verdict: Tristate::No,
            method: format!("first homology of the square completion is nonzero over {field}"),
            witness_cycle: Some(cycle),
        },
        HomologyOutcome::Vanishes => Condition1 {
            verdict: Tristate::Unknown,
            method: format!(
                "loop contraction {why}; first homology vanishes over GF(2) and GF({PRIME})"
            ),
            witness_cycle: Some(stuck_loop),
        },
        HomologyOutcome::TooLarge => Condition1 {
            verdict: Tristate::Unknown,
            method: format!("loop contraction {why}; homology check skipped (too large)"),
            witness_cycle: Some(stuck_loop),
        },
    }
}

enum HomologyOutcome {
    Nonzero { field: String, cycle: Vec<usize> },
    Vanishes,
    TooLarge,
}

/// Signed edge vector of a closed walk; edge `(u, v)` with `u < v` is
/// oriented from `u` to `v`.
fn edge_vector(g: &Graph, walk: &[usize]) -> Vec<(usize, i64)> {
    walk.windows(2)
        .map(|w| {
            let e = g.edge_index(w[0], w[1]).expect("walk follows edges");
            (e, if w[0] < w[1] { 1 } else { -1 })
        })
        .collect()
}

/// Incremental echelon basis over GF(p) with dense rows; `p = 2` included.
struct Echelon {
    p: u64,
    width: usize,
    rows: Vec<Option<Vec<u64>>>,
}

impl Echelon {
    fn new(p: u64, width: usize) -> Self {
        Echelon {
            p,
            width,
            rows: vec![None; width],
        }
    }

    fn dense(&self, sparse: &[(usize, i64)]) -> Vec<u64> {
        let mut v = vec![0u64; self.width];
        for &(e, s) in sparse {
            let s = s.rem_euclid(self.p as i64) as u64;
            v[e] = (v[e] + s) % self.p;
        }
        v
    }

    /// Reduces `v` against the basis; inserts the remainder if `insert` and
    /// returns whether it was nonzero.
    fn reduce(&mut self, mut v: Vec<u64>, insert: bool) -> bool {
        let p = self.p;
        for col in 0..self.width {
            if v[col] == 0 {
                continue;
            }
            match &self.rows[col] {
                Some(row) => {
                    let f = v[col];
                    for j in col..self.width {
                        if row[j] != 0 {
                            v[j] = (v[j] + (p - f) * row[j]) % p;
                        }
                    }
                }
                None => {
                    if insert {
                        let inv = mod_pow(v[col], p - 2, p);
                        for x in &mut v[col..] {
                            *x = *x * inv % p;
                        }
                        self.rows[col] = Some(v);
                    }
                    return true;
                }
            }
        }
        false
    }
}

fn mod_pow(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

fn homology_witness(g: &Graph, tree: &Tree, opts: &LocalOptions) -> HomologyOutcome {
    let mut squares: BTreeSet<[usize; 4]> = BTreeSet::new();
    let mut boundaries: Vec<Vec<(usize, i64)>> = Vec::new();
    for_each_four_cycle(g, |a, b, c, d| {
        let walk = [a, b, c, d, a];
        let mut key = [0; 4];
        for (k, w) in walk.windows(2).enumerate() {
            key[k] = g.edge_index(w[0], w[1]).expect("cycle edge");
        }
        key.sort_unstable();
        if squares.insert(key) {
            boundaries.push(edge_vector(g, &walk));
        }
    });
    let loops: Vec<Vec<usize>> = g
        .edges()
        .iter()
        .filter(|&&(u, v)| !tree.is_tree_edge(u, v))
        .map(|&(u, v)| tree.fundamental_loop(u, v))
        .collect();
    let m = g.edge_count() as u128;
    let work = (boundaries.len() + loops.len()) as u128 * m * m.min(boundaries.len() as u128 + 1);
    if work > opts.homology_work_limit {
        return HomologyOutcome::TooLarge;
    }
    for p in [2, PRIME] {
        let mut basis = Echelon::new(p, g.edge_count());
        for b in &boundaries {
            let v = basis.dense(b);
            basis.reduce(v, true);
        }
        for l in &loops {
            let v = basis.dense(&edge_vector(g, l));
            if basis.reduce(v, false) {
                let field = if p == 2 { "GF(2)".into() } else { format!("GF({p})") };
                return HomologyOutcome::Nonzero {
                    field,
                    cycle: l.clone(),
                };
            }
        }
    }
    HomologyOutcome::Vanishes
}
