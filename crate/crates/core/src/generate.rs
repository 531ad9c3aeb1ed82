//! Deterministic corpus generators.
//!
//! Vertex naming scheme (every index is zero-padded so that lexicographic
//! order matches numeric order):
//!
//! | family               | params        | names                                   |
//! |----------------------|---------------|-----------------------------------------|
//! | `hypercube`          | `[n]`         | bit strings of length `n` (`"010"`)     |
//! | `grid`               | `[d1, d2, …]` | coordinates joined by `_` (`"0_2"`)     |
//! | `random_tree`        | `[n]` + seed  | `t00` … (uniform labelled tree, Prüfer) |
//! | `cycle`              | `[n]`         | `c0` … `c{n-1}` around the cycle        |
//! | `complete_bipartite` | `[m, n]`      | `a0` … and `b0` …                       |
//! | `star`               | `[k]`         | centre `c`, leaves `l0` …               |

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Upper bound on generated vertex counts.
pub const MAX_GENERATED_VERTICES: usize = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Hypercube,
    Grid,
    RandomTree,
    Cycle,
    CompleteBipartite,
    Star,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Hypercube,
        Family::Grid,
        Family::RandomTree,
        Family::Cycle,
        Family::CompleteBipartite,
        Family::Star,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Hypercube => "hypercube",
            Family::Grid => "grid",
            Family::RandomTree => "random_tree",
            Family::Cycle => "cycle",
            Family::CompleteBipartite => "complete_bipartite",
            Family::Star => "star",
        }
    }

    pub fn is_randomized(self) -> bool {
        matches!(self, Family::RandomTree)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unsupported family `{s}`")))
    }
}

fn width(max_index: usize) -> usize {
    max_index.to_string().len()
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

fn expect_params(family: Family, params: &[usize], count: usize) -> Result<()> {
    if params.len() == count {
        Ok(())
    } else {
        Err(bad(format!(
            "{family} expects {count} parameter(s), got {}",
            params.len()
        )))
    }
}

/// Generates a corpus graph. `seed` is required for randomized families and
/// ignored otherwise.
pub fn generate(family: Family, params: &[usize], seed: Option<u64>) -> Result<Graph> {
    match family {
        Family::Hypercube => {
            expect_params(family, params, 1)?;
            let n = params[0];
            if !(1..=20).contains(&n) {
                return Err(bad("hypercube dimension must be in 1..=20"));
            }
            hypercube(n)
        }
        Family::Grid => {
            if params.is_empty() || params.contains(&0) {
                return Err(bad("grid needs at least one positive side length"));
            }
            grid(params)
        }
        Family::RandomTree => {
            expect_params(family, params, 1)?;
            let seed = seed.ok_or_else(|| bad("random_tree requires a seed"))?;
            if params[0] == 0 || params[0] > MAX_GENERATED_VERTICES {
                return Err(bad("random_tree size out of range"));
            }
            random_tree(params[0], seed)
        }
        Family::Cycle => {
            expect_params(family, params, 1)?;
            let n = params[0];
            if !(3..=MAX_GENERATED_VERTICES).contains(&n) {
                return Err(bad("cycle length must be at least 3"));
            }
            let w = width(n - 1);
            let name = |i: usize| format!("c{i:0w$}");
            Graph::new((0..n).map(name), (0..n).map(|i| (name(i), name((i + 1) % n))))
        }
        Family::CompleteBipartite => {
            expect_params(family, params, 2)?;
            let (m, n) = (params[0], params[1]);
            if m == 0 || n == 0 || m.saturating_mul(n) > MAX_GENERATED_VERTICES {
                return Err(bad("complete_bipartite sides must be positive"));
            }
            let (wa, wb) = (width(m - 1), width(n - 1));
            let a = |i: usize| format!("a{i:0wa$}");
            let b = |j: usize| format!("b{j:0wb$}");
            let vertices = (0..m).map(a).chain((0..n).map(b));
            let edges = (0..m).flat_map(|i| (0..n).map(move |j| (a(i), b(j))));
            Graph::new(vertices, edges)
        }
        Family::Star => {
            expect_params(family, params, 1)?;
            let k = params[0];
            if k == 0 || k > MAX_GENERATED_VERTICES {
                return Err(bad("star needs at least one leaf"));
            }
            let w = width(k - 1);
            let leaf = |i: usize| format!("l{i:0w$}");
            Graph::new(
                std::iter::once("c".to_string()).chain((0..k).map(leaf)),
                (0..k).map(|i| ("c".to_string(), leaf(i))),
            )
        }
    }
}

fn hypercube(n: usize) -> Result<Graph> {
    let name = |x: usize| -> String {
        (0..n)
            .map(|i| if x >> (n - 1 - i) & 1 == 1 { '1' } else { '0' })
            .collect()
    };
    let count = 1usize << n;
    let edges = (0..count).flat_map(|x| {
        (0..n)
            .map(move |i| (x, x ^ (1 << i)))
            .filter(|&(a, b)| a < b)
            .map(|(a, b)| (name(a), name(b)))
            .collect::<Vec<_>>()
    });
    Graph::new((0..count).map(name), edges)
}

fn grid(dims: &[usize]) -> Result<Graph> {
    let total = dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .filter(|&t| t <= MAX_GENERATED_VERTICES)
        .ok_or_else(|| bad("grid too large"))?;
    let widths: Vec<usize> = dims.iter().map(|&d| width(d - 1)).collect();
    let coords = |mut idx: usize| -> Vec<usize> {
        let mut c = vec![0; dims.len()];
        for k in (0..dims.len()).rev() {
            c[k] = idx % dims[k];
            idx /= dims[k];
        }
        c
    };
    let name = |c: &[usize]| -> String {
        c.iter()
            .zip(&widths)
            .map(|(x, &w)| format!("{x:0w$}"))
            .collect::<Vec<_>>()
            .join("_")
    };
    let mut vertices = Vec::with_capacity(total);
    let mut edges = Vec::new();
    for idx in 0..total {
        let c = coords(idx);
        vertices.push(name(&c));
        for k in 0..dims.len() {
            if c[k] + 1 < dims[k] {
                let mut next = c.clone();
                next[k] += 1;
                edges.push((name(&c), name(&next)));
            }
        }
    }
    Graph::new(vertices, edges)
}

/// Uniform random labelled tree on `n` vertices, decoded from a random
/// Prüfer sequence.
fn random_tree(n: usize, seed: u64) -> Result<Graph> {
    let w = width(n.saturating_sub(1));
    let name = |i: usize| format!("t{i:0w$}");
    if n == 1 {
        return Graph::new([name(0)], Vec::<(String, String)>::new());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let code: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &c in &code {
        degree[c] += 1;
    }
    let mut leaves: std::collections::BTreeSet<usize> =
        (0..n).filter(|&v| degree[v] == 1).collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &c in &code {
        let leaf = leaves.pop_first().expect("Prüfer decoding always has a leaf");
        edges.push((name(leaf), name(c)));
        degree[c] -= 1;
        if degree[c] == 1 {
            leaves.insert(c);
        }
    }
    let last: Vec<usize> = leaves.into_iter().collect();
    edges.push((name(last[0]), name(last[1])));
    Graph::new((0..n).map(name), edges)
}
