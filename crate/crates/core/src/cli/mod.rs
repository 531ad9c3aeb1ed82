//! Command-line front end.
//!
//! [`run`] turns a parsed [`Cli`] into a [`Report`]: a JSON body, a plain text
//! rendering and the process exit code. Library errors map onto exit codes
//! through [`Error::exit_code`].

mod dot;

use std::io::Read;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::actions::{default_word_bound, find_flip, invariant_cube_with, ActionGenerators};
use crate::cubes::{
    cell_ceiling_from_env, enumerate_cubes_with_ceiling, is_flag, maximal_cubes_with, vertex_link,
    verylocal_check_with, LocalOptions, Tristate,
};
use crate::cubulation::{dualize, wall_distance_check, Wallspace};
use crate::error::{Error, Result};
use crate::generate::{generate, Family};
use crate::graph::Graph;
use crate::hyperplanes::Hyperplanes;
use crate::median::medianness_oracle;
use crate::plcircle::{growth_profile, orbit_distance, sing, PlHomeo};

pub use dot::export_dot;

/// Graphs below this size get the exhaustive oracle by default.
pub const ORACLE_DEFAULT_LIMIT: usize = 1000;

#[derive(Debug, Parser)]
#[command(name = "medianforge", version, about = "Median graphs, cube completions and their actions")]
pub struct Cli {
    /// Worker threads for data-parallel steps (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    /// Print a plain text summary instead of JSON.
    #[arg(long, global = true)]
    pub text: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide medianness: local criterion plus the exhaustive oracle.
    Check {
        /// Graph JSON (`-` for stdin).
        input: PathBuf,
        /// Always run the O(n^3) oracle.
        #[arg(long, conflicts_with = "no_oracle")]
        oracle: bool,
        /// Never run the oracle.
        #[arg(long)]
        no_oracle: bool,
        /// Rewriting steps allowed when contracting loops across squares.
        #[arg(long, default_value_t = LocalOptions::default().contraction_budget)]
        contraction_budget: usize,
    },
    /// List hyperplanes, the largest transverse family and a facing triple.
    Hyperplanes {
        input: PathBuf,
        /// Also write a DOT file coloured by hyperplane.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Cube completion: f-vector, maximal cubes and the flag condition.
    Cubes {
        input: PathBuf,
        /// Keep only cells up to this dimension.
        #[arg(long)]
        max_dim: Option<usize>,
    },
    /// Dual median graph of a wallspace, with the wall-distance check.
    Dualize { input: PathBuf },
    /// Cube fixed by a finite group action, and flippable hyperplanes.
    FixedCube {
        graph: PathBuf,
        action: PathBuf,
        /// Word-length bound for the flippability search.
        #[arg(long)]
        flip_bound: Option<usize>,
    },
    /// Growth of #Sing(g^n) for a PL circle homeomorphism.
    PlGrowth {
        input: PathBuf,
        #[arg(long, default_value_t = 64)]
        n_max: usize,
    },
    /// Canonical embedding into a Hamming cube.
    Embed {
        input: PathBuf,
        /// Basepoint vertex (default: the least vertex name).
        #[arg(long)]
        basepoint: Option<String>,
    },
    /// Generate a corpus graph.
    Gen {
        /// hypercube, grid, random_tree, cycle, complete_bipartite or star.
        family: String,
        params: Vec<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Write the graph here instead of printing it.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// Outcome of one invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub json: Value,
    pub text: String,
    pub exit_code: i32,
}

impl Report {
    fn ok(json: Value, text: String) -> Self {
        Report {
            json,
            text,
            exit_code: 0,
        }
    }

    /// Rendered output, newline-terminated.
    pub fn render(&self, text: bool) -> String {
        if text {
            let mut s = self.text.clone();
            if !s.ends_with('\n') {
                s.push('\n');
            }
            s
        } else {
            let mut s = serde_json::to_string_pretty(&self.json).expect("JSON values serialise");
            s.push('\n');
            s
        }
    }
}

fn read_input(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        Ok(std::fs::read_to_string(path)?)
    }
}

fn read_graph(path: &Path) -> Result<Graph> {
    Graph::from_json_str(&read_input(path)?)
}

fn to_value<T: serde::Serialize>(x: T) -> Value {
    serde_json::to_value(x).expect("report types serialise")
}

/// Configures the global thread pool; later calls are ignored.
pub fn configure_jobs(jobs: Option<usize>) -> Result<()> {
    if let Some(n) = jobs {
        if n == 0 {
            return Err(Error::Usage("--jobs must be positive".into()));
        }
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

pub fn run(cli: &Cli) -> Result<Report> {
    match &cli.command {
        Command::Check {
            input,
            oracle,
            no_oracle,
            contraction_budget,
        } => {
            let opts = LocalOptions {
                contraction_budget: *contraction_budget,
                ..LocalOptions::default()
            };
            check(&read_graph(input)?, *oracle, *no_oracle, opts)
        }
        Command::Hyperplanes { input, dot } => hyperplanes(&read_graph(input)?, dot.as_deref()),
        Command::Cubes { input, max_dim } => cubes(&read_graph(input)?, *max_dim),
        Command::Dualize { input } => dual(&Wallspace::from_json_str(&read_input(input)?)?),
        Command::FixedCube {
            graph,
            action,
            flip_bound,
        } => {
            let g = read_graph(graph)?;
            let gens = ActionGenerators::from_json_str(&g, &read_input(action)?)?;
            fixed_cube(&g, &gens, *flip_bound)
        }
        Command::PlGrowth { input, n_max } => {
            pl_growth(&PlHomeo::from_json_str(&read_input(input)?)?, *n_max)
        }
        Command::Embed { input, basepoint } => embed(&read_graph(input)?, basepoint.as_deref()),
        Command::Gen {
            family,
            params,
            seed,
            output,
        } => gen(family, params, *seed, output.as_deref()),
    }
}

fn check(g: &Graph, force_oracle: bool, no_oracle: bool, opts: LocalOptions) -> Result<Report> {
    let local = verylocal_check_with(g, opts);
    let use_oracle = force_oracle || (!no_oracle && g.len() < ORACLE_DEFAULT_LIMIT);
    let oracle = use_oracle.then(|| medianness_oracle(g));
    let local_no = !local.condition2.holds
        || !local.condition3.holds
        || local.condition1.verdict == Tristate::No;
    if let Some(r) = &oracle {
        if (r.median && local_no) || (!r.median && local.all_yes()) {
            return Err(Error::Assertion(format!(
                "local criterion disagrees with the oracle (oracle median: {})",
                r.median
            )));
        }
    }
    let median = match &oracle {
        Some(r) => Some(r.median),
        None if local_no => Some(false),
        None if local.all_yes() => Some(true),
        None => None,
    };
    let exit_code = match median {
        Some(true) => 0,
        Some(false) => 2,
        None => 3,
    };
    let mut text = format!(
        "vertices: {}, edges: {}\nmedian: {}\n",
        g.len(),
        g.edge_count(),
        median.map_or("unknown".to_string(), |m| m.to_string())
    );
    text.push_str(&format!(
        "condition 1: {:?} ({})\ncondition 2: {}\ncondition 3: {}\n",
        local.condition1.verdict, local.condition1.method, local.condition2.holds, local.condition3.holds
    ));
    match &oracle {
        Some(r) => {
            if let Some(w) = &r.witness {
                let names: Vec<&str> = w.triple.iter().map(|&v| g.name(v)).collect();
                let cands: Vec<&str> = w.candidates.iter().map(|&v| g.name(v)).collect();
                text.push_str(&format!(
                    "oracle witness: ({}) has medians [{}]\n",
                    names.join(", "),
                    cands.join(", ")
                ));
            }
        }
        None => text.push_str("oracle: skipped\n"),
    }
    let json = json!({
        "vertices": g.len(),
        "edges": g.edge_count(),
        "median": median,
        "local": to_value(local.to_json(g)),
        "oracle": oracle.map(|r| to_value(r.to_json(g))),
    });
    Ok(Report {
        json,
        text,
        exit_code,
    })
}

fn hyperplanes(g: &Graph, dot: Option<&Path>) -> Result<Report> {
    let hs = Hyperplanes::compute(g)?;
    if let Some(path) = dot {
        std::fs::write(path, export_dot(g, Some(&hs)))?;
    }
    let pair = |(u, v): (usize, usize)| [g.name(u).to_string(), g.name(v).to_string()];
    let facing = hs.facing_triple().map(|t| {
        json!({
            "hyperplanes": t.hyperplanes.map(|i| pair(hs.get(i).id)),
            "sides": t.sides,
        })
    });
    let max_family = hs.max_transverse_family();
    let mut text = format!(
        "hyperplanes: {}\nlargest transverse family: {}\n",
        hs.len(),
        max_family
    );
    for h in hs.iter() {
        let [a, b] = h.dimension_sizes();
        text.push_str(&format!(
            "  {}-{}: {} edges, halfspaces {} | {}\n",
            g.name(h.id.0),
            g.name(h.id.1),
            h.edges.len(),
            a,
            b
        ));
    }
    text.push_str(&format!("facing triple: {}\n", if facing.is_some() { "yes" } else { "none" }));
    let json = json!({
        "count": hs.len(),
        "hyperplanes": to_value(hs.to_json(g)),
        "max_transverse_family": max_family,
        "facing_triple": facing,
    });
    Ok(Report::ok(json, text))
}

fn cubes(g: &Graph, max_dim: Option<usize>) -> Result<Report> {
    let mut complex = enumerate_cubes_with_ceiling(g, cell_ceiling_from_env()?)?;
    if let Some(k) = max_dim {
        complex = complex.skeleton(k);
    }
    let hs = Hyperplanes::compute(g).ok();
    let maximal: Vec<Value> = match &hs {
        Some(hs) => maximal_cubes_with(&complex, hs)
            .into_iter()
            .map(|m| {
                json!({
                    "vertices": m.cube.names(g),
                    "hyperplanes": m.hyperplanes.iter().map(|&i| {
                        let (u, v) = hs.get(i).id;
                        [g.name(u), g.name(v)]
                    }).collect::<Vec<_>>(),
                })
            })
            .collect(),
        None => complex
            .maximal_cells()
            .into_iter()
            .map(|c| json!({ "vertices": c.names(g), "hyperplanes": null }))
            .collect(),
    };
    let mut non_flag = None;
    for v in 0..g.len() {
        let check = is_flag(&vertex_link(&complex, v)?);
        if let Some(w) = check.witness {
            non_flag = Some(json!({
                "vertex": g.name(v),
                "clique": w.iter().map(|&u| g.name(u)).collect::<Vec<_>>(),
            }));
            break;
        }
    }
    let text = format!(
        "f-vector: {:?}\neuler characteristic: {}\ndimension: {}\nmaximal cubes: {}\nflag links: {}\n",
        complex.f_vector(),
        complex.euler_characteristic(),
        complex.dimension(),
        maximal.len(),
        non_flag.is_none()
    );
    let json = json!({
        "complex": to_value(complex.to_json()),
        "euler_characteristic": complex.euler_characteristic(),
        "dimension": complex.dimension(),
        "maximal_cubes": maximal,
        "flag": non_flag.is_none(),
        "non_flag_witness": non_flag,
    });
    Ok(Report::ok(json, text))
}

fn dual(ws: &Wallspace) -> Result<Report> {
    let d = dualize(ws)?;
    let law = wall_distance_check(ws, &d);
    let median = (d.graph.len() < ORACLE_DEFAULT_LIMIT).then(|| medianness_oracle(&d.graph).median);
    let text = format!(
        "walls: {}\nvertices: {}, edges: {}\nwall distance violations: {}\nmedian: {}\n",
        ws.wall_count(),
        d.graph.len(),
        d.graph.edge_count(),
        law.violations.len(),
        median.map_or("not checked".into(), |m| m.to_string())
    );
    let dj = d.to_json(ws);
    let json = json!({
        "graph": to_value(dj.graph),
        "points": to_value(dj.points),
        "wall_distance": to_value(law.to_json(ws)),
        "median": median,
    });
    Ok(Report::ok(json, text))
}

fn fixed_cube(g: &Graph, gens: &ActionGenerators, flip_bound: Option<usize>) -> Result<Report> {
    let hs = Hyperplanes::compute(g)?;
    let cube = invariant_cube_with(g, &hs, gens)?;
    let bound = match flip_bound {
        Some(b) => b,
        None => default_word_bound(g, gens)?,
    };
    let mut flippable = Vec::new();
    for j in 0..hs.len() {
        let (u, v) = hs.get(j).id;
        let flip = find_flip(&hs, j, gens, bound)?;
        flippable.push(json!({
            "id": [g.name(u), g.name(v)],
            "flippable": flip.is_some(),
            "word": flip.as_ref().map(|f| to_value(&f.word)),
            "halfspace": flip.as_ref().map(|f| f.halfspace),
        }));
    }
    let count = flippable.iter().filter(|f| f["flippable"] == true).count();
    let text = format!(
        "generators: {}\norbit of {}: {} vertices\nhull: {} vertices\ninvariant cube: [{}] (dimension {})\nflippable hyperplanes: {} of {} (word bound {})\n",
        gens.generators.len(),
        g.name(cube.seed),
        cube.orbit.len(),
        cube.hull.len(),
        cube.cube.names(g).join(", "),
        cube.dimension,
        count,
        hs.len(),
        bound
    );
    let json = json!({
        "invariant_cube": to_value(cube.to_json(g)),
        "flip_bound": bound,
        "flippable": flippable,
    });
    Ok(Report::ok(json, text))
}

fn pl_growth(h: &PlHomeo, n_max: usize) -> Result<Report> {
    let report = growth_profile(h, n_max)?;
    let dist = orbit_distance(h)?;
    let singular: Vec<String> = sing(h).iter().map(ToString::to_string).collect();
    let text = format!(
        "sing: [{}]\norbit distance: {}\n#Sing(g^n), n = 1..{}: {:?}\ngrowth: {:?}{}\n",
        singular.join(", "),
        dist.distance,
        n_max,
        report.sequence,
        report.classification,
        report.k.map_or(String::new(), |k| format!(" (K = {k})"))
    );
    let json = json!({
        "homeomorphism": to_value(h.to_json()),
        "sing": singular,
        "orbit_distance": dist.distance,
        "growth": to_value(&report),
    });
    Ok(Report::ok(json, text))
}

fn embed(g: &Graph, basepoint: Option<&str>) -> Result<Report> {
    let hs = Hyperplanes::compute(g)?;
    let o = match basepoint {
        Some(name) => g.vertex(name)?,
        None => 0,
    };
    let table = hs.canonical_embedding(g, o)?;
    let mut text = format!("basepoint: {}\ndimension: {}\n", g.name(o), hs.len());
    for v in 0..g.len() {
        text.push_str(&format!("  {} {}\n", table.code(v), g.name(v)));
    }
    Ok(Report::ok(to_value(table.to_json(g)), text))
}

fn gen(family: &str, params: &[usize], seed: Option<u64>, output: Option<&Path>) -> Result<Report> {
    let family: Family = family.parse().map_err(|e: Error| Error::Usage(e.to_string()))?;
    if family.is_randomized() && seed.is_none() {
        return Err(Error::Usage(format!("{family} requires --seed")));
    }
    let g = generate(family, params, seed).map_err(|e| match e {
        Error::InvalidInput(msg) => Error::Usage(msg),
        other => other,
    })?;
    let graph = to_value(g.to_json());
    let text = format!("{family}: {} vertices, {} edges\n", g.len(), g.edge_count());
    match output {
        Some(path) => {
            let mut body = serde_json::to_string_pretty(&graph)?;
            body.push('\n');
            std::fs::write(path, body)?;
            let json = json!({
                "family": family.name(),
                "vertices": g.len(),
                "edges": g.edge_count(),
                "output": path.display().to_string(),
            });
            Ok(Report::ok(json, text))
        }
        None => Ok(Report::ok(graph, text)),
    }
}

/// Parses arguments, runs and prints; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 64 } else { 0 };
        }
    };
    let outcome = configure_jobs(cli.jobs).and_then(|()| run(&cli));
    match outcome {
        Ok(report) => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            match out
                .write_all(report.render(cli.text).as_bytes())
                .and_then(|()| out.flush())
            {
                Ok(()) => report.exit_code,
                // a closed pipe downstream is not our failure
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => report.exit_code,
                Err(e) => {
                    let e = Error::from(e);
                    eprintln!("error: {e}");
                    e.exit_code()
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
