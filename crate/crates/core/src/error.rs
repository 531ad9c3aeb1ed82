use thiserror::Error;

/// Errors produced by the library.
///
/// The CLI maps each variant onto an exit code through [`Error::exit_code`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),

    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(String, String),

    #[error("self-loop at `{0}`")]
    SelfLoop(String),

    #[error("graph is disconnected ({components} components)")]
    Disconnected { components: usize },

    #[error("graph has no vertices")]
    EmptyGraph,

    #[error("triple ({0}, {1}, {2}) has no median")]
    NoMedian(String, String, String),

    #[error("triple ({0}, {1}, {2}) has {n} medians: {candidates:?}", n = .3.len(), candidates = .3)]
    NotUnique(String, String, String, Vec<String>),

    #[error("removing hyperplane {id:?} leaves {components} components (expected 2); input is not median")]
    Halfspace {
        id: (String, String),
        components: usize,
    },

    #[error("vertex set is not convex: {0}")]
    NotConvex(String),

    #[error("projection of `{vertex}` is not unique: {candidates:?}")]
    NonUniqueProjection {
        vertex: String,
        candidates: Vec<String>,
    },

    #[error("map is not a bijection on the vertex set: {0}")]
    NotBijective(String),

    #[error("map does not preserve adjacency: {u} ~ {v} is {} but images {gu} ~ {gv} are {}",
        if *.adjacent { "an edge" } else { "a non-edge" },
        if *.adjacent { "not adjacent" } else { "adjacent" })]
    NotAdjacencyPreserving {
        u: String,
        v: String,
        gu: String,
        gv: String,
        adjacent: bool,
    },

    #[error("path is not a walk: {0}")]
    NotAPath(String),

    #[error("invalid wallspace: {0}")]
    InvalidWallspace(String),

    #[error("invalid homeomorphism: {0}")]
    InvalidHomeo(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error("resource ceiling exceeded: {0}")]
    ResourceLimit(String),

    #[error("internal assertion failed: {0}")]
    Assertion(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Process exit code for this error (sysexits conventions).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 64,
            Error::ResourceLimit(_) => 71,
            Error::Assertion(_) => 70,
            _ => 65,
        }
    }
}
