use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("direction {dir} out of range for a {dim}-dimensional lattice")]
    Direction { dir: usize, dim: usize },

    #[error("step along open axis {axis} leaves the lattice at coordinate {coord:?}")]
    Boundary { axis: usize, coord: Vec<usize> },

    #[error("operation requires periodic boundaries on every axis")]
    NotPeriodic,

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("expected a form of degree {expected}, found degree {found}")]
    Degree { expected: usize, found: usize },

    #[error("singular {what} at site {site:?}{}", link_suffix(*.dir))]
    Singular {
        what: &'static str,
        site: Vec<usize>,
        dir: Option<usize>,
    },

    #[error("lattice dimension {found} too small, need at least {required}")]
    Dimension { required: usize, found: usize },

    #[error("link at site {site:?} direction {dir} is not unimodular (|U| = {modulus})")]
    NotUnimodular {
        site: Vec<usize>,
        dir: usize,
        modulus: f64,
    },

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("unsupported config format version {found} (expected {expected})")]
    VersionMismatch { expected: u32, found: u32 },

    #[error("truncated payload: expected {expected} values, found {found}")]
    Truncated { expected: usize, found: usize },

    #[error("inconsistent header: {0}")]
    Inconsistent(String),

    #[error("malformed config: {0}")]
    Parse(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn link_suffix(dir: Option<usize>) -> String {
    match dir {
        Some(d) => format!(", direction {d}"),
        None => String::new(),
    }
}
