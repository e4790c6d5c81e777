use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("group closure exceeded {0} elements")]
    GroupTooLarge(usize),

    #[error("operation not supported for group {0}")]
    UnsupportedGroup(String),

    /// A node sits on the collision set or at the origin.
    #[error("infinite potential at node {node}")]
    InfinitePotential { node: usize },

    #[error("vertices {0} and {1} are not joined by an edge")]
    NotAdjacent(usize, usize),

    #[error("path meets a rotation axis near {0:?}")]
    DegenerateProjection([f64; 3]),

    #[error("homotopy search failed: {0}")]
    Search(String),

    #[error("quadrature did not converge (estimated error {0:e})")]
    Quadrature(f64),

    #[error("{0}")]
    Numerical(String),

    #[error("config error in {field}: {msg}")]
    Config { field: String, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            msg: msg.into(),
        }
    }

    /// True for failures of a numerical procedure, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::InfinitePotential { .. }
                | Error::Search(_)
                | Error::Quadrature(_)
                | Error::Numerical(_)
                | Error::DegenerateProjection(_)
        )
    }
}
