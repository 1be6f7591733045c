use thiserror::Error;

/// Errors produced by the design toolchain.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Scaling laws or geometry produced a non-positive or self-intersecting dimension.
    #[error("infeasible geometry: {0}")]
    InfeasibleGeometry(String),
    /// Artwork could not be drawn in the given cell.
    #[error("infeasible artwork on cell {cell}: {reason}")]
    InfeasibleArtwork { cell: usize, reason: String },
    /// The operation was applied to the wrong kind of object (pentagon vs hexagon, C vs L).
    #[error("kind mismatch: {0}")]
    Kind(String),
    /// A sheet extraction produced Y = 0 (C = 0 or L = infinity).
    #[error("degenerate sheet: {0}")]
    DegenerateSheet(String),
    /// Network conversion hit a zero denominator.
    #[error("singular network: {0}")]
    Singular(String),
    #[error("numeric error: {0}")]
    Numeric(String),
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("orientation error: {0}")]
    Orientation(String),
    #[error("symmetry error: {0}")]
    Symmetry(String),
    /// Sampling grid too coarse for the requested wavelength.
    #[error("sampling error: {0}")]
    Sampling(String),
    /// Two columns or grids that must line up do not.
    #[error("alignment error: {0}")]
    Alignment(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("data format error: {0}")]
    DataFormat(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::DataFormat(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::DataFormat(e.to_string())
    }
}
