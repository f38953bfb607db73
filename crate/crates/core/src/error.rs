use alloc::boxed::Box;
use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A caller violated an operation's precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("SVD did not converge for a {rows}x{cols} matrix")]
    SvdNonConvergence { rows: usize, cols: usize },

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("invalid element {element}: Jacobian determinant {det:e} at ({u}, {v})")]
    InvalidElement {
        element: usize,
        det: f64,
        u: f64,
        v: f64,
    },

    #[error("cusp on edge {edge} of element {element}: zero speed at t = {t}")]
    Cusp { element: usize, edge: usize, t: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("univariate Levin did not converge on [{a}, {b}] (depth limit {depth})")]
    Levin1dNonConvergence { a: f64, b: f64, depth: usize },

    #[error(
        "multivariate Levin did not converge on reference cell {cell:?} (depth limit {depth})"
    )]
    Levin2dNonConvergence { cell: [[f64; 2]; 3], depth: usize },

    #[error("oracle quadrature did not converge on {what} (depth limit {depth})")]
    OracleNonConvergence { what: String, depth: usize },

    #[error("element {element}: {source}")]
    Element { element: usize, source: Box<Error> },
}

impl Error {
    /// True for the failures the driver reports as nonconvergence rather
    /// than as bad input.
    pub fn is_nonconvergence(&self) -> bool {
        match self {
            Error::SvdNonConvergence { .. }
            | Error::Levin1dNonConvergence { .. }
            | Error::Levin2dNonConvergence { .. }
            | Error::OracleNonConvergence { .. } => true,
            Error::Element { source, .. } => source.is_nonconvergence(),
            _ => false,
        }
    }

    /// Attaches an element index unless the error already names one.
    pub fn in_element(self, element: usize) -> Error {
        match self {
            e @ Error::Element { .. } => e,
            e @ Error::InvalidElement { .. } => e,
            e => Error::Element {
                element,
                source: Box::new(e),
            },
        }
    }
}
