use thiserror::Error;

pub type Result<T> = std::result::Result<T, GeomError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("map has a pole at this point ({what})")]
    PoleAtBoundary { what: &'static str },

    #[error("point lies outside the domain (defining value {value:.3e})")]
    OutsideDomain { value: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("Jacobian is singular")]
    SingularJacobian,

    #[error("differential norm is not constant: spread {spread:.3e}, mean {estimate}")]
    NotConstantNorm { spread: f64, estimate: f64 },

    #[error("sampled field is not a polynomial of degree <= 2 (fit residual {residual:.3e})")]
    NotPolynomial { residual: f64 },

    #[error("bracket leaves degree <= 2 (largest cubic coefficient {max_cubic:.3e})")]
    DegreeOverflow { max_cubic: f64 },

    #[error("field is not an ad_D eigenvector (residual {residual:.3e})")]
    NotGraded { residual: f64 },

    #[error("field is not in aut(H^n) (residual {residual:.3e}, imaginary part {max_imag:.3e})")]
    NotInAlgebra { residual: f64, max_imag: f64 },

    #[error("no closed-form flow for basis field {tag}")]
    UnsupportedTag { tag: String },

    #[error("shift system is singular (a = {a})")]
    SingularSystem { a: f64 },

    #[error("permuted field is not in collapsed form (residual {residual:.3e})")]
    NotCollapsible { residual: f64 },

    #[error("degenerate Möbius matrix")]
    Degenerate,

    #[error("matrix is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("invalid index {index} for dimension {n}")]
    InvalidIndex { index: usize, n: usize },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),
}
