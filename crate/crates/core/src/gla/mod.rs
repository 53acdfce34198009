//! Exact graded linear algebra: scalars, sparse matrices, graded spaces and
//! maps, and the ħ- and τ-series containers built on them.

pub mod graded;
pub mod linalg;
pub mod scalar;
pub mod series;
pub mod tau;

pub use graded::{koszul_sign, BasisElement, GradedMap, GradedSpace, Linear};
pub use linalg::{kernel_image, solve_linear, Solution, SparseMatrix, SparseVec};
pub use scalar::Scalar;
pub use series::{HbarSeries, LaurentSeries};
pub use tau::{Monomial, TauRing, TauSeries};
