//! The descent spectral sequence for F_p[x] → F_p[x^{1/p^∞}].
//!
//! The E_1 page is assembled from the cosimplicial pieces
//! x^m ⊗ V_{n_1} ⊗ … ⊗ V_{n_k}, the dimension-0 row is computed exactly from
//! Witt vectors of the Čech conerve, and E_2 comes from elimination of
//! isomorphism pairs followed by Smith normal form on what is left.

mod compare;
mod conerve;
mod dim0;
mod e1;
mod multivar;
mod symbolic;

pub use compare::{compare, CellReport, CompareReport};
pub use conerve::{build_conerve, compose, CosimplicialRing};
pub use dim0::{dim0_complex, Dim0Complex, Dim0Gen};
pub use e1::{e1_sizes, E1Table, Summand};
pub use multivar::multivar_e2;
pub use symbolic::{row_e2, symbolic_e2, Page, PageCell, RowE2};

use thiserror::Error;

use crate::arith::ArithError;
use crate::witt::WittError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CobarError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Witt(#[from] WittError),
    #[error("cap overflow: {0}")]
    CapOverflow(String),
    #[error("cosimplicial identity {0} fails")]
    Identity(String),
    #[error("differential leaves the normalized complex at level {level} ({monomial})")]
    NotNormalized { level: usize, monomial: String },
    #[error("image at level {level} is not in the p^t-sublattice ({monomial})")]
    Sublattice { level: usize, monomial: String },
    #[error("d_1 from {source_cell} to {target} is not a homomorphism")]
    NotClosed { source_cell: String, target: String },
    #[error("E_2 is nonzero in columns >= 2 at {cells:?}; collapse is not forced")]
    CollapseViolation { cells: Vec<(usize, i64)> },
    #[error("invalid input: {0}")]
    Input(String),
}
