//! Exact computations of TR of polynomial rings over F_p: closed-form
//! charts, the Witt-vector row of the descent spectral sequence, and the
//! E_2 page of the cobar spectral sequence.

pub mod arith;
pub mod chart;
pub mod cli;
pub mod cobar;
pub mod oracle;
pub mod reps;
pub mod witt;
