//! Floating-point Monte Carlo verification for the exact machinery.
//!
//! Integer vectors are enumerated under weighted sup quasi-norms to measure
//! how small `|xv|'` actually gets, log-log slopes of those minima estimate
//! diophantine exponents, diagonal-flow systole traces check the dynamical
//! reformulation, and a quadratic level-set sampler checks the measure
//! bound used in the Heisenberg analysis.
//!
//! Enumeration partitions the outermost coordinate into slabs; with the
//! `parallel` feature (default) slabs run on rayon, and
//! [`Exec::Sequential`] forces the single-threaded path for comparison.
//! Results are exact minima over the box, so values are identical whichever
//! path runs them.

pub mod enumerate;
pub mod norms;
pub mod slope;
pub mod dani;
pub mod heisenberg;
pub mod remez;

mod error;
mod exec;

pub use enumerate::{min_image_qnorm, MinResult};
pub use error::EmpiricalError;
pub use exec::{configure_threads, Exec};
pub use norms::{MatF, QuasiNormF, SearchBox};
pub use slope::{estimate_beta, geometric_schedule, SlopeFit};
pub use dani::{dani_flow, dani_systole, DaniFlow, SystoleTrace};
pub use heisenberg::heisenberg_word_min;
pub use remez::{quadratic_level_measure, remez_bound, RemezEstimate};
