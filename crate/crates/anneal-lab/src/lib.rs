//! Desk-scale laboratory for annealing experiments on Chimera-graph Ising
//! instances: a classical rotor sampler, a path-integral transverse-field
//! sampler, exact ground-state solvers, and the statistics used to compare
//! their outcome distributions.

pub mod chimera;
pub mod coherent;
pub mod error;
pub mod exact;
pub mod harness;
pub mod instance;
pub mod records;
pub mod schedule;
pub mod sqa;
pub mod sssv;
pub mod stats;

pub use error::{Error, Result};

// The guide's code blocks compile and run as doctests.
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/introduction.md")]
mod book_introduction {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/chimera.md")]
mod book_chimera {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/instances.md")]
mod book_instances {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/exact.md")]
mod book_exact {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/schedules.md")]
mod book_schedules {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/rotors.md")]
mod book_rotors {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/path-integral.md")]
mod book_path_integral {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/coherent.md")]
mod book_coherent {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/statistics.md")]
mod book_statistics {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/experiments.md")]
mod book_experiments {}
