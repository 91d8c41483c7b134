//! Deterministic chaotic heteroclinic networks in the plane.
//!
//! A network is described declaratively ([`netspec`]), evaluated as a
//! blended vector field ([`field`]), iterated with the Euler map plus
//! section kicks ([`dynamics`]), reduced to switching statistics
//! ([`analysis`]) and tuned against target statistics ([`fit`]).

// `!(x > 0.0)` is deliberate: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod builder;
pub mod cli;
pub mod dynamics;
pub mod field;
pub mod fit;
pub mod netspec;
pub mod plot;
pub mod presets;
