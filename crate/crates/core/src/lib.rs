//! Alternating bilinear forms from invariant quasimorphisms on free groups.
//!
//! The pipeline: words in `F_m` ([`words`]), quasimorphisms on the commutator
//! subgroup built from a core homomorphism plus Brooks counting terms
//! ([`qm`]), the limit-formula extractor for the induced form on `Z^m`
//! ([`extract`]), and the closed-form symplectic targets it is compared with
//! ([`sympl`]). [`reference`] holds slow independent oracles.
//!
//! All arithmetic is exact. The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;

pub mod extract;
pub mod form;
pub mod qm;
pub mod reference;
pub mod sample;
pub mod sympl;
pub mod words;

pub use extract::{
    check_extendable, estimate_pair, extract_matrix, form_space_dim, property_harness,
    ConvergenceReport, ExtendabilityVerdict, ExtractError, Extraction, KSchedule, Limits,
};
pub use form::{AltForm, FormError, Rational};
pub use qm::{eval_brooks, eval_core, eval_qm, BrooksTerm, QmError, QmSpec};
pub use sympl::{ManifoldSpec, SurfaceSpec, SymplError};
pub use words::{parse_word, Generator, IntVector, LatticePath, Word, WordError};
