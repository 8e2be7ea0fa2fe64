//! Koenigs models, centralizers and embeddability of univalent self-maps of
//! the unit disc.
//!
//! The crate turns the linearization theory of holomorphic self-maps into
//! executable checks.  A univalent self-map `φ` of the disc without interior
//! fixed point is conjugate, via a Koenigs map `h`, to the translation
//! `w ↦ w + 1` on a planar domain `Ω = h(𝔻)`.  Which translations `w ↦ w + b`
//! leave `Ω` invariant determines which maps commute with `φ`, whether `φ`
//! embeds into a one-parameter semigroup, and how its centralizer is shaped.
//!
//! Module map:
//! - [`geometry`]: planar Koenigs domains with slit complements and the exact
//!   translation-containment, starlikeness and sector-gap tests.
//! - [`maps`]: closed-form holomorphic maps, Möbius transformations, model
//!   maps defined through a chart, and boundary (angular) derivatives.
//! - [`classify`]: Denjoy–Wolff points, multipliers and the
//!   elliptic / hyperbolic / parabolic (zero or positive hyperbolic step)
//!   trichotomy.
//! - [`abel`]: Abel/Koenigs linearizers, centralizer constants and the
//!   simultaneous linearization of a commuting pair.
//! - [`lifting`]: the exponential cover `ζ = e^{2πiw}` — projecting periodic
//!   maps of the half-plane to the punctured disc and lifting back.
//! - [`centralizer`]: the commutation test, the maps `b ↦ 𝔗(b)` and
//!   `ψ ↦ 𝔖(ψ)`, half-plane-type representations and embeddability verdicts.
//! - [`semiflow`]: one-parameter semigroups from Herglotz generators or from
//!   a Koenigs chart, trajectories and flow-based centralizer values.
//! - [`gallery`]: worked examples with known centralizer structure, and the
//!   claim checklists behind `koenigs replicate`.
//! - [`report`]: serializable result envelopes used by the CLI.

#![warn(missing_docs)]

pub mod abel;
pub mod centralizer;
pub mod classify;
pub mod gallery;
pub mod geometry;
pub mod lifting;
pub mod maps;
pub mod num;
pub mod report;
pub mod semiflow;

/// Convenience re-exports for downstream code and the CLI.
pub mod prelude {
    pub use crate::abel::{AbelSolution, CentralizerConstant, ConstantMethod};
    pub use crate::centralizer::{EmbeddabilityVerdict, EmbeddingOutcome, PHSRepresentation};
    pub use crate::classify::{Classification, MapType};
    pub use crate::gallery::{ChartedDomain, ExampleId};
    pub use crate::geometry::{
        BaseSpace, Blocker, Extent, IndexSet, KoenigsDomain, SemigroupDescriptor,
    };
    pub use crate::lifting::{LiftedPair, PeriodicMap};
    pub use crate::maps::{Atom, BranchContext, HoloMap, Mobius};
    pub use crate::report::{ExampleReport, ReportEnvelope};
    pub use crate::semiflow::{Ambient, SemigroupSource, SemigroupSpec};
    pub use num_complex::Complex64 as Complex;
}
