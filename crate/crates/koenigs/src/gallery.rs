//! Worked example models: closed-form Koenigs charts paired with their
//! exact image domains, the slit and ray domains derived from them, and the
//! curved-slit domain produced by Newton continuation along a level line of
//! the `2 log cos` chart.
//!
//! Everything here is pure construction — the replication checklists that
//! exercise these models live in [`crate::report`].

use num_complex::Complex64 as Complex;

use crate::geometry::{
    BaseSpace, Blocker, CurveRepeat, Extent, IndexSet, KoenigsDomain, SemigroupDescriptor,
};
use crate::maps::{Atom, BranchContext, HoloMap, MapError};

const TAU: f64 = std::f64::consts::TAU;

/// A univalent disc chart together with its exact image domain.
#[derive(Clone, Debug)]
pub struct ChartedDomain {
    /// Chart `h : 𝔻 → Ω`, univalent onto `domain`.
    pub chart: HoloMap,
    /// The image `Ω = h(𝔻)`.
    pub domain: KoenigsDomain,
}

impl ChartedDomain {
    /// The model map `h⁻¹ ∘ (w ↦ w + shift) ∘ h`, validated against the
    /// domain.
    pub fn model(&self, shift: Complex) -> Result<HoloMap, MapError> {
        HoloMap::model_map(self.chart.clone(), self.domain.clone(), shift)
    }

    /// The conjugate `h⁻¹ ∘ inner ∘ h` of an arbitrary self-map of the
    /// image domain.
    pub fn conjugate(&self, inner: HoloMap) -> HoloMap {
        HoloMap::conjugate(self.chart.clone(), inner)
    }
}

/// Identifier of a worked example in the replication suite.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExampleId {
    /// Parabolic disc automorphism with half-plane Koenigs domain.
    ParabolicAutomorphism,
    /// Zero-step parabolic map on the slanted-comb domain; not embeddable,
    /// yet the identity is not isolated in its centralizer.
    SlantedComb,
    /// Positive-step map on the notched half-plane whose centralizer holds
    /// two non-commuting one-parameter semigroups.
    NotchedHalfPlane,
    /// Positive-step map on the half-plane minus unit vertical slits;
    /// non-abelian centralizer and not embeddable.
    VerticalSlits,
    /// Positive-step map on the half-plane minus curved slits, where the
    /// translation semigroup is a proper subset of the step-ratio image.
    CurvedSlits,
    /// Strip domains with prescribed real translation semigroups (naturals
    /// versus the full half-line).
    ReciprocalSemigroup,
}

impl ExampleId {
    /// All examples, in replication order.
    pub fn all() -> [ExampleId; 6] {
        [
            ExampleId::ParabolicAutomorphism,
            ExampleId::SlantedComb,
            ExampleId::NotchedHalfPlane,
            ExampleId::VerticalSlits,
            ExampleId::CurvedSlits,
            ExampleId::ReciprocalSemigroup,
        ]
    }

    /// Command-line identifier.
    pub fn slug(&self) -> &'static str {
        match self {
            ExampleId::ParabolicAutomorphism => "ex-parab-autom",
            ExampleId::SlantedComb => "ex-non-non",
            ExampleId::NotchedHalfPlane => "ex-z-non-abelian",
            ExampleId::VerticalSlits => "ex-again-non-abelian",
            ExampleId::CurvedSlits => "ex-a-neq-astar",
            ExampleId::ReciprocalSemigroup => "prop-reciprocal",
        }
    }

    /// Parses a command-line identifier.
    pub fn from_slug(s: &str) -> Option<ExampleId> {
        ExampleId::all().into_iter().find(|id| id.slug() == s)
    }
}

// ---------------------------------------------------------------------------
// Closed-form charted domains.
// ---------------------------------------------------------------------------

/// Cayley chart onto the upper half-plane: the model of a parabolic disc
/// automorphism with Denjoy–Wolff point 1.
pub fn half_plane_model() -> ChartedDomain {
    ChartedDomain {
        chart: HoloMap::Atom(Atom::Cayley),
        domain: KoenigsDomain::new(BaseSpace::UpperHalfPlane, vec![])
            .expect("half-plane domain is valid"),
    }
}

/// Logarithmic chart onto the strip `{0 < Im w < π/ln 2}`: the model of the
/// hyperbolic automorphism with multiplier `1/2`.
pub fn strip_model() -> ChartedDomain {
    let ln2 = std::f64::consts::LN_2;
    let chart = HoloMap::compose(
        HoloMap::Atom(Atom::Affine {
            scale: Complex::new(1.0 / ln2, 0.0),
            offset: Complex::new(0.0, 0.0),
        }),
        HoloMap::compose(HoloMap::Atom(Atom::Log), HoloMap::Atom(Atom::Cayley)),
    );
    ChartedDomain {
        chart,
        domain: KoenigsDomain::new(
            BaseSpace::Strip { a: 0.0, b: std::f64::consts::PI / ln2 },
            vec![],
        )
        .expect("strip domain is valid"),
    }
}

/// Chart onto the plane minus downward vertical slits of linearly growing
/// depth: slit `n ∈ ℤ` sits at abscissa `n` and reaches up to `−(n+1)`.
///
/// The real translation semigroup of the image is `{k + it : k ∈ ℤ,
/// t ≥ −k}`; in particular no non-integer real translation is admissible,
/// while every upward translation is.
pub fn slanted_comb_model() -> ChartedDomain {
    let kappa = 0.125 + std::f64::consts::LN_2 / (4.0 * std::f64::consts::PI);
    let chart = HoloMap::compose(
        HoloMap::Atom(Atom::Affine {
            scale: Complex::new(1.0, -1.0),
            offset: Complex::new(-0.5, -0.5 - 2.0 * kappa),
        }),
        HoloMap::compose(HoloMap::Atom(Atom::SlantComb), HoloMap::Atom(Atom::Cayley)),
    );
    ChartedDomain {
        chart,
        domain: KoenigsDomain::new(
            BaseSpace::Plane,
            vec![Blocker::SlitFamily {
                x0: 0.0,
                dx: 1.0,
                y_low: Extent::MinusInf,
                y_high: Extent::Affine { offset: -1.0, slope: -1.0 },
                indices: IndexSet::Integers,
            }],
        )
        .expect("slanted comb domain is valid"),
    }
}

/// Chart onto the upper half-plane minus the notch `{Re ≤ 0, 0 < Im ≤ 1}`.
pub fn notched_half_plane_model() -> ChartedDomain {
    let chart = HoloMap::compose(
        HoloMap::Atom(Atom::HalfPlaneNotch),
        HoloMap::Atom(Atom::Cayley),
    );
    ChartedDomain {
        chart,
        domain: KoenigsDomain::new(
            BaseSpace::UpperHalfPlane,
            vec![Blocker::LeftHalfStrip {
                x_max: 0.0,
                y_low: Extent::constant(0.0),
                y_high: 1.0,
            }],
        )
        .expect("notched half-plane domain is valid"),
    }
}

// ---------------------------------------------------------------------------
// Domains without a closed-form disc chart.
// ---------------------------------------------------------------------------

/// Upper half-plane minus the unit vertical slits `{−k + iy : 0 ≤ y ≤ 1}`,
/// `k ∈ ℕ₀`.
///
/// The translation semigroup is `{k + it : k ∈ ℕ₀, t ≥ 0}`; the domain is
/// not starlike at infinity (no non-integer real translation embeds).
pub fn vertical_slit_domain() -> KoenigsDomain {
    KoenigsDomain::new(
        BaseSpace::UpperHalfPlane,
        vec![Blocker::SlitFamily {
            x0: 0.0,
            dx: -1.0,
            y_low: Extent::constant(0.0),
            y_high: Extent::constant(1.0),
            indices: IndexSet::Naturals,
        }],
    )
    .expect("vertical slit domain is valid")
}

/// The `2 log cos(πw)` chart as a map of the upper half-plane.
pub fn two_log_cos() -> HoloMap {
    HoloMap::Atom(Atom::TwoLogCos)
}

/// The periodic half-plane generator `−cot(πw)/(2π)`.
pub fn cot_generator() -> HoloMap {
    HoloMap::Atom(Atom::CotGenerator)
}

/// Time-`t` flow of the periodic half-plane generator.
pub fn cot_flow(t: f64) -> HoloMap {
    HoloMap::Flow { generator: Box::new(cot_generator()), time: t }
}

/// Image of the full upper half-plane under the `2 log cos` chart: the plane
/// minus the horizontal rays `{x + 2πik : x ≤ 0}`, `k ∈ ℤ`.
pub fn two_log_cos_image() -> KoenigsDomain {
    KoenigsDomain::new(
        BaseSpace::Plane,
        vec![
            Blocker::HorizontalRays {
                y0: 0.0,
                dy: TAU,
                x_max: Extent::constant(0.0),
                indices: IndexSet::Naturals,
            },
            Blocker::HorizontalRays {
                y0: -TAU,
                dy: -TAU,
                x_max: Extent::constant(0.0),
                indices: IndexSet::Naturals,
            },
        ],
    )
    .expect("ray image domain is valid")
}

/// Right end of the ray image of a unit vertical slit under the
/// `2 log cos` chart: the slit `{iy : 0 ≤ y ≤ 1}` maps to the real segment
/// `[0, 2 ln cosh π]`.
pub fn unit_slit_ray_end() -> f64 {
    2.0 * std::f64::consts::PI.cosh().ln()
}

/// Image of [`vertical_slit_domain`] under the `2 log cos` chart: the rays
/// at non-negative lattice heights extend to `2 ln cosh π` (they absorb the
/// slit images), the rest stop at 0.
pub fn vertical_slit_image() -> KoenigsDomain {
    KoenigsDomain::new(
        BaseSpace::Plane,
        vec![
            Blocker::HorizontalRays {
                y0: 0.0,
                dy: TAU,
                x_max: Extent::constant(unit_slit_ray_end()),
                indices: IndexSet::Naturals,
            },
            Blocker::HorizontalRays {
                y0: -TAU,
                dy: -TAU,
                x_max: Extent::constant(0.0),
                indices: IndexSet::Naturals,
            },
        ],
    )
    .expect("extended ray image domain is valid")
}

/// Image of [`curved_slit_domain`] under the `2 log cos` chart: the full
/// half-plane image with extra rays at heights `2π(k + 1/3)`, `k ∈ ℕ₀`.
pub fn curved_slit_image() -> KoenigsDomain {
    KoenigsDomain::new(
        BaseSpace::Plane,
        vec![
            Blocker::HorizontalRays {
                y0: 0.0,
                dy: TAU,
                x_max: Extent::constant(0.0),
                indices: IndexSet::Naturals,
            },
            Blocker::HorizontalRays {
                y0: -TAU,
                dy: -TAU,
                x_max: Extent::constant(0.0),
                indices: IndexSet::Naturals,
            },
            Blocker::HorizontalRays {
                y0: TAU / 3.0,
                dy: TAU,
                x_max: Extent::constant(0.0),
                indices: IndexSet::Naturals,
            },
        ],
    )
    .expect("thirds ray image domain is valid")
}

/// Samples of the curved slit: the preimage under the `2 log cos` chart of
/// the horizontal ray `{x + 2πi/3 : x ≤ 0}`, traced by Newton continuation
/// from the free end (`x = 0`) down to its landing point `−1/2` on the real
/// axis.
///
/// The parameter grid is uniform in `x` over `[−depth, 0]`, which clusters
/// the samples geometrically near the landing point (the curve approaches
/// it like `e^{x/2}`); the exact landing point is appended.
pub fn curved_slit_samples(
    samples: usize,
    depth: f64,
    ctx: &BranchContext,
) -> Result<Vec<Complex>, MapError> {
    assert!(samples >= 8 && depth > 0.0, "need a real sampling budget");
    let h = two_log_cos();
    let mut pts = Vec::with_capacity(samples + 2);
    let mut local = *ctx;
    for k in 0..=samples {
        let x = -depth * k as f64 / samples as f64;
        let target = Complex::new(x, TAU / 3.0);
        let w = h.solve(target, &local)?;
        local.seed = Some(w);
        pts.push(w);
    }
    pts.push(Complex::new(-0.5, 0.0));
    Ok(pts)
}

/// Upper half-plane minus the curved slits `Γ_k = Γ_0 − k`, `k ∈ ℕ₀`, where
/// `Γ_0` is the level line of [`curved_slit_samples`].
///
/// The slits are genuinely curved (their abscissa drifts with height), so no
/// small vertical translation maps the domain into itself — even though the
/// step-ratio image of its centralizer contains the whole ray `{it : t ≥ 0}`.
pub fn curved_slit_domain(
    samples: usize,
    depth: f64,
    ctx: &BranchContext,
) -> Result<(KoenigsDomain, Vec<Complex>), MapError> {
    let pts = curved_slit_samples(samples, depth, ctx)?;
    let domain = KoenigsDomain::new(
        BaseSpace::UpperHalfPlane,
        vec![Blocker::SampledCurve {
            points: pts.clone(),
            tail_rule: "none".into(),
            repeat: Some(CurveRepeat {
                step: Complex::new(-1.0, 0.0),
                indices: IndexSet::Naturals,
            }),
        }],
    )
    .map_err(MapError::Geometry)?;
    Ok((domain, pts))
}

/// The two sides of the level-line identity behind the curved slits: for
/// `w = a + it` in the upper half-plane,
/// `tan(Im h(w)/2) = −tan(πa)·tanh(πt)` with `h = 2 log cos(πw)`.
///
/// Constancy of the left side along a vertical line would force it to be 0,
/// so no level line `{Im h = 2π(k + 1/3)}` is vertical.
pub fn level_line_criterion(a: f64, t: f64, ctx: &BranchContext) -> Result<(f64, f64), MapError> {
    let h = two_log_cos();
    let v = h.eval(Complex::new(a, t), ctx)?;
    let lhs = (v.im / 2.0).tan();
    let rhs = -(std::f64::consts::PI * a).tan() * (std::f64::consts::PI * t).tanh();
    Ok((lhs, rhs))
}

/// Strip domain whose real translation semigroup is exactly the described
/// additive set (naturals, or with extra points and rays).
pub fn reciprocal_domain(
    descriptor: &SemigroupDescriptor,
) -> Result<KoenigsDomain, crate::geometry::GeometryError> {
    crate::geometry::build_reciprocal_domain(descriptor)
}
