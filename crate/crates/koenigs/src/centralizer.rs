//! Centralizer algebra for univalent self-maps of the disc: commutation
//! testing, the transform from admissible shifts of a Koenigs domain to
//! commuting self-maps and its left inverse (the commutation constant), the
//! periodic half-plane representation of a commuting map, embeddability
//! verdicts for model maps, and the second-angular-derivative relation at a
//! parabolic Denjoy–Wolff point.
//!
//! Two structural facts drive the API. First, for a non-elliptic model map
//! `φ = h⁻¹∘(h+1)` every admissible shift `b` (one with `Ω + b ⊂ Ω` for
//! `Ω = h(𝔻)`) yields a commuting map `ψ_b = h⁻¹∘(h+b)`, and the constant
//! recovered at the Denjoy–Wolff point inverts this assignment. Second, for
//! maps of positive hyperbolic step the commuting maps admit a
//! representation `g(w) = w + F(e^{2πiw})` upstairs, with `F` holomorphic on
//! the disc and of nonnegative imaginary part; its value `F(0)` reproduces
//! the commutation constant by an independent route, and the two are
//! cross-checked whenever both are available.

use num_complex::Complex64 as Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abel::{self, AbelError, AbelSolution, CentralizerConstant, ConstantMethod};
use crate::classify::{self, Classification, ClassifyError, MapType};
use crate::geometry::{BaseSpace, Exactness, GeometryError, KoenigsDomain};
use crate::lifting::{self, LiftError};
use crate::maps::{BranchContext, HoloMap, MapError, LIMIT_SAMPLING_HEIGHT};
use crate::num::{disc_grid, neville_extrapolate, NumError};

const ONE: Complex = Complex::new(1.0, 0.0);
const ZERO: Complex = Complex::new(0.0, 0.0);

/// Default number of pseudo-random grid points for commutation tests.
pub const COMMUTE_GRID: usize = 200;

/// Default commutation tolerance.
pub const COMMUTE_TOL: f64 = 1e-8;

/// Most negative imaginary part tolerated in the half-plane representation.
pub const IMAGINARY_PART_TOL: f64 = 1e-8;

/// Floor of the tolerance used when cross-checking the constant against the
/// representation value `F(0)`.
pub const CROSS_CHECK_FLOOR: f64 = 1e-8;

/// Number of disc points on which the representation is verified.
const REPRESENTATION_GRID: usize = 160;

/// Anchor of the periodicity-verification grid for the representation:
/// safely inside the upper half-plane and away from integer abscissas,
/// where the gallery domains hang their blockers.
const REPRESENTATION_ANCHOR: Complex = Complex::new(0.12, 1.1);

/// Sample budget for the sector scan backing a gap certificate.
const SECTOR_SAMPLES: usize = 400;

/// Rotation used to probe the sensitivity of a commutation constant to the
/// Denjoy–Wolff point.
const TAU_SENSITIVITY_ANGLE: f64 = 1e-6;

/// Errors from centralizer routines.
#[derive(Debug, Error)]
pub enum CentralizerError {
    /// The requested shift does not translate the Koenigs domain into
    /// itself.
    #[error("shift {shift} does not translate the Koenigs domain into itself")]
    NotInSemigroup {
        /// The rejected shift.
        shift: Complex,
    },
    /// The formula route and the representation route disagree.
    #[error(
        "constant mismatch: formula {formula} vs representation {representation} \
         beyond tolerance {tolerance:.3e}"
    )]
    MismatchedMethods {
        /// Value from the displacement-ratio / log-ratio formula.
        formula: Complex,
        /// Value `F(0)` from the half-plane representation.
        representation: Complex,
        /// Combined tolerance that was exceeded.
        tolerance: f64,
    },
    /// The representation has negative imaginary part, which no commuting
    /// self-map can produce; the input is non-commuting or not a self-map.
    #[error("representation imaginary part {value:.3e} < 0 at {at}")]
    NegativeImaginaryPart {
        /// Disc point where the violation was found.
        at: Complex,
        /// The offending imaginary part.
        value: f64,
    },
    /// Sampled geometry cannot certify an embeddability verdict.
    #[error("sampled geometry cannot certify an embeddability verdict")]
    UnsupportedSampled,
    /// An operation that needs a model map `h⁻¹∘(h+b)` received something
    /// else.
    #[error("{op} requires a model map built from a chart and its image domain")]
    ModelMapRequired {
        /// The operation that rejected its input.
        op: &'static str,
    },
    /// The half-plane representation needs a model over the upper
    /// half-plane.
    #[error("the half-plane representation requires an upper half-plane base, found {base:?}")]
    WrongBaseSpace {
        /// The base space that was found instead.
        base: BaseSpace,
    },
    /// The embeddability dichotomy is stated for models with a positive real
    /// time step.
    #[error("embeddability requires a positive real model shift, found {shift}")]
    ShiftNotPositiveReal {
        /// The rejected shift.
        shift: Complex,
    },
    /// A second-derivative ladder was requested at a non-parabolic point.
    #[error("second angular derivatives need a parabolic map, classified {found:?}")]
    NotParabolic {
        /// The classification that was found instead.
        found: MapType,
    },
    /// A ladder or limit failed to settle.
    #[error("no convergence: {0}")]
    NoConvergence(String),
    /// Abel-equation machinery failed.
    #[error(transparent)]
    Abel(#[from] AbelError),
    /// Map evaluation failed.
    #[error(transparent)]
    Map(#[from] MapError),
    /// Geometry predicate failed.
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    /// Classification failed.
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    /// Lifting failed.
    #[error(transparent)]
    Lift(#[from] LiftError),
    /// Numerics failed.
    #[error(transparent)]
    Num(#[from] NumError),
}

/// Outcome of a sampled commutation test.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CommutationCheck {
    /// Whether the worst residual stayed within the tolerance.
    pub commutes: bool,
    /// Worst commutator norm `|φ(ψ(z)) − ψ(φ(z))|` over the grid.
    pub residual: f64,
    /// Number of grid points tested.
    pub grid_size: usize,
    /// Tolerance the residual was compared against.
    pub tolerance: f64,
}

/// The periodic half-plane representation of a map commuting with a
/// positive-step model: `g(w) = w + F(e^{2πiw})` with `F` holomorphic on the
/// disc and `Im F ≥ 0`.
#[derive(Clone, Debug)]
pub struct PHSRepresentation {
    /// The disc function `F`.
    pub representation: HoloMap,
    /// `F(0)`: the translation part of `g` picked up at infinite height.
    pub value_at_zero: Complex,
}

/// The exhaustive set of embeddability outcomes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum EmbeddingOutcome {
    /// The map embeds into a continuous one-parameter semigroup.
    Embeddable,
    /// The map does not embed; no sector certificate was requested or
    /// found.
    NotEmbeddable,
    /// The map does not embed, witnessed by a punctured sector around the
    /// origin free of admissible shifts.
    GapFound,
    /// Neither certificate established: the dichotomy is exhaustive
    /// mathematically but not numerically.
    Inconclusive,
}

/// Supporting data for an embeddability verdict.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", tag = "kind")]
pub enum EmbeddingEvidence {
    /// The verdict was read off the exact domain geometry.
    Geometry,
    /// The punctured sector `0 < |c| ≤ rho`, `|arg c| ≤ delta` contains no
    /// admissible shift.
    EmptySector {
        /// Radius of the scanned sector.
        rho: f64,
        /// Half-opening angle of the scanned sector.
        delta: f64,
    },
}

/// Decision route of an embeddability verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum EmbeddingMethod {
    /// Translation-absorption test of the Koenigs domain.
    StarlikeTest,
    /// Sector scan of admissible shifts around the origin.
    SectorScan,
    /// The hyperbolic dichotomy: for a strip-based model, embeddability is
    /// decided by the same domain geometry.
    HyperbolicDichotomy,
}

/// An embeddability verdict with its evidence trail.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EmbeddabilityVerdict {
    /// The outcome.
    pub verdict: EmbeddingOutcome,
    /// `Some(flag)` when embeddability itself was decided, `None` when the
    /// outcome is inconclusive.
    pub embeddable: Option<bool>,
    /// What backs the outcome.
    pub evidence: EmbeddingEvidence,
    /// How the outcome was reached.
    pub method: EmbeddingMethod,
}

/// Second angular derivatives of a commuting pair at a parabolic
/// Denjoy–Wolff point, together with the constant relating them.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SecondDerivativeRelation {
    /// Second angular derivative of `ψ` at the fixed point.
    pub psi_second: Complex,
    /// Second angular derivative of `φ` at the fixed point.
    pub phi_second: Complex,
    /// The commutation constant of the pair.
    pub s_value: Complex,
    /// `|ψ″ − φ″ · s|`.
    pub residual: f64,
}

/// Tests whether two self-maps commute by sampling the commutator on a
/// pseudo-random interior grid.
///
/// The verdict is `residual ≤ tol` with the worst residual reported; the
/// grid is drawn area-uniformly from the disc of radius `0.85` with the
/// given seed, so runs are reproducible.
pub fn commutes(
    phi: &HoloMap,
    psi: &HoloMap,
    grid_size: usize,
    tol: f64,
    seed: u64,
    ctx: &BranchContext,
) -> Result<CommutationCheck, CentralizerError> {
    let mut residual = 0.0_f64;
    for z in disc_grid(seed, grid_size.max(1), 0.85) {
        let a = phi.eval(psi.eval(z, ctx)?, ctx)?;
        let b = psi.eval(phi.eval(z, ctx)?, ctx)?;
        residual = residual.max((a - b).norm());
    }
    Ok(CommutationCheck { commutes: residual <= tol, residual, grid_size, tolerance: tol })
}

/// Builds the commuting self-map `ψ_b = h⁻¹∘(h + b)` from an Abel solution
/// and an admissible shift.
///
/// `b = 0` yields the identity and `b = 1` reproduces the generating map;
/// shifts that fail to translate the image domain into itself are rejected.
pub fn t_map(sol: &AbelSolution, b: Complex) -> Result<HoloMap, CentralizerError> {
    match HoloMap::model_map(sol.h.clone(), sol.image.clone(), b) {
        Ok(map) => Ok(map),
        Err(MapError::ShiftNotAdmissible { shift }) => {
            Err(CentralizerError::NotInSemigroup { shift })
        }
        Err(e) => Err(e.into()),
    }
}

/// The commutation constant of `ψ` relative to `φ`, with every independent
/// route folded into the result.
///
/// The baseline is the boundary-limit formula at `cls.tau` (displacement
/// ratio for parabolic `φ`, log-multiplier ratio for hyperbolic `φ`). Two
/// refinements are layered on top:
///
/// * when `cls` carries a positive uncertainty for the Denjoy–Wolff point,
///   the ladder is re-run at a slightly rotated boundary point and the
///   measured first-order sensitivity times the uncertainty is added to the
///   error estimate — an angular error in `τ` biases radial limits in a way
///   extrapolation cannot remove, so the report must cover it;
/// * when `φ` is a model map over the upper half-plane (positive hyperbolic
///   step), the representation value `F(0)` is computed independently and
///   cross-checked; the two routes must agree within the combined error,
///   and the sharper representation value is returned with the observed
///   spread as its error estimate.
///
/// Commutation of the pair is the caller's responsibility; the
/// representation route re-checks it as a side effect.
pub fn s_map(
    phi: &HoloMap,
    psi: &HoloMap,
    cls: &Classification,
    ctx: &BranchContext,
) -> Result<CentralizerConstant, CentralizerError> {
    let mut constant = abel::c_constant(phi, psi, cls.tau, cls, ctx)?;

    if let Some(confidence) = cls.tau_confidence {
        if confidence > 0.0 && constant.method == ConstantMethod::ParabolicRatio {
            let rotated = cls.tau * Complex::from_polar(1.0, TAU_SENSITIVITY_ANGLE);
            if let Ok(probe) = abel::c_constant(phi, psi, rotated, cls, ctx) {
                let sensitivity = (probe.value - constant.value).norm() / TAU_SENSITIVITY_ANGLE;
                constant.error_estimate += sensitivity * confidence;
            }
        }
    }

    if let HoloMap::ModelMap { image, .. } = phi {
        if matches!(image.base(), BaseSpace::UpperHalfPlane) {
            match phs_representation(phi, psi, ctx) {
                Ok(rep) => {
                    let spread = (rep.value_at_zero - constant.value).norm();
                    let tolerance = CROSS_CHECK_FLOOR + 4.0 * constant.error_estimate;
                    if spread > tolerance {
                        return Err(CentralizerError::MismatchedMethods {
                            formula: constant.value,
                            representation: rep.value_at_zero,
                            tolerance,
                        });
                    }
                    return Ok(CentralizerConstant {
                        value: rep.value_at_zero,
                        error_estimate: spread.max(1e-14),
                        method: ConstantMethod::RepresentationF0,
                    });
                }
                // A genuine sign violation is a verdict about the input.
                Err(e @ CentralizerError::NegativeImaginaryPart { .. }) => return Err(e),
                // Anything else (e.g. the verification grid left a slitted
                // domain) only means the cross-check is unavailable here;
                // the formula value stands on its own.
                Err(_) => {}
            }
        }
    }

    Ok(constant)
}

/// Recovers the disc function `F` of the representation
/// `h∘ψ∘h⁻¹ = w ↦ w + F(e^{2πiw})` for a map `ψ` commuting with a model
/// `φ = h⁻¹∘(h+1)` over the upper half-plane.
///
/// The difference `g(w) − w` is periodic exactly when `ψ` commutes with
/// `φ`, so the periodicity check inside the projection doubles as the
/// commutation gate (a non-commuting `ψ` surfaces as a periodicity
/// failure). The resulting `F` is then verified to have imaginary part
/// above `−`[`IMAGINARY_PART_TOL`] on a disc grid — a genuinely commuting
/// self-map cannot produce a negative imaginary part, so a violation flags
/// invalid input. `F(0)` is sampled at height [`LIMIT_SAMPLING_HEIGHT`],
/// where the distance to the limit is below machine precision.
///
/// The returned evaluator follows the principal branch of `log ζ/(2πi)`, so
/// on domains with blockers reaching down to low heights some disc points
/// may be uncomputable even though `F` itself extends holomorphically;
/// callers treating the representation as optional should treat evaluation
/// errors as "unavailable", not as disproof.
pub fn phs_representation(
    phi: &HoloMap,
    psi: &HoloMap,
    ctx: &BranchContext,
) -> Result<PHSRepresentation, CentralizerError> {
    let HoloMap::ModelMap { h, image, .. } = phi else {
        return Err(CentralizerError::ModelMapRequired { op: "the half-plane representation" });
    };
    if !matches!(image.base(), BaseSpace::UpperHalfPlane) {
        return Err(CentralizerError::WrongBaseSpace { base: image.base() });
    }

    // g = h∘ψ∘h⁻¹ upstairs; its displacement from the identity is periodic.
    let g = HoloMap::conjugate(HoloMap::inverse((**h).clone()), psi.clone());
    let difference = HoloMap::sum(vec![(ONE, g), (-ONE, HoloMap::identity())]);
    let representation = lifting::project_periodic(&difference, REPRESENTATION_ANCHOR, ctx)?;

    let value_at_zero = difference.eval(Complex::new(0.0, LIMIT_SAMPLING_HEIGHT), ctx)?;
    if value_at_zero.im < -IMAGINARY_PART_TOL {
        return Err(CentralizerError::NegativeImaginaryPart {
            at: ZERO,
            value: value_at_zero.im,
        });
    }
    for zeta in disc_grid(0x0f5e_11ed, REPRESENTATION_GRID, 0.9) {
        let v = representation.eval(zeta, ctx)?;
        if v.im < -IMAGINARY_PART_TOL {
            return Err(CentralizerError::NegativeImaginaryPart { at: zeta, value: v.im });
        }
    }

    Ok(PHSRepresentation { representation, value_at_zero })
}

/// Embeddability of the unit-translation model of a Koenigs domain, decided
/// from exact geometry.
///
/// The domain absorbs every positive real translate exactly when the map
/// embeds into a continuous one-parameter semigroup; when it does not, the
/// map is proven non-embeddable, and a sector scan then attempts the
/// stronger certificate that the admissible shifts avoid a whole punctured
/// sector `0 < |c| ≤ rho`, `|arg c| ≤ delta` around the origin. Strip-based
/// (hyperbolic) domains go through the same geometry; their verdicts are
/// tagged with the dichotomy method.
pub fn embeddability_of_domain(
    image: &KoenigsDomain,
    rho: f64,
    delta: f64,
    samples: usize,
) -> Result<EmbeddabilityVerdict, CentralizerError> {
    if image.exactness() != Exactness::Exact {
        return Err(CentralizerError::UnsupportedSampled);
    }
    let strip = matches!(image.base(), BaseSpace::Strip { .. });
    let geometry_method =
        if strip { EmbeddingMethod::HyperbolicDichotomy } else { EmbeddingMethod::StarlikeTest };
    if image.starlike_at_infinity()? {
        return Ok(EmbeddabilityVerdict {
            verdict: EmbeddingOutcome::Embeddable,
            embeddable: Some(true),
            evidence: EmbeddingEvidence::Geometry,
            method: geometry_method,
        });
    }
    if image.sector_gap(rho, delta, samples)? {
        return Ok(EmbeddabilityVerdict {
            verdict: EmbeddingOutcome::GapFound,
            embeddable: Some(false),
            evidence: EmbeddingEvidence::EmptySector { rho, delta },
            method: if strip { EmbeddingMethod::HyperbolicDichotomy } else { EmbeddingMethod::SectorScan },
        });
    }
    Ok(EmbeddabilityVerdict {
        verdict: EmbeddingOutcome::NotEmbeddable,
        embeddable: Some(false),
        evidence: EmbeddingEvidence::Geometry,
        method: geometry_method,
    })
}

/// Embeddability verdict for a model map with a positive real time step.
///
/// Delegates to [`embeddability_of_domain`] on the map's image; the scan
/// parameters bound the sector searched for the gap certificate.
pub fn embeddable_verdict(
    phi: &HoloMap,
    rho: f64,
    delta: f64,
) -> Result<EmbeddabilityVerdict, CentralizerError> {
    let HoloMap::ModelMap { image, shift, .. } = phi else {
        return Err(CentralizerError::ModelMapRequired { op: "the embeddability verdict" });
    };
    if shift.im.abs() > 1e-12 || shift.re <= 0.0 {
        return Err(CentralizerError::ShiftNotPositiveReal { shift: *shift });
    }
    embeddability_of_domain(image, rho, delta, SECTOR_SAMPLES)
}

/// Second angular derivatives of a commuting parabolic pair at the
/// Denjoy–Wolff point `τ`, with the relation `ψ″ = φ″ · s` assessed.
///
/// Each second derivative is the extrapolated limit of the second
/// difference quotient `2(m(z) − z)/(z − τ)²` along the radius
/// `z = τ(1 − δ)`, `δ = 10⁻¹..10⁻⁵` — the definition itself rather than two
/// numerical differentiations. The constant is computed by the boundary
/// formula at the same `τ`, and the residual `|ψ″ − φ″·s|` quantifies the
/// relation.
pub fn second_deriv_relation(
    phi: &HoloMap,
    psi: &HoloMap,
    tau: Complex,
    ctx: &BranchContext,
) -> Result<SecondDerivativeRelation, CentralizerError> {
    let cls = classify::classify_type(phi, Complex::new(0.1, 0.05), ctx)?;
    if !matches!(cls.map_type, MapType::ParabolicZeroStep | MapType::ParabolicPositiveStep) {
        return Err(CentralizerError::NotParabolic { found: cls.map_type });
    }

    let second = |m: &HoloMap| -> Result<Complex, CentralizerError> {
        let mut steps = Vec::new();
        let mut values = Vec::new();
        for k in 1..=5 {
            let delta = 10f64.powi(-k);
            let z = tau * (1.0 - delta);
            // Computed after rounding z, this offset is exact, so the
            // quotient stays consistent with the point actually evaluated.
            let dz = z - tau;
            let d = m.displacement(z, ctx)?;
            steps.push(delta);
            values.push(2.0 * d / (dz * dz));
        }
        let ex = neville_extrapolate(&steps, &values)?;
        if ex.error > 1e-2 * (1.0 + ex.value.norm()) {
            return Err(CentralizerError::NoConvergence(format!(
                "second-derivative ladder error {:.3e} at value {}",
                ex.error, ex.value
            )));
        }
        Ok(ex.value)
    };

    let psi_second = second(psi)?;
    let phi_second = second(phi)?;
    let s = abel::c_constant(phi, psi, tau, &cls, ctx)?;
    let residual = (psi_second - phi_second * s.value).norm();
    Ok(SecondDerivativeRelation { psi_second, phi_second, s_value: s.value, residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    const I: Complex = Complex::new(0.0, 1.0);
    use crate::gallery;
    use crate::maps::Mobius;

    fn cplx(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn ctx() -> BranchContext {
        BranchContext::default()
    }

    fn half_plane_solution() -> AbelSolution {
        let charted = gallery::half_plane_model();
        AbelSolution {
            normalization: charted.chart.eval(ZERO, &ctx()).unwrap(),
            h: charted.chart,
            image: charted.domain,
        }
    }

    fn comb_solution() -> AbelSolution {
        let charted = gallery::slanted_comb_model();
        AbelSolution {
            normalization: charted.chart.eval(ZERO, &ctx()).unwrap(),
            h: charted.chart,
            image: charted.domain,
        }
    }

    #[test]
    fn iterates_commute_with_a_tiny_residual() {
        let phi = Mobius { a: cplx(0.5, 0.0), b: ZERO, c: cplx(-0.3, 0.0), d: ONE };
        let cube = phi.compose(&phi).compose(&phi);
        let check = commutes(
            &HoloMap::Mobius(phi),
            &HoloMap::Mobius(cube),
            200,
            COMMUTE_TOL,
            7,
            &ctx(),
        )
        .unwrap();
        assert!(check.commutes);
        assert!(check.residual < 1e-10, "residual {}", check.residual);
    }

    #[test]
    fn model_shifts_of_one_chart_commute() {
        let charted = gallery::half_plane_model();
        let phi = charted.model(ONE).unwrap();
        let psi = charted.model(I).unwrap();
        let check = commutes(&phi, &psi, 120, COMMUTE_TOL, 11, &ctx()).unwrap();
        assert!(check.commutes, "residual {}", check.residual);
    }

    #[test]
    fn hyperbolic_and_parabolic_do_not_commute() {
        let phi = HoloMap::Mobius(Mobius::disc_dilation(2.0));
        let psi = HoloMap::Mobius(Mobius::disc_translation(ONE));
        let check = commutes(&phi, &psi, 120, COMMUTE_TOL, 13, &ctx()).unwrap();
        assert!(!check.commutes);
        assert!(check.residual > 1e-3, "residual {}", check.residual);
    }

    #[test]
    fn t_map_at_zero_is_the_identity_and_at_one_the_generator() {
        let sol = half_plane_solution();
        let identity = t_map(&sol, ZERO).unwrap();
        let generator = t_map(&sol, ONE).unwrap();
        let phi = gallery::half_plane_model().model(ONE).unwrap();
        for z in disc_grid(17, 25, 0.7) {
            let id_val = identity.eval(z, &ctx()).unwrap();
            assert!((id_val - z).norm() < 1e-10, "identity moved {z} to {id_val}");
            let a = generator.eval(z, &ctx()).unwrap();
            let b = phi.eval(z, &ctx()).unwrap();
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn t_map_rejects_shifts_outside_the_semigroup() {
        let sol = comb_solution();
        match t_map(&sol, -ONE) {
            Err(CentralizerError::NotInSemigroup { shift }) => {
                assert!((shift + ONE).norm() < 1e-12)
            }
            other => panic!("expected NotInSemigroup, got {other:?}"),
        }
    }

    #[test]
    fn t_map_elements_commute_with_the_generator() {
        let sol = comb_solution();
        let phi = t_map(&sol, ONE).unwrap();
        let psi = t_map(&sol, cplx(1.0, 5.0)).unwrap();
        let check = commutes(&phi, &psi, 100, COMMUTE_TOL, 19, &ctx()).unwrap();
        assert!(check.commutes, "residual {}", check.residual);
    }

    #[test]
    fn s_after_t_recovers_the_shift_on_the_comb() {
        let sol = comb_solution();
        let phi = t_map(&sol, ONE).unwrap();
        let b = cplx(2.0, 1.0);
        let psi = t_map(&sol, b).unwrap();
        let cls = classify::classify_type(&phi, cplx(0.1, 0.0), &ctx()).unwrap();
        let s = s_map(&phi, &psi, &cls, &ctx()).unwrap();
        let miss = (s.value - b).norm();
        assert!(miss < 1e-2, "missed the shift by {miss}");
        assert!(
            miss <= 3.0 * s.error_estimate,
            "miss {miss} not covered by 3×error {}",
            3.0 * s.error_estimate
        );
    }

    #[test]
    fn s_of_a_half_plane_shift_uses_the_representation() {
        let sol = half_plane_solution();
        let phi = t_map(&sol, ONE).unwrap();
        let psi = t_map(&sol, I).unwrap();
        let cls = classify::classify_type(&phi, cplx(0.1, 0.0), &ctx()).unwrap();
        let s = s_map(&phi, &psi, &cls, &ctx()).unwrap();
        assert_eq!(s.method, ConstantMethod::RepresentationF0);
        assert!((s.value - I).norm() < 1e-10, "value {}", s.value);
    }

    #[test]
    fn s_of_the_identity_vanishes() {
        let sol = half_plane_solution();
        let phi = t_map(&sol, ONE).unwrap();
        let cls = classify::classify_type(&phi, cplx(0.1, 0.0), &ctx()).unwrap();
        let s = s_map(&phi, &HoloMap::identity(), &cls, &ctx()).unwrap();
        assert!(s.value.norm() < 1e-10, "value {}", s.value);
    }

    #[test]
    fn s_is_additive_on_composed_model_shifts() {
        let sol = half_plane_solution();
        let phi = t_map(&sol, ONE).unwrap();
        let b1 = cplx(0.5, 0.5);
        let b2 = I;
        let composed =
            HoloMap::compose(t_map(&sol, b1).unwrap(), t_map(&sol, b2).unwrap());
        let cls = classify::classify_type(&phi, cplx(0.1, 0.0), &ctx()).unwrap();
        let s1 = s_map(&phi, &t_map(&sol, b1).unwrap(), &cls, &ctx()).unwrap();
        let s2 = s_map(&phi, &t_map(&sol, b2).unwrap(), &cls, &ctx()).unwrap();
        let s12 = s_map(&phi, &composed, &cls, &ctx()).unwrap();
        let combined = s1.error_estimate + s2.error_estimate + s12.error_estimate + 1e-9;
        assert!(
            (s12.value - (s1.value + s2.value)).norm() < combined,
            "additivity violated: {} vs {}",
            s12.value,
            s1.value + s2.value
        );
    }

    #[test]
    fn hyperbolic_constants_are_real() {
        let phi = HoloMap::Mobius(Mobius::disc_dilation(2.0));
        let psi = HoloMap::Mobius(Mobius::disc_dilation(4.0));
        let cls = classify::classify_type(&phi, cplx(0.1, 0.0), &ctx()).unwrap();
        let s = s_map(&phi, &psi, &cls, &ctx()).unwrap();
        assert!((s.value.re - 2.0).abs() < 1e-6, "value {}", s.value);
        assert!(s.value.im.abs() < 1e-6, "imaginary part {}", s.value.im);
    }

    #[test]
    fn representation_of_a_model_shift_is_constant() {
        let sol = half_plane_solution();
        let phi = t_map(&sol, ONE).unwrap();
        let b = cplx(0.3, 2.0);
        let psi = t_map(&sol, b).unwrap();
        let rep = phs_representation(&phi, &psi, &ctx()).unwrap();
        assert!((rep.value_at_zero - b).norm() < 1e-12, "F(0) = {}", rep.value_at_zero);
        for zeta in [cplx(0.4, 0.0), cplx(-0.5, 0.2), cplx(0.1, -0.6)] {
            let v = rep.representation.eval(zeta, &ctx()).unwrap();
            assert!((v - b).norm() < 1e-9, "F({zeta}) = {v}");
        }
    }

    #[test]
    fn representation_of_the_exponential_perturbation() {
        let charted = gallery::half_plane_model();
        let phi = charted.model(ONE).unwrap();
        // g(w) = w + i + 0.05 e^{2πiw} upstairs.
        let g = HoloMap::sum(vec![
            (ONE, HoloMap::identity()),
            (ONE, HoloMap::Atom(crate::maps::Atom::Affine { scale: ZERO, offset: I })),
            (cplx(0.05, 0.0), HoloMap::Atom(crate::maps::Atom::ExpPeriodic)),
        ]);
        let psi = charted.conjugate(g);
        let rep = phs_representation(&phi, &psi, &ctx()).unwrap();
        assert!((rep.value_at_zero - I).norm() < 1e-10, "F(0) = {}", rep.value_at_zero);
        for zeta in [cplx(0.5, 0.0), cplx(-0.3, 0.4), cplx(0.0, -0.7), cplx(0.2, 0.1)] {
            let v = rep.representation.eval(zeta, &ctx()).unwrap();
            let expected = I + cplx(0.05, 0.0) * zeta;
            assert!((v - expected).norm() < 1e-8, "F({zeta}) = {v}, expected {expected}");
        }
    }

    #[test]
    fn representation_of_the_identity_vanishes() {
        let sol = half_plane_solution();
        let phi = t_map(&sol, ONE).unwrap();
        let rep = phs_representation(&phi, &HoloMap::identity(), &ctx()).unwrap();
        assert!(rep.value_at_zero.norm() < 1e-12);
        let v = rep.representation.eval(cplx(0.5, 0.3), &ctx()).unwrap();
        assert!(v.norm() < 1e-10);
    }

    #[test]
    fn representation_flags_negative_imaginary_parts() {
        let charted = gallery::half_plane_model();
        let phi = charted.model(ONE).unwrap();
        // w ↦ w − i upstairs: not a self-map of the half-plane, but it
        // commutes with the unit translation, so only the sign check can
        // catch it.
        let down = HoloMap::Mobius(Mobius { a: ONE, b: -I, c: ZERO, d: ONE });
        let psi = charted.conjugate(down);
        match phs_representation(&phi, &psi, &ctx()) {
            Err(CentralizerError::NegativeImaginaryPart { value, .. }) => {
                assert!(value < -0.5, "imaginary part {value}")
            }
            other => panic!("expected NegativeImaginaryPart, got {other:?}"),
        }
    }

    #[test]
    fn representation_requires_a_half_plane_model() {
        let comb = comb_solution();
        let phi = t_map(&comb, ONE).unwrap();
        match phs_representation(&phi, &HoloMap::identity(), &ctx()) {
            Err(CentralizerError::WrongBaseSpace { base }) => {
                assert!(matches!(base, BaseSpace::Plane))
            }
            other => panic!("expected WrongBaseSpace, got {other:?}"),
        }
        let mobius = HoloMap::Mobius(Mobius::disc_translation(ONE));
        assert!(matches!(
            phs_representation(&mobius, &HoloMap::identity(), &ctx()),
            Err(CentralizerError::ModelMapRequired { .. })
        ));
    }

    #[test]
    fn real_representation_constant_forces_the_model_form() {
        let sol = half_plane_solution();
        let phi = t_map(&sol, ONE).unwrap();
        let psi = t_map(&sol, cplx(2.0, 0.0)).unwrap();
        let cls = classify::classify_type(&phi, cplx(0.1, 0.0), &ctx()).unwrap();
        let s = s_map(&phi, &psi, &cls, &ctx()).unwrap();
        assert!(s.value.im.abs() < 1e-10);
        let rebuilt = t_map(&sol, s.value).unwrap();
        for z in disc_grid(23, 30, 0.75) {
            let a = psi.eval(z, &ctx()).unwrap();
            let b = rebuilt.eval(z, &ctx()).unwrap();
            assert!((a - b).norm() < 1e-6, "at {z}: {a} vs {b}");
        }
    }

    #[test]
    fn half_plane_model_is_embeddable() {
        let phi = gallery::half_plane_model().model(ONE).unwrap();
        let verdict = embeddable_verdict(&phi, 0.9, 0.4).unwrap();
        assert_eq!(verdict.verdict, EmbeddingOutcome::Embeddable);
        assert_eq!(verdict.embeddable, Some(true));
        assert_eq!(verdict.method, EmbeddingMethod::StarlikeTest);
    }

    #[test]
    fn notched_half_plane_model_is_embeddable() {
        let phi = gallery::notched_half_plane_model().model(ONE).unwrap();
        let verdict = embeddable_verdict(&phi, 0.9, 0.4).unwrap();
        assert_eq!(verdict.verdict, EmbeddingOutcome::Embeddable);
        assert_eq!(verdict.embeddable, Some(true));
    }

    #[test]
    fn comb_model_is_not_embeddable_with_a_gap_but_no_isolation() {
        let charted = gallery::slanted_comb_model();
        let phi = charted.model(ONE).unwrap();
        let verdict = embeddable_verdict(&phi, 0.9, std::f64::consts::FRAC_PI_8).unwrap();
        assert_eq!(verdict.verdict, EmbeddingOutcome::GapFound);
        assert_eq!(verdict.embeddable, Some(false));
        assert_eq!(verdict.method, EmbeddingMethod::SectorScan);
        assert!(matches!(verdict.evidence, EmbeddingEvidence::EmptySector { .. }));
        // The identity is nevertheless not isolated among commuting maps:
        // the whole upward ray of shifts stays admissible.
        assert!(charted.domain.contains_translate(cplx(0.0, 0.7)).unwrap());
    }

    #[test]
    fn reciprocal_semigroup_domains_split_by_their_translation_sets() {
        let naturals = gallery::reciprocal_domain(&crate::geometry::SemigroupDescriptor::naturals())
            .unwrap();
        let verdict = embeddability_of_domain(&naturals, 0.5, 0.3, SECTOR_SAMPLES).unwrap();
        assert_eq!(verdict.verdict, EmbeddingOutcome::GapFound);
        assert_eq!(verdict.embeddable, Some(false));
        assert_eq!(verdict.method, EmbeddingMethod::HyperbolicDichotomy);

        let half_line =
            gallery::reciprocal_domain(&crate::geometry::SemigroupDescriptor::half_line())
                .unwrap();
        let verdict = embeddability_of_domain(&half_line, 0.5, 0.3, SECTOR_SAMPLES).unwrap();
        assert_eq!(verdict.verdict, EmbeddingOutcome::Embeddable);
        assert_eq!(verdict.method, EmbeddingMethod::HyperbolicDichotomy);
    }

    #[test]
    fn sampled_geometry_is_not_certified() {
        let (domain, _) = gallery::curved_slit_domain(40, 0.6, &ctx()).unwrap();
        assert!(matches!(
            embeddability_of_domain(&domain, 0.5, 0.3, 100),
            Err(CentralizerError::UnsupportedSampled)
        ));
    }

    #[test]
    fn embeddability_rejects_complex_time_steps() {
        let phi = gallery::half_plane_model().model(I).unwrap();
        assert!(matches!(
            embeddable_verdict(&phi, 0.9, 0.4),
            Err(CentralizerError::ShiftNotPositiveReal { .. })
        ));
    }

    #[test]
    fn second_derivative_relation_for_iterates() {
        let m = Mobius::disc_translation(cplx(1.0, 1.0));
        let phi = HoloMap::Mobius(m);
        for (k, expected) in [(2u32, 2.0), (3, 3.0)] {
            let mut iterate = m;
            for _ in 1..k {
                iterate = iterate.compose(&m);
            }
            let psi = HoloMap::Mobius(iterate);
            let rel = second_deriv_relation(&phi, &psi, ONE, &ctx()).unwrap();
            assert!(
                (rel.s_value - cplx(expected, 0.0)).norm() < 1e-6,
                "constant {} for k = {k}",
                rel.s_value
            );
            assert!(rel.residual < 1e-4, "residual {} for k = {k}", rel.residual);
        }
    }

    #[test]
    fn second_derivative_ratio_matches_a_real_shift() {
        let phi = HoloMap::Mobius(Mobius::disc_translation(ONE));
        let psi = HoloMap::Mobius(Mobius::disc_translation(cplx(2.5, 0.0)));
        let rel = second_deriv_relation(&phi, &psi, ONE, &ctx()).unwrap();
        assert!((rel.s_value - cplx(2.5, 0.0)).norm() < 1e-6);
        assert!(rel.residual < 1e-4 * rel.phi_second.norm().max(1.0), "residual {}", rel.residual);
        let ratio = rel.psi_second / rel.phi_second;
        assert!((ratio - cplx(2.5, 0.0)).norm() < 1e-4, "ratio {ratio}");
    }

    #[test]
    fn second_derivative_of_the_identity_pair_vanishes() {
        let phi = HoloMap::Mobius(Mobius::disc_translation(cplx(1.0, 1.0)));
        let rel = second_deriv_relation(&phi, &HoloMap::identity(), ONE, &ctx()).unwrap();
        assert!(rel.psi_second.norm() < 1e-9, "identity second derivative {}", rel.psi_second);
        assert!(rel.s_value.norm() < 1e-9);
        assert!(rel.residual < 1e-9);
    }

    #[test]
    fn second_derivatives_reject_non_parabolic_maps() {
        let phi = HoloMap::Mobius(Mobius::disc_dilation(2.0));
        let psi = HoloMap::Mobius(Mobius::disc_dilation(4.0));
        assert!(matches!(
            second_deriv_relation(&phi, &psi, ONE, &ctx()),
            Err(CentralizerError::NotParabolic { found: MapType::Hyperbolic })
        ));
    }

    #[test]
    fn flow_semigroups_in_one_centralizer_need_not_commute() {
        let charted = gallery::notched_half_plane_model();
        let phi_one = charted.model(ONE).unwrap();
        let phi_half = charted.model(cplx(0.5, 0.0)).unwrap();
        let psi_star = charted.conjugate(gallery::cot_flow(1.0));

        // The cotangent flow leaves the notched domain invariant, so its
        // conjugate commutes with the time-one model map …
        let with_one = commutes(&phi_one, &psi_star, 40, 1e-6, 29, &ctx()).unwrap();
        assert!(with_one.commutes, "residual {}", with_one.residual);

        // … but not with the fractional-time map of the same semigroup.
        let with_half = commutes(&psi_star, &phi_half, 40, 1e-6, 31, &ctx()).unwrap();
        assert!(!with_half.commutes);
        assert!(with_half.residual > 1e-3, "residual {}", with_half.residual);
    }

    #[test]
    fn verdicts_serialize_round_trip() {
        let verdict = EmbeddabilityVerdict {
            verdict: EmbeddingOutcome::GapFound,
            embeddable: Some(false),
            evidence: EmbeddingEvidence::EmptySector { rho: 0.9, delta: 0.4 },
            method: EmbeddingMethod::SectorScan,
        };
        let json = serde_json::to_string(&verdict).unwrap();
        assert!(json.contains("gapFound"), "json: {json}");
        let back: EmbeddabilityVerdict = serde_json::from_str(&json).unwrap();
        assert_eq!(back.verdict, verdict.verdict);
        assert_eq!(back.embeddable, verdict.embeddable);
        assert_eq!(back.evidence, verdict.evidence);
    }
}
