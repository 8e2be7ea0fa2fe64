//! Abel-equation machinery: residual verification on grids, the commutation
//! constant of a pair of commuting self-maps by the radial-ratio and
//! log-multiplier-ratio formulas, elliptic Koenigs (Schröder) iteration, the
//! simultaneous-Abel pipeline for maps of positive hyperbolic step, and
//! classification read off an arbitrary univalent Abel solution.

use num_complex::Complex64 as Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classify::{self, Classification, ClassifyError, ClassifyMethod, MapType};
use crate::geometry::{BaseSpace, Exactness, GeometryError, KoenigsDomain};
use crate::lifting::{lift_univalent, push_commuting, LiftError, PeriodicMap};
use crate::maps::{BranchContext, HoloMap, MapError, LIMIT_SAMPLING_HEIGHT};
use crate::num::{disc_grid, neville_extrapolate, NumError};

const I: Complex = Complex::new(0.0, 1.0);
const ONE: Complex = Complex::new(1.0, 0.0);
const ZERO: Complex = Complex::new(0.0, 0.0);
const TAU: f64 = std::f64::consts::TAU;

/// Default admissible residual of `h∘φ = h + 1` on a verification grid.
pub const ABEL_RESIDUAL_TOL: f64 = 1e-6;

/// Tolerance of the pseudo-random commutation precheck `φ∘ψ = ψ∘φ`.
pub const COMMUTATION_TOL: f64 = 1e-8;

/// Number of pseudo-random interior points used by the commutation precheck.
pub const COMMUTATION_POINTS: usize = 200;

/// Maximum distance between the pipeline's constant and its radial-limit
/// reference before the integer branch is declared unresolved.
pub const BRANCH_MATCH_TOL: f64 = 0.1;

/// Errors from Abel-equation routines.
#[derive(Debug, Error)]
pub enum AbelError {
    /// The map has an interior fixed point; no boundary constant exists.
    #[error("the map is elliptic (interior fixed point); no boundary constant exists")]
    EllipticInput,
    /// The multiplier does not lie in `(0, 1)` in modulus.
    #[error("multiplier {multiplier} lies outside (0,1) in modulus")]
    MultiplierOutOfRange {
        /// The offending multiplier.
        multiplier: Complex,
    },
    /// The two maps fail the commutation grid check.
    #[error("maps do not commute: residual {residual:.3e} on the verification grid")]
    NotCommuting {
        /// Worst commutator norm over the grid.
        residual: f64,
    },
    /// The integer branch of the constant could not be matched against the
    /// radial-limit reference.
    #[error("constant branch unresolved: candidate {candidate} vs reference {reference}")]
    BranchUnresolved {
        /// The candidate value nearest to the reference.
        candidate: Complex,
        /// The radial-limit reference value.
        reference: Complex,
    },
    /// The input domain or map shape does not meet the routine's contract.
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    /// A verification residual exceeded its admissible bound.
    #[error("residual {residual:.3e} exceeds the admissible {tolerance:.0e}")]
    ResidualTooLarge {
        /// Measured residual.
        residual: f64,
        /// The bound it had to meet.
        tolerance: f64,
    },
    /// An iteration failed to settle within its budget.
    #[error("iteration did not converge: {0}")]
    NoConvergence(String),
    /// Underlying map evaluation failed.
    #[error(transparent)]
    Map(#[from] MapError),
    /// Underlying geometry computation failed.
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    /// Underlying classification failed.
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    /// Underlying exponential-correspondence step failed.
    #[error(transparent)]
    Lift(#[from] LiftError),
    /// Underlying numerical routine failed.
    #[error(transparent)]
    Num(#[from] NumError),
    /// CSV export failed.
    #[error("CSV export failed: {0}")]
    Csv(#[from] csv::Error),
    /// I/O failure during export.
    #[error("I/O failure: {0}")]
    Io(#[from] std::io::Error),
}

/// How a commutation constant was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConstantMethod {
    /// Radial limit of the displacement ratio at the common boundary fixed
    /// point (parabolic case).
    ParabolicRatio,
    /// Ratio of logarithms of the angular derivatives (hyperbolic case).
    HyperbolicLogRatio,
    /// Value at 0 of the periodic representation upstairs (positive-step
    /// simultaneous pipeline).
    RepresentationF0,
    /// Known by construction, e.g. the shift of a model translation.
    Constructed,
}

/// The commutation constant attached to a pair of commuting self-maps,
/// with an error estimate and the formula that produced it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CentralizerConstant {
    /// The constant.
    pub value: Complex,
    /// Error scale (extrapolation tableau correction or limit-sampling
    /// spread; zero only for values exact by construction).
    pub error_estimate: f64,
    /// Which formula produced the value.
    pub method: ConstantMethod,
}

/// A univalent solution of `h∘φ = h + 1` together with its image domain and
/// the value pinning its normalization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AbelSolution {
    /// The solution.
    pub h: HoloMap,
    /// Its image domain `h(𝔻)`.
    pub image: KoenigsDomain,
    /// `h(0)`, recording which representative of the solution family this is.
    pub normalization: Complex,
}

impl AbelSolution {
    /// Builds a solution after verifying the Abel residual on `grid`;
    /// rejects anything above [`ABEL_RESIDUAL_TOL`].
    pub fn verified(
        h: HoloMap,
        image: KoenigsDomain,
        phi: &HoloMap,
        grid: &[Complex],
        ctx: &BranchContext,
    ) -> Result<AbelSolution, AbelError> {
        let residual = abel_residual(&h, phi, grid, ctx)?;
        if residual > ABEL_RESIDUAL_TOL {
            return Err(AbelError::ResidualTooLarge {
                residual,
                tolerance: ABEL_RESIDUAL_TOL,
            });
        }
        let normalization = h.eval(ZERO, ctx)?;
        Ok(AbelSolution { h, image, normalization })
    }

    /// Writes a sampled table of the solution as CSV with columns
    /// `re_z, im_z, re_h, im_h`, one row per sample point.
    pub fn export_csv<W: std::io::Write>(
        &self,
        samples: &[Complex],
        sink: W,
        ctx: &BranchContext,
    ) -> Result<(), AbelError> {
        let mut writer = csv::Writer::from_writer(sink);
        writer.write_record(["re_z", "im_z", "re_h", "im_h"])?;
        for &z in samples {
            let v = self.h.eval(z, ctx)?;
            writer.write_record(&[
                format!("{:.17e}", z.re),
                format!("{:.17e}", z.im),
                format!("{:.17e}", v.re),
                format!("{:.17e}", v.im),
            ])?;
        }
        writer.flush()?;
        Ok(())
    }
}

/// A Schröder solution: `h₀∘f = λ·h₀`, normalized by `h₀(0) = 0`,
/// `h₀′(0) = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SchroederSolution {
    /// The intertwiner.
    pub h0: HoloMap,
    /// The multiplier `λ = f′(0)`.
    pub multiplier: Complex,
}

/// Max over `grid` of `|h(φ(z)) − h(z) − 1|`, with the difference evaluated
/// through the displacement of `φ` so that nothing is lost to cancellation
/// near the boundary.
pub fn abel_residual(
    h: &HoloMap,
    phi: &HoloMap,
    grid: &[Complex],
    ctx: &BranchContext,
) -> Result<f64, AbelError> {
    let mut worst = 0.0_f64;
    for &z in grid {
        let d = phi.displacement(z, ctx)?;
        let diff = h.diff_eval(z + d, z, d, ctx)?;
        worst = worst.max((diff - ONE).norm());
    }
    Ok(worst)
}

/// Worst commutator norm `|φ(ψ(z)) − ψ(φ(z))|` over a seeded pseudo-random
/// interior grid.
pub(crate) fn commutation_residual(
    phi: &HoloMap,
    psi: &HoloMap,
    points: usize,
    ctx: &BranchContext,
) -> Result<f64, AbelError> {
    let mut worst = 0.0_f64;
    for z in disc_grid(0x0abe1, points, 0.8) {
        let a = phi.eval(psi.eval(z, ctx)?, ctx)?;
        let b = psi.eval(phi.eval(z, ctx)?, ctx)?;
        worst = worst.max((a - b).norm());
    }
    Ok(worst)
}

/// The commutation constant of `ψ` relative to `φ` at the common
/// Denjoy–Wolff point `τ`, by the formula matching `φ`'s classification.
///
/// Parabolic `φ`: the radial limit of the displacement ratio
/// `(ψ(z) − z)/(φ(z) − z)` along `z = τ(1 − 10⁻ᵏ)`, `k = 1..5`, accelerated
/// by Neville extrapolation in the offset; the error estimate is the last
/// tableau correction. Hyperbolic `φ`: `log ψ′(τ) / log φ′(τ)` with
/// Richardson-extrapolated angular derivatives. Elliptic input is rejected:
/// commutation constants live at boundary fixed points.
///
/// Commutation of `ψ` with `φ` is the caller's responsibility (checked
/// upstream where a full pipeline runs). The accuracy of the constant is
/// limited by the accuracy of `τ`: supply the exact Denjoy–Wolff point when
/// it is known by construction, since an angular error `ε` in `τ` leaves a
/// bias of order `ε` that no extrapolation along the ray can remove.
pub fn c_constant(
    phi: &HoloMap,
    psi: &HoloMap,
    tau: Complex,
    cls: &Classification,
    ctx: &BranchContext,
) -> Result<CentralizerConstant, AbelError> {
    match cls.map_type {
        MapType::Elliptic | MapType::EllipticAutomorphism | MapType::Identity => {
            Err(AbelError::EllipticInput)
        }
        MapType::Hyperbolic => {
            let dp = phi.angular_derivative(tau, None, ctx)?;
            let dq = psi.angular_derivative(tau, None, ctx)?;
            let lp = dp.value.ln();
            let lq = dq.value.ln();
            if lp.norm() < 1e-12 {
                return Err(AbelError::NoConvergence(
                    "angular derivative of the base map is 1; log-ratio undefined".into(),
                ));
            }
            let value = lq / lp;
            // First-order propagation of the two extrapolation errors.
            let rel_p = dp.error / dp.value.norm().max(1e-300);
            let rel_q = dq.error / dq.value.norm().max(1e-300);
            let error_estimate =
                rel_q / lp.norm() + rel_p * lq.norm() / (lp.norm() * lp.norm());
            Ok(CentralizerConstant {
                value,
                error_estimate,
                method: ConstantMethod::HyperbolicLogRatio,
            })
        }
        MapType::ParabolicZeroStep | MapType::ParabolicPositiveStep => {
            let mut steps = Vec::with_capacity(5);
            let mut ratios = Vec::with_capacity(5);
            for k in 1..=5 {
                let delta = 10f64.powi(-k);
                let z = tau * (1.0 - delta);
                let dphi = phi.displacement(z, ctx)?;
                if dphi.norm() < 1e-300 {
                    return Err(AbelError::NoConvergence(
                        "base map displacement vanishes on the radius".into(),
                    ));
                }
                let dpsi = psi.displacement(z, ctx)?;
                steps.push(delta);
                ratios.push(dpsi / dphi);
            }
            let ex = neville_extrapolate(&steps, &ratios)?;
            Ok(CentralizerConstant {
                value: ex.value,
                error_estimate: ex.error,
                method: ConstantMethod::ParabolicRatio,
            })
        }
    }
}

/// Samples the normalized Abel quotient
/// `(h(φ(z)) − h(z)) / (h′(z)·(φ(z) − z))` along the radius `z = τ·r` for
/// each `r` in `ladder` (default `1 − 10⁻ᵏ`, `k = 1..6`).
///
/// For a univalent `h` and parabolic `φ` with Denjoy–Wolff point `τ` the
/// values tend to 1 along the radius; the returned sequence makes that
/// convergence inspectable. The quotient is invariant under rescaling of
/// `h`. A map with vanishing displacement on the radius (the identity) is
/// rejected, since the quotient is then undefined.
pub fn valiron_ratio(
    h: &HoloMap,
    phi: &HoloMap,
    tau: Complex,
    ladder: Option<&[f64]>,
    ctx: &BranchContext,
) -> Result<Vec<Complex>, AbelError> {
    let default_ladder: Vec<f64> = (1..=6).map(|k| 1.0 - 10f64.powi(-k)).collect();
    let radii = ladder.unwrap_or(&default_ladder);
    let mut out = Vec::with_capacity(radii.len());
    for &r in radii {
        let z = tau * r;
        let disp = phi.displacement(z, ctx)?;
        if disp.norm() < 1e-300 {
            return Err(AbelError::EllipticInput);
        }
        let num = h.diff_eval(z + disp, z, disp, ctx)?;
        let den = h.deriv(z, ctx)? * disp;
        if den.norm() < 1e-300 {
            return Err(AbelError::NoConvergence(
                "denominator h′·(φ−id) vanishes on the radius".into(),
            ));
        }
        out.push(num / den);
    }
    Ok(out)
}

/// The Koenigs (Schröder) intertwiner of an elliptic map fixing 0 with
/// multiplier `0 < |λ| < 1`: the limit of `λ⁻ⁿ f^{∘n}`, normalized by
/// `h₀(0) = 0`, `h₀′(0) = 1`.
///
/// `n` caps the iteration budget (further capped at 10⁴); convergence of the
/// scaled orbit to within `10⁻¹⁰` is verified at probe points before the
/// evaluator is returned, and failure is an error, never a silent
/// truncation.
pub fn koenigs_elliptic(
    f: &HoloMap,
    n: usize,
    ctx: &BranchContext,
) -> Result<SchroederSolution, AbelError> {
    let f0 = f.eval(ZERO, ctx)?;
    if f0.norm() > 1e-12 {
        return Err(AbelError::InvalidDomain(format!(
            "map must fix the origin; f(0) = {f0}"
        )));
    }
    let multiplier = f.deriv(ZERO, ctx)?;
    let modulus = multiplier.norm();
    if !(1e-300..1.0 - 1e-12).contains(&modulus) {
        return Err(AbelError::MultiplierOutOfRange { multiplier });
    }
    let budget = n.min(10_000);
    for z in [Complex::new(0.3, 0.0), Complex::new(0.0, 0.25), Complex::new(-0.2, 0.2)] {
        let mut a = z;
        let mut inv_pow = ONE;
        let mut prev = a;
        let mut settled = false;
        for _ in 0..budget {
            a = f.eval(a, ctx)?;
            inv_pow /= multiplier;
            let val = a * inv_pow;
            if (val - prev).norm() < 1e-10 * val.norm().max(1.0) {
                settled = true;
                break;
            }
            prev = val;
        }
        if !settled {
            return Err(AbelError::NoConvergence(format!(
                "scaled orbit of {z} did not settle within {budget} iterations"
            )));
        }
    }
    Ok(SchroederSolution {
        h0: HoloMap::SchroederLimit { f: Box::new(f.clone()), multiplier },
        multiplier,
    })
}

/// The simultaneous-Abel pipeline for a positive-hyperbolic-step base map:
/// given `φ` as a model map `(ℍ, h, +1)` and a commuting `ψ`, produces one
/// univalent `h⁎` solving `h⁎∘φ = h⁎ + 1` **and** `h⁎∘ψ = h⁎ + c`
/// simultaneously, together with the constant `c`.
///
/// Route: conjugate `ψ` upstairs to `g = h∘ψ∘h⁻¹` (translation-commuting),
/// push it down to a disc map `f` fixing 0. If `|f′(0)| = 1` then `g` is the
/// translation by a real `c` and `(h, c)` is already simultaneous.
/// Otherwise Koenigs iteration linearizes `f`, the intertwiner is lifted
/// back to a half-plane map `F`, and `h⁎ = F∘h`; then `e^{2πic} = f′(0)`
/// determines `c` modulo 1, and the integer branch is fixed by matching the
/// radial-limit reference of the displacement ratio, within
/// [`BRANCH_MATCH_TOL`].
///
/// Both equations are re-verified on an interior grid at
/// [`ABEL_RESIDUAL_TOL`] before returning. The attached image of `h⁎` is
/// the canonical half-plane core of its model union — classification-grade;
/// the exact image of `F∘h` is not reconstructed as membership-grade
/// geometry.
pub fn simultaneous_abel_phs(
    phi: &HoloMap,
    psi: &HoloMap,
    ctx: &BranchContext,
) -> Result<(AbelSolution, CentralizerConstant), AbelError> {
    let HoloMap::ModelMap { h, image, shift } = phi else {
        return Err(AbelError::InvalidDomain(
            "base map must be a model map (ℍ, h, +1)".into(),
        ));
    };
    if (shift - ONE).norm() > 1e-12 {
        return Err(AbelError::InvalidDomain(format!(
            "model shift must be +1, found {shift}"
        )));
    }
    if image.base() != BaseSpace::UpperHalfPlane {
        return Err(AbelError::InvalidDomain(
            "positive hyperbolic step requires an upper-half-plane base".into(),
        ));
    }
    let residual = commutation_residual(phi, psi, COMMUTATION_POINTS, ctx)?;
    if residual > COMMUTATION_TOL {
        return Err(AbelError::NotCommuting { residual });
    }
    let cls = classify::classify_type(phi, Complex::new(0.1, 0.0), ctx)?;
    if cls.map_type != MapType::ParabolicPositiveStep {
        return Err(AbelError::InvalidDomain(format!(
            "base map must have positive hyperbolic step, classified {:?}",
            cls.map_type
        )));
    }
    let reference = c_constant(phi, psi, cls.tau, &cls, ctx)?;

    let g = HoloMap::conjugate(HoloMap::inverse((**h).clone()), psi.clone());
    let g = PeriodicMap::verify(g, ctx)?;
    let f = push_commuting(&g);
    let lambda = f.deriv(ZERO, ctx)?;

    let high = Complex::new(0.0, LIMIT_SAMPLING_HEIGHT);
    let disp_high = g.g.displacement(high, ctx)?;
    let disp_lower = g.g.displacement(high - I, ctx)?;
    let sampling_spread = (disp_high - disp_lower).norm();

    let (h_star, image_star, constant) = if (lambda.norm() - 1.0).abs() < 1e-8 {
        // Translation case: g(w) = w + c with real c.
        let value = Complex::new(disp_high.re, 0.0);
        let constant = CentralizerConstant {
            value,
            error_estimate: sampling_spread + disp_high.im.abs(),
            method: ConstantMethod::RepresentationF0,
        };
        ((**h).clone(), image.clone(), constant)
    } else {
        let schroeder = koenigs_elliptic(&f, 10_000, ctx)?;
        let pair = lift_univalent(&schroeder.h0, ctx)?;
        let h_star = HoloMap::compose(pair.lift, (**h).clone());
        let c0 = lambda.ln() / (TAU * I);
        let k = (reference.value - c0).re.round();
        let candidate = c0 + Complex::new(k, 0.0);
        if (candidate - reference.value).norm() > BRANCH_MATCH_TOL {
            return Err(AbelError::BranchUnresolved {
                candidate,
                reference: reference.value,
            });
        }
        let constant = CentralizerConstant {
            value: candidate,
            error_estimate: sampling_spread + pair.conjugacy_residual,
            method: ConstantMethod::RepresentationF0,
        };
        let canonical = KoenigsDomain::new(BaseSpace::UpperHalfPlane, vec![])?;
        (h_star, canonical, constant)
    };

    let grid = disc_grid(0x51b, 20, 0.6);
    let r_phi = abel_residual(&h_star, phi, &grid, ctx)?;
    if r_phi > ABEL_RESIDUAL_TOL {
        return Err(AbelError::ResidualTooLarge {
            residual: r_phi,
            tolerance: ABEL_RESIDUAL_TOL,
        });
    }
    let mut r_psi = 0.0_f64;
    for &z in &grid {
        let d = psi.displacement(z, ctx)?;
        let diff = h_star.diff_eval(z + d, z, d, ctx)?;
        r_psi = r_psi.max((diff - constant.value).norm());
    }
    if r_psi > ABEL_RESIDUAL_TOL {
        return Err(AbelError::ResidualTooLarge {
            residual: r_psi,
            tolerance: ABEL_RESIDUAL_TOL,
        });
    }

    let normalization = h_star.eval(ZERO, ctx)?;
    Ok((
        AbelSolution { h: h_star, image: image_star, normalization },
        constant,
    ))
}

/// Classifies the self-map induced by an arbitrary univalent Abel solution
/// from its image geometry: the shape of the increasing union
/// `S = ⋃ₙ (Ω − n)` decides the type (full plane ⇒ parabolic zero step,
/// half-plane ⇒ parabolic positive step, strip ⇒ hyperbolic with multiplier
/// `e^{−π/width}`).
///
/// The image alone never determines the boundary fixed point. When the
/// chart can be iterated numerically the Denjoy–Wolff point is measured
/// from the model orbit; otherwise it is reported in the canonical
/// normalization `τ = 1` (the freedom of post-composing the Riemann map
/// with a rotation). Sampled-geometry images are rejected: the union shape
/// must be decided exactly.
pub fn classify_from_abel_solution(
    sol: &AbelSolution,
    ctx: &BranchContext,
) -> Result<Classification, AbelError> {
    if sol.image.exactness() != Exactness::Exact {
        return Err(AbelError::InvalidDomain(
            "union shape requires exact blockers, found sampled geometry".into(),
        ));
    }
    let union = sol.image.base_of_union()?;
    let (map_type, lambda) = classify::map_type_of_union(&union);
    let automorphism = sol.image.contains_translate(-ONE).unwrap_or(false);
    let dw = HoloMap::model_map(sol.h.clone(), sol.image.clone(), ONE)
        .ok()
        .and_then(|phi| classify::denjoy_wolff(&phi, Complex::new(0.1, 0.0), 3000, ctx).ok());
    let (tau, tau_confidence) = match dw {
        Some(dw) => (dw.tau, Some(dw.confidence)),
        None => (ONE, None),
    };
    Ok(Classification {
        map_type,
        tau,
        multiplier: lambda.map_or(ONE, |l| Complex::new(l, 0.0)),
        step_estimate: None,
        method: ClassifyMethod::AbelSolution,
        automorphism,
        tau_confidence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;
    use crate::maps::{Atom, Mobius};

    fn cplx(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn ctx() -> BranchContext {
        BranchContext::default()
    }

    /// The disc rotation-free parabolic automorphism `C⁻¹∘(w+1)∘C`.
    fn parabolic_automorphism() -> HoloMap {
        HoloMap::Mobius(Mobius::disc_translation(ONE))
    }

    #[test]
    fn residual_vanishes_for_an_exact_model_pair() {
        let h = HoloMap::Atom(Atom::Cayley);
        let phi = parabolic_automorphism();
        let grid = disc_grid(7, 30, 0.9);
        let r = abel_residual(&h, &phi, &grid, &ctx()).unwrap();
        assert!(r < 1e-10, "residual {r:.3e}");
    }

    #[test]
    fn residual_of_the_identity_is_one() {
        let h = HoloMap::Atom(Atom::Cayley);
        let phi = HoloMap::identity();
        let grid = disc_grid(7, 20, 0.8);
        let r = abel_residual(&h, &phi, &grid, &ctx()).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn residual_of_the_cotangent_flow_against_its_abel_solution() {
        // Unit-time flow of the half-plane generator, checked against the
        // two-logarithm solution through the disc chart.
        let h = HoloMap::compose(gallery::two_log_cos(), HoloMap::Atom(Atom::Cayley));
        let phi = HoloMap::conjugate(HoloMap::Atom(Atom::Cayley), gallery::cot_flow(1.0));
        let grid = disc_grid(5, 8, 0.5);
        let r = abel_residual(&h, &phi, &grid, &ctx()).unwrap();
        assert!(r < 1e-6, "residual {r:.3e}");
    }

    #[test]
    fn hyperbolic_constant_is_the_log_multiplier_ratio() {
        let phi = HoloMap::Mobius(Mobius::disc_dilation(2.0));
        let psi = HoloMap::Mobius(Mobius::disc_dilation(8.0));
        let cls = classify::classify_type(&phi, ZERO, &ctx()).unwrap();
        assert_eq!(cls.map_type, MapType::Hyperbolic);
        let c = c_constant(&phi, &psi, cls.tau, &cls, &ctx()).unwrap();
        assert_eq!(c.method, ConstantMethod::HyperbolicLogRatio);
        assert!((c.value - cplx(3.0, 0.0)).norm() < 1e-6, "c = {}", c.value);
    }

    #[test]
    fn constant_of_a_map_with_itself_is_one() {
        let phi = HoloMap::Mobius(Mobius::disc_dilation(2.0));
        let cls = classify::classify_type(&phi, ZERO, &ctx()).unwrap();
        let c = c_constant(&phi, &phi, cls.tau, &cls, &ctx()).unwrap();
        assert!((c.value - ONE).norm() < 1e-9);

        let phi = parabolic_automorphism();
        let cls = classify::classify_type(&phi, ZERO, &ctx()).unwrap();
        let c = c_constant(&phi, &phi, cls.tau, &cls, &ctx()).unwrap();
        assert_eq!(c.method, ConstantMethod::ParabolicRatio);
        assert!((c.value - ONE).norm() < 1e-9);
    }

    #[test]
    fn constant_recovers_a_constructed_model_shift() {
        let model = gallery::slanted_comb_model();
        let phi = model.model(ONE).unwrap();
        let b = cplx(2.0, 1.0);
        let psi = model.model(b).unwrap();
        let cls = classify::classify_type(&phi, ZERO, &ctx()).unwrap();
        assert_eq!(cls.map_type, MapType::ParabolicZeroStep);
        // The chart construction pins τ = 1 exactly; the orbit estimate of
        // cls.tau carries an angular error that would bias the radial ladder.
        let c = c_constant(&phi, &psi, ONE, &cls, &ctx()).unwrap();
        assert!((c.value - b).norm() < 1e-3, "c = {} vs {b}", c.value);
        assert!((c.value - b).norm() < 3.0 * c.error_estimate.max(1e-9));
    }

    #[test]
    fn elliptic_input_is_rejected() {
        let rotation = HoloMap::Mobius(Mobius {
            a: I,
            b: ZERO,
            c: ZERO,
            d: ONE,
        });
        let cls = classify::classify_type(&rotation, ZERO, &ctx()).unwrap();
        match c_constant(&rotation, &rotation, cls.tau, &cls, &ctx()) {
            Err(AbelError::EllipticInput) => {}
            other => panic!("expected EllipticInput, got {other:?}"),
        }
    }

    #[test]
    fn valiron_quotient_tends_to_one_and_is_scale_invariant() {
        let h = HoloMap::Atom(Atom::Cayley);
        let phi = parabolic_automorphism();
        let ratios = valiron_ratio(&h, &phi, ONE, None, &ctx()).unwrap();
        let last = ratios.last().unwrap();
        assert!((last - ONE).norm() < 1e-4, "final quotient {last}");

        let h2 = HoloMap::sum(vec![(cplx(2.0, 0.0), h.clone())]);
        let scaled = valiron_ratio(&h2, &phi, ONE, None, &ctx()).unwrap();
        for (a, b) in ratios.iter().zip(&scaled) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn valiron_quotient_on_the_comb_model() {
        let model = gallery::slanted_comb_model();
        let phi = model.model(ONE).unwrap();
        let ratios = valiron_ratio(&model.chart, &phi, ONE, None, &ctx()).unwrap();
        let last = ratios.last().unwrap();
        assert!((last - ONE).norm() < 1e-4, "final quotient {last}");
    }

    #[test]
    fn valiron_rejects_the_identity() {
        let h = HoloMap::Atom(Atom::Cayley);
        match valiron_ratio(&h, &HoloMap::identity(), ONE, None, &ctx()) {
            Err(AbelError::EllipticInput) => {}
            other => panic!("expected EllipticInput, got {other:?}"),
        }
    }

    #[test]
    fn koenigs_of_a_linear_map_is_the_identity() {
        let f = HoloMap::Atom(Atom::Affine { scale: cplx(0.5, 0.0), offset: ZERO });
        let sol = koenigs_elliptic(&f, 10_000, &ctx()).unwrap();
        for z in [cplx(0.3, 0.2), cplx(-0.5, 0.1), cplx(0.0, 0.4)] {
            assert!((sol.h0.eval(z, &ctx()).unwrap() - z).norm() < 1e-12);
        }
    }

    #[test]
    fn koenigs_of_a_mobius_map_matches_the_closed_form() {
        let (lambda, c) = (0.4, 0.2);
        let f = HoloMap::Mobius(Mobius {
            a: cplx(lambda, 0.0),
            b: ZERO,
            c: cplx(-c, 0.0),
            d: ONE,
        });
        let sol = koenigs_elliptic(&f, 10_000, &ctx()).unwrap();
        for z in [cplx(0.3, 0.2), cplx(-0.5, 0.1), cplx(0.1, -0.55)] {
            let exact = z / (1.0 - c * z / (1.0 - lambda));
            let got = sol.h0.eval(z, &ctx()).unwrap();
            assert!((got - exact).norm() < 1e-8, "{got} vs {exact}");
        }
        assert!((sol.h0.eval(ZERO, &ctx()).unwrap()).norm() == 0.0);
        assert!((sol.h0.deriv(ZERO, &ctx()).unwrap() - ONE).norm() < 1e-9);
    }

    #[test]
    fn koenigs_self_consistency_for_the_exponential_perturbation() {
        let f = HoloMap::product(
            cplx((-TAU).exp(), 0.0),
            vec![
                HoloMap::identity(),
                HoloMap::compose(
                    HoloMap::Atom(Atom::Exp),
                    HoloMap::Atom(Atom::Affine {
                        scale: cplx(0.0, 0.1 * std::f64::consts::PI),
                        offset: ZERO,
                    }),
                ),
            ],
        );
        let sol = koenigs_elliptic(&f, 10_000, &ctx()).unwrap();
        let lambda = sol.multiplier;
        for z in disc_grid(9, 12, 0.5) {
            let lhs = sol.h0.eval(f.eval(z, &ctx()).unwrap(), &ctx()).unwrap();
            let rhs = lambda * sol.h0.eval(z, &ctx()).unwrap();
            assert!((lhs - rhs).norm() < 1e-8, "residual {:.3e}", (lhs - rhs).norm());
        }
    }

    #[test]
    fn koenigs_rejects_out_of_range_multipliers() {
        let f = HoloMap::Atom(Atom::Affine { scale: cplx(1.2, 0.0), offset: ZERO });
        match koenigs_elliptic(&f, 100, &ctx()) {
            Err(AbelError::MultiplierOutOfRange { .. }) => {}
            other => panic!("expected MultiplierOutOfRange, got {other:?}"),
        }
        let id = HoloMap::identity();
        match koenigs_elliptic(&id, 100, &ctx()) {
            Err(AbelError::MultiplierOutOfRange { .. }) => {}
            other => panic!("expected MultiplierOutOfRange, got {other:?}"),
        }
    }

    #[test]
    fn simultaneous_translation_case_returns_the_shift() {
        let model = gallery::half_plane_model();
        let phi = model.model(ONE).unwrap();
        let psi = model.model(cplx(2.5, 0.0)).unwrap();
        let (sol, c) = simultaneous_abel_phs(&phi, &psi, &ctx()).unwrap();
        assert_eq!(c.method, ConstantMethod::RepresentationF0);
        assert!((c.value - cplx(2.5, 0.0)).norm() < 1e-9, "c = {}", c.value);
        // The returned solution is the original chart.
        for z in [cplx(0.2, 0.1), cplx(-0.3, 0.4)] {
            let a = sol.h.eval(z, &ctx()).unwrap();
            let b = model.chart.eval(z, &ctx()).unwrap();
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn simultaneous_iterate_case_returns_two() {
        let model = gallery::half_plane_model();
        let phi = model.model(ONE).unwrap();
        let psi = HoloMap::compose(phi.clone(), phi.clone());
        let (_, c) = simultaneous_abel_phs(&phi, &psi, &ctx()).unwrap();
        assert!((c.value - cplx(2.0, 0.0)).norm() < 1e-9, "c = {}", c.value);
    }

    #[test]
    fn simultaneous_full_pipeline_recovers_the_imaginary_shift() {
        let model = gallery::half_plane_model();
        let phi = model.model(ONE).unwrap();
        let g = HoloMap::Atom(Atom::ShiftPlusExp { shift: I, amplitude: cplx(0.05, 0.0) });
        let psi = HoloMap::conjugate(HoloMap::Atom(Atom::Cayley), g);
        let (sol, c) = simultaneous_abel_phs(&phi, &psi, &ctx()).unwrap();
        assert!((c.value - I).norm() < 1e-6, "c = {}", c.value);
        assert_eq!(c.method, ConstantMethod::RepresentationF0);

        // Independent spot check of both equations.
        let grid = disc_grid(21, 10, 0.55);
        let r1 = abel_residual(&sol.h, &phi, &grid, &ctx()).unwrap();
        assert!(r1 < 1e-6, "base residual {r1:.3e}");
        let mut r2 = 0.0_f64;
        for &z in &grid {
            let d = psi.displacement(z, &ctx()).unwrap();
            let diff = sol.h.diff_eval(z + d, z, d, &ctx()).unwrap();
            r2 = r2.max((diff - c.value).norm());
        }
        assert!(r2 < 1e-6, "second residual {r2:.3e}");
    }

    #[test]
    fn simultaneous_rejects_non_commuting_pairs() {
        let model = gallery::half_plane_model();
        let phi = model.model(ONE).unwrap();
        let psi = HoloMap::Mobius(Mobius {
            a: cplx(0.5, 0.0),
            b: ZERO,
            c: ZERO,
            d: ONE,
        });
        match simultaneous_abel_phs(&phi, &psi, &ctx()) {
            Err(AbelError::NotCommuting { residual }) => assert!(residual > 1e-3),
            other => panic!("expected NotCommuting, got {other:?}"),
        }
    }

    #[test]
    fn union_classification_of_the_comb_solution() {
        let model = gallery::slanted_comb_model();
        let sol = AbelSolution {
            normalization: model.chart.eval(ZERO, &ctx()).unwrap(),
            h: model.chart,
            image: model.domain,
        };
        let cls = classify_from_abel_solution(&sol, &ctx()).unwrap();
        assert_eq!(cls.map_type, MapType::ParabolicZeroStep);
        assert_eq!(cls.method, ClassifyMethod::AbelSolution);
        assert!(!cls.automorphism);
        assert!((cls.tau - ONE).norm() < 1e-3, "tau = {}", cls.tau);
    }

    #[test]
    fn union_classification_of_chartless_images() {
        // Vertical-slit half-plane: positive step; the placeholder chart is
        // not iterable, so the fixed point falls back to the canonical 1.
        let sol = AbelSolution {
            h: HoloMap::identity(),
            image: gallery::vertical_slit_domain(),
            normalization: ZERO,
        };
        let cls = classify_from_abel_solution(&sol, &ctx()).unwrap();
        assert_eq!(cls.map_type, MapType::ParabolicPositiveStep);
        assert_eq!(cls.tau, ONE);

        // Strip staircase: hyperbolic with the width-determined multiplier.
        let domain = crate::geometry::build_reciprocal_domain(
            &crate::geometry::SemigroupDescriptor::naturals(),
        )
        .unwrap();
        let sol = AbelSolution { h: HoloMap::identity(), image: domain, normalization: ZERO };
        let cls = classify_from_abel_solution(&sol, &ctx()).unwrap();
        assert_eq!(cls.map_type, MapType::Hyperbolic);
        let expected = (-std::f64::consts::PI).exp();
        assert!((cls.multiplier - cplx(expected, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn verified_constructor_gates_on_the_residual() {
        let model = gallery::half_plane_model();
        let phi = model.model(ONE).unwrap();
        let grid = disc_grid(3, 15, 0.8);
        let sol = AbelSolution::verified(
            model.chart.clone(),
            model.domain.clone(),
            &phi,
            &grid,
            &ctx(),
        )
        .unwrap();
        assert!((sol.normalization - I).norm() < 1e-12, "Cayley(0) = i");

        match AbelSolution::verified(HoloMap::identity(), model.domain, &phi, &grid, &ctx()) {
            Err(AbelError::ResidualTooLarge { .. }) => {}
            other => panic!("expected ResidualTooLarge, got {other:?}"),
        }
    }

    #[test]
    fn csv_export_writes_one_row_per_sample() {
        let model = gallery::half_plane_model();
        let phi = model.model(ONE).unwrap();
        let grid = disc_grid(3, 10, 0.8);
        let sol =
            AbelSolution::verified(model.chart, model.domain, &phi, &grid, &ctx()).unwrap();
        let samples = [ZERO, cplx(0.5, 0.0), cplx(0.0, -0.5)];
        let mut buf = Vec::new();
        sol.export_csv(&samples, &mut buf, &ctx()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.trim().lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "re_z,im_z,re_h,im_h");
        // Cayley(0.5) = i(1.5)/(0.5) = 3i.
        let fields: Vec<&str> = lines[2].split(',').collect();
        assert!((fields[2].parse::<f64>().unwrap()).abs() < 1e-15);
        assert!((fields[3].parse::<f64>().unwrap() - 3.0).abs() < 1e-12);
    }
}
