//! Denjoy–Wolff point estimation and the elliptic / hyperbolic / parabolic
//! (zero vs positive hyperbolic step) classification of univalent self-maps
//! of the disc — by orbit numerics, by exact Möbius algebra, and by model
//! base space.

use num_complex::Complex64 as Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{BaseSpace, UnionClass};
use crate::maps::{BranchContext, HoloMap, MapError, Mobius};

const ONE: Complex = Complex::new(1.0, 0.0);
const ZERO: Complex = Complex::new(0.0, 0.0);

/// Snap radius for boundary Denjoy–Wolff points: estimates with modulus
/// above `1 − 10⁻⁶` are projected to the unit circle.
pub const BOUNDARY_SNAP: f64 = 1e-6;

/// Hyperbolic-step dead band: estimates below the floor with decreasing
/// trend mean zero step, estimates above the ceiling that have stabilized
/// mean positive step, anything else is inconclusive.
pub const STEP_ZERO_CEILING: f64 = 1e-4;
/// See [`STEP_ZERO_CEILING`].
pub const STEP_POSITIVE_FLOOR: f64 = 1e-3;

/// Errors from classification routines.
#[derive(Debug, Error)]
pub enum ClassifyError {
    /// The orbit did not settle within the iteration budget.
    #[error("orbit did not converge within {iterations} iterations (last delta {last_delta:.3e})")]
    NotConverged {
        /// Iterations performed.
        iterations: usize,
        /// Final consecutive-point distance.
        last_delta: f64,
    },
    /// The matrix does not induce a self-map of the unit disc.
    #[error("matrix does not induce a self-map of the unit disc")]
    NotASelfMap,
    /// Base-space and orbit classifications disagree beyond tolerance.
    #[error("model base space implies {base:?} but the orbit measures {detail}")]
    InconsistentModel {
        /// Classification read off the base space.
        base: MapType,
        /// What the orbit measured instead.
        detail: String,
    },
    /// The hyperbolic-step estimate sits in the undecidable dead band.
    #[error("hyperbolic step estimate {estimate:.3e} lies in the undecidable band")]
    Inconclusive {
        /// The dead-band estimate.
        estimate: f64,
    },
    /// Underlying map evaluation failed.
    #[error(transparent)]
    Map(#[from] MapError),
}

/// The six classification outcomes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MapType {
    /// Interior fixed point, not a rotation.
    Elliptic,
    /// Interior fixed point with unimodular multiplier (rotation conjugate).
    EllipticAutomorphism,
    /// Boundary fixed point with multiplier in `(0,1)`.
    Hyperbolic,
    /// Boundary fixed point, multiplier 1, vanishing hyperbolic step.
    ParabolicZeroStep,
    /// Boundary fixed point, multiplier 1, positive hyperbolic step.
    ParabolicPositiveStep,
    /// The identity map.
    Identity,
}

/// How a classification was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClassifyMethod {
    /// Orbit numerics.
    Orbit,
    /// Exact Möbius fixed-point algebra.
    MobiusExact,
    /// Read off a model map's base space.
    ModelBase,
    /// Derived from a computed Abel/Koenigs solution.
    AbelSolution,
}

/// A full classification record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Classification {
    /// The map type.
    pub map_type: MapType,
    /// Denjoy–Wolff point (interior for elliptic, unimodular otherwise).
    pub tau: Complex,
    /// Multiplier at the Denjoy–Wolff point.
    pub multiplier: Complex,
    /// Hyperbolic-step estimate when one was measured.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step_estimate: Option<f64>,
    /// Provenance of the classification.
    pub method: ClassifyMethod,
    /// Whether the map is a disc automorphism.
    pub automorphism: bool,
    /// Error scale of `tau` (`Some(0.0)` when the fixed point is exact,
    /// the orbit-estimate confidence otherwise, `None` when unknown).
    /// Downstream angular-limit computations fold this into their error
    /// estimates, since an error `ε` in the Denjoy–Wolff point biases a
    /// radial ladder by `O(ε)` in a way extrapolation cannot remove.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_confidence: Option<f64>,
}

/// A Denjoy–Wolff orbit estimate with its confidence.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DenjoyWolff {
    /// Estimated Denjoy–Wolff point (snapped to the circle when within
    /// [`BOUNDARY_SNAP`] of it).
    pub tau: Complex,
    /// Error scale from orbit Cauchy differences and extrapolation spread.
    pub confidence: f64,
    /// Orbit length used.
    pub iterations: usize,
}

/// Verdict of the hyperbolic-step dichotomy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepVerdict {
    /// The consecutive-distance sequence tends to zero.
    ZeroStep,
    /// The sequence stabilizes at a positive constant.
    PositiveStep,
    /// Dead band: reported, never guessed.
    Inconclusive,
}

/// Hyperbolic-step measurement along an orbit.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StepEstimate {
    /// Final consecutive pseudo-hyperbolic distance.
    pub estimate: f64,
    /// Whether the tail of the sequence is still decreasing.
    pub decreasing: bool,
    /// The dichotomy verdict.
    pub verdict: StepVerdict,
}

/// Pseudo-hyperbolic distance `|a−b| / |1 − āb|` on the unit disc.
pub fn pseudo_hyperbolic(a: Complex, b: Complex) -> f64 {
    let num = (a - b).norm();
    let den = (ONE - a.conj() * b).norm();
    if den < 1e-300 {
        return 1.0;
    }
    num / den
}

/// Translates a union classification of a Koenigs domain into a map type
/// and, for strips, the multiplier via `b − a = π/|log λ|`.
pub fn map_type_of_union(class: &UnionClass) -> (MapType, Option<f64>) {
    match class {
        UnionClass::FullPlane => (MapType::ParabolicZeroStep, None),
        UnionClass::ContainsUpperHalfPlane | UnionClass::ContainsLowerHalfPlane => {
            (MapType::ParabolicPositiveStep, None)
        }
        UnionClass::StripLike { a, b } => {
            let lambda = (-std::f64::consts::PI / (b - a)).exp();
            (MapType::Hyperbolic, Some(lambda))
        }
    }
}

/// Estimates the Denjoy–Wolff point by orbit iteration.
///
/// The raw orbit limit is refined by Aitken extrapolation when the
/// consecutive differences shrink geometrically (elliptic, hyperbolic) and
/// by harmonic Richardson (`2 z_n − z_{n/2}`) when they shrink like `1/n`
/// (parabolic); estimates with modulus above `1 − 10⁻⁶` snap to the unit
/// circle.
pub fn denjoy_wolff(
    phi: &HoloMap,
    z0: Complex,
    max_iter: usize,
    ctx: &BranchContext,
) -> Result<DenjoyWolff, ClassifyError> {
    let max_iter = max_iter.max(8);
    let mut orbit: Vec<Complex> = Vec::with_capacity(max_iter + 1);
    orbit.push(z0);
    let mut local = *ctx;
    let mut current = z0;
    for _ in 0..max_iter {
        local.seed = Some(current);
        current = phi.eval(current, &local)?;
        orbit.push(current);
        let n = orbit.len();
        if n >= 4 && (orbit[n - 1] - orbit[n - 2]).norm() < 1e-13 {
            break;
        }
    }
    let n = orbit.len() - 1;
    let last_delta = (orbit[n] - orbit[n - 1]).norm();

    // Regime detection from the delta ratios over the tail.
    let tail = 10.min(n - 1);
    let mut ratios = Vec::new();
    for k in (n - tail)..n {
        let d1 = (orbit[k + 1] - orbit[k]).norm();
        let d0 = (orbit[k] - orbit[k - 1]).norm();
        if d0 > 1e-300 {
            ratios.push(d1 / d0);
        }
    }
    let mean_ratio =
        if ratios.is_empty() { 0.0 } else { ratios.iter().sum::<f64>() / ratios.len() as f64 };

    let half_delta = (orbit[n / 2] - orbit[n / 2 - 1]).norm();
    let shrinking = last_delta < 0.5 * half_delta;
    let (refined, spread) = if last_delta < 1e-13 {
        (orbit[n], last_delta)
    } else if mean_ratio < 0.9 {
        // Geometric tail: Aitken Δ² on the last three points.
        let (a, b, c) = (orbit[n - 2], orbit[n - 1], orbit[n]);
        let den = c - 2.0 * b + a;
        if den.norm() > 1e-300 {
            let est = c - (c - b) * (c - b) / den;
            (est, (est - c).norm() * 0.5 + last_delta * mean_ratio / (1.0 - mean_ratio).max(0.1))
        } else {
            (c, last_delta)
        }
    } else if mean_ratio < 1.02 && shrinking {
        // Harmonic tail (parabolic): kill the 1/n term.  The shrink gate
        // keeps rotations (constant deltas, possibly period-resonant with
        // the half-index probe) out of this branch.
        let half = orbit[n / 2];
        let est = 2.0 * orbit[n] - half;
        (est, (est - orbit[n]).norm() * 0.25)
    } else {
        // Deltas are not shrinking: no limit in sight.
        (orbit[n], last_delta)
    };

    let confidence = spread.max(1e-15);
    if confidence > 1e-2 {
        return Err(ClassifyError::NotConverged { iterations: n, last_delta });
    }
    let tau = if refined.norm() > 1.0 - BOUNDARY_SNAP { refined / refined.norm() } else { refined };
    Ok(DenjoyWolff { tau, confidence, iterations: n })
}

/// Exact classification of the Möbius map induced by a nondegenerate
/// matrix, via fixed-point algebra of the associated quadratic.
///
/// By design every parabolic Möbius self-map is reported as
/// `ParabolicPositiveStep`, with the automorphism flag distinguishing
/// boundary-preserving maps; see the module documentation of
/// [`hyperbolic_step`] for the orbit-measured trend.
pub fn mobius_classify(m: &Mobius) -> Result<Classification, ClassifyError> {
    if !m.is_disc_self_map() {
        return Err(ClassifyError::NotASelfMap);
    }
    let scale = m.a.norm() + m.b.norm() + m.c.norm() + m.d.norm();
    let automorphism = m.is_disc_automorphism();

    // Identity: off-diagonal vanishes and the diagonal entries agree.
    if m.b.norm() < 1e-14 * scale && m.c.norm() < 1e-14 * scale && (m.a - m.d).norm() < 1e-14 * scale
    {
        return Ok(Classification {
            map_type: MapType::Identity,
            tau: ZERO,
            multiplier: ONE,
            step_estimate: None,
            method: ClassifyMethod::MobiusExact,
            automorphism: true,
            tau_confidence: Some(0.0),
        });
    }

    // Affine branch (c ≈ 0): the second fixed point sits at infinity, so a
    // single finite fixed point does not mean parabolic here.
    if m.c.norm() < 1e-14 * scale {
        let tau = m.b / (m.d - m.a);
        let multiplier = m.a / m.d;
        if tau.norm() < 1.0 - 1e-9 {
            let map_type = if (multiplier.norm() - 1.0).abs() < 1e-9 {
                MapType::EllipticAutomorphism
            } else {
                MapType::Elliptic
            };
            return Ok(Classification {
                map_type,
                tau,
                multiplier,
                step_estimate: None,
                method: ClassifyMethod::MobiusExact,
                automorphism,
                tau_confidence: Some(0.0),
            });
        }
        if (tau.norm() - 1.0).abs() <= 1e-9 {
            let mut multiplier = multiplier;
            if multiplier.im.abs() < 1e-10 * multiplier.norm().max(1.0) {
                multiplier = Complex::new(multiplier.re, 0.0);
            }
            if multiplier.re > 0.0 && multiplier.re < 1.0 && multiplier.im == 0.0 {
                return Ok(Classification {
                    map_type: MapType::Hyperbolic,
                    tau: tau / tau.norm(),
                    multiplier,
                    step_estimate: None,
                    method: ClassifyMethod::MobiusExact,
                    automorphism,
                    tau_confidence: Some(0.0),
                });
            }
        }
        return Err(ClassifyError::NotASelfMap);
    }

    let fps = m.fixed_points();
    match fps.len() {
        1 => {
            // Parabolic: single (double) fixed point, necessarily on the
            // circle for a self-map.
            let mut tau = fps[0];
            if (tau.norm() - 1.0).abs() > 1e-6 {
                return Err(ClassifyError::NotASelfMap);
            }
            tau /= tau.norm();
            Ok(Classification {
                map_type: MapType::ParabolicPositiveStep,
                tau,
                multiplier: ONE,
                step_estimate: None,
                method: ClassifyMethod::MobiusExact,
                automorphism,
                tau_confidence: Some(0.0),
            })
        }
        2 => {
            let interior: Vec<Complex> =
                fps.iter().copied().filter(|p| p.norm() < 1.0 - 1e-9).collect();
            let boundary: Vec<Complex> =
                fps.iter().copied().filter(|p| (p.norm() - 1.0).abs() <= 1e-9).collect();
            if let Some(&tau) = interior.first() {
                let multiplier = m.derivative(tau);
                let map_type = if (multiplier.norm() - 1.0).abs() < 1e-9 {
                    MapType::EllipticAutomorphism
                } else {
                    MapType::Elliptic
                };
                return Ok(Classification {
                    map_type,
                    tau,
                    multiplier,
                    step_estimate: None,
                    method: ClassifyMethod::MobiusExact,
                    automorphism,
                    tau_confidence: Some(0.0),
                });
            }
            if boundary.len() == 2 {
                // Hyperbolic: pick the attracting fixed point.
                let d0 = m.derivative(boundary[0]);
                let (tau, mult) =
                    if d0.norm() < 1.0 { (boundary[0], d0) } else { (boundary[1], m.derivative(boundary[1])) };
                let tau = tau / tau.norm();
                let mut multiplier = mult;
                if multiplier.im.abs() < 1e-10 * multiplier.norm().max(1.0) {
                    multiplier = Complex::new(multiplier.re, 0.0);
                }
                if !(multiplier.re > 0.0 && multiplier.re < 1.0 && multiplier.im == 0.0) {
                    return Err(ClassifyError::NotASelfMap);
                }
                return Ok(Classification {
                    map_type: MapType::Hyperbolic,
                    tau,
                    multiplier,
                    step_estimate: None,
                    method: ClassifyMethod::MobiusExact,
                    automorphism,
                    tau_confidence: Some(0.0),
                });
            }
            Err(ClassifyError::NotASelfMap)
        }
        _ => Err(ClassifyError::NotASelfMap),
    }
}

/// Classifies a univalent self-map.
///
/// Möbius maps go through the exact algebra; model maps are read off their
/// base space (strip ⇒ hyperbolic with `b − a = π/|log λ|`, plane ⇒
/// parabolic of zero step, half-plane ⇒ parabolic of positive step) with an
/// orbit cross-check of the multiplier; everything else is classified from
/// orbit numerics.
pub fn classify_type(
    phi: &HoloMap,
    z0: Complex,
    ctx: &BranchContext,
) -> Result<Classification, ClassifyError> {
    if let HoloMap::Mobius(m) = phi {
        return mobius_classify(m);
    }
    if is_identity(phi, z0, ctx)? {
        return Ok(Classification {
            map_type: MapType::Identity,
            tau: ZERO,
            multiplier: ONE,
            step_estimate: None,
            method: ClassifyMethod::Orbit,
            automorphism: true,
            tau_confidence: Some(0.0),
        });
    }
    // The declared base space determines the type only when the shift
    // points along the canonical (positive real) direction; any other
    // admissible shift changes the model of the induced map — on a
    // half-plane base, a vertical shift component drives the orbit to
    // interior infinity and the hyperbolic step to zero — so those shifts
    // take the generic orbit route below.
    if let HoloMap::ModelMap { image, shift, .. } = phi {
        if shift.im.abs() < 1e-12 && shift.re > 0.0 {
            let dw = denjoy_wolff(phi, z0, 3000, ctx)?;
            let (map_type, base_multiplier) = match image.base() {
                BaseSpace::Plane => (MapType::ParabolicZeroStep, 1.0),
                BaseSpace::UpperHalfPlane | BaseSpace::LowerHalfPlane => {
                    (MapType::ParabolicPositiveStep, 1.0)
                }
                BaseSpace::Strip { a, b } => {
                    let lambda = (-std::f64::consts::PI * shift.re.abs() / (b - a)).exp();
                    (MapType::Hyperbolic, lambda)
                }
            };
            // Orbit cross-check: the radial contraction ratio must match the
            // base-space multiplier.
            let mu = orbit_multiplier(phi, dw.tau, ctx)?;
            if (mu - base_multiplier).abs() > 0.1 {
                return Err(ClassifyError::InconsistentModel {
                    base: map_type,
                    detail: format!("multiplier ratio {mu:.4} vs base-space {base_multiplier:.4}"),
                });
            }
            // Automorphism iff the image also translates backwards into
            // itself.
            let automorphism = image.contains_translate(-shift).unwrap_or(false);
            let multiplier = if map_type == MapType::Hyperbolic {
                Complex::new(base_multiplier, 0.0)
            } else {
                ONE
            };
            return Ok(Classification {
                map_type,
                tau: dw.tau,
                multiplier,
                step_estimate: None,
                method: ClassifyMethod::ModelBase,
                automorphism,
                tau_confidence: Some(dw.confidence),
            });
        }
    }

    // Orbit route.
    let dw = denjoy_wolff(phi, z0, 3000, ctx)?;
    let automorphism = preserves_hyperbolic_metric(phi, ctx)?;
    if dw.tau.norm() < 1.0 - BOUNDARY_SNAP {
        let multiplier = phi.deriv(dw.tau, ctx)?;
        let map_type = if (multiplier.norm() - 1.0).abs() < 1e-9 {
            MapType::EllipticAutomorphism
        } else {
            MapType::Elliptic
        };
        return Ok(Classification {
            map_type,
            tau: dw.tau,
            multiplier,
            step_estimate: None,
            method: ClassifyMethod::Orbit,
            automorphism,
            tau_confidence: Some(dw.confidence),
        });
    }
    let mu = orbit_multiplier(phi, dw.tau, ctx)?;
    if mu < 0.97 {
        return Ok(Classification {
            map_type: MapType::Hyperbolic,
            tau: dw.tau,
            multiplier: Complex::new(mu, 0.0),
            step_estimate: None,
            method: ClassifyMethod::Orbit,
            automorphism,
            tau_confidence: Some(dw.confidence),
        });
    }
    // Parabolic: decide the step dichotomy, honestly.
    let step = hyperbolic_step(phi, z0, 4000, ctx)?;
    let map_type = match step.verdict {
        StepVerdict::ZeroStep => MapType::ParabolicZeroStep,
        StepVerdict::PositiveStep => MapType::ParabolicPositiveStep,
        StepVerdict::Inconclusive => {
            return Err(ClassifyError::Inconclusive { estimate: step.estimate })
        }
    };
    Ok(Classification {
        map_type,
        tau: dw.tau,
        multiplier: ONE,
        step_estimate: Some(step.estimate),
        method: ClassifyMethod::Orbit,
        automorphism,
        tau_confidence: Some(dw.confidence),
    })
}

/// Measures the tail of consecutive pseudo-hyperbolic orbit distances
/// `ρ(zₙ, zₙ₊₁)` and applies the step dichotomy with its dead band:
/// below `10⁻⁴` and decreasing ⇒ zero step, stabilized above `10⁻³` ⇒
/// positive step, otherwise inconclusive.
pub fn hyperbolic_step(
    phi: &HoloMap,
    z0: Complex,
    n: usize,
    ctx: &BranchContext,
) -> Result<StepEstimate, ClassifyError> {
    let n = n.max(10);
    let mut local = *ctx;
    let mut current = z0;
    let mut steps: Vec<f64> = Vec::with_capacity(n);
    for _ in 0..n {
        local.seed = Some(current);
        let disp = phi.displacement(current, &local)?;
        let next = current + disp;
        let den = (ONE - current.conj() * next).norm();
        // Stop once the orbit numerically touches the circle: beyond this
        // point the pseudo-hyperbolic quotient is pure rounding noise (the
        // limit was reached long before for geometric orbits).
        if den < 1e-9 {
            break;
        }
        steps.push(disp.norm() / den);
        current = next;
    }
    if steps.len() < 10 {
        return Err(ClassifyError::NotConverged {
            iterations: steps.len(),
            last_delta: steps.last().copied().unwrap_or(f64::NAN),
        });
    }
    let last = steps[steps.len() - 1];
    let mid = steps[steps.len() / 2];
    let decreasing = last < 0.95 * mid;
    let stabilized = (last - mid).abs() <= 0.05 * last.max(1e-300);
    // Steps that vanish like c/n halve between the midpoint and the end of
    // the orbit; recognizing that decay extends the absolute ceiling by a
    // decade, since a genuine positive limit hiding under a harmonic tail
    // would have to be an order of magnitude below the last step.
    let harmonic = decreasing
        && last < 10.0 * STEP_ZERO_CEILING
        && (last / mid.max(1e-300) - 0.5).abs() < 0.1;
    let verdict = if (last < STEP_ZERO_CEILING && decreasing) || harmonic {
        StepVerdict::ZeroStep
    } else if last > STEP_POSITIVE_FLOOR && stabilized {
        StepVerdict::PositiveStep
    } else {
        StepVerdict::Inconclusive
    };
    Ok(StepEstimate { estimate: last, decreasing, verdict })
}

/// Radial contraction ratio toward a boundary fixed point, extrapolated
/// over a short ladder that tolerates a coarsely estimated `τ`.
fn orbit_multiplier(
    phi: &HoloMap,
    tau: Complex,
    ctx: &BranchContext,
) -> Result<f64, ClassifyError> {
    let radii = [1e-2, 10f64.powf(-2.5), 1e-3];
    let mut steps = Vec::new();
    let mut ratios = Vec::new();
    for &h in &radii {
        let z = tau * (1.0 - h);
        let disp = phi.displacement(z, ctx)?;
        // (φ(z) − τ)/(z − τ) = 1 + disp/(z − τ); z − τ = −τ·h exactly.
        let ratio = ONE + disp / (-tau * h);
        steps.push(h);
        ratios.push(ratio);
    }
    let ext = crate::num::neville_extrapolate(&steps, &ratios).map_err(MapError::from)?;
    Ok(ext.value.re.clamp(0.0, 2.0))
}

/// Schwarz–Pick equality test: automorphisms preserve the
/// pseudo-hyperbolic distance.
fn preserves_hyperbolic_metric(
    phi: &HoloMap,
    ctx: &BranchContext,
) -> Result<bool, ClassifyError> {
    let pairs = [
        (ZERO, Complex::new(0.5, 0.0)),
        (Complex::new(-0.3, 0.2), Complex::new(0.1, -0.4)),
    ];
    for (a, b) in pairs {
        let fa = phi.eval(a, ctx)?;
        let fb = phi.eval(b, ctx)?;
        if (pseudo_hyperbolic(fa, fb) - pseudo_hyperbolic(a, b)).abs() > 1e-8 {
            return Ok(false);
        }
    }
    Ok(true)
}

fn is_identity(phi: &HoloMap, z0: Complex, ctx: &BranchContext) -> Result<bool, ClassifyError> {
    let probes = [z0, Complex::new(0.31, -0.17), Complex::new(-0.52, 0.4)];
    for p in probes {
        if phi.displacement(p, ctx)?.norm() > 1e-13 {
            return Ok(false);
        }
    }
    Ok(true)
}
