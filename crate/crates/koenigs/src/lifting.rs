//! The exponential correspondence `ζ = e^{2πiw}` between holomorphic maps on
//! the upper half-plane that commute with the unit translation and disc maps
//! fixing the origin — in all three directions: projecting a 1-periodic map
//! down to a function of `ζ`, pushing a translation-commuting map to a disc
//! map, and lifting a univalent disc map back up by a logarithmic integral.

use num_complex::Complex64 as Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::maps::{Atom, BranchContext, HoloMap, MapError};
use crate::num::{integrate_segment, NumError};

const I: Complex = Complex::new(0.0, 1.0);
const ONE: Complex = Complex::new(1.0, 0.0);
const TAU: f64 = std::f64::consts::TAU;

/// Maximum admissible `|g(w+1) − g(w) − 1|` on the verification grid for a
/// map accepted as translation-commuting.
pub const SHIFT_RESIDUAL_TOL: f64 = 1e-8;

/// Maximum admissible `|F(w+1) − F(w)|` on the verification grid for a map
/// accepted as 1-periodic.
pub const PERIODICITY_TOL: f64 = 1e-8;

/// Maximum admissible `|e^{2πiF(w)} − f(e^{2πiw})|` on the verification grid
/// of a computed lift.
pub const CONJUGACY_TOL: f64 = 1e-8;

/// Radius of the circle on which the winding number of a disc map around the
/// origin is measured.
pub const WINDING_RADIUS: f64 = 0.25;

/// Absolute quadrature tolerance for the winding integral.
pub const WINDING_QUADRATURE_TOL: f64 = 1e-10;

/// How far a winding integral may sit from the nearest integer before the
/// contour computation itself is distrusted.
pub const WINDING_INTEGER_TOL: f64 = 1e-6;

/// Height of the branch anchor `w₀ = 3i` used to normalize lifts; at this
/// height `|e^{2πiw₀}| ≈ 6.5·10⁻⁹`, deep in the linearization regime.
pub const ANCHOR_HEIGHT: f64 = 3.0;

/// Errors from the exponential-correspondence routines.
#[derive(Debug, Error)]
pub enum LiftError {
    /// The map failed its periodicity (or shift-law) grid check.
    #[error("map is not 1-periodic: residual {residual:.3e} at w = {at}")]
    NotPeriodic {
        /// Worst grid residual measured.
        residual: f64,
        /// Grid point where it was attained.
        at: Complex,
    },
    /// The winding number of the disc map around 0 along the test circle is
    /// not 1, so the logarithmic lift is not single-valued-per-period.
    #[error("winding number over the test circle is {winding}, expected 1")]
    WindingNotOne {
        /// The computed contour integral value.
        winding: Complex,
    },
    /// The computed lift failed its own conjugacy verification.
    #[error("lift conjugacy residual {residual:.3e} exceeds the admissible {CONJUGACY_TOL:.0e}")]
    ConjugacyCheckFailed {
        /// Worst grid residual measured.
        residual: f64,
    },
    /// Quadrature could not reach the requested tolerance.
    #[error(transparent)]
    Quadrature(#[from] NumError),
    /// Underlying map evaluation failed.
    #[error(transparent)]
    Map(#[from] MapError),
}

/// A self-map `g` of the upper half-plane that commutes with `w ↦ w+1` —
/// equivalently `g(w+1) = g(w) + 1` — together with the residual measured
/// when the shift law was verified.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PeriodicMap {
    /// The upstairs map.
    pub g: HoloMap,
    /// Max of `|g(w+1) − g(w) − 1|` over the verification grid.
    pub verified_shift_residual: f64,
}

impl PeriodicMap {
    /// Verifies the shift law `g(w+1) = g(w) + 1` on a grid covering one
    /// period horizontally and heights `0.2 ≤ Im w ≤ 3`, using the stable
    /// difference evaluator so that the residual is measured at the scale of
    /// the displacement, not of the values.
    pub fn verify(g: HoloMap, ctx: &BranchContext) -> Result<PeriodicMap, LiftError> {
        let (residual, at) = worst_shift_residual(&g, ONE, ctx)?;
        if residual > SHIFT_RESIDUAL_TOL {
            return Err(LiftError::NotPeriodic { residual, at });
        }
        Ok(PeriodicMap { g, verified_shift_residual: residual })
    }
}

/// A matched pair `(f, F)` with `f(e^{2πiw}) = e^{2πiF(w)}`, together with
/// the measured conjugacy residual and the normalization anchor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LiftedPair {
    /// The disc map (univalent, fixing 0).
    pub disc_map: HoloMap,
    /// Its half-plane lift, commuting with `w ↦ w+1`.
    pub lift: HoloMap,
    /// Max of `|e^{2πiF(w)} − f(e^{2πiw})|` over the verification grid.
    pub conjugacy_residual: f64,
    /// The anchor `w₀` where `exp(2πiF(w₀)) = f(e^{2πiw₀})` pins the branch;
    /// the additive integer in any lift is relative to this choice.
    pub normalization_point: Complex,
}

/// Worst `|g(w+1) − g(w) − shift|` over the standard verification grid,
/// with the point where it is attained.
fn worst_shift_residual(
    g: &HoloMap,
    shift: Complex,
    ctx: &BranchContext,
) -> Result<(f64, Complex), LiftError> {
    let mut worst = (0.0_f64, Complex::new(0.0, 0.2));
    for j in 0..5 {
        for k in 0..5 {
            let w = Complex::new(0.04 + 0.2 * j as f64, 0.2 + 0.7 * k as f64);
            let d = g.diff_eval(w + ONE, w, ONE, ctx)?;
            let r = (d - shift).norm();
            if r > worst.0 {
                worst = (r, w);
            }
        }
    }
    Ok(worst)
}

/// Projects a 1-periodic map `F` on the half-plane to the function
/// `f(ζ) := F(w)` of `ζ = e^{2πiw}`.
///
/// Periodicity is verified on a grid of points anchored at `sample_point`
/// (which should lie in the domain of `F`); once it holds, every branch of
/// `w = log ζ / (2πi)` yields the same value, so the returned evaluator
/// simply composes `F` with the principal branch.
pub fn project_periodic(
    map: &HoloMap,
    sample_point: Complex,
    ctx: &BranchContext,
) -> Result<HoloMap, LiftError> {
    let mut worst = (0.0_f64, sample_point);
    for j in 0..5 {
        for k in 0..5 {
            let w = sample_point + Complex::new(0.2 * j as f64, 0.45 * k as f64);
            let d = map.diff_eval(w + ONE, w, ONE, ctx)?;
            if d.norm() > worst.0 {
                worst = (d.norm(), w);
            }
        }
    }
    if worst.0 > PERIODICITY_TOL {
        return Err(LiftError::NotPeriodic { residual: worst.0, at: worst.1 });
    }
    Ok(HoloMap::compose(
        map.clone(),
        HoloMap::inverse(HoloMap::atom(Atom::ExpPeriodic)),
    ))
}

/// Pushes a translation-commuting half-plane map down to the disc:
/// `f(e^{2πiw}) = e^{2πi g(w)}`, extended across the puncture by `f(0) = 0`.
///
/// The evaluator exponentiates the *displacement* of `g`, so values stay
/// accurate even where `g(w)` itself is large; `f′(0)` is extracted as the
/// limit of `e^{2πi(g(w)−w)}` high in the half-plane rather than by
/// differencing near the origin.
pub fn push_commuting(g: &PeriodicMap) -> HoloMap {
    HoloMap::PushedPeriodic { g: Box::new(g.g.clone()) }
}

/// Winding number of `f` around 0 along the circle `|ζ| = radius`, computed
/// by adaptive quadrature of `f′/f · dζ / (2πi)`.
pub fn winding_number(
    f: &HoloMap,
    radius: f64,
    ctx: &BranchContext,
) -> Result<Complex, LiftError> {
    let integrand = |theta: Complex| -> Result<Complex, MapError> {
        let zeta = radius * (I * theta).exp();
        let val = f.eval(zeta, ctx)?;
        if val.norm() < 1e-150 {
            return Err(MapError::NoConvergence(
                "zero of the map on the winding contour".into(),
            ));
        }
        Ok(f.deriv(zeta, ctx)? * I * zeta / val)
    };
    let integral = integrate_segment(
        integrand,
        Complex::new(0.0, 0.0),
        Complex::new(TAU, 0.0),
        WINDING_QUADRATURE_TOL,
    )?;
    Ok(integral / (TAU * I))
}

/// Lifts a univalent disc map fixing the origin to a half-plane map `F` with
/// `e^{2πiF(w)} = f(e^{2πiw})` and `F(w+1) = F(w) + 1`.
///
/// Admissibility — that `f` has a simple zero at 0 and no other zero in the
/// test disc — is certified by the winding number of `f` along
/// `|ζ| =` [`WINDING_RADIUS`] being 1. The branch of `F` is anchored at
/// `w₀ = 3i` via the principal logarithm of `f(e^{2πiw₀})` and continued by
/// quadrature of the kernel `e^{2πiw} f′(e^{2πiw}) / f(e^{2πiw})` along
/// high-imaginary paths. The result is returned together with its measured
/// conjugacy residual; the grid check failing is an error, never a silent
/// degradation.
pub fn lift_univalent(f: &HoloMap, ctx: &BranchContext) -> Result<LiftedPair, LiftError> {
    let winding = winding_number(f, WINDING_RADIUS, ctx)?;
    if (winding - ONE).norm() > WINDING_INTEGER_TOL {
        return Err(LiftError::WindingNotOne { winding });
    }
    let w0 = Complex::new(0.0, ANCHOR_HEIGHT);
    let f0 = f.eval((TAU * I * w0).exp(), ctx)?;
    if f0.norm() < 1e-300 {
        return Err(LiftError::Map(MapError::NoConvergence(
            "map vanishes at the normalization anchor".into(),
        )));
    }
    let lift = HoloMap::LiftedLog {
        f: Box::new(f.clone()),
        base_point: w0,
        base_value: f0.ln() / (TAU * I),
    };
    let mut residual = 0.0_f64;
    for j in 0..5 {
        for k in 0..4 {
            let w = Complex::new(0.07 + 0.2 * j as f64, 0.25 + 0.55 * k as f64);
            let left = (TAU * I * lift.eval(w, ctx)?).exp();
            let right = f.eval((TAU * I * w).exp(), ctx)?;
            residual = residual.max((left - right).norm());
        }
    }
    if residual > CONJUGACY_TOL {
        return Err(LiftError::ConjugacyCheckFailed { residual });
    }
    Ok(LiftedPair {
        disc_map: f.clone(),
        lift,
        conjugacy_residual: residual,
        normalization_point: w0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::Mobius;

    fn cplx(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn ctx() -> BranchContext {
        BranchContext::default()
    }

    /// `w + c` as a half-plane map.
    fn translation(c: Complex) -> HoloMap {
        HoloMap::Atom(Atom::Affine { scale: ONE, offset: c })
    }

    /// The paper-suite perturbation `w ↦ w + i + 0.05·e^{2πiw}`.
    fn exp_perturbation() -> HoloMap {
        HoloMap::Atom(Atom::ShiftPlusExp { shift: I, amplitude: cplx(0.05, 0.0) })
    }

    /// Its closed-form push-down `ζ ↦ e^{−2π}·ζ·e^{0.1πiζ}`.
    fn exp_perturbation_pushed(zeta: Complex) -> Complex {
        (-TAU).exp() * zeta * (cplx(0.0, 0.1 * std::f64::consts::PI) * zeta).exp()
    }

    #[test]
    fn shift_law_verification_accepts_and_rejects() {
        let ok = PeriodicMap::verify(translation(cplx(0.3, 0.7)), &ctx()).unwrap();
        assert!(ok.verified_shift_residual < 1e-12);
        let ok = PeriodicMap::verify(exp_perturbation(), &ctx()).unwrap();
        assert!(ok.verified_shift_residual < 1e-10);
        let bad = PeriodicMap::verify(
            HoloMap::Atom(Atom::Affine { scale: cplx(1.1, 0.0), offset: cplx(0.0, 0.0) }),
            &ctx(),
        );
        match bad {
            Err(LiftError::NotPeriodic { residual, .. }) => {
                assert!((residual - 0.1).abs() < 1e-12);
            }
            other => panic!("expected NotPeriodic, got {other:?}"),
        }
    }

    #[test]
    fn projection_of_constant_and_tautological_maps() {
        let c = cplx(0.4, 0.3);
        let constant = HoloMap::Atom(Atom::Affine { scale: cplx(0.0, 0.0), offset: c });
        let proj = project_periodic(&constant, cplx(0.1, 0.3), &ctx()).unwrap();
        for zeta in [cplx(0.5, 0.0), cplx(-0.3, 0.2), cplx(0.0, -0.6)] {
            assert!((proj.eval(zeta, &ctx()).unwrap() - c).norm() < 1e-12);
        }

        let taut = HoloMap::Atom(Atom::ExpPeriodic);
        let proj = project_periodic(&taut, cplx(0.1, 0.3), &ctx()).unwrap();
        for zeta in [cplx(0.5, 0.0), cplx(-0.3, 0.2), cplx(0.1, 0.7)] {
            assert!((proj.eval(zeta, &ctx()).unwrap() - zeta).norm() < 1e-10);
        }
    }

    #[test]
    fn projection_of_sine_matches_laurent_form() {
        let proj = project_periodic(
            &HoloMap::Atom(Atom::SinPeriodic),
            cplx(0.1, 0.4),
            &ctx(),
        )
        .unwrap();
        for zeta in [cplx(0.6, 0.2), cplx(-0.2, 0.5), cplx(0.3, -0.4), cplx(0.9, 0.0)] {
            let expected = (zeta - ONE / zeta) / (2.0 * I);
            assert!((proj.eval(zeta, &ctx()).unwrap() - expected).norm() < 1e-10);
        }
    }

    #[test]
    fn projection_rejects_the_identity() {
        let id = HoloMap::identity();
        match project_periodic(&id, cplx(0.0, 0.5), &ctx()) {
            Err(LiftError::NotPeriodic { residual, .. }) => {
                assert!((residual - 1.0).abs() < 1e-12);
            }
            other => panic!("expected NotPeriodic, got {other:?}"),
        }
    }

    #[test]
    fn push_of_translation_is_a_rotation_dilation() {
        let c = cplx(0.3, 0.2);
        let g = PeriodicMap::verify(translation(c), &ctx()).unwrap();
        let f = push_commuting(&g);
        let factor = (TAU * I * c).exp();
        for zeta in [cplx(0.5, 0.0), cplx(-0.2, 0.4), cplx(0.0, 0.1)] {
            assert!((f.eval(zeta, &ctx()).unwrap() - factor * zeta).norm() < 1e-12);
        }
        assert!((f.eval(cplx(0.0, 0.0), &ctx()).unwrap()).norm() == 0.0);
        assert!((f.deriv(cplx(0.0, 0.0), &ctx()).unwrap() - factor).norm() < 1e-12);
    }

    #[test]
    fn push_of_exp_perturbation_matches_closed_form() {
        let g = PeriodicMap::verify(exp_perturbation(), &ctx()).unwrap();
        let f = push_commuting(&g);
        for zeta in [cplx(0.5, 0.0), cplx(-0.3, 0.3), cplx(0.1, -0.6), cplx(0.8, 0.1)] {
            let expected = exp_perturbation_pushed(zeta);
            assert!((f.eval(zeta, &ctx()).unwrap() - expected).norm() < 1e-9);
        }
        let d0 = f.deriv(cplx(0.0, 0.0), &ctx()).unwrap();
        assert!((d0 - cplx((-TAU).exp(), 0.0)).norm() < 1e-12);
    }

    #[test]
    fn push_of_identity_is_identity() {
        let g = PeriodicMap::verify(HoloMap::identity(), &ctx()).unwrap();
        let f = push_commuting(&g);
        for zeta in [cplx(0.4, 0.3), cplx(-0.7, 0.1), cplx(0.0, 0.0)] {
            assert!((f.eval(zeta, &ctx()).unwrap() - zeta).norm() < 1e-12);
        }
    }

    #[test]
    fn lift_of_identity_is_identity() {
        let pair = lift_univalent(&HoloMap::identity(), &ctx()).unwrap();
        assert!(pair.conjugacy_residual < 1e-9);
        for w in [cplx(0.2, 0.5), cplx(-0.4, 1.3), cplx(0.0, 2.0)] {
            assert!((pair.lift.eval(w, &ctx()).unwrap() - w).norm() < 1e-9);
        }
    }

    #[test]
    fn lift_of_linear_map_is_a_translation() {
        let lambda = cplx(0.3, 0.1);
        let f = HoloMap::Atom(Atom::Affine { scale: lambda, offset: cplx(0.0, 0.0) });
        let pair = lift_univalent(&f, &ctx()).unwrap();
        let shift = lambda.ln() / (TAU * I);
        for w in [cplx(0.1, 0.4), cplx(0.6, 1.1), cplx(-0.3, 0.8)] {
            let expected = w + shift;
            assert!((pair.lift.eval(w, &ctx()).unwrap() - expected).norm() < 1e-9);
        }
    }

    #[test]
    fn winding_gate_rejects_a_double_zero() {
        // ζ ↦ ζ² winds twice around 0; the lift must refuse it.
        let square = HoloMap::product(ONE, vec![HoloMap::identity(), HoloMap::identity()]);
        match lift_univalent(&square, &ctx()) {
            Err(LiftError::WindingNotOne { winding }) => {
                assert!((winding - cplx(2.0, 0.0)).norm() < 1e-8);
            }
            other => panic!("expected WindingNotOne, got {other:?}"),
        }
    }

    #[test]
    fn push_after_lift_reproduces_the_disc_map() {
        // Exponential-perturbation family, entered from the disc side.
        let f = HoloMap::product(
            cplx((-TAU).exp(), 0.0),
            vec![
                HoloMap::identity(),
                HoloMap::compose(
                    HoloMap::Atom(Atom::Exp),
                    HoloMap::Atom(Atom::Affine {
                        scale: cplx(0.0, 0.1 * std::f64::consts::PI),
                        offset: cplx(0.0, 0.0),
                    }),
                ),
            ],
        );
        let pair = lift_univalent(&f, &ctx()).unwrap();
        let g = PeriodicMap::verify(pair.lift.clone(), &ctx()).unwrap();
        assert!(g.verified_shift_residual < 1e-9);
        let back = push_commuting(&g);
        for zeta in [cplx(0.5, 0.0), cplx(-0.2, 0.3), cplx(0.05, -0.4)] {
            let a = back.eval(zeta, &ctx()).unwrap();
            let b = f.eval(zeta, &ctx()).unwrap();
            assert!((a - b).norm() < 1e-8, "round trip drift {:.3e}", (a - b).norm());
        }
    }

    #[test]
    fn lift_after_push_returns_the_map_up_to_a_reported_integer() {
        // Re c = 0.7 makes the principal logarithm at the anchor wrap once.
        let c = cplx(0.7, 0.2);
        let g = PeriodicMap::verify(translation(c), &ctx()).unwrap();
        let f = push_commuting(&g);
        let pair = lift_univalent(&f, &ctx()).unwrap();
        assert_eq!(pair.normalization_point, cplx(0.0, ANCHOR_HEIGHT));
        let mut offsets = Vec::new();
        for w in [cplx(0.1, 0.5), cplx(0.45, 1.2), cplx(-0.2, 0.9)] {
            let d = pair.lift.eval(w, &ctx()).unwrap() - g.g.eval(w, &ctx()).unwrap();
            offsets.push(d);
        }
        let k = offsets[0].re.round();
        assert_eq!(k, -1.0);
        for d in offsets {
            assert!((d - cplx(k, 0.0)).norm() < 1e-9, "offset {d} is not the constant {k}");
        }
    }

    #[test]
    fn lift_of_disc_mobius_round_trips() {
        // f(ζ) = 0.5ζ/(1 − 0.3ζ): a univalent self-map of the disc fixing 0.
        let f = HoloMap::Mobius(Mobius {
            a: cplx(0.5, 0.0),
            b: cplx(0.0, 0.0),
            c: cplx(-0.3, 0.0),
            d: cplx(1.0, 0.0),
        });
        let pair = lift_univalent(&f, &ctx()).unwrap();
        assert!(pair.conjugacy_residual < 1e-9);
        let g = PeriodicMap::verify(pair.lift.clone(), &ctx()).unwrap();
        let back = push_commuting(&g);
        for zeta in [cplx(0.6, 0.0), cplx(-0.4, 0.2), cplx(0.0, 0.5)] {
            let a = back.eval(zeta, &ctx()).unwrap();
            let b = f.eval(zeta, &ctx()).unwrap();
            assert!((a - b).norm() < 1e-8);
        }
    }

    #[test]
    fn lifts_obey_the_shift_law() {
        let maps = [
            HoloMap::Atom(Atom::Affine { scale: cplx(0.3, 0.1), offset: cplx(0.0, 0.0) }),
            HoloMap::Mobius(Mobius {
                a: cplx(0.5, 0.0),
                b: cplx(0.0, 0.0),
                c: cplx(-0.3, 0.0),
                d: cplx(1.0, 0.0),
            }),
        ];
        for f in maps {
            let pair = lift_univalent(&f, &ctx()).unwrap();
            for w in [cplx(0.15, 0.3), cplx(-0.4, 1.0), cplx(0.3, 1.7)] {
                let a = pair.lift.eval(w + ONE, &ctx()).unwrap();
                let b = pair.lift.eval(w, &ctx()).unwrap();
                assert!(
                    (a - b - ONE).norm() < 1e-9,
                    "shift-law residual {:.3e}",
                    (a - b - ONE).norm()
                );
            }
        }
    }

    #[test]
    fn sine_perturbation_has_positive_derivative_real_part() {
        // F(z) = z + κ·sin(4πz) with κ = 0.05: Re F′ > 0 on a thin strip, the
        // Noshiro–Warschawski witness for univalence.
        let kappa = 0.05;
        let f = HoloMap::sum(vec![
            (ONE, HoloMap::identity()),
            (
                cplx(kappa, 0.0),
                HoloMap::compose(
                    HoloMap::Atom(Atom::SinPeriodic),
                    HoloMap::Atom(Atom::Affine { scale: cplx(2.0, 0.0), offset: cplx(0.0, 0.0) }),
                ),
            ),
        ]);
        for j in 0..=10 {
            for y in [-0.05, 0.0, 0.05] {
                let z = cplx(0.1 * j as f64, y);
                let d = f.deriv(z, &ctx()).unwrap();
                assert!(d.re > 0.0, "Re F'({z}) = {} not positive", d.re);
            }
        }
    }
}
