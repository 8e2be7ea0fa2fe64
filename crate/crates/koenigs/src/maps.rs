//! Holomorphic maps: closed-form atoms, Möbius transformations,
//! compositions, and model maps `h⁻¹ ∘ (w ↦ w + b) ∘ h` defined through a
//! Koenigs chart.
//!
//! Besides plain evaluation and closed-form differentiation, every map
//! supports two cancellation-free primitives that the rest of the crate is
//! built on:
//!
//! - [`HoloMap::displacement`], `m(z) − z`, computed without subtracting two
//!   nearly equal evaluations — essential for maps close to the identity and
//!   for boundary ratios;
//! - [`HoloMap::diff_eval`], `m(x) − m(y)` given the exact difference
//!   `d = x − y`, propagated through compositions by difference algebra
//!   (`exp`/`log` via `expm1`/`log1p`, Möbius via the determinant identity,
//!   chart inversions by Newton in the difference variable).
//!
//! Angular derivatives at boundary fixed points are Richardson-extrapolated
//! ratios of these stable differences, which keeps the radial ladder
//! accurate all the way to `1 − 10⁻⁶`.

use num_complex::Complex64 as Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{GeometryError, KoenigsDomain};
use crate::num::{
    cexpm1, clog1p, damped_newton_best, integrate_ode, integrate_path, neville_extrapolate,
    Extrapolated, NumError, OdeOptions,
};

const I: Complex = Complex::new(0.0, 1.0);
const ONE: Complex = Complex::new(1.0, 0.0);
const ZERO: Complex = Complex::new(0.0, 0.0);
const TAU: f64 = std::f64::consts::TAU;

/// Errors from map evaluation, differentiation, and inversion.
#[derive(Debug, Error)]
pub enum MapError {
    /// The point lies outside the declared domain of the map.
    #[error("point {at} lies outside the declared domain")]
    OutsideDomain {
        /// Offending point.
        at: Complex,
    },
    /// Newton inversion failed from every available seed.
    #[error("Newton inversion diverged (residual {residual:.3e})")]
    NewtonDiverged {
        /// Smallest residual reached.
        residual: f64,
    },
    /// A multivalued atom was evaluated on its cut without a resolving seed.
    #[error("branch ambiguous at {at}; provide a branch-context seed")]
    BranchAmbiguous {
        /// Offending point.
        at: Complex,
    },
    /// A closed-form derivative hit a singularity.
    #[error("derivative singular at {at}")]
    DerivativeSingular {
        /// Offending point.
        at: Complex,
    },
    /// An iterative limit failed to settle.
    #[error("no convergence: {0}")]
    NoConvergence(String),
    /// A quadrature or ODE step failed.
    #[error("integration failed: {0}")]
    Integration(String),
    /// A model-map shift does not translate the image into itself.
    #[error("shift {shift} does not translate the declared image into itself")]
    ShiftNotAdmissible {
        /// Offending shift.
        shift: Complex,
    },
    /// Underlying domain geometry rejected an operation.
    #[error("domain geometry error: {0}")]
    Geometry(#[from] GeometryError),
}

impl From<NumError> for MapError {
    fn from(e: NumError) -> Self {
        match e {
            NumError::NewtonDiverged { residual, .. } => MapError::NewtonDiverged { residual },
            NumError::ZeroDerivative { at } => MapError::DerivativeSingular { at },
            NumError::NoConvergence { spread } => {
                MapError::NoConvergence(format!("extrapolation spread {spread:.3e}"))
            }
            other => MapError::Integration(other.to_string()),
        }
    }
}

/// Branch and inversion bookkeeping: a seed (typically the previous
/// inversion result or orbit point), the certification tolerance, and the
/// Newton step budget.
#[derive(Clone, Copy, Debug)]
pub struct BranchContext {
    /// Seed for Newton inversions and branch selection.
    pub seed: Option<Complex>,
    /// Absolute certification tolerance for inversions.
    pub tolerance_abs: f64,
    /// Maximum Newton steps per inversion.
    pub max_newton_steps: usize,
}

impl Default for BranchContext {
    fn default() -> Self {
        BranchContext { seed: None, tolerance_abs: 1e-12, max_newton_steps: 60 }
    }
}

impl BranchContext {
    /// Context with a given seed.
    pub fn with_seed(seed: Complex) -> Self {
        BranchContext { seed: Some(seed), ..Default::default() }
    }
}

// ---------------------------------------------------------------------------
// Möbius transformations.
// ---------------------------------------------------------------------------

/// A nondegenerate Möbius transformation `z ↦ (az + b)/(cz + d)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MobiusRepr", into = "MobiusRepr")]
pub struct Mobius {
    /// Top-left entry.
    pub a: Complex,
    /// Top-right entry.
    pub b: Complex,
    /// Bottom-left entry.
    pub c: Complex,
    /// Bottom-right entry.
    pub d: Complex,
}

#[derive(Serialize, Deserialize)]
struct MobiusRepr {
    matrix: [Complex; 4],
}

impl From<Mobius> for MobiusRepr {
    fn from(m: Mobius) -> Self {
        MobiusRepr { matrix: [m.a, m.b, m.c, m.d] }
    }
}

impl TryFrom<MobiusRepr> for Mobius {
    type Error = String;
    fn try_from(r: MobiusRepr) -> Result<Self, String> {
        let [a, b, c, d] = r.matrix;
        Mobius::new(a, b, c, d).map_err(|e| e.to_string())
    }
}

impl Mobius {
    /// Builds a Möbius transformation, rejecting degenerate matrices.
    pub fn new(a: Complex, b: Complex, c: Complex, d: Complex) -> Result<Self, MapError> {
        let m = Mobius { a, b, c, d };
        if m.det().norm() < 1e-14 * (a.norm() + b.norm() + c.norm() + d.norm()).max(1.0).powi(2) {
            return Err(MapError::NoConvergence("degenerate Möbius matrix".into()));
        }
        Ok(m)
    }

    /// Determinant `ad − bc`.
    pub fn det(&self) -> Complex {
        self.a * self.d - self.b * self.c
    }

    /// The Cayley map `z ↦ i(1+z)/(1−z)`, disc to upper half-plane.
    pub fn cayley() -> Self {
        Mobius { a: I, b: I, c: -ONE, d: ONE }
    }

    /// Value at `z`.
    pub fn apply(&self, z: Complex) -> Complex {
        (self.a * z + self.b) / (self.c * z + self.d)
    }

    /// Derivative at `z`.
    pub fn derivative(&self, z: Complex) -> Complex {
        let den = self.c * z + self.d;
        self.det() / (den * den)
    }

    /// Matrix product (composition `self ∘ other`).
    pub fn compose(&self, other: &Mobius) -> Mobius {
        Mobius {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }

    /// Matrix inverse (no normalization needed for the induced map).
    pub fn inverse(&self) -> Mobius {
        Mobius { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    /// Conjugates a half-plane Möbius map `M` to the disc:
    /// `Cayley⁻¹ ∘ M ∘ Cayley`.
    pub fn to_disc(half_plane_map: &Mobius) -> Mobius {
        let c = Mobius::cayley();
        c.inverse().compose(half_plane_map).compose(&c)
    }

    /// The disc conjugate of the half-plane translation `w ↦ w + b`.
    pub fn disc_translation(b: Complex) -> Mobius {
        Mobius::to_disc(&Mobius { a: ONE, b, c: ZERO, d: ONE })
    }

    /// The disc conjugate of the half-plane dilation `w ↦ λw`, `λ > 0`.
    pub fn disc_dilation(lambda: f64) -> Mobius {
        Mobius::to_disc(&Mobius {
            a: Complex::new(lambda, 0.0),
            b: ZERO,
            c: ZERO,
            d: ONE,
        })
    }

    /// Fixed points in ℂ; one entry when the map fixes `∞` or is parabolic
    /// with a single finite fixed point, two otherwise.
    pub fn fixed_points(&self) -> Vec<Complex> {
        // c z² + (d − a) z − b = 0.
        let (a, b, c, d) = (self.a, self.b, self.c, self.d);
        if c.norm() < 1e-14 {
            if (a - d).norm() < 1e-14 {
                return vec![]; // pure translation: only ∞
            }
            return vec![b / (d - a) * (-1.0)];
        }
        let disc = (d - a) * (d - a) + 4.0 * b * c;
        let mut s = disc.sqrt();
        // Pick the sign that avoids cancellation in the larger root.
        if ((a - d) + s).norm() < ((a - d) - s).norm() {
            s = -s;
        }
        let r1 = ((a - d) + s) / (2.0 * c);
        if disc.norm() < 1e-14 * ((d - a).norm_sqr() + 4.0 * (b * c).norm()).max(1e-30) {
            return vec![r1]; // parabolic: double root
        }
        let r2 = -b / (c * r1);
        vec![r1, r2]
    }

    /// `m(z) − z` through the fixed-point factorization of the numerator,
    /// accurate even when `z` is close to a fixed point.
    pub fn displacement(&self, z: Complex) -> Complex {
        let (a, b, c, d) = (self.a, self.b, self.c, self.d);
        let den = c * z + d;
        // Numerator −c z² + (a − d) z + b factored over the fixed points.
        if c.norm() >= 1e-14 {
            let fps = self.fixed_points();
            match fps.len() {
                2 => -c * (z - fps[0]) * (z - fps[1]) / den,
                1 => -c * (z - fps[0]) * (z - fps[0]) / den,
                _ => (-c * z * z + (a - d) * z + b) / den,
            }
        } else if (a - d).norm() >= 1e-14 {
            let rho = -b / (a - d);
            (a - d) * (z - rho) / den
        } else {
            b / den
        }
    }

    /// `m(x) − m(y)` via the determinant identity, given `d = x − y`.
    pub fn diff(&self, x: Complex, y: Complex, d: Complex) -> Complex {
        self.det() * d / ((self.c * x + self.d) * (self.c * y + self.d))
    }

    /// Whether the induced map sends the unit disc into itself, checked on a
    /// boundary grid plus an interior point.
    pub fn is_disc_self_map(&self) -> bool {
        if (self.c * ZERO + self.d).norm() < 1e-14 || self.apply(ZERO).norm() > 1.0 + 1e-9 {
            return false;
        }
        for k in 0..256 {
            let th = TAU * k as f64 / 256.0;
            let z = Complex::from_polar(1.0, th);
            let den = self.c * z + self.d;
            if den.norm() < 1e-12 {
                return false;
            }
            if self.apply(z).norm() > 1.0 + 1e-9 {
                return false;
            }
        }
        true
    }

    /// Whether the induced map is a disc automorphism (boundary to
    /// boundary).
    pub fn is_disc_automorphism(&self) -> bool {
        if !self.is_disc_self_map() {
            return false;
        }
        for k in 0..64 {
            let th = TAU * (k as f64 + 0.37) / 64.0;
            let z = Complex::from_polar(1.0, th);
            if (self.apply(z).norm() - 1.0).abs() > 1e-9 {
                return false;
            }
        }
        true
    }
}

// ---------------------------------------------------------------------------
// Closed-form atoms.
// ---------------------------------------------------------------------------

/// Closed-form building blocks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Atom {
    /// `z ↦ i(1+z)/(1−z)` (disc → upper half-plane).
    Cayley,
    /// `w ↦ (w−i)/(w+i)` (upper half-plane → disc).
    InverseCayley,
    /// Principal logarithm.
    Log,
    /// Exponential.
    Exp,
    /// Principal power `z ↦ z^p`.
    Power {
        /// Exponent.
        exponent: f64,
    },
    /// `z ↦ scale·z + offset`.
    Affine {
        /// Linear coefficient.
        scale: Complex,
        /// Constant term.
        offset: Complex,
    },
    /// `w ↦ 2 log cos(πw)` in its globally continued form
    /// `−2πiw − 2 ln 2 + 2 Log(1 + e^{2πiw})`, holomorphic on the upper
    /// half-plane and across every period.
    TwoLogCos,
    /// `w ↦ −cot(πw)/(2π)`, written as `(i/2π)(1+q)/(1−q)` with
    /// `q = e^{2πiw}`; the downstairs generator of the standard periodic
    /// semigroup.
    CotGenerator,
    /// `w ↦ e^{2πiw}`, the universal cover of the punctured disc.
    ExpPeriodic,
    /// `w ↦ w − (1−i)/(2π)·Log(1 − e^{2πiw})`: a slanted-comb chart whose
    /// image omits vertical slits of linearly growing depth.
    SlantComb,
    /// `w ↦ (s + Log(w + s))/π` with `s = √(w−1)·√(w+1)`: maps the upper
    /// half-plane onto the half-plane minus the notch
    /// `{Re ≤ 0, 0 < Im ≤ 1}`.
    HalfPlaneNotch,
    /// `w ↦ w + shift + amplitude·e^{2πiw}`: a periodic perturbation of a
    /// translation.
    ShiftPlusExp {
        /// Constant translation part.
        shift: Complex,
        /// Coefficient of the periodic part.
        amplitude: Complex,
    },
    /// `w ↦ sin(2πw)`, entire and 1-periodic.
    SinPeriodic,
}

#[derive(Serialize, Deserialize)]
struct AtomRepr {
    name: String,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    params: serde_json::Value,
}

impl From<Atom> for AtomRepr {
    fn from(a: Atom) -> Self {
        use serde_json::json;
        match a {
            Atom::Cayley => AtomRepr { name: "cayley".into(), params: serde_json::Value::Null },
            Atom::InverseCayley => {
                AtomRepr { name: "inverseCayley".into(), params: serde_json::Value::Null }
            }
            Atom::Log => AtomRepr { name: "log".into(), params: serde_json::Value::Null },
            Atom::Exp => AtomRepr { name: "exp".into(), params: serde_json::Value::Null },
            Atom::Power { exponent } => {
                AtomRepr { name: "power".into(), params: json!({ "exponent": exponent }) }
            }
            Atom::Affine { scale, offset } => AtomRepr {
                name: "affine".into(),
                params: json!({ "scale": [scale.re, scale.im], "offset": [offset.re, offset.im] }),
            },
            Atom::TwoLogCos => {
                AtomRepr { name: "twoLogCos".into(), params: serde_json::Value::Null }
            }
            Atom::CotGenerator => {
                AtomRepr { name: "cotGenerator".into(), params: serde_json::Value::Null }
            }
            Atom::ExpPeriodic => {
                AtomRepr { name: "expPeriodic".into(), params: serde_json::Value::Null }
            }
            Atom::SlantComb => AtomRepr {
                name: "userClosedForm".into(),
                params: json!({ "form": "slantComb" }),
            },
            Atom::HalfPlaneNotch => AtomRepr {
                name: "userClosedForm".into(),
                params: json!({ "form": "halfPlaneNotch" }),
            },
            Atom::ShiftPlusExp { shift, amplitude } => AtomRepr {
                name: "userClosedForm".into(),
                params: json!({
                    "form": "shiftPlusExp",
                    "shift": [shift.re, shift.im],
                    "amplitude": [amplitude.re, amplitude.im],
                }),
            },
            Atom::SinPeriodic => AtomRepr {
                name: "userClosedForm".into(),
                params: json!({ "form": "sinPeriodic" }),
            },
        }
    }
}

fn json_complex(v: &serde_json::Value, field: &str) -> Result<Complex, String> {
    let arr = v
        .get(field)
        .and_then(|x| x.as_array())
        .ok_or_else(|| format!("missing complex field {field:?}"))?;
    if arr.len() != 2 {
        return Err(format!("complex field {field:?} needs [re, im]"));
    }
    Ok(Complex::new(
        arr[0].as_f64().ok_or("non-numeric re")?,
        arr[1].as_f64().ok_or("non-numeric im")?,
    ))
}

impl TryFrom<AtomRepr> for Atom {
    type Error = String;
    fn try_from(r: AtomRepr) -> Result<Self, String> {
        match r.name.as_str() {
            "cayley" => Ok(Atom::Cayley),
            "inverseCayley" => Ok(Atom::InverseCayley),
            "log" => Ok(Atom::Log),
            "exp" => Ok(Atom::Exp),
            "power" => Ok(Atom::Power {
                exponent: r
                    .params
                    .get("exponent")
                    .and_then(|v| v.as_f64())
                    .ok_or("power atom needs a numeric exponent")?,
            }),
            "affine" => Ok(Atom::Affine {
                scale: json_complex(&r.params, "scale")?,
                offset: json_complex(&r.params, "offset")?,
            }),
            "twoLogCos" => Ok(Atom::TwoLogCos),
            "cotGenerator" => Ok(Atom::CotGenerator),
            "expPeriodic" => Ok(Atom::ExpPeriodic),
            "userClosedForm" => {
                match r.params.get("form").and_then(|v| v.as_str()).unwrap_or("") {
                    "slantComb" => Ok(Atom::SlantComb),
                    "halfPlaneNotch" => Ok(Atom::HalfPlaneNotch),
                    "shiftPlusExp" => Ok(Atom::ShiftPlusExp {
                        shift: json_complex(&r.params, "shift")?,
                        amplitude: json_complex(&r.params, "amplitude")?,
                    }),
                    "sinPeriodic" => Ok(Atom::SinPeriodic),
                    other => Err(format!("unknown closed form {other:?}")),
                }
            }
            other => Err(format!("unknown atom {other:?}")),
        }
    }
}

impl Serialize for Atom {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        AtomRepr::from(*self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Atom {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Atom::try_from(AtomRepr::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

impl Atom {
    fn eval(&self, z: Complex) -> Result<Complex, MapError> {
        Ok(match *self {
            Atom::Cayley => {
                if (ONE - z).norm() < 1e-300 {
                    return Err(MapError::OutsideDomain { at: z });
                }
                I * (ONE + z) / (ONE - z)
            }
            Atom::InverseCayley => {
                if (z + I).norm() < 1e-300 {
                    return Err(MapError::OutsideDomain { at: z });
                }
                (z - I) / (z + I)
            }
            Atom::Log => {
                if z.norm() < 1e-300 {
                    return Err(MapError::OutsideDomain { at: z });
                }
                if z.im == 0.0 && z.re < 0.0 {
                    return Err(MapError::BranchAmbiguous { at: z });
                }
                z.ln()
            }
            Atom::Exp => z.exp(),
            Atom::Power { exponent } => {
                if z.norm() < 1e-300 {
                    if exponent > 0.0 {
                        return Ok(ZERO);
                    }
                    return Err(MapError::OutsideDomain { at: z });
                }
                if z.im == 0.0 && z.re < 0.0 && exponent.fract() != 0.0 {
                    return Err(MapError::BranchAmbiguous { at: z });
                }
                (exponent * z.ln()).exp()
            }
            Atom::Affine { scale, offset } => scale * z + offset,
            Atom::TwoLogCos => {
                let q = (TAU * I * z).exp();
                if (ONE + q).norm() < 1e-300 {
                    return Err(MapError::OutsideDomain { at: z });
                }
                -TAU * I * z - Complex::new(2.0 * std::f64::consts::LN_2, 0.0)
                    + 2.0 * clog1p(q)
            }
            Atom::CotGenerator => {
                let q = (TAU * I * z).exp();
                if (ONE - q).norm() < 1e-300 {
                    return Err(MapError::OutsideDomain { at: z });
                }
                I / TAU * (ONE + q) / (ONE - q)
            }
            Atom::ExpPeriodic => (TAU * I * z).exp(),
            Atom::SlantComb => {
                let q = (TAU * I * z).exp();
                if (ONE - q).norm() < 1e-300 {
                    return Err(MapError::OutsideDomain { at: z });
                }
                z - (ONE - I) / TAU * clog1p(-q)
            }
            Atom::HalfPlaneNotch => {
                let s = (z - ONE).sqrt() * (z + ONE).sqrt();
                let arg = z + s;
                if arg.norm() < 1e-300 {
                    return Err(MapError::OutsideDomain { at: z });
                }
                (s + arg.ln()) / std::f64::consts::PI
            }
            Atom::ShiftPlusExp { shift, amplitude } => z + shift + amplitude * (TAU * I * z).exp(),
            Atom::SinPeriodic => (TAU * z).sin(),
        })
    }

    fn deriv(&self, z: Complex) -> Result<Complex, MapError> {
        Ok(match *self {
            Atom::Cayley => {
                let den = ONE - z;
                if den.norm() < 1e-150 {
                    return Err(MapError::DerivativeSingular { at: z });
                }
                2.0 * I / (den * den)
            }
            Atom::InverseCayley => {
                let den = z + I;
                if den.norm() < 1e-150 {
                    return Err(MapError::DerivativeSingular { at: z });
                }
                2.0 * I / (den * den)
            }
            Atom::Log => {
                if z.norm() < 1e-300 {
                    return Err(MapError::DerivativeSingular { at: z });
                }
                ONE / z
            }
            Atom::Exp => z.exp(),
            Atom::Power { exponent } => {
                if z.norm() < 1e-300 {
                    return Err(MapError::DerivativeSingular { at: z });
                }
                Complex::new(exponent, 0.0) * ((exponent - 1.0) * z.ln()).exp()
            }
            Atom::Affine { scale, .. } => scale,
            Atom::TwoLogCos => {
                let q = (TAU * I * z).exp();
                let den = ONE + q;
                if den.norm() < 1e-150 {
                    return Err(MapError::DerivativeSingular { at: z });
                }
                -TAU * I * (ONE - q) / den
            }
            Atom::CotGenerator => {
                let q = (TAU * I * z).exp();
                let den = ONE - q;
                if den.norm() < 1e-150 {
                    return Err(MapError::DerivativeSingular { at: z });
                }
                -2.0 * q / (den * den)
            }
            Atom::ExpPeriodic => TAU * I * (TAU * I * z).exp(),
            Atom::SlantComb => {
                let q = (TAU * I * z).exp();
                let den = ONE - q;
                if den.norm() < 1e-150 {
                    return Err(MapError::DerivativeSingular { at: z });
                }
                ONE + (ONE + I) * q / den
            }
            Atom::HalfPlaneNotch => {
                let s = (z - ONE).sqrt() * (z + ONE).sqrt();
                if s.norm() < 1e-150 {
                    return Err(MapError::DerivativeSingular { at: z });
                }
                (z + ONE) / (std::f64::consts::PI * s)
            }
            Atom::ShiftPlusExp { amplitude, .. } => {
                ONE + amplitude * TAU * I * (TAU * I * z).exp()
            }
            Atom::SinPeriodic => TAU * (TAU * z).cos(),
        })
    }

    /// `atom(x) − atom(y)` given `d = x − y`, cancellation-free.
    fn diff(&self, x: Complex, y: Complex, d: Complex) -> Result<Complex, MapError> {
        Ok(match *self {
            Atom::Cayley => 2.0 * I * d / ((ONE - x) * (ONE - y)),
            Atom::InverseCayley => 2.0 * I * d / ((x + I) * (y + I)),
            Atom::Log => clog1p(d / y),
            Atom::Exp => y.exp() * cexpm1(d),
            Atom::Power { exponent } => {
                (exponent * y.ln()).exp() * cexpm1(exponent * clog1p(d / y))
            }
            Atom::Affine { scale, .. } => scale * d,
            Atom::TwoLogCos => {
                let qy = (TAU * I * y).exp();
                let dq = qy * cexpm1(TAU * I * d);
                -TAU * I * d + 2.0 * clog1p(dq / (ONE + qy))
            }
            Atom::CotGenerator => {
                let qx = (TAU * I * x).exp();
                let qy = (TAU * I * y).exp();
                let dq = qy * cexpm1(TAU * I * d);
                I / std::f64::consts::PI * dq / ((ONE - qx) * (ONE - qy))
            }
            Atom::ExpPeriodic => (TAU * I * y).exp() * cexpm1(TAU * I * d),
            Atom::SlantComb => {
                let qy = (TAU * I * y).exp();
                let dq = qy * cexpm1(TAU * I * d);
                d - (ONE - I) / TAU * clog1p(-dq / (ONE - qy))
            }
            Atom::HalfPlaneNotch => {
                let sx = (x - ONE).sqrt() * (x + ONE).sqrt();
                let sy = (y - ONE).sqrt() * (y + ONE).sqrt();
                let ds = (x + y) * d / (sx + sy);
                (ds + clog1p((d + ds) / (y + sy))) / std::f64::consts::PI
            }
            Atom::ShiftPlusExp { amplitude, .. } => {
                let qy = (TAU * I * y).exp();
                d + amplitude * qy * cexpm1(TAU * I * d)
            }
            Atom::SinPeriodic => {
                // sin A − sin B = 2 cos((A+B)/2) sin((A−B)/2), A−B = 2πd.
                let pi = std::f64::consts::PI;
                2.0 * (pi * (x + y)).cos() * (pi * d).sin()
            }
        })
    }

    /// Closed-form inverse where available; `None` means Newton.
    fn closed_inverse(&self, w: Complex, seed: Option<Complex>) -> Option<Result<Complex, MapError>> {
        match *self {
            Atom::Cayley => Some(Atom::InverseCayley.eval(w)),
            Atom::InverseCayley => Some(Atom::Cayley.eval(w)),
            Atom::Log => Some(Ok(w.exp())),
            Atom::Exp => Some(Self::branched_log(w, seed, TAU)),
            Atom::Power { exponent } => {
                if exponent == 0.0 {
                    return Some(Err(MapError::DerivativeSingular { at: w }));
                }
                Some(Self::branched_log(w, None, TAU).map(|ln| (ln / exponent).exp()))
            }
            Atom::Affine { scale, offset } => {
                if scale.norm() < 1e-300 {
                    return Some(Err(MapError::DerivativeSingular { at: w }));
                }
                Some(Ok((w - offset) / scale))
            }
            Atom::ExpPeriodic => {
                // w = e^{2πiz}: z = Log(w)/(2πi) + k, k from the seed.
                Some(Self::branched_log(w, None, TAU).map(|ln| {
                    let principal = ln / (TAU * I);
                    match seed {
                        Some(s) => principal + Complex::new((s.re - principal.re).round(), 0.0),
                        None => principal,
                    }
                }))
            }
            Atom::CotGenerator => {
                // (1+q)/(1−q) = −2πi·w ⇒ q = (R−1)/(R+1).
                let r = -TAU * I * w;
                let q = (r - ONE) / (r + ONE);
                if q.norm() < 1e-300 {
                    return Some(Err(MapError::OutsideDomain { at: w }));
                }
                Some(Self::branched_log(q, None, TAU).map(|ln| {
                    let principal = ln / (TAU * I);
                    match seed {
                        Some(s) => principal + Complex::new((s.re - principal.re).round(), 0.0),
                        None => principal,
                    }
                }))
            }
            _ => None,
        }
    }

    fn branched_log(w: Complex, seed: Option<Complex>, period: f64) -> Result<Complex, MapError> {
        if w.norm() < 1e-300 {
            return Err(MapError::OutsideDomain { at: w });
        }
        let principal = w.ln();
        match seed {
            Some(s) => {
                let k = ((s.im - principal.im) / period).round();
                Ok(principal + I * (period * k))
            }
            None => Ok(principal),
        }
    }
}

// ---------------------------------------------------------------------------
// The map union.
// ---------------------------------------------------------------------------

/// A holomorphic map.
///
/// The first five variants mirror the JSON map descriptor; the remaining
/// variants are composites that arise inside the linearization pipelines
/// (conjugation by a chart, Koenigs limits, logarithmic lifts, pushed
/// periodic maps, and generator flows) and serialize under their own tags.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "camelCase")]
pub enum HoloMap {
    /// A Möbius transformation.
    Mobius(Mobius),
    /// A closed-form atom.
    Atom(Atom),
    /// `outer ∘ inner`.
    Compose {
        /// Applied second.
        outer: Box<HoloMap>,
        /// Applied first.
        inner: Box<HoloMap>,
    },
    /// `z ↦ h⁻¹(h(z) + shift)` on the unit disc, with the declared image
    /// `Ω = h(𝔻)`; requires `Ω + shift ⊂ Ω`.
    #[serde(rename_all = "camelCase")]
    ModelMap {
        /// The Koenigs chart.
        h: Box<HoloMap>,
        /// Declared image of the chart.
        image: KoenigsDomain,
        /// Translation in the chart plane.
        shift: Complex,
    },
    /// The inverse of a map, evaluated by closed form or seeded Newton.
    InverseAtom {
        /// The map being inverted.
        of: Box<HoloMap>,
    },
    /// `chart⁻¹ ∘ inner ∘ chart`.
    Conjugate {
        /// Conjugating chart.
        chart: Box<HoloMap>,
        /// Map in chart coordinates.
        inner: Box<HoloMap>,
    },
    /// The Koenigs linearizer `lim λ⁻ⁿ f°ⁿ` of an elliptic map `f` with
    /// `f(0) = 0`, `f′(0) = λ`.
    #[serde(rename_all = "camelCase")]
    SchroederLimit {
        /// The elliptic map.
        f: Box<HoloMap>,
        /// Its multiplier at the origin.
        multiplier: Complex,
    },
    /// A holomorphic branch of `(2πi)⁻¹ log f(e^{2πiw})`, pinned by one
    /// base value and continued by quadrature of `E f′(E)/f(E)`.
    #[serde(rename_all = "camelCase")]
    LiftedLog {
        /// The downstairs map (univalent, fixing 0).
        f: Box<HoloMap>,
        /// Anchor point of the branch.
        base_point: Complex,
        /// Value at the anchor.
        base_value: Complex,
    },
    /// The map `ζ ↦ ζ·e^{2πi(g(w)−w)}`, `ζ = e^{2πiw}`, induced on the
    /// punctured disc by a 1-periodic-displacement map `g`; extends by 0.
    PushedPeriodic {
        /// The upstairs map with 1-periodic displacement.
        g: Box<HoloMap>,
    },
    /// Time-`time` flow of the autonomous field `z′ = generator(z)`.
    Flow {
        /// The vector field.
        generator: Box<HoloMap>,
        /// Flow time.
        time: f64,
    },
    /// Linear combination `z ↦ Σᵢ cᵢ·mᵢ(z)`.
    Sum {
        /// Weighted summands.
        terms: Vec<SumTerm>,
    },
    /// Scaled product `z ↦ coefficient·Πᵢ mᵢ(z)`.
    Product {
        /// Overall scalar factor.
        coefficient: Complex,
        /// The factors.
        factors: Vec<HoloMap>,
    },
}

/// One weighted summand of a [`HoloMap::Sum`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SumTerm {
    /// Scalar weight.
    pub coefficient: Complex,
    /// The map being weighted.
    pub map: HoloMap,
}

/// Height at which periodic quantities reach their limit values to machine
/// precision (`|e^{2πiw}|` is about `4·10⁻¹⁷` at `Im w = 6`).
pub const LIMIT_SAMPLING_HEIGHT: f64 = 6.0;

impl HoloMap {
    /// Wraps an atom.
    pub fn atom(a: Atom) -> Self {
        HoloMap::Atom(a)
    }

    /// Composition `outer ∘ inner`.
    pub fn compose(outer: HoloMap, inner: HoloMap) -> Self {
        HoloMap::Compose { outer: Box::new(outer), inner: Box::new(inner) }
    }

    /// Builds a model map after verifying that the shift translates the
    /// image into itself.
    pub fn model_map(
        h: HoloMap,
        image: KoenigsDomain,
        shift: Complex,
    ) -> Result<Self, MapError> {
        match image.contains_translate(shift) {
            Ok(true) => Ok(HoloMap::ModelMap { h: Box::new(h), image, shift }),
            Ok(false) => Err(MapError::ShiftNotAdmissible { shift }),
            Err(e) => Err(MapError::Geometry(e)),
        }
    }

    /// The inverse map.
    pub fn inverse(of: HoloMap) -> Self {
        HoloMap::InverseAtom { of: Box::new(of) }
    }

    /// `chart⁻¹ ∘ inner ∘ chart`.
    pub fn conjugate(chart: HoloMap, inner: HoloMap) -> Self {
        HoloMap::Conjugate { chart: Box::new(chart), inner: Box::new(inner) }
    }

    /// Identity map.
    pub fn identity() -> Self {
        HoloMap::Atom(Atom::Affine { scale: ONE, offset: ZERO })
    }

    /// Linear combination `Σ cᵢ·mᵢ`.
    pub fn sum(terms: Vec<(Complex, HoloMap)>) -> Self {
        HoloMap::Sum {
            terms: terms
                .into_iter()
                .map(|(coefficient, map)| SumTerm { coefficient, map })
                .collect(),
        }
    }

    /// Scaled product `coefficient·Π mᵢ`.
    pub fn product(coefficient: Complex, factors: Vec<HoloMap>) -> Self {
        HoloMap::Product { coefficient, factors }
    }

    /// Value of the map at `z`.
    pub fn eval(&self, z: Complex, ctx: &BranchContext) -> Result<Complex, MapError> {
        match self {
            HoloMap::Mobius(m) => {
                let den = m.c * z + m.d;
                if den.norm() < 1e-300 {
                    return Err(MapError::OutsideDomain { at: z });
                }
                Ok(m.apply(z))
            }
            HoloMap::Atom(a) => a.eval(z),
            HoloMap::Compose { outer, inner } => outer.eval(inner.eval(z, ctx)?, ctx),
            HoloMap::ModelMap { h, shift, .. } => {
                if z.norm() > 1.0 + 1e-9 {
                    return Err(MapError::OutsideDomain { at: z });
                }
                let w = h.eval(z, ctx)?;
                let target = w + shift;
                h.solve_with_seeds(target, ctx, &model_seed_ladder(z, ctx))
                    .or_else(|e| model_continuation(h, w, *shift, z, ctx).map_err(|_| e))
            }
            HoloMap::InverseAtom { of } => of.solve(z, ctx),
            HoloMap::Conjugate { chart, inner } => {
                let upstairs = inner.eval(chart.eval(z, ctx)?, ctx)?;
                match chart.as_ref() {
                    // Inverting an inverse chart is a forward evaluation.
                    HoloMap::InverseAtom { of } => of.eval(upstairs, ctx),
                    _ => chart.solve_with_seeds(upstairs, ctx, &model_seed_ladder(z, ctx)),
                }
            }
            HoloMap::SchroederLimit { f, multiplier } => {
                let (value, _) = schroeder_limit_pair(f, *multiplier, z, None, ctx)?;
                Ok(value)
            }
            HoloMap::LiftedLog { f, base_point, base_value } => {
                let integral = lifted_log_integral(f, *base_point, z, ctx)?;
                Ok(base_value + integral)
            }
            HoloMap::PushedPeriodic { g } => {
                if z.norm() < 1e-300 {
                    return Ok(ZERO);
                }
                let w = z.ln() / (TAU * I);
                let disp = g.displacement(w, ctx)?;
                Ok(z * (TAU * I * disp).exp())
            }
            HoloMap::Flow { generator, time } => {
                Ok(z + flow_displacement(generator, *time, z, ctx)?)
            }
            HoloMap::Sum { terms } => {
                let mut acc = ZERO;
                for t in terms {
                    acc += t.coefficient * t.map.eval(z, ctx)?;
                }
                Ok(acc)
            }
            HoloMap::Product { coefficient, factors } => {
                let mut acc = *coefficient;
                for f in factors {
                    acc *= f.eval(z, ctx)?;
                }
                Ok(acc)
            }
        }
    }

    /// Complex derivative at `z` (closed form through the chain rule; model
    /// maps use `φ′ = h′(z)/h′(φ(z))`, flows the variational equation).
    pub fn deriv(&self, z: Complex, ctx: &BranchContext) -> Result<Complex, MapError> {
        match self {
            HoloMap::Mobius(m) => {
                let den = m.c * z + m.d;
                if den.norm() < 1e-150 {
                    return Err(MapError::DerivativeSingular { at: z });
                }
                Ok(m.derivative(z))
            }
            HoloMap::Atom(a) => a.deriv(z),
            HoloMap::Compose { outer, inner } => {
                let iz = inner.eval(z, ctx)?;
                Ok(outer.deriv(iz, ctx)? * inner.deriv(z, ctx)?)
            }
            HoloMap::ModelMap { h, .. } => {
                let phi_z = self.eval(z, ctx)?;
                let d_num = h.deriv(z, ctx)?;
                let d_den = h.deriv(phi_z, ctx)?;
                if d_den.norm() < 1e-150 {
                    return Err(MapError::DerivativeSingular { at: phi_z });
                }
                Ok(d_num / d_den)
            }
            HoloMap::InverseAtom { of } => {
                let w = of.solve(z, ctx)?;
                let d = of.deriv(w, ctx)?;
                if d.norm() < 1e-150 {
                    return Err(MapError::DerivativeSingular { at: w });
                }
                Ok(ONE / d)
            }
            HoloMap::Conjugate { chart, inner } => {
                let cz = chart.eval(z, ctx)?;
                let phi_z = self.eval(z, ctx)?;
                let d_den = chart.deriv(phi_z, ctx)?;
                if d_den.norm() < 1e-150 {
                    return Err(MapError::DerivativeSingular { at: phi_z });
                }
                Ok(inner.deriv(cz, ctx)? * chart.deriv(z, ctx)? / d_den)
            }
            HoloMap::SchroederLimit { f, multiplier } => {
                // h₀′ = lim λ⁻ⁿ ∏ f′(aₖ), accumulated alongside the orbit.
                let mut a = z;
                let mut p = ONE;
                let mut prev = p;
                for n in 0..10_000 {
                    p *= f.deriv(a, ctx)? / multiplier;
                    a = f.eval(a, ctx)?;
                    if n > 2 && (p - prev).norm() <= 1e-13 * p.norm().max(1.0) {
                        return Ok(p);
                    }
                    prev = p;
                }
                Err(MapError::NoConvergence("Koenigs derivative product".into()))
            }
            HoloMap::LiftedLog { f, .. } => lifted_log_derivative(f, z, ctx),
            HoloMap::PushedPeriodic { g } => {
                if z.norm() < 1e-300 {
                    // f′(0) = limit of e^{2πi·disp} high in the half-plane.
                    let w = Complex::new(0.0, LIMIT_SAMPLING_HEIGHT);
                    let disp = g.displacement(w, ctx)?;
                    return Ok((TAU * I * disp).exp());
                }
                let w = z.ln() / (TAU * I);
                let disp = g.displacement(w, ctx)?;
                Ok((TAU * I * disp).exp() * g.deriv(w, ctx)?)
            }
            HoloMap::Flow { generator, time } => {
                // Variational equation y′ = G′(Φₜ(z))·y along the orbit.
                let g = generator;
                let rhs = |_t: f64, y: &[Complex]| -> Result<Vec<Complex>, MapError> {
                    Ok(vec![g.eval(y[0], ctx)?, g.deriv(y[0], ctx)? * y[1]])
                };
                let out = integrate_ode(rhs, time.abs(), &[z, ONE], &flow_opts(*time))?;
                Ok(out[1])
            }
            HoloMap::Sum { terms } => {
                let mut acc = ZERO;
                for t in terms {
                    acc += t.coefficient * t.map.deriv(z, ctx)?;
                }
                Ok(acc)
            }
            HoloMap::Product { coefficient, factors } => {
                // Product rule: Σᵢ mᵢ′·Π_{j≠i} mⱼ.
                let values: Vec<Complex> = factors
                    .iter()
                    .map(|f| f.eval(z, ctx))
                    .collect::<Result<_, _>>()?;
                let mut acc = ZERO;
                for (i, f) in factors.iter().enumerate() {
                    let mut term = f.deriv(z, ctx)?;
                    for (j, v) in values.iter().enumerate() {
                        if j != i {
                            term *= v;
                        }
                    }
                    acc += term;
                }
                Ok(coefficient * acc)
            }
        }
    }

    /// `m(z) − z` without cancellation.
    ///
    /// Variants that are structurally close to the identity (model maps,
    /// conjugates, flows, periodic perturbations) compute the displacement
    /// directly in the difference variable; everything else falls back to
    /// factored or plain evaluation.
    pub fn displacement(&self, z: Complex, ctx: &BranchContext) -> Result<Complex, MapError> {
        match self {
            HoloMap::Mobius(m) => {
                let den = m.c * z + m.d;
                if den.norm() < 1e-300 {
                    return Err(MapError::OutsideDomain { at: z });
                }
                Ok(m.displacement(z))
            }
            HoloMap::Atom(Atom::ShiftPlusExp { shift, amplitude }) => {
                Ok(shift + amplitude * (TAU * I * z).exp())
            }
            HoloMap::Atom(Atom::Affine { scale, offset }) => Ok((scale - ONE) * z + offset),
            HoloMap::Compose { outer, inner } => {
                // m(z) − z = [outer(y) − y] + [inner(z) − z], y = inner(z).
                let di = inner.displacement(z, ctx)?;
                let y = z + di;
                Ok(outer.displacement(y, ctx)? + di)
            }
            HoloMap::ModelMap { h, shift, .. } => {
                solve_difference(h, z, *shift, shift / h.deriv(z, ctx)?, ctx)
            }
            HoloMap::Conjugate { chart, inner } => {
                if let HoloMap::InverseAtom { of } = chart.as_ref() {
                    // chart⁻¹ = of: the displacement is a plain stable
                    // difference of the forward map, no Newton needed.
                    let x = of.solve(z, ctx)?;
                    let dx = inner.displacement(x, ctx)?;
                    return of.diff_eval(x + dx, x, dx, ctx);
                }
                let cz = chart.eval(z, ctx)?;
                let target = inner.displacement(cz, ctx)?;
                solve_difference(chart, z, target, target / chart.deriv(z, ctx)?, ctx)
            }
            HoloMap::InverseAtom { of } => {
                let target = -of.displacement(z, ctx)?;
                solve_difference(of, z, target, target / of.deriv(z, ctx)?, ctx)
            }
            HoloMap::Sum { terms } => {
                // Σ cᵢ·mᵢ(z) − z = Σ cᵢ·(mᵢ(z) − z) + (Σ cᵢ − 1)·z.
                let mut acc = ZERO;
                let mut coeff_sum = ZERO;
                for t in terms {
                    acc += t.coefficient * t.map.displacement(z, ctx)?;
                    coeff_sum += t.coefficient;
                }
                Ok(acc + (coeff_sum - ONE) * z)
            }
            HoloMap::PushedPeriodic { .. } => {
                if z.norm() < 1e-300 {
                    return Ok(ZERO);
                }
                let HoloMap::PushedPeriodic { g } = self else { unreachable!() };
                let w = z.ln() / (TAU * I);
                let disp = g.displacement(w, ctx)?;
                Ok(z * cexpm1(TAU * I * disp))
            }
            HoloMap::Flow { generator, time } => flow_displacement(generator, *time, z, ctx),
            HoloMap::LiftedLog { f, base_point, base_value } => {
                // F(w) − w = (F₀ − w₀) + ∫ (G − 1), with G − 1 = O(E²) high
                // in the half-plane.
                let anchor = base_value - base_point;
                let integral = lifted_log_relative_integral(f, *base_point, z, ctx)?;
                Ok(anchor + integral)
            }
            _ => Ok(self.eval(z, ctx)? - z),
        }
    }

    /// `m(x) − m(y)` given the exact difference `d = x − y`.
    pub fn diff_eval(
        &self,
        x: Complex,
        y: Complex,
        d: Complex,
        ctx: &BranchContext,
    ) -> Result<Complex, MapError> {
        match self {
            HoloMap::Mobius(m) => Ok(m.diff(x, y, d)),
            HoloMap::Atom(a) => a.diff(x, y, d),
            HoloMap::Compose { outer, inner } => {
                let iy = inner.eval(y, ctx)?;
                let di = inner.diff_eval(x, y, d, ctx)?;
                outer.diff_eval(iy + di, iy, di, ctx)
            }
            HoloMap::ModelMap { h, .. } => {
                let target = h.diff_eval(x, y, d, ctx)?;
                let phi_y = self.eval(y, ctx)?;
                solve_difference(h, phi_y, target, target / h.deriv(phi_y, ctx)?, ctx)
            }
            HoloMap::Conjugate { chart, inner } => {
                if let HoloMap::InverseAtom { of } = chart.as_ref() {
                    // m = of ∘ inner ∘ of⁻¹: one difference-Newton downstairs
                    // and stable forward differences back up.
                    let uy = of.solve(y, ctx)?;
                    let du = solve_difference(of, uy, d, d / of.deriv(uy, ctx)?, ctx)?;
                    let py = inner.eval(uy, ctx)?;
                    let dp = inner.diff_eval(uy + du, uy, du, ctx)?;
                    return of.diff_eval(py + dp, py, dp, ctx);
                }
                let cy = chart.eval(y, ctx)?;
                let dc = chart.diff_eval(x, y, d, ctx)?;
                let target = inner.diff_eval(cy + dc, cy, dc, ctx)?;
                let phi_y = self.eval(y, ctx)?;
                solve_difference(chart, phi_y, target, target / chart.deriv(phi_y, ctx)?, ctx)
            }
            HoloMap::InverseAtom { of } => {
                let phi_y = of.solve(y, ctx)?;
                solve_difference(of, phi_y, d, d / of.deriv(phi_y, ctx)?, ctx)
            }
            HoloMap::SchroederLimit { f, multiplier } => {
                let (_, diff) = schroeder_limit_pair(f, *multiplier, y, Some((x, d)), ctx)?;
                Ok(diff)
            }
            HoloMap::LiftedLog { f, .. } => {
                // Straight-segment quadrature of the derivative between the
                // two points; the integral inherits the size of d.
                let g = |u: Complex| lifted_log_derivative(f, u, ctx);
                Ok(crate::num::integrate_segment(g, y, x, 1e-13)?)
            }
            HoloMap::PushedPeriodic { g } => {
                if y.norm() < 1e-300 || x.norm() < 1e-300 {
                    return Ok(self.eval(x, ctx)? - self.eval(y, ctx)?);
                }
                let wx = x.ln() / (TAU * I);
                let wy = y.ln() / (TAU * I);
                let dw = clog1p(d / y) / (TAU * I);
                let disp_y = g.displacement(wy, ctx)?;
                let ddisp = g.diff_eval(wx, wy, dw, ctx)? - dw;
                let fy_factor = (TAU * I * disp_y).exp();
                // f(x) − f(y) = e^{2πiD(y)}·[x·(e^{2πiΔD} − 1) + d·e^{2πiΔD}] …
                // regrouped to keep every term difference-sized.
                Ok(fy_factor * (x * cexpm1(TAU * I * ddisp) + d * (TAU * I * ddisp).exp()))
            }
            HoloMap::Flow { generator, time } => {
                // δ′ = G(b + δ) − G(b) along the companion trajectory b.
                let g = generator;
                let rhs = |_t: f64, s: &[Complex]| -> Result<Vec<Complex>, MapError> {
                    let b = s[0];
                    let delta = s[1];
                    Ok(vec![g.eval(b, ctx)?, g.diff_eval(b + delta, b, delta, ctx)?])
                };
                let out = integrate_ode(rhs, time.abs(), &[y, d], &flow_opts(*time))?;
                Ok(out[1])
            }
            HoloMap::Sum { terms } => {
                let mut acc = ZERO;
                for t in terms {
                    acc += t.coefficient * t.map.diff_eval(x, y, d, ctx)?;
                }
                Ok(acc)
            }
            HoloMap::Product { coefficient, factors } => {
                // Telescoping: P(x) − P(y) = Σᵢ (Π_{j<i} vⱼ(x))·Δᵢ·(Π_{j>i} vⱼ(y)).
                let vx: Vec<Complex> = factors
                    .iter()
                    .map(|f| f.eval(x, ctx))
                    .collect::<Result<_, _>>()?;
                let vy: Vec<Complex> = factors
                    .iter()
                    .map(|f| f.eval(y, ctx))
                    .collect::<Result<_, _>>()?;
                let mut acc = ZERO;
                for (i, f) in factors.iter().enumerate() {
                    let mut term = f.diff_eval(x, y, d, ctx)?;
                    for v in &vx[..i] {
                        term *= v;
                    }
                    for v in &vy[i + 1..] {
                        term *= v;
                    }
                    acc += term;
                }
                Ok(coefficient * acc)
            }
        }
    }

    /// Solves `m(w) = target` for `w` (closed form where possible, else
    /// damped Newton from the branch-context seed).
    pub fn solve(&self, target: Complex, ctx: &BranchContext) -> Result<Complex, MapError> {
        match self {
            HoloMap::Mobius(m) => {
                let inv = m.inverse();
                let den = inv.c * target + inv.d;
                if den.norm() < 1e-300 {
                    return Err(MapError::OutsideDomain { at: target });
                }
                Ok(inv.apply(target))
            }
            HoloMap::Atom(a) => match a.closed_inverse(target, ctx.seed) {
                Some(r) => r,
                None => self.solve_with_seeds(target, ctx, &newton_seed_ladder(a, target, ctx)),
            },
            HoloMap::Compose { outer, inner } => {
                // The branch seed lives in the source space; the outer solve
                // needs its image under `inner`.
                let mut octx = *ctx;
                if let Some(s) = ctx.seed {
                    octx.seed = inner.eval(s, ctx).ok();
                }
                let mid = outer.solve(target, &octx)?;
                inner.solve(mid, ctx)
            }
            HoloMap::InverseAtom { of } => of.eval(target, ctx),
            HoloMap::Flow { generator, time } => {
                // Exact inverse: flow backwards.
                Ok(target
                    + flow_displacement(
                        &HoloMap::Atom(Atom::Affine { scale: -ONE, offset: ZERO })
                            .compose_onto(generator),
                        *time,
                        target,
                        ctx,
                    )?)
            }
            _ => {
                let seeds = match ctx.seed {
                    Some(s) => vec![s, target],
                    None => vec![target],
                };
                self.solve_with_seeds(target, ctx, &seeds)
            }
        }
    }

    fn compose_onto(self, inner: &HoloMap) -> HoloMap {
        HoloMap::Compose { outer: Box::new(self), inner: Box::new(inner.clone()) }
    }

    /// Newton inversion trying a ladder of seeds in order.
    ///
    /// The certification tolerance is `tolerance_abs` for order-one
    /// targets and scales with `|target|` beyond, since chart values grow
    /// without bound along orbits; ulp-stagnated iterates within `10⁻⁹`
    /// of the (scaled) target are accepted.
    fn solve_with_seeds(
        &self,
        target: Complex,
        ctx: &BranchContext,
        seeds: &[Complex],
    ) -> Result<Complex, MapError> {
        let scale = target.norm().max(1.0);
        let tol = ctx.tolerance_abs * scale;
        let lenient = 1e-9 * scale;
        let mut best: Option<(Complex, f64)> = None;
        for &seed in seeds {
            let attempt = damped_newton_best(
                |w| -> Result<(Complex, Complex), MapError> {
                    Ok((self.eval(w, ctx)? - target, self.deriv(w, ctx)?))
                },
                seed,
                tol,
                ctx.max_newton_steps,
            );
            if let Ok((w, residual, _)) = attempt {
                if residual <= tol {
                    return Ok(w);
                }
                if best.map(|(_, r)| residual < r).unwrap_or(true) {
                    best = Some((w, residual));
                }
            }
        }
        match best {
            Some((w, residual)) if residual <= lenient => Ok(w),
            Some((_, residual)) => Err(MapError::NewtonDiverged { residual }),
            None => Err(MapError::NewtonDiverged { residual: f64::INFINITY }),
        }
    }

    /// Orbit `z, m(z), …, m°ⁿ(z)`; the branch seed follows the orbit so
    /// chart inversions stay on the continued branch.
    pub fn iterate(
        &self,
        z: Complex,
        n: usize,
        ctx: &BranchContext,
    ) -> Result<Vec<Complex>, MapError> {
        let mut orbit = Vec::with_capacity(n + 1);
        orbit.push(z);
        let mut local = *ctx;
        let mut current = z;
        for _ in 0..n {
            local.seed = Some(current);
            current = self.eval(current, &local)?;
            orbit.push(current);
        }
        Ok(orbit)
    }

    /// Richardson-extrapolated angular derivative at a boundary fixed point
    /// `τ`: the limit of `(m(z) − m(τ))/(z − τ)` along `z = τ·r` for the
    /// radii in `ladder` (default `1 − 10⁻ᵏ`, `k = 2..6`).
    pub fn angular_derivative(
        &self,
        tau: Complex,
        ladder: Option<&[f64]>,
        ctx: &BranchContext,
    ) -> Result<Extrapolated, MapError> {
        let default_ladder: Vec<f64> = (2..=6).map(|k| 1.0 - 10f64.powi(-k)).collect();
        let radii = ladder.unwrap_or(&default_ladder);
        let mut steps = Vec::with_capacity(radii.len());
        let mut ratios = Vec::with_capacity(radii.len());
        for &r in radii {
            let z = tau * r;
            let d = tau * (r - 1.0); // exact: z − τ
            let num = self.diff_eval(z, tau, d, ctx)?;
            steps.push(1.0 - r);
            ratios.push(num / d);
        }
        Ok(neville_extrapolate(&steps, &ratios)?)
    }
}

/// Seed ladder for chart inversions: the context seed, the point itself,
/// and radial bisections toward the origin (cold start).
fn model_seed_ladder(z: Complex, ctx: &BranchContext) -> Vec<Complex> {
    let mut seeds = vec![];
    if let Some(s) = ctx.seed {
        seeds.push(s);
    }
    seeds.push(z);
    seeds.push(z * 0.5);
    seeds.push(z * 0.25);
    seeds.push(ZERO);
    seeds
}

/// Chart inversion for model-map targets too far for a single Newton solve:
/// walks `h⁻¹` along a path from `w` to `w + shift` in sub-unit steps,
/// seeding each leg from the previous preimage.
///
/// The straight segment is tried first. Should it cross a blocker of the
/// image domain, a detour through high altitude is attempted instead —
/// admissible shifts keep vertical translates of comb- and notch-type
/// domains inside themselves, so the detour legs stay solvable there.
fn model_continuation(
    h: &HoloMap,
    w: Complex,
    shift: Complex,
    seed: Complex,
    ctx: &BranchContext,
) -> Result<Complex, MapError> {
    let try_path = |waypoints: &[Complex]| -> Result<Complex, MapError> {
        let mut current = seed;
        let mut local = *ctx;
        for &target in waypoints {
            local.seed = Some(current);
            current = h.solve_with_seeds(target, &local, &model_seed_ladder(current, &local))?;
        }
        Ok(current)
    };
    let segment = |a: Complex, b: Complex, out: &mut Vec<Complex>| {
        let n = ((b - a).norm() / 0.5).ceil().max(1.0) as usize;
        for k in 1..=n {
            out.push(a + (b - a) * (k as f64 / n as f64));
        }
    };
    let mut straight = Vec::new();
    segment(w, w + shift, &mut straight);
    if let Ok(x) = try_path(&straight) {
        return Ok(x);
    }
    let lift = Complex::new(0.0, shift.norm() + 1.0);
    let mut detour = Vec::new();
    segment(w, w + lift, &mut detour);
    segment(w + lift, w + shift + lift, &mut detour);
    segment(w + shift + lift, w + shift, &mut detour);
    try_path(&detour)
}

/// Heuristic seeds for Newton inversion of transcendental atoms.
fn newton_seed_ladder(atom: &Atom, target: Complex, ctx: &BranchContext) -> Vec<Complex> {
    let mut seeds = vec![];
    if let Some(s) = ctx.seed {
        seeds.push(s);
    }
    match atom {
        // h(w) ≈ (w + Log 2w)/π for large w.
        Atom::HalfPlaneNotch => {
            let guess = std::f64::consts::PI * target;
            seeds.push(guess);
            seeds.push(guess + I);
            seeds.push(2.0 * I);
        }
        // F(w) ≈ w high in the half-plane.
        Atom::SlantComb => {
            seeds.push(target);
            seeds.push(target + I);
        }
        // h(w) ≈ −2πi w − 2 ln 2 high in the half-plane.
        Atom::TwoLogCos => {
            seeds.push((target + Complex::new(2.0 * std::f64::consts::LN_2, 0.0)) / (-TAU * I));
        }
        Atom::ShiftPlusExp { shift, .. } => {
            seeds.push(target - shift);
        }
        _ => {
            seeds.push(target);
        }
    }
    seeds
}

/// Newton in the difference variable: solves
/// `chart(base + δ) − chart(base) = target` for `δ` using the stable
/// difference evaluation, so `δ` carries full absolute accuracy even when
/// it is tiny.  The residual target scales with `|target|`; iterates that
/// stagnate at the ulp floor are accepted within `10⁻⁸` relative.
fn solve_difference(
    chart: &HoloMap,
    base: Complex,
    target: Complex,
    delta0: Complex,
    ctx: &BranchContext,
) -> Result<Complex, MapError> {
    let scale = target.norm().max(1e-30);
    let (delta, residual, _) = damped_newton_best(
        |delta| -> Result<(Complex, Complex), MapError> {
            let fd = chart.diff_eval(base + delta, base, delta, ctx)? - target;
            let dd = chart.deriv(base + delta, ctx)?;
            Ok((fd, dd))
        },
        delta0,
        (ctx.tolerance_abs * 1e-2 + 1e-16) * scale,
        ctx.max_newton_steps,
    )?;
    if residual <= 1e-8 * scale {
        Ok(delta)
    } else {
        Err(MapError::NewtonDiverged { residual })
    }
}

/// Koenigs limit and, optionally, the stable difference of two limits.
fn schroeder_limit_pair(
    f: &HoloMap,
    lambda: Complex,
    y: Complex,
    pair: Option<(Complex, Complex)>,
    ctx: &BranchContext,
) -> Result<(Complex, Complex), MapError> {
    let mut a = y;
    let mut scale = ONE;
    let mut prev_value = y;
    let mut d = pair.map(|(_, d0)| d0).unwrap_or(ZERO);
    let mut b = pair.map(|(x, _)| x).unwrap_or(y);
    let mut prev_diff = d;
    for n in 0..10_000 {
        // One more iteration of both orbits and the difference recursion.
        if pair.is_some() {
            d = f.diff_eval(b, a, d, ctx)? / lambda;
            b = f.eval(b, ctx)?;
        }
        a = f.eval(a, ctx)?;
        scale /= lambda;
        let value = a * scale;
        let diff = d * scale * lambda; // d already divided by λ this step
        let settled_v = (value - prev_value).norm() <= 1e-13 * value.norm().max(1e-3);
        let settled_d = pair.is_none() || (diff - prev_diff).norm() <= 1e-13 * diff.norm().max(1e-16);
        if n > 2 && settled_v && settled_d {
            return Ok((value, diff));
        }
        prev_value = value;
        prev_diff = diff;
    }
    Err(MapError::NoConvergence("Koenigs limit".into()))
}

fn flow_opts(_time: f64) -> OdeOptions<'static> {
    OdeOptions { rel_tol: 1e-11, abs_tol: 1e-13, max_step: 0.1, guard: None }
}

/// Displacement `Φₜ(z) − z` of a generator flow, integrated directly in the
/// difference variable `d′ = G(z + d)`.
fn flow_displacement(
    generator: &HoloMap,
    time: f64,
    z: Complex,
    ctx: &BranchContext,
) -> Result<Complex, MapError> {
    if time == 0.0 {
        return Ok(ZERO);
    }
    let signed = |v: Complex| if time >= 0.0 { v } else { -v };
    let rhs = |_t: f64, s: &[Complex]| -> Result<Vec<Complex>, MapError> {
        Ok(vec![signed(generator.eval(z + s[0], ctx)?)])
    };
    let out = integrate_ode(rhs, time.abs(), &[ZERO], &flow_opts(time))?;
    Ok(out[0])
}

/// Derivative `E f′(E)/f(E)` of a logarithmic lift, `E = e^{2πiw}`.
fn lifted_log_derivative(
    f: &HoloMap,
    w: Complex,
    ctx: &BranchContext,
) -> Result<Complex, MapError> {
    let e = (TAU * I * w).exp();
    let fe = f.eval(e, ctx)?;
    if fe.norm() < 1e-300 {
        return Err(MapError::DerivativeSingular { at: w });
    }
    Ok(e * f.deriv(e, ctx)? / fe)
}

/// Safe quadrature path between two points of the upper half-plane: rise to
/// the reference height, travel horizontally, descend.
fn lift_path(from: Complex, to: Complex) -> Vec<Complex> {
    let h = LIMIT_SAMPLING_HEIGHT / 2.0;
    let lift_im = from.im.max(to.im).max(h);
    vec![
        from,
        Complex::new(from.re, lift_im),
        Complex::new(to.re, lift_im),
        to,
    ]
}

fn lifted_log_integral(
    f: &HoloMap,
    from: Complex,
    to: Complex,
    ctx: &BranchContext,
) -> Result<Complex, MapError> {
    let path = lift_path(from, to);
    Ok(integrate_path(|u| lifted_log_derivative(f, u, ctx), &path, 1e-12)?)
}

/// Integral of `G − 1` along the lift path (each term difference-sized).
fn lifted_log_relative_integral(
    f: &HoloMap,
    from: Complex,
    to: Complex,
    ctx: &BranchContext,
) -> Result<Complex, MapError> {
    let path = lift_path(from, to);
    let g = |u: Complex| -> Result<Complex, MapError> {
        let e = (TAU * I * u).exp();
        let fe = f.eval(e, ctx)?;
        if fe.norm() < 1e-300 {
            return Err(MapError::DerivativeSingular { at: u });
        }
        // E f′(E) − f(E) is O(E²): both terms are O(E), so the subtraction
        // loses nothing that matters at the scale of the quotient.
        Ok((e * f.deriv(e, ctx)? - fe) / fe)
    };
    Ok(integrate_path(g, &path, 1e-12)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{BaseSpace, KoenigsDomain};

    fn ctx() -> BranchContext {
        BranchContext::default()
    }

    fn cplx(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn upper_half_plane() -> KoenigsDomain {
        KoenigsDomain::new(BaseSpace::UpperHalfPlane, vec![]).unwrap()
    }

    #[test]
    fn cayley_values() {
        let c = HoloMap::Atom(Atom::Cayley);
        let v = c.eval(ZERO, &ctx()).unwrap();
        assert!((v - I).norm() < 1e-15);
        let d = c.deriv(ZERO, &ctx()).unwrap();
        assert!((d - 2.0 * I).norm() < 1e-15);
    }

    #[test]
    fn disc_translation_matches_oracle() {
        // Cayley⁻¹ ∘ (w ↦ w+1) ∘ Cayley at 0 equals (1−2i)/5.
        let m = Mobius::disc_translation(ONE);
        let v = m.apply(ZERO);
        assert!((v - cplx(0.2, -0.4)).norm() < 1e-14, "got {v}");
    }

    #[test]
    fn model_map_equals_mobius_composition() {
        let image = upper_half_plane();
        let model =
            HoloMap::model_map(HoloMap::Atom(Atom::Cayley), image, ONE).unwrap();
        let v = model.eval(ZERO, &ctx()).unwrap();
        assert!((v - cplx(0.2, -0.4)).norm() < 1e-12, "got {v}");
    }

    #[test]
    fn model_map_rejects_bad_shift() {
        let image = upper_half_plane();
        let r = HoloMap::model_map(HoloMap::Atom(Atom::Cayley), image, cplx(0.0, -1.0));
        assert!(matches!(r, Err(MapError::ShiftNotAdmissible { .. })));
    }

    #[test]
    fn hyperbolic_derivative_at_interior_point() {
        // Cayley⁻¹ ∘ (w ↦ 2w) ∘ Cayley = (3z+1)/(z+3): φ′(0) = 8/9.
        let m = Mobius::disc_dilation(2.0);
        let hm = HoloMap::Mobius(m);
        let d = hm.deriv(ZERO, &ctx()).unwrap();
        assert!((d - cplx(8.0 / 9.0, 0.0)).norm() < 1e-12, "got {d}");
        // Cross-check with a central difference.
        let h = 1e-5;
        let fd = (hm.eval(cplx(h, 0.0), &ctx()).unwrap()
            - hm.eval(cplx(-h, 0.0), &ctx()).unwrap())
            / (2.0 * h);
        assert!((d - fd).norm() < 1e-8);
    }

    #[test]
    fn inverse_roundtrip_on_grid() {
        let maps = [
            HoloMap::Atom(Atom::Cayley),
            HoloMap::Atom(Atom::Exp),
            HoloMap::Mobius(Mobius::disc_dilation(3.0)),
            HoloMap::Atom(Atom::SlantComb),
        ];
        for m in &maps {
            let inv = HoloMap::inverse(m.clone());
            for &z in &[cplx(0.3, 0.4), cplx(-0.2, 0.1), cplx(0.1, 0.8)] {
                let w = m.eval(z, &ctx()).unwrap();
                let back = inv.eval(w, &BranchContext::with_seed(z)).unwrap();
                assert!((back - z).norm() < 1e-10, "roundtrip {m:?} at {z}");
            }
        }
    }

    #[test]
    fn model_map_composition_law() {
        let image = upper_half_plane();
        let h = HoloMap::Atom(Atom::Cayley);
        let m1 = HoloMap::model_map(h.clone(), image.clone(), ONE).unwrap();
        let m2 = HoloMap::model_map(h.clone(), image.clone(), cplx(0.0, 1.0)).unwrap();
        let m12 = HoloMap::model_map(h, image, cplx(1.0, 1.0)).unwrap();
        for &z in &[ZERO, cplx(0.5, 0.2), cplx(-0.3, -0.6)] {
            let a = m1.eval(m2.eval(z, &ctx()).unwrap(), &ctx()).unwrap();
            let b = m12.eval(z, &ctx()).unwrap();
            assert!((a - b).norm() < 1e-10, "composition law at {z}");
        }
    }

    #[test]
    fn iterate_matches_single_shift() {
        let image = upper_half_plane();
        let h = HoloMap::Atom(Atom::Cayley);
        let m1 = HoloMap::model_map(h.clone(), image.clone(), ONE).unwrap();
        let m5 = HoloMap::model_map(h, image, cplx(5.0, 0.0)).unwrap();
        let orbit = m1.iterate(cplx(0.1, 0.2), 5, &ctx()).unwrap();
        assert_eq!(orbit.len(), 6);
        let direct = m5.eval(cplx(0.1, 0.2), &ctx()).unwrap();
        assert!((orbit[5] - direct).norm() < 1e-10);
        // n = 0 returns the point itself.
        let o0 = m1.iterate(cplx(0.1, 0.2), 0, &ctx()).unwrap();
        assert_eq!(o0, vec![cplx(0.1, 0.2)]);
    }

    #[test]
    fn parabolic_orbit_approaches_denjoy_wolff() {
        let m = HoloMap::Mobius(Mobius::disc_translation(ONE));
        let orbit = m.iterate(ZERO, 1000, &ctx()).unwrap();
        let last = orbit[1000];
        assert!((last - ONE).norm() < 1e-2, "orbit end {last}");
    }

    #[test]
    fn angular_derivatives() {
        let tau = ONE;
        let hyp = HoloMap::Mobius(Mobius::disc_dilation(2.0));
        let a = hyp.angular_derivative(tau, None, &ctx()).unwrap();
        assert!((a.value - cplx(0.5, 0.0)).norm() < 1e-8, "hyperbolic {}", a.value);

        let par = HoloMap::Mobius(Mobius::disc_translation(ONE));
        let p = par.angular_derivative(tau, None, &ctx()).unwrap();
        assert!((p.value - ONE).norm() < 1e-6, "parabolic {}", p.value);

        let id = HoloMap::identity();
        let e = id.angular_derivative(tau, None, &ctx()).unwrap();
        assert!((e.value - ONE).norm() < 1e-12);
    }

    #[test]
    fn two_log_cos_period_is_exact() {
        let h = HoloMap::Atom(Atom::TwoLogCos);
        for &w in &[cplx(0.3, 0.8), cplx(-1.2, 2.0), cplx(0.47, 0.1)] {
            let d = h.diff_eval(w + ONE, w, ONE, &ctx()).unwrap();
            assert!((d + TAU * I).norm() < 1e-13, "period defect {d} at {w}");
        }
    }

    #[test]
    fn diff_eval_agrees_with_plain_difference() {
        let maps = [
            HoloMap::Atom(Atom::Cayley),
            HoloMap::Atom(Atom::Exp),
            HoloMap::Atom(Atom::Log),
            HoloMap::Atom(Atom::TwoLogCos),
            HoloMap::Atom(Atom::CotGenerator),
            HoloMap::Atom(Atom::SlantComb),
            HoloMap::Atom(Atom::HalfPlaneNotch),
            HoloMap::Atom(Atom::ShiftPlusExp { shift: I, amplitude: cplx(0.05, 0.0) }),
            HoloMap::Mobius(Mobius::disc_dilation(2.0)),
        ];
        let x = cplx(0.4, 1.3);
        let y = cplx(0.1, 1.1);
        let d = x - y;
        for m in &maps {
            let stable = m.diff_eval(x, y, d, &ctx()).unwrap();
            let plain = m.eval(x, &ctx()).unwrap() - m.eval(y, &ctx()).unwrap();
            assert!(
                (stable - plain).norm() < 1e-12 * (1.0 + plain.norm()),
                "diff mismatch for {m:?}: {stable} vs {plain}"
            );
        }
    }

    #[test]
    fn displacement_precision_near_fixed_point() {
        // Parabolic disc translation: displacement at z = 1 − 10⁻⁶ is of
        // order 10⁻¹², far below plain-subtraction noise relative error.
        let m = HoloMap::Mobius(Mobius::disc_translation(ONE));
        let z = cplx(1.0 - 1e-6, 0.0);
        let disp = m.displacement(z, &ctx()).unwrap();
        // Closed form: φ(z) − z = b(z−1)²/denominator for this family.
        let mob = Mobius::disc_translation(ONE);
        let den = mob.c * z + mob.d;
        let b_coeff = mob.b + (mob.a - mob.d) * ONE - mob.c * ONE; // p(1) = 0 check
        assert!(b_coeff.norm() < 1e-12);
        let expected = -mob.c * (z - ONE) * (z - ONE) / den;
        assert!((disp - expected).norm() <= 1e-18, "disp {disp} vs {expected}");
        assert!(disp.norm() < 1e-10 && disp.norm() > 1e-14);
    }

    #[test]
    fn pushed_periodic_translation_gives_rotation_scaling() {
        // g = w + i pushes to f(ζ) = e^{−2π}·ζ.
        let g = HoloMap::Atom(Atom::Affine { scale: ONE, offset: I });
        let f = HoloMap::PushedPeriodic { g: Box::new(g) };
        let z = cplx(0.3, -0.2);
        let v = f.eval(z, &ctx()).unwrap();
        let expected = z * (-TAU).exp();
        assert!((v - expected).norm() < 1e-15, "got {v}, want {expected}");
        assert!(f.eval(ZERO, &ctx()).unwrap().norm() == 0.0);
        let d0 = f.deriv(ZERO, &ctx()).unwrap();
        assert!((d0 - Complex::new((-TAU).exp(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn flow_of_constant_field_translates() {
        let gen = HoloMap::Atom(Atom::Affine { scale: ZERO, offset: cplx(0.4, 0.3) });
        let flow = HoloMap::Flow { generator: Box::new(gen), time: 2.0 };
        let z = cplx(1.0, 1.0);
        let v = flow.eval(z, &ctx()).unwrap();
        assert!((v - (z + cplx(0.8, 0.6))).norm() < 1e-9, "got {v}");
    }

    #[test]
    fn flow_of_linear_field_is_exponential() {
        // z′ = i z ⇒ Φₜ(z) = e^{it} z.
        let gen = HoloMap::Atom(Atom::Affine { scale: I, offset: ZERO });
        let flow = HoloMap::Flow { generator: Box::new(gen), time: 1.5 };
        let z = cplx(0.7, -0.2);
        let v = flow.eval(z, &ctx()).unwrap();
        let want = (I * 1.5).exp() * z;
        assert!((v - want).norm() < 1e-9);
        // Derivative along the flow: e^{it}.
        let d = flow.deriv(z, &ctx()).unwrap();
        assert!((d - (I * 1.5).exp()).norm() < 1e-8);
    }

    #[test]
    fn schroeder_limit_linearizes() {
        // f(z) = z/(2−z): elliptic at 0 with λ = 1/2; Koenigs map is
        // h₀(z) = z/(1−z).
        let f = HoloMap::Mobius(Mobius::new(ONE, ZERO, -ONE, cplx(2.0, 0.0)).unwrap());
        let h0 = HoloMap::SchroederLimit {
            f: Box::new(f.clone()),
            multiplier: cplx(0.5, 0.0),
        };
        for &z in &[cplx(0.2, 0.1), cplx(-0.4, 0.3)] {
            let v = h0.eval(z, &ctx()).unwrap();
            let want = z / (ONE - z);
            assert!((v - want).norm() < 1e-9, "Koenigs at {z}: {v} vs {want}");
        }
        // Normalization h₀′(0) = 1.
        let d = h0.deriv(ZERO, &ctx()).unwrap();
        assert!((d - ONE).norm() < 1e-10);
    }

    #[test]
    fn lifted_log_of_identity_is_identity() {
        // f = ζ downstairs lifts to F = w (with F(w₀) = w₀).
        let f = HoloMap::identity();
        let w0 = cplx(0.0, 3.0);
        let lift = HoloMap::LiftedLog { f: Box::new(f), base_point: w0, base_value: w0 };
        for &w in &[cplx(0.3, 2.0), cplx(-0.7, 4.0), cplx(0.2, 1.0)] {
            let v = lift.eval(w, &ctx()).unwrap();
            assert!((v - w).norm() < 1e-10, "lift at {w}: {v}");
        }
    }

    #[test]
    fn serde_map_roundtrip() {
        let json = r#"{"type":"mobius","matrix":[[3.0,0.0],[1.0,0.0],[1.0,0.0],[3.0,0.0]]}"#;
        let m: HoloMap = serde_json::from_str(json).unwrap();
        match &m {
            HoloMap::Mobius(mob) => assert_eq!(mob.a, cplx(3.0, 0.0)),
            _ => panic!("wrong variant"),
        }
        let back = serde_json::to_string(&m).unwrap();
        let again: HoloMap = serde_json::from_str(&back).unwrap();
        assert_eq!(m, again);

        let atom_json = r#"{"type":"atom","name":"userClosedForm",
            "params":{"form":"shiftPlusExp","shift":[0.0,1.0],"amplitude":[0.05,0.0]}}"#;
        let a: HoloMap = serde_json::from_str(atom_json).unwrap();
        let b = serde_json::to_string(&a).unwrap();
        let a2: HoloMap = serde_json::from_str(&b).unwrap();
        assert_eq!(a, a2);
    }

    #[test]
    fn branch_selection_uses_seed() {
        // Solve e^w = 1 near w = 2πi·3.
        let exp = HoloMap::Atom(Atom::Exp);
        let w = exp
            .solve(ONE, &BranchContext::with_seed(cplx(0.1, 18.7)))
            .unwrap();
        assert!((w - I * (3.0 * TAU)).norm() < 1e-12, "got {w}");
    }

    #[test]
    fn log_raises_branch_ambiguity_on_cut() {
        let log = HoloMap::Atom(Atom::Log);
        assert!(matches!(
            log.eval(cplx(-1.0, 0.0), &ctx()),
            Err(MapError::BranchAmbiguous { .. })
        ));
    }
}
