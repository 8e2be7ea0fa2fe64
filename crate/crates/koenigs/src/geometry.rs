//! Planar Koenigs domains and their translation geometry.
//!
//! A Koenigs domain is the image `Ω = h(𝔻)` of the disc under a linearizing
//! chart.  The domains handled here are a translation-invariant base (plane,
//! half-plane, or horizontal strip) minus a union of *blockers*: families of
//! vertical slits with affinely varying endpoints, left half-strips,
//! families of leftward horizontal rays, and sampled curves.
//!
//! The central question about such a domain is, for which `c` does
//! `Ω + c ⊂ Ω` hold.  Equivalently, writing `K = ℂ∖Ω`, whether `K − c ⊂ K`.
//! For affine blocker families this is decided symbolically: a translated
//! slit family lines up with a covering family only along an integer
//! congruence of indices, and the endpoint comparisons become affine
//! inequalities in the family index, solved exactly over the index set.
//! Sampled curves are handled by point tests with explicit margins; results
//! that cannot be certified either way surface as `UndecidableSampled`.

use num_complex::Complex64 as Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::num::parallel_map;

/// Slack for endpoint inequalities (containment is closed-set containment).
const INEQ_TOL: f64 = 1e-12;
/// Snapping tolerance for integer congruences of translated lattices.
const CONGRUENCE_TOL: f64 = 1e-9;
/// Largest gap ignored when covering an interval by a union of intervals.
const COVER_GAP_TOL: f64 = 1e-9;
/// Imaginary parts below this count as real (strip bases admit only real
/// translations).
const STRIP_REAL_TOL: f64 = 1e-12;
/// A sampled point at least this far inside the domain certifies that a
/// translated complement point escaped, i.e. containment fails.
const SAMPLED_FALSE_MARGIN: f64 = 1e-3;

/// Errors from domain validation and geometric queries.
#[derive(Debug, Error)]
pub enum GeometryError {
    /// The domain violates a structural requirement.
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    /// A sampled-curve containment could not be certified either way.
    #[error("sampled-curve containment undecidable: {0}")]
    UndecidableSampled(String),
    /// The operation requires an exact domain.
    #[error("operation requires an exact domain: {0}")]
    UnsupportedSampled(&'static str),
    /// A reciprocal-construction descriptor is not closed under addition.
    #[error("descriptor is not an additive semigroup: {0}")]
    NotASemigroup(String),
}

/// Affine or infinite endpoint of a slit: `offset + slope·n`, `+∞`, or `−∞`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Extent {
    /// Finite endpoint varying affinely with the family index.
    Affine {
        /// Constant term.
        offset: f64,
        /// Per-index increment.
        slope: f64,
    },
    /// Plus infinity.
    PlusInf,
    /// Minus infinity.
    MinusInf,
}

impl Extent {
    /// Constant finite extent.
    pub fn constant(v: f64) -> Self {
        Extent::Affine { offset: v, slope: 0.0 }
    }

    /// Value at index `n` (`±∞` as `f64` infinities).
    pub fn value_at(&self, n: f64) -> f64 {
        match *self {
            Extent::Affine { offset, slope } => offset + slope * n,
            Extent::PlusInf => f64::INFINITY,
            Extent::MinusInf => f64::NEG_INFINITY,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ExtentRepr {
    Word(String),
    Affine {
        #[serde(rename = "const")]
        offset: f64,
        #[serde(default)]
        slope: f64,
    },
}

impl Serialize for Extent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match *self {
            Extent::Affine { offset, slope } => ExtentRepr::Affine { offset, slope }.serialize(s),
            Extent::PlusInf => "inf".serialize(s),
            Extent::MinusInf => "-inf".serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for Extent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match ExtentRepr::deserialize(d)? {
            ExtentRepr::Word(w) if w == "inf" => Ok(Extent::PlusInf),
            ExtentRepr::Word(w) if w == "-inf" => Ok(Extent::MinusInf),
            ExtentRepr::Word(w) => Err(serde::de::Error::custom(format!(
                "unknown extent keyword {w:?} (expected \"inf\" or \"-inf\")"
            ))),
            ExtentRepr::Affine { offset, slope } => Ok(Extent::Affine { offset, slope }),
        }
    }
}

/// Index set of a blocker family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IndexSet {
    /// Finite inclusive range `start..=end`.
    Range {
        /// First index.
        start: i64,
        /// Last index (inclusive).
        end: i64,
    },
    /// `0, 1, 2, …`
    Naturals,
    /// All integers.
    Integers,
}

impl IndexSet {
    /// Whether the integer `n` belongs to the set.
    pub fn contains(&self, n: i64) -> bool {
        match *self {
            IndexSet::Range { start, end } => start <= n && n <= end,
            IndexSet::Naturals => n >= 0,
            IndexSet::Integers => true,
        }
    }

    /// Real interval hull of the set.
    fn hull(&self) -> (f64, f64) {
        match *self {
            IndexSet::Range { start, end } => (start as f64, end as f64),
            IndexSet::Naturals => (0.0, f64::INFINITY),
            IndexSet::Integers => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    fn is_finite(&self) -> bool {
        matches!(self, IndexSet::Range { .. })
    }

    /// Iterator over a finite window of the set, clipped to `[-w, w]`.
    fn window(&self, w: i64) -> impl Iterator<Item = i64> {
        let (lo, hi) = match *self {
            IndexSet::Range { start, end } => (start.max(-w), end.min(w)),
            IndexSet::Naturals => (0, w),
            IndexSet::Integers => (-w, w),
        };
        lo..=hi
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum IndexSetRepr {
    Word(String),
    Range { start: i64, end: i64 },
}

impl Serialize for IndexSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match *self {
            IndexSet::Range { start, end } => IndexSetRepr::Range { start, end }.serialize(s),
            IndexSet::Naturals => "naturals".serialize(s),
            IndexSet::Integers => "integers".serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for IndexSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match IndexSetRepr::deserialize(d)? {
            IndexSetRepr::Word(w) if w == "naturals" => Ok(IndexSet::Naturals),
            IndexSetRepr::Word(w) if w == "integers" => Ok(IndexSet::Integers),
            IndexSetRepr::Word(w) => Err(serde::de::Error::custom(format!(
                "unknown index set {w:?} (expected \"naturals\" or \"integers\")"
            ))),
            IndexSetRepr::Range { start, end } => Ok(IndexSet::Range { start, end }),
        }
    }
}

/// Translation-invariant base domain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum BaseSpace {
    /// The whole complex plane.
    Plane,
    /// `Im w > 0`.
    UpperHalfPlane,
    /// `Im w < 0`.
    LowerHalfPlane,
    /// `a < Im w < b`.
    Strip {
        /// Lower edge.
        a: f64,
        /// Upper edge.
        b: f64,
    },
}

impl BaseSpace {
    /// Open vertical range `(bottom, top)` of the base, `±∞` for free sides.
    pub fn y_range(&self) -> (f64, f64) {
        match *self {
            BaseSpace::Plane => (f64::NEG_INFINITY, f64::INFINITY),
            BaseSpace::UpperHalfPlane => (0.0, f64::INFINITY),
            BaseSpace::LowerHalfPlane => (f64::NEG_INFINITY, 0.0),
            BaseSpace::Strip { a, b } => (a, b),
        }
    }

    /// Whether `z` lies in the open base.
    pub fn contains(&self, z: Complex) -> bool {
        let (lo, hi) = self.y_range();
        z.im > lo && z.im < hi
    }

    /// Distance from `z` to the complement of the base (`+∞` for the plane).
    pub fn distance_to_edge(&self, z: Complex) -> f64 {
        let (lo, hi) = self.y_range();
        if z.im <= lo || z.im >= hi {
            return 0.0;
        }
        (z.im - lo).min(hi - z.im)
    }
}

/// A single connected component of the complement, or a family of them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "camelCase")]
pub enum Blocker {
    /// Vertical slits `{x0 + n·dx + iy : yLow(n) ≤ y ≤ yHigh(n)}`, `n` in
    /// `indices`.
    #[serde(rename_all = "camelCase")]
    SlitFamily {
        /// Abscissa of the index-0 slit.
        x0: f64,
        /// Horizontal spacing between consecutive slits.
        dx: f64,
        /// Lower endpoint as a function of the index.
        y_low: Extent,
        /// Upper endpoint as a function of the index.
        y_high: Extent,
        /// Index set of the family.
        indices: IndexSet,
    },
    /// The region `{x + iy : x ≤ xMax, yLow ≤ y ≤ yHigh}`.
    #[serde(rename_all = "camelCase")]
    LeftHalfStrip {
        /// Right edge of the strip.
        x_max: f64,
        /// Lower edge (`-inf` allowed; clipped to the base).
        y_low: Extent,
        /// Upper edge.
        y_high: f64,
    },
    /// Horizontal rays `{x + i(y0 + n·dy) : x ≤ xMax(n)}`, `n` in `indices`.
    #[serde(rename_all = "camelCase")]
    HorizontalRays {
        /// Ordinate of the index-0 ray.
        y0: f64,
        /// Vertical spacing between consecutive rays.
        dy: f64,
        /// Right endpoint as a function of the index.
        x_max: Extent,
        /// Index set of the family.
        indices: IndexSet,
    },
    /// A polyline sample of a curved slit, with a textual tail rule
    /// (`"none"` or `"vertical"`, which extends the curve past the last
    /// point in its final vertical direction).  An optional `repeat`
    /// structure turns the curve into a family of exact translates.
    #[serde(rename_all = "camelCase")]
    SampledCurve {
        /// Sample points in order along the curve.
        points: Vec<Complex>,
        /// How the curve continues past the last sample.
        tail_rule: String,
        /// Optional translation family: copies at `points + n·step`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        repeat: Option<CurveRepeat>,
    },
}

/// Translation structure of a repeated sampled curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CurveRepeat {
    /// Translation between consecutive copies.
    pub step: Complex,
    /// Index set of the copies.
    pub indices: IndexSet,
}

/// Whether all containment arithmetic on the domain is exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Exactness {
    /// All blockers are affine families; containment is decided symbolically.
    Exact,
    /// At least one sampled curve; containment results carry margins.
    Sampled,
}

/// Verdict of a membership scan at one grid point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Membership {
    /// `Ω + c ⊂ Ω` holds.
    Member,
    /// `Ω + c ⊂ Ω` fails.
    NotMember,
    /// Sampled geometry could not certify either way.
    Undecidable,
}

/// Shape of the increasing union `S = ⋃ₙ (Ω − n)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum UnionClass {
    /// The union exhausts the plane.
    FullPlane,
    /// The union contains an upper half-plane.
    ContainsUpperHalfPlane,
    /// The union contains a lower half-plane.
    ContainsLowerHalfPlane,
    /// The union is the horizontal strip of the base.
    StripLike {
        /// Lower edge.
        a: f64,
        /// Upper edge.
        b: f64,
    },
}

#[derive(Serialize, Deserialize)]
struct DomainSpec {
    base: BaseSpace,
    blockers: Vec<Blocker>,
}

/// A Koenigs domain: a translation-invariant base minus blockers.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(into = "DomainSpec")]
pub struct KoenigsDomain {
    base: BaseSpace,
    blockers: Vec<Blocker>,
    exactness: Exactness,
}

impl From<KoenigsDomain> for DomainSpec {
    fn from(d: KoenigsDomain) -> Self {
        DomainSpec { base: d.base, blockers: d.blockers }
    }
}

impl<'de> Deserialize<'de> for KoenigsDomain {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let spec = DomainSpec::deserialize(d)?;
        KoenigsDomain::new(spec.base, spec.blockers).map_err(serde::de::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// Interval sets and affine inequalities over the family index.
// ---------------------------------------------------------------------------

/// Union of closed real intervals, sorted and merged.
#[derive(Clone, Debug, Default)]
struct IntervalSet {
    parts: Vec<(f64, f64)>,
}

impl IntervalSet {
    fn empty() -> Self {
        IntervalSet { parts: vec![] }
    }

    fn all() -> Self {
        IntervalSet { parts: vec![(f64::NEG_INFINITY, f64::INFINITY)] }
    }

    fn single(lo: f64, hi: f64) -> Self {
        if lo <= hi {
            IntervalSet { parts: vec![(lo, hi)] }
        } else {
            IntervalSet::empty()
        }
    }

    fn normalize(mut parts: Vec<(f64, f64)>) -> Self {
        parts.retain(|&(lo, hi)| lo <= hi);
        parts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut merged: Vec<(f64, f64)> = vec![];
        for (lo, hi) in parts {
            match merged.last_mut() {
                // Merging across gaps below COVER_GAP_TOL never swallows an
                // integer, and integers are all that is ever read off.
                Some(last) if lo <= last.1 + COVER_GAP_TOL => last.1 = last.1.max(hi),
                _ => merged.push((lo, hi)),
            }
        }
        IntervalSet { parts: merged }
    }

    fn union(&self, other: &IntervalSet) -> IntervalSet {
        let mut parts = self.parts.clone();
        parts.extend_from_slice(&other.parts);
        IntervalSet::normalize(parts)
    }

    fn intersect(&self, other: &IntervalSet) -> IntervalSet {
        let mut parts = vec![];
        for &(a, b) in &self.parts {
            for &(c, d) in &other.parts {
                let lo = a.max(c);
                let hi = b.min(d);
                if lo <= hi {
                    parts.push((lo, hi));
                }
            }
        }
        IntervalSet::normalize(parts)
    }

    fn complement(&self) -> IntervalSet {
        let mut parts = vec![];
        let mut cursor = f64::NEG_INFINITY;
        for &(lo, hi) in &self.parts {
            if cursor < lo {
                parts.push((cursor, lo));
            }
            cursor = cursor.max(hi);
        }
        if cursor < f64::INFINITY {
            parts.push((cursor, f64::INFINITY));
        }
        IntervalSet { parts }
    }
}

/// Integers of `idx` lying in `set`, split into a finite window part and a
/// flag for integers beyond the window.
///
/// Interval endpoints inherit the closed-containment slack of `le_set`, so
/// an integer exactly on an endpoint belongs to the covered side; the
/// intervals are shrunk by a hair before rounding to respect that.
fn indices_in(set: &IntervalSet, idx: &IndexSet, window: i64) -> (Vec<i64>, bool) {
    const EDGE_TOL: f64 = 1e-10;
    let (ilo, ihi) = idx.hull();
    let mut within = vec![];
    let mut beyond = false;
    for &(lo, hi) in &set.parts {
        // First and last integer strictly inside the interval (shrunk by a
        // hair at finite endpoints), then clamped to the index set hull.
        let n0 = if lo == f64::NEG_INFINITY { lo } else { (lo + EDGE_TOL).ceil() };
        let n1 = if hi == f64::INFINITY { hi } else { (hi - EDGE_TOL).floor() };
        let n0 = n0.max(ilo);
        let n1 = n1.min(ihi);
        if n0 > n1 {
            continue;
        }
        if n0 < -(window as f64) || n1 > window as f64 {
            beyond = true;
        }
        let a = n0.max(-(window as f64)) as i64;
        let b = n1.min(window as f64) as i64;
        for n in a..=b {
            if idx.contains(n) {
                within.push(n);
            }
        }
    }
    within.sort_unstable();
    within.dedup();
    (within, beyond)
}

/// Affine function of the index, or a constant infinity.
#[derive(Clone, Copy, Debug)]
enum Bound {
    Fin { a: f64, b: f64 },
    Plus,
    Minus,
}

impl Bound {
    fn constant(v: f64) -> Bound {
        if v == f64::INFINITY {
            Bound::Plus
        } else if v == f64::NEG_INFINITY {
            Bound::Minus
        } else {
            Bound::Fin { a: v, b: 0.0 }
        }
    }

    /// Extent evaluated along the index map `m(n) = α·n + β`, then shifted.
    fn from_extent(e: Extent, alpha: f64, beta: f64, shift: f64) -> Bound {
        match e {
            Extent::Affine { offset, slope } => Bound::Fin {
                a: offset + slope * beta + shift,
                b: slope * alpha,
            },
            Extent::PlusInf => Bound::Plus,
            Extent::MinusInf => Bound::Minus,
        }
    }
}

/// `{n : lhs(n) ≤ rhs(n)}` with closed-containment slack.
fn le_set(lhs: Bound, rhs: Bound) -> IntervalSet {
    match (lhs, rhs) {
        (Bound::Minus, _) | (_, Bound::Plus) => IntervalSet::all(),
        (Bound::Plus, Bound::Fin { .. }) | (Bound::Fin { .. }, Bound::Minus) => {
            IntervalSet::empty()
        }
        (Bound::Plus, Bound::Minus) => IntervalSet::empty(),
        (Bound::Fin { a: la, b: lb }, Bound::Fin { a: ra, b: rb }) => {
            // la + lb n ≤ ra + rb n + tol  ⟺  (ra-la) + (rb-lb) n ≥ -tol
            let a = ra - la;
            let b = rb - lb;
            if b.abs() < 1e-14 {
                if a >= -INEQ_TOL {
                    IntervalSet::all()
                } else {
                    IntervalSet::empty()
                }
            } else {
                let root = (-INEQ_TOL - a) / b;
                if b > 0.0 {
                    IntervalSet::single(root, f64::INFINITY)
                } else {
                    IntervalSet::single(f64::NEG_INFINITY, root)
                }
            }
        }
    }
}

/// Closed 1-D cover check: is `[lo, hi]` inside the union of `pieces`,
/// allowing gaps up to `COVER_GAP_TOL`?
fn interval_covered(lo: f64, hi: f64, pieces: &[(f64, f64)]) -> bool {
    if lo > hi {
        return true;
    }
    let mut sorted: Vec<(f64, f64)> = pieces.iter().copied().filter(|&(a, b)| a <= b).collect();
    sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut cursor = lo;
    for (a, b) in sorted {
        if a > cursor + COVER_GAP_TOL {
            return false;
        }
        cursor = cursor.max(b);
        if cursor >= hi - COVER_GAP_TOL {
            return true;
        }
    }
    cursor >= hi - COVER_GAP_TOL
}

// ---------------------------------------------------------------------------
// The domain itself.
// ---------------------------------------------------------------------------

impl KoenigsDomain {
    /// Builds and validates a domain.
    ///
    /// Validation enforces the structural requirements: finite spacing for
    /// infinite families, strips with positive width, at least two points per
    /// sampled curve, and — so that the domain stays simply connected —
    /// every affine blocker must reach the base boundary or infinity.
    pub fn new(base: BaseSpace, blockers: Vec<Blocker>) -> Result<Self, GeometryError> {
        if let BaseSpace::Strip { a, b } = base {
            // Rejects NaN edges as well: only a definite `a < b` passes.
            if a.partial_cmp(&b) != Some(std::cmp::Ordering::Less) {
                return Err(GeometryError::InvalidDomain(format!(
                    "strip requires a < b, got a = {a}, b = {b}"
                )));
            }
        }
        let (bot, top) = base.y_range();
        for (i, blk) in blockers.iter().enumerate() {
            match blk {
                Blocker::SlitFamily { dx, y_low, y_high, indices, .. } => {
                    if !indices.is_finite() && dx.abs() < 1e-14 {
                        return Err(GeometryError::InvalidDomain(format!(
                            "blocker {i}: infinite slit family needs dx != 0"
                        )));
                    }
                    // Each slit must touch the base boundary or reach ∞:
                    // collect the indices where every escape route fails.
                    let id = IntervalSet::intersect(
                        &IntervalSet::all(),
                        &{
                            let low = Bound::from_extent(*y_low, 1.0, 0.0, 0.0);
                            let high = Bound::from_extent(*y_high, 1.0, 0.0, 0.0);
                            let mut touches = IntervalSet::empty();
                            if matches!(y_low, Extent::MinusInf) || matches!(y_high, Extent::PlusInf) {
                                touches = IntervalSet::all();
                            }
                            touches = touches.union(&le_set(low, Bound::constant(bot)));
                            touches = touches.union(&le_set(Bound::constant(top), high));
                            // Degenerate case: slit entirely outside the
                            // closed base is pointless but harmless.
                            touches = touches.union(&le_set(high, Bound::constant(bot)));
                            touches = touches.union(&le_set(Bound::constant(top), low));
                            touches.complement()
                        },
                    );
                    let (bad, tail) = indices_in(&id, indices, 4096);
                    if !bad.is_empty() || tail {
                        return Err(GeometryError::InvalidDomain(format!(
                            "blocker {i}: slit at index {} floats in the interior \
                             (must touch the boundary or reach infinity)",
                            bad.first().copied().unwrap_or(0)
                        )));
                    }
                }
                Blocker::LeftHalfStrip { y_low, .. } => {
                    if matches!(y_low, Extent::PlusInf) {
                        return Err(GeometryError::InvalidDomain(format!(
                            "blocker {i}: left half-strip lower edge cannot be +inf"
                        )));
                    }
                    if let Extent::Affine { slope, .. } = y_low {
                        if slope.abs() > 0.0 {
                            return Err(GeometryError::InvalidDomain(format!(
                                "blocker {i}: left half-strip edges must be constant"
                            )));
                        }
                    }
                }
                Blocker::HorizontalRays { dy, x_max, indices, .. } => {
                    if !indices.is_finite() && dy.abs() < 1e-14 {
                        return Err(GeometryError::InvalidDomain(format!(
                            "blocker {i}: infinite ray family needs dy != 0"
                        )));
                    }
                    if matches!(x_max, Extent::PlusInf) {
                        return Err(GeometryError::InvalidDomain(format!(
                            "blocker {i}: a full horizontal line would disconnect the domain"
                        )));
                    }
                }
                Blocker::SampledCurve { points, tail_rule, repeat } => {
                    if points.len() < 2 {
                        return Err(GeometryError::InvalidDomain(format!(
                            "blocker {i}: sampled curve needs at least two points"
                        )));
                    }
                    if tail_rule != "none" && tail_rule != "vertical" {
                        return Err(GeometryError::InvalidDomain(format!(
                            "blocker {i}: unknown tail rule {tail_rule:?}"
                        )));
                    }
                    if let Some(rep) = repeat {
                        if !rep.indices.is_finite() && rep.step.norm() < 1e-14 {
                            return Err(GeometryError::InvalidDomain(format!(
                                "blocker {i}: infinite curve family needs a nonzero step"
                            )));
                        }
                    }
                }
            }
        }
        let exactness = if blockers.iter().any(|b| matches!(b, Blocker::SampledCurve { .. })) {
            Exactness::Sampled
        } else {
            Exactness::Exact
        };
        Ok(KoenigsDomain { base, blockers, exactness })
    }

    /// The base space.
    pub fn base(&self) -> BaseSpace {
        self.base
    }

    /// The blockers.
    pub fn blockers(&self) -> &[Blocker] {
        &self.blockers
    }

    /// Whether containment arithmetic on this domain is exact.
    pub fn exactness(&self) -> Exactness {
        self.exactness
    }

    /// Whether `z` lies in the open domain (strictly inside the base and off
    /// every blocker).
    pub fn in_domain(&self, z: Complex) -> bool {
        self.base.contains(z) && self.distance_to_blockers(z) > 0.0
    }

    /// Euclidean distance from `z` to the complement of the domain.
    pub fn distance_to_complement(&self, z: Complex) -> f64 {
        self.base.distance_to_edge(z).min(self.distance_to_blockers(z))
    }

    fn distance_to_blockers(&self, z: Complex) -> f64 {
        let mut d = f64::INFINITY;
        for blk in &self.blockers {
            d = d.min(blocker_distance(blk, z));
        }
        d
    }

    // -- translation containment ------------------------------------------

    /// Decides whether `Ω + c ⊂ Ω`.
    ///
    /// Exact domains are decided symbolically.  Domains with sampled curves
    /// return a margin-certified verdict and report `UndecidableSampled`
    /// when a translated point lands too close to the boundary to call.
    pub fn contains_translate(&self, c: Complex) -> Result<bool, GeometryError> {
        if c.norm() < 1e-15 {
            return Ok(true);
        }
        // Base rule: the translated base-complement must stay inside the
        // complement, and 2-D loss cannot be absorbed by 1-D blockers.
        match self.base {
            BaseSpace::Plane => {}
            BaseSpace::UpperHalfPlane => {
                if c.im < -INEQ_TOL {
                    return Ok(false);
                }
            }
            BaseSpace::LowerHalfPlane => {
                if c.im > INEQ_TOL {
                    return Ok(false);
                }
            }
            BaseSpace::Strip { .. } => {
                if c.im.abs() > STRIP_REAL_TOL {
                    return Ok(false);
                }
            }
        }
        let window = self.enumeration_window(c);
        let mut undecided: Option<String> = None;
        for (j, blk) in self.blockers.iter().enumerate() {
            let verdict = match blk {
                Blocker::SlitFamily { .. } => self.slit_family_covered(j, blk, c, window)?,
                Blocker::HorizontalRays { .. } => self.ray_family_covered(blk, c, window)?,
                Blocker::LeftHalfStrip { .. } => self.half_strip_covered(blk, c)?,
                Blocker::SampledCurve { .. } => self.curve_covered(blk, c)?,
            };
            match verdict {
                Membership::NotMember => return Ok(false),
                Membership::Undecidable => {
                    undecided.get_or_insert_with(|| format!("blocker {j} near the margin"));
                }
                Membership::Member => {}
            }
        }
        match undecided {
            Some(msg) => Err(GeometryError::UndecidableSampled(msg)),
            None => Ok(true),
        }
    }

    /// Enumeration window for per-index fallbacks, derived from the query.
    fn enumeration_window(&self, c: Complex) -> i64 {
        let mut w = 64.0 + 4.0 * c.norm();
        for blk in &self.blockers {
            let reach = match blk {
                Blocker::SlitFamily { x0, dx, .. } => x0.abs() / dx.abs().max(0.5),
                Blocker::HorizontalRays { y0, dy, .. } => y0.abs() / dy.abs().max(0.5),
                _ => 0.0,
            };
            w = w.max(64.0 + reach);
        }
        w.min(1e6) as i64
    }

    /// Coverage of one translated slit family, symbolic first, per-index
    /// enumeration for leftover indices.
    fn slit_family_covered(
        &self,
        _j: usize,
        blk: &Blocker,
        c: Complex,
        window: i64,
    ) -> Result<Membership, GeometryError> {
        let Blocker::SlitFamily { x0, dx, y_low, y_high, indices } = blk else {
            unreachable!()
        };
        let t = c.im;
        let (bot, top) = self.base.y_range();
        // Translated slit n: abscissa x(n) = x0 - Re c + n·dx,
        // vertical range [yLow(n) - t, yHigh(n) - t].
        let moved_x = (x0 - c.re, *dx);
        let low_m = Bound::from_extent(*y_low, 1.0, 0.0, -t);
        let high_m = Bound::from_extent(*y_high, 1.0, 0.0, -t);
        let bot_b = Bound::constant(bot);
        let top_b = Bound::constant(top);

        // Indices whose translated slit is covered by something, as a set of
        // real intervals in n.
        let mut covered = IntervalSet::empty();
        // The base complement covers slits that left the open base.
        covered = covered.union(&le_set(high_m, bot_b));
        covered = covered.union(&le_set(top_b, low_m));

        for cand in &self.blockers {
            match cand {
                Blocker::SlitFamily {
                    x0: kx0,
                    dx: kdx,
                    y_low: kyl,
                    y_high: kyh,
                    indices: kidx,
                } => {
                    if dx.abs() < 1e-14 || kdx.abs() < 1e-14 {
                        continue; // finite families go through enumeration
                    }
                    let alpha = dx / kdx;
                    if (alpha - alpha.round()).abs() > CONGRUENCE_TOL || alpha.round() == 0.0 {
                        continue;
                    }
                    let beta = (x0 - c.re - kx0) / kdx;
                    if (beta - beta.round()).abs() > CONGRUENCE_TOL {
                        continue; // lattices never line up for this pair
                    }
                    let (alpha, beta) = (alpha.round(), beta.round());
                    // Covering slit index m(n) = α·n + β must be in the
                    // candidate index set.
                    let (klo, khi) = kidx.hull();
                    let range_cond = le_set(Bound::constant(klo), Bound::Fin { a: beta, b: alpha })
                        .intersect(&le_set(Bound::Fin { a: beta, b: alpha }, Bound::constant(khi)));
                    let kyl_b = Bound::from_extent(*kyl, alpha, beta, 0.0);
                    let kyh_b = Bound::from_extent(*kyh, alpha, beta, 0.0);
                    // Need: kyl ≤ max(low_m, bot) and min(high_m, top) ≤ kyh,
                    // each a disjunction of two affine comparisons.
                    let low_ok = le_set(kyl_b, low_m).union(&le_set(kyl_b, bot_b));
                    let high_ok = le_set(high_m, kyh_b).union(&le_set(top_b, kyh_b));
                    covered = covered.union(&low_ok.intersect(&high_ok).intersect(&range_cond));
                }
                Blocker::LeftHalfStrip { x_max, y_low: syl, y_high: syh } => {
                    // x(n) ≤ x_max and vertical containment.
                    let x_ok = le_set(
                        Bound::Fin { a: moved_x.0, b: moved_x.1 },
                        Bound::constant(*x_max),
                    );
                    let syl_b = Bound::from_extent(*syl, 1.0, 0.0, 0.0);
                    let syh_b = Bound::constant(*syh);
                    let low_ok = le_set(syl_b, low_m).union(&le_set(syl_b, bot_b));
                    let high_ok = le_set(high_m, syh_b).union(&le_set(top_b, syh_b));
                    covered = covered.union(&x_ok.intersect(&low_ok).intersect(&high_ok));
                }
                // Rays and curves cannot absorb a generic vertical slit;
                // degenerate cases are caught by the per-index fallback.
                Blocker::HorizontalRays { .. } | Blocker::SampledCurve { .. } => {}
            }
        }

        let uncovered = covered.complement();
        let (leftover, beyond) = indices_in(&uncovered, indices, window);
        if leftover.is_empty() && !beyond {
            return Ok(Membership::Member);
        }
        if beyond && self.exactness == Exactness::Exact {
            // Symbolically uncovered for arbitrarily large indices: no
            // finite union of the remaining cover sources can absorb an
            // infinite tail of slits.
            return Ok(Membership::NotMember);
        }
        // Enumerate the leftovers and test each slit individually.
        let mut undecided = false;
        for n in leftover {
            let nf = n as f64;
            let x = moved_x.0 + moved_x.1 * nf;
            let l = y_low.value_at(nf) - t;
            let h = y_high.value_at(nf) - t;
            match self.single_slit_covered(x, l.max(bot), h.min(top))? {
                Membership::Member => {}
                Membership::NotMember => return Ok(Membership::NotMember),
                Membership::Undecidable => undecided = true,
            }
        }
        if beyond {
            // Sampled domain with an infinite uncovered tail.
            return Ok(Membership::NotMember);
        }
        if undecided {
            Ok(Membership::Undecidable)
        } else {
            Ok(Membership::Member)
        }
    }

    /// Exact cover test for one vertical slit `{x + iy : lo ≤ y ≤ hi}`
    /// against the full complement; sampled-curve cover is decided with
    /// margins.
    fn single_slit_covered(
        &self,
        x: f64,
        lo: f64,
        hi: f64,
    ) -> Result<Membership, GeometryError> {
        if lo > hi {
            return Ok(Membership::Member);
        }
        let mut pieces: Vec<(f64, f64)> = vec![];
        for blk in &self.blockers {
            match blk {
                Blocker::SlitFamily { x0, dx, y_low, y_high, indices } => {
                    let hits: Vec<i64> = if dx.abs() < 1e-14 {
                        if (x - x0).abs() <= CONGRUENCE_TOL {
                            indices.window(4096).collect()
                        } else {
                            vec![]
                        }
                    } else {
                        let m = (x - x0) / dx;
                        if (m - m.round()).abs() <= CONGRUENCE_TOL && indices.contains(m.round() as i64)
                        {
                            vec![m.round() as i64]
                        } else {
                            vec![]
                        }
                    };
                    for m in hits {
                        pieces.push((y_low.value_at(m as f64), y_high.value_at(m as f64)));
                    }
                }
                Blocker::LeftHalfStrip { x_max, y_low, y_high } => {
                    if x <= x_max + INEQ_TOL {
                        pieces.push((y_low.value_at(0.0), *y_high));
                    }
                }
                Blocker::HorizontalRays { .. } | Blocker::SampledCurve { .. } => {}
            }
        }
        if interval_covered(lo, hi, &pieces) {
            return Ok(Membership::Member);
        }
        if self.exactness == Exactness::Exact {
            return Ok(Membership::NotMember);
        }
        // Sampled fallback: walk the uncovered part of the slit and measure
        // distance to the complement (curves included).
        self.sampled_segment_verdict(Complex::new(x, lo.max(hi - 64.0)), Complex::new(x, hi), 257)
    }

    /// Coverage of one translated horizontal-ray family.
    fn ray_family_covered(
        &self,
        blk: &Blocker,
        c: Complex,
        window: i64,
    ) -> Result<Membership, GeometryError> {
        let Blocker::HorizontalRays { y0, dy, x_max, indices } = blk else {
            unreachable!()
        };
        let (bot, top) = self.base.y_range();
        // Translated ray n: ordinate y(n) = y0 - Im c + n·dy, right endpoint
        // X(n) = xMax(n) - Re c.
        let y_m = Bound::Fin { a: y0 - c.im, b: *dy };
        let x_m = Bound::from_extent(*x_max, 1.0, 0.0, -c.re);

        let mut covered = IntervalSet::empty();
        covered = covered.union(&le_set(y_m, Bound::constant(bot)));
        covered = covered.union(&le_set(Bound::constant(top), y_m));

        for cand in &self.blockers {
            match cand {
                Blocker::HorizontalRays { y0: ky0, dy: kdy, x_max: kxm, indices: kidx } => {
                    if dy.abs() < 1e-14 || kdy.abs() < 1e-14 {
                        continue;
                    }
                    let alpha = dy / kdy;
                    if (alpha - alpha.round()).abs() > CONGRUENCE_TOL || alpha.round() == 0.0 {
                        continue;
                    }
                    let beta = (y0 - c.im - ky0) / kdy;
                    if (beta - beta.round()).abs() > CONGRUENCE_TOL {
                        continue;
                    }
                    let (alpha, beta) = (alpha.round(), beta.round());
                    let (klo, khi) = kidx.hull();
                    let range_cond = le_set(Bound::constant(klo), Bound::Fin { a: beta, b: alpha })
                        .intersect(&le_set(Bound::Fin { a: beta, b: alpha }, Bound::constant(khi)));
                    let kxm_b = Bound::from_extent(*kxm, alpha, beta, 0.0);
                    covered = covered.union(&le_set(x_m, kxm_b).intersect(&range_cond));
                }
                Blocker::LeftHalfStrip { x_max: sxm, y_low: syl, y_high: syh } => {
                    let syl_b = Bound::from_extent(*syl, 1.0, 0.0, 0.0);
                    let in_y = le_set(syl_b, y_m).intersect(&le_set(y_m, Bound::constant(*syh)));
                    let in_x = le_set(x_m, Bound::constant(*sxm));
                    covered = covered.union(&in_y.intersect(&in_x));
                }
                Blocker::SlitFamily { .. } | Blocker::SampledCurve { .. } => {}
            }
        }

        let uncovered = covered.complement();
        let (leftover, beyond) = indices_in(&uncovered, indices, window);
        if leftover.is_empty() && !beyond {
            return Ok(Membership::Member);
        }
        if self.exactness == Exactness::Exact {
            return Ok(Membership::NotMember);
        }
        if beyond {
            return Ok(Membership::NotMember);
        }
        let mut undecided = false;
        for n in leftover {
            let nf = n as f64;
            let y = y0 - c.im + dy * nf;
            let xm = x_max.value_at(nf) - c.re;
            if y <= bot + INEQ_TOL || y >= top - INEQ_TOL {
                continue;
            }
            match self.sampled_segment_verdict(
                Complex::new(xm - 64.0, y),
                Complex::new(xm, y),
                257,
            )? {
                Membership::Member => {}
                Membership::NotMember => return Ok(Membership::NotMember),
                Membership::Undecidable => undecided = true,
            }
        }
        Ok(if undecided { Membership::Undecidable } else { Membership::Member })
    }

    /// Coverage of one translated left half-strip (a two-dimensional region:
    /// only the base complement and other half-strips can absorb it).
    fn half_strip_covered(&self, blk: &Blocker, c: Complex) -> Result<Membership, GeometryError> {
        let Blocker::LeftHalfStrip { x_max, y_low, y_high } = blk else {
            unreachable!()
        };
        let (bot, top) = self.base.y_range();
        let moved_x = x_max - c.re;
        let lo = (y_low.value_at(0.0) - c.im).max(bot);
        let hi = (y_high - c.im).min(top);
        if lo >= hi - INEQ_TOL {
            return Ok(Membership::Member); // left the open base entirely
        }
        let mut pieces = vec![];
        for cand in &self.blockers {
            if let Blocker::LeftHalfStrip { x_max: kxm, y_low: kyl, y_high: kyh } = cand {
                if moved_x <= kxm + INEQ_TOL {
                    pieces.push((kyl.value_at(0.0), *kyh));
                }
            }
        }
        Ok(if interval_covered(lo, hi, &pieces) {
            Membership::Member
        } else {
            Membership::NotMember
        })
    }

    /// Coverage of one translated sampled curve or curve family.
    ///
    /// For a repeated family, a translation by an exact multiple of the
    /// repeat step maps copies onto copies; only the copies whose target
    /// index leaves the index set need point tests.  Other translations are
    /// decided by margin tests on representative copies (all of them when
    /// the family is finite).
    fn curve_covered(&self, blk: &Blocker, c: Complex) -> Result<Membership, GeometryError> {
        let Blocker::SampledCurve { points, repeat, .. } = blk else { unreachable!() };
        let Some(rep) = repeat else {
            return self.curve_piece_covered(blk, points, Complex::new(0.0, 0.0), c);
        };
        let v = rep.step;
        let s_real = if v.norm_sqr() > 0.0 {
            (c * v.conj()).re / v.norm_sqr()
        } else {
            0.0
        };
        let s = s_real.round();
        let aligned = (c - v * s).norm() < CONGRUENCE_TOL;
        let test_copies: Vec<i64>;
        let mut tail_unresolved = false;
        if aligned {
            // Copy n moves onto the slot of copy n - s.
            let s = s as i64;
            test_copies = match rep.indices {
                IndexSet::Integers => vec![],
                IndexSet::Naturals => {
                    if s <= 0 {
                        vec![]
                    } else {
                        (0..s).collect()
                    }
                }
                IndexSet::Range { start, end } => (start..=end)
                    .filter(|n| !rep.indices.contains(n - s))
                    .collect(),
            };
        } else {
            // No lattice alignment: probe the copies nearest the origin — a
            // certified escape there settles the question; an infinite tail
            // cannot be certified covered.
            test_copies = rep.indices.window(2).collect();
            tail_unresolved = !rep.indices.is_finite();
        }
        let mut worst_verdict = Membership::Member;
        for n in test_copies {
            match self.curve_piece_covered(blk, points, v * n as f64, c)? {
                Membership::NotMember => return Ok(Membership::NotMember),
                Membership::Undecidable => worst_verdict = Membership::Undecidable,
                Membership::Member => {}
            }
        }
        if tail_unresolved && worst_verdict == Membership::Member {
            // Representatives look covered but infinitely many copies remain.
            worst_verdict = Membership::Undecidable;
        }
        Ok(worst_verdict)
    }

    /// Margin verdict for one translated curve copy at `points + offset`.
    fn curve_piece_covered(
        &self,
        blk: &Blocker,
        points: &[Complex],
        offset: Complex,
        c: Complex,
    ) -> Result<Membership, GeometryError> {
        let cover_tol = self.curve_cover_tolerance(blk);
        let mut worst = 0.0_f64;
        for p in curve_probes(points, blk) {
            let q = p + offset - c;
            if !self.base.contains(q) {
                continue;
            }
            let d = self.distance_to_complement(q);
            worst = worst.max(d);
            if d > SAMPLED_FALSE_MARGIN {
                return Ok(Membership::NotMember);
            }
        }
        Ok(if worst <= cover_tol {
            Membership::Member
        } else {
            Membership::Undecidable
        })
    }

    /// Cover tolerance for a sampled curve: proportional to its sampling
    /// resolution, so that a translated curve lying on another sampled curve
    /// is recognized as covered.
    fn curve_cover_tolerance(&self, blk: &Blocker) -> f64 {
        let Blocker::SampledCurve { points, .. } = blk else { return 1e-6 };
        let max_seg = points
            .windows(2)
            .map(|w| (w[1] - w[0]).norm())
            .fold(0.0, f64::max);
        (0.75 * max_seg).max(1e-6)
    }

    /// Margin verdict for a straight probe segment: all samples near the
    /// complement → covered; any sample clearly interior → not covered.
    fn sampled_segment_verdict(
        &self,
        a: Complex,
        b: Complex,
        samples: usize,
    ) -> Result<Membership, GeometryError> {
        let mut worst = 0.0_f64;
        for i in 0..samples {
            let s = i as f64 / (samples - 1) as f64;
            let q = a + (b - a) * s;
            if !self.base.contains(q) {
                continue;
            }
            let d = self.distance_to_complement(q);
            worst = worst.max(d);
            if d > SAMPLED_FALSE_MARGIN {
                return Ok(Membership::NotMember);
            }
        }
        Ok(if worst <= 1e-6 { Membership::Member } else { Membership::Undecidable })
    }

    // -- scans and verdicts ------------------------------------------------

    /// Membership verdicts for every `c` in `grid`, in grid order.
    pub fn semigroup_membership_scan(&self, grid: &[Complex]) -> Vec<(Complex, Membership)> {
        let items: Vec<Complex> = grid.to_vec();
        let verdicts = parallel_map(items, |c| match self.contains_translate(*c) {
            Ok(true) => Membership::Member,
            Ok(false) => Membership::NotMember,
            Err(_) => Membership::Undecidable,
        });
        grid.iter().copied().zip(verdicts).collect()
    }

    /// Whether `Ω + t ⊂ Ω` for every real `t ≥ 0` (starlikeness at infinity).
    ///
    /// Equivalent to the leftward sweep `⋃_{t≥0}(K − t)` of the complement
    /// `K` staying inside `K`.  Sweeps of half-strips and leftward rays are
    /// themselves; the sweep of a vertical slit is a two-dimensional
    /// half-strip that only the base complement or an actual half-strip
    /// blocker can absorb.
    pub fn starlike_at_infinity(&self) -> Result<bool, GeometryError> {
        if self.exactness == Exactness::Sampled {
            return Err(GeometryError::UnsupportedSampled(
                "starlikeness needs affine blockers",
            ));
        }
        let (bot, top) = self.base.y_range();
        let bot_b = Bound::constant(bot);
        let top_b = Bound::constant(top);
        for blk in &self.blockers {
            match blk {
                Blocker::LeftHalfStrip { .. } | Blocker::HorizontalRays { .. } => {}
                Blocker::SlitFamily { x0, dx, y_low, y_high, indices } => {
                    let low = Bound::from_extent(*y_low, 1.0, 0.0, 0.0);
                    let high = Bound::from_extent(*y_high, 1.0, 0.0, 0.0);
                    let mut covered = IntervalSet::empty();
                    covered = covered.union(&le_set(high, bot_b));
                    covered = covered.union(&le_set(top_b, low));
                    for cand in &self.blockers {
                        if let Blocker::LeftHalfStrip { x_max, y_low: syl, y_high: syh } = cand {
                            // Sweep right end x0 + n·dx must stay left of the
                            // strip edge, with vertical containment.
                            let x_ok = le_set(
                                Bound::Fin { a: *x0, b: *dx },
                                Bound::constant(*x_max),
                            );
                            let syl_b = Bound::from_extent(*syl, 1.0, 0.0, 0.0);
                            let low_ok = le_set(syl_b, low).union(&le_set(syl_b, bot_b));
                            let high_ok = le_set(high, Bound::constant(*syh))
                                .union(&le_set(top_b, Bound::constant(*syh)));
                            covered = covered.union(&x_ok.intersect(&low_ok).intersect(&high_ok));
                        }
                    }
                    let (leftover, beyond) = indices_in(&covered.complement(), indices, 4096);
                    if beyond {
                        return Ok(false);
                    }
                    for n in leftover {
                        let nf = n as f64;
                        let lo = y_low.value_at(nf).max(bot);
                        let hi = y_high.value_at(nf).min(top);
                        if lo >= hi - INEQ_TOL {
                            continue;
                        }
                        // Multi-strip union cover of the swept slit.
                        let x = x0 + dx * nf;
                        let mut pieces = vec![];
                        for cand in &self.blockers {
                            if let Blocker::LeftHalfStrip { x_max, y_low: syl, y_high: syh } = cand
                            {
                                if x <= x_max + INEQ_TOL {
                                    pieces.push((syl.value_at(0.0), *syh));
                                }
                            }
                        }
                        if !interval_covered(lo, hi, &pieces) {
                            return Ok(false);
                        }
                    }
                }
                Blocker::SampledCurve { .. } => unreachable!(),
            }
        }
        Ok(true)
    }

    /// Whether the punctured sector `{0 < |c| < rho, |Arg c| < delta}` is
    /// free of members of `{c : Ω + c ⊂ Ω}`.
    ///
    /// A deterministic sample grid is always scanned; on exact domains built
    /// from affine slit families an additional lattice argument makes the
    /// positive answer a certificate: any member's real part must line up
    /// two slit lattices, so members in the sector are confined to finitely
    /// many abscissas, each of which is probed exactly.
    pub fn sector_gap(
        &self,
        rho: f64,
        delta: f64,
        samples: usize,
    ) -> Result<bool, GeometryError> {
        assert!(rho > 0.0 && delta > 0.0 && samples >= 1, "sector parameters must be positive");
        // Starlike domains contain every small positive real translate.
        if self.exactness == Exactness::Exact
            && self.starlike_at_infinity()?
            && self.contains_translate(Complex::new(rho / 2.0, 0.0))?
        {
            return Ok(false);
        }
        // Deterministic polar grid over the sector.
        let k = (samples as f64).sqrt().ceil() as usize;
        let mut undecided = None;
        for i in 0..k {
            let r = rho * (i as f64 + 0.5) / k as f64;
            for j in 0..k {
                let th = if k == 1 {
                    0.0
                } else {
                    -delta + 2.0 * delta * (j as f64 + 0.5) / k as f64
                };
                let c = Complex::from_polar(r, th);
                match self.contains_translate(c) {
                    Ok(true) => return Ok(false),
                    Ok(false) => {}
                    Err(GeometryError::UndecidableSampled(m)) => {
                        undecided.get_or_insert(m);
                    }
                    Err(e) => return Err(e),
                }
            }
        }
        if let Some(m) = undecided {
            return Err(GeometryError::UndecidableSampled(m));
        }
        if self.exactness == Exactness::Sampled {
            // No member found at any sample; report a gap (approximate).
            return Ok(true);
        }
        // Exact lattice certificate where available.
        let real_candidates = self.member_abscissa_candidates(rho);
        match (real_candidates, self.base) {
            (Some(cands), BaseSpace::Strip { .. }) => {
                // Members are real; probe every candidate abscissa and every
                // midpoint between consecutive candidates.
                let mut probes: Vec<f64> = vec![];
                let mut sorted = cands;
                sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
                sorted.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
                for w in sorted.windows(2) {
                    probes.push(0.5 * (w[0] + w[1]));
                }
                probes.extend(sorted);
                probes.push(rho / 2.0);
                for r in probes {
                    if r > 1e-12 && r < rho && self.contains_translate(Complex::new(r, 0.0))? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            (Some(cands), _) => {
                // Any member has its abscissa among the candidates; probe a
                // vertical ladder over each one that meets the sector.
                for r in cands {
                    if r.abs() >= rho {
                        continue;
                    }
                    let t_max = if r > 0.0 { r * delta.tan().min(1e3) } else { rho };
                    let t_probes = 64;
                    for i in 0..=t_probes {
                        let t = t_max * i as f64 / t_probes as f64;
                        for sign in [1.0, -1.0] {
                            let c = Complex::new(r, sign * t);
                            if c.norm() <= 1e-12 || c.norm() >= rho {
                                continue;
                            }
                            if c.arg().abs() >= delta {
                                continue;
                            }
                            if self.contains_translate(c)? {
                                return Ok(false);
                            }
                        }
                    }
                }
                Ok(true)
            }
            (None, _) => Ok(true), // fall back to the sampled verdict above
        }
    }

    /// Candidate abscissas for members of the translation semigroup inside
    /// `|Re c| < rho`: lattice alignments of slit-family pairs plus the
    /// thresholds where a half-strip comparison changes sign.  Returns
    /// `None` when the blocker mix admits no such finite confinement.
    fn member_abscissa_candidates(&self, rho: f64) -> Option<Vec<f64>> {
        let mut cands: Vec<f64> = vec![];
        let mut has_infinite_slits = false;
        for blk in &self.blockers {
            match blk {
                Blocker::SlitFamily { indices, .. } => {
                    if !indices.is_finite() {
                        has_infinite_slits = true;
                    }
                }
                Blocker::LeftHalfStrip { .. } => {}
                Blocker::HorizontalRays { .. } => return None,
                Blocker::SampledCurve { .. } => return None,
            }
        }
        if !has_infinite_slits {
            return None;
        }
        for a in &self.blockers {
            let Blocker::SlitFamily { x0: xa, dx: dxa, indices: ia, .. } = a else { continue };
            if ia.is_finite() {
                continue;
            }
            for b in &self.blockers {
                match b {
                    Blocker::SlitFamily { x0: xb, dx: dxb, .. } => {
                        // Re c with xa - Re c on the lattice of b.
                        let base = xa - xb;
                        let step = dxb.abs();
                        if step < 1e-14 {
                            continue;
                        }
                        let kmin = ((-rho - base) / step).floor() as i64 - 1;
                        let kmax = ((rho - base) / step).ceil() as i64 + 1;
                        for kk in kmin..=kmax {
                            let r = base + kk as f64 * step;
                            if r.abs() <= rho + 1e-9 {
                                cands.push(r);
                            }
                        }
                    }
                    Blocker::LeftHalfStrip { x_max, .. } => {
                        // Threshold where the leading slits slide under the
                        // half-strip edge: x(n) ≤ x_max first binds at the
                        // family's rightmost slit.
                        let lead = match (dxa > &0.0, a) {
                            (_, Blocker::SlitFamily { x0, dx, indices, .. }) => {
                                match indices {
                                    IndexSet::Naturals => {
                                        if *dx < 0.0 {
                                            Some(*x0)
                                        } else {
                                            None
                                        }
                                    }
                                    IndexSet::Integers => None,
                                    IndexSet::Range { start, end } => Some(
                                        (x0 + dx * *start as f64).max(x0 + dx * *end as f64),
                                    ),
                                }
                            }
                            _ => None,
                        };
                        if let Some(lead) = lead {
                            cands.push(lead - x_max);
                        }
                    }
                    _ => {}
                }
            }
        }
        Some(cands)
    }

    /// Classifies the increasing union `S = ⋃_{n≥0} (Ω − n)`.
    ///
    /// A complement point survives into `ℂ∖S` only if all its rightward
    /// integer translates stay in the complement.  Half-strips and leftward
    /// rays always evaporate; a slit family survives only when its lattice
    /// is invariant under unit shifts and its index set reaches rightward,
    /// in which case its persistent vertical band is read off the extent
    /// slopes.
    pub fn base_of_union(&self) -> Result<UnionClass, GeometryError> {
        if self.exactness == Exactness::Sampled {
            return Err(GeometryError::UnsupportedSampled(
                "union classification needs affine blockers",
            ));
        }
        if !self.contains_translate(Complex::new(1.0, 0.0))? {
            return Err(GeometryError::InvalidDomain(
                "base_of_union requires Ω + 1 ⊂ Ω".into(),
            ));
        }
        if let BaseSpace::Strip { a, b } = self.base {
            return Ok(UnionClass::StripLike { a, b });
        }
        // Persistent bands of slit families.
        let mut bands: Vec<(f64, f64)> = vec![];
        let (bot, top) = self.base.y_range();
        for blk in &self.blockers {
            let Blocker::SlitFamily { dx, y_low, y_high, indices, .. } = blk else {
                continue;
            };
            if indices.is_finite() || dx.abs() < 1e-14 {
                continue;
            }
            let inv = 1.0 / dx;
            if (inv - inv.round()).abs() > CONGRUENCE_TOL {
                continue; // unit shift leaves the lattice
            }
            let rightward = match indices {
                IndexSet::Integers => true,
                IndexSet::Naturals => *dx > 0.0,
                IndexSet::Range { .. } => false,
            };
            if !rightward {
                continue;
            }
            // Asymptotic vertical band along increasing abscissa: the index
            // grows like sign(dx)·∞.
            let dir = if *dx > 0.0 { 1.0 } else { -1.0 };
            let lo = match y_low {
                Extent::MinusInf => f64::NEG_INFINITY,
                Extent::PlusInf => f64::INFINITY,
                Extent::Affine { offset, slope } => {
                    let s = slope * dir;
                    if s > 0.0 {
                        f64::INFINITY // slides up and away: nothing persists
                    } else if s < 0.0 {
                        f64::NEG_INFINITY
                    } else {
                        *offset
                    }
                }
            };
            let hi = match y_high {
                Extent::PlusInf => f64::INFINITY,
                Extent::MinusInf => f64::NEG_INFINITY,
                Extent::Affine { offset, slope } => {
                    let s = slope * dir;
                    if s < 0.0 {
                        f64::NEG_INFINITY
                    } else if s > 0.0 {
                        f64::INFINITY
                    } else {
                        *offset
                    }
                }
            };
            let lo = lo.max(bot);
            let hi = hi.min(top);
            if lo < hi {
                bands.push((lo, hi));
            }
        }
        match self.base {
            BaseSpace::Plane => {
                if bands.is_empty() {
                    Ok(UnionClass::FullPlane)
                } else if bands.iter().all(|&(_, hi)| hi < f64::INFINITY) {
                    Ok(UnionClass::ContainsUpperHalfPlane)
                } else if bands.iter().all(|&(lo, _)| lo > f64::NEG_INFINITY) {
                    Ok(UnionClass::ContainsLowerHalfPlane)
                } else {
                    Err(GeometryError::InvalidDomain(
                        "union of translates contains no half-plane".into(),
                    ))
                }
            }
            BaseSpace::UpperHalfPlane => {
                if bands.iter().any(|&(_, hi)| hi == f64::INFINITY) {
                    Err(GeometryError::InvalidDomain(
                        "union of translates contains no half-plane".into(),
                    ))
                } else {
                    Ok(UnionClass::ContainsUpperHalfPlane)
                }
            }
            BaseSpace::LowerHalfPlane => {
                if bands.iter().any(|&(lo, _)| lo == f64::NEG_INFINITY) {
                    Err(GeometryError::InvalidDomain(
                        "union of translates contains no half-plane".into(),
                    ))
                } else {
                    Ok(UnionClass::ContainsLowerHalfPlane)
                }
            }
            BaseSpace::Strip { .. } => unreachable!(),
        }
    }
}

// ---------------------------------------------------------------------------
// Distances.
// ---------------------------------------------------------------------------

fn segment_distance(z: Complex, x: f64, y_lo: f64, y_hi: f64) -> f64 {
    let dy = if z.im < y_lo {
        y_lo - z.im
    } else if z.im > y_hi {
        z.im - y_hi
    } else {
        0.0
    };
    ((z.re - x).powi(2) + dy * dy).sqrt()
}

fn blocker_distance(blk: &Blocker, z: Complex) -> f64 {
    match blk {
        Blocker::SlitFamily { x0, dx, y_low, y_high, indices } => {
            let mut d = f64::INFINITY;
            let centers: Vec<i64> = if dx.abs() < 1e-14 {
                indices.window(4096).collect()
            } else {
                let m = (z.re - x0) / dx;
                let m0 = m.floor() as i64;
                (m0 - 1..=m0 + 2).filter(|n| indices.contains(*n)).collect()
            };
            for n in centers {
                let nf = n as f64;
                d = d.min(segment_distance(
                    z,
                    x0 + dx * nf,
                    y_low.value_at(nf),
                    y_high.value_at(nf),
                ));
            }
            d
        }
        Blocker::LeftHalfStrip { x_max, y_low, y_high } => {
            let lo = y_low.value_at(0.0);
            let hi = *y_high;
            let dx = (z.re - x_max).max(0.0);
            let dy = if z.im < lo {
                lo - z.im
            } else if z.im > hi {
                z.im - hi
            } else {
                0.0
            };
            (dx * dx + dy * dy).sqrt()
        }
        Blocker::HorizontalRays { y0, dy, x_max, indices } => {
            let mut d = f64::INFINITY;
            let centers: Vec<i64> = if dy.abs() < 1e-14 {
                indices.window(4096).collect()
            } else {
                let m = (z.im - y0) / dy;
                let m0 = m.floor() as i64;
                (m0 - 1..=m0 + 2).filter(|n| indices.contains(*n)).collect()
            };
            for n in centers {
                let nf = n as f64;
                let y = y0 + dy * nf;
                let ddx = (z.re - x_max.value_at(nf)).max(0.0);
                let ddy = (z.im - y).abs();
                d = d.min((ddx * ddx + ddy * ddy).sqrt());
            }
            d
        }
        Blocker::SampledCurve { points, repeat, .. } => {
            let offsets: Vec<Complex> = match repeat {
                None => vec![Complex::new(0.0, 0.0)],
                Some(rep) => {
                    let v = rep.step;
                    let centers: Vec<i64> = if v.norm_sqr() < 1e-28 {
                        rep.indices.window(4096).collect()
                    } else {
                        let anchor = points[points.len() / 2];
                        let m = ((z - anchor) * v.conj()).re / v.norm_sqr();
                        let m0 = m.floor() as i64;
                        (m0 - 2..=m0 + 3).filter(|n| rep.indices.contains(*n)).collect()
                    };
                    centers.iter().map(|&n| v * n as f64).collect()
                }
            };
            let mut d = f64::INFINITY;
            for off in offsets {
                let w = z - off;
                for seg in points.windows(2) {
                    d = d.min(point_segment_distance(w, seg[0], seg[1]));
                }
                if let Some(tail) = tail_direction(blk) {
                    let last = *points.last().unwrap();
                    // Vertical ray from the last sample.
                    let s = ((w.im - last.im) / tail.im).max(0.0);
                    let proj = last + tail * s;
                    d = d.min((w - proj).norm());
                }
            }
            d
        }
    }
}

fn point_segment_distance(z: Complex, a: Complex, b: Complex) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let t = (((z - a) * ab.conj()).re / len2).clamp(0.0, 1.0);
    (z - (a + ab * t)).norm()
}

/// Unit vertical tail direction of a sampled curve, if declared.
fn tail_direction(blk: &Blocker) -> Option<Complex> {
    let Blocker::SampledCurve { points, tail_rule, .. } = blk else { return None };
    if tail_rule != "vertical" {
        return None;
    }
    let last = points[points.len() - 1];
    let prev = points[points.len() - 2];
    let dir = if last.im >= prev.im { 1.0 } else { -1.0 };
    Some(Complex::new(0.0, dir))
}

/// Probe points along a sampled curve, including tail extension points.
fn curve_probes(points: &[Complex], blk: &Blocker) -> Vec<Complex> {
    let mut probes = points.to_vec();
    if let Some(tail) = tail_direction(blk) {
        let last = *points.last().unwrap();
        let step = points
            .windows(2)
            .map(|w| (w[1] - w[0]).norm())
            .fold(0.0, f64::max)
            .max(0.05);
        for i in 1..=32 {
            probes.push(last + tail * (step * i as f64));
        }
    }
    probes
}

// ---------------------------------------------------------------------------
// Reciprocal construction: a prescribed real translation semigroup.
// ---------------------------------------------------------------------------

/// Descriptor of a closed additive semigroup `A ⊂ [0, ∞)`: the naturals are
/// always included; finitely many extra points and closed rays `[r, ∞)` may
/// be added.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct SemigroupDescriptor {
    /// Extra member points beyond `0, 1, 2, …`.
    #[serde(default)]
    pub points: Vec<f64>,
    /// Left endpoints of closed rays `[r, ∞) ⊂ A`.
    #[serde(default)]
    pub rays: Vec<f64>,
}

impl SemigroupDescriptor {
    /// Just the naturals.
    pub fn naturals() -> Self {
        SemigroupDescriptor::default()
    }

    /// The full ray `[0, ∞)`.
    pub fn half_line() -> Self {
        SemigroupDescriptor { points: vec![], rays: vec![0.0] }
    }

    /// Whether `x` belongs to the described set.
    pub fn contains(&self, x: f64) -> bool {
        if x < -1e-9 {
            return false;
        }
        if (x - x.round()).abs() < 1e-9 && x.round() >= 0.0 {
            return true;
        }
        if self.points.iter().any(|p| (p - x).abs() < 1e-9) {
            return true;
        }
        self.rays.iter().any(|r| x >= r - 1e-9)
    }

    fn validate(&self) -> Result<(), GeometryError> {
        for &p in &self.points {
            if p < 0.0 {
                return Err(GeometryError::NotASemigroup(format!(
                    "point {p} lies outside [0, ∞)"
                )));
            }
        }
        for &r in &self.rays {
            if r < 0.0 {
                return Err(GeometryError::NotASemigroup(format!(
                    "ray start {r} lies outside [0, ∞)"
                )));
            }
        }
        // Closure under addition, validated on a truncation that reaches
        // past every described point and ray start.
        let mut atoms: Vec<f64> = self.points.clone();
        let reach = self
            .points
            .iter()
            .chain(self.rays.iter())
            .fold(2.0_f64, |m, &v| m.max(v));
        let truncation = (2.0 * reach + 3.0).ceil() as i64;
        for n in 0..=truncation {
            atoms.push(n as f64);
        }
        atoms.extend(self.rays.iter().copied());
        for &a in &atoms {
            for &b in &atoms {
                let s = a + b;
                if s <= 2.0 * reach + 2.0 && !self.contains(s) {
                    return Err(GeometryError::NotASemigroup(format!(
                        "{a} + {b} = {s} escapes the described set"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Builds the strip domain `Strip(0,1) ∖ ⋃_{b∈A} Γ_b` with slits
/// `Γ_b = {−b + iy : 0 ≤ y ≤ 1/2}`, whose real translation semigroup is
/// exactly the described set `A`.
pub fn build_reciprocal_domain(a: &SemigroupDescriptor) -> Result<KoenigsDomain, GeometryError> {
    a.validate()?;
    let ray_min = a.rays.iter().fold(f64::INFINITY, |m, &r| m.min(r));
    let mut blockers: Vec<Blocker> = vec![];
    let y_low = Extent::constant(0.0);
    let y_high = Extent::constant(0.5);
    // Rays first: each is a solid half-strip.
    for &r in &a.rays {
        if r <= ray_min + 1e-12 {
            blockers.push(Blocker::LeftHalfStrip {
                x_max: -r,
                y_low,
                y_high: 0.5,
            });
        }
        // Rays above ray_min are subsumed by the widest one.
    }
    // The naturals, skipping any part swallowed by a ray strip.
    if ray_min > 1e-12 {
        blockers.push(Blocker::SlitFamily {
            x0: 0.0,
            dx: -1.0,
            y_low,
            y_high,
            indices: if ray_min.is_finite() {
                // Only slits to the right of the widest ray matter.
                IndexSet::Range { start: 0, end: (ray_min.ceil() as i64).max(1) }
            } else {
                IndexSet::Naturals
            },
        });
    }
    // Extra points, skipping integers and ray-covered values.
    for &p in &a.points {
        let integral = (p - p.round()).abs() < 1e-9;
        if integral || p >= ray_min - 1e-9 {
            continue;
        }
        blockers.push(Blocker::SlitFamily {
            x0: -p,
            dx: 1.0,
            y_low,
            y_high,
            indices: IndexSet::Range { start: 0, end: 0 },
        });
    }
    KoenigsDomain::new(BaseSpace::Strip { a: 0.0, b: 1.0 }, blockers)
}

/// Deterministic polar grid over the punctured sector
/// `{0 < |c| < rho, |Arg c| < delta}`, usable for scans and plots.
pub fn sector_points(rho: f64, delta: f64, n: usize) -> Vec<Complex> {
    let k = (n as f64).sqrt().ceil() as usize;
    let mut pts = Vec::with_capacity(k * k);
    for i in 0..k {
        let r = rho * (i as f64 + 0.5) / k as f64;
        for j in 0..k {
            let th = if k == 1 {
                0.0
            } else {
                -delta + 2.0 * delta * (j as f64 + 0.5) / k as f64
            };
            pts.push(Complex::from_polar(r, th));
        }
    }
    pts
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    /// Plane minus slits `{n + iy : y ≤ -(n+1)}`, `n ∈ ℤ`: the translation
    /// semigroup is `{k + it : k ∈ ℤ, t ≥ -k}`.
    fn slanted_comb_plane() -> KoenigsDomain {
        KoenigsDomain::new(
            BaseSpace::Plane,
            vec![Blocker::SlitFamily {
                x0: 0.0,
                dx: 1.0,
                y_low: Extent::MinusInf,
                y_high: Extent::Affine { offset: -1.0, slope: -1.0 },
                indices: IndexSet::Integers,
            }],
        )
        .unwrap()
    }

    /// Upper half-plane minus the notch `{Re ≤ 0, 0 < Im ≤ 1}`.
    fn notched_half_plane() -> KoenigsDomain {
        KoenigsDomain::new(
            BaseSpace::UpperHalfPlane,
            vec![Blocker::LeftHalfStrip {
                x_max: 0.0,
                y_low: Extent::constant(0.0),
                y_high: 1.0,
            }],
        )
        .unwrap()
    }

    /// Upper half-plane minus segments `{-k + iy : 0 ≤ y ≤ 1}`, `k ∈ ℕ0`.
    fn segment_comb_half_plane() -> KoenigsDomain {
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
        .unwrap()
    }

    #[test]
    fn spec_json_roundtrip() {
        let json = r#"{"base": {"kind": "strip", "a": 0.0, "b": 1.0},
            "blockers": [{"type": "slitFamily", "x0": 0.0, "dx": -1.0,
            "yLow": {"const": 0.0}, "yHigh": {"const": 0.5},
            "indices": "naturals"}]}"#;
        let dom: KoenigsDomain = serde_json::from_str(json).unwrap();
        assert_eq!(dom.base(), BaseSpace::Strip { a: 0.0, b: 1.0 });
        assert_eq!(dom.exactness(), Exactness::Exact);
        let back = serde_json::to_string(&dom).unwrap();
        let again: KoenigsDomain = serde_json::from_str(&back).unwrap();
        assert_eq!(dom, again);
    }

    #[test]
    fn extent_serde_forms() {
        let e: Extent = serde_json::from_str("\"inf\"").unwrap();
        assert_eq!(e, Extent::PlusInf);
        let e: Extent = serde_json::from_str(r#"{"const": -1.0, "slope": -1.0}"#).unwrap();
        assert_eq!(e, Extent::Affine { offset: -1.0, slope: -1.0 });
        let e: Extent = serde_json::from_str(r#"{"const": 2.5}"#).unwrap();
        assert_eq!(e.value_at(7.0), 2.5);
    }

    #[test]
    fn slanted_comb_membership() {
        let dom = slanted_comb_plane();
        for (cc, want) in [
            (c(0.0, 0.0), true),
            (c(1.0, 0.0), true),
            (c(0.5, 0.0), false),
            (c(0.0, 1.0), true),
            (c(0.0, 2.0), true),
            (c(-1.0, 0.0), false),
            (c(2.0, 1.0), true),
            (c(1.0, 5.0), true),
            (c(-1.0, 1.0), true),   // k=-1, t=1 ≥ -k=1
            (c(-1.0, 0.5), false),  // t < -k
            (c(-2.0, 2.0), true),
            (c(0.3, 0.7), false),
        ] {
            assert_eq!(dom.contains_translate(cc).unwrap(), want, "c = {cc}");
        }
    }

    #[test]
    fn notched_half_plane_membership() {
        let dom = notched_half_plane();
        for (cc, want) in [
            (c(1.0, 0.0), true),
            (c(0.5, 0.0), true),
            (c(0.0, 1.0), true),
            (c(0.0, 0.5), true),
            (c(0.5, 0.25), true),
            (c(-0.5, 0.0), false),
            (c(0.5, -0.1), false),
            (c(-0.25, 0.5), false),
        ] {
            assert_eq!(dom.contains_translate(cc).unwrap(), want, "c = {cc}");
        }
    }

    #[test]
    fn segment_comb_membership() {
        let dom = segment_comb_half_plane();
        for (cc, want) in [
            (c(1.0, 0.0), true),
            (c(2.0, 0.5), true),
            (c(0.0, 1.5), true),
            (c(0.5, 0.0), false),
            (c(-1.0, 0.0), false),
            (c(1.0, -0.25), false),
            (c(3.0, 2.0), true),
        ] {
            assert_eq!(dom.contains_translate(cc).unwrap(), want, "c = {cc}");
        }
    }

    #[test]
    fn scan_marks_and_orders() {
        let dom = slanted_comb_plane();
        let grid = [c(0.0, 1.0), c(0.0, 2.0), c(-1.0, 0.0)];
        let out = dom.semigroup_membership_scan(&grid);
        assert_eq!(out.len(), 3);
        assert_eq!(out[0], (grid[0], Membership::Member));
        assert_eq!(out[1], (grid[1], Membership::Member));
        assert_eq!(out[2], (grid[2], Membership::NotMember));
    }

    #[test]
    fn empty_half_plane_is_free() {
        let dom = KoenigsDomain::new(BaseSpace::UpperHalfPlane, vec![]).unwrap();
        assert!(dom.contains_translate(c(1.0, 1.0)).unwrap());
        assert!(dom.starlike_at_infinity().unwrap());
        assert!(!dom.sector_gap(1.0, 0.3, 16).unwrap());
    }

    #[test]
    fn starlike_verdicts() {
        assert!(!slanted_comb_plane().starlike_at_infinity().unwrap());
        assert!(notched_half_plane().starlike_at_infinity().unwrap());
        assert!(!segment_comb_half_plane().starlike_at_infinity().unwrap());
    }

    #[test]
    fn sector_gap_on_slanted_comb() {
        let dom = slanted_comb_plane();
        assert!(dom.sector_gap(0.9, std::f64::consts::FRAC_PI_8, 100).unwrap());
    }

    #[test]
    fn union_classification() {
        assert_eq!(
            slanted_comb_plane().base_of_union().unwrap(),
            UnionClass::FullPlane
        );
        assert_eq!(
            segment_comb_half_plane().base_of_union().unwrap(),
            UnionClass::ContainsUpperHalfPlane
        );
        let rec = build_reciprocal_domain(&SemigroupDescriptor::naturals()).unwrap();
        assert_eq!(rec.base_of_union().unwrap(), UnionClass::StripLike { a: 0.0, b: 1.0 });
    }

    #[test]
    fn union_requires_unit_translate() {
        let dom = KoenigsDomain::new(
            BaseSpace::Strip { a: 0.0, b: 1.0 },
            vec![Blocker::SlitFamily {
                x0: -0.3,
                dx: 1.0,
                y_low: Extent::constant(0.0),
                y_high: Extent::constant(0.5),
                indices: IndexSet::Range { start: 0, end: 0 },
            }],
        )
        .unwrap();
        assert!(matches!(
            dom.base_of_union(),
            Err(GeometryError::InvalidDomain(_))
        ));
    }

    #[test]
    fn reciprocal_naturals_matches_set() {
        let dom = build_reciprocal_domain(&SemigroupDescriptor::naturals()).unwrap();
        for (cc, want) in [
            (1.0, true),
            (2.0, true),
            (0.5, false),
            (2.5, false),
            (3.0, true),
        ] {
            assert_eq!(dom.contains_translate(c(cc, 0.0)).unwrap(), want, "c = {cc}");
        }
        // Strip base forces real members.
        assert!(!dom.contains_translate(c(1.0, 0.3)).unwrap());
        assert!(!dom.starlike_at_infinity().unwrap());
    }

    #[test]
    fn reciprocal_half_line_is_starlike() {
        let dom = build_reciprocal_domain(&SemigroupDescriptor::half_line()).unwrap();
        assert!(dom.contains_translate(c(0.3, 0.0)).unwrap());
        assert!(dom.starlike_at_infinity().unwrap());
        assert!(!dom.sector_gap(0.5, 0.2, 16).unwrap());
    }

    #[test]
    fn reciprocal_point_plus_ray() {
        let a = SemigroupDescriptor { points: vec![], rays: vec![1.0] };
        let dom = build_reciprocal_domain(&a).unwrap();
        assert!(!dom.contains_translate(c(0.5, 0.0)).unwrap());
        assert!(dom.contains_translate(c(1.25, 0.0)).unwrap());
        assert!(dom.contains_translate(c(1.0, 0.0)).unwrap());
        assert!(dom.contains_translate(c(2.0, 0.0)).unwrap());
        assert!(dom
            .sector_gap(0.5, std::f64::consts::PI / 16.0, 64)
            .unwrap());
    }

    #[test]
    fn reciprocal_rejects_non_semigroup() {
        let a = SemigroupDescriptor { points: vec![0.5], rays: vec![] };
        assert!(matches!(
            build_reciprocal_domain(&a),
            Err(GeometryError::NotASemigroup(_))
        ));
    }

    #[test]
    fn horizontal_ray_domain_membership() {
        // Plane minus rays at y = 2πk (k ≥ 0, right end M) and y = -2πk
        // (k ≥ 1, right end 0).
        let tau = std::f64::consts::TAU;
        let m_end = 2.0 * (std::f64::consts::PI.cosh()).ln();
        let dom = KoenigsDomain::new(
            BaseSpace::Plane,
            vec![
                Blocker::HorizontalRays {
                    y0: 0.0,
                    dy: tau,
                    x_max: Extent::constant(m_end),
                    indices: IndexSet::Naturals,
                },
                Blocker::HorizontalRays {
                    y0: -tau,
                    dy: -tau,
                    x_max: Extent::constant(0.0),
                    indices: IndexSet::Naturals,
                },
            ],
        )
        .unwrap();
        assert!(dom.contains_translate(c(1.0, 0.0)).unwrap());
        assert!(dom.contains_translate(c(0.0, -tau)).unwrap());
        assert!(!dom.contains_translate(c(0.0, tau)).unwrap());
        assert!(!dom.contains_translate(c(0.0, 1.0)).unwrap());
        assert!(dom.starlike_at_infinity().unwrap());
    }

    #[test]
    fn validation_rejects_floating_slits() {
        // A finite slit floating inside the plane disconnects nothing but
        // breaks simple connectivity.
        let r = KoenigsDomain::new(
            BaseSpace::Plane,
            vec![Blocker::SlitFamily {
                x0: 0.0,
                dx: 1.0,
                y_low: Extent::constant(0.0),
                y_high: Extent::constant(1.0),
                indices: IndexSet::Range { start: 0, end: 3 },
            }],
        );
        assert!(matches!(r, Err(GeometryError::InvalidDomain(_))));
    }

    #[test]
    fn validation_rejects_zero_spacing_infinite_family() {
        let r = KoenigsDomain::new(
            BaseSpace::UpperHalfPlane,
            vec![Blocker::SlitFamily {
                x0: 0.0,
                dx: 0.0,
                y_low: Extent::constant(0.0),
                y_high: Extent::constant(1.0),
                indices: IndexSet::Naturals,
            }],
        );
        assert!(matches!(r, Err(GeometryError::InvalidDomain(_))));
    }

    #[test]
    fn sampled_curve_membership_margins() {
        // Half-plane minus a repeated sampled vertical segment: copies of
        // [0, i] at every x = -k, k ∈ ℕ0.
        let pts: Vec<Complex> = (0..=20).map(|i| c(0.0, i as f64 / 20.0)).collect();
        let dom = KoenigsDomain::new(
            BaseSpace::UpperHalfPlane,
            vec![Blocker::SampledCurve {
                points: pts.clone(),
                tail_rule: "none".into(),
                repeat: Some(CurveRepeat {
                    step: c(-1.0, 0.0),
                    indices: IndexSet::Naturals,
                }),
            }],
        )
        .unwrap();
        assert_eq!(dom.exactness(), Exactness::Sampled);
        // Unit shift maps each copy onto the next: a lattice-aligned member.
        assert!(dom.contains_translate(c(1.0, 0.0)).unwrap());
        // A clearly interior shift is certified false.
        assert!(!dom.contains_translate(c(0.5, 0.0)).unwrap());

        // A truncated family genuinely loses its last copy under the shift.
        let trunc = KoenigsDomain::new(
            BaseSpace::UpperHalfPlane,
            vec![Blocker::SampledCurve {
                points: pts,
                tail_rule: "none".into(),
                repeat: Some(CurveRepeat {
                    step: c(-1.0, 0.0),
                    indices: IndexSet::Range { start: 0, end: 39 },
                }),
            }],
        )
        .unwrap();
        assert!(!trunc.contains_translate(c(1.0, 0.0)).unwrap());
    }

    #[test]
    fn distances() {
        let dom = notched_half_plane();
        assert!(dom.in_domain(c(1.0, 1.0)));
        assert!(!dom.in_domain(c(-1.0, 0.5)));
        // Nearest complement to 1 + i/2 is the real axis below, then the
        // notch edge at distance 1.
        let d = dom.distance_to_complement(c(1.0, 0.5));
        assert!((d - 0.5).abs() < 1e-12, "distance to real axis, got {d}");
        // Interior point far from the notch: nearest complement is the real
        // axis below.
        let d2 = dom.distance_to_complement(c(5.0, 2.0));
        assert!((d2 - 2.0).abs() < 1e-12, "distance to base edge, got {d2}");
    }

    #[test]
    fn sector_points_shape() {
        let pts = sector_points(0.9, 0.4, 200);
        assert!(pts.len() >= 200);
        for p in pts {
            assert!(p.norm() < 0.9 && p.arg().abs() < 0.4);
        }
    }
}
