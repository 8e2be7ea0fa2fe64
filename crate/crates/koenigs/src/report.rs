//! Replication checklists for the worked examples and the JSON envelope the
//! command-line tools wrap their results in.
//!
//! Every number a report emits travels with an error estimate and the name
//! of the method that produced it; every random grid is seeded and the seed
//! is echoed, so a report can be reproduced bit for bit. [`run_example`]
//! rebuilds one gallery model and walks its claim checklist — membership
//! tables of the translation semigroup, commutation and non-commutation
//! witnesses, embeddability verdicts, and the commutation constants of flow
//! elements — recording a pass/fail line per claim.

use num_complex::Complex64 as Complex;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::abel::AbelError;
use crate::centralizer::{self, CentralizerError, EmbeddingOutcome};
use crate::classify::{self, ClassifyError, MapType, StepVerdict};
use crate::gallery::{self, ExampleId};
use crate::geometry::{GeometryError, KoenigsDomain, SemigroupDescriptor};
use crate::maps::{BranchContext, HoloMap, MapError};
use crate::num::disc_grid;
use crate::semiflow::{self, Ambient, SemiflowError, SemigroupSpec};

const ONE: Complex = Complex::new(1.0, 0.0);
const I: Complex = Complex::new(0.0, 1.0);
const TAU: f64 = std::f64::consts::TAU;

/// Version stamp of the JSON report layout.
pub const SCHEMA_VERSION: u32 = 1;

/// Grid size of the commutation scans in the replication suite.
const COMMUTE_GRID: usize = 120;

/// Errors from building reports.
#[derive(Debug, Error)]
pub enum ReportError {
    /// A replication claim did not hold.
    #[error("claim failed in {example}: {name}: {detail}")]
    ClaimFailed {
        /// Example the claim belongs to.
        example: String,
        /// Name of the failing claim.
        name: String,
        /// Its recorded numerics.
        detail: String,
    },
    /// Map evaluation failed while building an example.
    #[error(transparent)]
    Map(#[from] MapError),
    /// Domain geometry failed.
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    /// Classification failed.
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    /// Abel machinery failed.
    #[error(transparent)]
    Abel(#[from] AbelError),
    /// Centralizer machinery failed.
    #[error(transparent)]
    Centralizer(#[from] CentralizerError),
    /// Semigroup machinery failed.
    #[error(transparent)]
    Semiflow(#[from] SemiflowError),
}

/// The envelope around every JSON report: a schema stamp, the command that
/// produced it, and the seed of all random grids used along the way.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ReportEnvelope {
    /// Layout version, always [`SCHEMA_VERSION`].
    pub schema: u32,
    /// The command that produced the report.
    pub command: String,
    /// Seed of the pseudo-random sample grids.
    pub seed: u64,
    /// Command-specific payload.
    pub body: Value,
}

impl ReportEnvelope {
    /// Wraps a payload with the schema stamp, command name and seed echo.
    pub fn new(command: &str, seed: u64, body: Value) -> Self {
        ReportEnvelope { schema: SCHEMA_VERSION, command: command.to_string(), seed, body }
    }

    /// The envelope as a JSON value.
    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("envelope serializes")
    }

    /// Pretty-printed JSON text of the envelope.
    pub fn to_pretty_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("envelope serializes")
    }
}

/// Checks that a JSON value has the report envelope shape.
pub fn validate_envelope(v: &Value) -> Result<(), String> {
    let obj = v.as_object().ok_or("report must be a JSON object")?;
    match obj.get("schema").and_then(Value::as_u64) {
        Some(s) if s == SCHEMA_VERSION as u64 => {}
        Some(s) => return Err(format!("unsupported schema version {s}")),
        None => return Err("missing integer field 'schema'".to_string()),
    }
    if !obj.get("command").map(Value::is_string).unwrap_or(false) {
        return Err("missing string field 'command'".to_string());
    }
    if !obj.get("seed").map(Value::is_u64).unwrap_or(false) {
        return Err("missing integer field 'seed'".to_string());
    }
    if !obj.contains_key("body") {
        return Err("missing field 'body'".to_string());
    }
    Ok(())
}

/// JSON shape `[re, im]` of a complex number.
pub fn complex_value(z: Complex) -> Value {
    json!([z.re, z.im])
}

/// JSON record of a reported number: value, error estimate and the method
/// that produced it.
pub fn measured_value(value: Complex, error: f64, method: &str) -> Value {
    json!({ "value": complex_value(value), "error": error, "method": method })
}

/// One verified assertion about a worked example.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Claim {
    /// What the claim asserts.
    pub name: String,
    /// Whether it held.
    pub passed: bool,
    /// The numerics behind the verdict.
    pub detail: String,
}

/// The claim checklist outcome of one worked example.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExampleReport {
    /// Example identifier (its command-line slug).
    pub example: String,
    /// Seed of the sample grids used.
    pub seed: u64,
    /// The claims, in checklist order.
    pub claims: Vec<Claim>,
}

impl ExampleReport {
    /// Whether every claim held.
    pub fn passed(&self) -> bool {
        self.claims.iter().all(|c| c.passed)
    }

    /// The first failing claim, if any.
    pub fn first_failure(&self) -> Option<&Claim> {
        self.claims.iter().find(|c| !c.passed)
    }

    /// Errors with the first failing claim and its numerics.
    pub fn require_pass(&self) -> Result<(), ReportError> {
        match self.first_failure() {
            None => Ok(()),
            Some(claim) => Err(ReportError::ClaimFailed {
                example: self.example.clone(),
                name: claim.name.clone(),
                detail: claim.detail.clone(),
            }),
        }
    }

    /// The report as a JSON value.
    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

fn fc(z: Complex) -> String {
    format!("{:.6}{:+.6}i", z.re, z.im)
}

struct Checklist {
    example: &'static str,
    seed: u64,
    claims: Vec<Claim>,
}

impl Checklist {
    fn new(id: ExampleId, seed: u64) -> Self {
        Checklist { example: id.slug(), seed, claims: Vec::new() }
    }

    fn push(&mut self, name: &str, passed: bool, detail: String) {
        self.claims.push(Claim { name: name.to_string(), passed, detail });
    }

    fn close(&mut self, name: &str, got: Complex, want: Complex, tol: f64) {
        let diff = (got - want).norm();
        self.push(
            name,
            diff <= tol,
            format!("got {}, expected {} (|Δ| = {:.3e}, tolerance {:.1e})", fc(got), fc(want), diff, tol),
        );
    }

    fn membership(
        &mut self,
        name: &str,
        domain: &KoenigsDomain,
        rows: &[(Complex, bool)],
    ) -> Result<(), ReportError> {
        let mut all = true;
        let mut parts = Vec::with_capacity(rows.len());
        for &(b, want) in rows {
            let got = domain.contains_translate(b)?;
            if got != want {
                all = false;
            }
            parts.push(format!(
                "{} {}{}",
                fc(b),
                if got { "∈ A" } else { "∉ A" },
                if got == want { "" } else { " (UNEXPECTED)" },
            ));
        }
        self.push(name, all, parts.join("; "));
        Ok(())
    }

    fn finish(self) -> ExampleReport {
        ExampleReport { example: self.example.to_string(), seed: self.seed, claims: self.claims }
    }
}

/// Rebuilds one worked example and runs its claim checklist.
///
/// All sample grids derive from `seed`; the same seed reproduces the same
/// report bit for bit. Failing claims are recorded, not raised — use
/// [`ExampleReport::require_pass`] to turn the first failure into an error.
pub fn run_example(
    id: ExampleId,
    seed: u64,
    ctx: &BranchContext,
) -> Result<ExampleReport, ReportError> {
    match id {
        ExampleId::ParabolicAutomorphism => parabolic_automorphism_claims(seed, ctx),
        ExampleId::SlantedComb => slanted_comb_claims(seed, ctx),
        ExampleId::NotchedHalfPlane => notched_half_plane_claims(seed, ctx),
        ExampleId::VerticalSlits => vertical_slit_claims(seed, ctx),
        ExampleId::CurvedSlits => curved_slit_claims(seed, ctx),
        ExampleId::ReciprocalSemigroup => reciprocal_claims(seed, ctx),
    }
}

/// Runs every example checklist in gallery order.
pub fn run_all(seed: u64, ctx: &BranchContext) -> Result<Vec<ExampleReport>, ReportError> {
    ExampleId::all().into_iter().map(|id| run_example(id, seed, ctx)).collect()
}

// ---------------------------------------------------------------------------
// Per-example checklists.
// ---------------------------------------------------------------------------

/// Unit shift of the Cayley chart: the parabolic disc automorphism whose
/// Koenigs domain is the full half-plane.
fn parabolic_automorphism_claims(
    seed: u64,
    ctx: &BranchContext,
) -> Result<ExampleReport, ReportError> {
    let mut list = Checklist::new(ExampleId::ParabolicAutomorphism, seed);
    let charted = gallery::half_plane_model();
    let phi = charted.model(ONE)?;

    let cls = classify::classify_type(&phi, Complex::new(0.1, 0.0), ctx)?;
    list.push(
        "the unit shift of the half-plane chart is a parabolic automorphism of positive hyperbolic step",
        cls.map_type == MapType::ParabolicPositiveStep && cls.automorphism,
        format!("classified {:?}, automorphism: {}", cls.map_type, cls.automorphism),
    );
    list.close("the Denjoy–Wolff point sits at 1", cls.tau, ONE, 1e-2);

    list.membership(
        "the translation semigroup holds the real axis and the closed upper half-plane",
        &charted.domain,
        &[
            (ONE, true),
            (-ONE, true),
            (I, true),
            (Complex::new(2.0, 3.0), true),
            (Complex::new(-5.0, 0.1), true),
            (-I, false),
            (Complex::new(0.3, -0.01), false),
        ],
    )?;

    let psi_i = charted.model(I)?;
    let check = centralizer::commutes(&phi, &psi_i, COMMUTE_GRID, 1e-8, seed ^ 0x11, ctx)?;
    list.push(
        "the vertical unit shift commutes with the map",
        check.commutes,
        format!(
            "worst commutator {:.3e} over {} points (tolerance {:.1e})",
            check.residual, check.grid_size, check.tolerance
        ),
    );

    let cls_i = classify::classify_type(&psi_i, Complex::new(0.1, 0.0), ctx)?;
    list.push(
        "the vertical shift is parabolic of zero hyperbolic step",
        cls_i.map_type == MapType::ParabolicZeroStep,
        format!("classified {:?}", cls_i.map_type),
    );

    let s_i = centralizer::s_map(&phi, &psi_i, &cls, ctx)?;
    list.close(
        "the commutation constant of the vertical shift is i",
        s_i.value,
        I,
        1e-8 + 3.0 * s_i.error_estimate,
    );
    let c = Complex::new(2.0, 0.5);
    let s_c = centralizer::s_map(&phi, &charted.model(c)?, &cls, ctx)?;
    list.close(
        "the commutation constant of a slanted shift matches it",
        s_c.value,
        c,
        1e-8 + 3.0 * s_c.error_estimate,
    );

    let s_quot = centralizer::s_map(
        &phi,
        &HoloMap::compose(phi.clone(), psi_i.clone()),
        &cls,
        ctx,
    )?;
    list.close(
        "composing with the map itself adds 1 to the constant",
        s_quot.value,
        ONE + I,
        1e-8 + 3.0 * s_quot.error_estimate,
    );

    let verdict = centralizer::embeddable_verdict(&phi, 0.9, std::f64::consts::FRAC_PI_8)?;
    list.push(
        "the map embeds into the translation flow of its chart",
        verdict.verdict == EmbeddingOutcome::Embeddable && verdict.embeddable == Some(true),
        format!("verdict {:?} via {:?}", verdict.verdict, verdict.method),
    );

    Ok(list.finish())
}

/// Unit shift of the slanted-comb chart: parabolic of zero hyperbolic step,
/// not embeddable, yet with a full vertical flow in its centralizer.
fn slanted_comb_claims(seed: u64, ctx: &BranchContext) -> Result<ExampleReport, ReportError> {
    let mut list = Checklist::new(ExampleId::SlantedComb, seed);
    let charted = gallery::slanted_comb_model();
    let phi = charted.model(ONE)?;

    let cls = classify::classify_type(&phi, Complex::new(0.1, 0.0), ctx)?;
    list.push(
        "the unit shift of the comb chart is parabolic of zero hyperbolic step",
        cls.map_type == MapType::ParabolicZeroStep && !cls.automorphism,
        format!("classified {:?}, automorphism: {}", cls.map_type, cls.automorphism),
    );

    list.membership(
        "the translation semigroup is the integer comb {k + it : k whole, t ≥ −k}",
        &charted.domain,
        &[
            (ONE, true),
            (Complex::new(2.0, 0.0), true),
            (I, true),
            (Complex::new(0.0, 0.05), true),
            (Complex::new(1.0, 5.0), true),
            (Complex::new(-1.0, 2.0), true),
            (Complex::new(-2.0, 2.5), true),
            (Complex::new(0.5, 0.0), false),
            (Complex::new(1.5, 0.0), false),
            (Complex::new(-1.0, 0.5), false),
            (Complex::new(0.0, -0.05), false),
            (Complex::new(-2.0, 1.5), false),
        ],
    )?;

    let half = charted.domain.contains_translate(Complex::new(0.5, 0.0))?;
    list.push(
        "the half shift escapes: Ω + 1/2 ⊄ Ω",
        !half,
        format!("Ω + 1/2 ⊂ Ω is {half}"),
    );

    // A small vertical flow element: commuting, close to the identity, yet
    // distinct from it — the identity is not isolated in the centralizer.
    let psi_small = charted.model(Complex::new(0.0, 1.0 / 16.0))?;
    let near = centralizer::commutes(&phi, &psi_small, COMMUTE_GRID, 1e-8, seed ^ 0x21, ctx)?;
    let mut sup = 0.0_f64;
    for z in disc_grid(seed ^ 0x22, 60, 0.6) {
        sup = sup.max(psi_small.displacement(z, ctx)?.norm());
    }
    list.push(
        "a 1/16 vertical shift commutes and stays near the identity: the identity is not isolated",
        near.commutes && sup < 0.2 && sup > 1e-6,
        format!(
            "commutator residual {:.3e}; sup |ψ(z) − z| = {:.3e} on |z| ≤ 0.6",
            near.residual, sup
        ),
    );

    for b in [I, Complex::new(2.0, 1.0)] {
        let s = centralizer::s_map(&phi, &charted.model(b)?, &cls, ctx)?;
        let diff = (s.value - b).norm();
        list.push(
            &format!("the commutation constant recovers the shift {}", fc(b)),
            diff < 1e-2 && diff <= 3.0 * s.error_estimate,
            format!(
                "constant {} (error estimate {:.2e}, |Δ| = {:.2e})",
                fc(s.value),
                s.error_estimate,
                diff
            ),
        );
    }

    let verdict = centralizer::embeddable_verdict(&phi, 0.9, std::f64::consts::FRAC_PI_8)?;
    list.push(
        "no real flow absorbs the map: a sector gap certifies non-embeddability",
        verdict.verdict == EmbeddingOutcome::GapFound && verdict.embeddable == Some(false),
        format!("verdict {:?} via {:?}", verdict.verdict, verdict.method),
    );

    Ok(list.finish())
}

/// Unit shift of the notched half-plane chart: its centralizer holds both
/// the translation flow and the lifted cotangent flow, and those two do not
/// commute with each other.
fn notched_half_plane_claims(
    seed: u64,
    ctx: &BranchContext,
) -> Result<ExampleReport, ReportError> {
    let mut list = Checklist::new(ExampleId::NotchedHalfPlane, seed);
    let charted = gallery::notched_half_plane_model();
    let phi_1 = charted.model(ONE)?;
    let phi_half = charted.model(Complex::new(0.5, 0.0))?;

    let cls = classify::classify_type(&phi_1, Complex::new(0.1, 0.0), ctx)?;
    list.push(
        "the unit shift of the notched chart is parabolic of positive hyperbolic step",
        cls.map_type == MapType::ParabolicPositiveStep && !cls.automorphism,
        format!("classified {:?}, automorphism: {}", cls.map_type, cls.automorphism),
    );

    let psi_star = charted.conjugate(gallery::cot_flow(1.0));
    let inside = centralizer::commutes(&phi_1, &psi_star, COMMUTE_GRID, 1e-6, seed ^ 0x31, ctx)?;
    list.push(
        "the lifted cotangent flow at time 1 commutes with the unit shift",
        inside.commutes,
        format!(
            "worst commutator {:.3e} over {} points (tolerance {:.1e})",
            inside.residual, inside.grid_size, inside.tolerance
        ),
    );

    let witness = centralizer::commutes(&phi_half, &psi_star, COMMUTE_GRID, 1e-3, seed ^ 0x32, ctx)?;
    list.push(
        "the same flow element fails to commute with the half shift: the centralizer is non-abelian",
        !witness.commutes && witness.residual > 1e-3,
        format!(
            "worst commutator of the pair (t, s) = (1, 1/2) is {:.3e} > 1e-3",
            witness.residual
        ),
    );

    let flow_up = gallery::cot_flow(0.8);
    let mut deck = 0.0_f64;
    for j in 0..3 {
        for k in 0..3 {
            let w = Complex::new(0.2 + 0.3 * j as f64, 0.5 + 0.6 * k as f64);
            let d = (flow_up.eval(w + ONE, ctx)? - flow_up.eval(w, ctx)? - ONE).norm();
            deck = deck.max(d);
        }
    }
    list.push(
        "the cotangent flow commutes with the deck translation w ↦ w + 1",
        deck < 1e-8,
        format!("worst residual {:.3e} on a 9-point grid", deck),
    );

    let mut stayed = true;
    let mut tested = 0usize;
    for z in disc_grid(seed ^ 0x33, 30, 0.8) {
        let w = charted.chart.eval(z, ctx)?;
        let moved = flow_up.eval(w, ctx)?;
        stayed &= charted.domain.in_domain(moved);
        tested += 1;
    }
    list.push(
        "the cotangent flow maps the notched domain into itself",
        stayed && tested == 30,
        format!("{tested} chart points stayed inside after time 0.8"),
    );

    let verdict = centralizer::embeddable_verdict(&phi_1, 0.9, std::f64::consts::FRAC_PI_8)?;
    list.push(
        "the notched domain is starlike at infinity: the map is embeddable",
        verdict.verdict == EmbeddingOutcome::Embeddable && verdict.embeddable == Some(true),
        format!("verdict {:?} via {:?}", verdict.verdict, verdict.method),
    );

    let s_flow = semiflow::flow_s_value(&gallery::cot_generator(), 1.0, &phi_1, ctx)?;
    list.close(
        "the flow element's commutation constant is i/(2π)",
        s_flow.value,
        I / TAU,
        1e-6 + 3.0 * s_flow.error_estimate,
    );

    let step = classify::hyperbolic_step(&psi_star, Complex::new(0.1, 0.0), 1500, ctx)?;
    list.push(
        "the flow elements are parabolic of zero hyperbolic step",
        step.verdict == StepVerdict::ZeroStep,
        format!("step estimate {:.3e}, decreasing: {}", step.estimate, step.decreasing),
    );

    Ok(list.finish())
}

/// Half-plane minus unit vertical slits: not embeddable, with two
/// non-commuting one-parameter semigroups in the centralizer.
fn vertical_slit_claims(seed: u64, ctx: &BranchContext) -> Result<ExampleReport, ReportError> {
    let mut list = Checklist::new(ExampleId::VerticalSlits, seed);
    let dom = gallery::vertical_slit_domain();

    list.membership(
        "the translation semigroup holds the slit lattice and everything above the slit tops",
        &dom,
        &[
            (ONE, true),
            (Complex::new(2.0, 0.5), true),
            (I, true),
            (Complex::new(0.0, 0.3), true),
            (Complex::new(-0.5, 1.5), true),
            (Complex::new(0.3, 1.2), true),
            (Complex::new(0.5, 0.0), false),
            (Complex::new(-1.0, 0.0), false),
            (Complex::new(0.3, 0.5), false),
            (Complex::new(0.0, -0.1), false),
        ],
    )?;

    let star = dom.starlike_at_infinity()?;
    list.push(
        "the slit domain is not starlike at infinity",
        !star,
        format!("starlike at infinity: {star}"),
    );

    let verdict = centralizer::embeddability_of_domain(&dom, 0.9, 0.4, 400)?;
    list.push(
        "a sector gap at the real direction: the map is not embeddable",
        verdict.verdict == EmbeddingOutcome::GapFound && verdict.embeddable == Some(false),
        format!("verdict {:?} via {:?}", verdict.verdict, verdict.method),
    );

    let image = gallery::vertical_slit_image();
    let image_star = image.starlike_at_infinity()?;
    list.push(
        "the cotangent chart straightens the slits: the ray image is starlike at infinity",
        image_star,
        format!("starlike at infinity: {image_star}"),
    );

    let flow_up = gallery::cot_flow(1.0);
    let w0 = Complex::new(0.5, 0.5);
    let a = flow_up.eval(w0 + I, ctx)?;
    let b = flow_up.eval(w0, ctx)? + I;
    list.push(
        "the vertical translation flow and the cotangent flow do not commute: the centralizer is non-abelian",
        (a - b).norm() > 1e-3,
        format!("|Ψ₁(w + i) − (Ψ₁(w) + i)| = {:.3e} at w = {}", (a - b).norm(), fc(w0)),
    );

    let mut stayed = true;
    let mut tested = 0usize;
    for &x in &[0.5, 1.3, -0.45, -1.5, 2.2] {
        for &y in &[0.4, 1.1, 2.5] {
            let w = Complex::new(x, y);
            if !dom.in_domain(w) {
                continue;
            }
            tested += 1;
            let moved = flow_up.eval(w, ctx)?;
            stayed &= dom.in_domain(moved);
        }
    }
    list.push(
        "the cotangent flow maps the slit domain into itself",
        stayed && tested >= 10,
        format!("{tested} sampled points stayed inside after time 1"),
    );

    Ok(list.finish())
}

/// Half-plane minus curved slits: the translation semigroup misses every
/// small vertical shift, while the flow constants fill the vertical ray.
fn curved_slit_claims(seed: u64, ctx: &BranchContext) -> Result<ExampleReport, ReportError> {
    let mut list = Checklist::new(ExampleId::CurvedSlits, seed);
    let (dom, pts) = gallery::curved_slit_domain(160, 14.0, ctx)?;

    let mut worst = 0.0_f64;
    for a in [-0.45, -0.3, -0.1, 0.1, 0.37] {
        for t in [0.1, 0.4, 1.3, 2.0] {
            let (lhs, rhs) = gallery::level_line_criterion(a, t, ctx)?;
            worst = worst.max((lhs - rhs).abs());
        }
    }
    list.push(
        "the chart's level lines obey tan(Im h/2) = −tan(πa)·tanh(πt)",
        worst < 1e-9,
        format!("worst residual {:.3e} on a 20-point grid", worst),
    );

    let root3 = 3f64.sqrt();
    let mut drift = 0.0_f64;
    for w in &pts[..pts.len() - 1] {
        let (lhs, _) = gallery::level_line_criterion(w.re, w.im, ctx)?;
        drift = drift.max((lhs - root3).abs());
    }
    list.push(
        "the traced slit sits on the level line of value √3",
        drift < 1e-7,
        format!("worst |tan(Im h/2) − √3| = {:.3e} along {} samples", drift, pts.len() - 1),
    );

    let spread = pts.iter().map(|w| (w.re - pts[0].re).abs()).fold(0.0, f64::max);
    let last_free = pts[pts.len() - 2];
    list.push(
        "the slit is genuinely curved and lands at −1/2",
        spread > 0.05 && (last_free - Complex::new(-0.5, 0.0)).norm() < 5e-3,
        format!("abscissa spread {spread:.3}, last traced point {}", fc(last_free)),
    );

    list.membership(
        "whole translations are admissible, small vertical ones are not",
        &dom,
        &[
            (ONE, true),
            (Complex::new(2.0, 0.0), true),
            (Complex::new(0.0, 0.02), false),
            (Complex::new(0.0, 0.05), false),
            (Complex::new(0.0, 0.1), false),
        ],
    )?;

    let gap = dom.sector_gap(0.45, 0.35, 100)?;
    list.push(
        "the sampled scan finds no member in the sector around the real direction",
        gap,
        "no admissible translation of modulus below 0.45 within 0.35 radians of the real axis".to_string(),
    );

    let g = gallery::cot_generator();
    let high = g.eval(Complex::new(0.0, 6.0), ctx)?;
    let tail = (high - g.eval(Complex::new(0.0, 5.0), ctx)?)
        .norm()
        .max((high - g.eval(Complex::new(0.37, 6.0), ctx)?).norm());
    list.push(
        "the generator's limit at infinite height is i/(2π)",
        (high - I / TAU).norm() < 1e-6 && tail < 1e-6,
        format!(
            "sampled {} at height 6 (tail spread {:.1e}); flow constants t·i/(2π) fill the vertical ray",
            fc(high),
            tail
        ),
    );

    let spec = SemigroupSpec::from_generator(g, Ambient::UpperHalfPlane);
    let mut stayed = true;
    let mut tested = 0usize;
    for &x in &[0.4, -0.6, -1.6, 1.3] {
        for &y in &[0.3, 0.9, 1.8] {
            let w = Complex::new(x, y);
            if !dom.in_domain(w) {
                continue;
            }
            tested += 1;
            let moved = semiflow::flow(&spec, w, 0.5, ctx)?;
            stayed &= dom.in_domain(moved);
        }
    }
    list.push(
        "the cotangent flow maps the slit complement into itself",
        stayed && tested >= 8,
        format!("{tested} sampled points stayed inside after time 1/2"),
    );

    let vertical_missing = !dom.contains_translate(Complex::new(0.0, 0.05))?;
    let limit_ok = (high - I / TAU).norm() < 1e-6;
    list.push(
        "the constants of commuting maps strictly exceed the translation semigroup",
        vertical_missing && limit_ok && stayed,
        "flow elements realize every constant it/(2π) with t ≥ 0, while Ω admits no small vertical translation"
            .to_string(),
    );

    let _ = seed;
    Ok(list.finish())
}

/// Strip domains with prescribed real translation semigroups: the naturals
/// give a gap-certified non-embeddable map, the half-line an embeddable one.
fn reciprocal_claims(seed: u64, _ctx: &BranchContext) -> Result<ExampleReport, ReportError> {
    let mut list = Checklist::new(ExampleId::ReciprocalSemigroup, seed);

    let naturals = gallery::reciprocal_domain(&SemigroupDescriptor::naturals())?;
    list.membership(
        "the naturals domain translates only by whole steps",
        &naturals,
        &[
            (ONE, true),
            (Complex::new(2.0, 0.0), true),
            (Complex::new(3.0, 0.0), true),
            (Complex::new(0.5, 0.0), false),
            (Complex::new(1.5, 0.0), false),
            (Complex::new(std::f64::consts::SQRT_2, 0.0), false),
            (Complex::new(-1.0, 0.0), false),
            (Complex::new(0.0, 0.3), false),
        ],
    )?;
    let v_nat = centralizer::embeddability_of_domain(&naturals, 0.5, 0.3, 400)?;
    list.push(
        "with translation set ℕ₀ the commuting maps reduce to the iterates: no continuous flow",
        v_nat.verdict == EmbeddingOutcome::GapFound && v_nat.embeddable == Some(false),
        format!("verdict {:?} via {:?}", v_nat.verdict, v_nat.method),
    );

    let half_line = gallery::reciprocal_domain(&SemigroupDescriptor::half_line())?;
    list.membership(
        "the half-line domain translates by every forward shift",
        &half_line,
        &[
            (Complex::new(0.05, 0.0), true),
            (Complex::new(0.3, 0.0), true),
            (ONE, true),
            (Complex::new(1.7, 0.0), true),
            (Complex::new(-0.3, 0.0), false),
            (Complex::new(0.0, 0.2), false),
        ],
    )?;
    let v_half = centralizer::embeddability_of_domain(&half_line, 0.5, 0.3, 400)?;
    list.push(
        "the half-line domain is embeddable",
        v_half.verdict == EmbeddingOutcome::Embeddable && v_half.embeddable == Some(true),
        format!("verdict {:?} via {:?}", v_half.verdict, v_half.method),
    );

    let mixed = gallery::reciprocal_domain(&SemigroupDescriptor { points: vec![], rays: vec![2.5] })?;
    list.membership(
        "a mixed semigroup keeps its prescribed gaps",
        &mixed,
        &[
            (ONE, true),
            (Complex::new(2.5, 0.0), true),
            (Complex::new(2.7, 0.0), true),
            (Complex::new(3.3, 0.0), true),
            (Complex::new(0.5, 0.0), false),
            (Complex::new(1.5, 0.0), false),
            (Complex::new(2.3, 0.0), false),
        ],
    )?;

    Ok(list.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> BranchContext {
        BranchContext::default()
    }

    #[test]
    fn envelope_carries_schema_command_and_seed() {
        let env = ReportEnvelope::new("classify", 42, json!({"ok": true}));
        let v = env.to_value();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["command"], "classify");
        assert_eq!(v["seed"], 42);
        validate_envelope(&v).unwrap();
        let text = env.to_pretty_string();
        let back: ReportEnvelope = serde_json::from_str(&text).unwrap();
        assert_eq!(back, env);
    }

    #[test]
    fn envelope_validation_rejects_malformed_reports() {
        assert!(validate_envelope(&json!([1, 2])).is_err());
        assert!(validate_envelope(&json!({"schema": 2, "command": "x", "seed": 0, "body": {}}))
            .unwrap_err()
            .contains("schema"));
        assert!(validate_envelope(&json!({"schema": 1, "seed": 0, "body": {}}))
            .unwrap_err()
            .contains("command"));
        assert!(validate_envelope(&json!({"schema": 1, "command": "x", "body": {}}))
            .unwrap_err()
            .contains("seed"));
        assert!(validate_envelope(&json!({"schema": 1, "command": "x", "seed": 0}))
            .unwrap_err()
            .contains("body"));
    }

    #[test]
    fn measured_numbers_carry_method_and_error() {
        let v = measured_value(Complex::new(0.0, 1.0), 1e-9, "ladder");
        assert_eq!(v["value"], json!([0.0, 1.0]));
        assert_eq!(v["error"], 1e-9);
        assert_eq!(v["method"], "ladder");
    }

    #[test]
    fn parabolic_automorphism_checklist_passes() {
        let report = run_example(ExampleId::ParabolicAutomorphism, 7, &ctx()).unwrap();
        report.require_pass().unwrap_or_else(|e| panic!("{e}\n{:#?}", report.claims));
        assert!(report.claims.len() >= 8);
    }

    #[test]
    fn slanted_comb_checklist_passes() {
        let report = run_example(ExampleId::SlantedComb, 7, &ctx()).unwrap();
        report.require_pass().unwrap_or_else(|e| panic!("{e}\n{:#?}", report.claims));
        assert!(report.claims.iter().any(|c| c.name.contains("Ω + 1/2 ⊄ Ω")));
    }

    #[test]
    fn notched_half_plane_checklist_passes() {
        let report = run_example(ExampleId::NotchedHalfPlane, 7, &ctx()).unwrap();
        report.require_pass().unwrap_or_else(|e| panic!("{e}\n{:#?}", report.claims));
        assert!(report.claims.iter().any(|c| c.name.contains("non-abelian")));
    }

    #[test]
    fn vertical_slit_checklist_passes() {
        let report = run_example(ExampleId::VerticalSlits, 7, &ctx()).unwrap();
        report.require_pass().unwrap_or_else(|e| panic!("{e}\n{:#?}", report.claims));
    }

    #[test]
    fn curved_slit_checklist_passes() {
        let report = run_example(ExampleId::CurvedSlits, 7, &ctx()).unwrap();
        report.require_pass().unwrap_or_else(|e| panic!("{e}\n{:#?}", report.claims));
    }

    #[test]
    fn reciprocal_checklist_passes() {
        let report = run_example(ExampleId::ReciprocalSemigroup, 7, &ctx()).unwrap();
        report.require_pass().unwrap_or_else(|e| panic!("{e}\n{:#?}", report.claims));
    }

    #[test]
    fn reports_are_deterministic_for_a_fixed_seed() {
        let a = run_example(ExampleId::SlantedComb, 99, &ctx()).unwrap();
        let b = run_example(ExampleId::SlantedComb, 99, &ctx()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.seed, 99);
    }

    #[test]
    fn failing_claims_surface_through_require_pass() {
        let report = ExampleReport {
            example: "ex-test".to_string(),
            seed: 0,
            claims: vec![
                Claim { name: "fine".into(), passed: true, detail: "ok".into() },
                Claim { name: "broken".into(), passed: false, detail: "residual 1".into() },
            ],
        };
        assert!(!report.passed());
        let err = report.require_pass().unwrap_err();
        assert!(err.to_string().contains("broken"), "{err}");
    }
}
