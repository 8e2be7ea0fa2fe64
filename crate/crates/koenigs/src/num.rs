//! Shared numerical kernels: cancellation-free complex helpers, Richardson
//! extrapolation, damped Newton iteration, adaptive quadrature, an embedded
//! Runge–Kutta integrator and seeded sample grids.
//!
//! Everything in this module is generic plumbing used by the analytic
//! modules; nothing here knows about self-maps or Koenigs domains.

use num_complex::Complex64 as Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Errors produced by the numerical kernels.
#[derive(Debug, Error)]
pub enum NumError {
    /// An extrapolation tableau failed to settle.
    #[error("extrapolation tableau does not converge (spread {spread:.3e})")]
    NoConvergence {
        /// Spread of the last tableau column.
        spread: f64,
    },
    /// Newton iteration ran out of steps or stalled.
    #[error("Newton iteration diverged after {steps} steps (|f| = {residual:.3e})")]
    NewtonDiverged {
        /// Steps taken before giving up.
        steps: usize,
        /// Residual magnitude at the last iterate.
        residual: f64,
    },
    /// The derivative vanished at an iterate, so no Newton step exists.
    #[error("derivative vanished near {at}")]
    ZeroDerivative {
        /// Point at which the derivative vanished.
        at: Complex,
    },
    /// Adaptive quadrature exceeded its subdivision budget.
    #[error("quadrature failed to reach tolerance {tol:.3e} (best error {best:.3e})")]
    QuadratureFailed {
        /// Requested absolute tolerance.
        tol: f64,
        /// Best error estimate achieved.
        best: f64,
    },
    /// The ODE integrator could not complete the requested time span.
    #[error("ODE integration stalled at t = {t} (step {step:.3e})")]
    IntegrationFailed {
        /// Time reached before stalling.
        t: f64,
        /// Step size at failure.
        step: f64,
    },
    /// A trajectory was certified to leave the declared domain.
    #[error("trajectory left the domain at t = {t}")]
    LeftDomain {
        /// Time at which the boundary guard triggered.
        t: f64,
    },
    /// An evaluation inside a kernel reported an error message.
    #[error("evaluation failed inside a numerical kernel: {0}")]
    Eval(String),
}

/// `exp(z) - 1` without cancellation for small `|z|`.
pub fn cexpm1(z: Complex) -> Complex {
    let (x, y) = (z.re, z.im);
    // exp(x+iy) - 1 = expm1(x)·cos y - 2 sin²(y/2) + i·exp(x)·sin y,
    // every term of size O(|z|) when |z| is small.
    let s = (y / 2.0).sin();
    Complex::new(x.exp_m1() * y.cos() - 2.0 * s * s, x.exp() * y.sin())
}

/// `log(1 + z)` without cancellation for small `|z|` (principal branch).
pub fn clog1p(z: Complex) -> Complex {
    if z.norm() > 0.5 {
        return (Complex::new(1.0, 0.0) + z).ln();
    }
    // Re log(1+z) = ln|1+z| = ln1p(2x + |z|²)/2, again term-by-term small.
    let re = 0.5 * (2.0 * z.re + z.norm_sqr()).ln_1p();
    let im = z.im.atan2(1.0 + z.re);
    Complex::new(re, im)
}

/// Result of a Richardson/Neville extrapolation: limit and error estimate.
#[derive(Debug, Clone, Copy)]
pub struct Extrapolated {
    /// Extrapolated limit at step size zero.
    pub value: Complex,
    /// Error estimate (last tableau correction plus column spread).
    pub error: f64,
}

/// Polynomial extrapolation of `values[k] = f(steps[k])` to step size `0`
/// by Neville's scheme.
///
/// The error estimate is the magnitude of the final tableau correction; it is
/// the quantity reported alongside every boundary-limit value in this crate.
/// Returns `NoConvergence` when the tableau corrections grow instead of
/// shrinking, which indicates that the sampled quantity has no limit along
/// the ladder.
pub fn neville_extrapolate(steps: &[f64], values: &[Complex]) -> Result<Extrapolated, NumError> {
    assert_eq!(steps.len(), values.len());
    let n = values.len();
    assert!(n >= 2, "need at least two ladder rungs");
    let mut tab: Vec<Complex> = values.to_vec();
    let mut prev_top = tab[0];
    let mut last_correction = (tab[1] - tab[0]).norm();
    let raw_spread = values
        .iter()
        .map(|v| (*v - values[n - 1]).norm())
        .fold(0.0, f64::max);
    for m in 1..n {
        for j in 0..n - m {
            // Interpolating polynomial through (steps[j..=j+m], tab[...]) at 0.
            let (hj, hm) = (steps[j], steps[j + m]);
            tab[j] = (hj * tab[j + 1] - hm * tab[j]) / (hj - hm);
        }
        last_correction = (tab[0] - prev_top).norm();
        prev_top = tab[0];
    }
    let error = last_correction.max(1e-16 * (1.0 + tab[0].norm()));
    if error > 10.0 * raw_spread + 1e-13 * (1.0 + tab[0].norm()) && raw_spread > 0.0 {
        return Err(NumError::NoConvergence { spread: error });
    }
    Ok(Extrapolated { value: tab[0], error })
}

/// Damped Newton iteration for `f(z) = 0` where `f` also returns `f'`.
///
/// Step damping halves the update until the residual decreases, which keeps
/// the iteration inside the basin even from mediocre seeds.
pub fn damped_newton<E, F>(
    f: F,
    seed: Complex,
    tol_abs: f64,
    max_steps: usize,
) -> Result<Complex, NumError>
where
    F: FnMut(Complex) -> Result<(Complex, Complex), E>,
    E: std::fmt::Display,
{
    let (z, residual, steps) = damped_newton_best(f, seed, tol_abs, max_steps)?;
    if residual <= tol_abs {
        Ok(z)
    } else {
        Err(NumError::NewtonDiverged { steps, residual })
    }
}

/// Like [`damped_newton`] but always reports the best iterate found, its
/// residual, and the step count — callers choose their own acceptance
/// policy (for example, accepting ulp-stagnation at a laxer threshold).
pub fn damped_newton_best<E, F>(
    mut f: F,
    seed: Complex,
    tol_abs: f64,
    max_steps: usize,
) -> Result<(Complex, f64, usize), NumError>
where
    F: FnMut(Complex) -> Result<(Complex, Complex), E>,
    E: std::fmt::Display,
{
    let mut z = seed;
    let (mut fz, mut dz) = f(z).map_err(|e| NumError::Eval(e.to_string()))?;
    let mut best = z;
    let mut best_res = fz.norm();
    for step in 0..max_steps {
        if fz.norm() <= tol_abs {
            return Ok((z, fz.norm(), step));
        }
        if dz.norm() < 1e-300 {
            if best_res.is_finite() {
                return Ok((best, best_res, step));
            }
            return Err(NumError::ZeroDerivative { at: z });
        }
        let full = fz / dz;
        let mut accepted = false;
        let mut damping = 1.0;
        for _ in 0..6 {
            let cand = z - damping * full;
            match f(cand) {
                Ok((fc, dc)) if fc.norm() < fz.norm() || fc.norm() <= tol_abs => {
                    z = cand;
                    fz = fc;
                    dz = dc;
                    accepted = true;
                    break;
                }
                _ => damping *= 0.5,
            }
        }
        if fz.norm() < best_res {
            best = z;
            best_res = fz.norm();
        }
        if !accepted {
            // Stagnation: no decrease achievable at any damping.
            return Ok((best, best_res, step));
        }
    }
    Ok((best, best_res, max_steps))
}

// 10-point Gauss–Legendre nodes (positive half) and weights on [-1, 1],
// tabulated beyond f64 precision.
#[allow(clippy::excessive_precision)]
const GL10_X: [f64; 5] = [
    0.148_874_338_981_631_21,
    0.433_395_394_129_247_19,
    0.679_409_568_299_024_41,
    0.865_063_366_688_984_51,
    0.973_906_528_517_171_72,
];
#[allow(clippy::excessive_precision)]
const GL10_W: [f64; 5] = [
    0.295_524_224_714_752_87,
    0.269_266_719_309_996_36,
    0.219_086_362_515_982_04,
    0.149_451_349_150_580_59,
    0.066_671_344_308_688_14,
];

fn gl10<E, F>(f: &mut F, a: Complex, b: Complex) -> Result<Complex, E>
where
    F: FnMut(Complex) -> Result<Complex, E>,
{
    let mid = (a + b) / 2.0;
    let half = (b - a) / 2.0;
    let mut acc = Complex::new(0.0, 0.0);
    for k in 0..5 {
        acc += GL10_W[k] * (f(mid + half * GL10_X[k])? + f(mid - half * GL10_X[k])?);
    }
    Ok(acc * half)
}

/// Adaptive quadrature of `f` along the straight segment from `a` to `b`
/// to absolute tolerance `tol`.
///
/// Bisects whenever the 10-point Gauss value of a piece disagrees with the
/// sum over its halves, so the error estimate is the usual conservative
/// difference between refinement levels.
pub fn integrate_segment<E, F>(
    mut f: F,
    a: Complex,
    b: Complex,
    tol: f64,
) -> Result<Complex, NumError>
where
    F: FnMut(Complex) -> Result<Complex, E>,
    E: std::fmt::Display,
{
    struct Piece {
        a: Complex,
        b: Complex,
        coarse: Complex,
        tol: f64,
        depth: u32,
    }
    let wrap = |e: E| NumError::Eval(e.to_string());
    let coarse = gl10(&mut f, a, b).map_err(wrap)?;
    let mut stack = vec![Piece { a, b, coarse, tol, depth: 0 }];
    let mut total = Complex::new(0.0, 0.0);
    let mut worst = 0.0_f64;
    while let Some(p) = stack.pop() {
        let mid = (p.a + p.b) / 2.0;
        let left = gl10(&mut f, p.a, mid).map_err(wrap)?;
        let right = gl10(&mut f, mid, p.b).map_err(wrap)?;
        let err = (left + right - p.coarse).norm();
        if err <= p.tol || p.depth >= 28 {
            if p.depth >= 28 {
                worst = worst.max(err);
            }
            total += left + right;
        } else {
            stack.push(Piece { a: p.a, b: mid, coarse: left, tol: p.tol / 2.0, depth: p.depth + 1 });
            stack.push(Piece { a: mid, b: p.b, coarse: right, tol: p.tol / 2.0, depth: p.depth + 1 });
        }
    }
    if worst > tol.max(1e-14) {
        return Err(NumError::QuadratureFailed { tol, best: worst });
    }
    Ok(total)
}

/// Quadrature along a polyline, splitting the tolerance across the legs.
pub fn integrate_path<E, F>(mut f: F, path: &[Complex], tol: f64) -> Result<Complex, NumError>
where
    F: FnMut(Complex) -> Result<Complex, E>,
    E: std::fmt::Display,
{
    assert!(path.len() >= 2);
    let legs = (path.len() - 1) as f64;
    let mut total = Complex::new(0.0, 0.0);
    for seg in path.windows(2) {
        if (seg[1] - seg[0]).norm() == 0.0 {
            continue;
        }
        total += integrate_segment(&mut f, seg[0], seg[1], tol / legs)?;
    }
    Ok(total)
}

/// Distance-to-boundary function used by the integrator to reject steps
/// that leave the domain.
pub type BoundaryGuard<'a> = &'a dyn Fn(&[Complex]) -> f64;

/// Options for the embedded Runge–Kutta integrator.
pub struct OdeOptions<'a> {
    /// Relative tolerance per step.
    pub rel_tol: f64,
    /// Absolute tolerance per step.
    pub abs_tol: f64,
    /// Largest step allowed.
    pub max_step: f64,
    /// Distance-to-boundary guard; a candidate step whose end state has
    /// guard value below `1e-8` is rejected, and the run aborts with
    /// `LeftDomain` once rejection forces the step below the minimum.
    pub guard: Option<BoundaryGuard<'a>>,
}

impl Default for OdeOptions<'_> {
    fn default() -> Self {
        OdeOptions { rel_tol: 1e-9, abs_tol: 1e-12, max_step: 0.1, guard: None }
    }
}

/// Minimum distance to the domain boundary accepted by the flow integrator.
pub const BOUNDARY_GUARD_DISTANCE: f64 = 1e-8;

// Dormand–Prince 5(4) coefficients.
const DP_C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const DP_B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates `y' = f(t, y)` over `[0, t_end]` with the Dormand–Prince 5(4)
/// embedded pair, complex state treated componentwise.
pub fn integrate_ode<E, F>(
    mut f: F,
    t_end: f64,
    y0: &[Complex],
    opts: &OdeOptions,
) -> Result<Vec<Complex>, NumError>
where
    F: FnMut(f64, &[Complex]) -> Result<Vec<Complex>, E>,
    E: std::fmt::Display,
{
    let wrap = |e: E| NumError::Eval(e.to_string());
    let dim = y0.len();
    let mut y = y0.to_vec();
    let mut t = 0.0;
    if t_end == 0.0 {
        return Ok(y);
    }
    let mut h = (t_end / 20.0).min(opts.max_step).max(1e-10);
    let min_step = 1e-13 * t_end.max(1.0);
    let mut k: Vec<Vec<Complex>> = Vec::with_capacity(7);
    while t < t_end {
        h = h.min(t_end - t).min(opts.max_step);
        k.clear();
        k.push(f(t, &y).map_err(wrap)?);
        for stage in 0..6 {
            let mut ys = y.clone();
            for (j, kj) in k.iter().enumerate() {
                let a = DP_A[stage][j];
                if a != 0.0 {
                    for d in 0..dim {
                        ys[d] += h * a * kj[d];
                    }
                }
            }
            k.push(f(t + DP_C[stage] * h, &ys).map_err(wrap)?);
        }
        let mut y5 = y.clone();
        let mut y4 = y.clone();
        for (j, kj) in k.iter().enumerate() {
            for d in 0..dim {
                y5[d] += h * DP_B5[j] * kj[d];
                y4[d] += h * DP_B4[j] * kj[d];
            }
        }
        let mut err = 0.0_f64;
        for d in 0..dim {
            let scale = opts.abs_tol + opts.rel_tol * y5[d].norm().max(y[d].norm());
            err = err.max((y5[d] - y4[d]).norm() / scale);
        }
        let boundary_ok = match opts.guard {
            Some(g) => g(&y5) > BOUNDARY_GUARD_DISTANCE,
            None => true,
        };
        if err <= 1.0 && boundary_ok {
            t += h;
            y = y5;
            h *= (0.9 * err.max(1e-10).powf(-0.2)).clamp(0.2, 5.0);
        } else {
            h *= if boundary_ok {
                (0.9 * err.powf(-0.2)).clamp(0.1, 0.9)
            } else {
                0.5
            };
            if h < min_step {
                return Err(if boundary_ok {
                    NumError::IntegrationFailed { t, step: h }
                } else {
                    NumError::LeftDomain { t }
                });
            }
        }
    }
    Ok(y)
}

/// Reproducible pseudo-random points in the disc `|z| <= max_radius`.
pub fn disc_grid(seed: u64, n: usize, max_radius: f64) -> Vec<Complex> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            // Area-uniform sampling keeps the grid from clustering at 0.
            let r = max_radius * rng.gen::<f64>().sqrt();
            let th = std::f64::consts::TAU * rng.gen::<f64>();
            Complex::from_polar(r, th)
        })
        .collect()
}

/// Reproducible pseudo-random points in the upper half-plane with
/// `re` in `[-re_span, re_span]` and `im` in `[im_low, im_high]`.
pub fn halfplane_grid(seed: u64, n: usize, re_span: f64, im_low: f64, im_high: f64) -> Vec<Complex> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            Complex::new(
                rng.gen_range(-re_span..re_span),
                rng.gen_range(im_low..im_high),
            )
        })
        .collect()
}

/// Number of worker threads to use for batch scans: the `KOENIGS_THREADS`
/// environment variable when set, otherwise the machine parallelism.
pub fn thread_budget() -> usize {
    let avail = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    match std::env::var("KOENIGS_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
    {
        Some(n) if n >= 1 => n.min(avail.max(1)),
        _ => avail,
    }
}

/// Applies `f` to every item, splitting the batch across `thread_budget()`
/// workers. Falls back to a sequential map for small batches.
pub fn parallel_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync,
{
    let threads = thread_budget();
    if threads <= 1 || items.len() < 8 {
        return items.iter().map(&f).collect();
    }
    let chunk = items.len().div_ceil(threads);
    let mut out: Vec<Option<U>> = Vec::with_capacity(items.len());
    out.resize_with(items.len(), || None);
    std::thread::scope(|scope| {
        for (ci, (in_chunk, out_chunk)) in
            items.chunks(chunk).zip(out.chunks_mut(chunk)).enumerate()
        {
            let _ = ci;
            let f = &f;
            scope.spawn(move || {
                for (slot, item) in out_chunk.iter_mut().zip(in_chunk) {
                    *slot = Some(f(item));
                }
            });
        }
    });
    out.into_iter().map(|v| v.expect("worker filled slot")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn cexpm1_matches_naive_at_moderate_size() {
        let z = Complex::new(0.3, -0.7);
        let naive = z.exp() - Complex::new(1.0, 0.0);
        assert_abs_diff_eq!(cexpm1(z).re, naive.re, epsilon = 1e-15);
        assert_abs_diff_eq!(cexpm1(z).im, naive.im, epsilon = 1e-15);
    }

    #[test]
    fn cexpm1_keeps_precision_for_tiny_arguments() {
        let z = Complex::new(1e-13, -3e-13);
        let v = cexpm1(z);
        // exp(z)-1 = z + z²/2 + ... ; the z² term is below double noise here.
        assert!((v - z).norm() < 1e-25);
    }

    #[test]
    fn clog1p_inverts_cexpm1() {
        for &z in &[Complex::new(1e-12, 2e-12), Complex::new(0.2, -0.1)] {
            let w = clog1p(cexpm1(z));
            assert!((w - z).norm() < 1e-15 * (1.0 + z.norm()));
        }
    }

    #[test]
    fn neville_recovers_polynomial_limit() {
        // f(h) = 3 - 2h + 5h² sampled on a ratio-10 ladder.
        let steps: Vec<f64> = (2..=6).map(|k| 10f64.powi(-k)).collect();
        let values: Vec<Complex> = steps
            .iter()
            .map(|&h| Complex::new(3.0 - 2.0 * h + 5.0 * h * h, 0.0))
            .collect();
        let ex = neville_extrapolate(&steps, &values).unwrap();
        assert_abs_diff_eq!(ex.value.re, 3.0, epsilon = 1e-12);
        assert!(ex.error < 1e-10);
    }

    #[test]
    fn newton_finds_complex_root() {
        // z² + 1 = 0 from a seed near i.
        let root = damped_newton(
            |z| Ok::<_, std::convert::Infallible>((z * z + Complex::new(1.0, 0.0), 2.0 * z)),
            Complex::new(0.2, 0.8),
            1e-14,
            50,
        )
        .unwrap();
        assert!((root - Complex::new(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn quadrature_integrates_exponential() {
        let a = Complex::new(0.0, 0.0);
        let b = Complex::new(1.0, 1.0);
        let got = integrate_segment(|z| Ok::<_, std::convert::Infallible>(z.exp()), a, b, 1e-12)
            .unwrap();
        let want = b.exp() - a.exp();
        assert!((got - want).norm() < 1e-11);
    }

    #[test]
    fn ode_integrates_linear_system() {
        // y' = iy has solution e^{it} y0.
        let y = integrate_ode(
            |_, y| Ok::<_, std::convert::Infallible>(vec![Complex::new(0.0, 1.0) * y[0]]),
            2.0,
            &[Complex::new(1.0, 0.0)],
            &OdeOptions::default(),
        )
        .unwrap();
        let want = Complex::new(0.0, 2.0).exp();
        assert!((y[0] - want).norm() < 1e-8);
    }

    #[test]
    fn grids_are_reproducible() {
        assert_eq!(disc_grid(7, 16, 0.9), disc_grid(7, 16, 0.9));
        assert_ne!(disc_grid(7, 16, 0.9), disc_grid(8, 16, 0.9));
        for z in disc_grid(3, 64, 0.8) {
            assert!(z.norm() <= 0.8);
        }
    }

    #[test]
    fn parallel_map_preserves_order() {
        let items: Vec<i64> = (0..100).collect();
        let out = parallel_map(items.clone(), |x| x * x);
        for (i, v) in out.iter().enumerate() {
            assert_eq!(*v, (i * i) as i64);
        }
    }
}
