//! Picard iteration with convergence diagnostics and trace export.
//!
//! [`iterate`] runs the orbit `x, T(x), T^2(x), ...` and terminates once the
//! last step distance and the residual `d(x, T(x))` both fall inside their
//! tolerances. Small steps alone can stall short of a fixed point, so both
//! conditions are required. On interval grids the continuous map drives the
//! orbit (images are not snapped to grid points); on finite sets every image
//! snaps to a member point.
//!
//! The diagnostics mirror what a contraction guarantees along its orbit:
//! step distances are nonincreasing and vanish ([`check_asymptotic_regularity`]),
//! the orbit stays bounded ([`check_boundedness`]), and the windowed Cauchy
//! modulus — the largest distance among the next `W` iterates — decays
//! ([`cauchy_modulus`]). A full supremum over an infinite tail is not
//! computable, so the window approximates it; any fixed window underestimates
//! the true modulus but preserves the decay signal.

use crate::metric::{Domain, MappingSpec, MetricSpec};
use crate::report::{fmt_human, fmt_machine, CheckResult, VerificationReport, Witness};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PicardError {
    #[error("non-finite point at step {step}: T({x}) gave {detail}")]
    NonFinitePoint { step: u64, x: f64, detail: String },
    #[error("map escaped the domain at step {step}: T({x}) = {image}")]
    EscapedDomain { step: u64, x: f64, image: f64 },
    #[error("start point {x0} is not in the domain")]
    InvalidStart { x0: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error("window {window} exceeds trace length {len}")]
    WindowTooLarge { window: usize, len: usize },
}

/// Iteration tolerances and bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterateParams {
    /// Step-distance tolerance `d(x_n, x_{n+1}) <= step_tol`.
    pub step_tol: f64,
    /// Residual tolerance `d(x, T(x)) <= fix_tol` at the reported point.
    pub fix_tol: f64,
    /// Maximum number of orbit steps.
    pub max_iter: u64,
    /// Window for the embedded Cauchy-modulus column.
    pub cauchy_window: usize,
}

impl Default for IterateParams {
    fn default() -> Self {
        IterateParams {
            step_tol: 1e-9,
            fix_tol: 1e-9,
            max_iter: 1_000_000,
            cauchy_window: 32,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IterationVerdict {
    Converged {
        fixed_point: f64,
        steps: u64,
    },
    MaxIterExceeded,
    /// Reported in summaries when iteration aborted on a non-finite image.
    DivergedNonFinite,
}

impl IterationVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            IterationVerdict::Converged { .. } => "converged",
            IterationVerdict::MaxIterExceeded => "max_iter_exceeded",
            IterationVerdict::DivergedNonFinite => "diverged_nonfinite",
        }
    }
}

/// A fully populated Picard orbit.
///
/// `orbit[k+1] = T(orbit[k])` exactly as evaluated, `step_dist[k] =
/// d(orbit[k], orbit[k+1])`, and `cauchy_modulus[k]` is the windowed
/// modulus at index `k` (window recorded in `window`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationTrace {
    pub start: f64,
    pub orbit: Vec<f64>,
    pub step_dist: Vec<f64>,
    pub cauchy_modulus: Vec<f64>,
    pub verdict: IterationVerdict,
    /// `d(u, T(u))` at the terminal point.
    pub residual: f64,
    pub step_tol: f64,
    pub fix_tol: f64,
    /// Effective window used for `cauchy_modulus`.
    pub window: usize,
}

fn dist(metric: &MetricSpec, x: f64, y: f64, step: u64) -> Result<f64, PicardError> {
    match metric.dist(x, y) {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(v) => Err(PicardError::NonFinitePoint {
            step,
            x,
            detail: format!("d({}, {}) = {}", x, y, v),
        }),
        Err(e) => Err(PicardError::NonFinitePoint {
            step,
            x,
            detail: format!("d({}, {}): {}", x, y, e),
        }),
    }
}

/// Run Picard iteration from `x0`.
///
/// Terminates with `Converged { fixed_point: u, steps: n }` at the first
/// index `n` where the preceding step (when one exists) is within
/// `step_tol` and `d(u, T(u)) <= fix_tol`; a start that is already fixed
/// converges in 0 steps. Exceeding `max_iter` yields a fully populated
/// trace with the `MaxIterExceeded` verdict. A non-finite image aborts
/// with [`PicardError::NonFinitePoint`], so traces never contain NaN.
///
/// ```
/// use zetafix::metric::{Domain, DomainSpec, MappingSpec, MetricSpec};
/// use zetafix::picard::{iterate, IterateParams, IterationVerdict};
///
/// let domain = Domain::build(&DomainSpec::IntervalGrid {
///     lo: 0.0, hi: 1.0, resolution: 32,
/// }).unwrap();
/// let metric = MetricSpec::parse("euclid", "abs(x - y)").unwrap();
/// let map = MappingSpec::parse("halve", "x / 2").unwrap();
///
/// let trace = iterate(&domain, &metric, &map, 1.0, &IterateParams::default()).unwrap();
/// match trace.verdict {
///     IterationVerdict::Converged { fixed_point, .. } => assert!(fixed_point < 1e-8),
///     other => panic!("{:?}", other),
/// }
/// ```
pub fn iterate(
    domain: &Domain,
    metric: &MetricSpec,
    map: &MappingSpec,
    x0: f64,
    params: &IterateParams,
) -> Result<IterationTrace, PicardError> {
    if !(params.step_tol > 0.0) || !(params.fix_tol > 0.0) {
        return Err(PicardError::InvalidParams(
            "step_tol and fix_tol must be positive".to_string(),
        ));
    }
    if params.max_iter < 1 {
        return Err(PicardError::InvalidParams(
            "max_iter must be at least 1".to_string(),
        ));
    }
    let start = domain.snap(x0).ok_or(PicardError::InvalidStart { x0 })?;

    let mut orbit = vec![start];
    let mut step_dist: Vec<f64> = Vec::new();
    let verdict;
    let residual;
    let mut n: u64 = 0;
    loop {
        let x = *orbit.last().unwrap();
        let raw = map.image(x).map_err(|e| PicardError::NonFinitePoint {
            step: n,
            x,
            detail: e.to_string(),
        })?;
        if !raw.is_finite() {
            return Err(PicardError::NonFinitePoint {
                step: n,
                x,
                detail: format!("image {}", raw),
            });
        }
        let y = domain.snap(raw).ok_or(PicardError::EscapedDomain {
            step: n,
            x,
            image: raw,
        })?;
        let resid = dist(metric, x, y, n)?;
        let step_ok = match step_dist.last() {
            Some(&last) => last <= params.step_tol,
            None => true,
        };
        if resid <= params.fix_tol && step_ok {
            verdict = IterationVerdict::Converged {
                fixed_point: x,
                steps: n,
            };
            residual = resid;
            break;
        }
        if n >= params.max_iter {
            verdict = IterationVerdict::MaxIterExceeded;
            residual = resid;
            break;
        }
        orbit.push(y);
        step_dist.push(resid);
        n += 1;
    }

    let window = params
        .cauchy_window
        .min(orbit.len().saturating_sub(1))
        .max(1);
    let cauchy_modulus = windowed_modulus(&orbit, metric, window)?;
    Ok(IterationTrace {
        start,
        orbit,
        step_dist,
        cauchy_modulus,
        verdict,
        residual,
        step_tol: params.step_tol,
        fix_tol: params.fix_tol,
        window,
    })
}

fn windowed_modulus(
    orbit: &[f64],
    metric: &MetricSpec,
    window: usize,
) -> Result<Vec<f64>, PicardError> {
    let len = orbit.len();
    let mut out = Vec::with_capacity(len);
    for n in 0..len {
        let end = (n + window).min(len - 1);
        let mut max = 0.0f64;
        for i in n..=end {
            for j in (i + 1)..=end {
                let d = dist(metric, orbit[i], orbit[j], n as u64)?;
                if d > max {
                    max = d;
                }
            }
        }
        out.push(max);
    }
    Ok(out)
}

/// Check that step distances are nonincreasing and end within tolerance.
///
/// Traces with fewer than two recorded steps pass vacuously (a start that
/// is already fixed never records a step).
pub fn check_asymptotic_regularity(trace: &IterationTrace) -> VerificationReport {
    let mut report = VerificationReport::new(format!(
        "asymptotic regularity from x0={}",
        fmt_human(trace.start)
    ));
    let steps = &trace.step_dist;

    let adjacent = steps.len().saturating_sub(1) as u64;
    let mono = steps.windows(2).position(|w| w[1] > w[0]);
    report.push(match mono {
        None => {
            let c = CheckResult::pass("nonincreasing step distances", adjacent);
            if steps.len() < 2 {
                c.with_note("fewer than 2 steps; vacuous".to_string())
            } else {
                c
            }
        }
        Some(i) => CheckResult::fail(
            "nonincreasing step distances",
            adjacent,
            Witness::new(
                [("n", (i + 1) as f64)],
                [
                    (format!("step_dist[{}]", i), steps[i]),
                    (format!("step_dist[{}]", i + 1), steps[i + 1]),
                ],
            ),
        ),
    });

    report.push(match steps.last() {
        None => CheckResult::pass("final step within tolerance", 0)
            .with_note("no steps recorded; converged at start".to_string()),
        Some(&last) if last <= trace.step_tol => {
            CheckResult::pass("final step within tolerance", 1)
        }
        Some(&last) => CheckResult::fail(
            "final step within tolerance",
            1,
            Witness::new(
                [("n", (steps.len() - 1) as f64)],
                [
                    ("step".to_string(), last),
                    ("step_tol".to_string(), trace.step_tol),
                ],
            ),
        ),
    });

    report
}

/// Report the orbit diameter (largest pairwise distance).
///
/// Quadratic in the orbit length; intended for terminated traces.
pub fn check_boundedness(
    trace: &IterationTrace,
    metric: &MetricSpec,
) -> Result<VerificationReport, PicardError> {
    let mut report = VerificationReport::new(format!(
        "orbit boundedness from x0={}",
        fmt_human(trace.start)
    ));
    let orbit = &trace.orbit;
    let mut diameter = 0.0f64;
    for i in 0..orbit.len() {
        for j in (i + 1)..orbit.len() {
            let d = dist(metric, orbit[i], orbit[j], i as u64)?;
            if d > diameter {
                diameter = d;
            }
        }
    }
    let pairs = (orbit.len() * orbit.len().saturating_sub(1) / 2) as u64;
    report.push(
        CheckResult::pass("orbit bounded", pairs)
            .with_note(format!("diameter = {}", fmt_human(diameter))),
    );
    Ok(report)
}

/// Windowed Cauchy modulus of a trace, with its decay verdict.
///
/// `C[n]` is the largest distance among orbit points with indices in
/// `[n, min(n + window, end)]`. The verdict requires the sequence to be
/// nonincreasing and the last two-point window to fall under
/// `2 * step_tol * window`, a generous bound for any orbit whose steps
/// entered the step tolerance.
pub fn cauchy_modulus(
    trace: &IterationTrace,
    metric: &MetricSpec,
    window: usize,
) -> Result<(Vec<f64>, VerificationReport), PicardError> {
    if window == 0 {
        return Err(PicardError::InvalidParams(
            "window must be positive".to_string(),
        ));
    }
    if trace.orbit.len() < window {
        return Err(PicardError::WindowTooLarge {
            window,
            len: trace.orbit.len(),
        });
    }
    let values = windowed_modulus(&trace.orbit, metric, window)?;
    let mut report = VerificationReport::new(format!(
        "cauchy modulus from x0={} (window {})",
        fmt_human(trace.start),
        window
    ));

    let mono = values.windows(2).position(|w| w[1] > w[0]);
    report.push(match mono {
        None => CheckResult::pass("cauchy modulus nonincreasing", values.len() as u64),
        Some(i) => CheckResult::fail(
            "cauchy modulus nonincreasing",
            values.len() as u64,
            Witness::new(
                [("n", (i + 1) as f64)],
                [
                    (format!("C[{}]", i), values[i]),
                    (format!("C[{}]", i + 1), values[i + 1]),
                ],
            ),
        ),
    });

    let bound = 2.0 * trace.step_tol * window as f64;
    // last window still spanning two points; a singleton is trivially 0
    let final_c = if values.len() >= 2 {
        values[values.len() - 2]
    } else {
        values[0]
    };
    report.push(if final_c <= bound {
        CheckResult::pass("cauchy modulus decays", 1).with_note(format!(
            "final modulus {} <= {}",
            fmt_human(final_c),
            fmt_human(bound)
        ))
    } else {
        CheckResult::fail(
            "cauchy modulus decays",
            1,
            Witness::new(
                [],
                [
                    ("final modulus".to_string(), final_c),
                    ("bound".to_string(), bound),
                ],
            ),
        )
    });

    Ok((values, report))
}

/// Render a trace as CSV with 17-significant-digit values.
///
/// Columns: `n, x_n, step_dist, cauchy_modulus`. The last row has no step
/// distance, so that field is empty there.
pub fn trace_to_csv(trace: &IterationTrace) -> String {
    let mut out = String::from("n,x_n,step_dist,cauchy_modulus\n");
    for (n, &x) in trace.orbit.iter().enumerate() {
        let step = trace
            .step_dist
            .get(n)
            .map(|&s| fmt_machine(s))
            .unwrap_or_default();
        let cauchy = trace
            .cauchy_modulus
            .get(n)
            .map(|&c| fmt_machine(c))
            .unwrap_or_default();
        out.push_str(&format!("{},{},{},{}\n", n, fmt_machine(x), step, cauchy));
    }
    out
}

/// Render the full trace, verdict included, as pretty JSON.
pub fn trace_to_json(trace: &IterationTrace) -> String {
    serde_json::to_string_pretty(trace).expect("trace serialization cannot fail")
}
