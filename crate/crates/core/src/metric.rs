//! Domains, metrics and self-maps, with exhaustive axiom verification.
//!
//! Abstract metric-space arguments are made checkable by discretizing: a
//! domain is either a uniform grid over an interval or an explicit finite
//! point set. On such a domain the metric axioms (nonnegativity, identity
//! of indiscernibles, symmetry, triangle inequality) can be scanned
//! exhaustively, and each failure is reported with the smallest witness
//! tuple in lexicographic order.
//!
//! Point equality on generated grids is exact bitwise comparison; grids are
//! generated, not parsed imprecisely, so a tolerance would only mask real
//! identity violations. Nonnegativity, identity and symmetry are likewise
//! compared exactly; only the triangle scan grants the sum a few ulps of
//! slack ([`TRIANGLE_SLACK_ULPS`]), since the sum rounds once more than the
//! direct distance. Images of a self-map on a finite set are snapped to
//! member points within an absolute tolerance of [`SNAP_TOL`] to absorb
//! round-off.
//!
//! Completeness of the underlying space is not checkable numerically and is
//! carried as an assumption: finite sets are trivially complete, and the
//! existence guarantees for interval-grid instances rely on the interval
//! being closed.

use crate::expr::{self, EvalError, Expr, ParseError};
use crate::report::{CheckResult, VerificationReport, Witness};
use serde::Serialize;
use thiserror::Error;

/// Absolute snap tolerance for matching map images to finite-set members.
pub const SNAP_TOL: f64 = 1e-12;

/// Largest domain accepted by the O(n^3) triangle scan.
pub const MAX_TRIANGLE_POINTS: usize = 2048;

/// Relative slack for the triangle comparison, in units of machine epsilon.
///
/// The sum `d(x,y) + d(y,z)` rounds once more than `d(x,z)` does, so a true
/// metric such as `abs(x - y)` can land 1 ulp short on uniform grids. Four
/// ulps of the sum absorb that; violations below this scale are
/// indistinguishable from rounding anyway.
pub const TRIANGLE_SLACK_ULPS: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("domain has no points")]
    EmptyDomain,
    #[error("degenerate interval: lo={lo}, hi={hi}, resolution={resolution} (need lo < hi and resolution >= 1)")]
    DegenerateInterval { lo: f64, hi: f64, resolution: u32 },
    #[error("duplicate point {value} in finite set")]
    DuplicatePoint { value: f64 },
    #[error("non-finite point {value} in domain description")]
    NonFinitePoint { value: f64 },
    #[error("domain has {size} points; the triangle scan is capped at {cap}")]
    DomainTooLarge { size: usize, cap: usize },
    #[error("non-finite distance at (x={x}, y={y}): {detail}")]
    NonFiniteDistance { x: f64, y: f64, detail: String },
}

/// Description of a domain prior to materialization.
#[derive(Debug, Clone, PartialEq)]
pub enum DomainSpec {
    /// `resolution + 1` uniformly spaced points covering `[lo, hi]`.
    IntervalGrid { lo: f64, hi: f64, resolution: u32 },
    /// An explicit set of distinct points.
    FiniteSet { points: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DomainKind {
    IntervalGrid,
    FiniteSet,
}

/// A materialized domain: sorted, pairwise-distinct points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Domain {
    kind: DomainKind,
    /// Interval bounds for grids; (min, max) of the set otherwise.
    lo: f64,
    hi: f64,
    points: Vec<f64>,
}

impl Domain {
    /// Materialize a domain description into its sorted point set.
    pub fn build(spec: &DomainSpec) -> Result<Domain, MetricError> {
        match spec {
            DomainSpec::IntervalGrid { lo, hi, resolution } => {
                let (lo, hi, n) = (*lo, *hi, *resolution);
                if !lo.is_finite() {
                    return Err(MetricError::NonFinitePoint { value: lo });
                }
                if !hi.is_finite() {
                    return Err(MetricError::NonFinitePoint { value: hi });
                }
                if !(lo < hi) || n < 1 {
                    return Err(MetricError::DegenerateInterval {
                        lo,
                        hi,
                        resolution: n,
                    });
                }
                let mut points = Vec::with_capacity(n as usize + 1);
                points.push(lo);
                for k in 1..n {
                    points.push(lo + (k as f64) * (hi - lo) / (n as f64));
                }
                points.push(hi);
                // Spacing below one ulp collapses neighbours; refuse it.
                for w in points.windows(2) {
                    if !(w[0] < w[1]) {
                        return Err(MetricError::DuplicatePoint { value: w[0] });
                    }
                }
                Ok(Domain {
                    kind: DomainKind::IntervalGrid,
                    lo,
                    hi,
                    points,
                })
            }
            DomainSpec::FiniteSet { points } => {
                if points.is_empty() {
                    return Err(MetricError::EmptyDomain);
                }
                if let Some(&bad) = points.iter().find(|p| !p.is_finite()) {
                    return Err(MetricError::NonFinitePoint { value: bad });
                }
                let mut sorted = points.clone();
                sorted.sort_by(f64::total_cmp);
                for w in sorted.windows(2) {
                    if w[0] == w[1] {
                        return Err(MetricError::DuplicatePoint { value: w[0] });
                    }
                }
                let (lo, hi) = (sorted[0], *sorted.last().unwrap());
                Ok(Domain {
                    kind: DomainKind::FiniteSet,
                    lo,
                    hi,
                    points: sorted,
                })
            }
        }
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Resolve a value to a usable point of the domain.
    ///
    /// Interval grids admit any value inside `[lo, hi]` (iteration uses the
    /// continuous map; the grid is only the verification sample). Finite
    /// sets snap to a member within [`SNAP_TOL`].
    pub fn snap(&self, value: f64) -> Option<f64> {
        if !value.is_finite() {
            return None;
        }
        match self.kind {
            DomainKind::IntervalGrid => {
                if value >= self.lo && value <= self.hi {
                    Some(value)
                } else {
                    None
                }
            }
            DomainKind::FiniteSet => {
                let i = self.points.partition_point(|&p| p < value);
                for j in [i.checked_sub(1), Some(i)].into_iter().flatten() {
                    if let Some(&p) = self.points.get(j) {
                        if (p - value).abs() <= SNAP_TOL {
                            return Some(p);
                        }
                    }
                }
                None
            }
        }
    }
}

/// An evaluable distance function `d(x, y)` with a display label.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSpec {
    name: String,
    expr: Expr,
}

impl MetricSpec {
    /// Parse a metric from source text; the variable set is `(x, y)`.
    pub fn parse(name: &str, src: &str) -> Result<MetricSpec, ParseError> {
        Ok(MetricSpec {
            name: name.to_string(),
            expr: expr::parse(src, &["x", "y"])?,
        })
    }

    /// Wrap an already-built AST; variable indices must follow `(x, y)`.
    pub fn from_expr(name: &str, expr: Expr) -> MetricSpec {
        MetricSpec {
            name: name.to_string(),
            expr,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn dist(&self, x: f64, y: f64) -> Result<f64, EvalError> {
        self.expr.eval_slice(&[x, y])
    }
}

/// An evaluable self-map `T(x)` with a display label.
#[derive(Debug, Clone, PartialEq)]
pub struct MappingSpec {
    name: String,
    expr: Expr,
}

impl MappingSpec {
    /// Parse a map from source text; the variable set is `(x)`.
    pub fn parse(name: &str, src: &str) -> Result<MappingSpec, ParseError> {
        Ok(MappingSpec {
            name: name.to_string(),
            expr: expr::parse(src, &["x"])?,
        })
    }

    /// Wrap an already-built AST; variable index 0 is `x`.
    pub fn from_expr(name: &str, expr: Expr) -> MappingSpec {
        MappingSpec {
            name: name.to_string(),
            expr,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn image(&self, x: f64) -> Result<f64, EvalError> {
        self.expr.eval_slice(&[x])
    }
}

/// Distances between all ordered pairs of domain points, row-major.
///
/// Shared by the axiom scans so each pair is evaluated exactly once.
pub(crate) struct DistanceMatrix {
    n: usize,
    d: Vec<f64>,
}

impl DistanceMatrix {
    pub(crate) fn compute(metric: &MetricSpec, domain: &Domain) -> Result<Self, MetricError> {
        let pts = domain.points();
        let n = pts.len();
        let mut d = vec![0.0; n * n];
        for (i, &x) in pts.iter().enumerate() {
            for (j, &y) in pts.iter().enumerate() {
                let v = metric
                    .dist(x, y)
                    .map_err(|e| MetricError::NonFiniteDistance {
                        x,
                        y,
                        detail: e.to_string(),
                    })?;
                if !v.is_finite() {
                    return Err(MetricError::NonFiniteDistance {
                        x,
                        y,
                        detail: format!("value {}", v),
                    });
                }
                d[i * n + j] = v;
            }
        }
        Ok(DistanceMatrix { n, d })
    }

    #[inline]
    pub(crate) fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }
}

/// Verify the four metric axioms exhaustively on a domain.
///
/// The report carries one entry per axiom; the triangle inequality is
/// scanned over all ordered triples, which caps the domain size at
/// [`MAX_TRIANGLE_POINTS`].
pub fn verify_metric(
    metric: &MetricSpec,
    domain: &Domain,
) -> Result<VerificationReport, MetricError> {
    let pts = domain.points();
    let n = pts.len();
    if n > MAX_TRIANGLE_POINTS {
        return Err(MetricError::DomainTooLarge {
            size: n,
            cap: MAX_TRIANGLE_POINTS,
        });
    }
    let m = DistanceMatrix::compute(metric, domain)?;
    let mut report = VerificationReport::new(format!("metric axioms: {}", metric.name));

    // nonnegativity: d(x,y) >= 0 over all ordered pairs
    let mut nonneg = CheckResult::pass("nonnegativity", (n * n) as u64);
    'nn: for i in 0..n {
        for j in 0..n {
            if m.get(i, j) < 0.0 {
                nonneg = CheckResult::fail(
                    "nonnegativity",
                    (n * n) as u64,
                    Witness::new(
                        [("x", pts[i]), ("y", pts[j])],
                        [("d(x,y)".to_string(), m.get(i, j))],
                    ),
                );
                break 'nn;
            }
        }
    }
    report.push(nonneg);

    // identity: d(x,y) = 0 iff x = y (exact zero comparison)
    let mut identity = CheckResult::pass("identity", (n * n) as u64);
    'id: for i in 0..n {
        for j in 0..n {
            let v = m.get(i, j);
            let same = i == j;
            if (same && v != 0.0) || (!same && v == 0.0) {
                identity = CheckResult::fail(
                    "identity",
                    (n * n) as u64,
                    Witness::new([("x", pts[i]), ("y", pts[j])], [("d(x,y)".to_string(), v)]),
                );
                break 'id;
            }
        }
    }
    report.push(identity);

    // symmetry: d(x,y) = d(y,x), exact
    let pairs = (n * (n - 1) / 2) as u64;
    let mut symmetry = CheckResult::pass("symmetry", pairs);
    'sym: for i in 0..n {
        for j in (i + 1)..n {
            if m.get(i, j) != m.get(j, i) {
                symmetry = CheckResult::fail(
                    "symmetry",
                    pairs,
                    Witness::new(
                        [("x", pts[i]), ("y", pts[j])],
                        [
                            ("d(x,y)".to_string(), m.get(i, j)),
                            ("d(y,x)".to_string(), m.get(j, i)),
                        ],
                    ),
                );
                break 'sym;
            }
        }
    }
    report.push(symmetry);

    // triangle: d(x,z) <= d(x,y) + d(y,z) over all ordered triples,
    // with a few ulps of slack on the sum (see TRIANGLE_SLACK_ULPS)
    let slack = 1.0 + TRIANGLE_SLACK_ULPS * f64::EPSILON;
    let triples = (n as u64) * (n as u64) * (n as u64);
    let mut triangle = CheckResult::pass("triangle", triples);
    'tri: for i in 0..n {
        let row_i = &m.d[i * n..(i + 1) * n];
        for j in 0..n {
            let dij = m.get(i, j);
            let row_j = &m.d[j * n..(j + 1) * n];
            for k in 0..n {
                if row_i[k] > (dij + row_j[k]) * slack {
                    triangle = CheckResult::fail(
                        "triangle",
                        triples,
                        Witness::new(
                            [("x", pts[i]), ("y", pts[j]), ("z", pts[k])],
                            [
                                ("d(x,z)".to_string(), row_i[k]),
                                ("d(x,y)+d(y,z)".to_string(), dij + row_j[k]),
                            ],
                        ),
                    );
                    break 'tri;
                }
            }
        }
    }
    report.push(triangle);

    Ok(report)
}

/// Check that `T` maps the domain into itself.
///
/// Interval grids require every image inside `[lo, hi]`; finite sets require
/// every image to snap onto a member point. Evaluation failures are reported
/// as closure failures with the offending point as witness.
pub fn check_closure(map: &MappingSpec, domain: &Domain) -> VerificationReport {
    let pts = domain.points();
    let mut report = VerificationReport::new(format!("self-map closure: {}", map.name));
    let mut check = CheckResult::pass("closure", pts.len() as u64);
    for &x in pts {
        match map.image(x) {
            Ok(y) => {
                if domain.snap(y).is_none() {
                    check = CheckResult::fail(
                        "closure",
                        pts.len() as u64,
                        Witness::new([("x", x), ("T(x)", y)], []),
                    )
                    .with_note(match domain.kind {
                        DomainKind::IntervalGrid => {
                            format!("image outside [{}, {}]", domain.lo, domain.hi)
                        }
                        DomainKind::FiniteSet => {
                            format!("image not within {} of any member", SNAP_TOL)
                        }
                    });
                    break;
                }
            }
            Err(e) => {
                check =
                    CheckResult::fail("closure", pts.len() as u64, Witness::new([("x", x)], []))
                        .with_note(format!("map evaluation failed: {}", e));
                break;
            }
        }
    }
    report.push(check);
    report
}
