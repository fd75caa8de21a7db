//! Z-contraction verification and contraction-family classification.
//!
//! A mapping `T` is a Z-contraction with respect to a simulation function
//! `zeta` when `zeta(d(Tx,Ty), d(x,y)) >= 0` for all `x, y`. [`verify_z`]
//! scans that inequality over every unordered pair of domain points
//! (including `x = y`, where it holds trivially) and reports the minimizing
//! witness on failure.
//!
//! Since `zeta(r,r) < 0` for `r > 0`, a Z-contraction can never preserve
//! the distance between distinct points; [`check_distance_preservation`] tests exactly
//! that with bitwise comparison, and a failure disproves Z-contractivity
//! for *every* simulation function at once.
//!
//! [`classify`] measures a mapping against the classical contraction
//! families (Banach modulus search, Rhoades, Geraghty, Boyd–Wong,
//! integral-type) using the registered inner functions, and probes the
//! whole simulation-function catalogue for the aggregate verdict.

use crate::expr::EvalError;
use crate::metric::{Domain, DomainKind, MappingSpec, MetricError, MetricSpec, SNAP_TOL};
use crate::report::{fmt_human, CheckResult, VerificationReport, Witness};
use crate::simfun::{self, SimfunError, SimulationFunction};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ContractionError {
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Simfun(#[from] SimfunError),
    #[error("non-finite value at pair (x={x}, y={y}): {detail}")]
    NonFiniteValue { x: f64, y: f64, detail: String },
    #[error("map escapes the domain: T({x}) = {image}")]
    ClosureViolation { x: f64, image: f64 },
    #[error("operation requires a finite-set domain")]
    FiniteDomainRequired,
}

/// A fully specified verification instance.
///
/// Invariants (the metric passes [`crate::metric::verify_metric`] and the
/// map passes [`crate::metric::check_closure`]) are the caller's
/// responsibility; [`ContractionInstance::validate`] re-checks them.
#[derive(Debug, Clone)]
pub struct ContractionInstance {
    pub domain: Domain,
    pub metric: MetricSpec,
    pub map: MappingSpec,
    pub zeta: SimulationFunction,
}

impl ContractionInstance {
    /// Run the instance invariants: metric axioms, then closure.
    pub fn validate(&self) -> Result<Vec<VerificationReport>, MetricError> {
        let metric_report = crate::metric::verify_metric(&self.metric, &self.domain)?;
        let closure_report = crate::metric::check_closure(&self.map, &self.domain);
        Ok(vec![metric_report, closure_report])
    }
}

/// One sampled unordered pair: points, their distance `s` and the image
/// distance `t`.
#[derive(Debug, Clone, Copy)]
struct PairSample {
    x: f64,
    y: f64,
    t: f64,
    s: f64,
}

/// Map images followed by `(x, y, t, s)` samples for all `i <= j`.
struct PairScan {
    images: Vec<f64>,
    pairs: Vec<PairSample>,
}

fn eval_dist(metric: &MetricSpec, x: f64, y: f64) -> Result<f64, ContractionError> {
    let v = metric
        .dist(x, y)
        .map_err(|e: EvalError| ContractionError::NonFiniteValue {
            x,
            y,
            detail: e.to_string(),
        })?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(ContractionError::NonFiniteValue {
            x,
            y,
            detail: format!("distance {}", v),
        })
    }
}

fn collect_pairs(
    domain: &Domain,
    metric: &MetricSpec,
    map: &MappingSpec,
) -> Result<PairScan, ContractionError> {
    let pts = domain.points();
    let mut images = Vec::with_capacity(pts.len());
    for &x in pts {
        let raw = map.image(x).map_err(|e| ContractionError::NonFiniteValue {
            x,
            y: x,
            detail: e.to_string(),
        })?;
        let snapped = domain
            .snap(raw)
            .ok_or(ContractionError::ClosureViolation { x, image: raw })?;
        images.push(snapped);
    }
    let n = pts.len();
    let mut pairs = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            let (x, y) = (pts[i], pts[j]);
            let s = eval_dist(metric, x, y)?;
            let t = eval_dist(metric, images[i], images[j])?;
            pairs.push(PairSample { x, y, t, s });
        }
    }
    Ok(PairScan { images, pairs })
}

/// Scan `zeta(d(Tx,Ty), d(x,y)) >= 0` over all unordered domain pairs.
///
/// On failure the witness is the pair minimizing the value (ties resolved
/// toward the lexicographically smallest pair).
///
/// ```
/// use zetafix::contraction::{verify_z, ContractionInstance};
/// use zetafix::metric::{Domain, DomainSpec, MappingSpec, MetricSpec};
/// use zetafix::simfun::make_banach;
///
/// let instance = ContractionInstance {
///     domain: Domain::build(&DomainSpec::IntervalGrid {
///         lo: 0.0, hi: 1.0, resolution: 32,
///     }).unwrap(),
///     metric: MetricSpec::parse("euclid", "abs(x - y)").unwrap(),
///     map: MappingSpec::parse("halve", "x / 2").unwrap(),
///     zeta: make_banach(0.6).unwrap(),
/// };
/// assert!(verify_z(&instance).unwrap().passed());
/// ```
pub fn verify_z(instance: &ContractionInstance) -> Result<VerificationReport, ContractionError> {
    let scan = collect_pairs(&instance.domain, &instance.metric, &instance.map)?;
    let mut report = VerificationReport::new(format!(
        "z-contraction: {} under {} with {}",
        instance.map.name(),
        instance.metric.name(),
        instance.zeta.describe()
    ));
    let mut min: Option<(f64, &PairSample)> = None;
    for p in &scan.pairs {
        let v = instance.zeta.eval(p.t, p.s).map_err(|e| match e {
            SimfunError::NonFiniteValue { .. } => ContractionError::NonFiniteValue {
                x: p.x,
                y: p.y,
                detail: format!("zeta({}, {}) is not finite", p.t, p.s),
            },
            other => ContractionError::Simfun(other),
        })?;
        if min.as_ref().is_none_or(|(mv, _)| v < *mv) {
            min = Some((v, p));
        }
    }
    let checked = scan.pairs.len() as u64;
    let (min_value, at) = min.expect("domains are nonempty");
    report.push(if min_value >= 0.0 {
        CheckResult::pass("zeta(d(Tx,Ty), d(x,y)) >= 0", checked)
            .with_note(format!("minimum value {}", fmt_human(min_value)))
    } else {
        CheckResult::fail(
            "zeta(d(Tx,Ty), d(x,y)) >= 0",
            checked,
            Witness::new(
                [("x", at.x), ("y", at.y)],
                [
                    ("d(Tx,Ty)".to_string(), at.t),
                    ("d(x,y)".to_string(), at.s),
                    ("zeta".to_string(), min_value),
                ],
            ),
        )
    });
    Ok(report)
}

/// Check that `T` never preserves the distance between distinct points
/// (bitwise comparison).
///
/// A failure here rules out Z-contractivity with respect to every
/// simulation function, so classification short-circuits on it.
pub fn check_distance_preservation(
    domain: &Domain,
    metric: &MetricSpec,
    map: &MappingSpec,
) -> Result<VerificationReport, ContractionError> {
    let scan = collect_pairs(domain, metric, map)?;
    let mut report = VerificationReport::new(format!(
        "distance preservation: {} under {}",
        map.name(),
        metric.name()
    ));
    let distinct: Vec<&PairSample> = scan.pairs.iter().filter(|p| p.x != p.y).collect();
    let checked = distinct.len() as u64;
    let hit = distinct.iter().find(|p| p.t == p.s);
    report.push(match hit {
        None => CheckResult::pass("d(Tx,Ty) != d(x,y) for distinct x, y", checked),
        Some(p) => CheckResult::fail(
            "d(Tx,Ty) != d(x,y) for distinct x, y",
            checked,
            Witness::new(
                [("x", p.x), ("y", p.y)],
                [("d(Tx,Ty) = d(x,y)".to_string(), p.s)],
            ),
        )
        .with_note("no simulation function can certify this map".to_string()),
    });
    Ok(report)
}

/// All fixed points of `T` on a finite domain, within snap tolerance.
pub fn brute_force_fixed_points(
    domain: &Domain,
    map: &MappingSpec,
) -> Result<Vec<f64>, ContractionError> {
    if domain.kind() != DomainKind::FiniteSet {
        return Err(ContractionError::FiniteDomainRequired);
    }
    let mut fixed = Vec::new();
    for &x in domain.points() {
        let y = map.image(x).map_err(|e| ContractionError::NonFiniteValue {
            x,
            y: x,
            detail: e.to_string(),
        })?;
        if (y - x).abs() <= SNAP_TOL {
            fixed.push(x);
        }
    }
    Ok(fixed)
}

/// Verdict for one contraction family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyVerdict {
    pub family: String,
    pub passed: bool,
    /// Smallest grid modulus certifying the Banach inequality, if any.
    pub lambda: Option<f64>,
    pub witness: Option<Witness>,
    /// Inequality that was scanned.
    pub condition: String,
}

/// Verdict for one catalogue member inside the aggregate probe.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZetaVerdict {
    pub zeta: String,
    pub passed: bool,
    pub witness: Option<Witness>,
}

/// Classification of a mapping against the contraction families.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationResult {
    pub families: Vec<FamilyVerdict>,
    /// True when any catalogue simulation function certifies the map.
    pub z_contraction: bool,
    pub z_members: Vec<ZetaVerdict>,
    pub notes: Vec<String>,
    pub pairs_scanned: u64,
}

impl ClassificationResult {
    pub fn family(&self, name: &str) -> Option<&FamilyVerdict> {
        self.families.iter().find(|f| f.family == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("classification serialization cannot fail")
    }
}

/// Moduli probed by the Banach search: `0.01, 0.02, ..., 0.99`.
fn lambda_grid() -> impl Iterator<Item = f64> {
    (1..=99u32).map(|k| k as f64 / 100.0)
}

/// Classify a mapping against the contraction families.
///
/// The Banach verdict reports the smallest grid modulus for which
/// `d(Tx,Ty) <= lambda * d(x,y)` holds over all pairs — a grid certificate,
/// not an infimum. The other families use the registered inner functions
/// (`half`, `rational_gain`, `bw`, `const2`). The aggregate verdict probes
/// every catalogue simulation function.
pub fn classify(
    domain: &Domain,
    metric: &MetricSpec,
    map: &MappingSpec,
) -> Result<ClassificationResult, ContractionError> {
    let scan = collect_pairs(domain, metric, map)?;
    let pairs_scanned = scan.pairs.len() as u64;
    let mut notes = Vec::new();

    // Distance preservation first: a hit disproves everything at once.
    let distinct_hit = scan.pairs.iter().find(|p| p.x != p.y && p.t == p.s);
    if let Some(p) = distinct_hit {
        let witness = Witness::new(
            [("x", p.x), ("y", p.y)],
            [("d(Tx,Ty) = d(x,y)".to_string(), p.s)],
        );
        notes.push(format!(
            "distance preserved at (x={}, y={}): no simulation function admits this map; all verdicts short-circuited",
            fmt_human(p.x),
            fmt_human(p.y)
        ));
        let fail = |family: &str, condition: &str| FamilyVerdict {
            family: family.to_string(),
            passed: false,
            lambda: None,
            witness: Some(witness.clone()),
            condition: condition.to_string(),
        };
        let z_members = simfun::catalogue()
            .iter()
            .map(|z| ZetaVerdict {
                zeta: z.describe(),
                passed: false,
                witness: Some(witness.clone()),
            })
            .collect();
        return Ok(ClassificationResult {
            families: vec![
                fail("banach", "d(Tx,Ty) <= lambda*d(x,y)"),
                fail("rhoades", "d(Tx,Ty) <= d(x,y) - phi(d(x,y))"),
                fail("geraghty", "d(Tx,Ty) <= phi(d(x,y))*d(x,y)"),
                fail("boyd_wong", "d(Tx,Ty) <= eta(d(x,y))"),
                fail("integral", "integral of phi over [0, d(Tx,Ty)] <= d(x,y)"),
            ],
            z_contraction: false,
            z_members,
            notes,
            pairs_scanned,
        });
    }

    let families = vec![
        classify_banach(&scan),
        classify_bound(
            &scan,
            "rhoades",
            "d(Tx,Ty) <= d(x,y) - phi(d(x,y)), phi = u / 2",
            |p| Ok(p.s - p.s / 2.0),
        )?,
        classify_bound(
            &scan,
            "geraghty",
            "d(Tx,Ty) <= phi(d(x,y))*d(x,y), phi = 1 / (1 + u)",
            |p| Ok(p.s * (1.0 / (1.0 + p.s))),
        )?,
        classify_bound(
            &scan,
            "boyd_wong",
            "d(Tx,Ty) <= eta(d(x,y)), eta = u / (1 + u)",
            |p| Ok(p.s / (1.0 + p.s)),
        )?,
        classify_integral(&scan)?,
    ];

    // Aggregate: probe the catalogue. A found Banach modulus certifies the
    // map with any strictly larger modulus, so the banach probe adapts to
    // the search result (midway between the certificate and 1, which also
    // keeps the division float-safe); the remaining members stay fixed.
    let mut probes = simfun::catalogue();
    let found_lambda = families
        .iter()
        .find(|f| f.family == "banach")
        .and_then(|f| f.lambda);
    if let Some(lambda) = found_lambda {
        if let Some(slot) = probes
            .iter_mut()
            .find(|z| z.family() == simfun::Family::Banach)
        {
            *slot = simfun::make_banach((lambda + 1.0) / 2.0)
                .expect("midpoint modulus is inside (0, 1)");
        }
    }
    let mut z_members = Vec::new();
    for zeta in probes {
        let mut min: Option<(f64, &PairSample)> = None;
        for p in &scan.pairs {
            let v = zeta.eval(p.t, p.s)?;
            if min.as_ref().is_none_or(|(mv, _)| v < *mv) {
                min = Some((v, p));
            }
        }
        let (v, p) = min.expect("domains are nonempty");
        z_members.push(ZetaVerdict {
            zeta: zeta.describe(),
            passed: v >= 0.0,
            witness: if v >= 0.0 {
                None
            } else {
                Some(Witness::new(
                    [("x", p.x), ("y", p.y)],
                    [
                        ("d(Tx,Ty)".to_string(), p.t),
                        ("d(x,y)".to_string(), p.s),
                        ("zeta".to_string(), v),
                    ],
                ))
            },
        });
    }
    let z_contraction = z_members.iter().any(|m| m.passed);

    if let Some(banach) = families.iter().find(|f| f.family == "banach") {
        if let Some(lambda) = banach.lambda {
            if let Some((x, quotient)) = largest_jump(domain, &scan.images) {
                if quotient > 1.0 {
                    notes.push(format!(
                        "banach modulus {} is a sampled-pair certificate, but the map jumps with difference quotient {} near x={}; pointwise sampling cannot certify continuity, so the verdict is empirical",
                        fmt_human(lambda),
                        fmt_human(quotient),
                        fmt_human(x)
                    ));
                }
            }
        }
    }

    Ok(ClassificationResult {
        families,
        z_contraction,
        z_members,
        notes,
        pairs_scanned,
    })
}

fn classify_banach(scan: &PairScan) -> FamilyVerdict {
    let condition = "d(Tx,Ty) <= lambda*d(x,y)".to_string();
    // Largest image/source ratio dictates the candidate modulus.
    let mut needed = 0.0f64;
    let mut worst: Option<&PairSample> = None;
    for p in &scan.pairs {
        let ratio = if p.s > 0.0 {
            p.t / p.s
        } else if p.t > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        if ratio > needed || worst.is_none() {
            needed = ratio;
            worst = Some(p);
        }
    }
    for lambda in lambda_grid() {
        // the ratio is a rounded shortcut; leave boundary candidates to the
        // literal scan
        if lambda < needed * (1.0 - 1e-12) {
            continue;
        }
        if scan.pairs.iter().all(|p| p.t <= lambda * p.s) {
            return FamilyVerdict {
                family: "banach".to_string(),
                passed: true,
                lambda: Some(lambda),
                witness: None,
                condition,
            };
        }
    }
    let w = worst.expect("domains are nonempty");
    FamilyVerdict {
        family: "banach".to_string(),
        passed: false,
        lambda: None,
        witness: Some(Witness::new(
            [("x", w.x), ("y", w.y)],
            [("d(Tx,Ty)".to_string(), w.t), ("d(x,y)".to_string(), w.s)],
        )),
        condition,
    }
}

fn classify_bound(
    scan: &PairScan,
    family: &str,
    condition: &str,
    bound: impl Fn(&PairSample) -> Result<f64, ContractionError>,
) -> Result<FamilyVerdict, ContractionError> {
    for p in &scan.pairs {
        let b = bound(p)?;
        if !(p.t <= b) {
            return Ok(FamilyVerdict {
                family: family.to_string(),
                passed: false,
                lambda: None,
                witness: Some(Witness::new(
                    [("x", p.x), ("y", p.y)],
                    [("d(Tx,Ty)".to_string(), p.t), ("bound".to_string(), b)],
                )),
                condition: condition.to_string(),
            });
        }
    }
    Ok(FamilyVerdict {
        family: family.to_string(),
        passed: true,
        lambda: None,
        witness: None,
        condition: condition.to_string(),
    })
}

fn classify_integral(scan: &PairScan) -> Result<FamilyVerdict, ContractionError> {
    let condition = "integral of phi over [0, d(Tx,Ty)] <= d(x,y), phi = 2".to_string();
    for p in &scan.pairs {
        // same quadrature path as the catalogue member, so the family
        // verdict and the zeta verdict agree bitwise
        let mass = crate::quad::integrate(&|_| Ok(2.0), p.t, simfun::DEFAULT_QUAD_TOL)
            .map_err(SimfunError::Quadrature)?;
        if !(mass <= p.s) {
            return Ok(FamilyVerdict {
                family: "integral".to_string(),
                passed: false,
                lambda: None,
                witness: Some(Witness::new(
                    [("x", p.x), ("y", p.y)],
                    [("mass".to_string(), mass), ("d(x,y)".to_string(), p.s)],
                )),
                condition,
            });
        }
    }
    Ok(FamilyVerdict {
        family: "integral".to_string(),
        passed: true,
        lambda: None,
        witness: None,
        condition,
    })
}

/// Largest adjacent difference quotient of the sampled images, for the
/// empirical-continuity caveat on interval grids.
fn largest_jump(domain: &Domain, images: &[f64]) -> Option<(f64, f64)> {
    if domain.kind() != DomainKind::IntervalGrid {
        return None;
    }
    let pts = domain.points();
    let mut best: Option<(f64, f64)> = None;
    for k in 0..pts.len().saturating_sub(1) {
        let dx = pts[k + 1] - pts[k];
        let quotient = (images[k + 1] - images[k]).abs() / dx;
        if best.is_none_or(|(_, q)| quotient > q) {
            best = Some((pts[k], quotient));
        }
    }
    best
}
