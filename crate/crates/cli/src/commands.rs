//! Subcommand implementations and the exit-code contract.
//!
//! Exit codes: 0 on success, 1 on a mathematical failure (always with a
//! printed witness), 2 on configuration or usage errors. All output is
//! deterministic: identical configs produce byte-identical reports.

use crate::config::{ConfigError, ExperimentConfig, SolverSettings, TraceFormat, ZetaBuildError};
use serde::Serialize;
use std::fmt;
use std::path::{Path, PathBuf};
use zetafix::contraction::{
    check_distance_preservation, classify, verify_z, ContractionError, ContractionInstance,
};
use zetafix::metric::{check_closure, verify_metric, Domain, MappingSpec, MetricError, MetricSpec};
use zetafix::picard::{
    check_asymptotic_regularity, iterate, trace_to_csv, trace_to_json, IterationTrace,
    IterationVerdict, PicardError,
};
use zetafix::report::{fmt_human, VerificationReport};
use zetafix::simfun::{self, check_axioms, SimulationFunction};

/// Result of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// Exit 0.
    Pass,
    /// Exit 1; a witness was printed.
    MathFail,
}

/// A hard failure before or during a command.
#[derive(Debug)]
pub enum Failure {
    /// Exit 2.
    Config(String),
    /// Exit 1.
    Math(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Math(_) => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(m) | Failure::Math(m) => write!(f, "{}", m),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.0)
    }
}

impl From<ZetaBuildError> for Failure {
    fn from(e: ZetaBuildError) -> Self {
        match e {
            ZetaBuildError::Config(c) => Failure::Config(c.0),
            ZetaBuildError::Hypothesis(h) => Failure::Math(h.to_string()),
        }
    }
}

impl From<MetricError> for Failure {
    fn from(e: MetricError) -> Self {
        match e {
            MetricError::DomainTooLarge { .. } => Failure::Config(e.to_string()),
            other => Failure::Math(other.to_string()),
        }
    }
}

impl From<ContractionError> for Failure {
    fn from(e: ContractionError) -> Self {
        match e {
            ContractionError::Metric(m) => m.into(),
            other => Failure::Math(other.to_string()),
        }
    }
}

fn write_file(path: &Path, content: &str) -> Result<(), Failure> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| {
                Failure::Config(format!("cannot create {}: {}", parent.display(), e))
            })?;
        }
    }
    std::fs::write(path, content)
        .map_err(|e| Failure::Config(format!("cannot write {}: {}", path.display(), e)))
}

/// Verify the simulation-function axioms for the configured zeta.
///
/// The (z2) scan always covers the default grid; a nonzero entropy in
/// `seed` only adds extra log-uniform sample values, so the default run is
/// reproducible byte for byte.
pub fn cmd_verify_simfun(config: &Path, seed: u64, out: Option<&Path>) -> Result<Outcome, Failure> {
    let cfg = ExperimentConfig::load(config)?;
    let zeta = cfg.build_zeta()?;

    let mut grid = simfun::default_grid();
    for (t, s) in simfun::seeded_pairs(seed, 256) {
        grid.push(t);
        grid.push(s);
    }
    let families = simfun::default_families();
    let report = check_axioms(&zeta, &grid, &families).map_err(|e| Failure::Math(e.to_string()))?;

    print!("{}", report);
    if let Some(path) = out {
        write_file(path, &report.to_json())?;
    }
    Ok(if report.passed() {
        Outcome::Pass
    } else {
        Outcome::MathFail
    })
}

/// The four-stage instance gate, stopping at the first failure.
///
/// Returns the reports produced and whether all of them passed.
fn run_gate(
    domain: &Domain,
    metric: &MetricSpec,
    map: &MappingSpec,
    zeta: &SimulationFunction,
) -> Result<(Vec<VerificationReport>, bool), Failure> {
    let mut reports = Vec::new();

    let metric_report = verify_metric(metric, domain)?;
    let ok = metric_report.passed();
    reports.push(metric_report);
    if !ok {
        return Ok((reports, false));
    }

    let closure_report = check_closure(map, domain);
    let ok = closure_report.passed();
    reports.push(closure_report);
    if !ok {
        return Ok((reports, false));
    }

    let preservation_report = check_distance_preservation(domain, metric, map)?;
    let ok = preservation_report.passed();
    reports.push(preservation_report);
    if !ok {
        return Ok((reports, false));
    }

    let instance = ContractionInstance {
        domain: domain.clone(),
        metric: metric.clone(),
        map: map.clone(),
        zeta: zeta.clone(),
    };
    let z_report = verify_z(&instance)?;
    let ok = z_report.passed();
    reports.push(z_report);
    Ok((reports, ok))
}

/// Run the instance gate: metric axioms, closure, distance preservation,
/// contraction inequality.
pub fn cmd_check(config: &Path, out: Option<&Path>) -> Result<Outcome, Failure> {
    let cfg = ExperimentConfig::load(config)?;
    let domain = cfg.build_domain()?;
    let metric = cfg.build_metric()?;
    let map = cfg.build_map()?;
    let zeta = cfg.build_zeta()?;

    let (reports, all_passed) = run_gate(&domain, &metric, &map, &zeta)?;
    for r in &reports {
        print!("{}", r);
    }
    if let Some(path) = out {
        let json = serde_json::to_string_pretty(&reports).expect("reports serialize");
        write_file(path, &json)?;
    }
    Ok(if all_passed {
        Outcome::Pass
    } else {
        Outcome::MathFail
    })
}

/// One row of the solve summary.
#[derive(Debug, Clone, Serialize)]
struct StartSummary {
    start: f64,
    verdict: String,
    fixed_point: Option<f64>,
    steps: Option<u64>,
    residual: Option<f64>,
    /// Step distances nonincreasing and final step within tolerance.
    regular: Option<bool>,
    /// Windowed Cauchy modulus nonincreasing along the trace.
    cauchy_decay: Option<bool>,
    note: Option<String>,
}

fn summarize_trace(trace: &IterationTrace) -> StartSummary {
    let regular = check_asymptotic_regularity(trace).passed();
    let cauchy_decay = trace.cauchy_modulus.windows(2).all(|w| w[1] <= w[0]);
    match trace.verdict {
        IterationVerdict::Converged { fixed_point, steps } => StartSummary {
            start: trace.start,
            verdict: "converged".to_string(),
            fixed_point: Some(fixed_point),
            steps: Some(steps),
            residual: Some(trace.residual),
            regular: Some(regular),
            cauchy_decay: Some(cauchy_decay),
            note: None,
        },
        ref other => StartSummary {
            start: trace.start,
            verdict: other.label().to_string(),
            fixed_point: None,
            steps: Some(trace.orbit.len() as u64 - 1),
            residual: Some(trace.residual),
            regular: Some(regular),
            cauchy_decay: Some(cauchy_decay),
            note: None,
        },
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_human).unwrap_or_else(|| "-".to_string())
}

fn print_summary(rows: &[StartSummary]) {
    println!(
        "{:<13} {:<19} {:<13} {:>6}  {:<13} {:<8} {:<6}",
        "start", "verdict", "fixed_point", "steps", "residual", "regular", "cauchy"
    );
    for r in rows {
        println!(
            "{:<13} {:<19} {:<13} {:>6}  {:<13} {:<8} {:<6}{}",
            fmt_human(r.start),
            r.verdict,
            opt(r.fixed_point),
            r.steps
                .map(|s| s.to_string())
                .unwrap_or_else(|| "-".to_string()),
            opt(r.residual),
            r.regular
                .map(|b| if b { "yes" } else { "no" })
                .unwrap_or("-"),
            r.cauchy_decay
                .map(|b| if b { "yes" } else { "no" })
                .unwrap_or("-"),
            r.note
                .as_ref()
                .map(|n| format!("  [{}]", n))
                .unwrap_or_default(),
        );
    }
}

struct SolveArtifacts {
    rows: Vec<StartSummary>,
    traces: Vec<Option<IterationTrace>>,
    all_converged: bool,
    agreement: bool,
}

fn solve_instance(
    domain: &Domain,
    metric: &MetricSpec,
    map: &MappingSpec,
    solver: &SolverSettings,
) -> Result<SolveArtifacts, Failure> {
    let mut rows = Vec::new();
    let mut traces = Vec::new();
    for &x0 in &solver.starts {
        match iterate(domain, metric, map, x0, &solver.params) {
            Ok(trace) => {
                rows.push(summarize_trace(&trace));
                traces.push(Some(trace));
            }
            Err(e @ (PicardError::NonFinitePoint { .. } | PicardError::EscapedDomain { .. })) => {
                rows.push(StartSummary {
                    start: x0,
                    verdict: IterationVerdict::DivergedNonFinite.label().to_string(),
                    fixed_point: None,
                    steps: None,
                    residual: None,
                    regular: None,
                    cauchy_decay: None,
                    note: Some(e.to_string()),
                });
                traces.push(None);
            }
            Err(e) => return Err(Failure::Config(e.to_string())),
        }
    }

    let all_converged = rows.iter().all(|r| r.verdict == "converged");
    let fixed: Vec<f64> = rows.iter().filter_map(|r| r.fixed_point).collect();
    let mut agreement = true;
    if let Some(&u0) = fixed.first() {
        for &u in &fixed[1..] {
            let d = metric
                .dist(u0, u)
                .map_err(|e| Failure::Math(format!("cannot compare fixed points: {}", e)))?;
            if d > 10.0 * solver.params.fix_tol {
                agreement = false;
            }
        }
    }
    Ok(SolveArtifacts {
        rows,
        traces,
        all_converged,
        agreement,
    })
}

fn write_traces(
    artifacts: &SolveArtifacts,
    stem: &str,
    format: TraceFormat,
) -> Result<(), Failure> {
    for (k, trace) in artifacts.traces.iter().enumerate() {
        if let Some(trace) = trace {
            let path = PathBuf::from(format!("{}.{:02}.{}", stem, k, format.extension()));
            let content = match format {
                TraceFormat::Csv => trace_to_csv(trace),
                TraceFormat::Json => trace_to_json(trace),
            };
            write_file(&path, &content)?;
        }
    }
    let summary = serde_json::to_string_pretty(&artifacts.rows).expect("summary serializes");
    write_file(&PathBuf::from(format!("{}.summary.json", stem)), &summary)?;
    Ok(())
}

/// Run Picard iteration from every configured start.
///
/// Unless `force` is set, the full instance gate runs first and any failure
/// aborts with its witness. After the solves, all fixed points must agree
/// within `10 * fix_tol`.
pub fn cmd_solve(
    config: &Path,
    out: Option<&Path>,
    format: Option<TraceFormat>,
    force: bool,
) -> Result<Outcome, Failure> {
    let cfg = ExperimentConfig::load(config)?;
    let domain = cfg.build_domain()?;
    let metric = cfg.build_metric()?;
    let map = cfg.build_map()?;
    let zeta = cfg.build_zeta()?;
    let solver = cfg.solver()?;

    if !force {
        let (reports, all_passed) = run_gate(&domain, &metric, &map, &zeta)?;
        for r in &reports {
            print!("{}", r);
        }
        if !all_passed {
            println!("instance gate failed; fix the instance or rerun with --force");
            return Ok(Outcome::MathFail);
        }
    }

    let artifacts = solve_instance(&domain, &metric, &map, &solver)?;
    print_summary(&artifacts.rows);
    if !artifacts.agreement {
        println!(
            "fixed-point uniqueness violated: limits disagree beyond {}",
            fmt_human(10.0 * solver.params.fix_tol)
        );
    }

    let stem = out
        .map(|p| p.to_string_lossy().into_owned())
        .or_else(|| cfg.output_path());
    if let Some(stem) = stem {
        let fmt = match format {
            Some(f) => f,
            None => cfg.output_format()?.unwrap_or(TraceFormat::Json),
        };
        write_traces(&artifacts, &stem, fmt)?;
    }

    Ok(if artifacts.all_converged && artifacts.agreement {
        Outcome::Pass
    } else {
        Outcome::MathFail
    })
}

/// Classify the mapping against the contraction families.
pub fn cmd_classify(config: &Path, out: Option<&Path>) -> Result<Outcome, Failure> {
    let cfg = ExperimentConfig::load(config)?;
    let domain = cfg.build_domain()?;
    let metric = cfg.build_metric()?;
    let map = cfg.build_map()?;

    // instance invariants still gate classification
    let metric_report = verify_metric(&metric, &domain)?;
    if !metric_report.passed() {
        print!("{}", metric_report);
        return Ok(Outcome::MathFail);
    }
    let closure_report = check_closure(&map, &domain);
    if !closure_report.passed() {
        print!("{}", closure_report);
        return Ok(Outcome::MathFail);
    }

    let result = classify(&domain, &metric, &map)?;
    println!(
        "classification: {} under {} ({} pairs)",
        map.name(),
        metric.name(),
        result.pairs_scanned
    );
    for f in &result.families {
        let verdict = if f.passed { "PASS" } else { "FAIL" };
        let detail = match (f.passed, f.lambda, &f.witness) {
            (true, Some(l), _) => format!("lambda = {}", fmt_human(l)),
            (true, None, _) => String::new(),
            (false, _, Some(w)) => format!("witness: {}", w),
            (false, _, None) => String::new(),
        };
        println!("  {:<10} {}  {}", f.family, verdict, detail);
    }
    let certified: Vec<&str> = result
        .z_members
        .iter()
        .filter(|m| m.passed)
        .map(|m| m.zeta.as_str())
        .collect();
    if result.z_contraction {
        println!(
            "  {:<10} PASS  certified by: {}",
            "z_contraction",
            certified.join(", ")
        );
    } else {
        println!(
            "  {:<10} FAIL  no catalogue member certifies this map",
            "z_contraction"
        );
    }
    for note in &result.notes {
        println!("note: {}", note);
    }

    if let Some(path) = out {
        write_file(path, &result.to_json())?;
    }
    Ok(Outcome::Pass)
}

/// The embedded golden scenario.
///
/// Max-metric on `[0, 1]`, the halve-below-half map, and the ratio
/// simulation function `s - ((t+2)/(t+1)) t`; starts 0.1, 0.3, 0.5, 0.9, 1.
pub struct GoldenScenario {
    pub domain: Domain,
    pub metric: MetricSpec,
    pub map: MappingSpec,
    pub zeta: SimulationFunction,
    pub solver: SolverSettings,
}

impl GoldenScenario {
    pub fn build(resolution: u32, zeta_override: Option<&str>) -> Result<GoldenScenario, Failure> {
        let domain = Domain::build(&zetafix::metric::DomainSpec::IntervalGrid {
            lo: 0.0,
            hi: 1.0,
            resolution,
        })
        .map_err(|e| Failure::Config(format!("invalid resolution: {}", e)))?;
        let metric = MetricSpec::parse("max-or-zero", "if(x = y, 0, max(x, y))")
            .expect("embedded metric parses");
        let map = MappingSpec::parse("halve-below-half", "if(x <= 0.5, x / 2, 0)")
            .expect("embedded map parses");
        let zeta = match zeta_override {
            None => simfun::make_ratio(
                simfun::InnerFn2::resolve("t + 2").expect("embedded inner parses"),
                simfun::InnerFn2::resolve("t + 1").expect("embedded inner parses"),
            )
            .expect("embedded zeta is valid"),
            Some(src) => {
                let expr = zetafix::expr::parse(src, &["t", "s"])
                    .map_err(|e| Failure::Config(format!("invalid --zeta '{}': {}", src, e)))?;
                simfun::make_custom(expr)
            }
        };
        Ok(GoldenScenario {
            domain,
            metric,
            map,
            zeta,
            solver: SolverSettings {
                starts: vec![0.1, 0.3, 0.5, 0.9, 1.0],
                params: Default::default(),
            },
        })
    }
}

/// Run the golden scenario end to end.
///
/// Verifies the zeta axioms, runs the instance gate, then solves from all
/// five starts; exit 0 only if everything passes and every start converges
/// to the fixed point 0.
pub fn cmd_reproduce_example2(
    resolution: u32,
    zeta_override: Option<&str>,
    out: Option<&Path>,
    format: Option<TraceFormat>,
) -> Result<Outcome, Failure> {
    let scenario = GoldenScenario::build(resolution, zeta_override)?;

    let axiom_report = check_axioms(
        &scenario.zeta,
        &simfun::default_grid(),
        &simfun::default_families(),
    )
    .map_err(|e| Failure::Math(e.to_string()))?;
    print!("{}", axiom_report);
    if !axiom_report.passed() {
        return Ok(Outcome::MathFail);
    }

    let (reports, all_passed) = run_gate(
        &scenario.domain,
        &scenario.metric,
        &scenario.map,
        &scenario.zeta,
    )?;
    for r in &reports {
        print!("{}", r);
    }
    if !all_passed {
        return Ok(Outcome::MathFail);
    }

    let artifacts = solve_instance(
        &scenario.domain,
        &scenario.metric,
        &scenario.map,
        &scenario.solver,
    )?;
    print_summary(&artifacts.rows);

    // every start must land on the fixed point 0
    let tol = 10.0 * scenario.solver.params.fix_tol;
    let mut at_zero = true;
    for row in &artifacts.rows {
        match row.fixed_point {
            Some(u) => {
                let d = scenario
                    .metric
                    .dist(u, 0.0)
                    .map_err(|e| Failure::Math(e.to_string()))?;
                if d > tol {
                    at_zero = false;
                }
            }
            None => at_zero = false,
        }
    }
    if !at_zero {
        println!(
            "golden scenario failed: some start did not reach 0 within {}",
            fmt_human(tol)
        );
    }

    if let Some(stem) = out {
        write_traces(
            &artifacts,
            &stem.to_string_lossy(),
            format.unwrap_or(TraceFormat::Json),
        )?;
    }

    Ok(
        if artifacts.all_converged && artifacts.agreement && at_zero {
            Outcome::Pass
        } else {
            Outcome::MathFail
        },
    )
}
