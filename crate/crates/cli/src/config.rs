//! Experiment configuration: a single TOML file with nested blocks.
//!
//! Unknown keys are errors, not warnings — silent typos poison math
//! experiments. Every expression is parsed against its declared variable
//! set (`x, y` for metrics, `x` for maps, `t, s` for custom zetas, `u` for
//! inner functions), and numeric fields are range-checked here so the
//! commands can assume a well-formed instance.

use serde::Deserialize;
use std::fmt;
use std::path::Path;
use zetafix::expr::ParseError;
use zetafix::metric::{Domain, DomainSpec, MappingSpec, MetricSpec};
use zetafix::picard::IterateParams;
use zetafix::simfun::{self, InnerFn, InnerFn2, SimfunError, SimulationFunction};

/// A config or usage problem: exit code 2.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn cfg_err(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

fn parse_err(what: &str, src: &str, e: ParseError) -> ConfigError {
    cfg_err(format!("{} expression '{}': {}", what, src, e))
}

/// Raised while building a simulation function: hypothesis violations carry
/// a witness and count as mathematical failures (exit 1), everything else
/// is a config error (exit 2).
#[derive(Debug)]
pub enum ZetaBuildError {
    Config(ConfigError),
    Hypothesis(SimfunError),
}

impl fmt::Display for ZetaBuildError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ZetaBuildError::Config(e) => write!(f, "{}", e),
            ZetaBuildError::Hypothesis(e) => write!(f, "{}", e),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub domain: Option<DomainBlock>,
    pub metric: Option<ExprBlock>,
    pub map: Option<ExprBlock>,
    pub zeta: Option<ZetaBlock>,
    pub solver: Option<SolverBlock>,
    pub output: Option<OutputBlock>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainBlock {
    pub kind: String,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub resolution: Option<u32>,
    pub points: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExprBlock {
    pub name: Option<String>,
    pub expr: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZetaBlock {
    pub family: String,
    pub lambda: Option<f64>,
    pub phi: Option<String>,
    pub psi: Option<String>,
    pub f: Option<String>,
    pub g: Option<String>,
    pub eta: Option<String>,
    pub expr: Option<String>,
    pub quad_tol: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverBlock {
    pub x0: Vec<f64>,
    pub step_tol: Option<f64>,
    pub fix_tol: Option<f64>,
    pub max_iter: Option<u64>,
    pub window: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    pub format: Option<String>,
    pub path: Option<String>,
}

/// Trace file format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceFormat {
    Csv,
    Json,
}

impl TraceFormat {
    pub fn extension(self) -> &'static str {
        match self {
            TraceFormat::Csv => "csv",
            TraceFormat::Json => "json",
        }
    }

    pub fn parse(s: &str) -> Result<TraceFormat, ConfigError> {
        match s {
            "csv" => Ok(TraceFormat::Csv),
            "json" => Ok(TraceFormat::Json),
            other => Err(cfg_err(format!(
                "output.format must be 'csv' or 'json', got '{}'",
                other
            ))),
        }
    }
}

/// Solver settings after validation.
#[derive(Debug, Clone)]
pub struct SolverSettings {
    pub starts: Vec<f64>,
    pub params: IterateParams,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<ExperimentConfig, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| cfg_err(format!("cannot read config {}: {}", path.display(), e)))?;
        toml::from_str(&text)
            .map_err(|e| cfg_err(format!("invalid config {}: {}", path.display(), e)))
    }

    pub fn build_domain(&self) -> Result<Domain, ConfigError> {
        let block = self
            .domain
            .as_ref()
            .ok_or_else(|| cfg_err("missing [domain] block"))?;
        let spec = match block.kind.as_str() {
            "interval_grid" => {
                let lo = block
                    .lo
                    .ok_or_else(|| cfg_err("domain.lo is required for interval_grid"))?;
                let hi = block
                    .hi
                    .ok_or_else(|| cfg_err("domain.hi is required for interval_grid"))?;
                let resolution = block
                    .resolution
                    .ok_or_else(|| cfg_err("domain.resolution is required for interval_grid"))?;
                if block.points.is_some() {
                    return Err(cfg_err("domain.points is not a parameter of interval_grid"));
                }
                DomainSpec::IntervalGrid { lo, hi, resolution }
            }
            "finite_set" => {
                let points = block
                    .points
                    .clone()
                    .ok_or_else(|| cfg_err("domain.points is required for finite_set"))?;
                for key in [
                    ("lo", block.lo.is_some()),
                    ("hi", block.hi.is_some()),
                    ("resolution", block.resolution.is_some()),
                ] {
                    if key.1 {
                        return Err(cfg_err(format!(
                            "domain.{} is not a parameter of finite_set",
                            key.0
                        )));
                    }
                }
                DomainSpec::FiniteSet { points }
            }
            other => {
                return Err(cfg_err(format!(
                    "domain.kind must be 'interval_grid' or 'finite_set', got '{}'",
                    other
                )))
            }
        };
        Domain::build(&spec).map_err(|e| cfg_err(format!("invalid domain: {}", e)))
    }

    pub fn build_metric(&self) -> Result<MetricSpec, ConfigError> {
        let block = self
            .metric
            .as_ref()
            .ok_or_else(|| cfg_err("missing [metric] block"))?;
        let name = block.name.as_deref().unwrap_or("metric");
        MetricSpec::parse(name, &block.expr).map_err(|e| parse_err("metric", &block.expr, e))
    }

    pub fn build_map(&self) -> Result<MappingSpec, ConfigError> {
        let block = self
            .map
            .as_ref()
            .ok_or_else(|| cfg_err("missing [map] block"))?;
        let name = block.name.as_deref().unwrap_or("T");
        MappingSpec::parse(name, &block.expr).map_err(|e| parse_err("map", &block.expr, e))
    }

    pub fn build_zeta(&self) -> Result<SimulationFunction, ZetaBuildError> {
        let block = self
            .zeta
            .as_ref()
            .ok_or_else(|| ZetaBuildError::Config(cfg_err("missing [zeta] block")))?;
        build_zeta_block(block)
    }

    pub fn solver(&self) -> Result<SolverSettings, ConfigError> {
        let block = self
            .solver
            .as_ref()
            .ok_or_else(|| cfg_err("missing [solver] block"))?;
        if block.x0.is_empty() {
            return Err(cfg_err("solver.x0 must list at least one start point"));
        }
        let defaults = IterateParams::default();
        let params = IterateParams {
            step_tol: block.step_tol.unwrap_or(defaults.step_tol),
            fix_tol: block.fix_tol.unwrap_or(defaults.fix_tol),
            max_iter: block.max_iter.unwrap_or(defaults.max_iter),
            cauchy_window: block.window.unwrap_or(defaults.cauchy_window),
        };
        if !(params.step_tol > 0.0 && params.step_tol.is_finite()) {
            return Err(cfg_err("solver.step_tol must be positive"));
        }
        if !(params.fix_tol > 0.0 && params.fix_tol.is_finite()) {
            return Err(cfg_err("solver.fix_tol must be positive"));
        }
        if params.max_iter < 1 {
            return Err(cfg_err("solver.max_iter must be at least 1"));
        }
        if params.cauchy_window < 1 {
            return Err(cfg_err("solver.window must be at least 1"));
        }
        Ok(SolverSettings {
            starts: block.x0.clone(),
            params,
        })
    }

    pub fn output_format(&self) -> Result<Option<TraceFormat>, ConfigError> {
        match self.output.as_ref().and_then(|o| o.format.as_deref()) {
            Some(s) => TraceFormat::parse(s).map(Some),
            None => Ok(None),
        }
    }

    pub fn output_path(&self) -> Option<String> {
        self.output.as_ref().and_then(|o| o.path.clone())
    }
}

fn build_zeta_block(block: &ZetaBlock) -> Result<SimulationFunction, ZetaBuildError> {
    use ZetaBuildError as E;

    // reject parameters that do not belong to the family
    let allowed: &[&str] = match block.family.as_str() {
        "banach" => &["lambda"],
        "rhoades" | "geraghty" => &["phi"],
        "psi_phi" => &["psi", "phi"],
        "ratio" => &["f", "g"],
        "boyd_wong" => &["eta"],
        "integral" => &["phi", "quad_tol"],
        "custom" => &["expr"],
        other => {
            return Err(E::Config(cfg_err(format!(
                "zeta.family must be one of banach, rhoades, psi_phi, ratio, geraghty, boyd_wong, integral, custom; got '{}'",
                other
            ))))
        }
    };
    let present: &[(&str, bool)] = &[
        ("lambda", block.lambda.is_some()),
        ("phi", block.phi.is_some()),
        ("psi", block.psi.is_some()),
        ("f", block.f.is_some()),
        ("g", block.g.is_some()),
        ("eta", block.eta.is_some()),
        ("expr", block.expr.is_some()),
        ("quad_tol", block.quad_tol.is_some()),
    ];
    for (key, is_present) in present {
        if *is_present && !allowed.contains(key) {
            return Err(E::Config(cfg_err(format!(
                "zeta.{} is not a parameter of family '{}'",
                key, block.family
            ))));
        }
    }

    let inner = |key: &str, src: &Option<String>| -> Result<InnerFn, E> {
        let src = src.as_ref().ok_or_else(|| {
            E::Config(cfg_err(format!(
                "zeta.{} is required for family '{}'",
                key, block.family
            )))
        })?;
        InnerFn::resolve(src).map_err(|e| E::Config(parse_err(&format!("zeta.{}", key), src, e)))
    };
    let inner2 = |key: &str, src: &Option<String>| -> Result<InnerFn2, E> {
        let src = src.as_ref().ok_or_else(|| {
            E::Config(cfg_err(format!(
                "zeta.{} is required for family '{}'",
                key, block.family
            )))
        })?;
        InnerFn2::resolve(src).map_err(|e| E::Config(parse_err(&format!("zeta.{}", key), src, e)))
    };

    let lift = |r: Result<SimulationFunction, SimfunError>| -> Result<SimulationFunction, E> {
        r.map_err(|e| match e {
            SimfunError::InvalidInnerFunction { .. } => E::Hypothesis(e),
            other => E::Config(cfg_err(format!("invalid zeta: {}", other))),
        })
    };

    match block.family.as_str() {
        "banach" => {
            let lambda = block
                .lambda
                .ok_or_else(|| E::Config(cfg_err("zeta.lambda is required for family 'banach'")))?;
            lift(simfun::make_banach(lambda))
        }
        "rhoades" => lift(simfun::make_rhoades(inner("phi", &block.phi)?)),
        "psi_phi" => lift(simfun::make_psi_phi(
            inner("psi", &block.psi)?,
            inner("phi", &block.phi)?,
        )),
        "ratio" => lift(simfun::make_ratio(
            inner2("f", &block.f)?,
            inner2("g", &block.g)?,
        )),
        "geraghty" => lift(simfun::make_geraghty(inner("phi", &block.phi)?)),
        "boyd_wong" => lift(simfun::make_boyd_wong(inner("eta", &block.eta)?)),
        "integral" => lift(simfun::make_integral(
            inner("phi", &block.phi)?,
            block.quad_tol.unwrap_or(simfun::DEFAULT_QUAD_TOL),
        )),
        "custom" => {
            let src = block
                .expr
                .as_ref()
                .ok_or_else(|| E::Config(cfg_err("zeta.expr is required for family 'custom'")))?;
            let expr = zetafix::expr::parse(src, &["t", "s"])
                .map_err(|e| E::Config(parse_err("zeta.expr", src, e)))?;
            Ok(simfun::make_custom(expr))
        }
        _ => unreachable!("family validated above"),
    }
}
