//! The catalogue of simulation functions and the numeric axiom checker.
//!
//! A simulation function is a map `zeta : [0,inf)^2 -> R` with
//!
//! * (z1) `zeta(0,0) = 0`,
//! * (z2) `zeta(t,s) < s - t` for all `t, s > 0`,
//! * (z3) `limsup zeta(t_n, s_n) < 0` along any positive sequences with
//!   a common positive limit.
//!
//! Constructors build the classical families: Banach (`s - t/lambda`),
//! Rhoades (`s - phi(s) - t`), psi-phi (`psi(s) - phi(t)`), ratio
//! (`s - (f/g) t`), Geraghty (`s*phi(s) - t`), Boyd–Wong (`eta(s) - t`),
//! integral-type (`s - integral of phi over [0,t]`), plus free-form custom
//! expressions in `t, s`. Each constructor validates its inner-function
//! hypotheses pointwise on the default axiom grid; semicontinuity-style
//! hypotheses are not decidable from point samples and remain the caller's
//! assertion.
//!
//! (z3) is asymptotic, so it is approximated: each generated sequence
//! family contributes its tail maximum, which must stay below a margin
//! scaled to the limit. (z1) is checked exactly; (z2) is scanned over a
//! grid of positive pairs spanning five orders of magnitude.

use crate::expr::{self, Expr, ParseError};
use crate::quad::{self, QuadError};
use crate::report::{CheckResult, VerificationReport, Witness};
use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Relative margin for the (z3) tail test: the tail maximum must be at most
/// `-Z3_MARGIN_SCALE * limit`.
pub const Z3_MARGIN_SCALE: f64 = 1e-9;

/// Default (z3) sequence length; the last half of the terms form the tail.
pub const Z3_SEQUENCE_LEN: usize = 200;

/// Default quadrature tolerance for integral-type simulation functions.
pub const DEFAULT_QUAD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimfunError {
    #[error("invalid parameter {name}={value}: {requirement}")]
    InvalidParameter {
        name: String,
        value: f64,
        requirement: String,
    },
    #[error("inner function {role} violates its hypothesis at {at}: {detail}")]
    InvalidInnerFunction {
        role: String,
        at: String,
        detail: String,
    },
    #[error("quadrature failure: {0}")]
    Quadrature(#[from] QuadError),
    #[error("non-finite value at {context}")]
    NonFiniteValue { context: String },
    #[error("expression error in {role}: {detail}")]
    Expression { role: String, detail: String },
}

/// Named built-in inner functions accepted wherever an expression is.
pub const BUILTIN_INNER: &[(&str, &str)] = &[
    ("half", "u / 2"),
    ("rational_gain", "1 / (1 + u)"),
    ("bw", "u / (1 + u)"),
    ("const2", "2"),
];

/// A scalar inner function of one distance argument `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerFn {
    label: String,
    expr: Expr,
}

impl InnerFn {
    /// Accepts a built-in name (`half`, `rational_gain`, `bw`, `const2`)
    /// or an expression in the variable `u`.
    pub fn resolve(src: &str) -> Result<InnerFn, ParseError> {
        let text = BUILTIN_INNER
            .iter()
            .find(|(name, _)| *name == src.trim())
            .map(|(_, e)| *e)
            .unwrap_or(src);
        let expr = expr::parse(text, &["u"])?;
        Ok(InnerFn {
            label: expr.to_string(),
            expr,
        })
    }

    pub fn from_expr(expr: Expr) -> InnerFn {
        InnerFn {
            label: expr.to_string(),
            expr,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, u: f64, role: &str) -> Result<f64, SimfunError> {
        self.expr
            .eval_slice(&[u])
            .map_err(|e| SimfunError::Expression {
                role: role.to_string(),
                detail: format!("at u={}: {}", u, e),
            })
    }
}

/// A scalar inner function of the pair `(t, s)`, used by the ratio family.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerFn2 {
    label: String,
    expr: Expr,
}

impl InnerFn2 {
    pub fn resolve(src: &str) -> Result<InnerFn2, ParseError> {
        let expr = expr::parse(src, &["t", "s"])?;
        Ok(InnerFn2 {
            label: expr.to_string(),
            expr,
        })
    }

    pub fn from_expr(expr: Expr) -> InnerFn2 {
        InnerFn2 {
            label: expr.to_string(),
            expr,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, t: f64, s: f64, role: &str) -> Result<f64, SimfunError> {
        self.expr
            .eval_slice(&[t, s])
            .map_err(|e| SimfunError::Expression {
                role: role.to_string(),
                detail: format!("at (t={}, s={}): {}", t, s, e),
            })
    }
}

/// Simulation-function family tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Banach,
    Rhoades,
    PsiPhi,
    Ratio,
    Geraghty,
    BoydWong,
    Integral,
    Custom,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Banach => "banach",
            Family::Rhoades => "rhoades",
            Family::PsiPhi => "psi_phi",
            Family::Ratio => "ratio",
            Family::Geraghty => "geraghty",
            Family::BoydWong => "boyd_wong",
            Family::Integral => "integral",
            Family::Custom => "custom",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Evaluator {
    Banach { lambda: f64 },
    Rhoades { phi: InnerFn },
    PsiPhi { psi: InnerFn, phi: InnerFn },
    Ratio { f: InnerFn2, g: InnerFn2 },
    Geraghty { phi: InnerFn },
    BoydWong { eta: InnerFn },
    Integral { phi: InnerFn, quad_tol: f64 },
    Custom { expr: Expr },
}

/// An evaluable simulation function with family metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationFunction {
    family: Family,
    params: Vec<(String, String)>,
    evaluator: Evaluator,
}

impl SimulationFunction {
    pub fn family(&self) -> Family {
        self.family
    }

    /// Family-specific named parameters, for display.
    pub fn params(&self) -> &[(String, String)] {
        &self.params
    }

    /// Short human-readable identity, e.g. `banach(lambda=0.5)`.
    pub fn describe(&self) -> String {
        let args: Vec<String> = self
            .params
            .iter()
            .map(|(k, v)| format!("{}={}", k, v))
            .collect();
        format!("{}({})", self.family.name(), args.join(", "))
    }

    pub fn eval(&self, t: f64, s: f64) -> Result<f64, SimfunError> {
        let v = match &self.evaluator {
            Evaluator::Banach { lambda } => s - t / lambda,
            Evaluator::Rhoades { phi } => s - phi.eval(s, "phi")? - t,
            Evaluator::PsiPhi { psi, phi } => psi.eval(s, "psi")? - phi.eval(t, "phi")?,
            Evaluator::Ratio { f, g } => {
                let fv = f.eval(t, s, "f")?;
                let gv = g.eval(t, s, "g")?;
                if gv == 0.0 {
                    return Err(SimfunError::NonFiniteValue {
                        context: format!("(t={}, s={}): g evaluated to 0", t, s),
                    });
                }
                s - (fv / gv) * t
            }
            Evaluator::Geraghty { phi } => s * phi.eval(s, "phi")? - t,
            Evaluator::BoydWong { eta } => eta.eval(s, "eta")? - t,
            Evaluator::Integral { phi, quad_tol } => {
                let q = quad::integrate(
                    &|u| phi.eval(u, "phi").map_err(|e| e.to_string()),
                    t,
                    *quad_tol,
                )?;
                s - q
            }
            Evaluator::Custom { expr } => {
                expr.eval_slice(&[t, s])
                    .map_err(|e| SimfunError::Expression {
                        role: "zeta".to_string(),
                        detail: format!("at (t={}, s={}): {}", t, s, e),
                    })?
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(SimfunError::NonFiniteValue {
                context: format!("(t={}, s={})", t, s),
            })
        }
    }
}

/// `zeta(t,s) = s - t/lambda` with `lambda` strictly inside `(0, 1)`.
///
/// `lambda = 0` would make the formula undefined; a constant map satisfies
/// the contraction inequality with any catalogue member since its image
/// distances vanish, so no dedicated constructor is needed for it.
pub fn make_banach(lambda: f64) -> Result<SimulationFunction, SimfunError> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(SimfunError::InvalidParameter {
            name: "lambda".into(),
            value: lambda,
            requirement: "must lie strictly inside (0, 1)".into(),
        });
    }
    Ok(SimulationFunction {
        family: Family::Banach,
        params: vec![("lambda".into(), format!("{}", lambda))],
        evaluator: Evaluator::Banach { lambda },
    })
}

/// `zeta(t,s) = s - phi(s) - t` with `phi(0) = 0` and `phi > 0` on the
/// sampled positive grid.
pub fn make_rhoades(phi: InnerFn) -> Result<SimulationFunction, SimfunError> {
    require_zero_at_zero(&phi, "phi")?;
    require_positive_on_grid(&phi, "phi")?;
    Ok(SimulationFunction {
        family: Family::Rhoades,
        params: vec![("phi".into(), phi.label.clone())],
        evaluator: Evaluator::Rhoades { phi },
    })
}

/// `zeta(t,s) = psi(s) - phi(t)` with `psi(0) = phi(0) = 0` and
/// `psi(u) < u <= phi(u)` on the sampled positive grid.
pub fn make_psi_phi(psi: InnerFn, phi: InnerFn) -> Result<SimulationFunction, SimfunError> {
    require_zero_at_zero(&psi, "psi")?;
    require_zero_at_zero(&phi, "phi")?;
    for &u in default_grid().iter() {
        let pv = psi.eval(u, "psi")?;
        let fv = phi.eval(u, "phi")?;
        if !(pv < u) {
            return Err(SimfunError::InvalidInnerFunction {
                role: "psi".into(),
                at: format!("u={}", u),
                detail: format!("psi(u)={} must be < u", pv),
            });
        }
        if !(u <= fv) {
            return Err(SimfunError::InvalidInnerFunction {
                role: "phi".into(),
                at: format!("u={}", u),
                detail: format!("phi(u)={} must be >= u", fv),
            });
        }
    }
    Ok(SimulationFunction {
        family: Family::PsiPhi,
        params: vec![
            ("psi".into(), psi.label.clone()),
            ("phi".into(), phi.label.clone()),
        ],
        evaluator: Evaluator::PsiPhi { psi, phi },
    })
}

/// `zeta(t,s) = s - (f(t,s)/g(t,s)) t` with `f, g` strictly positive and
/// `f > g` on the sampled positive grid.
pub fn make_ratio(f: InnerFn2, g: InnerFn2) -> Result<SimulationFunction, SimfunError> {
    let grid = default_grid();
    for &t in grid.iter() {
        for &s in grid.iter() {
            let fv = f.eval(t, s, "f")?;
            let gv = g.eval(t, s, "g")?;
            if !(gv > 0.0) {
                return Err(SimfunError::InvalidInnerFunction {
                    role: "g".into(),
                    at: format!("(t={}, s={})", t, s),
                    detail: format!("g={} must be strictly positive", gv),
                });
            }
            if !(fv > 0.0) {
                return Err(SimfunError::InvalidInnerFunction {
                    role: "f".into(),
                    at: format!("(t={}, s={})", t, s),
                    detail: format!("f={} must be strictly positive", fv),
                });
            }
            if !(fv > gv) {
                return Err(SimfunError::InvalidInnerFunction {
                    role: "f".into(),
                    at: format!("(t={}, s={})", t, s),
                    detail: format!("f={} must exceed g={}", fv, gv),
                });
            }
        }
    }
    Ok(SimulationFunction {
        family: Family::Ratio,
        params: vec![("f".into(), f.label.clone()), ("g".into(), g.label.clone())],
        evaluator: Evaluator::Ratio { f, g },
    })
}

/// `zeta(t,s) = s*phi(s) - t` with `0 <= phi < 1` on the sampled positive
/// grid. The limsup hypothesis on `phi` is not decidable pointwise.
pub fn make_geraghty(phi: InnerFn) -> Result<SimulationFunction, SimfunError> {
    for &u in default_grid().iter() {
        let v = phi.eval(u, "phi")?;
        if !(0.0..1.0).contains(&v) {
            return Err(SimfunError::InvalidInnerFunction {
                role: "phi".into(),
                at: format!("u={}", u),
                detail: format!("phi(u)={} must lie in [0, 1)", v),
            });
        }
    }
    Ok(SimulationFunction {
        family: Family::Geraghty,
        params: vec![("phi".into(), phi.label.clone())],
        evaluator: Evaluator::Geraghty { phi },
    })
}

/// `zeta(t,s) = eta(s) - t` with `eta(0) = 0` and `eta(u) < u` on the
/// sampled positive grid.
pub fn make_boyd_wong(eta: InnerFn) -> Result<SimulationFunction, SimfunError> {
    require_zero_at_zero(&eta, "eta")?;
    for &u in default_grid().iter() {
        let v = eta.eval(u, "eta")?;
        if !(v < u) {
            return Err(SimfunError::InvalidInnerFunction {
                role: "eta".into(),
                at: format!("u={}", u),
                detail: format!("eta(u)={} must be < u", v),
            });
        }
    }
    Ok(SimulationFunction {
        family: Family::BoydWong,
        params: vec![("eta".into(), eta.label.clone())],
        evaluator: Evaluator::BoydWong { eta },
    })
}

/// `zeta(t,s) = s - Q(t)` where `Q(t)` approximates the integral of `phi`
/// over `[0, t]` within `quad_tol`.
///
/// Requires `phi >= 0` and the superlinear mass condition
/// `integral of phi over [0, eps] > eps` on the sampled grid.
pub fn make_integral(phi: InnerFn, quad_tol: f64) -> Result<SimulationFunction, SimfunError> {
    if !(quad_tol > 0.0 && quad_tol.is_finite()) {
        return Err(SimfunError::InvalidParameter {
            name: "quad_tol".into(),
            value: quad_tol,
            requirement: "must be a positive finite tolerance".into(),
        });
    }
    let zero = phi.eval(0.0, "phi")?;
    if !(zero >= 0.0) {
        return Err(SimfunError::InvalidInnerFunction {
            role: "phi".into(),
            at: "u=0".into(),
            detail: format!("phi(0)={} must be nonnegative", zero),
        });
    }
    for &eps in default_grid().iter() {
        let v = phi.eval(eps, "phi")?;
        if !(v >= 0.0) {
            return Err(SimfunError::InvalidInnerFunction {
                role: "phi".into(),
                at: format!("u={}", eps),
                detail: format!("phi(u)={} must be nonnegative", v),
            });
        }
        let mass = quad::integrate(
            &|u| phi.eval(u, "phi").map_err(|e| e.to_string()),
            eps,
            quad_tol,
        )?;
        if !(mass > eps) {
            return Err(SimfunError::InvalidInnerFunction {
                role: "phi".into(),
                at: format!("eps={}", eps),
                detail: format!("integral {} over [0, eps] must exceed eps", mass),
            });
        }
    }
    Ok(SimulationFunction {
        family: Family::Integral,
        params: vec![
            ("phi".into(), phi.label.clone()),
            ("quad_tol".into(), format!("{:e}", quad_tol)),
        ],
        evaluator: Evaluator::Integral { phi, quad_tol },
    })
}

/// A free-form `zeta(t, s)`; the axioms are checked, not assumed.
pub fn make_custom(expr: Expr) -> SimulationFunction {
    SimulationFunction {
        family: Family::Custom,
        params: vec![("expr".into(), expr.to_string())],
        evaluator: Evaluator::Custom { expr },
    }
}

fn require_zero_at_zero(f: &InnerFn, role: &str) -> Result<(), SimfunError> {
    let v = f.eval(0.0, role)?;
    if v != 0.0 {
        return Err(SimfunError::InvalidInnerFunction {
            role: role.to_string(),
            at: "u=0".into(),
            detail: format!("{}(0)={} must be exactly 0", role, v),
        });
    }
    Ok(())
}

fn require_positive_on_grid(f: &InnerFn, role: &str) -> Result<(), SimfunError> {
    for &u in default_grid().iter() {
        let v = f.eval(u, role)?;
        if !(v > 0.0) {
            return Err(SimfunError::InvalidInnerFunction {
                role: role.to_string(),
                at: format!("u={}", u),
                detail: format!("{}(u)={} must be strictly positive", role, v),
            });
        }
    }
    Ok(())
}

/// The default (z2) grid: `{10^k * m : k in -3..=1, m in 1..=9}`, sorted
/// ascending — 45 values spanning five orders of magnitude, 2025 pairs.
pub fn default_grid() -> Vec<f64> {
    let mut grid = Vec::with_capacity(45);
    for k in -3..=1i32 {
        let base = 10f64.powi(k);
        for m in 1..=9u32 {
            grid.push(base * m as f64);
        }
    }
    grid
}

/// How a (z3) test sequence approaches its limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SequenceShape {
    /// `t_n = s_n = limit`.
    Constant,
    /// Decay onto the limit from above, `limit * (1 + rate/n)`.
    Above,
    /// Decay onto the limit from below, `limit * (1 - rate/n)`.
    Below,
    /// `t_n` and `s_n` straddle the limit with opposite signs per step.
    Alternating,
}

impl SequenceShape {
    pub fn name(self) -> &'static str {
        match self {
            SequenceShape::Constant => "constant",
            SequenceShape::Above => "above",
            SequenceShape::Below => "below",
            SequenceShape::Alternating => "alternating",
        }
    }
}

/// A generated pair of positive sequences `(t_n, s_n)` converging to a
/// common positive limit, used to probe axiom (z3).
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceFamily {
    shape: SequenceShape,
    limit: f64,
    len: usize,
    rate: f64,
}

impl SequenceFamily {
    pub fn new(
        shape: SequenceShape,
        limit: f64,
        len: usize,
        rate: f64,
    ) -> Result<SequenceFamily, SimfunError> {
        if !(limit > 0.0 && limit.is_finite()) {
            return Err(SimfunError::InvalidParameter {
                name: "limit".into(),
                value: limit,
                requirement: "must be a positive finite limit".into(),
            });
        }
        if len < 2 {
            return Err(SimfunError::InvalidParameter {
                name: "len".into(),
                value: len as f64,
                requirement: "must be at least 2".into(),
            });
        }
        if !(rate > 0.0 && rate < 1.0) {
            return Err(SimfunError::InvalidParameter {
                name: "rate".into(),
                value: rate,
                requirement: "must lie in (0, 1) so all terms stay positive".into(),
            });
        }
        Ok(SequenceFamily {
            shape,
            limit,
            len,
            rate,
        })
    }

    pub fn shape(&self) -> SequenceShape {
        self.shape
    }

    pub fn limit(&self) -> f64 {
        self.limit
    }

    pub fn label(&self) -> String {
        format!("{}, limit={}", self.shape.name(), self.limit)
    }

    /// Terms `(t_n, s_n)` for `n = 1..=len`; all strictly positive.
    pub fn generate(&self) -> Vec<(f64, f64)> {
        let l = self.limit;
        let c = self.rate;
        (1..=self.len)
            .map(|n| {
                let n = n as f64;
                match self.shape {
                    SequenceShape::Constant => (l, l),
                    SequenceShape::Above => (l * (1.0 + c / n), l * (1.0 + c / (2.0 * n))),
                    SequenceShape::Below => (l * (1.0 - c / n), l * (1.0 - c / (2.0 * n))),
                    SequenceShape::Alternating => {
                        let sign = if (n as usize).is_multiple_of(2) {
                            1.0
                        } else {
                            -1.0
                        };
                        (l * (1.0 + sign * c / n), l * (1.0 - sign * c / (2.0 * n)))
                    }
                }
            })
            .collect()
    }
}

/// Default (z3) probe set: all four shapes at limits 0.5, 1 and 5.
pub fn default_families() -> Vec<SequenceFamily> {
    let mut out = Vec::new();
    for &limit in &[0.5, 1.0, 5.0] {
        for shape in [
            SequenceShape::Constant,
            SequenceShape::Above,
            SequenceShape::Below,
            SequenceShape::Alternating,
        ] {
            out.push(SequenceFamily::new(shape, limit, Z3_SEQUENCE_LEN, 0.5).unwrap());
        }
    }
    out
}

/// The registered simulation-function catalogue, in fixed order.
///
/// These are the instances used when a mapping is probed for
/// Z-contractivity without a user-supplied `zeta`: one representative per
/// constructor with documented inner functions (`half`, `rational_gain`,
/// `bw`, `const2` and the `t+2 : t+1` ratio). The order is part of the
/// report contract.
pub fn catalogue() -> Vec<SimulationFunction> {
    let inner = |src: &str| InnerFn::resolve(src).expect("catalogue inner functions parse");
    let inner2 = |src: &str| InnerFn2::resolve(src).expect("catalogue inner functions parse");
    vec![
        make_banach(0.5).expect("catalogue member is valid"),
        make_rhoades(inner("half")).expect("catalogue member is valid"),
        make_psi_phi(inner("u / 2"), inner("2 * u")).expect("catalogue member is valid"),
        make_ratio(inner2("t + 2"), inner2("t + 1")).expect("catalogue member is valid"),
        make_geraghty(inner("rational_gain")).expect("catalogue member is valid"),
        make_boyd_wong(inner("bw")).expect("catalogue member is valid"),
        make_integral(inner("const2"), DEFAULT_QUAD_TOL).expect("catalogue member is valid"),
    ]
}

/// Seeded extra positive pairs for randomized (z2) probing, log-uniform
/// over `[1e-4, 1e2]`. Deterministic for a fixed seed.
pub fn seeded_pairs(seed: u64, count: usize) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let exp = Uniform::new_inclusive(-4.0f64, 2.0);
    (0..count)
        .map(|_| {
            let t = 10f64.powf(exp.sample(&mut rng));
            let s = 10f64.powf(exp.sample(&mut rng));
            (t, s)
        })
        .collect()
}

/// Verify axioms (z1)-(z3) numerically.
///
/// * (z1): `zeta(0,0)` must evaluate to exactly 0.
/// * (z2): `zeta(t,s) < s - t` over all pairs of the strictly positive
///   `grid` (scanned in sorted order; the first failure is the witness).
/// * (z3): for each family, the maximum of `zeta(t_n, s_n)` over the last
///   half of the terms must be at most `-Z3_MARGIN_SCALE * limit`.
///
/// ```
/// use zetafix::simfun::{check_axioms, default_families, default_grid, make_banach};
///
/// let zeta = make_banach(0.5).unwrap();
/// let report = check_axioms(&zeta, &default_grid(), &default_families()).unwrap();
/// assert!(report.passed());
/// ```
pub fn check_axioms(
    zeta: &SimulationFunction,
    grid: &[f64],
    families: &[SequenceFamily],
) -> Result<VerificationReport, SimfunError> {
    if let Some(&bad) = grid.iter().find(|&&v| !(v > 0.0) || !v.is_finite()) {
        return Err(SimfunError::InvalidParameter {
            name: "grid".into(),
            value: bad,
            requirement: "all (z2) grid values must be strictly positive and finite".into(),
        });
    }
    let mut sorted = grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();

    let mut report = VerificationReport::new(format!("simulation axioms: {}", zeta.describe()));

    // (z1) exact evaluation at the origin
    let origin = zeta.eval(0.0, 0.0)?;
    report.push(if origin == 0.0 {
        CheckResult::pass("zeta1", 1)
    } else {
        CheckResult::fail(
            "zeta1",
            1,
            Witness::new(
                [("t", 0.0), ("s", 0.0)],
                [("zeta(0,0)".to_string(), origin)],
            ),
        )
    });

    // (z2) strict inequality over the positive grid
    let pair_count = (sorted.len() * sorted.len()) as u64;
    let mut z2 = CheckResult::pass("zeta2", pair_count);
    'z2: for &t in &sorted {
        for &s in &sorted {
            let v = zeta.eval(t, s)?;
            if !(v < s - t) {
                z2 = CheckResult::fail(
                    "zeta2",
                    pair_count,
                    Witness::new(
                        [("t", t), ("s", s)],
                        [("zeta(t,s)".to_string(), v), ("s-t".to_string(), s - t)],
                    ),
                );
                break 'z2;
            }
        }
    }
    report.push(z2);

    // (z3) tail negativity per sequence family
    for family in families {
        let terms = family.generate();
        let tail_start = terms.len() / 2;
        let margin = Z3_MARGIN_SCALE * family.limit();
        let name = format!("zeta3[{}]", family.label());
        let mut worst: Option<(usize, f64, f64, f64)> = None;
        for (i, &(t, s)) in terms.iter().enumerate().skip(tail_start) {
            let v = zeta.eval(t, s)?;
            if worst.is_none_or(|(_, _, _, wv)| v > wv) {
                worst = Some((i + 1, t, s, v));
            }
        }
        let (n, t, s, v) = worst.expect("families have at least one tail term");
        let checked = (terms.len() - tail_start) as u64;
        report.push(if v <= -margin {
            CheckResult::pass(name, checked).with_note(format!(
                "tail max {} <= {}",
                crate::report::fmt_human(v),
                crate::report::fmt_human(-margin)
            ))
        } else {
            CheckResult::fail(
                name,
                checked,
                Witness::new(
                    [("n", n as f64), ("t_n", t), ("s_n", s)],
                    [
                        ("zeta(t_n,s_n)".to_string(), v),
                        ("margin".to_string(), margin),
                    ],
                ),
            )
        });
    }

    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inner(src: &str) -> InnerFn {
        InnerFn::resolve(src).unwrap()
    }

    fn inner2(src: &str) -> InnerFn2 {
        InnerFn2::resolve(src).unwrap()
    }

    /// Catalogue plus the extra Banach moduli exercised in tests.
    fn sweep_set() -> Vec<SimulationFunction> {
        let mut set = catalogue();
        set.push(make_banach(0.1).unwrap());
        set.push(make_banach(0.9).unwrap());
        set
    }

    #[test]
    fn banach_evaluates_directly() {
        let z = make_banach(0.5).unwrap();
        assert_eq!(z.eval(1.0, 3.0).unwrap(), 1.0);
        assert_eq!(z.eval(0.0, 0.0).unwrap(), 0.0);
        assert_eq!(z.eval(2.0, 2.0).unwrap(), -2.0);
    }

    #[test]
    fn banach_rejects_bad_lambda() {
        assert!(make_banach(0.0).is_err());
        assert!(make_banach(1.0).is_err());
        assert!(make_banach(-0.5).is_err());
        assert!(make_banach(f64::NAN).is_err());
    }

    #[test]
    fn rhoades_evaluates_directly() {
        let z = make_rhoades(inner("u / 2")).unwrap();
        assert_eq!(z.eval(1.0, 2.0).unwrap(), 0.0);
        assert_eq!(z.eval(0.0, 0.0).unwrap(), 0.0);
        assert!((z.eval(0.1, 1.0).unwrap() - 0.4).abs() < 1e-15);
    }

    #[test]
    fn rhoades_rejects_vanishing_phi() {
        // phi(u) = 0 violates positivity away from 0
        assert!(matches!(
            make_rhoades(inner("0 * u")),
            Err(SimfunError::InvalidInnerFunction { .. })
        ));
    }

    #[test]
    fn psi_phi_evaluates_directly() {
        let z = make_psi_phi(inner("u / 2"), inner("u")).unwrap();
        assert_eq!(z.eval(1.0, 1.0).unwrap(), -0.5);
        assert_eq!(z.eval(0.0, 0.0).unwrap(), 0.0);
        let z2 = make_psi_phi(inner("u / 2"), inner("2 * u")).unwrap();
        assert_eq!(z2.eval(0.5, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn psi_phi_requires_psi_below_identity() {
        assert!(make_psi_phi(inner("u"), inner("2 * u")).is_err());
        assert!(make_psi_phi(inner("u / 2"), inner("u / 2")).is_err());
    }

    #[test]
    fn ratio_evaluates_directly() {
        let z = make_ratio(inner2("t + 2"), inner2("t + 1")).unwrap();
        assert_eq!(z.eval(1.0, 2.0).unwrap(), 0.5);
        assert_eq!(z.eval(0.0, 7.0).unwrap(), 7.0);
        assert!((z.eval(0.25, 0.5).unwrap() - 0.05).abs() < 1e-15);
    }

    #[test]
    fn ratio_requires_f_above_g() {
        assert!(matches!(
            make_ratio(inner2("t + 1"), inner2("t + 2")),
            Err(SimfunError::InvalidInnerFunction { .. })
        ));
        assert!(make_ratio(inner2("t"), inner2("t + 1")).is_err());
    }

    #[test]
    fn geraghty_evaluates_directly() {
        let z = make_geraghty(inner("1 / (1 + u)")).unwrap();
        assert_eq!(z.eval(0.5, 1.0).unwrap(), 0.0);
        assert_eq!(z.eval(0.0, 0.0).unwrap(), 0.0);
        assert_eq!(z.eval(1.0, 1.0).unwrap(), -0.5);
    }

    #[test]
    fn geraghty_rejects_gain_reaching_one() {
        assert!(make_geraghty(inner("1 + 0 * u")).is_err());
    }

    #[test]
    fn boyd_wong_evaluates_directly() {
        let z = make_boyd_wong(inner("u / (1 + u)")).unwrap();
        assert_eq!(z.eval(0.5, 1.0).unwrap(), 0.0);
        assert_eq!(z.eval(0.0, 0.0).unwrap(), 0.0);
        let v = z.eval(1.0, 2.0).unwrap();
        assert!((v + 1.0 / 3.0).abs() < 1e-15, "{}", v);
    }

    #[test]
    fn integral_matches_closed_form_for_constants() {
        let z = make_integral(inner("const2"), 1e-10).unwrap();
        assert_eq!(z.eval(1.0, 3.0).unwrap(), 1.0);
        assert_eq!(z.eval(0.0, 5.0).unwrap(), 5.0);
        assert_eq!(z.eval(1.0, 1.5).unwrap(), -0.5);
    }

    #[test]
    fn integral_tracks_the_closed_form_for_linear_integrands() {
        // integral of 2 + u over [0, t] is 2t + t^2/2
        let quad_tol = 1e-10;
        let z = make_integral(inner("2 + u"), quad_tol).unwrap();
        for &t in &[0.001, 0.01, 0.1, 1.0, 10.0] {
            let q = -z.eval(t, 0.0).unwrap();
            let exact = 2.0 * t + t * t / 2.0;
            assert!(
                (q - exact).abs() <= 2.0 * quad_tol,
                "t={}: {} vs {}",
                t,
                q,
                exact
            );
        }
    }

    #[test]
    fn integral_rejects_sublinear_mass() {
        // integral of u over [0, eps] is eps^2/2 < eps for small eps
        assert!(matches!(
            make_integral(inner("u"), 1e-10),
            Err(SimfunError::InvalidInnerFunction { .. })
        ));
    }

    #[test]
    fn default_grid_has_2025_pairs() {
        let g = default_grid();
        assert_eq!(g.len(), 45);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(g[0], 0.001);
        assert_eq!(*g.last().unwrap(), 90.0);
    }

    #[test]
    fn families_generate_positive_terms_converging_to_limit() {
        for fam in default_families() {
            let terms = fam.generate();
            assert_eq!(terms.len(), Z3_SEQUENCE_LEN);
            assert!(
                terms.iter().all(|&(t, s)| t > 0.0 && s > 0.0),
                "{}",
                fam.label()
            );
            let (t_last, s_last) = terms[terms.len() - 1];
            assert!((t_last - fam.limit()).abs() <= fam.limit() * 0.01);
            assert!((s_last - fam.limit()).abs() <= fam.limit() * 0.01);
        }
    }

    #[test]
    fn whole_catalogue_passes_the_axioms() {
        let grid = default_grid();
        let families = default_families();
        for z in sweep_set() {
            let report = check_axioms(&z, &grid, &families).unwrap();
            assert!(report.passed(), "{} failed:\n{}", z.describe(), report);
        }
    }

    #[test]
    fn identity_difference_is_not_a_simulation_function() {
        let z = make_custom(expr::parse("s - t", &["t", "s"]).unwrap());
        let report = check_axioms(&z, &default_grid(), &default_families()).unwrap();
        assert!(!report.passed());
        let fail = report.first_failure().unwrap();
        assert_eq!(fail.name, "zeta2");
        let w = fail.witness.as_ref().unwrap();
        // lexicographically smallest pair of the sorted grid
        assert_eq!(w.inputs[0].1, 0.001);
        assert_eq!(w.inputs[1].1, 0.001);
    }

    #[test]
    fn zeta_is_negative_on_the_diagonal() {
        // consequence of (z2) at t = s = r
        for z in sweep_set() {
            for &r in default_grid().iter() {
                assert!(z.eval(r, r).unwrap() < 0.0, "{} at r={}", z.describe(), r);
            }
        }
    }

    #[test]
    fn permuted_grid_yields_the_same_verdict_and_witness() {
        let z = make_custom(expr::parse("s - t", &["t", "s"]).unwrap());
        let grid = default_grid();
        let mut permuted = grid.clone();
        permuted.reverse();
        permuted.swap(3, 17);
        let a = check_axioms(&z, &grid, &default_families()).unwrap();
        let b = check_axioms(&z, &permuted, &default_families()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn seeded_pairs_are_deterministic_and_positive() {
        let a = seeded_pairs(7, 64);
        let b = seeded_pairs(7, 64);
        assert_eq!(a, b);
        assert!(a.iter().all(|&(t, s)| t > 0.0 && s > 0.0));
        assert_ne!(seeded_pairs(8, 64), a);
    }

    #[test]
    fn nonpositive_grid_values_are_rejected() {
        let z = make_banach(0.5).unwrap();
        let err = check_axioms(&z, &[0.0, 1.0], &[]).unwrap_err();
        assert!(matches!(err, SimfunError::InvalidParameter { .. }));
    }
}
