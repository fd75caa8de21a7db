//! Acceptance suite: every criterion runs at its stated tolerance and
//! prints one pass line. Run with `cargo test -p zetafix-cli --test
//! acceptance -- --nocapture` to see the lines; any failure panics with
//! the offending witness.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::Path;
use std::process::{Command, Output};
use std::time::Instant;
use zetafix::contraction::{
    brute_force_fixed_points, check_distance_preservation, verify_z, ContractionInstance,
};
use zetafix::expr::{self, BinOp, CmpOp, Cond, Expr, Func, ParseError};
use zetafix::metric::{Domain, DomainSpec, MappingSpec, MetricSpec};
use zetafix::picard::{check_asymptotic_regularity, iterate, IterateParams, IterationVerdict};
use zetafix::randgen::random_instances;
use zetafix::simfun::{
    catalogue, check_axioms, default_families, default_grid, make_banach, make_boyd_wong,
    make_custom, make_geraghty, make_integral, make_psi_phi, make_ratio, make_rhoades, InnerFn,
    InnerFn2, SimulationFunction,
};

const ORACLE_SEED: u64 = 0x5eed_2026;

fn zetafix_bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zetafix"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn golden_instance(resolution: u32) -> ContractionInstance {
    ContractionInstance {
        domain: Domain::build(&DomainSpec::IntervalGrid {
            lo: 0.0,
            hi: 1.0,
            resolution,
        })
        .unwrap(),
        metric: MetricSpec::parse("max-or-zero", "if(x = y, 0, max(x, y))").unwrap(),
        map: MappingSpec::parse("halve-below-half", "if(x <= 0.5, x / 2, 0)").unwrap(),
        zeta: make_ratio(
            InnerFn2::resolve("t + 2").unwrap(),
            InnerFn2::resolve("t + 1").unwrap(),
        )
        .unwrap(),
    }
}

const GOLDEN_STARTS: [f64; 5] = [0.1, 0.3, 0.5, 0.9, 1.0];

#[test]
fn criterion_1_golden_reproduction() {
    let started = Instant::now();

    // the CLI path: reproduce-example2 must exit 0
    let out = zetafix_bin(&["reproduce-example2"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "reproduce-example2 failed:\n{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(
        text.contains("(501501 checked)"),
        "pair count missing:\n{}",
        text
    );

    // the library path: zero violations over all 501,501 pairs at N=1000
    let instance = golden_instance(1000);
    let z_report = verify_z(&instance).unwrap();
    assert!(z_report.passed());
    assert_eq!(z_report.checks[0].checked, 501_501);

    // Picard from the five starts: residual <= 1e-9 within 40 steps, limit 0
    let params = IterateParams::default();
    for x0 in GOLDEN_STARTS {
        let trace = iterate(
            &instance.domain,
            &instance.metric,
            &instance.map,
            x0,
            &params,
        )
        .unwrap();
        match trace.verdict {
            IterationVerdict::Converged { fixed_point, steps } => {
                assert!(steps <= 40, "x0={}: {} steps", x0, steps);
                assert!(
                    trace.residual <= 1e-9,
                    "x0={}: residual {}",
                    x0,
                    trace.residual
                );
                let d0 = instance.metric.dist(fixed_point, 0.0).unwrap();
                assert!(d0 <= 1e-8, "x0={}: limit {}", x0, fixed_point);
            }
            other => panic!("x0={}: verdict {:?}", x0, other),
        }
    }

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {:?}", elapsed);
    println!("criterion 1 (golden reproduction, {:?}): PASS", elapsed);
}

fn axiom_suite() -> Vec<SimulationFunction> {
    let inner = |s: &str| InnerFn::resolve(s).unwrap();
    let inner2 = |s: &str| InnerFn2::resolve(s).unwrap();
    vec![
        make_banach(0.1).unwrap(),
        make_banach(0.5).unwrap(),
        make_banach(0.9).unwrap(),
        make_rhoades(inner("u / 2")).unwrap(),
        make_psi_phi(inner("u / 2"), inner("2 * u")).unwrap(),
        make_ratio(inner2("t + 2"), inner2("t + 1")).unwrap(),
        make_geraghty(inner("1 / (1 + u)")).unwrap(),
        make_boyd_wong(inner("u / (1 + u)")).unwrap(),
        make_integral(inner("const2"), 1e-10).unwrap(),
    ]
}

#[test]
fn criterion_2_axiom_suite() {
    let grid = default_grid();
    let families = default_families();
    assert_eq!(grid.len() * grid.len(), 2025);
    assert_eq!(families.len(), 12); // 4 shapes x limits {0.5, 1, 5}

    for zeta in axiom_suite() {
        let report = check_axioms(&zeta, &grid, &families).unwrap();
        assert!(report.passed(), "{} failed:\n{}", zeta.describe(), report);
        // one zeta1 entry, one zeta2 entry over 2025 pairs, one entry per family
        assert_eq!(report.checks.len(), 2 + families.len());
        assert_eq!(report.checks[1].checked, 2025);
    }
    println!("criterion 2 (axiom suite, 9 instances x 14 checks): PASS");
}

#[test]
fn criterion_3_negative_controls() {
    // s - t violates strictness of (z2)
    let not_simfun = make_custom(expr::parse("s - t", &["t", "s"]).unwrap());
    let report = check_axioms(&not_simfun, &default_grid(), &default_families()).unwrap();
    assert!(!report.passed());
    let fail = report.first_failure().unwrap();
    assert_eq!(fail.name, "zeta2");
    assert!(fail.witness.is_some(), "zeta2 failure must carry a witness");

    // the identity map preserves distances and fails every catalogue zeta
    let domain = Domain::build(&DomainSpec::FiniteSet {
        points: vec![0.0, 1.0],
    })
    .unwrap();
    let metric = MetricSpec::parse("euclid", "abs(x - y)").unwrap();
    let identity = MappingSpec::parse("identity", "x").unwrap();
    let preserved = check_distance_preservation(&domain, &metric, &identity).unwrap();
    assert!(!preserved.passed());
    assert!(preserved.first_failure().unwrap().witness.is_some());
    for zeta in catalogue() {
        let instance = ContractionInstance {
            domain: domain.clone(),
            metric: metric.clone(),
            map: identity.clone(),
            zeta: zeta.clone(),
        };
        let z = verify_z(&instance).unwrap();
        assert!(
            !z.passed(),
            "{} certified the identity map",
            zeta.describe()
        );
        assert!(z.first_failure().unwrap().witness.is_some());
    }

    // the flip map is an isometry on {0, 1}
    let flip = MappingSpec::parse("flip", "1 - x").unwrap();
    let preserved = check_distance_preservation(&domain, &metric, &flip).unwrap();
    assert!(!preserved.passed());
    let witness = preserved.first_failure().unwrap().witness.as_ref().unwrap();
    assert_eq!(witness.inputs[0].1, 0.0);
    assert_eq!(witness.inputs[1].1, 1.0);
    println!("criterion 3 (negative controls with witnesses): PASS");
}

/// Instances of the randomized oracle that some catalogue member certifies,
/// together with the index of the certifying member.
fn certified_instances() -> Vec<(zetafix::randgen::RandomInstance, usize)> {
    let set = catalogue();
    random_instances(ORACLE_SEED, 200, 8)
        .into_iter()
        .filter_map(|inst| {
            let zi = set.iter().position(|zeta| {
                let instance = ContractionInstance {
                    domain: inst.domain.clone(),
                    metric: inst.metric.clone(),
                    map: inst.map.clone(),
                    zeta: zeta.clone(),
                };
                verify_z(&instance).unwrap().passed()
            });
            zi.map(|zi| (inst, zi))
        })
        .collect()
}

#[test]
fn criterion_4_randomized_oracle() {
    let started = Instant::now();
    let params = IterateParams {
        max_iter: 10_000,
        ..Default::default()
    };
    let certified = certified_instances();
    assert!(
        certified.len() >= 40,
        "only {} certified instances",
        certified.len()
    );

    for (inst, _) in &certified {
        let fixed = brute_force_fixed_points(&inst.domain, &inst.map).unwrap();
        assert_eq!(fixed.len(), 1, "style {:?}: {:?}", inst.style, fixed);
        let u = fixed[0];
        for &x0 in inst.domain.points() {
            let trace = iterate(&inst.domain, &inst.metric, &inst.map, x0, &params).unwrap();
            match trace.verdict {
                IterationVerdict::Converged { fixed_point, .. } => assert_eq!(fixed_point, u),
                other => panic!("x0={}: {:?}", x0, other),
            }
        }
    }

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "took {:?}", elapsed);
    println!(
        "criterion 4 (randomized oracle, {} certified instances, {:?}): PASS",
        certified.len(),
        elapsed
    );
}

#[test]
fn criterion_5_diagnostics_conjunction() {
    let params = IterateParams {
        max_iter: 10_000,
        ..Default::default()
    };
    let mut traces_checked = 0usize;

    for (inst, _) in &certified_instances() {
        for &x0 in inst.domain.points() {
            let trace = iterate(&inst.domain, &inst.metric, &inst.map, x0, &params).unwrap();
            let regularity = check_asymptotic_regularity(&trace);
            assert!(regularity.passed(), "x0={}:\n{}", x0, regularity);
            assert!(
                trace.cauchy_modulus.windows(2).all(|w| w[1] <= w[0]),
                "x0={}: cauchy modulus not nonincreasing",
                x0
            );
            traces_checked += 1;
        }
    }

    let golden = golden_instance(1000);
    for x0 in GOLDEN_STARTS {
        let trace = iterate(&golden.domain, &golden.metric, &golden.map, x0, &params).unwrap();
        assert!(check_asymptotic_regularity(&trace).passed(), "x0={}", x0);
        assert!(
            trace.cauchy_modulus.windows(2).all(|w| w[1] <= w[0]),
            "x0={}",
            x0
        );
        traces_checked += 1;
    }
    println!(
        "criterion 5 (diagnostics on {} traces): PASS",
        traces_checked
    );
}

#[test]
fn criterion_6_quadrature_fidelity() {
    // 2 * quad_tol = 1e-9, matching the stated bound
    let zeta = make_integral(InnerFn::resolve("const2").unwrap(), 5e-10).unwrap();
    for t in [0.001, 0.01, 0.1, 1.0, 10.0] {
        // zeta(t, 0) = -Q(t)
        let q = -zeta.eval(t, 0.0).unwrap();
        let closed_form = 2.0 * t;
        assert!(
            (q - closed_form).abs() <= 1e-9,
            "t={}: Q={} vs {}",
            t,
            q,
            closed_form
        );
    }
    println!("criterion 6 (quadrature vs closed form at 5 scales): PASS");
}

/// Deterministic random AST for the round-trip check.
fn random_ast(rng: &mut ChaCha8Rng, depth: usize) -> Expr {
    const VARS: [&str; 4] = ["x", "y", "t", "s"];
    if depth == 0 || rng.gen_range(0..10) < 2 {
        return if rng.gen_bool(0.5) {
            Expr::Num((rng.gen_range(0..100_000) as f64) / 128.0)
        } else {
            let i = rng.gen_range(0..VARS.len());
            Expr::var(i, VARS[i])
        };
    }
    match rng.gen_range(0..8) {
        0 => Expr::Neg(Box::new(random_ast(rng, depth - 1))),
        1 | 2 => {
            let op =
                [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div, BinOp::Pow][rng.gen_range(0..5)];
            Expr::binary(op, random_ast(rng, depth - 1), random_ast(rng, depth - 1))
        }
        3 => {
            let func = [Func::Abs, Func::Exp, Func::Log, Func::Sqrt][rng.gen_range(0..4)];
            Expr::Call {
                func,
                args: vec![random_ast(rng, depth - 1)],
            }
        }
        4 => {
            let func = [Func::Min, Func::Max][rng.gen_range(0..2)];
            Expr::Call {
                func,
                args: vec![random_ast(rng, depth - 1), random_ast(rng, depth - 1)],
            }
        }
        _ => {
            let op = [
                CmpOp::Lt,
                CmpOp::Le,
                CmpOp::Gt,
                CmpOp::Ge,
                CmpOp::Eq,
                CmpOp::Ne,
            ][rng.gen_range(0..6)];
            Expr::if_then_else(
                Cond {
                    lhs: random_ast(rng, depth - 1),
                    op,
                    rhs: random_ast(rng, depth - 1),
                },
                random_ast(rng, depth - 1),
                random_ast(rng, depth - 1),
            )
        }
    }
}

#[test]
fn criterion_7_parser_contract() {
    // precedence pins
    assert_eq!(expr::parse("2+3*4", &[]).unwrap().eval(&[]).unwrap(), 14.0);
    assert_eq!(expr::parse("2^3^2", &[]).unwrap().eval(&[]).unwrap(), 512.0);

    // the golden expressions evaluate to their hand-computed values
    let zeta = expr::parse("s - ((t+2)/(t+1))*t", &["t", "s"]).unwrap();
    let v = zeta.eval(&[("t", 0.25), ("s", 0.5)]).unwrap();
    assert!((v - 0.05).abs() < 1e-15, "{}", v);
    let map = expr::parse("if(x <= 0.5, x/2, 0)", &["x"]).unwrap();
    assert_eq!(map.eval(&[("x", 0.7)]).unwrap(), 0.0);
    assert_eq!(map.eval(&[("x", 0.5)]).unwrap(), 0.25);
    let metric = expr::parse("if(x = y, 0, max(x, y))", &["x", "y"]).unwrap();
    assert_eq!(metric.eval(&[("x", 0.3), ("y", 0.7)]).unwrap(), 0.7);

    // malformed input yields a positioned syntax error
    match expr::parse("s - ", &["s"]).unwrap_err() {
        ParseError::Syntax { position, .. } => assert_eq!(position, 4),
        other => panic!("unexpected {:?}", other),
    }

    // 100 seeded ASTs round-trip structurally through print + reparse
    let mut rng = ChaCha8Rng::seed_from_u64(7_031);
    for k in 0..100 {
        let ast = random_ast(&mut rng, 5);
        let printed = ast.to_string();
        let reparsed = expr::parse(&printed, &["x", "y", "t", "s"])
            .unwrap_or_else(|e| panic!("ast {}: '{}' does not reparse: {}", k, printed, e));
        assert_eq!(ast, reparsed, "ast {}: '{}'", k, printed);
    }
    println!("criterion 7 (parser contract + 100 seeded round trips): PASS");
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut entries: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    entries.sort();
    entries
}

#[test]
fn criterion_8_determinism() {
    // criterion 1 outputs: the golden binary run, twice, with trace files
    let dirs = (0..2)
        .map(|_| tempfile::tempdir().unwrap())
        .collect::<Vec<_>>();
    let runs: Vec<Output> = dirs
        .iter()
        .map(|d| {
            let stem = d.path().join("trace");
            zetafix_bin(&["reproduce-example2", "--out", stem.to_str().unwrap()])
        })
        .collect();
    assert_eq!(runs[0].status.code(), Some(0));
    assert_eq!(
        runs[0].stdout, runs[1].stdout,
        "golden stdout differs between runs"
    );
    let files: Vec<_> = dirs.iter().map(|d| read_dir_sorted(d.path())).collect();
    assert_eq!(files[0].len(), 6); // five traces + summary
    assert_eq!(files[0], files[1], "golden trace files differ between runs");

    // criterion 2 outputs: axiom reports serialize identically
    let render = || {
        axiom_suite()
            .iter()
            .map(|z| {
                check_axioms(z, &default_grid(), &default_families())
                    .unwrap()
                    .to_json()
            })
            .collect::<Vec<_>>()
    };
    assert_eq!(render(), render(), "axiom reports differ between runs");

    // criterion 3 outputs: the failing reports serialize identically
    let negative = || {
        let z = make_custom(expr::parse("s - t", &["t", "s"]).unwrap());
        check_axioms(&z, &default_grid(), &default_families())
            .unwrap()
            .to_json()
    };
    assert_eq!(negative(), negative());

    // criterion 4 outputs: certified-instance verdicts are reproducible
    let verdicts = || {
        certified_instances()
            .iter()
            .map(|(inst, zi)| format!("{:?}:{}", inst.style, zi))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(verdicts(), verdicts());
    println!("criterion 8 (byte-identical reruns of criteria 1-4): PASS");
}
