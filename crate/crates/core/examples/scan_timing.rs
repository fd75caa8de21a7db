//! Timing probe for the verification scans on a dense grid.
//!
//! The triangle axiom scan is O(n^3) and dominates; on a 1001-point grid it
//! covers just over 10^9 ordered triples. Run with `--release` to see the
//! production numbers.

use std::time::Instant;
use zetafix::contraction::{check_distance_preservation, verify_z, ContractionInstance};
use zetafix::metric::{check_closure, verify_metric, Domain, DomainSpec, MappingSpec, MetricSpec};
use zetafix::simfun::{make_ratio, InnerFn2};

fn main() {
    let domain = Domain::build(&DomainSpec::IntervalGrid {
        lo: 0.0,
        hi: 1.0,
        resolution: 1000,
    })
    .unwrap();
    let metric = MetricSpec::parse("max-or-zero", "if(x = y, 0, max(x, y))").unwrap();
    let map = MappingSpec::parse("halve-below-half", "if(x <= 0.5, x / 2, 0)").unwrap();
    let zeta = make_ratio(
        InnerFn2::resolve("t + 2").unwrap(),
        InnerFn2::resolve("t + 1").unwrap(),
    )
    .unwrap();

    let t0 = Instant::now();
    let metric_report = verify_metric(&metric, &domain).unwrap();
    println!(
        "verify_metric:  {:>12?}  passed={}",
        t0.elapsed(),
        metric_report.passed()
    );

    let t0 = Instant::now();
    let closure_report = check_closure(&map, &domain);
    println!(
        "check_closure:  {:>12?}  passed={}",
        t0.elapsed(),
        closure_report.passed()
    );

    let t0 = Instant::now();
    let preservation_report = check_distance_preservation(&domain, &metric, &map).unwrap();
    println!(
        "check_distance_preservation:  {:>12?}  passed={}",
        t0.elapsed(),
        preservation_report.passed()
    );

    let instance = ContractionInstance {
        domain,
        metric,
        map,
        zeta,
    };
    let t0 = Instant::now();
    let z_report = verify_z(&instance).unwrap();
    println!(
        "verify_z:       {:>12?}  passed={} ({} pairs)",
        t0.elapsed(),
        z_report.passed(),
        z_report.checks[0].checked
    );
}
