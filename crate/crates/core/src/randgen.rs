//! Seeded generation of random finite metric spaces and self-maps.
//!
//! Instances feed the randomized property suites: points are the integers
//! `0..n`, distances come from a random symmetric table repaired with
//! Floyd–Warshall shortest paths so the triangle inequality holds, and
//! self-maps send members to members. Both the metric and the map are
//! materialized as nested `if` expression chains over exact point equality,
//! so every instance exercises the expression evaluator end to end.
//!
//! Table entries are dyadic rationals (multiples of 1/1024 in `[0.1, 1]`),
//! which keeps every Floyd–Warshall sum and every triangle comparison exact
//! in double precision — repaired tables satisfy the axioms bitwise, not
//! just up to rounding.

use crate::expr::{CmpOp, Cond, Expr};
use crate::metric::{Domain, DomainSpec, MappingSpec, MetricSpec};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// How the random self-map picks its targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapStyle {
    /// Every point maps to one anchor: always a Z-contraction.
    Constant,
    /// Each point moves at least halfway toward an anchor (in table
    /// distance): frequently a Z-contraction.
    TowardAnchor,
    /// Targets sorted ascending: a random monotone map.
    Monotone,
    /// Unrestricted random targets: rarely a Z-contraction.
    Uniform,
}

impl MapStyle {
    pub fn name(self) -> &'static str {
        match self {
            MapStyle::Constant => "constant",
            MapStyle::TowardAnchor => "toward_anchor",
            MapStyle::Monotone => "monotone",
            MapStyle::Uniform => "uniform",
        }
    }
}

/// A generated finite metric space with a self-map.
#[derive(Debug, Clone)]
pub struct RandomInstance {
    pub domain: Domain,
    pub metric: MetricSpec,
    pub map: MappingSpec,
    pub style: MapStyle,
    /// The repaired distance table backing `metric`.
    pub table: Vec<Vec<f64>>,
    /// Target index per point index, backing `map`.
    pub targets: Vec<usize>,
}

/// Random symmetric distance table on `n` points, repaired to satisfy the
/// triangle inequality exactly.
#[allow(clippy::needless_range_loop)] // symmetric fill reads better indexed
pub fn random_table(rng: &mut impl Rng, n: usize) -> Vec<Vec<f64>> {
    let mut table = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let numerator: u32 = rng.gen_range(103..=1024);
            let d = numerator as f64 / 1024.0;
            table[i][j] = d;
            table[j][i] = d;
        }
    }
    // Floyd–Warshall: all sums are exact multiples of 1/1024.
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = table[i][k] + table[k][j];
                if via < table[i][j] {
                    table[i][j] = via;
                }
            }
        }
    }
    table
}

fn point_eq(var: Expr, p: f64) -> Cond {
    Cond {
        lhs: var,
        op: CmpOp::Eq,
        rhs: Expr::Num(p),
    }
}

/// Nested-if lookup of `table[i][j]` keyed on exact point equality.
fn table_metric_expr(points: &[f64], table: &[Vec<f64>]) -> Expr {
    let row = |i: usize| -> Expr {
        let mut expr = Expr::Num(table[i][points.len() - 1]);
        for j in (0..points.len() - 1).rev() {
            expr = Expr::if_then_else(
                point_eq(Expr::var(1, "y"), points[j]),
                Expr::Num(table[i][j]),
                expr,
            );
        }
        expr
    };
    let mut expr = row(points.len() - 1);
    for i in (0..points.len() - 1).rev() {
        expr = Expr::if_then_else(point_eq(Expr::var(0, "x"), points[i]), row(i), expr);
    }
    expr
}

/// Nested-if lookup of the target point keyed on exact point equality.
fn table_map_expr(points: &[f64], targets: &[usize]) -> Expr {
    let mut expr = Expr::Num(points[targets[points.len() - 1]]);
    for i in (0..points.len() - 1).rev() {
        expr = Expr::if_then_else(
            point_eq(Expr::var(0, "x"), points[i]),
            Expr::Num(points[targets[i]]),
            expr,
        );
    }
    expr
}

fn random_targets(rng: &mut impl Rng, table: &[Vec<f64>], style: MapStyle) -> Vec<usize> {
    let n = table.len();
    match style {
        MapStyle::Constant => {
            let anchor = rng.gen_range(0..n);
            vec![anchor; n]
        }
        MapStyle::TowardAnchor => {
            let anchor = rng.gen_range(0..n);
            (0..n)
                .map(|i| {
                    if i == anchor {
                        return anchor;
                    }
                    let reach = table[i][anchor] / 2.0;
                    let candidates: Vec<usize> =
                        (0..n).filter(|&j| table[j][anchor] <= reach).collect();
                    *candidates.choose(rng).unwrap_or(&anchor)
                })
                .collect()
        }
        MapStyle::Monotone => {
            let mut targets: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
            targets.sort_unstable();
            targets
        }
        MapStyle::Uniform => (0..n).map(|_| rng.gen_range(0..n)).collect(),
    }
}

/// One random instance with 2 to `max_points` points.
pub fn random_instance(rng: &mut impl Rng, max_points: usize, style: MapStyle) -> RandomInstance {
    let n = rng.gen_range(2..=max_points.max(2));
    let points: Vec<f64> = (0..n).map(|i| i as f64).collect();
    let table = random_table(rng, n);
    let targets = random_targets(rng, &table, style);
    let domain = Domain::build(&DomainSpec::FiniteSet {
        points: points.clone(),
    })
    .expect("generated points are distinct");
    let metric = MetricSpec::from_expr("random-table", table_metric_expr(&points, &table));
    let map = MappingSpec::from_expr(
        &format!("random-{}", style.name()),
        table_map_expr(&points, &targets),
    );
    RandomInstance {
        domain,
        metric,
        map,
        style,
        table,
        targets,
    }
}

/// A deterministic batch of instances cycling through the map styles.
pub fn random_instances(seed: u64, count: usize, max_points: usize) -> Vec<RandomInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let styles = [
        MapStyle::Constant,
        MapStyle::TowardAnchor,
        MapStyle::Monotone,
        MapStyle::Uniform,
    ];
    (0..count)
        .map(|k| random_instance(&mut rng, max_points, styles[k % styles.len()]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{check_closure, verify_metric};

    #[test]
    fn repaired_tables_pass_the_metric_axioms() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..25 {
            let inst = random_instance(&mut rng, 8, MapStyle::Uniform);
            let report = verify_metric(&inst.metric, &inst.domain).unwrap();
            assert!(report.passed(), "{}", report);
        }
    }

    #[test]
    fn generated_maps_are_closed() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for style in [
            MapStyle::Constant,
            MapStyle::TowardAnchor,
            MapStyle::Monotone,
            MapStyle::Uniform,
        ] {
            for _ in 0..10 {
                let inst = random_instance(&mut rng, 8, style);
                assert!(
                    check_closure(&inst.map, &inst.domain).passed(),
                    "{:?}",
                    style
                );
            }
        }
    }

    #[test]
    fn metric_expression_matches_the_table() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let inst = random_instance(&mut rng, 6, MapStyle::Uniform);
        let pts = inst.domain.points().to_vec();
        for (i, &x) in pts.iter().enumerate() {
            for (j, &y) in pts.iter().enumerate() {
                assert_eq!(inst.metric.dist(x, y).unwrap(), inst.table[i][j]);
            }
        }
    }

    #[test]
    fn map_expression_matches_the_targets() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let inst = random_instance(&mut rng, 7, MapStyle::Monotone);
        let pts = inst.domain.points().to_vec();
        for (i, &x) in pts.iter().enumerate() {
            assert_eq!(inst.map.image(x).unwrap(), pts[inst.targets[i]]);
        }
        // monotone targets are nondecreasing
        assert!(inst.targets.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn batches_are_deterministic_per_seed() {
        let a = random_instances(42, 12, 8);
        let b = random_instances(42, 12, 8);
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.table, y.table);
            assert_eq!(x.targets, y.targets);
        }
        let c = random_instances(43, 12, 8);
        assert!(a
            .iter()
            .zip(&c)
            .any(|(x, y)| x.table != y.table || x.targets != y.targets));
    }
}
