//! Acceptance run: one `PASS`/`FAIL` line per criterion, preceded by its individual checks.
//!
//! Runs without the libtest harness so every line is printed on every run. The process
//! exits with status 1 when any criterion fails.

use std::time::{Duration, Instant};

use lattice_theta::competing_functionals::{minimizer, solve_y_branch, thresholds, FunctionalKind};
use lattice_theta::modular_domain::Branch;
use lattice_theta::mueller_ho::{hessian_universal, j_jet, Displacement, UniversalPoint};
use lattice_theta::report::{all_pass, Check};
use lattice_theta::verifier::{
    appendix_margins, envelope_checks, identity_checks, oracle_checks, scan_checks, threshold_checks,
    weighted_checks,
};
use lattice_theta::{HalfPlanePoint, SeriesTruncation};
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

const ITEM_BUDGET: Duration = Duration::from_secs(60);
const ORACLE_BUDGET: Duration = Duration::from_secs(300);
const ORACLE_GRID: usize = 400;
const SCAN_GRID: usize = 200;
const TRAJECTORY_POINTS: usize = 400;

struct Criterion {
    id: u32,
    title: &'static str,
    checks: Vec<Check>,
    elapsed: Duration,
    budget: Duration,
}

impl Criterion {
    fn run(id: u32, title: &'static str, budget: Duration, body: impl FnOnce() -> Vec<Check>) -> Self {
        let start = Instant::now();
        let checks = body();
        Criterion { id, title, checks, elapsed: start.elapsed(), budget }
    }

    fn pass(&self) -> bool {
        !self.checks.is_empty() && all_pass(&self.checks) && self.elapsed <= self.budget
    }

    fn report(&self) {
        for c in &self.checks {
            println!("    {c}");
        }
        let failing: Vec<&str> = self.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
        let mut note = format!("{:.2}s of {}s", self.elapsed.as_secs_f64(), self.budget.as_secs());
        if !failing.is_empty() {
            note.push_str(&format!("; failing: {}", failing.join(", ")));
        }
        println!("{} criterion {}: {} ({note})", if self.pass() { "PASS" } else { "FAIL" }, self.id, self.title);
    }
}

fn trunc() -> SeriesTruncation {
    SeriesTruncation::default()
}

fn pick(all: &[Check], names: &[&str]) -> Vec<Check> {
    names
        .iter()
        .map(|n| {
            all.iter()
                .find(|c| c.name == *n)
                .cloned()
                .unwrap_or_else(|| Check::holds(format!("{n}_missing"), false, f64::NAN))
        })
        .collect()
}

fn threshold_rows(names: &[&str]) -> Vec<Check> {
    pick(&or_error(threshold_checks(trunc()), "thresholds"), names)
}

fn or_error(r: lattice_theta::Result<Vec<Check>>, name: &str) -> Vec<Check> {
    r.unwrap_or_else(|e| {
        println!("    {name} aborted: {e}");
        vec![Check::holds(format!("{name}_aborted"), false, f64::NAN)]
    })
}

fn critical_point_checks() -> Vec<Check> {
    let t = trunc();
    let mut rng = StdRng::seed_from_u64(0x5eed_2024);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let z = HalfPlanePoint::new(rng.random_range(-0.5..0.5), rng.random_range(0.5..2.5)).unwrap();
        for d in Displacement::universal() {
            worst = worst.max(j_jet(z, d, t).unwrap().gradient_norm());
        }
    }
    let mut out = vec![Check::holds("universal_points_critical_for_20_random_z", worst <= 1e-10, worst)];

    let hex = j_jet(HalfPlanePoint::hexagonal(), Displacement::THIRDS, t).unwrap();
    out.push(Check::holds("thirds_critical_at_hexagonal", hex.gradient_norm() <= 1e-10, hex.gradient_norm()));
    let sq = j_jet(HalfPlanePoint::I, Displacement::THIRDS, t).unwrap();
    out.push(Check::holds("thirds_not_critical_at_i_with_negative_da", sq.da < 0.0 && sq.gradient_norm() > 1e-6, sq.da));

    for &y in &[0.8, 1.0, 1.6] {
        let z = HalfPlanePoint::on_axis(y).unwrap();
        for (w, d, saddle) in [
            (UniversalPoint::W1, Displacement::W1, true),
            (UniversalPoint::W2, Displacement::W2, true),
            (UniversalPoint::W3, Displacement::W3, false),
        ] {
            let closed = hessian_universal(y, w, t).unwrap();
            let det = j_jet(z, d, t).unwrap().hessian_det();
            let sign_ok = if saddle { closed < 0.0 && det < 0.0 } else { closed > 0.0 && det > 0.0 };
            let agree = ((closed - det) / det).abs() <= 1e-9;
            out.push(Check::holds(format!("hessian_sign_{w:?}_at_y_{y}"), sign_ok && agree, det));
        }
    }
    out
}

fn strictly_decreasing_branch(kind: FunctionalKind, window: f64, name: &str) -> Check {
    let ys: Vec<f64> = (0..TRAJECTORY_POINTS)
        .map(|i| solve_y_branch(kind, window * i as f64 / TRAJECTORY_POINTS as f64).unwrap())
        .collect();
    let min_drop = ys.windows(2).map(|w| w[0] - w[1]).fold(f64::INFINITY, f64::min);
    Check::holds(name, min_drop > 0.0, min_drop)
}

fn trajectory_checks() -> Vec<Check> {
    let th = thresholds();
    let (lo, hi) = (0.0, 2.0);
    let step = (hi - lo) / (TRAJECTORY_POINTS - 1) as f64;
    let pts: Vec<_> = (0..TRAJECTORY_POINTS)
        .map(|i| minimizer(FunctionalKind::W1, lo + step * i as f64).unwrap())
        .collect();
    let mut seq: Vec<Branch> = pts.iter().map(|p| p.branch).collect();
    seq.dedup();
    let order_ok = seq == [Branch::Segment, Branch::Corner, Branch::Arc];
    let mut out = vec![Check::holds("w1_branch_sequence_segment_corner_arc", order_ok, seq.len() as f64)];
    let first = |b: Branch| pts.iter().find(|p| p.branch == b).map_or(f64::NAN, |p| p.rho);
    let to_corner = first(Branch::Corner);
    let to_arc = first(Branch::Arc);
    out.push(Check::holds("segment_to_corner_within_one_step_of_rho1", (to_corner - th.rho1).abs() <= step, to_corner));
    out.push(Check::holds("corner_to_arc_within_one_step_of_inverse_rho2", (to_arc - th.sigma1b).abs() <= step, to_arc));
    out.push(strictly_decreasing_branch(FunctionalKind::W1, th.rho1, "y1_strictly_decreasing_on_window"));
    out.push(strictly_decreasing_branch(FunctionalKind::W2, th.rho2, "y2_strictly_decreasing_on_window"));
    out
}

fn main() {
    let t = trunc();
    println!("acceptance run (binary64, {} worker threads available)", available_threads());

    let criteria = vec![
        Criterion::run(1, "threshold reproduction", ITEM_BUDGET, || {
            threshold_rows(&["rho1", "rho2", "sigma2b", "sigma1b_times_rho2"])
        }),
        Criterion::run(2, "Mueller-Ho thresholds", ITEM_BUDGET, || {
            threshold_rows(&["alpha1", "alpha2", "alpha0", "theta_alpha0", "alpha0_rough_bound"])
        }),
        Criterion::run(3, "energy spot values", ITEM_BUDGET, || {
            threshold_rows(&["theta_1_square", "theta_1_hexagonal"])
        }),
        Criterion::run(4, "appendix constants", ITEM_BUDGET, || {
            let rows = or_error(appendix_margins(t), "appendix");
            rows.into_iter().filter(|c| c.name != "vv3_pair_first_printed_polynomial").collect()
        }),
        Criterion::run(5, "oracle equivalence on a 400x400 grid", ORACLE_BUDGET, || {
            or_error(oracle_checks(ORACLE_GRID, t), "oracle")
        }),
        Criterion::run(6, "property suites", ITEM_BUDGET, || {
            let mut v = or_error(identity_checks(t), "identities");
            v.extend(or_error(scan_checks(SCAN_GRID, t), "scans"));
            v
        }),
        Criterion::run(7, "critical-point facts", ITEM_BUDGET, critical_point_checks),
        Criterion::run(8, "trajectory qualitative shape", ITEM_BUDGET, trajectory_checks),
    ];

    println!();
    for c in &criteria {
        c.report();
    }

    // checks behind the appendix margins that no numbered criterion covers
    println!();
    println!("supplementary appendix checks (reported, not scored):");
    let start = Instant::now();
    let mut extra = or_error(appendix_margins(t), "appendix");
    extra.retain(|c| c.name == "vv3_pair_first_printed_polynomial");
    extra.extend(or_error(weighted_checks(t), "weighted"));
    extra.extend(or_error(envelope_checks(2000), "envelopes"));
    for c in &extra {
        println!("    {c}");
    }
    println!("    ({:.2}s)", start.elapsed().as_secs_f64());

    println!();
    let passed = criteria.iter().filter(|c| c.pass()).count();
    println!("summary: {passed}/{} criteria pass", criteria.len());
    for c in &criteria {
        println!("{} {}", if c.pass() { "PASS" } else { "FAIL" }, c.id);
    }
    if passed != criteria.len() {
        std::process::exit(1);
    }
}

fn available_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}
