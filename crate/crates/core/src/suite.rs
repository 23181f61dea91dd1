//! Batch runs behind the command line tool: verifying every bound, the
//! algebraic identity suite, and grid sampling for plots.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::catalog::{self, BoundProblem, CLOSED_FORM_TOLERANCE};
use crate::error::{Error, Result};
use crate::expr::RADICAND_EPS;
use crate::grunsky::{self, GrunskyWindow, Scenario};
use crate::optimizer::{maximize, stationary_residual_f6, verify_bound, OptimizerConfig};
use crate::report::{
    fmt_f64, CrossCheck, IdentityReport, IdentityRow, VerificationReport, VerifyAllReport,
};

/// Enclosure width used by [`verify_all`], tight enough that closed-form
/// endpoint values are pinned by the enclosure itself.
pub const VERIFY_ALL_TOLERANCE: f64 = 1e-12;

pub const IDENTITY_THRESHOLD: f64 = 1e-12;
pub const CLOSURE_THRESHOLD: f64 = 1e-14;
pub const ROUND_TRIP_THRESHOLD: f64 = 1e-14;
pub const STATIONARY_THRESHOLD: f64 = 1e-6;
const ROUND_TRIP_SAMPLES: u64 = 1000;

/// Verifies all eight bounds and the three f6 edges, then cross-checks the
/// f2/f4 coincidence and that every edge maximum stays below the interior
/// maximum of f6.
pub fn verify_all(workers: usize) -> Result<VerifyAllReport> {
    let cfg = OptimizerConfig {
        tolerance: VERIFY_ALL_TOLERANCE,
        workers,
        ..Default::default()
    };
    let mut bounds = Vec::new();
    for p in catalog::all_problems() {
        let mut r = verify_bound(&p, &cfg)?;
        r.wall_time = None;
        bounds.push(r);
    }
    let find = |id: &str| {
        bounds
            .iter()
            .find(|r| r.bound_id == id)
            .expect("catalog id")
    };
    let mut cross_checks = Vec::new();

    let (f2, f4) = (find("f2"), find("f4"));
    let closed = catalog::f2_closed_form();
    let agree = (f2.max_hi - f4.max_hi).abs() <= CLOSED_FORM_TOLERANCE
        && (f2.max_lo - f4.max_lo).abs() <= CLOSED_FORM_TOLERANCE;
    let on_closed = [f2, f4].iter().all(|r| {
        (r.max_hi - closed).abs() <= CLOSED_FORM_TOLERANCE
            && (r.max_lo - closed).abs() <= CLOSED_FORM_TOLERANCE
    });
    cross_checks.push(CrossCheck {
        name: "f2_f4_coincidence".into(),
        detail: format!(
            "f2.max_hi={} f4.max_hi={} (1/4)sqrt(21/5)+5/8={}",
            fmt_f64(f2.max_hi),
            fmt_f64(f4.max_hi),
            fmt_f64(closed)
        ),
        pass: agree && on_closed,
    });

    let f6 = find("f6");
    for edge in catalog::f6_edge_curves() {
        let e = find(&edge.id);
        cross_checks.push(CrossCheck {
            name: format!("{}_below_f6", edge.id),
            detail: format!(
                "{}.max_hi={} < f6.max_lo={}",
                edge.id,
                fmt_f64(e.max_hi),
                fmt_f64(f6.max_lo)
            ),
            pass: e.max_hi < f6.max_lo,
        });
    }

    let labels = [
        ("a5_a2zero", "3/4+1/sqrt(7)"),
        ("f2", "(1/4)sqrt(21/5)+5/8"),
        ("f4", "(1/4)sqrt(21/5)+5/8"),
        ("a5_minus_a3_odd", "2/sqrt(7)"),
        ("f6_edge_0", "2/sqrt(5)"),
    ];
    for (id, label) in labels {
        let r = find(id);
        let c = r.closed_form.expect("closed form entry");
        cross_checks.push(CrossCheck {
            name: format!("closed_form_{id}"),
            detail: format!(
                "{label}={} max_lo={} max_hi={}",
                fmt_f64(c),
                fmt_f64(r.max_lo),
                fmt_f64(r.max_hi)
            ),
            pass: (r.max_lo - c).abs() <= CLOSED_FORM_TOLERANCE
                && (r.max_hi - c).abs() <= CLOSED_FORM_TOLERANCE,
        });
    }

    Ok(VerifyAllReport {
        tolerance: VERIFY_ALL_TOLERANCE,
        bounds,
        cross_checks,
    })
}

/// Single bound by id, including the f6 edges.
pub fn verify_by_id(id: &str, cfg: &OptimizerConfig) -> Result<VerificationReport> {
    verify_bound(&catalog::lookup(id)?, cfg)
}

fn max_over<F>(s: Scenario, n: u64, rng: &mut ChaCha8Rng, mut f: F) -> f64
where
    F: FnMut(&GrunskyWindow) -> f64,
{
    (0..n)
        .map(|_| f(&grunsky::random_scenario_window(s, rng)))
        .fold(0.0, f64::max)
}

fn window_distance(a: &GrunskyWindow, b: &GrunskyWindow) -> f64 {
    a.as_array()
        .iter()
        .zip(b.as_array())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn row(name: &str, samples: u64, max_residual: f64, threshold: f64) -> IdentityRow {
    IdentityRow {
        name: name.to_string(),
        samples,
        max_residual,
        threshold,
        pass: max_residual <= threshold,
    }
}

/// Checks every reduced form against the general coefficient map, the
/// closure of completed windows under both equality relations, the
/// coefficient round trip, the Koebe window, and the f6 stationarity relation
/// at the certified maximizer.
pub fn run_identities(n: u64, seed: u64) -> Result<IdentityReport> {
    if n == 0 {
        return Err(Error::Precondition(
            "identity sample count must be at least 1",
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();

    let r = max_over(Scenario::A3Zero, n, &mut rng, |w| {
        let a = grunsky::coefficients_from_grunsky(w);
        (grunsky::h3_a3zero_reduced(w) - grunsky::hankel_h3(&a)).norm()
    });
    rows.push(row(
        "h3_reduced_vs_general (a3_zero)",
        n,
        r,
        IDENTITY_THRESHOLD,
    ));

    let r = max_over(Scenario::A3Zero, n, &mut rng, |w| {
        let a = grunsky::coefficients_from_grunsky(w);
        (grunsky::a4_a3zero_reduced(w) - a.a4)
            .norm()
            .max((grunsky::a5_a3zero_reduced(w) - a.a5).norm())
            .max(a.a3.norm())
    });
    rows.push(row(
        "a3_a4_a5_reduced_vs_general (a3_zero)",
        n,
        r,
        IDENTITY_THRESHOLD,
    ));

    let r = max_over(Scenario::A2Zero, n, &mut rng, |w| {
        let eq11 = 2.0 * w.w35 + 5.0 * w.w13 * w.w13;
        (grunsky::a5_a2zero_reduced(w).norm() - eq11.norm()).abs()
    });
    rows.push(row(
        "a5_reduced_vs_unreduced_modulus (a2_zero)",
        n,
        r,
        IDENTITY_THRESHOLD,
    ));

    let r = max_over(Scenario::A2Zero, n, &mut rng, |w| {
        let a = grunsky::coefficients_from_grunsky(w);
        (grunsky::a5_a2zero_reduced(w) - a.a5).norm()
    });
    rows.push(row(
        "a5_reduced_vs_general (a2_zero)",
        n,
        r,
        IDENTITY_THRESHOLD,
    ));

    let r = max_over(Scenario::UnconstrainedThm6, n, &mut rng, |w| {
        let a = grunsky::coefficients_from_grunsky(w);
        (grunsky::a4_minus_w11_a3_reduced(w) - (a.a4 - w.w11 * a.a3)).norm()
    });
    rows.push(row(
        "a4_minus_w11_a3_reduced_vs_general",
        n,
        r,
        IDENTITY_THRESHOLD,
    ));

    for s in Scenario::ALL
        .into_iter()
        .filter(Scenario::closes_both_relations)
    {
        let r = max_over(s, n, &mut rng, |w| {
            let (r1, r2) = grunsky::consistency_residuals(w);
            r1.norm().max(r2.norm())
        });
        rows.push(row(
            &format!("completion_residual ({})", s.tag()),
            n,
            r,
            CLOSURE_THRESHOLD,
        ));
    }
    let r = max_over(Scenario::UnconstrainedThm6, n, &mut rng, |w| {
        grunsky::consistency_residuals(w).0.norm()
    });
    rows.push(row(
        "first_relation_residual (unconstrained_thm6)",
        n,
        r,
        CLOSURE_THRESHOLD,
    ));

    let trips = ROUND_TRIP_SAMPLES.min(n);
    let mut worst = {
        let k = GrunskyWindow::koebe();
        let back = grunsky::grunsky_from_coefficients(
            &grunsky::coefficients_from_grunsky(&k),
            k.w15,
            k.w17,
        );
        window_distance(&k, &back)
    };
    for s in Scenario::ALL
        .into_iter()
        .filter(Scenario::closes_both_relations)
    {
        worst = worst.max(max_over(s, trips, &mut rng, |w| {
            let back = grunsky::grunsky_from_coefficients(
                &grunsky::coefficients_from_grunsky(w),
                w.w15,
                w.w17,
            );
            window_distance(w, &back)
        }));
    }
    rows.push(row(
        "coefficient_round_trip",
        1 + 3 * trips,
        worst,
        ROUND_TRIP_THRESHOLD,
    ));

    let k = grunsky::coefficients_from_grunsky(&GrunskyWindow::koebe());
    let koebe = [k.a2, k.a3, k.a4, k.a5];
    let want = [2.0, 3.0, 4.0, 5.0];
    let koebe_err = koebe
        .iter()
        .zip(want)
        .map(|(a, w)| (a - Complex64::new(w, 0.0)).norm())
        .fold(0.0, f64::max);
    rows.push(row("koebe_coefficients_exact", 1, koebe_err, 0.0));
    let margins = grunsky::feasibility_margins(&GrunskyWindow::koebe());
    rows.push(row(
        "koebe_margins_zero",
        1,
        margins.iter().map(|m| m.abs()).fold(0.0, f64::max),
        0.0,
    ));

    let f6 = catalog::lookup("f6")?;
    let e = maximize(&f6, &OptimizerConfig::with_tolerance(VERIFY_ALL_TOLERANCE))?;
    let p = e.argmax();
    rows.push(row(
        "f6_stationary_residual_at_argmax",
        1,
        stationary_residual_f6(p[0], p[1]).abs(),
        STATIONARY_THRESHOLD,
    ));

    Ok(IdentityReport {
        n,
        seed,
        rows,
        koebe_coefficients: [k.a2.re, k.a3.re, k.a4.re, k.a5.re],
        koebe_margins: margins,
    })
}

/// Visits the objective value at every node of a uniform
/// `resolution`-per-axis grid over the bounding box, skipping nodes outside
/// the constrained domain. The last node on each axis is exactly the upper
/// bound. Returns the number of nodes visited.
pub fn for_each_grid_point<F>(
    problem: &BoundProblem,
    resolution: usize,
    mut visit: F,
) -> Result<u64>
where
    F: FnMut(&[f64], f64),
{
    if resolution < 2 {
        return Err(Error::Precondition("grid resolution must be at least 2"));
    }
    if problem.arity > 2 {
        return Err(Error::Precondition("grid supports arity 1 and 2"));
    }
    let axes: Vec<Vec<f64>> = problem
        .domain
        .bounds
        .iter()
        .map(|b| {
            let step = (b.hi() - b.lo()) / (resolution - 1) as f64;
            (0..resolution)
                .map(|i| {
                    if i + 1 == resolution {
                        b.hi()
                    } else {
                        b.lo() + step * i as f64
                    }
                })
                .collect()
        })
        .collect();
    let mut count = 0;
    let mut node = |p: &[f64]| {
        if problem.domain.contains_point(p, RADICAND_EPS) {
            if let Ok(v) = problem.objective.eval_point(p) {
                visit(p, v);
                count += 1;
            }
        }
    };
    match axes.as_slice() {
        [xs] => xs.iter().for_each(|&x| node(&[x])),
        [xs, ys] => xs
            .iter()
            .for_each(|&x| ys.iter().for_each(|&y| node(&[x, y]))),
        _ => unreachable!(),
    }
    Ok(count)
}

/// [`for_each_grid_point`], collected.
pub fn grid_rows(problem: &BoundProblem, resolution: usize) -> Result<Vec<(Vec<f64>, f64)>> {
    let mut rows = Vec::new();
    for_each_grid_point(problem, resolution, |p, v| rows.push((p.to_vec(), v)))?;
    Ok(rows)
}
