#![allow(dead_code)]

use grunsky_cert::catalog::{self, BoundProblem};
use rand::Rng;

/// `1 − x² − (27/4)x⁴`, clamped at zero.
fn r3(x: f64) -> f64 {
    (1.0 - x * x - 6.75 * x.powi(4)).max(0.0)
}

fn r13(y: f64) -> f64 {
    (1.0 - 3.0 * y * y).max(0.0)
}

/// Plain f64 formulas for every problem, written out independently of the
/// expression trees.
pub fn reference(id: &str) -> fn(&[f64]) -> f64 {
    match id {
        "f1" => |p| {
            let y = p[0];
            2.0 * y.powi(3) + 0.8 * (1.0 - 3.0 * y * y) + 4.0 / 7f64.sqrt() * y * r13(y).sqrt()
        },
        "a5_a2zero" => |p| 2.0 / 7f64.sqrt() * r13(p[0]).sqrt() + 3.0 * p[0] * p[0],
        "f2" => |p| 2.0 / 5f64.sqrt() * r3(p[0]).sqrt() + 5.0 * p[0].powi(3),
        "f3" => |p| {
            let x = p[0];
            (2.0 / 7f64.sqrt() + 6.0 / 5f64.sqrt() * x) * r3(x).sqrt() + 6.25 * x.powi(4)
        },
        "f4" => |p| 4.0 / 5f64.sqrt() * p[0] * r3(p[0]).sqrt() + 10.0 * p[0].powi(4),
        "f5" => |p| {
            let x = p[0];
            0.2 * r3(x) + (4.0 / 5f64.sqrt() * x.powi(3) + 8.0 / 7f64.sqrt() * x * x) * r3(x).sqrt()
        },
        "f6" => |p| {
            let (x, y) = (p[0], p[1]);
            2.0 / 5f64.sqrt() * (1.0 - x * x - 3.0 * y * y).max(0.0).sqrt()
                + 4.0 * x * y
                + x.powi(3)
        },
        "a5_minus_a3_odd" => |p| 2.0 / 7f64.sqrt() * r13(p[0]).sqrt() + p[0] * p[0],
        "f6_edge_0" => |p| 2.0 / 5f64.sqrt() * r13(p[0]).sqrt(),
        "f6_edge_y0" => |p| 2.0 / 5f64.sqrt() * (1.0 - p[0] * p[0]).max(0.0).sqrt() + p[0].powi(3),
        "f6_edge_curve" => |p| {
            let x = p[0];
            4.0 / 3f64.sqrt() * x * (1.0 - x * x).max(0.0).sqrt() + x.powi(3)
        },
        other => panic!("no reference formula for {other}"),
    }
}

/// Uniform point of the (constrained) domain, by rejection.
pub fn random_point<R: Rng>(p: &BoundProblem, rng: &mut R) -> Vec<f64> {
    loop {
        let q: Vec<f64> = p
            .domain
            .bounds
            .iter()
            .map(|b| rng.gen_range(b.lo()..=b.hi()))
            .collect();
        if p.domain.contains_point(&q, 0.0) {
            return q;
        }
    }
}

pub fn problems() -> Vec<BoundProblem> {
    catalog::all_problems()
}
