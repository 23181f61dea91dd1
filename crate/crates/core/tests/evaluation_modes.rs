mod common;

use common::{problems, random_point, reference};
use grunsky_cert::Interval;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const POINTS: usize = 10_000;

#[test]
fn point_value_matches_reference_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for p in problems() {
        let f = reference(&p.id);
        for _ in 0..POINTS {
            let q = random_point(&p, &mut rng);
            let v = p.objective.eval_point(&q).unwrap();
            assert!(
                (v - f(&q)).abs() <= 1e-13,
                "{} at {q:?}: {v} vs {}",
                p.id,
                f(&q)
            );
        }
    }
}

#[test]
fn degenerate_box_encloses_point_value() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for p in problems() {
        for _ in 0..POINTS {
            let q = random_point(&p, &mut rng);
            let b: Vec<Interval> = q.iter().map(|&c| Interval::point(c)).collect();
            let e = p.objective.eval_interval(&b).unwrap();
            let v = p.objective.eval_point(&q).unwrap();
            assert!(e.contains(v), "{} at {q:?}: {v} not in {e}", p.id);
            assert!(e.width() <= 1e-13, "{} width {}", p.id, e.width());
        }
    }
}

#[test]
fn small_box_encloses_reference_values() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for p in problems() {
        let f = reference(&p.id);
        for _ in 0..1_000 {
            let c = random_point(&p, &mut rng);
            let b: Vec<Interval> = c
                .iter()
                .zip(&p.domain.bounds)
                .map(|(&m, d)| {
                    Interval::new((m - 1e-3).max(d.lo()), (m + 1e-3).min(d.hi())).unwrap()
                })
                .collect();
            let Ok(e) = p.objective.eval_interval(&b) else {
                continue;
            };
            for _ in 0..8 {
                let q: Vec<f64> = b.iter().map(|i| rng.gen_range(i.lo()..=i.hi())).collect();
                if p.domain.contains_point(&q, 0.0) {
                    assert!(e.contains(f(&q)), "{} at {q:?}", p.id);
                }
            }
        }
    }
}

#[test]
fn derivatives_match_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let h = 1e-6;
    for p in problems() {
        let f = reference(&p.id);
        let mut checked = 0;
        while checked < 1_000 {
            let q = random_point(&p, &mut rng);
            // keep the stencil inside the domain and away from the radical's zero set
            let inner = (0..p.arity).all(|i| {
                let b = p.domain.bounds[i];
                q[i] - 10.0 * h > b.lo() && q[i] + 10.0 * h < b.hi()
            });
            let stencil_ok = (0..p.arity).all(|i| {
                let mut a = q.clone();
                let mut b = q.clone();
                a[i] -= 10.0 * h;
                b[i] += 10.0 * h;
                p.domain.contains_point(&a, -1e-4) && p.domain.contains_point(&b, -1e-4)
            });
            if !inner || !stencil_ok || !clear_of_radical_zero(&p.id, &q) {
                continue;
            }
            for i in 0..p.arity {
                let (mut a, mut b) = (q.clone(), q.clone());
                a[i] -= h;
                b[i] += h;
                let fd = (f(&b) - f(&a)) / (2.0 * h);
                let d = p.objective.eval_derivative(&q, i).unwrap();
                let rel = (d - fd).abs() / d.abs().max(1.0);
                assert!(rel <= 1e-5, "{} d/dx{i} at {q:?}: {d} vs {fd}", p.id);
            }
            checked += 1;
        }
    }
}

#[test]
fn gradient_box_encloses_point_derivatives() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for p in problems() {
        for _ in 0..1_000 {
            let q = random_point(&p, &mut rng);
            if !clear_of_radical_zero(&p.id, &q) {
                continue;
            }
            let b: Vec<Interval> = q.iter().map(|&c| Interval::point(c)).collect();
            let g = p.objective.gradient_interval(&b).unwrap();
            for (i, gi) in g.iter().enumerate() {
                let d = p.objective.eval_derivative(&q, i).unwrap();
                assert!(gi.contains(d), "{} d/dx{i} at {q:?}: {d} not in {gi}", p.id);
            }
        }
    }
}

/// Radicands stay above 1e-3 so the square root's derivative is tame.
fn clear_of_radical_zero(id: &str, q: &[f64]) -> bool {
    let r = match id {
        "f2" | "f3" | "f4" | "f5" => 1.0 - q[0] * q[0] - 6.75 * q[0].powi(4),
        "f1" | "a5_a2zero" | "a5_minus_a3_odd" | "f6_edge_0" => 1.0 - 3.0 * q[0] * q[0],
        "f6" => 1.0 - q[0] * q[0] - 3.0 * q[1] * q[1],
        "f6_edge_y0" | "f6_edge_curve" => 1.0 - q[0] * q[0],
        _ => 1.0,
    };
    r > 1e-3
}
