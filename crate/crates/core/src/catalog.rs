//! Registry of the coefficient bound problems.
//!
//! Each entry pairs a closed-form objective with its domain and the value and
//! maximizer that the published argument claims for it. The variables are the
//! Grunsky coefficient moduli `x = |ω11|` and `y = |ω13|`; one-variable
//! objectives always use variable index 0.

use std::fmt;

use crate::error::{Error, Result};
use crate::expr::{Expr, RADICAND_EPS};
use crate::interval::{Interval, IntervalBox};

/// Sub-boxes per axis used when checking radicand signs at registration.
const VALIDATION_GRID: usize = 64;

/// Tolerance used for closed-form endpoint values.
pub const CLOSED_FORM_TOLERANCE: f64 = 1e-12;

/// Moves an infeasible point back into the constrained domain.
pub type Projection = fn(&mut [f64]);

#[derive(Clone)]
pub struct DomainSpec {
    pub bounds: IntervalBox,
    /// Feasible set is `{p in bounds : constraint(p) >= 0}`.
    pub constraint: Option<Expr>,
    pub projection: Option<Projection>,
}

impl DomainSpec {
    pub fn bounded(bounds: IntervalBox) -> Self {
        DomainSpec {
            bounds,
            constraint: None,
            projection: None,
        }
    }

    pub fn interval(lo: f64, hi: f64) -> Self {
        DomainSpec::bounded(vec![Interval::new(lo, hi).expect("valid domain interval")])
    }

    pub fn arity(&self) -> usize {
        self.bounds.len()
    }

    /// Point feasibility in plain floating point, with `slack` below zero
    /// allowed on the constraint.
    pub fn contains_point(&self, p: &[f64], slack: f64) -> bool {
        if p.len() != self.bounds.len() || !self.bounds.iter().zip(p).all(|(b, &v)| b.contains(v)) {
            return false;
        }
        match &self.constraint {
            None => true,
            Some(g) => g.eval_point(p).map(|v| v >= -slack).unwrap_or(false),
        }
    }

    /// Certified feasibility: the constraint's enclosure at `p` is nonnegative.
    pub fn certainly_contains(&self, p: &[f64]) -> bool {
        if p.len() != self.bounds.len() || !self.bounds.iter().zip(p).all(|(b, &v)| b.contains(v)) {
            return false;
        }
        match &self.constraint {
            None => true,
            Some(g) => {
                let pb: Vec<Interval> = p.iter().map(|&v| Interval::point(v)).collect();
                g.eval_interval(&pb).map(|r| r.lo() >= 0.0).unwrap_or(false)
            }
        }
    }
}

impl fmt::Debug for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DomainSpec")
            .field("bounds", &self.bounds)
            .field("constraint", &self.constraint)
            .finish()
    }
}

#[derive(Clone, Debug)]
pub struct BoundProblem {
    pub id: String,
    pub arity: usize,
    pub objective: Expr,
    pub domain: DomainSpec,
    pub expected_value: f64,
    /// Where the expected value comes from and how many digits it carries.
    pub provenance: String,
    pub expected_argmax: Vec<f64>,
    pub value_tolerance: f64,
    pub argmax_tolerance: f64,
    /// Which coefficient functional this maximum bounds.
    pub claim: String,
    /// Exact value at an endpoint maximizer, checked to [`CLOSED_FORM_TOLERANCE`].
    pub closed_form: Option<f64>,
}

impl BoundProblem {
    /// Checks the registration invariants: arities agree, every radicand is
    /// nonnegative on the domain, the expected maximizer is feasible, and the
    /// objective there matches the expected value.
    pub fn validate(&self) -> Result<()> {
        let fail = |reason: String| Error::InvalidProblem {
            id: self.id.clone(),
            reason,
        };
        if !(1..=2).contains(&self.arity) {
            return Err(fail(format!("arity {} not in 1..=2", self.arity)));
        }
        if self.domain.arity() != self.arity || self.expected_argmax.len() != self.arity {
            return Err(fail("domain, argmax and declared arity disagree".into()));
        }
        if self.objective.arity() > self.arity {
            return Err(fail(
                "objective reads a variable beyond the declared arity".into(),
            ));
        }
        if let Some(g) = &self.domain.constraint {
            if g.arity() > self.arity {
                return Err(fail(
                    "constraint reads a variable beyond the declared arity".into(),
                ));
            }
        }
        if !(self.value_tolerance > 0.0 && self.argmax_tolerance > 0.0) {
            return Err(fail("tolerances must be positive".into()));
        }
        self.check_radicands().map_err(fail)?;
        if !self
            .domain
            .contains_point(&self.expected_argmax, RADICAND_EPS)
        {
            return Err(fail(format!(
                "expected argmax {:?} lies outside the domain",
                self.expected_argmax
            )));
        }
        let at_argmax = self
            .objective
            .eval_point(&self.expected_argmax)
            .map_err(|e| fail(format!("objective undefined at expected argmax: {e}")))?;
        if (at_argmax - self.expected_value).abs() > self.value_tolerance {
            return Err(fail(format!(
                "objective at expected argmax is {at_argmax}, expected {} ± {}",
                self.expected_value, self.value_tolerance
            )));
        }
        Ok(())
    }

    fn check_radicands(&self) -> std::result::Result<(), String> {
        let radicands = self.objective.radicands();
        for cell in grid_cells(&self.domain.bounds, VALIDATION_GRID) {
            if let Some(g) = &self.domain.constraint {
                // Only cells certainly inside the constrained domain say
                // anything about radicand signs there.
                match g.eval_interval(&cell) {
                    Ok(r) if r.lo() >= 0.0 => {}
                    _ => continue,
                }
            }
            for r in &radicands {
                let enc = r
                    .eval_interval(&cell)
                    .map_err(|e| format!("radicand undefined on {cell:?}: {e}"))?;
                if enc.lo() < -RADICAND_EPS {
                    return Err(format!("radicand {r:?} reaches {} on {cell:?}", enc.lo()));
                }
            }
        }
        Ok(())
    }
}

fn grid_cells(bounds: &[Interval], per_axis: usize) -> Vec<IntervalBox> {
    let axis_cells: Vec<Vec<Interval>> = bounds
        .iter()
        .map(|b| {
            let step = (b.hi() - b.lo()) / per_axis as f64;
            (0..per_axis)
                .map(|i| {
                    let lo = if i == 0 {
                        b.lo()
                    } else {
                        b.lo() + step * i as f64
                    };
                    let hi = if i + 1 == per_axis {
                        b.hi()
                    } else {
                        b.lo() + step * (i + 1) as f64
                    };
                    Interval::new(lo.min(hi), hi).expect("grid cell")
                })
                .collect()
        })
        .collect();
    let mut cells: Vec<IntervalBox> = vec![Vec::new()];
    for axis in axis_cells {
        cells = cells
            .into_iter()
            .flat_map(|prefix| {
                axis.iter().map(move |c| {
                    let mut next = prefix.clone();
                    next.push(*c);
                    next
                })
            })
            .collect();
    }
    cells
}

fn one() -> Expr {
    Expr::int(1)
}

/// `1 - 3t²`
fn radicand_1_3(t: Expr) -> Expr {
    one() - Expr::int(3) * t.powi(2)
}

/// `1 - x² - (27/4)x⁴`, the a3 = 0 radicand.
fn radicand_a3_zero() -> Expr {
    let x = Expr::x;
    one() - x().powi(2) - Expr::ratio(27, 4) * x().powi(4)
}

/// `1 - x² - 3y²`
fn radicand_f6() -> Expr {
    one() - Expr::x().powi(2) - Expr::int(3) * Expr::y().powi(2)
}

/// Upper end of the enclosure of 1/√3, the largest feasible |ω13| when ω11 = 0.
fn inv_sqrt3_hi() -> f64 {
    Expr::ratio_sqrt(1, 3, 3)
        .eval_interval(&[])
        .expect("constant")
        .hi()
}

/// Lowers `y` onto the ellipse `x² + 3y² = 1` when the point lies outside.
fn project_f6(p: &mut [f64]) {
    let cap = (1.0 - p[0] * p[0]).max(0.0).sqrt() / 3f64.sqrt();
    p[1] = p[1].min(cap).max(0.0);
}

fn f1() -> Expr {
    let y = Expr::x;
    Expr::int(2) * y().powi(3)
        + Expr::ratio(4, 5) * radicand_1_3(y())
        + Expr::ratio_sqrt(4, 7, 7) * y() * radicand_1_3(y()).radical()
}

fn a5_a2zero() -> Expr {
    let y = Expr::x;
    Expr::ratio_sqrt(2, 7, 7) * radicand_1_3(y()).radical() + Expr::int(3) * y().powi(2)
}

fn f2() -> Expr {
    let x = Expr::x;
    Expr::ratio_sqrt(2, 5, 5) * radicand_a3_zero().radical() + Expr::int(5) * x().powi(3)
}

fn f3() -> Expr {
    let x = Expr::x;
    (Expr::ratio_sqrt(2, 7, 7) + Expr::ratio_sqrt(6, 5, 5) * x()) * radicand_a3_zero().radical()
        + Expr::ratio(25, 4) * x().powi(4)
}

fn f4() -> Expr {
    let x = Expr::x;
    Expr::ratio_sqrt(4, 5, 5) * x() * radicand_a3_zero().radical() + Expr::int(10) * x().powi(4)
}

fn f5() -> Expr {
    let x = Expr::x;
    Expr::ratio(1, 5) * radicand_a3_zero()
        + (Expr::ratio_sqrt(4, 5, 5) * x().powi(3) + Expr::ratio_sqrt(8, 7, 7) * x().powi(2))
            * radicand_a3_zero().radical()
}

/// `(2/√5)√(1−x²−3y²) + 4xy + x³`
pub fn f6_expr() -> Expr {
    let (x, y) = (Expr::x, Expr::y);
    Expr::ratio_sqrt(2, 5, 5) * radicand_f6().radical() + Expr::int(4) * x() * y() + x().powi(3)
}

fn a5_minus_a3_odd() -> Expr {
    let y = Expr::x;
    Expr::ratio_sqrt(2, 7, 7) * radicand_1_3(y()).radical() + y().powi(2)
}

/// Closed form `(1/4)√(21/5) + 5/8`.
pub fn f2_closed_form() -> f64 {
    0.25 * (21.0f64 / 5.0).sqrt() + 0.625
}

/// Closed form `3/4 + 1/√7`.
pub fn a5_a2zero_closed_form() -> f64 {
    0.75 + 1.0 / 7f64.sqrt()
}

/// Closed form `2/√7`.
pub fn a5_minus_a3_odd_closed_form() -> f64 {
    2.0 / 7f64.sqrt()
}

/// Closed form `2/√5`.
pub fn f6_edge_0_closed_form() -> f64 {
    2.0 / 5f64.sqrt()
}

#[allow(clippy::too_many_arguments)]
fn entry(
    id: &str,
    objective: Expr,
    domain: DomainSpec,
    expected_value: f64,
    provenance: &str,
    expected_argmax: Vec<f64>,
    value_tolerance: f64,
    argmax_tolerance: f64,
    claim: &str,
    closed_form: Option<f64>,
) -> BoundProblem {
    BoundProblem {
        id: id.to_string(),
        arity: domain.arity(),
        objective,
        domain,
        expected_value,
        provenance: provenance.to_string(),
        expected_argmax,
        value_tolerance,
        argmax_tolerance,
        claim: claim.to_string(),
        closed_form,
    }
}

fn validated(problems: Vec<BoundProblem>) -> Vec<BoundProblem> {
    for p in &problems {
        if let Err(e) = p.validate() {
            panic!("built-in catalog entry failed registration: {e}");
        }
    }
    problems
}

/// The eight bound problems.
pub fn catalog() -> Vec<BoundProblem> {
    let half = || DomainSpec::interval(0.0, 0.5);
    let f6_domain = DomainSpec {
        bounds: vec![
            Interval::new(0.0, 1.0).unwrap(),
            Interval::new(0.0, inv_sqrt3_hi()).unwrap(),
        ],
        constraint: Some(radicand_f6()),
        projection: Some(project_f6),
    };
    validated(vec![
        entry(
            "f1",
            f1(),
            half(),
            1.026,
            "reference value 1.026..., maximizer 0.286667...",
            vec![0.286667],
            5e-4,
            1e-4,
            "|H3(1)| when a2 = 0, as a function of y = |ω13| <= 1/2",
            None,
        ),
        entry(
            "a5_a2zero",
            a5_a2zero(),
            half(),
            a5_a2zero_closed_form(),
            "closed form 3/4 + 1/√7 = 1.12796..., endpoint y = 1/2",
            vec![0.5],
            CLOSED_FORM_TOLERANCE,
            1e-6,
            "|a5| when a2 = 0: 2|ω17| + 3|ω13|² with |ω13| <= 1/2",
            Some(a5_a2zero_closed_form()),
        ),
        entry(
            "f2",
            f2(),
            half(),
            f2_closed_form(),
            "closed form (1/4)√(21/5) + 5/8 = 1.1373..., endpoint x = 1/2",
            vec![0.5],
            CLOSED_FORM_TOLERANCE,
            1e-6,
            "|a4| when a3 = 0, as a function of x = |ω11| <= 1/2",
            Some(f2_closed_form()),
        ),
        entry(
            "f3",
            f3(),
            half(),
            1.674_896_577,
            "reference value 1.674896577..., maximizer 0.43957885...",
            vec![0.439_578_85],
            1e-9,
            1e-6,
            "|a5| when a3 = 0, as a function of x = |ω11| <= 1/2",
            None,
        ),
        entry(
            "f4",
            f4(),
            half(),
            1.1373,
            "reference value 1.1373..., endpoint x = 1/2",
            vec![0.5],
            5e-4,
            1e-6,
            "|H2(2)| when a3 = 0, as a function of x = |ω11| <= 1/2",
            Some(f2_closed_form()),
        ),
        entry(
            "f5",
            f5(),
            half(),
            0.664_795_875_6,
            "reference value 0.6647958756..., maximizer 0.458573...",
            vec![0.458_573],
            1e-9,
            1e-5,
            "|H3(1)| when a3 = 0, as a function of x = |ω11| <= 1/2",
            None,
        ),
        entry(
            "f6",
            f6_expr(),
            f6_domain,
            1.75185,
            "reference value 1.75185..., interior maximizer (0.83634..., 0.2872...)",
            vec![0.83634, 0.2872],
            1e-4,
            1e-3,
            "|a4| - |a3| over x = |ω11|, y = |ω13| with x² + 3y² <= 1",
            None,
        ),
        entry(
            "a5_minus_a3_odd",
            a5_minus_a3_odd(),
            half(),
            a5_minus_a3_odd_closed_form(),
            "closed form 2/√7 = 0.7559..., endpoint y = 0",
            vec![0.0],
            CLOSED_FORM_TOLERANCE,
            1e-6,
            "|a5| - |a3| for odd f: 2|ω17| + |ω13|² with |ω13| <= 1/2",
            Some(a5_minus_a3_odd_closed_form()),
        ),
    ])
}

/// The three restrictions of the f6 objective to the edges of its domain.
pub fn f6_edge_curves() -> Vec<BoundProblem> {
    let x = Expr::x;
    validated(vec![
        entry(
            "f6_edge_0",
            Expr::ratio_sqrt(2, 5, 5) * radicand_1_3(x()).radical(),
            DomainSpec::interval(0.0, inv_sqrt3_hi()),
            f6_edge_0_closed_form(),
            "closed form 2/√5 = 0.8944..., endpoint y = 0",
            vec![0.0],
            CLOSED_FORM_TOLERANCE,
            1e-6,
            "f6 on the edge x = 0, as a function of y",
            Some(f6_edge_0_closed_form()),
        ),
        entry(
            "f6_edge_y0",
            Expr::ratio_sqrt(2, 5, 5) * (one() - x().powi(2)).radical() + x().powi(3),
            DomainSpec::interval(0.0, 1.0),
            1.13666,
            "reference value 1.13666..., maximizer 0.9494...",
            vec![0.9494],
            5e-4,
            1e-4,
            "f6 on the edge y = 0, as a function of x",
            None,
        ),
        entry(
            "f6_edge_curve",
            Expr::ratio_sqrt(4, 3, 3) * x() * (one() - x().powi(2)).radical() + x().powi(3),
            DomainSpec::interval(0.0, 1.0),
            1.6496,
            "reference value 1.6496..., maximizer 0.8628...",
            vec![0.8628],
            5e-4,
            1e-4,
            "f6 on the curved edge y = √(1-x²)/√3, as a function of x",
            None,
        ),
    ])
}

/// Catalog entries followed by the f6 edge curves.
pub fn all_problems() -> Vec<BoundProblem> {
    let mut v = catalog();
    v.extend(f6_edge_curves());
    v
}

pub fn problem_ids() -> Vec<String> {
    all_problems().into_iter().map(|p| p.id).collect()
}

pub fn lookup(id: &str) -> Result<BoundProblem> {
    all_problems()
        .into_iter()
        .find(|p| p.id == id)
        .ok_or_else(|| Error::UnknownBound(id.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_has_eight_entries_and_three_edges() {
        let ids: Vec<_> = catalog().into_iter().map(|p| p.id).collect();
        assert_eq!(
            ids,
            [
                "f1",
                "a5_a2zero",
                "f2",
                "f3",
                "f4",
                "f5",
                "f6",
                "a5_minus_a3_odd"
            ]
        );
        assert_eq!(f6_edge_curves().len(), 3);
        assert_eq!(problem_ids().len(), 11);
    }

    #[test]
    fn f2_at_endpoint_is_closed_form() {
        let p = lookup("f2").unwrap();
        let v = p.objective.eval_point(&[0.5]).unwrap();
        assert!((v - f2_closed_form()).abs() < 1e-15);
        assert!((f2_closed_form() - 1.137_347_538_297_98).abs() < 1e-14);
    }

    #[test]
    fn odd_entry_is_smaller_at_far_endpoint() {
        let p = lookup("a5_minus_a3_odd").unwrap();
        let v = p.objective.eval_point(&[0.5]).unwrap();
        assert!((v - (1.0 / 7f64.sqrt() + 0.25)).abs() < 1e-15);
        assert!(v < a5_minus_a3_odd_closed_form());
    }

    #[test]
    fn f6_at_origin() {
        let p = lookup("f6").unwrap();
        let v = p.objective.eval_point(&[0.0, 0.0]).unwrap();
        assert!((v - 0.894_427_190_999_915_9).abs() < 1e-15);
    }

    #[test]
    fn f6_constraint_cuts_the_corner() {
        let p = lookup("f6").unwrap();
        assert!(p.domain.contains_point(&[0.5, 0.4], 0.0));
        assert!(!p.domain.contains_point(&[0.9, 0.5], 0.0));
        let mut q = [0.9, 0.5];
        (p.domain.projection.unwrap())(&mut q);
        assert!(p.domain.contains_point(&q, 1e-15));
    }

    #[test]
    fn registration_rejects_wrong_expected_value() {
        let mut p = lookup("f3").unwrap();
        p.expected_value = 1.7;
        assert!(p.validate().is_err());
    }

    #[test]
    fn registration_rejects_negative_radicand() {
        let p = BoundProblem {
            id: "bad".into(),
            arity: 1,
            objective: (Expr::int(1) - Expr::x().powi(2)).radical(),
            domain: DomainSpec::interval(0.0, 2.0),
            expected_value: 1.0,
            provenance: String::new(),
            expected_argmax: vec![0.0],
            value_tolerance: 1e-12,
            argmax_tolerance: 1e-6,
            claim: String::new(),
            closed_form: None,
        };
        assert!(matches!(p.validate(), Err(Error::InvalidProblem { .. })));
    }

    #[test]
    fn unknown_id() {
        assert!(matches!(lookup("nosuch"), Err(Error::UnknownBound(_))));
    }
}
