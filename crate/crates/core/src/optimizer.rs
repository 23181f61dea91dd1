//! Certified branch-and-bound maximization over boxes.
//!
//! The search keeps a best-first queue of boxes ordered by their certified
//! upper bound. Each popped box is bisected along its widest coordinate and
//! both halves are classified against the domain constraint, bounded, tested
//! for monotonicity, and sampled at their midpoint for a feasible lower bound.
//! The upper bound of a box is the natural interval extension intersected with
//! the mean-value form built from the interval gradient.
//!
//! Boxes are expanded in fixed-size batches. A batch is assembled and merged
//! in queue order on one thread while the expansions themselves may run on a
//! worker pool, so the result never depends on the number of workers.
//!
//! Once the enclosure has converged, a second localization pass keeps
//! bisecting the surviving candidates until they are narrower than
//! [`OptimizerConfig::argmax_resolution`]. That pass only sharpens the argmax
//! box; the reported `[max_lo, max_hi]` is the state at convergence, which
//! makes tighter tolerances refine earlier results monotonically.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::{BoundProblem, CLOSED_FORM_TOLERANCE};
use crate::error::{Error, Result};
use crate::interval::{box_hull, box_mid, box_width, Interval, IntervalBox};
use crate::report::VerificationReport;

/// Boxes expanded per scheduling round, independent of the worker count.
const BATCH: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizerConfig {
    /// Required `max_hi - max_lo` at convergence.
    pub tolerance: f64,
    /// Budget on boxes bisected during the enclosure phase.
    pub max_boxes: u64,
    pub use_derivative_pruning: bool,
    /// Boxes whose constraint enclosure lies entirely below `-eps` are dropped.
    pub constraint_feasibility_eps: f64,
    /// Width below which candidates stop being bisected during localization.
    pub argmax_resolution: f64,
    /// Budget on boxes bisected during localization.
    pub max_refine_boxes: u64,
    /// Worker threads; 0 uses the global rayon pool, 1 runs inline.
    pub workers: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            tolerance: 1e-9,
            max_boxes: 10_000_000,
            use_derivative_pruning: true,
            constraint_feasibility_eps: 1e-14,
            argmax_resolution: 1e-10,
            max_refine_boxes: 1_000_000,
            workers: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn with_tolerance(tolerance: f64) -> Self {
        OptimizerConfig {
            tolerance,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::InvalidConfig("tolerance must be positive"));
        }
        if self.max_boxes == 0 {
            return Err(Error::InvalidConfig("max_boxes must be positive"));
        }
        if self.argmax_resolution.is_nan() || self.argmax_resolution <= 0.0 {
            return Err(Error::InvalidConfig("argmax_resolution must be positive"));
        }
        if self.constraint_feasibility_eps.is_nan() || self.constraint_feasibility_eps < 0.0 {
            return Err(Error::InvalidConfig(
                "constraint_feasibility_eps must be nonnegative",
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Converged,
    BudgetExhausted,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Converged => "converged",
            Status::BudgetExhausted => "budget_exhausted",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Enclosure {
    /// Certified lower bound on the objective at `witness`.
    pub max_lo: f64,
    /// Certified upper bound on the objective over the whole domain.
    pub max_hi: f64,
    /// Feasible point whose value is at least `max_lo`.
    pub witness: Vec<f64>,
    /// Hull of the surviving candidate boxes; contains every global maximizer.
    pub argmax_box: IntervalBox,
    pub boxes_processed: u64,
    pub status: Status,
}

impl Enclosure {
    pub fn width(&self) -> f64 {
        self.max_hi - self.max_lo
    }

    /// Midpoint of the argmax box.
    pub fn argmax(&self) -> Vec<f64> {
        box_mid(&self.argmax_box)
    }

    pub fn contains(&self, v: f64) -> bool {
        self.max_lo <= v && v <= self.max_hi
    }
}

#[derive(Clone, Debug)]
struct Candidate {
    bounds: IntervalBox,
    ub: f64,
    width: f64,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    /// Max-heap order: larger upper bound, then wider box, then the smaller
    /// lower corner in lexicographic order.
    fn cmp(&self, other: &Self) -> Ordering {
        self.ub
            .total_cmp(&other.ub)
            .then_with(|| self.width.total_cmp(&other.width))
            .then_with(|| {
                for (a, b) in self.bounds.iter().zip(&other.bounds) {
                    match b.lo().total_cmp(&a.lo()) {
                        Ordering::Equal => continue,
                        o => return o,
                    }
                }
                Ordering::Equal
            })
    }
}

/// Lower-bound witness: a feasible point and a certified lower bound on the
/// objective there.
#[derive(Clone, Debug)]
struct Witness {
    point: Vec<f64>,
    value: f64,
}

/// A child box after assessment.
struct Assessed {
    candidate: Option<Candidate>,
    witness: Option<Witness>,
}

struct Expansion {
    children: Vec<Assessed>,
}

struct Search<'a> {
    problem: &'a BoundProblem,
    cfg: &'a OptimizerConfig,
}

impl<'a> Search<'a> {
    /// True when the closed box stays off every face of the bounding box and,
    /// for constrained problems, strictly inside the constraint.
    fn strictly_interior(&self, b: &[Interval], strictly_feasible: bool) -> bool {
        strictly_feasible
            && b.iter()
                .zip(&self.problem.domain.bounds)
                .all(|(x, d)| x.lo() > d.lo() && x.hi() < d.hi())
    }

    fn witness_at(&self, mut p: Vec<f64>) -> Option<Witness> {
        let domain = &self.problem.domain;
        if !domain.certainly_contains(&p) {
            let project = domain.projection?;
            project(&mut p);
            // nudge inward past rounding on the constraint
            let mut tries = 0;
            while !domain.certainly_contains(&p) {
                if tries == 8 {
                    return None;
                }
                if let Some(last) = p.last_mut() {
                    *last = last.next_down().max(0.0);
                }
                tries += 1;
            }
        }
        let pb: Vec<Interval> = p.iter().map(|&v| Interval::point(v)).collect();
        let value = self.problem.objective.eval_interval(&pb).ok()?.lo();
        Some(Witness { point: p, value })
    }

    fn assess(&self, bounds: IntervalBox, parent_ub: f64) -> Assessed {
        let dropped = Assessed {
            candidate: None,
            witness: None,
        };
        let objective = &self.problem.objective;
        let strictly_feasible = match &self.problem.domain.constraint {
            None => true,
            Some(g) => match g.eval_interval(&bounds) {
                Ok(r) if r.hi() < -self.cfg.constraint_feasibility_eps => return dropped,
                Ok(r) => r.lo() > 0.0,
                Err(_) => false,
            },
        };
        // A domain error means some radicand is negative on the whole box,
        // so the box holds no feasible point.
        let natural = match objective.eval_interval(&bounds) {
            Ok(r) => r,
            Err(_) => return dropped,
        };
        let gradient = objective.gradient_interval(&bounds).ok();
        let interior = self.strictly_interior(&bounds, strictly_feasible);
        if self.cfg.use_derivative_pruning && interior {
            if let Some(g) = &gradient {
                if g.iter().any(|d| !d.contains_zero()) {
                    return dropped;
                }
            }
        }

        let mid = box_mid(&bounds);
        let mut ub = natural.hi().min(parent_ub);
        if let Some(g) = &gradient {
            let mid_box: Vec<Interval> = mid.iter().map(|&v| Interval::point(v)).collect();
            if let Ok(at_mid) = objective.eval_interval(&mid_box) {
                let centered = g
                    .iter()
                    .zip(&bounds)
                    .zip(&mid_box)
                    .fold(at_mid, |acc, ((d, b), m)| acc + *d * (*b - *m));
                ub = ub.min(centered.hi());
            }
        }
        let witness = self.witness_at(mid);
        let width = box_width(&bounds);
        Assessed {
            candidate: Some(Candidate { bounds, ub, width }),
            witness,
        }
    }

    /// Bisects along the widest coordinate, lowest index on ties. Returns
    /// `None` when the box is too narrow to split in floating point.
    fn bisect(bounds: &[Interval]) -> Option<(IntervalBox, IntervalBox)> {
        let mut axis = 0;
        let mut widest = -1.0;
        for (i, b) in bounds.iter().enumerate() {
            let w = b.hi() - b.lo();
            if w > widest {
                widest = w;
                axis = i;
            }
        }
        let b = bounds[axis];
        let m = b.mid();
        if !(b.lo() < m && m < b.hi()) {
            return None;
        }
        let mut left = bounds.to_vec();
        let mut right = bounds.to_vec();
        left[axis] = Interval::new(b.lo(), m).ok()?;
        right[axis] = Interval::new(m, b.hi()).ok()?;
        Some((left, right))
    }

    fn expand(&self, c: &Candidate) -> Option<Expansion> {
        let (l, r) = Self::bisect(&c.bounds)?;
        Some(Expansion {
            children: vec![self.assess(l, c.ub), self.assess(r, c.ub)],
        })
    }

    fn expand_batch(
        &self,
        batch: &[Candidate],
        pool: Option<&rayon::ThreadPool>,
    ) -> Vec<Option<Expansion>> {
        match (self.cfg.workers, pool) {
            (1, _) => batch.iter().map(|c| self.expand(c)).collect(),
            (_, Some(pool)) => pool.install(|| batch.par_iter().map(|c| self.expand(c)).collect()),
            (_, None) => batch.par_iter().map(|c| self.expand(c)).collect(),
        }
    }
}

/// State shared by both phases.
struct Frontier {
    heap: BinaryHeap<Candidate>,
    /// Boxes that can no longer be bisected.
    atomic: Vec<Candidate>,
    best: Option<Witness>,
}

impl Frontier {
    fn best_lo(&self) -> f64 {
        self.best.as_ref().map_or(f64::NEG_INFINITY, |w| w.value)
    }

    fn offer(&mut self, w: Witness) {
        if w.value > self.best_lo() {
            self.best = Some(w);
        }
    }

    fn discard_dead_top(&mut self) {
        let lo = self.best_lo();
        while self.heap.peek().is_some_and(|c| c.ub <= lo) {
            self.heap.pop();
        }
    }

    fn upper(&self) -> f64 {
        let top = self.heap.peek().map_or(f64::NEG_INFINITY, |c| c.ub);
        let atomic = self
            .atomic
            .iter()
            .map(|c| c.ub)
            .fold(f64::NEG_INFINITY, f64::max);
        top.max(atomic).max(self.best_lo())
    }

    /// Pops up to `limit` live boxes, best first.
    fn pop_batch(&mut self, limit: usize) -> Vec<Candidate> {
        let mut batch = Vec::with_capacity(limit);
        while batch.len() < limit {
            self.discard_dead_top();
            match self.heap.pop() {
                Some(c) => batch.push(c),
                None => break,
            }
        }
        batch
    }

    fn merge(&mut self, batch: Vec<Candidate>, expansions: Vec<Option<Expansion>>) {
        for (parent, exp) in batch.into_iter().zip(expansions) {
            match exp {
                None => self.atomic.push(parent),
                Some(exp) => {
                    for child in exp.children {
                        if let Some(w) = child.witness {
                            self.offer(w);
                        }
                        if let Some(c) = child.candidate {
                            if c.ub > self.best_lo() {
                                self.heap.push(c);
                            }
                        }
                    }
                }
            }
        }
    }

    fn live(&self) -> impl Iterator<Item = &Candidate> {
        let lo = self.best_lo();
        self.heap
            .iter()
            .chain(&self.atomic)
            .filter(move |c| c.ub > lo)
    }
}

/// Certified global maximum of the problem's objective over its domain.
pub fn maximize(problem: &BoundProblem, cfg: &OptimizerConfig) -> Result<Enclosure> {
    cfg.validate()?;
    let search = Search { problem, cfg };
    let pool = if cfg.workers > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(cfg.workers)
                .build()
                .map_err(|_| Error::InvalidConfig("could not start worker pool"))?,
        )
    } else {
        None
    };

    let root = search.assess(problem.domain.bounds.clone(), f64::INFINITY);
    let mut frontier = Frontier {
        heap: BinaryHeap::new(),
        atomic: Vec::new(),
        best: None,
    };
    match root.candidate {
        Some(c) => frontier.heap.push(c),
        None => {
            return Err(Error::Domain(crate::error::DomainError(
                "the whole domain is infeasible",
            )))
        }
    }
    if let Some(w) = root.witness {
        frontier.offer(w);
    }

    let mut processed: u64 = 0;
    let status = loop {
        frontier.discard_dead_top();
        let gap = frontier.upper() - frontier.best_lo();
        if frontier.heap.is_empty() {
            break if gap <= cfg.tolerance {
                Status::Converged
            } else {
                Status::BudgetExhausted
            };
        }
        if gap <= cfg.tolerance {
            break Status::Converged;
        }
        if processed >= cfg.max_boxes {
            break Status::BudgetExhausted;
        }
        let limit = BATCH.min((cfg.max_boxes - processed) as usize);
        let batch = frontier.pop_batch(limit);
        processed += batch.len() as u64;
        let expansions = search.expand_batch(&batch, pool.as_ref());
        frontier.merge(batch, expansions);
    };

    let max_lo = frontier.best_lo();
    let max_hi = frontier.upper();
    let witness = match &frontier.best {
        Some(w) => w.point.clone(),
        None => {
            return Err(Error::Domain(crate::error::DomainError(
                "no feasible point found",
            )))
        }
    };

    let argmax_box = if status == Status::Converged {
        localize(&search, frontier, pool.as_ref())
    } else {
        hull_of(frontier.live().map(|c| &c.bounds)).unwrap_or_else(|| point_box(&witness))
    };

    Ok(Enclosure {
        max_lo,
        max_hi,
        witness,
        argmax_box,
        boxes_processed: processed,
        status,
    })
}

fn point_box(p: &[f64]) -> IntervalBox {
    p.iter().map(|&v| Interval::point(v)).collect()
}

fn hull_of<'a>(mut boxes: impl Iterator<Item = &'a IntervalBox>) -> Option<IntervalBox> {
    let first = boxes.next()?.clone();
    Some(boxes.fold(first, |acc, b| box_hull(&acc, b)))
}

/// Bisects every surviving candidate down to the argmax resolution and
/// returns the hull of what is left.
fn localize(
    search: &Search<'_>,
    mut frontier: Frontier,
    pool: Option<&rayon::ThreadPool>,
) -> IntervalBox {
    let fallback = frontier
        .best
        .as_ref()
        .map(|w| point_box(&w.point))
        .expect("converged search has a witness");
    let lo = frontier.best_lo();
    let mut work: BinaryHeap<Candidate> = frontier
        .heap
        .drain()
        .chain(frontier.atomic.drain(..))
        .filter(|c| c.ub > lo)
        .collect();
    let mut settled: Vec<Candidate> = Vec::new();
    let mut processed = 0u64;
    let resolution = search.cfg.argmax_resolution;

    while processed < search.cfg.max_refine_boxes {
        let mut batch = Vec::with_capacity(BATCH);
        while batch.len() < BATCH {
            let Some(c) = work.pop() else { break };
            if c.ub <= frontier.best_lo() {
                continue;
            }
            if c.width <= resolution {
                settled.push(c);
            } else {
                batch.push(c);
            }
        }
        if batch.is_empty() {
            break;
        }
        processed += batch.len() as u64;
        let expansions = search.expand_batch(&batch, pool);
        for (parent, exp) in batch.into_iter().zip(expansions) {
            match exp {
                None => settled.push(parent),
                Some(exp) => {
                    for child in exp.children {
                        if let Some(w) = child.witness {
                            frontier.offer(w);
                        }
                        if let Some(c) = child.candidate {
                            work.push(c);
                        }
                    }
                }
            }
        }
    }

    let lo = frontier.best_lo();
    let survivors: Vec<&IntervalBox> = settled
        .iter()
        .chain(work.iter())
        .filter(|c| c.ub > lo)
        .map(|c| &c.bounds)
        .collect();
    hull_of(survivors.into_iter()).unwrap_or(fallback)
}

/// `x²(9y − 4) + 12y²`: the combination `3y·∂F6/∂x − x·∂F6/∂y` with the
/// radical terms cancelled. It vanishes at every interior stationary point
/// of the f6 objective.
pub fn stationary_residual_f6(x: f64, y: f64) -> f64 {
    x * x * (9.0 * y - 4.0) + 12.0 * y * y
}

/// Runs [`maximize`] and checks the enclosure against the problem's claims.
pub fn verify_bound(problem: &BoundProblem, cfg: &OptimizerConfig) -> Result<VerificationReport> {
    let start = Instant::now();
    let enclosure = maximize(problem, cfg)?;
    let wall_time = start.elapsed().as_secs_f64();

    let tol = problem.value_tolerance;
    let value_pass = enclosure.max_lo - tol <= problem.expected_value
        && problem.expected_value <= enclosure.max_hi + tol;
    let argmax_pass = enclosure
        .argmax_box
        .iter()
        .zip(&problem.expected_argmax)
        .all(|(b, &e)| {
            (b.lo() - e).abs() <= problem.argmax_tolerance
                && (b.hi() - e).abs() <= problem.argmax_tolerance
        });
    let convergence_pass = enclosure.status == Status::Converged;

    let closed_form_pass = problem.closed_form.map(|c| {
        let at_endpoint = problem
            .objective
            .eval_interval(&point_box(&problem.expected_argmax))
            .map(|r| {
                (r.lo() - c).abs() <= CLOSED_FORM_TOLERANCE
                    && (r.hi() - c).abs() <= CLOSED_FORM_TOLERANCE
            })
            .unwrap_or(false);
        let enclosed = enclosure.max_lo - CLOSED_FORM_TOLERANCE <= c
            && c <= enclosure.max_hi + CLOSED_FORM_TOLERANCE;
        at_endpoint && enclosed
    });

    Ok(VerificationReport {
        bound_id: problem.id.clone(),
        claim: problem.claim.clone(),
        status: enclosure.status,
        max_lo: enclosure.max_lo,
        max_hi: enclosure.max_hi,
        argmax: enclosure.argmax(),
        argmax_box: enclosure
            .argmax_box
            .iter()
            .map(|b| [b.lo(), b.hi()])
            .collect(),
        witness: enclosure.witness.clone(),
        expected_value: problem.expected_value,
        expected_argmax: problem.expected_argmax.clone(),
        closed_form: problem.closed_form,
        value_pass,
        argmax_pass,
        convergence_pass,
        closed_form_pass,
        boxes_processed: enclosure.boxes_processed,
        wall_time: Some(wall_time),
    })
}
