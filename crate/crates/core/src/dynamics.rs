//! Fixed-step RK4 on unit-normalized planar direction fields, with
//! bisection-refined events.

use serde::Serialize;
use thiserror::Error;

pub type Point = [f64; 2];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("field is not finite at ({}, {})", .0[0], .0[1])]
    NonFiniteField(Point),
    #[error("no crossing found within the arc-length budget")]
    NoCrossing,
    #[error("invalid integration parameters: {0}")]
    InvalidParameters(String),
}

/// A planar vector field, used only through its direction.
pub trait DirectionField: Sync {
    fn eval(&self, p: Point) -> Point;

    /// Speeds below this are treated as singular points.
    fn singular_tolerance(&self) -> f64 {
        1e-12
    }
}

impl<T: DirectionField + ?Sized> DirectionField for &T {
    fn eval(&self, p: Point) -> Point {
        (**self).eval(p)
    }

    fn singular_tolerance(&self) -> f64 {
        (**self).singular_tolerance()
    }
}

/// Closure-backed field.
pub struct FnField<F> {
    f: F,
    tolerance: f64,
}

impl<F: Fn(Point) -> Point + Sync> FnField<F> {
    pub fn new(f: F) -> Self {
        FnField { f, tolerance: 1e-12 }
    }

    pub fn with_tolerance(f: F, tolerance: f64) -> Self {
        FnField { f, tolerance }
    }
}

impl<F: Fn(Point) -> Point + Sync> DirectionField for FnField<F> {
    fn eval(&self, p: Point) -> Point {
        (self.f)(p)
    }

    fn singular_tolerance(&self) -> f64 {
        self.tolerance
    }
}

/// The same field with time reversed (backward orbits).
pub struct Reversed<F>(pub F);

impl<F: DirectionField> DirectionField for Reversed<F> {
    fn eval(&self, p: Point) -> Point {
        let v = self.0.eval(p);
        [-v[0], -v[1]]
    }

    fn singular_tolerance(&self) -> f64 {
        self.0.singular_tolerance()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CrossingFilter {
    Any,
    /// From `ax+by+c < 0` to `>= 0`.
    Increasing,
    /// From `ax+by+c > 0` to `<= 0`.
    Decreasing,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum EventSpec {
    LineCross {
        a: f64,
        b: f64,
        c: f64,
        filter: CrossingFilter,
    },
    BallEnter { center: Point, radius: f64 },
    BallExit { center: Point, radius: f64 },
}

impl EventSpec {
    fn value(&self, p: Point) -> f64 {
        match *self {
            EventSpec::LineCross { a, b, c, .. } => a * p[0] + b * p[1] + c,
            EventSpec::BallEnter { center, radius } | EventSpec::BallExit { center, radius } => {
                let dx = p[0] - center[0];
                let dy = p[1] - center[1];
                dx.hypot(dy) - radius
            }
        }
    }

    fn fires(&self, before: f64, after: f64) -> bool {
        match *self {
            EventSpec::LineCross { filter, .. } => match filter {
                CrossingFilter::Increasing => before < 0.0 && after >= 0.0,
                CrossingFilter::Decreasing => before > 0.0 && after <= 0.0,
                CrossingFilter::Any => {
                    (before < 0.0 && after >= 0.0) || (before > 0.0 && after <= 0.0)
                }
            },
            EventSpec::BallEnter { .. } => before > 0.0 && after <= 0.0,
            EventSpec::BallExit { .. } => before < 0.0 && after >= 0.0,
        }
    }

    fn check(&self) -> Result<(), DynamicsError> {
        match *self {
            EventSpec::LineCross { a, b, .. } if a == 0.0 && b == 0.0 => Err(
                DynamicsError::InvalidParameters("line with a = b = 0".into()),
            ),
            EventSpec::BallEnter { radius, .. } | EventSpec::BallExit { radius, .. }
                if radius.is_nan() || radius <= 0.0 =>
            {
                Err(DynamicsError::InvalidParameters("non-positive radius".into()))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Termination {
    SingularReached,
    BudgetExhausted,
    /// Index into the event list.
    EventHit(usize),
    LeftDomain,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub vertices: Vec<Point>,
    pub arc_length: f64,
    pub termination: Termination,
}

impl Trajectory {
    pub fn end(&self) -> Point {
        *self.vertices.last().expect("a trajectory has a start vertex")
    }
}

/// Full set of integration parameters.
#[derive(Clone, Debug)]
pub struct Integration<'a> {
    pub step: f64,
    pub budget: f64,
    pub events: &'a [EventSpec],
    /// Optional box `[xmin, xmax, ymin, ymax]`; leaving it ends the run.
    pub domain: Option<[f64; 4]>,
    /// Treat a reversal of direction between consecutive steps as arrival
    /// at a singular point (the unit field flips across a sink).
    pub stop_on_reversal: bool,
}

impl<'a> Integration<'a> {
    pub fn new(step: f64, budget: f64, events: &'a [EventSpec]) -> Self {
        Integration {
            step,
            budget,
            events,
            domain: None,
            stop_on_reversal: true,
        }
    }
}

enum Unit {
    Regular(Point),
    Singular,
}

fn unit<F: DirectionField>(field: &F, p: Point) -> Result<Unit, DynamicsError> {
    let v = field.eval(p);
    if !v[0].is_finite() || !v[1].is_finite() {
        return Err(DynamicsError::NonFiniteField(p));
    }
    let s = v[0].hypot(v[1]);
    if s < field.singular_tolerance() || s == 0.0 {
        Ok(Unit::Singular)
    } else {
        Ok(Unit::Regular([v[0] / s, v[1] / s]))
    }
}

fn stage<F: DirectionField>(field: &F, p: Point) -> Result<Point, DynamicsError> {
    Ok(match unit(field, p)? {
        Unit::Regular(u) => u,
        Unit::Singular => [0.0, 0.0],
    })
}

/// One classical RK4 step of length `h` with first stage `k1` already known.
fn rk4<F: DirectionField>(field: &F, p: Point, k1: Point, h: f64) -> Result<Point, DynamicsError> {
    let at = |k: Point, c: f64| [p[0] + c * h * k[0], p[1] + c * h * k[1]];
    let k2 = stage(field, at(k1, 0.5))?;
    let k3 = stage(field, at(k2, 0.5))?;
    let k4 = stage(field, at(k3, 1.0))?;
    Ok([
        p[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        p[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ])
}

fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn outside(domain: Option<[f64; 4]>, p: Point) -> bool {
    domain.is_some_and(|[x0, x1, y0, y1]| p[0] < x0 || p[0] > x1 || p[1] < y0 || p[1] > y1)
}

/// Integrates the unit-normalized field from `start` with arc-length step
/// `step` until an event fires, a singular point is reached, or `budget`
/// arc length is used.
pub fn integrate_orbit<F: DirectionField>(
    field: &F,
    start: Point,
    step: f64,
    budget: f64,
    events: &[EventSpec],
) -> Result<Trajectory, DynamicsError> {
    integrate(field, start, &Integration::new(step, budget, events))
}

pub fn integrate<F: DirectionField>(
    field: &F,
    start: Point,
    opts: &Integration<'_>,
) -> Result<Trajectory, DynamicsError> {
    let step = opts.step;
    let budget = opts.budget;
    if !(step > 0.0 && step.is_finite()) || budget.is_nan() || budget <= 0.0 {
        return Err(DynamicsError::InvalidParameters(format!(
            "step {step} and budget {budget} must be positive"
        )));
    }
    if !start[0].is_finite() || !start[1].is_finite() {
        return Err(DynamicsError::InvalidParameters("non-finite start".into()));
    }
    for e in opts.events {
        e.check()?;
    }

    let mut vertices = vec![start];
    let mut p = start;
    let mut used = 0.0f64;
    let mut arc = 0.0f64;
    let mut prev_dir: Option<Point> = None;
    let mut values: Vec<f64> = opts.events.iter().map(|e| e.value(p)).collect();
    let finish = |vertices: Vec<Point>, arc: f64, termination| Trajectory {
        vertices,
        arc_length: arc,
        termination,
    };

    loop {
        let remaining = budget - used;
        if remaining <= budget * 1e-14 {
            return Ok(finish(vertices, arc, Termination::BudgetExhausted));
        }
        let k1 = match unit(field, p)? {
            Unit::Singular => return Ok(finish(vertices, arc, Termination::SingularReached)),
            Unit::Regular(u) => u,
        };
        if opts.stop_on_reversal {
            if let Some(d) = prev_dir {
                if d[0] * k1[0] + d[1] * k1[1] < 0.0 {
                    return Ok(finish(vertices, arc, Termination::SingularReached));
                }
            }
        }
        prev_dir = Some(k1);
        let h = step.min(remaining);

        // Advance arc length h. A step whose RK4 stages cancel (chord much
        // shorter than the step) is retried in halves; the unit field can
        // turn on scales below the step near degenerate isoclines. Only the
        // point after the full step becomes a vertex.
        let mut q = p;
        let mut kq = k1;
        let mut done = 0.0;
        let mut s = h;
        let mut stop: Option<Termination> = None;
        while h - done > h * 1e-12 {
            s = s.min(h - done);
            let next = rk4(field, q, kq, s)?;
            if dist(q, next) < 0.5 * s {
                s *= 0.5;
                if s < step * 1e-6 {
                    stop = Some(Termination::SingularReached);
                    break;
                }
                continue;
            }

            // earliest event inside this substep
            let mut hit: Option<(f64, usize)> = None;
            for (idx, e) in opts.events.iter().enumerate() {
                let after = e.value(next);
                if !e.fires(values[idx], after) {
                    continue;
                }
                let (mut lo, mut hi) = (0.0, s);
                while hi - lo > step * 1e-6 {
                    let mid = 0.5 * (lo + hi);
                    let r = rk4(field, q, kq, mid)?;
                    if e.fires(values[idx], e.value(r)) {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                if hit.is_none_or(|(best, _)| hi < best) {
                    hit = Some((hi, idx));
                }
            }
            if let Some((hh, idx)) = hit {
                q = rk4(field, q, kq, hh)?;
                stop = Some(Termination::EventHit(idx));
                break;
            }

            done += s;
            q = next;
            for (idx, e) in opts.events.iter().enumerate() {
                values[idx] = e.value(q);
            }
            if h - done <= h * 1e-12 {
                break;
            }
            kq = match unit(field, q)? {
                Unit::Regular(u) => u,
                Unit::Singular => {
                    stop = Some(Termination::SingularReached);
                    break;
                }
            };
            s *= 2.0;
        }

        if q != p {
            arc += dist(p, q);
            vertices.push(q);
        }
        if let Some(term) = stop {
            return Ok(finish(vertices, arc, term));
        }
        used += h;
        p = q;
        if outside(opts.domain, p) {
            return Ok(finish(vertices, arc, Termination::LeftDomain));
        }
    }
}

/// First crossing of a `LineCross` event within the budget.
pub fn detect_crossing<F: DirectionField>(
    field: &F,
    start: Point,
    line: EventSpec,
    step: f64,
    budget: f64,
) -> Result<Point, DynamicsError> {
    if !matches!(line, EventSpec::LineCross { .. }) {
        return Err(DynamicsError::InvalidParameters(
            "detect_crossing needs a line event".into(),
        ));
    }
    let traj = integrate_orbit(field, start, step, budget, &[line])?;
    match traj.termination {
        Termination::EventHit(_) => Ok(traj.end()),
        _ => Err(DynamicsError::NoCrossing),
    }
}
