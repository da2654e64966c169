//! The explicit polynomial system
//! `x' = -((1+x^2)y + x^3)^5`, `y' = y^2(y^2 + x^3)`,
//! whose origin is a global attractor, not positively stable, and an
//! elliptic saddle; with numerical checks of those facts and of the
//! inequalities behind them.

use serde::Serialize;

use crate::dynamics::{
    detect_crossing, integrate, CrossingFilter, DirectionField, DynamicsError, EventSpec,
    Integration, Point, Reversed, Termination, Trajectory,
};

pub const DEFAULT_STEP: f64 = 1e-3;
pub const DEFAULT_BUDGET: f64 = 1e4;

#[derive(Clone, Copy, Debug, Default)]
pub struct PlanarCubicQuinticSystem;

impl PlanarCubicQuinticSystem {
    pub fn p(x: f64, y: f64) -> f64 {
        -((1.0 + x * x) * y + x * x * x).powi(5)
    }

    pub fn q(x: f64, y: f64) -> f64 {
        y * y * (y * y + x * x * x)
    }
}

impl DirectionField for PlanarCubicQuinticSystem {
    fn eval(&self, p: Point) -> Point {
        eval_example_field(p[0], p[1])
    }

    /// The field is highly degenerate at the origin: |P| is about 3e-20 at
    /// x = 0.05 on the axis, so only exact zeros count as singular.
    fn singular_tolerance(&self) -> f64 {
        1e-300
    }
}

pub fn eval_example_field(x: f64, y: f64) -> Point {
    [
        PlanarCubicQuinticSystem::p(x, y),
        PlanarCubicQuinticSystem::q(x, y),
    ]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum RegionLabel {
    U1,
    U2,
    U3,
    U4,
    U5,
    U6,
    Isocline,
    Origin,
}

impl RegionLabel {
    /// Signs of `(x', y')` in the region, `None` off the open regions.
    pub fn directions(self) -> Option<(f64, f64)> {
        match self {
            RegionLabel::U1 | RegionLabel::U6 => Some((-1.0, 1.0)),
            RegionLabel::U2 => Some((-1.0, -1.0)),
            RegionLabel::U3 | RegionLabel::U4 => Some((1.0, -1.0)),
            RegionLabel::U5 => Some((1.0, 1.0)),
            RegionLabel::Isocline | RegionLabel::Origin => None,
        }
    }
}

pub fn classify_region(x: f64, y: f64) -> RegionLabel {
    if x == 0.0 && y == 0.0 {
        return RegionLabel::Origin;
    }
    let a = y;
    let b = y * y + x * x * x;
    let c = (1.0 + x * x) * y + x * x * x;
    if a == 0.0 || b == 0.0 || c == 0.0 {
        return RegionLabel::Isocline;
    }
    match (a > 0.0, b > 0.0, c > 0.0) {
        (true, true, true) => RegionLabel::U1,
        (true, false, true) => RegionLabel::U2,
        (true, false, false) => RegionLabel::U3,
        (false, false, false) => RegionLabel::U4,
        (false, true, false) => RegionLabel::U5,
        (false, true, true) => RegionLabel::U6,
        // (+,+,-) and (-,-,+) are empty; rounding could still land here
        _ => RegionLabel::Isocline,
    }
}

/// The line `y = -2x` as a decreasing crossing of `2x + y = 0`.
pub fn crossing_line() -> EventSpec {
    EventSpec::LineCross {
        a: 2.0,
        b: 1.0,
        c: 0.0,
        filter: CrossingFilter::Decreasing,
    }
}

/// `Y(y0)`: height of the first crossing of `y = -2x` (with `x < 0`) by the
/// orbit through `(0, y0)`.
pub fn crossing_map_y(y0: f64, step: f64, budget: f64) -> Result<f64, DynamicsError> {
    if y0.is_nan() || y0 <= 0.0 {
        return Err(DynamicsError::InvalidParameters(format!("y0 = {y0} must be positive")));
    }
    let q = detect_crossing(&PlanarCubicQuinticSystem, [0.0, y0], crossing_line(), step, budget)?;
    if q[0] < 0.0 {
        Ok(q[1])
    } else {
        Err(DynamicsError::NoCrossing)
    }
}

/// The orbit from `(0, y0)` up to the crossing, for plotting and checks.
pub fn crossing_orbit(y0: f64, step: f64, budget: f64) -> Result<Trajectory, DynamicsError> {
    let ev = [crossing_line()];
    let t = integrate(&PlanarCubicQuinticSystem, [0.0, y0], &Integration::new(step, budget, &ev))?;
    match t.termination {
        Termination::EventHit(_) => Ok(t),
        _ => Err(DynamicsError::NoCrossing),
    }
}

/// `count` log-spaced values over `[from, to]`.
pub fn log_grid(from: f64, to: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![from];
    }
    let (a, b) = (from.ln(), to.ln());
    (0..count)
        .map(|k| (a + (b - a) * k as f64 / (count - 1) as f64).exp())
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct YMapPoint {
    pub y0: f64,
    pub y: f64,
}

pub fn y_map(y0s: &[f64], step: f64, budget: f64) -> Result<Vec<YMapPoint>, DynamicsError> {
    let run = |&y0: &f64| crossing_map_y(y0, step, budget).map(|y| YMapPoint { y0, y });
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        y0s.par_iter().map(run).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        y0s.iter().map(run).collect()
    }
}

/// Halton point `index` (from 1) in bases 2 and 3, scaled to `[lo, hi]^2`.
pub fn halton_point(index: u64, lo: f64, hi: f64) -> Point {
    fn radical_inverse(mut i: u64, base: u64) -> f64 {
        let mut f = 1.0;
        let mut r = 0.0;
        while i > 0 {
            f /= base as f64;
            r += f * (i % base) as f64;
            i /= base;
        }
        r
    }
    [
        lo + (hi - lo) * radical_inverse(index, 2),
        lo + (hi - lo) * radical_inverse(index, 3),
    ]
}

#[derive(Clone, Debug, Serialize)]
pub struct AttractionEntry {
    pub start: Point,
    pub arc_length: f64,
    pub reached: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AttractionReport {
    pub entries: Vec<AttractionEntry>,
    pub pass: bool,
}

fn origin_ball(radius: f64) -> EventSpec {
    EventSpec::BallEnter {
        center: [0.0, 0.0],
        radius,
    }
}

pub fn verify_global_attraction(
    samples: &[Point],
    eps: f64,
    step: f64,
    budget: f64,
) -> AttractionReport {
    let ev = [origin_ball(eps)];
    let run = |p: &Point| {
        if p[0].hypot(p[1]) <= eps {
            return AttractionEntry {
                start: *p,
                arc_length: 0.0,
                reached: true,
            };
        }
        match integrate(&PlanarCubicQuinticSystem, *p, &Integration::new(step, budget, &ev)) {
            Ok(t) => AttractionEntry {
                start: *p,
                arc_length: t.arc_length,
                reached: t.termination == Termination::EventHit(0),
            },
            Err(_) => AttractionEntry {
                start: *p,
                arc_length: f64::NAN,
                reached: false,
            },
        }
    };
    #[cfg(feature = "parallel")]
    let entries: Vec<AttractionEntry> = {
        use rayon::prelude::*;
        samples.par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let entries: Vec<AttractionEntry> = samples.iter().map(run).collect();
    let pass = entries.iter().all(|e| e.reached);
    AttractionReport { entries, pass }
}

#[derive(Clone, Debug, Serialize)]
pub struct InstabilityReport {
    pub start: Point,
    pub exit_radius: f64,
    pub enter_radius: f64,
    pub exit_point: Option<Point>,
    pub max_radius: f64,
    pub entered_after_exit: bool,
    pub pass: bool,
}

/// The orbit from `start` must reach distance `exit_radius` before entering
/// the ball of radius `enter_radius`, and enter it afterwards.
pub fn verify_instability(
    start: Point,
    exit_radius: f64,
    enter_radius: f64,
    step: f64,
    budget: f64,
) -> Result<InstabilityReport, DynamicsError> {
    let ev = [
        EventSpec::BallExit {
            center: [0.0, 0.0],
            radius: exit_radius,
        },
        origin_ball(enter_radius),
    ];
    let first = integrate(&PlanarCubicQuinticSystem, start, &Integration::new(step, budget, &ev))?;
    let mut max_radius = first
        .vertices
        .iter()
        .map(|p| p[0].hypot(p[1]))
        .fold(0.0, f64::max);
    let mut report = InstabilityReport {
        start,
        exit_radius,
        enter_radius,
        exit_point: None,
        max_radius,
        entered_after_exit: false,
        pass: false,
    };
    if first.termination != Termination::EventHit(0) {
        return Ok(report);
    }
    let exit = first.end();
    report.exit_point = Some(exit);
    let rest = budget - first.arc_length;
    let second = integrate(
        &PlanarCubicQuinticSystem,
        exit,
        &Integration::new(step, rest.max(step), &ev[1..]),
    )?;
    max_radius = second
        .vertices
        .iter()
        .map(|p| p[0].hypot(p[1]))
        .fold(max_radius, f64::max);
    report.max_radius = max_radius;
    report.entered_after_exit = second.termination == Termination::EventHit(0);
    report.pass = report.entered_after_exit;
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckLine {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct InequalityCheck {
    pub name: String,
    pub samples: usize,
    pub violations: Vec<(f64, f64, f64)>,
}

impl InequalityCheck {
    pub fn pass(&self) -> bool {
        self.samples > 0 && self.violations.is_empty()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InequalityReport {
    pub density: usize,
    pub checks: Vec<InequalityCheck>,
}

impl InequalityReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(InequalityCheck::pass)
    }
}

/// Closed grid of `d` points over `[a, b]`.
fn closed(a: f64, b: f64, d: usize) -> impl Iterator<Item = f64> {
    (0..d).map(move |k| a + (b - a) * k as f64 / (d - 1) as f64)
}

/// Open grid of `d` points strictly inside `(a, b)`.
fn open(a: f64, b: f64, d: usize) -> impl Iterator<Item = f64> {
    (1..=d).map(move |k| a + (b - a) * k as f64 / (d + 1) as f64)
}

/// Relative slack for inequalities evaluated in floating point.
const SLACK: f64 = 1e-12;

fn grid_check<F>(name: &str, xs: Vec<f64>, ys: Vec<f64>, mut test: F) -> InequalityCheck
where
    F: FnMut(f64, f64) -> Option<(bool, f64)>,
{
    let mut samples = 0;
    let mut violations = Vec::new();
    for &x in &xs {
        for &y in &ys {
            if let Some((ok, value)) = test(x, y) {
                samples += 1;
                if !ok {
                    violations.push((x, y, value));
                }
            }
        }
    }
    InequalityCheck {
        name: name.to_string(),
        samples,
        violations,
    }
}

/// `(x, y)` in the factor-chain domain: `-1/8 <= x <= 0`, `0 <= y <= 1/4`,
/// `y >= -2x`.
fn in_factor_domain(x: f64, y: f64) -> bool {
    y >= -2.0 * x
}

pub fn check_inequalities(density: usize) -> InequalityReport {
    let d = density.max(10);
    let mut checks = Vec::new();

    // -1 <= Q/P <= 0 on U1 with y >= 1, truncated to [-50, 50]^2
    checks.push(grid_check(
        "flattening: -1 <= Q/P <= 0 on U1, y >= 1",
        closed(-50.0, 50.0, d).collect(),
        closed(1.0, 50.0, d).collect(),
        |x, y| {
            if classify_region(x, y) != RegionLabel::U1 {
                return None;
            }
            let (p, q) = (PlanarCubicQuinticSystem::p(x, y), PlanarCubicQuinticSystem::q(x, y));
            let ratio = q / p;
            Some(((-1.0 - SLACK..=0.0).contains(&ratio), ratio))
        },
    ));

    let fx: Vec<f64> = closed(-0.125, 0.0, d).collect();
    let fy: Vec<f64> = closed(0.0, 0.25, d).collect();
    let s = |x: f64| (-x).powf(1.5);
    checks.push(grid_check(
        "factor 1: y + x^3/(1+x^2) <= y + (-x)^(3/2)",
        fx.clone(),
        fy.clone(),
        |x, y| {
            in_factor_domain(x, y).then(|| {
                let lhs = y + x.powi(3) / (1.0 + x * x);
                let rhs = y + s(x);
                (lhs <= rhs + SLACK * rhs.abs().max(1.0), rhs - lhs)
            })
        },
    ));
    checks.push(grid_check(
        "factor 2: y + x^3/(1+x^2) <= 2(y - (-x)^(3/2))",
        fx.clone(),
        fy.clone(),
        |x, y| {
            in_factor_domain(x, y).then(|| {
                let lhs = y + x.powi(3) / (1.0 + x * x);
                let rhs = 2.0 * (y - s(x));
                (lhs <= rhs + SLACK, rhs - lhs)
            })
        },
    ));
    checks.push(grid_check(
        "factor 3: (1+x^2)^-5 >= (1+1/64)^-5 > 1/2",
        fx.clone(),
        vec![0.0],
        |x, _| {
            let v = (1.0 + x * x).powi(-5);
            let floor = (1.0f64 + 1.0 / 64.0).powi(-5);
            Some((v >= floor * (1.0 - SLACK) && floor > 0.5, v))
        },
    ));
    checks.push(grid_check(
        "Q/P <= -1/(4y) on the factor domain (as 4y^3(y^2+x^3) >= c^5)",
        fx,
        fy,
        |x, y| {
            (in_factor_domain(x, y) && y > 0.0).then(|| {
                let c = (1.0 + x * x) * y + x.powi(3);
                let lhs = 4.0 * y.powi(3) * (y * y + x.powi(3));
                let rhs = c.powi(5);
                (lhs >= rhs * (1.0 - SLACK), lhs - rhs)
            })
        },
    ));

    // a g1(1-u, 1-au) - g2(1-u, 1-au) > 0 for 0 < u < 1/2, 0 < au < 1/2
    let g = |x: f64, y: f64| crate::synthesis::g_base(x, y);
    checks.push(grid_check(
        "rectangle field crosses y = 1 + a(x-1) left to right",
        open(0.0, 0.5, d).collect(),
        open(0.0, 0.5, d).collect(),
        |u, w| {
            let a = w / u;
            let v = g(1.0 - u, 1.0 - w);
            let value = a * v[0] - v[1];
            Some((value > 0.0, value))
        },
    ));
    checks.push(grid_check(
        "rectangle field crossing expansion identity",
        open(0.0, 0.5, d).collect(),
        open(0.0, 0.5, d).collect(),
        |u, w| {
            let a = w / u;
            let v = g(1.0 - u, 1.0 - w);
            let lhs = (a * v[0] - v[1]) / w;
            let rhs = 1.0 + 3.0 * u - a * u - 4.0 * u * u + a * u * u - 2.0 * a * a * u * u
                + (1.0 + a * a) * u.powi(3)
                + a.powi(4) * u.powi(4) / 2.0
                - a.powi(4) * u.powi(5) / 4.0;
            let ok = (lhs - rhs).abs() <= 1e-9 * rhs.abs().max(1.0);
            Some((ok, lhs - rhs))
        },
    ));

    InequalityReport { density: d, checks }
}

#[derive(Clone, Debug, Serialize)]
pub struct SaddleReport {
    pub checks: Vec<CheckLine>,
}

impl SaddleReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Half-width of the escape square certifying an empty alpha-limit.
pub const ESCAPE_RADIUS: f64 = 1e3;

fn escapes_backward(start: Point, step: f64, budget: f64) -> Result<Trajectory, DynamicsError> {
    let mut opts = Integration::new(step, budget, &[]);
    opts.domain = Some([-ESCAPE_RADIUS, ESCAPE_RADIUS, -ESCAPE_RADIUS, ESCAPE_RADIUS]);
    integrate(&Reversed(PlanarCubicQuinticSystem), start, &opts)
}

/// Numerical signature of the elliptic saddle: invariant half-axes, a family
/// of homoclinic loops inside the separatrix loop, and heteroclinic orbits
/// through the positive y-axis and the lower half-plane.
pub fn verify_elliptic_saddle(step: f64, budget: f64) -> Result<SaddleReport, DynamicsError> {
    let eps = 0.05;
    let ball = [origin_ball(eps)];
    let field = PlanarCubicQuinticSystem;
    let opts = Integration::new(step, budget, &ball);
    let mut checks = Vec::new();

    for x0 in [2.0, -2.0] {
        let t = integrate(&field, [x0, 0.0], &opts)?;
        let max_y = t.vertices.iter().map(|p| p[1].abs()).fold(0.0, f64::max);
        checks.push(CheckLine {
            name: format!("x-axis orbit from ({x0}, 0) converges along the axis"),
            pass: t.termination == Termination::EventHit(0) && max_y < 1e-9,
            detail: format!("termination {:?}, max |y| = {max_y:e}", t.termination),
        });
    }

    // the separatrix loop crosses y = -2x near the infimum of Y
    let y_inf = crossing_map_y(1e-3, step, budget)?;
    for frac in [0.25, 0.5, 0.75] {
        let h = frac * y_inf;
        let start = [-h / 2.0, h];
        let fwd = integrate(&field, start, &opts)?;
        let bwd = integrate(&Reversed(field), start, &opts)?;
        checks.push(CheckLine {
            name: format!("orbit through ({:.4}, {:.4}) inside the loop is homoclinic", start[0], start[1]),
            pass: fwd.termination == Termination::EventHit(0)
                && bwd.termination == Termination::EventHit(0),
            detail: format!(
                "forward {:?} after {:.3}, backward {:?} after {:.3}",
                fwd.termination, fwd.arc_length, bwd.termination, bwd.arc_length
            ),
        });
    }

    for y0 in [0.01, 1.0] {
        let fwd = integrate(&field, [0.0, y0], &opts)?;
        let bwd = escapes_backward([0.0, y0], step, budget)?;
        checks.push(CheckLine {
            name: format!("orbit through (0, {y0}) is heteroclinic"),
            pass: fwd.termination == Termination::EventHit(0)
                && bwd.termination == Termination::LeftDomain,
            detail: format!(
                "forward {:?}, backward {:?} after {:.1}",
                fwd.termination, bwd.termination, bwd.arc_length
            ),
        });
    }

    for x0 in [-2.0, 0.0, 1.0] {
        let bwd = escapes_backward([x0, -1.0], step, budget)?;
        checks.push(CheckLine {
            name: format!("orbit through ({x0}, -1) is heteroclinic"),
            pass: bwd.termination == Termination::LeftDomain,
            detail: format!("backward {:?} after {:.1}", bwd.termination, bwd.arc_length),
        });
    }
    Ok(SaddleReport { checks })
}
