//! From a feasible set to (a) the mark configuration of the constructed flow
//! and (b) a piecewise vector field on the strip `[0,t] x [-n+1, inf)`,
//! glued from rectangular blocks and projected to the punctured plane.

use std::f64::consts::PI;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dynamics::{
    integrate, CrossingFilter, DirectionField, DynamicsError, EventSpec, Integration, Point,
    Reversed, Trajectory,
};
use crate::feasible::{FeasibleSet, ThirdInt, VecKey};
use crate::portrait::{export_portrait, LabelledTrajectory, PolylineClass, PortraitDoc};
use crate::skeleton::{Configuration, Mark, MarkClass};

pub type Q = Ratio<i128>;

fn q(n: i128, d: i128) -> Q {
    Q::new(n, d)
}

fn qf(x: Q) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

/// Orbit id of the separatrix (`rep = false`) or representative of a key.
pub fn orbit_id(key: &VecKey, rep: bool) -> String {
    let parts: Vec<String> = key.entries().iter().map(u32::to_string).collect();
    format!("{}{}", if rep { 'R' } else { 'S' }, parts.join("."))
}

/// The mark word of the flow built from `l`: elements in lexicographic order,
/// grouped into orbits and labelled by their alpha/omega class.
pub fn synthesize_configuration(l: &FeasibleSet) -> Configuration {
    let ends = l.classify_ends();
    let marks = l
        .elements()
        .into_iter()
        .map(|e| {
            let lambda_plus = ThirdInt::from_integer(l.lambda(&e.key) + 1);
            let sep = e.last == ThirdInt::ZERO || e.last == lambda_plus;
            let class = match (e.key.len() == 1, sep) {
                (true, true) => MarkClass::HetSep,
                (true, false) => MarkClass::HetRep,
                (false, true) => MarkClass::HomSep,
                (false, false) => MarkClass::HomRep,
            };
            Mark::new(orbit_id(&e.key, !sep), ends[&e], class)
        })
        .collect();
    Configuration::new(marks).expect("a feasible set synthesizes a valid configuration")
}

/// The heteroclinic separatrix whose omega-point is last in the synthesized word.
pub fn last_separatrix(l: &FeasibleSet) -> String {
    orbit_id(&VecKey::root(l.t()), false)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BlockKind {
    F { s: u32, j: u32 },
    GPlus { r: u32, s: u32, j: u32 },
    GMinus { r: u32, s: u32, j: u32 },
    Null,
}

/// One rectangle of the layout. F blocks span `[x0,x1] x [0, inf)`; the
/// others span `[x0,x1] x [-m+1, -m+2)` for their band `m >= 2`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockSpec {
    pub kind: BlockKind,
    #[serde(serialize_with = "ser_q")]
    pub x0: Q,
    #[serde(serialize_with = "ser_q")]
    pub x1: Q,
    /// 1 for F semibands, `m` for band `[-m+1, -m+2)`.
    pub band: u32,
    pub key: Option<VecKey>,
}

fn ser_q<S: serde::Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

impl BlockSpec {
    pub fn y_range(&self) -> (f64, f64) {
        if self.band == 1 {
            (0.0, f64::INFINITY)
        } else {
            let m = f64::from(self.band);
            (-m + 1.0, -m + 2.0)
        }
    }

    /// Half-open membership `[x0,x1) x [y0,y1)`, matching the lookup rule.
    pub fn contains(&self, p: Point) -> bool {
        let (y0, y1) = self.y_range();
        p[0] >= qf(self.x0) && p[0] < qf(self.x1) && p[1] >= y0 && p[1] < y1
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Zero {
    Point(#[serde(serialize_with = "ser_q")] Q),
    Interval(
        #[serde(serialize_with = "ser_q")] Q,
        #[serde(serialize_with = "ser_q")] Q,
    ),
}

/// Zero set of a bump function on `[-1,1]`, in block-local coordinates.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KappaZeros {
    pub zeros: Vec<Zero>,
    #[serde(skip)]
    gaps: Vec<(f64, f64)>,
}

impl KappaZeros {
    fn new(zeros: Vec<Zero>) -> Self {
        let mut bounds: Vec<(Q, Q)> = zeros
            .iter()
            .map(|z| match z {
                Zero::Point(a) => (*a, *a),
                Zero::Interval(a, b) => (*a, *b),
            })
            .collect();
        bounds.sort();
        let gaps = bounds
            .windows(2)
            .filter(|w| w[0].1 < w[1].0)
            .map(|w| (qf(w[0].1), qf(w[1].0)))
            .collect();
        KappaZeros { zeros, gaps }
    }

    /// Open gaps between consecutive zeros, left to right.
    pub fn gaps(&self) -> &[(f64, f64)] {
        &self.gaps
    }

    /// Exact gaps, left to right.
    pub fn exact_gaps(&self) -> Vec<(Q, Q)> {
        let mut bounds: Vec<(Q, Q)> = self
            .zeros
            .iter()
            .map(|z| match z {
                Zero::Point(a) => (*a, *a),
                Zero::Interval(a, b) => (*a, *b),
            })
            .collect();
        bounds.sort();
        bounds
            .windows(2)
            .filter(|w| w[0].1 < w[1].0)
            .map(|w| (w[0].1, w[1].0))
            .collect()
    }
}

/// `sin^2` bump on each open gap, zero on the zero set.
pub fn kappa_eval(zeros: &KappaZeros, x: f64) -> f64 {
    let gaps = &zeros.gaps;
    let idx = gaps.partition_point(|g| g.1 <= x);
    match gaps.get(idx) {
        Some(&(a, b)) if a < x && x < b => {
            let s = (PI * (x - a) / (b - a)).sin();
            s * s
        }
        _ => 0.0,
    }
}

fn f_zeros(s: u32, j: u32) -> KappaZeros {
    let mut zeros = Vec::new();
    if s == 0 {
        zeros.push(Zero::Interval(q(-1, 1), q(0, 1)));
    } else {
        zeros.extend((0..=s).map(|k| Zero::Point(q(-(k as i128), s as i128))));
    }
    if s == j {
        zeros.push(Zero::Interval(q(0, 1), q(1, 1)));
    } else {
        zeros.extend((0..=j - s).map(|k| Zero::Point(q(k as i128, (j - s) as i128))));
    }
    KappaZeros::new(zeros)
}

fn g_zeros(r: u32, s: u32, j: u32) -> KappaZeros {
    let mut zeros = Vec::new();
    if r == 0 {
        zeros.push(Zero::Interval(q(-1, 1), q(-1, 2)));
    } else {
        zeros.extend((0..=r).map(|k| Zero::Point(q(-1, 1) + q(k as i128, 2 * r as i128))));
    }
    if r == s {
        zeros.push(Zero::Interval(q(-1, 2), q(1, 2)));
    } else {
        zeros.extend((0..=s - r).map(|k| Zero::Point(q(-1, 2) + q(k as i128, (s - r) as i128))));
    }
    if s == j {
        zeros.push(Zero::Interval(q(1, 2), q(1, 1)));
    } else {
        zeros.extend((0..=j - s).map(|k| Zero::Point(q(1, 2) + q(k as i128, 2 * (j - s) as i128))));
    }
    KappaZeros::new(zeros)
}

/// The invariant horizontal segment of a key of length `m >= 2`:
/// `I_v x {-m+2}`, with the direction of the flow on it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitLine {
    pub key: VecKey,
    #[serde(serialize_with = "ser_q")]
    pub x0: Q,
    #[serde(serialize_with = "ser_q")]
    pub x1: Q,
    pub level: i64,
    pub rightward: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockLayout {
    pub t: u32,
    pub n: u32,
    pub blocks: Vec<BlockSpec>,
    pub orbit_lines: Vec<OrbitLine>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StripField {
    pub layout: BlockLayout,
    /// Per block, same order as `layout.blocks`.
    pub kappa: Vec<KappaZeros>,
    /// Block indices per band (index 0 is the F semiband row), sorted by x.
    #[serde(skip)]
    rows: Vec<Vec<usize>>,
}

pub fn build_block_layout(l: &FeasibleSet) -> StripField {
    let t = l.t();
    let n = l.n() as u32;
    let mut blocks = Vec::new();
    let mut kappa = Vec::new();
    let mut lines = Vec::new();
    // pending keys for the next band: (key, interval, rightward)
    let mut pending: Vec<(VecKey, Q, Q, bool)> = Vec::new();

    for i in 1..=t {
        let key = VecKey::root(i);
        let (s, j) = (l.sigma(&key), l.lambda(&key));
        let zeros = f_zeros(s, j);
        let base = q(i as i128 - 1, 1);
        for (k, (a, b)) in zeros.exact_gaps().into_iter().enumerate() {
            let k = k as u32 + 1;
            // local x = 2x - 2i + 1
            let to_global = |u: Q| base + (u + q(1, 1)) / q(2, 1);
            pending.push((key.child(k), to_global(a), to_global(b), k <= s));
        }
        blocks.push(BlockSpec {
            kind: BlockKind::F { s, j },
            x0: base,
            x1: base + q(1, 1),
            band: 1,
            key: Some(key),
        });
        kappa.push(zeros);
    }

    for m in 2..=n {
        let mut row: Vec<(BlockSpec, KappaZeros)> = Vec::new();
        let mut next = Vec::new();
        for (key, a, b, rightward) in pending.drain(..) {
            let (r, s, j) = (l.rho(&key), l.sigma(&key), l.lambda(&key));
            let zeros = g_zeros(r, s, j);
            let to_global = |u: Q| a + (u + q(1, 1)) * (b - a) / q(2, 1);
            for (k, (ga, gb)) in zeros.exact_gaps().into_iter().enumerate() {
                let k = k as u32 + 1;
                let same = r < k && k <= s;
                next.push((key.child(k), to_global(ga), to_global(gb), rightward == same));
            }
            lines.push(OrbitLine {
                key: key.clone(),
                x0: a,
                x1: b,
                level: -(m as i64) + 2,
                rightward,
            });
            let kind = if rightward {
                BlockKind::GPlus { r, s, j }
            } else {
                BlockKind::GMinus { r, s, j }
            };
            row.push((
                BlockSpec {
                    kind,
                    x0: a,
                    x1: b,
                    band: m,
                    key: Some(key),
                },
                zeros,
            ));
        }
        row.sort_by_key(|x| x.0.x0);
        // null blocks on the complement
        let mut filled: Vec<(BlockSpec, KappaZeros)> = Vec::new();
        let mut cursor = q(0, 1);
        for (spec, z) in row {
            if cursor < spec.x0 {
                filled.push((null_block(cursor, spec.x0, m), KappaZeros::new(Vec::new())));
            }
            cursor = spec.x1;
            filled.push((spec, z));
        }
        if cursor < q(t as i128, 1) {
            filled.push((
                null_block(cursor, q(t as i128, 1), m),
                KappaZeros::new(Vec::new()),
            ));
        }
        for (spec, z) in filled {
            blocks.push(spec);
            kappa.push(z);
        }
        pending = next;
    }
    debug_assert!(pending.iter().all(|(k, ..)| !l.base().contains(k)));

    let mut rows = vec![Vec::new(); n as usize];
    for (idx, b) in blocks.iter().enumerate() {
        rows[b.band as usize - 1].push(idx);
    }
    StripField {
        layout: BlockLayout {
            t,
            n,
            blocks,
            orbit_lines: lines,
        },
        kappa,
        rows,
    }
}

fn null_block(x0: Q, x1: Q, band: u32) -> BlockSpec {
    BlockSpec {
        kind: BlockKind::Null,
        x0,
        x1,
        band,
        key: None,
    }
}

/// `f(x,y) = (x(x^2-1), -y)`.
pub fn f_base(x: f64, y: f64) -> Point {
    [x * (x * x - 1.0), -y]
}

/// `g(x,y) = ((x^2-1)(x^2-(1-(1-y)^2/2)^2), y(y-1)x)`.
pub fn g_base(x: f64, y: f64) -> Point {
    let c = 1.0 - (1.0 - y) * (1.0 - y) / 2.0;
    [(x * x - 1.0) * (x * x - c * c), y * (y - 1.0) * x]
}

impl StripField {
    pub fn t(&self) -> u32 {
        self.layout.t
    }

    pub fn n(&self) -> u32 {
        self.layout.n
    }

    /// Index of the block containing `p` (x taken mod t), or `None` below
    /// the singular line.
    pub fn locate(&self, p: Point) -> Option<usize> {
        let t = f64::from(self.layout.t);
        let x = p[0].rem_euclid(t);
        let y = p[1];
        let band = if y >= 0.0 {
            1
        } else {
            let m = (-y).ceil() as i64 + 1;
            if m > i64::from(self.layout.n) {
                return None;
            }
            m as usize
        };
        let row = &self.rows[band - 1];
        let pos = row.partition_point(|&b| qf(self.layout.blocks[b].x0) <= x);
        Some(row[pos.max(1) - 1])
    }

    /// Block-local coordinates of `p` in block `idx`.
    pub fn local(&self, idx: usize, p: Point) -> Point {
        let b = &self.layout.blocks[idx];
        let t = f64::from(self.layout.t);
        let x = p[0].rem_euclid(t);
        let (a, c) = (qf(b.x0), qf(b.x1));
        let xl = (2.0 * x - a - c) / (c - a);
        let yl = if b.band == 1 {
            p[1]
        } else {
            p[1] + f64::from(b.band) - 1.0
        };
        [xl, yl]
    }

    pub fn eval(&self, p: Point) -> Point {
        let Some(idx) = self.locate(p) else {
            return [0.0, 0.0];
        };
        let [x, y] = self.local(idx, p);
        let kappa = kappa_eval(&self.kappa[idx], x);
        match self.layout.blocks[idx].kind {
            BlockKind::F { .. } => {
                let f = f_base(x, y);
                let m = kappa + y * y;
                [m * f[0], m * f[1]]
            }
            BlockKind::GPlus { .. } | BlockKind::GMinus { .. } => {
                let g = g_base(x, y);
                let mut m = (kappa + y * y) * (1.0 - x * x);
                if matches!(self.layout.blocks[idx].kind, BlockKind::GMinus { .. }) {
                    m = -m;
                }
                [m * g[0], m * g[1]]
            }
            BlockKind::Null => [0.0, 0.0],
        }
    }

    /// Exact tiling check of `[0,t] x [-n+1, inf)`: each row of blocks is a
    /// gapless, non-overlapping partition of `[0,t]`. Returns the total area
    /// below `ymax` on success.
    pub fn check_tiling(&self, ymax: i128) -> Result<Q, String> {
        let t = q(self.layout.t as i128, 1);
        let mut area = q(0, 1);
        for (band, row) in self.rows.iter().enumerate() {
            let mut cursor = q(0, 1);
            for &b in row {
                let spec = &self.layout.blocks[b];
                if spec.x0 != cursor {
                    return Err(format!(
                        "band {}: block at {} does not start at {}",
                        band + 1,
                        spec.x0,
                        cursor
                    ));
                }
                if spec.x1 <= spec.x0 {
                    return Err(format!("band {}: empty block at {}", band + 1, spec.x0));
                }
                let height = if band == 0 { q(ymax, 1) } else { q(1, 1) };
                area += (spec.x1 - spec.x0) * height;
                cursor = spec.x1;
            }
            if cursor != t {
                return Err(format!("band {} ends at {} instead of {}", band + 1, cursor, t));
            }
        }
        let expected = t * q(ymax + self.layout.n as i128 - 1, 1);
        if area != expected {
            return Err(format!("area {area} differs from {expected}"));
        }
        Ok(area)
    }
}

impl DirectionField for StripField {
    fn eval(&self, p: Point) -> Point {
        StripField::eval(self, p)
    }
}

/// `Xi(x, y) = e^y (cos 2 pi x / t, sin 2 pi x / t)`.
pub fn map_to_plane(t: u32, p: Point) -> Point {
    let r = p[1].exp();
    let th = 2.0 * PI * p[0] / f64::from(t);
    [r * th.cos(), r * th.sin()]
}

pub fn eval_strip_field(field: &StripField, p: Point) -> Point {
    field.eval(p)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PortraitOptions {
    pub samples_per_block: usize,
    pub step: f64,
    pub max_arc_length: f64,
    pub ymax: f64,
    pub seed: u64,
}

impl Default for PortraitOptions {
    fn default() -> Self {
        PortraitOptions {
            samples_per_block: 4,
            step: 1e-3,
            max_arc_length: 12.0,
            ymax: 3.0,
            seed: 7,
        }
    }
}

struct Seed {
    id: String,
    class: PolylineClass,
    start: Point,
    forward: f64,
    backward: f64,
}

fn trace(field: &StripField, seed: &Seed, opts: &PortraitOptions) -> Result<Trajectory, DynamicsError> {
    let top = [EventSpec::LineCross {
        a: 0.0,
        b: 1.0,
        c: -opts.ymax,
        filter: CrossingFilter::Increasing,
    }];
    let run = |budget: f64, backward: bool| -> Result<Option<Trajectory>, DynamicsError> {
        if budget <= 0.0 {
            return Ok(None);
        }
        let o = Integration::new(opts.step, budget, &top);
        Ok(Some(if backward {
            integrate(&Reversed(field), seed.start, &o)?
        } else {
            integrate(field, seed.start, &o)?
        }))
    };
    let fwd = run(seed.forward, false)?;
    let bwd = run(seed.backward, true)?;
    let mut vertices: Vec<Point> = Vec::new();
    let mut arc = 0.0;
    let mut termination = crate::dynamics::Termination::BudgetExhausted;
    if let Some(b) = bwd {
        vertices.extend(b.vertices.iter().rev());
        arc += b.arc_length;
        termination = b.termination;
    }
    if let Some(f) = fwd {
        let skip = usize::from(!vertices.is_empty());
        vertices.extend(f.vertices.iter().skip(skip));
        arc += f.arc_length;
        termination = f.termination;
    }
    Ok(Trajectory {
        vertices,
        arc_length: arc,
        termination,
    })
}

/// Integrates skeleton and sample orbits of the synthesized field and maps
/// them to the plane.
pub fn render_portrait(l: &FeasibleSet, opts: &PortraitOptions) -> Result<PortraitDoc, DynamicsError> {
    if !(opts.step > 0.0 && opts.max_arc_length > 0.0 && opts.ymax > 0.0) {
        return Err(DynamicsError::InvalidParameters(
            "step, arc length and ymax must be positive".into(),
        ));
    }
    let field = build_block_layout(l);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut seeds = Vec::new();
    let budget = opts.max_arc_length;

    for i in 1..=l.t() {
        let key = VecKey::root(i);
        let x = f64::from(i);
        seeds.push(Seed {
            id: orbit_id(&key, false),
            class: PolylineClass::Separatrix,
            start: [x, opts.ymax],
            forward: opts.ymax,
            backward: 0.0,
        });
        seeds.push(Seed {
            id: orbit_id(&key, true),
            class: PolylineClass::Representative,
            start: [x - 0.5, opts.ymax],
            forward: opts.ymax,
            backward: 0.0,
        });
    }
    for line in &field.layout.orbit_lines {
        let (a, b) = (qf(line.x0), qf(line.x1));
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let level = line.level as f64;
        let (fw, bw) = (half, half);
        seeds.push(Seed {
            id: orbit_id(&line.key, false),
            class: PolylineClass::Separatrix,
            start: [mid, level],
            forward: fw,
            backward: bw,
        });
        seeds.push(Seed {
            id: orbit_id(&line.key, true),
            class: PolylineClass::Representative,
            start: [mid, level - 0.5],
            forward: budget,
            backward: budget,
        });
    }
    for (idx, block) in field.layout.blocks.iter().enumerate() {
        let (a, b) = (qf(block.x0), qf(block.x1));
        let w = b - a;
        for k in 0..opts.samples_per_block {
            let u = (k as f64 + 0.5) / opts.samples_per_block as f64;
            let jitter: f64 = rng.gen_range(-0.2..0.2) / opts.samples_per_block as f64;
            let id = format!("g{idx}.{k}");
            match block.kind {
                BlockKind::F { .. } => seeds.push(Seed {
                    id,
                    class: PolylineClass::Generic,
                    start: [a + w * (u + jitter), opts.ymax],
                    forward: budget,
                    backward: 0.0,
                }),
                BlockKind::GPlus { .. } | BlockKind::GMinus { .. } => {
                    let y0 = -f64::from(block.band) + 1.0;
                    let xl: f64 = rng.gen_range(-0.3..0.3);
                    seeds.push(Seed {
                        id,
                        class: PolylineClass::Generic,
                        start: [a + w * (xl + 1.0) / 2.0, y0 + (u + jitter).clamp(0.02, 0.98)],
                        forward: budget,
                        backward: budget,
                    });
                }
                BlockKind::Null => {}
            }
        }
    }

    #[cfg(feature = "parallel")]
    let traced: Vec<Result<Trajectory, DynamicsError>> = {
        use rayon::prelude::*;
        seeds.par_iter().map(|s| trace(&field, s, opts)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let traced: Vec<Result<Trajectory, DynamicsError>> =
        seeds.iter().map(|s| trace(&field, s, opts)).collect();

    let t = l.t();
    let mut labelled = Vec::with_capacity(seeds.len());
    for (seed, tr) in seeds.iter().zip(traced) {
        let mut tr = tr?;
        tr.vertices = tr.vertices.iter().map(|p| map_to_plane(t, *p)).collect();
        labelled.push(LabelledTrajectory {
            id: seed.id.clone(),
            class: seed.class,
            trajectory: tr,
        });
    }
    let meta = serde_json::json!({
        "feasible_set": l.to_string(),
        "t": t,
        "n": l.n(),
        "options": opts,
        "seed": opts.seed,
        "note": "pre-quotient flow on the punctured plane; the shaded disk is the singular set that collapses to the attractor",
    });
    let mut doc = export_portrait(&labelled, meta);
    doc.singular_radius = (-(f64::from(field.n()) - 1.0)).exp();
    doc.view = opts.ymax.exp();
    Ok(doc)
}

/// Direction of the flow on each gap orbit as prescribed by the markers,
/// keyed by the child key: `true` is rightward.
pub fn prescribed_directions(l: &FeasibleSet) -> Vec<(VecKey, bool)> {
    let mut out = Vec::new();
    let mut dir: std::collections::BTreeMap<VecKey, bool> = Default::default();
    for key in l.base().keys() {
        match key.parent() {
            None => {}
            Some(parent) if parent.len() == 1 => {
                let d = key.last() <= l.sigma(&parent);
                dir.insert(key.clone(), d);
                out.push((key.clone(), d));
            }
            Some(parent) => {
                let j = key.last();
                let same = l.rho(&parent) < j && j <= l.sigma(&parent);
                let d = dir[&parent] == same;
                dir.insert(key.clone(), d);
                out.push((key.clone(), d));
            }
        }
    }
    out
}
