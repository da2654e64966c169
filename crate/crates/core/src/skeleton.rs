//! Separatrix-skeleton configurations: cyclic words of alpha/omega marks on a
//! small circle around the attractor, their validation, the extraction of the
//! canonical feasible set, and the equivalence decision.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::feasible::{
    compare_lex, validate_complete, validate_feasible, EndKind, Element, FeasibleSet, ThirdInt,
    VecKey,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SkeletonError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    SyntaxError {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("bad mark count: {0}")]
    BadMarkCount(String),
    #[error("homoclinic orbits {0} and {1} cross")]
    CrossingChords(String, String),
    #[error("heteroclinic orbit {0} lies inside a homoclinic loop")]
    HetInsideHom(String),
    #[error("missing representative: {0}")]
    MissingRepresentative(String),
    #[error("extra representative: {0}")]
    ExtraRepresentative(String),
    #[error("representative {0} is not enclosed by any homoclinic separatrix")]
    MisplacedRepresentative(String),
    #[error("no homoclinic separatrix: the attractor is positively stable (trivial case)")]
    TrivialCase,
    #[error("{0} is not a heteroclinic separatrix of the configuration")]
    NotHeteroclinic(String),
    #[error("configuration is not realizable: {0}")]
    NonRealizable(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarkClass {
    HetSep,
    HomSep,
    HetRep,
    HomRep,
}

impl MarkClass {
    pub fn is_heteroclinic(self) -> bool {
        matches!(self, MarkClass::HetSep | MarkClass::HetRep)
    }

    pub fn is_separatrix(self) -> bool {
        matches!(self, MarkClass::HetSep | MarkClass::HomSep)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Mark {
    pub orbit: String,
    pub end: EndKind,
    pub class: MarkClass,
}

impl Mark {
    pub fn new(orbit: impl Into<String>, end: EndKind, class: MarkClass) -> Self {
        Mark {
            orbit: orbit.into(),
            end,
            class,
        }
    }
}

impl fmt::Display for Mark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let class = match self.class {
            MarkClass::HetSep => "HetSep",
            MarkClass::HomSep => "HomSep",
            MarkClass::HetRep => "HetRep",
            MarkClass::HomRep => "HomRep",
        };
        let end = match self.end {
            EndKind::Alpha => "A",
            EndKind::Omega => "W",
        };
        write!(f, "{class}{end}({})", self.orbit)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrientationChoice {
    Ccw,
    Cw,
}

impl OrientationChoice {
    pub const BOTH: [OrientationChoice; 2] = [OrientationChoice::Ccw, OrientationChoice::Cw];
}

impl fmt::Display for OrientationChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OrientationChoice::Ccw => "ccw",
            OrientationChoice::Cw => "cw",
        })
    }
}

impl std::str::FromStr for OrientationChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ccw" => Ok(OrientationChoice::Ccw),
            "cw" => Ok(OrientationChoice::Cw),
            _ => Err(format!("unknown orientation {s:?} (expected ccw or cw)")),
        }
    }
}

/// A validated cyclic word of marks, stored counterclockwise from an
/// arbitrary anchor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Configuration {
    marks: Vec<Mark>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigDoc {
    marks: Vec<Mark>,
}

pub fn parse_configuration(text: &str) -> Result<Configuration, SkeletonError> {
    let doc: ConfigDoc = serde_json::from_str(text).map_err(|e| SkeletonError::SyntaxError {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    Configuration::new(doc.marks)
}

impl Configuration {
    /// Validates all structural invariants of a mark word.
    pub fn new(marks: Vec<Mark>) -> Result<Self, SkeletonError> {
        check_orbits(&marks)?;
        if !marks.iter().any(|m| m.class == MarkClass::HetSep) {
            return Err(SkeletonError::BadMarkCount(
                "no heteroclinic separatrix in the configuration".into(),
            ));
        }
        if !marks.iter().any(|m| m.class == MarkClass::HomSep) {
            return Err(SkeletonError::TrivialCase);
        }
        check_crossings(&marks)?;
        let first_sep = marks
            .iter()
            .position(|m| m.class == MarkClass::HetSep)
            .expect("checked above");
        let linear = rotate_to_end(&marks, first_sep);
        check_het_outside(&linear)?;
        Analysis::build(&linear)?;
        Ok(Configuration { marks })
    }

    pub fn marks(&self) -> &[Mark] {
        &self.marks
    }

    pub fn len(&self) -> usize {
        self.marks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.marks.is_empty()
    }

    /// Heteroclinic separatrices in stored anchor order.
    pub fn het_separatrices(&self) -> Vec<&str> {
        self.marks
            .iter()
            .filter(|m| m.class == MarkClass::HetSep)
            .map(|m| m.orbit.as_str())
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ConfigDoc {
            marks: self.marks.clone(),
        })
        .expect("plain data serializes")
    }

    /// The same cyclic word read from a different anchor.
    pub fn rotated(&self, k: usize) -> Configuration {
        let mut marks = self.marks.clone();
        if !marks.is_empty() {
            let k = k % marks.len();
            marks.rotate_left(k);
        }
        Configuration { marks }
    }

    /// Orientation flip: the cyclic word reversed, marks unchanged.
    pub fn mirrored(&self) -> Configuration {
        let mut marks = self.marks.clone();
        marks.reverse();
        Configuration { marks }
    }

    /// Renames orbits; `rename` must be injective on the orbit ids.
    pub fn relabelled<F: Fn(&str) -> String>(&self, rename: F) -> Configuration {
        let marks = self
            .marks
            .iter()
            .map(|m| Mark::new(rename(&m.orbit), m.end, m.class))
            .collect();
        Configuration { marks }
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.marks.iter().map(Mark::to_string).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

fn rotate_to_end(marks: &[Mark], last: usize) -> Vec<Mark> {
    let mut out = marks.to_vec();
    out.rotate_left((last + 1) % marks.len());
    out
}

fn check_orbits(marks: &[Mark]) -> Result<(), SkeletonError> {
    let mut seen: BTreeMap<&str, Vec<&Mark>> = BTreeMap::new();
    for m in marks {
        seen.entry(m.orbit.as_str()).or_default().push(m);
    }
    for (orbit, ms) in seen {
        let class = ms[0].class;
        if ms.iter().any(|m| m.class != class) {
            return Err(SkeletonError::BadMarkCount(format!(
                "orbit {orbit} carries marks of different classes"
            )));
        }
        let alphas = ms.iter().filter(|m| m.end == EndKind::Alpha).count();
        let omegas = ms.len() - alphas;
        let ok = if class.is_heteroclinic() {
            alphas == 0 && omegas == 1
        } else {
            alphas == 1 && omegas == 1
        };
        if !ok {
            return Err(SkeletonError::BadMarkCount(format!(
                "orbit {orbit} has {alphas} alpha and {omegas} omega marks"
            )));
        }
    }
    Ok(())
}

fn check_crossings(marks: &[Mark]) -> Result<(), SkeletonError> {
    let mut open: Vec<&str> = Vec::new();
    let mut closed: HashMap<&str, bool> = HashMap::new();
    for m in marks.iter().filter(|m| !m.class.is_heteroclinic()) {
        let id = m.orbit.as_str();
        if closed.insert(id, true).is_none() {
            open.push(id);
            continue;
        }
        let top = open.pop().expect("second mark of an opened chord");
        if top != id {
            return Err(SkeletonError::CrossingChords(top.to_string(), id.to_string()));
        }
    }
    Ok(())
}

/// `marks` must end with a heteroclinic separatrix.
fn check_het_outside(marks: &[Mark]) -> Result<(), SkeletonError> {
    let mut depth = 0usize;
    let mut opened: HashMap<&str, ()> = HashMap::new();
    for m in marks {
        if m.class.is_heteroclinic() {
            if depth > 0 {
                return Err(SkeletonError::HetInsideHom(m.orbit.clone()));
            }
        } else if opened.insert(m.orbit.as_str(), ()).is_none() {
            depth += 1;
        } else {
            depth -= 1;
        }
    }
    Ok(())
}

/// A homoclinic separatrix with its positions on the linear word.
#[derive(Clone, Debug)]
struct HomChord {
    orbit: String,
    lo: usize,
    hi: usize,
    rep: (String, usize, usize),
    children: Vec<HomChord>,
}

#[derive(Clone, Debug)]
struct SectorInfo {
    sep: String,
    sep_pos: usize,
    rep: (String, usize),
    roots: Vec<HomChord>,
}

/// The nesting structure of a linear word whose last mark is a HetSep.
/// Building it checks the representative counts.
struct Analysis {
    sectors: Vec<SectorInfo>,
}

impl Analysis {
    fn build(marks: &[Mark]) -> Result<Analysis, SkeletonError> {
        debug_assert_eq!(marks.last().map(|m| m.class), Some(MarkClass::HetSep));
        // chord spans
        let mut span: HashMap<&str, (usize, usize)> = HashMap::new();
        for (p, m) in marks.iter().enumerate() {
            if !m.class.is_heteroclinic() {
                span.entry(m.orbit.as_str())
                    .and_modify(|s| s.1 = p)
                    .or_insert((p, p));
            }
        }

        // nearest enclosing HomSep of each hom chord, via a stack scan
        let mut parent: HashMap<&str, Option<&str>> = HashMap::new();
        let mut stack: Vec<&Mark> = Vec::new();
        for (p, m) in marks.iter().enumerate() {
            if m.class.is_heteroclinic() {
                continue;
            }
            let id = m.orbit.as_str();
            if span[id].0 == p {
                let enclosing = stack
                    .iter()
                    .rev()
                    .find(|s| s.class == MarkClass::HomSep)
                    .map(|s| s.orbit.as_str());
                parent.insert(id, enclosing);
                stack.push(m);
            } else {
                stack.pop();
            }
        }

        let mut sep_children: HashMap<Option<&str>, Vec<&str>> = HashMap::new();
        let mut sep_reps: HashMap<&str, Vec<&str>> = HashMap::new();
        let mut seps_in_order: Vec<&str> = Vec::new();
        for (p, m) in marks.iter().enumerate() {
            let id = m.orbit.as_str();
            if m.class.is_heteroclinic() || span[id].0 != p {
                continue;
            }
            match m.class {
                MarkClass::HomSep => {
                    sep_children.entry(parent[id]).or_default().push(id);
                    seps_in_order.push(id);
                }
                MarkClass::HomRep => match parent[id] {
                    Some(p) => sep_reps.entry(p).or_default().push(id),
                    None => return Err(SkeletonError::MisplacedRepresentative(id.to_string())),
                },
                _ => unreachable!(),
            }
        }
        for sep in &seps_in_order {
            match sep_reps.get(sep).map(Vec::as_slice) {
                None | Some([]) => {
                    return Err(SkeletonError::MissingRepresentative(format!(
                        "homoclinic strip inside {sep}"
                    )))
                }
                Some([_]) => {}
                Some(more) => {
                    return Err(SkeletonError::ExtraRepresentative(format!(
                        "{} inside {sep}",
                        more.join(", ")
                    )))
                }
            }
        }

        fn node(
            id: &str,
            span: &HashMap<&str, (usize, usize)>,
            sep_children: &HashMap<Option<&str>, Vec<&str>>,
            sep_reps: &HashMap<&str, Vec<&str>>,
        ) -> HomChord {
            let (lo, hi) = span[id];
            let rep = sep_reps[id][0];
            let (rlo, rhi) = span[rep];
            let children = sep_children
                .get(&Some(id))
                .map(|cs| {
                    cs.iter()
                        .map(|c| node(c, span, sep_children, sep_reps))
                        .collect()
                })
                .unwrap_or_default();
            HomChord {
                orbit: id.to_string(),
                lo,
                hi,
                rep: (rep.to_string(), rlo, rhi),
                children,
            }
        }

        let roots: Vec<HomChord> = sep_children
            .get(&None)
            .map(|cs| {
                cs.iter()
                    .map(|c| node(c, &span, &sep_children, &sep_reps))
                    .collect()
            })
            .unwrap_or_default();

        let mut sectors = Vec::new();
        let mut lower = 0usize;
        let mut roots_iter = roots.into_iter().peekable();
        for (p, m) in marks.iter().enumerate() {
            if m.class != MarkClass::HetSep {
                continue;
            }
            let reps: Vec<(usize, &Mark)> = marks[lower..p]
                .iter()
                .enumerate()
                .filter(|(_, r)| r.class == MarkClass::HetRep)
                .map(|(q, r)| (q + lower, r))
                .collect();
            let rep = match reps.as_slice() {
                [] => {
                    return Err(SkeletonError::MissingRepresentative(format!(
                        "heteroclinic strip below {}",
                        m.orbit
                    )))
                }
                [(q, r)] => (r.orbit.clone(), *q),
                more => {
                    let names: Vec<&str> = more.iter().map(|(_, r)| r.orbit.as_str()).collect();
                    return Err(SkeletonError::ExtraRepresentative(format!(
                        "{} below {}",
                        names.join(", "),
                        m.orbit
                    )));
                }
            };
            let mut sector_roots = Vec::new();
            while let Some(r) = roots_iter.peek() {
                if r.hi < p {
                    sector_roots.push(roots_iter.next().expect("peeked"));
                } else {
                    break;
                }
            }
            sectors.push(SectorInfo {
                sep: m.orbit.clone(),
                sep_pos: p,
                rep,
                roots: sector_roots,
            });
            lower = p + 1;
        }
        Ok(Analysis { sectors })
    }
}

/// A homoclinic separatrix with its representative and nested separatrices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomNode {
    pub separatrix: String,
    pub representative: String,
    pub children: Vec<HomNode>,
}

/// A heteroclinic sector, bounded above by `separatrix` in stored order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SectorNode {
    pub separatrix: String,
    pub representative: String,
    pub roots: Vec<HomNode>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NestingTree {
    pub sectors: Vec<SectorNode>,
}

/// The containment forest of a configuration, read counterclockwise and cut
/// after the last heteroclinic separatrix in stored order.
pub fn nesting_tree(cfg: &Configuration) -> NestingTree {
    let last = cfg
        .marks
        .iter()
        .rposition(|m| m.class == MarkClass::HetSep)
        .expect("validated configuration");
    let linear = rotate_to_end(&cfg.marks, last);
    let analysis = Analysis::build(&linear).expect("validated configuration");
    fn convert(c: &HomChord) -> HomNode {
        HomNode {
            separatrix: c.orbit.clone(),
            representative: c.rep.0.clone(),
            children: c.children.iter().map(convert).collect(),
        }
    }
    NestingTree {
        sectors: analysis
            .sectors
            .iter()
            .map(|s| SectorNode {
                separatrix: s.sep.clone(),
                representative: s.rep.0.clone(),
                roots: s.roots.iter().map(convert).collect(),
            })
            .collect(),
    }
}

/// Extracts the canonical feasible set for orientation `theta`, cutting the
/// circle right after the omega-point of `sigma_orbit`.
pub fn canonical_feasible_set(
    cfg: &Configuration,
    theta: OrientationChoice,
    sigma_orbit: &str,
) -> Result<FeasibleSet, SkeletonError> {
    let mut word = cfg.marks.clone();
    if theta == OrientationChoice::Cw {
        word.reverse();
    }
    let q = word
        .iter()
        .position(|m| m.orbit == sigma_orbit && m.class == MarkClass::HetSep)
        .ok_or_else(|| SkeletonError::NotHeteroclinic(sigma_orbit.to_string()))?;
    let arc = rotate_to_end(&word, q);
    extract(&arc)
}

fn extract(arc: &[Mark]) -> Result<FeasibleSet, SkeletonError> {
    let analysis = Analysis::build(arc)?;
    let mut keys = Vec::new();
    let mut rho = BTreeMap::new();
    let mut sigma = BTreeMap::new();
    // position -> (key, which element); resolved to elements once lambda is known
    let mut slots: Vec<Option<(VecKey, Slot)>> = vec![None; arc.len()];

    fn below(children: &[HomChord], pos: usize) -> u32 {
        children.iter().filter(|c| c.hi < pos).count() as u32
    }

    fn walk(
        key: VecKey,
        chord: &HomChord,
        keys: &mut Vec<VecKey>,
        rho: &mut BTreeMap<VecKey, u32>,
        sigma: &mut BTreeMap<VecKey, u32>,
        slots: &mut [Option<(VecKey, Slot)>],
    ) {
        let (_, x, y) = chord.rep;
        rho.insert(key.clone(), below(&chord.children, x));
        sigma.insert(key.clone(), below(&chord.children, y));
        slots[chord.lo] = Some((key.clone(), Slot::Zero));
        slots[chord.hi] = Some((key.clone(), Slot::LambdaPlusOne));
        slots[x] = Some((key.clone(), Slot::RhoThird));
        slots[y] = Some((key.clone(), Slot::SigmaTwoThirds));
        keys.push(key.clone());
        for (k, c) in chord.children.iter().enumerate() {
            walk(key.child(k as u32 + 1), c, keys, rho, sigma, slots);
        }
    }

    for (i, sector) in analysis.sectors.iter().enumerate() {
        let key = VecKey::root(i as u32 + 1);
        sigma.insert(key.clone(), below(&sector.roots, sector.rep.1));
        slots[sector.sep_pos] = Some((key.clone(), Slot::LambdaPlusOne));
        slots[sector.rep.1] = Some((key.clone(), Slot::SigmaTwoThirds));
        keys.push(key.clone());
        for (k, c) in sector.roots.iter().enumerate() {
            walk(key.child(k as u32 + 1), c, &mut keys, &mut rho, &mut sigma, &mut slots);
        }
    }

    let nonrealizable = |e: crate::feasible::FeasibleError| SkeletonError::NonRealizable(e.to_string());
    let base = validate_complete(keys).map_err(nonrealizable)?;
    let set = validate_feasible(base, rho, sigma).map_err(nonrealizable)?;

    let elements: Vec<Element> = slots
        .into_iter()
        .map(|s| {
            let (key, slot) = s.expect("every mark is assigned");
            let last = match slot {
                Slot::Zero => ThirdInt::ZERO,
                Slot::LambdaPlusOne => ThirdInt::from_integer(set.lambda(&key) + 1),
                Slot::RhoThird => ThirdInt::from_integer(set.rho(&key)).plus_one_third(),
                Slot::SigmaTwoThirds => ThirdInt::from_integer(set.sigma(&key)).plus_two_thirds(),
            };
            Element::new(key, last)
        })
        .collect();
    for pair in elements.windows(2) {
        let ord = compare_lex(&pair[0], &pair[1]).map_err(nonrealizable)?;
        if ord != std::cmp::Ordering::Less {
            return Err(SkeletonError::NonRealizable(format!(
                "mark order disagrees with the lexicographic order at {} / {}",
                pair[0], pair[1]
            )));
        }
    }
    let ends = set.classify_ends();
    for (mark, e) in arc.iter().zip(&elements) {
        if ends[e] != mark.end {
            return Err(SkeletonError::NonRealizable(format!(
                "direction of {} at element {} does not match the parity rule",
                mark.orbit, e
            )));
        }
    }
    Ok(set)
}

#[derive(Clone, Copy, Debug)]
enum Slot {
    Zero,
    LambdaPlusOne,
    RhoThird,
    SigmaTwoThirds,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub theta1: OrientationChoice,
    pub sigma1: String,
    pub theta2: OrientationChoice,
    pub sigma2: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Equivalence {
    pub equivalent: bool,
    pub witness: Option<Witness>,
}

fn all_canonical(
    cfg: &Configuration,
) -> Result<Vec<(OrientationChoice, String, FeasibleSet)>, SkeletonError> {
    let mut out = Vec::new();
    for theta in OrientationChoice::BOTH {
        for s in cfg.het_separatrices() {
            out.push((theta, s.to_string(), canonical_feasible_set(cfg, theta, s)?));
        }
    }
    Ok(out)
}

/// Decides topological equivalence by comparing canonical feasible sets over
/// every orientation and heteroclinic-separatrix choice on both sides.
/// Enumeration order: orientation (ccw, cw) then separatrix in anchor order,
/// first flow outermost; the first matching pair is the witness.
pub fn decide_equivalence(
    cfg1: &Configuration,
    cfg2: &Configuration,
) -> Result<Equivalence, SkeletonError> {
    let a = all_canonical(cfg1)?;
    let b = all_canonical(cfg2)?;
    for (theta1, sigma1, l1) in &a {
        for (theta2, sigma2, l2) in &b {
            if l1 == l2 {
                return Ok(Equivalence {
                    equivalent: true,
                    witness: Some(Witness {
                        theta1: *theta1,
                        sigma1: sigma1.clone(),
                        theta2: *theta2,
                        sigma2: sigma2.clone(),
                    }),
                });
            }
        }
    }
    Ok(Equivalence {
        equivalent: false,
        witness: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use EndKind::{Alpha as A, Omega as W};
    use MarkClass::*;

    pub(crate) fn elliptic_saddle() -> Configuration {
        Configuration::new(vec![
            Mark::new("gamma", A, HomSep),
            Mark::new("mu", A, HomRep),
            Mark::new("mu", W, HomRep),
            Mark::new("gamma", W, HomSep),
            Mark::new("nu", W, HetRep),
            Mark::new("sigma", W, HetSep),
        ])
        .unwrap()
    }

    fn elements(l: &FeasibleSet) -> Vec<String> {
        l.elements().iter().map(|e| e.to_string()).collect()
    }

    #[test]
    fn elliptic_saddle_ccw_is_simplest_set() {
        let l = canonical_feasible_set(&elliptic_saddle(), OrientationChoice::Ccw, "sigma").unwrap();
        assert_eq!(
            elements(&l),
            ["(1,1,0)", "(1,1,1/3)", "(1,1,2/3)", "(1,1,1)", "(1,5/3)", "(1,2)"]
        );
    }

    #[test]
    fn elliptic_saddle_cw_reverses_sigma() {
        let l = canonical_feasible_set(&elliptic_saddle(), OrientationChoice::Cw, "sigma").unwrap();
        assert_eq!(
            elements(&l),
            ["(1,2/3)", "(1,1,0)", "(1,1,1/3)", "(1,1,2/3)", "(1,1,1)", "(1,2)"]
        );
    }

    #[test]
    fn nesting_tree_of_elliptic_saddle() {
        let tree = nesting_tree(&elliptic_saddle());
        assert_eq!(tree.sectors.len(), 1);
        let s = &tree.sectors[0];
        assert_eq!((s.separatrix.as_str(), s.representative.as_str()), ("sigma", "nu"));
        assert_eq!(s.roots.len(), 1);
        assert_eq!(s.roots[0].separatrix, "gamma");
        assert_eq!(s.roots[0].representative, "mu");
        assert!(s.roots[0].children.is_empty());
    }

    #[test]
    fn crossing_chords_rejected() {
        let err = Configuration::new(vec![
            Mark::new("a", A, HomSep),
            Mark::new("b", A, HomSep),
            Mark::new("a", W, HomSep),
            Mark::new("b", W, HomSep),
            Mark::new("s", W, HetSep),
        ])
        .unwrap_err();
        assert_eq!(err, SkeletonError::CrossingChords("b".into(), "a".into()));
    }

    #[test]
    fn no_het_sep_rejected() {
        let err = Configuration::new(vec![
            Mark::new("g", A, HomSep),
            Mark::new("m", A, HomRep),
            Mark::new("m", W, HomRep),
            Mark::new("g", W, HomSep),
        ])
        .unwrap_err();
        assert!(matches!(err, SkeletonError::BadMarkCount(_)));
    }

    #[test]
    fn no_hom_sep_is_trivial() {
        let err = Configuration::new(vec![
            Mark::new("r", W, HetRep),
            Mark::new("s", W, HetSep),
        ])
        .unwrap_err();
        assert_eq!(err, SkeletonError::TrivialCase);
    }

    #[test]
    fn het_inside_loop_rejected() {
        let err = Configuration::new(vec![
            Mark::new("g", A, HomSep),
            Mark::new("m", A, HomRep),
            Mark::new("m", W, HomRep),
            Mark::new("r", W, HetRep),
            Mark::new("g", W, HomSep),
            Mark::new("s", W, HetSep),
        ])
        .unwrap_err();
        assert_eq!(err, SkeletonError::HetInsideHom("r".into()));
    }

    #[test]
    fn representative_counts() {
        let missing = Configuration::new(vec![
            Mark::new("g", A, HomSep),
            Mark::new("g", W, HomSep),
            Mark::new("r", W, HetRep),
            Mark::new("s", W, HetSep),
        ])
        .unwrap_err();
        assert!(matches!(missing, SkeletonError::MissingRepresentative(_)));
        let extra = Configuration::new(vec![
            Mark::new("g", A, HomSep),
            Mark::new("m", A, HomRep),
            Mark::new("m", W, HomRep),
            Mark::new("g", W, HomSep),
            Mark::new("r", W, HetRep),
            Mark::new("r2", W, HetRep),
            Mark::new("s", W, HetSep),
        ])
        .unwrap_err();
        assert!(matches!(extra, SkeletonError::ExtraRepresentative(_)));
        let misplaced = Configuration::new(vec![
            Mark::new("g", A, HomSep),
            Mark::new("m", A, HomRep),
            Mark::new("m", W, HomRep),
            Mark::new("g", W, HomSep),
            Mark::new("x", A, HomRep),
            Mark::new("x", W, HomRep),
            Mark::new("r", W, HetRep),
            Mark::new("s", W, HetSep),
        ])
        .unwrap_err();
        assert_eq!(misplaced, SkeletonError::MisplacedRepresentative("x".into()));
    }

    #[test]
    fn bad_mark_counts() {
        let err = Configuration::new(vec![
            Mark::new("g", A, HomSep),
            Mark::new("g", A, HomSep),
            Mark::new("s", W, HetSep),
        ])
        .unwrap_err();
        assert!(matches!(err, SkeletonError::BadMarkCount(_)));
        let err = Configuration::new(vec![Mark::new("s", A, HetSep)]).unwrap_err();
        assert!(matches!(err, SkeletonError::BadMarkCount(_)));
    }

    #[test]
    fn not_heteroclinic_sigma() {
        let cfg = elliptic_saddle();
        assert_eq!(
            canonical_feasible_set(&cfg, OrientationChoice::Ccw, "gamma"),
            Err(SkeletonError::NotHeteroclinic("gamma".into()))
        );
        assert_eq!(
            canonical_feasible_set(&cfg, OrientationChoice::Ccw, "nope"),
            Err(SkeletonError::NotHeteroclinic("nope".into()))
        );
    }

    #[test]
    fn wrong_direction_is_nonrealizable() {
        // the loop's alpha and omega swapped relative to its representative
        let err = Configuration::new(vec![
            Mark::new("gamma", W, HomSep),
            Mark::new("mu", A, HomRep),
            Mark::new("mu", W, HomRep),
            Mark::new("gamma", A, HomSep),
            Mark::new("nu", W, HetRep),
            Mark::new("sigma", W, HetSep),
        ])
        .map(|cfg| canonical_feasible_set(&cfg, OrientationChoice::Ccw, "sigma"));
        assert!(matches!(err, Ok(Err(SkeletonError::NonRealizable(_)))), "{err:?}");
    }

    #[test]
    fn json_round_trip_and_syntax_error() {
        let cfg = elliptic_saddle();
        assert_eq!(parse_configuration(&cfg.to_json()).unwrap(), cfg);
        let err = parse_configuration("{\n  \"marks\": [,]\n}").unwrap_err();
        assert!(matches!(err, SkeletonError::SyntaxError { line: 2, .. }), "{err:?}");
    }

    #[test]
    fn equivalence_under_rotation_relabel_and_mirror() {
        let cfg = elliptic_saddle();
        for k in 0..cfg.len() {
            let other = cfg.rotated(k).relabelled(|s| format!("x_{s}"));
            let eq = decide_equivalence(&cfg, &other).unwrap();
            assert!(eq.equivalent);
        }
        let eq = decide_equivalence(&cfg, &cfg.mirrored()).unwrap();
        let w = eq.witness.unwrap();
        assert_ne!(w.theta1, w.theta2);
    }
}
