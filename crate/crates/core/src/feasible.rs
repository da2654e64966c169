//! Feasible sets: complete bases of positive-integer vectors decorated with
//! the markers `rho` and `sigma`, plus the derived element list over thirds.
//!
//! A feasible set is stored as `(V, rho, sigma)`. Elements are always derived
//! from those three pieces, so an inconsistent element list cannot be built.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FeasibleError {
    #[error("the base is empty")]
    EmptyBase,
    #[error("invalid key {0:?}: keys are nonempty vectors of positive integers")]
    InvalidKey(Vec<u32>),
    #[error("key {key} is present but its prefix {missing} is not")]
    MissingPrefix { key: VecKey, missing: VecKey },
    #[error("key {key} requires its sibling {missing}")]
    MissingSibling { key: VecKey, missing: VecKey },
    #[error("no marker value given for key {0}")]
    MissingMarker(VecKey),
    #[error("marker value given for {0}, which is not a key that takes one")]
    UnexpectedMarker(String),
    #[error("rho/sigma out of range at key {0} (need 0 <= rho <= sigma <= lambda)")]
    RhoSigmaOutOfRange(VecKey),
    #[error("the base has no vector of length two")]
    NoLengthTwoKey,
    #[error("({i},{lambda_plus}) and ({next},2/3) both belong to the set")]
    ConditionIII {
        i: u32,
        next: u32,
        lambda_plus: ThirdInt,
    },
    #[error("({key},1/3), ({key},5/3), ({key},1,1/3) and ({key},1,{last}) all belong to the set")]
    ConditionIV { key: VecKey, last: ThirdInt },
    #[error("element {shorter} is a strict prefix of element {longer}")]
    PrefixTie { shorter: String, longer: String },
    #[error("element list inconsistent with the markers: {0}")]
    ElementMismatch(String),
    #[error("cannot parse {0:?}")]
    Parse(String),
    #[error("invalid feasible-set JSON: {0}")]
    Json(String),
}

/// A number `n/3` with `n >= 0`, stored by its numerator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ThirdInt(u32);

impl ThirdInt {
    pub const ZERO: ThirdInt = ThirdInt(0);

    pub const fn from_thirds(numerator: u32) -> Self {
        ThirdInt(numerator)
    }

    pub const fn from_integer(k: u32) -> Self {
        ThirdInt(3 * k)
    }

    pub const fn thirds(self) -> u32 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 3.0
    }

    pub const fn is_integer(self) -> bool {
        self.0.is_multiple_of(3)
    }

    pub const fn plus_one(self) -> Self {
        ThirdInt(self.0 + 3)
    }

    pub const fn plus_one_third(self) -> Self {
        ThirdInt(self.0 + 1)
    }

    pub const fn plus_two_thirds(self) -> Self {
        ThirdInt(self.0 + 2)
    }
}

impl fmt::Display for ThirdInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 3)
        } else {
            write!(f, "{}/3", self.0)
        }
    }
}

impl FromStr for ThirdInt {
    type Err = FeasibleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || FeasibleError::Parse(s.to_string());
        match s.split_once('/') {
            Some((num, den)) => {
                let num: u32 = num.trim().parse().map_err(|_| bad())?;
                let den: u32 = den.trim().parse().map_err(|_| bad())?;
                match den {
                    1 => Ok(ThirdInt(3 * num)),
                    3 => Ok(ThirdInt(num)),
                    _ => Err(bad()),
                }
            }
            None => s.parse::<u32>().map(ThirdInt::from_integer).map_err(|_| bad()),
        }
    }
}

/// A nonempty vector of positive integers, ordered lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VecKey(Vec<u32>);

impl VecKey {
    pub fn new(entries: Vec<u32>) -> Result<Self, FeasibleError> {
        if entries.is_empty() || entries.contains(&0) {
            return Err(FeasibleError::InvalidKey(entries));
        }
        Ok(VecKey(entries))
    }

    pub fn root(i: u32) -> Self {
        assert!(i >= 1, "key entries are positive");
        VecKey(vec![i])
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn first(&self) -> u32 {
        self.0[0]
    }

    pub fn last(&self) -> u32 {
        self.0[self.0.len() - 1]
    }

    pub fn child(&self, j: u32) -> VecKey {
        assert!(j >= 1, "key entries are positive");
        let mut entries = self.0.clone();
        entries.push(j);
        VecKey(entries)
    }

    pub fn parent(&self) -> Option<VecKey> {
        (self.0.len() > 1).then(|| VecKey(self.0[..self.0.len() - 1].to_vec()))
    }

    /// Comma-joined form used as a JSON object key, e.g. `"1,2"`.
    pub fn encode(&self) -> String {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        parts.join(",")
    }

    pub fn decode(s: &str) -> Result<Self, FeasibleError> {
        let entries = s
            .split(',')
            .map(|p| p.trim().parse::<u32>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| FeasibleError::Parse(s.to_string()))?;
        VecKey::new(entries)
    }
}

impl Serialize for VecKey {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.encode())
    }
}

impl fmt::Display for VecKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.encode())
    }
}

/// A finite, nonempty, prefix- and sibling-closed set of keys.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompleteBase {
    keys: BTreeSet<VecKey>,
    lambda: BTreeMap<VecKey, u32>,
    top: u32,
}

/// Checks completeness and computes `lambda` for every key and for the empty
/// vector. Keys are scanned in lexicographic order and the first violation is
/// reported.
pub fn validate_complete<I>(keys: I) -> Result<CompleteBase, FeasibleError>
where
    I: IntoIterator<Item = VecKey>,
{
    let keys: BTreeSet<VecKey> = keys.into_iter().collect();
    if keys.is_empty() {
        return Err(FeasibleError::EmptyBase);
    }
    for key in &keys {
        let entries = key.entries();
        for m in 1..entries.len() {
            let prefix = VecKey(entries[..m].to_vec());
            if !keys.contains(&prefix) {
                return Err(FeasibleError::MissingPrefix {
                    key: key.clone(),
                    missing: prefix,
                });
            }
        }
        let stem = &entries[..entries.len() - 1];
        for i in 1..key.last() {
            let mut sibling = stem.to_vec();
            sibling.push(i);
            let sibling = VecKey(sibling);
            if !keys.contains(&sibling) {
                return Err(FeasibleError::MissingSibling {
                    key: key.clone(),
                    missing: sibling,
                });
            }
        }
    }

    let mut lambda: BTreeMap<VecKey, u32> = keys.iter().map(|k| (k.clone(), 0)).collect();
    let mut top = 0;
    for key in &keys {
        match key.parent() {
            Some(parent) => {
                let slot = lambda.get_mut(&parent).expect("prefix-closed");
                *slot = (*slot).max(key.last());
            }
            None => top = top.max(key.last()),
        }
    }
    Ok(CompleteBase { keys, lambda, top })
}

impl CompleteBase {
    pub fn keys(&self) -> impl Iterator<Item = &VecKey> {
        self.keys.iter()
    }

    pub fn contains(&self, key: &VecKey) -> bool {
        self.keys.contains(key)
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    /// `lambda(v)`: the number of children of `v`.
    pub fn lambda(&self, key: &VecKey) -> u32 {
        self.lambda[key]
    }

    /// `lambda` of the empty vector: the number of length-one keys.
    pub fn top(&self) -> u32 {
        self.top
    }

    pub fn max_len(&self) -> usize {
        self.keys.iter().map(VecKey::len).max().unwrap_or(0)
    }

    pub fn children(&self, key: &VecKey) -> impl Iterator<Item = VecKey> + '_ {
        let key = key.clone();
        (1..=self.lambda(&key)).map(move |j| key.child(j))
    }

    pub fn count_by_len(&self) -> Vec<usize> {
        let mut counts = vec![0; self.max_len()];
        for key in &self.keys {
            counts[key.len() - 1] += 1;
        }
        counts
    }
}

/// An element `(v, k)` of a feasible set: a key followed by a last entry in thirds.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Element {
    pub key: VecKey,
    pub last: ThirdInt,
}

impl Element {
    pub fn new(key: VecKey, last: ThirdInt) -> Self {
        Element { key, last }
    }

    /// All entries as numerators over 3.
    fn thirds(&self) -> impl Iterator<Item = u32> + '_ {
        self.key
            .entries()
            .iter()
            .map(|e| 3 * e)
            .chain(std::iter::once(self.last.thirds()))
    }

    pub fn len(&self) -> usize {
        self.key.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl Ord for Element {
    /// Componentwise numeric order. A strict prefix sorts first, but elements
    /// of one valid feasible set never stand in that relation.
    fn cmp(&self, other: &Self) -> Ordering {
        self.thirds().cmp(other.thirds())
    }
}

impl PartialOrd for Element {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.key.encode(), self.last)
    }
}

impl FromStr for Element {
    type Err = FeasibleError;

    /// Parses the printed form, e.g. `(1,1,2/3)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || FeasibleError::Parse(s.to_string());
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(bad)?;
        let parts: Vec<&str> = inner.split(',').collect();
        if parts.len() < 2 {
            return Err(bad());
        }
        let (head, last) = parts.split_at(parts.len() - 1);
        let entries = head
            .iter()
            .map(|p| p.trim().parse::<u32>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| bad())?;
        Ok(Element {
            key: VecKey::new(entries)?,
            last: last[0].parse()?,
        })
    }
}

/// Lexicographic comparison of two elements, treating a strict-prefix
/// relation as an error instead of guessing an order for it.
pub fn compare_lex(a: &Element, b: &Element) -> Result<Ordering, FeasibleError> {
    for (x, y) in a.thirds().zip(b.thirds()) {
        match x.cmp(&y) {
            Ordering::Equal => continue,
            other => return Ok(other),
        }
    }
    match a.len().cmp(&b.len()) {
        Ordering::Equal => Ok(Ordering::Equal),
        Ordering::Less => Err(FeasibleError::PrefixTie {
            shorter: a.to_string(),
            longer: b.to_string(),
        }),
        Ordering::Greater => Err(FeasibleError::PrefixTie {
            shorter: b.to_string(),
            longer: a.to_string(),
        }),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn flip(self) -> Self {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EndKind {
    Alpha,
    Omega,
}

/// A validated feasible set with base `V` and markers `rho`, `sigma`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeasibleSet {
    base: CompleteBase,
    rho: BTreeMap<VecKey, u32>,
    sigma: BTreeMap<VecKey, u32>,
}

/// Checks every feasibility condition on `(base, rho, sigma)`.
///
/// `rho` must hold exactly the keys of length at least two and `sigma` every
/// key. Violations are reported in this order: marker coverage, marker
/// ranges, existence of a length-two key, the adjacent-representative
/// condition on consecutive length-one keys (cyclically), the nested
/// solid-strip condition, and finally the defensive prefix check.
pub fn validate_feasible(
    base: CompleteBase,
    rho: BTreeMap<VecKey, u32>,
    sigma: BTreeMap<VecKey, u32>,
) -> Result<FeasibleSet, FeasibleError> {
    for key in rho.keys() {
        if !base.contains(key) || key.len() < 2 {
            return Err(FeasibleError::UnexpectedMarker(format!("rho{key}")));
        }
    }
    for key in sigma.keys() {
        if !base.contains(key) {
            return Err(FeasibleError::UnexpectedMarker(format!("sigma{key}")));
        }
    }
    for key in base.keys() {
        let lambda = base.lambda(key);
        let s = *sigma
            .get(key)
            .ok_or_else(|| FeasibleError::MissingMarker(key.clone()))?;
        let r = if key.len() >= 2 {
            *rho.get(key)
                .ok_or_else(|| FeasibleError::MissingMarker(key.clone()))?
        } else {
            0
        };
        if r > s || s > lambda {
            return Err(FeasibleError::RhoSigmaOutOfRange(key.clone()));
        }
    }
    if base.max_len() < 2 {
        return Err(FeasibleError::NoLengthTwoKey);
    }

    let t = base.top();
    for i in 1..=t {
        let next = if i == t { 1 } else { i + 1 };
        let key = VecKey::root(i);
        let lambda = base.lambda(&key);
        if sigma[&key] == lambda && sigma[&VecKey::root(next)] == 0 {
            return Err(FeasibleError::ConditionIII {
                i,
                next,
                lambda_plus: ThirdInt::from_integer(lambda).plus_two_thirds(),
            });
        }
    }

    for key in base.keys().filter(|k| k.len() >= 2) {
        if base.lambda(key) != 1 {
            continue;
        }
        let child = key.child(1);
        if rho[key] == 0
            && sigma[key] == 1
            && rho[&child] == 0
            && sigma[&child] == base.lambda(&child)
        {
            return Err(FeasibleError::ConditionIV {
                key: key.clone(),
                last: ThirdInt::from_integer(base.lambda(&child)).plus_two_thirds(),
            });
        }
    }

    let set = FeasibleSet { base, rho, sigma };
    let elements = set.elements();
    for pair in elements.windows(2) {
        compare_lex(&pair[0], &pair[1])?;
    }
    Ok(set)
}

impl FeasibleSet {
    /// Convenience constructor from plain vectors.
    pub fn from_markers(
        keys: &[&[u32]],
        rho: &[(&[u32], u32)],
        sigma: &[(&[u32], u32)],
    ) -> Result<Self, FeasibleError> {
        let base = validate_complete(
            keys.iter()
                .map(|k| VecKey::new(k.to_vec()))
                .collect::<Result<Vec<_>, _>>()?,
        )?;
        let collect = |pairs: &[(&[u32], u32)]| -> Result<BTreeMap<VecKey, u32>, FeasibleError> {
            pairs
                .iter()
                .map(|(k, v)| Ok((VecKey::new(k.to_vec())?, *v)))
                .collect()
        };
        validate_feasible(base, collect(rho)?, collect(sigma)?)
    }

    /// Recovers `(V, rho, sigma)` from a printed element list and validates it.
    pub fn from_elements<I>(elements: I) -> Result<Self, FeasibleError>
    where
        I: IntoIterator<Item = Element>,
    {
        let mut grouped: BTreeMap<VecKey, Vec<ThirdInt>> = BTreeMap::new();
        for e in elements {
            grouped.entry(e.key).or_default().push(e.last);
        }
        let base = validate_complete(grouped.keys().cloned())?;
        let mut rho = BTreeMap::new();
        let mut sigma = BTreeMap::new();
        for (key, lasts) in &grouped {
            let lambda_plus = ThirdInt::from_integer(base.lambda(key) + 1);
            let mismatch = || FeasibleError::ElementMismatch(format!("key {key}: {lasts:?}"));
            let mut sorted = lasts.clone();
            sorted.sort();
            let find = |residue: u32| -> Result<u32, FeasibleError> {
                let hits: Vec<_> = sorted.iter().filter(|x| x.thirds() % 3 == residue).collect();
                match hits.as_slice() {
                    [x] => Ok(x.thirds() / 3),
                    _ => Err(mismatch()),
                }
            };
            if key.len() == 1 {
                if sorted.len() != 2 || !sorted.contains(&lambda_plus) {
                    return Err(mismatch());
                }
                sigma.insert(key.clone(), find(2)?);
            } else {
                if sorted.len() != 4
                    || !sorted.contains(&ThirdInt::ZERO)
                    || !sorted.contains(&lambda_plus)
                {
                    return Err(mismatch());
                }
                rho.insert(key.clone(), find(1)?);
                sigma.insert(key.clone(), find(2)?);
            }
        }
        validate_feasible(base, rho, sigma)
    }

    pub fn base(&self) -> &CompleteBase {
        &self.base
    }

    pub fn lambda(&self, key: &VecKey) -> u32 {
        self.base.lambda(key)
    }

    /// `rho(v)`, with the convention `rho(i) = 0` on length-one keys.
    pub fn rho(&self, key: &VecKey) -> u32 {
        self.rho.get(key).copied().unwrap_or(0)
    }

    pub fn sigma(&self, key: &VecKey) -> u32 {
        self.sigma[key]
    }

    /// Number of length-one keys.
    pub fn t(&self) -> u32 {
        self.base.top()
    }

    /// Length of the longest key.
    pub fn n(&self) -> usize {
        self.base.max_len()
    }

    /// The elements carried by one key, in increasing order.
    pub fn elements_of(&self, key: &VecKey) -> Vec<Element> {
        let lambda_plus = ThirdInt::from_integer(self.lambda(key) + 1);
        let sigma = ThirdInt::from_integer(self.sigma(key)).plus_two_thirds();
        let mut lasts = if key.len() == 1 {
            vec![sigma, lambda_plus]
        } else {
            let rho = ThirdInt::from_integer(self.rho(key)).plus_one_third();
            vec![ThirdInt::ZERO, rho, sigma, lambda_plus]
        };
        lasts.sort();
        lasts
            .into_iter()
            .map(|last| Element::new(key.clone(), last))
            .collect()
    }

    /// All elements in lexicographic order.
    pub fn elements(&self) -> Vec<Element> {
        let mut all: Vec<Element> = self.base.keys().flat_map(|k| self.elements_of(k)).collect();
        all.sort();
        all
    }

    pub fn element_count(&self) -> usize {
        self.base
            .keys()
            .map(|k| if k.len() == 1 { 2 } else { 4 })
            .sum()
    }

    pub fn parity_map(&self) -> BTreeMap<VecKey, Parity> {
        let mut parity = BTreeMap::new();
        // prefixes precede their extensions in BTreeSet order
        for key in self.base.keys() {
            let p = match key.parent() {
                None => Parity::Even,
                Some(parent) => {
                    let inherited = parity[&parent];
                    let j = key.last();
                    if self.rho(&parent) < j && j <= self.sigma(&parent) {
                        inherited
                    } else {
                        Parity::flip(inherited)
                    }
                }
            };
            parity.insert(key.clone(), p);
        }
        parity
    }

    /// Alpha/omega classification of every element.
    pub fn classify_ends(&self) -> BTreeMap<Element, EndKind> {
        let parity = self.parity_map();
        let mut out = BTreeMap::new();
        for key in self.base.keys() {
            for e in self.elements_of(key) {
                let kind = self.end_kind_with(&parity, &e);
                out.insert(e, kind);
            }
        }
        out
    }

    fn end_kind_with(&self, parity: &BTreeMap<VecKey, Parity>, e: &Element) -> EndKind {
        let v = &e.key;
        let h = e.last;
        let alpha = match parity[v] {
            Parity::Even => {
                v.len() >= 2
                    && (h == ThirdInt::ZERO
                        || h == ThirdInt::from_integer(self.rho(v)).plus_one_third())
            }
            Parity::Odd => {
                h == ThirdInt::from_integer(self.lambda(v) + 1)
                    || h == ThirdInt::from_integer(self.sigma(v)).plus_two_thirds()
            }
        };
        if alpha {
            EndKind::Alpha
        } else {
            EndKind::Omega
        }
    }

    pub fn to_doc(&self) -> FeasibleSetDoc {
        FeasibleSetDoc {
            base: self.base.keys().map(|k| k.entries().to_vec()).collect(),
            rho: self.rho.iter().map(|(k, v)| (k.encode(), *v)).collect(),
            sigma: self.sigma.iter().map(|(k, v)| (k.encode(), *v)).collect(),
            elements: Some(
                self.elements()
                    .into_iter()
                    .map(|e| ElementDoc {
                        key: e.key.entries().to_vec(),
                        thirds: e.last.thirds(),
                    })
                    .collect(),
            ),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, FeasibleError> {
        let doc: FeasibleSetDoc =
            serde_json::from_str(text).map_err(|e| FeasibleError::Json(e.to_string()))?;
        doc.into_set()
    }
}

impl fmt::Display for FeasibleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.elements().iter().map(Element::to_string).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// JSON form of a feasible set. `elements` is written on output and, when
/// present on input, must agree with the markers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeasibleSetDoc {
    pub base: Vec<Vec<u32>>,
    #[serde(default)]
    pub rho: BTreeMap<String, u32>,
    pub sigma: BTreeMap<String, u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elements: Option<Vec<ElementDoc>>,
}

/// An element with its last entry written as a numerator over 3.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementDoc {
    pub key: Vec<u32>,
    pub thirds: u32,
}

impl FeasibleSetDoc {
    pub fn into_set(self) -> Result<FeasibleSet, FeasibleError> {
        let keys = self
            .base
            .into_iter()
            .map(VecKey::new)
            .collect::<Result<Vec<_>, _>>()?;
        let base = validate_complete(keys)?;
        let decode = |m: BTreeMap<String, u32>| -> Result<BTreeMap<VecKey, u32>, FeasibleError> {
            m.into_iter()
                .map(|(k, v)| Ok((VecKey::decode(&k)?, v)))
                .collect()
        };
        let set = validate_feasible(base, decode(self.rho)?, decode(self.sigma)?)?;
        if let Some(given) = self.elements {
            let mut given = given
                .into_iter()
                .map(|e| Ok(Element::new(VecKey::new(e.key)?, ThirdInt::from_thirds(e.thirds))))
                .collect::<Result<Vec<_>, FeasibleError>>()?;
            given.sort();
            if given != set.elements() {
                return Err(FeasibleError::ElementMismatch(
                    "listed elements differ from those derived from the markers".into(),
                ));
            }
        }
        Ok(set)
    }
}
