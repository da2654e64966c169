//! Random and exhaustive generation of feasible sets, for property tests.

use std::collections::BTreeMap;

use rand::Rng;

use crate::feasible::{validate_complete, validate_feasible, FeasibleSet, VecKey};

/// A random valid feasible set with between 2 and `max_keys` keys.
/// Bases grow by appending a new last child to a uniformly chosen node
/// (or a new root), so completeness holds by construction; markers that
/// violate the remaining conditions are redrawn.
pub fn random_feasible<R: Rng>(rng: &mut R, max_keys: usize) -> FeasibleSet {
    assert!(max_keys >= 2, "a feasible set needs at least two keys");
    loop {
        let size = rng.gen_range(2..=max_keys);
        let keys = random_base(rng, size);
        for _ in 0..8 {
            if let Some(l) = random_markers(rng, &keys) {
                return l;
            }
        }
    }
}

fn random_base<R: Rng>(rng: &mut R, size: usize) -> Vec<VecKey> {
    let mut keys = vec![VecKey::root(1)];
    let mut lambda: BTreeMap<VecKey, u32> = BTreeMap::new();
    let mut top = 1;
    while keys.len() < size {
        let pick = rng.gen_range(0..=keys.len());
        if pick == keys.len() {
            top += 1;
            keys.push(VecKey::root(top));
        } else {
            let parent = keys[pick].clone();
            let slot = lambda.entry(parent.clone()).or_insert(0);
            *slot += 1;
            keys.push(parent.child(*slot));
        }
    }
    keys
}

fn random_markers<R: Rng>(rng: &mut R, keys: &[VecKey]) -> Option<FeasibleSet> {
    let base = validate_complete(keys.iter().cloned()).ok()?;
    let mut rho = BTreeMap::new();
    let mut sigma = BTreeMap::new();
    for key in base.keys() {
        let s = rng.gen_range(0..=base.lambda(key));
        sigma.insert(key.clone(), s);
        if key.len() >= 2 {
            rho.insert(key.clone(), rng.gen_range(0..=s));
        }
    }
    validate_feasible(base, rho, sigma).ok()
}

#[derive(Clone, Debug)]
struct Tree(Vec<Tree>);

fn forests(n: usize, memo: &mut BTreeMap<usize, Vec<Vec<Tree>>>) -> Vec<Vec<Tree>> {
    if let Some(f) = memo.get(&n) {
        return f.clone();
    }
    let mut out = Vec::new();
    if n == 0 {
        out.push(Vec::new());
    } else {
        // first tree takes k nodes, the rest of the forest n - k
        for k in 1..=n {
            let firsts: Vec<Tree> = forests(k - 1, memo).into_iter().map(Tree).collect();
            let rests = forests(n - k, memo);
            for f in &firsts {
                for r in &rests {
                    let mut forest = vec![f.clone()];
                    forest.extend(r.iter().cloned());
                    out.push(forest);
                }
            }
        }
    }
    memo.insert(n, out.clone());
    out
}

fn forest_keys(forest: &[Tree], prefix: &[u32], out: &mut Vec<VecKey>) {
    for (i, tree) in forest.iter().enumerate() {
        let mut entries = prefix.to_vec();
        entries.push(i as u32 + 1);
        out.push(VecKey::new(entries.clone()).expect("positive entries"));
        forest_keys(&tree.0, &entries, out);
    }
}

/// Every complete base with exactly `n` keys.
pub fn all_bases(n: usize) -> Vec<Vec<VecKey>> {
    let mut memo = BTreeMap::new();
    forests(n, &mut memo)
        .into_iter()
        .map(|f| {
            let mut keys = Vec::new();
            forest_keys(&f, &[], &mut keys);
            keys
        })
        .collect()
}

/// Every valid feasible set on the given base.
pub fn all_feasible_on(keys: &[VecKey]) -> Vec<FeasibleSet> {
    let Ok(base) = validate_complete(keys.iter().cloned()) else {
        return Vec::new();
    };
    let ordered: Vec<VecKey> = base.keys().cloned().collect();
    // choices per key: (rho, sigma)
    let choices: Vec<Vec<(u32, u32)>> = ordered
        .iter()
        .map(|k| {
            let lam = base.lambda(k);
            let mut c = Vec::new();
            for s in 0..=lam {
                if k.len() == 1 {
                    c.push((0, s));
                } else {
                    c.extend((0..=s).map(|r| (r, s)));
                }
            }
            c
        })
        .collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; ordered.len()];
    loop {
        let mut rho = BTreeMap::new();
        let mut sigma = BTreeMap::new();
        for (k, key) in ordered.iter().enumerate() {
            let (r, s) = choices[k][idx[k]];
            sigma.insert(key.clone(), s);
            if key.len() >= 2 {
                rho.insert(key.clone(), r);
            }
        }
        if let Ok(l) = validate_feasible(base.clone(), rho, sigma) {
            out.push(l);
        }
        // odometer
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                return out;
            }
            idx[pos] += 1;
            if idx[pos] < choices[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// Every valid feasible set with at most `max_keys` keys.
pub fn all_feasible(max_keys: usize) -> Vec<FeasibleSet> {
    (1..=max_keys)
        .flat_map(all_bases)
        .flat_map(|keys| all_feasible_on(&keys))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn base_counts_are_catalan() {
        let counts: Vec<usize> = (1..=5).map(|n| all_bases(n).len()).collect();
        assert_eq!(counts, vec![1, 2, 5, 14, 42]);
    }

    #[test]
    fn random_sets_are_valid_and_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let l = random_feasible(&mut rng, 12);
            assert!(l.base().len() <= 12);
            assert!(l.n() >= 2);
        }
    }

    #[test]
    fn smallest_sets() {
        // two keys: only (1),(1,1), with sigma(1) in {0, 1}; (1),(2) has no length-two key
        let all2: Vec<FeasibleSet> = all_bases(2).iter().flat_map(|b| all_feasible_on(b)).collect();
        assert_eq!(all2.len(), 2);
        assert!(all2.contains(&crate::fixtures::simplest()));
    }
}
