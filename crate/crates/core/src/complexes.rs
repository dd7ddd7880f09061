//! Downward-closed set systems of dimension t ("t-complexes"), their
//! degree structure, pruning to a minimum-degree core, and the two
//! builder notions used by the counting machinery.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::graph::Graph;
use crate::{binomial, Error, Q, Result};

/// Sets of size 1..=t over vertices 0..n, closed under taking subsets.
/// Level k holds the size-k sets, each as a sorted vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TComplex {
    pub t: usize,
    pub n: usize,
    levels: Vec<BTreeSet<Vec<usize>>>, // levels[k-1] = size-k sets
}

#[derive(Serialize, Deserialize)]
struct JsonComplex {
    t: usize,
    n: usize,
    sets: Vec<Vec<usize>>,
}

impl TComplex {
    pub fn new(t: usize, n: usize) -> Self {
        assert!(t >= 1);
        TComplex {
            t,
            n,
            levels: vec![BTreeSet::new(); t],
        }
    }

    /// Inserts a set together with all of its non-empty subsets.
    pub fn insert_closed(&mut self, set: &[usize]) -> Result<()> {
        let mut s: Vec<usize> = set.to_vec();
        s.sort_unstable();
        s.dedup();
        if s.len() != set.len() {
            return Err(Error::Format(format!("repeated vertex in {set:?}")));
        }
        if s.is_empty() || s.len() > self.t {
            return Err(Error::Format(format!(
                "set size {} outside 1..={}",
                s.len(),
                self.t
            )));
        }
        if *s.last().unwrap() >= self.n {
            return Err(Error::Format(format!("vertex out of range in {s:?}")));
        }
        for k in 1..=s.len() {
            for sub in s.iter().copied().combinations(k) {
                self.levels[k - 1].insert(sub);
            }
        }
        Ok(())
    }

    pub fn level(&self, k: usize) -> &BTreeSet<Vec<usize>> {
        &self.levels[k - 1]
    }

    pub fn contains(&self, set: &[usize]) -> bool {
        let mut s = set.to_vec();
        s.sort_unstable();
        !s.is_empty() && s.len() <= self.t && self.levels[s.len() - 1].contains(&s)
    }

    pub fn top_count(&self) -> usize {
        self.levels[self.t - 1].len()
    }

    pub fn total_sets(&self) -> usize {
        self.levels.iter().map(|l| l.len()).sum()
    }

    /// Degree of every set: the number of size-t sets containing it.
    /// Computed by expanding each top set into its subsets.
    pub fn degree_table(&self) -> BTreeMap<Vec<usize>, u64> {
        let mut deg: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
        for top in &self.levels[self.t - 1] {
            for k in 1..=self.t {
                for sub in top.iter().copied().combinations(k) {
                    *deg.entry(sub).or_insert(0) += 1;
                }
            }
        }
        // Sets not under any top set have degree 0.
        for lvl in &self.levels {
            for s in lvl {
                deg.entry(s.clone()).or_insert(0);
            }
        }
        deg
    }

    pub fn degree(&self, set: &[usize]) -> u64 {
        let mut s = set.to_vec();
        s.sort_unstable();
        self.levels[self.t - 1]
            .iter()
            .filter(|top| s.iter().all(|v| top.contains(v)))
            .count() as u64
    }

    /// Serializes the maximal sets only; subsets are re-derived on load.
    pub fn to_json(&self) -> String {
        let mut maximal: Vec<Vec<usize>> = Vec::new();
        for k in (1..=self.t).rev() {
            for s in &self.levels[k - 1] {
                let covered = maximal
                    .iter()
                    .any(|m| s.iter().all(|v| m.contains(v)));
                if !covered {
                    maximal.push(s.clone());
                }
            }
        }
        maximal.sort();
        serde_json::to_string_pretty(&JsonComplex {
            t: self.t,
            n: self.n,
            sets: maximal,
        })
        .unwrap()
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: JsonComplex =
            serde_json::from_str(s).map_err(|e| Error::Format(e.to_string()))?;
        let mut c = TComplex::new(j.t, j.n);
        for set in &j.sets {
            c.insert_closed(set)?;
        }
        Ok(c)
    }

    /// Ground set: the elements present as singletons.
    pub fn ground_set(&self) -> Vec<usize> {
        self.levels[0].iter().map(|s| s[0]).collect()
    }

    /// The operator { K \ S : K in the complex, K not a subset of S }:
    /// sets shrink rather than disappear, and land on the level of their
    /// new size. Only sets still of size t count toward degrees afterwards.
    pub fn remove_vertices(&self, remove: &BTreeSet<usize>) -> TComplex {
        let mut c = TComplex::new(self.t, self.n);
        for lvl in &self.levels {
            for set in lvl {
                let rest: Vec<usize> =
                    set.iter().copied().filter(|v| !remove.contains(v)).collect();
                if !rest.is_empty() {
                    c.levels[rest.len() - 1].insert(rest);
                }
            }
        }
        c
    }

    /// Repeatedly deletes, in batches, every set of size k < t whose
    /// degree falls below `threshold(k)`, together with all supersets,
    /// until none remain. The fixed point is independent of deletion
    /// order (it is the unique maximal sub-complex meeting every
    /// threshold), so batch rounds match one-at-a-time removal.
    pub fn prune<F>(&self, threshold: F) -> TComplex
    where
        F: Fn(usize) -> u64,
    {
        let mut cur = self.clone();
        loop {
            let deg = cur.degree_table();
            let bad: Vec<Vec<usize>> = deg
                .iter()
                .filter(|(s, &d)| s.len() < cur.t && d < threshold(s.len()))
                .map(|(s, _)| s.clone())
                .collect();
            if bad.is_empty() {
                return cur;
            }
            let mut next = TComplex::new(cur.t, cur.n);
            'tops: for top in &cur.levels[cur.t - 1] {
                for b in &bad {
                    if b.iter().all(|v| top.contains(v)) {
                        continue 'tops;
                    }
                }
                next.insert_closed(top).unwrap();
            }
            cur = next;
        }
    }
}

/// All cliques of `g` on at most `t` vertices: level i is exactly the
/// i-cliques, including those inside no t-clique.
pub fn clique_complex(g: &Graph, t: usize) -> TComplex {
    let mut c = TComplex::new(t, g.n());
    let bits = g.adjacency_bits();
    let mut stack: Vec<(Vec<usize>, usize)> = vec![(Vec::new(), 0)];
    while let Some((clique, start)) = stack.pop() {
        if !clique.is_empty() {
            c.levels[clique.len() - 1].insert(clique.clone());
        }
        if clique.len() == t {
            continue;
        }
        for v in start..g.n() {
            if clique.iter().all(|&u| bits[u][v / 64] >> (v % 64) & 1 == 1) {
                let mut nxt = clique.clone();
                nxt.push(v);
                stack.push((nxt, v + 1));
            }
        }
    }
    c
}

/// A reason a complex fails the weak-builder degree conditions.
/// Builder thresholds: degree lower bounds B_1..B_s (rational; degrees
/// are compared against their ceilings), a degree upper bound ell at
/// level s+1, and the removal depth r for the strong form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BuilderParams {
    pub t: usize,
    pub s: usize,
    pub ell: u64,
    pub r: usize,
    pub b: Vec<Q>,
}

impl BuilderParams {
    pub fn validate(&self) -> Result<()> {
        if self.s < 1 || self.s >= self.t || self.b.len() != self.s {
            return Err(Error::Format("need 1 <= s < t and one B per level 1..=s".into()));
        }
        if self.b.iter().any(|x| *x <= Q::from_integer(0)) {
            return Err(Error::Format("thresholds must be positive".into()));
        }
        Ok(())
    }

    /// Integer threshold actually compared at level i (1-based).
    pub fn b_ceil(&self, i: usize) -> u64 {
        self.b[i - 1].ceil().to_integer() as u64
    }

    /// Halved thresholds, as in the weak-to-strong step.
    pub fn halved(&self) -> BuilderParams {
        let mut p = self.clone();
        for x in &mut p.b {
            *x /= 2;
        }
        p
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    /// Vertex set whose removal exposed the violation (empty: none).
    pub removed: Vec<usize>,
    pub set: Vec<usize>,
    pub degree: u64,
    /// Lower bound that failed, if any; otherwise the ell upper bound did.
    pub required_min: Option<u64>,
    pub required_max: Option<u64>,
}

fn weak_violations(c: &TComplex, p: &BuilderParams, removed: &[usize]) -> Vec<Violation> {
    let deg = c.degree_table();
    let mut viol = Vec::new();
    for (set, &d) in &deg {
        let k = set.len();
        if k <= p.s && d < p.b_ceil(k) {
            viol.push(Violation {
                removed: removed.to_vec(),
                set: set.clone(),
                degree: d,
                required_min: Some(p.b_ceil(k)),
                required_max: None,
            });
        } else if k == p.s + 1 && d > p.ell {
            viol.push(Violation {
                removed: removed.to_vec(),
                set: set.clone(),
                degree: d,
                required_min: None,
                required_max: Some(p.ell),
            });
        }
    }
    viol
}

/// Weak builder: every present set of size i <= s lies in at least B_i
/// size-t sets, and every set of size s+1 lies in at most ell of them.
pub fn is_weak_builder(c: &TComplex, p: &BuilderParams) -> Result<(bool, Vec<Violation>)> {
    p.validate()?;
    if p.t != c.t {
        return Err(Error::Format("parameter t differs from the complex's".into()));
    }
    let viol = weak_violations(c, p, &[]);
    Ok((viol.is_empty(), viol))
}

/// Strong builder: removing any vertex set of size at most r leaves a
/// weak builder (sets shrink under removal; shrunken former top sets no
/// longer count toward degrees). Brute force over all such vertex sets;
/// `cap` bounds how many are examined.
pub fn is_strong_builder(c: &TComplex, p: &BuilderParams, cap: u64) -> Result<(bool, Vec<Violation>)> {
    p.validate()?;
    if p.t != c.t {
        return Err(Error::Format("parameter t differs from the complex's".into()));
    }
    let ground = c.ground_set();
    let mut budget: u64 = 0;
    for k in 0..=p.r.min(ground.len()) {
        budget += binomial(ground.len() as u64, k as u64);
    }
    if budget > cap {
        return Err(Error::CapExceeded {
            what: "strong-builder subset enumeration",
            got: budget,
            cap,
        });
    }
    for k in 0..=p.r.min(ground.len()) {
        for subset in ground.iter().copied().combinations(k) {
            let removed = c.remove_vertices(&subset.iter().copied().collect());
            let viol = weak_violations(&removed, p, &subset);
            if !viol.is_empty() {
                return Ok((false, viol));
            }
        }
    }
    Ok((true, Vec::new()))
}

/// Exact test of the sufficient condition under which a weak builder is
/// a strong builder at halved thresholds: with A = (B_s - ell) /
/// (C(t,s) * ell), decides A >= 1/(1 - 2^(-1/r)) via the equivalent
/// integer comparison 2 * (A - 1)^r >= A^r.
///
/// `proof_variant` instead uses A = (2*B_s - ell) / (C(t,s) - ell), the
/// expression the downstream rooting argument manipulates; the two
/// disagree and both are exposed so the gap stays visible.
pub fn weak_to_strong_condition(p: &BuilderParams, proof_variant: bool) -> Result<bool> {
    p.validate()?;
    let r = p.r as u32;
    if r == 0 {
        return Ok(true); // nothing is removed
    }
    let b_s = p.b[p.s - 1];
    let (bn, bd) = (*b_s.numer() as i128, *b_s.denom() as i128);
    let ell = p.ell as i128;
    let c_ts = binomial(p.t as u64, p.s as u64) as i128;
    // A = num/den with a common positive denominator bd.
    let (num, den) = if proof_variant {
        (2 * bn - ell * bd, (c_ts - ell) * bd)
    } else {
        (bn - ell * bd, c_ts * ell * bd)
    };
    if den <= 0 {
        // Degenerate (proof variant with ell >= C(t,s)): A unbounded.
        return Ok(num > 0);
    }
    if num <= den {
        // A <= 1: (A-1)^r cannot dominate.
        return Ok(false);
    }
    // 2 * ((num-den)/den)^r >= (num/den)^r  <=>  2 (num-den)^r >= num^r.
    let mut lhs: i128 = 2;
    let mut rhs: i128 = 1;
    let base = num - den;
    for _ in 0..r {
        lhs = lhs.checked_mul(base).ok_or_else(|| Error::CapExceeded {
            what: "condition arithmetic",
            got: r as u64,
            cap: 0,
        })?;
        rhs = rhs.checked_mul(num).ok_or_else(|| Error::CapExceeded {
            what: "condition arithmetic",
            got: r as u64,
            cap: 0,
        })?;
    }
    Ok(lhs >= rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c_from(t: usize, n: usize, tops: &[&[usize]]) -> TComplex {
        let mut c = TComplex::new(t, n);
        for s in tops {
            c.insert_closed(s).unwrap();
        }
        c
    }

    #[test]
    fn closure_and_levels() {
        let c = c_from(3, 5, &[&[0, 1, 2], &[1, 2, 3]]);
        assert_eq!(c.level(3).len(), 2);
        assert_eq!(c.level(2).len(), 5); // 01 02 12 13 23
        assert_eq!(c.level(1).len(), 4);
        assert!(c.contains(&[2, 1]));
        assert!(!c.contains(&[0, 3]));
    }

    #[test]
    fn degree_matches_table() {
        let c = c_from(3, 6, &[&[0, 1, 2], &[0, 1, 3], &[0, 1, 4], &[2, 3, 4]]);
        let tab = c.degree_table();
        for (s, &d) in &tab {
            assert_eq!(d, c.degree(s), "set {s:?}");
        }
        assert_eq!(tab[&vec![0, 1]], 3);
        assert_eq!(tab[&vec![2]], 2);
    }

    #[test]
    fn clique_complex_levels_are_all_cliques() {
        let c = clique_complex(&Graph::complete(4), 3);
        assert_eq!(c.top_count(), 4);
        assert_eq!(c.level(2).len(), 6);
        // An edge in no triangle still sits at level 2, with degree 0.
        let g = Graph::with_edges(4, [(0, 1), (1, 2), (2, 0), (2, 3)]).unwrap();
        let c = clique_complex(&g, 3);
        assert_eq!(c.top_count(), 1);
        assert!(c.contains(&[2, 3]));
        assert_eq!(c.degree(&[2, 3]), 0);
        assert_eq!(c.level(2).len(), 4);
        // Triangle-free host: empty top level, full lower levels.
        let c5 = Graph::with_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        let c = clique_complex(&c5, 3);
        assert_eq!(
            (c.level(1).len(), c.level(2).len(), c.level(3).len()),
            (5, 5, 0)
        );
    }

    #[test]
    fn json_round_trip_keeps_maximal_only() {
        let c = c_from(3, 5, &[&[0, 1, 2], &[1, 2, 3]]);
        let mut c2 = c.clone();
        c2.insert_closed(&[4]).unwrap();
        let js = c2.to_json();
        let parsed: serde_json::Value = serde_json::from_str(&js).unwrap();
        let sets = parsed["sets"].as_array().unwrap();
        assert_eq!(sets.len(), 3); // two triples plus the isolated {4}
        let back = TComplex::from_json(&js).unwrap();
        assert_eq!(back, c2);
    }

    #[test]
    fn remove_vertices_shrinks_sets() {
        let c = c_from(3, 6, &[&[0, 1, 2], &[0, 3, 4], &[3, 4, 5]]);
        // Removing nothing is the identity.
        assert_eq!(c.remove_vertices(&BTreeSet::new()), c);
        let out = c.remove_vertices(&[2].into_iter().collect());
        assert_eq!(out.top_count(), 2);
        // {0,1,2} shrinks to the pair {0,1}; it does not disappear.
        assert!(out.contains(&[0, 1]));
        assert!(!out.contains(&[2]));
        assert!(out.contains(&[0, 3]));

        // Two triangles sharing an edge, minus that edge's endpoints:
        // only the opposite vertices remain, as singletons.
        let c = c_from(3, 4, &[&[0, 1, 2], &[0, 1, 3]]);
        let out = c.remove_vertices(&[0, 1].into_iter().collect());
        assert_eq!(out.top_count(), 0);
        assert_eq!(out.level(2).len(), 0);
        assert_eq!(out.level(1), &[vec![2], vec![3]].into_iter().collect());

        // K4's complex minus one vertex has K3's levels.
        let c = clique_complex(&Graph::complete(4), 3);
        let out = c.remove_vertices(&[3].into_iter().collect());
        let k3 = clique_complex(&Graph::complete(3), 3);
        for k in 1..=3 {
            assert_eq!(out.level(k), k3.level(k), "level {k}");
        }
    }

    #[test]
    fn prune_reaches_unique_fixed_point() {
        // {0,1} has degree 1 under threshold 2 -> its top set dies, which
        // cascades to {2,3,4}-side stability.
        let c = c_from(
            3,
            6,
            &[&[0, 1, 2], &[2, 3, 4], &[2, 3, 5], &[3, 4, 5], &[2, 4, 5]],
        );
        let out = c.prune(|k| if k < 3 { 2 } else { 1 });
        assert_eq!(out.top_count(), 4);
        assert!(!out.contains(&[0, 1, 2]));
        // Pruning again is a no-op.
        assert_eq!(out.prune(|k| if k < 3 { 2 } else { 1 }), out);
        // Everything kept really does satisfy the thresholds.
        for (s, d) in out.degree_table() {
            assert!(d >= if s.len() < 3 { 2 } else { 1 });
        }
    }

    #[test]
    fn prune_can_empty() {
        let c = c_from(2, 4, &[&[0, 1], &[2, 3]]);
        let out = c.prune(|_| 5);
        assert_eq!(out.total_sets(), 0);
    }

    fn params(t: usize, s: usize, ell: u64, r: usize, b: &[Q]) -> BuilderParams {
        BuilderParams { t, s, ell, r, b: b.to_vec() }
    }

    #[test]
    fn weak_builder_bounds_both_ways() {
        use crate::q;
        // K4's complex: vertices have degree 3, pairs 2, triples 1.
        let c = clique_complex(&Graph::complete(4), 3);
        let (ok, viol) = is_weak_builder(&c, &params(3, 1, 2, 0, &[q(3, 1)])).unwrap();
        assert!(ok, "{viol:?}");
        // Rational threshold compares against its ceiling: 7/2 -> 4 > 3.
        let (ok, viol) = is_weak_builder(&c, &params(3, 1, 2, 0, &[q(7, 2)])).unwrap();
        assert!(!ok);
        assert!(viol.iter().all(|v| v.set.len() == 1
            && v.degree == 3
            && v.required_min == Some(4)));
        // ell is an upper bound at level s+1: pairs have degree 2 > 1.
        let (ok, viol) = is_weak_builder(&c, &params(3, 1, 1, 0, &[q(3, 1)])).unwrap();
        assert!(!ok);
        assert!(viol.iter().all(|v| v.set.len() == 2
            && v.degree == 2
            && v.required_max == Some(1)));
        // A single K3 with s = 1, B = [1], ell = 1 qualifies.
        let c = clique_complex(&Graph::complete(3), 3);
        assert!(is_weak_builder(&c, &params(3, 1, 1, 0, &[q(1, 1)])).unwrap().0);
    }

    #[test]
    fn strong_builder_quantifies_over_removals() {
        use crate::q;
        // Pairs of K6 (t = 2): tops contain themselves only, so ell = 1.
        let c = clique_complex(&Graph::complete(6), 2);
        // r = 0 is exactly the weak check.
        assert!(is_strong_builder(&c, &params(2, 1, 1, 0, &[q(5, 1)]), 1 << 20).unwrap().0);
        // Removing one vertex drops vertex degrees to 4.
        let (ok, viol) =
            is_strong_builder(&c, &params(2, 1, 1, 1, &[q(5, 1)]), 1 << 20).unwrap();
        assert!(!ok);
        assert_eq!(viol[0].removed.len(), 1);
        assert_eq!(viol[0].degree, 4);
        assert!(is_strong_builder(&c, &params(2, 1, 1, 1, &[q(4, 1)]), 1 << 20).unwrap().0);
        assert!(is_strong_builder(&c, &params(2, 1, 1, 2, &[q(3, 1)]), 1 << 20).unwrap().0);
        // The subset budget is checked against the cap up front.
        assert!(matches!(
            is_strong_builder(&c, &params(2, 1, 1, 2, &[q(3, 1)]), 3),
            Err(Error::CapExceeded { .. })
        ));
        // Two disjoint K4s survive one removal but not three: deleting
        // three vertices of one side strands its fourth vertex.
        let g = Graph::complete(4).disjoint_union(&Graph::complete(4));
        let c = clique_complex(&g, 3);
        let p1 = params(3, 1, 2, 1, &[q(1, 1)]);
        assert!(is_strong_builder(&c, &p1, 1 << 20).unwrap().0);
        let p3 = params(3, 1, 2, 3, &[q(1, 1)]);
        let (ok, viol) = is_strong_builder(&c, &p3, 1 << 20).unwrap();
        assert!(!ok);
        assert!(viol.iter().any(|v| v.degree == 0));
    }

    #[test]
    fn condition_known_parameter_point() {
        use crate::q;
        // t=3, s=1, ell=1, r=1, B_1=7: A = (7-1)/3 = 2 and 2(A-1) >= A.
        assert!(weak_to_strong_condition(&params(3, 1, 1, 1, &[q(7, 1)]), false).unwrap());
        // B_1 = 4 gives A = 1, which never suffices.
        assert!(!weak_to_strong_condition(&params(3, 1, 1, 1, &[q(4, 1)]), false).unwrap());
        // r = 0 is vacuous.
        assert!(weak_to_strong_condition(&params(3, 1, 1, 0, &[q(1, 1)]), false).unwrap());
    }

    #[test]
    fn condition_monotone_in_bs() {
        use crate::q;
        // For fixed t,s,ell,r the predicate flips from false to true as
        // B_s grows, in both variants.
        for &pv in &[false, true] {
            let mut prev = false;
            for b_s in 1..2000 {
                let p = params(4, 2, 3, 5, &[q(1, 1), q(b_s, 1)]);
                let now = weak_to_strong_condition(&p, pv).unwrap();
                assert!(!prev || now, "not monotone at b_s={b_s} pv={pv}");
                prev = now;
            }
            assert!(prev, "never true pv={pv}");
        }
    }

    #[test]
    fn condition_variants_disagree_somewhere() {
        use crate::q;
        let mut differ = false;
        for b_s in 1..500 {
            let p = params(4, 2, 3, 4, &[q(1, 1), q(b_s, 1)]);
            let a = weak_to_strong_condition(&p, false).unwrap();
            let b = weak_to_strong_condition(&p, true).unwrap();
            differ |= a != b;
        }
        assert!(differ);
    }

    #[test]
    fn condition_implies_strong_at_halved_thresholds() {
        use crate::q;
        // Desk-scale check of the weak-to-strong step: complete pair
        // complexes, where the exact min degree m-1 makes the weak check
        // tight. Whenever the condition holds for some removal depth r,
        // the complex really is a strong builder at halved thresholds.
        let mut fired = 0;
        for m in 4..=10usize {
            let c = clique_complex(&Graph::complete(m), 2);
            let full = params(2, 1, 1, 0, &[q(m as i64 - 1, 1)]);
            assert!(is_weak_builder(&c, &full).unwrap().0);
            for r in 1..=3usize {
                let mut p = full.clone();
                p.r = r;
                if weak_to_strong_condition(&p, false).unwrap() {
                    let half = p.halved();
                    let (ok, viol) = is_strong_builder(&c, &half, 1 << 20).unwrap();
                    assert!(ok, "m={m} r={r}: {viol:?}");
                    fired += 1;
                }
            }
        }
        assert!(fired >= 2, "condition never fired at desk scale");
    }
}
