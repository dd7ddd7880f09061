//! Exact rooted densities, closed-form density formulas, and the
//! brute-force balancedness oracle.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::{choose2, q, Error, Q, Result, RootedGraph};

/// Default cap on unrooted vertices for the balance oracle.
pub const DEFAULT_BALANCE_CAP: usize = 22;

/// Largest unrooted count handled by full subset enumeration; above this
/// the oracle switches to connected-set enumeration (sound because the
/// density of a set is at least the density of its sparsest connected
/// piece; agreement with full enumeration is property-tested).
const FULL_ENUM_LIMIT: usize = 22;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Balance {
    Balanced,
    /// A set of unrooted vertices of strictly smaller rooted density.
    Counterexample(BTreeSet<usize>),
}

/// Edges incident to `s` divided by `|s|`, for `s` inside the unrooted
/// part.
pub fn rooted_density_of_set(f: &RootedGraph, s: &BTreeSet<usize>) -> Result<Q> {
    if s.is_empty() {
        return Err(Error::Infeasible("empty vertex set".into()));
    }
    for &v in s {
        if v >= f.graph.n() {
            return Err(Error::Format(format!("vertex {v} out of range")));
        }
        if f.is_root(v) {
            return Err(Error::Infeasible(format!("vertex {v} is a root")));
        }
    }
    let e = f
        .graph
        .edges()
        .filter(|&(u, v)| s.contains(&u) || s.contains(&v))
        .count();
    Ok(q(e as i64, s.len() as i64))
}

/// Rooted density of the whole unrooted part.
pub fn rooted_density(f: &RootedGraph) -> Result<Q> {
    let all: BTreeSet<usize> = f.unrooted().into_iter().collect();
    rooted_density_of_set(f, &all)
}

/// Brute-force balance oracle: is the full unrooted set a minimizer of
/// rooted density over all nonempty unrooted subsets?
///
/// Uses full Gray-code enumeration up to 22 unrooted vertices (parallel
/// over high bits), connected-set enumeration beyond that, up to `cap`.
pub fn is_balanced(f: &RootedGraph, cap: usize) -> Result<Balance> {
    let unrooted = f.unrooted();
    let m = unrooted.len();
    if m == 0 {
        return Err(Error::Infeasible("no unrooted vertices".into()));
    }
    if m > cap {
        return Err(Error::CapExceeded {
            what: "unrooted vertices",
            got: m as u64,
            cap: cap as u64,
        });
    }
    let best = if m <= FULL_ENUM_LIMIT {
        min_density_full(f, &unrooted)
    } else {
        min_density_connected(f, &unrooted)
    };
    let (e_best, k_best, mask_best) = best;
    let full = rooted_density(f)?;
    // d(best) < d(full)?
    if q(e_best as i64, k_best as i64) < full {
        let set: BTreeSet<usize> = (0..m)
            .filter(|&i| mask_best >> i & 1 == 1)
            .map(|i| unrooted[i])
            .collect();
        Ok(Balance::Counterexample(set))
    } else {
        Ok(Balance::Balanced)
    }
}

/// Exhaustive variant used to validate the oracle itself in tests.
pub fn is_balanced_exhaustive(f: &RootedGraph, cap: usize) -> Result<Balance> {
    let unrooted = f.unrooted();
    let m = unrooted.len();
    if m == 0 {
        return Err(Error::Infeasible("no unrooted vertices".into()));
    }
    if m > cap || m > FULL_ENUM_LIMIT {
        return Err(Error::CapExceeded {
            what: "unrooted vertices",
            got: m as u64,
            cap: cap.min(FULL_ENUM_LIMIT) as u64,
        });
    }
    let (e, k, mask) = min_density_full(f, &unrooted);
    if q(e as i64, k as i64) < rooted_density(f)? {
        Ok(Balance::Counterexample(
            (0..m)
                .filter(|&i| mask >> i & 1 == 1)
                .map(|i| unrooted[i])
                .collect(),
        ))
    } else {
        Ok(Balance::Balanced)
    }
}

/// Degrees and unrooted-neighborhood masks for the incremental counters.
fn incidence(f: &RootedGraph, unrooted: &[usize]) -> (Vec<u64>, Vec<u64>) {
    let m = unrooted.len();
    let pos: std::collections::HashMap<usize, usize> =
        unrooted.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut deg = vec![0u64; m];
    let mut nbr = vec![0u64; m];
    for (u, v) in f.graph.edges() {
        let pu = pos.get(&u);
        let pv = pos.get(&v);
        if let Some(&i) = pu {
            deg[i] += 1;
        }
        if let Some(&j) = pv {
            deg[j] += 1;
        }
        if let (Some(&i), Some(&j)) = (pu, pv) {
            nbr[i] |= 1 << j;
            nbr[j] |= 1 << i;
        }
    }
    (deg, nbr)
}

/// Minimizing (edge count, size, mask) over all nonempty subsets, Gray
/// order with incremental edge counts; parallel over the high bits.
fn min_density_full(f: &RootedGraph, unrooted: &[usize]) -> (u64, u32, u64) {
    let m = unrooted.len();
    let (deg, nbr) = incidence(f, unrooted);
    let low = m.min(16);
    let high = m - low;

    let scan_chunk = |hi: u64| -> (u64, u32, u64) {
        let base_mask = hi << low;
        // Edge count of the base subset.
        let mut e: u64 = 0;
        let mut k: u32 = 0;
        for i in 0..m {
            if base_mask >> i & 1 == 1 {
                e += deg[i] - (nbr[i] & base_mask & ((1u64 << i) - 1)).count_ones() as u64;
                k += 1;
            }
        }
        let mut best = if k > 0 {
            (e, k, base_mask)
        } else {
            (u64::MAX, 1, 0)
        };
        let mut mask = base_mask;
        // Gray walk over the low bits.
        for g in 1u64..(1u64 << low) {
            let bit = g.trailing_zeros() as usize;
            let was_in = mask >> bit & 1 == 1;
            if was_in {
                mask ^= 1 << bit;
                e -= deg[bit] - (nbr[bit] & mask).count_ones() as u64;
                k -= 1;
            } else {
                e += deg[bit] - (nbr[bit] & mask).count_ones() as u64;
                mask ^= 1 << bit;
                k += 1;
            }
            if k > 0 && better(e, k, mask, best) {
                best = (e, k, mask);
            }
        }
        best
    };

    (0u64..(1u64 << high))
        .into_par_iter()
        .map(scan_chunk)
        .reduce(
            || (u64::MAX, 1, 0),
            |a, b| if better(b.0, b.1, b.2, a) { b } else { a },
        )
}

/// Strictly smaller density, or equal density with smaller mask.
fn better(e: u64, k: u32, mask: u64, best: (u64, u32, u64)) -> bool {
    if best.0 == u64::MAX {
        return true;
    }
    let lhs = (e as u128) * best.1 as u128;
    let rhs = (best.0 as u128) * k as u128;
    lhs < rhs || (lhs == rhs && mask < best.2)
}

/// Minimum density over subsets inducing connected subgraphs of the
/// unrooted part. Sound for the balance verdict: a disconnected set's
/// density is a weighted average of its parts, so some connected part is
/// at least as sparse.
fn min_density_connected(f: &RootedGraph, unrooted: &[usize]) -> (u64, u32, u64) {
    let m = unrooted.len();
    assert!(m <= 63);
    let (deg, nbr) = incidence(f, unrooted);
    let mut best = (u64::MAX, 1u32, 0u64);

    // Connected sets with minimum element v: grow by neighbors, never
    // touching vertices < v or previously banned branches.
    fn grow(
        set: u64,
        e: u64,
        k: u32,
        cand: u64,
        banned: u64,
        deg: &[u64],
        nbr: &[u64],
        best: &mut (u64, u32, u64),
    ) {
        if better(e, k, set, *best) {
            *best = (e, k, set);
        }
        let mut rest = cand;
        let mut banned = banned;
        while rest != 0 {
            let bit = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let nset = set | 1 << bit;
            let ne = e + deg[bit] - (nbr[bit] & set).count_ones() as u64;
            let ncand = (rest | (nbr[bit] & !banned & !nset)) & !nset;
            grow(nset, ne, k + 1, ncand, banned | 1 << bit, deg, nbr, best);
            banned |= 1 << bit;
        }
    }

    for v in 0..m {
        let below: u64 = (1u64 << v) - 1;
        let set = 1u64 << v;
        let cand = nbr[v] & !below & !set;
        grow(
            set,
            deg[v],
            1,
            cand,
            below | set,
            &deg,
            &nbr,
            &mut best,
        );
    }
    best
}

/// Closed-form density of the Type 1 K_t-tree.
pub fn density_type1(t: i64, a: i64, b: i64, s: i64) -> Result<Q> {
    if !(t >= 3 && 1 <= s && 2 * s <= t && a + 1 <= b && a >= 1) {
        return Err(Error::Infeasible("type 1 parameter range".into()));
    }
    Ok(q(
        a * choose2(s) + b * (choose2(t) - 2 * choose2(s)),
        a * s + b * (t - 2 * s),
    ))
}

/// Closed-form density of the Type 2 K_t-tree:
/// (3t-9)/4 + (t-3)/(2a) + b/a.
pub fn density_type2(t: i64, a: i64, b: i64) -> Result<Q> {
    if !(t >= 3 && t % 2 == 1 && a >= 2 && a % 2 == 0 && 2 * a + 2 <= b) {
        return Err(Error::Infeasible("type 2 parameter range".into()));
    }
    Ok(q(3 * t - 9, 4) + q(t - 3, 2 * a) + q(b, a))
}

/// Vertex and edge counts of a clique tree of the given type vector:
/// `(t + sum d_k (t-k), C(t,2) + sum d_k (C(t,2)-C(k,2)))`.
pub fn witness_counts(t: i64, type_vector: &[u64]) -> (i64, i64) {
    let mut v = t;
    let mut e = choose2(t);
    for (idx, &d) in type_vector.iter().enumerate() {
        let k = idx as i64 + 1;
        v += d as i64 * (t - k);
        e += d as i64 * (choose2(t) - choose2(k));
    }
    (v, e)
}
