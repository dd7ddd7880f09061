//! Exact copy counters: cliques, witness copies inside a complex, the
//! closed-form embedding bound, star pruning, rooted-copy tallies with
//! the pigeonhole power detector, and copy-count reports against
//! n^|V| p^|E| predictions.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use itertools::Itertools;
use serde::Serialize;

use crate::complexes::TComplex;
use crate::constructions::ConstructionId;
use crate::graph::{Graph, RootedGraph};
use crate::{choose2, Error, Result};

pub const DEFAULT_COUNT_CAP: u64 = 50_000_000;

/// Number of i-cliques in `g`; `cap` bounds search nodes.
pub fn count_cliques(g: &Graph, i: usize, cap: u64) -> Result<u64> {
    if i == 0 {
        return Ok(1);
    }
    let bits = g.adjacency_bits();
    let mut nodes = 0u64;
    let mut count = 0u64;
    // stack of (clique, next candidate)
    let mut clique: Vec<usize> = Vec::new();
    let mut next: Vec<usize> = vec![0];
    while let Some(start) = next.last().copied() {
        let depth = clique.len();
        let mut advanced = false;
        for v in start..g.n() {
            if clique.iter().all(|&u| bits[u][v / 64] >> (v % 64) & 1 == 1) {
                nodes += 1;
                if nodes > cap {
                    return Err(Error::CapExceeded {
                        what: "clique search nodes",
                        got: nodes,
                        cap,
                    });
                }
                *next.last_mut().unwrap() = v + 1;
                if depth + 1 == i {
                    count += 1;
                } else {
                    clique.push(v);
                    next.push(v + 1);
                    advanced = true;
                    break;
                }
            }
        }
        if !advanced {
            next.pop();
            clique.pop();
        }
    }
    Ok(count)
}

/// Number of copies of the witness in the complex: sequences
/// (L1, .., Lb) of top-level sets admitting a bijection from the
/// witness's vertices to their union that carries each clique onto the
/// corresponding set. Existence of the bijection is equivalent to the
/// two sides having the same multiset of membership patterns, which is
/// checked incrementally along the sequence.
pub fn count_witness_copies(c: &TComplex, w: &crate::constructions::Witness, cap: u64) -> Result<u64> {
    let b = w.cliques.len();
    if b == 0 {
        return Ok(0);
    }
    if b > 63 {
        return Err(Error::CapExceeded {
            what: "witness cliques",
            got: b as u64,
            cap: 63,
        });
    }
    // Membership-pattern multiset of the witness after each prefix.
    let mut wmask: BTreeMap<usize, u64> = BTreeMap::new();
    let mut wsig: Vec<Vec<u64>> = Vec::with_capacity(b);
    for (i, k) in w.cliques.iter().enumerate() {
        for &v in k {
            *wmask.entry(v).or_insert(0) |= 1 << i;
        }
        wsig.push(wmask.values().copied().sorted().collect());
    }
    let tops: Vec<Vec<usize>> = c.level(c.t).iter().cloned().collect();
    let mut nodes = 0u64;
    let mut count = 0u64;
    let mut hmask: HashMap<usize, u64> = HashMap::new();
    search(&tops, &wsig, b, 0, &mut hmask, &mut nodes, &mut count, cap)?;
    return Ok(count);

    #[allow(clippy::too_many_arguments)]
    fn search(
        tops: &[Vec<usize>],
        wsig: &[Vec<u64>],
        b: usize,
        depth: usize,
        hmask: &mut HashMap<usize, u64>,
        nodes: &mut u64,
        count: &mut u64,
        cap: u64,
    ) -> Result<()> {
        if depth == b {
            *count += 1;
            return Ok(());
        }
        for top in tops {
            *nodes += 1;
            if *nodes > cap {
                return Err(Error::CapExceeded {
                    what: "witness search nodes",
                    got: *nodes,
                    cap,
                });
            }
            let fresh: Vec<usize> = top
                .iter()
                .copied()
                .filter(|v| !hmask.contains_key(v))
                .collect();
            for &v in top {
                *hmask.entry(v).or_insert(0) |= 1 << depth;
            }
            let sig: Vec<u64> = hmask.values().copied().sorted().collect();
            if sig == wsig[depth] {
                search(tops, wsig, b, depth + 1, hmask, nodes, count, cap)?;
            }
            for &v in &fresh {
                hmask.remove(&v);
            }
            for v in top {
                if let Some(m) = hmask.get_mut(v) {
                    *m &= !(1u64 << depth);
                }
            }
        }
        Ok(())
    }
}

/// Closed-form embedding bound for a strong builder: the top-level size
/// times the product of B_k to the power d_k, where d is the witness's
/// type vector.
pub fn embedding_lower_bound(c: &TComplex, w: &crate::constructions::Witness, b: &[u64]) -> u128 {
    let d = w.type_vector();
    assert!(d.len() <= b.len(), "need one B entry per glue size");
    let mut acc = c.top_count() as u128;
    for (k, &dk) in d.iter().enumerate() {
        for _ in 0..dk {
            acc *= b[k] as u128;
        }
    }
    acc
}

/// A star copy: center plus its leaf set.
pub type Star = (usize, BTreeSet<usize>);

#[derive(Clone, Debug)]
pub struct StarPruneResult {
    pub stars: Vec<Star>,
    pub centers: BTreeSet<usize>,
    pub leaves: BTreeSet<usize>,
    pub initial: u64,
    pub removed: u64,
}

/// Iterative peeling of t-leaf stars: starting from every star of `g`,
/// repeatedly delete the lowest-id vertex that centers fewer than
/// `threshold` surviving stars (dropping its stars) or appears as a
/// leaf in fewer than `threshold` (dropping those), until none remains.
/// The result is the unique maximal fixed point.
pub fn star_prune(g: &Graph, t: usize, threshold: u64, cap: u64) -> Result<StarPruneResult> {
    assert!(threshold >= 1);
    let adj = g.adjacency();
    let mut stars: Vec<Star> = Vec::new();
    for v in 0..g.n() {
        if adj[v].len() >= t {
            let budget = crate::binomial(adj[v].len() as u64, t as u64);
            if stars.len() as u64 + budget > cap {
                return Err(Error::CapExceeded {
                    what: "star enumeration",
                    got: stars.len() as u64 + budget,
                    cap,
                });
            }
            for leaves in adj[v].iter().copied().combinations(t) {
                stars.push((v, leaves.into_iter().collect()));
            }
        }
    }
    let initial = stars.len() as u64;
    let mut centers: BTreeSet<usize> = (0..g.n()).collect();
    let mut leaves: BTreeSet<usize> = (0..g.n()).collect();
    loop {
        let mut c_count: HashMap<usize, u64> = HashMap::new();
        let mut l_count: HashMap<usize, u64> = HashMap::new();
        for (c, ls) in &stars {
            *c_count.entry(*c).or_insert(0) += 1;
            for &l in ls {
                *l_count.entry(l).or_insert(0) += 1;
            }
        }
        let mut victim: Option<(usize, bool)> = None; // (vertex, as_center)
        for v in 0..g.n() {
            if centers.contains(&v) && c_count.get(&v).copied().unwrap_or(0) < threshold {
                victim = Some((v, true));
                break;
            }
            if leaves.contains(&v) && l_count.get(&v).copied().unwrap_or(0) < threshold {
                victim = Some((v, false));
                break;
            }
        }
        match victim {
            None => break,
            Some((v, true)) => {
                centers.remove(&v);
                stars.retain(|(c, _)| *c != v);
            }
            Some((v, false)) => {
                leaves.remove(&v);
                stars.retain(|(_, ls)| !ls.contains(&v));
            }
        }
    }
    let removed = initial - stars.len() as u64;
    Ok(StarPruneResult {
        stars,
        centers,
        leaves,
        initial,
        removed,
    })
}

/// One placed copy of a rooted graph: images of the non-root vertices,
/// and images of all edges.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct CopyImage {
    pub vertices: BTreeSet<usize>,
    pub edges: BTreeSet<(usize, usize)>,
}

fn enumerate_embeddings<F>(host: &Graph, pat: &Graph, order: &[usize], cap: u64, mut visit: F) -> Result<()>
where
    F: FnMut(&[usize]),
{
    debug_assert_eq!(order.len(), pat.n());
    let pat_adj = pat.adjacency();
    let hbits = host.adjacency_bits();
    let n = host.n();
    let mut img: Vec<usize> = Vec::with_capacity(order.len());
    let mut used = vec![false; n];
    let mut next: Vec<usize> = vec![0];
    // pos_of[pat vertex] = its index in `order`
    let mut pos_of = vec![usize::MAX; pat.n()];
    for (i, &pv) in order.iter().enumerate() {
        pos_of[pv] = i;
    }
    let mut nodes = 0u64;
    while let Some(start) = next.last().copied() {
        let depth = img.len();
        let pv = order[depth];
        let mut advanced = false;
        for hv in start..n {
            if used[hv] {
                continue;
            }
            let ok = pat_adj[pv].iter().all(|&pu| {
                let i = pos_of[pu];
                i >= depth || {
                    let hu = img[i];
                    hbits[hu][hv / 64] >> (hv % 64) & 1 == 1
                }
            });
            if !ok {
                continue;
            }
            nodes += 1;
            if nodes > cap {
                return Err(Error::CapExceeded {
                    what: "embedding search nodes",
                    got: nodes,
                    cap,
                });
            }
            *next.last_mut().unwrap() = hv + 1;
            if depth + 1 == order.len() {
                img.push(hv);
                visit(&img);
                img.pop();
                continue; // keep scanning this depth
            }
            img.push(hv);
            used[hv] = true;
            next.push(0);
            advanced = true;
            break;
        }
        if !advanced {
            // exhausted candidates at this depth
            next.pop();
            if let Some(hv) = img.pop() {
                used[hv] = false;
            }
        }
    }
    Ok(())
}

fn embedding_order(pat: &Graph, first: &[usize]) -> Vec<usize> {
    // Fixed prefix, then BFS from it for early edge constraints.
    let adj = pat.adjacency();
    let mut order: Vec<usize> = first.to_vec();
    let mut seen: Vec<bool> = vec![false; pat.n()];
    for &v in first {
        seen[v] = true;
    }
    let mut head = 0;
    while order.len() < pat.n() {
        if head < order.len() {
            let u = order[head];
            head += 1;
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    order.push(w);
                }
            }
        } else {
            let v = (0..pat.n()).find(|&v| !seen[v]).unwrap();
            seen[v] = true;
            order.push(v);
        }
    }
    order
}

fn copy_from_image(pat: &Graph, order: &[usize], img: &[usize], skip: usize) -> CopyImage {
    let mut map = vec![0usize; pat.n()];
    for (i, &pv) in order.iter().enumerate() {
        map[pv] = img[i];
    }
    CopyImage {
        vertices: order[skip..].iter().map(|&pv| map[pv]).collect(),
        edges: pat
            .edges()
            .map(|(u, v)| {
                let (a, b) = (map[u], map[v]);
                (a.min(b), a.max(b))
            })
            .collect(),
    }
}

fn copies_by_root_raw(
    g: &Graph,
    f: &RootedGraph,
    cap: u64,
) -> Result<BTreeMap<Vec<usize>, BTreeSet<CopyImage>>> {
    let roots: Vec<usize> = f.roots.iter().copied().collect();
    let order = embedding_order(&f.graph, &roots);
    let mut out: BTreeMap<Vec<usize>, BTreeSet<CopyImage>> = BTreeMap::new();
    enumerate_embeddings(g, &f.graph, &order, cap, |img| {
        let key: Vec<usize> = img[..roots.len()].to_vec();
        let copy = copy_from_image(&f.graph, &order, img, roots.len());
        out.entry(key).or_default().insert(copy);
    })?;
    Ok(out)
}

/// For each injective root image extending to a full copy of `f`, the
/// number of distinct copies with that image; copies are distinct iff
/// their non-root vertex sets or edge sets differ.
pub fn rooted_copies_by_root(g: &Graph, f: &RootedGraph, cap: u64) -> Result<BTreeMap<Vec<usize>, u64>> {
    Ok(copies_by_root_raw(g, f, cap)?
        .into_iter()
        .map(|(k, v)| (k, v.len() as u64))
        .collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct PowerCertificate {
    pub root_image: Vec<usize>,
    pub copies: Vec<CopyImage>,
}

impl PowerCertificate {
    /// Union of the placed copies, as a subgraph of the host.
    pub fn union_edges(&self) -> BTreeSet<(usize, usize)> {
        self.copies.iter().flat_map(|c| c.edges.iter().copied()).collect()
    }
}

/// Pigeonhole detector: the lexicographically smallest root image that
/// carries at least `l` pairwise distinct copies of `f`, with the first
/// `l` copies in sorted order as the certificate.
pub fn find_power_member(g: &Graph, f: &RootedGraph, l: usize, cap: u64) -> Result<Option<PowerCertificate>> {
    for (key, copies) in copies_by_root_raw(g, f, cap)? {
        if copies.len() >= l {
            return Ok(Some(PowerCertificate {
                root_image: key,
                copies: copies.into_iter().take(l).collect(),
            }));
        }
    }
    Ok(None)
}

/// Number of copies of `pat` in `host` (distinct vertex/edge images),
/// computed as injective edge-preserving embeddings divided by the
/// automorphism count.
pub fn count_subgraph_copies(host: &Graph, pat: &Graph, cap: u64) -> Result<u64> {
    let order = embedding_order(pat, &[]);
    let mut aut = 0u64;
    enumerate_embeddings(pat, pat, &order, cap, |_| aut += 1)?;
    let mut emb = 0u64;
    enumerate_embeddings(host, pat, &order, cap, |_| emb += 1)?;
    debug_assert_eq!(emb % aut, 0);
    Ok(emb / aut)
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportRow {
    pub name: String,
    pub actual: u64,
    pub predicted: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CopyCountReport {
    pub n: u64,
    pub p: f64,
    pub rows: Vec<ReportRow>,
}

impl CopyCountReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).unwrap()
    }

    /// RFC 4180 rows: name, actual, predicted, ratio — with a header.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("name,actual,predicted,ratio\r\n");
        for r in &self.rows {
            s.push_str(&format!("{},{},{},{}\r\n", r.name, r.actual, r.predicted, r.ratio));
        }
        s
    }
}

fn predicted(n: u64, p: f64, vertices: i64, edges: i64) -> f64 {
    // log-space to survive large exponents
    (vertices as f64 * (n as f64).ln() + edges as f64 * p.ln()).exp()
}

/// Compares actual copy counts of K_i (i <= t) and of the given
/// construction's unrooted graph against the n^|V| p^|E| predictions.
pub fn supersaturation_check(
    g: &Graph,
    t: usize,
    member: &ConstructionId,
    n: u64,
    p: f64,
    cap: u64,
) -> Result<CopyCountReport> {
    let mut rows = Vec::new();
    for i in 2..=t {
        let actual = count_cliques(g, i, cap)?;
        let pred = predicted(n, p, i as i64, choose2(i as i64));
        rows.push(ReportRow {
            name: format!("K{i}"),
            actual,
            predicted: pred,
            ratio: actual as f64 / pred,
        });
    }
    let f = member.build()?;
    let pat = &f.graph;
    let actual = count_subgraph_copies(g, pat, cap)?;
    let pred = predicted(n, p, pat.n() as i64, pat.edge_count() as i64);
    rows.push(ReportRow {
        name: member.label(),
        actual,
        predicted: pred,
        ratio: actual as f64 / pred,
    });
    Ok(CopyCountReport { n, p, rows })
}
