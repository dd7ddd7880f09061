//! Rooted constructions: spine trees, star trees, triangle-tree variants,
//! and the two K_t-tree families, each with a deterministic labeling and,
//! where applicable, a machine-checkable clique-gluing witness.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::graph::{Graph, RootedGraph};
use crate::iso::are_isomorphic_capped;
use crate::{Error, Result};

pub const DEFAULT_POWER_CAP: usize = 14;

/// Clique-gluing certificate: cliques in build order plus, for each clique
/// after the first, the index of the earlier clique it glues onto.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub t: usize,
    pub cliques: Vec<BTreeSet<usize>>,
    /// `attach[i]` is the glue target of `cliques[i+1]`; always `< i+1`.
    pub attach: Vec<usize>,
}

impl Witness {
    /// Largest glue intersection size over all gluing steps.
    pub fn glue_size(&self) -> usize {
        (1..self.cliques.len())
            .map(|i| self.glue_intersection(i).len())
            .max()
            .unwrap_or(0)
    }

    fn glue_intersection(&self, i: usize) -> BTreeSet<usize> {
        self.cliques[i]
            .intersection(&self.cliques[self.attach[i - 1]])
            .copied()
            .collect()
    }

    /// Histogram `d` of glue sizes: `d[k-1]` counts steps with
    /// intersection size exactly `k`, for `k = 1..=glue_size()`.
    pub fn type_vector(&self) -> Vec<u64> {
        let s = self.glue_size();
        let mut d = vec![0u64; s];
        for i in 1..self.cliques.len() {
            d[self.glue_intersection(i).len() - 1] += 1;
        }
        d
    }

    /// All vertices covered by the witness.
    pub fn vertices(&self) -> BTreeSet<usize> {
        self.cliques.iter().flatten().copied().collect()
    }

    /// Checks the three structural invariants against a host graph:
    /// prefix intersections land in a single earlier clique, each glue is
    /// nonempty and proper, and the cliques' edges are exactly the host's
    /// edges inside the covered vertex set.
    pub fn validate(&self, host: &Graph) -> Result<()> {
        let b = self.cliques.len();
        if b == 0 || self.attach.len() != b - 1 {
            return Err(Error::Format("witness shape mismatch".into()));
        }
        for (i, k) in self.cliques.iter().enumerate() {
            if k.len() != self.t {
                return Err(Error::Format(format!("clique {i} has size {}", k.len())));
            }
            for &u in k {
                for &v in k {
                    if u < v && !host.has_edge(u, v) {
                        return Err(Error::Format(format!("({u},{v}) missing in host")));
                    }
                }
            }
        }
        let mut union: BTreeSet<usize> = self.cliques[0].clone();
        for i in 1..b {
            let j = self.attach[i - 1];
            if j >= i {
                return Err(Error::Format(format!("attach {j} not before clique {i}")));
            }
            let with_union: BTreeSet<usize> =
                self.cliques[i].intersection(&union).copied().collect();
            let with_target = self.glue_intersection(i);
            if with_union != with_target {
                return Err(Error::Format(format!(
                    "clique {i} meets the prefix outside clique {j}"
                )));
            }
            if with_target.is_empty() || with_target.len() == self.t {
                return Err(Error::Format(format!("clique {i} glue not proper")));
            }
            union.extend(self.cliques[i].iter().copied());
        }
        // Edge-set condition on the covered vertices.
        let mut clique_edges: BTreeSet<(usize, usize)> = BTreeSet::new();
        for k in &self.cliques {
            for &u in k {
                for &v in k {
                    if u < v {
                        clique_edges.insert((u, v));
                    }
                }
            }
        }
        let host_edges: BTreeSet<(usize, usize)> = host
            .edges()
            .filter(|&(u, v)| union.contains(&u) && union.contains(&v))
            .collect();
        if clique_edges != host_edges {
            return Err(Error::Format(
                "clique edges differ from host edges on the covered set".into(),
            ));
        }
        Ok(())
    }
}

/// Names a construction together with its parameters, for serialization,
/// planning and the CLI.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params")]
pub enum ConstructionId {
    #[serde(rename = "T2")]
    T2 { a: i64, b: i64 },
    #[serde(rename = "STAR")]
    Star { t: i64, a: i64, b: i64 },
    #[serde(rename = "T3_SPIKE")]
    T3Spike { a: i64, b: i64 },
    #[serde(rename = "T3_GLUED")]
    T3Glued { a: i64, b: i64 },
    #[serde(rename = "TYPE1")]
    Type1 { t: i64, a: i64, b: i64, s: i64 },
    #[serde(rename = "TYPE2")]
    Type2 { t: i64, a: i64, b: i64 },
    #[serde(rename = "ROOTED_CLIQUE")]
    RootedClique { t: i64, k: i64 },
}

impl ConstructionId {
    pub fn build(&self) -> Result<RootedGraph> {
        match *self {
            ConstructionId::T2 { a, b } => bc_tree(a, b),
            ConstructionId::Star { t, a, b } => star_tree(t, a, b),
            ConstructionId::T3Spike { a, b } => t3_spike(a, b),
            ConstructionId::T3Glued { a, b } => t3_glued(a, b),
            ConstructionId::Type1 { t, a, b, s } => ktree_type1(t, a, b, s),
            ConstructionId::Type2 { t, a, b } => ktree_type2(t, a, b),
            ConstructionId::RootedClique { t, k } => rooted_clique(t, k),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).unwrap()
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Format(e.to_string()))
    }

    /// Compact comma-free name, safe inside a CSV field.
    pub fn label(&self) -> String {
        match *self {
            ConstructionId::T2 { a, b } => format!("T2({a} {b})"),
            ConstructionId::Star { t, a, b } => format!("STAR({t} {a} {b})"),
            ConstructionId::T3Spike { a, b } => format!("T3_SPIKE({a} {b})"),
            ConstructionId::T3Glued { a, b } => format!("T3_GLUED({a} {b})"),
            ConstructionId::Type1 { t, a, b, s } => format!("TYPE1({t} {a} {b} {s})"),
            ConstructionId::Type2 { t, a, b } => format!("TYPE2({t} {a} {b})"),
            ConstructionId::RootedClique { t, k } => format!("ROOTED_CLIQUE({t} {k})"),
        }
    }
}

fn check(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Infeasible(msg.into()))
    }
}

/// For each spine position `i = 1..=a` (1-based), how many root leaves the
/// spine tree hangs there: the multiset `{floor(1 + k*a/(b-a)) : k < b-a}`
/// together with one extra leaf at position `a`.
fn spine_leaf_multiplicity(a: i64, b: i64) -> Vec<usize> {
    let mut mult = vec![0usize; a as usize];
    for k in 0..(b - a) {
        let i = 1 + k * a / (b - a);
        mult[(i - 1) as usize] += 1;
    }
    mult[(a - 1) as usize] += 1;
    mult
}

/// Balanced spine tree of density b/a: an unrooted path `u_1..u_a`
/// (ids `0..a`) with `b-a+1` root leaves spread along it.
pub fn bc_tree(a: i64, b: i64) -> Result<RootedGraph> {
    check(1 <= a && a < b, "need 1 <= a < b")?;
    let mult = spine_leaf_multiplicity(a, b);
    let n = (b + 1) as usize;
    let mut g = Graph::new(n);
    for i in 0..(a - 1) as usize {
        g.add_edge(i, i + 1);
    }
    let mut next = a as usize;
    let mut roots = Vec::new();
    for (i, &m) in mult.iter().enumerate() {
        for _ in 0..m {
            g.add_edge(i, next);
            roots.push(next);
            next += 1;
        }
    }
    RootedGraph::new(g, roots)
}

/// Spine tree with each root leaf at an odd spine position expanded into a
/// rooted star: `t-1` extra root leaves are appended to those roots.
pub fn star_tree(t: i64, a: i64, b: i64) -> Result<RootedGraph> {
    check(t >= 1, "need t >= 1")?;
    let base = bc_tree(a, b)?;
    let mut g = base.graph.clone();
    let mut roots: Vec<usize> = base.roots.iter().copied().collect();
    // Roots attached to u_i with i odd (1-based), i.e. even id.
    let adj = base.graph.adjacency();
    for &r in &base.roots {
        let spine_nbr = adj[r][0]; // leaves have exactly one neighbor
        if spine_nbr % 2 == 0 {
            for _ in 0..(t - 1) {
                let leaf = g.add_vertex();
                g.add_edge(r, leaf);
                roots.push(leaf);
            }
        }
    }
    RootedGraph::new(g, roots)
}

/// Spine tree with one unrooted triangle apex added over every edge.
pub fn t3_spike(a: i64, b: i64) -> Result<RootedGraph> {
    check(a + 1 <= b, "need a+1 <= b")?;
    let base = bc_tree(a, b)?;
    let mut g = base.graph.clone();
    let edges: Vec<(usize, usize)> = base.graph.edges().collect();
    for (u, v) in edges {
        let apex = g.add_vertex();
        g.add_edge(u, apex);
        g.add_edge(v, apex);
    }
    RootedGraph::new(g, base.roots.iter().copied())
}

/// Internal structural view of the glued triangle tree: the rooted graph
/// plus everything the blow-up and witness extraction need.
pub(crate) struct GluedTree {
    pub rooted: RootedGraph,
    /// Spine ids (always `0..a`).
    pub spine: Vec<usize>,
    /// Outer rooted neighbor of `x_1` / `x_a` (blown up in the Type-2
    /// construction): the leaf that does not join the chain.
    pub left_outer: usize,
    pub right_outer: usize,
    /// Defining triangles in witness order, with glue targets.
    pub triangles: Vec<[usize; 3]>,
    pub attach: Vec<usize>,
}

pub(crate) fn glued_tree(a: i64, b: i64) -> Result<GluedTree> {
    check(a >= 2 && a % 2 == 0, "need a even and positive")?;
    check(2 * a + 2 <= b, "need 2a+2 <= b")?;
    if b > 3 * a + 1 {
        // Recursive case: previous tree plus a/2 rooted apexes over
        // consecutive spine pairs.
        let mut inner = glued_tree(a, b - a)?;
        let mut g = inner.rooted.graph.clone();
        let mut roots: Vec<usize> = inner.rooted.roots.iter().copied().collect();
        for i in 0..(a / 2) as usize {
            let v = g.add_vertex();
            g.add_edge(2 * i, v);
            g.add_edge(2 * i + 1, v);
            roots.push(v);
            inner.triangles.push([2 * i, 2 * i + 1, v]);
            // Glue on the spine edge, which lives in the spine triangle
            // for edge (2i, 2i+1): witness index 1 + 2i.
            inner.attach.push(1 + 2 * i);
        }
        return Ok(GluedTree {
            rooted: RootedGraph::new(g, roots)?,
            ..inner
        });
    }

    let base = bc_tree(a, b)?;
    let a = a as usize;
    let adj = base.graph.adjacency();
    // leaves[i] = root leaves hanging off spine vertex i, ascending.
    let leaves: Vec<Vec<usize>> = (0..a)
        .map(|i| adj[i].iter().copied().filter(|&v| v >= a).collect())
        .collect();
    for (i, l) in leaves.iter().enumerate() {
        let interior = i != 0 && i != a - 1;
        let ok = if interior {
            (1..=2).contains(&l.len())
        } else {
            (2..=3).contains(&l.len())
        };
        // The degree bounds are stated without proof in the source
        // analysis; fail loudly rather than build something wrong.
        if !ok {
            return Err(Error::Infeasible(format!(
                "spine vertex {i} has {} root leaves, outside the expected range",
                l.len()
            )));
        }
    }

    // Chain positions: spine vertices with >= 2 leaves. Endpoints always
    // qualify. For each, one designated leaf enters the chain on each
    // side: `left_in[i]`/`right_in[i]`.
    let chain_pos: Vec<usize> = (0..a).filter(|&i| leaves[i].len() >= 2).collect();
    // Designated chain-entering leaves per spine vertex.
    let mut left_in = BTreeMap::new(); // plays the "incoming" chain role
    let mut right_in = BTreeMap::new(); // plays the "outgoing" chain role
    for &i in &chain_pos {
        let l = &leaves[i];
        if i == 0 {
            // Outgoing only; with 3 leaves the two smallest form the
            // outer rooted edge (convention; any pair is isomorphic).
            right_in.insert(i, *l.last().unwrap());
        } else if i == a - 1 {
            left_in.insert(i, *l.last().unwrap());
        } else {
            left_in.insert(i, l[0]);
            right_in.insert(i, l[1]);
        }
    }

    // Union-find over original ids for the chain identifications.
    let n0 = base.graph.n();
    let mut parent: Vec<usize> = (0..n0).collect();
    fn find(p: &mut Vec<usize>, v: usize) -> usize {
        if p[v] != v {
            let r = find(p, p[v]);
            p[v] = r;
        }
        p[v]
    }
    let unite = |p: &mut Vec<usize>, u: usize, v: usize| {
        let (ru, rv) = (find(p, u), find(p, v));
        if ru != rv {
            let (lo, hi) = (ru.min(rv), ru.max(rv));
            p[hi] = lo;
        }
    };
    for w in chain_pos.windows(2) {
        let (i, j) = (w[0], w[1]);
        let anchor = right_in[&i];
        unite(&mut parent, anchor, left_in[&j]);
        for y in i + 1..j {
            // Interior vertices with a single leaf join the chain class.
            if leaves[y].len() == 1 {
                unite(&mut parent, anchor, leaves[y][0]);
            }
        }
    }

    // Relabel: spine keeps 0..a; root classes follow, ordered by their
    // smallest original id.
    let mut class_reps: Vec<usize> = (a..n0)
        .map(|v| find(&mut parent, v))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    class_reps.sort_unstable();
    let mut new_id: BTreeMap<usize, usize> = (0..a).map(|v| (v, v)).collect();
    for (k, &rep) in class_reps.iter().enumerate() {
        new_id.insert(rep, a + k);
    }
    let relabel = |p: &mut Vec<usize>, v: usize| -> usize {
        let r = if v < a { v } else { find(p, v) };
        new_id[&r]
    };

    let n = a + class_reps.len();
    let mut g = Graph::new(n);
    for (u, v) in base.graph.edges() {
        let (nu, nv) = (relabel(&mut parent, u), relabel(&mut parent, v));
        g.add_edge(nu, nv);
    }
    // Outer rooted edges at the two spine endpoints: with two leaves this
    // joins the outer leaf to the chain class; with three it joins the
    // two non-chain leaves.
    let (e0a, e0b) = (leaves[0][0], leaves[0][1]);
    let (eaa, eab) = (leaves[a - 1][0], leaves[a - 1][1]);
    let added_left = (relabel(&mut parent, e0a), relabel(&mut parent, e0b));
    let added_right = (relabel(&mut parent, eaa), relabel(&mut parent, eab));
    g.add_edge(added_left.0, added_left.1);
    g.add_edge(added_right.0, added_right.1);

    let roots: Vec<usize> = (a..n).collect();
    // The outer leaf is one endpoint of the added rooted edge; the chain
    // always takes the largest-id leaf at each endpoint, so the smallest
    // never merges.
    let left_outer = relabel(&mut parent, leaves[0][0]);
    let right_outer = relabel(&mut parent, leaves[a - 1][0]);

    // Witness triangles: left endpoint, spine edges left to right, right
    // endpoint.
    let mut triangles = Vec::new();
    let mut attach = Vec::new();
    triangles.push([0, added_left.0, added_left.1]);
    // chain class over spine edge (i, i+1): the class of the designated
    // outgoing leaf at the last chain position <= i.
    let class_over = |p: &mut Vec<usize>, i: usize| -> usize {
        let pos = *chain_pos.iter().rev().find(|&&c| c <= i).unwrap();
        relabel(p, right_in[&pos])
    };
    for i in 0..a - 1 {
        let c = class_over(&mut parent, i);
        triangles.push([i, i + 1, c]);
        attach.push(triangles.len() - 2);
    }
    triangles.push([a - 1, added_right.0, added_right.1]);
    attach.push(triangles.len() - 2);

    Ok(GluedTree {
        rooted: RootedGraph::new(g, roots)?,
        spine: (0..a).collect(),
        left_outer,
        right_outer,
        triangles,
        attach,
    })
}

/// Triangle tree of density b/a built by identifying roots of the spine
/// tree along a chain and closing the two ends with rooted edges.
pub fn t3_glued(a: i64, b: i64) -> Result<RootedGraph> {
    Ok(glued_tree(a, b)?.rooted)
}

/// Type 1 K_t-tree: spine-tree vertices blown up to s-cliques, edges to
/// (t-2s)-cliques of spikes fully joined to both endpoint blocks.
pub fn ktree_type1(t: i64, a: i64, b: i64, s: i64) -> Result<RootedGraph> {
    check(t >= 3, "need t >= 3")?;
    check(1 <= s && 2 * s <= t, "need 1 <= s <= t/2")?;
    check(a + 1 <= b, "need a+1 <= b")?;
    let base = bc_tree(a, b)?;
    let n0 = base.graph.n();
    let (s, spike) = (s as usize, (t - 2 * s) as usize);
    // Block of each base vertex: spine blocks first, then root blocks.
    let mut blocks: Vec<Vec<usize>> = Vec::with_capacity(n0);
    let mut next = 0;
    for _ in 0..n0 {
        blocks.push((next..next + s).collect());
        next += s;
    }
    let mut g = Graph::new(next);
    for bl in &blocks {
        for i in 0..bl.len() {
            for j in i + 1..bl.len() {
                g.add_edge(bl[i], bl[j]);
            }
        }
    }
    for (u, v) in base.graph.edges() {
        for &x in &blocks[u] {
            for &y in &blocks[v] {
                g.add_edge(x, y);
            }
        }
        let mut sp = Vec::with_capacity(spike);
        for _ in 0..spike {
            sp.push(g.add_vertex());
        }
        for i in 0..sp.len() {
            for j in i + 1..sp.len() {
                g.add_edge(sp[i], sp[j]);
            }
        }
        for &x in sp.iter() {
            for &y in blocks[u].iter().chain(blocks[v].iter()) {
                g.add_edge(x, y);
            }
        }
    }
    let roots: Vec<usize> = base
        .roots
        .iter()
        .flat_map(|&r| blocks[r].iter().copied())
        .collect();
    RootedGraph::new(g, roots)
}

/// Type 2 K_t-tree: the glued triangle tree with its unrooted vertices and
/// the two outer rooted neighbors blown up to (t-1)/2-cliques.
pub fn ktree_type2(t: i64, a: i64, b: i64) -> Result<RootedGraph> {
    check(t >= 3 && t % 2 == 1, "need t >= 3 odd")?;
    let glued = glued_tree(a, b)?;
    let (g, _blocks) = blow_up_type2(t, &glued)?;
    Ok(g)
}

/// Shared blow-up for the Type 2 construction; returns the rooted graph
/// and the block of every original vertex.
fn blow_up_type2(t: i64, glued: &GluedTree) -> Result<(RootedGraph, Vec<Vec<usize>>)> {
    let m = ((t - 1) / 2) as usize;
    let base = &glued.rooted;
    let n0 = base.graph.n();
    let a = glued.spine.len();
    let blown =
        |v: usize| -> bool { v < a || v == glued.left_outer || v == glued.right_outer };
    let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); n0];
    let mut next = 0;
    for v in 0..n0 {
        let size = if blown(v) { m } else { 1 };
        blocks[v] = (next..next + size).collect();
        next += size;
    }
    let mut g = Graph::new(next);
    for bl in &blocks {
        for i in 0..bl.len() {
            for j in i + 1..bl.len() {
                g.add_edge(bl[i], bl[j]);
            }
        }
    }
    for (u, v) in base.graph.edges() {
        for &x in &blocks[u] {
            for &y in &blocks[v] {
                g.add_edge(x, y);
            }
        }
    }
    let roots: Vec<usize> = (0..n0)
        .filter(|&v| base.is_root(v))
        .flat_map(|v| blocks[v].iter().copied())
        .collect();
    Ok((RootedGraph::new(g, roots)?, blocks))
}

/// Complete graph on t vertices with the first k designated as roots.
pub fn rooted_clique(t: i64, k: i64) -> Result<RootedGraph> {
    check(1 <= k && k < t, "need 1 <= k < t")?;
    RootedGraph::new(Graph::complete(t as usize), 0..k as usize)
}

/// Witness for any construction that is a K_t-tree: the defining clique
/// sequence in build order.
pub fn canonical_witness(c: &ConstructionId) -> Result<Witness> {
    match *c {
        ConstructionId::T3Spike { a, b } => type1_witness(3, a, b, 1),
        ConstructionId::Type1 { t, a, b, s } => type1_witness(t, a, b, s),
        ConstructionId::T3Glued { a, b } => {
            let g = glued_tree(a, b)?;
            Ok(Witness {
                t: 3,
                cliques: g
                    .triangles
                    .iter()
                    .map(|tr| tr.iter().copied().collect())
                    .collect(),
                attach: g.attach.clone(),
            })
        }
        ConstructionId::Type2 { t, a, b } => {
            check(t >= 3 && t % 2 == 1, "need t >= 3 odd")?;
            let glued = glued_tree(a, b)?;
            let (_, blocks) = blow_up_type2(t, &glued)?;
            let cliques: Vec<BTreeSet<usize>> = glued
                .triangles
                .iter()
                .map(|tr| tr.iter().flat_map(|&v| blocks[v].iter().copied()).collect())
                .collect();
            Ok(Witness {
                t: t as usize,
                cliques,
                attach: glued.attach.clone(),
            })
        }
        _ => Err(Error::Infeasible(
            "construction is not a clique tree".into(),
        )),
    }
}

/// Type 1 witness: one K_t per spine-tree edge, ordered so that each new
/// edge touches the tree built so far.
fn type1_witness(t: i64, a: i64, b: i64, s: i64) -> Result<Witness> {
    check(t >= 3, "need t >= 3")?;
    check(1 <= s && 2 * s <= t, "need 1 <= s <= t/2")?;
    let base = bc_tree(a, b)?;
    let n0 = base.graph.n();
    let (s_us, spike) = (s as usize, (t - 2 * s) as usize);
    let block = |v: usize| -> Vec<usize> { (v * s_us..(v + 1) * s_us).collect() };
    // Spike blocks are appended per edge in sorted edge order, matching
    // the labeling of the builder.
    let mut spike_start = n0 * s_us;
    let mut clique_of_edge: BTreeMap<(usize, usize), BTreeSet<usize>> = BTreeMap::new();
    for (u, v) in base.graph.edges() {
        let mut k: BTreeSet<usize> = block(u).into_iter().chain(block(v)).collect();
        k.extend(spike_start..spike_start + spike);
        spike_start += spike;
        clique_of_edge.insert((u, v), k);
    }
    // Order the tree's edges by growth from vertex 0.
    let adj = base.graph.adjacency();
    let mut seen = vec![false; n0];
    let mut order: Vec<(usize, usize)> = Vec::new();
    let mut introduced_by = vec![usize::MAX; n0];
    let mut queue = std::collections::VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                introduced_by[v] = order.len();
                order.push((u.min(v), u.max(v)));
                queue.push_back(v);
            }
        }
    }
    let mut cliques = Vec::new();
    let mut attach = Vec::new();
    let mut clique_with: Vec<usize> = vec![usize::MAX; n0]; // earliest clique containing v's block
    for (idx, &(u, v)) in order.iter().enumerate() {
        cliques.push(clique_of_edge[&(u, v)].clone());
        let old = if clique_with[u] != usize::MAX { u } else { v };
        if idx > 0 {
            attach.push(clique_with[old]);
        }
        for w in [u, v] {
            if clique_with[w] == usize::MAX {
                clique_with[w] = idx;
            }
        }
    }
    Ok(Witness {
        t: t as usize,
        cliques,
        attach,
    })
}

/// All graphs obtainable as unions of `ell` pairwise distinct copies of
/// `f` that agree pointwise on the roots, up to isomorphism.
///
/// Copies are distinct when their placed edge sets or unrooted vertex
/// images differ; outside the roots they may overlap arbitrarily.
pub fn power_members(f: &RootedGraph, ell: usize, cap: usize) -> Result<Vec<Graph>> {
    if ell == 0 {
        return Err(Error::Infeasible("need ell >= 1".into()));
    }
    let unrooted = f.unrooted();
    let m = unrooted.len();
    if m * ell > cap {
        return Err(Error::CapExceeded {
            what: "unrooted vertices times ell",
            got: (m * ell) as u64,
            cap: cap as u64,
        });
    }
    let rho = f.roots.len();
    // Host labels: roots relabeled 0..rho (ascending), pool after.
    let root_new: BTreeMap<usize, usize> = f
        .roots
        .iter()
        .enumerate()
        .map(|(i, &r)| (r, i))
        .collect();
    let edges: Vec<(usize, usize)> = f.graph.edges().collect();
    let uv_index: BTreeMap<usize, usize> =
        unrooted.iter().enumerate().map(|(i, &v)| (v, i)).collect();

    type Placed = (BTreeSet<usize>, BTreeSet<(usize, usize)>);
    let place = |asg: &[usize]| -> Placed {
        let map = |v: usize| -> usize {
            root_new
                .get(&v)
                .copied()
                .unwrap_or_else(|| asg[uv_index[&v]])
        };
        let verts: BTreeSet<usize> = asg.iter().copied().collect();
        let es: BTreeSet<(usize, usize)> = edges
            .iter()
            .map(|&(u, v)| {
                let (a, b) = (map(u), map(v));
                (a.min(b), a.max(b))
            })
            .collect();
        (verts, es)
    };

    let mut results: Vec<Graph> = Vec::new();
    // Depth-first over copies; each copy assigns its unrooted vertices to
    // already-introduced pool ids or the next fresh one (canonical
    // fresh-label growth).
    fn rec(
        copy: usize,
        ell: usize,
        m: usize,
        rho: usize,
        used_pool: usize,
        copies: &mut Vec<(Vec<usize>, (BTreeSet<usize>, BTreeSet<(usize, usize)>))>,
        place: &dyn Fn(&[usize]) -> (BTreeSet<usize>, BTreeSet<(usize, usize)>),
        emit: &mut dyn FnMut(&[(Vec<usize>, (BTreeSet<usize>, BTreeSet<(usize, usize)>))], usize),
    ) {
        if copy == ell {
            emit(copies, used_pool);
            return;
        }
        // Assign this copy's m unrooted vertices.
        let mut asg = vec![usize::MAX; m];
        fn assign(
            pos: usize,
            m: usize,
            rho: usize,
            used_pool: usize,
            fresh_here: usize,
            asg: &mut Vec<usize>,
            out: &mut Vec<(Vec<usize>, usize)>,
        ) {
            if pos == m {
                out.push((asg.clone(), used_pool + fresh_here));
                return;
            }
            for cand in rho..rho + used_pool + fresh_here + 1 {
                if asg[..pos].contains(&cand) {
                    continue;
                }
                let is_fresh = cand == rho + used_pool + fresh_here;
                asg[pos] = cand;
                assign(
                    pos + 1,
                    m,
                    rho,
                    used_pool,
                    fresh_here + is_fresh as usize,
                    asg,
                    out,
                );
                asg[pos] = usize::MAX;
            }
        }
        let mut options = Vec::new();
        assign(0, m, rho, used_pool, 0, &mut asg, &mut options);
        for (asg, new_used) in options {
            let placed = place(&asg);
            if copies.iter().any(|(_, p)| *p == placed) {
                continue; // copies must be pairwise distinct
            }
            copies.push((asg, placed));
            rec(copy + 1, ell, m, rho, new_used, copies, place, emit);
            copies.pop();
        }
    }

    let mut seen_unions: Vec<Graph> = Vec::new();
    {
        let mut emit = |copies: &[(Vec<usize>, Placed)], used_pool: usize| {
            let n = rho + used_pool;
            let mut g = Graph::new(n);
            for (_, (_, es)) in copies {
                for &(u, v) in es {
                    g.add_edge(u, v);
                }
            }
            seen_unions.push(g);
        };
        let mut copies = Vec::new();
        rec(0, ell, m, rho, 0, &mut copies, &place, &mut emit);
    }
    for g in seen_unions {
        let dup = results
            .iter()
            .any(|h| are_isomorphic_capped(h, &g, cap + rho).unwrap_or(false));
        if !dup {
            results.push(g);
        }
    }
    Ok(results)
}
