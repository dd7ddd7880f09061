//! Backtracking isomorphism for small graphs.
//!
//! Good enough for the pieces it is invoked on (power members, witness
//! shapes); a hard cap keeps the exponential worst case out of reach.

use crate::{Error, Graph, Result, RootedGraph};

pub const DEFAULT_ISO_CAP: usize = 16;

/// Edge-preserving bijection test, default vertex cap.
pub fn are_isomorphic(g: &Graph, h: &Graph) -> Result<bool> {
    are_isomorphic_capped(g, h, DEFAULT_ISO_CAP)
}

pub fn are_isomorphic_capped(g: &Graph, h: &Graph, cap: usize) -> Result<bool> {
    if g.n() > cap || h.n() > cap {
        return Err(Error::CapExceeded {
            what: "isomorphism vertex count",
            got: g.n().max(h.n()) as u64,
            cap: cap as u64,
        });
    }
    Ok(iso_search(g, h, &vec![0; g.n()], &vec![0; h.n()], &[]))
}

/// Root-respecting isomorphism. With `fix_roots` the bijection must be the
/// identity on the (equal) root sets; otherwise roots map to roots.
pub fn rooted_isomorphic(f1: &RootedGraph, f2: &RootedGraph, fix_roots: bool) -> Result<bool> {
    rooted_isomorphic_capped(f1, f2, fix_roots, DEFAULT_ISO_CAP)
}

pub fn rooted_isomorphic_capped(
    f1: &RootedGraph,
    f2: &RootedGraph,
    fix_roots: bool,
    cap: usize,
) -> Result<bool> {
    let (g, h) = (&f1.graph, &f2.graph);
    if g.n() > cap || h.n() > cap {
        return Err(Error::CapExceeded {
            what: "isomorphism vertex count",
            got: g.n().max(h.n()) as u64,
            cap: cap as u64,
        });
    }
    let class_g: Vec<u8> = (0..g.n()).map(|v| f1.is_root(v) as u8).collect();
    let class_h: Vec<u8> = (0..h.n()).map(|v| f2.is_root(v) as u8).collect();
    if fix_roots {
        if f1.roots != f2.roots {
            return Ok(false);
        }
        let pinned: Vec<(usize, usize)> = f1.roots.iter().map(|&r| (r, r)).collect();
        Ok(iso_search(g, h, &class_g, &class_h, &pinned))
    } else {
        Ok(iso_search(g, h, &class_g, &class_h, &[]))
    }
}

/// Backtracking with degree and neighbor-degree-multiset pruning.
/// `class` partitions vertices (e.g. root vs non-root); images must agree.
/// `pinned` pre-assigns pairs of the bijection.
fn iso_search(
    g: &Graph,
    h: &Graph,
    class_g: &[u8],
    class_h: &[u8],
    pinned: &[(usize, usize)],
) -> bool {
    if g.n() != h.n() || g.edge_count() != h.edge_count() {
        return false;
    }
    let n = g.n();
    let adj_g = g.adjacency();
    let adj_h = h.adjacency();
    let deg_g: Vec<usize> = adj_g.iter().map(Vec::len).collect();
    let deg_h: Vec<usize> = adj_h.iter().map(Vec::len).collect();

    // Signature: (class, degree, sorted multiset of neighbor degrees).
    let sig = |adj: &Vec<Vec<usize>>, deg: &[usize], class: &[u8], v: usize| {
        let mut nd: Vec<usize> = adj[v].iter().map(|&u| deg[u]).collect();
        nd.sort_unstable();
        (class[v], deg[v], nd)
    };
    let sig_g: Vec<_> = (0..n).map(|v| sig(&adj_g, &deg_g, class_g, v)).collect();
    let sig_h: Vec<_> = (0..n).map(|v| sig(&adj_h, &deg_h, class_h, v)).collect();
    {
        let mut a = sig_g.clone();
        let mut b = sig_h.clone();
        a.sort();
        b.sort();
        if a != b {
            return false;
        }
    }

    let mut map = vec![usize::MAX; n]; // g -> h
    let mut used = vec![false; n];
    for &(u, w) in pinned {
        map[u] = w;
        used[w] = true;
    }
    // Pinned pairs must already be consistent with each other.
    for &(u, _) in pinned {
        for &(u2, _) in pinned {
            if u < u2 && g.has_edge(u, u2) != h.has_edge(map[u], map[u2]) {
                return false;
            }
        }
    }

    // Assign high-degree vertices first.
    let mut order: Vec<usize> = (0..n).filter(|&v| map[v] == usize::MAX).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(deg_g[v]));

    fn extend(
        order: &[usize],
        depth: usize,
        g: &Graph,
        h: &Graph,
        adj_g: &[Vec<usize>],
        sig_g: &[(u8, usize, Vec<usize>)],
        sig_h: &[(u8, usize, Vec<usize>)],
        map: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        if depth == order.len() {
            return true;
        }
        let v = order[depth];
        for w in 0..h.n() {
            if used[w] || sig_g[v] != sig_h[w] {
                continue;
            }
            if adj_g[v]
                .iter()
                .any(|&u| map[u] != usize::MAX && !h.has_edge(map[u], w))
            {
                continue;
            }
            // Non-neighbors already mapped must stay non-adjacent.
            if (0..g.n()).any(|u| {
                map[u] != usize::MAX && !g.has_edge(u, v) && u != v && h.has_edge(map[u], w)
            }) {
                continue;
            }
            map[v] = w;
            used[w] = true;
            if extend(order, depth + 1, g, h, adj_g, sig_g, sig_h, map, used) {
                return true;
            }
            map[v] = usize::MAX;
            used[w] = false;
        }
        false
    }

    extend(
        &order, 0, g, h, &adj_g, &sig_g, &sig_h, &mut map, &mut used,
    )
}
