//! Finite simple graphs and rooted graphs over dense integer vertex ids.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Simple undirected graph on vertices `0..n`.
///
/// Edges are kept sorted `(u,v)` with `u < v`, so equality, serialization
/// and iteration order are all canonical.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph {
            n,
            edges: BTreeSet::new(),
        }
    }

    pub fn with_edges<I: IntoIterator<Item = (usize, usize)>>(n: usize, it: I) -> Result<Self> {
        let mut g = Graph::new(n);
        for (u, v) in it {
            g.try_add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Complete graph on `n` vertices.
    pub fn complete(n: usize) -> Self {
        let mut g = Graph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Panics on out-of-range or loop edges; idempotent on duplicates.
    pub fn add_edge(&mut self, u: usize, v: usize) {
        self.try_add_edge(u, v).expect("invalid edge");
    }

    pub fn try_add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        if u == v {
            return Err(Error::Format(format!("loop at vertex {u}")));
        }
        if u >= self.n || v >= self.n {
            return Err(Error::Format(format!(
                "edge ({u},{v}) out of range for n={}",
                self.n
            )));
        }
        self.edges.insert((u.min(v), u.max(v)));
        Ok(())
    }

    /// Appends a fresh vertex and returns its id.
    pub fn add_vertex(&mut self) -> usize {
        self.n += 1;
        self.n - 1
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .filter(|&&(a, b)| a == v || b == v)
            .count()
    }

    /// Adjacency lists, sorted; built on demand.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }

    /// Adjacency as bitsets (`n <= 64` blocks of u64 each).
    pub fn adjacency_bits(&self) -> Vec<Vec<u64>> {
        let blocks = self.n.div_ceil(64).max(1);
        let mut adj = vec![vec![0u64; blocks]; self.n];
        for &(u, v) in &self.edges {
            adj[u][v / 64] |= 1 << (v % 64);
            adj[v][u / 64] |= 1 << (u % 64);
        }
        adj
    }

    /// Induced subgraph on `s`, relabeled `0..|s|` by ascending original id.
    pub fn induced_subgraph(&self, s: &BTreeSet<usize>) -> Result<Graph> {
        if let Some(&v) = s.iter().find(|&&v| v >= self.n) {
            return Err(Error::Format(format!("vertex {v} out of range")));
        }
        let order: Vec<usize> = s.iter().copied().collect();
        let index = |v: usize| order.binary_search(&v).unwrap();
        let mut g = Graph::new(order.len());
        for &(u, v) in &self.edges {
            if s.contains(&u) && s.contains(&v) {
                g.add_edge(index(u), index(v));
            }
        }
        Ok(g)
    }

    /// Disjoint union: vertices of `other` shifted by `self.n`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let mut g = self.clone();
        let off = g.n;
        g.n += other.n;
        for (u, v) in other.edges() {
            g.add_edge(u + off, v + off);
        }
        g
    }
}

/// Graph with a designated root set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedGraph {
    pub graph: Graph,
    pub roots: BTreeSet<usize>,
}

impl RootedGraph {
    pub fn new(graph: Graph, roots: impl IntoIterator<Item = usize>) -> Result<Self> {
        let roots: BTreeSet<usize> = roots.into_iter().collect();
        if let Some(&v) = roots.iter().find(|&&v| v >= graph.n()) {
            return Err(Error::Format(format!("root {v} out of range")));
        }
        Ok(RootedGraph { graph, roots })
    }

    pub fn is_root(&self, v: usize) -> bool {
        self.roots.contains(&v)
    }

    /// Vertices outside the root set, ascending.
    pub fn unrooted(&self) -> Vec<usize> {
        (0..self.graph.n())
            .filter(|v| !self.roots.contains(v))
            .collect()
    }

    /// Subgraph induced by the roots.
    pub fn root_induced(&self) -> Graph {
        self.graph.induced_subgraph(&self.roots).unwrap()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&JsonRooted::from(self)).unwrap()
    }

    pub fn from_json(bytes: &str) -> Result<Self> {
        let raw: JsonRooted =
            serde_json::from_str(bytes).map_err(|e| Error::Format(e.to_string()))?;
        raw.try_into()
    }

    /// DOT export; roots are drawn with `shape=square`.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph g {\n");
        for v in 0..self.graph.n() {
            if self.is_root(v) {
                out.push_str(&format!("  {v} [shape=square];\n"));
            } else {
                out.push_str(&format!("  {v};\n"));
            }
        }
        for (u, v) in self.graph.edges() {
            out.push_str(&format!("  {u} -- {v};\n"));
        }
        out.push_str("}\n");
        out
    }
}

/// Canonical JSON form: `{"n":..,"edges":[[u,v],..],"roots":[..]}`.
#[derive(Serialize, Deserialize)]
struct JsonRooted {
    n: usize,
    edges: Vec<[usize; 2]>,
    roots: Vec<usize>,
}

impl From<&RootedGraph> for JsonRooted {
    fn from(f: &RootedGraph) -> Self {
        JsonRooted {
            n: f.graph.n(),
            edges: f.graph.edges().map(|(u, v)| [u, v]).collect(),
            roots: f.roots.iter().copied().collect(),
        }
    }
}

impl TryFrom<JsonRooted> for RootedGraph {
    type Error = Error;

    fn try_from(raw: JsonRooted) -> Result<Self> {
        let mut g = Graph::new(raw.n);
        for [u, v] in &raw.edges {
            if g.has_edge(*u, *v) {
                return Err(Error::Format(format!("duplicate edge ({u},{v})")));
            }
            g.try_add_edge(*u, *v)?;
        }
        RootedGraph::new(g, raw.roots)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn induced_subgraph_basics() {
        let k4 = Graph::complete(4);
        let s: BTreeSet<usize> = [0, 2, 3].into_iter().collect();
        assert_eq!(k4.induced_subgraph(&s).unwrap(), Graph::complete(3));

        let path = Graph::with_edges(3, [(0, 1), (1, 2)]).unwrap();
        let ends: BTreeSet<usize> = [0, 2].into_iter().collect();
        let h = path.induced_subgraph(&ends).unwrap();
        assert_eq!(h.n(), 2);
        assert_eq!(h.edge_count(), 0);
    }

    #[test]
    fn induced_on_full_vertex_set_is_identity() {
        let g = Graph::with_edges(5, [(0, 3), (1, 2), (2, 4)]).unwrap();
        let all: BTreeSet<usize> = (0..5).collect();
        assert_eq!(g.induced_subgraph(&all).unwrap(), g);
    }

    #[test]
    fn json_round_trip() {
        let g = Graph::with_edges(2, [(0, 1)]).unwrap();
        let f = RootedGraph::new(g, [1]).unwrap();
        let js = f.to_json();
        assert_eq!(js, r#"{"n":2,"edges":[[0,1]],"roots":[1]}"#);
        assert_eq!(RootedGraph::from_json(&js).unwrap(), f);

        let empty = RootedGraph::new(Graph::new(0), []).unwrap();
        assert_eq!(empty.to_json(), r#"{"n":0,"edges":[],"roots":[]}"#);
        assert_eq!(RootedGraph::from_json(&empty.to_json()).unwrap(), empty);
    }

    #[test]
    fn json_rejects_bad_input() {
        assert!(RootedGraph::from_json(r#"{"n":2,"edges":[[0,2]],"roots":[]}"#).is_err());
        assert!(RootedGraph::from_json(r#"{"n":2,"edges":[[0,1]],"roots":[5]}"#).is_err());
        assert!(RootedGraph::from_json("not json").is_err());
    }

    #[test]
    fn dot_marks_roots() {
        let g = Graph::with_edges(2, [(0, 1)]).unwrap();
        let f = RootedGraph::new(g, [1]).unwrap();
        let dot = f.to_dot();
        assert!(dot.contains("1 [shape=square];"));
        assert!(dot.contains("0 -- 1;"));
    }
}
