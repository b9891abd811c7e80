//! Weighted directed graphs and the matrices built from them.
//!
//! # Orientation
//!
//! An edge `j -> i` carries information from `j` to `i`. The adjacency
//! matrix is indexed by edge *heads*: `Q[i][j] = w(j -> i)`. Row `i` of the
//! stochastic matrix `S = D⁻¹Q` therefore distributes over the in-neighbours
//! of `i`, and a random walker following `S` moves *against* the edges, from
//! `i` to one of the vertices that feed it. Every module in this crate
//! assumes this convention.

mod forms;
mod parse;

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use num::bigint::BigInt;
use num::traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{format_rational, Rational, Scalar};

pub use forms::{build_matrix, stochastic_with_rows, DanglingPolicy, MatrixForm, MatrixKind, RowPatch};
pub use parse::{parse_graph, GraphFormat};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub weight: Rational,
}

/// Vertex-labelled digraph with positive exact weights.
///
/// Edges are kept sorted by `(src, dst)`; there is at most one edge per
/// ordered pair. Self-loops are ordinary edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    vertex_ids: Vec<String>,
    edges: Vec<Edge>,
    index: HashMap<String, usize>,
    // in_edges[i] = (src, edge index) for edges src -> i
    in_edges: Vec<Vec<usize>>,
    out_edges: Vec<Vec<usize>>,
}

impl Digraph {
    pub fn new(vertex_ids: Vec<String>, edges: Vec<(usize, usize, Rational)>) -> Result<Self> {
        let n = vertex_ids.len();
        let mut index = HashMap::with_capacity(n);
        for (i, id) in vertex_ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::InvalidArgument(format!("duplicate vertex label `{id}`")));
            }
        }
        let mut sorted: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
        for (src, dst, weight) in edges {
            if src >= n || dst >= n {
                return Err(Error::InvalidArgument(format!(
                    "edge ({src}, {dst}) out of range for {n} vertices"
                )));
            }
            if !weight.is_positive() {
                return Err(Error::BadWeight {
                    line: 0,
                    weight: format_rational(&weight),
                });
            }
            if sorted.insert((src, dst), weight).is_some() {
                return Err(Error::DuplicateEdge {
                    line: 0,
                    src: vertex_ids[src].clone(),
                    dst: vertex_ids[dst].clone(),
                });
            }
        }
        let edges: Vec<Edge> = sorted
            .into_iter()
            .map(|((src, dst), weight)| Edge { src, dst, weight })
            .collect();
        let mut in_edges = vec![Vec::new(); n];
        let mut out_edges = vec![Vec::new(); n];
        for (k, e) in edges.iter().enumerate() {
            in_edges[e.dst].push(k);
            out_edges[e.src].push(k);
        }
        Ok(Digraph {
            vertex_ids,
            edges,
            index,
            in_edges,
            out_edges,
        })
    }

    /// Builds a graph from labelled unit-weight edges, ordering vertices
    /// with [`order_labels`].
    pub fn from_labeled_edges<S: AsRef<str>>(edges: &[(S, S)]) -> Result<Self> {
        let weighted: Vec<_> = edges
            .iter()
            .map(|(a, b)| (a.as_ref(), b.as_ref(), Rational::one()))
            .collect();
        Self::from_weighted_labeled_edges(&weighted)
    }

    pub fn from_weighted_labeled_edges(edges: &[(&str, &str, Rational)]) -> Result<Self> {
        let labels = order_labels(edges.iter().flat_map(|(a, b, _)| [a.to_string(), b.to_string()]));
        let pos: HashMap<&str, usize> = labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
        let indexed = edges.iter().map(|(a, b, w)| (pos[a], pos[b], w.clone())).collect();
        Digraph::new(labels, indexed)
    }

    /// The pattern digraph of a square matrix in this crate's orientation:
    /// a unit-weight edge `j -> i` for every nonzero `m[i][j]`.
    pub fn from_matrix_pattern<T: Scalar>(vertex_ids: Vec<String>, m: &Matrix<T>) -> Result<Self> {
        if m.rows() != vertex_ids.len() || !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: vertex_ids.len(),
                found: m.rows(),
            });
        }
        let mut edges = Vec::new();
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                if !m[(i, j)].is_zero() {
                    edges.push((j, i, Rational::one()));
                }
            }
        }
        Digraph::new(vertex_ids, edges)
    }

    pub fn n(&self) -> usize {
        self.vertex_ids.len()
    }

    pub fn vertex_ids(&self) -> &[String] {
        &self.vertex_ids
    }

    pub fn label(&self, v: usize) -> &str {
        &self.vertex_ids[v]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn vertex(&self, label: &str) -> Result<usize> {
        self.index_of(label)
            .ok_or_else(|| Error::UnknownVertex(label.to_string()))
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_weight(&self, src: usize, dst: usize) -> Option<&Rational> {
        self.out_edges[src]
            .iter()
            .map(|&k| &self.edges[k])
            .find(|e| e.dst == dst)
            .map(|e| &e.weight)
    }

    /// Heads of edges leaving `v` (information flows `v -> w`).
    pub fn successors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.out_edges[v].iter().map(move |&k| self.edges[k].dst)
    }

    /// Tails of edges entering `v`.
    pub fn predecessors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.in_edges[v].iter().map(move |&k| self.edges[k].src)
    }

    pub fn in_edges(&self, v: usize) -> impl Iterator<Item = &Edge> + '_ {
        self.in_edges[v].iter().map(move |&k| &self.edges[k])
    }

    /// Weighted in-degree, the `v`-th row sum of `Q`.
    pub fn in_degree(&self, v: usize) -> Rational {
        self.in_edges(v).fold(Rational::zero(), |acc, e| acc + &e.weight)
    }

    /// Vertices with no incoming edge at all (zero rows of `Q`).
    pub fn sources(&self) -> Vec<usize> {
        (0..self.n()).filter(|&v| self.in_edges[v].is_empty()).collect()
    }

    /// Weak components as sorted vertex lists, ordered by smallest member.
    pub fn weak_components(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut comp = vec![usize::MAX; n];
        let mut out = Vec::new();
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![start];
            comp[start] = id;
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                for w in self.successors(v).chain(self.predecessors(v)) {
                    if comp[w] == usize::MAX {
                        comp[w] = id;
                        members.push(w);
                        stack.push(w);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    pub fn is_weakly_connected(&self) -> bool {
        self.weak_components().len() <= 1
    }

    /// Induced subgraph on `vertices` (in the given order).
    pub fn induced(&self, vertices: &[usize]) -> Digraph {
        let pos: HashMap<usize, usize> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let labels = vertices.iter().map(|&v| self.vertex_ids[v].clone()).collect();
        let edges = self
            .edges
            .iter()
            .filter_map(|e| Some((*pos.get(&e.src)?, *pos.get(&e.dst)?, e.weight.clone())))
            .collect();
        Digraph::new(labels, edges).expect("induced subgraph of a valid graph is valid")
    }

    /// Serializes to the edge-list format accepted by [`parse_graph`].
    ///
    /// Isolated vertices cannot be expressed in that format and are dropped.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for e in &self.edges {
            let w = if e.weight.is_integer() {
                e.weight.numer().to_string()
            } else {
                format_rational(&e.weight)
            };
            let _ = writeln!(out, "{} {} {}", self.vertex_ids[e.src], self.vertex_ids[e.dst], w);
        }
        out
    }
}

/// Deterministic vertex ordering: numeric ascending when every label is an
/// integer, lexicographic otherwise. Duplicates are removed.
pub fn order_labels(labels: impl IntoIterator<Item = String>) -> Vec<String> {
    let mut labels: Vec<String> = labels.into_iter().collect();
    labels.sort();
    labels.dedup();
    let numeric: Option<Vec<BigInt>> = labels.iter().map(|l| l.parse::<BigInt>().ok()).collect();
    if let Some(values) = numeric {
        let mut pairs: Vec<(BigInt, String)> = values.into_iter().zip(labels).collect();
        pairs.sort();
        pairs.into_iter().map(|(_, l)| l).collect()
    } else {
        labels
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numeric_labels_sort_numerically() {
        let l = order_labels(["10", "2", "1", "-3"].map(String::from));
        assert_eq!(l, vec!["-3", "1", "2", "10"]);
        let l = order_labels(["b", "10", "a", "2"].map(String::from));
        assert_eq!(l, vec!["10", "2", "a", "b"]);
    }

    #[test]
    fn rejects_invalid_construction() {
        let labels = vec!["a".to_string(), "b".to_string()];
        assert!(matches!(
            Digraph::new(labels.clone(), vec![(0, 1, Rational::one()), (0, 1, Rational::one())]),
            Err(Error::DuplicateEdge { .. })
        ));
        assert!(matches!(
            Digraph::new(labels.clone(), vec![(0, 1, Rational::zero())]),
            Err(Error::BadWeight { .. })
        ));
        assert!(Digraph::new(labels, vec![(0, 2, Rational::one())]).is_err());
    }

    #[test]
    fn neighbourhoods_and_components() {
        let g = Digraph::from_labeled_edges(&[("1", "2"), ("3", "2"), ("4", "5")]).unwrap();
        assert_eq!(g.n(), 5);
        assert_eq!(g.predecessors(1).collect::<Vec<_>>(), vec![0, 2]);
        assert_eq!(g.sources(), vec![0, 2, 3]);
        assert_eq!(g.weak_components(), vec![vec![0, 1, 2], vec![3, 4]]);
        assert!(!g.is_weakly_connected());
        assert_eq!(g.in_degree(1), Rational::from_integer(2.into()));
    }
}
