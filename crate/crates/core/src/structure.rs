//! Strong components, the condensation digraph and the decomposition of a
//! digraph into reaches.
//!
//! A *reach* is a maximal reachable set `R(j)` (vertex `j` plus everything
//! downstream of it). Its *cabal* `B` is the set of roots, the vertices from
//! which the whole reach is reachable; cabals are exactly the strong
//! components with no incoming edge in the condensation. The *exclusive*
//! part `H` of a reach holds the vertices that belong to no other reach, the
//! *common* part `C` the rest.

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Digraph;

/// DAG of strong components, ordered by their smallest vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Condensation {
    pub components: Vec<Vec<usize>>,
    /// Sorted, duplicate-free successor lists; no self-edges.
    pub successors: Vec<Vec<usize>>,
}

impl Condensation {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.len()];
        for succ in &self.successors {
            for &b in succ {
                deg[b] += 1;
            }
        }
        deg
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.successors[a].binary_search(&b).is_ok()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrongComponents {
    pub scc_of: Vec<usize>,
    pub condensation: Condensation,
}

/// Tarjan's algorithm, iterative. Component ids are renumbered so that they
/// increase with the smallest vertex they contain.
pub fn strong_components(g: &Digraph) -> StrongComponents {
    let n = g.n();
    let succ: Vec<Vec<usize>> = (0..n).map(|v| g.successors(v).collect()).collect();
    let unvisited = usize::MAX;
    let mut index = vec![unvisited; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut raw_comp = vec![unvisited; n];
    let mut comp_count = 0;
    let mut counter = 0;

    for root in 0..n {
        if index[root] != unvisited {
            continue;
        }
        // (vertex, next successor position)
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if *pos < succ[v].len() {
                let w = succ[v][*pos];
                *pos += 1;
                if index[w] == unvisited {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        raw_comp[w] = comp_count;
                        if w == v {
                            break;
                        }
                    }
                    comp_count += 1;
                }
            }
        }
    }

    // Renumber by smallest member: scanning vertices in order visits each
    // component first at its minimum.
    let mut relabel = vec![unvisited; comp_count];
    let mut next = 0;
    for v in 0..n {
        if relabel[raw_comp[v]] == unvisited {
            relabel[raw_comp[v]] = next;
            next += 1;
        }
    }
    let scc_of: Vec<usize> = raw_comp.iter().map(|&c| relabel[c]).collect();
    let mut components = vec![Vec::new(); comp_count];
    for v in 0..n {
        components[scc_of[v]].push(v);
    }
    let mut successors = vec![Vec::new(); comp_count];
    for e in g.edges() {
        let (a, b) = (scc_of[e.src], scc_of[e.dst]);
        if a != b {
            successors[a].push(b);
        }
    }
    for s in &mut successors {
        s.sort_unstable();
        s.dedup();
    }
    StrongComponents {
        scc_of,
        condensation: Condensation { components, successors },
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Reach {
    /// `R_i`, sorted.
    pub vertices: Vec<usize>,
    /// `B_i`, sorted.
    pub cabal: Vec<usize>,
    /// `H_i`, sorted.
    pub exclusive: Vec<usize>,
    /// `C_i = R_i \ H_i`, sorted.
    pub common: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReachDecomposition {
    n: usize,
    reaches: Vec<Reach>,
    scc_of: Vec<usize>,
    condensation: Condensation,
}

impl ReachDecomposition {
    /// Number of reaches `k`.
    pub fn k(&self) -> usize {
        self.reaches.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn reaches(&self) -> &[Reach] {
        &self.reaches
    }

    pub fn reach(&self, i: usize) -> &Reach {
        &self.reaches[i]
    }

    pub fn scc_of(&self) -> &[usize] {
        &self.scc_of
    }

    pub fn condensation(&self) -> &Condensation {
        &self.condensation
    }

    /// Vertices lying in no exclusive part, `V \ ∪H_i`, sorted.
    pub fn common_vertices(&self) -> Vec<usize> {
        let mut exclusive = vec![false; self.n];
        for r in &self.reaches {
            for &v in &r.exclusive {
                exclusive[v] = true;
            }
        }
        (0..self.n).filter(|&v| !exclusive[v]).collect()
    }

    /// For every vertex, the index of the reach whose cabal contains it.
    pub fn cabal_of(&self) -> Vec<Option<usize>> {
        let mut out = vec![None; self.n];
        for (i, r) in self.reaches.iter().enumerate() {
            for &v in &r.cabal {
                out[v] = Some(i);
            }
        }
        out
    }

    /// `{reaches:[{cabal, exclusive, common}], k}` with vertex labels.
    pub fn to_json(&self, g: &Digraph) -> serde_json::Value {
        let labels = |vs: &[usize]| -> Vec<&str> { vs.iter().map(|&v| g.label(v)).collect() };
        serde_json::json!({
            "reaches": self.reaches.iter().map(|r| serde_json::json!({
                "cabal": labels(&r.cabal),
                "exclusive": labels(&r.exclusive),
                "common": labels(&r.common),
            })).collect::<Vec<_>>(),
            "k": self.k(),
        })
    }
}

/// Reach decomposition of a weakly connected digraph.
pub fn reach_decomposition(g: &Digraph) -> Result<ReachDecomposition> {
    let components = g.weak_components().len();
    if components > 1 {
        return Err(Error::WeaklyDisconnected { components });
    }
    Ok(decompose(g))
}

/// Reach decomposition without the weak-connectivity requirement; reaches
/// of different weak components never overlap.
pub fn decompose(g: &Digraph) -> ReachDecomposition {
    let n = g.n();
    let StrongComponents { scc_of, condensation } = strong_components(g);
    let in_deg = condensation.in_degrees();

    let mut reaches = Vec::new();
    let mut cover = vec![0usize; n];
    for root in (0..condensation.len()).filter(|&c| in_deg[c] == 0) {
        let mut seen = vec![false; condensation.len()];
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        let mut vertices = Vec::new();
        while let Some(c) = queue.pop_front() {
            vertices.extend_from_slice(&condensation.components[c]);
            for &d in &condensation.successors[c] {
                if !seen[d] {
                    seen[d] = true;
                    queue.push_back(d);
                }
            }
        }
        vertices.sort_unstable();
        for &v in &vertices {
            cover[v] += 1;
        }
        reaches.push((vertices, condensation.components[root].clone()));
    }

    let mut reaches: Vec<Reach> = reaches
        .into_iter()
        .map(|(vertices, cabal)| {
            let (exclusive, common) = vertices.iter().partition(|&&v| cover[v] == 1);
            Reach {
                vertices,
                cabal,
                exclusive,
                common,
            }
        })
        .collect();
    reaches.sort_by_key(|r| r.vertices[0]);
    ReachDecomposition {
        n,
        reaches,
        scc_of,
        condensation,
    }
}

/// Period of a cabal: the gcd of the lengths of its directed cycles.
///
/// A period of 1 means the cabal block of the stochastic matrix is
/// primitive. A single vertex without a self-loop is a source and receives
/// a self-loop from the dangling patch, so it has period 1.
pub fn cabal_period(g: &Digraph, cabal: &[usize]) -> Result<usize> {
    if cabal.is_empty() {
        return Err(Error::NotStronglyConnected);
    }
    let sub = g.induced(cabal);
    let m = sub.n();
    let root = 0;

    let mut level = vec![usize::MAX; m];
    level[root] = 0;
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for w in sub.successors(v) {
            if level[w] == usize::MAX {
                level[w] = level[v] + 1;
                queue.push_back(w);
            }
        }
    }
    let mut back = vec![false; m];
    back[root] = true;
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        for w in sub.predecessors(v) {
            if !back[w] {
                back[w] = true;
                stack.push(w);
            }
        }
    }
    if level.contains(&usize::MAX) || back.contains(&false) {
        return Err(Error::NotStronglyConnected);
    }
    if m == 1 && sub.edges().is_empty() {
        return Ok(1);
    }
    let period = sub.edges().iter().fold(0usize, |acc, e| {
        let diff = (level[e.src] + 1).abs_diff(level[e.dst]);
        gcd(acc, diff)
    });
    Ok(period)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{parse_graph, GraphFormat};

    fn g7() -> Digraph {
        parse_graph("1 2\n1 6\n3 4\n4 5\n5 3\n3 7\n6 7\n7 6\n", GraphFormat::EdgeList).unwrap()
    }

    fn labels(g: &Digraph, vs: &[usize]) -> Vec<String> {
        vs.iter().map(|&v| g.label(v).to_string()).collect()
    }

    #[test]
    fn g7_components() {
        let g = g7();
        let sc = strong_components(&g);
        assert_eq!(
            sc.condensation.components,
            vec![vec![0], vec![1], vec![2, 3, 4], vec![5, 6]]
        );
        assert_eq!(sc.condensation.successors, vec![vec![1, 3], vec![], vec![3], vec![]]);
    }

    #[test]
    fn two_cycle_and_path() {
        let g = Digraph::from_labeled_edges(&[("a", "b"), ("b", "a")]).unwrap();
        assert_eq!(strong_components(&g).condensation.len(), 1);
        let g = Digraph::from_labeled_edges(&[("a", "b")]).unwrap();
        let sc = strong_components(&g);
        assert_eq!(sc.condensation.len(), 2);
        assert!(sc.condensation.has_edge(0, 1));
    }

    #[test]
    fn g7_reaches() {
        let g = g7();
        let d = reach_decomposition(&g).unwrap();
        assert_eq!(d.k(), 2);
        let r1 = d.reach(0);
        assert_eq!(labels(&g, &r1.vertices), ["1", "2", "6", "7"]);
        assert_eq!(labels(&g, &r1.cabal), ["1"]);
        assert_eq!(labels(&g, &r1.exclusive), ["1", "2"]);
        assert_eq!(labels(&g, &r1.common), ["6", "7"]);
        let r2 = d.reach(1);
        assert_eq!(labels(&g, &r2.vertices), ["3", "4", "5", "6", "7"]);
        assert_eq!(labels(&g, &r2.cabal), ["3", "4", "5"]);
        assert_eq!(labels(&g, &r2.exclusive), ["3", "4", "5"]);
        assert_eq!(labels(&g, &r2.common), ["6", "7"]);
        assert_eq!(d.common_vertices(), vec![5, 6]);
    }

    #[test]
    fn path_and_star() {
        let g = Digraph::from_labeled_edges(&[("a", "b"), ("b", "c")]).unwrap();
        let d = reach_decomposition(&g).unwrap();
        assert_eq!(d.k(), 1);
        assert_eq!(d.reach(0).cabal, vec![0]);
        assert_eq!(d.reach(0).exclusive, vec![0, 1, 2]);
        assert!(d.reach(0).common.is_empty());

        let g = Digraph::from_labeled_edges(&[("a", "c"), ("b", "c")]).unwrap();
        let d = reach_decomposition(&g).unwrap();
        assert_eq!(d.k(), 2);
        assert_eq!(d.reach(0).exclusive, vec![0]);
        assert_eq!(d.reach(1).exclusive, vec![1]);
        assert_eq!(d.reach(0).common, vec![2]);
        assert_eq!(d.reach(1).common, vec![2]);
    }

    #[test]
    fn disconnected_is_an_error() {
        let g = Digraph::from_labeled_edges(&[("a", "b"), ("c", "d")]).unwrap();
        assert_eq!(
            reach_decomposition(&g).unwrap_err(),
            Error::WeaklyDisconnected { components: 2 }
        );
        assert_eq!(decompose(&g).k(), 2);
    }

    #[test]
    fn json_shape() {
        let g = g7();
        let v = reach_decomposition(&g).unwrap().to_json(&g);
        assert_eq!(v["k"], 2);
        assert_eq!(v["reaches"][1]["cabal"], serde_json::json!(["3", "4", "5"]));
        assert_eq!(v["reaches"][0]["common"], serde_json::json!(["6", "7"]));
    }

    #[test]
    fn periods() {
        let g = g7();
        assert_eq!(cabal_period(&g, &[2, 3, 4]).unwrap(), 3);
        assert_eq!(cabal_period(&g, &[0]).unwrap(), 1);
        let g = Digraph::from_labeled_edges(&[("a", "a")]).unwrap();
        assert_eq!(cabal_period(&g, &[0]).unwrap(), 1);
        let g = Digraph::from_labeled_edges(&[("a", "b"), ("b", "a")]).unwrap();
        assert_eq!(cabal_period(&g, &[0, 1]).unwrap(), 2);
        // 2-cycle plus 3-cycle through a shared vertex
        let g = Digraph::from_labeled_edges(&[("a", "b"), ("b", "a"), ("b", "c"), ("c", "a")]).unwrap();
        assert_eq!(cabal_period(&g, &[0, 1, 2]).unwrap(), 1);
        let g = Digraph::from_labeled_edges(&[("a", "b")]).unwrap();
        assert_eq!(cabal_period(&g, &[0, 1]).unwrap_err(), Error::NotStronglyConnected);
    }
}
