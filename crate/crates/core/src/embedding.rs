//! The heat kernel at unit time as a stochastic matrix in its own right.
//!
//! `S̃ = e^{−𝓛}` is row-stochastic and non-negative, its positivity pattern
//! is the reflexive-transitive closure of the walk digraph, and `𝓛̃ = I − S̃`
//! has the same kernels as `𝓛`. Because the diagonal of `S̃` is positive,
//! every cabal of `S̃` is aperiodic and plain powers converge.

use std::collections::VecDeque;

use serde::Serialize;

use crate::dynamics::heat_kernel;
use crate::error::Result;
use crate::graph::{build_matrix, DanglingPolicy, Digraph, MatrixKind};
use crate::kernels::KernelBases;
use crate::matrix::Matrix;
use crate::scalar::Rational;
use crate::structure::decompose;

/// Default threshold separating structural zeros from positive entries.
pub const PATTERN_EPS: f64 = 1e-12;

/// Truncation tolerance used for `e^{−𝓛}` in these checks.
const HEAT_TOL: f64 = 1e-15;

/// Vertices reachable from `v` by a path with at least one edge.
fn reachable_from(g: &Digraph, v: usize) -> Vec<bool> {
    let mut seen = vec![false; g.n()];
    let mut queue: VecDeque<usize> = g.successors(v).collect();
    for &w in &queue {
        seen[w] = true;
    }
    while let Some(u) = queue.pop_front() {
        for w in g.successors(u) {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    seen
}

/// Unit-weight digraph with an edge `i → j` whenever `g` has a path of
/// length at least one from `i` to `j`.
pub fn transitive_closure(g: &Digraph) -> Digraph {
    let one = Rational::from_integer(1.into());
    let edges = (0..g.n())
        .flat_map(|i| {
            let seen = reachable_from(g, i);
            let one = one.clone();
            (0..g.n()).filter(move |&j| seen[j]).map(move |j| (i, j, one.clone()))
        })
        .collect();
    Digraph::new(g.vertex_ids().to_vec(), edges).expect("closure of a valid graph is valid")
}

/// The walk digraph of `S`: an edge `i → j` whenever `S[i][j] ≠ 0`.
fn walk_digraph(labels: &[String], s: &Matrix<f64>) -> Digraph {
    Digraph::from_matrix_pattern(labels.to_vec(), &s.transpose()).expect("square matrix with matching labels")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosureReport {
    pub is_row_stochastic: bool,
    /// `max_i |Σ_j S̃[i][j] − 1|`.
    pub max_row_residual: f64,
    pub is_nonnegative: bool,
    pub min_entry: f64,
    /// Whether `{S̃ > ε}` is the reflexive-transitive closure of the walk.
    pub closure_consistent: bool,
    /// Entries where the two patterns differ, as `(row, column)`.
    pub pattern_mismatches: Vec<(usize, usize)>,
    pub kernels_equal: bool,
    /// `‖Π − Π̃‖∞`.
    pub projection_distance: f64,
}

impl ClosureReport {
    pub fn ok(&self) -> bool {
        self.is_row_stochastic && self.is_nonnegative && self.closure_consistent && self.kernels_equal
    }
}

/// Checks the three properties of `e^{−𝓛}` and kernel equality.
///
/// `eps` bounds the row-sum residual and negative entries and separates
/// positive entries from zeros; `kernel_tol` bounds `‖Π − Π̃‖∞`.
pub fn closure_check(g: &Digraph, policy: DanglingPolicy, eps: f64, kernel_tol: f64) -> Result<ClosureReport> {
    let n = g.n();
    let l = build_matrix::<f64>(g, MatrixKind::RwLaplacian, Some(policy))?;
    let s = l.stochastic()?;
    let h = heat_kernel(l.data(), 1.0, HEAT_TOL)?;

    let max_row_residual = h.row_sums().iter().map(|r| (r - 1.0).abs()).fold(0.0, f64::max);
    let min_entry = (0..n).flat_map(|i| h.row(i).to_vec()).fold(f64::INFINITY, f64::min);

    let closure = transitive_closure(&walk_digraph(g.vertex_ids(), &s));
    let mut pattern_mismatches = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let expected = i == j || closure.edge_weight(i, j).is_some();
            if (h[(i, j)] > eps) != expected {
                pattern_mismatches.push((i, j));
            }
        }
    }
    let projection_distance = projection_distance(g, &s, &h)?;
    Ok(ClosureReport {
        is_row_stochastic: max_row_residual <= eps,
        max_row_residual,
        is_nonnegative: min_entry >= -eps,
        min_entry,
        closure_consistent: pattern_mismatches.is_empty(),
        pattern_mismatches,
        kernels_equal: projection_distance < kernel_tol,
        projection_distance,
    })
}

fn projection_distance(g: &Digraph, s: &Matrix<f64>, h: &Matrix<f64>) -> Result<f64> {
    let flow = Digraph::from_matrix_pattern(g.vertex_ids().to_vec(), s)?;
    let dec = decompose(&flow);
    let pi = KernelBases::from_stochastic(s, dec.clone())?;
    let pi_tilde = KernelBases::from_stochastic(h, dec)?;
    Ok(pi.projection().sub(pi_tilde.projection())?.norm_inf())
}

/// `‖Π − Π̃‖∞ < tol`, with `Π̃` built from `𝓛̃ = I − e^{−𝓛}` on the same
/// reach decomposition.
pub fn kernel_equality_check(g: &Digraph, policy: DanglingPolicy, tol: f64) -> Result<bool> {
    let l = build_matrix::<f64>(g, MatrixKind::RwLaplacian, Some(policy))?;
    let s = l.stochastic()?;
    let h = heat_kernel(l.data(), 1.0, HEAT_TOL)?;
    Ok(projection_distance(g, &s, &h)? < tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{parse_graph, GraphFormat};

    fn g7() -> Digraph {
        parse_graph("1 2\n1 6\n3 4\n4 5\n5 3\n3 7\n6 7\n7 6\n", GraphFormat::EdgeList).unwrap()
    }

    #[test]
    fn closures() {
        let p = Digraph::from_labeled_edges(&[("a", "b"), ("b", "c")]).unwrap();
        let c = transitive_closure(&p);
        let pairs: Vec<_> = c.edges().iter().map(|e| (e.src, e.dst)).collect();
        assert_eq!(pairs, vec![(0, 1), (0, 2), (1, 2)]);

        let g = g7();
        let c = transitive_closure(&g);
        assert!(c.edge_weight(0, 6).is_some());
        assert!(c.edge_weight(2, 5).is_some());
        assert!(c.edge_weight(1, 0).is_none());

        let cyc = Digraph::from_labeled_edges(&[("a", "b"), ("b", "a")]).unwrap();
        assert_eq!(transitive_closure(&cyc).edges().len(), 4);
    }

    #[test]
    fn g7_passes() {
        let r = closure_check(&g7(), DanglingPolicy::SelfLoop, PATTERN_EPS, 1e-8).unwrap();
        assert!(r.ok(), "{r:?}");
        let r = closure_check(&g7(), DanglingPolicy::Uniform, PATTERN_EPS, 1e-8).unwrap();
        assert!(r.ok(), "{r:?}");
    }

    #[test]
    fn lower_triangular_fill() {
        let s = Matrix::from_rows(vec![vec![1.0, 0.0, 0.0], vec![0.5, 0.5, 0.0], vec![0.0, 0.6, 0.4]]);
        let l = Matrix::identity(3).sub(&s).unwrap();
        let h = heat_kernel(&l, 1.0, 1e-15).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(h[(i, j)] > PATTERN_EPS, j <= i, "({i},{j})");
            }
        }
    }

    #[test]
    fn single_vertex_and_two_cycle() {
        let one = Digraph::new(vec!["v".into()], vec![]).unwrap();
        let r = closure_check(&one, DanglingPolicy::SelfLoop, PATTERN_EPS, 1e-8).unwrap();
        assert!(r.ok());
        assert!(kernel_equality_check(&one, DanglingPolicy::SelfLoop, 1e-8).unwrap());
        let cyc = Digraph::from_labeled_edges(&[("a", "b"), ("b", "a")]).unwrap();
        assert!(kernel_equality_check(&cyc, DanglingPolicy::SelfLoop, 1e-8).unwrap());
    }
}
