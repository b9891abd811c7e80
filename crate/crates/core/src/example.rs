//! The seven-vertex worked example and its published values.
//!
//! Vertex 1 leads `{1, 2}`, the 3-cycle `3 → 4 → 5 → 3` is a second cabal,
//! and the 2-cycle `{6, 7}` is fed by both. [`verify`] recomputes every
//! published quantity and reports one [`CheckItem`] per value.

use std::fmt;

use num::traits::Zero;
use serde::Serialize;

use crate::dynamics::{
    absorption_probabilities, consensus_limit, diffusion_limit, diffusion_step, heat_kernel, Measure, StateVector,
};
use crate::embedding::{closure_check, PATTERN_EPS};
use crate::error::Result;
use crate::graph::{build_matrix, parse_graph, DanglingPolicy, Digraph, GraphFormat, MatrixKind};
use crate::kernels::KernelBases;
use crate::matrix::{Lu, Matrix};
use crate::ranking::{
    extend_graph, influence_vector, pagerank_power, pagerank_residual, pagerank_resolvent, pagerank_via_extension,
    stochastic_forcing_rows, teleport_relation_check,
};
use crate::scalar::{format_rational, Rational, Scalar};
use crate::structure::reach_decomposition;

/// Edge list of the example graph.
pub const G7_EDGES: &str = "\
# two reaches sharing the common part {6, 7}
1 2
1 6
3 4
4 5
5 3
3 7
6 7
7 6
";

pub fn g7() -> Digraph {
    parse_graph(G7_EDGES, GraphFormat::EdgeList).expect("embedded example parses")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckItem {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        if self.detail.is_empty() {
            write!(f, "{tag} {}", self.name)
        } else {
            write!(f, "{tag} {}: {}", self.name, self.detail)
        }
    }
}

fn q(p: i64, d: i64) -> Rational {
    Rational::ratio(p, d)
}

fn over(v: &[i64], d: i64) -> Vec<Rational> {
    v.iter().map(|&p| q(p, d)).collect()
}

fn matrix_over(rows: &[[i64; 7]], d: i64) -> Matrix<Rational> {
    Matrix::from_rows(rows.iter().map(|r| over(r, d)).collect())
}

fn show(v: &[Rational]) -> String {
    let parts: Vec<String> = v.iter().map(format_rational).collect();
    format!("({})", parts.join(", "))
}

struct Items(Vec<CheckItem>);

impl Items {
    fn push(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.0.push(CheckItem {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        });
    }

    fn vector(&mut self, name: &str, got: &[Rational], expected: &[Rational]) {
        let passed = got == expected;
        let detail = if passed {
            show(got)
        } else {
            format!("got {}, expected {}", show(got), show(expected))
        };
        self.push(name, passed, detail);
    }

    fn matrix(&mut self, name: &str, got: &Matrix<Rational>, expected: &Matrix<Rational>) {
        let passed = got == expected;
        let detail = if passed {
            String::new()
        } else {
            let row = (0..got.rows().min(expected.rows()))
                .find(|&i| got.row(i) != expected.row(i))
                .unwrap_or(0);
            format!("row {} differs: got {}", row + 1, show(got.row(row)))
        };
        self.push(name, passed, detail);
    }
}

/// Runs every published check of the example against `g`.
pub fn verify(g: &Digraph) -> Result<Vec<CheckItem>> {
    let mut items = Items(Vec::new());
    let labels = |vs: &[usize]| -> Vec<String> { vs.iter().map(|&v| g.label(v).to_string()).collect() };
    let ids = |vs: &[&str]| -> Vec<String> { vs.iter().map(|s| s.to_string()).collect() };

    let dec = reach_decomposition(g)?;
    let expected = [
        (
            ids(&["1", "2", "6", "7"]),
            ids(&["1"]),
            ids(&["1", "2"]),
            ids(&["6", "7"]),
        ),
        (
            ids(&["3", "4", "5", "6", "7"]),
            ids(&["3", "4", "5"]),
            ids(&["3", "4", "5"]),
            ids(&["6", "7"]),
        ),
    ];
    let got: Vec<_> = dec
        .reaches()
        .iter()
        .map(|r| {
            (
                labels(&r.vertices),
                labels(&r.cabal),
                labels(&r.exclusive),
                labels(&r.common),
            )
        })
        .collect();
    items.push(
        "reaches R, cabals B, exclusive parts H, common parts C",
        got == expected,
        format!("{:?}", got.iter().map(|r| &r.0).collect::<Vec<_>>()),
    );
    if g.n() != 7 || dec.k() != 2 {
        items.push(
            "graph shape",
            false,
            format!("expected 7 vertices and 2 reaches, found {} and {}", g.n(), dec.k()),
        );
        return Ok(items.0);
    }

    let m = build_matrix::<Rational>(g, MatrixKind::Combinatorial, None)?;
    let printed_m = matrix_over(
        &[
            [0, 0, 0, 0, 0, 0, 0],
            [-1, 1, 0, 0, 0, 0, 0],
            [0, 0, 1, 0, -1, 0, 0],
            [0, 0, -1, 1, 0, 0, 0],
            [0, 0, 0, -1, 1, 0, 0],
            [-1, 0, 0, 0, 0, 2, -1],
            [0, 0, -1, 0, 0, -1, 2],
        ],
        1,
    );
    items.matrix("combinatorial Laplacian L = D - Q", m.data(), &printed_m);

    let pol = Some(DanglingPolicy::SelfLoop);
    let s = build_matrix::<Rational>(g, MatrixKind::Stochastic, pol)?;
    let printed_s = matrix_over(
        &[
            [2, 0, 0, 0, 0, 0, 0],
            [2, 0, 0, 0, 0, 0, 0],
            [0, 0, 0, 0, 2, 0, 0],
            [0, 0, 2, 0, 0, 0, 0],
            [0, 0, 0, 2, 0, 0, 0],
            [1, 0, 0, 0, 0, 0, 1],
            [0, 0, 1, 0, 0, 1, 0],
        ],
        2,
    );
    items.matrix("stochastic matrix S", s.data(), &printed_s);
    let l = build_matrix::<Rational>(g, MatrixKind::RwLaplacian, pol)?;
    items.matrix(
        "random-walk Laplacian I - S",
        l.data(),
        &Matrix::identity(7).sub(&printed_s)?,
    );

    let bases = KernelBases::compute(&l, dec.clone())?;
    items.vector(
        "right kernel vector gamma_1",
        &bases.gamma_column(0),
        &over(&[3, 3, 0, 0, 0, 2, 1], 3),
    );
    items.vector(
        "right kernel vector gamma_2",
        &bases.gamma_column(1),
        &over(&[0, 0, 3, 3, 3, 1, 2], 3),
    );
    items.vector(
        "left kernel vector gamma_bar_1",
        bases.gamma_bar_row(0),
        &over(&[1, 0, 0, 0, 0, 0, 0], 1),
    );
    items.vector(
        "left kernel vector gamma_bar_2",
        bases.gamma_bar_row(1),
        &over(&[0, 0, 1, 1, 1, 0, 0], 3),
    );
    let printed_pi = matrix_over(
        &[
            [9, 0, 0, 0, 0, 0, 0],
            [9, 0, 0, 0, 0, 0, 0],
            [0, 0, 3, 3, 3, 0, 0],
            [0, 0, 3, 3, 3, 0, 0],
            [0, 0, 3, 3, 3, 0, 0],
            [6, 0, 1, 1, 1, 0, 0],
            [3, 0, 2, 2, 2, 0, 0],
        ],
        63,
    );
    items.matrix(
        "(1/7) Pi equals the 1/63-scaled matrix",
        &bases.projection().scale(&q(1, 7)),
        &printed_pi,
    );
    items.vector(
        "column 1 of Pi",
        &bases.projection().column(0),
        &over(&[3, 3, 0, 0, 0, 2, 1], 3),
    );

    let inf = influence_vector(&bases);
    items.vector("influence vector", inf.as_slice(), &over(&[9, 0, 4, 4, 4, 0, 0], 21));

    let stat = Measure::new(bases.gamma_bar_row(1).to_vec())?;
    items.vector(
        "gamma_bar_2 is stationary under S",
        diffusion_step(&stat, s.data())?.as_slice(),
        stat.as_slice(),
    );
    items.vector(
        "diffusion limit from vertex 6",
        diffusion_limit(&Measure::delta(7, 5), &bases)?.as_slice(),
        &over(&[6, 0, 1, 1, 1, 0, 0], 9),
    );
    items.vector(
        "consensus limit of e_1",
        consensus_limit(&StateVector::basis(7, 0), &bases)?.as_slice(),
        &over(&[3, 3, 0, 0, 0, 2, 1], 3),
    );
    items.vector(
        "consensus limit of e_2",
        consensus_limit(&StateVector::basis(7, 1), &bases)?.as_slice(),
        &over(&[0; 7], 1),
    );
    items.vector(
        "absorption probabilities from vertex 6",
        &absorption_probabilities(5, &bases)?,
        &over(&[2, 1], 3),
    );
    items.vector(
        "absorption probabilities from vertex 7",
        &absorption_probabilities(6, &bases)?,
        &over(&[1, 2], 3),
    );

    let alpha = q(1, 1);
    let resolvent = Lu::factor(&Matrix::identity(7).add(l.data())?)?.solve_matrix(&Matrix::identity(7))?;
    let printed_resolvent = matrix_over(
        &[
            [210, 0, 0, 0, 0, 0, 0],
            [105, 105, 0, 0, 0, 0, 0],
            [0, 0, 120, 30, 60, 0, 0],
            [0, 0, 60, 120, 30, 0, 0],
            [0, 0, 30, 60, 120, 0, 0],
            [56, 0, 8, 2, 4, 112, 28],
            [14, 0, 32, 8, 16, 28, 112],
        ],
        210,
    );
    items.matrix("resolvent (I + L)^-1", &resolvent, &printed_resolvent);

    let pagerank = over(&[77, 21, 50, 44, 46, 28, 28], 294);
    items.vector(
        "pagerank at alpha = 1 (resolvent)",
        pagerank_resolvent(l.data(), &alpha)?.as_slice(),
        &pagerank,
    );
    items.vector(
        "pagerank at alpha = 1 (extended graph)",
        pagerank_via_extension::<Rational>(g, &alpha, DanglingPolicy::SelfLoop)?.as_slice(),
        &pagerank,
    );
    let (power, iters) = pagerank_power(s.data(), 0.5, 1e-12, 10_000)?;
    let err = power
        .as_slice()
        .iter()
        .zip(&pagerank)
        .map(|(a, b)| (a - b.to_f64()).abs())
        .fold(0.0, f64::max);
    items.push(
        "pagerank at beta = 1/2 (power iteration, tol 1e-12)",
        err <= 1e-12,
        format!("max deviation {err:.3e} after {iters} iterations"),
    );
    let (_, iters) = pagerank_power(s.data(), 0.85, 1e-4, 10_000)?;
    items.push(
        "power iteration at beta = 0.85 reaches 1e-4 within 60 iterations",
        iters <= 60,
        format!("{iters} iterations"),
    );

    let ext = extend_graph(g, &alpha, DanglingPolicy::SelfLoop)?;
    let lt = build_matrix::<Rational>(&ext, MatrixKind::RwLaplacian, None)?;
    let block = lt
        .data()
        .select(&(7..14).collect::<Vec<_>>(), &(0..7).collect::<Vec<_>>());
    items.matrix(
        "extended Laplacian lower-left block is -alpha/(1+alpha) I",
        &block,
        &Matrix::identity(7).scale(&q(-1, 2)),
    );

    let report = teleport_relation_check::<Rational>(g, &alpha)?;
    items.vector(
        "teleporting pagerank, zero row of vertex 1 made uniform",
        &report.pagerank_teleport,
        &over(&[77, 42, 100, 88, 92, 56, 56], 511),
    );
    items.push(
        "teleporting identities and pi_t = (1-beta)pi/(1-beta pi) = 11/73",
        report.holds(0.0) && report.pi_t == q(11, 73) && report.pi == q(77, 294),
        format!(
            "pi = {}, pi_t = {}",
            format_rational(&report.pi),
            format_rational(&report.pi_t)
        ),
    );
    let printed_t = over(&[56, 21, 50, 44, 46, 28, 28], 273);
    let row2: Matrix<Rational> = stochastic_forcing_rows(g, &[1])?;
    let row1: Matrix<Rational> = stochastic_forcing_rows(g, &[0])?;
    let r2 = pagerank_residual(&row2, &alpha, &printed_t)?;
    let r1 = pagerank_residual(&row1, &alpha, &printed_t)?;
    items.push(
        "printed teleporting vector (56, 21, 50, 44, 46, 28, 28)/273 solves the row-2 reading only",
        r2.is_zero() && !r1.is_zero(),
        format!(
            "residual {} with row 2 uniform, {} with row 1 uniform; its pi_t = 56/273 differs from 11/73",
            format_rational(&r2),
            format_rational(&r1)
        ),
    );

    let lf = build_matrix::<f64>(g, MatrixKind::RwLaplacian, pol)?;
    let h = heat_kernel(lf.data(), 100.0, 1e-12)?;
    let dist = h.max_abs_diff(&bases.projection().to_f64());
    items.push(
        "heat kernel at t = 100 approaches Pi within 1e-8",
        dist < 1e-8,
        format!("distance {dist:.3e}"),
    );

    let closure = closure_check(g, DanglingPolicy::SelfLoop, PATTERN_EPS, 1e-8)?;
    items.push(
        "exp(-L) is stochastic, non-negative, closure-patterned, same kernels",
        closure.ok(),
        format!("projection distance {:.3e}", closure.projection_distance),
    );

    let (ln_s, s3) = logarithm_fixture();
    let back = heat_kernel(&ln_s.scale(&-1.0), 1.0, 1e-15)?;
    let dist = back.max_abs_diff(&s3);
    items.push(
        "exponentiating the printed ln(S) recovers the 3x3 S within 1e-12",
        dist <= 1e-12,
        format!("distance {dist:.3e}"),
    );

    Ok(items.0)
}

/// The closed-form logarithm of `S = ((1,0,0),(1/2,1/2,0),(0,3/5,2/5))`, and `S`.
pub fn logarithm_fixture() -> (Matrix<f64>, Matrix<f64>) {
    let ln2 = 2f64.ln();
    let ln5 = 5f64.ln();
    let ln_s = Matrix::from_rows(vec![
        vec![0.0, 0.0, 0.0],
        vec![ln2, -ln2, 0.0],
        vec![11.0 * ln2 - 5.0 * ln5, 6.0 * ln5 - 12.0 * ln2, ln2 - ln5],
    ]);
    let s = Matrix::from_rows(vec![vec![1.0, 0.0, 0.0], vec![0.5, 0.5, 0.0], vec![0.0, 0.6, 0.4]]);
    (ln_s, s)
}
