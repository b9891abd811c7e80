//! Influence and pagerank.
//!
//! The influence of a vertex is its column mass in `Π`, averaged over
//! starting vertices: `I = (1ᵀ/n)Π`. Only cabal members have positive
//! influence. Pagerank `℘ = (α/n)1ᵀ(αI + 𝓛)⁻¹` is computed three ways:
//!
//! * by one linear solve (the resolvent route);
//! * by iterating `p ← βpS + (1−β)/n 1ᵀ` with `β = 1/(1+α)`;
//! * as `℘(v) = 2Ĩ(b_v) − 1/n`, where `Ĩ` is the influence on the extended
//!   graph `E_α[G]` in which every vertex `v` gains a private leader `b_v`.

use std::collections::HashSet;

use num::traits::{Signed, Zero};

use crate::dynamics::Measure;
use crate::error::{Error, Result};
use crate::graph::{build_matrix, stochastic_with_rows, DanglingPolicy, Digraph, MatrixKind, RowPatch};
use crate::kernels::KernelBases;
use crate::matrix::{vector_to_json, Lu, Matrix};
use crate::scalar::{Rational, Scalar};
use crate::structure::decompose;

/// `(1ᵀ/n) Π`.
pub fn influence_vector<T: Scalar>(bases: &KernelBases<T>) -> Measure<T> {
    let n = bases.n();
    let u = vec![T::one() / T::from_usize(n); n];
    let v = bases.projection().left_mul(&u).expect("projection is n × n");
    Measure::new(v).expect("influence is a probability vector")
}

/// `β = 1/(1+α)`.
pub fn beta_from_alpha(alpha: &Rational) -> Result<Rational> {
    if !alpha.is_positive() {
        return Err(Error::BadAlpha);
    }
    Ok(Rational::from_integer(1.into()) / (Rational::from_integer(1.into()) + alpha))
}

/// `α = 1/β − 1`.
pub fn alpha_from_beta(beta: &Rational) -> Result<Rational> {
    let one = Rational::from_integer(1.into());
    if !beta.is_positive() || *beta >= one {
        return Err(Error::BadBeta);
    }
    Ok(one.clone() / beta - one)
}

/// Label for the private leader of `label`, unique among `taken`.
fn leader_label(label: &str, taken: &mut HashSet<String>) -> String {
    let mut out = format!("b_{label}");
    while taken.contains(&out) {
        out.insert_str(0, "b_");
    }
    taken.insert(out.clone());
    out
}

/// The extended graph `E_α[G]` on `2n` vertices ordered `b_1..b_n, 1..n`.
///
/// Original vertices carry the entries of `S` (under `policy`) as edge
/// weights, so each row of `S̃` over the original vertices is
/// `(α e_{b_v} + S_v)/(1+α)`. Each `b_v` has one edge `b_v → v` of weight
/// `α` and a unit self-loop, giving the zero rows of `𝓛̃` on the leaders.
pub fn extend_graph(g: &Digraph, alpha: &Rational, policy: DanglingPolicy) -> Result<Digraph> {
    if !alpha.is_positive() {
        return Err(Error::BadAlpha);
    }
    let n = g.n();
    let s: Matrix<Rational> = build_matrix(g, MatrixKind::Stochastic, Some(policy))?.into_data();
    let mut taken: HashSet<String> = g.vertex_ids().iter().cloned().collect();
    let mut labels: Vec<String> = g.vertex_ids().iter().map(|l| leader_label(l, &mut taken)).collect();
    labels.extend(g.vertex_ids().iter().cloned());
    let mut edges = Vec::new();
    for v in 0..n {
        edges.push((v, n + v, alpha.clone()));
        edges.push((v, v, Rational::from_integer(1.into())));
    }
    for i in 0..n {
        for j in 0..n {
            if !s[(i, j)].is_zero() {
                edges.push((n + j, n + i, s[(i, j)].clone()));
            }
        }
    }
    Digraph::new(labels, edges)
}

/// Solves `℘(αI + 𝓛) = (α/n)1ᵀ` with one factorization.
pub fn pagerank_resolvent<T: Scalar>(l: &Matrix<T>, alpha: &T) -> Result<Measure<T>> {
    if !alpha.is_positive() {
        return Err(Error::BadAlpha);
    }
    if !l.is_square() {
        return Err(Error::DimensionMismatch {
            expected: l.rows(),
            found: l.cols(),
        });
    }
    let n = l.rows();
    let a = Matrix::identity(n).scale(alpha).add(l)?.transpose();
    let rhs = vec![alpha.clone() / T::from_usize(n); n];
    let y = Lu::factor(&a)?.solve(&rhs)?;
    Measure::new(y)
}

/// Power iteration `p ← βpS + (1−β)/n 1ᵀ` from the uniform measure until the
/// ℓ₁ change drops below `tol`. Returns the measure and the iteration count.
pub fn pagerank_power<T: Scalar>(s: &Matrix<T>, beta: f64, tol: f64, max_iter: usize) -> Result<(Measure<f64>, usize)> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::BadBeta);
    }
    if !(tol > 0.0) {
        return Err(Error::ToleranceUnreachable { tol });
    }
    if !s.is_square() {
        return Err(Error::DimensionMismatch {
            expected: s.rows(),
            found: s.cols(),
        });
    }
    let s = s.to_f64();
    let n = s.rows();
    let teleport = (1.0 - beta) / n as f64;
    let mut p = vec![1.0 / n as f64; n];
    for iter in 1..=max_iter {
        let next: Vec<f64> = s.left_mul(&p)?.into_iter().map(|x| beta * x + teleport).collect();
        let delta: f64 = next.iter().zip(&p).map(|(a, b)| (a - b).abs()).sum();
        p = next;
        if delta < tol {
            return Ok((Measure::new(p)?, iter));
        }
    }
    Err(Error::MaxIterExceeded { iterations: max_iter })
}

/// `℘(v) = 2Ĩ(b_v) − 1/n`, with `Ĩ` the influence on `E_α[G]`.
pub fn pagerank_via_extension<T: Scalar>(g: &Digraph, alpha: &Rational, policy: DanglingPolicy) -> Result<Measure<T>> {
    let n = g.n();
    let ext = extend_graph(g, alpha, policy)?;
    let l = build_matrix::<T>(&ext, MatrixKind::RwLaplacian, Some(DanglingPolicy::SelfLoop))?;
    let bases = KernelBases::compute(&l, decompose(&ext))?;
    let inf = influence_vector(&bases);
    let two = T::from_usize(2);
    let inv_n = T::one() / T::from_usize(n);
    Measure::new(
        (0..n)
            .map(|v| two.clone() * inf.as_slice()[v].clone() - inv_n.clone())
            .collect(),
    )
}

/// `‖℘(αI + 𝓛) − (α/n)1ᵀ‖∞` for a candidate `℘` against the walk `S`.
pub fn pagerank_residual<T: Scalar>(s: &Matrix<T>, alpha: &T, candidate: &[T]) -> Result<T> {
    let n = s.rows();
    let a = Matrix::identity(n).scale(&(alpha.clone() + T::one())).sub(s)?;
    let lhs = a.left_mul(candidate)?;
    let target = alpha.clone() / T::from_usize(n);
    Ok(lhs
        .into_iter()
        .map(|x| (x - target.clone()).abs())
        .fold(T::zero(), |m, x| if x > m { x } else { m }))
}

/// `S` with the given rows forced to `1/n` and every other zero row given a
/// self-loop: the walk of an alternative teleporting reading.
pub fn stochastic_forcing_rows<T: Scalar>(g: &Digraph, forced: &[usize]) -> Result<Matrix<T>> {
    stochastic_with_rows(g, |i| {
        if forced.contains(&i) {
            RowPatch::ForceUniform
        } else {
            RowPatch::SelfLoop
        }
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TeleportReport<T> {
    pub alpha: Rational,
    pub beta: Rational,
    /// In-degree-0 vertices, the rows that the two policies patch differently.
    pub leaders: Vec<usize>,
    pub pagerank: Vec<T>,
    pub pagerank_teleport: Vec<T>,
    pub pi: T,
    pub pi_t: T,
    /// `(1−β)π/(1−βπ)`.
    pub pi_t_predicted: T,
    /// `max_{v∈L} |℘_t(v) − (βπ_t + 1 − β)℘(v)|`.
    pub residual_leaders: f64,
    /// `max_{v∉L} |℘_t(v) − (β/(1−β) π_t + 1)℘(v)|`.
    pub residual_rest: f64,
    /// `|π_t − (1−β)π/(1−βπ)|`.
    pub residual_scalar: f64,
    /// Whether `℘` and `℘_t` order the non-leaders identically.
    pub order_preserved: bool,
}

impl<T: Scalar> TeleportReport<T> {
    pub fn holds(&self, tol: f64) -> bool {
        self.residual_leaders <= tol && self.residual_rest <= tol && self.residual_scalar <= tol && self.order_preserved
    }

    pub fn to_json(&self, g: &Digraph) -> serde_json::Value {
        serde_json::json!({
            "alpha": self.alpha.to_json(),
            "beta": self.beta.to_json(),
            "leaders": self.leaders.iter().map(|&v| g.label(v)).collect::<Vec<_>>(),
            "pagerank": vector_to_json(&self.pagerank),
            "pagerank_teleport": vector_to_json(&self.pagerank_teleport),
            "pi": self.pi.to_json(),
            "pi_t": self.pi_t.to_json(),
            "pi_t_predicted": self.pi_t_predicted.to_json(),
            "residual_leaders": self.residual_leaders,
            "residual_rest": self.residual_rest,
            "residual_scalar": self.residual_scalar,
            "order_preserved": self.order_preserved,
        })
    }
}

fn same_order<T: Scalar>(a: &[T], b: &[T], idx: &[usize]) -> bool {
    idx.iter().all(|&i| {
        idx.iter().all(|&j| {
            a[i].partial_cmp(&a[j]) == b[i].partial_cmp(&b[j]) || {
                let tol = 1e-12;
                !T::EXACT && (a[i].approx_eq(&a[j], tol) || b[i].approx_eq(&b[j], tol))
            }
        })
    })
}

/// Computes `℘` (self-loop patch) and `℘_t` (uniform patch) and measures
/// how far they are from the teleporting identities.
pub fn teleport_relation_check<T: Scalar>(g: &Digraph, alpha: &Rational) -> Result<TeleportReport<T>> {
    let beta_q = beta_from_alpha(alpha)?;
    let a = T::from_rational(alpha);
    let beta = T::from_rational(&beta_q);
    let leaders = g.sources();
    let rest: Vec<usize> = (0..g.n()).filter(|v| !leaders.contains(v)).collect();

    let routes = [DanglingPolicy::SelfLoop, DanglingPolicy::Uniform];
    let solved: Vec<Result<Measure<T>>> = routes
        .iter()
        .map(|&p| {
            let l = build_matrix::<T>(g, MatrixKind::RwLaplacian, Some(p))?;
            pagerank_resolvent(l.data(), &a)
        })
        .collect();
    let mut solved = solved.into_iter();
    let p = solved.next().expect("two routes")?.into_inner();
    let pt = solved.next().expect("two routes")?.into_inner();

    let mass = |v: &[T]| leaders.iter().fold(T::zero(), |acc, &i| acc + v[i].clone());
    let pi = mass(&p);
    let pi_t = mass(&pt);
    let one = T::one();
    let pi_t_predicted = (one.clone() - beta.clone()) * pi.clone() / (one.clone() - beta.clone() * pi.clone());

    let c_leaders = beta.clone() * pi_t.clone() + one.clone() - beta.clone();
    let c_rest = beta.clone() / (one.clone() - beta.clone()) * pi_t.clone() + one;
    let max_dev = |idx: &[usize], c: &T| {
        idx.iter()
            .map(|&v| (pt[v].clone() - c.clone() * p[v].clone()).abs().to_f64())
            .fold(0.0, f64::max)
    };
    Ok(TeleportReport {
        alpha: alpha.clone(),
        beta: beta_q,
        residual_leaders: max_dev(&leaders, &c_leaders),
        residual_rest: max_dev(&rest, &c_rest),
        residual_scalar: (pi_t.clone() - pi_t_predicted.clone()).abs().to_f64(),
        order_preserved: same_order(&p, &pt, &rest),
        leaders,
        pagerank: p,
        pagerank_teleport: pt,
        pi,
        pi_t,
        pi_t_predicted,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankReport<T> {
    pub influence: Measure<T>,
    /// Pagerank with dangling rows given self-loops.
    pub pagerank: Measure<T>,
    /// Pagerank with dangling rows teleporting, when requested.
    pub pagerank_teleport: Option<Measure<T>>,
    pub alpha: Rational,
    pub beta: Rational,
    pub leaders: Vec<usize>,
    pub pi: T,
    pub pi_t: Option<T>,
    /// Power-route iterations for the requested policy.
    pub iterations: usize,
}

impl<T: Scalar> RankReport<T> {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "influence": vector_to_json(self.influence.as_slice()),
            "pagerank": vector_to_json(self.pagerank.as_slice()),
            "pagerank_teleport": self.pagerank_teleport.as_ref().map(|m| vector_to_json(m.as_slice())),
            "pi": self.pi.to_json(),
            "pi_t": self.pi_t.as_ref().map(Scalar::to_json),
            "beta": self.beta.to_json(),
            "iterations": self.iterations,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankOptions {
    pub alpha: Rational,
    pub policy: DanglingPolicy,
    /// ℓ₁ stopping tolerance of the power route.
    pub tol: f64,
    pub max_iter: usize,
}

/// Influence, both pageranks, `π`, `π_t`, and the power-route iteration count.
pub fn rank<T: Scalar>(g: &Digraph, opts: &RankOptions) -> Result<RankReport<T>> {
    let beta = beta_from_alpha(&opts.alpha)?;
    let a = T::from_rational(&opts.alpha);
    let l = build_matrix::<T>(g, MatrixKind::RwLaplacian, Some(DanglingPolicy::SelfLoop))?;
    let bases = KernelBases::compute(&l, decompose(g))?;
    let influence = influence_vector(&bases);
    let pagerank = pagerank_resolvent(l.data(), &a)?;
    let leaders = g.sources();
    let mass = |v: &Measure<T>| leaders.iter().fold(T::zero(), |acc, &i| acc + v.as_slice()[i].clone());
    let pi = mass(&pagerank);

    let (pagerank_teleport, pi_t, s) = match opts.policy {
        DanglingPolicy::SelfLoop => (None, None, l.stochastic()?),
        DanglingPolicy::Uniform => {
            let lt = build_matrix::<T>(g, MatrixKind::RwLaplacian, Some(DanglingPolicy::Uniform))?;
            let pt = pagerank_resolvent(lt.data(), &a)?;
            let pi_t = mass(&pt);
            (Some(pt), Some(pi_t), lt.stochastic()?)
        }
    };
    let (_, iterations) = pagerank_power(&s, beta.to_f64(), opts.tol, opts.max_iter)?;
    Ok(RankReport {
        influence,
        pagerank,
        pagerank_teleport,
        alpha: opts.alpha.clone(),
        beta,
        leaders,
        pi,
        pi_t,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{parse_graph, GraphFormat};
    use crate::structure::reach_decomposition;

    fn q(p: i64, d: i64) -> Rational {
        Rational::ratio(p, d)
    }

    fn over(v: &[i64], d: i64) -> Vec<Rational> {
        v.iter().map(|&p| q(p, d)).collect()
    }

    fn g7() -> Digraph {
        parse_graph("1 2\n1 6\n3 4\n4 5\n5 3\n3 7\n6 7\n7 6\n", GraphFormat::EdgeList).unwrap()
    }

    fn laplacian<T: Scalar>(g: &Digraph, p: DanglingPolicy) -> Matrix<T> {
        build_matrix(g, MatrixKind::RwLaplacian, Some(p)).unwrap().into_data()
    }

    #[test]
    fn influence_examples() {
        let g = g7();
        let l = build_matrix::<Rational>(&g, MatrixKind::RwLaplacian, Some(DanglingPolicy::SelfLoop)).unwrap();
        let b = KernelBases::compute(&l, decompose(&g)).unwrap();
        assert_eq!(
            influence_vector(&b).into_inner(),
            vec![q(3, 7), q(0, 1), q(4, 21), q(4, 21), q(4, 21), q(0, 1), q(0, 1)]
        );

        let c = Digraph::from_labeled_edges(&[("a", "b"), ("b", "a")]).unwrap();
        let l = build_matrix::<Rational>(&c, MatrixKind::RwLaplacian, Some(DanglingPolicy::SelfLoop)).unwrap();
        let b = KernelBases::compute(&l, decompose(&c)).unwrap();
        assert_eq!(influence_vector(&b).into_inner(), vec![q(1, 2), q(1, 2)]);
    }

    #[test]
    fn extension_structure() {
        let one = Digraph::from_labeled_edges(&[("v", "v")]).unwrap();
        let e = extend_graph(&one, &q(1, 1), DanglingPolicy::SelfLoop).unwrap();
        assert_eq!(e.vertex_ids(), ["b_v", "v"]);
        let s = build_matrix::<Rational>(&e, MatrixKind::Stochastic, None).unwrap();
        assert_eq!(s.data().row(1), [q(1, 2), q(1, 2)]);

        let g = g7();
        let e = extend_graph(&g, &q(1, 1), DanglingPolicy::SelfLoop).unwrap();
        assert_eq!(e.n(), 14);
        let l = build_matrix::<Rational>(&e, MatrixKind::RwLaplacian, None).unwrap();
        for i in 0..7 {
            for j in 0..7 {
                let expected = if i == j { q(-1, 2) } else { q(0, 1) };
                assert_eq!(l.data()[(7 + i, j)], expected);
                assert_eq!(l.data()[(i, j)], q(0, 1));
            }
        }
        let dec = reach_decomposition(&e).unwrap();
        assert_eq!(dec.k(), 7);
        for (i, r) in dec.reaches().iter().enumerate() {
            assert_eq!(r.cabal, vec![i]);
        }
        assert!(matches!(
            extend_graph(&g, &q(0, 1), DanglingPolicy::SelfLoop),
            Err(Error::BadAlpha)
        ));
    }

    #[test]
    fn leader_labels_avoid_collisions() {
        let g = Digraph::from_labeled_edges(&[("b_a", "a")]).unwrap();
        let e = extend_graph(&g, &q(1, 1), DanglingPolicy::SelfLoop).unwrap();
        assert_eq!(e.vertex_ids(), ["b_b_a", "b_b_b_a", "a", "b_a"]);
    }

    #[test]
    fn three_routes_agree_on_g7() {
        let g = g7();
        let expected = over(&[77, 21, 50, 44, 46, 28, 28], 294);
        let p = pagerank_resolvent(&laplacian::<Rational>(&g, DanglingPolicy::SelfLoop), &q(1, 1)).unwrap();
        assert_eq!(p.as_slice(), expected.as_slice());
        let e = pagerank_via_extension::<Rational>(&g, &q(1, 1), DanglingPolicy::SelfLoop).unwrap();
        assert_eq!(e.as_slice(), expected.as_slice());
        let s = laplacian::<f64>(&g, DanglingPolicy::SelfLoop);
        let s = Matrix::identity(7).sub(&s).unwrap();
        let (pw, _) = pagerank_power(&s, 0.5, 1e-12, 10_000).unwrap();
        for (a, b) in pw.as_slice().iter().zip(&expected) {
            assert!((a - b.to_f64()).abs() < 1e-12);
        }
        let (_, iters) = pagerank_power(&s, 0.85, 1e-4, 10_000).unwrap();
        assert!(iters <= 60, "{iters}");
        let (tiny, _) = pagerank_power(&s, 1e-9, 1e-12, 10).unwrap();
        assert!(tiny.as_slice().iter().all(|x| (x - 1.0 / 7.0).abs() < 1e-8));
        assert!(matches!(pagerank_power(&s, 1.0, 1e-4, 10), Err(Error::BadBeta)));
        assert!(matches!(
            pagerank_power(&s, 0.99, 1e-15, 3),
            Err(Error::MaxIterExceeded { .. })
        ));
    }

    #[test]
    fn teleporting_g7() {
        let g = g7();
        let pt = pagerank_resolvent(&laplacian::<Rational>(&g, DanglingPolicy::Uniform), &q(1, 1)).unwrap();
        assert_eq!(pt.as_slice(), over(&[77, 42, 100, 88, 92, 56, 56], 511).as_slice());
        let r = teleport_relation_check::<Rational>(&g, &q(1, 1)).unwrap();
        assert_eq!(r.pi, q(77, 294));
        assert_eq!(r.pi_t, q(11, 73));
        assert_eq!(r.pi_t_predicted, q(11, 73));
        assert!(r.holds(0.0));
        assert_eq!(r.leaders, vec![0]);
    }

    #[test]
    fn alternative_reading_residuals() {
        let g = g7();
        let printed = over(&[56, 21, 50, 44, 46, 28, 28], 273);
        let row2: Matrix<Rational> = stochastic_forcing_rows(&g, &[1]).unwrap();
        assert!(pagerank_residual(&row2, &q(1, 1), &printed).unwrap().is_zero());
        let row1: Matrix<Rational> = stochastic_forcing_rows(&g, &[0]).unwrap();
        assert!(!pagerank_residual(&row1, &q(1, 1), &printed).unwrap().is_zero());
    }

    #[test]
    fn no_leaders_means_identical_pageranks() {
        let g = Digraph::from_labeled_edges(&[("a", "b"), ("b", "c"), ("c", "a"), ("a", "c")]).unwrap();
        let r = teleport_relation_check::<Rational>(&g, &q(3, 17)).unwrap();
        assert!(r.leaders.is_empty());
        assert_eq!(r.pagerank, r.pagerank_teleport);
        assert!(r.holds(0.0));
    }

    #[test]
    fn single_vertex() {
        let g = Digraph::new(vec!["x".into()], vec![]).unwrap();
        let p = pagerank_resolvent(&laplacian::<Rational>(&g, DanglingPolicy::SelfLoop), &q(1, 1)).unwrap();
        assert_eq!(p.into_inner(), vec![q(1, 1)]);
        let e = pagerank_via_extension::<Rational>(&g, &q(1, 1), DanglingPolicy::SelfLoop).unwrap();
        assert_eq!(e.into_inner(), vec![q(1, 1)]);
    }

    #[test]
    fn beta_alpha_conversion() {
        assert_eq!(alpha_from_beta(&q(17, 20)).unwrap(), q(3, 17));
        assert_eq!(beta_from_alpha(&q(1, 1)).unwrap(), q(1, 2));
        assert!(alpha_from_beta(&q(1, 1)).is_err());
        assert!(beta_from_alpha(&q(-1, 1)).is_err());
    }

    #[test]
    fn rank_report_json() {
        let g = g7();
        let opts = RankOptions {
            alpha: q(1, 1),
            policy: DanglingPolicy::Uniform,
            tol: 1e-12,
            max_iter: 10_000,
        };
        let r = rank::<Rational>(&g, &opts).unwrap();
        let j = r.to_json();
        assert_eq!(j["pagerank"][0], "11/42");
        assert_eq!(j["pi_t"], "11/73");
        assert_eq!(j["beta"], "1/2");
    }
}
