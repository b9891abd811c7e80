//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use dgk::{Digraph, Rational};
use num::traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Seeded weakly connected digraph on 2..=8 vertices.
///
/// A random spanning tree with random edge directions guarantees weak
/// connectivity; extra edges (self-loops included) are then added with
/// probability about 0.25. Weights are drawn from `weights`.
pub fn random_graph(seed: u64, weights: &[i64]) -> Digraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=8usize);
    let mut pairs = BTreeSet::new();
    for v in 1..n {
        let u = rng.random_range(0..v);
        if rng.random_bool(0.5) {
            pairs.insert((u, v));
        } else {
            pairs.insert((v, u));
        }
    }
    for a in 0..n {
        for b in 0..n {
            let p = if a == b { 0.1 } else { 0.25 };
            if rng.random_bool(p) {
                pairs.insert((a, b));
            }
        }
    }
    let labels = (1..=n).map(|i| i.to_string()).collect();
    let edges = pairs
        .into_iter()
        .map(|(a, b)| {
            let w = weights[rng.random_range(0..weights.len())];
            (a, b, Rational::from_integer(w.into()))
        })
        .collect();
    Digraph::new(labels, edges).expect("generated graph is valid")
}

/// Weighted random graph used by the kernel and dynamics suites.
pub fn weighted_graph(seed: u64) -> Digraph {
    random_graph(seed, &[1, 2, 3])
}

/// Same topology family with unit weights.
pub fn unit_graph(seed: u64) -> Digraph {
    random_graph(seed, &[1])
}

/// `reach[a][b]`: a path with at least zero edges leads from `a` to `b`.
pub fn reflexive_reachability(g: &Digraph) -> Vec<Vec<bool>> {
    let n = g.n();
    let mut r = vec![vec![false; n]; n];
    for (i, row) in r.iter_mut().enumerate() {
        row[i] = true;
    }
    for e in g.edges() {
        r[e.src][e.dst] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if r[i][k] {
                let via = r[k].clone();
                for (dst, hit) in r[i].iter_mut().zip(via) {
                    *dst |= hit;
                }
            }
        }
    }
    r
}

/// Reach decomposition from reachable sets alone: reaches are the maximal
/// sets `R(v)`, cabals the vertices whose `R(v)` is that maximal set.
/// Returned as `(reach, cabal, exclusive, common)`, sorted by smallest
/// reach member.
pub type OracleReach = (Vec<usize>, Vec<usize>, Vec<usize>, Vec<usize>);

pub fn brute_force_reaches(g: &Digraph) -> Vec<OracleReach> {
    let n = g.n();
    let r = reflexive_reachability(g);
    let sets: Vec<BTreeSet<usize>> = (0..n).map(|v| (0..n).filter(|&w| r[v][w]).collect()).collect();
    let mut maximal: Vec<BTreeSet<usize>> = Vec::new();
    for s in &sets {
        let dominated = sets.iter().any(|t| t.is_superset(s) && t.len() > s.len());
        if !dominated && !maximal.contains(s) {
            maximal.push(s.clone());
        }
    }
    maximal.sort_by_key(|s| *s.iter().next().unwrap());
    let count = |v: usize| maximal.iter().filter(|s| s.contains(&v)).count();
    maximal
        .iter()
        .map(|s| {
            let reach: Vec<usize> = s.iter().copied().collect();
            let cabal = (0..n).filter(|&v| sets[v] == *s).collect();
            let exclusive = reach.iter().copied().filter(|&v| count(v) == 1).collect();
            let common = reach.iter().copied().filter(|&v| count(v) > 1).collect();
            (reach, cabal, exclusive, common)
        })
        .collect()
}

/// Rank by fraction-exact Gaussian elimination on a dense copy.
pub fn exact_rank(rows: &[Vec<Rational>]) -> usize {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let rows_n = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows_n).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let pivot = m[rank][c].clone();
        for r in 0..rows_n {
            if r != rank && !m[r][c].is_zero() {
                let f = m[r][c].clone() / pivot.clone();
                let pivot_row = m[rank].clone();
                for (x, p) in m[r].iter_mut().zip(pivot_row).skip(c) {
                    *x = x.clone() - f.clone() * p;
                }
            }
        }
        rank += 1;
    }
    rank
}

pub fn q(p: i64, d: i64) -> Rational {
    Rational::new(p.into(), d.into())
}

pub fn one() -> Rational {
    Rational::one()
}

pub fn g7() -> Digraph {
    dgk::example::g7()
}
