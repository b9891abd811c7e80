//! Discrete and continuous consensus and diffusion.
//!
//! Diffusion evolves a row measure, `p ← pS` or `p(t) = p(0)e^{−𝓛t}`.
//! Consensus evolves a column state, `x ← Sx` or `x(t) = e^{−𝓛t}x(0)`.
//! Both converge in the Cesàro sense to the projection `Π` onto the kernel,
//! and the continuous versions converge plainly.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Digraph;
use crate::kernels::KernelBases;
use crate::matrix::{sum, Matrix};
use crate::scalar::Scalar;
use crate::structure::{cabal_period, ReachDecomposition};

/// Allowed drift of a float measure's total mass.
pub const MEASURE_TOL: f64 = 1e-9;

/// A probability row vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Measure<T>(Vec<T>);

impl<T: Scalar> Measure<T> {
    pub fn new(p: Vec<T>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidMeasure("empty vector".into()));
        }
        if let Some(i) = p
            .iter()
            .position(|x| x.is_negative() && !x.approx_eq(&T::zero(), MEASURE_TOL))
        {
            return Err(Error::InvalidMeasure(format!("entry {i} is negative ({})", p[i])));
        }
        let total = sum(&p);
        if !total.approx_eq(&T::one(), MEASURE_TOL) {
            return Err(Error::InvalidMeasure(format!("entries sum to {total}")));
        }
        Ok(Measure(p))
    }

    pub fn uniform(n: usize) -> Self {
        Measure(vec![T::one() / T::from_usize(n); n])
    }

    pub fn delta(n: usize, v: usize) -> Self {
        let mut p = vec![T::zero(); n];
        p[v] = T::one();
        Measure(p)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<T> {
        self.0
    }

    /// Indices of the nonzero entries.
    pub fn support(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&i| !self.0[i].is_zero()).collect()
    }
}

/// A column state vector with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T>(Vec<T>);

impl<T: Scalar> StateVector<T> {
    pub fn new(x: Vec<T>) -> Result<Self> {
        if let Some(i) = x.iter().position(|v| !v.to_f64().is_finite() && !T::EXACT) {
            return Err(Error::InvalidArgument(format!("state entry {i} is not finite")));
        }
        Ok(StateVector(x))
    }

    pub fn ones(n: usize) -> Self {
        StateVector(vec![T::one(); n])
    }

    pub fn basis(n: usize, v: usize) -> Self {
        let mut x = vec![T::zero(); n];
        x[v] = T::one();
        StateVector(x)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<T> {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Process {
    Diffusion,
    Consensus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeMode {
    Discrete,
    Continuous,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Instant {
    Step(usize),
    Time(f64),
}

impl fmt::Display for Instant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instant::Step(k) => write!(f, "{k}"),
            Instant::Time(t) => write!(f, "{t}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub process: Process,
    pub mode: TimeMode,
    pub samples: Vec<(Instant, Vec<T>)>,
}

fn cell<T: Scalar>(x: &T) -> String {
    match x.to_json() {
        serde_json::Value::String(s) => s,
        other => other.to_string(),
    }
}

impl<T: Scalar> Trajectory<T> {
    pub fn last(&self) -> Option<&[T]> {
        self.samples.last().map(|(_, v)| v.as_slice())
    }

    /// CSV with a `step` (or `t`) column followed by one column per label.
    /// An optional final row labelled `limit` carries the asymptotic value.
    pub fn to_csv(&self, labels: &[String], limit: Option<&[T]>) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let first = match self.mode {
            TimeMode::Discrete => "step",
            TimeMode::Continuous => "t",
        };
        let csv_err = |e: csv::Error| Error::InvalidArgument(e.to_string());
        w.write_record(std::iter::once(first).chain(labels.iter().map(String::as_str)))
            .map_err(csv_err)?;
        for (at, v) in &self.samples {
            if v.len() != labels.len() {
                return Err(Error::DimensionMismatch {
                    expected: labels.len(),
                    found: v.len(),
                });
            }
            w.write_record(std::iter::once(at.to_string()).chain(v.iter().map(cell)))
                .map_err(csv_err)?;
        }
        if let Some(v) = limit {
            w.write_record(std::iter::once("limit".to_string()).chain(v.iter().map(cell)))
                .map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::InvalidArgument(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_json(&self, labels: &[String]) -> serde_json::Value {
        let samples: Vec<_> = self
            .samples
            .iter()
            .map(|(at, v)| {
                let at = match at {
                    Instant::Step(k) => serde_json::json!(k),
                    Instant::Time(t) => serde_json::json!(t),
                };
                serde_json::json!({ "at": at, "values": v.iter().map(Scalar::to_json).collect::<Vec<_>>() })
            })
            .collect();
        serde_json::json!({
            "process": self.process,
            "mode": self.mode,
            "vertices": labels,
            "samples": samples,
        })
    }
}

fn check_square<T: Scalar>(s: &Matrix<T>, n: usize) -> Result<()> {
    if !s.is_square() {
        return Err(Error::DimensionMismatch {
            expected: s.rows(),
            found: s.cols(),
        });
    }
    if s.rows() != n {
        return Err(Error::DimensionMismatch {
            expected: s.rows(),
            found: n,
        });
    }
    Ok(())
}

/// `p S`.
pub fn diffusion_step<T: Scalar>(p: &Measure<T>, s: &Matrix<T>) -> Result<Measure<T>> {
    check_square(s, p.len())?;
    Ok(Measure(s.left_mul(&p.0)?))
}

/// `S x`.
pub fn consensus_step<T: Scalar>(x: &StateVector<T>, s: &Matrix<T>) -> Result<StateVector<T>> {
    check_square(s, x.len())?;
    Ok(StateVector(s.right_mul(&x.0)?))
}

/// Iterates the discrete process for `steps` steps, keeping every sample.
pub fn simulate_discrete<T: Scalar>(
    process: Process,
    init: &[T],
    s: &Matrix<T>,
    steps: usize,
) -> Result<Trajectory<T>> {
    check_square(s, init.len())?;
    let mut samples = Vec::with_capacity(steps + 1);
    let mut v = init.to_vec();
    samples.push((Instant::Step(0), v.clone()));
    for k in 1..=steps {
        v = match process {
            Process::Diffusion => s.left_mul(&v)?,
            Process::Consensus => s.right_mul(&v)?,
        };
        samples.push((Instant::Step(k), v.clone()));
    }
    Ok(Trajectory {
        process,
        mode: TimeMode::Discrete,
        samples,
    })
}

/// Evaluates the continuous process at each time through the heat kernel.
pub fn simulate_continuous(
    process: Process,
    init: &[f64],
    l: &Matrix<f64>,
    times: &[f64],
    tol: f64,
) -> Result<Trajectory<f64>> {
    check_square(l, init.len())?;
    let samples = times
        .iter()
        .map(|&t| {
            let h = heat_kernel(l, t, tol)?;
            let v = match process {
                Process::Diffusion => h.left_mul(init)?,
                Process::Consensus => h.right_mul(init)?,
            };
            Ok((Instant::Time(t), v))
        })
        .collect::<Result<_>>()?;
    Ok(Trajectory {
        process,
        mode: TimeMode::Continuous,
        samples,
    })
}

/// `(1/ℓ) Σ_{i<ℓ} p0 Sⁱ`.
pub fn cesaro_average<T: Scalar>(p0: &Measure<T>, s: &Matrix<T>, steps: usize) -> Result<Measure<T>> {
    if steps == 0 {
        return Err(Error::InvalidArgument("Cesàro average needs at least one step".into()));
    }
    check_square(s, p0.len())?;
    let mut acc = vec![T::zero(); p0.len()];
    let mut p = p0.0.clone();
    for i in 0..steps {
        for (a, x) in acc.iter_mut().zip(&p) {
            *a = a.clone() + x.clone();
        }
        if i + 1 < steps {
            p = s.left_mul(&p)?;
        }
    }
    let l = T::from_usize(steps);
    Ok(Measure(acc.into_iter().map(|a| a / l.clone()).collect()))
}

/// `p0 Π = Σ_m (p0 γ_m) γ̄_m`.
pub fn diffusion_limit<T: Scalar>(p0: &Measure<T>, bases: &KernelBases<T>) -> Result<Measure<T>> {
    Ok(Measure(bases.projection().left_mul(&p0.0)?))
}

/// `Π x0 = Σ_m (γ̄_m x0) γ_m`.
pub fn consensus_limit<T: Scalar>(x0: &StateVector<T>, bases: &KernelBases<T>) -> Result<StateVector<T>> {
    Ok(StateVector(bases.projection().right_mul(&x0.0)?))
}

/// `(γ_1(v), …, γ_k(v))`: the probability that a walker started at `v` is
/// absorbed into each cabal.
pub fn absorption_probabilities<T: Scalar>(v: usize, bases: &KernelBases<T>) -> Result<Vec<T>> {
    if v >= bases.n() {
        return Err(Error::UnknownVertex(v.to_string()));
    }
    Ok(bases.gamma().row(v).to_vec())
}

/// `p0 S^m`, only when every cabal is aperiodic; `None` otherwise, since the
/// powers then oscillate and only the Cesàro mean converges.
pub fn plain_power_limit<T: Scalar>(
    p0: &Measure<T>,
    s: &Matrix<T>,
    g: &Digraph,
    dec: &ReachDecomposition,
    m: usize,
) -> Result<Option<Measure<T>>> {
    check_square(s, p0.len())?;
    for r in dec.reaches() {
        if cabal_period(g, &r.cabal)? != 1 {
            return Ok(None);
        }
    }
    let mut p = p0.0.clone();
    for _ in 0..m {
        p = s.left_mul(&p)?;
    }
    Ok(Some(Measure(p)))
}

/// Largest number of Taylor terms the heat kernel will use.
pub const MAX_TAYLOR_TERMS: usize = 60;

/// `e^{−𝓛t}` by scaling and squaring a truncated Taylor series.
///
/// With `A = −𝓛t`, `N = 2^s` and `B = A/N`, `‖B‖∞ ≤ 1/2`. The Taylor tail
/// after `m` terms is at most `b^{m+1}/(m+1)! / (1 − b/(m+2))`, and squaring
/// amplifies a perturbation `δ` of `e^B` to at most
/// `N δ (e^{μ/N} + δ)^{N−1}` where `μ` is the ∞-logarithmic norm of `A`.
/// For a random-walk Laplacian `μ = 0`. The smallest `m` keeping this below
/// `tol` is used; if more than [`MAX_TAYLOR_TERMS`] would be needed the call
/// fails with [`Error::ToleranceUnreachable`]. The bound covers truncation,
/// not floating-point rounding.
pub fn heat_kernel(l: &Matrix<f64>, t: f64, tol: f64) -> Result<Matrix<f64>> {
    if !l.is_square() {
        return Err(Error::DimensionMismatch {
            expected: l.rows(),
            found: l.cols(),
        });
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "heat kernel time must be finite and non-negative, got {t}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::ToleranceUnreachable { tol });
    }
    let n = l.rows();
    if t == 0.0 || n == 0 {
        return Ok(Matrix::identity(n));
    }
    let a = l.scale(&-t);
    let norm = a.norm_inf();
    if !norm.is_finite() {
        return Err(Error::ToleranceUnreachable { tol });
    }
    let mu = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { a[(i, j)] } else { a[(i, j)].abs() })
                .sum::<f64>()
        })
        .fold(f64::NEG_INFINITY, f64::max)
        .max(0.0);

    let mut squarings = 0u32;
    while norm / f64::powi(2.0, squarings as i32) > 0.5 {
        squarings += 1;
    }
    let big_n = f64::powi(2.0, squarings as i32);
    let b = norm / big_n;
    let growth = (mu / big_n).exp();

    let mut terms = None;
    let mut term = 1.0;
    for m in 0..=MAX_TAYLOR_TERMS {
        term *= b / (m + 1) as f64;
        let tail = if b == 0.0 {
            0.0
        } else {
            term / (1.0 - b / (m + 2) as f64)
        };
        let amplified = big_n * tail * (growth + tail).powf(big_n - 1.0);
        if amplified <= tol {
            terms = Some(m);
            break;
        }
    }
    let m = terms.ok_or(Error::ToleranceUnreachable { tol })?;

    let scaled = a.scale(&(1.0 / big_n));
    let eye = Matrix::identity(n);
    // Horner: I + B(I + B/2(I + … (I + B/m)))
    let mut e = eye.clone();
    for j in (1..=m).rev() {
        e = eye.add(&scaled.mul(&e)?.scale(&(1.0 / j as f64)))?;
    }
    for _ in 0..squarings {
        e = e.mul(&e)?;
    }
    Ok(e)
}

fn cumulative_rows<T: Scalar>(s: &Matrix<T>) -> Vec<Vec<f64>> {
    (0..s.rows())
        .map(|i| {
            let mut acc = 0.0;
            s.row(i)
                .iter()
                .map(|x| {
                    acc += x.to_f64();
                    acc
                })
                .collect()
        })
        .collect()
}

fn next_vertex(cum: &[f64], u: f64) -> usize {
    let target = u * cum.last().copied().unwrap_or(0.0);
    let idx = cum.partition_point(|&c| c <= target);
    // guard against rounding at the top of the row and zero-width entries
    let mut v = idx.min(cum.len() - 1);
    while v > 0 && cum[v] == cum[v - 1] {
        v -= 1;
    }
    v
}

/// A random walk of `steps` moves following the rows of `S`, starting at
/// `start`. The generator is ChaCha8 seeded from `seed`, so walks are
/// reproducible on every platform.
pub fn sample_walk<T: Scalar>(s: &Matrix<T>, start: usize, seed: u64, steps: usize) -> Result<Vec<usize>> {
    check_square(s, s.rows())?;
    if start >= s.rows() {
        return Err(Error::UnknownVertex(start.to_string()));
    }
    let cum = cumulative_rows(s);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(walk(&cum, start, &mut rng, steps, |_| false))
}

fn walk(
    cum: &[Vec<f64>],
    start: usize,
    rng: &mut ChaCha8Rng,
    steps: usize,
    stop: impl Fn(usize) -> bool,
) -> Vec<usize> {
    let mut path = Vec::with_capacity(steps + 1);
    let mut v = start;
    path.push(v);
    for _ in 0..steps {
        if stop(v) {
            break;
        }
        v = next_vertex(&cum[v], rng.random::<f64>());
        path.push(v);
    }
    path
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AbsorptionEstimate {
    pub walks: usize,
    /// Walks that ended in each cabal.
    pub counts: Vec<usize>,
    /// Walks still outside every cabal after the step limit.
    pub unabsorbed: usize,
}

impl AbsorptionEstimate {
    pub fn frequency(&self, i: usize) -> f64 {
        self.counts[i] as f64 / self.walks as f64
    }

    /// Binomial standard error `√(p(1−p)/N)` of a frequency with true value `p`.
    pub fn standard_error(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.walks as f64).sqrt()
    }
}

/// Runs `walks` independent walks from `start` until each enters a cabal.
///
/// Walk `w` draws from stream `w` of a ChaCha8 generator seeded with `seed`,
/// and results are reduced in walk order, so the estimate does not depend
/// on thread scheduling.
pub fn absorption_frequencies<T: Scalar>(
    s: &Matrix<T>,
    dec: &ReachDecomposition,
    start: usize,
    walks: usize,
    seed: u64,
    max_steps: usize,
) -> Result<AbsorptionEstimate> {
    check_square(s, dec.n())?;
    if start >= s.rows() {
        return Err(Error::UnknownVertex(start.to_string()));
    }
    let cum = cumulative_rows(s);
    let cabal_of = dec.cabal_of();
    let outcomes: Vec<Option<usize>> = (0..walks)
        .into_par_iter()
        .map(|w| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(w as u64);
            let path = walk(&cum, start, &mut rng, max_steps, |v| cabal_of[v].is_some());
            cabal_of[*path.last().expect("walk is nonempty")]
        })
        .collect();
    let mut counts = vec![0; dec.k()];
    let mut unabsorbed = 0;
    for o in outcomes {
        match o {
            Some(i) => counts[i] += 1,
            None => unabsorbed += 1,
        }
    }
    Ok(AbsorptionEstimate {
        walks,
        counts,
        unabsorbed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_matrix, parse_graph, DanglingPolicy, GraphFormat, MatrixKind};
    use crate::scalar::Rational;
    use crate::structure::decompose;

    fn q(p: i64, d: i64) -> Rational {
        Rational::ratio(p, d)
    }

    fn g7() -> Digraph {
        parse_graph("1 2\n1 6\n3 4\n4 5\n5 3\n3 7\n6 7\n7 6\n", GraphFormat::EdgeList).unwrap()
    }

    fn stochastic<T: Scalar>(g: &Digraph) -> Matrix<T> {
        build_matrix(g, MatrixKind::Stochastic, Some(DanglingPolicy::SelfLoop))
            .unwrap()
            .into_data()
    }

    fn bases(g: &Digraph) -> KernelBases<Rational> {
        let l = build_matrix(g, MatrixKind::RwLaplacian, Some(DanglingPolicy::SelfLoop)).unwrap();
        KernelBases::compute(&l, decompose(g)).unwrap()
    }

    #[test]
    fn measure_validation() {
        assert!(Measure::new(vec![q(1, 2), q(1, 2)]).is_ok());
        assert!(Measure::new(vec![q(1, 2), q(1, 3)]).is_err());
        assert!(Measure::new(vec![q(3, 2), q(-1, 2)]).is_err());
        assert!(Measure::new(vec![0.5, 0.5 + 1e-12]).is_ok());
        assert!(StateVector::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn single_steps_on_g7() {
        let g = g7();
        let s = stochastic::<Rational>(&g);
        let p = diffusion_step(&Measure::delta(7, 1), &s).unwrap();
        assert_eq!(p, Measure::delta(7, 0));
        let p = diffusion_step(&Measure::delta(7, 0), &s).unwrap();
        assert_eq!(p, Measure::delta(7, 0));

        let b = bases(&g);
        let stat = Measure::new(b.gamma_bar_row(1).to_vec()).unwrap();
        assert_eq!(diffusion_step(&stat, &s).unwrap(), stat);

        let gamma = StateVector::new(b.gamma_column(0)).unwrap();
        assert_eq!(consensus_step(&gamma, &s).unwrap(), gamma);
        assert_eq!(consensus_step(&StateVector::ones(7), &s).unwrap(), StateVector::ones(7));
        let x = consensus_step(&StateVector::basis(7, 5), &s).unwrap();
        assert_eq!(x.as_slice(), s.column(5).as_slice());
        assert_eq!(x.as_slice()[6], q(1, 2));
    }

    #[test]
    fn cesaro_on_two_cycle() {
        let g = Digraph::from_labeled_edges(&[("a", "b"), ("b", "a")]).unwrap();
        let s = stochastic::<Rational>(&g);
        let p0 = Measure::delta(2, 0);
        assert_eq!(cesaro_average(&p0, &s, 1).unwrap(), p0);
        assert_eq!(cesaro_average(&p0, &s, 2).unwrap().into_inner(), vec![q(1, 2), q(1, 2)]);
        assert!(cesaro_average(&p0, &s, 0).is_err());
        let dec = decompose(&g);
        assert_eq!(plain_power_limit(&p0, &s, &g, &dec, 10).unwrap(), None);
    }

    #[test]
    fn limits_on_g7() {
        let g = g7();
        let b = bases(&g);
        let lim = diffusion_limit(&Measure::delta(7, 5), &b).unwrap();
        assert_eq!(
            lim.into_inner(),
            vec![q(2, 3), q(0, 1), q(1, 9), q(1, 9), q(1, 9), q(0, 1), q(0, 1)]
        );
        let lim = diffusion_limit(&Measure::uniform(7), &b).unwrap();
        let expected: Vec<Rational> = (0..7)
            .map(|j| q(3, 7) * b.gamma_bar_row(0)[j].clone() + q(4, 7) * b.gamma_bar_row(1)[j].clone())
            .collect();
        assert_eq!(lim.into_inner(), expected);

        let x = consensus_limit(&StateVector::basis(7, 0), &b).unwrap();
        assert_eq!(
            x.into_inner(),
            vec![q(1, 1), q(1, 1), q(0, 1), q(0, 1), q(0, 1), q(2, 3), q(1, 3)]
        );
        let x = consensus_limit(&StateVector::basis(7, 1), &b).unwrap();
        assert!(x.as_slice().iter().all(|v| *v == q(0, 1)));
        assert_eq!(
            consensus_limit(&StateVector::ones(7), &b).unwrap(),
            StateVector::ones(7)
        );

        assert_eq!(absorption_probabilities(5, &b).unwrap(), vec![q(2, 3), q(1, 3)]);
        assert_eq!(absorption_probabilities(0, &b).unwrap(), vec![q(1, 1), q(0, 1)]);
        assert_eq!(absorption_probabilities(6, &b).unwrap(), vec![q(1, 3), q(2, 3)]);
    }

    #[test]
    fn heat_kernel_basics() {
        let g = g7();
        let l = build_matrix::<f64>(&g, MatrixKind::RwLaplacian, Some(DanglingPolicy::SelfLoop)).unwrap();
        assert_eq!(heat_kernel(l.data(), 0.0, 1e-12).unwrap(), Matrix::identity(7));
        let h = heat_kernel(l.data(), 100.0, 1e-12).unwrap();
        let pi = bases(&g).projection().to_f64();
        assert!(h.max_abs_diff(&pi) < 1e-8);
        for s in h.row_sums() {
            assert!((s - 1.0).abs() < 1e-12);
        }
        assert!(matches!(
            heat_kernel(l.data(), 1.0, 0.0),
            Err(Error::ToleranceUnreachable { .. })
        ));
        let wild = Matrix::from_rows(vec![vec![-300.0]]);
        assert!(matches!(
            heat_kernel(&wild, 1.0, 1e-12),
            Err(Error::ToleranceUnreachable { .. })
        ));
    }

    #[test]
    fn heat_kernel_of_scalar() {
        let l = Matrix::from_rows(vec![vec![0.75]]);
        let h = heat_kernel(&l, 2.0, 1e-14).unwrap();
        assert!((h[(0, 0)] - (-1.5f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn walks_are_reproducible_and_follow_rows() {
        let g = g7();
        let s = stochastic::<f64>(&g);
        let w = sample_walk(&s, 1, 7, 20).unwrap();
        assert_eq!(w[0], 1);
        assert!(w[1..].iter().all(|&v| v == 0));
        let a = sample_walk(&s, 5, 42, 50).unwrap();
        assert_eq!(a, sample_walk(&s, 5, 42, 50).unwrap());
        for pair in a.windows(2) {
            assert!(s[(pair[0], pair[1])] > 0.0);
        }
        let c = sample_walk(&s, 3, 9, 200).unwrap();
        assert!(c.iter().all(|v| [2, 3, 4].contains(v)));
    }

    #[test]
    fn absorption_estimate_is_deterministic() {
        let g = g7();
        let s = stochastic::<f64>(&g);
        let dec = decompose(&g);
        let a = absorption_frequencies(&s, &dec, 5, 2000, 1, 10_000).unwrap();
        let b = absorption_frequencies(&s, &dec, 5, 2000, 1, 10_000).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.unabsorbed, 0);
        assert_eq!(a.counts.iter().sum::<usize>(), 2000);
    }

    #[test]
    fn csv_export() {
        let g = Digraph::from_labeled_edges(&[("a", "b"), ("b", "a")]).unwrap();
        let s = stochastic::<Rational>(&g);
        let t = simulate_discrete(Process::Diffusion, &[q(1, 1), q(0, 1)], &s, 2).unwrap();
        let csv = t.to_csv(g.vertex_ids(), Some(&[q(1, 2), q(1, 2)])).unwrap();
        assert_eq!(csv, "step,a,b\n0,1/1,0/1\n1,0/1,1/1\n2,1/1,0/1\nlimit,1/2,1/2\n");
    }
}
