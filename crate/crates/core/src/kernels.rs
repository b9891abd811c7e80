//! Bases of the left and right kernels of the random-walk Laplacian
//! `𝓛 = I − S` and the projection `Π = Γ⁰Γ̄⁰` onto the zero eigenspace.
//!
//! With `k` reaches, the right kernel has a basis `γ_1..γ_k` of harmonic
//! vectors: `γ_i` is 1 on the exclusive part `H_i`, 0 off the reach `R_i`,
//! and on the common vertices it is the probability that a walker started
//! there is absorbed into the cabal `B_i`. The left kernel has a basis of
//! invariant measures `γ̄_i`, each the stationary distribution of the walk
//! restricted to `B_i`. The two bases are biorthogonal, so `Π` is a
//! projection with `𝓛Π = Π𝓛 = 0`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Digraph, MatrixForm, MatrixKind};
use crate::matrix::{vector_to_json, Lu, Matrix};
use crate::scalar::Scalar;
use crate::structure::ReachDecomposition;

/// Float-mode tolerances. Exact arithmetic ignores them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Bound on `‖𝓛γ‖∞` and `‖γ̄𝓛‖∞`.
    pub residual: f64,
    /// Entrywise comparisons.
    pub entry: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            residual: 1e-10,
            entry: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelBases<T> {
    gamma: Matrix<T>,
    gamma_bar: Matrix<T>,
    projection: Matrix<T>,
    decomposition: ReachDecomposition,
}

impl<T: Scalar> KernelBases<T> {
    /// Computes both bases and `Π` from an `S`- or `I − S`-family form.
    pub fn compute(form: &MatrixForm<T>, decomposition: ReachDecomposition) -> Result<Self> {
        Self::compute_with(form, decomposition, &Tolerances::default())
    }

    pub fn compute_with(form: &MatrixForm<T>, decomposition: ReachDecomposition, tol: &Tolerances) -> Result<Self> {
        Self::from_stochastic_with(&form.stochastic()?, decomposition, tol)
    }

    /// Same as [`compute`](Self::compute) for a bare row-stochastic matrix,
    /// e.g. `e^{−𝓛}`.
    pub fn from_stochastic(s: &Matrix<T>, decomposition: ReachDecomposition) -> Result<Self> {
        Self::from_stochastic_with(s, decomposition, &Tolerances::default())
    }

    pub fn from_stochastic_with(s: &Matrix<T>, decomposition: ReachDecomposition, tol: &Tolerances) -> Result<Self> {
        let gamma = right_kernel_from_stochastic(s, &decomposition, tol)?;
        let gamma_bar = left_kernel_from_stochastic(s, &decomposition, tol)?;
        let projection = projection(&gamma, &gamma_bar)?;
        Ok(KernelBases {
            gamma,
            gamma_bar,
            projection,
            decomposition,
        })
    }

    pub fn k(&self) -> usize {
        self.gamma.cols()
    }

    pub fn n(&self) -> usize {
        self.gamma.rows()
    }

    /// `Γ⁰`, `n × k`, columns `γ_i`.
    pub fn gamma(&self) -> &Matrix<T> {
        &self.gamma
    }

    /// `Γ̄⁰`, `k × n`, rows `γ̄_i`.
    pub fn gamma_bar(&self) -> &Matrix<T> {
        &self.gamma_bar
    }

    /// `Π = Γ⁰Γ̄⁰`.
    pub fn projection(&self) -> &Matrix<T> {
        &self.projection
    }

    pub fn decomposition(&self) -> &ReachDecomposition {
        &self.decomposition
    }

    pub fn gamma_column(&self, i: usize) -> Vec<T> {
        self.gamma.column(i)
    }

    pub fn gamma_bar_row(&self, i: usize) -> &[T] {
        self.gamma_bar.row(i)
    }

    pub fn to_json(&self, g: &Digraph) -> serde_json::Value {
        serde_json::json!({
            "vertices": g.vertex_ids(),
            "k": self.k(),
            "gamma": (0..self.k()).map(|i| vector_to_json(&self.gamma_column(i))).collect::<Vec<_>>(),
            "gamma_bar": self.gamma_bar.to_json(),
            "projection": self.projection.to_json(),
        })
    }
}

/// Right kernel basis `Γ⁰` (`n × k`) of an `S`- or `I − S`-family form.
pub fn right_kernel_basis<T: Scalar>(form: &MatrixForm<T>, dec: &ReachDecomposition) -> Result<Matrix<T>> {
    right_kernel_from_stochastic(&form.stochastic()?, dec, &Tolerances::default())
}

/// Left kernel basis `Γ̄⁰` (`k × n`) of an `S`- or `I − S`-family form.
pub fn left_kernel_basis<T: Scalar>(form: &MatrixForm<T>, dec: &ReachDecomposition) -> Result<Matrix<T>> {
    left_kernel_from_stochastic(&form.stochastic()?, dec, &Tolerances::default())
}

fn check_shape<T: Scalar>(s: &Matrix<T>, dec: &ReachDecomposition) -> Result<()> {
    if !s.is_square() {
        return Err(Error::DimensionMismatch {
            expected: s.rows(),
            found: s.cols(),
        });
    }
    if s.rows() != dec.n() {
        return Err(Error::DimensionMismatch {
            expected: dec.n(),
            found: s.rows(),
        });
    }
    Ok(())
}

/// The walk must not leave exclusive parts or cabals, and a common vertex
/// can only step into `H_j` if it lies in `R_j`.
fn check_consistency<T: Scalar>(s: &Matrix<T>, dec: &ReachDecomposition) -> Result<()> {
    let n = s.rows();
    let mut in_reach = vec![vec![false; dec.k()]; n];
    let mut owner = vec![None; n];
    let mut cabal = vec![None; n];
    for (i, r) in dec.reaches().iter().enumerate() {
        for &v in &r.vertices {
            in_reach[v][i] = true;
        }
        for &v in &r.exclusive {
            owner[v] = Some(i);
        }
        for &v in &r.cabal {
            cabal[v] = Some(i);
        }
    }
    for v in 0..n {
        for u in (0..n).filter(|&u| !s[(v, u)].is_zero()) {
            let ok = match (cabal[v], owner[v]) {
                (Some(i), _) => cabal[u] == Some(i),
                (None, Some(i)) => owner[u] == Some(i),
                (None, None) => owner[u].is_none_or(|j| in_reach[v][j]),
            };
            if !ok {
                return Err(Error::DecompositionMismatch(format!(
                    "walk step {v} -> {u} leaves an invariant set"
                )));
            }
        }
    }
    Ok(())
}

/// Solves `(I − S_CC) X = S_{C,H} E` once for all reaches, where `E` maps
/// exclusive vertices to their reach, and assembles `Γ⁰`.
pub fn right_kernel_from_stochastic<T: Scalar>(
    s: &Matrix<T>,
    dec: &ReachDecomposition,
    tol: &Tolerances,
) -> Result<Matrix<T>> {
    check_shape(s, dec)?;
    check_consistency(s, dec)?;
    let n = s.rows();
    let k = dec.k();
    let mut gamma = Matrix::zeros(n, k);
    let mut owner = vec![None; n];
    for (i, r) in dec.reaches().iter().enumerate() {
        for &v in &r.exclusive {
            gamma[(v, i)] = T::one();
            owner[v] = Some(i);
        }
    }
    let common = dec.common_vertices();
    if !common.is_empty() {
        let m = common.len();
        let a = Matrix::identity(m).sub(&s.select(&common, &common))?;
        let mut rhs: Matrix<T> = Matrix::zeros(m, k);
        for (ci, &c) in common.iter().enumerate() {
            for u in 0..n {
                if let Some(i) = owner[u] {
                    if !s[(c, u)].is_zero() {
                        rhs[(ci, i)] = rhs[(ci, i)].clone() + s[(c, u)].clone();
                    }
                }
            }
        }
        let x = Lu::factor(&a)?.solve_matrix(&rhs)?;
        for (ci, &c) in common.iter().enumerate() {
            for i in 0..k {
                gamma[(c, i)] = x[(ci, i)].clone();
            }
        }
    }
    if !T::EXACT {
        let l = Matrix::identity(n).sub(s)?;
        let residual = l.mul(&gamma)?.norm_inf();
        if !(residual <= tol.residual) {
            return Err(Error::SingularSystem);
        }
    }
    Ok(gamma)
}

/// For each cabal, the stationary distribution of `S_BB`, found by a direct
/// solve with the normalization replacing one redundant equation. Power
/// iteration would fail on periodic cabals.
pub fn left_kernel_from_stochastic<T: Scalar>(
    s: &Matrix<T>,
    dec: &ReachDecomposition,
    tol: &Tolerances,
) -> Result<Matrix<T>> {
    check_shape(s, dec)?;
    check_consistency(s, dec)?;
    let n = s.rows();
    let mut gamma_bar = Matrix::zeros(dec.k(), n);
    for (i, r) in dec.reaches().iter().enumerate() {
        let b = &r.cabal;
        let m = b.len();
        // p (I − S_BB) = 0  <=>  (I − S_BB)ᵀ pᵀ = 0
        let mut a = Matrix::identity(m).sub(&s.select(b, b))?.transpose();
        for j in 0..m {
            a[(m - 1, j)] = T::one();
        }
        let mut rhs = vec![T::zero(); m];
        rhs[m - 1] = T::one();
        let p = Lu::factor(&a)?.solve(&rhs)?;
        for (j, &v) in b.iter().enumerate() {
            gamma_bar[(i, v)] = p[j].clone();
        }
    }
    if !T::EXACT {
        let l = Matrix::identity(n).sub(s)?;
        let residual = gamma_bar.mul(&l)?.norm_inf();
        if !(residual <= tol.residual) {
            return Err(Error::SingularSystem);
        }
    }
    Ok(gamma_bar)
}

/// Rows `γ̄_i D⁻¹`: a basis of the left kernel of `L = D − DS`. The rows
/// are no longer probability vectors.
pub fn left_kernel_combinatorial<T: Scalar>(gamma_bar: &Matrix<T>, d: &MatrixForm<T>) -> Result<Matrix<T>> {
    let n = gamma_bar.cols();
    if d.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: d.n(),
        });
    }
    if d.kind() != MatrixKind::InDegree {
        return Err(Error::InvalidArgument(format!(
            "expected an in-degree matrix, got {}",
            d.kind().name()
        )));
    }
    let mut out = gamma_bar.clone();
    for i in 0..gamma_bar.rows() {
        for v in 0..n {
            if gamma_bar[(i, v)].is_zero() {
                continue;
            }
            let deg = &d.data()[(v, v)];
            if deg.is_zero() {
                return Err(Error::ZeroDegree { vertex: v.to_string() });
            }
            out[(i, v)] = gamma_bar[(i, v)].clone() / deg.clone();
        }
    }
    Ok(out)
}

/// `Π = Γ⁰Γ̄⁰`.
pub fn projection<T: Scalar>(gamma: &Matrix<T>, gamma_bar: &Matrix<T>) -> Result<Matrix<T>> {
    if gamma.cols() != gamma_bar.rows() {
        return Err(Error::DimensionMismatch {
            expected: gamma.cols(),
            found: gamma_bar.rows(),
        });
    }
    if gamma.rows() != gamma_bar.cols() {
        return Err(Error::DimensionMismatch {
            expected: gamma.rows(),
            found: gamma_bar.cols(),
        });
    }
    gamma.mul(gamma_bar)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    /// `(re, im)` pairs, sorted by modulus.
    pub eigenvalues: Vec<(f64, f64)>,
    pub expected_zero_multiplicity: usize,
    /// `n − rank(𝓛)`.
    pub geometric_multiplicity: usize,
    /// `n − rank(𝓛^p)` once the rank of the powers stabilizes.
    pub algebraic_multiplicity: usize,
    pub min_nonzero_real_part: Option<f64>,
    pub violations: Vec<String>,
}

impl SpectrumReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that 0 is an eigenvalue of `l` with algebraic multiplicity `k`
/// and that every other eigenvalue has positive real part (down to `-tol`).
pub fn spectrum_check(l: &Matrix<f64>, k: usize, tol: f64) -> SpectrumReport {
    let n = l.rows();
    let dm = DMatrix::from_fn(n, n, |i, j| l[(i, j)]);
    let rank = |m: &DMatrix<f64>| -> usize {
        if m.is_empty() {
            return 0;
        }
        let sv = m.singular_values();
        let scale = sv.max().max(1.0);
        sv.iter().filter(|&&s| s > tol * scale).count()
    };

    let geometric = n - rank(&dm);
    let mut power = dm.clone();
    let mut r = rank(&power);
    for _ in 0..n {
        let next = &power * &dm;
        let rn = rank(&next);
        power = next;
        if rn == r {
            break;
        }
        r = rn;
    }
    let algebraic = n - r;

    let mut eig: Vec<(f64, f64)> = if n == 0 {
        Vec::new()
    } else {
        dm.complex_eigenvalues().iter().map(|c| (c.re, c.im)).collect()
    };
    eig.sort_by(|a, b| a.0.hypot(a.1).total_cmp(&b.0.hypot(b.1)));

    let zero_tol = tol.sqrt().max(tol);
    let mut violations = Vec::new();
    if geometric != k {
        violations.push(format!("geometric multiplicity of 0 is {geometric}, expected {k}"));
    }
    if algebraic != k {
        violations.push(format!("algebraic multiplicity of 0 is {algebraic}, expected {k}"));
    }
    for (idx, &(re, im)) in eig.iter().enumerate() {
        let modulus = re.hypot(im);
        if idx < k {
            if modulus > zero_tol {
                violations.push(format!("expected a zero eigenvalue, found {re}{im:+}i"));
            }
        } else if modulus <= zero_tol {
            violations.push(format!("extra eigenvalue near zero: {re}{im:+}i"));
        } else if re <= -tol {
            violations.push(format!("eigenvalue {re}{im:+}i has negative real part"));
        }
    }
    let min_nonzero_real_part = eig.iter().skip(k).map(|e| e.0).reduce(f64::min);
    SpectrumReport {
        eigenvalues: eig,
        expected_zero_multiplicity: k,
        geometric_multiplicity: geometric,
        algebraic_multiplicity: algebraic,
        min_nonzero_real_part,
        violations,
    }
}
