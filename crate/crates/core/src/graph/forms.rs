use num::traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::Digraph;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{Rational, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixKind {
    /// `Q`, with `Q[i][j] = w(j -> i)`.
    Adjacency,
    /// `D`, diagonal of the row sums of `Q`.
    InDegree,
    /// `S = D⁻¹Q`, zero rows patched with a self-loop.
    Stochastic,
    /// `S_t`, zero rows replaced by the uniform row.
    StochasticTeleport,
    /// `L = D − Q`.
    Combinatorial,
    /// `I − S`.
    RwLaplacian,
    /// `I − S_t`.
    RwLaplacianTeleport,
}

impl MatrixKind {
    pub fn name(self) -> &'static str {
        match self {
            MatrixKind::Adjacency => "adjacency",
            MatrixKind::InDegree => "in_degree",
            MatrixKind::Stochastic => "stochastic",
            MatrixKind::StochasticTeleport => "stochastic_teleport",
            MatrixKind::Combinatorial => "combinatorial",
            MatrixKind::RwLaplacian => "rw_laplacian",
            MatrixKind::RwLaplacianTeleport => "rw_laplacian_teleport",
        }
    }

    pub fn is_stochastic(self) -> bool {
        matches!(self, MatrixKind::Stochastic | MatrixKind::StochasticTeleport)
    }

    pub fn is_rw_laplacian(self) -> bool {
        matches!(self, MatrixKind::RwLaplacian | MatrixKind::RwLaplacianTeleport)
    }
}

/// How rows of `Q` that are entirely zero (vertices without incoming edges)
/// are patched before normalization. Nonzero rows are never touched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DanglingPolicy {
    /// Put a 1 on the diagonal: the walker stays put.
    SelfLoop,
    /// Replace the row by `1/n`: the walker teleports.
    Uniform,
}

impl DanglingPolicy {
    pub fn name(self) -> &'static str {
        match self {
            DanglingPolicy::SelfLoop => "self_loop",
            DanglingPolicy::Uniform => "uniform",
        }
    }
}

impl std::str::FromStr for DanglingPolicy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "self_loop" | "self-loop" | "none" => Ok(DanglingPolicy::SelfLoop),
            "uniform" | "teleport" => Ok(DanglingPolicy::Uniform),
            other => Err(format!("unknown dangling policy `{other}`")),
        }
    }
}

/// Per-row treatment used by [`stochastic_with_rows`]. The first three
/// only affect zero rows; nonzero rows are normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowPatch {
    /// A zero row is an error.
    Normalize,
    SelfLoop,
    Uniform,
    /// Replace the row by `1/n` even if it is not zero.
    ForceUniform,
}

/// A matrix together with what it represents.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixForm<T> {
    kind: MatrixKind,
    data: Matrix<T>,
    policy: Option<DanglingPolicy>,
}

impl<T: Scalar> MatrixForm<T> {
    /// Wraps an arbitrary matrix. Used for derived stochastic matrices such
    /// as `e^{−𝓛}` that do not come from a [`Digraph`] directly.
    pub fn from_parts(kind: MatrixKind, data: Matrix<T>, policy: Option<DanglingPolicy>) -> Self {
        MatrixForm { kind, data, policy }
    }

    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    pub fn data(&self) -> &Matrix<T> {
        &self.data
    }

    pub fn into_data(self) -> Matrix<T> {
        self.data
    }

    pub fn policy(&self) -> Option<DanglingPolicy> {
        self.policy
    }

    pub fn n(&self) -> usize {
        self.data.rows()
    }

    /// The stochastic matrix underlying an `S`- or `I − S`-family form.
    pub fn stochastic(&self) -> Result<Matrix<T>> {
        if self.kind.is_stochastic() {
            Ok(self.data.clone())
        } else if self.kind.is_rw_laplacian() {
            Matrix::identity(self.n()).sub(&self.data)
        } else {
            Err(Error::InvalidArgument(format!(
                "{} is not a stochastic or random-walk Laplacian form",
                self.kind.name()
            )))
        }
    }

    /// The random-walk Laplacian `I − S` of an `S`- or `I − S`-family form.
    pub fn rw_laplacian(&self) -> Result<Matrix<T>> {
        if self.kind.is_rw_laplacian() {
            Ok(self.data.clone())
        } else {
            Matrix::identity(self.n()).sub(&self.stochastic()?)
        }
    }

    /// Checks the sign and row-sum invariants of the form's kind.
    pub fn check_invariants(&self, tol: f64) -> Result<()> {
        let n = self.n();
        let fail = |msg: String| Err(Error::InvalidArgument(msg));
        match self.kind {
            MatrixKind::Stochastic | MatrixKind::StochasticTeleport => {
                for (i, s) in self.data.row_sums().iter().enumerate() {
                    if !s.approx_eq(&T::one(), tol) {
                        return fail(format!("row {i} of {} sums to {s}", self.kind.name()));
                    }
                }
                for i in 0..n {
                    if self.data.row(i).iter().any(|x| x.is_negative()) {
                        return fail(format!("row {i} has a negative entry"));
                    }
                }
            }
            MatrixKind::Combinatorial | MatrixKind::RwLaplacian | MatrixKind::RwLaplacianTeleport => {
                for (i, s) in self.data.row_sums().iter().enumerate() {
                    if !s.approx_eq(&T::zero(), tol) {
                        return fail(format!("row {i} of {} sums to {s}", self.kind.name()));
                    }
                }
                for i in 0..n {
                    for j in 0..n {
                        let x = &self.data[(i, j)];
                        let bad = if i == j { x.is_negative() } else { x.is_positive() };
                        if bad {
                            return fail(format!("entry ({i},{j}) has the wrong sign"));
                        }
                    }
                }
            }
            MatrixKind::Adjacency | MatrixKind::InDegree => {
                for i in 0..n {
                    if self.data.row(i).iter().any(|x| x.is_negative()) {
                        return fail(format!("row {i} has a negative entry"));
                    }
                }
            }
        }
        Ok(())
    }
}

fn resolve(kind: MatrixKind, policy: Option<DanglingPolicy>) -> Result<(MatrixKind, Option<DanglingPolicy>)> {
    use DanglingPolicy::*;
    use MatrixKind::*;
    match (kind, policy) {
        (StochasticTeleport | RwLaplacianTeleport, Some(SelfLoop)) => Err(Error::PolicyConflict {
            kind: kind.name(),
            policy: SelfLoop.name(),
        }),
        (StochasticTeleport | RwLaplacianTeleport, _) => Ok((kind, Some(Uniform))),
        (Stochastic, Some(Uniform)) => Ok((StochasticTeleport, policy)),
        (RwLaplacian, Some(Uniform)) => Ok((RwLaplacianTeleport, policy)),
        _ => Ok((kind, policy)),
    }
}

fn row_patch(policy: Option<DanglingPolicy>) -> RowPatch {
    match policy {
        None => RowPatch::Normalize,
        Some(DanglingPolicy::SelfLoop) => RowPatch::SelfLoop,
        Some(DanglingPolicy::Uniform) => RowPatch::Uniform,
    }
}

/// A sparse row as `(col, weight)` pairs with its exact sum.
type SparseRow = (Vec<(usize, Rational)>, Rational);

/// Exact rows of the (patched) adjacency matrix as sparse `(col, weight)`
/// lists, plus the exact row sums. Patches apply only to zero rows.
fn patched_rows(g: &Digraph, patch: &impl Fn(usize) -> RowPatch) -> Result<Vec<SparseRow>> {
    let n = g.n();
    (0..n)
        .map(|i| {
            let row: Vec<(usize, Rational)> = g.in_edges(i).map(|e| (e.src, e.weight.clone())).collect();
            if !row.is_empty() {
                let total = row.iter().fold(Rational::zero(), |acc, (_, w)| acc + w);
                return Ok((row, total));
            }
            match patch(i) {
                RowPatch::Normalize => Err(Error::DanglingVertex {
                    vertex: g.label(i).to_string(),
                }),
                RowPatch::SelfLoop => Ok((vec![(i, Rational::one())], Rational::one())),
                RowPatch::Uniform | RowPatch::ForceUniform => {
                    let u = Rational::new(1.into(), n.into());
                    Ok(((0..n).map(|j| (j, u.clone())).collect(), Rational::one()))
                }
            }
        })
        .collect()
}

/// Stochastic matrix with an explicit per-row treatment.
///
/// [`RowPatch::ForceUniform`] is how alternative teleporting readings (a
/// nonzero row replaced by `1/n`) are expressed.
pub fn stochastic_with_rows<T: Scalar>(g: &Digraph, patch: impl Fn(usize) -> RowPatch) -> Result<Matrix<T>> {
    let n = g.n();
    let rows = patched_rows(g, &patch)?;
    let mut s = Matrix::zeros(n, n);
    let uniform = T::from_rational(&Rational::new(1.into(), n.into()));
    for (i, (row, total)) in rows.iter().enumerate() {
        if patch(i) == RowPatch::ForceUniform {
            for j in 0..n {
                s[(i, j)] = uniform.clone();
            }
            continue;
        }
        for (j, w) in row {
            s[(i, *j)] = T::from_rational(&(w / total));
        }
    }
    Ok(s)
}

/// Builds one of the matrix forms of `g`.
///
/// `policy = Some(Uniform)` upgrades `Stochastic`/`RwLaplacian` to their
/// teleporting kinds. With `policy = None`, any zero row makes the `D`, `S`
/// and `I − S` kinds fail with [`Error::DanglingVertex`]; `Q` and `L` are
/// built from the raw adjacency and tolerate zero rows.
pub fn build_matrix<T: Scalar>(g: &Digraph, kind: MatrixKind, policy: Option<DanglingPolicy>) -> Result<MatrixForm<T>> {
    let (kind, policy) = resolve(kind, policy)?;
    let n = g.n();
    let data = match kind {
        MatrixKind::Adjacency | MatrixKind::Combinatorial => {
            let mut q = Matrix::zeros(n, n);
            let mut d = Matrix::zeros(n, n);
            let rows: Vec<(Vec<(usize, Rational)>, Rational)> = match policy {
                None => (0..n)
                    .map(|i| {
                        let row: Vec<_> = g.in_edges(i).map(|e| (e.src, e.weight.clone())).collect();
                        let total = row.iter().fold(Rational::zero(), |acc, (_, w)| acc + w);
                        (row, total)
                    })
                    .collect(),
                Some(_) => patched_rows(g, &|_| row_patch(policy))?,
            };
            for (i, (row, total)) in rows.into_iter().enumerate() {
                for (j, w) in row {
                    q[(i, j)] = T::from_rational(&w);
                }
                d[(i, i)] = T::from_rational(&total);
            }
            if kind == MatrixKind::Adjacency {
                q
            } else {
                d.sub(&q)?
            }
        }
        MatrixKind::InDegree => {
            let rows = patched_rows(g, &|_| row_patch(policy))?;
            let mut d = Matrix::zeros(n, n);
            for (i, (_, total)) in rows.into_iter().enumerate() {
                d[(i, i)] = T::from_rational(&total);
            }
            d
        }
        MatrixKind::Stochastic | MatrixKind::StochasticTeleport => stochastic_with_rows(g, |_| row_patch(policy))?,
        MatrixKind::RwLaplacian | MatrixKind::RwLaplacianTeleport => {
            let s: Matrix<T> = stochastic_with_rows(g, |_| row_patch(policy))?;
            Matrix::identity(n).sub(&s)?
        }
    };
    Ok(MatrixForm { kind, data, policy })
}
