//! Dense complex matrices, Hilbert–Schmidt geometry and Hermitian spectra.
//!
//! Every norm in this crate is the Frobenius norm unless stated otherwise.
//! Matrices serialize as `{"dim": n, "entries": [[[re, im], ...], ...]}`
//! with row-major nesting; floats are printed in shortest round-trip form,
//! so a write followed by a read reproduces every entry bit for bit.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::linalg::SymmetricEigen;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[cfg(test)]
pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Square, finite, dense complex matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct ComplexMatrix {
    data: DMatrix<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    dim: usize,
    entries: Vec<Vec<[f64; 2]>>,
}

impl TryFrom<MatrixJson> for ComplexMatrix {
    type Error = Error;

    fn try_from(json: MatrixJson) -> Result<Self> {
        if json.entries.len() != json.dim {
            return Err(Error::Format(format!(
                "\"dim\" is {} but {} rows were given",
                json.dim,
                json.entries.len()
            )));
        }
        let mut flat = Vec::with_capacity(json.dim * json.dim);
        for (i, row) in json.entries.iter().enumerate() {
            if row.len() != json.dim {
                return Err(Error::Format(format!(
                    "row {i} has {} entries, expected {}",
                    row.len(),
                    json.dim
                )));
            }
            flat.extend(row.iter().map(|&[re, im]| Complex64::new(re, im)));
        }
        ComplexMatrix::new(DMatrix::from_row_slice(json.dim, json.dim, &flat))
    }
}

impl From<ComplexMatrix> for MatrixJson {
    fn from(m: ComplexMatrix) -> Self {
        let n = m.dim();
        let entries = (0..n)
            .map(|i| (0..n).map(|j| [m.data[(i, j)].re, m.data[(i, j)].im]).collect())
            .collect();
        MatrixJson { dim: n, entries }
    }
}

impl ComplexMatrix {
    pub fn new(data: DMatrix<Complex64>) -> Result<Self> {
        if data.nrows() != data.ncols() || data.nrows() == 0 {
            return Err(Error::Shape {
                rows: data.nrows(),
                cols: data.ncols(),
            });
        }
        if let Some(index) = data.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { data })
    }

    /// Wraps a matrix produced by arithmetic on already-valid matrices.
    pub(crate) fn from_raw(data: DMatrix<Complex64>) -> Self {
        debug_assert_eq!(data.nrows(), data.ncols());
        Self { data }
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Shape {
                rows: n,
                cols: rows.first().map_or(0, Vec::len),
            });
        }
        let flat: Vec<Complex64> = rows.iter().flatten().copied().collect();
        Self::new(DMatrix::from_row_slice(n, n, &flat))
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn identity(n: usize) -> Self {
        assert!(n > 0, "identity of size 0");
        Self::from_raw(DMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n > 0, "zero matrix of size 0");
        Self::from_raw(DMatrix::zeros(n, n))
    }

    pub fn from_real_diagonal(values: &[f64]) -> Result<Self> {
        let diag = DVector::from_iterator(values.len(), values.iter().map(|&x| Complex64::new(x, 0.0)));
        Self::new(DMatrix::from_diagonal(&diag))
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn as_dmatrix(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn into_dmatrix(self) -> DMatrix<Complex64> {
        self.data
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_raw(self.data.adjoint())
    }

    pub fn conj(&self) -> Self {
        Self::from_raw(self.data.map(|z| z.conj()))
    }

    pub fn transpose(&self) -> Self {
        Self::from_raw(self.data.transpose())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::from_raw(&self.data * c)
    }

    pub fn trace(&self) -> Complex64 {
        self.data.trace()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.data.norm()
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self::from_raw(self.data.kronecker(&other.data))
    }

    pub fn mul_vector(&self, v: &StateVector) -> Result<StateVector> {
        check_dims(self.dim(), v.dim())?;
        Ok(StateVector::from_raw(&self.data * v.as_dvector()))
    }

    /// Returns `||self - other||`, the Frobenius distance.
    pub fn distance(&self, other: &Self) -> f64 {
        (&self.data - &other.data).norm()
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&ComplexMatrix> for &ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: &ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix::from_raw(&self.data $op &rhs.data)
            }
        }
        impl $trait<ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: ComplexMatrix) -> ComplexMatrix {
                ComplexMatrix::from_raw(self.data $op rhs.data)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix::from_raw(-&self.data)
    }
}

/// Finite complex column vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct StateVector {
    data: DVector<Complex64>,
}

impl TryFrom<Vec<[f64; 2]>> for StateVector {
    type Error = Error;
    fn try_from(v: Vec<[f64; 2]>) -> Result<Self> {
        Self::new(v.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
    }
}

impl From<StateVector> for Vec<[f64; 2]> {
    fn from(v: StateVector) -> Self {
        v.data.iter().map(|z| [z.re, z.im]).collect()
    }
}

impl StateVector {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Shape { rows: 0, cols: 1 });
        }
        if let Some(index) = entries.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self {
            data: DVector::from_vec(entries),
        })
    }

    pub(crate) fn from_raw(data: DVector<Complex64>) -> Self {
        Self { data }
    }

    /// Standard basis vector `e_index` of length `dim`.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim);
        let mut data = DVector::zeros(dim);
        data[index] = ONE;
        Self { data }
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn as_dvector(&self) -> &DVector<Complex64> {
        &self.data
    }

    pub fn entries(&self) -> &[Complex64] {
        self.data.as_slice()
    }

    pub fn norm(&self) -> f64 {
        self.data.norm()
    }

    /// `<self, other>`, antilinear in `self`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        check_dims(self.dim(), other.dim())?;
        Ok(self.data.dotc(&other.data))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::from_raw(&self.data * c)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Ok(Self::from_raw(&self.data + &other.data))
    }

    pub fn distance(&self, other: &Self) -> f64 {
        (&self.data - &other.data).norm()
    }
}

/// Numerical thresholds shared by every module.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// Eigenvalues closer than `cluster_tol * max(1, ||A||)` are merged.
    pub cluster_tol: f64,
    /// Singular values at or below `rank_rel_tol * s_max` count as zero.
    pub rank_rel_tol: f64,
    /// Absolute/relative residual allowance for Hermiticity, unitarity and
    /// commutation predicates.
    pub residual_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            cluster_tol: 1e-8,
            rank_rel_tol: 1e-10,
            residual_tol: 1e-10,
        }
    }
}

impl ToleranceConfig {
    pub fn new(cluster_tol: f64, rank_rel_tol: f64, residual_tol: f64) -> Result<Self> {
        let cfg = Self {
            cluster_tol,
            rank_rel_tol,
            residual_tol,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !(positive(self.cluster_tol) && positive(self.rank_rel_tol) && positive(self.residual_tol)) {
            return Err(Error::Spec("tolerances must be finite and strictly positive".into()));
        }
        if self.cluster_tol > 1.0 || self.rank_rel_tol > 1.0 {
            return Err(Error::Spec("cluster_tol and rank_rel_tol must not exceed 1".into()));
        }
        Ok(())
    }
}

pub(crate) fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension { expected, found })
    }
}

/// Hilbert–Schmidt inner product `trace(a^dagger b)`.
pub fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Complex64> {
    check_dims(a.dim(), b.dim())?;
    Ok(a.data.iter().zip(b.data.iter()).map(|(x, y)| x.conj() * y).sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    Hermitian,
    Unitary,
}

pub(crate) fn hermitian_deviation(a: &ComplexMatrix) -> f64 {
    (&a.data - a.data.adjoint()).norm()
}

pub(crate) fn unitary_deviation(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    (a.data.adjoint() * &a.data - DMatrix::<Complex64>::identity(n, n)).norm()
}

/// Hermitian: `||a - a^dagger|| <= residual_tol * max(1, ||a||)`.
/// Unitary: `||a^dagger a - I|| <= residual_tol`.
pub fn validate(a: &ComplexMatrix, kind: MatrixKind, cfg: &ToleranceConfig) -> bool {
    match kind {
        MatrixKind::Hermitian => hermitian_deviation(a) <= cfg.residual_tol * a.norm().max(1.0),
        MatrixKind::Unitary => unitary_deviation(a) <= cfg.residual_tol,
    }
}

pub(crate) fn ensure_hermitian(a: &ComplexMatrix, cfg: &ToleranceConfig) -> Result<()> {
    let deviation = hermitian_deviation(a);
    if deviation <= cfg.residual_tol * a.norm().max(1.0) {
        Ok(())
    } else {
        Err(Error::NotHermitian { deviation })
    }
}

/// One multiplicity class of a Hermitian spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenCluster {
    /// Mean of the merged eigenvalues.
    pub value: f64,
    pub multiplicity: usize,
    /// Orthonormal basis of the eigenspace.
    pub vectors: Vec<StateVector>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    /// Sorted by strictly increasing `value`.
    pub clusters: Vec<EigenCluster>,
    /// All eigenvectors as columns, in cluster order.
    pub basis_matrix: ComplexMatrix,
    pub cluster_tol: f64,
    /// Set when some adjacent eigenvalue gap lies within a factor of 100 of
    /// the merge threshold, i.e. the multiplicity profile is fragile.
    pub near_threshold: bool,
}

impl SpectrumReport {
    pub fn dim(&self) -> usize {
        self.basis_matrix.dim()
    }

    pub fn multiplicities(&self) -> Vec<usize> {
        self.clusters.iter().map(|c| c.multiplicity).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.clusters.iter().map(|c| c.value).collect()
    }

    /// `sum m_i^2`, the dimension of the commutant predicted by the spectrum.
    pub fn commutant_dim(&self) -> usize {
        self.clusters.iter().map(|c| c.multiplicity * c.multiplicity).sum()
    }

    /// Cluster value for each column of `basis_matrix`.
    pub fn column_values(&self) -> Vec<f64> {
        self.clusters
            .iter()
            .flat_map(|c| std::iter::repeat_n(c.value, c.multiplicity))
            .collect()
    }

    /// Index of the cluster owning each column of `basis_matrix`.
    pub fn column_clusters(&self) -> Vec<usize> {
        self.clusters
            .iter()
            .enumerate()
            .flat_map(|(k, c)| std::iter::repeat_n(k, c.multiplicity))
            .collect()
    }
}

/// Rotates `v` so its first (near-)largest entry is real and positive.
fn fix_phase(v: &mut DVector<Complex64>) {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    if let Some(pivot) = v.iter().find(|z| z.norm() >= max * (1.0 - 1e-9)) {
        let phase = pivot.conj() / pivot.norm();
        *v *= phase;
    }
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues merged into
/// multiplicity classes by absolute-gap greedy clustering.
pub fn hermitian_eig(a: &ComplexMatrix, cfg: &ToleranceConfig) -> Result<SpectrumReport> {
    ensure_hermitian(a, cfg)?;
    let n = a.dim();
    let scale = a.norm().max(1.0);
    let sym = (&a.data + a.data.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, 1000 * n.max(8))
        .ok_or_else(|| Error::Numerical("Hermitian eigensolver did not converge".into()))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let sorted: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();

    let threshold = cfg.cluster_tol * scale;
    let mut near_threshold = false;
    let mut groups: Vec<Vec<usize>> = vec![vec![0]];
    for k in 1..n {
        let gap = sorted[k] - sorted[k - 1];
        if gap > threshold / 100.0 && gap <= threshold * 100.0 {
            near_threshold = true;
        }
        if gap > threshold {
            groups.push(Vec::new());
        }
        groups.last_mut().expect("nonempty").push(k);
    }

    let mut clusters = Vec::with_capacity(groups.len());
    let mut columns: Vec<DVector<Complex64>> = Vec::with_capacity(n);
    for group in groups {
        let value = group.iter().map(|&k| sorted[k]).sum::<f64>() / group.len() as f64;
        let mut vectors: Vec<DVector<Complex64>> = Vec::with_capacity(group.len());
        for &k in &group {
            let mut v = eig.eigenvectors.column(order[k]).into_owned();
            // Re-orthonormalize against the earlier vectors of this cluster.
            for _ in 0..2 {
                for u in &vectors {
                    let c = u.dotc(&v);
                    v -= u * c;
                }
            }
            let norm = v.norm();
            if norm < 0.5 {
                return Err(Error::Numerical("eigenvectors are not linearly independent".into()));
            }
            v /= Complex64::new(norm, 0.0);
            fix_phase(&mut v);
            vectors.push(v);
        }
        columns.extend(vectors.iter().cloned());
        clusters.push(EigenCluster {
            value,
            multiplicity: vectors.len(),
            vectors: vectors.into_iter().map(StateVector::from_raw).collect(),
        });
    }

    Ok(SpectrumReport {
        clusters,
        basis_matrix: ComplexMatrix::from_raw(DMatrix::from_columns(&columns)),
        cluster_tol: cfg.cluster_tol,
        near_threshold,
    })
}

/// Column-stacking vectorization and its inverse.
#[cfg(test)]
pub(crate) fn vec_columns(m: &DMatrix<Complex64>) -> DVector<Complex64> {
    DVector::from_column_slice(m.as_slice())
}

pub(crate) fn unvec_columns(v: &DVector<Complex64>, n: usize) -> DMatrix<Complex64> {
    DMatrix::from_column_slice(n, n, v.as_slice())
}
