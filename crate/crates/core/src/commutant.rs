//! Commutants, double commutants and degeneracy certificates.
//!
//! A matrix `X` commutes with `A` iff `vec(AX - XA) = (I (x) A - A^T (x) I) vec(X)`
//! vanishes, with `vec` stacking columns. The commutant of a generator set
//! is therefore the joint right nullspace of one `n^2 x n^2` block per
//! generator. Blocks are folded into a square triangular factor by QR as
//! they arrive, and the nullspace is read off the right singular vectors of
//! that factor. Because the singular vectors are orthonormal in `C^{n^2}`,
//! the resulting matrices are orthonormal in the Hilbert–Schmidt product.

use nalgebra::linalg::{QR, SVD};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linop::{hermitian_eig, hs_inner, unvec_columns, ComplexMatrix, ToleranceConfig};

/// Singular values within this factor of the rank cut raise the warning flag.
const RANK_GAP_WINDOW: f64 = 100.0;

/// Matrix of `X -> A X - X A` acting on column-stacked `vec(X)`.
pub fn commutator_superop(a: &ComplexMatrix) -> DMatrix<Complex64> {
    let n = a.dim();
    let id = DMatrix::<Complex64>::identity(n, n);
    id.kronecker(a.as_dmatrix()) - a.as_dmatrix().transpose().kronecker(&id)
}

/// Matrix of `M -> s M + M conj(s)`; its nullspace holds the linear parts of
/// antiunitaries that anticommute with `s`.
pub fn anti_intertwiner_superop(s: &ComplexMatrix) -> DMatrix<Complex64> {
    let n = s.dim();
    let id = DMatrix::<Complex64>::identity(n, n);
    id.kronecker(s.as_dmatrix()) + s.as_dmatrix().adjoint().kronecker(&id)
}

/// Outcome of a rank-cut nullspace computation.
#[derive(Debug, Clone)]
pub(crate) struct Nullspace {
    pub vectors: Vec<DVector<Complex64>>,
    pub warning: bool,
}

fn vstack(top: &DMatrix<Complex64>, bottom: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let mut out = DMatrix::zeros(top.nrows() + bottom.nrows(), top.ncols());
    out.rows_mut(0, top.nrows()).copy_from(top);
    out.rows_mut(top.nrows(), bottom.nrows()).copy_from(bottom);
    out
}

/// Replaces a tall stack with its `R` factor; the row space is unchanged.
fn compress(stack: DMatrix<Complex64>) -> DMatrix<Complex64> {
    if stack.nrows() <= stack.ncols() {
        return stack;
    }
    QR::new(stack).r()
}

/// Joint nullspace of a stream of `k x ncols` blocks. Singular values at or
/// below `rank_rel_tol * max(s_max, scale)` count as zero, where `scale` is
/// the size of the operators the blocks were built from. Without it a stack
/// made entirely of rounding noise (the commutator of a computed multiple of
/// the identity) would be read as full rank. An all-zero stack has full
/// nullspace.
pub(crate) fn joint_nullspace<I>(blocks: I, ncols: usize, scale: f64, rank_rel_tol: f64) -> Result<Nullspace>
where
    I: IntoIterator<Item = DMatrix<Complex64>>,
{
    let mut stack = DMatrix::<Complex64>::zeros(0, ncols);
    for block in blocks {
        debug_assert_eq!(block.ncols(), ncols);
        stack = vstack(&stack, &block);
        if stack.nrows() > 2 * ncols {
            stack = compress(stack);
        }
    }
    let mut square = compress(stack);
    if square.nrows() < ncols {
        square = vstack(&square, &DMatrix::zeros(ncols - square.nrows(), ncols));
    }

    let svd = SVD::try_new(square, false, true, f64::EPSILON, 0)
        .ok_or_else(|| Error::Numerical("singular value decomposition did not converge".into()))?;
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::Numerical("right singular vectors missing".into()))?;
    let s_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cut = rank_rel_tol * s_max.max(scale);

    let mut null_idx: Vec<usize> = Vec::new();
    let mut warning = false;
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s <= cut {
            null_idx.push(k);
        }
        if cut > 0.0 && s > cut / RANK_GAP_WINDOW && s < cut * RANK_GAP_WINDOW {
            warning = true;
        }
    }
    // Deterministic order: smallest singular value first, ties by index.
    null_idx.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]).then(a.cmp(&b)));

    let vectors = null_idx.into_iter().map(|k| v_t.row(k).adjoint()).collect();
    Ok(Nullspace { vectors, warning })
}

/// Hilbert–Schmidt-orthonormal basis of a matrix algebra.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebraBasis {
    pub dim_space: usize,
    pub elements: Vec<ComplexMatrix>,
    pub rank_gap_warning: bool,
}

impl AlgebraBasis {
    pub fn dimension(&self) -> usize {
        self.elements.len()
    }

    /// Orthogonal projection of `x` onto the span of the basis.
    pub fn project(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let mut acc = ComplexMatrix::zeros(self.dim_space);
        for e in &self.elements {
            acc = &acc + &e.scale(hs_inner(e, x)?);
        }
        Ok(acc)
    }
}

fn common_dim(generators: &[ComplexMatrix]) -> Result<usize> {
    let n = generators.first().ok_or(Error::EmptyGenerators)?.dim();
    for g in generators {
        if g.dim() != n {
            return Err(Error::Dimension {
                expected: n,
                found: g.dim(),
            });
        }
    }
    Ok(n)
}

/// Basis of `{X : A_i X = X A_i for every generator A_i}`.
pub fn commutant_basis(generators: &[ComplexMatrix], cfg: &ToleranceConfig) -> Result<AlgebraBasis> {
    let n = common_dim(generators)?;
    let scale = generators.iter().map(ComplexMatrix::norm).fold(0.0, f64::max);
    let null = joint_nullspace(generators.iter().map(commutator_superop), n * n, scale, cfg.rank_rel_tol)?;
    Ok(AlgebraBasis {
        dim_space: n,
        elements: null
            .vectors
            .iter()
            .map(|v| ComplexMatrix::from_raw(unvec_columns(v, n)))
            .collect(),
        rank_gap_warning: null.warning,
    })
}

/// Basis of the commutant of the commutant.
pub fn bicommutant_basis(generators: &[ComplexMatrix], cfg: &ToleranceConfig) -> Result<AlgebraBasis> {
    let first = commutant_basis(generators, cfg)?;
    let mut second = commutant_basis(&first.elements, cfg)?;
    second.rank_gap_warning |= first.rank_gap_warning;
    Ok(second)
}

/// Algebraic degeneracy verdict for one Hermitian matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyCertificate {
    pub commutant_dim: usize,
    pub bicommutant_dim: usize,
    /// `commutant_dim != bicommutant_dim`.
    pub degenerate: bool,
    /// Some singular value sat near a rank cut, or the algebraic dimensions
    /// disagree with the eigenvalue clustering.
    pub rank_gap_warning: bool,
    /// Whether `(commutant_dim, bicommutant_dim)` equals `(sum m_i^2, r)` from
    /// the clustered spectrum.
    pub spectral_agreement: bool,
    pub generator_norm: f64,
    pub tolerances: ToleranceConfig,
}

pub fn degeneracy_certificate(h: &ComplexMatrix, cfg: &ToleranceConfig) -> Result<DegeneracyCertificate> {
    let spectrum = hermitian_eig(h, cfg)?;
    let first = commutant_basis(std::slice::from_ref(h), cfg)?;
    let second = commutant_basis(&first.elements, cfg)?;
    let (commutant_dim, bicommutant_dim) = (first.dimension(), second.dimension());
    let spectral_agreement =
        commutant_dim == spectrum.commutant_dim() && bicommutant_dim == spectrum.clusters.len();
    Ok(DegeneracyCertificate {
        commutant_dim,
        bicommutant_dim,
        degenerate: commutant_dim != bicommutant_dim,
        rank_gap_warning: first.rank_gap_warning
            || second.rank_gap_warning
            || spectrum.near_threshold
            || !spectral_agreement,
        spectral_agreement,
        generator_norm: h.norm(),
        tolerances: *cfg,
    })
}
