//! Antiunitary operators in the form `psi -> M conj(psi)`.
//!
//! Conjugation is taken entrywise in the standard basis, so the plain
//! conjugation `K` has `M = I`, and products of two antiunitaries are the
//! linear maps `M1 conj(M2)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linop::{check_dims, unitary_deviation, ComplexMatrix, SpectrumReport, StateVector, ToleranceConfig};

/// The only accepted value of the JSON `"convention"` field.
pub const CONVENTION: &str = "m_conj";

/// Snap window for the phase of `T^2`.
const PHASE_SNAP: f64 = 1e-6;

/// Unitarity allowance for eigenbases handed to [`conjugation_in_basis`].
const BASIS_UNITARITY_TOL: f64 = 1e-10;

/// Antiunitary operator `T psi = m conj(psi)` with `m` unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct AntiunitaryOp {
    m: ComplexMatrix,
}

#[derive(Serialize, Deserialize)]
pub struct AntiunitaryJson {
    pub m: ComplexMatrix,
    pub convention: String,
}

impl AntiunitaryJson {
    pub fn into_op(self, cfg: &ToleranceConfig) -> Result<AntiunitaryOp> {
        if self.convention != CONVENTION {
            return Err(Error::Format(format!(
                "unsupported antiunitary convention {:?}, expected {CONVENTION:?}",
                self.convention
            )));
        }
        AntiunitaryOp::new(self.m, cfg)
    }
}

impl From<&AntiunitaryOp> for AntiunitaryJson {
    fn from(t: &AntiunitaryOp) -> Self {
        Self {
            m: t.m.clone(),
            convention: CONVENTION.to_string(),
        }
    }
}

impl Serialize for AntiunitaryOp {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        AntiunitaryJson::from(self).serialize(s)
    }
}

/// Deserialization checks unitarity against the default tolerances; use
/// [`AntiunitaryJson::into_op`] to pick other ones.
impl<'de> Deserialize<'de> for AntiunitaryOp {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        AntiunitaryJson::deserialize(d)?
            .into_op(&ToleranceConfig::default())
            .map_err(serde::de::Error::custom)
    }
}

impl AntiunitaryOp {
    pub fn new(m: ComplexMatrix, cfg: &ToleranceConfig) -> Result<Self> {
        let deviation = unitary_deviation(&m);
        if deviation > cfg.residual_tol {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self { m })
    }

    pub(crate) fn from_unitary_unchecked(m: ComplexMatrix) -> Self {
        Self { m }
    }

    /// Standard-basis conjugation `K`.
    pub fn conjugation(dim: usize) -> Self {
        Self {
            m: ComplexMatrix::identity(dim),
        }
    }

    pub fn linear_part(&self) -> &ComplexMatrix {
        &self.m
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    /// `c T`, i.e. `psi -> c m conj(psi)`. Stays antiunitary for `|c| = 1`.
    pub fn scaled(&self, c: Complex64) -> Self {
        Self { m: self.m.scale(c) }
    }
}

pub fn apply(t: &AntiunitaryOp, v: &StateVector) -> Result<StateVector> {
    check_dims(t.dim(), v.dim())?;
    Ok(StateVector::from_raw(t.m.as_dmatrix() * v.as_dvector().map(|z| z.conj())))
}

/// The linear map `t1 t2 = m1 conj(m2)`.
pub fn compose(t1: &AntiunitaryOp, t2: &AntiunitaryOp) -> Result<ComplexMatrix> {
    check_dims(t1.dim(), t2.dim())?;
    Ok(&t1.m * &t2.m.conj())
}

/// The antiunitary `u t`, for unitary `u`.
pub fn compose_linear(u: &ComplexMatrix, t: &AntiunitaryOp, cfg: &ToleranceConfig) -> Result<AntiunitaryOp> {
    check_dims(t.dim(), u.dim())?;
    AntiunitaryOp::new(u * &t.m, cfg)
}

pub fn square(t: &AntiunitaryOp) -> ComplexMatrix {
    &t.m * &t.m.conj()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum InvolutionClass {
    /// `T^2 = e^{i phase} I`; only `0` and `pi` occur for antiunitaries.
    Involution { phase: f64 },
    NotInvolution,
}

impl InvolutionClass {
    /// `Some(+1)` or `Some(-1)` for involutions.
    pub fn sign(&self) -> Option<i8> {
        match *self {
            InvolutionClass::Involution { phase: 0.0 } => Some(1),
            InvolutionClass::Involution { .. } => Some(-1),
            InvolutionClass::NotInvolution => None,
        }
    }
}

/// Distance of `s` from `c I`.
pub(crate) fn scalar_deviation(s: &ComplexMatrix, c: Complex64) -> f64 {
    let n = s.dim();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { c } else { Complex64::new(0.0, 0.0) };
            acc += (s.get(i, j) - target).norm_sqr();
        }
    }
    acc.sqrt()
}

pub fn classify_involution(t: &AntiunitaryOp, cfg: &ToleranceConfig) -> InvolutionClass {
    let s = square(t);
    let mean = s.trace() / s.dim() as f64;
    let theta = mean.arg();
    let (phase, sign) = if theta.abs() <= PHASE_SNAP {
        (0.0, 1.0)
    } else if PI - theta.abs() <= PHASE_SNAP {
        (PI, -1.0)
    } else {
        return InvolutionClass::NotInvolution;
    };
    if scalar_deviation(&s, Complex64::new(sign, 0.0)) <= cfg.residual_tol {
        InvolutionClass::Involution { phase }
    } else {
        InvolutionClass::NotInvolution
    }
}

/// The conjugation operator `K_H` of an eigenbasis `V`: `m = V V^T`.
///
/// `K_H` fixes every column of `V`, squares to `+I` and commutes with the
/// Hamiltonian that produced `spec`. For degenerate spectra the result
/// depends on the eigenbasis the solver returned.
pub fn conjugation_in_basis(spec: &SpectrumReport) -> Result<AntiunitaryOp> {
    let v = &spec.basis_matrix;
    let deviation = unitary_deviation(v);
    if deviation > BASIS_UNITARITY_TOL {
        return Err(Error::InvalidSpectrum { deviation });
    }
    Ok(AntiunitaryOp::from_unitary_unchecked(v * &v.transpose()))
}

/// Splits `t = U k_ref` and returns the unitary `U = t k_ref`.
pub fn decompose(t: &AntiunitaryOp, k_ref: &AntiunitaryOp, cfg: &ToleranceConfig) -> Result<ComplexMatrix> {
    check_dims(t.dim(), k_ref.dim())?;
    let deviation = scalar_deviation(&square(k_ref), Complex64::new(1.0, 0.0));
    if deviation > cfg.residual_tol {
        return Err(Error::InvalidReference { deviation });
    }
    compose(t, k_ref)
}

/// `||m conj(h) - h m||`, the residual of `T H = H T`.
///
/// `h` is taken to be Hermitian, so `conj(h)` is read off as `h^T`.
pub fn commutation_residual(t: &AntiunitaryOp, h: &ComplexMatrix) -> Result<f64> {
    check_dims(t.dim(), h.dim())?;
    Ok((&t.m * &h.transpose()).distance(&(h * &t.m)))
}

pub fn commutes_with(t: &AntiunitaryOp, h: &ComplexMatrix, cfg: &ToleranceConfig) -> Result<bool> {
    Ok(commutation_residual(t, h)? <= cfg.residual_tol * h.norm().max(1.0))
}
