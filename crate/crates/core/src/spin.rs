//! Pauli generators, slot-local spin representations, and the antilinear
//! intertwiner solver.
//!
//! A time reversal for `N` spin-1/2 particles must reverse every particle's
//! spin, so it anticommutes (as an antiunitary) with each slot-local
//! generator `sigma_k^(i)`. The linear parts `M` of all such antiunitaries
//! form the joint nullspace of `M -> sigma M + M conj(sigma)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::antilinear::{classify_involution, compose, scalar_deviation, AntiunitaryOp};
use crate::commutant::{anti_intertwiner_superop, commutant_basis, joint_nullspace};
use crate::error::{Error, Result};
use crate::linop::{check_dims, unvec_columns, ComplexMatrix, ToleranceConfig};

/// Largest particle count accepted by [`spin_rep`].
pub const MAX_PARTICLES: usize = 10;

/// Default cap for [`solve_time_reversal`]; the solve is `O(4^{3N})`.
pub const DEFAULT_SOLVE_CAP: usize = 4;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `[sigma_1, sigma_2, sigma_3]`.
pub fn pauli() -> [ComplexMatrix; 3] {
    let o = c(0.0, 0.0);
    let build = |rows: [[Complex64; 2]; 2]| {
        ComplexMatrix::from_rows(&[rows[0].to_vec(), rows[1].to_vec()]).expect("finite 2x2")
    };
    [
        build([[o, c(1.0, 0.0)], [c(1.0, 0.0), o]]),
        build([[o, c(0.0, -1.0)], [c(0.0, 1.0), o]]),
        build([[c(1.0, 0.0), o], [o, c(-1.0, 0.0)]]),
    ]
}

/// Spin generators of an `N`-particle system.
///
/// `generators[3 * i + k]` acts as `sigma_{k+1}` on slot `i` (slot 0 is the
/// leftmost tensor factor) and as the identity elsewhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpinRepJson", into = "SpinRepJson")]
pub struct SpinRep {
    n_particles: usize,
    generators: Vec<ComplexMatrix>,
}

#[derive(Serialize, Deserialize)]
struct SpinRepJson {
    n_particles: usize,
    generators: Vec<ComplexMatrix>,
}

impl TryFrom<SpinRepJson> for SpinRep {
    type Error = Error;
    fn try_from(json: SpinRepJson) -> Result<Self> {
        SpinRep::from_generators(json.n_particles, json.generators)
    }
}

impl From<SpinRep> for SpinRepJson {
    fn from(rep: SpinRep) -> Self {
        Self {
            n_particles: rep.n_particles,
            generators: rep.generators,
        }
    }
}

impl SpinRep {
    /// Wraps a custom generator list; it must hold `3 * n_particles`
    /// matrices of size `2^n_particles` in slot-major, axis-minor order.
    pub fn from_generators(n_particles: usize, generators: Vec<ComplexMatrix>) -> Result<Self> {
        if n_particles == 0 || n_particles > MAX_PARTICLES {
            return Err(Error::Spec(format!(
                "particle count must lie in 1..={MAX_PARTICLES}, got {n_particles}"
            )));
        }
        if generators.len() != 3 * n_particles {
            return Err(Error::Spec(format!(
                "expected {} generators, got {}",
                3 * n_particles,
                generators.len()
            )));
        }
        let dim = 1usize << n_particles;
        for g in &generators {
            check_dims(dim, g.dim())?;
        }
        Ok(Self {
            n_particles,
            generators,
        })
    }

    pub fn n_particles(&self) -> usize {
        self.n_particles
    }

    pub fn dim(&self) -> usize {
        1 << self.n_particles
    }

    pub fn generators(&self) -> &[ComplexMatrix] {
        &self.generators
    }

    /// The three generators of one slot.
    pub fn slot(&self, i: usize) -> &[ComplexMatrix] {
        &self.generators[3 * i..3 * i + 3]
    }

    /// Generators `W g W^dagger` of a unitarily equivalent representation.
    pub fn conjugated_by(&self, w: &ComplexMatrix) -> Result<Self> {
        check_dims(self.dim(), w.dim())?;
        let wd = w.adjoint();
        Ok(Self {
            n_particles: self.n_particles,
            generators: self.generators.iter().map(|g| &(w * g) * &wd).collect(),
        })
    }
}

/// `I^{(x) slot} (x) op (x) I^{(x) rest}`.
fn embed(op: &ComplexMatrix, slot: usize, n_particles: usize) -> ComplexMatrix {
    let left = ComplexMatrix::identity(1 << slot);
    let right = ComplexMatrix::identity(1 << (n_particles - slot - 1));
    left.kron(op).kron(&right)
}

pub fn spin_rep(n_particles: usize) -> Result<SpinRep> {
    if n_particles == 0 || n_particles > MAX_PARTICLES {
        return Err(Error::Spec(format!(
            "particle count must lie in 1..={MAX_PARTICLES}, got {n_particles}"
        )));
    }
    let sigmas = pauli();
    let generators = (0..n_particles)
        .flat_map(|i| sigmas.iter().map(move |s| embed(s, i, n_particles)))
        .collect();
    Ok(SpinRep {
        n_particles,
        generators,
    })
}

/// Sign of `T^2` across an intertwiner solution space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InvolutionSquare {
    #[serde(rename = "+1")]
    Plus,
    #[serde(rename = "-1")]
    Minus,
    #[serde(rename = "mixed")]
    Mixed,
    #[serde(rename = "empty")]
    Empty,
}

impl InvolutionSquare {
    pub fn sign(&self) -> Option<i8> {
        match self {
            InvolutionSquare::Plus => Some(1),
            InvolutionSquare::Minus => Some(-1),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntertwinerSolution {
    /// Linear parts `M` of the antiunitary solutions `T = M K`. A single
    /// solution is scaled to be unitary with its first nonzero entry
    /// (row-major) real and positive; larger spaces are returned
    /// Hilbert–Schmidt-orthonormal.
    pub basis: Vec<ComplexMatrix>,
    pub solution_dim: usize,
    pub involution_square: InvolutionSquare,
}

impl IntertwinerSolution {
    /// The normalized time reversal when the solution is unique.
    pub fn time_reversal(&self, cfg: &ToleranceConfig) -> Option<AntiunitaryOp> {
        match self.basis.as_slice() {
            [m] => AntiunitaryOp::new(m.clone(), cfg).ok(),
            _ => None,
        }
    }
}

/// Scales `m` to Frobenius norm `sqrt(n)` and rotates its first entry with
/// modulus above `1e-8` onto the positive real axis.
fn normalize_unitary(m: &ComplexMatrix) -> ComplexMatrix {
    let n = m.dim();
    let scaled = m.scale(c((n as f64).sqrt() / m.norm(), 0.0));
    let pivot = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| scaled.get(i, j))
        .find(|z| z.norm() > 1e-8)
        .expect("nonzero matrix");
    scaled.scale(pivot.conj() / pivot.norm())
}

/// Antiunitaries anticommuting with every generator, with the default
/// particle cap.
pub fn solve_time_reversal(rep: &SpinRep, cfg: &ToleranceConfig) -> Result<IntertwinerSolution> {
    solve_time_reversal_capped(rep, cfg, DEFAULT_SOLVE_CAP)
}

pub fn solve_time_reversal_capped(
    rep: &SpinRep,
    cfg: &ToleranceConfig,
    max_particles: usize,
) -> Result<IntertwinerSolution> {
    if rep.generators.is_empty() {
        return Err(Error::Spec("representation has no generators".into()));
    }
    if rep.n_particles > max_particles {
        return Err(Error::Spec(format!(
            "intertwiner solve capped at {max_particles} particles, got {}",
            rep.n_particles
        )));
    }
    let n = rep.dim();
    let scale = rep.generators.iter().map(ComplexMatrix::norm).fold(0.0, f64::max);
    let null = joint_nullspace(
        rep.generators.iter().map(anti_intertwiner_superop),
        n * n,
        scale,
        cfg.rank_rel_tol,
    )?;
    let raw: Vec<ComplexMatrix> = null
        .vectors
        .iter()
        .map(|v| ComplexMatrix::from_raw(unvec_columns(v, n)))
        .collect();

    let (basis, involution_square) = match raw.len() {
        0 => (raw, InvolutionSquare::Empty),
        1 => {
            let m = normalize_unitary(&raw[0]);
            let t = AntiunitaryOp::from_unitary_unchecked(m.clone());
            let square = match classify_involution(&t, cfg).sign() {
                Some(1) => InvolutionSquare::Plus,
                Some(_) => InvolutionSquare::Minus,
                None => InvolutionSquare::Mixed,
            };
            (vec![m], square)
        }
        _ => {
            let signs: Vec<Option<i8>> = raw
                .iter()
                .map(|m| classify_involution(&AntiunitaryOp::from_unitary_unchecked(normalize_unitary(m)), cfg).sign())
                .collect();
            let square = match signs[0] {
                Some(1) if signs.iter().all(|s| *s == Some(1)) => InvolutionSquare::Plus,
                Some(-1) if signs.iter().all(|s| *s == Some(-1)) => InvolutionSquare::Minus,
                _ => InvolutionSquare::Mixed,
            };
            (raw, square)
        }
    };
    Ok(IntertwinerSolution {
        solution_dim: basis.len(),
        basis,
        involution_square,
    })
}

/// A set of matrices is irreducible iff its joint commutant is the scalars.
pub fn irreducibility_check(matrices: &[ComplexMatrix], cfg: &ToleranceConfig) -> Result<bool> {
    Ok(commutant_basis(matrices, cfg)?.dimension() == 1)
}

/// `||M conj(s) + s M||`
fn anticommutation_residual(t: &AntiunitaryOp, s: &ComplexMatrix) -> f64 {
    let m = t.linear_part();
    (&(m * &s.conj()) + &(s * m)).norm()
}

fn anticommutes(t: &AntiunitaryOp, s: &ComplexMatrix, cfg: &ToleranceConfig) -> bool {
    anticommutation_residual(t, s) <= cfg.residual_tol * (s.norm() * t.linear_part().norm()).max(1.0)
}

/// Recovers `k` from `t_tilde t = -k I`.
///
/// Both operators must reverse every generator of `rep`; their product is
/// then a linear map commuting with an irreducible set, hence scalar. The
/// returned `k` is renormalized to unit modulus. Note that for
/// `t_tilde^2 = -I` the pair satisfies `t = conj(k) t_tilde`.
pub fn schur_scalar_extract(
    t_tilde: &AntiunitaryOp,
    t: &AntiunitaryOp,
    rep: &SpinRep,
    cfg: &ToleranceConfig,
) -> Result<Complex64> {
    check_dims(rep.dim(), t_tilde.dim())?;
    check_dims(rep.dim(), t.dim())?;
    for (name, op) in [("t_tilde", t_tilde), ("t", t)] {
        if let Some(idx) = rep.generators.iter().position(|s| !anticommutes(op, s, cfg)) {
            return Err(Error::Precondition(format!(
                "{name} does not reverse generator {idx}"
            )));
        }
    }
    let product = compose(t_tilde, t)?;
    let k = -(product.trace() / product.dim() as f64);
    let deviation = scalar_deviation(&product, -k);
    if deviation > cfg.residual_tol * product.norm().max(1.0) {
        return Err(Error::NotScalar { deviation });
    }
    if k.norm() == 0.0 {
        return Err(Error::NotScalar { deviation: product.norm() });
    }
    Ok(k / k.norm())
}

/// `exp(i theta . sigma)` on one slot, in closed form
/// `cos|theta| I + i sin|theta| (theta_hat . sigma)`.
pub fn slot_rotation(angles: [f64; 3], slot: usize, n_particles: usize) -> ComplexMatrix {
    let phi = angles.iter().map(|a| a * a).sum::<f64>().sqrt();
    let sigmas = pauli();
    let mut r = ComplexMatrix::identity(2).scale(c(phi.cos(), 0.0));
    if phi > 0.0 {
        let sinc = phi.sin() / phi;
        for (a, s) in angles.iter().zip(&sigmas) {
            r = &r + &s.scale(c(0.0, sinc * a));
        }
    }
    embed(&r, slot, n_particles)
}

/// Checks `M conj(R) = R M` for the rotation `R = exp(i theta . sigma)` on
/// every slot whose generators `t` reverses. At least one slot must qualify.
pub fn rotation_commutation_check(
    rep: &SpinRep,
    t: &AntiunitaryOp,
    angles: [f64; 3],
    cfg: &ToleranceConfig,
) -> Result<bool> {
    check_dims(rep.dim(), t.dim())?;
    let slots: Vec<usize> = (0..rep.n_particles)
        .filter(|&i| rep.slot(i).iter().all(|s| anticommutes(t, s, cfg)))
        .collect();
    if slots.is_empty() {
        return Err(Error::Precondition(
            "time reversal does not anticommute with all generators of any slot".into(),
        ));
    }
    let m = t.linear_part();
    Ok(slots.into_iter().all(|slot| {
        let r = slot_rotation(angles, slot, rep.n_particles);
        (m * &r.conj()).distance(&(&r * m)) <= cfg.residual_tol * (r.norm() * m.norm()).max(1.0)
    }))
}
