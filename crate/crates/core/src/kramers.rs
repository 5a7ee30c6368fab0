//! Time-reversal-invariant ensembles and Kramers verification.
//!
//! Two independent routes to the same verdict are provided. The pointwise
//! route diagonalizes `H` and checks that every eigenvector `psi` has a
//! partner `T psi` with the same eigenvalue that is orthogonal to it. The
//! algebraic route never looks at eigenvectors: it compares the dimensions
//! of `{H}'` and `{H}''`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::antilinear::{
    apply, classify_involution, commutation_residual, compose, compose_linear, conjugation_in_basis, AntiunitaryOp,
    InvolutionClass,
};
use crate::commutant::{degeneracy_certificate, DegeneracyCertificate};
use crate::error::{Error, Premise, Result};
use crate::linop::{check_dims, ensure_hermitian, hermitian_eig, ComplexMatrix, SpectrumReport, ToleranceConfig};
use crate::sampling::{gue, stream_rng};
use crate::spin::pauli;

/// Tolerance of the `K_H U K_H^{-1} = U^dagger` identity.
pub const PHASE_IDENTITY_TOL: f64 = 1e-12;

/// Draws per trial before a sampler gives up on a zero Hamiltonian.
const MAX_SAMPLE_ATTEMPTS: usize = 8;

/// `I_k (x) sigma_2` on `C^{2k}`, squaring to `-I`.
pub fn canonical_fermionic(dim: usize) -> Result<AntiunitaryOp> {
    if dim == 0 || !dim.is_multiple_of(2) {
        return Err(Error::Spec(format!(
            "a time reversal with T^2 = -I needs even dimension, got {dim}"
        )));
    }
    let m = ComplexMatrix::identity(dim / 2).kron(&pauli()[1]);
    Ok(AntiunitaryOp::from_unitary_unchecked(m))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Symmetry {
    /// `T^2 = -I`
    Fermionic(AntiunitaryOp),
    /// `T^2 = +I`
    Bosonic(AntiunitaryOp),
    None,
}

impl Symmetry {
    pub fn class_name(&self) -> &'static str {
        match self {
            Symmetry::Fermionic(_) => "fermionic",
            Symmetry::Bosonic(_) => "bosonic",
            Symmetry::None => "none",
        }
    }

    pub fn operator(&self) -> Option<&AntiunitaryOp> {
        match self {
            Symmetry::Fermionic(t) | Symmetry::Bosonic(t) => Some(t),
            Symmetry::None => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSpec {
    dim: usize,
    symmetry: Symmetry,
    seed: u64,
    trials: usize,
}

impl EnsembleSpec {
    pub fn new(dim: usize, symmetry: Symmetry, seed: u64, trials: usize, cfg: &ToleranceConfig) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Spec("dimension must be positive".into()));
        }
        if trials == 0 {
            return Err(Error::Spec("at least one trial is required".into()));
        }
        if let Some(t) = symmetry.operator() {
            if t.dim() != dim {
                return Err(Error::Spec(format!(
                    "time reversal acts on dimension {}, ensemble has dimension {dim}",
                    t.dim()
                )));
            }
        }
        match &symmetry {
            Symmetry::Fermionic(t) => {
                if !dim.is_multiple_of(2) {
                    return Err(Error::Spec(format!("fermionic ensembles need even dimension, got {dim}")));
                }
                if classify_involution(t, cfg).sign() != Some(-1) {
                    return Err(Error::Spec("fermionic time reversal must square to -I".into()));
                }
            }
            Symmetry::Bosonic(t) => {
                if classify_involution(t, cfg).sign() != Some(1) {
                    return Err(Error::Spec("bosonic time reversal must square to +I".into()));
                }
            }
            Symmetry::None => {}
        }
        Ok(Self {
            dim,
            symmetry,
            seed,
            trials,
        })
    }

    /// Fermionic ensemble with [`canonical_fermionic`] time reversal.
    pub fn fermionic(dim: usize, seed: u64, trials: usize, cfg: &ToleranceConfig) -> Result<Self> {
        Self::new(dim, Symmetry::Fermionic(canonical_fermionic(dim)?), seed, trials, cfg)
    }

    /// Bosonic ensemble with `T = K`, i.e. real symmetric Hamiltonians.
    pub fn bosonic(dim: usize, seed: u64, trials: usize, cfg: &ToleranceConfig) -> Result<Self> {
        let t = AntiunitaryOp::conjugation(dim.max(1));
        Self::new(dim, Symmetry::Bosonic(t), seed, trials, cfg)
    }

    pub fn unconstrained(dim: usize, seed: u64, trials: usize, cfg: &ToleranceConfig) -> Result<Self> {
        Self::new(dim, Symmetry::None, seed, trials, cfg)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn symmetry(&self) -> &Symmetry {
        &self.symmetry
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn trials(&self) -> usize {
        self.trials
    }
}

/// Projects `h0` onto the `T`-invariant Hermitian matrices:
/// `(h0 + M conj(h0) M^dagger) / 2`.
pub fn symmetrize(h0: &ComplexMatrix, t: &AntiunitaryOp, cfg: &ToleranceConfig) -> Result<ComplexMatrix> {
    check_dims(t.dim(), h0.dim())?;
    ensure_hermitian(h0, cfg)?;
    let m = t.linear_part();
    let mirrored = &(m * &h0.conj()) * &m.adjoint();
    let sum = h0 + &mirrored;
    Ok((&sum + &sum.adjoint()).scale(Complex64::new(0.25, 0.0)))
}

/// Deterministic Hamiltonian number `trial_index` of `spec`.
pub fn sample_tri_hamiltonian(spec: &EnsembleSpec, trial_index: u64, cfg: &ToleranceConfig) -> Result<ComplexMatrix> {
    let mut rng = stream_rng(spec.seed, trial_index);
    for _ in 0..MAX_SAMPLE_ATTEMPTS {
        let h0 = gue(spec.dim, &mut rng);
        let h = match spec.symmetry.operator() {
            Some(t) => symmetrize(&h0, t, cfg)?,
            None => h0,
        };
        if h.norm() > cfg.residual_tol {
            return Ok(h);
        }
    }
    Err(Error::Spec(format!(
        "sampler produced the zero operator {MAX_SAMPLE_ATTEMPTS} times for trial {trial_index}"
    )))
}

/// Echo of the hypothesis checks performed before a verification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisEcho {
    pub involution: InvolutionClass,
    pub commutation_residual: f64,
    pub t_invariant: bool,
}

fn check_hypotheses(h: &ComplexMatrix, t: &AntiunitaryOp, cfg: &ToleranceConfig) -> Result<HypothesisEcho> {
    check_dims(h.dim(), t.dim())?;
    ensure_hermitian(h, cfg)?;
    let involution = classify_involution(t, cfg);
    if involution.sign() != Some(-1) {
        return Err(Error::Hypothesis(Premise::FermionCondition));
    }
    let commutation_residual = commutation_residual(t, h)?;
    if commutation_residual > cfg.residual_tol * h.norm().max(1.0) {
        return Err(Error::Hypothesis(Premise::TInvariance));
    }
    Ok(HypothesisEcho {
        involution,
        commutation_residual,
        t_invariant: true,
    })
}

/// `T psi` for one eigenvector `psi`, described relative to its cluster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorPairing {
    /// Column of `spectrum.basis_matrix` holding `psi`.
    pub column: usize,
    /// Coefficients of `T psi` in the cluster's eigenvectors.
    pub partner: Vec<Complex64>,
    /// Norm of the part of `T psi` outside the cluster.
    pub leakage: f64,
    /// `|<psi, T psi>|`
    pub overlap: f64,
    /// `||H T psi - lambda T psi||`
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KramersReport {
    pub spectrum: SpectrumReport,
    /// One entry per cluster, one pairing per eigenvector.
    pub pairings: Vec<Vec<VectorPairing>>,
    pub all_even: bool,
    pub max_overlap: f64,
    pub max_residual: f64,
    pub max_leakage: f64,
    /// Some eigenvalue gap sits near the clustering threshold.
    pub multiplicity_warning: bool,
    pub certificate: DegeneracyCertificate,
    pub hypotheses: HypothesisEcho,
}

pub fn kramers_verify_pointwise(h: &ComplexMatrix, t: &AntiunitaryOp, cfg: &ToleranceConfig) -> Result<KramersReport> {
    let hypotheses = check_hypotheses(h, t, cfg)?;
    let spectrum = hermitian_eig(h, cfg)?;

    let mut pairings = Vec::with_capacity(spectrum.clusters.len());
    let (mut max_overlap, mut max_residual, mut max_leakage) = (0.0f64, 0.0f64, 0.0f64);
    let mut column = 0;
    for cluster in &spectrum.clusters {
        let mut rows = Vec::with_capacity(cluster.multiplicity);
        for psi in &cluster.vectors {
            let t_psi = apply(t, psi)?;
            let overlap = psi.inner(&t_psi)?.norm();
            let h_t_psi = h.mul_vector(&t_psi)?;
            let residual = h_t_psi.distance(&t_psi.scale(Complex64::new(cluster.value, 0.0)));
            let mut partner = Vec::with_capacity(cluster.multiplicity);
            let mut inside = t_psi.scale(Complex64::new(0.0, 0.0));
            for v in &cluster.vectors {
                let c = v.inner(&t_psi)?;
                inside = inside.add(&v.scale(c))?;
                partner.push(c);
            }
            let leakage = t_psi.distance(&inside);
            max_overlap = max_overlap.max(overlap);
            max_residual = max_residual.max(residual);
            max_leakage = max_leakage.max(leakage);
            rows.push(VectorPairing {
                column,
                partner,
                leakage,
                overlap,
                residual,
            });
            column += 1;
        }
        pairings.push(rows);
    }

    let all_even = spectrum.clusters.iter().all(|c| c.multiplicity % 2 == 0);
    let certificate = degeneracy_certificate(h, cfg)?;
    Ok(KramersReport {
        multiplicity_warning: spectrum.near_threshold,
        spectrum,
        pairings,
        all_even,
        max_overlap,
        max_residual,
        max_leakage,
        certificate,
        hypotheses,
    })
}

/// Eigenvector-free degeneracy check for a nonzero `T`-invariant `H` with
/// `T^2 = -I`.
pub fn kramers_verify_algebraic(
    h: &ComplexMatrix,
    t: &AntiunitaryOp,
    cfg: &ToleranceConfig,
) -> Result<DegeneracyCertificate> {
    check_dims(h.dim(), t.dim())?;
    ensure_hermitian(h, cfg)?;
    if h.norm() <= cfg.residual_tol {
        return Err(Error::ZeroOperator);
    }
    check_hypotheses(h, t, cfg)?;
    degeneracy_certificate(h, cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BosonicSummary {
    pub dim: usize,
    pub seed: u64,
    pub trials: usize,
    pub nondegenerate: usize,
    pub nondegenerate_fraction: f64,
}

/// Runs the algebraic certificate over a `T^2 = +I` ensemble. Generic
/// spectra stay simple, so nearly every trial should be nondegenerate.
pub fn bosonic_control(spec: &EnsembleSpec, cfg: &ToleranceConfig) -> Result<BosonicSummary> {
    if !matches!(spec.symmetry, Symmetry::Bosonic(_)) {
        return Err(Error::Spec(format!(
            "bosonic control needs a bosonic ensemble, got {}",
            spec.symmetry.class_name()
        )));
    }
    let verdicts = (0..spec.trials as u64)
        .into_par_iter()
        .map(|k| {
            let h = sample_tri_hamiltonian(spec, k, cfg)?;
            Ok(!degeneracy_certificate(&h, cfg)?.degenerate)
        })
        .collect::<Result<Vec<bool>>>()?;
    let nondegenerate = verdicts.iter().filter(|&&ok| ok).count();
    Ok(BosonicSummary {
        dim: spec.dim,
        seed: spec.seed,
        trials: spec.trials,
        nondegenerate,
        nondegenerate_fraction: nondegenerate as f64 / spec.trials as f64,
    })
}

/// A real phase per eigenvalue cluster, i.e. a real function `g` on the
/// spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalPhase {
    phases: Vec<f64>,
}

impl DiagonalPhase {
    pub fn new(phases: Vec<f64>) -> Result<Self> {
        if let Some(index) = phases.iter().position(|p| !p.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { phases })
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }
}

/// `U = V diag(e^{i g}) V^dagger`, with `g` constant on each cluster.
pub fn cluster_phase_unitary(spectrum: &SpectrumReport, g: &DiagonalPhase) -> Result<ComplexMatrix> {
    check_dims(spectrum.clusters.len(), g.phases.len())?;
    let v = spectrum.basis_matrix.as_dmatrix();
    let mut scaled = v.clone();
    for (j, k) in spectrum.column_clusters().into_iter().enumerate() {
        let phase = Complex64::from_polar(1.0, g.phases[k]);
        for i in 0..scaled.nrows() {
            scaled[(i, j)] *= phase;
        }
    }
    Ok(ComplexMatrix::from_raw(scaled * v.adjoint()))
}

/// `T = U K_H` for the cluster-diagonal unitary `U = e^{i g(H)}`.
pub fn phase_twisted_conjugation(
    spectrum: &SpectrumReport,
    g: &DiagonalPhase,
    cfg: &ToleranceConfig,
) -> Result<AntiunitaryOp> {
    let u = cluster_phase_unitary(spectrum, g)?;
    compose_linear(&u, &conjugation_in_basis(spectrum)?, cfg)
}

/// Checks `K_H U K_H^{-1} = U^dagger` for `U = e^{i g(H)}`.
pub fn phase_conjugation_check(spectrum: &SpectrumReport, g: &DiagonalPhase, cfg: &ToleranceConfig) -> Result<bool> {
    let u = cluster_phase_unitary(spectrum, g)?;
    let kh = conjugation_in_basis(spectrum)?;
    // K_H^{-1} = K_H since K_H^2 = I.
    let conjugated = compose(&kh, &compose_linear(&u, &kh, cfg)?)?;
    Ok(conjugated.distance(&u.adjoint()) <= PHASE_IDENTITY_TOL)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointwiseSummary {
    pub all_even: bool,
    pub max_overlap: f64,
    pub max_residual: f64,
    pub multiplicity_warning: bool,
}

/// One line of an ensemble run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub trial: u64,
    pub dim: usize,
    pub hamiltonian_norm: f64,
    pub multiplicities: Vec<usize>,
    pub commutant_dim: usize,
    pub bicommutant_dim: usize,
    pub degenerate: bool,
    pub rank_gap_warning: bool,
    pub spectral_agreement: bool,
    /// Present for fermionic ensembles only.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub kramers: Option<PointwiseSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSummary {
    pub class: String,
    pub dim: usize,
    pub seed: u64,
    pub trials: usize,
    pub degenerate_count: usize,
    pub degenerate_fraction: f64,
    pub warning_count: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub all_even_count: Option<usize>,
}

fn run_trial(spec: &EnsembleSpec, k: u64, cfg: &ToleranceConfig) -> Result<TrialReport> {
    let h = sample_tri_hamiltonian(spec, k, cfg)?;
    let (spectrum_mults, certificate, kramers) = match &spec.symmetry {
        Symmetry::Fermionic(t) => {
            let report = kramers_verify_pointwise(&h, t, cfg)?;
            let summary = PointwiseSummary {
                all_even: report.all_even,
                max_overlap: report.max_overlap,
                max_residual: report.max_residual,
                multiplicity_warning: report.multiplicity_warning,
            };
            (report.spectrum.multiplicities(), report.certificate, Some(summary))
        }
        _ => (
            hermitian_eig(&h, cfg)?.multiplicities(),
            degeneracy_certificate(&h, cfg)?,
            None,
        ),
    };
    Ok(TrialReport {
        trial: k,
        dim: spec.dim,
        hamiltonian_norm: h.norm(),
        multiplicities: spectrum_mults,
        commutant_dim: certificate.commutant_dim,
        bicommutant_dim: certificate.bicommutant_dim,
        degenerate: certificate.degenerate,
        rank_gap_warning: certificate.rank_gap_warning,
        spectral_agreement: certificate.spectral_agreement,
        kramers,
    })
}

/// Samples and certifies every trial of `spec`. Trials run in parallel but
/// are returned in trial order.
pub fn run_ensemble(spec: &EnsembleSpec, cfg: &ToleranceConfig) -> Result<(Vec<TrialReport>, EnsembleSummary)> {
    let trials = (0..spec.trials as u64)
        .into_par_iter()
        .map(|k| run_trial(spec, k, cfg))
        .collect::<Result<Vec<_>>>()?;
    let degenerate_count = trials.iter().filter(|t| t.degenerate).count();
    let warning_count = trials
        .iter()
        .filter(|t| t.rank_gap_warning || t.kramers.as_ref().is_some_and(|k| k.multiplicity_warning))
        .count();
    let all_even_count = match spec.symmetry {
        Symmetry::Fermionic(_) => Some(trials.iter().filter(|t| t.kramers.as_ref().is_some_and(|k| k.all_even)).count()),
        _ => None,
    };
    let summary = EnsembleSummary {
        class: spec.symmetry.class_name().to_string(),
        dim: spec.dim,
        seed: spec.seed,
        trials: spec.trials,
        degenerate_count,
        degenerate_fraction: degenerate_count as f64 / spec.trials as f64,
        warning_count,
        all_even_count,
    };
    Ok((trials, summary))
}
