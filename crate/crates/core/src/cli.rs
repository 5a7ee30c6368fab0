//! The `kramers-lab` command line.
//!
//! Every report is a single JSON document (NDJSON for `ensemble`) carrying a
//! `manifest` with the command, SHA-256 digests of the inputs, the seed, the
//! tolerances and the tool version. Equal manifests give byte-identical
//! output on one platform.
//!
//! Exit codes: 0 success, 1 hypothesis or validation failure, 2 usage,
//! I/O or format error. Failures print one JSON object on stderr.

use std::fs;
use std::io::{Read, Write};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::antilinear::{commutes_with, conjugation_in_basis, decompose, AntiunitaryJson, AntiunitaryOp};
use crate::commutant::{commutant_basis, degeneracy_certificate, AlgebraBasis, DegeneracyCertificate};
use crate::error::Error;
use crate::kramers::{
    canonical_fermionic, kramers_verify_pointwise, run_ensemble, EnsembleSpec, EnsembleSummary, KramersReport,
    Symmetry, TrialReport,
};
use crate::linop::{hermitian_eig, ComplexMatrix, ToleranceConfig};
use crate::spin::{solve_time_reversal_capped, spin_rep, IntertwinerSolution, DEFAULT_SOLVE_CAP};

/// Environment variable supplying a fallback for every tolerance flag.
pub const TOL_ENV: &str = "KRAMERS_LAB_TOL";

#[derive(Debug, Parser)]
#[command(name = "kramers-lab", version, about = "Commutant algebras and Kramers degeneracy certificates")]
struct Cli {
    /// Relative eigenvalue merge threshold.
    #[arg(long, global = true)]
    tol_cluster: Option<f64>,
    /// Relative singular-value rank cut.
    #[arg(long, global = true)]
    tol_rank: Option<f64>,
    /// Residual allowance for Hermiticity, unitarity and commutation checks.
    #[arg(long, global = true)]
    tol_residual: Option<f64>,
    /// Output path, `-` for stdout.
    #[arg(long, global = true, default_value = "-")]
    out: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ClassArg {
    Fermionic,
    Bosonic,
    None,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Basis of the joint commutant (or bicommutant) of one or more matrices.
    Commutant {
        #[arg(long = "matrix", required = true)]
        matrices: Vec<String>,
        #[arg(long)]
        bicommutant: bool,
        /// Include the basis matrices in the report.
        #[arg(long)]
        elements: bool,
    },
    /// Degeneracy certificate of a Hermitian matrix.
    Certificate {
        #[arg(long)]
        matrix: String,
    },
    /// Pointwise Kramers verification; `--t` defaults to I (x) sigma_2.
    Kramers {
        #[arg(long)]
        matrix: String,
        #[arg(long)]
        t: Option<String>,
    },
    /// Seeded ensemble run, one NDJSON line per trial plus a summary.
    Ensemble {
        #[arg(long)]
        dim: usize,
        #[arg(long, value_enum)]
        class: ClassArg,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        /// Custom time reversal for fermionic or bosonic classes.
        #[arg(long)]
        t: Option<String>,
    },
    /// Solve for the time reversal of an N-particle spin system.
    #[command(name = "spin-tr")]
    SpinTr {
        #[arg(long)]
        particles: usize,
        #[arg(long, default_value_t = DEFAULT_SOLVE_CAP)]
        max_particles: usize,
    },
    /// Split T = U K_H against the eigenbasis conjugation of H.
    Decompose {
        #[arg(long)]
        t: String,
        #[arg(long)]
        matrix: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub role: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: Vec<InputDigest>,
    pub seed: Option<u64>,
    pub tolerances: ToleranceConfig,
    pub tool_version: String,
}

/// Report body plus its manifest, flattened into one object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope<T> {
    #[serde(flatten)]
    pub report: T,
    pub manifest: RunManifest,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebraReport {
    pub algebra: String,
    pub dim_space: usize,
    pub dimension: usize,
    pub generator_count: usize,
    pub rank_gap_warning: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub elements: Option<Vec<ComplexMatrix>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinReport {
    pub n_particles: usize,
    #[serde(flatten)]
    pub solution: IntertwinerSolution,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecomposeReport {
    pub u: ComplexMatrix,
    pub k_h: AntiunitaryOp,
    pub multiplicities: Vec<usize>,
    pub t_commutes_with_h: bool,
    pub u_commutes_with_h: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnsembleLine {
    Trial(TrialReport),
    Summary(Envelope<EnsembleSummary>),
}

pub type CertificateOutput = Envelope<DegeneracyCertificate>;
pub type KramersOutput = Envelope<KramersReport>;

#[derive(Debug)]
enum Failure {
    Usage(String),
    Io(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) | Failure::Io(_) => 2,
            Failure::Core(e) => match e {
                Error::Dimension { .. }
                | Error::Shape { .. }
                | Error::NonFinite { .. }
                | Error::Format(_)
                | Error::EmptyGenerators => 2,
                _ => 1,
            },
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Failure::Usage(_) => "usage",
            Failure::Io(_) => "io",
            Failure::Core(e) => e.kind(),
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) | Failure::Io(m) => m.clone(),
            Failure::Core(e) => e.to_string(),
        }
    }
}

struct Inputs<'a> {
    stdin: &'a mut dyn Read,
    digests: Vec<InputDigest>,
}

impl Inputs<'_> {
    fn read(&mut self, role: &str, path: &str) -> Result<String, Failure> {
        let text = if path == "-" {
            let mut buf = String::new();
            self.stdin
                .read_to_string(&mut buf)
                .map_err(|e| Failure::Io(format!("stdin: {e}")))?;
            buf
        } else {
            fs::read_to_string(path).map_err(|e| Failure::Io(format!("{path}: {e}")))?
        };
        self.digests.push(InputDigest {
            role: role.to_string(),
            sha256: hex::encode(Sha256::digest(text.as_bytes())),
        });
        Ok(text)
    }

    fn matrix(&mut self, role: &str, path: &str) -> Result<ComplexMatrix, Failure> {
        let text = self.read(role, path)?;
        serde_json::from_str(&text).map_err(|e| Failure::Core(Error::Format(format!("{path}: {e}"))))
    }

    fn antiunitary(&mut self, role: &str, path: &str, cfg: &ToleranceConfig) -> Result<AntiunitaryOp, Failure> {
        let text = self.read(role, path)?;
        let raw: AntiunitaryJson =
            serde_json::from_str(&text).map_err(|e| Failure::Core(Error::Format(format!("{path}: {e}"))))?;
        Ok(raw.into_op(cfg)?)
    }
}

fn tolerances(cli: &Cli, env_tol: Option<&str>) -> Result<ToleranceConfig, Failure> {
    let defaults = ToleranceConfig::default();
    let fallback = match env_tol {
        Some(raw) => Some(
            raw.trim()
                .parse::<f64>()
                .map_err(|_| Failure::Usage(format!("{TOL_ENV} is not a number: {raw:?}")))?,
        ),
        None => None,
    };
    let cfg = ToleranceConfig {
        cluster_tol: cli.tol_cluster.or(fallback).unwrap_or(defaults.cluster_tol),
        rank_rel_tol: cli.tol_rank.or(fallback).unwrap_or(defaults.rank_rel_tol),
        residual_tol: cli.tol_residual.or(fallback).unwrap_or(defaults.residual_tol),
    };
    cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(cfg)
}

fn to_line<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("reports serialize");
    s.push('\n');
    s
}

fn execute(cli: &Cli, cfg: ToleranceConfig, stdin: &mut dyn Read) -> Result<String, Failure> {
    let mut inputs = Inputs {
        stdin,
        digests: Vec::new(),
    };
    let manifest = |command: &str, digests: Vec<InputDigest>, seed: Option<u64>| RunManifest {
        command: command.to_string(),
        inputs: digests,
        seed,
        tolerances: cfg,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
    };

    match &cli.command {
        Command::Commutant {
            matrices,
            bicommutant,
            elements,
        } => {
            let gens = matrices
                .iter()
                .enumerate()
                .map(|(i, p)| inputs.matrix(&format!("matrix[{i}]"), p))
                .collect::<Result<Vec<_>, _>>()?;
            let mut basis: AlgebraBasis = commutant_basis(&gens, &cfg)?;
            if *bicommutant {
                let second = commutant_basis(&basis.elements, &cfg)?;
                basis = AlgebraBasis {
                    rank_gap_warning: basis.rank_gap_warning || second.rank_gap_warning,
                    ..second
                };
            }
            let report = AlgebraReport {
                algebra: if *bicommutant { "bicommutant" } else { "commutant" }.to_string(),
                dim_space: basis.dim_space,
                dimension: basis.dimension(),
                generator_count: gens.len(),
                rank_gap_warning: basis.rank_gap_warning,
                elements: elements.then(|| basis.elements.clone()),
            };
            Ok(to_line(&Envelope {
                report,
                manifest: manifest("commutant", inputs.digests, None),
            }))
        }
        Command::Certificate { matrix } => {
            let h = inputs.matrix("matrix", matrix)?;
            let report = degeneracy_certificate(&h, &cfg)?;
            Ok(to_line(&Envelope {
                report,
                manifest: manifest("certificate", inputs.digests, None),
            }))
        }
        Command::Kramers { matrix, t } => {
            let h = inputs.matrix("matrix", matrix)?;
            let t = match t {
                Some(path) => inputs.antiunitary("t", path, &cfg)?,
                None => canonical_fermionic(h.dim())?,
            };
            let report = kramers_verify_pointwise(&h, &t, &cfg)?;
            Ok(to_line(&Envelope {
                report,
                manifest: manifest("kramers", inputs.digests, None),
            }))
        }
        Command::Ensemble {
            dim,
            class,
            trials,
            seed,
            t,
        } => {
            let custom = match t {
                Some(path) => Some(inputs.antiunitary("t", path, &cfg)?),
                None => None,
            };
            let symmetry = match (class, custom) {
                (ClassArg::Fermionic, Some(t)) => Symmetry::Fermionic(t),
                (ClassArg::Fermionic, None) => Symmetry::Fermionic(canonical_fermionic(*dim)?),
                (ClassArg::Bosonic, Some(t)) => Symmetry::Bosonic(t),
                (ClassArg::Bosonic, None) => Symmetry::Bosonic(AntiunitaryOp::conjugation((*dim).max(1))),
                (ClassArg::None, Some(_)) => {
                    return Err(Failure::Usage("--t is meaningless with --class none".into()))
                }
                (ClassArg::None, None) => Symmetry::None,
            };
            let spec = EnsembleSpec::new(*dim, symmetry, *seed, *trials, &cfg)?;
            let (reports, summary) = run_ensemble(&spec, &cfg)?;
            let mut out = String::new();
            for r in reports {
                out.push_str(&to_line(&EnsembleLine::Trial(r)));
            }
            out.push_str(&to_line(&EnsembleLine::Summary(Envelope {
                report: summary,
                manifest: manifest("ensemble", inputs.digests, Some(*seed)),
            })));
            Ok(out)
        }
        Command::SpinTr {
            particles,
            max_particles,
        } => {
            let rep = spin_rep(*particles)?;
            let solution = solve_time_reversal_capped(&rep, &cfg, *max_particles)?;
            Ok(to_line(&Envelope {
                report: SpinReport {
                    n_particles: *particles,
                    solution,
                },
                manifest: manifest("spin-tr", inputs.digests, None),
            }))
        }
        Command::Decompose { t, matrix } => {
            let t = inputs.antiunitary("t", t, &cfg)?;
            let h = inputs.matrix("matrix", matrix)?;
            let spectrum = hermitian_eig(&h, &cfg)?;
            let k_h = conjugation_in_basis(&spectrum)?;
            let u = decompose(&t, &k_h, &cfg)?;
            let u_commutes = (&u * &h).distance(&(&h * &u)) <= cfg.residual_tol * h.norm().max(1.0);
            let report = DecomposeReport {
                t_commutes_with_h: commutes_with(&t, &h, &cfg)?,
                u_commutes_with_h: u_commutes,
                multiplicities: spectrum.multiplicities(),
                u,
                k_h,
            };
            Ok(to_line(&Envelope {
                report,
                manifest: manifest("decompose", inputs.digests, None),
            }))
        }
    }
}

fn emit(out_path: &str, text: &str, stdout: &mut dyn Write) -> Result<(), Failure> {
    if out_path == "-" {
        stdout
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Io(format!("stdout: {e}")))
    } else {
        fs::write(out_path, text).map_err(|e| Failure::Io(format!("{out_path}: {e}")))
    }
}

/// Runs one command and returns its exit code. `args` includes the program
/// name; `env_tol` is the value of [`TOL_ENV`], if set.
pub fn run<I, S>(
    args: I,
    env_tol: Option<&str>,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return 0;
            }
            let first = e.to_string().lines().next().unwrap_or("invalid arguments").to_string();
            return report_failure(&Failure::Usage(first), stderr);
        }
    };
    let result = tolerances(&cli, env_tol)
        .and_then(|cfg| execute(&cli, cfg, stdin))
        .and_then(|text| emit(&cli.out, &text, stdout));
    match result {
        Ok(()) => 0,
        Err(f) => report_failure(&f, stderr),
    }
}

fn report_failure(f: &Failure, stderr: &mut dyn Write) -> i32 {
    let code = f.exit_code();
    let line = serde_json::json!({
        "error": f.kind(),
        "message": f.message(),
        "exit_code": code,
    });
    let _ = writeln!(stderr, "{line}");
    code
}
