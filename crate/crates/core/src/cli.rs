//! Batch front-end behind the `hodge` binary.
//!
//! Every subcommand reads JSON, writes CSV or JSON to `--out` (stdout when
//! absent) and returns an exit status: 0 on success, 2 when a certificate or
//! verification fails, 1 for anything else. Failures print
//! `{"error": "<Name>", "message": "..."}` on stdout.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::complex::{betti_by_rank, KERNEL_TOL, complex_to_json, read_complex, ComplexFile, SimplicialComplex, WeightSystem};
use crate::diabolo::{certify, diabolo_grid, grid_csv, DomainRect, FamilyParams, GluedFamily, SearchOptions};
use crate::error::{Error, Result};
use crate::fixtures;
use crate::gluing::{convergence_scan, dumbbell, AttachmentSpec, DumbbellReport};
use crate::prescribe::{high_multiplicity_example, kunneth_spectrum, prescribe_spectrum, TargetSpectrum};
use crate::spectral::{coexact_spectrum, full_spectrum, hodge_consistency, spectrum_csv, ConsistencyReport};

/// Environment variable capping the worker threads of parallel scans.
pub const THREADS_VAR: &str = "HODGE_THREADS";

#[derive(Parser, Debug)]
#[command(name = "hodge", version, about = "Coexact Hodge spectra, diabolo certificates and spectrum prescription")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct Output {
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Laplacian eigenvalues of a weighted complex as CSV `p,i,mu`.
    Spectrum {
        #[arg(long = "in")]
        input: PathBuf,
        /// Degree; every degree when absent.
        #[arg(long)]
        p: Option<usize>,
        /// Coexact eigenvalues only, instead of the full spectrum.
        #[arg(long)]
        coexact: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Checks that each full spectrum splits into coexact parts and zeros.
    Consistency {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Union-spectrum convergence of a glued complex as the coupling shrinks.
    GlueScan {
        #[arg(long = "in")]
        input: PathBuf,
        /// Couplings, strictly decreasing; overrides the file.
        #[arg(long, value_delimiter = ',')]
        eps: Option<Vec<f64>>,
        #[command(flatten)]
        out: Output,
    },
    /// Dumbbell gadget contract over a list of neck parameters.
    DumbbellScan {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        p: usize,
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.01,0.001,0.0001")]
        u: Vec<f64>,
        #[command(flatten)]
        out: Output,
    },
    /// Window eigenvalues and effective form on a (lambda2, theta) grid.
    DiaboloGrid {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 21)]
        na: usize,
        #[arg(long, default_value_t = 21)]
        nb: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Winding certificate, degenerate point and holonomy of a family.
    DiaboloFind {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Builds a complex with a prescribed low coexact spectrum and volume.
    Prescribe {
        #[arg(long = "in")]
        input: PathBuf,
        /// Base complex; the unit octahedron when absent.
        #[arg(long)]
        base: Option<PathBuf>,
        /// Verification report; stdout when absent.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Output complex.
        #[arg(long)]
        out: PathBuf,
    },
    /// Product spectra: either two factor files, or the multiplicity example.
    Kunneth {
        #[arg(long, requires = "right")]
        left: Option<PathBuf>,
        #[arg(long, requires = "left")]
        right: Option<PathBuf>,
        /// Product degree.
        #[arg(long, default_value_t = 1)]
        p: usize,
        /// Requested multiplicity for the built-in example.
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[command(flatten)]
        out: Output,
    },
}

/// Input of `glue-scan`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GlueScanFile {
    pub base: ComplexFile,
    pub parts: Vec<PartFile>,
    pub p: usize,
    pub window: (f64, f64),
    #[serde(default)]
    pub eps: Vec<f64>,
    #[serde(default = "default_count")]
    pub count: usize,
}

fn default_count() -> usize {
    5
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PartFile {
    pub complex: ComplexFile,
    pub attachment: AttachmentSpec,
}

/// Input of `diabolo-grid` and `diabolo-find`: family parameters, an optional
/// base (the scaled octahedron when absent) and an optional domain override.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FamilyFile {
    #[serde(default)]
    pub base: Option<ComplexFile>,
    #[serde(flatten)]
    pub params: FamilyParams,
    #[serde(default)]
    pub domain: Option<DomainRect>,
}

impl FamilyFile {
    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    pub fn build(self) -> Result<(GluedFamily, DomainRect)> {
        let (k, w) = match self.base {
            Some(f) => f.into_parts()?,
            None => fixtures::diabolo_base(),
        };
        let domain = self.domain.unwrap_or_else(|| self.params.domain());
        Ok((GluedFamily::new(self.params, (&k, &w))?, domain))
    }
}

#[derive(Serialize)]
struct ConsistencyOutput {
    passed: bool,
    betti: Vec<usize>,
    degrees: Vec<ConsistencyReport>,
}

#[derive(Serialize)]
struct DumbbellScanOutput {
    n: usize,
    p: usize,
    reports: Vec<DumbbellReport>,
    /// `mu1(u[i+1]) / mu1(u[i])`.
    decay_ratios: Vec<f64>,
    holds: bool,
}

/// Sets the global pool size from `HODGE_THREADS`, if set.
pub fn configure_threads() -> Result<()> {
    let Ok(text) = std::env::var(THREADS_VAR) else { return Ok(()) };
    let n: usize = text
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::InvalidInput(format!("{THREADS_VAR} must be a positive integer, got {text:?}")))?;
    // a second call in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn degrees(k: &SimplicialComplex, p: Option<usize>) -> Result<Vec<usize>> {
    match p {
        Some(p) if p > k.top_dim() => Err(Error::DegreeOutOfRange { degree: p, max: k.top_dim() }),
        Some(p) => Ok(vec![p]),
        None => Ok((0..=k.top_dim()).collect()),
    }
}

/// Harmonic eigenvalues print as exact zeros.
fn snap_kernel(mut values: Vec<f64>) -> Vec<f64> {
    let radius = values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    for x in &mut values {
        if x.abs() <= KERNEL_TOL * radius {
            *x = 0.0;
        }
    }
    values
}

/// Runs one parsed command.
pub fn execute(cli: Cli) -> Result<()> {
    configure_threads()?;
    match cli.command {
        Command::Spectrum { input, p, coexact, out } => {
            let (k, w) = read_complex(&input)?;
            let mut rows = Vec::new();
            for q in degrees(&k, p)? {
                let values = if coexact { coexact_spectrum(&k, &w, q)?.values } else { snap_kernel(full_spectrum(&k, &w, q)?) };
                rows.push((q, values));
            }
            emit(&out.out, &spectrum_csv(&rows))
        }
        Command::Consistency { input, out } => {
            let (k, w) = read_complex(&input)?;
            let reports = (0..=k.top_dim()).map(|q| hodge_consistency(&k, &w, q)).collect::<Result<Vec<_>>>()?;
            let report = ConsistencyOutput { passed: reports.iter().all(|r| r.passed), betti: betti_by_rank(&k), degrees: reports };
            emit(&out.out, &json(&report))
        }
        Command::GlueScan { input, eps, out } => {
            let file: GlueScanFile = serde_json::from_str(&std::fs::read_to_string(&input)?)?;
            let (bk, bw) = file.base.into_parts()?;
            let parts = file
                .parts
                .into_iter()
                .map(|part| Ok((part.complex.into_parts()?, part.attachment)))
                .collect::<Result<Vec<_>>>()?;
            let borrowed: Vec<_> = parts.iter().map(|((k, w), spec)| ((k, w), spec)).collect();
            let eps = eps.unwrap_or(file.eps);
            let scan = convergence_scan((&bk, &bw), &borrowed, file.p, &eps, file.count, file.window)?;
            emit(&out.out, &scan.to_csv())
        }
        Command::DumbbellScan { n, p, u, out } => {
            let reports = u.iter().map(|&u| dumbbell(n, p, u)?.contract()).collect::<Result<Vec<_>>>()?;
            let decay_ratios: Vec<f64> = reports.windows(2).map(|r| r[1].mu1 / r[0].mu1).collect();
            let holds = reports.iter().all(DumbbellReport::holds);
            emit(&out.out, &json(&DumbbellScanOutput { n, p, reports, decay_ratios, holds }))
        }
        Command::DiaboloGrid { input, na, nb, out } => {
            let (family, domain) = FamilyFile::read(&input)?.build()?;
            emit(&out.out, &grid_csv(&diabolo_grid(&family, &domain, na, nb)?))
        }
        Command::DiaboloFind { input, tol, out } => {
            if !(tol > 0.0) {
                return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
            }
            let (family, domain) = FamilyFile::read(&input)?.build()?;
            let cert = certify(&family, &domain, &SearchOptions::new(&domain, tol))?;
            emit(&out.out, &json(&cert))
        }
        Command::Prescribe { input, base, report, out } => {
            let targets = TargetSpectrum::read(&input)?;
            let (k, w) = match base {
                Some(path) => read_complex(path)?,
                None => {
                    let k = fixtures::octahedron_boundary();
                    let w = WeightSystem::uniform(&k);
                    (k, w)
                }
            };
            let result = prescribe_spectrum((&k, &w), &targets)?;
            std::fs::write(&out, complex_to_json(&result.complex, &result.weights) + "\n")?;
            emit(&report, &json(&result.report))
        }
        Command::Kunneth { left, right, p, k, out } => match (left, right) {
            (Some(a), Some(b)) => {
                let (k1, w1) = read_complex(a)?;
                let (k2, w2) = read_complex(b)?;
                let full1 = (0..=k1.top_dim()).map(|q| full_spectrum(&k1, &w1, q)).collect::<Result<Vec<_>>>()?;
                let full2 = (0..=k2.top_dim()).map(|q| full_spectrum(&k2, &w2, q)).collect::<Result<Vec<_>>>()?;
                let spec = kunneth_spectrum(&full1, &betti_by_rank(&k1), &full2, &betti_by_rank(&k2), p)?;
                emit(&out.out, &json(&spec))
            }
            _ => {
                let (_, report) = high_multiplicity_example(p, k)?;
                emit(&out.out, &json(&report))
            }
        },
    }
}

/// Exit status of an error.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_certificate_failure() {
        2
    } else {
        1
    }
}

/// JSON body printed for an error.
pub fn error_body(e: &Error) -> String {
    serde_json::json!({ "error": e.name(), "message": e.to_string() }).to_string()
}

/// Parses arguments, runs, prints an error body on failure and returns the
/// exit status.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return 0;
        }
        Err(e) => {
            let err = Error::InvalidInput(e.to_string());
            println!("{}", error_body(&err));
            return 1;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            println!("{}", error_body(&e));
            exit_code(&e)
        }
    }
}
