//! `coninv`: batch front end for coninvolution factorizations.
//!
//! Exit codes: 0 success or predicate true, 1 predicate false or no
//! decomposition of the requested length, 2 malformed input, 3 numerical
//! failure.

mod io;
mod selftest;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};
use coninv::certify::verify_certificate;
use coninv::factorization::{con_sqrt, four_factor, three_factor_with_witness, two_factor, Certificate};
use coninv::linalg::{affine_compose, is_coninvolution};
use coninv::reversibility::is_c_reversible_affine;
use coninv::{Error, Tolerance};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::io::{read_instance, to_json, CertificateDoc, Instance};

#[derive(Debug)]
pub enum Failure {
    /// The queried property is false, or the decomposition does not exist.
    No(String),
    Malformed(String),
    Numerical(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::No(_) => 1,
            Failure::Malformed(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::No(m) | Failure::Malformed(m) | Failure::Numerical(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::CReversibilityRequired
            | Error::DeterminantModulusNotOne { .. }
            | Error::NotConinvolution { .. }
            | Error::WitnessRejected(_) => Failure::No(msg),
            Error::DimensionMismatch(_) | Error::NonFinite | Error::InvalidTolerance(_) | Error::Singular { .. } => {
                Failure::Malformed(msg)
            }
            _ => Failure::Numerical(msg),
        }
    }
}

#[derive(Parser)]
#[command(name = "coninv", version, about = "Factor complex affine maps into coninvolutions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Seed for every random choice.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Relative residual gate.
    #[arg(long)]
    tol: Option<f64>,
}

impl Common {
    fn tolerance(&self) -> Tolerance {
        let mut t = Tolerance::default();
        if let Some(r) = self.tol {
            t.residual_rel = r;
        }
        t
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Test whether an instance is a coninvolution or c-reversible.
    #[command(group(ArgGroup::new("query").args(["coninv", "crev"])))]
    Check {
        instance: PathBuf,
        #[arg(long)]
        coninv: bool,
        #[arg(long)]
        crev: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Write a verified factorization certificate.
    #[command(group(ArgGroup::new("length").args(["two", "three", "four"]).required(true)))]
    Factor {
        instance: PathBuf,
        #[arg(long)]
        two: bool,
        #[arg(long, requires = "witness")]
        three: bool,
        #[arg(long)]
        four: bool,
        /// Instance file holding the consimilarity witness k for --three.
        #[arg(long)]
        witness: Option<PathBuf>,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Write h with h h̄⁻¹ equal to a coninvolutory instance.
    Consqrt {
        instance: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Run the generator suites and report pass counts.
    Selftest {
        #[arg(long, default_value_t = 20)]
        count: usize,
        /// Dimension range `a..b` (inclusive).
        #[arg(long, default_value = "1..4", value_parser = selftest::parse_dims)]
        dims: (usize, usize),
        #[command(flatten)]
        common: Common,
    },
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Numerical(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn check(path: &Path, coninv: bool, crev: bool, common: &Common) -> Result<(), Failure> {
    let tol = common.tolerance();
    tol.validate()?;
    let g = read_instance(path)?.to_map()?;
    let (want_con, want_crev) = if coninv || crev { (coninv, crev) } else { (true, true) };
    let mut holds = true;
    if want_con {
        let r = is_coninvolution(&g, &tol);
        println!(
            "coninvolution: {} (linear residual {:e}, translation residual {:e})",
            r.holds, r.linear, r.translation
        );
        holds &= r.holds;
    }
    if want_crev {
        let r = is_c_reversible_affine(&g, &tol)?;
        println!("c-reversible: {r}");
        holds &= r;
    }
    if holds {
        Ok(())
    } else {
        Err(Failure::No("queried predicate is false".into()))
    }
}

/// Serializes, re-reads and re-verifies; only a document that survives the
/// round trip is returned.
fn certificate_text(cert: &Certificate<f64>, seed: u64, tol: &Tolerance) -> Result<String, Failure> {
    let text = to_json(&CertificateDoc::new(cert, seed, tol));
    let doc: CertificateDoc = serde_json::from_str(&text).map_err(|e| Failure::Numerical(e.to_string()))?;
    let report = verify_certificate(&doc.to_certificate()?, tol);
    if let Some(bad) = report.failures().next() {
        return Err(Failure::Numerical(format!(
            "re-read certificate fails: {} (residual {:e})",
            bad.identity, bad.residual
        )));
    }
    Ok(text)
}

fn factor(
    path: &Path,
    length: usize,
    witness: Option<&Path>,
    out: Option<&Path>,
    common: &Common,
) -> Result<(), Failure> {
    let tol = common.tolerance();
    tol.validate()?;
    let g = read_instance(path)?.to_map()?;
    let mut rng = common.rng();
    let cert = match length {
        2 => two_factor(&g, &mut rng, &tol)?,
        3 => {
            let k = read_instance(witness.expect("clap requires --witness"))?.to_map()?;
            if k.dim() != g.dim() {
                return Err(Failure::Malformed("witness dimension differs from the instance".into()));
            }
            three_factor_with_witness(&g, &k, &mut rng, &tol)?
        }
        _ => four_factor(&g, &mut rng, &tol)?,
    };
    let text = certificate_text(&cert, common.seed, &tol)?;
    emit(out, &text)?;
    eprintln!(
        "{} factors, worst residual {:e}",
        cert.factors.len(),
        cert.worst_residual()
    );
    Ok(())
}

fn consqrt(path: &Path, out: Option<&Path>, common: &Common) -> Result<(), Failure> {
    let tol = common.tolerance();
    tol.validate()?;
    let g = read_instance(path)?.to_map()?;
    let h = con_sqrt(&g, &mut common.rng(), &tol)?;
    let text = to_json(&Instance::from_map(&h));
    let back = serde_json::from_str::<Instance>(&text)
        .map_err(|e| Failure::Numerical(e.to_string()))?
        .to_map()?;
    let r = affine_compose(&back, &back.conj().inverse(&tol)?)?.dist(&g) / g.norm().max(1.0);
    if !(r <= tol.residual_rel) {
        return Err(Failure::Numerical(format!("h h̄⁻¹ misses the input by {r:e}")));
    }
    emit(out, &text)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Check {
            instance,
            coninv,
            crev,
            common,
        } => check(&instance, coninv, crev, &common),
        Command::Factor {
            instance,
            two,
            three,
            witness,
            out,
            common,
            ..
        } => {
            let length = if two {
                2
            } else if three {
                3
            } else {
                4
            };
            factor(&instance, length, witness.as_deref(), out.as_deref(), &common)
        }
        Command::Consqrt { instance, out, common } => consqrt(&instance, out.as_deref(), &common),
        Command::Selftest { count, dims, common } => {
            let tol = common.tolerance();
            tol.validate()?;
            selftest::run(common.seed, count, dims, &tol)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("coninv: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
