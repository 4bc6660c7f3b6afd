//! `qsl`: command line front end. Every subcommand prints one JSON report (or
//! a CSV for `plot-section`) and exits 0, 1 on domain errors, 2 on malformed
//! input. Errors are printed as `{"error": {"code", "message"}}`.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

#[derive(Parser, Debug)]
#[command(name = "qsl", version, about = "Quiver sheaves, labeled quivers and their stability")]
struct Cli {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for subrepresentation enumeration.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
pub struct RepTheta {
    #[arg(long)]
    pub rep: PathBuf,
    /// Comma list in vertex order, or `id=value` pairs.
    #[arg(long, allow_hyphen_values = true)]
    pub theta: String,
}

#[derive(Args, Debug)]
pub struct ModelNm {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub n: i64,
    #[arg(long)]
    pub m: i64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build the twisted quiver Q(Q′).
    Twist {
        #[arg(long)]
        quiver: PathBuf,
        #[arg(long)]
        rows: usize,
        /// Label dimensions `h_kl` as `a,b;c,d` (default all ones).
        #[arg(long)]
        label_dims: Option<String>,
    },
    /// Replace labeled arrows by parallel unlabeled copies.
    Expand {
        #[arg(long)]
        quiver: PathBuf,
    },
    /// θ-stability verdict by subrepresentation enumeration.
    CheckRep(RepTheta),
    /// Harder–Narasimhan filtration.
    Hn(RepTheta),
    /// Jordan–Hölder filtration and gr of a semistable representation.
    Jh(RepTheta),
    /// S-equivalence of two semistable representations.
    SEquiv {
        #[command(flatten)]
        first: RepTheta,
        #[arg(long)]
        other: PathBuf,
    },
    /// Multi-Hilbert polynomial, multi-rank and reduced polynomial.
    Hilbert {
        /// Numerical sheaf file or P¹ sheaf model.
        #[arg(long)]
        sheaf: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        sigma: String,
        /// Defaults to σ.
        #[arg(long, allow_hyphen_values = true)]
        rho: Option<String>,
    },
    /// Compare the reduced polynomials of a subobject and its ambient object.
    Compare {
        #[arg(long)]
        sheaf: PathBuf,
        #[arg(long)]
        sub: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        sigma: String,
        #[arg(long, allow_hyphen_values = true)]
        rho: Option<String>,
    },
    /// Semistability of a split P¹ model for a symmetric weight.
    SymmetricCheck {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        sigma_hat: String,
    },
    /// Hom(T, E) as a representation of the twisted quiver.
    Embed {
        #[command(flatten)]
        nm: ModelNm,
        #[arg(long, allow_hyphen_values = true)]
        sigma: Option<String>,
        /// Emit a rep file over F_p instead of the rational dump.
        #[arg(long)]
        reduce_mod: Option<u64>,
    },
    /// Tighten a subrepresentation of an embedded model.
    Tighten {
        #[command(flatten)]
        nm: ModelNm,
        #[arg(long, allow_hyphen_values = true)]
        sigma: String,
        #[arg(long)]
        sub: PathBuf,
    },
    /// Wall forms of a family, their classification and chambers.
    Walls {
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        cone: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "symmetric")]
        space: commands::SpaceArg,
        #[arg(long)]
        lower_dim: bool,
    },
    /// Chambers of a linear wall arrangement inside a cone.
    Chambers {
        #[arg(long)]
        walls: PathBuf,
        #[arg(long)]
        cone: PathBuf,
        #[arg(long)]
        lower_dim: bool,
    },
    /// Compare every pair of a family at two weights.
    CompareAcross {
        #[arg(long)]
        family: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        sigma: String,
        #[arg(long, allow_hyphen_values = true)]
        sigma_prime: String,
    },
    /// CSV traces of walls on the slice σ = x·u + y·v.
    PlotSection {
        #[arg(long)]
        walls: PathBuf,
        #[arg(long)]
        cone: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        #[arg(long, allow_hyphen_values = true)]
        v: String,
        #[arg(long, default_value_t = 16)]
        samples: usize,
        #[arg(long, default_value_t = 6)]
        precision: usize,
    },
}

fn fail(code: &str, message: &str, status: u8) -> ExitCode {
    print!("{}", qsl::io::to_pretty(&json!({ "error": { "code": code, "message": message } })));
    ExitCode::from(status)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail("E_USAGE", e.to_string().trim(), 2),
    };
    if let Some(j) = cli.jobs {
        if j == 0 {
            return fail("E_USAGE", "--jobs must be positive", 2);
        }
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j).build_global();
    }
    let cap = match std::env::var("QSL_CAP") {
        Ok(s) => match s.trim().parse::<u128>() {
            Ok(c) => c,
            Err(_) => return fail("E_USAGE", &format!("QSL_CAP must be a non-negative integer, got {s:?}"), 2),
        },
        Err(_) => qsl::replab::DEFAULT_CAP,
    };
    let text = match commands::run(&cli.command, cap) {
        Ok(t) => t,
        Err(e) => return fail(e.code(), &e.to_string(), if e.is_input_error() { 2 } else { 1 }),
    };
    match &cli.out {
        Some(p) => {
            if let Err(e) = std::fs::write(p, text) {
                return fail("E_IO", &format!("{}: {e}", p.display()), 2);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::SUCCESS
}
