use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fraclie::{emit, run, BranchSel, Config, Format};

#[derive(Parser)]
#[command(name = "fraclie", version, about = "Lie point symmetries of time-fractional PDE systems")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build and solve the determining system of a .fpde file.
    Analyze {
        file: PathBuf,
        /// Degree of the polynomial ansatz for functions of x.
        #[arg(long)]
        poly_degree: Option<u32>,
        /// Extra building block for the inhomogeneous part of eta, e.g. `x*t^(a-1)`.
        #[arg(long = "h-template")]
        h_template: Vec<String>,
        #[arg(long, value_enum, default_value = "both")]
        branch: BranchSel,
        /// Check a generator file against the system.
        #[arg(long)]
        verify_generator: Option<PathBuf>,
        /// Reduce by each basis generator.
        #[arg(long)]
        reduce: bool,
        #[arg(long, value_enum, default_value = "text")]
        emit: Format,
        /// Compare the power rule with quadrature (seeded by FRACLIE_SEED).
        #[arg(long)]
        oracle_check: bool,
        /// Include wall-clock stage timings (makes output nondeterministic).
        #[arg(long)]
        timing: bool,
    },
}

fn read(path: &PathBuf) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {}", path.display(), e))
}

fn main() -> ExitCode {
    let Cmd::Analyze { file, poly_degree, h_template, branch, verify_generator, reduce, emit: format, oracle_check, timing } =
        Cli::parse().cmd;
    let result = (|| -> Result<fraclie::Report, String> {
        let text = read(&file)?;
        let verify_generator = verify_generator.as_ref().map(read).transpose()?;
        let cfg = Config { poly_degree, h_templates: h_template, branch, verify_generator, reduce, oracle_check, timing, seed: 0 }
            .seed_from_env()
            .map_err(|e| e.to_string())?;
        let name = file.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        run(&name, &text, &cfg).map_err(|e| e.to_string())
    })();
    match result {
        Ok(r) => {
            print!("{}", emit(&r, format));
            if r.basis.is_empty() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(1)
        }
    }
}
