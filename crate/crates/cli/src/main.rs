use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dixmap_cli::commands;

/// Exact computer algebra for nilpotent Lie superalgebras: enveloping
/// algebras, polarizations, induced modules, primitive-ideal membership
/// oracles, orbit tests and maximal-ideal splits.
///
/// Exit codes: 0 success/true, 1 false/distinct, 2 inconclusive,
/// 3 input error.
#[derive(Parser)]
#[command(name = "dixmap", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the three algebra axioms of a structure-constant file.
    Validate {
        algebra: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Compute a polarization of the algebra at a functional.
    Polarize {
        algebra: PathBuf,
        functional: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Build the reduction morphism onto the Clifford--Weyl target.
    Dixmier {
        algebra: PathBuf,
        functional: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Test membership of an element in the kernel ideal.
    Member {
        algebra: PathBuf,
        functional: PathBuf,
        /// element expression, e.g. "z - 1" or "3/2*q*p^2 - z"
        #[arg(long)]
        element: String,
        #[arg(long)]
        json: bool,
    },
    /// Decide whether two functionals lie on one coadjoint orbit.
    #[command(name = "orbit-eq")]
    OrbitEq {
        algebra: PathBuf,
        a: PathBuf,
        b: PathBuf,
        /// filtration degree of the kernel-slice comparison
        #[arg(long, default_value_t = 3)]
        degree: usize,
        /// randomized restarts of the witness search
        #[arg(long, default_value_t = 8)]
        tries: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Split the kernel into maximal ideals of the underlying algebra.
    #[command(name = "split-max")]
    SplitMax {
        algebra: PathBuf,
        functional: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Build a truncated induced module and its annihilator slice.
    Induce {
        algebra: PathBuf,
        functional: PathBuf,
        /// truncation degree bound
        #[arg(long, default_value_t = 4)]
        degree: usize,
        #[arg(long)]
        json: bool,
    },
    /// Re-emit a structure-constant file in canonical form.
    Normalize { algebra: PathBuf },
    /// Run the built-in example catalogue through the main pipelines.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.cmd {
        Cmd::Validate { algebra, json } => commands::validate_cmd(&algebra, json),
        Cmd::Polarize {
            algebra,
            functional,
            json,
        } => commands::polarize_cmd(&algebra, &functional, json),
        Cmd::Dixmier {
            algebra,
            functional,
            json,
        } => commands::dixmier_cmd(&algebra, &functional, json),
        Cmd::Member {
            algebra,
            functional,
            element,
            json,
        } => commands::member_cmd(&algebra, &functional, &element, json),
        Cmd::OrbitEq {
            algebra,
            a,
            b,
            degree,
            tries,
            seed,
            json,
        } => commands::orbit_eq_cmd(&algebra, &a, &b, degree, tries, seed, json),
        Cmd::SplitMax {
            algebra,
            functional,
            json,
        } => commands::split_max_cmd(&algebra, &functional, json),
        Cmd::Induce {
            algebra,
            functional,
            degree,
            json,
        } => commands::induce_cmd(&algebra, &functional, degree, json),
        Cmd::Normalize { algebra } => commands::serialize_cmd(&algebra),
        Cmd::Selftest { seed, json } => commands::selftest_cmd(seed, json),
    };
    println!("{}", outcome.text);
    ExitCode::from(outcome.code as u8)
}
