//! Command-line harness: domain gallery, experiment orchestration, reports
//! and plot data.

pub mod commands;
pub mod config;
pub mod domain;
pub mod error;
pub mod report;
pub mod svg;

use clap::{Parser, Subcommand};

pub use commands::{cmd_bounds, cmd_certify, cmd_spectrum, cmd_sweep, Output};
pub use config::{Flags, Format, Settings};
pub use domain::{default_gallery, DomainSpec};
pub use error::CliError;

/// Reserved; every algorithm is deterministic and nothing reads it.
pub const SEED_ENV: &str = "SPECTRAL_CERTIFY_SEED";

#[derive(Debug, Parser)]
#[command(name = "spectral-certify", version, about = "Neumann spectra, eigenvalue bounds and partition certificates for convex polygons")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Finite-element eigenvalues with Payne–Weinberger and Kröger columns.
    Spectrum(Flags),
    /// Partition certificate for mu_k <~ (k/l)^2 mu_l.
    Certify(Flags),
    /// Empirical constants and chain ratios over a gallery.
    Sweep(Flags),
    /// Closed-form bounds for k = 1..k_max.
    Bounds(Flags),
}

impl Command {
    fn parts(&self) -> (&'static str, &Flags) {
        match self {
            Command::Spectrum(f) => ("spectrum", f),
            Command::Certify(f) => ("certify", f),
            Command::Sweep(f) => ("sweep", f),
            Command::Bounds(f) => ("bounds", f),
        }
    }
}

/// Runs one command. `Ok` carries output even when the exit code is nonzero
/// (a failed certificate is still reported).
pub fn run(command: &Command) -> Result<(Output, Format), CliError> {
    let (name, flags) = command.parts();
    let settings = Settings::resolve(name, flags)?;
    let out = match command {
        Command::Spectrum(_) => cmd_spectrum(&settings)?,
        Command::Certify(_) => cmd_certify(&settings)?,
        Command::Sweep(_) => cmd_sweep(&settings)?,
        Command::Bounds(_) => cmd_bounds(&settings)?,
    };
    Ok((out, settings.format))
}
