use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Flags shared by every subcommand. Each one has a config-file key of the
/// same name (`k_max`, `plot_dir`, ...; `C` for `--C`).
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Domain: square, rect2x1, rect10x1, pentagon, hexagon, octagon, disk,
    /// regular:N, rectangle:WxH or polygon:PATH. Repeat for a sweep gallery.
    #[arg(long)]
    pub domain: Vec<String>,
    /// Number of eigenvalues, counting the zero mode.
    #[arg(long)]
    pub m: Option<usize>,
    /// Uniform refinement levels of the mesh.
    #[arg(long)]
    pub levels: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub l: Option<usize>,
    /// Partition constant; searched when absent.
    #[arg(long = "C")]
    pub c: Option<f64>,
    #[arg(long)]
    pub k_max: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write certificate cells as SVG.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Gallery entries processed concurrently.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// JSON file with any of these settings; flags win on conflict.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Directory for per-domain sweep plot data (CSV).
    #[arg(long)]
    pub plot_dir: Option<PathBuf>,
    /// Dump the refined mesh as JSON {vertices, triangles}.
    #[arg(long)]
    pub mesh_json: Option<PathBuf>,
    /// Largest acceptable empirical constant in sweeps.
    #[arg(long)]
    pub max_constant: Option<f64>,
    /// Leave stage timings out of the report.
    #[arg(long)]
    pub no_timings: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum DomainList {
    One(String),
    Many(Vec<String>),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    domain: Option<DomainList>,
    m: Option<usize>,
    levels: Option<usize>,
    k: Option<usize>,
    l: Option<usize>,
    #[serde(rename = "C")]
    c: Option<f64>,
    k_max: Option<usize>,
    format: Option<Format>,
    svg: Option<PathBuf>,
    jobs: Option<usize>,
    plot_dir: Option<PathBuf>,
    mesh_json: Option<PathBuf>,
    max_constant: Option<f64>,
    no_timings: Option<bool>,
}

pub const DEFAULT_M: usize = 8;
pub const DEFAULT_LEVELS: usize = 4;
pub const DEFAULT_K_MAX: usize = 12;
pub const DEFAULT_MAX_CONSTANT: f64 = 100.0;
/// Level 11 on a 256-gon is already ~10⁹ triangles.
pub const MAX_LEVELS: usize = 10;

/// Effective settings after merging flags over the config file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Settings {
    pub command: String,
    /// `None` selects the default gallery.
    pub domains: Option<Vec<String>>,
    pub m: usize,
    pub levels: usize,
    pub k: Option<usize>,
    pub l: Option<usize>,
    #[serde(rename = "C")]
    pub c: Option<f64>,
    pub k_max: usize,
    pub format: Format,
    pub svg: Option<PathBuf>,
    pub jobs: usize,
    pub plot_dir: Option<PathBuf>,
    pub mesh_json: Option<PathBuf>,
    pub max_constant: f64,
    pub no_timings: bool,
}

fn read_config(path: &Path) -> Result<ConfigFile, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::usage(format!("invalid config {}: {e}", path.display())))
}

impl Settings {
    pub fn resolve(command: &str, flags: &Flags) -> Result<Self, CliError> {
        let file = match &flags.config {
            Some(p) => read_config(p)?,
            None => ConfigFile::default(),
        };
        let domains = if !flags.domain.is_empty() {
            Some(flags.domain.clone())
        } else {
            match file.domain {
                Some(DomainList::One(d)) => Some(vec![d]),
                Some(DomainList::Many(v)) => Some(v),
                None => None,
            }
        };
        let s = Settings {
            command: command.to_string(),
            domains,
            m: flags.m.or(file.m).unwrap_or(DEFAULT_M),
            levels: flags.levels.or(file.levels).unwrap_or(DEFAULT_LEVELS),
            k: flags.k.or(file.k),
            l: flags.l.or(file.l),
            c: flags.c.or(file.c),
            k_max: flags.k_max.or(file.k_max).unwrap_or(DEFAULT_K_MAX),
            format: flags.format.or(file.format).unwrap_or_default(),
            svg: flags.svg.clone().or(file.svg),
            jobs: flags.jobs.or(file.jobs).unwrap_or(1),
            plot_dir: flags.plot_dir.clone().or(file.plot_dir),
            mesh_json: flags.mesh_json.clone().or(file.mesh_json),
            max_constant: flags.max_constant.or(file.max_constant).unwrap_or(DEFAULT_MAX_CONSTANT),
            no_timings: flags.no_timings || file.no_timings.unwrap_or(false),
        };
        if s.levels > MAX_LEVELS {
            return Err(CliError::usage(format!("--levels must be at most {MAX_LEVELS}")));
        }
        if s.jobs == 0 {
            return Err(CliError::usage("--jobs must be at least 1"));
        }
        if let Some(c) = s.c {
            if !(c > 0.0 && c.is_finite()) {
                return Err(CliError::usage(format!("--C must be positive, got {c}")));
            }
        }
        if !(s.max_constant > 0.0) {
            return Err(CliError::usage("--max-constant must be positive"));
        }
        Ok(s)
    }

    pub fn echo(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("settings serialize")
    }

    /// The single domain of a non-sweep command.
    pub fn single_domain(&self) -> Result<&str, CliError> {
        match self.domains.as_deref() {
            Some([one]) => Ok(one),
            Some([]) | None => Err(CliError::usage(format!("{} needs --domain", self.command))),
            Some(_) => Err(CliError::usage(format!("{} takes a single --domain", self.command))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn flags_win_over_config() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        write!(f, r#"{{"domain": "hexagon", "m": 5, "levels": 3, "C": 2.5, "no_timings": true}}"#).unwrap();
        let flags = Flags {
            m: Some(7),
            config: Some(f.path().to_path_buf()),
            ..Flags::default()
        };
        let s = Settings::resolve("spectrum", &flags).unwrap();
        assert_eq!(s.m, 7);
        assert_eq!(s.levels, 3);
        assert_eq!(s.c, Some(2.5));
        assert!(s.no_timings);
        assert_eq!(s.single_domain().unwrap(), "hexagon");
    }

    #[test]
    fn bad_config_is_usage_error() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        write!(f, r#"{{"domian": "square"}}"#).unwrap();
        let flags = Flags {
            config: Some(f.path().to_path_buf()),
            ..Flags::default()
        };
        assert_eq!(Settings::resolve("spectrum", &flags).unwrap_err().code, 2);
        let flags = Flags {
            levels: Some(40),
            ..Flags::default()
        };
        assert_eq!(Settings::resolve("spectrum", &flags).unwrap_err().code, 2);
    }
}
