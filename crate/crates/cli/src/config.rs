//! Run configuration from flags and an optional JSON file.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use surfband::geometry::SurfaceKind;
use surfband::hamiltonians::Variant;

/// Invalid input, reported with exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn bad(flag: &str, msg: impl std::fmt::Display) -> UsageError {
    UsageError(format!("invalid value for --{flag}: {msg}"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Spectrum,
    Hermiticity,
    GaugeCheck,
    ThinLayer,
    Gke,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum FieldChoice {
    None,
    UniformAxial,
    AbFlux,
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum GaugeChoice {
    Smooth,
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SurfaceArg {
    Ring,
    Cylinder,
    Sphere,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Correct,
    Pragmatic,
}

/// Fully resolved configuration; also the `config` block of every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub surface: SurfaceKind,
    #[serde(rename = "R")]
    pub radius: f64,
    #[serde(rename = "L")]
    pub half_length: f64,
    pub n: usize,
    pub n2: Option<usize>,
    pub k: usize,
    pub order: u8,
    pub variant: Variant,
    pub spin: bool,
    pub field: FieldChoice,
    #[serde(rename = "B")]
    pub b: f64,
    pub flux: f64,
    pub field_file: Option<PathBuf>,
    #[serde(rename = "A_r")]
    pub a_r: f64,
    #[serde(rename = "dA_r_dr")]
    pub da_r_dr: f64,
    pub hbar: f64,
    pub m: f64,
    pub e: f64,
    pub gauge: GaugeChoice,
    pub lambda: f64,
    pub l: Vec<u32>,
    pub d: Vec<f64>,
    pub n_r: Option<usize>,
    #[serde(skip_serializing, default)]
    pub output: Option<PathBuf>,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: Command::Spectrum,
            surface: SurfaceKind::Ring,
            radius: 1.0,
            half_length: 1.0,
            n: 64,
            n2: None,
            k: 5,
            order: 2,
            variant: Variant::Correct,
            spin: false,
            field: FieldChoice::None,
            b: 0.0,
            flux: 0.0,
            field_file: None,
            a_r: 0.0,
            da_r_dr: 0.0,
            hbar: 1.0,
            m: 1.0,
            e: 1.0,
            gauge: GaugeChoice::Smooth,
            lambda: 1.0,
            l: vec![0, 1, 2],
            d: vec![0.1, 0.05, 0.025, 0.0125],
            n_r: None,
            output: None,
            format: Format::Json,
        }
    }
}

/// Partial file contents: every key optional, unknown keys rejected.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    command: Option<Command>,
    surface: Option<SurfaceKind>,
    #[serde(rename = "R")]
    radius: Option<f64>,
    #[serde(rename = "L")]
    half_length: Option<f64>,
    n: Option<usize>,
    n2: Option<Option<usize>>,
    k: Option<usize>,
    order: Option<u8>,
    variant: Option<Variant>,
    spin: Option<bool>,
    field: Option<FieldChoice>,
    #[serde(rename = "B")]
    b: Option<f64>,
    flux: Option<f64>,
    field_file: Option<Option<PathBuf>>,
    #[serde(rename = "A_r")]
    a_r: Option<f64>,
    #[serde(rename = "dA_r_dr")]
    da_r_dr: Option<f64>,
    hbar: Option<f64>,
    m: Option<f64>,
    e: Option<f64>,
    gauge: Option<GaugeChoice>,
    lambda: Option<f64>,
    l: Option<Vec<u32>>,
    d: Option<Vec<f64>>,
    n_r: Option<Option<usize>>,
    output: Option<Option<PathBuf>>,
    format: Option<Format>,
}

#[derive(Debug, Parser)]
#[command(name = "surfband", version, about = "Spectra of charged particles on rings, cylinders and spheres")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Lowest eigenvalues of a surface Hamiltonian.
    Spectrum(Flags),
    /// Hermiticity residual and anti-Hermitian part of a Hamiltonian.
    Hermiticity(Flags),
    /// Gauge covariance of a magnetic Hamiltonian.
    GaugeCheck(Flags),
    /// Thin-shell energies over a sweep of thicknesses.
    ThinLayer(Flags),
    /// Geometric kinetic energy of a surface.
    Gke(Flags),
}

impl CliCommand {
    fn split(&self) -> (Command, &Flags) {
        match self {
            Self::Spectrum(f) => (Command::Spectrum, f),
            Self::Hermiticity(f) => (Command::Hermiticity, f),
            Self::GaugeCheck(f) => (Command::GaugeCheck, f),
            Self::ThinLayer(f) => (Command::ThinLayer, f),
            Self::Gke(f) => (Command::Gke, f),
        }
    }
}

#[derive(Debug, Args, Default)]
pub struct Flags {
    /// JSON file with the same keys as a report's "config" block.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub surface: Option<SurfaceArg>,
    /// Radius.
    #[arg(long = "R", allow_negative_numbers = true)]
    pub radius: Option<f64>,
    /// Cylinder half length.
    #[arg(long = "L", allow_negative_numbers = true)]
    pub half_length: Option<f64>,
    /// Nodes along the first axis.
    #[arg(long)]
    pub n: Option<usize>,
    /// Nodes along the second axis (defaults to n; 1 on rings).
    #[arg(long)]
    pub n2: Option<usize>,
    /// Number of eigenvalues.
    #[arg(long)]
    pub k: Option<usize>,
    /// Stencil order, 2 or 4.
    #[arg(long)]
    pub order: Option<u8>,
    #[arg(long, value_enum)]
    pub variant: Option<VariantArg>,
    /// Two-component spinors with the Zeeman term.
    #[arg(long)]
    pub spin: bool,
    #[arg(long, value_enum)]
    pub field: Option<FieldChoice>,
    /// Uniform axial field strength.
    #[arg(long = "B", allow_negative_numbers = true)]
    pub b: Option<f64>,
    /// Solenoid flux.
    #[arg(long, allow_negative_numbers = true)]
    pub flux: Option<f64>,
    /// CSV with columns coord1, coord2, A_1, A_2[, A_r].
    #[arg(long)]
    pub field_file: Option<PathBuf>,
    /// Uniform normal component of A.
    #[arg(long = "A-r", allow_negative_numbers = true)]
    pub a_r: Option<f64>,
    /// Normal derivative of the normal component.
    #[arg(long = "dA-r-dr", allow_negative_numbers = true)]
    pub da_r_dr: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub hbar: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub m: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub e: Option<f64>,
    #[arg(long, value_enum)]
    pub gauge: Option<GaugeChoice>,
    /// Gauge function amplitude.
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    /// Angular momenta, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub l: Option<Vec<u32>>,
    /// Shell thicknesses, comma separated and decreasing.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub d: Option<Vec<f64>>,
    /// Radial quadrature nodes.
    #[arg(long = "n-r")]
    pub n_r: Option<usize>,
    /// Report path, written atomically.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

/// Merges defaults, the config file and flags (in rising precedence) and
/// validates the result.
pub fn resolve(cli: &Cli) -> Result<RunConfig, UsageError> {
    let (command, flags) = cli.command.split();
    let mut cfg = RunConfig::default();
    if let Some(path) = &flags.config {
        let text = std::fs::read_to_string(path).map_err(|e| bad("config", format!("{}: {e}", path.display())))?;
        let file: FileConfig =
            serde_json::from_str(&text).map_err(|e| bad("config", format!("{}: {e}", path.display())))?;
        apply_file(&mut cfg, file);
    }
    cfg.command = command;
    apply_flags(&mut cfg, flags);
    validate(&cfg)?;
    Ok(cfg)
}

fn apply_file(cfg: &mut RunConfig, f: FileConfig) {
    macro_rules! take {
        ($($name:ident),*) => { $( if let Some(v) = f.$name { cfg.$name = v; } )* };
    }
    take!(
        command, surface, radius, half_length, n, n2, k, order, variant, spin, field, b, flux, field_file,
        a_r, da_r_dr, hbar, m, e, gauge, lambda, l, d, n_r, output, format
    );
}

fn apply_flags(cfg: &mut RunConfig, f: &Flags) {
    macro_rules! take {
        ($($name:ident),*) => { $( if let Some(v) = f.$name.clone() { cfg.$name = v; } )* };
    }
    take!(radius, half_length, n, k, order, field, b, flux, a_r, da_r_dr, hbar, m, e, gauge, lambda, l, d, format);
    if let Some(s) = f.surface {
        cfg.surface = match s {
            SurfaceArg::Ring => SurfaceKind::Ring,
            SurfaceArg::Cylinder => SurfaceKind::Cylinder,
            SurfaceArg::Sphere => SurfaceKind::Sphere,
        };
    }
    if let Some(v) = f.variant {
        cfg.variant = match v {
            VariantArg::Correct => Variant::Correct,
            VariantArg::Pragmatic => Variant::Pragmatic,
        };
    }
    if f.spin {
        cfg.spin = true;
    }
    if f.n2.is_some() {
        cfg.n2 = f.n2;
    }
    if f.field_file.is_some() {
        cfg.field_file = f.field_file.clone();
    }
    if f.n_r.is_some() {
        cfg.n_r = f.n_r;
    }
    if f.output.is_some() {
        cfg.output = f.output.clone();
    }
}

pub fn validate(cfg: &RunConfig) -> Result<(), UsageError> {
    let positive = |flag: &str, v: f64| {
        if v.is_finite() && v > 0.0 {
            Ok(())
        } else {
            Err(bad(flag, format!("must be finite and > 0, got {v}")))
        }
    };
    let finite = |flag: &str, v: f64| {
        if v.is_finite() {
            Ok(())
        } else {
            Err(bad(flag, format!("must be finite, got {v}")))
        }
    };
    positive("R", cfg.radius)?;
    positive("L", cfg.half_length)?;
    positive("hbar", cfg.hbar)?;
    positive("m", cfg.m)?;
    for (flag, v) in [("e", cfg.e), ("B", cfg.b), ("flux", cfg.flux), ("A-r", cfg.a_r), ("dA-r-dr", cfg.da_r_dr), ("lambda", cfg.lambda)] {
        finite(flag, v)?;
    }
    if cfg.n < 3 {
        return Err(bad("n", format!("need at least 3 nodes, got {}", cfg.n)));
    }
    if let Some(n2) = cfg.n2 {
        let min = if cfg.surface == SurfaceKind::Ring { 1 } else { 3 };
        if n2 < min || (cfg.surface == SurfaceKind::Ring && n2 != 1) {
            return Err(bad("n2", format!("{n2} is not a valid node count for this surface")));
        }
    }
    if cfg.k == 0 {
        return Err(bad("k", "must be at least 1"));
    }
    if cfg.order != 2 && cfg.order != 4 {
        return Err(bad("order", format!("must be 2 or 4, got {}", cfg.order)));
    }
    if cfg.field == FieldChoice::Sampled && cfg.field_file.is_none() {
        return Err(bad("field-file", "required with --field sampled"));
    }
    if cfg.variant == Variant::Pragmatic && cfg.surface == SurfaceKind::Sphere {
        return Err(bad("variant", "pragmatic is available on rings and cylinders"));
    }
    if matches!(cfg.command, Command::ThinLayer) {
        if cfg.l.is_empty() {
            return Err(bad("l", "at least one angular momentum"));
        }
        if cfg.d.is_empty() {
            return Err(bad("d", "at least one thickness"));
        }
        for &d in &cfg.d {
            positive("d", d)?;
            if d >= 2.0 * cfg.radius {
                return Err(bad("d", format!("{d} >= 2R: shell collapses through axis/origin")));
            }
        }
        if cfg.d.windows(2).any(|w| w[1] >= w[0]) {
            return Err(bad("d", "thicknesses must be strictly decreasing"));
        }
        if let Some(n_r) = cfg.n_r {
            if n_r < 24 {
                return Err(bad("n-r", format!("need at least 24 nodes, got {n_r}")));
            }
        }
    }
    Ok(())
}

impl RunConfig {
    /// Nodes along the second axis.
    pub fn second_count(&self) -> usize {
        match self.surface {
            SurfaceKind::Ring => 1,
            _ => self.n2.unwrap_or(self.n),
        }
    }
}

/// `SURFBAND_THREADS`, or the available parallelism.
pub fn thread_cap() -> Result<usize, UsageError> {
    match std::env::var("SURFBAND_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(UsageError(format!("invalid value for SURFBAND_THREADS: {v:?}"))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)),
    }
}
