//! `marchenko` command line: direct, inverse, validate, roundtrip, fixtures.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::characterize::{self, Verdict, UNITARITY_TOL};
use crate::direct::{solve_direct, DirectConfig};
use crate::error::{Result, ScatterError};
use crate::fixtures;
use crate::inverse::{invert, InverseConfig};
use crate::io::{self, BoundaryFile, PotentialFile, RecoveredFile, ScatteringFile};
use crate::quadrature::QuadRule;
use crate::roundtrip::{round_trip, RoundTripTolerances};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    /// A hard check or round-trip threshold failed.
    pub const FAILED: i32 = 1;
    /// Input or configuration did not validate.
    pub const INVALID: i32 = 2;
    /// A solver stage failed.
    pub const SOLVER: i32 = 3;
    /// The scattering matrix had not settled on the tail window.
    pub const TAIL: i32 = 4;
    /// No hard failure, but at least one check was inconclusive.
    pub const INCONCLUSIVE: i32 = 5;
}

pub fn exit_code(e: &ScatterError) -> i32 {
    use ScatterError::*;
    match e {
        SelfadjointnessViolated { .. }
        | RankDeficient { .. }
        | DimensionMismatch { .. }
        | NotHermitian { .. }
        | NonFiniteSample { .. }
        | AsymmetricGrid { .. }
        | BadBoundState(_)
        | InvalidInput(_)
        | InvalidConfig(_) => exit::INVALID,
        TailNotSettled { .. } => exit::TAIL,
        _ => exit::SOLVER,
    }
}

#[derive(Debug, Parser)]
#[command(name = "marchenko", version, about = "Direct and inverse scattering for the half-line matrix Schrödinger equation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Potential and boundary condition to scattering data.
    Direct,
    /// Scattering data to potential and boundary condition.
    Inverse,
    /// Marchenko-class and Levinson checks of scattering data.
    Validate,
    /// Direct, inverse, then direct again on the result; reports the discrepancies.
    Roundtrip,
    /// Writes the built-in fixtures as potential, boundary, scattering and config JSON files.
    Fixtures(FixturesArgs),
}

#[derive(Debug, Args)]
pub struct FixturesArgs {
    /// Fixture names; all when none are given.
    pub names: Vec<String>,
    /// Skip the direct solve and the `<name>.scattering.json` files.
    #[arg(long)]
    pub no_scattering: bool,
}

#[derive(Debug, Args)]
pub struct Options {
    /// Potential JSON file.
    #[arg(long, global = true, value_name = "FILE")]
    pub potential: Option<PathBuf>,
    /// Boundary condition JSON file.
    #[arg(long, global = true, value_name = "FILE")]
    pub boundary: Option<PathBuf>,
    /// Scattering data JSON file.
    #[arg(long, global = true, value_name = "FILE")]
    pub scattering: Option<PathBuf>,
    /// Run configuration JSON with optional `direct`, `inverse` and `roundtrip` sections.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR", default_value = ".")]
    pub out: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,
    /// Half-width of the k-grid [default: 60].
    #[arg(long, global = true)]
    pub k_max: Option<f64>,
    /// Number of k-grid points [default: 2048].
    #[arg(long, global = true)]
    pub k_count: Option<usize>,
    /// Truncation radius of the direct problem [default: 40].
    #[arg(long, global = true)]
    pub x_max: Option<f64>,
    /// Reconstruction window of the inverse problem [default: 4].
    #[arg(long, global = true)]
    pub inverse_x_max: Option<f64>,
    /// Kernel truncation [default: 2 × inverse window].
    #[arg(long, global = true)]
    pub y_max: Option<f64>,
    /// Lattice step of the inverse problem [default: 0.02].
    #[arg(long, global = true)]
    pub h: Option<f64>,
    /// Nyström quadrature [default: gregory].
    #[arg(long, global = true, value_parser = ["trapezoid", "gregory"])]
    pub quad: Option<String>,
    /// Suppress the summary on stdout.
    #[arg(long, short, global = true)]
    pub quiet: bool,
}

/// Merged settings from the config file and flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub direct: DirectConfig,
    pub inverse: InverseConfig,
    pub roundtrip: RoundTripTolerances,
}

impl RunConfig {
    pub fn load(opts: &Options) -> Result<Self> {
        let mut cfg: RunConfig = match &opts.config {
            Some(p) => serde_json::from_str(&io::read_text(p)?)
                .map_err(|e| ScatterError::InvalidConfig(format!("{}: {e}", p.display())))?,
            None => RunConfig::default(),
        };
        if let Some(v) = opts.k_max {
            cfg.direct.k_max = v;
        }
        if let Some(v) = opts.k_count {
            cfg.direct.k_count = v;
        }
        if let Some(v) = opts.x_max {
            cfg.direct.x_max = v;
        }
        if let Some(v) = opts.inverse_x_max {
            cfg.inverse.x_max = v;
        }
        if let Some(v) = opts.y_max {
            cfg.inverse.y_max = Some(v);
        }
        if let Some(v) = opts.h {
            cfg.inverse.h = v;
        }
        if let Some(q) = &opts.quad {
            cfg.inverse.quad = if q == "trapezoid" { QuadRule::Trapezoid } else { QuadRule::Gregory };
        }
        cfg.direct.validate()?;
        cfg.inverse.validate()?;
        Ok(cfg)
    }
}

fn require<'a>(p: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path> {
    p.as_deref().ok_or_else(|| ScatterError::InvalidInput(format!("missing --{flag}")))
}

fn write(dir: &Path, name: &str, text: &str) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| ScatterError::InvalidInput(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| ScatterError::InvalidInput(format!("{}: {e}", path.display())))
}

fn csv<F: FnOnce(&mut Vec<u8>) -> std::io::Result<()>>(f: F) -> String {
    let mut buf = Vec::new();
    f(&mut buf).expect("write to memory");
    String::from_utf8(buf).expect("ascii csv")
}

fn load_pair(opts: &Options) -> Result<(crate::Potential, crate::BoundaryCondition)> {
    let pot = io::parse_potential(&io::read_text(require(&opts.potential, "potential")?)?)?;
    let bc = io::parse_boundary(&io::read_text(require(&opts.boundary, "boundary")?)?)?;
    if pot.n() != bc.n() {
        return Err(ScatterError::DimensionMismatch { expected: pot.n(), found: bc.n() });
    }
    Ok((pot, bc))
}

fn say(opts: &Options, line: impl AsRef<str>) {
    if !opts.quiet {
        // a closed stdout (e.g. piped into `head`) must not abort the run
        let _ = writeln!(std::io::stdout(), "{}", line.as_ref());
    }
}

fn cmd_direct(opts: &Options, cfg: &RunConfig) -> Result<i32> {
    let (pot, bc) = load_pair(opts)?;
    let out = solve_direct(&pot, &bc, &cfg.direct)?;
    write(&opts.out, "scattering.json", &io::to_json(&ScatteringFile::from_data(&out.data)))?;
    write(&opts.out, "scattering.csv", &csv(|w| io::scattering_csv(w, &out.data)))?;
    write(&opts.out, "bound_states.csv", &csv(|w| io::bound_states_csv(w, &out.data)))?;
    say(opts, format!("{} k points, {} bound states", out.data.len(), out.data.bound_states().len()));
    for b in out.data.bound_states() {
        say(opts, format!("  kappa {:.12} multiplicity {}", b.kappa, b.multiplicity));
    }
    Ok(exit::OK)
}

fn cmd_inverse(opts: &Options, cfg: &RunConfig) -> Result<i32> {
    let data = io::parse_scattering(&io::read_text(require(&opts.scattering, "scattering")?)?)?;
    let unitarity = characterize::check_unitarity_symmetry(&data);
    if unitarity > UNITARITY_TOL {
        return Err(ScatterError::InvalidInput(format!(
            "scattering matrix fails unitarity/symmetry: residual {unitarity:.3e}"
        )));
    }
    let rec = invert(&data, &cfg.inverse)?;
    write(&opts.out, "recovered.json", &io::to_json(&RecoveredFile::from_recovered(&rec)))?;
    let (fs, f, kd) = io::kernel_csvs(&rec);
    write(&opts.out, "fs.csv", &fs)?;
    write(&opts.out, "f.csv", &f)?;
    write(&opts.out, "kdiag.csv", &kd)?;
    let count = rec.kernel.x_grid.len().saturating_sub(1).max(1);
    write(&opts.out, "potential.csv", &csv(|w| io::potential_csv(w, &rec.potential, cfg.inverse.x_max, count)))?;
    say(opts, format!("recovered on [0, {}]; first moment {:.6e}", cfg.inverse.x_max, rec.potential.first_moment()));
    say(opts, format!("|F(y_max)| {:.3e}, max condition {:.3e}", rec.diagnostics.f_at_y_max, rec.diagnostics.max_condition));
    Ok(exit::OK)
}

fn cmd_validate(opts: &Options, cfg: &RunConfig) -> Result<i32> {
    let data = io::parse_scattering(&io::read_text(require(&opts.scattering, "scattering")?)?)?;
    let report = characterize::marchenko_class_report(&data, None, &cfg.inverse);
    write(&opts.out, "report.json", &io::to_json(&report))?;
    say(opts, report.table().trim_end());
    let overall = report.overall();
    say(opts, format!("overall {overall}"));
    Ok(match overall {
        Verdict::Pass => exit::OK,
        Verdict::Fail => exit::FAILED,
        Verdict::Inconclusive => exit::INCONCLUSIVE,
    })
}

fn cmd_roundtrip(opts: &Options, cfg: &RunConfig) -> Result<i32> {
    let (pot, bc) = load_pair(opts)?;
    let rt = round_trip(&pot, &bc, &cfg.direct, &cfg.inverse, &cfg.roundtrip)?;
    write(&opts.out, "scattering.json", &io::to_json(&ScatteringFile::from_data(&rt.forward.data)))?;
    write(&opts.out, "recovered.json", &io::to_json(&RecoveredFile::from_recovered(&rt.recovered)))?;
    write(&opts.out, "roundtrip.json", &io::to_json(&rt.report))?;
    let r = &rt.report;
    say(opts, format!("potential error {:.3e}{}", r.potential_error, if r.potential_relative { " (relative L1)" } else { " (L1)" }));
    say(opts, format!("boundary distance {:.3e} equivalent {}", r.bc_distance, r.bc_equivalent));
    say(opts, format!("S reproduction {:.3e}", r.s_error));
    say(opts, format!("bound states {} -> {}", r.n_bound, r.n_bound_recovered));
    Ok(if r.passed { exit::OK } else { exit::FAILED })
}

fn cmd_fixtures(opts: &Options, args: &FixturesArgs, cfg: &RunConfig) -> Result<i32> {
    let chosen = if args.names.is_empty() {
        fixtures::all()
    } else {
        args.names
            .iter()
            .map(|n| fixtures::by_name(n).ok_or_else(|| ScatterError::InvalidInput(format!("unknown fixture {n}"))))
            .collect::<Result<Vec<_>>>()?
    };
    for f in chosen {
        let run = RunConfig { direct: cfg.direct.clone(), inverse: f.inverse.clone(), roundtrip: f.tolerances.clone() };
        write(&opts.out, &format!("{}.potential.json", f.name), &io::to_json(&PotentialFile::from_potential(&f.potential)))?;
        write(&opts.out, &format!("{}.boundary.json", f.name), &io::to_json(&BoundaryFile::from_boundary(&f.bc)))?;
        write(&opts.out, &format!("{}.config.json", f.name), &io::to_json(&run))?;
        if !args.no_scattering {
            let out = solve_direct(&f.potential, &f.bc, &cfg.direct)?;
            write(&opts.out, &format!("{}.scattering.json", f.name), &io::to_json(&ScatteringFile::from_data(&out.data)))?;
        }
        say(opts, f.name);
    }
    Ok(exit::OK)
}

fn dispatch(cli: &Cli) -> Result<i32> {
    let cfg = RunConfig::load(&cli.opts)?;
    match &cli.command {
        Command::Direct => cmd_direct(&cli.opts, &cfg),
        Command::Inverse => cmd_inverse(&cli.opts, &cfg),
        Command::Validate => cmd_validate(&cli.opts, &cfg),
        Command::Roundtrip => cmd_roundtrip(&cli.opts, &cfg),
        Command::Fixtures(args) => cmd_fixtures(&cli.opts, args, &cfg),
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    if let Some(n) = cli.opts.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("marchenko: {e}");
        }
    }
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("marchenko: {e}");
            exit_code(&e)
        }
    }
}
