use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ebs_mpm::cli_io::report::{self, CsvFile, BASIS_HEADER};
use ebs_mpm::cli_io::{parse_scenario, preset, run_benchmark, run_to_dir, Overrides, Scenario, PRESETS};
use ebs_mpm::grid_bspline::BasisKind;
use ebs_mpm::{MpmError, Result};

#[derive(Parser)]
#[command(name = "ebs-mpm", version, about = "Material point method with extended B-splines and penalty contact")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file (or a preset name) and write CSV output.
    Run {
        scenario: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        steps: Option<usize>,
        /// Grid spacing in metres.
        #[arg(long)]
        dh: Option<f64>,
        #[arg(long)]
        basis: Option<BasisKind>,
        /// Occupation parameter separating interior from boundary cells.
        #[arg(long)]
        cc: Option<f64>,
        #[arg(long)]
        snapshot_every: Option<usize>,
    },
    /// Run a benchmark preset and score it against its reference solution.
    Bench {
        preset: String,
        /// key=value overrides, see list-presets.
        overrides: Vec<String>,
        /// Directory for report.csv and report.txt.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List benchmark presets and the overrides they accept.
    ListPresets,
    /// Write a reference curve as CSV.
    DumpOracle {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the basis classification and extrapolation weights of a field as CSV.
    DumpBasis {
        /// Scenario file or preset name.
        scenario: String,
        #[arg(long, default_value_t = 0)]
        field: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(spec: &str) -> Result<Scenario> {
    let path = Path::new(spec);
    if path.is_file() {
        let text = std::fs::read_to_string(path)
            .map_err(|source| MpmError::Io { path: path.display().to_string(), source })?;
        parse_scenario(&text)
    } else if PRESETS.iter().any(|p| p.name == spec) {
        preset(spec, &Overrides::default())
    } else {
        Err(MpmError::Config(format!("'{spec}' is neither a readable file nor a preset name")))
    }
}

fn emit(header: Vec<String>, rows: Vec<Vec<String>>, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => {
            let mut f = CsvFile::create(path)?;
            f.line(&header)?;
            for r in &rows {
                f.line(r)?;
            }
            f.finish()
        }
        None => {
            // a closed pipe (e.g. `| head`) simply ends the output
            let mut stdout = std::io::stdout().lock();
            for r in std::iter::once(header).chain(rows) {
                if writeln!(stdout, "{}", r.join(",")).is_err() {
                    break;
                }
            }
            Ok(())
        }
    }
}

fn write_file(path: PathBuf, text: &str) -> Result<()> {
    std::fs::write(&path, text).map_err(|source| MpmError::Io { path: path.display().to_string(), source })
}

fn execute(command: Command) -> Result<bool> {
    match command {
        Command::Run { scenario, out, steps, dh, basis, cc, snapshot_every } => {
            let mut s = load(&scenario)?;
            if let Some(n) = steps {
                s.solver.steps = n;
            }
            if let Some(h) = dh {
                s.grid.spacing = h;
            }
            if let Some(b) = basis {
                s.solver.basis = b;
            }
            if let Some(c) = cc {
                s.solver.occupation = c;
            }
            if let Some(k) = snapshot_every {
                s.output.snapshot_every = k;
            }
            let summary = run_to_dir(&s, &out)?;
            println!(
                "{}: {} steps to t = {:.6e} s, {} snapshots",
                s.name, summary.steps, summary.final_time, summary.snapshots
            );
            for f in summary.files {
                println!("  {}", f.display());
            }
            Ok(true)
        }
        Command::Bench { preset, overrides, out } => {
            let report = run_benchmark(&preset, &Overrides::parse(&overrides)?)?;
            print!("{}", report.to_text());
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir)
                    .map_err(|source| MpmError::Io { path: dir.display().to_string(), source })?;
                write_file(dir.join("report.csv"), &report.to_csv())?;
                write_file(dir.join("report.txt"), &report.to_text())?;
            }
            Ok(report.passed())
        }
        Command::ListPresets => {
            for p in &PRESETS {
                println!("{}\n    {}\n    overrides: {}", p.name, p.description, p.keys.join(", "));
            }
            Ok(true)
        }
        Command::DumpOracle { name, out } => {
            let (header, rows) = report::oracle_curve(&name)?;
            emit(header, rows, out.as_deref())?;
            Ok(true)
        }
        Command::DumpBasis { scenario, field, out } => {
            let s = load(&scenario)?;
            let sim = s.build()?;
            if field >= sim.fields.len() {
                return Err(MpmError::Config(format!("scenario has {} fields, no field {field}", sim.fields.len())));
            }
            let class = report::field_basis_class(&sim, field)?;
            let header = BASIS_HEADER.iter().map(|c| c.to_string()).collect();
            emit(header, report::basis_rows(&class), out.as_deref())?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse().command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
