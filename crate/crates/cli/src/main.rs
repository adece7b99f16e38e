//! `smallstate`: observables, sweeps, current slices, radial profiles and
//! oracle validation for the positive-frequency Gaussian Dirac packets.
//!
//! Exit status is 0 on success, 1 for invalid input (nothing is computed)
//! and 2 when a computation fails. Errors are printed to stderr as a JSON
//! object.

mod config;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use smallstate::experiments::{self, Spacing, SweepSpec, DEFAULT_HALF_EXTENT, DEFAULT_PANELS};
use smallstate::observables::{Observable, ObservableSet};
use smallstate::oracle::{self, ValidationOptions};
use smallstate::svg::{self, Series};
use smallstate::{PacketSpec, RadialProfiles};

use config::{Format, Overrides, RunConfig, Settings};

#[derive(Debug)]
pub struct CliError {
    kind: &'static str,
    message: String,
    details: Option<Value>,
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        CliError {
            kind: "validation",
            message: message.into(),
            details: None,
        }
    }

    fn computation(message: impl Into<String>) -> Self {
        CliError {
            kind: "computation",
            message: message.into(),
            details: None,
        }
    }

    pub fn is_validation(&self) -> bool {
        self.kind == "validation"
    }

    fn exit_code(&self) -> u8 {
        if self.is_validation() {
            1
        } else {
            2
        }
    }

    fn to_json(&self) -> Value {
        let mut body = json!({ "kind": self.kind, "message": self.message });
        if let Some(d) = &self.details {
            body["details"] = d.clone();
        }
        json!({ "error": body })
    }
}

impl From<smallstate::Error> for CliError {
    fn from(e: smallstate::Error) -> Self {
        let kind = if e.is_validation() { "validation" } else { "computation" };
        CliError {
            kind,
            message: e.to_string(),
            details: None,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::computation(format!("i/o error: {e}"))
    }
}

#[derive(Parser, Debug)]
#[command(name = "smallstate", version, about = "Sub-Compton positive-frequency Dirac wave packets")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// Worker threads for parallel quadrature (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// key=value file with defaults; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Relative tolerance of 1D integrals (env: SMALLSTATE_REL_TOL).
    #[arg(long, global = true, allow_negative_numbers = true)]
    rel_tol: Option<f64>,
    /// Absolute tolerance of 1D integrals (env: SMALLSTATE_ABS_TOL).
    #[arg(long, global = true, allow_negative_numbers = true)]
    abs_tol: Option<f64>,
    /// Any other quadrature setting, e.g. `--set radial_nodes=1200`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Seed for Monte-Carlo and random point sets.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// csv, json or svg (which ones apply depends on the command).
    #[arg(long, global = true)]
    format: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// All scalar observables for one packet width.
    Observables {
        /// Momentum width in units of mc.
        #[arg(long, allow_negative_numbers = true)]
        n: f64,
        /// Comma-separated subset of observables.
        #[arg(long, value_delimiter = ',')]
        observables: Vec<String>,
    },
    /// Observables over a grid of widths.
    Sweep {
        /// Smallest width.
        #[arg(long, default_value_t = 0.01, allow_negative_numbers = true)]
        n_min: f64,
        /// Largest width.
        #[arg(long, default_value_t = 100.0, allow_negative_numbers = true)]
        n_max: f64,
        /// Number of widths, endpoints included.
        #[arg(long, default_value_t = 25)]
        points: usize,
        /// log or linear.
        #[arg(long, default_value = "log")]
        spacing: String,
        /// Comma-separated subset of observables (all when absent).
        #[arg(long, value_delimiter = ',')]
        observables: Vec<String>,
    },
    /// Current density in the z = 0 plane.
    Slice {
        /// One or more widths (comma-separated); defaults to 0.5,2,8.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        n: Vec<f64>,
        /// Half side of the square, in Compton radii.
        #[arg(long, default_value_t = DEFAULT_HALF_EXTENT, allow_negative_numbers = true)]
        half_extent: f64,
        /// Grid points per side.
        #[arg(long, alias = "resolution", default_value_t = 24)]
        res: usize,
    },
    /// Tabulated radial functions a(r), b(r) and their energy-weighted forms.
    Profile {
        /// Momentum width in units of mc.
        #[arg(long, allow_negative_numbers = true)]
        n: f64,
    },
    /// Compare the primary computations against the brute-force oracles.
    Validate {
        /// Run only comparisons whose group name starts with this.
        #[arg(long)]
        only: Option<String>,
        /// Random points per width in the pointwise wave-function check.
        #[arg(long, default_value_t = 50)]
        psi_points: usize,
    },
}

fn parse_observables(list: &[String]) -> Result<Vec<Observable>, CliError> {
    if list.is_empty() {
        return Ok(Observable::ALL.to_vec());
    }
    let mut out = Vec::new();
    for item in list {
        let o: Observable = item.parse()?;
        if !out.contains(&o) {
            out.push(o);
        }
    }
    Ok(out)
}

fn pick_format(settings: &Settings, default: Format, allowed: &[Format], command: &str) -> Result<Format, CliError> {
    let f = settings.format.unwrap_or(default);
    if !allowed.contains(&f) {
        let names: Vec<String> = allowed.iter().map(|f| f.to_string()).collect();
        return Err(CliError::validation(format!("`{command}` writes {}, not {f}", names.join(" or "))));
    }
    Ok(f)
}

fn json_document(run: &RunConfig, key: &str, value: Value) -> Vec<u8> {
    let doc = json!({ "run_config": run, key: value });
    let mut text = serde_json::to_string_pretty(&doc).expect("json output");
    text.push('\n');
    text.into_bytes()
}

/// Write the finished output in one go: to a temporary file beside the
/// target that is then renamed over it, or to stdout.
fn emit(output: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match output {
        Some(path) => {
            let dir = match path.parent() {
                Some(d) if !d.as_os_str().is_empty() => d,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
            tmp.write_all(bytes)?;
            tmp.flush()?;
            tmp.persist(path).map_err(|e| CliError::from(e.error))?;
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
        }
    }
    Ok(())
}

struct Outcome {
    bytes: Vec<u8>,
    /// Printed to stderr after the output is written.
    summary: Option<String>,
    /// A non-fatal failure to report after writing the output.
    failure: Option<CliError>,
}

impl Outcome {
    fn ok(bytes: Vec<u8>) -> Self {
        Outcome {
            bytes,
            summary: None,
            failure: None,
        }
    }
}

fn cmd_observables(settings: &Settings, n: f64, list: &[String]) -> Result<Outcome, CliError> {
    let spec = PacketSpec::new(n)?;
    let which = parse_observables(list)?;
    let format = pick_format(settings, Format::Json, &[Format::Json, Format::Csv], "observables")?;
    let keys: Vec<&str> = which.iter().map(|o| o.key()).collect();
    let run = RunConfig::new("observables", json!({ "n": n, "observables": keys }), settings, format);
    let set = ObservableSet::compute(&spec, &settings.quadrature, &which)?;
    let bytes = match format {
        Format::Csv => {
            let mut text = String::new();
            for line in run.csv_lines() {
                text.push_str(&format!("# {line}\n"));
            }
            text.push_str(&ObservableSet::csv_header(&which));
            text.push('\n');
            text.push_str(&set.csv_row(&which));
            text.push('\n');
            text.into_bytes()
        }
        _ => json_document(&run, "observables", serde_json::to_value(&set).expect("observables serialize")),
    };
    Ok(Outcome::ok(bytes))
}

fn cmd_sweep(settings: &Settings, n_min: f64, n_max: f64, points: usize, spacing: &str, list: &[String]) -> Result<Outcome, CliError> {
    let spacing: Spacing = spacing.parse()?;
    let sweep = SweepSpec {
        n_min,
        n_max,
        points,
        spacing,
        observables: parse_observables(list)?,
        quadrature: settings.quadrature.clone(),
    };
    sweep.validate()?;
    let format = pick_format(settings, Format::Csv, &[Format::Csv, Format::Json, Format::Svg], "sweep")?;
    let keys: Vec<&str> = sweep.observables.iter().map(|o| o.key()).collect();
    let params = json!({ "n_min": n_min, "n_max": n_max, "points": points, "spacing": spacing, "observables": keys });
    let run = RunConfig::new("sweep", params, settings, format);
    let table = experiments::run_sweep(&sweep)?;
    let bytes = match format {
        Format::Csv => {
            let mut buf = Vec::new();
            table.write_csv(&mut buf, &run.csv_lines())?;
            buf
        }
        Format::Json => json_document(&run, "rows", serde_json::to_value(&table.rows).expect("rows serialize")),
        Format::Svg => {
            let series: Vec<Series> = sweep
                .observables
                .iter()
                .map(|&o| Series {
                    label: o.key().to_string(),
                    points: table.column(o).into_iter().map(|(n, e)| (n, e.value)).collect(),
                })
                .collect();
            svg::line_plot(&series, spacing == Spacing::Log, "n (mc)", &run.to_json_line()).into_bytes()
        }
    };
    let failure = (table.failures() > 0).then(|| {
        let mut e = CliError::computation(format!("{} of {} sweep points failed", table.failures(), table.rows.len()));
        e.details = Some(
            table
                .rows
                .iter()
                .filter_map(|r| r.outcome.as_ref().err().map(|f| json!({ "n": r.n, "message": f.message })))
                .collect(),
        );
        e
    });
    Ok(Outcome {
        bytes,
        summary: Some(format!("sweep: {}", table.summary())),
        failure,
    })
}

fn cmd_slice(settings: &Settings, widths: &[f64], half_extent: f64, res: usize) -> Result<Outcome, CliError> {
    let widths = if widths.is_empty() { DEFAULT_PANELS.to_vec() } else { widths.to_vec() };
    for &n in &widths {
        PacketSpec::new(n)?;
    }
    experiments::validate_slice(half_extent, res)?;
    let format = pick_format(settings, Format::Csv, &[Format::Csv, Format::Json, Format::Svg], "slice")?;
    if format == Format::Csv && widths.len() > 1 {
        return Err(CliError::validation("csv slice output takes a single --n; use svg or json for several panels"));
    }
    let run = RunConfig::new("slice", json!({ "n": widths, "half_extent": half_extent, "resolution": res }), settings, format);
    let panels = experiments::current_panels(&widths, &settings.quadrature, half_extent, res)?;
    let bytes = match format {
        Format::Csv => {
            let mut buf = Vec::new();
            panels[0].write_csv(&mut buf, &run.csv_lines())?;
            buf
        }
        Format::Json => json_document(&run, "panels", serde_json::to_value(&panels).expect("panels serialize")),
        Format::Svg => svg::quiver(&panels, &run.to_json_line()).into_bytes(),
    };
    let summary = panels
        .iter()
        .map(|p| format!("n = {}: peak |J| = {:.6e}, circulation radius = {:.4}", p.n, p.peak_current, p.circulation_radius()))
        .collect::<Vec<_>>()
        .join("; ");
    Ok(Outcome {
        bytes,
        summary: Some(format!("slice: {summary}")),
        failure: None,
    })
}

fn cmd_profile(settings: &Settings, n: f64) -> Result<Outcome, CliError> {
    let spec = PacketSpec::new(n)?;
    let format = pick_format(settings, Format::Csv, &[Format::Csv, Format::Json], "profile")?;
    let run = RunConfig::new("profile", json!({ "n": n }), settings, format);
    let profiles = RadialProfiles::build(&spec, &settings.quadrature)?;
    let bytes = match format {
        Format::Csv => {
            let mut buf = Vec::new();
            profiles.write_csv(&mut buf, &run.csv_lines())?;
            buf
        }
        _ => {
            let count = profiles.grid().count;
            let (mut r, mut a, mut b, mut a_e, mut b_e) = (vec![], vec![], vec![], vec![], vec![]);
            for k in 0..count {
                let x = profiles.grid().node(k);
                let v = profiles.node_values(k);
                r.push(x);
                a.push(v.a);
                b.push(v.beta * x);
                a_e.push(v.a_e);
                b_e.push(v.beta_e * x);
            }
            let body = json!({ "n": n, "p_max": profiles.p_max(), "r": r, "a": a, "b": b, "a_E": a_e, "b_E": b_e });
            json_document(&run, "profile", body)
        }
    };
    let (norm, _) = profiles.norm()?;
    Ok(Outcome {
        bytes,
        summary: Some(format!("profile: {} nodes to r = {}, norm = {norm:.12}", profiles.grid().count, profiles.r_max())),
        failure: None,
    })
}

fn cmd_validate(settings: &Settings, only: Option<String>, psi_points: usize) -> Result<Outcome, CliError> {
    let opts = ValidationOptions {
        only,
        seed: settings.quadrature.seed,
        psi_points,
        ..Default::default()
    };
    opts.validate()?;
    let format = pick_format(settings, Format::Json, &[Format::Json], "validate")?;
    let run = RunConfig::new("validate", json!({ "only": opts.only, "seed": opts.seed, "psi_points": psi_points }), settings, format);
    let reports = oracle::run_validation(&settings.quadrature, &opts)?;
    let failed: Vec<&oracle::OracleReport> = reports.iter().filter(|r| !r.passed).collect();
    let summary = format!("validate: {} comparisons, {} failed", reports.len(), failed.len());
    let failure = (!failed.is_empty()).then(|| {
        let mut e = CliError::computation(format!("{} oracle comparisons failed", failed.len()));
        e.details = Some(serde_json::to_value(&failed).expect("reports serialize"));
        e
    });
    let bytes = json_document(&run, "reports", serde_json::to_value(&reports).expect("reports serialize"));
    Ok(Outcome {
        bytes,
        summary: Some(summary),
        failure,
    })
}

fn run(cli: Cli) -> Result<(), CliError> {
    let g = cli.global;
    let flags = Overrides {
        rel_tol: g.rel_tol,
        abs_tol: g.abs_tol,
        seed: g.seed,
        threads: g.threads,
        format: g.format,
        output: g.output,
        set: g.set,
    };
    if flags.threads == Some(0) {
        return Err(CliError::validation("`threads` needs a positive integer, got `0`"));
    }
    let settings = config::resolve(g.config.as_deref(), &flags)?;
    if let Some(t) = settings.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::computation(format!("cannot start worker pool: {e}")))?;
    }
    let outcome = match cli.command {
        Command::Observables { n, observables } => cmd_observables(&settings, n, &observables)?,
        Command::Sweep {
            n_min,
            n_max,
            points,
            spacing,
            observables,
        } => cmd_sweep(&settings, n_min, n_max, points, &spacing, &observables)?,
        Command::Slice { n, half_extent, res } => cmd_slice(&settings, &n, half_extent, res)?,
        Command::Profile { n } => cmd_profile(&settings, n)?,
        Command::Validate { only, psi_points } => cmd_validate(&settings, only, psi_points)?,
    };
    emit(settings.output.as_deref(), &outcome.bytes)?;
    if let Some(s) = outcome.summary {
        eprintln!("{s}");
    }
    match outcome.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let err = CliError::validation(e.to_string().trim().to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(err.exit_code());
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code())
        }
    }
}
