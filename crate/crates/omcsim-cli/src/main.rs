//! Command-line front end: parameter validation, spectra, band structure,
//! storage runs, noise budgets, pump scans and design optimization.
//!
//! Exit codes: 0 success, 1 usage error, 2 parameter-validation failure,
//! 3 numerical failure.

use std::f64::consts::TAU;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use omcsim::bands::{band_edges, dispersion_csv, dispersion_table};
use omcsim::cascade::{analytic_delay, array_spectrum};
use omcsim::design::{evaluate_grid, grid_csv, optimize, summary, Bounds, OptimizeOptions};
use omcsim::dynamics::{simulate, storage_metrics, PulseSpec, SimConfig, StorageProtocol};
use omcsim::noise::{default_pump_grid, noise_report, pump_csv, pump_scan};
use omcsim::params::{derived_rates, validate_params, SystemParams};

mod config;
mod output;
mod svg;

use config::RunConfig;
use output::OutputDir;
use svg::{line_plot, PlotSpec, Series};

#[derive(Parser)]
#[command(
    name = "omcsim",
    version,
    about = "Simulator for a waveguide coupled to a driven optomechanical resonator array"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct SourceArgs {
    /// Named parameter preset: fig1, device, optimum
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
    /// TOML config file (see README for the key set)
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct OutputArgs {
    /// Output directory
    #[arg(long, default_value = "out", value_name = "DIR")]
    out: PathBuf,
    /// Comma-separated output formats: csv and/or svg
    #[arg(long, default_value = "csv", value_name = "FMT")]
    format: String,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a parameter set and print the validation report
    Validate {
        #[command(flatten)]
        source: SourceArgs,
    },
    /// Reflection/transmission spectrum of an N-element array
    Spectrum {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Number of elements (default: from the parameter set)
        #[arg(long)]
        n: Option<usize>,
        /// Detuning grid points
        #[arg(long)]
        points: Option<usize>,
        /// Detuning half-span (Hz)
        #[arg(long)]
        span_hz: Option<f64>,
    },
    /// Bloch dispersion and fractional occupations
    Bands {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long)]
        points: Option<usize>,
        #[arg(long)]
        span_hz: Option<f64>,
    },
    /// Time-domain capture/hold/release storage run
    Store {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Hold duration with the drive off (s)
        #[arg(long)]
        hold_s: Option<f64>,
        /// Drive ramp duration (s)
        #[arg(long)]
        ramp_s: Option<f64>,
        /// Integrator step (s); default 0.02/kappa (the stability budget)
        #[arg(long)]
        dt_s: Option<f64>,
        /// Write every k-th sample to the CSV
        #[arg(long)]
        stride: Option<usize>,
    },
    /// Thermal/Stokes noise budget and single-photon power comparison
    Noise {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Pulse bandwidth for the comparison (Hz); default: binding limit
        #[arg(long)]
        bandwidth_hz: Option<f64>,
    },
    /// Pump input power vs attenuation trade-off scan
    Pump {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long)]
        points: Option<usize>,
        /// Largest pump detuning scanned (Hz)
        #[arg(long)]
        max_detuning_hz: Option<f64>,
        /// Pump photons per tuning cavity; default (Omega_m/h)^2
        #[arg(long)]
        photons: Option<f64>,
    },
    /// Constrained maximization of the bandwidth-delay product
    Optimize {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long)]
        n_min: Option<f64>,
        #[arg(long)]
        n_max: Option<f64>,
        #[arg(long)]
        kappa_ex_min_hz: Option<f64>,
        #[arg(long)]
        kappa_ex_max_hz: Option<f64>,
        #[arg(long)]
        omega_drive_min_hz: Option<f64>,
        #[arg(long)]
        omega_drive_max_hz: Option<f64>,
        #[arg(long)]
        points_per_decade: Option<f64>,
        /// Skip local refinement (coarse grid argmax only)
        #[arg(long)]
        no_refine: bool,
        /// Also write the full evaluated grid as CSV (audit)
        #[arg(long)]
        emit_grid: bool,
    },
}

enum CliError {
    Usage(String),
    Validation(String),
    Numerical(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Validation(m) | CliError::Numerical(m) => m,
        }
    }
}

impl From<String> for CliError {
    fn from(m: String) -> Self {
        CliError::Usage(m)
    }
}

fn lib_error(e: omcsim::Error) -> CliError {
    match e {
        omcsim::Error::Validation(m) => CliError::Validation(m),
        other => CliError::Numerical(other.to_string()),
    }
}

/// Resolve the parameter source: exactly one of --preset / --config.
fn resolve(source: &SourceArgs) -> Result<(SystemParams, RunConfig, String), CliError> {
    match (&source.preset, &source.config) {
        (Some(_), Some(_)) => Err(CliError::Usage(
            "pass either --preset or --config, not both".into(),
        )),
        (None, None) => Err(CliError::Usage(
            "a parameter source is required: --preset NAME or --config PATH".into(),
        )),
        (Some(name), None) => {
            let p = SystemParams::preset(name).ok_or_else(|| {
                CliError::Usage(format!(
                    "unknown preset `{name}` (expected one of {:?})",
                    SystemParams::PRESET_NAMES
                ))
            })?;
            Ok((p, RunConfig::default(), format!("preset {name}")))
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            let cfg = RunConfig::parse(&text).map_err(CliError::Usage)?;
            let p = cfg.resolve_params().map_err(CliError::Usage)?;
            Ok((p, cfg, format!("config {}", path.display())))
        }
    }
}

fn validated(p: &SystemParams) -> Result<(), CliError> {
    let report = validate_params(p);
    if !report.is_pass() {
        return Err(CliError::Validation(report.errors.join("; ")));
    }
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    Ok(())
}

struct Formats {
    csv: bool,
    svg: bool,
}

fn parse_formats(s: &str) -> Result<Formats, CliError> {
    let mut f = Formats {
        csv: false,
        svg: false,
    };
    for part in s.split(',') {
        match part.trim() {
            "csv" => f.csv = true,
            "svg" => f.svg = true,
            other => {
                return Err(CliError::Usage(format!(
                    "unknown output format `{other}` (expected csv and/or svg)"
                )))
            }
        }
    }
    Ok(f)
}

fn linear_grid(span: f64, points: usize) -> Result<Vec<f64>, CliError> {
    if points < 2 || !span.is_finite() || span <= 0.0 {
        return Err(CliError::Usage(
            "grid needs at least 2 points and a positive span".into(),
        ));
    }
    Ok((0..points)
        .map(|i| -span + 2.0 * span * i as f64 / (points - 1) as f64)
        .collect())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::Validate { source } => {
            let (p, _, desc) = resolve(&source)?;
            let report = validate_params(&p);
            println!("parameter source: {desc}");
            println!("kappa/omega_m  = {:.4e}", report.sideband_ratio);
            println!("Omega_m/kappa  = {:.4e}", report.drive_ratio);
            let d = derived_rates(&p);
            println!("kappa/2pi      = {:.6e} Hz", d.kappa / TAU);
            println!("Gamma_opt/2pi  = {:.6e} Hz", d.gamma_opt / TAU);
            println!("delay per cell = {:.6e} s", d.delay_per_cell);
            println!("total delay    = {:.6e} s", d.total_delay);
            println!("band width/2pi = {:.6e} Hz", d.slow_band_width / TAU);
            println!("pump photons   = {:.6e}", d.pump_photons);
            for w in &report.warnings {
                println!("warning: {w}");
            }
            if report.is_pass() {
                println!("validation: pass");
                Ok(())
            } else {
                for e in &report.errors {
                    println!("error: {e}");
                }
                println!("validation: fail");
                Err(CliError::Validation(report.errors.join("; ")))
            }
        }

        Cmd::Spectrum {
            source,
            output,
            n,
            points,
            span_hz,
        } => {
            let (p, cfg, desc) = resolve(&source)?;
            validated(&p)?;
            let formats = parse_formats(&output.format)?;
            let n = n.unwrap_or_else(|| p.n_elements.max(1));
            let grid_cfg = cfg.grid;
            let points = points.or(grid_cfg.and_then(|g| g.points));
            let span_hz = span_hz.or(grid_cfg.and_then(|g| g.span_hz));
            // no explicit grid: 2001 points across ±kappa_ex with extra
            // resolution clustered at the band edges
            let grid = match (points, span_hz) {
                (None, None) => omcsim::cascade::default_grid(&p),
                (pts, span) => {
                    linear_grid(TAU * span.unwrap_or(p.kappa_ex / TAU), pts.unwrap_or(2001))?
                }
            };
            let table = array_spectrum(&p, n, &grid).map_err(lib_error)?;

            let mut out = OutputDir::create(&output.out, "spectrum", &desc)?;
            out.record_params(&p);
            out.record("n", n.to_string());
            out.record("points", grid.len().to_string());
            out.record(
                "span_hz",
                format!("{:e}", grid.last().copied().unwrap_or(0.0) / TAU),
            );
            if formats.csv {
                let path = out.write("spectrum.csv", &table.to_csv())?;
                println!("wrote {}", path.display());
            }
            if formats.svg {
                let spec = PlotSpec::new(
                    &format!("array spectrum, N = {n}"),
                    "detuning/2pi (Hz)",
                    "power coefficient",
                );
                let to_hz = |d: &f64| *d / TAU;
                let t2: Vec<(f64, f64)> = grid
                    .iter()
                    .zip(&table.t_mag2)
                    .map(|(d, v)| (to_hz(d), *v))
                    .collect();
                let r2: Vec<(f64, f64)> = grid
                    .iter()
                    .zip(&table.r_mag2)
                    .map(|(d, v)| (to_hz(d), *v))
                    .collect();
                let doc = line_plot(
                    &spec,
                    &[
                        Series::line("|t|^2", "#cc0000", t2),
                        Series::line("|r|^2", "#000000", r2),
                    ],
                )
                .map_err(CliError::Usage)?;
                let path = out.write("spectrum.svg", &doc)?;
                println!("wrote {}", path.display());
            }
            out.finish("spectrum")?;
            Ok(())
        }

        Cmd::Bands {
            source,
            output,
            points,
            span_hz,
        } => {
            let (p, cfg, desc) = resolve(&source)?;
            validated(&p)?;
            let formats = parse_formats(&output.format)?;
            let grid_cfg = cfg.grid;
            let points = points.or(grid_cfg.and_then(|g| g.points)).unwrap_or(2001);
            let span = match span_hz.or(grid_cfg.and_then(|g| g.span_hz)) {
                Some(hz) => TAU * hz,
                None => {
                    let edges = band_edges(&p).map_err(lib_error)?;
                    1.2 * edges.outer
                }
            };
            let grid = linear_grid(span, points)?;
            let rows = dispersion_table(&p, &grid).map_err(lib_error)?;

            let mut out = OutputDir::create(&output.out, "bands", &desc)?;
            out.record_params(&p);
            out.record("points", points.to_string());
            out.record("span_hz", format!("{:e}", span / TAU));
            if formats.csv {
                let path = out.write("bands.csv", &dispersion_csv(&rows))?;
                println!("wrote {}", path.display());
            }
            if formats.svg {
                // dispersion colored by occupation: red waveguide, green
                // optical cavity, blue mechanical
                let pts: Vec<(f64, f64)> = rows
                    .iter()
                    .map(|r| (r.bloch_kd.re, r.delta / TAU))
                    .collect();
                let fr: Vec<(f64, f64, f64)> = rows
                    .iter()
                    .map(|r| (r.f_waveguide, r.f_optical, r.f_mechanical))
                    .collect();
                let spec = PlotSpec::new(
                    "Bloch dispersion (red: waveguide, green: cavity, blue: mechanical)",
                    "Re K d (rad)",
                    "detuning/2pi (Hz)",
                );
                let doc = line_plot(&spec, &[Series::occupation_scatter("bands", pts, &fr)])
                    .map_err(CliError::Usage)?;
                let path = out.write("bands.svg", &doc)?;
                println!("wrote {}", path.display());
            }
            out.finish("bands")?;
            Ok(())
        }

        Cmd::Store {
            source,
            output,
            hold_s,
            ramp_s,
            dt_s,
            stride,
        } => {
            let (p, cfg, desc) = resolve(&source)?;
            validated(&p)?;
            let formats = parse_formats(&output.format)?;
            let store_cfg = cfg.store;
            let pulse_cfg = cfg.pulse;

            let mut pulse = PulseSpec::fitted(&p);
            if let Some(pc) = pulse_cfg {
                if let Some(hz) = pc.detuning_hz {
                    pulse.delta0 = TAU * hz;
                }
                if let Some(w) = pc.width_s {
                    pulse.width = w;
                    pulse.launch = 2.5 * w;
                }
                if let Some(a) = pc.amplitude {
                    pulse.amplitude = a;
                }
            }
            let delay = analytic_delay(&p, p.n_elements);
            let ramp = ramp_s
                .or(store_cfg.and_then(|s| s.ramp_s))
                .unwrap_or_else(|| (20.0 / p.kappa()).max(0.2 * delay));
            let hold = hold_s.or(store_cfg.and_then(|s| s.hold_s)).unwrap_or(delay);
            let proto = StorageProtocol::standard(&p, &pulse, ramp, hold);
            let dt = dt_s
                .or(store_cfg.and_then(|s| s.dt_s))
                .unwrap_or(0.02 / p.kappa());
            let sim = SimConfig::new(&p, proto.suggested_t_end)
                .with_release(proto.release_time)
                .with_dt(dt);
            let run = simulate(&p, &proto.schedule, &pulse, &sim).map_err(lib_error)?;
            let metrics = storage_metrics(&run, proto.release_time);
            let metrics = storage_metrics(&run, metrics.achieved_delay);

            let mut out = OutputDir::create(&output.out, "store", &desc)?;
            out.record_params(&p);
            out.record("pulse_width_s", format!("{:e}", pulse.width));
            out.record("pulse_detuning_hz", format!("{:e}", pulse.delta0 / TAU));
            out.record("ramp_s", format!("{ramp:e}"));
            out.record("hold_s", format!("{hold:e}"));
            out.record("dt_s", format!("{:e}", sim.dt));
            let stride = stride.unwrap_or_else(|| (run.times.len() / 20_000).max(1));
            let summary_text = format!(
                "input energy      = {:.6e}\n\
                 retrieved energy  = {:.6e}\n\
                 efficiency        = {:.6}\n\
                 fidelity          = {}\n\
                 achieved delay    = {:.6e} s\n\
                 static delay      = {:.6e} s\n\
                 ledger residual   = {:.3e}\n\
                 bandwidth warning = {}\n",
                metrics.input_energy,
                metrics.retrieved_energy,
                metrics.efficiency,
                metrics
                    .fidelity
                    .map(|f| format!("{f:.6}"))
                    .unwrap_or_else(|| "undefined (no retrieved energy)".into()),
                metrics.achieved_delay,
                delay,
                run.max_relative_residual(),
                metrics.bandwidth_flag,
            );
            print!("{summary_text}");
            if formats.csv {
                let path = out.write("store.csv", &run.to_csv(stride))?;
                println!("wrote {}", path.display());
            }
            out.write("store_metrics.txt", &summary_text)?;
            if formats.svg {
                let inp: Vec<(f64, f64)> = run
                    .times
                    .iter()
                    .zip(&run.input)
                    .step_by(stride)
                    .map(|(t, u)| (*t, u.norm_sqr()))
                    .collect();
                let tr: Vec<(f64, f64)> = run
                    .times
                    .iter()
                    .zip(&run.transmitted)
                    .step_by(stride)
                    .map(|(t, u)| (*t, u.norm_sqr()))
                    .collect();
                let spec = PlotSpec::new("storage run", "t (s)", "|u|^2 (photon flux)");
                let doc = line_plot(
                    &spec,
                    &[
                        Series::line("input", "#000000", inp),
                        Series::line("transmitted", "#cc0000", tr),
                    ],
                )
                .map_err(CliError::Usage)?;
                let path = out.write("store.svg", &doc)?;
                println!("wrote {}", path.display());
            }
            out.finish("store")?;
            Ok(())
        }

        Cmd::Noise {
            source,
            output,
            bandwidth_hz,
        } => {
            let (p, _, desc) = resolve(&source)?;
            validated(&p)?;
            let formats = parse_formats(&output.format)?;
            let report = noise_report(&p, bandwidth_hz.map(|hz| TAU * hz)).map_err(lib_error)?;
            println!("{report}");
            let mut out = OutputDir::create(&output.out, "noise", &desc)?;
            out.record_params(&p);
            if formats.csv {
                let path = out.write("noise.csv", &report.to_csv())?;
                println!("\nwrote {}", path.display());
            }
            out.write("noise_summary.txt", &format!("{report}\n"))?;
            out.finish("noise")?;
            Ok(())
        }

        Cmd::Pump {
            source,
            output,
            points,
            max_detuning_hz,
            photons,
        } => {
            let (p, cfg, desc) = resolve(&source)?;
            validated(&p)?;
            let formats = parse_formats(&output.format)?;
            let pump_cfg = cfg.pump;
            let points = points.or(pump_cfg.and_then(|c| c.points)).unwrap_or(200);
            let photons = photons
                .or(pump_cfg.and_then(|c| c.photons))
                .unwrap_or_else(|| derived_rates(&p).pump_photons);
            let grid = match max_detuning_hz.or(pump_cfg.and_then(|c| c.max_detuning_hz)) {
                None => default_pump_grid(&p, points),
                Some(hz) => {
                    let lo = 0.55 * p.kappa_ex;
                    let hi = TAU * hz;
                    if hi <= lo {
                        return Err(CliError::Usage(format!(
                            "max detuning must exceed the gap edge {:.4e} Hz",
                            lo / TAU
                        )));
                    }
                    (0..points)
                        .map(|i| lo * (hi / lo).powf(i as f64 / (points - 1).max(1) as f64))
                        .collect()
                }
            };
            let rows = pump_scan(&p, photons, &grid).map_err(lib_error)?;
            let mut out = OutputDir::create(&output.out, "pump", &desc)?;
            out.record_params(&p);
            out.record("photons", format!("{photons:e}"));
            if formats.csv {
                let path = out.write("pump.csv", &pump_csv(&rows))?;
                println!("wrote {}", path.display());
            }
            if formats.svg {
                let alpha: Vec<(f64, f64)> = rows
                    .iter()
                    .map(|r| (r.delta_p / TAU, r.alpha.max(1e-300).log10()))
                    .collect();
                let alpha_hat: Vec<(f64, f64)> = rows
                    .iter()
                    .map(|r| (r.delta_p / TAU, r.alpha_hat.max(1e-300).log10()))
                    .collect();
                let power: Vec<(f64, f64)> = rows
                    .iter()
                    .map(|r| (r.delta_p / TAU, r.p_in.max(1e-300).log10()))
                    .collect();
                let spec = PlotSpec::new(
                    "pump attenuation per cell",
                    "pump detuning/2pi (Hz)",
                    "log10 alpha",
                );
                let doc = line_plot(
                    &spec,
                    &[
                        Series::line("alpha", "#000000", alpha),
                        Series::line("alpha approx", "#888888", alpha_hat),
                    ],
                )
                .map_err(CliError::Usage)?;
                let path = out.write("pump_alpha.svg", &doc)?;
                println!("wrote {}", path.display());
                let spec = PlotSpec::new(
                    "pump input power",
                    "pump detuning/2pi (Hz)",
                    "log10 P_in (W)",
                );
                let doc = line_plot(&spec, &[Series::line("P_in", "#cc0000", power)])
                    .map_err(CliError::Usage)?;
                let path = out.write("pump_power.svg", &doc)?;
                println!("wrote {}", path.display());
            }
            out.finish("pump")?;
            Ok(())
        }

        Cmd::Optimize {
            source,
            output,
            n_min,
            n_max,
            kappa_ex_min_hz,
            kappa_ex_max_hz,
            omega_drive_min_hz,
            omega_drive_max_hz,
            points_per_decade,
            no_refine,
            emit_grid,
        } => {
            let (p, cfg, desc) = resolve(&source)?;
            validated(&p)?;
            let formats = parse_formats(&output.format)?;
            let oc = cfg.optimize;
            let defaults = Bounds::default();
            let bounds = Bounds {
                n: (
                    n_min.or(oc.and_then(|c| c.n_min)).unwrap_or(defaults.n.0),
                    n_max.or(oc.and_then(|c| c.n_max)).unwrap_or(defaults.n.1),
                ),
                kappa_ex: (
                    kappa_ex_min_hz
                        .or(oc.and_then(|c| c.kappa_ex_min_hz))
                        .map(|hz| TAU * hz)
                        .unwrap_or(defaults.kappa_ex.0),
                    kappa_ex_max_hz
                        .or(oc.and_then(|c| c.kappa_ex_max_hz))
                        .map(|hz| TAU * hz)
                        .unwrap_or(defaults.kappa_ex.1),
                ),
                omega_drive: (
                    omega_drive_min_hz
                        .or(oc.and_then(|c| c.omega_drive_min_hz))
                        .map(|hz| TAU * hz)
                        .unwrap_or(defaults.omega_drive.0),
                    omega_drive_max_hz
                        .or(oc.and_then(|c| c.omega_drive_max_hz))
                        .map(|hz| TAU * hz)
                        .unwrap_or(defaults.omega_drive.1),
                ),
            };
            let ppd = points_per_decade
                .or(oc.and_then(|c| c.points_per_decade))
                .unwrap_or(20.0);
            let refine = !no_refine && oc.and_then(|c| c.refine).unwrap_or(true);
            let opts = OptimizeOptions {
                points_per_decade: ppd,
                refine,
                rel_tol: 1e-3,
            };
            let outcome = optimize(&p, bounds, opts).map_err(lib_error)?;
            let text = summary(&outcome);
            print!("{text}");
            let mut out = OutputDir::create(&output.out, "optimize", &desc)?;
            out.record_params(&p);
            out.record("points_per_decade", format!("{ppd}"));
            out.record("refine", refine.to_string());
            out.write("optimize_summary.txt", &text)?;
            if emit_grid && formats.csv {
                let rows = evaluate_grid(&p, bounds, ppd);
                let path = out.write("optimize_grid.csv", &grid_csv(&rows))?;
                println!("wrote {}", path.display());
            }
            out.finish("optimize")?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    ExitCode::SUCCESS
                }
                _ => {
                    eprint!("{e}");
                    ExitCode::from(1)
                }
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
