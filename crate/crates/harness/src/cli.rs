//! Command-line interface.

use std::path::PathBuf;

use arp_core::dressed::{dressed_grid, dressed_trajectory};
use arp_core::pulse::stretcher_gdd;
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::config::{DressedConfig, DotParams, Propagator, PulseParams, SweepConfig};
use crate::error::{HarnessError, Result};
use crate::export::{self, Format};
use crate::preset::{preset, Preset, PRESET_NAMES};
use crate::sweep::run_sweep;

#[derive(Parser, Debug)]
#[command(
    name = "arpsim",
    version,
    about = "Chirped-pulse biexciton preparation simulator for a three-level quantum dot"
)]
struct Cli {
    /// Directory for output files.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    /// Worker thread count (default: SIM_WORKERS or all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output format for data files.
    #[arg(long, global = true, value_enum, default_value_t = CliFormat::Csv)]
    format: CliFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum CliFormat {
    Csv,
    Json,
}

impl From<CliFormat> for Format {
    fn from(f: CliFormat) -> Format {
        match f {
            CliFormat::Csv => Format::Csv,
            CliFormat::Json => Format::Json,
        }
    }
}

#[derive(Args, Debug, Clone)]
struct PulseArgs {
    /// Nominal pulse area, multiples of pi.
    #[arg(long, default_value_t = 20.0)]
    theta_pi: f64,
    /// Transform-limited envelope standard deviation, ps.
    #[arg(long, default_value_t = 1.62)]
    sigma0: f64,
    /// Group delay dispersion, ps².
    #[arg(long, default_value_t = 40.0)]
    gdd: f64,
    /// Detuning from the two-photon resonance, meV.
    #[arg(long, default_value_t = 0.0)]
    detuning: f64,
}

impl PulseArgs {
    fn params(&self) -> PulseParams {
        PulseParams {
            theta_pi: self.theta_pi,
            sigma0_ps: self.sigma0,
            gdd_ps2: self.gdd,
            detuning_mev: self.detuning,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum CliPropagator {
    Unitary,
    Hierarchy,
    Rates,
    Fewmode,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the derived quantities of a chirped pulse.
    Pulse {
        #[command(flatten)]
        pulse: PulseArgs,
    },
    /// Group delay dispersion of a folded single-grating stretcher.
    Stretcher {
        /// Central wavelength, m.
        #[arg(long)]
        lambda: f64,
        /// Lens focal length, m.
        #[arg(long)]
        f: f64,
        /// Grating-lens distance, m.
        #[arg(long)]
        s: f64,
        /// Groove density, lines per m.
        #[arg(long)]
        grooves: f64,
        /// Angle of incidence, degrees.
        #[arg(long)]
        aoi: f64,
    },
    /// Export dressed-state trajectories (energies, compositions, events).
    Dressed {
        /// Preset name (dressed_fig5, dressed_fig6, dressed_fig7).
        #[arg(long, conflicts_with_all = ["theta_pi", "sigma0", "gdd", "detuning"])]
        preset: Option<String>,
        #[command(flatten)]
        pulse: PulseArgs,
        /// Biexciton binding energy, meV.
        #[arg(long, default_value_t = 4.0)]
        binding: f64,
        /// Number of grid points over the pulse support.
        #[arg(long, default_value_t = 4001)]
        points: usize,
        /// Output file stem.
        #[arg(long)]
        stem: Option<String>,
        /// Keep every n-th sample in the export.
        #[arg(long, default_value_t = 1)]
        stride: usize,
    },
    /// Propagate a single pulse and export the occupation trajectory.
    Propagate {
        #[command(flatten)]
        pulse: PulseArgs,
        #[arg(long, value_enum, default_value_t = CliPropagator::Hierarchy)]
        propagator: CliPropagator,
        /// Biexciton binding energy, meV.
        #[arg(long, default_value_t = 4.0)]
        binding: f64,
        /// Bath temperature, K.
        #[arg(long, default_value_t = 1.0)]
        temperature: f64,
        /// Number of discretized bath modes.
        #[arg(long, default_value_t = 128)]
        n_modes: usize,
        /// Bath discretization cutoff, meV.
        #[arg(long, default_value_t = 6.0)]
        omega_max: f64,
        /// Explicit mode list "energy_mev:coupling_per_ps,..." (fewmode).
        #[arg(long)]
        modes: Option<String>,
        /// Maximum phonon quanta per explicit mode (fewmode).
        #[arg(long, default_value_t = 4)]
        n_max: usize,
        /// Integrator step, ps (default: resolution-based).
        #[arg(long)]
        dt: Option<f64>,
        /// Keep every n-th sample in the export.
        #[arg(long, default_value_t = 10)]
        stride: usize,
        /// Output file stem.
        #[arg(long, default_value = "trajectory")]
        stem: String,
    },
    /// Run a parameter sweep from a preset or a JSON config file.
    Sweep {
        #[arg(long, conflicts_with = "config")]
        preset: Option<String>,
        /// JSON file with a sweep configuration.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override the output file stem.
        #[arg(long)]
        stem: Option<String>,
    },
    /// List the available presets.
    Presets,
}

/// Entry point; returns the process exit code (0 success, 1 configuration or
/// usage error, 2 runtime failure).
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    0
                }
                _ => {
                    eprint!("{e}");
                    1
                }
            };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn effective_workers(flag: Option<usize>) -> Option<usize> {
    flag.or_else(|| {
        std::env::var("SIM_WORKERS").ok().and_then(|v| v.parse::<usize>().ok())
    })
}

fn run(cli: Cli) -> Result<()> {
    let format: Format = cli.format.into();
    let out_dir = &cli.out_dir;
    match cli.command {
        Command::Pulse { pulse } => {
            let p = pulse.params().build()?;
            let doc = json!({
                "theta_nominal_pi": p.theta_nominal / std::f64::consts::PI,
                "sigma0_ps": p.sigma0,
                "gdd_ps2": p.gdd,
                "detuning_mev": p.detuning,
                "sigma_ps": p.sigma,
                "tau0_fwhm_ps": p.tau0(),
                "tau_p_fwhm_ps": p.tau_p(),
                "chirp_rate_rad_ps2": p.chirp_rate,
                "theta_effective_pi": p.theta_effective / std::f64::consts::PI,
                "peak_rabi_rad_ps": p.peak_rabi(),
            });
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
        }
        Command::Stretcher { lambda, f, s, grooves, aoi } => {
            let gdd: f64 =
                stretcher_gdd(lambda * 1e9, f * 1e3, s * 1e3, grooves * 1e-3, aoi)?;
            println!("{gdd:.4} ps^2");
        }
        Command::Dressed { preset: name, pulse, binding, points, stem, stride } => {
            let config = match name {
                Some(name) => match preset(&name)? {
                    Preset::Dressed(c) => c,
                    Preset::Sweep(_) => {
                        return Err(HarnessError::config(format!(
                            "{name} is a sweep preset; use `arpsim sweep --preset {name}`"
                        )))
                    }
                },
                None => DressedConfig {
                    pulse: pulse.params(),
                    dot: DotParams { binding_energy_mev: binding },
                    detunings_mev: vec![pulse.detuning],
                    grid_points: points,
                    output_stem: "dressed".to_string(),
                },
            };
            let mut config = config;
            if let Some(stem) = stem {
                config.output_stem = stem;
            }
            config.validate()?;
            let dot = config.dot.build()?;
            let mut series = Vec::new();
            for &delta in &config.detunings_mev {
                let mut pp = config.pulse;
                pp.detuning_mev = delta;
                let p = pp.build()?;
                let grid = dressed_grid(&p, config.grid_points);
                let traj = dressed_trajectory(&dot, &p, &grid)?;
                series.push((format!("delta_{delta}"), traj));
            }
            let path = export::export_dressed(&series, &config, out_dir, format, stride)?;
            eprintln!("wrote {}", path.display());
        }
        Command::Propagate {
            pulse,
            propagator,
            binding,
            temperature,
            n_modes,
            omega_max,
            modes,
            n_max,
            dt,
            stride,
            stem,
        } => {
            let prop = match propagator {
                CliPropagator::Unitary => Propagator::Unitary,
                CliPropagator::Hierarchy => Propagator::Hierarchy,
                CliPropagator::Rates => Propagator::DressedRates,
                CliPropagator::Fewmode => Propagator::FewMode {
                    modes: parse_modes(modes.as_deref().ok_or_else(|| {
                        HarnessError::config("fewmode needs --modes energy:coupling,...")
                    })?)?,
                    n_max,
                },
            };
            let mut config = single_point_config(&pulse, binding, temperature, n_modes, omega_max, prop, dt);
            config.output_stem = stem;
            config.validate()?;
            let point = crate::sweep::ResolvedPoint {
                series: 0,
                i1: 0,
                i2: 0,
                pulse: config.pulse.build()?,
                dot: config.dot.build()?,
                bath: config.bath.build()?,
                propagator: config.propagator.clone(),
                dt_ps: config.dt_ps,
            };
            let traj = crate::sweep::evaluate_trajectory(&point)?;
            let path = export::export_trajectory(
                &traj,
                &config,
                &config.output_stem,
                out_dir,
                format,
                stride,
            )?;
            println!(
                "final populations: Pg = {:.6}, Px = {:.6}, Pxx = {:.6}",
                traj.final_populations[0], traj.final_populations[1], traj.final_populations[2]
            );
            eprintln!("wrote {}", path.display());
        }
        Command::Sweep { preset: name, config, stem } => {
            let mut sweep_config = match (name, config) {
                (Some(name), None) => match preset(&name)? {
                    Preset::Sweep(c) => c,
                    Preset::Dressed(_) => {
                        return Err(HarnessError::config(format!(
                            "{name} is a dressed preset; use `arpsim dressed --preset {name}`"
                        )))
                    }
                },
                (None, Some(path)) => {
                    let text = std::fs::read_to_string(&path).map_err(|e| {
                        HarnessError::config(format!("cannot read {}: {e}", path.display()))
                    })?;
                    serde_json::from_str::<SweepConfig>(&text)
                        .map_err(|e| HarnessError::config(format!("{}: {e}", path.display())))?
                }
                _ => {
                    return Err(HarnessError::config(
                        "sweep needs exactly one of --preset or --config",
                    ))
                }
            };
            if let Some(stem) = stem {
                sweep_config.output_stem = stem;
            }
            if let Some(w) = effective_workers(cli.workers) {
                sweep_config.workers = Some(w);
            }
            let result = run_sweep(&sweep_config)?;
            let path = export::export_sweep(&result, out_dir, format)?;
            eprintln!(
                "wrote {} ({} points, {} failed, {} ms)",
                path.display(),
                result.points.len(),
                result.n_failed(),
                result.wall_ms
            );
        }
        Command::Presets => {
            for name in PRESET_NAMES {
                let kind = match preset(name)? {
                    Preset::Sweep(_) => "sweep",
                    Preset::Dressed(_) => "dressed",
                };
                println!("{name} ({kind})");
            }
        }
    }
    Ok(())
}

fn single_point_config(
    pulse: &PulseArgs,
    binding: f64,
    temperature: f64,
    n_modes: usize,
    omega_max: f64,
    propagator: Propagator,
    dt: Option<f64>,
) -> SweepConfig {
    use crate::config::{AxisSpec, BathParams, SweepParam};
    SweepConfig {
        axes: vec![AxisSpec {
            param: SweepParam::Detuning,
            min: pulse.detuning,
            max: pulse.detuning,
            steps: 1,
        }],
        series: Vec::new(),
        pulse: pulse.params(),
        dot: DotParams { binding_energy_mev: binding },
        bath: BathParams {
            temperature_k: temperature,
            n_modes,
            omega_max_mev: omega_max,
            ..Default::default()
        },
        propagator,
        dt_ps: dt,
        output_stem: "trajectory".to_string(),
        workers: None,
    }
}

fn parse_modes(text: &str) -> Result<Vec<(f64, f64)>> {
    text.split(',')
        .map(|entry| {
            let (e, g) = entry
                .split_once(':')
                .ok_or_else(|| HarnessError::config(format!("bad mode entry {entry:?}")))?;
            let parse = |v: &str| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| HarnessError::config(format!("bad number {v:?} in --modes")))
            };
            Ok((parse(e)?, parse(g)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_list_parsing() {
        assert_eq!(parse_modes("0.8:0.05,1.2:0.06").unwrap(), vec![(0.8, 0.05), (1.2, 0.06)]);
        assert!(parse_modes("0.8;0.05").is_err());
        assert!(parse_modes("a:b").is_err());
    }
}
