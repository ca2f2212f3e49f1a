//! `wqed`: sweeps over the waveguide QED library, written as CSV plus a JSON sidecar.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use wqed_core::boundstate::{solve_bound_state, BoundStateResult};
use wqed_core::config::ConfigDocument;
use wqed_core::dynamics::{chevron_map, emission_prefactor};
use wqed_core::greens::{
    hopping_for_mass, lattice_g0, lattice_g0_broadband, lattice_i, GreensProvider, LatticeSpec, ProviderKind,
};
use wqed_core::interaction::{avoided_crossing_map, j_linear, solve_pair_determinant};
use wqed_core::model::{ghz, mhz, to_ghz, to_mhz, SystemSpec};
use wqed_core::purcell::{purcell_finite, purcell_infinite, purcell_single_mode};
use wqed_core::scattering::{s_rl_spectrum, uniform_grid};

use output::{fmt_float, Run};

#[derive(Debug, Parser)]
#[command(name = "wqed", version, about = "Qubits in a finite waveguide below and above cutoff")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// JSON configuration (GHz, MHz, mm).
    #[arg(long)]
    config: PathBuf,
    /// CSV output path; the sidecar is written next to it with a `.json` extension.
    #[arg(long, short)]
    output: PathBuf,
    /// Green's function: pole, truncated:N, long, single-mode, lattice:N.
    #[arg(long, default_value = "pole")]
    provider: String,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// |S_RL|^2 over a frequency sweep.
    Transmission {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        fmin: f64,
        #[arg(long)]
        fmax: f64,
        #[arg(long, default_value_t = 2001)]
        points: usize,
    },
    /// Bound state of one qubit while its bare frequency is swept.
    Boundstate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        wq_min: f64,
        #[arg(long)]
        wq_max: f64,
        #[arg(long, default_value_t = 200)]
        points: usize,
        #[arg(long, default_value_t = 0)]
        qubit: usize,
    },
    /// Transmission map over the second qubit's frequency, with the extracted splitting.
    AvoidedCrossing {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        wq2_min: f64,
        #[arg(long)]
        wq2_max: f64,
        #[arg(long, default_value_t = 41)]
        wq2_points: usize,
        #[arg(long)]
        fmin: f64,
        #[arg(long)]
        fmax: f64,
        #[arg(long, default_value_t = 801)]
        points: usize,
    },
    /// Radiative decay of a bound state versus its frequency.
    Purcell {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        wb_min: f64,
        #[arg(long)]
        wb_max: f64,
        #[arg(long, default_value_t = 200)]
        points: usize,
        /// Mode count of the truncated comparison.
        #[arg(long, default_value_t = 100)]
        modes: usize,
        #[arg(long, default_value_t = 0)]
        qubit: usize,
    },
    /// Pulsed drive of the bound state: emission versus detuning and time.
    Rabi {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        rabi_mhz: f64,
        #[arg(long)]
        pulse_us: f64,
        /// Half-width of the detuning sweep.
        #[arg(long, default_value_t = 20.0)]
        span_mhz: f64,
        #[arg(long, default_value_t = 41)]
        detunings: usize,
        #[arg(long)]
        t_max_us: f64,
        #[arg(long, default_value_t = 401)]
        times: usize,
        #[arg(long, default_value_t = 0)]
        qubit: usize,
    },
    /// Tight-binding chain propagator from one site to all others.
    Lattice {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, short)]
        output: PathBuf,
        #[arg(long, default_value_t = 200)]
        sites: usize,
        /// Defaults to the hopping matching the waveguide's effective mass.
        #[arg(long)]
        hopping_mhz: Option<f64>,
        /// Distance below the band bottom.
        #[arg(long)]
        delta_mhz: f64,
        /// Source site (1-based); defaults to the middle of the chain.
        #[arg(long)]
        site: Option<usize>,
    },
}

#[derive(Debug)]
enum Failure {
    /// Unreadable or invalid input; exit status 1.
    Config(String),
    /// A computation failed; exit status 2.
    Numerical {
        operation: String,
        error: wqed_core::Error,
    },
}

impl Failure {
    fn numerical(operation: impl Into<String>) -> impl FnOnce(wqed_core::Error) -> Failure {
        let operation = operation.into();
        move |error| {
            if error.is_config() {
                Failure::Config(error.to_string())
            } else {
                Failure::Numerical { operation, error }
            }
        }
    }
}

impl From<wqed_core::Error> for Failure {
    fn from(e: wqed_core::Error) -> Self {
        Failure::Config(e.to_string())
    }
}

type CliResult<T> = Result<T, Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(1);
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Numerical { operation, error }) => {
            eprintln!("error: {operation} failed: {error}");
            ExitCode::from(2)
        }
    }
}

/// `WQED_THREADS` caps the worker pool; all cores otherwise.
fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("WQED_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| format!("WQED_THREADS must be a positive integer, got `{raw}`"))?;
    if n == 0 {
        return Err("WQED_THREADS must be at least 1".into());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn provider_for(sys: &SystemSpec, name: &str) -> CliResult<(ProviderKind, Box<dyn GreensProvider>)> {
    let kind: ProviderKind = name.parse().map_err(|e: wqed_core::Error| Failure::Config(e.to_string()))?;
    let p = kind.build(&sys.waveguide).map_err(|e| Failure::Config(e.to_string()))?;
    Ok((kind, p))
}

fn grid(min: f64, max: f64, n: usize, what: &str) -> CliResult<Vec<f64>> {
    uniform_grid(min, max, n).map_err(|e| Failure::Config(format!("--{what}: {e}")))
}

fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Transmission {
            common,
            fmin,
            fmax,
            points,
        } => {
            let run = Run::load(&common.config, &common.output, "transmission")?;
            let (kind, p) = provider_for(&run.system, &common.provider)?;
            grid(fmin, fmax, points, "fmin/--fmax")?;
            let spec = s_rl_spectrum(&run.system, p.as_ref(), fmin, fmax, points)
                .map_err(Failure::numerical("transmission sweep"))?;
            let rows = (0..spec.len()).map(|i| {
                let s = spec.values[i];
                vec![spec.f_ghz[i], s.re, s.im, s.norm_sqr(), 10.0 * s.norm_sqr().log10()]
            });
            let failed: Vec<Value> = spec
                .failures
                .iter()
                .zip(&spec.f_ghz)
                .filter_map(|(f, g)| f.as_ref().map(|m| json!({"f_GHz": g, "error": m})))
                .collect();
            let n_failed = failed.len();
            run.write(
                &["f_GHz", "re_S", "im_S", "abs_S2", "abs_S_dB"],
                rows,
                json!({"provider": kind.to_string(), "fmin_GHz": fmin, "fmax_GHz": fmax, "points": points}),
                json!({"failed_points": failed}),
            )?;
            if n_failed > 0 {
                return Err(Failure::Numerical {
                    operation: "S_RL".into(),
                    error: wqed_core::Error::Singular(format!("{n_failed} of {points} frequencies failed; see sidecar")),
                });
            }
            Ok(())
        }

        Command::Boundstate {
            common,
            wq_min,
            wq_max,
            points,
            qubit,
        } => {
            let run = Run::load(&common.config, &common.output, "boundstate")?;
            let (kind, p) = provider_for(&run.system, &common.provider)?;
            run.system.qubit(qubit)?;
            let wqs = grid(wq_min, wq_max, points, "wq-min/--wq-max")?;
            let mut rows = Vec::with_capacity(points);
            for &wq in &wqs {
                let mut sys = run.system.clone();
                sys.qubits[qubit].omega_q = ghz(wq);
                let b = solve_bound_state(&sys, p.as_ref(), qubit)
                    .map_err(Failure::numerical(format!("bound state at wq = {wq} GHz")))?;
                rows.push(vec![wq, to_ghz(b.omega_b), b.weight, to_mhz(b.gamma_b), b.amplitude, b.xi * 1e3]);
            }
            run.write(
                &["wq_GHz", "wb_GHz", "Z", "Gamma_b_MHz", "A", "xi_mm"],
                rows.into_iter(),
                json!({"provider": kind.to_string(), "wq_min_GHz": wq_min, "wq_max_GHz": wq_max,
                       "points": points, "qubit": qubit}),
                Value::Null,
            )
        }

        Command::AvoidedCrossing {
            common,
            wq2_min,
            wq2_max,
            wq2_points,
            fmin,
            fmax,
            points,
        } => {
            let run = Run::load(&common.config, &common.output, "avoided-crossing")?;
            if run.system.qubits.len() != 2 {
                return Err(Failure::Config(format!(
                    "avoided-crossing needs two qubits, the config has {}",
                    run.system.qubits.len()
                )));
            }
            let (kind, p) = provider_for(&run.system, &common.provider)?;
            let wq2 = grid(wq2_min, wq2_max, wq2_points, "wq2-min/--wq2-max")?;
            let f = grid(fmin, fmax, points, "fmin/--fmax")?;
            let map = avoided_crossing_map(
                &run.system,
                p.as_ref(),
                &wq2.iter().map(|&x| ghz(x)).collect::<Vec<_>>(),
                &f.iter().map(|&x| ghz(x)).collect::<Vec<_>>(),
            )
            .map_err(Failure::numerical("avoided-crossing map"))?;

            let mut header = vec!["f_GHz".to_string()];
            header.extend(wq2.iter().map(|w| format!("abs_S2@wq2_GHz={}", fmt_float(*w))));
            let rows = f.iter().zip(&map.power).map(|(fi, row)| {
                let mut r = vec![*fi];
                r.extend(row);
                r
            });

            let pair = solve_pair_determinant(&run.system, p.as_ref()).ok();
            let linear = pair.and_then(|d| j_linear(&run.system, p.as_ref(), d.omega_bar_b).ok());
            let summary = json!({
                "splitting_MHz": map.splitting.map(to_mhz),
                "splitting_wq2_GHz": map.splitting_column.map(|j| wq2[j]),
                "pair_mean_GHz": pair.map(|d| to_ghz(d.omega_bar_b)),
                "pair_splitting_MHz": pair.map(|d| to_mhz(d.delta)),
                "J_linear_MHz": linear.map(|j| to_mhz(j.delta)),
            });
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            run.write(
                &header,
                rows,
                json!({"provider": kind.to_string(), "wq2_min_GHz": wq2_min, "wq2_max_GHz": wq2_max,
                       "wq2_points": wq2_points, "fmin_GHz": fmin, "fmax_GHz": fmax, "points": points}),
                summary,
            )
        }

        Command::Purcell {
            common,
            wb_min,
            wb_max,
            points,
            modes,
            qubit,
        } => {
            let run = Run::load(&common.config, &common.output, "purcell")?;
            let (kind, p) = provider_for(&run.system, &common.provider)?;
            run.system.qubit(qubit)?;
            if modes < 1 {
                return Err(Failure::Config("--modes must be at least 1".into()));
            }
            let wbs = grid(wb_min, wb_max, points, "wb-min/--wb-max")?;
            let mut rows = Vec::with_capacity(points);
            for &wb in &wbs {
                let w = ghz(wb);
                let op = |what: &str| Failure::numerical(format!("{what} Purcell rate at wb = {wb} GHz"));
                let all = purcell_infinite(&run.system, p.as_ref(), qubit, w).map_err(op("provider"))?;
                let some = purcell_finite(&run.system, qubit, w, modes).map_err(op("truncated"))?;
                let one = purcell_single_mode(&run.system, qubit, w, true).map_err(op("single-mode"))?;
                rows.push(vec![
                    wb,
                    all.weight,
                    to_mhz(all.gamma_r),
                    to_mhz(some.gamma_r),
                    to_mhz(one.result.gamma_r),
                ]);
            }
            run.write(
                &["wb_GHz", "Z", "Gamma_r_MHz", "Gamma_r_N_MHz", "Gamma_r_single_MHz"],
                rows.into_iter(),
                json!({"provider": kind.to_string(), "wb_min_GHz": wb_min, "wb_max_GHz": wb_max,
                       "points": points, "modes": modes, "qubit": qubit}),
                Value::Null,
            )
        }

        Command::Rabi {
            common,
            rabi_mhz,
            pulse_us,
            span_mhz,
            detunings,
            t_max_us,
            times,
            qubit,
        } => {
            let run = Run::load(&common.config, &common.output, "rabi")?;
            let (kind, p) = provider_for(&run.system, &common.provider)?;
            run.system.qubit(qubit)?;
            let b: BoundStateResult =
                solve_bound_state(&run.system, p.as_ref(), qubit).map_err(Failure::numerical("bound state"))?;
            let offsets = grid(-span_mhz, span_mhz, detunings, "span-mhz")?;
            let t_us = grid(0.0, t_max_us, times, "t-max-us")?;
            let drives: Vec<f64> = offsets.iter().map(|&d| b.omega_b + mhz(d)).collect();
            let t: Vec<f64> = t_us.iter().map(|x| x * 1e-6).collect();
            let map = chevron_map(&b, mhz(rabi_mhz), pulse_us * 1e-6, &drives, &t)
                .map_err(Failure::numerical("chevron map"))?;
            let prefactor = emission_prefactor(&run.system, p.as_ref(), qubit, b.omega_b)
                .map_err(Failure::numerical("emission prefactor"))?;
            let rows = offsets.iter().zip(&map.emission).flat_map(|(d, col)| {
                t_us.iter().zip(col).map(move |(tk, e)| vec![*d, *tk, *e])
            });
            run.write(
                &["delta_MHz", "t_us", "abs_sigma_minus"],
                rows,
                json!({"provider": kind.to_string(), "rabi_MHz": rabi_mhz, "pulse_us": pulse_us,
                       "span_MHz": span_mhz, "detunings": detunings, "t_max_us": t_max_us,
                       "times": times, "qubit": qubit}),
                json!({"wb_GHz": to_ghz(b.omega_b), "Gamma_b_MHz": to_mhz(b.gamma_b), "Z": b.weight,
                       "emission_prefactor_sqrt_Hz": prefactor}),
            )
        }

        Command::Lattice {
            config,
            output,
            sites,
            hopping_mhz,
            delta_mhz,
            site,
        } => {
            let run = Run::load(&config, &output, "lattice")?;
            let wg = run.system.waveguide;
            let a = wg.length / (sites as f64 + 1.0);
            let t = hopping_mhz.map(mhz).unwrap_or_else(|| hopping_for_mass(wg.omega_c, wg.speed_c, a));
            let lat = LatticeSpec::new(sites, t, a, wg.omega_c)?.with_eta(0.0)?;
            let source = site.unwrap_or(sites.div_ceil(2));
            if source < 1 || source > sites {
                return Err(Failure::Config(format!("--site must lie in 1..={sites}, got {source}")));
            }
            let delta = mhz(delta_mhz);
            let op = |n: usize| Failure::numerical(format!("lattice propagator at site {n}"));
            let mut rows = Vec::with_capacity(sites);
            for n in 1..=sites {
                let g = lattice_g0(&lat, source, n, wg.omega_c - delta).map_err(op(n))?;
                let near = lattice_i(&lat, source.abs_diff(n) as u32, delta).map_err(op(n))?;
                let image = lattice_i(&lat, (source + n) as u32, delta).map_err(op(n))?;
                let broad = lattice_g0_broadband(&lat, source, n, delta).map_err(op(n))?;
                let mut row = vec![n.to_string()];
                row.extend([g.re, near - image, broad].map(fmt_float));
                rows.push(row);
            }
            run.write_cells(
                &["site", "G0_s_per_m", "image_pair_s_per_m", "broadband_s_per_m"],
                rows.into_iter(),
                json!({"sites": sites, "hopping_MHz": to_mhz(t), "spacing_mm": a * 1e3,
                       "delta_MHz": delta_mhz, "site": source}),
                Value::Null,
            )
        }
    }
}

impl Run {
    fn load(config: &std::path::Path, output: &std::path::Path, subcommand: &'static str) -> CliResult<Run> {
        let text = std::fs::read(config)
            .map_err(|e| Failure::Config(format!("cannot read config {}: {e}", config.display())))?;
        let text = String::from_utf8(text)
            .map_err(|_| Failure::Config(format!("config {} is not UTF-8", config.display())))?;
        let document = ConfigDocument::parse(&text)?;
        let system = document.to_system()?;
        Ok(Run::new(subcommand, &text, document, system, output))
    }
}
