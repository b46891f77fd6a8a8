use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hexice_core::hamiltonian::build_spin;
use hexice_core::lattice::SectorLabel;
use hexice_core::measures::{concurrence, discord_analysis, eof_from_concurrence, geometric_discord};
use hexice_core::numerics::{gibbs, partial_trace, trace_distance};
use hexice_core::open_system::{BathSpec, Liouvillian};
use hexice_core::sweep::{
    emit_csv, emit_plot_script, evaluate, parse_pairs, run_sweep, temperature_grid, validate, Fault, SweepConfig,
    ValidationDepth, DEFAULT_TMAX, DEFAULT_TMIN, DEFAULT_TSTEP,
};
use hexice_core::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_VALIDATION: u8 = 3;

/// Proton tunneling in a hexameric water ring: steady states, coherence and
/// pairwise correlations.
#[derive(Parser, Debug)]
#[command(name = "hexice", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sweep the temperature grid and write `sweep.csv` plus a plot script.
    Sweep(SweepArgs),
    /// Full diagnostics of the ice-sector steady state at one temperature.
    Measures(MeasuresArgs),
    /// Run the self-check suite.
    Validate(ValidateArgs),
}

#[derive(Args, Debug)]
struct Common {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Site pairs, e.g. `1:2,2:3`. The second site of each pair is measured.
    #[arg(long)]
    pairs: Option<String>,
    /// Include the Lamb shift in the dissipative dynamics.
    #[arg(long)]
    lamb_shift: bool,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_name = "K", allow_negative_numbers = true)]
    tmin: Option<f64>,
    #[arg(long, value_name = "K", allow_negative_numbers = true)]
    tmax: Option<f64>,
    #[arg(long, value_name = "K", allow_negative_numbers = true)]
    tstep: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct MeasuresArgs {
    #[command(flatten)]
    common: Common,
    /// Temperature in K.
    #[arg(long = "T", value_name = "K", allow_negative_numbers = true)]
    temperature: f64,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    #[command(flatten)]
    common: Common,
    /// `quick` or `full`; defaults to the config file's `depth`, else quick.
    #[arg(long)]
    depth: Option<String>,
    /// Scale the pseudo-spin hopping terms to check that the suite notices.
    #[arg(long, value_name = "FACTOR", hide = true)]
    fault_hopping_scale: Option<f64>,
}

enum Failure {
    Usage(String),
    Numerical(String),
    Validation,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidConfig(_)
            | Error::Io { .. }
            | Error::InvalidSite(_)
            | Error::RepeatedSite(_)
            | Error::InvalidParams(_)
            | Error::InvalidTemperature(_) => Failure::Usage(e.to_string()),
            other => Failure::Numerical(other.to_string()),
        }
    }
}

fn load_config(common: &Common) -> Result<SweepConfig, Failure> {
    let mut config = match &common.config {
        Some(path) => SweepConfig::from_file(path)?,
        None => SweepConfig::default(),
    };
    if let Some(p) = &common.pairs {
        config.pairs = parse_pairs(p)?;
    }
    config.lamb_shift |= common.lamb_shift;
    Ok(config)
}

fn sweep(args: &SweepArgs) -> Result<(), Failure> {
    let mut config = load_config(&args.common)?;
    if args.tmin.is_some() || args.tmax.is_some() || args.tstep.is_some() {
        let current = &config.temperatures;
        let default_step = if current.len() > 1 { current[1] - current[0] } else { DEFAULT_TSTEP };
        config.temperatures = temperature_grid(
            args.tmin.unwrap_or(current.first().copied().unwrap_or(DEFAULT_TMIN)),
            args.tmax.unwrap_or(current.last().copied().unwrap_or(DEFAULT_TMAX)),
            args.tstep.unwrap_or(default_step),
        )?;
    }
    if let Some(out) = &args.out {
        config.output_dir = out.clone();
    }
    config.validate()?;
    let records = run_sweep(&config)?;
    std::fs::create_dir_all(&config.output_dir)
        .map_err(|source| Error::Io { path: config.output_dir.clone(), source })?;
    let csv = config.output_dir.join("sweep.csv");
    emit_csv(&records, &csv)?;
    let script = config.output_dir.join("plot_sweep.py");
    emit_plot_script(Path::new("sweep.csv"), &script)?;
    println!("{} temperatures -> {}", records.len(), csv.display());
    println!("plot script -> {}", script.display());
    Ok(())
}

fn measures(args: &MeasuresArgs) -> Result<(), Failure> {
    let config = load_config(&args.common)?;
    let t = args.temperature;
    if !(t.is_finite() && t > 0.0) {
        return Err(Failure::Usage(format!("temperature {t} K must be positive and finite")));
    }
    let p = &config.params;
    let h = build_spin(p).matrix_in_sector(SectorLabel::ICE)?;
    let record = evaluate(&h, t, &config.pairs)?;
    let rho = gibbs(&h, t)?;
    let eig = rho.eigenvalues();

    println!("T = {t} K");
    println!(
        "couplings: J_x = {} meV, J_z_intra = {} meV (W = {}, V_inter = {}, lambda = {})",
        p.jx(),
        p.jz_intra(),
        p.w(),
        p.v_inter(),
        p.lambda()
    );
    println!("ice sector: dim {}, trace {:.15}, purity {:.12}", rho.dim(), rho.trace(), rho.purity());
    println!("density eigenvalues: min {:.6e}, max {:.12}", eig[0], eig[eig.len() - 1]);
    let energies = &h.eigen().values;
    println!("energy levels: {:.6} .. {:.6} meV", energies[0], energies[energies.len() - 1]);
    println!("P_BF       {:.12}", record.p_bf);
    println!("S          {:.12} bits", record.entropy_bits);
    println!("C_l1       {:.12}", record.c_l1);
    println!("C_rel      {:.12} bits", record.c_rel_bits);

    let bath = BathSpec::at_temperature(t)?;
    let l = Liouvillian::new(&h, &bath, config.lamb_shift)?;
    let stationary = l.stationary_state()?;
    println!(
        "dynamics ({} Lamb shift): |L(rho)|_max {:.3e}, stationary-state trace distance {:.3e}",
        if config.lamb_shift { "with" } else { "without" },
        l.apply(rho.matrix())?.camax(),
        trace_distance(&stationary, &rho)?
    );

    for &(a, b) in &config.pairs {
        let reduced = partial_trace(&rho, (a, b))?;
        let d = discord_analysis(&reduced)?;
        let c = concurrence(&reduced);
        println!();
        println!("pair ({a}, {b}), measurement on site {b}");
        for i in 0..4 {
            let row: Vec<String> = (0..4)
                .map(|j| {
                    let z = reduced.matrix()[(i, j)];
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            println!("  {}", row.join("  "));
        }
        println!("  concurrence        {c:.12}");
        println!("  EoF                {:.12} bits", eof_from_concurrence(c));
        println!("  discord            {:.12} bits (theta {:.6}, phi {:.6})", d.discord, d.theta, d.phi);
        println!("  geometric discord  {:.12}", geometric_discord(&reduced));
        println!("  mutual information {:.12} bits", d.mutual_information);
        println!("  classical J        {:.12} bits", d.classical);
    }
    Ok(())
}

fn run_validate(args: &ValidateArgs) -> Result<(), Failure> {
    let config = load_config(&args.common)?;
    let depth: ValidationDepth = match &args.depth {
        Some(d) => d.parse()?,
        None => config.depth,
    };
    let report = validate(&config.params, depth, args.fault_hopping_scale.map(Fault::HoppingScale))?;
    println!("{report}");
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Validation)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Sweep(args) => sweep(args),
        Command::Measures(args) => measures(args),
        Command::Validate(args) => run_validate(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(EXIT_NUMERICAL)
        }
        Err(Failure::Validation) => {
            eprintln!("validation failed");
            ExitCode::from(EXIT_VALIDATION)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sweep_overrides() {
        let cli = Cli::try_parse_from(["hexice", "sweep", "--tmin", "5", "--pairs", "1:2", "--lamb-shift"]).unwrap();
        match cli.command {
            Command::Sweep(a) => {
                assert_eq!(a.tmin, Some(5.0));
                assert!(a.common.lamb_shift);
            }
            _ => panic!("expected sweep"),
        }
    }

    #[test]
    fn measures_requires_temperature() {
        assert!(Cli::try_parse_from(["hexice", "measures"]).is_err());
        assert!(Cli::try_parse_from(["hexice", "measures", "--T", "20"]).is_ok());
    }

    #[test]
    fn config_errors_are_usage_errors() {
        assert!(matches!(Failure::from(Error::InvalidConfig("x".into())), Failure::Usage(_)));
        assert!(matches!(Failure::from(Error::NonFiniteSpectrum), Failure::Numerical(_)));
    }
}
