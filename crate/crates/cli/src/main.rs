//! `fronttrack` — exact scalar solver checks, scenario generation, Riemann
//! solutions, batch front-tracking runs, and shock-pattern verification.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use fronttrack_cli::commands::{self, parse_state};
use fronttrack_cli::config::DatumKind;
use fronttrack_cli::config::PerturbationConfig;
use fronttrack_cli::{EXIT_INPUT_ERROR, EXIT_PASS, EXIT_TRUNCATED, EXIT_VERDICT_FAIL};
use fronttrack_core::scalar::{ConvexFlux, FluxForm};
use fronttrack_core::{PerturbKind, Verdict};

#[derive(Parser)]
#[command(name = "fronttrack", version, about = "Wave-front tracking toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact scalar conservation-law solver and regularity checks
    Scalar {
        #[command(subcommand)]
        cmd: ScalarCmd,
    },
    /// Scenario parameter packs and data files
    Scenario {
        #[command(subcommand)]
        cmd: ScenarioCmd,
    },
    /// Single Riemann problems of the 3x3 system
    Riemann {
        #[command(subcommand)]
        cmd: RiemannCmd,
    },
    /// Run front-tracking evolutions, one directory per seed
    Simulate {
        /// JSON run configuration
        #[arg(long)]
        config: PathBuf,
    },
    /// Verify the shock pattern of a finished run directory
    Analyze {
        /// Run directory written by `simulate`
        #[arg(long)]
        run: PathBuf,
        /// Override the generation requirement recorded in the run
        #[arg(long)]
        min_generations: Option<u32>,
        /// Override the decay-constant cap recorded in the run
        #[arg(long)]
        k_cap: Option<f64>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FluxArg {
    /// z²/2
    Burgers,
    /// z² (the decoupled middle field of the 3x3 system)
    Square,
    /// cosh z
    Cosh,
    /// z⁴/4 + z²/2
    Quartic,
}

#[derive(Args)]
struct FluxArgs {
    #[arg(long, value_enum, default_value_t = FluxArg::Burgers)]
    flux: FluxArg,
    /// Convexity constant override (defaults: burgers 1, square 2, else 1)
    #[arg(long)]
    c_conv: Option<f64>,
}

impl FluxArgs {
    fn build(&self) -> Result<ConvexFlux> {
        let (form, default_c) = match self.flux {
            FluxArg::Burgers => (FluxForm::Quadratic { a: 0.5, b: 0.0 }, 1.0),
            FluxArg::Square => (FluxForm::Quadratic { a: 1.0, b: 0.0 }, 2.0),
            FluxArg::Cosh => (FluxForm::Cosh, 1.0),
            FluxArg::Quartic => (FluxForm::Quartic, 1.0),
        };
        Ok(ConvexFlux::new(form, self.c_conv.unwrap_or(default_c))?)
    }
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    flux: FluxArgs,
    /// Datum JSON: {"shape": ..., "x_lo": ..., "x_hi": ...}
    #[arg(long)]
    datum: PathBuf,
    /// Sample time
    #[arg(long)]
    t: f64,
    /// Sample grid lo:hi:step, both endpoints included
    #[arg(long, default_value = "-4:4:0.02", allow_hyphen_values = true)]
    xs: String,
}

#[derive(Subcommand)]
enum ScalarCmd {
    /// Sample the entropy solution; CSV columns t,x,u,y_min
    Solve {
        #[command(flatten)]
        sample: SampleArgs,
        /// Output CSV (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One-sided Lipschitz (upper) estimate; exit 1 when violated
    CheckOleinik {
        #[command(flatten)]
        sample: SampleArgs,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Lower one-sided estimate over [a, b]; exit 1 when violated
    CheckAdl {
        #[command(flatten)]
        sample: SampleArgs,
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        b: f64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Detect shocks; CSV columns position,jump
    Census {
        #[command(flatten)]
        sample: SampleArgs,
        /// Minimum jump size (default: resolution heuristic)
        #[arg(long)]
        jump_threshold: Option<f64>,
        /// Slope separating jumps from fan gradients (default: twice the
        /// one-sided Lipschitz bound)
        #[arg(long)]
        slope_cap: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Shock-census stability under seeded smooth perturbations
    Probe {
        #[command(flatten)]
        flux: FluxArgs,
        #[arg(long)]
        datum: PathBuf,
        /// Comma-separated probe times
        #[arg(long, default_value = "1,2")]
        times: String,
        #[arg(long, default_value_t = 8)]
        trials: usize,
        #[arg(long, default_value_t = 1e-2)]
        amplitude: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Report JSON (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PerturbArg {
    /// Total-variation budget
    Bv,
    /// Sup-norm plus derivative-sup budget
    W1inf,
}

impl From<PerturbArg> for PerturbKind {
    fn from(value: PerturbArg) -> PerturbKind {
        match value {
            PerturbArg::Bv => PerturbKind::Bv,
            PerturbArg::W1inf => PerturbKind::W1Inf,
        }
    }
}

#[derive(Subcommand)]
enum ScenarioCmd {
    /// Write scenario.json and datum.csv for a parameter pack
    Gen {
        /// Small parameter in (0, 0.3]
        #[arg(long)]
        eps: f64,
        #[arg(long, value_enum, default_value_t = DatumKind::TwoJump)]
        datum: DatumKind,
        /// Perturbation norm; requires --budget
        #[arg(long, value_enum)]
        kind: Option<PerturbArg>,
        /// Perturbation size; requires --kind
        #[arg(long)]
        budget: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum RiemannCmd {
    /// Solve one Riemann problem; wave decomposition as JSON on stdout
    Solve {
        /// Coupling constant in (0, 1/4)
        #[arg(long)]
        eta: f64,
        /// Left state u,v,w
        #[arg(long, allow_hyphen_values = true)]
        left: String,
        /// Right state u,v,w
        #[arg(long, allow_hyphen_values = true)]
        right: String,
    },
}

fn run(cli: Cli) -> Result<u8> {
    match cli.cmd {
        Cmd::Scalar { cmd } => scalar(cmd),
        Cmd::Scenario {
            cmd:
                ScenarioCmd::Gen {
                    eps,
                    datum,
                    kind,
                    budget,
                    seed,
                    out,
                },
        } => {
            let perturbation = match (kind, budget) {
                (Some(kind), Some(budget)) => Some((
                    PerturbationConfig {
                        kind: kind.into(),
                        budget,
                    },
                    seed,
                )),
                (None, None) => None,
                _ => bail!("--kind and --budget must be given together"),
            };
            commands::scenario_gen(eps, datum, perturbation, &out)?;
            Ok(EXIT_PASS)
        }
        Cmd::Riemann {
            cmd: RiemannCmd::Solve { eta, left, right },
        } => {
            let output = commands::riemann_solve(eta, parse_state(&left)?, parse_state(&right)?)?;
            println!("{}", serde_json::to_string_pretty(&output)?);
            Ok(EXIT_PASS)
        }
        Cmd::Simulate { config } => {
            let outcome = commands::simulate(&config)?;
            for dir in &outcome.run_dirs {
                println!("wrote {}", dir.display());
            }
            if outcome.any_truncated {
                eprintln!("warning: at least one run stopped on its front budget");
                Ok(EXIT_TRUNCATED)
            } else {
                Ok(EXIT_PASS)
            }
        }
        Cmd::Analyze {
            run,
            min_generations,
            k_cap,
        } => {
            let report = commands::analyze(&run, min_generations, k_cap)?;
            println!(
                "verdict: {:?} (generations {}, cancellations {})",
                report.verdict, report.generations_found, report.cancellations
            );
            Ok(match report.verdict {
                Verdict::Pass => EXIT_PASS,
                Verdict::Fail => EXIT_VERDICT_FAIL,
                Verdict::Incomplete => EXIT_TRUNCATED,
            })
        }
    }
}

fn scalar(cmd: ScalarCmd) -> Result<u8> {
    match cmd {
        ScalarCmd::Solve { sample, out } => {
            let flux = sample.flux.build()?;
            commands::scalar_solve(&flux, &sample.datum, sample.t, &sample.xs, out.as_deref())?;
            Ok(EXIT_PASS)
        }
        ScalarCmd::CheckOleinik { sample, tol } => {
            let flux = sample.flux.build()?;
            let report =
                commands::scalar_check_oleinik(&flux, &sample.datum, sample.t, &sample.xs, tol)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(if report.pass { EXIT_PASS } else { EXIT_VERDICT_FAIL })
        }
        ScalarCmd::CheckAdl { sample, a, b, tol } => {
            let flux = sample.flux.build()?;
            let report =
                commands::scalar_check_adl(&flux, &sample.datum, sample.t, &sample.xs, a, b, tol)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(if report.pass { EXIT_PASS } else { EXIT_VERDICT_FAIL })
        }
        ScalarCmd::Census {
            sample,
            jump_threshold,
            slope_cap,
            out,
        } => {
            let flux = sample.flux.build()?;
            commands::scalar_census(
                &flux,
                &sample.datum,
                sample.t,
                &sample.xs,
                jump_threshold,
                slope_cap,
                out.as_deref(),
            )?;
            Ok(EXIT_PASS)
        }
        ScalarCmd::Probe {
            flux,
            datum,
            times,
            trials,
            amplitude,
            seed,
            out,
        } => {
            let flux = flux.build()?;
            let report = commands::scalar_probe(
                &flux,
                &datum,
                &times,
                trials,
                amplitude,
                seed,
                out.as_deref(),
            )?;
            Ok(if report.all_stable { EXIT_PASS } else { EXIT_VERDICT_FAIL })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(EXIT_INPUT_ERROR)
        }
    }
}
