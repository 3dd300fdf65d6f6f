//! Command implementations. Each function does the work of one subcommand
//! and returns the data `main` needs to pick an exit code; no function here
//! calls `exit` or prints usage.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use fronttrack_core::scalar::{
    check_adl_lower, check_oleinik, default_jump_threshold, default_slope_cap, lax_oleinik_solve,
    schaeffer_probe, shock_census, AdlReport, ConvexFlux, OleinikReport, ProbeReport,
    ProfileShape, ScalarProfile, ShockDetection,
};
use fronttrack_core::tracking::FtParams;
use fronttrack_core::{
    evolve, perturb, solve_riemann, verify_pattern, wave_curve, DatumSpec, FtSolution,
    PatternReport, ScenarioParams, State, SystemParams, Wave,
};

use crate::config::{build_datum_of_kind, DatumKind, PerturbationConfig, RunConfig};
use crate::io;

// ---------------------------------------------------------------------------
// argument micro-formats
// ---------------------------------------------------------------------------

/// Parses a sample grid given as `lo:hi:step` (both endpoints included).
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [lo, hi, step] = parts.as_slice() else {
        bail!("grid must be lo:hi:step, got {spec:?}");
    };
    let (lo, hi, step): (f64, f64, f64) = (lo.parse()?, hi.parse()?, step.parse()?);
    if !(step > 0.0) || !(hi > lo) {
        bail!("grid needs hi > lo and step > 0, got {spec:?}");
    }
    let n = ((hi - lo) / step).round() as usize;
    let mut xs: Vec<f64> = (0..=n)
        .map(|i| lo + step * i as f64)
        .take_while(|&x| x <= hi + 1e-9 * step)
        .collect();
    xs.dedup();
    Ok(xs)
}

/// Parses a state given as `u,v,w`.
pub fn parse_state(spec: &str) -> Result<State> {
    let parts: Vec<&str> = spec.split(',').collect();
    let [u, v, w] = parts.as_slice() else {
        bail!("state must be u,v,w, got {spec:?}");
    };
    Ok(State::new(u.parse()?, v.parse()?, w.parse()?))
}

/// Parses a comma-separated list of times.
pub fn parse_times(spec: &str) -> Result<Vec<f64>> {
    spec.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(Into::into))
        .collect()
}

// ---------------------------------------------------------------------------
// scalar
// ---------------------------------------------------------------------------

/// Datum file for the scalar commands: the profile shape plus the working
/// interval the solver certifies on.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScalarDatumFile {
    pub shape: ProfileShape,
    pub x_lo: f64,
    pub x_hi: f64,
}

pub fn load_profile(path: &Path) -> Result<ScalarProfile> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading datum {}", path.display()))?;
    let datum: ScalarDatumFile = serde_json::from_str(&text)
        .with_context(|| format!("malformed datum {}", path.display()))?;
    Ok(ScalarProfile::new(datum.shape, datum.x_lo, datum.x_hi)?)
}

fn scalar_sample(
    flux: &ConvexFlux,
    datum: &Path,
    t: f64,
    xs: &str,
) -> Result<fronttrack_core::scalar::ScalarSolutionSample> {
    let profile = load_profile(datum)?;
    let grid = parse_grid(xs)?;
    Ok(lax_oleinik_solve(flux, &profile, t, &grid)?)
}

/// `scalar solve`: sample the entropy solution on a grid, CSV to `out` or
/// stdout.
pub fn scalar_solve(
    flux: &ConvexFlux,
    datum: &Path,
    t: f64,
    xs: &str,
    out: Option<&Path>,
) -> Result<()> {
    let sample = scalar_sample(flux, datum, t, xs)?;
    match out {
        Some(path) => io::write_scalar_csv(path, &sample)?,
        None => io::write_scalar_rows(&mut std::io::stdout().lock(), &sample)?,
    }
    Ok(())
}

/// `scalar check-oleinik`: one-sided Lipschitz estimate on the sampled
/// solution.
pub fn scalar_check_oleinik(
    flux: &ConvexFlux,
    datum: &Path,
    t: f64,
    xs: &str,
    tol: f64,
) -> Result<OleinikReport> {
    let sample = scalar_sample(flux, datum, t, xs)?;
    Ok(check_oleinik(&sample, flux, tol))
}

/// `scalar check-adl`: lower one-sided estimate over `[a, b]`.
#[allow(clippy::too_many_arguments)]
pub fn scalar_check_adl(
    flux: &ConvexFlux,
    datum: &Path,
    t: f64,
    xs: &str,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<AdlReport> {
    let sample = scalar_sample(flux, datum, t, xs)?;
    Ok(check_adl_lower(&sample, flux, a, b, tol)?)
}

/// `scalar census`: shock detections, CSV to `out` or stdout.
pub fn scalar_census(
    flux: &ConvexFlux,
    datum: &Path,
    t: f64,
    xs: &str,
    jump_threshold: Option<f64>,
    slope_cap: Option<f64>,
    out: Option<&Path>,
) -> Result<Vec<ShockDetection>> {
    let sample = scalar_sample(flux, datum, t, xs)?;
    let threshold = jump_threshold.unwrap_or_else(|| default_jump_threshold(&sample, flux));
    let cap = slope_cap.unwrap_or_else(|| default_slope_cap(flux, t));
    let census = shock_census(&sample, threshold, cap);
    match out {
        Some(path) => {
            let mut w = std::io::BufWriter::new(
                fs::File::create(path).with_context(|| format!("creating {}", path.display()))?,
            );
            io::write_census_rows(&mut w, &census)?;
        }
        None => io::write_census_rows(&mut std::io::stdout().lock(), &census)?,
    }
    Ok(census)
}

/// `scalar probe`: stability of the shock census under seeded smooth
/// perturbations; report JSON to `out` or stdout.
pub fn scalar_probe(
    flux: &ConvexFlux,
    datum: &Path,
    times: &str,
    trials: usize,
    amplitude: f64,
    seed: u64,
    out: Option<&Path>,
) -> Result<ProbeReport> {
    let profile = load_profile(datum)?;
    let times = parse_times(times)?;
    let report = schaeffer_probe(flux, &profile, &times, trials, amplitude, seed)?;
    match out {
        Some(path) => io::write_json_pretty(path, &report)?,
        None => println!("{}", serde_json::to_string_pretty(&report)?),
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// scenario / riemann
// ---------------------------------------------------------------------------

/// `scenario gen`: write `scenario.json` and the base (optionally
/// perturbed) `datum.csv` into `out_dir`.
pub fn scenario_gen(
    eps: f64,
    kind: DatumKind,
    perturbation: Option<(PerturbationConfig, u64)>,
    out_dir: &Path,
) -> Result<()> {
    let sp = fronttrack_core::derive_params(eps)?;
    fs::create_dir_all(out_dir)
        .with_context(|| format!("creating {}", out_dir.display()))?;
    io::write_json_pretty(&out_dir.join("scenario.json"), &sp)?;
    let base = build_datum_of_kind(kind, &sp)?;
    let datum = match perturbation {
        Some((p, seed)) => {
            let spec = DatumSpec {
                kind: p.kind,
                budget: p.budget,
                seed,
            };
            let (perturbed, measured) = perturb(&base, &spec, &sp)?;
            io::write_json_pretty(
                &out_dir.join("perturbation.json"),
                &serde_json::json!({
                    "kind": p.kind,
                    "budget": p.budget,
                    "seed": seed,
                    "measured_size": measured,
                }),
            )?;
            perturbed
        }
        None => base,
    };
    io::write_datum_csv(&out_dir.join("datum.csv"), &datum)?;
    Ok(())
}

/// Full output of `riemann solve`.
#[derive(Clone, Debug, Serialize)]
pub struct RiemannOutput {
    pub eta: f64,
    pub left: State,
    pub right: State,
    pub waves: Vec<Wave>,
    /// `|Φ3(t3)Φ2(t2)Φ1(t1)(left) - right|`.
    pub reconstruction_gap: f64,
}

pub fn riemann_solve(eta: f64, left: State, right: State) -> Result<RiemannOutput> {
    let p = SystemParams::new(eta)?;
    let sol = solve_riemann(left, right, p)?;
    let [t1, t2, t3] = sol.signed_strengths();
    let mut u = wave_curve(1, left, t1, p)?;
    u = wave_curve(2, u, t2, p)?;
    u = wave_curve(3, u, t3, p)?;
    Ok(RiemannOutput {
        eta,
        left,
        right,
        waves: sol.waves,
        reconstruction_gap: (u - right).norm(),
    })
}

// ---------------------------------------------------------------------------
// simulate / analyze
// ---------------------------------------------------------------------------

/// Per-run metadata written next to the solution; `analyze` defaults its
/// options from here.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    pub perturbation: Option<PerturbationConfig>,
    /// Measured size of the applied perturbation in its norm.
    pub measured_size: f64,
    pub truncated: bool,
    pub front_count: usize,
    pub event_count: usize,
    pub np_total: f64,
    pub min_generations: u32,
    pub k_cap: f64,
}

pub struct SimulateOutcome {
    pub run_dirs: Vec<PathBuf>,
    pub any_truncated: bool,
}

/// `simulate`: one front-tracking run per seed, each in its own directory
/// `out_dir/seed_<seed>/`. Truncated runs keep their partial outputs and
/// are flagged in `run.json`.
pub fn simulate(config_path: &Path) -> Result<SimulateOutcome> {
    let cfg = RunConfig::load(config_path)?;
    let config_dir = config_path.parent().unwrap_or(Path::new("."));
    let sp = cfg.scenario_params(config_dir)?;
    let ft = cfg.ft_params(&sp);
    let sys = sp.system()?;
    let base = cfg.build_datum(&sp)?;
    fs::create_dir_all(&cfg.out_dir)
        .with_context(|| format!("creating {}", cfg.out_dir.display()))?;

    let truncated: Vec<(PathBuf, bool)> = cfg
        .seeds
        .par_iter()
        .map(|&seed| -> Result<(PathBuf, bool)> {
            let (datum, measured) = match &cfg.perturbation {
                Some(p) => {
                    let spec = DatumSpec {
                        kind: p.kind,
                        budget: p.budget,
                        seed,
                    };
                    perturb(&base, &spec, &sp)?
                }
                None => (base.clone(), 0.0),
            };
            let sol = evolve(&datum, &ft, sys)?;
            let dir = cfg.out_dir.join(format!("seed_{seed}"));
            fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
            write_run_dir(&dir, &sp, &ft, &datum, &sol)?;
            io::write_json_pretty(
                &dir.join("run.json"),
                &RunRecord {
                    seed,
                    perturbation: cfg.perturbation,
                    measured_size: measured,
                    truncated: sol.truncated,
                    front_count: sol.fronts.len(),
                    event_count: sol.events.len(),
                    np_total: sol.np_total(),
                    min_generations: cfg.min_generations,
                    k_cap: cfg.k_cap,
                },
            )?;
            Ok((dir, sol.truncated))
        })
        .collect::<Result<_>>()?;

    Ok(SimulateOutcome {
        any_truncated: truncated.iter().any(|(_, t)| *t),
        run_dirs: truncated.into_iter().map(|(d, _)| d).collect(),
    })
}

fn write_run_dir(
    dir: &Path,
    sp: &ScenarioParams,
    ft: &FtParams,
    datum: &fronttrack_core::StepFunction,
    sol: &FtSolution,
) -> Result<()> {
    io::write_json_pretty(&dir.join("scenario.json"), sp)?;
    io::write_json_pretty(&dir.join("ft_params.json"), ft)?;
    io::write_datum_csv(&dir.join("datum.csv"), datum)?;
    io::write_fronts_csv(&dir.join("fronts.csv"), sol)?;
    io::write_events_csv(&dir.join("events.csv"), sol)?;
    io::write_json(&dir.join("solution.json"), sol)?;
    Ok(())
}

/// `analyze`: verify the shock pattern of a finished run directory; writes
/// `report.json` and `diagram.csv` next to the inputs.
pub fn analyze(
    run_dir: &Path,
    min_generations: Option<u32>,
    k_cap: Option<f64>,
) -> Result<PatternReport> {
    let sp: ScenarioParams = io::read_json(&run_dir.join("scenario.json"))?;
    let ft: FtParams = io::read_json(&run_dir.join("ft_params.json"))?;
    let record: RunRecord = io::read_json(&run_dir.join("run.json"))?;
    let sol: FtSolution = io::read_json(&run_dir.join("solution.json"))?;

    let report = verify_pattern(
        &sol,
        &sp,
        &ft,
        min_generations.unwrap_or(record.min_generations),
        k_cap.unwrap_or(record.k_cap),
    );
    io::write_json_pretty(&run_dir.join("report.json"), &report)?;
    io::write_diagram_csv(&run_dir.join("diagram.csv"), &sol)?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_includes_both_endpoints() {
        let xs = parse_grid("-2:2:0.01").unwrap();
        assert_eq!(xs.len(), 401);
        assert_eq!(xs[0], -2.0);
        assert!((xs[400] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn grid_rejects_garbage() {
        assert!(parse_grid("1:2").is_err());
        assert!(parse_grid("2:1:0.1").is_err());
        assert!(parse_grid("0:1:-0.1").is_err());
        assert!(parse_grid("a:b:c").is_err());
    }

    #[test]
    fn state_parses_three_components() {
        let s = parse_state("0.1,-0.2,0.3").unwrap();
        assert_eq!((s.u, s.v, s.w), (0.1, -0.2, 0.3));
        assert!(parse_state("1,2").is_err());
    }
}
