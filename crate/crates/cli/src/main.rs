//! Command-line runner: wires one JSON config to the simulator, the
//! ensemble diagnostics, the inequality suite, and the experiments, and
//! writes every artifact under the chosen output directory.
//!
//! Exit codes: 0 = all assertions passed; 1 = a quantitative check found
//! violations (witnesses dumped); 2 = configuration or usage error.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use sggl_core::config::{BuiltConfig, FileConfig};
use sggl_core::diagnostics::{
    energy_h1_statistic, energy_l2_statistic, energy_moment_statistic,
};
use sggl_core::experiments::{
    galerkin_scan, gaussian_bump, mean_contraction, project_profile,
    uniqueness_experiment,
};
use sggl_core::integrator::{
    init_rng, path_rng, simulate_ensemble, simulate_path,
};
use sggl_core::io as fio;
use sggl_core::lab::{run_suite, SuiteOptions};
use sggl_core::params::validate_regime;
use sggl_core::spectral::{SineBasis, SpectralField};

fn defaults_help() -> &'static str {
    let text = format!(
        "CONFIG KEYS (JSON; every key optional, defaults shown):\n{}",
        FileConfig::defaults_json()
    );
    Box::leak(text.into_boxed_str())
}

#[derive(Parser)]
#[command(
    name = "sggl",
    about = "Spectral Galerkin simulator for the 2-D stochastic generalized \
             Ginzburg-Landau equation with jump noise",
    after_long_help = defaults_help(),
    after_help = "Run with --help (long form) for the full config-key listing."
)]
struct Cli {
    /// Path to the JSON config file; omit to run on built-in defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed override.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Ensemble size override.
    #[arg(long, global = true)]
    paths: Option<usize>,
    /// Output directory (created if missing).
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    /// Worker threads; defaults to SGGLE_THREADS or the hardware count.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one path and write its energy records and snapshots.
    Simulate,
    /// Run the Monte-Carlo ensemble and write per-time moments and the
    /// energy-bound statistics.
    Ensemble,
    /// Run the sampled inequality suite (exit 1 on unexpected violations).
    VerifyInequalities {
        /// Samples per check.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Expect violations (run beyond the regime threshold).
        #[arg(long, default_value_t = false)]
        negative_control: bool,
        /// Re-evaluate a dumped witness file instead of sampling.
        #[arg(long)]
        replay: Option<PathBuf>,
    },
    /// Shared-noise uniqueness contraction experiment.
    Uniqueness {
        /// Initial separation of the pair.
        #[arg(long, default_value_t = 1e-3)]
        delta: f64,
        /// Number of independent pairs.
        #[arg(long, default_value_t = 100)]
        pairs: usize,
    },
    /// Endpoint-discrepancy scan over truncation levels.
    GalerkinScan {
        /// Comma-separated mode counts.
        #[arg(long, default_value = "8,16,32", value_delimiter = ',')]
        levels: Vec<usize>,
    },
}

#[derive(Serialize)]
struct RunManifest {
    command: String,
    config_path: Option<String>,
    out_dir: String,
    seed: u64,
    timestamp_unix: u64,
    git_describe: String,
    status: String,
    exit_code: Option<u8>,
}

impl RunManifest {
    fn write(&self, out_dir: &Path) -> std::io::Result<()> {
        let mut f = File::create(out_dir.join("manifest.json"))?;
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        f.write_all(text.as_bytes())
    }
}

fn git_describe() -> String {
    std::process::Command::new("git")
        .args(["describe", "--always", "--dirty"])
        .output()
        .ok()
        .filter(|o| o.status.success())
        .map(|o| String::from_utf8_lossy(&o.stdout).trim().to_string())
        .unwrap_or_else(|| "unknown".into())
}

fn csv_file(out_dir: &Path, name: &str) -> std::io::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(out_dir.join(name))?))
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let threads = cli
        .threads
        .or_else(|| {
            std::env::var("SGGLE_THREADS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        });
    if rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .is_err()
    {
        // the pool can already exist under test harnesses; proceed
    }

    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode, Box<dyn std::error::Error>> {
    let file_config = match &cli.config {
        Some(path) => FileConfig::from_file(path)?,
        None => FileConfig::default(),
    };
    let mut built = file_config.build()?;
    if let Some(seed) = cli.seed {
        built.sim.seed = seed;
    }
    if let Some(paths) = cli.paths {
        built.sim.n_paths = paths;
    }
    std::fs::create_dir_all(&cli.out_dir)?;

    let command_name = match &cli.command {
        Command::Simulate => "simulate",
        Command::Ensemble => "ensemble",
        Command::VerifyInequalities { .. } => "verify-inequalities",
        Command::Uniqueness { .. } => "uniqueness",
        Command::GalerkinScan { .. } => "galerkin-scan",
    };
    let mut manifest = RunManifest {
        command: command_name.into(),
        config_path: cli.config.as_ref().map(|p| p.display().to_string()),
        out_dir: cli.out_dir.display().to_string(),
        seed: built.sim.seed,
        timestamp_unix: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        git_describe: git_describe(),
        status: "running".into(),
        exit_code: None,
    };
    manifest.write(&cli.out_dir)?;

    let outcome = dispatch(cli, &built);
    let (status, code) = match &outcome {
        Ok(code) if *code == ExitCode::SUCCESS => ("ok", 0u8),
        Ok(_) => ("violations", 1u8),
        Err(_) => ("error", 2u8),
    };
    manifest.status = status.into();
    manifest.exit_code = Some(code);
    manifest.write(&cli.out_dir)?;
    outcome
}

fn dispatch(
    cli: &Cli,
    built: &BuiltConfig,
) -> Result<ExitCode, Box<dyn std::error::Error>> {
    match &cli.command {
        Command::Simulate => cmd_simulate(cli, built),
        Command::Ensemble => cmd_ensemble(cli, built),
        Command::VerifyInequalities {
            samples,
            negative_control,
            replay,
        } => cmd_verify(cli, built, *samples, *negative_control, replay.as_deref()),
        Command::Uniqueness { delta, pairs } => cmd_uniqueness(cli, built, *delta, *pairs),
        Command::GalerkinScan { levels } => cmd_scan(cli, built, levels),
    }
}

fn default_u0(built: &BuiltConfig, path: u64) -> SpectralField<f64> {
    let mut rng = init_rng(built.sim.seed, path);
    SpectralField::sample_gaussian(
        built.sim.n1,
        built.sim.n2,
        built.params.l1,
        built.params.l2,
        built.u0_decay,
        built.u0_amplitude,
        &mut rng,
    )
}

fn cmd_simulate(
    cli: &Cli,
    built: &BuiltConfig,
) -> Result<ExitCode, Box<dyn std::error::Error>> {
    let basis = SineBasis::padded(
        built.sim.n1,
        built.sim.n2,
        built.params.l1,
        built.params.l2,
        built.params.sigma,
    );
    let u0 = default_u0(built, 0);
    let mut rng = path_rng(built.sim.seed, 0);
    let traj = simulate_path(&built.sim, &built.params, &built.model, &basis, &u0, &mut rng)?;

    let mut csv = csv_file(&cli.out_dir, "energy.csv")?;
    fio::write_energy_csv(&mut csv, &traj)?;
    csv.flush()?;

    let mut snap = File::create(cli.out_dir.join("final.snap"))?;
    fio::write_snapshot(&mut snap, traj.final_state())?;

    if built.sim.snap_every >= 1 {
        let dir = cli.out_dir.join("snapshots");
        std::fs::create_dir_all(&dir)?;
        for (idx, state) in &traj.states {
            let mut f = File::create(dir.join(format!("state_{idx:06}.snap")))?;
            fio::write_snapshot(&mut f, state)?;
        }
    }

    let regime = validate_regime(&built.params, &built.model.constants);
    let grid_records = traj
        .kinds
        .iter()
        .filter(|k| **k == sggl_core::integrator::RecordKind::Grid)
        .count();
    println!(
        "simulate: {} grid records, {} jumps, stopped_at = {:?}, regime: beta_ok={} sigma_ok={} p_ok={} k_small_ok={}",
        grid_records,
        traj.jump_log.len(),
        traj.stopped_at,
        regime.beta_ok,
        regime.sigma_ok,
        regime.p_ok,
        regime.k_small_ok,
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_ensemble(
    cli: &Cli,
    built: &BuiltConfig,
) -> Result<ExitCode, Box<dyn std::error::Error>> {
    let basis = SineBasis::padded(
        built.sim.n1,
        built.sim.n2,
        built.params.l1,
        built.params.l2,
        built.params.sigma,
    );
    let stats = simulate_ensemble(
        &built.sim,
        &built.params,
        &built.model,
        &basis,
        |_, rng| {
            SpectralField::sample_gaussian(
                built.sim.n1,
                built.sim.n2,
                built.params.l1,
                built.params.l2,
                built.u0_decay,
                built.u0_amplitude,
                rng,
            )
        },
    )?;

    let mut csv = csv_file(&cli.out_dir, "ensemble-mean.csv")?;
    writeln!(
        csv,
        "t,mean_l2_sq,var_l2_sq,mean_h1_sq,var_h1_sq,mean_l2s2_pow,var_l2s2_pow,mean_mixed,var_mixed"
    )?;
    for i in 0..stats.times.len() {
        let m = stats.mean[i];
        let v = stats.var[i];
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{}",
            fio::fmt_g17(stats.times[i]),
            fio::fmt_g17(m[0]),
            fio::fmt_g17(v[0]),
            fio::fmt_g17(m[1]),
            fio::fmt_g17(v[1]),
            fio::fmt_g17(m[2]),
            fio::fmt_g17(v[2]),
            fio::fmt_g17(m[3]),
            fio::fmt_g17(v[3]),
        )?;
    }
    csv.flush()?;

    let n = (built.sim.n1, built.sim.n2);
    let lemmas = vec![
        energy_l2_statistic(&stats, n)?,
        energy_h1_statistic(&stats, n)?,
        energy_moment_statistic(&stats, n, built.model.constants.p, built.params.sigma)?,
    ];
    let mut csv = csv_file(&cli.out_dir, "lemma-stats.csv")?;
    fio::write_lemma_stats_csv(&mut csv, &lemmas)?;
    csv.flush()?;

    println!(
        "ensemble: {} paths, {} blow-ups; ratios L31={} L32={} L33={}",
        stats.n_paths,
        stats.blowup_count,
        fio::fmt_g17(lemmas[0].ratio),
        fio::fmt_g17(lemmas[1].ratio),
        fio::fmt_g17(lemmas[2].ratio),
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(
    cli: &Cli,
    built: &BuiltConfig,
    samples: usize,
    negative_control: bool,
    replay: Option<&Path>,
) -> Result<ExitCode, Box<dyn std::error::Error>> {
    if let Some(path) = replay {
        return cmd_replay(built, path);
    }
    let opts = SuiteOptions {
        samples,
        seed: built.sim.seed,
        n_modes: built.sim.n1,
        negative_control,
    };
    let reports = run_suite(&built.params, &built.model, &built.mono, &opts)?;

    let mut csv = csv_file(&cli.out_dir, "inequality-report.csv")?;
    fio::write_inequality_csv(&mut csv, &reports)?;
    csv.flush()?;

    let mut failed = false;
    for r in &reports {
        let expected_violations = negative_control && r.check.ends_with("_negative");
        let ok = if expected_violations {
            r.violations > 0
        } else {
            r.violations == 0
        };
        println!(
            "[{}] {}: {} samples, {} violations, max_slack = {}",
            if ok { "PASS" } else { "FAIL" },
            r.check,
            r.samples,
            r.violations,
            fio::fmt_g17(r.max_slack),
        );
        if !ok {
            failed = true;
        }
        if let Some(pair) = &r.witness {
            let name = format!("witness_{}.bin", r.check);
            let mut f = File::create(cli.out_dir.join(name))?;
            fio::write_witness(
                &mut f,
                &r.check,
                built.params.sigma,
                built.params.beta,
                pair,
            )?;
        }
    }
    Ok(if failed {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn cmd_replay(
    built: &BuiltConfig,
    path: &Path,
) -> Result<ExitCode, Box<dyn std::error::Error>> {
    use sggl_core::lab::{
        contraction_check, derivative_pairing_bound, power_pairing,
        DerivativePairing,
    };
    let mut f = File::open(path)?;
    let w = fio::read_witness(&mut f)?;
    let basis = SineBasis::padded(
        w.u.n1(),
        w.u.n2(),
        w.u.l1,
        w.u.l2,
        built.params.sigma,
    );
    println!(
        "replaying {} (sigma = {}, beta = {})",
        w.check, w.sigma, w.beta
    );
    let mut params = built.params;
    params.sigma = w.sigma;
    params.beta = w.beta;
    match w.check.as_str() {
        c if c.starts_with("t_monotonicity") => {
            let pp = power_pairing(&w.u, &w.phi, params.sigma, params.beta, &basis, false)?;
            println!(
                "m = {}, n = {}, Re I = {}, slack = {}",
                fio::fmt_g17(pp.m),
                fio::fmt_g17(pp.n_im),
                fio::fmt_g17(pp.re_i),
                fio::fmt_g17(pp.slack)
            );
        }
        c if c.starts_with("f_pairing") => {
            let which = if c.ends_with("_k") {
                DerivativePairing::Conjugate
            } else {
                DerivativePairing::Main
            };
            let pb =
                derivative_pairing_bound(&w.u, &w.phi, &params, &built.mono, which, &basis)?;
            println!(
                "Re pairing = {}, bound = {}, slack = {}",
                fio::fmt_g17(pb.re_pairing),
                fio::fmt_g17(pb.bound),
                fio::fmt_g17(pb.slack)
            );
        }
        c if c.starts_with("contraction") => {
            let cw = contraction_check(
                &w.u,
                &w.phi,
                &params,
                &built.model,
                &built.mono,
                &basis,
                false,
            )?;
            println!(
                "lhs = {}, r' = {}, drift pairing = {}, noise term = {}",
                fio::fmt_g17(cw.lhs),
                fio::fmt_g17(cw.r_prime),
                fio::fmt_g17(cw.drift_pairing),
                fio::fmt_g17(cw.noise_term)
            );
        }
        other => {
            println!("no replay handler for check '{other}'");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_uniqueness(
    cli: &Cli,
    built: &BuiltConfig,
    delta: f64,
    pairs: usize,
) -> Result<ExitCode, Box<dyn std::error::Error>> {
    let basis = SineBasis::padded(
        built.sim.n1,
        built.sim.n2,
        built.params.l1,
        built.params.l2,
        built.params.sigma,
    );
    let slack_per_step = 2.0;
    let runs: Vec<_> = (0..pairs)
        .map(|i| {
            let u0 = default_u0(built, i as u64);
            let mut rng = path_rng(built.sim.seed, i as u64);
            uniqueness_experiment(
                &built.sim,
                &built.params,
                &built.model,
                &built.mono,
                &basis,
                &u0,
                delta,
                slack_per_step,
                &mut rng,
            )
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut csv = csv_file(&cli.out_dir, "contraction.csv")?;
    fio::write_contraction_csv(&mut csv, &runs[0])?;
    csv.flush()?;

    let mean = mean_contraction(&runs).ok_or("all pairs blew up")?;
    let mut csv = csv_file(&cli.out_dir, "contraction-mean.csv")?;
    writeln!(csv, "t,mean_contraction")?;
    for (t, v) in mean.times.iter().zip(&mean.values) {
        writeln!(csv, "{},{}", fio::fmt_g17(*t), fio::fmt_g17(*v))?;
    }
    csv.flush()?;

    let first = mean.values[0];
    let last = *mean.values.last().unwrap();
    let contracted = last < first;
    let total_violations: usize = runs.iter().map(|r| r.violations.len()).sum();
    println!(
        "uniqueness: {} pairs, mean contraction {} -> {}, per-run violations: {}",
        pairs,
        fio::fmt_g17(first),
        fio::fmt_g17(last),
        total_violations,
    );
    Ok(if contracted {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_scan(
    cli: &Cli,
    built: &BuiltConfig,
    levels: &[usize],
) -> Result<ExitCode, Box<dyn std::error::Error>> {
    let n_max = *levels.iter().max().ok_or("empty level list")?;
    let bump = gaussian_bump(
        built.params.l1,
        built.params.l2,
        0.35 * built.params.l1.min(built.params.l2) / std::f64::consts::PI,
        built.u0_amplitude,
    );
    let fine = 4 * n_max;
    let u0_full = project_profile(
        n_max,
        n_max,
        built.params.l1,
        built.params.l2,
        fine,
        &bump,
    )?;
    let rows = galerkin_scan(
        &built.sim,
        &built.params,
        &built.model,
        levels,
        built.sim.n_paths,
        |n, _, _| {
            let mut f = SpectralField::zeros(n, n, built.params.l1, built.params.l2);
            let nn = n.min(n_max);
            for j in 0..nn {
                for k in 0..nn {
                    f.coeffs[[j, k]] = u0_full.coeffs[[j, k]];
                }
            }
            f
        },
    )?;
    let mut csv = csv_file(&cli.out_dir, "galerkin-scan.csv")?;
    fio::write_galerkin_csv(&mut csv, &rows)?;
    csv.flush()?;

    let mut decreasing = true;
    for i in 1..rows.len() - 1 {
        let ok = rows[i].discrepancy < rows[i - 1].discrepancy;
        decreasing &= ok;
    }
    for r in &rows {
        println!(
            "n = {:4}: discrepancy = {}, L31 ratio = {}, L32 ratio = {}",
            r.n,
            fio::fmt_g17(r.discrepancy),
            fio::fmt_g17(r.l31_ratio),
            fio::fmt_g17(r.l32_ratio),
        );
    }
    Ok(if decreasing {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
