//! bvlab: experiment runner and verification entry point.
//!
//! Subcommands wire configs to the library: `verify` runs the property
//! suites, `bv` emits discrepancy curves over moduli, `lfunc` evaluates
//! twisted L-values (single points, conductor scans, second moments), and
//! `titchmarsh` runs the shifted divisor-sum decomposition.

mod config;
mod manifest;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use bvlab_core::dirichlet::{build_sieve, lambda_table, von_mangoldt_a, CoefficientTable, Role};
use bvlab_core::lfunc::{
    afe_eval, root_number, second_moment_experiment, siegel_scan, AfeContext, VKernel,
};
use bvlab_core::localcoeffs::{compute_tau_table, ExemplarName, ExemplarPi, TauTable};
use bvlab_core::sieve::{prime_power_correction, run_bv_curve, ExperimentConfig, Weight};
use bvlab_core::titchmarsh::{normalized_curve, ShiftedSumData, SumKind};
use bvlab_core::util::fmt_f64;
use bvlab_core::verify::{run_suite, Suite, VerifyConfig};
use bvlab_core::{Error, Result};

use config::{resolve_seed, FileConfig};
use manifest::RunManifest;

#[derive(Parser)]
#[command(name = "bvlab", version, about = "Coefficient experiments for self-dual automorphic L-functions over Q")]
struct Cli {
    /// Root seed for all randomized checks
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker pool size (default: machine parallelism)
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Output format
    #[arg(long, global = true, value_enum)]
    format: Option<OutFormat>,

    /// Output path (defaults to a per-subcommand name in the CWD)
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// INI-style key=value config; flags take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Binary cache for the τ table (built if absent)
    #[arg(long = "tau-cache", global = true)]
    tau_cache: Option<PathBuf>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WeightArg {
    Plain,
    Log,
    #[value(name = "smoothed-rho")]
    SmoothedRho,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Primes,
    Integers,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LfuncMode {
    Eval,
    #[value(name = "siegel-scan")]
    SiegelScan,
    #[value(name = "second-moment")]
    SecondMoment,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the named property suites; exit 0 iff all pass
    Verify {
        /// symcore | local | vaughan | inequalities | characters | all
        #[arg(long)]
        suite: Option<String>,
        /// Trials per randomized battery
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Discrepancy curves over moduli (decade ladder up to --x)
    Bv {
        #[arg(long)]
        pi: Option<String>,
        #[arg(long)]
        x: Option<f64>,
        #[arg(long)]
        eta: Option<f64>,
        #[arg(long = "A")]
        a_power: Option<f64>,
        #[arg(long = "B")]
        b_power: Option<f64>,
        #[arg(long)]
        rho: Option<u32>,
        #[arg(long, value_enum)]
        weight: Option<WeightArg>,
        #[arg(long = "q-max")]
        q_max: Option<u64>,
    },
    /// Twisted L-values: single evaluation, conductor scan, second moment
    Lfunc {
        #[arg(long, value_enum)]
        mode: Option<LfuncMode>,
        /// Evaluation point, "re" or "re,im"
        #[arg(long)]
        s: Option<String>,
        /// Fundamental discriminant of the quadratic twist
        #[arg(long, allow_negative_numbers = true)]
        d: Option<i64>,
        /// Scan bound on |d|
        #[arg(long)]
        dmax: Option<u64>,
        /// Conductor caps: "10,20,30" or "10..100" (multiples of the base)
        #[arg(long = "Q")]
        q_list: Option<String>,
        /// Height for the second moment
        #[arg(long)]
        t: Option<f64>,
        /// Balance parameter X of the two sums
        #[arg(long = "X")]
        x_shift: Option<f64>,
        /// Mellin kernel order: 0 (flat) or 2 (gaussian)
        #[arg(long = "kernel-order")]
        kernel_order: Option<u32>,
    },
    /// Shifted divisor sums via divisor switching
    Titchmarsh {
        #[arg(long)]
        pi: Option<String>,
        /// Ladder of x values, comma-separated
        #[arg(long)]
        x: Option<String>,
        #[arg(long = "B")]
        b_power: Option<f64>,
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let file_cfg = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let seed = resolve_seed(cli.seed, &file_cfg)?;
    let threads = file_cfg.resolve(cli.threads, "threads", 0usize)?;
    if threads > 0 {
        // Ignore failure when a pool already exists (tests).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    let format = cli.format.unwrap_or(match file_cfg.get("format") {
        Some("json") => OutFormat::Json,
        _ => OutFormat::Csv,
    });

    match &cli.cmd {
        Cmd::Verify { suite, trials } => cmd_verify(&cli, &file_cfg, seed, suite, trials),
        Cmd::Bv { .. } => cmd_bv(&cli, &file_cfg, seed, format),
        Cmd::Lfunc { .. } => cmd_lfunc(&cli, &file_cfg, seed, format),
        Cmd::Titchmarsh { .. } => cmd_titchmarsh(&cli, &file_cfg, seed, format),
    }
}

fn out_path(cli: &Cli, file_cfg: &FileConfig, default_name: &str) -> PathBuf {
    cli.out
        .clone()
        .or_else(|| file_cfg.get("out").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(default_name))
}

/// τ table provisioning: reuse the cache when it is long enough,
/// otherwise compute (and refresh the cache).
fn load_tau(reach: usize, cache: Option<&Path>) -> Result<Arc<TauTable>> {
    let reach = reach.clamp(100, 1_000_000);
    if let Some(path) = cache {
        if path.exists() {
            let t = TauTable::read_cache(path)?;
            if t.len() >= reach {
                return Ok(Arc::new(t));
            }
        }
        let t = compute_tau_table(reach)?;
        t.write_cache(path)?;
        return Ok(Arc::new(t));
    }
    Ok(Arc::new(compute_tau_table(reach)?))
}

fn exemplar(name: ExemplarName, reach: usize, cache: Option<&Path>) -> Result<(ExemplarPi, Option<Arc<TauTable>>)> {
    if name == ExemplarName::Zeta {
        return Ok((ExemplarPi::zeta(), None));
    }
    let tau = load_tau(reach, cache)?;
    Ok((ExemplarPi::from_tau(name, tau.clone()), Some(tau)))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text)?;
    Ok(())
}

// -------------------------------------------------------------- verify

fn cmd_verify(
    cli: &Cli,
    file_cfg: &FileConfig,
    seed: u64,
    suite: &Option<String>,
    trials: &Option<usize>,
) -> Result<ExitCode> {
    let suite_name = suite
        .clone()
        .or_else(|| file_cfg.get("suite").map(String::from))
        .unwrap_or_else(|| "all".to_string());
    let suite: Suite = suite_name.parse()?;
    let trials = file_cfg.resolve(*trials, "trials", 1000usize)?;

    let out = out_path(cli, file_cfg, "verify-failures.json");
    let manifest_path = RunManifest::path_for(&out);
    let mut manifest = RunManifest::begin(
        "verify",
        serde_json::json!({"suite": suite_name, "seed": seed, "trials": trials}),
    );
    manifest.write(&manifest_path)?;

    let outcomes = run_suite(suite, &VerifyConfig { seed, trials })?;
    let mut failures = Vec::new();
    for o in &outcomes {
        println!(
            "[{}] {}/{} — {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.suite,
            o.check,
            o.detail
        );
        if !o.pass {
            failures.push(serde_json::json!({
                "suite": o.suite,
                "check": o.check,
                "detail": o.detail,
                "counterexample": o.counterexample,
            }));
        }
    }
    let ok = failures.is_empty();
    if !ok {
        write_text(&out, &(serde_json::to_string_pretty(&failures)? + "\n"))?;
        manifest.record_output(&out);
        eprintln!("{} check(s) failed; counterexamples in {}", failures.len(), out.display());
    }
    manifest.finish(&manifest_path, ok)?;
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

// ------------------------------------------------------------------ bv

fn cmd_bv(cli: &Cli, file_cfg: &FileConfig, seed: u64, format: OutFormat) -> Result<ExitCode> {
    let Cmd::Bv {
        pi,
        x,
        eta,
        a_power,
        b_power,
        rho,
        weight,
        q_max,
    } = &cli.cmd
    else {
        unreachable!()
    };
    let pi_name: ExemplarName = file_cfg
        .resolve(pi.clone(), "pi", "delta".to_string())?
        .parse()?;
    let x = file_cfg.resolve(*x, "x", 1e5f64)?;
    if !(x >= 10.0) {
        return Err(Error::contract("--x must be at least 10"));
    }
    if pi_name != ExemplarName::Zeta && x > 1e6 {
        return Err(Error::contract(
            "--x beyond 1e6 is not supported for tau-derived representations",
        ));
    }
    let mut cfg = ExperimentConfig::new(pi_name, x);
    cfg.seed = seed;
    cfg.eta = file_cfg.resolve(*eta, "eta", cfg.eta)?;
    cfg.a_log_power = file_cfg.resolve(*a_power, "A", cfg.a_log_power)?;
    cfg.b_log_power = file_cfg.resolve(*b_power, "B", cfg.b_log_power)?;
    cfg.rho = file_cfg.resolve(*rho, "rho", cfg.rho)?;
    cfg.q_max = file_cfg.resolve_opt(*q_max, "q-max")?;
    cfg.weight = match file_cfg.resolve(
        weight.map(|w| match w {
            WeightArg::Plain => "plain".to_string(),
            WeightArg::Log => "log".to_string(),
            WeightArg::SmoothedRho => "smoothed-rho".to_string(),
        }),
        "weight",
        "plain".to_string(),
    )? {
        s if s == "plain" => Weight::Plain,
        s if s == "log" => Weight::Log,
        s if s == "smoothed-rho" => Weight::SmoothedRho,
        s => return Err(Error::contract(format!("unknown weight {s:?}"))),
    };

    let out = out_path(cli, file_cfg, "bv.csv");
    let manifest_path = RunManifest::path_for(&out);
    let mut manifest = RunManifest::begin("bv", serde_json::to_value(&cfg)?);
    manifest.write(&manifest_path)?;

    let n = x as usize;
    let (pi, tau) = exemplar(pi_name, n, cli.tau_cache.as_deref())?;
    if let Some(t) = &tau {
        manifest.record_tau_digest(t.digest());
    }
    let sieve = build_sieve(n.max(2))?;
    let table = match cfg.weight {
        Weight::Plain | Weight::SmoothedRho => lambda_table(&pi, n, &sieve)?,
        Weight::Log => {
            let lam = lambda_table(&pi, n, &sieve)?;
            let mut t = CoefficientTable::zeros(Role::Custom, n);
            for &p in sieve.primes() {
                let p = p as usize;
                t.values_mut()[p] = lam.val(p) * (p as f64).ln();
            }
            t
        }
    };
    let curve = run_bv_curve(&cfg, &table);

    // Prime-power-to-prime correction, reported alongside the curve.
    let vm = von_mangoldt_a(&pi, n, &sieve)?;
    let lam = lambda_table(&pi, n, &sieve)?;
    let mut primes_log = CoefficientTable::zeros(Role::Custom, n);
    for &p in sieve.primes() {
        let p = p as usize;
        primes_log.values_mut()[p] = lam.val(p) * (p as f64).ln();
    }
    let (pp_diff, pp_cap) = prime_power_correction(&vm, &primes_log, x);

    match format {
        OutFormat::Csv => write_text(&out, &curve.to_csv())?,
        OutFormat::Json => {
            let v = serde_json::json!({
                "curve": curve,
                "prime_power_correction": {"difference": pp_diff, "cap": pp_cap},
            });
            write_text(&out, &(serde_json::to_string_pretty(&v)? + "\n"))?;
        }
    }
    manifest.record_output(&out);
    println!(
        "bv: {} points to {}; prime-power correction {} (cap {})",
        curve.points.len(),
        out.display(),
        fmt_f64(pp_diff),
        fmt_f64(pp_cap)
    );
    manifest.finish(&manifest_path, true)?;
    Ok(ExitCode::SUCCESS)
}

// --------------------------------------------------------------- lfunc

fn parse_point(s: &str) -> Result<Complex64> {
    let parts: Vec<&str> = s.split(',').collect();
    let re: f64 = parts[0]
        .trim()
        .parse()
        .map_err(|_| Error::contract(format!("cannot parse point {s:?}")))?;
    let im: f64 = if parts.len() > 1 {
        parts[1]
            .trim()
            .parse()
            .map_err(|_| Error::contract(format!("cannot parse point {s:?}")))?
    } else {
        0.0
    };
    Ok(Complex64::new(re, im))
}

fn parse_q_list(s: &str) -> Result<Vec<u64>> {
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a
            .trim()
            .parse()
            .map_err(|_| Error::contract(format!("bad Q range {s:?}")))?;
        let b: u64 = b
            .trim()
            .parse()
            .map_err(|_| Error::contract(format!("bad Q range {s:?}")))?;
        if a == 0 || b < a {
            return Err(Error::contract(format!("bad Q range {s:?}")));
        }
        return Ok((1..).map(|k| k * a).take_while(|&q| q <= b).collect());
    }
    s.split(',')
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| Error::contract(format!("bad Q list {s:?}")))
        })
        .collect()
}

fn cmd_lfunc(cli: &Cli, file_cfg: &FileConfig, _seed: u64, format: OutFormat) -> Result<ExitCode> {
    let Cmd::Lfunc {
        mode,
        s,
        d,
        dmax,
        q_list,
        t,
        x_shift,
        kernel_order,
    } = &cli.cmd
    else {
        unreachable!()
    };
    let mode = mode.unwrap_or(match file_cfg.get("mode") {
        Some("siegel-scan") => LfuncMode::SiegelScan,
        Some("second-moment") => LfuncMode::SecondMoment,
        _ => LfuncMode::Eval,
    });
    let kernel = VKernel::new(file_cfg.resolve(*kernel_order, "kernel-order", 0u32)?)?;
    let x_shift = file_cfg.resolve(*x_shift, "X", 1.0f64)?;

    // Coefficient reach: the cutoff dies by y ≈ 10, so 15·√conductor
    // leaves margin.
    let lambda_for = |reach: usize| -> Result<Vec<f64>> {
        let reach = reach.clamp(1000, 1_000_000);
        let tau = load_tau(reach, cli.tau_cache.as_deref())?;
        let pi = ExemplarPi::from_tau(ExemplarName::Delta, tau);
        let sieve = build_sieve(reach)?;
        lambda_table(&pi, reach, &sieve)?
            .to_real(1e-9)
            .ok_or_else(|| Error::numeric("lambda table not real"))
    };

    match mode {
        LfuncMode::Eval => {
            let s = parse_point(&file_cfg.resolve(s.clone(), "s", "0.5".to_string())?)?;
            let d = file_cfg.resolve(*d, "d", 1i64)?;
            let ctx = AfeContext::quadratic(d, kernel)?;
            let reach = (15.0 * d.unsigned_abs() as f64 * x_shift.max(1.0 / x_shift).max(1.0))
                as usize
                + 1000;
            let lambda = lambda_for(reach)?;
            let eps = root_number(&ctx, &lambda, 1e-8)?;
            let rec = afe_eval(&ctx, &lambda, s, x_shift, eps)?;
            let row = serde_json::json!({
                "s": [rec.s.re, rec.s.im],
                "d": d,
                "conductor": ctx.conductor,
                "value": [rec.value.re, rec.value.im],
                "truncation": rec.truncation,
                "est_error": rec.est_error,
                "root_number": [eps.re, eps.im],
            });
            println!("{}", serde_json::to_string_pretty(&row)?);
            let out = out_path(cli, file_cfg, "lfunc-eval.json");
            let manifest_path = RunManifest::path_for(&out);
            let mut manifest = RunManifest::begin("lfunc-eval", row.clone());
            write_text(&out, &(serde_json::to_string_pretty(&row)? + "\n"))?;
            manifest.record_output(&out);
            manifest.finish(&manifest_path, true)?;
            Ok(ExitCode::SUCCESS)
        }
        LfuncMode::SiegelScan => {
            let dmax = file_cfg.resolve(*dmax, "dmax", 500u64)?;
            let out = out_path(cli, file_cfg, "siegel.csv");
            let manifest_path = RunManifest::path_for(&out);
            let mut manifest = RunManifest::begin(
                "lfunc-siegel-scan",
                serde_json::json!({"dmax": dmax, "kernel": kernel}),
            );
            manifest.write(&manifest_path)?;
            let lambda = lambda_for(15 * dmax as usize + 1000)?;
            let rep = siegel_scan(dmax, &lambda, kernel)?;
            match format {
                OutFormat::Csv => write_text(&out, &rep.to_csv())?,
                OutFormat::Json => write_text(&out, &(serde_json::to_string_pretty(&rep)? + "\n"))?,
            }
            manifest.record_output(&out);
            println!(
                "siegel-scan: {} twists, min |L(1)| = {}, envelope slope {:.4}",
                rep.rows.len(),
                fmt_f64(rep.min_abs),
                rep.envelope_slope
            );
            manifest.finish(&manifest_path, true)?;
            Ok(ExitCode::SUCCESS)
        }
        LfuncMode::SecondMoment => {
            let qs = parse_q_list(&file_cfg.resolve(
                q_list.clone(),
                "Q",
                "10..100".to_string(),
            )?)?;
            let t = file_cfg.resolve(*t, "t", 0.0f64)?;
            let out = out_path(cli, file_cfg, "second-moment.csv");
            let manifest_path = RunManifest::path_for(&out);
            let mut manifest = RunManifest::begin(
                "lfunc-second-moment",
                serde_json::json!({"Q": qs, "t": t, "kernel": kernel}),
            );
            manifest.write(&manifest_path)?;
            let qmax = qs.iter().copied().max().unwrap_or(1);
            let lambda = lambda_for(15 * qmax as usize + 1000)?;
            let rep = second_moment_experiment(t, &qs, &lambda, kernel)?;
            match format {
                OutFormat::Csv => write_text(&out, &rep.to_csv())?,
                OutFormat::Json => write_text(&out, &(serde_json::to_string_pretty(&rep)? + "\n"))?,
            }
            manifest.record_output(&out);
            println!("second-moment: {} caps to {}", rep.rows.len(), out.display());
            manifest.finish(&manifest_path, true)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

// ---------------------------------------------------------- titchmarsh

fn parse_ladder(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| Error::contract(format!("bad x ladder {s:?}")))
        })
        .collect()
}

fn cmd_titchmarsh(
    cli: &Cli,
    file_cfg: &FileConfig,
    _seed: u64,
    format: OutFormat,
) -> Result<ExitCode> {
    let Cmd::Titchmarsh { pi, x, b_power, kind } = &cli.cmd else {
        unreachable!()
    };
    let pi_name: ExemplarName = file_cfg
        .resolve(pi.clone(), "pi", "delta".to_string())?
        .parse()?;
    let xs = parse_ladder(&file_cfg.resolve(x.clone(), "x", "1e4,1e5".to_string())?)?;
    let b_power = file_cfg.resolve(*b_power, "B", 1.0f64)?;
    let kind = match file_cfg.resolve(
        kind.map(|k| match k {
            KindArg::Primes => "primes".to_string(),
            KindArg::Integers => "integers".to_string(),
        }),
        "kind",
        "primes".to_string(),
    )? {
        s if s == "primes" => SumKind::Primes,
        s if s == "integers" => SumKind::Integers,
        s => return Err(Error::contract(format!("unknown kind {s:?}"))),
    };

    let out = out_path(cli, file_cfg, "titchmarsh.csv");
    let manifest_path = RunManifest::path_for(&out);
    let mut manifest = RunManifest::begin(
        "titchmarsh",
        serde_json::json!({"pi": pi_name.as_str(), "x": xs, "B": b_power, "kind": kind}),
    );
    manifest.write(&manifest_path)?;

    let n = xs.iter().cloned().fold(0.0f64, f64::max) as usize;
    let (pi, tau) = exemplar(pi_name, n, cli.tau_cache.as_deref())?;
    if let Some(t) = &tau {
        manifest.record_tau_digest(t.digest());
    }
    let sieve = build_sieve(n.max(2))?;
    let lambda = lambda_table(&pi, n, &sieve)?
        .to_real(1e-9)
        .ok_or_else(|| Error::numeric("lambda table not real"))?;
    let divisor = sieve.divisor_counts();
    let data = ShiftedSumData {
        lambda: &lambda,
        sieve: &sieve,
        divisor: &divisor,
    };
    let curve = normalized_curve(pi_name.as_str(), &data, &xs, kind, b_power)?;

    // The decomposition is an identity; a gap is a hard failure.
    let max_gap = curve
        .rows
        .iter()
        .map(|r| r.relative_gap())
        .fold(0.0f64, f64::max);
    let ok = max_gap <= 1e-6;

    match format {
        OutFormat::Csv => write_text(&out, &curve.to_csv())?,
        OutFormat::Json => write_text(&out, &(serde_json::to_string_pretty(&curve)? + "\n"))?,
    }
    manifest.record_output(&out);
    println!(
        "titchmarsh: {} rows to {}; max identity gap {}{}",
        curve.rows.len(),
        out.display(),
        fmt_f64(max_gap),
        if curve.flagged_growth {
            "; growth flag raised"
        } else {
            ""
        }
    );
    manifest.finish(&manifest_path, ok)?;
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}
