//! `belldist`: quantify Bell non-locality from behavior files.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use belldist_cli::format::{
    read_behavior, read_functional, read_input_distribution, write_behavior,
};
use belldist_cli::sampling;
use belldist_cli::scan::{
    functional_scan, gamma_scan, grid, write_gamma_csv, write_gnuplot, write_scan_csv,
};
use belldist_cli::{CliError, CliResult};
use belldist_core::inequalities::{
    evaluate, make_cglmp, make_chsh, make_inn22, make_mermin, BellFunctional,
};
use belldist_core::measures::{
    bell_lower_bound_content, dual_certificate, kl_divergence, nl, nl_given_value, nl_kl,
    nonlocal_content, pinsker_bound, ConstrainedNl, NlKlOptions,
};
use belldist_core::quantum::{born_behavior, cglmp_setup, chsh_tsirelson_setup, ghz_mermin_setup};
use belldist_core::scenario::{
    enumerate_strategies, is_nonsignaling, Behavior, InputDistribution, Scenario, StrategyMatrix,
};
use clap::{Args, Parser, Subcommand};
use rand::RngExt;

#[derive(Parser)]
#[command(
    name = "belldist",
    about = "Bell non-locality as trace distance to the local polytope",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct InputOpts {
    /// Input distribution: `uniform` or a path to a weights file.
    #[arg(long, default_value = "uniform")]
    inputs: String,
    /// Validation tolerance for behavior files.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Trace-distance non-locality of a behavior file.
    Nl {
        behavior: PathBuf,
        #[command(flatten)]
        input: InputOpts,
        /// Write the closest local behavior here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Least NL compatible with a pinned functional value.
    NlAtValue {
        /// Functional: chsh | cglmp:<d> | inn22:<n> | mermin:<N> | a file path.
        #[arg(long)]
        functional: String,
        #[arg(long)]
        value: f64,
        #[command(flatten)]
        input: InputOpts,
    },
    /// EPR-2 non-local content of a behavior file.
    Content {
        behavior: PathBuf,
        /// Also report the violation lower bound of this functional.
        #[arg(long)]
        functional: Option<String>,
        #[command(flatten)]
        input: InputOpts,
    },
    /// Relative-entropy measure of a behavior file.
    Kl {
        behavior: PathBuf,
        #[command(flatten)]
        input: InputOpts,
        /// Conditional-gradient convergence gap (bits).
        #[arg(long, default_value_t = 1e-7)]
        gap_tol: f64,
        #[arg(long, default_value_t = 100_000)]
        max_iters: usize,
    },
    /// Dual certificate of the trace-distance measure.
    Certificate {
        behavior: PathBuf,
        #[command(flatten)]
        input: InputOpts,
        /// Write the certificate vector here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep NL over functional values; write `value,nl,status` rows.
    Scan {
        #[arg(long)]
        functional: String,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long)]
        steps: usize,
        #[command(flatten)]
        input: InputOpts,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[arg(long)]
        out: PathBuf,
        /// Also emit a plotting script next to the CSV.
        #[arg(long)]
        gnuplot: bool,
    },
    /// Sweep the two-qutrit family; write
    /// `gamma,i_cglmp,nl,kl_min,kl_upper,pinsker,status` rows.
    GammaScan {
        #[arg(long, default_value_t = 0.0)]
        from: f64,
        #[arg(long, default_value_t = core::f64::consts::FRAC_1_SQRT_2)]
        to: f64,
        #[arg(long, default_value_t = 72)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        gnuplot: bool,
    },
    /// Write the behavior of a named quantum family to a file.
    Quantum {
        /// chsh-tsirelson | cglmp-gamma | ghz-mermin
        #[arg(long)]
        family: String,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        parties: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Replay the monotonicity checks of the free operations.
    CheckMonotones {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("belldist: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn resolve_functional(spec: &str) -> CliResult<BellFunctional> {
    let parse_param = |s: &str| -> CliResult<usize> {
        s.parse()
            .map_err(|_| CliError::Usage(format!("bad functional parameter `{s}`")))
    };
    if let Some((name, param)) = spec.split_once(':') {
        return match name {
            "cglmp" => Ok(make_cglmp(parse_param(param)?)?),
            "inn22" => Ok(make_inn22(parse_param(param)?)?),
            "mermin" => Ok(make_mermin(parse_param(param)?)?.1),
            "file" => read_functional(Path::new(param)),
            _ => Err(CliError::Usage(format!(
                "unknown functional family `{name}`"
            ))),
        };
    }
    match spec {
        "chsh" => Ok(make_chsh()),
        path if Path::new(path).exists() => read_functional(Path::new(path)),
        other => Err(CliError::Usage(format!(
            "unknown functional `{other}` (expected chsh, cglmp:<d>, inn22:<n>, mermin:<N> or a file)"
        ))),
    }
}

fn resolve_inputs(opts: &InputOpts, scenario: &Scenario) -> CliResult<InputDistribution> {
    if opts.inputs == "uniform" {
        Ok(InputDistribution::uniform(scenario.clone()))
    } else {
        read_input_distribution(Path::new(&opts.inputs), scenario)
    }
}

fn strategies_for(scenario: &Scenario) -> CliResult<StrategyMatrix> {
    Ok(enumerate_strategies(scenario)?)
}

fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Nl {
            behavior,
            input,
            out,
        } => {
            let q = read_behavior(&behavior, input.tol)?;
            let pi = resolve_inputs(&input, q.scenario())?;
            let a = strategies_for(q.scenario())?;
            let result = nl(&q, &pi, &a)?;
            let cert = dual_certificate(&q, &pi, &a)?;
            println!("NL={}", result.value);
            println!("CERT_VALUE={}", cert.value);
            println!(
                "CERT_SUP_NORM={}",
                cert.v.iter().fold(0.0f64, |m, v| m.max(v.abs()))
            );
            println!("CERT_STRATEGY_MAX={}", cert.strategy_max);
            if let Some(path) = out {
                write_behavior(&path, &result.closest_local)?;
                println!("CLOSEST_LOCAL={}", path.display());
            }
            Ok(())
        }
        Command::NlAtValue {
            functional,
            value,
            input,
        } => {
            let f = resolve_functional(&functional)?;
            let pi = resolve_inputs(&input, f.scenario())?;
            let a = strategies_for(f.scenario())?;
            match nl_given_value(&f, value, &pi, &a)? {
                ConstrainedNl::Optimal { value: v, .. } => {
                    println!("NL={v}");
                    Ok(())
                }
                ConstrainedNl::Infeasible => Err(CliError::InfeasiblePoint(format!(
                    "no non-signaling behavior attains {value} on {}",
                    f.label()
                ))),
            }
        }
        Command::Content {
            behavior,
            functional,
            input,
        } => {
            let q = read_behavior(&behavior, input.tol)?;
            let a = strategies_for(q.scenario())?;
            let w = nonlocal_content(&q, &a)?;
            println!("CONTENT={w}");
            if let Some(spec) = functional {
                let f = resolve_functional(&spec)?;
                let lb = bell_lower_bound_content(&f, &q, &a)?;
                println!("BELL_LOWER_BOUND={lb}");
            }
            Ok(())
        }
        Command::Kl {
            behavior,
            input,
            gap_tol,
            max_iters,
        } => {
            let q = read_behavior(&behavior, input.tol)?;
            let pi = resolve_inputs(&input, q.scenario())?;
            let a = strategies_for(q.scenario())?;
            let opts = NlKlOptions {
                gap_tol,
                max_iterations: max_iters,
            };
            let r = nl_kl(&q, &pi, &a, &opts)?;
            // Both conventions: the input-weighted joint form and the raw
            // per-setting sum without the prefactor.
            let raw: f64 = {
                let ot = q.scenario().output_tuples();
                let mut acc = 0.0;
                for xi in 0..q.scenario().input_tuples() {
                    let lo = xi * ot;
                    let hi = lo + ot;
                    acc += kl_divergence(&q.values()[lo..hi], &r.minimizer.values()[lo..hi])?;
                }
                acc
            };
            println!("NL_KL={}", r.value);
            println!("KL_RAW_SUM={raw}");
            println!("GAP={}", r.gap);
            println!("ITERATIONS={}", r.iterations);
            println!("CONVERGED={}", r.converged);
            let tracked = nl(&q, &pi, &a)?;
            println!("PINSKER_FLOOR={}", pinsker_bound(tracked.value)?);
            Ok(())
        }
        Command::Certificate {
            behavior,
            input,
            out,
        } => {
            let q = read_behavior(&behavior, input.tol)?;
            let pi = resolve_inputs(&input, q.scenario())?;
            let a = strategies_for(q.scenario())?;
            let cert = dual_certificate(&q, &pi, &a)?;
            println!("CERT_VALUE={}", cert.value);
            println!(
                "CERT_SUP_NORM={}",
                cert.v.iter().fold(0.0f64, |m, v| m.max(v.abs()))
            );
            println!("CERT_STRATEGY_MAX={}", cert.strategy_max);
            if let Some(path) = out {
                let mut text = String::new();
                let scen = q.scenario();
                let mut idx = 0usize;
                for x in scen.input_tuples_iter() {
                    for aa in scen.output_tuples_iter() {
                        let v = cert.v[idx];
                        idx += 1;
                        if v != 0.0 {
                            let xs: Vec<String> = x.iter().map(|t| t.to_string()).collect();
                            let as_: Vec<String> = aa.iter().map(|t| t.to_string()).collect();
                            text.push_str(&format!("{} {} {v}\n", xs.join(" "), as_.join(" ")));
                        }
                    }
                }
                std::fs::write(&path, text)
                    .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
                println!("CERT_VECTOR={}", path.display());
            }
            Ok(())
        }
        Command::Scan {
            functional,
            from,
            to,
            steps,
            input,
            jobs,
            out,
            gnuplot,
        } => {
            let f = resolve_functional(&functional)?;
            let pi = resolve_inputs(&input, f.scenario())?;
            let a = strategies_for(f.scenario())?;
            let values = grid(from, to, steps)?;
            let jobs = effective_jobs(jobs);
            let rows = functional_scan(&f, &a, &pi, &values, jobs);
            write_scan_csv(&out, &rows)?;
            if gnuplot {
                write_gnuplot(&out, &[(2, "nl")], f.label())?;
            }
            let ok = rows.iter().filter(|r| r.is_ok()).count();
            println!("SCAN_ROWS={} OK={ok} OUT={}", rows.len(), out.display());
            Ok(())
        }
        Command::GammaScan {
            from,
            to,
            steps,
            jobs,
            out,
            gnuplot,
        } => {
            let limit = 1.0 / f64::sqrt(2.0);
            if from < 0.0 || to > limit + 1e-12 {
                return Err(CliError::Usage(format!(
                    "gamma grid must lie inside [0, {limit}]"
                )));
            }
            let gammas = grid(from, to, steps)?;
            let jobs = effective_jobs(jobs);
            let rows = gamma_scan(&gammas, jobs)?;
            write_gamma_csv(&out, &rows)?;
            if gnuplot {
                write_gnuplot(
                    &out,
                    &[(2, "i_cglmp"), (3, "nl"), (4, "kl_min"), (6, "pinsker")],
                    "two-qutrit family",
                )?;
            }
            let ok = rows.iter().filter(|r| r.is_ok()).count();
            println!("SCAN_ROWS={} OK={ok} OUT={}", rows.len(), out.display());
            Ok(())
        }
        Command::Quantum {
            family,
            gamma,
            parties,
            out,
        } => {
            let q: Behavior = match family.as_str() {
                "chsh-tsirelson" => {
                    let (state, meas) = chsh_tsirelson_setup();
                    born_behavior(&state, &meas)?
                }
                "cglmp-gamma" => {
                    let gamma =
                        gamma.ok_or_else(|| CliError::Usage("cglmp-gamma needs --gamma".into()))?;
                    let (state, meas) = cglmp_setup(gamma)?;
                    born_behavior(&state, &meas)?
                }
                "ghz-mermin" => {
                    let parties = parties
                        .ok_or_else(|| CliError::Usage("ghz-mermin needs --parties".into()))?;
                    let (state, meas) = ghz_mermin_setup(parties)?;
                    born_behavior(&state, &meas)?
                }
                other => {
                    return Err(CliError::Usage(format!(
                        "unknown family `{other}` (chsh-tsirelson | cglmp-gamma | ghz-mermin)"
                    )))
                }
            };
            if !q.validate(1e-10).valid || !is_nonsignaling(&q, 1e-10) {
                return Err(CliError::Solver(
                    "constructed behavior failed validation".into(),
                ));
            }
            write_behavior(&out, &q)?;
            println!("BEHAVIOR={}", out.display());
            // Convenience: report the relevant functional value.
            match family.as_str() {
                "chsh-tsirelson" => {
                    println!("CHSH={}", evaluate(&make_chsh(), &q)?);
                }
                "cglmp-gamma" => {
                    println!("I_CGLMP={}", evaluate(&make_cglmp(3)?, &q)?);
                }
                "ghz-mermin" => {
                    let (_, f) = make_mermin(parties.expect("checked above"))?;
                    println!("MERMIN={}", evaluate(&f, &q)?);
                }
                _ => unreachable!(),
            }
            Ok(())
        }
        Command::CheckMonotones { seed, trials } => check_monotones(seed, trials),
    }
}

fn effective_jobs(jobs: usize) -> usize {
    if jobs > 0 {
        jobs
    } else {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    }
}

/// Randomized monotonicity sweep over the five free-operation classes.
fn check_monotones(seed: u64, trials: usize) -> CliResult<()> {
    use belldist_core::freeops::{convex_mix, input_enlarge, post_process, pre_process, relabel};

    let scen = Scenario::chsh();
    let a = enumerate_strategies(&scen)?;
    let pi = InputDistribution::uniform(scen.clone());
    let vertices = sampling::chsh_ns_vertices();
    let tol = 1e-9;
    let mut failures = 0usize;

    let mut rng = sampling::rng_from_seed(seed);
    let mut report = |name: &str, worst: f64| {
        let pass = worst <= tol;
        println!(
            "{name}: worst_increase={worst:.3e} {}",
            if pass { "PASS" } else { "FAIL" }
        );
        if !pass {
            failures += 1;
        }
    };

    // Relabeling invariance.
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let q = sampling::random_ns_chsh(&mut rng, &vertices);
        let r = sampling::random_relabeling(&mut rng, &scen);
        let before = nl(&q, &pi, &a)?.value;
        let after = nl(&relabel(&q, &r)?, &pi, &a)?.value;
        worst = worst.max((after - before).abs());
    }
    report("relabeling-invariance", worst);

    // Convex mixing with a local point.
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let q = sampling::random_ns_chsh(&mut rng, &vertices);
        let p = sampling::random_local_chsh(&mut rng, &vertices);
        let t: f64 = rng.random();
        let mix = convex_mix(&[(t, &q), (1.0 - t, &p)])?;
        let bound = t * nl(&q, &pi, &a)?.value;
        let after = nl(&mix, &pi, &a)?.value;
        worst = worst.max(after - bound);
    }
    report("local-mixing", worst);

    // Post-processing.
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let q = sampling::random_ns_chsh(&mut rng, &vertices);
        let ch = sampling::random_local_channel(&mut rng, &scen);
        let before = nl(&q, &pi, &a)?.value;
        let after = nl(&post_process(&q, &ch)?, &pi, &a)?.value;
        worst = worst.max(after - before);
    }
    report("post-processing", worst);

    // Restricted pre-processing.
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let q = sampling::random_ns_chsh(&mut rng, &vertices);
        let ch = sampling::random_input_channel(&mut rng, &scen);
        let before = nl(&q, &pi, &a)?.value;
        let after = nl(&pre_process(&q, &ch)?, &pi, &a)?.value;
        worst = worst.max(after - before);
    }
    report("pre-processing", worst);

    // Input enlarging.
    let mut worst = 0.0f64;
    let enlarged_scen = Scenario::new(vec![3, 2], vec![2, 2])?;
    let enlarged_a = enumerate_strategies(&enlarged_scen)?;
    let enlarged_pi = InputDistribution::uniform(enlarged_scen);
    for k in 0..trials {
        let q = sampling::random_ns_chsh(&mut rng, &vertices);
        let before = nl(&q, &pi, &a)?.value;
        let big = input_enlarge(&q, 0, k % 2)?;
        let after = nl(&big, &enlarged_pi, &enlarged_a)?.value;
        worst = worst.max(after - before);
    }
    report("input-enlarging", worst);

    if failures > 0 {
        Err(CliError::Solver(format!(
            "{failures} monotonicity classes failed"
        )))
    } else {
        Ok(())
    }
}
