//! Grid scans with ordered CSV output and optional parallel evaluation.

use std::fs;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use belldist_core::inequalities::{evaluate, make_cglmp, BellFunctional};
use belldist_core::measures::{
    kl_divergence, nl, nl_given_value, nl_kl, pinsker_bound, ConstrainedNl, NlKlOptions,
};
use belldist_core::quantum::{born_behavior, cglmp_setup};
use belldist_core::scenario::{enumerate_strategies, InputDistribution, StrategyMatrix};

use crate::{CliError, CliResult};

/// Evaluate `f` on `0..count`, in parallel when `jobs > 1`, returning the
/// results in index order regardless of scheduling.
pub fn ordered_map<T, F>(count: usize, jobs: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let jobs = jobs.max(1).min(count.max(1));
    if jobs <= 1 {
        return (0..count).map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<T>>> = Mutex::new((0..count).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= count {
                    break;
                }
                let value = f(i);
                slots.lock().expect("worker poisoned")[i] = Some(value);
            });
        }
    });
    slots
        .into_inner()
        .expect("worker poisoned")
        .into_iter()
        .map(|v| v.expect("every slot filled"))
        .collect()
}

/// Evenly spaced grid including both endpoints.
pub fn grid(from: f64, to: f64, steps: usize) -> CliResult<Vec<f64>> {
    if steps < 2 {
        return Err(CliError::Usage("a scan needs at least 2 steps".into()));
    }
    if !(from.is_finite() && to.is_finite()) || from > to {
        return Err(CliError::Usage(format!("bad grid [{from}, {to}]")));
    }
    Ok((0..steps)
        .map(|k| from + (to - from) * k as f64 / (steps - 1) as f64)
        .collect())
}

/// One row of a functional-value scan.
pub struct ScanRow {
    pub value: f64,
    pub nl: Option<f64>,
}

/// Sweep the constrained program over functional values.
pub fn functional_scan(
    f: &BellFunctional,
    a: &StrategyMatrix,
    pi: &InputDistribution,
    values: &[f64],
    jobs: usize,
) -> Vec<CliResult<ScanRow>> {
    ordered_map(values.len(), jobs, |i| {
        let c = values[i];
        match nl_given_value(f, c, pi, a) {
            Ok(ConstrainedNl::Optimal { value, .. }) => Ok(ScanRow {
                value: c,
                nl: Some(value),
            }),
            Ok(ConstrainedNl::Infeasible) => Ok(ScanRow { value: c, nl: None }),
            Err(e) => Err(CliError::Solver(e.to_string())),
        }
    })
}

pub fn write_scan_csv(path: &Path, rows: &[CliResult<ScanRow>]) -> CliResult<()> {
    let mut out = String::from("value,nl,status\n");
    for row in rows {
        match row {
            Ok(ScanRow { value, nl: Some(v) }) => {
                out.push_str(&format!("{value},{v},ok\n"));
            }
            Ok(ScanRow { value, nl: None }) => {
                out.push_str(&format!("{value},,infeasible\n"));
            }
            Err(e) => {
                out.push_str(&format!(",,error: {e}\n"));
            }
        }
    }
    fs::write(path, out).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

/// One row of the two-qutrit family scan.
pub struct GammaRow {
    pub gamma: f64,
    pub i_cglmp: f64,
    pub nl: f64,
    /// Conditional-gradient minimum of the relative-entropy measure.
    pub kl_min: f64,
    /// Relative entropy at the trace-distance minimizer (an upper bound).
    pub kl_upper: f64,
    pub pinsker: f64,
}

/// Scan the `γ`-family of two-qutrit states: functional value, trace
/// distance, relative-entropy measure with its upper bound, and the
/// Pinsker floor.
pub fn gamma_scan(gammas: &[f64], jobs: usize) -> CliResult<Vec<CliResult<GammaRow>>> {
    let f = make_cglmp(3).map_err(CliError::from)?;
    let scen = f.scenario().clone();
    let a = enumerate_strategies(&scen).map_err(CliError::from)?;
    let pi = InputDistribution::uniform(scen);
    Ok(ordered_map(gammas.len(), jobs, |i| {
        let gamma = gammas[i];
        let run = || -> CliResult<GammaRow> {
            let (state, meas) = cglmp_setup(gamma)?;
            let q = born_behavior(&state, &meas)?;
            let i_cglmp = evaluate(&f, &q)?;
            let tracked = nl(&q, &pi, &a)?;
            let kl = nl_kl(&q, &pi, &a, &NlKlOptions::default())?;
            let joint_q = q.to_joint(&pi)?;
            let joint_p = tracked.closest_local.to_joint(&pi)?;
            let kl_upper = kl_divergence(&joint_q, &joint_p)?;
            Ok(GammaRow {
                gamma,
                i_cglmp,
                nl: tracked.value,
                kl_min: kl.value,
                kl_upper,
                pinsker: pinsker_bound(tracked.value)?,
            })
        };
        run()
    }))
}

pub fn write_gamma_csv(path: &Path, rows: &[CliResult<GammaRow>]) -> CliResult<()> {
    let mut out = String::from("gamma,i_cglmp,nl,kl_min,kl_upper,pinsker,status\n");
    for row in rows {
        match row {
            Ok(r) => out.push_str(&format!(
                "{},{},{},{},{},{},ok\n",
                r.gamma, r.i_cglmp, r.nl, r.kl_min, r.kl_upper, r.pinsker
            )),
            Err(e) => out.push_str(&format!(",,,,,,error: {e}\n")),
        }
    }
    fs::write(path, out).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

/// Emit a plotting script next to a CSV.
pub fn write_gnuplot(csv_path: &Path, columns: &[(usize, &str)], title: &str) -> CliResult<()> {
    let gp_path = csv_path.with_extension("gp");
    let csv = csv_path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let mut out = String::new();
    out.push_str("set datafile separator ','\n");
    out.push_str("set key autotitle columnhead\n");
    out.push_str(&format!("set title '{title}'\n"));
    out.push_str("plot ");
    let plots: Vec<String> = columns
        .iter()
        .map(|(col, name)| format!("'{csv}' using 1:{col} with lines title '{name}'"))
        .collect();
    out.push_str(&plots.join(", \\\n     "));
    out.push('\n');
    fs::write(&gp_path, out).map_err(|e| CliError::Parse(format!("{}: {e}", gp_path.display())))
}
