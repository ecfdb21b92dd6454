//! Text formats for behaviors, Bell functionals and input distributions.
//!
//! Every file starts with a scenario header
//!
//! ```text
//! scenario N; m_1 ... m_N; d_1 ... d_N
//! ```
//!
//! Behavior and functional entries follow as `x_1 ... x_N a_1 ... a_N value`;
//! functionals carry an extra `local_bound <value|auto>` line right after
//! the header; input-distribution entries are `x_1 ... x_N weight`. Entries
//! not listed are zero, `#` starts a comment, duplicate entries are
//! rejected.

use std::fs;
use std::path::Path;

use belldist_core::inequalities::BellFunctional;
use belldist_core::scenario::{Behavior, InputDistribution, Scenario};

use crate::{CliError, CliResult};

fn parse_err(path: &Path, line: usize, msg: impl AsRef<str>) -> CliError {
    CliError::Parse(format!("{}:{line}: {}", path.display(), msg.as_ref()))
}

/// Logical (non-comment, non-blank) lines with their 1-based numbers.
fn logical_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            None
        } else {
            Some((i + 1, line))
        }
    })
}

fn parse_header(path: &Path, line_no: usize, line: &str) -> CliResult<Scenario> {
    let rest = line
        .strip_prefix("scenario")
        .ok_or_else(|| parse_err(path, line_no, "expected `scenario N; m...; d...`"))?;
    let fields: Vec<&str> = rest.split(';').collect();
    if fields.len() != 3 {
        return Err(parse_err(
            path,
            line_no,
            "header needs three `;`-separated groups",
        ));
    }
    let parties: usize = fields[0]
        .trim()
        .parse()
        .map_err(|_| parse_err(path, line_no, "bad party count"))?;
    let ints = |s: &str| -> CliResult<Vec<usize>> {
        s.split_whitespace()
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| parse_err(path, line_no, format!("bad integer `{t}`")))
            })
            .collect()
    };
    let inputs = ints(fields[1])?;
    let outputs = ints(fields[2])?;
    if inputs.len() != parties || outputs.len() != parties {
        return Err(parse_err(
            path,
            line_no,
            format!(
                "header announces {parties} parties but lists {} inputs and {} outputs",
                inputs.len(),
                outputs.len()
            ),
        ));
    }
    Scenario::new(inputs, outputs).map_err(|e| parse_err(path, line_no, e.to_string()))
}

fn parse_entry(
    path: &Path,
    line_no: usize,
    line: &str,
    scenario: &Scenario,
    with_outputs: bool,
) -> CliResult<(usize, f64)> {
    let parties = scenario.parties();
    let want = if with_outputs {
        2 * parties + 1
    } else {
        parties + 1
    };
    let tokens: Vec<&str> = line.split_whitespace().collect();
    if tokens.len() != want {
        return Err(parse_err(
            path,
            line_no,
            format!("expected {want} fields, found {}", tokens.len()),
        ));
    }
    let index = |t: &str| -> CliResult<usize> {
        t.parse::<usize>()
            .map_err(|_| parse_err(path, line_no, format!("bad index `{t}`")))
    };
    let x: Vec<usize> = tokens[..parties]
        .iter()
        .map(|t| index(t))
        .collect::<CliResult<_>>()?;
    let value: f64 = tokens[want - 1]
        .parse()
        .map_err(|_| parse_err(path, line_no, format!("bad value `{}`", tokens[want - 1])))?;
    if !value.is_finite() {
        return Err(parse_err(path, line_no, "value must be finite"));
    }
    let idx = if with_outputs {
        let a: Vec<usize> = tokens[parties..2 * parties]
            .iter()
            .map(|t| index(t))
            .collect::<CliResult<_>>()?;
        scenario
            .flat_index(&x, &a)
            .map_err(|e| parse_err(path, line_no, e.to_string()))?
    } else {
        scenario
            .input_tuple_index(&x)
            .map_err(|e| parse_err(path, line_no, e.to_string()))?
    };
    Ok((idx, value))
}

/// Read a behavior file and validate it at `tol`.
pub fn read_behavior(path: &Path, tol: f64) -> CliResult<Behavior> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    let mut lines = logical_lines(&text);
    let (line_no, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "empty file"))?;
    let scenario = parse_header(path, line_no, header)?;
    let mut values = vec![0.0; scenario.dimension()];
    let mut seen = vec![false; scenario.dimension()];
    for (line_no, line) in lines {
        let (idx, value) = parse_entry(path, line_no, line, &scenario, true)?;
        if seen[idx] {
            return Err(parse_err(path, line_no, "duplicate entry"));
        }
        seen[idx] = true;
        values[idx] = value;
    }
    let behavior =
        Behavior::from_values(scenario, values).map_err(|e| parse_err(path, 0, e.to_string()))?;
    let report = behavior.validate(tol);
    if !report.valid {
        return Err(CliError::Parse(format!(
            "{}: not a valid behavior (worst violation {:.3e}, tolerance {:.1e})",
            path.display(),
            report.max_violation,
            tol
        )));
    }
    Ok(behavior)
}

/// Write a behavior file (non-zero entries only).
pub fn write_behavior(path: &Path, q: &Behavior) -> CliResult<()> {
    let mut out = String::new();
    write_scenario_header(&mut out, q.scenario());
    let mut idx = 0usize;
    for x in q.scenario().input_tuples_iter() {
        for a in q.scenario().output_tuples_iter() {
            let v = q.values()[idx];
            idx += 1;
            if v != 0.0 {
                push_entry(&mut out, &x, Some(&a), v);
            }
        }
    }
    fs::write(path, out).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

/// Read a functional file. `local_bound auto` recomputes the bound by
/// strategy enumeration.
pub fn read_functional(path: &Path) -> CliResult<BellFunctional> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    let mut lines = logical_lines(&text);
    let (line_no, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "empty file"))?;
    let scenario = parse_header(path, line_no, header)?;
    let (line_no, bound_line) = lines
        .next()
        .ok_or_else(|| parse_err(path, line_no, "missing local_bound line"))?;
    let bound_token = bound_line
        .strip_prefix("local_bound")
        .ok_or_else(|| parse_err(path, line_no, "expected `local_bound <value|auto>`"))?
        .trim();
    let local_bound =
        if bound_token == "auto" {
            None
        } else {
            Some(bound_token.parse::<f64>().map_err(|_| {
                parse_err(path, line_no, format!("bad local bound `{bound_token}`"))
            })?)
        };
    let mut coeffs = vec![0.0; scenario.dimension()];
    let mut seen = vec![false; scenario.dimension()];
    for (line_no, line) in lines {
        let (idx, value) = parse_entry(path, line_no, line, &scenario, true)?;
        if seen[idx] {
            return Err(parse_err(path, line_no, "duplicate entry"));
        }
        seen[idx] = true;
        coeffs[idx] = value;
    }
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "functional".into());
    BellFunctional::from_parts(scenario, coeffs, local_bound, label)
        .map_err(|e| parse_err(path, 0, e.to_string()))
}

/// Write a functional file with its stored local bound.
pub fn write_functional(path: &Path, f: &BellFunctional) -> CliResult<()> {
    let mut out = String::new();
    write_scenario_header(&mut out, f.scenario());
    out.push_str(&format!("local_bound {}\n", f.local_bound()));
    let mut idx = 0usize;
    for x in f.scenario().input_tuples_iter() {
        for a in f.scenario().output_tuples_iter() {
            let v = f.coefficients()[idx];
            idx += 1;
            if v != 0.0 {
                push_entry(&mut out, &x, Some(&a), v);
            }
        }
    }
    fs::write(path, out).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

/// Read an input distribution over the given scenario.
pub fn read_input_distribution(path: &Path, expected: &Scenario) -> CliResult<InputDistribution> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    let mut lines = logical_lines(&text);
    let (line_no, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "empty file"))?;
    let scenario = parse_header(path, line_no, header)?;
    if &scenario != expected {
        return Err(parse_err(
            path,
            line_no,
            "input distribution scenario does not match the behavior",
        ));
    }
    let mut weights = vec![0.0; scenario.input_tuples()];
    let mut seen = vec![false; scenario.input_tuples()];
    for (line_no, line) in lines {
        let (idx, value) = parse_entry(path, line_no, line, &scenario, false)?;
        if seen[idx] {
            return Err(parse_err(path, line_no, "duplicate entry"));
        }
        seen[idx] = true;
        weights[idx] = value;
    }
    InputDistribution::from_weights(scenario, weights)
        .map_err(|e| parse_err(path, 0, e.to_string()))
}

fn write_scenario_header(out: &mut String, s: &Scenario) {
    out.push_str("scenario ");
    out.push_str(&s.parties().to_string());
    out.push(';');
    for m in s.inputs() {
        out.push(' ');
        out.push_str(&m.to_string());
    }
    out.push(';');
    for d in s.outputs() {
        out.push(' ');
        out.push_str(&d.to_string());
    }
    out.push('\n');
}

fn push_entry(out: &mut String, x: &[usize], a: Option<&[usize]>, v: f64) {
    for xi in x {
        out.push_str(&xi.to_string());
        out.push(' ');
    }
    if let Some(a) = a {
        for ai in a {
            out.push_str(&ai.to_string());
            out.push(' ');
        }
    }
    out.push_str(&format!("{v}\n"));
}

#[cfg(test)]
mod tests {
    use super::*;
    use belldist_core::inequalities::make_chsh;
    use belldist_core::scenario::make_pr_box;

    fn tmp(name: &str) -> std::path::PathBuf {
        let mut p = std::env::temp_dir();
        p.push(format!("belldist-format-{}-{name}", std::process::id()));
        p
    }

    #[test]
    fn behavior_round_trip() {
        let path = tmp("pr.behavior");
        write_behavior(&path, &make_pr_box()).unwrap();
        let back = read_behavior(&path, 1e-9).unwrap();
        assert_eq!(back.values(), make_pr_box().values());
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn functional_round_trip_preserves_bound() {
        let path = tmp("chsh.functional");
        let f = make_chsh();
        write_functional(&path, &f).unwrap();
        let back = read_functional(&path).unwrap();
        assert_eq!(back.coefficients(), f.coefficients());
        assert_eq!(back.local_bound(), f.local_bound());
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn inconsistent_arity_is_a_parse_error() {
        let path = tmp("bad.behavior");
        std::fs::write(&path, "scenario 2; 2 2; 2 2\n0 0 0 0.5\n").unwrap();
        let err = read_behavior(&path, 1e-9).unwrap_err();
        assert!(matches!(err, CliError::Parse(_)));
        assert!(err.to_string().contains(":2:"), "{err}");
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn invalid_distribution_rejected() {
        let path = tmp("invalid.behavior");
        std::fs::write(&path, "scenario 2; 2 2; 2 2\n0 0 0 0 0.9\n").unwrap();
        assert!(read_behavior(&path, 1e-9).is_err());
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn comments_and_blanks_are_ignored() {
        let path = tmp("comments.behavior");
        std::fs::write(
            &path,
            "# a behavior\nscenario 1; 1; 2\n\n0 0 0.5 # half\n0 1 0.5\n",
        )
        .unwrap();
        let b = read_behavior(&path, 1e-9).unwrap();
        assert_eq!(b.values(), &[0.5, 0.5]);
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn duplicate_entries_rejected() {
        let path = tmp("dup.behavior");
        std::fs::write(&path, "scenario 1; 1; 2\n0 0 0.5\n0 0 0.5\n").unwrap();
        let err = read_behavior(&path, 1e-9).unwrap_err();
        assert!(err.to_string().contains("duplicate"));
        std::fs::remove_file(&path).ok();
    }
}
