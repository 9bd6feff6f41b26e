//! Per-subcommand implementations.

use crate::output::{config_echo, finite_or_marker, parse_grid, parse_list, write_json, write_output};
use crate::sweep::{parse_sweep, run_jobs, substitute, SweepSpec};
use crate::{Cli, Command, CommonArgs};
use anyhow::{anyhow, bail, Context, Result};
use kocheck::admissibility::check_admissible_default;
use kocheck::conditions::{
    self, decay_curve, mean_bound, InverseError, ProblemSpec, VerdictOutcome,
};
use kocheck::expr::{parse, NonlinearityExpr};
use kocheck::harness::{
    annulus_ratio, doubling_sequence, envelope_check, tail_bound_check, EnvelopeCase,
};
use kocheck::quad::{self, BigGError};
use kocheck::sim::{integrate_radial, verify_counterexample, IntegrationOptions, ProfileStatus};
use serde_json::{json, Value};
use std::process::ExitCode;

pub fn run(cli: Cli) -> Result<ExitCode> {
    let code = match cli.command {
        Command::Classify { common } => classify_cmd(&common)?,
        Command::GTable {
            common,
            t_min,
            t_max,
            count,
        } => g_table_cmd(&common, t_min, t_max, count)?,
        Command::Bound {
            common,
            r,
            r_grid,
            c,
            k,
            epsilon,
        } => bound_cmd(&common, r, r_grid.as_deref(), c, k, epsilon)?,
        Command::Simulate {
            common,
            u0,
            r_max,
            rtol,
            higher,
        } => simulate_cmd(&common, u0, r_max, rtol, higher.as_deref())?,
        Command::VerifyExample {
            common,
            nu,
            c0,
            k,
            r_grid,
        } => verify_cmd(&common, nu, c0, &k, r_grid.as_deref())?,
        Command::Harness {
            common,
            lemma,
            u0,
            r,
            r1,
            r2,
            psi,
            gamma,
            theta,
            alpha,
            nu,
            m1,
            m2,
        } => harness_cmd(
            &common, &lemma, u0, r, r1, r2, psi, gamma, theta, alpha, nu, m1, m2,
        )?,
    };
    Ok(ExitCode::from(code))
}

fn require_g(common: &CommonArgs) -> Result<String> {
    common
        .g
        .clone()
        .ok_or_else(|| anyhow!("--g is required for this command"))
}

fn parse_g(src: &str) -> Result<NonlinearityExpr> {
    parse(src).map_err(|e| anyhow!("{e}"))
}

fn sweep_of(common: &CommonArgs) -> Result<Option<SweepSpec>> {
    common.sweep.as_deref().map(parse_sweep).transpose()
}

fn require_json(common: &CommonArgs) -> Result<()> {
    if common.format != "json" {
        bail!("--format {} is not supported for this command (use json)", common.format);
    }
    Ok(())
}

/// Collapse per-job exit codes: errors dominate, then inconclusive.
fn combine_codes(codes: impl Iterator<Item = u8>) -> u8 {
    codes.fold(0, |acc, c| match (acc, c) {
        (1, _) | (_, 1) => 1,
        (2, _) | (_, 2) => 2,
        _ => 0,
    })
}

fn emit(common: &CommonArgs, results: Vec<(Value, u8)>) -> Result<u8> {
    let code = combine_codes(results.iter().map(|r| r.1));
    let doc = if results.len() == 1 {
        results.into_iter().next().unwrap().0
    } else {
        Value::Array(results.into_iter().map(|r| r.0).collect())
    };
    write_json(&common.out, &doc)?;
    Ok(code)
}

// ---------------------------------------------------------------------------
// classify
// ---------------------------------------------------------------------------

fn classify_cmd(common: &CommonArgs) -> Result<u8> {
    require_json(common)?;
    let template = require_g(common)?;
    let sweep = sweep_of(common)?;

    let jobs: Vec<String> = match &sweep {
        Some(s) if s.name == "lambda" || s.name == "nu" => s
            .values
            .iter()
            .map(|v| substitute(&template, &s.name, *v))
            .collect(),
        Some(s) => bail!("classify does not sweep over `{}`", s.name),
        None => vec![template.clone()],
    };

    let results = run_jobs(jobs.len(), common.jobs, |i| {
        classify_one(&jobs[i], common)
            .unwrap_or_else(|e| (json!({"error": e.to_string()}), 1))
    });
    emit(common, results)
}

fn classify_one(g_src: &str, common: &CommonArgs) -> Result<(Value, u8)> {
    let g = parse_g(g_src)?;
    let admissibility = check_admissible_default(&g);
    let spec = ProblemSpec::new(common.m, common.n, common.coeff_bound, g);
    let verdict = conditions::classify(&spec, common.tol);

    let code = match verdict.outcome {
        VerdictOutcome::Inconclusive => 2,
        _ if !admissibility.all_pass() => 2,
        _ => 0,
    };
    // the full sample grid is bulky; echo its envelope only
    let grid_summary = json!({
        "points": admissibility.grid.len(),
        "min": admissibility.grid.first(),
        "max": admissibility.grid.last(),
    });
    let doc = json!({
        "config": config_echo("classify", json!({
            "g": g_src, "m": common.m, "n": common.n, "A": common.coeff_bound,
            "tol": common.tol,
        })),
        "admissible": admissibility.all_pass(),
        "admissibility": {
            "nondecreasing": admissibility.nondecreasing,
            "convex": admissibility.convex,
            "positive_on_positive": admissibility.positive_on_positive,
            "grid": grid_summary,
            "eval_failures": admissibility.eval_failures,
        },
        "verdict": verdict,
    });
    Ok((doc, code))
}

// ---------------------------------------------------------------------------
// g-table
// ---------------------------------------------------------------------------

fn g_table_cmd(common: &CommonArgs, t_min: f64, t_max: f64, count: usize) -> Result<u8> {
    let g_src = require_g(common)?;
    let g = parse_g(&g_src)?;
    match quad::big_g_table(&g, common.m, t_min, t_max, count, common.tol) {
        Ok(table) => {
            if common.format == "csv" {
                write_output(&common.out, &table.to_csv())?;
            } else {
                let doc = json!({
                    "config": config_echo("g-table", json!({
                        "g": g_src, "m": common.m, "tol": common.tol,
                        "t_min": t_min, "t_max": t_max, "count": count,
                    })),
                    "t_grid": table.t_grid,
                    "g_values": table.g_values.iter().map(|&v| finite_or_marker(v)).collect::<Vec<_>>(),
                    "unbounded_at_zero": table.unbounded_at_zero,
                });
                write_json(&common.out, &doc)?;
            }
            Ok(0)
        }
        Err(BigGError::Inconclusive(reason)) => {
            write_json(
                &common.out,
                &json!({"status": "inconclusive", "reason": reason}),
            )?;
            Ok(2)
        }
        Err(e) => Err(anyhow!("{e}")),
    }
}

// ---------------------------------------------------------------------------
// bound
// ---------------------------------------------------------------------------

fn bound_cmd(
    common: &CommonArgs,
    r: Option<f64>,
    r_grid: Option<&str>,
    c: f64,
    k: f64,
    epsilon: Option<f64>,
) -> Result<u8> {
    let g_src = require_g(common)?;
    let g = parse_g(&g_src)?;
    let spec = ProblemSpec::new(common.m, common.n, common.coeff_bound, g);
    let config = config_echo("bound", json!({
        "g": g_src, "m": common.m, "n": common.n, "A": common.coeff_bound,
        "tol": common.tol, "C": c, "k": k,
    }));

    let inconclusive = |e: &InverseError| matches!(e, InverseError::Inconclusive(_));

    match (r, r_grid) {
        (Some(radius), None) => {
            require_json(common)?;
            match mean_bound(&spec, radius, c, k, common.tol) {
                Ok(bound) => {
                    write_json(&common.out, &json!({
                        "config": config, "r": radius, "bound": bound,
                    }))?;
                    Ok(0)
                }
                Err(e) if inconclusive(&e) => {
                    write_json(&common.out, &json!({"status": "inconclusive", "reason": e.to_string()}))?;
                    Ok(2)
                }
                Err(e) => Err(anyhow!("{e}")),
            }
        }
        (None, Some(grid_spec)) => {
            let grid = parse_grid(grid_spec)?;
            match decay_curve(&spec, &grid, c, k, epsilon, common.tol) {
                Ok(curve) => {
                    if common.format == "csv" {
                        write_output(&common.out, &curve.to_csv())?;
                    } else {
                        write_json(&common.out, &json!({
                            "config": config,
                            "r_grid": curve.r_grid,
                            "bounds": curve.bounds,
                            "nonincreasing": curve.nonincreasing,
                            "final_below_epsilon": curve.final_below_epsilon,
                        }))?;
                    }
                    Ok(0)
                }
                Err(e) if inconclusive(&e) => {
                    write_json(&common.out, &json!({"status": "inconclusive", "reason": e.to_string()}))?;
                    Ok(2)
                }
                Err(e) => Err(anyhow!("{e}")),
            }
        }
        _ => bail!("bound needs exactly one of --r or --r-grid"),
    }
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

fn simulate_cmd(
    common: &CommonArgs,
    u0: f64,
    r_max: f64,
    rtol: f64,
    higher: Option<&str>,
) -> Result<u8> {
    let g_src = require_g(common)?;
    if common.m % 2 != 0 {
        bail!("simulate requires even m (the radial polyharmonic model)");
    }
    let initial_higher = higher.map(parse_list).transpose()?.unwrap_or_default();
    let sweep = sweep_of(common)?;
    let u0_values: Vec<f64> = match &sweep {
        Some(s) if s.name == "u0" => s.values.clone(),
        Some(s) => bail!("simulate does not sweep over `{}`", s.name),
        None => vec![u0],
    };

    let results = run_jobs(u0_values.len(), common.jobs, |i| {
        simulate_one(common, &g_src, u0_values[i], r_max, rtol, &initial_higher)
            .unwrap_or_else(|e| (json!({"error": e.to_string()}), 1))
    });
    emit_simulate(common, results)
}

fn emit_simulate(common: &CommonArgs, results: Vec<(Value, u8)>) -> Result<u8> {
    if common.format == "csv" {
        // CSV output carries the JSON header as a leading comment line
        let mut payload = String::new();
        for (doc, _) in &results {
            payload.push_str(&format!(
                "# {}\n{}",
                doc["header"],
                doc["csv"].as_str().unwrap_or("")
            ));
        }
        write_output(&common.out, &payload)?;
        Ok(combine_codes(results.iter().map(|r| r.1)))
    } else {
        let stripped: Vec<(Value, u8)> = results
            .into_iter()
            .map(|(mut doc, code)| {
                if let Value::Object(map) = &mut doc {
                    map.remove("csv");
                }
                (doc, code)
            })
            .collect();
        emit(common, stripped)
    }
}

fn simulate_one(
    common: &CommonArgs,
    g_src: &str,
    u0: f64,
    r_max: f64,
    rtol: f64,
    initial_higher: &[f64],
) -> Result<(Value, u8)> {
    let g = parse_g(g_src)?;
    let spec = ProblemSpec::new(common.m, common.n, common.coeff_bound, g);
    let opts = IntegrationOptions {
        r_max,
        rtol,
        initial_higher: initial_higher.to_vec(),
        ..Default::default()
    };
    let profile = integrate_radial(&spec, u0, &opts);
    let code = match profile.status {
        ProfileStatus::Aborted { .. } => 2,
        _ => 0,
    };
    let header = json!({
        "status": profile.status,
        "n": profile.n,
        "m": profile.m,
        "max_radius": profile.max_radius(),
        "steps": profile.steps.len(),
    });
    let doc = json!({
        "config": config_echo("simulate", json!({
            "g": g_src, "m": common.m, "n": common.n, "A": common.coeff_bound,
            "u0": u0, "r_max": r_max, "rtol": rtol, "higher": initial_higher,
        })),
        "header": header,
        "csv": profile.to_csv(),
    });
    Ok((doc, code))
}

// ---------------------------------------------------------------------------
// verify-example
// ---------------------------------------------------------------------------

fn verify_cmd(
    common: &CommonArgs,
    nu: f64,
    c0: f64,
    k: &str,
    r_grid: Option<&str>,
) -> Result<u8> {
    require_json(common)?;
    if common.m % 2 != 0 {
        bail!("verify-example requires even m");
    }
    let half_m = common.m / 2;
    let grid = match r_grid {
        Some(spec) => parse_grid(spec)?,
        None => kocheck::sim::default_r_grid(),
    };
    let sweep = sweep_of(common)?;

    #[derive(Clone, Copy)]
    struct Job {
        nu: f64,
        k: Option<f64>,
    }
    let base_k = match k {
        "auto" => None,
        other => Some(
            other
                .parse::<f64>()
                .with_context(|| format!("--k must be a number or `auto`, got `{other}`"))?,
        ),
    };
    let jobs: Vec<Job> = match &sweep {
        Some(s) if s.name == "k" => s
            .values
            .iter()
            .map(|&v| Job { nu, k: Some(v) })
            .collect(),
        Some(s) if s.name == "nu" => s
            .values
            .iter()
            .map(|&v| Job { nu: v, k: base_k })
            .collect(),
        Some(s) => bail!("verify-example does not sweep over `{}`", s.name),
        None => vec![Job { nu, k: base_k }],
    };

    let results = run_jobs(jobs.len(), common.jobs, |i| {
        let job = jobs[i];
        let report = verify_counterexample(half_m, common.n, job.nu, c0, job.k, &grid);
        let doc = json!({
            "config": config_echo("verify-example", json!({
                "m": common.m, "n": common.n, "nu": job.nu, "c0": c0,
                "k": job.k.map(|v| v.to_string()).unwrap_or_else(|| "auto".into()),
                "r_grid_len": grid.len(),
            })),
            "pass": report.pass,
            "k": report.k,
            "min_residual": finite_or_marker(report.min_residual),
            "min_relative": finite_or_marker(report.min_relative),
            "argmin_r": report.argmin_r,
            "certified_r_max": report.certified_r_max,
            "overflow_r": report.overflow_r,
            "attempts": report.attempts,
        });
        (doc, 0)
    });
    emit(common, results)
}

// ---------------------------------------------------------------------------
// harness
// ---------------------------------------------------------------------------

#[allow(clippy::too_many_arguments)]
fn harness_cmd(
    common: &CommonArgs,
    lemma: &str,
    u0: f64,
    r: Option<f64>,
    r1: Option<f64>,
    r2: Option<f64>,
    psi: Option<String>,
    gamma: Option<String>,
    theta: f64,
    alpha: f64,
    nu: f64,
    m1: f64,
    m2: f64,
) -> Result<u8> {
    require_json(common)?;
    let sweep = sweep_of(common)?;
    let u0_values: Vec<f64> = match &sweep {
        Some(s) if s.name == "u0" => s.values.clone(),
        Some(s) => bail!("harness does not sweep over `{}`", s.name),
        None => vec![u0],
    };

    if lemma == "34" {
        let case = EnvelopeCase {
            psi: parse_g(&psi.ok_or_else(|| anyhow!("--psi is required for --lemma 34"))?)?,
            gamma: parse_g(&gamma.ok_or_else(|| anyhow!("--gamma is required for --lemma 34"))?)?,
            theta,
            alpha,
            nu,
            m1,
            m2,
        };
        let report = envelope_check(&case).map_err(|e| anyhow!("{e}"))?;
        let doc = json!({
            "config": config_echo("harness", json!({
                "lemma": lemma, "theta": theta, "alpha": alpha, "nu": nu,
                "m1": m1, "m2": m2,
            })),
            "lemma": lemma,
            "inputs": case,
            "empirical_constant": report.empirical_constant,
            "pass": report.pass,
            "witnesses": { "lhs": report.lhs, "rhs_core": report.rhs_core },
        });
        write_json(&common.out, &doc)?;
        return Ok(if report.pass { 0 } else { 2 });
    }

    let g_src = require_g(common)?;
    if common.m % 2 != 0 {
        bail!("harness lemmas 31/33/35 simulate the radial model and need even m");
    }

    let results = run_jobs(u0_values.len(), common.jobs, |i| {
        harness_profile_one(
            common, lemma, &g_src, u0_values[i], r, r1, r2,
        )
        .unwrap_or_else(|e| (json!({"error": e.to_string()}), 1))
    });
    emit(common, results)
}

fn harness_profile_one(
    common: &CommonArgs,
    lemma: &str,
    g_src: &str,
    u0: f64,
    r: Option<f64>,
    r1: Option<f64>,
    r2: Option<f64>,
) -> Result<(Value, u8)> {
    let g = parse_g(g_src)?;
    let spec = ProblemSpec::new(common.m, common.n, common.coeff_bound, g);

    let coverage = match lemma {
        "31" => {
            let r2v = r2.ok_or_else(|| anyhow!("--r2 is required for --lemma 31"))?;
            1.05 * r2v
        }
        "33" | "35" => {
            let rv = r.ok_or_else(|| anyhow!("--r is required for --lemma {lemma}"))?;
            2.2 * rv
        }
        other => bail!("unknown --lemma `{other}` (use 31, 33, 34 or 35)"),
    };
    let profile = integrate_radial(
        &spec,
        u0,
        &IntegrationOptions {
            r_max: coverage,
            ..Default::default()
        },
    );
    if profile.max_radius() < coverage {
        bail!(
            "profile reaches only r = {:.6e} (status {:?}); choose a smaller radius",
            profile.max_radius(),
            profile.status
        );
    }

    let config = config_echo("harness", json!({
        "lemma": lemma, "g": g_src, "m": common.m, "n": common.n,
        "A": common.coeff_bound, "u0": u0, "r": r, "r1": r1, "r2": r2,
    }));
    let doc = match lemma {
        "31" => {
            let ratio = annulus_ratio(&profile, &spec, r1.unwrap_or(1.0), r2.unwrap())
                .map_err(|e| anyhow!("{e}"))?;
            json!({
                "config": config,
                "lemma": lemma,
                "inputs": {"u0": u0, "r1": r1.unwrap_or(1.0), "r2": r2.unwrap()},
                "empirical_constant": ratio,
                "pass": ratio > 0.0,
                "witnesses": {"profile_status": profile.status},
            })
        }
        "33" => {
            let trace = doubling_sequence(&profile, &spec, r.unwrap())
                .map_err(|e| anyhow!("{e}"))?;
            json!({
                "config": config,
                "lemma": lemma,
                "inputs": {"u0": u0, "r": r.unwrap()},
                "empirical_constant": trace.empirical_c,
                "pass": trace.empirical_c > 0.0,
                "witnesses": trace,
            })
        }
        "35" => {
            let report = tail_bound_check(&profile, &spec, r.unwrap())
                .map_err(|e| anyhow!("{e}"))?;
            json!({
                "config": config,
                "lemma": lemma,
                "inputs": {"u0": u0, "r": r.unwrap()},
                "empirical_constant": report.empirical_constant,
                "pass": report.empirical_constant > 0.0,
                "witnesses": {"j_at_base": report.j_at_base, "lhs": report.lhs},
            })
        }
        _ => unreachable!(),
    };
    let pass = doc["pass"].as_bool().unwrap_or(false);
    Ok((doc, if pass { 0 } else { 2 }))
}
