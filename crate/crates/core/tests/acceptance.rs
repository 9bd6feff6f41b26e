//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//!
//! Run with `cargo test -p kocheck --test acceptance -- --nocapture` to see
//! the per-criterion lines.

use kocheck::conditions::{
    big_g_inverse, classify, decay_curve, ko_equivalence, InverseError, ProblemSpec,
    VerdictOutcome,
};
use kocheck::expr::{log_power, parse, power_law, NonlinearityExpr};
use kocheck::harness::{
    annulus_ratio, ball_mean, doubling_sequence, envelope_check, normalized_mass, tail_bound_check,
    EnvelopeCase, MassFunction,
};
use kocheck::quad::{big_g, improper_integral, IntegralStatus};
use kocheck::sim::{
    apply_polyharmonic, counterexample_profile, default_r_grid, fd_laplacian, integrate_radial,
    jet_eval, verify_counterexample, IntegrationOptions, ProfileStatus, RadialProfile,
};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

fn report(criterion: &str, pass: bool, details: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("[{tag}] criterion {criterion}: {details}");
}

fn finish(criterion: &str, pass: bool, failures: &[String]) {
    for f in failures.iter().take(25) {
        println!("  {f}");
    }
    assert!(pass, "criterion {criterion} failed: {failures:?}");
}

fn spec(g: NonlinearityExpr, m: u32, n: u32) -> ProblemSpec {
    ProblemSpec::new(m, n, 1.0, g)
}

// ---------------------------------------------------------------------------
// 1. Power-law sharp boundary
// ---------------------------------------------------------------------------

#[test]
fn criterion_01_power_law_boundary() {
    let start = Instant::now();
    let lambdas = [1.1, 1.5, 2.0, 3.0, 4.0, 6.0];
    let ms = [1u32, 2, 4];
    let ns = [1u32, 2, 3, 5, 8];
    let mut checked = 0;
    let mut in_band = 0;
    let mut failures = Vec::new();

    for &lambda in &lambdas {
        for &m in &ms {
            for &n in &ns {
                let s = spec(power_law(1.0, lambda), m, n);
                let verdict = classify(&s, 1e-6);
                let margin = lambda * (n as f64 - m as f64) - n as f64;
                if margin.abs() < 0.05 * n as f64 {
                    in_band += 1; // boundary band: Inconclusive is allowed
                    continue;
                }
                let expect_trivial = lambda > 1.0 && margin <= 0.0;
                let got_trivial = verdict.outcome == VerdictOutcome::OnlyTrivialSolutions;
                checked += 1;
                if expect_trivial != got_trivial {
                    failures.push(format!(
                        "(lambda={lambda}, m={m}, n={n}) -> {:?}, expected trivial={expect_trivial}",
                        verdict.outcome
                    ));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = failures.is_empty() && elapsed.as_secs() < 60;
    report(
        "1 (power-law sharp boundary)",
        pass,
        &format!(
            "{checked} off-band points exact, {in_band} boundary-band points tolerated, {} misclassifications, {:.2?}",
            failures.len(),
            elapsed
        ),
    );
    finish("1", pass, &failures);
}

// ---------------------------------------------------------------------------
// 2. Log-power sharp boundary
// ---------------------------------------------------------------------------

#[test]
fn criterion_02_log_power_boundary() {
    let start = Instant::now();
    let mut checked = 0;
    let mut failures = Vec::new();
    for m in [2u32, 4] {
        let nus = [m as f64 - 1.0, m as f64, m as f64 + 0.5, m as f64 + 2.0];
        for &nu in &nus {
            for n in 1..=(m + 2) {
                let s = spec(log_power(1.0, nu), m, n);
                let verdict = classify(&s, 1e-6);
                let expect_trivial = nu > m as f64;
                let got_trivial = verdict.outcome == VerdictOutcome::OnlyTrivialSolutions;
                checked += 1;
                if expect_trivial != got_trivial {
                    failures.push(format!(
                        "(nu={nu}, m={m}, n={n}) -> {:?}, expected trivial={expect_trivial}",
                        verdict.outcome
                    ));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = failures.is_empty() && elapsed.as_secs() < 60;
    report(
        "2 (log-power sharp boundary)",
        pass,
        &format!(
            "{checked} points, {} misclassifications, {:.2?}",
            failures.len(),
            elapsed
        ),
    );
    finish("2", pass, &failures);
}

// ---------------------------------------------------------------------------
// 3. G closed forms
// ---------------------------------------------------------------------------

#[test]
fn criterion_03_big_g_closed_forms() {
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for lambda in [2.0, 3.0, 5.0] {
        for m in [1u32, 2, 4] {
            let g = power_law(1.0, lambda);
            for t in [0.01f64, 1.0, 100.0] {
                let expect = (m as f64 / (lambda - 1.0)) * t.powf(-(lambda - 1.0) / m as f64);
                let got = big_g(&g, m, t, 1e-9).expect("closed-form G must resolve");
                let rel = ((got - expect) / expect).abs();
                worst = worst.max(rel);
                checked += 1;
            }
        }
    }
    report(
        "3 (G closed forms)",
        worst <= 1e-6,
        &format!("{checked} evaluations, worst relative error {worst:.3e} (tolerance 1e-6)"),
    );
    finish("3", worst <= 1e-6, &[]);
}

// ---------------------------------------------------------------------------
// 4. Equivalence with the classical condition
// ---------------------------------------------------------------------------

#[test]
fn criterion_04_classical_equivalence() {
    let mut corpus: Vec<NonlinearityExpr> = vec![];
    for lambda in [0.5, 1.0, 1.5, 2.0, 3.0] {
        corpus.push(power_law(1.0, lambda));
    }
    for nu in [1.0, 2.0, 3.0] {
        corpus.push(log_power(1.0, nu));
    }
    corpus.push(parse("1 + zeta^2").unwrap());

    let mut disagreements = Vec::new();
    for g in &corpus {
        let rep = ko_equivalence(g, 1e-3);
        if !rep.agree {
            disagreements.push(format!(
                "{}: generalized {:?} vs classical {:?}",
                g.display_name, rep.generalized.status, rep.classical.status
            ));
        }
    }
    let pass = disagreements.is_empty();
    report(
        "4 (classical equivalence, m=2)",
        pass,
        &format!(
            "{} corpus elements, {} disagreements",
            corpus.len(),
            disagreements.len()
        ),
    );
    finish("4", pass, &disagreements);
}

// ---------------------------------------------------------------------------
// 5. Inverse identity
// ---------------------------------------------------------------------------

#[test]
fn criterion_05_inverse_identity() {
    let mut corpus: Vec<(ProblemSpec, String)> = Vec::new();
    for lambda in [1.5, 2.0, 3.0] {
        for m in [1u32, 2, 4] {
            corpus.push((
                spec(power_law(1.0, lambda), m, 3),
                format!("power lambda={lambda} m={m}"),
            ));
        }
    }
    for (nu, m) in [(2.0, 1u32), (3.0, 1), (3.0, 2)] {
        corpus.push((
            spec(log_power(1.0, nu), m, 3),
            format!("log-power nu={nu} m={m}"),
        ));
    }

    let r_grid: Vec<f64> = (0..13).map(|i| 10f64.powf(-3.0 + 0.5 * i as f64)).collect();
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    let mut skipped = 0;
    let mut failures = Vec::new();

    for (s, label) in &corpus {
        for &r in &r_grid {
            match big_g_inverse(s, r, 1e-9) {
                Ok(t) => {
                    let back = big_g(&s.g, s.m, t, 1e-9).expect("G at the inverse");
                    let rel = ((back - r) / r).abs();
                    worst = worst.max(rel);
                    checked += 1;
                    if rel > 1e-6 {
                        failures.push(format!("{label}, r={r}: |G(G^-1(r)) - r|/r = {rel:.3e}"));
                    }
                }
                Err(InverseError::BeyondCeiling { .. }) => {
                    // legitimate only if G still exceeds r at the ceiling probe
                    let probe = big_g(&s.g, s.m, 2.0f64.powi(980), 1e-7)
                        .expect("ceiling probe must resolve");
                    if probe > r {
                        skipped += 1;
                        println!(
                            "  note: {label}, r={r}: inverse beyond the f64 ceiling (G(2^980) = {probe:.4e} > r), skipped"
                        );
                    } else {
                        failures.push(format!(
                            "{label}, r={r}: BeyondCeiling claimed but G(2^980) = {probe:.4e} <= r"
                        ));
                    }
                }
                Err(e) => failures.push(format!("{label}, r={r}: {e}")),
            }
        }
    }
    let pass = failures.is_empty();
    report(
        "5 (inverse identity)",
        pass,
        &format!(
            "{checked} identities verified (worst {worst:.3e}), {skipped} documented out-of-range skips, {} failures",
            failures.len()
        ),
    );
    finish("5", pass, &failures);
}

// ---------------------------------------------------------------------------
// 6. Decay curves
// ---------------------------------------------------------------------------

#[test]
fn criterion_06_decay_curves() {
    // every spec here has a convergent tail condition
    let mut corpus: Vec<(ProblemSpec, Vec<f64>, String)> = Vec::new();
    let power_grid: Vec<f64> = (0..14).map(|i| 0.1 * 10f64.powf(i as f64)).collect();
    for lambda in [2.0, 3.0, 5.0] {
        for m in [1u32, 2, 4] {
            corpus.push((
                spec(power_law(1.0, lambda), m, 3),
                power_grid.clone(),
                format!("power lambda={lambda} m={m}"),
            ));
        }
    }
    let log_grid: Vec<f64> = (0..10).map(|i| 0.1 * 2.15f64.powf(i as f64)).collect();
    for (nu, m) in [(2.0, 1u32), (3.0, 1), (3.0, 2)] {
        corpus.push((
            spec(log_power(1.0, nu), m, 3),
            log_grid.clone(),
            format!("log-power nu={nu} m={m}"),
        ));
    }

    let mut failures = Vec::new();
    for (s, grid, label) in &corpus {
        assert!(
            improper_integral(&s.g, s.m, 1.0, f64::INFINITY, 1e-6).converged(),
            "corpus spec {label} must have a convergent tail"
        );
        match decay_curve(s, grid, 1.0, 1.0, Some(1e-3), 1e-9) {
            Ok(curve) => {
                let strict = curve.bounds.windows(2).all(|w| w[1] < w[0]);
                if !strict {
                    failures.push(format!("{label}: curve not strictly decreasing"));
                }
                if curve.final_below_epsilon != Some(true) {
                    failures.push(format!(
                        "{label}: final bound {:?} not below 1e-3",
                        curve.bounds.last()
                    ));
                }
            }
            Err(e) => failures.push(format!("{label}: {e}")),
        }
    }
    let pass = failures.is_empty();
    report(
        "6 (decay curves)",
        pass,
        &format!("{} specs, {} failures", corpus.len(), failures.len()),
    );
    finish("6", pass, &failures);
}

// ---------------------------------------------------------------------------
// 7. Simulator oracles
// ---------------------------------------------------------------------------

#[test]
fn criterion_07_simulator_oracles() {
    // (a) modified Helmholtz: u = sinh(r)/r
    let start = Instant::now();
    let s = spec(parse("zeta").unwrap(), 2, 3);
    let profile = integrate_radial(
        &s,
        1.0,
        &IntegrationOptions {
            r_max: 5.0,
            ..Default::default()
        },
    );
    let helmholtz_time = start.elapsed();
    let mut worst: f64 = 0.0;
    for r in [0.5f64, 1.0, 2.0, 4.0] {
        let expect = r.sinh() / r;
        worst = worst.max(((profile.u_at(r) - expect) / expect).abs());
    }

    // (b) 1-D blow-up radius against the energy quadrature
    let start = Instant::now();
    let s1 = spec(parse("zeta^2").unwrap(), 2, 1);
    let blow = integrate_radial(
        &s1,
        1.0,
        &IntegrationOptions {
            r_max: 20.0,
            ..Default::default()
        },
    );
    let blowup_time = start.elapsed();
    let ProfileStatus::BlowUp { radius, .. } = blow.status else {
        panic!("expected blow-up");
    };
    // oracle: R = sqrt(3/2) ∫_1^∞ (u^3-1)^{-1/2} du via the substitution
    // u = 1+s^2 (Simpson) plus an analytic far tail
    let f = |s: f64| 2.0 / (3.0 + 3.0 * s * s + s.powi(4)).sqrt();
    let big_s = 100.0;
    let n = 1 << 20;
    let h = big_s / n as f64;
    let mut simpson = f(0.0) + f(big_s);
    for i in 1..n {
        simpson += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    simpson *= h / 3.0;
    let oracle = (1.5f64).sqrt() * (simpson + 2.0 / big_s - big_s.powi(-3));
    let blow_err = (radius - oracle).abs();

    let pass = worst <= 1e-6
        && blow_err <= 1e-4
        && helmholtz_time.as_secs() < 5
        && blowup_time.as_secs() < 5;
    report(
        "7 (simulator oracles)",
        pass,
        &format!(
            "sinh profile worst rel {worst:.3e} ({helmholtz_time:.2?}); blow-up radius {radius:.8} vs oracle {oracle:.8}, |diff| = {blow_err:.3e} ({blowup_time:.2?})"
        ),
    );
    finish("7", pass, &[]);
}

// ---------------------------------------------------------------------------
// 8. Counterexample verification
// ---------------------------------------------------------------------------

#[test]
fn criterion_08_counterexample() {
    let report8 = verify_counterexample(1, 3, 2.0, 1.0, None, &default_r_grid());
    let jet_fd_ok = {
        let u = counterexample_profile(report8.k);
        let mut worst: f64 = 0.0;
        for r in [0.5, 1.0, 2.0] {
            let jet = apply_polyharmonic(&u, 3, 1, r).unwrap();
            let fd = fd_laplacian(&u, 3, r, 1e-4 * (1.0 + r));
            worst = worst.max(((jet - fd) / fd).abs());
        }
        worst
    };
    let pass = report8.pass && report8.min_relative >= -1e-9 && jet_fd_ok <= 1e-5;
    report(
        "8 (counterexample, m=2 n=3 nu=2)",
        pass,
        &format!(
            "pass at k={} with min relative residual {:.3e} on [0, {:.3}] (overflow at {:?}); jet vs finite differences worst {:.3e}",
            report8.k, report8.min_relative, report8.certified_r_max, report8.overflow_r, jet_fd_ok
        ),
    );
    finish("8", pass, &[]);
}

// ---------------------------------------------------------------------------
// 9. Proof-machinery properties on blow-up profiles
// ---------------------------------------------------------------------------

#[test]
fn criterion_09_proof_machinery() {
    let cases: Vec<(u32, &str, f64)> = vec![
        (1, "zeta^2", 1.0),
        (1, "zeta^2", 2.0),
        (3, "zeta^2", 1.0),
        (3, "zeta^2", 4.0),
        (3, "zeta^3", 1.0),
    ];
    let mut failures = Vec::new();
    let mut profiles_done = 0;

    for (n, g_src, u0) in &cases {
        let s = spec(parse(g_src).unwrap(), 2, *n);
        let profile = integrate_radial(
            &s,
            *u0,
            &IntegrationOptions {
                r_max: 100.0,
                ..Default::default()
            },
        );
        let ProfileStatus::BlowUp { radius, .. } = profile.status else {
            failures.push(format!("(n={n}, g={g_src}, u0={u0}): no blow-up"));
            continue;
        };
        profiles_done += 1;

        let sweep: Vec<f64> = [0.2, 0.3, 0.45].iter().map(|f| f * radius).collect();
        let mut annulus_cs = Vec::new();
        let mut doubling_cs = Vec::new();
        let mut tail_cs = Vec::new();
        for &r in &sweep {
            match doubling_sequence(&profile, &s, r) {
                Ok(trace) => {
                    // dichotomy: strictly increasing radii, exactly one class
                    let increasing = trace.radii.windows(2).all(|w| w[1] > w[0]);
                    if !increasing {
                        failures.push(format!("(n={n}, u0={u0}, r={r}): radii not increasing"));
                    }
                    let last = *trace.radii.last().unwrap();
                    if !(last >= 1.5 * r - 1e-9) {
                        failures.push(format!(
                            "(n={n}, u0={u0}, r={r}): sequence stopped early at {last}"
                        ));
                    }
                    doubling_cs.push(trace.empirical_c);
                }
                Err(e) => failures.push(format!("(n={n}, u0={u0}, r={r}): doubling {e}")),
            }
            match annulus_ratio(&profile, &s, r / 2.0, r) {
                Ok(c) => annulus_cs.push(c),
                Err(e) => failures.push(format!("(n={n}, u0={u0}, r={r}): annulus {e}")),
            }
            match tail_bound_check(&profile, &s, r) {
                Ok(rep) => tail_cs.push(rep.empirical_constant),
                Err(e) => failures.push(format!("(n={n}, u0={u0}, r={r}): tail {e}")),
            }
        }
        for (name, cs) in [
            ("annulus", &annulus_cs),
            ("doubling", &doubling_cs),
            ("tail", &tail_cs),
        ] {
            if cs.len() != sweep.len() {
                continue; // failure already recorded
            }
            let min = cs.iter().cloned().fold(f64::INFINITY, f64::min);
            let max = cs.iter().cloned().fold(0.0f64, f64::max);
            if !(min > 0.0) {
                failures.push(format!("(n={n}, u0={u0}): {name} constant not positive"));
            } else if max / min >= 100.0 {
                failures.push(format!(
                    "(n={n}, u0={u0}): {name} constants spread {:.1}x across the sweep",
                    max / min
                ));
            }
        }
    }

    // hand-computed envelope ratio 16/3
    let case = EnvelopeCase {
        psi: parse("zeta^2").unwrap(),
        gamma: parse("0.25 * zeta^2").unwrap(),
        theta: 2.0,
        alpha: 0.5,
        nu: 2.0,
        m1: 1.0,
        m2: 4.0,
    };
    let env = envelope_check(&case).unwrap();
    let env_err = (env.empirical_constant - 16.0 / 3.0).abs() / (16.0 / 3.0);
    if env_err > 1e-6 {
        failures.push(format!("envelope ratio off 16/3 by {env_err:.3e}"));
    }

    let pass = failures.is_empty() && profiles_done == 5;
    report(
        "9 (proof machinery)",
        pass,
        &format!(
            "{profiles_done}/5 blow-up profiles, envelope ratio error {env_err:.3e}, {} failures",
            failures.len()
        ),
    );
    finish("9", pass, &failures);
}

// ---------------------------------------------------------------------------
// 10. Randomized property suites
// ---------------------------------------------------------------------------

#[test]
fn criterion_10_property_suites() {
    let mut failures: Vec<String> = Vec::new();

    // (a) quadrature additivity on finite splits
    {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
        for i in 0..200 {
            let lambda = rng.gen_range(1.2..4.0);
            let m = [1u32, 2, 4][rng.gen_range(0..3)];
            let g = power_law(rng.gen_range(0.5..2.0), lambda);
            let a = rng.gen_range(0.1..2.0);
            let b = a + rng.gen_range(0.5..8.0);
            let c = b + rng.gen_range(0.5..64.0);
            let ab = improper_integral(&g, m, a, b, 1e-10);
            let bc = improper_integral(&g, m, b, c, 1e-10);
            let ac = improper_integral(&g, m, a, c, 1e-10);
            let (Some(vab), Some(vbc), Some(vac)) = (ab.value, bc.value, ac.value) else {
                failures.push(format!("additivity case {i}: piece did not converge"));
                continue;
            };
            let budget = ab.error_bound + bc.error_bound + ac.error_bound + 1e-13 * vac.abs();
            if ((vab + vbc) - vac).abs() > budget {
                failures.push(format!(
                    "additivity case {i}: |{vab}+{vbc}-{vac}| > {budget:.3e}"
                ));
            }
        }
    }

    // (b) verdict invariance under scaling g -> c·g
    {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
        for i in 0..200 {
            let m = [1u32, 2, 4][rng.gen_range(0..3)];
            // stay off the critical boundary, where no finite procedure decides
            let g = if rng.gen_bool(0.5) {
                let lambda = if rng.gen_bool(0.5) {
                    rng.gen_range(0.3..0.9)
                } else {
                    rng.gen_range(1.1..4.0)
                };
                power_law(1.0, lambda)
            } else {
                let nu = if rng.gen_bool(0.5) {
                    rng.gen_range(0.2..0.8) * m as f64
                } else {
                    rng.gen_range(1.2..2.0) * m as f64
                };
                log_power(1.0, nu)
            };
            let base = improper_integral(&g, m, 1.0, f64::INFINITY, 1e-6).status;
            for c in [1e-3, 1e3] {
                let scaled = kocheck::expr::scaled(c, &g);
                let status = improper_integral(&scaled, m, 1.0, f64::INFINITY, 1e-6).status;
                if status != base {
                    failures.push(format!(
                        "scaling case {i}: status {base:?} became {status:?} under c={c}"
                    ));
                }
            }
            if base == IntegralStatus::Inconclusive {
                failures.push(format!("scaling case {i}: base verdict inconclusive"));
            }
        }
    }

    // (c) J monotonicity on random profiles
    {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
        for i in 0..200 {
            let n = [1u32, 2, 3, 5][rng.gen_range(0..4)];
            let a = rng.gen_range(0.0..2.0);
            let b = rng.gen_range(0.0..1.5);
            let c = rng.gen_range(0.0..0.5);
            let w = rng.gen_range(0.5..3.0);
            let f = move |s: f64| a + b * s * s + c * (w * s).sin().powi(2);
            let df = move |s: f64| 2.0 * b * s + 2.0 * c * w * (w * s).sin() * (w * s).cos();
            let profile = RadialProfile::from_fn(n, 4.0, 513, f, df);
            let mass = match MassFunction::new(&profile, 1.0) {
                Ok(m) => m,
                Err(e) => {
                    failures.push(format!("mass case {i}: {e}"));
                    continue;
                }
            };
            let mut prev = 0.0f64;
            for j in 1..=64 {
                let rho = 4.0 * j as f64 / 64.0;
                let v = mass.eval(rho).unwrap();
                if v < prev - 1e-12 * (1.0 + prev.abs()) {
                    failures.push(format!("mass case {i}: J({rho}) = {v} < {prev}"));
                    break;
                }
                prev = v;
            }
        }
    }

    // (d) convexity direction of ball means
    {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
        for i in 0..200 {
            let n = [1u32, 2, 3][rng.gen_range(0..3)];
            let lambda = rng.gen_range(1.0..3.0);
            let g = power_law(1.0, lambda);
            let a = rng.gen_range(0.1..2.0);
            let b = rng.gen_range(0.0..1.5);
            let f = move |s: f64| a + b * s * s;
            let df = move |s: f64| 2.0 * b * s;
            let profile = RadialProfile::from_fn(n, 3.0, 257, f, df);
            let rho = rng.gen_range(0.3..2.9);
            let mean_gu = ball_mean(&profile, rho, |u| g.eval(u).unwrap()).unwrap();
            let mean_u = ball_mean(&profile, rho, |u| u).unwrap();
            let g_mean = g.eval(mean_u).unwrap();
            if mean_gu < g_mean - 1e-9 * (1.0 + mean_gu.abs()) {
                failures.push(format!(
                    "convexity case {i}: mean g(u) = {mean_gu} < g(mean u) = {g_mean}"
                ));
            }
        }
    }

    // (e) jet derivatives against central differences
    {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
        let mut checked = 0;
        for i in 0..200 {
            let a = rng.gen_range(0.3..2.0);
            let b = rng.gen_range(0.1..1.2);
            let p = rng.gen_range(0.5..2.5);
            let kind = rng.gen_range(0..4);
            let src = match kind {
                0 => format!("({a} + {b} * zeta^2)^{p}"),
                1 => format!("exp({b} * sqrt({a} + zeta^2))"),
                2 => format!("{a} * zeta^2 * ln(2 + zeta)"),
                _ => format!("ln({a} + {b} * zeta^2)"),
            };
            let f = parse(&src).unwrap();
            let r = rng.gen_range(0.2..2.5);
            let jet = match jet_eval(&f, r, 4) {
                Ok(j) => j,
                Err(e) => {
                    failures.push(format!("jet case {i} ({src}): {e}"));
                    continue;
                }
            };
            let h = 1e-4 * (1.0 + r);
            let at = |x: f64| f.eval_unchecked(x).unwrap();
            let fd1 = (at(r + h) - at(r - h)) / (2.0 * h);
            let fd2 = (at(r + h) - 2.0 * at(r) + at(r - h)) / (h * h);
            // the difference oracle carries its own cancellation noise
            let f_scale = at(r).abs().max(1.0);
            for (order, fd, noise) in [
                (1usize, fd1, f64::EPSILON * f_scale / h),
                (2, fd2, 4.0 * f64::EPSILON * f_scale / (h * h)),
            ] {
                let exact = jet.derivative(order);
                let scale = exact.abs().max(fd.abs());
                if (exact - fd).abs() > 1e-5 * scale + 4.0 * noise {
                    failures.push(format!(
                        "jet case {i} ({src}) at r={r}: d{order} jet {exact} vs fd {fd}"
                    ));
                }
            }
            checked += 1;
        }
        assert!(checked >= 190);
    }

    let pass = failures.is_empty();
    report(
        "10 (randomized property suites)",
        pass,
        &format!(
            "5 suites x 200 seeded cases (additivity, scaling invariance, mass monotonicity, convexity direction, jets vs finite differences); {} failures",
            failures.len()
        ),
    );
    finish("10", pass, &failures);
}

// ---------------------------------------------------------------------------
// auxiliary: spot checks referenced by several criteria
// ---------------------------------------------------------------------------

#[test]
fn auxiliary_normalized_mass_examples() {
    // closed-form values used when freezing the doubling-sequence cases
    let p1 = RadialProfile::from_fn(1, 4.0, 257, |_| 1.0, |_| 0.0);
    assert!((normalized_mass(&p1, 1.0, 1.0).unwrap() - 0.5).abs() < 1e-9);
    let p3 = RadialProfile::from_fn(3, 4.0, 513, |s| s * s, |s| 2.0 * s);
    assert!((normalized_mass(&p3, 1.0, 2.0).unwrap() - 2.4).abs() < 1e-8);
}
