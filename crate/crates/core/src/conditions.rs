//! The theorem battery: integral conditions, the classification verdict, the
//! m ≥ n shortcut, the m = 2 equivalence with the classical Keller-Osserman
//! condition, and the decay bound C·G^{-1}(k·r).

use crate::expr::NonlinearityExpr;
use crate::quad::{
    self, blocks, improper_integral, panel, GEvaluator, GValue, IntegralStatus, IntegralVerdict,
};
use serde::Serialize;

/// The inequality instance: order m, dimension n, coefficient bound A, and
/// the nonlinearity g.
///
/// A is carried for reporting and empirical-constant estimation only; no
/// implemented formula consumes it directly (the constants it controls are
/// existential).
#[derive(Debug, Clone, Serialize)]
pub struct ProblemSpec {
    pub m: u32,
    pub n: u32,
    pub coeff_bound: f64,
    pub g: NonlinearityExpr,
}

impl ProblemSpec {
    pub fn new(m: u32, n: u32, coeff_bound: f64, g: NonlinearityExpr) -> Self {
        assert!(m >= 1 && n >= 1, "m and n must be positive integers");
        assert!(coeff_bound > 0.0, "the coefficient bound A must be positive");
        ProblemSpec {
            m,
            n,
            coeff_bound,
            g,
        }
    }
}

// ---------------------------------------------------------------------------
// Condition checks
// ---------------------------------------------------------------------------

/// Tail condition: ∫_1^∞ g^{-1/m}(ζ) ζ^{1/m-1} dζ < ∞.
pub fn tail_condition(spec: &ProblemSpec, tol: f64) -> IntegralVerdict {
    improper_integral(&spec.g, spec.m, 1.0, f64::INFINITY, tol)
}

/// Full-range condition: ∫_0^∞ g^{-1/m}(ζ) ζ^{1/m-1} dζ < ∞, which rules out
/// global weak solutions entirely.
#[derive(Debug, Clone, Serialize)]
pub struct FullRangeCheck {
    pub verdict: IntegralVerdict,
    /// g(0), reported when the verdict is Converged: convergence forces
    /// g(0) > 0 for admissible g.
    pub g_at_zero: Option<f64>,
    pub g_at_zero_positive: Option<bool>,
}

pub fn full_range_condition(spec: &ProblemSpec, tol: f64) -> FullRangeCheck {
    let verdict = improper_integral(&spec.g, spec.m, 0.0, f64::INFINITY, tol);
    let (g_at_zero, g_at_zero_positive) = if verdict.converged() {
        match spec.g.eval(0.0) {
            Ok(v) => (Some(v), Some(v > 0.0)),
            Err(_) => (None, None),
        }
    } else {
        (None, None)
    };
    FullRangeCheck {
        verdict,
        g_at_zero,
        g_at_zero_positive,
    }
}

/// Decision of the liminf condition liminf_{t→0+} G^{n-m}(t)·t < ∞.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LiminfDecision {
    Satisfied,
    Violated,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct LiminfDiagnostics {
    /// Decreasing sample points t_j = 2^{-j}.
    pub t_samples: Vec<f64>,
    /// G^{n-m}(t_j)·t_j.
    pub values: Vec<f64>,
    /// Fitted slope of ln G against ln t near 0.
    pub fitted_exponent: f64,
    pub decision: LiminfDecision,
    /// m ≥ n: the exponent n-m is non-positive, so the condition holds for
    /// free and no sampling is needed.
    pub shortcut_m_ge_n: bool,
    pub note: String,
}

const LIMINF_SAMPLES: usize = 60;
const LIMINF_FIT_TAIL: usize = 16;
const LIMINF_DEAD_BAND: f64 = 0.02;
const LIMINF_VALUE_CEILING: f64 = 1e9;
const LIMINF_VALUE_FLOOR: f64 = 1e3;

fn liminf_with(diag: LiminfDecision, note: impl Into<String>) -> LiminfDiagnostics {
    LiminfDiagnostics {
        t_samples: Vec::new(),
        values: Vec::new(),
        fitted_exponent: 0.0,
        decision: diag,
        shortcut_m_ge_n: false,
        note: note.into(),
    }
}

/// Evaluate the liminf condition. Requires the tail condition to be resolved
/// first; a divergent tail makes G ≡ ∞ and violates the condition whenever
/// n > m.
pub fn liminf_condition(spec: &ProblemSpec, tol: f64) -> LiminfDiagnostics {
    if spec.m >= spec.n {
        let mut d = liminf_with(
            LiminfDecision::Satisfied,
            "m >= n: exponent n-m <= 0 makes G^{n-m}(t)·t -> 0",
        );
        d.shortcut_m_ge_n = true;
        return d;
    }

    let tail = tail_condition(spec, tol);
    match tail.status {
        IntegralStatus::Diverged => {
            return liminf_with(
                LiminfDecision::Violated,
                "tail integral diverges: G ≡ ∞ and n > m",
            )
        }
        IntegralStatus::Inconclusive => {
            return liminf_with(
                LiminfDecision::Inconclusive,
                "tail integral inconclusive; G undefined",
            )
        }
        IntegralStatus::Converged => {}
    }

    // Incremental samples: G(2^{-j}) = G(2^{-j+1}) + ∫ block; G(1) from the
    // resolved tail.
    let g1 = tail.value.expect("converged tail has a value");
    let integrand = |z: f64| quad::ko_integrand(&spec.g, spec.m, z).unwrap_or(f64::NAN);
    let mut t_samples = Vec::with_capacity(LIMINF_SAMPLES + 1);
    let mut g_samples = Vec::with_capacity(LIMINF_SAMPLES + 1);
    t_samples.push(1.0);
    g_samples.push(g1);
    let mut acc = g1;
    for j in 1..=LIMINF_SAMPLES {
        let lo = blocks::exp2i(-(j as i32));
        let hi = blocks::exp2i(-(j as i32) + 1);
        let piece = panel::integrate_rel(&integrand, lo, hi, tol * 1e-3);
        if piece.saw_nan {
            return liminf_with(
                LiminfDecision::Inconclusive,
                format!("integrand evaluation failed near t = {lo:.3e}"),
            );
        }
        acc += piece.value;
        t_samples.push(lo);
        g_samples.push(acc);
    }

    let k = (spec.n - spec.m) as i32;
    let values: Vec<f64> = t_samples
        .iter()
        .zip(&g_samples)
        .map(|(&t, &g)| g.powi(k) * t)
        .collect();

    // Slope of ln G vs ln t over the last samples.
    let tail_pts: Vec<(f64, f64)> = t_samples
        .iter()
        .zip(&g_samples)
        .rev()
        .take(LIMINF_FIT_TAIL)
        .filter(|(_, &g)| g.is_finite() && g > 0.0)
        .map(|(&t, &g)| (g.ln(), t.ln()))
        .collect();
    if tail_pts.len() < LIMINF_FIT_TAIL / 2 {
        return liminf_with(
            LiminfDecision::Inconclusive,
            "too few finite G samples for the exponent fit",
        );
    }
    let (_, slope, _) = fit_line(&tail_pts);
    let e = 1.0 + k as f64 * slope;

    let min_all = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let min_tail = values
        .iter()
        .rev()
        .take(LIMINF_FIT_TAIL)
        .cloned()
        .fold(f64::INFINITY, f64::min);

    let (decision, note) = if e >= -LIMINF_DEAD_BAND && min_all <= LIMINF_VALUE_CEILING {
        (
            LiminfDecision::Satisfied,
            format!("t·G^{{n-m}} exponent {e:.4} non-negative within the dead band; min sample {min_all:.4e}"),
        )
    } else if e < -LIMINF_DEAD_BAND && min_tail >= LIMINF_VALUE_FLOOR {
        (
            LiminfDecision::Violated,
            format!("t·G^{{n-m}} exponent {e:.4} negative and trailing samples exceed {LIMINF_VALUE_FLOOR:.0e}"),
        )
    } else {
        (
            LiminfDecision::Inconclusive,
            format!("exponent {e:.4} within the dead band or samples not yet decisive"),
        )
    };

    LiminfDiagnostics {
        t_samples,
        values,
        fitted_exponent: slope,
        decision,
        shortcut_m_ge_n: false,
        note,
    }
}

fn fit_line(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let su: f64 = points.iter().map(|p| p.1).sum();
    let sy: f64 = points.iter().map(|p| p.0).sum();
    let suu: f64 = points.iter().map(|p| p.1 * p.1).sum();
    let suy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let det = n * suu - su * su;
    let (a, b) = if det.abs() < 1e-300 {
        (sy / n, 0.0)
    } else {
        ((sy * suu - su * suy) / det, (n * suy - su * sy) / det)
    };
    let rms = (points
        .iter()
        .map(|p| (p.0 - a - b * p.1).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    (a, b, rms)
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VerdictOutcome {
    NoGlobalSolutions,
    OnlyTrivialSolutions,
    BoundOnly,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct TheoremApplication {
    pub id: String,
    pub applies: bool,
    pub conditions: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionEvidence {
    pub t211: IntegralVerdict,
    pub t221: LiminfDiagnostics,
    pub t231: FullRangeCheck,
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub outcome: VerdictOutcome,
    pub theorems: Vec<TheoremApplication>,
    pub evidence: ConditionEvidence,
}

fn status_str(v: &IntegralVerdict) -> &'static str {
    match v.status {
        IntegralStatus::Converged => "converged",
        IntegralStatus::Diverged => "diverged",
        IntegralStatus::Inconclusive => "inconclusive",
    }
}

/// Run the full battery and classify.
///
/// Precedence: nonexistence (full-range) over triviality (tail + liminf or
/// m ≥ n) over the decay bound alone; anything else is Inconclusive. The
/// caller is expected to have run the admissibility checks on g.
pub fn classify(spec: &ProblemSpec, tol: f64) -> Verdict {
    let t231 = full_range_condition(spec, tol);
    let t211 = tail_condition(spec, tol);
    let t221 = liminf_condition(spec, tol);

    let tail_ok = t211.converged();
    let liminf_ok = t221.decision == LiminfDecision::Satisfied;
    let order_ok = spec.m >= spec.n;

    let outcome = if t231.verdict.converged() {
        VerdictOutcome::NoGlobalSolutions
    } else if tail_ok && (order_ok || liminf_ok) {
        VerdictOutcome::OnlyTrivialSolutions
    } else if tail_ok {
        VerdictOutcome::BoundOnly
    } else {
        VerdictOutcome::Inconclusive
    };

    let theorems = vec![
        TheoremApplication {
            id: "full-range-nonexistence".into(),
            applies: t231.verdict.converged(),
            conditions: vec![
                format!("full-range integral {}", status_str(&t231.verdict)),
                match t231.g_at_zero_positive {
                    Some(true) => "g(0) > 0 (consistent with convergence)".into(),
                    Some(false) => "g(0) = 0 despite convergence (check admissibility)".into(),
                    None => "g(0) not evaluated".into(),
                },
            ],
        },
        TheoremApplication {
            id: "tail-liminf-triviality".into(),
            applies: tail_ok && liminf_ok,
            conditions: vec![
                format!("tail integral {}", status_str(&t211)),
                format!("liminf condition {:?}", t221.decision),
            ],
        },
        TheoremApplication {
            id: "order-dominates-triviality".into(),
            applies: tail_ok && order_ok,
            conditions: vec![
                format!("tail integral {}", status_str(&t211)),
                format!("m = {} >= n = {}: {}", spec.m, spec.n, order_ok),
            ],
        },
        TheoremApplication {
            id: "decay-bound".into(),
            applies: tail_ok,
            conditions: vec![format!("tail integral {}", status_str(&t211))],
        },
    ];

    Verdict {
        outcome,
        theorems,
        evidence: ConditionEvidence {
            t211,
            t221,
            t231,
        },
    }
}

// ---------------------------------------------------------------------------
// Equivalence with the classical condition (m = 2)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    /// Tail form ∫_1^∞ (g(ζ)ζ)^{-1/2} dζ (the m = 2 instance).
    pub generalized: IntegralVerdict,
    /// Classical form ∫_1^∞ (∫_1^ζ g)^{-1/2} dζ.
    pub classical: IntegralVerdict,
    pub agree: bool,
}

/// Compare the m = 2 tail condition with the classical Keller-Osserman
/// condition; for admissible g the two statuses must agree.
pub fn ko_equivalence(g: &NonlinearityExpr, tol: f64) -> EquivalenceReport {
    let spec = ProblemSpec::new(2, 1, 1.0, g.clone());
    let generalized = tail_condition(&spec, tol);
    let classical = quad::classical_ko(g, tol);
    let agree = generalized.status == classical.status;
    EquivalenceReport {
        generalized,
        classical,
        agree,
    }
}

// ---------------------------------------------------------------------------
// Inverse of G and the decay bound
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, thiserror::Error)]
pub enum InverseError {
    #[error("G is identically infinite (tail condition fails); inverse not defined")]
    TailDiverges,
    #[error("inverse undefined at r = {r}: G is bounded near 0 by about {sup:.6e}")]
    Undefined { r: f64, sup: f64 },
    #[error("inverse of r = {r} lies beyond the evaluation ceiling")]
    BeyondCeiling { r: f64 },
    #[error("tail verdict inconclusive: {0}")]
    Inconclusive(String),
}

/// Largest t probed when bracketing the inverse: enough dyadic blocks must
/// remain below the f64 exponent limit for the tail analysis to resolve.
const T_CAP: f64 = 1.3387107330475432e297; // 2^987
const T_MIN: f64 = 1e-300;

/// G^{-1}(r) by monotone bracketing and log-space bisection, to relative
/// tolerance 1e-8.
pub fn big_g_inverse(spec: &ProblemSpec, r: f64, tol: f64) -> Result<f64, InverseError> {
    assert!(r > 0.0, "r must be positive");
    let eval = GEvaluator::new(&spec.g, spec.m, tol);
    let g_at = |t: f64| -> Result<f64, InverseError> {
        match eval.eval(t) {
            Ok(GValue::Finite { value, .. }) => Ok(value),
            Ok(GValue::Infinite) => Err(InverseError::TailDiverges),
            Err(e) => Err(InverseError::Inconclusive(e.to_string())),
        }
    };

    let mut lo; // G(lo) >= r side
    let mut hi; // G(hi) <= r side
    let g1 = g_at(1.0)?;
    if g1 >= r {
        // move hi upward until G(hi) <= r
        let mut t = 1.0;
        loop {
            t *= 16.0;
            if t > T_CAP {
                return Err(InverseError::BeyondCeiling { r });
            }
            let gt = g_at(t)?;
            if gt <= r {
                hi = t;
                lo = t / 16.0;
                break;
            }
        }
    } else {
        // move lo downward until G(lo) >= r
        let mut t = 1.0;
        loop {
            t /= 16.0;
            if t < T_MIN {
                // G never reaches r on the representable range: either G is
                // bounded near 0 (inverse genuinely undefined) or the inverse
                // sits below the floor.
                let sup = g_at(T_MIN)?;
                return Err(InverseError::Undefined { r, sup });
            }
            let gt = g_at(t)?;
            if gt >= r {
                lo = t;
                hi = t * 16.0;
                break;
            }
        }
    }

    // log-space bisection: G decreasing, G(lo) >= r >= G(hi)
    for _ in 0..200 {
        if hi / lo <= 1.0 + 1e-8 {
            break;
        }
        let mid = (lo.ln() + 0.5 * (hi / lo).ln()).exp();
        if g_at(mid)? >= r {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo * hi).sqrt())
}

/// The a-priori bound C·G^{-1}(k·r) on the normalized mean r^{-n}∫_{B_r}|u|.
///
/// C and k are caller-supplied: the underlying result proves their existence
/// (depending only on A, m, n) but not their values.
pub fn mean_bound(spec: &ProblemSpec, r: f64, c: f64, k: f64, tol: f64) -> Result<f64, InverseError> {
    assert!(r > 0.0 && c > 0.0 && k > 0.0);
    Ok(c * big_g_inverse(spec, k * r, tol)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayCurve {
    pub r_grid: Vec<f64>,
    pub bounds: Vec<f64>,
    pub nonincreasing: bool,
    /// Set when an epsilon was supplied: final entry below it.
    pub final_below_epsilon: Option<bool>,
}

impl DecayCurve {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,bound\n");
        for (r, b) in self.r_grid.iter().zip(&self.bounds) {
            out.push_str(&format!("{r},{b}\n"));
        }
        out
    }
}

/// Tabulate the decay bound over a radius grid.
pub fn decay_curve(
    spec: &ProblemSpec,
    r_grid: &[f64],
    c: f64,
    k: f64,
    epsilon: Option<f64>,
    tol: f64,
) -> Result<DecayCurve, InverseError> {
    let mut bounds = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        bounds.push(mean_bound(spec, r, c, k, tol)?);
    }
    let nonincreasing = bounds.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9));
    let final_below_epsilon = epsilon.map(|eps| bounds.last().map(|&b| b < eps).unwrap_or(false));
    Ok(DecayCurve {
        r_grid: r_grid.to_vec(),
        bounds,
        nonincreasing,
        final_below_epsilon,
    })
}
