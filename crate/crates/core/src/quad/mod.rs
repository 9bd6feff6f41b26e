//! Improper-integral verdicts for the condition integrals.
//!
//! The central object is [`IntegralVerdict`]: Converged (with value and error
//! bound), Diverged (with the triggering evidence), or Inconclusive. The
//! integrands are the Keller-Osserman weight g^{-1/m}(ζ)·ζ^{1/m-1} and its
//! relatives; see [`blocks`] for the decision rules.

pub mod blocks;
pub mod panel;

use crate::expr::{EvalError, NonlinearityExpr};
use blocks::{SideAnalysis, SideOutcome};
use serde::Serialize;
use std::cell::RefCell;
use std::collections::HashMap;

/// Default relative tolerance for condition verdicts.
pub const DEFAULT_TOL: f64 = 1e-6;
/// Block budget per singular side.
pub const MAX_BLOCKS: usize = 320;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum IntegralStatus {
    Converged,
    Diverged,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct IntegralVerdict {
    pub status: IntegralStatus,
    /// Present iff `status == Converged`.
    pub value: Option<f64>,
    pub error_bound: f64,
    pub evidence: QuadEvidence,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct QuadEvidence {
    /// Per-dyadic-block partial sums and ratio diagnostics, one list per
    /// analyzed side (singular lower endpoint first, then the upper tail).
    pub sides: Vec<SideAnalysis>,
    pub note: String,
}

impl IntegralVerdict {
    pub fn converged(&self) -> bool {
        self.status == IntegralStatus::Converged
    }
    pub fn diverged(&self) -> bool {
        self.status == IntegralStatus::Diverged
    }

    fn inconclusive(note: impl Into<String>) -> Self {
        IntegralVerdict {
            status: IntegralStatus::Inconclusive,
            value: None,
            error_bound: f64::INFINITY,
            evidence: QuadEvidence {
                sides: Vec::new(),
                note: note.into(),
            },
        }
    }
}

/// Assemble a verdict from analyzed sides and already-integrated finite parts.
///
/// Divergence on any side dominates; any unresolved side makes the whole
/// verdict inconclusive; otherwise the value is the deterministic sum of the
/// pieces and the extrapolated tails, gated by the requested tolerance.
fn combine(
    sides: Vec<SideAnalysis>,
    finite_value: f64,
    finite_error: f64,
    finite_nan: bool,
    tol: f64,
) -> IntegralVerdict {
    let mut note = String::new();
    let mut total = finite_value;
    let mut error = finite_error;
    let mut any_inconclusive = finite_nan;
    if finite_nan {
        note = "integrand evaluation failed inside a finite piece".into();
    }
    let mut diverged = false;
    for side in &sides {
        match &side.outcome {
            SideOutcome::Diverged { reason } => {
                diverged = true;
                note = reason.clone();
            }
            SideOutcome::Inconclusive { reason } => {
                if !diverged {
                    any_inconclusive = true;
                    note = reason.clone();
                }
            }
            SideOutcome::Resolved {
                sum, tail, error: e, ..
            } => {
                total += sum + tail;
                error += e;
            }
        }
    }
    let status = if diverged {
        IntegralStatus::Diverged
    } else if any_inconclusive {
        IntegralStatus::Inconclusive
    } else if error <= tol * total.abs().max(1e-300) {
        IntegralStatus::Converged
    } else {
        note = format!("error bound {error:.3e} above tolerance");
        IntegralStatus::Inconclusive
    };
    IntegralVerdict {
        status,
        value: if status == IntegralStatus::Converged {
            Some(total)
        } else {
            None
        },
        error_bound: error,
        evidence: QuadEvidence { sides, note },
    }
}

// ---------------------------------------------------------------------------
// Keller-Osserman weight
// ---------------------------------------------------------------------------

/// The condition integrand g^{-1/m}(ζ)·ζ^{1/m-1}.
///
/// Returns the +∞ sentinel where g vanishes (the integrable-singularity
/// handling is the caller's job).
pub fn ko_integrand(g: &NonlinearityExpr, m: u32, zeta: f64) -> Result<f64, EvalError> {
    debug_assert!(zeta > 0.0);
    let gv = g.eval(zeta)?;
    let inv_m = 1.0 / m as f64;
    Ok(gv.powf(-inv_m) * zeta.powf(inv_m - 1.0))
}

/// Same weight with the argument scaled: g^{-1/m}(ζ/s)·ζ^{1/m-1}.
pub fn ko_integrand_scaled(
    g: &NonlinearityExpr,
    m: u32,
    scale: f64,
    zeta: f64,
) -> Result<f64, EvalError> {
    let gv = g.eval(zeta / scale)?;
    let inv_m = 1.0 / m as f64;
    Ok(gv.powf(-inv_m) * zeta.powf(inv_m - 1.0))
}

/// Generic improper-integral verdict over [lower, upper] for a positive
/// integrand `f` that may be singular at `lower` (flag) and/or unbounded
/// in range only through the upper endpoint ∞.
pub fn improper_verdict<F: Fn(f64) -> f64>(
    f: &F,
    lower: f64,
    upper: f64,
    singular_lower: bool,
    tol: f64,
) -> IntegralVerdict {
    if !(lower >= 0.0) || !(upper > lower) {
        return IntegralVerdict::inconclusive(format!(
            "empty or invalid integration range [{lower}, {upper}]"
        ));
    }
    let mut sides = Vec::new();
    let mut finite_value = 0.0;
    let mut finite_error = 0.0;
    let mut finite_nan = false;

    // Left side: dyadic blocks descending toward the singular endpoint.
    let mut left_edge = lower;
    if singular_lower {
        let span = (upper - lower).min(1.0);
        sides.push(blocks::lower_singular(f, lower, span, tol, MAX_BLOCKS));
        left_edge = lower + span;
    }

    // Right side: ascending dyadic tail, started no lower than 1 so that the
    // non-decay rules only ever see genuine tail blocks.
    let tail_start = if upper.is_infinite() {
        let s = left_edge.max(1.0);
        sides.push(blocks::upper_tail(f, s, tol, MAX_BLOCKS));
        s
    } else {
        upper
    };

    // Finite middle piece.
    if tail_start > left_edge {
        let r = blocks::finite_piece(f, left_edge, tail_start, tol);
        finite_value = r.value;
        finite_error = r.error;
        finite_nan = r.saw_nan;
    }

    combine(sides, finite_value, finite_error, finite_nan, tol)
}

/// Verdict for ∫_lower^upper g^{-1/m}(ζ)·ζ^{1/m-1} dζ.
///
/// The lower endpoint 0 is treated as singular; an infinite upper endpoint is
/// handled by block summation with ratio-based tail extrapolation.
pub fn improper_integral(
    g: &NonlinearityExpr,
    m: u32,
    lower: f64,
    upper: f64,
    tol: f64,
) -> IntegralVerdict {
    let f = |zeta: f64| ko_integrand(g, m, zeta).unwrap_or(f64::NAN);
    improper_verdict(&f, lower, upper, lower == 0.0, tol)
}

// ---------------------------------------------------------------------------
// G(t) = ∫_t^∞ g^{-1/m}(ζ) ζ^{1/m-1} dζ
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, thiserror::Error)]
pub enum BigGError {
    #[error("tail verdict inconclusive: {0}")]
    Inconclusive(String),
    #[error("evaluation failed: {0}")]
    Eval(String),
}

/// Shared evaluator for G: the tail from 1 is resolved once, then G(t) only
/// needs finite pieces. Keeps repeated evaluations (tables, inversion)
/// consistent and cheap.
pub struct GEvaluator<'a> {
    g: &'a NonlinearityExpr,
    m: u32,
    tol: f64,
    tail_from_one: RefCell<Option<Result<(f64, f64), BigGError>>>,
}

/// G is +∞ when the tail diverges; finite values carry an error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GValue {
    Finite { value: f64, error: f64 },
    Infinite,
}

impl GValue {
    pub fn as_f64(&self) -> f64 {
        match self {
            GValue::Finite { value, .. } => *value,
            GValue::Infinite => f64::INFINITY,
        }
    }
}

impl<'a> GEvaluator<'a> {
    pub fn new(g: &'a NonlinearityExpr, m: u32, tol: f64) -> Self {
        GEvaluator {
            g,
            m,
            tol,
            tail_from_one: RefCell::new(None),
        }
    }

    fn integrand(&self, zeta: f64) -> f64 {
        ko_integrand(self.g, self.m, zeta).unwrap_or(f64::NAN)
    }

    /// Resolve ∫_1^∞; Err carries divergence as Infinite via `eval`.
    fn tail(&self) -> Result<Option<(f64, f64)>, BigGError> {
        let mut slot = self.tail_from_one.borrow_mut();
        if slot.is_none() {
            let f = |z: f64| self.integrand(z);
            let side = blocks::upper_tail(&f, 1.0, self.tol, MAX_BLOCKS);
            *slot = Some(match side.outcome {
                SideOutcome::Resolved {
                    sum, tail, error, ..
                } => Ok((sum + tail, error)),
                SideOutcome::Diverged { .. } => Err(BigGError::Eval("diverged".into())),
                SideOutcome::Inconclusive { reason } => Err(BigGError::Inconclusive(reason)),
            });
        }
        match slot.as_ref().unwrap() {
            Ok(pair) => Ok(Some(*pair)),
            Err(BigGError::Eval(_)) => Ok(None), // divergent tail => G ≡ ∞
            Err(e) => Err(e.clone()),
        }
    }

    /// Evaluate G(t).
    pub fn eval(&self, t: f64) -> Result<GValue, BigGError> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(BigGError::Eval(format!("t = {t} outside (0, ∞)")));
        }
        let Some((tail_value, tail_error)) = self.tail()? else {
            return Ok(GValue::Infinite);
        };
        let f = |z: f64| self.integrand(z);
        if t == 1.0 {
            return Ok(GValue::Finite {
                value: tail_value,
                error: tail_error,
            });
        }
        if t < 1.0 {
            let piece = blocks::finite_piece(&f, t, 1.0, self.tol);
            if piece.saw_nan {
                return Err(BigGError::Eval("integrand NaN on the finite piece".into()));
            }
            Ok(GValue::Finite {
                value: tail_value + piece.value,
                error: tail_error + piece.error,
            })
        } else {
            // G(t) = G(1) - ∫_1^t; recompute the head directly for accuracy
            let side = blocks::upper_tail(&f, t, self.tol, MAX_BLOCKS);
            match side.outcome {
                SideOutcome::Resolved {
                    sum, tail, error, ..
                } => Ok(GValue::Finite {
                    value: sum + tail,
                    error,
                }),
                SideOutcome::Diverged { reason } => Err(BigGError::Eval(format!(
                    "tail from t diverged but tail from 1 converged: {reason}"
                ))),
                SideOutcome::Inconclusive { reason } => Err(BigGError::Inconclusive(reason)),
            }
        }
    }
}

/// G of the tail condition: +∞ sentinel when the tail diverges.
pub fn big_g(g: &NonlinearityExpr, m: u32, t: f64, tol: f64) -> Result<f64, BigGError> {
    Ok(GEvaluator::new(g, m, tol).eval(t)?.as_f64())
}

/// Log-spaced table of G with monotonicity and a growth check near t → 0⁺.
#[derive(Debug, Clone, Serialize)]
pub struct GTable {
    pub t_grid: Vec<f64>,
    pub g_values: Vec<f64>,
    pub m: u32,
    /// Whether G(t) → ∞ as t → 0⁺ appears to hold (divergence of the
    /// 0-endpoint integral), i.e. the inverse is defined for all r > 0.
    pub unbounded_at_zero: Option<bool>,
}

impl GTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,G\n");
        for (t, g) in self.t_grid.iter().zip(&self.g_values) {
            out.push_str(&format!("{t},{g}\n"));
        }
        out
    }
}

pub fn big_g_table(
    g: &NonlinearityExpr,
    m: u32,
    t_min: f64,
    t_max: f64,
    count: usize,
    tol: f64,
) -> Result<GTable, BigGError> {
    assert!(t_min > 0.0 && t_min < t_max && count >= 2);
    let eval = GEvaluator::new(g, m, tol);
    let (lo, hi) = (t_min.ln(), t_max.ln());
    let mut t_grid = Vec::with_capacity(count);
    let mut g_values = Vec::with_capacity(count);
    for i in 0..count {
        let t = if i == 0 {
            t_min
        } else if i == count - 1 {
            t_max
        } else {
            (lo + (hi - lo) * i as f64 / (count - 1) as f64).exp()
        };
        t_grid.push(t);
        g_values.push(eval.eval(t)?.as_f64());
    }
    let zero_side = improper_integral(g, m, 0.0, 1.0, tol);
    let unbounded_at_zero = match zero_side.status {
        IntegralStatus::Diverged => Some(true),
        IntegralStatus::Converged => Some(false),
        IntegralStatus::Inconclusive => None,
    };
    Ok(GTable {
        t_grid,
        g_values,
        m,
        unbounded_at_zero,
    })
}

// ---------------------------------------------------------------------------
// Classical Keller-Osserman condition
// ---------------------------------------------------------------------------

/// Verdict for ∫_1^∞ (∫_1^ζ g(ξ) dξ)^{-1/2} dζ.
///
/// The inner integral is cached at dyadic checkpoints so the outer adaptive
/// evaluation stays near-linear; its value at a point is deterministic
/// regardless of evaluation order.
pub fn classical_ko(g: &NonlinearityExpr, tol: f64) -> IntegralVerdict {
    let checkpoints: RefCell<HashMap<i32, f64>> = RefCell::new(HashMap::new());
    let g_eval = |x: f64| g.eval(x).unwrap_or(f64::NAN);
    let inner_tol = tol * 1e-3;

    let checkpoint = |j: i32| -> f64 {
        fn get(
            j: i32,
            map: &RefCell<HashMap<i32, f64>>,
            g_eval: &dyn Fn(f64) -> f64,
            inner_tol: f64,
        ) -> f64 {
            if j <= 0 {
                return 0.0;
            }
            if let Some(&v) = map.borrow().get(&j) {
                return v;
            }
            let prev = get(j - 1, map, g_eval, inner_tol);
            let lo = blocks::exp2i(j - 1);
            let hi = blocks::exp2i(j);
            let r = panel::integrate_rel(&g_eval, lo, hi, inner_tol);
            let v = prev + r.value;
            map.borrow_mut().insert(j, v);
            v
        }
        get(j, &checkpoints, &g_eval, inner_tol)
    };

    let inner = |zeta: f64| -> f64 {
        if zeta <= 1.0 {
            return 0.0;
        }
        let j = zeta.log2().floor() as i32;
        let base = blocks::exp2i(j);
        checkpoint(j) + panel::integrate_rel(&g_eval, base, zeta, inner_tol).value
    };

    let outer = |zeta: f64| -> f64 {
        let v = inner(zeta);
        if v.is_nan() {
            f64::NAN
        } else {
            v.powf(-0.5)
        }
    };

    // singular at 1 (the inner integral vanishes there)
    improper_verdict(&outer, 1.0, f64::INFINITY, true, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{log_power, parse, power_law};
    use approx::assert_relative_eq;

    #[test]
    fn integrand_examples() {
        let cube = parse("zeta^3").unwrap();
        assert_relative_eq!(ko_integrand(&cube, 2, 4.0).unwrap(), 0.0625, epsilon = 1e-15);
        let lin = parse("zeta").unwrap();
        assert_relative_eq!(
            ko_integrand(&lin, 1, std::f64::consts::E).unwrap(),
            (-1.0f64).exp(),
            epsilon = 1e-15
        );
        assert_relative_eq!(ko_integrand(&lin, 7, 1.0).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn integrand_infinite_where_g_vanishes() {
        let g = parse("zeta^2").unwrap();
        assert_eq!(ko_integrand(&g, 2, 0.0_f64.next_up()).unwrap(), f64::INFINITY);
    }

    #[test]
    fn tail_converges_to_closed_form() {
        // ∫_1^∞ ζ^{-2} dζ = 1 for g=ζ^3, m=2
        let g = parse("zeta^3").unwrap();
        let v = improper_integral(&g, 2, 1.0, f64::INFINITY, 1e-9);
        assert!(v.converged(), "{}", v.evidence.note);
        assert_relative_eq!(v.value.unwrap(), 1.0, max_relative = 1e-9);
    }

    #[test]
    fn linear_g_tail_diverges() {
        let g = parse("zeta").unwrap();
        let v = improper_integral(&g, 2, 1.0, f64::INFINITY, 1e-9);
        assert!(v.diverged(), "{}", v.evidence.note);
    }

    #[test]
    fn cubic_diverges_at_zero() {
        let g = parse("zeta^3").unwrap();
        let v = improper_integral(&g, 2, 0.0, 1.0, 1e-9);
        assert!(v.diverged(), "{}", v.evidence.note);
    }

    #[test]
    fn big_g_closed_form_for_powers() {
        // G(t) = (m/(λ-1)) t^{-(λ-1)/m}
        for (lambda, m) in [(3.0, 2u32), (2.0, 1), (5.0, 4)] {
            let g = power_law(1.0, lambda);
            for t in [0.01f64, 1.0, 4.0, 100.0] {
                let expect = (m as f64 / (lambda - 1.0)) * t.powf(-(lambda - 1.0) / m as f64);
                let got = big_g(&g, m, t, 1e-9).unwrap();
                assert_relative_eq!(got, expect, max_relative = 1e-7);
            }
        }
    }

    #[test]
    fn big_g_divergent_sentinel() {
        let g = parse("zeta").unwrap();
        assert_eq!(big_g(&g, 2, 3.0, 1e-9).unwrap(), f64::INFINITY);
    }

    #[test]
    fn big_g_table_monotone_and_growth_flag() {
        let g = parse("zeta^3").unwrap();
        let table = big_g_table(&g, 2, 0.01, 1.0, 3, 1e-9).unwrap();
        // closed form t^{-1}: {100, 10, 1}
        assert_relative_eq!(table.g_values[0], 100.0, max_relative = 1e-7);
        assert_relative_eq!(table.g_values[1], 10.0, max_relative = 1e-7);
        assert_relative_eq!(table.g_values[2], 1.0, max_relative = 1e-7);
        for w in table.g_values.windows(2) {
            assert!(w[0] >= w[1]);
        }
        assert_eq!(table.unbounded_at_zero, Some(true));
    }

    #[test]
    fn big_g_bounded_at_zero_when_g_positive_there() {
        let g = parse("1 + zeta^2").unwrap();
        let table = big_g_table(&g, 2, 0.01, 1.0, 4, 1e-8).unwrap();
        assert_eq!(table.unbounded_at_zero, Some(false));
    }

    #[test]
    fn classical_ko_examples() {
        let square = parse("zeta^2").unwrap();
        assert!(classical_ko(&square, 1e-3).converged());
        let lin = parse("zeta").unwrap();
        assert!(classical_ko(&lin, 1e-3).diverged());
        let constant = parse("2.5").unwrap();
        assert!(classical_ko(&constant, 1e-3).diverged());
    }

    #[test]
    fn log_power_tail_criticality() {
        // ν > m converges, ν = m critical diverges, ν < m diverges
        let nu3 = log_power(1.0, 3.0);
        assert!(improper_integral(&nu3, 2, 1.0, f64::INFINITY, 1e-6).converged());
        let nu2 = log_power(1.0, 2.0);
        assert!(improper_integral(&nu2, 2, 1.0, f64::INFINITY, 1e-6).diverged());
        let nu1 = log_power(1.0, 1.0);
        assert!(improper_integral(&nu1, 2, 1.0, f64::INFINITY, 1e-6).diverged());
    }

    #[test]
    fn additivity_of_pieces() {
        let g = parse("zeta^3").unwrap();
        let ab = improper_integral(&g, 2, 1.0, 8.0, 1e-10);
        let bc = improper_integral(&g, 2, 8.0, 64.0, 1e-10);
        let ac = improper_integral(&g, 2, 1.0, 64.0, 1e-10);
        let sum = ab.value.unwrap() + bc.value.unwrap();
        assert!((sum - ac.value.unwrap()).abs() <= ab.error_bound + bc.error_bound + ac.error_bound);
    }

    #[test]
    fn scaling_preserves_status() {
        for c in [1e-3, 1.0, 1e3] {
            let g = power_law(c, 3.0);
            assert!(improper_integral(&g, 2, 1.0, f64::INFINITY, 1e-8).converged());
            let h = power_law(c, 1.0);
            assert!(improper_integral(&h, 2, 1.0, f64::INFINITY, 1e-8).diverged());
        }
    }
}
