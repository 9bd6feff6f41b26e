//! Adaptive panel quadrature on finite intervals.
//!
//! A 15-point Gauss-Kronrod rule with recursive bisection. Integrands here
//! are smooth inside dyadic blocks; endpoint singularities are the block
//! scheme's job, and the Kronrod abscissae never touch the endpoints.

/// Kronrod abscissae (positive half) for the 7-15 pair.
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];

/// Gauss weights for the embedded 7-point rule.
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

/// Kronrod weights.
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];

/// One Gauss-Kronrod panel. Returns (integral, error estimate, saw_nan).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64, bool) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut saw_nan = false;

    let mut eval = |x: f64| -> f64 {
        let v = f(x);
        if v.is_nan() {
            saw_nan = true;
            0.0
        } else {
            v
        }
    };

    let fc = eval(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut res_abs = kronrod.abs();

    let mut fv = [0.0f64; 15];
    fv[7] = fc;
    for (i, &x) in XGK.iter().enumerate().take(7) {
        let dx = half * x;
        let f1 = eval(center - dx);
        let f2 = eval(center + dx);
        fv[i] = f1;
        fv[14 - i] = f2;
        kronrod += WGK[i] * (f1 + f2);
        res_abs += WGK[i] * (f1.abs() + f2.abs());
        if i % 2 == 1 {
            gauss += WG[i / 2] * (f1 + f2);
        }
    }

    let mean = kronrod * 0.5;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for i in 0..7 {
        res_asc += WGK[i] * ((fv[i] - mean).abs() + (fv[14 - i] - mean).abs());
    }

    let integral = kronrod * half;
    res_abs *= half.abs();
    res_asc *= half.abs();

    // QUADPACK-style error rescaling
    let mut err = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (integral, err, saw_nan)
}

#[derive(Debug, Clone, Copy)]
pub struct PanelResult {
    pub value: f64,
    pub error: f64,
    /// The integrand produced NaN somewhere (treated as 0; the caller must
    /// surface this as an inconclusive or failed verdict).
    pub saw_nan: bool,
}

/// Integrate `f` over [a, b] by global-error adaptive bisection: the panel
/// with the largest error estimate is split until the summed error drops
/// below `tol_abs` or the panel budget is exhausted.
///
/// The final summation is in ascending interval order, so the result is
/// deterministic and independent of the splitting history.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol_abs: f64) -> PanelResult {
    const MAX_PANELS: usize = 4096;

    let mut out = PanelResult {
        value: 0.0,
        error: 0.0,
        saw_nan: false,
    };
    if a == b {
        return out;
    }
    let tol = tol_abs.max(f64::MIN_POSITIVE);

    // (lo, hi, value, error)
    let mut panels: Vec<(f64, f64, f64, f64)> = Vec::with_capacity(64);
    let (v, e, nan) = gk15(f, a, b);
    out.saw_nan |= nan;
    panels.push((a, b, v, e));
    let mut total_err = e;

    while total_err > tol && panels.len() < MAX_PANELS {
        // split the worst panel (ties: leftmost, for determinism)
        let mut worst = 0;
        for (i, p) in panels.iter().enumerate() {
            if p.3 > panels[worst].3 || (p.3 == panels[worst].3 && p.0 < panels[worst].0) {
                worst = i;
            }
        }
        let (lo, hi, _, err) = panels[worst];
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || err <= 50.0 * f64::EPSILON * out_scale(&panels) {
            break; // resolution floor
        }
        let (v1, e1, n1) = gk15(f, lo, mid);
        let (v2, e2, n2) = gk15(f, mid, hi);
        out.saw_nan |= n1 || n2;
        panels[worst] = (lo, mid, v1, e1);
        panels.push((mid, hi, v2, e2));
        total_err = panels.iter().map(|p| p.3).sum();
    }

    panels.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let values: Vec<f64> = panels.iter().map(|p| p.2).collect();
    out.value = super::blocks::pairwise_sum(&values);
    out.error = panels.iter().map(|p| p.3).sum();
    out
}

fn out_scale(panels: &[(f64, f64, f64, f64)]) -> f64 {
    panels.iter().map(|p| p.2.abs()).sum::<f64>().max(1e-300)
}

/// Integrate with a relative target: tolerance scales with a first estimate.
pub fn integrate_rel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol_rel: f64) -> PanelResult {
    let (rough, _, _) = gk15(f, a, b);
    let tol_abs = tol_rel * rough.abs().max(1e-300);
    integrate(f, a, b, tol_abs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(&|x: f64| x * x * x, 0.0, 2.0, 1e-12);
        assert_relative_eq!(r.value, 4.0, epsilon = 1e-12);
    }

    #[test]
    fn smooth_transcendental() {
        let r = integrate(&|x: f64| x.exp(), 0.0, 1.0, 1e-13);
        assert_relative_eq!(r.value, std::f64::consts::E - 1.0, epsilon = 1e-12);
        assert!(r.error < 1e-10);
    }

    #[test]
    fn integrable_endpoint_singularity() {
        // ∫_0^1 x^{-1/2} dx = 2; the endpoints are never sampled
        let r = integrate(&|x: f64| x.powf(-0.5), 0.0, 1.0, 1e-10);
        assert_relative_eq!(r.value, 2.0, epsilon = 1e-7);
    }

    #[test]
    fn nan_is_flagged() {
        let r = integrate(&|x: f64| if x < 0.5 { f64::NAN } else { 1.0 }, 0.0, 1.0, 1e-6);
        assert!(r.saw_nan);
    }
}
