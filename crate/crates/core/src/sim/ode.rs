//! Outward integration of the radial polyharmonic system with blow-up
//! detection.
//!
//! For even m the model equation Δ^{m/2} u = g(u) becomes a Laplacian cascade
//! v_0 = u, Δ v_j = v_{j+1}, Δ v_{M-1} = g(v_0) with M = m/2, i.e. a
//! first-order system in (v_j, v_j') with the radial Laplacian
//! Δv = v'' + (n-1) v'/r. Regularity at the origin forces v_j'(0) = 0; the
//! (n-1)/r term is removable there (Δv(0) = n·v''(0)) and the integration
//! starts with one explicit Taylor step before handing over to the adaptive
//! stepper (Dormand-Prince 5(4)).
//!
//! Blow-up is operational: u crossing a ceiling while the step collapses.
//! The crossing radius is re-bracketed by repeated integration with ceiling
//! doubling, which converges geometrically for power-type blow-up.

use crate::conditions::ProblemSpec;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub enum ProfileStatus {
    /// Reached r_max without event.
    Global,
    /// Estimated blow-up radius and a bracket containing it.
    BlowUp { radius: f64, bracket: (f64, f64) },
    Aborted { reason: String },
}

/// One accepted integration node: state y = [v_0, v_0', ..., v_{M-1}, v_{M-1}']
/// and its derivative, enough for cubic Hermite dense output.
#[derive(Debug, Clone, Serialize)]
pub struct StepNode {
    pub r: f64,
    pub y: Vec<f64>,
    pub dy: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RadialProfile {
    pub n: u32,
    /// Operator order m = 2·half_m.
    pub m: u32,
    pub steps: Vec<StepNode>,
    pub status: ProfileStatus,
}

impl RadialProfile {
    pub fn half_m(&self) -> usize {
        (self.m / 2) as usize
    }

    pub fn max_radius(&self) -> f64 {
        self.steps.last().map(|s| s.r).unwrap_or(0.0)
    }

    pub fn grid(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.r).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.y[0]).collect()
    }

    /// Cascade component v_j at a grid index.
    pub fn component(&self, j: usize, idx: usize) -> f64 {
        self.steps[idx].y[2 * j]
    }

    /// Dense output of u = v_0 by cubic Hermite interpolation.
    pub fn u_at(&self, r: f64) -> f64 {
        self.component_at(0, r)
    }

    /// Dense output of v_j.
    pub fn component_at(&self, j: usize, r: f64) -> f64 {
        let idx = 2 * j;
        match self
            .steps
            .binary_search_by(|s| s.r.partial_cmp(&r).unwrap())
        {
            Ok(i) => self.steps[i].y[idx],
            Err(0) => self.steps[0].y[idx],
            Err(i) if i >= self.steps.len() => self.steps.last().unwrap().y[idx],
            Err(i) => {
                let (a, b) = (&self.steps[i - 1], &self.steps[i]);
                hermite(a.r, a.y[idx], a.dy[idx], b.r, b.y[idx], b.dy[idx], r)
            }
        }
    }

    /// Build a single-component synthetic profile from a closed form
    /// (used to exercise the mass/doubling machinery on known data).
    pub fn from_fn(
        n: u32,
        r_max: f64,
        points: usize,
        f: impl Fn(f64) -> f64,
        df: impl Fn(f64) -> f64,
    ) -> RadialProfile {
        assert!(points >= 2 && r_max > 0.0);
        let steps = (0..points)
            .map(|i| {
                let r = r_max * i as f64 / (points - 1) as f64;
                StepNode {
                    r,
                    y: vec![f(r), df(r)],
                    dy: vec![df(r), 0.0],
                }
            })
            .collect();
        RadialProfile {
            n,
            m: 2,
            steps,
            status: ProfileStatus::Global,
        }
    }

    /// CSV serialization: columns r, u, v_1 .. v_{m/2-1}.
    pub fn to_csv(&self) -> String {
        let half = self.half_m().max(1);
        let mut out = String::from("r,u");
        for j in 1..half {
            out.push_str(&format!(",v_{j}"));
        }
        out.push('\n');
        for s in &self.steps {
            out.push_str(&format!("{}", s.r));
            out.push(',');
            out.push_str(&format!("{}", s.y[0]));
            for j in 1..half {
                out.push_str(&format!(",{}", s.y[2 * j]));
            }
            out.push('\n');
        }
        out
    }
}

fn hermite(r0: f64, y0: f64, m0: f64, r1: f64, y1: f64, m1: f64, r: f64) -> f64 {
    let h = r1 - r0;
    let t = (r - r0) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * y0
        + (t3 - 2.0 * t2 + t) * h * m0
        + (-2.0 * t3 + 3.0 * t2) * y1
        + (t3 - t2) * h * m1
}

#[derive(Debug, Clone)]
pub struct IntegrationOptions {
    pub r_max: f64,
    pub rtol: f64,
    pub atol: f64,
    /// u crossing this value counts as a blow-up candidate.
    pub blowup_ceiling: f64,
    /// Relative width required of the blow-up bracket.
    pub blowup_radius_rel_tol: f64,
    /// Initial data c_j for the higher cascade components (j ≥ 1); zeros by
    /// default, which is the blow-up probing configuration.
    pub initial_higher: Vec<f64>,
    pub max_steps: usize,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        IntegrationOptions {
            r_max: 10.0,
            rtol: 1e-9,
            atol: 1e-12,
            blowup_ceiling: 1e12,
            blowup_radius_rel_tol: 1e-6,
            initial_higher: Vec::new(),
            max_steps: 2_000_000,
        }
    }
}

enum RunEnd {
    ReachedRMax,
    CeilingCrossed { r: f64 },
    Aborted { reason: String },
}

struct RunResult {
    steps: Vec<StepNode>,
    end: RunEnd,
}

/// Dormand-Prince 5(4) coefficients.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// 5th-order minus embedded 4th-order weights (error coefficients).
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn run(spec: &ProblemSpec, u0: f64, opts: &IntegrationOptions, ceiling: f64) -> RunResult {
    let half_m = (spec.m / 2) as usize;
    let dim = 2 * half_m;
    let n1 = (spec.n - 1) as f64;

    // rhs_j(0): cascade source at the origin
    let mut y0 = vec![0.0; dim];
    y0[0] = u0;
    for (j, &c) in opts.initial_higher.iter().enumerate() {
        if 2 * (j + 1) < dim {
            y0[2 * (j + 1)] = c;
        }
    }

    let eval_g = |u: f64| -> Result<f64, String> {
        if u < 0.0 {
            return Err(format!("nonlinearity evaluated at negative argument u = {u}"));
        }
        spec.g
            .eval(u)
            .map_err(|e| format!("nonlinearity evaluation failed: {e}"))
    };

    let derivs = |r: f64, y: &[f64], dy: &mut [f64]| -> Result<(), String> {
        let gu = eval_g(y[0])?;
        for j in 0..half_m {
            let rhs = if j + 1 < half_m { y[2 * (j + 1)] } else { gu };
            dy[2 * j] = y[2 * j + 1];
            dy[2 * j + 1] = rhs - n1 * y[2 * j + 1] / r;
        }
        Ok(())
    };

    let mut steps: Vec<StepNode> = Vec::new();

    // Taylor step off the origin: v_j'' (0) = rhs_j(0)/n.
    let g_at_origin = match eval_g(y0[0]) {
        Ok(v) => v,
        Err(reason) => {
            return RunResult {
                steps,
                end: RunEnd::Aborted { reason },
            }
        }
    };
    let mut second = vec![0.0; half_m];
    for j in 0..half_m {
        let rhs = if j + 1 < half_m {
            y0[2 * (j + 1)]
        } else {
            g_at_origin
        };
        second[j] = rhs / spec.n as f64;
    }
    // origin node (derivative of v_j' is the regular limit value v_j''(0))
    let mut dy_origin = vec![0.0; dim];
    for j in 0..half_m {
        dy_origin[2 * j + 1] = second[j];
    }
    steps.push(StepNode {
        r: 0.0,
        y: y0.clone(),
        dy: dy_origin,
    });

    let h0 = 1e-4 * opts.r_max.min(1.0);
    let mut r = h0;
    let mut y: Vec<f64> = (0..dim)
        .map(|i| {
            let j = i / 2;
            if i % 2 == 0 {
                y0[i] + 0.5 * second[j] * h0 * h0
            } else {
                second[j] * h0
            }
        })
        .collect();

    let mut k1 = vec![0.0; dim];
    if let Err(reason) = derivs(r, &y, &mut k1) {
        return RunResult {
            steps,
            end: RunEnd::Aborted { reason },
        };
    }
    steps.push(StepNode {
        r,
        y: y.clone(),
        dy: k1.clone(),
    });

    let mut h = h0;
    let mut k = vec![vec![0.0; dim]; 7];
    k[0].copy_from_slice(&k1);

    for _ in 0..opts.max_steps {
        if r >= opts.r_max {
            return RunResult {
                steps,
                end: RunEnd::ReachedRMax,
            };
        }
        h = h.min(opts.r_max - r);
        let h_floor = 1e-13 * r.max(1.0);
        if h < h_floor {
            let end = if y[0] > 1e6 {
                RunEnd::CeilingCrossed { r }
            } else {
                RunEnd::Aborted {
                    reason: format!("step underflow at r = {r} without value growth"),
                }
            };
            return RunResult { steps, end };
        }

        // one DOPRI5 attempt
        let mut failed = None;
        let mut ytmp = vec![0.0; dim];
        for stage in 0..6 {
            for i in 0..dim {
                let mut acc = 0.0;
                for (s, ks) in k.iter().enumerate().take(stage + 1) {
                    acc += A[stage][s] * ks[i];
                }
                ytmp[i] = y[i] + h * acc;
            }
            let rs = r + h * [0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0][stage];
            let (head, tail) = k.split_at_mut(stage + 1);
            if let Err(reason) = derivs(rs, &ytmp, &mut tail[0]) {
                failed = Some(reason);
                break;
            }
            let _ = head;
        }
        if let Some(reason) = failed {
            // shrink and retry; persistent failure ends via the step floor
            h *= 0.25;
            if h >= h_floor {
                continue;
            }
            return RunResult {
                steps,
                end: RunEnd::Aborted { reason },
            };
        }
        // 5th-order solution is the last stage state (FSAL), error from E
        let y5 = ytmp.clone();
        let mut err_norm = 0.0;
        for i in 0..dim {
            let mut e = 0.0;
            for (s, ks) in k.iter().enumerate() {
                e += E[s] * ks[i];
            }
            e *= h;
            let scale = opts.atol + opts.rtol * y[i].abs().max(y5[i].abs());
            err_norm += (e / scale) * (e / scale);
        }
        err_norm = (err_norm / dim as f64).sqrt();

        if err_norm <= 1.0 {
            r += h;
            y = y5;
            k1.copy_from_slice(&k[6]);
            k[0].copy_from_slice(&k1);
            steps.push(StepNode {
                r,
                y: y.clone(),
                dy: k1.clone(),
            });
            if y[0] > ceiling {
                // refine the crossing radius within the last step
                let a = &steps[steps.len() - 2];
                let b = &steps[steps.len() - 1];
                let mut lo = a.r;
                let mut hi = b.r;
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    let val = hermite(a.r, a.y[0], a.dy[0], b.r, b.y[0], b.dy[0], mid);
                    if val > ceiling {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                return RunResult {
                    steps,
                    end: RunEnd::CeilingCrossed { r: 0.5 * (lo + hi) },
                };
            }
        }
        let factor = if err_norm > 0.0 {
            (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        h *= factor;
    }
    RunResult {
        steps,
        end: RunEnd::Aborted {
            reason: "step budget exhausted".into(),
        },
    }
}

/// Integrate the radial cascade outward from the origin.
///
/// Requires even m. Initial data: v_0(0) = u0, higher components from
/// `opts.initial_higher` (default 0), all first derivatives 0.
pub fn integrate_radial(spec: &ProblemSpec, u0: f64, opts: &IntegrationOptions) -> RadialProfile {
    assert!(spec.m % 2 == 0, "the radial model requires even m");
    assert!(u0 >= 0.0, "u0 must be non-negative");

    let first = run(spec, u0, opts, opts.blowup_ceiling);
    match first.end {
        RunEnd::ReachedRMax => RadialProfile {
            n: spec.n,
            m: spec.m,
            steps: first.steps,
            status: ProfileStatus::Global,
        },
        RunEnd::Aborted { reason } => RadialProfile {
            n: spec.n,
            m: spec.m,
            steps: first.steps,
            status: ProfileStatus::Aborted { reason },
        },
        RunEnd::CeilingCrossed { r } => bracket_blowup(spec, u0, opts, first.steps, r),
    }
}

/// Re-run with doubled ceilings until the extrapolated blow-up radius is
/// bracketed to the requested relative width.
fn bracket_blowup(
    spec: &ProblemSpec,
    u0: f64,
    opts: &IntegrationOptions,
    mut steps: Vec<StepNode>,
    r_first: f64,
) -> RadialProfile {
    let mut crossings = vec![r_first];
    let mut ceiling = opts.blowup_ceiling;
    let mut estimate = r_first;
    let mut hi_bound = f64::INFINITY;

    for _ in 0..20 {
        ceiling *= 2.0;
        let next = run(spec, u0, opts, ceiling);
        match next.end {
            RunEnd::CeilingCrossed { r } => {
                steps = next.steps;
                crossings.push(r);
                let c = crossings.len();
                if c >= 3 {
                    let (r0, r1, r2) = (crossings[c - 3], crossings[c - 2], crossings[c - 1]);
                    let (d01, d12) = (r1 - r0, r2 - r1);
                    if d01 > 0.0 && d12 > 0.0 && d12 < d01 {
                        let q = d12 / d01;
                        let gap = d12 * q / (1.0 - q);
                        estimate = r2 + gap;
                        hi_bound = r2 + 2.0 * gap;
                        if hi_bound - r2 <= opts.blowup_radius_rel_tol * estimate.max(1e-30) {
                            break;
                        }
                    } else {
                        estimate = r2;
                    }
                } else {
                    estimate = r;
                }
            }
            RunEnd::ReachedRMax => {
                // a higher ceiling no longer crosses before r_max: treat the
                // candidate as growth, not blow-up
                return RadialProfile {
                    n: spec.n,
                    m: spec.m,
                    steps: next.steps,
                    status: ProfileStatus::Global,
                };
            }
            RunEnd::Aborted { .. } => {
                // the sharper run stalled; keep the best bracket so far
                break;
            }
        }
    }

    let lo = *crossings.last().unwrap();
    let hi = if hi_bound.is_finite() {
        hi_bound
    } else {
        estimate * (1.0 + opts.blowup_radius_rel_tol)
    };
    RadialProfile {
        n: spec.n,
        m: spec.m,
        steps,
        status: ProfileStatus::BlowUp {
            radius: estimate,
            bracket: (lo, hi),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use approx::assert_relative_eq;

    fn spec(g: &str, m: u32, n: u32) -> ProblemSpec {
        ProblemSpec::new(m, n, 1.0, parse(g).unwrap())
    }

    #[test]
    fn modified_helmholtz_matches_sinh_profile() {
        // Δu = u in 3-D with u(0)=1, u'(0)=0 has u(r) = sinh(r)/r
        let s = spec("zeta", 2, 3);
        let opts = IntegrationOptions {
            r_max: 5.0,
            ..Default::default()
        };
        let profile = integrate_radial(&s, 1.0, &opts);
        assert!(matches!(profile.status, ProfileStatus::Global));
        for r in [0.5f64, 1.0, 2.0, 4.0] {
            let expect = r.sinh() / r;
            assert_relative_eq!(profile.u_at(r), expect, max_relative = 1e-6);
        }
    }

    #[test]
    fn zero_data_stays_zero() {
        let s = spec("zeta^2", 2, 3);
        let opts = IntegrationOptions {
            r_max: 3.0,
            ..Default::default()
        };
        let profile = integrate_radial(&s, 0.0, &opts);
        assert!(matches!(profile.status, ProfileStatus::Global));
        for step in &profile.steps {
            assert_eq!(step.y[0], 0.0);
        }
    }

    #[test]
    fn one_dimensional_blowup_matches_energy_quadrature() {
        // u'' = u^2, u(0)=1, u'(0)=0: R = sqrt(3/2) ∫_1^∞ (u^3-1)^{-1/2} du
        let s = spec("zeta^2", 2, 1);
        let opts = IntegrationOptions {
            r_max: 20.0,
            ..Default::default()
        };
        let profile = integrate_radial(&s, 1.0, &opts);
        let ProfileStatus::BlowUp { radius, bracket } = &profile.status else {
            panic!("expected blow-up, got {:?}", profile.status);
        };

        // independent oracle: substitution u = 1 + s^2 gives
        // ∫ (u^3-1)^{-1/2} du = ∫ 2 (3 + 3 s^2 + s^4)^{-1/2} ds (Simpson) and
        // an O(S^{-3})-accurate analytic tail
        let f = |s: f64| 2.0 / (3.0 + 3.0 * s * s + s * s * s * s).sqrt();
        let big_s = 100.0;
        let n = 1 << 20;
        let h = big_s / n as f64;
        let mut simpson = f(0.0) + f(big_s);
        for i in 1..n {
            simpson += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        simpson *= h / 3.0;
        let tail = 2.0 / big_s - 1.0 / big_s.powi(3);
        let oracle = (1.5f64).sqrt() * (simpson + tail);

        assert!(
            (radius - oracle).abs() < 1e-4,
            "radius {radius} vs oracle {oracle}"
        );
        assert!(bracket.0 <= *radius && *radius <= bracket.1);
        assert!(bracket.1 - bracket.0 <= 2.0 * opts.blowup_radius_rel_tol * radius);
    }

    #[test]
    fn blowup_radius_monotone_in_initial_height() {
        let s = spec("zeta^2", 2, 3);
        let opts = IntegrationOptions {
            r_max: 50.0,
            ..Default::default()
        };
        let mut radii = Vec::new();
        for u0 in [0.5, 1.0, 2.0, 4.0] {
            let profile = integrate_radial(&s, u0, &opts);
            match profile.status {
                ProfileStatus::BlowUp { radius, .. } => radii.push(radius),
                other => panic!("expected blow-up for u0={u0}, got {other:?}"),
            }
        }
        for w in radii.windows(2) {
            assert!(w[1] < w[0], "blow-up radius must shrink: {radii:?}");
        }
    }

    #[test]
    fn cascade_consistency_for_m4() {
        // m=4: Δv_0 = v_1; numerically differentiate the stored v_0
        let s = spec("zeta", 4, 3);
        let opts = IntegrationOptions {
            r_max: 2.0,
            ..Default::default()
        };
        let profile = integrate_radial(&s, 1.0, &opts);
        assert!(matches!(profile.status, ProfileStatus::Global));
        let h = 1e-4;
        for &r in &[0.5, 1.0, 1.5] {
            let lap = (profile.u_at(r + h) - 2.0 * profile.u_at(r) + profile.u_at(r - h))
                / (h * h)
                + (profile.n - 1) as f64 * (profile.u_at(r + h) - profile.u_at(r - h))
                    / (2.0 * h * r);
            let v1 = profile.component_at(1, r);
            assert_relative_eq!(lap, v1, max_relative = 1e-3);
        }
    }

    #[test]
    fn synthetic_profile_interpolates_exactly_for_quadratics() {
        let p = RadialProfile::from_fn(3, 2.0, 65, |r| r * r, |r| 2.0 * r);
        for r in [0.1, 0.77, 1.5, 1.99] {
            assert_relative_eq!(p.u_at(r), r * r, max_relative = 1e-12);
        }
    }
}
